//! Matrix rank over `Z/mZ` by dynamic evaluation: eliminate as if `m` were
//! prime, and when a pivot turns out to be a zero divisor, split the modulus
//! along the gcd it exposes and carry on modulo both factors.
//!
//! The arithmetic level signals [`ZeroDivisorSignal`]; the elimination
//! re-raises it as [`RankIterationSignal`] with its progress; the splitting
//! wrapper consumes both.
//!
//! Generic over the integer type. With a fixed-width type, products of two
//! residues must fit, so `m` must stay below the square root of its maximum.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::Signed;
use thiserror::Error;

pub trait Int: Integer + Signed + Clone + Send + Sync + fmt::Debug + fmt::Display {}

impl<T: Integer + Signed + Clone + Send + Sync + fmt::Debug + fmt::Display> Int for T {}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DynevError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("matrix: {0}")]
    Format(String),
}

/// An element of `Z/mZ`, always reduced into `[0, m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueElem<N> {
    value: N,
    modulus: N,
}

impl<N: Int> ResidueElem<N> {
    pub fn new(value: N, modulus: N) -> Self {
        assert!(modulus > N::one(), "modulus must be at least 2");
        ResidueElem {
            value: value.mod_floor(&modulus),
            modulus,
        }
    }

    pub fn value(&self) -> &N {
        &self.value
    }

    pub fn modulus(&self) -> &N {
        &self.modulus
    }

    fn same(&self, other: &Self) {
        assert!(self.modulus == other.modulus, "residues with different moduli");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same(other);
        Self::new(self.value.clone() + other.value.clone(), self.modulus.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same(other);
        Self::new(self.value.clone() - other.value.clone(), self.modulus.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same(other);
        Self::new(self.value.clone() * other.value.clone(), self.modulus.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn inv(&self) -> Result<Self, ZeroDivisorSignal<N>> {
        inv_mod(&self.value, &self.modulus)
    }
}

impl<N: fmt::Display> fmt::Display for ResidueElem<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// Raised when inverting a non-unit.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{witness} is not invertible: gcd with the modulus is {gcd}")]
pub struct ZeroDivisorSignal<N: fmt::Display + fmt::Debug> {
    pub witness: N,
    pub gcd: N,
}

/// A zero divisor met as a pivot, with the progress of the elimination.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("pivot {iteration} (rank so far {rank_so_far}): {inner}")]
pub struct RankIterationSignal<N: fmt::Display + fmt::Debug> {
    pub rank_so_far: usize,
    pub iteration: usize,
    pub inner: ZeroDivisorSignal<N>,
    /// Working matrix at the time of the signal, reduced modulo the modulus.
    pub state: Matrix<N>,
}

/// `(rank, modulus)` pairs in recursion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitRankResult<N>(pub Vec<(usize, N)>);

impl<N: Int> SplitRankResult<N> {
    pub fn pairs(&self) -> &[(usize, N)] {
        &self.0
    }

    pub fn modulus_product(&self) -> N {
        self.0.iter().fold(N::one(), |acc, (_, m)| acc * m.clone())
    }
}

impl<N: fmt::Display> fmt::Display for SplitRankResult<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, m) in &self.0 {
            writeln!(f, "{r} {m}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RankMode {
    /// Each branch recomputes from the input matrix.
    #[default]
    Restart,
    /// Each branch resumes from the forwarded elimination state.
    Continue,
}

impl FromStr for RankMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "restart" => Ok(RankMode::Restart),
            "continue" => Ok(RankMode::Continue),
            _ => Err(format!("unknown mode `{s}` (expected restart or continue)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<N> {
    rows: usize,
    cols: usize,
    data: Vec<N>,
}

impl<N: Int> Matrix<N> {
    pub fn new(rows: usize, cols: usize, data: Vec<N>) -> Result<Self, DynevError> {
        if data.len() != rows * cols {
            return Err(DynevError::Format(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<N>>) -> Result<Self, DynevError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(DynevError::Format("rows of different lengths".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n * n)
            .map(|k| if k / n == k % n { N::one() } else { N::zero() })
            .collect();
        Matrix { rows: n, cols: n, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![N::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &N {
        &self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: N) {
        self.data[i * self.cols + j] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Every entry reduced into `[0, m)`.
    pub fn reduced(&self, m: &N) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mod_floor(m)).collect(),
        }
    }
}

impl<N: Int + FromStr> Matrix<N> {
    /// Whitespace-separated integers, the first two being the row and
    /// column counts.
    pub fn parse(text: &str) -> Result<Self, DynevError> {
        let mut it = text.split_whitespace();
        let mut dim = |what: &str| -> Result<usize, DynevError> {
            it.next()
                .ok_or_else(|| DynevError::Format(format!("missing {what}")))?
                .parse()
                .map_err(|_| DynevError::Format(format!("bad {what}")))
        };
        let (rows, cols) = (dim("row count")?, dim("column count")?);
        let data = it
            .map(|w| w.parse::<N>().map_err(|_| DynevError::Format(format!("bad entry `{w}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rows, cols, data)
    }
}

impl<N: fmt::Display> fmt::Display for Matrix<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.data[i * self.cols + j].to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// The inverse of `a` modulo `m`, or the gcd that prevents it. Zero is
/// reported with gcd `m`.
pub fn inv_mod<N: Int>(a: &N, m: &N) -> Result<ResidueElem<N>, ZeroDivisorSignal<N>> {
    let a = a.mod_floor(m);
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Ok(ResidueElem::new(e.x, m.clone()))
    } else {
        Err(ZeroDivisorSignal { witness: a, gcd: e.gcd })
    }
}

/// Row reduction modulo `m` treating every nonzero pivot as invertible.
/// Pivots are chosen first-nonzero in row-major order over the remaining
/// rows. With `start = Some((rank, iteration))`, `mat` is a working matrix
/// whose first `iteration` rows are finished pivot rows.
pub fn gauss_rank_mod<N: Int>(
    mat: &Matrix<N>,
    m: &N,
    start: Option<(usize, usize)>,
) -> Result<usize, RankIterationSignal<N>> {
    assert!(*m > N::one(), "modulus must be at least 2");
    let mut w = mat.reduced(m);
    let (mut rank, mut r) = start.unwrap_or((0, 0));
    loop {
        let pivot = (r..w.rows).find_map(|i| (0..w.cols).find(|&j| !w.get(i, j).is_zero()).map(|j| (i, j)));
        let Some((i, j)) = pivot else {
            return Ok(rank);
        };
        w.swap_rows(r, i);
        let p = w.get(r, j).clone();
        let inv = match inv_mod(&p, m) {
            Ok(inv) => inv.value().clone(),
            Err(inner) => {
                return Err(RankIterationSignal {
                    rank_so_far: rank,
                    iteration: r,
                    inner,
                    state: w,
                })
            }
        };
        for k in r + 1..w.rows {
            let factor = (w.get(k, j).clone() * inv.clone()).mod_floor(m);
            if factor.is_zero() {
                continue;
            }
            for c in 0..w.cols {
                let v = (w.get(k, c).clone() - factor.clone() * w.get(r, c).clone()).mod_floor(m);
                w.set(k, c, v);
            }
        }
        rank += 1;
        r += 1;
    }
}

fn split<N: Int>(mat: &Matrix<N>, m: &N, mode: RankMode, start: Option<(usize, usize)>) -> Vec<(usize, N)> {
    match gauss_rank_mod(mat, m, start) {
        Ok(rank) => vec![(rank, m.clone())],
        Err(sig) => {
            let g = sig.inner.gcd.clone();
            let h = m.clone() / g.clone();
            let (from, resume) = match mode {
                RankMode::Restart => (mat, None),
                RankMode::Continue => (&sig.state, Some((sig.rank_so_far, sig.iteration))),
            };
            let (mut a, b) = rayon::join(|| branch(from, &g, mode, resume), || branch(from, &h, mode, resume));
            a.extend(b);
            a
        }
    }
}

fn branch<N: Int>(mat: &Matrix<N>, m: &N, mode: RankMode, start: Option<(usize, usize)>) -> Vec<(usize, N)> {
    if m.is_one() {
        Vec::new()
    } else {
        split(mat, m, mode, start)
    }
}

/// Rank of `mat` modulo every factor of `m` that the elimination exposes,
/// in recursion order (the gcd branch first).
pub fn dynamic_rank<N: Int>(mat: &Matrix<N>, m: &N, mode: RankMode) -> Result<SplitRankResult<N>, DynevError> {
    if *m <= N::one() {
        return Err(DynevError::BadModulus(m.to_string()));
    }
    Ok(SplitRankResult(split(mat, m, mode, None)))
}

/// Trial division.
pub fn is_prime<N: Int>(p: &N) -> bool {
    let two = N::one() + N::one();
    if *p < two {
        return false;
    }
    let mut d = two;
    while d.clone() * d.clone() <= *p {
        if p.is_multiple_of(&d) {
            return false;
        }
        d = d + N::one();
    }
    true
}

fn pow_mod<N: Int>(base: &N, mut e: N, p: &N) -> N {
    let two = N::one() + N::one();
    let mut b = base.mod_floor(p);
    let mut acc = N::one();
    while !e.is_zero() {
        if e.is_odd() {
            acc = (acc * b.clone()).mod_floor(p);
        }
        b = (b.clone() * b).mod_floor(p);
        e = e / two.clone();
    }
    acc
}

/// Rank over the field with `p` elements by column-wise elimination, with
/// inverses from Fermat's little theorem.
pub fn prime_field_rank_oracle<N: Int>(mat: &Matrix<N>, p: &N) -> Result<usize, DynevError> {
    if !is_prime(p) {
        return Err(DynevError::NotPrime(p.to_string()));
    }
    let two = N::one() + N::one();
    let mut a: Vec<Vec<N>> = (0..mat.rows())
        .map(|i| (0..mat.cols()).map(|j| mat.get(i, j).mod_floor(p)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..mat.cols() {
        let Some(piv) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = pow_mod(&a[rank][col], p.clone() - two.clone(), p);
        for i in 0..a.len() {
            if i == rank || a[i][col].is_zero() {
                continue;
            }
            let f = (a[i][col].clone() * inv.clone()).mod_floor(p);
            for c in col..mat.cols() {
                a[i][c] = (a[i][c].clone() - f.clone() * a[rank][c].clone()).mod_floor(p);
            }
        }
        rank += 1;
    }
    Ok(rank)
}

/// Prime factors of `n`, ascending, without repetition.
pub fn prime_factors<N: Int>(n: &N) -> Vec<N> {
    let mut out = Vec::new();
    let mut n = n.abs();
    let mut d = N::one() + N::one();
    while d.clone() * d.clone() <= n {
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            while n.is_multiple_of(&d) {
                n = n / d.clone();
            }
        }
        d = d + N::one();
    }
    if n > N::one() {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn mat(rows: &[&[i64]]) -> Matrix<i64> {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn inverses() {
        assert_eq!(*inv_mod(&3i64, &7).unwrap().value(), 5);
        for m in 2..40i64 {
            assert_eq!(*inv_mod(&1, &m).unwrap().value(), 1);
        }
        assert_eq!(inv_mod(&2i64, &6), Err(ZeroDivisorSignal { witness: 2, gcd: 2 }));
        assert_eq!(*inv_mod(&-1i64, &7).unwrap().value(), 6);
    }

    #[test]
    fn residue_arithmetic() {
        let a = ResidueElem::new(5i64, 6);
        let b = ResidueElem::new(-2i64, 6);
        assert_eq!(*b.value(), 4);
        assert_eq!(*a.add(&b).value(), 3);
        assert_eq!(*a.sub(&b).value(), 1);
        assert_eq!(*a.mul(&b).value(), 2);
        assert_eq!(*a.mul(&a.inv().unwrap()).value(), 1);
    }

    #[test]
    fn gauss_examples() {
        assert_eq!(gauss_rank_mod(&Matrix::<i64>::identity(4), &7, None), Ok(4));
        assert_eq!(gauss_rank_mod(&mat(&[&[1, 0], &[0, 0]]), &6, None), Ok(1));
        let sig = gauss_rank_mod(&mat(&[&[2]]), &6, None).unwrap_err();
        assert_eq!((sig.rank_so_far, sig.iteration, sig.inner.gcd), (0, 0, 2));
        let sig = gauss_rank_mod(&mat(&[&[1, 1], &[1, 3]]), &6, None).unwrap_err();
        assert_eq!((sig.rank_so_far, sig.iteration, sig.inner.gcd), (1, 1, 2));
    }

    #[test]
    fn split_examples() {
        for mode in [RankMode::Restart, RankMode::Continue] {
            assert_eq!(dynamic_rank(&mat(&[&[2]]), &6, mode).unwrap().0, vec![(0, 2), (1, 3)]);
            assert_eq!(dynamic_rank(&Matrix::<i64>::identity(3), &6, mode).unwrap().0, vec![(3, 6)]);
            assert_eq!(dynamic_rank(&mat(&[&[3, 1], &[0, 2]]), &6, mode).unwrap().0, vec![(1, 3), (1, 2)]);
        }
        // repeated factors split down to 2 and 2
        assert_eq!(dynamic_rank(&mat(&[&[2]]), &4, RankMode::Restart).unwrap().0, vec![(0, 2), (0, 2)]);
        assert!(dynamic_rank(&mat(&[&[2]]), &1, RankMode::Restart).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(prime_field_rank_oracle(&Matrix::<i64>::identity(3), &5), Ok(3));
        assert_eq!(prime_field_rank_oracle(&mat(&[&[2, 4], &[1, 2]]), &3), Ok(1));
        assert_eq!(prime_field_rank_oracle(&Matrix::<i64>::zeros(3, 2), &7), Ok(0));
        assert!(matches!(prime_field_rank_oracle(&Matrix::<i64>::identity(2), &6), Err(DynevError::NotPrime(_))));
    }

    #[test]
    fn big_integers_agree_with_machine_integers() {
        let m = mat(&[&[4, 6, 10], &[3, 9, 15], &[7, 1, 0]]);
        let big = Matrix::from_rows(
            (0..3)
                .map(|i| (0..3).map(|j| BigInt::from(*m.get(i, j))).collect())
                .collect(),
        )
        .unwrap();
        let a = dynamic_rank(&m, &2310, RankMode::Continue).unwrap();
        let b = dynamic_rank(&big, &BigInt::from(2310), RankMode::Continue).unwrap();
        let b: Vec<(usize, i64)> = b.0.into_iter().map(|(r, q)| (r, i64::try_from(q).unwrap())).collect();
        assert_eq!(a.0, b);
    }

    #[test]
    fn parse_matrix_file() {
        let m: Matrix<i64> = Matrix::parse("2 3\n1 2 3\n-4 5 6\n").unwrap();
        assert_eq!((m.rows(), m.cols(), *m.get(1, 0)), (2, 3, -4));
        assert!(Matrix::<i64>::parse("2 2\n1 2 3").is_err());
        assert!(Matrix::<i64>::parse("").is_err());
        assert_eq!(Matrix::<i64>::parse(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors(&2310i64), vec![2, 3, 5, 7, 11]);
        assert_eq!(prime_factors(&12i64), vec![2, 3]);
        assert!(is_prime(&97i64) && !is_prime(&91i64));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrices() -> impl Strategy<Value = Matrix<i64>> {
            (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-20i64..20, r * c).prop_map(move |d| Matrix::new(r, c, d).unwrap())
            })
        }

        proptest! {
            #[test]
            fn split_is_sound(m in matrices(), modulus in prop::sample::select(vec![4i64, 6, 12, 15, 30, 105, 2310])) {
                let restart = dynamic_rank(&m, &modulus, RankMode::Restart).unwrap();
                let cont = dynamic_rank(&m, &modulus, RankMode::Continue).unwrap();
                prop_assert_eq!(&restart, &cont);
                prop_assert_eq!(restart.modulus_product(), modulus);
                for (r, mi) in restart.pairs() {
                    prop_assert!(*mi >= 2);
                    for p in prime_factors(mi) {
                        prop_assert_eq!(prime_field_rank_oracle(&m, &p).unwrap(), *r);
                    }
                }
            }

            #[test]
            fn signal_invariants(m in matrices(), modulus in prop::sample::select(vec![6i64, 15, 105])) {
                if let Err(s) = gauss_rank_mod(&m, &modulus, None) {
                    prop_assert!(s.rank_so_far <= s.iteration);
                    prop_assert!(s.iteration <= m.rows().min(m.cols()));
                    prop_assert!(s.inner.gcd > 1 && s.inner.gcd < modulus);
                    prop_assert_eq!(modulus % s.inner.gcd, 0);
                    prop_assert_eq!(s.inner.witness % s.inner.gcd, 0);
                }
            }
        }
    }
}
