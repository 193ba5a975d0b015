//! Streams of models with bounded carriers.
//!
//! When the whole table space fits in the budget every model is produced, in
//! a fixed order. Otherwise `budget` models are drawn from a ChaCha stream
//! with a known seed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{strict_cast_pairs, Model};
use crate::signature::Signature;
use crate::term::Decoration;

pub const DEFAULT_SEED: u64 = 0x00e7_c0de;

/// Draw attempts per sampled model before the stream gives up.
const SAMPLE_ATTEMPTS: usize = 1000;

/// A table to fill: `len` entries each below `radix`.
#[derive(Clone, Copy, Debug)]
struct Slot {
    len: usize,
    radix: usize,
}

fn slots(sig: &Signature, pairs: &[(usize, usize)], sizes: &[usize]) -> Vec<Slot> {
    let exc: usize = sig
        .exceptional()
        .iter()
        .map(|t| sizes[sig.type_index(t).unwrap()])
        .sum();
    let exc_size = |p: usize| sizes[sig.type_index(&sig.exceptional()[p]).unwrap()];
    let mut out: Vec<Slot> = sig
        .ops()
        .iter()
        .map(|op| {
            let nd = sizes[sig.type_index(&op.dom).unwrap()];
            let nc = sizes[sig.type_index(&op.cod).unwrap()];
            match op.decoration {
                Decoration::Pure => Slot { len: nd, radix: nc },
                Decoration::Propagator => Slot { len: nd, radix: nc + exc },
                Decoration::Catcher => Slot {
                    len: nd + exc,
                    radix: nc + exc,
                },
            }
        })
        .collect();
    out.extend(pairs.iter().map(|&(r, t)| Slot {
        len: exc_size(r),
        radix: exc_size(t),
    }));
    out
}

fn feasible(slots: &[Slot]) -> bool {
    slots.iter().all(|s| s.len == 0 || s.radix > 0)
}

fn space(slots: &[Slot]) -> u128 {
    slots.iter().fold(1u128, |acc, s| {
        (0..s.len).fold(acc, |a, _| a.saturating_mul(s.radix as u128))
    })
}

fn next_digits(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix(i) {
            return true;
        }
        digits[i] = 0;
    }
    false
}

fn build(sig: &Signature, pairs: &[(usize, usize)], sizes: &[usize], slots: &[Slot], digits: &[usize]) -> Option<Model> {
    let mut at = 0;
    let mut tables = Vec::with_capacity(slots.len());
    for s in slots {
        tables.push(digits[at..at + s.len].to_vec());
        at += s.len;
    }
    let casts: BTreeMap<_, _> = pairs.iter().copied().zip(tables.split_off(sig.ops().len())).collect();
    // Only cast coherence can fail here.
    Model::new(sig, sizes, tables, casts).ok()
}

struct Exhaustive {
    sizes: Option<Vec<usize>>,
    slots: Vec<Slot>,
    radices: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

enum Mode {
    Exhaustive(Exhaustive),
    Sampled { rng: ChaCha8Rng, remaining: usize },
}

/// Iterator over models; see [`enumerate_models`].
pub struct ModelStream {
    sig: Signature,
    pairs: Vec<(usize, usize)>,
    bound: usize,
    seed: u64,
    mode: Mode,
}

impl ModelStream {
    pub fn is_exhaustive(&self) -> bool {
        matches!(self.mode, Mode::Exhaustive(_))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn next_exhaustive(&mut self) -> Option<Model> {
        let n_types = self.sig.types().len();
        let bound = self.bound;
        let Mode::Exhaustive(st) = &mut self.mode else {
            unreachable!()
        };
        loop {
            if st.done {
                return None;
            }
            let advanced = st.sizes.is_some() && next_digits(&mut st.digits, |i| st.radices[i]);
            if !advanced {
                let sizes = match st.sizes.take() {
                    None => vec![0; n_types],
                    Some(mut s) => {
                        if !next_digits(&mut s, |_| bound + 1) {
                            st.done = true;
                            return None;
                        }
                        s
                    }
                };
                st.slots = slots(&self.sig, &self.pairs, &sizes);
                st.sizes = Some(sizes);
                st.radices.clear();
                st.digits.clear();
                if !feasible(&st.slots) {
                    continue;
                }
                st.radices = st.slots.iter().flat_map(|s| std::iter::repeat(s.radix).take(s.len)).collect();
                st.digits = vec![0; st.radices.len()];
            }
            let sizes = st.sizes.as_ref().unwrap();
            if let Some(m) = build(&self.sig, &self.pairs, sizes, &st.slots, &st.digits) {
                return Some(m);
            }
        }
    }

    fn next_sampled(&mut self) -> Option<Model> {
        let Mode::Sampled { rng, remaining } = &mut self.mode else {
            unreachable!()
        };
        if *remaining == 0 {
            return None;
        }
        for _ in 0..SAMPLE_ATTEMPTS {
            let sizes: Vec<usize> = (0..self.sig.types().len()).map(|_| rng.gen_range(0..=self.bound)).collect();
            let sl = slots(&self.sig, &self.pairs, &sizes);
            if !feasible(&sl) {
                continue;
            }
            let digits: Vec<usize> = sl
                .iter()
                .flat_map(|s| std::iter::repeat(s.radix).take(s.len))
                .map(|r| rng.gen_range(0..r))
                .collect();
            if let Some(m) = build(&self.sig, &self.pairs, &sizes, &sl, &digits) {
                *remaining -= 1;
                return Some(m);
            }
        }
        *remaining = 0;
        None
    }
}

impl Iterator for ModelStream {
    type Item = Model;

    fn next(&mut self) -> Option<Model> {
        match self.mode {
            Mode::Exhaustive(_) => self.next_exhaustive(),
            Mode::Sampled { .. } => self.next_sampled(),
        }
    }
}

/// Total number of table choices over every carrier assignment, or `None`
/// once it exceeds `cap`.
fn total_space(sig: &Signature, pairs: &[(usize, usize)], bound: usize, cap: u128) -> Option<u128> {
    let mut sizes = vec![0; sig.types().len()];
    let mut total = 0u128;
    loop {
        let sl = slots(sig, pairs, &sizes);
        if feasible(&sl) {
            total = total.saturating_add(space(&sl));
            if total > cap {
                return None;
            }
        }
        if !next_digits(&mut sizes, |_| bound + 1) {
            return Some(total);
        }
    }
}

/// Models of `sig` with every carrier of size at most `bound`, using the
/// default seed when sampling.
pub fn enumerate_models(sig: &Signature, bound: usize, budget: usize) -> ModelStream {
    enumerate_models_seeded(sig, bound, budget, DEFAULT_SEED)
}

pub fn enumerate_models_seeded(sig: &Signature, bound: usize, budget: usize, seed: u64) -> ModelStream {
    let pairs = strict_cast_pairs(sig);
    let mode = if budget > 0 && total_space(sig, &pairs, bound, budget as u128).is_some() {
        Mode::Exhaustive(Exhaustive {
            sizes: None,
            slots: Vec::new(),
            radices: Vec::new(),
            digits: Vec::new(),
            done: false,
        })
    } else {
        Mode::Sampled {
            rng: ChaCha8Rng::seed_from_u64(seed),
            remaining: budget,
        }
    };
    ModelStream {
        sig: sig.clone(),
        pairs,
        bound,
        seed,
        mode,
    }
}
