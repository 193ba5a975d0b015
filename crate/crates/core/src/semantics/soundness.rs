//! Rule-by-rule soundness testing against enumerated models.
//!
//! For each trial a binding of the schema's metavariables is drawn; in every
//! model where all premises hold, the conclusion must hold too.

use std::fmt;

use rayon::prelude::*;

use super::generate::{random_bindings, TermGen};
use super::{enumerate_models_seeded, equation_witness, holds, EffValue, Model, DEFAULT_SEED};
use crate::kernel::schema::{DecoPat, JudgmentPat, PremisePat, Schema};
use crate::kernel::{Bindings, Judgment, RuleName};
use crate::signature::Signature;
use crate::term::Decoration;

#[derive(Clone, Debug)]
pub struct SoundnessConfig {
    pub trials: usize,
    pub size_bound: usize,
    /// Model budget handed to the enumerator.
    pub model_budget: usize,
    pub seed: u64,
    /// Binding draws per trial before the trial is counted as void.
    pub attempts: usize,
}

impl Default for SoundnessConfig {
    fn default() -> Self {
        SoundnessConfig {
            trials: 200,
            size_bound: 3,
            model_budget: 200_000,
            seed: DEFAULT_SEED,
            attempts: 64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub rule: String,
    pub trial: usize,
    /// Seed of the term generator for this trial.
    pub trial_seed: u64,
    pub bindings: Bindings,
    pub premises: Vec<Judgment>,
    pub conclusion: Judgment,
    pub model: Model,
    /// Input on which an equational conclusion fails.
    pub witness: Option<EffValue>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "counterexample to {} (trial {}, seed {:#x})", self.rule, self.trial, self.trial_seed)?;
        for p in &self.premises {
            writeln!(f, "  premise     {p}")?;
        }
        writeln!(f, "  conclusion  {}", self.conclusion)?;
        if let Some(w) = self.witness {
            writeln!(f, "  differs at  {w}")?;
        }
        write!(f, "{}", self.model.to_dsl("M"))
    }
}

#[derive(Clone, Debug)]
pub struct SoundnessReport {
    pub rule: String,
    pub trials: usize,
    /// Trials that produced a well-formed instance.
    pub valid_bindings: usize,
    pub models: usize,
    pub exhaustive: bool,
    pub seed: u64,
    /// (binding, model) pairs in which every premise held.
    pub premise_hits: usize,
    pub counterexample: Option<Counterexample>,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for SoundnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} valid bindings of {} trials, {} models{}, {} premise hits: ",
            self.rule,
            self.valid_bindings,
            self.trials,
            self.models,
            if self.exhaustive { " (all)" } else { " (sampled)" },
            self.premise_hits
        )?;
        match &self.counterexample {
            None => write!(f, "pass"),
            Some(c) => write!(f, "FAIL\n{c}"),
        }
    }
}

struct TrialOutcome {
    valid: bool,
    hits: usize,
    counterexample: Option<Counterexample>,
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64).wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// The instance a binding yields, if it is well formed.
fn instance(sig: &Signature, schema: &Schema, b: &Bindings) -> Option<(Vec<Judgment>, Judgment)> {
    let conclusion = schema.conclusion.instantiate(b).ok()?;
    schema.check_side(sig, b).ok()?;
    conclusion.check_well_formed(sig).ok()?;
    let premises = schema.instantiate_premises(sig, b).ok()?;
    if premises.iter().any(|p| p.check_well_formed(sig).is_err()) {
        return None;
    }
    Some((premises, conclusion))
}

fn run_trial(sig: &Signature, name: &str, schema: &Schema, models: &[Model], cfg: &SoundnessConfig, trial: usize) -> TrialOutcome {
    let seed = trial_seed(cfg.seed, trial);
    let mut g = TermGen::new(sig, seed);
    let found = (0..cfg.attempts).find_map(|_| {
        let b = random_bindings(&mut g, schema)?;
        instance(sig, schema, &b).map(|i| (b, i))
    });
    let Some((bindings, (premises, conclusion))) = found else {
        return TrialOutcome {
            valid: false,
            hits: 0,
            counterexample: None,
        };
    };
    let mut hits = 0;
    for m in models {
        if !premises.iter().all(|p| holds(sig, m, p).unwrap_or(false)) {
            continue;
        }
        hits += 1;
        if holds(sig, m, &conclusion).unwrap_or(false) {
            continue;
        }
        let witness = match &conclusion {
            Judgment::Eq(e) => equation_witness(sig, m, e).ok().flatten(),
            _ => None,
        };
        return TrialOutcome {
            valid: true,
            hits,
            counterexample: Some(Counterexample {
                rule: name.to_string(),
                trial,
                trial_seed: seed,
                bindings,
                premises,
                conclusion,
                model: m.clone(),
                witness,
            }),
        };
    }
    TrialOutcome {
        valid: true,
        hits,
        counterexample: None,
    }
}

/// Tests an arbitrary schema; used for rules and for deliberately broken
/// variants of them.
pub fn soundness_check_schema(sig: &Signature, name: &str, schema: &Schema, cfg: &SoundnessConfig) -> SoundnessReport {
    let stream = enumerate_models_seeded(sig, cfg.size_bound, cfg.model_budget, cfg.seed);
    let exhaustive = stream.is_exhaustive();
    let models: Vec<Model> = stream.collect();
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(sig, name, schema, &models, cfg, i))
        .collect();
    SoundnessReport {
        rule: name.to_string(),
        trials: cfg.trials,
        valid_bindings: outcomes.iter().filter(|o| o.valid).count(),
        models: models.len(),
        exhaustive,
        seed: cfg.seed,
        premise_hits: outcomes.iter().map(|o| o.hits).sum(),
        counterexample: outcomes.into_iter().find_map(|o| o.counterexample),
    }
}

pub fn soundness_check_with(sig: &Signature, rule: RuleName, cfg: &SoundnessConfig) -> SoundnessReport {
    soundness_check_schema(sig, rule.name(), &rule.schema(), cfg)
}

pub fn soundness_check(sig: &Signature, rule: RuleName, trials: usize, size_bound: usize) -> SoundnessReport {
    let cfg = SoundnessConfig {
        trials,
        size_bound,
        ..SoundnessConfig::default()
    };
    soundness_check_with(sig, rule, &cfg)
}

/// Weak substitution with its purity premise relaxed to "catcher", which
/// every term satisfies. The oracle must refute it.
pub fn corrupted_weak_substitution() -> Schema {
    let mut s = RuleName::WeakSubst.schema();
    for p in &mut s.premises {
        if let PremisePat::One(JudgmentPat::Deco(_, d)) = p {
            *d = DecoPat::Is(Decoration::Catcher);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::SignatureDecl;

    fn sig() -> Signature {
        SignatureDecl::new()
            .exception("T")
            .exception("R")
            .op("f", "T", "R")
            .validate()
            .unwrap()
    }

    fn small() -> SoundnessConfig {
        SoundnessConfig {
            trials: 40,
            size_bound: 2,
            ..SoundnessConfig::default()
        }
    }

    #[test]
    fn untag_tag_axiom_passes() {
        let r = soundness_check_with(&sig(), RuleName::UntagTag, &small());
        assert!(r.passed(), "{r}");
        assert_eq!(r.valid_bindings, 40);
        assert!(r.premise_hits > 0);
    }

    #[test]
    fn ppg_weak_to_strong_passes_exhaustively() {
        let r = soundness_check_with(&sig(), RuleName::PpgWeakToStrong, &small());
        assert!(r.exhaustive);
        assert!(r.passed(), "{r}");
        assert!(r.premise_hits > 0);
    }

    #[test]
    fn corrupted_rule_is_refuted() {
        let cfg = SoundnessConfig {
            trials: 200,
            size_bound: 2,
            ..SoundnessConfig::default()
        };
        let r = soundness_check_schema(&sig(), "wsubst/ctc", &corrupted_weak_substitution(), &cfg);
        let c = r.counterexample.expect("the oracle must refute the relaxed rule");
        assert!(c.witness.is_some());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = soundness_check_with(&sig(), RuleName::CopairUnique, &small());
        let b = soundness_check_with(&sig(), RuleName::CopairUnique, &small());
        assert_eq!(a.premise_hits, b.premise_hits);
        assert_eq!(a.valid_bindings, b.valid_bindings);
    }
}
