use std::time::Instant;

use rayon::prelude::*;

use super::config::{Dims, TrialConfig};
use super::generate::{generate_evaluated, needs_spanning, Outcome, MAX_ATTEMPTS};
use super::report::{Report, TrialStatus, TrialVerdict};
use super::rng::TrialRng;
use super::scenario::TheoremKind;
use crate::error::Result;

/// Runs `config.trials` independent trials of `kind`.
///
/// Trial `i` draws everything from stream `i` of the master seed, so the
/// report does not depend on scheduling. Errors only on an invalid config;
/// failing trials are report content.
pub fn run_theorem_suite(kind: TheoremKind, config: &TrialConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let verdicts: Vec<TrialVerdict> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(kind, config, i))
        .collect();
    Ok(Report::assemble(
        kind,
        config.master_seed,
        config.dims,
        config.tol,
        verdicts,
        start.elapsed(),
    ))
}

fn sample_dims(rng: &mut TrialRng, kind: TheoremKind, config: &TrialConfig) -> Option<Dims> {
    for _ in 0..MAX_ATTEMPTS {
        let dims = config.dims.sample(rng);
        if !needs_spanning(kind) || dims.spans_source() {
            return Some(dims);
        }
    }
    None
}

fn run_trial(kind: TheoremKind, config: &TrialConfig, index: usize) -> TrialVerdict {
    let mut rng = TrialRng::new(config.master_seed, index as u64);
    let mut verdict = TrialVerdict {
        index,
        status: TrialStatus::Skipped,
        dims: None,
        attempts: 0,
        evaluation: None,
        reasons: Vec::new(),
        scenario: None,
    };
    let Some(dims) = sample_dims(&mut rng, kind, config) else {
        verdict
            .reasons
            .push("no dimensions in range admit an invertible frame operator".into());
        return verdict;
    };
    verdict.dims = Some(dims.clone());
    match generate_evaluated(&mut rng, &dims, kind, config.tol) {
        Ok(Outcome::Ready {
            scenario,
            evaluation,
            attempts,
        }) => {
            verdict.attempts = attempts;
            if evaluation.passed() {
                verdict.status = TrialStatus::Pass;
            } else {
                verdict.status = TrialStatus::Fail;
                verdict.reasons = evaluation
                    .failed_checks()
                    .iter()
                    .map(|c| format!("check failed: {c}"))
                    .collect();
                verdict.scenario = Some(scenario);
            }
            verdict.evaluation = Some(evaluation);
        }
        Ok(Outcome::Skipped { reason, attempts }) => {
            verdict.attempts = attempts;
            verdict.reasons.push(reason);
        }
        Err(e) => {
            verdict.status = TrialStatus::Fail;
            verdict.reasons.push(format!("generator error: {e}"));
        }
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::DimRanges;

    #[test]
    fn scalar_single_trial() {
        let cfg = TrialConfig::new(1, 1).with_dims(DimRanges::fixed(1, 1, 1, 1));
        let r = run_theorem_suite(TheoremKind::FrameCheck, &cfg).unwrap();
        assert_eq!((r.passed, r.failed, r.skipped), (1, 0, 0));
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = TrialConfig::new(11, 6).with_dims(DimRanges::fixed(2, 2, 2, 2));
        let a = run_theorem_suite(TheoremKind::DualSum, &cfg).unwrap();
        let b = run_theorem_suite(TheoremKind::DualSum, &cfg).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(
            Report::from_json(&a.to_json()).unwrap().to_json(),
            a.to_json()
        );
    }
}
