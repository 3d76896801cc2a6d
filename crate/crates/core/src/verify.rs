//! On-demand self-checks: oracle equivalence, measure reference values,
//! unitarity and classical–quantum correspondence.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correlations::{bell_m, concurrence, quantum_discord, three_tangle};
use crate::error::Result;
use crate::kicked_top::{build_floquet, evolve, ClassicalMap, ClassicalPoint, TopParameters};
use crate::numerics::{c, max_abs, unitarity_defect, ComplexMatrix, ComplexVector};
use crate::reductions::{oracle, single_qubit_rdm, two_qubit_rdm, TwoQubitState};
use crate::spin::{
    bloch_expectation, coherent_state, collective_operators, BlochDirection, SpinBasis,
    SymmetricState,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Fast,
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub suite: Suite,
    /// Flip the classical twist sign; the correspondence check must then fail.
    pub inject_twist_flip: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed deviation (or the observed value for bounds).
    pub observed: f64,
    pub threshold: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

const SEED: u64 = 0x6b69_636b;

fn check<F: FnOnce() -> Result<f64>>(name: &'static str, threshold: f64, f: F) -> CheckResult {
    let start = Instant::now();
    let observed = f().unwrap_or(f64::INFINITY);
    CheckResult {
        name,
        passed: observed < threshold,
        observed,
        threshold,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn random_direction(rng: &mut ChaCha8Rng) -> BlochDirection {
    BlochDirection {
        theta: rng.gen_range(-1.0f64..1.0).acos(),
        phi: rng.gen_range(-PI..PI),
    }
}

pub fn random_symmetric_state(basis: SpinBasis, rng: &mut ChaCha8Rng) -> SymmetricState {
    let v = ComplexVector::from_fn(basis.dim(), |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    SymmetricState::normalized(basis, v).expect("random vector is nonzero")
}

/// `max ‖⟨J⟩/j − n̂(θ, φ)‖` over random coherent states.
pub fn coherent_contract_error(two_j: usize, samples: usize, seed: u64) -> Result<f64> {
    let ops = collective_operators(SpinBasis::from_two_j(two_j)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let dir = random_direction(&mut rng);
        let b = bloch_expectation(&coherent_state(&ops, dir)?);
        let n = dir.unit_vector();
        let err = ((b[0] - n[0]).powi(2) + (b[1] - n[1]).powi(2) + (b[2] - n[2]).powi(2)).sqrt();
        worst = worst.max(err);
    }
    Ok(worst)
}

pub fn floquet_unitarity_error(two_j: usize, kappa: f64) -> Result<f64> {
    let basis = SpinBasis::from_two_j(two_j)?;
    let params = TopParameters::with_kappa(basis, kappa)?;
    Ok(unitarity_defect(&build_floquet(&params, &collective_operators(basis))?))
}

/// Worst RDM mismatch between symmetric-subspace evolution and full
/// tensor-product evolution with explicit partial traces.
pub fn dynamics_oracle_error(two_j: usize, kappa: f64, start: BlochDirection, kicks: usize) -> Result<f64> {
    let basis = SpinBasis::from_two_j(two_j)?;
    let params = TopParameters::with_kappa(basis, kappa)?;
    let ops = collective_operators(basis);
    let u = build_floquet(&params, &ops)?;
    let psi0 = coherent_state(&ops, start)?;
    let u_full = oracle::full_floquet(&params)?;
    let mut full = oracle::symmetric_embed(&psi0)?;
    let mut worst = 0.0_f64;
    for psi in evolve(&psi0, &u, kicks)? {
        full = &u_full * full;
        let r1 = single_qubit_rdm(&psi)?;
        let o1 = oracle::single_qubit_rdm(&full)?;
        let r2 = two_qubit_rdm(&psi)?;
        let o2 = oracle::two_qubit_rdm(&full)?;
        worst = worst
            .max(max_abs(&(r1.matrix() - o1.matrix())))
            .max(max_abs(&(r2.matrix() - o2.matrix())));
    }
    Ok(worst)
}

/// Worst two-qubit RDM mismatch against the embedding oracle on random states.
pub fn pair_rdm_oracle_error(two_j: usize, samples: usize, seed: u64) -> Result<f64> {
    let basis = SpinBasis::from_two_j(two_j)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let s = random_symmetric_state(basis, &mut rng);
        let full = oracle::symmetric_embed(&s)?;
        let r2 = two_qubit_rdm(&s)?;
        let o2 = oracle::two_qubit_rdm(&full)?;
        worst = worst.max(max_abs(&(r2.matrix() - o2.matrix())));
    }
    Ok(worst)
}

/// Worst deviation of the closed-form measures from their reference values.
pub fn measure_sanity_error() -> Result<f64> {
    let s = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let bell = TwoQubitState::from_pure(&[c(s, 0.0), z, z, c(s, 0.0)])?;
    let mixed = TwoQubitState::new(ComplexMatrix::identity(4, 4).scale(0.25))?;
    let product = TwoQubitState::from_pure(&[c(0.6, 0.0), c(0.0, 0.8), z, z])?;
    let b3 = SpinBasis::from_two_j(3)?;
    let mut ghz = ComplexVector::zeros(4);
    ghz[0] = c(1.0, 0.0);
    ghz[3] = c(1.0, 0.0);
    let ghz = SymmetricState::normalized(b3, ghz)?;
    let w = SymmetricState::dicke(b3, 1)?;
    let errors = [
        concurrence(&bell)? - 1.0,
        bell_m(&bell) - 2.0,
        bell_m(&mixed),
        bell_m(&product) - 1.0,
        three_tangle(&ghz)? - 1.0,
        three_tangle(&w)?,
        concurrence(&two_qubit_rdm(&w)?)? - 2.0 / 3.0,
    ];
    Ok(errors.iter().fold(0.0_f64, |m, e| m.max(e.abs())))
}

/// Discord of a Bell state, which is exactly one bit.
pub fn discord_sanity_error() -> Result<f64> {
    let s = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let bell = TwoQubitState::from_pure(&[c(s, 0.0), z, z, c(s, 0.0)])?;
    Ok((quantum_discord(&bell)?.value - 1.0).abs())
}

/// Distance between one-kick quantum `⟨J⟩/j` and the classical map.
pub fn correspondence_error(two_j: usize, kappa: f64, start: BlochDirection, map: &ClassicalMap) -> Result<f64> {
    let basis = SpinBasis::from_two_j(two_j)?;
    let params = TopParameters::new(basis, kappa, map.p)?;
    let ops = collective_operators(basis);
    let u = build_floquet(&params, &ops)?;
    let psi = coherent_state(&ops, start)?;
    let q = bloch_expectation(&evolve(&psi, &u, 1)?[0]);
    let cl = map.step(ClassicalPoint::from_direction(start)).as_array();
    Ok(((q[0] - cl[0]).powi(2) + (q[1] - cl[1]).powi(2) + (q[2] - cl[2]).powi(2)).sqrt())
}

/// A start in the regular region of the κ = 0.5 map.
pub fn regular_start() -> BlochDirection {
    BlochDirection {
        theta: 0.5,
        phi: 0.3,
    }
}

pub fn run_suite(opts: &VerifyOptions) -> VerifyReport {
    let mut checks = vec![
        check("coherent_state_contract", 1e-10, || {
            Ok(coherent_contract_error(3, 50, SEED)?.max(coherent_contract_error(40, 50, SEED)?))
        }),
        check("floquet_unitarity", 1e-10, || {
            let mut worst = 0.0_f64;
            for two_j in [3, 40] {
                for kappa in [0.5, 2.5] {
                    worst = worst.max(floquet_unitarity_error(two_j, kappa)?);
                }
            }
            Ok(worst)
        }),
        check("oracle_equivalence_dynamics", 1e-10, || {
            dynamics_oracle_error(3, 2.5, BlochDirection { theta: 0.0, phi: 0.0 }, 20)
        }),
        check("pair_rdm_oracle_small", 1e-10, || {
            let mut worst = 0.0_f64;
            for two_j in 2..=6 {
                worst = worst.max(pair_rdm_oracle_error(two_j, 10, SEED)?);
            }
            Ok(worst)
        }),
        check("measure_sanity", 1e-9, measure_sanity_error),
        check("discord_sanity", 1e-6, discord_sanity_error),
        check("classical_correspondence", 0.05, || {
            let mut map = ClassicalMap::new(0.5, FRAC_PI_2);
            if opts.inject_twist_flip {
                map.twist_sign = -1.0;
            }
            correspondence_error(400, 0.5, regular_start(), &map)
        }),
    ];
    if opts.suite == Suite::Full {
        checks.push(check("pair_rdm_oracle_j5", 1e-10, || {
            pair_rdm_oracle_error(10, 50, SEED)
        }));
    }
    let passed = checks.iter().all(|c| c.passed);
    VerifyReport {
        suite: opts.suite,
        passed,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        let report = run_suite(&VerifyOptions {
            suite: Suite::Fast,
            inject_twist_flip: false,
        });
        for c in &report.checks {
            assert!(c.passed, "{} observed {:e}", c.name, c.observed);
        }
        assert!(report.passed);
    }

    #[test]
    fn twist_flip_is_caught() {
        let report = run_suite(&VerifyOptions {
            suite: Suite::Fast,
            inject_twist_flip: true,
        });
        assert!(!report.passed);
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        assert_eq!(failed, vec!["classical_correspondence"]);
    }
}
