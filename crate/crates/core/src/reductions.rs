//! One- and two-qubit reduced states of the symmetric `2j`-qubit state.
//!
//! The fast path uses only first and second moments of the collective spin.
//! [`oracle`] embeds the state into the full `2^{2j}` tensor space and traces
//! out qubits explicitly; it validates the fast path and drives small-`j` checks.

use crate::error::{Error, Result};
use crate::numerics::{c, hermiticity_defect, psd_project, ComplexMatrix, C64};
use crate::spin::SymmetricState;

/// Pauli matrices `[I, σx, σy, σz]` with `|0⟩` spin-up along z.
pub fn paulis() -> [ComplexMatrix; 4] {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        ComplexMatrix::identity(2, 2),
        ComplexMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        ComplexMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        ComplexMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

fn validate_density(m: &ComplexMatrix, dim: usize) -> Result<ComplexMatrix> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: m.nrows(),
        });
    }
    let defect = hermiticity_defect(m);
    if defect > 1e-10 {
        return Err(Error::NotHermitian { defect });
    }
    let herm = (m + m.adjoint()).scale(0.5);
    psd_project(&herm)
}

/// Single-qubit density matrix, Hermitian, unit trace and PSD.
#[derive(Clone, Debug, PartialEq)]
pub struct OneQubitState(ComplexMatrix);

impl OneQubitState {
    /// Validates and applies PSD clipping.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_density(&m, 2).map(Self)
    }

    /// `(I + r·σ) / 2`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let p = paulis();
        let mut m = p[0].clone();
        for k in 0..3 {
            m += p[k + 1].scale(r[k]);
        }
        Self::new(m.scale(0.5))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        let p = paulis();
        [1, 2, 3].map(|k| (&p[k] * &self.0).trace().re)
    }
}

/// Two-qubit density matrix in the basis `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState(ComplexMatrix);

impl TwoQubitState {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_density(&m, 4).map(Self)
    }

    pub fn from_pure(psi: &[C64; 4]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let v = v.unscale(v.norm());
        Self::new(&v * v.adjoint())
    }

    pub fn product(a: &OneQubitState, b: &OneQubitState) -> Self {
        Self(a.0.kronecker(&b.0))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    /// Exchanges the two qubits.
    pub fn swapped(&self) -> Self {
        let perm = [0usize, 2, 1, 3];
        let m = ComplexMatrix::from_fn(4, 4, |r, col| self.0[(perm[r], perm[col])]);
        Self(m)
    }

    /// Reduced state of qubit `which` (0 = first, 1 = second).
    pub fn marginal(&self, which: usize) -> OneQubitState {
        let mut m = ComplexMatrix::zeros(2, 2);
        for a in 0..2 {
            for b in 0..2 {
                for t in 0..2 {
                    m[(a, b)] += if which == 0 {
                        self.0[(2 * a + t, 2 * b + t)]
                    } else {
                        self.0[(2 * t + a, 2 * t + b)]
                    };
                }
            }
        }
        OneQubitState(m)
    }

    /// Applies `U_A ⊗ U_B`.
    pub fn local_unitary(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Self {
        let u = ua.kronecker(ub);
        Self(&u * &self.0 * u.adjoint())
    }
}

/// First moments `⟨Jα⟩` and anticommutators `⟨JαJβ + JβJα⟩`.
#[derive(Clone, Copy, Debug)]
pub struct SpinMoments {
    pub first: [f64; 3],
    pub second: [[f64; 3]; 3],
}

pub fn spin_moments(state: &SymmetricState) -> SpinMoments {
    let psi = &state.amplitudes;
    let applied = state
        .basis
        .apply_j(psi)
        .expect("state dimension matches its basis");
    let first = [0, 1, 2].map(|a| psi.dotc(&applied[a]).re);
    let mut second = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in a..3 {
            // ⟨ψ|JαJβ|ψ⟩ = ⟨Jαψ|Jβψ⟩ for Hermitian Jα.
            let v = 2.0 * applied[a].dotc(&applied[b]).re;
            second[a][b] = v;
            second[b][a] = v;
        }
    }
    SpinMoments { first, second }
}

pub fn single_qubit_rdm(state: &SymmetricState) -> Result<OneQubitState> {
    let n = state.basis.qubits() as f64;
    let m = spin_moments(state);
    OneQubitState::from_bloch(m.first.map(|v| 2.0 * v / n))
}

/// Pauli correlation coefficients `c_{αβ}` of any qubit pair, with
/// `ρ₁₂ = ¼ Σ c_{αβ} σ_α ⊗ σ_β`.
pub fn pair_coefficients(state: &SymmetricState) -> Result<[[f64; 4]; 4]> {
    let qubits = state.basis.qubits();
    if qubits < 2 {
        return Err(Error::TooFewQubits(qubits));
    }
    let n = qubits as f64;
    let m = spin_moments(state);
    let mut coeff = [[0.0; 4]; 4];
    coeff[0][0] = 1.0;
    for a in 0..3 {
        coeff[a + 1][0] = 2.0 * m.first[a] / n;
        coeff[0][a + 1] = 2.0 * m.first[a] / n;
        for b in 0..3 {
            let delta = if a == b { n / 2.0 } else { 0.0 };
            coeff[a + 1][b + 1] = (m.second[a][b] - delta) * 2.0 / (n * (n - 1.0));
        }
    }
    Ok(coeff)
}

pub fn two_qubit_rdm(state: &SymmetricState) -> Result<TwoQubitState> {
    let coeff = pair_coefficients(state)?;
    let p = paulis();
    let mut m = ComplexMatrix::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            if coeff[a][b] != 0.0 {
                m += p[a].kronecker(&p[b]).scale(coeff[a][b] / 4.0);
            }
        }
    }
    TwoQubitState::new(m)
}

pub mod oracle {
    //! Brute-force tensor-product reference implementation.

    use super::*;
    use crate::kicked_top::TopParameters;
    use crate::numerics::{hermitian_expm, ComplexVector};

    /// Largest qubit count the oracle will embed.
    pub const MAX_QUBITS: usize = 14;

    /// A state of the full tensor-product space. Qubit 1 is the most
    /// significant bit of the basis index; bit value 1 is `|1⟩`.
    #[derive(Clone, Debug)]
    pub enum FullState {
        Pure(ComplexVector),
        Mixed(ComplexMatrix),
    }

    impl FullState {
        fn dim(&self) -> usize {
            match self {
                FullState::Pure(v) => v.len(),
                FullState::Mixed(m) => m.nrows(),
            }
        }
    }

    fn binomial(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    pub fn symmetric_embed(state: &SymmetricState) -> Result<ComplexVector> {
        let n = state.basis.qubits();
        if n > MAX_QUBITS {
            return Err(Error::OracleTooLarge {
                qubits: n,
                max: MAX_QUBITS,
            });
        }
        let weights: Vec<C64> = (0..=n)
            .map(|k| state.amplitudes[k] / binomial(n, k).sqrt())
            .collect();
        let full = ComplexVector::from_iterator(
            1 << n,
            (0..1usize << n).map(|idx| weights[idx.count_ones() as usize]),
        );
        let norm = full.norm();
        Ok(full.unscale(norm))
    }

    fn qubit_count(dim: usize) -> Result<usize> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::BadQubitSelection(format!(
                "dimension {dim} is not a power of two"
            )));
        }
        Ok(dim.trailing_zeros() as usize)
    }

    /// Traces out all qubits except `keep` (1-based, in the order given).
    pub fn partial_trace(full: &FullState, keep: &[usize]) -> Result<ComplexMatrix> {
        let n = qubit_count(full.dim())?;
        if keep.is_empty() || keep.len() > 2 {
            return Err(Error::BadQubitSelection(format!(
                "keep set must have 1 or 2 qubits, got {}",
                keep.len()
            )));
        }
        if keep.iter().any(|&q| q == 0 || q > n) || (keep.len() == 2 && keep[0] == keep[1]) {
            return Err(Error::BadQubitSelection(format!(
                "{keep:?} is not a set of qubits in 1..={n}"
            )));
        }
        let shifts: Vec<usize> = keep.iter().map(|&q| n - q).collect();
        let rest: Vec<usize> = (1..=n)
            .filter(|q| !keep.contains(q))
            .map(|q| n - q)
            .collect();
        let assemble = |sub: usize, env: usize| -> usize {
            let mut idx = 0usize;
            for (pos, &s) in shifts.iter().enumerate() {
                let bit = (sub >> (shifts.len() - 1 - pos)) & 1;
                idx |= bit << s;
            }
            for (pos, &s) in rest.iter().enumerate() {
                let bit = (env >> (rest.len() - 1 - pos)) & 1;
                idx |= bit << s;
            }
            idx
        };
        let d = 1usize << keep.len();
        let env_dim = 1usize << rest.len();
        let mut out = ComplexMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let mut acc = c(0.0, 0.0);
                for e in 0..env_dim {
                    let ia = assemble(a, e);
                    let ib = assemble(b, e);
                    acc += match full {
                        FullState::Pure(v) => v[ia] * v[ib].conj(),
                        FullState::Mixed(m) => m[(ia, ib)],
                    };
                }
                out[(a, b)] = acc;
            }
        }
        Ok(out)
    }

    /// `Σ_k σ^α_k / 2` on the full `2^n` space.
    pub fn full_collective_operators(n: usize) -> Result<[ComplexMatrix; 3]> {
        if n > MAX_QUBITS {
            return Err(Error::OracleTooLarge {
                qubits: n,
                max: MAX_QUBITS,
            });
        }
        let p = paulis();
        let dim = 1usize << n;
        let mut out = [
            ComplexMatrix::zeros(dim, dim),
            ComplexMatrix::zeros(dim, dim),
            ComplexMatrix::zeros(dim, dim),
        ];
        for (a, total) in out.iter_mut().enumerate() {
            for site in 0..n {
                let mut term = ComplexMatrix::identity(1, 1);
                for q in 0..n {
                    term = if q == site {
                        term.kronecker(&p[a + 1])
                    } else {
                        term.kronecker(&p[0])
                    };
                }
                *total += term.scale(0.5);
            }
        }
        Ok(out)
    }

    /// Floquet operator built on the full tensor-product space.
    pub fn full_floquet(params: &TopParameters) -> Result<ComplexMatrix> {
        let n = params.basis.qubits();
        let [_, jy, jz] = full_collective_operators(n)?;
        let twist = hermitian_expm(&(&jz * &jz), c(0.0, -params.kappa / (2.0 * params.basis.j())))?;
        let rot = hermitian_expm(&jy, c(0.0, -params.p))?;
        Ok(twist * rot)
    }

    pub fn single_qubit_rdm(full: &ComplexVector) -> Result<OneQubitState> {
        OneQubitState::new(partial_trace(&FullState::Pure(full.clone()), &[1])?)
    }

    pub fn two_qubit_rdm(full: &ComplexVector) -> Result<TwoQubitState> {
        TwoQubitState::new(partial_trace(&FullState::Pure(full.clone()), &[1, 2])?)
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::{self, full_collective_operators, partial_trace, symmetric_embed, FullState};
    use super::*;
    use crate::numerics::{max_abs, ComplexVector};
    use crate::spin::{
        coherent_state, coherent_state_binomial, collective_operators, BlochDirection, SpinBasis,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(two_j: usize, rng: &mut ChaCha8Rng) -> SymmetricState {
        let b = SpinBasis::from_two_j(two_j).unwrap();
        let v = ComplexVector::from_fn(b.dim(), |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        SymmetricState::normalized(b, v).unwrap()
    }

    #[test]
    fn embed_small_cases() {
        let b = SpinBasis::from_two_j(3).unwrap();
        let up = SymmetricState::dicke(b, 0).unwrap();
        let full = symmetric_embed(&up).unwrap();
        assert_eq!(full[0], c(1.0, 0.0));
        assert!(full.iter().skip(1).all(|z| z.norm() == 0.0));

        let half = SpinBasis::from_two_j(1).unwrap();
        let s = SymmetricState::normalized(half, ComplexVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]))
            .unwrap();
        assert!((symmetric_embed(&s).unwrap() - &s.amplitudes).norm() < 1e-15);

        let one = SpinBasis::from_two_j(2).unwrap();
        let (a, bb, cc) = (c(0.5, 0.0), c(0.5, 0.5), c(0.0, -0.5));
        let s = SymmetricState::new(one, ComplexVector::from_vec(vec![a, bb, cc])).unwrap();
        let f = symmetric_embed(&s).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [a, bb * r, bb * r, cc];
        for k in 0..4 {
            assert!((f[k] - expect[k]).norm() < 1e-15);
        }

        let big = SpinBasis::from_two_j(15).unwrap();
        assert!(symmetric_embed(&SymmetricState::dicke(big, 0).unwrap()).is_err());
    }

    #[test]
    fn partial_trace_fixtures() {
        let mut v = ComplexVector::zeros(8);
        v[0] = c(1.0, 0.0);
        let r = partial_trace(&FullState::Pure(v), &[1]).unwrap();
        assert!((r[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(r[(1, 1)].norm() < 1e-15);

        // Bell pair on qubits 1,2 with qubit 3 in |0⟩.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = ComplexVector::zeros(8);
        v[0b000] = c(s, 0.0);
        v[0b110] = c(s, 0.0);
        let r = partial_trace(&FullState::Pure(v.clone()), &[1, 2]).unwrap();
        let mut bell = ComplexMatrix::zeros(4, 4);
        for &(a, b) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(a, b)] = c(0.5, 0.0);
        }
        assert!(max_abs(&(r - &bell)) < 1e-15);

        let rho = &v * v.adjoint();
        let r = partial_trace(&FullState::Mixed(rho), &[1, 2]).unwrap();
        assert!(max_abs(&(r - bell)) < 1e-15);

        let full = FullState::Pure(ComplexVector::zeros(8));
        assert!(partial_trace(&full, &[]).is_err());
        assert!(partial_trace(&full, &[1, 2, 3]).is_err());
        assert!(partial_trace(&full, &[0]).is_err());
        assert!(partial_trace(&full, &[4]).is_err());
        assert!(partial_trace(&full, &[2, 2]).is_err());
        assert!(partial_trace(&FullState::Pure(ComplexVector::zeros(6)), &[1]).is_err());
    }

    #[test]
    fn partial_trace_is_permutation_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_state(3, &mut rng);
        let full = FullState::Pure(symmetric_embed(&s).unwrap());
        let a = partial_trace(&full, &[1, 2]).unwrap();
        let b = partial_trace(&full, &[2, 3]).unwrap();
        let d = partial_trace(&full, &[1, 3]).unwrap();
        assert!(max_abs(&(&a - &b)) < 1e-12);
        assert!(max_abs(&(&a - &d)) < 1e-12);
        let one = partial_trace(&full, &[1]).unwrap();
        let three = partial_trace(&full, &[3]).unwrap();
        assert!(max_abs(&(one - three)) < 1e-12);
    }

    #[test]
    fn moments_match_oracle_for_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for two_j in 2..=10 {
            for _ in 0..50 {
                let s = random_state(two_j, &mut rng);
                let full = symmetric_embed(&s).unwrap();
                let r1 = single_qubit_rdm(&s).unwrap();
                let o1 = oracle::single_qubit_rdm(&full).unwrap();
                assert!(max_abs(&(r1.matrix() - o1.matrix())) < 1e-10);
                let r2 = two_qubit_rdm(&s).unwrap();
                let o2 = oracle::two_qubit_rdm(&full).unwrap();
                assert!(max_abs(&(r2.matrix() - o2.matrix())) < 1e-10, "2j={two_j}");
            }
        }
    }

    #[test]
    fn coherent_state_rdms() {
        let b = SpinBasis::from_two_j(7).unwrap();
        let ops = collective_operators(b);
        let dir = BlochDirection::new(1.2, -0.8).unwrap();
        let s = coherent_state(&ops, dir).unwrap();
        let r1 = single_qubit_rdm(&s).unwrap();
        let bv = r1.bloch_vector();
        let n = dir.unit_vector();
        for k in 0..3 {
            assert!((bv[k] - n[k]).abs() < 1e-10);
        }
        let r2 = two_qubit_rdm(&s).unwrap();
        let prod = TwoQubitState::product(&r1, &r1);
        assert!(max_abs(&(r2.matrix() - prod.matrix())) < 1e-10);
        assert!(max_abs(&(r2.matrix() - r2.swapped().matrix())) < 1e-10);
        for which in 0..2 {
            assert!(max_abs(&(r2.marginal(which).matrix() - r1.matrix())) < 1e-10);
        }
    }

    #[test]
    fn ghz_qubit_is_maximally_mixed() {
        let b = SpinBasis::from_two_j(5).unwrap();
        let mut v = ComplexVector::zeros(6);
        v[0] = c(1.0, 0.0);
        v[5] = c(1.0, 0.0);
        let s = SymmetricState::normalized(b, v).unwrap();
        let r = single_qubit_rdm(&s).unwrap();
        assert!(max_abs(&(r.matrix() - ComplexMatrix::identity(2, 2).scale(0.5))) < 1e-15);
    }

    #[test]
    fn two_qubit_rdm_needs_two_qubits() {
        let b = SpinBasis::from_two_j(1).unwrap();
        let s = coherent_state_binomial(b, BlochDirection::new(0.5, 0.5).unwrap());
        assert_eq!(two_qubit_rdm(&s), Err(Error::TooFewQubits(1)));
    }

    #[test]
    fn full_operators_act_on_embedded_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = random_state(4, &mut rng);
        let ops = collective_operators(s.basis);
        let full_ops = full_collective_operators(4).unwrap();
        let full = symmetric_embed(&s).unwrap();
        for a in 0..3 {
            let small = ops.components()[a] * &s.amplitudes;
            let embedded = symmetric_embed(&SymmetricState {
                basis: s.basis,
                amplitudes: small.clone(),
            })
            .unwrap()
            .scale(small.norm());
            assert!((&full_ops[a] * &full - embedded).norm() < 1e-12);
        }
    }
}
