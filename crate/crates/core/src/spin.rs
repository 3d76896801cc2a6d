//! Angular-momentum operators and spin coherent states in the Dicke basis.
//!
//! Index `k ∈ {0, …, 2j}` labels `|j, m⟩` with `m = j − k`, so index 0 is the
//! all-`|0⟩` state of the `2j` qubits.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{c, hermitian_expm, ComplexMatrix, ComplexVector, C64};

/// Spin quantum number `j`, stored as the integer `2j` (the qubit count).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpinBasis {
    two_j: usize,
}

impl SpinBasis {
    pub fn from_two_j(two_j: usize) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidSpin { doubled: 0 });
        }
        Ok(Self { two_j })
    }

    /// Accepts `j` as a float; it must be a positive half-integer.
    pub fn from_j(j: f64) -> Result<Self> {
        let doubled = 2.0 * j;
        let rounded = doubled.round();
        if !j.is_finite() || rounded < 1.0 || (doubled - rounded).abs() > 1e-9 {
            return Err(Error::InvalidSpin {
                doubled: if doubled.is_finite() { rounded as i64 } else { 0 },
            });
        }
        Self::from_two_j(rounded as usize)
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Number of qubits `N = 2j`.
    pub fn qubits(&self) -> usize {
        self.two_j
    }

    pub fn dim(&self) -> usize {
        self.two_j + 1
    }

    /// Magnetic quantum number of basis index `k`.
    pub fn m(&self, k: usize) -> f64 {
        self.j() - k as f64
    }

    /// `⟨k−1| J₊ |k⟩ = √(j(j+1) − m(m+1))`; zero for `k = 0`.
    fn raise_coeff(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let j = self.j();
        let m = self.m(k);
        (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
    }

    fn check(&self, v: &ComplexVector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Applies `(Jx, Jy, Jz)` to a vector without forming matrices.
    pub fn apply_j(&self, v: &ComplexVector) -> Result<[ComplexVector; 3]> {
        self.check(v)?;
        let n = self.dim();
        let mut jp = ComplexVector::zeros(n);
        let mut jm = ComplexVector::zeros(n);
        let mut jz = ComplexVector::zeros(n);
        for k in 0..n {
            jz[k] = v[k] * self.m(k);
            if k > 0 {
                // J₊ moves amplitude from k to k−1, J₋ from k−1 to k.
                let coeff = self.raise_coeff(k);
                jp[k - 1] += v[k] * coeff;
                jm[k] += v[k - 1] * coeff;
            }
        }
        let jx = (&jp + &jm).scale(0.5);
        let jy = (&jp - &jm) * c(0.0, -0.5);
        Ok([jx, jy, jz])
    }
}

/// Hermitian matrices of `Jx`, `Jy`, `Jz` for one basis.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub basis: SpinBasis,
    pub jx: ComplexMatrix,
    pub jy: ComplexMatrix,
    pub jz: ComplexMatrix,
}

impl SpinOperators {
    pub fn new(basis: SpinBasis) -> Self {
        let n = basis.dim();
        let mut jp = ComplexMatrix::zeros(n, n);
        let mut jz = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            jz[(k, k)] = c(basis.m(k), 0.0);
            if k > 0 {
                jp[(k - 1, k)] = c(basis.raise_coeff(k), 0.0);
            }
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm).scale(0.5);
        let jy = (&jp - &jm) * c(0.0, -0.5);
        Self { basis, jx, jy, jz }
    }

    pub fn components(&self) -> [&ComplexMatrix; 3] {
        [&self.jx, &self.jy, &self.jz]
    }
}

pub fn collective_operators(basis: SpinBasis) -> SpinOperators {
    SpinOperators::new(basis)
}

/// A point on the Bloch sphere, `θ ∈ [0, π]`, `φ ∈ [−π, π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochDirection {
    pub theta: f64,
    pub phi: f64,
}

impl BlochDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidConfig("non-finite angle".into()));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidConfig(format!("theta {theta} outside [0, pi]")));
        }
        Ok(Self {
            theta,
            phi: wrap_phi(phi),
        })
    }

    pub fn from_unit_vector(v: [f64; 3]) -> Self {
        let z = v[2].clamp(-1.0, 1.0);
        Self {
            theta: z.acos(),
            phi: wrap_phi(v[1].atan2(v[0])),
        }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Maps any angle into `[−π, π)`.
pub fn wrap_phi(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

/// A normalized state of the `2j`-qubit top in the symmetric subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricState {
    pub basis: SpinBasis,
    pub amplitudes: ComplexVector,
}

impl SymmetricState {
    /// Validates length and normalization (to 1e-10).
    pub fn new(basis: SpinBasis, amplitudes: ComplexVector) -> Result<Self> {
        basis.check(&amplitudes)?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { basis, amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(basis: SpinBasis, amplitudes: ComplexVector) -> Result<Self> {
        basis.check(&amplitudes)?;
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            basis,
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// The Dicke state at basis index `k` (`m = j − k`).
    pub fn dicke(basis: SpinBasis, k: usize) -> Result<Self> {
        if k >= basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: k + 1,
            });
        }
        let mut v = ComplexVector::zeros(basis.dim());
        v[k] = c(1.0, 0.0);
        Ok(Self {
            basis,
            amplitudes: v,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

/// `R(θ, φ) = exp{iθ (Jx sin φ − Jy cos φ)}`.
pub fn rotation_operator(ops: &SpinOperators, dir: BlochDirection) -> Result<ComplexMatrix> {
    let (sp, cp) = dir.phi.sin_cos();
    let generator = ops.jx.scale(sp) - ops.jy.scale(cp);
    hermitian_expm(&generator, c(0.0, dir.theta))
}

/// `|θ, φ⟩ = R(θ, φ) |j, j⟩`.
pub fn coherent_state(ops: &SpinOperators, dir: BlochDirection) -> Result<SymmetricState> {
    let r = rotation_operator(ops, dir)?;
    let amplitudes: ComplexVector = r.column(0).into_owned();
    SymmetricState::normalized(ops.basis, amplitudes)
}

/// Binomial closed form of the coherent state:
/// amplitude `k` is `√C(2j,k) cos(θ/2)^{2j−k} (e^{iφ} sin(θ/2))^k`.
pub fn coherent_state_binomial(basis: SpinBasis, dir: BlochDirection) -> SymmetricState {
    let n = basis.qubits();
    let (s, cth) = (dir.theta / 2.0).sin_cos();
    let phase = C64::from_polar(1.0, dir.phi);
    let mut amps = ComplexVector::zeros(basis.dim());
    let mut log_binom = 0.0_f64;
    for k in 0..=n {
        if k > 0 {
            log_binom += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        let mag = (0.5 * log_binom).exp() * cth.powi((n - k) as i32) * s.powi(k as i32);
        amps[k] = phase.powu(k as u32) * mag;
    }
    let norm = amps.norm();
    SymmetricState {
        basis,
        amplitudes: amps.unscale(norm),
    }
}

/// `⟨J⟩ / j` for a normalized state.
pub fn bloch_expectation(state: &SymmetricState) -> [f64; 3] {
    let j = state.basis.j();
    let [jx, jy, jz] = state
        .basis
        .apply_j(&state.amplitudes)
        .expect("state dimension matches its basis");
    let psi = &state.amplitudes;
    [
        psi.dotc(&jx).re / j,
        psi.dotc(&jy).re / j,
        psi.dotc(&jz).re / j,
    ]
}
