//! Floquet dynamics of the kicked top and its classical limit map.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::numerics::{c, hermitian_expm, ComplexMatrix, C64};
use crate::spin::{wrap_phi, BlochDirection, SpinBasis, SpinOperators, SymmetricState};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TopParameters {
    /// Twist strength κ.
    pub kappa: f64,
    /// Rotation angle about y per kick.
    pub p: f64,
    pub basis: SpinBasis,
}

impl TopParameters {
    pub fn new(basis: SpinBasis, kappa: f64, p: f64) -> Result<Self> {
        if !kappa.is_finite() || !p.is_finite() {
            return Err(Error::InvalidConfig("kappa and p must be finite".into()));
        }
        if kappa < 0.0 {
            return Err(Error::InvalidConfig(format!("kappa {kappa} is negative")));
        }
        Ok(Self { kappa, p, basis })
    }

    /// Standard rotation `p = π/2`.
    pub fn with_kappa(basis: SpinBasis, kappa: f64) -> Result<Self> {
        Self::new(basis, kappa, FRAC_PI_2)
    }
}

/// Diagonal twist phases `exp(−iκ m² / 2j)` in Dicke index order.
pub fn twist_phases(params: &TopParameters) -> Vec<C64> {
    let b = params.basis;
    let j = b.j();
    (0..b.dim())
        .map(|k| {
            let m = b.m(k);
            C64::from_polar(1.0, -params.kappa * m * m / (2.0 * j))
        })
        .collect()
}

/// `U = exp(−iκ Jz² / 2j) · exp(−ip Jy)`: rotation first, then twist.
pub fn build_floquet(params: &TopParameters, ops: &SpinOperators) -> Result<ComplexMatrix> {
    if ops.basis != params.basis {
        return Err(Error::DimensionMismatch {
            expected: params.basis.dim(),
            got: ops.basis.dim(),
        });
    }
    let mut u = hermitian_expm(&ops.jy, c(0.0, -params.p))?;
    for (k, phase) in twist_phases(params).into_iter().enumerate() {
        for col in 0..u.ncols() {
            u[(k, col)] *= phase;
        }
    }
    Ok(u)
}

/// States after kicks `1..=kicks`. Each step is renormalized.
pub fn evolve(
    state: &SymmetricState,
    u: &ComplexMatrix,
    kicks: usize,
) -> Result<Vec<SymmetricState>> {
    let dim = state.dim();
    if u.nrows() != dim || u.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: u.nrows(),
        });
    }
    let mut out = Vec::with_capacity(kicks);
    let mut psi = state.amplitudes.clone();
    for _ in 0..kicks {
        psi = u * &psi;
        let norm = psi.norm();
        psi.unscale_mut(norm);
        out.push(SymmetricState {
            basis: state.basis,
            amplitudes: psi.clone(),
        });
    }
    Ok(out)
}

/// A point on the unit sphere, the classical limit of `⟨J⟩ / j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ClassicalPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        let n = (x * x + y * y + z * z).sqrt();
        Self {
            x: x / n,
            y: y / n,
            z: z / n,
        }
    }

    pub fn from_direction(dir: BlochDirection) -> Self {
        let [x, y, z] = dir.unit_vector();
        Self::new(x, y, z)
    }

    pub fn to_direction(self) -> BlochDirection {
        BlochDirection {
            theta: self.z.clamp(-1.0, 1.0).acos(),
            phi: wrap_phi(self.y.atan2(self.x)),
        }
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Classical kicked-top map. `twist_sign` is +1 for the physical map; −1
/// exists only to inject a convention fault in verification runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalMap {
    pub kappa: f64,
    pub p: f64,
    pub twist_sign: f64,
}

impl ClassicalMap {
    pub fn new(kappa: f64, p: f64) -> Self {
        Self {
            kappa,
            p,
            twist_sign: 1.0,
        }
    }

    pub fn step(&self, pt: ClassicalPoint) -> ClassicalPoint {
        let (sp, cp) = self.p.sin_cos();
        let xr = pt.x * cp + pt.z * sp;
        let yr = pt.y;
        let zr = -pt.x * sp + pt.z * cp;
        let (st, ct) = (self.twist_sign * self.kappa * zr).sin_cos();
        ClassicalPoint::new(xr * ct - yr * st, xr * st + yr * ct, zr)
    }
}

pub fn classical_step(pt: ClassicalPoint, kappa: f64, p: f64) -> ClassicalPoint {
    ClassicalMap::new(kappa, p).step(pt)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionPoint {
    pub seed_id: usize,
    /// 1-based iteration count.
    pub step: usize,
    pub theta: f64,
    pub phi: f64,
}

/// Seeds at cell centers of a uniform grid in `(cos θ, φ)`.
pub fn uniform_sphere_seeds(n_cos: usize, n_phi: usize) -> Vec<BlochDirection> {
    let mut seeds = Vec::with_capacity(n_cos * n_phi);
    for i in 0..n_cos {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n_cos as f64;
        for k in 0..n_phi {
            let phi = -std::f64::consts::PI
                + 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n_phi as f64;
            seeds.push(BlochDirection {
                theta: z.acos(),
                phi,
            });
        }
    }
    seeds
}

pub fn poincare_section(
    kappa: f64,
    p: f64,
    seeds: &[BlochDirection],
    steps: usize,
) -> Result<Vec<SectionPoint>> {
    poincare_section_with(&ClassicalMap::new(kappa, p), seeds, steps)
}

pub fn poincare_section_with(
    map: &ClassicalMap,
    seeds: &[BlochDirection],
    steps: usize,
) -> Result<Vec<SectionPoint>> {
    if steps == 0 {
        return Err(Error::InvalidConfig("steps must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(seeds.len() * steps);
    for (seed_id, &seed) in seeds.iter().enumerate() {
        let mut pt = ClassicalPoint::from_direction(seed);
        for step in 1..=steps {
            pt = map.step(pt);
            let d = pt.to_direction();
            out.push(SectionPoint {
                seed_id,
                step,
                theta: d.theta,
                phi: d.phi,
            });
        }
    }
    Ok(out)
}
