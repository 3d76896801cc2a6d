//! Correlation measures on the reduced states of the top: linear and von
//! Neumann entropy, Wootters concurrence, quantum discord, the 3-tangle, the
//! Horodecki Bell correlation function and a fixed-setting CHSH value.
//!
//! Entropies are in bits.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, shannon_bits, ComplexMatrix, PSD_CLIP};
use crate::reductions::{paulis, single_qubit_rdm, two_qubit_rdm, OneQubitState, TwoQubitState};
use crate::spin::SymmetricState;

pub fn linear_entropy(rho: &OneQubitState) -> f64 {
    let m = rho.matrix();
    1.0 - (m * m).trace().re
}

/// `−Tr ρ log₂ ρ` of any density matrix.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(rho)?;
    Ok(shannon_bits(eig.eigenvalues.into_iter().map(|l| l.max(0.0))))
}

/// Binary entropy of a qubit state with Bloch radius `r`.
fn qubit_entropy_from_radius(r: f64) -> f64 {
    let r = r.clamp(0.0, 1.0);
    shannon_bits([(1.0 + r) / 2.0, (1.0 - r) / 2.0])
}

/// Pauli coefficients `c_{αβ} = Tr(σ_α ⊗ σ_β ρ)`, `α, β ∈ {0, x, y, z}`.
pub fn pauli_coefficients(rho: &TwoQubitState) -> [[f64; 4]; 4] {
    let p = paulis();
    let m = rho.matrix();
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            out[a][b] = (p[a].kronecker(&p[b]) * m).trace().re;
        }
    }
    out
}

/// Eigenvalues of a density matrix at or below this are treated as exact
/// zeros when forming `√ρ`; otherwise roundoff of order 1e-16 would surface
/// as 1e-8 in the concurrence.
const ZERO_EIGENVALUE: f64 = 1e-14;

/// Wootters concurrence.
///
/// `√λᵢ` of `ρ (σy⊗σy) ρ* (σy⊗σy)` are the singular values of `√ρ √ρ̃`
/// with `√ρ̃ = (σy⊗σy) √ρ* (σy⊗σy)`, which is what gets computed here.
pub fn concurrence(rho: &TwoQubitState) -> Result<f64> {
    let [_, _, sy, _] = paulis();
    let yy = sy.kronecker(&sy);
    let sqrt_rho = hermitian_eig(rho.matrix())?.map_spectrum(|l| {
        if l <= ZERO_EIGENVALUE {
            0.0.into()
        } else {
            l.sqrt().into()
        }
    });
    let sqrt_tilde = &yy * sqrt_rho.conjugate() * &yy;
    let mut s: Vec<f64> = (sqrt_rho * sqrt_tilde)
        .singular_values()
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// Bloch angles of a rank-1 projective measurement `Π± = (I ± n̂·σ)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementDirection {
    pub theta_m: f64,
    pub phi_m: f64,
}

impl MeasurementDirection {
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta_m.sin_cos();
        let (sp, cp) = self.phi_m.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// `[Π₊, Π₋]`.
    pub fn projectors(&self) -> [ComplexMatrix; 2] {
        let p = paulis();
        let n = self.unit_vector();
        let ndots = &p[1].scale(n[0]) + &p[2].scale(n[1]) + &p[3].scale(n[2]);
        [
            (&p[0] + &ndots).scale(0.5),
            (&p[0] - &ndots).scale(0.5),
        ]
    }
}

/// Conditional entropy of A after measuring B along `n`, from Pauli
/// coefficients.
fn measured_conditional_entropy(coeff: &[[f64; 4]; 4], n: [f64; 3]) -> f64 {
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let bn: f64 = (0..3).map(|b| coeff[0][b + 1] * n[b]).sum();
        let prob = 0.5 * (1.0 + sign * bn);
        if prob <= 1e-15 {
            continue;
        }
        let mut r2 = 0.0;
        for a in 0..3 {
            let corr: f64 = (0..3).map(|b| coeff[a + 1][b + 1] * n[b]).sum();
            let ra = (coeff[a + 1][0] + sign * corr) / (1.0 + sign * bn);
            r2 += ra * ra;
        }
        total += prob * qubit_entropy_from_radius(r2.sqrt());
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscordSettings {
    /// Coarse grid over the hemisphere, `(n_theta, n_phi)`.
    pub grid: (usize, usize),
    /// Stop when the simplex objective spread falls below this.
    pub tolerance: f64,
    pub max_evaluations: usize,
}

impl Default for DiscordSettings {
    fn default() -> Self {
        Self {
            grid: (32, 32),
            tolerance: 1e-12,
            max_evaluations: 500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscordResult {
    /// Discord in bits.
    pub value: f64,
    pub direction: MeasurementDirection,
    /// False when local refinement hit the evaluation cap; `value` is then
    /// the better of the grid optimum and the last simplex vertex.
    pub converged: bool,
    pub evaluations: usize,
}

/// Nelder–Mead on a 2-D objective with a fixed starting simplex.
fn nelder_mead_2d<F: Fn([f64; 2]) -> f64>(
    f: F,
    start: [f64; 2],
    step: [f64; 2],
    tolerance: f64,
    max_evals: usize,
) -> ([f64; 2], f64, bool, usize) {
    let mut pts = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut vals = pts.map(&f);
    let mut evals = 3;
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    loop {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = idx.map(|i| pts[i]);
        vals = idx.map(|i| vals[i]);
        if vals[2] - vals[0] < tolerance {
            return (pts[0], vals[0], true, evals);
        }
        if evals >= max_evals {
            return (pts[0], vals[0], false, evals);
        }
        let centroid = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let reflected = lerp(centroid, pts[2], -1.0);
        let fr = f(reflected);
        evals += 1;
        if fr < vals[0] {
            let expanded = lerp(centroid, pts[2], -2.0);
            let fe = f(expanded);
            evals += 1;
            if fe < fr {
                pts[2] = expanded;
                vals[2] = fe;
            } else {
                pts[2] = reflected;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            pts[2] = reflected;
            vals[2] = fr;
        } else {
            let contracted = if fr < vals[2] {
                lerp(centroid, reflected, 0.5)
            } else {
                lerp(centroid, pts[2], 0.5)
            };
            let fc = f(contracted);
            evals += 1;
            if fc < vals[2].min(fr) {
                pts[2] = contracted;
                vals[2] = fc;
            } else {
                for k in 1..3 {
                    pts[k] = lerp(pts[0], pts[k], 0.5);
                    vals[k] = f(pts[k]);
                }
                evals += 2;
            }
        }
    }
}

/// Quantum discord with measurement on B, minimized over rank-1 projective
/// measurements: a hemisphere grid, then Nelder–Mead from the best cell.
pub fn quantum_discord_with(rho: &TwoQubitState, settings: &DiscordSettings) -> Result<DiscordResult> {
    let (nt, np) = settings.grid;
    if nt == 0 || np == 0 {
        return Err(Error::InvalidConfig("discord grid must be non-empty".into()));
    }
    let coeff = pauli_coefficients(rho);
    let h_b = von_neumann_entropy(rho.marginal(1).matrix())?;
    let h_ab = von_neumann_entropy(rho.matrix())?;
    let objective = |angles: [f64; 2]| {
        let dir = MeasurementDirection {
            theta_m: angles[0],
            phi_m: angles[1],
        };
        measured_conditional_entropy(&coeff, dir.unit_vector())
    };

    // Antipodal directions give the same measurement, so a hemisphere suffices.
    let dt = (PI / 2.0) / nt as f64;
    let dp = 2.0 * PI / np as f64;
    let mut best = ([0.0, 0.0], f64::INFINITY);
    for i in 0..nt {
        for k in 0..np {
            let a = [(i as f64 + 0.5) * dt, -PI + (k as f64 + 0.5) * dp];
            let v = objective(a);
            if v < best.1 {
                best = (a, v);
            }
        }
    }
    let grid_evals = nt * np;
    let (pt, val, converged, evals) = nelder_mead_2d(
        objective,
        best.0,
        [dt, dp],
        settings.tolerance,
        settings.max_evaluations,
    );
    let (angles, cond) = if val <= best.1 { (pt, val) } else { best };
    let raw = h_b - h_ab + cond;
    if raw < -PSD_CLIP {
        return Err(Error::InvalidConfig(format!("negative discord {raw:e}")));
    }
    Ok(DiscordResult {
        value: raw.max(0.0),
        direction: MeasurementDirection {
            theta_m: angles[0],
            phi_m: angles[1],
        },
        converged,
        evaluations: grid_evals + evals,
    })
}

pub fn quantum_discord(rho: &TwoQubitState) -> Result<DiscordResult> {
    quantum_discord_with(rho, &DiscordSettings::default())
}

/// Tangle values within this slack outside `[0, 1]` are clipped.
const TANGLE_SLACK: f64 = 1e-9;

/// 3-tangle of a pure symmetric 3-qubit state:
/// `2(1 − Tr ρ_A²) − C_AB² − C_AC²`, with `C_AB = C_AC` by symmetry.
pub fn three_tangle(state: &SymmetricState) -> Result<f64> {
    let n = state.basis.qubits();
    if n != 3 {
        return Err(Error::TangleUndefined(n));
    }
    let rho_a = single_qubit_rdm(state)?;
    let c = concurrence(&two_qubit_rdm(state)?)?;
    tangle_from_parts(linear_entropy(&rho_a), c)
}

fn tangle_from_parts(linear_entropy: f64, concurrence: f64) -> Result<f64> {
    let tau = 2.0 * linear_entropy - 2.0 * concurrence * concurrence;
    if !(-TANGLE_SLACK..=1.0 + TANGLE_SLACK).contains(&tau) {
        return Err(Error::InvalidConfig(format!("3-tangle {tau} out of range")));
    }
    Ok(tau.clamp(0.0, 1.0))
}

/// Correlation matrix `T_ij = Tr(σ_i ⊗ σ_j ρ)`, `i, j ∈ {x, y, z}`.
pub fn correlation_matrix(rho: &TwoQubitState) -> Matrix3<f64> {
    let c = pauli_coefficients(rho);
    Matrix3::from_fn(|i, j| c[i + 1][j + 1])
}

/// Sum of the two largest eigenvalues of `T Tᵀ`; CHSH is violable iff > 1.
pub fn bell_m(rho: &TwoQubitState) -> f64 {
    let t = correlation_matrix(rho);
    let mut h: Vec<f64> = SymmetricEigen::new(t * t.transpose())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    h.sort_by(|a, b| b.total_cmp(a));
    h[0] + h[1]
}

/// `|⟨QS + RS + RT − QT⟩|` with `Q = σz`, `R = σx`,
/// `S = (−σx − σz)/√2`, `T = (σx − σz)/√2`.
pub fn chsh_fixed_settings(rho: &TwoQubitState) -> f64 {
    let [_, sx, _, sz] = paulis();
    let q = sz.clone();
    let r = sx.clone();
    let s = (-&sx - &sz).scale(FRAC_1_SQRT_2);
    let t = (&sx - &sz).scale(FRAC_1_SQRT_2);
    let op = q.kronecker(&s) + r.kronecker(&s) + r.kronecker(&t) - q.kronecker(&t);
    (op * rho.matrix()).trace().re.abs()
}

/// The measures a record can carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    LinearEntropy,
    VonNeumann,
    Concurrence,
    Discord,
    Tangle,
    BellM,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::LinearEntropy,
        Measure::VonNeumann,
        Measure::Concurrence,
        Measure::Discord,
        Measure::Tangle,
        Measure::BellM,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::LinearEntropy => "linear_entropy",
            Measure::VonNeumann => "von_neumann",
            Measure::Concurrence => "concurrence",
            Measure::Discord => "discord",
            Measure::Tangle => "tangle",
            Measure::BellM => "bell_m",
        }
    }

    /// Closed range every value of this measure must lie in.
    pub fn range(self) -> (f64, f64) {
        match self {
            Measure::LinearEntropy => (0.0, 0.5),
            Measure::VonNeumann => (0.0, 1.0),
            Measure::Concurrence | Measure::Tangle => (0.0, 1.0),
            Measure::Discord => (0.0, 1.0),
            Measure::BellM => (0.0, 2.0),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown measure '{s}'")))
    }
}

/// Parses a comma-separated list, keeping canonical order and dropping duplicates.
pub fn parse_measures(list: &str) -> Result<Vec<Measure>> {
    let mut out: Vec<Measure> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Measure::from_str)
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(Error::InvalidConfig("no measures requested".into()));
    }
    Ok(out)
}

/// Measure values of one state at one kick; unrequested measures are `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub kick: usize,
    pub linear_entropy: Option<f64>,
    pub von_neumann: Option<f64>,
    pub concurrence: Option<f64>,
    pub discord: Option<f64>,
    pub tangle: Option<f64>,
    pub bell_m: Option<f64>,
    /// Set when the discord refinement did not converge.
    pub discord_unconverged: bool,
}

impl CorrelationRecord {
    pub fn get(&self, m: Measure) -> Option<f64> {
        match m {
            Measure::LinearEntropy => self.linear_entropy,
            Measure::VonNeumann => self.von_neumann,
            Measure::Concurrence => self.concurrence,
            Measure::Discord => self.discord,
            Measure::Tangle => self.tangle,
            Measure::BellM => self.bell_m,
        }
    }

    fn slot(&mut self, m: Measure) -> &mut Option<f64> {
        match m {
            Measure::LinearEntropy => &mut self.linear_entropy,
            Measure::VonNeumann => &mut self.von_neumann,
            Measure::Concurrence => &mut self.concurrence,
            Measure::Discord => &mut self.discord,
            Measure::Tangle => &mut self.tangle,
            Measure::BellM => &mut self.bell_m,
        }
    }
}

/// Evaluates the requested measures on one symmetric state.
pub fn measure_state(
    state: &SymmetricState,
    kick: usize,
    measures: &[Measure],
    discord: &DiscordSettings,
) -> Result<CorrelationRecord> {
    let mut rec = CorrelationRecord {
        kick,
        ..Default::default()
    };
    if measures.contains(&Measure::Tangle) && state.basis.qubits() != 3 {
        return Err(Error::TangleUndefined(state.basis.qubits()));
    }
    let rho1 = single_qubit_rdm(state)?;
    let needs_pair = measures.iter().any(|m| {
        matches!(
            m,
            Measure::Concurrence | Measure::Discord | Measure::BellM | Measure::Tangle
        )
    });
    let rho2 = if needs_pair {
        Some(two_qubit_rdm(state)?)
    } else {
        None
    };
    let mut conc = None;
    for &m in measures {
        let v = match m {
            Measure::LinearEntropy => linear_entropy(&rho1),
            Measure::VonNeumann => von_neumann_entropy(rho1.matrix())?,
            Measure::Concurrence | Measure::Tangle => {
                let c = match conc {
                    Some(c) => c,
                    None => {
                        let c = concurrence(rho2.as_ref().expect("pair state"))?;
                        conc = Some(c);
                        c
                    }
                };
                if m == Measure::Concurrence {
                    c
                } else {
                    tangle_from_parts(linear_entropy(&rho1), c)?
                }
            }
            Measure::Discord => {
                let d = quantum_discord_with(rho2.as_ref().expect("pair state"), discord)?;
                rec.discord_unconverged = !d.converged;
                d.value
            }
            Measure::BellM => bell_m(rho2.as_ref().expect("pair state")),
        };
        *rec.slot(m) = Some(v);
    }
    Ok(rec)
}
