//! Time series and long-time-average phase maps over grids of initial
//! coherent states, plus a classical chaos classifier for the same grid.

use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{measure_state, CorrelationRecord, DiscordSettings, Measure};
use crate::error::{Error, Result};
use crate::kicked_top::{build_floquet, evolve, ClassicalMap, ClassicalPoint, TopParameters};
use crate::numerics::ComplexMatrix;
use crate::spin::{coherent_state, collective_operators, BlochDirection, SpinOperators};

/// Operator tables for one parameter set, shared read-only across workers.
#[derive(Clone, Debug)]
pub struct TopDynamics {
    pub params: TopParameters,
    pub ops: SpinOperators,
    pub floquet: ComplexMatrix,
}

impl TopDynamics {
    pub fn new(params: TopParameters) -> Result<Self> {
        let ops = collective_operators(params.basis);
        let floquet = build_floquet(&params, &ops)?;
        Ok(Self {
            params,
            ops,
            floquet,
        })
    }

    pub fn time_series(
        &self,
        dir: BlochDirection,
        kicks: usize,
        measures: &[Measure],
        include_t0: bool,
        discord: &DiscordSettings,
    ) -> Result<Vec<CorrelationRecord>> {
        check_measures(&self.params, measures)?;
        let psi0 = coherent_state(&self.ops, dir)?;
        let mut out = Vec::with_capacity(kicks + 1);
        if include_t0 {
            out.push(measure_state(&psi0, 0, measures, discord)?);
        }
        for (n, psi) in evolve(&psi0, &self.floquet, kicks)?.iter().enumerate() {
            out.push(measure_state(psi, n + 1, measures, discord)?);
        }
        Ok(out)
    }
}

fn check_measures(params: &TopParameters, measures: &[Measure]) -> Result<()> {
    if measures.contains(&Measure::Tangle) && params.basis.qubits() != 3 {
        return Err(Error::TangleUndefined(params.basis.qubits()));
    }
    Ok(())
}

/// Measure records at kicks `1..=kicks` (and kick 0 if `include_t0`).
pub fn time_series(
    params: TopParameters,
    dir: BlochDirection,
    kicks: usize,
    measures: &[Measure],
    include_t0: bool,
) -> Result<Vec<CorrelationRecord>> {
    TopDynamics::new(params)?.time_series(
        dir,
        kicks,
        measures,
        include_t0,
        &DiscordSettings::default(),
    )
}

/// Indices `n` (1-based kick of the later record) where every requested
/// measure changed by less than `tol` between consecutive records.
pub fn plateau_steps(records: &[CorrelationRecord], measures: &[Measure], tol: f64) -> Vec<usize> {
    records
        .windows(2)
        .filter(|w| {
            measures.iter().all(|&m| match (w[0].get(m), w[1].get(m)) {
                (Some(a), Some(b)) => (a - b).abs() < tol,
                _ => true,
            })
        })
        .map(|w| w[1].kick)
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub params: TopParameters,
    /// `(n_theta, n_phi)`.
    pub grid: (usize, usize),
    pub kicks: usize,
    pub measures: Vec<Measure>,
    pub include_t0: bool,
    pub discord: DiscordSettings,
}

impl SweepConfig {
    pub fn new(params: TopParameters, grid: (usize, usize), kicks: usize, measures: Vec<Measure>) -> Self {
        Self {
            params,
            grid,
            kicks,
            measures,
            include_t0: false,
            discord: DiscordSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.0 < 2 || self.grid.1 < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid {}x{} must be at least 2x2",
                self.grid.0, self.grid.1
            )));
        }
        if self.kicks < 1 {
            return Err(Error::InvalidConfig("kicks must be at least 1".into()));
        }
        if self.measures.is_empty() {
            return Err(Error::InvalidConfig("no measures requested".into()));
        }
        check_measures(&self.params, &self.measures)
    }
}

/// Cell-center coordinates: `θ` in `[0, π]`, `φ` in `[−π, π)`.
pub fn grid_axes(n_theta: usize, n_phi: usize) -> (Vec<f64>, Vec<f64>) {
    use std::f64::consts::PI;
    let thetas = (0..n_theta)
        .map(|i| PI * (i as f64 + 0.5) / n_theta as f64)
        .collect();
    let phis = (0..n_phi)
        .map(|k| -PI + 2.0 * PI * (k as f64 + 0.5) / n_phi as f64)
        .collect();
    (thetas, phis)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseMapMetadata {
    pub j: f64,
    pub kappa: f64,
    pub p: f64,
    pub kicks: usize,
    pub include_t0: bool,
    pub code_version: &'static str,
}

/// Long-time averages on a `(θ, φ)` grid. Values are row-major with `θ`
/// as the row index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseMap {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub measures: Vec<Measure>,
    /// One row-major grid per entry of `measures`.
    pub values: Vec<Vec<f64>>,
    /// Cells where the discord refinement failed to converge at some kick.
    pub flagged_cells: Vec<usize>,
    pub metadata: PhaseMapMetadata,
}

impl PhaseMap {
    pub fn shape(&self) -> (usize, usize) {
        (self.thetas.len(), self.phis.len())
    }

    pub fn values_of(&self, m: Measure) -> Option<&[f64]> {
        self.measures
            .iter()
            .position(|&x| x == m)
            .map(|i| self.values[i].as_slice())
    }

    pub fn at(&self, m: Measure, i_theta: usize, k_phi: usize) -> Option<f64> {
        self.values_of(m).map(|v| v[i_theta * self.phis.len() + k_phi])
    }
}

/// Long-time averages of the requested measures for every grid cell.
///
/// Cells run in parallel on the current rayon pool; results are merged by
/// cell index and each average is summed in kick order, so the output does
/// not depend on the thread count.
pub fn phase_sweep(config: &SweepConfig) -> Result<PhaseMap> {
    config.validate()?;
    let dynamics = TopDynamics::new(config.params)?;
    let (thetas, phis) = grid_axes(config.grid.0, config.grid.1);
    let n_phi = phis.len();
    let cells = thetas.len() * n_phi;

    let per_cell: Vec<Result<(Vec<f64>, bool)>> = (0..cells)
        .into_par_iter()
        .map(|cell| {
            let dir = BlochDirection {
                theta: thetas[cell / n_phi],
                phi: phis[cell % n_phi],
            };
            let records = dynamics.time_series(
                dir,
                config.kicks,
                &config.measures,
                config.include_t0,
                &config.discord,
            )?;
            let count = records.len() as f64;
            let means = config
                .measures
                .iter()
                .map(|&m| records.iter().map(|r| r.get(m).unwrap_or(0.0)).sum::<f64>() / count)
                .collect();
            let flagged = records.iter().any(|r| r.discord_unconverged);
            Ok((means, flagged))
        })
        .collect();

    let mut values = vec![Vec::with_capacity(cells); config.measures.len()];
    let mut flagged_cells = Vec::new();
    for (cell, res) in per_cell.into_iter().enumerate() {
        let (means, flagged) = res?;
        for (slot, v) in values.iter_mut().zip(means) {
            slot.push(v);
        }
        if flagged {
            flagged_cells.push(cell);
        }
    }
    Ok(PhaseMap {
        thetas,
        phis,
        measures: config.measures.clone(),
        values,
        flagged_cells,
        metadata: PhaseMapMetadata {
            j: config.params.basis.j(),
            kappa: config.params.kappa,
            p: config.params.p,
            kicks: config.kicks,
            include_t0: config.include_t0,
            code_version: env!("CARGO_PKG_VERSION"),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellLabel {
    Regular,
    Chaotic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifierSettings {
    /// Separation growth rate (per step) above which a cell is chaotic.
    pub threshold: f64,
    pub separation: f64,
}

impl Default for ClassifierSettings {
    fn default() -> Self {
        Self {
            threshold: 0.1,
            separation: 1e-8,
        }
    }
}

/// Mean per-step log growth of a renormalized 1e-8 separation, i.e. a
/// finite-time largest Lyapunov exponent.
pub fn separation_growth(map: &ClassicalMap, start: BlochDirection, steps: usize, d0: f64) -> f64 {
    let mut a = ClassicalPoint::from_direction(start);
    // Perturb along the local θ direction so the partner stays on the sphere.
    let (st, ct) = start.theta.sin_cos();
    let (sp, cp) = start.phi.sin_cos();
    let e_theta = [ct * cp, ct * sp, -st];
    let mut b = ClassicalPoint::new(a.x + d0 * e_theta[0], a.y + d0 * e_theta[1], a.z + d0 * e_theta[2]);
    let mut total = 0.0;
    for _ in 0..steps {
        a = map.step(a);
        b = map.step(b);
        let diff = [b.x - a.x, b.y - a.y, b.z - a.z];
        let d = (diff[0] * diff[0] + diff[1] * diff[1] + diff[2] * diff[2]).sqrt();
        if d == 0.0 {
            b = ClassicalPoint::new(a.x + d0 * e_theta[0], a.y + d0 * e_theta[1], a.z + d0 * e_theta[2]);
            continue;
        }
        total += (d / d0).ln();
        let s = d0 / d;
        b = ClassicalPoint::new(a.x + s * diff[0], a.y + s * diff[1], a.z + s * diff[2]);
    }
    total / steps as f64
}

/// Labels every sweep-grid cell (same cell centers as [`phase_sweep`]).
pub fn classify_classical(
    kappa: f64,
    p: f64,
    grid: (usize, usize),
    steps: usize,
    settings: &ClassifierSettings,
) -> Result<Vec<CellLabel>> {
    if steps < 100 {
        return Err(Error::InvalidConfig(format!(
            "classifier needs at least 100 steps, got {steps}"
        )));
    }
    let map = ClassicalMap::new(kappa, p);
    let (thetas, phis) = grid_axes(grid.0, grid.1);
    let n_phi = phis.len();
    Ok((0..thetas.len() * n_phi)
        .into_par_iter()
        .map(|cell| {
            let dir = BlochDirection {
                theta: thetas[cell / n_phi],
                phi: phis[cell % n_phi],
            };
            if separation_growth(&map, dir, steps, settings.separation) > settings.threshold {
                CellLabel::Chaotic
            } else {
                CellLabel::Regular
            }
        })
        .collect())
}

/// Mean of a per-cell quantity over chaotic and over regular cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LabelContrast {
    pub chaotic_mean: Option<f64>,
    pub regular_mean: Option<f64>,
    pub chaotic_cells: usize,
    pub regular_cells: usize,
}

impl LabelContrast {
    pub fn chaotic_fraction(&self) -> f64 {
        self.chaotic_cells as f64 / (self.chaotic_cells + self.regular_cells) as f64
    }
}

pub fn label_contrast(values: &[f64], labels: &[CellLabel]) -> LabelContrast {
    let mean = |want: CellLabel| {
        let picked: Vec<f64> = values
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == want)
            .map(|(&v, _)| v)
            .collect();
        let n = picked.len();
        let m = (n > 0).then(|| picked.iter().sum::<f64>() / n as f64);
        (m, n)
    };
    let (chaotic_mean, chaotic_cells) = mean(CellLabel::Chaotic);
    let (regular_mean, regular_cells) = mean(CellLabel::Regular);
    LabelContrast {
        chaotic_mean,
        regular_mean,
        chaotic_cells,
        regular_cells,
    }
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()) as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}
