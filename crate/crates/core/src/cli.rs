//! Command-line surface: argument parsing, CSV / PGM / JSON writers and the
//! four subcommands.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::correlations::{parse_measures, CorrelationRecord, Measure};
use crate::error::Error;
use crate::kicked_top::{poincare_section, uniform_sphere_seeds, SectionPoint, TopParameters};
use crate::spin::{BlochDirection, SpinBasis};
use crate::survey::{phase_sweep, time_series, PhaseMap, SweepConfig};
use crate::verify::{run_suite, Suite, VerifyOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub const EVOLVE_HEADER: &str = "kick,linear_entropy,von_neumann,concurrence,discord,tangle,bell_m";
pub const CLASSICAL_HEADER: &str = "seed_id,step,theta,phi";

/// Parses an angle in radians. Besides plain numbers, accepts `pi`, `-pi`,
/// `pi/2`, `3*pi/4`, `2pi` and similar.
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("angle '{s}' is not finite"))
        };
    }
    let bad = || format!("cannot parse angle '{s}' (use radians or forms like pi/2)");
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coeff = num.strip_suffix("pi").ok_or_else(bad)?.trim_end_matches('*').trim();
    let coeff = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(coeff * std::f64::consts::PI / den)
}

/// Parses `j` as a decimal (`1.5`) or a fraction (`3/2`).
pub fn parse_spin(s: &str) -> std::result::Result<SpinBasis, String> {
    let j = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| format!("bad spin '{s}'"))?;
            let d: f64 = d.trim().parse().map_err(|_| format!("bad spin '{s}'"))?;
            n / d
        }
        None => s.trim().parse().map_err(|_| format!("bad spin '{s}'"))?,
    };
    SpinBasis::from_j(j).map_err(|e| e.to_string())
}

/// Parses `NxM` into `(N, M)`.
pub fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid '{s}' must look like NxM"))?;
    let a = a.trim().parse().map_err(|_| format!("bad grid '{s}'"))?;
    let b = b.trim().parse().map_err(|_| format!("bad grid '{s}'"))?;
    Ok((a, b))
}

fn parse_kappa(s: &str) -> std::result::Result<f64, String> {
    let k: f64 = s.trim().parse().map_err(|_| format!("bad kappa '{s}'"))?;
    if !k.is_finite() || k < 0.0 {
        return Err(format!("kappa must be finite and non-negative, got {s}"));
    }
    Ok(k)
}

/// `%.12g`-style rendering: 12 significant digits, trailing zeros trimmed.
pub fn format_sig(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt_field(v: Option<f64>) -> String {
    v.map(format_sig).unwrap_or_default()
}

pub fn write_evolve_csv<W: Write>(records: &[CorrelationRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "{EVOLVE_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.kick,
            opt_field(r.linear_entropy),
            opt_field(r.von_neumann),
            opt_field(r.concurrence),
            opt_field(r.discord),
            opt_field(r.tangle),
            opt_field(r.bell_m),
        )?;
    }
    w.flush()
}

pub fn sweep_header(measures: &[Measure]) -> String {
    let mut h = String::from("theta,phi");
    for m in measures {
        h.push(',');
        h.push_str(m.name());
    }
    h
}

pub fn write_sweep_csv<W: Write>(map: &PhaseMap, mut w: W) -> io::Result<()> {
    writeln!(w, "{}", sweep_header(&map.measures))?;
    let n_phi = map.phis.len();
    for (i, &theta) in map.thetas.iter().enumerate() {
        for (k, &phi) in map.phis.iter().enumerate() {
            let mut line = format!("{},{}", format_sig(theta), format_sig(phi));
            for vals in &map.values {
                line.push(',');
                line.push_str(&format_sig(vals[i * n_phi + k]));
            }
            writeln!(w, "{line}")?;
        }
    }
    w.flush()
}

/// Min–max range used to scale a heatmap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Normalization {
    pub min: f64,
    pub max: f64,
}

/// Writes a binary P5 graymap, `cols` wide and `rows` tall, row-major from
/// the top-left pixel. Values are min–max scaled to 0..=255; a constant
/// image maps to 0.
pub fn write_pgm<W: Write>(values: &[f64], rows: usize, cols: usize, mut w: W) -> io::Result<Normalization> {
    assert_eq!(values.len(), rows * cols, "pixel count must match the image size");
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    write!(w, "P5\n{cols} {rows}\n255\n")?;
    let pixels: Vec<u8> = values
        .iter()
        .map(|&v| {
            if span > 0.0 {
                ((v - min) / span * 255.0).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect();
    w.write_all(&pixels)?;
    w.flush()?;
    Ok(Normalization { min, max })
}

pub fn write_classical_csv<W: Write>(points: &[SectionPoint], mut w: W) -> io::Result<()> {
    writeln!(w, "{CLASSICAL_HEADER}")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            p.seed_id,
            p.step,
            format_sig(p.theta),
            format_sig(p.phi)
        )?;
    }
    w.flush()
}

/// Seed file: one `theta,phi` pair (radians) per line; blank lines and
/// lines starting with `#` are skipped.
pub fn parse_seed_file(text: &str) -> CliResult<Vec<BlochDirection>> {
    let mut seeds = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |why: String| CliError::Input(format!("seed file line {}: {why}", lineno + 1));
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| bad(format!("expected 'theta,phi', got '{line}'")))?;
        let theta = parse_angle(a).map_err(bad)?;
        let phi = parse_angle(b).map_err(bad)?;
        seeds.push(BlochDirection::new(theta, phi).map_err(|e| bad(e.to_string()))?);
    }
    if seeds.is_empty() {
        return Err(CliError::Input("seed file contains no seeds".into()));
    }
    Ok(seeds)
}

/// Written next to every output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub determinism: &'static str,
    pub code_version: &'static str,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
}

const DETERMINISM_NOTE: &str =
    "no randomness: identical parameters reproduce byte-identical data files regardless of thread count";

fn write_manifest(path: &Path, manifest: &RunManifest) -> CliResult<()> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(path, text + "\n").map_err(io_err(path))
}

fn create(path: &Path) -> CliResult<BufWriter<fs::File>> {
    fs::File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn manifest_path_for(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

#[derive(Debug, Parser)]
#[command(name = "kicktop", version, about = "Quantum kicked top: correlations, phase maps and Poincaré sections")]
pub struct Cli {
    /// Maximum worker threads for grid sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation time series from one coherent state.
    Evolve(EvolveArgs),
    /// Long-time-average phase maps over a grid of coherent states.
    Sweep(SweepArgs),
    /// Poincaré section of the classical kicked-top map.
    Classical(ClassicalArgs),
    /// Run the built-in oracle and invariant checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct TopArgs {
    /// Spin quantum number, e.g. 20, 1.5 or 3/2.
    #[arg(long, value_parser = parse_spin)]
    pub j: SpinBasis,
    /// Twist strength.
    #[arg(long, value_parser = parse_kappa)]
    pub kappa: f64,
    /// Rotation angle per kick in radians (`pi/2` accepted).
    #[arg(long, default_value = "pi/2", value_parser = parse_angle)]
    pub p: f64,
}

impl TopArgs {
    fn params(&self) -> CliResult<TopParameters> {
        Ok(TopParameters::new(self.j, self.kappa, self.p)?)
    }
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub top: TopArgs,
    /// Polar angle of the initial coherent state (radians).
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta: f64,
    /// Azimuth of the initial coherent state (radians).
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 20)]
    pub kicks: usize,
    /// Comma-separated subset of linear_entropy,von_neumann,concurrence,
    /// discord,tangle,bell_m (default: all that apply; tangle needs j = 3/2).
    #[arg(long)]
    pub measures: Option<String>,
    /// Also emit the kick-0 record.
    #[arg(long)]
    pub include_t0: bool,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub top: TopArgs,
    /// Grid as NxM (theta rows x phi columns). Default 100x100, or 50x50
    /// when discord is requested.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    #[arg(long, default_value_t = 100)]
    pub kicks: usize,
    /// Comma-separated measures (default: all that apply).
    #[arg(long)]
    pub measures: Option<String>,
    /// Include the initial state in the average.
    #[arg(long)]
    pub include_t0: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    #[arg(long, value_parser = parse_kappa)]
    pub kappa: f64,
    #[arg(long, default_value = "pi/2", value_parser = parse_angle)]
    pub p: f64,
    /// Seed grid NxM, uniform in (cos theta, phi).
    #[arg(long, value_parser = parse_grid, conflicts_with = "seed_file")]
    pub seeds: Option<(usize, usize)>,
    /// File of `theta,phi` seed lines.
    #[arg(long)]
    pub seed_file: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Fast,
    Full,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "fast")]
    pub suite: SuiteArg,
    /// Also write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Deliberately flip the classical twist sign (fault-injection check).
    #[arg(long, hide = true)]
    pub inject_twist_flip: bool,
}

fn resolve_measures(spec: Option<&str>, basis: SpinBasis) -> CliResult<Vec<Measure>> {
    match spec {
        Some(s) => Ok(parse_measures(s)?),
        None => Ok(Measure::ALL
            .into_iter()
            .filter(|&m| m != Measure::Tangle || basis.qubits() == 3)
            .collect()),
    }
}

pub fn cmd_evolve(args: &EvolveArgs) -> CliResult<()> {
    let start = Instant::now();
    let params = args.top.params()?;
    let measures = resolve_measures(args.measures.as_deref(), params.basis)?;
    let dir = BlochDirection::new(args.theta, args.phi)?;
    let records = time_series(params, dir, args.kicks, &measures, args.include_t0)?;
    match &args.out {
        Some(path) => {
            write_evolve_csv(&records, create(path)?).map_err(io_err(path))?;
            write_manifest(
                &manifest_path_for(path),
                &RunManifest {
                    command: "evolve".into(),
                    parameters: json!({
                        "j": params.basis.j(),
                        "kappa": params.kappa,
                        "p": params.p,
                        "theta": dir.theta,
                        "phi": dir.phi,
                        "kicks": args.kicks,
                        "measures": measures,
                        "include_t0": args.include_t0,
                    }),
                    determinism: DETERMINISM_NOTE,
                    code_version: env!("CARGO_PKG_VERSION"),
                    wall_clock_seconds: start.elapsed().as_secs_f64(),
                    outputs: vec![path.display().to_string()],
                },
            )
        }
        None => write_evolve_csv(&records, io::stdout().lock()).map_err(io_err(Path::new("<stdout>"))),
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> CliResult<()> {
    let start = Instant::now();
    let params = args.top.params()?;
    let measures = resolve_measures(args.measures.as_deref(), params.basis)?;
    let grid = args.grid.unwrap_or(if measures.contains(&Measure::Discord) {
        (50, 50)
    } else {
        (100, 100)
    });
    let mut config = SweepConfig::new(params, grid, args.kicks, measures.clone());
    config.include_t0 = args.include_t0;
    config.validate()?;
    fs::create_dir_all(&args.out_dir).map_err(io_err(&args.out_dir))?;

    let map = phase_sweep(&config)?;

    let csv_path = args.out_dir.join("phase_map.csv");
    write_sweep_csv(&map, create(&csv_path)?).map_err(io_err(&csv_path))?;
    let mut outputs = vec![csv_path.display().to_string()];
    let mut normalization = serde_json::Map::new();
    for (m, vals) in map.measures.iter().zip(&map.values) {
        let path = args.out_dir.join(format!("{}.pgm", m.name()));
        let norm = write_pgm(vals, grid.0, grid.1, create(&path)?).map_err(io_err(&path))?;
        normalization.insert(m.name().into(), json!(norm));
        outputs.push(path.display().to_string());
    }
    write_manifest(
        &args.out_dir.join("manifest.json"),
        &RunManifest {
            command: "sweep".into(),
            parameters: json!({
                "j": params.basis.j(),
                "kappa": params.kappa,
                "p": params.p,
                "grid": [grid.0, grid.1],
                "kicks": args.kicks,
                "measures": measures,
                "include_t0": args.include_t0,
                "heatmap_normalization": normalization,
                "heatmap_orientation": "pixel (0,0) = first theta row, phi = -pi edge; theta increases downward, phi to the right",
                "discord_unconverged_cells": map.flagged_cells,
            }),
            determinism: DETERMINISM_NOTE,
            code_version: env!("CARGO_PKG_VERSION"),
            wall_clock_seconds: start.elapsed().as_secs_f64(),
            outputs,
        },
    )
}

pub fn cmd_classical(args: &ClassicalArgs) -> CliResult<()> {
    let start = Instant::now();
    let (seeds, seed_desc) = match &args.seed_file {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            (parse_seed_file(&text)?, json!(path.display().to_string()))
        }
        None => {
            let (n, m) = args.seeds.unwrap_or((20, 20));
            if n == 0 || m == 0 {
                return Err(CliError::Input("seed grid must be non-empty".into()));
            }
            (uniform_sphere_seeds(n, m), json!([n, m]))
        }
    };
    let points = poincare_section(args.kappa, args.p, &seeds, args.steps)?;
    match &args.out {
        Some(path) => {
            write_classical_csv(&points, create(path)?).map_err(io_err(path))?;
            write_manifest(
                &manifest_path_for(path),
                &RunManifest {
                    command: "classical".into(),
                    parameters: json!({
                        "kappa": args.kappa,
                        "p": args.p,
                        "seeds": seed_desc,
                        "steps": args.steps,
                    }),
                    determinism: DETERMINISM_NOTE,
                    code_version: env!("CARGO_PKG_VERSION"),
                    wall_clock_seconds: start.elapsed().as_secs_f64(),
                    outputs: vec![path.display().to_string()],
                },
            )
        }
        None => write_classical_csv(&points, io::stdout().lock()).map_err(io_err(Path::new("<stdout>"))),
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    let suite = match args.suite {
        SuiteArg::Fast => Suite::Fast,
        SuiteArg::Full => Suite::Full,
    };
    let report = run_suite(&VerifyOptions {
        suite,
        inject_twist_flip: args.inject_twist_flip,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{text}");
    if let Some(path) = &args.report {
        fs::write(path, text + "\n").map_err(io_err(path))?;
    }
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        Err(CliError::VerifyFailed(failed.join(", ")))
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    match &cli.command {
        Command::Evolve(a) => cmd_evolve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Classical(a) => cmd_classical(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("tau").is_err());
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("inf").is_err());
    }

    #[test]
    fn spins_and_grids() {
        assert_eq!(parse_spin("3/2").unwrap().qubits(), 3);
        assert_eq!(parse_spin("1.5").unwrap().qubits(), 3);
        assert_eq!(parse_spin("20").unwrap().qubits(), 40);
        assert!(parse_spin("0.3").is_err());
        assert_eq!(parse_grid("50x40").unwrap(), (50, 40));
        assert!(parse_grid("50").is_err());
        assert!(parse_kappa("-1").is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(0.5), "0.5");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(-PI), "-3.14159265359");
        assert_eq!(format_sig(123456.789), "123456.789");
        assert_eq!(format_sig(1.5e-7), "1.5e-7");
        assert_eq!(format_sig(2.0f64.sqrt() * 1e-9), "1.41421356237e-9");
    }

    #[test]
    fn pgm_orientation_and_scaling() {
        // 2 rows x 3 cols, asymmetric pattern: only (row 0, col 0) is max.
        let vals = [1.0, 0.0, 0.0, 0.0, 0.0, 0.5];
        let mut buf = Vec::new();
        let norm = write_pgm(&vals, 2, 3, &mut buf).unwrap();
        assert_eq!(norm, Normalization { min: 0.0, max: 1.0 });
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(&buf[header.len()..], &[255, 0, 0, 0, 0, 128]);

        let mut flat = Vec::new();
        write_pgm(&[0.3; 4], 2, 2, &mut flat).unwrap();
        assert!(flat.ends_with(&[0, 0, 0, 0]));
    }

    #[test]
    fn seed_file_parsing() {
        let seeds = parse_seed_file("# theta,phi\n0.5, 1.0\n\npi/2,-pi/4\n").unwrap();
        assert_eq!(seeds.len(), 2);
        assert_eq!(seeds[1].theta, PI / 2.0);
        assert!(parse_seed_file("0.5 1.0\n").is_err());
        assert!(parse_seed_file("4.0,0.0\n").is_err());
        assert!(parse_seed_file("# nothing\n").is_err());
    }

    #[test]
    fn evolve_csv_leaves_absent_measures_empty() {
        let rec = CorrelationRecord {
            kick: 3,
            linear_entropy: Some(0.25),
            bell_m: Some(1.0),
            ..Default::default()
        };
        let mut buf = Vec::new();
        write_evolve_csv(&[rec], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{EVOLVE_HEADER}\n3,0.25,,,,,1\n"));
    }

    #[test]
    fn cli_parses() {
        let cli = Cli::try_parse_from([
            "kicktop", "evolve", "--j", "1.5", "--kappa", "0.5", "--theta", "0", "--phi", "-pi/2",
        ])
        .unwrap();
        match cli.command {
            Command::Evolve(a) => {
                assert_eq!(a.kicks, 20);
                assert_eq!(a.top.p, PI / 2.0);
                assert_eq!(a.phi, -PI / 2.0);
            }
            _ => panic!("wrong subcommand"),
        }
        assert!(Cli::try_parse_from(["kicktop", "classical", "--kappa", "1", "--seeds", "2x2", "--seed-file", "x"]).is_err());
    }
}
