use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde_json::json;
use single_ur_core::bounds::{
    is_maximally_mixed, lemma_scan, single_bound_report, tight_witness, BoundError, BoundReport,
    SLACK_TOL,
};
use single_ur_core::products::{product_report, ProductReport};
use single_ur_core::qubit::{
    averaged_bounds_analytic, averaged_bounds_monte_carlo, AveragedBounds,
};
use single_ur_core::states::{derive_seed, random_density, random_observable, DensityMatrix};

use crate::instance::{self, encode, InstanceFile};
use crate::{CliError, Outcome, VIOLATION_TOL};

const DEFAULT_S: [f64; 3] = [0.5, 1.0, 2.0];
/// Relative inflation applied to c_s^opt when certifying a witness.
pub const WITNESS_INFLATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
}

fn bound_err(e: BoundError) -> CliError {
    CliError::Validation(e.to_string())
}

fn check_s_list(s_list: &[f64]) -> Result<(), CliError> {
    match s_list.iter().find(|s| !(s.is_finite() && **s >= 0.5)) {
        Some(s) => Err(CliError::Usage(format!(
            "s = {s} must be a finite value ≥ 1/2"
        ))),
        None => Ok(()),
    }
}

/// Decimal rendering with `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Instance file (JSON).
    pub instance: PathBuf,
    /// Exponents s to check; defaults to the instance's s_values, then 0.5,1,2.
    #[arg(long = "s", value_delimiter = ',')]
    pub s: Vec<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
}

fn report_json(name: &str, r: &BoundReport) -> serde_json::Value {
    json!({
        "observable": name,
        "s": r.s,
        "variance": r.variance,
        "classical_variance": r.classical_variance,
        "comm_norm_sq": r.comm_norm_sq,
        "coefficient": r.coefficient.value(),
        "luo_bound": r.luo_bound,
        "luo_valid": r.luo_valid,
        "optimal_bound": r.optimal_bound,
        "sharp_bound": r.sharp_bound,
        "slack": r.slack,
    })
}

pub fn check(args: &CheckArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let inst = instance::load(&args.instance)?;
    let s_list = if !args.s.is_empty() {
        args.s.clone()
    } else {
        inst.s_values.clone().unwrap_or_else(|| DEFAULT_S.to_vec())
    };
    check_s_list(&s_list)?;

    let mut reports = Vec::new();
    for (name, obs) in &inst.observables {
        for &s in &s_list {
            reports.push((
                name.as_str(),
                single_bound_report(&inst.rho, obs, s).map_err(bound_err)?,
            ));
        }
    }
    let violated = reports.iter().any(|(_, r)| r.slack < -SLACK_TOL);

    match args.format {
        OutputFormat::Json => {
            let rows: Vec<_> = reports.iter().map(|(n, r)| report_json(n, r)).collect();
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&json!({ "reports": rows, "violation": violated }))
                    .unwrap()
            )?;
        }
        OutputFormat::Table => {
            writeln!(
                out,
                "{:<12} {:>6} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14} {:>11}",
                "observable",
                "s",
                "variance",
                "classical",
                "comm_norm_sq",
                "coefficient",
                "optimal",
                "sharp",
                "slack",
                ""
            )?;
            for (name, r) in &reports {
                let coefficient = match r.coefficient.value() {
                    Some(c) => format!("{c:.6e}"),
                    None => "mixed".to_string(),
                };
                writeln!(
                    out,
                    "{:<12} {:>6} {:>14.6e} {:>14.6e} {:>14.6e} {:>14} {:>14.6e} {:>14.6e} {:>14.6e} {:>11}",
                    name,
                    r.s,
                    r.variance,
                    r.classical_variance,
                    r.comm_norm_sq,
                    coefficient,
                    r.optimal_bound,
                    r.sharp_bound,
                    r.slack,
                    if r.slack < -SLACK_TOL { "VIOLATION" } else { "ok" }
                )?;
            }
        }
    }
    Ok(if violated {
        Outcome::Violation
    } else {
        Outcome::Ok
    })
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.5)]
    pub p_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p_max: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Monte Carlo samples per purity; 0 disables the MC columns.
    #[arg(long, default_value_t = 0)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn sweep_header(with_mc: bool) -> Vec<String> {
    let mut header = vec!["purity".to_string()];
    header.extend(AveragedBounds::COLUMNS.iter().map(|c| c.to_string()));
    if with_mc {
        for c in AveragedBounds::COLUMNS {
            header.push(format!("{c}_mc"));
            header.push(format!("{c}_se"));
        }
    }
    header
}

pub fn purity_grid(p_min: f64, p_max: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![p_min];
    }
    (0..steps)
        .map(|k| {
            if k == steps - 1 {
                p_max
            } else {
                p_min + (p_max - p_min) * k as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

pub fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    if !(0.5 <= args.p_min && args.p_min <= args.p_max && args.p_max <= 1.0) {
        return Err(CliError::Usage(format!(
            "purity range must satisfy 0.5 ≤ p_min ≤ p_max ≤ 1, got [{}, {}]",
            args.p_min, args.p_max
        )));
    }
    if args.steps == 0 {
        return Err(CliError::Usage("steps must be at least 1".into()));
    }
    let with_mc = args.mc_samples > 0;
    let file = File::create(&args.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    let mut writer = csv::Writer::from_writer(file);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    writer.write_record(sweep_header(with_mc)).map_err(io)?;

    let mut disagreements = 0;
    for (k, &p) in purity_grid(args.p_min, args.p_max, args.steps)
        .iter()
        .enumerate()
    {
        let exact = averaged_bounds_analytic(p).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut record = vec![fmt_sig(p, 12)];
        record.extend(exact.values().iter().map(|&v| fmt_sig(v, 12)));
        if with_mc {
            let mc =
                averaged_bounds_monte_carlo(p, args.mc_samples, derive_seed(args.seed, k as u64))
                    .map_err(|e| CliError::Usage(e.to_string()))?;
            let agree = mc.agrees_with(&exact);
            for (c, ok) in AveragedBounds::COLUMNS.iter().zip(agree) {
                if !ok {
                    disagreements += 1;
                    writeln!(
                        out,
                        "purity {p}: {c} Monte Carlo estimate outside 5 standard errors"
                    )?;
                }
            }
            for (v, se) in mc.estimate.values().iter().zip(mc.std_err) {
                record.push(fmt_sig(*v, 12));
                record.push(fmt_sig(se, 12));
            }
        }
        writer.write_record(&record).map_err(io)?;
    }
    writer.flush()?;
    writeln!(out, "wrote {} rows to {}", args.steps, args.out.display())?;
    Ok(if disagreements > 0 {
        Outcome::Violation
    } else {
        Outcome::Ok
    })
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub dim: usize,
    /// Number of random (ρ, A, B) instances.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Rank of the random states; defaults to dim.
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long = "s", value_delimiter = ',', default_values_t = DEFAULT_S)]
    pub s: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Minimum and worst absolute slack of one bound over an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlackSummary {
    pub min: f64,
    pub max_abs: f64,
}

impl SlackSummary {
    fn new() -> Self {
        Self {
            min: f64::INFINITY,
            max_abs: 0.0,
        }
    }

    fn push(&mut self, slack: f64) {
        self.min = self.min.min(slack);
        self.max_abs = self.max_abs.max(slack.abs());
    }
}

pub const SAMPLE_BOUNDS: [&str; 6] = [
    "single",
    "robertson",
    "schrodinger",
    "luo_product",
    "optimal_product",
    "sharp_product",
];

fn instance_slacks(
    rho: &DensityMatrix,
    s_list: &[f64],
    dim: usize,
    seeds: [u64; 2],
) -> Result<Vec<[f64; 6]>, CliError> {
    let a = random_observable(dim, seeds[0]).map_err(|e| CliError::Usage(e.to_string()))?;
    let b = random_observable(dim, seeds[1]).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = Vec::with_capacity(2 * s_list.len());
    for &s in s_list {
        let ra = single_bound_report(rho, &a, s).map_err(bound_err)?;
        let rb = single_bound_report(rho, &b, s).map_err(bound_err)?;
        let p: ProductReport = product_report(rho, &a, &b, s).map_err(bound_err)?;
        let vp = p.variance_product;
        let slack = |x: f64| vp - x;
        for single in [ra.slack, rb.slack] {
            out.push([
                single,
                slack(p.robertson),
                slack(p.schrodinger),
                slack(p.luo_product),
                slack(p.optimal_product),
                slack(p.sharp_product),
            ]);
        }
    }
    Ok(out)
}

/// Per-bound slack summaries over `n` random instances, independent of thread count.
pub fn sample_summaries(args: &SampleArgs) -> Result<[SlackSummary; 6], CliError> {
    if args.dim < 2 {
        return Err(CliError::Usage("dim must be at least 2".into()));
    }
    let rank = args.rank.unwrap_or(args.dim);
    if rank == 0 || rank > args.dim {
        return Err(CliError::Usage(format!(
            "rank must lie in 1..={}",
            args.dim
        )));
    }
    check_s_list(&args.s)?;
    let per_instance: Vec<Vec<[f64; 6]>> = (0..args.n as u64)
        .into_par_iter()
        .map(|i| {
            let rho = random_density(args.dim, rank, derive_seed(args.seed, 3 * i))
                .map_err(|e| CliError::Usage(e.to_string()))?;
            instance_slacks(
                &rho,
                &args.s,
                args.dim,
                [
                    derive_seed(args.seed, 3 * i + 1),
                    derive_seed(args.seed, 3 * i + 2),
                ],
            )
        })
        .collect::<Result<_, _>>()?;

    let mut summaries = [SlackSummary::new(); 6];
    for rows in &per_instance {
        for row in rows {
            for (summary, &slack) in summaries.iter_mut().zip(row) {
                summary.push(slack);
            }
        }
    }
    Ok(summaries)
}

pub fn sample(args: &SampleArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let summaries = sample_summaries(args)?;
    writeln!(
        out,
        "dim={} n={} rank={} s={:?} seed={}",
        args.dim,
        args.n,
        args.rank.unwrap_or(args.dim),
        args.s,
        args.seed
    )?;
    writeln!(
        out,
        "{:<16} {:>16} {:>16}",
        "bound", "min_slack", "max_abs_slack"
    )?;
    let mut violated = false;
    for (name, s) in SAMPLE_BOUNDS.iter().zip(&summaries) {
        let flag = if s.min < -VIOLATION_TOL {
            violated = true;
            "  VIOLATION"
        } else {
            ""
        };
        writeln!(
            out,
            "{:<16} {:>16.6e} {:>16.6e}{}",
            name, s.min, s.max_abs, flag
        )?;
    }
    Ok(if violated {
        Outcome::Violation
    } else {
        Outcome::Ok
    })
}

#[derive(Debug, Clone, Args)]
pub struct WitnessArgs {
    /// Take ρ from an instance file.
    #[arg(long, conflicts_with_all = ["dim", "seed"])]
    pub instance: Option<PathBuf>,
    /// Draw a random full-rank ρ of this dimension.
    #[arg(long, required_unless_present = "instance")]
    pub dim: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "s", value_delimiter = ',', default_values_t = DEFAULT_S)]
    pub s: Vec<f64>,
}

/// Slack of the witness at one exponent, with and without an inflated coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessRow {
    pub s: f64,
    pub variance: f64,
    pub sharp_bound: f64,
    pub slack: f64,
    pub inflated_slack: f64,
}

impl WitnessRow {
    pub fn certified(&self) -> bool {
        self.slack.abs() <= VIOLATION_TOL && self.inflated_slack < 0.0
    }
}

pub fn witness_rows(rho: &DensityMatrix, s_list: &[f64]) -> Result<Vec<WitnessRow>, BoundError> {
    let w = tight_witness(rho)?;
    s_list
        .iter()
        .map(|&s| {
            let r = single_bound_report(rho, &w, s)?;
            Ok(WitnessRow {
                s,
                variance: r.variance,
                sharp_bound: r.sharp_bound,
                slack: r.slack,
                inflated_slack: r.variance
                    - r.classical_variance
                    - (1.0 + WITNESS_INFLATION) * r.optimal_bound,
            })
        })
        .collect()
}

pub fn witness(args: &WitnessArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    check_s_list(&args.s)?;
    let rho = match (&args.instance, args.dim) {
        (Some(path), _) => instance::load(path)?.rho,
        (None, Some(dim)) => {
            if dim < 2 {
                return Err(CliError::Usage("dim must be at least 2".into()));
            }
            random_density(dim, dim, args.seed.unwrap_or(0))
                .map_err(|e| CliError::Usage(e.to_string()))?
        }
        (None, None) => {
            return Err(CliError::Usage(
                "either --instance or --dim is required".into(),
            ))
        }
    };
    if is_maximally_mixed(&rho) {
        writeln!(
            out,
            "state is maximally mixed: the quantum term is zero by convention and the bound reduces to V = V^cl for every observable; no witness exists"
        )?;
        return Ok(Outcome::MaximallyMixed);
    }
    let w = tight_witness(&rho).map_err(bound_err)?;
    let rows = witness_rows(&rho, &args.s).map_err(bound_err)?;
    let doc = InstanceFile {
        dim: rho.dim(),
        rho: encode(rho.matrix()),
        observables: [("witness".to_string(), encode(w.matrix()))]
            .into_iter()
            .collect(),
        s_values: Some(args.s.clone()),
    };
    writeln!(out, "{}", doc.to_json())?;
    writeln!(
        out,
        "{:>6} {:>16} {:>16} {:>16} {:>16}",
        "s", "variance", "sharp_bound", "slack", "inflated_slack"
    )?;
    for r in &rows {
        writeln!(
            out,
            "{:>6} {:>16.9e} {:>16.9e} {:>16.6e} {:>16.6e}",
            r.s, r.variance, r.sharp_bound, r.slack, r.inflated_slack
        )?;
    }
    Ok(if rows.iter().all(WitnessRow::certified) {
        Outcome::Ok
    } else {
        Outcome::Violation
    })
}

#[derive(Debug, Clone, Args)]
pub struct LemmaScanArgs {
    #[arg(long = "m")]
    pub m: f64,
    #[arg(long = "M")]
    pub big_m: f64,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long = "s", value_delimiter = ',', default_values_t = [0.5, 0.75, 1.0, 2.0])]
    pub s: Vec<f64>,
}

/// Relative margin allowed between the grid maximum and F(M, m).
pub const LEMMA_REL_TOL: f64 = 1e-12;

pub fn lemma_scan_cmd(args: &LemmaScanArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    check_s_list(&args.s)?;
    if args.grid < 2 {
        return Err(CliError::Usage("grid must be at least 2".into()));
    }
    let scans = args
        .s
        .iter()
        .map(|&s| lemma_scan(args.m, args.big_m, args.grid, s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    writeln!(
        out,
        "{:>6} {:>20} {:>20} {:>20} {:>6}",
        "s", "grid_max", "corner F(M,m)", "argmax (x, y)", "holds"
    )?;
    let mut all_hold = true;
    for scan in &scans {
        let holds = scan.holds(LEMMA_REL_TOL);
        all_hold &= holds;
        writeln!(
            out,
            "{:>6} {:>20.12e} {:>20.12e} {:>20} {:>6}",
            scan.s,
            scan.grid_max,
            scan.corner_value,
            format!("({:.6}, {:.6})", scan.argmax.0, scan.argmax.1),
            holds
        )?;
    }
    Ok(if all_hold {
        Outcome::Ok
    } else {
        Outcome::Violation
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(4.0 / 9.0, 12), "0.444444444444");
        assert_eq!(fmt_sig(1.0, 12), "1.00000000000");
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(0.03812730561195774, 12), "0.0381273056120");
        assert_eq!(fmt_sig(123.456, 5), "123.46");
    }

    #[test]
    fn purity_grid_hits_endpoints() {
        let g = purity_grid(0.5, 1.0, 101);
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[100], 1.0);
        assert!((g[50] - 0.75).abs() < 1e-15);
        assert_eq!(purity_grid(0.7, 0.7, 1), vec![0.7]);
    }
}
