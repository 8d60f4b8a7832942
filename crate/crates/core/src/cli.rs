//! Command-line front end: reproducible experiment runs with JSON/CSV
//! output. Identical flags (including seed, with --threads 1) produce
//! byte-identical output files.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use crate::analysis::{
    cube_frequency, discrepancy, frequency_table, weyl_sum, DiscrepancyMode, DiscrepancyReport,
    FrequencyReport, GridBox, SweepRow,
};
use crate::error::{Error, Result};
use crate::functions::{transform_affine, Collection, IntMatrix, IntPolynomial};
use crate::mring::RingSpec;
use crate::pointset::{
    enumerate_points, pcg_stream, EnumerationLimits, EnumerationMode, EnumerationPlan, Point,
    SuffixCondition,
};
use crate::report::{csv_field, f64_csv};
use crate::witness::{apply_operator, scan_admissible, scan_window_condition, verify_hit, WitnessParams};

#[derive(Parser, Debug)]
#[command(
    name = "polycong",
    version,
    about = "Polynomial congruential generators over base-m rings: streams, \
             cube frequencies, Weyl sums, discrepancy, witness scans"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit the forward generator stream x0, f(x0), f(f(x0)), ... as unit
    /// points
    Gen(GenArgs),
    /// Enumerate the residue domain and emit the evaluated points
    Points(PointsArgs),
    /// Hit frequency of one cube, or of every cube at resolution k
    Cubefreq(CubefreqArgs),
    /// Normalized Weyl exponential sum for a frequency vector h
    Weyl(WeylArgs),
    /// Discrepancy of the realized point set
    Disc(DiscArgs),
    /// Convergence sweep: one exact row per digit count n
    Sweep(SweepArgs),
    /// Scan for admissible witnesses and verify the steering construction
    Witness(WitnessArgs),
    /// Apply an integer matrix and shift to a collection
    Transform(TransformArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ThreadArgs {
    /// Worker threads for enumeration
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Args, Debug)]
pub struct LimitArgs {
    /// Exhaustive domains above this size emit a warning
    #[arg(long, default_value_t = 1u128 << 26)]
    pub warn_points: u128,
    /// Exhaustive domains above this size are refused
    #[arg(long, default_value_t = 1u128 << 30)]
    pub max_points: u128,
    /// Cap on dense cell tables (frequency histograms, grid prefix tables)
    #[arg(long, default_value_t = 1u128 << 24)]
    pub max_cells: u128,
}

impl LimitArgs {
    fn limits(&self) -> EnumerationLimits {
        EnumerationLimits { soft: self.warn_points, hard: self.max_points }
    }
}

#[derive(Args, Debug)]
pub struct ModeArgs {
    /// "exhaustive" or "sample:count:seed"
    #[arg(long, default_value = "exhaustive")]
    pub mode: String,
    /// Suffix condition "d:beta": keep residues with x mod m^d = beta
    #[arg(long)]
    pub suffix: Option<String>,
}

impl ModeArgs {
    fn mode(&self) -> Result<EnumerationMode> {
        EnumerationMode::parse(&self.mode)
    }

    fn suffix(&self) -> Result<Option<SuffixCondition>> {
        self.suffix.as_deref().map(SuffixCondition::parse).transpose()
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: usize,
    /// Generator polynomial, comma-separated coefficients lowest first
    #[arg(long)]
    pub poly: String,
    /// Start state (decimal, reduced mod m^n)
    #[arg(long, default_value = "0")]
    pub x0: String,
    #[arg(long)]
    pub count: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PointsArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: usize,
    /// "monomials:s" | "iterations:`<poly>`:s" | "derivative:s" | "p1;p2;..."
    #[arg(long)]
    pub collection: String,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[command(flatten)]
    pub limits: LimitArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CubefreqArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub collection: String,
    /// Cube resolution
    #[arg(long)]
    pub k: usize,
    /// One cube corner "a1,a2,..."; mutually exclusive with --all
    #[arg(long("box"), conflicts_with = "all")]
    pub corner: Option<String>,
    /// Report every cube at resolution k
    #[arg(long)]
    pub all: bool,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[command(flatten)]
    pub limits: LimitArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct WeylArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub collection: String,
    /// Frequency vector "h1,h2,..."
    #[arg(long)]
    pub h: String,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[command(flatten)]
    pub limits: LimitArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct DiscArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub collection: String,
    /// "grid:k" or "exact"
    #[arg(long)]
    pub disc: String,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[command(flatten)]
    pub limits: LimitArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub m: u64,
    /// Digit-count range "lo:hi", both ends included
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub collection: String,
    #[arg(long)]
    pub k: usize,
    /// Suffix condition "d:beta"
    #[arg(long)]
    pub suffix: Option<String>,
    #[command(flatten)]
    pub limits: LimitArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[arg(long)]
    pub m: u64,
    /// Point dimension s (powers y, y^2, ..., y^s)
    #[arg(long)]
    pub s: usize,
    /// Window size K
    #[arg(long = "K")]
    pub big_k: usize,
    /// Search horizon N
    #[arg(long = "N")]
    pub horizon: usize,
    /// Ring digit count n (n >= 2N)
    #[arg(long)]
    pub n: usize,
    /// Admissible-z transcripts to include in the report
    #[arg(long, default_value_t = 3)]
    pub samples: usize,
    /// Also report the window-condition fraction for horizons "lo:hi"
    #[arg(long)]
    pub scan_horizon: Option<String>,
    #[command(flatten)]
    pub limits: LimitArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(long)]
    pub collection: String,
    /// Square integer matrix "a,b;c,d"
    #[arg(long)]
    pub matrix: String,
    /// Constant shift vector "z1,z2,..." (default all zeros)
    #[arg(long)]
    pub shift: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

// ---- report envelopes ----

#[derive(Debug, Serialize, Deserialize)]
pub struct StreamRow {
    pub index: u64,
    pub numerator: String,
    pub exact: String,
    pub float: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GenReport {
    pub spec: String,
    pub poly: String,
    pub rows: Vec<StreamRow>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CoordCell {
    pub exact: String,
    pub float: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PointRow {
    pub x: String,
    pub coords: Vec<CoordCell>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PointsReport {
    pub spec: String,
    pub collection: String,
    pub rows: Vec<PointRow>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FrequencyTableReport {
    pub spec: String,
    pub k: usize,
    pub total: u64,
    pub reports: Vec<FrequencyReport>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub m: u64,
    pub collection: String,
    pub k: usize,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WitnessTranscript {
    pub z: String,
    pub window: usize,
    pub b: Vec<String>,
    pub c: Vec<String>,
    pub y: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HorizonRow {
    pub horizon: usize,
    pub passing: u64,
    pub total: u64,
    pub fraction_float: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WitnessReport {
    pub spec: String,
    pub s: usize,
    pub big_k: usize,
    pub horizon: usize,
    pub admissible: u64,
    pub domain: String,
    pub admissible_fraction_float: f64,
    pub hit_checks: u64,
    pub hit_passes: u64,
    pub pass_rate_float: f64,
    pub transcripts: Vec<WitnessTranscript>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_scan: Option<Vec<HorizonRow>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TransformReport {
    pub entries: Vec<String>,
}

// ---- dispatch ----

pub fn run(cli: Cli) -> Result<()> {
    let (text, out_path) = match cli.command {
        Command::Gen(a) => {
            let path = a.out.output.clone();
            (run_gen(a)?, path)
        }
        Command::Points(a) => {
            let path = a.out.output.clone();
            (run_points(a)?, path)
        }
        Command::Cubefreq(a) => {
            let path = a.out.output.clone();
            (run_cubefreq(a)?, path)
        }
        Command::Weyl(a) => {
            let path = a.out.output.clone();
            (run_weyl(a)?, path)
        }
        Command::Disc(a) => {
            let path = a.out.output.clone();
            (run_disc(a)?, path)
        }
        Command::Sweep(a) => {
            let path = a.out.output.clone();
            (run_sweep(a)?, path)
        }
        Command::Witness(a) => {
            let path = a.out.output.clone();
            (run_witness(a)?, path)
        }
        Command::Transform(a) => {
            let path = a.out.output.clone();
            (run_transform(a)?, path)
        }
    };
    match out_path {
        Some(path) => std::fs::write(&path, text.as_bytes())
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::Usage(format!("cannot write stdout: {e}")))?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Usage(format!("serialization failed: {e}")))
}

fn csv_lines(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push_str("\r\n");
    for row in rows {
        out.push_str(&row);
        out.push_str("\r\n");
    }
    out
}

fn warn_if_oversize(plan: &EnumerationPlan) {
    if plan.oversize_warning() {
        eprintln!(
            "warning: exhaustive domain holds {} points; this may take a while",
            plan.total_points()
        );
    }
}

/// Emit the oversize warning for commands whose plan is built further down.
fn warn_for(
    spec: RingSpec,
    cond: Option<SuffixCondition>,
    mode: EnumerationMode,
    limits: EnumerationLimits,
) -> Result<()> {
    let plan = EnumerationPlan::new(spec, cond, mode, limits)?;
    warn_if_oversize(&plan);
    Ok(())
}

fn parse_biguint(text: &str) -> Result<BigUint> {
    BigUint::from_str(text.trim()).map_err(|_| Error::Parse(format!("bad integer {text:?}")))
}

fn parse_range(text: &str) -> Result<(usize, usize)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("range wants lo:hi, got {text:?}")))?;
    let lo = lo.trim().parse().map_err(|_| Error::Parse(format!("bad range start {lo:?}")))?;
    let hi = hi.trim().parse().map_err(|_| Error::Parse(format!("bad range end {hi:?}")))?;
    Ok((lo, hi))
}

fn parse_corner(text: &str) -> Result<Vec<u128>> {
    text.split(',')
        .map(|t| t.trim().parse::<u128>().map_err(|_| Error::Parse(format!("bad corner {t:?}"))))
        .collect()
}

fn parse_bigints(text: &str) -> Result<Vec<BigInt>> {
    text.split(',')
        .map(|t| {
            BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("bad integer {t:?}")))
        })
        .collect()
}

fn run_gen(a: GenArgs) -> Result<String> {
    let spec = RingSpec::new(a.m, a.n)?;
    let poly: IntPolynomial = a.poly.parse()?;
    let x0 = spec.reduce_biguint(&parse_biguint(&a.x0)?);
    let rows: Vec<StreamRow> = pcg_stream(&poly, x0, a.count)
        .enumerate()
        .map(|(i, u)| StreamRow {
            index: i as u64,
            numerator: u.numerator().to_string(),
            exact: u.exact_string(),
            float: u.to_f64(),
        })
        .collect();
    let report = GenReport { spec: spec.to_string(), poly: poly.to_string(), rows };
    match a.out.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => Ok(csv_lines(
            "index,numerator,exact,float",
            report.rows.iter().map(|r| {
                format!(
                    "{},{},{},{}",
                    r.index,
                    csv_field(&r.numerator),
                    csv_field(&r.exact),
                    f64_csv(r.float)
                )
            }),
        )),
    }
}

fn run_points(a: PointsArgs) -> Result<String> {
    let spec = RingSpec::new(a.m, a.n)?;
    let collection: Collection = a.collection.parse()?;
    let plan = EnumerationPlan::new(spec, a.mode.suffix()?, a.mode.mode()?, a.limits.limits())?;
    warn_if_oversize(&plan);
    let rows: Vec<PointRow> = enumerate_points(&plan, &collection)
        .map(|(x, p)| PointRow {
            x: x.to_biguint().to_string(),
            coords: p
                .to_unit_points()
                .iter()
                .map(|u| CoordCell { exact: u.exact_string(), float: u.to_f64() })
                .collect(),
        })
        .collect();
    let report =
        PointsReport { spec: spec.to_string(), collection: collection.to_string(), rows };
    match a.out.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => {
            let s = collection.dim();
            let mut header = String::from("x");
            for i in 1..=s {
                header.push_str(&format!(",coord_{i},coord_{i}_float"));
            }
            Ok(csv_lines(
                &header,
                report.rows.iter().map(|r| {
                    let mut line = csv_field(&r.x);
                    for cell in &r.coords {
                        line.push(',');
                        line.push_str(&csv_field(&cell.exact));
                        line.push(',');
                        line.push_str(&f64_csv(cell.float));
                    }
                    line
                }),
            ))
        }
    }
}

fn freq_csv(rows: &[FrequencyReport]) -> String {
    csv_lines(
        "k,corner,hits,total,frequency,frequency_float,target,deviation,deviation_float",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{},{},{}",
                r.cube.k(),
                csv_field(
                    &r.cube
                        .corner()
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
                r.hits,
                r.total,
                csv_field(&crate::report::ratio_to_string(&r.frequency)),
                f64_csv(r.frequency_float),
                csv_field(&crate::report::ratio_to_string(&r.target)),
                csv_field(&crate::report::ratio_to_string(&r.deviation)),
                f64_csv(r.deviation_float),
            )
        }),
    )
}

fn run_cubefreq(a: CubefreqArgs) -> Result<String> {
    let spec = RingSpec::new(a.m, a.n)?;
    let collection: Collection = a.collection.parse()?;
    let cond = a.mode.suffix()?;
    let mode = a.mode.mode()?;
    warn_for(spec, cond.clone(), mode, a.limits.limits())?;
    if a.all {
        let table = frequency_table(
            spec,
            &collection,
            a.k,
            cond,
            mode,
            a.limits.limits(),
            a.limits.max_cells,
            a.threads.threads,
        )?;
        let reports: Vec<FrequencyReport> = table.reports().collect();
        let envelope = FrequencyTableReport {
            spec: spec.to_string(),
            k: a.k,
            total: table.total(),
            reports,
        };
        match a.out.format {
            OutputFormat::Json => to_json(&envelope),
            OutputFormat::Csv => Ok(freq_csv(&envelope.reports)),
        }
    } else {
        let corner = a
            .corner
            .as_deref()
            .ok_or_else(|| Error::Usage("pass --box a1,a2,... or --all".into()))?;
        let bx = GridBox::new(a.k, parse_corner(corner)?, a.m)?;
        let report = cube_frequency(
            spec,
            &collection,
            &bx,
            cond,
            mode,
            a.limits.limits(),
            a.threads.threads,
        )?;
        match a.out.format {
            OutputFormat::Json => to_json(&report),
            OutputFormat::Csv => Ok(freq_csv(std::slice::from_ref(&report))),
        }
    }
}

fn run_weyl(a: WeylArgs) -> Result<String> {
    let spec = RingSpec::new(a.m, a.n)?;
    let collection: Collection = a.collection.parse()?;
    let h = parse_bigints(&a.h)?;
    warn_for(spec, a.mode.suffix()?, a.mode.mode()?, a.limits.limits())?;
    let report = weyl_sum(
        spec,
        &collection,
        &h,
        a.mode.suffix()?,
        a.mode.mode()?,
        a.limits.limits(),
        a.threads.threads,
    )?;
    match a.out.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => Ok(csv_lines(
            "h,re,im,magnitude,points,error_budget",
            std::iter::once(format!(
                "{},{},{},{},{},{}",
                csv_field(
                    &report.h.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
                ),
                f64_csv(report.re),
                f64_csv(report.im),
                f64_csv(report.magnitude),
                report.points,
                f64_csv(report.error_budget),
            )),
        )),
    }
}

fn disc_csv(r: &DiscrepancyReport) -> String {
    let mode = match r.mode {
        DiscrepancyMode::Grid { k } => format!("grid:{k}"),
        DiscrepancyMode::Exact => "exact".into(),
    };
    let join = |v: &[num_rational::BigRational]| {
        v.iter().map(crate::report::ratio_to_string).collect::<Vec<_>>().join(" ")
    };
    csv_lines(
        "mode,value,value_float,witness_lo,witness_hi,points",
        std::iter::once(format!(
            "{},{},{},{},{},{}",
            mode,
            csv_field(&crate::report::ratio_to_string(&r.value)),
            f64_csv(r.value_float),
            csv_field(&join(&r.witness_lo)),
            csv_field(&join(&r.witness_hi)),
            r.points,
        )),
    )
}

fn run_disc(a: DiscArgs) -> Result<String> {
    let spec = RingSpec::new(a.m, a.n)?;
    let collection: Collection = a.collection.parse()?;
    let cond = a.mode.suffix()?;
    let mode = a.mode.mode()?;
    let disc_mode = parse_disc_mode(&a.disc)?;
    let report = match disc_mode {
        DiscrepancyMode::Grid { k } => {
            // stream the cell histogram; no need to materialize the points
            warn_for(spec, cond.clone(), mode, a.limits.limits())?;
            let table = frequency_table(
                spec,
                &collection,
                k,
                cond,
                mode,
                a.limits.limits(),
                a.limits.max_cells,
                a.threads.threads,
            )?;
            crate::analysis::grid_report_from_table(&table)?
        }
        DiscrepancyMode::Exact => {
            let plan = EnumerationPlan::new(spec, cond, mode, a.limits.limits())?;
            if plan.total_points() > 10_000 {
                return Err(Error::Capacity(format!(
                    "exact-mode discrepancy supports at most 10^4 points, the plan holds {}",
                    plan.total_points()
                )));
            }
            let points: Vec<Point> =
                enumerate_points(&plan, &collection).map(|(_, p)| p).collect();
            discrepancy(&points, DiscrepancyMode::Exact, a.limits.max_cells)?
        }
    };
    match a.out.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => Ok(disc_csv(&report)),
    }
}

fn parse_disc_mode(text: &str) -> Result<DiscrepancyMode> {
    let text = text.trim();
    if text == "exact" {
        return Ok(DiscrepancyMode::Exact);
    }
    if let Some(k) = text.strip_prefix("grid:") {
        let k = k.trim().parse().map_err(|_| Error::Parse(format!("bad grid resolution {k:?}")))?;
        return Ok(DiscrepancyMode::Grid { k });
    }
    Err(Error::Parse(format!("discrepancy mode wants grid:k or exact, got {text:?}")))
}

fn run_sweep(a: SweepArgs) -> Result<String> {
    let (n_lo, n_hi) = parse_range(&a.n)?;
    let collection: Collection = a.collection.parse()?;
    let cond = a.suffix.as_deref().map(SuffixCondition::parse).transpose()?;
    if let Ok(spec_hi) = RingSpec::new(a.m, n_hi) {
        warn_for(spec_hi, cond.clone(), EnumerationMode::Exhaustive, a.limits.limits())?;
    }
    let rows = crate::analysis::convergence_sweep(
        a.m,
        n_lo,
        n_hi,
        &collection,
        a.k,
        cond,
        a.limits.limits(),
        a.limits.max_cells,
        a.threads.threads,
    )?;
    let report =
        SweepReport { m: a.m, collection: collection.to_string(), k: a.k, rows };
    match a.out.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => Ok(csv_lines(
            "n,max_dev,max_dev_float,disc,disc_float",
            report.rows.iter().map(|r| {
                format!(
                    "{},{},{},{},{}",
                    r.n,
                    csv_field(&crate::report::ratio_to_string(&r.max_deviation)),
                    f64_csv(r.max_deviation_float),
                    csv_field(&crate::report::ratio_to_string(&r.grid_discrepancy)),
                    f64_csv(r.grid_discrepancy_float),
                )
            }),
        )),
    }
}

fn enumerate_targets(m_pow_k: u128, s: usize) -> impl Iterator<Item = Vec<u128>> {
    let total = m_pow_k.pow(s as u32);
    (0..total).map(move |mut idx| {
        let mut b = vec![0u128; s];
        for v in b.iter_mut() {
            *v = idx % m_pow_k;
            idx /= m_pow_k;
        }
        b
    })
}

fn run_witness(a: WitnessArgs) -> Result<String> {
    let params = WitnessParams::new(a.m, a.s, a.big_k, a.horizon, a.n)?;
    let admissible = scan_admissible(&params, a.limits.limits(), a.threads.threads)?;
    let domain = params.ring().modulus();
    let mut m_pow_k: u128 = 1;
    for _ in 0..a.big_k {
        m_pow_k *= a.m as u128;
    }

    let mut checks = 0u64;
    let mut passes = 0u64;
    let mut transcripts = Vec::new();
    for (zi, adm) in admissible.iter().enumerate() {
        for b in enumerate_targets(m_pow_k, a.s) {
            let (c, y) = apply_operator(adm, &b, &params)?;
            checks += 1;
            if verify_hit(&y, &b, &params)? {
                passes += 1;
            }
            if zi < a.samples && transcripts.len() < a.samples * 16 {
                transcripts.push(WitnessTranscript {
                    z: adm.z.to_biguint().to_string(),
                    window: adm.window,
                    b: b.iter().map(|v| v.to_string()).collect(),
                    c: c.iter().map(|v| v.to_string()).collect(),
                    y: y.to_biguint().to_string(),
                });
            }
        }
    }

    let horizon_scan = match a.scan_horizon.as_deref() {
        Some(range) => {
            let (lo, hi) = parse_range(range)?;
            let mut rows = Vec::new();
            for h in lo..=hi {
                let (passing, total) =
                    scan_window_condition(a.m, a.s, a.big_k, h, a.limits.limits(), a.threads.threads)?;
                rows.push(HorizonRow {
                    horizon: h,
                    passing,
                    total,
                    fraction_float: passing as f64 / total as f64,
                });
            }
            Some(rows)
        }
        None => None,
    };

    let admissible_fraction_float = admissible.len() as f64 / domain.to_f64().unwrap_or(f64::NAN);
    let report = WitnessReport {
        spec: params.ring().to_string(),
        s: a.s,
        big_k: a.big_k,
        horizon: a.horizon,
        admissible: admissible.len() as u64,
        domain: domain.to_string(),
        admissible_fraction_float,
        hit_checks: checks,
        hit_passes: passes,
        pass_rate_float: if checks == 0 { 1.0 } else { passes as f64 / checks as f64 },
        transcripts,
        horizon_scan,
    };
    match a.out.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => Ok(csv_lines(
            "z,window,b,c,y",
            report.transcripts.iter().map(|t| {
                format!(
                    "{},{},{},{},{}",
                    csv_field(&t.z),
                    t.window,
                    csv_field(&t.b.join(" ")),
                    csv_field(&t.c.join(" ")),
                    csv_field(&t.y),
                )
            }),
        )),
    }
}

fn run_transform(a: TransformArgs) -> Result<String> {
    let collection: Collection = a.collection.parse()?;
    let matrix: IntMatrix = a.matrix.parse()?;
    let shift = match a.shift.as_deref() {
        Some(text) => parse_bigints(text)?,
        None => vec![BigInt::from(0); collection.dim()],
    };
    let transformed = transform_affine(&matrix, &shift, &collection)?;
    let report = TransformReport {
        entries: transformed.to_polynomials().iter().map(|p| p.to_string()).collect(),
    };
    match a.out.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => Ok(csv_lines(
            "entry",
            report.entries.iter().map(|e| csv_field(e)),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn disc_mode_parsing() {
        assert_eq!(parse_disc_mode("exact").unwrap(), DiscrepancyMode::Exact);
        assert_eq!(parse_disc_mode("grid:3").unwrap(), DiscrepancyMode::Grid { k: 3 });
        assert!(parse_disc_mode("grid:x").is_err());
        assert!(parse_disc_mode("nope").is_err());
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("8:20").unwrap(), (8, 20));
        assert!(parse_range("8").is_err());
        assert!(parse_range("a:b").is_err());
    }

    #[test]
    fn target_enumeration_covers_the_cube() {
        let all: Vec<Vec<u128>> = enumerate_targets(3, 2).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![1, 0]);
        assert_eq!(all[8], vec![2, 2]);
    }
}
