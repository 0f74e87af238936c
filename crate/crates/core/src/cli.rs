//! Command-line front end. Every subcommand prints one JSON document, a CSV
//! table or a markdown report; exact values always travel with decimals.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::fujita_driver::{self, DriverContext, DriverError, SweepTable, DEFAULT_P_LIST};
use crate::multiplier_rees::{self, growth_constant, growth_onset, w_endpoints, ReesDatum, ReesError, Thresholds};
use crate::ns_lattice::{DiagCoords, NsClass};
use crate::polygon::Point;
use crate::scalar::{parse_rat, rat_int, rat_to_string, QuadNum, Rat};
use crate::toric_bundle::{
    canonical_class, nef_box_refined, BundleDivisor, BundleError, BundleSpec, Region, DEFAULT_SEGMENTS,
};
use crate::volume_engine::{
    self, h0_bundle, lattice_volume_estimate, pos_intersection_with, Derivative, DerivativeOptions, VolumeError,
    VolumeResult,
};

pub const DEFAULT_PRECISION: usize = 12;
pub const DEFAULT_PRESET: &str = "nakayama-6.5";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<VolumeError> for CliError {
    fn from(e: VolumeError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<BundleError> for CliError {
    fn from(e: BundleError) -> Self {
        match e {
            BundleError::UnknownPreset(_) => CliError::Usage(e.to_string()),
            BundleError::EmptyRegion => CliError::Domain(e.to_string()),
        }
    }
}

impl From<ReesError> for CliError {
    fn from(e: ReesError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<DriverError> for CliError {
    fn from(e: DriverError) -> Self {
        match e {
            DriverError::EmptyPList => CliError::Usage(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Parser, Debug)]
#[command(
    name = "bigdiv",
    version,
    about = "Exact volume and Fujita-approximation computations on P²-bundles over E×E"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct GlobalOpts {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Built-in bundle: nakayama-6.5, trivial-ample or conic-demo.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Explicit L₀ as x,y,z (all three of --l0/--l1/--l2 are required).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub l0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub l1: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub l2: Option<String>,
    #[arg(long, global = true)]
    pub g0: Option<u64>,
    #[arg(long, global = true)]
    pub g1: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Fractional digits of decimal renderings.
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Nef and ample tests for a class x·f₁ + y·f₂ + z·δ.
    Nef {
        #[arg(long, allow_hyphen_values = true)]
        class: String,
    },
    /// Diagonal coordinates (a, b, c) of a class.
    Diag {
        #[arg(long, allow_hyphen_values = true)]
        class: String,
    },
    /// The fibrewise nef region of a divisor.
    Box(DivisorArgs),
    /// Volume of a divisor.
    Volume(DivisorArgs),
    /// Section count h⁰(m·divisor) by the lattice sum.
    H0 {
        #[command(flatten)]
        div: DivisorArgs,
        #[arg(long)]
        m: u64,
    },
    /// Positive intersection ⟨L³⟩·D.
    Posint {
        #[command(flatten)]
        div: DivisorArgs,
        /// Direction D: a name or x,y,z:c.
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        #[command(flatten)]
        step: StepArgs,
    },
    /// First Riemann–Roch coefficient ⟨L³⟩·K_X.
    R1 {
        #[command(flatten)]
        div: DivisorArgs,
        #[command(flatten)]
        step: StepArgs,
    },
    /// Generators, Newton polygon and side data of the monomial ideal J_p.
    MultIdeal {
        #[arg(long)]
        p: u64,
        /// Print at most this many generators (0 prints all).
        #[arg(long, default_value_t = 50)]
        limit: usize,
    },
    /// Rees valuation data of the Newton polygon sides of J_p.
    Rees {
        #[arg(long)]
        p: u64,
    },
    /// Fujita approximant certificates over a list of p.
    FujitaSweep {
        /// Comma-separated p values.
        #[arg(long)]
        p_list: Option<String>,
    },
    /// Markdown summary of a preset.
    Report {
        #[arg(long)]
        p_list: Option<String>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct DivisorArgs {
    /// Divisor as a name or x,y,z:c for π*(x·f₁+y·f₂+z·δ) + c·H; defaults
    /// to the tautological class.
    #[arg(long, allow_hyphen_values = true)]
    pub divisor: Option<String>,
    /// Boundary segments for curved regions.
    #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
    pub segments: usize,
}

#[derive(Args, Debug, Clone)]
pub struct StepArgs {
    /// Initial derivative step.
    #[arg(long, default_value = "1/64")]
    pub step: String,
    /// Times the step is divided by 16 before falling back.
    #[arg(long, default_value_t = 0)]
    pub shrink: usize,
}

/// Settings read from `--config`.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub preset: Option<String>,
    pub l0: Option<String>,
    pub l1: Option<String>,
    pub l2: Option<String>,
    pub g0: Option<u64>,
    pub g1: Option<u64>,
    pub precision: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub p_list: Option<Vec<u64>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

/// Effective settings: flags, then the config file, then built-ins.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub spec: BundleSpec,
    pub g0: u64,
    pub g1: u64,
    pub precision: usize,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub p_list: Option<Vec<u64>>,
}

fn parse_class(s: &str) -> Result<NsClass, CliError> {
    NsClass::parse_triple(s)
        .map_err(|_| CliError::Usage(format!("expected a class x,y,z with rational entries, got `{s}`")))
}

impl RunConfig {
    pub fn resolve(flags: &GlobalOpts) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let pick = |f: &Option<String>, c: &Option<String>| f.clone().or_else(|| c.clone());
        let (l0, l1, l2) = (
            pick(&flags.l0, &file.l0),
            pick(&flags.l1, &file.l1),
            pick(&flags.l2, &file.l2),
        );
        let flag_triples = flags.l0.is_some() || flags.l1.is_some() || flags.l2.is_some();
        let preset = if flags.preset.is_some() {
            flags.preset.clone()
        } else if flag_triples {
            None
        } else {
            file.preset.clone()
        };
        let (preset, spec) = match (preset, l0, l1, l2) {
            (Some(name), _, _, _) => {
                let spec = BundleSpec::preset(&name)?;
                (Some(name), spec)
            }
            (None, Some(a), Some(b), Some(c)) => (
                None,
                BundleSpec::new(parse_class(&a)?, parse_class(&b)?, parse_class(&c)?),
            ),
            (None, None, None, None) => (Some(DEFAULT_PRESET.to_string()), BundleSpec::nakayama()),
            _ => return Err(CliError::Usage("--l0, --l1 and --l2 must be given together".into())),
        };
        Ok(RunConfig {
            preset,
            spec,
            g0: flags.g0.or(file.g0).unwrap_or(1),
            g1: flags.g1.or(file.g1).unwrap_or(1),
            precision: flags.precision.or(file.precision).unwrap_or(DEFAULT_PRECISION),
            format: flags.format.or(file.format),
            out: flags.out.clone().or(file.out),
            threads: flags.threads.or(file.threads),
            p_list: file.p_list,
        })
    }

    fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(CliError::Usage(format!(
                "format {f:?} is not available for this subcommand"
            )))
        }
    }
}

/// A divisor given by name (`tautological`, `canonical`, `hyperplane`, `f1`,
/// `f2`, `delta`) or as `x,y,z:c`.
pub fn parse_divisor(spec: &BundleSpec, s: &str) -> Result<BundleDivisor, CliError> {
    let named = match s {
        "tautological" => Some(spec.tautological()),
        "canonical" => Some(canonical_class(spec)),
        "hyperplane" => Some(BundleDivisor::hyperplane()),
        "f1" => Some(BundleDivisor::pullback(NsClass::f1())),
        "f2" => Some(BundleDivisor::pullback(NsClass::f2())),
        "delta" => Some(BundleDivisor::pullback(NsClass::delta())),
        _ => None,
    };
    if let Some(d) = named {
        return Ok(d);
    }
    let (cls, c) = s
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("expected a divisor name or x,y,z:c, got `{s}`")))?;
    let h = parse_rat(c).map_err(|_| CliError::Usage(format!("bad H coefficient `{c}`")))?;
    Ok(BundleDivisor::new(parse_class(cls)?, h))
}

pub fn parse_p_list(s: &str) -> Result<Vec<u64>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let clean = part.replace('_', "");
        let v = clean.parse::<u64>().ok().or_else(|| {
            clean
                .parse::<f64>()
                .ok()
                .filter(|f| f.fract() == 0.0 && *f >= 1.0 && *f < 1e18)
                .map(|f| f as u64)
        });
        out.push(v.ok_or_else(|| CliError::Usage(format!("bad p value `{part}`")))?);
    }
    if out.is_empty() {
        return Err(CliError::Usage("empty p list".into()));
    }
    Ok(out)
}

/// A value in exact and decimal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Num {
    pub exact: QuadNum,
    pub decimal: String,
}

impl Num {
    pub fn new(v: &QuadNum, precision: usize) -> Self {
        Num {
            exact: v.clone(),
            decimal: v.to_decimal(precision),
        }
    }

    pub fn rat(v: &Rat, precision: usize) -> Self {
        Self::new(&QuadNum::from_rat(v.clone()), precision)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NefOutput {
    pub nef: bool,
    pub ample: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagOutput {
    pub a: String,
    pub b: String,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxOutput {
    pub divisor: BundleDivisor,
    pub kind: String,
    pub vertices: Vec<[Num; 2]>,
    pub region: Region,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeOutput {
    pub divisor: BundleDivisor,
    pub kind: String,
    pub volume: VolumeResult,
    pub decimal: String,
    pub lower: Num,
    pub upper: Num,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H0Output {
    pub divisor: BundleDivisor,
    pub m: u64,
    #[serde(with = "crate::scalar::serde_rat")]
    pub h0: Rat,
    pub volume_estimate: Num,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeOutput {
    pub divisor: BundleDivisor,
    pub direction: BundleDivisor,
    pub value: Num,
    pub derivative: Derivative,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealOutput {
    pub thresholds: Thresholds,
    pub generator_count: usize,
    pub generators: Vec<(u64, u64)>,
    pub truncated: bool,
    pub polygon: Vec<(u64, u64)>,
    pub rees: Vec<ReesDatum>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReesOutput {
    pub thresholds: Thresholds,
    pub rees: Vec<ReesDatum>,
    #[serde(with = "crate::scalar::serde_rat")]
    pub w_max: Rat,
    #[serde(with = "crate::scalar::serde_rat")]
    pub w_endpoints: Rat,
    pub endpoint_bound: QuadNum,
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn point_nums(p: &Point, precision: usize) -> [Num; 2] {
    [Num::new(&p.x, precision), Num::new(&p.y, precision)]
}

fn divisor_of(cfg: &RunConfig, d: &DivisorArgs) -> Result<BundleDivisor, CliError> {
    match &d.divisor {
        Some(s) => parse_divisor(&cfg.spec, s),
        None => Ok(cfg.spec.tautological()),
    }
}

fn step_options(s: &StepArgs) -> Result<DerivativeOptions, CliError> {
    let step = parse_rat(&s.step).map_err(|_| CliError::Usage(format!("bad step `{}`", s.step)))?;
    if step <= Rat::from_integer(0.into()) {
        return Err(CliError::Usage("step must be positive".into()));
    }
    Ok(DerivativeOptions::adaptive(step, s.shrink))
}

fn rees_csv(rows: &[ReesDatum]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Domain(e.to_string());
    w.write_record(["side", "a", "b", "ord", "A", "tau", "w"]).map_err(io)?;
    for r in rows {
        w.write_record([
            r.side.to_string(),
            r.a.to_string(),
            r.b.to_string(),
            r.ord.to_string(),
            r.log_discrepancy.to_string(),
            rat_to_string(&r.tau),
            rat_to_string(&r.w),
        ])
        .map_err(io)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| CliError::Domain(e.to_string()))?)
        .map_err(|e| CliError::Domain(e.to_string()))
}

fn ideal_csv(o: &IdealOutput) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Domain(e.to_string());
    w.write_record(["kind", "index", "x", "y", "a", "b", "ord", "A", "tau", "w"])
        .map_err(io)?;
    let blank = || String::new();
    for (i, (x, y)) in o.generators.iter().enumerate() {
        let rec = [
            "generator".to_string(),
            i.to_string(),
            x.to_string(),
            y.to_string(),
            blank(),
            blank(),
            blank(),
            blank(),
            blank(),
            blank(),
        ];
        w.write_record(&rec).map_err(io)?;
    }
    for (i, (x, y)) in o.polygon.iter().enumerate() {
        let rec = [
            "vertex".to_string(),
            i.to_string(),
            x.to_string(),
            y.to_string(),
            blank(),
            blank(),
            blank(),
            blank(),
            blank(),
            blank(),
        ];
        w.write_record(&rec).map_err(io)?;
    }
    for r in &o.rees {
        let rec = [
            "side".to_string(),
            r.side.to_string(),
            blank(),
            blank(),
            r.a.to_string(),
            r.b.to_string(),
            r.ord.to_string(),
            r.log_discrepancy.to_string(),
            rat_to_string(&r.tau),
            rat_to_string(&r.w),
        ];
        w.write_record(&rec).map_err(io)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| CliError::Domain(e.to_string()))?)
        .map_err(|e| CliError::Domain(e.to_string()))
}

fn nakayama_only(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.spec == BundleSpec::nakayama() {
        Ok(())
    } else {
        Err(CliError::Usage(
            "the multiplier ideal and sweep subcommands are defined for the nakayama-6.5 bundle".into(),
        ))
    }
}

fn sweep_list(cfg: &RunConfig, flag: &Option<String>) -> Result<Vec<u64>, CliError> {
    match flag {
        Some(s) => parse_p_list(s),
        None => Ok(cfg.p_list.clone().unwrap_or_else(|| DEFAULT_P_LIST.to_vec())),
    }
}

/// Runs one parsed command; returns the text to emit and any warnings.
pub fn execute(cfg: &RunConfig, cmd: &Command) -> Result<(String, Vec<String>), CliError> {
    let prec = cfg.precision;
    let mut warnings = Vec::new();
    let text = match cmd {
        Command::Nef { class } => {
            cfg.format_or(Format::Json, &[Format::Json])?;
            let c = parse_class(class)?;
            json(&NefOutput {
                nef: c.is_nef(),
                ample: c.is_ample(),
            })
        }
        Command::Diag { class } => {
            cfg.format_or(Format::Json, &[Format::Json])?;
            let d: DiagCoords = parse_class(class)?.to_diag();
            json(&DiagOutput {
                a: rat_to_string(&d.a),
                b: d.b().to_string(),
                c: rat_to_string(&d.c),
            })
        }
        Command::Box(d) => {
            cfg.format_or(Format::Json, &[Format::Json])?;
            let div = divisor_of(cfg, d)?;
            let region = nef_box_refined(&cfg.spec, &div, d.segments)?;
            let vertices = region.inner().vertices.iter().map(|p| point_nums(p, prec)).collect();
            json(&BoxOutput {
                divisor: div,
                kind: region.kind_name().into(),
                vertices,
                region,
            })
        }
        Command::Volume(d) => {
            cfg.format_or(Format::Json, &[Format::Json])?;
            let div = divisor_of(cfg, d)?;
            let v = volume_engine::volume(&cfg.spec, &div);
            let kind = if v.is_exact() { "exact" } else { "sandwich" };
            json(&VolumeOutput {
                divisor: div,
                kind: kind.into(),
                decimal: v.estimate().to_decimal(prec),
                lower: Num::new(v.lower(), prec),
                upper: Num::new(v.upper(), prec),
                volume: v,
            })
        }
        Command::H0 { div, m } => {
            cfg.format_or(Format::Json, &[Format::Json])?;
            let dv = divisor_of(cfg, div)?;
            let h0 = h0_bundle(&cfg.spec, &dv, *m);
            let est = if *m == 0 {
                Rat::from_integer(0.into())
            } else {
                lattice_volume_estimate(&cfg.spec, &dv, *m)
            };
            json(&H0Output {
                divisor: dv,
                m: *m,
                h0,
                volume_estimate: Num::rat(&est, prec),
            })
        }
        Command::Posint { div, dir, step } => {
            cfg.format_or(Format::Json, &[Format::Json])?;
            let l = divisor_of(cfg, div)?;
            let d = parse_divisor(&cfg.spec, dir)?;
            let der = pos_intersection_with(&cfg.spec, &l, &d, &step_options(step)?)?;
            json(&DerivativeOutput {
                divisor: l,
                direction: d,
                value: Num::new(&der.value, prec),
                derivative: der,
            })
        }
        Command::R1 { div, step } => {
            cfg.format_or(Format::Json, &[Format::Json])?;
            let l = divisor_of(cfg, div)?;
            let k = canonical_class(&cfg.spec);
            let der = pos_intersection_with(&cfg.spec, &l, &k, &step_options(step)?)?;
            json(&DerivativeOutput {
                divisor: l,
                direction: k,
                value: Num::new(&der.value, prec),
                derivative: der,
            })
        }
        Command::MultIdeal { p, limit } => {
            nakayama_only(cfg)?;
            let f = cfg.format_or(Format::Json, &[Format::Json, Format::Csv])?;
            let t = Thresholds::new(*p, cfg.g0, cfg.g1)?;
            let ideal = multiplier_rees::staircase(&t.alpha, &t.beta);
            let np = multiplier_rees::newton_polygon(&ideal)?;
            let count = ideal.len();
            let keep = if *limit == 0 { count } else { (*limit).min(count) };
            let out = IdealOutput {
                thresholds: t,
                generator_count: count,
                generators: ideal.generators[..keep].to_vec(),
                truncated: keep < count,
                rees: multiplier_rees::rees_data(&np),
                polygon: np.vertices,
            };
            match f {
                Format::Csv => ideal_csv(&out)?,
                _ => json(&out),
            }
        }
        Command::Rees { p } => {
            nakayama_only(cfg)?;
            let f = cfg.format_or(Format::Json, &[Format::Json, Format::Csv])?;
            let s = multiplier_rees::summarize(*p, cfg.g0, cfg.g1)?;
            match f {
                Format::Csv => rees_csv(&s.rees)?,
                _ => json(&ReesOutput {
                    w_endpoints: w_endpoints(&s.polygon),
                    thresholds: s.thresholds,
                    rees: s.rees,
                    w_max: s.w_max,
                    endpoint_bound: s.endpoint_bound,
                }),
            }
        }
        Command::FujitaSweep { p_list } => {
            nakayama_only(cfg)?;
            let f = cfg.format_or(Format::Csv, &[Format::Csv, Format::Json])?;
            let ps = sweep_list(cfg, p_list)?;
            let ctx = DriverContext::new(cfg.spec.clone(), cfg.g0, cfg.g1)?;
            let table = fujita_driver::sweep(&ctx, &ps)?;
            warnings.extend(table.warnings.iter().cloned());
            for row in &table.rows {
                if let Some(e) = &row.error {
                    warnings.push(format!("p = {}: {e}", row.p));
                }
            }
            match f {
                Format::Json => json(&table),
                _ => {
                    let mut buf = Vec::new();
                    fujita_driver::write_csv(&table, prec, &mut buf).map_err(|e| CliError::Domain(e.to_string()))?;
                    String::from_utf8(buf).map_err(|e| CliError::Domain(e.to_string()))?
                }
            }
        }
        Command::Report { p_list } => {
            cfg.format_or(Format::Markdown, &[Format::Markdown])?;
            let ps = sweep_list(cfg, p_list)?;
            report(cfg, &ps)?
        }
    };
    Ok((text, warnings))
}

fn md_eq(v: &QuadNum, prec: usize) -> String {
    let n = md_num(v, prec);
    if n.starts_with('≈') {
        n
    } else {
        format!("= {n}")
    }
}

const MD_EXACT_MAX: usize = 60;

fn md_short(v: &QuadNum) -> String {
    let exact = v.to_string();
    if exact.len() > 24 {
        format!("≈{}", v.to_decimal(6))
    } else {
        exact
    }
}

fn md_num(v: &QuadNum, prec: usize) -> String {
    let exact = v.to_string();
    if exact.len() > MD_EXACT_MAX {
        format!("≈ {}", v.to_decimal(prec))
    } else {
        format!("`{exact}` ≈ {}", v.to_decimal(prec))
    }
}

/// Markdown summary of the preset in `cfg`.
pub fn report(cfg: &RunConfig, p_list: &[u64]) -> Result<String, CliError> {
    let prec = cfg.precision.min(10);
    let spec = &cfg.spec;
    let name = cfg.preset.clone().unwrap_or_else(|| "custom".into());
    let l = spec.tautological();
    let mut s = String::new();
    let _ = writeln!(s, "# Report: {name}\n");
    let _ = writeln!(s, "| class | x | y | z | self-intersection | nef |");
    let _ = writeln!(s, "|---|---|---|---|---|---|");
    for (label, c) in [("L0", &spec.l0), ("L1", &spec.l1), ("L2", &spec.l2)] {
        let _ = writeln!(
            s,
            "| {label} | {} | {} | {} | {} | {} |",
            rat_to_string(&c.x),
            rat_to_string(&c.y),
            rat_to_string(&c.z),
            rat_to_string(&c.self_intersection()),
            c.is_nef()
        );
    }
    let region = nef_box_refined(spec, &l, DEFAULT_SEGMENTS)?;
    let _ = writeln!(s, "\n## Nef region of the tautological class\n");
    let _ = writeln!(s, "Kind: {}.\n", region.kind_name());
    for v in &region.inner().vertices {
        let _ = writeln!(s, "- ({}, {})", md_short(&v.x), md_short(&v.y));
    }
    let vol = volume_engine::volume(spec, &l);
    let _ = writeln!(s, "\n## Volume\n");
    match &vol {
        VolumeResult::Exact { value } => {
            let _ = writeln!(s, "vol = {}", md_num(value, prec));
        }
        VolumeResult::Sandwich { lower, upper } => {
            let _ = writeln!(s, "vol ∈ [{}, {}]", lower.to_decimal(prec), upper.to_decimal(prec));
        }
    }
    let opts = DerivativeOptions::default();
    let hyper = BundleDivisor::hyperplane();
    match pos_intersection_with(spec, &l, &hyper, &opts) {
        Ok(d) => {
            let _ = writeln!(s, "\n⟨L³⟩·H {} ({:?})", md_eq(&d.value, prec), d.audit.method);
        }
        Err(e) => {
            let _ = writeln!(s, "\n⟨L³⟩·H: {e}");
        }
    }
    match pos_intersection_with(spec, &l, &canonical_class(spec), &opts) {
        Ok(d) => {
            let _ = writeln!(s, "\nr1 = ⟨L³⟩·K_X {} ({:?})", md_eq(&d.value, prec), d.audit.method);
        }
        Err(e) => {
            let _ = writeln!(s, "\nr1: {e}");
        }
    }
    if *spec == BundleSpec::nakayama() {
        nakayama_sections(cfg, p_list, prec, &mut s)?;
    }
    Ok(s)
}

fn nakayama_sections(cfg: &RunConfig, p_list: &[u64], prec: usize, s: &mut String) -> Result<(), CliError> {
    let spec = &cfg.spec;
    let f1 = BundleDivisor::pullback(NsClass::f1());
    if let Ok(d) = pos_intersection_with(spec, &spec.tautological(), &f1, &DerivativeOptions::default()) {
        let _ = writeln!(s, "\n⟨L³⟩·π*f1 {} ({:?})", md_eq(&d.value, prec), d.audit.method);
    }
    let c = growth_constant();
    let _ = writeln!(s, "\n## Thresholds\n");
    let _ = writeln!(s, "Twists g0 = {}, g1 = {}.\n", cfg.g0, cfg.g1);
    let _ = writeln!(s, "Growth constant C = (4.9−2√6)/5 = `{}` ≈ {}.", c, c.to_decimal(prec));
    match growth_onset(cfg.g0, cfg.g1, 2_000) {
        Some(p0) => {
            let _ = writeln!(
                s,
                "alpha ≥ C·p and beta ≥ C·p for every p in [{p0}, 2000] and beyond (α/p → 1, β/p → 1−2√6/5 > C)."
            );
        }
        None => {
            let _ = writeln!(s, "No onset of linear growth found below p = 2000.");
        }
    }
    let _ = writeln!(
        s,
        "\n| p | alpha | beta | d | P0 | Pr | sides | w_max | endpoint bound | p·w_max |"
    );
    let _ = writeln!(s, "|---|---|---|---|---|---|---|---|---|---|");
    for &p in p_list {
        match multiplier_rees::summarize(p, cfg.g0, cfg.g1) {
            Ok(sm) => {
                let t = &sm.thresholds;
                let v = &sm.polygon.vertices;
                let w = QuadNum::from_rat(sm.w_max.clone());
                let _ = writeln!(
                    s,
                    "| {p} | {} | {} | {} | {:?} | {:?} | {} | {} | {} | {} |",
                    t.alpha.to_decimal(4),
                    t.beta.to_decimal(4),
                    t.d.to_decimal(8),
                    v.first().copied().unwrap_or_default(),
                    v.last().copied().unwrap_or_default(),
                    sm.rees.len(),
                    w.to_decimal(prec),
                    sm.endpoint_bound.to_decimal(prec),
                    w.scale(&rat_int(p as i64)).to_decimal(4),
                );
            }
            Err(e) => {
                let _ = writeln!(s, "| {p} | {e} | | | | | | | | |");
            }
        }
    }
    let ctx = DriverContext::new(spec.clone(), cfg.g0, cfg.g1)?;
    let table: SweepTable = fujita_driver::sweep(&ctx, p_list)?;
    let _ = writeln!(s, "\n## Certificate\n");
    let _ = writeln!(s, "| p | vol_gap | e_mass | kyx_bound | r1_lo | r1_hi | cross gap |");
    let _ = writeln!(s, "|---|---|---|---|---|---|---|");
    for r in table.reports() {
        let _ = writeln!(
            s,
            "| {} | {:.4e} | {} | {:.4e} | {} | {} | {:.4e} |",
            r.p,
            r.vol_gap.to_f64(),
            r.e_mass.to_decimal(6),
            r.kyx_bound.to_f64(),
            r.r1_lo.to_decimal(8),
            r.r1_hi.to_decimal(8),
            r.cross_gap.to_f64(),
        );
    }
    let sm = &table.summary;
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3}"));
    let _ = writeln!(
        s,
        "\nFitted log-log slopes: vol_gap {}, e_mass {}, kyx_bound {}, w_max {}. sup p·w_max = {}.",
        fmt(sm.vol_gap_slope),
        fmt(sm.e_mass_slope),
        fmt(sm.kyx_slope),
        fmt(sm.w_max_slope),
        fmt(sm.p_w_max_sup)
    );
    if let Ok(((m, k), (m2, k2))) = fujita_driver::orientation_pinning(spec) {
        let _ = writeln!(
            s,
            "\nLimit truncation line y = ({m})·x + {k}; nef edge y = ({m2})·x + {k2}; equal: {}.",
            m == m2 && k == k2
        );
    }
    let _ = writeln!(s, "\n## Note on the box Q_p\n");
    let _ = writeln!(
        s,
        "For M_p = p·L − (a·L0 + b·H) the closed form x + (5/(2√6))·((p−b)/(p−a))·y ≤ 1 does not match the \
         region obtained from the nef cone. Rescaling the cone condition by p−b gives \
         x + (5/(2√6))·y ≤ (p−a)/(p−b) together with x + y ≤ 1. The two descriptions agree only in the limit \
         p → ∞; this tool uses the cone-derived region throughout."
    );
    Ok(())
}

fn write_output(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Domain(e.to_string())),
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// exit status: 0 on success, 1 on domain errors, 2 on usage errors.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            if code == 2 {
                print_subcommand_help(&args, stderr);
            }
            return code;
        }
    };
    let result = RunConfig::resolve(&cli.global).and_then(|cfg| {
        let go = || execute(&cfg, &cli.command);
        let (text, warnings) = match cfg.threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?
                .install(go)?,
            None => go()?,
        };
        for w in warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
        write_output(&cfg.out, &text, stdout)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            if let CliError::Usage(_) = e {
                print_subcommand_help(&args, stderr);
            }
            e.exit_code()
        }
    }
}

fn print_subcommand_help(args: &[OsString], stderr: &mut dyn Write) {
    let mut cmd = Cli::command();
    let name = args
        .iter()
        .skip(1)
        .filter_map(|a| a.to_str())
        .find(|a| cmd.find_subcommand(a).is_some());
    if let Some(name) = name {
        if let Some(sub) = cmd.find_subcommand_mut(name) {
            let _ = write!(stderr, "\n{}", sub.render_help());
        }
    }
}

/// Entry point for the binary.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
