//! Fujita approximants of the Nakayama tautological class and the
//! certificate for the first Riemann–Roch coefficient.
//!
//! In the box picture the approximant `A_p` keeps the part of box(𝕃) where
//! `x/α + (c − x − y)/β ≥ 1/p`, with `c` the `H` coefficient of the divisor.
//! Every region involved is an exact polygon, so all volumes are exact.

use std::collections::BTreeSet;
use std::io::Write;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multiplier_rees::{self, ReesError, Thresholds};
use crate::polygon::HalfPlane;
use crate::scalar::{rat, rat_int, QuadNum, Rat};
use crate::toric_bundle::{canonical_class, density, is_big, nef_box, BundleDivisor, BundleError, BundleSpec, Region};
use crate::volume_engine::{
    one_sided_derivative, r1, region_volume, volume, DerivativeMethod, DerivativeOptions, VolumeError, VolumeResult,
};

pub const DEFAULT_P_LIST: [u64; 7] = [1_000, 3_000, 10_000, 30_000, 100_000, 300_000, 1_000_000];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DriverError {
    #[error(transparent)]
    Rees(#[from] ReesError),
    #[error(transparent)]
    Volume(#[from] VolumeError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("region is not an exact polygon")]
    NotExact,
    #[error("empty p list")]
    EmptyPList,
}

/// `G = g₀·π*L₀ + g₁·H`.
pub fn twist_divisor(spec: &BundleSpec, g0: u64, g1: u64) -> BundleDivisor {
    BundleDivisor::new(spec.l0.scale(&rat_int(g0 as i64)), rat_int(g1 as i64))
}

/// Smallest positive `(g₀, g₁)`, by `g₀ + g₁` then `g₀`, for which `G − K_X`
/// has a bigness witness.
pub fn default_twists(spec: &BundleSpec, limit: u64) -> Option<(u64, u64)> {
    let k = canonical_class(spec);
    (2..=2 * limit)
        .flat_map(|s| (1..s).map(move |g0| (g0, s - g0)))
        .filter(|&(g0, g1)| g0 <= limit && g1 <= limit)
        .find(|&(g0, g1)| is_big(spec, &twist_divisor(spec, g0, g1).plus_scaled(&k, &rat_int(-1))).big)
}

/// `x/α + (c − x − y)/β ≥ s`.
pub fn truncation_half_plane(t: &Thresholds, c: &Rat, s: &QuadNum) -> HalfPlane {
    let ia = t.alpha.recip();
    let ib = t.beta.recip();
    HalfPlane::new(&ia - &ib, -ib.clone(), ib.scale(c) - s)
}

/// The truncation line at `p = ∞`: `x·lim(p/α) + (1 − x − y)·lim(p/β) ≥ 1`.
pub fn limit_truncation_line() -> HalfPlane {
    let (ra, rb) = Thresholds::limit_ratios();
    let (ia, ib) = (ra.recip(), rb.recip());
    HalfPlane::new(&ia - &ib, -ib.clone(), &ib - QuadNum::one())
}

/// The edge of box(𝕃) off the coordinate axes, as `(slope, intercept)`.
/// A line `y = m·x + k` as `(m, k)`.
pub type Line = (QuadNum, QuadNum);

pub fn nef_edge(spec: &BundleSpec) -> Result<Line, DriverError> {
    let region = nef_box(spec, &spec.tautological())?;
    let poly = region.exact().ok_or(DriverError::NotExact)?;
    poly.edges()
        .into_iter()
        .find(|(u, v)| !(u.x.is_zero() && v.x.is_zero()) && !(u.y.is_zero() && v.y.is_zero()))
        .map(|(u, v)| {
            let slope = (&v.y - &u.y) / (&v.x - &u.x);
            let intercept = &u.y - &slope * &u.x;
            (slope, intercept)
        })
        .ok_or(DriverError::NotExact)
}

/// Slope and intercept of the `p = ∞` truncation line, next to those of the
/// nef edge of box(𝕃).
pub fn orientation_pinning(spec: &BundleSpec) -> Result<(Line, Line), DriverError> {
    let lim = limit_truncation_line()
        .as_slope_intercept()
        .ok_or(DriverError::NotExact)?;
    Ok((lim, nef_edge(spec)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproximantRegion {
    pub p: Option<u64>,
    pub truncation: Option<HalfPlane>,
    pub region: Region,
}

/// box(div) cut by the truncation at level `s`.
fn truncated_region(
    spec: &BundleSpec,
    div: &BundleDivisor,
    t: &Thresholds,
    s: &QuadNum,
) -> Result<Region, DriverError> {
    let region = nef_box(spec, div)?;
    if !region.is_exact() {
        return Err(DriverError::NotExact);
    }
    let cut = region.clip(&truncation_half_plane(t, &div.h_coeff, s));
    if cut.inner().is_degenerate() {
        return Err(BundleError::EmptyRegion.into());
    }
    Ok(cut)
}

pub fn approximant_region(spec: &BundleSpec, t: &Thresholds) -> Result<ApproximantRegion, DriverError> {
    let s = QuadNum::from_rat(rat(1, t.p as i64));
    let l = spec.tautological();
    Ok(ApproximantRegion {
        p: Some(t.p),
        truncation: Some(truncation_half_plane(t, &l.h_coeff, &s)),
        region: truncated_region(spec, &l, t, &s)?,
    })
}

/// The formal `p = ∞` approximant: box(𝕃) itself.
pub fn limit_region(spec: &BundleSpec) -> Result<ApproximantRegion, DriverError> {
    Ok(ApproximantRegion {
        p: None,
        truncation: None,
        region: nef_box(spec, &spec.tautological())?,
    })
}

/// `12·∫∫ β²` over box(div) truncated at level `s`.
pub fn truncated_volume(
    spec: &BundleSpec,
    div: &BundleDivisor,
    t: &Thresholds,
    s: &QuadNum,
) -> Result<QuadNum, DriverError> {
    let region = match truncated_region(spec, div, t, s) {
        Ok(r) => r,
        Err(DriverError::Bundle(BundleError::EmptyRegion)) => return Ok(QuadNum::zero()),
        Err(e) => return Err(e),
    };
    match region_volume(&density(spec, div), &region) {
        VolumeResult::Exact { value } => Ok(value),
        VolumeResult::Sandwich { .. } => Err(DriverError::NotExact),
    }
}

pub fn approximant_volume(spec: &BundleSpec, t: &Thresholds) -> Result<QuadNum, DriverError> {
    truncated_volume(spec, &spec.tautological(), t, &QuadNum::from_rat(rat(1, t.p as i64)))
}

fn exact(v: Result<QuadNum, DriverError>) -> Result<VolumeResult, VolumeError> {
    match v {
        Ok(value) => Ok(VolumeResult::Exact { value }),
        Err(DriverError::Volume(e)) => Err(e),
        Err(e) => Err(VolumeError::StepUnderflow(e.to_string())),
    }
}

/// `A_p³·μ*𝕃` and `A_p³·E_p`.
///
/// Writing `V(s)` for the truncated volume at level `s`, scaling the box by
/// `1 + t` at fixed threshold gives `vol(A_p + t𝕃) = (1+t)⁴·V(s₀/(1+t))`
/// with `s₀ = 1/p`, so the `t`-derivative at 0 is `4V(s₀) − s₀V′(s₀)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EMass {
    pub deriv_l: QuadNum,
    pub e_mass: QuadNum,
    pub method: DerivativeMethod,
}

pub fn e_mass(spec: &BundleSpec, t: &Thresholds) -> Result<EMass, DriverError> {
    let l = spec.tautological();
    let s0 = QuadNum::from_rat(rat(1, t.p as i64));
    let v0 = truncated_volume(spec, &l, t, &s0)?;
    // f(τ) = V(s₀ − τ), so f′(0) = −V′(s₀)
    let opts = DerivativeOptions::adaptive(rat(1, 64 * t.p as i64), 8);
    let der = one_sided_derivative(
        |tau| exact(truncated_volume(spec, &l, t, &(&s0 - QuadNum::from_rat(tau.clone())))),
        &opts,
    )?;
    let quarter = rat(1, 4);
    let e = der.value.scale(&quarter);
    let deriv_l = &v0 + &s0 * &e;
    Ok(EMass {
        deriv_l,
        e_mass: e,
        method: der.audit.method,
    })
}

/// `A_p³·μ*K_X = ¼·d/dt vol(A_p + t·μ*K_X)` at `0⁺`.
pub fn r1_partial(spec: &BundleSpec, t: &Thresholds) -> Result<(QuadNum, DerivativeMethod), DriverError> {
    let l = spec.tautological();
    let k = canonical_class(spec);
    let s0 = QuadNum::from_rat(rat(1, t.p as i64));
    let step = rat(1, 64).min(rat(1, 16 * t.p as i64));
    let opts = DerivativeOptions::adaptive(step, 6);
    let der = one_sided_derivative(|h| exact(truncated_volume(spec, &l.plus_scaled(&k, h), t, &s0)), &opts)?;
    Ok((der.value.scale(&rat(1, 4)), der.audit.method))
}

/// Per-`p` certificate. `r1_lo..r1_hi` encloses `𝔯₁(A_p)`; `cross_gap` is the
/// distance between `A_p³·μ*K_X` and `⟨𝕃³⟩·K_X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FujitaReport {
    pub p: u64,
    pub g0: u64,
    pub g1: u64,
    pub vol_ap: QuadNum,
    pub vol_gap: QuadNum,
    pub deriv_l: QuadNum,
    pub e_mass: QuadNum,
    #[serde(with = "crate::scalar::serde_rat")]
    pub w_max: Rat,
    pub endpoint_bound: QuadNum,
    pub kyx_bound: QuadNum,
    pub r1_partial: QuadNum,
    pub r1_lo: QuadNum,
    pub r1_hi: QuadNum,
    pub r1_reference: QuadNum,
    pub cross_gap: QuadNum,
    pub generators: usize,
    pub sides: usize,
    pub e_mass_method: DerivativeMethod,
    pub r1_method: DerivativeMethod,
}

impl FujitaReport {
    pub fn r1_interval(&self) -> (QuadNum, QuadNum) {
        (self.r1_lo.clone(), self.r1_hi.clone())
    }

    /// Whether `r1(𝕃)` lies within `cross_gap` of the certified interval.
    pub fn consistent_with_reference(&self) -> bool {
        let lo = &self.r1_lo - &self.cross_gap;
        let hi = &self.r1_hi + &self.cross_gap;
        !(&self.r1_reference - &lo).is_negative() && !(&hi - &self.r1_reference).is_negative()
    }
}

/// Quantities shared by every `p` of a sweep.
#[derive(Clone, Debug)]
pub struct DriverContext {
    pub spec: BundleSpec,
    pub g0: u64,
    pub g1: u64,
    pub vol_l: QuadNum,
    pub r1_l: QuadNum,
}

impl DriverContext {
    pub fn new(spec: BundleSpec, g0: u64, g1: u64) -> Result<Self, DriverError> {
        let l = spec.tautological();
        let vol_l = volume(&spec, &l).value().cloned().ok_or(DriverError::NotExact)?;
        let r1_l = r1(&spec, &l)?.value;
        Ok(DriverContext {
            spec,
            g0,
            g1,
            vol_l,
            r1_l,
        })
    }

    pub fn nakayama() -> Self {
        Self::new(BundleSpec::nakayama(), 1, 1).expect("the Nakayama class is big with an exact box")
    }
}

pub fn r1_certificate(ctx: &DriverContext, p: u64) -> Result<FujitaReport, DriverError> {
    let ideal = multiplier_rees::summarize(p, ctx.g0, ctx.g1)?;
    let t = &ideal.thresholds;
    let vol_ap = approximant_volume(&ctx.spec, t)?;
    let em = e_mass(&ctx.spec, t)?;
    let (r1p, r1_method) = r1_partial(&ctx.spec, t)?;
    let kyx_bound = QuadNum::from_rat(ideal.w_max.clone()) * &em.e_mass;
    let r1_hi = &r1p + &kyx_bound;
    Ok(FujitaReport {
        p,
        g0: ctx.g0,
        g1: ctx.g1,
        vol_gap: &ctx.vol_l - &vol_ap,
        vol_ap,
        deriv_l: em.deriv_l,
        e_mass: em.e_mass,
        w_max: ideal.w_max,
        endpoint_bound: ideal.endpoint_bound,
        kyx_bound,
        r1_lo: r1p.clone(),
        r1_hi,
        cross_gap: (&r1p - &ctx.r1_l).abs(),
        r1_partial: r1p,
        r1_reference: ctx.r1_l.clone(),
        generators: ideal.generator_count,
        sides: ideal.rees.len(),
        e_mass_method: em.method,
        r1_method,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: u64,
    pub report: Option<FujitaReport>,
    pub error: Option<String>,
}

/// Least-squares slopes on log–log axes, and the `p·w_max` statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub vol_gap_slope: Option<f64>,
    pub e_mass_slope: Option<f64>,
    pub kyx_slope: Option<f64>,
    pub w_max_slope: Option<f64>,
    pub cross_gap_slope: Option<f64>,
    pub p_w_max_sup: Option<f64>,
    pub vol_gap_decreasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
    pub warnings: Vec<String>,
}

impl SweepTable {
    pub fn reports(&self) -> impl Iterator<Item = &FujitaReport> {
        self.rows.iter().filter_map(|r| r.report.as_ref())
    }

    pub fn report_for(&self, p: u64) -> Option<&FujitaReport> {
        self.reports().find(|r| r.p == p)
    }
}

/// Slope of the least-squares line through `(ln x, ln y)`; needs two points
/// with positive coordinates.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn summarize(reports: &[&FujitaReport]) -> SweepSummary {
    let series =
        |f: &dyn Fn(&FujitaReport) -> f64| -> Vec<(f64, f64)> { reports.iter().map(|r| (r.p as f64, f(r))).collect() };
    let p_w = reports
        .iter()
        .map(|r| r.p as f64 * QuadNum::from_rat(r.w_max.clone()).to_f64())
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    SweepSummary {
        vol_gap_slope: log_log_slope(&series(&|r| r.vol_gap.to_f64())),
        e_mass_slope: log_log_slope(&series(&|r| r.e_mass.to_f64())),
        kyx_slope: log_log_slope(&series(&|r| r.kyx_bound.to_f64())),
        w_max_slope: log_log_slope(&series(&|r| QuadNum::from_rat(r.w_max.clone()).to_f64())),
        cross_gap_slope: log_log_slope(&series(&|r| r.cross_gap.to_f64())),
        p_w_max_sup: p_w,
        vol_gap_decreasing: reports
            .windows(2)
            .all(|w| (&w[1].vol_gap - &w[0].vol_gap).is_negative()),
    }
}

/// Runs the certificate for every `p`, in parallel; rows are ordered by `p`.
pub fn sweep(ctx: &DriverContext, p_list: &[u64]) -> Result<SweepTable, DriverError> {
    if p_list.is_empty() {
        return Err(DriverError::EmptyPList);
    }
    let unique: BTreeSet<u64> = p_list.iter().copied().collect();
    let mut warnings = Vec::new();
    if unique.len() != p_list.len() {
        let dups: BTreeSet<u64> = p_list
            .iter()
            .copied()
            .filter(|p| p_list.iter().filter(|q| *q == p).count() > 1)
            .collect();
        warnings.push(format!("duplicate p values removed: {dups:?}"));
    }
    let ps: Vec<u64> = unique.into_iter().collect();
    let rows: Vec<SweepRow> = ps
        .par_iter()
        .map(|&p| match r1_certificate(ctx, p) {
            Ok(r) => SweepRow {
                p,
                report: Some(r),
                error: None,
            },
            Err(e) => SweepRow {
                p,
                report: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let ok: Vec<&FujitaReport> = rows.iter().filter_map(|r| r.report.as_ref()).collect();
    let summary = summarize(&ok);
    Ok(SweepTable {
        rows,
        summary,
        warnings,
    })
}

pub const CSV_COLUMNS: [&str; 10] = [
    "p",
    "vol_Ap",
    "vol_gap",
    "deriv_L",
    "e_mass",
    "w_max",
    "kyx_bound",
    "r1_partial",
    "r1_lo",
    "r1_hi",
];

/// CSV with decimal columns followed by exact twins (`<name>_exact`).
pub fn write_csv<W: Write>(table: &SweepTable, precision: usize, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header: Vec<String> = CSV_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(CSV_COLUMNS[1..].iter().map(|s| format!("{s}_exact")));
    w.write_record(&header)?;
    for row in &table.rows {
        let mut rec = vec![row.p.to_string()];
        match &row.report {
            Some(r) => {
                let vals = [
                    r.vol_ap.clone(),
                    r.vol_gap.clone(),
                    r.deriv_l.clone(),
                    r.e_mass.clone(),
                    QuadNum::from_rat(r.w_max.clone()),
                    r.kyx_bound.clone(),
                    r.r1_partial.clone(),
                    r.r1_lo.clone(),
                    r.r1_hi.clone(),
                ];
                rec.extend(vals.iter().map(|v| v.to_decimal(precision)));
                rec.extend(vals.iter().map(|v| v.to_string()));
            }
            None => rec.extend(std::iter::repeat_n(String::new(), 2 * (CSV_COLUMNS.len() - 1))),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
