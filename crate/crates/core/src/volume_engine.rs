//! Volumes of divisors on the bundle, a lattice-sum section counter used as
//! an oracle, and positive intersection numbers obtained as one-sided
//! derivatives of the volume.
//!
//! On an abelian surface `h⁰(β) = β²/2` for an ample class, so sections of
//! `m·(π*M + c·H)` are counted by summing `β²/2` over the lattice points of
//! `m` times the nef region. The volume is therefore
//! `4!·∫∫ β²/2 = 12·∫∫ β²` over the region.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ns_lattice::NsClass;
use crate::polygon::Point;
use crate::scalar::{rat, rat_int, QuadNum, Rat};
use crate::toric_bundle::{
    canonical_class, density, is_big, nef_box_refined, quadratic_extrema, BundleDivisor, BundleError, BundleSpec,
    Region, DEFAULT_SEGMENTS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VolumeError {
    #[error("divisor is not big")]
    NotBig,
    #[error("region degenerates at probe step {0}; use a smaller step")]
    StepUnderflow(String),
}

/// `q(x, y) = c00 + c10·x + c01·y + c20·x² + c11·xy + c02·y²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadDensity {
    #[serde(with = "crate::scalar::serde_rat")]
    pub c00: Rat,
    #[serde(with = "crate::scalar::serde_rat")]
    pub c10: Rat,
    #[serde(with = "crate::scalar::serde_rat")]
    pub c01: Rat,
    #[serde(with = "crate::scalar::serde_rat")]
    pub c20: Rat,
    #[serde(with = "crate::scalar::serde_rat")]
    pub c11: Rat,
    #[serde(with = "crate::scalar::serde_rat")]
    pub c02: Rat,
}

impl QuadDensity {
    pub fn eval(&self, p: &Point) -> QuadNum {
        let (x, y) = (&p.x, &p.y);
        QuadNum::from(self.c00.clone())
            + x * QuadNum::from(self.c10.clone())
            + y * QuadNum::from(self.c01.clone())
            + x * x * QuadNum::from(self.c20.clone())
            + x * y * QuadNum::from(self.c11.clone())
            + y * y * QuadNum::from(self.c02.clone())
    }

    pub fn eval_rat(&self, x: &Rat, y: &Rat) -> Rat {
        &self.c00 + x * &self.c10 + y * &self.c01 + x * x * &self.c20 + x * y * &self.c11 + y * y * &self.c02
    }

    pub fn gradient(&self, p: &Point) -> (QuadNum, QuadNum) {
        let two = QuadNum::from_int(2);
        let gx = QuadNum::from(self.c10.clone())
            + &two * &p.x * QuadNum::from(self.c20.clone())
            + &p.y * QuadNum::from(self.c11.clone());
        let gy = QuadNum::from(self.c01.clone())
            + &two * &p.y * QuadNum::from(self.c02.clone())
            + &p.x * QuadNum::from(self.c11.clone());
        (gx, gy)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VolumeResult {
    Exact { value: QuadNum },
    Sandwich { lower: QuadNum, upper: QuadNum },
}

impl VolumeResult {
    pub fn zero() -> Self {
        VolumeResult::Exact { value: QuadNum::zero() }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, VolumeResult::Exact { .. })
    }

    pub fn value(&self) -> Option<&QuadNum> {
        match self {
            VolumeResult::Exact { value } => Some(value),
            VolumeResult::Sandwich { .. } => None,
        }
    }

    pub fn lower(&self) -> &QuadNum {
        match self {
            VolumeResult::Exact { value } => value,
            VolumeResult::Sandwich { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> &QuadNum {
        match self {
            VolumeResult::Exact { value } => value,
            VolumeResult::Sandwich { upper, .. } => upper,
        }
    }

    /// Exact value, or the midpoint of the enclosure.
    pub fn estimate(&self) -> QuadNum {
        match self {
            VolumeResult::Exact { value } => value.clone(),
            VolumeResult::Sandwich { lower, upper } => (lower + upper) * QuadNum::from_rat(rat(1, 2)),
        }
    }

    pub fn width(&self) -> QuadNum {
        self.upper() - self.lower()
    }
}

/// `h⁰(S, β)` by Riemann–Roch on the abelian surface: `β²/2` for nef classes
/// with `β² > 0`, and 0 otherwise. Classes with `β² = 0` have at most linear
/// growth and are counted as 0.
pub fn h0_surface(beta: &NsClass) -> Rat {
    let sq = beta.self_intersection();
    if beta.is_nef() && sq.is_positive() {
        sq / rat_int(2)
    } else {
        Rat::zero()
    }
}

/// `h⁰(X, m·div) = Σ_{i,j ≥ 0, i+j ≤ ⌊cm⌋} h⁰(S, mM + i·T₁ + j·T₂)`.
pub fn h0_bundle(spec: &BundleSpec, div: &BundleDivisor, m: u64) -> Rat {
    let mr = Rat::from_integer(BigInt::from(m));
    let top = (&div.h_coeff * &mr).floor().to_integer();
    if top.is_negative() {
        return Rat::zero();
    }
    let n: i64 = top.try_into().expect("lattice bound fits in i64");
    let base = div.base.scale(&mr);
    let (t1, t2) = (spec.t1(), spec.t2());
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let row = base.clone() + t1.scale(&rat_int(i));
            (0..=(n - i))
                .map(|j| h0_surface(&(row.clone() + t2.scale(&rat_int(j)))))
                .fold(Rat::zero(), |a, b| a + b)
        })
        .reduce(Rat::zero, |a, b| a + b)
}

/// `4!·h⁰(m·div)/m⁴`, the lattice-sum volume estimate.
pub fn lattice_volume_estimate(spec: &BundleSpec, div: &BundleDivisor, m: u64) -> Rat {
    let m4 = Rat::from_integer(BigInt::from(m).pow(4));
    h0_bundle(spec, div, m) * rat_int(24) / m4
}

/// `12·∫∫ q` over a region; sandwich regions give certified bounds.
pub fn region_volume(q: &QuadDensity, region: &Region) -> VolumeResult {
    let twelve = QuadNum::from_int(12);
    match region {
        Region::ExactPolygon { polygon } => VolumeResult::Exact {
            value: polygon.integrate(|p| q.eval(p)) * twelve,
        },
        Region::Sandwich { inner, outer, .. } => {
            let lower = inner.integrate(|p| q.eval(p)) * &twelve;
            let sup = quadratic_extrema(q, outer)
                .map(|(_, hi)| hi)
                .unwrap_or_else(QuadNum::zero);
            let sup = if sup.is_positive() { sup } else { QuadNum::zero() };
            let slack = (outer.area() - inner.area()) * sup * &twelve;
            VolumeResult::Sandwich {
                upper: &lower + &slack,
                lower,
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct VolumeOptions {
    /// Relative width at which sandwich refinement stops.
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        VolumeOptions {
            rel_tol: 1e-4,
            max_segments: 4096,
        }
    }
}

pub fn volume(spec: &BundleSpec, div: &BundleDivisor) -> VolumeResult {
    volume_with(spec, div, &VolumeOptions::default())
}

pub fn volume_with(spec: &BundleSpec, div: &BundleDivisor, opts: &VolumeOptions) -> VolumeResult {
    let q = density(spec, div);
    let mut segments = DEFAULT_SEGMENTS;
    loop {
        let region = match nef_box_refined(spec, div, segments) {
            Ok(r) => r,
            Err(BundleError::EmptyRegion) => return VolumeResult::zero(),
            Err(e) => unreachable!("{e}"),
        };
        let v = region_volume(&q, &region);
        if v.is_exact() || segments >= opts.max_segments {
            return v;
        }
        let rel = v.width().to_f64() / v.upper().to_f64().abs().max(f64::MIN_POSITIVE);
        if rel <= opts.rel_tol {
            return v;
        }
        segments *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeMethod {
    /// The volume is a polynomial in the step near 0; derivative is exact.
    PolynomialFit,
    /// One-sided Richardson extrapolation of forward differences.
    Richardson,
    /// Exact first variation over the unperturbed region; used when the
    /// quartic check fails and the region at `t = 0` is an exact polygon.
    FirstVariation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeStep {
    #[serde(with = "crate::scalar::serde_rat")]
    pub t: Rat,
    pub volume: VolumeResult,
}

/// Audit trail of a derivative evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeAudit {
    pub method: DerivativeMethod,
    #[serde(with = "crate::scalar::serde_rat")]
    pub step: Rat,
    pub probes: Vec<ProbeStep>,
    /// Derivative of the interpolating quartic even when the check failed.
    pub polynomial_estimate: Option<QuadNum>,
    pub richardson_estimate: Option<QuadNum>,
    /// `|R₃₃ − R₃₂|`, the Richardson error indicator.
    pub richardson_spread: Option<f64>,
    pub first_variation: Option<QuadNum>,
    pub attempts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Derivative {
    pub value: QuadNum,
    pub audit: DerivativeAudit,
}

#[derive(Clone, Debug)]
pub struct DerivativeOptions {
    pub step: Rat,
    /// Divide the step by 16 and retry this many times when the polynomial
    /// check fails, before falling back to Richardson.
    pub shrink_retries: usize,
}

impl Default for DerivativeOptions {
    fn default() -> Self {
        DerivativeOptions {
            step: rat(1, 64),
            shrink_retries: 0,
        }
    }
}

impl DerivativeOptions {
    pub fn adaptive(step: Rat, retries: usize) -> Self {
        DerivativeOptions {
            step,
            shrink_retries: retries,
        }
    }
}

/// Lagrange weights `(Lᵢ'(0), Lᵢ(s) for each s in at)` for the given nodes.
fn lagrange(nodes: &[Rat], at: &[Rat]) -> (Vec<Rat>, Vec<Vec<Rat>>) {
    let n = nodes.len();
    let mut d0 = Vec::with_capacity(n);
    let mut vals = vec![Vec::with_capacity(n); at.len()];
    for i in 0..n {
        let denom: Rat = (0..n).filter(|&j| j != i).map(|j| &nodes[i] - &nodes[j]).product();
        let mut deriv = Rat::zero();
        for k in (0..n).filter(|&k| k != i) {
            let prod: Rat = (0..n)
                .filter(|&j| j != i && j != k)
                .map(|j| -nodes[j].clone())
                .product();
            deriv += prod;
        }
        d0.push(deriv / &denom);
        for (s, out) in at.iter().zip(vals.iter_mut()) {
            let num: Rat = (0..n).filter(|&j| j != i).map(|j| s - &nodes[j]).product();
            out.push(num / &denom);
        }
    }
    (d0, vals)
}

fn weighted(ws: &[Rat], fs: &[QuadNum]) -> QuadNum {
    ws.iter().zip(fs).fold(QuadNum::zero(), |acc, (w, f)| acc + f.scale(w))
}

/// One-sided derivative at `t = 0⁺` of `t ↦ f(t)`.
///
/// Probes `f` at `0, h/8, h/4, h/2, h`. If the quartic through those values
/// also reproduces `f` at `3h/16` and `3h/4` exactly, its derivative is
/// returned. Otherwise Richardson extrapolation of the forward differences
/// at `h, h/2, h/4, h/8` is used.
pub fn one_sided_derivative<F>(f: F, opts: &DerivativeOptions) -> Result<Derivative, VolumeError>
where
    F: Fn(&Rat) -> Result<VolumeResult, VolumeError> + Sync,
{
    let mut h = opts.step.clone();
    let mut attempts = 0;
    loop {
        attempts += 1;
        let nodes: Vec<Rat> = [0i64, 1, 2, 4, 8].iter().map(|k| &h * rat(*k, 8)).collect();
        let checks: Vec<Rat> = vec![&h * rat(3, 16), &h * rat(3, 4)];
        let all: Vec<Rat> = nodes.iter().chain(checks.iter()).cloned().collect();
        let results: Vec<Result<VolumeResult, VolumeError>> = all.par_iter().map(&f).collect();
        let mut vols = Vec::with_capacity(results.len());
        for (t, r) in all.iter().zip(results) {
            let v = r?;
            if !v.upper().is_positive() {
                if t.is_zero() {
                    return Err(VolumeError::NotBig);
                }
                return Err(VolumeError::StepUnderflow(crate::scalar::rat_to_string(t)));
            }
            vols.push(v);
        }
        let est: Vec<QuadNum> = vols.iter().map(|v| v.estimate()).collect();
        let (d0, at) = lagrange(&nodes, &checks);
        let poly = weighted(&d0, &est[..5]);
        let exact = vols.iter().all(|v| v.is_exact());
        let fits = exact && at.iter().zip(&est[5..]).all(|(w, fv)| weighted(w, &est[..5]) == *fv);
        let probes: Vec<ProbeStep> = all
            .iter()
            .zip(vols)
            .map(|(t, volume)| ProbeStep { t: t.clone(), volume })
            .collect();
        if fits {
            return Ok(Derivative {
                value: poly.clone(),
                audit: DerivativeAudit {
                    method: DerivativeMethod::PolynomialFit,
                    step: h,
                    probes,
                    polynomial_estimate: Some(poly),
                    richardson_estimate: None,
                    richardson_spread: None,
                    first_variation: None,
                    attempts,
                },
            });
        }
        if attempts <= opts.shrink_retries {
            h *= rat(1, 16);
            continue;
        }
        // forward differences at h, h/2, h/4, h/8 (node indices 4, 3, 2, 1)
        let f0 = &est[0];
        let diffs: Vec<QuadNum> = [4usize, 3, 2, 1]
            .iter()
            .map(|&i| (&est[i] - f0).scale(&(Rat::one() / &nodes[i])))
            .collect();
        let mut table: Vec<Vec<QuadNum>> = vec![diffs];
        for j in 1..4 {
            let p = rat_int(1 << j);
            let prev = &table[j - 1];
            let row: Vec<QuadNum> = (1..prev.len())
                .map(|k| (prev[k].scale(&p) - &prev[k - 1]).scale(&(Rat::one() / (&p - Rat::one()))))
                .collect();
            table.push(row);
        }
        let best = table[3][0].clone();
        let spread = (&table[3][0] - &table[2][1]).to_f64().abs();
        return Ok(Derivative {
            value: best.clone(),
            audit: DerivativeAudit {
                method: DerivativeMethod::Richardson,
                step: h,
                probes,
                polynomial_estimate: Some(poly),
                richardson_estimate: Some(best),
                richardson_spread: Some(spread),
                first_variation: None,
                attempts,
            },
        });
    }
}

/// `⟨L³⟩·D = ¼·d/dt vol(L + tD)` at `t = 0⁺`.
pub fn pos_intersection(spec: &BundleSpec, l: &BundleDivisor, d: &BundleDivisor) -> Result<Derivative, VolumeError> {
    pos_intersection_with(spec, l, d, &DerivativeOptions::default())
}

pub fn pos_intersection_with(
    spec: &BundleSpec,
    l: &BundleDivisor,
    d: &BundleDivisor,
    opts: &DerivativeOptions,
) -> Result<Derivative, VolumeError> {
    if !is_big(spec, l).big {
        return Err(VolumeError::NotBig);
    }
    let vopts = VolumeOptions {
        rel_tol: 1e-9,
        max_segments: 128,
    };
    let mut der = one_sided_derivative(|t| Ok(volume_with(spec, &l.plus_scaled(d, t), &vopts)), opts)?;
    if der.audit.method == DerivativeMethod::Richardson {
        if let Some(fv) = first_variation(spec, l, d) {
            der.audit.first_variation = Some(fv.clone());
            der.audit.method = DerivativeMethod::FirstVariation;
            der.value = fv;
        }
    }
    der.value = der.value.scale(&rat(1, 4));
    Ok(der)
}

/// First Riemann–Roch coefficient `⟨L³⟩·K_X`.
pub fn r1(spec: &BundleSpec, l: &BundleDivisor) -> Result<Derivative, VolumeError> {
    pos_intersection(spec, l, &canonical_class(spec))
}

pub fn r1_with(spec: &BundleSpec, l: &BundleDivisor, opts: &DerivativeOptions) -> Result<Derivative, VolumeError> {
    pos_intersection_with(spec, l, &canonical_class(spec), opts)
}

/// First variation of the volume: `12·∫∫ ∂ₜ(β_t²)` over the region plus the
/// contribution of the moving simplex edge `x + y = c`. The nef boundary
/// carries zero density, so it does not contribute at first order. Exact
/// regions only; used as an independent check of the derivative route.
pub fn first_variation(spec: &BundleSpec, l: &BundleDivisor, d: &BundleDivisor) -> Option<QuadNum> {
    let region = nef_box_refined(spec, l, DEFAULT_SEGMENTS).ok()?;
    let poly = region.exact()?.clone();
    let q = density(spec, l);
    let (t1, t2) = (spec.t1(), spec.t2());
    // ∂ₜ β_t² = 2 β·D_base with β = M + xT₁ + yT₂
    let dm = &d.base;
    let lin = QuadDensity {
        c00: rat_int(2) * l.base.intersect(dm),
        c10: rat_int(2) * t1.intersect(dm),
        c01: rat_int(2) * t2.intersect(dm),
        c20: Rat::zero(),
        c11: Rat::zero(),
        c02: Rat::zero(),
    };
    let mut total = poly.integrate(|p| lin.eval(p));
    if !d.h_coeff.is_zero() {
        // edge x + y = c moves outward with normal speed dc/√2; its length
        // element is √2·dx, so the flux is dc·∫ q dx along the edge
        let c = QuadNum::from(l.h_coeff.clone());
        for (a, b) in poly.edges() {
            let on = |p: &Point| (&p.x + &p.y - &c).is_zero();
            if on(&a) && on(&b) {
                let len_x = &b.x - &a.x;
                // Simpson is exact for the quadratic q along the segment
                let mid = a.midpoint(&b);
                let s = (q.eval(&a) + q.eval(&mid) * QuadNum::from_int(4) + q.eval(&b)) * QuadNum::from_rat(rat(1, 6));
                total = total + s * len_x.abs() * QuadNum::from(d.h_coeff.clone());
            }
        }
    }
    Some(total * QuadNum::from_int(12))
}
