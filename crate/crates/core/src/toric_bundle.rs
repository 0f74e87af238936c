//! The projective bundle `X = P(O ⊕ (L₁−L₀) ⊕ (L₂−L₀))` over `E×E`, seen as
//! a toric bundle with the standard fan of `P²`.
//!
//! Divisors `π*M + c·D_h` are described fibrewise by the convex set
//! `{(x, y) ≥ 0 : x + y ≤ c, M + x·T₁ + y·T₂ nef}` where `Tᵢ = Lᵢ − L₀`.
//! Its boundary inside the simplex is a piece of the conic
//! `(M + xT₁ + yT₂)² = 0`. When that conic splits into lines the set is an
//! exact polygon over some `Q(√d)`; otherwise it is enclosed between two
//! rational polygons.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ns_lattice::NsClass;
use crate::polygon::{HalfPlane, Point, Polygon};
use crate::scalar::{rat, rat_int, rat_sign, QuadNum, Rat, Scalar};
use crate::volume_engine::QuadDensity;

/// Default number of boundary segments for conic enclosures.
pub const DEFAULT_SEGMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("no point of the simplex gives a nef class")]
    EmptyRegion,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleSpec {
    pub l0: NsClass,
    pub l1: NsClass,
    pub l2: NsClass,
}

impl BundleSpec {
    pub fn new(l0: NsClass, l1: NsClass, l2: NsClass) -> Self {
        BundleSpec { l0, l1, l2 }
    }

    /// `L₀ = 4F₁+4F₂+Δ`, `L₁ = O`, `L₂ = O(−F₁+9F₂+Δ)`.
    pub fn nakayama() -> Self {
        BundleSpec::new(
            NsClass::from_ints(4, 4, 1),
            NsClass::default(),
            NsClass::from_ints(-1, 9, 1),
        )
    }

    /// `L₀ = L₁ = L₂`, so `X = S × P²`.
    pub fn trivial(l: NsClass) -> Self {
        BundleSpec::new(l.clone(), l.clone(), l)
    }

    /// A bundle whose nef region has a genuinely curved boundary.
    pub fn conic_demo() -> Self {
        BundleSpec::new(NsClass::from_ints(4, 4, 1), NsClass::f1(), NsClass::from_ints(-1, 9, 1))
    }

    pub fn preset(name: &str) -> Result<Self, BundleError> {
        match name {
            "nakayama-6.5" | "nakayama" => Ok(Self::nakayama()),
            "trivial-ample" => Ok(Self::trivial(NsClass::from_ints(4, 4, 1))),
            "conic-demo" => Ok(Self::conic_demo()),
            other => Err(BundleError::UnknownPreset(other.to_string())),
        }
    }

    pub const PRESETS: [&'static str; 3] = ["nakayama-6.5", "trivial-ample", "conic-demo"];

    pub fn t1(&self) -> NsClass {
        self.l1.clone() - self.l0.clone()
    }

    pub fn t2(&self) -> NsClass {
        self.l2.clone() - self.l0.clone()
    }

    /// `𝕃 = π*L₀ + D_h`.
    pub fn tautological(&self) -> BundleDivisor {
        BundleDivisor::new(self.l0.clone(), Rat::one())
    }
}

/// `π*M + c·D_h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleDivisor {
    pub base: NsClass,
    #[serde(with = "crate::scalar::serde_rat")]
    pub h_coeff: Rat,
}

impl BundleDivisor {
    pub fn new(base: NsClass, h_coeff: Rat) -> Self {
        BundleDivisor { base, h_coeff }
    }

    /// `π*M`.
    pub fn pullback(base: NsClass) -> Self {
        BundleDivisor::new(base, Rat::zero())
    }

    /// `D_h = O_X(1)`.
    pub fn hyperplane() -> Self {
        BundleDivisor::new(NsClass::default(), Rat::one())
    }

    pub fn scale(&self, k: &Rat) -> Self {
        BundleDivisor::new(self.base.scale(k), &self.h_coeff * k)
    }

    pub fn add(&self, o: &Self) -> Self {
        BundleDivisor::new(self.base.clone() + o.base.clone(), &self.h_coeff + &o.h_coeff)
    }

    /// `self + t·dir`.
    pub fn plus_scaled(&self, dir: &Self, t: &Rat) -> Self {
        self.add(&dir.scale(t))
    }
}

/// `M + x·T₁ + y·T₂`.
pub fn beta<T: Scalar>(spec: &BundleSpec, div: &BundleDivisor, x: &T, y: &T) -> NsClass<T> {
    let lift = |c: &NsClass| c.map(|v| T::from(v.clone()));
    lift(&div.base) + lift(&spec.t1()).scale(x) + lift(&spec.t2()).scale(y)
}

/// `K_X = π*(L₁ + L₂ − 2L₀) − 3H`, using `K_S = 0`.
pub fn canonical_class(spec: &BundleSpec) -> BundleDivisor {
    let base = spec.l1.clone() + spec.l2.clone() - spec.l0.scale(&rat_int(2));
    BundleDivisor::new(base, rat_int(-3))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    ExactPolygon {
        polygon: Polygon,
    },
    /// `inner ⊆ region ⊆ outer`, both rational.
    Sandwich {
        inner: Polygon,
        outer: Polygon,
        segments: usize,
    },
}

impl Region {
    pub fn is_exact(&self) -> bool {
        matches!(self, Region::ExactPolygon { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Region::ExactPolygon { .. } => "exact-polygon",
            Region::Sandwich { .. } => "sandwich",
        }
    }

    pub fn exact(&self) -> Option<&Polygon> {
        match self {
            Region::ExactPolygon { polygon } => Some(polygon),
            Region::Sandwich { .. } => None,
        }
    }

    /// Inner polygon; the polygon itself for exact regions.
    pub fn inner(&self) -> &Polygon {
        match self {
            Region::ExactPolygon { polygon } => polygon,
            Region::Sandwich { inner, .. } => inner,
        }
    }

    pub fn outer(&self) -> &Polygon {
        match self {
            Region::ExactPolygon { polygon } => polygon,
            Region::Sandwich { outer, .. } => outer,
        }
    }

    pub fn clip(&self, h: &HalfPlane) -> Region {
        match self {
            Region::ExactPolygon { polygon } => Region::ExactPolygon {
                polygon: polygon.clip(h),
            },
            Region::Sandwich { inner, outer, segments } => Region::Sandwich {
                inner: inner.clip(h),
                outer: outer.clip(h),
                segments: *segments,
            },
        }
    }

    /// Boundary inequalities of the (inner) polygon, each scaled so the
    /// `y` coefficient is ±1 where possible.
    pub fn inequalities(&self) -> Vec<HalfPlane> {
        edge_inequalities(self.inner())
    }
}

/// Half-planes bounding a convex polygon, one per edge.
pub fn edge_inequalities(p: &Polygon) -> Vec<HalfPlane> {
    p.edges()
        .into_iter()
        .map(|(u, v)| {
            let a = -(&v.y - &u.y);
            let b = &v.x - &u.x;
            let c = -(&a * &u.x + &b * &u.y);
            let norm = if !b.is_zero() { b.abs() } else { a.abs() };
            HalfPlane::new(&a / &norm, &b / &norm, &c / &norm)
        })
        .collect()
}

/// The density `(M + xT₁ + yT₂)²` of the divisor.
pub fn density(spec: &BundleSpec, div: &BundleDivisor) -> QuadDensity {
    let m = &div.base;
    let (t1, t2) = (spec.t1(), spec.t2());
    let two = rat_int(2);
    QuadDensity {
        c00: m.intersect(m),
        c10: &two * m.intersect(&t1),
        c01: &two * m.intersect(&t2),
        c20: t1.intersect(&t1),
        c11: &two * t1.intersect(&t2),
        c02: t2.intersect(&t2),
    }
}

/// `deg(M + xT₁ + yT₂) ≥ 0` as a half-plane; `c ≥ 0` in diagonal coordinates.
fn degree_half_plane(spec: &BundleSpec, div: &BundleDivisor) -> HalfPlane {
    HalfPlane::new(
        spec.t1().degree_sum().into(),
        spec.t2().degree_sum().into(),
        div.base.degree_sum().into(),
    )
}

/// How the boundary conic `Q(x, y) = 0` of the density decomposes.
#[derive(Clone, Debug, PartialEq)]
pub enum ConicShape {
    /// `Q` is the constant given.
    Constant(Rat),
    /// `Q` is affine; the half-plane is `Q ≥ 0`.
    Affine(Box<HalfPlane>),
    /// `Q` has this sign away from a point or a line.
    ConstantSign(i32),
    /// `Q = k·l₁·l₂` for real lines (given as `lᵢ ≥ 0`).
    Lines { k: QuadNum, lines: Vec<HalfPlane> },
    /// Nondegenerate conic.
    Proper,
}

fn conic_det(q: &QuadDensity) -> Rat {
    let h = rat(1, 2);
    let (a, b, c) = (q.c20.clone(), &q.c11 * &h, q.c02.clone());
    let (d, e, f) = (&q.c10 * &h, &q.c01 * &h, q.c00.clone());
    &a * (&c * &f - &e * &e) - &b * (&b * &f - &e * &d) + &d * (&b * &e - &c * &d)
}

/// Factors a degenerate conic with `u²` coefficient `a ≠ 0`, in variables
/// `(u, v)`; returns line coefficients `(cu, cv, c0)` and the scalar `k`.
fn split_in_u(a: &Rat, b: &Rat, c: &Rat, d: &Rat, e: &Rat, f: &Rat) -> Result<(QuadNum, Vec<[QuadNum; 3]>), i32> {
    // 4a·Q = (2a·u + b·v + d)² − Δ(v),  Δ(v) = P v² + R v + S
    let four = rat_int(4);
    let p = b * b - &four * a * c;
    let r = rat_int(2) * b * d - &four * a * e;
    let s = d * d - &four * a * f;
    let k = QuadNum::from_rat(Rat::one() / (&four * a));
    let base = [
        QuadNum::from_rat(rat_int(2) * a),
        QuadNum::from_rat(b.clone()),
        QuadNum::from_rat(d.clone()),
    ];
    let sign_a = rat_sign(a);
    if p.is_positive() {
        // Δ = P·(v + R/2P)²
        let root = QuadNum::sqrt_rat(&p).expect("positive rational");
        let shift = QuadNum::from_rat(&r / (rat_int(2) * &p));
        let mk = |sgn: i64| {
            let s = QuadNum::from_int(sgn);
            [base[0].clone(), &base[1] + &s * &root, &base[2] + &s * &root * &shift]
        };
        Ok((k, vec![mk(1), mk(-1)]))
    } else if p.is_negative() {
        Err(sign_a)
    } else if s.is_positive() {
        let root = QuadNum::sqrt_rat(&s).expect("positive rational");
        let mk = |sgn: i64| {
            [
                base[0].clone(),
                base[1].clone(),
                &base[2] + QuadNum::from_int(sgn) * &root,
            ]
        };
        Ok((k, vec![mk(1), mk(-1)]))
    } else {
        Err(sign_a)
    }
}

pub fn classify_conic(q: &QuadDensity) -> ConicShape {
    let (a, b, c, d, e, f) = (&q.c20, &q.c11, &q.c02, &q.c10, &q.c01, &q.c00);
    if a.is_zero() && b.is_zero() && c.is_zero() {
        if d.is_zero() && e.is_zero() {
            return ConicShape::Constant(f.clone());
        }
        return ConicShape::Affine(Box::new(HalfPlane::new(
            d.clone().into(),
            e.clone().into(),
            f.clone().into(),
        )));
    }
    if !conic_det(q).is_zero() {
        return ConicShape::Proper;
    }
    let to_lines = |k: QuadNum, ls: Vec<[QuadNum; 3]>, swap: bool| {
        let lines = ls
            .into_iter()
            .map(|[cu, cv, c0]| {
                if swap {
                    HalfPlane::new(cv, cu, c0)
                } else {
                    HalfPlane::new(cu, cv, c0)
                }
            })
            .collect();
        ConicShape::Lines { k, lines }
    };
    if !a.is_zero() {
        match split_in_u(a, b, c, d, e, f) {
            Ok((k, ls)) => to_lines(k, ls, false),
            Err(s) => ConicShape::ConstantSign(s),
        }
    } else if !c.is_zero() {
        match split_in_u(c, b, a, e, d, f) {
            Ok((k, ls)) => to_lines(k, ls, true),
            Err(s) => ConicShape::ConstantSign(s),
        }
    } else {
        // Q = b·(x + e/b)(y + d/b)
        let lx = HalfPlane::new(QuadNum::one(), QuadNum::zero(), QuadNum::from_rat(e / b));
        let ly = HalfPlane::new(QuadNum::zero(), QuadNum::one(), QuadNum::from_rat(d / b));
        ConicShape::Lines {
            k: QuadNum::from_rat(b.clone()),
            lines: vec![lx, ly],
        }
    }
}

/// Exact extrema of a quadratic over a convex polygon: `(min, max)`.
pub fn quadratic_extrema(q: &QuadDensity, poly: &Polygon) -> Option<(QuadNum, QuadNum)> {
    if poly.is_empty() {
        return None;
    }
    let mut cands: Vec<QuadNum> = poly.vertices.iter().map(|p| q.eval(p)).collect();
    let (a, b, c) = (
        QuadNum::from(q.c20.clone()),
        QuadNum::from(q.c11.clone()),
        QuadNum::from(q.c02.clone()),
    );
    let two = QuadNum::from_int(2);
    for (p, r) in poly.edges() {
        let dx = &r.x - &p.x;
        let dy = &r.y - &p.y;
        let (gx, gy) = q.gradient(&p);
        let lin = &gx * &dx + &gy * &dy;
        let quad = &a * &dx * &dx + &b * &dx * &dy + &c * &dy * &dy;
        if !quad.is_zero() {
            let t = -(&lin / (&two * &quad));
            if t.is_positive() && (&t - QuadNum::one()).is_negative() {
                cands.push(q.eval(&Point::new(&p.x + &t * &dx, &p.y + &t * &dy)));
            }
        }
    }
    // interior critical point: [2a b; b 2c]·(x, y) = −(d, e)
    let det = &two * &a * &two * &c - &b * &b;
    if !det.is_zero() {
        let (d, e) = (QuadNum::from(q.c10.clone()), QuadNum::from(q.c01.clone()));
        let x = (-(&d) * &two * &c + &b * &e) / &det;
        let y = (-(&e) * &two * &a + &b * &d) / &det;
        let crit = Point::new(x, y);
        if poly.contains(&crit) {
            cands.push(q.eval(&crit));
        }
    }
    let mut it = cands.into_iter();
    let first = it.next()?;
    let (mut lo, mut hi) = (first.clone(), first);
    for v in it {
        if (&v - &lo).is_negative() {
            lo = v.clone();
        }
        if (&v - &hi).is_positive() {
            hi = v;
        }
    }
    Some((lo, hi))
}

/// The fibrewise nef region at the default conic refinement.
pub fn nef_box(spec: &BundleSpec, div: &BundleDivisor) -> Result<Region, BundleError> {
    nef_box_refined(spec, div, DEFAULT_SEGMENTS)
}

/// Simplex clipped by the degree condition, before the conic is applied.
fn base_polygon(spec: &BundleSpec, div: &BundleDivisor) -> Polygon {
    let c = QuadNum::from(div.h_coeff.clone());
    if !c.is_positive() {
        return Polygon::empty();
    }
    Polygon::simplex(&c).clip(&degree_half_plane(spec, div))
}

pub fn nef_box_refined(spec: &BundleSpec, div: &BundleDivisor, segments: usize) -> Result<Region, BundleError> {
    let p0 = base_polygon(spec, div);
    if p0.is_degenerate() {
        return Err(BundleError::EmptyRegion);
    }
    let q = density(spec, div);
    let exact = |poly: Polygon| {
        if poly.is_degenerate() {
            Err(BundleError::EmptyRegion)
        } else {
            Ok(Region::ExactPolygon { polygon: poly })
        }
    };
    match classify_conic(&q) {
        ConicShape::Constant(f) => {
            if f.is_negative() {
                Err(BundleError::EmptyRegion)
            } else {
                exact(p0)
            }
        }
        ConicShape::Affine(h) => exact(p0.clip(&h)),
        ConicShape::ConstantSign(s) => {
            if s > 0 {
                exact(p0)
            } else {
                Err(BundleError::EmptyRegion)
            }
        }
        ConicShape::Lines { lines, .. } => {
            let mut chosen = Vec::new();
            for mask in 0..(1u32 << lines.len()) {
                let cell = lines.iter().enumerate().fold(p0.clone(), |acc, (i, l)| {
                    if mask & (1 << i) == 0 {
                        acc.clip(l)
                    } else {
                        acc.clip(&l.flipped())
                    }
                });
                if let Some(ip) = cell.interior_point() {
                    if q.eval(&ip).is_positive() {
                        chosen.push(cell);
                    }
                }
            }
            match chosen.len() {
                0 => Err(BundleError::EmptyRegion),
                1 => exact(chosen.pop().expect("one cell")),
                // several positive cells only happen when Q ≥ 0 across a
                // double line, which classify_conic reports as a sign
                _ => exact(Polygon::hull(chosen.into_iter().flat_map(|c| c.vertices).collect())),
            }
        }
        ConicShape::Proper => {
            let (lo, hi) = quadratic_extrema(&q, &p0).expect("nonempty polygon");
            if !lo.is_negative() {
                exact(p0)
            } else if !hi.is_positive() {
                Err(BundleError::EmptyRegion)
            } else {
                sandwich(spec, div, &q, &p0, segments)
            }
        }
    }
}

fn in_region(q: &QuadDensity, p0: &Polygon, p: &Point) -> bool {
    p0.contains(p) && !q.eval(p).is_negative()
}

/// A rational point where the density is largest among a coarse grid of the
/// base polygon's interior, with positive density.
fn interior_seed(q: &QuadDensity, p0: &Polygon, size: &Rat) -> Option<Point> {
    for n in [8i64, 16, 32, 64, 128] {
        let mut best: Option<(f64, Point)> = None;
        for i in 1..n {
            for j in 1..(n - i) {
                let p = Point::rational(size * rat(i, n), size * rat(j, n));
                if !p0.contains_strictly(&p) {
                    continue;
                }
                let v = q.eval(&p);
                if v.is_positive() {
                    let f = v.to_f64();
                    if best.as_ref().is_none_or(|(b, _)| f > *b) {
                        best = Some((f, p));
                    }
                }
            }
        }
        if let Some((_, p)) = best {
            return Some(p);
        }
    }
    None
}

fn f64_to_rat(v: f64, bits: u32) -> Rat {
    let scale = (1u64 << bits) as f64;
    Rat::new(BigInt::from((v * scale).round() as i64), BigInt::from(1u64 << bits))
}

/// Distance along a ray from `from` to the first point where it leaves the
/// base polygon or the density turns negative, in floating point.
fn ray_exit(qf: &[f64; 6], p0: &Polygon, from: (f64, f64), dir: (f64, f64)) -> f64 {
    let (sx, sy) = from;
    let (dx, dy) = dir;
    let mut r = f64::INFINITY;
    for (u, v) in p0.edges() {
        let ((ux, uy), (vx, vy)) = (u.to_f64(), v.to_f64());
        // inward normal for a counterclockwise edge
        let (nx, ny) = (-(vy - uy), vx - ux);
        let dist = nx * (sx - ux) + ny * (sy - uy);
        let rate = nx * dx + ny * dy;
        if rate < 0.0 {
            r = r.min(dist / -rate);
        }
    }
    // Q(s + r·d) = A r² + B r + C with C > 0
    let [c00, c10, c01, c20, c11, c02] = *qf;
    let a = c20 * dx * dx + c11 * dx * dy + c02 * dy * dy;
    let b = c10 * dx + c01 * dy + 2.0 * c20 * sx * dx + c11 * (sx * dy + sy * dx) + 2.0 * c02 * sy * dy;
    let c = c00 + c10 * sx + c01 * sy + c20 * sx * sx + c11 * sx * sy + c02 * sy * sy;
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // numerically stable roots
        let t = -0.5 * (b + b.signum() * sq);
        for root in [t / a, c / t] {
            if root.is_finite() && root > 0.0 {
                r = r.min(root);
            }
        }
    }
    r
}

/// Parameters `s ∈ [0, 1]` where the density vanishes on `from + s·dir`.
fn edge_roots(qf: &[f64; 6], from: (f64, f64), dir: (f64, f64)) -> Vec<f64> {
    let (sx, sy) = from;
    let (dx, dy) = dir;
    let [c00, c10, c01, c20, c11, c02] = *qf;
    let a = c20 * dx * dx + c11 * dx * dy + c02 * dy * dy;
    let b = c10 * dx + c01 * dy + 2.0 * c20 * sx * dx + c11 * (sx * dy + sy * dx) + 2.0 * c02 * sy * dy;
    let c = c00 + c10 * sx + c01 * sy + c20 * sx * sx + c11 * sx * sy + c02 * sy * sy;
    let mut out = Vec::new();
    if a.abs() < 1e-300 {
        if b.abs() > 1e-300 {
            out.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let t = -0.5 * (b + b.signum() * disc.sqrt());
            out.push(t / a);
            if t != 0.0 {
                out.push(c / t);
            }
        }
    }
    out.retain(|s| s.is_finite() && (0.0..=1.0).contains(s));
    out
}

/// A rational null class, i.e. on the boundary of the nef cone, near `b`.
fn nearby_null_class(b: &NsClass) -> Option<NsClass> {
    let v = [b.x.to_f64()?, b.y.to_f64()?, b.z.to_f64()?];
    let pairs = [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)];
    let (i, j, k) = pairs.into_iter().max_by(|p, q| {
        (v[p.0] + v[p.1])
            .partial_cmp(&(v[q.0] + v[q.1]))
            .unwrap_or(std::cmp::Ordering::Equal)
    })?;
    let scale = v.iter().map(|t| t.abs()).fold(0.0, f64::max).max(1e-300);
    let (u, w) = (v[i] / scale, v[j] / scale);
    if u + w <= 1e-12 {
        return None;
    }
    let (ru, rw) = (f64_to_rat(u, 40), f64_to_rat(w, 40));
    let sum = &ru + &rw;
    if !sum.is_positive() {
        return None;
    }
    // the third coordinate solves uw + t(u + w) = 0
    let rt = -(&ru * &rw) / sum;
    let mut out = [Rat::zero(), Rat::zero(), Rat::zero()];
    out[i] = ru;
    out[j] = rw;
    out[k] = rt;
    let [x, y, z] = out;
    Some(NsClass { x, y, z })
}

fn sandwich(
    spec: &BundleSpec,
    div: &BundleDivisor,
    q: &QuadDensity,
    p0: &Polygon,
    segments: usize,
) -> Result<Region, BundleError> {
    let seed = interior_seed(q, p0, &div.h_coeff).ok_or(BundleError::EmptyRegion)?;
    let reach = QuadNum::from_rat(rat_int(4) * &div.h_coeff + rat_int(4));
    let mut inner_pts: Vec<Point> = p0.vertices.iter().filter(|p| in_region(q, p0, p)).cloned().collect();
    let mut cuts: Vec<HalfPlane> = Vec::new();
    let (t1, t2) = (spec.t1(), spec.t2());
    let (sx, sy) = seed.to_f64();
    let qf = [
        q.c00.to_f64(),
        q.c10.to_f64(),
        q.c01.to_f64(),
        q.c20.to_f64(),
        q.c11.to_f64(),
        q.c02.to_f64(),
    ]
    .map(|v| v.expect("finite coefficient"));
    let null_cut = |p: &Point| {
        let bx = p.x.as_rat().expect("rational point").clone();
        let by = p.y.as_rat().expect("rational point").clone();
        // γ nef ⇒ γ·β ≥ 0 on the whole region
        nearby_null_class(&beta(spec, div, &bx, &by)).map(|g| {
            HalfPlane::new(
                g.intersect(&t1).into(),
                g.intersect(&t2).into(),
                g.intersect(&div.base).into(),
            )
        })
    };
    // corners where the conic crosses the base polygon's edges
    for (u, v) in p0.edges() {
        let ((ux, uy), (vx, vy)) = (u.to_f64(), v.to_f64());
        for s in edge_roots(&qf, (ux, uy), (vx - ux, vy - uy)) {
            for nudge in [1e-13, -1e-13, 1e-10, -1e-10, 1e-7, -1e-7] {
                let t = f64_to_rat((s + nudge).clamp(0.0, 1.0), 52);
                let p = Point::new(
                    &u.x + QuadNum::from_rat(t.clone()) * (&v.x - &u.x),
                    &u.y + QuadNum::from_rat(t) * (&v.y - &u.y),
                );
                if in_region(q, p0, &p) {
                    cuts.extend(null_cut(&p));
                    inner_pts.push(p);
                    break;
                }
            }
        }
    }
    for k in 0..segments {
        let theta = 2.0 * PI * (k as f64) / (segments as f64);
        let dir = Point::rational(f64_to_rat(theta.cos(), 24), f64_to_rat(theta.sin(), 24));
        let along = |r: &QuadNum| Point::new(&seed.x + r * &dir.x, &seed.y + r * &dir.y);
        let r_hit = ray_exit(&qf, p0, (sx, sy), dir.to_f64()).min(reach.to_f64());
        // step back from the floating-point exit until exactly inside
        let mut lo = QuadNum::zero();
        let mut back = 1e-12;
        for _ in 0..40 {
            let r = QuadNum::from_rat(f64_to_rat(r_hit * (1.0 - back), 52));
            if r.is_positive() && in_region(q, p0, &along(&r)) {
                lo = r;
                break;
            }
            back *= 8.0;
        }
        let p_in = along(&lo);
        cuts.extend(null_cut(&p_in));
        inner_pts.push(p_in);
    }
    let inner = Polygon::hull(inner_pts);
    let outer = p0.clip_all(cuts.iter());
    if inner.is_degenerate() {
        return Err(BundleError::EmptyRegion);
    }
    Ok(Region::Sandwich { inner, outer, segments })
}

/// Outcome of the bigness test, with the witness found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigWitness {
    pub big: bool,
    pub witness: Option<Point>,
}

/// Big iff some rational `(x, y)` of the region has `x + y < c` and an
/// ample class `M + xT₁ + yT₂`.
pub fn is_big(spec: &BundleSpec, div: &BundleDivisor) -> BigWitness {
    let no = BigWitness {
        big: false,
        witness: None,
    };
    let Ok(region) = nef_box(spec, div) else {
        return no;
    };
    let c = &div.h_coeff;
    let check =
        |x: &Rat, y: &Rat| !x.is_negative() && !y.is_negative() && (x + y) < *c && beta(spec, div, x, y).is_ample();
    let mut candidates = vec![(Rat::zero(), Rat::zero())];
    if let Some(ip) = region.inner().interior_point() {
        for bits in [4u32, 8, 16, 32, 48] {
            candidates.push((ip.x.rational_floor_approx(bits), ip.y.rational_floor_approx(bits)));
        }
    }
    for (x, y) in candidates {
        if check(&x, &y) {
            return BigWitness {
                big: true,
                witness: Some(Point::rational(x, y)),
            };
        }
    }
    no
}

/// Slope `κ = 2√6/5` of the nef edge `y = κ(1 − x)` of the Nakayama region.
pub fn nakayama_edge_slope() -> QuadNum {
    QuadNum::surd(rat(2, 5), 6)
}

/// Round a polygon's vertices to a readable approximate list.
pub fn approx_vertices(p: &Polygon) -> Vec<(f64, f64)> {
    p.vertices.iter().map(|v| v.to_f64()).collect()
}

/// Whether `M + xT₁ + yT₂` is nef at a rational point inside the simplex;
/// the pointwise definition of the region.
pub fn point_in_box(spec: &BundleSpec, div: &BundleDivisor, x: &Rat, y: &Rat) -> bool {
    !x.is_negative() && !y.is_negative() && (x + y) <= div.h_coeff && beta(spec, div, x, y).is_nef()
}
