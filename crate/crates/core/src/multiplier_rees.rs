//! Monomial multiplier ideals of the Nakayama family in the fibre chart, their
//! Newton polygons, and the Rees valuations attached to the polygon sides.
//!
//! The ideal `J_p` is generated by the monomials `z₁^m₁ z₂^m₂` with
//! `m₁/α + m₂/β > 1`, where `α = (p−g₁)/d` and
//! `β = ((1−κ)p + κ·g₀ − g₁)/d` for `κ = 2√6/5`.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{rat, rat_int, QuadNum, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReesError {
    #[error("thresholds degenerate at p = {0}: d or beta is not positive")]
    DegenerateThreshold(u64),
    #[error("empty ideal")]
    EmptyIdeal,
}

/// `κ = 2√6/5`.
pub fn kappa() -> QuadNum {
    QuadNum::surd(rat(2, 5), 6)
}

/// `1 − κ`.
pub fn kappa_prime() -> QuadNum {
    QuadNum::one() - kappa()
}

/// `C = (4.9 − 2√6)/5 = 49/50 − (2/5)√6`, the linear growth constant of the
/// thresholds.
pub fn growth_constant() -> QuadNum {
    QuadNum::new(rat(49, 50), rat(-2, 5), 6)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub p: u64,
    pub g0: u64,
    pub g1: u64,
    pub alpha: QuadNum,
    pub beta: QuadNum,
    pub d: QuadNum,
}

impl Thresholds {
    pub fn new(p: u64, g0: u64, g1: u64) -> Result<Self, ReesError> {
        if p <= g1 {
            return Err(ReesError::DegenerateThreshold(p));
        }
        let pq = QuadNum::from_int(p as i64);
        let num_a = QuadNum::from_int((p - g1) as i64);
        let num_b = kappa_prime() * &pq + kappa().scale(&rat_int(g0 as i64)) - QuadNum::from_int(g1 as i64);
        if !num_b.is_positive() {
            return Err(ReesError::DegenerateThreshold(p));
        }
        let d = QuadNum::one() - num_a.recip() - num_b.recip();
        if !d.is_positive() {
            return Err(ReesError::DegenerateThreshold(p));
        }
        let alpha = &num_a / &d;
        let beta = &num_b / &d;
        Ok(Thresholds {
            p,
            g0,
            g1,
            alpha,
            beta,
            d,
        })
    }

    /// Limits of `α/p` and `β/p` as `p → ∞`: the leading coefficients of the
    /// numerators, since `d → 1`.
    pub fn limit_ratios() -> (QuadNum, QuadNum) {
        (QuadNum::one(), kappa_prime())
    }

    /// `α ≥ C·p` and `β ≥ C·p`.
    pub fn linear_growth_holds(&self) -> bool {
        let cp = growth_constant().scale(&rat_int(self.p as i64));
        !(&self.alpha - &cp).is_negative() && !(&self.beta - &cp).is_negative()
    }
}

pub fn thresholds(p: u64, g0: u64, g1: u64) -> Result<Thresholds, ReesError> {
    Thresholds::new(p, g0, g1)
}

/// Smallest `p₀` such that the thresholds exist and grow at least like `C·p`
/// for every `p` in `[p₀, limit]`.
pub fn growth_onset(g0: u64, g1: u64, limit: u64) -> Option<u64> {
    let mut onset = None;
    for p in (g1 + 1)..=limit {
        let ok = Thresholds::new(p, g0, g1)
            .map(|t| t.linear_growth_holds())
            .unwrap_or(false);
        match (ok, onset) {
            (true, None) => onset = Some(p),
            (false, _) => onset = None,
            _ => {}
        }
    }
    onset
}

/// Minimal generators `(m₁, m₂)`, sorted by `m₁` ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialIdeal2 {
    pub generators: Vec<(u64, u64)>,
}

impl MonomialIdeal2 {
    pub fn contains(&self, m: (u64, u64)) -> bool {
        self.generators.iter().any(|&(a, b)| a <= m.0 && b <= m.1)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Whether no generator divides another.
    pub fn is_antichain(&self) -> bool {
        self.generators.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1)
    }
}

fn to_u64(n: num_bigint::BigInt) -> u64 {
    n.to_u64().expect("exponent fits in u64")
}

/// `m₁/α + m₂/β > 1`, exactly.
pub fn strictly_above(alpha: &QuadNum, beta: &QuadNum, m: (u64, u64)) -> bool {
    let lhs = beta.scale(&rat_int(m.0 as i64)) + alpha.scale(&rat_int(m.1 as i64));
    (lhs - alpha * beta).is_positive()
}

/// Smallest `m` with `m > v`, clamped at 0.
fn next_above(v: &QuadNum) -> u64 {
    if v.is_negative() {
        0
    } else {
        to_u64(v.floor() + 1)
    }
}

/// Minimal generators of `{m₁/α + m₂/β > 1}`. Walks the shorter axis: for
/// each `m₂` the least admissible `m₁` is `⌊α(1 − m₂/β)⌋ + 1`, and a column
/// contributes a generator when that least value jumps.
pub fn staircase(alpha: &QuadNum, beta: &QuadNum) -> MonomialIdeal2 {
    assert!(alpha.is_positive() && beta.is_positive(), "thresholds must be positive");
    if alpha.to_f64() < beta.to_f64() {
        let mut g = staircase(beta, alpha);
        g.generators = g.generators.into_iter().rev().map(|(a, b)| (b, a)).collect();
        return g;
    }
    let top = to_u64(beta.floor()) + 1;
    let ratio = alpha / beta;
    let least = |m2: u64| next_above(&(alpha - ratio.scale(&rat_int(m2 as i64))));
    let mut gens = Vec::new();
    let mut prev = least(top);
    for m2 in (0..top).rev() {
        let cur = least(m2);
        if cur > prev {
            gens.push((prev, m2 + 1));
        }
        prev = cur;
    }
    gens.push((prev, 0));
    MonomialIdeal2 { generators: gens }
}

/// Same ideal, one `m₁` column at a time; the direct transcription used as
/// an oracle for [`staircase`].
pub fn staircase_by_columns(alpha: &QuadNum, beta: &QuadNum) -> MonomialIdeal2 {
    let top = to_u64(alpha.floor()) + 1;
    let ratio = beta / alpha;
    let mut gens: Vec<(u64, u64)> = Vec::new();
    for m1 in 0..=top {
        let m2 = next_above(&(beta - ratio.scale(&rat_int(m1 as i64))));
        if gens.last().is_none_or(|&(_, b)| m2 < b) {
            gens.push((m1, m2));
        }
        if m2 == 0 {
            break;
        }
    }
    MonomialIdeal2 { generators: gens }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(u64, u64)>,
}

impl NewtonPolygon {
    pub fn sides(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

fn turn(o: (u64, u64), a: (u64, u64), b: (u64, u64)) -> i128 {
    let (ox, oy) = (o.0 as i128, o.1 as i128);
    (a.0 as i128 - ox) * (b.1 as i128 - oy) - (a.1 as i128 - oy) * (b.0 as i128 - ox)
}

/// Compact part of the boundary of `conv(generators) + ℝ²₊`.
pub fn newton_polygon(ideal: &MonomialIdeal2) -> Result<NewtonPolygon, ReesError> {
    if ideal.is_empty() {
        return Err(ReesError::EmptyIdeal);
    }
    let mut hull: Vec<(u64, u64)> = Vec::new();
    for &p in &ideal.generators {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(NewtonPolygon { vertices: hull })
}

/// Data of the Rees valuation of one polygon side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReesDatum {
    pub side: usize,
    pub a: u64,
    pub b: u64,
    pub ord: u64,
    pub log_discrepancy: u64,
    #[serde(with = "crate::scalar::serde_rat")]
    pub tau: Rat,
    #[serde(with = "crate::scalar::serde_rat")]
    pub w: Rat,
}

pub fn rees_data(np: &NewtonPolygon) -> Vec<ReesDatum> {
    np.vertices
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            let (ra, rb) = (y0 - y1, x1 - x0);
            let raw_ord = ra * x1 + rb * y1;
            assert_eq!(ra * x0 + rb * y0, raw_ord, "side functional must be constant on a side");
            let g = ra.gcd(&rb);
            let (a, b) = (ra / g, rb / g);
            let ord = a * x1 + b * y1;
            let w = Rat::new((a + b).into(), ord.into());
            debug_assert_eq!(w, Rat::new((ra + rb).into(), raw_ord.into()));
            ReesDatum {
                side: i + 1,
                a,
                b,
                ord,
                log_discrepancy: a + b,
                tau: Rat::new(b.into(), a.into()),
                w,
            }
        })
        .collect()
}

pub fn w_max(np: &NewtonPolygon) -> Rat {
    rees_data(np).into_iter().map(|r| r.w).max().unwrap_or_else(Rat::zero)
}

/// `max(w(E₁), w(E_r))`.
pub fn w_endpoints(np: &NewtonPolygon) -> Rat {
    let data = rees_data(np);
    match (data.first(), data.last()) {
        (Some(f), Some(l)) => f.w.clone().max(l.w.clone()),
        _ => Rat::zero(),
    }
}

/// `ord` by brute force: the least value of the side functional on the
/// generators.
pub fn ord_brute(ideal: &MonomialIdeal2, a: u64, b: u64) -> u64 {
    ideal.generators.iter().map(|&(x, y)| a * x + b * y).min().unwrap_or(0)
}

/// Bound for `w(E₁)`:
/// `1/β + (⌊β⌋+1−β)/(⌊β⌋+1) + (β/(⌊β⌋+1))/α`.
fn first_side_bound(alpha: &QuadNum, beta: &QuadNum) -> QuadNum {
    let n = QuadNum::from_rat(Rat::from_integer(beta.floor() + 1));
    beta.recip() + (&n - beta) / &n + (beta / &n) / alpha
}

/// Upper bound for `max(w(E₁), w(E_r))`; the bound for `E_r` swaps the roles
/// of `α` and `β`.
pub fn endpoint_bound(alpha: &QuadNum, beta: &QuadNum) -> QuadNum {
    let b1 = first_side_bound(alpha, beta);
    let br = first_side_bound(beta, alpha);
    if (&b1 - &br).is_negative() {
        br
    } else {
        b1
    }
}

/// Everything the driver needs from one `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealSummary {
    pub thresholds: Thresholds,
    pub generator_count: usize,
    pub polygon: NewtonPolygon,
    pub rees: Vec<ReesDatum>,
    #[serde(with = "crate::scalar::serde_rat")]
    pub w_max: Rat,
    pub endpoint_bound: QuadNum,
}

pub fn summarize(p: u64, g0: u64, g1: u64) -> Result<IdealSummary, ReesError> {
    let t = Thresholds::new(p, g0, g1)?;
    let ideal = staircase(&t.alpha, &t.beta);
    let polygon = newton_polygon(&ideal)?;
    let rees = rees_data(&polygon);
    let w_max = rees.iter().map(|r| r.w.clone()).max().unwrap_or_else(Rat::zero);
    let endpoint_bound = endpoint_bound(&t.alpha, &t.beta);
    Ok(IdealSummary {
        generator_count: ideal.len(),
        thresholds: t,
        polygon,
        rees,
        w_max,
        endpoint_bound,
    })
}

/// Expected endpoints `(0, ⌊β⌋+1)` and `(⌊α⌋+1, 0)`.
pub fn expected_endpoints(alpha: &QuadNum, beta: &QuadNum) -> ((u64, u64), (u64, u64)) {
    ((0, to_u64(beta.floor()) + 1), (to_u64(alpha.floor()) + 1, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> QuadNum {
        QuadNum::from_rat(rat(n, d))
    }

    fn gens(v: &[(u64, u64)]) -> MonomialIdeal2 {
        MonomialIdeal2 { generators: v.to_vec() }
    }

    /// Minimal elements of the strict region over a grid.
    fn enumerate(alpha: &QuadNum, beta: &QuadNum, n: u64) -> Vec<(u64, u64)> {
        let inside: Vec<(u64, u64)> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&m| strictly_above(alpha, beta, m))
            .collect();
        let mut mins: Vec<(u64, u64)> = inside
            .iter()
            .copied()
            .filter(|&(a, b)| !inside.iter().any(|&(c, d)| (c, d) != (a, b) && c <= a && d <= b))
            .collect();
        mins.sort();
        mins
    }

    #[test]
    fn staircase_examples() {
        assert_eq!(staircase(&q(1, 1), &q(1, 1)), gens(&[(0, 2), (1, 1), (2, 0)]));
        assert_eq!(staircase(&q(1, 2), &q(1, 2)), gens(&[(0, 1), (1, 0)]));
        let (a, b) = (q(5, 2), q(3, 2));
        let s = staircase(&a, &b);
        assert_eq!(s.generators, enumerate(&a, &b, 6));
        assert_eq!(s.generators.first(), Some(&(0, 2)));
        assert_eq!(s.generators.last(), Some(&(3, 0)));
        for (a, b) in [(q(1, 1), q(1, 1)), (q(1, 2), q(1, 2)), (q(7, 3), q(9, 4))] {
            assert_eq!(staircase(&a, &b).generators, enumerate(&a, &b, 8));
            assert_eq!(staircase(&a, &b), staircase_by_columns(&a, &b));
        }
    }

    #[test]
    fn newton_polygon_examples() {
        let np = newton_polygon(&gens(&[(0, 1), (1, 0)])).unwrap();
        assert_eq!(np.vertices, vec![(0, 1), (1, 0)]);
        let np = newton_polygon(&gens(&[(0, 3), (1, 1), (3, 0)])).unwrap();
        assert_eq!(np.vertices, vec![(0, 3), (1, 1), (3, 0)]);
        let np = newton_polygon(&gens(&[(0, 2), (1, 1), (2, 0)])).unwrap();
        assert_eq!(np.vertices, vec![(0, 2), (2, 0)]);
        assert_eq!(newton_polygon(&gens(&[])), Err(ReesError::EmptyIdeal));
    }

    #[test]
    fn rees_examples() {
        let r = rees_data(&NewtonPolygon {
            vertices: vec![(0, 1), (1, 0)],
        });
        assert_eq!((r[0].a, r[0].b, r[0].ord, r[0].log_discrepancy), (1, 1, 1, 2));
        assert_eq!(r[0].w, rat_int(2));
        let r = rees_data(&NewtonPolygon {
            vertices: vec![(0, 1), (2, 0)],
        });
        assert_eq!((r[0].a, r[0].b, r[0].ord, r[0].log_discrepancy), (1, 2, 2, 3));
        assert_eq!(r[0].w, rat(3, 2));
        // (0,2)-(2,0) has raw normal (2,2)
        let r = rees_data(&NewtonPolygon {
            vertices: vec![(0, 2), (2, 0)],
        });
        assert_eq!((r[0].a, r[0].b, r[0].ord), (1, 1, 2));
        assert_eq!(r[0].w, rat(4, 4));
        assert_eq!(
            w_max(&NewtonPolygon {
                vertices: vec![(0, 1), (1, 0)]
            }),
            rat_int(2)
        );
    }

    #[test]
    fn thresholds_example() {
        let t = thresholds(1000, 10, 10).unwrap();
        assert!(t.alpha.is_positive() && t.beta.is_positive() && t.d.is_positive());
        let c = growth_constant();
        for p in [1_000u64, 10_000, 100_000] {
            let t = thresholds(p, 1, 1).unwrap();
            let gap = (&t.d - QuadNum::one()).abs();
            let bound = QuadNum::from_int(4) / c.scale(&rat_int(p as i64));
            assert!((gap - bound).is_negative());
        }
        assert_eq!(thresholds(1, 1, 1), Err(ReesError::DegenerateThreshold(1)));
        assert!(thresholds(3, 1, 1).is_err());
        assert_eq!(growth_constant().to_decimal(8), "0.00020410");
    }

    #[test]
    fn nakayama_staircase_matches_column_oracle() {
        for p in [1_000u64, 4_321] {
            let t = thresholds(p, 1, 1).unwrap();
            let s = staircase(&t.alpha, &t.beta);
            assert_eq!(s, staircase_by_columns(&t.alpha, &t.beta));
            assert!(s.is_antichain());
            let np = newton_polygon(&s).unwrap();
            let (first, last) = expected_endpoints(&t.alpha, &t.beta);
            assert_eq!(np.vertices.first(), Some(&first));
            assert_eq!(np.vertices.last(), Some(&last));
            let wm = w_max(&np);
            assert_eq!(wm, w_endpoints(&np));
            assert!(!(endpoint_bound(&t.alpha, &t.beta) - QuadNum::from_rat(wm)).is_negative());
        }
    }
}
