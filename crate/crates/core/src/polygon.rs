//! Convex polygons with exact vertices in `Q(√d)`: half-plane clipping,
//! fan triangulation, and exact integration of quadratic densities.

use std::cmp::Ordering;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::scalar::{rat, QuadNum, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: QuadNum,
    pub y: QuadNum,
}

impl Point {
    pub fn new(x: QuadNum, y: QuadNum) -> Self {
        Point { x, y }
    }

    pub fn rational(x: Rat, y: Rat) -> Self {
        Point {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn origin() -> Self {
        Point {
            x: QuadNum::zero(),
            y: QuadNum::zero(),
        }
    }

    pub fn scale(&self, k: &QuadNum) -> Point {
        Point {
            x: &self.x * k,
            y: &self.y * k,
        }
    }

    pub fn midpoint(&self, o: &Point) -> Point {
        let half = QuadNum::from_rat(rat(1, 2));
        Point {
            x: (&self.x + &o.x) * &half,
            y: (&self.y + &o.y) * &half,
        }
    }

    fn lex_cmp(&self, o: &Point) -> Ordering {
        self.x
            .partial_cmp(&o.x)
            .expect("comparable coordinates")
            .then_with(|| self.y.partial_cmp(&o.y).expect("comparable coordinates"))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

/// `(b − a) × (c − a)`; positive for a counterclockwise turn.
pub fn cross(a: &Point, b: &Point, c: &Point) -> QuadNum {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

/// `a·x + b·y + c ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a: QuadNum,
    pub b: QuadNum,
    pub c: QuadNum,
}

impl HalfPlane {
    pub fn new(a: QuadNum, b: QuadNum, c: QuadNum) -> Self {
        HalfPlane { a, b, c }
    }

    pub fn eval(&self, p: &Point) -> QuadNum {
        &self.a * &p.x + &self.b * &p.y + &self.c
    }

    pub fn contains(&self, p: &Point) -> bool {
        !self.eval(p).is_negative()
    }

    pub fn flipped(&self) -> HalfPlane {
        HalfPlane {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
        }
    }

    /// Same line, with the coefficients scaled so that the first nonzero of
    /// `(b, a)` is 1 when describing the boundary as `y = m·x + k`.
    pub fn as_slope_intercept(&self) -> Option<(QuadNum, QuadNum)> {
        if self.b.is_zero() {
            return None;
        }
        let m = -(&self.a / &self.b);
        let k = -(&self.c / &self.b);
        Some((m, k))
    }

    /// Human-readable inequality.
    pub fn describe(&self) -> String {
        format!("({})·x + ({})·y + ({}) ≥ 0", self.a, self.b, self.c)
    }
}

/// Convex polygon, vertices counterclockwise with no repeated or collinear
/// vertices. Fewer than three vertices means the polygon is degenerate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    /// Normalizes an ordered boundary of a convex set.
    pub fn new(vertices: Vec<Point>) -> Self {
        let mut p = Polygon { vertices };
        p.normalize();
        p
    }

    pub fn empty() -> Self {
        Polygon { vertices: Vec::new() }
    }

    pub fn triangle(a: Point, b: Point, c: Point) -> Self {
        Polygon::new(vec![a, b, c])
    }

    /// Simplex `{x, y ≥ 0, x + y ≤ size}`.
    pub fn simplex(size: &QuadNum) -> Self {
        Polygon::triangle(
            Point::origin(),
            Point::new(size.clone(), QuadNum::zero()),
            Point::new(QuadNum::zero(), size.clone()),
        )
    }

    fn normalize(&mut self) {
        let mut v: Vec<Point> = Vec::with_capacity(self.vertices.len());
        for p in self.vertices.drain(..) {
            if v.last() != Some(&p) {
                v.push(p);
            }
        }
        while v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        // drop collinear vertices until stable
        loop {
            let n = v.len();
            if n < 3 {
                break;
            }
            let idx = (0..n).find(|&i| cross(&v[(i + n - 1) % n], &v[i], &v[(i + 1) % n]).is_zero());
            match idx {
                Some(i) => {
                    v.remove(i);
                }
                None => break,
            }
        }
        if v.len() >= 3 {
            let a = signed_area2(&v);
            if a.is_negative() {
                v.reverse();
            }
        }
        self.vertices = v;
    }

    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> QuadNum {
        if self.is_degenerate() {
            return QuadNum::zero();
        }
        signed_area2(&self.vertices) * QuadNum::from_rat(rat(1, 2))
    }

    /// Vertex average; an interior point of a nondegenerate convex polygon.
    pub fn interior_point(&self) -> Option<Point> {
        if self.is_degenerate() {
            return None;
        }
        let n = QuadNum::from_int(self.vertices.len() as i64);
        let (sx, sy) = self
            .vertices
            .iter()
            .fold((QuadNum::zero(), QuadNum::zero()), |(sx, sy), p| (sx + &p.x, sy + &p.y));
        Some(Point::new(sx / &n, sy / &n))
    }

    /// Closed containment.
    pub fn contains(&self, p: &Point) -> bool {
        if self.is_degenerate() {
            return false;
        }
        let n = self.vertices.len();
        (0..n).all(|i| !cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_negative())
    }

    /// Strict interior containment.
    pub fn contains_strictly(&self, p: &Point) -> bool {
        if self.is_degenerate() {
            return false;
        }
        let n = self.vertices.len();
        (0..n).all(|i| cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_positive())
    }

    /// Sutherland–Hodgman against one half-plane.
    pub fn clip(&self, h: &HalfPlane) -> Polygon {
        let n = self.vertices.len();
        if n == 0 {
            return Polygon::empty();
        }
        let vals: Vec<QuadNum> = self.vertices.iter().map(|p| h.eval(p)).collect();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (p, q) = (&self.vertices[i], &self.vertices[j]);
            let (vp, vq) = (&vals[i], &vals[j]);
            if !vp.is_negative() {
                out.push(p.clone());
            }
            if (vp.is_positive() && vq.is_negative()) || (vp.is_negative() && vq.is_positive()) {
                let t = vp / &(vp - vq);
                out.push(Point::new(&p.x + &t * (&q.x - &p.x), &p.y + &t * (&q.y - &p.y)));
            }
        }
        Polygon::new(out)
    }

    /// Clips by many half-planes. Each new vertex is computed as the meet of
    /// two defining lines, so coordinates do not grow with the number of cuts.
    pub fn clip_all<'a, I: IntoIterator<Item = &'a HalfPlane>>(&self, hs: I) -> Polygon {
        let n = self.vertices.len();
        if n < 3 {
            return hs.into_iter().fold(self.clone(), |acc, h| acc.clip(h));
        }
        let line = |p: &Point, q: &Point| {
            let a = -(&q.y - &p.y);
            let b = &q.x - &p.x;
            let c = -(&a * &p.x + &b * &p.y);
            HalfPlane::new(a, b, c)
        };
        // (vertex, line of the edge ending here, line of the edge leaving)
        let mut cur: Vec<(Point, HalfPlane, HalfPlane)> = (0..n)
            .map(|i| {
                let prev = &self.vertices[(i + n - 1) % n];
                let next = &self.vertices[(i + 1) % n];
                let v = &self.vertices[i];
                (v.clone(), line(prev, v), line(v, next))
            })
            .collect();
        for h in hs {
            let m = cur.len();
            if m == 0 {
                break;
            }
            let vals: Vec<QuadNum> = cur.iter().map(|(p, _, _)| h.eval(p)).collect();
            let mut out = Vec::with_capacity(m + 1);
            for i in 0..m {
                let j = (i + 1) % m;
                let (vp, vq) = (&vals[i], &vals[j]);
                if vp.is_positive() {
                    out.push(cur[i].clone());
                } else if vp.is_zero() {
                    // a vertex on the cut line borders the cut edge on the outer side
                    let mut v = cur[i].clone();
                    if vq.is_negative() {
                        v.2 = h.clone();
                    }
                    if vals[(i + m - 1) % m].is_negative() {
                        v.1 = h.clone();
                    }
                    out.push(v);
                }
                if (vp.is_positive() && vq.is_negative()) || (vp.is_negative() && vq.is_positive()) {
                    let edge = &cur[i].2;
                    let p = meet(edge, h);
                    if vp.is_positive() {
                        out.push((p, edge.clone(), h.clone()));
                    } else {
                        out.push((p, h.clone(), edge.clone()));
                    }
                }
            }
            out.dedup_by(|a, b| a.0 == b.0);
            cur = out;
        }
        Polygon::new(cur.into_iter().map(|(p, _, _)| p).collect())
    }

    /// Index of the lexicographically smallest vertex.
    fn anchor(&self) -> usize {
        (0..self.vertices.len())
            .min_by(|&i, &j| self.vertices[i].lex_cmp(&self.vertices[j]))
            .unwrap_or(0)
    }

    /// Fan triangulation from the lexicographically smallest vertex.
    pub fn fan_triangles(&self) -> Vec<[Point; 3]> {
        if self.is_degenerate() {
            return Vec::new();
        }
        let n = self.vertices.len();
        let s = self.anchor();
        let v = |k: usize| self.vertices[(s + k) % n].clone();
        (1..n - 1).map(|k| [v(0), v(k), v(k + 1)]).collect()
    }

    /// Exact integral of a polynomial of degree at most two, by the
    /// mid-edge rule on each fan triangle.
    pub fn integrate<F: Fn(&Point) -> QuadNum>(&self, f: F) -> QuadNum {
        let third = QuadNum::from_rat(rat(1, 3));
        self.fan_triangles()
            .iter()
            .map(|[a, b, c]| {
                let area = cross(a, b, c) * QuadNum::from_rat(rat(1, 2));
                let s = f(&a.midpoint(b)) + f(&b.midpoint(c)) + f(&c.midpoint(a));
                area * s * &third
            })
            .fold(QuadNum::zero(), |acc, v| acc + v)
    }

    pub fn scale(&self, k: &QuadNum) -> Polygon {
        Polygon::new(self.vertices.iter().map(|p| p.scale(k)).collect())
    }

    /// Convex hull (monotone chain) of a point cloud.
    pub fn hull(mut pts: Vec<Point>) -> Polygon {
        pts.sort_by(|a, b| a.lex_cmp(b));
        pts.dedup();
        if pts.len() < 3 {
            return Polygon { vertices: pts };
        }
        let mut lower: Vec<Point> = Vec::new();
        for p in &pts {
            while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<Point> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Polygon::new(lower)
    }

    /// Edge list as consecutive vertex pairs.
    pub fn edges(&self) -> Vec<(Point, Point)> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| (self.vertices[i].clone(), self.vertices[(i + 1) % n].clone()))
            .collect()
    }

    /// Whether every vertex of `self` lies in `other`.
    pub fn is_inside(&self, other: &Polygon) -> bool {
        self.vertices.iter().all(|p| other.contains(p))
    }
}

/// Intersection point of two non-parallel boundary lines.
pub fn meet(l: &HalfPlane, m: &HalfPlane) -> Point {
    let det = &l.a * &m.b - &m.a * &l.b;
    let x = (&l.b * &m.c - &m.b * &l.c) / &det;
    let y = (&l.c * &m.a - &m.c * &l.a) / &det;
    Point::new(x, y)
}

fn signed_area2(v: &[Point]) -> QuadNum {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (p, q) = (&v[i], &v[(i + 1) % n]);
            &p.x * &q.y - &q.x * &p.y
        })
        .fold(QuadNum::zero(), |acc, t| acc + t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;
    use num_traits::One;

    fn pt(x: i64, y: i64) -> Point {
        Point::rational(rat_int(x), rat_int(y))
    }

    #[test]
    fn normalize_orders_and_prunes() {
        let p = Polygon::new(vec![pt(0, 0), pt(0, 1), pt(0, 2), pt(2, 0), pt(2, 0)]);
        assert_eq!(p.vertices.len(), 3);
        assert!(p.area().is_positive());
        assert_eq!(p.area(), QuadNum::from_int(2));
    }

    #[test]
    fn clip_square_by_diagonal() {
        let sq = Polygon::new(vec![pt(0, 0), pt(2, 0), pt(2, 2), pt(0, 2)]);
        // x + y ≤ 2
        let h = HalfPlane::new(QuadNum::from_int(-1), QuadNum::from_int(-1), QuadNum::from_int(2));
        let t = sq.clip(&h);
        assert_eq!(t.area(), QuadNum::from_int(2));
        assert_eq!(t.vertices.len(), 3);
        assert!(sq.clip(&h.flipped()).area() == QuadNum::from_int(2));
        // x ≤ 1 then x + y ≤ 2 then y ≤ 3/2, through a vertex on a cut line
        let cuts = [
            HalfPlane::new(QuadNum::from_int(-1), QuadNum::zero(), QuadNum::one()),
            h.clone(),
            HalfPlane::new(QuadNum::zero(), QuadNum::from_int(-2), QuadNum::from_int(3)),
        ];
        let many = sq.clip_all(cuts.iter());
        let seq = cuts.iter().fold(sq.clone(), |acc, c| acc.clip(c));
        assert_eq!(many, seq);
        assert_eq!(many.area(), QuadNum::from_rat(rat(11, 8)));
    }

    #[test]
    fn integrate_monomials_on_unit_simplex() {
        let t = Polygon::simplex(&QuadNum::one());
        // ∫ 1 = 1/2, ∫ x = 1/6, ∫ x² = 1/12, ∫ xy = 1/24
        assert_eq!(t.integrate(|_| QuadNum::one()), QuadNum::from_rat(rat(1, 2)));
        assert_eq!(t.integrate(|p| p.x.clone()), QuadNum::from_rat(rat(1, 6)));
        assert_eq!(t.integrate(|p| &p.x * &p.x), QuadNum::from_rat(rat(1, 12)));
        assert_eq!(t.integrate(|p| &p.x * &p.y), QuadNum::from_rat(rat(1, 24)));
    }

    #[test]
    fn fan_starts_at_lex_smallest() {
        let sq = Polygon::new(vec![pt(2, 2), pt(0, 2), pt(0, 0), pt(2, 0)]);
        let tris = sq.fan_triangles();
        assert_eq!(tris.len(), 2);
        assert!(tris.iter().all(|t| t[0] == pt(0, 0)));
    }

    #[test]
    fn hull_of_cloud() {
        let h = Polygon::hull(vec![pt(0, 0), pt(1, 1), pt(2, 0), pt(1, 3), pt(0, 2), pt(1, 0)]);
        assert_eq!(h.vertices.len(), 4);
        assert!(h.contains(&pt(1, 1)));
        assert!(!h.contains_strictly(&pt(1, 0)));
    }
}
