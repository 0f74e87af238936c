//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::time::{Duration, Instant};

use bigdiv::fujita_driver::{orientation_pinning, sweep, DriverContext, DEFAULT_P_LIST};
use bigdiv::multiplier_rees::{
    endpoint_bound, expected_endpoints, newton_polygon, ord_brute, rees_data, staircase, summarize, w_endpoints, w_max,
};
use bigdiv::ns_lattice::NsClass;
use bigdiv::polygon::{Point, Polygon};
use bigdiv::scalar::{rat, rat_int, QuadNum, Rat};
use bigdiv::toric_bundle::{nef_box, point_in_box, BundleDivisor, BundleSpec};
use bigdiv::volume_engine::{lattice_volume_estimate, pos_intersection, volume};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONE_LIMIT: Duration = Duration::from_secs(1);
const BOX_LIMIT: Duration = Duration::from_secs(5);
const ORACLE_LIMIT: Duration = Duration::from_secs(10);
const STAIRCASE_LIMIT: Duration = Duration::from_secs(60);
const SWEEP_LIMIT: Duration = Duration::from_secs(300);
const ORACLE_REL_TOL: f64 = 0.05;
const DOUBLING_RATIO: (f64, f64) = (0.3, 0.8);
const P_W_MAX_DOUBLING_DRIFT: f64 = 0.5;
const VOL_GAP_EXPONENT: f64 = -0.5;
const KYX_DROP: f64 = 10.0;

struct Ledger {
    failed: Vec<usize>,
}

impl Ledger {
    fn record(&mut self, n: usize, name: &str, pass: bool, detail: String) {
        println!(
            "criterion {n:>2} [{}] {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            self.failed.push(n);
        }
    }
}

fn random_rat(rng: &mut ChaCha8Rng, span: i64) -> Rat {
    rat(rng.gen_range(-span * 12..=span * 12), rng.gen_range(1..=12))
}

fn random_nef(rng: &mut ChaCha8Rng) -> NsClass {
    loop {
        let c = NsClass::new(
            rat(rng.gen_range(0..=24), 4),
            rat(rng.gen_range(0..=24), 4),
            random_rat(rng, 2),
        );
        if c.is_nef() {
            return c;
        }
    }
}

fn cone_identity(l: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut bad = 0;
    for _ in 0..1000 {
        let c = NsClass::new(
            random_rat(&mut rng, 50),
            random_rat(&mut rng, 50),
            random_rat(&mut rng, 50),
        );
        let d = c.to_diag();
        let lhs = &d.c * &d.c - &d.a * &d.a - d.b_squared();
        let rhs = rat_int(12) * (&c.x * &c.y + &c.y * &c.z + &c.z * &c.x);
        if lhs != rhs {
            bad += 1;
        }
    }
    let t = start.elapsed();
    l.record(
        1,
        "exact cone identity",
        bad == 0 && t < CONE_LIMIT,
        format!("1000 classes, {bad} mismatches, {t:?}"),
    );
}

fn base_coordinates(l: &mut Ledger) {
    let d0 = NsClass::from_ints(4, 4, 1).to_diag();
    let d2 = NsClass::from_ints(-1, 9, 1).to_diag();
    let ok0 = d0.a == rat_int(6) && d0.b().is_zero() && d0.c == rat_int(18);
    let ok2 = d2.a == rat_int(6) && d2.b() == QuadNum::surd(rat_int(10), 3) && d2.c == rat_int(18);
    l.record(
        2,
        "diagonal coordinates of L0 and L2",
        ok0 && ok2,
        format!(
            "L0 -> ({}, {}, {}), L2 -> ({}, {}, {})",
            d0.a,
            d0.b(),
            d0.c,
            d2.a,
            d2.b(),
            d2.c
        ),
    );
}

fn box_reproduction(l: &mut Ledger) {
    let start = Instant::now();
    let spec = BundleSpec::nakayama();
    let div = spec.tautological();
    let region = nef_box(&spec, &div).expect("box");
    let poly = region.exact().cloned().unwrap_or_else(Polygon::empty);
    let kappa = QuadNum::surd(rat(2, 5), 6);
    let target = Polygon::new(vec![
        Point::rational(rat_int(0), rat_int(0)),
        Point::rational(rat_int(1), rat_int(0)),
        Point::new(QuadNum::zero(), kappa),
    ]);
    let same = region.is_exact() && poly.len() == 3 && target.vertices.iter().all(|v| poly.vertices.contains(v));
    let mut wrong = 0;
    for i in 0..=200 {
        for j in 0..=200 {
            let (x, y) = (rat(i, 200), rat(j, 200));
            let oracle = point_in_box(&spec, &div, &x, &y);
            if oracle != poly.contains(&Point::rational(x, y)) {
                wrong += 1;
            }
        }
    }
    let t = start.elapsed();
    l.record(
        3,
        "box reproduction",
        same && wrong == 0 && t < BOX_LIMIT,
        format!("triangle match {same}, {wrong} grid misclassifications of 201², {t:?}"),
    );
}

fn oracle_convergence(l: &mut Ledger) {
    let start = Instant::now();
    let spec = BundleSpec::nakayama();
    let div = spec.tautological();
    let vol = volume(&spec, &div).estimate().to_f64();
    let est = |m| QuadNum::from_rat(lattice_volume_estimate(&spec, &div, m)).to_f64();
    let (e60, e120) = (est(60), est(120));
    let t = start.elapsed();
    let rel = (e120 - vol).abs() / vol;
    let ratio = (e120 - vol).abs() / (e60 - vol).abs();
    let pass = rel <= ORACLE_REL_TOL && (DOUBLING_RATIO.0..=DOUBLING_RATIO.1).contains(&ratio) && t < ORACLE_LIMIT;
    l.record(
        4,
        "lattice oracle convergence",
        pass,
        format!("m=60 {e60:.4}, m=120 {e120:.4}, vol {vol:.4}, rel err {rel:.4}, doubling ratio {ratio:.3}, {t:?}"),
    );
}

fn trivial_volume(l: &mut Ledger) {
    let lc = NsClass::from_ints(4, 4, 1);
    let spec = BundleSpec::trivial(lc.clone());
    let v = volume(&spec, &spec.tautological());
    // (pr₁*L + pr₂*H)⁴ on S × P² keeps only the C(4,2)·L²·H² term.
    let oracle = QuadNum::from_rat(rat_int(6) * lc.self_intersection());
    l.record(
        5,
        "trivial bundle volume",
        v.value() == Some(&oracle),
        format!("{} vs binomial oracle {oracle}", v.estimate()),
    );
}

fn homogeneity(l: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = Vec::new();
    let mut n = 0;
    while n < 20 {
        let l0 = random_nef(&mut rng);
        if !l0.is_ample() {
            continue;
        }
        let spec = BundleSpec::new(l0.clone(), random_nef(&mut rng), random_nef(&mut rng));
        let c = rat(rng.gen_range(1..=8), rng.gen_range(1..=4));
        let base = l0.scale(&c) + random_nef(&mut rng);
        let div = BundleDivisor::new(base, c);
        let vol = volume(&spec, &div);
        let Some(v) = vol.value() else { continue };
        n += 1;
        match pos_intersection(&spec, &div, &div) {
            Ok(d) if &d.value == v => {}
            other => bad.push(format!("{div:?}: {other:?}")),
        }
    }
    l.record(
        6,
        "pos_intersection(L, L) = vol(L)",
        bad.is_empty(),
        format!("20 random big presets, {} mismatches", bad.len()),
    );
}

fn endpoints(l: &mut Ledger) {
    let mut bad = Vec::new();
    let mut big_time = Duration::ZERO;
    for p in DEFAULT_P_LIST {
        let start = Instant::now();
        let s = summarize(p, 1, 1).expect("ideal");
        if p == 1_000_000 {
            big_time = start.elapsed();
        }
        let v = &s.polygon.vertices;
        let want = expected_endpoints(&s.thresholds.alpha, &s.thresholds.beta);
        let b = s.thresholds.beta.floor();
        let a = s.thresholds.alpha.floor();
        let direct = (
            (0u64, u64::try_from(b).unwrap() + 1),
            (u64::try_from(a).unwrap() + 1, 0u64),
        );
        if v.first() != Some(&want.0) || v.last() != Some(&want.1) || want != direct {
            bad.push(p);
        }
    }
    l.record(
        7,
        "Newton polygon endpoints",
        bad.is_empty() && big_time < STAIRCASE_LIMIT,
        format!("mismatches at {bad:?}; p = 10⁶ staircase and polygon in {big_time:?}"),
    );
}

fn brute_w_max(alpha: &QuadNum, beta: &QuadNum) -> Option<(Rat, Rat)> {
    let ideal = staircase(alpha, beta);
    let np = newton_polygon(&ideal).ok()?;
    let mut best = Rat::zero();
    for r in rees_data(&np) {
        let ord = ord_brute(&ideal, r.a, r.b);
        if ord != r.ord {
            return None;
        }
        best = best.max(Rat::new(((r.a + r.b) as i64).into(), (ord as i64).into()));
    }
    if w_max(&np) != best {
        return None;
    }
    Some((best, w_endpoints(&np)))
}

fn max_at_endpoints(l: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    for _ in 0..200 {
        let alpha = QuadNum::from_rat(rat(rng.gen_range(100..=5000), 100));
        let beta = QuadNum::from_rat(rat(rng.gen_range(100..=5000), 100));
        match brute_w_max(&alpha, &beta) {
            Some((brute, ends)) if brute == ends => {}
            _ => bad += 1,
        }
    }
    let mut bad_p = Vec::new();
    for p in DEFAULT_P_LIST {
        let t = summarize(p, 1, 1).expect("ideal").thresholds;
        match brute_w_max(&t.alpha, &t.beta) {
            Some((brute, ends)) if brute == ends => {}
            _ => bad_p.push(p),
        }
    }
    l.record(
        8,
        "w_max attained at an endpoint side",
        bad == 0 && bad_p.is_empty(),
        format!("{bad} failures of 200 random pairs, swept failures {bad_p:?}"),
    );
}

fn discrepancy_decay(l: &mut Ledger) {
    let mut sup = 0f64;
    let mut sup_doubled = 0f64;
    let mut above_bound = Vec::new();
    for p in DEFAULT_P_LIST {
        for (q, slot) in [(p, &mut sup), (2 * p, &mut sup_doubled)] {
            let s = summarize(q, 1, 1).expect("ideal");
            let w = QuadNum::from_rat(s.w_max.clone());
            if w > s.endpoint_bound || w > endpoint_bound(&s.thresholds.alpha, &s.thresholds.beta) {
                above_bound.push(q);
            }
            *slot = slot.max(q as f64 * w.to_f64());
        }
    }
    let drift = (sup_doubled - sup).abs() / sup;
    l.record(
        9,
        "p·w_max bounded, w_max ≤ endpoint bound",
        sup.is_finite() && drift <= P_W_MAX_DOUBLING_DRIFT && above_bound.is_empty(),
        format!("sup {sup:.3}, sup at 2p {sup_doubled:.3}, drift {drift:.3}, bound violations {above_bound:?}"),
    );
}

fn orientation(l: &mut Ledger) {
    let spec = BundleSpec::nakayama();
    let kappa = QuadNum::surd(rat(2, 5), 6);
    let res = orientation_pinning(&spec);
    let pass = match &res {
        Ok(((m, k), (m2, k2))) => m == m2 && k == k2 && *m == -kappa.clone() && *k == kappa,
        Err(_) => false,
    };
    let detail = match &res {
        Ok(((m, k), (m2, k2))) => format!("truncation y = ({m})x + {k}, nef edge y = ({m2})x + {k2}"),
        Err(e) => e.to_string(),
    };
    l.record(10, "truncation line equals the nef edge", pass, detail);
}

fn certificate(l: &mut Ledger) {
    let start = Instant::now();
    let ctx = DriverContext::nakayama();
    let table = sweep(&ctx, &DEFAULT_P_LIST).expect("sweep");
    let t = start.elapsed();
    let reports: Vec<_> = table.reports().collect();
    let complete = reports.len() == DEFAULT_P_LIST.len();

    let gaps: Vec<String> = reports.iter().map(|r| format!("{:.3e}", r.vol_gap.to_f64())).collect();
    let positive = reports.iter().all(|r| r.vol_gap.is_positive());
    let decreasing = reports
        .windows(2)
        .all(|w| (&w[0].vol_gap - &w[1].vol_gap).is_positive());
    let slope = table.summary.vol_gap_slope.unwrap_or(0.0);
    l.record(
        11,
        "volume convergence",
        complete && positive && decreasing && slope <= VOL_GAP_EXPONENT,
        format!("gaps {gaps:?}, fitted exponent {slope:.3}"),
    );

    let (k3, k5) = match (table.report_for(1_000), table.report_for(100_000)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            l.record(12, "r1 certificate", false, "missing rows".into());
            return;
        }
    };
    let drop = k3.kyx_bound.to_f64() / k5.kyx_bound.to_f64();
    let kyx_ok = k5.kyx_bound.scale(&rat_int(KYX_DROP as i64)) <= k3.kyx_bound;
    let consistent = reports.iter().all(|r| r.consistent_with_reference());
    let strictly_inside = [k3, k5]
        .iter()
        .all(|r| r.r1_lo < r.r1_reference && r.r1_reference < r.r1_hi);
    let gap_slope = table.summary.cross_gap_slope.unwrap_or(0.0);
    let (lo, hi) = k5.r1_interval();
    l.record(
        12,
        "r1 certificate",
        complete && kyx_ok && consistent && strictly_inside && gap_slope < -0.5 && t < SWEEP_LIMIT,
        format!(
            "kyx drop 10³→10⁵ {drop:.1}×, r1 interval at 10⁵ [{}, {}] vs r1(L) {}, cross gap {:.3e}, gap exponent {gap_slope:.3}, sweep {t:?}",
            lo.to_decimal(6),
            hi.to_decimal(6),
            k5.r1_reference.to_decimal(6),
            k5.cross_gap.to_f64()
        ),
    );
}

#[test]
fn acceptance() {
    let mut l = Ledger { failed: Vec::new() };
    cone_identity(&mut l);
    base_coordinates(&mut l);
    box_reproduction(&mut l);
    oracle_convergence(&mut l);
    trivial_volume(&mut l);
    homogeneity(&mut l);
    endpoints(&mut l);
    max_at_endpoints(&mut l);
    discrepancy_decay(&mut l);
    orientation(&mut l);
    certificate(&mut l);
    assert!(l.failed.is_empty(), "failed criteria: {:?}", l.failed);
}
