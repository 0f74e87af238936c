// Positive intersections as one-sided volume derivatives, with the audit.
use bigdiv::ns_lattice::NsClass;
use bigdiv::toric_bundle::{BundleDivisor, BundleSpec};
use bigdiv::volume_engine::{pos_intersection, r1};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = BundleSpec::nakayama();
    let l = spec.tautological();
    let k = r1(&spec, &l)?;
    println!("r1 = {} ≈ {}  via {:?}", k.value, k.value.to_decimal(8), k.audit.method);
    let f1 = pos_intersection(&spec, &l, &BundleDivisor::pullback(NsClass::f1()))?;
    println!(
        "<L^3>.F1 = {} ≈ {}  via {:?}",
        f1.value,
        f1.value.to_decimal(8),
        f1.audit.method
    );
    if let Some(r) = f1.audit.richardson_estimate {
        println!("  Richardson cross-check {r:.8}");
    }
    let expected = 24.0 / 5.0 + 4.0 * 6f64.sqrt();
    if (f1.value.to_f64() - expected).abs() > 1e-9 {
        return Err("positive intersection with F1 is off".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("positive_intersection example failed");
}
