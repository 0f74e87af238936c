// Cross-checks the exact volume against normalized section counts.
use bigdiv::toric_bundle::BundleSpec;
use bigdiv::volume_engine::{h0_bundle, lattice_volume_estimate, volume};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = BundleSpec::nakayama();
    let l = spec.tautological();
    let exact = volume(&spec, &l).estimate().to_f64();
    println!("exact volume {exact:.6}");
    let mut last_gap = f64::INFINITY;
    for m in [15, 30, 60] {
        let h0 = h0_bundle(&spec, &l, m);
        let est = lattice_volume_estimate(&spec, &l, m);
        let approx = bigdiv::scalar::QuadNum::from_rat(est).to_f64();
        let gap = (approx - exact).abs();
        println!("m = {m:>3}: h0 = {h0}, 4!·h0/m⁴ = {approx:.4}, gap {gap:.4}");
        if gap >= last_gap {
            return Err("lattice estimates should approach the volume".into());
        }
        last_gap = gap;
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("volume_oracle example failed");
}
