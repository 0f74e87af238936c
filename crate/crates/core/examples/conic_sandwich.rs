// A bundle whose nef region has a curved edge: the volume comes as bounds.
use bigdiv::toric_bundle::{nef_box, BundleSpec};
use bigdiv::volume_engine::volume;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = BundleSpec::conic_demo();
    let l = spec.tautological();
    let region = nef_box(&spec, &l)?;
    println!(
        "{}: inner area {:.8}, outer area {:.8}",
        region.kind_name(),
        region.inner().area().to_f64(),
        region.outer().area().to_f64()
    );
    let v = volume(&spec, &l);
    let (lo, hi) = (v.lower().to_f64(), v.upper().to_f64());
    println!("vol in [{lo:.6}, {hi:.6}]");
    if v.is_exact() || !(lo <= hi && hi - lo < 1e-3) {
        return Err("expected a tight sandwich".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("conic_sandwich example failed");
}
