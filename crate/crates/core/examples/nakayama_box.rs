// The nef region of the tautological class and its exact volume.
use bigdiv::toric_bundle::{density, nef_box, BundleSpec};
use bigdiv::volume_engine::volume;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = BundleSpec::nakayama();
    let l = spec.tautological();
    let region = nef_box(&spec, &l)?;
    println!("region kind: {}", region.kind_name());
    for v in &region.inner().vertices {
        println!("  vertex ({}, {})", v.x, v.y);
    }
    println!("density: {:?}", density(&spec, &l));
    let vol = volume(&spec, &l);
    let exact = vol.value().ok_or("volume should be exact")?;
    println!("vol = {exact} ≈ {}", exact.to_decimal(10));
    if exact.to_string() != "(192/5)√6" {
        return Err(format!("unexpected volume {exact}").into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("nakayama_box example failed");
}
