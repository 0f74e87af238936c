// A short certificate sweep and its CSV table.
use bigdiv::fujita_driver::{sweep, write_csv, DriverContext};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = DriverContext::nakayama();
    let table = sweep(&ctx, &[1_000, 10_000])?;
    for r in table.reports() {
        let (lo, hi) = r.r1_interval();
        println!(
            "p = {:>6}: vol gap {:.3e}, e_mass {}, kyx {:.3e}, r1 in [{}, {}]",
            r.p,
            r.vol_gap.to_f64(),
            r.e_mass.to_decimal(5),
            r.kyx_bound.to_f64(),
            lo.to_decimal(6),
            hi.to_decimal(6)
        );
        if !r.consistent_with_reference() {
            return Err(format!("reference r1 outside the interval at p = {}", r.p).into());
        }
    }
    let mut csv = Vec::new();
    write_csv(&table, 6, &mut csv)?;
    let text = String::from_utf8(csv)?;
    println!("{}", text.lines().next().unwrap_or_default());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("fujita_sweep example failed");
}
