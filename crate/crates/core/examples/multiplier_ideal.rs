// The staircase ideal J_p, its Newton polygon and Rees valuations.
use bigdiv::multiplier_rees::{growth_constant, summarize};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("growth constant {}", growth_constant().to_decimal(8));
    for p in [1_000u64, 10_000] {
        let s = summarize(p, 1, 1)?;
        let t = &s.thresholds;
        println!(
            "p = {p}: alpha ≈ {}, beta ≈ {}, {} generators, {} sides",
            t.alpha.to_decimal(3),
            t.beta.to_decimal(3),
            s.generator_count,
            s.polygon.sides()
        );
        for r in &s.rees {
            println!(
                "  side {}: normal ({}, {}), ord {}, A {}, w {}",
                r.side, r.a, r.b, r.ord, r.log_discrepancy, r.w
            );
        }
        let w = bigdiv::scalar::QuadNum::from_rat(s.w_max.clone());
        if w > s.endpoint_bound {
            return Err("w_max exceeds the endpoint bound".into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("multiplier_ideal example failed");
}
