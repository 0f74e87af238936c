// Nef and ample tests on E×E, with the diagonal coordinates behind them.
use bigdiv::ns_lattice::NsClass;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (label, c) in [
        ("L0", NsClass::from_ints(4, 4, 1)),
        ("L2", NsClass::from_ints(-1, 9, 1)),
        ("f1", NsClass::f1()),
        ("delta", NsClass::delta()),
    ] {
        let d = c.to_diag();
        println!(
            "{label:>5}: square {:>3}  (a, b, c) = ({}, {}, {})  nef {}  ample {}",
            c.self_intersection(),
            d.a,
            d.b(),
            d.c,
            c.is_nef(),
            c.is_ample()
        );
    }
    let l2 = NsClass::from_ints(-1, 9, 1).to_diag();
    if l2.b().to_string() != "10√3" || l2.cone_gap() >= bigdiv::scalar::rat_int(0) {
        return Err("unexpected diagonal coordinates for (-1, 9, 1)".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("ns_cone example failed");
}
