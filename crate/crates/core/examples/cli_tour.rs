// Drives the command-line interface in-process.
use bigdiv::cli::run;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for args in [
        vec!["bigdiv", "nef", "--class", "4,4,1"],
        vec!["bigdiv", "diag", "--class", "-1,9,1"],
        vec!["bigdiv", "rees", "--p", "1000", "--format", "csv"],
    ] {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(args.clone(), &mut out, &mut err);
        println!("$ {}\n{}", args[1..].join(" "), String::from_utf8_lossy(&out));
        if code != 0 {
            return Err(String::from_utf8_lossy(&err).into_owned().into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("cli_tour example failed");
}
