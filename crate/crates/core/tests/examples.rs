macro_rules! example_test {
    ($m:ident, $file:literal, $t:ident) => {
        mod $m {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
        #[test]
        fn $t() {
            $m::run_example().expect(concat!($file, " failed"));
        }
    };
}

example_test!(ns_cone, "ns_cone.rs", ns_cone_runs);
example_test!(nakayama_box, "nakayama_box.rs", nakayama_box_runs);
example_test!(volume_oracle, "volume_oracle.rs", volume_oracle_runs);
example_test!(
    positive_intersection,
    "positive_intersection.rs",
    positive_intersection_runs
);
example_test!(multiplier_ideal, "multiplier_ideal.rs", multiplier_ideal_runs);
example_test!(fujita_sweep, "fujita_sweep.rs", fujita_sweep_runs);
example_test!(conic_sandwich, "conic_sandwich.rs", conic_sandwich_runs);
example_test!(cli_tour, "cli_tour.rs", cli_tour_runs);
