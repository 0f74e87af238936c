use bigdiv::cli::{run, BoxOutput, IdealOutput, ReesOutput, VolumeOutput};

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["bigdiv"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

fn round_trip<T: serde::de::DeserializeOwned + serde::Serialize + PartialEq + std::fmt::Debug>(text: &str) {
    let v: T = serde_json::from_str(text).unwrap();
    let again: T = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
}

#[test]
fn json_outputs_round_trip() {
    round_trip::<VolumeOutput>(&ok(&["volume"]));
    round_trip::<VolumeOutput>(&ok(&["volume", "--preset", "conic-demo"]));
    round_trip::<BoxOutput>(&ok(&["box", "--preset", "conic-demo"]));
    round_trip::<IdealOutput>(&ok(&["mult-ideal", "--p", "3000", "--limit", "5"]));
    round_trip::<ReesOutput>(&ok(&["rees", "--p", "10000"]));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["fujita-sweep", "--p-list", "1000,3000"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "1"]);
    assert_eq!(a, ok(&threaded));
    assert!(a.starts_with("p,vol_Ap,vol_gap"));
    assert_eq!(a.lines().count(), 3);
    assert!(!a.contains('\r'));
}

#[test]
fn duplicate_p_values_warn() {
    let (code, out, err) = call(&["fujita-sweep", "--p-list", "1000,1000"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
    assert!(err.contains("warning"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("bigdiv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "preset = \"trivial-ample\"\nprecision = 3\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v: VolumeOutput = serde_json::from_str(&ok(&["volume", "--config", c])).unwrap();
    assert_eq!(v.decimal, "288.000");
    let v: VolumeOutput = serde_json::from_str(&ok(&[
        "volume",
        "--config",
        c,
        "--preset",
        "nakayama",
        "--precision",
        "2",
    ]))
    .unwrap();
    assert_eq!(v.decimal, "94.06");
    std::fs::write(&cfg, "colour = 1\n").unwrap();
    assert_eq!(call(&["volume", "--config", c]).0, 2);
    let out = dir.join("vol.json");
    let o = out.to_str().unwrap();
    assert_eq!(ok(&["volume", "--out", o]), "");
    assert!(std::fs::read_to_string(&out).unwrap().contains("(192/5)√6"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn usage_and_domain_errors() {
    assert_eq!(call(&["report", "--preset", "unknown"]).0, 2);
    assert_eq!(call(&["fujita-sweep", "--p-list", ","]).0, 2);
    assert_eq!(call(&["fujita-sweep", "--preset", "trivial-ample"]).0, 2);
    assert_eq!(call(&["volume", "--l0", "4,4,1"]).0, 2);
    assert_eq!(call(&["nef", "--class", "1,1,1", "--format", "csv"]).0, 2);
    assert_eq!(call(&["posint", "--divisor", "0,0,0:0", "--dir", "f1"]).0, 1);
    let (code, _, err) = call(&["h0"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"));
}

#[test]
fn explicit_classes_match_the_preset() {
    let a = ok(&["volume", "--l0", "4,4,1", "--l1", "0,0,0", "--l2", "-1,9,1"]);
    assert_eq!(a, ok(&["volume"]));
    let r = ok(&["r1", "--divisor", "8,8,2:2"]);
    assert!(r.contains("-384 - (1536/5)√6"));
}

#[test]
fn reports_cover_every_preset() {
    let n = ok(&["report", "--p-list", "1000,10000"]);
    for needle in [
        "(192/5)√6",
        "49/50 - (2/5)√6",
        "0.00020410",
        "Q_p",
        "equal: true",
        "24/5 + 4√6",
    ] {
        assert!(n.contains(needle), "missing {needle}");
    }
    assert!(ok(&["report", "--preset", "trivial-ample"]).contains("`288`"));
    assert!(ok(&["report", "--preset", "conic-demo"]).contains("sandwich"));
}
