use std::process::Command;

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cosine-puzzle"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("cosine-puzzle-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn land_writes_landing_json() {
    let json = tmp("land.json");
    let st = cli()
        .args(["land", "--u", "0,0", "--v", "0.5,0", "--address", "[];[(0,0)]", "--json"])
        .arg(&json)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["landing"]["class"], "repelling");
    assert!(v["landing"]["im"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn render_writes_ppm() {
    let out = tmp("julia.ppm");
    let st = cli()
        .args(["render", "--u", "0,0", "--v", "0.5,0", "--px", "24x16", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let data = std::fs::read(&out).unwrap();
    assert!(data.starts_with(b"P6\n24 16\n255\n"));
    assert_eq!(data.len(), b"P6\n24 16\n255\n".len() + 24 * 16 * 3);
}

#[test]
fn bad_address_is_a_usage_error() {
    let out = cli()
        .args(["land", "--u", "0,0", "--v", "0.5,0", "--address", "bad"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn small_m_is_a_precondition_error() {
    let st = cli()
        .args(["renorm-escape", "--u", "2,0", "--v", "2,0", "--M", "1"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn coarse_diameter_comparison_fails_certification() {
    let st = cli()
        .args(["diameters", "--u", "-1,-0.45", "--v", "-1,-0.45", "--px", "40x40", "--compare"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(3));
}

#[test]
fn flags_override_config() {
    let cfg = tmp("params.cfg");
    std::fs::write(&cfg, "# real example\nu = 0,0\nv = 0.5,0\naddress = [];[(0,0)]\nmax_iter = 10\n").unwrap();
    let json = tmp("cfg.json");
    let st = cli()
        .arg("--config")
        .arg(&cfg)
        .args(["land", "--v", "0.4,0", "--json"])
        .arg(&json)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    // Fixed point of 0.4 cosh x, not of 0.5 cosh x.
    let x = v["landing"]["re"].as_f64().unwrap();
    assert!((0.4 * x.cosh() - x).abs() < 1e-9);
}
