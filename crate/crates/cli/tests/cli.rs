use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    json: Value,
    raw: String,
}

fn atl(args: &[&str], envs: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_atl"));
    cmd.args(args).env_remove("ATL_SEED");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("run atl");
    let raw = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&raw).unwrap_or(Value::Null);
    Run { code: out.status.code().unwrap_or(-1), json, raw }
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn put(&self, name: &str, body: &str) -> String {
        let p: PathBuf = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    }
}

const CUBIC: &str = r#"{"type":"curve","n":3,"p":["8*u","0","3*(1-u)","1-u"]}"#;
const TAN_G: &str = r#"{"type":"poly","vars":["U","V","W"],"expr":"W*(1-U*V)-(U+V)"}"#;

fn f64_at(v: &Value, path: &[&str]) -> f64 {
    let mut cur = v;
    for p in path {
        cur = match p.parse::<usize>() {
            Ok(i) => &cur[i],
            Err(_) => &cur[*p],
        };
    }
    cur.as_f64().unwrap_or_else(|| panic!("{:?} not a number in {}", path, v))
}

#[test]
fn verify_tangent_formula() {
    let f = Files::new();
    let tan = f.put("tan.json", r#"{"type":"builtin","name":"tan"}"#);
    let g = f.put("g.json", TAN_G);
    let r = atl(&["aat", "verify", "--poly", &g, "--fn", &tan], &[]);
    assert_eq!(r.code, 0, "{}", r.raw);
    assert_eq!(r.json["status"], "verified");
    assert_eq!(r.json["config"]["order"], 16);
}

#[test]
fn refuted_theorem_exits_one() {
    let f = Files::new();
    let exp = f.put("exp.json", r#"{"type":"builtin","name":"exp"}"#);
    let g = f.put("g.json", r#"{"type":"poly","vars":["U","V","W"],"expr":"W-U-V"}"#);
    let r = atl(&["aat", "verify", "--poly", &g, "--fn", &exp], &[]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json["status"], "refuted");
    assert_eq!(r.json["first_failing_degree"], 0);
}

#[test]
fn discovered_polynomial_feeds_verify() {
    let f = Files::new();
    let exp = f.put("exp.json", r#"{"type":"builtin","name":"exp"}"#);
    let r = atl(&["aat", "discover", "--fn", &exp, "--bounds", "1,1,1"], &[]);
    assert_eq!(r.code, 0, "{}", r.raw);
    assert_eq!(r.json["kernel_dim"], 1);
    let g = f.put("found.json", &r.json["basis"][0].to_string());
    let v = atl(&["aat", "verify", "--poly", &g, "--fn", &exp], &[]);
    assert_eq!(v.code, 0, "{}", v.raw);
}

#[test]
fn no_relation_exits_one() {
    let f = Files::new();
    // the Gaussian has no addition theorem
    let mut coeffs = vec![serde_json::json!([0.0, 0.0]); 20];
    let mut fact = 1.0;
    for k in 0..10 {
        if k > 0 {
            fact *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[2 * k] = serde_json::json!([sign / fact, 0.0]);
    }
    let spec = serde_json::json!({"type": "element", "center": [0.0, 0.0], "low": 0, "order": 20, "exact": false, "coeffs": coeffs});
    let gauss = f.put("g.json", &spec.to_string());
    let r = atl(&["aat", "discover", "--fn", &gauss, "--degree-cap", "1", "--order", "20"], &[]);
    assert_eq!(r.code, 1, "{}", r.raw);
    assert_eq!(r.json["status"], "no-relation");
}

#[test]
fn expand_sample_cubic() {
    let f = Files::new();
    let c = f.put("cubic.json", CUBIC);
    let r = atl(&["algebroid", "expand", "--curve", &c, "--center", "0", "--order", "12"], &[]);
    assert_eq!(r.code, 0, "{}", r.raw);
    let branches = r.json["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 3);
    let holo = branches.iter().find(|b| b["e"] == 1).unwrap();
    for (k, want) in [-1.0 / 3.0, 8.0 / 81.0, 8.0 / 729.0].iter().enumerate() {
        assert!((f64_at(holo, &["coeffs", &k.to_string(), "0"]) - want).abs() < 1e-14);
    }
    for b in branches {
        assert!(b["residual_valuation"].as_i64().unwrap() >= b["residual_order"].as_i64().unwrap() - 1);
    }
}

#[test]
fn singular_report_and_discriminant() {
    let f = Files::new();
    let c = f.put("cubic.json", CUBIC);
    let r = atl(&["algebroid", "singular", "--curve", &c], &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["points"].as_array().unwrap().len(), 4);
    assert_eq!(r.json["discriminant"]["type"], "poly");
}

#[test]
fn monodromy_product_closes() {
    let f = Files::new();
    let c = f.put("cubic.json", CUBIC);
    let r = atl(&["algebroid", "monodromy", "--curve", &c, "--base", "0.1,-1"], &[]);
    assert_eq!(r.code, 0, "{}", r.raw);
    assert_eq!(r.json["product_is_identity"], true);
    let r = atl(&["algebroid", "monodromy", "--curve", &c, "--base", "0.1,-1", "--around", "1"], &[]);
    assert_eq!(r.json["cycles"].as_array().unwrap().len(), 1);
}

#[test]
fn period_of_tangent() {
    let f = Files::new();
    let tan = f.put("tan.json", r#"{"type":"builtin","name":"tan"}"#);
    let g = f.put("g.json", TAN_G);
    let r = atl(&["period", "find", "--fn", &tan, "--poly", &g], &[]);
    assert_eq!(r.code, 0, "{}", r.raw);
    assert_eq!(r.json["classification"], "periodic");
    assert!((f64_at(&r.json, &["fundamental", "0"]) - std::f64::consts::PI).abs() < 1e-9);
    let again = atl(&["period", "find", "--fn", &tan, "--poly", &g], &[]);
    assert_eq!(r.raw, again.raw);
}

#[test]
fn period_verify_rejects_antiperiod() {
    let f = Files::new();
    let sin = f.put("sin.json", r#"{"type":"builtin","name":"sin"}"#);
    let r = atl(&["period", "verify", "--fn", &sin, "--omega", "3.141592653589793"], &[]);
    assert_eq!(r.code, 1);
    let r = atl(&["period", "verify", "--fn", &sin, "--omega", "6.283185307179586"], &[]);
    assert_eq!(r.code, 0);
}

#[test]
fn roots_and_fit() {
    let f = Files::new();
    let sin = f.put("sin.json", r#"{"type":"builtin","name":"sin"}"#);
    let r = atl(&["period", "find", "--fn", &sin, "--target", "0.5", "--region", "-20,20,-1,1", "--want", "5"], &[]);
    assert_eq!(r.code, 0, "{}", r.raw);
    assert_eq!(r.json["fit"]["progressions"].as_array().unwrap().len(), 2);
    assert!((f64_at(&r.json, &["fit", "omega", "0"]) - 2.0 * std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn reductions() {
    let f = Files::new();
    let exp = f.put("exp.json", r#"{"type":"builtin","name":"exp"}"#);
    let two = f.put("two.json", r#"{"type":"translate","of":{"type":"builtin","name":"exp"},"shift":[0.6931471805599453,0]}"#);
    let g = f.put("g.json", r#"{"type":"poly","vars":["U","V","W"],"expr":"W-U*V"}"#);
    let r = atl(&["reduce", "koebe", "--poly", &g, "--p1", &exp, "--p2", &two, "--p3", &two], &[]);
    assert_eq!(r.code, 0, "{}", r.raw);
    assert!(r.json["residual_valuation"].as_u64().unwrap() >= 12);

    let d = f.put("d.json", r#"{"type":"poly","vars":["z","x"],"expr":"x-z^2"}"#);
    let r = atl(&["reduce", "double", "--poly", &d, "--m", "3", "--fn", &exp], &[]);
    assert_eq!(r.code, 0, "{}", r.raw);
    assert!(r.json["residual_valuation"].as_u64().unwrap() >= 12);

    let sin = f.put("sin.json", r#"{"type":"builtin","name":"sin"}"#);
    let q = f.put("q.json", r#"{"type":"poly","vars":["U","V","W"],"expr":"(W^2+U^2-V^2)^2-4*U^2*W^2*(1-V^2)"}"#);
    let r = atl(&["reduce", "schwarz", "--poly", &q, "--fn", &sin], &[]);
    assert_eq!(r.code, 0, "{}", r.raw);
    assert_eq!(r.json["final_degree"], 2);
    assert_eq!(r.json["config"]["order"], 24);
}

#[test]
fn input_errors_exit_two() {
    let f = Files::new();
    let bad = f.put("bad.json", "{\n \"type\": \"builtin\",\n \"name\": \"tan\"\n");
    let g = f.put("g.json", TAN_G);
    let r = atl(&["aat", "verify", "--poly", &g, "--fn", &bad], &[]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["error"]["kind"], "Schema");
    let zero = f.put("zero.json", r#"{"n":2,"p":["0","1","u"]}"#);
    let r = atl(&["algebroid", "singular", "--curve", &zero], &[]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["error"]["kind"], "InvariantViolation");
    let r = atl(&["aat", "verify", "--poly", &g, "--fn", &g], &[]);
    assert_eq!(r.code, 2);
    let r = atl(&["aat", "frobnicate"], &[]);
    assert_eq!(r.code, 2);
    let tan = f.put("tan.json", r#"{"type":"builtin","name":"tan"}"#);
    let r = atl(&["aat", "verify", "--poly", &g, "--fn", &tan, "--tol", "0.5"], &[]);
    assert_eq!(r.code, 2);
}

#[test]
fn seed_environment_override() {
    let f = Files::new();
    let tan = f.put("tan.json", r#"{"type":"builtin","name":"tan"}"#);
    let g = f.put("g.json", TAN_G);
    let r = atl(&["aat", "verify", "--poly", &g, "--fn", &tan, "--seed", "5"], &[("ATL_SEED", "0x10")]);
    assert_eq!(r.json["config"]["seed"], 16);
    let r = atl(&["aat", "verify", "--poly", &g, "--fn", &tan], &[]);
    assert_eq!(r.json["config"]["seed"], 0x5745494552u64);
}

#[test]
fn text_format() {
    let f = Files::new();
    let tan = f.put("tan.json", r#"{"type":"builtin","name":"tan"}"#);
    let g = f.put("g.json", TAN_G);
    let r = atl(&["aat", "verify", "--poly", &g, "--fn", &tan, "--format", "text"], &[]);
    assert_eq!(r.code, 0);
    assert!(r.raw.contains("status: \"verified\""));
}
