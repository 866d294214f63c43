use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::{json, Value};

struct Run {
    code: i32,
    out: Value,
    text: String,
}

fn run(args: &[&str], stdin: Option<Value>) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hatsiegel"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(v) = stdin {
            pipe.write_all(v.to_string().as_bytes()).unwrap();
        }
    }
    let output = child.wait_with_output().unwrap();
    let text = String::from_utf8(output.stdout).unwrap();
    let out = if text.trim().is_empty() { Value::Null } else { serde_json::from_str(&text).unwrap() };
    Run { code: output.status.code().unwrap(), out, text }
}

fn ok(args: &[&str], stdin: Value) -> Value {
    let r = run(args, Some(stdin));
    assert_eq!(r.code, 0, "{args:?}: {}", r.text);
    r.out["result"].clone()
}

fn c(re: f64, im: f64) -> Value {
    json!({"re": re, "im": im})
}

fn pt(tau: (f64, f64), z: (f64, f64)) -> Value {
    json!({"tau": c(tau.0, tau.1), "z": c(z.0, z.1)})
}

fn close(v: &Value, x: f64, eps: f64) -> bool {
    (v.as_f64().unwrap() - x).abs() <= eps
}

fn omega_spec(y: f64, v: f64) -> Value {
    json!({"kind": "omega", "omega": pt((0.25, y), (-0.5, v))})
}

#[test]
fn bundle_dim_from_flags() {
    let r = run(&["bundle", "dim", "--kind", "omega", "--imtau", "2", "--imz", "1"], None);
    assert_eq!(r.code, 0);
    assert_eq!(r.out["result"], json!({"dimension": 3}));
    let r = run(&["bundle", "dim", "--kind", "star", "--imtau", "2", "--imz", "-1"], None);
    assert_eq!(r.out["result"]["dimension"], 9);
}

#[test]
fn bundle_dim_from_a_request() {
    assert_eq!(ok(&["bundle", "dim"], omega_spec(3.0, 1.0))["dimension"], 8);
}

#[test]
fn distance_between_scaled_identities() {
    let res = ok(&["dist"], json!({"p1": pt((0.0, 1.0), (0.0, 0.0)), "p2": pt((0.0, 2.0), (0.0, 0.0))}));
    assert!(close(&res["rho"], std::f64::consts::SQRT_2 * std::f64::consts::LN_2, 1e-15));
    assert!(close(&res["lambda"], 2.0, 1e-15));
    assert!(close(&res["mu"], 2.0, 1e-15));
}

#[test]
fn verify_all_passes() {
    let r = run(&["verify", "--suite", "all", "--seed", "7"], None);
    assert_eq!(r.code, 0, "{}", r.text);
    assert_eq!(r.out["result"]["failed"], 0);
    assert_eq!(r.out["result"]["suites"].as_array().unwrap().len(), 6);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let a = run(&["verify", "--suite", "group", "--seed", "3"], None).text;
    let b = run(&["verify", "--suite", "group", "--seed", "3"], None).text;
    assert_eq!(a, b);
    let a = run(&["group", "sample", "--count", "3", "--seed", "11"], None).text;
    let b = run(&["group", "sample", "--count", "3", "--seed", "11"], None).text;
    assert_eq!(a, b);
}

#[test]
fn malformed_json_exits_2_with_an_error_object() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hatsiegel"))
        .arg("dist")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"{not json").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "domain");
}

#[test]
fn points_outside_the_domain_exit_2() {
    let r = run(&["point"], Some(pt((0.0, 1.0), (0.0, 1.5))));
    assert_eq!(r.code, 2);
    assert_eq!(r.out["error"]["kind"], "domain");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["nope"], None).code, 2);
    assert_eq!(run(&["bundle", "dim", "--kind", "omega"], Some(json!({}))).code, 2);
    assert_eq!(run(&["--abs-tol", "0", "picard", "hodge"], None).code, 2);
}

#[test]
fn failed_checks_exit_1() {
    let not_integral = json!({"kind": "custom", "h": [[c(1.3, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]], "omega": pt((0.0, 1.0), (0.0, 0.0))});
    let r = run(&["bundle", "check"], Some(not_integral));
    assert_eq!(r.code, 1);
    assert_eq!(r.out["result"]["integral"], false);
    let not_member =
        json!({"matrix": [[2.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]});
    assert_eq!(run(&["group", "check"], Some(not_member)).code, 1);
}

#[test]
fn point_and_cayley() {
    let p = pt((0.5, 2.0), (0.1, 1.0));
    let res = ok(&["point"], p.clone());
    assert!(close(&res["det_im"], 3.0, 1e-15));
    let disk = ok(&["cayley"], json!({"point": p}))["disk"].clone();
    let back = ok(&["cayley"], json!({"disk": disk}))["point"].clone();
    assert!(close(&back["tau"]["re"], 0.5, 1e-11));
    assert!(close(&back["z"]["im"], 1.0, 1e-11));
}

#[test]
fn group_round_trip_through_the_cli() {
    let sample = ok(&["group", "sample", "--seed", "5"], json!({}));
    let el = sample["elements"][0].clone();
    let m = ok(&["group", "check"], json!({"matrix": el["matrix"]}));
    assert_eq!(m["member"], true);
    assert_eq!(m["epsilon"], 1);
    let pair = ok(&["group", "split"], json!({"element": el}))["pair"].clone();
    let fused = ok(&["group", "fuse"], pair)["element"].clone();
    let (a, b) = (fused["matrix"].as_array().unwrap(), el["matrix"].as_array().unwrap());
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.as_array().unwrap().iter().zip(rb.as_array().unwrap()) {
            assert!((x.as_f64().unwrap() - y.as_f64().unwrap()).abs() < 1e-12);
        }
    }
    let image = ok(&["act"], json!({"element": el, "point": pt((0.0, 1.0), (0.0, 0.2))}));
    assert!(image["point"]["tau"]["im"].as_f64().unwrap() > image["point"]["z"]["im"].as_f64().unwrap().abs());
}

#[test]
fn geodesic_volume_and_laplacian() {
    let g =
        ok(&["geodesic"], json!({"p1": pt((0.0, 1.0), (0.0, 0.0)), "p2": pt((0.0, 2.0), (0.0, 0.0)), "samples": 3}));
    assert_eq!(g["points"].as_array().unwrap().len(), 3);
    assert!(close(&g["points"][2]["point"]["tau"]["im"], 2.0, 1e-12));
    let vol = ok(&["volume"], json!({"point": pt((0.0, 2.0), (0.0, 1.0))}));
    assert!(close(&vol["density"], 4.0 / 9.0, 1e-15));
    // Δ log det Y = −2 on the product of two hyperbolic planes
    let lap = ok(&["laplacian"], json!({"point": pt((0.3, 1.5), (0.2, 0.4)), "field": "log_det_y"}));
    assert!(close(&lap["value"], -2.0, 1e-6));
    assert_eq!(run(&["laplacian"], Some(json!({"point": pt((0.0, 1.0), (0.0, 0.0)), "field": "w"}))).code, 2);
}

#[test]
fn bundle_gram_semichar_and_factor() {
    let spec = omega_spec(2.0, 1.0);
    let g = ok(&["bundle", "gram"], spec.clone());
    assert_eq!(g["E_integral"].as_array().unwrap().len(), 4);
    let mut req = spec.clone();
    req["n"] = json!([1, 1, 0, 0]);
    req["m"] = json!([0, 1, 1, 0]);
    let s = ok(&["bundle", "semichar"], req);
    assert!(s["parity"] == 0 || s["parity"] == 1);
    let mut req = spec;
    req["alpha"] = json!([1, 0, -1, 2]);
    req["z"] = json!([c(0.1, 0.2), c(-0.3, 0.0)]);
    let f = ok(&["bundle", "factor"], req);
    assert!(f["log_factor"]["re"].is_number());
    assert_eq!(ok(&["bundle", "check"], omega_spec(2.0, 1.0))["riemann_form"], true);
}

#[test]
fn theta_commands() {
    let req = json!({"omega": pt((0.0, 1.0), (0.0, 0.0)), "z": [c(0.0, 0.0), c(0.0, 0.0)]});
    let th = ok(&["theta", "eval"], req);
    let q = (-std::f64::consts::PI).exp();
    let theta3: f64 = (1..100).map(|n| (1.0 - q.powi(2 * n)) * (1.0 + q.powi(2 * n - 1)).powi(2)).product();
    assert!(close(&th["value"]["re"], theta3 * theta3, 1e-12));
    let req = json!({"omega": pt((0.1, 1.3), (0.2, 0.3)), "z": [c(0.3, 0.1), c(-0.2, 0.4)], "m": [1, -1], "k": [0, 2]});
    assert!(ok(&["theta", "qp"], req)["residual"].as_f64().unwrap() < 1e-8);
    let req = json!({"omega": pt((0.1, 1.3), (0.2, 0.3)), "z": [c(0.3, 0.1), c(-0.2, 0.4)], "alpha": [1, 0, -1, 1]});
    let b = ok(&["theta", "bridge"], req);
    assert_eq!(b["twist"], json!([1, 1, 1, 1]));
}

#[test]
fn picard_commands() {
    let om = json!({"omega": pt((0.2, 1.4), (0.1, 0.5))});
    let dual = ok(&["picard", "dual"], om.clone());
    assert_eq!(dual["basis"].as_array().unwrap().len(), 4);
    ok(&["picard", "poincare"], om);
    let k = ok(&["picard", "kernel"], json!({"kind": "omega", "omega": pt((0.0, 2.0), (0.0, 1.0))}));
    assert_eq!(k["divisors"], json!([1, 1, 3, 3]));
    assert_eq!(k["order"], 9);
    let mut req = json!({"kind": "omega", "omega": pt((0.0, 2.0), (0.0, 1.0))});
    req["a"] = json!([c(1.0 / 3.0, 0.0), c(1.0 / 3.0, 0.0)]);
    req["b"] = json!([c(0.2, -0.1), c(0.0, 0.3)]);
    ok(&["picard", "square"], req.clone());
    let t = ok(&["picard", "translate"], req);
    assert!(t["exponents"].as_array().unwrap().len() == 4);
    let cv = ok(&["picard", "curvature"], json!({"kind": "star", "omega": pt((0.0, 1.0), (0.0, 0.0))}));
    assert!(close(&cv["c"][0][1]["re"], std::f64::consts::PI, 1e-15));
    let h = ok(&["picard", "hodge"], json!({}));
    assert_eq!(h["betti"], json!([1, 4, 6, 4, 1]));
}

#[test]
fn input_flag_reads_a_file() {
    let dir = std::env::temp_dir().join(format!("hatsiegel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("req.json");
    std::fs::write(&path, omega_spec(2.0, 0.0).to_string()).unwrap();
    let r = run(&["bundle", "dim", "--input", path.to_str().unwrap()], None);
    assert_eq!(r.out["result"]["dimension"], 4);
    std::fs::remove_dir_all(dir).unwrap();
}
