use std::io::Write;
use std::process::Command;

use serde_json::Value;

use binsig::cli::run;

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("binsig").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out) = call(args);
    assert_eq!(code, 0, "{args:?} -> {out}");
    serde_json::from_str(&out).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

/// Rebuilds an argument vector from an envelope's `command` and `inputs`.
fn refeed(env: &Value) -> Vec<String> {
    let mut argv: Vec<String> = env["command"]
        .as_str()
        .unwrap()
        .split(' ')
        .map(String::from)
        .collect();
    for (k, v) in env["inputs"].as_object().unwrap() {
        argv.push(format!("--{k}"));
        argv.push(v.as_str().unwrap().to_string());
    }
    argv
}

#[test]
fn worked_examples() {
    let p = num(&json(&[
        "significance",
        "--q",
        "154/162",
        "--m",
        "162",
        "--q0",
        "0.95",
    ])["result"]["p"]);
    assert!((0.424..=0.434).contains(&p));
    let quad = json(&[
        "significance",
        "--q",
        "154/162",
        "--m",
        "162",
        "--q0",
        "0.95",
        "--method",
        "quadrature",
    ]);
    assert!((num(&quad["result"]["p"]) - p).abs() < 1e-9);

    let r = json(&[
        "sample-size",
        "--q",
        "0.61",
        "--q0",
        "0.5",
        "--target",
        "0.9",
    ]);
    assert_eq!(r["result"]["m_int"], 35);
    assert!((num(&r["result"]["m_real"]) - 34.809).abs() < 0.01);

    let r = json(&[
        "bivariate",
        "--q",
        "0.45",
        "--pi",
        "0.40",
        "--m",
        "1059",
        "--n",
        "1059",
    ]);
    assert!((num(&r["result"]["p"]) - 0.990_009_678).abs() < 1e-6);

    let r = json(&[
        "trunc-fit",
        "--m",
        "0.7978845608028654",
        "--s",
        "0.6028102749890869",
    ]);
    assert!(num(&r["result"]["mu"]).abs() < 1e-6);
    assert!((num(&r["result"]["sigma"]) - 1.0).abs() < 1e-6);

    let r = json(&[
        "superiority",
        "--mu1",
        "-1",
        "--sigma1",
        "2",
        "--mu2",
        "-1",
        "--sigma2",
        "2",
    ]);
    assert_eq!(num(&r["result"]["p"]), 0.5);
}

#[test]
fn exact_and_quadrature_agree_through_cli() {
    let base = [
        "bivariate",
        "--q",
        "0.6",
        "--pi",
        "0.4",
        "--m",
        "20",
        "--n",
        "25",
    ];
    let quad = json(&base);
    let exact = json(&[&base[..], &["--method", "exact"]].concat());
    assert!((num(&quad["result"]["p"]) - num(&exact["result"]["p"])).abs() < 1e-9);
}

#[test]
fn envelope_inputs_reproduce_result() {
    let cases: &[&[&str]] = &[
        &[
            "significance",
            "--q",
            "154/162",
            "--m",
            "162",
            "--q0",
            "0.95",
        ],
        &[
            "--panels",
            "4000",
            "bivariate",
            "--q",
            "0.45",
            "--pi",
            "0.4",
            "--m",
            "300",
            "--n",
            "280",
            "--delta",
            "0.01",
        ],
        &[
            "curve",
            "--q",
            "0.7",
            "--m",
            "12.5",
            "--grid",
            "0.1,0.5,0.9",
        ],
        &[
            "tail",
            "--q",
            "0.3",
            "--efficacy",
            "0.25",
            "--m",
            "40",
            "--mode",
            "continuum",
        ],
        &["trunc-moments", "--mu", "-0.5", "--sigma", "2"],
        &[
            "--seed",
            "3",
            "--draws",
            "5000",
            "verify",
            "bivariate",
            "--q",
            "0.6",
            "--pi",
            "0.5",
            "--m",
            "50",
            "--n",
            "50",
        ],
    ];
    for args in cases {
        let first = json(args);
        let argv = refeed(&first);
        let again = json(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(first, again, "{args:?}");
    }
}

#[test]
fn csv_and_json_carry_identical_values() {
    let args = ["curve", "--q", "0.8", "--m", "30", "--points", "11"];
    let j = json(&args);
    let (code, csv_out) = call(&[&["--format", "csv"], &args[..]].concat());
    assert_eq!(code, 0);
    let mut reader = csv::Reader::from_reader(csv_out.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["Q0", "p"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let points = j["result"]["points"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    for (row, pt) in rows.iter().zip(points) {
        // same 17-digit text in both formats
        assert_eq!(row[0], pt["Q0"].to_string());
        assert_eq!(row[1], pt["p"].to_string());
        assert_eq!(row[1].parse::<f64>().unwrap(), num(&pt["p"]));
    }

    let (code, csv_out) = call(&[
        "--format",
        "csv",
        "significance",
        "--q",
        "0.9",
        "--m",
        "10",
        "--q0",
        "0.8",
    ]);
    assert_eq!(code, 0);
    let j = json(&["significance", "--q", "0.9", "--m", "10", "--q0", "0.8"]);
    let mut reader = csv::Reader::from_reader(csv_out.as_bytes());
    let row = reader.records().next().unwrap().unwrap();
    let col = reader
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "p")
        .unwrap();
    assert_eq!(row[col], j["result"]["p"].to_string());
}

#[test]
fn exit_codes() {
    assert_eq!(
        call(&["significance", "--q", "2", "--m", "10", "--q0", "0.5"]).0,
        2
    );
    assert_eq!(call(&["significance", "--q", "0.5", "--m", "10"]).0, 2);
    assert_eq!(call(&["no-such-command"]).0, 2);
    assert_eq!(
        call(&[
            "--draws",
            "10",
            "verify",
            "significance",
            "--q",
            "0.5",
            "--m",
            "10",
            "--q0",
            "0.4"
        ])
        .0,
        2
    );

    let (code, out) = call(&[
        "sample-size",
        "--q",
        "0.4",
        "--q0",
        "0.5",
        "--target",
        "0.9",
    ]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "NoSolution");
    assert_eq!(v["command"], "sample-size");

    let (code, out) = call(&[
        "bivariate",
        "--q",
        "0.5",
        "--pi",
        "0.5",
        "--m",
        "300",
        "--n",
        "300",
        "--method",
        "exact",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("Overflow"));
}

#[test]
fn verify_reports_agreement() {
    let v = json(&[
        "--draws",
        "50000",
        "verify",
        "significance",
        "--q",
        "154/162",
        "--m",
        "162",
        "--q0",
        "0.95",
    ]);
    assert_eq!(v["result"]["agree"], true);
    assert!(num(&v["result"]["z"]) < 4.0);
    assert!((num(&v["result"]["analytic"]) - 0.4289).abs() < 1e-4);
}

#[test]
fn distribution_files() {
    let dir = tempfile::tempdir().unwrap();
    let wheel = dir.path().join("wheel.csv");
    let mut f = std::fs::File::create(&wheel).unwrap();
    writeln!(f, "value,mass").unwrap();
    for k in 0..37 {
        writeln!(f, "{k},{}", 1.0 / 37.0).unwrap();
    }
    drop(f);
    let w = wheel.to_str().unwrap();

    let (code, out) = call(&["--format", "csv", "mean-dist", "--input", w, "--n", "10"]);
    assert_eq!(code, 0);
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["value", "mass"]);
    let rows: Vec<(f64, f64)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 361);
    let total: f64 = rows.iter().map(|r| r.1).sum();
    let mean: f64 = rows.iter().map(|r| r.0 * r.1).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!((mean - 18.0).abs() < 1e-9);

    let v = json(&["superiority", "--dist1", w, "--dist2", w]);
    let p = num(&v["result"]["p"]);
    // ties count as success: (1 + 1/37) / 2
    assert!((p - (1.0 + 1.0 / 37.0) / 2.0).abs() < 1e-12, "{p}");

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "value,mass\n0,0.5\n1,0.4\n").unwrap();
    assert_eq!(
        call(&["mean-dist", "--input", bad.to_str().unwrap(), "--n", "2"]).0,
        2
    );
    assert_eq!(
        call(&[
            "mean-dist",
            "--input",
            dir.path().join("missing.csv").to_str().unwrap(),
            "--n",
            "2"
        ])
        .0,
        2
    );
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_binsig"))
        .args(["significance", "--q", "0.61", "--m", "35", "--q0", "0.5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(num(&v["result"]["p"]) >= 0.9);

    let out = Command::new(env!("CARGO_BIN_EXE_binsig"))
        .arg("--version")
        .output()
        .unwrap();
    assert!(out.status.success());
}
