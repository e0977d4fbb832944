//! Drives the command-line front end in-process: a decomposition with
//! bootstrap intervals, then a replay of the same run from its report.

use std::path::Path;

use natfx::cli::main_with_args;

fn natfx(args: &[&str]) -> String {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with_args(std::iter::once("natfx").chain(args.iter().copied()), &mut out, &mut err);
    println!("[natfx {} -> exit {code}]", args[0]);
    eprint!("{}", String::from_utf8_lossy(&err));
    String::from_utf8(out).unwrap()
}

fn main() {
    let dir = std::env::temp_dir().join(format!("natfx-cli-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let model = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/dm1.json");
    let model = model.to_str().unwrap();
    let sample = dir.join("sample.csv");
    let roles = dir.join("roles.json");
    std::fs::write(&roles, r#"{"exposure": "A", "mediators": ["M1", "M2"], "outcome": "Y"}"#).unwrap();

    print!("{}", natfx(&["check", "Y(a, M1(a), M2(a, M1(a*)))"]));
    print!("{}", natfx(&["decompose", "--model", model, "--a", "1", "--aref", "0", "--m1star", "0", "--m2star", "0"]));
    natfx(&["simulate", "--model", model, "--n", "4000", "--seed", "5", "--out", sample.to_str().unwrap()]);

    let report = natfx(&[
        "decompose", "--data", sample.to_str().unwrap(), "--roles", roles.to_str().unwrap(), "--a", "1", "--aref", "0",
        "--m1star", "0", "--m2star", "0", "--boot", "200", "--seed", "9", "--format", "json",
    ]);
    let saved = dir.join("report.json");
    std::fs::write(&saved, &report).unwrap();
    let replay = natfx(&["bootstrap-report", "--config", saved.to_str().unwrap(), "--format", "table"]);
    print!("{replay}");
    std::fs::remove_dir_all(&dir).ok();
}
