use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnnlogic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_exit_codes() {
    let ok = cli(&["verify", "family", "--L", "1", "--c", "2"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("verdict: PASS"));
    assert_eq!(cli(&["verify", "no-such-suite"]).status.code(), Some(2));
}

#[test]
fn verify_reports_are_reproducible() {
    let args = ["verify", "compiler", "--cases", "50", "--seed", "7", "--format", "tsv"];
    let a = cli(&args);
    let b = cli(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("compiler\tviolations\t0"));
}

#[test]
fn graph_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().join("o.fgr");
    let g = dir.path().join("g.fgr");
    let f = dir.path().join("f.net");
    let p = |x: &std::path::Path| x.to_str().unwrap().to_string();
    assert!(cli(&["gen", "--n", "5", "--order", "--out", &p(&o)]).status.success());
    let check = stdout(&cli(&["order-check", &p(&o)]));
    assert!(check.contains("strict-linear-order true") && check.contains("hom(P2) 10"));
    assert!(cli(&["gadgetise", &p(&o), &p(&g)]).status.success());
    assert_eq!(stdout(&cli(&["gnn", "run", "--net", "gadget-order", "--graph", &p(&g)])).trim(), format!("accepted {}", "1".repeat(15)));
    let trace = stdout(&cli(&["gnn", "run", "--net", "linear-order", "--graph", &p(&o), "--trace", "--vertex", "2"]));
    assert!(trace.contains("layer 4 vertex 0: 10/1 10/1 10/1 10/1"));
    assert!(trace.ends_with("vertex 2: 1\n"));
    assert!(cli(&["gml", "compile", "--formula", "<>=2 T", "--out", &p(&f)]).status.success());
    assert_eq!(stdout(&cli(&["gnn", "run", "--net", &format!("net:{}", p(&f)), "--graph", &p(&o)])).trim(), "accepted 11100");
    assert_eq!(stdout(&cli(&["gml", "eval", "--formula", "<>=2 T", "--graph", &p(&o), "--vertex", "3"])).trim(), "false");
}

#[test]
fn family_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fam");
    assert!(cli(&["family", "--L", "1", "--c", "1", "--outdir", out.to_str().unwrap()]).status.success());
    for f in ["G.fgr", "H.fgr", "report.txt"] {
        assert!(out.join(f).is_file());
    }
}
