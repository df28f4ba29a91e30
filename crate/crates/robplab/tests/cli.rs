//! End-to-end tests of the command-line interface: file round trips, byte
//! determinism of reports, and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

use robplab::bp::equivalent;
use robplab::io;

fn robplab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robplab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn gen_writes_parseable_files_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = robplab(dir.path(), &["gen", "-k", "3", "-r", "2", "-o", "fam"]);
    assert!(out1.status.success(), "{out1:?}");
    let g = io::parse_gr(&std::fs::read_to_string(dir.path().join("fam.gr")).unwrap()).unwrap();
    assert_eq!(g.vertex_count(), 14);
    let f =
        io::parse_dimacs(&std::fs::read_to_string(dir.path().join("fam.cnf")).unwrap()).unwrap();
    assert_eq!(f.variable_count(), 14);
    let td = io::parse_td(&std::fs::read_to_string(dir.path().join("fam.td")).unwrap()).unwrap();
    assert_eq!(td.bags.len(), 7);
    let meta = std::fs::read_to_string(dir.path().join("fam.json")).unwrap();
    assert!(meta.contains("\"k\":3"));

    let dir2 = tempfile::tempdir().unwrap();
    let out2 = robplab(dir2.path(), &["gen", "-k", "3", "-r", "2", "-o", "fam"]);
    assert_eq!(out1.stdout, out2.stdout);
    assert_eq!(
        std::fs::read(dir.path().join("fam.gr")).unwrap(),
        std::fs::read(dir2.path().join("fam.gr")).unwrap()
    );
}

#[test]
fn gen_rejects_small_k() {
    let dir = tempfile::tempdir().unwrap();
    let out = robplab(dir.path(), &["gen", "-k", "2", "-r", "1", "-o", "fam"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn mw_exact_record_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    robplab(dir.path(), &["gen", "-k", "3", "-r", "1", "-o", "fam"]);
    let a = robplab(dir.path(), &["mw", "--graph", "fam.gr"]);
    assert!(a.status.success());
    let record: serde_json::Value = serde_json::from_str(stdout(&a).trim()).unwrap();
    assert_eq!(record["mode"], "exact");
    assert!(record["width"].as_u64().unwrap() >= 1);
    let b = robplab(dir.path(), &["mw", "--graph", "fam.gr"]);
    assert_eq!(a.stdout, b.stdout);

    let h1 = robplab(
        dir.path(),
        &["mw", "--graph", "fam.gr", "--heuristic", "--budget", "2000", "--seed", "5"],
    );
    let h2 = robplab(
        dir.path(),
        &["mw", "--graph", "fam.gr", "--heuristic", "--budget", "2000", "--seed", "5"],
    );
    assert!(h1.status.success());
    assert_eq!(h1.stdout, h2.stdout);
}

#[test]
fn randomized_modes_require_seed() {
    let dir = tempfile::tempdir().unwrap();
    robplab(dir.path(), &["gen", "-k", "3", "-r", "1", "-o", "fam"]);
    let out = robplab(dir.path(), &["mw", "--graph", "fam.gr", "--heuristic"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let out = robplab(dir.path(), &["mw", "--graph", "fam.gr", "--falsify", "2"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn mw_size_limit_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // 23 isolated vertices: above the default DP limit.
    let mut gr = String::from("p tw 23 0\n");
    gr.push_str("");
    std::fs::write(dir.path().join("big.gr"), gr).unwrap();
    let out = robplab(dir.path(), &["mw", "--graph", "big.gr"]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn obdd_certify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    // K4 as a graph file.
    let k4 = robplab::graph::Graph::complete(4);
    std::fs::write(dir.path().join("k4.gr"), io::write_gr(&k4)).unwrap();
    let out = robplab(
        dir.path(),
        &["build-obdd", "--graph", "k4.gr", "-o", "k4.bp"],
    );
    assert!(out.status.success());
    let cert = robplab(
        dir.path(),
        &["certify", "--bp", "k4.bp", "--graph", "k4.gr", "-t", "2"],
    );
    assert!(cert.status.success(), "{cert:?}");
    let record: serde_json::Value = serde_json::from_str(stdout(&cert).trim()).unwrap();
    assert!(record["set_count"].as_u64().unwrap() >= 2);

    // t = 3 still verifies on K4: the four triangles are its minimal covers
    // and each contains itself.
    let t3 = robplab(
        dir.path(),
        &["certify", "--bp", "k4.bp", "--graph", "k4.gr", "-t", "3"],
    );
    assert!(t3.status.success());

    // K2 has minimal covers of size 1, so no 2-cover exists at all.
    let k2 = robplab::graph::Graph::complete(2);
    std::fs::write(dir.path().join("k2.gr"), io::write_gr(&k2)).unwrap();
    robplab(dir.path(), &["build-obdd", "--graph", "k2.gr", "-o", "k2.bp"]);
    let bad = robplab(
        dir.path(),
        &["certify", "--bp", "k2.bp", "--graph", "k2.gr", "-t", "2"],
    );
    assert_eq!(bad.status.code(), Some(1), "{bad:?}");
}

#[test]
fn uniformize_and_convert_files() {
    let dir = tempfile::tempdir().unwrap();
    let text = "nrobp 4 4 2\nn 0 root\nn 1\nn 2\nn 3 leaf\ne 0 1 +v0\ne 1 2 +v1\ne 2 3 .\ne 1 3 .\n";
    std::fs::write(dir.path().join("merge.bp"), text).unwrap();
    let out = robplab(
        dir.path(),
        &["uniformize", "--bp", "merge.bp", "-o", "uni.bp", "--trace"],
    );
    assert!(out.status.success());
    assert!(stdout(&out).lines().count() >= 2, "trace plus summary");
    let uni =
        io::parse_bp(&std::fs::read_to_string(dir.path().join("uni.bp")).unwrap()).unwrap();
    assert!(uni.check_uniform());
    let orig = io::parse_bp(text).unwrap();
    assert!(equivalent(&orig, &uni, 20).unwrap());

    let conv = robplab(
        dir.path(),
        &["convert", "--input", "uni.bp", "--to", "traditional", "-o", "trad.bp"],
    );
    assert!(conv.status.success());
    let back = robplab(
        dir.path(),
        &["convert", "--input", "trad.bp", "--to", "arosrn", "-o", "back.bp"],
    );
    assert!(back.status.success());
    let round =
        io::parse_bp(&std::fs::read_to_string(dir.path().join("back.bp")).unwrap()).unwrap();
    assert!(equivalent(&orig, &round, 20).unwrap());

    let wrong = robplab(dir.path(), &["convert", "--input", "uni.bp", "--to", "arosrn"]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn separation_csv_and_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let csv = robplab(dir.path(), &["separation", "--r-max", "3", "--csv"]);
    assert!(csv.status.success());
    let text = stdout(&csv);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "r,n,mw_bound,nrobp_lb,ddnnf_ub,ratio,log2_ratio,k_at_least_50,r_at_least_5_log_k"
    );
    assert!(lines.next().unwrap().starts_with("1,6,1,"));

    let jsonl = robplab(dir.path(), &["separation", "--r-max", "3"]);
    for line in stdout(&jsonl).lines() {
        let row: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(row["r"].as_u64().unwrap() >= 1);
    }
    let again = robplab(dir.path(), &["separation", "--r-max", "3"]);
    assert_eq!(jsonl.stdout, again.stdout);
}

#[test]
fn phi_to_stdout_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = robplab::graph::Graph::complete(3);
    std::fs::write(dir.path().join("k3.gr"), io::write_gr(&k3)).unwrap();
    let out = robplab(dir.path(), &["phi", "--graph", "k3.gr"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "p cnf 3 3\n1 2 0\n1 3 0\n2 3 0\n");

    let bounds = robplab(
        dir.path(),
        &[
            "bounds",
            "--graph",
            "k3.gr",
            "--exact-mw",
            "-t",
            "1",
            "--sample",
            "0",
            "--trials",
            "2000",
            "--seed",
            "3",
        ],
    );
    assert!(bounds.status.success(), "{bounds:?}");
    let record: serde_json::Value = serde_json::from_str(stdout(&bounds).trim()).unwrap();
    assert_eq!(record["mw"], 1);
    assert_eq!(record["min_t_cover"], 2);
    assert!(record["sample"]["estimate"].as_f64().unwrap() > 0.0);

    let nosample_seed = robplab(dir.path(), &["bounds", "--graph", "k3.gr", "--sample", "0"]);
    assert_eq!(nosample_seed.status.code(), Some(2));
}

#[test]
fn verify_quick_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = robplab(dir.path(), &["verify", "--seed", "7"]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 28);
    for line in text.lines() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["passed"], true, "{line}");
    }
}
