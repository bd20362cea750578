use std::path::PathBuf;
use std::process::Command;

use clap::Parser;
use icard_cli::{run, Cli, Output};
use serde_json::Value;

fn icard(args: &[&str]) -> Output {
    let mut argv = vec!["icard"];
    argv.extend_from_slice(args);
    run(&Cli::try_parse_from(argv).expect("arguments parse"))
}

fn text(args: &[&str]) -> String {
    icard(args).text.trim().to_string()
}

fn write_temp(name: &str, body: &str) -> String {
    let dir: PathBuf = std::env::temp_dir().join(format!("icard-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn two_leaves() -> String {
    write_temp("two_leaves.json", r#"{"id":0,"children":[{"id":1},{"id":2,"val":["p0"]}]}"#)
}

#[test]
fn ord_commands() {
    assert_eq!(text(&["ord", "eval", "w^(w)+w^(w)"]), "e[2](1)+e[2](1)");
    assert_eq!(text(&["ord", "cmp", "w+1", "1+w"]), ">");
    assert_eq!(text(&["ord", "cmp", "1+w", "w"]), "=");
    assert_eq!(text(&["ord", "add", "1", "w"]), "w");
    assert_eq!(text(&["ord", "log", "w^(w)"]), "w");
    assert_eq!(text(&["ord", "exp", "2", "--level", "w"]), "e[w](2)");
    assert_eq!(text(&["ord", "fundseq", "w^(w)", "--count", "3"]), "0\nw\nw^(2)");
}

#[test]
fn ord_json_and_syntax_errors() {
    let out = icard(&["ord", "cmp", "w", "1"]);
    assert_eq!(out.json["order"], "greater");
    let bad = icard(&["ord", "eval", "w+"]);
    assert_eq!(bad.code, 2);
    assert!(bad.text.contains("syntax error"));
}

#[test]
fn gl_prove_and_countermodel() {
    let thm = icard(&["gl", "prove", "[]([]p0->p0)->[]p0"]);
    assert_eq!((thm.code, thm.text.as_str()), (0, "theorem"));
    let cm = icard(&["gl", "prove", "[]p0->p0"]);
    assert_eq!(cm.code, 1);
    assert_eq!(cm.json["verdict"], "countermodel");
    assert!(cm.json["model"]["nodes"].is_array());
}

#[test]
fn gl_model_then_check() {
    let out = icard(&["gl", "model", "<>p0", "[]~p1"]);
    assert_eq!(out.code, 0);
    let model = write_temp("model.json", &out.text);
    let check = icard(&["gl", "check", "<>(p0 & ~p1)", "--model", &model]);
    assert_eq!(check.code, 0);
    assert_eq!(icard(&["gl", "check", "[]F", "--model", &model]).code, 1);
}

#[test]
fn gl_consistency() {
    assert_eq!(icard(&["gl", "consistent", "p0", "~p0"]).code, 1);
    assert_eq!(icard(&["gl", "consistent", "<>p0", "[]p1"]).code, 0);
}

#[test]
fn bouquet_rank_and_mc() {
    let b = two_leaves();
    assert_eq!(text(&["bouquet", "rank", "--bouquet", &b]), "1");
    assert_eq!(icard(&["bouquet", "mc", "<>p0", "--bouquet", &b]).code, 0);
    assert_eq!(icard(&["bouquet", "mc", "[]p0", "--bouquet", &b]).code, 1);
    assert_eq!(icard(&["bouquet", "mc", "p0", "--bouquet", &b, "--path", "2"]).code, 0);
    assert_eq!(icard(&["bouquet", "mc", "p0", "--bouquet", &b, "--path", "0", "--positions"]).code, 1);
}

#[test]
fn omega_copies_have_rank_omega() {
    let b = write_temp("omega.json", r#"{"id":0,"children":[{"id":1,"children":[{"id":2,"mult":"w"}]},{"id":3}]}"#);
    assert_eq!(text(&["bouquet", "rank", "--bouquet", &b]), "2");
}

#[test]
fn dmap_eval_witness_selftest() {
    let b = two_leaves();
    let eval = icard(&["--json", "dmap", "eval", "--lambda", "w", "--bouquet", &b, "--xi", "w+1"]);
    assert_eq!(eval.json["node"], 1);
    let wit = icard(&["dmap", "witness", "--lambda", "w", "--bouquet", &b, "--path", "1"]);
    assert_eq!(wit.json["witness"], "0");
    let st = icard(&["dmap", "selftest", "--bouquet", &b, "--samples", "50"]);
    assert_eq!(st.code, 0);
    assert!(st.json["failures"].as_array().unwrap().is_empty());
}

#[test]
fn satisfy_finite_set() {
    let out = icard(&["satisfy", "<>p0", "<>~p0"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.json["witness"], "w");
    assert_eq!(out.json["theta"], "1");
    assert_eq!(out.json["certificate"]["top_maps_to_root"], true);
}

#[test]
fn satisfy_inconsistent_set() {
    let out = icard(&["satisfy", "p0", "~p0"]);
    assert_eq!(out.code, 1);
    assert_eq!(out.json["verdict"], "inconsistent");
    assert!(out.text.contains("~(p0 & ~p0)"));
}

#[test]
fn satisfy_diamond_chain_stream() {
    let out = icard(&["satisfy", "--stream", "diamond-chain"]);
    assert_eq!(out.code, 0, "{}", out.text);
    assert_eq!(out.json["witness"], "e[2](1)");
    let out = icard(&["satisfy", "--stream", "diamond-chain", "--lambda", "w"]);
    assert_eq!(out.code, 0, "{}", out.text);
    assert_eq!(out.json["witness"], "e[w+1](1)");
}

#[test]
fn binary_exit_codes_and_streams() {
    let bin = env!("CARGO_BIN_EXE_icard");
    let ok = Command::new(bin).args(["--json", "ord", "add", "w", "1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["value"], "w+1");

    let neg = Command::new(bin).args(["gl", "prove", "p0"]).output().unwrap();
    assert_eq!(neg.status.code(), Some(1));

    let missing = Command::new(bin).args(["bouquet", "rank", "--bouquet", "/nonexistent/b.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert!(missing.stdout.is_empty());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("input error"));
}
