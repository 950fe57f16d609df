use std::path::{Path, PathBuf};
use std::process::Command;

use relcoalg::{FinSet, UCSubmonoid};
use relcoalg_cli::fixtures::FixtureFile;
use relcoalg_cli::{load_relation, run, Outcome, EXIT_FAILS, EXIT_HOLDS, EXIT_RESOURCE, EXIT_USAGE};
use serde_json::Value as Json;
use tempfile::TempDir;

const LOOPS: &str = "\
# two a-loops swapped by b, plus two entry states
x -a-> x
x -b-> y
y -a-> y
y -b-> x
p -a-> x
p -b-> x
q -a-> x
q -b-> y
";

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("relcoalg").chain(args.iter().copied()))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_of(out: &Outcome) -> Json {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

#[test]
fn similarity_of_the_two_loop_system() {
    let dir = TempDir::new().unwrap();
    let lts = write(&dir, "loops.lts", LOOPS);
    let out = cli(&["similarity", s(&lts), "--relator", "barr"]);
    assert_eq!(out.code, EXIT_HOLDS, "{}", out.stderr);
    assert!(out.stdout.contains("classes: {x,y,p,q}"), "{}", out.stdout);
    assert!(out.stdout.contains("equals behavioural equivalence: yes"));
    assert!(out.stdout.starts_with("# seed 0"));
}

#[test]
fn similarity_json_round_trips_as_a_witness() {
    let dir = TempDir::new().unwrap();
    let lts = write(&dir, "loops.lts", LOOPS);
    let out = cli(&["similarity", s(&lts), "--format", "json", "--seed", "9"]);
    let json = json_of(&out);
    assert_eq!(json["config"]["seed"], 9);
    let rel = write(&dir, "sim.json", &serde_json::to_string(&json["similarity"]).unwrap());
    let states = FinSet::new(["x", "y", "p", "q"]).unwrap();
    assert_eq!(load_relation(&rel, &states, &states).unwrap().len(), 16);
    assert_eq!(cli(&["check", s(&lts), "--witness", s(&rel)]).code, EXIT_HOLDS);
}

#[test]
fn empty_and_oversized_systems() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.json", r#"{"functor": "Pow", "states": [], "transition": {}}"#);
    let out = cli(&["similarity", s(&empty), "--format", "json"]);
    assert_eq!(out.code, EXIT_HOLDS, "{}", out.stderr);
    assert_eq!(json_of(&out)["similarity"]["pairs"], Json::Array(vec![]));

    let lts = write(&dir, "loops.lts", LOOPS);
    assert_eq!(cli(&["similarity", s(&lts), "--max-size", "3"]).code, EXIT_RESOURCE);
    let status = Command::new(env!("CARGO_BIN_EXE_relcoalg"))
        .args(["similarity", s(&lts), "--max-card", "100"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_RESOURCE));
}

#[test]
fn checking_the_four_pair_witness() {
    let dir = TempDir::new().unwrap();
    let lts = write(&dir, "loops.lts", LOOPS);
    let w = write(&dir, "w.txt", "p -> q\nx -> x\nx -> y\ny -> y\n");
    assert_eq!(cli(&["check", s(&lts), "--witness", s(&w), "--relator", "twisted"]).code, EXIT_HOLDS);
    let out = cli(&["check", s(&lts), "--witness", s(&w), "--relator", "barr"]);
    assert_eq!(out.code, EXIT_FAILS);
    assert!(out.stdout.contains("fails at (x, y)"), "{}", out.stdout);

    let bad = write(&dir, "bad.txt", "p q r\n");
    let out = cli(&["check", s(&lts), "--witness", s(&bad)]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("parse error"));
    let unknown = write(&dir, "unknown.txt", "p -> z\n");
    assert_eq!(cli(&["check", s(&lts), "--witness", s(&unknown)]).code, EXIT_USAGE);
}

#[test]
fn twisted_command_reports_both_witnesses() {
    let dir = TempDir::new().unwrap();
    let lts = write(&dir, "loops.lts", LOOPS);
    let out = cli(&["twisted", s(&lts), "--pair", "p,q", "--format", "json"]);
    assert_eq!(out.code, EXIT_HOLDS, "{}", out.stderr);
    let row = &json_of(&out)["pairs"][0];
    assert_eq!(row["standard"]["pairs"].as_array().unwrap().len(), 5);
    assert_eq!(row["twisted"]["pairs"].as_array().unwrap().len(), 4);
    let dot = cli(&["twisted", s(&lts), "--pair", "p,q", "--format", "dot"]);
    assert_eq!(dot.stdout.matches("style=dashed").count(), 4);

    let w = write(&dir, "w.txt", "p -> q\nx -> x\nx -> y\ny -> y\n");
    let bottom = cli(&["twisted", s(&lts), "--witness", s(&w), "--submonoid", "bottom"]);
    assert_eq!(bottom.code, EXIT_FAILS);
    let top = cli(&["twisted", s(&lts), "--witness", s(&w)]);
    assert_eq!(top.code, EXIT_HOLDS);
    assert!(top.stdout.contains("standard bisimulation: no"));
    let generated = cli(&["twisted", s(&lts), "--pair", "p,q", "--submonoid", "[(a,b),(b,b),(b,a)]"]);
    assert_eq!(generated.code, EXIT_HOLDS, "{}", generated.stderr);
    assert_eq!(cli(&["twisted", s(&lts), "--pair", "p,z"]).code, EXIT_USAGE);
}

#[test]
fn lattice_outputs() {
    let out = cli(&["lattice", "--labels", "a,b", "--format", "json"]);
    let json = json_of(&out);
    let nodes = json["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 4);
    assert_eq!(json["hasse"].as_array().unwrap().len(), 4);
    let ab = FinSet::new(["a", "b"]).unwrap();
    for n in nodes {
        let sub = UCSubmonoid::from_json(&serde_json::from_value(n["submonoid"].clone()).unwrap()).unwrap();
        assert!(sub.all_normal());
        assert_eq!(sub.labels(), &ab);
    }
    let dot = cli(&["lattice", "--format", "dot"]);
    assert_eq!(dot.stdout.matches(" -> ").count(), 4);

    let single = json_of(&cli(&["lattice", "--labels", "*", "--format", "json"]));
    assert_eq!(single["nodes"].as_array().unwrap().len(), 1);

    let three = cli(&["lattice", "--labels", "a,b,c", "--max-nodes", "200"]);
    assert_eq!(three.code, EXIT_HOLDS);
    assert!(three.stdout.contains("lower bound"));
    assert_eq!(cli(&["lattice", "--labels", "a,b,c,d,e"]).code, EXIT_RESOURCE);
}

#[test]
fn oracle_compare_is_deterministic_and_reports_failures() {
    let args = ["oracle-compare", "--functor", "Exp{a,b} . Pow", "--samples", "30", "--seed", "5"];
    let first = cli(&args);
    assert_eq!(first.code, EXIT_HOLDS, "{}{}", first.stdout, first.stderr);
    assert_eq!(first, cli(&args));
    assert!(first.stdout.contains("seed 5"));
    let cyclic = cli(&["oracle-compare", "--functor", "MVal(Z2)", "--samples", "100", "--format", "json"]);
    assert_eq!(cyclic.code, EXIT_FAILS);
    assert!(json_of(&cyclic)["incomplete"].as_u64().unwrap() > 0);
    assert_eq!(cli(&["oracle-compare", "--functor", "Pow +"]).code, EXIT_USAGE);
}

#[test]
fn properties_exit_codes() {
    let good = cli(&["properties", "--relator", "barr(Pow)"]);
    assert_eq!(good.code, EXIT_HOLDS, "{}", good.stdout);
    let bad = cli(&["properties", "--relator", "cobarr(Id)", "--laws", "lax"]);
    assert_eq!(bad.code, EXIT_FAILS);
    assert!(bad.stdout.contains("counterexample"));
    assert_eq!(cli(&["properties"]).code, EXIT_USAGE);
    assert_eq!(cli(&["properties", "--relator", "barr(Pow)", "--laws", "nonsense"]).code, EXIT_USAGE);
}

#[test]
fn usage_errors() {
    assert_eq!(cli(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(cli(&["lattice", "--max-size", "0"]).code, EXIT_USAGE);
    assert_eq!(cli(&["oracle-compare", "--functor", "Pow", "--format", "dot"]).code, EXIT_USAGE);
    let help = cli(&["--help"]);
    assert_eq!(help.code, EXIT_HOLDS);
    assert!(help.stdout.contains("similarity"));
}

#[test]
fn fixture_suite_passes_and_names_tampered_fixtures() {
    let out = cli(&["examples", "--format", "json"]);
    assert_eq!(out.code, EXIT_HOLDS, "{}", out.stdout);
    assert_eq!(json_of(&out)["failed"], 0);

    let mut file = FixtureFile::builtin();
    let two_loops = file.fixtures.iter_mut().find(|f| f.name == "two-loops").unwrap();
    two_loops.expected["twisted_witness_size"] = Json::from(3);
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "tampered.json", &serde_json::to_string(&file).unwrap());
    let out = cli(&["examples", "--fixtures", s(&path)]);
    assert_eq!(out.code, EXIT_FAILS);
    assert!(out.stdout.contains("[FAIL] two-loops"), "{}", out.stdout);
    assert_eq!(out.stdout.matches("[PASS]").count(), file.fixtures.len() - 1);
}

#[test]
fn binary_exit_code_matches_library() {
    let status = Command::new(env!("CARGO_BIN_EXE_relcoalg")).args(["examples"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_HOLDS));
    let status = Command::new(env!("CARGO_BIN_EXE_relcoalg")).args(["similarity", "/nonexistent"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));
}
