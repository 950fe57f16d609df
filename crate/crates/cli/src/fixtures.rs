//! The built-in fixture suite: named worked examples with their expected
//! outcomes. Expected values live in a JSON file so that they can be
//! inspected and overridden.

use std::path::Path;

use relcoalg::lts::{linear_witness, minimization_family, two_loops_example};
use relcoalg::relator::{is_lax_extension, is_normal, preserves_converses};
use relcoalg::submonoid::{enumerate_nle, LatticeOptions};
use relcoalg::{
    behavioural_equivalence, is_simulation, minimal_witness, parse_relator, similarity, twisted_relator, FinFun,
    FinRel, FinSet, FunctorExpr, RelatorSpec, Result, TwistedSpec, UCSubmonoid,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

const BUILTIN: &str = include_str!("../fixtures/examples.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub expected: Json,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureFile {
    pub fixtures: Vec<Fixture>,
}

impl FixtureFile {
    pub fn builtin() -> Self {
        serde_json::from_str(BUILTIN).expect("built-in fixture file is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureResult {
    pub name: String,
    pub pass: bool,
    pub expected: Json,
    pub actual: Json,
    pub error: Option<String>,
}

pub fn run_all(file: &FixtureFile) -> Vec<FixtureResult> {
    file.fixtures.iter().map(run_one).collect()
}

pub fn run_one(fixture: &Fixture) -> FixtureResult {
    let (actual, error) = match compute(&fixture.name) {
        Ok(v) => (v, None),
        Err(e) => (Json::Null, Some(e)),
    };
    FixtureResult {
        name: fixture.name.clone(),
        pass: error.is_none() && actual == fixture.expected,
        expected: fixture.expected.clone(),
        actual,
        error,
    }
}

/// Names of the fixtures [`compute`] knows.
pub const NAMES: [&str; 8] = [
    "egli-milner-lifting",
    "cobarr-lax-composition",
    "submonoid-relates-identity",
    "converse-preservation-failure",
    "lattice-two-labels",
    "constant-plus-identity-unique",
    "minimization-3-4",
    "two-loops",
];

/// Computes the observed outcome of a named fixture.
pub fn compute(name: &str) -> std::result::Result<Json, String> {
    let result = match name {
        "egli-milner-lifting" => egli_milner(),
        "cobarr-lax-composition" => cobarr_composition(),
        "submonoid-relates-identity" => submonoid_identity(),
        "converse-preservation-failure" => converse_failure(),
        "lattice-two-labels" => lattice_two_labels(),
        "constant-plus-identity-unique" => constant_plus_identity(),
        "minimization-3-4" => minimization(3, 4),
        "two-loops" => two_loops(),
        other => return Err(format!("unknown fixture {other:?}")),
    };
    result.map_err(|e| e.to_string())
}

fn named(r: &FinRel) -> Json {
    json!(r.named_pairs())
}

fn ab() -> Result<FinSet> {
    FinSet::new(["a", "b"])
}

fn egli_milner() -> Result<Json> {
    let x = FinSet::new(["x", "y"])?;
    let one = FinSet::new(["1"])?;
    let r = FinRel::from_named_pairs(&x, &one, [("x", "1")])?;
    let lift = RelatorSpec::barr(FunctorExpr::Pow).lift(&r)?;
    Ok(json!({ "lift": named(&lift) }))
}

fn cobarr_composition() -> Result<Json> {
    let two = ab()?;
    let one = FinSet::new(["*"])?;
    let z = FinRel::from_named_pairs(&two, &two, [("a", "a"), ("b", "a"), ("b", "b")])?;
    let a = FinFun::new(one, two, vec![0])?.graph();
    let cobarr = RelatorSpec::cobarr(FunctorExpr::Id)?;
    let composite = cobarr.lift(&a.compose(&z)?)?;
    let lifts = cobarr.lift(&a)?.compose(&cobarr.lift(&z)?)?;
    Ok(json!({
        "lift_of_composite": named(&composite),
        "composite_of_lifts": named(&lifts),
        "lax_extension": is_lax_extension(&cobarr, 2)?.holds(),
    }))
}

fn identity_related(spec: &RelatorSpec, phi: &FinRel) -> Result<bool> {
    let labels = phi.dom().clone();
    let lifting = spec.prepare(phi)?;
    let id = relcoalg::functor::Value::Func((0..labels.len()).collect());
    Ok(lifting.relates(&id, &id))
}

fn submonoid_identity() -> Result<Json> {
    let phi_b = rel(&ab()?, &PHI_B)?;
    let submon = parse_relator("submon(Exp{a,b}; gens: [(a,b),(b,b),(b,a)])")?;
    let barr = RelatorSpec::barr(FunctorExpr::exp(ab()?));
    Ok(json!({
        "submonoid_relates_identity": identity_related(&submon, &phi_b)?,
        "barr_relates_identity": identity_related(&barr, &phi_b)?,
    }))
}

fn rel(labels: &FinSet, pairs: &[(&str, &str)]) -> Result<FinRel> {
    FinRel::from_named_pairs(labels, labels, pairs.iter().copied())
}

const PHI_A: [(&str, &str); 3] = [("a", "b"), ("a", "a"), ("b", "a")];
const PHI_B: [(&str, &str); 3] = [("a", "b"), ("b", "b"), ("b", "a")];

fn converse_failure() -> Result<Json> {
    let abc = FinSet::new(["a", "b", "c"])?;
    let mut phi = FinRel::full(&abc, &abc);
    phi.remove(0, 0);
    phi.remove(1, 2);
    let spec = RelatorSpec::submonoid(UCSubmonoid::generate(&abc, &[phi.clone()])?);
    Ok(json!({
        "normal": is_normal(&spec, 2)?.holds(),
        "lax": is_lax_extension(&spec, 2)?.holds(),
        "preserves_converses": preserves_converses(&spec, 3)?.holds(),
        "relates_identity_under_phi": identity_related(&spec, &phi)?,
        "relates_identity_under_converse": identity_related(&spec, &phi.converse())?,
    }))
}

fn lattice_two_labels() -> Result<Json> {
    let labels = ab()?;
    let lattice = enumerate_nle(&labels, LatticeOptions::default())?;
    let phi_a = rel(&labels, &PHI_A)?;
    let phi_b = rel(&labels, &PHI_B)?;
    let known = [
        ("bottom", UCSubmonoid::barr(&labels)?),
        ("phi_a", UCSubmonoid::generate(&labels, &[phi_a.clone()])?),
        ("phi_b", UCSubmonoid::generate(&labels, &[phi_b.clone()])?),
        ("phi_a+phi_b", UCSubmonoid::generate(&labels, &[phi_a, phi_b])?),
    ];
    let name = |i: usize| {
        known
            .iter()
            .find(|(_, s)| *s == lattice.nodes[i])
            .map_or_else(|| format!("n{i}"), |(n, _)| (*n).to_owned())
    };
    let mut nodes: Vec<String> = (0..lattice.nodes.len()).map(name).collect();
    nodes.sort();
    let mut hasse: Vec<(String, String)> = lattice.hasse.iter().map(|&(i, j)| (name(i), name(j))).collect();
    hasse.sort();
    Ok(json!({
        "nodes": nodes,
        "hasse": hasse,
        "exhaustive": lattice.exhaustive,
    }))
}

fn constant_plus_identity() -> Result<Json> {
    let count = |labels: FinSet| enumerate_nle(&labels, LatticeOptions::default()).map(|l| l.nodes.len());
    Ok(json!({
        "no_labels": count(FinSet::empty())?,
        "one_label": count(FinSet::new(["*"])?)?,
    }))
}

fn minimization(n: usize, m: usize) -> Result<Json> {
    let lts = minimization_family(n, m)?;
    let c = lts.to_coalgebra()?;
    let labels = ab()?;
    let top = twisted_relator(&TwistedSpec::top(&labels)?);
    let bottom = twisted_relator(&TwistedSpec::bottom(&labels)?);
    let w = linear_witness(n, m)?;
    let standard = minimal_witness(&bottom, &c, &c, (0, n))?
        .ok_or_else(|| relcoalg::Error::Verification("s0 and t0 are not bisimilar".into()))?;
    let cross = standard.pairs().filter(|&(x, y)| x < n && y >= n).count();
    Ok(json!({
        "linear_witness_pairs": w.len(),
        "linear_witness_is_twisted": is_simulation(&top, &w, &c, &c)?,
        "linear_witness_is_standard": is_simulation(&bottom, &w, &c, &c)?,
        "standard_cross_pairs": cross,
        "all_states_equivalent": behavioural_equivalence(&c, &c)? == FinRel::full(lts.states(), lts.states()),
    }))
}

fn two_loops() -> Result<Json> {
    let lts = two_loops_example();
    let c = lts.to_coalgebra()?;
    let s = lts.states();
    let (p, q) = (s.index_of("p").expect("state p"), s.index_of("q").expect("state q"));
    let labels = ab()?;
    let top = twisted_relator(&TwistedSpec::top(&labels)?);
    let barr = RelatorSpec::barr(lts.functor());
    let standard = minimal_witness(&barr, &c, &c, (p, q))?;
    let twisted = minimal_witness(&top, &c, &c, (p, q))?;
    let smaller = FinRel::from_named_pairs(s, s, [("p", "q"), ("x", "x"), ("x", "y"), ("y", "y")])?;
    let sim = similarity(&barr, &c, &c)?;
    let mut classes: Vec<Vec<String>> = Vec::new();
    for x in 0..s.len() {
        if !classes.iter().any(|cl| cl.contains(&s.name(x))) {
            classes.push(sim.row(x).map(|y| s.name(y)).collect());
        }
    }
    Ok(json!({
        "standard_witness": standard.as_ref().map(named),
        "twisted_witness_size": twisted.as_ref().map(FinRel::len),
        "smaller_relation_is_twisted": is_simulation(&top, &smaller, &c, &c)?,
        "smaller_relation_is_standard": is_simulation(&barr, &smaller, &c, &c)?,
        "classes": classes,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_file_names_every_fixture() {
        let file = FixtureFile::builtin();
        let names: Vec<&str> = file.fixtures.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, NAMES);
    }
}
