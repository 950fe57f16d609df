use std::fmt::Write as _;
use std::path::Path;

use relcoalg::bisim::{find_violation, soundness_completeness_report, Sample};
use relcoalg::lts::{twisted_clause_failure, witness_dot};
use relcoalg::relator::{
    difunctional_functoriality_check, is_lax_extension, is_normal, is_relational_connector, preserves_converses,
    sandwich_check, LawReport, RelatorKind,
};
use relcoalg::submonoid::{enumerate_nle, LatticeOptions};
use relcoalg::{
    behavioural_equivalence, is_simulation, minimal_witness, parse_functor, parse_relator, similarity,
    twisted_relator, Coalgebra, Error, FinRel, FinSet, Result, TwistedSpec,
};
use serde_json::json;

use crate::fixtures;
use crate::load::{load_relation, load_system, lts_labels, resolve_relator, System};
use crate::{Report, RunConfig, EXIT_FAILS, EXIT_HOLDS};

const DEFAULT_MAX_STATES: usize = 64;

fn load_pair(config: &RunConfig, left: &Path, right: Option<&Path>) -> Result<(System, System)> {
    let max = config.max_size_or(DEFAULT_MAX_STATES);
    let a = load_system(left, max)?;
    let b = match right {
        Some(p) => load_system(p, max)?,
        None => a.clone(),
    };
    if a.coalgebra.functor() != b.coalgebra.functor() {
        return Err(Error::Incompatible(format!(
            "systems over different functors: {} and {}",
            a.coalgebra.functor(),
            b.coalgebra.functor()
        )));
    }
    Ok((a, b))
}

fn pairs_text(r: &FinRel) -> String {
    let mut out = String::new();
    for (x, y) in r.named_pairs() {
        let _ = writeln!(out, "  {x} -> {y}");
    }
    out
}

/// Classes of `r` when it is an equivalence relation on one set.
fn classes(r: &FinRel) -> Option<Vec<Vec<String>>> {
    if r.dom() != r.cod() || !FinRel::identity(r.dom()).leq(r).ok()? || r.converse() != *r {
        return None;
    }
    if !r.compose(r).ok()?.leq(r).ok()? {
        return None;
    }
    let mut seen = vec![false; r.dom().len()];
    let mut out = Vec::new();
    for x in 0..r.dom().len() {
        if seen[x] {
            continue;
        }
        let class: Vec<usize> = r.row(x).collect();
        for &y in &class {
            seen[y] = true;
        }
        out.push(class.into_iter().map(|y| r.dom().name(y)).collect());
    }
    Some(out)
}

fn relation_dot(a: &System, b: &System, r: &FinRel) -> String {
    if let (Some(l), Some(m)) = (&a.lts, &b.lts) {
        return witness_dot(l, m, r);
    }
    let mut out = String::from("digraph relation {\n  rankdir=LR;\n");
    for (x, y) in r.named_pairs() {
        let _ = writeln!(out, "  \"L:{x}\" -> \"R:{y}\";");
    }
    out.push_str("}\n");
    out
}

pub fn similarity_cmd(config: &RunConfig, left: &Path, right: Option<&Path>) -> Result<Report> {
    let (a, b) = load_pair(config, left, right)?;
    let spec = resolve_relator(config.relator.as_deref(), a.coalgebra.functor())?;
    let sim = similarity(&spec, &a.coalgebra, &b.coalgebra)?;
    let beh = behavioural_equivalence(&a.coalgebra, &b.coalgebra)?;
    let agrees = sim == beh;
    let cls = if right.is_none() { classes(&sim) } else { None };
    let mut text = format!("relator: {spec}\nsimilarity ({} pairs):\n{}", sim.len(), pairs_text(&sim));
    let _ = writeln!(text, "equals behavioural equivalence: {}", if agrees { "yes" } else { "no" });
    if let Some(cls) = &cls {
        let rendered: Vec<String> = cls.iter().map(|c| format!("{{{}}}", c.join(","))).collect();
        let _ = writeln!(text, "classes: {}", rendered.join(" "));
    }
    Ok(Report {
        code: EXIT_HOLDS,
        text,
        json: json!({
            "relator": spec.to_string(),
            "similarity": sim.to_json(),
            "equals_behavioural_equivalence": agrees,
            "classes": cls,
        }),
        dot: Some(relation_dot(&a, &b, &sim)),
    })
}

pub fn check(config: &RunConfig, left: &Path, right: Option<&Path>, witness: &Path) -> Result<Report> {
    let (a, b) = load_pair(config, left, right)?;
    let spec = resolve_relator(config.relator.as_deref(), a.coalgebra.functor())?;
    let (ca, cb) = (&a.coalgebra, &b.coalgebra);
    let r = load_relation(witness, ca.states(), cb.states())?;
    let violation = find_violation(&spec, &r, ca, cb)?;
    let mut text = format!("relator: {spec}\nrelation ({} pairs):\n{}", r.len(), pairs_text(&r));
    let failing = violation.map(|(x, y)| {
        let (xn, yn) = (ca.states().name(x), cb.states().name(y));
        let _ = writeln!(
            text,
            "not a simulation: fails at ({xn}, {yn}); {xn} |-> {} is not related to {yn} |-> {}",
            ca.render_transition(x),
            cb.render_transition(y)
        );
        json!({ "x": xn, "y": yn, "left": ca.render_transition(x), "right": cb.render_transition(y) })
    });
    if failing.is_none() {
        text.push_str("is a simulation\n");
    }
    Ok(Report {
        code: if failing.is_none() { EXIT_HOLDS } else { EXIT_FAILS },
        text,
        json: json!({
            "relator": spec.to_string(),
            "relation": r.to_json(),
            "holds": failing.is_none(),
            "failure": failing,
        }),
        dot: Some(relation_dot(&a, &b, &r)),
    })
}

fn parse_labels(labels: &str) -> Result<FinSet> {
    FinSet::new(labels.split(',').map(str::trim).filter(|l| !l.is_empty()).map(str::to_owned))
}

pub fn lattice(_config: &RunConfig, labels: &str, max_nodes: Option<usize>) -> Result<Report> {
    let labels = parse_labels(labels)?;
    let mut opts = LatticeOptions::default();
    if let Some(n) = max_nodes {
        opts.max_nodes = n;
    }
    let lattice = enumerate_nle(&labels, opts)?;
    let mut text = format!(
        "labels: {{{}}}\nnodes: {}{}\n",
        labels.names().join(","),
        lattice.nodes.len(),
        if lattice.exhaustive { "" } else { " (lower bound, generator mode)" }
    );
    let (bottom, top) = (lattice.bottom(), lattice.top());
    for (i, node) in lattice.nodes.iter().enumerate() {
        let role = match (Some(i) == bottom, Some(i) == top) {
            (true, true) => " [bottom, top]",
            (true, false) => " [bottom]",
            (false, true) => " [top]",
            _ => "",
        };
        let _ = writeln!(text, "  n{i}: {} members, generators {}{role}", node.len(), node.generators_text());
    }
    let edges: Vec<String> = lattice.hasse.iter().map(|(i, j)| format!("n{i} < n{j}")).collect();
    let _ = writeln!(text, "hasse: {}", edges.join(", "));
    let mut json = lattice.to_json();
    json["bottom"] = json!(bottom);
    json["top"] = json!(top);
    Ok(Report {
        code: EXIT_HOLDS,
        text,
        json,
        dot: Some(lattice.to_dot()),
    })
}

fn twisted_spec(labels: &FinSet, submonoid: &str) -> Result<TwistedSpec> {
    match submonoid.trim() {
        "top" => TwistedSpec::top(labels),
        "bottom" => TwistedSpec::bottom(labels),
        gens => {
            let src = format!("submon(Exp{{{}}}; gens: {gens})", labels.names().join(","));
            match parse_relator(&src)?.kind() {
                RelatorKind::Submonoid(s) => TwistedSpec::new(s.clone()),
                _ => unreachable!("a submon expression parses to a submonoid relator"),
            }
        }
    }
}

fn parse_pair(pair: &str, a: &Coalgebra, b: &Coalgebra) -> Result<(usize, usize)> {
    let (x, y) = pair
        .split_once(',')
        .ok_or_else(|| Error::Invalid(format!("expected `x,y`, got {pair:?}")))?;
    let find = |c: &Coalgebra, n: &str| {
        c.states()
            .index_of(n.trim())
            .ok_or_else(|| Error::Invalid(format!("unknown state {n:?}")))
    };
    Ok((find(a, x)?, find(b, y)?))
}

pub fn twisted(
    config: &RunConfig,
    left: &Path,
    right: Option<&Path>,
    pair: Option<&str>,
    submonoid: &str,
    witness: Option<&Path>,
) -> Result<Report> {
    let (a, b) = load_pair(config, left, right)?;
    let (ca, cb) = (&a.coalgebra, &b.coalgebra);
    let labels = lts_labels(ca.functor())
        .ok_or_else(|| Error::Incompatible(format!("twisted bisimulation needs an LTS, not {}", ca.functor())))?
        .clone();
    let spec = twisted_spec(&labels, submonoid)?;
    let relator = twisted_relator(&spec);
    let standard = twisted_relator(&TwistedSpec::bottom(&labels)?);
    let mut text = format!("relator: {relator}\nsubmonoid: {} members\n", spec.submonoid().len());

    if let Some(path) = witness {
        let r = load_relation(path, ca.states(), cb.states())?;
        let holds = is_simulation(&relator, &r, ca, cb)?;
        let standard_holds = is_simulation(&standard, &r, ca, cb)?;
        let clause = match (&a.lts, &b.lts, labels.len() == 2 && spec == TwistedSpec::top(&labels)?) {
            (Some(l), Some(m), true) => Some(twisted_clause_failure(&r, l, m)?),
            _ => None,
        };
        let _ = writeln!(text, "relation ({} pairs):\n{}", r.len(), pairs_text(&r));
        let _ = writeln!(text, "twisted bisimulation: {}", if holds { "yes" } else { "no" });
        let _ = writeln!(text, "standard bisimulation: {}", if standard_holds { "yes" } else { "no" });
        if let Some(Some(f)) = &clause {
            let broken: Vec<String> = f.broken.iter().map(|(u, v)| format!("({u},{v})")).collect();
            let _ = writeln!(text, "no clause holds at ({}, {}); broken transfers {}", f.x, f.y, broken.join(" "));
        }
        let clause_json = clause.map(|c| json!(c));
        return Ok(Report {
            code: if holds { EXIT_HOLDS } else { EXIT_FAILS },
            text,
            json: json!({
                "relator": relator.to_string(),
                "relation": r.to_json(),
                "twisted": holds,
                "standard": standard_holds,
                "clause_failure": clause_json,
            }),
            dot: Some(relation_dot(&a, &b, &r)),
        });
    }

    let seeds: Vec<(usize, usize)> = match pair {
        Some(p) => vec![parse_pair(p, ca, cb)?],
        None => similarity(&relator, ca, cb)?.pairs().collect(),
    };
    let mut rows = Vec::new();
    let mut dot = None;
    text.push_str("pair: standard witness size, twisted witness size\n");
    for &(x, y) in &seeds {
        let lo = minimal_witness(&standard, ca, cb, (x, y))?;
        let hi = minimal_witness(&relator, ca, cb, (x, y))?;
        let (xn, yn) = (ca.states().name(x), cb.states().name(y));
        let size = |w: &Option<FinRel>| w.as_ref().map_or_else(|| "none".to_owned(), |w| w.len().to_string());
        let _ = writeln!(text, "  ({xn}, {yn}): {}, {}", size(&lo), size(&hi));
        if pair.is_some() {
            if let Some(w) = &hi {
                let _ = writeln!(text, "twisted witness:\n{}", pairs_text(w));
                dot = Some(relation_dot(&a, &b, w));
            }
            if let Some(w) = &lo {
                let _ = writeln!(text, "standard witness:\n{}", pairs_text(w));
            }
        }
        rows.push(json!({
            "x": xn,
            "y": yn,
            "standard": lo.map(|w| w.to_json()),
            "twisted": hi.map(|w| w.to_json()),
        }));
    }
    Ok(Report {
        code: EXIT_HOLDS,
        text,
        json: json!({ "relator": relator.to_string(), "pairs": rows }),
        dot,
    })
}

pub fn oracle_compare(config: &RunConfig, functor: &str, samples: usize) -> Result<Report> {
    let f = parse_functor(functor)?;
    let spec = resolve_relator(config.relator.as_deref(), &f)?;
    let sample = Sample::pairs(&f, config.max_size_or(3), samples, config.seed)?;
    let report = soundness_completeness_report(&spec, &sample)?;
    let ok = report.sound() && report.complete();
    Ok(Report {
        code: if ok { EXIT_HOLDS } else { EXIT_FAILS },
        text: format!("{report}\n"),
        json: json!(report),
        dot: None,
    })
}

const LAWS: [&str; 6] = ["normal", "lax", "connector", "converse", "difunctional", "sandwich"];

pub fn properties(config: &RunConfig, laws: &str) -> Result<Report> {
    let src = config
        .relator
        .as_deref()
        .ok_or_else(|| Error::Invalid("properties needs --relator".into()))?;
    let spec = parse_relator(src)?;
    let size = config.max_size_or(2);
    let mut reports: Vec<LawReport> = Vec::new();
    for law in laws.split(',').map(str::trim).filter(|l| !l.is_empty()) {
        let report = match law {
            "normal" => is_normal(&spec, size)?,
            "lax" => is_lax_extension(&spec, size)?,
            "connector" => is_relational_connector(&spec, size)?,
            "converse" => preserves_converses(&spec, size)?,
            "difunctional" => difunctional_functoriality_check(&spec, size)?,
            "sandwich" => sandwich_check(&spec, size)?,
            other => {
                return Err(Error::Invalid(format!("unknown law {other:?}; expected one of {}", LAWS.join(", "))))
            }
        };
        reports.push(report);
    }
    let mut text = String::new();
    for r in &reports {
        let _ = writeln!(text, "[{}] {r}", if r.holds() { "holds" } else { "fails" });
    }
    let all = reports.iter().all(LawReport::holds);
    Ok(Report {
        code: if all { EXIT_HOLDS } else { EXIT_FAILS },
        text,
        json: json!({ "relator": spec.to_string(), "laws": reports }),
        dot: None,
    })
}

pub fn examples(_config: &RunConfig, path: Option<&Path>) -> Result<Report> {
    let suite = match path {
        Some(p) => fixtures::FixtureFile::load(p)?,
        None => fixtures::FixtureFile::builtin(),
    };
    let results = fixtures::run_all(&suite);
    let mut text = String::new();
    for r in &results {
        match &r.error {
            None if r.pass => {
                let _ = writeln!(text, "[PASS] {}", r.name);
            }
            None => {
                let _ = writeln!(text, "[FAIL] {}: expected {}, got {}", r.name, r.expected, r.actual);
            }
            Some(e) => {
                let _ = writeln!(text, "[FAIL] {}: {e}", r.name);
            }
        }
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    let _ = writeln!(text, "{} passed, {failed} failed", results.len() - failed);
    Ok(Report {
        code: if failed == 0 { EXIT_HOLDS } else { EXIT_FAILS },
        text,
        json: json!({ "fixtures": results, "passed": results.len() - failed, "failed": failed }),
        dot: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_of_an_equivalence() {
        let s = FinSet::new(["x", "y", "z"]).unwrap();
        let r = FinRel::from_pairs(&s, &s, [(0, 0), (1, 1), (2, 2), (0, 2), (2, 0)]).unwrap();
        assert_eq!(classes(&r).unwrap(), vec![vec!["x", "z"], vec!["y"]]);
        let not = FinRel::from_pairs(&s, &s, [(0, 1)]).unwrap();
        assert!(classes(&not).is_none());
    }

    #[test]
    fn labels_parse_with_spaces_and_empty() {
        assert_eq!(parse_labels(" a , b ").unwrap().names(), vec!["a", "b"]);
        assert!(parse_labels("").unwrap().is_empty());
    }
}
