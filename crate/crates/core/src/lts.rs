//! Labelled transition systems and twisted bisimulation.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bisim::Coalgebra;
use crate::error::{Error, Result};
use crate::finrel::{FinRel, FinSet};
use crate::functor::{FunctorExpr, Value};
use crate::relator::RelatorSpec;
use crate::submonoid::{greatest_nle, UCSubmonoid};

/// A finite LTS with transitions stored as `(source, label, target)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    states: FinSet,
    labels: FinSet,
    trans: BTreeSet<(usize, usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LtsJson {
    pub states: Vec<String>,
    pub labels: Vec<String>,
    pub trans: Vec<(String, String, String)>,
}

impl Lts {
    pub fn new<I>(states: FinSet, labels: FinSet, trans: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize)>,
    {
        let trans: BTreeSet<_> = trans.into_iter().collect();
        if let Some(t) = trans
            .iter()
            .find(|&&(s, l, d)| s >= states.len() || d >= states.len() || l >= labels.len())
        {
            return Err(Error::invalid(format!("transition {t:?} out of range")));
        }
        Ok(Lts { states, labels, trans })
    }

    pub fn from_named<'a, I>(states: FinSet, labels: FinSet, trans: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    {
        let state = |s: &str| states.index_of(s).ok_or_else(|| Error::invalid(format!("unknown state {s:?}")));
        let label = |l: &str| labels.index_of(l).ok_or_else(|| Error::invalid(format!("unknown label {l:?}")));
        let mut out = Vec::new();
        for (s, l, d) in trans {
            out.push((state(s)?, label(l)?, state(d)?));
        }
        Lts::new(states.clone(), labels.clone(), out)
    }

    pub fn states(&self) -> &FinSet {
        &self.states
    }

    pub fn labels(&self) -> &FinSet {
        &self.labels
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.trans.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn transition_count(&self) -> usize {
        self.trans.len()
    }

    /// Targets of `x` under label `l`, sorted.
    pub fn successors(&self, x: usize, l: usize) -> Vec<usize> {
        self.trans
            .range((x, l, 0)..(x, l + 1, 0))
            .map(|&(_, _, d)| d)
            .collect()
    }

    /// The functor `Exp(labels) . Pow`.
    pub fn functor(&self) -> FunctorExpr {
        FunctorExpr::comp(FunctorExpr::exp(self.labels.clone()), FunctorExpr::Pow)
    }

    /// `α(x)(u) = {x' | x -u-> x'}`.
    pub fn to_coalgebra(&self) -> Result<Coalgebra> {
        let n = self.len();
        let transition = (0..n)
            .map(|x| {
                (0..self.labels.len())
                    .map(|l| FunctorExpr::Pow.encode(n, &Value::Set(self.successors(x, l))))
                    .collect::<Result<Vec<_>>>()
                    .map(Value::Func)
            })
            .collect::<Result<Vec<_>>>()?;
        Coalgebra::new(self.functor(), self.states.clone(), transition)
    }

    pub fn from_json(json: &LtsJson) -> Result<Self> {
        let states = FinSet::new(json.states.iter().cloned())?;
        let labels = FinSet::new(json.labels.iter().cloned())?;
        Lts::from_named(
            states,
            labels,
            json.trans.iter().map(|(s, l, d)| (s.as_str(), l.as_str(), d.as_str())),
        )
    }

    pub fn to_json(&self) -> LtsJson {
        LtsJson {
            states: self.states.names(),
            labels: self.labels.names(),
            trans: self
                .trans
                .iter()
                .map(|&(s, l, d)| (self.states.name(s), self.labels.name(l), self.states.name(d)))
                .collect(),
        }
    }

    /// Line format: `src -label-> dst`, `#` comments, and optional
    /// `states: x y ...` / `labels: a b ...` declarations fixing the order
    /// and adding isolated states. Undeclared names are added in order of
    /// first appearance.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut states: Vec<String> = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        let mut trans = Vec::new();
        fn intern(names: &mut Vec<String>, name: &str) -> usize {
            match names.iter().position(|n| n == name) {
                Some(i) => i,
                None => {
                    names.push(name.to_owned());
                    names.len() - 1
                }
            }
        }
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let at = offset;
            offset += line.len();
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix("states:") {
                for s in rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
                    intern(&mut states, s);
                }
                continue;
            }
            if let Some(rest) = body.strip_prefix("labels:") {
                for l in rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
                    intern(&mut labels, l);
                }
                continue;
            }
            let tokens: Vec<&str> = body.split_whitespace().collect();
            let label = match tokens.as_slice() {
                [_, arrow, _] => arrow.strip_prefix('-').and_then(|a| a.strip_suffix("->")),
                _ => None,
            };
            match label {
                Some(l) if !l.is_empty() => {
                    let s = intern(&mut states, tokens[0]);
                    let l = intern(&mut labels, l);
                    let d = intern(&mut states, tokens[2]);
                    trans.push((s, l, d));
                }
                _ => return Err(Error::parse(at, format!("expected `src -label-> dst`, got {body:?}"))),
            }
        }
        Lts::new(FinSet::new(states)?, FinSet::new(labels)?, trans)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "states: {}", self.states.names().join(" "));
        let _ = writeln!(out, "labels: {}", self.labels.names().join(" "));
        for &(s, l, d) in &self.trans {
            let _ = writeln!(
                out,
                "{} -{}-> {}",
                self.states.name(s),
                self.labels.name(l),
                self.states.name(d)
            );
        }
        out
    }

    /// Accepts JSON or the line format.
    pub fn load(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Lts::from_json(&serde_json::from_str(text)?)
        } else {
            Lts::parse_text(text)
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lts {\n");
        self.dot_body(&mut out, "");
        out.push_str("}\n");
        out
    }

    fn dot_body(&self, out: &mut String, prefix: &str) {
        for x in 0..self.len() {
            let _ = writeln!(out, "  \"{prefix}{0}\" [label=\"{0}\"];", self.states.name(x));
        }
        for &(s, l, d) in &self.trans {
            let _ = writeln!(
                out,
                "  \"{prefix}{}\" -> \"{prefix}{}\" [label=\"{}\"];",
                self.states.name(s),
                self.states.name(d),
                self.labels.name(l)
            );
        }
    }
}

/// Both systems with the related pairs drawn as dashed undirected edges.
pub fn witness_dot(left: &Lts, right: &Lts, r: &FinRel) -> String {
    let same = left == right;
    let (pl, pr) = if same { ("", "") } else { ("L:", "R:") };
    let mut out = String::from("digraph witness {\n");
    left.dot_body(&mut out, pl);
    if !same {
        right.dot_body(&mut out, pr);
    }
    for (x, y) in r.pairs() {
        let _ = writeln!(
            out,
            "  \"{pl}{}\" -> \"{pr}{}\" [style=dashed, dir=none, constraint=false];",
            left.states.name(x),
            right.states.name(y)
        );
    }
    out.push_str("}\n");
    out
}

/// A submonoid of label relations used to twist the powerset lifting.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedSpec {
    submonoid: UCSubmonoid,
}

impl TwistedSpec {
    /// Refuses submonoids with a non-normal member.
    pub fn new(submonoid: UCSubmonoid) -> Result<Self> {
        if !submonoid.all_normal() {
            return Err(Error::invalid(
                "the submonoid has non-normal members; use TwistedSpec::unchecked to experiment",
            ));
        }
        Ok(TwistedSpec { submonoid })
    }

    pub fn unchecked(submonoid: UCSubmonoid) -> Self {
        TwistedSpec { submonoid }
    }

    /// Standard bisimulation: the Barr submonoid.
    pub fn bottom(labels: &FinSet) -> Result<Self> {
        Ok(TwistedSpec {
            submonoid: UCSubmonoid::barr(labels)?,
        })
    }

    /// The most permissive twisted bisimulation.
    pub fn top(labels: &FinSet) -> Result<Self> {
        Ok(TwistedSpec {
            submonoid: greatest_nle(labels, crate::submonoid::MAX_LABELS)?,
        })
    }

    pub fn labels(&self) -> &FinSet {
        self.submonoid.labels()
    }

    pub fn submonoid(&self) -> &UCSubmonoid {
        &self.submonoid
    }
}

/// The submonoid relator on `Exp(A)` composed with Egli–Milner on `Pow`.
pub fn twisted_relator(spec: &TwistedSpec) -> RelatorSpec {
    RelatorSpec::comp_of(
        RelatorSpec::submonoid(spec.submonoid.clone()),
        RelatorSpec::barr(FunctorExpr::Pow),
    )
}

/// The same submonoid relator on deterministic automata `2 * Exp(A)`,
/// with equality on the output bit.
pub fn automaton_relator(spec: &TwistedSpec) -> Result<RelatorSpec> {
    RelatorSpec::prod_of(vec![
        RelatorSpec::barr(FunctorExpr::numeral(2)),
        RelatorSpec::submonoid(spec.submonoid.clone()),
    ])
}

/// A related pair none of whose clauses holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseFailure {
    pub x: String,
    pub y: String,
    /// For each clause, the label pair whose transfer condition fails.
    pub broken: Vec<(String, String)>,
}

fn egli_milner(s: &[usize], t: &[usize], r: &FinRel) -> bool {
    s.iter().all(|&x| t.iter().any(|&y| r.contains(x, y))) && t.iter().all(|&y| s.iter().any(|&x| r.contains(x, y)))
}

/// Clause-by-clause check of twisted bisimulation for the greatest normal
/// extension over a two-letter alphabet `{a, b}`: every related pair
/// satisfies the standard transfer for `(a,a),(b,b)`, or the twisted
/// transfer for `(a,b),(b,a),(b,b)`, or for `(a,b),(b,a),(a,a)`.
pub fn twisted_clause_failure(r: &FinRel, left: &Lts, right: &Lts) -> Result<Option<ClauseFailure>> {
    if left.labels.len() != 2 || left.labels != right.labels {
        return Err(Error::invalid("the clausal check needs both systems over the same two labels"));
    }
    if r.dom() != &left.states || r.cod() != &right.states {
        return Err(Error::CarrierMismatch("relation carriers differ from the state sets".into()));
    }
    const CLAUSES: [&[(usize, usize)]; 3] = [&[(0, 0), (1, 1)], &[(0, 1), (1, 0), (1, 1)], &[(0, 1), (1, 0), (0, 0)]];
    for (x, y) in r.pairs() {
        let mut broken = Vec::new();
        let holds = CLAUSES.iter().any(|clause| {
            match clause
                .iter()
                .find(|&&(u, v)| !egli_milner(&left.successors(x, u), &right.successors(y, v), r))
            {
                Some(&(u, v)) => {
                    broken.push((left.labels.name(u), left.labels.name(v)));
                    false
                }
                None => true,
            }
        });
        if !holds {
            return Ok(Some(ClauseFailure {
                x: left.states.name(x),
                y: right.states.name(y),
                broken,
            }));
        }
    }
    Ok(None)
}

pub fn is_twisted_bisimulation_clausal(r: &FinRel, left: &Lts, right: &Lts) -> Result<bool> {
    Ok(twisted_clause_failure(r, left, right)?.is_none())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn check_coprime(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 || gcd(n, m) != 1 {
        return Err(Error::invalid(format!("cycle lengths {n} and {m} must be positive and coprime")));
    }
    Ok(())
}

fn family_states(n: usize, m: usize) -> FinSet {
    FinSet::new((0..n).map(|i| format!("s{i}")).chain((0..m).map(|j| format!("t{j}")))).expect("distinct names")
}

fn family_successors(n: usize, m: usize, q: usize) -> (usize, usize) {
    if q < n {
        ((q + 1) % n, n)
    } else {
        (n + (q - n + 1) % m, 0)
    }
}

/// Two `a`-cycles `s_0 .. s_{n-1}` and `t_0 .. t_{m-1}`; every `s_i` has a
/// `b`-step to `t_0` and every `t_j` one to `s_0`.
pub fn minimization_family(n: usize, m: usize) -> Result<Lts> {
    check_coprime(n, m)?;
    let mut trans = Vec::new();
    for q in 0..n + m {
        let (a, b) = family_successors(n, m, q);
        trans.push((q, 0, a));
        trans.push((q, 1, b));
    }
    Lts::new(family_states(n, m), FinSet::new(["a", "b"])?, trans)
}

/// The same system as a deterministic automaton for `2 * Exp{a,b}` with
/// every state accepting.
pub fn minimization_automaton(n: usize, m: usize) -> Result<Coalgebra> {
    check_coprime(n, m)?;
    let labels = FinSet::new(["a", "b"])?;
    let f = FunctorExpr::prod(vec![FunctorExpr::numeral(2), FunctorExpr::exp(labels)])?;
    let transition = (0..n + m)
        .map(|q| {
            let (a, b) = family_successors(n, m, q);
            Value::Tuple(vec![Value::Const(1), Value::Func(vec![a, b])])
        })
        .collect();
    Coalgebra::new(f, family_states(n, m), transition)
}

/// `S × {s_0, t_0} ∪ {s_0, t_0} × S`, checked to be a twisted bisimulation.
pub fn linear_witness(n: usize, m: usize) -> Result<FinRel> {
    let lts = minimization_family(n, m)?;
    let hubs = [0, n];
    let mut r = FinRel::empty(lts.states(), lts.states());
    for q in 0..n + m {
        for &h in &hubs {
            r.insert(q, h);
            r.insert(h, q);
        }
    }
    if let Some(f) = twisted_clause_failure(&r, &lts, &lts)? {
        return Err(Error::Verification(format!(
            "linear witness fails at ({}, {})",
            f.x, f.y
        )));
    }
    Ok(r)
}

/// The four-state system `x, y, p, q` where `x` and `y` swap on `b` and
/// loop on `a`, `p` steps to `x` on both labels, and `q` steps to `x` on
/// `a` and to `y` on `b`.
pub fn two_loops_example() -> Lts {
    Lts::from_named(
        FinSet::new(["x", "y", "p", "q"]).expect("distinct"),
        FinSet::new(["a", "b"]).expect("distinct"),
        [
            ("x", "a", "x"),
            ("x", "b", "y"),
            ("y", "a", "y"),
            ("y", "b", "x"),
            ("p", "a", "x"),
            ("p", "b", "x"),
            ("q", "a", "x"),
            ("q", "b", "y"),
        ],
    )
    .expect("well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::{is_simulation, minimal_witness};

    fn ab() -> FinSet {
        FinSet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn single_loop_coalgebra() {
        let lts = Lts::parse_text("s -a-> s\nlabels: a b\n").unwrap();
        let c = lts.to_coalgebra().unwrap();
        // Ranks of {s} and the empty set.
        assert_eq!(c.transition(0), &Value::Func(vec![1, 0]));
        let empty = Lts::new(FinSet::empty(), ab(), []).unwrap();
        assert_eq!(empty.to_coalgebra().unwrap().len(), 0);
    }

    #[test]
    fn text_and_json_round_trip() {
        let lts = two_loops_example();
        assert_eq!(Lts::parse_text(&lts.to_text()).unwrap(), lts);
        assert_eq!(Lts::from_json(&lts.to_json()).unwrap(), lts);
        assert!(Lts::parse_text("x -> y").is_err());
        assert!(lts.to_dot().contains("\"q\" -> \"y\" [label=\"b\"]"));
    }

    #[test]
    fn twisted_witness_of_the_two_loops() {
        let lts = two_loops_example();
        let r = FinRel::from_named_pairs(lts.states(), lts.states(), [("p", "q"), ("x", "x"), ("x", "y"), ("y", "y")]).unwrap();
        assert!(is_twisted_bisimulation_clausal(&r, &lts, &lts).unwrap());
        let c = lts.to_coalgebra().unwrap();
        let top = twisted_relator(&TwistedSpec::top(&ab()).unwrap());
        assert!(is_simulation(&top, &r, &c, &c).unwrap());
        let barr = RelatorSpec::barr(lts.functor());
        assert!(!is_simulation(&barr, &r, &c, &c).unwrap());

        let mut smaller = r.clone();
        smaller.remove(3, 3);
        smaller.remove(1, 1);
        let failure = twisted_clause_failure(&smaller, &lts, &lts).unwrap().unwrap();
        assert_eq!(failure.broken.len(), 3);
    }

    #[test]
    fn minimal_witnesses_of_the_two_loops() {
        let lts = two_loops_example();
        let c = lts.to_coalgebra().unwrap();
        let barr = twisted_relator(&TwistedSpec::bottom(&ab()).unwrap());
        let w = minimal_witness(&barr, &c, &c, (2, 3)).unwrap().unwrap();
        let expected =
            FinRel::from_named_pairs(lts.states(), lts.states(), [("p", "q"), ("x", "x"), ("x", "y"), ("y", "y"), ("y", "x")]).unwrap();
        assert_eq!(w, expected);
        let top = twisted_relator(&TwistedSpec::top(&ab()).unwrap());
        assert_eq!(minimal_witness(&top, &c, &c, (2, 3)).unwrap().unwrap().len(), 4);
    }

    #[test]
    fn family_shapes() {
        let f = minimization_family(2, 3).unwrap();
        assert_eq!((f.len(), f.transition_count()), (5, 10));
        assert_eq!(minimization_family(1, 1).unwrap().len(), 2);
        assert!(minimization_family(2, 4).is_err());
        let r = linear_witness(2, 3).unwrap();
        assert_eq!(r.len(), 16);
        assert!(r.contains(0, 2));
        let standard = FinRel::from_pairs(f.states(), f.states(), r.pairs()).unwrap();
        let c = f.to_coalgebra().unwrap();
        assert!(!is_simulation(&RelatorSpec::barr(f.functor()), &standard, &c, &c).unwrap());
    }

    #[test]
    fn non_normal_submonoid_is_refused() {
        let bad = UCSubmonoid::generate(&ab(), &[FinRel::from_named_pairs(&ab(), &ab(), [("a", "b")]).unwrap()]).unwrap();
        assert!(TwistedSpec::new(bad.clone()).is_err());
        let _ = TwistedSpec::unchecked(bad);
    }
}
