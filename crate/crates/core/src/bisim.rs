//! Coalgebras, simulations and behavioural equivalence.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value as Json};

use crate::error::{Error, Result};
use crate::finrel::{FinFun, FinRel, FinSet, RelJson};
use crate::functor::{FunctorExpr, Value};
use crate::relator::RelatorSpec;
use crate::syntax::parse_functor;

/// A finite coalgebra `α : X → F X`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coalgebra {
    functor: FunctorExpr,
    states: FinSet,
    transition: Vec<Value>,
}

/// On-disk form of a coalgebra.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoalgebraJson {
    pub functor: String,
    pub states: Vec<String>,
    pub transition: Map<String, Json>,
}

impl Coalgebra {
    /// Checks that every transition value belongs to `F X` and that `F X`
    /// fits the cardinality bound.
    pub fn new(functor: FunctorExpr, states: FinSet, transition: Vec<Value>) -> Result<Self> {
        if transition.len() != states.len() {
            return Err(Error::invalid(format!(
                "{} transitions for {} states",
                transition.len(),
                states.len()
            )));
        }
        functor.card(states.len())?;
        for v in &transition {
            functor.encode(states.len(), v)?;
        }
        Ok(Coalgebra {
            functor,
            states,
            transition,
        })
    }

    /// Builds a coalgebra from ranks in the canonical enumeration of `F X`.
    pub fn from_ranks(functor: FunctorExpr, states: FinSet, ranks: &[usize]) -> Result<Self> {
        let n = states.len();
        let card = functor.card(n)?;
        if let Some(&bad) = ranks.iter().find(|&&r| r >= card) {
            return Err(Error::invalid(format!("rank {bad} out of range for {functor} on {n} states")));
        }
        let transition = ranks.iter().map(|&r| functor.decode(n, r)).collect();
        Coalgebra::new(functor, states, transition)
    }

    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn states(&self) -> &FinSet {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn transition(&self, x: usize) -> &Value {
        &self.transition[x]
    }

    pub fn transitions(&self) -> &[Value] {
        &self.transition
    }

    /// Ranks of the transition values; fails when `F X` exceeds the
    /// cardinality bound.
    pub fn ranks(&self) -> Result<Vec<usize>> {
        let n = self.len();
        self.functor.card(n)?;
        self.transition.iter().map(|v| self.functor.encode(n, v)).collect()
    }

    /// `α` as a map into the materialized `F X`.
    pub fn transition_map(&self) -> Result<FinFun> {
        let fx = self.functor.apply_obj(&self.states)?;
        FinFun::new(self.states.clone(), fx, self.ranks()?)
    }

    /// The coalgebra on `X + Y`; states of `other` follow those of `self`.
    pub fn coproduct(&self, other: &Coalgebra) -> Result<Coalgebra> {
        same_functor(&self.functor, &other.functor)?;
        let (nx, ny) = (self.len(), other.len());
        let f = &self.functor;
        let transition = self
            .transition
            .iter()
            .map(|v| f.map_value(v, &|x| x, nx, nx + ny))
            .chain(other.transition.iter().map(|v| f.map_value(v, &|y| nx + y, ny, nx + ny)))
            .collect();
        Ok(Coalgebra {
            functor: self.functor.clone(),
            states: self.states.disjoint_union(&other.states),
            transition,
        })
    }

    /// Renders a single transition.
    pub fn render_transition(&self, x: usize) -> String {
        self.functor.render(&self.states, &self.transition[x])
    }

    pub fn from_json(json: &CoalgebraJson) -> Result<Self> {
        let functor = parse_functor(&json.functor)?;
        let states = FinSet::new(json.states.iter().cloned())?;
        let mut transition = Vec::with_capacity(states.len());
        for name in &json.states {
            let lit = json
                .transition
                .get(name)
                .ok_or_else(|| Error::invalid(format!("no transition for state {name:?}")))?;
            transition.push(functor.parse_literal(&states, lit)?);
        }
        if let Some(extra) = json.transition.keys().find(|k| states.index_of(k).is_none()) {
            return Err(Error::invalid(format!("transition for unknown state {extra:?}")));
        }
        Coalgebra::new(functor, states, transition)
    }

    pub fn to_json(&self) -> CoalgebraJson {
        let mut transition = Map::new();
        for (x, v) in self.transition.iter().enumerate() {
            transition.insert(self.states.name(x), self.functor.to_literal(&self.states, v));
        }
        CoalgebraJson {
            functor: self.functor.to_string(),
            states: self.states.names(),
            transition,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Coalgebra::from_json(&serde_json::from_str(text)?)
    }

    /// A coalgebra on `{0, ..., n-1}` with uniformly drawn transitions.
    pub fn random<R: Rng>(functor: &FunctorExpr, n: usize, rng: &mut R) -> Result<Self> {
        let card = functor.card(n)?;
        if n > 0 && card == 0 {
            return Err(Error::invalid(format!("{functor} has no values on {n} states")));
        }
        let ranks: Vec<usize> = (0..n).map(|_| rng.gen_range(0..card)).collect();
        Coalgebra::from_ranks(functor.clone(), FinSet::range(n), &ranks)
    }

    /// Every coalgebra on `{0, ..., n-1}`, in counter order of the ranks.
    pub fn all(functor: &FunctorExpr, n: usize) -> Result<Vec<Coalgebra>> {
        let card = functor.card(n)?;
        let total = (card as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        let bound = crate::functor::cardinality_bound() as u128;
        if total > bound {
            return Err(Error::SizeBound { cardinality: total, bound });
        }
        let mut out = Vec::with_capacity(total as usize);
        for mut code in 0..total as usize {
            let ranks: Vec<usize> = (0..n)
                .map(|_| {
                    let r = code % card;
                    code /= card;
                    r
                })
                .collect();
            out.push(Coalgebra::from_ranks(functor.clone(), FinSet::range(n), &ranks)?);
        }
        Ok(out)
    }
}

impl fmt::Display for Coalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "coalgebra for {}", self.functor)?;
        for x in 0..self.len() {
            writeln!(f, "  {} -> {}", self.states.name(x), self.render_transition(x))?;
        }
        Ok(())
    }
}

fn same_functor(a: &FunctorExpr, b: &FunctorExpr) -> Result<()> {
    if a != b {
        return Err(Error::Incompatible(format!("functors differ: {a} vs {b}")));
    }
    Ok(())
}

fn check_setting(relator: &RelatorSpec, a: &Coalgebra, b: &Coalgebra) -> Result<()> {
    same_functor(relator.functor(), &a.functor)?;
    same_functor(relator.functor(), &b.functor)
}

fn check_carriers(r: &FinRel, a: &Coalgebra, b: &Coalgebra) -> Result<()> {
    if r.dom() != &a.states || r.cod() != &b.states {
        return Err(Error::CarrierMismatch(
            "relation carriers differ from the coalgebra state sets".into(),
        ));
    }
    Ok(())
}

/// The first pair `(x, y) ∈ r` with `α(x)` not related to `β(y)` by the
/// lifting of `r`, if any.
pub fn find_violation(relator: &RelatorSpec, r: &FinRel, a: &Coalgebra, b: &Coalgebra) -> Result<Option<(usize, usize)>> {
    check_setting(relator, a, b)?;
    check_carriers(r, a, b)?;
    if r.is_empty() {
        return Ok(None);
    }
    let lifting = relator.prepare(r)?;
    Ok(r
        .pairs()
        .find(|&(x, y)| !lifting.relates(&a.transition[x], &b.transition[y])))
}

/// `r ≤ β° · R r · α`.
pub fn is_simulation(relator: &RelatorSpec, r: &FinRel, a: &Coalgebra, b: &Coalgebra) -> Result<bool> {
    Ok(find_violation(relator, r, a, b)?.is_none())
}

/// A relation together with the setting in which it is a simulation.
#[derive(Clone, Debug)]
pub struct SimulationWitness {
    relator: RelatorSpec,
    source: Coalgebra,
    target: Coalgebra,
    relation: FinRel,
}

impl SimulationWitness {
    /// Fails with the offending pair if `relation` is not a simulation.
    pub fn new(relator: RelatorSpec, source: Coalgebra, target: Coalgebra, relation: FinRel) -> Result<Self> {
        if let Some((x, y)) = find_violation(&relator, &relation, &source, &target)? {
            return Err(Error::invalid(format!(
                "not a simulation: ({}, {}) violates the transfer condition",
                source.states.name(x),
                target.states.name(y)
            )));
        }
        Ok(SimulationWitness {
            relator,
            source,
            target,
            relation,
        })
    }

    pub fn relator(&self) -> &RelatorSpec {
        &self.relator
    }

    pub fn source(&self) -> &Coalgebra {
        &self.source
    }

    pub fn target(&self) -> &Coalgebra {
        &self.target
    }

    pub fn relation(&self) -> &FinRel {
        &self.relation
    }
}

/// The greatest simulation, by descending iteration from the full relation.
/// Each round removes every pair that violates the transfer condition.
pub fn similarity(relator: &RelatorSpec, a: &Coalgebra, b: &Coalgebra) -> Result<FinRel> {
    check_setting(relator, a, b)?;
    let mut r = FinRel::full(&a.states, &b.states);
    let mut rounds = 0usize;
    loop {
        if r.is_empty() {
            return Ok(r);
        }
        rounds += 1;
        let lifting = relator.prepare(&r)?;
        let bad: Vec<(usize, usize)> = r
            .pairs()
            .filter(|&(x, y)| !lifting.relates(&a.transition[x], &b.transition[y]))
            .collect();
        if bad.is_empty() {
            log::debug!("similarity under {relator} stable after {rounds} rounds");
            return Ok(r);
        }
        for (x, y) in bad {
            r.remove(x, y);
        }
    }
}

/// Kernel of the final-sequence refinement on `a + b`, restricted to
/// `X × Y`.
pub fn behavioural_equivalence(a: &Coalgebra, b: &Coalgebra) -> Result<FinRel> {
    let c = a.coproduct(b)?;
    let blocks = final_partition(&c);
    let nx = a.len();
    let mut r = FinRel::empty(&a.states, &b.states);
    for x in 0..nx {
        for y in 0..b.len() {
            if blocks[x] == blocks[nx + y] {
                r.insert(x, y);
            }
        }
    }
    Ok(r)
}

/// Block numbers of the coarsest partition stable under the transition
/// structure, numbered by least contained state.
pub fn final_partition(c: &Coalgebra) -> Vec<usize> {
    let n = c.len();
    let mut blocks = vec![0usize; n];
    let mut count = usize::from(n > 0);
    loop {
        let mut ids: HashMap<Value, usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|x| {
                let key = c.functor.map_value(&c.transition[x], &|z| blocks[z], n, count);
                let fresh = ids.len();
                *ids.entry(key).or_insert(fresh)
            })
            .collect();
        let next_count = ids.len();
        blocks = next;
        if next_count == count {
            return blocks;
        }
        count = next_count;
    }
}

/// Default number of candidate relations the exhaustive witness search may
/// test before giving up.
pub const DEFAULT_WITNESS_BUDGET: u64 = 1 << 22;

/// Largest number of candidate pairs for a single transfer condition in
/// the demand-driven search.
const MAX_SUPPORT_CANDIDATES: usize = 16;

/// A smallest simulation containing `seed`, or `None` if `seed` is not in
/// the similarity.
pub fn minimal_witness(relator: &RelatorSpec, a: &Coalgebra, b: &Coalgebra, seed: (usize, usize)) -> Result<Option<FinRel>> {
    minimal_witness_with_budget(relator, a, b, seed, DEFAULT_WITNESS_BUDGET)
}

pub fn minimal_witness_with_budget(
    relator: &RelatorSpec,
    a: &Coalgebra,
    b: &Coalgebra,
    seed: (usize, usize),
    budget: u64,
) -> Result<Option<FinRel>> {
    check_setting(relator, a, b)?;
    if seed.0 >= a.len() || seed.1 >= b.len() {
        return Err(Error::invalid(format!("seed {seed:?} outside the carriers")));
    }
    let sim = similarity(relator, a, b)?;
    if !sim.contains(seed.0, seed.1) {
        return Ok(None);
    }
    let pairs = if relator.is_local() {
        let mut search = LocalSearch {
            relator,
            a,
            b,
            sim: &sim,
            supports: HashMap::new(),
            best: None,
            budget,
            spent: 0,
        };
        let mut start = BTreeSet::new();
        start.insert(seed);
        search.run(&mut start)?;
        search.best.expect("similarity itself is a witness").into_iter().collect()
    } else {
        exhaustive_witness(relator, a, b, &sim, seed, budget)?
    };
    let r = FinRel::from_pairs(&a.states, &b.states, pairs)?;
    if !is_simulation(relator, &r, a, b)? {
        return Err(Error::Verification(format!(
            "witness search under {relator} produced a non-simulation"
        )));
    }
    Ok(Some(r))
}

type Pair = (usize, usize);

/// Branch and bound over minimal supports: an unsatisfied pair of the
/// current relation is repaired by adding one of its minimal sets of
/// successor pairs.
struct LocalSearch<'a> {
    relator: &'a RelatorSpec,
    a: &'a Coalgebra,
    b: &'a Coalgebra,
    sim: &'a FinRel,
    supports: HashMap<Pair, std::rc::Rc<Vec<Vec<Pair>>>>,
    best: Option<BTreeSet<Pair>>,
    budget: u64,
    spent: u64,
}

impl LocalSearch<'_> {
    fn supports(&mut self, p: Pair) -> Result<std::rc::Rc<Vec<Vec<Pair>>>> {
        if let Some(s) = self.supports.get(&p) {
            return Ok(s.clone());
        }
        let f = self.relator.functor();
        let (nx, ny) = (self.a.len(), self.b.len());
        let (u, v) = (&self.a.transition[p.0], &self.b.transition[p.1]);
        let lx = f.leaves(nx, u);
        let ly = f.leaves(ny, v);
        let cands: Vec<(usize, usize)> = (0..lx.len())
            .flat_map(|i| (0..ly.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| self.sim.contains(lx[i], ly[j]))
            .collect();
        if cands.len() > MAX_SUPPORT_CANDIDATES {
            return Err(Error::Budget(format!(
                "{} candidate successor pairs for one transfer condition",
                cands.len()
            )));
        }
        let local = |leaves: &[usize], n: usize| if leaves.is_empty() { n.min(1) } else { leaves.len() };
        let (mx, my) = (local(&lx, nx), local(&ly, ny));
        let pos_x: HashMap<usize, usize> = lx.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let pos_y: HashMap<usize, usize> = ly.iter().enumerate().map(|(i, &y)| (y, i)).collect();
        let lu = f.map_value(u, &|x| pos_x.get(&x).copied().unwrap_or(0), nx, mx);
        let lv = f.map_value(v, &|y| pos_y.get(&y).copied().unwrap_or(0), ny, my);
        let (sx, sy) = (FinSet::range(mx), FinSet::range(my));
        let mut masks: Vec<u32> = (0..1u32 << cands.len()).collect();
        masks.sort_by_key(|&m| (m.count_ones(), m.reverse_bits()));
        let mut found: Vec<u32> = Vec::new();
        for m in masks {
            if found.iter().any(|&s| s & m == s) {
                continue;
            }
            let mut r = FinRel::empty(&sx, &sy);
            for (k, &(i, j)) in cands.iter().enumerate() {
                if m & (1 << k) != 0 {
                    r.insert(i, j);
                }
            }
            if self.relator.prepare(&r)?.relates(&lu, &lv) {
                found.push(m);
            }
        }
        let out: Vec<Vec<Pair>> = found
            .iter()
            .map(|&m| {
                cands
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| m & (1 << k) != 0)
                    .map(|(_, &(i, j))| (lx[i], ly[j]))
                    .collect()
            })
            .collect();
        let out = std::rc::Rc::new(out);
        self.supports.insert(p, out.clone());
        Ok(out)
    }

    fn run(&mut self, w: &mut BTreeSet<Pair>) -> Result<()> {
        self.spent += 1;
        if self.spent > self.budget {
            return Err(Error::Budget(format!("witness search visited {} nodes", self.budget)));
        }
        if self.best.as_ref().is_some_and(|b| w.len() >= b.len()) {
            return Ok(());
        }
        let pending: Vec<Pair> = w.iter().copied().collect();
        for p in pending {
            let supports = self.supports(p)?;
            if supports.iter().any(|s| s.iter().all(|q| w.contains(q))) {
                continue;
            }
            for s in supports.iter() {
                let added: Vec<Pair> = s.iter().copied().filter(|q| !w.contains(q)).collect();
                let limit = self.best.as_ref().map_or(usize::MAX, BTreeSet::len);
                if w.len() + added.len() >= limit {
                    continue;
                }
                w.extend(added.iter().copied());
                let res = self.run(w);
                for q in &added {
                    w.remove(q);
                }
                res?;
            }
            return Ok(());
        }
        self.best = Some(w.clone());
        Ok(())
    }
}

/// Subsets of the similarity containing `seed`, by increasing size.
fn exhaustive_witness(
    relator: &RelatorSpec,
    a: &Coalgebra,
    b: &Coalgebra,
    sim: &FinRel,
    seed: Pair,
    budget: u64,
) -> Result<Vec<Pair>> {
    let others: Vec<Pair> = sim.pairs().filter(|&p| p != seed).collect();
    let mut spent = 0u64;
    for k in 0..=others.len() {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            spent += 1;
            if spent > budget {
                return Err(Error::Budget(format!("exhaustive witness search tested {budget} relations")));
            }
            let mut pairs = vec![seed];
            pairs.extend(idx.iter().map(|&i| others[i]));
            let r = FinRel::from_pairs(&a.states, &b.states, pairs.iter().copied())?;
            if is_simulation(relator, &r, a, b)? {
                return Ok(pairs);
            }
            if !next_combination(&mut idx, others.len()) {
                break;
            }
        }
    }
    Ok(sim.pairs().collect())
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Seeded random coalgebras, grouped in pairs or triples.
#[derive(Clone, Debug)]
pub struct Sample {
    pub functor: FunctorExpr,
    pub seed: u64,
    pub max_states: usize,
    pub groups: Vec<Vec<Coalgebra>>,
}

impl Sample {
    /// Group `i` is drawn from stream `i` of a ChaCha generator seeded with
    /// `seed`, so any group can be regenerated on its own.
    pub fn random(functor: &FunctorExpr, max_states: usize, groups: usize, arity: usize, seed: u64) -> Result<Self> {
        if max_states == 0 {
            return Err(Error::invalid("samples need at least one state"));
        }
        let mut out = Vec::with_capacity(groups);
        for i in 0..groups {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let group = (0..arity)
                .map(|_| {
                    let n = rng.gen_range(1..=max_states);
                    Coalgebra::random(functor, n, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(group);
        }
        Ok(Sample {
            functor: functor.clone(),
            seed,
            max_states,
            groups: out,
        })
    }

    pub fn pairs(functor: &FunctorExpr, max_states: usize, count: usize, seed: u64) -> Result<Self> {
        Sample::random(functor, max_states, count, 2, seed)
    }

    pub fn triples(functor: &FunctorExpr, max_states: usize, count: usize, seed: u64) -> Result<Self> {
        Sample::random(functor, max_states, count, 3, seed)
    }
}

/// A pair on which similarity and behavioural equivalence disagree.
#[derive(Clone, Debug, Serialize)]
pub struct OracleMismatch {
    pub sample: usize,
    /// `"unsound"` when similar but not equivalent, `"incomplete"` otherwise.
    pub kind: String,
    pub x: String,
    pub y: String,
    pub source: CoalgebraJson,
    pub target: CoalgebraJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub relator: String,
    pub functor: String,
    pub seed: u64,
    pub max_states: usize,
    pub samples: usize,
    pub unsound: usize,
    pub incomplete: usize,
    pub mismatches: Vec<OracleMismatch>,
}

impl OracleReport {
    pub fn sound(&self) -> bool {
        self.unsound == 0
    }

    pub fn complete(&self) -> bool {
        self.incomplete == 0
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "no counterexample" } else { "FAILS" };
        writeln!(
            f,
            "{} on {} samples of {} (seed {}, at most {} states)",
            self.relator, self.samples, self.functor, self.seed, self.max_states
        )?;
        writeln!(f, "  soundness:    {} ({} pairs)", verdict(self.sound()), self.unsound)?;
        write!(f, "  completeness: {} ({} pairs)", verdict(self.complete()), self.incomplete)?;
        for m in &self.mismatches {
            write!(f, "\n  sample {}: ({}, {}) {}", m.sample, m.x, m.y, m.kind)?;
        }
        Ok(())
    }
}

const KEPT_MISMATCHES: usize = 5;

/// Compares similarity with behavioural equivalence on every pair of the
/// sample.
pub fn soundness_completeness_report(relator: &RelatorSpec, sample: &Sample) -> Result<OracleReport> {
    let mut report = OracleReport {
        relator: relator.to_string(),
        functor: sample.functor.to_string(),
        seed: sample.seed,
        max_states: sample.max_states,
        samples: sample.groups.len(),
        unsound: 0,
        incomplete: 0,
        mismatches: Vec::new(),
    };
    for (i, g) in sample.groups.iter().enumerate() {
        let (a, b) = (&g[0], &g[1]);
        let sim = similarity(relator, a, b)?;
        let beh = behavioural_equivalence(a, b)?;
        for x in 0..a.len() {
            for y in 0..b.len() {
                let kind = match (sim.contains(x, y), beh.contains(x, y)) {
                    (true, false) => {
                        report.unsound += 1;
                        "unsound"
                    }
                    (false, true) => {
                        report.incomplete += 1;
                        "incomplete"
                    }
                    _ => continue,
                };
                if report.mismatches.len() < KEPT_MISMATCHES {
                    report.mismatches.push(OracleMismatch {
                        sample: i,
                        kind: kind.into(),
                        x: a.states.name(x),
                        y: b.states.name(y),
                        source: a.to_json(),
                        target: b.to_json(),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Two simulations whose composite is not a simulation.
#[derive(Clone, Debug, Serialize)]
pub struct CompositionFailure {
    pub sample: usize,
    pub first: RelJson,
    pub second: RelJson,
    pub x: String,
    pub z: String,
    pub systems: Vec<CoalgebraJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub relator: String,
    pub seed: u64,
    pub samples: usize,
    pub compositions: usize,
    pub failure: Option<CompositionFailure>,
}

impl ClosureReport {
    pub fn closed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for ClosureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} distinct composites over {} triples (seed {}): ",
            self.relator, self.compositions, self.samples, self.seed
        )?;
        match &self.failure {
            None => write!(f, "no counterexample"),
            Some(c) => write!(
                f,
                "sample {} fails at ({}, {}) for {:?} then {:?}",
                c.sample, c.x, c.z, c.first.pairs, c.second.pairs
            ),
        }
    }
}

/// All simulations between two small coalgebras, by relation code.
pub fn all_simulations(relator: &RelatorSpec, a: &Coalgebra, b: &Coalgebra) -> Result<Vec<FinRel>> {
    check_setting(relator, a, b)?;
    let cells = a.len() * b.len();
    if cells > 16 {
        return Err(Error::SizeBound {
            cardinality: 1u128 << cells.min(127),
            bound: 1 << 16,
        });
    }
    let sim = similarity(relator, a, b)?;
    let mut out = Vec::new();
    for r in FinRel::all(&a.states, &b.states) {
        if r.leq(&sim)? && is_simulation(relator, &r, a, b)? {
            out.push(r);
        }
    }
    Ok(out)
}

/// Composes every simulation `a ⇸ b` with every simulation `b ⇸ c` on each
/// triple of the sample and checks the composites. Stops at the first
/// failure.
pub fn composition_closure_report(relator: &RelatorSpec, sample: &Sample) -> Result<ClosureReport> {
    let mut report = ClosureReport {
        relator: relator.to_string(),
        seed: sample.seed,
        samples: sample.groups.len(),
        compositions: 0,
        failure: None,
    };
    for (i, g) in sample.groups.iter().enumerate() {
        if let Some(failure) = composition_failure(relator, &g[0], &g[1], &g[2], &mut report.compositions)? {
            report.failure = Some(CompositionFailure { sample: i, ..failure });
            break;
        }
    }
    Ok(report)
}

fn composition_failure(
    relator: &RelatorSpec,
    a: &Coalgebra,
    b: &Coalgebra,
    c: &Coalgebra,
    counter: &mut usize,
) -> Result<Option<CompositionFailure>> {
    let first = all_simulations(relator, a, b)?;
    let second = all_simulations(relator, b, c)?;
    let mut seen: HashSet<u64> = HashSet::new();
    for r in &first {
        for s in &second {
            let rs = r.compose(s)?;
            if !seen.insert(rs.code()) {
                continue;
            }
            *counter += 1;
            if let Some((x, z)) = find_violation(relator, &rs, a, c)? {
                return Ok(Some(CompositionFailure {
                    sample: 0,
                    first: r.to_json(),
                    second: s.to_json(),
                    x: a.states.name(x),
                    z: c.states.name(z),
                    systems: vec![a.to_json(), b.to_json(), c.to_json()],
                }));
            }
        }
    }
    Ok(None)
}

/// Exhaustive variant of [`composition_closure_report`] over every triple of
/// coalgebras with the given state counts.
pub fn composition_closure_exhaustive(relator: &RelatorSpec, sizes: [usize; 3]) -> Result<ClosureReport> {
    let f = relator.functor();
    let systems: Vec<Vec<Coalgebra>> = sizes.iter().map(|&n| Coalgebra::all(f, n)).collect::<Result<_>>()?;
    let mut report = ClosureReport {
        relator: relator.to_string(),
        seed: 0,
        samples: 0,
        compositions: 0,
        failure: None,
    };
    for a in &systems[0] {
        for b in &systems[1] {
            for c in &systems[2] {
                let idx = report.samples;
                report.samples += 1;
                if let Some(failure) = composition_failure(relator, a, b, c, &mut report.compositions)? {
                    report.failure = Some(CompositionFailure { sample: idx, ..failure });
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_functor, parse_relator};

    fn pow_coalgebra(succ: &[&[usize]]) -> Coalgebra {
        let t = succ.iter().map(|s| Value::Set(s.to_vec())).collect();
        Coalgebra::new(FunctorExpr::Pow, FinSet::range(succ.len()), t).unwrap()
    }

    #[test]
    fn empty_relation_is_a_simulation() {
        let a = pow_coalgebra(&[&[0], &[]]);
        let r = FinRel::empty(a.states(), a.states());
        assert!(is_simulation(&RelatorSpec::barr(FunctorExpr::Pow), &r, &a, &a).unwrap());
    }

    #[test]
    fn identity_is_a_simulation_for_barr() {
        let a = pow_coalgebra(&[&[0, 1], &[], &[2]]);
        let r = FinRel::identity(a.states());
        assert!(is_simulation(&RelatorSpec::barr(FunctorExpr::Pow), &r, &a, &a).unwrap());
    }

    #[test]
    fn deadlock_and_loop_are_distinguished() {
        let a = pow_coalgebra(&[&[0], &[]]);
        let barr = RelatorSpec::barr(FunctorExpr::Pow);
        assert_eq!(similarity(&barr, &a, &a).unwrap(), FinRel::identity(a.states()));
        assert_eq!(behavioural_equivalence(&a, &a).unwrap(), FinRel::identity(a.states()));
        let boxed = RelatorSpec::pow_box();
        // Under the box lifting the deadlock state is simulated by the loop.
        assert!(similarity(&boxed, &a, &a).unwrap().contains(1, 0));
    }

    #[test]
    fn quotient_is_related_to_its_image() {
        let a = pow_coalgebra(&[&[1], &[0]]);
        let b = pow_coalgebra(&[&[0]]);
        let s = similarity(&RelatorSpec::barr(FunctorExpr::Pow), &a, &b).unwrap();
        assert_eq!(s, FinRel::full(a.states(), b.states()));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"functor": "2 * Exp{a,b}", "states": ["s", "t"],
            "transition": {"s": [1, {"a": "t", "b": "s"}], "t": [0, {"a": "t", "b": "t"}]}}"#;
        let c = Coalgebra::from_json_str(text).unwrap();
        assert_eq!(c.len(), 2);
        let back = Coalgebra::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(Coalgebra::from_json_str(r#"{"functor": "Pow", "states": ["s"], "transition": {}}"#).is_err());
    }

    #[test]
    fn coproduct_shifts_target_states() {
        let a = pow_coalgebra(&[&[0]]);
        let b = pow_coalgebra(&[&[1], &[0]]);
        let c = a.coproduct(&b).unwrap();
        assert_eq!(c.transition(1), &Value::Set(vec![2]));
        assert_eq!(c.transition(2), &Value::Set(vec![1]));
    }

    #[test]
    fn minimal_witness_on_cycles() {
        let a = pow_coalgebra(&[&[1], &[0]]);
        let b = pow_coalgebra(&[&[0]]);
        let barr = RelatorSpec::barr(FunctorExpr::Pow);
        let w = minimal_witness(&barr, &a, &b, (0, 0)).unwrap().unwrap();
        assert_eq!(w.len(), 2);
        let c = pow_coalgebra(&[&[]]);
        assert_eq!(minimal_witness(&barr, &a, &c, (0, 0)).unwrap(), None);
    }

    #[test]
    fn nonlocal_search_agrees_with_local_search() {
        let f = parse_functor("2 * Id").unwrap();
        let a = Coalgebra::from_ranks(f.clone(), FinSet::range(3), &[1, 5, 3]).unwrap();
        let b = Coalgebra::from_ranks(f.clone(), FinSet::range(2), &[3, 0]).unwrap();
        let barr = RelatorSpec::barr(f.clone());
        let up = RelatorSpec::up_to_difunctional(barr.clone());
        for x in 0..3 {
            for y in 0..2 {
                let local = minimal_witness(&barr, &a, &b, (x, y)).unwrap().map(|r| r.len());
                let exhaustive = exhaustive_witness_len(&barr, &a, &b, (x, y));
                assert_eq!(local, exhaustive);
                // Up-to closure can only shrink witnesses.
                if let (Some(l), Some(u)) = (local, minimal_witness(&up, &a, &b, (x, y)).unwrap()) {
                    assert!(u.len() <= l);
                }
            }
        }
    }

    fn exhaustive_witness_len(r: &RelatorSpec, a: &Coalgebra, b: &Coalgebra, seed: Pair) -> Option<usize> {
        let sim = similarity(r, a, b).unwrap();
        sim.contains(seed.0, seed.1)
            .then(|| exhaustive_witness(r, a, b, &sim, seed, DEFAULT_WITNESS_BUDGET).unwrap().len())
    }

    #[test]
    fn up_to_difunctional_composition_fails_on_two_times_id() {
        let up = parse_relator("upto-difun(barr(2 * Id))").unwrap();
        let report = composition_closure_exhaustive(&up, [2, 2, 2]).unwrap();
        assert!(!report.closed(), "{report}");
        let barr = parse_relator("barr(2 * Id)").unwrap();
        assert!(composition_closure_exhaustive(&barr, [2, 2, 2]).unwrap().closed());
    }

    #[test]
    fn random_samples_are_replayable() {
        let f = FunctorExpr::Pow;
        let s1 = Sample::pairs(&f, 3, 10, 7).unwrap();
        let s2 = Sample::pairs(&f, 3, 10, 7).unwrap();
        assert_eq!(s1.groups, s2.groups);
        let single = Sample::pairs(&f, 3, 4, 7).unwrap();
        assert_eq!(single.groups[..], s1.groups[..4]);
    }
}
