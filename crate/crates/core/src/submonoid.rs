//! Upward-closed submonoids of endorelations on a label set and the lattice
//! of normal lax extensions of exponential functors they classify.
//!
//! An endorelation on `A` is encoded as a bit mask, bit `a·|A| + b` standing
//! for the pair `(a, b)` (the same layout as [`FinRel::code`]). A submonoid
//! is stored as a membership table over all `2^(|A|²)` codes, which caps the
//! label set at four elements.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finrel::{FinRel, FinSet};
use crate::functor::{FunctorExpr, Value};
use crate::relator::RelatorSpec;

/// Largest label set whose relations fit the membership table.
pub const MAX_LABELS: usize = 4;

/// Bit-level composition of endorelation codes on `k` labels: `x (p;q) z`
/// iff `x p y q z` for some `y`.
pub fn compose_codes(k: usize, p: u32, q: u32) -> u32 {
    let row_mask = (1u32 << k) - 1;
    let mut out = 0;
    for a in 0..k {
        let row = (p >> (a * k)) & row_mask;
        let mut acc = 0;
        for b in 0..k {
            if row >> b & 1 == 1 {
                acc |= (q >> (b * k)) & row_mask;
            }
        }
        out |= acc << (a * k);
    }
    out
}

pub fn identity_code(k: usize) -> u32 {
    (0..k).fold(0, |acc, a| acc | 1 << (a * k + a))
}

fn check_labels(labels: &FinSet) -> Result<usize> {
    let k = labels.len();
    if k > MAX_LABELS {
        return Err(Error::SizeBound {
            cardinality: k as u128,
            bound: MAX_LABELS as u128,
        });
    }
    Ok(k)
}

fn code_of(labels: &FinSet, phi: &FinRel) -> Result<u32> {
    if phi.dom() != labels || phi.cod() != labels {
        return Err(Error::CarrierMismatch(
            "endorelation does not live on the label set".into(),
        ));
    }
    Ok(phi.code() as u32)
}

/// Whether the difunctional closure of `phi` is reflexive.
pub fn is_normal_endorelation(phi: &FinRel) -> Result<bool> {
    if phi.dom() != phi.cod() {
        return Err(Error::CarrierMismatch("normality is defined for endorelations".into()));
    }
    let id = FinRel::identity(phi.dom());
    Ok(id.leq_unchecked(&phi.difunctional_closure()))
}

/// Cospan criterion for normality: for all `f, g : A → X` with `|X| ≤
/// max_target`, `phi ≤ g°·f` (that is `a phi b ⇒ f(a) = g(b)`) forces
/// `f = g`.
pub fn normal_via_cospans(phi: &FinRel, max_target: usize) -> Result<bool> {
    if phi.dom() != phi.cod() {
        return Err(Error::CarrierMismatch("normality is defined for endorelations".into()));
    }
    let a = phi.dom().clone();
    if max_target < a.len() {
        return Err(Error::invalid(format!(
            "cospan targets must allow at least {} elements",
            a.len()
        )));
    }
    let pairs: Vec<(usize, usize)> = phi.pairs().collect();
    for n in 1..=max_target {
        let x = FinSet::range(n);
        let maps: Vec<_> = crate::finrel::FinFun::all(&a, &x).collect();
        for f in &maps {
            for g in &maps {
                if f != g && pairs.iter().all(|&(p, q)| f.apply(p) == g.apply(q)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Default target bound for [`normal_via_cospans`].
pub fn default_cospan_bound(labels: usize) -> usize {
    (2 * labels).max(1)
}

/// A set of endorelations on `A` that contains `1_A` and is closed under
/// composition and under enlarging relations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UCSubmonoid {
    labels: FinSet,
    members: Vec<bool>,
}

impl std::fmt::Debug for UCSubmonoid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "UCSubmonoid({} members, generators {})", self.len(), self.generators_text())
    }
}

impl UCSubmonoid {
    /// Validates a membership table indexed by relation code.
    pub fn from_table(labels: FinSet, members: Vec<bool>) -> Result<Self> {
        let k = check_labels(&labels)?;
        if members.len() != 1 << (k * k) {
            return Err(Error::invalid("membership table has the wrong size"));
        }
        let s = UCSubmonoid { labels, members };
        s.validate()?;
        Ok(s)
    }

    /// Validates an explicit list of member relations.
    pub fn from_members(labels: FinSet, members: &[FinRel]) -> Result<Self> {
        let k = check_labels(&labels)?;
        let mut table = vec![false; 1 << (k * k)];
        for phi in members {
            table[code_of(&labels, phi)? as usize] = true;
        }
        Self::from_table(labels, table)
    }

    fn validate(&self) -> Result<()> {
        let k = self.k();
        if !self.members[identity_code(k) as usize] {
            return Err(Error::invalid("submonoid must contain the identity relation"));
        }
        let codes: Vec<u32> = self.codes().collect();
        for &c in &codes {
            for b in 0..k * k {
                if !self.members[(c | 1 << b) as usize] {
                    return Err(Error::invalid(format!(
                        "not upward closed: {} is a member but a superset is not",
                        self.render(c)
                    )));
                }
            }
        }
        for &p in &codes {
            for &q in &codes {
                if !self.members[compose_codes(k, p, q) as usize] {
                    return Err(Error::invalid(format!(
                        "not closed under composition: {} ; {}",
                        self.render(p),
                        self.render(q)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Least upward-closed submonoid containing the generators, computed by
    /// alternating upward closure and composition closure to a joint
    /// fixpoint.
    pub fn generate(labels: &FinSet, generators: &[FinRel]) -> Result<Self> {
        Self::generate_ordered(labels, generators, true)
    }

    /// As [`UCSubmonoid::generate`], choosing which closure runs first.
    pub fn generate_ordered(labels: &FinSet, generators: &[FinRel], upward_first: bool) -> Result<Self> {
        let k = check_labels(labels)?;
        let mut table = vec![false; 1 << (k * k)];
        table[identity_code(k) as usize] = true;
        for g in generators {
            table[code_of(labels, g)? as usize] = true;
        }
        let table = joint_closure(k, table, upward_first);
        Ok(UCSubmonoid {
            labels: labels.clone(),
            members: table,
        })
    }

    /// `generate` of the union of the members.
    pub fn join(parts: &[UCSubmonoid]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::invalid("join of an empty family"))?;
        let k = first.k();
        let mut table = vec![false; 1 << (k * k)];
        table[identity_code(k) as usize] = true;
        for p in parts {
            if p.labels != first.labels {
                return Err(Error::CarrierMismatch("join over different label sets".into()));
            }
            for (t, &m) in table.iter_mut().zip(&p.members) {
                *t |= m;
            }
        }
        let comp_only = composition_closure(k, table.clone());
        let upward = is_upward_closed(k, &comp_only);
        log::debug!(
            "join of {} submonoids: composition closure alone is {}upward closed",
            parts.len(),
            if upward { "" } else { "not " }
        );
        Ok(UCSubmonoid {
            labels: first.labels.clone(),
            members: joint_closure(k, table, true),
        })
    }

    /// The bottom element: supersets of the identity.
    pub fn barr(labels: &FinSet) -> Result<Self> {
        Self::generate(labels, &[])
    }

    pub fn labels(&self) -> &FinSet {
        &self.labels
    }

    fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn contains(&self, phi: &FinRel) -> bool {
        code_of(&self.labels, phi).map(|c| self.members[c as usize]).unwrap_or(false)
    }

    #[inline]
    pub fn contains_code(&self, code: u32) -> bool {
        self.members[code as usize]
    }

    pub fn table(&self) -> &[bool] {
        &self.members
    }

    pub fn codes(&self) -> impl Iterator<Item = u32> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(c, _)| c as u32)
    }

    pub fn len(&self) -> usize {
        self.codes().count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn relation(&self, code: u32) -> FinRel {
        FinRel::from_code(&self.labels, &self.labels, code as u64)
    }

    pub fn members(&self) -> Vec<FinRel> {
        self.codes().map(|c| self.relation(c)).collect()
    }

    /// Minimal members; together with upward closure they determine the set.
    pub fn minimal_codes(&self) -> Vec<u32> {
        let codes: Vec<u32> = self.codes().collect();
        codes
            .iter()
            .copied()
            .filter(|&c| !codes.iter().any(|&d| d != c && d & c == d))
            .collect()
    }

    /// Minimal members other than the identity, used as display generators.
    pub fn generators(&self) -> Vec<FinRel> {
        let id = identity_code(self.k());
        self.minimal_codes()
            .into_iter()
            .filter(|&c| c != id)
            .map(|c| self.relation(c))
            .collect()
    }

    pub fn is_subset(&self, other: &UCSubmonoid) -> bool {
        self.labels == other.labels && self.members.iter().zip(&other.members).all(|(&a, &b)| !a || b)
    }

    pub fn all_normal(&self) -> bool {
        let normal = normal_table(self.k());
        self.codes().all(|c| normal[c as usize])
    }

    /// Whether `φ ∈ 𝒜` implies `φ° ∈ 𝒜`.
    pub fn converse_closed(&self) -> bool {
        self.codes()
            .all(|c| self.members[self.relation(c).converse().code() as usize])
    }

    fn render(&self, code: u32) -> String {
        render_pairs(&self.relation(code))
    }

    /// `[(a,b),(b,b)]`-style text of the display generators.
    pub fn generators_text(&self) -> String {
        let gens: Vec<String> = self.generators().iter().map(render_pairs).collect();
        format!("[{}]", gens.join(", "))
    }

    pub fn to_json(&self, with_members: bool) -> SubmonoidJson {
        SubmonoidJson {
            labels: self.labels.names(),
            generators: self.generators().iter().map(FinRel::named_pairs).collect(),
            members: with_members.then(|| self.members().iter().map(FinRel::named_pairs).collect()),
        }
    }

    pub fn from_json(json: &SubmonoidJson) -> Result<Self> {
        let labels = FinSet::new(json.labels.iter().cloned())?;
        let to_rel = |pairs: &Vec<(String, String)>| {
            FinRel::from_named_pairs(&labels, &labels, pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
        };
        let gens = json.generators.iter().map(to_rel).collect::<Result<Vec<_>>>()?;
        let generated = Self::generate(&labels, &gens)?;
        if let Some(members) = &json.members {
            let explicit = Self::from_members(labels.clone(), &members.iter().map(to_rel).collect::<Result<Vec<_>>>()?)?;
            if explicit != generated {
                return Err(Error::invalid("listed members disagree with the generators"));
            }
        }
        Ok(generated)
    }
}

/// Pair list text `[(a,b),(b,a)]` of a relation.
pub fn render_pairs(r: &FinRel) -> String {
    let items: Vec<String> = r.named_pairs().iter().map(|(a, b)| format!("({a},{b})")).collect();
    format!("[{}]", items.join(","))
}

/// JSON form `{labels, generators, members?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmonoidJson {
    pub labels: Vec<String>,
    pub generators: Vec<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<Vec<(String, String)>>>,
}

fn upward_closure(k: usize, mut table: Vec<bool>) -> Vec<bool> {
    for b in 0..k * k {
        let bit = 1usize << b;
        for c in 0..table.len() {
            if table[c] {
                table[c | bit] = true;
            }
        }
    }
    table
}

fn is_upward_closed(k: usize, table: &[bool]) -> bool {
    (0..table.len()).all(|c| !table[c] || (0..k * k).all(|b| table[c | 1 << b]))
}

fn composition_closure(k: usize, mut table: Vec<bool>) -> Vec<bool> {
    let mut members: Vec<u32> = (0..table.len()).filter(|&c| table[c]).map(|c| c as u32).collect();
    let mut frontier = members.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &p in &frontier {
            for &q in &members {
                for c in [compose_codes(k, p, q), compose_codes(k, q, p)] {
                    if !table[c as usize] {
                        table[c as usize] = true;
                        next.push(c);
                    }
                }
            }
        }
        members.extend(&next);
        frontier = next;
    }
    table
}

fn minimal_of(table: &[bool]) -> Vec<u32> {
    let codes: Vec<u32> = (0..table.len()).filter(|&c| table[c]).map(|c| c as u32).collect();
    codes
        .iter()
        .copied()
        .filter(|&c| !codes.iter().any(|&d| d != c && d & c == d))
        .collect()
}

/// Alternates upward closure and composition closure. Composition is
/// monotone, so on an upward-closed set it suffices to compose minimal
/// members.
fn joint_closure(k: usize, table: Vec<bool>, upward_first: bool) -> Vec<bool> {
    let mut table = if upward_first {
        upward_closure(k, table)
    } else {
        composition_closure(k, table)
    };
    loop {
        table = upward_closure(k, table);
        let mins = minimal_of(&table);
        let mut grown = false;
        for &p in &mins {
            for &q in &mins {
                let c = compose_codes(k, p, q) as usize;
                if !table[c] {
                    table[c] = true;
                    grown = true;
                }
            }
        }
        if !grown {
            return table;
        }
    }
}

/// `normal[c]` for every endorelation code on `k` labels.
pub fn normal_table(k: usize) -> Vec<bool> {
    let a = FinSet::range(k);
    (0..1u64 << (k * k))
        .map(|c| {
            let phi = FinRel::from_code(&a, &a, c);
            FinRel::identity(&a).leq_unchecked(&phi.difunctional_closure())
        })
        .collect()
}

/// The lattice of normal lax extensions of `Exp(A)`, i.e. of upward-closed
/// submonoids all of whose members are normal.
#[derive(Clone, Debug)]
pub struct NLELattice {
    pub labels: FinSet,
    pub nodes: Vec<UCSubmonoid>,
    /// `(lower, upper)` covering pairs, as node indices.
    pub hasse: Vec<(usize, usize)>,
    /// `false` when produced by the generator-driven mode, in which case
    /// the nodes are only a lower bound on the lattice.
    pub exhaustive: bool,
}

/// Enumeration limits for [`enumerate_nle`].
#[derive(Clone, Copy, Debug)]
pub struct LatticeOptions {
    /// Largest label set enumerated exhaustively.
    pub exhaustive_up_to: usize,
    /// Allow the generator-driven mode above that size.
    pub allow_generator_mode: bool,
    /// Cap on the number of nodes the generator mode may produce.
    pub max_nodes: usize,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions {
            exhaustive_up_to: 2,
            allow_generator_mode: true,
            max_nodes: 512,
        }
    }
}

/// Enumerates the normal lax extensions of `Exp(A)` via their submonoids.
///
/// Up to `exhaustive_up_to` labels every subset of normal relations is
/// tried. For three labels the generator mode closes every single normal
/// relation, keeps the all-normal results, adds the join of all of them and
/// then pairwise joins up to `max_nodes`; such a lattice is flagged as
/// non-exhaustive.
pub fn enumerate_nle(labels: &FinSet, opts: LatticeOptions) -> Result<NLELattice> {
    let k = check_labels(labels)?;
    let normal = normal_table(k);
    let nodes = if k <= opts.exhaustive_up_to {
        exhaustive_nodes(labels, k, &normal)?
    } else if opts.allow_generator_mode && k <= 3 {
        generator_nodes(labels, &normal, opts.max_nodes)?
    } else {
        return Err(Error::SizeBound {
            cardinality: k as u128,
            bound: opts.exhaustive_up_to.max(if opts.allow_generator_mode { 3 } else { 0 }) as u128,
        });
    };
    let exhaustive = k <= opts.exhaustive_up_to;
    Ok(NLELattice::from_nodes(labels.clone(), nodes, exhaustive))
}

fn exhaustive_nodes(labels: &FinSet, k: usize, normal: &[bool]) -> Result<Vec<UCSubmonoid>> {
    let normals: Vec<u32> = (0..normal.len()).filter(|&c| normal[c]).map(|c| c as u32).collect();
    if normals.len() > 20 {
        return Err(Error::SizeBound {
            cardinality: 1u128 << normals.len(),
            bound: 1 << 20,
        });
    }
    let id = identity_code(k);
    let mut nodes = Vec::new();
    for mask in 0u64..1 << normals.len() {
        let mut table = vec![false; normal.len()];
        for (i, &c) in normals.iter().enumerate() {
            if mask >> i & 1 == 1 {
                table[c as usize] = true;
            }
        }
        if !table[id as usize] || !is_upward_closed(k, &table) {
            continue;
        }
        let closed = (0..table.len()).all(|p| {
            !table[p]
                || (0..table.len()).all(|q| !table[q] || table[compose_codes(k, p as u32, q as u32) as usize])
        });
        if closed {
            nodes.push(UCSubmonoid {
                labels: labels.clone(),
                members: table,
            });
        }
    }
    Ok(nodes)
}

fn generator_nodes(labels: &FinSet, normal: &[bool], max_nodes: usize) -> Result<Vec<UCSubmonoid>> {
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut nodes = vec![UCSubmonoid::barr(labels)?];
    seen.insert(nodes[0].members.clone());
    for c in (0..normal.len()).filter(|&c| normal[c]) {
        let s = UCSubmonoid::generate(labels, &[FinRel::from_code(labels, labels, c as u64)])?;
        if s.all_normal() && seen.insert(s.members.clone()) {
            nodes.push(s);
        }
    }
    let singles = nodes.len();
    let top = UCSubmonoid::join(&nodes[..singles])?;
    if seen.insert(top.members.clone()) {
        nodes.push(top);
    }
    'pairs: for i in 1..singles {
        for j in i + 1..singles {
            let s = UCSubmonoid::join(&[nodes[i].clone(), nodes[j].clone()])?;
            if seen.contains(&s.members) {
                continue;
            }
            if nodes.len() >= max_nodes {
                log::warn!("generator mode stopped adding pairwise joins at {max_nodes} nodes");
                break 'pairs;
            }
            seen.insert(s.members.clone());
            nodes.push(s);
        }
    }
    Ok(nodes)
}

impl NLELattice {
    fn from_nodes(labels: FinSet, mut nodes: Vec<UCSubmonoid>, exhaustive: bool) -> Self {
        nodes.sort_by_key(|n| (n.len(), std::cmp::Reverse(n.members.clone())));
        let n = nodes.len();
        let below = |i: usize, j: usize| i != j && nodes[i].is_subset(&nodes[j]);
        let mut hasse = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if below(i, j) && !(0..n).any(|m| below(i, m) && below(m, j)) {
                    hasse.push((i, j));
                }
            }
        }
        NLELattice {
            labels,
            nodes,
            hasse,
            exhaustive,
        }
    }

    pub fn bottom(&self) -> Option<usize> {
        (0..self.nodes.len()).find(|&i| self.nodes.iter().all(|m| self.nodes[i].is_subset(m)))
    }

    pub fn top(&self) -> Option<usize> {
        (0..self.nodes.len()).find(|&i| self.nodes.iter().all(|m| m.is_subset(&self.nodes[i])))
    }

    /// Whether every pair of nodes has a least upper and greatest lower
    /// bound among the nodes.
    pub fn is_lattice(&self) -> bool {
        let n = self.nodes.len();
        let leq = |i: usize, j: usize| self.nodes[i].is_subset(&self.nodes[j]);
        let has_extremum = |i: usize, j: usize, upper: bool| {
            let bounds: Vec<usize> = (0..n)
                .filter(|&m| if upper { leq(i, m) && leq(j, m) } else { leq(m, i) && leq(m, j) })
                .collect();
            bounds
                .iter()
                .any(|&b| bounds.iter().all(|&c| if upper { leq(b, c) } else { leq(c, b) }))
        };
        (0..n).all(|i| (0..n).all(|j| has_extremum(i, j, true) && has_extremum(i, j, false)))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph nle {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let _ = writeln!(
                out,
                "  n{i} [label=\"{} members\\ngens {}\"];",
                node.len(),
                node.generators_text()
            );
        }
        for &(i, j) in &self.hasse {
            let _ = writeln!(out, "  n{i} -> n{j};");
        }
        if !self.exhaustive {
            out.push_str("  label=\"lower bound (generator mode)\";\n");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "labels": self.labels.names(),
            "exhaustive": self.exhaustive,
            "nodes": self.nodes.iter().map(|n| serde_json::json!({
                "size": n.len(),
                "submonoid": n.to_json(false),
            })).collect::<Vec<_>>(),
            "hasse": self.hasse,
        })
    }
}

/// The greatest normal lax extension of `Exp(A)`: the join of all
/// single-generator submonoids whose members are all normal.
///
/// The result is checked to be all-normal and to contain every node of
/// the exhaustive lattice when that is available; a failure is reported as
/// [`Error::Verification`].
pub fn greatest_nle(labels: &FinSet, max_labels: usize) -> Result<UCSubmonoid> {
    let k = check_labels(labels)?;
    if k > max_labels {
        return Err(Error::SizeBound {
            cardinality: k as u128,
            bound: max_labels as u128,
        });
    }
    let normal = normal_table(k);
    let mut parts = vec![UCSubmonoid::barr(labels)?];
    for c in (0..normal.len()).filter(|&c| normal[c]) {
        let s = UCSubmonoid::generate(labels, &[FinRel::from_code(labels, labels, c as u64)])?;
        if s.all_normal() {
            parts.push(s);
        }
    }
    let top = UCSubmonoid::join(&parts)?;
    if !top.all_normal() {
        return Err(Error::Verification(
            "join of normal submonoids contains a non-normal relation".into(),
        ));
    }
    if k <= 2 {
        for node in exhaustive_nodes(labels, k, &normal)? {
            if !node.is_subset(&top) {
                return Err(Error::Verification(
                    "an all-normal submonoid is not below the computed top".into(),
                ));
            }
        }
    }
    Ok(top)
}

/// Every upward-closed submonoid of `Rel(A, A)`, normal or not, for at most
/// two labels, ordered by membership table.
pub fn all_uc_submonoids(labels: &FinSet) -> Result<Vec<UCSubmonoid>> {
    let k = check_labels(labels)?;
    if k > 2 {
        return Err(Error::SizeBound {
            cardinality: k as u128,
            bound: 2,
        });
    }
    let cells = k * k;
    let size = 1usize << cells;
    let id = identity_code(k) as usize;
    let mut out = Vec::new();
    for set in 0u64..1 << size {
        let member = |c: usize| set >> c & 1 == 1;
        if !member(id) {
            continue;
        }
        let members: Vec<usize> = (0..size).filter(|&c| member(c)).collect();
        let upward = members.iter().all(|&c| (0..cells).all(|b| member(c | 1 << b)));
        if !upward {
            continue;
        }
        let closed = members
            .iter()
            .all(|&p| members.iter().all(|&q| member(compose_codes(k, p as u32, q as u32) as usize)));
        if closed {
            out.push(UCSubmonoid::from_table(labels.clone(), (0..size).map(member).collect())?);
        }
    }
    Ok(out)
}

/// `S(L) = {φ | 1_A (L φ) 1_A}` for a relator over `Exp(A)`, as a
/// membership table indexed by relation code.
pub fn s_of_relator(spec: &RelatorSpec) -> Result<Vec<bool>> {
    let FunctorExpr::Exp(labels) = spec.functor() else {
        return Err(Error::Incompatible(format!(
            "induced submonoids need an exponential functor, got {}",
            spec.functor()
        )));
    };
    let k = check_labels(labels)?;
    let identity = Value::Func((0..k).collect());
    (0..1u64 << (k * k))
        .map(|c| {
            let phi = FinRel::from_code(labels, labels, c);
            Ok(spec.prepare(&phi)?.relates(&identity, &identity))
        })
        .collect()
}
