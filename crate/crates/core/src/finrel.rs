//! Finite sets, total functions and binary relations.
//!
//! Carriers are index based: a [`FinSet`] is an ordered list of distinct
//! names, functions are lookup tables and relations are dense boolean
//! matrices stored as bitset rows. Composition is applicative in spirit but
//! the method form reads left to right: `r.compose(&s)` relates `x` to `z`
//! iff `x r y` and `y s z` for some `y` (the relation usually written `s·r`).
//!
//! The module also houses the span/cospan constructions used by the relator
//! layer: tabulation of a relation, pushouts of spans (union-find over
//! `X + Y`), pullbacks of cospans and the weak-pullback test.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite carrier with a stable enumeration of named elements.
#[derive(Clone)]
pub struct FinSet {
    repr: SetRepr,
}

#[derive(Clone)]
enum SetRepr {
    /// `{0, 1, ..., n-1}` with decimal names, materialised on demand.
    Range(usize),
    Named(Arc<[String]>),
}

impl FinSet {
    /// Builds a set from distinct names.
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if let Some(j) = seen.insert(n.as_str(), i) {
                return Err(Error::invalid(format!(
                    "duplicate element {n:?} at positions {j} and {i}"
                )));
            }
        }
        Ok(FinSet {
            repr: SetRepr::Named(names.into()),
        })
    }

    /// The set `{0, ..., n-1}`.
    pub fn range(n: usize) -> Self {
        FinSet {
            repr: SetRepr::Range(n),
        }
    }

    pub fn empty() -> Self {
        Self::range(0)
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            SetRepr::Range(n) => *n,
            SetRepr::Named(names) => names.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self, i: usize) -> String {
        match &self.repr {
            SetRepr::Range(n) => {
                assert!(i < *n, "element {i} out of range for set of size {n}");
                i.to_string()
            }
            SetRepr::Named(names) => names[i].clone(),
        }
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.name(i)).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        match &self.repr {
            SetRepr::Range(n) => name.parse::<usize>().ok().filter(|i| {
                i < n && i.to_string() == name
            }),
            SetRepr::Named(names) => names.iter().position(|n| n == name),
        }
    }

    /// A name → index table, for parsers that resolve many names.
    pub fn lookup(&self) -> HashMap<String, usize> {
        (0..self.len()).map(|i| (self.name(i), i)).collect()
    }

    /// Disjoint union with elements tagged by side, `X` first.
    pub fn disjoint_union(&self, other: &FinSet) -> FinSet {
        let names = self
            .names()
            .into_iter()
            .map(|n| format!("inl({n})"))
            .chain(other.names().into_iter().map(|n| format!("inr({n})")));
        FinSet::new(names).expect("tagged names are distinct")
    }
}

impl PartialEq for FinSet {
    fn eq(&self, other: &Self) -> bool {
        match (&self.repr, &other.repr) {
            (SetRepr::Range(a), SetRepr::Range(b)) => a == b,
            (SetRepr::Named(a), SetRepr::Named(b)) if Arc::ptr_eq(a, b) => true,
            _ => self.len() == other.len() && (0..self.len()).all(|i| self.name(i) == other.name(i)),
        }
    }
}

impl Eq for FinSet {}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            SetRepr::Range(n) => write!(f, "FinSet(0..{n})"),
            SetRepr::Named(names) => f.debug_set().entries(names.iter()).finish(),
        }
    }
}

impl Serialize for FinSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.names().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(d)?;
        FinSet::new(names).map_err(serde::de::Error::custom)
    }
}

/// A total function between finite sets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinFun {
    dom: FinSet,
    cod: FinSet,
    table: Vec<usize>,
}

impl FinFun {
    pub fn new(dom: FinSet, cod: FinSet, table: Vec<usize>) -> Result<Self> {
        if table.len() != dom.len() {
            return Err(Error::invalid(format!(
                "function table has {} entries for a domain of size {}",
                table.len(),
                dom.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&j| j >= cod.len()) {
            return Err(Error::invalid(format!(
                "function value {bad} outside codomain of size {}",
                cod.len()
            )));
        }
        Ok(FinFun { dom, cod, table })
    }

    pub fn identity(set: &FinSet) -> Self {
        FinFun {
            dom: set.clone(),
            cod: set.clone(),
            table: (0..set.len()).collect(),
        }
    }

    /// The constant map onto `value`.
    pub fn constant(dom: &FinSet, cod: &FinSet, value: usize) -> Result<Self> {
        Self::new(dom.clone(), cod.clone(), vec![value; dom.len()])
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &FinFun) -> Result<FinFun> {
        if self.cod != then.dom {
            return Err(Error::CarrierMismatch(
                "function composition: codomain differs from next domain".into(),
            ));
        }
        Ok(FinFun {
            dom: self.dom.clone(),
            cod: then.cod.clone(),
            table: self.table.iter().map(|&y| then.table[y]).collect(),
        })
    }

    pub fn graph(&self) -> FinRel {
        let mut r = FinRel::empty(&self.dom, &self.cod);
        for (x, &y) in self.table.iter().enumerate() {
            r.insert(x, y);
        }
        r
    }

    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.cod.len()];
        self.table.iter().all(|&y| !std::mem::replace(&mut hit[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.cod.len()];
        for &y in &self.table {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Every function `dom → cod`, in base-`|cod|` counter order with the
    /// first domain element as the least significant digit.
    pub fn all(dom: &FinSet, cod: &FinSet) -> impl Iterator<Item = FinFun> {
        let (dom, cod) = (dom.clone(), cod.clone());
        let n = dom.len();
        let m = cod.len();
        let total: u64 = if n == 0 {
            1
        } else if m == 0 {
            0
        } else {
            (m as u64).checked_pow(n as u32).expect("function space too large")
        };
        (0..total).map(move |mut code| {
            let mut table = Vec::with_capacity(n);
            for _ in 0..n {
                table.push((code % m as u64) as usize);
                code /= m as u64;
            }
            FinFun {
                dom: dom.clone(),
                cod: cod.clone(),
                table,
            }
        })
    }
}

/// A relation `X ⇸ Y` as a dense boolean matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinRel {
    dom: FinSet,
    cod: FinSet,
    words: usize,
    bits: Vec<u64>,
}

impl std::hash::Hash for FinSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.len().hash(state);
    }
}

impl FinRel {
    pub fn empty(dom: &FinSet, cod: &FinSet) -> Self {
        let words = cod.len().div_ceil(64);
        FinRel {
            dom: dom.clone(),
            cod: cod.clone(),
            words,
            bits: vec![0; words * dom.len()],
        }
    }

    pub fn full(dom: &FinSet, cod: &FinSet) -> Self {
        let mut r = Self::empty(dom, cod);
        for x in 0..dom.len() {
            for y in 0..cod.len() {
                r.insert(x, y);
            }
        }
        r
    }

    pub fn identity(set: &FinSet) -> Self {
        let mut r = Self::empty(set, set);
        for x in 0..set.len() {
            r.insert(x, x);
        }
        r
    }

    /// The subidentity `{(x, x) | x ∈ subset}`.
    pub fn subidentity(set: &FinSet, subset: &[usize]) -> Result<Self> {
        let mut r = Self::empty(set, set);
        for &x in subset {
            if x >= set.len() {
                return Err(Error::invalid(format!("element {x} outside carrier")));
            }
            r.insert(x, x);
        }
        Ok(r)
    }

    pub fn from_pairs<I>(dom: &FinSet, cod: &FinSet, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut r = Self::empty(dom, cod);
        for (x, y) in pairs {
            if x >= dom.len() || y >= cod.len() {
                return Err(Error::invalid(format!(
                    "pair ({x}, {y}) outside carriers {}x{}",
                    dom.len(),
                    cod.len()
                )));
            }
            r.insert(x, y);
        }
        Ok(r)
    }

    /// Builds a relation from `(name, name)` pairs.
    pub fn from_named_pairs<'a, I>(dom: &FinSet, cod: &FinSet, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let (dl, cl) = (dom.lookup(), cod.lookup());
        let mut r = Self::empty(dom, cod);
        for (a, b) in pairs {
            let x = *dl
                .get(a)
                .ok_or_else(|| Error::invalid(format!("unknown domain element {a:?}")))?;
            let y = *cl
                .get(b)
                .ok_or_else(|| Error::invalid(format!("unknown codomain element {b:?}")))?;
            r.insert(x, y);
        }
        Ok(r)
    }

    /// Relation whose `(x, y)` bit is bit `x * |cod| + y` of `code`.
    pub fn from_code(dom: &FinSet, cod: &FinSet, code: u64) -> Self {
        let m = cod.len();
        let mut r = Self::empty(dom, cod);
        for x in 0..dom.len() {
            for y in 0..m {
                if code >> (x * m + y) & 1 == 1 {
                    r.insert(x, y);
                }
            }
        }
        r
    }

    /// Inverse of [`FinRel::from_code`]; requires `|dom|·|cod| ≤ 64`.
    pub fn code(&self) -> u64 {
        let m = self.cod.len();
        assert!(self.dom.len() * m <= 64, "relation too large for a u64 code");
        self.pairs().fold(0, |acc, (x, y)| acc | 1 << (x * m + y))
    }

    /// Every relation between the two carriers, ordered by [`FinRel::code`].
    pub fn all(dom: &FinSet, cod: &FinSet) -> impl Iterator<Item = FinRel> {
        let cells = dom.len() * cod.len();
        assert!(cells < 32, "refusing to enumerate 2^{cells} relations");
        let (dom, cod) = (dom.clone(), cod.clone());
        (0..1u64 << cells).map(move |c| FinRel::from_code(&dom, &cod, c))
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, x: usize, y: usize) {
        self.bits[x * self.words + y / 64] |= 1 << (y % 64);
    }

    #[inline]
    pub fn remove(&mut self, x: usize, y: usize) {
        self.bits[x * self.words + y / 64] &= !(1 << (y % 64));
    }

    fn row_words(&self, x: usize) -> &[u64] {
        &self.bits[x * self.words..(x + 1) * self.words]
    }

    /// Elements related to `x`, ascending.
    pub fn row(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(x).iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
        })
    }

    /// All pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dom.len()).flat_map(move |x| self.row(x).map(move |y| (x, y)))
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    fn same_shape(&self, other: &FinRel, what: &str) -> Result<()> {
        if self.dom != other.dom || self.cod != other.cod {
            return Err(Error::CarrierMismatch(format!(
                "{what}: relations on different carriers"
            )));
        }
        Ok(())
    }

    /// `x (r;s) z` iff `x r y s z` for some `y` — the relation `s·r`.
    pub fn compose(&self, s: &FinRel) -> Result<FinRel> {
        if self.cod != s.dom {
            return Err(Error::CarrierMismatch(format!(
                "compose: codomain of size {} does not match domain of size {}",
                self.cod.len(),
                s.dom.len()
            )));
        }
        Ok(self.compose_unchecked(s))
    }

    pub(crate) fn compose_unchecked(&self, s: &FinRel) -> FinRel {
        let mut out = FinRel::empty(&self.dom, &s.cod);
        for x in 0..self.dom.len() {
            let dst = x * out.words;
            for y in self.row(x) {
                let src = &s.bits[y * s.words..(y + 1) * s.words];
                for (d, w) in out.bits[dst..dst + out.words].iter_mut().zip(src) {
                    *d |= w;
                }
            }
        }
        out
    }

    pub fn converse(&self) -> FinRel {
        let mut out = FinRel::empty(&self.cod, &self.dom);
        for (x, y) in self.pairs() {
            out.insert(y, x);
        }
        out
    }

    pub fn union(&self, other: &FinRel) -> Result<FinRel> {
        self.same_shape(other, "union")?;
        let mut out = self.clone();
        for (a, b) in out.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        Ok(out)
    }

    pub fn intersection(&self, other: &FinRel) -> Result<FinRel> {
        self.same_shape(other, "intersection")?;
        let mut out = self.clone();
        for (a, b) in out.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
        Ok(out)
    }

    /// Inclusion `self ≤ other`.
    pub fn leq(&self, other: &FinRel) -> Result<bool> {
        self.same_shape(other, "inclusion")?;
        Ok(self.leq_unchecked(other))
    }

    pub(crate) fn leq_unchecked(&self, other: &FinRel) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Same bits, ignoring carrier names (sizes must agree).
    pub(crate) fn same_bits(&self, other: &FinRel) -> bool {
        self.dom.len() == other.dom.len() && self.cod.len() == other.cod.len() && self.bits == other.bits
    }

    /// Reinterpret the matrix over other carriers of the same sizes.
    pub fn with_carriers(&self, dom: &FinSet, cod: &FinSet) -> Result<FinRel> {
        if dom.len() != self.dom.len() || cod.len() != self.cod.len() {
            return Err(Error::CarrierMismatch("with_carriers: sizes differ".into()));
        }
        Ok(FinRel {
            dom: dom.clone(),
            cod: cod.clone(),
            words: self.words,
            bits: self.bits.clone(),
        })
    }

    /// `dom r = {x | ∃y. x r y}`.
    pub fn domain(&self) -> Vec<usize> {
        (0..self.dom.len()).filter(|&x| self.row(x).next().is_some()).collect()
    }

    /// `img r = {y | ∃x. x r y}`.
    pub fn image(&self) -> Vec<usize> {
        let mut hit = vec![false; self.cod.len()];
        for (_, y) in self.pairs() {
            hit[y] = true;
        }
        (0..self.cod.len()).filter(|&y| hit[y]).collect()
    }

    /// `r ≤ r·r°·r` always holds; difunctional means the converse inclusion.
    pub fn is_difunctional(&self) -> bool {
        let back = self.compose_unchecked(&self.converse()).compose_unchecked(self);
        back.leq_unchecked(self)
    }

    /// Least difunctional relation containing `self`, by iterating
    /// `r ← r ∪ r·(r°·r)` to a fixpoint.
    pub fn difunctional_closure(&self) -> FinRel {
        let mut r = self.clone();
        loop {
            let next = r.compose_unchecked(&r.converse()).compose_unchecked(&r);
            if next.leq_unchecked(&r) {
                return r;
            }
            for (a, b) in r.bits.iter_mut().zip(&next.bits) {
                *a |= b;
            }
        }
    }

    /// Canonical tabulating span: apex is the set of related pairs in
    /// row-major order, legs are the two projections.
    pub fn tabulation(&self) -> Span {
        let pairs: Vec<(usize, usize)> = self.pairs().collect();
        let apex = FinSet::new(
            pairs
                .iter()
                .map(|&(x, y)| format!("({},{})", self.dom.name(x), self.cod.name(y))),
        )
        .unwrap_or_else(|_| FinSet::range(pairs.len()));
        Span {
            left: FinFun {
                dom: apex.clone(),
                cod: self.dom.clone(),
                table: pairs.iter().map(|p| p.0).collect(),
            },
            right: FinFun {
                dom: apex.clone(),
                cod: self.cod.clone(),
                table: pairs.iter().map(|p| p.1).collect(),
            },
            apex,
        }
    }

    /// One `x -> y` line per pair, preceded by `dom`/`cod` header lines.
    /// Element names must be free of whitespace.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        for (tag, set) in [("dom", &self.dom), ("cod", &self.cod)] {
            out.push_str(tag);
            for n in set.names() {
                if n.is_empty() || n.chars().any(char::is_whitespace) || n == "->" {
                    return Err(Error::invalid(format!(
                        "name {n:?} cannot be written in the line format"
                    )));
                }
                out.push(' ');
                out.push_str(&n);
            }
            out.push('\n');
        }
        for (x, y) in self.pairs() {
            out.push_str(&format!("{} -> {}\n", self.dom.name(x), self.cod.name(y)));
        }
        Ok(out)
    }

    /// Parses the line format; `dom`/`cod` headers are required. Blank
    /// lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<FinRel> {
        let mut dom = None;
        let mut cod = None;
        let mut pairs = Vec::new();
        let mut offset = 0;
        for line in text.lines() {
            let at = offset;
            offset += line.len() + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            match words.next() {
                Some("dom") => dom = Some(FinSet::new(words.map(str::to_owned))?),
                Some("cod") => cod = Some(FinSet::new(words.map(str::to_owned))?),
                Some(x) => match (words.next(), words.next(), words.next()) {
                    (Some("->"), Some(y), None) => pairs.push((at, x.to_owned(), y.to_owned())),
                    _ => return Err(Error::parse(at, format!("expected `x -> y`, got {line:?}"))),
                },
                None => unreachable!(),
            }
        }
        let dom = dom.ok_or_else(|| Error::parse(0, "missing `dom` header"))?;
        let cod = cod.ok_or_else(|| Error::parse(0, "missing `cod` header"))?;
        parse_pairs(&dom, &cod, pairs)
    }

    /// Parses bare `x -> y` lines against known carriers.
    pub fn parse_pairs_text(text: &str, dom: &FinSet, cod: &FinSet) -> Result<FinRel> {
        let mut pairs = Vec::new();
        let mut offset = 0;
        for line in text.lines() {
            let at = offset;
            offset += line.len() + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("dom ") || line.starts_with("cod ") {
                continue;
            }
            let mut words = line.split_whitespace();
            match (words.next(), words.next(), words.next(), words.next()) {
                (Some(x), Some("->"), Some(y), None) => pairs.push((at, x.to_owned(), y.to_owned())),
                _ => return Err(Error::parse(at, format!("expected `x -> y`, got {line:?}"))),
            }
        }
        parse_pairs(dom, cod, pairs)
    }

    pub fn to_json(&self) -> RelJson {
        RelJson {
            dom: self.dom.names(),
            cod: self.cod.names(),
            pairs: self
                .pairs()
                .map(|(x, y)| (self.dom.name(x), self.cod.name(y)))
                .collect(),
        }
    }

    pub fn from_json(json: &RelJson) -> Result<FinRel> {
        let dom = FinSet::new(json.dom.iter().cloned())?;
        let cod = FinSet::new(json.cod.iter().cloned())?;
        FinRel::from_named_pairs(&dom, &cod, json.pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
    }

    /// Named pairs, row-major; handy for assertions and reports.
    pub fn named_pairs(&self) -> Vec<(String, String)> {
        self.pairs()
            .map(|(x, y)| (self.dom.name(x), self.cod.name(y)))
            .collect()
    }
}

fn parse_pairs(dom: &FinSet, cod: &FinSet, pairs: Vec<(usize, String, String)>) -> Result<FinRel> {
    let (dl, cl) = (dom.lookup(), cod.lookup());
    let mut r = FinRel::empty(dom, cod);
    for (at, a, b) in pairs {
        let x = *dl
            .get(&a)
            .ok_or_else(|| Error::parse(at, format!("unknown domain element {a:?}")))?;
        let y = *cl
            .get(&b)
            .ok_or_else(|| Error::parse(at, format!("unknown codomain element {b:?}")))?;
        r.insert(x, y);
    }
    Ok(r)
}

impl fmt::Debug for FinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.pairs().map(|(x, y)| (self.dom.name(x), self.cod.name(y))))
            .finish()
    }
}

/// JSON form `{dom: [...], cod: [...], pairs: [[x, y], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelJson {
    pub dom: Vec<String>,
    pub cod: Vec<String>,
    pub pairs: Vec<(String, String)>,
}

impl Serialize for FinRel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinRel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = RelJson::deserialize(d)?;
        FinRel::from_json(&json).map_err(serde::de::Error::custom)
    }
}

impl Serialize for FinFun {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FinFun", 3)?;
        st.serialize_field("dom", &self.dom)?;
        st.serialize_field("cod", &self.cod)?;
        let table: Vec<String> = self.table.iter().map(|&y| self.cod.name(y)).collect();
        st.serialize_field("table", &table)?;
        st.end()
    }
}

/// A span `X ← apex → Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub apex: FinSet,
    pub left: FinFun,
    pub right: FinFun,
}

/// A cospan `X → apex ← Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cospan {
    pub apex: FinSet,
    pub left: FinFun,
    pub right: FinFun,
}

impl Span {
    pub fn new(left: FinFun, right: FinFun) -> Result<Span> {
        if left.dom != right.dom {
            return Err(Error::CarrierMismatch("span legs have different domains".into()));
        }
        Ok(Span {
            apex: left.dom.clone(),
            left,
            right,
        })
    }

    /// The composite relation `right · left°`.
    pub fn relation(&self) -> FinRel {
        self.left.graph().converse().compose_unchecked(&self.right.graph())
    }
}

impl Cospan {
    pub fn new(left: FinFun, right: FinFun) -> Result<Cospan> {
        if left.cod != right.cod {
            return Err(Error::CarrierMismatch("cospan legs have different codomains".into()));
        }
        Ok(Cospan {
            apex: left.cod.clone(),
            left,
            right,
        })
    }

    /// The difunctional relation `right° · left`: `x ~ y` iff `left(x) = right(y)`.
    pub fn relation(&self) -> FinRel {
        self.left.graph().compose_unchecked(&self.right.graph().converse())
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Pushout of a span: `X + Y` quotiented by `left(a) ~ right(a)`.
/// Classes are numbered by their least index in `X + Y`, and each apex
/// element is named `[xs|ys]` after its members.
pub fn pushout(span: &Span) -> Cospan {
    let (x, y) = (span.left.cod.clone(), span.right.cod.clone());
    let n = x.len() + y.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for a in 0..span.apex.len() {
        let (i, j) = (span.left.apply(a), x.len() + span.right.apply(a));
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let mut class_of_root = HashMap::new();
    let mut class = vec![0; n];
    let mut members: Vec<(Vec<String>, Vec<String>)> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        let c = *class_of_root.entry(root).or_insert_with(|| {
            members.push((Vec::new(), Vec::new()));
            members.len() - 1
        });
        class[i] = c;
        if i < x.len() {
            members[c].0.push(x.name(i));
        } else {
            members[c].1.push(y.name(i - x.len()));
        }
    }
    let apex = FinSet::new(
        members
            .iter()
            .map(|(l, r)| format!("[{}|{}]", l.join(","), r.join(","))),
    )
    .unwrap_or_else(|_| FinSet::range(members.len()));
    Cospan {
        left: FinFun {
            dom: x.clone(),
            cod: apex.clone(),
            table: class[..x.len()].to_vec(),
        },
        right: FinFun {
            dom: y,
            cod: apex.clone(),
            table: class[x.len()..].to_vec(),
        },
        apex,
    }
}

/// Pullback of a cospan: `{(x, y) | left(x) = right(y)}` in row-major order.
pub fn pullback(cospan: &Cospan) -> Span {
    cospan.relation().tabulation()
}

/// Whether the commuting square `span`/`cospan` is a weak pullback, i.e.
/// every pair `(x, y)` with `left(x) = right(y)` is hit by some apex element.
pub fn is_weak_pullback(cospan: &Cospan, span: &Span) -> Result<bool> {
    if span.left.cod != cospan.left.dom || span.right.cod != cospan.right.dom {
        return Err(Error::CarrierMismatch("square: span and cospan do not meet".into()));
    }
    for a in 0..span.apex.len() {
        if cospan.left.apply(span.left.apply(a)) != cospan.right.apply(span.right.apply(a)) {
            return Err(Error::invalid(format!(
                "square does not commute at apex element {}",
                span.apex.name(a)
            )));
        }
    }
    let hit = span.relation();
    Ok(cospan.relation().leq_unchecked(&hit))
}

/// Epi–mono factorisation through the image, which keeps codomain order.
pub fn image_factorization(f: &FinFun) -> (FinFun, FinFun) {
    let mut used = vec![false; f.cod.len()];
    for &y in &f.table {
        used[y] = true;
    }
    let image: Vec<usize> = (0..f.cod.len()).filter(|&y| used[y]).collect();
    let mut slot = vec![usize::MAX; f.cod.len()];
    for (i, &y) in image.iter().enumerate() {
        slot[y] = i;
    }
    let img = FinSet::new(image.iter().map(|&y| f.cod.name(y))).expect("subset of distinct names");
    let epi = FinFun {
        dom: f.dom.clone(),
        cod: img.clone(),
        table: f.table.iter().map(|&y| slot[y]).collect(),
    };
    let mono = FinFun {
        dom: img,
        cod: f.cod.clone(),
        table: image,
    };
    (epi, mono)
}
