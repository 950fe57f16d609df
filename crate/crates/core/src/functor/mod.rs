//! A small grammar of finitary set functors and their action on finite
//! sets and maps.
//!
//! Every functor enumerates `F X` in a fixed canonical order, so an element
//! of `F X` is identified by its *rank* in that enumeration:
//!
//! | node        | enumeration of `F X`                                          |
//! |-------------|---------------------------------------------------------------|
//! | `Const(C)`  | `C`                                                           |
//! | `Id`        | `X`                                                           |
//! | `Pow`       | subsets, binary counter (bit `i` = element `i`)               |
//! | `Exp(A)`    | maps `A → X`, base-`|X|` counter, first label least significant |
//! | `Sum`       | summands in list order                                        |
//! | `Prod`      | tuples, row-major (last component fastest)                    |
//! | `Comp(F,G)` | `F` applied to the enumeration of `G X`                       |
//! | `MonoidVal` | maps `X → M`, base-`|M|` counter, first element least significant |
//!
//! Values of a composite `F . G` are `F`-values whose leaves are ranks in
//! `G X`.

pub mod monoid;
pub mod profile;

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::{json, Map, Value as Json};

use crate::error::{Error, Result};
use crate::finrel::{FinFun, FinSet};

pub use monoid::{MonoidJson, MonoidTable};
pub use profile::{check_pullback_preservation, preservation_profile, PreservationProfile, PreservationReport, SquareCounterexample};

static CARD_BOUND: AtomicU64 = AtomicU64::new(1_000_000);

/// Largest `|F X|` any evaluation may materialise.
pub fn cardinality_bound() -> u64 {
    CARD_BOUND.load(Ordering::Relaxed)
}

pub fn set_cardinality_bound(bound: u64) {
    CARD_BOUND.store(bound.max(1), Ordering::Relaxed);
}

/// A term of the functor grammar.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum FunctorExpr {
    Const(FinSet),
    Id,
    Pow,
    Exp(FinSet),
    Sum(Vec<FunctorExpr>),
    Prod(Vec<FunctorExpr>),
    /// `Comp(outer, inner)` is `outer ∘ inner`.
    Comp(Box<FunctorExpr>, Box<FunctorExpr>),
    MonoidVal(Arc<MonoidTable>),
}

/// An element of `F X`, structured by the functor that produced it.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Value {
    Const(usize),
    Elem(usize),
    /// Sorted, duplicate free.
    Set(Vec<usize>),
    /// One entry per label of the exponent.
    Func(Vec<usize>),
    /// One monoid element per base element.
    Weights(Vec<usize>),
    Tagged(usize, Box<Value>),
    Tuple(Vec<Value>),
}

fn sat_pow(base: u128, exp: u128) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = match acc.checked_mul(base) {
            Some(v) => v,
            None => return u128::MAX,
        };
        if acc == 0 {
            return 0;
        }
    }
    acc
}

impl FunctorExpr {
    pub fn constant(set: FinSet) -> Self {
        FunctorExpr::Const(set)
    }

    /// The constant functor on `{0, ..., n-1}`.
    pub fn numeral(n: usize) -> Self {
        FunctorExpr::Const(FinSet::range(n))
    }

    pub fn exp(labels: FinSet) -> Self {
        FunctorExpr::Exp(labels)
    }

    pub fn sum(parts: Vec<FunctorExpr>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("a sum needs at least one summand"));
        }
        Ok(FunctorExpr::Sum(parts))
    }

    pub fn prod(parts: Vec<FunctorExpr>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("a product needs at least one factor"));
        }
        Ok(FunctorExpr::Prod(parts))
    }

    pub fn comp(outer: FunctorExpr, inner: FunctorExpr) -> Self {
        FunctorExpr::Comp(Box::new(outer), Box::new(inner))
    }

    pub fn monoid(m: MonoidTable) -> Self {
        FunctorExpr::MonoidVal(Arc::new(m))
    }

    /// Checks the structural invariants (non-empty sums and products).
    pub fn validate(&self) -> Result<()> {
        match self {
            FunctorExpr::Sum(ps) | FunctorExpr::Prod(ps) => {
                if ps.is_empty() {
                    return Err(Error::invalid("empty sum or product in functor"));
                }
                ps.iter().try_for_each(FunctorExpr::validate)
            }
            FunctorExpr::Comp(o, i) => {
                o.validate()?;
                i.validate()
            }
            _ => Ok(()),
        }
    }

    /// `|F X|` for `|X| = n`, saturating at `u128::MAX`.
    pub fn cardinality(&self, n: u128) -> u128 {
        match self {
            FunctorExpr::Const(c) => c.len() as u128,
            FunctorExpr::Id => n,
            FunctorExpr::Pow => sat_pow(2, n),
            FunctorExpr::Exp(a) => sat_pow(n, a.len() as u128),
            FunctorExpr::MonoidVal(m) => sat_pow(m.len() as u128, n),
            FunctorExpr::Sum(ps) => ps
                .iter()
                .fold(0u128, |acc, p| acc.saturating_add(p.cardinality(n))),
            FunctorExpr::Prod(ps) => ps
                .iter()
                .fold(1u128, |acc, p| acc.saturating_mul(p.cardinality(n))),
            FunctorExpr::Comp(o, i) => o.cardinality(i.cardinality(n)),
        }
    }

    /// `|F X|`, refusing anything above the configured bound.
    pub fn card(&self, n: usize) -> Result<usize> {
        if let FunctorExpr::Comp(_, i) = self {
            i.card(n)?;
        }
        let c = self.cardinality(n as u128);
        let bound = cardinality_bound() as u128;
        if c > bound {
            return Err(Error::SizeBound {
                cardinality: c,
                bound,
            });
        }
        Ok(c as usize)
    }

    /// The value of rank `rank` in `F X`, `|X| = n`.
    pub fn decode(&self, n: usize, rank: usize) -> Value {
        match self {
            FunctorExpr::Const(_) => Value::Const(rank),
            FunctorExpr::Id => Value::Elem(rank),
            FunctorExpr::Pow => Value::Set((0..n).filter(|&i| rank >> i & 1 == 1).collect()),
            FunctorExpr::Exp(a) => Value::Func(digits(rank, n, a.len())),
            FunctorExpr::MonoidVal(m) => Value::Weights(digits(rank, m.len(), n)),
            FunctorExpr::Sum(ps) => {
                let mut r = rank;
                for (k, p) in ps.iter().enumerate() {
                    let c = p.cardinality(n as u128) as usize;
                    if r < c {
                        return Value::Tagged(k, Box::new(p.decode(n, r)));
                    }
                    r -= c;
                }
                panic!("rank {rank} out of range for sum functor")
            }
            FunctorExpr::Prod(ps) => {
                let mut r = rank;
                let mut parts = vec![Value::Const(0); ps.len()];
                for (k, p) in ps.iter().enumerate().rev() {
                    let c = p.cardinality(n as u128) as usize;
                    parts[k] = p.decode(n, r % c);
                    r /= c;
                }
                Value::Tuple(parts)
            }
            FunctorExpr::Comp(o, i) => o.decode(i.cardinality(n as u128) as usize, rank),
        }
    }

    /// Rank of `v` in `F X`, `|X| = n`.
    pub fn encode(&self, n: usize, v: &Value) -> Result<usize> {
        let bad = || Error::invalid(format!("value {v:?} does not belong to {self}"));
        Ok(match (self, v) {
            (FunctorExpr::Const(c), Value::Const(i)) if *i < c.len() => *i,
            (FunctorExpr::Id, Value::Elem(i)) if *i < n => *i,
            (FunctorExpr::Pow, Value::Set(s)) if s.iter().all(|&i| i < n) => {
                s.iter().fold(0usize, |acc, &i| acc | 1 << i)
            }
            (FunctorExpr::Exp(a), Value::Func(f)) if f.len() == a.len() && f.iter().all(|&i| i < n) => {
                undigits(f, n)
            }
            (FunctorExpr::MonoidVal(m), Value::Weights(w)) if w.len() == n && w.iter().all(|&i| i < m.len()) => {
                undigits(w, m.len())
            }
            (FunctorExpr::Sum(ps), Value::Tagged(k, inner)) if *k < ps.len() => {
                let offset: usize = ps[..*k].iter().map(|p| p.cardinality(n as u128) as usize).sum();
                offset + ps[*k].encode(n, inner)?
            }
            (FunctorExpr::Prod(ps), Value::Tuple(parts)) if parts.len() == ps.len() => {
                let mut r = 0usize;
                for (p, part) in ps.iter().zip(parts) {
                    r = r * p.cardinality(n as u128) as usize + p.encode(n, part)?;
                }
                r
            }
            (FunctorExpr::Comp(o, i), _) => o.encode(i.cardinality(n as u128) as usize, v)?,
            _ => return Err(bad()),
        })
    }

    /// All values of `F X` in rank order.
    pub fn values(&self, n: usize) -> Result<impl Iterator<Item = Value> + '_> {
        let c = self.card(n)?;
        Ok((0..c).map(move |r| self.decode(n, r)))
    }

    /// `F f` applied to one value; `f` maps base indices and the base
    /// carriers have sizes `n_dom` and `n_cod`.
    pub fn map_value(&self, v: &Value, f: &dyn Fn(usize) -> usize, n_dom: usize, n_cod: usize) -> Value {
        match (self, v) {
            (FunctorExpr::Const(_), Value::Const(i)) => Value::Const(*i),
            (FunctorExpr::Id, Value::Elem(i)) => Value::Elem(f(*i)),
            (FunctorExpr::Pow, Value::Set(s)) => {
                let mut out: Vec<usize> = s.iter().map(|&i| f(i)).collect();
                out.sort_unstable();
                out.dedup();
                Value::Set(out)
            }
            (FunctorExpr::Exp(_), Value::Func(g)) => Value::Func(g.iter().map(|&i| f(i)).collect()),
            (FunctorExpr::MonoidVal(m), Value::Weights(w)) => {
                let mut out = vec![m.unit(); n_cod];
                for (x, &wx) in w.iter().enumerate() {
                    let y = f(x);
                    out[y] = m.plus(out[y], wx);
                }
                Value::Weights(out)
            }
            (FunctorExpr::Sum(ps), Value::Tagged(k, inner)) => {
                Value::Tagged(*k, Box::new(ps[*k].map_value(inner, f, n_dom, n_cod)))
            }
            (FunctorExpr::Prod(ps), Value::Tuple(parts)) => Value::Tuple(
                ps.iter()
                    .zip(parts)
                    .map(|(p, part)| p.map_value(part, f, n_dom, n_cod))
                    .collect(),
            ),
            (FunctorExpr::Comp(o, i), _) => {
                let leaf = |r: usize| {
                    let mapped = i.map_value(&i.decode(n_dom, r), f, n_dom, n_cod);
                    i.encode(n_cod, &mapped).expect("mapped value stays in range")
                };
                let (id, ic) = (
                    i.cardinality(n_dom as u128) as usize,
                    i.cardinality(n_cod as u128) as usize,
                );
                o.map_value(v, &leaf, id, ic)
            }
            _ => panic!("value {v:?} does not belong to {self}"),
        }
    }

    /// The full table of `F f : F X → F Y` for `f` given as a table into a
    /// set of size `n_cod`.
    pub fn map_table(&self, f: &[usize], n_cod: usize) -> Result<Vec<usize>> {
        let n_dom = f.len();
        match self {
            FunctorExpr::Comp(o, i) => {
                let inner = i.map_table(f, n_cod)?;
                o.map_table(&inner, i.card(n_cod)?)
            }
            FunctorExpr::Pow => {
                let c = self.card(n_dom)?;
                self.card(n_cod)?;
                let mut table = vec![0usize; c];
                for rank in 1..c {
                    let low = rank.trailing_zeros() as usize;
                    table[rank] = table[rank & (rank - 1)] | 1 << f[low];
                }
                Ok(table)
            }
            FunctorExpr::Id => Ok(f.to_vec()),
            _ => {
                let c = self.card(n_dom)?;
                self.card(n_cod)?;
                let g = |i: usize| f[i];
                (0..c)
                    .map(|r| self.encode(n_cod, &self.map_value(&self.decode(n_dom, r), &g, n_dom, n_cod)))
                    .collect()
            }
        }
    }

    /// `F X`, with elements named by their rendering.
    pub fn apply_obj(&self, base: &FinSet) -> Result<FinSet> {
        let card = self.card(base.len())?;
        if let FunctorExpr::Comp(o, i) = self {
            return o.apply_obj(&i.apply_obj(base)?);
        }
        if let FunctorExpr::Id = self {
            return Ok(base.clone());
        }
        let key = (self.clone(), base.clone());
        if let Some(hit) = obj_cache().lock().expect("cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let names: Vec<String> = (0..card).map(|r| self.render(base, &self.decode(base.len(), r))).collect();
        let set = FinSet::new(names).unwrap_or_else(|_| FinSet::range(card));
        let mut cache = obj_cache().lock().expect("cache poisoned");
        if cache.len() >= 512 {
            cache.clear();
        }
        cache.insert(key, set.clone());
        Ok(set)
    }

    /// `F f : F X → F Y`.
    pub fn apply_map(&self, f: &FinFun) -> Result<FinFun> {
        let table = self.map_table(f.table(), f.cod().len())?;
        FinFun::new(self.apply_obj(f.dom())?, self.apply_obj(f.cod())?, table)
    }

    /// Human readable rendering of a value over `base`.
    pub fn render(&self, base: &FinSet, v: &Value) -> String {
        match (self, v) {
            (FunctorExpr::Const(c), Value::Const(i)) => c.name(*i),
            (FunctorExpr::Id, Value::Elem(i)) => base.name(*i),
            (FunctorExpr::Pow, Value::Set(s)) => {
                let items: Vec<String> = s.iter().map(|&i| base.name(i)).collect();
                format!("{{{}}}", items.join(","))
            }
            (FunctorExpr::Exp(a), Value::Func(g)) => {
                let items: Vec<String> = g
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| format!("{}:{}", a.name(k), base.name(i)))
                    .collect();
                format!("[{}]", items.join(","))
            }
            (FunctorExpr::MonoidVal(m), Value::Weights(w)) => {
                let items: Vec<String> = w
                    .iter()
                    .enumerate()
                    .filter(|(_, &wx)| wx != m.unit())
                    .map(|(x, &wx)| format!("{}:{}", base.name(x), m.carrier().name(wx)))
                    .collect();
                format!("<{}>", items.join(","))
            }
            (FunctorExpr::Sum(ps), Value::Tagged(k, inner)) => {
                format!("inj{k}({})", ps[*k].render(base, inner))
            }
            (FunctorExpr::Prod(ps), Value::Tuple(parts)) => {
                let items: Vec<String> = ps.iter().zip(parts).map(|(p, x)| p.render(base, x)).collect();
                format!("({})", items.join(","))
            }
            (FunctorExpr::Comp(o, i), _) => match i.apply_obj(base) {
                Ok(inner) => o.render(&inner, v),
                Err(_) => format!("{v:?}"),
            },
            _ => format!("{v:?}"),
        }
    }

    /// Base elements occurring in `v` (its support), sorted.
    pub fn leaves(&self, n: usize, v: &Value) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(n, v, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_leaves(&self, n: usize, v: &Value, out: &mut Vec<usize>) {
        match (self, v) {
            (FunctorExpr::Id, Value::Elem(i)) => out.push(*i),
            (FunctorExpr::Pow, Value::Set(s)) => out.extend(s),
            (FunctorExpr::Exp(_), Value::Func(g)) => out.extend(g),
            (FunctorExpr::MonoidVal(m), Value::Weights(w)) => {
                out.extend(w.iter().enumerate().filter(|(_, &wx)| wx != m.unit()).map(|(x, _)| x))
            }
            (FunctorExpr::Sum(ps), Value::Tagged(k, inner)) => ps[*k].collect_leaves(n, inner, out),
            (FunctorExpr::Prod(ps), Value::Tuple(parts)) => {
                for (p, x) in ps.iter().zip(parts) {
                    p.collect_leaves(n, x, out);
                }
            }
            (FunctorExpr::Comp(o, i), _) => {
                let inner_n = i.cardinality(n as u128) as usize;
                for r in o.leaves(inner_n, v) {
                    i.collect_leaves(n, &i.decode(n, r), out);
                }
            }
            _ => {}
        }
    }

    /// Whether any `MonoidVal` node occurs in the term.
    pub fn mentions_monoid(&self) -> bool {
        match self {
            FunctorExpr::MonoidVal(_) => true,
            FunctorExpr::Sum(ps) | FunctorExpr::Prod(ps) => ps.iter().any(FunctorExpr::mentions_monoid),
            FunctorExpr::Comp(o, i) => o.mentions_monoid() || i.mentions_monoid(),
            _ => false,
        }
    }

    /// Parses a JSON literal denoting an element of `F X`.
    ///
    /// Subsets are arrays, maps out of an exponent are objects keyed by
    /// label, sums are `{"tag": k, "value": ...}`, tuples are arrays and
    /// monoid values are objects from base elements to monoid elements
    /// (absent entries are zero).
    pub fn parse_literal(&self, base: &FinSet, lit: &Json) -> Result<Value> {
        let leaf = |j: &Json| -> Result<usize> {
            let name = j
                .as_str()
                .ok_or_else(|| Error::invalid(format!("expected an element name, got {j}")))?;
            base.index_of(name)
                .ok_or_else(|| Error::invalid(format!("unknown element {name:?}")))
        };
        self.parse_with(base.len(), lit, &leaf)
    }

    fn parse_with(&self, n: usize, lit: &Json, leaf: &dyn Fn(&Json) -> Result<usize>) -> Result<Value> {
        let shape = |what: &str| Error::invalid(format!("expected {what} for {self}, got {lit}"));
        match self {
            FunctorExpr::Const(c) => {
                let number;
                let name = match lit {
                    Json::Number(k) => {
                        number = k.to_string();
                        number.as_str()
                    }
                    _ => lit.as_str().ok_or_else(|| shape("a constant name"))?,
                };
                c.index_of(name)
                    .map(Value::Const)
                    .ok_or_else(|| Error::invalid(format!("unknown constant {name:?}")))
            }
            FunctorExpr::Id => Ok(Value::Elem(leaf(lit)?)),
            FunctorExpr::Pow => {
                let items = lit.as_array().ok_or_else(|| shape("an array"))?;
                let mut s = items.iter().map(leaf).collect::<Result<Vec<_>>>()?;
                s.sort_unstable();
                s.dedup();
                Ok(Value::Set(s))
            }
            FunctorExpr::Exp(a) => {
                let obj = lit.as_object().ok_or_else(|| shape("an object keyed by label"))?;
                if obj.len() != a.len() {
                    return Err(shape("an object with one entry per label"));
                }
                let mut g = Vec::with_capacity(a.len());
                for k in 0..a.len() {
                    let entry = obj
                        .get(&a.name(k))
                        .ok_or_else(|| Error::invalid(format!("missing label {:?}", a.name(k))))?;
                    g.push(leaf(entry)?);
                }
                Ok(Value::Func(g))
            }
            FunctorExpr::MonoidVal(m) => {
                let obj = lit.as_object().ok_or_else(|| shape("an object of weights"))?;
                let mut w = vec![m.unit(); n];
                for (k, val) in obj {
                    let x = leaf(&Json::String(k.clone()))?;
                    let name = val.as_str().map(str::to_owned).unwrap_or_else(|| val.to_string());
                    w[x] = m
                        .carrier()
                        .index_of(&name)
                        .ok_or_else(|| Error::invalid(format!("unknown monoid element {name:?}")))?;
                }
                Ok(Value::Weights(w))
            }
            FunctorExpr::Sum(ps) => {
                let obj = lit.as_object().ok_or_else(|| shape("{tag, value}"))?;
                let tag = obj
                    .get("tag")
                    .and_then(Json::as_u64)
                    .ok_or_else(|| shape("{tag, value}"))? as usize;
                let inner = obj.get("value").ok_or_else(|| shape("{tag, value}"))?;
                let p = ps
                    .get(tag)
                    .ok_or_else(|| Error::invalid(format!("tag {tag} out of range")))?;
                Ok(Value::Tagged(tag, Box::new(p.parse_with(n, inner, leaf)?)))
            }
            FunctorExpr::Prod(ps) => {
                let items = lit.as_array().ok_or_else(|| shape("an array"))?;
                if items.len() != ps.len() {
                    return Err(shape("a tuple of matching length"));
                }
                Ok(Value::Tuple(
                    ps.iter()
                        .zip(items)
                        .map(|(p, x)| p.parse_with(n, x, leaf))
                        .collect::<Result<_>>()?,
                ))
            }
            FunctorExpr::Comp(o, i) => {
                let inner_leaf = |j: &Json| -> Result<usize> {
                    let v = i.parse_with(n, j, leaf)?;
                    i.encode(n, &v)
                };
                o.parse_with(i.card(n)?, lit, &inner_leaf)
            }
        }
    }

    /// Inverse of [`FunctorExpr::parse_literal`].
    pub fn to_literal(&self, base: &FinSet, v: &Value) -> Json {
        let leaf = |i: usize| Json::String(base.name(i));
        self.literal_with(base.len(), v, &leaf)
    }

    fn literal_with(&self, n: usize, v: &Value, leaf: &dyn Fn(usize) -> Json) -> Json {
        match (self, v) {
            (FunctorExpr::Const(c), Value::Const(i)) => Json::String(c.name(*i)),
            (FunctorExpr::Id, Value::Elem(i)) => leaf(*i),
            (FunctorExpr::Pow, Value::Set(s)) => Json::Array(s.iter().map(|&i| leaf(i)).collect()),
            (FunctorExpr::Exp(a), Value::Func(g)) => {
                Json::Object(g.iter().enumerate().map(|(k, &i)| (a.name(k), leaf(i))).collect::<Map<_, _>>())
            }
            (FunctorExpr::MonoidVal(m), Value::Weights(w)) => Json::Object(
                w.iter()
                    .enumerate()
                    .filter(|(_, &wx)| wx != m.unit())
                    .map(|(x, &wx)| {
                        let key = leaf(x).as_str().map(str::to_owned).unwrap_or_default();
                        (key, Json::String(m.carrier().name(wx)))
                    })
                    .collect::<Map<_, _>>(),
            ),
            (FunctorExpr::Sum(ps), Value::Tagged(k, inner)) => {
                json!({"tag": k, "value": ps[*k].literal_with(n, inner, leaf)})
            }
            (FunctorExpr::Prod(ps), Value::Tuple(parts)) => {
                Json::Array(ps.iter().zip(parts).map(|(p, x)| p.literal_with(n, x, leaf)).collect())
            }
            (FunctorExpr::Comp(o, i), _) => {
                let inner_leaf = |r: usize| i.literal_with(n, &i.decode(n, r), leaf);
                o.literal_with(i.cardinality(n as u128) as usize, v, &inner_leaf)
            }
            _ => Json::Null,
        }
    }
}

fn digits(mut rank: usize, base: usize, count: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(rank % base.max(1));
        rank /= base.max(1);
    }
    out
}

fn undigits(ds: &[usize], base: usize) -> usize {
    ds.iter().rev().fold(0, |acc, &d| acc * base + d)
}

type ObjCache = Mutex<HashMap<(FunctorExpr, FinSet), FinSet>>;

fn obj_cache() -> &'static ObjCache {
    static CACHE: OnceLock<ObjCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn is_numeral(set: &FinSet) -> bool {
    (0..set.len()).all(|i| set.name(i) == i.to_string())
}

fn fmt_set(f: &mut fmt::Formatter<'_>, set: &FinSet) -> fmt::Result {
    write!(f, "{{{}}}", set.names().join(","))
}

impl FunctorExpr {
    fn precedence(&self) -> u8 {
        match self {
            FunctorExpr::Sum(ps) if ps.len() > 1 => 0,
            FunctorExpr::Prod(ps) if ps.len() > 1 => 1,
            FunctorExpr::Comp(..) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            FunctorExpr::Const(c) if is_numeral(c) && !c.is_empty() => write!(f, "{}", c.len()),
            FunctorExpr::Const(c) => {
                write!(f, "C")?;
                fmt_set(f, c)
            }
            FunctorExpr::Id => write!(f, "Id"),
            FunctorExpr::Pow => write!(f, "Pow"),
            FunctorExpr::Exp(a) => {
                write!(f, "Exp")?;
                fmt_set(f, a)
            }
            FunctorExpr::MonoidVal(m) => write!(f, "MVal({})", m.name()),
            FunctorExpr::Sum(ps) | FunctorExpr::Prod(ps) if ps.len() == 1 => ps[0].fmt_at(f, min),
            FunctorExpr::Sum(ps) => {
                for (k, p) in ps.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    p.fmt_at(f, 1)?;
                }
                Ok(())
            }
            FunctorExpr::Prod(ps) => {
                for (k, p) in ps.iter().enumerate() {
                    if k > 0 {
                        write!(f, " * ")?;
                    }
                    p.fmt_at(f, 2)?;
                }
                Ok(())
            }
            FunctorExpr::Comp(o, i) => {
                o.fmt_at(f, 3)?;
                write!(f, " . ")?;
                i.fmt_at(f, 2)
            }
        }
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// An element of `F X` together with the functor and base it lives over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorValue {
    pub functor: FunctorExpr,
    pub base: FinSet,
    pub index: usize,
}

impl FunctorValue {
    pub fn new(functor: FunctorExpr, base: FinSet, index: usize) -> Result<Self> {
        let card = functor.card(base.len())?;
        if index >= card {
            return Err(Error::invalid(format!("index {index} outside F X of size {card}")));
        }
        Ok(FunctorValue { functor, base, index })
    }

    pub fn from_value(functor: FunctorExpr, base: FinSet, value: &Value) -> Result<Self> {
        let index = functor.encode(base.len(), value)?;
        Self::new(functor, base, index)
    }

    pub fn value(&self) -> Value {
        self.functor.decode(self.base.len(), self.index)
    }
}

impl fmt::Display for FunctorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.functor.render(&self.base, &self.value()))
    }
}
