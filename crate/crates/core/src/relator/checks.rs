//! Exhaustive law checkers for relators on small carriers.
//!
//! Every checker walks all relations (and functions, where the law needs
//! them) between the sets `{0..n-1}` with `n ≤ max_size` and reports the
//! number of cases, the number of failures and the first failure as a
//! concrete certificate.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use serde::Serialize;

use super::{carriers, RelatorSpec};
use crate::error::{Error, Result};
use crate::finrel::{FinFun, FinRel, RelJson};
use crate::functor::{preservation_profile, FunctorExpr};

/// A failing instance of a law, with every relation involved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub law: String,
    /// Named inputs, e.g. `r`, `s`, `f`.
    pub inputs: Vec<(String, RelJson)>,
    /// A pair of functor values on which the two sides disagree.
    pub witness: Option<(String, String)>,
    pub detail: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.law, self.detail)?;
        for (name, rel) in &self.inputs {
            let pairs: Vec<String> = rel.pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
            write!(f, "; {name} = {{{}}}", pairs.join(","))?;
        }
        if let Some((u, v)) = &self.witness {
            write!(f, "; at ({u}, {v})")?;
        }
        Ok(())
    }
}

/// Outcome of a law check.
#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub law: String,
    pub relator: String,
    pub max_size: usize,
    pub cases: u64,
    pub failures: u64,
    /// Failures in which every relation involved (and, for composition,
    /// the composite) is non-empty.
    pub nonempty_failures: u64,
    pub counterexample: Option<Counterexample>,
}

impl LawReport {
    fn new(law: &str, spec: &RelatorSpec, max_size: usize) -> Self {
        LawReport {
            law: law.to_owned(),
            relator: spec.to_string(),
            max_size,
            cases: 0,
            failures: 0,
            nonempty_failures: 0,
            counterexample: None,
        }
    }

    pub fn holds(&self) -> bool {
        self.failures == 0
    }

    /// Whether every failure involves an empty relation.
    pub fn fails_only_on_empty(&self) -> bool {
        self.failures > 0 && self.nonempty_failures == 0
    }

    fn record(&mut self, ok: bool, nonempty: bool, cx: impl FnOnce() -> Counterexample) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if nonempty {
                self.nonempty_failures += 1;
            }
            if self.counterexample.is_none() || (nonempty && self.nonempty_failures == 1) {
                self.counterexample = Some(cx());
            }
        }
    }

    fn merge(mut self, other: LawReport) -> LawReport {
        self.cases += other.cases;
        self.failures += other.failures;
        self.nonempty_failures += other.nonempty_failures;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
        self
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} for {} (sizes <= {}): {} cases, {} failures ({} non-empty)",
            self.law, self.relator, self.max_size, self.cases, self.failures, self.nonempty_failures
        )?;
        if let Some(cx) = &self.counterexample {
            write!(f, "\n  counterexample: {cx}")?;
        }
        Ok(())
    }
}

/// Lifts memoised by carrier sizes and relation code.
struct LiftCache<'a> {
    spec: &'a RelatorSpec,
    map: HashMap<(usize, usize, u64), Rc<FinRel>>,
}

impl<'a> LiftCache<'a> {
    fn new(spec: &'a RelatorSpec) -> Self {
        LiftCache {
            spec,
            map: HashMap::new(),
        }
    }

    fn get(&mut self, r: &FinRel) -> Result<Rc<FinRel>> {
        let key = (r.dom().len(), r.cod().len(), r.code());
        if let Some(hit) = self.map.get(&key) {
            return Ok(hit.clone());
        }
        let lifted = Rc::new(self.spec.lift(r)?);
        self.map.insert(key, lifted.clone());
        Ok(lifted)
    }
}

/// First pair in `a` but not in `b`, rendered.
fn excess(a: &FinRel, b: &FinRel) -> Option<(String, String)> {
    a.pairs()
        .find(|&(x, y)| !b.contains(x, y))
        .map(|(x, y)| (a.dom().name(x), a.cod().name(y)))
}

/// First pair on which `a` and `b` differ.
fn difference(a: &FinRel, b: &FinRel) -> Option<(String, String)> {
    excess(a, b).or_else(|| excess(b, a))
}

fn check_size(max_size: usize) -> Result<()> {
    if max_size > 4 {
        return Err(Error::invalid("law checks are exhaustive; carriers are limited to size 4"));
    }
    Ok(())
}

fn input(name: &str, r: &FinRel) -> (String, RelJson) {
    (name.to_owned(), r.to_json())
}

/// `R 1_X = 1_{F X}` for every `|X| ≤ max_size`.
pub fn is_normal(spec: &RelatorSpec, max_size: usize) -> Result<LawReport> {
    check_size(max_size)?;
    let mut report = LawReport::new("normality", spec, max_size);
    for x in carriers(max_size) {
        let id = FinRel::identity(&x);
        let lifted = spec.lift(&id)?;
        let expect = FinRel::identity(lifted.dom());
        let ok = lifted == expect;
        report.record(ok, !x.is_empty(), || Counterexample {
            law: "normality".into(),
            inputs: vec![input("r", &id)],
            witness: difference(&lifted, &expect),
            detail: format!("lift of the identity on a {}-element set is not the identity", x.len()),
        });
    }
    Ok(report)
}

/// Monotonicity, `F f ≤ R f`, `(F f)° ≤ R (f°)` and `R r ; R s ≤ R (r ; s)`
/// on all carriers up to `max_size`.
pub fn is_lax_extension(spec: &RelatorSpec, max_size: usize) -> Result<LawReport> {
    check_size(max_size)?;
    let f = spec.functor().clone();
    let sets = carriers(max_size);
    let mut cache = LiftCache::new(spec);
    let mut report = LawReport::new("lax extension", spec, max_size);

    for x in &sets {
        for y in &sets {
            for r in FinRel::all(x, y) {
                let lr = cache.get(&r)?;
                for (a, b) in (0..x.len()).flat_map(|a| (0..y.len()).map(move |b| (a, b))) {
                    if r.contains(a, b) {
                        continue;
                    }
                    let mut bigger = r.clone();
                    bigger.insert(a, b);
                    let lb = cache.get(&bigger)?;
                    let ok = lr.leq_unchecked(&lb);
                    report.record(ok, !r.is_empty(), || Counterexample {
                        law: "monotonicity".into(),
                        inputs: vec![input("r", &r), input("r'", &bigger)],
                        witness: excess(&lr, &lb),
                        detail: "R r is not contained in R r' although r <= r'".into(),
                    });
                }
            }
            for func in FinFun::all(x, y) {
                let g = func.graph();
                let fg = f.apply_map(&func)?.graph();
                let lg = cache.get(&g)?;
                let ok = fg.leq_unchecked(&lg);
                report.record(ok, !g.is_empty(), || Counterexample {
                    law: "extends functions".into(),
                    inputs: vec![input("f", &g)],
                    witness: excess(&fg, &lg),
                    detail: "F f is not contained in R f".into(),
                });
                let gc = g.converse();
                let lgc = cache.get(&gc)?;
                let fgc = fg.converse();
                let ok = fgc.leq_unchecked(&lgc);
                report.record(ok, !g.is_empty(), || Counterexample {
                    law: "extends converse functions".into(),
                    inputs: vec![input("f", &g)],
                    witness: excess(&fgc, &lgc),
                    detail: "(F f)° is not contained in R (f°)".into(),
                });
            }
        }
    }

    for x in &sets {
        for y in &sets {
            for z in &sets {
                let rs: Vec<FinRel> = FinRel::all(x, y).collect();
                let ss: Vec<FinRel> = FinRel::all(y, z).collect();
                let lrs = rs.iter().map(|r| cache.get(r)).collect::<Result<Vec<_>>>()?;
                let lss = ss.iter().map(|s| cache.get(s)).collect::<Result<Vec<_>>>()?;
                for (r, lr) in rs.iter().zip(&lrs) {
                    for (s, ls) in ss.iter().zip(&lss) {
                        let rs_comp = r.compose_unchecked(s);
                        let lhs = lr.compose_unchecked(ls);
                        let rhs = cache.get(&rs_comp)?;
                        let ok = lhs.leq_unchecked(&rhs);
                        report.record(ok, !rs_comp.is_empty(), || Counterexample {
                            law: "lax composition".into(),
                            inputs: vec![input("r", r), input("s", s)],
                            witness: excess(&lhs, &rhs),
                            detail: "R r ; R s is not contained in R (r ; s)".into(),
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Naturality `R (f ; r ; g°) = F f ; R r ; (F g)°` and `1 ≤ R 1`.
pub fn is_relational_connector(spec: &RelatorSpec, max_size: usize) -> Result<LawReport> {
    check_size(max_size)?;
    let f = spec.functor().clone();
    let sets = carriers(max_size);
    let mut cache = LiftCache::new(spec);
    let mut report = LawReport::new("relational connector", spec, max_size);
    for x in &sets {
        let id = FinRel::identity(x);
        let lid = cache.get(&id)?;
        let fid = FinRel::identity(lid.dom());
        let ok = fid.leq_unchecked(&lid);
        report.record(ok, !x.is_empty(), || Counterexample {
            law: "unit".into(),
            inputs: vec![input("r", &id)],
            witness: excess(&fid, &lid),
            detail: "the identity on F X is not below R of the identity".into(),
        });
    }
    for x in &sets {
        for y in &sets {
            let rels: Vec<FinRel> = FinRel::all(x, y).collect();
            for x2 in &sets {
                let fs: Vec<FinFun> = FinFun::all(x2, x).collect();
                for y2 in &sets {
                    let gs: Vec<FinFun> = FinFun::all(y2, y).collect();
                    for ff in &fs {
                        let fgraph = ff.graph();
                        let flift = f.apply_map(ff)?.graph();
                        for gg in &gs {
                            let gconv = gg.graph().converse();
                            let glift_conv = f.apply_map(gg)?.graph().converse();
                            for r in &rels {
                                let inner = fgraph.compose_unchecked(r).compose_unchecked(&gconv);
                                let lhs = cache.get(&inner)?;
                                let lr = cache.get(r)?;
                                let rhs = flift.compose_unchecked(&lr).compose_unchecked(&glift_conv);
                                let ok = lhs.same_bits(&rhs);
                                report.record(ok, !r.is_empty(), || Counterexample {
                                    law: "naturality".into(),
                                    inputs: vec![input("f", &fgraph), input("r", r), input("g", &gg.graph())],
                                    witness: difference(&lhs, &rhs),
                                    detail: "R (f ; r ; g°) differs from F f ; R r ; (F g)°".into(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// `R (r°) = (R r)°`.
pub fn preserves_converses(spec: &RelatorSpec, max_size: usize) -> Result<LawReport> {
    check_size(max_size)?;
    let sets = carriers(max_size);
    let mut cache = LiftCache::new(spec);
    let mut report = LawReport::new("converse preservation", spec, max_size);
    for x in &sets {
        for y in &sets {
            for r in FinRel::all(x, y) {
                let rc = r.converse();
                let lhs = cache.get(&rc)?;
                let rhs = cache.get(&r)?.converse();
                let ok = lhs.same_bits(&rhs);
                report.record(ok, !r.is_empty(), || Counterexample {
                    law: "converse preservation".into(),
                    inputs: vec![input("r", &r)],
                    witness: difference(&rhs, &lhs),
                    detail: "R (r°) differs from (R r)°".into(),
                });
            }
        }
    }
    Ok(report)
}

/// `R (f ; g°) = F f ; (F g)°` for all cospans `X → A ← Y`.
pub fn difunctional_functoriality_check(spec: &RelatorSpec, max_size: usize) -> Result<LawReport> {
    check_size(max_size)?;
    let func = spec.functor().clone();
    let sets = carriers(max_size);
    let mut cache = LiftCache::new(spec);
    let mut report = LawReport::new("difunctional functoriality", spec, max_size);
    for a in &sets {
        for x in &sets {
            for y in &sets {
                let gs: Vec<FinFun> = FinFun::all(y, a).collect();
                for f in FinFun::all(x, a) {
                    let ff = func.apply_map(&f)?.graph();
                    for g in &gs {
                        let r = f.graph().compose_unchecked(&g.graph().converse());
                        let lhs = cache.get(&r)?;
                        let rhs = ff.compose_unchecked(&func.apply_map(g)?.graph().converse());
                        let ok = lhs.same_bits(&rhs);
                        report.record(ok, !r.is_empty(), || Counterexample {
                            law: "difunctional functoriality".into(),
                            inputs: vec![input("f", &f.graph()), input("g", &g.graph())],
                            witness: difference(&lhs, &rhs),
                            detail: "R (f ; g°) differs from F f ; (F g)°".into(),
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// coBarr of `r` equals Barr of the difunctional closure of `r`.
pub fn cobarr_equals_barr_of_closure(f: &FunctorExpr, max_size: usize) -> Result<LawReport> {
    check_size(max_size)?;
    if !preservation_profile(f).weak_pullbacks {
        return Err(Error::Incompatible(format!(
            "{f} is not known to preserve weak pullbacks"
        )));
    }
    let cobarr = RelatorSpec::cobarr(f.clone())?;
    let barr = RelatorSpec::barr(f.clone());
    let sets = carriers(max_size);
    let mut report = LawReport::new("coBarr equals Barr of the closure", &cobarr, max_size);
    for x in &sets {
        for y in &sets {
            for r in FinRel::all(x, y) {
                let lhs = cobarr.lift(&r)?;
                let rhs = barr.lift(&r.difunctional_closure())?;
                let ok = lhs == rhs;
                report.record(ok, !r.is_empty(), || Counterexample {
                    law: "coBarr equals Barr of the closure".into(),
                    inputs: vec![input("r", &r)],
                    witness: difference(&lhs, &rhs),
                    detail: "coBarr lift differs from Barr lift of the difunctional closure".into(),
                });
            }
        }
    }
    Ok(report)
}

/// `Barr r ≤ R r ≤ coBarr r` for every relation on carriers up to
/// `max_size`.
pub fn sandwich_check(spec: &RelatorSpec, max_size: usize) -> Result<LawReport> {
    check_size(max_size)?;
    let barr = RelatorSpec::barr(spec.functor().clone());
    let cobarr = RelatorSpec::cobarr(spec.functor().clone())?;
    let sets = carriers(max_size);
    let mut lower = LawReport::new("Barr below", spec, max_size);
    let mut upper = LawReport::new("below coBarr", spec, max_size);
    for x in &sets {
        for y in &sets {
            for r in FinRel::all(x, y) {
                let mid = spec.lift(&r)?;
                let lo = barr.lift(&r)?;
                let hi = cobarr.lift(&r)?;
                lower.record(lo.leq_unchecked(&mid), !r.is_empty(), || Counterexample {
                    law: "Barr below".into(),
                    inputs: vec![input("r", &r)],
                    witness: excess(&lo, &mid),
                    detail: "Barr lift is not contained in the relator's lift".into(),
                });
                upper.record(mid.leq_unchecked(&hi), !r.is_empty(), || Counterexample {
                    law: "below coBarr".into(),
                    inputs: vec![input("r", &r)],
                    witness: excess(&mid, &hi),
                    detail: "the relator's lift is not contained in the coBarr lift".into(),
                });
            }
        }
    }
    let mut report = lower.merge(upper);
    report.law = "sandwich".into();
    Ok(report)
}
