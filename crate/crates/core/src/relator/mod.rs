//! Relators: assignments of a relation `F X ⇸ F Y` to every relation
//! `X ⇸ Y`, built from the functor grammar.
//!
//! A [`RelatorSpec`] is a description; [`RelatorSpec::prepare`] fixes a base
//! relation and yields a [`Lifting`] that answers membership queries on
//! functor values without building the whole lifted matrix. Materialising
//! the matrix is available through [`Lifting::materialize`] and
//! [`RelatorSpec::lift`].

pub mod checks;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finrel::{pushout, FinRel, FinSet, Span};
use crate::functor::{preservation_profile, FunctorExpr, MonoidTable, Value};
use crate::submonoid::{render_pairs, UCSubmonoid};

pub use checks::{
    cobarr_equals_barr_of_closure, difunctional_functoriality_check, is_lax_extension, is_normal,
    is_relational_connector, preserves_converses, sandwich_check, Counterexample, LawReport,
};

/// Upper bound on `|F X|·|F Y|` for a materialised lifting.
pub const MAX_LIFTED_CELLS: u128 = 1 << 28;

/// A relator over `functor`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RelatorSpec {
    functor: FunctorExpr,
    kind: RelatorKind,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum RelatorKind {
    /// Apply the functor to a tabulating span.
    Barr,
    /// Apply the functor to the pushout of the difunctional closure.
    CoBarr,
    /// Powerset only: `S ⇸ T` iff every element of `S` is related to some
    /// element of `T`.
    PowBox,
    /// Powerset only: every element of `T` is related to some element of `S`.
    PowDiamond,
    /// Exponential only: `f ⇸ g` iff `{(a, b) | f(a) r g(b)}` is a member.
    Submonoid(UCSubmonoid),
    SumOf(Vec<RelatorSpec>),
    ProdOf(Vec<RelatorSpec>),
    /// `CompOf(outer, inner)` lifts with `inner` and then with `outer`.
    CompOf(Box<RelatorSpec>, Box<RelatorSpec>),
    /// Lift the difunctional closure of the argument with the base relator.
    UpToDifunctional(Box<RelatorSpec>),
    Sup(Vec<RelatorSpec>),
    Inf(Vec<RelatorSpec>),
}

impl RelatorSpec {
    pub fn barr(functor: FunctorExpr) -> Self {
        RelatorSpec {
            functor,
            kind: RelatorKind::Barr,
        }
    }

    /// Refuses functors whose profile does not guarantee 1/4-iso pullback
    /// preservation.
    pub fn cobarr(functor: FunctorExpr) -> Result<Self> {
        if !preservation_profile(&functor).quarter_iso_pullbacks {
            return Err(Error::Incompatible(format!(
                "cobarr({functor}) needs a functor preserving 1/4-iso pullbacks"
            )));
        }
        Ok(RelatorSpec {
            functor,
            kind: RelatorKind::CoBarr,
        })
    }

    pub fn pow_box() -> Self {
        RelatorSpec {
            functor: FunctorExpr::Pow,
            kind: RelatorKind::PowBox,
        }
    }

    pub fn pow_diamond() -> Self {
        RelatorSpec {
            functor: FunctorExpr::Pow,
            kind: RelatorKind::PowDiamond,
        }
    }

    pub fn submonoid(submonoid: UCSubmonoid) -> Self {
        RelatorSpec {
            functor: FunctorExpr::Exp(submonoid.labels().clone()),
            kind: RelatorKind::Submonoid(submonoid),
        }
    }

    pub fn sum_of(parts: Vec<RelatorSpec>) -> Result<Self> {
        let functor = FunctorExpr::sum(parts.iter().map(|p| p.functor.clone()).collect())?;
        Ok(RelatorSpec {
            functor,
            kind: RelatorKind::SumOf(parts),
        })
    }

    pub fn prod_of(parts: Vec<RelatorSpec>) -> Result<Self> {
        let functor = FunctorExpr::prod(parts.iter().map(|p| p.functor.clone()).collect())?;
        Ok(RelatorSpec {
            functor,
            kind: RelatorKind::ProdOf(parts),
        })
    }

    pub fn comp_of(outer: RelatorSpec, inner: RelatorSpec) -> Self {
        RelatorSpec {
            functor: FunctorExpr::comp(outer.functor.clone(), inner.functor.clone()),
            kind: RelatorKind::CompOf(Box::new(outer), Box::new(inner)),
        }
    }

    pub fn up_to_difunctional(base: RelatorSpec) -> Self {
        RelatorSpec {
            functor: base.functor.clone(),
            kind: RelatorKind::UpToDifunctional(Box::new(base)),
        }
    }

    fn same_functor(parts: &[RelatorSpec], what: &str) -> Result<FunctorExpr> {
        let first = parts
            .first()
            .ok_or_else(|| Error::invalid(format!("{what} of an empty family")))?;
        if parts.iter().any(|p| p.functor != first.functor) {
            return Err(Error::Incompatible(format!("{what} of relators over different functors")));
        }
        Ok(first.functor.clone())
    }

    pub fn sup(parts: Vec<RelatorSpec>) -> Result<Self> {
        let functor = Self::same_functor(&parts, "supremum")?;
        Ok(RelatorSpec {
            functor,
            kind: RelatorKind::Sup(parts),
        })
    }

    pub fn inf(parts: Vec<RelatorSpec>) -> Result<Self> {
        let functor = Self::same_functor(&parts, "infimum")?;
        Ok(RelatorSpec {
            functor,
            kind: RelatorKind::Inf(parts),
        })
    }

    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn kind(&self) -> &RelatorKind {
        &self.kind
    }

    /// Whether `u R v` depends only on the base relation restricted to the
    /// supports of `u` and `v`, monotonically. Such relators admit the
    /// demand-driven witness search.
    pub fn is_local(&self) -> bool {
        match &self.kind {
            RelatorKind::Barr => barr_is_local(&self.functor),
            RelatorKind::CoBarr | RelatorKind::UpToDifunctional(_) => false,
            RelatorKind::PowBox | RelatorKind::PowDiamond | RelatorKind::Submonoid(_) => true,
            RelatorKind::SumOf(ps) | RelatorKind::ProdOf(ps) | RelatorKind::Sup(ps) | RelatorKind::Inf(ps) => {
                ps.iter().all(RelatorSpec::is_local)
            }
            RelatorKind::CompOf(o, i) => o.is_local() && i.is_local(),
        }
    }

    /// Fixes the base relation.
    pub fn prepare(&self, r: &FinRel) -> Result<Lifting> {
        let node = self.node(r)?;
        Ok(Lifting {
            functor: self.functor.clone(),
            base: r.clone(),
            node,
        })
    }

    /// The full lifted relation `F X ⇸ F Y`.
    pub fn lift(&self, r: &FinRel) -> Result<FinRel> {
        self.prepare(r)?.materialize()
    }

    fn node(&self, r: &FinRel) -> Result<Node> {
        Ok(match &self.kind {
            RelatorKind::Barr => barr_node(&self.functor, r)?,
            RelatorKind::CoBarr => {
                let closure = r.difunctional_closure();
                let cospan = pushout(&closure.tabulation());
                Node::CoBarr {
                    functor: self.functor.clone(),
                    p1: cospan.left.table().to_vec(),
                    p2: cospan.right.table().to_vec(),
                    nx: r.dom().len(),
                    ny: r.cod().len(),
                    no: cospan.apex.len(),
                }
            }
            RelatorKind::PowBox => Node::Box,
            RelatorKind::PowDiamond => Node::Diamond,
            RelatorKind::Submonoid(s) => Node::Submonoid {
                k: s.labels().len(),
                members: Arc::new(s.table().to_vec()),
            },
            RelatorKind::SumOf(ps) => Node::Sum(ps.iter().map(|p| p.node(r)).collect::<Result<_>>()?),
            RelatorKind::ProdOf(ps) => Node::Prod(self.prod_parts(ps, r)?),
            RelatorKind::CompOf(outer, inner) => {
                let inner_rel = inner.lift(r)?;
                Node::Rebased {
                    node: Box::new(outer.node(&inner_rel)?),
                    rel: inner_rel,
                }
            }
            RelatorKind::UpToDifunctional(base) => {
                let closure = r.difunctional_closure();
                Node::Rebased {
                    node: Box::new(base.node(&closure)?),
                    rel: closure,
                }
            }
            RelatorKind::Sup(ps) => Node::Sup(ps.iter().map(|p| p.node(r)).collect::<Result<_>>()?),
            RelatorKind::Inf(ps) => Node::Inf(ps.iter().map(|p| p.node(r)).collect::<Result<_>>()?),
        })
    }

    fn prod_parts(&self, ps: &[RelatorSpec], r: &FinRel) -> Result<Vec<Node>> {
        ps.iter().map(|p| p.node(r)).collect()
    }
}

fn barr_is_local(f: &FunctorExpr) -> bool {
    match f {
        FunctorExpr::MonoidVal(m) => m.is_positive(),
        FunctorExpr::Sum(ps) | FunctorExpr::Prod(ps) => ps.iter().all(barr_is_local),
        FunctorExpr::Comp(o, i) => barr_is_local(o) && barr_is_local(i),
        _ => true,
    }
}

/// Structural Barr lifting: equality on constants, the relation itself on
/// the identity, the Egli–Milner lifting on powersets, pointwise on
/// exponentials, weight matrices with the given marginals on monoid-valued
/// functors, and the obvious combinations for sums, products and
/// composites.
fn barr_node(f: &FunctorExpr, r: &FinRel) -> Result<Node> {
    Ok(match f {
        FunctorExpr::Const(_) => Node::Equal,
        FunctorExpr::Id => Node::Base,
        FunctorExpr::Pow => Node::EgliMilner,
        FunctorExpr::Exp(_) => Node::Pointwise,
        FunctorExpr::MonoidVal(m) => Node::Weighted(m.clone()),
        FunctorExpr::Sum(ps) => Node::Sum(ps.iter().map(|p| barr_node(p, r)).collect::<Result<_>>()?),
        FunctorExpr::Prod(ps) => Node::Prod(ps.iter().map(|p| barr_node(p, r)).collect::<Result<_>>()?),
        FunctorExpr::Comp(o, i) => {
            let inner = Lifting {
                functor: (**i).clone(),
                base: r.clone(),
                node: barr_node(i, r)?,
            }
            .materialize()?;
            Node::Rebased {
                node: Box::new(barr_node(o, &inner)?),
                rel: inner,
            }
        }
    })
}

#[derive(Clone, Debug)]
enum Node {
    Equal,
    Base,
    EgliMilner,
    Box,
    Diamond,
    Pointwise,
    Weighted(Arc<MonoidTable>),
    Submonoid {
        k: usize,
        members: Arc<Vec<bool>>,
    },
    CoBarr {
        functor: FunctorExpr,
        p1: Vec<usize>,
        p2: Vec<usize>,
        nx: usize,
        ny: usize,
        no: usize,
    },
    Sum(Vec<Node>),
    Prod(Vec<Node>),
    /// Evaluate `node` against `rel` instead of the surrounding relation.
    Rebased {
        node: std::boxed::Box<Node>,
        rel: FinRel,
    },
    Sup(Vec<Node>),
    Inf(Vec<Node>),
}

impl Node {
    fn relates(&self, r: &FinRel, u: &Value, v: &Value) -> bool {
        match (self, u, v) {
            (Node::Equal, _, _) => u == v,
            (Node::Base, Value::Elem(x), Value::Elem(y)) => r.contains(*x, *y),
            (Node::EgliMilner, Value::Set(s), Value::Set(t)) => {
                s.iter().all(|&x| t.iter().any(|&y| r.contains(x, y)))
                    && t.iter().all(|&y| s.iter().any(|&x| r.contains(x, y)))
            }
            (Node::Box, Value::Set(s), Value::Set(t)) => s.iter().all(|&x| t.iter().any(|&y| r.contains(x, y))),
            (Node::Diamond, Value::Set(s), Value::Set(t)) => t.iter().all(|&y| s.iter().any(|&x| r.contains(x, y))),
            (Node::Pointwise, Value::Func(f), Value::Func(g)) => f.iter().zip(g).all(|(&x, &y)| r.contains(x, y)),
            (Node::Weighted(m), Value::Weights(mu), Value::Weights(nu)) => weights_match(m, r, mu, nu),
            (Node::Submonoid { k, members }, Value::Func(f), Value::Func(g)) => {
                let mut code = 0u32;
                for a in 0..*k {
                    for b in 0..*k {
                        if r.contains(f[a], g[b]) {
                            code |= 1 << (a * k + b);
                        }
                    }
                }
                members[code as usize]
            }
            (
                Node::CoBarr {
                    functor,
                    p1,
                    p2,
                    nx,
                    ny,
                    no,
                },
                _,
                _,
            ) => {
                let left = functor.map_value(u, &|x| p1[x], *nx, *no);
                let right = functor.map_value(v, &|y| p2[y], *ny, *no);
                left == right
            }
            (Node::Sum(ps), Value::Tagged(i, a), Value::Tagged(j, b)) => i == j && ps[*i].relates(r, a, b),
            (Node::Prod(ps), Value::Tuple(xs), Value::Tuple(ys)) => {
                ps.iter().zip(xs.iter().zip(ys)).all(|(p, (a, b))| p.relates(r, a, b))
            }
            (Node::Rebased { node, rel }, _, _) => node.relates(rel, u, v),
            (Node::Sup(ps), _, _) => ps.iter().any(|p| p.relates(r, u, v)),
            (Node::Inf(ps), _, _) => ps.iter().all(|p| p.relates(r, u, v)),
            _ => false,
        }
    }
}

/// Is there `w : r → M` with row sums `mu` and column sums `nu`?
fn weights_match(m: &MonoidTable, r: &FinRel, mu: &[usize], nu: &[usize]) -> bool {
    let rows: Vec<Vec<usize>> = (0..mu.len()).map(|x| r.row(x).collect()).collect();
    let mut cols = vec![m.unit(); nu.len()];
    fn fill_row(
        m: &MonoidTable,
        rows: &[Vec<usize>],
        mu: &[usize],
        nu: &[usize],
        x: usize,
        pos: usize,
        acc: usize,
        cols: &mut Vec<usize>,
    ) -> bool {
        if x == rows.len() {
            return cols.as_slice() == nu;
        }
        if pos == rows[x].len() {
            return acc == mu[x] && fill_row(m, rows, mu, nu, x + 1, 0, m.unit(), cols);
        }
        let y = rows[x][pos];
        for w in 0..m.len() {
            let saved = cols[y];
            cols[y] = m.plus(saved, w);
            let ok = fill_row(m, rows, mu, nu, x, pos + 1, m.plus(acc, w), cols);
            cols[y] = saved;
            if ok {
                return true;
            }
        }
        false
    }
    fill_row(m, &rows, mu, nu, 0, 0, m.unit(), &mut cols)
}

/// A relator applied to a fixed base relation.
#[derive(Clone, Debug)]
pub struct Lifting {
    functor: FunctorExpr,
    base: FinRel,
    node: Node,
}

impl Lifting {
    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn base(&self) -> &FinRel {
        &self.base
    }

    /// `u (R r) v` for `u ∈ F X`, `v ∈ F Y`.
    pub fn relates(&self, u: &Value, v: &Value) -> bool {
        self.node.relates(&self.base, u, v)
    }

    /// Membership by rank in the canonical enumerations.
    pub fn relates_rank(&self, i: usize, j: usize) -> bool {
        let u = self.functor.decode(self.base.dom().len(), i);
        let v = self.functor.decode(self.base.cod().len(), j);
        self.relates(&u, &v)
    }

    /// The whole relation `F X ⇸ F Y`.
    pub fn materialize(&self) -> Result<FinRel> {
        let (nx, ny) = (self.base.dom().len(), self.base.cod().len());
        let (cx, cy) = (self.functor.card(nx)?, self.functor.card(ny)?);
        let cells = cx as u128 * cy as u128;
        if cells > MAX_LIFTED_CELLS {
            return Err(Error::SizeBound {
                cardinality: cells,
                bound: MAX_LIFTED_CELLS,
            });
        }
        let fx = self.functor.apply_obj(self.base.dom())?;
        let fy = self.functor.apply_obj(self.base.cod())?;
        let us: Vec<Value> = self.functor.values(nx)?.collect();
        let vs: Vec<Value> = self.functor.values(ny)?.collect();
        let mut out = FinRel::empty(&fx, &fy);
        for (i, u) in us.iter().enumerate() {
            for (j, v) in vs.iter().enumerate() {
                if self.relates(u, v) {
                    out.insert(i, j);
                }
            }
        }
        Ok(out)
    }
}

/// Barr lifting through an arbitrary span: `{(F l (w), F r (w)) | w ∈ F P}`.
pub fn barr_via_span(f: &FunctorExpr, span: &Span) -> Result<FinRel> {
    let (nx, ny) = (span.left.cod().len(), span.right.cod().len());
    let q1 = f.map_table(span.left.table(), nx)?;
    let q2 = f.map_table(span.right.table(), ny)?;
    let mut out = FinRel::empty(&f.apply_obj(span.left.cod())?, &f.apply_obj(span.right.cod())?);
    for (&a, &b) in q1.iter().zip(&q2) {
        out.insert(a, b);
    }
    Ok(out)
}

/// Barr lifting computed from the canonical tabulation.
pub fn barr_generic(f: &FunctorExpr, r: &FinRel) -> Result<FinRel> {
    barr_via_span(f, &r.tabulation())
}

/// coBarr lifting computed directly from the pushout of the closure's
/// tabulation: `u ⇸ v` iff `F p₁ (u) = F p₂ (v)`.
pub fn cobarr_generic(f: &FunctorExpr, r: &FinRel) -> Result<FinRel> {
    let cospan = pushout(&r.difunctional_closure().tabulation());
    let no = cospan.apex.len();
    let q1 = f.map_table(cospan.left.table(), no)?;
    let q2 = f.map_table(cospan.right.table(), no)?;
    let mut by_image: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for (j, &k) in q2.iter().enumerate() {
        by_image.entry(k).or_default().push(j);
    }
    let mut out = FinRel::empty(&f.apply_obj(r.dom())?, &f.apply_obj(r.cod())?);
    for (i, k) in q1.iter().enumerate() {
        for &j in by_image.get(k).map(Vec::as_slice).unwrap_or(&[]) {
            out.insert(i, j);
        }
    }
    Ok(out)
}

impl fmt::Display for RelatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, ps: &[RelatorSpec]| {
            write!(f, "{name}(")?;
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")
        };
        match &self.kind {
            RelatorKind::Barr => write!(f, "barr({})", self.functor),
            RelatorKind::CoBarr => write!(f, "cobarr({})", self.functor),
            RelatorKind::PowBox => write!(f, "box(Pow)"),
            RelatorKind::PowDiamond => write!(f, "diamond(Pow)"),
            RelatorKind::Submonoid(s) => {
                let gens: Vec<String> = s.generators().iter().map(render_pairs).collect();
                write!(f, "submon({}; gens: [{}])", self.functor, gens.join(", "))
            }
            RelatorKind::SumOf(ps) => list(f, "sum", ps),
            RelatorKind::ProdOf(ps) => list(f, "prod", ps),
            RelatorKind::CompOf(o, i) => write!(f, "comp({o}, {i})"),
            RelatorKind::UpToDifunctional(b) => write!(f, "upto-difun({b})"),
            RelatorKind::Sup(ps) => list(f, "sup", ps),
            RelatorKind::Inf(ps) => list(f, "inf", ps),
        }
    }
}

/// Carrier sizes `0..=max` paired with anonymous sets, used by the checkers.
pub(crate) fn carriers(max: usize) -> Vec<FinSet> {
    (0..=max).map(FinSet::range).collect()
}
