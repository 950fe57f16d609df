//! Pullback preservation: a structural rule table and an exhaustive checker
//! that validates it on small squares.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::FunctorExpr;
use crate::error::{Error, Result};

/// Which pullback shapes a functor preserves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PreservationProfile {
    pub weak_pullbacks: bool,
    pub inverse_images: bool,
    pub quarter_iso_pullbacks: bool,
    pub empty_intersections: bool,
}

impl PreservationProfile {
    const ALL: PreservationProfile = PreservationProfile {
        weak_pullbacks: true,
        inverse_images: true,
        quarter_iso_pullbacks: true,
        empty_intersections: true,
    };

    fn and(self, other: Self) -> Self {
        PreservationProfile {
            weak_pullbacks: self.weak_pullbacks && other.weak_pullbacks,
            inverse_images: self.inverse_images && other.inverse_images,
            quarter_iso_pullbacks: self.quarter_iso_pullbacks && other.quarter_iso_pullbacks,
            empty_intersections: self.empty_intersections && other.empty_intersections,
        }
    }
}

/// Profile derived from the term structure.
///
/// Constants, identity, powerset and exponentials preserve every shape
/// tracked here; sums, products and composites preserve what all their
/// parts preserve. A monoid-valued functor preserves inverse images and
/// 1/4-iso pullbacks exactly when the monoid is positive, and weak pullbacks
/// when it is moreover refinable. The table is conservative for degenerate
/// terms such as a product with an empty constant.
pub fn preservation_profile(f: &FunctorExpr) -> PreservationProfile {
    match f {
        FunctorExpr::Const(_) | FunctorExpr::Id | FunctorExpr::Pow | FunctorExpr::Exp(_) => PreservationProfile::ALL,
        FunctorExpr::Sum(ps) | FunctorExpr::Prod(ps) => ps
            .iter()
            .map(preservation_profile)
            .fold(PreservationProfile::ALL, PreservationProfile::and),
        FunctorExpr::Comp(o, i) => preservation_profile(o).and(preservation_profile(i)),
        FunctorExpr::MonoidVal(m) => {
            let positive = m.is_positive();
            PreservationProfile {
                weak_pullbacks: positive && m.is_refinable(),
                inverse_images: positive,
                quarter_iso_pullbacks: positive,
                empty_intersections: true,
            }
        }
    }
}

/// A pullback square `X --h--> Y <--g-- B` whose image under the functor
/// is not a (weak) pullback.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareCounterexample {
    pub x_size: usize,
    pub y_size: usize,
    pub b_size: usize,
    pub h: Vec<usize>,
    pub g: Vec<usize>,
    /// Size of `F P` for the pullback `P`.
    pub apex_image: usize,
    /// Number of pairs in the pullback of `F h` and `F g`.
    pub pullback_pairs: usize,
    /// Number of those pairs reached from `F P`.
    pub reached: usize,
}

/// Outcome of [`check_pullback_preservation`].
#[derive(Clone, Debug, Serialize)]
pub struct PreservationReport {
    pub functor: String,
    pub max_size: usize,
    pub squares: usize,
    pub weak_pullbacks: Option<SquareCounterexample>,
    pub inverse_images: Option<SquareCounterexample>,
    pub quarter_iso_pullbacks: Option<SquareCounterexample>,
    pub empty_intersections: Option<SquareCounterexample>,
}

impl PreservationReport {
    /// The profile witnessed by the squares that were checked.
    pub fn observed(&self) -> PreservationProfile {
        PreservationProfile {
            weak_pullbacks: self.weak_pullbacks.is_none(),
            inverse_images: self.inverse_images.is_none(),
            quarter_iso_pullbacks: self.quarter_iso_pullbacks.is_none(),
            empty_intersections: self.empty_intersections.is_none(),
        }
    }

    pub fn passes(&self) -> bool {
        self.observed() == PreservationProfile::ALL
    }
}

fn all_tables(n_dom: usize, n_cod: usize) -> Vec<Vec<usize>> {
    let total = if n_dom == 0 {
        1
    } else if n_cod == 0 {
        0
    } else {
        n_cod.pow(n_dom as u32)
    };
    (0..total)
        .map(|mut code| {
            (0..n_dom)
                .map(|_| {
                    let d = code % n_cod;
                    code /= n_cod;
                    d
                })
                .collect()
        })
        .collect()
}

fn injective(t: &[usize]) -> bool {
    let set: HashSet<_> = t.iter().collect();
    set.len() == t.len()
}

/// Applies `F` to every pullback square `X → Y ← B` with all three
/// carriers of size at most `max_size` and records, for each tracked shape,
/// the first square whose image fails to be a pullback (bijective
/// comparison map) or, for general squares, a weak pullback (surjective
/// comparison map).
///
/// Shapes: inverse images have `g` injective; 1/4-iso squares have the
/// projection `P → X` bijective; empty intersections have `h`, `g`
/// injective with disjoint images.
pub fn check_pullback_preservation(f: &FunctorExpr, max_size: usize) -> Result<PreservationReport> {
    if max_size > 4 {
        return Err(Error::invalid("pullback preservation is checked for carriers of size at most 4"));
    }
    let mut report = PreservationReport {
        functor: f.to_string(),
        max_size,
        squares: 0,
        weak_pullbacks: None,
        inverse_images: None,
        quarter_iso_pullbacks: None,
        empty_intersections: None,
    };
    for ny in 0..=max_size {
        let fy = f.card(ny)?;
        for nx in 0..=max_size {
            let hs = all_tables(nx, ny);
            let fx = f.card(nx)?;
            for nb in 0..=max_size {
                let gs = all_tables(nb, ny);
                let fb = f.card(nb)?;
                for h in &hs {
                    let th = f.map_table(h, ny)?;
                    for g in &gs {
                        report.squares += 1;
                        let pairs: Vec<(usize, usize)> = (0..nx)
                            .flat_map(|x| (0..nb).filter(move |&b| h[x] == g[b]).map(move |b| (x, b)))
                            .collect();
                        let inverse_image = injective(g);
                        let mut hit = vec![0usize; nx];
                        for &(x, _) in &pairs {
                            hit[x] += 1;
                        }
                        let quarter_iso = hit.iter().all(|&c| c == 1);
                        let empty_meet = pairs.is_empty() && injective(h) && injective(g);
                        let needs_weak = report.weak_pullbacks.is_none();
                        let needs_ii = inverse_image && report.inverse_images.is_none();
                        let needs_qi = quarter_iso && report.quarter_iso_pullbacks.is_none();
                        let needs_ei = empty_meet && report.empty_intersections.is_none();
                        if !(needs_weak || needs_ii || needs_qi || needs_ei) {
                            continue;
                        }
                        let tg = f.map_table(g, ny)?;
                        let p1: Vec<usize> = pairs.iter().map(|p| p.0).collect();
                        let p2: Vec<usize> = pairs.iter().map(|p| p.1).collect();
                        let q1 = f.map_table(&p1, nx)?;
                        let q2 = f.map_table(&p2, nb)?;
                        let mut count_x: HashMap<usize, usize> = HashMap::new();
                        for &k in &th {
                            *count_x.entry(k).or_default() += 1;
                        }
                        let mut count_b = vec![0usize; fy];
                        for &k in &tg {
                            count_b[k] += 1;
                        }
                        let total: usize = count_x.iter().map(|(&k, &c)| c * count_b[k]).sum();
                        let reached: HashSet<(usize, usize)> = q1.iter().copied().zip(q2.iter().copied()).collect();
                        debug_assert!(fx > 0 || total == 0);
                        debug_assert!(fb > 0 || total == 0);
                        let surjective = reached.len() == total;
                        let bijective = surjective && reached.len() == q1.len();
                        let cx = || SquareCounterexample {
                            x_size: nx,
                            y_size: ny,
                            b_size: nb,
                            h: h.clone(),
                            g: g.clone(),
                            apex_image: q1.len(),
                            pullback_pairs: total,
                            reached: reached.len(),
                        };
                        if needs_weak && !surjective {
                            report.weak_pullbacks = Some(cx());
                        }
                        if needs_ii && !bijective {
                            report.inverse_images = Some(cx());
                        }
                        if needs_qi && !bijective {
                            report.quarter_iso_pullbacks = Some(cx());
                        }
                        if needs_ei && !bijective {
                            report.empty_intersections = Some(cx());
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finrel::FinSet;
    use crate::functor::MonoidTable;

    #[test]
    fn rule_table_examples() {
        let exp = FunctorExpr::exp(FinSet::new(["a", "b"]).unwrap());
        assert_eq!(preservation_profile(&exp), PreservationProfile::ALL);
        let z2 = FunctorExpr::monoid(MonoidTable::cyclic(2).unwrap());
        assert!(!preservation_profile(&z2).inverse_images);
        assert!(preservation_profile(&FunctorExpr::Pow).weak_pullbacks);
    }

    #[test]
    fn pow_passes_at_size_two() {
        assert!(check_pullback_preservation(&FunctorExpr::Pow, 2).unwrap().passes());
    }

    #[test]
    fn constant_passes() {
        let c = FunctorExpr::numeral(3);
        assert!(check_pullback_preservation(&c, 3).unwrap().passes());
    }

    #[test]
    fn z2_inverse_image_counterexample() {
        let z2 = FunctorExpr::monoid(MonoidTable::cyclic(2).unwrap());
        let report = check_pullback_preservation(&z2, 3).unwrap();
        let cx = report.inverse_images.expect("Z2 breaks inverse images");
        assert!(injective(&cx.g));
        assert!(cx.reached < cx.pullback_pairs);
        assert!(report.quarter_iso_pullbacks.is_some());
        assert!(report.empty_intersections.is_none());
    }

    #[test]
    fn oversized_request_is_refused() {
        assert!(check_pullback_preservation(&FunctorExpr::Id, 5).is_err());
    }
}
