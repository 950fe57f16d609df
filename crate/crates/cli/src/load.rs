use std::path::Path;

use relcoalg::bisim::CoalgebraJson;
use relcoalg::finrel::RelJson;
use relcoalg::{parse_relator, twisted_relator, Coalgebra, Error, FinRel, FinSet, FunctorExpr, Lts, RelatorSpec, Result, TwistedSpec};

/// A loaded system: a coalgebra, plus the LTS it came from if any.
#[derive(Clone, Debug)]
pub struct System {
    pub coalgebra: Coalgebra,
    pub lts: Option<Lts>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

/// Coalgebra JSON (an object with a `functor` field), LTS JSON or the LTS
/// line format. Systems with more than `max_states` states are refused.
pub fn load_system(path: &Path, max_states: usize) -> Result<System> {
    let text = read(path)?;
    let json: Option<serde_json::Value> = if text.trim_start().starts_with('{') {
        Some(serde_json::from_str(&text)?)
    } else {
        None
    };
    let system = match json {
        Some(v) if v.get("functor").is_some() => {
            let cj: CoalgebraJson = serde_json::from_value(v)?;
            System {
                coalgebra: Coalgebra::from_json(&cj)?,
                lts: None,
            }
        }
        _ => {
            let lts = Lts::load(&text)?;
            if lts.len() > max_states {
                return Err(Error::SizeBound {
                    cardinality: lts.len() as u128,
                    bound: max_states as u128,
                });
            }
            System {
                coalgebra: lts.to_coalgebra()?,
                lts: Some(lts),
            }
        }
    };
    if system.coalgebra.len() > max_states {
        return Err(Error::SizeBound {
            cardinality: system.coalgebra.len() as u128,
            bound: max_states as u128,
        });
    }
    Ok(system)
}

/// JSON `{dom, cod, pairs}` or `x -> y` lines, read against the given
/// carriers. Carriers named in the file must match them.
pub fn load_relation(path: &Path, dom: &FinSet, cod: &FinSet) -> Result<FinRel> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let json: RelJson = serde_json::from_str(&text)?;
        if FinSet::new(json.dom.iter().cloned())? != *dom || FinSet::new(json.cod.iter().cloned())? != *cod {
            return Err(Error::CarrierMismatch("relation carriers differ from the state sets".into()));
        }
        return FinRel::from_named_pairs(dom, cod, json.pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())));
    }
    FinRel::parse_pairs_text(&text, dom, cod)
}

/// The label set `A` of a functor `Exp(A) . Pow`.
pub fn lts_labels(f: &FunctorExpr) -> Option<&FinSet> {
    match f {
        FunctorExpr::Comp(outer, inner) if **inner == FunctorExpr::Pow => match &**outer {
            FunctorExpr::Exp(a) => Some(a),
            _ => None,
        },
        _ => None,
    }
}

/// Resolves `--relator` against the functor of the loaded systems.
pub fn resolve_relator(text: Option<&str>, functor: &FunctorExpr) -> Result<RelatorSpec> {
    let twisted = |top: bool| {
        let labels = lts_labels(functor)
            .ok_or_else(|| Error::Incompatible(format!("twisted relators need Exp(A) . Pow, not {functor}")))?;
        let spec = if top { TwistedSpec::top(labels)? } else { TwistedSpec::bottom(labels)? };
        Ok::<_, Error>(twisted_relator(&spec))
    };
    let spec = match text.map(str::trim) {
        None | Some("barr") => RelatorSpec::barr(functor.clone()),
        Some("cobarr") => RelatorSpec::cobarr(functor.clone())?,
        Some("upto-difun") => RelatorSpec::up_to_difunctional(RelatorSpec::barr(functor.clone())),
        Some("twisted") | Some("twisted-top") => twisted(true)?,
        Some("twisted-bottom") => twisted(false)?,
        Some(src) => parse_relator(src)?,
    };
    if spec.functor() != functor {
        return Err(Error::Incompatible(format!(
            "relator {spec} is over {}, the systems over {functor}",
            spec.functor()
        )));
    }
    Ok(spec)
}
