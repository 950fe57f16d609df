//! Finite commutative monoids given by their addition table.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finrel::FinSet;

/// A finite commutative monoid `(M, +, 0)`.
///
/// The laws are verified exhaustively when the table is built, so every
/// value of this type is a genuine commutative monoid.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MonoidTable {
    name: String,
    carrier: FinSet,
    unit: usize,
    add: Vec<usize>,
}

/// On-disk form of a monoid table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonoidJson {
    #[serde(default)]
    pub name: Option<String>,
    pub elements: Vec<String>,
    pub unit: String,
    /// `add[i][j]` is the name of `elements[i] + elements[j]`.
    pub add: Vec<Vec<String>>,
}

impl MonoidTable {
    pub fn new(name: impl Into<String>, carrier: FinSet, unit: usize, add: Vec<usize>) -> Result<Self> {
        let n = carrier.len();
        let name = name.into();
        if n == 0 {
            return Err(Error::invalid(format!("monoid {name}: carrier is empty")));
        }
        if unit >= n || add.len() != n * n || add.iter().any(|&v| v >= n) {
            return Err(Error::invalid(format!("monoid {name}: malformed table")));
        }
        let m = MonoidTable {
            name,
            carrier,
            unit,
            add,
        };
        for a in 0..n {
            if m.plus(m.unit, a) != a {
                return Err(Error::invalid(format!(
                    "monoid {}: {} is not neutral for {}",
                    m.name,
                    m.carrier.name(unit),
                    m.carrier.name(a)
                )));
            }
            for b in 0..n {
                if m.plus(a, b) != m.plus(b, a) {
                    return Err(Error::invalid(format!(
                        "monoid {}: addition not commutative at ({}, {})",
                        m.name,
                        m.carrier.name(a),
                        m.carrier.name(b)
                    )));
                }
                for c in 0..n {
                    if m.plus(m.plus(a, b), c) != m.plus(a, m.plus(b, c)) {
                        return Err(Error::invalid(format!(
                            "monoid {}: addition not associative at ({}, {}, {})",
                            m.name,
                            m.carrier.name(a),
                            m.carrier.name(b),
                            m.carrier.name(c)
                        )));
                    }
                }
            }
        }
        Ok(m)
    }

    /// Integers modulo `n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        let add = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        Self::new(format!("Z{n}"), FinSet::range(n), 0, add)
    }

    /// `{0, ..., cap}` with addition truncated at `cap`.
    pub fn capped(cap: usize) -> Result<Self> {
        let n = cap + 1;
        let add = (0..n * n).map(|k| (k / n + k % n).min(cap)).collect();
        Self::new(format!("N{cap}"), FinSet::range(n), 0, add)
    }

    /// Booleans under disjunction.
    pub fn boolean() -> Self {
        let carrier = FinSet::new(["0", "1"]).expect("distinct");
        Self::new("Bool", carrier, 0, vec![0, 1, 1, 1]).expect("disjunction is a monoid")
    }

    /// Resolves `Z<n>`, `N<cap>` and `Bool`.
    pub fn builtin(name: &str) -> Option<Self> {
        if name == "Bool" {
            return Some(Self::boolean());
        }
        let (head, digits) = name.split_at(1.min(name.len()));
        let k: usize = digits.parse().ok()?;
        match head {
            "Z" if k >= 1 => Self::cyclic(k).ok(),
            "N" => Self::capped(k).ok(),
            _ => None,
        }
    }

    pub fn from_json(json: &MonoidJson) -> Result<Self> {
        let carrier = FinSet::new(json.elements.iter().cloned())?;
        let look = |s: &str| {
            carrier
                .index_of(s)
                .ok_or_else(|| Error::invalid(format!("monoid table mentions unknown element {s:?}")))
        };
        let unit = look(&json.unit)?;
        let n = carrier.len();
        if json.add.len() != n || json.add.iter().any(|row| row.len() != n) {
            return Err(Error::invalid(format!("monoid table must be {n}x{n}")));
        }
        let mut add = Vec::with_capacity(n * n);
        for row in &json.add {
            for cell in row {
                add.push(look(cell)?);
            }
        }
        let name = json.name.clone().unwrap_or_else(|| "M".to_owned());
        Self::new(name, carrier, unit, add)
    }

    pub fn to_json(&self) -> MonoidJson {
        let n = self.len();
        MonoidJson {
            name: Some(self.name.clone()),
            elements: self.carrier.names(),
            unit: self.carrier.name(self.unit),
            add: (0..n)
                .map(|a| (0..n).map(|b| self.carrier.name(self.plus(a, b))).collect())
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn carrier(&self) -> &FinSet {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    #[inline]
    pub fn plus(&self, a: usize, b: usize) -> usize {
        self.add[a * self.carrier.len() + b]
    }

    pub fn sum<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items.into_iter().fold(self.unit, |acc, m| self.plus(acc, m))
    }

    /// `m + n = 0` only when `m = n = 0`.
    pub fn is_positive(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| (0..n).all(|b| self.plus(a, b) != self.unit || (a == self.unit && b == self.unit)))
    }

    /// Whether every equation `a + b = c + d` has a 2×2 refinement
    /// `x11 + x12 = a`, `x21 + x22 = b`, `x11 + x21 = c`, `x12 + x22 = d`.
    pub fn is_refinable(&self) -> bool {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                let s = self.plus(a, b);
                for c in 0..n {
                    for d in 0..n {
                        if self.plus(c, d) != s {
                            continue;
                        }
                        let found = (0..n).any(|x11| {
                            (0..n).any(|x12| {
                                self.plus(x11, x12) == a
                                    && (0..n).any(|x21| {
                                        self.plus(x11, x21) == c
                                            && (0..n).any(|x22| {
                                                self.plus(x21, x22) == b && self.plus(x12, x22) == d
                                            })
                                    })
                            })
                        });
                        if !found {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

impl fmt::Debug for MonoidTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonoidTable({}, {} elements)", self.name, self.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_resolve() {
        assert_eq!(MonoidTable::builtin("Z2").unwrap().len(), 2);
        assert_eq!(MonoidTable::builtin("N2").unwrap().len(), 3);
        assert!(MonoidTable::builtin("Bool").is_some());
        assert!(MonoidTable::builtin("Q3").is_none());
        assert!(MonoidTable::builtin("Z0").is_none());
    }

    #[test]
    fn positivity() {
        assert!(MonoidTable::capped(2).unwrap().is_positive());
        assert!(!MonoidTable::cyclic(2).unwrap().is_positive());
        assert!(MonoidTable::cyclic(1).unwrap().is_positive());
        assert!(MonoidTable::boolean().is_positive());
    }

    #[test]
    fn refinement() {
        assert!(MonoidTable::boolean().is_refinable());
        assert!(MonoidTable::cyclic(2).unwrap().is_refinable());
    }

    #[test]
    fn broken_tables_are_rejected() {
        let two = FinSet::range(2);
        // 0 is not neutral
        assert!(MonoidTable::new("bad", two.clone(), 0, vec![1, 0, 0, 1]).is_err());
        // not commutative
        assert!(MonoidTable::new("bad", two.clone(), 0, vec![0, 1, 0, 1]).is_err());
        let three = FinSet::range(3);
        // 0 neutral, commutative, but (1+1)+2 = 0+2 = 2 while 1+(1+2) = 1+1 = 0
        let add = vec![0, 1, 2, 1, 0, 1, 2, 1, 2];
        assert!(MonoidTable::new("bad", three, 0, add).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let m = MonoidTable::capped(3).unwrap();
        let back = MonoidTable::from_json(&m.to_json()).unwrap();
        assert_eq!(back.to_json().add, m.to_json().add);
        assert_eq!(back.name(), "N3");
    }
}
