//! Surface syntax for functors and relators.
//!
//! Functors:
//!
//! ```text
//! F ::= F + F | F * F | F . F | ( F ) | n | C{a,b} | Id | Pow | Exp{a,b} | MVal(name)
//! ```
//!
//! `.` binds tighter than `*`, which binds tighter than `+`; a numeral `n`
//! is the constant functor on `{0, ..., n-1}`. `MVal(name)` names a
//! built-in monoid (`Z<n>`, `N<cap>`, `Bool`) or a JSON table file.
//!
//! Relators:
//!
//! ```text
//! R ::= barr(F) | cobarr(F) | box(Pow) | diamond(Pow)
//!     | submon(Exp{a,b}; gens: G)
//!     | comp(R, R) | sum(R, ...) | prod(R, ...) | sup(R, ...) | inf(R, ...)
//!     | upto-difun(R)
//! G ::= [(a,b), ...]            a single generator
//!     | [[(a,b), ...], ...]     several generators
//! ```

use crate::error::{Error, Result};
use crate::finrel::{FinRel, FinSet};
use crate::functor::{FunctorExpr, MonoidJson, MonoidTable};
use crate::relator::RelatorSpec;
use crate::submonoid::UCSubmonoid;

/// Resolves the argument of `MVal(...)`.
pub type MonoidResolver<'a> = &'a dyn Fn(&str) -> Result<MonoidTable>;

/// Built-in names first, then a JSON table file of that path.
pub fn default_monoid_resolver(name: &str) -> Result<MonoidTable> {
    if let Some(m) = MonoidTable::builtin(name) {
        return Ok(m);
    }
    let text = std::fs::read_to_string(name)
        .map_err(|e| Error::invalid(format!("monoid {name:?} is neither built in nor a readable file: {e}")))?;
    let json: MonoidJson = serde_json::from_str(&text)?;
    MonoidTable::from_json(&json)
}

pub fn parse_functor(src: &str) -> Result<FunctorExpr> {
    parse_functor_with(src, &default_monoid_resolver)
}

pub fn parse_functor_with(src: &str, resolver: MonoidResolver<'_>) -> Result<FunctorExpr> {
    let mut p = Parser::new(src, resolver);
    let f = p.functor()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_relator(src: &str) -> Result<RelatorSpec> {
    parse_relator_with(src, &default_monoid_resolver)
}

pub fn parse_relator_with(src: &str, resolver: MonoidResolver<'_>) -> Result<RelatorSpec> {
    let mut p = Parser::new(src, resolver);
    let r = p.relator()?;
    p.finish()?;
    Ok(r)
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '∗' | '#' | '~' | '-' | '@')
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    resolver: MonoidResolver<'a>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, resolver: MonoidResolver<'a>) -> Self {
        Parser { src, pos: 0, resolver }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.pos, msg))
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.err(format!("expected `{c}`, found `{found}`")),
                None => self.err(format!("expected `{c}`, found end of input")),
            }
        }
    }

    fn name(&mut self) -> Result<String> {
        self.skip_ws();
        let len: usize = self
            .rest()
            .chars()
            .take_while(|&c| is_name_char(c))
            .map(char::len_utf8)
            .sum();
        if len == 0 {
            return self.err("expected a name");
        }
        let name = self.rest()[..len].to_owned();
        self.pos += len;
        Ok(name)
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected `{c}` after the expression")),
        }
    }

    fn set(&mut self) -> Result<FinSet> {
        let at = self.pos;
        self.expect('{')?;
        let mut names = Vec::new();
        if !self.eat('}') {
            loop {
                names.push(self.name()?);
                if self.eat('}') {
                    break;
                }
                self.expect(',')?;
            }
        }
        FinSet::new(names).map_err(|e| Error::parse(at, e.to_string()))
    }

    fn functor(&mut self) -> Result<FunctorExpr> {
        let mut parts = vec![self.product()?];
        while self.eat('+') {
            parts.push(self.product()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            FunctorExpr::Sum(parts)
        })
    }

    fn product(&mut self) -> Result<FunctorExpr> {
        let mut parts = vec![self.composite()?];
        while self.eat('*') {
            parts.push(self.composite()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            FunctorExpr::Prod(parts)
        })
    }

    fn composite(&mut self) -> Result<FunctorExpr> {
        let outer = self.atom()?;
        if self.eat('.') {
            let inner = self.composite()?;
            return Ok(FunctorExpr::comp(outer, inner));
        }
        Ok(outer)
    }

    fn atom(&mut self) -> Result<FunctorExpr> {
        if self.eat('(') {
            let f = self.functor()?;
            self.expect(')')?;
            return Ok(f);
        }
        let at = self.pos;
        let word = self.name()?;
        match word.as_str() {
            "Id" => Ok(FunctorExpr::Id),
            "Pow" => Ok(FunctorExpr::Pow),
            "C" => Ok(FunctorExpr::Const(self.set()?)),
            "Exp" => Ok(FunctorExpr::Exp(self.set()?)),
            "MVal" => {
                self.expect('(')?;
                self.skip_ws();
                let end = self
                    .rest()
                    .find(')')
                    .ok_or_else(|| Error::parse(self.pos, "unterminated MVal(...)"))?;
                let arg = self.rest()[..end].trim().to_owned();
                let arg_at = self.pos;
                self.pos += end + 1;
                let m = (self.resolver)(&arg).map_err(|e| Error::parse(arg_at, e.to_string()))?;
                Ok(FunctorExpr::monoid(m))
            }
            w if w.chars().all(|c| c.is_ascii_digit()) => {
                let n: usize = w.parse().map_err(|_| Error::parse(at, "numeral out of range"))?;
                Ok(FunctorExpr::numeral(n))
            }
            w => Err(Error::parse(at, format!("unknown functor `{w}`"))),
        }
    }

    fn relator(&mut self) -> Result<RelatorSpec> {
        let at = self.pos;
        let word = self.name()?;
        self.expect('(')?;
        let wrap = |e: Error| match e {
            e @ Error::Parse { .. } => e,
            other => Error::parse(at, other.to_string()),
        };
        let spec = match word.as_str() {
            "barr" => RelatorSpec::barr(self.functor()?),
            "cobarr" => RelatorSpec::cobarr(self.functor()?).map_err(wrap)?,
            "box" | "diamond" => {
                let f = self.functor()?;
                if f != FunctorExpr::Pow {
                    return Err(Error::parse(at, format!("{word} is defined for Pow only")));
                }
                if word == "box" {
                    RelatorSpec::pow_box()
                } else {
                    RelatorSpec::pow_diamond()
                }
            }
            "submon" => {
                let f = self.functor()?;
                let FunctorExpr::Exp(labels) = f else {
                    return Err(Error::parse(at, "submon needs an exponential functor Exp{...}"));
                };
                self.expect(';')?;
                let kw = self.name()?;
                if kw != "gens" {
                    return self.err("expected `gens:`");
                }
                self.expect(':')?;
                let gens = self.generators(&labels)?;
                RelatorSpec::submonoid(UCSubmonoid::generate(&labels, &gens).map_err(wrap)?)
            }
            "comp" => {
                let outer = self.relator()?;
                self.expect(',')?;
                let inner = self.relator()?;
                RelatorSpec::comp_of(outer, inner)
            }
            "upto-difun" => RelatorSpec::up_to_difunctional(self.relator()?),
            "sum" | "prod" | "sup" | "inf" => {
                let mut parts = vec![self.relator()?];
                while self.eat(',') {
                    parts.push(self.relator()?);
                }
                match word.as_str() {
                    "sum" => RelatorSpec::sum_of(parts),
                    "prod" => RelatorSpec::prod_of(parts),
                    "sup" => RelatorSpec::sup(parts),
                    _ => RelatorSpec::inf(parts),
                }
                .map_err(wrap)?
            }
            w => return Err(Error::parse(at, format!("unknown relator `{w}`"))),
        };
        self.expect(')')?;
        Ok(spec)
    }

    fn pair_list(&mut self, labels: &FinSet) -> Result<FinRel> {
        let at = self.pos;
        let mut pairs = Vec::new();
        if self.peek() != Some(']') {
            loop {
                self.expect('(')?;
                let a = self.name()?;
                self.expect(',')?;
                let b = self.name()?;
                self.expect(')')?;
                pairs.push((a, b));
                if !self.eat(',') {
                    break;
                }
            }
        }
        self.expect(']')?;
        FinRel::from_named_pairs(labels, labels, pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
            .map_err(|e| Error::parse(at, e.to_string()))
    }

    fn generators(&mut self, labels: &FinSet) -> Result<Vec<FinRel>> {
        self.expect('[')?;
        match self.peek() {
            Some(']') => {
                self.pos += 1;
                Ok(Vec::new())
            }
            Some('[') => {
                let mut gens = Vec::new();
                loop {
                    self.expect('[')?;
                    gens.push(self.pair_list(labels)?);
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect(']')?;
                Ok(gens)
            }
            _ => Ok(vec![self.pair_list(labels)?]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functor_precedence() {
        let f = parse_functor("2 + 3 * Id").unwrap();
        assert_eq!(f.to_string(), "2 + 3 * Id");
        assert!(matches!(f, FunctorExpr::Sum(ref ps) if ps.len() == 2));
        let g = parse_functor("Exp{a,b} . Pow").unwrap();
        assert!(matches!(g, FunctorExpr::Comp(..)));
        let h = parse_functor("2 * Exp{a,b} . Pow + Id").unwrap();
        assert_eq!(h.to_string(), "2 * Exp{a,b} . Pow + Id");
    }

    #[test]
    fn functor_round_trip() {
        for src in ["Pow", "Exp{}", "C{x,y}", "(2 + Id) . Pow", "MVal(Z2) * Exp{a}", "Exp{a,b} . Pow . Pow"] {
            let f = parse_functor(src).unwrap();
            assert_eq!(parse_functor(&f.to_string()).unwrap(), f, "{src}");
        }
    }

    #[test]
    fn parse_errors_have_offsets() {
        match parse_functor("Pow + Foo") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
        assert!(parse_functor("Exp{a,a}").is_err());
        assert!(parse_functor("Pow )").is_err());
        assert!(parse_functor("MVal(nope)").is_err());
    }

    #[test]
    fn relators() {
        let r = parse_relator("submon(Exp{a,b}; gens: [(a,b),(b,b),(b,a)])").unwrap();
        let RelatorSpec { .. } = r;
        assert_eq!(r.to_string(), "submon(Exp{a,b}; gens: [[(a,b),(b,a),(b,b)]])");
        let twisted = parse_relator("comp(submon(Exp{a,b}; gens: [[(a,b),(a,a),(b,a)],[(a,b),(b,b),(b,a)]]), barr(Pow))").unwrap();
        assert_eq!(twisted.functor().to_string(), "Exp{a,b} . Pow");
        assert_eq!(parse_relator(&twisted.to_string()).unwrap(), twisted);
        let s = parse_relator("sup(box(Pow), diamond(Pow))").unwrap();
        assert_eq!(s.functor(), &FunctorExpr::Pow);
        assert!(parse_relator("upto-difun(barr(2 * Id))").is_ok());
        assert!(parse_relator("cobarr(MVal(Z2))").is_err());
        assert!(parse_relator("box(Id)").is_err());
        assert!(parse_relator("submon(Pow; gens: [])").is_err());
    }
}
