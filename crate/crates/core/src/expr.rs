//! Path expressions:
//!
//! ```text
//! path := term { "*" term }
//! term := atom [ "^-1" ]
//! atom := "0" | "i(" ID ")" | "d(" ID "," ID ")" | "u(" ID "," ID ")"
//!       | "[" ID "^" ID WS ID "]" | "(" path ")"
//! ID   := [A-Za-z0-9_]+
//! ```
//!
//! `d(b,a)` needs `b <= a`, `u(b,a)` needs `b >= a`; both start at `a`.

use crate::error::{Error, Result};
use crate::path::{Path, Simplex1};
use crate::poset::{Elem, Poset};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ast {
    Zero,
    Identity(Ident),
    Down(Ident, Ident),
    Up(Ident, Ident),
    Simplex(Ident, Ident, Ident),
    Inverse(Box<Ast>),
    Product(Vec<Ast>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub pos: usize,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.error(format!("expected {tok:?}"))
        }
    }

    fn ident(&mut self) -> Result<Ident> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return self.error("expected an element name");
        }
        let id = Ident { name: self.rest()[..len].to_string(), pos: self.pos };
        self.pos += len;
        Ok(id)
    }

    fn path(&mut self) -> Result<Ast> {
        let mut factors = vec![self.term()?];
        while self.eat("*") {
            factors.push(self.term()?);
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Ast::Product(factors) })
    }

    fn term(&mut self) -> Result<Ast> {
        let atom = self.atom()?;
        if self.eat("^-1") {
            Ok(Ast::Inverse(Box::new(atom)))
        } else {
            Ok(atom)
        }
    }

    fn pair(&mut self) -> Result<(Ident, Ident)> {
        let b = self.ident()?;
        self.expect(",")?;
        let a = self.ident()?;
        self.expect(")")?;
        Ok((b, a))
    }

    fn atom(&mut self) -> Result<Ast> {
        self.skip_ws();
        if self.eat("i(") {
            let a = self.ident()?;
            self.expect(")")?;
            Ok(Ast::Identity(a))
        } else if self.eat("d(") {
            let (b, a) = self.pair()?;
            Ok(Ast::Down(b, a))
        } else if self.eat("u(") {
            let (b, a) = self.pair()?;
            Ok(Ast::Up(b, a))
        } else if self.eat("[") {
            let a = self.ident()?;
            self.expect("^")?;
            let x = self.ident()?;
            if !self.rest().starts_with(char::is_whitespace) {
                return self.error("expected whitespace after the support");
            }
            let b = self.ident()?;
            self.expect("]")?;
            Ok(Ast::Simplex(a, x, b))
        } else if self.eat("(") {
            let inner = self.path()?;
            self.expect(")")?;
            Ok(inner)
        } else if self.eat("0") {
            Ok(Ast::Zero)
        } else if self.rest().is_empty() {
            self.error("unexpected end of input")
        } else {
            self.error("expected a path")
        }
    }
}

pub fn parse_ast(src: &str) -> Result<Ast> {
    let mut p = Parser { src, pos: 0 };
    let ast = p.path()?;
    p.skip_ws();
    if !p.rest().is_empty() {
        return p.error("trailing input");
    }
    Ok(ast)
}

fn resolve(p: &Poset, id: &Ident) -> Result<Elem> {
    p.elem(&id.name)
}

fn comparable(p: &Poset, x: Elem, y: Elem) -> Result<()> {
    if p.comparable(x, y) {
        Ok(())
    } else {
        Err(Error::NotComparable(p.name(x).into(), p.name(y).into()))
    }
}

pub fn elaborate(p: &Poset, ast: &Ast) -> Result<Path> {
    Ok(match ast {
        Ast::Zero => Path::zero(),
        Ast::Identity(a) => Path::identity(resolve(p, a)?),
        Ast::Down(b, a) => {
            let (b, a) = (resolve(p, b)?, resolve(p, a)?);
            comparable(p, b, a)?;
            Path::down(p, b, a)?
        }
        Ast::Up(b, a) => {
            let (b, a) = (resolve(p, b)?, resolve(p, a)?);
            comparable(p, b, a)?;
            Path::up(p, b, a)?
        }
        Ast::Simplex(a, x, b) => Simplex1::new(p, resolve(p, a)?, resolve(p, x)?, resolve(p, b)?)?.to_path(p),
        Ast::Inverse(inner) => elaborate(p, inner)?.inverse(),
        Ast::Product(factors) => {
            let paths: Vec<Path> = factors.iter().map(|f| elaborate(p, f)).collect::<Result<_>>()?;
            Path::product(p, &paths)
        }
    })
}

/// Parses and normalizes; `p * q` applies `q` first.
pub fn parse_path(src: &str, p: &Poset) -> Result<Path> {
    elaborate(p, &parse_ast(src)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let ab = Poset::build(&["a", "b"], &[("a", "b")]).unwrap();
        let b = ab.elem("b").unwrap();
        assert_eq!(parse_path("u(b,a) * d(a,b)", &ab).unwrap(), Path::identity(b));
        assert_eq!(parse_path("0", &ab).unwrap(), Path::zero());
        let c = Poset::circle();
        let g = parse_path("[a1^b1 a2] * [a2^b2 a1]", &c).unwrap();
        assert!(g.is_loop());
        assert_eq!(g.len(), 4);
        assert_eq!(parse_path(&g.render(&c), &c).unwrap(), g);
        assert_eq!(parse_path("([a1^b1 a2] * [a2^b2 a1])^-1", &c).unwrap(), g.inverse());
    }

    #[test]
    fn errors() {
        let c = Poset::circle();
        assert!(matches!(parse_path("d(a1,", &c), Err(Error::Syntax { pos: 5, .. })));
        assert!(matches!(parse_path("i(a1) i(a1)", &c), Err(Error::Syntax { pos: 6, .. })));
        assert!(matches!(parse_path("[a1^b1a2]", &c), Err(Error::Syntax { .. })));
        assert!(matches!(parse_path("i(zz)", &c), Err(Error::UnknownElement(_))));
        assert!(matches!(parse_path("d(a1,a2)", &c), Err(Error::NotComparable(..))));
        assert!(matches!(parse_path("d(b1,a1)", &c), Err(Error::WrongOrientation(..))));
        assert!(matches!(parse_path("[a1^a2 a1]", &c), Err(Error::InvalidSimplex(_))));
        assert!(matches!(parse_path("", &c), Err(Error::Syntax { pos: 0, .. })));
    }

    #[test]
    fn products_of_non_meeting_paths_vanish() {
        let c = Poset::circle();
        assert_eq!(parse_path("i(a1) * i(a2)", &c).unwrap(), Path::zero());
        assert_eq!(parse_path("0 * i(a2)", &c).unwrap(), Path::zero());
    }
}
