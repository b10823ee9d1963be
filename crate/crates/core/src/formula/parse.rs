//! Recursive-descent parser for the QEPCAD-flavoured formula language.
//!
//! ```text
//! document := ["vars" name {"," name} "."] formula ["."]
//! formula  := disj ["==>" formula]
//! disj     := conj {"\/" conj}
//! conj     := unary {"/\" unary}
//! unary    := "~" unary | "(" ("E"|"A") name ")" unary | "[" formula "]"
//!           | "(" formula ")" | "TRUE" | "FALSE" | atom
//! atom     := expr relop expr          relop: = /= < <= > >=
//! expr     := term {("+"|"-") term}
//! term     := factor {("*"|"/") factor}     (division by constants only)
//! factor   := ("-"|"+") factor | primary ["^" integer]
//! primary  := number | name | "(" expr ")" | root_K "(" expr "," name ")"
//! ```
//! Juxtaposition (`2x`, `x y`) is rejected.

use num_bigint::BigInt;

use super::{Atom, Formula, Quantifier, Relop};
use crate::error::{CadError, Result};
use crate::poly::{Poly, Rat, VarOrder};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    And,
    Or,
    Not,
    Implies,
    Rel(Relop),
    Eof,
}

fn syntax(pos: usize, msg: impl Into<String>) -> CadError {
    CadError::Syntax { pos, msg: msg.into() }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = if i + 1 < b.len() { &src[i..i + 2] } else { "" };
        let three = if i + 2 < b.len() { &src[i..i + 3] } else { "" };
        let (tok, len) = if three == "==>" {
            (Tok::Implies, 3)
        } else if two == "/\\" {
            (Tok::And, 2)
        } else if two == "\\/" {
            (Tok::Or, 2)
        } else if two == "/=" {
            (Tok::Rel(Relop::Ne), 2)
        } else if two == "<=" {
            (Tok::Rel(Relop::Le), 2)
        } else if two == ">=" {
            (Tok::Rel(Relop::Ge), 2)
        } else if two == "==" {
            (Tok::Rel(Relop::Eq), 2)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            let n: BigInt = src[i..j].parse().map_err(|_| syntax(i, "bad number"))?;
            (Tok::Num(n), j - i)
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let mut j = i;
            while j < b.len() && (b[j].is_ascii_alphanumeric() || b[j] == b'_') {
                j += 1;
            }
            (Tok::Ident(src[i..j].to_string()), j - i)
        } else {
            let t = match c {
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'^' => Tok::Caret,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBrack,
                b']' => Tok::RBrack,
                b',' => Tok::Comma,
                b'.' => Tok::Dot,
                b'~' => Tok::Not,
                b'=' => Tok::Rel(Relop::Eq),
                b'<' => Tok::Rel(Relop::Lt),
                b'>' => Tok::Rel(Relop::Gt),
                _ => return Err(syntax(i, format!("unexpected character '{}'", c as char))),
            };
            (t, 1)
        };
        out.push((tok, start));
        i += len;
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

/// Either side of an atom.
enum Side {
    Poly(Poly),
    Root { index: u32, poly: Poly, var: usize },
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    order: &'a VarOrder,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected {what}")))
        }
    }

    fn nvars(&self) -> usize {
        self.order.len()
    }

    fn variable(&mut self) -> Result<usize> {
        let at = self.offset();
        match self.bump() {
            Tok::Ident(name) => self.order.index_of(&name).ok_or(CadError::UnknownVariable(name)),
            _ => Err(syntax(at, "expected a variable")),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disj()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::Or(vec![Formula::Not(Box::new(lhs)), rhs]));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conj()?];
        while *self.peek() == Tok::Or {
            self.bump();
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn is_quantifier_head(&self) -> bool {
        matches!(self.peek(), Tok::LParen)
            && matches!(self.peek_at(1), Tok::Ident(q) if q == "E" || q == "A")
            && matches!(self.peek_at(2), Tok::Ident(_))
            && matches!(self.peek_at(3), Tok::RParen)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::LBrack => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RBrack, "']'")?;
                Ok(f)
            }
            Tok::Ident(ref s) if s == "TRUE" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(ref s) if s == "FALSE" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen if self.is_quantifier_head() => {
                self.bump();
                let q = match self.bump() {
                    Tok::Ident(q) if q == "E" => Quantifier::Exists,
                    _ => Quantifier::Forall,
                };
                let v = self.variable()?;
                self.expect(Tok::RParen, "')'")?;
                let body = self.unary()?;
                Ok(Formula::Quant(q, v, Box::new(body)))
            }
            Tok::LParen => {
                // Either a parenthesized formula or an atom starting with a
                // parenthesized expression; try the atom first.
                let save = self.pos;
                match self.atom() {
                    Ok(a) => Ok(a),
                    Err(e_atom) => {
                        self.pos = save;
                        self.bump();
                        match self.formula() {
                            Ok(f) if *self.peek() == Tok::RParen => {
                                self.bump();
                                Ok(f)
                            }
                            _ => Err(e_atom),
                        }
                    }
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        let lhs = self.side()?;
        let at = self.offset();
        let rel = match self.bump() {
            Tok::Rel(r) => r,
            _ => return Err(syntax(at, "expected a relation (= /= < <= > >=)")),
        };
        let rhs = self.side()?;
        match (lhs, rhs) {
            (Side::Poly(a), Side::Poly(b)) => Ok(Formula::atom(&a - &b, rel)),
            (Side::Poly(a), Side::Root { index, poly, var }) => {
                if a != Poly::var(self.nvars(), var) {
                    return Err(syntax(at, "an indexed root must be compared with its own variable"));
                }
                Ok(Formula::Atom(Atom::Root { var, rel, index, poly }))
            }
            (Side::Root { index, poly, var }, Side::Poly(b)) => {
                if b != Poly::var(self.nvars(), var) {
                    return Err(syntax(at, "an indexed root must be compared with its own variable"));
                }
                Ok(Formula::Atom(Atom::Root { var, rel: rel.mirror(), index, poly }))
            }
            _ => Err(syntax(at, "cannot compare two indexed roots")),
        }
    }

    fn side(&mut self) -> Result<Side> {
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(k) = name.strip_prefix("root_") {
                if *self.peek_at(1) == Tok::LParen {
                    let at = self.offset();
                    let index: u32 = k.parse().map_err(|_| syntax(at, "bad root index"))?;
                    if index == 0 {
                        return Err(syntax(at, "root indices start at 1"));
                    }
                    self.bump();
                    self.bump();
                    let poly = self.expr()?;
                    self.expect(Tok::Comma, "','")?;
                    let var = self.variable()?;
                    self.expect(Tok::RParen, "')'")?;
                    return Ok(Side::Root { index, poly, var });
                }
            }
        }
        Ok(Side::Poly(self.expr()?))
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        self.reject_juxtaposition()?;
        Ok(acc)
    }

    fn reject_juxtaposition(&self) -> Result<()> {
        match self.peek() {
            Tok::Num(_) | Tok::Ident(_) | Tok::LParen => {
                let is_word = matches!(self.peek(), Tok::Ident(s) if s == "TRUE" || s == "FALSE");
                if is_word {
                    return Ok(());
                }
                Err(syntax(self.offset(), "implicit multiplication is not allowed; use '*'"))
            }
            _ => Ok(()),
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.offset();
                    let d = self.factor()?;
                    match d.constant_value() {
                        Some(c) if c != Rat::from_integer(0.into()) => acc = acc.scale(&c.recip()),
                        Some(_) => return Err(syntax(at, "division by zero")),
                        None => return Err(syntax(at, "division by a non-constant polynomial")),
                    }
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(self.factor()?.neg())
            }
            Tok::Plus => {
                self.bump();
                self.factor()
            }
            _ => {
                let base = self.primary()?;
                if *self.peek() == Tok::Caret {
                    self.bump();
                    let at = self.offset();
                    let e = match self.bump() {
                        Tok::Num(n) => u32::try_from(n).map_err(|_| syntax(at, "exponent too large"))?,
                        _ => return Err(syntax(at, "expected a non-negative integer exponent")),
                    };
                    return Ok(base.pow(e));
                }
                Ok(base)
            }
        }
    }

    fn primary(&mut self) -> Result<Poly> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(n) => Ok(Poly::constant(self.nvars(), Rat::from_integer(n))),
            Tok::Ident(name) => match self.order.index_of(&name) {
                Some(i) => Ok(Poly::var(self.nvars(), i)),
                None => Err(CadError::UnknownVariable(name)),
            },
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            _ => Err(syntax(at, "expected a number, variable or '('")),
        }
    }
}

/// Parses a polynomial over `order`.
pub fn parse_poly(src: &str, order: &VarOrder) -> Result<Poly> {
    let mut p = Parser { toks: lex(src)?, pos: 0, order };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(syntax(p.offset(), "trailing input after polynomial"));
    }
    Ok(e)
}

/// Parses a formula over `order`; a trailing '.' is allowed.
pub fn parse_formula(src: &str, order: &VarOrder) -> Result<Formula> {
    let mut p = Parser { toks: lex(src)?, pos: 0, order };
    let f = p.formula()?;
    if *p.peek() == Tok::Dot {
        p.bump();
    }
    if *p.peek() != Tok::Eof {
        return Err(syntax(p.offset(), "trailing input after formula"));
    }
    Ok(f)
}

/// Parses `vars x, y, ... . formula`, returning the declared order.
pub fn parse_document(src: &str) -> Result<(VarOrder, Formula)> {
    let trimmed = src.trim_start();
    let skip = src.len() - trimmed.len();
    let Some(rest) = trimmed.strip_prefix("vars") else {
        return Err(syntax(skip, "expected a 'vars' declaration"));
    };
    let Some(dot) = rest.find('.') else {
        return Err(syntax(src.len(), "unterminated 'vars' declaration"));
    };
    let names: Vec<&str> = rest[..dot].split(',').map(|s| s.trim()).collect();
    if names.iter().any(|n| n.is_empty()) {
        return Err(syntax(skip + 4, "empty variable name"));
    }
    let order = VarOrder::new(&names)?;
    let body_start = skip + 4 + dot + 1;
    let f = parse_formula(&src[body_start..], &order).map_err(|e| match e {
        CadError::Syntax { pos, msg } => CadError::Syntax { pos: pos + body_start, msg },
        other => other,
    })?;
    Ok((order, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn o() -> VarOrder {
        VarOrder::parse("x,y,w,z,t").unwrap()
    }

    #[test]
    fn reads_quantified_interval() {
        let f = parse_formula("(E t)[0 < t /\\ t < 1]", &o()).unwrap();
        match f {
            Formula::Quant(Quantifier::Exists, 4, body) => match *body {
                Formula::And(parts) => assert_eq!(parts.len(), 2),
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negation_and_implication() {
        let f = parse_formula("~[y < 0]", &o()).unwrap();
        assert!(matches!(f, Formula::Not(_)));
        let g = parse_formula("x > 0 ==> y > 0", &o()).unwrap();
        assert!(matches!(g, Formula::Or(ref v) if v.len() == 2));
    }

    #[test]
    fn polynomial_syntax() {
        let p = parse_poly("(y - z)^2 + (x - w)^2", &o()).unwrap();
        assert_eq!(p.num_terms(), 6);
        assert_eq!(parse_poly("x/2 - 3", &o()).unwrap(), parse_poly("1/2*x - 3", &o()).unwrap());
        assert_eq!(parse_poly("-x^2", &o()).unwrap().leading_sign(), -1);
        assert_eq!(parse_poly("2^3", &o()).unwrap().constant_value(), Some(rat(8)));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_poly("2x", &o()) {
            Err(CadError::Syntax { pos, .. }) => assert_eq!(pos, 1),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_poly("q + 1", &o()), Err(CadError::UnknownVariable("q".into())));
        assert!(matches!(parse_formula("x < ", &o()), Err(CadError::Syntax { .. })));
        assert!(matches!(parse_formula("x y < 0", &o()), Err(CadError::Syntax { .. })));
        assert!(matches!(parse_poly("x/y", &o()), Err(CadError::Syntax { .. })));
    }

    #[test]
    fn parenthesized_atoms_and_formulas() {
        let a = parse_formula("(x + 1)*y > 0", &o()).unwrap();
        assert!(matches!(a, Formula::Atom(_)));
        let b = parse_formula("(x > 0 \\/ y > 0) /\\ z = 0", &o()).unwrap();
        assert!(matches!(b, Formula::And(ref v) if v.len() == 2));
    }

    #[test]
    fn documents_declare_order() {
        let (order, f) = parse_document("vars L, x.\n(A x)[4*x^8 - 4*(L-3)*x^6 + 1 > 0].").unwrap();
        assert_eq!(order.names(), &["L".to_string(), "x".to_string()]);
        assert!(matches!(f, Formula::Quant(Quantifier::Forall, 1, _)));
        match parse_document("vars x.\n x +* 1 > 0") {
            Err(CadError::Syntax { pos, .. }) => assert_eq!(pos, 12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn root_atoms() {
        let f = parse_formula("root_1(x^2 + y^2 - 1, y) < y", &o()).unwrap();
        match f {
            Formula::Atom(Atom::Root { var, rel, index, .. }) => {
                assert_eq!((var, rel, index), (1, Relop::Gt, 1));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("x < root_1(y - 1, y)", &o()).is_err());
    }
}
