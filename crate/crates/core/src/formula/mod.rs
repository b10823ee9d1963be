//! Tarski formulas: atoms `p σ 0` over a [`VarOrder`], boolean structure and
//! quantifiers, with normal forms and a canonical printer.

mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{CadError, Result};
use crate::poly::{Poly, VarOrder};

pub use eval::{eval_at, eval_qf, sample_equivalent, BoundSearch, Sampler, Verdict};
pub use parse::{parse_document, parse_formula, parse_poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relop {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relop {
    pub fn holds(self, sign: i8) -> bool {
        match self {
            Relop::Eq => sign == 0,
            Relop::Ne => sign != 0,
            Relop::Lt => sign < 0,
            Relop::Le => sign <= 0,
            Relop::Gt => sign > 0,
            Relop::Ge => sign >= 0,
        }
    }

    pub fn negate(self) -> Relop {
        match self {
            Relop::Eq => Relop::Ne,
            Relop::Ne => Relop::Eq,
            Relop::Lt => Relop::Ge,
            Relop::Le => Relop::Gt,
            Relop::Gt => Relop::Le,
            Relop::Ge => Relop::Lt,
        }
    }

    /// The relation with its sides swapped (`a σ b` ⇔ `b σ' a`).
    pub fn mirror(self) -> Relop {
        match self {
            Relop::Lt => Relop::Gt,
            Relop::Le => Relop::Ge,
            Relop::Gt => Relop::Lt,
            Relop::Ge => Relop::Le,
            r => r,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relop::Eq => "=",
            Relop::Ne => "/=",
            Relop::Lt => "<",
            Relop::Le => "<=",
            Relop::Gt => ">",
            Relop::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    /// `poly σ 0`.
    Poly { poly: Poly, rel: Relop },
    /// `x_var σ root_index(poly)`: the `index`-th real root (1-based, in
    /// increasing order) of `poly` as a polynomial in `x_var`, with the
    /// lower variables fixed. False when that root does not exist.
    Root { var: usize, rel: Relop, index: u32, poly: Poly },
}

impl Atom {
    pub fn new(poly: Poly, rel: Relop) -> Atom {
        Atom::Poly { poly, rel }
    }

    pub fn poly(&self) -> &Poly {
        match self {
            Atom::Poly { poly, .. } | Atom::Root { poly, .. } => poly,
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut vs: BTreeSet<usize> = self.poly().vars().into_iter().collect();
        if let Atom::Root { var, .. } = self {
            vs.insert(*var);
        }
        vs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Quant(Quantifier, usize, Box<Formula>),
}

/// Quantifier prefix (outermost first) over a quantifier-free matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrenexForm {
    pub prefix: Vec<(Quantifier, usize)>,
    pub matrix: Formula,
}

impl Formula {
    pub fn atom(poly: Poly, rel: Relop) -> Formula {
        Formula::Atom(Atom::new(poly, rel))
    }

    /// Conjunction, flattening nested conjunctions and absorbing constants.
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(qs) => out.extend(qs),
                q => out.push(q),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction, flattening nested disjunctions and absorbing constants.
    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(qs) => out.extend(qs),
                q => out.push(q),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(g) => *g,
            g => Formula::Not(Box::new(g)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(vec![Formula::not(a), b])
    }

    pub fn exists(v: usize, f: Formula) -> Formula {
        Formula::Quant(Quantifier::Exists, v, Box::new(f))
    }

    pub fn forall(v: usize, f: Formula) -> Formula {
        Formula::Quant(Quantifier::Forall, v, Box::new(f))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(g) => g.is_quantifier_free(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().all(|g| g.is_quantifier_free()),
            Formula::Quant(..) => false,
        }
    }

    /// All atoms, left to right.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => out.push(a),
            Formula::Not(g) | Formula::Quant(_, _, g) => g.collect_atoms(out),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.collect_atoms(out)),
        }
    }

    /// Distinct atom polynomials in order of first appearance.
    pub fn polys(&self) -> Vec<Poly> {
        let mut out: Vec<Poly> = Vec::new();
        for a in self.atoms() {
            let p = a.poly();
            if !p.is_zero() && !out.contains(p) {
                out.push(p.clone());
            }
        }
        out
    }

    pub fn free_vars(&self) -> BTreeSet<usize> {
        match self {
            Formula::True | Formula::False => BTreeSet::new(),
            Formula::Atom(a) => a.vars(),
            Formula::Not(g) => g.free_vars(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().flat_map(|g| g.free_vars()).collect(),
            Formula::Quant(_, v, g) => {
                let mut s = g.free_vars();
                s.remove(v);
                s
            }
        }
    }

    pub fn bound_vars(&self) -> Vec<usize> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => vec![],
            Formula::Not(g) => g.bound_vars(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().flat_map(|g| g.bound_vars()).collect(),
            Formula::Quant(_, v, g) => {
                let mut out = vec![*v];
                out.extend(g.bound_vars());
                out
            }
        }
    }

    /// Applies `f` to every atom polynomial.
    pub fn map_polys(&self, f: &impl Fn(&Poly) -> Poly) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(Atom::Poly { poly, rel }) => Formula::atom(f(poly), *rel),
            Formula::Atom(Atom::Root { var, rel, index, poly }) => {
                Formula::Atom(Atom::Root { var: *var, rel: *rel, index: *index, poly: f(poly) })
            }
            Formula::Not(g) => Formula::Not(Box::new(g.map_polys(f))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_polys(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_polys(f)).collect()),
            Formula::Quant(q, v, g) => Formula::Quant(*q, *v, Box::new(g.map_polys(f))),
        }
    }

    /// Rebuilds over a larger variable order (new variables appended).
    pub fn with_nvars(&self, nvars: usize) -> Formula {
        self.map_polys(&|p| p.with_nvars(nvars))
    }

    /// Folds atoms whose polynomial is constant and simplifies the
    /// resulting boolean constants.
    pub fn simplify_constants(&self) -> Formula {
        match self {
            Formula::Atom(Atom::Poly { poly, rel }) => match poly.constant_value() {
                Some(c) => {
                    let s = if c > num_traits::Zero::zero() {
                        1
                    } else if c < num_traits::Zero::zero() {
                        -1
                    } else {
                        0
                    };
                    if rel.holds(s) {
                        Formula::True
                    } else {
                        Formula::False
                    }
                }
                None => self.clone(),
            },
            Formula::Not(g) => Formula::not(g.simplify_constants()),
            Formula::And(gs) => Formula::and(gs.iter().map(|g| g.simplify_constants()).collect()),
            Formula::Or(gs) => Formula::or(gs.iter().map(|g| g.simplify_constants()).collect()),
            Formula::Quant(q, v, g) => match g.simplify_constants() {
                Formula::True => Formula::True,
                Formula::False => Formula::False,
                h => Formula::Quant(*q, *v, Box::new(h)),
            },
            _ => self.clone(),
        }
    }

    pub fn display<'a>(&'a self, order: &'a VarOrder) -> FormulaDisplay<'a> {
        FormulaDisplay { f: self, order }
    }

    pub fn to_text(&self, order: &VarOrder) -> String {
        self.display(order).to_string()
    }
}

/// Negation normal form of `¬f` for quantifier-free `f`. Polynomial atoms
/// absorb the negation by flipping the relation; indexed-root atoms keep an
/// explicit `¬`, since their negation also covers points where the root
/// does not exist.
pub fn negate_nnf(f: &Formula) -> Result<Formula> {
    if !f.is_quantifier_free() {
        return Err(CadError::Usage("negate_nnf needs a quantifier-free formula".into()));
    }
    Ok(nnf(f, true))
}

/// Negation normal form (quantifiers are kept and dualized under negation).
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, neg: bool) -> Formula {
    match f {
        Formula::True => {
            if neg {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::False => {
            if neg {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Atom(Atom::Poly { poly, rel }) => Formula::atom(poly.clone(), if neg { rel.negate() } else { *rel }),
        Formula::Atom(a @ Atom::Root { .. }) => {
            let at = Formula::Atom(a.clone());
            if neg {
                Formula::Not(Box::new(at))
            } else {
                at
            }
        }
        Formula::Not(g) => nnf(g, !neg),
        Formula::And(gs) => {
            let parts = gs.iter().map(|g| nnf(g, neg)).collect();
            if neg {
                Formula::or(parts)
            } else {
                Formula::and(parts)
            }
        }
        Formula::Or(gs) => {
            let parts = gs.iter().map(|g| nnf(g, neg)).collect();
            if neg {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
        Formula::Quant(q, v, g) => {
            let q2 = match (q, neg) {
                (Quantifier::Exists, true) => Quantifier::Forall,
                (Quantifier::Forall, true) => Quantifier::Exists,
                (q, false) => *q,
            };
            Formula::Quant(q2, *v, Box::new(nnf(g, neg)))
        }
    }
}

/// Prenex form. Bound variables that clash with free variables or with
/// another binder are renamed to fresh variables appended to the order, so
/// the returned order may be longer than the input one.
pub fn to_prenex(f: &Formula, order: &VarOrder) -> Result<(PrenexForm, VarOrder)> {
    let mut names: Vec<String> = order.names().to_vec();
    let g = to_nnf(f);
    let free = g.free_vars();
    let mut used: BTreeSet<usize> = free;
    let g = rename_apart(&g, &mut used, &mut names);
    let new_order = VarOrder::new(&names)?;
    let g = g.with_nvars(new_order.len());
    let mut prefix = Vec::new();
    let matrix = pull(&g, &mut prefix);
    Ok((PrenexForm { prefix, matrix }, new_order))
}

fn fresh_name(names: &[String], base: &str) -> String {
    (1..).map(|k| format!("{base}_{k}")).find(|n| !names.contains(n)).unwrap()
}

fn rename_apart(f: &Formula, used: &mut BTreeSet<usize>, names: &mut Vec<String>) -> Formula {
    match f {
        Formula::Quant(q, v, g) => {
            if used.contains(v) {
                let name = fresh_name(names, &names[*v].clone());
                names.push(name);
                let nv = names.len() - 1;
                used.insert(nv);
                let g = g.with_nvars(names.len());
                let renamed = substitute_var(&g, *v, nv);
                let body = rename_apart(&renamed, used, names);
                Formula::Quant(*q, nv, Box::new(body))
            } else {
                used.insert(*v);
                Formula::Quant(*q, *v, Box::new(rename_apart(g, used, names)))
            }
        }
        Formula::Not(g) => Formula::Not(Box::new(rename_apart(g, used, names))),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rename_apart(g, used, names)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rename_apart(g, used, names)).collect()),
        _ => f.clone(),
    }
}

/// Replaces free occurrences of variable `from` by `to` (which must be fresh).
fn substitute_var(f: &Formula, from: usize, to: usize) -> Formula {
    let rename = |p: &Poly| {
        let n = p.nvars().max(to + 1);
        let p = p.with_nvars(n);
        p.compose(from, &Poly::var(n, to))
    };
    match f {
        Formula::Quant(q, v, g) if *v == from => Formula::Quant(*q, *v, g.clone()),
        Formula::Quant(q, v, g) => Formula::Quant(*q, *v, Box::new(substitute_var(g, from, to))),
        Formula::Atom(Atom::Root { var, rel, index, poly }) => Formula::Atom(Atom::Root {
            var: if *var == from { to } else { *var },
            rel: *rel,
            index: *index,
            poly: rename(poly),
        }),
        Formula::Atom(Atom::Poly { poly, rel }) => Formula::atom(rename(poly), *rel),
        Formula::Not(g) => Formula::Not(Box::new(substitute_var(g, from, to))),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| substitute_var(g, from, to)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| substitute_var(g, from, to)).collect()),
        _ => f.clone(),
    }
}

fn pull(f: &Formula, prefix: &mut Vec<(Quantifier, usize)>) -> Formula {
    match f {
        Formula::Quant(q, v, g) => {
            prefix.push((*q, *v));
            pull(g, prefix)
        }
        Formula::And(gs) => Formula::and(gs.iter().map(|g| pull(g, prefix)).collect()),
        Formula::Or(gs) => Formula::or(gs.iter().map(|g| pull(g, prefix)).collect()),
        Formula::Not(g) => Formula::not(pull(g, prefix)),
        _ => f.clone(),
    }
}

impl PrenexForm {
    pub fn to_formula(&self) -> Formula {
        self.prefix.iter().rev().fold(self.matrix.clone(), |acc, (q, v)| Formula::Quant(*q, *v, Box::new(acc)))
    }
}

pub struct FormulaDisplay<'a> {
    f: &'a Formula,
    order: &'a VarOrder,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self.f, self.order, out)
    }
}

fn write_atom(a: &Atom, order: &VarOrder, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match a {
        Atom::Poly { poly, rel } => write!(out, "{} {} 0", poly.display(order), rel.symbol()),
        Atom::Root { var, rel, index, poly } => write!(
            out,
            "{} {} root_{}({}, {})",
            order.name(*var),
            rel.symbol(),
            index,
            poly.display(order),
            order.name(*var)
        ),
    }
}

fn write_formula(f: &Formula, order: &VarOrder, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::True => write!(out, "TRUE"),
        Formula::False => write!(out, "FALSE"),
        Formula::Atom(a) => write_atom(a, order, out),
        Formula::Not(g) => {
            write!(out, "~")?;
            write_bracketed(g, order, out)
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let sep = if matches!(f, Formula::And(_)) { " /\\ " } else { " \\/ " };
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    write!(out, "{sep}")?;
                }
                write_bracketed(g, order, out)?;
            }
            Ok(())
        }
        Formula::Quant(q, v, g) => {
            let c = if *q == Quantifier::Exists { 'E' } else { 'A' };
            write!(out, "({c} {})", order.name(*v))?;
            match **g {
                Formula::Quant(..) => write_formula(g, order, out),
                _ => {
                    write!(out, "[")?;
                    write_formula(g, order, out)?;
                    write!(out, "]")
                }
            }
        }
    }
}

fn write_bracketed(f: &Formula, order: &VarOrder, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::And(_) | Formula::Or(_) | Formula::Atom(_) => {
            write!(out, "[")?;
            write_formula(f, order, out)?;
            write!(out, "]")
        }
        _ => write_formula(f, order, out),
    }
}
