//! Projection phase: McCallum's operator, the equational-constraint reduced
//! operator, and the full sequence of projection factor sets.
//!
//! Every operator returns a coprime squarefree basis, so downstream code can
//! assume the factors at each level are primitive, squarefree and pairwise
//! coprime. Pairwise resultants run on the rayon pool; the output is sorted
//! canonically, so the schedule never affects results.

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{multiplicity, squarefree_coprime_basis};
use crate::error::{CadError, Result};
use crate::poly::{Poly, Rat, VarOrder};
use crate::resultant::discriminant;

/// Factors whose main variable is `var`.
#[derive(Clone, Debug)]
pub struct ProjectionLevel {
    pub var: usize,
    pub factors: Vec<Poly>,
}

#[derive(Clone, Debug)]
pub struct ProjectionSequence {
    pub order: VarOrder,
    /// From the top variable down to the first.
    pub levels: Vec<ProjectionLevel>,
    /// The equational constraint, if the reduced operator was used.
    pub ec: Option<Poly>,
    /// Indices into `level(main var of ec)` of the factors of `ec`.
    pub ec_factors: Vec<usize>,
    /// Normalized factors whose partial derivatives were added to the input
    /// (see [`delineating_partials`]); they may vanish identically over
    /// positive-dimensional cells.
    pub delineated: Vec<Poly>,
}

/// `p = c · Π factor^mult`, with factors addressed as `(var, index)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub constant: Rat,
    pub parts: Vec<(usize, usize, u32)>,
}

fn nonconstant(ps: impl IntoIterator<Item = Poly>) -> Vec<Poly> {
    ps.into_iter().filter(|p| !p.is_constant()).collect()
}

fn coefficients_and_disc(p: &Poly, v: usize) -> Result<Vec<Poly>> {
    let mut out = nonconstant(p.coefficients(v));
    if p.degree(v) >= 2 {
        out.push(discriminant(p, v)?);
    }
    Ok(out)
}

fn pair_resultants(pairs: &[(&Poly, &Poly)], v: usize) -> Vec<Poly> {
    pairs.par_iter().map(|(p, q)| crate::resultant::resultant_unchecked(p, q, v)).collect()
}

/// McCallum projection of `ps` (already a basis) with respect to `v`.
/// Polynomials free of `v` pass through unchanged.
pub fn mccallum_project(ps: &[Poly], v: usize) -> Result<Vec<Poly>> {
    let (with_v, without): (Vec<&Poly>, Vec<&Poly>) = ps.iter().partition(|p| p.contains_var(v));
    let mut out: Vec<Poly> = without.into_iter().cloned().collect();
    for p in &with_v {
        out.extend(coefficients_and_disc(p, v)?);
    }
    let mut pairs = Vec::new();
    for (i, p) in with_v.iter().enumerate() {
        for q in &with_v[i + 1..] {
            pairs.push((*p, *q));
        }
    }
    out.extend(pair_resultants(&pairs, v));
    Ok(squarefree_coprime_basis(&nonconstant(out)).factors)
}

/// Reduced projection for an equational constraint `ec`: coefficients and
/// discriminants of the factors of `ec`, and resultants of those factors with
/// each other and with every other polynomial.
pub fn ec_reduced_project(ps: &[Poly], ec: &Poly, v: usize) -> Result<Vec<Poly>> {
    if !ec.contains_var(v) {
        return Err(CadError::Usage("equational constraint does not involve the projected variable".into()));
    }
    let ec_basis = squarefree_coprime_basis(std::slice::from_ref(ec)).factors;
    let ecs: Vec<&Poly> = ec_basis.iter().filter(|e| e.contains_var(v)).collect();
    let mut out: Vec<Poly> = ec_basis.iter().filter(|e| !e.contains_var(v)).cloned().collect();
    let mut others: Vec<&Poly> = Vec::new();
    for p in ps {
        if !p.contains_var(v) {
            out.push(p.clone());
        } else if !ecs.iter().any(|e| e.normalize() == p.normalize()) {
            others.push(p);
        }
    }
    for e in &ecs {
        out.extend(coefficients_and_disc(e, v)?);
    }
    let mut pairs = Vec::new();
    for (i, e) in ecs.iter().enumerate() {
        for f in &ecs[i + 1..] {
            pairs.push((*e, *f));
        }
        for p in &others {
            pairs.push((*e, *p));
        }
    }
    out.extend(pair_resultants(&pairs, v));
    Ok(squarefree_coprime_basis(&nonconstant(out)).factors)
}

/// Projects `ps` down to the first variable. With `ec`, the reduced operator
/// is used once, at the level of the constraint's main variable.
pub fn project_all(ps: &[Poly], order: &VarOrder, ec: Option<&Poly>) -> Result<ProjectionSequence> {
    let n = order.len();
    if let Some(p) = ps.iter().find(|p| p.nvars() != n) {
        return Err(CadError::Usage(format!("polynomial over {} variables, order has {n}", p.nvars())));
    }
    let ec = match ec {
        Some(e) if e.is_constant() => return Err(CadError::Usage("equational constraint is constant".into())),
        Some(e) => Some(e.normalize()),
        None => None,
    };
    let ec_var = ec.as_ref().and_then(|e| e.main_var());
    let mut input: Vec<Poly> = ps.to_vec();
    if let Some(e) = &ec {
        input.push(e.clone());
    }
    let mut cur = squarefree_coprime_basis(&input).factors;
    let mut levels = Vec::with_capacity(n);
    let mut ec_factors = Vec::new();
    for v in (0..n).rev() {
        let (here, lower): (Vec<Poly>, Vec<Poly>) = cur.into_iter().partition(|p| p.main_var() == Some(v));
        if ec_var == Some(v) {
            let e = ec.as_ref().unwrap();
            ec_factors = here.iter().enumerate().filter(|(_, f)| multiplicity(e, f) > 0).map(|(i, _)| i).collect();
        }
        let next = if v == 0 {
            Vec::new()
        } else {
            let mut all = here.clone();
            all.extend(lower);
            match (&ec, ec_var == Some(v)) {
                (Some(e), true) => ec_reduced_project(&all, e, v)?,
                _ => mccallum_project(&all, v)?,
            }
        };
        levels.push(ProjectionLevel { var: v, factors: here });
        cur = next;
    }
    Ok(ProjectionSequence { order: order.clone(), levels, ec, ec_factors, delineated: Vec::new() })
}

/// All non-constant partial derivatives of `f`, of every order.
///
/// Where `f` vanishes identically over a cell, its order of vanishing at a
/// point of the cylinder is fixed by which of these vanish there; making
/// them sign-invariant restores the order-invariance that McCallum's
/// operator needs from `f`.
pub fn delineating_partials(f: &Poly) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::new();
    let mut frontier = vec![f.clone()];
    while let Some(g) = frontier.pop() {
        for v in g.vars() {
            let d = g.derivative(v).normalize();
            if !d.is_constant() && !out.contains(&d) {
                out.push(d.clone());
                frontier.push(d);
            }
        }
    }
    crate::basis::sort_canonical(&mut out);
    out
}

#[derive(Serialize)]
pub struct LevelJson {
    pub var: String,
    pub factors: Vec<String>,
}

impl ProjectionSequence {
    pub fn nvars(&self) -> usize {
        self.order.len()
    }

    pub fn level(&self, v: usize) -> &ProjectionLevel {
        &self.levels[self.levels.len() - 1 - v]
    }

    pub fn all_factors(&self) -> impl Iterator<Item = &Poly> {
        self.levels.iter().flat_map(|l| l.factors.iter())
    }

    pub fn factor_count(&self) -> usize {
        self.levels.iter().map(|l| l.factors.len()).sum()
    }

    /// Writes `p` over the projection factors, if it is such a product.
    pub fn factorize(&self, p: &Poly) -> Option<Factorization> {
        if p.is_zero() {
            return None;
        }
        let mut rest = p.clone();
        let mut parts = Vec::new();
        for l in &self.levels {
            for (i, f) in l.factors.iter().enumerate() {
                if rest.is_constant() {
                    break;
                }
                if !rest.contains_var(l.var) {
                    break;
                }
                let k = multiplicity(&rest, f);
                if k > 0 {
                    for _ in 0..k {
                        rest = rest.exact_div(f).unwrap();
                    }
                    parts.push((l.var, i, k));
                }
            }
        }
        rest.constant_value().map(|constant| Factorization { constant, parts })
    }

    pub fn to_json(&self) -> Vec<LevelJson> {
        self.levels
            .iter()
            .map(|l| LevelJson {
                var: self.order.name(l.var).to_string(),
                factors: l.factors.iter().map(|f| f.to_string_with(&self.order)).collect(),
            })
            .collect()
    }

    /// Human-readable listing, one level per block, with counts.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for l in &self.levels {
            s.push_str(&format!("level {} ({} factors)\n", self.order.name(l.var), l.factors.len()));
            for f in &l.factors {
                s.push_str(&format!("  {}\n", f.to_string_with(&self.order)));
            }
        }
        s.push_str(&format!("total {} factors\n", self.factor_count()));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_poly;
    use crate::resultant::oracle::sylvester_resultant;

    fn xy() -> VarOrder {
        VarOrder::parse("x,y").unwrap()
    }

    fn p(s: &str, o: &VarOrder) -> Poly {
        parse_poly(s, o).unwrap()
    }

    fn sorted(mut v: Vec<Poly>) -> Vec<Poly> {
        crate::basis::sort_canonical(&mut v);
        v
    }

    #[test]
    fn circle_projects_to_two_lines() {
        let o = xy();
        let out = mccallum_project(&[p("x^2+y^2-1", &o)], 1).unwrap();
        // disc_y = -4(x^2 - 1), checked against the Sylvester determinant
        let c = p("x^2+y^2-1", &o);
        let syl = sylvester_resultant(&c, &c.derivative(1), 1);
        assert_eq!(syl.normalize(), p("x^2-1", &o).normalize());
        assert_eq!(sorted(out), sorted(vec![p("x-1", &o), p("x+1", &o)]));
    }

    #[test]
    fn constant_coefficients_vanish() {
        let o = xy();
        assert!(mccallum_project(&[p("y-1", &o)], 1).unwrap().is_empty());
    }

    #[test]
    fn crossing_lines() {
        let o = xy();
        let out = mccallum_project(&[p("y-x", &o), p("y+x", &o)], 1).unwrap();
        let syl = sylvester_resultant(&p("y-x", &o), &p("y+x", &o), 1);
        assert_eq!(syl, p("2*x", &o));
        assert_eq!(out, vec![p("x", &o)]);
    }

    #[test]
    fn ec_resultant_substitutes() {
        let o = VarOrder::parse("x,y,w,z").unwrap();
        let ec = p("(y-z)^2+(x-w)^2-9", &o);
        let out = ec_reduced_project(&[ec.clone(), p("z-1", &o)], &ec, 3).unwrap();
        let want = p("(x-w)^2+(y-1)^2-9", &o).normalize();
        assert!(out.iter().any(|f| f.normalize() == want));
    }

    #[test]
    fn ec_alone_has_no_pairs() {
        let o = xy();
        let ec = p("x^2+y^2-1", &o);
        let out = ec_reduced_project(std::slice::from_ref(&ec), &ec, 1).unwrap();
        assert_eq!(sorted(out), sorted(vec![p("x-1", &o), p("x+1", &o)]));
        assert!(ec_reduced_project(std::slice::from_ref(&ec), &p("x", &o), 1).is_err());
    }

    #[test]
    fn ec_output_within_full_projection() {
        let o = VarOrder::parse("x,y,z").unwrap();
        let ps = [p("x^2+y^2+z^2-4", &o), p("z-x*y", &o), p("z+y-1", &o)];
        let ec = ps[0].clone();
        let full = mccallum_project(&ps, 2).unwrap();
        let prod = full.iter().fold(Poly::one(3), |a, b| &a * b);
        for f in ec_reduced_project(&ps, &ec, 2).unwrap() {
            assert!(prod.exact_div(&f).is_some(), "{f:?} not in the full projection");
        }
    }

    #[test]
    fn sequence_levels() {
        let o = xy();
        let seq = project_all(&[p("x^2+y^2-1", &o)], &o, None).unwrap();
        assert_eq!(seq.levels.len(), 2);
        assert_eq!(seq.level(1).factors, vec![p("x^2+y^2-1", &o)]);
        assert_eq!(seq.level(0).factors.len(), 2);
        let f = seq.factorize(&p("2*(x^2-1)*(x^2+y^2-1)^2", &o)).unwrap();
        assert_eq!(f.constant, crate::poly::rat(2));
        assert_eq!(f.parts.len(), 3);
        assert!(seq.dump().contains("total 3 factors"));
    }

    #[test]
    fn univariate_is_single_level() {
        let o = VarOrder::parse("x").unwrap();
        let seq = project_all(&[p("x^2-2", &o)], &o, None).unwrap();
        assert_eq!(seq.levels.len(), 1);
        assert_eq!(seq.level(0).factors, vec![p("x^2-2", &o)]);
    }

    #[test]
    fn factors_are_a_basis_at_every_level() {
        let o = VarOrder::parse("x,y,z").unwrap();
        let ps = [p("x^2+y^2+z^2-4", &o), p("z-x*y", &o), p("y^2-x^3", &o)];
        let seq = project_all(&ps, &o, None).unwrap();
        for l in &seq.levels {
            for (i, f) in l.factors.iter().enumerate() {
                assert_eq!(f.main_var(), Some(l.var));
                assert!(crate::poly::gcd(f, &f.derivative(l.var)).is_constant());
                for g in &l.factors[i + 1..] {
                    assert!(crate::poly::gcd(f, g).is_constant());
                }
            }
        }
    }
}
