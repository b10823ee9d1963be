//! Signs of polynomials at algebraic sample points, and roots of a
//! polynomial over such a point.
//!
//! No field towers: a zero test reduces modulo the defining polynomial of the
//! top algebraic coordinate, runs Euclid over the lower coordinates (leading
//! coefficients that vanish there are trimmed by recursive zero tests), and
//! checks whether the resulting gcd changes sign across the coordinate's
//! isolating interval. Nonzero signs come from interval arithmetic on
//! refined boxes, which always terminates once zero is excluded.

use num_traits::Signed;

use super::interval::{eval_box, Interval};
use super::{isolate_upoly, RealAlgebraic, SamplePoint};
use crate::error::{CadError, Result};
use crate::poly::{Poly, Rat};
use crate::resultant::resultant_unchecked;
use crate::upoly::UPoly;

/// An algebraic coordinate bound to variable index `.0`.
type Coord = (usize, RealAlgebraic);

/// Rounds of interval refinement tried before falling back to an exact test.
const QUICK_ROUNDS: usize = 6;

fn sign_of_rat(q: &Rat) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Substitutes the rational coordinates and returns the remaining algebraic
/// ones that `p` actually involves, in increasing variable order.
fn specialize(p: &Poly, s: &SamplePoint) -> (Poly, Vec<Coord>) {
    let mut q = p.clone();
    for (v, c) in s.coords.iter().enumerate() {
        if let Some(r) = c.as_rational() {
            q = q.subst(v, r);
        }
    }
    let alg = q.vars().into_iter().filter(|&v| v < s.len()).map(|v| (v, s.coords[v].clone())).collect();
    (q, alg)
}

/// Folds coordinates that refinement turned into rationals back into `q`.
fn absorb_points(q: &mut Poly, alg: &mut Vec<Coord>) {
    alg.retain(|(v, a)| match a.as_rational() {
        Some(r) => {
            *q = q.subst(*v, r);
            false
        }
        None => true,
    });
    alg.retain(|(v, _)| q.contains_var(*v));
}

fn boxes(nvars: usize, alg: &[Coord]) -> Vec<Option<Interval>> {
    let mut b = vec![None; nvars];
    for (v, a) in alg {
        b[*v] = Some(Interval::new(a.lo().clone(), a.hi().clone()));
    }
    b
}

fn refine_all(alg: &mut [Coord], steps: usize) {
    for (_, a) in alg.iter_mut() {
        for _ in 0..steps {
            a.bisect();
        }
    }
}

/// Certified sign of `p` at the sample point; every variable of `p` must be
/// assigned.
pub fn sign_at(p: &Poly, s: &SamplePoint) -> i8 {
    let (q, alg) = specialize(p, s);
    assert!(q.vars().iter().all(|&v| v < s.len()), "sign_at: polynomial has unassigned variables");
    sign_alg(&q, alg)
}

fn sign_alg(q: &Poly, mut alg: Vec<Coord>) -> i8 {
    let mut q = q.clone();
    for round in 0..QUICK_ROUNDS {
        absorb_points(&mut q, &mut alg);
        if let Some(c) = q.constant_value() {
            return sign_of_rat(&c);
        }
        if let Some(s) = eval_box(&q, &boxes(q.nvars(), &alg)).sign() {
            return s;
        }
        refine_all(&mut alg, 2 + round);
    }
    if is_zero_alg(&q, &alg) {
        return 0;
    }
    loop {
        absorb_points(&mut q, &mut alg);
        if let Some(c) = q.constant_value() {
            return sign_of_rat(&c);
        }
        if let Some(s) = eval_box(&q, &boxes(q.nvars(), &alg)).sign() {
            return s;
        }
        refine_all(&mut alg, 4);
    }
}

/// Reduces `q` modulo the defining polynomial of every coordinate.
fn reduce(q: &Poly, alg: &[Coord]) -> Poly {
    let nv = q.nvars();
    let mut r = q.clone();
    for (v, a) in alg.iter().rev() {
        if r.degree(*v) as usize >= a.defpoly().degree() {
            r = r.rem_rational_lc(&a.defpoly().to_poly(nv, *v), *v);
        }
    }
    if r.is_zero() {
        r
    } else {
        r.normalize()
    }
}

/// Drops leading coefficients in `v` that vanish at the point `alg`.
fn trim(p: &Poly, v: usize, alg: &[Coord]) -> Poly {
    if alg.is_empty() || p.is_zero() {
        return p.clone();
    }
    let coeffs = p.coefficients(v);
    for (i, c) in coeffs.iter().enumerate() {
        if !is_zero_alg(c, alg) {
            return Poly::from_coefficients(p.nvars(), v, &coeffs[i..]);
        }
    }
    Poly::zero(p.nvars())
}

/// A gcd in `v` of `a` and `b` specialized at the point `alg`, with leading
/// coefficient nonvanishing there; `None` when they are coprime.
fn alg_gcd(a: &Poly, b: &Poly, v: usize, alg: &[Coord]) -> Option<Poly> {
    if alg.is_empty() {
        let g = UPoly::from_poly(a, v).gcd(&UPoly::from_poly(b, v));
        return (g.degree() > 0).then(|| g.to_poly(a.nvars(), v));
    }
    let mut a = trim(a, v, alg);
    let mut b = trim(&reduce(b, alg), v, alg);
    if a.degree(v) < b.degree(v) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.is_zero() {
            return (a.degree(v) > 0).then_some(a);
        }
        if b.degree(v) == 0 {
            return None;
        }
        let r = a.prem(&b, v);
        let r = trim(&reduce(&r, alg), v, alg);
        a = b;
        b = r;
    }
}

/// Whether interval evaluation on progressively refined copies of the
/// coordinates proves `q` nonzero at `alg`.
fn quick_nonzero(q: &Poly, alg: &[Coord]) -> bool {
    let mut pt = alg.to_vec();
    for round in 0..QUICK_ROUNDS {
        if eval_box(q, &boxes(q.nvars(), &pt)).sign().is_some_and(|s| s != 0) {
            return true;
        }
        refine_all(&mut pt, 2 + round);
    }
    false
}

/// Exact test whether `q` vanishes at the algebraic point `alg`.
fn is_zero_alg(q: &Poly, alg: &[Coord]) -> bool {
    let mut q = q.clone();
    let mut alg: Vec<Coord> = alg.to_vec();
    absorb_points(&mut q, &mut alg);
    if q.is_constant() {
        return q.is_zero();
    }
    let top = q.main_var().expect("nonconstant");
    let k = alg.iter().position(|(v, _)| *v == top).expect("variable of q has no coordinate");
    let lower = &alg[..k];
    let (v, a) = &alg[k];
    let r = reduce(&q, &alg[..=k]);
    if r.is_zero() {
        return true;
    }
    if !r.contains_var(*v) {
        return is_zero_alg(&r, lower);
    }
    if quick_nonzero(&r, &alg[..=k]) {
        return false;
    }
    let m = a.defpoly().to_poly(r.nvars(), *v);
    match alg_gcd(&m, &r, *v, lower) {
        None => false,
        Some(g) => {
            // g divides the squarefree defpoly at this point, so it vanishes at
            // the coordinate iff it changes sign across the isolating interval.
            let sl = sign_alg(&g.subst(*v, a.lo()), lower.to_vec());
            let sh = sign_alg(&g.subst(*v, a.hi()), lower.to_vec());
            debug_assert!(sl != 0 && sh != 0);
            sl != sh
        }
    }
}

/// Real roots in `v` of `p` with the sample point substituted, in increasing
/// order. `Nullified` when `p` vanishes identically there.
pub fn roots_over(p: &Poly, s: &SamplePoint, v: usize) -> Result<Vec<RealAlgebraic>> {
    if v < s.len() {
        return Err(CadError::Usage("lifting variable is already assigned".into()));
    }
    let (q, alg) = specialize(p, s);
    if q.vars().iter().any(|&u| u >= s.len() && u != v) {
        return Err(CadError::Usage("polynomial has unassigned variables below the lifting variable".into()));
    }
    if alg.is_empty() {
        if q.is_zero() {
            return Err(CadError::Nullified);
        }
        if !q.contains_var(v) {
            return Ok(vec![]);
        }
        return Ok(isolate_upoly(&UPoly::from_poly(&q, v)));
    }
    let q = trim(&q, v, &alg);
    if q.is_zero() {
        return Err(CadError::Nullified);
    }
    if q.degree(v) == 0 {
        return Ok(vec![]);
    }
    let q = reduce(&q, &alg);
    let mut norm = relative_norm(&q, s).unwrap_or_else(|| absolute_norm(&q, &alg));
    if norm.is_zero() {
        return Err(CadError::Usage("degenerate norm while lifting over an algebraic point".into()));
    }
    if norm.degree(v) > 0 {
        norm = norm.primitive_part(v);
    }
    let candidates = isolate_upoly(&UPoly::from_poly(&norm, v));
    let mut out = Vec::new();
    for beta in candidates {
        if let Some(beta) = genuine_root(&q, &alg, v, beta) {
            out.push(beta);
        }
    }
    Ok(out)
}

/// Eliminates the algebraic coordinates from `q`, top first, each by its
/// own defining polynomial.
fn absolute_norm(q: &Poly, alg: &[Coord]) -> Poly {
    let nv = q.nvars();
    let mut norm = q.clone();
    for (u, a) in alg.iter().rev() {
        if norm.contains_var(*u) {
            norm = resultant_unchecked(&a.defpoly().to_poly(nv, *u), &norm, *u);
        }
    }
    norm
}

/// Like [`absolute_norm`], but eliminates a coordinate by its relative
/// polynomial where the sample has one. Every elimination step specializes
/// to a multiple of the product of the remaining polynomial over the
/// conjugates, so the genuine roots survive unless the result collapses to
/// zero, in which case `None` asks for the absolute norm.
fn relative_norm(q: &Poly, s: &SamplePoint) -> Option<Poly> {
    let nv = q.nvars();
    let mut norm = q.clone();
    let mut used = false;
    for u in (0..s.len()).rev() {
        if !norm.contains_var(u) {
            continue;
        }
        let c = &s.coords[u];
        if let Some(r) = c.as_rational() {
            norm = norm.subst(u, r);
            continue;
        }
        let mut eliminator = None;
        if let Some(Some(rel)) = s.relative.get(u) {
            let mut f = rel.with_nvars(nv);
            for w in 0..u {
                if let Some(r) = s.coords[w].as_rational() {
                    f = f.subst(w, r);
                }
            }
            if f.degree(u) > 0 && f.vars().iter().all(|&w| w <= u) {
                eliminator = Some(f);
                used = true;
            }
        }
        let f = eliminator.unwrap_or_else(|| c.defpoly().to_poly(nv, u));
        norm = resultant_unchecked(&f, &norm, u);
        if norm.is_zero() {
            return None;
        }
    }
    used.then_some(norm)
}

/// Keeps `beta` iff it is a root of `q` at the point `alg`; returns it with
/// its interval as refined during the test.
fn genuine_root(q: &Poly, alg: &[Coord], v: usize, beta: RealAlgebraic) -> Option<RealAlgebraic> {
    let mut pt: Vec<Coord> = alg.to_vec();
    pt.push((v, beta));
    for round in 0..QUICK_ROUNDS {
        if let Some(s) = eval_box(q, &boxes(q.nvars(), &pt)).sign() {
            if s != 0 {
                return None;
            }
        }
        refine_all(&mut pt, 2 + round);
    }
    let beta = pt.last().unwrap().1.clone();
    // Roots of q at the point are roots of the norm, and beta's interval
    // isolates one root of the norm, so a sign change across it certifies
    // that root. The endpoints are not roots of the norm, hence not of q.
    if !beta.is_rational() {
        let lower = pt[..pt.len() - 1].to_vec();
        let sl = sign_alg(&q.subst(v, beta.lo()), lower.clone());
        let sh = sign_alg(&q.subst(v, beta.hi()), lower);
        if sl * sh < 0 {
            return Some(beta);
        }
    }
    is_zero_alg(q, &pt).then_some(beta)
}
