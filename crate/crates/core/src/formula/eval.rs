//! Pointwise evaluation and the sampling equivalence oracle.
//!
//! Quantifier-free formulas are evaluated exactly at rational points. A
//! quantifier block directly over a quantifier-free body is decided exactly
//! when it binds one variable (all real roots of the atom polynomials in
//! that variable, plus one rational per gap, are tested). Larger blocks fix
//! all but one of their variables on a finite grid and decide the remaining
//! one exactly, trying each choice of the exactly-decided variable; an
//! existential found this way is a genuine witness, but "no witness" is
//! only as good as the grid resolution.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Atom, Formula, Quantifier};
use crate::error::{CadError, Result};
use crate::poly::{Poly, Rat};
use crate::realalg::{
    compare, integer_above, integer_below, isolate_upoly, rational_between, sign_upoly_at, RealAlgebraic,
};
use crate::upoly::UPoly;

/// Grid used for the non-innermost variables of a quantifier block.
#[derive(Clone, Debug)]
pub struct BoundSearch {
    pub lo: Rat,
    pub hi: Rat,
    pub step: Rat,
}

impl Default for BoundSearch {
    fn default() -> Self {
        BoundSearch {
            lo: Rat::from_integer((-6).into()),
            hi: Rat::from_integer(6.into()),
            step: Rat::new(1.into(), 8.into()),
        }
    }
}

impl BoundSearch {
    pub fn grid(&self) -> Vec<Rat> {
        let mut out = Vec::new();
        let mut x = self.lo.clone();
        while x <= self.hi {
            out.push(x.clone());
            x += &self.step;
        }
        out
    }
}

fn unassigned(v: usize) -> CadError {
    CadError::Unassigned(format!("x{}", v + 1))
}

fn sign_of(q: &Rat) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Exact truth of a quantifier-free formula at a rational point.
pub fn eval_qf(f: &Formula, point: &[Option<Rat>]) -> Result<bool> {
    eval_mixed(f, point, None)
}

/// Substitutes the assigned coordinates; the result must only involve `free`.
fn specialize(p: &Poly, point: &[Option<Rat>], free: Option<usize>) -> Result<Poly> {
    let mut q = p.clone();
    for v in p.vars() {
        if Some(v) == free {
            continue;
        }
        match point.get(v).and_then(|x| x.as_ref()) {
            Some(x) => q = q.subst(v, x),
            None => return Err(unassigned(v)),
        }
    }
    Ok(q)
}

/// Evaluates with rational coordinates plus at most one algebraic one.
fn eval_mixed(f: &Formula, point: &[Option<Rat>], alg: Option<(usize, &RealAlgebraic)>) -> Result<bool> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom(a) => eval_atom(a, point, alg),
        Formula::Not(g) => Ok(!eval_mixed(g, point, alg)?),
        Formula::And(gs) => {
            for g in gs {
                if !eval_mixed(g, point, alg)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_mixed(g, point, alg)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Quant(..) => Err(CadError::Usage("quantifier in a quantifier-free evaluation".into())),
    }
}

fn value_sign(p: &Poly, point: &[Option<Rat>], alg: Option<(usize, &RealAlgebraic)>) -> Result<i8> {
    let free = alg.map(|(v, _)| v);
    let q = specialize(p, point, free)?;
    match (q.constant_value(), alg) {
        (Some(c), _) => Ok(sign_of(&c)),
        (None, Some((v, a))) => {
            // from_poly normalizes to a positive leading coefficient
            let lc = q.lc(v).constant_value().expect("univariate after substitution");
            Ok(sign_upoly_at(&UPoly::from_poly(&q, v), a) * sign_of(&lc))
        }
        (None, None) => unreachable!("specialize leaves no free variable"),
    }
}

fn eval_atom(a: &Atom, point: &[Option<Rat>], alg: Option<(usize, &RealAlgebraic)>) -> Result<bool> {
    match a {
        Atom::Poly { poly, rel } => Ok(rel.holds(value_sign(poly, point, alg)?)),
        Atom::Root { var, rel, index, poly } => {
            let mut pt = point.to_vec();
            let value: RealAlgebraic = match alg {
                Some((v, x)) if v == *var => x.clone(),
                _ => match point.get(*var).and_then(|x| x.as_ref()) {
                    Some(x) => RealAlgebraic::rational(x.clone()),
                    None => return Err(unassigned(*var)),
                },
            };
            if let Some(slot) = pt.get_mut(*var) {
                *slot = None;
            }
            let q = specialize(poly, &pt, Some(*var))?;
            if q.is_zero() || !q.contains_var(*var) {
                return Ok(false);
            }
            let roots = isolate_upoly(&UPoly::from_poly(&q, *var));
            let Some(root) = roots.get(*index as usize - 1) else {
                return Ok(false);
            };
            let s = match compare(&value, root) {
                Ordering::Less => -1,
                Ordering::Equal => 0,
                Ordering::Greater => 1,
            };
            Ok(rel.holds(s))
        }
    }
}

/// Sorted distinct real roots in `v` of the atom polynomials of `body`.
fn critical_roots(body: &Formula, point: &[Option<Rat>], v: usize) -> Result<Vec<RealAlgebraic>> {
    let mut roots: Vec<RealAlgebraic> = Vec::new();
    let mut seen: Vec<UPoly> = Vec::new();
    for a in body.atoms() {
        let mut polys = vec![a.poly().clone()];
        if let Atom::Root { var, .. } = a {
            if *var == v || a.poly().contains_var(v) {
                return Err(CadError::Usage("indexed-root atom in the quantified variable".into()));
            }
            polys.clear();
        }
        for p in polys {
            let q = specialize(&p, point, Some(v))?;
            if !q.contains_var(v) {
                continue;
            }
            let u = UPoly::from_poly(&q, v).squarefree();
            if seen.contains(&u) {
                continue;
            }
            roots.extend(isolate_upoly(&u));
            seen.push(u);
        }
    }
    roots.sort_by(compare);
    roots.dedup_by(|a, b| compare(a, b) == Ordering::Equal);
    Ok(roots)
}

/// Exact decision of `Q v. body` with everything else assigned.
fn decide_one(q: Quantifier, v: usize, body: &Formula, point: &mut [Option<Rat>]) -> Result<bool> {
    let roots = critical_roots(body, point, v)?;
    let mut samples: Vec<RealAlgebraic> = Vec::with_capacity(2 * roots.len() + 1);
    if roots.is_empty() {
        samples.push(RealAlgebraic::rational(Rat::zero()));
    } else {
        samples.push(RealAlgebraic::rational(integer_below(&roots[0])));
        for (i, r) in roots.iter().enumerate() {
            samples.push(r.clone());
            if i + 1 < roots.len() {
                samples.push(RealAlgebraic::rational(rational_between(r, &roots[i + 1])));
            }
        }
        samples.push(RealAlgebraic::rational(integer_above(roots.last().unwrap())));
    }
    let want = q == Quantifier::Exists;
    let saved = point[v].take();
    let mut result = !want;
    for s in &samples {
        let t = match s.as_rational() {
            Some(x) => {
                point[v] = Some(x.clone());
                let t = eval_mixed(body, point, None);
                point[v] = None;
                t?
            }
            None => eval_mixed(body, point, Some((v, s)))?,
        };
        if t == want {
            result = want;
            break;
        }
    }
    point[v] = saved;
    Ok(result)
}

/// Truth at a rational assignment of the free variables; see the module
/// documentation for the soundness of quantified evaluation.
pub fn eval_at(f: &Formula, point: &[Option<Rat>], search: &BoundSearch) -> Result<bool> {
    let mut pt = point.to_vec();
    let nv = f.atoms().iter().map(|a| a.poly().nvars()).max().unwrap_or(0);
    if pt.len() < nv {
        pt.resize(nv, None);
    }
    eval_rec(f, &mut pt, search)
}

fn eval_rec(f: &Formula, point: &mut Vec<Option<Rat>>, search: &BoundSearch) -> Result<bool> {
    match f {
        Formula::Quant(q, _, _) => {
            let mut block = Vec::new();
            let mut body = f;
            while let Formula::Quant(q2, v, g) = body {
                if q2 != q {
                    break;
                }
                block.push(*v);
                body = g;
            }
            let want = *q == Quantifier::Exists;
            if body.is_quantifier_free() {
                for (i, &exact) in block.iter().enumerate() {
                    let gridded: Vec<usize> =
                        block.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &v)| v).collect();
                    if search_grid(*q, &gridded, exact, body, point, search)? == want {
                        return Ok(want);
                    }
                }
                Ok(!want)
            } else {
                // grid the whole block and recurse into the body
                let found = grid_rec(&block, body, point, search, want)?;
                Ok(if found { want } else { !want })
            }
        }
        Formula::Not(g) => Ok(!eval_rec(g, point, search)?),
        Formula::And(gs) => {
            for g in gs {
                if !eval_rec(g, point, search)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_rec(g, point, search)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        _ => eval_qf(f, point),
    }
}

/// Whether some grid assignment of `vars` makes `body` evaluate to `want`.
fn grid_rec(
    vars: &[usize],
    body: &Formula,
    point: &mut Vec<Option<Rat>>,
    search: &BoundSearch,
    want: bool,
) -> Result<bool> {
    let Some((&v, rest)) = vars.split_first() else {
        return Ok(eval_rec(body, point, search)? == want);
    };
    let saved = point[v].take();
    for x in search.grid() {
        point[v] = Some(x);
        if grid_rec(rest, body, point, search, want)? {
            point[v] = saved;
            return Ok(true);
        }
    }
    point[v] = saved;
    Ok(false)
}

/// Grids `gridded`, decides `exact` exactly; returns the block's verdict
/// (`want` iff a witness/counterexample was found).
fn search_grid(
    q: Quantifier,
    gridded: &[usize],
    exact: usize,
    body: &Formula,
    point: &mut Vec<Option<Rat>>,
    search: &BoundSearch,
) -> Result<bool> {
    let want = q == Quantifier::Exists;
    let Some((&v, rest)) = gridded.split_first() else {
        return decide_one(q, exact, body, point);
    };
    let saved = point[v].take();
    for x in search.grid() {
        point[v] = Some(x);
        if search_grid(q, rest, exact, body, point, search)? == want {
            point[v] = saved;
            return Ok(want);
        }
    }
    point[v] = saved;
    Ok(!want)
}

/// Outcome of a sampling comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    NoCounterexample(usize),
    /// Values of the free variables (unlisted variables unassigned).
    Counterexample(Vec<Option<Rat>>),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::NoCounterexample(_))
    }
}

/// Seeded point generator: uniform rationals (denominator 1000) in a box,
/// with a fraction of points pulled to within `near` of an atom's zero set
/// by solving the atom polynomial for one coordinate.
#[derive(Clone, Debug)]
pub struct Sampler {
    pub seed: u64,
    pub lo: Rat,
    pub hi: Rat,
    pub boundary_fraction: f64,
    pub near: Rat,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            seed,
            lo: Rat::from_integer((-8).into()),
            hi: Rat::from_integer(8.into()),
            boundary_fraction: 0.3,
            near: Rat::new(1.into(), 100.into()),
        }
    }

    pub fn with_box(mut self, lo: Rat, hi: Rat) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    /// `n` points over `vars` (other coordinates left unassigned).
    pub fn points(&self, nvars: usize, vars: &[usize], boundary_polys: &[Poly], n: usize) -> Vec<Vec<Option<Rat>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let polys: Vec<&Poly> =
            boundary_polys.iter().filter(|p| !p.is_constant() && p.vars().iter().all(|v| vars.contains(v))).collect();
        (0..n)
            .map(|_| {
                let mut pt = vec![None; nvars];
                for &v in vars {
                    pt[v] = Some(self.uniform(&mut rng));
                }
                if !polys.is_empty() && rng.gen_bool(self.boundary_fraction) {
                    let p = polys[rng.gen_range(0..polys.len())];
                    self.pull_to_boundary(&mut rng, p, &mut pt);
                }
                pt
            })
            .collect()
    }

    fn uniform(&self, rng: &mut ChaCha8Rng) -> Rat {
        let d = 1000i64;
        let lo = (&self.lo * Rat::from_integer(d.into())).ceil().to_integer().to_i64().unwrap_or(-8000);
        let hi = (&self.hi * Rat::from_integer(d.into())).floor().to_integer().to_i64().unwrap_or(8000);
        Rat::new(BigInt::from(rng.gen_range(lo..=hi)), BigInt::from(d))
    }

    fn pull_to_boundary(&self, rng: &mut ChaCha8Rng, p: &Poly, pt: &mut [Option<Rat>]) {
        let vs = p.vars();
        let v = vs[rng.gen_range(0..vs.len())];
        let mut rest = pt.to_vec();
        rest[v] = None;
        let Ok(q) = specialize(p, &rest, Some(v)) else { return };
        if !q.contains_var(v) {
            return;
        }
        let roots = isolate_upoly(&UPoly::from_poly(&q, v));
        if roots.is_empty() {
            return;
        }
        let r = &roots[rng.gen_range(0..roots.len())];
        let value = match r.as_rational() {
            Some(x) if rng.gen_bool(0.5) => x.clone(),
            _ => {
                let approx = r.refine(&Rat::new(BigInt::one(), BigInt::from(1_000_000))).midpoint();
                let center =
                    (approx * Rat::from_integer(1_000_000.into())).round() / Rat::from_integer(1_000_000.into());
                let k = 10_000i64;
                let span = (&self.near * Rat::from_integer(k.into())).to_integer().to_i64().unwrap_or(100);
                center + Rat::new(BigInt::from(rng.gen_range(-span..=span)), BigInt::from(k))
            }
        };
        pt[v] = Some(value);
    }
}

/// Compares `f` and `g` on `n` seeded points over their free variables.
pub fn sample_equivalent(
    f: &Formula,
    g: &Formula,
    sampler: &Sampler,
    n: usize,
    search: &BoundSearch,
) -> Result<Verdict> {
    let mut vars: Vec<usize> = f.free_vars().union(&g.free_vars()).copied().collect();
    vars.sort_unstable();
    let nvars = f.atoms().iter().chain(g.atoms().iter()).map(|a| a.poly().nvars()).max().unwrap_or(0);
    let mut polys: Vec<Poly> = Vec::new();
    for a in f.atoms().into_iter().chain(g.atoms()) {
        if matches!(a, Atom::Poly { .. }) && !polys.contains(a.poly()) {
            polys.push(a.poly().clone());
        }
    }
    for pt in sampler.points(nvars, &vars, &polys, n) {
        if eval_at(f, &pt, search)? != eval_at(g, &pt, search)? {
            return Ok(Verdict::Counterexample(pt));
        }
    }
    Ok(Verdict::NoCounterexample(n))
}
