//! Coprime squarefree bases ("distinct factors").

use num_traits::{One, Signed};

use crate::poly::{gcd, Poly, Rat};
use crate::realalg::isolate_upoly;
use crate::upoly::UPoly;

/// Pairwise coprime, squarefree, primitive factors together with the
/// multiplicity of each factor in each input.
#[derive(Clone, Debug, Default)]
pub struct SquarefreeBasis {
    pub factors: Vec<Poly>,
    /// `multiplicities[i]` lists `(factor index, exponent)` for input `i`.
    pub multiplicities: Vec<Vec<(usize, u32)>>,
}

impl SquarefreeBasis {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Adds `q` (squarefree, nonconstant) to a pairwise-coprime list, splitting
/// existing elements on common factors.
fn insert(basis: &mut Vec<Poly>, q: Poly) {
    let mut rest = q;
    let mut out: Vec<Poly> = Vec::with_capacity(basis.len() + 2);
    for b in basis.drain(..) {
        if rest.is_constant() {
            out.push(b);
            continue;
        }
        let g = gcd(&rest, &b);
        if g.is_constant() {
            out.push(b);
            continue;
        }
        let b1 = b.exact_div(&g).expect("gcd divides");
        rest = rest.exact_div(&g).expect("gcd divides");
        out.push(g.normalize());
        if !b1.is_constant() {
            out.push(b1.normalize());
        }
    }
    if !rest.is_constant() {
        out.push(rest.normalize());
    }
    *basis = out;
}

/// Splits `p` into squarefree pieces of distinct multiplicity (Yun), along
/// every variable's content.
fn squarefree_pieces(p: &Poly, out: &mut Vec<Poly>) {
    if p.is_constant() {
        return;
    }
    let v = p.main_var().unwrap();
    let c = p.content(v);
    squarefree_pieces(&c, out);
    let a = p.exact_div(&c).unwrap();
    let mut g = gcd(&a, &a.derivative(v));
    let mut w = a.exact_div(&g).unwrap();
    while !w.is_constant() {
        let y = gcd(&w, &g);
        let z = w.exact_div(&y).unwrap();
        if !z.is_constant() {
            out.push(z.normalize());
        }
        g = g.exact_div(&y).unwrap();
        w = y;
    }
}

/// Splits linear factors off a squarefree univariate polynomial. A rational
/// root has denominator dividing the leading coefficient, so an isolating
/// interval narrower than `1/|lc|` holds at most one candidate.
fn split_rational_roots(p: Poly) -> Vec<Poly> {
    let vars = p.vars();
    if vars.len() != 1 || p.degree(vars[0]) < 2 {
        return vec![p];
    }
    let v = vars[0];
    let u = UPoly::from_poly(&p, v);
    let lc = Rat::from_integer(u.lc().abs());
    let mut rest = p;
    let mut out = Vec::new();
    for mut a in isolate_upoly(&u) {
        let root = match a.as_rational() {
            Some(q) => Some(q.clone()),
            None => {
                a.refine_in_place(&(Rat::one() / (&lc + Rat::one())));
                let k = (a.lo() * &lc).ceil();
                let q = k / &lc;
                (&q <= a.hi() && u.sign_at(&q) == 0).then_some(q)
            }
        };
        if let Some(q) = root {
            let lin = UPoly::linear(&q).to_poly(rest.nvars(), v);
            rest = rest.exact_div(&lin).expect("rational root divides");
            out.push(lin.normalize());
        }
    }
    if !rest.is_constant() {
        out.push(rest.normalize());
    }
    out
}

/// Canonical ordering for deterministic output: by main variable, degree,
/// then printed form of the internal representation.
pub fn sort_canonical(ps: &mut [Poly]) {
    ps.sort_by(|a, b| {
        let ka = (a.main_var(), a.total_degree(), a.num_terms());
        let kb = (b.main_var(), b.total_degree(), b.num_terms());
        ka.cmp(&kb).then_with(|| a.terms().cmp(b.terms()))
    });
}

/// Multiplicity of `f` in `p` (number of times it divides exactly).
pub fn multiplicity(p: &Poly, f: &Poly) -> u32 {
    let mut k = 0;
    let mut q = p.clone();
    if q.is_zero() {
        return 0;
    }
    while let Some(r) = q.exact_div(f) {
        k += 1;
        q = r;
        if q.is_constant() {
            break;
        }
    }
    k
}

pub fn squarefree_coprime_basis(ps: &[Poly]) -> SquarefreeBasis {
    let mut factors: Vec<Poly> = Vec::new();
    for p in ps {
        if p.is_zero() {
            continue;
        }
        let mut pieces = Vec::new();
        squarefree_pieces(p, &mut pieces);
        for q in pieces {
            for r in split_rational_roots(q) {
                insert(&mut factors, r);
            }
        }
    }
    sort_canonical(&mut factors);
    factors.dedup();
    let multiplicities = ps
        .iter()
        .map(|p| {
            factors
                .iter()
                .enumerate()
                .filter_map(|(i, f)| {
                    let k = multiplicity(p, f);
                    (k > 0).then_some((i, k))
                })
                .collect()
        })
        .collect();
    SquarefreeBasis { factors, multiplicities }
}
