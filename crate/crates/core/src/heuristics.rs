//! Cheap measures of how hard a formulation will be for CAD.
//!
//! `sotd` sums the total degrees of all monomials; `ndrr` counts distinct
//! real roots at the bottom of the projection; `sowtd` weights the degree
//! in the i-th variable of the order by i, or i/2 when that variable is
//! quantified, so late and free variables count the most.
//!
//! Polynomial sets are de-duplicated up to a constant factor before
//! scoring: an atom repeated in several clauses is one polynomial.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::basis::squarefree_coprime_basis;
use crate::error::{CadError, Result};
use crate::formula::Formula;
use crate::poly::{Poly, Rat, VarOrder};
use crate::projection::{project_all, ProjectionSequence};
use crate::realalg::isolate_roots;

/// Distinct non-constant polynomials, compared up to a constant factor.
pub fn distinct_polys(ps: impl IntoIterator<Item = Poly>) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::new();
    let mut keys: Vec<Poly> = Vec::new();
    for p in ps {
        if p.is_constant() {
            continue;
        }
        let k = p.normalize();
        if !keys.contains(&k) {
            keys.push(k);
            out.push(p);
        }
    }
    out
}

pub fn sotd(ps: &[Poly]) -> u64 {
    ps.iter().flat_map(|p| p.terms().iter()).map(|(m, _)| m.iter().map(|&e| e as u64).sum::<u64>()).sum()
}

/// Distinct real roots of the univariate (bottom-level) factors.
pub fn ndrr(seq: &ProjectionSequence) -> Result<u64> {
    let bottom = &seq.level(0).factors;
    let basis = squarefree_coprime_basis(bottom).factors;
    let mut n = 0;
    for f in &basis {
        n += isolate_roots(f)?.len() as u64;
    }
    Ok(n)
}

/// Weight of variable `i` (0-based) of the order.
fn weight(i: usize, quantified: &[usize]) -> Rat {
    let w = Rat::from_integer((i as i64 + 1).into());
    if quantified.contains(&i) {
        w / Rat::from_integer(2.into())
    } else {
        w
    }
}

/// Sum of weighted total degrees over the distinct polynomials of `f`.
pub fn sowtd(f: &Formula, order: &VarOrder, quantified: &[usize]) -> Result<Rat> {
    let ps = distinct_polys(f.polys());
    if let Some(p) = ps.iter().find(|p| p.nvars() > order.len()) {
        return Err(CadError::Usage(format!("polynomial over {} variables, order has {}", p.nvars(), order.len())));
    }
    Ok(sowtd_polys(&ps, quantified))
}

pub fn sowtd_polys(ps: &[Poly], quantified: &[usize]) -> Rat {
    let mut total = Rat::from_integer(0.into());
    for p in ps {
        for (m, _) in p.terms() {
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    total += weight(i, quantified) * Rat::from_integer((e as i64).into());
                }
            }
        }
    }
    total
}

#[derive(Clone, Debug, Serialize)]
pub struct HeuristicReport {
    pub sotd_input: u64,
    pub sotd_full_projection: u64,
    pub ndrr: u64,
    /// Always a multiple of 1/2, so exact as a float.
    pub sowtd: f64,
    pub order: Vec<String>,
    pub quantified: Vec<String>,
}

/// Scores `f` under `order`; `quantified` indexes into `order`.
pub fn report(f: &Formula, order: &VarOrder, quantified: &[usize]) -> Result<HeuristicReport> {
    let ps = distinct_polys(f.polys().into_iter().map(|p| p.with_nvars(order.len())));
    let seq = project_all(&ps, order, None)?;
    let full: Vec<Poly> = seq.all_factors().cloned().collect();
    let w = sowtd_polys(&ps, quantified);
    Ok(HeuristicReport {
        sotd_input: sotd(&ps),
        sotd_full_projection: sotd(&full),
        ndrr: ndrr(&seq)?,
        sowtd: num_traits::ToPrimitive::to_f64(&w).unwrap(),
        order: order.names().to_vec(),
        quantified: quantified.iter().map(|&v| order.name(v).to_string()).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RankedOrder {
    pub order: Vec<String>,
    pub sotd_full_projection: u64,
    pub ndrr: u64,
}

const MAX_ENUMERATED: usize = 6;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Ranks variable orders for projecting `ps` (given over `order`) by the
/// sotd of the full projection, then ndrr, then the names. With no
/// candidates, every permutation is tried.
pub fn suggest_order(ps: &[Poly], order: &VarOrder, candidates: Option<&[VarOrder]>) -> Result<Vec<RankedOrder>> {
    suggest_order_within(ps, order, candidates, None)
}

/// [`suggest_order`], giving up with a resource-limit error once `time`
/// has elapsed (checked between orders).
pub fn suggest_order_within(
    ps: &[Poly],
    order: &VarOrder,
    candidates: Option<&[VarOrder]>,
    time: Option<Duration>,
) -> Result<Vec<RankedOrder>> {
    let start = Instant::now();
    let n = order.len();
    if n > MAX_ENUMERATED {
        return Err(CadError::Usage(format!("at most {MAX_ENUMERATED} variables can be enumerated, got {n}")));
    }
    let perms: Vec<Vec<usize>> = match candidates {
        None => permutations(n),
        Some(cs) => cs
            .iter()
            .map(|c| {
                if c.len() != n {
                    return Err(CadError::Usage("candidate order has the wrong length".into()));
                }
                (0..n)
                    .map(|i| c.index_of(order.name(i)).ok_or_else(|| CadError::UnknownVariable(order.name(i).into())))
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<_>>()?,
    };
    let mut ranked = Vec::new();
    for perm in perms {
        if time.is_some_and(|t| start.elapsed() > t) {
            return Err(CadError::ResourceLimit(format!("order ranking exceeded {}s", time.unwrap().as_secs())));
        }
        // perm[i] is the new position of variable i
        let mut names = vec![String::new(); n];
        for (i, &p) in perm.iter().enumerate() {
            names[p] = order.name(i).to_string();
        }
        let new_order = VarOrder::new(&names)?;
        let moved: Vec<Poly> = ps.iter().map(|p| permute(p, &perm)).collect();
        let seq = project_all(&distinct_polys(moved), &new_order, None)?;
        let full: Vec<Poly> = seq.all_factors().cloned().collect();
        ranked.push(RankedOrder { order: names, sotd_full_projection: sotd(&full), ndrr: ndrr(&seq)? });
    }
    ranked.sort_by(|a, b| (a.sotd_full_projection, a.ndrr, &a.order).cmp(&(b.sotd_full_projection, b.ndrr, &b.order)));
    Ok(ranked)
}

/// Renames variable i to perm[i].
fn permute(p: &Poly, perm: &[usize]) -> Poly {
    Poly::from_terms(
        p.nvars(),
        p.terms().iter().map(|(m, c)| {
            let mut e = vec![0; m.len()];
            for (i, &k) in m.iter().enumerate() {
                e[perm[i]] = k;
            }
            (e, c.clone())
        }),
    )
}
