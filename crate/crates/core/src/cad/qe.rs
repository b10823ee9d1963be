//! Quantifier elimination: quantifier-directed (partial) lifting and
//! solution-formula construction.
//!
//! The solution formula is a disjunction of sign conditions on the free
//! projection factors, one greedy prime implicant per group of true cells.
//! Cells whose sign vector is shared with a false cell cannot be described
//! that way; those are written with indexed-root constraints
//! (`root_k(f, x) < y < root_j(g, x)`), merging consecutive true cells of a
//! stack into one interval.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::{
    build_stack, with_delineation, Budget, CADTree, CadMode, CadOptions, Cell, CellBound, Limits, RootRef, SignOracle,
    StackSpec,
};
use crate::error::{CadError, Result};
use crate::formula::{to_prenex, Atom, Formula, PrenexForm, Quantifier, Relop};
use crate::poly::{Poly, VarOrder};
use crate::projection::ProjectionSequence;

#[derive(Clone, Debug)]
pub struct QeOptions {
    /// Equational constraint: an equation that is a conjunct of the matrix.
    pub ec: Option<Poly>,
    /// Stop lifting a quantified stack once its truth is decided.
    pub partial: bool,
    pub limits: Limits,
}

impl Default for QeOptions {
    fn default() -> Self {
        QeOptions { ec: None, partial: true, limits: Limits::default() }
    }
}

#[derive(Clone, Debug)]
pub struct QeOutput {
    /// Quantifier-free, over the caller's variable order.
    pub formula: Formula,
    pub tree: CADTree,
    /// Order used internally (bound variables may have been renamed).
    pub order: VarOrder,
    pub free: usize,
}

/// Eliminates the quantifiers of `f`. Quantified variables must be the last
/// ones of `order`, in prefix order.
pub fn qe(f: &Formula, order: &VarOrder, opts: &QeOptions) -> Result<QeOutput> {
    let (mut prenex, order2) = to_prenex(f, order)?;
    // like quantifiers commute, so each block may follow the variable order
    let mut i = 0;
    while i < prenex.prefix.len() {
        let q = prenex.prefix[i].0;
        let j = (i..prenex.prefix.len()).find(|&j| prenex.prefix[j].0 != q).unwrap_or(prenex.prefix.len());
        prenex.prefix[i..j].sort_by_key(|&(_, v)| v);
        i = j;
    }
    let n = order2.len();
    let k = n - prenex.prefix.len();
    for (j, (_, v)) in prenex.prefix.iter().enumerate() {
        if *v != k + j {
            return Err(CadError::Usage(format!(
                "quantified variable {} must be at position {} of the order",
                order2.name(*v),
                k + j + 1
            )));
        }
    }
    let matrix = prenex.matrix.with_nvars(n);
    let mut polys = Vec::new();
    for a in matrix.atoms() {
        match a {
            Atom::Poly { poly, .. } => polys.push(poly.clone()),
            Atom::Root { .. } => return Err(CadError::Usage("indexed-root atoms are not accepted by qe".into())),
        }
    }
    let ec = match &opts.ec {
        None => None,
        Some(e) => {
            let e = e.with_nvars(n);
            if !is_equational_conjunct(&matrix, &e) {
                return Err(CadError::Usage("the equational constraint is not a conjunct of the matrix".into()));
            }
            // reduction is only exploited at quantified levels
            e.main_var().filter(|&v| v >= k).map(|_| e)
        }
    };
    let prenex = PrenexForm { prefix: prenex.prefix, matrix };
    let tree = with_delineation(&polys, &order2, ec.as_ref(), |seq| partial_truth_lift(seq, &prenex, opts))?;
    let formula = solution_formula(&tree, k)?.with_nvars(order.len());
    Ok(QeOutput { formula, tree, order: order2, free: k })
}

fn is_equational_conjunct(m: &Formula, e: &Poly) -> bool {
    let hit = |f: &Formula| matches!(f, Formula::Atom(Atom::Poly { poly, rel: Relop::Eq }) if poly.normalize() == e.normalize());
    match m {
        Formula::And(gs) => gs.iter().any(hit),
        f => hit(f),
    }
}

struct Ctx<'a> {
    seq: &'a ProjectionSequence,
    prefix: &'a [(Quantifier, usize)],
    oracle: SignOracle<'a>,
    matrix: &'a Formula,
    budget: Budget,
    partial: bool,
    free: usize,
    /// Per level: factor indices of an equation that is a conjunct of the
    /// matrix and has that level's variable as main variable.
    sections_only: Vec<Option<Vec<usize>>>,
}

/// At each quantified level, the factors of one equational conjunct whose
/// factors all live at that level (the designated constraint first). Off
/// such a conjunct's zero set the matrix is false, so only its sections
/// need lifting.
fn equational_levels(seq: &ProjectionSequence, matrix: &Formula, free: usize) -> Vec<Option<Vec<usize>>> {
    let n = seq.nvars();
    let mut out: Vec<Option<Vec<usize>>> = vec![None; n];
    if let Some(v) = seq.ec.as_ref().and_then(|e| e.main_var()).filter(|&v| v >= free) {
        out[v] = Some(seq.ec_factors.clone());
    }
    let conjuncts: Vec<&Formula> = match matrix {
        Formula::And(gs) => gs.iter().collect(),
        f => vec![f],
    };
    for c in conjuncts {
        let Formula::Atom(Atom::Poly { poly, rel: Relop::Eq }) = c else { continue };
        let Some(v) = poly.main_var().filter(|&v| v >= free) else { continue };
        if out[v].is_some() {
            continue;
        }
        let Some(fz) = seq.factorize(poly) else { continue };
        if fz.parts.iter().all(|&(var, _, _)| var == v) && !fz.parts.is_empty() {
            let mut idx: Vec<usize> = fz.parts.iter().map(|&(_, i, _)| i).collect();
            idx.sort_unstable();
            idx.dedup();
            out[v] = Some(idx);
        }
    }
    out
}

/// Whether `f` (main variable `v`) vanishes identically over the sample.
fn nullified_over(f: &Poly, sample: &crate::realalg::SamplePoint, v: usize) -> bool {
    f.coefficients(v).iter().all(|c| c.is_zero() || crate::realalg::sign_at(c, sample) == 0)
}

/// Lifts the free levels completely and the quantified levels only as far as
/// needed to decide each free cell; free cells receive their truth.
pub fn partial_truth_lift(seq: &ProjectionSequence, prenex: &PrenexForm, opts: &QeOptions) -> Result<CADTree> {
    let n = seq.nvars();
    let free = n - prenex.prefix.len();
    let ctx = Ctx {
        seq,
        prefix: &prenex.prefix,
        oracle: SignOracle::new(seq, &prenex.matrix)?,
        matrix: &prenex.matrix,
        budget: Budget::new(opts.limits),
        partial: opts.partial,
        free,
        sections_only: equational_levels(seq, &prenex.matrix, free),
    };
    let mut root = Cell::root();
    lift_free(&ctx, &mut root, Vec::new())?;
    let mode = if opts.partial { CadMode::Partial } else { CadMode::Full };
    Ok(CADTree { seq: seq.clone(), options: CadOptions { mode, limits: opts.limits }, root })
}

fn lift_free(ctx: &Ctx, cell: &mut Cell, mut chain: Vec<Vec<i8>>) -> Result<()> {
    if cell.depth() > 0 {
        chain.push(cell.signs.clone());
    }
    if cell.depth() == ctx.free {
        let t = decide(ctx, cell, &mut chain)?;
        cell.truth = Some(t);
        return Ok(());
    }
    let mut children = build_stack(ctx.seq, cell, StackSpec::FULL)?;
    ctx.budget.charge(children.len())?;
    children.par_iter_mut().try_for_each(|c| lift_free(ctx, c, chain.clone()))?;
    cell.children = children;
    Ok(())
}

/// Truth of the quantified tail at `cell`; `chain` already holds its signs.
fn decide(ctx: &Ctx, cell: &mut Cell, chain: &mut Vec<Vec<i8>>) -> Result<bool> {
    let d = cell.depth();
    if d == ctx.seq.nvars() {
        let refs: Vec<&[i8]> = chain.iter().map(|v| v.as_slice()).collect();
        return ctx.oracle.eval(ctx.matrix, &refs, &cell.sample);
    }
    let q = ctx.prefix[d - ctx.free].0;
    let only = ctx.sections_only[d].as_deref().filter(|idx| {
        let fs = &ctx.seq.level(d).factors;
        !idx.iter().any(|&i| nullified_over(&fs[i], &cell.sample, d))
    });
    let ec_here = only.is_some();
    let spec = match only {
        Some(idx) => StackSpec { only: Some(idx), sector_signs: false },
        None => StackSpec::FULL,
    };
    let mut children = build_stack(ctx.seq, cell, spec)?;
    ctx.budget.charge(children.len())?;
    let want = q == Quantifier::Exists;
    let mut result = !want;
    for c in children.iter_mut() {
        let t = if ec_here && !c.is_section() {
            // off the constraint the matrix is false
            false
        } else {
            chain.push(c.signs.clone());
            let t = decide(ctx, c, chain);
            chain.pop();
            t?
        };
        c.truth = Some(t);
        if t == want {
            result = want;
            if ctx.partial {
                break;
            }
        }
    }
    cell.children = children;
    Ok(result)
}

const NEG: u8 = 1;
const ZERO: u8 = 2;
const POS: u8 = 4;
const ANY: u8 = 7;

fn bit(s: i8) -> u8 {
    match s {
        -1 => NEG,
        0 => ZERO,
        _ => POS,
    }
}

fn mask_relop(m: u8) -> Option<Relop> {
    Some(match m {
        NEG => Relop::Lt,
        ZERO => Relop::Eq,
        POS => Relop::Gt,
        3 => Relop::Le,
        6 => Relop::Ge,
        5 => Relop::Ne,
        _ => return None,
    })
}

fn covers(imp: &[u8], sig: &[i8]) -> bool {
    imp.iter().zip(sig).all(|(m, &s)| m & bit(s) != 0)
}

/// Greedy implicant for `sig` that excludes every signature in `falses`.
/// `order` lists the literal positions in the order they are tried.
fn implicant(sig: &[i8], falses: &[&Vec<i8>], order: &[usize]) -> Vec<u8> {
    let mut imp: Vec<u8> = sig.iter().map(|&s| bit(s)).collect();
    // number of literals each false signature fails
    let mut viol: Vec<usize> =
        falses.iter().map(|f| imp.iter().zip(f.iter()).filter(|(m, &s)| *m & bit(s) == 0).count()).collect();
    for &i in order {
        let old = imp[i];
        let mut options = vec![ANY];
        match old {
            NEG => options.push(NEG | ZERO),
            POS => options.push(ZERO | POS),
            _ => options.extend([NEG | ZERO, ZERO | POS]),
        }
        for m in options {
            let ok = falses.iter().zip(&viol).all(|(f, &v)| {
                let b = bit(f[i]);
                !(old & b == 0 && m & b != 0 && v == 1)
            });
            if ok {
                for (f, v) in falses.iter().zip(viol.iter_mut()) {
                    let b = bit(f[i]);
                    if old & b == 0 && m & b != 0 {
                        *v -= 1;
                    }
                }
                imp[i] = m;
                break;
            }
        }
    }
    imp
}

struct Leaf<'a> {
    cell: &'a Cell,
    sig: Vec<i8>,
    truth: bool,
}

fn collect_leaves<'a>(c: &'a Cell, k: usize, chain: &mut Vec<i8>, out: &mut Vec<Leaf<'a>>) -> Result<()> {
    let len = chain.len();
    chain.extend(&c.signs);
    if c.depth() == k {
        let truth = c.truth.ok_or_else(|| CadError::Usage("cell without truth value".into()))?;
        out.push(Leaf { cell: c, sig: chain.clone(), truth });
    } else {
        for d in &c.children {
            collect_leaves(d, k, chain, out)?;
        }
    }
    chain.truncate(len);
    Ok(())
}

fn root_atom(seq: &ProjectionSequence, var: usize, r: RootRef, rel: Relop) -> Formula {
    Formula::Atom(Atom::Root { var, rel, index: r.root_index, poly: seq.level(var).factors[r.factor].clone() })
}

/// Indexed-root description of a cell's position in its own stack.
fn bound_formula(seq: &ProjectionSequence, var: usize, b: &CellBound) -> Formula {
    match b {
        CellBound::Whole => Formula::True,
        CellBound::Section(r) => root_atom(seq, var, *r, Relop::Eq),
        CellBound::Sector { below, above } => Formula::and(
            below
                .iter()
                .map(|r| root_atom(seq, var, *r, Relop::Gt))
                .chain(above.iter().map(|r| root_atom(seq, var, *r, Relop::Lt)))
                .collect(),
        ),
    }
}

/// Quantifier-free description of the true free cells (depth `k`).
pub fn solution_formula(tree: &CADTree, k: usize) -> Result<Formula> {
    let seq = &tree.seq;
    if k == 0 {
        return Ok(if tree.root.truth.unwrap_or(false) { Formula::True } else { Formula::False });
    }
    let mut leaves = Vec::new();
    collect_leaves(&tree.root, k, &mut Vec::new(), &mut leaves)?;
    let factors: Vec<(usize, &Poly)> = (0..k).flat_map(|v| seq.level(v).factors.iter().map(move |f| (v, f))).collect();
    let false_sigs: BTreeSet<&Vec<i8>> = leaves.iter().filter(|l| !l.truth).map(|l| &l.sig).collect();
    let true_sigs: BTreeSet<&Vec<i8>> =
        leaves.iter().filter(|l| l.truth && !false_sigs.contains(&l.sig)).map(|l| &l.sig).collect();
    if true_sigs.is_empty() && leaves.iter().all(|l| !l.truth) {
        return Ok(Formula::False);
    }
    if false_sigs.is_empty() {
        return Ok(Formula::True);
    }
    // try to drop literals of high level and degree first
    let mut lit_order: Vec<usize> = (0..factors.len()).collect();
    lit_order.sort_by_key(|&i| {
        let (v, f) = factors[i];
        (std::cmp::Reverse(v), std::cmp::Reverse(f.total_degree()), std::cmp::Reverse(f.num_terms()), i)
    });
    let falses: Vec<&Vec<i8>> = false_sigs.iter().copied().collect();
    let mut imps: Vec<Vec<u8>> = Vec::new();
    for s in &true_sigs {
        if imps.iter().any(|m| covers(m, s)) {
            continue;
        }
        imps.push(implicant(s, &falses, &lit_order));
    }
    // drop implicants whose true signatures are all covered by the others
    let mut i = imps.len();
    while i > 0 {
        i -= 1;
        let redundant = true_sigs
            .iter()
            .filter(|s| covers(&imps[i], s))
            .all(|s| imps.iter().enumerate().any(|(j, m)| j != i && covers(m, s)));
        if redundant {
            imps.remove(i);
        }
    }
    let mut disjuncts: Vec<Formula> = imps
        .iter()
        .map(|imp| {
            Formula::and(
                imp.iter()
                    .zip(&factors)
                    .filter_map(|(&m, (_, f))| mask_relop(m).map(|r| Formula::atom((*f).clone(), r)))
                    .collect(),
            )
        })
        .collect();
    disjuncts.extend(conflict_cells(tree, k, &leaves, &false_sigs));
    Ok(Formula::or(disjuncts))
}

/// Root-based descriptions of true cells that share a signature with a false
/// cell, as runs of consecutive true cells per stack.
fn conflict_cells(tree: &CADTree, k: usize, leaves: &[Leaf], false_sigs: &BTreeSet<&Vec<i8>>) -> Vec<Formula> {
    let seq = &tree.seq;
    let mut parents: BTreeMap<Vec<u32>, ()> = BTreeMap::new();
    for l in leaves.iter().filter(|l| l.truth && false_sigs.contains(&l.sig)) {
        parents.insert(l.cell.index[..k - 1].to_vec(), ());
    }
    let mut out = Vec::new();
    for pidx in parents.keys() {
        let mut base = Vec::new();
        let mut c = &tree.root;
        for (v, &i) in pidx.iter().enumerate() {
            c = c.children.iter().find(|d| d.index.last() == Some(&i)).expect("parent exists");
            base.push(bound_formula(seq, v, &c.bound));
        }
        let stack = &c.children;
        let conflict =
            |cell: &Cell| leaves.iter().any(|l| std::ptr::eq(l.cell, cell) && l.truth && false_sigs.contains(&l.sig));
        let var = k - 1;
        let mut runs = Vec::new();
        let mut j = 0;
        while j < stack.len() {
            if stack[j].truth != Some(true) {
                j += 1;
                continue;
            }
            let start = j;
            while j + 1 < stack.len() && stack[j + 1].truth == Some(true) {
                j += 1;
            }
            if (start..=j).any(|t| conflict(&stack[t])) {
                let mut parts = Vec::new();
                match &stack[start].bound {
                    CellBound::Section(r) => parts.push(root_atom(seq, var, *r, Relop::Ge)),
                    CellBound::Sector { below: Some(r), .. } => parts.push(root_atom(seq, var, *r, Relop::Gt)),
                    _ => {}
                }
                match &stack[j].bound {
                    CellBound::Section(r) => parts.push(root_atom(seq, var, *r, Relop::Le)),
                    CellBound::Sector { above: Some(r), .. } => parts.push(root_atom(seq, var, *r, Relop::Lt)),
                    _ => {}
                }
                runs.push(Formula::and(parts));
            }
            j += 1;
        }
        base.push(Formula::or(runs));
        out.push(Formula::and(base));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{eval_qf, parse_formula, sample_equivalent, BoundSearch, Sampler};
    use crate::poly::ratio;

    fn run(src: &str, vars: &str) -> (QeOutput, VarOrder) {
        let o = VarOrder::parse(vars).unwrap();
        let f = parse_formula(src, &o).unwrap();
        (qe(&f, &o, &QeOptions::default()).unwrap(), o)
    }

    #[test]
    fn circle_shadow() {
        let (out, o) = run("(E y)[x^2+y^2-1 = 0]", "x,y");
        let want = parse_formula("x^2-1 <= 0", &o).unwrap();
        let v = sample_equivalent(&out.formula, &want, &Sampler::new(7), 2000, &BoundSearch::default()).unwrap();
        assert!(v.passed(), "{} vs x^2-1<=0: {v:?}", out.formula.to_text(&o));
    }

    #[test]
    fn sentences_decide() {
        let (out, _) = run("(A x)[x^2 + 1 > 0]", "x");
        assert_eq!(out.formula, Formula::True);
        let (out, _) = run("(E x)[x^2 + 1 < 0]", "x");
        assert_eq!(out.formula, Formula::False);
    }

    #[test]
    fn yang_zeng_truth_values() {
        let (out, o) = run("(A x)[4*x^8 - 4*(L-3)*x^6 - 2*(3*L-6)*x^4 - 2*(L-3)*x^2 + 1 > 0]", "L,x");
        for (l, t) in [(-1, true), (0, true), (2, true), (3, false)] {
            assert_eq!(
                eval_qf(&out.formula, &[Some(ratio(l, 1)), None]).unwrap(),
                t,
                "L={l}: {}",
                out.formula.to_text(&o)
            );
        }
    }

    #[test]
    fn partial_never_builds_more() {
        let o = VarOrder::parse("x,y").unwrap();
        let f = parse_formula("(E y)[y^2 - x > 0 /\\ y + x < 3]", &o).unwrap();
        let p = qe(&f, &o, &QeOptions::default()).unwrap();
        let full = qe(&f, &o, &QeOptions { partial: false, ..Default::default() }).unwrap();
        assert!(p.tree.total_cells() <= full.tree.total_cells());
        let v = sample_equivalent(&p.formula, &full.formula, &Sampler::new(3), 1000, &BoundSearch::default()).unwrap();
        assert!(v.passed());
    }

    #[test]
    fn trivial_existential_stops_early() {
        let (out, _) = run("(E y)[y > 0]", "x,y");
        assert_eq!(out.formula, Formula::True);
    }

    #[test]
    fn conflicting_signatures_use_root_atoms() {
        // x > 0 /\ y between the two roots of y^2 - x: sign vectors of the
        // free level alone cannot separate the true part
        let (out, o) = run("(E z)[z^2 + y^2 + x^2 - 4 < 0 /\\ y - x^2 > 0]", "x,y,z");
        let want = parse_formula("x^2 + y^2 - 4 < 0 /\\ y - x^2 > 0", &o).unwrap();
        let v = sample_equivalent(&out.formula, &want, &Sampler::new(11), 2000, &BoundSearch::default()).unwrap();
        assert!(v.passed(), "{}: {v:?}", out.formula.to_text(&o));
    }

    #[test]
    fn quantifier_position_is_checked() {
        let o = VarOrder::parse("x,y").unwrap();
        let f = parse_formula("(E x)[x^2 + y^2 - 1 = 0]", &o).unwrap();
        assert!(matches!(qe(&f, &o, &QeOptions::default()), Err(CadError::Usage(_))));
    }

    #[test]
    fn equational_constraint_reduction() {
        let o = VarOrder::parse("r,a,b").unwrap();
        let f = parse_formula("(E a)(E b)[a^2 + b^2 - r^2 = 0 /\\ a - 2 > 0 /\\ b > 0]", &o).unwrap();
        let ec = crate::formula::parse_poly("a^2 + b^2 - r^2", &o).unwrap();
        let out = qe(&f, &o, &QeOptions { ec: Some(ec), ..Default::default() }).unwrap();
        let want = parse_formula("r^2 - 4 > 0", &o).unwrap();
        let v = sample_equivalent(&out.formula, &want, &Sampler::new(5), 2000, &BoundSearch::default()).unwrap();
        assert!(v.passed(), "{}: {v:?}", out.formula.to_text(&o));
    }
}
