//! Lifting: cells, stacks and the CAD tree, in full, layered and manifold
//! variants.
//!
//! Cells use Collins indexing: within a stack, odd positions are sectors and
//! even positions sections, so a cell's dimension is its number of odd index
//! entries. Stacks over distinct base cells are built on the rayon pool and
//! assembled by index, so the tree never depends on the schedule.

mod adjacency;
mod plot;
mod qe;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CadError, Result};
use crate::formula::{Atom, Formula};
use crate::poly::{Poly, Rat, VarOrder};
use crate::projection::{delineating_partials, project_all, Factorization, LevelJson, ProjectionSequence};
use crate::realalg::{
    compare, integer_above, integer_below, rational_between, roots_over, sign_at, RealAlgebraic, SampleCoordJson,
    SamplePoint,
};

pub use adjacency::{adjacency_2d, locate_2d, path_query, AdjacencyGraph2D, PathWitness};
pub use plot::{plot_2d, PlotFormat, PlotWindow, Raster};
pub use qe::{partial_truth_lift, qe, solution_formula, QeOptions, QeOutput};

/// `x_var` is the `root_index`-th real root (1-based) of factor `factor` of
/// the cell's level, over the base cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RootRef {
    pub factor: usize,
    pub root_index: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellBound {
    /// The whole space (the root of the tree).
    Whole,
    Section(RootRef),
    Sector {
        below: Option<RootRef>,
        above: Option<RootRef>,
    },
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub index: Vec<u32>,
    pub sample: SamplePoint,
    /// Signs of the factors of this cell's level (empty when not computed).
    pub signs: Vec<i8>,
    pub truth: Option<bool>,
    pub bound: CellBound,
    pub children: Vec<Cell>,
}

impl Cell {
    fn root() -> Cell {
        Cell {
            index: vec![],
            sample: SamplePoint::default(),
            signs: vec![],
            truth: None,
            bound: CellBound::Whole,
            children: vec![],
        }
    }

    pub fn dim(&self) -> usize {
        self.index.iter().filter(|&&i| i % 2 == 1).count()
    }

    pub fn depth(&self) -> usize {
        self.index.len()
    }

    pub fn is_section(&self) -> bool {
        self.index.last().is_some_and(|i| i % 2 == 0)
    }

    /// Cells at `depth`, in index order.
    pub fn descendants_at(&self, depth: usize) -> Vec<&Cell> {
        let mut out = Vec::new();
        self.collect_at(depth, &mut out);
        out
    }

    fn collect_at<'a>(&'a self, depth: usize, out: &mut Vec<&'a Cell>) {
        if self.depth() == depth {
            out.push(self);
        } else {
            for c in &self.children {
                c.collect_at(depth, out);
            }
        }
    }

    pub fn find(&self, index: &[u32]) -> Option<&Cell> {
        let mut c = self;
        for &i in index {
            c = c.children.iter().find(|d| d.index.last() == Some(&i))?;
        }
        Some(c)
    }

    fn count_all(&self) -> usize {
        1 + self.children.iter().map(|c| c.count_all()).sum::<usize>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "k")]
pub enum CadMode {
    Full,
    /// Only cells of dimension at least `k`.
    Layered(usize),
    /// Only the sections of the equational constraint at the top level.
    Manifold,
    /// Quantifier-directed lifting.
    Partial,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Limits {
    pub max_cells: usize,
    #[serde(skip)]
    pub time: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_cells: 1_000_000, time: Some(Duration::from_secs(600)) }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CadOptions {
    pub mode: CadMode,
    pub limits: Limits,
}

impl Default for CadOptions {
    fn default() -> Self {
        CadOptions { mode: CadMode::Full, limits: Limits::default() }
    }
}

/// Shared cell/time budget for one construction.
pub(crate) struct Budget {
    cells: AtomicUsize,
    limits: Limits,
    start: Instant,
}

impl Budget {
    pub(crate) fn new(limits: Limits) -> Self {
        Budget { cells: AtomicUsize::new(0), limits, start: Instant::now() }
    }

    pub(crate) fn charge(&self, n: usize) -> Result<()> {
        let total = self.cells.fetch_add(n, AtomicOrdering::Relaxed) + n;
        if total > self.limits.max_cells {
            return Err(CadError::ResourceLimit(format!("cell limit {} exceeded", self.limits.max_cells)));
        }
        if let Some(t) = self.limits.time {
            if self.start.elapsed() > t {
                return Err(CadError::ResourceLimit(format!("time limit {}s exceeded", t.as_secs())));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CADTree {
    pub seq: ProjectionSequence,
    pub options: CadOptions,
    pub root: Cell,
}

/// Which factors delimit a stack and whether sector signs are needed.
#[derive(Clone, Copy)]
pub(crate) struct StackSpec<'a> {
    pub only: Option<&'a [usize]>,
    pub sector_signs: bool,
}

impl StackSpec<'_> {
    pub(crate) const FULL: StackSpec<'static> = StackSpec { only: None, sector_signs: true };
}

/// Builds the stack over `base` for the factors of level `var`.
pub(crate) fn build_stack(seq: &ProjectionSequence, base: &Cell, spec: StackSpec) -> Result<Vec<Cell>> {
    let var = base.depth();
    let factors = &seq.level(var).factors;
    let mut nullified = vec![false; factors.len()];
    let mut roots: Vec<(RealAlgebraic, Vec<RootRef>)> = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        if spec.only.is_some_and(|o| !o.contains(&i)) {
            continue;
        }
        match roots_over(f, &base.sample, var) {
            Ok(rs) => {
                for (k, r) in rs.into_iter().enumerate() {
                    roots.push((r, vec![RootRef { factor: i, root_index: k as u32 + 1 }]));
                }
            }
            // A factor vanishing identically over the base is zero throughout
            // the cylinder. That is harmless over a point, and at the top
            // level, where nothing is projected further; elsewhere the
            // projection below it no longer guarantees delineability unless
            // the factor's partial derivatives were projected as well.
            Err(CadError::Nullified)
                if base.dim() == 0 || var + 1 == seq.nvars() || seq.delineated.contains(&f.normalize()) =>
            {
                nullified[i] = true
            }
            Err(CadError::Nullified) => {
                return Err(CadError::NotWellOriented { poly: f.to_string_with(&seq.order), cell: base.index.clone() })
            }
            Err(e) => return Err(e),
        }
    }
    roots.sort_by(|a, b| compare(&a.0, &b.0));
    let mut merged: Vec<(RealAlgebraic, Vec<RootRef>)> = Vec::with_capacity(roots.len());
    for (r, refs) in roots {
        match merged.last_mut() {
            Some((last, lrefs)) if compare(last, &r) == Ordering::Equal => lrefs.extend(refs),
            _ => merged.push((r, refs)),
        }
    }
    let signs_at = |sample: &SamplePoint, zero: &[RootRef]| -> Vec<i8> {
        factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let skipped = spec.only.is_some_and(|o| !o.contains(&i)) && !spec.sector_signs && zero.is_empty();
                if nullified[i] || zero.iter().any(|z| z.factor == i) || skipped {
                    0
                } else {
                    sign_at(f, sample)
                }
            })
            .collect()
    };
    let sector = |pos: u32, value: Rat, below: Option<RootRef>, above: Option<RootRef>| -> Cell {
        let sample = base.sample.extended(RealAlgebraic::rational(value));
        let signs = if spec.sector_signs { signs_at(&sample, &[]) } else { vec![] };
        let mut index = base.index.clone();
        index.push(pos);
        Cell { index, sample, signs, truth: None, bound: CellBound::Sector { below, above }, children: vec![] }
    };
    let mut cells = Vec::with_capacity(2 * merged.len() + 1);
    if merged.is_empty() {
        cells.push(sector(1, Rat::from_integer(0.into()), None, None));
        return Ok(cells);
    }
    cells.push(sector(1, integer_below(&merged[0].0), None, Some(merged[0].1[0])));
    for (k, (r, refs)) in merged.iter().enumerate() {
        let sample = base.sample.extended_with(r.clone(), Some(factors[refs[0].factor].clone()));
        let signs = signs_at(&sample, refs);
        let mut index = base.index.clone();
        index.push(2 * k as u32 + 2);
        cells.push(Cell { index, sample, signs, truth: None, bound: CellBound::Section(refs[0]), children: vec![] });
        let pos = 2 * k as u32 + 3;
        match merged.get(k + 1) {
            Some((next, nrefs)) => cells.push(sector(pos, rational_between(r, next), Some(refs[0]), Some(nrefs[0]))),
            None => cells.push(sector(pos, integer_above(r), Some(refs[0]), None)),
        }
    }
    Ok(cells)
}

/// Projects `ps` and runs `build` on the sequence. When `build` reports a
/// factor vanishing identically over a positive-dimensional cell below the
/// top level, the factor's partial derivatives are added to the input and
/// the whole computation restarts; a factor that still fails after that is
/// reported as not well oriented.
pub fn with_delineation<T>(
    ps: &[Poly],
    order: &VarOrder,
    ec: Option<&Poly>,
    mut build: impl FnMut(&ProjectionSequence) -> Result<T>,
) -> Result<T> {
    let mut input = ps.to_vec();
    let mut delineated: Vec<Poly> = Vec::new();
    loop {
        let mut seq = project_all(&input, order, ec)?;
        seq.delineated = delineated.clone();
        match build(&seq) {
            Err(CadError::NotWellOriented { poly, cell }) => {
                let f = seq.all_factors().find(|f| f.to_string_with(order) == poly).map(|f| f.normalize());
                match f {
                    Some(f) if !delineated.contains(&f) => {
                        for d in delineating_partials(&f) {
                            if !input.contains(&d) {
                                input.push(d);
                            }
                        }
                        delineated.push(f);
                    }
                    _ => return Err(CadError::NotWellOriented { poly, cell }),
                }
            }
            r => return r,
        }
    }
}

/// Builds a sign-invariant CAD for the projection factors.
pub fn build_cad(seq: &ProjectionSequence, opts: &CadOptions) -> Result<CADTree> {
    let n = seq.nvars();
    let ec_top: Vec<usize> = match opts.mode {
        CadMode::Manifold => {
            let ec = seq
                .ec
                .as_ref()
                .ok_or_else(|| CadError::Usage("manifold lifting needs an equational constraint".into()))?;
            if ec.main_var() != Some(n - 1) {
                return Err(CadError::Usage("manifold lifting needs a constraint in the top variable".into()));
            }
            seq.ec_factors.clone()
        }
        CadMode::Partial => return Err(CadError::Usage("partial lifting is driven by a formula; use qe".into())),
        _ => vec![],
    };
    let budget = Budget::new(opts.limits);
    let mut root = Cell::root();
    lift_full(seq, opts.mode, &ec_top, &budget, &mut root)?;
    Ok(CADTree { seq: seq.clone(), options: *opts, root })
}

fn lift_full(
    seq: &ProjectionSequence,
    mode: CadMode,
    ec_top: &[usize],
    budget: &Budget,
    cell: &mut Cell,
) -> Result<()> {
    let n = seq.nvars();
    let depth = cell.depth();
    if depth == n {
        return Ok(());
    }
    let mut children = build_stack(seq, cell, StackSpec::FULL)?;
    let remaining = n - depth - 1;
    match mode {
        CadMode::Layered(k) => children.retain(|c| c.dim() + remaining >= k),
        CadMode::Manifold if depth == n - 1 => {
            children.retain(|c| c.is_section() && ec_top.iter().any(|&i| c.signs[i] == 0))
        }
        _ => {}
    }
    budget.charge(children.len())?;
    children.par_iter_mut().try_for_each(|c| lift_full(seq, mode, ec_top, budget, c))?;
    cell.children = children;
    Ok(())
}

/// Sign of an atom polynomial at a cell, from the factor signs along the
/// path to the cell when the polynomial factors over them.
pub(crate) struct SignOracle<'a> {
    table: Vec<(Poly, Option<Factorization>)>,
    seq: &'a ProjectionSequence,
}

impl<'a> SignOracle<'a> {
    pub(crate) fn new(seq: &'a ProjectionSequence, f: &Formula) -> Result<Self> {
        let mut table: Vec<(Poly, Option<Factorization>)> = Vec::new();
        for a in f.atoms() {
            let Atom::Poly { poly, .. } = a else {
                return Err(CadError::Usage("indexed-root atoms cannot be evaluated over a CAD".into()));
            };
            if !table.iter().any(|(p, _)| p == poly) {
                table.push((poly.clone(), seq.factorize(poly)));
            }
        }
        Ok(SignOracle { table, seq })
    }

    /// `chain[v]` holds the signs of level-`v` factors at the cell.
    pub(crate) fn sign(&self, p: &Poly, chain: &[&[i8]], sample: &SamplePoint) -> i8 {
        let entry = self.table.iter().find(|(q, _)| q == p);
        match entry.and_then(|(_, f)| f.as_ref()) {
            Some(fz) if fz.parts.iter().all(|&(v, i, _)| chain.get(v).is_some_and(|s| i < s.len())) => {
                let mut s: i8 = if fz.constant > Rat::from_integer(0.into()) { 1 } else { -1 };
                for &(v, i, k) in &fz.parts {
                    let fs = chain[v][i];
                    s *= if k % 2 == 0 { fs * fs } else { fs };
                }
                s
            }
            _ => {
                let _ = self.seq;
                sign_at(p, sample)
            }
        }
    }

    pub(crate) fn eval(&self, f: &Formula, chain: &[&[i8]], sample: &SamplePoint) -> Result<bool> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(Atom::Poly { poly, rel }) => rel.holds(self.sign(poly, chain, sample)),
            Formula::Atom(Atom::Root { .. }) => {
                return Err(CadError::Usage("indexed-root atoms cannot be evaluated over a CAD".into()))
            }
            Formula::Not(g) => !self.eval(g, chain, sample)?,
            Formula::And(gs) => {
                for g in gs {
                    if !self.eval(g, chain, sample)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(gs) => {
                for g in gs {
                    if self.eval(g, chain, sample)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Quant(..) => return Err(CadError::Usage("quantified matrix".into())),
        })
    }
}

/// Marks every leaf with the truth of the quantifier-free `matrix`.
pub fn truth_evaluate(tree: &mut CADTree, matrix: &Formula) -> Result<()> {
    if !matrix.is_quantifier_free() {
        return Err(CadError::Usage("truth evaluation needs a quantifier-free formula".into()));
    }
    let oracle = SignOracle::new(&tree.seq, matrix)?;
    let n = tree.seq.nvars();
    fn walk(c: &mut Cell, chain: &mut Vec<Vec<i8>>, n: usize, o: &SignOracle, m: &Formula) -> Result<()> {
        if c.depth() > 0 {
            chain.push(c.signs.clone());
        }
        if c.depth() == n {
            let refs: Vec<&[i8]> = chain.iter().map(|v| v.as_slice()).collect();
            c.truth = Some(o.eval(m, &refs, &c.sample)?);
        } else {
            for d in &mut c.children {
                walk(d, chain, n, o, m)?;
            }
        }
        if c.depth() > 0 {
            chain.pop();
        }
        Ok(())
    }
    walk(&mut tree.root, &mut Vec::new(), n, &oracle, matrix)
}

#[derive(Serialize)]
pub struct CellJson {
    pub index: Vec<u32>,
    pub dim: usize,
    pub sample: Vec<SampleCoordJson>,
    pub signs: BTreeMap<String, i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<bool>,
}

#[derive(Serialize)]
pub struct CadJson {
    pub order: Vec<String>,
    pub options: CadOptions,
    pub levels: Vec<LevelJson>,
    pub cells: Vec<CellJson>,
}

impl CADTree {
    pub fn nvars(&self) -> usize {
        self.seq.nvars()
    }

    /// Top-level cells, in index order.
    pub fn leaves(&self) -> Vec<&Cell> {
        self.root.descendants_at(self.nvars())
    }

    pub fn cell_count(&self) -> usize {
        self.leaves().len()
    }

    /// All constructed cells below the root, at every level.
    pub fn total_cells(&self) -> usize {
        self.root.count_all() - 1
    }

    /// Number of cells in each stack over the cells of `depth`.
    pub fn stack_profile(&self, depth: usize) -> Vec<usize> {
        self.root.descendants_at(depth).iter().map(|c| c.children.len()).collect()
    }

    pub fn to_json(&self) -> CadJson {
        let order = &self.seq.order;
        let cells = self
            .leaves()
            .into_iter()
            .map(|c| {
                let mut signs = BTreeMap::new();
                let mut path = self.root.clone_path(&c.index);
                path.remove(0);
                for (v, cell) in path.iter().enumerate() {
                    for (i, f) in self.seq.level(v).factors.iter().enumerate() {
                        if let Some(s) = cell.get(i) {
                            signs.insert(f.to_string_with(order), *s);
                        }
                    }
                }
                CellJson { index: c.index.clone(), dim: c.dim(), sample: c.sample.to_json(), signs, truth: c.truth }
            })
            .collect();
        CadJson { order: order.names().to_vec(), options: self.options, levels: self.seq.to_json(), cells }
    }
}

impl Cell {
    /// Sign vectors of the cells from the root down to `index`.
    fn clone_path(&self, index: &[u32]) -> Vec<Vec<i8>> {
        let mut out = vec![self.signs.clone()];
        let mut c = self;
        for &i in index {
            match c.children.iter().find(|d| d.index.last() == Some(&i)) {
                Some(d) => {
                    out.push(d.signs.clone());
                    c = d;
                }
                None => break,
            }
        }
        out
    }
}
