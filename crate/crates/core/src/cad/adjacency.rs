//! Cell adjacency in two dimensions and connectivity queries.
//!
//! Within a stack, consecutive cells are adjacent. Across stacks, a base
//! sector `b` meets its endpoint `x0`: a sector of `b`'s stack touches the
//! vertical sector over `x0` containing `(x0, y*)` when the horizontal line
//! `y = y*` runs inside it near `x0`, which is decided exactly by stepping to
//! a rational `x` before the line meets any factor. Sections over `b` tend to
//! a point section over `x0` exactly when they lie between the sectors that
//! touch the vertical sectors just below and above that point.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::CADTree;
use crate::error::{CadError, Result};
use crate::formula::{eval_qf, Formula};
use crate::poly::Rat;
use crate::realalg::{compare, integer_above, integer_below, isolate_roots, rational_between, RealAlgebraic};

#[derive(Clone, Debug, Default)]
pub struct AdjacencyGraph2D {
    /// Collins indices of the cells.
    pub nodes: Vec<Vec<u32>>,
    /// Pairs `(i, j)` with `i < j`; the lower-dimensional cell of each pair
    /// is the shared boundary.
    pub edges: BTreeSet<(usize, usize)>,
}

impl AdjacencyGraph2D {
    pub fn node(&self, index: &[u32]) -> Option<usize> {
        self.nodes.iter().position(|n| n == index)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbours(&self, a: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(i, j)| {
                if i == a {
                    Some(j)
                } else if j == a {
                    Some(i)
                } else {
                    None
                }
            })
            .collect()
    }
}

fn dim_of(index: &[u32]) -> usize {
    index.iter().filter(|&&i| i % 2 == 1).count()
}

fn check_2d(tree: &CADTree) -> Result<()> {
    if tree.nvars() != 2 {
        return Err(CadError::Usage("adjacency and paths need a two-variable CAD".into()));
    }
    Ok(())
}

/// Distinct real roots in `y` of the second-level factors at `x`.
fn fiber_roots(tree: &CADTree, x: &Rat) -> Result<Vec<RealAlgebraic>> {
    let mut roots = Vec::new();
    for f in &tree.seq.level(1).factors {
        let g = f.subst(0, x);
        if g.is_zero() || !g.contains_var(1) {
            continue;
        }
        roots.extend(isolate_roots(&g)?);
    }
    roots.sort_by(compare);
    roots.dedup_by(|a, b| compare(a, b) == Ordering::Equal);
    Ok(roots)
}

/// Position (Collins index) of `y` among `roots`.
fn position(roots: &[RealAlgebraic], y: &Rat) -> u32 {
    let yv = RealAlgebraic::rational(y.clone());
    let mut below = 0u32;
    for r in roots {
        match compare(r, &yv) {
            Ordering::Less => below += 1,
            Ordering::Equal => return 2 * below + 2,
            Ordering::Greater => break,
        }
    }
    2 * below + 1
}

/// Sorted distinct real roots of the first-level factors.
fn base_roots(tree: &CADTree) -> Vec<RealAlgebraic> {
    let mut roots = Vec::new();
    for f in &tree.seq.level(0).factors {
        roots.extend(isolate_roots(f).unwrap_or_default());
    }
    roots.sort_by(compare);
    roots.dedup_by(|a, b| compare(a, b) == Ordering::Equal);
    roots
}

/// The base point with (even) Collins index `i`.
fn base_point(tree: &CADTree, i: u32) -> RealAlgebraic {
    base_roots(tree)[i as usize / 2 - 1].clone()
}

/// Index of the base cell containing `x`.
fn base_position(tree: &CADTree, x: &Rat) -> u32 {
    let xv = RealAlgebraic::rational(x.clone());
    let mut below = 0u32;
    for r in &base_roots(tree) {
        match compare(r, &xv) {
            Ordering::Less => below += 1,
            Ordering::Equal => return 2 * below + 2,
            Ordering::Greater => break,
        }
    }
    2 * below + 1
}

/// Collins index of the cell containing the rational point `(x, y)`.
pub fn locate_2d(tree: &CADTree, x: &Rat, y: &Rat) -> Result<Vec<u32>> {
    check_2d(tree)?;
    let i = base_position(tree, x);
    let j = position(&fiber_roots(tree, x)?, y);
    Ok(vec![i, j])
}

/// Rational `x` in base sector `b`, strictly on `b`'s side of `x0`, such that
/// no second-level factor vanishes on the horizontal segment from `x0` to `x`
/// at height `y`.
fn near_x(tree: &CADTree, b: u32, x0: &RealAlgebraic, right: bool, y: &Rat) -> Result<Rat> {
    let bases = base_roots(tree);
    // the far end of b
    let far = if right { bases.get(b as usize / 2) } else { (b >= 3).then(|| &bases[b as usize / 2 - 1]) };
    let mut cap: Option<RealAlgebraic> = far.cloned();
    for f in &tree.seq.level(1).factors {
        let g = f.subst(1, y);
        if g.is_zero() || !g.contains_var(0) {
            continue;
        }
        for r in isolate_roots(&g)? {
            let beyond = if right { compare(&r, x0) == Ordering::Greater } else { compare(&r, x0) == Ordering::Less };
            let closer = match &cap {
                None => true,
                Some(c) => {
                    if right {
                        compare(&r, c) == Ordering::Less
                    } else {
                        compare(&r, c) == Ordering::Greater
                    }
                }
            };
            if beyond && closer {
                cap = Some(r);
            }
        }
    }
    Ok(match (&cap, right) {
        (Some(c), true) => rational_between(x0, c),
        (Some(c), false) => rational_between(c, x0),
        (None, true) => integer_above(x0),
        (None, false) => integer_below(x0),
    })
}

/// Index in `b`'s stack of the sector containing `(x, y)` for `x` in `b`
/// approaching `x0`.
fn touching_sector(tree: &CADTree, b: u32, x0: &RealAlgebraic, right: bool, y: &Rat) -> Result<u32> {
    let x = near_x(tree, b, x0, right, y)?;
    Ok(position(&fiber_roots(tree, &x)?, y))
}

pub fn adjacency_2d(tree: &CADTree) -> Result<AdjacencyGraph2D> {
    check_2d(tree)?;
    let leaves = tree.leaves();
    let nodes: Vec<Vec<u32>> = leaves.iter().map(|c| c.index.clone()).collect();
    let id: BTreeMap<&[u32], usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_slice(), i)).collect();
    let mut edges = BTreeSet::new();
    let mut link = |a: &[u32], b: &[u32]| {
        if let (Some(&i), Some(&j)) = (id.get(a), id.get(b)) {
            if dim_of(a).abs_diff(dim_of(b)) == 1 {
                edges.insert((i.min(j), i.max(j)));
            }
        }
    };
    for base in &tree.root.children {
        for w in base.children.windows(2) {
            if w[1].index[1] == w[0].index[1] + 1 {
                link(&w[0].index, &w[1].index);
            }
        }
    }
    for b in tree.root.children.iter().filter(|c| !c.is_section()) {
        let bi = b.index[0];
        for (xi, right) in [(bi.checked_sub(1), true), (Some(bi + 1), false)] {
            let Some(xi) = xi.filter(|&i| i > 0) else { continue };
            let Some(x0cell) = tree.root.find(&[xi]) else { continue };
            let x0 = base_point(tree, xi);
            let mut touch: BTreeMap<u32, u32> = BTreeMap::new();
            for v in x0cell.children.iter().filter(|c| !c.is_section()) {
                let y = v.sample.coords[1].as_rational().expect("sector samples are rational").clone();
                let s = touching_sector(tree, bi, &x0, right, &y)?;
                touch.insert(v.index[1], s);
                link(&[bi, s], &v.index);
            }
            for p in x0cell.children.iter().filter(|c| c.is_section()) {
                let j = p.index[1];
                let (Some(&lo), Some(&hi)) = (touch.get(&(j - 1)), touch.get(&(j + 1))) else { continue };
                for s in (lo + 1..hi).filter(|s| s % 2 == 0) {
                    link(&[bi, s], &[xi, j]);
                }
            }
        }
    }
    Ok(AdjacencyGraph2D { nodes, edges })
}

/// A connecting route: the cells visited and a polyline through them.
#[derive(Clone, Debug)]
pub struct PathWitness {
    pub cells: Vec<Vec<u32>>,
    pub polyline: Vec<(Rat, Rat)>,
}

fn cell_truth(tree: &CADTree, idx: &[u32]) -> Option<bool> {
    tree.root.find(idx).and_then(|c| c.truth)
}

/// Searches for a path from `start` to `goal` inside the region where `f`
/// holds. `tree` must carry truth values for `f` on its leaves.
pub fn path_query(
    tree: &CADTree,
    g: &AdjacencyGraph2D,
    f: &Formula,
    start: (&Rat, &Rat),
    goal: (&Rat, &Rat),
) -> Result<Option<PathWitness>> {
    check_2d(tree)?;
    for (name, p) in [("start", start), ("goal", goal)] {
        if !eval_qf(f, &[Some(p.0.clone()), Some(p.1.clone())])? {
            return Err(CadError::PointNotFree(format!("{name} ({}, {})", p.0, p.1)));
        }
    }
    let s_idx = locate_2d(tree, start.0, start.1)?;
    let g_idx = locate_2d(tree, goal.0, goal.1)?;
    for idx in [&s_idx, &g_idx] {
        if cell_truth(tree, idx) != Some(true) {
            return Err(CadError::Usage(format!(
                "cell {idx:?} is not marked true; evaluate the formula on the CAD first"
            )));
        }
        if dim_of(idx) == 0 {
            return Err(CadError::Usage("paths from isolated points are not supported".into()));
        }
    }
    let (Some(s), Some(t)) = (g.node(&s_idx), g.node(&g_idx)) else {
        return Err(CadError::Usage("endpoint cell missing from the graph".into()));
    };
    let usable = |i: usize| dim_of(&g.nodes[i]) >= 1 && cell_truth(tree, &g.nodes[i]) == Some(true);
    let mut prev: Vec<Option<usize>> = vec![None; g.nodes.len()];
    let mut seen = vec![false; g.nodes.len()];
    let mut queue = VecDeque::from([s]);
    seen[s] = true;
    let adj: Vec<Vec<usize>> = (0..g.nodes.len()).map(|i| g.neighbours(i)).collect();
    while let Some(u) = queue.pop_front() {
        if u == t {
            break;
        }
        for &w in &adj[u] {
            if !seen[w] && usable(w) {
                seen[w] = true;
                prev[w] = Some(u);
                queue.push_back(w);
            }
        }
    }
    if !seen[t] {
        return Ok(None);
    }
    let mut route = vec![t];
    while let Some(p) = prev[*route.last().unwrap()] {
        route.push(p);
    }
    route.reverse();
    let cells: Vec<Vec<u32>> = route.iter().map(|&i| g.nodes[i].clone()).collect();
    let polyline =
        Witness { tree }.build(&cells, (start.0.clone(), start.1.clone()), (goal.0.clone(), goal.1.clone()))?;
    Ok(Some(PathWitness { cells, polyline }))
}

struct Witness<'a> {
    tree: &'a CADTree,
}

type Pt = (Rat, Rat);

impl Witness<'_> {
    /// A rational point of 2D cell `c` on the vertical line at `x`.
    fn spine(&self, c: &[u32], x: &Rat) -> Result<Pt> {
        let roots = fiber_roots(self.tree, x)?;
        let m = (c[1] as usize - 1) / 2;
        let y = match (m.checked_sub(1).and_then(|i| roots.get(i)), roots.get(m)) {
            (Some(lo), Some(hi)) => rational_between(lo, hi),
            (None, Some(hi)) => integer_below(hi),
            (Some(lo), None) => integer_above(lo),
            (None, None) => Rat::from_integer(0.into()),
        };
        Ok((x.clone(), y))
    }

    fn inside(&self, c: &[u32], p: &Pt) -> Result<bool> {
        Ok(base_position(self.tree, &p.0) == c[0] && position(&fiber_roots(self.tree, &p.0)?, &p.1) == c[1])
    }

    /// Polyline from `a` to `b` inside 2D cell `c`, via the spine.
    fn within(&self, c: &[u32], a: &Pt, b: &Pt, out: &mut Vec<Pt>) -> Result<()> {
        let sa = self.spine(c, &a.0)?;
        let sb = self.spine(c, &b.0)?;
        out.push(sa.clone());
        self.refine(c, &sa, &sb, 0, out)?;
        out.push(b.clone());
        Ok(())
    }

    /// Pushes intermediate spine points until every checked interpolant of
    /// each piece lies in `c`; pushes `b` last.
    fn refine(&self, c: &[u32], a: &Pt, b: &Pt, depth: u32, out: &mut Vec<Pt>) -> Result<()> {
        const CHECKS: i64 = 24;
        let mut ok = true;
        if depth < 14 && a.0 != b.0 {
            for k in 1..CHECKS {
                let t = Rat::new(k.into(), CHECKS.into());
                let p = (&a.0 + (&b.0 - &a.0) * &t, &a.1 + (&b.1 - &a.1) * &t);
                if !self.inside(c, &p)? {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            let mid = self.spine(c, &((&a.0 + &b.0) / Rat::from_integer(2.into())))?;
            self.refine(c, a, &mid, depth + 1, out)?;
            self.refine(c, &mid, b, depth + 1, out)?;
        } else {
            out.push(b.clone());
        }
        Ok(())
    }

    fn build(&self, cells: &[Vec<u32>], start: Pt, goal: Pt) -> Result<Vec<Pt>> {
        let mut out = vec![start.clone()];
        let mut pos = start;
        let mut i = 0;
        // leave a one-dimensional start cell
        if dim_of(&cells[0]) == 1 {
            if cells.len() == 1 {
                out.push(goal.clone());
                return Ok(dedup(out));
            }
            let (_, entry) = self.cross(&cells[0], &cells[1], &pos, true)?;
            out.push(entry.clone());
            pos = entry;
            i = 1;
        }
        loop {
            let c = &cells[i];
            // c is two-dimensional here
            if i + 1 == cells.len() {
                self.within(c, &pos, &goal, &mut out)?;
                break;
            }
            let link = &cells[i + 1];
            if i + 2 == cells.len() {
                // the goal lies in the boundary cell `link`
                let (exit, _) = self.cross(c, link, &goal, false)?;
                self.within(c, &pos, &exit, &mut out)?;
                out.push(goal.clone());
                break;
            }
            let next = &cells[i + 2];
            let (exit, entry) = self.transit(c, link, next, &pos)?;
            self.within(c, &pos, &exit, &mut out)?;
            out.push(entry.clone());
            pos = entry;
            i += 2;
        }
        Ok(dedup(out))
    }

    /// Exit point of `c` and entry point of `next` across the boundary `link`.
    fn transit(&self, c: &[u32], link: &[u32], next: &[u32], pos: &Pt) -> Result<(Pt, Pt)> {
        if c[0] == next[0] {
            // vertical crossing of a section at the current abscissa
            let exit = pos.clone();
            let entry = self.spine(next, &pos.0)?;
            return Ok((exit, entry));
        }
        let x0 = base_point(self.tree, link[0]);
        let y = self.tree.root.find(link).expect("link cell").sample.coords[1].as_rational().unwrap().clone();
        let xa = near_x(self.tree, c[0], &x0, c[0] > link[0], &y)?;
        let xb = near_x(self.tree, next[0], &x0, next[0] > link[0], &y)?;
        Ok(((xa, y.clone()), (xb, y)))
    }

    /// Moves between a one-dimensional cell and the adjacent 2D cell: returns
    /// (point in the 2D cell, point reached). `from_line` says the walk
    /// starts on the 1D cell at `p`; otherwise it ends there at `p`.
    fn cross(&self, a: &[u32], b: &[u32], p: &Pt, from_line: bool) -> Result<(Pt, Pt)> {
        let (line, cell) = if from_line { (a, b) } else { (b, a) };
        let q = if line[0] % 2 == 0 {
            // vertical sector over a base point: leave horizontally
            let x0 = base_point(self.tree, line[0]);
            (near_x(self.tree, cell[0], &x0, cell[0] > line[0], &p.1)?, p.1.clone())
        } else {
            self.spine(cell, &p.0)?
        };
        Ok((q.clone(), q))
    }
}

fn dedup(mut v: Vec<Pt>) -> Vec<Pt> {
    v.dedup();
    v
}
