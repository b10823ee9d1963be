//! Raster pictures of two-dimensional CADs.

use std::cmp::Ordering;

use num_traits::ToPrimitive;

use super::CADTree;
use crate::error::{CadError, Result};
use crate::poly::Rat;
use crate::realalg::{compare, RealAlgebraic};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotFormat {
    Ppm,
    Svg,
}

#[derive(Clone, Copy, Debug)]
pub struct PlotWindow {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub step: f64,
}

impl Default for PlotWindow {
    fn default() -> Self {
        PlotWindow { x: (-7.0, 2.0), y: (-2.0, 7.0), step: 0.025 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    /// Row-major from the top-left corner.
    pub pixels: Vec<[u8; 3]>,
}

const BOUNDARY: [u8; 3] = [40, 40, 40];
const TRUE: [u8; 3] = [150, 220, 150];
const FALSE: [u8; 3] = [235, 170, 170];
const ABSENT: [u8; 3] = [255, 255, 255];

fn palette(i: u32, j: u32) -> [u8; 3] {
    let h = (i.wrapping_mul(2_654_435_761) ^ j.wrapping_mul(40_503)).wrapping_mul(2_246_822_519);
    [150 + (h & 0x5f) as u8, 150 + ((h >> 8) & 0x5f) as u8, 150 + ((h >> 16) & 0x5f) as u8]
}

fn position(roots: &[RealAlgebraic], v: &Rat) -> u32 {
    let rv = RealAlgebraic::rational(v.clone());
    let mut below = 0;
    for r in roots {
        match compare(r, &rv) {
            Ordering::Less => below += 1,
            Ordering::Equal => return 2 * below + 2,
            Ordering::Greater => break,
        }
    }
    2 * below + 1
}

/// Colours each pixel centre by its cell (truth colour when known) and
/// darkens pixels whose right or lower neighbour lies in another cell.
pub fn plot_2d(tree: &CADTree, w: &PlotWindow) -> Result<Raster> {
    if tree.nvars() != 2 {
        return Err(CadError::Usage("plots need a two-variable CAD".into()));
    }
    if w.step.is_nan() || w.step <= 0.0 || w.x.1 <= w.x.0 || w.y.1 <= w.y.0 {
        return Err(CadError::Usage("plot step must be positive and ranges nonempty".into()));
    }
    let width = ((w.x.1 - w.x.0) / w.step).round() as usize;
    let height = ((w.y.1 - w.y.0) / w.step).round() as usize;
    let step = Rat::from_float(w.step).unwrap();
    let (x0, y1) = (Rat::from_float(w.x.0).unwrap(), Rat::from_float(w.y.1).unwrap());
    let half = &step / Rat::from_integer(2.into());
    let mut base = Vec::new();
    for f in &tree.seq.level(0).factors {
        base.extend(crate::realalg::isolate_roots(f)?);
    }
    base.sort_by(compare);
    base.dedup_by(|a, b| compare(a, b) == Ordering::Equal);
    let mut ids = vec![(0u32, 0u32); width * height];
    for col in 0..width {
        let x = &x0 + &step * Rat::from_integer(col.into()) + &half;
        let i = position(&base, &x);
        let mut fiber = Vec::new();
        for f in &tree.seq.level(1).factors {
            let g = f.subst(0, &x);
            if !g.is_zero() && g.contains_var(1) {
                fiber.extend(crate::realalg::isolate_roots(&g)?);
            }
        }
        fiber.sort_by(compare);
        fiber.dedup_by(|a, b| compare(a, b) == Ordering::Equal);
        let approx: Vec<f64> = fiber.iter().map(|r| r.approx()).collect();
        for row in 0..height {
            let y = &y1 - &step * Rat::from_integer(row.into()) - &half;
            let yf = y.to_f64().unwrap();
            // exact comparison only where the approximation is ambiguous
            let near = approx.iter().any(|a| (a - yf).abs() < 1e-9);
            let j = if near { position(&fiber, &y) } else { 2 * approx.iter().filter(|&&a| a < yf).count() as u32 + 1 };
            ids[row * width + col] = (i, j);
        }
    }
    let mut pixels = Vec::with_capacity(width * height);
    for row in 0..height {
        for col in 0..width {
            let id = ids[row * width + col];
            let edge = (col + 1 < width && ids[row * width + col + 1] != id)
                || (row + 1 < height && ids[(row + 1) * width + col] != id);
            let colour = if edge {
                BOUNDARY
            } else {
                match tree.root.find(&[id.0, id.1]) {
                    None => ABSENT,
                    Some(c) => match c.truth {
                        Some(true) => TRUE,
                        Some(false) => FALSE,
                        None => palette(id.0, id.1),
                    },
                }
            };
            pixels.push(colour);
        }
    }
    Ok(Raster { width, height, pixels })
}

impl Raster {
    /// Binary PPM (P6).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }

    /// SVG with one rectangle per horizontal run of equal colour.
    pub fn to_svg(&self) -> String {
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" shape-rendering=\"crispEdges\">\n",
            w = self.width,
            h = self.height
        );
        for row in 0..self.height {
            let line = &self.pixels[row * self.width..(row + 1) * self.width];
            let mut start = 0;
            while start < line.len() {
                let mut end = start + 1;
                while end < line.len() && line[end] == line[start] {
                    end += 1;
                }
                let [r, g, b] = line[start];
                s.push_str(&format!(
                    "<rect x=\"{start}\" y=\"{row}\" width=\"{}\" height=\"1\" fill=\"#{r:02x}{g:02x}{b:02x}\"/>\n",
                    end - start
                ));
                start = end;
            }
        }
        s.push_str("</svg>\n");
        s
    }

    pub fn encode(&self, fmt: PlotFormat) -> Vec<u8> {
        match fmt {
            PlotFormat::Ppm => self.to_ppm(),
            PlotFormat::Svg => self.to_svg().into_bytes(),
        }
    }

    pub fn distinct_colours(&self) -> usize {
        let mut c = self.pixels.clone();
        c.sort();
        c.dedup();
        c.len()
    }
}
