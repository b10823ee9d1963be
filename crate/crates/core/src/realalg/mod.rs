//! Real algebraic numbers as (squarefree defining polynomial, isolating
//! interval), and certified sign computation at sample points whose
//! coordinates are such numbers.

pub mod interval;
mod sign;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{CadError, Result};
use crate::poly::{Poly, Rat, VarOrder};
use crate::upoly::{RootInterval, UPoly};

pub use sign::{roots_over, sign_at};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalKind {
    Point,
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolatingInterval {
    pub lo: Rat,
    pub hi: Rat,
    pub kind: IntervalKind,
}

/// A real root of `defpoly`. Open intervals contain exactly one root and
/// neither endpoint is a root; rationals are points with a linear defpoly.
#[derive(Clone, Debug)]
pub struct RealAlgebraic {
    defpoly: Arc<UPoly>,
    lo: Rat,
    hi: Rat,
    point: bool,
    /// Sign of `defpoly` at `lo` (unused for points).
    sign_lo: i8,
}

impl RealAlgebraic {
    pub fn rational(q: Rat) -> Self {
        RealAlgebraic { defpoly: Arc::new(UPoly::linear(&q)), lo: q.clone(), hi: q, point: true, sign_lo: 0 }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::rational(Rat::from_integer(BigInt::from(n)))
    }

    /// Root of the squarefree `p` isolated by `iv`.
    pub fn from_root_interval(p: &Arc<UPoly>, iv: &RootInterval) -> Self {
        match iv {
            RootInterval::Exact(q) => Self::rational(q.clone()),
            RootInterval::Open(lo, hi) => {
                let sign_lo = p.sign_at(lo);
                debug_assert!(sign_lo != 0 && sign_lo == -p.sign_at(hi));
                RealAlgebraic { defpoly: p.clone(), lo: lo.clone(), hi: hi.clone(), point: false, sign_lo }
            }
        }
    }

    pub fn defpoly(&self) -> &UPoly {
        &self.defpoly
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn is_rational(&self) -> bool {
        self.point
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.point.then_some(&self.lo)
    }

    pub fn interval(&self) -> IsolatingInterval {
        IsolatingInterval {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            kind: if self.point { IntervalKind::Point } else { IntervalKind::Open },
        }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    /// Halves the isolating interval (or lands exactly on the root).
    pub fn bisect(&mut self) {
        if self.point {
            return;
        }
        let mid = (&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2));
        let s = self.defpoly.sign_at(&mid);
        if s == 0 {
            *self = Self::rational(mid);
        } else if s == self.sign_lo {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    pub fn refine_in_place(&mut self, width: &Rat) {
        while !self.point && &self.width() > width {
            self.bisect();
        }
    }

    /// Same root, interval width at most `width`.
    pub fn refine(&self, width: &Rat) -> RealAlgebraic {
        let mut a = self.clone();
        a.refine_in_place(width);
        a
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2))
    }

    /// Decimal approximation; advisory only.
    pub fn approx(&self) -> f64 {
        let a = self.refine(&Rat::new(BigInt::one(), BigInt::one() << 60usize));
        a.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_json(&self) -> SampleCoordJson {
        let order = VarOrder::new(&["x"]).expect("single variable");
        SampleCoordJson {
            defpoly: self.defpoly.to_poly(1, 0).to_string_with(&order),
            lo: self.lo.to_string(),
            hi: self.hi.to_string(),
            kind: if self.point { IntervalKind::Point } else { IntervalKind::Open },
            approx: self.approx(),
        }
    }
}

impl fmt::Display for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.point {
            write!(f, "{}", self.lo)
        } else {
            let order = VarOrder::new(&["x"]).expect("single variable");
            write!(f, "root of {} in ({}, {})", self.defpoly.to_poly(1, 0).display(&order), self.lo, self.hi)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleCoordJson {
    pub defpoly: String,
    pub lo: String,
    pub hi: String,
    pub kind: IntervalKind,
    pub approx: f64,
}

/// Sorted real roots of the squarefree part of a univariate polynomial.
pub fn isolate_roots(p: &Poly) -> Result<Vec<RealAlgebraic>> {
    if p.is_zero() {
        return Err(CadError::Usage("cannot isolate the roots of the zero polynomial".into()));
    }
    let vars = p.vars();
    if vars.len() > 1 {
        return Err(CadError::Usage("root isolation needs a univariate polynomial".into()));
    }
    let Some(&v) = vars.first() else {
        return Ok(vec![]);
    };
    Ok(isolate_upoly(&UPoly::from_poly(p, v)))
}

pub(crate) fn isolate_upoly(u: &UPoly) -> Vec<RealAlgebraic> {
    let sq = Arc::new(u.squarefree());
    if sq.degree() == 0 {
        return vec![];
    }
    sq.real_root_intervals().iter().map(|iv| RealAlgebraic::from_root_interval(&sq, iv)).collect()
}

/// Certified sign of a univariate polynomial at `a`.
pub fn sign_upoly_at(u: &UPoly, a: &RealAlgebraic) -> i8 {
    if let Some(q) = a.as_rational() {
        return u.sign_at(q);
    }
    let g = u.gcd(&a.defpoly);
    if g.degree() > 0 && g.sign_at(&a.lo) != g.sign_at(&a.hi) {
        return 0;
    }
    let p = u.to_poly(1, 0);
    let mut a = a.clone();
    loop {
        if let Some(q) = a.as_rational() {
            return u.sign_at(q);
        }
        let b = [Some(interval::Interval::new(a.lo.clone(), a.hi.clone()))];
        if let Some(s) = interval::eval_box(&p, &b).sign() {
            return s;
        }
        for _ in 0..4 {
            a.bisect();
        }
    }
}

/// Shares a root with `b`'s interval? Decided exactly through the gcd of the
/// defining polynomials.
fn same_root(a: &RealAlgebraic, b: &RealAlgebraic) -> bool {
    let g = a.defpoly.gcd(&b.defpoly);
    if g.degree() == 0 {
        return false;
    }
    let lo = a.lo.clone().max(b.lo.clone());
    let hi = a.hi.clone().min(b.hi.clone());
    if lo >= hi {
        return false;
    }
    // g's roots are roots of both; each interval holds one root of its
    // defpoly, so a sign change of g on the overlap means a shared root.
    let (sl, sh) = (g.sign_at(&lo), g.sign_at(&hi));
    sl != 0 && sh != 0 && sl != sh
}

/// Exact comparison of two real algebraic numbers.
pub fn compare(a: &RealAlgebraic, b: &RealAlgebraic) -> Ordering {
    if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
        return x.cmp(y);
    }
    let mut a = a.clone();
    let mut b = b.clone();
    let mut equal_checked = false;
    loop {
        if a.hi <= b.lo && !(a.point && b.point) {
            return Ordering::Less;
        }
        if b.hi <= a.lo && !(a.point && b.point) {
            return Ordering::Greater;
        }
        if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
            return x.cmp(y);
        }
        // One is a point inside the other's open interval.
        if let Some(q) = a.as_rational() {
            if b.defpoly.sign_at(q) == 0 {
                return Ordering::Equal;
            }
            b.bisect();
            continue;
        }
        if let Some(q) = b.as_rational() {
            if a.defpoly.sign_at(q) == 0 {
                return Ordering::Equal;
            }
            a.bisect();
            continue;
        }
        if !equal_checked {
            if same_root(&a, &b) {
                return Ordering::Equal;
            }
            equal_checked = true;
        }
        if a.width() >= b.width() {
            a.bisect();
        } else {
            b.bisect();
        }
    }
}

/// A rational strictly between `a < b`: the midpoint when both are
/// rational, otherwise the simplest rational in the separating gap.
pub fn rational_between(a: &RealAlgebraic, b: &RealAlgebraic) -> Rat {
    if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
        return (x + y) / Rat::from_integer(BigInt::from(2));
    }
    let mut a = a.clone();
    let mut b = b.clone();
    while a.hi >= b.lo {
        if a.width() >= b.width() && !a.point {
            a.bisect();
        } else {
            b.bisect();
        }
    }
    simplest_between(&a.hi, &b.lo)
}

/// Simplest rational (smallest denominator, then magnitude) strictly
/// inside the open interval `(lo, hi)`.
pub fn simplest_between(lo: &Rat, hi: &Rat) -> Rat {
    debug_assert!(lo < hi);
    if lo.is_negative() && hi.is_positive() {
        return Rat::zero();
    }
    if !hi.is_positive() {
        return -simplest_between(&-hi, &-lo);
    }
    let fl = lo.floor();
    let next = &fl + Rat::one();
    if &next < hi {
        return next;
    }
    // lo and hi share the unit interval [fl, fl + 1]
    let f_lo = lo - &fl;
    let f_hi = hi - &fl;
    if f_lo.is_zero() {
        let n = f_hi.recip().floor() + Rat::one();
        return fl + n.recip();
    }
    fl + simplest_between(&f_hi.recip(), &f_lo.recip()).recip()
}

/// Integer strictly below every point of `a`'s interval.
pub fn integer_below(a: &RealAlgebraic) -> Rat {
    a.lo.floor() - Rat::one()
}

/// Integer strictly above every point of `a`'s interval.
pub fn integer_above(a: &RealAlgebraic) -> Rat {
    a.hi.ceil() + Rat::one()
}

/// Coordinates for an assigned prefix of the variable order.
#[derive(Clone, Debug, Default)]
pub struct SamplePoint {
    pub coords: Vec<RealAlgebraic>,
    /// For some coordinates, a polynomial in that variable and the ones
    /// before it that vanishes at this point. It keeps norms small: the
    /// coordinate's own defining polynomial ignores how it depends on the
    /// earlier coordinates.
    pub relative: Vec<Option<Poly>>,
}

impl SamplePoint {
    pub fn new(coords: Vec<RealAlgebraic>) -> Self {
        SamplePoint { relative: vec![None; coords.len()], coords }
    }

    pub fn from_rationals(qs: &[Rat]) -> Self {
        SamplePoint::new(qs.iter().cloned().map(RealAlgebraic::rational).collect())
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn extended(&self, a: RealAlgebraic) -> SamplePoint {
        self.extended_with(a, None)
    }

    /// Appends `a`, a root of `relative` over this point.
    pub fn extended_with(&self, a: RealAlgebraic, relative: Option<Poly>) -> SamplePoint {
        let mut coords = self.coords.clone();
        let mut rel = self.relative.clone();
        rel.resize(coords.len(), None);
        coords.push(a);
        rel.push(if coords.last().unwrap().is_rational() { None } else { relative });
        SamplePoint { coords, relative: rel }
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().all(|c| c.is_rational())
    }

    pub fn rationals(&self) -> Option<Vec<Rat>> {
        self.coords.iter().map(|c| c.as_rational().cloned()).collect()
    }

    pub fn to_json(&self) -> Vec<SampleCoordJson> {
        self.coords.iter().map(|c| c.to_json()).collect()
    }
}
