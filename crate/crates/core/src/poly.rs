//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A [`Poly`] only knows how many variables it ranges over; variable names
//! live in a [`VarOrder`] that the caller threads through parsing and
//! printing. Variable `i` is the `i`-th entry of the order, so the last
//! variable is the one eliminated first by projection.
//!
//! Terms are kept sorted in lexicographic order with the highest-index
//! variable most significant (descending), which makes the leading term
//! with respect to the main variable the first term.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{CadError, Result};

pub type Rat = BigRational;

/// Exponent vector, one entry per variable of the ambient order.
pub type Monomial = Vec<u32>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// An ordered list of variable names, `x_1 ≺ x_2 ≺ … ≺ x_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarOrder {
    names: Arc<[String]>,
}

impl VarOrder {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref().trim();
            if n.is_empty() || !n.chars().next().unwrap().is_ascii_alphabetic() {
                return Err(CadError::Usage(format!("invalid variable name '{n}'")));
            }
            if !seen.insert(n.to_string()) {
                return Err(CadError::Usage(format!("duplicate variable '{n}'")));
            }
            out.push(n.to_string());
        }
        Ok(VarOrder { names: out.into() })
    }

    /// Parses a comma separated list such as `x,y,w,z`.
    pub fn parse(list: &str) -> Result<Self> {
        let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        Self::new(&names)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn var(&self, name: &str) -> Poly {
        let i = self.index_of(name).unwrap_or_else(|| panic!("unknown variable {name}"));
        Poly::var(self.len(), i)
    }
}

impl fmt::Display for VarOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join(","))
    }
}

fn cmp_mono(a: &[u32], b: &[u32]) -> Ordering {
    // highest-index variable most significant
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn cmp_graded(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| {
        // among equal degree, earlier variables first (x before y before w ...)
        for (x, y) in a.iter().zip(b.iter()) {
            match x.cmp(y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    })
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Monomial, Rat)>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Poly { nvars, terms: vec![(vec![0; nvars], c)] }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut m = vec![0; nvars];
        m[i] = 1;
        Poly { nvars, terms: vec![(m, Rat::one())] }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut acc: HashMap<Monomial, Rat> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "monomial length mismatch");
            if c.is_zero() {
                continue;
            }
            *acc.entry(m).or_insert_with(Rat::zero) += c;
        }
        let mut terms: Vec<(Monomial, Rat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| cmp_mono(&b.0, &a.0));
        Poly { nvars, terms }
    }

    fn from_sorted(nvars: usize, terms: Vec<(Monomial, Rat)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| cmp_mono(&w[0].0, &w[1].0) == Ordering::Greater));
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, Rat)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0))
    }

    /// The constant value, if the polynomial is constant.
    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_zero() {
            Some(Rat::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map(|c| c.is_one()).unwrap_or(false)
    }

    /// Changes the number of ambient variables; extra variables must not occur.
    pub fn with_nvars(&self, nvars: usize) -> Poly {
        if nvars == self.nvars {
            return self.clone();
        }
        let terms: Vec<(Monomial, Rat)> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut m2 = vec![0; nvars];
                for (i, &e) in m.iter().enumerate() {
                    if e > 0 {
                        assert!(i < nvars, "dropping a variable that occurs");
                        m2[i] = e;
                    }
                }
                (m2, c.clone())
            })
            .collect();
        Poly::from_terms(nvars, terms)
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m[v]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.iter().sum::<u32>()).max().unwrap_or(0)
    }

    /// The highest-index variable that occurs, if any.
    pub fn main_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.degree(v) > 0)
    }

    pub fn contains_var(&self, v: usize) -> bool {
        self.terms.iter().any(|(m, _)| m[v] > 0)
    }

    pub fn vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.contains_var(v)).collect()
    }

    pub fn neg(&self) -> Poly {
        Poly::from_sorted(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub fn scale(&self, k: &Rat) -> Poly {
        if k.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly::from_sorted(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(CadError::Usage(format!(
                "polynomials over different variable orders ({} vs {} variables)",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        Ok(self.add_impl(other, false))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        Ok(self.add_impl(other, true))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        Ok(self.mul_impl(other))
    }

    fn add_impl(&self, other: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match cmp_mono(ma, mb) {
                Ordering::Greater => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((mb.clone(), if negate { -cb } else { cb.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { ca - cb } else { ca + cb };
                    if !c.is_zero() {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|(m, c)| (m.clone(), if negate { -c } else { c.clone() })));
        Poly::from_sorted(self.nvars, out)
    }

    fn mul_impl(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        let mut acc: HashMap<Monomial, Rat> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                let p = ca * cb;
                match acc.get_mut(&m) {
                    Some(c) => *c += p,
                    None => {
                        acc.insert(m, p);
                    }
                }
            }
        }
        let mut terms: Vec<(Monomial, Rat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| cmp_mono(&b.0, &a.0));
        Poly::from_sorted(self.nvars, terms)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        acc
    }

    /// Multiplies by `x_v^k`.
    pub fn shift(&self, v: usize, k: u32) -> Poly {
        Poly::from_sorted(
            self.nvars,
            self.terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m[v] += k;
                    (m, c.clone())
                })
                .collect(),
        )
    }

    pub fn derivative(&self, v: usize) -> Poly {
        let terms = self.terms.iter().filter(|(m, _)| m[v] > 0).map(|(m, c)| {
            let mut m2 = m.clone();
            m2[v] -= 1;
            (m2, c * Rat::from_integer(BigInt::from(m[v])))
        });
        Poly::from_terms(self.nvars, terms)
    }

    /// Coefficients with respect to `v`, highest power first: `[c_d, …, c_0]`.
    pub fn coefficients(&self, v: usize) -> Vec<Poly> {
        if self.is_zero() {
            return vec![Poly::zero(self.nvars)];
        }
        let d = self.degree(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Rat)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let k = m[v] as usize;
            let mut m2 = m.clone();
            m2[v] = 0;
            buckets[d - k].push((m2, c.clone()));
        }
        buckets.into_iter().map(|t| Poly::from_terms(self.nvars, t)).collect()
    }

    /// Inverse of [`Poly::coefficients`].
    pub fn from_coefficients(nvars: usize, v: usize, coeffs: &[Poly]) -> Poly {
        let d = coeffs.len().saturating_sub(1);
        let mut acc = Poly::zero(nvars);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add_impl(&c.shift(v, (d - i) as u32), false);
            }
        }
        acc
    }

    /// Leading coefficient with respect to `v`.
    pub fn lc(&self, v: usize) -> Poly {
        self.coefficients(v).into_iter().next().unwrap()
    }

    /// Leading rational coefficient in the internal term order.
    pub fn leading_rat(&self) -> Option<&Rat> {
        self.terms.first().map(|(_, c)| c)
    }

    /// Substitutes a rational value for `v`.
    pub fn subst(&self, v: usize, val: &Rat) -> Poly {
        if !self.contains_var(v) {
            return self.clone();
        }
        let maxd = self.degree(v) as usize;
        let mut pows = Vec::with_capacity(maxd + 1);
        pows.push(Rat::one());
        for i in 1..=maxd {
            let p = &pows[i - 1] * val;
            pows.push(p);
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut m2 = m.clone();
            let k = m2[v] as usize;
            m2[v] = 0;
            (m2, c * &pows[k])
        });
        Poly::from_terms(self.nvars, terms)
    }

    /// Substitutes every assigned variable.
    pub fn subst_many(&self, point: &[Option<Rat>]) -> Poly {
        let mut p = self.clone();
        for (v, val) in point.iter().enumerate() {
            if let Some(val) = val {
                if v < self.nvars {
                    p = p.subst(v, val);
                }
            }
        }
        p
    }

    /// Evaluates at a full rational point.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[v].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Replaces `x_v` by a polynomial.
    pub fn compose(&self, v: usize, q: &Poly) -> Poly {
        let coeffs = self.coefficients(v);
        // Horner in v
        let mut acc = Poly::zero(self.nvars);
        for c in coeffs {
            acc = acc.mul_impl(q).add_impl(&c, false);
        }
        acc
    }

    /// Rational content (gcd of numerators over lcm of denominators), positive.
    pub fn rat_content(&self) -> Rat {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rat::one();
        }
        Rat::new(num, den)
    }

    /// Integer primitive form with positive leading coefficient (internal order).
    pub fn normalize(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut k = self.rat_content();
        if self.terms[0].1.is_negative() {
            k = -k;
        }
        self.scale(&k.recip())
    }

    /// Sign of the leading coefficient in the internal term order.
    pub fn leading_sign(&self) -> i8 {
        match self.terms.first() {
            None => 0,
            Some((_, c)) if c.is_negative() => -1,
            _ => 1,
        }
    }

    /// `self = q * other` exactly, if possible.
    pub fn exact_div(&self, other: &Poly) -> Option<Poly> {
        assert!(!other.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        if let Some(c) = other.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = &other.terms[0];
        let lc_inv = lc.recip();
        let mut rem = self.clone();
        let mut quot: Vec<(Monomial, Rat)> = Vec::new();
        while let Some((m, c)) = rem.terms.first() {
            if m.iter().zip(lm).any(|(a, b)| a < b) {
                return None;
            }
            let qm: Monomial = m.iter().zip(lm).map(|(a, b)| a - b).collect();
            let qc = c * &lc_inv;
            let t = Poly::from_sorted(self.nvars, vec![(qm.clone(), qc.clone())]);
            rem = rem.add_impl(&t.mul_impl(other), true);
            quot.push((qm, qc));
        }
        Some(Poly::from_terms(self.nvars, quot))
    }

    /// Pseudo-remainder of `self` by `b` with respect to `v`.
    pub fn prem(&self, b: &Poly, v: usize) -> Poly {
        let db = b.degree(v);
        assert!(!b.is_zero());
        let mut r = self.clone();
        let lb = b.lc(v);
        let mut dr = r.degree(v);
        if r.is_zero() || dr < db {
            return r;
        }
        let mut e = dr - db + 1;
        while !r.is_zero() && dr >= db {
            let lr = r.lc(v);
            let t = lr.shift(v, dr - db);
            r = r.mul_impl(&lb).add_impl(&t.mul_impl(b), true);
            e -= 1;
            dr = r.degree(v);
        }
        if e > 0 {
            r = r.mul_impl(&lb.pow(e));
        }
        r
    }

    /// Remainder by a polynomial monic-able in `v` whose leading coefficient is
    /// a nonzero rational.
    pub fn rem_rational_lc(&self, m: &Poly, v: usize) -> Poly {
        let dm = m.degree(v);
        let lc = m.lc(v).constant_value().expect("leading coefficient must be rational");
        let inv = lc.recip();
        let mut r = self.clone();
        loop {
            let dr = r.degree(v);
            if r.is_zero() || dr < dm {
                return r;
            }
            let t = r.lc(v).scale(&inv).shift(v, dr - dm);
            r = r.add_impl(&t.mul_impl(m), true);
        }
    }

    /// Content with respect to `v`: gcd of the coefficients in `v`.
    pub fn content(&self, v: usize) -> Poly {
        let mut g = Poly::zero(self.nvars);
        for c in self.coefficients(v) {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_constant() {
                return Poly::one(self.nvars);
            }
        }
        g
    }

    /// Primitive part with respect to `v`, normalized.
    pub fn primitive_part(&self, v: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content(v);
        self.exact_div(&c).expect("content divides").normalize()
    }

    /// Squarefree part with respect to the main variable (content kept).
    pub fn squarefree_part(&self) -> Poly {
        let Some(v) = self.main_var() else {
            return self.normalize();
        };
        let c = self.content(v);
        let pp = self.exact_div(&c).unwrap();
        let g = gcd(&pp, &pp.derivative(v));
        let sq = pp.exact_div(&g).unwrap();
        let csq = if c.is_constant() { c } else { c.squarefree_part() };
        csq.mul_impl(&sq).normalize()
    }

    /// Text rendering using the names from `order`.
    pub fn display<'a>(&'a self, order: &'a VarOrder) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, order }
    }

    pub fn to_string_with(&self, order: &VarOrder) -> String {
        self.display(order).to_string()
    }

    /// Terms in canonical printing order (graded, descending).
    pub fn graded_terms(&self) -> Vec<&(Monomial, Rat)> {
        let mut t: Vec<&(Monomial, Rat)> = self.terms.iter().collect();
        t.sort_by(|a, b| cmp_graded(&b.0, &a.0));
        t
    }

    /// Evaluation helper used by the interval code: max exponent per variable.
    pub fn degrees(&self) -> Vec<u32> {
        (0..self.nvars).map(|v| self.degree(v)).collect()
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("variable order mismatch")
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("variable order mismatch")
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("variable order mismatch")
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    order: &'a VarOrder,
}

fn fmt_rat(c: &Rat) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.graded_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = m.iter().all(|&e| e == 0);
            if !a.is_one() || is_const {
                factors.push(fmt_rat(&a));
            }
            for (v, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.order.name(v).to_string()),
                    _ => factors.push(format!("{}^{}", self.order.name(v), e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Greatest common divisor over Q[x_1..x_n], normalized (integer primitive,
/// positive leading coefficient). `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.normalize();
    }
    if b.is_zero() {
        return a.normalize();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(a.nvars);
    }
    let va = a.main_var().unwrap();
    let vb = b.main_var().unwrap();
    let v = va.max(vb);
    if !a.contains_var(v) {
        return gcd(a, &b.content(v));
    }
    if !b.contains_var(v) {
        return gcd(&a.content(v), b);
    }
    let ca = a.content(v);
    let cb = b.content(v);
    let d = gcd(&ca, &cb);
    let mut pa = a.exact_div(&ca).unwrap();
    let mut pb = b.exact_div(&cb).unwrap();
    if pa.degree(v) < pb.degree(v) {
        std::mem::swap(&mut pa, &mut pb);
    }
    // subresultant PRS
    let nv = a.nvars;
    let mut g = Poly::one(nv);
    let mut h = Poly::one(nv);
    loop {
        let delta = pa.degree(v) - pb.degree(v);
        let r = pa.prem(&pb, v);
        if r.is_zero() {
            let res = pb.primitive_part(v);
            return (&d * &res).normalize();
        }
        if r.degree(v) == 0 {
            return d.normalize();
        }
        pa = pb;
        let div = &g * &h.pow(delta);
        pb = r.exact_div(&div).expect("subresultant division");
        g = pa.lc(v);
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => g.pow(delta).exact_div(&h.pow(delta - 1)).expect("subresultant h update"),
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order() -> VarOrder {
        VarOrder::parse("x,y,w,z").unwrap()
    }

    fn p(s: &str) -> Poly {
        crate::formula::parse_poly(s, &order()).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(&p("x+1") * &p("x-1"), p("x^2-1"));
        assert_eq!(&p("x+1") + &Poly::zero(4), p("x+1"));
    }

    #[test]
    fn expansion_term_count() {
        let q = &p("(y-z)^2") + &p("(x-w)^2");
        assert_eq!(q.num_terms(), 6);
    }

    #[test]
    fn derivatives() {
        let o = order();
        let x = o.index_of("x").unwrap();
        let y = o.index_of("y").unwrap();
        assert_eq!(p("x^2+y^2-1").derivative(x), p("2*x"));
        assert!(p("x^2-1").derivative(y).is_zero());
        assert_eq!(p("4*x^8-6*x^4+1").derivative(x), p("32*x^7-24*x^3"));
    }

    #[test]
    fn coefficient_lists() {
        let y = 1;
        let z = 3;
        assert_eq!(p("x^2+y^2-1").coefficients(y), vec![p("1"), p("0"), p("x^2-1")]);
        assert_eq!(p("y-1").coefficients(y), vec![p("1"), p("-1")]);
        assert_eq!(p("x*z + z - y*w + w - y - x").coefficients(z), vec![p("x+1"), p("-y*w+w-y-x")]);
    }

    #[test]
    fn mismatched_orders_are_usage_errors() {
        let a = Poly::var(2, 0);
        let b = Poly::var(3, 0);
        assert!(matches!(a.try_add(&b), Err(CadError::Usage(_))));
    }

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd(&p("x^2-1"), &p("x-1")), p("x-1"));
        assert_eq!(gcd(&p("(x+y)*(x-y)"), &p("(x+y)^2")), p("x+y"));
        assert!(gcd(&p("x+1"), &p("y+1")).is_one());
        assert_eq!(gcd(&p("x*y*w"), &p("x*w*z")), p("x*w"));
    }

    #[test]
    fn exact_division() {
        let a = p("(x+y)*(w-z+1)");
        assert_eq!(a.exact_div(&p("x+y")).unwrap(), p("w-z+1"));
        assert!(p("x^2+1").exact_div(&p("x+1")).is_none());
    }

    #[test]
    fn printing_is_graded() {
        let o = order();
        assert_eq!(p("1 - x + z*x").to_string_with(&o), "x*z - x + 1");
        assert_eq!(p("x^2 + y^2 - 1").to_string_with(&o), "x^2 + y^2 - 1");
        assert_eq!(p("1/2*x - 3").to_string_with(&o), "1/2*x - 3");
    }

    #[test]
    fn squarefree_part_removes_repeats() {
        assert_eq!(p("(x-1)^3*(x+2)").squarefree_part(), p("(x-1)*(x+2)"));
        assert_eq!(p("(y-x)^2*(x+1)^2").squarefree_part(), p("(y-x)*(x+1)"));
    }
}
