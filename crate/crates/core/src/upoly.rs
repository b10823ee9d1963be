//! Dense univariate integer polynomials and Descartes-rule root isolation.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::{Poly, Rat};

/// Dense polynomial with integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UPoly {
    coeffs: Vec<BigInt>,
}

fn sign_of(b: &BigInt) -> i8 {
    match b.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl UPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_i64(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Linear polynomial `den*x - num` for the rational `q`.
    pub fn linear(q: &Rat) -> Self {
        UPoly::new(vec![-q.numer().clone(), q.denom().clone()])
    }

    /// Converts a polynomial that involves at most the variable `v`,
    /// clearing denominators and taking the primitive part.
    pub fn from_poly(p: &Poly, v: usize) -> Self {
        let d = p.degree(v) as usize;
        let mut rc = vec![Rat::zero(); d + 1];
        for (m, c) in p.terms() {
            debug_assert!(m.iter().enumerate().all(|(i, &e)| i == v || e == 0), "not univariate");
            rc[m[v] as usize] += c;
        }
        let den = rc.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = rc.iter().map(|c| (c * Rat::from_integer(den.clone())).to_integer()).collect();
        UPoly::new(ints).primitive()
    }

    pub fn to_poly(&self, nvars: usize, v: usize) -> Poly {
        Poly::from_terms(
            nvars,
            self.coeffs.iter().enumerate().map(|(i, c)| {
                let mut m = vec![0; nvars];
                m[v] = i as u32;
                (m, Rat::from_integer(c.clone()))
            }),
        )
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> &BigInt {
        self.coeffs.last().expect("zero polynomial")
    }

    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        let mut cs: Vec<BigInt> = self.coeffs.iter().map(|c| c / &g).collect();
        if cs.last().unwrap().is_negative() {
            for c in cs.iter_mut() {
                *c = -&*c;
            }
        }
        UPoly { coeffs: cs }
    }

    pub fn derivative(&self) -> Self {
        UPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    /// Sign of `p(q)` for a rational `q`, computed on the homogenized numerator.
    pub fn sign_at(&self, q: &Rat) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let (n, d) = (q.numer(), q.denom());
        let deg = self.degree();
        let mut acc = BigInt::zero();
        let mut npow = BigInt::one();
        let mut dpows = Vec::with_capacity(deg + 1);
        let mut t = BigInt::one();
        for _ in 0..=deg {
            dpows.push(t.clone());
            t *= d;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * &npow * &dpows[deg - i];
            }
            npow *= n;
        }
        sign_of(&acc)
    }

    pub fn eval(&self, q: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q + Rat::from_integer(c.clone());
        }
        acc
    }

    /// Exact division over Q, returned primitive.
    pub fn div_exact(&self, other: &UPoly) -> UPoly {
        let (q, r) = self.divrem_rat(other);
        debug_assert!(r.iter().all(|c| c.is_zero()), "inexact division");
        let den = q.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        UPoly::new(q.iter().map(|c| (c * Rat::from_integer(den.clone())).to_integer()).collect()).primitive()
    }

    fn divrem_rat(&self, other: &UPoly) -> (Vec<Rat>, Vec<Rat>) {
        let mut r: Vec<Rat> = self.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect();
        let dd = other.degree();
        let lc = Rat::from_integer(other.lc().clone());
        if r.len() <= dd {
            return (vec![], r);
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, oc) in other.coeffs.iter().enumerate() {
                    r[k + j] -= &c * Rat::from_integer(oc.clone());
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (q, r)
    }

    /// Remainder over Q, as a primitive integer polynomial.
    pub fn rem(&self, other: &UPoly) -> UPoly {
        let (_, r) = self.divrem_rat(other);
        let den = r.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        UPoly::new(r.iter().map(|c| (c * Rat::from_integer(den.clone())).to_integer()).collect()).primitive()
    }

    /// Primitive gcd. A gcd modulo a prime not dividing either leading
    /// coefficient has at least the degree of the true gcd, so a constant
    /// modular gcd settles the common coprime case without big-integer
    /// remainders; otherwise a primitive remainder sequence runs over Z.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.degree() == 0 || b.degree() == 0 || coprime_mod_p(&a, &b) {
            return UPoly::new(vec![BigInt::one()]);
        }
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.prem(&b).primitive();
            a = b;
            b = r;
        }
        a.primitive()
    }

    /// Pseudo-remainder `lc(b)^(deg a − deg b + 1) · a mod b` over Z.
    fn prem(&self, b: &UPoly) -> UPoly {
        let db = b.degree();
        let mut r = self.coeffs.clone();
        if r.len() <= db {
            return self.clone();
        }
        let lc = b.lc().clone();
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1 - db;
            let c = r.last().unwrap().clone();
            for x in r.iter_mut() {
                *x *= &lc;
            }
            for (j, bc) in b.coeffs.iter().enumerate() {
                r[k + j] -= &c * bc;
            }
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        UPoly::new(r)
    }

    pub fn squarefree(&self) -> UPoly {
        if self.degree() <= 1 {
            return self.primitive();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            self.primitive()
        } else {
            self.div_exact(&g)
        }
    }

    /// Real roots of the squarefree part, in increasing order.
    pub fn real_root_intervals(&self) -> Vec<RootInterval> {
        assert!(!self.is_zero(), "zero polynomial has no isolated roots");
        let p = self.squarefree();
        if p.degree() == 0 {
            return vec![];
        }
        let mut out = Vec::new();
        let mut q = p.coeffs.clone();
        if q[0].is_zero() {
            out.push(RootInterval::Exact(Rat::zero()));
            q.remove(0);
        }
        let q = UPoly::new(q);
        if q.degree() > 0 {
            let k = root_bound_log2(&q);
            // positive roots: q(2^k t), t in (0,1)
            let scaled = scale_pow2(&q.coeffs, k);
            isolate_unit(&scaled, k, false, &mut out);
            // negative roots: q(-2^k t)
            let neg: Vec<BigInt> =
                q.coeffs.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect();
            let scaled = scale_pow2(&neg, k);
            isolate_unit(&scaled, k, true, &mut out);
        }
        out.sort_by(|a, b| a.lo().cmp(b.lo()));
        out.into_iter().map(|iv| p.tidy(iv)).collect()
    }

    /// Shrinks an isolating interval of the squarefree `self` until its
    /// endpoints are not roots and its width is at most 1. Near a simple root
    /// `a` the sign of `self` is the sign of the derivative at `a`.
    fn tidy(&self, iv: RootInterval) -> RootInterval {
        let RootInterval::Open(mut a, mut b) = iv else {
            return iv;
        };
        let d = self.derivative();
        let two = Rat::from_integer(BigInt::from(2));
        loop {
            let sa = match self.sign_at(&a) {
                0 => d.sign_at(&a),
                s => s,
            };
            let a_root = self.sign_at(&a) == 0;
            let b_root = self.sign_at(&b) == 0;
            if !a_root && !b_root && &b - &a <= Rat::one() {
                return RootInterval::Open(a, b);
            }
            let m = (&a + &b) / &two;
            let sm = self.sign_at(&m);
            if sm == 0 {
                return RootInterval::Exact(m);
            }
            if sm != sa {
                b = m;
            } else {
                a = m;
            }
        }
    }

    /// Number of sign variations of the coefficient sequence.
    pub fn sign_variations(cs: &[BigInt]) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for c in cs {
            let s = sign_of(c);
            if s != 0 {
                if last != 0 && s != last {
                    v += 1;
                }
                last = s;
            }
        }
        v
    }
}

/// An isolating interval produced by root isolation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootInterval {
    Exact(Rat),
    Open(Rat, Rat),
}

impl RootInterval {
    pub fn lo(&self) -> &Rat {
        match self {
            RootInterval::Exact(q) => q,
            RootInterval::Open(a, _) => a,
        }
    }

    pub fn hi(&self) -> &Rat {
        match self {
            RootInterval::Exact(q) => q,
            RootInterval::Open(_, b) => b,
        }
    }
}

/// Smallest `k` with every root of `q` strictly inside `(-2^k, 2^k)`.
const PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];

fn reduce_mod(c: &BigInt, p: u64) -> u64 {
    let m = (c % BigInt::from(p)).to_i64().unwrap();
    m.rem_euclid(p as i64) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r, mut base, mut e) = (1u64, a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    r
}

/// Degree of gcd(a, b) modulo `p`, or None when `p` divides a leading
/// coefficient.
fn gcd_degree_mod(a: &UPoly, b: &UPoly, p: u64) -> Option<usize> {
    let mut x: Vec<u64> = a.coeffs.iter().map(|c| reduce_mod(c, p)).collect();
    let mut y: Vec<u64> = b.coeffs.iter().map(|c| reduce_mod(c, p)).collect();
    if *x.last()? == 0 || *y.last()? == 0 {
        return None;
    }
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    loop {
        while y.last() == Some(&0) {
            y.pop();
        }
        if y.is_empty() {
            return Some(x.len() - 1);
        }
        let inv = inv_mod(*y.last().unwrap(), p);
        while x.len() >= y.len() {
            let c = x.last().unwrap() * inv % p;
            let k = x.len() - y.len();
            for (j, yc) in y.iter().enumerate() {
                x[k + j] = (x[k + j] + p - c * yc % p) % p;
            }
            x.pop();
            while x.last() == Some(&0) {
                x.pop();
            }
            if x.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut x, &mut y);
    }
}

fn coprime_mod_p(a: &UPoly, b: &UPoly) -> bool {
    PRIMES.iter().any(|&p| gcd_degree_mod(a, b, p) == Some(0))
}

fn root_bound_log2(q: &UPoly) -> u32 {
    // Cauchy: |root| < 1 + max |a_i / a_n|
    let lc_bits = q.lc().bits() as i64;
    let max_bits = q.coeffs[..q.degree()].iter().map(|c| c.bits() as i64).max().unwrap_or(0);
    let k = (max_bits - lc_bits + 2).max(1);
    k as u32
}

/// Coefficients of `q(2^k x)`.
fn scale_pow2(cs: &[BigInt], k: u32) -> Vec<BigInt> {
    cs.iter().enumerate().map(|(i, c)| c << (k as usize * i)).collect()
}

/// Coefficients of `q(x+1)`.
fn taylor_shift1(cs: &[BigInt]) -> Vec<BigInt> {
    let mut a = cs.to_vec();
    let n = a.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = a[j + 1].clone();
            a[j] += t;
        }
    }
    a
}

/// Descartes bound for roots of `q` in `(0, 1)`.
fn descartes_01(cs: &[BigInt]) -> usize {
    let rev: Vec<BigInt> = cs.iter().rev().cloned().collect();
    UPoly::sign_variations(&taylor_shift1(&rev))
}

/// Isolates roots of `q` in (0,1); interval `(c/2^j, (c+1)/2^j)` of the
/// unit parameter maps to `±2^k` times itself.
fn isolate_unit(q: &[BigInt], k: u32, negate: bool, out: &mut Vec<RootInterval>) {
    let to_real = |num: &BigInt, j: u32| -> Rat {
        // num / 2^j * 2^k
        let v = if k >= j {
            Rat::from_integer(num << ((k - j) as usize))
        } else {
            Rat::new(num.clone(), BigInt::one() << ((j - k) as usize))
        };
        if negate {
            -v
        } else {
            v
        }
    };
    let mut stack: Vec<(Vec<BigInt>, BigInt, u32)> = vec![(q.to_vec(), BigInt::zero(), 0)];
    while let Some((p, c, j)) = stack.pop() {
        let var = descartes_01(&p);
        if var == 0 {
            continue;
        }
        if var == 1 {
            let a = to_real(&c, j);
            let b = to_real(&(&c + 1), j);
            out.push(if negate { RootInterval::Open(b, a) } else { RootInterval::Open(a, b) });
            continue;
        }
        let n = p.len() - 1;
        // left half: 2^n p(x/2)
        let left: Vec<BigInt> = p.iter().enumerate().map(|(i, a)| a << (n - i)).collect();
        let mut right = taylor_shift1(&left);
        let c2 = &c << 1;
        if right[0].is_zero() {
            // midpoint is a root
            out.push(RootInterval::Exact(to_real(&(&c2 + 1), j + 1)));
            right.remove(0);
        }
        stack.push((right, &c2 + 1, j + 1));
        stack.push((left, c2, j + 1));
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;
    use proptest::prelude::*;

    #[test]
    fn sqrt_two() {
        let p = UPoly::from_i64(&[-2, 0, 1]);
        let r = p.real_root_intervals();
        assert_eq!(r.len(), 2);
        for iv in &r {
            assert_eq!(sturm::count(&p, Some((iv.lo(), iv.hi()))), 1);
        }
        assert!(r[0].lo() >= &Rat::from_integer((-2).into()) && r[0].hi() <= &Rat::from_integer((-1).into()));
        assert!(r[1].lo() >= &Rat::from_integer(1.into()) && r[1].hi() <= &Rat::from_integer(2.into()));
    }

    #[test]
    fn gcd_finds_common_factor() {
        // (x−1)(x+2) and (x−1)(x−3)
        let a = UPoly::from_i64(&[-2, 1, 1]);
        let b = UPoly::from_i64(&[3, -4, 1]);
        assert_eq!(a.gcd(&b), UPoly::from_i64(&[-1, 1]));
        assert_eq!(a.gcd(&UPoly::from_i64(&[1, 0, 1])), UPoly::from_i64(&[1]));
        // 2x² − 2 shares x + 1 with 3x + 3 after content removal
        assert_eq!(UPoly::from_i64(&[-2, 0, 2]).gcd(&UPoly::from_i64(&[3, 3])), UPoly::from_i64(&[1, 1]));
    }

    #[test]
    fn no_real_roots() {
        assert!(UPoly::from_i64(&[1, 0, 1]).real_root_intervals().is_empty());
    }

    #[test]
    fn cube_has_single_point_root() {
        let r = UPoly::from_i64(&[0, 0, 0, 1]).real_root_intervals();
        assert_eq!(r, vec![RootInterval::Exact(Rat::zero())]);
    }

    #[test]
    fn rational_roots_found_exactly_or_isolated() {
        // (2x-1)(x+3)(x-5)
        let p = UPoly::from_i64(&[15, -28, -3, 2]);
        let r = p.real_root_intervals();
        assert_eq!(r.len(), 3);
        let sorted: Vec<&Rat> = r.iter().map(|i| i.lo()).collect();
        assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        for (iv, root) in r.iter().zip([ratio(-3, 1), ratio(1, 2), ratio(5, 1)]) {
            assert!(iv.lo() <= &root && &root <= iv.hi());
        }
    }

    #[test]
    fn sign_at_matches_eval() {
        let p = UPoly::from_i64(&[-2, 0, 1]);
        assert_eq!(p.sign_at(&ratio(3, 2)), 1);
        assert_eq!(p.sign_at(&ratio(7, 5)), -1);
        assert_eq!(UPoly::from_i64(&[-1, 2]).sign_at(&ratio(1, 2)), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]
        #[test]
        fn isolation_matches_sturm(cs in proptest::collection::vec(-20i64..21, 2..10)) {
            let p = UPoly::from_i64(&cs);
            prop_assume!(p.degree() >= 1);
            let r = p.real_root_intervals();
            prop_assert_eq!(r.len(), sturm::count(&p, None));
            let sq = p.squarefree();
            for w in r.windows(2) {
                prop_assert!(w[0].hi() <= w[1].lo());
            }
            for iv in &r {
                match iv {
                    RootInterval::Exact(q) => prop_assert_eq!(sq.sign_at(q), 0),
                    RootInterval::Open(a, b) => {
                        prop_assert!(a < b);
                        let (sa, sb) = (sq.sign_at(a), sq.sign_at(b));
                        prop_assert!(sa != 0 && sb != 0 && sa != sb);
                    }
                }
            }
        }
    }
}
