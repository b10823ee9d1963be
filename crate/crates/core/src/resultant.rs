//! Resultants and discriminants via the subresultant PRS.

use crate::error::{CadError, Result};
use crate::poly::Poly;

/// `res_v(p, q)`, equal to the Sylvester determinant of `p` and `q` in `v`.
pub fn resultant(p: &Poly, q: &Poly, v: usize) -> Result<Poly> {
    if p.nvars() != q.nvars() {
        return Err(CadError::Usage("resultant of polynomials over different orders".into()));
    }
    if p.degree(v) == 0 || q.degree(v) == 0 {
        return Err(CadError::Usage("resultant needs positive degree in the eliminated variable".into()));
    }
    Ok(resultant_unchecked(p, q, v))
}

/// Sylvester resultant that also accepts degree-0 inputs (`res(a, c) = c^deg a`).
pub(crate) fn resultant_unchecked(p: &Poly, q: &Poly, v: usize) -> Poly {
    let nv = p.nvars();
    if p.is_zero() || q.is_zero() {
        return Poly::zero(nv);
    }
    let (dp, dq) = (p.degree(v), q.degree(v));
    if dp == 0 {
        return p.pow(dq);
    }
    if dq == 0 {
        return q.pow(dp);
    }
    let mut a = p.clone();
    let mut b = q.clone();
    let mut sign_neg = false;
    if a.degree(v) < b.degree(v) {
        std::mem::swap(&mut a, &mut b);
        if dp % 2 == 1 && dq % 2 == 1 {
            sign_neg = true;
        }
    }
    let mut g = Poly::one(nv);
    let mut h = Poly::one(nv);
    loop {
        let da = a.degree(v);
        let db = b.degree(v);
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            sign_neg = !sign_neg;
        }
        let r = a.prem(&b, v);
        a = b;
        if r.is_zero() {
            return Poly::zero(nv);
        }
        b = r.exact_div(&(&g * &h.pow(delta))).expect("subresultant division is exact");
        g = a.lc(v);
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => g.pow(delta).exact_div(&h.pow(delta - 1)).expect("subresultant h update"),
        };
        if b.degree(v) == 0 {
            break;
        }
    }
    let da = a.degree(v);
    // h <- lc(B)^{deg A} / h^{deg A - 1}
    let lb = b.clone();
    let res = if da <= 1 { lb } else { lb.pow(da).exact_div(&h.pow(da - 1)).expect("final subresultant division") };
    if sign_neg {
        res.neg()
    } else {
        res
    }
}

/// `disc_v(p) = (-1)^{d(d-1)/2} res_v(p, p') / lc_v(p)`.
pub fn discriminant(p: &Poly, v: usize) -> Result<Poly> {
    let d = p.degree(v);
    if d < 2 {
        return Err(CadError::Usage("discriminant needs degree at least 2".into()));
    }
    let r = resultant_unchecked(p, &p.derivative(v), v);
    let lc = p.lc(v);
    let q = r.exact_div(&lc).expect("leading coefficient divides the resultant");
    let s = (d as u64 * (d as u64 - 1) / 2) % 2;
    Ok(if s == 1 { q.neg() } else { q })
}
