//! Adaptive verified quadrature.
//!
//! Each panel gets a degree-4 Taylor enclosure: the polynomial part is
//! expanded at the (exact dyadic) midpoint and the order-4 coefficient is
//! evaluated over the whole panel, giving a Lagrange remainder. Panels whose
//! enclosure width exceeds their share of the error budget are bisected.
//! Integrands with sharp peaks just drive the bisection deeper.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::jet::Jet;
use crate::real::{BigReal, Prec, Rounding};
use std::cmp::Ordering;

/// An integrand evaluable as a Taylor jet around an interval base point.
/// `order` is the number of coefficients requested.
pub type JetFn<'a> = dyn Fn(&Interval, usize, Prec) -> Result<Jet> + 'a;

const MAX_DEPTH: u32 = 64;
const MAX_PANELS: u64 = 500_000;

/// Enclosure of the integral of `f` over [a, b] with width <= 2*target_err.
pub fn quadrature(
    f: &JetFn,
    a: &BigReal,
    b: &BigReal,
    target_err: &BigReal,
    prec: Prec,
) -> Result<Interval> {
    assert!(target_err.is_positive());
    if a.cmp_exact(b) == Ordering::Greater {
        return Err(Error::Rejected("quadrature requires a <= b".into()));
    }
    if a == b {
        return Ok(Interval::zero());
    }
    let len = b.sub_exact(a);
    // budget per unit length; total accepted width stays <= 2*target_err
    let rate = target_err.shl(1).div_round(&len, prec + 16, Rounding::Down);
    let mut total = Interval::zero();
    let mut stack: Vec<(BigReal, BigReal, u32)> = vec![(a.clone(), b.clone(), 0)];
    let mut panels: u64 = 0;
    while let Some((u, v, depth)) = stack.pop() {
        panels += 1;
        if panels > MAX_PANELS {
            return Err(Error::QuadratureFailure {
                lo: u.to_decimal_sci(8),
                hi: v.to_decimal_sci(8),
                reason: "panel budget exhausted".into(),
            });
        }
        let plen = v.sub_exact(&u);
        let budget = rate.mul_round(&plen, prec + 16, Rounding::Down);
        match panel_enclosure(f, &u, &v, prec) {
            Ok(enc) if enc.width().cmp_exact(&budget) != Ordering::Greater => {
                total = total.add(&enc, prec + 16);
            }
            Ok(_) => {
                if depth >= MAX_DEPTH {
                    return Err(Error::QuadratureFailure {
                        lo: u.to_decimal_sci(8),
                        hi: v.to_decimal_sci(8),
                        reason: "max depth reached without convergence".into(),
                    });
                }
                let mid = u.add_exact(&v).shl(-1);
                stack.push((mid.clone(), v, depth + 1));
                stack.push((u, mid, depth + 1));
            }
            Err(_) if depth < MAX_DEPTH => {
                let mid = u.add_exact(&v).shl(-1);
                stack.push((mid.clone(), v, depth + 1));
                stack.push((u, mid, depth + 1));
            }
            Err(e) => {
                return Err(Error::QuadratureFailure {
                    lo: u.to_decimal_sci(8),
                    hi: v.to_decimal_sci(8),
                    reason: format!("integrand enclosure failed: {e}"),
                });
            }
        }
    }
    Ok(total)
}

/// Degree-4 Taylor panel: odd terms cancel around the midpoint, the order-4
/// coefficient over the panel supplies the remainder.
fn panel_enclosure(f: &JetFn, u: &BigReal, v: &BigReal, prec: Prec) -> Result<Interval> {
    let p = prec + 16;
    let mid = u.add_exact(v).shl(-1);
    let h = v.sub_exact(&mid); // half-width, exact dyadic
    let h_iv = Interval::point(h.clone());
    let center = f(&Interval::point(mid.clone()), 4, p)?;
    let whole = f(&Interval::new(u.clone(), v.clone()), 5, p)?;
    let c4 = &whole.coeffs[4];
    // int_{-h}^{h} t^j dt = 2h^{j+1}/(j+1) for even j, 0 for odd j
    let h2 = h_iv.mul(&h_iv, p);
    let t0 = center.coeffs[0].mul(&h_iv.shl(1), p);
    let t2 = center.coeffs[2]
        .mul(&h_iv.mul(&h2, p).shl(1), p)
        .div(&Interval::from_i64(3), p)?;
    let h5 = h_iv.mul(&h2.mul(&h2, p), p);
    let t4 = c4.mul(&h5.shl(1), p).div(&Interval::from_i64(5), p)?;
    Ok(t0.add(&t2, p).add(&t4, p))
}

/// Plain interval (degree-0) enclosure of the integral over one panel; used
/// by callers that need a cheap bound rather than convergence.
pub fn panel_box_bound(f: &JetFn, u: &BigReal, v: &BigReal, prec: Prec) -> Result<Interval> {
    let val = f(&Interval::new(u.clone(), v.clone()), 1, prec)?;
    Ok(val.coeffs[0].mul(&Interval::point(v.sub_exact(u)), prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_of_one() {
        let g: Box<JetFn> = Box::new(|_t, n, _p| Ok(Jet::constant(Interval::one(), n.max(5))));
        let err = BigReal::pow2(-30);
        let r = quadrature(&*g, &BigReal::zero(), &BigReal::one(), &err, 96).unwrap();
        assert!(r.contains(&BigReal::one()));
        assert!(r.width().cmp_exact(&err.shl(1)) != Ordering::Greater);
    }

    #[test]
    fn integral_of_sin() {
        // int_0^pi_ish sin = 1 - cos(b); use b = 2 exactly: 1 - cos(2)
        let f: Box<JetFn> = Box::new(|t, n, p| Jet::variable(t.clone(), n).sin(p));
        let err = BigReal::pow2(-40);
        let r = quadrature(&*f, &BigReal::zero(), &BigReal::from_i64(2), &err, 96).unwrap();
        let expect = 1.0 - (2f64).cos();
        assert!(r.lo.to_f64() <= expect && expect <= r.hi.to_f64());
        assert!(r.width().cmp_exact(&err.shl(1)) != Ordering::Greater);
    }

    #[test]
    fn peaked_integrand_adapts() {
        // int_0^1 1/(x^2 + 1e-4) dx = (1/eps)atan(x/eps), eps=1e-2: sharp peak at 0
        let f: Box<JetFn> = Box::new(|t, n, p| {
            let x = Jet::variable(t.clone(), n);
            let denom = x.square(p).add(
                &Jet::constant(Interval::from_ratio_i64(1, 10_000, p), n),
                p,
            );
            Jet::constant(Interval::one(), n).div(&denom, p)
        });
        let err = BigReal::pow2(-20);
        let r = quadrature(&*f, &BigReal::zero(), &BigReal::one(), &err, 96).unwrap();
        let expect = 100.0 * (100.0f64).atan();
        assert!(r.lo.to_f64() <= expect && expect <= r.hi.to_f64());
    }

    #[test]
    fn singular_integrand_fails_cleanly() {
        // 1/t on [0,1] blows up; expect a QuadratureFailure, not a hang
        let f: Box<JetFn> = Box::new(|t, n, p| {
            Jet::constant(Interval::one(), n).div(&Jet::variable(t.clone(), n), p)
        });
        let err = BigReal::pow2(-10);
        let out = quadrature(&*f, &BigReal::zero(), &BigReal::one(), &err, 64);
        assert!(matches!(out, Err(Error::QuadratureFailure { .. })));
    }
}
