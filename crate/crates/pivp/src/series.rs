//! Verified summation of series with explicit tail bounds.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::real::{BigReal, Prec, Rounding};
use std::cmp::Ordering;

/// A series plus a proof obligation: `tail_bound(n)` must dominate
/// |sum_{k>n} term(k)| for every n up to the horizon.
pub struct SeriesSpec<'a> {
    pub term: Box<dyn Fn(u64, Prec) -> Interval + 'a>,
    pub tail_bound: Box<dyn Fn(u64, Prec) -> BigReal + 'a>,
    pub max_terms: u64,
}

/// Sum the series to within `target_err`: the result has width at most
/// 2*target_err and contains the exact infinite sum.
pub fn sum_series(s: &SeriesSpec, target_err: &BigReal, prec: Prec) -> Result<Interval> {
    assert!(target_err.is_positive(), "target_err must be positive");
    let mut p = prec.max(32);
    for _attempt in 0..6 {
        match try_sum(s, target_err, p)? {
            Some(iv) => return Ok(iv),
            None => p *= 2,
        }
    }
    Err(Error::RangeExhausted(
        "series summation could not meet target width".into(),
    ))
}

fn try_sum(s: &SeriesSpec, target_err: &BigReal, p: Prec) -> Result<Option<Interval>> {
    let mut acc = Interval::zero();
    let budget = target_err.mul_exact(&BigReal::from_i64(2));
    for n in 0..s.max_terms {
        acc = acc.add(&(s.term)(n, p), p);
        let tail = (s.tail_bound)(n, p);
        assert!(!tail.is_negative(), "tail bound must be nonnegative");
        if tail.cmp_exact(target_err) != Ordering::Greater {
            let out = acc.inflate(&tail);
            if out.width().cmp_exact(&budget) != Ordering::Greater {
                return Ok(Some(out));
            }
            // partial-sum rounding ate the budget: retry at higher precision
            return Ok(None);
        }
    }
    Err(Error::InsufficientHorizon { max_terms: s.max_terms })
}

/// Tail bound helper for geometric-dominated series: returns c * r^n with
/// outward rounding, for 0 < r < 1 given as a rational pair.
pub fn geometric_tail(c: &BigReal, r_num: i64, r_den: i64) -> impl Fn(u64, Prec) -> BigReal + '_ {
    move |n, p| {
        let r = BigReal::from_i64(r_num);
        let d = BigReal::from_i64(r_den);
        let mut acc = c.clone();
        for _ in 0..n.min(4 * p as u64) {
            acc = acc.mul_round(&r, p, Rounding::Up).div_round(&d, p, Rounding::Up);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn sums_e_minus_two() {
        // sum over k>=2 of 1/k! = e - 2; index n maps to k = n+2,
        // tail after n bounded by 2/(n+3)!
        let factorial = |m: u64| {
            let mut f = BigInt::from(1);
            for k in 2..=m {
                f *= BigInt::from(k);
            }
            f
        };
        let spec = SeriesSpec {
            term: Box::new(move |n, p| {
                Interval::one()
                    .div(&Interval::point(BigReal::from_bigint(factorial(n + 2))), p)
                    .unwrap()
            }),
            tail_bound: Box::new(move |n, p| {
                BigReal::from_i64(2).div_round(
                    &BigReal::from_bigint(factorial(n + 3)),
                    p,
                    Rounding::Up,
                )
            }),
            max_terms: 1000,
        };
        let err = BigReal::pow2(-40);
        let s = sum_series(&spec, &err, 96).unwrap();
        let expect = std::f64::consts::E - 2.0;
        assert!(s.lo.to_f64() <= expect && expect <= s.hi.to_f64());
        assert!(s.width().cmp_exact(&BigReal::pow2(-39)) != std::cmp::Ordering::Greater);
    }

    #[test]
    fn zero_series() {
        let spec = SeriesSpec {
            term: Box::new(|_, _| Interval::zero()),
            tail_bound: Box::new(|_, _| BigReal::zero()),
            max_terms: 10,
        };
        let s = sum_series(&spec, &BigReal::pow2(-20), 64).unwrap();
        assert!(s.contains(&BigReal::zero()));
        assert!(s.width().is_zero());
    }

    #[test]
    fn horizon_error() {
        let spec = SeriesSpec {
            term: Box::new(|_, _| Interval::one()),
            tail_bound: Box::new(|_, _| BigReal::one()),
            max_terms: 5,
        };
        assert!(matches!(
            sum_series(&spec, &BigReal::pow2(-10), 64),
            Err(Error::InsufficientHorizon { .. })
        ));
    }
}
