//! Truncated Taylor series ("jets") with interval coefficients.
//!
//! A `Jet` holds enclosures of the Taylor coefficients c_0..c_{k-1} of a
//! univariate function around a base point. When the base point is itself an
//! interval, coefficient j encloses f^(j)/j! over the whole base interval,
//! which is exactly what Lagrange remainder bounds need.

use crate::error::Result;
use crate::interval::{self, Interval};
use crate::real::{Prec, Rounding};

#[derive(Clone, Debug)]
pub struct Jet {
    pub coeffs: Vec<Interval>,
}

impl Jet {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn constant(c: Interval, order: usize) -> Jet {
        let mut coeffs = vec![Interval::zero(); order];
        if order > 0 {
            coeffs[0] = c;
        }
        Jet { coeffs }
    }

    pub fn variable(t0: Interval, order: usize) -> Jet {
        let mut coeffs = vec![Interval::zero(); order];
        if order > 0 {
            coeffs[0] = t0;
        }
        if order > 1 {
            coeffs[1] = Interval::one();
        }
        Jet { coeffs }
    }

    pub fn value(&self) -> &Interval {
        &self.coeffs[0]
    }

    pub fn add(&self, other: &Jet, prec: Prec) -> Jet {
        self.zip(other, |a, b| a.add(b, prec))
    }

    pub fn sub(&self, other: &Jet, prec: Prec) -> Jet {
        self.zip(other, |a, b| a.sub(b, prec))
    }

    fn zip(&self, other: &Jet, f: impl Fn(&Interval, &Interval) -> Interval) -> Jet {
        let n = self.order().max(other.order());
        let z = Interval::zero();
        let coeffs = (0..n)
            .map(|i| {
                f(
                    self.coeffs.get(i).unwrap_or(&z),
                    other.coeffs.get(i).unwrap_or(&z),
                )
            })
            .collect();
        Jet { coeffs }
    }

    pub fn neg(&self) -> Jet {
        Jet { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn scale(&self, k: &Interval, prec: Prec) -> Jet {
        Jet { coeffs: self.coeffs.iter().map(|c| c.mul(k, prec)).collect() }
    }

    pub fn mul(&self, other: &Jet, prec: Prec) -> Jet {
        let n = self.order().max(other.order());
        let mut coeffs = vec![Interval::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.lo.is_zero() && a.hi.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b, prec), prec);
            }
        }
        Jet { coeffs }
    }

    /// Quotient jet; the constant coefficient of `other` must exclude zero.
    pub fn div(&self, other: &Jet, prec: Prec) -> Result<Jet> {
        let n = self.order().max(other.order());
        let b0 = &other.coeffs[0];
        let inv_b0 = b0.recip(prec)?;
        let z = Interval::zero();
        let mut q: Vec<Interval> = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = self.coeffs.get(i).unwrap_or(&z).clone();
            for j in 0..i {
                let b = other.coeffs.get(i - j).unwrap_or(&z);
                acc = acc.sub(&q[j].mul(b, prec), prec);
            }
            q.push(acc.mul(&inv_b0, prec));
        }
        Ok(Jet { coeffs: q })
    }

    pub fn recip(&self, prec: Prec) -> Result<Jet> {
        Jet::constant(Interval::one(), self.order()).div(self, prec)
    }

    pub fn pow_int(&self, n: u32, prec: Prec) -> Jet {
        let mut acc = Jet::constant(Interval::one(), self.order());
        for _ in 0..n {
            acc = acc.mul(self, prec);
        }
        acc
    }

    pub fn square(&self, prec: Prec) -> Jet {
        self.mul(self, prec)
    }

    /// exp of a jet: e_n = (1/n) sum_{j=1..n} j a_j e_{n-j}.
    pub fn exp(&self, prec: Prec) -> Result<Jet> {
        let n = self.order();
        let mut e = Vec::with_capacity(n);
        e.push(interval::exp(&self.coeffs[0], prec)?);
        for m in 1..n {
            let mut acc = Interval::zero();
            for j in 1..=m {
                let term = self.coeffs[j]
                    .mul(&e[m - j], prec)
                    .mul(&Interval::from_i64(j as i64), prec);
                acc = acc.add(&term, prec);
            }
            e.push(acc.div(&Interval::from_i64(m as i64), prec)?);
        }
        Ok(Jet { coeffs: e })
    }

    /// (sin, cos) of a jet, computed jointly.
    pub fn sin_cos(&self, prec: Prec) -> Result<(Jet, Jet)> {
        let n = self.order();
        let mut s = Vec::with_capacity(n);
        let mut c = Vec::with_capacity(n);
        s.push(interval::sin(&self.coeffs[0], prec)?);
        c.push(interval::cos(&self.coeffs[0], prec)?);
        for m in 1..n {
            let mut sa = Interval::zero();
            let mut ca = Interval::zero();
            for j in 1..=m {
                let ja = self.coeffs[j].mul(&Interval::from_i64(j as i64), prec);
                sa = sa.add(&ja.mul(&c[m - j], prec), prec);
                ca = ca.add(&ja.mul(&s[m - j], prec), prec);
            }
            let im = Interval::from_i64(m as i64);
            s.push(sa.div(&im, prec)?);
            c.push(ca.neg().div(&im, prec)?);
        }
        Ok((Jet { coeffs: s }, Jet { coeffs: c }))
    }

    pub fn sin(&self, prec: Prec) -> Result<Jet> {
        Ok(self.sin_cos(prec)?.0)
    }

    pub fn cos(&self, prec: Prec) -> Result<Jet> {
        Ok(self.sin_cos(prec)?.1)
    }

    /// (sinh, cosh) jointly.
    pub fn sinh_cosh(&self, prec: Prec) -> Result<(Jet, Jet)> {
        let n = self.order();
        let mut s = Vec::with_capacity(n);
        let mut c = Vec::with_capacity(n);
        s.push(interval::sinh(&self.coeffs[0], prec)?);
        c.push(interval::cosh(&self.coeffs[0], prec)?);
        for m in 1..n {
            let mut sa = Interval::zero();
            let mut ca = Interval::zero();
            for j in 1..=m {
                let ja = self.coeffs[j].mul(&Interval::from_i64(j as i64), prec);
                sa = sa.add(&ja.mul(&c[m - j], prec), prec);
                ca = ca.add(&ja.mul(&s[m - j], prec), prec);
            }
            let im = Interval::from_i64(m as i64);
            s.push(sa.div(&im, prec)?);
            c.push(ca.div(&im, prec)?);
        }
        Ok((Jet { coeffs: s }, Jet { coeffs: c }))
    }

    /// tanh via v' = (1 - v^2) a'.
    pub fn tanh(&self, prec: Prec) -> Result<Jet> {
        let n = self.order();
        let mut v = Vec::with_capacity(n);
        v.push(interval::tanh(&self.coeffs[0], prec)?);
        // w = 1 - v^2, built incrementally
        let mut w = Vec::with_capacity(n);
        w.push(Interval::one().sub(&v[0].mul(&v[0], prec), prec));
        for m in 1..n {
            let mut acc = Interval::zero();
            for j in 1..=m {
                let ja = self.coeffs[j].mul(&Interval::from_i64(j as i64), prec);
                acc = acc.add(&ja.mul(&w[m - j], prec), prec);
            }
            v.push(acc.div(&Interval::from_i64(m as i64), prec)?);
            if m < n - 1 {
                // w_m = - sum_{i=0..m} v_i v_{m-i}
                let mut wm = Interval::zero();
                for i in 0..=m {
                    wm = wm.add(&v[i].mul(&v[m - i], prec), prec);
                }
                w.push(wm.neg());
            }
        }
        Ok(Jet { coeffs: v })
    }

    /// atan via v' = a'/(1 + a^2).
    pub fn atan(&self, prec: Prec) -> Result<Jet> {
        let n = self.order();
        let one = Jet::constant(Interval::one(), n);
        let g = one.div(&self.square(prec).add(&one, prec), prec)?;
        let mut v = Vec::with_capacity(n);
        v.push(interval::atan(&self.coeffs[0], prec)?);
        for m in 1..n {
            let mut acc = Interval::zero();
            for j in 1..=m {
                let ja = self.coeffs[j].mul(&Interval::from_i64(j as i64), prec);
                acc = acc.add(&ja.mul(&g.coeffs[m - j], prec), prec);
            }
            v.push(acc.div(&Interval::from_i64(m as i64), prec)?);
        }
        Ok(Jet { coeffs: v })
    }

    /// Evaluate the truncated polynomial at offset h from the base point.
    pub fn eval_at(&self, h: &Interval, prec: Prec) -> Interval {
        let mut acc = Interval::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(h, prec).add(c, prec);
        }
        acc
    }

    /// Antiderivative coefficients: c_j -> c_j/(j+1) shifted up one slot,
    /// constant term zero.
    pub fn integrate(&self, prec: Prec) -> Jet {
        let mut coeffs = Vec::with_capacity(self.order() + 1);
        coeffs.push(Interval::zero());
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs.push(
                c.div(&Interval::from_i64(j as i64 + 1), prec)
                    .expect("division by nonzero integer"),
            );
        }
        Jet { coeffs }
    }

    /// Truncate or zero-extend to the given order.
    pub fn resize(&self, order: usize) -> Jet {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order, Interval::zero());
        Jet { coeffs }
    }

    /// Largest coefficient-magnitude bound, as log2, over coefficients
    /// j >= from. Returns None if all are zero.
    pub fn tail_mag_log2(&self, from: usize) -> Option<i64> {
        self.coeffs[from.min(self.order())..]
            .iter()
            .filter_map(|c| c.mag().msb_pos())
            .max()
    }
}

/// Convenience: midpoint-collapse every coefficient (used by point-mode
/// integration to stop width accumulation between steps).
pub fn collapse(j: &Jet, prec: Prec) -> Jet {
    Jet {
        coeffs: j
            .coeffs
            .iter()
            .map(|c| Interval::point(c.midpoint(prec).round_to(prec, Rounding::Nearest)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(iv: &Interval, v: f64, tol: f64) {
        let m = iv.to_f64();
        assert!((m - v).abs() < tol, "expected {v}, got {m}");
        assert!(iv.lo.to_f64() <= v + tol && iv.hi.to_f64() >= v - tol);
    }

    #[test]
    fn exp_jet_coefficients() {
        // exp around 0: coefficients 1/j!
        let x = Jet::variable(Interval::zero(), 6);
        let e = x.exp(96).unwrap();
        let mut fact = 1.0;
        for j in 0..6 {
            if j > 0 {
                fact *= j as f64;
            }
            close(&e.coeffs[j], 1.0 / fact, 1e-20);
        }
    }

    #[test]
    fn sin_cos_jet_coefficients() {
        let x = Jet::variable(Interval::zero(), 6);
        let (s, c) = x.sin_cos(96).unwrap();
        let s_expect = [0.0, 1.0, 0.0, -1.0 / 6.0, 0.0, 1.0 / 120.0];
        let c_expect = [1.0, 0.0, -0.5, 0.0, 1.0 / 24.0, 0.0];
        for j in 0..6 {
            close(&s.coeffs[j], s_expect[j], 1e-20);
            close(&c.coeffs[j], c_expect[j], 1e-20);
        }
    }

    #[test]
    fn tanh_atan_derivatives() {
        // tanh'(1) = 1 - tanh(1)^2, atan'(0.5) = 1/1.25
        let x = Jet::variable(Interval::one(), 3);
        let t = x.tanh(96).unwrap();
        let th = (1f64).tanh();
        close(&t.coeffs[0], th, 1e-15);
        close(&t.coeffs[1], 1.0 - th * th, 1e-15);
        let h = Jet::variable(Interval::from_ratio_i64(1, 2, 96), 3);
        let a = h.atan(96).unwrap();
        close(&a.coeffs[0], (0.5f64).atan(), 1e-15);
        close(&a.coeffs[1], 0.8, 1e-15);
    }

    #[test]
    fn geometric_div() {
        // 1/(1-x) around 0: all coefficients 1
        let x = Jet::variable(Interval::zero(), 5);
        let one = Jet::constant(Interval::one(), 5);
        let g = one.div(&one.sub(&x, 96), 96).unwrap();
        for j in 0..5 {
            close(&g.coeffs[j], 1.0, 1e-25);
        }
    }

    #[test]
    fn eval_matches_function() {
        // exp jet at 1 evaluated at h=0.1 vs e^{1.1}
        let x = Jet::variable(Interval::one(), 24);
        let e = x.exp(96).unwrap();
        let h = Interval::from_ratio_i64(1, 10, 96);
        let v = e.eval_at(&h, 96);
        close(&v, (1.1f64).exp(), 1e-12);
    }
}
