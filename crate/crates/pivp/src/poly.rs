//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are `u32` indices. Terms are kept in a `BTreeMap` keyed by
//! monomial so iteration order, serialization and equality are deterministic.

use crate::interval::Interval;
use crate::jet::Jet;
use crate::real::Prec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Coef = BigRational;

/// Exponent multi-index, sorted by variable, all exponents positive.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub Vec<(u32, u32)>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: u32) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: BTreeMap<u32, u32> = BTreeMap::new();
        for &(v, e) in self.0.iter().chain(other.0.iter()) {
            *out.entry(v).or_insert(0) += e;
        }
        Monomial(out.into_iter().collect())
    }

    pub fn exponent_of(&self, v: u32) -> u32 {
        self.0
            .iter()
            .find_map(|&(w, e)| if w == v { Some(e) } else { None })
            .unwrap_or(0)
    }

    /// Divide by var once; None if var absent.
    pub fn div_var(&self, v: u32) -> Option<Monomial> {
        let mut out = self.0.clone();
        for entry in out.iter_mut() {
            if entry.0 == v {
                if entry.1 == 1 {
                    let filtered = out.iter().copied().filter(|&(w, _)| w != v).collect();
                    return Some(Monomial(filtered));
                }
                entry.1 -= 1;
                return Some(Monomial(out));
            }
        }
        None
    }

    /// Self / other, if other divides self.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out: BTreeMap<u32, u32> = self.0.iter().copied().collect();
        for &(v, e) in &other.0 {
            let cur = out.get_mut(&v)?;
            if *cur < e {
                return None;
            }
            *cur -= e;
            if *cur == 0 {
                out.remove(&v);
            }
        }
        Some(Monomial(out.into_iter().collect()))
    }

    pub fn vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    pub fn map_vars(&self, f: impl Fn(u32) -> u32) -> Monomial {
        let mut out: BTreeMap<u32, u32> = BTreeMap::new();
        for &(v, e) in &self.0 {
            *out.entry(f(v)).or_insert(0) += e;
        }
        Monomial(out.into_iter().collect())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    pub terms: BTreeMap<Monomial, Coef>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        Poly { terms }
    }

    pub fn constant_i64(c: i64) -> Self {
        Poly::constant(BigRational::from(BigInt::from(c)))
    }

    pub fn var(v: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), BigRational::one());
        Poly { terms }
    }

    /// The single variable index if this polynomial is exactly one variable
    /// with coefficient 1.
    pub fn as_single_var(&self) -> Option<u32> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        if c.is_one() && m.0.len() == 1 && m.0[0].1 == 1 {
            Some(m.0[0].0)
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_unit() {
                return Some(c.clone());
            }
        }
        None
    }

    fn insert_term(&mut self, m: Monomial, c: Coef) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        use std::collections::btree_map::Entry;
        match entry {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Coef) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn partial_deriv(&self, v: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent_of(v);
            if e > 0 {
                let m2 = m.div_var(v).unwrap();
                out.insert_term(m2, c * BigRational::from(BigInt::from(e)));
            }
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn max_var(&self) -> Option<u32> {
        self.terms.keys().flat_map(|m| m.vars()).max()
    }

    pub fn vars_used(&self) -> std::collections::BTreeSet<u32> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    pub fn map_vars(&self, f: impl Fn(u32) -> u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.insert_term(m.map_vars(&f), c.clone());
        }
        out
    }

    /// Chain rule: d/dt of this polynomial given each variable's derivative.
    pub fn time_derivative(&self, deriv_of: &dyn Fn(u32) -> Poly) -> Poly {
        let mut out = Poly::zero();
        for v in self.vars_used() {
            let dv = deriv_of(v);
            if dv.is_zero() {
                continue;
            }
            out = out.add(&self.partial_deriv(v).mul(&dv));
        }
        out
    }

    pub fn eval_intervals(&self, vars: &dyn Fn(u32) -> Interval, prec: Prec) -> Interval {
        let mut acc = Interval::zero();
        for (m, c) in &self.terms {
            let mut t = Interval::from_rational(c, prec);
            for &(v, e) in &m.0 {
                t = t.mul(&vars(v).pow_int(e, prec), prec);
            }
            acc = acc.add(&t, prec);
        }
        acc
    }

    pub fn eval_jets(&self, vars: &dyn Fn(u32) -> Jet, order: usize, prec: Prec) -> Jet {
        let mut acc = Jet::constant(Interval::zero(), order);
        for (m, c) in &self.terms {
            let mut t = Jet::constant(Interval::from_rational(c, prec), order);
            for &(v, e) in &m.0 {
                let base = vars(v);
                for _ in 0..e {
                    t = t.mul(&base, prec);
                }
            }
            acc = acc.add(&t, prec);
        }
        acc
    }

    /// Exact rational evaluation; None if any needed variable is missing.
    pub fn eval_rationals(&self, vars: &dyn Fn(u32) -> Option<BigRational>) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                let val = vars(v)?;
                for _ in 0..e {
                    t *= val.clone();
                }
            }
            acc += t;
        }
        Some(acc)
    }
}

pub fn format_coef(c: &Coef) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

pub fn parse_coef(s: &str) -> Option<Coef> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = n.trim().parse().ok()?;
    let den: BigInt = d.trim().parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let ac = c.abs();
            let show_coef = !ac.is_one() || m.is_unit();
            if show_coef {
                if ac.denom().is_one() {
                    write!(f, "{}", ac.numer())?;
                } else {
                    write!(f, "{}/{}", ac.numer(), ac.denom())?;
                }
            }
            for (i, &(v, e)) in m.0.iter().enumerate() {
                if i > 0 || show_coef {
                    write!(f, "*")?;
                }
                write!(f, "x{v}")?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn arithmetic_and_derivative() {
        // p = 2 x0^2 x1 - 3 x1
        let p = Poly::var(0)
            .mul(&Poly::var(0))
            .mul(&Poly::var(1))
            .scale(&r(2))
            .sub(&Poly::var(1).scale(&r(3)));
        assert_eq!(p.total_degree(), 3);
        let dp0 = p.partial_deriv(0); // 4 x0 x1
        assert_eq!(dp0, Poly::var(0).mul(&Poly::var(1)).scale(&r(4)));
        let dp1 = p.partial_deriv(1); // 2 x0^2 - 3
        assert_eq!(
            dp1,
            Poly::var(0).mul(&Poly::var(0)).scale(&r(2)).add(&Poly::constant(r(-3)))
        );
    }

    #[test]
    fn eval_paths_agree() {
        let p = Poly::var(0).pow(3).add(&Poly::var(1).scale(&r(5)));
        let exact = p
            .eval_rationals(&|v| Some(if v == 0 { r(2) } else { r(7) }))
            .unwrap();
        assert_eq!(exact, r(43));
        let iv = p.eval_intervals(
            &|v| if v == 0 { Interval::from_i64(2) } else { Interval::from_i64(7) },
            64,
        );
        assert!(iv.contains(&crate::real::BigReal::from_i64(43)));
    }

    #[test]
    fn chain_rule() {
        // p = x0 * x1, x0' = 1, x1' = x0  =>  p' = x1 + x0^2
        let p = Poly::var(0).mul(&Poly::var(1));
        let d = p.time_derivative(&|v| if v == 0 { Poly::one() } else { Poly::var(0) });
        assert_eq!(d, Poly::var(1).add(&Poly::var(0).mul(&Poly::var(0))));
    }

    #[test]
    fn coef_strings() {
        let c = BigRational::new(BigInt::from(-3), BigInt::from(4));
        assert_eq!(format_coef(&c), "-3/4");
        assert_eq!(parse_coef("-3/4").unwrap(), c);
        assert_eq!(parse_coef("7").unwrap(), r(7));
        assert!(parse_coef("1/0").is_none());
    }
}
