//! Interval arithmetic over `BigReal` endpoints with outward rounding.
//!
//! Every operation returns an interval containing the exact mathematical
//! result for any points of the inputs. Elementary function enclosures
//! (sin, cos, exp, tanh, arctan, sinh, cosh, ln, sqrt) use argument
//! reduction plus Taylor tails with explicit remainder bounds; widths stay
//! within a few ulps of the working precision.

use crate::error::{Error, Result};
use crate::real::{BigReal, Prec, Rounding};
use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::One as _;
use num_rational::BigRational;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigReal,
    pub hi: BigReal,
}

/// Tags for the elementary function dispatcher.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElemTag {
    Sin,
    Cos,
    Exp,
    Tanh,
    Arctan,
}

/// Largest |x| accepted by `exp` before the result exponent would leave the
/// representable range. Negative arguments below the threshold clamp to a
/// sound [0, 2^-2^50] enclosure instead.
const EXP_ARG_LIMIT_LOG2: i64 = 50;

impl Interval {
    pub fn new(lo: BigReal, hi: BigReal) -> Self {
        debug_assert!(lo.cmp_exact(&hi) != Ordering::Greater, "inverted interval");
        Interval { lo, hi }
    }

    pub fn point(x: BigReal) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(BigReal::zero())
    }

    pub fn one() -> Self {
        Interval::point(BigReal::one())
    }

    pub fn from_i64(v: i64) -> Self {
        Interval::point(BigReal::from_i64(v))
    }

    /// Outward-rounded enclosure of a rational.
    pub fn from_rational(r: &BigRational, prec: Prec) -> Self {
        Interval {
            lo: BigReal::from_rational(r, prec, Rounding::Down),
            hi: BigReal::from_rational(r, prec, Rounding::Up),
        }
    }

    pub fn from_ratio_i64(num: i64, den: i64, prec: Prec) -> Self {
        Interval::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)), prec)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigReal {
        self.hi.sub_exact(&self.lo)
    }

    pub fn midpoint(&self, prec: Prec) -> BigReal {
        self.lo.add_round(&self.hi, prec + 1, Rounding::Nearest).shl(-1).round_to(prec, Rounding::Nearest)
    }

    pub fn contains(&self, x: &BigReal) -> bool {
        self.lo.cmp_exact(x) != Ordering::Greater && self.hi.cmp_exact(x) != Ordering::Less
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    pub fn straddles_zero(&self) -> bool {
        self.lo.signum() < 0 && self.hi.signum() > 0
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn is_strictly_negative(&self) -> bool {
        self.hi.signum() < 0
    }

    /// Smallest magnitude over the interval.
    pub fn mig(&self) -> BigReal {
        if self.contains_zero() {
            BigReal::zero()
        } else if self.lo.signum() > 0 {
            self.lo.clone()
        } else {
            self.hi.abs()
        }
    }

    /// Largest magnitude over the interval.
    pub fn mag(&self) -> BigReal {
        self.lo.abs().max(&self.hi.abs())
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(&other.lo),
            hi: self.hi.max(&other.hi),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(&other.lo);
        let hi = self.hi.min(&other.hi);
        if lo.cmp_exact(&hi) == Ordering::Greater {
            None
        } else {
            Some(Interval { lo, hi })
        }
    }

    /// Widen both endpoints outward by `delta` (nonnegative).
    pub fn inflate(&self, delta: &BigReal) -> Interval {
        debug_assert!(!delta.is_negative());
        Interval {
            lo: self.lo.sub_exact(delta),
            hi: self.hi.add_exact(delta),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn abs(&self) -> Interval {
        Interval { lo: self.mig(), hi: self.mag() }
    }

    pub fn add(&self, other: &Interval, prec: Prec) -> Interval {
        Interval {
            lo: self.lo.add_round(&other.lo, prec, Rounding::Down),
            hi: self.hi.add_round(&other.hi, prec, Rounding::Up),
        }
    }

    pub fn add_exact(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.add_exact(&other.lo),
            hi: self.hi.add_exact(&other.hi),
        }
    }

    pub fn sub(&self, other: &Interval, prec: Prec) -> Interval {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Interval, prec: Prec) -> Interval {
        let (a, b) = (self, other);
        let dn = Rounding::Down;
        let up = Rounding::Up;
        // Sign case analysis keeps this to two directed products in the
        // common cases and four in the mixed/mixed case.
        let lo_pos = |x: &Interval| x.lo.signum() >= 0;
        let hi_neg = |x: &Interval| x.hi.signum() <= 0;
        if lo_pos(a) {
            if lo_pos(b) {
                Interval::new(a.lo.mul_round(&b.lo, prec, dn), a.hi.mul_round(&b.hi, prec, up))
            } else if hi_neg(b) {
                Interval::new(a.hi.mul_round(&b.lo, prec, dn), a.lo.mul_round(&b.hi, prec, up))
            } else {
                Interval::new(a.hi.mul_round(&b.lo, prec, dn), a.hi.mul_round(&b.hi, prec, up))
            }
        } else if hi_neg(a) {
            if lo_pos(b) {
                Interval::new(a.lo.mul_round(&b.hi, prec, dn), a.hi.mul_round(&b.lo, prec, up))
            } else if hi_neg(b) {
                Interval::new(a.hi.mul_round(&b.hi, prec, dn), a.lo.mul_round(&b.lo, prec, up))
            } else {
                Interval::new(a.lo.mul_round(&b.hi, prec, dn), a.lo.mul_round(&b.lo, prec, up))
            }
        } else {
            if lo_pos(b) {
                Interval::new(a.lo.mul_round(&b.hi, prec, dn), a.hi.mul_round(&b.hi, prec, up))
            } else if hi_neg(b) {
                Interval::new(a.hi.mul_round(&b.lo, prec, dn), a.lo.mul_round(&b.lo, prec, up))
            } else {
                let c1 = a.lo.mul_round(&b.hi, prec, dn).min(&a.hi.mul_round(&b.lo, prec, dn));
                let c2 = a.lo.mul_round(&b.lo, prec, up).max(&a.hi.mul_round(&b.hi, prec, up));
                Interval::new(c1, c2)
            }
        }
    }

    pub fn mul_scalar(&self, k: &BigReal, prec: Prec) -> Interval {
        self.mul(&Interval::point(k.clone()), prec)
    }

    /// Exact scaling by 2^k.
    pub fn shl(&self, k: i64) -> Interval {
        Interval { lo: self.lo.shl(k), hi: self.hi.shl(k) }
    }

    pub fn recip(&self, prec: Prec) -> Result<Interval> {
        if self.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let one = BigReal::one();
        Ok(Interval {
            lo: one.div_round(&self.hi, prec, Rounding::Down),
            hi: one.div_round(&self.lo, prec, Rounding::Up),
        })
    }

    pub fn div(&self, other: &Interval, prec: Prec) -> Result<Interval> {
        Ok(self.mul(&other.recip(prec + 4)?, prec))
    }

    /// x^n for n >= 0 with tight handling of even powers across zero.
    pub fn pow_int(&self, n: u32, prec: Prec) -> Interval {
        match n {
            0 => Interval::one(),
            1 => self.clone(),
            _ => {
                if n % 2 == 0 {
                    let m = self.mig();
                    let g = self.mag();
                    Interval::new(
                        pow_real(&m, n, prec, Rounding::Down),
                        pow_real(&g, n, prec, Rounding::Up),
                    )
                } else {
                    Interval::new(
                        pow_real(&self.lo, n, prec, Rounding::Down),
                        pow_real(&self.hi, n, prec, Rounding::Up),
                    )
                }
            }
        }
    }

    pub fn sqrt(&self, prec: Prec) -> Result<Interval> {
        if self.lo.is_negative() {
            return Err(Error::RangeExhausted("sqrt of interval reaching below zero".into()));
        }
        Ok(Interval {
            lo: self.lo.sqrt_round(prec, Rounding::Down),
            hi: self.hi.sqrt_round(prec, Rounding::Up),
        })
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint(64).to_f64()
    }
}

fn pow_real(x: &BigReal, n: u32, prec: Prec, dir: Rounding) -> BigReal {
    if n == 0 {
        return BigReal::one();
    }
    // Compute |x|^n with a single consistent direction, then restore sign.
    let neg = x.is_negative() && n % 2 == 1;
    let d = if neg { dir.flip() } else { dir };
    let ax = x.abs();
    let mut acc = ax.clone();
    for _ in 1..n {
        acc = acc.mul_round(&ax, prec + 8, d);
    }
    let acc = acc.round_to(prec, d);
    if neg {
        acc.neg()
    } else {
        acc
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{} , {}] (w~{:.3e})",
            self.lo.to_decimal_sci(8),
            self.hi.to_decimal_sci(8),
            self.width().to_f64()
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_decimal_sci(12), self.hi.to_decimal_sci(12))
    }
}

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

type ConstCache = Mutex<HashMap<(u8, Prec), Interval>>;

fn cache() -> &'static ConstCache {
    static CACHE: OnceLock<ConstCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(id: u8, prec: Prec, compute: impl FnOnce(Prec) -> Interval) -> Interval {
    let bucket = prec.div_ceil(64) * 64;
    {
        let map = cache().lock().unwrap();
        if let Some(v) = map.get(&(id, bucket)) {
            return v.clone();
        }
    }
    let v = compute(bucket + 32);
    let v = Interval::new(v.lo.round_to(bucket + 16, Rounding::Down), v.hi.round_to(bucket + 16, Rounding::Up));
    cache().lock().unwrap().insert((id, bucket), v.clone());
    v
}

/// Enclosure of ln 2.
pub fn ln2(prec: Prec) -> Interval {
    cached(0, prec, |p| {
        // ln 2 = sum_{k>=1} 1/(k 2^k); tail after N terms <= 2^{1-N}
        let n = p as i64 + 8;
        let mut lo = BigReal::zero();
        let mut hi = BigReal::zero();
        for k in 1..=n {
            let den = BigReal::with_exp(BigInt::from(k), k);
            let one = BigReal::one();
            lo = lo.add_round(&one.div_round(&den, p + 16, Rounding::Down), p + 16, Rounding::Down);
            hi = hi.add_round(&one.div_round(&den, p + 16, Rounding::Up), p + 16, Rounding::Up);
        }
        hi = hi.add_round(&BigReal::pow2(1 - n), p + 16, Rounding::Up);
        Interval::new(lo, hi)
    })
}

/// Enclosure of pi via Machin's formula.
pub fn pi(prec: Prec) -> Interval {
    cached(1, prec, |p| {
        let a5 = atan_inv_int(5, p + 8);
        let a239 = atan_inv_int(239, p + 8);
        let sixteen = Interval::from_i64(16);
        let four = Interval::from_i64(4);
        sixteen.mul(&a5, p).sub(&four.mul(&a239, p), p)
    })
}

/// Enclosure of ln 4 = 2 ln 2.
pub fn ln4(prec: Prec) -> Interval {
    ln2(prec).shl(1)
}

/// atan(1/m) for integer m >= 2 by the alternating Gregory series.
fn atan_inv_int(m: i64, prec: Prec) -> Interval {
    let p = prec + 32;
    let m2 = Interval::from_i64(m * m);
    let mut term = Interval::one().div(&Interval::from_i64(m), p).unwrap();
    let mut acc = Interval::zero();
    let mut k: i64 = 0;
    loop {
        let t = term.div(&Interval::from_i64(2 * k + 1), p).unwrap();
        if k % 2 == 0 {
            acc = acc.add(&t, p);
        } else {
            acc = acc.sub(&t, p);
        }
        // alternating series: remainder bounded by the next term
        term = term.div(&m2, p).unwrap();
        let next_bound = term
            .mag()
            .div_round(&BigReal::from_i64(2 * k + 3), p, Rounding::Up);
        if next_bound.msb_pos().map_or(true, |b| b < -(prec as i64) - 8) {
            return acc.inflate(&next_bound);
        }
        k += 1;
    }
}

// ---------------------------------------------------------------------------
// Elementary enclosures
// ---------------------------------------------------------------------------

/// exp on a point, returning an enclosure.
fn exp_point(x: &BigReal, prec: Prec) -> Result<Interval> {
    if x.is_zero() {
        return Ok(Interval::one());
    }
    if let Some(msb) = x.msb_pos() {
        if msb > EXP_ARG_LIMIT_LOG2 {
            if x.is_negative() {
                return Ok(Interval::new(BigReal::zero(), BigReal::pow2(-(1i64 << (EXP_ARG_LIMIT_LOG2 - 1)))));
            }
            return Err(Error::RangeExhausted(format!(
                "exp argument magnitude ~2^{msb} exceeds exponent range"
            )));
        }
    }
    // Argument reduction x = k ln2 + r, |r| <= 0.5
    let arg_bits = x.msb_pos().unwrap_or(0).max(0) as u32;
    let p = prec + arg_bits + 24;
    let l2 = ln2(p);
    let k = x
        .div_round(&l2.midpoint(p), 64, Rounding::Nearest)
        .add_exact(&BigReal::with_exp(BigInt::from(1), -1))
        .floor_int();
    let k_real = BigReal::from_bigint(k.clone());
    let r = Interval::point(x.clone()).sub(&l2.mul_scalar(&k_real, p), p);
    // e^r by Taylor; |r| <= 0.6 say
    let mut sum = Interval::one();
    let mut pow = Interval::one();
    let mut fact = BigReal::one();
    let mut n: u32 = 1;
    loop {
        pow = pow.mul(&r, p);
        fact = fact.mul_exact(&BigReal::from_i64(n as i64));
        let term = pow.div(&Interval::point(fact.clone()), p)?;
        sum = sum.add(&term, p);
        // remainder bound: |r|^{n+1}/(n+1)! * 1/(1-|r|/(n+2)) <= 2*mag(term)*mag(r)/(n+1)
        let rem = term.mag().mul_round(&r.mag(), p, Rounding::Up)
            .div_round(&BigReal::from_i64(n as i64 + 1), p, Rounding::Up)
            .shl(1);
        if rem.msb_pos().map_or(true, |b| b < -(prec as i64) - 8) {
            sum = sum.inflate(&rem);
            break;
        }
        n += 1;
        if n > 10_000 {
            return Err(Error::RangeExhausted("exp series did not converge".into()));
        }
    }
    let k_i64 = k.to_string().parse::<i64>().map_err(|_| {
        Error::RangeExhausted("exp reduction count out of range".into())
    })?;
    let out = sum.shl(k_i64);
    Ok(Interval::new(out.lo.round_to(prec + 8, Rounding::Down), out.hi.round_to(prec + 8, Rounding::Up)))
}

/// Monotone extension of a point enclosure to interval arguments.
fn monotone(x: &Interval, prec: Prec, f: impl Fn(&BigReal, Prec) -> Result<Interval>) -> Result<Interval> {
    if x.is_point() {
        return f(&x.lo, prec);
    }
    let lo = f(&x.lo, prec)?;
    let hi = f(&x.hi, prec)?;
    Ok(Interval::new(lo.lo, hi.hi))
}

pub fn exp(x: &Interval, prec: Prec) -> Result<Interval> {
    monotone(x, prec, exp_point)
}

/// Reduce a point argument mod 2*pi into [-pi, pi] (as an enclosure).
fn reduce_mod_2pi(x: &BigReal, prec: Prec) -> Interval {
    let arg_bits = x.msb_pos().unwrap_or(0).max(0) as u32;
    let p = prec + arg_bits + 24;
    let two_pi = pi(p).shl(1);
    let k = x
        .div_round(&two_pi.midpoint(p), 64.max(arg_bits + 8), Rounding::Nearest)
        .add_exact(&BigReal::with_exp(BigInt::from(1), -1))
        .floor_int();
    let k_real = BigReal::from_bigint(k);
    Interval::point(x.clone()).sub(&two_pi.mul_scalar(&k_real, p), p)
}

/// sin on roughly [-3pi/2, 3pi/2] via folding beyond |r| = 2 and the
/// alternating Taylor series, whose terms already decrease for |r| <= 2.
fn sin_reduced(r: &Interval, prec: Prec) -> Result<Interval> {
    let p = prec + 16;
    let two = BigReal::from_i64(2);
    if r.hi.cmp_exact(&two) == Ordering::Greater {
        if r.lo.cmp_exact(&two) == Ordering::Less {
            // split at the exact dyadic point 2 and hull
            let a = sin_reduced(&Interval::new(r.lo.clone(), two.clone()), prec)?;
            let b = sin_reduced(&Interval::new(two, r.hi.clone()), prec)?;
            return Ok(clamp_unit(a.hull(&b)));
        }
        // whole interval >= 2: sin(r) = sin(pi - r), image within [-2, 2]
        return sin_reduced(&pi(p).sub(r, p), prec);
    }
    let m_two = two.neg();
    if r.lo.cmp_exact(&m_two) == Ordering::Less {
        if r.hi.cmp_exact(&m_two) == Ordering::Greater {
            let a = sin_reduced(&Interval::new(r.lo.clone(), m_two.clone()), prec)?;
            let b = sin_reduced(&Interval::new(m_two, r.hi.clone()), prec)?;
            return Ok(clamp_unit(a.hull(&b)));
        }
        return sin_reduced(&pi(p).neg().sub(r, p), prec);
    }
    // |r| <= 2: alternating series
    let r2 = r.pow_int(2, p);
    let mut term = r.clone();
    let mut sum = r.clone();
    let mut n: u32 = 1;
    loop {
        // term_{n} = term_{n-1} * (-r^2) / ((2n)(2n+1))
        term = term.mul(&r2, p).neg();
        let den = BigReal::from_i64((2 * n as i64) * (2 * n as i64 + 1));
        term = term.div(&Interval::point(den), p)?;
        sum = sum.add(&term, p);
        let bound = term.mag();
        // once 2n(2n+1) > r^2 the series alternates with decreasing terms
        if (2 * n as i64) * (2 * n as i64 + 1) > 4
            && bound.msb_pos().map_or(true, |b| b < -(prec as i64) - 8)
        {
            sum = sum.inflate(&bound);
            break;
        }
        n += 1;
        if n > 10_000 {
            return Err(Error::RangeExhausted("sin series did not converge".into()));
        }
    }
    Ok(clamp_unit(sum))
}

fn clamp_unit(x: Interval) -> Interval {
    let one = BigReal::one();
    let m_one = one.neg();
    Interval::new(x.lo.max(&m_one), x.hi.min(&one))
}

fn sin_point(x: &BigReal, prec: Prec) -> Result<Interval> {
    let r = reduce_mod_2pi(x, prec);
    sin_reduced(&r, prec)
}

fn cos_point(x: &BigReal, prec: Prec) -> Result<Interval> {
    // cos x = sin(x + pi/2), evaluated through the reduction of x directly:
    let r = reduce_mod_2pi(x, prec);
    let p = prec + 16;
    let shifted = r.add(&pi(p).shl(-1), p);
    sin_reduced(&shifted, prec)
}

/// sin over an interval argument: endpoint hull plus extremum detection.
pub fn sin(x: &Interval, prec: Prec) -> Result<Interval> {
    trig_interval(x, prec, true)
}

/// cos over an interval argument.
pub fn cos(x: &Interval, prec: Prec) -> Result<Interval> {
    trig_interval(x, prec, false)
}

/// Extrema of sin lie at pi/2 + k pi (max for even k); extrema of cos lie at
/// k pi (max for even k). Endpoint hull plus any interior extremum.
fn trig_interval(x: &Interval, prec: Prec, is_sin: bool) -> Result<Interval> {
    let point_fn = if is_sin { sin_point } else { cos_point };
    if x.is_point() {
        return point_fn(&x.lo, prec);
    }
    let p = prec + 16;
    let w = x.width();
    let two_pi_lo = pi(p).shl(1).lo;
    if w.cmp_exact(&two_pi_lo) != Ordering::Less {
        return Ok(Interval::new(BigReal::one().neg(), BigReal::one()));
    }
    let a = point_fn(&x.lo, prec)?;
    let b = point_fn(&x.hi, prec)?;
    let mut out = a.hull(&b);
    let pi_iv = pi(p);
    let shifted = if is_sin { x.sub(&pi_iv.shl(-1), p) } else { x.clone() };
    // conservative k-range: any integer k with k*pi possibly inside `shifted`
    let klo = if shifted.lo.is_negative() {
        shifted.lo.div_round(&pi_iv.lo, p, Rounding::Down)
    } else {
        shifted.lo.div_round(&pi_iv.hi, p, Rounding::Down)
    };
    let khi = if shifted.hi.is_negative() {
        shifted.hi.div_round(&pi_iv.hi, p, Rounding::Up)
    } else {
        shifted.hi.div_round(&pi_iv.lo, p, Rounding::Up)
    };
    let mut k = klo.ceil_int();
    let k_end = khi.floor_int();
    let two = BigInt::from(2);
    let mut guard = 0;
    while k.cmp(&k_end) != Ordering::Greater {
        if k.mod_floor(&two) == BigInt::from(0) {
            out.hi = BigReal::one();
        } else {
            out.lo = BigReal::one().neg();
        }
        k = k + BigInt::one();
        guard += 1;
        if guard > 16 {
            return Ok(Interval::new(BigReal::one().neg(), BigReal::one()));
        }
    }
    Ok(clamp_unit(out))
}

fn tanh_point(x: &BigReal, prec: Prec) -> Result<Interval> {
    if x.is_zero() {
        return Ok(Interval::zero());
    }
    if x.is_negative() {
        return Ok(tanh_point(&x.neg(), prec)?.neg());
    }
    // saturation: tanh x >= 1 - 2 e^{-2x}; for x >= p+4, 2e^{-2x} < 2^{-p-2}
    if x.msb_pos().unwrap_or(0) >= 1 && x.cmp_exact(&BigReal::from_i64(prec as i64 + 4)) != Ordering::Less {
        return Ok(Interval::new(
            BigReal::one().sub_exact(&BigReal::pow2(-(prec as i64) - 2)),
            BigReal::one(),
        ));
    }
    let p = prec + 16;
    let e2x = exp_point(&x.shl(1), p)?;
    // tanh = 1 - 2/(e^{2x}+1)
    let denom = e2x.add(&Interval::one(), p);
    let frac = Interval::from_i64(2).div(&denom, p)?;
    Ok(clamp_unit(Interval::one().sub(&frac, p)))
}

pub fn tanh(x: &Interval, prec: Prec) -> Result<Interval> {
    monotone(x, prec, tanh_point)
}

fn atan_point(x: &BigReal, prec: Prec) -> Result<Interval> {
    if x.is_zero() {
        return Ok(Interval::zero());
    }
    if x.is_negative() {
        return Ok(atan_point(&x.neg(), prec)?.neg());
    }
    let p = prec + 24;
    if x.cmp_exact(&BigReal::one()) == Ordering::Greater {
        // atan x = pi/2 - atan(1/x)
        let inv = BigReal::one().div_round(&x.clone(), p, Rounding::Up);
        let inner = atan_point_leq1(&Interval::new(
            BigReal::one().div_round(&x.clone(), p, Rounding::Down),
            inv,
        ), prec)?;
        return Ok(pi(p).shl(-1).sub(&inner, p));
    }
    atan_point_leq1(&Interval::point(x.clone()), prec)
}

/// atan on an interval inside [0, 1]: halve twice-ish then Taylor.
fn atan_point_leq1(x: &Interval, prec: Prec) -> Result<Interval> {
    let p = prec + 24;
    let mut v = x.clone();
    let mut doublings = 0u32;
    let eighth = BigReal::with_exp(BigInt::from(1), -3);
    while v.mag().cmp_exact(&eighth) == Ordering::Greater {
        // v <- v / (1 + sqrt(1+v^2))
        let s = v.pow_int(2, p).add(&Interval::one(), p).sqrt(p)?;
        v = v.div(&s.add(&Interval::one(), p), p)?;
        doublings += 1;
        if doublings > 8 {
            break;
        }
    }
    // Taylor: sum (-1)^k v^{2k+1}/(2k+1), alternating
    let v2 = v.pow_int(2, p);
    let mut term = v.clone();
    let mut sum = Interval::zero();
    let mut k: u32 = 0;
    loop {
        let t = term.div(&Interval::point(BigReal::from_i64(2 * k as i64 + 1)), p)?;
        if k % 2 == 0 {
            sum = sum.add(&t, p);
        } else {
            sum = sum.sub(&t, p);
        }
        let next_bound = term.mag().mul_round(&v2.mag(), p, Rounding::Up);
        if next_bound.msb_pos().map_or(true, |b| b < -(prec as i64) - 8) {
            sum = sum.inflate(&next_bound);
            break;
        }
        term = term.mul(&v2, p);
        k += 1;
        if k > 10_000 {
            return Err(Error::RangeExhausted("atan series did not converge".into()));
        }
    }
    Ok(sum.shl(doublings as i64))
}

pub fn atan(x: &Interval, prec: Prec) -> Result<Interval> {
    monotone(x, prec, atan_point)
}

pub fn sinh(x: &Interval, prec: Prec) -> Result<Interval> {
    let p = prec + 8;
    let a = exp(x, p)?;
    let b = exp(&x.neg(), p)?;
    Ok(a.sub(&b, p).shl(-1))
}

pub fn cosh(x: &Interval, prec: Prec) -> Result<Interval> {
    let p = prec + 8;
    let a = exp(x, p)?;
    let b = exp(&x.neg(), p)?;
    Ok(a.add(&b, p).shl(-1))
}

fn ln_point(x: &BigReal, prec: Prec) -> Result<Interval> {
    if x.signum() <= 0 {
        return Err(Error::RangeExhausted("ln of non-positive value".into()));
    }
    let p = prec + 24;
    // x = y * 2^s with y in [1, 2)
    let s = x.msb_pos().unwrap() - 1;
    let y = x.shl(-s);
    // ln y = 2 atanh(u), u = (y-1)/(y+1) in [0, 1/3]
    let y_iv = Interval::point(y);
    let u = y_iv
        .sub(&Interval::one(), p)
        .div(&y_iv.add(&Interval::one(), p), p)?;
    let u2 = u.pow_int(2, p);
    let mut term = u.clone();
    let mut sum = Interval::zero();
    let mut k: u32 = 0;
    loop {
        let t = term.div(&Interval::point(BigReal::from_i64(2 * k as i64 + 1)), p)?;
        sum = sum.add(&t, p);
        // tail <= |term*u^2| / (1 - u^2) <= 2*|term|*|u|^2 for |u| <= 1/3
        let tail = term.mag().mul_round(&u2.mag(), p, Rounding::Up).shl(1);
        if tail.msb_pos().map_or(true, |b| b < -(prec as i64) - 8) {
            sum = sum.add(&Interval::new(BigReal::zero(), tail), p);
            break;
        }
        term = term.mul(&u2, p);
        k += 1;
        if k > 10_000 {
            return Err(Error::RangeExhausted("ln series did not converge".into()));
        }
    }
    let ln_y = sum.shl(1);
    Ok(ln_y.add(&ln2(p).mul_scalar(&BigReal::from_i64(s), p), p))
}

pub fn ln(x: &Interval, prec: Prec) -> Result<Interval> {
    monotone(x, prec, ln_point)
}

/// Elementary enclosure dispatcher.
///
/// Postcondition: the returned interval encloses the exact value with width
/// at most 2^(4-p) * max(1, |f(x)|) for point arguments.
pub fn eval_elementary(tag: ElemTag, x: &Interval, p: Prec) -> Result<Interval> {
    assert!(p >= 16, "precision must be at least 16 bits");
    match tag {
        ElemTag::Sin => sin(x, p),
        ElemTag::Cos => cos(x, p),
        ElemTag::Exp => exp(x, p),
        ElemTag::Tanh => tanh(x, p),
        ElemTag::Arctan => atan(x, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contains_f64(iv: &Interval, v: f64) {
        let lo = iv.lo.to_f64();
        let hi = iv.hi.to_f64();
        assert!(lo <= v && v <= hi, "{v} not in [{lo}, {hi}]");
    }

    #[test]
    fn constants() {
        let p = pi(128);
        contains_f64(&p, std::f64::consts::PI);
        assert!(p.width().to_f64() < 1e-35);
        let l = ln2(128);
        contains_f64(&l, std::f64::consts::LN_2);
        assert!(l.width().to_f64() < 1e-35);
    }

    #[test]
    fn exp_known() {
        let e = exp(&Interval::one(), 64).unwrap();
        contains_f64(&e, std::f64::consts::E);
        assert!(e.width().to_f64() < 1e-17);
        // sin 0 = 0 exactly
        let s = sin(&Interval::zero(), 64).unwrap();
        assert!(s.contains(&BigReal::zero()));
        assert!(s.width().to_f64() < 1e-18);
    }

    #[test]
    fn exp_huge_negative_clamps() {
        let x = Interval::point(BigReal::pow2(60).neg());
        let e = exp(&x, 64).unwrap();
        assert!(e.lo.is_zero() || e.lo.is_positive());
        assert!(e.hi.to_f64() < 1e-300);
    }

    #[test]
    fn exp_huge_positive_errors() {
        let x = Interval::point(BigReal::pow2(60));
        assert!(exp(&x, 64).is_err());
    }

    #[test]
    fn sin_cos_known() {
        let one = Interval::one();
        contains_f64(&sin(&one, 96).unwrap(), 0.8414709848078965);
        contains_f64(&cos(&one, 96).unwrap(), 0.5403023058681398);
        // large argument reduction
        let big = Interval::point(BigReal::from_i64(1_000_000));
        let s = sin(&big, 96).unwrap();
        contains_f64(&s, (1_000_000f64).sin());
        assert!(s.width().to_f64() < 1e-20);
    }

    #[test]
    fn sin_interval_extrema() {
        // interval [1, 2.5] contains pi/2 where sin attains 1
        let iv = Interval::new(BigReal::one(), BigReal::from_rational(&BigRational::new(5.into(), 2.into()), 64, Rounding::Up));
        let s = sin(&iv, 64).unwrap();
        assert_eq!(s.hi, BigReal::one());
        assert!(s.lo.to_f64() <= (2.5f64).sin());
    }

    #[test]
    fn tanh_atan_known() {
        contains_f64(&tanh(&Interval::one(), 96).unwrap(), 0.7615941559557649);
        contains_f64(&atan(&Interval::one(), 96).unwrap(), std::f64::consts::FRAC_PI_4);
        contains_f64(&atan(&Interval::from_i64(1000), 96).unwrap(), (1000f64).atan());
        // saturation branch
        let t = tanh(&Interval::from_i64(10_000), 96).unwrap();
        assert!(t.hi.cmp_exact(&BigReal::one()) != std::cmp::Ordering::Greater);
        let near_one = BigReal::one().sub_exact(&BigReal::pow2(-80));
        assert!(t.lo.cmp_exact(&near_one) == std::cmp::Ordering::Greater);
    }

    #[test]
    fn ln_known() {
        contains_f64(&ln(&Interval::from_i64(2), 96).unwrap(), std::f64::consts::LN_2);
        let x = Interval::from_ratio_i64(16755, 1000, 96);
        contains_f64(&ln(&x, 96).unwrap(), (16.755f64).ln());
        assert!(ln(&Interval::zero(), 64).is_err());
    }

    #[test]
    fn interval_mul_div_soundness() {
        let a = Interval::from_ratio_i64(-3, 2, 64);
        let b = Interval::new(BigReal::from_i64(-2), BigReal::from_i64(5));
        let prod = a.mul(&b, 64);
        // -3/2 * -2 = 3, -3/2 * 5 = -7.5
        contains_f64(&prod, 3.0);
        contains_f64(&prod, -7.5);
        assert!(a.div(&b, 64).is_err()); // b contains 0
        let c = Interval::from_i64(4);
        contains_f64(&a.div(&c, 64).unwrap(), -0.375);
    }

    #[test]
    fn pow_int_even_across_zero() {
        let x = Interval::new(BigReal::from_i64(-2), BigReal::from_i64(3));
        let sq = x.pow_int(2, 64);
        assert!(sq.lo.is_zero());
        contains_f64(&sq, 9.0);
        let cube = x.pow_int(3, 64);
        contains_f64(&cube, -8.0);
        contains_f64(&cube, 27.0);
    }

    #[test]
    fn elementary_width_contract() {
        // width <= 2^(4-p) * max(1, |f(x)|)
        for (tag, x) in [
            (ElemTag::Sin, 1i64),
            (ElemTag::Cos, 3),
            (ElemTag::Exp, 5),
            (ElemTag::Tanh, 2),
            (ElemTag::Arctan, 7),
        ] {
            let p: Prec = 80;
            let iv = eval_elementary(tag, &Interval::from_i64(x), p).unwrap();
            let cap = iv.mag().max(&BigReal::one()).mul_exact(&BigReal::pow2(4 - p as i64));
            assert!(
                iv.width().cmp_exact(&cap) != Ordering::Greater,
                "{tag:?} width {:?} over cap {:?}",
                iv.width(),
                cap
            );
        }
    }
}
