//! Arbitrary-precision binary floating point: values of the form `m * 2^e`
//! with a `BigInt` mantissa and an `i64` exponent.
//!
//! Addition, subtraction and multiplication are exact unless a precision is
//! supplied; division, square roots and all transcendental functions (in
//! `interval`) round to an explicit precision with an explicit direction.
//! There is no global rounding state.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Working precision in bits.
pub type Prec = u32;

/// Rounding direction. `Down` is toward -inf, `Up` toward +inf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
    Nearest,
}

impl Rounding {
    pub fn flip(self) -> Rounding {
        match self {
            Rounding::Down => Rounding::Up,
            Rounding::Up => Rounding::Down,
            Rounding::Nearest => Rounding::Nearest,
        }
    }
}

/// Exponent-alignment cap: aligning two operands further apart than this
/// many bits is treated as a programming error rather than attempted.
const MAX_ALIGN_BITS: i64 = 1 << 26;

#[derive(Clone, PartialEq, Eq)]
pub struct BigReal {
    mant: BigInt,
    exp: i64,
}

impl BigReal {
    pub fn zero() -> Self {
        BigReal { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        BigReal { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_i64(v: i64) -> Self {
        BigReal { mant: BigInt::from(v), exp: 0 }.normalized()
    }

    pub fn from_bigint(v: BigInt) -> Self {
        BigReal { mant: v, exp: 0 }.normalized()
    }

    /// m * 2^e.
    pub fn with_exp(mant: BigInt, exp: i64) -> Self {
        BigReal { mant, exp }.normalized()
    }

    /// 2^k.
    pub fn pow2(k: i64) -> Self {
        BigReal { mant: BigInt::one(), exp: k }
    }

    /// Exact conversion of a rational whose denominator is a power of two;
    /// otherwise rounds to `prec` bits in direction `dir`.
    pub fn from_rational(r: &BigRational, prec: Prec, dir: Rounding) -> Self {
        let num = BigReal::from_bigint(r.numer().clone());
        let den = BigReal::from_bigint(r.denom().clone());
        num.div_round(&den, prec, dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from(self.mant.clone() << self.exp as usize)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp = self
                .exp
                .checked_add(tz as i64)
                .expect("exponent overflow in normalize");
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.sign() == Sign::Minus
    }

    pub fn is_positive(&self) -> bool {
        self.mant.sign() == Sign::Plus
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Number of significant bits of the mantissa.
    pub fn mant_bits(&self) -> u64 {
        self.mant.magnitude().bits()
    }

    /// Position of the most significant bit: 2^(msb-1) <= |x| < 2^msb.
    /// Returns None for zero.
    pub fn msb_pos(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(
                self.exp
                    .checked_add(self.mant_bits() as i64)
                    .expect("exponent overflow in msb_pos"),
            )
        }
    }

    /// (floor, ceil) bounds on log2|x|. Exact when |x| is a power of two.
    pub fn log2_abs_bounds(&self) -> Option<(i64, i64)> {
        let msb = self.msb_pos()?;
        if self.mant.magnitude().count_ones() == 1 {
            Some((msb - 1, msb - 1))
        } else {
            Some((msb - 1, msb))
        }
    }

    pub fn neg(&self) -> Self {
        BigReal { mant: -self.mant.clone(), exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        BigReal { mant: self.mant.abs(), exp: self.exp }
    }

    /// Multiply by 2^k.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigReal {
            mant: self.mant.clone(),
            exp: self.exp.checked_add(k).expect("exponent overflow in shl"),
        }
    }

    /// Round to at most `prec` significant bits.
    pub fn round_to(&self, prec: Prec, dir: Rounding) -> Self {
        let bits = self.mant_bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let drop = (bits - prec as u64) as i64;
        let new_exp = self.exp.checked_add(drop).expect("exponent overflow in round");
        let shifted = match dir {
            // BigInt >> is a floor shift, which is exactly round-toward -inf.
            Rounding::Down => self.mant.clone() >> drop as usize,
            Rounding::Up => -((-self.mant.clone()) >> drop as usize),
            Rounding::Nearest => {
                let neg = self.is_negative();
                let mag = self.mant.magnitude();
                let kept: BigUint = mag >> drop as usize;
                let dropped: BigUint = mag - (kept.clone() << drop as usize);
                let half = BigUint::one() << (drop - 1) as usize;
                let kept = match dropped.cmp(&half) {
                    Ordering::Greater => kept + BigUint::one(),
                    Ordering::Less => kept,
                    Ordering::Equal => {
                        // ties to even
                        if kept.is_odd() {
                            kept + BigUint::one()
                        } else {
                            kept
                        }
                    }
                };
                let m = BigInt::from(kept);
                if neg {
                    -m
                } else {
                    m
                }
            }
        };
        BigReal { mant: shifted, exp: new_exp }.normalized()
    }

    fn align(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        let sa = self.exp - e;
        let sb = other.exp - e;
        assert!(
            sa <= MAX_ALIGN_BITS && sb <= MAX_ALIGN_BITS,
            "alignment of {} bits exceeds cap; use add_round",
            sa.max(sb)
        );
        (self.mant.clone() << sa as usize, other.mant.clone() << sb as usize, e)
    }

    /// Exact sum. Panics if the exponent gap exceeds the alignment cap.
    pub fn add_exact(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.align(other);
        BigReal { mant: a + b, exp: e }.normalized()
    }

    pub fn sub_exact(&self, other: &Self) -> Self {
        self.add_exact(&other.neg())
    }

    /// Sum rounded to `prec` bits; handles arbitrarily large exponent gaps.
    pub fn add_round(&self, other: &Self, prec: Prec, dir: Rounding) -> Self {
        if self.is_zero() {
            return other.round_to(prec, dir);
        }
        if other.is_zero() {
            return self.round_to(prec, dir);
        }
        let ma = self.msb_pos().unwrap();
        let mb = other.msb_pos().unwrap();
        let (hi, lo, mhi) = if ma >= mb { (self, other, ma) } else { (other, self, mb) };
        // If the small operand lies entirely below the rounding granule of the
        // large one, absorb it into a one-ulp directed nudge.
        let lo_msb = lo.msb_pos().unwrap();
        let gap = mhi as i128 - lo_msb as i128;
        if gap > prec as i128 + 4 {
            let work = prec + 2;
            let r = hi.round_to(work, dir);
            let ulp_exp = mhi - work as i64;
            return match dir {
                Rounding::Down => {
                    if lo.is_negative() {
                        r.add_exact(&BigReal::pow2(ulp_exp).neg()).round_to(prec, dir)
                    } else {
                        r.round_to(prec, dir)
                    }
                }
                Rounding::Up => {
                    if lo.is_positive() {
                        r.add_exact(&BigReal::pow2(ulp_exp)).round_to(prec, dir)
                    } else {
                        r.round_to(prec, dir)
                    }
                }
                Rounding::Nearest => r.round_to(prec, dir),
            };
        }
        hi.add_exact(lo).round_to(prec, dir)
    }

    pub fn sub_round(&self, other: &Self, prec: Prec, dir: Rounding) -> Self {
        self.add_round(&other.neg(), prec, dir)
    }

    /// Exact product.
    pub fn mul_exact(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return BigReal::zero();
        }
        BigReal {
            mant: &self.mant * &other.mant,
            exp: self.exp.checked_add(other.exp).expect("exponent overflow in mul"),
        }
        .normalized()
    }

    pub fn mul_round(&self, other: &Self, prec: Prec, dir: Rounding) -> Self {
        // Pre-truncate huge operands to keep the product cheap; truncation to
        // prec+32 bits perturbs the product by well under half an ulp at prec,
        // and the final directed rounding covers the slack... except that a
        // directed rounding must never cross the true value, so the operands
        // are truncated with the directions that keep the product bracketed.
        let work = prec + 32;
        if self.mant_bits() <= work as u64 && other.mant_bits() <= work as u64 {
            return self.mul_exact(other).round_to(prec, dir);
        }
        match dir {
            Rounding::Nearest => {
                let a = self.round_to(work, Rounding::Nearest);
                let b = other.round_to(work, Rounding::Nearest);
                a.mul_exact(&b).round_to(prec, dir)
            }
            _ => {
                // Directed: bound the product by combining directed operand
                // roundings according to the final signs.
                let (da, db) = directed_pair(self, other, dir);
                let a = self.round_to(work, da);
                let b = other.round_to(work, db);
                a.mul_exact(&b).round_to(prec, dir)
            }
        }
    }

    /// Quotient rounded to `prec` bits in direction `dir`.
    pub fn div_round(&self, other: &Self, prec: Prec, dir: Rounding) -> Self {
        assert!(!other.is_zero(), "division by zero BigReal");
        if self.is_zero() {
            return BigReal::zero();
        }
        // Scale the numerator so the integer quotient has prec+2 bits.
        let na = self.mant_bits() as i64;
        let nb = other.mant_bits() as i64;
        let shift = (nb - na + prec as i64 + 2).max(0);
        let num = self.mant.clone() << shift as usize;
        let (q, r) = num.div_rem(&other.mant);
        let exact = r.is_zero();
        let res_exp = self
            .exp
            .checked_sub(shift)
            .and_then(|e| e.checked_sub(other.exp))
            .expect("exponent overflow in div");
        let mut q = q;
        if !exact {
            // BigInt div_rem truncates toward zero; fix up for direction.
            let res_neg = (self.is_negative()) ^ (other.is_negative());
            match dir {
                Rounding::Down => {
                    if res_neg {
                        q -= BigInt::one();
                    }
                }
                Rounding::Up => {
                    if !res_neg {
                        q += BigInt::one();
                    }
                }
                Rounding::Nearest => {
                    // |true| is strictly between |q| and |q|+1; nudging by one
                    // half-ulp before the final rounding keeps the error <=1 ulp.
                }
            }
        }
        BigReal { mant: q, exp: res_exp }.normalized().round_to(prec, dir)
    }

    /// Floor square root behaviour rounded directionally at `prec` bits.
    /// Panics on negative input.
    pub fn sqrt_round(&self, prec: Prec, dir: Rounding) -> Self {
        assert!(!self.is_negative(), "sqrt of negative BigReal");
        if self.is_zero() {
            return BigReal::zero();
        }
        // Scale to an even exponent with >= 2*prec+4 mantissa bits.
        let want = (2 * prec + 4) as u64;
        let bits = self.mant_bits();
        let mut extra = if bits < want { (want - bits) as i64 } else { 0 };
        if (self.exp - extra) % 2 != 0 {
            extra += 1;
        }
        let m = self.mant.magnitude() << extra as usize;
        let s = m.sqrt();
        let exact = &s * &s == m;
        let half_exp = (self.exp - extra) / 2;
        let s = match (dir, exact) {
            (Rounding::Up, false) => s + BigUint::one(),
            _ => s,
        };
        BigReal { mant: BigInt::from(s), exp: half_exp }
            .normalized()
            .round_to(prec, dir)
    }

    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        let sa = self.signum();
        let sb = other.signum();
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let ma = self.msb_pos().unwrap();
        let mb = other.msb_pos().unwrap();
        if ma != mb {
            let mag = ma.cmp(&mb);
            return if sa > 0 { mag } else { mag.reverse() };
        }
        let (a, b, _) = self.align(other);
        a.cmp(&b)
    }

    pub fn min(&self, other: &Self) -> Self {
        if self.cmp_exact(other) == Ordering::Greater {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        if self.cmp_exact(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// Largest integer <= self.
    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            assert!(self.exp <= MAX_ALIGN_BITS, "floor of astronomically large value");
            self.mant.clone() << self.exp as usize
        } else {
            let k = -self.exp;
            assert!(k <= MAX_ALIGN_BITS, "floor alignment cap exceeded");
            self.mant.clone() >> k as usize
        }
    }

    pub fn ceil_int(&self) -> BigInt {
        -((&self.neg()).floor_int())
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round_to(64, Rounding::Nearest);
        let m = r.mant.to_f64().unwrap_or(if r.is_negative() { f64::MIN } else { f64::MAX });
        let e = r.exp;
        if e > 2000 {
            if r.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else if e < -2000 {
            0.0
        } else {
            m * 2f64.powi(e as i32)
        }
    }

    /// Hex-dyadic form `[-]0x<mant-hex>p<exp>`, exact and re-parseable.
    pub fn to_hex_string(&self) -> String {
        if self.is_zero() {
            return "0x0p0".to_string();
        }
        let sign = if self.is_negative() { "-" } else { "" };
        format!("{}0x{}p{}", sign, self.mant.magnitude().to_str_radix(16), self.exp)
    }

    pub fn from_hex_string(s: &str) -> Option<Self> {
        let s = s.trim();
        let (neg, rest) = if let Some(r) = s.strip_prefix('-') { (true, r) } else { (false, s) };
        let rest = rest.strip_prefix("0x")?;
        let pidx = rest.find('p')?;
        let mant = BigUint::parse_bytes(rest[..pidx].as_bytes(), 16)?;
        let exp: i64 = rest[pidx + 1..].parse().ok()?;
        let m = BigInt::from(mant);
        Some(BigReal { mant: if neg { -m } else { m }, exp }.normalized())
    }

    /// Scientific decimal with `digits` significant digits (approximate,
    /// round-to-nearest): "d.ddddde±k".
    pub fn to_decimal_sci(&self, digits: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let msb = self.msb_pos().unwrap();
        // log10 |x| is within 1 of msb*log10(2)
        let approx_e10 = ((msb as f64 - 0.5) * std::f64::consts::LOG10_2).floor() as i64;
        if approx_e10.abs() > 200_000 {
            return self.to_hex_string();
        }
        let d = digits.max(1) as i64;
        // scaled = round(|x| * 10^(d-1-e10)); adjust e10 until scaled has d digits
        let mut e10 = approx_e10;
        loop {
            let k = d - 1 - e10;
            let scaled = self.abs().scale_pow10(k);
            let s = scaled.to_string();
            if (s.len() as i64) == d {
                let sign = if self.is_negative() { "-" } else { "" };
                let mantissa = if d == 1 {
                    s.clone()
                } else {
                    format!("{}.{}", &s[..1], &s[1..])
                };
                return format!("{}{}e{}", sign, mantissa, e10);
            } else if (s.len() as i64) > d {
                e10 += 1;
            } else {
                e10 -= 1;
            }
        }
    }

    /// round(|x| * 10^k) as a nonnegative integer.
    fn scale_pow10(&self, k: i64) -> BigUint {
        let ten = BigInt::from(10u32);
        let x = self.abs();
        let (num, den) = if k >= 0 {
            (x.mul_exact(&BigReal::from_bigint(ten.pow(k as u32))), BigReal::one())
        } else {
            (x, BigReal::from_bigint(ten.pow((-k) as u32)))
        };
        // round to nearest integer of num/den
        let q = num.div_round(&den, (num.mant_bits() + den.mant_bits() + 64) as u32, Rounding::Nearest);
        let half = BigReal::with_exp(BigInt::one(), -1);
        q.add_exact(&half).floor_int().magnitude().clone()
    }
}

fn directed_pair(a: &BigReal, b: &BigReal, dir: Rounding) -> (Rounding, Rounding) {
    // Choose operand roundings so the rounded product is on the `dir` side.
    // For product p = a*b: moving a toward dir_a changes p in the direction
    // sign(b)*dir_a, so pick dir_a with sign(b), dir_b with sign(a).
    let da = if b.is_negative() { dir.flip() } else { dir };
    let db = if a.is_negative() { dir.flip() } else { dir };
    (da, db)
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({} ~ {:.6e})", self.to_hex_string(), self.to_f64())
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_sci(17))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn br(v: i64) -> BigReal {
        BigReal::from_i64(v)
    }

    #[test]
    fn exact_arithmetic() {
        let a = BigReal::with_exp(BigInt::from(3), -2); // 0.75
        let b = BigReal::with_exp(BigInt::from(1), -1); // 0.5
        assert_eq!(a.add_exact(&b), BigReal::with_exp(BigInt::from(5), -2));
        assert_eq!(a.sub_exact(&b), BigReal::with_exp(BigInt::from(1), -2));
        assert_eq!(a.mul_exact(&b), BigReal::with_exp(BigInt::from(3), -3));
        assert_eq!(br(12).mul_exact(&br(-3)), br(-36));
    }

    #[test]
    fn directed_rounding_brackets_truth() {
        let a = br(1);
        let b = br(3);
        let lo = a.div_round(&b, 64, Rounding::Down);
        let hi = a.div_round(&b, 64, Rounding::Up);
        assert!(lo.cmp_exact(&hi) == Ordering::Less);
        // 3*lo < 1 < 3*hi
        assert!(lo.mul_exact(&b).cmp_exact(&a) == Ordering::Less);
        assert!(hi.mul_exact(&b).cmp_exact(&a) == Ordering::Greater);
        let w = hi.sub_exact(&lo);
        assert!(w.cmp_exact(&BigReal::pow2(-64)) <= Ordering::Equal);
    }

    #[test]
    fn add_round_huge_gap() {
        let a = BigReal::pow2(1000);
        let tiny = BigReal::pow2(-5000);
        let down = a.add_round(&tiny.neg(), 64, Rounding::Down);
        let up = a.add_round(&tiny.neg(), 64, Rounding::Up);
        assert!(down.cmp_exact(&a) == Ordering::Less);
        assert!(up.cmp_exact(&a) <= Ordering::Equal);
        let down2 = a.add_round(&tiny, 64, Rounding::Down);
        assert!(down2.cmp_exact(&a) <= Ordering::Equal);
        let up2 = a.add_round(&tiny, 64, Rounding::Up);
        assert!(up2.cmp_exact(&a) == Ordering::Greater);
    }

    #[test]
    fn sqrt_brackets() {
        let two = br(2);
        let lo = two.sqrt_round(100, Rounding::Down);
        let hi = two.sqrt_round(100, Rounding::Up);
        assert!(lo.mul_exact(&lo).cmp_exact(&two) == Ordering::Less);
        assert!(hi.mul_exact(&hi).cmp_exact(&two) == Ordering::Greater);
        assert_eq!(br(4).sqrt_round(64, Rounding::Down), br(2));
        assert_eq!(br(4).sqrt_round(64, Rounding::Up), br(2));
    }

    #[test]
    fn floor_ceil() {
        let x = BigReal::with_exp(BigInt::from(-7), -1); // -3.5
        assert_eq!(x.floor_int(), BigInt::from(-4));
        assert_eq!(x.ceil_int(), BigInt::from(-3));
        assert_eq!(br(5).floor_int(), BigInt::from(5));
    }

    #[test]
    fn hex_roundtrip() {
        let x = BigReal::with_exp(BigInt::from(-12345), -77);
        let s = x.to_hex_string();
        assert_eq!(BigReal::from_hex_string(&s).unwrap(), x);
        assert_eq!(BigReal::from_hex_string("0x0p0").unwrap(), BigReal::zero());
    }

    #[test]
    fn decimal_sci() {
        let x = BigReal::with_exp(BigInt::from(1), -1);
        assert_eq!(x.to_decimal_sci(3), "5.00e-1");
        assert_eq!(br(0).to_decimal_sci(5), "0");
        let y = br(-1234);
        assert_eq!(y.to_decimal_sci(4), "-1.234e3");
    }

    #[test]
    fn nearest_ties_to_even() {
        // 0b1011 rounded to 3 bits: dropped bit is 1 (tie), kept=0b101 odd -> 0b110
        let x = BigReal::from_i64(0b1011);
        let r = x.round_to(3, Rounding::Nearest);
        assert_eq!(r, BigReal::from_i64(0b1100));
    }

    #[test]
    fn cmp_across_magnitudes() {
        assert_eq!(BigReal::pow2(100).cmp_exact(&BigReal::pow2(-100)), Ordering::Greater);
        assert_eq!(br(-5).cmp_exact(&br(3)), Ordering::Less);
        assert_eq!(br(0).cmp_exact(&BigReal::zero()), Ordering::Equal);
    }
}
