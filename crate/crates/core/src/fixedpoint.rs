//! Exact 256-bit fixed-point fractions modulo one.
//!
//! A [`Frac256`] holds `X / 2^256` for a 256-bit integer `X`; all arithmetic
//! wraps, which is exactly reduction modulo one. Polynomial phases are built
//! from these so that `f(n) mod 1` never loses bits to cancellation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Number of fractional bits carried by [`Frac256`].
pub const FRAC_BITS: u32 = 256;

const TWO_POW_NEG_64: f64 = 1.0 / 18_446_744_073_709_551_616.0;

/// A real number modulo one with 256 binary fractional digits.
///
/// Limbs are little-endian: `limbs[3]` holds the most significant 64 bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Frac256 {
    limbs: [u64; 4],
}

impl Frac256 {
    pub const ZERO: Frac256 = Frac256 { limbs: [0; 4] };
    pub const HALF: Frac256 = Frac256 {
        limbs: [0, 0, 0, 1 << 63],
    };
    /// One unit in the last place, `2^-256`.
    pub const ULP: Frac256 = Frac256 { limbs: [1, 0, 0, 0] };

    pub const fn from_limbs(limbs: [u64; 4]) -> Self {
        Frac256 { limbs }
    }

    pub const fn limbs(&self) -> [u64; 4] {
        self.limbs
    }

    pub fn is_zero(&self) -> bool {
        self.limbs == [0; 4]
    }

    /// Parses exactly 64 hex digits (most significant first).
    pub fn from_hex(hex: &str) -> Result<Self> {
        if hex.len() != 64 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::Parse(format!("expected 64 hex digits, got {hex:?}")));
        }
        let mut limbs = [0u64; 4];
        for (i, limb) in limbs.iter_mut().enumerate() {
            let start = (3 - i) * 16;
            *limb = u64::from_str_radix(&hex[start..start + 16], 16)
                .map_err(|e| Error::Parse(e.to_string()))?;
        }
        Ok(Frac256 { limbs })
    }

    pub fn to_hex(&self) -> String {
        format!(
            "{:016x}{:016x}{:016x}{:016x}",
            self.limbs[3], self.limbs[2], self.limbs[1], self.limbs[0]
        )
    }

    /// The 256-bit integer `X` with `self = X / 2^256`.
    pub fn to_biguint(&self) -> BigUint {
        let digits: Vec<u32> = self
            .limbs
            .iter()
            .flat_map(|&l| [l as u32, (l >> 32) as u32])
            .collect();
        BigUint::new(digits)
    }

    /// Reduces an arbitrary integer modulo `2^256` and reads it as a fraction.
    pub fn from_bigint_wrapping(x: &BigInt) -> Self {
        let modulus = BigInt::one() << FRAC_BITS;
        let reduced = x.mod_floor(&modulus);
        let (_, digits) = reduced.to_u64_digits();
        let mut limbs = [0u64; 4];
        for (limb, d) in limbs.iter_mut().zip(digits) {
            *limb = d;
        }
        Frac256 { limbs }
    }

    /// `floor(num * 2^256 / den) mod 2^256`, i.e. the truncated fractional
    /// part of `num/den`. `den` must be positive.
    pub fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        debug_assert!(den.is_positive());
        let rem = num.mod_floor(den);
        let scaled: BigInt = (rem << FRAC_BITS) / den;
        Frac256::from_bigint_wrapping(&scaled)
    }

    /// Wrapping multiplication by an unsigned integer.
    #[inline]
    pub fn mul_u64(self, m: u64) -> Self {
        let mut out = [0u64; 4];
        let mut carry: u128 = 0;
        for (o, &l) in out.iter_mut().zip(self.limbs.iter()) {
            let prod = (l as u128) * (m as u128) + carry;
            *o = prod as u64;
            carry = prod >> 64;
        }
        Frac256 { limbs: out }
    }

    /// Wrapping multiplication by a signed integer.
    pub fn mul_i64(self, m: i64) -> Self {
        let r = self.mul_u64(m.unsigned_abs());
        if m < 0 {
            -r
        } else {
            r
        }
    }

    /// True when the value lies in `[1/2, 1)`.
    #[inline]
    pub fn is_upper_half(&self) -> bool {
        self.limbs[3] >> 63 == 1
    }

    /// Value as a float in `[0, 1]`; absolute error at most `2^-53`.
    ///
    /// The result may round up to exactly `1.0` for values within `2^-54` of one.
    #[inline]
    pub fn to_f64(&self) -> f64 {
        (self.limbs[3] as f64) * TWO_POW_NEG_64 + (self.limbs[2] as f64) * TWO_POW_NEG_64 * TWO_POW_NEG_64
    }

    /// Representative in `[-1/2, 1/2)` as a float. Small magnitudes keep full
    /// relative precision because the lower limbs are folded in.
    #[inline]
    pub fn to_signed_f64(&self) -> f64 {
        if self.is_upper_half() {
            -(-*self).to_f64()
        } else {
            self.to_f64()
        }
    }
}

impl Add for Frac256 {
    type Output = Frac256;
    #[inline]
    fn add(self, rhs: Frac256) -> Frac256 {
        let mut out = [0u64; 4];
        let mut carry = false;
        for i in 0..4 {
            let (s1, c1) = self.limbs[i].overflowing_add(rhs.limbs[i]);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            out[i] = s2;
            carry = c1 | c2;
        }
        Frac256 { limbs: out }
    }
}

impl AddAssign for Frac256 {
    #[inline]
    fn add_assign(&mut self, rhs: Frac256) {
        *self = *self + rhs;
    }
}

impl Sub for Frac256 {
    type Output = Frac256;
    #[inline]
    fn sub(self, rhs: Frac256) -> Frac256 {
        let mut out = [0u64; 4];
        let mut borrow = false;
        for i in 0..4 {
            let (d1, b1) = self.limbs[i].overflowing_sub(rhs.limbs[i]);
            let (d2, b2) = d1.overflowing_sub(borrow as u64);
            out[i] = d2;
            borrow = b1 | b2;
        }
        Frac256 { limbs: out }
    }
}

impl SubAssign for Frac256 {
    #[inline]
    fn sub_assign(&mut self, rhs: Frac256) {
        *self = *self - rhs;
    }
}

impl Neg for Frac256 {
    type Output = Frac256;
    #[inline]
    fn neg(self) -> Frac256 {
        Frac256::ZERO - self
    }
}

impl Ord for Frac256 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.limbs.iter().rev().cmp(other.limbs.iter().rev())
    }
}

impl PartialOrd for Frac256 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Frac256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frac256(0x{})", self.to_hex())
    }
}

impl fmt::Display for Frac256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// `‖x‖`, the distance from `x` to the nearest integer, in `[0, 1/2]`.
#[inline]
pub fn nearest_int_distance(x: Frac256) -> f64 {
    x.to_signed_f64().abs()
}

/// Constants available by name in coefficient literals.
///
/// Fractional bits are the truncation of the true value; they are verified in
/// the tests against integer square roots and independent series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedConstant {
    /// `√2`
    Sqrt2,
    /// `(1 + √5) / 2`
    Golden,
    /// `π`
    Pi,
    /// `π - 3`
    PiFrac,
    /// `e`
    E,
    /// `e - 2`
    EFrac,
}

const SQRT2_HEX: &str = "6a09e667f3bcc908b2fb1366ea957d3e3adec17512775099da2f590b0667322a";
const GOLDEN_HEX: &str = "9e3779b97f4a7c15f39cc0605cedc8341082276bf3a27251f86c6a11d0c18e95";
const PI_HEX: &str = "243f6a8885a308d313198a2e03707344a4093822299f31d0082efa98ec4e6c89";
const E_HEX: &str = "b7e151628aed2a6abf7158809cf4f3c762e7160f38b4da56a784d9045190cfef";

impl NamedConstant {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sqrt2" => NamedConstant::Sqrt2,
            "golden" | "phi" => NamedConstant::Golden,
            "pi" => NamedConstant::Pi,
            "pi_frac" => NamedConstant::PiFrac,
            "e" => NamedConstant::E,
            "e_frac" => NamedConstant::EFrac,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            NamedConstant::Sqrt2 => "sqrt2",
            NamedConstant::Golden => "golden",
            NamedConstant::Pi => "pi",
            NamedConstant::PiFrac => "pi_frac",
            NamedConstant::E => "e",
            NamedConstant::EFrac => "e_frac",
        }
    }

    pub fn integer_part(&self) -> i64 {
        match self {
            NamedConstant::Sqrt2 | NamedConstant::Golden => 1,
            NamedConstant::Pi => 3,
            NamedConstant::E => 2,
            NamedConstant::PiFrac | NamedConstant::EFrac => 0,
        }
    }

    pub fn frac(&self) -> Frac256 {
        let hex = match self {
            NamedConstant::Sqrt2 => SQRT2_HEX,
            NamedConstant::Golden => GOLDEN_HEX,
            NamedConstant::Pi | NamedConstant::PiFrac => PI_HEX,
            NamedConstant::E | NamedConstant::EFrac => E_HEX,
        };
        Frac256::from_hex(hex).expect("constant table is well formed")
    }
}

/// Where a coefficient came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffSource {
    DecimalLiteral(String),
    Rational(BigInt, BigInt),
    NamedConstant(NamedConstant),
    /// Built directly from bits; treated as the exact dyadic rational they encode.
    Raw,
    /// Result of negation or integer scaling of another coefficient.
    Derived,
}

/// A real polynomial coefficient: integer part plus a 256-bit fraction.
///
/// Exact coefficients (decimal literals, rationals, raw bits) also carry their
/// reduced rational value. Inexact ones (named constants) carry the width of
/// the interval `[frac, frac + uncertainty_ulps * 2^-256]` known to hold the
/// true fractional part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coefficient {
    integer_part: i64,
    frac: Frac256,
    source: CoeffSource,
    exact: Option<(BigInt, BigInt)>,
    uncertainty_ulps: u64,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::from_ratio(BigInt::zero(), BigInt::one(), CoeffSource::Raw).unwrap()
    }

    pub fn from_integer(v: i64) -> Self {
        Coefficient::from_ratio(BigInt::from(v), BigInt::one(), CoeffSource::Raw).unwrap()
    }

    /// Exact rational `num/den`; `den` may be negative but not zero.
    pub fn from_ratio(num: BigInt, den: BigInt, source: CoeffSource) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (mut num, mut den) = (num, den);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if !g.is_zero() && !g.is_one() {
            num /= &g;
            den /= &g;
        }
        let integer_part = num
            .div_floor(&den)
            .to_i64()
            .ok_or_else(|| Error::Parse("integer part exceeds 64 bits".into()))?;
        let frac = Frac256::from_ratio(&num, &den);
        Ok(Coefficient {
            integer_part,
            frac,
            source,
            exact: Some((num, den)),
            uncertainty_ulps: 0,
        })
    }

    /// The exact dyadic value `integer_part + frac`.
    pub fn from_frac(integer_part: i64, frac: Frac256) -> Self {
        let num = (BigInt::from(integer_part) << FRAC_BITS) + BigInt::from(frac.to_biguint());
        Coefficient::from_ratio(num, BigInt::one() << FRAC_BITS, CoeffSource::Raw)
            .expect("dyadic value with 64-bit integer part")
    }

    pub fn named(c: NamedConstant) -> Self {
        Coefficient {
            integer_part: c.integer_part(),
            frac: c.frac(),
            source: CoeffSource::NamedConstant(c),
            exact: None,
            uncertainty_ulps: 1,
        }
    }

    pub fn integer_part(&self) -> i64 {
        self.integer_part
    }

    pub fn frac(&self) -> Frac256 {
        self.frac
    }

    pub fn source(&self) -> &CoeffSource {
        &self.source
    }

    /// Reduced `(num, den)` with `den > 0` when the value is known exactly.
    pub fn exact_rational(&self) -> Option<(&BigInt, &BigInt)> {
        self.exact.as_ref().map(|(n, d)| (n, d))
    }

    pub fn uncertainty_ulps(&self) -> u64 {
        self.uncertainty_ulps
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some((n, _)) => n.is_zero(),
            None => false,
        }
    }

    /// Float approximation of the full value (integer part included).
    pub fn to_f64(&self) -> f64 {
        self.integer_part as f64 + self.frac.to_f64()
    }

    pub fn negate(&self) -> Self {
        match &self.exact {
            Some((n, d)) => Coefficient::from_ratio(-n.clone(), d.clone(), CoeffSource::Derived)
                .expect("negation keeps the integer part in range"),
            None => {
                // -(I + (X + d)/2^256) = (-I - 1) + (!X + 1 - d)/2^256 with d in [0, u].
                let u = self.uncertainty_ulps;
                let lower = Frac256::from_limbs(self.frac.limbs().map(|l| !l)) - Frac256::ULP.mul_u64(u.saturating_sub(1));
                let borrow = lower > Frac256::from_limbs(self.frac.limbs().map(|l| !l));
                Coefficient {
                    integer_part: -self.integer_part - 1 - borrow as i64,
                    frac: lower,
                    source: CoeffSource::Derived,
                    exact: None,
                    uncertainty_ulps: u,
                }
            }
        }
    }

    /// `h * self`. Only the fractional part matters for phases, so the integer
    /// part wraps silently for inexact coefficients.
    pub fn scale(&self, h: u64) -> Self {
        match &self.exact {
            Some((n, d)) => {
                let num = n * BigInt::from(h);
                let den = d.clone();
                let integer_part = num.div_floor(&den);
                Coefficient {
                    integer_part: wrap_i64(&integer_part),
                    frac: Frac256::from_ratio(&num, &den),
                    source: CoeffSource::Derived,
                    exact: integer_part.to_i64().map(|_| (num.clone(), den.clone())),
                    uncertainty_ulps: 0,
                }
                .normalize_exact()
            }
            None => Coefficient {
                integer_part: self.integer_part.wrapping_mul(h as i64),
                frac: self.frac.mul_u64(h),
                source: CoeffSource::Derived,
                exact: None,
                uncertainty_ulps: self.uncertainty_ulps.saturating_mul(h),
            },
        }
    }

    /// `self mod 1`: same fractional bits, integer part zero.
    pub fn fractional(&self) -> Self {
        match &self.exact {
            Some((n, d)) => Coefficient::from_ratio(n.mod_floor(d), d.clone(), CoeffSource::Derived)
                .expect("fractional part fits"),
            None => Coefficient {
                integer_part: 0,
                frac: self.frac,
                source: CoeffSource::Derived,
                exact: None,
                uncertainty_ulps: self.uncertainty_ulps,
            },
        }
    }

    fn normalize_exact(mut self) -> Self {
        if let Some((n, d)) = self.exact.take() {
            let g = n.gcd(&d);
            if g.is_zero() || g.is_one() {
                self.exact = Some((n, d));
            } else {
                self.exact = Some((n / &g, d / &g));
            }
        }
        self
    }
}

fn wrap_i64(x: &BigInt) -> i64 {
    let modulus = BigInt::one() << 64;
    let r = x.mod_floor(&modulus).to_u64().unwrap_or(0);
    r as i64
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            CoeffSource::DecimalLiteral(s) => f.write_str(s),
            CoeffSource::Rational(p, q) => write!(f, "{p}/{q}"),
            CoeffSource::NamedConstant(c) => f.write_str(c.name()),
            CoeffSource::Raw | CoeffSource::Derived => match &self.exact {
                Some((n, d)) if d.is_one() => write!(f, "{n}"),
                Some((n, d)) => write!(f, "{n}/{d}"),
                None => write!(f, "{}+0x{}", self.integer_part, self.frac.to_hex()),
            },
        }
    }
}

/// Parses a coefficient literal: a decimal (`0.25`, `-1.5e-3`, `7`), a
/// fraction `p/q`, or a constant name (`sqrt2`, `golden`, `pi`, `pi_frac`,
/// `e`, `e_frac`), each optionally signed.
pub fn coeff_parse(text: &str) -> Result<Coefficient> {
    let t = text.trim();
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, t.strip_prefix('+').unwrap_or(t).trim_start()),
    };
    if body.is_empty() {
        return Err(Error::Parse(format!("empty coefficient {text:?}")));
    }
    let c = if let Some(named) = NamedConstant::from_name(body) {
        Coefficient::named(named)
    } else if let Some((p, q)) = body.split_once('/') {
        let p = parse_int(p.trim())?;
        let q = parse_int(q.trim())?;
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Coefficient::from_ratio(p.clone(), q.clone(), CoeffSource::Rational(p, q))?
    } else {
        let (num, den) = parse_decimal(body)?;
        Coefficient::from_ratio(num, den, CoeffSource::DecimalLiteral(body.to_string()))?
    };
    if !negative {
        return Ok(c);
    }
    let mut neg = c.negate();
    neg.source = match c.source {
        CoeffSource::DecimalLiteral(s) => CoeffSource::DecimalLiteral(format!("-{s}")),
        CoeffSource::Rational(p, q) => CoeffSource::Rational(-p, q),
        _ => CoeffSource::Derived,
    };
    Ok(neg)
}

fn parse_int(s: &str) -> Result<BigInt> {
    let digits = s.strip_prefix('+').unwrap_or(s);
    let body = digits.strip_prefix('-').unwrap_or(digits);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not an integer: {s:?}")));
    }
    BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(|| Error::Parse(format!("not an integer: {s:?}")))
}

fn parse_decimal(s: &str) -> Result<(BigInt, BigInt)> {
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (int_digits, frac_digits) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_digits.is_empty() && frac_digits.is_empty() {
        return Err(bad());
    }
    if !int_digits.bytes().chain(frac_digits.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if exponent.unsigned_abs() > 4096 {
        return Err(bad());
    }
    let all = format!("{int_digits}{frac_digits}");
    let mut num = BigInt::parse_bytes(all.as_bytes(), 10).ok_or_else(bad)?;
    let scale = frac_digits.len() as i32 - exponent;
    let mut den = BigInt::one();
    if scale >= 0 {
        den = num_traits::pow(BigInt::from(10), scale as usize);
    } else {
        num *= num_traits::pow(BigInt::from(10), (-scale) as usize);
    }
    Ok((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn one_third_has_repeating_pattern() {
        let c = coeff_parse("1/3").unwrap();
        assert_eq!(c.frac().to_hex(), "5".repeat(64));
        // 3 * floor(2^256/3) = 2^256 - 1, one ulp short of wrapping to zero.
        assert_eq!(c.frac().mul_u64(3), -Frac256::ULP);
    }

    #[test]
    fn quarter_is_exact() {
        let c = coeff_parse("0.25").unwrap();
        assert_eq!(c.frac(), Frac256::from_limbs([0, 0, 0, 1 << 62]));
        assert_eq!(c.integer_part(), 0);
    }

    #[test]
    fn decimal_forms() {
        let c = coeff_parse("-1.5").unwrap();
        assert_eq!(c.integer_part(), -2);
        assert_eq!(c.frac(), Frac256::HALF);
        let c = coeff_parse("25e-2").unwrap();
        assert_eq!(c.frac(), coeff_parse("0.25").unwrap().frac());
        let c = coeff_parse("3").unwrap();
        assert!(c.frac().is_zero());
        assert_eq!(c.integer_part(), 3);
        assert_eq!(coeff_parse(".5").unwrap().frac(), Frac256::HALF);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(coeff_parse("1/0"), Err(Error::ZeroDenominator));
        assert!(matches!(coeff_parse("abc"), Err(Error::Parse(_))));
        assert!(matches!(coeff_parse(""), Err(Error::Parse(_))));
        assert!(matches!(coeff_parse("1.2.3"), Err(Error::Parse(_))));
        assert!(matches!(coeff_parse("1/x"), Err(Error::Parse(_))));
    }

    #[test]
    fn sqrt2_matches_integer_square_root() {
        let c = coeff_parse("sqrt2").unwrap();
        let root = (BigUint::from(2u32) << 512usize).sqrt();
        let expected = root - (BigUint::one() << 256);
        assert_eq!(c.frac().to_biguint(), expected);
        assert_eq!(c.integer_part(), 1);
    }

    #[test]
    fn sqrt2_squares_back_to_two() {
        let c = coeff_parse("sqrt2").unwrap();
        let full = (BigUint::one() << 256) + c.frac().to_biguint();
        let sq = &full * &full;
        let two = BigUint::from(2u32) << 512;
        // floor truncation: 0 <= 2 - x^2 < 2^-254 (in units of 2^-512).
        assert!(sq <= two);
        assert!(&two - &sq < BigUint::one() << (512 - 254));
    }

    #[test]
    fn nearest_int_distance_cases() {
        assert_eq!(nearest_int_distance(Frac256::ZERO), 0.0);
        let three_quarters = coeff_parse("0.75").unwrap().frac();
        assert_eq!(nearest_int_distance(three_quarters), 0.25);
        let s = coeff_parse("sqrt2").unwrap().frac();
        assert!((nearest_int_distance(s) - 0.414_213_562_373_095_05).abs() < 1e-16);
        assert_eq!(nearest_int_distance(Frac256::HALF), 0.5);
        assert_eq!(nearest_int_distance(-Frac256::ULP), nearest_int_distance(Frac256::ULP));
    }

    #[test]
    fn mul_i64_matches_rationals() {
        let c = coeff_parse("2/7").unwrap();
        let x = c.frac().mul_i64(-3);
        let expected = Frac256::from_ratio(&big(-6), &big(7));
        // -3 * floor(2^257/7) vs floor(-6*2^256/7): differ by the truncation carry only.
        let diff = (x - expected).to_signed_f64().abs();
        assert!(diff <= 4.0 * 2f64.powi(-256));
    }

    #[test]
    fn negate_named_keeps_interval() {
        let s = Coefficient::named(NamedConstant::Sqrt2);
        let n = s.negate();
        assert_eq!(n.integer_part(), -2);
        // -sqrt2 + 2 = 0.5857...
        assert!((n.frac().to_f64() - (2.0 - std::f64::consts::SQRT_2)).abs() < 1e-15);
        let sum = s.frac() + n.frac();
        // frac + (!frac) = 2^256 - 1
        assert_eq!(sum, -Frac256::ULP);
    }

    #[test]
    fn negate_exact_roundtrip() {
        let c = coeff_parse("-2/5").unwrap();
        assert_eq!(c.integer_part(), -1);
        assert_eq!(c.exact_rational().unwrap(), (&big(-2), &big(5)));
        assert_eq!(c.negate().exact_rational().unwrap(), (&big(2), &big(5)));
    }

    #[test]
    fn scale_exact_and_named() {
        let c = coeff_parse("1/3").unwrap().scale(3);
        assert!(c.frac().is_zero());
        assert_eq!(c.integer_part(), 1);
        let s = Coefficient::named(NamedConstant::Sqrt2).scale(5);
        assert_eq!(s.frac(), NamedConstant::Sqrt2.frac().mul_u64(5));
        assert_eq!(s.uncertainty_ulps(), 5);
    }

    #[test]
    fn hex_roundtrip_and_order() {
        let x = NamedConstant::Golden.frac();
        assert_eq!(Frac256::from_hex(&x.to_hex()).unwrap(), x);
        assert!(Frac256::HALF > Frac256::ULP);
        assert!(Frac256::from_hex("zz").is_err());
        assert_eq!(format!("{:?}", Frac256::ULP), format!("Frac256(0x{}1)", "0".repeat(63)));
    }

    #[test]
    fn dyadic_from_frac_is_exact() {
        let x = NamedConstant::E.frac();
        let c = Coefficient::from_frac(-3, x);
        assert_eq!(c.frac(), x);
        assert_eq!(c.integer_part(), -3);
        assert!(c.exact_rational().is_some());
    }
}
