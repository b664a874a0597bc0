//! The built-in constants, each checked against two independent
//! high-precision evaluations.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use wsum_core::{Coefficient, NamedConstant};

/// Working precision in bits; the extra 64 bits absorb truncation error.
const BITS: usize = 320;

fn scaled_one() -> BigInt {
    BigInt::one() << BITS
}

/// `atan(1/x)·2^BITS` by the alternating Taylor series.
fn atan_inv(x: u64) -> BigInt {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = scaled_one() / &x;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

fn pi_machin() -> BigInt {
    atan_inv(5) * 16 - atan_inv(239) * 4
}

fn pi_stormer() -> BigInt {
    atan_inv(8) * 24 + atan_inv(57) * 8 + atan_inv(239) * 4
}

fn e_series() -> BigInt {
    let mut term = scaled_one();
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !term.is_zero() {
        sum += &term;
        term /= BigInt::from(k);
        k += 1;
    }
    sum
}

/// `e = [2; 1, 2, 1, 1, 4, 1, 1, 6, ...]`, evaluated from a deep convergent.
fn e_continued_fraction() -> BigInt {
    let quotient = |i: u64| -> u64 {
        match i {
            0 => 2,
            i if i % 3 == 2 => 2 * (i + 1) / 3,
            _ => 1,
        }
    };
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::from(quotient(0)), BigInt::one());
    for i in 1..200 {
        let a = BigInt::from(quotient(i));
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    (p1 << BITS) / q1
}

fn golden_sqrt() -> BigInt {
    ((BigInt::from(5) << (2 * BITS)).sqrt() + scaled_one()) / 2
}

fn golden_fibonacci() -> BigInt {
    let (mut a, mut b) = (BigInt::one(), BigInt::one());
    for _ in 0..600 {
        (a, b) = (b.clone(), a + b);
    }
    (b << BITS) / a
}

fn sqrt2_isqrt() -> BigInt {
    (BigInt::from(2) << (2 * BITS)).sqrt()
}

/// Pell convergents `p/q` of `√2` with `p² − 2q² = ±1`.
fn sqrt2_pell() -> BigInt {
    let (mut p, mut q) = (BigInt::one(), BigInt::one());
    for _ in 0..300 {
        (p, q) = (&p + &q * 2, &p + &q);
    }
    (p << BITS) / q
}

/// The stored bits must be the 256-bit truncation of the reference value.
fn check(c: NamedConstant, reference: &BigInt) {
    let coeff = Coefficient::named(c);
    let stored = (BigInt::from(coeff.integer_part()) << 256) + BigInt::from(coeff.frac().to_biguint());
    let truncated = reference >> (BITS - 256);
    assert_eq!(stored, truncated, "{}", c.name());
}

fn agree(a: &BigInt, b: &BigInt) {
    let diff = if a > b { a - b } else { b - a };
    assert!(diff < BigInt::one() << 16, "independent evaluations disagree");
}

#[test]
fn pi_two_ways() {
    let (a, b) = (pi_machin(), pi_stormer());
    agree(&a, &b);
    check(NamedConstant::Pi, &a);
    check(NamedConstant::Pi, &b);
    let frac = Coefficient::named(NamedConstant::PiFrac);
    assert_eq!(frac.integer_part(), 0);
    assert_eq!(frac.frac(), Coefficient::named(NamedConstant::Pi).frac());
}

#[test]
fn e_two_ways() {
    let (a, b) = (e_series(), e_continued_fraction());
    agree(&a, &b);
    check(NamedConstant::E, &a);
    check(NamedConstant::E, &b);
    assert_eq!(Coefficient::named(NamedConstant::EFrac).frac(), Coefficient::named(NamedConstant::E).frac());
}

#[test]
fn golden_two_ways() {
    let (a, b) = (golden_sqrt(), golden_fibonacci());
    agree(&a, &b);
    check(NamedConstant::Golden, &a);
    check(NamedConstant::Golden, &b);
}

#[test]
fn sqrt2_two_ways() {
    let (a, b) = (sqrt2_isqrt(), sqrt2_pell());
    agree(&a, &b);
    check(NamedConstant::Sqrt2, &a);
    check(NamedConstant::Sqrt2, &b);
}
