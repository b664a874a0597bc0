//! Weighted exponential sums `Σ w(n) e(f(n))` over polynomial phases.
//!
//! Phases are exact: `f(n) mod 1` is carried in [`Frac256`] and only the final
//! `cos`/`sin` is rounded. Two engines produce the same phases:
//!
//! * [`Engine::Direct`] evaluates `f(n)` by Horner's scheme for every `n`;
//! * [`Engine::FiniteDifference`] keeps the forward differences
//!   `Δ⁰f(n) .. Δᵏf(n)` and advances them with `k` wrapping additions.
//!
//! Because both work in the ring of integers modulo `2^256`, they agree bit
//! for bit on every phase; the sums differ only if the summation order does,
//! and it does not.
//!
//! Ranges are cut into fixed chunks of [`CHUNK_LEN`] terms, summed in parallel
//! with compensated accumulators, and reduced in ascending order, so the
//! thread count never changes a result.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::accum::{CompensatedSum, ComplexAccumulator};
use crate::arith::{FuncKind, FuncTable};
use crate::error::{Error, Result};
use crate::fixedpoint::{coeff_parse, Coefficient, Frac256};

/// Highest supported polynomial degree.
pub const MAX_DEGREE: usize = 12;

/// Terms per parallel chunk.
pub const CHUNK_LEN: u64 = 1 << 16;

/// Bits of headroom the phase may consume: with `n <= 2^(192/k)` the
/// `2^-256` coefficient quantization, amplified by `n^k`, stays below `2^-64`.
const PHASE_HEADROOM_BITS: usize = 192;

/// A real polynomial with [`Coefficient`]s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    /// Leading coefficient first.
    coeffs: Vec<Coefficient>,
    /// Fractional parts, constant term first, for Horner evaluation.
    fracs: Vec<Frac256>,
}

impl Polynomial {
    /// Builds `α_k x^k + ... + α_0` from `[α_k, ..., α_0]`.
    ///
    /// A constant (degree 0) polynomial may be zero; otherwise the leading
    /// coefficient must be non-zero.
    pub fn new(leading_first: Vec<Coefficient>) -> Result<Self> {
        if leading_first.is_empty() {
            return Err(Error::InvalidParameter("polynomial needs at least one coefficient".into()));
        }
        let degree = leading_first.len() - 1;
        if degree > MAX_DEGREE {
            return Err(Error::InvalidParameter(format!(
                "degree {degree} exceeds the maximum of {MAX_DEGREE}"
            )));
        }
        if degree > 0 && leading_first[0].is_zero() {
            return Err(Error::InvalidParameter("leading coefficient is zero".into()));
        }
        let fracs = leading_first.iter().rev().map(|c| c.frac()).collect();
        Ok(Polynomial {
            coeffs: leading_first,
            fracs,
        })
    }

    /// `α x^k`.
    pub fn monomial(alpha: Coefficient, degree: usize) -> Result<Self> {
        let mut coeffs = vec![Coefficient::zero(); degree + 1];
        coeffs[0] = alpha;
        Polynomial::new(coeffs)
    }

    pub fn constant(alpha: Coefficient) -> Self {
        Polynomial::new(vec![alpha]).expect("constant polynomial")
    }

    pub fn zero() -> Self {
        Polynomial::constant(Coefficient::zero())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &Coefficient {
        &self.coeffs[0]
    }

    /// Coefficients, leading first.
    pub fn coefficients(&self) -> &[Coefficient] {
        &self.coeffs
    }

    /// `h · f`, with every coefficient scaled exactly.
    pub fn scaled(&self, h: u64) -> Polynomial {
        let coeffs: Vec<Coefficient> = self.coeffs.iter().map(|c| c.scale(h)).collect();
        let fracs = coeffs.iter().rev().map(|c| c.frac()).collect();
        Polynomial { coeffs, fracs }
    }

    /// `-f`.
    pub fn negated(&self) -> Polynomial {
        let coeffs: Vec<Coefficient> = self.coeffs.iter().map(|c| c.negate()).collect();
        let fracs = coeffs.iter().rev().map(|c| c.frac()).collect();
        Polynomial { coeffs, fracs }
    }

    /// Rejects evaluation points whose powers would eat into the precision budget.
    pub fn check_point(&self, n: u64) -> Result<()> {
        let k = self.degree();
        if k == 0 || n <= 1 {
            return Ok(());
        }
        let max_bits = PHASE_HEADROOM_BITS / k;
        if max_bits < 64 && n > 1u64 << max_bits {
            return Err(Error::PhasePrecision { n, degree: k });
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn horner(&self, n: u64) -> Frac256 {
        let mut acc = Frac256::ZERO;
        for &c in self.fracs.iter().rev() {
            acc = acc.mul_u64(n) + c;
        }
        acc
    }

    /// Parses `"sqrt2*x^2 + 1/3*x - 0.5"`: monomials `coef*x^d`, `coef x^d`,
    /// `x^d`, `coef*x`, or a bare coefficient, joined by `+`/`-`. Whitespace
    /// is ignored and a degree may appear only once.
    pub fn parse(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        let chars: Vec<char> = compact.chars().collect();
        for (i, &ch) in chars.iter().enumerate() {
            let is_exponent_sign = i >= 2
                && matches!(chars[i - 1], 'e' | 'E')
                && (chars[i - 2].is_ascii_digit() || chars[i - 2] == '.');
            if (ch == '+' || ch == '-') && !is_exponent_sign {
                if !current.is_empty() {
                    terms.push((negative, std::mem::take(&mut current)));
                } else if i > 0 {
                    return Err(Error::Parse(format!("dangling sign in {text:?}")));
                }
                negative = ch == '-';
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(Error::Parse(format!("trailing sign in {text:?}")));
        }
        terms.push((negative, current));

        let mut by_degree: Vec<Option<Coefficient>> = vec![None; MAX_DEGREE + 1];
        for (neg, term) in terms {
            let (coef, degree) = parse_monomial(&term)?;
            let coef = if neg { coef.negate() } else { coef };
            let slot = by_degree
                .get_mut(degree)
                .ok_or_else(|| Error::InvalidParameter(format!("degree {degree} exceeds {MAX_DEGREE}")))?;
            if slot.is_some() {
                return Err(Error::Parse(format!("degree {degree} appears twice")));
            }
            *slot = Some(coef);
        }
        let degree = by_degree
            .iter()
            .rposition(|c| c.as_ref().is_some_and(|c| !c.is_zero()))
            .unwrap_or(0);
        let coeffs = (0..=degree)
            .rev()
            .map(|d| by_degree[d].clone().unwrap_or_else(Coefficient::zero))
            .collect();
        Polynomial::new(coeffs)
    }
}

fn parse_monomial(term: &str) -> Result<(Coefficient, usize)> {
    let Some(pos) = term.find('x') else {
        return Ok((coeff_parse(term)?, 0));
    };
    let (head, tail) = (&term[..pos], &term[pos + 1..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coef = if head.is_empty() {
        Coefficient::from_integer(1)
    } else {
        coeff_parse(head)?
    };
    let degree = if tail.is_empty() {
        1
    } else {
        let d = tail
            .strip_prefix('^')
            .ok_or_else(|| Error::Parse(format!("unexpected {tail:?} after x")))?;
        d.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad exponent {d:?}")))?
    };
    Ok((coef, degree))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            let d = k - i;
            if c.is_zero() && k != 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{d}")?,
            }
        }
        Ok(())
    }
}

/// `f(n) mod 1`, exact up to coefficient quantization.
pub fn frac_eval(f: &Polynomial, n: u64) -> Result<Frac256> {
    f.check_point(n)?;
    Ok(f.horner(n))
}

/// Walks `f(n) mod 1` for consecutive `n` using forward differences.
#[derive(Clone, Debug)]
pub struct PhaseStepper {
    n: u64,
    /// `diffs[j] = Δʲf(n)`; the last entry is the constant `k!·α_k`.
    diffs: Vec<Frac256>,
}

impl PhaseStepper {
    /// Starts at `n0`; the difference table is built from exact values
    /// `f(n0), ..., f(n0 + k)`.
    pub fn new(f: &Polynomial, n0: u64) -> Self {
        let k = f.degree();
        let mut diffs: Vec<Frac256> = (0..=k as u64).map(|j| f.horner(n0 + j)).collect();
        for level in 1..=k {
            for j in (level..=k).rev() {
                diffs[j] = diffs[j] - diffs[j - 1];
            }
        }
        PhaseStepper { n: n0, diffs }
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn phase(&self) -> Frac256 {
        self.diffs[0]
    }

    #[inline]
    pub fn advance(&mut self) {
        let k = self.diffs.len() - 1;
        for j in 0..k {
            let next = self.diffs[j + 1];
            self.diffs[j] += next;
        }
        self.n += 1;
    }
}

/// `e(φ) = (cos 2πφ, sin 2πφ)` from the top bits of an exact phase.
#[inline]
pub fn unit_phase(phase: Frac256) -> (f64, f64) {
    let t = phase.to_signed_f64();
    let (s, c) = (std::f64::consts::TAU * t).sin_cos();
    (c, s)
}

/// A summation weight `w(n)`.
pub trait Weight: Sync {
    fn at(&self, n: u64) -> f64;

    /// Largest `n` the weight is defined for, if bounded.
    fn limit(&self) -> Option<u64> {
        None
    }
}

/// `w(n) = 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Unit;

impl Weight for Unit {
    #[inline]
    fn at(&self, _n: u64) -> f64 {
        1.0
    }
}

impl Weight for FuncTable {
    #[inline]
    fn at(&self, n: u64) -> f64 {
        self.get(n)
    }

    fn limit(&self) -> Option<u64> {
        Some(self.n_max())
    }
}

impl<W: Weight + ?Sized> Weight for &W {
    #[inline]
    fn at(&self, n: u64) -> f64 {
        (**self).at(n)
    }

    fn limit(&self) -> Option<u64> {
        (**self).limit()
    }
}

/// A weight given by a closure.
pub struct FnWeight<F> {
    f: F,
    limit: Option<u64>,
}

impl<F: Fn(u64) -> f64 + Sync> FnWeight<F> {
    pub fn new(f: F) -> Self {
        FnWeight { f, limit: None }
    }

    pub fn bounded(f: F, limit: u64) -> Self {
        FnWeight { f, limit: Some(limit) }
    }
}

impl<F: Fn(u64) -> f64 + Sync> Weight for FnWeight<F> {
    #[inline]
    fn at(&self, n: u64) -> f64 {
        (self.f)(n)
    }

    fn limit(&self) -> Option<u64> {
        self.limit
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Engine {
    Direct,
    FiniteDifference,
}

/// Inclusive summation range `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SumRange {
    pub start: u64,
    pub end: u64,
}

impl SumRange {
    pub fn new(start: u64, end: u64) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidParameter(format!("empty range [{start}, {end}]")));
        }
        Ok(SumRange { start, end })
    }

    /// `[1, n]`.
    pub fn up_to(n: u64) -> Result<Self> {
        SumRange::new(1, n)
    }

    pub fn len(&self) -> u64 {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Value of a weighted exponential sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumResult {
    #[serde(serialize_with = "crate::report::complex17")]
    pub value: Complex64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub abs: f64,
    pub n_terms: u64,
    /// `Σ |w(n)|`.
    #[serde(serialize_with = "crate::report::sig17")]
    pub trivial_bound: f64,
    pub engine: Engine,
}

#[derive(Clone, Copy, Default)]
struct ChunkPart {
    acc: ComplexAccumulator,
    trivial: CompensatedSum,
}

fn check_range<W: Weight>(f: &Polynomial, range: SumRange, w: &W) -> Result<()> {
    if let Some(limit) = w.limit() {
        if range.start == 0 || range.end > limit {
            return Err(Error::RangeOutsideTable {
                start: range.start,
                end: range.end,
                n_max: limit,
            });
        }
    }
    f.check_point(range.end)
}

fn chunk_bounds(range: SumRange) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity((range.len() / CHUNK_LEN + 1) as usize);
    let mut lo = range.start;
    loop {
        let hi = lo.saturating_add(CHUNK_LEN - 1).min(range.end);
        out.push((lo, hi));
        if hi == range.end {
            break;
        }
        lo = hi + 1;
    }
    out
}

fn direct_chunk<W: Weight>(f: &Polynomial, lo: u64, hi: u64, w: &W) -> ChunkPart {
    let mut part = ChunkPart::default();
    for n in lo..=hi {
        let wn = w.at(n);
        if wn == 0.0 {
            continue;
        }
        let (c, s) = unit_phase(f.horner(n));
        part.acc.add(wn * c, wn * s);
        part.trivial.add(wn.abs());
    }
    part
}

fn difference_chunk<W: Weight>(f: &Polynomial, lo: u64, hi: u64, w: &W) -> ChunkPart {
    let mut part = ChunkPart::default();
    let mut stepper = PhaseStepper::new(f, lo);
    for n in lo..=hi {
        let wn = w.at(n);
        if wn != 0.0 {
            let (c, s) = unit_phase(stepper.phase());
            part.acc.add(wn * c, wn * s);
            part.trivial.add(wn.abs());
        }
        stepper.advance();
    }
    part
}

/// Sums `w(n) e(f(n))` over `range` with the chosen engine.
pub fn exp_sum<W: Weight>(engine: Engine, f: &Polynomial, range: SumRange, w: &W) -> Result<SumResult> {
    check_range(f, range, w)?;
    let parts: Vec<ChunkPart> = chunk_bounds(range)
        .into_par_iter()
        .map(|(lo, hi)| match engine {
            Engine::Direct => direct_chunk(f, lo, hi, w),
            Engine::FiniteDifference => difference_chunk(f, lo, hi, w),
        })
        .collect();
    let mut acc = ComplexAccumulator::new();
    let mut trivial = CompensatedSum::new();
    for p in &parts {
        acc.merge(&p.acc);
        trivial.merge(&p.trivial);
    }
    let value = acc.value();
    Ok(SumResult {
        value,
        abs: value.norm(),
        n_terms: range.len(),
        trivial_bound: trivial.value(),
        engine,
    })
}

pub fn exp_sum_direct<W: Weight>(f: &Polynomial, range: SumRange, w: &W) -> Result<SumResult> {
    exp_sum(Engine::Direct, f, range, w)
}

pub fn exp_sum_diff<W: Weight>(f: &Polynomial, range: SumRange, w: &W) -> Result<SumResult> {
    exp_sum(Engine::FiniteDifference, f, range, w)
}

/// `Σ_{p ∈ range} log p · e(h f(p))`, evaluated directly at the primes.
pub fn prime_exp_sum(f: &Polynomial, range: SumRange, h: u64, primes: &FuncTable) -> Result<SumResult> {
    if primes.kind() != FuncKind::PrimeLog {
        return Err(Error::InvalidParameter("prime_exp_sum needs a PrimeLog table".into()));
    }
    if h == 0 {
        return Err(Error::InvalidParameter("h must be positive".into()));
    }
    exp_sum_direct(&f.scaled(h), range, primes)
}
