//! Rational approximation of leading coefficients and arc classification.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixedpoint::{Coefficient, FRAC_BITS};

/// Ceiling on the number of partial quotients the public expansion returns.
pub const MAX_TERMS: usize = 64;

/// Convergent denominators beyond `2^120` leave fewer than 16 bits between
/// `1/q²` and the `2^-256` representation step.
const MAX_DENOMINATOR_BITS: u64 = 120;

/// Partial quotients and convergents of a coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFraction {
    pub quotients: Vec<BigInt>,
    /// `(p_i, q_i)` with `p_i / q_i = [a_0; a_1, ..., a_i]`.
    pub convergents: Vec<(BigInt, BigInt)>,
    /// The value is rational and the expansion ended exactly.
    pub terminated: bool,
    /// Stopped because the 256-bit representation no longer determines the
    /// next quotient.
    pub precision_exhausted: bool,
}

/// Continued fraction of `alpha`, at most `max_terms` (≤ 64) quotients.
///
/// Exact coefficients are expanded with integer Euclid steps. Named constants
/// are expanded from both ends of the interval their bits certify, keeping
/// only the quotients on which both ends agree.
pub fn continued_fraction(alpha: &Coefficient, max_terms: usize) -> Result<ContinuedFraction> {
    if max_terms == 0 || max_terms > MAX_TERMS {
        return Err(Error::InvalidParameter(format!(
            "max_terms must be in 1..={MAX_TERMS}, got {max_terms}"
        )));
    }
    Ok(expand(alpha, max_terms))
}

fn expand(alpha: &Coefficient, max_terms: usize) -> ContinuedFraction {
    let one = BigInt::one();
    let scale = &one << FRAC_BITS;
    let lower_num = (BigInt::from(alpha.integer_part()) << FRAC_BITS) + BigInt::from(alpha.frac().to_biguint());
    let (mut lo, mut hi) = match alpha.exact_rational() {
        Some((n, d)) => ((n.clone(), d.clone()), None),
        None => {
            let upper = &lower_num + BigInt::from(alpha.uncertainty_ulps());
            ((lower_num, scale.clone()), Some((upper, scale)))
        }
    };

    let mut cf = ContinuedFraction {
        quotients: Vec::new(),
        convergents: Vec::new(),
        terminated: false,
        precision_exhausted: false,
    };
    let (mut p_prev, mut q_prev) = (BigInt::zero(), BigInt::one());
    let (mut p, mut q) = (BigInt::one(), BigInt::zero());
    while cf.quotients.len() < max_terms {
        let a = lo.0.div_floor(&lo.1);
        if let Some(h) = &hi {
            if h.0.div_floor(&h.1) != a {
                cf.precision_exhausted = true;
                break;
            }
        }
        let (p_next, q_next) = (&a * &p + &p_prev, &a * &q + &q_prev);
        if hi.is_some() && q_next.bits() > MAX_DENOMINATOR_BITS {
            cf.precision_exhausted = true;
            break;
        }
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        cf.quotients.push(a.clone());
        cf.convergents.push((p.clone(), q.clone()));

        let r = &lo.0 - &a * &lo.1;
        if r.is_zero() {
            if hi.is_some() {
                cf.precision_exhausted = true;
            } else {
                cf.terminated = true;
            }
            break;
        }
        lo = (std::mem::replace(&mut lo.1, BigInt::zero()), r);
        if let Some(h) = hi.as_mut() {
            let r = &h.0 - &a * &h.1;
            if r.is_zero() {
                cf.precision_exhausted = true;
                break;
            }
            *h = (std::mem::replace(&mut h.1, BigInt::zero()), r);
        }
    }
    cf
}

/// `(a, q)` with `|α - a/q| ≤ 1/(qP)`, `1 ≤ q ≤ P`, `gcd(a, q) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalApprox {
    pub a: i64,
    pub q: u64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub err: f64,
    #[serde(rename = "P", serialize_with = "crate::report::sig17")]
    pub p: f64,
    pub satisfied: bool,
}

/// Exact rational value used for error comparisons: the coefficient itself
/// when exact, otherwise the lower end of its certified interval.
fn reference_value(alpha: &Coefficient) -> (BigInt, BigInt) {
    match alpha.exact_rational() {
        Some((n, d)) => (n.clone(), d.clone()),
        None => {
            let num = (BigInt::from(alpha.integer_part()) << FRAC_BITS) + BigInt::from(alpha.frac().to_biguint());
            (num, BigInt::one() << FRAC_BITS)
        }
    }
}

/// `lhs * p <= rhs` for a non-negative float `p`, exactly.
fn scaled_le(lhs: &BigInt, rhs: &BigInt, p: f64) -> bool {
    let (mantissa, exponent, _) = num_traits::float::FloatCore::integer_decode(p);
    let left = lhs * BigInt::from(mantissa);
    if exponent >= 0 {
        (left << exponent as usize) <= *rhs
    } else {
        left <= (rhs << (-exponent) as usize)
    }
}

/// Smallest-denominator rational satisfying Dirichlet's inequality.
///
/// The smallest `q` with `‖qα‖ ≤ 1/P` is a best approximation of the second
/// kind and therefore a convergent, so scanning convergents in order finds it.
pub fn dirichlet_approx(alpha: &Coefficient, p: f64) -> Result<RationalApprox> {
    if !(p >= 1.0) || p > (1u64 << 62) as f64 {
        return Err(Error::InvalidParameter(format!("P must lie in [1, 2^62], got {p}")));
    }
    let (num, den) = reference_value(alpha);
    let cf = expand(alpha, 4 * MAX_TERMS);
    for (a, q) in &cf.convergents {
        if q.to_f64().unwrap_or(f64::INFINITY) > p {
            break;
        }
        // |qα - a| = |q·num - a·den| / den ≤ 1/P
        let dev = (q * &num - a * &den).abs();
        if scaled_le(&dev, &den, p) {
            let err = dev.to_f64().unwrap_or(f64::INFINITY) / (den.to_f64().unwrap_or(f64::INFINITY) * q.to_f64().unwrap());
            return Ok(RationalApprox {
                a: a.to_i64().ok_or(Error::Overflow)?,
                q: q.to_u64().ok_or(Error::Overflow)?,
                err,
                p,
                satisfied: true,
            });
        }
    }
    Err(Error::Budget(format!(
        "coefficient precision exhausted before a denominator q <= {p} was certified"
    )))
}

/// Major or minor arc membership of `α mod 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "arc", rename_all = "lowercase")]
pub enum Arc {
    Major { a: i64, q: u64 },
    Minor,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcClass {
    #[serde(flatten)]
    pub arc: Arc,
    #[serde(rename = "P", serialize_with = "crate::report::sig17")]
    pub p: f64,
    #[serde(rename = "Q")]
    pub q_max: u64,
    /// Best Dirichlet approximation of `α mod 1` at parameter `P`.
    pub best: RationalApprox,
}

/// Classifies `α mod 1`: major iff some reduced `a/q` with `q ≤ Q` has
/// `|α - a/q| ≤ 1/(qP)`. Requires `P ≥ 2Q ≥ 2`.
pub fn classify_arc(alpha: &Coefficient, p: f64, q_max: u64) -> Result<ArcClass> {
    if q_max < 1 || !(p >= 2.0 * q_max as f64) {
        return Err(Error::InvalidParameter(format!(
            "arc parameters need P >= 2Q >= 2, got P = {p}, Q = {q_max}"
        )));
    }
    let best = dirichlet_approx(&alpha.fractional(), p)?;
    let arc = if best.q <= q_max {
        Arc::Major { a: best.a, q: best.q }
    } else {
        Arc::Minor
    };
    Ok(ArcClass { arc, p, q_max, best })
}
