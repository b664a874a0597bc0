//! Small fractional parts: `h`-indexed sum families, the existence
//! criterion `Σ_{h≤H} |Σ g(n) e(hα_n)| < (1/6) Σ g(n)`, and direct searches
//! for `‖f(n)‖ < n^{−γ/4+ε}` over composite and squarefree `n`.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::accum::{CompensatedSum, ComplexAccumulator};
use crate::arith::{primes_with_logs, sieve, smallest_prime_factors, trial_factor, FuncKind, FuncTable};
use crate::bounds::gamma_R;
use crate::error::{Error, Result};
use crate::expsum::{exp_sum_diff, frac_eval, unit_phase, FnWeight, PhaseStepper, Polynomial, SumRange, CHUNK_LEN};
use crate::fixedpoint::{nearest_int_distance, Frac256};

/// Largest `h` accepted by [`h_family_sum`].
pub const MAX_H: u64 = 1 << 60;

/// Default cap on the number of hits a search returns.
pub const DEFAULT_HIT_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyWeight {
    Tau,
    MuSq,
    PrimeLog,
    Unit,
}

/// Restriction of the summation range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyFilter {
    None,
    /// `τ(n) > 2`, i.e. composite `n`.
    TauGt2,
    /// `√N < n ≤ N` with a prime factor below `√N`, where `N` is the range end.
    InA,
}

/// `√N < n ≤ N` and `gcd(n, P(√N)) > 1`, decided from the smallest prime
/// factor: `spf(n)² < N`.
pub fn in_set_a(n: u64, big_n: u64, spf: &[u32]) -> bool {
    let p = spf[n as usize] as u64;
    n <= big_n && n * n > big_n && n > 1 && p * p < big_n
}

/// The per-`h` sums of an `h` family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HFamily {
    #[serde(rename = "H")]
    pub h_max: u64,
    #[serde(serialize_with = "serialize_complex_vec")]
    pub sums: Vec<Complex64>,
    /// `Σ_{h≤H} |S_h|`.
    #[serde(serialize_with = "crate::report::sig17")]
    pub total: f64,
    /// `Σ w(n)` over the filtered range.
    #[serde(serialize_with = "crate::report::sig17")]
    pub weight_total: f64,
}

fn serialize_complex_vec<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    #[derive(Serialize)]
    struct C(#[serde(serialize_with = "crate::report::complex17")] Complex64);
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&C(*z))?;
    }
    seq.end()
}

/// Base weight and filter combined into one table on `[1, range.end]`.
fn family_weights(weight: FamilyWeight, range: SumRange, filter: FamilyFilter) -> Result<Vec<f64>> {
    let n = range.end;
    let mut w: Vec<f64> = match weight {
        FamilyWeight::Tau => sieve(FuncKind::Tau, n)?.ints().unwrap().iter().map(|&x| x as f64).collect(),
        FamilyWeight::MuSq => sieve(FuncKind::MuSq, n)?.ints().unwrap().iter().map(|&x| x as f64).collect(),
        FamilyWeight::PrimeLog => {
            if n < 2 {
                vec![0.0; n as usize + 1]
            } else {
                primes_with_logs(n)?.reals().unwrap().to_vec()
            }
        }
        FamilyWeight::Unit => vec![1.0; n as usize + 1],
    };
    w[0] = 0.0;
    match filter {
        FamilyFilter::None => {}
        FamilyFilter::TauGt2 => {
            let tau = sieve(FuncKind::Tau, n)?;
            for (m, x) in w.iter_mut().enumerate().skip(1) {
                if tau.int(m as u64) <= 2 {
                    *x = 0.0;
                }
            }
        }
        FamilyFilter::InA => {
            let spf = smallest_prime_factors(n)?;
            for (m, x) in w.iter_mut().enumerate().skip(1) {
                if !in_set_a(m as u64, n, &spf) {
                    *x = 0.0;
                }
            }
        }
    }
    Ok(w)
}

/// `S_h = Σ_{n ∈ range, filter} w(n) e(h f(n))` for `1 ≤ h ≤ H`.
pub fn h_family_sum(
    f: &Polynomial,
    weight: FamilyWeight,
    range: SumRange,
    h_max: u64,
    filter: FamilyFilter,
) -> Result<HFamily> {
    if h_max == 0 || h_max > MAX_H {
        return Err(Error::InvalidParameter(format!("H must be in 1..=2^60, got {h_max}")));
    }
    if range.start == 0 {
        return Err(Error::InvalidParameter("range must start at n >= 1".into()));
    }
    f.check_point(range.end)?;
    let w = family_weights(weight, range, filter)?;
    let weight_fn = FnWeight::bounded(|n: u64| w[n as usize], range.end);
    let mut sums = Vec::with_capacity(h_max.min(1 << 20) as usize);
    let mut total = CompensatedSum::new();
    let mut weight_total = 0.0;
    for h in 1..=h_max {
        let s = exp_sum_diff(&f.scaled(h), range, &weight_fn)?;
        total.add(s.abs);
        weight_total = s.trivial_bound;
        sums.push(s.value);
    }
    Ok(HFamily { h_max, sums, total: total.value(), weight_total })
}

/// One element of the finite set in the criterion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriterionPoint {
    pub n: u64,
    pub g: f64,
    pub alpha: Frac256,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub n: u64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub dist: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    #[serde(rename = "H")]
    pub h_max: u64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub lhs: f64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub rhs: f64,
    pub holds: bool,
    pub size: usize,
    /// First point with `‖α_n‖ < 1/H` (exact comparison), if any.
    pub witness: Option<Witness>,
}

/// `‖x‖ < 1/H`, decided exactly on the 256-bit value.
pub fn below_inverse(x: Frac256, h: u64) -> bool {
    let d = if x.is_upper_half() { -x } else { x };
    d.to_biguint() * BigUint::from(h) < BigUint::one() << 256u32
}

/// Evaluates both sides of the criterion and searches for a witness by
/// brute force.
pub fn harman_criterion(points: &[CriterionPoint], h_max: u64) -> Result<CriterionReport> {
    if h_max == 0 || h_max > MAX_H {
        return Err(Error::InvalidParameter(format!("H must be in 1..=2^60, got {h_max}")));
    }
    if let Some(p) = points.iter().find(|p| !(p.g >= 0.0)) {
        return Err(Error::NegativeWeight { n: p.n, weight: p.g });
    }
    let per_h: Vec<f64> = (1..=h_max)
        .into_par_iter()
        .map(|h| {
            let mut acc = ComplexAccumulator::new();
            for p in points {
                if p.g != 0.0 {
                    let (c, s) = unit_phase(p.alpha.mul_u64(h));
                    acc.add(p.g * c, p.g * s);
                }
            }
            acc.value().norm()
        })
        .collect();
    let lhs = per_h.iter().copied().collect::<CompensatedSum>().value();
    let rhs = points.iter().map(|p| p.g).collect::<CompensatedSum>().value() / 6.0;
    let witness = points
        .iter()
        .find(|p| below_inverse(p.alpha, h_max))
        .map(|p| Witness { n: p.n, dist: nearest_int_distance(p.alpha) });
    Ok(CriterionReport { h_max, lhs, rhs, holds: lhs < rhs, size: points.len(), witness })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchVariant {
    /// `τ(n) ≥ 3`.
    Composite,
    /// `μ²(n) = 1` and `ω(n) ≥ 2`.
    SquarefreeOmega2,
}

impl SearchVariant {
    fn accepts(self, tau: u64, omega: u32, squarefree: bool) -> bool {
        match self {
            SearchVariant::Composite => tau >= 3,
            SearchVariant::SquarefreeOmega2 => squarefree && omega >= 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct Hit {
    pub n: u64,
    pub dist: f64,
    pub threshold: f64,
    pub tau: u64,
    pub omega: u32,
    pub squarefree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub variant: SearchVariant,
    pub start: u64,
    pub end: u64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub eps: f64,
    /// All qualifying `n`, including those beyond the cap.
    pub total: u64,
    pub truncated: bool,
    pub hits: Vec<Hit>,
}

/// `n^{−γ/4+ε}` for a degree-`k` phase.
pub fn threshold(n: u64, k: u32, eps: f64) -> Result<f64> {
    let gamma = gamma_R(k)?.gamma();
    Ok((n as f64).powf(-gamma / 4.0 + eps))
}

/// Recomputes a hit from scratch: a fresh Horner evaluation of `f(n)` and a
/// trial-division factorization of `n`.
pub fn verify_hit(f: &Polynomial, variant: SearchVariant, eps: f64, hit: &Hit) -> Result<bool> {
    let dist = nearest_int_distance(frac_eval(f, hit.n)?);
    let t = threshold(hit.n, f.degree() as u32, eps)?;
    let fac = trial_factor(hit.n);
    Ok(dist == hit.dist
        && dist < t
        && t == hit.threshold
        && fac.tau == hit.tau
        && fac.omega == hit.omega
        && fac.squarefree == hit.squarefree
        && variant.accepts(fac.tau, fac.omega, fac.squarefree))
}

/// Chunks scanned per parallel round; bounds memory when hits are dense.
const CHUNKS_PER_ROUND: usize = 64;

/// Scans `[start, end]` for `‖f(n)‖ < n^{−γ/4+ε}` with `n` of the given
/// shape. Keeps the first `cap` hits in ascending order and counts the rest.
/// Every kept hit is re-verified with [`verify_hit`].
pub fn search_small_frac(
    f: &Polynomial,
    variant: SearchVariant,
    start: u64,
    end: u64,
    eps: f64,
    cap: usize,
) -> Result<SearchReport> {
    let k = f.degree() as u32;
    if k == 0 {
        return Err(Error::InvalidParameter("search needs a non-constant phase".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let range = SumRange::new(start.max(1), end)?;
    f.check_point(end)?;
    let gamma = gamma_R(k)?.gamma();
    let exponent = -gamma / 4.0 + eps;
    let tau = sieve(FuncKind::Tau, end)?;
    let musq = sieve(FuncKind::MuSq, end)?;
    let omega = sieve(FuncKind::Omega, end)?;

    let mut bounds = Vec::new();
    let mut lo = range.start;
    loop {
        let hi = lo.saturating_add(CHUNK_LEN - 1).min(end);
        bounds.push((lo, hi));
        if hi == end {
            break;
        }
        lo = hi + 1;
    }

    let mut hits = Vec::new();
    let mut total = 0u64;
    for round in bounds.chunks(CHUNKS_PER_ROUND) {
        let room = cap.saturating_sub(hits.len());
        let parts: Vec<(u64, Vec<Hit>)> = round
            .par_iter()
            .map(|&(lo, hi)| scan_chunk(f, variant, lo, hi, exponent, room, &tau, &musq, &omega))
            .collect();
        for (count, found) in parts {
            total += count;
            let room = cap.saturating_sub(hits.len());
            hits.extend(found.into_iter().take(room));
        }
    }

    for hit in &hits {
        if !verify_hit(f, variant, eps, hit)? {
            return Err(Error::Verification(format!("hit at n = {} does not reproduce", hit.n)));
        }
    }
    Ok(SearchReport {
        variant,
        start: range.start,
        end,
        eps,
        total,
        truncated: (hits.len() as u64) < total,
        hits,
    })
}

#[allow(clippy::too_many_arguments)]
fn scan_chunk(
    f: &Polynomial,
    variant: SearchVariant,
    lo: u64,
    hi: u64,
    exponent: f64,
    room: usize,
    tau: &FuncTable,
    musq: &FuncTable,
    omega: &FuncTable,
) -> (u64, Vec<Hit>) {
    let mut stepper = PhaseStepper::new(f, lo);
    let mut count = 0;
    let mut found = Vec::new();
    for n in lo..=hi {
        let t = tau.int(n) as u64;
        let w = omega.int(n) as u32;
        let sq = musq.int(n) == 1;
        if variant.accepts(t, w, sq) {
            let dist = nearest_int_distance(stepper.phase());
            let threshold = (n as f64).powf(exponent);
            if dist < threshold {
                count += 1;
                if found.len() < room {
                    found.push(Hit { n, dist, threshold, tau: t, omega: w, squarefree: sq });
                }
            }
        }
        stepper.advance();
    }
    (count, found)
}

/// One side of the master inequality: `Σ_{h≤H}|S_h|` against `(1/6) Σ w`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MasterSide {
    #[serde(serialize_with = "crate::report::sig17")]
    pub lhs: f64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "H")]
    pub h_max: u64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub eps: f64,
    pub range_start: u64,
    pub tau_side: MasterSide,
    pub musq_side: MasterSide,
    pub composite: SearchReport,
    pub squarefree: SearchReport,
}

/// Runs both master inequalities on `(⌊√N⌋, N]` with
/// `H = max(1, ⌊N^{γ/4−ε}⌋)`, plus the direct searches over the same range.
/// Criterion truth is reported, never assumed.
pub fn theorem34_pipeline(f: &Polynomial, n: u64, eps: f64, cap: usize) -> Result<PipelineReport> {
    let k = f.degree() as u32;
    if k == 0 {
        return Err(Error::InvalidParameter("pipeline needs a non-constant phase".into()));
    }
    if f.leading().exact_rational().is_some() {
        return Err(Error::RationalLeading);
    }
    if n < 4 {
        return Err(Error::InvalidParameter("N must be >= 4".into()));
    }
    let gamma = gamma_R(k)?.gamma();
    let h_max = ((n as f64).powf(gamma / 4.0 - eps).floor() as u64).max(1);
    let root = (n as f64).sqrt().floor() as u64;
    let root = if (root + 1) * (root + 1) <= n { root + 1 } else if root * root > n { root - 1 } else { root };
    let range = SumRange::new(root + 1, n)?;

    let side = |weight, filter| -> Result<MasterSide> {
        let fam = h_family_sum(f, weight, range, h_max, filter)?;
        let rhs = fam.weight_total / 6.0;
        Ok(MasterSide { lhs: fam.total, rhs, holds: fam.total < rhs })
    };
    let tau_side = side(FamilyWeight::Tau, FamilyFilter::TauGt2)?;
    let musq_side = side(FamilyWeight::MuSq, FamilyFilter::InA)?;
    let composite = search_small_frac(f, SearchVariant::Composite, range.start, n, eps, cap)?;
    let squarefree = search_small_frac(f, SearchVariant::SquarefreeOmega2, range.start, n, eps, cap)?;
    Ok(PipelineReport { n, h_max, eps, range_start: range.start, tau_side, musq_side, composite, squarefree })
}
