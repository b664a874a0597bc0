//! The generalized Vaughan identity and four-sum decompositions.
//!
//! For `a = b ∗ c` with `b(1) = ±1` and parameters `U, V ≥ 1`,
//!
//! ```text
//! a(n) = a(n)[n ≤ U] + Σ_{lm=n, l≤V} b(l)c(m)
//!        − Σ_{lm=n, l≤UV} φ₁(l) b⁻¹(m) − Σ_{lm=n, l>U, m>V} a(l) φ₂(m)
//! φ₁(l) = Σ_{rs=l, r≤V, s≤U} b(r)a(s),   φ₂(m) = Σ_{r|m, r≤V} b(r) b⁻¹(m/r)
//! ```
//!
//! Multiplying by `e(f(n))` and summing over `n ≤ N` gives the four sums
//! `s1 + s2 − s3 − s4` of the τ (`b = c = 1`) and μ² (`b = 1`, `c = ν`) cases.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::accum::ComplexAccumulator;
use crate::arith::{dirichlet_inverse, sieve, FuncKind, FuncTable};
use crate::error::{Error, Result};
use crate::expsum::{exp_sum_direct, frac_eval, unit_phase, PhaseStepper, Polynomial, SumRange, Weight, CHUNK_LEN};

/// Largest `N` for which [`VaughanPlan::decompose`] tabulates `e(f(n))`.
pub const MAX_DECOMP_N: u64 = 1 << 25;

/// Splitting parameters. Only `⌊U⌋` and `⌊V⌋` matter for the identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecompParams {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub theta: Option<f64>,
}

impl DecompParams {
    /// `U, V ≥ 1` and `UV ≤ N`.
    pub fn new(n: u64, u: f64, v: f64) -> Result<Self> {
        let p = DecompParams::relaxed(n, u, v)?;
        if u * v > n as f64 * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!("UV = {} exceeds N = {n}", u * v)));
        }
        Ok(p)
    }

    /// `U = V = N^θ` with `0 < θ ≤ 1/2`.
    pub fn from_theta(n: u64, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidParameter(format!("theta must lie in (0, 1), got {theta}")));
        }
        let u = (n as f64).powf(theta).max(1.0);
        let mut p = DecompParams::new(n, u, u)?;
        p.theta = Some(theta);
        Ok(p)
    }

    /// Only `U, V ≥ 1`. The identity stays exact when `UV > N`; some of the
    /// four sums are then empty.
    pub fn relaxed(n: u64, u: f64, v: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("N must be positive".into()));
        }
        if !(u >= 1.0 && v >= 1.0) || !u.is_finite() || !v.is_finite() {
            return Err(Error::InvalidParameter(format!("U and V must be finite and >= 1, got U = {u}, V = {v}")));
        }
        Ok(DecompParams { n, u, v, theta: None })
    }

    fn u_floor(&self) -> u64 {
        (self.u.floor() as u64).min(self.n)
    }

    fn v_floor(&self) -> u64 {
        (self.v.floor() as u64).min(self.n)
    }
}

/// The four terms of the identity at a single `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VaughanTerms {
    pub t1: i64,
    pub t2: i64,
    pub t3: i64,
    pub t4: i64,
}

impl VaughanTerms {
    pub fn combined(&self) -> i64 {
        self.t1 + self.t2 - self.t3 - self.t4
    }
}

/// `a = b ∗ c` checked on the whole table, with `b⁻¹` precomputed, so the
/// identity can be evaluated at many `(n, U, V)` cheaply.
#[derive(Clone, Debug)]
pub struct VaughanContext {
    a: Vec<i64>,
    b: Vec<i64>,
    c: Vec<i64>,
    b_inv: Vec<i64>,
}

fn int_values(t: &FuncTable, n: u64) -> Result<Vec<i64>> {
    if t.n_max() < n {
        return Err(Error::RangeOutsideTable { start: 1, end: n, n_max: t.n_max() });
    }
    let v = t
        .ints()
        .ok_or_else(|| Error::InvalidParameter(format!("{} table is not integer-valued", t.kind().name())))?;
    Ok(v[..=n as usize].to_vec())
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

impl VaughanContext {
    /// Uses `a, b, c` on `1..=n_max`, the smallest of the three table lengths.
    pub fn new(a: &FuncTable, b: &FuncTable, c: &FuncTable) -> Result<Self> {
        let n = a.n_max().min(b.n_max()).min(c.n_max());
        if n == 0 {
            return Err(Error::InvalidParameter("empty tables".into()));
        }
        let a = int_values(a, n)?;
        let b = int_values(b, n)?;
        let c = int_values(c, n)?;
        let b_table = FuncTable::from_values(FuncKind::Custom, &b[1..]);
        let b_inv = dirichlet_inverse(&b_table)?.ints().expect("integer inverse").to_vec();
        let conv = crate::arith::dirichlet_convolve(&b_table, &FuncTable::from_values(FuncKind::Custom, &c[1..]))?;
        if let Some(m) = (1..=n as usize).find(|&m| conv.int(m as u64) != a[m]) {
            return Err(Error::InvalidParameter(format!(
                "a != b * c at n = {m}: a = {}, (b * c) = {}",
                a[m],
                conv.int(m as u64)
            )));
        }
        Ok(VaughanContext { a, b, c, b_inv })
    }

    pub fn n_max(&self) -> u64 {
        self.a.len() as u64 - 1
    }

    pub fn b_inverse(&self) -> &[i64] {
        &self.b_inv
    }

    /// The four terms at `n` for splitting parameters `U, V ≥ 1`.
    pub fn terms(&self, n: u64, u: f64, v: f64) -> Result<VaughanTerms> {
        if n == 0 || n > self.n_max() {
            return Err(Error::RangeOutsideTable { start: n, end: n, n_max: self.n_max() });
        }
        if !(u >= 1.0 && v >= 1.0) {
            return Err(Error::InvalidParameter(format!("U and V must be >= 1, got U = {u}, V = {v}")));
        }
        let u = u.floor().min(n as f64) as u64;
        let v = v.floor().min(n as f64) as u64;
        let (a, b, c, bi) = (&self.a, &self.b, &self.c, &self.b_inv);
        let at = |t: &Vec<i64>, i: u64| t[i as usize] as i128;

        let t1 = if n <= u { at(a, n) } else { 0 };
        let mut t2 = 0i128;
        let mut t3 = 0i128;
        let mut t4 = 0i128;
        for l in divisors(n) {
            let m = n / l;
            if l <= v {
                t2 += at(b, l) * at(c, m);
            }
            if (l as u128) <= u as u128 * v as u128 {
                let phi1: i128 = divisors(l)
                    .into_iter()
                    .filter(|&s| s <= u && l / s <= v)
                    .map(|s| at(a, s) * at(b, l / s))
                    .sum();
                t3 += phi1 * at(bi, m);
            }
            if l > u && m > v {
                let phi2: i128 = divisors(m)
                    .into_iter()
                    .filter(|&r| r <= v)
                    .map(|r| at(b, r) * at(bi, m / r))
                    .sum();
                t4 += at(a, l) * phi2;
            }
        }
        let narrow = |x: i128| i64::try_from(x).map_err(|_| Error::Overflow);
        Ok(VaughanTerms { t1: narrow(t1)?, t2: narrow(t2)?, t3: narrow(t3)?, t4: narrow(t4)? })
    }
}

/// The four terms at one `n`. Builds a fresh [`VaughanContext`] on `1..=n`;
/// prefer the context when evaluating many points.
pub fn vaughan_terms(a: &FuncTable, b: &FuncTable, c: &FuncTable, n: u64, u: f64, v: f64) -> Result<VaughanTerms> {
    let trunc = |t: &FuncTable| int_values(t, n).map(|v| FuncTable::from_values(t.kind(), &v[1..]));
    VaughanContext::new(&trunc(a)?, &trunc(b)?, &trunc(c)?)?.terms(n, u, v)
}

/// Result of a four-sum decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompReport {
    pub weight: &'static str,
    #[serde(flatten)]
    pub params: DecompParams,
    #[serde(serialize_with = "crate::report::complex17")]
    pub s1: Complex64,
    #[serde(serialize_with = "crate::report::complex17")]
    pub s2: Complex64,
    #[serde(serialize_with = "crate::report::complex17")]
    pub s3: Complex64,
    #[serde(serialize_with = "crate::report::complex17")]
    pub s4: Complex64,
    /// `s1 + s2 − s3 − s4`.
    #[serde(serialize_with = "crate::report::complex17")]
    pub recombined: Complex64,
    #[serde(serialize_with = "crate::report::complex17")]
    pub direct: Complex64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub residual: f64,
    /// `Σ_{n≤U} |a(n)|`, the size of the short sum `s1`.
    #[serde(serialize_with = "crate::report::sig17")]
    pub s1_bound: f64,
    /// `Σ_{n≤N} |a(n)|`.
    #[serde(serialize_with = "crate::report::sig17")]
    pub weight_total: f64,
    /// Number of `n ≤ N` whose combined integer coefficient was checked
    /// against `a(n)`, and how many disagreed.
    pub identity_checked: u64,
    pub identity_failures: u64,
}

/// Coefficient tables for one `(a, b, c, N, U, V)`, reusable across phases.
#[derive(Clone, Debug)]
pub struct VaughanPlan {
    name: &'static str,
    params: DecompParams,
    ctx: VaughanContext,
    phi1: Vec<i64>,
    phi2: Vec<i64>,
    identity_failures: u64,
}

impl VaughanPlan {
    pub fn new(name: &'static str, a: &FuncTable, b: &FuncTable, c: &FuncTable, params: DecompParams) -> Result<Self> {
        let n = params.n;
        if n > MAX_DECOMP_N {
            return Err(Error::Budget(format!("decomposition length {n} exceeds {MAX_DECOMP_N}")));
        }
        let trunc = |t: &FuncTable| int_values(t, n).map(|v| FuncTable::from_values(t.kind(), &v[1..]));
        let ctx = VaughanContext::new(&trunc(a)?, &trunc(b)?, &trunc(c)?)?;
        let (u, v) = (params.u_floor(), params.v_floor());
        let uv = (u as u128 * v as u128).min(n as u128) as u64;

        let mut phi1 = vec![0i64; uv as usize + 1];
        for r in 1..=v {
            for s in 1..=u {
                let l = r * s;
                if l > uv {
                    break;
                }
                let term = ctx.b[r as usize].checked_mul(ctx.a[s as usize]).ok_or(Error::Overflow)?;
                phi1[l as usize] = phi1[l as usize].checked_add(term).ok_or(Error::Overflow)?;
            }
        }
        let top = n / u;
        let mut phi2 = vec![0i64; top as usize + 1];
        for r in 1..=v.min(top) {
            for q in 1..=top / r {
                let term = ctx.b[r as usize].checked_mul(ctx.b_inv[q as usize]).ok_or(Error::Overflow)?;
                phi2[(r * q) as usize] = phi2[(r * q) as usize].checked_add(term).ok_or(Error::Overflow)?;
            }
        }

        let mut plan = VaughanPlan { name, params, ctx, phi1, phi2, identity_failures: 0 };
        plan.identity_failures = plan.check_coefficients()?;
        Ok(plan)
    }

    /// `τ = 1 ∗ 1`, `b⁻¹ = μ`.
    pub fn tau(params: DecompParams) -> Result<Self> {
        let one = sieve(FuncKind::One, params.n)?;
        VaughanPlan::new("tau", &sieve(FuncKind::Tau, params.n)?, &one, &one, params)
    }

    /// `μ² = 1 ∗ ν`, `b⁻¹ = μ`.
    pub fn musq(params: DecompParams) -> Result<Self> {
        let one = sieve(FuncKind::One, params.n)?;
        VaughanPlan::new("musq", &sieve(FuncKind::MuSq, params.n)?, &one, &sieve(FuncKind::Nu, params.n)?, params)
    }

    pub fn params(&self) -> &DecompParams {
        &self.params
    }

    /// `φ₁(l)` for `l ≤ min(UV, N)`; slot 0 unused.
    pub fn phi1(&self) -> &[i64] {
        &self.phi1
    }

    /// `φ₂(l)` for `l ≤ N/U`; slot 0 unused.
    pub fn phi2(&self) -> &[i64] {
        &self.phi2
    }

    /// Expands the four sums into the integer coefficient of each `e(f(n))`
    /// and counts the `n ≤ N` where it differs from `a(n)`.
    fn check_coefficients(&self) -> Result<u64> {
        let n = self.params.n;
        let (u, v) = (self.params.u_floor(), self.params.v_floor());
        let ctx = &self.ctx;
        let mut coef = vec![0i128; n as usize + 1];
        for m in 1..=u {
            coef[m as usize] += ctx.a[m as usize] as i128;
        }
        for l in 1..=v {
            for m in 1..=n / l {
                coef[(l * m) as usize] += ctx.b[l as usize] as i128 * ctx.c[m as usize] as i128;
            }
        }
        for l in 1..self.phi1.len() as u64 {
            for m in 1..=n / l {
                coef[(l * m) as usize] -= self.phi1[l as usize] as i128 * ctx.b_inv[m as usize] as i128;
            }
        }
        for l in v + 1..self.phi2.len() as u64 {
            for m in u + 1..=n / l {
                coef[(l * m) as usize] -= self.phi2[l as usize] as i128 * ctx.a[m as usize] as i128;
            }
        }
        Ok((1..=n as usize).filter(|&m| coef[m] != ctx.a[m] as i128).count() as u64)
    }

    /// Evaluates the four sums for phase `f` and compares their
    /// recombination with the directly summed `Σ_{n≤N} a(n) e(f(n))`.
    pub fn decompose(&self, f: &Polynomial) -> Result<DecompReport> {
        let n = self.params.n;
        let (u, v) = (self.params.u_floor(), self.params.v_floor());
        let ctx = &self.ctx;
        let e = phase_table(f, n)?;
        let at = |i: u64| e[i as usize];

        let s1 = {
            let mut acc = ComplexAccumulator::new();
            for m in 1..=u {
                acc.add_complex(at(m) * ctx.a[m as usize] as f64);
            }
            acc.value()
        };
        // Σ_{l ∈ [lo, hi]} outer(l) Σ_{m ∈ [m_lo, N/l]} inner(m) e(f(lm))
        let bilinear = |lo: u64, hi: u64, outer: &[i64], inner: &[i64], m_lo: u64| -> Complex64 {
            if lo > hi {
                return Complex64::new(0.0, 0.0);
            }
            let per_l: Vec<Complex64> = (lo..=hi)
                .into_par_iter()
                .map(|l| {
                    let w = outer[l as usize];
                    let mut acc = ComplexAccumulator::new();
                    if w != 0 {
                        for m in m_lo..=n / l {
                            let x = inner[m as usize];
                            if x != 0 {
                                acc.add_complex(at(l * m) * x as f64);
                            }
                        }
                    }
                    acc.value() * w as f64
                })
                .collect();
            let mut total = ComplexAccumulator::new();
            for block in dyadic_blocks(lo, hi).expect("non-empty range") {
                let mut acc = ComplexAccumulator::new();
                for l in block.lo..=block.hi {
                    acc.add_complex(per_l[(l - lo) as usize]);
                }
                total.add_complex(acc.value());
            }
            total.value()
        };
        let s2 = bilinear(1, v, &ctx.b, &ctx.c, 1);
        let s3 = bilinear(1, self.phi1.len() as u64 - 1, &self.phi1, &ctx.b_inv, 1);
        let s4 = bilinear(v + 1, self.phi2.len() as u64 - 1, &self.phi2, &ctx.a, u + 1);

        let recombined = s1 + s2 - s3 - s4;
        let weights = FuncTable::from_values(FuncKind::Custom, &ctx.a[1..]);
        let direct = exp_sum_direct(f, SumRange::up_to(n)?, &weights)?;
        Ok(DecompReport {
            weight: self.name,
            params: self.params,
            s1,
            s2,
            s3,
            s4,
            recombined,
            direct: direct.value,
            residual: (recombined - direct.value).norm(),
            s1_bound: ctx.a[1..=u as usize].iter().map(|x| x.unsigned_abs() as f64).sum(),
            weight_total: direct.trivial_bound,
            identity_checked: n,
            identity_failures: self.identity_failures,
        })
    }
}

/// `e(f(n))` for `0 ≤ n ≤ N`, slot 0 holding `e(f(0))`.
fn phase_table(f: &Polynomial, n: u64) -> Result<Vec<Complex64>> {
    f.check_point(n)?;
    let starts: Vec<u64> = (0..=n).step_by(CHUNK_LEN as usize).collect();
    let chunks: Vec<Vec<Complex64>> = starts
        .into_par_iter()
        .map(|lo| {
            let hi = (lo + CHUNK_LEN - 1).min(n);
            let mut stepper = PhaseStepper::new(f, lo);
            let mut out = Vec::with_capacity((hi - lo + 1) as usize);
            for _ in lo..=hi {
                let (c, s) = unit_phase(stepper.phase());
                out.push(Complex64::new(c, s));
                stepper.advance();
            }
            out
        })
        .collect();
    Ok(chunks.concat())
}

/// `Σ_{n≤N} τ(n) e(f(n))` split into four sums.
pub fn decompose_tau(f: &Polynomial, params: DecompParams) -> Result<DecompReport> {
    VaughanPlan::tau(params)?.decompose(f)
}

/// `Σ_{n≤N} μ²(n) e(f(n))` split into four sums.
pub fn decompose_musq(f: &Polynomial, params: DecompParams) -> Result<DecompReport> {
    VaughanPlan::musq(params)?.decompose(f)
}

/// Inclusive integer block `[lo, hi]` inside some `[L, 2L)`, `L` a power of two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicBlock {
    pub lo: u64,
    pub hi: u64,
}

impl DyadicBlock {
    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Disjoint cover of `[a, b]` by its intersections with `[2^j, 2^{j+1})`.
pub fn dyadic_blocks(a: u64, b: u64) -> Result<Vec<DyadicBlock>> {
    if a == 0 || a > b {
        return Err(Error::InvalidParameter(format!("dyadic blocks need 1 <= A <= B, got [{a}, {b}]")));
    }
    let mut out = Vec::new();
    let mut lo = a;
    loop {
        let level = 63 - lo.leading_zeros();
        let end = if level == 63 { u64::MAX } else { (1u64 << (level + 1)) - 1 };
        let hi = end.min(b);
        out.push(DyadicBlock { lo, hi });
        if hi == b {
            return Ok(out);
        }
        lo = hi + 1;
    }
}

/// `Δ(L, h) = Σ_{m≤N/L} A(m) Σ_{L≤l<2L, lm≤N} B(l) e(h f(lm))`, by direct
/// double summation.
pub fn bilinear_block_sum<A: Weight, B: Weight>(
    outer: &A,
    inner: &B,
    l: u64,
    n: u64,
    f: &Polynomial,
    h: u64,
) -> Result<Complex64> {
    if l == 0 || h == 0 {
        return Err(Error::InvalidParameter("L and h must be positive".into()));
    }
    let m_max = n / l;
    let l_max = (2 * l - 1).min(n);
    for (w, need) in [(outer.limit(), m_max), (inner.limit(), l_max)] {
        if let Some(lim) = w {
            if need > lim {
                return Err(Error::RangeOutsideTable { start: 1, end: need, n_max: lim });
            }
        }
    }
    let g = f.scaled(h);
    if m_max == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    frac_eval(&g, n)?;
    let per_m: Vec<Complex64> = (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let a = outer.at(m);
            if a == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let mut acc = ComplexAccumulator::new();
            for ll in l..=l_max.min(n / m) {
                let b = inner.at(ll);
                if b != 0.0 {
                    let (c, s) = unit_phase(g.horner(ll * m));
                    acc.add(b * c, b * s);
                }
            }
            acc.value() * a
        })
        .collect();
    let mut total = ComplexAccumulator::new();
    per_m.into_iter().for_each(|z| total.add_complex(z));
    Ok(total.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve;
    use crate::expsum::Unit;

    fn tables(n: u64) -> (FuncTable, FuncTable, FuncTable, FuncTable) {
        (
            sieve(FuncKind::Tau, n).unwrap(),
            sieve(FuncKind::One, n).unwrap(),
            sieve(FuncKind::MuSq, n).unwrap(),
            sieve(FuncKind::Nu, n).unwrap(),
        )
    }

    #[test]
    fn terms_examples() {
        let (tau, one, musq, nu) = tables(30);
        let t = vaughan_terms(&tau, &one, &one, 5, 10.0, 10.0).unwrap();
        assert_eq!((t.t1, t.t2, t.t3, t.t4), (2, 2, 2, 0));
        let t = vaughan_terms(&tau, &one, &one, 30, 3.0, 3.0).unwrap();
        assert_eq!((t.t1, t.t2, t.t3, t.t4), (0, 3, 1, -6));
        assert_eq!(t.combined(), 8);
        let t = vaughan_terms(&musq, &one, &nu, 30, 3.0, 3.0).unwrap();
        assert_eq!((t.t1, t.t2, t.t3, t.t4), (0, 0, 1, -2));
        assert_eq!(t.combined(), 1);
    }

    #[test]
    fn terms_reject_non_units_and_bad_factorizations() {
        let (tau, one, _, _) = tables(20);
        let zero = FuncTable::from_values(FuncKind::Custom, &[0; 20]);
        assert!(matches!(vaughan_terms(&tau, &zero, &one, 10, 2.0, 2.0), Err(Error::NotUnit(0))));
        assert!(vaughan_terms(&one, &one, &one, 10, 2.0, 2.0).is_err());
        assert!(vaughan_terms(&tau, &one, &one, 10, 0.5, 2.0).is_err());
    }

    #[test]
    fn terms_exact_on_a_grid() {
        let (tau, one, musq, nu) = tables(300);
        let ctx_tau = VaughanContext::new(&tau, &one, &one).unwrap();
        let ctx_sq = VaughanContext::new(&musq, &one, &nu).unwrap();
        for n in 1..=300 {
            for u in [1.0, 1.5, 2.0, 3.7, 10.0, 17.0, 300.0] {
                for v in [1.0, 2.0, 5.5, 12.0, 300.0] {
                    assert_eq!(ctx_tau.terms(n, u, v).unwrap().combined(), tau.int(n), "tau n={n} U={u} V={v}");
                    assert_eq!(ctx_sq.terms(n, u, v).unwrap().combined(), musq.int(n), "musq n={n} U={u} V={v}");
                }
            }
        }
    }

    #[test]
    fn phi1_matches_restricted_tau3() {
        let p = DecompParams::new(400, 5.0, 7.0).unwrap();
        let plan = VaughanPlan::tau(p).unwrap();
        let tau3 = sieve(FuncKind::Tau3, 400).unwrap();
        for l in 1..plan.phi1().len() as u64 {
            if l <= 5 {
                assert_eq!(plan.phi1()[l as usize], tau3.int(l));
            }
            assert!(plan.phi1()[l as usize] <= tau3.int(l));
        }
        // Counterexample to equality on all of [1, UV].
        let plan = VaughanPlan::tau(DecompParams::new(16, 2.0, 2.0).unwrap()).unwrap();
        assert_eq!((plan.phi1()[4], tau3.int(4)), (2, 6));
    }

    #[test]
    fn phi2_for_tau_is_mu_truncated_sum() {
        let plan = VaughanPlan::tau(DecompParams::new(1000, 10.0, 10.0).unwrap()).unwrap();
        let mu = sieve(FuncKind::Mu, 1000).unwrap();
        for l in 1..plan.phi2().len() as u64 {
            let want: i64 = (1..=10u64).filter(|r| l % r == 0).map(|r| mu.int(l / r)).sum();
            assert_eq!(plan.phi2()[l as usize], want);
        }
    }

    #[test]
    fn zero_phase_counts() {
        let f = Polynomial::zero();
        let r = decompose_tau(&f, DecompParams::new(50, 7.0, 7.0).unwrap()).unwrap();
        assert!((r.recombined.re - 207.0).abs() < 1e-9 && r.recombined.im.abs() < 1e-9);
        assert_eq!(r.identity_failures, 0);
        let r = decompose_musq(&f, DecompParams::new(50, 7.0, 7.0).unwrap()).unwrap();
        assert!((r.recombined.re - 31.0).abs() < 1e-9);
        assert_eq!(r.direct.re, 31.0);
    }

    #[test]
    fn degenerate_parameters() {
        let f = Polynomial::parse("sqrt2*x^2").unwrap();
        assert!(DecompParams::new(10, 10.0, 10.0).is_err());
        let p = DecompParams::relaxed(10, 10.0, 10.0).unwrap();
        let r = decompose_tau(&f, p).unwrap();
        assert_eq!(r.s4, Complex64::new(0.0, 0.0));
        assert!(r.residual < 1e-12);
        let r = decompose_musq(&f, p).unwrap();
        assert_eq!(r.s4, Complex64::new(0.0, 0.0));
        assert!((r.s1 - r.direct).norm() < 1e-12);
        assert!(DecompParams::relaxed(10, 0.5, 2.0).is_err());
        assert!(DecompParams::from_theta(100, 1.0).is_err());
    }

    #[test]
    fn recombination_matches_direct() {
        let f = Polynomial::parse("sqrt2*x^2").unwrap();
        let p = DecompParams::from_theta(10_000, 0.5).unwrap();
        assert_eq!((p.u, p.v), (100.0, 100.0));
        let r = decompose_tau(&f, p).unwrap();
        assert!(r.residual < 1e-6, "{}", r.residual);
        assert_eq!(r.identity_failures, 0);
        let r = decompose_musq(&f, p).unwrap();
        assert!(r.residual < 1e-6, "{}", r.residual);
        let g = Polynomial::parse("1/7*x^3 - golden*x + 0.3").unwrap();
        let r = decompose_tau(&g, DecompParams::new(3000, 13.0, 40.0).unwrap()).unwrap();
        assert!(r.residual <= 1e-9 * r.weight_total);
    }

    #[test]
    fn dyadic_examples() {
        let b = dyadic_blocks(1, 10).unwrap();
        let pairs: Vec<_> = b.iter().map(|x| (x.lo, x.hi)).collect();
        assert_eq!(pairs, vec![(1, 1), (2, 3), (4, 7), (8, 10)]);
        assert_eq!(dyadic_blocks(5, 5).unwrap().len(), 1);
        let b = dyadic_blocks(3, 17).unwrap();
        assert_eq!(b.iter().map(DyadicBlock::len).sum::<u64>(), 15);
        assert!(b.windows(2).all(|w| w[0].hi + 1 == w[1].lo));
        assert!(dyadic_blocks(0, 3).is_err() && dyadic_blocks(4, 3).is_err());
        assert_eq!(dyadic_blocks(u64::MAX - 1, u64::MAX).unwrap().len(), 1);
    }

    #[test]
    fn bilinear_examples() {
        let zero = Polynomial::zero();
        let z = bilinear_block_sum(&Unit, &Unit, 1, 10, &zero, 1).unwrap();
        assert_eq!(z, Complex64::new(10.0, 0.0));

        let mu = sieve(FuncKind::Mu, 200).unwrap();
        let f = Polynomial::parse("sqrt2*x^2 + 1/3*x").unwrap();
        for l in [1u64, 2, 8, 32] {
            let got = bilinear_block_sum(&mu, &Unit, l, 200, &f, 1).unwrap();
            let mut want = Complex64::new(0.0, 0.0);
            for m in 1..=200 / l {
                for ll in l..2 * l {
                    if ll * m <= 200 {
                        let (c, s) = unit_phase(frac_eval(&f, ll * m).unwrap());
                        want += Complex64::new(c, s) * mu.get(m);
                    }
                }
            }
            assert!((got - want).norm() < 1e-10, "L = {l}");
        }
        let g = f.scaled(2);
        let a = bilinear_block_sum(&mu, &Unit, 4, 200, &f, 2).unwrap();
        let b = bilinear_block_sum(&mu, &Unit, 4, 200, &g, 1).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn blocks_partition_the_double_sum() {
        let n = 500;
        let mu = sieve(FuncKind::Mu, n).unwrap();
        let tau = sieve(FuncKind::Tau, n).unwrap();
        let f = Polynomial::parse("pi*x^2").unwrap();
        let mut by_blocks = Complex64::new(0.0, 0.0);
        for blk in dyadic_blocks(1, n).unwrap() {
            by_blocks += bilinear_block_sum(&mu, &tau, blk.lo, n, &f, 1).unwrap();
        }
        let mut full = Complex64::new(0.0, 0.0);
        for m in 1..=n {
            for l in 1..=n / m {
                let (c, s) = unit_phase(frac_eval(&f, l * m).unwrap());
                full += Complex64::new(c, s) * (mu.get(m) * tau.get(l));
            }
        }
        assert!((by_blocks - full).norm() <= 1e-12 * full.norm().max(1.0));
    }
}
