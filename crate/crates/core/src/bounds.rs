//! Bound envelopes for weighted exponential sums, and scans comparing them
//! with measured sums.
//!
//! Envelopes are evaluated through logarithms so that `N ~ 10⁸` at `k = 5`
//! does not overflow. The implied constants of the underlying estimates are
//! unknown; callers see raw envelope values and fitted ratios.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::accum::CompensatedSum;
use crate::arith::{sieve, FuncKind};
use crate::diophantine::{classify_arc, dirichlet_approx, Arc};
use crate::error::{Error, Result};
use crate::expsum::{exp_sum, Engine, Polynomial, SumRange, Unit, CHUNK_LEN};
use crate::fixedpoint::{nearest_int_distance, Coefficient};
use crate::report::format_sig17;

/// Largest number of terms [`weyl_envelope`] will sum.
pub const WEYL_MAX_TERMS: u128 = 1_000_000_000;

/// `γ = 4^{1−k}` and `R = 2^{k−1}` for a degree-`k` phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Exponents {
    pub k: u32,
    #[serde(rename = "R")]
    pub r: u64,
    /// `γ = 1 / gamma_den`.
    pub gamma_den: u64,
}

impl Exponents {
    pub fn gamma(&self) -> f64 {
        1.0 / self.gamma_den as f64
    }
}

/// `(γ, R)` for `1 ≤ k ≤ 32`.
#[allow(non_snake_case)]
pub fn gamma_R(k: u32) -> Result<Exponents> {
    if !(1..=32).contains(&k) {
        return Err(Error::InvalidParameter(format!("degree must be in 1..=32, got {k}")));
    }
    Ok(Exponents { k, r: 1 << (k - 1), gamma_den: 1 << (2 * (k - 1)) })
}

fn check_ge_one(name: &str, x: f64) -> Result<()> {
    if x >= 1.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and >= 1, got {x}")))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps >= 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eps must be finite and >= 0, got {eps}")))
    }
}

/// `ln Σ exp(t_i)`.
fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// The Weyl envelope `X^{R−k+ε} Σ_{y=1}^{k!X^{k−1}} min(X, 1/‖βy‖)` and its
/// sum part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeylEnvelope {
    #[serde(serialize_with = "crate::report::sig17")]
    pub sum: f64,
    pub terms: u64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub value: f64,
}

/// Bounds `|Σ_{n≤X} e(g(n))|^R` for `g` of degree `k` with leading
/// coefficient `β`. `‖βy‖` is evaluated from the 256-bit fraction.
pub fn weyl_envelope(beta: &Coefficient, x: u64, k: u32, eps: f64) -> Result<WeylEnvelope> {
    let ex = gamma_R(k)?;
    check_eps(eps)?;
    if x == 0 {
        return Err(Error::InvalidParameter("X must be >= 1".into()));
    }
    let mut terms: u128 = (1..=k as u128).product();
    for _ in 1..k {
        terms = terms.saturating_mul(x as u128);
    }
    if terms > WEYL_MAX_TERMS {
        return Err(Error::Budget(format!("Weyl sum needs {terms} terms, limit {WEYL_MAX_TERMS}")));
    }
    let terms = terms as u64;
    let xf = x as f64;
    let frac = beta.frac();
    let starts: Vec<u64> = (1..=terms).step_by(CHUNK_LEN as usize).collect();
    let parts: Vec<CompensatedSum> = starts
        .into_par_iter()
        .map(|lo| {
            let hi = (lo + CHUNK_LEN - 1).min(terms);
            let mut acc = CompensatedSum::new();
            for y in lo..=hi {
                let d = nearest_int_distance(frac.mul_u64(y));
                acc.add(if d * xf <= 1.0 { xf } else { 1.0 / d });
            }
            acc
        })
        .collect();
    let mut sum = CompensatedSum::new();
    parts.iter().for_each(|p| sum.merge(p));
    let sum = sum.value();
    let exponent = ex.r as f64 - k as f64 + eps;
    Ok(WeylEnvelope { sum, terms, value: (exponent * xf.ln() + sum.ln()).exp() })
}

/// `(XW)^{1+ε} (X^{−R} + W^{−1} + q^{−1} + q(XW)^{−k})^γ`.
pub fn harman_corollary_envelope(x: f64, w: f64, q: f64, k: u32, eps: f64) -> Result<f64> {
    let ex = gamma_R(k)?;
    check_ge_one("X", x)?;
    check_ge_one("W", w)?;
    check_ge_one("q", q)?;
    check_eps(eps)?;
    let lxw = x.ln() + w.ln();
    let inner = log_sum_exp(&[-(ex.r as f64) * x.ln(), -w.ln(), -q.ln(), q.ln() - k as f64 * lxw]);
    Ok(((1.0 + eps) * lxw + ex.gamma() * inner).exp())
}

/// `(XW)^{1+ε} X^{(k−1)/R} (q^{−1} + q(WX)^{−k} + W^{−1})^{1/R}`.
pub fn lemma4_envelope(x: f64, w: f64, q: f64, k: u32, eps: f64) -> Result<f64> {
    let ex = gamma_R(k)?;
    check_ge_one("X", x)?;
    check_ge_one("W", w)?;
    check_ge_one("q", q)?;
    check_eps(eps)?;
    let r = ex.r as f64;
    let lxw = x.ln() + w.ln();
    let inner = log_sum_exp(&[-q.ln(), q.ln() - k as f64 * lxw, -w.ln()]);
    Ok(((1.0 + eps) * lxw + (k as f64 - 1.0) / r * x.ln() + inner / r).exp())
}

/// Which estimate bounds a dyadic block `Δ(L)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockEstimate {
    Corollary,
    Lemma4,
}

fn block_bracket_log(n: f64, q: f64, k: u32, theta: f64) -> f64 {
    log_sum_exp(&[-q.ln(), q.ln() - k as f64 * n.ln(), -(1.0 - theta) * n.ln()])
}

/// The corollary applies when `L^R ≥ min{q⁻¹N^k, q, N^{1−θ}}`, otherwise the
/// second estimate is used.
pub fn select_block_estimate(l: f64, n: f64, q: f64, k: u32, theta: f64) -> Result<BlockEstimate> {
    let ex = gamma_R(k)?;
    check_ge_one("L", l)?;
    check_ge_one("N", n)?;
    check_ge_one("q", q)?;
    let lhs = ex.r as f64 * l.ln();
    let rhs = (k as f64 * n.ln() - q.ln()).min(q.ln()).min((1.0 - theta) * n.ln());
    Ok(if lhs >= rhs { BlockEstimate::Corollary } else { BlockEstimate::Lemma4 })
}

/// Block envelope with `B = 1/q + q/N^k + 1/N^{1−θ}`:
/// corollary `N^{1+ε}(L^{−R} + B)^γ`, second estimate `N^{1+ε} L^{(k−1)/R} B^{1/R}`.
pub fn block_envelope(which: BlockEstimate, l: f64, n: f64, q: f64, k: u32, theta: f64, eps: f64) -> Result<f64> {
    let ex = gamma_R(k)?;
    check_ge_one("L", l)?;
    check_ge_one("N", n)?;
    check_ge_one("q", q)?;
    check_theta(theta)?;
    check_eps(eps)?;
    let r = ex.r as f64;
    let b = block_bracket_log(n, q, k, theta);
    let head = (1.0 + eps) * n.ln();
    Ok(match which {
        BlockEstimate::Corollary => (head + ex.gamma() * log_sum_exp(&[-r * l.ln(), b])).exp(),
        BlockEstimate::Lemma4 => (head + (k as f64 - 1.0) / r * l.ln() + b / r).exp(),
    })
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("theta must lie in (0, 1), got {theta}")))
    }
}

/// Weight of a main-theorem sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremWeight {
    Tau,
    MuSq,
}

impl TheoremWeight {
    pub fn kind(self) -> FuncKind {
        match self {
            TheoremWeight::Tau => FuncKind::Tau,
            TheoremWeight::MuSq => FuncKind::MuSq,
        }
    }
}

/// `[log N] · N^{1+ε} (1/q + q/N^k + 1/N^{1−θ})^γ`; the `log N` factor is
/// present for τ only.
pub fn theorem_envelope(which: TheoremWeight, n: f64, k: u32, q: f64, theta: f64, eps: f64) -> Result<f64> {
    let ex = gamma_R(k)?;
    check_ge_one("N", n)?;
    check_ge_one("q", q)?;
    check_theta(theta)?;
    check_eps(eps)?;
    let mut log_value = (1.0 + eps) * n.ln() + ex.gamma() * block_bracket_log(n, q, k, theta);
    if which == TheoremWeight::Tau {
        log_value += n.ln().ln();
    }
    Ok(log_value.exp())
}

/// `|Σ_{n≤X} e(g(n))|^R` against the Weyl envelope of `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeylCheck {
    #[serde(rename = "X")]
    pub x: u64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub lhs: f64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub envelope: f64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub ratio: f64,
}

pub fn weyl_check(g: &Polynomial, x: u64, eps: f64) -> Result<WeylCheck> {
    let k = g.degree() as u32;
    if k == 0 {
        return Err(Error::InvalidParameter("Weyl check needs a non-constant phase".into()));
    }
    let r = gamma_R(k)?.r as i32;
    let s = exp_sum(Engine::Direct, g, SumRange::up_to(x)?, &Unit)?;
    let envelope = weyl_envelope(g.leading(), x, k, eps)?.value;
    let lhs = s.abs.powi(r);
    Ok(WeylCheck { x, lhs, envelope, ratio: lhs / envelope })
}

/// One grid point of a ratio scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub abs_sum: f64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub envelope: f64,
    #[serde(serialize_with = "crate::report::sig17")]
    pub ratio: f64,
    /// Wall-clock time of the measured sum; not reproducible.
    pub engine_ms: f64,
    pub arc: &'static str,
    pub a: i64,
    pub q: u64,
    /// `Σ_{n≤N} w(n)`.
    #[serde(serialize_with = "crate::report::sig17")]
    pub weight_total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

impl ScanRow {
    /// `|S| / Σ w(n)`.
    pub fn normalized(&self) -> f64 {
        self.abs_sum / self.weight_total
    }
}

/// Scan parameters; `q_max = None` classifies with `Q = ⌊√N⌋`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig {
    pub weight: TheoremWeight,
    pub theta: f64,
    pub eps: f64,
    pub q_max: Option<u64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { weight: TheoremWeight::Tau, theta: 0.5, eps: 0.05, q_max: None }
    }
}

pub const MAJOR_ARC_NOTE: &str = "major arc — theorem hypothesis not targeted";

/// For each `N` of an ascending grid: `|Σ_{n≤N} w(n)e(f(n))|` with the
/// finite-difference engine, the theorem envelope with `q` from the
/// Dirichlet approximation of the leading coefficient at `P = N`, and the
/// arc classification at `(P, Q) = (N, Q)`.
///
/// Rows are measured one after another so that each timing owns the thread
/// pool; the engine itself is parallel.
pub fn ratio_scan(f: &Polynomial, grid: &[u64], cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    let k = f.degree() as u32;
    if k == 0 {
        return Err(Error::InvalidParameter("scan needs a non-constant phase".into()));
    }
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] < 4 {
        return Err(Error::InvalidParameter("grid must be strictly ascending with N >= 4".into()));
    }
    let table = sieve(cfg.weight.kind(), *grid.last().unwrap())?;
    let alpha = f.leading();
    grid.iter()
        .map(|&n| {
            let start = Instant::now();
            let s = exp_sum(Engine::FiniteDifference, f, SumRange::up_to(n)?, &table)?;
            let engine_ms = start.elapsed().as_secs_f64() * 1e3;
            let p = n as f64;
            let approx = dirichlet_approx(alpha, p)?;
            let q_max = cfg.q_max.unwrap_or_else(|| (p.sqrt().floor() as u64).max(1));
            let arc = classify_arc(alpha, p, q_max)?;
            let envelope = theorem_envelope(cfg.weight, p, k, approx.q as f64, cfg.theta, cfg.eps)?;
            let major = matches!(arc.arc, Arc::Major { .. });
            Ok(ScanRow {
                n,
                abs_sum: s.abs,
                envelope,
                ratio: s.abs / envelope,
                engine_ms,
                arc: if major { "major" } else { "minor" },
                a: approx.a,
                q: approx.q,
                weight_total: s.trivial_bound,
                note: major.then_some(MAJOR_ARC_NOTE),
            })
        })
        .collect()
}

pub const SCAN_CSV_HEADER: &str = "N,abs_sum,envelope,ratio,engine_ms,arc,a,q";

/// CSV with the fixed header; floats carry 17 significant digits, except
/// `engine_ms` (microsecond resolution).
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(SCAN_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.3},{},{},{}",
            r.n,
            format_sig17(r.abs_sum),
            format_sig17(r.envelope),
            format_sig17(r.ratio),
            r.engine_ms,
            r.arc,
            r.a,
            r.q
        );
    }
    out
}
