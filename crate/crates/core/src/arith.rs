//! Sieved arithmetic functions and exact Dirichlet algebra.
//!
//! Tables are indexed by `n` directly: slot 0 is an unused zero so that
//! `values[n]` is the value at `n` for `1 <= n <= n_max`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_integer::Roots;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Which arithmetic function a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FuncKind {
    /// The constant function `1(n) = 1`.
    One,
    /// Number of divisors.
    Tau,
    /// Möbius function.
    Mu,
    /// Squarefree indicator.
    MuSq,
    /// `μ(√n)` on perfect squares, zero elsewhere.
    Nu,
    /// `1 * 1 * 1`.
    Tau3,
    /// `log p` at primes, zero elsewhere. The only table with float values.
    PrimeLog,
    /// Number of distinct prime factors.
    Omega,
    /// Output of Dirichlet algebra or user-provided values.
    Custom,
}

impl FuncKind {
    fn code(self) -> u64 {
        match self {
            FuncKind::One => 0,
            FuncKind::Tau => 1,
            FuncKind::Mu => 2,
            FuncKind::MuSq => 3,
            FuncKind::Nu => 4,
            FuncKind::Tau3 => 5,
            FuncKind::PrimeLog => 6,
            FuncKind::Omega => 7,
            FuncKind::Custom => 8,
        }
    }

    fn from_code(code: u64) -> Option<Self> {
        Some(match code {
            0 => FuncKind::One,
            1 => FuncKind::Tau,
            2 => FuncKind::Mu,
            3 => FuncKind::MuSq,
            4 => FuncKind::Nu,
            5 => FuncKind::Tau3,
            6 => FuncKind::PrimeLog,
            7 => FuncKind::Omega,
            8 => FuncKind::Custom,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            FuncKind::One => "one",
            FuncKind::Tau => "tau",
            FuncKind::Mu => "mu",
            FuncKind::MuSq => "musq",
            FuncKind::Nu => "nu",
            FuncKind::Tau3 => "tau3",
            FuncKind::PrimeLog => "primelog",
            FuncKind::Omega => "omega",
            FuncKind::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum TableValues {
    Int(Vec<i64>),
    Real(Vec<f64>),
}

/// An arithmetic function tabulated on `[1, n_max]`. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct FuncTable {
    kind: FuncKind,
    n_max: u64,
    values: TableValues,
}

impl FuncTable {
    /// Builds an integer table from `values[0..n_max]` holding `f(1)..=f(n_max)`.
    pub fn from_values(kind: FuncKind, values: &[i64]) -> Self {
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(0);
        v.extend_from_slice(values);
        FuncTable {
            kind,
            n_max: values.len() as u64,
            values: TableValues::Int(v),
        }
    }

    /// The identity of the Dirichlet ring: 1 at `n = 1`, 0 elsewhere.
    pub fn identity(n_max: u64) -> Self {
        let mut v = vec![0i64; n_max as usize + 1];
        if n_max >= 1 {
            v[1] = 1;
        }
        FuncTable {
            kind: FuncKind::Custom,
            n_max,
            values: TableValues::Int(v),
        }
    }

    pub fn kind(&self) -> FuncKind {
        self.kind
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.values, TableValues::Int(_))
    }

    /// Integer values indexed by `n` (slot 0 unused). `None` for `PrimeLog`.
    pub fn ints(&self) -> Option<&[i64]> {
        match &self.values {
            TableValues::Int(v) => Some(v),
            TableValues::Real(_) => None,
        }
    }

    pub fn reals(&self) -> Option<&[f64]> {
        match &self.values {
            TableValues::Real(v) => Some(v),
            TableValues::Int(_) => None,
        }
    }

    /// Integer value at `n`.
    ///
    /// # Panics
    /// If `n` is out of range or the table holds floats.
    #[inline]
    pub fn int(&self, n: u64) -> i64 {
        match &self.values {
            TableValues::Int(v) => v[n as usize],
            TableValues::Real(_) => panic!("{} table has no integer values", self.kind.name()),
        }
    }

    /// Value at `n` as a float, whatever the storage.
    #[inline]
    pub fn get(&self, n: u64) -> f64 {
        match &self.values {
            TableValues::Int(v) => v[n as usize] as f64,
            TableValues::Real(v) => v[n as usize],
        }
    }

    fn int_vec(&self) -> Result<&Vec<i64>> {
        match &self.values {
            TableValues::Int(v) => Ok(v),
            TableValues::Real(_) => Err(Error::InvalidParameter(format!(
                "{} table is not integer-valued",
                self.kind.name()
            ))),
        }
    }

    /// Writes the binary cache format: three little-endian `u64` header words
    /// (magic, kind code, `n_max`) followed by `n_max` little-endian 8-byte
    /// values (`i64`, or `f64` bits for `PrimeLog`).
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&TABLE_MAGIC.to_le_bytes())?;
        w.write_all(&self.kind.code().to_le_bytes())?;
        w.write_all(&self.n_max.to_le_bytes())?;
        match &self.values {
            TableValues::Int(v) => {
                for x in &v[1..] {
                    w.write_all(&x.to_le_bytes())?;
                }
            }
            TableValues::Real(v) => {
                for x in &v[1..] {
                    w.write_all(&x.to_bits().to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<u64> {
            r.read_exact(&mut word)
                .map_err(|e| Error::Format(format!("truncated table: {e}")))?;
            Ok(u64::from_le_bytes(word))
        };
        if next(r)? != TABLE_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let kind = FuncKind::from_code(next(r)?).ok_or_else(|| Error::Format("unknown kind".into()))?;
        let n_max = next(r)?;
        if n_max > DEFAULT_MAX_VALUES * 16 {
            return Err(Error::Format(format!("implausible n_max {n_max}")));
        }
        let mut ints = vec![0i64; n_max as usize + 1];
        for slot in ints.iter_mut().skip(1) {
            *slot = next(r)? as i64;
        }
        let values = if kind == FuncKind::PrimeLog {
            TableValues::Real(ints.into_iter().map(|x| f64::from_bits(x as u64)).collect())
        } else {
            TableValues::Int(ints)
        };
        Ok(FuncTable { kind, n_max, values })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        FuncTable::read_from(&mut r)
    }
}

const TABLE_MAGIC: u64 = u64::from_le_bytes(*b"WSUMTBL1");

/// Default ceiling on table length.
pub const DEFAULT_MAX_VALUES: u64 = 100_000_000;

/// Limits and granularity for sieving.
#[derive(Clone, Copy, Debug)]
pub struct SieveConfig {
    /// Largest `n_max` accepted.
    pub max_values: u64,
    /// Segment length; each segment is factored independently.
    pub segment_len: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            max_values: DEFAULT_MAX_VALUES,
            segment_len: 1 << 16,
        }
    }
}

/// Sieves `kind` on `[1, n_max]` with the default configuration.
pub fn sieve(kind: FuncKind, n_max: u64) -> Result<FuncTable> {
    sieve_with(kind, n_max, &SieveConfig::default())
}

pub fn sieve_with(kind: FuncKind, n_max: u64, cfg: &SieveConfig) -> Result<FuncTable> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    if n_max > cfg.max_values {
        return Err(Error::Budget(format!(
            "table of {n_max} values exceeds the configured cap of {}",
            cfg.max_values
        )));
    }
    let len = n_max as usize + 1;
    let values = match kind {
        FuncKind::Custom => {
            return Err(Error::InvalidParameter("custom tables cannot be sieved".into()));
        }
        FuncKind::One => {
            let mut v = vec![1i64; len];
            v[0] = 0;
            TableValues::Int(v)
        }
        FuncKind::Nu => {
            let root = n_max.sqrt();
            let mu = sieve_with(FuncKind::Mu, root, cfg)?;
            let mut v = vec![0i64; len];
            for s in 1..=root {
                v[(s * s) as usize] = mu.int(s);
            }
            TableValues::Int(v)
        }
        FuncKind::PrimeLog => {
            let mut v = vec![0f64; len];
            let base = primes_up_to(n_max.sqrt());
            v[1..].par_chunks_mut(cfg.segment_len).enumerate().for_each(|(i, out)| {
                let lo = 1 + (i * cfg.segment_len) as u64;
                let seg = factor_segment(lo, out.len(), &base);
                for (j, slot) in out.iter_mut().enumerate() {
                    if seg.tau[j] == 2 {
                        *slot = ((lo + j as u64) as f64).ln();
                    }
                }
            });
            TableValues::Real(v)
        }
        _ => {
            let mut v = vec![0i64; len];
            let base = primes_up_to(n_max.sqrt());
            v[1..].par_chunks_mut(cfg.segment_len).enumerate().for_each(|(i, out)| {
                let lo = 1 + (i * cfg.segment_len) as u64;
                let seg = factor_segment(lo, out.len(), &base);
                for (j, slot) in out.iter_mut().enumerate() {
                    *slot = match kind {
                        FuncKind::Tau => seg.tau[j],
                        FuncKind::Tau3 => seg.tau3[j],
                        FuncKind::Mu => seg.mu[j] as i64,
                        FuncKind::MuSq => (seg.mu[j] as i64).abs(),
                        FuncKind::Omega => seg.omega[j] as i64,
                        _ => unreachable!(),
                    };
                }
            });
            TableValues::Int(v)
        }
    };
    Ok(FuncTable { kind, n_max, values })
}

/// `log p` at primes up to `n_max`, zero elsewhere.
pub fn primes_with_logs(n_max: u64) -> Result<FuncTable> {
    if n_max < 2 {
        return Err(Error::InvalidParameter("prime table needs n_max >= 2".into()));
    }
    sieve(FuncKind::PrimeLog, n_max)
}

struct SegmentFactors {
    tau: Vec<i64>,
    tau3: Vec<i64>,
    mu: Vec<i8>,
    omega: Vec<u8>,
}

/// Factors every integer in `[lo, lo + len)` using the base primes up to the
/// square root of the segment end; whatever remains above one is a single
/// large prime factor.
fn factor_segment(lo: u64, len: usize, base: &[u64]) -> SegmentFactors {
    let hi = lo + len as u64 - 1;
    let mut rem: Vec<u64> = (lo..=hi).collect();
    let mut tau = vec![1i64; len];
    let mut tau3 = vec![1i64; len];
    let mut mu = vec![1i8; len];
    let mut omega = vec![0u8; len];
    for &p in base {
        if p * p > hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            let i = (m - lo) as usize;
            let mut e = 0i64;
            while rem[i] % p == 0 {
                rem[i] /= p;
                e += 1;
            }
            tau[i] *= e + 1;
            tau3[i] *= (e + 1) * (e + 2) / 2;
            mu[i] = if e >= 2 { 0 } else { -mu[i] };
            omega[i] += 1;
            m += p;
        }
    }
    for i in 0..len {
        if rem[i] > 1 {
            tau[i] *= 2;
            tau3[i] *= 3;
            mu[i] = -mu[i];
            omega[i] += 1;
        }
    }
    SegmentFactors { tau, tau3, mu, omega }
}

/// All primes `p <= limit`, by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Smallest prime factor of every `n <= n_max` (linear sieve); `spf[1] = 1`.
pub fn smallest_prime_factors(n_max: u64) -> Result<Vec<u32>> {
    if n_max > u32::MAX as u64 || n_max > DEFAULT_MAX_VALUES {
        return Err(Error::Budget(format!("spf table of {n_max} entries")));
    }
    let n = n_max as usize;
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    if n >= 1 {
        spf[1] = 1;
    }
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let m = i * p as usize;
            if p > spf[i] || m > n {
                break;
            }
            spf[m] = p;
        }
    }
    Ok(spf)
}

/// `P(z)`, the product of the primes below `z`, kept as its prime list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Primorial {
    z: u64,
    primes: Vec<u64>,
}

impl Primorial {
    pub fn new(z: u64) -> Self {
        let primes = primes_up_to(z.saturating_sub(1));
        Primorial { z, primes }
    }

    pub fn z(&self) -> u64 {
        self.z
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `gcd(n, P(z)) > 1`, i.e. `n` has a prime factor below `z`.
    pub fn shares_factor(&self, n: u64) -> bool {
        let m = n;
        for &p in &self.primes {
            if p * p > m {
                break;
            }
            if m % p == 0 {
                return true;
            }
        }
        // `m` is now 1 or a prime.
        m > 1 && m < self.z
    }
}

/// Dirichlet convolution `(f * g)(n) = Σ_{d|n} f(d) g(n/d)`, exact.
pub fn dirichlet_convolve(f: &FuncTable, g: &FuncTable) -> Result<FuncTable> {
    if f.n_max != g.n_max {
        return Err(Error::LengthMismatch {
            left: f.n_max,
            right: g.n_max,
        });
    }
    let a = f.int_vec()?;
    let b = g.int_vec()?;
    let n = f.n_max as usize;
    let mut out = vec![0i64; n + 1];
    for d in 1..=n {
        let fd = a[d];
        if fd == 0 {
            continue;
        }
        for m in 1..=n / d {
            let term = fd.checked_mul(b[m]).ok_or(Error::Overflow)?;
            out[d * m] = out[d * m].checked_add(term).ok_or(Error::Overflow)?;
        }
    }
    Ok(FuncTable {
        kind: FuncKind::Custom,
        n_max: f.n_max,
        values: TableValues::Int(out),
    })
}

/// Dirichlet inverse of a unit (`f(1) = ±1`), by the recursion
/// `f⁻¹(n) = -f(1)⁻¹ Σ_{d|n, d<n} f(n/d) f⁻¹(d)`.
pub fn dirichlet_inverse(f: &FuncTable) -> Result<FuncTable> {
    let a = f.int_vec()?;
    let n = f.n_max as usize;
    let unit = a[1];
    if unit != 1 && unit != -1 {
        return Err(Error::NotUnit(unit));
    }
    let mut inv = vec![0i64; n + 1];
    // acc[m] collects Σ f(m/d) f⁻¹(d) over the divisors d < m seen so far.
    let mut acc = vec![0i64; n + 1];
    for d in 1..=n {
        inv[d] = if d == 1 {
            unit
        } else {
            acc[d].checked_mul(-unit).ok_or(Error::Overflow)?
        };
        if inv[d] == 0 {
            continue;
        }
        for m in 2..=n / d {
            let term = a[m].checked_mul(inv[d]).ok_or(Error::Overflow)?;
            acc[d * m] = acc[d * m].checked_add(term).ok_or(Error::Overflow)?;
        }
    }
    Ok(FuncTable {
        kind: FuncKind::Custom,
        n_max: f.n_max,
        values: TableValues::Int(inv),
    })
}

/// Number of distinct prime factors, number of divisors and squarefreeness of
/// `n` by trial division. Used to re-verify results independently of the sieves.
pub fn trial_factor(n: u64) -> TrialFactors {
    let mut m = n;
    let mut omega = 0u32;
    let mut tau = 1u64;
    let mut squarefree = true;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            omega += 1;
            tau *= e + 1;
            squarefree &= e == 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        omega += 1;
        tau *= 2;
    }
    TrialFactors { omega, tau, squarefree }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialFactors {
    pub omega: u32,
    pub tau: u64,
    pub squarefree: bool,
}
