use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::value::RawValue;

use wsum_core::arith::{sieve, smallest_prime_factors};
use wsum_core::bounds::{ratio_scan, scan_csv, ScanConfig};
use wsum_core::decomposition::{decompose_musq, decompose_tau, VaughanContext};
use wsum_core::diophantine::{classify_arc, continued_fraction, dirichlet_approx};
use wsum_core::expsum::{exp_sum, frac_eval};
use wsum_core::report::{format_sig17, to_json};
use wsum_core::smallfrac::{harman_criterion, in_set_a, search_small_frac, theorem34_pipeline, verify_hit, CriterionPoint};
use wsum_core::{
    coeff_parse, ArcClass, Coefficient, DecompParams, Engine, FuncKind, Hit, Polynomial, RationalApprox, SearchVariant,
    SumRange, TheoremWeight, Unit,
};

use crate::{cache, Cli, Command, EngineArg, FilterArg, Format, Failure, TheoremWeightArg, VariantArg, WeightArg};

/// What a subcommand produced; `ok == false` exits with status 1 after the
/// text is written.
pub struct Report {
    pub text: String,
    pub ok: bool,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, ok: true }
    }
}

type Outcome = std::result::Result<Report, Failure>;

pub fn run(cli: &Cli) -> Outcome {
    let cache = cli.cache.as_deref();
    match &cli.command {
        Command::Sum(a) => sum(a, cache, cli.format.unwrap_or(Format::Json)),
        Command::Decompose(a) => decompose(a),
        Command::Approx(a) => approx(a),
        Command::Scan(a) => scan(a, cli.format.unwrap_or(Format::Csv)),
        Command::Search(a) => search(a, cli.format.unwrap_or(Format::Json)),
        Command::Criterion(a) => criterion(a, cache),
        Command::Verify(a) => verify(a),
        Command::Selftest(a) => crate::selftest::run(a.seed),
    }
}

fn kind(w: WeightArg) -> FuncKind {
    match w {
        WeightArg::One => FuncKind::One,
        WeightArg::Tau => FuncKind::Tau,
        WeightArg::Mu => FuncKind::Mu,
        WeightArg::Musq => FuncKind::MuSq,
        WeightArg::Nu => FuncKind::Nu,
        WeightArg::Tau3 => FuncKind::Tau3,
        WeightArg::Primelog => FuncKind::PrimeLog,
        WeightArg::Omega => FuncKind::Omega,
    }
}

fn variant(v: VariantArg) -> SearchVariant {
    match v {
        VariantArg::Composite => SearchVariant::Composite,
        VariantArg::Squarefree => SearchVariant::SquarefreeOmega2,
    }
}

fn sum(a: &crate::SumArgs, cache: Option<&Path>, format: Format) -> Outcome {
    let f = Polynomial::parse(&a.poly)?;
    if a.h == 0 {
        return Err(Failure::Invalid("h must be positive".into()));
    }
    let f = f.scaled(a.h);
    let range = SumRange::new(a.start, a.n)?;
    let engine = match a.engine {
        EngineArg::Direct => Engine::Direct,
        EngineArg::Diff => Engine::FiniteDifference,
    };
    // Validate the phase before sieving a possibly large table.
    f.check_point(range.end)?;
    let s = if a.weight == WeightArg::One {
        exp_sum(engine, &f, range, &Unit)?
    } else {
        let table = cache::table(cache, kind(a.weight), range.end)?;
        exp_sum(engine, &f, range, &table)?
    };
    Ok(Report::ok(match format {
        Format::Json => to_json(&s) + "\n",
        Format::Csv => format!(
            "start,end,re,im,abs,n_terms,trivial_bound\n{},{},{},{},{},{},{}\n",
            range.start,
            range.end,
            format_sig17(s.value.re),
            format_sig17(s.value.im),
            format_sig17(s.abs),
            s.n_terms,
            format_sig17(s.trivial_bound)
        ),
    }))
}

fn decompose(a: &crate::DecompArgs) -> Outcome {
    let f = Polynomial::parse(&a.poly)?;
    let params = match (a.u, a.v) {
        (Some(u), Some(v)) if a.relaxed => DecompParams::relaxed(a.n, u, v)?,
        (Some(u), Some(v)) => DecompParams::new(a.n, u, v)?,
        _ => DecompParams::from_theta(a.n, a.theta)?,
    };
    let report = match a.weight {
        TheoremWeightArg::Tau => decompose_tau(&f, params)?,
        TheoremWeightArg::Musq => decompose_musq(&f, params)?,
    };
    Ok(Report::ok(to_json(&report) + "\n"))
}

#[derive(Serialize)]
struct CfOut {
    quotients: Vec<Box<RawValue>>,
    convergents: Vec<[Box<RawValue>; 2]>,
    terminated: bool,
    precision_exhausted: bool,
}

#[derive(Serialize)]
struct ApproxOut {
    #[serde(flatten)]
    approx: RationalApprox,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<ArcClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    continued_fraction: Option<CfOut>,
}

fn big(x: &impl ToString) -> Box<RawValue> {
    RawValue::from_string(x.to_string()).expect("integers are valid JSON")
}

fn approx(a: &crate::ApproxArgs) -> Outcome {
    let alpha: Coefficient = coeff_parse(&a.alpha)?;
    let approx = dirichlet_approx(&alpha, a.p)?;
    let classification = a.q.map(|q| classify_arc(&alpha, a.p, q)).transpose()?;
    let continued_fraction = a
        .terms
        .map(|t| continued_fraction(&alpha, t))
        .transpose()?
        .map(|cf| CfOut {
            quotients: cf.quotients.iter().map(big).collect(),
            convergents: cf.convergents.iter().map(|(p, q)| [big(p), big(q)]).collect(),
            terminated: cf.terminated,
            precision_exhausted: cf.precision_exhausted,
        });
    Ok(Report::ok(to_json(&ApproxOut { approx, classification, continued_fraction }) + "\n"))
}

/// `"a,b,c"` or `"2^i..2^j"` (every power of two in between).
pub fn parse_grid(s: &str) -> std::result::Result<Vec<u64>, String> {
    if let Some((lo, hi)) = s.split_once("..") {
        let exp = |t: &str| -> std::result::Result<u32, String> {
            t.trim()
                .strip_prefix("2^")
                .and_then(|e| e.parse().ok())
                .filter(|&e: &u32| e < 64)
                .ok_or_else(|| format!("range endpoints must look like 2^k, got {t:?}"))
        };
        let (lo, hi) = (exp(lo)?, exp(hi)?);
        if lo > hi {
            return Err(format!("empty grid {s:?}"));
        }
        return Ok((lo..=hi).map(|e| 1u64 << e).collect());
    }
    s.split(',').map(|t| crate::parse_count(t.trim())).collect()
}

fn scan(a: &crate::ScanArgs, format: Format) -> Outcome {
    let f = Polynomial::parse(&a.poly)?;
    let grid = parse_grid(&a.grid).map_err(Failure::Invalid)?;
    let cfg = ScanConfig {
        weight: match a.weight {
            TheoremWeightArg::Tau => TheoremWeight::Tau,
            TheoremWeightArg::Musq => TheoremWeight::MuSq,
        },
        theta: a.theta,
        eps: a.eps,
        q_max: a.q,
    };
    let mut rows = ratio_scan(&f, &grid, &cfg)?;
    if !a.timing {
        for r in &mut rows {
            r.engine_ms = 0.0;
        }
    }
    Ok(Report::ok(match format {
        Format::Csv => scan_csv(&rows),
        Format::Json => rows.iter().map(|r| to_json(r) + "\n").collect(),
    }))
}

fn search(a: &crate::SearchArgs, format: Format) -> Outcome {
    let f = Polynomial::parse(&a.poly)?;
    let report = search_small_frac(&f, variant(a.variant), a.start, a.n, a.eps, a.cap)?;
    eprintln!(
        "search: {} qualifying n in [{}, {}], {} written{}",
        report.total,
        report.start,
        report.end,
        report.hits.len(),
        if report.truncated { " (truncated at --cap)" } else { "" }
    );
    let mut out = String::new();
    if format == Format::Csv {
        out.push_str("n,dist,threshold,tau,omega,squarefree\n");
    }
    for h in &report.hits {
        match format {
            Format::Json => out.push_str(&(to_json(h) + "\n")),
            Format::Csv => {
                let _ = writeln!(out, "{},{:e},{:e},{},{},{}", h.n, h.dist, h.threshold, h.tau, h.omega, h.squarefree);
            }
        }
    }
    Ok(Report::ok(out))
}

fn criterion(a: &crate::CriterionArgs, cache: Option<&Path>) -> Outcome {
    let f = Polynomial::parse(&a.poly)?;
    if a.pipeline {
        let report = theorem34_pipeline(&f, a.n, a.eps, a.cap)?;
        return Ok(Report::ok(to_json(&report) + "\n"));
    }
    let range = SumRange::new(a.start, a.n)?;
    f.check_point(range.end)?;
    let weights = cache::table(cache, kind(a.weight), range.end)?;
    let tau = match a.filter {
        FilterArg::TauGt2 => Some(cache::table(cache, FuncKind::Tau, range.end)?),
        _ => None,
    };
    let spf = match a.filter {
        FilterArg::InA => Some(smallest_prime_factors(range.end)?),
        _ => None,
    };
    let mut points = Vec::new();
    for n in range.start..=range.end {
        let keep = match a.filter {
            FilterArg::None => true,
            FilterArg::TauGt2 => tau.as_ref().is_some_and(|t| t.int(n) > 2),
            FilterArg::InA => spf.as_deref().is_some_and(|s| in_set_a(n, range.end, s)),
        };
        if keep {
            points.push(CriterionPoint { n, g: weights.get(n), alpha: frac_eval(&f, n)? });
        }
    }
    let report = harman_criterion(&points, a.h)?;
    Ok(Report::ok(to_json(&report) + "\n"))
}

#[derive(Serialize)]
struct VerifyOut {
    checked: usize,
    passed: usize,
    failed: Vec<u64>,
}

fn verify(a: &crate::VerifyArgs) -> Outcome {
    let f = Polynomial::parse(&a.poly)?;
    let text = std::fs::read_to_string(&a.input)?;
    let mut out = VerifyOut { checked: 0, passed: 0, failed: Vec::new() };
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let hit: Hit = serde_json::from_str(line)
            .map_err(|e| Failure::Invalid(format!("{}:{}: {e}", a.input.display(), i + 1)))?;
        out.checked += 1;
        if verify_hit(&f, variant(a.variant), a.eps, &hit)? {
            out.passed += 1;
        } else {
            out.failed.push(hit.n);
        }
    }
    let ok = out.failed.is_empty();
    Ok(Report { text: to_json(&out) + "\n", ok })
}

/// Identity check used by `selftest`: the Vaughan terms recombine to `a(n)`.
pub fn vaughan_identity_failures(n_max: u64, uv: &[(f64, f64)]) -> wsum_core::Result<usize> {
    let one = sieve(FuncKind::One, n_max)?;
    let tau = sieve(FuncKind::Tau, n_max)?;
    let musq = sieve(FuncKind::MuSq, n_max)?;
    let nu = sieve(FuncKind::Nu, n_max)?;
    let cases = [(VaughanContext::new(&tau, &one, &one)?, &tau), (VaughanContext::new(&musq, &one, &nu)?, &musq)];
    let mut failures = 0;
    for (ctx, a) in &cases {
        for n in 1..=n_max {
            for &(u, v) in uv {
                if ctx.terms(n, u, v)?.combined() != a.int(n) {
                    failures += 1;
                }
            }
        }
    }
    Ok(failures)
}
