//! Quick exactness checks runnable from the binary.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsum_core::arith::sieve;
use wsum_core::diophantine::dirichlet_approx;
use wsum_core::expsum::exp_sum;
use wsum_core::smallfrac::{search_small_frac, verify_hit};
use wsum_core::{coeff_parse, Coefficient, Engine, Frac256, FuncKind, Polynomial, SumRange, Unit};

use crate::commands::{vaughan_identity_failures, Report};
use crate::Failure;

type Check = (&'static str, wsum_core::Result<(bool, String)>);

fn random_polynomial(rng: &mut ChaCha8Rng) -> wsum_core::Result<Polynomial> {
    let degree = rng.gen_range(1..=4);
    let mut coeffs: Vec<Coefficient> = (0..=degree).map(|_| Coefficient::from_frac(0, Frac256::from_limbs(rng.gen()))).collect();
    if coeffs[0].is_zero() {
        coeffs[0] = Coefficient::from_frac(0, Frac256::ULP);
    }
    Polynomial::new(coeffs)
}

fn engines(seed: u64) -> wsum_core::Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = sieve(FuncKind::Tau, 5000)?;
    let mut mismatches = 0;
    for _ in 0..20 {
        let f = random_polynomial(&mut rng)?;
        let start = rng.gen_range(1..1000);
        let range = SumRange::new(start, 5000)?;
        let d = exp_sum(Engine::Direct, &f, range, &tau)?;
        let fd = exp_sum(Engine::FiniteDifference, &f, range, &tau)?;
        mismatches += usize::from(d.value != fd.value);
    }
    Ok((mismatches == 0, format!("20 random phases, {mismatches} bitwise mismatches")))
}

fn vaughan() -> wsum_core::Result<(bool, String)> {
    let uv = [(1.0, 1.0), (10.0, 10.0), (30.0, 45.5), (2001.0, 2001.0)];
    let failures = vaughan_identity_failures(2000, &uv)?;
    Ok((failures == 0, format!("tau and musq, n <= 2000, 4 (U, V) pairs, {failures} mismatches")))
}

fn dirichlet() -> wsum_core::Result<(bool, String)> {
    let r = dirichlet_approx(&coeff_parse("sqrt2")?, 1e4)?;
    Ok(((r.a, r.q) == (8119, 5741), format!("sqrt2 at P = 1e4 -> {}/{}", r.a, r.q)))
}

fn alternating() -> wsum_core::Result<(bool, String)> {
    let f = Polynomial::parse("1/2*x")?;
    let s = exp_sum(Engine::Direct, &f, SumRange::up_to(1000)?, &Unit)?;
    Ok((s.abs < 1e-9, format!("|sum (-1)^n, n <= 1000| = {:e}", s.abs)))
}

fn search() -> wsum_core::Result<(bool, String)> {
    let f = Polynomial::parse("sqrt2*x^2")?;
    let report = search_small_frac(&f, wsum_core::SearchVariant::Composite, 10, 20_000, 0.05, 1000)?;
    let mut bad = 0;
    for h in &report.hits {
        bad += usize::from(!verify_hit(&f, wsum_core::SearchVariant::Composite, 0.05, h)?);
    }
    Ok((bad == 0, format!("{} hits re-verified, {bad} failures", report.hits.len())))
}

pub fn run(seed: u64) -> std::result::Result<Report, Failure> {
    let checks: [Check; 5] = [
        ("engines", engines(seed)),
        ("vaughan", vaughan()),
        ("dirichlet", dirichlet()),
        ("alternating", alternating()),
        ("search", search()),
    ];
    let mut text = String::new();
    let mut ok = true;
    for (name, result) in checks {
        let (pass, detail) = match result {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        ok &= pass;
        let _ = writeln!(text, "{name:<12} {} {detail}", if pass { "PASS" } else { "FAIL" });
    }
    Ok(Report { text, ok })
}
