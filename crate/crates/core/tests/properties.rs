use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::One;
use proptest::prelude::*;

use wsum_core::arith::{sieve, FuncKind};
use wsum_core::decomposition::{dyadic_blocks, VaughanContext};
use wsum_core::diophantine::{classify_arc, dirichlet_approx};
use wsum_core::expsum::{exp_sum, Engine, Polynomial, SumRange};
use wsum_core::fixedpoint::CoeffSource;
use wsum_core::{Coefficient, Frac256, NamedConstant, Unit};

fn frac() -> impl Strategy<Value = Frac256> {
    any::<[u64; 4]>().prop_map(Frac256::from_limbs)
}

/// A rational `p/q`, an integer multiple of a named constant, or raw bits.
fn coefficient() -> impl Strategy<Value = Coefficient> {
    prop_oneof![
        (-50i64..50, 1i64..60).prop_map(|(p, q)| Coefficient::from_ratio(BigInt::from(p), BigInt::from(q), CoeffSource::Derived).unwrap()),
        (1u64..20, 0usize..4).prop_map(|(m, c)| {
            let c = [NamedConstant::Sqrt2, NamedConstant::Golden, NamedConstant::Pi, NamedConstant::E][c];
            Coefficient::named(c).scale(m)
        }),
        frac().prop_map(|x| Coefficient::from_frac(0, x)),
    ]
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(coefficient(), 2..=5)
        .prop_filter("non-zero leading coefficient", |c| !c[0].is_zero())
        .prop_map(|c| Polynomial::new(c).unwrap())
}

fn to_big(x: Frac256) -> BigUint {
    x.to_biguint()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn frac_addition_is_a_group(a in frac(), b in frac(), c in frac()) {
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a + (-a), Frac256::ZERO);
        prop_assert_eq!(a - b, a + (-b));
    }

    #[test]
    fn frac_mul_matches_bigint(a in frac(), b in frac(), m in any::<u64>()) {
        let modulus = BigUint::one() << 256u32;
        prop_assert_eq!(to_big(a.mul_u64(m)), (to_big(a) * BigUint::from(m)) % &modulus);
        prop_assert_eq!((a + b).mul_u64(m), a.mul_u64(m) + b.mul_u64(m));
        let half = m >> 1;
        prop_assert_eq!(a.mul_i64(-(half as i64)), -a.mul_u64(half));
    }

    #[test]
    fn q_fold_rational_deficit(p in 0u64..1_000_000, q in 1u64..1_000_000) {
        let x = Frac256::from_ratio(&BigInt::from(p), &BigInt::from(q));
        let deficit = ((BigUint::from(p) << 256u32) % BigUint::from(q)).to_u64_digits().first().copied().unwrap_or(0);
        prop_assert_eq!(x.mul_u64(q), -Frac256::ULP.mul_u64(deficit));
    }

    #[test]
    fn distance_is_symmetric_and_bounded(a in frac()) {
        let d = wsum_core::nearest_int_distance(a);
        prop_assert!((0.0..=0.5).contains(&d));
        prop_assert_eq!(d, wsum_core::nearest_int_distance(-a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn engines_agree_bitwise(f in polynomial(), start in 1u64..1000, len in 1u64..3000) {
        let range = SumRange::new(start, start + len).unwrap();
        let tau = sieve(FuncKind::Tau, start + len).unwrap();
        let d = exp_sum(Engine::Direct, &f, range, &tau).unwrap();
        let fd = exp_sum(Engine::FiniteDifference, &f, range, &tau).unwrap();
        prop_assert_eq!(d.value, fd.value);
    }

    #[test]
    fn sums_are_additive(f in polynomial(), a in 1u64..500, b in 0u64..500, c in 0u64..500) {
        let mid = a + b;
        let end = mid + 1 + c;
        let whole = exp_sum(Engine::FiniteDifference, &f, SumRange::new(a, end).unwrap(), &Unit).unwrap();
        let left = exp_sum(Engine::FiniteDifference, &f, SumRange::new(a, mid).unwrap(), &Unit).unwrap();
        let right = exp_sum(Engine::FiniteDifference, &f, SumRange::new(mid + 1, end).unwrap(), &Unit).unwrap();
        prop_assert!((whole.value - left.value - right.value).norm() <= 1e-9 * whole.trivial_bound);
    }

    #[test]
    fn negating_the_phase_conjugates(f in polynomial(), n in 1u64..3000) {
        let range = SumRange::up_to(n).unwrap();
        let s = exp_sum(Engine::FiniteDifference, &f, range, &Unit).unwrap();
        let t = exp_sum(Engine::FiniteDifference, &f.negated(), range, &Unit).unwrap();
        prop_assert!((s.value.conj() - t.value).norm() <= 1e-9 * n as f64);
    }

    #[test]
    fn rational_phases_are_periodic(a in 1i64..20, b in -20i64..20, q in 1i64..40) {
        let coeff = |p: i64| Coefficient::from_ratio(BigInt::from(p), BigInt::from(q), CoeffSource::Derived).unwrap();
        let f = Polynomial::new(vec![coeff(a), coeff(b), Coefficient::zero()]).unwrap();
        let q = q as u64;
        let first = exp_sum(Engine::Direct, &f, SumRange::new(1, q).unwrap(), &Unit).unwrap();
        let second = exp_sum(Engine::Direct, &f, SumRange::new(q + 1, 2 * q).unwrap(), &Unit).unwrap();
        prop_assert!((first.value - second.value).norm() < 1e-9);
    }

    #[test]
    fn dirichlet_guarantee(x in frac(), p_exp in 0u32..18) {
        let alpha = Coefficient::from_frac(0, x);
        let p = 10f64.powf(p_exp as f64 / 3.0).round();
        let r = dirichlet_approx(&alpha, p).unwrap();
        prop_assert!(r.q >= 1 && r.q as f64 <= p);
        prop_assert_eq!(num_integer::gcd(r.a.unsigned_abs(), r.q), 1);
        // |qα − a| ≤ 1/P, checked on exact integers.
        let num = BigInt::from(x.to_biguint());
        let dev: BigInt = BigInt::from(r.q) * &num - (BigInt::from(r.a) << 256usize);
        let dev = dev.magnitude().clone();
        prop_assert!(BigUint::from(p as u64) * &dev <= BigUint::one() << 256u32);
        prop_assert!(r.err <= 1.0 / (r.q as f64 * p) * (1.0 + 1e-12));
    }

    #[test]
    fn arcs_ignore_integer_shifts(x in frac(), shift in -100i64..100, q_max in 1u64..100) {
        let a = Coefficient::from_frac(0, x);
        let b = Coefficient::from_frac(shift, x);
        let p = (q_max * 4) as f64;
        prop_assert_eq!(classify_arc(&a, p, q_max).unwrap().arc, classify_arc(&b, p, q_max).unwrap().arc);
    }

    #[test]
    fn dyadic_blocks_partition(a in 1u64..1_000_000, len in 0u64..1_000_000) {
        let b = a + len;
        let blocks = dyadic_blocks(a, b).unwrap();
        prop_assert_eq!(blocks.first().unwrap().lo, a);
        prop_assert_eq!(blocks.last().unwrap().hi, b);
        for w in blocks.windows(2) {
            prop_assert_eq!(w[0].hi + 1, w[1].lo);
        }
        for blk in &blocks {
            let level = 63 - blk.lo.leading_zeros();
            prop_assert_eq!(63 - blk.hi.leading_zeros(), level);
        }
        let bound = ((b as f64) / (a as f64)).log2().ceil() as usize + 1;
        prop_assert!(blocks.len() <= bound);
    }
}

#[test]
fn vaughan_identity_random_points() {
    use rand::{Rng, SeedableRng};
    let n_max = 600;
    let one = sieve(FuncKind::One, n_max).unwrap();
    let tau = sieve(FuncKind::Tau, n_max).unwrap();
    let musq = sieve(FuncKind::MuSq, n_max).unwrap();
    let nu = sieve(FuncKind::Nu, n_max).unwrap();
    let cases = [(VaughanContext::new(&tau, &one, &one).unwrap(), &tau), (VaughanContext::new(&musq, &one, &nu).unwrap(), &musq)];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3000 {
        let n = rng.gen_range(1..=n_max);
        let u = rng.gen_range(1.0..=n as f64 + 1.0);
        let v = rng.gen_range(1.0..=n as f64 + 1.0);
        for (ctx, a) in &cases {
            assert_eq!(ctx.terms(n, u, v).unwrap().combined(), a.int(n), "n={n} U={u} V={v}");
        }
    }
}

#[test]
fn zero_sum_identity() {
    let f = Polynomial::parse("1/2*x").unwrap();
    let s = exp_sum(Engine::Direct, &f, SumRange::up_to(1000).unwrap(), &Unit).unwrap();
    assert!((s.value - Complex64::new(0.0, 0.0)).norm() < 1e-9);
}
