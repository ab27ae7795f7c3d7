use num_bigint::BigUint;
use num_traits::Signed;
use proptest::prelude::*;

use repgrowth::constructor::{make_schedule, precedes};
use repgrowth::dirichlet::{convolve, power_one_plus};
use repgrowth::growth::{m_n, FactorSpec, Flag};
use repgrowth::lie::{model_xi_u64, validate_pair_set};
use repgrowth::rational::rat;
use repgrowth::{
    build_fixed_type, exact_abscissa, Backend, Count, DirichletSeries, Family, GroupSpec, LieType, Multiplicity,
    PairSet,
};

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn series(max_dim: u64) -> impl Strategy<Value = DirichletSeries> {
    proptest::collection::btree_map(2..=max_dim, 1..50u64, 0..8).prop_map(move |m| {
        let entries = std::iter::once((big(1), big(1))).chain(m.into_iter().map(|(d, c)| (big(d), big(c))));
        DirichletSeries::from_exact(big(max_dim), entries).unwrap()
    })
}

fn lie_type() -> impl Strategy<Value = LieType> {
    (0usize..9, 1u32..=8, any::<bool>())
        .prop_filter_map("legal type", |(f, r, tw)| LieType::new(Family::ALL[f], r, tw).ok())
}

fn pair_set() -> impl Strategy<Value = PairSet> {
    proptest::collection::btree_set((0u32..9, 1u32..40), 1..6).prop_map(|s| PairSet::from_pairs(s).unwrap())
}

fn a1_finite() -> impl Strategy<Value = GroupSpec> {
    proptest::collection::vec((prop::sample::select(vec![4u64, 5, 7, 8, 9, 11, 13]), any::<bool>(), 1u64..4), 1..4)
        .prop_map(|fs| {
            let factors = fs
                .into_iter()
                .map(|(q, cover, m)| {
                    let flag = if cover { Flag::Cover } else { Flag::Simple };
                    FactorSpec::new(LieType::a1(), q, flag, Multiplicity::int(m))
                })
                .collect();
            GroupSpec::finite(factors).unwrap()
        })
}

fn exact(c: Count) -> BigUint {
    c.exact().cloned().expect("exact count")
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(128) })]

    #[test]
    fn convolution_commutes_and_associates(a in series(60), b in series(60), c in series(60)) {
        let n = big(60);
        prop_assert_eq!(convolve(&a, &b, &n).unwrap(), convolve(&b, &a, &n).unwrap());
        prop_assert_eq!(
            convolve(&convolve(&a, &b, &n).unwrap(), &c, &n).unwrap(),
            convolve(&a, &convolve(&b, &c, &n).unwrap(), &n).unwrap()
        );
    }

    #[test]
    fn powers_add(base in series(20), m1 in 1u64..40, m2 in 1u64..40) {
        let n = big(80);
        let p = |m: u64| power_one_plus(&base, &Multiplicity::int(m), &n).unwrap();
        prop_assert_eq!(p(m1 + m2), convolve(&p(m1), &p(m2), &n).unwrap());
    }

    #[test]
    fn log_backend_tracks_exact(base in series(12), m in 1u64..=1_000_000) {
        let n = big(50);
        let e = power_one_plus(&base, &Multiplicity::int(m), &n).unwrap();
        let l = power_one_plus(&base.to_backend(Backend::LogDomain).unwrap(), &Multiplicity::int(m), &n).unwrap();
        for (d, lm) in e.ln_entries() {
            prop_assert!(((l.ln_at(&d) - lm).exp() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn pair_order_is_strict_total(set in proptest::collection::btree_set((0u32..9, 1u32..9), 1..10), num in 1i64..50, den in 1i64..12) {
        let rho = rat(num, den);
        let v: Vec<_> = set.into_iter().collect();
        for &a in &v {
            prop_assert!(!precedes(a, a, &rho));
            for &b in &v {
                if a != b {
                    prop_assert!(precedes(a, b, &rho) ^ precedes(b, a, &rho));
                }
                for &c in &v {
                    if precedes(a, b, &rho) && precedes(b, c, &rho) {
                        prop_assert!(precedes(a, c, &rho));
                    }
                }
            }
        }
    }

    #[test]
    fn valid_pair_sets_are_closed_under_union(t in lie_type(), a in pair_set(), b in pair_set()) {
        if validate_pair_set(&a, &t).is_empty() && validate_pair_set(&b, &t).is_empty() {
            prop_assert!(validate_pair_set(&a.union(&b), &t).is_empty());
        }
    }

    #[test]
    fn model_polynomials_add_over_disjoint_sets(a in pair_set(), b in pair_set(), q in 2u64..8) {
        prop_assume!(a.is_disjoint(&b));
        let n = big(10_000);
        let lhs = model_xi_u64(&a.union(&b), q, &n).unwrap();
        let rhs = model_xi_u64(&a, q, &n).unwrap().add(&model_xi_u64(&b, q, &n).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn factor_counts_are_monotone_and_additive(g in a1_finite(), h in a1_finite(), n in 1u64..40) {
        let (n0, n1) = (big(n), big(n + 1));
        prop_assert!(exact(m_n(&g, &n0).unwrap()) <= exact(m_n(&g, &n1).unwrap()));
        prop_assert_eq!(
            exact(m_n(&g.union(&h), &n0).unwrap()),
            exact(m_n(&g, &n0).unwrap()) + exact(m_n(&h, &n0).unwrap())
        );
    }

    #[test]
    fn abscissa_of_union_is_max(t1 in lie_type(), t2 in lie_type(), x in 1i64..60, y in 1i64..60, d in 2u32..7) {
        let g = build_fixed_type(&(t1.rho0() + rat(x, 12)), &t1, 5, None).unwrap();
        let h = build_fixed_type(&(t2.rho0() + rat(y, 12)), &t2, 7, None).unwrap();
        let k = GroupSpec::sl2_primes(d).unwrap();
        for (a, b) in [(&g, &h), (&g, &k), (&h, &k)] {
            let expect = exact_abscissa(a).abscissa.max(exact_abscissa(b).abscissa);
            prop_assert_eq!(exact_abscissa(&a.union(b)).abscissa, expect);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(24) })]

    #[test]
    fn schedules_stay_nonnegative_and_converge(t in lie_type(), num in 1i64..=60, den in 1i64..=12) {
        let rho = t.rho0() + rat(num, den);
        let s = make_schedule(&rho, &t, None).unwrap();
        let (m0, n0) = s.pair();
        let rate = s.rate();
        for j in 1..=10_000u64 {
            let f = s.f_exact(j);
            prop_assert!(f >= 0.into());
            if j >= s.j0() {
                let dev = (repgrowth::Rational::new(f, j.into()) - &rate).abs();
                prop_assert!(dev <= rat((n0 + m0) as i64, j as i64));
            }
        }
    }
}
