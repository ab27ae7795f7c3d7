//! Library values against independent brute-force computations.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use repgrowth::dirichlet::convolve;
use repgrowth::lie::{model_xi_u64, Family, LieType, PairSet};
use repgrowth::{Backend, DegreeTable, DirichletSeries, Multiplicity};

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn entries(s: &DirichletSeries) -> BTreeMap<u64, u64> {
    s.exact_entries()
        .unwrap()
        .iter()
        .map(|(d, m)| (d.to_u64().unwrap(), m.to_u64().unwrap()))
        .collect()
}

type Mat = [u32; 4];

fn mat_mul(a: &Mat, b: &Mat, p: u32) -> Mat {
    [
        (a[0] * b[0] + a[1] * b[2]) % p,
        (a[0] * b[1] + a[1] * b[3]) % p,
        (a[2] * b[0] + a[3] * b[2]) % p,
        (a[2] * b[1] + a[3] * b[3]) % p,
    ]
}

/// Number of conjugacy classes of `SL2(p)`, by explicit enumeration.
fn sl2_class_number(p: u32) -> usize {
    let elems: Vec<Mat> = (0..p.pow(4))
        .map(|i| [i % p, (i / p) % p, (i / p / p) % p, i / p / p / p])
        .filter(|m| (m[0] * m[3] + p * p - m[1] * m[2] % p) % p == 1)
        .collect();
    let inv = |m: &Mat| [m[3], (p - m[1]) % p, (p - m[2]) % p, m[0]];
    let mut seen = std::collections::HashSet::new();
    let mut classes = 0;
    for x in &elems {
        if seen.contains(x) {
            continue;
        }
        classes += 1;
        for g in &elems {
            seen.insert(mat_mul(&mat_mul(g, x, p), &inv(g), p));
        }
    }
    classes
}

#[test]
fn sl2_5_class_number_and_evaluations() {
    let t = DegreeTable::sl2(5).unwrap();
    let s = t.zeta_series(&big(120)).unwrap();
    assert_eq!(sl2_class_number(5), 9);
    assert_eq!(t.character_count(), 9);
    assert!((s.evaluate(0.0).unwrap() - 9.0).abs() < 1e-12);
    // 1 + 2/2 + 2/3 + 2/4 + 1/5 + 1/6
    assert!((s.evaluate(1.0).unwrap() - 53.0 / 15.0).abs() < 1e-12);
    assert_eq!(entries(&s), BTreeMap::from([(1, 1), (2, 2), (3, 2), (4, 2), (5, 1), (6, 1)]));
    assert_eq!(sl2_class_number(7), DegreeTable::sl2(7).unwrap().character_count() as usize);
}

/// Class number of `A5` from even permutations of five points.
#[test]
fn a5_class_number() {
    let mut perms = Vec::new();
    for i in 0..3125u32 {
        let p: Vec<u32> = (0..5).map(|k| (i / 5u32.pow(k)) % 5).collect();
        let mut sorted = p.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() == 5 {
            let inv = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).filter(|&(a, b)| p[a] > p[b]).count();
            if inv % 2 == 0 {
                perms.push(p);
            }
        }
    }
    assert_eq!(perms.len(), 60);
    let compose = |a: &Vec<u32>, b: &Vec<u32>| -> Vec<u32> { b.iter().map(|&x| a[x as usize]).collect() };
    let inverse = |a: &Vec<u32>| {
        let mut r = vec![0; 5];
        for (i, &x) in a.iter().enumerate() {
            r[x as usize] = i as u32;
        }
        r
    };
    let mut seen = std::collections::HashSet::new();
    let mut classes = 0;
    for x in &perms {
        if seen.insert(x.clone()) {
            classes += 1;
            for g in &perms {
                seen.insert(compose(&compose(g, x), &inverse(g)));
            }
        }
    }
    let t = DegreeTable::psl2(5).unwrap();
    assert_eq!(classes, 5);
    assert_eq!(t.character_count(), 5);
    assert_eq!(entries(&t.zeta_series(&big(60)).unwrap()), BTreeMap::from([(1, 1), (3, 2), (4, 1), (5, 1)]));
    assert_eq!(t.zeta_series(&big(3)).unwrap().cumulative(&big(3)).unwrap().exact().unwrap(), &big(3));
}

#[test]
fn sl2_5_times_a5_by_pair_enumeration() {
    let sl: [u64; 9] = [1, 2, 2, 3, 3, 4, 4, 5, 6];
    let a5: [u64; 5] = [1, 3, 3, 4, 5];
    let mut expect = BTreeMap::new();
    for x in sl {
        for y in a5 {
            if x * y <= 10 {
                *expect.entry(x * y).or_insert(0u64) += 1;
            }
        }
    }
    let n = big(10);
    let a = DegreeTable::sl2(5).unwrap().zeta_series(&n).unwrap();
    let b = DegreeTable::psl2(5).unwrap().zeta_series(&n).unwrap();
    assert_eq!(entries(&convolve(&a, &b, &n).unwrap()), expect);
}

#[test]
fn big_power_in_both_backends() {
    let n = big(4);
    let base = DirichletSeries::from_exact(n.clone(), [(big(1), big(1)), (big(2), big(1))]).unwrap();
    let m = Multiplicity::power(5, 10);
    let exact = repgrowth::dirichlet::power_one_plus(&base, &m, &n).unwrap();
    let log = repgrowth::dirichlet::power_one_plus(&base.to_backend(Backend::LogDomain).unwrap(), &m, &n).unwrap();
    let m_f = 5f64.powi(10);
    assert!((log.ln_at(&big(2)) - 10.0 * 5f64.ln()).abs() < 1e-9);
    assert!((log.ln_at(&big(4)) - (m_f * (m_f - 1.0) / 2.0).ln()).abs() < 1e-9);
    for (d, l) in exact.ln_entries() {
        assert!((log.ln_at(&d) - l).abs() < 1e-9, "dimension {d}");
    }
}

/// Positive roots from explicit coordinates.
#[test]
fn positive_roots_by_enumeration() {
    // A2 in the plane x1 + x2 + x3 = 0: e_i - e_j with i < j
    let a2 = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).count();
    // D4: vectors with two entries ±1 and the rest 0; positive when the
    // first nonzero entry is
    let mut d4 = 0;
    for v in 0..81u32 {
        let c: Vec<i32> = (0..4).map(|k| (v / 3u32.pow(k) % 3) as i32 - 1).collect();
        if c.iter().filter(|&&x| x != 0).count() == 2 && c.iter().find(|&&x| x != 0) == Some(&1) {
            d4 += 1;
        }
    }
    assert_eq!(LieType::untwisted(Family::A, 2).unwrap().positive_root_count() as usize, a2);
    assert_eq!(LieType::untwisted(Family::D, 4).unwrap().positive_root_count(), d4);
}

#[test]
fn model_polynomials_termwise() {
    let a = PairSet::from_pairs([(1, 1), (0, 2)]).unwrap();
    let s = model_xi_u64(&a, 3, &big(100)).unwrap();
    assert_eq!(entries(&s), BTreeMap::from([(3, 3), (9, 1)]));
    let s = model_xi_u64(&PairSet::from_pairs([(1, 1)]).unwrap(), 5, &big(10)).unwrap();
    assert_eq!(entries(&s), BTreeMap::from([(5, 5)]));
}
