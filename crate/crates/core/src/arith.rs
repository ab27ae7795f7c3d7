//! Small number-theoretic helpers shared by the table and growth modules.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Decomposes `q` as `p^k` with `p` prime, by trial division.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = smallest_prime_factor(q);
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 2;
    }
    n
}

/// Primes in `[lo, hi]` by a plain sieve of Eratosthenes.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let hi = hi as usize;
    let mut composite = vec![false; hi + 1];
    let mut out = Vec::new();
    for n in 2..=hi {
        if composite[n] {
            continue;
        }
        if n as u64 >= lo {
            out.push(n as u64);
        }
        let mut m = n * n;
        while m <= hi {
            composite[m] = true;
            m += n;
        }
    }
    out
}

/// Natural logarithm of an arbitrary-precision integer; `-inf` for zero.
pub fn big_ln(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn big_pow(base: u64, exp: u64) -> BigUint {
    num_traits::pow::pow(BigUint::from(base), exp as usize)
}

/// Binomial coefficient `C(n, k)` for arbitrary-precision `n` and small `k`.
pub fn binomial(n: &BigUint, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    let mut i = 0u64;
    while i < k {
        let i_big = BigUint::from(i);
        if &i_big >= n {
            return BigUint::zero();
        }
        acc *= n - &i_big;
        acc /= BigUint::from(i + 1);
        i += 1;
    }
    acc
}

/// Numerically stable `ln(exp(a) + exp(b))`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Kahan-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Integer square root rounded up.
pub fn ceil_sqrt(n: &BigUint) -> BigUint {
    let r = n.sqrt();
    if &(&r * &r) == n {
        r
    } else {
        r + 1u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(4), Some((2, 2)));
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(97), Some((97, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(5u64.pow(20)), Some((5, 20)));
    }

    #[test]
    fn sieve_matches_trial_division() {
        let sieved = primes_between(5, 200);
        let trial: Vec<u64> = (5..=200).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, trial);
    }

    #[test]
    fn big_ln_is_continuous_across_the_shift_threshold() {
        let x = big_pow(3, 700);
        assert!((big_ln(&x) - 700.0 * 3f64.ln()).abs() < 1e-9);
        let y = big_pow(2, 5000);
        assert!((big_ln(&y) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(&BigUint::from(5u32), 2), BigUint::from(10u32));
        assert_eq!(binomial(&BigUint::from(3u32), 5), BigUint::zero());
        assert_eq!(binomial(&BigUint::from(7u32), 0), BigUint::one());
    }

    #[test]
    fn log_add_exp_matches_direct() {
        let v = log_add_exp(2f64.ln(), 3f64.ln());
        assert!((v - 5f64.ln()).abs() < 1e-15);
    }
}
