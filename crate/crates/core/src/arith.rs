//! Exact integer arithmetic: factorization and the multiplicative functions
//! built on it (phi, mu, d, the primitive-character count, and the divisor
//! sum behind the orthogonality identity).

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

/// A positive integer together with its ordered prime-power decomposition.
///
/// Invariants: primes strictly increase, every listed prime is prime, the
/// product of `prime^exponent` reconstructs `n`, and the list is empty
/// exactly for `n = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Distinct prime divisors in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// All divisors of `n`, each with its own factorization. Ascending by value.
    pub fn divisors(&self) -> Vec<Factorization> {
        let mut out = vec![Factorization { n: 1, factors: vec![] }];
        for &(p, e) in &self.factors {
            let prev = std::mem::take(&mut out);
            for d in prev {
                let mut pk = 1u64;
                for k in 0..=e {
                    let mut f = d.clone();
                    if k > 0 {
                        f.n *= pk;
                        f.factors.push((p, k));
                    }
                    out.push(f);
                    if k < e {
                        pk *= p;
                    }
                }
            }
        }
        out.sort_by_key(|f| f.n);
        out
    }
}

/// Factor `n` by trial division, with a deterministic Miller-Rabin test to
/// stop early once the remaining cofactor is prime.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::domain("factorize(0): argument must be positive"));
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut push = |p: u64, m: &mut u64| {
        let mut e = 0u32;
        while *m % p == 0 {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut m);
    push(3, &mut m);
    let mut d = 5u64;
    while m > 1 {
        if is_prime(m) {
            factors.push((m, 1));
            break;
        }
        while m % d != 0 && d.saturating_mul(d) <= m {
            // 5, 7, 11, 13, ... skipping multiples of 2 and 3
            d += if d % 6 == 5 { 2 } else { 4 };
        }
        push(d, &mut m);
    }
    Ok(Factorization { n, factors })
}

/// Deterministic Miller-Rabin for u64 (the 12 smallest prime bases cover the
/// full 64-bit range).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Euler's totient.
pub fn euler_phi(f: &Factorization) -> u64 {
    f.factors()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Moebius function: 0 on non-squarefree, else (-1)^(number of primes).
pub fn moebius(f: &Factorization) -> i64 {
    if f.factors().iter().any(|&(_, e)| e >= 2) {
        0
    } else if f.factors().len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of distinct prime factors.
pub fn omega(f: &Factorization) -> u32 {
    f.factors().len() as u32
}

/// Number of divisors.
pub fn divisor_count(f: &Factorization) -> u64 {
    f.factors().iter().map(|&(_, e)| (e + 1) as u64).product()
}

/// Number of primitive characters mod q, via the convolution
/// `sum over d | q of mu(d) phi(q/d)`.
pub fn phi_star(q: &Factorization) -> u64 {
    let divisors = q.divisors();
    let mut total = 0i64;
    for d in &divisors {
        let mu = moebius(d);
        if mu == 0 {
            continue;
        }
        let cofactor = factorization_quotient(q, d);
        total += mu * euler_phi(&cofactor) as i64;
    }
    debug_assert!(total >= 0);
    total as u64
}

/// `sum over k | gcd(q, r) of phi(k) mu(q/k)`, with `gcd(q, 0) = q`.
///
/// Equals the sum of `chi(m) conj(chi(n))` over primitive chi mod q whenever
/// `r = m - n` and `gcd(mn, q) = 1`; in particular it is `phi_star(q)` at
/// `r = 0`.
pub fn orth_divisor_sum(q: &Factorization, r: i64) -> i64 {
    let g = if r == 0 { q.n() } else { gcd(q.n(), r.unsigned_abs()) };
    let mut total = 0i64;
    for k in q.divisors() {
        if g % k.n() != 0 {
            continue;
        }
        let quotient = factorization_quotient(q, &k);
        let mu = moebius(&quotient);
        if mu == 0 {
            continue;
        }
        total += euler_phi(&k) as i64 * mu;
    }
    total
}

/// Factorization of `q/d` for a divisor `d` of `q`, assembled from exponents.
fn factorization_quotient(q: &Factorization, d: &Factorization) -> Factorization {
    let mut factors = Vec::with_capacity(q.factors().len());
    let mut n = 1u64;
    for &(p, e) in q.factors() {
        let ed = d
            .factors()
            .iter()
            .find(|&&(pd, _)| pd == p)
            .map_or(0, |&(_, ed)| ed);
        debug_assert!(ed <= e);
        if e - ed > 0 {
            factors.push((p, e - ed));
            n *= p.pow(e - ed);
        }
    }
    Factorization { n, factors }
}

/// The Euler product `prod over p | q of (1 - 1/p)^3 / (1 + 1/p)` appearing
/// in the fourth-moment main term. Exact rational arithmetic, converted to
/// floating point once at the end; 1 for q = 1.
pub fn fourth_moment_euler_product(q: &Factorization) -> f64 {
    let mut ratio = BigRational::one();
    for p in q.primes() {
        let p = BigInt::from(p);
        // (1 - 1/p)^3 / (1 + 1/p) = (p - 1)^3 / (p^2 (p + 1))
        let num = (&p - 1u32) * (&p - 1u32) * (&p - 1u32);
        let den = (&p * &p) * (&p + 1u32);
        ratio *= BigRational::new(num, den);
    }
    ratio.to_f64().expect("finite rational")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fz(n: u64) -> Factorization {
        factorize(n).unwrap()
    }

    /// Trial-division oracle, independent of the main path's Miller-Rabin
    /// shortcut.
    fn trial_division_factors(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2u64;
        while d * d <= n {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            if e > 0 {
                out.push((d, e));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn factorize_rejects_zero() {
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(fz(1).factors(), &[]);
        assert_eq!(fz(12).factors(), &[(2, 2), (3, 1)]);
        assert_eq!(fz(97).factors(), trial_division_factors(97).as_slice());
    }

    #[test]
    fn factorization_invariants_up_to_5000() {
        for n in 1..=5000u64 {
            let f = fz(n);
            assert_eq!(f.factors(), trial_division_factors(n).as_slice(), "n={n}");
            let product: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(product, n);
            for w in f.factors().windows(2) {
                assert!(w[0].0 < w[1].0);
            }
        }
    }

    #[test]
    fn factorize_large_semiprime() {
        // 1e9+7 and 1e9+9 are both prime.
        let n = 1_000_000_007u64 * 1_000_000_009;
        let f = factorize(n).unwrap();
        assert_eq!(f.factors(), &[(1_000_000_007, 1), (1_000_000_009, 1)]);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(&fz(1)), 1);
        assert_eq!(euler_phi(&fz(97)), 96);
        // brute count of units mod 12
        let brute = (1..=12).filter(|&k| gcd(k, 12) == 1).count() as u64;
        assert_eq!(euler_phi(&fz(12)), brute);
        assert_eq!(brute, 4);
    }

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(&fz(1)), 1);
        assert_eq!(moebius(&fz(12)), 0);
        assert_eq!(moebius(&fz(6)), 1);
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(&fz(1)), 0);
        assert_eq!(omega(&fz(12)), 2);
        assert_eq!(omega(&fz(30)), 3);
    }

    #[test]
    fn divisor_count_examples() {
        assert_eq!(divisor_count(&fz(1)), 1);
        assert_eq!(divisor_count(&fz(97)), 2);
        // divisor enumeration oracle
        let enumerated = (1..=12).filter(|d| 12 % d == 0).count() as u64;
        assert_eq!(divisor_count(&fz(12)), enumerated);
        assert_eq!(enumerated, 6);
    }

    #[test]
    fn phi_star_examples() {
        assert_eq!(phi_star(&fz(1)), 1);
        assert_eq!(phi_star(&fz(2)), 0);
        // phi(8) - phi(4) = 4 - 2
        assert_eq!(phi_star(&fz(8)), 2);
        assert_eq!(phi_star(&fz(5)), 3);
    }

    #[test]
    fn orth_divisor_sum_examples() {
        assert_eq!(orth_divisor_sum(&fz(5), 0), 3);
        assert_eq!(orth_divisor_sum(&fz(5), 1), -1);
        assert_eq!(orth_divisor_sum(&fz(12), 4), -1);
    }

    #[test]
    fn euler_product_examples() {
        assert_eq!(fourth_moment_euler_product(&fz(1)), 1.0);
        assert!((fourth_moment_euler_product(&fz(3)) - 2.0 / 9.0).abs() < 1e-16);
        assert!((fourth_moment_euler_product(&fz(6)) - 1.0 / 54.0).abs() < 1e-16);
    }

    #[test]
    fn multiplicative_on_coprime_arguments() {
        for m in 1..=200u64 {
            for n in 1..=200u64 {
                if gcd(m, n) != 1 {
                    continue;
                }
                let (fm, fn_, fmn) = (fz(m), fz(n), fz(m * n));
                assert_eq!(euler_phi(&fmn), euler_phi(&fm) * euler_phi(&fn_));
                assert_eq!(moebius(&fmn), moebius(&fm) * moebius(&fn_));
                assert_eq!(divisor_count(&fmn), divisor_count(&fm) * divisor_count(&fn_));
                assert_eq!(phi_star(&fmn), phi_star(&fm) * phi_star(&fn_));
                assert_eq!(omega(&fmn), omega(&fm) + omega(&fn_));
            }
        }
    }

    #[test]
    fn phi_divisor_sum_is_identity() {
        for n in 1..=10_000u64 {
            let f = fz(n);
            let total: u64 = f.divisors().iter().map(euler_phi).sum();
            assert_eq!(total, n, "sum of phi over divisors of {n}");
        }
    }

    #[test]
    fn moebius_divisor_sum_detects_one() {
        for n in 1..=10_000u64 {
            let f = fz(n);
            let total: i64 = f.divisors().iter().map(moebius).sum();
            assert_eq!(total, i64::from(n == 1), "sum of mu over divisors of {n}");
        }
    }

    #[test]
    fn phi_star_vanishes_exactly_at_2_mod_4() {
        for q in 1..=10_000u64 {
            let f = fz(q);
            let star = phi_star(&f);
            if q % 4 == 2 {
                assert_eq!(star, 0, "q={q}");
            } else {
                assert!(star > 0, "q={q}");
            }
        }
    }

    #[test]
    fn orth_divisor_sum_at_zero_is_phi_star() {
        for q in 1..=500u64 {
            let f = fz(q);
            assert_eq!(orth_divisor_sum(&f, 0), phi_star(&f) as i64, "q={q}");
        }
    }

    proptest! {
        #[test]
        fn orth_divisor_sum_depends_only_on_gcd(q in 1u64..400, r1 in -2000i64..2000, k in 1i64..50) {
            let f = fz(q);
            // r2 = r1 + multiple of q has the same gcd with q
            let r2 = r1 + k * q as i64;
            prop_assert_eq!(orth_divisor_sum(&f, r1), orth_divisor_sum(&f, r2));
            // and any r with the same gcd gives the same value
            let g1 = if r1 == 0 { q } else { gcd(q, r1.unsigned_abs()) };
            let r3 = g1 as i64;
            prop_assert_eq!(orth_divisor_sum(&f, r1), orth_divisor_sum(&f, r3));
        }

        #[test]
        fn is_prime_matches_trial_division(n in 0u64..100_000) {
            let trial = n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
            prop_assert_eq!(is_prime(n), trial);
        }
    }
}
