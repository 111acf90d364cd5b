//! Dense tables of arithmetic functions and exact Dirichlet algebra.
//!
//! One smallest-prime-factor sieve ([`SpfSieve`]) backs mu, omega and the
//! von Mangoldt function; tau_k comes from repeated convolution with the
//! constant-one function. All integer values are exact `i64` with checked
//! arithmetic; overflow is reported, never wrapped.

use crate::error::{Error, Result};

/// Dense exact-integer tabulation of an arithmetic function on `1..=limit`.
///
/// Index 0 is a sentinel and never carries a value. Tables are immutable
/// after construction and safe to share across threads for reading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FnTable {
    values: Vec<i64>,
}

fn alloc<T: Clone + Default>(len: usize, what: &str) -> Result<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len)
        .map_err(|_| Error::Resource(format!("cannot allocate {what} of {len} entries")))?;
    v.resize(len, T::default());
    Ok(v)
}

fn table_len(limit: u64) -> Result<usize> {
    if limit == 0 {
        return Err(Error::Argument("table limit must be >= 1".into()));
    }
    usize::try_from(limit + 1)
        .map_err(|_| Error::Resource(format!("table limit {limit} exceeds address space")))
}

impl FnTable {
    /// Tabulates `f(n)` for `n = 1..=limit`.
    pub fn from_fn(limit: u64, mut f: impl FnMut(u64) -> i64) -> Result<FnTable> {
        let mut values = alloc(table_len(limit)?, "function table")?;
        for n in 1..=limit {
            values[n as usize] = f(n);
        }
        Ok(FnTable { values })
    }

    /// The constant function `n -> v`.
    pub fn constant(limit: u64, v: i64) -> Result<FnTable> {
        Self::from_fn(limit, |_| v)
    }

    /// The constant-one function.
    pub fn one(limit: u64) -> Result<FnTable> {
        Self::constant(limit, 1)
    }

    /// The convolution identity: eps(1) = 1, eps(n > 1) = 0.
    pub fn epsilon(limit: u64) -> Result<FnTable> {
        Self::from_fn(limit, |n| i64::from(n == 1))
    }

    /// The identity function `n -> n`.
    pub fn identity(limit: u64) -> Result<FnTable> {
        if limit > i64::MAX as u64 {
            return Err(Error::Overflow(format!("identity table limit {limit}")));
        }
        Self::from_fn(limit, |n| n as i64)
    }

    pub fn limit(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    /// Value at `n`; panics outside `1..=limit` (range is a caller contract).
    #[inline]
    pub fn get(&self, n: u64) -> i64 {
        debug_assert!(n >= 1, "FnTable is 1-based");
        self.values[n as usize]
    }

    /// Raw 1-based slice of length `limit + 1`; entry 0 is a sentinel.
    #[inline]
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Copy of the first `new_limit` entries.
    pub fn truncated(&self, new_limit: u64) -> Result<FnTable> {
        if new_limit == 0 || new_limit > self.limit() {
            return Err(Error::Argument(format!(
                "cannot truncate table of limit {} to {}",
                self.limit(),
                new_limit
            )));
        }
        Ok(FnTable {
            values: self.values[..=(new_limit as usize)].to_vec(),
        })
    }
}

/// Dense float tabulation on `1..=limit` (used for the von Mangoldt function).
#[derive(Debug, Clone, PartialEq)]
pub struct FloatTable {
    values: Vec<f64>,
}

impl FloatTable {
    pub fn limit(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    #[inline]
    pub fn get(&self, n: u64) -> f64 {
        debug_assert!(n >= 1, "FloatTable is 1-based");
        self.values[n as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A truncated series evaluation: the partial sum together with the
/// truncation point, an integral-comparison bound on the omitted tail and
/// a convergence heuristic verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSeries {
    pub value: f64,
    pub truncation_point: u64,
    pub tail_bound: f64,
    /// False when the partial sums at N/2 and N differ by more than the
    /// claimed tail bound allows.
    pub converged: bool,
}

/// Smallest-prime-factor sieve; one O(N) precomputation serves mu, omega
/// and the von Mangoldt function. Memory is ~4 bytes per entry plus the
/// prime list.
#[derive(Debug, Clone)]
pub struct SpfSieve {
    spf: Vec<u32>,
    primes: Vec<u64>,
}

impl SpfSieve {
    pub fn new(limit: u64) -> Result<SpfSieve> {
        if limit > u32::MAX as u64 {
            return Err(Error::Resource(format!(
                "sieve limit {limit} exceeds the u32 smallest-prime-factor range"
            )));
        }
        let len = table_len(limit)?;
        let mut spf: Vec<u32> = alloc(len, "smallest-prime-factor sieve")?;
        let mut primes = Vec::new();
        for i in 2..=limit {
            if spf[i as usize] == 0 {
                spf[i as usize] = i as u32;
                primes.push(i);
            }
            for &p in &primes {
                if p > spf[i as usize] as u64 || p > limit / i {
                    break;
                }
                spf[(p * i) as usize] = p as u32;
            }
        }
        Ok(SpfSieve { spf, primes })
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Moebius function mu(1..=limit); mu(n) = 0 iff n is not squarefree.
    pub fn mobius(&self) -> Result<FnTable> {
        let n = self.limit();
        let mut mu = alloc::<i64>(table_len(n)?, "mu table")?;
        mu[1] = 1;
        for i in 2..=n as usize {
            let p = self.spf[i] as usize;
            let m = i / p;
            mu[i] = if m % p == 0 { 0 } else { -mu[m] };
        }
        Ok(FnTable { values: mu })
    }

    /// Number of distinct prime divisors omega(1..=limit); omega(1) = 0.
    pub fn omega(&self) -> Result<FnTable> {
        let n = self.limit();
        let mut om = alloc::<i64>(table_len(n)?, "omega table")?;
        for i in 2..=n as usize {
            let p = self.spf[i] as usize;
            let m = i / p;
            om[i] = om[m] + i64::from(m % p != 0);
        }
        Ok(FnTable { values: om })
    }

    /// Von Mangoldt function: log p at prime powers p^a, 0 elsewhere.
    pub fn von_mangoldt(&self) -> Result<FloatTable> {
        let n = self.limit();
        let len = table_len(n)?;
        let mut lam = alloc::<f64>(len, "von Mangoldt table")?;
        // is_pp[m]: m is a positive power of its smallest prime factor
        let mut is_pp = alloc::<bool>(len, "prime-power flags")?;
        for i in 2..=n as usize {
            let p = self.spf[i] as usize;
            let m = i / p;
            if m == 1 || (is_pp[m] && self.spf[m] as usize == p) {
                is_pp[i] = true;
                lam[i] = (p as f64).ln();
            }
        }
        Ok(FloatTable { values: lam })
    }
}

/// mu(1..=limit) via a shared smallest-prime-factor sieve.
pub fn sieve_mobius(limit: u64) -> Result<FnTable> {
    SpfSieve::new(limit)?.mobius()
}

/// omega(1..=limit) via a shared smallest-prime-factor sieve.
pub fn sieve_omega(limit: u64) -> Result<FnTable> {
    SpfSieve::new(limit)?.omega()
}

/// Von Mangoldt Lambda(1..=limit) as floats.
pub fn sieve_von_mangoldt(limit: u64) -> Result<FloatTable> {
    SpfSieve::new(limit)?.von_mangoldt()
}

/// tau_k(1..=limit): the number of ordered factorizations into k parts.
/// tau_1 = 1; each further level is one divisor-harmonic pass, so the cost
/// is O(k N log N).
pub fn sieve_tau_k(limit: u64, k: u32) -> Result<FnTable> {
    if k < 1 {
        return Err(Error::Argument("tau_k requires k >= 1".into()));
    }
    let mut cur = FnTable::one(limit)?;
    for level in 2..=k {
        cur = convolve_with_one(&cur, level)?;
    }
    Ok(cur)
}

fn convolve_with_one(f: &FnTable, level: u32) -> Result<FnTable> {
    let n = f.limit();
    let mut out = alloc::<i64>(table_len(n)?, "tau_k level")?;
    let fv = f.values();
    for d in 1..=n as usize {
        let x = fv[d];
        if x == 0 {
            continue;
        }
        let mut m = d;
        while m <= n as usize {
            out[m] = out[m].checked_add(x).ok_or_else(|| {
                Error::Overflow(format!("tau_k overflow at n={m}, k={level}"))
            })?;
            m += d;
        }
    }
    Ok(FnTable { values: out })
}

/// Dirichlet convolution `(f*g)(n) = sum_{d|n} f(d) g(n/d)` on `1..=N`,
/// computed by the double loop over d and its multiples in O(N log N).
pub fn dirichlet_convolve(f: &FnTable, g: &FnTable) -> Result<FnTable> {
    let n = f.limit();
    if g.limit() != n {
        return Err(Error::Argument(format!(
            "convolution requires equal limits, got {} and {}",
            n,
            g.limit()
        )));
    }
    let mut out = alloc::<i64>(table_len(n)?, "convolution table")?;
    let fv = f.values();
    let gv = g.values();
    for d in 1..=n as usize {
        let x = fv[d];
        if x == 0 {
            continue;
        }
        for q in 1..=(n as usize / d) {
            let m = d * q;
            let term = x
                .checked_mul(gv[q])
                .and_then(|t| out[m].checked_add(t))
                .ok_or_else(|| Error::Overflow(format!("convolution overflow at n={m}")))?;
            out[m] = term;
        }
    }
    Ok(FnTable { values: out })
}

/// Dirichlet inverse of `f`, restricted to f(1) in {-1, +1} so the result
/// stays integral. Uses the forward recursion
/// `f_inv(n) = -f(1) * sum_{d|n, d<n} f_inv(d) f(n/d)`.
pub fn dirichlet_inverse(f: &FnTable) -> Result<FnTable> {
    let f1 = f.get(1);
    if f1 != 1 && f1 != -1 {
        return Err(Error::Domain(format!(
            "Dirichlet inverse requires f(1) in {{-1, +1}}, got {f1}"
        )));
    }
    let n = f.limit();
    let mut inv = alloc::<i64>(table_len(n)?, "inverse table")?;
    let mut acc = alloc::<i64>(table_len(n)?, "inverse accumulator")?;
    let fv = f.values();
    for m in 1..=n as usize {
        inv[m] = if m == 1 {
            f1
        } else {
            (-f1)
                .checked_mul(acc[m])
                .ok_or_else(|| Error::Overflow(format!("Dirichlet inverse overflow at n={m}")))?
        };
        let x = inv[m];
        if x == 0 {
            continue;
        }
        // propagate inv(m) f(q) to every proper multiple m*q
        for q in 2..=(n as usize / m) {
            let t = m * q;
            acc[t] = x
                .checked_mul(fv[q])
                .and_then(|v| acc[t].checked_add(v))
                .ok_or_else(|| Error::Overflow(format!("Dirichlet inverse overflow at n={t}")))?;
        }
    }
    Ok(FnTable { values: inv })
}

/// Recovers `f = mu * F`, so that `F = f * 1`.
pub fn mobius_invert(cap_f: &FnTable) -> Result<FnTable> {
    let mu = sieve_mobius(cap_f.limit())?;
    dirichlet_convolve(&mu, cap_f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorize(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                let mut a = 0;
                while n % p == 0 {
                    n /= p;
                    a += 1;
                }
                out.push((p, a));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    fn mobius_oracle(n: u64) -> i64 {
        let fac = factorize(n);
        if fac.iter().any(|&(_, a)| a > 1) {
            0
        } else if fac.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn mobius_spot_values() {
        let mu = sieve_mobius(30).unwrap();
        assert_eq!(mu.get(1), 1);
        assert_eq!(mu.get(4), 0);
        assert_eq!(mu.get(6), 1);
        assert_eq!(mu.get(10), 1);
        let mertens30: i64 = (1..=30).map(|n| mu.get(n)).sum();
        assert_eq!(mertens30, -3);
    }

    #[test]
    fn mobius_limit_one() {
        let mu = sieve_mobius(1).unwrap();
        assert_eq!(mu.limit(), 1);
        assert_eq!(mu.get(1), 1);
    }

    #[test]
    fn mobius_matches_trial_division() {
        let n = 10_000;
        let mu = sieve_mobius(n).unwrap();
        for m in 1..=n {
            assert_eq!(mu.get(m), mobius_oracle(m), "mu({m})");
        }
        // sum of |mu| counts the squarefree integers
        let squarefree = (1..=n).filter(|&m| mobius_oracle(m) != 0).count() as i64;
        let abs_sum: i64 = (1..=n).map(|m| mu.get(m).abs()).sum();
        assert_eq!(abs_sum, squarefree);
    }

    #[test]
    fn omega_spot_values() {
        let om = sieve_omega(100).unwrap();
        assert_eq!(om.get(1), 0);
        assert_eq!(om.get(12), 2);
        assert_eq!(om.get(30), 3);
        for n in 1..=100 {
            assert_eq!(om.get(n), factorize(n).len() as i64, "omega({n})");
        }
    }

    #[test]
    fn von_mangoldt_spot_values() {
        let lam = sieve_von_mangoldt(100).unwrap();
        assert_eq!(lam.get(1), 0.0);
        assert!((lam.get(8) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(lam.get(12), 0.0);
        assert!((lam.get(49) - 7f64.ln()).abs() < 1e-15);
        for n in 2..=100u64 {
            let fac = factorize(n);
            let expected = if fac.len() == 1 { (fac[0].0 as f64).ln() } else { 0.0 };
            assert!((lam.get(n) - expected).abs() < 1e-15, "Lambda({n})");
        }
    }

    #[test]
    fn tau_k_spot_values() {
        let t1 = sieve_tau_k(20, 1).unwrap();
        assert!((1..=20).all(|n| t1.get(n) == 1));
        let t2 = sieve_tau_k(100, 2).unwrap();
        assert_eq!(t2.get(1), 1);
        assert_eq!(t2.get(6), 4);
        // divisor-count oracle
        for n in 1..=100u64 {
            let d = (1..=n).filter(|d| n % d == 0).count() as i64;
            assert_eq!(t2.get(n), d, "tau({n})");
        }
        let t3 = sieve_tau_k(10, 3).unwrap();
        assert_eq!(t3.get(1), 1);
        assert_eq!(t3.get(4), 6); // (1,1,4) x3 and (1,2,2) x3
    }

    #[test]
    fn tau_k_equals_iterated_convolution() {
        let n = 10_000;
        let one = FnTable::one(n).unwrap();
        let mut conv = one.clone();
        for k in 2..=4u32 {
            conv = dirichlet_convolve(&conv, &one).unwrap();
            let sieved = sieve_tau_k(n, k).unwrap();
            assert_eq!(conv, sieved, "tau_{k}");
        }
    }

    #[test]
    fn convolve_mu_tau_is_one() {
        let mu = sieve_mobius(1000).unwrap();
        let tau = sieve_tau_k(1000, 2).unwrap();
        let conv = dirichlet_convolve(&mu, &tau).unwrap();
        assert_eq!(conv, FnTable::one(1000).unwrap());
    }

    #[test]
    fn convolve_epsilon_is_identity_element() {
        let tau = sieve_tau_k(200, 2).unwrap();
        let eps = FnTable::epsilon(200).unwrap();
        assert_eq!(dirichlet_convolve(&tau, &eps).unwrap(), tau);
        assert_eq!(dirichlet_convolve(&eps, &tau).unwrap(), tau);
    }

    #[test]
    fn convolve_limit_mismatch() {
        let a = FnTable::one(10).unwrap();
        let b = FnTable::one(11).unwrap();
        assert!(matches!(
            dirichlet_convolve(&a, &b),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn convolve_overflow_detected() {
        let big = FnTable::constant(4, i64::MAX / 2).unwrap();
        assert!(matches!(
            dirichlet_convolve(&big, &big),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn inverse_of_one_is_mobius() {
        let inv = dirichlet_inverse(&FnTable::one(1000).unwrap()).unwrap();
        assert_eq!(inv, sieve_mobius(1000).unwrap());
    }

    #[test]
    fn inverse_of_epsilon_is_epsilon() {
        let eps = FnTable::epsilon(50).unwrap();
        assert_eq!(dirichlet_inverse(&eps).unwrap(), eps);
    }

    #[test]
    fn inverse_of_tau_is_mu_convolved_mu() {
        let n = 1000;
        let tau = sieve_tau_k(n, 2).unwrap();
        let mu = sieve_mobius(n).unwrap();
        let mumu = dirichlet_convolve(&mu, &mu).unwrap();
        assert_eq!(dirichlet_inverse(&tau).unwrap(), mumu);
        assert_eq!(
            dirichlet_convolve(&tau, &mumu).unwrap(),
            FnTable::epsilon(n).unwrap()
        );
    }

    #[test]
    fn inverse_requires_unit_leading_value() {
        let t = FnTable::constant(10, 2).unwrap();
        assert!(matches!(dirichlet_inverse(&t), Err(Error::Domain(_))));
    }

    #[test]
    fn mobius_invert_examples() {
        let n = 1000;
        let tau = sieve_tau_k(n, 2).unwrap();
        assert_eq!(mobius_invert(&tau).unwrap(), FnTable::one(n).unwrap());

        let eps = FnTable::epsilon(n).unwrap();
        assert_eq!(mobius_invert(&eps).unwrap(), sieve_mobius(n).unwrap());

        // F = Id gives Euler's totient
        let id = FnTable::identity(n).unwrap();
        let phi = mobius_invert(&id).unwrap();
        let totient = |m: u64| -> i64 {
            let mut out = m;
            for (p, _) in factorize(m) {
                out = out / p * (p - 1);
            }
            out as i64
        };
        for m in 1..=n {
            assert_eq!(phi.get(m), totient(m), "phi({m})");
        }
    }

    #[test]
    fn mobius_invert_round_trip() {
        // (mu * F) * 1 = F for arbitrary integer tables
        let n = 300;
        let f = FnTable::from_fn(n, |m| ((m * 7919) % 23) as i64 - 11).unwrap();
        let g = mobius_invert(&f).unwrap();
        let back = dirichlet_convolve(&g, &FnTable::one(n).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn small_table(limit: u64) -> impl Strategy<Value = FnTable> {
            proptest::collection::vec(-4i64..=4, limit as usize)
                .prop_map(move |v| FnTable::from_fn(limit, |n| v[(n - 1) as usize]).unwrap())
        }

        fn unit_table(limit: u64) -> impl Strategy<Value = FnTable> {
            (small_table(limit), proptest::bool::ANY).prop_map(|(mut t, neg)| {
                t.values[1] = if neg { -1 } else { 1 };
                t
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn convolution_is_associative(
                f in small_table(60),
                g in small_table(60),
                h in small_table(60),
            ) {
                let lhs = dirichlet_convolve(&dirichlet_convolve(&f, &g).unwrap(), &h).unwrap();
                let rhs = dirichlet_convolve(&f, &dirichlet_convolve(&g, &h).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn inverse_is_two_sided(f in unit_table(48)) {
                let inv = dirichlet_inverse(&f).unwrap();
                let eps = FnTable::epsilon(48).unwrap();
                prop_assert_eq!(dirichlet_convolve(&f, &inv).unwrap(), eps.clone());
                prop_assert_eq!(dirichlet_convolve(&inv, &f).unwrap(), eps);
            }

            #[test]
            fn mobius_inversion_round_trips(f in small_table(80)) {
                let g = mobius_invert(&f).unwrap();
                let back = dirichlet_convolve(&g, &FnTable::one(80).unwrap()).unwrap();
                prop_assert_eq!(back, f);
            }
        }
    }
}
