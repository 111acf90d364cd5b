//! The three tuple-counting quantities over k-tuples with product <= x:
//! gcd-weighted sums `A_k(x) = sum F(gcd(x_1..x_k))`, coprime-tuple counts
//! `B_k(x)` and pairwise-coprime counts `S_k(x)`.
//!
//! Each has a fast path (Moebius inversion over k-th-power dilations, or a
//! k^omega sieve for S_k) and a brute-force enumerator used as an oracle.
//! The enumerators keep private state only; all operations are pure given
//! immutable tables, so disjoint queries may run in parallel.

use std::collections::HashMap;

use crate::arith::{mobius_invert, sieve_mobius, sieve_tau_k, FnTable};
use crate::error::{Error, Result};
use crate::summatory::{gen_convolve, nth_root_floor, TkSummatory};

/// Hard cap on brute-force tuple enumeration.
const BRUTE_TUPLE_GUARD: i64 = 100_000_000;
/// Arguments past this are rejected before even sizing the enumeration.
const BRUTE_X_CAP: u64 = 1_000_000_000;

/// Which quantity a query asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Gcd-weighted tuple sum A_k.
    A,
    /// Coprime-tuple count B_k (overall gcd 1).
    B,
    /// Pairwise-coprime tuple count S_k.
    S,
    /// Divisor summatory T_k.
    T,
}

/// Weight function F for kind A.
#[derive(Debug, Clone)]
pub enum Weight {
    Tau,
    One,
    Id,
    Custom(FnTable),
}

impl Weight {
    /// Tabulates the weight on `1..=limit`.
    pub fn table(&self, limit: u64) -> Result<FnTable> {
        match self {
            Weight::Tau => sieve_tau_k(limit, 2),
            Weight::One => FnTable::one(limit),
            Weight::Id => FnTable::identity(limit),
            Weight::Custom(t) => {
                if t.limit() < limit {
                    Err(Error::Argument(format!(
                        "custom weight covers 1..={}, need 1..={limit}",
                        t.limit()
                    )))
                } else if t.limit() == limit {
                    Ok(t.clone())
                } else {
                    t.truncated(limit)
                }
            }
        }
    }
}

/// Evaluation route for [`GcdSumQuery::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    Fast,
    Brute,
}

/// A single query: which quantity, tuple length k, bound x and (for kind A)
/// the weight.
#[derive(Debug, Clone)]
pub struct GcdSumQuery {
    pub kind: Kind,
    pub k: u32,
    pub x: u64,
    pub weight: Weight,
}

impl GcdSumQuery {
    pub fn validate(&self) -> Result<()> {
        if self.x == 0 {
            return Err(Error::Argument("query requires x >= 1".into()));
        }
        match self.kind {
            Kind::A | Kind::B | Kind::S => {
                if self.k < 2 {
                    return Err(Error::Argument(format!(
                        "kind {:?} requires k >= 2, got {}",
                        self.kind, self.k
                    )));
                }
            }
            Kind::T => {
                if self.k < 1 {
                    return Err(Error::Argument("kind T requires k >= 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Convenience evaluation that builds the tables it needs. Callers
    /// computing many points share tables and call the free functions.
    pub fn eval(&self, method: EvalMethod) -> Result<i64> {
        self.validate()?;
        match (self.kind, method) {
            (Kind::A, EvalMethod::Fast) => {
                let r = nth_root_floor(self.x, self.k);
                a_k_fast(self.k, self.x, &self.weight.table(r)?)
            }
            (Kind::A, EvalMethod::Brute) => {
                let r = nth_root_floor(self.x, self.k);
                a_k_bruteforce(self.k, self.x, &self.weight.table(r)?)
            }
            (Kind::B, EvalMethod::Fast) => b_k_fast(self.k, self.x),
            (Kind::B, EvalMethod::Brute) => b_k_bruteforce(self.k, self.x),
            (Kind::S, EvalMethod::Fast) => {
                let omega = crate::arith::sieve_omega(self.x)?;
                s_k_sieve(self.k, self.x, &omega)
            }
            (Kind::S, EvalMethod::Brute) => s_k_bruteforce(self.k, self.x),
            (Kind::T, EvalMethod::Fast) => {
                if self.k == 1 {
                    crate::summatory::summatory_t_k(1, self.x, crate::summatory::TkMethod::Sieve)
                } else {
                    crate::summatory::summatory_t_k(
                        self.k,
                        self.x,
                        crate::summatory::TkMethod::Recursive,
                    )
                }
            }
            (Kind::T, EvalMethod::Brute) => {
                crate::summatory::summatory_t_k(self.k, self.x, crate::summatory::TkMethod::Sieve)
            }
        }
    }
}

fn validate_k_x(k: u32, x: u64, what: &str) -> Result<()> {
    if k < 2 {
        return Err(Error::Argument(format!("{what} requires k >= 2, got {k}")));
    }
    if x == 0 {
        return Err(Error::Argument(format!("{what} requires x >= 1")));
    }
    Ok(())
}

/// Fast exact `A_k(x) = sum_{x_1...x_k <= x} F(gcd(x_1,...,x_k))`:
/// with f the Moebius inverse of F, this equals
/// `sum_{n^k <= x} f(n) T_k(floor(x / n^k))`.
pub fn a_k_fast(k: u32, x: u64, weight: &FnTable) -> Result<i64> {
    validate_k_x(k, x, "A_k")?;
    let r = nth_root_floor(x, k);
    if weight.limit() < r {
        return Err(Error::Argument(format!(
            "A_k({k}, {x}) needs the weight on 1..={r}, table covers 1..={}",
            weight.limit()
        )));
    }
    let f = mobius_invert(&cap_to(weight, r)?)?;
    let mut tk = TkSummatory::new(k)?;
    gen_convolve(&f, |args| tk.eval(args[0]), &[x], &[k])
}

fn cap_to(t: &FnTable, limit: u64) -> Result<FnTable> {
    if t.limit() == limit {
        Ok(t.clone())
    } else {
        t.truncated(limit)
    }
}

/// Brute-force `A_k(x)` by tuple enumeration (early-exit pruning enabled).
pub fn a_k_bruteforce(k: u32, x: u64, weight: &FnTable) -> Result<i64> {
    a_k_bruteforce_with(k, x, weight, true)
}

/// Brute-force `A_k(x)` with the gcd-1 subtree pruning switchable.
///
/// When `early_exit` is set and the running gcd reaches 1, every completion
/// of the current prefix contributes F(1), so the whole subtree is counted
/// at once as `F(1) * T_r(budget)` for r remaining slots. With the flag
/// off, every tuple is visited.
pub fn a_k_bruteforce_with(k: u32, x: u64, weight: &FnTable, early_exit: bool) -> Result<i64> {
    validate_k_x(k, x, "A_k")?;
    let r = nth_root_floor(x, k);
    if weight.limit() < r {
        return Err(Error::Argument(format!(
            "A_k({k}, {x}) needs the weight on 1..={r}, table covers 1..={}",
            weight.limit()
        )));
    }
    guard_enumeration(k, x)?;
    let mut enumerator = Enumerator {
        weight,
        early_exit,
        tc_memo: HashMap::new(),
        total: 0,
    };
    enumerator.walk(k, x, 0)?;
    i64::try_from(enumerator.total)
        .map_err(|_| Error::Overflow(format!("A_{k}({x}) exceeds i64")))
}

/// Fast exact coprime-tuple count
/// `B_k(x) = sum_{n^k <= x} mu(n) T_k(floor(x / n^k))`.
pub fn b_k_fast(k: u32, x: u64) -> Result<i64> {
    validate_k_x(k, x, "B_k")?;
    let r = nth_root_floor(x, k);
    let mu = sieve_mobius(r)?;
    let mut tk = TkSummatory::new(k)?;
    gen_convolve(&mu, |args| tk.eval(args[0]), &[x], &[k])
}

/// Brute-force coprime-tuple count (early-exit pruning enabled).
pub fn b_k_bruteforce(k: u32, x: u64) -> Result<i64> {
    b_k_bruteforce_with(k, x, true)
}

/// Brute-force coprime-tuple count; enumeration weighted by eps(gcd).
pub fn b_k_bruteforce_with(k: u32, x: u64, early_exit: bool) -> Result<i64> {
    validate_k_x(k, x, "B_k")?;
    let eps = FnTable::epsilon(nth_root_floor(x, k).max(1))?;
    a_k_bruteforce_with(k, x, &eps, early_exit)
}

/// `S_k(x) = sum_{n<=x} k^omega(n)`, the pairwise-coprime tuple count.
pub fn s_k_sieve(k: u32, x: u64, omega: &FnTable) -> Result<i64> {
    validate_k_x(k, x, "S_k")?;
    if omega.limit() < x {
        return Err(Error::Argument(format!(
            "S_k({k}, {x}) needs omega on 1..={x}, table covers 1..={}",
            omega.limit()
        )));
    }
    // k^omega(n) via a growing power cache; omega values are tiny
    let mut powers: Vec<i64> = vec![1];
    let om = omega.values();
    let mut total: i128 = 0;
    for n in 1..=x as usize {
        let w = om[n] as usize;
        while powers.len() <= w {
            let last = *powers.last().unwrap();
            let next = last.checked_mul(k as i64).ok_or_else(|| {
                Error::Overflow(format!("k^omega overflow at n={n}, k={k}"))
            })?;
            powers.push(next);
        }
        total += powers[w] as i128;
    }
    i64::try_from(total).map_err(|_| Error::Overflow(format!("S_{k}({x}) exceeds i64")))
}

/// Brute-force pairwise-coprime tuple count by enumeration. A prefix is
/// extendable iff the next element is coprime to the product of the prefix.
pub fn s_k_bruteforce(k: u32, x: u64) -> Result<i64> {
    validate_k_x(k, x, "S_k")?;
    guard_enumeration(k, x)?;
    let mut total: i128 = 0;
    fn walk(slots: u32, budget: u64, prod: u64, total: &mut i128) {
        if slots == 1 {
            for v in 1..=budget {
                if gcd(v, prod) == 1 {
                    *total += 1;
                }
            }
            return;
        }
        for v in 1..=budget {
            if gcd(v, prod) == 1 {
                walk(slots - 1, budget / v, prod * v, total);
            }
        }
    }
    walk(k, x, 1, &mut total);
    i64::try_from(total).map_err(|_| Error::Overflow(format!("S_{k}({x}) exceeds i64")))
}

/// Counts ordered k-tuples of pairwise-coprime positive integers with
/// product exactly n, by assigning each full prime-power block of n to one
/// slot (splitting a prime across two slots would break coprimality).
/// The count always equals k^omega(n).
pub fn pairwise_factorization_count(n: u64, k: u32) -> Result<i64> {
    if n == 0 {
        return Err(Error::Argument("pairwise count requires n >= 1".into()));
    }
    if k < 2 {
        return Err(Error::Argument(format!(
            "pairwise count requires k >= 2, got {k}"
        )));
    }
    if n > 1_000_000_000_000 {
        return Err(Error::Resource(format!(
            "pairwise count factors by trial division; n={n} exceeds 10^12"
        )));
    }
    let num_primes = trial_division_prime_count(n);
    // leaf count is k^omega; refuse enumerations that cannot finish
    if (k as f64).powi(num_primes as i32) > 1e9 {
        return Err(Error::Resource(format!(
            "pairwise count enumeration of k^omega = {k}^{num_primes} tuples is too large"
        )));
    }
    // Enumerate slot by slot: the head slot takes any sub-collection of the
    // remaining prime blocks (its unitary divisor), the recursion hands the
    // rest to the remaining slots.
    fn split(mask: u32, slots: u32, total: &mut i128) {
        if slots == 1 {
            // last slot takes everything left
            *total += 1;
            return;
        }
        let mut sub = mask;
        loop {
            split(mask & !sub, slots - 1, total);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
    }
    let mut total: i128 = 0;
    let full: u32 = if num_primes == 0 {
        0
    } else {
        (1u32 << num_primes) - 1
    };
    split(full, k, &mut total);
    i64::try_from(total)
        .map_err(|_| Error::Overflow(format!("pairwise count for n={n}, k={k} exceeds i64")))
}

fn trial_division_prime_count(mut n: u64) -> u32 {
    let mut count = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            count += 1;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        count += 1;
    }
    count
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Rejects enumerations with more than `BRUTE_TUPLE_GUARD` tuples. The
/// tuple count is sized with the self-contained block recursion below, so
/// the brute path stays independent of the fast path's machinery.
fn guard_enumeration(k: u32, x: u64) -> Result<()> {
    if x > BRUTE_X_CAP {
        return Err(Error::Resource(format!(
            "brute force at x={x} exceeds the cap {BRUTE_X_CAP}; use the fast path"
        )));
    }
    let mut memo = HashMap::new();
    let tuples = tuple_count(k, x, &mut memo)?;
    if tuples > BRUTE_TUPLE_GUARD as i128 {
        return Err(Error::Resource(format!(
            "brute force would enumerate T_{k}({x}) = {tuples} tuples (guard {BRUTE_TUPLE_GUARD}); use the fast path"
        )));
    }
    Ok(())
}

/// Number of j-tuples with product <= budget, self-contained (hyperbola
/// count for j = 2, quotient-block recursion above).
fn tuple_count(j: u32, budget: u64, memo: &mut HashMap<(u32, u64), i128>) -> Result<i128> {
    if budget == 0 {
        return Ok(0);
    }
    match j {
        0 => Ok(1),
        1 => Ok(budget as i128),
        2 => {
            let s = budget.isqrt();
            let mut total: i128 = 0;
            for n in 1..=s {
                total += (budget / n) as i128;
            }
            Ok(2 * total - (s as i128) * (s as i128))
        }
        _ => {
            if let Some(&v) = memo.get(&(j, budget)) {
                return Ok(v);
            }
            let mut total: i128 = 0;
            let mut lo = 1u64;
            while lo <= budget {
                let q = budget / lo;
                let hi = budget / q;
                total += (hi - lo + 1) as i128 * tuple_count(j - 1, q, memo)?;
                lo = hi + 1;
            }
            memo.insert((j, budget), total);
            Ok(total)
        }
    }
}

struct Enumerator<'a> {
    weight: &'a FnTable,
    early_exit: bool,
    tc_memo: HashMap<(u32, u64), i128>,
    total: i128,
}

impl Enumerator<'_> {
    /// Visits every tuple of `slots` further elements with product <= budget,
    /// weighting each completed tuple by F(final gcd). `g = 0` encodes the
    /// empty prefix (gcd of nothing).
    fn walk(&mut self, slots: u32, budget: u64, g: u64) -> Result<()> {
        if self.early_exit && g == 1 {
            let completions = tuple_count(slots, budget, &mut self.tc_memo)?;
            self.total += self.weight.get(1) as i128 * completions;
            return Ok(());
        }
        if slots == 1 {
            for v in 1..=budget {
                self.total += self.weight.get(gcd(g, v)) as i128;
            }
            return Ok(());
        }
        for v in 1..=budget {
            self.walk(slots - 1, budget / v, gcd(g, v))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve_omega;
    use crate::summatory::{summatory_t_k, TkMethod};

    #[test]
    fn a2_by_hand() {
        // pairs with ab <= 4: seven coprime pairs weight tau(1) = 1, and
        // (2,2) weights tau(2) = 2
        let tau = sieve_tau_k(2, 2).unwrap();
        assert_eq!(a_k_fast(2, 4, &tau).unwrap(), 9);
        assert_eq!(a_k_bruteforce(2, 4, &tau).unwrap(), 9);
        assert_eq!(a_k_bruteforce_with(2, 4, &tau, false).unwrap(), 9);
    }

    #[test]
    fn a_k_below_first_power_is_t_k() {
        // x < 2^k leaves only n = 1, so A_k = F(1) * T_k(x)
        for k in [2u32, 3, 4] {
            let x = (1u64 << k) - 1;
            let tau = sieve_tau_k(1, 2).unwrap();
            let expect = summatory_t_k(k, x, TkMethod::Sieve).unwrap();
            assert_eq!(a_k_fast(k, x, &tau).unwrap(), expect);
        }
    }

    #[test]
    fn a2_brute_at_one() {
        let tau = sieve_tau_k(1, 2).unwrap();
        assert_eq!(a_k_bruteforce(2, 1, &tau).unwrap(), 1);
    }

    #[test]
    fn a3_constant_weight_counts_tuples() {
        let one = FnTable::one(2).unwrap();
        assert_eq!(
            a_k_bruteforce(3, 8, &one).unwrap(),
            summatory_t_k(3, 8, TkMethod::Sieve).unwrap()
        );
    }

    #[test]
    fn a_k_fast_matches_brute_sample() {
        let weights: Vec<(&str, Weight)> = vec![
            ("tau", Weight::Tau),
            ("one", Weight::One),
            ("id", Weight::Id),
        ];
        for k in [2u32, 3] {
            for (name, w) in &weights {
                for x in [1u64, 2, 10, 63, 64, 100, 999, 1000] {
                    let table = w.table(nth_root_floor(x, k)).unwrap();
                    let fast = a_k_fast(k, x, &table).unwrap();
                    let brute = a_k_bruteforce_with(k, x, &table, false).unwrap();
                    assert_eq!(fast, brute, "k={k} x={x} weight={name}");
                }
            }
        }
    }

    #[test]
    fn early_exit_flag_does_not_change_values() {
        let tau = sieve_tau_k(20, 2).unwrap();
        for x in 1..=300u64 {
            let plain = a_k_bruteforce_with(2, x, &tau, false).unwrap();
            let pruned = a_k_bruteforce_with(2, x, &tau, true).unwrap();
            assert_eq!(plain, pruned, "x={x}");
        }
    }

    #[test]
    fn identity_chain_constant_weight() {
        // F = 1 has Moebius inverse eps, so A_k collapses to T_k exactly
        let one = FnTable::one(100).unwrap();
        for k in [2u32, 3] {
            for x in [1u64, 7, 100, 1234, 10_000] {
                assert_eq!(
                    a_k_fast(k, x, &one).unwrap(),
                    summatory_t_k(k, x, TkMethod::Recursive).unwrap(),
                    "k={k} x={x}"
                );
            }
        }
    }

    #[test]
    fn b2_small_values() {
        assert_eq!(b_k_fast(2, 1).unwrap(), 1);
        assert_eq!(b_k_bruteforce(2, 1).unwrap(), 1);
        assert_eq!(b_k_fast(2, 10).unwrap(), 23);
        assert_eq!(b_k_fast(2, 100).unwrap(), 359);
        assert_eq!(b_k_bruteforce_with(2, 100, false).unwrap(), 359);
    }

    #[test]
    fn b_k_below_first_power_is_t_k() {
        for k in [2u32, 3] {
            let x = (1u64 << k) - 1;
            assert_eq!(
                b_k_fast(k, x).unwrap(),
                summatory_t_k(k, x, TkMethod::Sieve).unwrap()
            );
        }
    }

    #[test]
    fn b_k_equals_a_k_with_epsilon_weight() {
        for x in [1u64, 10, 100, 500, 1000] {
            let eps = FnTable::epsilon(nth_root_floor(x, 2)).unwrap();
            assert_eq!(
                b_k_fast(2, x).unwrap(),
                a_k_fast(2, x, &eps).unwrap(),
                "x={x}"
            );
        }
    }

    #[test]
    fn b_k_fast_matches_brute() {
        for k in [2u32, 3] {
            for x in [1u64, 2, 10, 100, 738, 1000] {
                assert_eq!(
                    b_k_fast(k, x).unwrap(),
                    b_k_bruteforce_with(k, x, false).unwrap(),
                    "k={k} x={x}"
                );
            }
        }
    }

    #[test]
    fn s2_small_values() {
        let omega = sieve_omega(100).unwrap();
        assert_eq!(s_k_sieve(2, 1, &omega).unwrap(), 1);
        assert_eq!(s_k_sieve(2, 10, &omega).unwrap(), 23);
        assert_eq!(s_k_sieve(2, 30, &omega).unwrap(), 89);
        assert_eq!(s_k_sieve(3, 30, &omega).unwrap(), 184);
    }

    #[test]
    fn s_k_sieve_matches_brute() {
        let omega = sieve_omega(2000).unwrap();
        assert_eq!(s_k_bruteforce(2, 1).unwrap(), 1);
        assert_eq!(s_k_bruteforce(2, 6).unwrap(), 13);
        for (k, x) in [(2u32, 100u64), (2, 643), (3, 30), (3, 100), (3, 1000)] {
            assert_eq!(
                s_k_sieve(k, x, &omega).unwrap(),
                s_k_bruteforce(k, x).unwrap(),
                "k={k} x={x}"
            );
        }
    }

    #[test]
    fn s_k_recurrence() {
        let omega = sieve_omega(10_000).unwrap();
        let mut prev = 0;
        let powers = [1i64, 2, 4, 8, 16, 32, 64, 128, 256];
        for x in 1..=10_000u64 {
            let cur = s_k_sieve(2, x, &omega).unwrap();
            assert_eq!(cur - prev, powers[omega.get(x) as usize], "x={x}");
            prev = cur;
        }
    }

    #[test]
    fn monotone_in_x() {
        let omega = sieve_omega(300).unwrap();
        let tau = sieve_tau_k(20, 2).unwrap();
        let mut last = (0i64, 0i64, 0i64);
        for x in 1..=300u64 {
            let a = a_k_fast(2, x, &tau).unwrap();
            let b = b_k_fast(2, x).unwrap();
            let s = s_k_sieve(2, x, &omega).unwrap();
            assert!(a >= last.0 && b >= last.1 && s >= last.2, "x={x}");
            last = (a, b, s);
        }
    }

    #[test]
    fn pairwise_count_examples() {
        assert_eq!(pairwise_factorization_count(1, 2).unwrap(), 1);
        assert_eq!(pairwise_factorization_count(6, 2).unwrap(), 4);
        for pa in [2u64, 4, 8, 27, 125, 343, 1024] {
            assert_eq!(pairwise_factorization_count(pa, 2).unwrap(), 2, "n={pa}");
        }
    }

    #[test]
    fn pairwise_count_is_k_pow_omega() {
        let omega = sieve_omega(10_000).unwrap();
        for k in [2u32, 3, 4] {
            for n in 1..=10_000u64 {
                let expect = (k as i64).pow(omega.get(n) as u32);
                assert_eq!(
                    pairwise_factorization_count(n, k).unwrap(),
                    expect,
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn guards_reject_oversized_enumerations() {
        let one = FnTable::one(100_000).unwrap();
        assert!(matches!(
            a_k_bruteforce(2, 50_000_000, &one),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            a_k_bruteforce(2, 2_000_000_000, &one),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            s_k_bruteforce(3, 20_000_000),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            pairwise_factorization_count(2_000_000_000_000, 2),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn query_validation() {
        let q = GcdSumQuery {
            kind: Kind::A,
            k: 1,
            x: 10,
            weight: Weight::Tau,
        };
        assert!(q.validate().is_err());
        let q = GcdSumQuery {
            kind: Kind::T,
            k: 2,
            x: 10,
            weight: Weight::One,
        };
        assert_eq!(q.eval(EvalMethod::Fast).unwrap(), 27);
        assert_eq!(q.eval(EvalMethod::Brute).unwrap(), 27);
        let q = GcdSumQuery {
            kind: Kind::S,
            k: 2,
            x: 10,
            weight: Weight::One,
        };
        assert_eq!(q.eval(EvalMethod::Fast).unwrap(), 23);
    }
}
