//! Exact summatory-function machinery.
//!
//! The workhorse identity evaluates `sum_{n<=x} f(n) g(floor(x/n))` in
//! O(sqrt x) block operations instead of O(x): the quotients `floor(x/n)`
//! take at most `2*floor(sqrt x)` distinct values, so the sum splits into a
//! part indexed by small n and a part indexed by small quotients, the
//! latter weighted by differences of the summatory function
//! `F(x) = sum_{n<=x} f(n)`. Two equivalent arrangements are provided (see
//! [`BulletForm`]); both are exact for every integer x.

use std::collections::HashMap;

use crate::arith::{sieve_tau_k, FloatTable, FnTable};
use crate::error::{Error, Result};

/// One maximal interval `lo..=hi` on which `floor(x/n)` is the constant `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotientBlock {
    pub lo: u64,
    pub hi: u64,
    pub q: u64,
}

/// Decomposition of `1..=x` into maximal constant-quotient intervals.
/// There are at most `2*floor(sqrt x)` blocks and q strictly decreases.
#[derive(Debug, Clone)]
pub struct QuotientBlocks {
    x: u64,
    blocks: Vec<QuotientBlock>,
}

impl QuotientBlocks {
    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &QuotientBlock> {
        self.blocks.iter()
    }
}

/// Splits `1..=x` with the standard jump `hi = x / (x / lo)`.
pub fn quotient_blocks(x: u64) -> QuotientBlocks {
    assert!(x >= 1, "quotient_blocks requires x >= 1");
    let mut blocks = Vec::with_capacity(2 * x.isqrt() as usize);
    let mut lo = 1;
    while lo <= x {
        let q = x / lo;
        let hi = x / q;
        blocks.push(QuotientBlock { lo, hi, q });
        lo = hi + 1;
    }
    QuotientBlocks { x, blocks }
}

enum SummatoryRepr {
    /// Prefix sums of a dense table; O(1) lookups, no memo needed.
    Prefix { sums: Vec<i64> },
    /// Arbitrary evaluator with a memo over the quotient arguments that
    /// drive it (at most 2*sqrt(x) distinct keys per driving x).
    Memoized {
        eval: Box<dyn FnMut(u64) -> Result<i64>>,
        memo: HashMap<u64, i64>,
    },
}

/// Evaluator `x -> F(x) = sum_{n<=x} f(n)` as an exact integer.
/// `F(0) = 0` by convention. Deterministic: repeated evaluation returns
/// identical values. A `SummatoryFn` being populated is single-writer;
/// once populated it may be shared read-only.
pub struct SummatoryFn {
    repr: SummatoryRepr,
}

impl SummatoryFn {
    /// Wraps an arbitrary exact evaluator; results are memoized.
    pub fn new(eval: impl FnMut(u64) -> Result<i64> + 'static) -> SummatoryFn {
        SummatoryFn {
            repr: SummatoryRepr::Memoized {
                eval: Box::new(eval),
                memo: HashMap::new(),
            },
        }
    }

    /// Prefix-sums a dense table; evaluation beyond the table limit is an
    /// argument error.
    pub fn from_table(t: &FnTable) -> Result<SummatoryFn> {
        let n = t.limit() as usize;
        let mut sums = vec![0i64; n + 1];
        let v = t.values();
        for m in 1..=n {
            sums[m] = sums[m - 1].checked_add(v[m]).ok_or_else(|| {
                Error::Overflow(format!("summatory prefix overflow at n={m}"))
            })?;
        }
        Ok(SummatoryFn {
            repr: SummatoryRepr::Prefix { sums },
        })
    }

    pub fn eval(&mut self, x: u64) -> Result<i64> {
        if x == 0 {
            return Ok(0);
        }
        match &mut self.repr {
            SummatoryRepr::Prefix { sums } => {
                if (x as usize) >= sums.len() {
                    return Err(Error::Argument(format!(
                        "summatory table covers 1..={}, requested {x}",
                        sums.len() - 1
                    )));
                }
                Ok(sums[x as usize])
            }
            SummatoryRepr::Memoized { eval, memo } => {
                if let Some(&v) = memo.get(&x) {
                    return Ok(v);
                }
                let v = eval(x)?;
                memo.insert(x, v);
                Ok(v)
            }
        }
    }
}

/// The two block arrangements of `sum_{n<=x} f(n) g(floor(x/n))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BulletForm {
    /// `sum_{n<=s} g(n) (F(x/n) - F(x/(n+1))) + sum_{n<=floor(x/(s+1))} f(n) g(x/n)`
    /// with `s = floor(sqrt x)`. Needs f on `1..=floor(x/(s+1))`.
    Split,
    /// `sum_{n<=s} [f(n) g(x/n) + g(n) (F(x/n) - F(x/(n+1)))] - eps(x)`,
    /// where the correction `eps(x) = f(s) g(x/s)` applies exactly when
    /// `x < s(s+1)` (then n = s is counted by both addends).
    /// Needs f on `1..=s`.
    Epsilon,
}

/// Evaluates `sum_{n<=x} f(n) g(floor(x/n))` in O(sqrt x) block steps.
///
/// `f` supplies point values, `f_summatory` its summatory function at the
/// quotient points, and `g` must be evaluable at every `floor(x/n)`.
pub fn bullet_sum(
    f: &FnTable,
    f_summatory: &mut SummatoryFn,
    mut g: impl FnMut(u64) -> i64,
    x: u64,
    form: BulletForm,
) -> Result<i64> {
    if x == 0 {
        return Err(Error::Argument("bullet_sum requires x >= 1".into()));
    }
    let s = x.isqrt();
    let mut total: i128 = 0;
    match form {
        BulletForm::Split => {
            let t = x / (s + 1);
            if f.limit() < t {
                return Err(Error::Argument(format!(
                    "bullet_sum(split) at x={x} needs f on 1..={t}, table covers 1..={}",
                    f.limit()
                )));
            }
            for n in 1..=s {
                let hi = f_summatory.eval(x / n)?;
                let lo = f_summatory.eval(x / (n + 1))?;
                total += g(n) as i128 * (hi as i128 - lo as i128);
            }
            for n in 1..=t {
                let fv = f.get(n);
                if fv != 0 {
                    total += fv as i128 * g(x / n) as i128;
                }
            }
        }
        BulletForm::Epsilon => {
            if f.limit() < s {
                return Err(Error::Argument(format!(
                    "bullet_sum(epsilon) at x={x} needs f on 1..={s}, table covers 1..={}",
                    f.limit()
                )));
            }
            for n in 1..=s {
                let fv = f.get(n);
                if fv != 0 {
                    total += fv as i128 * g(x / n) as i128;
                }
                let hi = f_summatory.eval(x / n)?;
                let lo = f_summatory.eval(x / (n + 1))?;
                total += g(n) as i128 * (hi as i128 - lo as i128);
            }
            if x < s * (s + 1) {
                total -= f.get(s) as i128 * g(x / s) as i128;
            }
        }
    }
    narrow(total, "bullet_sum")
}

/// Reference evaluation of the same sum by the direct O(x) loop.
pub fn bullet_sum_direct(
    f: &FnTable,
    mut g: impl FnMut(u64) -> i64,
    x: u64,
) -> Result<i64> {
    if x == 0 {
        return Err(Error::Argument("bullet_sum_direct requires x >= 1".into()));
    }
    if f.limit() < x {
        return Err(Error::Argument(format!(
            "bullet_sum_direct at x={x} needs f on 1..={x}, table covers 1..={}",
            f.limit()
        )));
    }
    let mut total: i128 = 0;
    for n in 1..=x {
        let fv = f.get(n);
        if fv != 0 {
            total += fv as i128 * g(x / n) as i128;
        }
    }
    narrow(total, "bullet_sum_direct")
}

fn narrow(total: i128, what: &str) -> Result<i64> {
    i64::try_from(total).map_err(|_| Error::Overflow(format!("{what} result exceeds i64")))
}

/// Largest r with `r^k <= x`.
pub fn nth_root_floor(x: u64, k: u32) -> u64 {
    assert!(k >= 1, "nth_root_floor requires k >= 1");
    if k == 1 || x <= 1 {
        return x;
    }
    if k >= 64 {
        return 1;
    }
    let mut r = (x as f64).powf(1.0 / k as f64).round() as u64;
    r = r.max(1);
    while pow_exceeds(r, k, x) {
        r -= 1;
    }
    while !pow_exceeds(r + 1, k, x) {
        r += 1;
    }
    r
}

/// True iff b^k > x (treating u64 overflow as "exceeds").
fn pow_exceeds(b: u64, k: u32, x: u64) -> bool {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = match acc.checked_mul(b) {
            Some(v) => v,
            None => return true,
        };
        if acc > x {
            return true;
        }
    }
    false
}

/// Dilated convolution over integer exponents:
/// `sum over n with n^{s_i} <= x_i of alpha(n) * f(x_1/n^{s_1}, ..., x_k/n^{s_k})`,
/// arguments floored. Exact when `f` is exact.
pub fn gen_convolve(
    alpha: &FnTable,
    mut f: impl FnMut(&[u64]) -> Result<i64>,
    x: &[u64],
    s: &[u32],
) -> Result<i64> {
    if x.is_empty() || x.len() != s.len() {
        return Err(Error::Argument(
            "gen_convolve requires matching nonempty x and s tuples".into(),
        ));
    }
    if x.contains(&0) || s.contains(&0) {
        return Err(Error::Argument(
            "gen_convolve requires positive x_i and s_i".into(),
        ));
    }
    let n_max = x
        .iter()
        .zip(s)
        .map(|(&xi, &si)| nth_root_floor(xi, si))
        .min()
        .unwrap();
    if alpha.limit() < n_max {
        return Err(Error::Argument(format!(
            "gen_convolve needs alpha on 1..={n_max}, table covers 1..={}",
            alpha.limit()
        )));
    }
    let mut args = vec![0u64; x.len()];
    let mut total: i128 = 0;
    for n in 1..=n_max {
        let a = alpha.get(n);
        if a == 0 {
            continue;
        }
        for (i, (&xi, &si)) in x.iter().zip(s).enumerate() {
            // n^{s_i} <= x_i by choice of n_max, so the power cannot overflow
            args[i] = xi / n.pow(si);
        }
        total += a as i128 * f(&args)? as i128;
    }
    narrow(total, "gen_convolve")
}

/// Float variant with real exponents. Dilated arguments `x_i / n^{s_i}` are
/// passed unfloored; callers floor at the use site when they need integers.
pub fn gen_convolve_float(
    alpha: &FnTable,
    mut f: impl FnMut(&[f64]) -> f64,
    x: &[f64],
    s: &[f64],
) -> Result<f64> {
    if x.is_empty() || x.len() != s.len() {
        return Err(Error::Argument(
            "gen_convolve_float requires matching nonempty x and s tuples".into(),
        ));
    }
    if x.iter().any(|&xi| xi < 1.0) || s.iter().any(|&si| si <= 0.0) {
        return Err(Error::Argument(
            "gen_convolve_float requires x_i >= 1 and s_i > 0".into(),
        ));
    }
    let mut n_max = u64::MAX;
    for (&xi, &si) in x.iter().zip(s) {
        let mut r = xi.powf(1.0 / si).floor().max(1.0) as u64;
        while ((r + 1) as f64).powf(si) <= xi {
            r += 1;
        }
        while r > 1 && (r as f64).powf(si) > xi {
            r -= 1;
        }
        n_max = n_max.min(r);
    }
    if alpha.limit() < n_max {
        return Err(Error::Argument(format!(
            "gen_convolve_float needs alpha on 1..={n_max}, table covers 1..={}",
            alpha.limit()
        )));
    }
    let mut args = vec![0f64; x.len()];
    let mut total = 0.0;
    for n in 1..=n_max {
        let a = alpha.get(n);
        if a == 0 {
            continue;
        }
        for (i, (&xi, &si)) in x.iter().zip(s).enumerate() {
            args[i] = xi / (n as f64).powf(si);
        }
        total += a as f64 * f(&args);
    }
    Ok(total)
}

/// Memoizing evaluator for `T_k(x) = sum_{n<=x} tau_k(n)`.
///
/// Level j >= 2 uses the split block arrangement with f = tau_{j-1} and
/// g = Id, recursing on T_{j-1} at the quotient points; tau tables for the
/// small-n side are sieved lazily and grown by doubling. The memo holds
/// only quotient values of the driving arguments.
pub struct TkSummatory {
    k: u32,
    memo: Vec<HashMap<u64, i64>>,
    tau: Vec<Option<FnTable>>,
}

impl TkSummatory {
    pub fn new(k: u32) -> Result<TkSummatory> {
        if k < 1 {
            return Err(Error::Argument("T_k requires k >= 1".into()));
        }
        Ok(TkSummatory {
            k,
            memo: vec![HashMap::new(); k as usize + 1],
            tau: vec![None; k as usize + 1],
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Exact T_k(x); T_k(0) = 0.
    pub fn eval(&mut self, x: u64) -> Result<i64> {
        self.eval_level(self.k, x)
    }

    fn eval_level(&mut self, j: u32, x: u64) -> Result<i64> {
        if x == 0 {
            return Ok(0);
        }
        if j == 1 {
            return i64::try_from(x)
                .map_err(|_| Error::Overflow(format!("T_1({x}) exceeds i64")));
        }
        if let Some(&v) = self.memo[j as usize].get(&x) {
            return Ok(v);
        }
        let s = x.isqrt();
        let t = x / (s + 1);
        let mut total: i128 = 0;
        for n in 1..=s {
            let hi = self.eval_level(j - 1, x / n)?;
            let lo = self.eval_level(j - 1, x / (n + 1))?;
            total += n as i128 * (hi as i128 - lo as i128);
        }
        if j == 2 {
            // tau_1 = 1
            for n in 1..=t {
                total += (x / n) as i128;
            }
        } else if t > 0 {
            self.ensure_tau(j - 1, t)?;
            let tau = self.tau[(j - 1) as usize].as_ref().unwrap();
            for n in 1..=t {
                total += tau.get(n) as i128 * (x / n) as i128;
            }
        }
        let v = narrow(total, "T_k")?;
        self.memo[j as usize].insert(x, v);
        Ok(v)
    }

    fn ensure_tau(&mut self, j: u32, need: u64) -> Result<()> {
        let have = self.tau[j as usize].as_ref().map_or(0, |t| t.limit());
        if have < need {
            let grow = need.max(have * 2).max(16);
            self.tau[j as usize] = Some(sieve_tau_k(grow, j)?);
        }
        Ok(())
    }
}

/// Evaluation strategies for `T_k(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TkMethod {
    /// Sieve tau_k on 1..=x and prefix-sum; memory O(x), any k.
    Sieve,
    /// `T_2(x) = 2 sum_{n<=sqrt x} floor(x/n) - floor(sqrt x)^2`; k = 2 only.
    Hyperbola,
    /// Quotient-block recursion with f = tau_{k-1} (see [`TkSummatory`]); k >= 2.
    Recursive,
}

/// One-shot exact `T_k(x) = sum_{n<=x} tau_k(n)`.
pub fn summatory_t_k(k: u32, x: u64, method: TkMethod) -> Result<i64> {
    if k < 1 {
        return Err(Error::Argument("T_k requires k >= 1".into()));
    }
    if x == 0 {
        return Err(Error::Argument("T_k requires x >= 1".into()));
    }
    match method {
        TkMethod::Sieve => {
            if k == 1 {
                // tau_1 = 1, so T_1(x) = x without tabulating anything
                return i64::try_from(x)
                    .map_err(|_| Error::Overflow(format!("T_1({x}) exceeds i64")));
            }
            let tau = sieve_tau_k(x, k)?;
            let mut total: i64 = 0;
            for n in 1..=x {
                total = total.checked_add(tau.get(n)).ok_or_else(|| {
                    Error::Overflow(format!("T_{k}({x}) exceeds i64"))
                })?;
            }
            Ok(total)
        }
        TkMethod::Hyperbola => {
            if k != 2 {
                return Err(Error::Argument(format!(
                    "hyperbola method applies to k = 2 only, got k = {k}"
                )));
            }
            let s = x.isqrt();
            let mut total: i128 = 0;
            for n in 1..=s {
                total += (x / n) as i128;
            }
            narrow(2 * total - (s as i128) * (s as i128), "T_2")
        }
        TkMethod::Recursive => {
            if k < 2 {
                return Err(Error::Argument(format!(
                    "recursive method requires k >= 2, got k = {k}"
                )));
            }
            TkSummatory::new(k)?.eval(x)
        }
    }
}

/// Chebyshev's second function `psi(x) = sum_{n<=x} Lambda(n)`.
pub fn psi(x: u64, lambda: &FloatTable) -> Result<f64> {
    if lambda.limit() < x {
        return Err(Error::Argument(format!(
            "psi({x}) needs Lambda on 1..={x}, table covers 1..={}",
            lambda.limit()
        )));
    }
    Ok((1..=x).map(|n| lambda.get(n)).sum())
}

/// Mertens function `M(x) = sum_{n<=x} mu(n)`.
pub fn mertens(x: u64, mu: &FnTable) -> Result<i64> {
    if x == 0 {
        return Err(Error::Argument("mertens requires x >= 1".into()));
    }
    if mu.limit() < x {
        return Err(Error::Argument(format!(
            "mertens({x}) needs mu on 1..={x}, table covers 1..={}",
            mu.limit()
        )));
    }
    let mut total: i64 = 0;
    for n in 1..=x {
        total += mu.get(n); // |M| <= x, cannot overflow
    }
    Ok(total)
}
