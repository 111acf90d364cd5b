use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use gcdsum::arith::{sieve_mobius, sieve_omega, sieve_von_mangoldt, FnTable};
use gcdsum::asymptotics::{
    compare_to_model, dirichlet_series_derivative, luca_toth_constant, model_a_k, model_s_k,
    zeta_log_derivative_via_lambda, zeta_value, AsymptoticModel,
};
use gcdsum::gcd_sums::{
    a_k_bruteforce, a_k_fast, b_k_bruteforce, b_k_fast, s_k_bruteforce, s_k_sieve, Weight,
};
use gcdsum::summatory::{
    bullet_sum, bullet_sum_direct, nth_root_floor, quotient_blocks, summatory_t_k, BulletForm,
    SummatoryFn, TkMethod,
};

use crate::{
    AsymptArgs, BenchArgs, CliError, CompareArgs, ComputeArgs, ConstantsArgs, KindArg, MethodArg,
    Outcome, WeightArg,
};

// ---------------------------------------------------------------- helpers

fn validate_kind_k(kind: KindArg, k: u32) -> Result<(), CliError> {
    match kind {
        KindArg::A | KindArg::B | KindArg::S if k < 2 => Err(CliError::Usage(format!(
            "kind {} requires --k >= 2",
            kind.name()
        ))),
        KindArg::T if k < 1 => Err(CliError::Usage("kind T requires --k >= 1".into())),
        _ => Ok(()),
    }
}

/// The weight flag is only meaningful for kind A.
fn resolve_weight(kind: KindArg, weight: Option<WeightArg>) -> Result<WeightArg, CliError> {
    match (kind, weight) {
        (KindArg::A, w) => Ok(w.unwrap_or(WeightArg::Tau)),
        (_, None) => Ok(WeightArg::Tau),
        (_, Some(_)) => Err(CliError::Usage(format!(
            "--weight only applies to --kind a, not {}",
            kind.name()
        ))),
    }
}

fn weight_column(kind: KindArg, weight: WeightArg) -> &'static str {
    match kind {
        KindArg::A => weight.name(),
        _ => "-",
    }
}

fn weight_table_for(weight: WeightArg, limit: u64) -> Result<FnTable, gcdsum::Error> {
    let w = match weight {
        WeightArg::Tau => Weight::Tau,
        WeightArg::One => Weight::One,
        WeightArg::Id => Weight::Id,
    };
    w.table(limit)
}

/// Shared read-only tables for a batch of points.
struct Ctx {
    kind: KindArg,
    k: u32,
    weight: Option<FnTable>,
    omega: Option<FnTable>,
}

impl Ctx {
    fn build(
        kind: KindArg,
        k: u32,
        weight: WeightArg,
        xs: &[u64],
        needs_sieve_path: bool,
    ) -> Result<Ctx, CliError> {
        let x_max = *xs.last().expect("grid is nonempty");
        let weight_table = if matches!(kind, KindArg::A) {
            Some(weight_table_for(weight, nth_root_floor(x_max, k).max(1))?)
        } else {
            None
        };
        let omega = if matches!(kind, KindArg::S) && needs_sieve_path {
            Some(sieve_omega(x_max)?)
        } else {
            None
        };
        Ok(Ctx {
            kind,
            k,
            weight: weight_table,
            omega,
        })
    }

    fn eval(&self, x: u64, brute: bool) -> Result<i64, gcdsum::Error> {
        match (self.kind, brute) {
            (KindArg::A, false) => a_k_fast(self.k, x, self.weight.as_ref().unwrap()),
            (KindArg::A, true) => a_k_bruteforce(self.k, x, self.weight.as_ref().unwrap()),
            (KindArg::B, false) => b_k_fast(self.k, x),
            (KindArg::B, true) => b_k_bruteforce(self.k, x),
            (KindArg::S, false) => s_k_sieve(self.k, x, self.omega.as_ref().unwrap()),
            (KindArg::S, true) => s_k_bruteforce(self.k, x),
            (KindArg::T, false) => {
                let method = if self.k == 1 {
                    TkMethod::Sieve
                } else {
                    TkMethod::Recursive
                };
                summatory_t_k(self.k, x, method)
            }
            (KindArg::T, true) => summatory_t_k(self.k, x, TkMethod::Sieve),
        }
    }
}

fn in_pool<T: Send>(
    threads: usize,
    job: impl FnOnce() -> Result<T, gcdsum::Error> + Send,
) -> Result<T, CliError> {
    if threads == 0 {
        return Err(CliError::Usage("--threads must be >= 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Compute(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(job)?)
}

/// Floats print with 12 significant digits, plain decimal where readable.
fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-4..1e15).contains(&a) {
        let int_digits = a.log10().floor() as i32 + 1;
        let places = (12 - int_digits).max(0) as usize;
        format!("{v:.places$}")
    } else {
        format!("{v:.11e}")
    }
}

fn emit(out: &Option<std::path::PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Compute(format!("cannot write {}: {e}", path.display())))
}

// ---------------------------------------------------------------- compute

pub fn compute(args: ComputeArgs) -> Result<Outcome, CliError> {
    validate_kind_k(args.kind, args.k)?;
    let weight = resolve_weight(args.kind, args.weight)?;
    let xs = args.grid.resolve()?;

    let legs: &[bool] = match args.method {
        MethodArg::Fast => &[false],
        MethodArg::Brute => &[true],
        MethodArg::Both => &[false, true],
    };
    let needs_fast = legs.contains(&false);
    let ctx = Ctx::build(args.kind, args.k, weight, &xs, needs_fast)?;

    let results = in_pool(args.threads, || {
        xs.par_iter()
            .map(|&x| {
                let mut rows = Vec::new();
                for &brute in legs {
                    let t0 = Instant::now();
                    let value = ctx.eval(x, brute)?;
                    let ns = t0.elapsed().as_nanos();
                    rows.push((x, brute, value, ns));
                }
                Ok(rows)
            })
            .collect::<Result<Vec<_>, gcdsum::Error>>()
    })?;

    let mut rows: Vec<_> = results.into_iter().flatten().collect();
    rows.sort_by_key(|&(x, brute, _, _)| (x, brute));

    let mut csv = String::from("kind,k,weight,x,value,method,elapsed_ns\n");
    for (x, brute, value, ns) in rows {
        let method = if brute { "brute" } else { "fast" };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            args.kind.name(),
            args.k,
            weight_column(args.kind, weight),
            x,
            value,
            method,
            ns
        ));
    }
    emit(&args.out, &csv)?;
    Ok(Outcome::Clean)
}

// ---------------------------------------------------------------- compare

pub fn compare(args: CompareArgs) -> Result<Outcome, CliError> {
    validate_kind_k(args.kind, args.k)?;
    let weight = resolve_weight(args.kind, args.weight)?;
    let xs = args.grid.resolve()?;
    let ctx = Ctx::build(args.kind, args.k, weight, &xs, true)?;

    let mut rows = in_pool(args.threads, || {
        xs.par_iter()
            .map(|&x| {
                let fast = ctx.eval(x, false)?;
                let brute = ctx.eval(x, true)?;
                Ok((x, fast, brute))
            })
            .collect::<Result<Vec<_>, gcdsum::Error>>()
    })?;
    rows.sort_by_key(|&(x, _, _)| x);

    let mut csv = String::from("kind,k,weight,x,fast_value,brute_value,match\n");
    let mut all_match = true;
    for (x, fast, brute) in rows {
        let ok = fast == brute;
        all_match &= ok;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            args.kind.name(),
            args.k,
            weight_column(args.kind, weight),
            x,
            fast,
            brute,
            u8::from(ok)
        ));
    }
    emit(&args.out, &csv)?;
    Ok(if all_match {
        Outcome::Clean
    } else {
        Outcome::Mismatch
    })
}

// ---------------------------------------------------------------- asympt

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * j as f64)
}

fn model_for(args: &AsymptArgs, weight: WeightArg) -> Result<AsymptoticModel, CliError> {
    Ok(match args.kind {
        KindArg::A => {
            let f = gcdsum::arith::mobius_invert(&weight_table_for(weight, args.terms)?)?;
            model_a_k(args.k, &f, args.terms)?
        }
        KindArg::B => {
            let mu = sieve_mobius(args.terms)?;
            model_a_k(args.k, &mu, args.terms)?
        }
        KindArg::S => model_s_k(args.k, args.prime_bound)?,
        KindArg::T => AsymptoticModel {
            leading_coefficient: 1.0 / factorial(args.k - 1),
            x_power: 1.0,
            log_power: args.k - 1,
            error_log_power: args.k as i32 - 2,
            secondary_coefficient: None,
            convergence_warning: false,
        },
    })
}

pub fn asympt(args: AsymptArgs) -> Result<Outcome, CliError> {
    validate_kind_k(args.kind, args.k)?;
    let weight = resolve_weight(args.kind, args.weight)?;
    let xs = args.grid.resolve()?;
    if xs[0] < 2 {
        return Err(CliError::Usage("asympt requires grid points >= 2".into()));
    }
    if *xs.last().unwrap() < 100 * xs[0] {
        return Err(CliError::Usage(
            "asympt requires a grid spanning at least two decades".into(),
        ));
    }

    let model = model_for(&args, weight)?;
    let ctx = Ctx::build(args.kind, args.k, weight, &xs, true)?;
    let mut exact = in_pool(args.threads, || {
        xs.par_iter()
            .map(|&x| Ok((x, ctx.eval(x, false)?)))
            .collect::<Result<Vec<_>, gcdsum::Error>>()
    })?;
    exact.sort_by_key(|&(x, _)| x);

    let cmp = compare_to_model(&exact, &model)?;
    let warn = u8::from(model.convergence_warning);

    let kind = args.kind.name();
    let wcol = weight_column(args.kind, weight);
    let mut csv = String::from("kind,k,weight,x,exact,main,ratio,warn\n");
    for (&(x, v), &(_, r)) in exact.iter().zip(&cmp.ratios) {
        csv.push_str(&format!(
            "{kind},{},{wcol},{x},{v},{},{},{warn}\n",
            args.k,
            fmt_float(model.main_term(x as f64)),
            fmt_float(r),
        ));
    }
    // trend summary: slope of ratio against 1/log x, and its extrapolation
    csv.push_str(&format!(
        "{kind},{},{wcol},trend,{},{},{},{warn}\n",
        args.k,
        fmt_float(cmp.slope),
        fmt_float(cmp.extrapolated_ratio),
        fmt_float(cmp.extrapolated_ratio),
    ));
    // remainder-model report for the k = 2 gcd-sum: does a constant or a
    // linear-in-x remainder fit the data better?
    if matches!(args.kind, KindArg::A) && args.k == 2 {
        let rem: Vec<(f64, f64)> = exact
            .iter()
            .map(|&(x, v)| (x as f64, v as f64 - model.main_term(x as f64)))
            .collect();
        let c_const = rem.iter().map(|&(_, r)| r).sum::<f64>() / rem.len() as f64;
        let rss_const: f64 = rem.iter().map(|&(_, r)| (r - c_const).powi(2)).sum();
        let c_lin = rem.iter().map(|&(x, r)| x * r).sum::<f64>()
            / rem.iter().map(|&(x, _)| x * x).sum::<f64>();
        let rss_lin: f64 = rem.iter().map(|&(x, r)| (r - c_lin * x).powi(2)).sum();
        let linear_wins = rss_lin < rss_const;
        let best_coeff = if linear_wins { c_lin } else { c_const };
        csv.push_str(&format!(
            "{kind},{},{wcol},remainder,{},{},{},{}\n",
            args.k,
            fmt_float(rss_const),
            fmt_float(rss_lin),
            fmt_float(best_coeff),
            u8::from(linear_wins),
        ));
    }
    emit(&args.out, &csv)?;
    Ok(Outcome::Clean)
}

// ---------------------------------------------------------------- constants

pub fn constants(args: ConstantsArgs) -> Result<Outcome, CliError> {
    if args.k < 2 {
        return Err(CliError::Usage("constants requires --k >= 2".into()));
    }
    if args.terms < 2 || args.prime_bound < 2 {
        return Err(CliError::Usage(
            "--terms and --prime-bound must be >= 2".into(),
        ));
    }
    let s = args.k as f64;
    let zeta = zeta_value(s, 1e-12)?;

    let one = FnTable::one(args.terms)?;
    let deriv = dirichlet_series_derivative(&one, s, 1)?;

    let lambda = sieve_von_mangoldt(args.terms)?;
    let via_lambda = zeta_log_derivative_via_lambda(s, &lambda)?;
    // tail of sum Lambda(n) n^{-s} by integral comparison with log t * t^{-s}
    let nf = args.terms as f64;
    let lambda_tail = zeta * nf.powf(1.0 - s) / (s - 1.0) * (nf.ln() + 1.0 / (s - 1.0));

    let cf = luca_toth_constant(args.k, |_, _| args.k as f64, args.prime_bound)?;

    let mut csv = String::from("quantity,k,value,tail_estimate,warn\n");
    let mut row = |name: &str, value: f64, tail: f64, warn: u8| {
        csv.push_str(&format!(
            "{name},{},{},{},{warn}\n",
            args.k,
            fmt_float(value),
            fmt_float(tail)
        ));
    };
    row("zeta", zeta, 1e-12, 0);
    row(
        "zeta_derivative_direct",
        deriv.value,
        deriv.tail_bound,
        u8::from(!deriv.converged),
    );
    row("zeta_derivative_via_lambda", via_lambda, lambda_tail, 0);
    row("euler_product_cf", cf.value, cf.tail_estimate, 0);
    emit(&args.out, &csv)?;
    Ok(Outcome::Clean)
}

// ---------------------------------------------------------------- bench

pub fn bench(args: BenchArgs) -> Result<Outcome, CliError> {
    let xs = args.grid.resolve()?;
    let x_max = *xs.last().unwrap();
    let ones = FnTable::one(x_max)?;
    let mut fsum = SummatoryFn::new(|y| Ok(y as i64));
    let id = |q: u64| q as i64;

    let mut csv = String::from("x,value,naive_ns,blocked_ns,blocks\n");
    let mut all_match = true;
    for &x in &xs {
        let t0 = Instant::now();
        let naive = bullet_sum_direct(&ones, id, x)?;
        let naive_ns = t0.elapsed().as_nanos();

        let t1 = Instant::now();
        let blocked = bullet_sum(&ones, &mut fsum, id, x, BulletForm::Split)?;
        let blocked_ns = t1.elapsed().as_nanos();

        all_match &= naive == blocked;
        csv.push_str(&format!(
            "{x},{blocked},{naive_ns},{blocked_ns},{}\n",
            quotient_blocks(x).len()
        ));
    }
    emit(&args.out, &csv)?;
    Ok(if all_match {
        Outcome::Clean
    } else {
        Outcome::Mismatch
    })
}
