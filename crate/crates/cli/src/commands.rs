use std::path::Path;

use alpha_bandits::analysis::{bound_report, ConcentrationSettings, R0_CAVEAT};
use alpha_bandits::stats::mean;
use alpha_bandits::{
    aggregate, check_prior_mass_b1, kl_divergence, renyi_divergence, renyi_quadrature_oracle, run_experiment_with_threads,
    thm3_instance_bound, verify_concentration, BoundInputs, DivergenceOrder, Error, RegretTrace,
};
use serde::Serialize;

use crate::config::LoadedConfig;
use crate::error::{CliError, CliResult};
use crate::output::{self, fmt_alpha};

/// Whether every verification in a command held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    VerificationFailed,
}

#[derive(Serialize)]
struct SeedRecord<'a> {
    policy_index: usize,
    algorithm: &'a str,
    alpha: Option<f64>,
    replicate: usize,
    seed: u64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    toolkit: &'static str,
    version: &'static str,
    command: &'static str,
    config_sha256: String,
    config: &'a serde_json::Value,
    outputs: Vec<&'static str>,
    seeds: Vec<SeedRecord<'a>>,
}

fn thread_pool(threads: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n.max(1));
    }
    b.build()
        .map_err(|e| CliError::Usage(format!("cannot build a pool of {threads:?} threads: {e}")))
}

pub fn simulate(loaded: &LoadedConfig, out: &Path, threads: Option<usize>) -> CliResult<Outcome> {
    let cfg = &loaded.config;
    let experiment = cfg.experiment()?;
    output::ensure_dir(out)?;
    let traces = run_experiment_with_threads(&experiment, threads)?;
    let groups = aggregate(&traces, &[10.0, 50.0, 90.0])?;
    output::write_traces(out, &traces)?;
    output::write_summary(out, &groups)?;
    let mut outputs = vec![output::TRACES_CSV, output::SUMMARY_CSV];

    if cfg.analysis.bound_curve {
        write_bound_curve(loaded, out, &traces)?;
        outputs.push(output::BOUND_CURVE_CSV);
        eprintln!("note: {R0_CAVEAT}");
    }

    let manifest = Manifest {
        toolkit: "alpha-bandits",
        version: env!("CARGO_PKG_VERSION"),
        command: "simulate",
        config_sha256: loaded.hash(),
        config: &loaded.value,
        outputs,
        // traces are ordered by (policy, replicate)
        seeds: traces
            .iter()
            .enumerate()
            .map(|(i, tr)| SeedRecord {
                policy_index: i / experiment.replicates,
                algorithm: &tr.algorithm_label,
                alpha: tr.alpha,
                replicate: tr.replicate_id,
                seed: tr.seed,
            })
            .collect(),
    };
    output::write_json(&out.join(output::MANIFEST_JSON), &manifest)?;

    for g in &groups {
        let last = g.horizon() - 1;
        println!(
            "{:<9} alpha={:<5} final regret p10={:.3} p50={:.3} p90={:.3}",
            g.algorithm,
            fmt_alpha(g.alpha),
            g.curves[0][last],
            g.curves[1][last],
            g.curves[2][last]
        );
    }
    Ok(Outcome::Ok)
}

/// Mean empirical regret next to the gap-dependent log-T bound for each
/// α-TS policy; the bound column is empty for α = 1, where `C(α)` vanishes.
fn write_bound_curve(loaded: &LoadedConfig, out: &Path, traces: &[RegretTrace<f64>]) -> CliResult<()> {
    let cfg = &loaded.config;
    let instance = cfg.instance()?;
    let mut alphas: Vec<f64> = Vec::new();
    for tr in traces {
        if let Some(a) = tr.alpha {
            if !alphas.contains(&a) {
                alphas.push(a);
            }
        }
    }
    let mut rows = Vec::new();
    for alpha in alphas {
        let members: Vec<&RegretTrace<f64>> = traces.iter().filter(|t| t.alpha == Some(alpha)).collect();
        let horizon = members[0].horizon();
        for t in 0..horizon {
            let values: Vec<f64> = members.iter().map(|m| m.cum_regret[t]).collect();
            let bound = if alpha < 1.0 {
                let inputs = BoundInputs::from_instance(&instance, (t + 1) as u64, alpha)?
                    .with_d(cfg.analysis.d())?
                    .with_r0(cfg.analysis.r0())?;
                thm3_instance_bound(&inputs)?.to_string()
            } else {
                String::new()
            };
            rows.push(vec![alpha.to_string(), (t + 1).to_string(), mean(&values).to_string(), bound]);
        }
    }
    output::write_rows(
        &out.join(output::BOUND_CURVE_CSV),
        &["alpha", "t", "mean_cum_regret", "thm3_bound"],
        rows,
    )
}

pub fn bounds(loaded: &LoadedConfig, out: &Path) -> CliResult<Outcome> {
    let cfg = &loaded.config;
    let a = &cfg.analysis;
    let alpha = a
        .alpha
        .ok_or_else(|| CliError::Config("missing field `analysis.alpha`".into()))?;
    let horizon = a
        .horizon
        .or(cfg.horizon.map(|h| h as u64))
        .ok_or_else(|| CliError::Config("missing field `analysis.horizon` (or `horizon`)".into()))?;
    let instance = cfg.instance.as_ref().map(|i| i.build()).transpose()?;
    let inputs = match (&a.gaps, &instance) {
        (Some(gaps), _) => {
            let inputs = BoundInputs::new(gaps.clone(), horizon, alpha)?;
            match a.arms {
                Some(k) => inputs.with_arms(k)?,
                None => inputs,
            }
        }
        (None, Some(inst)) => BoundInputs::from_instance(inst, horizon, alpha)?,
        (None, None) => {
            return Err(CliError::Config(
                "`bounds` needs `analysis.gaps` or an `instance`".into(),
            ))
        }
    };
    let inputs = inputs.with_d(a.d())?.with_r0(a.r0())?;
    let lb_instance = if a.gaps.is_none() { instance.as_ref() } else { None };
    let report = bound_report(&inputs, lb_instance)?;
    output::ensure_dir(out)?;
    output::write_json(&out.join(output::BOUNDS_JSON), &report)?;
    println!("C(alpha) = {}", report.c_alpha);
    println!("thm1 = {}", report.thm1_bound);
    println!("thm2 = {} (envelope {})", report.thm2_bound, report.thm2_envelope);
    println!("thm3 = {}", report.thm3_bound);
    if let Some(lb) = report.lb_coefficient {
        println!("lower-bound coefficient = {lb}");
    }
    eprintln!("note: {R0_CAVEAT}");
    Ok(Outcome::Ok)
}

pub fn concentration(loaded: &LoadedConfig, out: &Path, threads: Option<usize>) -> CliResult<Outcome> {
    let cfg = &loaded.config;
    let c = cfg
        .concentration
        .as_ref()
        .ok_or_else(|| CliError::Config("missing section `concentration`".into()))?;
    let prior = c.prior.build()?;
    let truth = c.true_model.build()?;
    let settings = ConcentrationSettings {
        outer: c.outer,
        inner: c.inner,
        seed: c.seed,
        family_constant: cfg.analysis.d(),
    };
    let pool = thread_pool(threads)?;
    let mut reports = Vec::new();
    for &alpha in &c.alphas {
        for &nabla in &c.nablas {
            for &n in &c.ns {
                let r = pool
                    .install(|| verify_concentration(&prior, &truth, alpha, nabla, n, &settings))
                    .map_err(|e| CliError::Config(format!("concentration: {e}")))?;
                reports.push(r);
            }
        }
    }
    output::ensure_dir(out)?;
    output::write_rows(
        &out.join(output::CONCENTRATION_CSV),
        &["alpha", "nabla", "n", "empirical", "std_error", "bound", "result"],
        reports.iter().map(|r| {
            vec![
                r.alpha.to_string(),
                r.nabla.to_string(),
                r.n.to_string(),
                r.empirical.to_string(),
                r.std_error.to_string(),
                r.bound.to_string(),
                if r.holds { "PASS" } else { "FAIL" }.to_string(),
            ]
        }),
    )?;
    for r in &reports {
        println!(
            "{} alpha={} nabla={} n={} empirical={:.6} (se {:.2e}) bound={:.6}",
            if r.holds { "PASS" } else { "FAIL" },
            r.alpha,
            r.nabla,
            r.n,
            r.empirical,
            r.std_error,
            r.bound
        );
    }
    Ok(if reports.iter().all(|r| r.holds) {
        Outcome::Ok
    } else {
        Outcome::VerificationFailed
    })
}

#[derive(Serialize)]
struct DivergenceRecord {
    alpha: f64,
    /// `None` when the divergence is infinite.
    renyi: Option<f64>,
    kl: Option<f64>,
    oracle: Option<f64>,
    infinite: bool,
}

fn finite_or_none(r: alpha_bandits::Result<f64>) -> CliResult<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::DivergenceInfinite) => Ok(None),
        Err(e) => Err(CliError::Config(format!("divergence: {e}"))),
    }
}

pub fn divergence(loaded: &LoadedConfig, out: &Path) -> CliResult<Outcome> {
    let d = loaded
        .config
        .divergence
        .as_ref()
        .ok_or_else(|| CliError::Config("missing section `divergence`".into()))?;
    let a = d.a.build()?;
    let b = d.b.build()?;
    let order = DivergenceOrder::new(d.alpha).map_err(|e| CliError::Config(format!("divergence.alpha: {e}")))?;
    let renyi = finite_or_none(renyi_divergence(&a, &b, order))?;
    let kl = finite_or_none(kl_divergence(&a, &b))?;
    let oracle = if d.oracle {
        finite_or_none(renyi_quadrature_oracle(&a, &b, order))?
    } else {
        None
    };
    let record = DivergenceRecord {
        alpha: d.alpha,
        renyi,
        kl,
        oracle,
        infinite: renyi.is_none(),
    };
    output::ensure_dir(out)?;
    output::write_json(&out.join(output::DIVERGENCE_JSON), &record)?;
    match renyi {
        Some(v) => println!("D_{} = {v}", d.alpha),
        None => println!("D_{} = inf", d.alpha),
    }
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct PriorMassRecord {
    alpha: f64,
    eps: f64,
    n: u64,
    holds: bool,
    lhs: f64,
    rhs: f64,
    ball_lower: f64,
    ball_upper: f64,
}

pub fn prior_mass(loaded: &LoadedConfig, out: &Path) -> CliResult<Outcome> {
    let p = loaded
        .config
        .prior_mass
        .as_ref()
        .ok_or_else(|| CliError::Config("missing section `prior_mass`".into()))?;
    let prior = p.prior.build()?;
    let theta0 = p.theta0.build()?;
    let r = check_prior_mass_b1(&prior, &theta0, p.alpha, p.eps, p.n)
        .map_err(|e| CliError::Config(format!("prior_mass: {e}")))?;
    let record = PriorMassRecord {
        alpha: p.alpha,
        eps: p.eps,
        n: p.n,
        holds: r.holds,
        lhs: r.lhs,
        rhs: r.rhs,
        ball_lower: r.ball_lower,
        ball_upper: r.ball_upper,
    };
    output::ensure_dir(out)?;
    output::write_json(&out.join(output::PRIOR_MASS_JSON), &record)?;
    println!(
        "{} prior mass {} vs required {}",
        if r.holds { "PASS" } else { "FAIL" },
        r.lhs,
        r.rhs
    );
    Ok(if r.holds {
        Outcome::Ok
    } else {
        Outcome::VerificationFailed
    })
}
