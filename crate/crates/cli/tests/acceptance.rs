//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

use std::fs;
use std::path::Path;
use std::time::Instant;

use alpha_bandits::analysis::{thm1_terms, ConcentrationSettings};
use alpha_bandits::divergence::{exp_family_mean_gap_bound, subgaussian_mean_gap_bound};
use alpha_bandits::rng::stream_from_seed;
use alpha_bandits::stats::{bootstrap_median_difference, fit_log, mean, median};
use alpha_bandits::{
    aggregate, asymptotic_lower_bound, c_alpha, renyi_divergence, renyi_quadrature_oracle, run_experiment,
    thm1_instance_bound, thm2_independent_bound, thm3_instance_bound, verify_concentration, BanditInstance,
    BoundInputs, DivergenceOrder, ExperimentConfig, PolicySpec, PosteriorParams, PriorSpec, RegretTrace,
    RewardModel, TemperedPosterior,
};
use alpha_bandits_cli::run_cli;
use rand::seq::SliceRandom;
use rand::Rng;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: usize, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("[{}] criterion {id} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn eight_arm_instance() -> BanditInstance<f64> {
    let arms = (1..=8).map(|i| RewardModel::bernoulli(i as f64 / 10.0).unwrap()).collect();
    BanditInstance::new(arms).unwrap()
}

fn finals(traces: &[RegretTrace<f64>], label: &str, alpha: Option<f64>) -> Vec<f64> {
    traces
        .iter()
        .filter(|t| t.algorithm_label == label && t.alpha == alpha)
        .map(|t| t.final_regret())
        .collect()
}

fn alpha_sweep(report: &mut Report) -> Vec<RegretTrace<f64>> {
    let alphas = [0.4, 0.6, 0.8, 1.0];
    let horizon = 10_000;
    let mut config = ExperimentConfig::new(
        eight_arm_instance(),
        horizon,
        40,
        alphas.iter().map(|&a| PolicySpec::alpha_ts(a)).collect(),
    );
    config.base_seed = 20240101;
    let start = Instant::now();
    let traces = run_experiment(&config).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let groups = aggregate(&traces, &[50.0]).unwrap();
    let half = horizon / 2;
    let mut sublinear = true;
    let mut parts = Vec::new();
    for g in &groups {
        let med = &g.curves[0];
        let first = med[half - 1];
        let second = med[horizon - 1] - med[half - 1];
        sublinear &= second < 0.8 * first;
        parts.push(format!("a={} second/first={:.3}", g.alpha.unwrap(), second / first));
    }
    let m08 = median(&finals(&traces, "alpha-ts", Some(0.8)));
    let m10 = median(&finals(&traces, "alpha-ts", Some(1.0)));
    let ratio = m08.max(m10) / m08.min(m10);
    report.line(
        1,
        "alpha sweep shape",
        sublinear && ratio <= 2.0,
        format!(
            "{}; median final a=0.8 {m08:.1} vs a=1.0 {m10:.1} (ratio {ratio:.3}); {elapsed:.1}s",
            parts.join(", ")
        ),
    );
    traces
}

fn baselines(report: &mut Report) {
    let mut config = ExperimentConfig::new(
        eight_arm_instance(),
        20_000,
        100,
        vec![PolicySpec::alpha_ts(0.8), PolicySpec::Ucb1, PolicySpec::ucbv(), PolicySpec::Moss],
    );
    config.base_seed = 20240303;
    let traces = run_experiment(&config).unwrap();
    let ts = finals(&traces, "alpha-ts", Some(0.8));
    let ucb1 = finals(&traces, "ucb1", None);
    let interval = bootstrap_median_difference(&ts, &ucb1, 0.9, 2000, &mut stream_from_seed(77));
    let pass = median(&ts) < median(&ucb1) && interval.estimate > interval.half_width();
    report.line(
        2,
        "baseline comparison",
        pass,
        format!(
            "median final alpha-ts(0.8) {:.1}, ucb1 {:.1}, gap {:.1} vs 90% half-width {:.1}; ucbv {:.1}, moss {:.1} (reported only)",
            median(&ts),
            median(&ucb1),
            interval.estimate,
            interval.half_width(),
            median(&finals(&traces, "ucbv", None)),
            median(&finals(&traces, "moss", None)),
        ),
    );
}

fn concentration(report: &mut Report) {
    let prior = PriorSpec::beta(1.0, 1.0).unwrap();
    let truth = RewardModel::bernoulli(0.5).unwrap();
    let settings = ConcentrationSettings {
        outer: 500,
        inner: 5000,
        seed: 31,
        family_constant: 1.0,
    };
    let mut all = true;
    let mut worst = f64::NEG_INFINITY;
    let mut cells = 0;
    for alpha in [0.3, 0.5, 0.7] {
        for nabla in [0.15, 0.25] {
            for n in [200, 800] {
                let r = verify_concentration(&prior, &truth, alpha, nabla, n, &settings).unwrap();
                all &= r.holds;
                worst = worst.max(r.empirical - r.bound - 3.0 * r.std_error);
                cells += 1;
            }
        }
    }
    report.line(
        3,
        "posterior concentration",
        all,
        format!("{cells} cells, max(empirical - bound - 3se) = {worst:.4}"),
    );
}

fn divergence_oracle(report: &mut Report) {
    let mut rng = stream_from_seed(4);
    let mut worst_gauss = 0.0f64;
    for _ in 0..200 {
        let a = RewardModel::gaussian(rng.random_range(-5.0f64..5.0), rng.random_range(0.25..4.0)).unwrap();
        let b = RewardModel::gaussian(rng.random_range(-5.0..5.0), rng.random_range(0.25..4.0)).unwrap();
        let order = DivergenceOrder::new(rng.random_range(0.01f64..0.99)).unwrap();
        let diff = renyi_divergence(&a, &b, order).unwrap() - renyi_quadrature_oracle(&a, &b, order).unwrap();
        worst_gauss = worst_gauss.max(diff.abs());
    }
    let mut worst_discrete = 0.0f64;
    for i in 0..200 {
        let d = 2 + i % 5;
        let draw = |rng: &mut alpha_bandits::RandomStream| {
            let w: Vec<f64> = (0..d).map(|_| rng.random_range(0.01..1.0)).collect();
            let total: f64 = w.iter().sum();
            let mut p: Vec<f64> = w.iter().map(|x| x / total).collect();
            let head: f64 = p[..d - 1].iter().sum();
            p[d - 1] = 1.0 - head;
            p
        };
        let (p, q) = (draw(&mut rng), draw(&mut rng));
        let alpha: f64 = rng.random_range(0.01..0.99);
        let direct = p
            .iter()
            .zip(&q)
            .map(|(a, b)| a.powf(alpha) * b.powf(1.0 - alpha))
            .sum::<f64>()
            .ln()
            / (alpha - 1.0);
        let order = DivergenceOrder::new(alpha).unwrap();
        let closed = renyi_divergence(
            &RewardModel::categorical(p.clone()).unwrap(),
            &RewardModel::categorical(q.clone()).unwrap(),
            order,
        )
        .unwrap();
        worst_discrete = worst_discrete.max((closed - direct).abs());
        let bern = renyi_divergence(
            &RewardModel::bernoulli(p[1]).unwrap(),
            &RewardModel::bernoulli(q[1]).unwrap(),
            order,
        )
        .unwrap();
        let bdirect = ((1.0 - p[1]).powf(alpha) * (1.0 - q[1]).powf(1.0 - alpha) + p[1].powf(alpha) * q[1].powf(1.0 - alpha))
            .ln()
            / (alpha - 1.0);
        worst_discrete = worst_discrete.max((bern - bdirect).abs());
    }
    report.line(
        4,
        "divergence oracle",
        worst_gauss <= 1e-6 && worst_discrete <= 1e-12,
        format!("max gaussian |closed - quadrature| = {worst_gauss:.2e}, max discrete |closed - sum| = {worst_discrete:.2e}"),
    );
}

fn mean_gap(report: &mut Report) {
    let mut rng = stream_from_seed(5);
    let mut worst_equality = 0.0f64;
    for _ in 0..200 {
        let (ma, mb): (f64, f64) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let alpha = rng.random_range(0.01..0.99);
        let d = renyi_divergence(
            &RewardModel::gaussian(mb, 1.0).unwrap(),
            &RewardModel::gaussian(ma, 1.0).unwrap(),
            DivergenceOrder::new(alpha).unwrap(),
        )
        .unwrap();
        let bound = subgaussian_mean_gap_bound(1.0, 1.0, alpha, d);
        worst_equality = worst_equality.max(((ma - mb).abs() - bound).abs());
    }
    let mut worst_slack = f64::INFINITY;
    for _ in 0..200 {
        let (la, lb): (f64, f64) = (rng.random_range(0.5..4.0), rng.random_range(0.5..4.0));
        let alpha = rng.random_range(0.01..0.99);
        let d = renyi_divergence(
            &RewardModel::poisson(la).unwrap(),
            &RewardModel::poisson(lb).unwrap(),
            DivergenceOrder::new(alpha).unwrap(),
        )
        .unwrap();
        worst_slack = worst_slack.min(exp_family_mean_gap_bound(4.0, 0.5, alpha, d) - (la - lb).abs());
    }
    report.line(
        5,
        "mean-gap inequalities",
        worst_equality <= 1e-10 && worst_slack >= -1e-10,
        format!("gaussian max |gap - bound| = {worst_equality:.2e}; poisson min(bound - gap) = {worst_slack:.3e}"),
    );
}

fn posterior_algebra(report: &mut Report) {
    let mut rng = stream_from_seed(6);
    let mut failures = 0usize;
    let close = |a: &PosteriorParams<f64>, b: &PosteriorParams<f64>| match (a, b) {
        (
            PosteriorParams::GaussianGaussian { post_mean: m1, post_precision: p1, .. },
            PosteriorParams::GaussianGaussian { post_mean: m2, post_precision: p2, .. },
        ) => p1 == p2 && (m1 - m2).abs() <= 1e-12 * (1.0 + m1.abs()),
        _ => a == b,
    };
    for family in 0..4 {
        for _ in 0..1000 {
            let len = rng.random_range(0..80);
            let alpha = rng.random_range(0.01..=1.0);
            let (prior, rewards): (PriorSpec<f64>, Vec<f64>) = match family {
                0 => (PriorSpec::beta(1.0, 2.0).unwrap(), (0..len).map(|_| rng.random_range(0..2) as f64).collect()),
                1 => (
                    PriorSpec::dirichlet(vec![1.0, 0.5, 2.0]).unwrap(),
                    (0..len).map(|_| rng.random_range(0..3) as f64).collect(),
                ),
                2 => (
                    PriorSpec::gaussian(0.5, 2.0, 1.5).unwrap(),
                    (0..len).map(|_| rng.random_range(-5.0..5.0)).collect(),
                ),
                _ => (PriorSpec::gamma(2.0, 1.0).unwrap(), (0..len).map(|_| rng.random_range(0..20) as f64).collect()),
            };
            let fold = |a: f64, xs: &[f64]| TemperedPosterior::new(prior.clone(), a).unwrap().batch_update(xs).unwrap();
            let mut shuffled = rewards.clone();
            shuffled.shuffle(&mut rng);
            let doubled: Vec<f64> = rewards.iter().flat_map(|&x| [x, x]).collect();
            let textbook = textbook_params(&prior, &rewards);
            let ok = close(&fold(alpha, &rewards).params(), &fold(alpha, &shuffled).params())
                && close(&fold(1.0, &rewards).params(), &textbook)
                && close(&fold(0.5, &doubled).params(), &fold(1.0, &rewards).params());
            if !ok {
                failures += 1;
            }
        }
    }
    report.line(
        6,
        "tempered-posterior algebra",
        failures == 0,
        format!("4 families x 1000 sequences, {failures} failures"),
    );
}

/// Standard conjugate updates with full-weight likelihoods.
fn textbook_params(prior: &PriorSpec<f64>, xs: &[f64]) -> PosteriorParams<f64> {
    match prior {
        PriorSpec::Beta { a, b } => {
            let s = xs.iter().filter(|&&x| x == 1.0).count() as f64;
            PosteriorParams::BetaBernoulli {
                a: a + s,
                b: b + (xs.len() as f64 - s),
            }
        }
        PriorSpec::Dirichlet { conc, support } => {
            let mut c = conc.clone();
            for &x in xs {
                c[x as usize] += 1.0;
            }
            PosteriorParams::DirichletCategorical {
                conc: c,
                support: support.clone(),
            }
        }
        PriorSpec::Gaussian {
            mean,
            precision,
            likelihood_var,
        } => {
            let post_precision = precision + xs.len() as f64 / likelihood_var;
            let sum: f64 = xs.iter().sum();
            PosteriorParams::GaussianGaussian {
                post_mean: (precision * mean + sum / likelihood_var) / post_precision,
                post_precision,
                likelihood_var: *likelihood_var,
            }
        }
        PriorSpec::Gamma { shape, rate } => PosteriorParams::GammaPoisson {
            shape: shape + xs.iter().sum::<f64>(),
            rate: rate + xs.len() as f64,
        },
    }
}

fn worked_values(report: &mut Report) {
    // References are the closed forms evaluated by hand at each input.
    let one_gap = |t: u64| BoundInputs::new(vec![0.3], t, 0.5).unwrap();
    let c = 0.015625;
    let env = |k: usize, t: u64| {
        thm2_independent_bound(&BoundInputs::new(vec![0.3], t, 0.5).unwrap().with_arms(k).unwrap())
            .unwrap()
            .envelope_sqrt_term
    };
    let bern = BanditInstance::new(vec![RewardModel::bernoulli(0.6).unwrap(), RewardModel::bernoulli(0.5).unwrap()]).unwrap();
    let gauss = BanditInstance::new(vec![
        RewardModel::gaussian(1.0, 1.0).unwrap(),
        RewardModel::gaussian(0.5, 1.0).unwrap(),
    ])
    .unwrap();
    let boundary = BoundInputs::new(vec![1.0], 576, 0.5).unwrap();
    let checks: Vec<(&str, f64, f64)> = vec![
        ("c_alpha(0.5)", c_alpha(0.5, 1.0).unwrap(), 0.5 * 0.5 / 16.0),
        ("c_alpha(1/3)", c_alpha(1.0 / 3.0, 1.0).unwrap(), (2.0 / 3.0) * (2.0 / 3.0) / 16.0),
        ("thm1 T=1e6", thm1_instance_bound(&one_gap(1_000_000)).unwrap(), 18.0 * 156.25f64.ln() / (c * 0.3) + 0.3 + 27.0 / (2.0 * c * 0.3)),
        ("thm1 T=100", thm1_instance_bound(&one_gap(100)).unwrap(), 0.3 + 27.0 / (2.0 * c * 0.3)),
        ("thm1 log boundary", thm1_instance_bound(&boundary).unwrap(), 1.0 + 27.0 / (2.0 * c)),
        ("thm3 T=1000", thm3_instance_bound(&one_gap(1000)).unwrap(), 0.3 * (18.0 * 1000f64.ln() / (c * 0.09) + 2.5)),
        ("thm3 T=1", thm3_instance_bound(&one_gap(1)).unwrap(), 0.75),
        (
            "thm3 doubling",
            thm3_instance_bound(&one_gap(2000)).unwrap() - thm3_instance_bound(&one_gap(1000)).unwrap(),
            18.0 * 2f64.ln() / (c * 0.3),
        ),
        ("thm2 envelope K=2 T=4", env(2, 4), (8.0 * 2f64.ln() / c).sqrt()),
        ("thm2 envelope 4T / T", env(2, 16) / env(2, 4), 2.0),
        ("thm2 envelope K=4 / K=2", env(4, 4) / env(2, 4), 2.0),
        ("lower bound bernoulli", asymptotic_lower_bound(&bern).unwrap(), 0.1 / (0.5 * (0.5f64 / 0.6).ln() + 0.5 * (0.5f64 / 0.4).ln())),
        ("lower bound gaussian", asymptotic_lower_bound(&gauss).unwrap(), 2.0 * 1.0 / 0.5),
    ];
    let log_dropped = thm1_terms(&one_gap(100)).unwrap()[0].log_dropped;
    let mut bad = Vec::new();
    for (name, got, want) in &checks {
        if ((got - want) / want).abs() > 1e-6 {
            bad.push(format!("{name}: {got} vs {want}"));
        }
    }
    let pass = bad.is_empty() && log_dropped;
    report.line(
        7,
        "worked bound values",
        pass,
        if pass {
            format!("{} values agree to 6 significant figures", checks.len())
        } else {
            bad.join("; ")
        },
    );
}

fn determinism(report: &mut Report) {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/alpha_sweep.json");
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let mut codes = Vec::new();
    for (dir, threads) in dirs.iter().zip(["1", "8", "8"]) {
        codes.push(run_cli([
            "alpha-bandits",
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--output-dir",
            dir.path().to_str().unwrap(),
            "--threads",
            threads,
            "--set",
            "horizon=2000",
            "--set",
            "replicates=10",
        ]));
    }
    let files: Vec<Vec<u8>> = dirs.iter().map(|d| fs::read(d.path().join("traces.csv")).unwrap()).collect();
    let pass = codes.iter().all(|&c| c == 0) && files[0] == files[1] && files[1] == files[2];
    report.line(
        8,
        "determinism",
        pass,
        format!(
            "traces.csv ({} bytes) identical for 1 vs 8 threads and across repeated runs: {}",
            files[0].len(),
            files[0] == files[1] && files[1] == files[2]
        ),
    );
}

fn log_shape(report: &mut Report, traces: &[RegretTrace<f64>]) {
    let instance = eight_arm_instance();
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.4, 0.6, 0.8, 1.0] {
        let members: Vec<&RegretTrace<f64>> = traces.iter().filter(|t| t.alpha == Some(alpha)).collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = (1000..=10_000)
            .map(|t| {
                let column: Vec<f64> = members.iter().map(|m| m.cum_regret[t - 1]).collect();
                (t as f64, mean(&column))
            })
            .unzip();
        let fit = fit_log(&xs, &ys);
        pass &= fit.r_squared >= 0.9;
        let bound = if alpha < 1.0 {
            let at = |t: u64| thm3_instance_bound(&BoundInputs::from_instance(&instance, t, alpha).unwrap()).unwrap();
            format!(", thm3(r0=1) at 1e3/1e4 = {:.0}/{:.0}", at(1000), at(10_000))
        } else {
            String::new()
        };
        parts.push(format!(
            "a={alpha}: R2={:.4}, slope={:.2}, mean regret at 1e3/1e4 = {:.1}/{:.1}{bound}",
            fit.r_squared,
            fit.slope,
            ys[0],
            ys[ys.len() - 1]
        ));
    }
    report.line(9, "log-growth shape (bounds reported, not asserted)", pass, parts.join("; "));
}

fn main() {
    let mut report = Report { failures: 0 };
    let sweep = alpha_sweep(&mut report);
    baselines(&mut report);
    concentration(&mut report);
    divergence_oracle(&mut report);
    mean_gap(&mut report);
    posterior_algebra(&mut report);
    worked_values(&mut report);
    determinism(&mut report);
    log_shape(&mut report, &sweep);
    if report.failures > 0 {
        println!("{} acceptance criteria failed", report.failures);
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
