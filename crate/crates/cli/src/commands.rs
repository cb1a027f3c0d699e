//! Subcommand implementations. Each returns the process exit status on completion.

use std::path::{Path, PathBuf};

use cvqan_core::network::{build_network_covariance, build_network_covariance_sequential, CovarianceView};
use cvqan_core::pm::{
    eb_covariance_from_pm, estimate_parameters, simulate_network, EstimationConfig, EstimationResult,
};
use cvqan_core::skr::{plob_bound, plob_n_bound};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{write_csv, write_json, write_matrix, write_user_csv};
use crate::runner::{evaluate, realize, run_policy, PolicyResult};
use crate::scenario::{PolicySpec, Scenario, SweepParameter};
use crate::{exit, CliError};

/// Default cap on `N_W` plus user count for the prepare-and-measure check.
pub const PM_MODE_GUARD: usize = 12;

pub struct Context {
    pub scenario: Scenario,
    pub out: PathBuf,
}

impl Context {
    pub fn new(scenario_path: &Path, out: Option<PathBuf>, seed: Option<u64>) -> Result<Self, CliError> {
        let mut scenario = Scenario::load(scenario_path)?;
        if let Some(s) = seed {
            scenario.seed = s;
        }
        let out = out.or_else(|| scenario.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
        std::fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
        Ok(Self { scenario, out })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn selected<'a>(ctx: &'a Context, labels: &[String]) -> Result<Vec<&'a PolicySpec>, CliError> {
    if labels.is_empty() {
        return Ok(ctx.scenario.policies.iter().collect());
    }
    let known: Vec<String> = ctx.scenario.policies.iter().map(|p| p.label()).collect();
    let missing: Vec<String> = labels
        .iter()
        .filter(|l| !known.contains(l))
        .map(|l| format!("unknown policy {l:?}; known: {}", known.join(", ")))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Validation(missing));
    }
    Ok(ctx.scenario.policies.iter().filter(|p| labels.contains(&p.label())).collect())
}

pub fn skr(ctx: &Context, labels: &[String]) -> Result<i32, CliError> {
    let policies = selected(ctx, labels)?;
    let results: Vec<PolicyResult> =
        policies.par_iter().map(|p| run_policy(&ctx.scenario, p)).collect::<Result<_, _>>()?;
    let mut code = exit::SUCCESS;
    for r in &results {
        write_json(&ctx.path(&format!("skr_{}.json", r.label)), r)?;
        write_user_csv(&ctx.path(&format!("skr_{}.csv", r.label)), &r.report)?;
        let joint = r.network_joint.map(|j| format!(", joint {j:.6e} bit/s")).unwrap_or_default();
        println!(
            "{}: aggregate {:.6e} bit/s over {} users{joint}; PLOB-N {:.6e} bit/s",
            r.label,
            r.network_aggregate,
            r.report.per_user.len() * r.replicas,
            r.network_bound
        );
        if r.clamped() {
            println!("{}: key rate clamped to zero", r.label);
            code = exit::INCOMPLETE;
        }
    }
    Ok(code)
}

#[derive(Debug, Serialize)]
struct SweepRow {
    parameter: SweepParameter,
    value: f64,
    policy: String,
    aggregate_bps: Option<f64>,
    joint_bps: Option<f64>,
    plob_n_bps: Option<f64>,
    finite: bool,
    /// Non-increasing relative to the previous point, for distance and excess-noise sweeps.
    monotone: Option<bool>,
    error: Option<String>,
}

pub fn sweep(ctx: &Context) -> Result<i32, CliError> {
    let spec = ctx
        .scenario
        .sweep
        .clone()
        .ok_or_else(|| CliError::Validation(vec!["scenario has no [sweep] section".into()]))?;
    let jobs: Vec<(usize, usize)> =
        (0..spec.values.len()).flat_map(|i| (0..ctx.scenario.policies.len()).map(move |p| (i, p))).collect();
    let results: Vec<Result<PolicyResult, CliError>> = jobs
        .par_iter()
        .map(|&(i, p)| {
            let s = ctx.scenario.with_parameter(spec.parameter, spec.values[i]);
            run_policy(&s, &s.policies[p])
        })
        .collect();
    let mut rows = Vec::with_capacity(jobs.len());
    let mut code = exit::SUCCESS;
    let checks_monotone = matches!(spec.parameter, SweepParameter::DistanceKm | SweepParameter::ExcessNoiseSnu);
    let mut last: Vec<Option<f64>> = vec![None; ctx.scenario.policies.len()];
    for (&(i, p), res) in jobs.iter().zip(results) {
        let policy = ctx.scenario.policies[p].label();
        let row = match res {
            Ok(r) => {
                let finite = r.network_aggregate.is_finite() && r.network_bound.is_finite();
                let monotone = checks_monotone
                    .then(|| last[p].map_or(true, |prev| r.network_aggregate <= prev * (1.0 + 1e-9) + 1e-9));
                last[p] = Some(r.network_aggregate);
                SweepRow {
                    parameter: spec.parameter,
                    value: spec.values[i],
                    policy,
                    aggregate_bps: Some(r.network_aggregate),
                    joint_bps: r.network_joint,
                    plob_n_bps: Some(r.network_bound),
                    finite,
                    monotone,
                    error: None,
                }
            }
            Err(CliError::Numerical(e)) => SweepRow {
                parameter: spec.parameter,
                value: spec.values[i],
                policy,
                aggregate_bps: None,
                joint_bps: None,
                plob_n_bps: None,
                finite: false,
                monotone: None,
                error: Some(e),
            },
            Err(e) => return Err(e),
        };
        if !row.finite || row.monotone == Some(false) {
            code = exit::INCOMPLETE;
        }
        println!(
            "{:?}={} {}: {}",
            spec.parameter,
            row.value,
            row.policy,
            row.aggregate_bps.map_or_else(|| "error".to_string(), |a| format!("{a:.6e} bit/s"))
        );
        rows.push(row);
    }
    write_csv(&ctx.path("sweep.csv"), &rows)?;
    Ok(code)
}

#[derive(Debug, Serialize)]
struct HeatmapCell {
    k: usize,
    sample: usize,
    h: usize,
    i_prime: usize,
    key_rate_bps: f64,
}

/// Sorted distinct branches sampled per frequency group.
pub fn sample_branches(n_w: usize, n_b: usize, samples: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_w)
        .map(|_| {
            let mut h: Vec<usize> =
                rand::seq::index::sample(&mut rng, n_b, samples).into_iter().map(|h| h + 1).collect();
            h.sort_unstable();
            h
        })
        .collect()
}

pub fn heatmap(ctx: &Context) -> Result<i32, CliError> {
    let spec = ctx
        .scenario
        .heatmap
        .clone()
        .ok_or_else(|| CliError::Validation(vec!["scenario has no [heatmap] section".into()]))?;
    let (_, net) = realize(&ctx.scenario)?;
    if spec.samples_per_group > net.n_b() {
        return Err(CliError::Validation(vec![format!(
            "heatmap.samples_per_group = {} exceeds N_B = {}",
            spec.samples_per_group,
            net.n_b()
        )]));
    }
    let branches = sample_branches(net.n_w(), net.n_b(), spec.samples_per_group, ctx.scenario.seed);
    let reports = ctx
        .scenario
        .policies
        .par_iter()
        .map(|p| evaluate(&net, &p.policy()).map(|r| (p.label(), r)))
        .collect::<Result<Vec<_>, _>>()?;
    for (label, report) in &reports {
        let mut cells = Vec::new();
        let mut m = nalgebra::DMatrix::zeros(net.n_w(), spec.samples_per_group);
        for (k0, hs) in branches.iter().enumerate() {
            for (j, &h) in hs.iter().enumerate() {
                let i_prime = k0 * net.n_b() + h;
                let rate = report.per_user[i_prime - 1].key_rate;
                m[(k0, j)] = rate;
                cells.push(HeatmapCell { k: k0 + 1, sample: j + 1, h, i_prime, key_rate_bps: rate });
            }
        }
        write_csv(&ctx.path(&format!("heatmap_{label}.csv")), &cells)?;
        write_matrix(&ctx.path(&format!("heatmap_{label}.txt")), &m)?;
        println!("{label}: {} cells", cells.len());
    }
    Ok(exit::SUCCESS)
}

pub fn view_name(v: CovarianceView) -> &'static str {
    match v {
        CovarianceView::Initial => "initial",
        CovarianceView::PostAllocation => "post-allocation",
        CovarianceView::PostSplitting => "post-splitting",
        CovarianceView::BobSide => "bob-side",
    }
}

pub fn covmat(ctx: &Context, views: &[CovarianceView]) -> Result<i32, CliError> {
    let (_, net) = realize(&ctx.scenario)?;
    let capability = ctx.scenario.policies[0].capability;
    let all = build_network_covariance_sequential(&net, capability)?;
    let views: Vec<CovarianceView> = if views.is_empty() {
        vec![
            CovarianceView::Initial,
            CovarianceView::PostAllocation,
            CovarianceView::PostSplitting,
            CovarianceView::BobSide,
        ]
    } else {
        views.to_vec()
    };
    for v in views {
        let m = all.view(v, net.n_w());
        let name = format!("covariance_{}.txt", view_name(v));
        write_matrix(&ctx.path(&name), &m)?;
        println!("{}: {}x{}", view_name(v), m.nrows(), m.ncols());
    }
    Ok(exit::SUCCESS)
}

#[derive(Debug, Serialize)]
struct BoundRow {
    i_prime: usize,
    k: usize,
    h: usize,
    t_d: f64,
    r_h: f64,
    t_end_to_end: f64,
    plob_bits_per_use: f64,
    plob_rate_bps: f64,
    capped: bool,
}

#[derive(Debug, Serialize)]
struct BoundSummary {
    users: usize,
    replicas: usize,
    symbol_rate_hz: f64,
    plob_n_bits_per_use: f64,
    plob_n_rate_bps: f64,
    capped: bool,
}

pub fn bounds(ctx: &Context) -> Result<i32, CliError> {
    let (realized, net) = realize(&ctx.scenario)?;
    let rows: Vec<BoundRow> = net
        .users()
        .map(|u| {
            let t = net.transmittance(u) * net.branch_ratio(u);
            let (bits, capped) = plob_bound(t);
            BoundRow {
                i_prime: u.i_prime(),
                k: u.k(),
                h: u.h(),
                t_d: net.transmittance(u),
                r_h: net.branch_ratio(u),
                t_end_to_end: t,
                plob_bits_per_use: bits,
                plob_rate_bps: net.f_r() * bits,
                capped,
            }
        })
        .collect();
    let t: Vec<f64> = rows.iter().map(|r| r.t_end_to_end).collect();
    let (bits, capped) = plob_n_bound(&t);
    let r = realized.replicas as f64;
    let summary = BoundSummary {
        users: net.n_users() * realized.replicas,
        replicas: realized.replicas,
        symbol_rate_hz: net.f_r(),
        plob_n_bits_per_use: r * bits,
        plob_n_rate_bps: r * bits * net.f_r(),
        capped,
    };
    write_csv(&ctx.path("bounds.csv"), &rows)?;
    write_json(&ctx.path("bounds.json"), &summary)?;
    println!(
        "PLOB-N {:.6e} bit/s over {} users{}",
        summary.plob_n_rate_bps,
        summary.users,
        if capped { " (capped)" } else { "" }
    );
    Ok(exit::SUCCESS)
}

#[derive(Debug, Serialize)]
struct EntryCheck {
    row: usize,
    col: usize,
    pm: f64,
    eb: f64,
    standard_error: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct PmReport {
    seed: u64,
    symbols: usize,
    rel_tolerance: f64,
    sigma_tolerance: f64,
    pass: bool,
    failures: usize,
    max_abs_deviation: f64,
    max_deviation_over_tolerance: f64,
    phase_error_rms_rad: Vec<f64>,
    estimation: Vec<EstimationResult>,
    entries: Vec<EntryCheck>,
}

pub struct PmOverrides {
    pub symbols: Option<usize>,
    pub allow_large: bool,
    pub rel_tolerance: Option<f64>,
    pub sigma_tolerance: Option<f64>,
}

pub fn pm_validate(ctx: &Context, o: &PmOverrides) -> Result<i32, CliError> {
    let mut spec = ctx.scenario.pm.clone().unwrap_or_default();
    if let Some(n) = o.symbols {
        spec.symbols = n;
    }
    if let Some(r) = o.rel_tolerance {
        spec.rel_tolerance = r;
    }
    if let Some(s) = o.sigma_tolerance {
        spec.sigma_tolerance = s;
    }
    let (_, net) = realize(&ctx.scenario)?;
    let modes = net.n_w() + net.n_users();
    if modes > PM_MODE_GUARD && !o.allow_large {
        return Err(CliError::Validation(vec![format!(
            "{modes} modes exceed the prepare-and-measure guard of {PM_MODE_GUARD}; pass --allow-large to override"
        )]));
    }
    let cfg = spec.config();
    let run = simulate_network(&net, &cfg, ctx.scenario.seed)?;
    let emp = eb_covariance_from_pm(&run, &net)?;
    let eb = build_network_covariance(&net, cfg.capability)?;
    let d = emp.cov.nrows();
    let mut entries = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        for j in i..d {
            let (pm, e, se) = (emp.cov[(i, j)], eb.cov()[(i, j)], emp.standard_error[(i, j)]);
            let tolerance = (spec.rel_tolerance * e.abs()).max(spec.sigma_tolerance * se);
            entries.push(EntryCheck {
                row: i,
                col: j,
                pm,
                eb: e,
                standard_error: se,
                tolerance,
                pass: (pm - e).abs() <= tolerance,
            });
        }
    }
    let est_cfg =
        EstimationConfig { eta_e: net.eta_e(), v_el: net.v_el(), taps: cfg.taps, calibration: cfg.calibration };
    let estimation = net
        .users()
        .map(|u| {
            estimate_parameters(&run.alice_detected[u.k() - 1].samples, &run.bob_detected[u.slot()].samples, &est_cfg)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let failures = entries.iter().filter(|e| !e.pass).count();
    let report = PmReport {
        seed: ctx.scenario.seed,
        symbols: cfg.symbols,
        rel_tolerance: spec.rel_tolerance,
        sigma_tolerance: spec.sigma_tolerance,
        pass: failures == 0,
        failures,
        max_abs_deviation: entries.iter().map(|e| (e.pm - e.eb).abs()).fold(0.0, f64::max),
        max_deviation_over_tolerance: entries.iter().map(|e| (e.pm - e.eb).abs() / e.tolerance).fold(0.0, f64::max),
        phase_error_rms_rad: run.phase_error_rms.clone(),
        estimation,
        entries,
    };
    write_json(&ctx.path("pm_validation.json"), &report)?;
    println!(
        "prepare-and-measure vs entanglement-based: {} ({} of {} entries outside tolerance, worst {:.3} of tolerance)",
        if report.pass { "pass" } else { "fail" },
        failures,
        report.entries.len(),
        report.max_deviation_over_tolerance
    );
    Ok(if report.pass { exit::SUCCESS } else { exit::INCOMPLETE })
}
