//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any criterion fails.

mod fixtures {
    include!("../../core/tests/fixtures/p2p_grid.rs");
}

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use cvqan::runner::run_policy;
use cvqan::scenario::{PolicySpec, Scenario, SweepParameter};
use cvqan_core::gaussian::{symplectic_eigenvalues, GaussianState, ModeSelection};
use cvqan_core::network::{
    attach_detector_model, build_network_covariance, Allocation, Capability, ChannelSpec, Level, Network,
    NetworkConfig, Partition, SecurityPolicy,
};
use cvqan_core::pm::{eb_covariance_from_pm, simulate_network};
use cvqan_core::skr::{plob_n_bound, skr_report, NetworkAnalysis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const DISTANCES_KM: [f64; 3] = [5.0, 15.0, 30.0];

const AC_TARGET_GBPS: [f64; 3] = [13.76, 7.28, 2.47];
const AC_REL_TOL: f64 = 0.25;
const AC_RUNTIME: Duration = Duration::from_secs(300);

const FS_TARGET_GBPS: [f64; 2] = [3.60, 0.26];
const FS_FACTOR: f64 = 2.0;

const PER_USER_TARGET_MBPS: f64 = 45.26;
const PER_USER_REL_TOL: f64 = 0.25;
const UNIFORM_REL_TOL: f64 = 1e-9;

const P2P_ABS_TOL: f64 = 1e-6;
const P2P_RUNTIME: Duration = Duration::from_secs(10);

const PM_SYMBOLS: usize = 1_000_000;
const PM_REL_TOL: f64 = 0.01;
const PM_SIGMA_TOL: f64 = 3.0;
const PM_RUNTIME: Duration = Duration::from_secs(120);

const INVARIANT_CASES: usize = 200;
const INVARIANT_SEED: u64 = 0x5eed_ac7e;
const NU_FLOOR: f64 = 1.0 - 1e-7;
const ORDER_TOL: f64 = 1e-9;

const DETECTOR_ETA: f64 = 0.56;
const DETECTOR_V_EL: f64 = 0.31;
const DETECTOR_TARGET: f64 = 1.31;
const DETECTOR_TOL: f64 = 1e-12;

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scenario(file: &str) -> Scenario {
    Scenario::load(&root().join("scenarios").join(file)).expect("shipped scenario loads")
}

fn policy_spec(capability: Capability, partition: Partition, level: Level) -> PolicySpec {
    let p = SecurityPolicy::new(capability, partition, level);
    PolicySpec {
        capability,
        partition,
        level,
        block_size: p.block_size,
        eps_pe: p.eps_pe,
        eps_smooth: p.eps_smooth,
        eps_hash: p.eps_hash,
        preset: p.preset,
    }
}

fn within_rel(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol * target.abs()
}

struct DeploymentRates {
    ac: Vec<f64>,
    fs: Vec<f64>,
    ac_elapsed: Duration,
    untrusted: Vec<f64>,
}

fn deployment_rates(deployment: &Scenario) -> DeploymentRates {
    let trusted_ac = policy_spec(Capability::Local, Partition::Trusted, Level::AC);
    let trusted_fs = deployment
        .policies
        .iter()
        .find(|p| p.partition == Partition::Trusted && p.level == Level::FS)
        .cloned()
        .unwrap_or_else(|| policy_spec(Capability::Local, Partition::Trusted, Level::FS));
    let untrusted_ac = policy_spec(Capability::Local, Partition::Untrusted, Level::AC);
    let at = |d: f64| deployment.with_parameter(SweepParameter::DistanceKm, d);

    let start = Instant::now();
    let ac = DISTANCES_KM.iter().map(|&d| run_policy(&at(d), &trusted_ac).unwrap().network_aggregate).collect();
    let ac_elapsed = start.elapsed();
    let fs = DISTANCES_KM.iter().map(|&d| run_policy(&at(d), &trusted_fs).unwrap().network_aggregate).collect();
    let untrusted =
        DISTANCES_KM.iter().map(|&d| run_policy(&at(d), &untrusted_ac).unwrap().network_aggregate).collect();
    DeploymentRates { ac, fs, ac_elapsed, untrusted }
}

fn c1(r: &DeploymentRates) -> Outcome {
    let mut pass = r.ac_elapsed < AC_RUNTIME;
    let mut parts = Vec::new();
    for ((&d, &k), &t) in DISTANCES_KM.iter().zip(&r.ac).zip(&AC_TARGET_GBPS) {
        let ok = within_rel(k / 1e9, t, AC_REL_TOL);
        pass &= ok;
        parts.push(format!("{d} km {:.3} Gbps (target {t} ±25%{})", k / 1e9, if ok { "" } else { ", out" }));
    }
    parts.push(format!("runtime {:.1} s", r.ac_elapsed.as_secs_f64()));
    Outcome { id: 1, name: "AC aggregate, 304-user scenario", pass, detail: parts.join("; ") }
}

fn c2(r: &DeploymentRates) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for ((&d, &k), &t) in DISTANCES_KM.iter().zip(&r.fs).zip(&FS_TARGET_GBPS) {
        let g = k / 1e9;
        let ok = g >= t / FS_FACTOR && g <= t * FS_FACTOR;
        pass &= ok;
        parts.push(format!("{d} km {g:.3} Gbps (target {t} ×/÷2{})", if ok { "" } else { ", out" }));
    }
    for ((&d, &fs), &ac) in DISTANCES_KM.iter().zip(&r.fs).zip(&r.ac) {
        let ok = fs < ac;
        pass &= ok;
        if !ok {
            parts.push(format!("FS {fs:.4e} not below AC {ac:.4e} at {d} km"));
        }
    }
    Outcome { id: 2, name: "FS aggregate, 304-user scenario, n = 1e10", pass, detail: parts.join("; ") }
}

fn c3(deployment: &Scenario, r: &DeploymentRates) -> Outcome {
    let (_, net) = cvqan::runner::realize(deployment).unwrap();
    let users = net.n_users() as f64;
    let mean = r.ac[0] / users / 1e6;
    let mean_ok = within_rel(mean, PER_USER_TARGET_MBPS, PER_USER_REL_TOL);

    let mut uniform = deployment.clone();
    uniform.network.isolation_db = Some(f64::INFINITY);
    let res = run_policy(&uniform, &policy_spec(Capability::Local, Partition::Trusted, Level::AC)).unwrap();
    let first = res.report.per_user[0].key_rate;
    let all_equal = res.report.per_user.iter().all(|u| within_rel(u.key_rate, first, UNIFORM_REL_TOL));
    let sum_ok = within_rel(res.network_aggregate, users * first, UNIFORM_REL_TOL) && first > 0.0;
    Outcome {
        id: 3,
        name: "per-user consistency",
        pass: mean_ok && sum_ok && all_equal,
        detail: format!(
            "mean per-user at 5 km {mean:.3} Mbps (target {PER_USER_TARGET_MBPS} ±25%{}); uniform aggregate {:.6e} vs {users} × {first:.6e} (rel {:.1e}, {} classes)",
            if mean_ok { "" } else { ", out" },
            res.network_aggregate,
            ((res.network_aggregate - users * first) / (users * first)).abs(),
            res.report.classes
        ),
    }
}

fn p2p_raw(t: f64, eps: f64, eta: f64, v_el: f64, partition: Partition) -> f64 {
    let mut c = NetworkConfig::uniform(1, 1, fixtures::GRID_V_A, f64::INFINITY, 0.0, 0.17, eps, eta, v_el);
    c.channel = ChannelSpec::Transmittance(vec![t]);
    c.beta = vec![fixtures::GRID_BETA];
    let net = c.validate().unwrap();
    skr_report(&net, &SecurityPolicy::new(Capability::Local, partition, Level::AC)).unwrap().per_user[0].raw
}

fn c4() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (i, &t) in fixtures::GRID_T.iter().enumerate() {
        for (j, &e) in fixtures::GRID_EPS.iter().enumerate() {
            for partition in [Partition::Untrusted, Partition::Trusted, Partition::AllMeasured] {
                worst = worst.max((p2p_raw(t, e, 1.0, 0.0, partition) - fixtures::IDEAL[i][j]).abs());
            }
            worst = worst.max((p2p_raw(t, e, 0.56, 0.31, Partition::Trusted) - fixtures::TRUSTED[i][j]).abs());
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        id: 4,
        name: "point-to-point oracle over 5×5 (T, ε)",
        pass: worst < P2P_ABS_TOL && elapsed < P2P_RUNTIME,
        detail: format!(
            "max |Δ| {worst:.2e} bits/symbol (tol {P2P_ABS_TOL:e}); runtime {:.2} s",
            elapsed.as_secs_f64()
        ),
    }
}

fn c5() -> Outcome {
    let toy = scenario("toy.toml");
    let (_, net) = cvqan::runner::realize(&toy).unwrap();
    let mut cfg = toy.pm.clone().unwrap_or_default().config();
    cfg.symbols = PM_SYMBOLS;
    let start = Instant::now();
    let run = simulate_network(&net, &cfg, toy.seed).unwrap();
    let emp = eb_covariance_from_pm(&run, &net).unwrap();
    let eb = build_network_covariance(&net, cfg.capability).unwrap();
    let elapsed = start.elapsed();
    let d = emp.cov.nrows();
    let (mut failures, mut entries, mut worst) = (0, 0, 0.0f64);
    for i in 0..d {
        for j in i..d {
            let e = eb.cov()[(i, j)];
            let tol = (PM_REL_TOL * e.abs()).max(PM_SIGMA_TOL * emp.standard_error[(i, j)]);
            let dev = (emp.cov[(i, j)] - e).abs();
            worst = worst.max(dev / tol);
            entries += 1;
            if dev > tol {
                failures += 1;
            }
        }
    }
    Outcome {
        id: 5,
        name: "prepare-and-measure vs entanglement-based covariance",
        pass: failures == 0 && elapsed < PM_RUNTIME,
        detail: format!(
            "N_W={} N_B={} {PM_SYMBOLS} symbols seed {}: {failures}/{entries} entries outside max(1% rel, 3σ), worst {worst:.3} of tolerance; runtime {:.1} s",
            net.n_w(),
            net.n_b(),
            toy.seed,
            elapsed.as_secs_f64()
        ),
    }
}

struct Case {
    cfg: NetworkConfig,
    capability: Capability,
}

fn random_case(rng: &mut ChaCha20Rng) -> Case {
    let (n_w, n_b) = (rng.random_range(1..=3usize), rng.random_range(1..=3usize));
    let n = n_w * n_b;
    let iso = if rng.random_bool(0.25) { f64::INFINITY } else { rng.random_range(15.0..40.0) };
    let weights: Vec<f64> = (0..n_b).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let eta = rng.random_range(0.5..=1.0);
    let v_el = rng.random_range(0.0..0.3);
    let mut cfg = NetworkConfig::uniform(n_w, n_b, 4.0, iso, 0.0, 0.2, 0.0, eta, v_el);
    cfg.v_a = (0..n_w).map(|_| rng.random_range(1.0..6.0)).collect();
    cfg.allocation = Allocation::Isolation { db: iso };
    cfg.branch_ratios = weights.iter().map(|w| w / total).collect();
    cfg.channel =
        ChannelSpec::Distance { km: (0..n).map(|_| rng.random_range(0.0..40.0)).collect(), alpha_db_per_km: 0.2 };
    cfg.epsilon = (0..n).map(|_| rng.random_range(0.0..0.1)).collect();
    cfg.theta_p = (0..n).map(|_| rng.random_range(-3.2..3.2)).collect();
    cfg.beta = vec![rng.random_range(0.85..=1.0); n];
    let capability = if rng.random_bool(0.5) { Capability::Global } else { Capability::Local };
    Case { cfg, capability }
}

fn shifted(cfg: &NetworkConfig, dkm: f64, deps: f64) -> Network {
    let mut c = cfg.clone();
    if let ChannelSpec::Distance { km, .. } = &mut c.channel {
        km.iter_mut().for_each(|d| *d += dkm);
    }
    c.epsilon.iter_mut().for_each(|e| *e += deps);
    c.validate().unwrap()
}

fn check_case(c: &Case) -> Result<(), String> {
    let net = c.cfg.validate().map_err(|e| e.to_string())?;
    let state = build_network_covariance(&net, c.capability).map_err(|e| e.to_string())?;
    let nu_min = symplectic_eigenvalues(&state).unwrap().iter().cloned().fold(f64::INFINITY, f64::min);
    if nu_min < NU_FLOOR {
        return Err(format!("ν_min {nu_min}"));
    }
    for partition in [Partition::Untrusted, Partition::Trusted, Partition::AllMeasured] {
        let pol = |l| SecurityPolicy::new(c.capability, partition, l);
        let reports: Vec<_> = [Level::AC, Level::FS, Level::CS, Level::FC]
            .iter()
            .map(|&l| skr_report(&net, &pol(l)).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        for u in 0..net.n_users() {
            let k: Vec<f64> = reports.iter().map(|r| r.per_user[u].key_rate).collect();
            if k[0] + ORDER_TOL < k[1] || k[1] + ORDER_TOL < k[3] || k[0] + ORDER_TOL < k[2] {
                return Err(format!("{partition:?} user {u} level order {k:?}"));
            }
        }
        let ac = &reports[0];
        for user in &ac.per_user {
            if user.bits_per_use(ac.f_r) > user.bound_bits_per_use + ORDER_TOL {
                return Err(format!("{partition:?} user {} above PLOB", user.i_prime));
            }
        }
        let t: Vec<f64> = ac.per_user.iter().map(|u| u.t_bound).collect();
        let network_bound = ac.f_r * plob_n_bound(&t).0 * (1.0 + ORDER_TOL);
        if ac.aggregate > network_bound || ac.joint.as_ref().is_some_and(|j| j.key_rate > network_bound) {
            return Err(format!("{partition:?} above PLOB-N"));
        }
        let base = ac.aggregate;
        let farther = skr_report(&shifted(&c.cfg, 2.0, 0.0), &pol(Level::AC)).unwrap().aggregate;
        let noisier = skr_report(&shifted(&c.cfg, 0.0, 0.01), &pol(Level::AC)).unwrap().aggregate;
        if farther > base * (1.0 + ORDER_TOL) + ORDER_TOL || noisier > base * (1.0 + ORDER_TOL) + ORDER_TOL {
            return Err(format!("{partition:?} not monotone: {base} -> {farther} (distance), {noisier} (noise)"));
        }
    }
    let ac = |p| NetworkAnalysis::new(&net, &SecurityPolicy::new(c.capability, p, Level::AC)).unwrap();
    let (untrusted, trusted) = (ac(Partition::Untrusted), ac(Partition::Trusted));
    for user in net.users() {
        let (cu, ct) = (untrusted.holevo(user).unwrap(), trusted.holevo(user).unwrap());
        if cu + ORDER_TOL < ct {
            return Err(format!("user {} χ untrusted {cu} < trusted {ct}", user.i_prime()));
        }
    }
    Ok(())
}

fn c6() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(INVARIANT_SEED);
    let mut failures = Vec::new();
    for i in 0..INVARIANT_CASES {
        let case = random_case(&mut rng);
        if let Err(e) = check_case(&case) {
            failures.push(format!("case {i}: {e}"));
        }
    }
    Outcome {
        id: 6,
        name: "invariants over random small networks",
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{INVARIANT_CASES} configurations, 0 failures")
        } else {
            format!("{} of {INVARIANT_CASES} failed; first: {}", failures.len(), failures[0])
        },
    }
}

fn c7() -> Outcome {
    let vacuum = GaussianState::vacuum(1);
    let det =
        attach_detector_model(&vacuum, &ModeSelection::single(0, 1).unwrap(), DETECTOR_ETA, DETECTOR_V_EL).unwrap();
    let (vx, vp) = (det.state.cov()[(0, 0)], det.state.cov()[(1, 1)]);
    let dev = (vx - DETECTOR_TARGET).abs().max((vp - DETECTOR_TARGET).abs());
    Outcome {
        id: 7,
        name: "detector model on vacuum",
        pass: dev <= DETECTOR_TOL,
        detail: format!("measured variance x {vx:.15}, p {vp:.15} SNU (target {DETECTOR_TARGET}, |Δ| {dev:.1e})"),
    }
}

const SUBCOMMANDS: [&str; 6] = ["skr", "sweep", "heatmap", "covmat", "bounds", "pm-validate"];

fn run_cli(out: &Path, threads: usize) -> Result<Vec<(String, Vec<u8>)>, String> {
    let toy = root().join("scenarios/toy.toml");
    for sub in SUBCOMMANDS {
        let status = Command::new(env!("CARGO_BIN_EXE_cvqan"))
            .arg(sub)
            .arg("--scenario")
            .arg(&toy)
            .arg("--out")
            .arg(out)
            .arg("--threads")
            .arg(threads.to_string())
            .output()
            .map_err(|e| e.to_string())?
            .status;
        if !status.success() {
            return Err(format!("{sub} exited with {status}"));
        }
    }
    let mut files: Vec<_> = std::fs::read_dir(out)
        .map_err(|e| e.to_string())?
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    Ok(files)
}

fn c8() -> Outcome {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let runs: Result<Vec<_>, _> =
        dirs.iter().zip([4usize, 4, 1]).map(|(d, threads)| run_cli(d.path(), threads)).collect();
    let (pass, detail) = match runs {
        Err(e) => (false, e),
        Ok(runs) => {
            let names: Vec<&str> = runs[0].iter().map(|(n, _)| n.as_str()).collect();
            let repeat = runs[0] == runs[1];
            let threads = runs[0] == runs[2];
            (
                repeat && threads && !names.is_empty(),
                format!(
                    "{} files from {} subcommands; repeat run {}, 4 vs 1 threads {}",
                    names.len(),
                    SUBCOMMANDS.len(),
                    if repeat { "identical" } else { "differs" },
                    if threads { "identical" } else { "differs" }
                ),
            )
        }
    };
    Outcome { id: 8, name: "byte-identical CLI outputs", pass, detail }
}

fn main() {
    let deployment = scenario("tsqan304.toml");
    let rates = deployment_rates(&deployment);
    let outcomes = [c1(&rates), c2(&rates), c3(&deployment, &rates), c4(), c5(), c6(), c7(), c8()];
    for o in &outcomes {
        println!("[{}] criterion {}: {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.name, o.detail);
    }
    let untrusted: Vec<String> =
        DISTANCES_KM.iter().zip(&rates.untrusted).map(|(d, k)| format!("{d} km {:.3} Gbps", k / 1e9)).collect();
    println!("[INFO] local untrusted AC aggregate, same scenario: {}", untrusted.join("; "));
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
