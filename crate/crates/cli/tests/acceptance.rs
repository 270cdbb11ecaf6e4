//! Acceptance gate. One PASS/FAIL line per criterion; exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use indiff_core::discrete::{dp_certainty_equivalent, one_period_bruteforce, DpConfig};
use indiff_core::dual::{dual_objective, feasible_policy, martingale_diagnostics, DualKernelSpec};
use indiff_core::kernels::{
    g_eval, hamiltonian, penalty, verify_penalty_equality, Branch, HamiltonianConfig, KernelChoice,
};
use indiff_core::limit::{bachelier_closed_form, hjb_solve, HjbConfig};
use indiff_core::policy::{ClippedPolicy, VolPolicySpec};
use indiff_core::{FrictionSchedule, GridSpec, McConfig, ModelParams, PayoffSpec, RngStreamSpec};

// pinned tolerances and budgets
const SIGMA_K: f64 = 3.0;
const C1_PATHS: usize = 100_000;
const C1_SUBSTEPS: usize = 200;
const C1_BUDGET: Duration = Duration::from_secs(120);
const C2_SAMPLES: usize = 1000;
const C2_SCAN: usize = 2000;
const C2_TOL: f64 = 1e-8;
const C2_BUDGET: Duration = Duration::from_secs(5);
const C3_REPLICATION_TOL: f64 = 1e-4;
const C3_ONE_PERIOD_TOL: f64 = 1e-3;
const C4_ELL: f64 = 1e-3;
const C4_REL_TOL: f64 = 0.01;
const C4_BUDGET: Duration = Duration::from_secs(30);
const C5_GRID_TOL: f64 = 1e-2;
const C6_PATHS: usize = 100_000;
const C6_BUDGET: Duration = Duration::from_secs(300);
const C8_KAPPA: f64 = 0.6;
const C8_PATHS: usize = 100_000;
/// Grids whose per-interval means are tested. A 3-stderr band over all 127
/// intervals of the full scan would trip by chance about 29% of the time.
const C8_MEAN_NS: [usize; 3] = [4, 8, 16];

const SEED: u64 = 20_240_601;

fn desk_model() -> ModelParams {
    ModelParams::new(100.0, 20.0, 0.0, 1.0).unwrap()
}

fn capped_call() -> PayoffSpec {
    PayoffSpec::CappedCall { strike: 100.0, cap: 50.0 }
}

fn friction(model: &ModelParams, kappa: f64) -> FrictionSchedule {
    FrictionSchedule::gaussian_scaled(model, kappa).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn uniform(s: &mut indiff_core::mc::GaussianStream) -> f64 {
    // any map into (0, 1) will do for chord weights
    0.5 * (1.0 + (s.standard()).tanh())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut pass = g_eval(1.0).unwrap() == 0.0;
    notes.push(format!("g(1) = {}", g_eval(1.0).unwrap()));

    let mut s = RngStreamSpec::new(SEED, 1).normals();
    let mut chord_fail = 0;
    for _ in 0..1000 {
        let y1 = (2.0 * s.standard()).exp();
        let y2 = (2.0 * s.standard()).exp();
        let t = uniform(&mut s);
        let lhs = penalty(t * y1 + (1.0 - t) * y2);
        let rhs = t * penalty(y1) + (1.0 - t) * penalty(y2);
        if lhs > rhs + 1e-12 * (1.0 + rhs.abs()) {
            chord_fail += 1;
        }
    }
    pass &= chord_fail == 0;
    notes.push(format!("chord failures {chord_fail}/1000"));

    let mc = McConfig::new(C1_PATHS, C1_SUBSTEPS, SEED);
    let cases = [
        (1.5, Branch::Upper),
        (2.0, Branch::Upper),
        (5.0, Branch::Upper),
        (0.5, Branch::Lower),
        (1.0, Branch::Lower),
        (5.0, Branch::Lower),
    ];
    for (beta, branch) in cases {
        let m: f64 = match branch {
            Branch::Upper => beta / (beta - 1.0),
            Branch::Lower => beta / (beta + 1.0),
        };
        let g_m = m - m.ln() - 1.0;
        let r = verify_penalty_equality(KernelChoice::Kernel { beta, branch }, &mc).unwrap();
        let zm = (r.moment_mc.mean - m).abs() / r.moment_mc.stderr;
        let zp = (r.penalty_mc.mean - g_m).abs() / r.penalty_mc.stderr;
        pass &= zm <= SIGMA_K && zp <= SIGMA_K;
        notes.push(format!("{}({beta}): moment z={zm:.2} penalty z={zp:.2}", branch.name()));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < C1_BUDGET;
    notes.push(format!("{:.1}s", elapsed.as_secs_f64()));
    outcome(pass, notes.join("; "))
}

/// Golden-section maximum of `f` on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd).max(f(a)).max(f(b))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let cfg = HamiltonianConfig::new(1.0, 20.0, 1.0);
    let (ly0, ly1) = (cfg.y_min.ln(), cfg.y_max.ln());
    let grid: Vec<f64> = (0..C2_SCAN)
        .map(|i| (ly0 + (ly1 - ly0) * i as f64 / (C2_SCAN - 1) as f64).exp())
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..C2_SAMPLES {
        // spans interior maximizers and both bounds
        let gamma = -0.05 + 0.06 * (i as f64 + 0.5) / C2_SAMPLES as f64;
        let obj = |y: f64| 0.5 * 400.0 * y * gamma - (y - y.ln() - 1.0) / 2.0;
        let (j, _) = grid
            .iter()
            .map(|&y| obj(y))
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
        let lo = grid[j.saturating_sub(1)];
        let hi = grid[(j + 1).min(C2_SCAN - 1)];
        let brute = golden_max(obj, lo, hi);
        let (value, _) = hamiltonian(gamma, &cfg);
        worst = worst.max((value - brute).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= C2_TOL && elapsed < C2_BUDGET,
        format!("max |H - brute| = {worst:.2e} over {C2_SAMPLES} values; {:.2}s", elapsed.as_secs_f64()),
    )
}

fn criterion_3() -> Outcome {
    let model = desk_model();
    let fr = friction(&model, 1.0);
    let mut pass = true;
    let mut notes = Vec::new();
    let linear = PayoffSpec::LinearTerminal;
    let cfg = DpConfig::for_model(&model, &linear);
    for n in [1, 4, 16] {
        let c = dp_certainty_equivalent(&model, GridSpec::new(n).unwrap(), n as f64, &linear, &fr, &cfg).unwrap();
        let err = (c.c_value - model.x0).abs();
        pass &= err <= C3_REPLICATION_TOL;
        notes.push(format!("x_T n={n} err={err:.1e}"));
    }
    let menu = [
        PayoffSpec::Constant { value: 3.0 },
        PayoffSpec::LinearTerminal,
        capped_call(),
        PayoffSpec::CappedPut { strike: 100.0, cap: 50.0 },
        PayoffSpec::CappedAsian { strike: 100.0, cap: 50.0 },
    ];
    for p in menu {
        let cfg = DpConfig::for_model(&model, &p);
        let dp = dp_certainty_equivalent(&model, GridSpec::new(1).unwrap(), 1.0, &p, &fr, &cfg).unwrap();
        let bf = one_period_bruteforce(&model, 1.0, &p, &fr).unwrap();
        let err = (dp.c_value - bf).abs();
        pass &= err <= C3_ONE_PERIOD_TOL;
        notes.push(format!("{} err={err:.1e}", p.name()));
    }
    outcome(pass, notes.join("; "))
}

/// `E min((X_T - K)^+, C)` by composite Simpson over twelve standard deviations.
fn capped_call_oracle(x0: f64, strike: f64, cap: f64, s: f64) -> f64 {
    let m = 24_000;
    let (a, b) = (-12.0, 12.0);
    let h = (b - a) / m as f64;
    let f = |z: f64| {
        let x = x0 + s * z;
        (x - strike).clamp(0.0, cap) * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
    };
    let mut sum = f(a) + f(b);
    for i in 1..m {
        sum += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let model = desk_model();
    let oracle = capped_call_oracle(100.0, 100.0, 50.0, 20.0);
    let closed = bachelier_closed_form(&capped_call(), &model, None).unwrap();
    let cfg = HjbConfig::for_model(&model, HamiltonianConfig::DEFAULT_Y_MAX).with_resolution(801, HjbConfig::DEFAULT_N_T);
    let pi = hjb_solve(&model, C4_ELL, &capped_call(), &cfg).unwrap().pi_value;
    let rel = (pi - closed).abs() / closed;
    let elapsed = start.elapsed();
    let pass = rel <= C4_REL_TOL && (closed - oracle).abs() < 1e-8 && elapsed < C4_BUDGET;
    outcome(
        pass,
        format!(
            "pi(1e-3) = {pi:.5}, closed form {closed:.5}, oracle {oracle:.5}, rel {rel:.2e}; {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_5() -> Outcome {
    let model = desk_model();
    let floor = bachelier_closed_form(&capped_call(), &model, None).unwrap();
    let cfg = HjbConfig::for_model(&model, HamiltonianConfig::DEFAULT_Y_MAX);
    let pis: Vec<f64> = [0.01, 0.1, 1.0, 10.0, 100.0]
        .iter()
        .map(|&ell| hjb_solve(&model, ell, &capped_call(), &cfg).unwrap().pi_value)
        .collect();
    let monotone = pis.windows(2).all(|w| w[1] >= w[0]);
    let floored = pis.iter().all(|p| *p >= floor - C5_GRID_TOL);
    let shown: Vec<String> = pis.iter().map(|p| format!("{p:.4}")).collect();
    outcome(monotone && floored, format!("pi = [{}], floor {floor:.4}", shown.join(", ")))
}

fn hjb_policy(model: &ModelParams, ell: f64) -> VolPolicySpec {
    let cfg = HjbConfig::for_model(model, HamiltonianConfig::DEFAULT_Y_MAX);
    VolPolicySpec::Surface(hjb_solve(model, ell, &capped_call(), &cfg).unwrap().policy_surface().unwrap())
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let model = desk_model();
    let fr = friction(&model, 1.0);
    let cfg = DpConfig::for_model(&model, &capped_call());
    let surface = hjb_policy(&model, 1.0);
    let mc = McConfig::new(C6_PATHS, DualKernelSpec::default().substeps, SEED);
    let mut pass = true;
    let mut notes = Vec::new();
    for n in [4, 8, 16] {
        let lambda = n as f64;
        let c = dp_certainty_equivalent(&model, GridSpec::new(n).unwrap(), lambda, &capped_call(), &fr, &cfg).unwrap();
        let policy = feasible_policy(surface.clone(), 25.0, &model, n, &fr).unwrap();
        let d = dual_objective(&model, n, lambda, &capped_call(), &policy, &DualKernelSpec::default(), &mc).unwrap();
        let ok = d.value.mean <= c.c_value + SIGMA_K * d.value.stderr;
        pass &= ok;
        notes.push(format!("n={n}: dual {:.4} +- {:.4} vs c {:.4}", d.value.mean, d.value.stderr, c.c_value));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < C6_BUDGET;
    notes.push(format!("{:.1}s", elapsed.as_secs_f64()));
    outcome(pass, notes.join("; "))
}

fn criterion_7() -> Outcome {
    let model = desk_model();
    let fr = friction(&model, 1.0);
    let cfg = DpConfig::for_model(&model, &capped_call());
    let hjb = HjbConfig::for_model(&model, HamiltonianConfig::DEFAULT_Y_MAX);
    let mut pass = true;
    let mut notes = Vec::new();
    for ell in [0.1, 1.0] {
        let pi = hjb_solve(&model, ell, &capped_call(), &hjb).unwrap().pi_value;
        let gap = |n: usize| {
            let c = dp_certainty_equivalent(&model, GridSpec::new(n).unwrap(), n as f64 * ell, &capped_call(), &fr, &cfg)
                .unwrap();
            (c.c_value - pi).abs()
        };
        let (g4, g64) = (gap(4), gap(64));
        pass &= g64 < g4;
        notes.push(format!("ell={ell}: |gap| n=4 {g4:.4}, n=64 {g64:.4}"));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_8() -> Outcome {
    // drift is nonzero so the measure change has work to do
    let model = ModelParams::new(100.0, 20.0, 5.0, 1.0).unwrap();
    let fr = friction(&model, C8_KAPPA);
    // Gaussian absolute third moment 2 sqrt(2/pi); solve m3 (sigma^2 T/n)^{3/2} <= c_h n^{-5/4}
    let m3 = 2.0 * (2.0 / std::f64::consts::PI).sqrt();
    let threshold = (m3 * model.sigma.powi(3) * model.horizon.powf(1.5) / fr.c_h).powi(4);
    let policy = ClippedPolicy::new(VolPolicySpec::Constant { y: 1.0 }, 1.0 / 25.0, 25.0).unwrap();
    let mc = McConfig::new(C8_PATHS, 16, SEED);
    let spec = DualKernelSpec::default();
    let mut pass = true;
    let mut notes = vec![format!("threshold n* = {threshold:.3}, means checked on n in {C8_MEAN_NS:?}")];
    for n in [1, 2, 4, 8, 16, 32, 64] {
        let r = martingale_diagnostics(&model, n, &policy, &spec, &fr, &mc).unwrap();
        let expected_ok = n as f64 > threshold;
        pass &= r.third_moment_ok == expected_ok;
        if C8_MEAN_NS.contains(&n) {
            pass &= r.worst_mean_z <= SIGMA_K;
        }
        notes.push(format!(
            "n={n}: mean z {:.2}, E|dX|^3/h {:.3}, ok={}",
            r.worst_mean_z, r.worst_third_ratio, r.third_moment_ok
        ));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("repro.cfg");
    std::fs::write(
        &cfg,
        "x0 = 100\nsigma = 20\nT = 1\npayoff = capped_call\nn = 2,4\nell = 0.5,1\nc_h_gaussian = 1\n\
         dp_n_x = 161\nhjb_n_x = 201\nhjb_n_t = 100\npaths = 5000\nsubsteps = 16\nkernel_substeps = 32\n",
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_indiff");
    let mut pass = true;
    let mut notes = Vec::new();
    for cmd in ["price-discrete", "price-limit", "dual-bound", "kernel-check", "converge"] {
        let outputs: Vec<Vec<u8>> = [Some("1"), Some("3"), None, Some("8")]
            .iter()
            .map(|threads| {
                let mut c = Command::new(bin);
                c.args([cmd, "--config", cfg.to_str().unwrap(), "--seed", "99"]);
                if let Some(t) = threads {
                    c.env("RAYON_NUM_THREADS", t);
                }
                let o = c.output().unwrap();
                assert!(o.status.success(), "{cmd} failed");
                o.stdout
            })
            .collect();
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        pass &= same;
        notes.push(format!("{cmd} {}", if same { "identical" } else { "DIFFERS" }));
    }
    outcome(pass, notes.join("; "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("penalty and kernel suite", criterion_1),
        ("Hamiltonian closed form", criterion_2),
        ("replication and one-period oracle", criterion_3),
        ("small-ell limit", criterion_4),
        ("monotonicity in ell", criterion_5),
        ("duality sandwich", criterion_6),
        ("convergence trend", criterion_7),
        ("martingale diagnostics", criterion_8),
        ("reproducibility", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let tag = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|p| tag.contains(p.as_str()) || name.contains(p.as_str())) {
            continue;
        }
        let o = f();
        println!("{tag} ({name}): {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} criterion(s) failed");
        std::process::exit(1);
    }
}
