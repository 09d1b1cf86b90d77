//! Acceptance run: one PASS/FAIL line per criterion, each with its runtime
//! budget. Built without the libtest harness so the lines always show.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use keyrate::ad::{self, symmetric_rate_closed_form, werner_eve_rate, SimulationOptions};
use keyrate::families::{
    activated_distribution, binaryze_werner, bit_error, symmetric_distribution,
    werner_distribution, DerivedConstants, SymmetricParams, WernerParams,
};
use keyrate::intrinsic::{analytic_werner_intrinsic, minimize_intrinsic};
use keyrate::probdist::{apply_channel, normalize, EveChannel};
use keyrate::quantum::{
    derive_distribution, square_root_measurement, symmetric_state, werner_state, CVector, Complex,
    Ensemble, EnsembleItem,
};
use keyrate::TripartiteDistribution;
use keyrate_cli::verify::{cmd_verify_quantum, QuantumFamily};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

fn threshold_cli(args: &[&str]) -> Result<f64, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_keyrate"))
        .arg("threshold")
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(String::from_utf8_lossy(&o.stderr).into_owned());
    }
    String::from_utf8_lossy(&o.stdout)
        .trim()
        .parse()
        .map_err(|e| format!("{e}"))
}

fn werner(p: f64) -> TripartiteDistribution {
    werner_distribution(WernerParams::qutrit(p).unwrap()).unwrap()
}

fn werner_threshold() -> Outcome {
    let t = match threshold_cli(&["werner"]) {
        Ok(t) => t,
        Err(e) => return outcome(false, e),
    };
    let k = DerivedConstants::new(0.6, 0.0);
    let beta = k.werner_beta();
    let lhs = beta / (1.0 - beta);
    let rhs = werner_eve_rate(k.delta_z);
    outcome(
        (t - 0.6).abs() < 1e-6 && (lhs - 0.5).abs() < 1e-9 && (rhs - 0.5).abs() < 1e-9,
        format!("threshold {t}, at p=0.6 bob side {lhs}, eve side {rhs}"),
    )
}

fn symmetric_threshold() -> Outcome {
    let t = match threshold_cli(&["symmetric"]) {
        Ok(t) => t,
        Err(e) => return outcome(false, e),
    };
    let k = DerivedConstants::new(0.0, 0.2);
    let rhs = symmetric_rate_closed_form(&k);
    outcome(
        (t - 0.2).abs() < 1e-6 && (rhs - 0.5).abs() < 1e-9 && k.p_b == 0.0,
        format!("threshold {t}, (α+γ)²/3 = {rhs}, P_B = {}", k.p_b),
    )
}

fn activated_threshold() -> Outcome {
    match threshold_cli(&["activated", "--q", "0.2"]) {
        Ok(t) => outcome((t - 0.513).abs() < 1e-3, format!("threshold {t}")),
        Err(e) => outcome(false, e),
    }
}

fn intrinsic_endpoints() -> Outcome {
    let analytic = analytic_werner_intrinsic(0.5).unwrap();
    let at_half = minimize_intrinsic(&werner(0.5), 64, 0).unwrap().value;
    let at_edge = minimize_intrinsic(&werner(0.6), 64, 0).unwrap().value;
    outcome(
        analytic.abs() < 1e-12 && at_half <= 1e-6 && at_edge > 0.0 && at_edge <= 0.032,
        format!(
            "closed form at 0.5 {analytic}, optimizer at 0.5 {at_half:.3e}, at 0.6 {at_edge:.6}"
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in [0.5, 0.6, 0.75, 0.9, 1.0] {
        let d = derive_distribution(&werner_state(p, 3).unwrap()).unwrap();
        worst = worst.max(d.max_abs_diff(&werner(p)));
    }
    for q in [0.1, 0.2, 0.3] {
        let d = derive_distribution(&symmetric_state(q, 3).unwrap()).unwrap();
        let t = symmetric_distribution(SymmetricParams::qutrit(q).unwrap()).unwrap();
        worst = worst.max(d.max_abs_diff(&t));
    }
    outcome(worst < 1e-9, format!("max entrywise error {worst:.3e}"))
}

fn landmarks() -> Outcome {
    match cmd_verify_quantum(QuantumFamily::All, None, None) {
        Ok(r) => outcome(
            !r.failed,
            r.summary.lines().last().unwrap_or_default().to_string(),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn simulation_vs_bounds() -> Outcome {
    let t3 = binaryze_werner(&werner(0.6), 2).unwrap();
    let beta = bit_error(&t3).unwrap();
    let dz = DerivedConstants::new(0.6, 0.0).delta_z;
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2u32, 4, 6, 8] {
        let run = ad::simulate_ad_with(
            &t3,
            &SimulationOptions::new(n, 100_000, 0x5eed + u64::from(n)),
        )
        .unwrap();
        let exact = ad::bob_error(beta, n).unwrap();
        let sigma = (exact * (1.0 - exact) / run.accepted as f64).sqrt();
        let bob = run.bob_error_rate().value;
        let eve = run.eve_error_rate_agreed();
        let bound = ad::eve_error_lower_bound_werner(dz, n).unwrap();
        let bob_ok = (bob - exact).abs() <= 3.0 * sigma;
        let eve_ok = eve.value >= bound - 3.0 * eve.std_error;
        ok &= bob_ok && eve_ok && run.accepted == 100_000;
        parts.push(format!(
            "N={n} bob {bob:.5}/{exact:.5} ({:+.1}σ) eve {:.5} vs bound {bound:.5}",
            (bob - exact) / sigma,
            eve.value
        ));
    }
    outcome(ok, parts.join("; "))
}

fn random_dist(rng: &mut ChaCha8Rng, nx: usize, ny: usize, nz: usize) -> TripartiteDistribution {
    let names = |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    let w: Vec<f64> = (0..nx * ny * nz)
        .map(|_| rng.random::<f64>() + 1e-3)
        .collect();
    TripartiteDistribution::from_weights(names("x", nx), names("y", ny), names("z", nz), w).unwrap()
}

fn random_channel(rng: &mut ChaCha8Rng, alphabet: &[String]) -> EveChannel {
    let n = alphabet.len();
    let mut rows = Vec::with_capacity(n * n);
    for _ in 0..n {
        let r: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let s: f64 = r.iter().sum();
        rows.extend(r.iter().map(|v| v / s));
    }
    EveChannel::new(alphabet.to_vec(), alphabet.to_vec(), rows).unwrap()
}

fn property_suites() -> Outcome {
    const CASES: usize = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b65_7972);
    let mut failures: Vec<&str> = Vec::new();

    let normalization = (0..CASES).all(|_| {
        let (nx, ny, nz) = (
            rng.random_range(1..4),
            rng.random_range(1..4),
            rng.random_range(1..6),
        );
        let d = random_dist(&mut rng, nx, ny, nz);
        let total: f64 = d.probabilities().iter().sum();
        (total - 1.0).abs() < 1e-12 && normalize(&d).unwrap().max_abs_diff(&d) < 1e-15
    });
    let stochastic = (0..CASES).all(|_| {
        let nz = rng.random_range(1..6);
        let d = random_dist(&mut rng, 2, 3, nz);
        let ch = random_channel(&mut rng, d.z_alphabet());
        let out = apply_channel(&d, &ch).unwrap();
        (0..nz).all(|r| (ch.row(r).iter().sum::<f64>() - 1.0).abs() < 1e-12)
            && (out.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12
            && out.probabilities().iter().all(|p| *p >= 0.0)
    });
    let povm = (0..CASES).all(|_| {
        let dim = rng.random_range(2..5);
        let k = rng.random_range(1..7);
        let weights: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.01).collect();
        let total: f64 = weights.iter().sum();
        let items = weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let v = CVector::from_fn(dim, |_, _| {
                    Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                });
                let n = v.norm();
                EnsembleItem {
                    label: i.to_string(),
                    probability: w / total,
                    state: v / Complex::new(n, 0.0),
                }
            })
            .collect();
        let m = square_root_measurement(&Ensemble::new(items).unwrap()).unwrap();
        m.completeness_error() < 1e-10 && m.min_element_eigenvalue() > -1e-10
    });
    let relabel = (0..100).all(|_| {
        let nz = rng.random_range(2..4);
        let d = random_dist(&mut rng, 2, 2, nz);
        let mut perm: Vec<usize> = (0..nz).collect();
        for i in (1..nz).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let (fx, fy) = (rng.random::<bool>() as usize, rng.random::<bool>() as usize);
        let mut moved = vec![0.0; 4 * nz];
        for (x, y, z, p) in d.support() {
            moved[((x ^ fx) * 2 + (y ^ fy)) * nz + perm[z]] = p;
        }
        let names = |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        let r = TripartiteDistribution::new(names("a", 2), names("b", 2), names("e", nz), moved)
            .unwrap();
        let a = minimize_intrinsic(&d, 4, 1).unwrap().value;
        let b = minimize_intrinsic(&r, 4, 1).unwrap().value;
        (a - b).abs() < 1e-9
    });
    let classes = (0..CASES).all(|_| {
        let (p, q) = (rng.random::<f64>(), rng.random::<f64>());
        let r = ad::six_class_rates(&activated_distribution(p, q).unwrap()).unwrap();
        (r.completeness() - 1.0).abs() < 1e-12
    });
    for (name, ok) in [
        ("normalization", normalization),
        ("row-stochasticity", stochastic),
        ("POVM completeness", povm),
        ("relabeling invariance", relabel),
        ("class completeness", classes),
    ] {
        if !ok {
            failures.push(name);
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("5 suites, {CASES} cases each (relabeling 100)")
        } else {
            format!("failing: {}", failures.join(", "))
        },
    )
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Option<Duration>, Check); 8] = [
        (
            "werner AD threshold",
            Some(Duration::from_secs(1)),
            werner_threshold,
        ),
        (
            "symmetric AD threshold",
            Some(Duration::from_secs(1)),
            symmetric_threshold,
        ),
        (
            "activation threshold",
            Some(Duration::from_secs(10)),
            activated_threshold,
        ),
        (
            "intrinsic information endpoints",
            Some(Duration::from_secs(60)),
            intrinsic_endpoints,
        ),
        (
            "quantum oracle equivalence",
            Some(Duration::from_secs(30)),
            oracle_equivalence,
        ),
        (
            "entanglement landmarks",
            Some(Duration::from_secs(60)),
            landmarks,
        ),
        (
            "simulation vs bounds",
            Some(Duration::from_secs(300)),
            simulation_vs_bounds,
        ),
        ("property suites", None, property_suites),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let ok = out.ok && budget.is_none_or(|b| took < b);
        failed += usize::from(!ok);
        println!(
            "criterion {} {}: {name} [{:.2}s, budget {}] {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.map_or("none".into(), |b| format!("{}s", b.as_secs())),
            out.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
