//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use cdatc::censoring::CensorParams;
use cdatc::network::Topology;
use cdatc::sim::{
    monte_carlo, run, run_indexed, MonteCarloResult, Scheme, SignalConfig, SimConfig,
};
use cdatc::{DiffusionParams, EnergyParams};

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(outcomes: &[Outcome]) -> bool {
    let mut all = true;
    for o in outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {} | {}", o.id, o.name, o.detail);
        all &= o.pass;
    }
    all
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn censoring_off_matches_nsd() -> Outcome {
    let limit = Duration::from_secs(10);
    let ((same, steps), elapsed) = timed(|| {
        let nsd = SimConfig::seven_node(0.4, Scheme::NsdAtc);
        let mut cd = nsd.with_scheme(Scheme::CdAtc);
        cd.censoring.enabled = false;
        let a = run(&cd).expect("cd-atc run");
        let b = run(&nsd).expect("nsd-atc run");
        (a.same_trajectory(&b), a.steps)
    });
    Outcome {
        id: 1,
        name: "censoring-off CD-ATC equals NSD-ATC bit for bit",
        pass: same && elapsed < limit,
        detail: format!(
            "identical={same} over {steps} steps x 7 nodes, {elapsed:.2?} (limit {limit:?})"
        ),
    }
}

fn scenario(harvest_prob: f64) -> (Vec<MonteCarloResult>, Duration) {
    timed(|| {
        Scheme::ALL
            .iter()
            .map(|&s| monte_carlo(&SimConfig::seven_node(harvest_prob, s)).expect("monte carlo"))
            .collect()
    })
}

fn find(results: &[MonteCarloResult], scheme: Scheme) -> &MonteCarloResult {
    results
        .iter()
        .find(|r| r.scheme == scheme)
        .expect("scheme present")
}

fn invariant_sweep(fig2a: &[MonteCarloResult], elapsed: Duration) -> Outcome {
    let limit = Duration::from_secs(120);
    let mut checked = 0;
    let (mut battery, mut simplex, mut importance) = (0, 0, 0);
    for r in fig2a {
        checked += r.invariants.records_checked;
        battery += r.invariants.battery_violations;
        simplex += r.invariants.simplex_violations;
        importance += r.invariants.importance_violations;
    }
    Outcome {
        id: 2,
        name: "invariant sweep over the p_h=0.4 scenario, R=50",
        pass: battery + simplex + importance == 0 && checked > 0 && elapsed < limit,
        detail: format!(
            "{checked} node-steps, violations battery={battery} simplex={simplex} importance={importance}, {elapsed:.2?} (limit {limit:?})"
        ),
    }
}

/// Zero-drift point of the threshold recursion: `1 - b̄₁/(b̄₁ - b̄₀)` from
/// the expected costs.
fn analytic_rate(p: &EnergyParams) -> f64 {
    let h = p.harvest_prob * (p.harvest_range.0 + p.harvest_range.1) / 2.0;
    let b1 = p.sense_cost + p.tx_cost - h;
    let b0 = p.sense_cost - h;
    1.0 - b1 / (b1 - b0)
}

/// Standalone threshold recursion driven by i.i.d. exponential importance
/// and i.i.d. realized costs, with its own running cost estimates.
fn oracle_rate(p: &EnergyParams, c: &CensorParams, seed: u64) -> f64 {
    const STEPS: usize = 200_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exp = Exp::new(1.0).unwrap();
    let mut tau = 0.0_f64;
    let mut est = [0.0_f64; 2];
    let mut count = [0u64; 2];
    let mut sent = 0u64;
    for n in 0..STEPS {
        let x: f64 = exp.sample(&mut rng);
        let a = usize::from(x > tau);
        let rho = if count[0] > 0 && count[1] > 0 && est[1] - est[0] > 1e-12 {
            (est[1] / (est[1] - est[0])).clamp(c.rho_clamp.0, c.rho_clamp.1)
        } else {
            0.5
        };
        tau += c.eta * (rho * a as f64 - (1.0 - rho) * (1.0 - a as f64));
        let h = if rng.random::<f64>() < p.harvest_prob {
            rng.random_range(p.harvest_range.0..p.harvest_range.1)
        } else {
            0.0
        };
        let b = p.sense_cost + a as f64 * p.tx_cost - h;
        count[a] += 1;
        let gain = (1.0 / count[a] as f64).max(c.rho_smoothing);
        est[a] += gain * (b - est[a]);
        if n >= STEPS / 2 {
            sent += a as u64;
        }
    }
    sent as f64 / (STEPS - STEPS / 2) as f64
}

fn balanced_rate(by_prob: &[(f64, &[MonteCarloResult])]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for &(prob, results) in by_prob {
        let cfg = SimConfig::seven_node(prob, Scheme::CdAtc);
        let target = analytic_rate(&cfg.energy);
        let oracle = oracle_rate(&cfg.energy, &cfg.censoring, 11);
        let rates = &find(results, Scheme::CdAtc).steady_transmit_rate;
        let ok = (oracle - target).abs() <= 0.05
            && rates
                .iter()
                .all(|r| (r - target).abs() <= 0.05 && (r - oracle).abs() <= 0.05);
        pass &= ok;
        let shown: Vec<String> = rates.iter().map(|r| format!("{r:.3}")).collect();
        parts.push(format!(
            "p_h={prob}: 1-rho={target:.3} oracle={oracle:.3} nodes=[{}]",
            shown.join(" ")
        ));
    }
    Outcome {
        id: 3,
        name: "steady transmit rate equals 1-rho within 0.05",
        pass,
        detail: parts.join("; "),
    }
}

fn nmsd_ordering(by_prob: &[(f64, &[MonteCarloResult], Duration)]) -> Outcome {
    let limit = Duration::from_secs(300);
    let mut pass = true;
    let mut gaps = Vec::new();
    let mut parts = Vec::new();
    for &(prob, results, elapsed) in by_prob {
        let unc = find(results, Scheme::Unconstrained).steady_nmsd_db();
        let cd = find(results, Scheme::CdAtc).steady_nmsd_db();
        let nsd = find(results, Scheme::NsdAtc).steady_nmsd_db();
        let ordered = unc <= cd && cd <= nsd;
        let close = cd - unc <= 3.0;
        pass &= ordered && close && elapsed < limit;
        gaps.push(nsd - cd);
        parts.push(format!(
            "p_h={prob}: unconstrained={unc:.3} cd-atc={cd:.3} nsd-atc={nsd:.3} dB ordered={ordered} within3dB={close} {elapsed:.1?}"
        ));
    }
    let gap_shrinks = gaps[0] > gaps[1];
    pass &= gap_shrinks;
    parts.push(format!(
        "gap(0.4)={:.3} dB > gap(0.8)={:.3} dB: {gap_shrinks}",
        gaps[0], gaps[1]
    ));
    Outcome {
        id: 4,
        name: "steady NMSD ordering unconstrained <= CD-ATC <= NSD-ATC",
        pass,
        detail: parts.join("; "),
    }
}

fn thresholds_lower_with_more_energy(
    low: &[MonteCarloResult],
    high: &[MonteCarloResult],
) -> Outcome {
    let tau_low = find(low, Scheme::CdAtc).steady_tau();
    let tau_high = find(high, Scheme::CdAtc).steady_tau();
    let pass = tau_low.iter().zip(&tau_high).all(|(l, h)| h < l);
    let pairs: Vec<String> = tau_low
        .iter()
        .zip(&tau_high)
        .map(|(l, h)| format!("{h:.3e}<{l:.3e}"))
        .collect();
    Outcome {
        id: 5,
        name: "steady threshold at p_h=0.8 below p_h=0.4 on every node",
        pass,
        detail: pairs.join(" "),
    }
}

fn single_node_convergence() -> Outcome {
    const SEEDS: u64 = 20;
    const HORIZON: usize = 5000;
    let mut hits = 0;
    let mut worst = 0;
    for seed in 1..=SEEDS {
        let cfg = SimConfig {
            topology: Topology::new(1, &[]).unwrap(),
            signal: SignalConfig {
                noise_variances: vec![0.0],
                ..SignalConfig::default()
            },
            diffusion: DiffusionParams {
                mu: 0.1,
                ..DiffusionParams::default()
            },
            energy: EnergyParams::with_harvest_prob(1.0),
            censoring: CensorParams::default(),
            scheme: Scheme::Unconstrained,
            steps: HORIZON,
            runs: 1,
            seed,
        };
        assert_eq!(cfg.signal.taps, 50);
        let trace = run_indexed(&cfg, 0).expect("single node run");
        if let Some(step) = (0..HORIZON).find(|&s| trace.record(s, 0).sq_dev < 1e-6) {
            hits += 1;
            worst = worst.max(step + 1);
        }
    }
    Outcome {
        id: 6,
        name: "single noiseless node converges below 1e-6 within 5000 steps",
        pass: hits == SEEDS,
        detail: format!("{hits}/{SEEDS} seeds, slowest at step {worst}"),
    }
}

fn deterministic_depletion() -> Outcome {
    let mut cfg = SimConfig::seven_node(0.0, Scheme::CdAtc);
    cfg.censoring.enabled = false;
    cfg.steps = 200;
    let trace = run(&cfg).expect("depletion run");
    let first_stall: Vec<Option<usize>> = (0..trace.n_nodes)
        .map(|k| {
            (0..trace.steps)
                .find(|&s| trace.record(s, k).stalled)
                .map(|s| s + 1)
        })
        .collect();
    let pass = first_stall.iter().all(|s| *s == Some(167));
    Outcome {
        id: 7,
        name: "every node stalls exactly at step 167 without harvesting",
        pass,
        detail: format!("first stall per node {first_stall:?}"),
    }
}

fn main() -> ExitCode {
    let mut outcomes = vec![censoring_off_matches_nsd()];
    let (low, low_time) = scenario(0.4);
    let (high, high_time) = scenario(0.8);
    outcomes.push(invariant_sweep(&low, low_time));
    outcomes.push(balanced_rate(&[(0.4, &low), (0.8, &high)]));
    outcomes.push(nmsd_ordering(&[
        (0.4, &low, low_time),
        (0.8, &high, high_time),
    ]));
    outcomes.push(thresholds_lower_with_more_energy(&low, &high));
    outcomes.push(single_node_convergence());
    outcomes.push(deterministic_depletion());
    if report(&outcomes) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
