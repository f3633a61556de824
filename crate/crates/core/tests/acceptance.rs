//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any of them fails.

use std::f64::consts::{PI, SQRT_2};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qtunnel::bench::{revisit_statistics, run_experiment, Experiment, ExperimentConfig, HS_REVISIT_TOL};
use qtunnel::model::{exact_ground_energy, tfim_chain, ChainSpec};
use qtunnel::qsim::{hs_distance, StateVector};
use qtunnel::tunnel::{HilbertSchmidt, Termination};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, label: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("{label}: {} - {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn qtunnel(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_qtunnel")).args(args).output().expect("binary runs");
    (out, start.elapsed())
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn exact_oracles(r: &mut Report) {
    let cases: [(&[&str], f64); 3] = [
        (&["exact", "--chain", "10", "--J", "1", "--B", "5"], -50.45),
        (&["exact", "--chain", "10", "--J", "1", "--B", "0.5"], -9.76),
        (&["exact", "--grid", "3x4", "--J", "1", "--B", "5"], -60.87),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (args, expected) in cases {
        let (out, took) = qtunnel(args);
        let value: Option<f64> = stdout(&out).trim().parse().ok();
        let ok = out.status.success()
            && value.is_some_and(|v| (v - expected).abs() <= 0.01)
            && took < Duration::from_secs(30);
        pass &= ok;
        parts.push(format!("{} {} B={} -> {:?} in {:.1}s", args[1], args[2], args[6], value, took.as_secs_f64()));
    }
    r.line("criterion 1 (exact energies)", pass, parts.join("; "));
}

fn two_site(r: &mut Report) {
    let mut worst: f64 = 0.0;
    for b in [0.0f64, 0.5, 5.0] {
        let e = exact_ground_energy(&tfim_chain(ChainSpec { n_sites: 2, j: 1.0, b }).unwrap()).unwrap();
        worst = worst.max((e + (1.0 + 4.0 * b * b).sqrt()).abs());
    }
    r.line("criterion 2 (two-site ground energy)", worst < 1e-9, format!("max error {worst:.2e}"));
}

fn gradients(r: &mut Report) {
    let (out, took) = qtunnel(&["gradcheck", "--draws", "20", "--tol", "1e-6"]);
    let text = stdout(&out);
    let summary = text.lines().last().unwrap_or("").to_string();
    let pass = out.status.code() == Some(0) && took < Duration::from_secs(10);
    r.line(
        "criterion 3 (gradient agreement)",
        pass,
        format!("{summary}, exit {:?}, {:.1}s", out.status.code(), took.as_secs_f64()),
    );
}

/// The one-dimensional landscape written out independently of the library.
fn toy_reference(x: f64) -> f64 {
    (PI / 2.0 * (x - 0.5)).cos() - 0.5 * (2.0 * PI * (x + 1.5)).cos() + (PI * (x + 0.5)).sin()
        - 1.5 * (PI / 2.0 * (x + 1.0)).sin()
}

fn field_after(line: &str, key: &str) -> Option<f64> {
    let rest = &line[line.find(key)? + key.len()..];
    rest.split_whitespace().next()?.parse().ok()
}

fn toy_trajectory(r: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("toy.csv");
    let (out, took) = qtunnel(&[
        "toy",
        "--x0",
        "2.2",
        "--eta",
        "0.005",
        "--k",
        "50",
        "--profile",
        profile.to_str().unwrap(),
    ]);
    let text = stdout(&out);
    let stable: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("stable point"))
        .filter_map(|l| field_after(l, "f = "))
        .collect();
    let final_f = text.lines().find(|l| l.starts_with("final f")).and_then(|l| field_after(l, "final f = "));

    let global = (0..4_000_000)
        .map(|i| toy_reference(i as f64 * 1e-6))
        .fold(f64::INFINITY, f64::min);
    let three_decreasing = stable.len() == 3 && stable.windows(2).all(|w| w[1] < w[0]);
    let at_global = final_f.is_some_and(|f| (f - global).abs() < 1e-6);
    let pass = out.status.success() && three_decreasing && at_global && took < Duration::from_secs(5);
    r.line(
        "criterion 4 (toy trajectory)",
        pass,
        format!(
            "stable values {stable:?} (three strictly decreasing: {three_decreasing}); final {final_f:?} vs grid-scan \
             minimum {global:.9} (match: {at_global}); {:.2}s",
            took.as_secs_f64()
        ),
    );
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::from_amplitudes(amps).unwrap()
}

fn hs_identities(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let tol = 1e-10;
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for n in [2, 5, 10] {
        for _ in 0..1000 {
            let a = random_state(n, &mut rng);
            let b = random_state(n, &mut rng);
            let phase = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
            let d = hs_distance(&a, &b).unwrap();
            let excess = [
                (-d).max(0.0),
                (d - SQRT_2).max(0.0),
                (d - hs_distance(&b, &a).unwrap()).abs(),
                hs_distance(&a, &a).unwrap(),
                (d - hs_distance(&a, &b.clone().with_global_phase(phase)).unwrap()).abs(),
                hs_distance(&a, &a.clone().with_global_phase(phase)).unwrap(),
            ];
            worst = excess.into_iter().fold(worst, f64::max);
            pairs += 1;
        }
    }
    r.line(
        "criterion 6 (Hilbert-Schmidt identities)",
        worst <= tol,
        format!("{pairs} pairs, worst violation {worst:.2e}"),
    );
}

fn ensemble(name: &str) -> (Experiment, Duration) {
    let cfg = ExperimentConfig::load(&preset(name)).unwrap();
    let start = Instant::now();
    let exp = run_experiment(&cfg).unwrap();
    (exp, start.elapsed())
}

struct Ensembles {
    exact: f64,
    modified: Experiment,
    conventional: Experiment,
    descent: Experiment,
    elapsed: Duration,
}

fn chain10_ensembles() -> Ensembles {
    let exact = exact_ground_energy(&tfim_chain(ChainSpec { n_sites: 10, j: 1.0, b: 5.0 }).unwrap()).unwrap();
    let (modified, t_mod) = ensemble("chain10_b5_modified.json");
    let (conventional, t_conv) = ensemble("chain10_b5_conventional.json");
    let (descent, t_desc) = ensemble("chain10_b5_descent_only.json");
    Ensembles {
        exact,
        modified,
        conventional,
        descent,
        elapsed: t_mod + t_conv + t_desc,
    }
}

fn success_fractions(r: &mut Report, e: &Ensembles) {
    let f_mod = e.modified.success_fraction(e.exact, 0.1);
    let f_conv = e.conventional.success_fraction(e.exact, 0.1);
    let f_desc = e.descent.success_fraction(e.exact, 0.1);
    let (a, b, c) = (f_mod >= 0.70, f_mod > f_conv, f_mod > f_desc);
    r.line(
        "criterion 5 (success fractions on chain 10)",
        a && b && c && e.elapsed < Duration::from_secs(30 * 60),
        format!(
            "exact {:.5}; modified {f_mod:.2} (>= 0.70: {a}), conventional {f_conv:.2} (modified above: {b}), \
             descent only {f_desc:.2} (modified above: {c}); {:.0}s",
            e.exact,
            e.elapsed.as_secs_f64()
        ),
    );
    let lowest = [&e.modified, &e.conventional, &e.descent]
        .iter()
        .flat_map(|x| x.runs())
        .map(|run| run.best.value)
        .fold(f64::INFINITY, f64::min);
    println!("    note: lowest value reached by any sample is {lowest:.5}, {:.3} above exact", lowest - e.exact);
}

fn revisits(r: &mut Report, e: &Ensembles) {
    let hs_mod = revisit_statistics(e.modified.runs(), &HilbertSchmidt, HS_REVISIT_TOL);
    let hs_conv = revisit_statistics(e.conventional.runs(), &HilbertSchmidt, HS_REVISIT_TOL);
    r.line(
        "criterion 7 (same-state revisits)",
        hs_mod.n_revisits == 0 && hs_conv.n_revisits >= 1,
        format!(
            "modified {} of {} tunneling phases, conventional {} of {}",
            hs_mod.n_revisits, hs_mod.n_tunnel_starts, hs_conv.n_revisits, hs_conv.n_tunnel_starts
        ),
    );
}

fn bookkeeping(r: &mut Report, e: &Ensembles) {
    let mut runs = 0;
    let mut bad = Vec::new();
    for (label, exp) in [("modified", &e.modified), ("conventional", &e.conventional), ("descent only", &e.descent)] {
        for s in &exp.samples {
            runs += 1;
            let values: Vec<f64> = s.run.stable_points.iter().map(|p| p.value).collect();
            let decreasing = values.windows(2).all(|w| w[1] < w[0]);
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            if !decreasing || s.run.best.value != min {
                bad.push(format!("{label} sample {}", s.sample_id));
            }
        }
    }
    r.line(
        "criterion 8 (strict-descent bookkeeping)",
        bad.is_empty(),
        format!("{runs} runs checked, {} violations {bad:?}", bad.len()),
    );
}

fn ground_or_early_stop(r: &mut Report, e: &Ensembles) {
    // Every sample of the first 20 must reach the ground energy or stop by
    // exhausting its tunnels or iterations.
    let offenders: Vec<String> = e
        .modified
        .samples
        .iter()
        .take(20)
        .filter(|s| {
            (s.run.best.value - e.exact).abs() > 0.1
                && !matches!(s.run.termination, Termination::MaxTunnelsReached | Termination::IterationBudget)
        })
        .map(|s| format!("{}:{:.4}:{}", s.sample_id, s.run.best.value, s.run.termination.as_str()))
        .collect();
    r.line(
        "example (chain 10 modified, 20 samples reach ground or stop early)",
        offenders.is_empty(),
        format!("{} of 20 samples end tunnel_exhausted away from exact: {offenders:?}", offenders.len()),
    );
}

fn determinism(r: &mut Report) {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let config = preset("chain10_b5_modified.json");
    let mut outputs = Vec::new();
    for dir in &dirs {
        let (out, _) = qtunnel(&[
            "vqe",
            "--config",
            config.to_str().unwrap(),
            "--samples",
            "6",
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
        outputs.push((read("histogram.csv"), read("profile.csv")));
    }
    let same = outputs[0] == outputs[1];
    r.line(
        "criterion 9 (determinism)",
        same,
        format!(
            "histogram {} bytes, profile {} bytes, identical: {same}",
            outputs[0].0.len(),
            outputs[0].1.len()
        ),
    );
}

fn main() -> ExitCode {
    let mut r = Report { failures: 0 };
    exact_oracles(&mut r);
    two_site(&mut r);
    gradients(&mut r);
    toy_trajectory(&mut r);
    let ensembles = chain10_ensembles();
    success_fractions(&mut r, &ensembles);
    hs_identities(&mut r);
    revisits(&mut r, &ensembles);
    bookkeeping(&mut r, &ensembles);
    determinism(&mut r);
    ground_or_early_stop(&mut r, &ensembles);
    if r.failures == 0 {
        println!("all acceptance checks passed");
        ExitCode::SUCCESS
    } else {
        println!("{} acceptance check(s) failed", r.failures);
        ExitCode::FAILURE
    }
}
