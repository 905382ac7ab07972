//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{matching_size_oracle, random_graph, OracleFleet};
use intersched::experiment::{run_golden, run_sweep, GoldenExpectations, ScenarioSpec};
use intersched::fleet::{self, random_lanes, LaneMix};
use intersched::schedule::repair_infeasible_pairs;
use intersched::sim::{PidController, SimConfig, Target, VehicleState};
use intersched::{
    build_cug, dfst, graphs_for, maximum_matching, mm_schedule, opt_dfst, ConflictDirectedGraph,
    ConflictMatrix, Lane, Scheduler, SimpleGraph,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cdg_of(lanes: &[Lane]) -> ConflictDirectedGraph {
    graphs_for(ConflictMatrix::standard(), &fleet::fleet_from_lanes(lanes))
        .unwrap()
        .1
}

fn golden_example() -> Outcome {
    let started = Instant::now();
    let report = run_golden(&GoldenExpectations::example1()).unwrap();
    let (table, _) = graphs_for(ConflictMatrix::standard(), &fleet::example1()).unwrap();
    let c6: Vec<usize> = table.get(6).unwrap().crossing.iter().copied().collect();
    let d6: Vec<usize> = table.get(6).unwrap().diverging.iter().copied().collect();
    let elapsed = started.elapsed();
    let pass = report.passed() && c6 == [1, 4] && d6 == [5] && elapsed < Duration::from_secs(1);
    let mut detail = format!(
        "{} checks, C_6={c6:?}, D_6={d6:?}, {:.1} ms",
        report.checks.len(),
        elapsed.as_secs_f64() * 1e3
    );
    for f in report.failures() {
        detail += &format!("; {} expected {} got {}", f.name, f.expected, f.actual);
    }
    outcome(pass, detail)
}

fn repair() -> Outcome {
    let cdg = cdg_of(&fleet::example1_lanes());
    let out = repair_infeasible_pairs(&[vec![1, 4], vec![3, 6], vec![2, 5]], &cdg);
    let mut pairs: Vec<Vec<usize>> = out
        .units
        .iter()
        .map(|u| {
            let mut u = u.clone();
            u.sort_unstable();
            u
        })
        .collect();
    pairs.sort();
    let pass = pairs == [vec![1, 4], vec![2, 6], vec![3, 5]];
    outcome(
        pass,
        format!("{:?} after {} exchange(s)", out.units, out.exchanges),
    )
}

fn matching_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trials = 600;
    let mut agree = 0;
    for _ in 0..trials {
        let (n, edges) = random_graph(&mut rng, 12);
        let g = SimpleGraph::from_edges(n, &edges);
        let m = maximum_matching(&g);
        if m.is_valid_in(&g) && m.len() == matching_size_oracle(n, &edges) {
            agree += 1;
        }
    }
    outcome(agree == trials, format!("{agree}/{trials} graphs agree"))
}

fn mm_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let trials = 300;
    let mut agree = 0;
    for k in 0..trials {
        let n = k % 8 + 1;
        let lanes = random_lanes(&mut rng, n, LaneMix::NoRightTurns);
        let cdg = cdg_of(&lanes);
        let mm = mm_schedule(&build_cug(&cdg), &cdg).schedule.d_all();
        if mm == OracleFleet::new(&lanes).min_layers() {
            agree += 1;
        }
    }
    outcome(
        agree == trials,
        format!("{agree}/{trials} fleets at the exhaustive minimum"),
    )
}

fn random_fleets(seed: u64, count: usize, max_n: usize) -> Vec<Vec<Lane>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| random_lanes(&mut rng, k % max_n + 1, LaneMix::All))
        .collect()
}

fn dominance() -> Outcome {
    let fleets = random_fleets(5, 1000, 60);
    let mut violations = 0;
    for lanes in &fleets {
        let cdg = cdg_of(lanes);
        let d = dfst(&cdg).d_all();
        let o = opt_dfst(&cdg).d_all();
        let m = mm_schedule(&build_cug(&cdg), &cdg).schedule.d_all();
        if !(m <= o && o <= d) {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("{} fleets, {violations} violations", fleets.len()),
    )
}

fn schedule_audits() -> Outcome {
    let fleets = random_fleets(6, 1000, 60);
    let mut bad_schedules = 0;
    let mut unreachable = 0;
    for lanes in &fleets {
        let cdg = cdg_of(lanes);
        if !cdg.has_rooted_spanning_tree() {
            unreachable += 1;
        }
        for s in Scheduler::ALL {
            if s.schedule(&cdg).audit(&cdg).is_err() {
                bad_schedules += 1;
            }
        }
    }
    outcome(
        bad_schedules == 0 && unreachable == 0,
        format!(
            "{} schedules audited, {bad_schedules} failed; {} graphs, {unreachable} not rooted",
            3 * fleets.len(),
            fleets.len()
        ),
    )
}

struct HeadlineRun {
    csv: Vec<u8>,
    elapsed: Duration,
    saving_opt: f64,
    saving_mm: f64,
    error: Option<String>,
}

fn headline_spec() -> ScenarioSpec {
    ScenarioSpec {
        p: 0.3,
        n: vec![84],
        seeds: (1..=20).collect(),
        schedulers: Scheduler::ALL.to_vec(),
        timing: false,
        sim: SimConfig::default(),
    }
}

fn headline_run() -> HeadlineRun {
    let started = Instant::now();
    match run_sweep(&headline_spec()) {
        Ok(result) => {
            let mut csv = Vec::new();
            result.write_csv(&mut csv).unwrap();
            HeadlineRun {
                csv,
                elapsed: started.elapsed(),
                saving_opt: result
                    .evac_saving(Scheduler::Dfst, Scheduler::OptDfst, 84)
                    .unwrap(),
                saving_mm: result
                    .evac_saving(Scheduler::OptDfst, Scheduler::Mm, 84)
                    .unwrap(),
                error: None,
            }
        }
        Err(e) => HeadlineRun {
            csv: Vec::new(),
            elapsed: started.elapsed(),
            saving_opt: f64::NAN,
            saving_mm: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}

fn headline(run: &HeadlineRun) -> Outcome {
    if let Some(e) = &run.error {
        return outcome(false, e.clone());
    }
    let pass = (0.07..=0.13).contains(&run.saving_opt)
        && (0.005..=0.05).contains(&run.saving_mm)
        && run.elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "opt_dfst vs dfst {:.2}%, mm vs opt_dfst {:.2}%, 60 runs in {:.1} s",
            100.0 * run.saving_opt,
            100.0 * run.saving_mm,
            run.elapsed.as_secs_f64()
        ),
    )
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs[xs.len() / 2]
}

/// Least-squares slope of `ln t` against `ln n`.
fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn complexity() -> Outcome {
    let sizes = [25usize, 50, 100, 200];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut slopes = Vec::new();
    let fleets: Vec<Vec<ConflictDirectedGraph>> = sizes
        .iter()
        .map(|&n| {
            (0..5)
                .map(|_| cdg_of(&random_lanes(&mut rng, n, LaneMix::All)))
                .collect()
        })
        .collect();
    for s in [Scheduler::OptDfst, Scheduler::Mm] {
        let mut points = Vec::new();
        for (k, &n) in sizes.iter().enumerate() {
            let per_fleet: Vec<f64> = fleets[k]
                .iter()
                .map(|cdg| {
                    let samples = (0..9)
                        .map(|_| {
                            let t = Instant::now();
                            std::hint::black_box(s.schedule(std::hint::black_box(cdg)));
                            t.elapsed().as_secs_f64()
                        })
                        .collect();
                    median(samples)
                })
                .collect();
            points.push((
                n as f64,
                per_fleet.iter().sum::<f64>() / per_fleet.len() as f64,
            ));
        }
        slopes.push(loglog_slope(&points));
    }
    let pass = slopes[0] <= 2.5 && slopes[1] <= 4.5;
    outcome(
        pass,
        format!("slope opt_dfst {:.2}, mm {:.2}", slopes[0], slopes[1]),
    )
}

fn safety(run: &HeadlineRun) -> Outcome {
    let cfg = SimConfig::default();
    let mut worst = 0.0f64;
    for e0 in [-100.0, -25.0, 25.0, 100.0] {
        let mut pid = PidController::new(cfg.gains, cfg.a_max);
        let mut s = VehicleState {
            position: -e0,
            velocity: cfg.v_des,
            acceleration: 0.0,
        };
        let mut leader = 0.0;
        let horizon = (60.0 / cfg.dt) as usize;
        for _ in 0..horizon {
            let a = pid.step(
                &s,
                Target {
                    position: leader,
                    velocity: cfg.v_des,
                },
                cfg.dt,
            );
            s.velocity = (s.velocity + a * cfg.dt).clamp(0.0, cfg.v_max);
            s.position += s.velocity * cfg.dt;
            leader += cfg.v_des * cfg.dt;
        }
        worst = worst.max((leader - s.position).abs());
    }
    let sweep_ok = run.error.is_none();
    outcome(
        sweep_ok && worst < 0.1,
        format!(
            "headline sweep {}; step response error after 60 s {:.2e} m",
            if sweep_ok {
                "had no violations"
            } else {
                "failed"
            },
            worst
        ),
    )
}

fn determinism(first: &HeadlineRun) -> Outcome {
    let second = headline_run();
    let pass = first.error.is_none() && !first.csv.is_empty() && first.csv == second.csv;
    outcome(
        pass,
        format!(
            "{} bytes, identical: {}",
            first.csv.len(),
            first.csv == second.csv
        ),
    )
}

fn main() {
    let started = Instant::now();
    let headline_data = headline_run();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("golden reference scenario", golden_example()),
        ("pair repair", repair()),
        ("matching vs exhaustive search", matching_oracle()),
        ("mm optimal on small fleets", mm_optimality()),
        ("depth dominance", dominance()),
        ("schedule and graph audits", schedule_audits()),
        ("headline evacuation savings", headline(&headline_data)),
        ("scheduler runtime slopes", complexity()),
        ("simulation safety", safety(&headline_data)),
        ("sweep determinism", determinism(&headline_data)),
    ];
    let mut failed = 0;
    for (k, (name, o)) in criteria.iter().enumerate() {
        println!(
            "{} {:>2}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1} s",
        criteria.len() - failed,
        criteria.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
