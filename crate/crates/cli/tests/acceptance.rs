//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::FRAC_PI_2;
use std::process::Command;
use std::time::{Duration, Instant};

use cqze_core::noise::stream_rng;
use cqze_core::{
    build_statistics, monte_carlo, mutual_information, run_michelson, run_protocol, run_scheduled,
    sample_schedule, simulate_exact, BlockingSchedule, BobBit, NoiseModel, OutcomeDistribution,
    ProtocolParams,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(m: usize, n: usize) -> ProtocolParams {
    ProtocolParams::new(m, n).unwrap()
}

fn operating_points() -> Outcome {
    let start = Instant::now();
    let cases = [
        (25, 320, 0.906, 0.912),
        (50, 1250, 0.952, 0.953),
        (150, 10000, 0.984, 0.982),
    ];
    let mut found = Vec::new();
    for (m, n, p1, p2) in cases {
        let p = params(m, n);
        let d1 = run_protocol(&p, BobBit::Pass).p_d1;
        let d2 = run_protocol(&p, BobBit::Block).p_d2;
        ensure((d1 - p1).abs() <= 0.005 && (d2 - p2).abs() <= 0.005, || {
            format!("M={m} N={n}: got ({d1:.4}, {d2:.4}), want ({p1}, {p2})")
        })?;
        found.push(format!("({d1:.3},{d2:.3})"));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{} in {elapsed:.2?}", found.join(" ")))
}

fn closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in 1..=200 {
        let exact = (FRAC_PI_2 / m as f64).cos().powi(2 * m as i32);
        for n in [1, 10, 100] {
            let d1 = run_protocol(&params(m, n), BobBit::Pass).p_d1;
            worst = worst.max((d1 - exact).abs());
            if m > 25 {
                ensure(d1 > 0.90, || format!("M={m}: p_d1 = {d1}"))?;
            }
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("max |p_d1 - cos^2M| = {worst:.1e}"))
}

fn conservation() -> Outcome {
    let mut rng = stream_rng(0xACCE, 0);
    let cases = 1000;
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let m = rng.random_range(1..=100);
        let n = rng.random_range(1..=1000);
        let bit = if rng.random::<bool>() {
            BobBit::Block
        } else {
            BobBit::Pass
        };
        let rate: f64 = if rng.random::<bool>() {
            0.0
        } else {
            rng.random_range(0.0..0.5)
        };
        let s: f64 = rng.random_range(0.0..4.0);
        let p = params(m, n)
            .with_imperfection(s)
            .unwrap()
            .with_final_inner_chain(rng.random());
        let schedule = sample_schedule(&p, bit, rate, &mut rng);
        for dist in [
            run_protocol(&p, bit),
            run_scheduled(&p, &schedule).unwrap(),
            simulate_exact(&p, &schedule).unwrap(),
        ] {
            worst = worst.max((dist.total() - 1.0).abs());
            ensure(dist.to_array().iter().all(|&x| x >= 0.0), || {
                format!("negative entry {dist:?}")
            })?;
        }
    }
    ensure(worst <= 1e-10, || format!("max |total - 1| = {worst:e}"))?;
    Ok(format!("{cases} cases, max |total - 1| = {worst:.1e}"))
}

fn grid_equivalence(
    name: &str,
    other: impl Fn(&ProtocolParams, BobBit) -> OutcomeDistribution,
) -> Outcome {
    let mut worst: f64 = 0.0;
    for m in 1..=10 {
        for n in 1..=10 {
            let p = params(m, n);
            for bit in BobBit::BOTH {
                worst = worst.max(other(&p, bit).max_abs_diff(&run_protocol(&p, bit)));
            }
        }
    }
    ensure(worst <= 1e-12, || {
        format!("{name}: max field diff {worst:e}")
    })?;
    Ok(format!("200 cases, max field diff {worst:.1e}"))
}

fn hand_unrolled() -> Outcome {
    let p = params(2, 2);
    let block = run_protocol(&p, BobBit::Block);
    let pass = run_protocol(&p, BobBit::Pass);
    let want_block = OutcomeDistribution {
        p_d1: 0.0625,
        p_d2: 0.5625,
        p_bob: 0.375,
        ..Default::default()
    };
    let want_pass = OutcomeDistribution {
        p_d1: 0.25,
        p_d2: 0.25,
        p_d3: 0.5,
        ..Default::default()
    };
    let diff = block
        .max_abs_diff(&want_block)
        .max(pass.max_abs_diff(&want_pass));
    ensure(diff <= 1e-12, || format!("block {block:?} pass {pass:?}"))?;
    Ok(format!("max diff {diff:.1e}"))
}

fn imperfection_study() -> Outcome {
    let grid: Vec<f64> = (0..=16).map(|k| k as f64 * 0.25).collect();
    let mut lowest_below_two = f64::INFINITY;
    for (m, n) in [(25, 320), (50, 1250)] {
        let mut last = (f64::INFINITY, f64::INFINITY);
        for &s in &grid {
            let p = params(m, n).with_imperfection(s).unwrap();
            let d1 = run_protocol(&p, BobBit::Pass).p_d1;
            let d2 = run_protocol(&p, BobBit::Block).p_d2;
            ensure(d1 <= last.0 && d2 <= last.1, || {
                format!("M={m} N={n} s={s}: not monotone")
            })?;
            if s < 2.0 {
                lowest_below_two = lowest_below_two.min(d1).min(d2);
            }
            last = (d1, d2);
        }
    }
    ensure(lowest_below_two > 0.75, || {
        format!("success rate {lowest_below_two} for s < 2")
    })?;
    Ok(format!(
        "monotone on 17-point grid, min success for s<2 = {lowest_below_two:.3}"
    ))
}

fn noise_study() -> Outcome {
    let start = Instant::now();
    let p = params(25, 320);
    let rates = [0.0, 0.0005, 0.001, 0.002, 0.005, 0.01];
    let seed = 2024;
    let clean_block = run_protocol(&p, BobBit::Block);
    let mut pass_means = Vec::new();
    let mut previous: Option<(f64, f64)> = None;
    for rate in rates {
        let model = NoiseModel::new(rate, seed, 10_000).unwrap();
        let pass = monte_carlo(&p, BobBit::Pass, &model).map_err(|e| e.to_string())?;
        if rate == 0.0 {
            ensure(pass.mean == run_protocol(&p, BobBit::Pass), || {
                "B=0 differs from engine".into()
            })?;
            ensure(pass.std_error.to_array() == [0.0; 5], || {
                "B=0 has nonzero error".into()
            })?;
        }
        if let Some((mean, se)) = previous {
            let slack = 3.0 * se.hypot(pass.std_error.p_d1);
            ensure(pass.mean.p_d1 <= mean + slack, || {
                format!("B={rate}: p_d1 rose beyond 3 SE")
            })?;
        }
        previous = Some((pass.mean.p_d1, pass.std_error.p_d1));
        pass_means.push(format!("{:.3}", pass.mean.p_d1));

        let block = monte_carlo(&p, BobBit::Block, &model).map_err(|e| e.to_string())?;
        ensure(
            block.mean.p_d1 == clean_block.p_d1
                && block.mean.p_d2 == clean_block.p_d2
                && block.mean.p_d3 == clean_block.p_d3
                && (block.mean.p_bob + block.mean.p_noise - clean_block.p_bob).abs() <= 1e-12,
            || format!("B={rate}: block case changed: {:?}", block.mean),
        )?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("p_d1 = [{}], {elapsed:.1?}", pass_means.join(", ")))
}

fn information() -> Outcome {
    let perfect_pass = OutcomeDistribution {
        p_d1: 0.97,
        p_d3: 0.03,
        ..Default::default()
    };
    let perfect_block = OutcomeDistribution {
        p_d2: 0.96,
        p_bob: 0.04,
        ..Default::default()
    };
    let zero =
        mutual_information(&build_statistics(&perfect_pass, &perfect_block, 1.0).unwrap()).unwrap();
    ensure(zero == 0.0, || format!("no-wrong-click MI = {zero}"))?;

    let p = params(2, 2);
    let stats = build_statistics(
        &run_protocol(&p, BobBit::Pass),
        &run_protocol(&p, BobBit::Block),
        1.0,
    )
    .unwrap();
    let mi = mutual_information(&stats).unwrap();
    ensure((mi - 0.2462).abs() <= 1e-3, || format!("M=2 N=2 MI = {mi}"))?;
    Ok(format!("zero-error MI = 0, M=2 N=2 MI = {mi:.4} bits"))
}

fn cli_output(args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cqze"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .env_remove("RUN_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let invocations: [&[&str]; 5] = [
        &[
            "run",
            "--M",
            "25",
            "--N",
            "320",
            "--bob-bit",
            "0",
            "--B",
            "0.002",
            "--trials",
            "2000",
            "--seed",
            "9",
        ],
        &[
            "sweep", "--M", "5,10", "--N", "20,40", "--B", "0,0.01", "--trials", "300", "--seed",
            "3",
        ],
        &[
            "sweep", "--shape", "25x320", "--s", "0:2:0.5", "--B", "0.001", "--trials", "200",
            "--format", "json",
        ],
        &[
            "message",
            "--random-bits",
            "300",
            "--M",
            "25",
            "--N",
            "320",
            "--B",
            "0.002",
            "--seed",
            "5",
        ],
        &["timing", "--L", "1000"],
    ];
    for args in invocations {
        let first = cli_output(args, "4")?;
        ensure(first == cli_output(args, "4")?, || {
            format!("{args:?}: repeat differs")
        })?;
        ensure(first == cli_output(args, "1")?, || {
            format!("{args:?}: thread count changes output")
        })?;
    }
    Ok(format!(
        "{} invocations byte-identical across repeats and 1 vs 4 threads",
        invocations.len()
    ))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("AC1 operating points", operating_points),
        ("AC2 closed form", closed_form),
        ("AC3 conservation", conservation),
        ("AC4 oracle equivalence", || {
            grid_equivalence("oracle", |p, bit| {
                simulate_exact(p, &BlockingSchedule::for_bit(p, bit)).unwrap()
            })
        }),
        ("AC5 Michelson equivalence", || {
            grid_equivalence("michelson", run_michelson)
        }),
        ("AC6 hand-unrolled M=N=2", hand_unrolled),
        ("AC7 imperfection study", imperfection_study),
        ("AC8 noise study", noise_study),
        ("AC9 mutual information", information),
        ("AC10 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name}: {reason}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
