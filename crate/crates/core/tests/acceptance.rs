//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its own PASS/FAIL line; the process exits nonzero if any fails.

mod common;

use std::time::Instant;

use common::*;
use fairsurv::dataio::{generate_synthetic, SynthSpec};
use fairsurv::evalmetrics::{brier_score, cross_validate, harrell_c_index, time_dependent_auc};
use fairsurv::fairness::{
    ci_uncensored_ordinal, concordance_imparity, concordance_imparity_par, fair_calibration,
    CalibrationVerdict, GroupPartition, GroupRule,
};
use fairsurv::fsrf::{best_split, fit_forest, score_split, ForestParams, SplitCriterion, SplitRule, TrainingData};
use fairsurv::survstats::{
    chi_square_sf, kaplan_meier, logrank_statistic, nelson_aalen, normal_sf, wilcoxon_signed_rank,
};
use fairsurv::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ci_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut undefined = 0;
    for d in 0..200 {
        let n = rng.random_range(2..=30);
        let k = if d % 2 == 0 { 2 } else { 3 };
        let censoring = rng.random_range(0.3..0.7);
        let (times, events) = random_outcomes(&mut rng, n.max(k), censoring, 10);
        let n = times.len();
        let risks = random_risks(&mut rng, n);
        let groups = random_groups(&mut rng, n, k);
        let records: Vec<(f64, bool)> = times.iter().copied().zip(events.iter().copied()).collect();
        let partition = GroupPartition::from_indices(groups.clone(), k).unwrap();
        let (p, c) = brute_force_tally(&times, &events, &risks, &groups, k);
        let got = concordance_imparity(&records, &risks, &partition);
        match (brute_force_ci(&p, &c), got) {
            (None, Err(Error::NoComparablePairs)) => undefined += 1,
            (Some(ci), Ok(res)) => {
                let halves: Vec<u64> = c.iter().map(|&v| (2.0 * v) as u64).collect();
                if res.tally.permissible != p || res.tally.concordant_halves() != halves.as_slice() {
                    return Err(format!("dataset {d}: tallies differ"));
                }
                if res.ci.to_bits() != ci.to_bits() {
                    return Err(format!("dataset {d}: CI {} vs oracle {ci}", res.ci));
                }
            }
            (want, got) => return Err(format!("dataset {d}: oracle {want:?}, got {got:?}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        secs < 10.0,
        format!("200 datasets identical ({undefined} without pairs), {secs:.2} s"),
    )
}

fn bridge() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(4..=30);
        let times = distinct_times(&mut rng, n);
        let risks = random_risks(&mut rng, n);
        let groups = random_groups(&mut rng, n, 2);
        let records: Vec<(f64, bool)> = times.iter().map(|&t| (t, true)).collect();
        let partition = GroupPartition::from_indices(groups, 2).unwrap();
        let alg = concordance_imparity(&records, &risks, &partition).map_err(|e| e.to_string())?;
        // shorter survival is the larger outcome
        let outcome: Vec<f64> = times.iter().map(|t| -t).collect();
        let sauc = ci_uncensored_ordinal(&outcome, &risks, &partition).map_err(|e| e.to_string())?;
        worst = worst.max((alg.ci - sauc).abs());
    }
    check(worst <= 1e-12, format!("max |difference| {worst:.3e} over 100 datasets"))
}

fn estimators() -> Outcome {
    let recs = [(1.0, true), (2.0, false), (3.0, true)];
    let km = kaplan_meier(&recs).map_err(|e| e.to_string())?;
    let na = nelson_aalen(&recs).map_err(|e| e.to_string())?;
    let km_err = (km.eval(2.0) - 2.0 / 3.0).abs();
    let na_err = (na.eval(3.0) - 4.0 / 3.0).abs();

    let a = [(1.0, true), (2.0, true)];
    let b = [(3.0, true), (4.0, true)];
    let ab = logrank_statistic(&a, &b).map_err(|e| e.to_string())?;
    let ba = logrank_statistic(&b, &a).map_err(|e| e.to_string())?;
    // t=1: O−E = 1 − 2/4, V = 1/4;  t=2: O−E = 1 − 1/3, V = 2/9;  later terms vanish
    let hand = (0.5 + 2.0 / 3.0) / (0.25f64 + 2.0 / 9.0).sqrt();
    let anti = (ab + ba).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut anti_random: f64 = 0.0;
    for _ in 0..50 {
        let (ta, ea) = random_outcomes(&mut rng, 12, 0.3, 8);
        let (tb, eb) = random_outcomes(&mut rng, 9, 0.3, 8);
        let a: Vec<(f64, bool)> = ta.into_iter().zip(ea).collect();
        let b: Vec<(f64, bool)> = tb.into_iter().zip(eb).collect();
        if let (Ok(x), Ok(y)) = (logrank_statistic(&a, &b), logrank_statistic(&b, &a)) {
            anti_random = anti_random.max((x + y).abs());
        }
    }
    check(
        km_err <= 1e-12 && na_err <= 1e-12 && anti <= 1e-12 && anti_random <= 1e-12 && (ab - hand).abs() <= 1e-9,
        format!(
            "KM err {km_err:.1e}, NA err {na_err:.1e}, antisymmetry {:.1e}, logrank {ab:.12} vs hand {hand:.12}",
            anti.max(anti_random)
        ),
    )
}

fn tails() -> Outcome {
    let mut chi_err: f64 = 0.0;
    for i in 0..=500 {
        let x = f64::from(i) * 0.1;
        let v = chi_square_sf(x, 2).map_err(|e| e.to_string())?;
        chi_err = chi_err.max((v - (-x / 2.0).exp()).abs());
    }
    let z_err = (normal_sf(1.959964) - 0.025).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut w_err: f64 = 0.0;
    for n in 5..=12 {
        for _ in 0..10 {
            let mut mags: Vec<f64> = (1..=n).map(|m| m as f64 + rng.random::<f64>() * 0.5).collect();
            mags.shuffle(&mut rng);
            let diffs: Vec<f64> = mags
                .iter()
                .map(|&m| if rng.random_bool(0.5) { m } else { -m })
                .collect();
            let zeros = vec![0.0; n];
            let p = wilcoxon_signed_rank(&diffs, &zeros).map_err(|e| e.to_string())?;
            w_err = w_err.max((p - wilcoxon_exact(&diffs)).abs());
        }
    }
    check(
        chi_err <= 1e-10 && z_err <= 1e-6 && w_err <= 5e-2,
        format!("chi-square err {chi_err:.1e}, normal err {z_err:.1e}, Wilcoxon err {w_err:.3}"),
    )
}

fn reductions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut c_err, mut b_err, mut a_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let n = rng.random_range(4..=50);
        let times = distinct_times(&mut rng, n);
        let records: Vec<(f64, bool)> = times.iter().map(|&t| (t, true)).collect();
        let risks = random_risks(&mut rng, n);

        // Harrell: every pair is comparable, the shorter time should carry the larger risk
        let mut s = 0.0;
        let mut pairs = 0.0;
        for i in 0..n {
            for j in 0..n {
                if times[i] < times[j] {
                    pairs += 1.0;
                    s += if risks[i] > risks[j] { 1.0 } else if risks[i] == risks[j] { 0.5 } else { 0.0 };
                }
            }
        }
        c_err = c_err.max((harrell_c_index(&records, &risks).map_err(|e| e.to_string())? - s / pairs).abs());

        let t = times[rng.random_range(0..n)].min(n as f64 - 1.0);
        let surv: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let mse = (0..n)
            .map(|i| (f64::from(u8::from(times[i] > t)) - surv[i]).powi(2))
            .sum::<f64>()
            / n as f64;
        b_err = b_err.max((brier_score(&records, &surv, t).map_err(|e| e.to_string())? - mse).abs());

        let cases: Vec<f64> = (0..n).filter(|&i| times[i] <= t).map(|i| risks[i]).collect();
        let controls: Vec<f64> = (0..n).filter(|&i| times[i] > t).map(|i| risks[i]).collect();
        let got = time_dependent_auc(&records, &risks, t).map_err(|e| e.to_string())?;
        a_err = a_err.max((got - auc(&cases, &controls)).abs());
    }
    check(
        c_err <= 1e-12 && b_err <= 1e-12 && a_err <= 1e-12,
        format!("C-index err {c_err:.1e}, Brier err {b_err:.1e}, td-AUC err {a_err:.1e}"),
    )
}

/// Two groups of 1000; in each of ten prediction levels exactly `p·100`
/// records outlive `t`. Offsets are added to the predictions afterwards.
fn calibration_case(offsets: [f64; 2]) -> fairsurv::Result<CalibrationVerdict> {
    let t = 10.0;
    let mut records = Vec::new();
    let mut predicted = Vec::new();
    let mut groups = Vec::new();
    for (g, offset) in offsets.iter().enumerate() {
        for level in 0..10u32 {
            let survivors = 5 + 8 * level;
            let p = f64::from(survivors) / 100.0;
            for i in 0..100 {
                let time = if i < survivors { 20.0 } else { 5.0 };
                records.push((time, true));
                predicted.push(p + offset);
                groups.push(g);
            }
        }
    }
    let partition = GroupPartition::from_indices(groups, 2)?;
    Ok(fair_calibration(&records, &predicted, &partition, t, 10)?.verdict)
}

fn calibration_branches() -> Outcome {
    let got = [
        calibration_case([0.0, 0.0]),
        calibration_case([0.1, 0.1]),
        calibration_case([0.0, 0.1]),
    ];
    let want = [
        CalibrationVerdict::FairCalibratedRepresentation,
        CalibrationVerdict::FairCalibratedDifference,
        CalibrationVerdict::BiasedCalibrated,
    ];
    let got: Vec<String> = got
        .into_iter()
        .map(|v| v.map_or_else(|e| format!("error: {e}"), |v| format!("{v:?}")))
        .collect();
    let want: Vec<String> = want.iter().map(|v| format!("{v:?}")).collect();
    check(got == want, format!("calibrated / uniform offset / group offset -> {}", got.join(", ")))
}

fn directional() -> Outcome {
    let start = Instant::now();
    let mut wins = 0;
    let mut drops = Vec::new();
    let seeds = 20;
    for seed in 0..seeds {
        let full = generate_synthetic(&SynthSpec {
            n: 2000,
            hazard_ratio: 2.0,
            censor_rate: 0.3,
            seed,
            ..SynthSpec::default()
        })
        .map_err(|e| e.to_string())?;
        let mut idx: Vec<usize> = (0..full.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let train = full.subset(&idx[..1400]);
        let test = full.subset(&idx[1400..]);
        let rule = GroupRule::from_dataset(&full).map_err(|e| e.to_string())?;
        let p_train = rule.partition(&train).map_err(|e| e.to_string())?;
        let p_test = rule.partition(&test).map_err(|e| e.to_string())?;
        let run = |criterion| -> fairsurv::Result<(f64, f64)> {
            let params = ForestParams {
                n_trees: 25,
                min_leaf: 15,
                criterion,
                ..ForestParams::default()
            };
            let model = fit_forest(&train, &params, &p_train, seed)?;
            let risks = model.predict_risks(&test)?;
            Ok((
                concordance_imparity(&test.records, &risks, &p_test)?.ci,
                harrell_c_index(&test.records, &risks)?,
            ))
        };
        let (ci_fair, c_fair) = run(SplitCriterion::FairSurvivalDifference).map_err(|e| e.to_string())?;
        let (ci_base, c_base) = run(SplitCriterion::LogrankOnly).map_err(|e| e.to_string())?;
        if ci_fair < ci_base {
            wins += 1;
        }
        drops.push(c_base - c_fair);
    }
    let secs = start.elapsed().as_secs_f64();
    let mean_drop = drops.iter().sum::<f64>() / drops.len() as f64;
    check(
        wins * 5 >= seeds * 4 && mean_drop <= 0.05 && secs < 300.0,
        format!(
            "lower CI in {wins}/{seeds} seeds, mean C-index drop {:.2} pp, {secs:.0} s",
            100.0 * mean_drop
        ),
    )
}

fn determinism() -> Outcome {
    let data = generate_synthetic(&SynthSpec {
        n: 300,
        seed: 11,
        ..SynthSpec::default()
    })
    .map_err(|e| e.to_string())?;
    let rule = GroupRule::from_dataset(&data).map_err(|e| e.to_string())?;
    let partition = rule.partition(&data).map_err(|e| e.to_string())?;
    let params = ForestParams {
        n_trees: 12,
        min_leaf: 10,
        ..ForestParams::default()
    };
    let run = |threads: usize| -> fairsurv::Result<(String, String)> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let model = fit_forest(&data, &params, &partition, 5)?.with_group_rule(rule.clone());
            let cv = cross_validate(&data, &params, 3, 5, None, 10)?;
            Ok((model.to_json()?, serde_json::to_string(&cv)?))
        })
    };
    let (m1, cv1) = run(1).map_err(|e| e.to_string())?;
    let (m4, cv4) = run(4).map_err(|e| e.to_string())?;
    let (m1b, _) = run(1).map_err(|e| e.to_string())?;
    check(
        m1 == m4 && m1 == m1b && cv1 == cv4,
        format!(
            "model bytes equal: {}, CV reports equal: {} (1 vs 4 threads)",
            m1 == m4 && m1 == m1b,
            cv1 == cv4
        ),
    )
}

fn performance() -> Outcome {
    let n = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (times, events) = random_outcomes(&mut rng, n, 0.4, 5_000);
    let records: Vec<(f64, bool)> = times.into_iter().zip(events).collect();
    let risks: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let partition = GroupPartition::from_indices(random_groups(&mut rng, n, 2), 2).unwrap();

    let start = Instant::now();
    let serial = concordance_imparity(&records, &risks, &partition).map_err(|e| e.to_string())?;
    let t_serial = start.elapsed().as_secs_f64();

    let timed = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let start = Instant::now();
            let r = concordance_imparity_par(&records, &risks, &partition);
            (r, start.elapsed().as_secs_f64())
        })
    };
    let (one, t1) = timed(1);
    let (eight, t8) = timed(8);
    let one = one.map_err(|e| e.to_string())?;
    let eight = eight.map_err(|e| e.to_string())?;
    let identical = one == serial && eight == serial;
    let speedup = t1 / t8;
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    check(
        t_serial <= 10.0 && speedup >= 3.0 && identical,
        format!(
            "serial {t_serial:.2} s, 1 thread {t1:.2} s, 8 threads {t8:.2} s, speedup {speedup:.2}x, \
             identical output: {identical}, available CPUs: {cpus}"
        ),
    )
}

/// A node whose first feature alternates along the time order. Consecutive
/// pairs share their event flag, so both children of the `x0 <= 0.5` split
/// have the same event pattern, the same Nelson–Aalen risk, and CI = 0.
fn engineered_node(rng: &mut ChaCha8Rng) -> (fairsurv::SurvivalDataset, GroupPartition) {
    let n = 24;
    let mut times: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..100.0)).collect();
    times.sort_by(f64::total_cmp);
    let pair_events: Vec<bool> = (0..n / 2).map(|q| q == 0 || rng.random_bool(0.7)).collect();
    let events: Vec<bool> = (0..n).map(|r| pair_events[r / 2]).collect();
    let features: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            let mut f = vec![(r % 2) as f64];
            f.extend((0..3).map(|_| rng.random_range(-1.0..1.0)));
            f
        })
        .collect();
    let groups = random_groups(rng, n, 2);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let pick = |v: &[f64]| order.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let data = dataset(
        &pick(&times),
        &order.iter().map(|&i| events[i]).collect::<Vec<_>>(),
        &order.iter().map(|&i| features[i].clone()).collect::<Vec<_>>(),
        &order.iter().map(|&i| groups[i]).collect::<Vec<_>>(),
    );
    let partition = GroupPartition::from_indices(order.iter().map(|&i| groups[i]).collect(), 2).unwrap();
    (data, partition)
}

fn fsd_dominance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let params = ForestParams {
        mtry: Some(4),
        min_leaf: 4,
        ..ForestParams::default()
    };
    let mut nodes = 0;
    let mut tried = 0;
    let mut picked = 0;
    while nodes < 50 {
        tried += 1;
        let (data, partition) = engineered_node(&mut rng);
        // enumerate every candidate directly and keep nodes with exactly one CI = 0 split
        let mut zero = Vec::new();
        for attr in 0..4 {
            let mut vals: Vec<f64> = data.records.iter().map(|r| r.features[attr].as_f64()).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            for w in vals.windows(2) {
                let rule = SplitRule::Threshold(0.5 * (w[0] + w[1]));
                if let Ok(c) = score_split(&data.records, attr, rule, &partition, params.min_leaf) {
                    if c.ci == Some(0.0) {
                        zero.push(c);
                    }
                }
            }
        }
        if zero.len() != 1 || zero[0].attribute != 0 {
            continue;
        }
        nodes += 1;
        let training = TrainingData::new(&data, &partition).map_err(|e| e.to_string())?;
        let all: Vec<usize> = (0..data.len()).collect();
        let best = best_split(&training, &all, &mut rng, &params);
        if best.as_ref().is_some_and(|b| {
            b.attribute == 0 && b.rule == zero[0].rule && b.ci == Some(0.0) && b.fsd == f64::INFINITY
        }) {
            picked += 1;
        }
    }
    check(
        picked == nodes,
        format!("CI = 0 candidate chosen in {picked}/{nodes} nodes ({tried} generated)"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("CI oracle equivalence", ci_oracle),
        ("uncensored bridge", bridge),
        ("estimator golden values", estimators),
        ("tail-function accuracy", tails),
        ("uncensored metric reductions", reductions),
        ("calibration branch coverage", calibration_branches),
        ("directional debiasing experiment", directional),
        ("determinism across thread counts", determinism),
        ("concordance imparity performance", performance),
        ("FSD dominance of CI = 0 splits", fsd_dominance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (status, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {status}: {name} ({detail})", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
