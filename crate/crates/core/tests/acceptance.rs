//! Acceptance suite. Each criterion prints one PASS/FAIL line with its
//! elapsed time and time limit; the process exits nonzero if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use boole_core::boole::{all_sign_triples, margin_sum, Margin};
use boole_core::exact::{rational, to_f64, Rational};
use boole_core::experiments::context_free::{context_free_property_run, statistical_margin_bound};
use boole_core::experiments::doctors::{doctor_rule, doctors_model, doctors_scenario, verdicts_follow_rule};
use boole_core::experiments::search::{all_deterministic_strategies, context_free_strategies};
use boole_core::experiments::telegraph::{telegraph_autocorrelation, telegraph_scenario, SignSchedule, TelegraphParams};
use boole_core::experiments::{
    run_pair_protocol, violation_search_context_free, violation_search_deterministic, MeasurementContext,
    Schedule,
};
use boole_core::io::dataset::{pairs_to_string, read_pairs, read_triples, triples_to_string};
use boole_core::representability::{
    achievable_set_bruteforce, find_joint_distribution, is_triple_representable, on_run_lattice, parity_grid,
    synthesize_triples, FEASIBILITY_TOLERANCE,
};
use boole_core::{
    boole_margins, check_triple_dataset, correlations_from_triples, exhaustive_lemma, CorrelationTriple,
    ExactCorrelation, GroupLabel, Outcome, PairDataset, Setting, SignPattern, TripleDataset,
};
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_criterion(number: usize, name: &str, limit: Duration, body: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let (passed, detail) = match outcome {
        Ok(detail) if elapsed <= limit => (true, detail),
        Ok(detail) => (false, format!("{detail}; exceeded time limit")),
        Err(e) => (false, e),
    };
    println!(
        "criterion {number:>2} [{}] {name} ({:.3} s, limit {:.3} s): {detail}",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    passed
}

fn random_triple_dataset(rng: &mut ChaCha8Rng, m: usize) -> TripleDataset {
    TripleDataset::from_outcomes((0..m).map(|_| [0; 3].map(|_| Outcome::from_bool_plus(rng.gen())))).unwrap()
}

fn random_exact(rng: &mut ChaCha8Rng) -> CorrelationTriple {
    let count: u64 = rng.gen_range(1..=1000);
    CorrelationTriple::Exact([0; 3].map(|_| {
        let plus = rng.gen_range(0..=count) as i64;
        ExactCorrelation::new(2 * plus - count as i64, count).unwrap()
    }))
}

/// 1. Per-run lemma, checked against a direct recomputation.
fn lemma() -> Check {
    let table = exhaustive_lemma();
    ensure(table.len() == 32, || format!("{} rows", table.len()))?;
    for row in &table {
        let a = row.triple.map(|o| o.value());
        let s = row.pattern.signs();
        let direct = s[0] * a[0] * a[1] + s[1] * a[0] * a[2] + s[2] * a[1] * a[2];
        ensure(direct == row.value, || format!("row {row:?} disagrees with {direct}"))?;
        ensure(row.value == 1 || row.value == -3, || format!("value {}", row.value))?;
    }
    for p in SignPattern::ALL {
        let mut values: Vec<i64> = table.iter().filter(|r| r.pattern == p).map(|r| r.value).collect();
        values.sort();
        ensure(values == [-3, -3, 1, 1, 1, 1, 1, 1], || format!("{p}: {values:?}"))?;
    }
    Ok("32 rows in {1, -3}; each facet {1 x6, -3 x2}".into())
}

/// 2. Random triple datasets never violate.
fn boole_theorem() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: Option<Rational> = None;
    for i in 0..1000 {
        let ds = random_triple_dataset(&mut rng, 10_000);
        let rep = check_triple_dataset(&ds).map_err(|e| e.to_string())?;
        for m in rep.margins {
            let r = m.exact().ok_or("approximate margin")?;
            ensure(r >= rational(0, 1), || format!("dataset {i}: margin {r}"))?;
            worst = Some(worst.map_or(r, |w| w.min(r)));
        }
    }
    Ok(format!("1000 datasets of 10^4 runs; smallest margin {}", worst.unwrap()))
}

/// 3. Margins sum to four.
fn facet_sum() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100_000 {
        let c = random_exact(&mut rng);
        let rep = boole_margins(&c).map_err(|e| e.to_string())?;
        let sum = margin_sum(&rep);
        ensure(sum == Margin::Exact(rational(4, 1)), || format!("{c:?}: {sum:?}"))?;
    }
    let mut worst_float = 0.0f64;
    for _ in 0..100_000 {
        let f = [0; 3].map(|_| rng.gen_range(-1.0..=1.0));
        let rep = boole_margins(&CorrelationTriple::Approximate(f)).map_err(|e| e.to_string())?;
        worst_float = worst_float.max((margin_sum(&rep).value() - 4.0).abs());
    }
    ensure(worst_float <= 1e-12, || format!("float sum off by {worst_float}"))?;
    Ok(format!("10^5 exact triples sum to exactly 4; 10^5 real triples within {worst_float:e}"))
}

/// 4. The simplex solver and the facet criterion agree.
fn solver_agreement() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut feasible, mut infeasible) = (0, 0);
    for _ in 0..10_000 {
        let f = [0; 3].map(|_| rng.gen_range(-1.0..=1.0));
        let c = CorrelationTriple::Approximate(f);
        let criterion = is_triple_representable(&c, FEASIBILITY_TOLERANCE).map_err(|e| e.to_string())?;
        let result = find_joint_distribution(&c).map_err(|e| e.to_string())?;
        match result.distribution() {
            Some(d) => {
                ensure(criterion, || format!("{f:?}: solver feasible, criterion not"))?;
                let total: f64 = d.weights().iter().sum();
                ensure((total - 1.0).abs() <= 1e-12, || format!("{f:?}: weights sum {total}"))?;
                ensure(d.weights().iter().all(|w| *w >= 0.0), || format!("{f:?}: negative weight"))?;
                for (got, want) in d.correlations().iter().zip(f) {
                    ensure((got - want).abs() <= 1e-9, || format!("{f:?}: reproduced {got}"))?;
                }
                feasible += 1;
            }
            None => {
                ensure(!criterion, || format!("{f:?}: criterion feasible, solver not"))?;
                let p = result.certificate().unwrap();
                let m = boole_margins(&c).unwrap().margin(p).value();
                ensure(m < 0.0, || format!("{f:?}: certificate {p} has margin {m}"))?;
                infeasible += 1;
            }
        }
    }
    Ok(format!("10^4 targets agree ({feasible} feasible, {infeasible} infeasible)"))
}

/// 5. Brute-force enumeration against the facet criterion.
fn brute_force_oracle() -> Check {
    let mut notes = Vec::new();
    for m in 1..=4usize {
        let achievable: BTreeSet<[ExactCorrelation; 3]> =
            achievable_set_bruteforce(m).map_err(|e| e.to_string())?;
        let grid = parity_grid(m);
        let accepted = |c: &[ExactCorrelation; 3]| boole_margins(&CorrelationTriple::Exact(*c)).unwrap().is_satisfied();
        let on_lattice: BTreeSet<_> = grid.iter().filter(|c| on_run_lattice(c) && accepted(c)).copied().collect();
        ensure(achievable == on_lattice, || {
            format!("m={m}: enumeration {} points, criterion on run lattice {}", achievable.len(), on_lattice.len())
        })?;
        let all_accepted = grid.iter().filter(|c| accepted(c)).count();
        let extreme = [m as i64, m as i64, -(m as i64)].map(|s| ExactCorrelation::new(s, m as u64).unwrap());
        ensure(!achievable.contains(&extreme), || format!("m={m}: (1,1,-1) enumerated"))?;
        notes.push(format!(
            "m={m}: {} achievable = criterion on run lattice ({} parity-grid points accepted)",
            achievable.len(),
            all_accepted
        ));
    }
    Ok(notes.join("; "))
}

/// 6. Exhaustive strategy search.
fn maximal_violation() -> Check {
    let all = violation_search_deterministic();
    ensure(all.violation == rational(2, 1), || format!("max {}", all.violation))?;
    ensure(all.evaluated == 64, || format!("{} strategies", all.evaluated))?;
    let free = violation_search_context_free();
    ensure(free.violation == rational(0, 1), || format!("context-free max {}", free.violation))?;
    ensure(free.evaluated == 8, || format!("{} context-free strategies", free.evaluated))?;
    ensure(
        all.maximizers.iter().all(|s| !s.is_context_free()),
        || "a context-free maximizer".into(),
    )?;
    // independent count: a strategy hits 2 iff its three pair products multiply to -1
    let oracle = all_deterministic_strategies()
        .iter()
        .filter(|s| s.answers.iter().map(|[a, b]| a.times(*b).value()).product::<i64>() == -1)
        .count();
    ensure(oracle == all.maximizers.len(), || format!("{} vs {oracle}", all.maximizers.len()))?;
    ensure(context_free_strategies().len() == 8, || "context-free family size".into())?;
    Ok(format!(
        "64 strategies: max violation 2 ({} maximizers, all contextual); 8 context-free: max 0",
        all.maximizers.len()
    ))
}

/// 7. Doctors and patients.
fn doctors() -> Check {
    for dates in [3, 30, 300] {
        for patients in [1, 2, 7] {
            let (ds, rep) = doctors_scenario(dates, patients).map_err(|e| e.to_string())?;
            ensure(rep.boole.violation_amount == Margin::Exact(rational(2, 1)), || {
                format!("dates={dates}, patients={patients}: {:?}", rep.boole.violation_amount)
            })?;
            ensure(rep.correlations.values() == [1.0, 1.0, -1.0], || format!("{:?}", rep.correlations))?;
            ensure(verdicts_follow_rule(&ds, doctor_rule), || "verdict off the rule table".into())?;
        }
    }
    // the model's verdict ignores the patient and the staffing pair, given doctor and date
    let model = doctors_model(doctor_rule, "probe");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for date in 0..300u64 {
        for doctor in Setting::ALL {
            let want = doctor_rule(doctor, date);
            for group in GroupLabel::ALL {
                for _ in 0..4 {
                    let patient: u64 = rng.gen();
                    let ctx = MeasurementContext { group, time: Some(date as f64) };
                    ensure(model.outcome(doctor, &patient, &ctx) == want, || {
                        format!("doctor {doctor:?} date {date} depends on more than (doctor, date)")
                    })?;
                }
            }
        }
    }
    Ok("violation exactly 2 for dates 3, 30, 300; verdicts depend on (doctor, date) only".into())
}

/// 8. Telegraph scenario.
fn telegraph() -> Check {
    let m = 100_000;
    let flipped = TelegraphParams { gamma: 0.1, delta: 0.5, signs: SignSchedule::flip_in_g23() };
    let (_, rep) = telegraph_scenario(flipped, m, 8).map_err(|e| e.to_string())?;
    let x = (-0.1f64).exp();
    let want = (x + x * x) - (1.0 - x);
    let got = rep.boole.violation_amount.value();
    ensure((got - want).abs() <= 0.02, || format!("violation {got} vs {want}"))?;

    let identity = TelegraphParams { signs: SignSchedule::identity(), ..flipped };
    let (_, raw) = telegraph_scenario(identity, m, 8).map_err(|e| e.to_string())?;
    let tol = 5.0 / (m as f64).sqrt();
    let taus = [0.5, 1.0, 0.5];
    let observed = raw.correlations.values();
    for ((obs, tau), name) in observed.iter().zip(taus).zip(["F12", "F13", "F23"]) {
        let law = telegraph_autocorrelation(0.1, tau);
        ensure((obs - law).abs() <= tol, || format!("{name} = {obs}, law {law}"))?;
    }
    Ok(format!(
        "violation {got:.5} vs derived {want:.5}; raw correlations {observed:.4?} within {tol:.4} of e^(-2 gamma tau)"
    ))
}

/// 9. Context-free models respect the bound.
fn statement_s() -> Check {
    let m = 10_000;
    let summary = context_free_property_run(m, 100, 9).map_err(|e| e.to_string())?;
    let bound = statistical_margin_bound(m);
    let pair = to_f64(&summary.worst_pair_margin);
    ensure(pair >= bound, || format!("pair margin {pair} below {bound}"))?;
    ensure(summary.worst_triple_margin >= rational(0, 1), || {
        format!("triple margin {}", summary.worst_triple_margin)
    })?;
    Ok(format!(
        "100 models, m=10^4: worst pair margin {pair:.5} >= {bound:.5}; worst triple margin {}",
        summary.worst_triple_margin
    ))
}

fn vertex_combination(weights: [i128; 4]) -> [Rational; 3] {
    let vertices = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];
    let total: i128 = weights.iter().sum();
    let mut f = [rational(0, 1); 3];
    for (w, v) in weights.iter().zip(vertices) {
        for k in 0..3 {
            f[k] += rational(w * v[k], total);
        }
    }
    f
}

/// 10. Synthesis round trip.
fn synthesis() -> Check {
    let m = 1000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut exact_cases = 0;
    let mut worst = rational(0, 1);
    for i in 0..100 {
        // half the targets have denominators dividing m, half do not
        let total: i128 = if i % 2 == 0 { [8, 10, 20, 25, 40][i / 2 % 5] } else { [7, 13, 17, 33, 97][i / 2 % 5] };
        let mut weights = [0i128; 4];
        for _ in 0..total {
            weights[rng.gen_range(0..4)] += 1;
        }
        let target = vertex_combination(weights);
        let c = CorrelationTriple::Rational(target);
        ensure(is_triple_representable(&c, 0.0).unwrap(), || format!("{target:?} not feasible"))?;
        let ds = synthesize_triples(&c, m).map_err(|e| e.to_string())?;
        ensure(ds.m() == m, || format!("{} runs", ds.m()))?;
        let got = correlations_from_triples(&ds).unwrap().ratios().unwrap();
        for (g, t) in got.iter().zip(&target) {
            let err = (*g - *t).abs();
            worst = worst.max(err);
            ensure(err <= rational(3, m as i128), || format!("{target:?}: error {err}"))?;
        }
        let scaled: Vec<Rational> = target.iter().map(|t| *t * m as i128).collect();
        let compatible = scaled.iter().all(|s| s.is_integer()) && {
            let sums = scaled.iter().map(|s| s.to_integer() as i64).collect::<Vec<_>>();
            let ec: Vec<_> = sums.iter().filter_map(|s| ExactCorrelation::new(*s, m as u64).ok()).collect();
            ec.len() == 3 && on_run_lattice(&[ec[0], ec[1], ec[2]])
        };
        if compatible {
            ensure(got == target, || format!("{target:?} compatible but got {got:?}"))?;
            exact_cases += 1;
        }
    }
    ensure(exact_cases >= 50, || format!("only {exact_cases} compatible targets"))?;
    Ok(format!("100 targets within 3/m (worst {}); {exact_cases} compatible targets reproduced exactly", worst))
}

fn cli_output(args: &[&str]) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("boole").chain(args.iter().copied());
    let code = boole_core::cli::dispatch(argv, &mut out, &mut err);
    ensure(code == 0, || format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err)))?;
    Ok(out)
}

/// 11. CSV round trips and reproducible reports.
fn interface() -> Check {
    let mut pair_sets: Vec<PairDataset> = Vec::new();
    let mut triple_sets: Vec<TripleDataset> = Vec::new();
    pair_sets.push(doctors_scenario(30, 3).unwrap().0);
    let tele = TelegraphParams { gamma: 0.1, delta: 0.5, signs: SignSchedule::flip_in_g23() };
    pair_sets.push(telegraph_scenario(tele, 2000, 11).unwrap().0);
    pair_sets.extend(all_deterministic_strategies().iter().map(|s| s.dataset()));
    let cf = boole_core::experiments::context_free::property_run_models(5, 11);
    for model in &cf {
        let schedule = Schedule::untimed([50, 60, 70]).unwrap();
        pair_sets.push(run_pair_protocol(&model.to_measurement_model(), &schedule, 11).unwrap().0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    triple_sets.extend((0..20).map(|_| random_triple_dataset(&mut rng, 57)));
    for t in [[1, 1, 1], [0, 0, 0], [1, -1, -1]] {
        let c = CorrelationTriple::Rational(t.map(|x| rational(x, 1)));
        triple_sets.push(synthesize_triples(&c, 40).unwrap());
    }
    for ds in &pair_sets {
        let text = pairs_to_string(ds);
        let back = read_pairs(text.as_bytes()).map_err(|e| e.to_string())?;
        ensure(&back == ds, || "pair round trip changed the dataset".into())?;
        ensure(pairs_to_string(&back) == text, || "pair round trip changed the bytes".into())?;
    }
    for ds in &triple_sets {
        let text = triples_to_string(ds);
        let back = read_triples(text.as_bytes()).map_err(|e| e.to_string())?;
        ensure(&back == ds, || "triple round trip changed the dataset".into())?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let triples_path = dir.path().join("t.csv");
    std::fs::write(&triples_path, triples_to_string(&triple_sets[0])).unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["scenario", "doctors", "--dates", "30", "--patients", "2"],
        vec!["scenario", "telegraph", "--m", "5000", "--seed", "7"],
        vec!["scenario", "context-free", "--m", "200", "--trials", "5"],
        vec!["check-triples", triples_path.to_str().unwrap()],
        vec!["search"],
        vec!["lemma"],
        vec!["feasible", "--f12", "0.5", "--f13", "1/3", "--f23", "-0.25"],
    ];
    for args in &runs {
        let a = cli_output(args)?;
        let b = cli_output(args)?;
        ensure(a == b, || format!("{args:?} not byte-identical"))?;
    }
    Ok(format!(
        "{} pair and {} triple datasets round-trip; {} CLI reports byte-identical",
        pair_sets.len(),
        triple_sets.len(),
        runs.len()
    ))
}

fn main() {
    let secs = Duration::from_secs_f64;
    // sanity on the enumeration order used throughout
    assert_eq!(all_sign_triples()[0], [Outcome::Plus; 3]);

    let results = [
        run_criterion(1, "per-sample lemma", secs(0.001), lemma),
        run_criterion(2, "Boole theorem on triple datasets", secs(5.0), boole_theorem),
        run_criterion(3, "facet-sum identity", secs(2.0), facet_sum),
        run_criterion(4, "criterion/solver agreement", secs(30.0), solver_agreement),
        run_criterion(5, "brute-force oracle", secs(10.0), brute_force_oracle),
        run_criterion(6, "maximal violation", secs(1.0), maximal_violation),
        run_criterion(7, "doctors scenario", secs(1.0), doctors),
        run_criterion(8, "telegraph scenario", secs(30.0), telegraph),
        run_criterion(9, "context-free restoration", secs(60.0), statement_s),
        run_criterion(10, "synthesis round trip", secs(10.0), synthesis),
        run_criterion(11, "interface round trips", secs(5.0), interface),
    ];
    let passed = results.iter().filter(|r| **r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
