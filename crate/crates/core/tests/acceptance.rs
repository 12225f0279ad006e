//! One line per acceptance criterion; the test fails if any criterion fails.

use rand::Rng;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use tvf::ansatz::{
    closed_form_at_most_one, closed_form_chain, gate_stats, reference_form_stats, tvf_at_most_one, tvf_chain, tvf_flp,
    tvf_lap, tvf_sum_eq_last, tvf_sum_leq_last, verify_feasibility, AnsatzSpec, Benchmark, FeasibleSet, GateStats,
};
use tvf::model::{
    brute_force_problem, brute_force_qubo, load_problem, penalize, ConstraintKind, LcqboProblem, PenaltyScope,
    StructuralConstraint,
};
use tvf::statevector::{argmax, seeded_rng, BitConvention, ParamCircuit, StateVector};
use tvf::vqe::{run_vqe, ExpectationMode, VqeConfig, VqeResult};

const SHOTS: u64 = 1024;
const LAMBDA: f64 = 100.0;
/// Total optimizer evaluations per seed, split evenly over the restarts.
const BUDGET: usize = 200;
const RESTARTS: usize = 5;
const SEEDS: u64 = 10;
const REQUIRED_SEEDS: usize = 8;
const SECONDS_PER_SEED: f64 = 10.0;
const AMPLITUDE_TOL: f64 = 1e-10;
const CLOSED_FORM_TOL: f64 = 1e-9;
const CONSISTENCY_TOL: f64 = 1e-9;
const TRIALS: usize = 1000;

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn fixture(name: &str) -> LcqboProblem {
    load_problem(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap()
}

fn probs(c: &ParamCircuit, theta: &[f64]) -> Vec<f64> {
    StateVector::run(&c.bind(theta).unwrap(), &StateVector::zero(c.num_qubits()).unwrap()).unwrap().probabilities()
}

struct SeedSweep {
    hits: usize,
    slowest: Duration,
    max_evals: usize,
    runs: Vec<VqeResult>,
}

fn sweep(problem: &LcqboProblem, spec: &AnsatzSpec, want_bits: &str, want_obj: f64) -> SeedSweep {
    let mut s = SeedSweep { hits: 0, slowest: Duration::ZERO, max_evals: 0, runs: Vec::new() };
    for seed in 0..SEEDS {
        let cfg = VqeConfig {
            shots: SHOTS,
            seed,
            max_iters: BUDGET / RESTARTS,
            restarts: RESTARTS,
            lambda: Some(LAMBDA),
            ..VqeConfig::default()
        };
        let t = Instant::now();
        let r = run_vqe(problem, spec, &cfg).unwrap();
        s.slowest = s.slowest.max(t.elapsed());
        s.max_evals = s.max_evals.max(r.restarts.iter().map(|x| x.evaluations).sum());
        if r.best_feasible && r.best_display() == want_bits && r.best_objective == want_obj {
            s.hits += 1;
        }
        s.runs.push(r);
    }
    s
}

fn reproduction(
    id: &'static str,
    title: &'static str,
    problem: &LcqboProblem,
    spec: AnsatzSpec,
    bits: &str,
    obj: f64,
    keep: &mut Vec<VqeResult>,
) -> Outcome {
    let oracle = brute_force_problem(problem).unwrap();
    let oracle_ok = oracle.best_index.map(|i| BitConvention::display(i, 4)).as_deref() == Some(bits)
        && oracle.best_objective == Some(obj)
        && oracle.objectives.len() == 16;
    let s = sweep(problem, &spec, bits, obj);
    let pass = oracle_ok && s.hits >= REQUIRED_SEEDS && s.max_evals <= BUDGET && s.slowest.as_secs_f64() < SECONDS_PER_SEED;
    let detail = format!(
        "{}/{} seeds reach {} at {}; at most {} evaluations per seed ({RESTARTS} starts); slowest seed {:.2}s; oracle optimum {}",
        s.hits,
        SEEDS,
        obj,
        bits,
        s.max_evals,
        s.slowest.as_secs_f64(),
        if oracle_ok { "confirmed" } else { "MISMATCH" }
    );
    keep.extend(s.runs);
    Outcome { id, title, pass, detail }
}

fn published_parameters() -> Outcome {
    let flp = BitConvention::display(argmax(&probs(&tvf_flp(2, 1).unwrap(), &[1.51, -3.44, 2.97, -0.0688])), 4);
    let lap = BitConvention::display(argmax(&probs(&tvf_lap(2, 2).unwrap(), &[0.01, -3.22, -1.68, 3.42])), 4);
    Outcome {
        id: "3",
        title: "published parameters",
        pass: flp == "1010" && lap == "0110",
        detail: format!("facility argmax {flp}, assignment argmax {lap}"),
    }
}

fn gate_tables() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 2..=8 {
        for (kind, c) in [
            (ConstraintKind::ChainMonotone, tvf_chain(n).unwrap()),
            (ConstraintKind::AtMostOne, tvf_at_most_one(n).unwrap()),
            (ConstraintKind::SumEqLast, tvf_sum_eq_last(n).unwrap()),
        ] {
            if Some(gate_stats(&c)) != reference_form_stats(kind, n) {
                ok = false;
                notes.push(format!("{} n={n} off formula", kind.name()));
            }
        }
    }
    // sum_leq_last: own construction, reported against the published target
    let mut leq = Vec::new();
    for n in 2..=8 {
        let s = gate_stats(&tvf_sum_leq_last(n).unwrap());
        let t = reference_form_stats(ConstraintKind::SumLeqLast, n).unwrap();
        ok &= s.su2 == t.su2 && s.params == t.params;
        leq.push(format!("n={n}:{}/{}", s.cnot, t.cnot));
    }
    notes.push(format!("sum_leq_last cnot ours/target {}", leq.join(" ")));

    let flp = fixture("flp.json");
    let lap = fixture("lap.json");
    let tvf_flp_s = gate_stats(&tvf_flp(2, 1).unwrap());
    let tvf_lap_s = gate_stats(&tvf_lap(2, 2).unwrap());
    ok &= tvf_flp_s == GateStats::new(10, 2, 4) && tvf_flp_s.cost == 30;
    ok &= tvf_lap_s == GateStats::new(6, 4, 4) && tvf_lap_s.cost == 46;

    let build = |p: &LcqboProblem, spec: AnsatzSpec| spec.build(p, LAMBDA).unwrap().stats();
    let qaoa_flp = build(&flp, AnsatzSpec::Qaoa { p: 2, scope: PenaltyScope::All });
    ok &= qaoa_flp.cnot == 12 && qaoa_flp.su2 == 26;
    for (label, p, bench) in [("facility", &flp, Benchmark::FacilityLocation), ("assignment", &lap, Benchmark::Assignment)] {
        let two = build(p, AnsatzSpec::TwoLocal { depth: 1 });
        let qa = build(p, AnsatzSpec::Qaoa { p: 2, scope: PenaltyScope::All });
        let qe = build(p, AnsatzSpec::Qaoa { p: 2, scope: PenaltyScope::EqualitiesOnly });
        let r2 = bench.reference("two-local").unwrap();
        let rq = bench.reference("qaoa").unwrap();
        notes.push(format!(
            "{label}: two-local {}/{}/{} vs published {}/{}/{}, qaoa(all) {}/{}/{} qaoa(eq) {}/{}/{} vs published {}/{}/{}",
            two.su2, two.cnot, two.params, r2.su2, r2.cnot, r2.params, qa.su2, qa.cnot, qa.params, qe.su2, qe.cnot, qe.params,
            rq.su2, rq.cnot, rq.params
        ));
    }
    Outcome { id: "4", title: "gate-count tables", pass: ok, detail: notes.join("; ") }
}

fn feasibility_suite() -> Outcome {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut check = |label: String, c: ParamCircuit, set: FeasibleSet| {
        let r = verify_feasibility(&c, &set, TRIALS, checked as u64).unwrap();
        checked += 1;
        worst = worst.max(r.worst_infeasible_amplitude);
        if !r.pass || r.worst_infeasible_amplitude > AMPLITUDE_TOL {
            failures.push(format!("{label}: {}", r.summary(c.num_qubits())));
        }
    };
    for n in 1..=8 {
        check(format!("chain {n}"), tvf_chain(n).unwrap(), FeasibleSet::for_kind(ConstraintKind::ChainMonotone, n).unwrap());
        if n >= 2 {
            check(format!("at_most_one {n}"), tvf_at_most_one(n).unwrap(), FeasibleSet::for_kind(ConstraintKind::AtMostOne, n).unwrap());
            check(format!("sum_leq_last {n}"), tvf_sum_leq_last(n).unwrap(), FeasibleSet::for_kind(ConstraintKind::SumLeqLast, n).unwrap());
            check(format!("sum_eq_last {n}"), tvf_sum_eq_last(n).unwrap(), FeasibleSet::for_kind(ConstraintKind::SumEqLast, n).unwrap());
        }
    }
    for (f, m) in [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (1, 6), (4, 1), (2, 3)] {
        let cs = (0..f)
            .flat_map(|i| (0..m).map(move |j| StructuralConstraint::new(ConstraintKind::VarLeqVar, vec![i * m + j, f * m + i]).unwrap()))
            .collect();
        check(format!("flp {f}x{m}"), tvf_flp(f, m).unwrap(), FeasibleSet::new(f * m + f, cs).unwrap());
    }
    for (n1, n2) in [(1, 1), (1, 4), (2, 2), (2, 3), (2, 4), (3, 3)] {
        let cs = if n1 >= 2 {
            (0..n2).map(|j| StructuralConstraint::new(ConstraintKind::AtMostOne, (0..n1).map(|i| i * n2 + j).collect()).unwrap()).collect()
        } else {
            Vec::new()
        };
        check(format!("lap {n1}x{n2}"), tvf_lap(n1, n2).unwrap(), FeasibleSet::new(n1 * n2, cs).unwrap());
    }
    Outcome {
        id: "5",
        title: "feasibility by construction",
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{checked} forms, {TRIALS} draws + corner grid each, worst infeasible amplitude {worst:.1e}, all feasible states reached")
        } else {
            failures.join(" | ")
        },
    }
}

fn closed_forms() -> Outcome {
    let mut rng = seeded_rng(2024);
    let mut worst: f64 = 0.0;
    let mut norm_err: f64 = 0.0;
    for n in 1..=6 {
        for _ in 0..100 {
            let theta: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
            let mut pairs = vec![(tvf_chain(n).unwrap(), closed_form_chain(n, &theta).unwrap())];
            if n >= 2 {
                pairs.push((tvf_at_most_one(n).unwrap(), closed_form_at_most_one(n, &theta).unwrap()));
            }
            for (c, m) in pairs {
                let sim = StateVector::run(&c.bind(&theta).unwrap(), &StateVector::zero(n).unwrap()).unwrap();
                let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 1 << n];
                for (&i, &a) in &m {
                    amps[i] = a.into();
                }
                let predicted = StateVector::from_amplitudes(amps).unwrap();
                // global phase from the overlap, then elementwise distance
                let overlap: num_complex::Complex64 =
                    predicted.amplitudes().iter().zip(sim.amplitudes()).map(|(a, b)| a.conj() * b).sum();
                let phase = overlap / overlap.norm();
                let d = predicted.amplitudes().iter().zip(sim.amplitudes()).map(|(a, b)| (a * phase - b).norm()).fold(0.0, f64::max);
                worst = worst.max(d);
                norm_err = norm_err.max((m.values().map(|a| a * a).sum::<f64>() - 1.0).abs());
            }
        }
    }
    Outcome {
        id: "6",
        title: "closed-form equivalence",
        pass: worst <= CLOSED_FORM_TOL && norm_err <= 1e-10,
        detail: format!("max amplitude deviation {worst:.1e} over N<=6 x 100 draws, normalization error {norm_err:.1e}"),
    }
}

/// Penalty recomputed straight from the constraint list.
fn direct_penalty(p: &LcqboProblem, z: usize) -> f64 {
    let bit = |v: usize| ((z >> v) & 1) as f64;
    let mut total = 0.0;
    for e in p.equalities() {
        let r = e.coeffs.iter().map(|&(v, a)| a as f64 * bit(v)).sum::<f64>() - e.rhs as f64;
        total += LAMBDA * r * r;
    }
    for c in p.structural() {
        match c.kind {
            ConstraintKind::VarLeqVar => total += LAMBDA * (bit(c.vars[0]) - bit(c.vars[0]) * bit(c.vars[1])),
            ConstraintKind::AtMostOne => {
                for (k, &a) in c.vars.iter().enumerate() {
                    for &b in &c.vars[k + 1..] {
                        total += LAMBDA * bit(a) * bit(b);
                    }
                }
            }
            _ => unreachable!("bundled problems use only these kinds"),
        }
    }
    total
}

fn consistency() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut optimum_ok = true;
    for name in ["flp.json", "lap.json"] {
        let p = fixture(name);
        let q = penalize(&p, LAMBDA, PenaltyScope::All).unwrap();
        let ising = q.to_ising();
        let sign = p.sense().min_sign();
        for z in 0..1usize << p.num_vars() {
            let direct = sign * p.objective_at_index(z) + direct_penalty(&p, z);
            worst = worst.max((q.eval_index(z) - ising.eval_index(z)).abs()).max((q.eval_index(z) - direct).abs());
        }
        let pen = brute_force_qubo(&q).unwrap();
        let exact = brute_force_problem(&p).unwrap();
        optimum_ok &= Some(pen.best_index) == exact.best_index && Some(sign * pen.best_value) == exact.best_objective;
    }
    Outcome {
        id: "7",
        title: "oracle/Ising consistency",
        pass: worst <= CONSISTENCY_TOL && optimum_ok,
        detail: format!("max disagreement {worst:.1e} over all bitstrings; penalized optimum {} constrained optimum", if optimum_ok { "equals" } else { "DIFFERS from" }),
    }
}

fn variational_bound(sampled: &[(LcqboProblem, VqeResult)]) -> Outcome {
    let mut ok = true;
    let mut entries = 0;
    let mut min_margin = f64::INFINITY;
    let mut check = |p: &LcqboProblem, r: &VqeResult, scope: PenaltyScope, tol: f64| {
        let q = penalize(p, LAMBDA, scope).unwrap();
        let o = brute_force_qubo(&q).unwrap();
        for t in &r.trace {
            entries += 1;
            min_margin = min_margin.min(t.energy - o.best_value);
            if t.energy < o.best_value - tol {
                ok = false;
            }
        }
    };
    for (p, r) in sampled {
        let q = penalize(p, LAMBDA, PenaltyScope::EqualitiesOnly).unwrap();
        let values = q.values();
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        // largest possible standard deviation of a variable confined to [lo, hi]
        let sigma = (hi - lo) / 2.0;
        check(p, r, PenaltyScope::EqualitiesOnly, 5.0 * sigma / (SHOTS as f64).sqrt());
    }
    for name in ["flp.json", "lap.json"] {
        let p = fixture(name);
        for (spec, scope) in [
            (AnsatzSpec::Tailored, PenaltyScope::EqualitiesOnly),
            (AnsatzSpec::TwoLocal { depth: 1 }, PenaltyScope::All),
            (AnsatzSpec::Qaoa { p: 2, scope: PenaltyScope::All }, PenaltyScope::All),
        ] {
            let cfg = VqeConfig { mode: ExpectationMode::Exact, seed: 5, restarts: 1, lambda: Some(LAMBDA), ..VqeConfig::default() };
            let r = run_vqe(&p, &spec, &cfg).unwrap();
            check(&p, &r, scope, 1e-9);
        }
    }
    Outcome {
        id: "8",
        title: "variational bound",
        pass: ok,
        detail: format!("{entries} trace entries, smallest margin above the oracle minimum {min_margin:.3e}"),
    }
}

#[test]
fn acceptance() {
    let flp = fixture("flp.json");
    let lap = fixture("lap.json");
    let mut flp_runs = Vec::new();
    let mut lap_runs = Vec::new();
    let mut outcomes = vec![
        reproduction("1", "facility location reproduction", &flp, AnsatzSpec::Flp { n: 2, m: 1 }, "1010", 8.0, &mut flp_runs),
        reproduction("2", "assignment reproduction", &lap, AnsatzSpec::Lap { n1: 2, n2: 2 }, "0110", 15.0, &mut lap_runs),
        published_parameters(),
        gate_tables(),
        feasibility_suite(),
        closed_forms(),
        consistency(),
    ];
    let sampled: Vec<(LcqboProblem, VqeResult)> =
        flp_runs.into_iter().map(|r| (flp.clone(), r)).chain(lap_runs.into_iter().map(|r| (lap.clone(), r))).collect();
    outcomes.push(variational_bound(&sampled));

    for o in &outcomes {
        println!("[{}] {} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.title, o.detail);
    }
    println!("[SKIP] 9 exact iteration counts and hardware noise: not reproducible on a noiseless simulator; covered by the seed sweeps above");
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
