//! Tailored variational forms: circuits whose support lies inside a constraint's feasible set
//! for every parameter value.
//!
//! All forms start from `|0...0>` and map `theta = 0` to `|0...0>`.

use std::collections::{BTreeMap, BTreeSet};

use super::Ansatz;
use crate::error::{Error, Result};
use crate::model::{ConstraintKind, LcqboProblem, StructuralConstraint};
use crate::statevector::{AngleExpr, ParamCircuit};

/// Forward ladder on `qubits`: full rotation on the head, then for every later qubit
/// `RY(s*t) . CX(prev -> q) . RY(s*t)`, with `s = split` (0.5 in the standalone forms).
///
/// A set predecessor forces the qubit to 1 (`RY(a) X RY(a) = X`), so only suffix-ones
/// states survive.
fn forward_ladder(c: &mut ParamCircuit, qubits: &[usize], params: &[usize], split: f64) -> Result<()> {
    c.ry(qubits[0], AngleExpr::param(params[0], 1.0))?;
    for k in 1..qubits.len() {
        let slot = AngleExpr::param(params[k], split);
        c.ry(qubits[k], slot)?;
        c.cx(qubits[k - 1], qubits[k])?;
        c.ry(qubits[k], slot)?;
    }
    Ok(())
}

/// `CX(q[k-1] -> q[k])` for `k` from last down to 1; maps suffix-ones states to one-hot.
fn back_cascade(c: &mut ParamCircuit, qubits: &[usize]) -> Result<()> {
    for k in (1..qubits.len()).rev() {
        c.cx(qubits[k - 1], qubits[k])?;
    }
    Ok(())
}

fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn require(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::InvalidAnsatz(format!("{what} needs at least {min} qubits, got {n}")));
    }
    Ok(())
}

/// `x_1 <= x_2 <= ... <= x_N`: N params, 2N-1 rotations, N-1 CNOTs.
pub fn tvf_chain(n: usize) -> Result<ParamCircuit> {
    require(n, 1, "chain form")?;
    let mut c = ParamCircuit::new(n, n);
    forward_ladder(&mut c, &identity(n), &identity(n), 0.5)?;
    Ok(c)
}

/// `sum x_i <= 1`: forward ladder then back cascade. N params, 2N-1 rotations, 2(N-1) CNOTs.
pub fn tvf_at_most_one(n: usize) -> Result<ParamCircuit> {
    require(n, 2, "at-most-one form")?;
    Ok(at_most_one_block(n, 0.5))
}

fn at_most_one_block(n: usize, split: f64) -> ParamCircuit {
    let mut c = ParamCircuit::new(n, n);
    let q = identity(n);
    forward_ladder(&mut c, &q, &q, split).expect("indices in range");
    back_cascade(&mut c, &q).expect("indices in range");
    c
}

/// `sum_{i<N} x_i <= x_N`: the chain form on all N qubits followed by a back cascade over
/// the first N-1. Ladder states `0`, `e_N`, `e_j + ... + e_N` become `0`, `e_N`, `e_j + e_N`.
/// N params, 2N-1 rotations, 2N-3 CNOTs.
pub fn tvf_sum_leq_last(n: usize) -> Result<ParamCircuit> {
    require(n, 2, "sum<=last form")?;
    let mut c = tvf_chain(n)?;
    back_cascade(&mut c, &identity(n - 1))?;
    Ok(c)
}

/// `sum_{i<N} x_i = x_N`: at-most-one over the first N-1 qubits, then `CX(q_i -> q_N)`.
/// N-1 params, 2N-3 rotations, 3N-5 CNOTs.
pub fn tvf_sum_eq_last(n: usize) -> Result<ParamCircuit> {
    require(n, 2, "sum=last form")?;
    let mut c = ParamCircuit::new(n, n - 1);
    let head = identity(n - 1);
    forward_ladder(&mut c, &head, &head, 0.5)?;
    back_cascade(&mut c, &head)?;
    for &q in &head {
        c.cx(q, n - 1)?;
    }
    Ok(c)
}

/// One facility with its clients: `RY(t_y)` on `y`, then per client
/// `RY(t_x) H CX(y -> x) H RY(-t_x)`. With `y = 0` the client block is the identity;
/// with `y = 1` it is `RY(-2 t_x)`.
fn star_block(c: &mut ParamCircuit, y: usize, xs: &[usize], param_of: &dyn Fn(usize) -> usize) -> Result<()> {
    c.ry(y, AngleExpr::param(param_of(y), 1.0))?;
    for &x in xs {
        let t = param_of(x);
        c.ry(x, AngleExpr::param(t, 1.0))?;
        c.h(x)?;
        c.cx(y, x)?;
        c.h(x)?;
        c.ry(x, AngleExpr::param(t, -1.0))?;
    }
    Ok(())
}

/// Facility location form: qubits `x_{1,1}..x_{n,m}` then `y_1..y_n`, parameter per qubit.
pub fn tvf_flp(n: usize, m: usize) -> Result<ParamCircuit> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidAnsatz("facility form needs n, m >= 1".into()));
    }
    let nq = n * m + n;
    let mut c = ParamCircuit::new(nq, nq);
    for i in 0..n {
        let xs: Vec<usize> = (0..m).map(|j| i * m + j).collect();
        star_block(&mut c, n * m + i, &xs, &|q| q)?;
    }
    Ok(c)
}

/// Assignment form: one at-most-one column block per worker over `x_{1,j}..x_{n1,j}`
/// (row-major qubits), rotations at full angle on both sides of each ladder CNOT.
pub fn tvf_lap(n1: usize, n2: usize) -> Result<ParamCircuit> {
    if n1 == 0 || n2 < n1 {
        return Err(Error::InvalidAnsatz(format!("assignment form needs n2 >= n1 >= 1, got {n1}x{n2}")));
    }
    let nq = n1 * n2;
    let mut c = ParamCircuit::new(nq, nq);
    for j in 0..n2 {
        let column: Vec<usize> = (0..n1).map(|i| i * n2 + j).collect();
        forward_ladder(&mut c, &column, &column, 1.0)?;
        back_cascade(&mut c, &column)?;
    }
    Ok(c)
}

pub(crate) fn flp_guarantees(n: usize, m: usize) -> Vec<StructuralConstraint> {
    (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| StructuralConstraint { kind: ConstraintKind::VarLeqVar, vars: vec![i * m + j, n * m + i] })
        .collect()
}

pub(crate) fn lap_guarantees(n1: usize, n2: usize) -> Vec<StructuralConstraint> {
    if n1 < 2 {
        return Vec::new();
    }
    (0..n2)
        .map(|j| StructuralConstraint { kind: ConstraintKind::AtMostOne, vars: (0..n1).map(|i| i * n2 + j).collect() })
        .collect()
}

enum Group {
    Star { y: usize, xs: Vec<usize> },
    Block(StructuralConstraint),
    Free(usize),
}

impl Group {
    fn min_var(&self) -> usize {
        match self {
            Group::Star { y, xs } => xs.iter().copied().chain([*y]).min().unwrap(),
            Group::Block(c) => *c.vars.iter().min().unwrap(),
            Group::Free(v) => *v,
        }
    }
}

/// Composes a tailored form covering every structural constraint of `problem`.
///
/// `x <= y` constraints must form stars (each `x` bounded by one `y`, no `y` bounded itself)
/// and are built as facility blocks; every other constraint must own its variables
/// exclusively and is built from its standalone form (at-most-one uses the assignment
/// column block). Unconstrained variables get a single `RY`. Parameters follow variable
/// order, skipping the bound variable of `sum_eq_last`.
pub fn tvf_for_problem(problem: &LcqboProblem) -> Result<Ansatz> {
    let n = problem.num_vars();
    let name = |v: usize| problem.variables()[v].clone();
    let describe = |c: &StructuralConstraint| {
        format!("{}({})", c.kind.name(), c.vars.iter().map(|&v| name(v)).collect::<Vec<_>>().join(", "))
    };

    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut claim = |v: usize, k: usize, c: &StructuralConstraint| -> Result<()> {
        if let Some(&other) = owner.get(&v) {
            if other != k {
                return Err(Error::NotRepresentable(format!(
                    "variable `{}` of {} is shared with structural[{other}]; tailored forms cannot combine overlapping constraints",
                    name(v),
                    describe(c)
                )));
            }
        }
        owner.insert(v, k);
        Ok(())
    };

    // Stars from x <= y.
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    let mut stars: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for c in problem.structural().iter().filter(|c| c.kind == ConstraintKind::VarLeqVar) {
        let (x, y) = (c.vars[0], c.vars[1]);
        if parent.insert(x, y).is_some() {
            return Err(Error::NotRepresentable(format!(
                "`{}` is bounded by more than one variable in {}",
                name(x),
                describe(c)
            )));
        }
        stars.entry(y).or_default().push(x);
    }
    for (&x, &y) in &parent {
        if parent.contains_key(&y) || stars.contains_key(&x) {
            return Err(Error::NotRepresentable(format!(
                "x <= y constraints on `{}` and `{}` nest; only one level of bounding is supported",
                name(x),
                name(y)
            )));
        }
    }
    let star_key = n; // pseudo-owner index shared by every star variable
    let vlv = StructuralConstraint { kind: ConstraintKind::VarLeqVar, vars: vec![] };
    for (&y, xs) in &stars {
        for &v in xs.iter().chain([&y]) {
            claim(v, star_key, &vlv)?;
        }
    }

    let mut groups: Vec<Group> = stars.into_iter().map(|(y, mut xs)| {
        xs.sort_unstable();
        Group::Star { y, xs }
    }).collect();
    for (k, c) in problem.structural().iter().enumerate().filter(|(_, c)| c.kind != ConstraintKind::VarLeqVar) {
        for &v in &c.vars {
            claim(v, k, c)?;
        }
        groups.push(Group::Block(c.clone()));
    }
    groups.extend((0..n).filter(|v| !owner.contains_key(v)).map(Group::Free));
    groups.sort_by_key(Group::min_var);

    let unparameterized: BTreeSet<usize> = problem
        .structural()
        .iter()
        .filter(|c| c.kind == ConstraintKind::SumEqLast)
        .map(|c| *c.vars.last().unwrap())
        .collect();
    let mut param_index = vec![usize::MAX; n];
    let mut num_params = 0;
    for v in 0..n {
        if !unparameterized.contains(&v) {
            param_index[v] = num_params;
            num_params += 1;
        }
    }

    let mut circuit = ParamCircuit::new(n, num_params);
    for g in &groups {
        match g {
            Group::Star { y, xs } => star_block(&mut circuit, *y, xs, &|q| param_index[q])?,
            Group::Free(v) => {
                circuit.ry(*v, AngleExpr::param(param_index[*v], 1.0))?;
            }
            Group::Block(c) => {
                let block = match c.kind {
                    ConstraintKind::ChainMonotone => tvf_chain(c.vars.len())?,
                    ConstraintKind::AtMostOne => at_most_one_block(c.vars.len(), 1.0),
                    ConstraintKind::SumLeqLast => tvf_sum_leq_last(c.vars.len())?,
                    ConstraintKind::SumEqLast => tvf_sum_eq_last(c.vars.len())?,
                    ConstraintKind::VarLeqVar => unreachable!("stars handled above"),
                };
                let params: Vec<usize> = c.vars[..block.num_params()].iter().map(|&v| param_index[v]).collect();
                circuit.append_mapped(&block, &c.vars, &params)?;
            }
        }
    }
    Ok(Ansatz {
        name: "tvf".into(),
        circuit,
        guarantees: problem.structural().to_vec(),
        prepends_superposition: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::gate_stats;
    use crate::model::{build_flp, build_lap, Sense};
    use crate::statevector::{BitConvention, StateVector};
    use std::f64::consts::PI;

    fn probs(c: &ParamCircuit, theta: &[f64]) -> Vec<f64> {
        StateVector::run(&c.bind(theta).unwrap(), &StateVector::zero(c.num_qubits()).unwrap())
            .unwrap()
            .probabilities()
    }

    fn support(c: &ParamCircuit, theta: &[f64]) -> Vec<String> {
        probs(c, theta)
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 1e-12)
            .map(|(i, _)| BitConvention::display(i, c.num_qubits()))
            .collect()
    }

    #[test]
    fn zero_theta_gives_zero_state_for_every_form() {
        let forms = [
            tvf_chain(3).unwrap(),
            tvf_at_most_one(3).unwrap(),
            tvf_sum_leq_last(4).unwrap(),
            tvf_sum_eq_last(4).unwrap(),
            tvf_flp(2, 2).unwrap(),
            tvf_lap(2, 3).unwrap(),
        ];
        for c in &forms {
            let p = probs(c, &vec![0.0; c.num_params()]);
            assert!((p[0] - 1.0).abs() < 1e-12, "{}", c.dump());
        }
    }

    #[test]
    fn chain_two_qubits_theta_pi_gives_11() {
        let c = tvf_chain(2).unwrap();
        for t2 in [-2.0, 0.3, 1.7] {
            let p = probs(&c, &[PI, t2]);
            assert!((p[0b11] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn at_most_one_n2_matches_column_block_shape() {
        let c = tvf_at_most_one(2).unwrap();
        assert_eq!(c.dump(), "qubits 2 params 2\nRY q0 1.0*t0+0.0\nRY q1 0.5*t1+0.0\nCX q0 q1\nRY q1 0.5*t1+0.0\nCX q0 q1\n");
    }

    #[test]
    fn sum_eq_last_n2_is_copy() {
        let c = tvf_sum_eq_last(2).unwrap();
        assert_eq!(support(&c, &[1.0]), vec!["00", "11"]);
    }

    #[test]
    fn flp_dead_facility_keeps_clients_off() {
        let c = tvf_flp(2, 1).unwrap();
        // facility 2 closed (theta_y2 = 0): x2_1 and y2 stay 0
        let p = probs(&c, &[0.4, -2.2, 1.1, 0.0]);
        for (i, pi) in p.iter().enumerate() {
            if (i >> 1) & 1 == 1 || (i >> 3) & 1 == 1 {
                assert!(*pi < 1e-24, "index {i}: {pi}");
            }
        }
    }

    #[test]
    fn flp_and_lap_gate_counts() {
        let s = gate_stats(&tvf_flp(2, 1).unwrap());
        assert_eq!((s.su2, s.cnot, s.params, s.cost), (10, 2, 4, 30));
        let s = gate_stats(&tvf_lap(2, 2).unwrap());
        assert_eq!((s.su2, s.cnot, s.params, s.cost), (6, 4, 4, 46));
    }

    #[test]
    fn invalid_sizes() {
        assert!(tvf_chain(0).is_err());
        assert!(tvf_at_most_one(1).is_err());
        assert!(tvf_sum_leq_last(1).is_err());
        assert!(tvf_sum_eq_last(1).is_err());
        assert!(tvf_flp(0, 1).is_err());
        assert!(tvf_lap(3, 2).is_err());
    }

    #[test]
    fn composer_reproduces_flp_and_lap_forms() {
        let flp = build_flp(2, 1, &[5.0, 10.0], &[vec![3.0], vec![2.0]]).unwrap();
        assert_eq!(tvf_for_problem(&flp).unwrap().circuit, tvf_flp(2, 1).unwrap());
        let flp = build_flp(2, 3, &[1.0; 2], &[vec![1.0; 3], vec![1.0; 3]]).unwrap();
        assert_eq!(tvf_for_problem(&flp).unwrap().circuit, tvf_flp(2, 3).unwrap());
        let lap = build_lap(2, 2, &[vec![5.0, 8.0], vec![7.0, 11.0]]).unwrap();
        assert_eq!(tvf_for_problem(&lap).unwrap().circuit, tvf_lap(2, 2).unwrap());
    }

    #[test]
    fn composer_rejects_overlap() {
        let mut p = LcqboProblem::new((0..3).map(|i| format!("v{i}")).collect(), Sense::Minimize).unwrap();
        p.add_structural(StructuralConstraint::new(ConstraintKind::AtMostOne, vec![0, 1]).unwrap()).unwrap();
        p.add_structural(StructuralConstraint::new(ConstraintKind::AtMostOne, vec![1, 2]).unwrap()).unwrap();
        assert!(matches!(tvf_for_problem(&p), Err(Error::NotRepresentable(_))));

        let mut p = LcqboProblem::new((0..3).map(|i| format!("v{i}")).collect(), Sense::Minimize).unwrap();
        p.add_structural(StructuralConstraint::new(ConstraintKind::VarLeqVar, vec![0, 1]).unwrap()).unwrap();
        p.add_structural(StructuralConstraint::new(ConstraintKind::VarLeqVar, vec![1, 2]).unwrap()).unwrap();
        assert!(matches!(tvf_for_problem(&p), Err(Error::NotRepresentable(_))));
    }

    #[test]
    fn composer_mixed_groups_stay_feasible() {
        let mut p = LcqboProblem::new((0..7).map(|i| format!("v{i}")).collect(), Sense::Minimize).unwrap();
        p.add_structural(StructuralConstraint::new(ConstraintKind::SumEqLast, vec![0, 2, 4]).unwrap()).unwrap();
        p.add_structural(StructuralConstraint::new(ConstraintKind::ChainMonotone, vec![1, 3]).unwrap()).unwrap();
        p.add_structural(StructuralConstraint::new(ConstraintKind::VarLeqVar, vec![5, 6]).unwrap()).unwrap();
        let a = tvf_for_problem(&p).unwrap();
        assert_eq!(a.circuit.num_params(), 6);
        let theta = [0.9, -1.3, 2.2, 0.4, -2.7, 1.9];
        let pr = probs(&a.circuit, &theta);
        let mass: f64 = pr.iter().enumerate().filter(|(i, _)| !p.structurally_feasible_index(*i)).map(|(_, q)| q).sum();
        assert!(mass < 1e-20, "{mass}");
    }
}
