//! Facility location and linear assignment instances.
//!
//! Variable order fixes the qubit order: FLP is `x1_1..xn_m` (row-major) then
//! `y1..yn`; LAP is `x1_1..xn1_n2` row-major.

use super::{ConstraintKind, LcqboProblem, LinearConstraint, Sense, StructuralConstraint};
use crate::error::{Error, Result};

/// Index of `x_{i,j}` (0-based) in the FLP variable order.
pub fn flp_x(m: usize, i: usize, j: usize) -> usize {
    i * m + j
}

pub fn flp_y(n: usize, m: usize, i: usize) -> usize {
    n * m + i
}

/// Minimize `sum f_i y_i + sum c_ij x_ij` s.t. each client served once, `x_ij <= y_i`.
pub fn build_flp(n: usize, m: usize, f: &[f64], c: &[Vec<f64>]) -> Result<LcqboProblem> {
    if n == 0 || m == 0 {
        return Err(Error::Shape("facility location needs n, m >= 1".into()));
    }
    if f.len() != n || c.len() != n || c.iter().any(|row| row.len() != m) {
        return Err(Error::Shape(format!("expected f of length {n} and c of shape {n}x{m}")));
    }
    let mut names: Vec<String> = Vec::with_capacity(n * m + n);
    for i in 1..=n {
        for j in 1..=m {
            names.push(format!("x{i}_{j}"));
        }
    }
    names.extend((1..=n).map(|i| format!("y{i}")));
    let mut p = LcqboProblem::new(names, Sense::Minimize)?;
    for i in 0..n {
        p.add_linear(flp_y(n, m, i), f[i])?;
        for j in 0..m {
            p.add_linear(flp_x(m, i, j), c[i][j])?;
        }
    }
    for j in 0..m {
        p.add_equality(LinearConstraint::new((0..n).map(|i| (flp_x(m, i, j), 1)).collect(), 1)?)?;
    }
    for i in 0..n {
        for j in 0..m {
            p.add_structural(StructuralConstraint::new(
                ConstraintKind::VarLeqVar,
                vec![flp_x(m, i, j), flp_y(n, m, i)],
            )?)?;
        }
    }
    Ok(p)
}

pub fn lap_x(n2: usize, i: usize, j: usize) -> usize {
    i * n2 + j
}

/// Minimize total cost `sum c_ij x_ij` s.t. every job done once, every worker takes at most one job.
pub fn build_lap(n1: usize, n2: usize, c: &[Vec<f64>]) -> Result<LcqboProblem> {
    if n1 == 0 || n2 < n1 {
        return Err(Error::Shape(format!("assignment needs n2 >= n1 >= 1, got n1={n1}, n2={n2}")));
    }
    if c.len() != n1 || c.iter().any(|row| row.len() != n2) {
        return Err(Error::Shape(format!("expected cost matrix of shape {n1}x{n2}")));
    }
    let mut names = Vec::with_capacity(n1 * n2);
    for i in 1..=n1 {
        for j in 1..=n2 {
            names.push(format!("x{i}_{j}"));
        }
    }
    let mut p = LcqboProblem::new(names, Sense::Minimize)?;
    for i in 0..n1 {
        for j in 0..n2 {
            p.add_linear(lap_x(n2, i, j), c[i][j])?;
        }
    }
    for i in 0..n1 {
        p.add_equality(LinearConstraint::new((0..n2).map(|j| (lap_x(n2, i, j), 1)).collect(), 1)?)?;
    }
    if n1 >= 2 {
        for j in 0..n2 {
            p.add_structural(StructuralConstraint::new(
                ConstraintKind::AtMostOne,
                (0..n1).map(|i| lap_x(n2, i, j)).collect(),
            )?)?;
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::brute_force_problem;

    #[test]
    fn flp_paper_instance_shape() {
        let p = build_flp(2, 1, &[5.0, 10.0], &[vec![3.0], vec![2.0]]).unwrap();
        assert_eq!(p.variables(), &["x1_1", "x2_1", "y1", "y2"]);
        assert_eq!(p.linear(), &[3.0, 2.0, 5.0, 10.0]);
        assert_eq!(p.equalities().len(), 1);
        assert_eq!(p.structural().len(), 2);
        assert_eq!(p.structural()[0].vars, vec![0, 2]);
        assert_eq!(p.structural()[1].vars, vec![1, 3]);
    }

    #[test]
    fn flp_trivial_instance_forces_open() {
        let p = build_flp(1, 1, &[0.0], &[vec![0.0]]).unwrap();
        let o = brute_force_problem(&p).unwrap();
        assert_eq!(o.best_index, Some(0b11));
        assert_eq!(o.best_objective, Some(0.0));
    }

    #[test]
    fn lap_paper_instance_shape() {
        let p = build_lap(2, 2, &[vec![5.0, 8.0], vec![7.0, 11.0]]).unwrap();
        assert_eq!(p.variables(), &["x1_1", "x1_2", "x2_1", "x2_2"]);
        assert_eq!(p.equalities()[1].coeffs, vec![(2, 1), (3, 1)]);
        assert_eq!(p.structural()[0].vars, vec![0, 2]);
        assert_eq!(p.structural()[1].vars, vec![1, 3]);
    }

    #[test]
    fn lap_single_assignment() {
        let p = build_lap(1, 1, &[vec![4.0]]).unwrap();
        let o = brute_force_problem(&p).unwrap();
        assert_eq!((o.best_index, o.best_objective), (Some(1), Some(4.0)));
    }

    #[test]
    fn shape_errors() {
        assert!(build_flp(2, 1, &[5.0], &[vec![3.0], vec![2.0]]).is_err());
        assert!(build_flp(0, 1, &[], &[]).is_err());
        assert!(build_lap(2, 1, &[vec![1.0], vec![2.0]]).is_err());
        assert!(build_lap(1, 2, &[vec![1.0]]).is_err());
    }
}
