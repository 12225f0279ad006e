//! Analytic amplitudes of the chain and at-most-one forms.
//!
//! Writing `c_k = cos(t_k / 2)`, `s_k = sin(t_k / 2)` (1-based `k`), the chain form puts
//! amplitude `c_1 ... c_{j-1} s_j` on the ladder state whose first 1 is at position `j`,
//! and `c_1 ... c_N` on `|0...0>`. Counting by the number of ones `i`, that is
//! `prod_{k=1}^{N-i} c_k * sin(t_{N-i+1} / 2)` with `t_{N+1} = pi`.
//! The at-most-one form permutes the same amplitudes onto `e_j` and `|0...0>`.
//! All amplitudes are real.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

fn check(n: usize, theta: &[f64]) -> Result<()> {
    if theta.len() != n {
        return Err(Error::ParamArity { expected: n, got: theta.len() });
    }
    Ok(())
}

/// `(first_one, amplitude)` pairs, `first_one == n` meaning no ones.
fn ladder_amplitudes(theta: &[f64]) -> Vec<(usize, f64)> {
    let n = theta.len();
    let mut out = Vec::with_capacity(n + 1);
    let mut prefix = 1.0;
    for (j, t) in theta.iter().enumerate() {
        out.push((j, prefix * (t / 2.0).sin()));
        prefix *= (t / 2.0).cos();
    }
    out.push((n, prefix));
    out
}

/// Basis index -> amplitude for the chain form.
pub fn closed_form_chain(n: usize, theta: &[f64]) -> Result<BTreeMap<usize, f64>> {
    check(n, theta)?;
    Ok(ladder_amplitudes(theta)
        .into_iter()
        .map(|(j, a)| {
            // qubits j..n set
            let index = ((1usize << n) - 1) & !((1usize << j) - 1);
            (index, a)
        })
        .collect())
}

/// Basis index -> amplitude for the at-most-one form.
pub fn closed_form_at_most_one(n: usize, theta: &[f64]) -> Result<BTreeMap<usize, f64>> {
    check(n, theta)?;
    Ok(ladder_amplitudes(theta)
        .into_iter()
        .map(|(j, a)| (if j == n { 0 } else { 1usize << j }, a))
        .collect())
}
