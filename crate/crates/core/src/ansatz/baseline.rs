//! Penalty-based baselines: hardware-efficient 2-Local and QAOA.

use crate::error::{Error, Result};
use crate::model::IsingModel;
use crate::statevector::{AngleExpr, ParamCircuit};

/// `depth` repetitions of (RY layer, linear CX chain), then a closing RY layer.
pub fn two_local(n: usize, depth: usize) -> Result<ParamCircuit> {
    if n < 2 || depth < 1 {
        return Err(Error::InvalidAnsatz(format!("2-Local needs N >= 2 and depth >= 1, got N={n}, depth={depth}")));
    }
    let mut c = ParamCircuit::new(n, n * (depth + 1));
    let mut next = 0;
    let mut rotation_layer = |c: &mut ParamCircuit| -> Result<()> {
        for q in 0..n {
            c.ry(q, AngleExpr::param(next, 1.0))?;
            next += 1;
        }
        Ok(())
    };
    for _ in 0..depth {
        rotation_layer(&mut c)?;
        for q in 1..n {
            c.cx(q - 1, q)?;
        }
    }
    rotation_layer(&mut c)?;
    Ok(c)
}

/// Standard QAOA with parameters ordered `(gamma_1, beta_1, ..., gamma_p, beta_p)`.
///
/// Cost layer: `RZ(2 gamma h_i)` per nonzero field, `CX RZ(2 gamma J_ij) CX` per nonzero
/// coupling; mixer `RX(2 beta)` on every qubit. The leading Hadamards are part of the circuit.
pub fn qaoa(ising: &IsingModel, p: usize) -> Result<ParamCircuit> {
    if p == 0 {
        return Err(Error::InvalidAnsatz("QAOA needs p >= 1".into()));
    }
    let n = ising.num_qubits();
    let mut c = ParamCircuit::new(n, 2 * p);
    for q in 0..n {
        c.h(q)?;
    }
    for layer in 0..p {
        let (gamma, beta) = (2 * layer, 2 * layer + 1);
        for (q, h) in ising.nonzero_fields() {
            c.rz(q, AngleExpr::param(gamma, 2.0 * h))?;
        }
        for ((a, b), w) in ising.nonzero_couplings() {
            c.cx(a, b)?;
            c.rz(b, AngleExpr::param(gamma, 2.0 * w))?;
            c.cx(a, b)?;
        }
        for q in 0..n {
            c.rx(q, AngleExpr::param(beta, 2.0))?;
        }
    }
    Ok(c)
}
