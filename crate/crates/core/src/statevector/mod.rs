//! Dense statevector simulation with exact probabilities and seeded shot sampling.
//!
//! Qubit `q` is bit `q` of the basis index (little-endian). Bitstrings are
//! displayed with qubit 0 leftmost, so `|x1 x2 ... xN>` reads left to right.

pub mod circuit;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use circuit::{AngleExpr, BoundGate, ConcreteCircuit, Gate, GateKind, ParamCircuit};

use crate::error::{Error, Result};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 24;

/// Mapping between basis indices, bit vectors and display strings.
#[derive(Debug, Clone, Copy, Default)]
pub struct BitConvention;

impl BitConvention {
    pub fn bits(index: usize, num_qubits: usize) -> Vec<u8> {
        (0..num_qubits).map(|q| ((index >> q) & 1) as u8).collect()
    }

    pub fn index(bits: &[u8]) -> usize {
        bits.iter().enumerate().fold(0, |acc, (q, &b)| acc | ((b as usize & 1) << q))
    }

    pub fn display(index: usize, num_qubits: usize) -> String {
        (0..num_qubits).map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' }).collect()
    }

    pub fn parse(s: &str) -> Result<usize> {
        s.chars().enumerate().try_fold(0usize, |acc, (q, ch)| match ch {
            '0' => Ok(acc),
            '1' => Ok(acc | (1 << q)),
            _ => Err(Error::Parse(format!("bad bitstring `{s}`"))),
        })
    }
}

/// Deterministic, platform-independent generator used for every sampling step.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(Error::TooManyVariables { got: num_qubits, max: MAX_QUBITS });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::Shape(format!("basis index {index} out of range for {num_qubits} qubits")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amplitudes })
    }

    /// Normalizes the given amplitudes; rejects zero vectors and non-power-of-two lengths.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Shape(format!("amplitude vector length {dim} is not a power of two")));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Shape("amplitude vector has zero or non-finite norm".into()));
        }
        Ok(Self {
            num_qubits: dim.trailing_zeros() as usize,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &BoundGate) {
        let q = gate.target;
        match gate.kind {
            GateKind::Ry => {
                let (s, c) = (gate.angle / 2.0).sin_cos();
                self.apply_1q([[c.into(), (-s).into()], [s.into(), c.into()]], q);
            }
            GateKind::Rx => {
                let (s, c) = (gate.angle / 2.0).sin_cos();
                let m = Complex64::new(0.0, -s);
                self.apply_1q([[c.into(), m], [m, c.into()]], q);
            }
            GateKind::Rz => {
                let (s, c) = (gate.angle / 2.0).sin_cos();
                self.apply_1q(
                    [[Complex64::new(c, -s), 0.0.into()], [0.0.into(), Complex64::new(c, s)]],
                    q,
                );
            }
            GateKind::H => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                self.apply_1q([[h, h], [h, -h]], q);
            }
            GateKind::X => self.for_pairs(q, None, |amps, i, j| amps.swap(i, j)),
            GateKind::Cx => {
                let c = gate.control.expect("validated at construction");
                self.for_pairs(q, Some(c), |amps, i, j| amps.swap(i, j));
            }
            GateKind::Cz => {
                let c = gate.control.expect("validated at construction");
                self.for_pairs(q, Some(c), |amps, _, j| amps[j] = -amps[j]);
            }
        }
    }

    fn apply_1q(&mut self, m: [[Complex64; 2]; 2], q: usize) {
        self.for_pairs(q, None, |amps, i, j| {
            let (a, b) = (amps[i], amps[j]);
            amps[i] = m[0][0] * a + m[0][1] * b;
            amps[j] = m[1][0] * a + m[1][1] * b;
        });
    }

    /// Visits each `(i, j)` with bit `q` clear in `i` and set in `j = i | 1<<q`,
    /// restricted to indices whose `control` bit is set when given.
    fn for_pairs(&mut self, q: usize, control: Option<usize>, mut f: impl FnMut(&mut [Complex64], usize, usize)) {
        let bit = 1usize << q;
        let cmask = control.map_or(0, |c| 1usize << c);
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 && i & cmask == cmask {
                f(&mut self.amplitudes, i, i | bit);
            }
        }
    }

    pub fn run(circuit: &ConcreteCircuit, initial: &StateVector) -> Result<StateVector> {
        if circuit.num_qubits != initial.num_qubits {
            return Err(Error::QubitMismatch { expected: circuit.num_qubits, got: initial.num_qubits });
        }
        let mut state = initial.clone();
        for g in &circuit.gates {
            state.apply(g);
        }
        Ok(state)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn sample(&self, shots: u64, seed: u64) -> Result<Histogram> {
        sample_probabilities(&self.probabilities(), shots, &mut seeded_rng(seed))
    }

    /// Equality up to one global phase, elementwise within `tol`.
    pub fn approx_eq_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        if self.num_qubits != other.num_qubits {
            return false;
        }
        let overlap: Complex64 =
            self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
        self.amplitudes.iter().zip(&other.amplitudes).all(|(a, b)| (a * phase - b).norm() <= tol)
    }
}

/// Draws `shots` outcomes from a probability vector over basis indices.
pub fn sample_probabilities<R: Rng>(probs: &[f64], shots: u64, rng: &mut R) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let num_qubits = probs.len().trailing_zeros() as usize;
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.gen::<f64>() * total;
        let mut idx = cumulative.partition_point(|&c| c <= u);
        if idx >= probs.len() {
            idx = probs.len() - 1;
        }
        // Skip zero-probability bins that share a cumulative value.
        while probs[idx] == 0.0 && idx > 0 {
            idx -= 1;
        }
        *counts.entry(idx).or_insert(0) += 1;
    }
    Ok(Histogram { num_qubits, shots, counts })
}

/// Outcome counts keyed by basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub num_qubits: usize,
    pub shots: u64,
    pub counts: BTreeMap<usize, u64>,
}

impl Histogram {
    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Most frequent outcome; ties go to the lowest basis index.
    pub fn argmax(&self) -> Option<usize> {
        self.counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(&k, _)| k)
    }

    pub fn frequency(&self, index: usize) -> f64 {
        self.count(index) as f64 / self.shots as f64
    }

    /// Display-order bitstrings, as written to histogram JSON.
    pub fn to_display_map(&self) -> BTreeMap<String, u64> {
        self.counts.iter().map(|(&k, &v)| (BitConvention::display(k, self.num_qubits), v)).collect()
    }
}

pub fn argmax(probs: &[f64]) -> usize {
    probs
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &p)| if p > best.1 { (i, p) } else { best })
        .0
}
