//! Parameterized gate lists and their bound (numeric) form.
//!
//! Rotation slots are affine in one parameter: `angle = multiplier * theta[k] + offset`.
//! The text dump format is one gate per line after a `qubits N params K` header:
//!
//! ```text
//! qubits 2 params 2
//! RY q0 1.0*t0+0.0
//! RY q1 0.5*t1+0.0
//! CX q0 q1
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Ry,
    Rx,
    Rz,
    H,
    X,
    Cx,
    Cz,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Ry | GateKind::Rx | GateKind::Rz)
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, GateKind::Cx | GateKind::Cz)
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::Ry => "RY",
            GateKind::Rx => "RX",
            GateKind::Rz => "RZ",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Cx => "CX",
            GateKind::Cz => "CZ",
        }
    }

    fn from_mnemonic(s: &str) -> Option<Self> {
        Some(match s {
            "RY" => GateKind::Ry,
            "RX" => GateKind::Rx,
            "RZ" => GateKind::Rz,
            "H" => GateKind::H,
            "X" => GateKind::X,
            "CX" => GateKind::Cx,
            "CZ" => GateKind::Cz,
            _ => return None,
        })
    }
}

/// Affine angle slot. Without a parameter the angle is the constant `offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleExpr {
    pub param: Option<usize>,
    pub multiplier: f64,
    pub offset: f64,
}

impl AngleExpr {
    pub fn param(index: usize, multiplier: f64) -> Self {
        Self { param: Some(index), multiplier, offset: 0.0 }
    }

    pub fn constant(value: f64) -> Self {
        Self { param: None, multiplier: 0.0, offset: value }
    }

    /// Caller guarantees `theta` covers `param`.
    pub fn value(&self, theta: &[f64]) -> f64 {
        match self.param {
            Some(k) => self.multiplier * theta[k] + self.offset,
            None => self.offset,
        }
    }
}

impl fmt::Display for AngleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.param {
            None => write!(f, "{:?}", self.offset),
            Some(k) => {
                let sign = if self.offset.is_sign_negative() { '-' } else { '+' };
                write!(f, "{:?}*t{}{}{:?}", self.multiplier, k, sign, self.offset.abs())
            }
        }
    }
}

impl FromStr for AngleExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad angle expression `{s}`"));
        let Some((mult, rest)) = s.split_once("*t") else {
            let offset = s.parse::<f64>().map_err(|_| bad())?;
            return Ok(AngleExpr::constant(offset));
        };
        let multiplier = mult.parse::<f64>().map_err(|_| bad())?;
        let split = rest.find(['+', '-']).ok_or_else(bad)?;
        let param = rest[..split].parse::<usize>().map_err(|_| bad())?;
        let magnitude = rest[split + 1..].parse::<f64>().map_err(|_| bad())?;
        let offset = if rest.as_bytes()[split] == b'-' { -magnitude } else { magnitude };
        Ok(AngleExpr { param: Some(param), multiplier, offset })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    pub angle: Option<AngleExpr>,
}

/// Ordered gate list over `num_qubits` with `num_params` free parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCircuit {
    num_qubits: usize,
    num_params: usize,
    gates: Vec<Gate>,
}

impl ParamCircuit {
    pub fn new(num_qubits: usize, num_params: usize) -> Self {
        Self { num_qubits, num_params, gates: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.check_qubit(gate.target)?;
        match (gate.kind.is_two_qubit(), gate.control) {
            (true, Some(c)) => {
                self.check_qubit(c)?;
                if c == gate.target {
                    return Err(Error::InvalidGate(format!(
                        "{} control equals target q{c}",
                        gate.kind.mnemonic()
                    )));
                }
            }
            (true, None) => {
                return Err(Error::InvalidGate(format!("{} requires a control", gate.kind.mnemonic())))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidGate(format!("{} takes no control", gate.kind.mnemonic())))
            }
            (false, None) => {}
        }
        match (gate.kind.is_rotation(), gate.angle) {
            (true, Some(a)) => {
                if let Some(k) = a.param {
                    if k >= self.num_params {
                        return Err(Error::InvalidGate(format!(
                            "parameter t{k} out of range ({} params)",
                            self.num_params
                        )));
                    }
                }
                if !a.multiplier.is_finite() || !a.offset.is_finite() {
                    return Err(Error::InvalidGate("non-finite angle coefficients".into()));
                }
            }
            (true, None) => {
                return Err(Error::InvalidGate(format!("{} requires an angle", gate.kind.mnemonic())))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidGate(format!("{} takes no angle", gate.kind.mnemonic())))
            }
            (false, None) => {}
        }
        self.gates.push(gate);
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::InvalidGate(format!(
                "qubit q{q} out of range ({} qubits)",
                self.num_qubits
            )));
        }
        Ok(())
    }

    fn rotation(&mut self, kind: GateKind, q: usize, angle: AngleExpr) -> Result<&mut Self> {
        self.push(Gate { kind, target: q, control: None, angle: Some(angle) })?;
        Ok(self)
    }

    pub fn ry(&mut self, q: usize, angle: AngleExpr) -> Result<&mut Self> {
        self.rotation(GateKind::Ry, q, angle)
    }

    pub fn rx(&mut self, q: usize, angle: AngleExpr) -> Result<&mut Self> {
        self.rotation(GateKind::Rx, q, angle)
    }

    pub fn rz(&mut self, q: usize, angle: AngleExpr) -> Result<&mut Self> {
        self.rotation(GateKind::Rz, q, angle)
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.push(Gate { kind: GateKind::H, target: q, control: None, angle: None })?;
        Ok(self)
    }

    pub fn x(&mut self, q: usize) -> Result<&mut Self> {
        self.push(Gate { kind: GateKind::X, target: q, control: None, angle: None })?;
        Ok(self)
    }

    pub fn cx(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push(Gate { kind: GateKind::Cx, target, control: Some(control), angle: None })?;
        Ok(self)
    }

    pub fn cz(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push(Gate { kind: GateKind::Cz, target, control: Some(control), angle: None })?;
        Ok(self)
    }

    /// Appends `other`, shifting its qubits by `qubit_offset` and its parameters by `param_offset`.
    pub fn append(&mut self, other: &ParamCircuit, qubit_offset: usize, param_offset: usize) -> Result<()> {
        let qubits: Vec<usize> = (0..other.num_qubits).map(|q| q + qubit_offset).collect();
        let params: Vec<usize> = (0..other.num_params).map(|k| k + param_offset).collect();
        self.append_mapped(other, &qubits, &params)
    }

    /// Appends `other` with its qubit `q` sent to `qubits[q]` and parameter `k` to `params[k]`.
    pub fn append_mapped(&mut self, other: &ParamCircuit, qubits: &[usize], params: &[usize]) -> Result<()> {
        if qubits.len() != other.num_qubits {
            return Err(Error::QubitMismatch { expected: other.num_qubits, got: qubits.len() });
        }
        if params.len() != other.num_params {
            return Err(Error::ParamArity { expected: other.num_params, got: params.len() });
        }
        for g in &other.gates {
            let angle = g.angle.map(|a| AngleExpr { param: a.param.map(|k| params[k]), ..a });
            self.push(Gate {
                kind: g.kind,
                target: qubits[g.target],
                control: g.control.map(|c| qubits[c]),
                angle,
            })?;
        }
        Ok(())
    }

    pub fn bind(&self, theta: &[f64]) -> Result<ConcreteCircuit> {
        if theta.len() != self.num_params {
            return Err(Error::ParamArity { expected: self.num_params, got: theta.len() });
        }
        if let Some((index, &value)) = theta.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        let gates = self
            .gates
            .iter()
            .map(|g| BoundGate {
                kind: g.kind,
                target: g.target,
                control: g.control,
                angle: g.angle.map(|a| a.value(theta)).unwrap_or(0.0),
            })
            .collect();
        Ok(ConcreteCircuit { num_qubits: self.num_qubits, gates })
    }

    pub fn dump(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ParamCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {} params {}", self.num_qubits, self.num_params)?;
        for g in &self.gates {
            match (g.control, g.angle) {
                (Some(c), _) => writeln!(f, "{} q{} q{}", g.kind.mnemonic(), c, g.target)?,
                (None, Some(a)) => writeln!(f, "{} q{} {}", g.kind.mnemonic(), g.target, a)?,
                (None, None) => writeln!(f, "{} q{}", g.kind.mnemonic(), g.target)?,
            }
        }
        Ok(())
    }
}

impl FromStr for ParamCircuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty circuit dump".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (num_qubits, num_params) = match h.as_slice() {
            ["qubits", n, "params", k] => (
                n.parse().map_err(|_| Error::Parse(format!("bad header `{header}`")))?,
                k.parse().map_err(|_| Error::Parse(format!("bad header `{header}`")))?,
            ),
            _ => return Err(Error::Parse(format!("bad header `{header}`"))),
        };
        let qubit = |tok: &str| -> Result<usize> {
            tok.strip_prefix('q')
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad qubit `{tok}`")))
        };
        let mut circuit = ParamCircuit::new(num_qubits, num_params);
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let kind = toks
                .first()
                .and_then(|m| GateKind::from_mnemonic(m))
                .ok_or_else(|| Error::Parse(format!("bad gate line `{line}`")))?;
            let gate = match (kind.is_two_qubit(), kind.is_rotation(), toks.as_slice()) {
                (true, _, [_, c, t]) => {
                    Gate { kind, target: qubit(t)?, control: Some(qubit(c)?), angle: None }
                }
                (false, true, [_, t, a]) => {
                    Gate { kind, target: qubit(t)?, control: None, angle: Some(a.parse()?) }
                }
                (false, false, [_, t]) => Gate { kind, target: qubit(t)?, control: None, angle: None },
                _ => return Err(Error::Parse(format!("bad gate line `{line}`"))),
            };
            circuit.push(gate)?;
        }
        Ok(circuit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundGate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    /// Radians; zero for non-rotation kinds.
    pub angle: f64,
}

/// A circuit with every angle resolved to a number.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcreteCircuit {
    pub num_qubits: usize,
    pub gates: Vec<BoundGate>,
}
