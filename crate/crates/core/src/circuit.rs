//! Boolean circuits over NOT and OR gates.
//!
//! Line format, one item per line, blank lines and `#` comments ignored:
//!
//! ```text
//! input x
//! input y
//! a = NOT x
//! o = OR a y
//! output o
//! ```
//!
//! Gates may only read wires defined on earlier lines, so a parsed
//! circuit is a DAG by construction. AND is rejected outright: the gate
//! set is deliberately restricted, and `a AND b` can be rewritten as
//! `NOT (OR (NOT a) (NOT b))` by the caller.

use std::collections::BTreeMap;
use std::fmt;

/// A gate's operation, reading previously defined wires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateOp {
    Not(String),
    Or(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub out: String,
    pub op: GateOp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub inputs: Vec<String>,
    pub gates: Vec<Gate>,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("line {line}: cannot parse `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: wire `{wire}` is not defined yet")]
    UndefinedWire { line: usize, wire: String },
    #[error("line {line}: wire `{wire}` is already defined")]
    DuplicateWire { line: usize, wire: String },
    #[error("line {line}: AND gates are not part of the gate set")]
    AndGate { line: usize },
    #[error("line {line}: a second output is declared")]
    MultipleOutputs { line: usize },
    #[error("no output declared")]
    MissingOutput,
    #[error("circuit has no inputs")]
    NoInputs,
}

impl Circuit {
    /// All wire names in definition order: inputs first, then gate outputs.
    pub fn wires(&self) -> Vec<&str> {
        self.inputs
            .iter()
            .map(String::as_str)
            .chain(self.gates.iter().map(|g| g.out.as_str()))
            .collect()
    }

    /// The value of every wire under the given input values; `None` if
    /// some input has no value.
    pub fn wire_values(&self, inputs: &BTreeMap<String, bool>) -> Option<BTreeMap<String, bool>> {
        let mut values: BTreeMap<String, bool> = BTreeMap::new();
        for name in &self.inputs {
            values.insert(name.clone(), *inputs.get(name)?);
        }
        for gate in &self.gates {
            let value = match &gate.op {
                GateOp::Not(a) => !values[a],
                GateOp::Or(a, b) => values[a] | values[b],
            };
            values.insert(gate.out.clone(), value);
        }
        Some(values)
    }

    /// Evaluates the circuit; `None` if some input has no value.
    pub fn evaluate(&self, inputs: &BTreeMap<String, bool>) -> Option<bool> {
        Some(self.wire_values(inputs)?[&self.output])
    }

    pub fn is_satisfied_by(&self, inputs: &BTreeMap<String, bool>) -> bool {
        self.evaluate(inputs) == Some(true)
    }

    pub fn has_not_gate(&self) -> bool {
        self.gates.iter().any(|g| matches!(g.op, GateOp::Not(_)))
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for name in &self.inputs {
            writeln!(f, "input {name}")?;
        }
        for gate in &self.gates {
            match &gate.op {
                GateOp::Not(a) => writeln!(f, "{} = NOT {a}", gate.out)?,
                GateOp::Or(a, b) => writeln!(f, "{} = OR {a} {b}", gate.out)?,
            }
        }
        writeln!(f, "output {}", self.output)
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut inputs: Vec<String> = Vec::new();
    let mut gates: Vec<Gate> = Vec::new();
    let mut defined: Vec<String> = Vec::new();
    let mut output: Option<(usize, String)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let syntax = || CircuitError::Syntax {
            line,
            text: trimmed.to_string(),
        };
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match tokens.as_slice() {
            ["input", name] => {
                check_name(name, line)?;
                if defined.iter().any(|w| w == name) {
                    return Err(CircuitError::DuplicateWire {
                        line,
                        wire: name.to_string(),
                    });
                }
                inputs.push(name.to_string());
                defined.push(name.to_string());
            }
            ["output", name] => {
                if output.is_some() {
                    return Err(CircuitError::MultipleOutputs { line });
                }
                output = Some((line, name.to_string()));
            }
            [out, "=", op, rest @ ..] => {
                check_name(out, line)?;
                if defined.iter().any(|w| w == out) {
                    return Err(CircuitError::DuplicateWire {
                        line,
                        wire: out.to_string(),
                    });
                }
                let resolve = |wire: &str| -> Result<String, CircuitError> {
                    if defined.iter().any(|w| w == wire) {
                        Ok(wire.to_string())
                    } else {
                        Err(CircuitError::UndefinedWire {
                            line,
                            wire: wire.to_string(),
                        })
                    }
                };
                let op = match (*op, rest) {
                    ("NOT", [a]) => GateOp::Not(resolve(a)?),
                    ("OR", [a, b]) => GateOp::Or(resolve(a)?, resolve(b)?),
                    ("AND", _) => return Err(CircuitError::AndGate { line }),
                    _ => return Err(syntax()),
                };
                gates.push(Gate {
                    out: out.to_string(),
                    op,
                });
                defined.push(out.to_string());
            }
            _ => return Err(syntax()),
        }
    }
    let (line, output) = output.ok_or(CircuitError::MissingOutput)?;
    if !defined.iter().any(|w| w == &output) {
        return Err(CircuitError::UndefinedWire { line, wire: output });
    }
    if inputs.is_empty() {
        return Err(CircuitError::NoInputs);
    }
    Ok(Circuit {
        inputs,
        gates,
        output,
    })
}

fn check_name(name: &str, line: usize) -> Result<(), CircuitError> {
    let mut chars = name.chars();
    let head_ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    if head_ok && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        Ok(())
    } else {
        Err(CircuitError::Syntax {
            line,
            text: name.to_string(),
        })
    }
}

/// Guarantees at least one NOT gate: circuits without one gain a double
/// negation of the first input, prepended so later gates are untouched.
/// The extra wires feed nothing downstream; they exist to anchor a NOT
/// construction wherever one is structurally required. Satisfiability is
/// unchanged.
pub fn normalize_circuit(mut c: Circuit) -> Circuit {
    if c.has_not_gate() {
        return c;
    }
    let fresh = |base: &str, c: &Circuit| -> String {
        let mut name = base.to_string();
        let mut k = 0;
        while c.wires().iter().any(|w| *w == name) {
            k += 1;
            name = format!("{base}{k}");
        }
        name
    };
    let first = c.inputs[0].clone();
    let n1 = fresh("_n", &c);
    c.gates.insert(
        0,
        Gate {
            out: n1.clone(),
            op: GateOp::Not(first),
        },
    );
    let n2 = fresh("_n", &c);
    c.gates.insert(
        1,
        Gate {
            out: n2,
            op: GateOp::Not(n1),
        },
    );
    c
}
