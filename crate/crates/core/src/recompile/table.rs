//! Versioned plain-text table of optimized U3 angles.
//!
//! ```text
//! # dtc4 parameter table v1
//! # n_qubits=8 n_layers=3
//! k,gate_index,theta,phi,lambda
//! 1,0,0.12,3.1,0.5
//! ```

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

use super::ansatz::parameter_count;

pub const TABLE_MAGIC: &str = "# dtc4 parameter table v1";

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterTable {
    pub n_qubits: usize,
    pub n_layers: usize,
    /// `(k, flattened (theta, phi, lambda) per U3 gate)`, ascending in `k`.
    pub entries: Vec<(usize, Vec<f64>)>,
}

impl ParameterTable {
    pub fn parameters_for(&self, k: usize) -> Option<&[f64]> {
        self.entries
            .iter()
            .find(|(kk, _)| *kk == k)
            .map(|(_, p)| p.as_slice())
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{TABLE_MAGIC}")?;
        writeln!(w, "# n_qubits={} n_layers={}", self.n_qubits, self.n_layers)?;
        writeln!(w, "k,gate_index,theta,phi,lambda")?;
        for (k, p) in &self.entries {
            for (g, a) in p.chunks_exact(3).enumerate() {
                writeln!(w, "{k},{g},{:?},{:?},{:?}", a[0], a[1], a[2])?;
            }
        }
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, l)) => Ok((i + 1, l?)),
                None => Err(Error::Parse {
                    line: 0,
                    reason: format!("missing {what}"),
                }),
            }
        };
        let (ln, magic) = next("header")?;
        if magic.trim() != TABLE_MAGIC {
            return Err(Error::Parse {
                line: ln,
                reason: format!("expected `{TABLE_MAGIC}`"),
            });
        }
        let (ln, shape) = next("shape line")?;
        let mut n_qubits = None;
        let mut n_layers = None;
        for tok in shape.trim_start_matches('#').split_whitespace() {
            let parse = |v: &str| {
                v.parse::<usize>().map_err(|e| Error::Parse {
                    line: ln,
                    reason: e.to_string(),
                })
            };
            match tok.split_once('=') {
                Some(("n_qubits", v)) => n_qubits = Some(parse(v)?),
                Some(("n_layers", v)) => n_layers = Some(parse(v)?),
                _ => {}
            }
        }
        let (Some(n_qubits), Some(n_layers)) = (n_qubits, n_layers) else {
            return Err(Error::Parse {
                line: ln,
                reason: "shape line needs n_qubits and n_layers".into(),
            });
        };
        let (ln, header) = next("column header")?;
        if header.trim() != "k,gate_index,theta,phi,lambda" {
            return Err(Error::Parse {
                line: ln,
                reason: "unexpected column header".into(),
            });
        }
        let n_gates = parameter_count(n_qubits, n_layers) / 3;
        let mut entries: Vec<(usize, Vec<f64>)> = Vec::new();
        for (i, line) in lines {
            let line = line?;
            let ln = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| Error::Parse { line: ln, reason };
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 5 {
                return Err(bad(format!("expected 5 fields, got {}", f.len())));
            }
            let k: usize = f[0].parse().map_err(|e| bad(format!("k: {e}")))?;
            let g: usize = f[1].parse().map_err(|e| bad(format!("gate_index: {e}")))?;
            let mut angles = [0.0; 3];
            for (a, s) in angles.iter_mut().zip(&f[2..]) {
                *a = s.parse().map_err(|e| bad(format!("angle: {e}")))?;
            }
            if entries.last().is_none_or(|(kk, _)| *kk != k) {
                if entries.iter().any(|(kk, _)| *kk == k) {
                    return Err(bad(format!("rows for k={k} are not contiguous")));
                }
                entries.push((k, Vec::with_capacity(3 * n_gates)));
            }
            let params = &mut entries.last_mut().expect("pushed above").1;
            if g != params.len() / 3 {
                return Err(bad(format!("gate_index {g} out of order")));
            }
            params.extend_from_slice(&angles);
        }
        for (k, p) in &entries {
            if p.len() != 3 * n_gates {
                return Err(Error::Parse {
                    line: 0,
                    reason: format!("k={k} has {} gates, layout needs {n_gates}", p.len() / 3),
                });
            }
        }
        Ok(ParameterTable {
            n_qubits,
            n_layers,
            entries,
        })
    }
}
