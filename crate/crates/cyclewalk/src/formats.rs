//! File formats for walks, canonical parameters, witnesses, states, and
//! tabular results.
//!
//! All JSON writers print doubles as 17-significant-digit scientific
//! notation and emit fields in a fixed order, so outputs are
//! byte-deterministic and round-trip bit-exactly through the matching
//! readers. CSV writers follow the same rule for their numeric columns.
//!
//! Errors split into two classes for the command-line tool: failures to
//! access or parse a file (exit code 2) and files that parse but violate a
//! domain invariant (exit code 3). [`FormatError::exit_code`] encodes the
//! split.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::{CanonicalError, CanonicalParams};
use crate::dynamics::{DynamicsError, VertexDistribution, WalkState};
use crate::linalg::{C64, CMat, Mat2};
use crate::phase::{Angle, PhaseError};
use crate::walk::{CycleWalk, GaugeTransform, WalkError, UNITARITY_EPS};

/// States read from disk may be off unit norm by this much; they are
/// renormalized and the deviation reported to the caller.
pub const STATE_NORM_EPS: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {detail}")]
    Shape { path: PathBuf, detail: String },
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

impl FormatError {
    /// 2 for access and parse failures, 3 for parsed files whose content
    /// violates a domain invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            FormatError::Io { .. } | FormatError::Json { .. } | FormatError::Shape { .. } => 2,
            _ => 3,
        }
    }
}

/// Serializer formatter printing every double with 17 significant digits,
/// enough to reproduce the exact bit pattern on read.
struct SciNotation;

impl serde_json::ser::Formatter for SciNotation {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let mut bytes = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut bytes, SciNotation);
    value
        .serialize(&mut serializer)
        .map_err(|source| FormatError::Json {
            path: path.to_path_buf(),
            source,
        })?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    fs::write(path, bytes).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_json<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let bytes = fs::read(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_slice(&bytes).map_err(|source| FormatError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn shape_error(path: &Path, detail: String) -> FormatError {
    FormatError::Shape {
        path: path.to_path_buf(),
        detail,
    }
}

#[derive(Serialize, Deserialize)]
struct WalkFile {
    n: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// Writes `{"n": N, "matrix": [[...2N entries...], ...2N rows]}` with each
/// entry as an `[re, im]` pair, rows and columns in `2x + i` order.
pub fn write_walk(path: &Path, walk: &CycleWalk) -> Result<(), FormatError> {
    let dim = walk.dim();
    let matrix = (0..dim)
        .map(|row| {
            (0..dim)
                .map(|col| {
                    let entry = walk.matrix()[(row, col)];
                    [entry.re, entry.im]
                })
                .collect()
        })
        .collect();
    write_json(path, &WalkFile { n: walk.n(), matrix })
}

pub fn read_walk(path: &Path) -> Result<CycleWalk, FormatError> {
    read_walk_with_tolerance(path, UNITARITY_EPS)
}

/// Reads a walk file, validating unitarity at `unitarity_tol` and the block
/// rank pattern as usual.
pub fn read_walk_with_tolerance(
    path: &Path,
    unitarity_tol: f64,
) -> Result<CycleWalk, FormatError> {
    let file: WalkFile = parse_json(path)?;
    let dim = file
        .n
        .checked_mul(2)
        .ok_or_else(|| shape_error(path, format!("implausible cycle length {}", file.n)))?;
    if file.matrix.len() != dim {
        return Err(shape_error(
            path,
            format!("matrix has {} rows, expected {dim}", file.matrix.len()),
        ));
    }
    for (index, row) in file.matrix.iter().enumerate() {
        if row.len() != dim {
            return Err(shape_error(
                path,
                format!("matrix row {index} has {} entries, expected {dim}", row.len()),
            ));
        }
    }
    let mut matrix = CMat::zeros(dim);
    for (i, row) in file.matrix.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            matrix[(i, j)] = C64::new(re, im);
        }
    }
    Ok(CycleWalk::with_tolerance(file.n, matrix, unitarity_tol)?)
}

#[derive(Serialize, Deserialize)]
struct ParamsFile {
    n: usize,
    r: Vec<f64>,
    theta: Vec<f64>,
    alpha: f64,
    degenerate: bool,
}

/// Writes `{"n", "r", "theta", "alpha", "degenerate"}` with angles in
/// radians.
pub fn write_params(path: &Path, params: &CanonicalParams) -> Result<(), FormatError> {
    write_json(
        path,
        &ParamsFile {
            n: params.n(),
            r: params.r().to_vec(),
            theta: params.theta().iter().map(|t| t.radians()).collect(),
            alpha: params.alpha().radians(),
            degenerate: params.degenerate(),
        },
    )
}

/// Reads canonical parameters. The stored `degenerate` flag is
/// informational; it is recomputed from the `r` values.
pub fn read_params(path: &Path) -> Result<CanonicalParams, FormatError> {
    let file: ParamsFile = parse_json(path)?;
    let theta = file
        .theta
        .iter()
        .map(|&t| Angle::new(t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CanonicalParams::new(
        file.n,
        file.r,
        theta,
        Angle::new(file.alpha)?,
    )?)
}

#[derive(Serialize, Deserialize)]
struct WitnessFile {
    n: usize,
    global_phase: f64,
    blocks: Vec<[[[f64; 2]; 2]; 2]>,
}

/// Writes `{"n", "global_phase", "blocks"}` where `blocks[x][row][col]` is
/// the `[re, im]` pair of vertex x's coin rotation.
pub fn write_witness(path: &Path, witness: &GaugeTransform) -> Result<(), FormatError> {
    let blocks = witness
        .blocks()
        .iter()
        .map(|block| {
            [0, 1].map(|row| [0, 1].map(|col| [block.0[row][col].re, block.0[row][col].im]))
        })
        .collect();
    write_json(
        path,
        &WitnessFile {
            n: witness.n(),
            global_phase: witness.global_phase().radians(),
            blocks,
        },
    )
}

pub fn read_witness(path: &Path) -> Result<GaugeTransform, FormatError> {
    let file: WitnessFile = parse_json(path)?;
    if file.blocks.len() != file.n {
        return Err(shape_error(
            path,
            format!("{} blocks for {} vertices", file.blocks.len(), file.n),
        ));
    }
    let blocks = file
        .blocks
        .iter()
        .map(|raw| {
            Mat2([
                [C64::new(raw[0][0][0], raw[0][0][1]), C64::new(raw[0][1][0], raw[0][1][1])],
                [C64::new(raw[1][0][0], raw[1][0][1]), C64::new(raw[1][1][0], raw[1][1][1])],
            ])
        })
        .collect();
    Ok(GaugeTransform::new(blocks, Angle::new(file.global_phase)?)?)
}

/// Writes a state as a bare JSON array of `[re, im]` pairs in `2x + i`
/// order.
pub fn write_state(path: &Path, state: &WalkState) -> Result<(), FormatError> {
    let raw: Vec<[f64; 2]> = state
        .amplitudes()
        .iter()
        .map(|amp| [amp.re, amp.im])
        .collect();
    write_json(path, &raw)
}

/// Reads a state for a walk on `n` vertices, renormalizing inputs that are
/// within [`STATE_NORM_EPS`] of unit norm. Returns the state and how far
/// the stored norm was from 1, so callers can warn.
pub fn read_state(path: &Path, n: usize) -> Result<(WalkState, f64), FormatError> {
    let raw: Vec<[f64; 2]> = parse_json(path)?;
    let amplitudes: Vec<C64> = raw.iter().map(|&[re, im]| C64::new(re, im)).collect();
    let norm = amplitudes.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > STATE_NORM_EPS {
        return Err(DynamicsError::NotNormalized {
            norm,
            tolerance: STATE_NORM_EPS,
        }
        .into());
    }
    Ok(WalkState::normalized(n, amplitudes)?)
}

/// Writes `step,vertex,probability` rows covering every distribution in
/// order.
pub fn write_distributions_csv(
    path: &Path,
    distributions: &[VertexDistribution],
) -> Result<(), FormatError> {
    let mut out = String::from("step,vertex,probability\n");
    for distribution in distributions {
        for (vertex, &probability) in distribution.probabilities().iter().enumerate() {
            writeln!(out, "{},{vertex},{probability:.16e}", distribution.step())
                .expect("writing to a string cannot fail");
        }
    }
    write_bytes(path, out.as_bytes())
}

/// Writes `re,im,arg` rows, one eigenvalue per line in the order given.
pub fn write_spectrum_csv(path: &Path, eigenvalues: &[C64]) -> Result<(), FormatError> {
    let mut out = String::from("re,im,arg\n");
    for value in eigenvalues {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", value.re, value.im, value.arg())
            .expect("writing to a string cannot fail");
    }
    write_bytes(path, out.as_bytes())
}
