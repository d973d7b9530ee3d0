//! Python bindings for the cyclewalk library.
//!
//! Exposes walk construction, canonicalization, equivalence testing, and
//! simulation as an in-process extension module. Matrices and state vectors
//! cross the boundary as nested lists of Python complex numbers; angles are
//! plain floats in radians.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use cyclewalk::{Angle, CMat, Mat2};

/// Converts any library error into a Python `ValueError` carrying the
/// original message.
fn value_error(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// Parses an angle given in radians, rejecting non-finite input.
fn angle(radians: f64) -> PyResult<Angle> {
    Angle::new(radians).map_err(value_error)
}

/// A unitary quantum walk on a cycle of `n` vertices with a two-dimensional
/// coin at each vertex.
///
/// Vertices are labeled `0..n-1` and amplitude `2x + i` addresses coin
/// component `i` at vertex `x`, so the matrix acts on column vectors of
/// length `2n`. Construction checks unitarity and that every one-step
/// transition block has rank one exactly between neighboring vertices.
///
/// Usage from Python:
///
///     from cyclewalk_py import CycleWalk, canonicalize
///     walk = CycleWalk.random(5, seed=7)
///     params, witness = canonicalize(walk)
///     print(params.r(), params.alpha())
#[pyclass]
struct CycleWalk {
    inner: cyclewalk::CycleWalk,
}

impl CycleWalk {
    /// Builds a normalized walk state from raw amplitudes, tolerating the
    /// same norm deviation the CLI accepts before renormalizing.
    fn state_from(&self, amplitudes: Vec<Complex64>) -> PyResult<cyclewalk::WalkState> {
        let (state, deviation) =
            cyclewalk::WalkState::normalized(self.inner.n(), amplitudes).map_err(value_error)?;
        if deviation > cyclewalk::formats::STATE_NORM_EPS {
            return Err(PyValueError::new_err(format!(
                "state norm deviates from 1 by {deviation:.3e}"
            )));
        }
        Ok(state)
    }
}

#[pymethods]
impl CycleWalk {
    /// Build a walk from an explicit unitary matrix.
    ///
    /// Args:
    ///     n: Number of cycle vertices (at least 3).
    ///     matrix: 2n x 2n nested list of complex entries, row major.
    ///
    /// Raises:
    ///     ValueError: If the shape is wrong, the matrix is not unitary,
    ///         or its transition pattern is not a cycle walk.
    #[new]
    fn new(n: usize, matrix: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let dim = n
            .checked_mul(2)
            .ok_or_else(|| PyValueError::new_err("cycle length is too large"))?;
        if matrix.len() != dim || matrix.iter().any(|row| row.len() != dim) {
            return Err(PyValueError::new_err(format!(
                "expected a {dim} x {dim} matrix for n = {n}"
            )));
        }
        let mut m = CMat::zeros(dim);
        for (row, entries) in matrix.iter().enumerate() {
            for (col, &entry) in entries.iter().enumerate() {
                m[(row, col)] = entry;
            }
        }
        Ok(Self {
            inner: cyclewalk::CycleWalk::new(n, m).map_err(value_error)?,
        })
    }

    /// The pure shift walk: coin component 0 hops forward and component 1
    /// hops backward, with no mixing.
    #[staticmethod]
    fn shift(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: cyclewalk::CycleWalk::shift(n).map_err(value_error)?,
        })
    }

    /// Sample a Haar-random cycle walk from a deterministic stream.
    ///
    /// Args:
    ///     n: Number of cycle vertices.
    ///     seed: Stream seed; equal seeds give byte-identical walks.
    ///     scramble: Also conjugate by a random gauge, hiding the canonical
    ///         parameters without leaving the equivalence class.
    #[staticmethod]
    #[pyo3(signature = (n, seed, scramble = false))]
    fn random(n: usize, seed: u64, scramble: bool) -> PyResult<Self> {
        Ok(Self {
            inner: cyclewalk::random_cycle_walk(n, seed, scramble).map_err(value_error)?,
        })
    }

    /// Sample a random walk that applies the same coin at every vertex.
    #[staticmethod]
    fn random_translation_invariant(n: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: cyclewalk::random_translation_invariant(n, seed).map_err(value_error)?,
        })
    }

    /// Number of cycle vertices.
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Dimension 2n of the state space.
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// The unitary as a nested list, row major.
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let dim = self.inner.dim();
        (0..dim)
            .map(|row| (0..dim).map(|col| self.inner.matrix()[(row, col)]).collect())
            .collect()
    }

    /// Max-norm distance of U†U from the identity.
    fn unitarity_residual(&self) -> f64 {
        self.inner.matrix().unitarity_residual()
    }

    /// Whether conjugating by the one-step cycle rotation leaves the walk
    /// unchanged, i.e. the same coin acts at every vertex.
    fn is_translation_invariant(&self) -> bool {
        cyclewalk::is_translation_invariant(&self.inner)
    }

    /// All 2n eigenvalues, sorted by principal argument.
    ///
    /// Raises:
    ///     ValueError: If the eigensolver cannot certify its residual bound.
    fn spectrum(&self) -> PyResult<Vec<Complex64>> {
        cyclewalk::spectrum(&self.inner).map_err(value_error)
    }

    /// Apply the walk repeatedly to an initial state.
    ///
    /// The input is renormalized when its norm deviates from 1 by at most
    /// 1e-6 and rejected beyond that.
    ///
    /// Args:
    ///     amplitudes: Length-2n state vector, entry 2x + i for coin
    ///         component i at vertex x.
    ///     steps: Number of applications.
    ///
    /// Returns:
    ///     steps + 1 state vectors, starting with the normalized input.
    fn evolve(&self, amplitudes: Vec<Complex64>, steps: usize) -> PyResult<Vec<Vec<Complex64>>> {
        let state = self.state_from(amplitudes)?;
        let states = cyclewalk::evolve(&self.inner, &state, steps).map_err(value_error)?;
        Ok(states
            .into_iter()
            .map(|s| s.amplitudes().to_vec())
            .collect())
    }

    /// Vertex-probability table of an evolution.
    ///
    /// Args:
    ///     amplitudes: Length-2n state vector, as in `evolve`.
    ///     steps: Number of applications.
    ///
    /// Returns:
    ///     steps + 1 rows of n probabilities; row t is the distribution
    ///     over vertices after t steps.
    fn distributions(&self, amplitudes: Vec<Complex64>, steps: usize) -> PyResult<Vec<Vec<f64>>> {
        let state = self.state_from(amplitudes)?;
        let rows = cyclewalk::distributions(&self.inner, &state, steps).map_err(value_error)?;
        Ok(rows
            .into_iter()
            .map(|d| d.probabilities().to_vec())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("CycleWalk(n={})", self.inner.n())
    }
}

/// The canonical parameters (r_0..r_{n-1}, theta_0..theta_{n-1}, alpha) of
/// a cycle walk.
///
/// Every cycle walk is gauge-equivalent to the walk built from exactly one
/// tuple with theta_0 = 0, theta_1 in [0, 2pi/n), and alpha in its window,
/// provided each reflection amplitude r_x lies strictly inside (0, 1).
/// Tuples touching r_x = 0 or r_x = 1 are flagged degenerate; they still
/// build walks but no longer label equivalence classes uniquely.
#[pyclass]
struct CanonicalParams {
    inner: cyclewalk::CanonicalParams,
}

#[pymethods]
impl CanonicalParams {
    /// Assemble a parameter tuple.
    ///
    /// Args:
    ///     n: Number of cycle vertices (at least 3).
    ///     r: n reflection amplitudes, each in [0, 1].
    ///     theta: n phase angles in radians.
    ///     alpha: Global phase parameter in radians.
    ///
    /// Raises:
    ///     ValueError: If a length is wrong or an amplitude leaves [0, 1].
    #[new]
    fn new(n: usize, r: Vec<f64>, theta: Vec<f64>, alpha: f64) -> PyResult<Self> {
        let theta = theta.into_iter().map(angle).collect::<PyResult<Vec<_>>>()?;
        Ok(Self {
            inner: cyclewalk::CanonicalParams::new(n, r, theta, angle(alpha)?)
                .map_err(value_error)?,
        })
    }

    /// Number of cycle vertices.
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// The n reflection amplitudes.
    fn r(&self) -> Vec<f64> {
        self.inner.r().to_vec()
    }

    /// The n phase angles in radians, wrapped into [0, 2pi).
    fn theta(&self) -> Vec<f64> {
        self.inner.theta().iter().map(|t| t.radians()).collect()
    }

    /// The global phase parameter in radians.
    fn alpha(&self) -> f64 {
        self.inner.alpha().radians()
    }

    /// Whether any amplitude touches 0 or 1, voiding uniqueness.
    fn degenerate(&self) -> bool {
        self.inner.degenerate()
    }

    /// Whether every angle already lies inside its canonical window.
    fn is_canonical(&self) -> bool {
        self.inner.is_canonical()
    }

    /// Human-readable descriptions of any angles outside their windows.
    fn range_violations(&self) -> Vec<String> {
        self.inner.range_violations()
    }

    /// Largest single-parameter gap to another tuple, measuring angles
    /// around the circle. Infinite when the cycle lengths differ.
    fn max_distance(&self, other: &CanonicalParams) -> f64 {
        self.inner.max_distance(&other.inner)
    }

    /// Construct the walk carrying exactly these parameters.
    fn build(&self) -> CycleWalk {
        CycleWalk {
            inner: self.inner.build(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "CanonicalParams(n={}, alpha={:.6})",
            self.inner.n(),
            self.inner.alpha().radians()
        )
    }
}

/// A local gauge: one unitary 2x2 coin rotation per vertex plus a global
/// phase `l`.
///
/// Acts on walks by phased conjugation, `U -> e^{il} W U W†`, which never
/// changes the equivalence class. Canonicalization returns the gauge that
/// carries a walk onto its canonical form as a verifiable witness.
#[pyclass]
struct GaugeTransform {
    inner: cyclewalk::GaugeTransform,
}

#[pymethods]
impl GaugeTransform {
    /// Assemble a gauge from explicit blocks.
    ///
    /// Args:
    ///     blocks: n unitary 2x2 blocks as nested lists, one per vertex.
    ///     global_phase: Phase angle l in radians.
    ///
    /// Raises:
    ///     ValueError: If fewer than 3 blocks are given or one is not
    ///         unitary.
    #[new]
    fn new(blocks: Vec<[[Complex64; 2]; 2]>, global_phase: f64) -> PyResult<Self> {
        let blocks = blocks.into_iter().map(Mat2).collect();
        Ok(Self {
            inner: cyclewalk::GaugeTransform::new(blocks, angle(global_phase)?)
                .map_err(value_error)?,
        })
    }

    /// The identity gauge on n vertices.
    #[staticmethod]
    fn identity(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: cyclewalk::GaugeTransform::identity(n).map_err(value_error)?,
        })
    }

    /// Number of cycle vertices.
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// The global phase l in radians.
    fn global_phase(&self) -> f64 {
        self.inner.global_phase().radians()
    }

    /// The per-vertex blocks as nested lists.
    fn blocks(&self) -> Vec<[[Complex64; 2]; 2]> {
        self.inner.blocks().iter().map(|b| b.0).collect()
    }

    /// Conjugate a walk, returning the walk with matrix e^{il} W U W†.
    fn apply(&self, walk: &CycleWalk) -> PyResult<CycleWalk> {
        Ok(CycleWalk {
            inner: self.inner.apply(&walk.inner).map_err(value_error)?,
        })
    }

    /// Apply e^{il} W to a length-2n state vector.
    fn apply_vector(&self, amplitudes: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let dim = 2 * self.inner.n();
        if amplitudes.len() != dim {
            return Err(PyValueError::new_err(format!(
                "expected {dim} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        Ok(self.inner.apply_vector(&amplitudes))
    }

    /// The gauge undoing this one exactly.
    fn inverse(&self) -> GaugeTransform {
        GaugeTransform {
            inner: self.inner.inverse(),
        }
    }

    /// The gauge acting as `inner` first, then as this one.
    fn compose(&self, inner: &GaugeTransform) -> PyResult<GaugeTransform> {
        Ok(GaugeTransform {
            inner: self.inner.compose(&inner.inner).map_err(value_error)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "GaugeTransform(n={}, global_phase={:.6})",
            self.inner.n(),
            self.inner.global_phase().radians()
        )
    }
}

/// Reduce a walk to canonical parameters and the gauge realizing them.
///
/// Args:
///     walk: The walk to canonicalize.
///     tolerance: Residual bound for the final verification; defaults to
///         the library's unitarity tolerance.
///
/// Returns:
///     (params, witness) with witness.apply(walk) equal to params.build()
///     within the tolerance.
///
/// Raises:
///     ValueError: If the tolerance is invalid or verification fails.
#[pyfunction]
#[pyo3(signature = (walk, tolerance = None))]
fn canonicalize(
    walk: &CycleWalk,
    tolerance: Option<f64>,
) -> PyResult<(CanonicalParams, GaugeTransform)> {
    if let Some(tol) = tolerance {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(PyValueError::new_err(format!(
                "tolerance must be finite and positive, got {tol}"
            )));
        }
    }
    let result = match tolerance {
        Some(tol) => cyclewalk::canonicalize_with_tolerance(&walk.inner, tol),
        None => cyclewalk::canonicalize(&walk.inner),
    }
    .map_err(value_error)?;
    Ok((
        CanonicalParams {
            inner: result.params,
        },
        GaugeTransform {
            inner: result.witness,
        },
    ))
}

/// Decide whether two walks on the same cycle are unitarily equivalent.
///
/// Returns:
///     (status, witness, distance): status is "EQUIVALENT",
///     "NOT_EQUIVALENT", or "INDETERMINATE_DEGENERATE"; witness conjugates
///     the first walk onto the second when equivalent and is None
///     otherwise; distance is the largest canonical-parameter gap.
///
/// Raises:
///     ValueError: If the cycle lengths differ or a verified witness
///         cannot be produced for a non-degenerate match.
#[pyfunction]
fn are_equivalent(
    walk_a: &CycleWalk,
    walk_b: &CycleWalk,
) -> PyResult<(String, Option<GaugeTransform>, f64)> {
    let verdict = cyclewalk::are_equivalent(&walk_a.inner, &walk_b.inner).map_err(value_error)?;
    Ok((
        verdict.status.to_string(),
        verdict.witness.map(|w| GaugeTransform { inner: w }),
        verdict.max_param_distance,
    ))
}

/// Reduce a translation-invariant walk to its two-parameter form.
///
/// Returns:
///     (r, alpha): the shared reflection amplitude and the global phase
///     parameter in radians; all theta vanish for such walks.
///
/// Raises:
///     ValueError: If the walk is not translation invariant.
#[pyfunction]
fn canonicalize_translation_invariant(walk: &CycleWalk) -> PyResult<(f64, f64)> {
    let (r, alpha) =
        cyclewalk::canonicalize_translation_invariant(&walk.inner).map_err(value_error)?;
    Ok((r, alpha.radians()))
}

/// Solve the phase congruences n*alpha = beta and n*l = gamma (mod 2pi)
/// subject to the window condition that places theta_1 in [0, 2pi/n).
///
/// Args:
///     n: Cycle length.
///     beta, gamma, delta: Right-hand sides in radians.
///
/// Returns:
///     (alpha, gauge_phase, alpha_index, gauge_index): the unique in-window
///     solution and the lattice indices selecting it.
#[pyfunction]
fn solve_congruences(
    n: usize,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> PyResult<(f64, f64, usize, usize)> {
    let sol = cyclewalk::solve_congruences(n, angle(beta)?, angle(gamma)?, angle(delta)?)
        .map_err(value_error)?;
    Ok((
        sol.alpha.radians(),
        sol.gauge_phase.radians(),
        sol.alpha_index,
        sol.gauge_index,
    ))
}

/// The distinct values the doubled gauge phase 2l can take on an n-cycle,
/// as sorted angles in [0, 2pi).
#[pyfunction]
fn doubled_phase_lattice(n: usize) -> PyResult<Vec<f64>> {
    Ok(cyclewalk::doubled_phase_lattice(n)
        .map_err(value_error)?
        .into_iter()
        .map(|a| a.radians())
        .collect())
}

/// Wrap an angle into [0, 2pi), snapping values a rounding error away from
/// 2pi down to 0.
#[pyfunction]
fn reduce_mod_2pi(radians: f64) -> PyResult<f64> {
    Ok(angle(radians)?.radians())
}

#[pymodule]
fn cyclewalk_py(_py: Python, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<CycleWalk>()?;
    m.add_class::<CanonicalParams>()?;
    m.add_class::<GaugeTransform>()?;
    m.add_function(wrap_pyfunction!(canonicalize, m)?)?;
    m.add_function(wrap_pyfunction!(are_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize_translation_invariant, m)?)?;
    m.add_function(wrap_pyfunction!(solve_congruences, m)?)?;
    m.add_function(wrap_pyfunction!(doubled_phase_lattice, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_mod_2pi, m)?)?;
    Ok(())
}
