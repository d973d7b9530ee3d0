//! Discrete-time quantum walks on cycle graphs.
//!
//! A walk on the `N`-cycle is a unitary on the direct sum of one qubit-sized
//! coin space per vertex (dimension `2N`) whose vertex-to-vertex blocks are
//! rank 1 between neighbors and zero elsewhere. This crate constructs such
//! walks, reduces them to a canonical parameter tuple `(r, θ, α)` that is
//! unique up to the block-diagonal gauge freedom, decides unitary equivalence
//! with a verified gauge witness, and computes the observables equivalence
//! preserves: per-vertex probability distributions and spectra.
//!
//! Module map:
//!
//! * [`phase`]: angles reduced to `[0, 2π)` and the modular congruence
//!   solvers that pin down the canonical global phases.
//! * [`linalg`]: dense complex matrices at desk scale, a closed-form 2×2 SVD,
//!   and a Jacobi eigensolver for Hermitian matrices.
//! * [`walk`]: the [`CycleWalk`] type, builders from parameters and local
//!   frames, block-structure analysis, and gauge transforms.
//! * [`canonical`]: canonicalization, equivalence verdicts, and the
//!   translation-invariant two-parameter specialization.
//! * [`dynamics`]: state evolution, vertex distributions, spectra.
//! * [`formats`]: deterministic JSON/CSV readers and writers used by the
//!   `cyclewalk` command-line tool.
//!
//! Vertices are labeled `0..N-1`; the coin amplitude `i ∈ {0, 1}` of vertex
//! `x` lives at index `2x + i` of every vector and matrix row.

pub mod canonical;
pub mod dynamics;
pub mod formats;
pub mod linalg;
pub mod phase;
pub mod walk;

pub use canonical::{
    are_equivalent, canonicalize, canonicalize_translation_invariant,
    canonicalize_with_tolerance, is_translation_invariant, CanonicalError, CanonicalParams,
    Canonicalization, EquivalenceStatus, EquivalenceVerdict, PARAM_EPS, WITNESS_EPS,
};
pub use dynamics::{
    distributions, evolve, spectra_match, spectrum, DynamicsError, VertexDistribution, WalkState,
};
pub use linalg::{eig_hermitian, svd2, CMat, LinalgError, Mat2, Svd2, C64};
pub use phase::{
    doubled_phase_class, doubled_phase_lattice, solve_congruences, solve_congruences_exhaustive,
    Angle, PhaseError, PhaseSolution, ANGLE_EPS,
};
pub use walk::{
    amp_index, build_from_frames, check_conditions, digraph_of, extract_frames, haar_unitary2,
    natural_expression, next_vertex, prev_vertex, random_cycle_walk, random_gauge,
    random_translation_invariant, CycleWalk, GaugeTransform, LocalFrame, Multidigraph,
    NaturalEdge, NaturalExpression, WalkError, DEGENERACY_EPS, RANK_EPS, UNITARITY_EPS,
};
