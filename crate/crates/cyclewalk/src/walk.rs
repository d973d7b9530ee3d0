//! Cycle walk unitaries as data.
//!
//! The central type is [`CycleWalk`]: a validated `2N×2N` unitary whose
//! vertex-to-vertex blocks have rank 1 between cycle neighbors and rank 0
//! elsewhere. Everything else here either builds one (from local frames, from
//! a seed, from another walk by gauge conjugation) or takes one apart (block
//! multidigraph, edge-wise rank factorization, per-vertex frame extraction).

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{svd2, C64, CMat, LinalgError, Mat2};
use crate::phase::{Angle, PhaseError};

/// Max-abs tolerance for unitarity and other matrix identities.
pub const UNITARITY_EPS: f64 = 1e-10;

/// Singular-value cutoff for block rank decisions, relative to the largest
/// singular value of the whole matrix (which is 1 for unitaries).
pub const RANK_EPS: f64 = 1e-8;

/// Threshold on `r` or `s = √(1−r²)` below which a frame coordinate counts
/// as vanishing and its phase is no longer defined.
pub const DEGENERACY_EPS: f64 = 1e-8;

/// Orthonormality tolerance for user-supplied frames and states.
const FRAME_EPS: f64 = 1e-9;

/// Frame coordinates below this magnitude are rounding noise, not data.
const COMPONENT_SNAP_EPS: f64 = 1e-12;

/// Allowed norm leakage of a pulled-back edge vector outside its origin
/// block. Rank-0 blocks may legitimately hold entries up to the rank cutoff,
/// so this sits one order above it.
const LEAK_EPS: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("cycle length must be at least 3, got {0}")]
    CycleTooShort(usize),
    #[error("matrix dimension {found} does not match 2N = {expected}")]
    DimensionMismatch { found: usize, expected: usize },
    #[error("matrix dimension {0} is odd; vertex blocks are 2x2")]
    OddDimension(usize),
    #[error("matrix is not unitary: residual {residual:.3e} exceeds {tolerance:.1e}")]
    NotUnitary { residual: f64, tolerance: f64 },
    #[error("block ({terminus},{origin}) has rank {found}, cycle structure requires {expected}")]
    WrongBlockRank {
        terminus: usize,
        origin: usize,
        found: usize,
        expected: usize,
    },
    #[error("origin/terminus edge-count conditions fail: origin_ok={origin_ok}, terminus_ok={terminus_ok}")]
    ConditionsViolated { origin_ok: bool, terminus_ok: bool },
    #[error("frame vectors are not orthonormal: residual {0:.3e}")]
    FrameNotOrthonormal(f64),
    #[error("{name} must lie in [0, 1], got {value}")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("{name} has {found} entries, expected {expected}")]
    LengthMismatch {
        name: &'static str,
        found: usize,
        expected: usize,
    },
    #[error("gauge block {index} is not unitary: residual {residual:.3e}")]
    BlockNotUnitary { index: usize, residual: f64 },
    #[error("edge vector leaks outside its origin block: {0:.3e}")]
    EdgeLeakage(f64),
    #[error("expression does not reconstruct the walk: residual {0:.3e}")]
    Reconstruction(f64),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Flat index of coin coordinate `i ∈ {0, 1}` at vertex `x`: amplitudes and
/// matrix rows/columns are laid out as `2x + i`.
#[inline]
pub fn amp_index(x: usize, i: usize) -> usize {
    2 * x + i
}

/// Clockwise neighbor on the N-cycle. All vertex arithmetic in the crate
/// goes through this and [`prev_vertex`]; nothing else may compute mod N.
#[inline]
pub fn next_vertex(x: usize, n: usize) -> usize {
    (x + 1) % n
}

/// Counterclockwise neighbor on the N-cycle.
#[inline]
pub fn prev_vertex(x: usize, n: usize) -> usize {
    (x + n - 1) % n
}

/// A discrete-time quantum walk on the N-cycle: a unitary on N qubit coin
/// spaces whose block pattern matches the cycle.
///
/// Construction validates unitarity (max-abs residual against
/// [`UNITARITY_EPS`] or a caller override) and the block rank pattern, so a
/// held value always satisfies both.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleWalk {
    n: usize,
    matrix: CMat,
}

impl CycleWalk {
    pub fn new(n: usize, matrix: CMat) -> Result<CycleWalk, WalkError> {
        Self::with_tolerance(n, matrix, UNITARITY_EPS)
    }

    /// Like [`CycleWalk::new`] with an explicit unitarity tolerance. The
    /// block rank cutoff is structural and not affected.
    pub fn with_tolerance(
        n: usize,
        matrix: CMat,
        unitarity_tol: f64,
    ) -> Result<CycleWalk, WalkError> {
        if n < 3 {
            return Err(WalkError::CycleTooShort(n));
        }
        if matrix.dim() != 2 * n {
            return Err(WalkError::DimensionMismatch {
                found: matrix.dim(),
                expected: 2 * n,
            });
        }
        let residual = matrix.unitarity_residual();
        if residual > unitarity_tol {
            return Err(WalkError::NotUnitary {
                residual,
                tolerance: unitarity_tol,
            });
        }
        for origin in 0..n {
            for terminus in 0..n {
                let expected = usize::from(
                    terminus == next_vertex(origin, n) || terminus == prev_vertex(origin, n),
                );
                let found = block_rank(&matrix.block2(terminus, origin));
                if found != expected {
                    return Err(WalkError::WrongBlockRank {
                        terminus,
                        origin,
                        found,
                        expected,
                    });
                }
            }
        }
        Ok(CycleWalk { n, matrix })
    }

    /// The walk with `r ≡ 1`: coin 1 travels clockwise and coin 2
    /// counterclockwise with no mixing.
    pub fn shift(n: usize) -> Result<CycleWalk, WalkError> {
        let frame = LocalFrame::new(1.0, Angle::ZERO, Angle::ZERO, Angle::ZERO, Angle::ZERO)?;
        build_from_frames(&vec![frame; n])
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Matrix dimension `2N`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }
}

fn block_rank(block: &Mat2) -> usize {
    let s = svd2(block);
    s.sigma.iter().filter(|&&sv| sv > RANK_EPS).count()
}

/// Directed edge multiplicities between vertices, read off the block ranks
/// of a unitary: `count(y, x)` edges run from `x` to `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Multidigraph {
    n: usize,
    counts: Vec<u8>,
}

impl Multidigraph {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of directed edges from `origin` to `terminus`.
    pub fn count(&self, terminus: usize, origin: usize) -> usize {
        self.counts[terminus * self.n + origin] as usize
    }

    /// Edges leaving `x`; equals `dim H_x = 2` exactly when the origin
    /// condition holds there.
    pub fn origin_degree(&self, x: usize) -> usize {
        (0..self.n).map(|y| self.count(y, x)).sum()
    }

    /// Edges arriving at `x`.
    pub fn terminus_degree(&self, x: usize) -> usize {
        (0..self.n).map(|y| self.count(x, y)).sum()
    }

    /// True when the pattern is exactly one edge to each neighbor on an
    /// N ≥ 3 cycle.
    pub fn is_cycle_pattern(&self) -> bool {
        if self.n < 3 {
            return false;
        }
        (0..self.n).all(|x| {
            (0..self.n).all(|y| {
                let expected =
                    usize::from(y == next_vertex(x, self.n) || y == prev_vertex(x, self.n));
                self.count(y, x) == expected
            })
        })
    }
}

/// Computes the block multidigraph of any even-dimensional unitary. Block
/// rank counts singular values above [`RANK_EPS`] (relative to the unit top
/// singular value of a unitary).
pub fn digraph_of(matrix: &CMat) -> Result<Multidigraph, WalkError> {
    let dim = matrix.dim();
    if dim % 2 != 0 || dim == 0 {
        return Err(WalkError::OddDimension(dim));
    }
    let residual = matrix.unitarity_residual();
    if residual > UNITARITY_EPS {
        return Err(WalkError::NotUnitary {
            residual,
            tolerance: UNITARITY_EPS,
        });
    }
    let n = dim / 2;
    let mut counts = vec![0u8; n * n];
    for origin in 0..n {
        for terminus in 0..n {
            counts[terminus * n + origin] = block_rank(&matrix.block2(terminus, origin)) as u8;
        }
    }
    Ok(Multidigraph { n, counts })
}

/// Whether every vertex has exactly 2 outgoing and 2 incoming edges. The two
/// booleans are provably equal for unitaries; both are computed so tests can
/// observe the equality rather than assume it.
pub fn check_conditions(matrix: &CMat) -> Result<(bool, bool), WalkError> {
    let graph = digraph_of(matrix)?;
    let origin_ok = (0..graph.n()).all(|x| graph.origin_degree(x) == 2);
    let terminus_ok = (0..graph.n()).all(|x| graph.terminus_degree(x) == 2);
    Ok((origin_ok, terminus_ok))
}

/// One edge of the rank factorization `U = Σ |target⟩⟨source|`: `U` maps
/// `source` (supported on the origin block) to `target` (supported on the
/// terminus block).
#[derive(Clone, Debug)]
pub struct NaturalEdge {
    pub origin: usize,
    pub terminus: usize,
    pub source: [C64; 2],
    pub target: [C64; 2],
}

/// Edge-wise rank factorization of a block unitary whose edge-count
/// conditions hold. Both the `target` and `source` families form orthonormal
/// bases of the full space.
#[derive(Clone, Debug)]
pub struct NaturalExpression {
    n: usize,
    edges: Vec<NaturalEdge>,
}

impl NaturalExpression {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[NaturalEdge] {
        &self.edges
    }

    /// Assembles `Σ |target⟩⟨source|` back into a dense matrix.
    pub fn reconstruct(&self) -> CMat {
        let mut m = CMat::zeros(2 * self.n);
        for edge in &self.edges {
            for r in 0..2 {
                for c in 0..2 {
                    m[(amp_index(edge.terminus, r), amp_index(edge.origin, c))] +=
                        edge.target[r] * edge.source[c].conj();
                }
            }
        }
        m
    }

    pub fn residual(&self, matrix: &CMat) -> f64 {
        self.reconstruct().max_abs_diff(matrix)
    }
}

/// Embeds a 2-vector at `block`, applies `m`, and returns the result's
/// component in `expect`, verifying nothing leaked elsewhere.
fn pull_back(
    m: &CMat,
    block: usize,
    v: [C64; 2],
    expect: usize,
) -> Result<[C64; 2], WalkError> {
    let mut embedded = vec![C64::ZERO; m.dim()];
    embedded[amp_index(block, 0)] = v[0];
    embedded[amp_index(block, 1)] = v[1];
    let full = m.matvec(&embedded);
    let total: f64 = full.iter().map(|z| z.norm_sqr()).sum();
    let kept = full[amp_index(expect, 0)].norm_sqr() + full[amp_index(expect, 1)].norm_sqr();
    let leak = (total - kept).max(0.0).sqrt();
    if leak > LEAK_EPS {
        return Err(WalkError::EdgeLeakage(leak));
    }
    Ok([full[amp_index(expect, 0)], full[amp_index(expect, 1)]])
}

/// Factorizes a block unitary into edge vector pairs, one per directed edge
/// of its multidigraph: unit `target` vectors from each block's singular
/// vectors (taken in descending singular-value order) and `source = U†·target`.
pub fn natural_expression(matrix: &CMat) -> Result<NaturalExpression, WalkError> {
    let graph = digraph_of(matrix)?;
    let origin_ok = (0..graph.n()).all(|x| graph.origin_degree(x) == 2);
    let terminus_ok = (0..graph.n()).all(|x| graph.terminus_degree(x) == 2);
    if !(origin_ok && terminus_ok) {
        return Err(WalkError::ConditionsViolated {
            origin_ok,
            terminus_ok,
        });
    }
    let adjoint = matrix.adjoint();
    let n = graph.n();
    let mut edges = Vec::with_capacity(2 * n);
    for origin in 0..n {
        for terminus in 0..n {
            let count = graph.count(terminus, origin);
            if count == 0 {
                continue;
            }
            let s = svd2(&matrix.block2(terminus, origin));
            for k in 0..count {
                if s.sigma[k] <= RANK_EPS {
                    return Err(WalkError::WrongBlockRank {
                        terminus,
                        origin,
                        found: k,
                        expected: count,
                    });
                }
                let target = s.left[k];
                let source = pull_back(&adjoint, terminus, target, origin)?;
                edges.push(NaturalEdge {
                    origin,
                    terminus,
                    source,
                    target,
                });
            }
        }
    }
    let expression = NaturalExpression { n, edges };
    let residual = expression.residual(matrix);
    if residual > UNITARITY_EPS {
        return Err(WalkError::Reconstruction(residual));
    }
    Ok(expression)
}

/// The orthonormal pair of coin vectors a walk consumes at one vertex,
/// stored in polar form:
///
/// ```text
/// η₁ = (r e^{ia}, s e^{ib}),   η₂ = (s e^{ic}, r e^{id}),   s = √(1−r²)
/// ```
///
/// Orthogonality pins `a − c ≡ b − d + π` (mod 2π); the constructor snaps
/// `c` and `d` so the stored angles satisfy it exactly, which keeps walks
/// built from frames unitary at rounding level. Phases of coordinates whose
/// magnitude vanishes (within [`DEGENERACY_EPS`]) carry no information and
/// are pinned to 0, with the `degenerate` flag set.
#[derive(Clone, Copy, Debug)]
pub struct LocalFrame {
    r: f64,
    a: Angle,
    b: Angle,
    c: Angle,
    d: Angle,
    degenerate: bool,
}

impl LocalFrame {
    pub fn new(r: f64, a: Angle, b: Angle, c: Angle, d: Angle) -> Result<LocalFrame, WalkError> {
        if !(0.0..=1.0).contains(&r) || !r.is_finite() {
            return Err(WalkError::ParameterOutOfRange {
                name: "frame parameter r",
                value: r,
            });
        }
        let frame = Self::finish(r, a, b, c, d);
        // Vector-level orthonormality is a consequence of the polar form plus
        // the snapped constraint, so nothing further to validate here.
        Ok(frame)
    }

    /// Reads a frame off an explicit orthonormal pair.
    pub fn from_vectors(eta1: [C64; 2], eta2: [C64; 2]) -> Result<LocalFrame, WalkError> {
        let norm1 = (eta1[0].norm_sqr() + eta1[1].norm_sqr()).sqrt();
        let norm2 = (eta2[0].norm_sqr() + eta2[1].norm_sqr()).sqrt();
        let ip = eta1[0].conj() * eta2[0] + eta1[1].conj() * eta2[1];
        let residual = (norm1 - 1.0).abs().max((norm2 - 1.0).abs()).max(ip.norm());
        if residual > FRAME_EPS {
            return Err(WalkError::FrameNotOrthonormal(residual));
        }
        // Coordinates at the rounding floor snap r to an exact 0 or 1.
        // Deriving s = √(1−r²) from an r carrying ~1e−16 of noise would
        // otherwise inflate that noise to ~1e−8 in s.
        let m_r = eta1[0].norm();
        let m_s = eta1[1].norm();
        let r = if m_s <= COMPONENT_SNAP_EPS {
            1.0
        } else if m_r <= COMPONENT_SNAP_EPS {
            0.0
        } else {
            m_r.clamp(0.0, 1.0)
        };
        Ok(Self::finish(
            r,
            Angle::wrap(eta1[0].arg()),
            Angle::wrap(eta1[1].arg()),
            Angle::wrap(eta2[0].arg()),
            Angle::wrap(eta2[1].arg()),
        ))
    }

    fn finish(r: f64, a: Angle, b: Angle, c: Angle, d: Angle) -> LocalFrame {
        let s = (1.0 - r * r).max(0.0).sqrt();
        let r_vanishes = r <= DEGENERACY_EPS;
        let s_vanishes = s <= DEGENERACY_EPS;
        let (mut a, mut b, mut c, mut d) = (a, b, c, d);
        if r_vanishes {
            a = Angle::ZERO;
            d = Angle::ZERO;
        }
        if s_vanishes {
            b = Angle::ZERO;
            c = Angle::ZERO;
        }
        if !r_vanishes && !s_vanishes {
            // Split the constraint defect (a−c) − (b−d+π) evenly between c
            // and d, making η₁ ⊥ η₂ exact in the stored representation.
            let mut defect = ((a - c) - (b - d) - Angle::wrap(std::f64::consts::PI)).radians();
            if defect > std::f64::consts::PI {
                defect -= TAU;
            }
            c = Angle::wrap(c.radians() + 0.5 * defect);
            d = Angle::wrap(d.radians() - 0.5 * defect);
        }
        LocalFrame {
            r,
            a,
            b,
            c,
            d,
            degenerate: r_vanishes || s_vanishes,
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        (1.0 - self.r * self.r).max(0.0).sqrt()
    }

    pub fn a(&self) -> Angle {
        self.a
    }

    pub fn b(&self) -> Angle {
        self.b
    }

    pub fn c(&self) -> Angle {
        self.c
    }

    pub fn d(&self) -> Angle {
        self.d
    }

    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn eta1(&self) -> [C64; 2] {
        [
            C64::from_polar(self.r, self.a.radians()),
            C64::from_polar(self.s(), self.b.radians()),
        ]
    }

    pub fn eta2(&self) -> [C64; 2] {
        [
            C64::from_polar(self.s(), self.c.radians()),
            C64::from_polar(self.r, self.d.radians()),
        ]
    }
}

/// A block-diagonal change of basis `W = ⊕_x W_x` together with a global
/// phase `l`, acting on walks by `U ↦ e^{il} W U W†`. Two walks related this
/// way are unitarily equivalent.
#[derive(Clone, Debug)]
pub struct GaugeTransform {
    blocks: Vec<Mat2>,
    global_phase: Angle,
}

impl GaugeTransform {
    pub fn new(blocks: Vec<Mat2>, global_phase: Angle) -> Result<GaugeTransform, WalkError> {
        if blocks.len() < 3 {
            return Err(WalkError::CycleTooShort(blocks.len()));
        }
        for (index, block) in blocks.iter().enumerate() {
            let residual = block.unitarity_residual();
            if residual > UNITARITY_EPS {
                return Err(WalkError::BlockNotUnitary { index, residual });
            }
        }
        Ok(GaugeTransform {
            blocks,
            global_phase,
        })
    }

    pub fn identity(n: usize) -> Result<GaugeTransform, WalkError> {
        Self::new(vec![Mat2::identity(); n], Angle::ZERO)
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Mat2] {
        &self.blocks
    }

    pub fn block(&self, x: usize) -> &Mat2 {
        &self.blocks[x]
    }

    pub fn global_phase(&self) -> Angle {
        self.global_phase
    }

    /// `self ∘ inner`: `inner` acts first, blocks multiply vertexwise and
    /// global phases add.
    pub fn compose(&self, inner: &GaugeTransform) -> Result<GaugeTransform, WalkError> {
        if self.n() != inner.n() {
            return Err(WalkError::LengthMismatch {
                name: "gauge blocks",
                found: inner.n(),
                expected: self.n(),
            });
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&inner.blocks)
            .map(|(outer, inner)| outer.mul(inner))
            .collect();
        GaugeTransform::new(blocks, self.global_phase + inner.global_phase)
    }

    pub fn inverse(&self) -> GaugeTransform {
        GaugeTransform {
            blocks: self.blocks.iter().map(Mat2::adjoint).collect(),
            global_phase: -self.global_phase,
        }
    }

    fn as_cmat(&self) -> CMat {
        let mut w = CMat::zeros(2 * self.n());
        for (x, block) in self.blocks.iter().enumerate() {
            w.set_block2(x, x, *block);
        }
        w
    }

    /// `e^{il} W M W†` on a raw matrix, without walk validation.
    pub fn conjugate_matrix(&self, m: &CMat) -> CMat {
        assert_eq!(m.dim(), 2 * self.n(), "gauge and matrix dimensions differ");
        let w = self.as_cmat();
        w.mul(m)
            .mul(&w.adjoint())
            .scale(C64::from_polar(1.0, self.global_phase.radians()))
    }

    /// Applies the gauge to a walk; the result is re-validated, since
    /// block-diagonal conjugation preserves the cycle pattern.
    pub fn apply(&self, walk: &CycleWalk) -> Result<CycleWalk, WalkError> {
        if walk.n() != self.n() {
            return Err(WalkError::LengthMismatch {
                name: "gauge blocks",
                found: self.n(),
                expected: walk.n(),
            });
        }
        CycleWalk::new(walk.n(), self.conjugate_matrix(walk.matrix()))
    }

    /// `e^{il} W v` on a state vector.
    pub fn apply_vector(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), 2 * self.n(), "gauge and vector dimensions differ");
        let phase = C64::from_polar(1.0, self.global_phase.radians());
        let mut out = vec![C64::ZERO; v.len()];
        for (x, block) in self.blocks.iter().enumerate() {
            let w = block.mulvec([v[amp_index(x, 0)], v[amp_index(x, 1)]]);
            out[amp_index(x, 0)] = phase * w[0];
            out[amp_index(x, 1)] = phase * w[1];
        }
        out
    }
}

/// Builds the walk that consumes each vertex's frame and ships the results
/// to the neighbors: `U = Σ_x (|e₁ at x+1⟩⟨η₁ at x| + |e₂ at x−1⟩⟨η₂ at x|)`.
pub fn build_from_frames(frames: &[LocalFrame]) -> Result<CycleWalk, WalkError> {
    let n = frames.len();
    if n < 3 {
        return Err(WalkError::CycleTooShort(n));
    }
    let mut m = CMat::zeros(2 * n);
    for (x, frame) in frames.iter().enumerate() {
        let eta1 = frame.eta1();
        let eta2 = frame.eta2();
        let forward = amp_index(next_vertex(x, n), 0);
        let backward = amp_index(prev_vertex(x, n), 1);
        m[(forward, amp_index(x, 0))] = eta1[0].conj();
        m[(forward, amp_index(x, 1))] = eta1[1].conj();
        m[(backward, amp_index(x, 0))] = eta2[0].conj();
        m[(backward, amp_index(x, 1))] = eta2[1].conj();
    }
    CycleWalk::new(n, m)
}

/// Rotates each vertex's coin basis so the walk's arriving edge vectors
/// become `e₁` (from `x−1`) and `e₂` (from `x+1`), and returns the local
/// frames of the rotated walk.
///
/// The returned gauge `W` (global phase 0) satisfies
/// `build_from_frames(frames) = W U W†` up to rounding; the frames are read
/// off the walk's own edge vectors, so the decomposition is deterministic.
pub fn extract_frames(walk: &CycleWalk) -> Result<(Vec<LocalFrame>, GaugeTransform), WalkError> {
    let n = walk.n();
    let u = walk.matrix();
    let adjoint = u.adjoint();

    // Arriving edge vectors ξ at each vertex: index 0 for the edge from x−1,
    // index 1 for the edge from x+1, each the top left-singular vector of
    // the corresponding incoming block.
    let mut xi: Vec<[[C64; 2]; 2]> = Vec::with_capacity(n);
    for x in 0..n {
        let mut pair = [[C64::ZERO; 2]; 2];
        for (slot, from) in [prev_vertex(x, n), next_vertex(x, n)].into_iter().enumerate() {
            let s = svd2(&u.block2(x, from));
            if s.sigma[1] > RANK_EPS || s.sigma[0] <= RANK_EPS {
                return Err(WalkError::WrongBlockRank {
                    terminus: x,
                    origin: from,
                    found: s.sigma.iter().filter(|&&sv| sv > RANK_EPS).count(),
                    expected: 1,
                });
            }
            pair[slot] = s.left[0];
        }
        xi.push(pair);
    }

    // Departing edge vectors ζ = U†ξ, each supported on its origin block.
    let mut zeta: Vec<[[C64; 2]; 2]> = Vec::with_capacity(n);
    for x in 0..n {
        zeta.push([
            pull_back(&adjoint, x, xi[x][0], prev_vertex(x, n))?,
            pull_back(&adjoint, x, xi[x][1], next_vertex(x, n))?,
        ]);
    }

    let mut frames = Vec::with_capacity(n);
    let mut blocks = Vec::with_capacity(n);
    for x in 0..n {
        let w = Mat2([
            [xi[x][0][0].conj(), xi[x][0][1].conj()],
            [xi[x][1][0].conj(), xi[x][1][1].conj()],
        ]);
        // η vectors at x are the departing vectors of the two edges leaving
        // x, rotated into the new coin basis.
        let eta1 = w.mulvec(zeta[next_vertex(x, n)][0]);
        let eta2 = w.mulvec(zeta[prev_vertex(x, n)][1]);
        frames.push(LocalFrame::from_vectors(eta1, eta2)?);
        blocks.push(w);
    }
    Ok((frames, GaugeTransform::new(blocks, Angle::ZERO)?))
}

/// Haar-distributed 2×2 unitary via the explicit parameterization
/// `e^{iφ} [[e^{iψ}cos t, e^{iχ}sin t], [−e^{−iχ}sin t, e^{−iψ}cos t]]`
/// with `cos²t` uniform on `[0, 1)` and the three phases uniform on
/// `[0, 2π)`.
pub fn haar_unitary2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let phi = TAU * rng.random::<f64>();
    let psi = TAU * rng.random::<f64>();
    let chi = TAU * rng.random::<f64>();
    let cos_sq = rng.random::<f64>();
    let ct = cos_sq.sqrt();
    let st = (1.0 - cos_sq).sqrt();
    let global = C64::from_polar(1.0, phi);
    Mat2([
        [
            global * C64::from_polar(ct, psi),
            global * C64::from_polar(st, chi),
        ],
        [
            -global * C64::from_polar(st, -chi),
            global * C64::from_polar(ct, -psi),
        ],
    ])
}

/// Uniformly random gauge: independent Haar blocks plus a uniform global
/// phase.
pub fn random_gauge<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<GaugeTransform, WalkError> {
    if n < 3 {
        return Err(WalkError::CycleTooShort(n));
    }
    let blocks = (0..n).map(|_| haar_unitary2(rng)).collect();
    GaugeTransform::new(blocks, Angle::wrap(TAU * rng.random::<f64>()))
}

/// Seeded random walk: per-vertex frames drawn as the columns of Haar 2×2
/// unitaries (ChaCha8 keyed by `seed`, so results are stable across runs and
/// platforms). With `scramble`, a random gauge from the same stream is
/// applied afterwards, producing an equivalent walk with dense-looking
/// blocks.
pub fn random_cycle_walk(n: usize, seed: u64, scramble: bool) -> Result<CycleWalk, WalkError> {
    if n < 3 {
        return Err(WalkError::CycleTooShort(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frames = Vec::with_capacity(n);
    for _ in 0..n {
        let u = haar_unitary2(&mut rng);
        frames.push(LocalFrame::from_vectors(
            [u.0[0][0], u.0[1][0]],
            [u.0[0][1], u.0[1][1]],
        )?);
    }
    let walk = build_from_frames(&frames)?;
    if scramble {
        random_gauge(n, &mut rng)?.apply(&walk)
    } else {
        Ok(walk)
    }
}

/// Seeded random walk using one shared frame at every vertex; the result
/// commutes with the cyclic shift of vertices by construction.
pub fn random_translation_invariant(n: usize, seed: u64) -> Result<CycleWalk, WalkError> {
    if n < 3 {
        return Err(WalkError::CycleTooShort(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar_unitary2(&mut rng);
    let frame = LocalFrame::from_vectors([u.0[0][0], u.0[1][0]], [u.0[0][1], u.0[1][1]])?;
    build_from_frames(&vec![frame; n])
}
