//! Combined spatial-reflection symmetries and the skin-effect verdict.
//!
//! A candidate operator has the form `X (x) R`, where `X` is a 2x2 internal
//! factor acting on the Nambu index and `R` reflects the chain, `n -> L - n + 1`,
//! optionally with a staggered sign `(-1)^n`. If some candidate commutes with an
//! irreducible Hamiltonian, bulk states cannot all pile up at one end, so the
//! skin effect is blocked.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{pauli, ComplexMatrix, ONE};

/// Default tolerance on the normalized commutator residual.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const RESIDUAL_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InternalFactor {
    #[serde(rename = "sx")]
    SigmaX,
    #[serde(rename = "sy")]
    SigmaY,
    #[serde(rename = "sz")]
    SigmaZ,
    #[serde(rename = "id")]
    Identity,
}

impl InternalFactor {
    pub const ALL: [InternalFactor; 4] =
        [InternalFactor::SigmaY, InternalFactor::SigmaX, InternalFactor::SigmaZ, InternalFactor::Identity];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            InternalFactor::SigmaX => pauli::sigma_x(),
            InternalFactor::SigmaY => pauli::sigma_y(),
            InternalFactor::SigmaZ => pauli::sigma_z(),
            InternalFactor::Identity => pauli::identity(),
        }
    }
}

impl fmt::Display for InternalFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InternalFactor::SigmaX => "sx",
            InternalFactor::SigmaY => "sy",
            InternalFactor::SigmaZ => "sz",
            InternalFactor::Identity => "id",
        })
    }
}

/// A candidate combined-reflection operator `internal (x) R`.
#[derive(Clone, Debug)]
pub struct SymmetryOp {
    pub matrix: ComplexMatrix,
    pub internal: InternalFactor,
    pub spatial_signed: bool,
    pub sites: usize,
}

impl SymmetryOp {
    pub fn label(&self) -> CandidateLabel {
        CandidateLabel { internal: self.internal, staggered: self.spatial_signed }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateLabel {
    pub internal: InternalFactor,
    pub staggered: bool,
}

/// `R_{n, L-n+1} = (-1)^n` (staggered) or `1`, indices 1-based.
pub fn build_reflection(sites: usize, staggered: bool) -> Result<ComplexMatrix> {
    if sites < 2 {
        return Err(Error::NonPositiveSize(sites));
    }
    let mut r = ComplexMatrix::zeros(sites);
    for n in 1..=sites {
        let sign = if staggered && n % 2 == 1 { -ONE } else { ONE };
        r[(n - 1, sites - n)] = sign;
    }
    Ok(r)
}

pub fn build_combined(internal: InternalFactor, sites: usize, staggered: bool) -> Result<SymmetryOp> {
    let r = build_reflection(sites, staggered)?;
    Ok(SymmetryOp {
        matrix: internal.matrix().kron(&r),
        internal,
        spatial_signed: staggered,
        sites,
    })
}

/// The eight candidates `{sy, sx, sz, id} x {staggered, plain}`, with the
/// particle-hole reflection `sy (x) R_staggered` first.
pub fn default_candidates(sites: usize) -> Result<Vec<SymmetryOp>> {
    let mut out = Vec::with_capacity(8);
    for internal in InternalFactor::ALL {
        for staggered in [true, false] {
            out.push(build_combined(internal, sites, staggered)?);
        }
    }
    Ok(out)
}

/// `||HS - SH||_F / max(||H||_F, 1e-300)`.
pub fn commutator_residual(h: &ComplexMatrix, s: &SymmetryOp) -> Result<f64> {
    if h.dim() != s.matrix.dim() {
        return Err(Error::DimMismatch { expected: h.dim(), found: s.matrix.dim() });
    }
    let hs = h.matmul(&s.matrix)?;
    let sh = s.matrix.matmul(h)?;
    let num = hs.sub(&sh)?.frobenius_norm();
    Ok(num / h.frobenius_norm().max(RESIDUAL_FLOOR))
}

/// Connected components of the sparsity graph of `h`, each sorted ascending
/// and listed in order of their smallest index.
pub fn connected_components(h: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = h.dim();
    let threshold = 1e-14 * h.max_abs();
    let linked = |i: usize, j: usize| h[(i, j)].norm() > threshold || h[(j, i)].norm() > threshold;
    let mut component = vec![usize::MAX; n];
    let mut out = Vec::new();
    for seed in 0..n {
        if component[seed] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![seed];
        component[seed] = id;
        let mut queue = VecDeque::from([seed]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if component[j] == usize::MAX && j != i && linked(i, j) {
                    component[j] = id;
                    members.push(j);
                    queue.push_back(j);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// True (with the components) iff a simultaneous row/column permutation
/// block-diagonalizes `h`.
pub fn is_reducible(h: &ComplexMatrix) -> (bool, Vec<Vec<usize>>) {
    let components = connected_components(h);
    (components.len() > 1, components)
}

/// Checks that `s` factorizes as `internal (x) P` with `P` supported exactly on
/// the anti-diagonal, i.e. that it maps site `i` to site `L - i + 1`.
///
/// Returns `Ok(false)` for a factorizable operator whose site permutation is not
/// the reflection, and `MalformedOperator` when no such factorization exists.
pub fn verify_reflection_structure(s: &SymmetryOp) -> Result<bool> {
    let m = &s.matrix;
    if m.dim() % 2 != 0 || m.dim() < 4 {
        return Err(Error::MalformedOperator(format!("dimension {} is not 2L with L >= 2", m.dim())));
    }
    let l = m.dim() / 2;
    let blocks = [m.block(0, 0, l), m.block(0, l, l), m.block(l, 0, l), m.block(l, l, l)];
    let scale = m.max_abs();
    if scale == 0.0 {
        return Err(Error::MalformedOperator("zero operator".into()));
    }
    let tol = 1e-12 * scale;

    // Pick the entry of largest magnitude as the pivot of the site factor.
    let (pivot_block, pivot) = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, blk)| (0..l * l).map(move |k| (b, k, blk.entries()[k].norm())))
        .max_by(|a, b| a.2.total_cmp(&b.2))
        .map(|(b, k, _)| (b, k))
        .expect("nonempty");
    let site = blocks[pivot_block].scale(ONE / blocks[pivot_block].entries()[pivot]);
    for blk in &blocks {
        let coeff = blk.entries()[pivot];
        let resid = blk.sub(&site.scale(coeff))?.max_abs();
        if resid > tol {
            return Err(Error::MalformedOperator("blocks are not proportional to a common site factor".into()));
        }
    }

    // The site factor must be a (phased) permutation matrix.
    let site_tol = 1e-12 * site.max_abs();
    for i in 0..l {
        let row_nnz = (0..l).filter(|&j| site[(i, j)].norm() > site_tol).count();
        let col_nnz = (0..l).filter(|&j| site[(j, i)].norm() > site_tol).count();
        if row_nnz != 1 || col_nnz != 1 {
            return Err(Error::MalformedOperator(format!("site factor is not a permutation (row/col {i})")));
        }
    }
    Ok((0..l).all(|i| site[(i, l - 1 - i)].norm() > site_tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    NhseBlocked,
    NhseExpected,
    InapplicableReducible,
    NoSymmetryFound,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Outcome of the symmetry test.
///
/// `residual` is the commutator residual of the passing candidate for
/// [`VerdictKind::NhseBlocked`], otherwise the smallest residual among the
/// candidates that have reflection structure (`candidate` names it).
/// `NhseExpected` is a prediction from the absence of a symmetry, not a
/// measurement; cross-check it with [`crate::spectra::skin_metrics`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub residual: Option<f64>,
    pub candidate: Option<CandidateLabel>,
    pub components: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

pub fn theorem_verdict(h: &ComplexMatrix, candidates: &[SymmetryOp], tol: f64) -> Result<Verdict> {
    if !(tol > 0.0) {
        return Err(Error::InvalidThreshold { name: "tol", value: tol });
    }
    for s in candidates {
        if s.matrix.dim() != h.dim() {
            return Err(Error::DimMismatch { expected: h.dim(), found: s.matrix.dim() });
        }
    }
    let (reducible, components) = is_reducible(h);
    if reducible {
        return Ok(Verdict {
            kind: VerdictKind::InapplicableReducible,
            residual: None,
            candidate: None,
            components,
            note: Some("matrix splits into independent blocks; the criterion needs an irreducible matrix".into()),
        });
    }
    if candidates.is_empty() {
        return Ok(Verdict {
            kind: VerdictKind::NoSymmetryFound,
            residual: None,
            candidate: None,
            components: Vec::new(),
            note: Some("no candidate operators supplied".into()),
        });
    }
    let mut best: Option<(f64, CandidateLabel)> = None;
    for s in candidates {
        if !verify_reflection_structure(s)? {
            continue;
        }
        let r = commutator_residual(h, s)?;
        if r <= tol {
            return Ok(Verdict {
                kind: VerdictKind::NhseBlocked,
                residual: Some(r),
                candidate: Some(s.label()),
                components: Vec::new(),
                note: None,
            });
        }
        if best.is_none_or(|(b, _)| r < b) {
            best = Some((r, s.label()));
        }
    }
    Ok(Verdict {
        kind: VerdictKind::NhseExpected,
        residual: best.map(|b| b.0),
        candidate: best.map(|b| b.1),
        components: Vec::new(),
        note: Some("symmetry-based prediction: no candidate commutes; confirm with real-space diagnostics".into()),
    })
}

/// Convenience: `S^2` compared against `+I` and `-I`; returns the sign when
/// `S^2` is a signed identity within `tol`.
pub fn square_sign(s: &SymmetryOp, tol: f64) -> Option<f64> {
    let sq = s.matrix.matmul(&s.matrix).ok()?;
    let id = ComplexMatrix::identity(sq.dim());
    if sq.sub(&id).ok()?.max_abs() <= tol {
        Some(1.0)
    } else if sq.add(&id).ok()?.max_abs() <= tol {
        Some(-1.0)
    } else {
        None
    }
}
