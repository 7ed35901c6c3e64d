use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{vec_norm, ComplexMatrix};

/// Two eigenvalues closer than this (relative to `max(1, max |E|)`) make
/// left/right matching ambiguous.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Eigenvalues with unit-norm right eigenvectors, in solver order.
#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<Complex64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl Eigenpairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same states, reordered by `(Re E, Im E)`.
    pub fn sorted(mut self) -> Self {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| lexicographic(self.values[a], self.values[b]));
        self.values = order.iter().map(|&i| self.values[i]).collect();
        self.vectors = order.iter().map(|&i| std::mem::take(&mut self.vectors[i])).collect();
        self
    }
}

/// Eigenvalues with biorthonormal right (columns) and left (rows) eigenvectors:
/// `left[i] . right[j] = delta_ij`, `left[i] H = E_i left[i]`.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub pairs: Eigenpairs,
    pub left: Vec<Vec<Complex64>>,
    /// Largest distance between an eigenvalue of `H` and the conjugate of its
    /// matched eigenvalue of `H^dag`.
    pub pairing_residual: f64,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.pairs.values
    }

    pub fn right(&self) -> &[Vec<Complex64>] {
        &self.pairs.vectors
    }

    /// `max_ij |<left_i|right_j> - delta_ij|`.
    pub fn biorthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, l) in self.left.iter().enumerate() {
            for (j, r) in self.right().iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(l, r) - target).norm());
            }
        }
        worst
    }
}

pub(crate) fn lexicographic(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Plain bilinear product `sum_k a_k b_k`.
#[inline]
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Diagonal similarity `D^-1 H D` that equalizes the off-diagonal row and
/// column norms of every index (Osborne iteration). Strongly non-normal chains
/// with asymmetric hopping lose most of their eigenvalue accuracy without it.
fn balance(h: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>) {
    let n = h.dim();
    let mut a = h.clone();
    let mut scale = vec![1.0; n];
    for _ in 0..1000 {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                c += a[(j, i)].norm_sqr();
                r += a[(i, j)].norm_sqr();
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let f = (r / c).sqrt().sqrt();
            if (f - 1.0).abs() > 1e-3 {
                done = false;
                scale[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
    (a, scale)
}

pub fn eigenvalues(h: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !h.is_finite() {
        return Err(Error::NonFinite("matrix entry"));
    }
    let (b, _) = balance(h);
    b.to_faer().eigenvalues().map_err(|_| Error::ConvergenceFailure)
}

/// Right eigenpairs only. Never fails on degenerate spectra, which makes it the
/// right tool for real-space diagnostics of chains with Majorana pairs.
pub fn eigen_right(h: &ComplexMatrix) -> Result<Eigenpairs> {
    if !h.is_finite() {
        return Err(Error::NonFinite("matrix entry"));
    }
    let n = h.dim();
    let (b, scale) = balance(h);
    let evd = b.to_faer().eigen().map_err(|_| Error::ConvergenceFailure)?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values: Vec<Complex64> = (0..n).map(|i| s[i]).collect();
    let mut vectors = Vec::with_capacity(n);
    for j in 0..n {
        let mut v: Vec<Complex64> = (0..n).map(|i| u[(i, j)] * scale[i]).collect();
        let norm = vec_norm(&v);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ConvergenceFailure);
        }
        v.iter_mut().for_each(|z| *z /= norm);
        vectors.push(v);
    }
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::ConvergenceFailure);
    }
    Ok(Eigenpairs { values, vectors })
}

/// Full biorthogonal decomposition. Left eigenvectors come from the
/// eigendecomposition of `H^dag`, matched to the right eigenvalues by nearest
/// conjugated eigenvalue.
pub fn eigendecompose(h: &ComplexMatrix) -> Result<EigenSystem> {
    let pairs = eigen_right(h)?;
    let n = pairs.len();
    let scale = pairs.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = DEGENERACY_TOL * scale;
    for i in 0..n {
        for j in i + 1..n {
            let gap = (pairs.values[i] - pairs.values[j]).norm();
            if gap < tol {
                return Err(Error::DegenerateAmbiguity { first: i, second: j, gap });
            }
        }
    }

    let adjoint = eigen_right(&h.adjoint())?;
    let mut used = vec![false; n];
    let mut left = Vec::with_capacity(n);
    let mut pairing_residual: f64 = 0.0;
    for (i, &value) in pairs.values.iter().enumerate() {
        let (j, dist) = adjoint
            .values
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, mu)| (j, (mu.conj() - value).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::ConvergenceFailure)?;
        used[j] = true;
        pairing_residual = pairing_residual.max(dist);
        // <w| = w^dag is a left eigenvector of H with eigenvalue conj(mu).
        let mut row: Vec<Complex64> = adjoint.vectors[j].iter().map(|z| z.conj()).collect();
        let overlap = dot(&row, &pairs.vectors[i]);
        if overlap.norm() < f64::EPSILON.sqrt() * vec_norm(&row) {
            return Err(Error::DegenerateAmbiguity { first: i, second: i, gap: overlap.norm() });
        }
        row.iter_mut().for_each(|z| *z /= overlap);
        left.push(row);
    }
    Ok(EigenSystem { pairs, left, pairing_residual })
}

/// One-sided set distance between a spectrum and its negation, using greedy
/// nearest-neighbour matching.
pub fn negation_set_distance(values: &[Complex64]) -> f64 {
    let mut used = vec![false; values.len()];
    let mut worst: f64 = 0.0;
    for &e in values {
        let best = values
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, f)| (j, (e + f).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((j, d)) = best {
            used[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// `||H v - E v|| / ||v||` for every eigenpair, maximized.
pub fn max_residual(h: &ComplexMatrix, pairs: &Eigenpairs) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (e, v) in pairs.values.iter().zip(&pairs.vectors) {
        let hv = h.mul_vec(v)?;
        let r: Vec<Complex64> = hv.iter().zip(v).map(|(a, b)| a - e * b).collect();
        worst = worst.max(vec_norm(&r) / vec_norm(v));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ONE, ZERO};

    #[test]
    fn jordan_block_is_rejected() {
        let j = ComplexMatrix::from_rows([[ZERO, ONE], [ZERO, ZERO]]);
        let err = eigendecompose(&j).unwrap_err();
        assert!(matches!(err, Error::DegenerateAmbiguity { .. } | Error::ConvergenceFailure));
    }

    #[test]
    fn non_normal_two_by_two() {
        let m = ComplexMatrix::from_real_rows([[1.0, 5.0], [0.0, -2.0]]);
        let es = eigendecompose(&m).unwrap();
        assert!(es.biorthogonality_defect() < 1e-12);
        assert!(es.pairing_residual < 1e-12);
        assert!(max_residual(&m, &es.pairs).unwrap() < 1e-12);
        for (l, e) in es.left.iter().zip(es.values()) {
            // l H = E l
            let lh: Vec<Complex64> = (0..2).map(|j| l[0] * m[(0, j)] + l[1] * m[(1, j)]).collect();
            for k in 0..2 {
                assert!((lh[k] - e * l[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn balancing_is_a_similarity() {
        let m = ComplexMatrix::from_real_rows([[1.0, 1e6, 0.0], [1e-6, 2.0, 1e4], [0.0, 1e-4, 3.0]]);
        let (b, d) = balance(&m);
        for i in 0..3 {
            for j in 0..3 {
                let back = b[(i, j)] * d[i] / d[j];
                assert!((back - m[(i, j)]).norm() <= 1e-14 * m[(i, j)].norm().max(1.0));
            }
        }
        assert!(b.max_abs() < 1e3);
    }

    #[test]
    fn sorted_is_lexicographic() {
        let m = ComplexMatrix::from_real_rows([[3.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]]);
        let p = eigen_right(&m).unwrap().sorted();
        let re: Vec<f64> = p.values.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![-1.0, 2.0, 3.0]);
        assert!((p.vectors[0][1].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn negation_distance() {
        let v = [Complex64::new(1.0, 0.5), Complex64::new(-1.0, -0.5)];
        assert_eq!(negation_set_distance(&v), 0.0);
        let w = [Complex64::new(1.0, 0.0), Complex64::new(-0.5, 0.0)];
        assert!((negation_set_distance(&w) - 0.5).abs() < 1e-15);
    }
}
