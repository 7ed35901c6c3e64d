//! Non-Bloch band theory for the `V = 0` chain.
//!
//! Plane-wave components `psi_n = beta^n phi` of a bulk eigenstate with energy
//! `E` satisfy `det[H(beta) - E] = 0` with
//!
//! ```text
//! H(beta) = (gamma/2)(1/beta - beta) I - t (1/beta + beta) sz + i delta (1/beta - beta) sy
//! ```
//!
//! Substituting `x = beta - 1/beta` turns the quartic in `beta` into a quadratic
//! in `x`,
//!
//! ```text
//! a x^2 + E gamma x + (E^2 - 4 t^2) = 0,    a = delta^2 - t^2 + gamma^2/4,
//! ```
//!
//! and each root `x` yields a pair `beta^2 - x beta - 1 = 0` whose product is
//! `-1`. The pair structure pins the two middle moduli of the quartet to the
//! unit circle whenever they are equal, which is why the chain has no skin
//! effect.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ONE, ZERO};
use crate::model::ModelSpec;

pub type Mat2 = [[Complex64; 2]; 2];

/// Relative tolerance for the equal-middle-moduli test.
pub const CONTINUUM_TOL: f64 = 1e-6;

/// Minimum band gap along a Wilson loop.
pub const MIN_LOOP_GAP: f64 = 1e-8;

fn check_model(spec: &ModelSpec) -> Result<()> {
    if spec.big_v != 0.0 {
        return Err(Error::UnsupportedPotential(spec.big_v));
    }
    for (name, v) in [("t", spec.t), ("gamma", spec.gamma), ("delta", spec.delta)] {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    Ok(())
}

fn bloch2(spec: &ModelSpec, beta: Complex64) -> Mat2 {
    let inv = beta.inv();
    let y = inv - beta;
    let s = inv + beta;
    let diag = 0.5 * spec.gamma * y;
    let ts = spec.t * s;
    let pair = spec.delta * y;
    [[diag - ts, pair], [-pair, diag + ts]]
}

/// The 2x2 non-Bloch matrix `H(beta)`.
pub fn bloch_matrix(spec: &ModelSpec, beta: Complex64) -> Result<ComplexMatrix> {
    check_model(spec)?;
    if beta == ZERO {
        return Err(Error::ZeroBeta);
    }
    Ok(ComplexMatrix::from_rows(bloch2(spec, beta)))
}

/// Left side of the characteristic relation,
/// `a (beta^2 + beta^-2 - 2) + E gamma (beta - 1/beta) + E^2 - 4 t^2`.
pub fn char_poly_residual(spec: &ModelSpec, energy: Complex64, beta: Complex64) -> Result<Complex64> {
    if beta == ZERO {
        return Err(Error::ZeroBeta);
    }
    let inv = beta.inv();
    let x = beta - inv;
    Ok(spec.leading_coeff() * (beta * beta + inv * inv - 2.0)
        + energy * spec.gamma * x
        + energy * energy
        - 4.0 * spec.t * spec.t)
}

/// `det[H(beta) - E]`, evaluated from the matrix entries.
pub fn bloch_determinant(spec: &ModelSpec, energy: Complex64, beta: Complex64) -> Result<Complex64> {
    let m = bloch_matrix(spec, beta)?;
    Ok((m[(0, 0)] - energy) * (m[(1, 1)] - energy) - m[(0, 1)] * m[(1, 0)])
}

/// Eigenvalues of `H(e^{ik})` at `k = 2 pi m / n`, `m = 0..n`, from the
/// closed-form 2x2 eigenvalues. Sorted by `(Re E, Im E)`.
pub fn bloch_spectrum(spec: &ModelSpec, n: usize) -> Result<Vec<Complex64>> {
    check_model(spec)?;
    let mut out = Vec::with_capacity(2 * n);
    for m in 0..n {
        let beta = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64);
        let (vals, _, _) = eigen2(&bloch2(spec, beta));
        out.extend(vals);
    }
    out.sort_by(|a, b| crate::spectra::lexicographic(*a, *b));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContinuumCase {
    /// `|b1+| <= |b1-| = |b2-| <= |b2+|`
    Case1,
    /// `|b1-| <= |b1+| = |b2+| <= |b2-|`
    Case2,
    Neither,
}

impl fmt::Display for ContinuumCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContinuumCase::Case1 => "case1",
            ContinuumCase::Case2 => "case2",
            ContinuumCase::Neither => "neither",
        })
    }
}

/// The four non-Bloch roots at one energy.
#[derive(Clone, Debug)]
pub struct BetaQuartet {
    pub energy: Complex64,
    pub x_plus: Complex64,
    pub x_minus: Complex64,
    /// `[beta_1+, beta_2+]`, `|beta_1+| <= |beta_2+|`.
    pub plus: [Complex64; 2],
    /// `[beta_1-, beta_2-]`, `|beta_1-| <= |beta_2-|`.
    pub minus: [Complex64; 2],
    pub sorted_moduli: [f64; 4],
    pub continuum_case: ContinuumCase,
    /// `|m2 - m3|` of the sorted moduli.
    pub mid_modulus_gap: f64,
    /// Set when `x+ = x-` or a branch has a double root.
    pub repeated_roots: bool,
}

impl BetaQuartet {
    /// Roots in column order `(1+, 1-, 2-, 2+)`.
    pub fn ordered(&self) -> [Complex64; 4] {
        [self.plus[0], self.minus[0], self.minus[1], self.plus[1]]
    }

    pub fn middle_moduli(&self) -> (f64, f64) {
        (self.sorted_moduli[1], self.sorted_moduli[2])
    }

    /// `max(|m2 - 1|, |m3 - 1|)`.
    pub fn unit_circle_deviation(&self) -> f64 {
        let (a, b) = self.middle_moduli();
        (a - 1.0).abs().max((b - 1.0).abs())
    }

    pub fn pair_products(&self) -> (Complex64, Complex64) {
        (self.plus[0] * self.plus[1], self.minus[0] * self.minus[1])
    }
}

/// Roots of `a z^2 + b z + c = 0`, in the order `((-b + sqrt D)/2a, (-b - sqrt D)/2a)`,
/// each computed without cancellation.
fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let sqrt_d = (b * b - 4.0 * a * c).sqrt();
    // Whichever of -b +- sqrt(D) avoids cancellation is computed directly; the
    // other follows from the product c / a.
    if (b.conj() * sqrt_d).re >= 0.0 {
        let minus = (-b - sqrt_d) / (2.0 * a);
        let plus = if minus == ZERO { ZERO } else { c / (a * minus) };
        (plus, minus)
    } else {
        let plus = (-b + sqrt_d) / (2.0 * a);
        let minus = if plus == ZERO { ZERO } else { c / (a * plus) };
        (plus, minus)
    }
}

/// Roots of `beta^2 - x beta - 1 = 0`, ordered by modulus then phase.
fn beta_pair(x: Complex64) -> [Complex64; 2] {
    let (p, q) = quadratic_roots(ONE, -x, -ONE);
    order_pair(p, q)
}

fn order_pair(p: Complex64, q: Complex64) -> [Complex64; 2] {
    let (mp, mq) = (p.norm(), q.norm());
    let tie = (mp - mq).abs() <= 1e-12 * mp.max(mq);
    let p_first = if tie { p.arg() <= q.arg() } else { mp < mq };
    if p_first {
        [p, q]
    } else {
        [q, p]
    }
}

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.max(b)
}

fn classify(plus: &[Complex64; 2], minus: &[Complex64; 2], tol: f64) -> ContinuumCase {
    let (p1, p2) = (plus[0].norm(), plus[1].norm());
    let (m1, m2) = (minus[0].norm(), minus[1].norm());
    let le = |a: f64, b: f64| a <= b * (1.0 + tol);
    if le(p1, m1) && rel_eq(m1, m2, tol) && le(m2, p2) {
        ContinuumCase::Case1
    } else if le(m1, p1) && rel_eq(p1, p2, tol) && le(p2, m2) {
        ContinuumCase::Case2
    } else {
        ContinuumCase::Neither
    }
}

/// Solves for the four roots `beta` at energy `E` through the `x = beta - 1/beta`
/// reduction.
pub fn solve_beta(spec: &ModelSpec, energy: Complex64) -> Result<BetaQuartet> {
    let a = spec.leading_coeff();
    let scale = spec.t.powi(2).max(spec.delta.powi(2)).max(spec.gamma.powi(2)).max(f64::MIN_POSITIVE);
    if a.abs() <= 1e-14 * scale {
        return Err(Error::DegenerateLeadingCoeff);
    }
    let a = Complex64::new(a, 0.0);
    let b = energy * spec.gamma;
    let c = energy * energy - 4.0 * spec.t * spec.t;
    let (x_plus, x_minus) = quadratic_roots(a, b, c);
    let plus = beta_pair(x_plus);
    let minus = beta_pair(x_minus);

    let mut sorted_moduli = [plus[0].norm(), plus[1].norm(), minus[0].norm(), minus[1].norm()];
    sorted_moduli.sort_by(f64::total_cmp);
    let x_scale = x_plus.norm().max(x_minus.norm()).max(1.0);
    let repeated_roots = (x_plus - x_minus).norm() <= 1e-12 * x_scale
        || (x_plus * x_plus + 4.0).norm() <= 1e-12 * x_scale
        || (x_minus * x_minus + 4.0).norm() <= 1e-12 * x_scale;

    Ok(BetaQuartet {
        energy,
        x_plus,
        x_minus,
        plus,
        minus,
        sorted_moduli,
        continuum_case: classify(&plus, &minus, CONTINUUM_TOL),
        mid_modulus_gap: (sorted_moduli[2] - sorted_moduli[1]).abs(),
        repeated_roots,
    })
}

/// Roots when `delta^2 - t^2 + gamma^2/4 = 0`: the quadratic in `x` is linear and
/// only one branch survives.
#[derive(Clone, Debug)]
pub struct ReducedBetaPair {
    pub energy: Complex64,
    pub x: Complex64,
    pub roots: [Complex64; 2],
}

pub fn solve_beta_reduced(spec: &ModelSpec, energy: Complex64) -> Result<ReducedBetaPair> {
    let b = energy * spec.gamma;
    if b == ZERO {
        return Err(Error::DegenerateLeadingCoeff);
    }
    let x = -(energy * energy - 4.0 * spec.t * spec.t) / b;
    Ok(ReducedBetaPair { energy, x, roots: beta_pair(x) })
}

/// Which branch occupies the middle of the modulus ordering, ignoring whether
/// the middle moduli are equal. `Case1` is `|b1+| <= |b1-| <= |b2-| <= |b2+|`,
/// `Case2` its mirror; `Neither` if the branches interleave.
pub fn branch_ordering(q: &BetaQuartet) -> ContinuumCase {
    let (p1, p2) = (q.plus[0].norm(), q.plus[1].norm());
    let (m1, m2) = (q.minus[0].norm(), q.minus[1].norm());
    let le = |a: f64, b: f64| a <= b * (1.0 + CONTINUUM_TOL);
    if le(p1, m1) && le(m2, p2) {
        ContinuumCase::Case1
    } else if le(m1, p1) && le(p2, m2) {
        ContinuumCase::Case2
    } else {
        ContinuumCase::Neither
    }
}

/// Recomputes the continuum classification of an existing quartet.
pub fn continuum_condition(q: &BetaQuartet) -> ContinuumCase {
    classify(&q.plus, &q.minus, CONTINUUM_TOL)
}

/// Roots of the expanded quartic
/// `a b^4 + E gamma b^3 + (E^2 - 4t^2 - 2a) b^2 - E gamma b + a = 0`
/// as eigenvalues of its companion matrix.
pub fn companion_roots(spec: &ModelSpec, energy: Complex64) -> Result<[Complex64; 4]> {
    let a = spec.leading_coeff();
    if a == 0.0 {
        return Err(Error::DegenerateLeadingCoeff);
    }
    let eg = energy * spec.gamma;
    let coeffs = [
        eg / a,
        (energy * energy - 4.0 * spec.t * spec.t - 2.0 * a) / a,
        -eg / a,
        ONE,
    ];
    // monic z^4 + c3 z^3 + c2 z^2 + c1 z + c0
    let mut m = ComplexMatrix::zeros(4);
    for (j, c) in coeffs.iter().enumerate() {
        m[(0, j)] = -c;
    }
    for i in 1..4 {
        m[(i, i - 1)] = ONE;
    }
    let vals = crate::spectra::eigenvalues(&m)?;
    Ok([vals[0], vals[1], vals[2], vals[3]])
}

/// Largest distance under greedy nearest matching of two root multisets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("lengths match");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct GbzRow {
    pub energy: (f64, f64),
    pub sorted_moduli: [f64; 4],
    pub case: ContinuumCase,
    pub mid_gap: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GbzReport {
    pub rows: Vec<GbzRow>,
}

impl GbzReport {
    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.deviation).fold(0.0, f64::max)
    }
}

/// Modulus summary of the quartet at one energy.
pub fn gbz_row(spec: &ModelSpec, energy: Complex64) -> Result<GbzRow> {
    check_model(spec)?;
    let q = solve_beta(spec, energy)?;
    Ok(GbzRow {
        energy: (energy.re, energy.im),
        sorted_moduli: q.sorted_moduli,
        case: q.continuum_case,
        mid_gap: q.mid_modulus_gap,
        deviation: q.unit_circle_deviation(),
    })
}

/// Middle moduli and their deviation from the unit circle for each energy.
pub fn gbz_modulus_report(spec: &ModelSpec, energies: &[Complex64]) -> Result<GbzReport> {
    check_model(spec)?;
    if energies.is_empty() {
        return Err(Error::NoStates);
    }
    let rows = energies.iter().map(|&e| gbz_row(spec, e)).collect::<Result<Vec<_>>>()?;
    Ok(GbzReport { rows })
}

/// A family of 2x2 Bloch matrices parameterized by `beta`.
pub trait TwoBandBloch {
    fn at(&self, beta: Complex64) -> Mat2;
}

impl<F: Fn(Complex64) -> Mat2> TwoBandBloch for F {
    fn at(&self, beta: Complex64) -> Mat2 {
        self(beta)
    }
}

/// `H(beta)` of a validated `V = 0` chain.
#[derive(Clone, Debug)]
pub struct KitaevBloch(ModelSpec);

impl KitaevBloch {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        check_model(spec)?;
        Ok(Self(spec.clone()))
    }
}

impl TwoBandBloch for KitaevBloch {
    fn at(&self, beta: Complex64) -> Mat2 {
        bloch2(&self.0, beta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    /// Eigenvalue with the larger real part.
    Plus,
    Minus,
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::Plus => "plus",
            Band::Minus => "minus",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZakResult {
    pub band: Band,
    /// In `(-pi, pi]`.
    pub phase: f64,
    #[serde(rename = "grid")]
    pub grid_points: usize,
    /// Largest cross overlap `|<u_L(band)|u_R(other band)>|` along the loop.
    pub residual: f64,
}

/// Eigenvalues `[plus, minus]` with matching right (column) and left (row)
/// eigenvectors of a 2x2 matrix.
fn eigen2(m: &Mat2) -> ([Complex64; 2], [[Complex64; 2]; 2], [[Complex64; 2]; 2]) {
    let [[a, b], [c, d]] = *m;
    let half_tr = 0.5 * (a + d);
    let root = (0.25 * (a - d) * (a - d) + b * c).sqrt();
    let (mut e1, mut e2) = (half_tr + root, half_tr - root);
    if crate::spectra::lexicographic(e1, e2).is_lt() {
        std::mem::swap(&mut e1, &mut e2);
    }
    let right = |l: Complex64| {
        let u = [b, l - a];
        let v = [l - d, c];
        if u[0].norm_sqr() + u[1].norm_sqr() >= v[0].norm_sqr() + v[1].norm_sqr() {
            u
        } else {
            v
        }
    };
    let left = |l: Complex64| {
        let u = [c, l - a];
        let v = [l - d, b];
        if u[0].norm_sqr() + u[1].norm_sqr() >= v[0].norm_sqr() + v[1].norm_sqr() {
            u
        } else {
            v
        }
    };
    ([e1, e2], [right(e1), right(e2)], [left(e1), left(e2)])
}

#[inline]
fn dot2(l: &[Complex64; 2], r: &[Complex64; 2]) -> Complex64 {
    l[0] * r[0] + l[1] * r[1]
}

fn wrap_phase(x: f64) -> f64 {
    x - 2.0 * PI * ((x - PI) / (2.0 * PI)).ceil()
}

/// Berry phase of a closed chain of (left, right) eigenvector pairs. Each pair
/// is biorthonormalized here, so arbitrary per-point gauges cancel.
pub(crate) fn loop_phase(frames: &[([Complex64; 2], [Complex64; 2])]) -> f64 {
    let n = frames.len();
    let normalized: Vec<([Complex64; 2], [Complex64; 2])> = frames
        .iter()
        .map(|(l, r)| {
            let s = dot2(l, r);
            ([l[0] / s, l[1] / s], *r)
        })
        .collect();
    let total: f64 = (0..n)
        .map(|k| dot2(&normalized[k].0, &normalized[(k + 1) % n].1).arg())
        .sum();
    wrap_phase(-total)
}

fn loop_frames<B: TwoBandBloch>(
    family: &B,
    band: Band,
    grid: usize,
) -> Result<(Vec<([Complex64; 2], [Complex64; 2])>, f64)> {
    let idx = match band {
        Band::Plus => 0,
        Band::Minus => 1,
    };
    let mut frames = Vec::with_capacity(grid);
    let mut cross: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    for k in 0..grid {
        let beta = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / grid as f64);
        let (vals, rights, lefts) = eigen2(&family.at(beta));
        min_gap = min_gap.min((vals[0] - vals[1]).norm());
        let (l, r) = (lefts[idx], rights[idx]);
        let s = dot2(&l, &r);
        let other = rights[1 - idx];
        let other_norm = (other[0].norm_sqr() + other[1].norm_sqr()).sqrt();
        let l_norm = (l[0].norm_sqr() + l[1].norm_sqr()).sqrt();
        cross = cross.max(dot2(&l, &other).norm() / (l_norm * other_norm).max(f64::MIN_POSITIVE));
        if s.norm() <= f64::EPSILON * l_norm * (r[0].norm_sqr() + r[1].norm_sqr()).sqrt() {
            return Err(Error::BandTouching(min_gap));
        }
        frames.push((l, r));
    }
    if min_gap < MIN_LOOP_GAP {
        return Err(Error::BandTouching(min_gap));
    }
    Ok((frames, cross))
}

/// Discretized biorthogonal Wilson loop over the unit circle `beta = e^{ik}`.
pub fn wilson_loop<B: TwoBandBloch>(family: &B, band: Band, grid: usize) -> Result<ZakResult> {
    if grid < 64 {
        return Err(Error::InvalidThreshold { name: "grid", value: grid as f64 });
    }
    let (frames, residual) = loop_frames(family, band, grid)?;
    Ok(ZakResult { band, phase: loop_phase(&frames), grid_points: grid, residual })
}

/// Non-Bloch Zak phase of one band of the `V = 0` chain.
///
/// Checks first that the continuum energies sit on `|beta| = 1`, since the loop
/// is taken over the unit circle.
pub fn zak_phase(spec: &ModelSpec, band: Band, grid: usize) -> Result<ZakResult> {
    let family = KitaevBloch::new(spec)?;
    let probes = 16;
    let mut worst: f64 = 0.0;
    for m in 0..probes {
        let k = 2.0 * PI * (m as f64 + 0.37) / probes as f64;
        let (vals, _, _) = eigen2(&family.at(Complex64::from_polar(1.0, k)));
        for e in vals {
            let q = solve_beta(spec, e)?;
            let dev = if q.continuum_case == ContinuumCase::Neither { f64::INFINITY } else { q.unit_circle_deviation() };
            worst = worst.max(dev);
        }
    }
    if worst > CONTINUUM_TOL {
        return Err(Error::GbzNotCircle(worst));
    }
    wilson_loop(&family, band, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::I;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec() -> ModelSpec {
        ModelSpec::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bloch_matrix_at_one_is_sigma_z() {
        let m = bloch_matrix(&spec(), ONE).unwrap();
        assert_eq!(m, ComplexMatrix::from_real_rows([[-2.0, 0.0], [0.0, 2.0]]));
    }

    #[test]
    fn bloch_matrix_at_i() {
        // (gamma/2)(-2i) I + sigma_y
        let m = bloch_matrix(&spec(), I).unwrap();
        let expected = ComplexMatrix::from_rows([[c(0.0, -1.5), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, -1.5)]]);
        assert!(m.sub(&expected).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn bloch_matrix_errors() {
        assert!(matches!(bloch_matrix(&spec(), ZERO), Err(Error::ZeroBeta)));
        let v = spec().with_potential(2.0, 0.0);
        assert!(matches!(bloch_matrix(&v, ONE), Err(Error::UnsupportedPotential(_))));
        assert!(matches!(char_poly_residual(&spec(), ONE, ZERO), Err(Error::ZeroBeta)));
    }

    #[test]
    fn char_poly_vanishes_at_band_bottom() {
        let r = char_poly_residual(&spec(), c(-2.0, 0.0), ONE).unwrap();
        assert_eq!(r, ZERO);
    }

    #[test]
    fn char_poly_equals_bloch_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let e = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let beta = Complex64::from_polar(rng.gen_range(0.2..3.0), rng.gen_range(-PI..PI));
            let a = char_poly_residual(&spec(), e, beta).unwrap();
            let b = bloch_determinant(&spec(), e, beta).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn roots_satisfy_characteristic_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let e = c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let q = solve_beta(&spec(), e).unwrap();
            let scale = e.norm_sqr().max(1.0);
            for b in q.ordered() {
                let r = char_poly_residual(&spec(), e, b).unwrap();
                // the relation carries beta^2 and beta^-2; measure relative to them
                let weight = scale.max(b.norm_sqr()).max(b.inv().norm_sqr());
                assert!(r.norm() <= 1e-9 * weight, "E={e} beta={b} residual={r}");
            }
        }
    }

    #[test]
    fn zero_energy_quartet_pattern() {
        let q = solve_beta(&spec(), ZERO).unwrap();
        let m = q.sorted_moduli;
        assert!((m[0] - m[1]).abs() < 1e-12 && (m[2] - m[3]).abs() < 1e-12);
        assert!((m[0] * m[3] - 1.0).abs() < 1e-12);
        let (pp, pm) = q.pair_products();
        assert!((pp + 1.0).norm() < 1e-14 && (pm + 1.0).norm() < 1e-14);
        let oracle = companion_roots(&spec(), ZERO).unwrap();
        assert!(multiset_distance(&q.ordered(), &oracle) < 1e-10);
    }

    #[test]
    fn hermitian_chain_is_on_the_unit_circle() {
        let herm = ModelSpec { gamma: 0.0, delta: 0.0, ..spec() };
        for k in [0.3, 1.1, 2.0, 2.9] {
            let e = c(-2.0 * f64::cos(k), 0.0);
            let q = solve_beta(&herm, e).unwrap();
            assert!(q.sorted_moduli.iter().all(|m| (m - 1.0).abs() < 1e-12));
            let roots = q.ordered();
            for target in [Complex64::from_polar(1.0, k), Complex64::from_polar(1.0, -k)] {
                assert!(roots.iter().any(|r| (r - target).norm() < 1e-12));
            }
            assert_ne!(continuum_condition(&q), ContinuumCase::Neither);
        }
    }

    #[test]
    fn branch_labels_are_ordered_by_modulus() {
        let q = solve_beta(&spec(), c(0.7, -1.2)).unwrap();
        assert!(q.plus[0].norm() <= q.plus[1].norm());
        assert!(q.minus[0].norm() <= q.minus[1].norm());
    }

    #[test]
    fn far_energy_is_not_continuum() {
        let q = solve_beta(&spec(), c(10.0, 10.0)).unwrap();
        assert_eq!(q.continuum_case, ContinuumCase::Neither);
        // unit pair products force one branch into the middle
        assert_ne!(branch_ordering(&q), ContinuumCase::Neither);
    }

    #[test]
    fn degenerate_leading_coefficient() {
        // delta^2 - t^2 + gamma^2/4 = 0.25 - 1 + 0.75 = 0
        let s = ModelSpec { delta: 0.5, gamma: 3f64.sqrt(), ..spec() };
        assert!(matches!(solve_beta(&s, c(0.5, 0.1)), Err(Error::DegenerateLeadingCoeff)));
        let r = solve_beta_reduced(&s, c(0.5, 0.1)).unwrap();
        for b in r.roots {
            assert!(char_poly_residual(&s, r.energy, b).unwrap().norm() < 1e-12);
        }
        assert!((r.roots[0] * r.roots[1] + 1.0).norm() < 1e-14);
    }

    #[test]
    fn negated_energy_keeps_moduli() {
        let e = c(0.8, -0.9);
        let a = solve_beta(&spec(), e).unwrap();
        let b = solve_beta(&spec(), -e).unwrap();
        for (x, y) in a.sorted_moduli.iter().zip(b.sorted_moduli) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn repeated_x_is_flagged() {
        // Discriminant E^2 gamma^2 - 4 a (E^2 - 4t^2) vanishes at
        // E^2 = -16 a t^2 / (gamma^2 - 4a).
        let s = spec();
        let a = s.leading_coeff();
        let e2 = -16.0 * a / (s.gamma * s.gamma - 4.0 * a);
        let q = solve_beta(&s, c(e2.sqrt(), 0.0)).unwrap();
        assert!(q.repeated_roots);
    }

    #[test]
    fn eigen2_left_right() {
        let m: Mat2 = [[c(1.0, 0.3), c(2.0, 0.0)], [c(-0.5, 1.0), c(0.0, -1.0)]];
        let (vals, rights, lefts) = eigen2(&m);
        for i in 0..2 {
            let r = rights[i];
            let l = lefts[i];
            for row in 0..2 {
                let mr = m[row][0] * r[0] + m[row][1] * r[1];
                assert!((mr - vals[i] * r[row]).norm() < 1e-12);
                let lm = l[0] * m[0][row] + l[1] * m[1][row];
                assert!((lm - vals[i] * l[row]).norm() < 1e-12);
            }
        }
        assert!(dot2(&lefts[0], &rights[1]).norm() < 1e-12);
    }

    #[test]
    fn wilson_loop_is_gauge_invariant() {
        let family = KitaevBloch::new(&spec()).unwrap();
        let (frames, _) = loop_frames(&family, Band::Plus, 256).unwrap();
        let base = loop_phase(&frames);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gauged: Vec<_> = frames
            .iter()
            .map(|(l, r)| {
                let gl = Complex64::from_polar(rng.gen_range(0.1..5.0), rng.gen_range(-PI..PI));
                let gr = Complex64::from_polar(rng.gen_range(0.1..5.0), rng.gen_range(-PI..PI));
                ([l[0] * gl, l[1] * gl], [r[0] * gr, r[1] * gr])
            })
            .collect();
        let diff = wrap_phase(loop_phase(&gauged) - base);
        assert!(diff.abs() < 1e-10, "{diff}");
    }

    #[test]
    fn reference_chain_zak_phase_is_pi() {
        let z = zak_phase(&spec(), Band::Plus, 1024).unwrap();
        assert!((z.phase.abs() - PI).abs() < 1e-2, "{}", z.phase);
        assert!(z.residual < 1e-12);
    }

    #[test]
    fn gapless_sigma_z_chain_reports_touching() {
        let s = ModelSpec { gamma: 0.0, delta: 0.0, ..spec() };
        assert!(matches!(zak_phase(&s, Band::Plus, 4096), Err(Error::BandTouching(_))));
    }

    #[test]
    fn massive_sigma_z_chain_is_trivial() {
        let family = |beta: Complex64| {
            let d = 3.0 - (beta + beta.inv());
            [[d, ZERO], [ZERO, -d]]
        };
        let z = wilson_loop(&family, Band::Plus, 512).unwrap();
        assert!(z.phase.abs() < 1e-12);
    }

    #[test]
    fn small_grid_is_rejected() {
        assert!(zak_phase(&spec(), Band::Plus, 32).is_err());
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
        assert!((wrap_phase(0.2) - 0.2).abs() < 1e-15);
    }
}
