//! Open-chain boundary conditions for the `V = 0` chain.
//!
//! A bulk eigenstate at energy `E` is a superposition of the four plane waves
//! `beta_j^n (phi_a^(j), phi_b^(j))`. The two end sites impose four linear
//! conditions on the amplitudes `phi_a^(j)`; a nontrivial solution requires the
//! 4x4 determinant of those conditions to vanish.
//!
//! Columns are ordered `(1+, 1-, 2-, 2+)` following the branch labels of
//! [`crate::nonbloch::BetaQuartet`]; rows are `A_j`, `B_j`, `C_j beta_j^(L-1)`
//! and `D_j beta_j^L`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::nonbloch::{branch_ordering, solve_beta, BetaQuartet, ContinuumCase};

pub const ROOT_LABELS: [&str; 4] = ["1+", "1-", "2-", "2+"];

/// Which closed form to use for the boundary coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientVariant {
    /// Coefficients re-derived from `psi_0 = psi_{L+1} = 0`. Vanishes on the
    /// exact open-chain spectrum.
    #[default]
    Rederived,
    /// Alternative closed forms with a leading `1` in the numerator of `D_j`.
    /// Kept for comparison; does not vanish on the exact spectrum.
    AsPrinted,
    /// [`CoefficientVariant::AsPrinted`] without the leading `1`.
    DropLeadingOne,
}

impl std::str::FromStr for CoefficientVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rederived" => Ok(Self::Rederived),
            "as-printed" => Ok(Self::AsPrinted),
            "drop-leading-one" => Ok(Self::DropLeadingOne),
            other => Err(Error::Config(format!("unknown coefficient variant {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryCoeffs {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

fn check(spec: &ModelSpec) -> Result<()> {
    if spec.big_v != 0.0 {
        return Err(Error::UnsupportedPotential(spec.big_v));
    }
    Ok(())
}

fn guarded(value: Complex64, scale: f64, root: &'static str, denominator: &'static str) -> Result<Complex64> {
    if !(value.norm() > 1e-12 * scale.max(1.0)) {
        return Err(Error::SingularDenominator { root, denominator });
    }
    Ok(value)
}

fn coeffs_for(
    spec: &ModelSpec,
    energy: Complex64,
    beta: Complex64,
    root: &'static str,
    variant: CoefficientVariant,
) -> Result<BoundaryCoeffs> {
    if beta.norm() == 0.0 {
        return Err(Error::ZeroBeta);
    }
    let (tp, tm, delta) = (spec.hop_right(), spec.hop_left(), spec.delta);
    let inv = beta.inv();
    let b2 = beta * beta;
    let den_scale = energy.norm() + (tp * inv).norm() + (tm * beta).norm();
    let den = guarded(energy - tp * inv - tm * beta, den_scale, root, "E - (t+g/2)/beta - (t-g/2) beta")?;
    let ratio = delta * (beta - inv) / den;

    let a = energy * beta + tp * b2 + delta * delta * (b2 - 1.0) * beta / den;
    let coeffs = match variant {
        CoefficientVariant::Rederived => BoundaryCoeffs {
            a,
            b: ratio * beta * (energy - tm * beta) - delta * b2,
            c: tm + energy * beta - delta * ratio,
            d: delta * (energy * beta - 2.0 * spec.t) / den,
        },
        CoefficientVariant::AsPrinted | CoefficientVariant::DropLeadingOne => {
            let one = if variant == CoefficientVariant::AsPrinted { 1.0 } else { 0.0 };
            BoundaryCoeffs {
                a,
                b: ratio * (energy - tm * b2) - delta * b2,
                c: tm + energy * beta - ratio,
                d: (one - delta * tp * (1.0 - inv * inv)) / den,
            }
        }
    };
    Ok(coeffs)
}

/// Boundary coefficients for the four roots, in column order `(1+, 1-, 2-, 2+)`.
pub fn boundary_coeffs(
    spec: &ModelSpec,
    energy: Complex64,
    q: &BetaQuartet,
    variant: CoefficientVariant,
) -> Result<[BoundaryCoeffs; 4]> {
    check(spec)?;
    let roots = q.ordered();
    let mut out = [BoundaryCoeffs { a: energy, b: energy, c: energy, d: energy }; 4];
    for j in 0..4 {
        out[j] = coeffs_for(spec, energy, roots[j], ROOT_LABELS[j], variant)?;
    }
    Ok(out)
}

/// `beta^n / max(1, |beta|)^L`, evaluated in log space so large `L` does not
/// overflow.
fn scaled_power(beta: Complex64, n: usize, sites: usize) -> Complex64 {
    let ln = beta.ln();
    let shift = sites as f64 * ln.re.max(0.0);
    (ln * n as f64 - shift).exp()
}

/// The boundary matrix with each column divided by `max(1, |beta_j|)^L`.
pub fn boundary_matrix(
    spec: &ModelSpec,
    energy: Complex64,
    sites: usize,
    variant: CoefficientVariant,
) -> Result<[[Complex64; 4]; 4]> {
    check(spec)?;
    if sites < 2 {
        return Err(Error::NonPositiveSize(sites));
    }
    let q = solve_beta(spec, energy)?;
    let coeffs = boundary_coeffs(spec, energy, &q, variant)?;
    let roots = q.ordered();
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for j in 0..4 {
        let s0 = scaled_power(roots[j], 0, sites);
        m[0][j] = coeffs[j].a * s0;
        m[1][j] = coeffs[j].b * s0;
        m[2][j] = coeffs[j].c * scaled_power(roots[j], sites - 1, sites);
        m[3][j] = coeffs[j].d * scaled_power(roots[j], sites, sites);
    }
    Ok(m)
}

fn minor(m: &[[Complex64; 4]; 4], rows: (usize, usize), cols: (usize, usize)) -> Complex64 {
    m[rows.0][cols.0] * m[rows.1][cols.1] - m[rows.0][cols.1] * m[rows.1][cols.0]
}

/// Terms of the Laplace expansion along rows `(0, 1)`, signed.
fn laplace_terms(m: &[[Complex64; 4]; 4]) -> Vec<Complex64> {
    let mut terms = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            let rest: Vec<usize> = (0..4).filter(|&k| k != i && k != j).collect();
            let sign = if (i + j) % 2 == 1 { 1.0 } else { -1.0 };
            terms.push(sign * minor(m, (0, 1), (i, j)) * minor(m, (2, 3), (rest[0], rest[1])));
        }
    }
    terms
}

fn column_norm_product(m: &[[Complex64; 4]; 4]) -> f64 {
    (0..4)
        .map(|j| (0..4).map(|i| m[i][j].norm_sqr()).sum::<f64>().sqrt())
        .product()
}

fn normalized(value: Complex64, m: &[[Complex64; 4]; 4]) -> Complex64 {
    let norm = column_norm_product(m);
    if norm > 0.0 {
        value / norm
    } else {
        value
    }
}

/// Determinant of a 4x4 boundary matrix divided by the product of its column
/// norms. By Hadamard's inequality the magnitude lies in `[0, 1]`.
pub fn normalized_determinant(m: &[[Complex64; 4]; 4]) -> Complex64 {
    normalized(laplace_terms(m).into_iter().sum(), m)
}

/// Column-normalized boundary determinant at energy `E` for a chain of `L` sites.
pub fn boundary_determinant(
    spec: &ModelSpec,
    energy: Complex64,
    sites: usize,
    variant: CoefficientVariant,
) -> Result<Complex64> {
    Ok(normalized_determinant(&boundary_matrix(spec, energy, sites, variant)?))
}

/// The largest single term of the determinant's expansion into products of a
/// `(A, B)` minor and a `(C, D)` minor, with the same normalization as
/// [`boundary_determinant`].
pub fn leading_term(spec: &ModelSpec, energy: Complex64, sites: usize, variant: CoefficientVariant) -> Result<Complex64> {
    let m = boundary_matrix(spec, energy, sites, variant)?;
    let best = laplace_terms(&m)
        .into_iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("six terms");
    Ok(normalized(best, &m))
}

/// Both sides of the two-term balance that holds when the middle moduli are
/// equal: `lhs = (beta_1/beta_2)^L` of the middle branch, `rhs` the ratio of the
/// boundary minors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuumRatio {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// Which branch sits in the middle of the modulus ordering.
    pub case: ContinuumCase,
    /// Whether the middle moduli are equal within tolerance at this energy.
    pub continuum: bool,
}

/// Evaluates the ratio relation at `E`. Case 1 places the `-` branch in the
/// middle; case 2 is the mirror image with `+` and `-` exchanged. The relation
/// is evaluated whenever one branch is in the middle, so its failure away from
/// the continuum can be inspected.
pub fn continuum_ratio(
    spec: &ModelSpec,
    energy: Complex64,
    sites: usize,
    variant: CoefficientVariant,
) -> Result<ContinuumRatio> {
    check(spec)?;
    let q = solve_beta(spec, energy)?;
    let k = boundary_coeffs(spec, energy, &q, variant)?;
    let [p1, m1, m2, p2] = q.ordered();
    let [kp1, km1, km2, kp2] = k;
    // (inner_1, inner_2) is the middle branch, (outer_1, outer_2) the other.
    let case = branch_ordering(&q);
    let ((i1, i2, ki1, ki2), (o2, ko1, ko2)) = match case {
        ContinuumCase::Case1 => ((m1, m2, km1, km2), (p2, kp1, kp2)),
        ContinuumCase::Case2 => ((p1, p2, kp1, kp2), (m2, km1, km2)),
        ContinuumCase::Neither => return Err(Error::WrongCase),
    };
    let num = (ko1.a * ki1.b - ki1.a * ko1.b) * (ki2.c * ko2.d * o2 - ko2.c * ki2.d * i2);
    let den_ab = ko1.a * ki2.b - ki2.a * ko1.b;
    let den_cd = ki1.c * ko2.d * o2 - ko2.c * ki1.d * i1;
    let scale = num.norm().max(1.0);
    guarded(den_ab, scale, "ratio", "A_1o B_2i - A_2i B_1o")?;
    guarded(den_cd, scale, "ratio", "C_1i D_2o b_2o - C_2o D_1i b_1i")?;
    Ok(ContinuumRatio {
        lhs: (i1 / i2).powi(sites as i32),
        rhs: num / (den_ab * den_cd),
        case,
        continuum: q.continuum_case != ContinuumCase::Neither,
    })
}
