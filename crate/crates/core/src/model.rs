//! The non-Hermitian Kitaev chain and its matrix representations.
//!
//! The chain has asymmetric nearest-neighbour hopping `-(t + gamma/2)` (rightward
//! bond amplitude, `c_n^dag c_{n+1}`) and `-(t - gamma/2)` (`c_{n+1}^dag c_n`),
//! real p-wave pairing `delta`, and an optional period-3 onsite potential
//! `V_n = V sin(2 pi n / 3 + theta)`, sites numbered `n = 1..=L`.
//!
//! The BdG matrix acts on Nambu spinors ordered as all annihilation operators
//! followed by all creation operators:
//!
//! ```text
//! H_BdG = [  h      D   ]
//!         [ -D    -h^dag ]
//! ```
//!
//! where `D_{n,n+1} = -delta`, `D_{n+1,n} = +delta`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Obc,
    Pbc,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Obc => "obc",
            Boundary::Pbc => "pbc",
        })
    }
}

/// Full parameterization of the lattice model. Energies are in units of
/// whatever `t` is measured in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub t: f64,
    pub gamma: f64,
    pub delta: f64,
    #[serde(rename = "V")]
    pub big_v: f64,
    pub theta: f64,
    #[serde(rename = "L")]
    pub num_sites: usize,
    pub boundary: Boundary,
}

impl Default for ModelSpec {
    /// The reference chain: `t = 1`, `gamma = 3/2`, `delta = 1/2`, `L = 100`, open ends.
    fn default() -> Self {
        Self {
            t: 1.0,
            gamma: 1.5,
            delta: 0.5,
            big_v: 0.0,
            theta: 0.0,
            num_sites: 100,
            boundary: Boundary::Obc,
        }
    }
}

impl ModelSpec {
    pub fn with_potential(mut self, big_v: f64, theta: f64) -> Self {
        self.big_v = big_v;
        self.theta = theta;
        self
    }

    pub fn with_sites(mut self, num_sites: usize) -> Self {
        self.num_sites = num_sites;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Hopping amplitude magnitude on `c_n^dag c_{n+1}`.
    #[inline]
    pub fn hop_right(&self) -> f64 {
        self.t + 0.5 * self.gamma
    }

    /// Hopping amplitude magnitude on `c_{n+1}^dag c_n`.
    #[inline]
    pub fn hop_left(&self) -> f64 {
        self.t - 0.5 * self.gamma
    }

    /// Coefficient of `x^2` in the reduced characteristic equation,
    /// `delta^2 - t^2 + gamma^2 / 4`.
    #[inline]
    pub fn leading_coeff(&self) -> f64 {
        self.delta * self.delta - self.t * self.t + 0.25 * self.gamma * self.gamma
    }

    /// Largest coupling magnitude; a natural energy scale for tolerances.
    pub fn energy_scale(&self) -> f64 {
        [self.t, self.gamma, self.delta, self.big_v]
            .iter()
            .map(|x| x.abs())
            .fold(f64::MIN_POSITIVE, f64::max)
    }
}

pub fn validate_spec(raw: ModelSpec) -> Result<ModelSpec> {
    for (name, value) in [
        ("t", raw.t),
        ("gamma", raw.gamma),
        ("delta", raw.delta),
        ("V", raw.big_v),
        ("theta", raw.theta),
    ] {
        if !value.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    if raw.num_sites < 2 {
        return Err(Error::NonPositiveSize(raw.num_sites));
    }
    if raw.boundary == Boundary::Pbc && raw.big_v != 0.0 && !raw.num_sites.is_multiple_of(3) {
        return Err(Error::PbcPeriodMismatch(raw.num_sites));
    }
    Ok(raw)
}

/// `V_n = V sin(2 pi n / 3 + theta)` for `n = 1..=L`.
pub fn onsite_potential(spec: &ModelSpec) -> Vec<f64> {
    (1..=spec.num_sites)
        .map(|n| spec.big_v * (2.0 * PI * n as f64 / 3.0 + spec.theta).sin())
        .collect()
}

/// Single-particle block `h`: hoppings plus the onsite potential.
pub fn build_single_particle(spec: &ModelSpec) -> Result<ComplexMatrix> {
    let spec = validate_spec(spec.clone())?;
    let l = spec.num_sites;
    let mut h = ComplexMatrix::zeros(l);
    let right = Complex64::new(-spec.hop_right(), 0.0);
    let left = Complex64::new(-spec.hop_left(), 0.0);
    for n in 0..l - 1 {
        h[(n, n + 1)] += right;
        h[(n + 1, n)] += left;
    }
    if spec.boundary == Boundary::Pbc {
        h[(l - 1, 0)] += right;
        h[(0, l - 1)] += left;
    }
    for (n, v) in onsite_potential(&spec).into_iter().enumerate() {
        h[(n, n)] = Complex64::new(v, 0.0);
    }
    Ok(h)
}

/// Antisymmetric pairing block `D`.
fn pairing_block(spec: &ModelSpec) -> ComplexMatrix {
    let l = spec.num_sites;
    let mut d = ComplexMatrix::zeros(l);
    let pair = Complex64::new(spec.delta, 0.0);
    for n in 0..l - 1 {
        d[(n, n + 1)] -= pair;
        d[(n + 1, n)] += pair;
    }
    if spec.boundary == Boundary::Pbc {
        d[(l - 1, 0)] -= pair;
        d[(0, l - 1)] += pair;
    }
    d
}

/// The `2L x 2L` BdG matrix in Nambu ordering `(c_1..c_L, c_1^dag..c_L^dag)`.
pub fn build_bdg(spec: &ModelSpec) -> Result<ComplexMatrix> {
    let h = build_single_particle(spec)?;
    let d = pairing_block(spec);
    let hole = h.adjoint();
    let l = spec.num_sites;
    let mut out = ComplexMatrix::zeros(2 * l);
    for i in 0..l {
        for j in 0..l {
            out[(i, j)] = h[(i, j)];
            out[(i, l + j)] = d[(i, j)];
            out[(l + i, j)] = -d[(i, j)];
            out[(l + i, l + j)] = -hole[(i, j)];
        }
    }
    Ok(out)
}
