use std::f64::consts::PI;

use num_complex::Complex64;

use super::eigen::{eigenvalues, lexicographic};
use crate::error::{Error, Result};
use crate::model::{build_bdg, Boundary, ModelSpec};

/// Complex BdG spectrum of the periodic chain, sorted by `(Re E, Im E)`.
pub fn pbc_spectrum(spec: &ModelSpec) -> Result<Vec<Complex64>> {
    if spec.boundary != Boundary::Pbc {
        return Err(Error::WrongBoundary("periodic"));
    }
    let mut values = eigenvalues(&build_bdg(spec)?)?;
    values.sort_by(|a, b| lexicographic(*a, *b));
    Ok(values)
}

/// Winding number of a closed curve `E(k)` around `e_ref`.
///
/// The curve is closed by joining the last point back to the first. Fails when
/// `e_ref` lies within `1e-9` of a sample point.
pub fn spectral_winding(curve: &[Complex64], e_ref: Complex64) -> Result<i64> {
    if curve.len() < 2 {
        return Err(Error::NoStates);
    }
    let min_dist = curve.iter().map(|e| (e - e_ref).norm()).fold(f64::INFINITY, f64::min);
    if min_dist <= 1e-9 {
        return Err(Error::RefOnCurve(min_dist));
    }
    let total: f64 = curve
        .iter()
        .zip(curve.iter().cycle().skip(1))
        .map(|(a, b)| {
            let step = (b - e_ref).arg() - (a - e_ref).arg();
            // wrap into (-pi, pi]
            step - 2.0 * PI * ((step + PI) / (2.0 * PI)).floor()
        })
        .sum();
    Ok((total / (2.0 * PI)).round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize, radius: f64, center: Complex64) -> Vec<Complex64> {
        (0..n).map(|k| center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64)).collect()
    }

    #[test]
    fn unit_circle_winds_once() {
        let c = circle(64, 1.0, Complex64::new(0.0, 0.0));
        assert_eq!(spectral_winding(&c, Complex64::new(0.0, 0.0)).unwrap(), 1);
        let rev: Vec<_> = c.iter().rev().copied().collect();
        assert_eq!(spectral_winding(&rev, Complex64::new(0.0, 0.0)).unwrap(), -1);
        assert_eq!(spectral_winding(&c, Complex64::new(3.0, 0.0)).unwrap(), 0);
    }

    #[test]
    fn back_and_forth_interval_does_not_wind() {
        let mut c: Vec<Complex64> = (0..=20).map(|k| Complex64::new(-1.0 + 0.1 * k as f64, 0.0)).collect();
        c.extend((1..20).rev().map(|k| Complex64::new(-1.0 + 0.1 * k as f64, 0.0)));
        assert_eq!(spectral_winding(&c, Complex64::new(0.0, 1.0)).unwrap(), 0);
    }

    #[test]
    fn reference_on_curve() {
        let c = circle(16, 1.0, Complex64::new(0.0, 0.0));
        assert!(matches!(spectral_winding(&c, c[3]), Err(Error::RefOnCurve(_))));
    }

    #[test]
    fn open_chain_is_rejected() {
        assert!(matches!(pbc_spectrum(&ModelSpec::default()), Err(Error::WrongBoundary(_))));
    }
}
