use num_complex::Complex64;
use serde::Serialize;

use super::eigen::Eigenpairs;
use crate::error::{Error, Result};

/// Site-resolved density of one eigenstate, with particle and hole weight
/// folded onto the same site.
#[derive(Clone, Debug)]
pub struct DensityProfile {
    pub site_density: Vec<f64>,
    /// 1-based, in `[1, L]`.
    pub center_of_mass: f64,
    /// `1 / sum rho_n^2`, in `[1, L]`.
    pub participation_ratio: f64,
}

impl DensityProfile {
    /// Weight on the `ell` outermost sites at each end.
    pub fn edge_weight(&self, ell: usize) -> f64 {
        let l = self.site_density.len();
        let ell = ell.min(l);
        let left: f64 = self.site_density[..ell].iter().sum();
        let right: f64 = self.site_density[l.saturating_sub(ell).max(ell)..].iter().sum();
        left + right
    }

    /// `(COM - (L + 1)/2) / (L/2)`, negative towards site 1.
    pub fn displacement(&self) -> f64 {
        let l = self.site_density.len() as f64;
        (self.center_of_mass - 0.5 * (l + 1.0)) / (0.5 * l)
    }
}

/// Folds a BdG vector (length `2L`) or single-particle vector (length `L`) into
/// a normalized site density.
pub fn density_profile(state: &[Complex64], sites: usize) -> Result<DensityProfile> {
    let mut rho: Vec<f64> = if state.len() == 2 * sites {
        (0..sites).map(|n| state[n].norm_sqr() + state[sites + n].norm_sqr()).collect()
    } else if state.len() == sites {
        state.iter().map(|z| z.norm_sqr()).collect()
    } else {
        return Err(Error::DimMismatch { expected: 2 * sites, found: state.len() });
    };
    let total: f64 = rho.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::ZeroVector);
    }
    rho.iter_mut().for_each(|r| *r /= total);
    let center_of_mass = rho.iter().enumerate().map(|(n, r)| (n + 1) as f64 * r).sum();
    let participation_ratio = 1.0 / rho.iter().map(|r| r * r).sum::<f64>();
    Ok(DensityProfile { site_density: rho, center_of_mass, participation_ratio })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateClass {
    Bulk,
    Edge,
}

impl StateClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StateClass::Bulk => "bulk",
            StateClass::Edge => "edge",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StateRecord {
    pub index: usize,
    pub energy: (f64, f64),
    pub center_of_mass: f64,
    pub edge_weight: f64,
    pub participation_ratio: f64,
    pub displacement: f64,
    pub class: StateClass,
}

/// Thresholds for state classification and skin detection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkinOptions {
    /// Number of sites counted as "edge" at each end.
    pub ell: usize,
    /// Edge weight above which a state is classified as an edge state.
    pub w_edge: f64,
    /// Mean absolute displacement above which skin accumulation is reported.
    pub tau_skin: f64,
}

impl Default for SkinOptions {
    fn default() -> Self {
        Self { ell: 10, w_edge: 0.9, tau_skin: 0.25 }
    }
}

/// Classifies every state as edge (`edge_weight(ell) > w_edge`) or bulk.
pub fn classify_states(pairs: &Eigenpairs, sites: usize, ell: usize, w_edge: f64) -> Result<Vec<StateRecord>> {
    if ell < 1 || ell > sites / 2 {
        return Err(Error::InvalidWindow { ell, max: sites / 2 });
    }
    pairs
        .values
        .iter()
        .zip(&pairs.vectors)
        .enumerate()
        .map(|(index, (e, v))| {
            let p = density_profile(v, sites)?;
            let edge_weight = p.edge_weight(ell);
            Ok(StateRecord {
                index,
                energy: (e.re, e.im),
                center_of_mass: p.center_of_mass,
                edge_weight,
                participation_ratio: p.participation_ratio,
                displacement: p.displacement(),
                class: if edge_weight > w_edge { StateClass::Edge } else { StateClass::Bulk },
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SkinReport {
    pub per_state: Vec<StateRecord>,
    /// Mean signed displacement of all state centres from the chain centre,
    /// in units of `L/2`. Near `+-1` for one-sided accumulation.
    pub skew: f64,
    /// Mean absolute displacement. Unlike `skew` this does not cancel when
    /// particle- and hole-like states pile up at opposite ends.
    pub accumulation: f64,
    pub skin_detected: bool,
}

impl SkinReport {
    pub fn count(&self, class: StateClass) -> usize {
        self.per_state.iter().filter(|s| s.class == class).count()
    }

    pub fn bulk(&self) -> impl Iterator<Item = &StateRecord> {
        self.per_state.iter().filter(|s| s.class == StateClass::Bulk)
    }

    pub fn edge(&self) -> impl Iterator<Item = &StateRecord> {
        self.per_state.iter().filter(|s| s.class == StateClass::Edge)
    }
}

/// Skin diagnostics over all eigenstates.
///
/// Topological edge modes are `O(1)` in number and barely move the averages;
/// skin modes are extensive and frequently exceed the edge-weight threshold
/// themselves, so they cannot be excluded by classification.
pub fn skin_metrics(pairs: &Eigenpairs, sites: usize, opts: SkinOptions) -> Result<SkinReport> {
    if !(opts.tau_skin > 0.0 && opts.tau_skin < 1.0) {
        return Err(Error::InvalidThreshold { name: "tau_skin", value: opts.tau_skin });
    }
    if pairs.is_empty() {
        return Err(Error::NoStates);
    }
    let per_state = classify_states(pairs, sites, opts.ell, opts.w_edge)?;
    let n = per_state.len() as f64;
    let skew = per_state.iter().map(|s| s.displacement).sum::<f64>() / n;
    let accumulation = per_state.iter().map(|s| s.displacement.abs()).sum::<f64>() / n;
    Ok(SkinReport { per_state, skew, accumulation, skin_detected: accumulation > opts.tau_skin })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn uniform_state() {
        let v = vec![c(1.0); 10];
        let p = density_profile(&v, 10).unwrap();
        assert!(p.site_density.iter().all(|r| (r - 0.1).abs() < 1e-15));
        assert!((p.center_of_mass - 5.5).abs() < 1e-12);
        assert!((p.participation_ratio - 10.0).abs() < 1e-12);
        assert!((p.site_density.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.displacement().abs() < 1e-12);
    }

    #[test]
    fn delta_state_at_first_site() {
        let mut v = vec![c(0.0); 10];
        v[0] = c(3.0);
        let p = density_profile(&v, 10).unwrap();
        assert_eq!(p.center_of_mass, 1.0);
        assert_eq!(p.edge_weight(1), 1.0);
        assert_eq!(p.participation_ratio, 1.0);
    }

    #[test]
    fn bdg_components_fold_onto_sites() {
        // particle weight on site 2, hole weight on site 3, L = 4
        let mut v = vec![c(0.0); 8];
        v[1] = c(1.0);
        v[4 + 2] = Complex64::new(0.0, 1.0);
        let p = density_profile(&v, 4).unwrap();
        assert_eq!(p.site_density, vec![0.0, 0.5, 0.5, 0.0]);
        assert!((p.center_of_mass - 2.5).abs() < 1e-15);
    }

    #[test]
    fn zero_and_mismatched_vectors() {
        assert!(matches!(density_profile(&[c(0.0); 4], 4), Err(Error::ZeroVector)));
        assert!(matches!(density_profile(&[c(1.0); 5], 4), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn edge_window_bounds() {
        let pairs = Eigenpairs { values: vec![c(0.0)], vectors: vec![vec![c(1.0); 10]] };
        assert!(classify_states(&pairs, 10, 0, 0.9).is_err());
        assert!(classify_states(&pairs, 10, 6, 0.9).is_err());
        assert!(classify_states(&pairs, 10, 5, 0.9).is_ok());
    }

    #[test]
    fn threshold_bounds() {
        let pairs = Eigenpairs { values: vec![c(0.0)], vectors: vec![vec![c(1.0); 10]] };
        for tau in [0.0, 1.0, f64::NAN] {
            let opts = SkinOptions { ell: 2, tau_skin: tau, ..SkinOptions::default() };
            assert!(skin_metrics(&pairs, 10, opts).is_err());
        }
        let empty = Eigenpairs { values: vec![], vectors: vec![] };
        let opts = SkinOptions { ell: 2, ..SkinOptions::default() };
        assert!(matches!(skin_metrics(&empty, 10, opts), Err(Error::NoStates)));
    }

    #[test]
    fn opposite_end_accumulation_is_detected_but_has_no_skew() {
        let mut left = vec![c(0.0); 20];
        left[0] = c(1.0);
        let mut right = vec![c(0.0); 20];
        right[19] = c(1.0);
        let pairs = Eigenpairs { values: vec![c(1.0), c(-1.0)], vectors: vec![left, right] };
        let r = skin_metrics(&pairs, 20, SkinOptions { ell: 2, ..SkinOptions::default() }).unwrap();
        assert!(r.skew.abs() < 1e-12);
        assert!(r.accumulation > 0.9);
        assert!(r.skin_detected);
        assert_eq!(r.count(StateClass::Edge), 2);
    }
}
