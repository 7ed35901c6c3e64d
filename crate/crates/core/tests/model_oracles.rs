use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use nhse_core::model::{build_bdg, build_single_particle, Boundary, ModelSpec};
use nhse_core::spectra::{eigendecompose, eigen_right, eigenvalues, max_residual, negation_set_distance, pbc_spectrum, skin_metrics, spectral_winding, SkinOptions};
use nhse_core::nonbloch::multiset_distance;

fn sorted_re(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn periodic_hermitian_chain_has_cosine_bands() {
    let spec = ModelSpec { gamma: 0.0, delta: 0.0, ..ModelSpec::default() }
        .with_sites(6)
        .with_boundary(Boundary::Pbc);
    let got = sorted_re(pbc_spectrum(&spec).unwrap().iter().map(|z| z.re).collect());
    let mut want = Vec::new();
    for m in 0..6 {
        let e = -2.0 * (2.0 * PI * m as f64 / 6.0).cos();
        want.push(e);
        want.push(-e);
    }
    let want = sorted_re(want);
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12, "{got:?} vs {want:?}");
    }
}

#[test]
fn hatano_nelson_block_matches_similarity_transform() {
    // D^-1 h D with D = diag(r^n), r = sqrt(tp/tm), is the Hermitian chain with
    // hopping sqrt(tp tm), so the open-chain spectrum is 2 sqrt(tp tm) cos(k pi/(L+1)).
    let spec = ModelSpec { delta: 0.0, ..ModelSpec::default() }.with_sites(30);
    let h = build_single_particle(&spec).unwrap();
    let got = eigenvalues(&h).unwrap();
    let hop = (spec.hop_right() * spec.hop_left()).sqrt();
    let want: Vec<Complex64> = (1..=30)
        .map(|k| Complex64::new(2.0 * hop * (k as f64 * PI / 31.0).cos(), 0.0))
        .collect();
    assert!(multiset_distance(&got, &want) < 1e-10);
}

#[test]
fn hatano_nelson_states_pile_up_on_one_side() {
    let spec = ModelSpec { delta: 0.0, ..ModelSpec::default() };
    let pairs = eigen_right(&build_single_particle(&spec).unwrap()).unwrap();
    let r = skin_metrics(&pairs, 100, SkinOptions::default()).unwrap();
    assert!(r.skew < -0.9, "{}", r.skew);
    assert!(r.skin_detected);
}

#[test]
fn hatano_nelson_periodic_band_winds_once() {
    let spec = ModelSpec::default();
    let curve: Vec<Complex64> = (0..512)
        .map(|m| {
            let k = 2.0 * PI * m as f64 / 512.0;
            -spec.hop_right() * Complex64::from_polar(1.0, k) - spec.hop_left() * Complex64::from_polar(1.0, -k)
        })
        .collect();
    assert_eq!(spectral_winding(&curve, Complex64::new(0.0, 0.0)).unwrap(), 1);
    let reversed = ModelSpec { gamma: -1.5, ..spec };
    let curve: Vec<Complex64> = (0..512)
        .map(|m| {
            let k = 2.0 * PI * m as f64 / 512.0;
            -reversed.hop_right() * Complex64::from_polar(1.0, k) - reversed.hop_left() * Complex64::from_polar(1.0, -k)
        })
        .collect();
    assert_eq!(spectral_winding(&curve, Complex64::new(0.0, 0.0)).unwrap(), -1);
}

#[test]
fn periodic_spectra_with_potential_are_complex() {
    for theta in [PI / 3.0, PI / 4.0] {
        let spec = ModelSpec::default().with_potential(2.0, theta).with_sites(99).with_boundary(Boundary::Pbc);
        let e = pbc_spectrum(&spec).unwrap();
        let im = e.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!(im > 0.5, "theta = {theta}: max |Im E| = {im}");
    }
}

#[test]
fn small_chain_is_biorthogonal() {
    let h = build_bdg(&ModelSpec::default().with_sites(6)).unwrap();
    let es = eigendecompose(&h).unwrap();
    assert!(es.biorthogonality_defect() < 1e-8, "{}", es.biorthogonality_defect());
    assert!(es.pairing_residual < 1e-10);
    assert!(max_residual(&h, &es.pairs).unwrap() < 1e-10);
}

#[test]
fn majorana_pair_makes_pairing_ambiguous() {
    let h = build_bdg(&ModelSpec::default()).unwrap();
    assert!(eigendecompose(&h).is_err());
    let pairs = eigen_right(&h).unwrap();
    assert!(max_residual(&h, &pairs).unwrap() < 1e-9);
}

fn arb_spec() -> impl Strategy<Value = ModelSpec> {
    (0.3..1.5f64, -2.0..2.0f64, -1.5..1.5f64, -3.0..3.0f64, 0.0..(2.0 * PI), 2usize..24, any::<bool>()).prop_map(
        |(t, gamma, delta, v, theta, l, periodic)| {
            let (num_sites, boundary) = if periodic { (3 * (l / 3).max(1), Boundary::Pbc) } else { (l, Boundary::Obc) };
            ModelSpec { t, gamma, delta, big_v: v, theta, num_sites, boundary }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_is_symmetric_under_negation(spec in arb_spec()) {
        let h = build_bdg(&spec).unwrap();
        let d = negation_set_distance(&eigenvalues(&h).unwrap());
        prop_assert!(d <= 1e-9 * h.frobenius_norm().max(1.0), "distance {}", d);
    }

    #[test]
    fn real_couplings_give_conjugate_pairs(spec in arb_spec()) {
        let e = eigenvalues(&build_bdg(&spec).unwrap()).unwrap();
        let conj: Vec<Complex64> = e.iter().map(|z| z.conj()).collect();
        prop_assert!(multiset_distance(&e, &conj) < 1e-8);
    }
}
