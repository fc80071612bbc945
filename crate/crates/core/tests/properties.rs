use proptest::prelude::*;

use riesz_core::density::translated_ball;
use riesz_core::geometry::lens_volume;
use riesz_core::oracles::harmonic_dimension_by_rank;
use riesz_core::special::unit_ball_volume;
use riesz_core::spectral::{eigenvalue_closed_form, harmonic_dimension};
use riesz_core::{BallPair, Density, DirectionSet, SpectralParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lens_is_symmetric_and_bounded(
        dim in 2usize..=6,
        big in 0.2f64..2.0,
        small in 0.2f64..2.0,
        t in 0.0f64..1.2,
    ) {
        let d = t * (big + small);
        let v = lens_volume(dim, big, small, d);
        let swapped = lens_volume(dim, small, big, d);
        let cap = unit_ball_volume(dim) * big.min(small).powi(dim as i32);
        prop_assert!((v - swapped).abs() <= 1e-12 * cap);
        prop_assert!(v >= 0.0 && v <= cap * (1.0 + 1e-12));
    }

    #[test]
    fn phi_is_nonincreasing(
        dim in 2usize..=5,
        kappa in 0.05f64..0.95,
        r in 0.0f64..2.5,
        step in 1e-6f64..0.5,
    ) {
        let pair = BallPair::unit(dim, kappa, kappa.min(1.0 - kappa)).unwrap();
        prop_assert!(pair.phi(r + step) <= pair.phi(r));
    }

    #[test]
    fn phi_derivative_matches_difference_quotient(
        dim in 2usize..=5,
        kappa in 0.1f64..0.9,
        t in 0.05f64..0.95,
    ) {
        let pair = BallPair::unit(dim, kappa, kappa.min(1.0 - kappa)).unwrap();
        let (lo, hi) = ((pair.radius_e() - pair.radius_b()).abs(), pair.radius_e() + pair.radius_b());
        let r = lo + t * (hi - lo);
        let h = 1e-5 * (hi - lo);
        let fd = (pair.phi(r + h) - pair.phi(r - h)) / (2.0 * h);
        let d = pair.phi_derivative(r).unwrap();
        prop_assert!((fd - d).abs() <= 1e-6 * d.abs().max(1e-3), "{fd} vs {d}");
    }

    #[test]
    fn eigenvalues_stay_below_the_cap_measure(
        dim in 2usize..=6,
        a in 0.01f64..1.99,
        ell in 0usize..80,
    ) {
        let p = SpectralParams::new(dim, a, ell).unwrap();
        let l0 = eigenvalue_closed_form(&p, 0);
        prop_assert!(eigenvalue_closed_form(&p, ell).abs() <= l0 * (1.0 + 1e-12));
    }

    #[test]
    fn density_json_round_trip(
        dim in 2usize..=3,
        shift in prop::collection::vec(-0.4f64..0.4, 3),
    ) {
        let dirs = DirectionSet::gauss_product(dim, 6).unwrap();
        let rho = translated_ball(1.0, &shift[..dim]).unwrap().discretize(&dirs, 2).unwrap();
        let text = rho.to_json().unwrap();
        let back = Density::from_json(&text).unwrap();
        prop_assert_eq!(back, rho);
    }
}

#[test]
fn multiplicities_match_the_rank_oracle() {
    for dim in 2..=5 {
        for ell in 0..=6 {
            assert_eq!(
                harmonic_dimension(dim, ell).unwrap(),
                harmonic_dimension_by_rank(dim, ell),
                "N={dim} l={ell}"
            );
        }
    }
}
