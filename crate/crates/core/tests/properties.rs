//! Property tests over seeded random states and projectors.

use approx::assert_abs_diff_eq;
use bellswap::fock;
use bellswap::gaussian::{self, SubsystemSpec};
use bellswap::protocol::{self, PostState};
use bellswap::{models, slater, Backend, Complex64, RungProjector};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn projector(theta: f64, phase: f64) -> RungProjector {
    RungProjector::new(
        Complex64::new(theta.cos(), 0.0),
        Complex64::from_polar(theta.sin(), phase),
    )
    .unwrap()
}

fn max_dev(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn subset(l: usize, size: usize, seed: u64) -> Vec<usize> {
    protocol::random_rung_subset(l, size, seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn elimination_matches_oracle(
        half in 1usize..=3,
        seed in any::<u64>(),
        other in any::<u64>(),
        theta in 0.05f64..1.5,
        phase in -3.0f64..3.0,
        size_seed in any::<u64>(),
    ) {
        let l = 2 * half;
        let upper = models::random_slater(l, half, seed).unwrap();
        let lower = models::random_slater(l, half, other).unwrap();
        let n_m = 1 + (size_seed as usize) % half;
        let measured = subset(l, n_m, size_seed);
        let proj = projector(theta, phase);
        let o = protocol::run_measurement(&upper, &lower, &measured, &proj, Backend::Oracle).unwrap();
        let elim = slater::project_rungs(&upper, &lower, &measured, &proj).unwrap();
        prop_assert!((elim.log_probability.exp() - o.probability).abs() <= 1e-10 * o.probability.max(1e-300));
        let Some(PostState::Fock(psi)) = &o.post else { return Ok(()) };
        let g = gaussian::gamma_from_orbitals(&elim.post.unwrap()).unwrap();
        let d = max_dev(&psi.majorana_gamma().unwrap(), &g.gamma());
        prop_assert!(d < 1e-10, "Γ deviation {d}");
    }

    #[test]
    fn theorem_post_state_is_the_bell_product(half in 1usize..=3, seed in any::<u64>(), set_seed in any::<u64>()) {
        let l = 2 * half;
        let phi = models::random_slater(l, half, seed).unwrap();
        let measured = subset(l, half, set_seed);
        let r = protocol::run_uniform_measurement(&phi, &measured, &RungProjector::bell_plus(), Backend::Gaussian).unwrap();
        if r.probability > 1e-12 {
            prop_assert!(1.0 - r.fidelity_to_ideal.unwrap() < 1e-9);
            assert_abs_diff_eq!(r.entropy_ar().unwrap(), half as f64 * std::f64::consts::LN_2, epsilon = 1e-9);
        }
    }

    #[test]
    fn composition_stays_physical(half in 1usize..=2, seed in any::<u64>(), set_seed in any::<u64>(), eps in -0.9f64..0.9) {
        let l = 2 * half;
        let phi = models::random_slater(l, half, seed).unwrap();
        let g0 = gaussian::gamma_double(&gaussian::gamma_from_orbitals(&phi).unwrap());
        let measured = subset(l, half, set_seed);
        let gm = gaussian::projector_gamma(l, &measured, &RungProjector::epsilon_plus(eps).unwrap()).unwrap();
        if let Ok(post) = gaussian::post_measurement_gamma(&g0, &gm) {
            prop_assert!(post.purity_defect() < 1e-8);
            let sub = SubsystemSpec::new((0..l).collect(), 2 * l).unwrap();
            let s = gaussian::entropy_from_gamma(&post, &sub).unwrap();
            prop_assert!(s >= -1e-12 && s <= l as f64 * std::f64::consts::LN_2 + 1e-9);
        }
    }

    #[test]
    fn single_exchange_relation(n in 1usize..=4, extra in 1usize..=4, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let l = n + extra;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(n, l, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let a: Vec<usize> = rand::seq::index::sample(&mut rng, l, n - 1).into_vec();
        let b: Vec<usize> = rand::seq::index::sample(&mut rng, l, (n + 1).min(l)).into_vec();
        prop_assume!(b.len() == n + 1);
        prop_assert!(slater::plucker_single_residual(&m, &a, &b).unwrap() < 1e-10);
    }

    #[test]
    fn half_cut_spectra_are_complementary(half in 1usize..=4, seed in any::<u64>(), set_seed in any::<u64>()) {
        let l = 2 * half;
        let phi = models::random_slater(l, half, seed).unwrap();
        let left = subset(l, half, set_seed);
        let right: Vec<usize> = (0..l).filter(|i| !left.contains(i)).collect();
        let xl = slater::entanglement_spectrum(&slater::correlation_submatrix(&phi, &left).unwrap()).unwrap().xi;
        let mut xr: Vec<f64> = slater::entanglement_spectrum(&slater::correlation_submatrix(&phi, &right).unwrap()).unwrap()
            .xi.iter().map(|x| 1.0 - x).collect();
        xr.sort_by(f64::total_cmp);
        let mut xl = xl;
        xl.sort_by(f64::total_cmp);
        for (a, b) in xl.iter().zip(&xr) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn slater_state_matches_its_correlations(half in 1usize..=3, seed in any::<u64>()) {
        let l = 2 * half;
        let phi = models::random_slater(l, half, seed).unwrap();
        let psi = fock::build_slater_state(&phi).unwrap();
        let g = gaussian::gamma_from_orbitals(&phi).unwrap();
        prop_assert!(max_dev(&psi.majorana_gamma().unwrap(), &g.gamma()) < 1e-12);
        prop_assert!(g.purity_defect() < 1e-12);
    }
}
