use nalgebra::Complex;
use proptest::prelude::*;
use wh_quant::analysis::{spectrum, weighted_operator, Scheme, WeightKind};
use wh_quant::apodization::{displacement_matrix, pure_state_apodization, wigner_function};
use wh_quant::evolution::EigenPropagator;
use wh_quant::mollifier::{smooth_indicator, IntervalSet};
use wh_quant::operator::OperatorMatrix;
use wh_quant::portrait::portrait_convolution;
use wh_quant::quantizer::kernel;
use wh_quant::states::{gaussian_ground, gaussian_packet};
use wh_quant::transforms::{convolve_1d, fourier_1d, symplectic_fourier, Direction};
use wh_quant::{LineGrid, PhaseGrid, SampledFunction1D, SampledFunction2D};

fn line(n: usize) -> LineGrid<f64> {
    LineGrid::centered(16.0, n).unwrap()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn fourier_round_trip_and_parseval(x0 in -3.0..3.0f64, s in 0.6..1.6f64, k0 in -3.0..3.0f64) {
        let g = line(256);
        let f = gaussian_packet(&g, x0, s, k0);
        let hat = fourier_1d(&f, Direction::Forward);
        let back = fourier_1d(&hat, Direction::Inverse);
        prop_assert!(back.max_abs_diff(&f).unwrap() < 1e-12);
        prop_assert!((hat.l2_norm() - f.l2_norm()).abs() < 1e-10 * f.l2_norm());
    }

    #[test]
    fn convolution_is_commutative_and_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64) {
        let g = line(128);
        let f = gaussian_packet(&g, a, 1.0, 0.5);
        let h = gaussian_packet(&g, b, 0.7, -1.0);
        let k = gaussian_packet(&g, 0.0, 1.2, 0.0);
        let fh = convolve_1d(&f, &h).unwrap();
        prop_assert!(fh.max_abs_diff(&convolve_1d(&h, &f).unwrap()).unwrap() < 1e-12);
        let combo = SampledFunction1D::new(g, f.values().iter().zip(k.values()).map(|(x, y)| x * c + y).collect()).unwrap();
        let lhs = convolve_1d(&combo, &h).unwrap();
        let kh = convolve_1d(&k, &h).unwrap();
        let rhs = SampledFunction1D::new(g, fh.values().iter().zip(kh.values()).map(|(x, y)| x * c + y).collect()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn symplectic_transform_is_involutive(q0 in -2.0..2.0f64, p0 in -2.0..2.0f64, w in 0.7..1.5f64) {
        let g = LineGrid::centered((128.0 * std::f64::consts::PI).sqrt() / 2.0, 64).unwrap();
        let pg = PhaseGrid::conjugate(&g);
        let f = SampledFunction2D::from_fn(pg, |q: f64, p: f64| {
            Complex::new(0.0, q * p0).exp() * (-((q - q0).powi(2) + (p - p0).powi(2)) / (2.0 * w * w)).exp()
        }).unwrap();
        let twice = symplectic_fourier(&symplectic_fourier(&f, false), false);
        let err = twice.values().iter().zip(f.values().iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        prop_assert!(err < 1e-10, "{}", err);
    }

    #[test]
    fn smooth_indicator_bounds_and_plateau(alpha in -4.0..0.0f64, width in 1.0..6.0f64, sigma in 0.0..1.0f64) {
        let g = line(512);
        let set = IntervalSet::new(alpha, alpha + width).unwrap();
        let u = smooth_indicator(set, sigma, &g).unwrap();
        for (j, z) in u.values.values().iter().enumerate() {
            prop_assert!(z.re >= 0.0 && z.re <= 1.0);
            let x = g.point(j);
            if x >= set.alpha + sigma && x <= set.beta - sigma && sigma > 0.0 {
                prop_assert!((z.re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn smooth_indicator_mass_with_node_aligned_ends(start in 100usize..250, len in 8usize..150, sigma in 0.0..1.0f64) {
        // misaligned ends carry an O(dx) bin error at σ = 0 and a slowly decaying aliasing error for σ > 0
        let g = line(512);
        let set = IntervalSet::new(g.point(start), g.point(start + len)).unwrap();
        let u = smooth_indicator(set, sigma, &g).unwrap();
        let target = if sigma == 0.0 { set.width() - g.dx() } else { set.width() };
        prop_assert!((u.values.integral().re - target).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn gaussian_apodization_symmetry(s in 0.6..1.6f64) {
        let g = line(128);
        let pg = PhaseGrid::conjugate(&g);
        let apod = pure_state_apodization(&gaussian_packet(&g, 0.0, s, 0.0), &pg).unwrap();
        let pi = apod.pi_values.values();
        let n = g.len();
        for i in 1..n {
            for k in 1..n {
                prop_assert!((pi[(n - i, n - k)] - pi[(i, k)].conj()).norm() < 1e-8);
            }
        }
        prop_assert!((apod.gamma.integral().re - 1.0).abs() < 1e-8);
        prop_assert!(apod.gamma.values().iter().all(|z| z.re >= -1e-10));
    }

    #[test]
    fn displacement_is_unitary(q in -3.0..3.0f64, p in -3.0..3.0f64) {
        let g = line(64);
        let u = displacement_matrix(&g, q, p).unwrap();
        let prod = u.adjoint().compose(&u).unwrap();
        prop_assert!(prod.max_action_diff(&OperatorMatrix::identity(g)).unwrap() < 1e-8);
    }

    #[test]
    fn wigner_function_has_unit_mass(x0 in -3.0..3.0f64, s in 0.6..1.6f64, k0 in -3.0..3.0f64) {
        let g = line(128);
        let w = wigner_function(&gaussian_packet(&g, x0, s, k0), &PhaseGrid::conjugate(&g)).unwrap();
        prop_assert!((w.integral().re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn real_symbols_quantize_to_symmetric_kernels(q0 in -3.0..3.0f64, p0 in -3.0..3.0f64, w in 0.8..2.0f64) {
        let g = line(128);
        let pg = PhaseGrid::conjugate(&g);
        let apod = pure_state_apodization(&gaussian_ground(&g), &pg).unwrap();
        let f = SampledFunction2D::from_real_fn(pg, |q: f64, p: f64| {
            (q - q0) * (-((q - q0).powi(2) + (p - p0).powi(2)) / (2.0 * w * w)).exp()
        }).unwrap();
        let a = kernel(&f, &apod, &g).unwrap();
        prop_assert!(a.hermitian_residual() < 1e-7);
    }

    #[test]
    fn portrait_convolution_preserves_mass(q0 in -3.0..3.0f64, p0 in -3.0..3.0f64) {
        let g = line(128);
        let pg = PhaseGrid::conjugate(&g);
        let apod = pure_state_apodization(&gaussian_ground(&g), &pg).unwrap();
        let f = SampledFunction2D::from_real_fn(pg, |q: f64, p: f64| (-((q - q0).powi(2) + (p - p0).powi(2)) / 2.0).exp()).unwrap();
        let port = portrait_convolution(&f, &apod).unwrap();
        let m0 = f.integral();
        prop_assert!((port.grid_values().unwrap().integral() - m0).norm() < 1e-6 * m0.norm());
    }

    #[test]
    fn weighted_operators_are_hermitian(c in 0.0..2.0f64, h in 0.1..3.0f64, x0 in -3.0..3.0f64) {
        let g = line(128);
        let a = SampledFunction1D::from_real_fn(g, |x: f64| c + h * (-(x - x0).powi(2)).exp()).unwrap();
        for kind in [WeightKind::Momentum, WeightKind::Kinetic] {
            for scheme in [Scheme::Spectral, Scheme::CentralDiff] {
                let m = weighted_operator(&a, kind, &g, scheme).unwrap();
                prop_assert!(m.matrix.hermitian_residual() < 1e-10);
            }
        }
    }

    #[test]
    fn weight_scaling_scales_spectra(x0 in -2.0..2.0f64) {
        // both A·P·A and A·P²·A are quadratic in a
        let g = line(64);
        let a = SampledFunction1D::from_real_fn(g, |x: f64| 0.5 + (-(x - x0).powi(2)).exp()).unwrap();
        let a2 = a.scaled(Complex::new(2.0, 0.0));
        for (kind, factor) in [(WeightKind::Momentum, 4.0), (WeightKind::Kinetic, 4.0)] {
            let s1 = spectrum(&weighted_operator(&a, kind, &g, Scheme::Spectral).unwrap().matrix, None).unwrap();
            let s2 = spectrum(&weighted_operator(&a2, kind, &g, Scheme::Spectral).unwrap().matrix, None).unwrap();
            let scale = s1.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (l1, l2) in s1.eigenvalues.iter().zip(&s2.eigenvalues) {
                prop_assert!((l2 - factor * l1).abs() < 1e-10 * factor * scale);
            }
        }
    }

    #[test]
    fn evolution_is_unitary_and_reversible(x0 in -2.0..2.0f64, k0 in -2.0..2.0f64, t in 0.1..5.0f64) {
        let g = LineGrid::centered(12.0, 128).unwrap();
        let pot: Vec<Complex<f64>> = g.points().iter().map(|x| Complex::new(x * x / 2.0, 0.0)).collect();
        let h = wh_quant::analysis::kinetic_matrix(&g, Scheme::Spectral)
            .scaled(Complex::new(0.5, 0.0))
            .add(&OperatorMatrix::multiplication(g, &pot).unwrap())
            .unwrap();
        let prop = EigenPropagator::new(&h).unwrap();
        let psi = gaussian_packet(&g, x0, 1.0, k0);
        let tr = prop.propagate(&psi, &[0.0, t], None).unwrap();
        prop_assert!((tr.observables[1].norm - 1.0).abs() < 1e-10);
        let e0 = tr.observables[0].energy;
        prop_assert!((tr.observables[1].energy - e0).abs() < 1e-8 * e0);
        let back = prop.evolve(&tr.states[1], -t).unwrap();
        prop_assert!(back.max_abs_diff(&psi).unwrap() < 1e-9);
    }
}

#[test]
fn single_precision_round_trip() {
    let g = LineGrid::<f32>::centered(8.0, 128).unwrap();
    let f = gaussian_packet(&g, 0.5f32, 1.0, 1.0);
    let back = fourier_1d(&fourier_1d(&f, Direction::Forward), Direction::Inverse);
    assert!(back.max_abs_diff(&f).unwrap() < 1e-5);
}
