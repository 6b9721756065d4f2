use std::f64::consts::PI;

use nalgebra::Complex;
use wh_quant::analysis::{momentum_matrix, position_matrix, Scheme};
use wh_quant::apodization::{displacement_matrix, pure_state_apodization, weyl_wigner_apodization};
use wh_quant::mollifier::{gaussian_window_closed_form, smooth_indicator, IntervalSet};
use wh_quant::quantizer::{
    coefficient_profiles, commutator, kernel, kernel_u_pn, quantize_u_pn, trace_check, truncated_observables,
    window_fourier, window_function, PositionWeight,
};
use wh_quant::states::{gaussian_ground, gaussian_packet};
use wh_quant::transforms::{fourier_1d_onto, Direction};
use wh_quant::{LineGrid, PhaseGrid, SampledFunction1D, SampledFunction2D};

fn grid(n: usize) -> LineGrid<f64> {
    LineGrid::centered(16.0, n).unwrap()
}

fn e02() -> IntervalSet<f64> {
    IntervalSet::new(0.0, 2.0).unwrap()
}

fn test_states(g: &LineGrid<f64>) -> Vec<SampledFunction1D<f64>> {
    vec![
        gaussian_packet(g, 0.0, 1.0, 0.0),
        gaussian_packet(g, 1.0, 0.6, 1.5),
        gaussian_packet(g, -2.0, 1.4, -0.7),
    ]
}

fn max_diff(a: &SampledFunction1D<f64>, b: &SampledFunction1D<f64>) -> f64 {
    a.max_abs_diff(b).unwrap()
}

#[test]
fn identity_law_on_test_states() {
    let g = grid(256);
    let pg = PhaseGrid::conjugate(&g);
    let apod = pure_state_apodization(&gaussian_ground(&g), &pg).unwrap();
    let one = SampledFunction2D::from_real_fn(pg, |_, _| 1.0).unwrap();
    let a = kernel(&one, &apod, &g).unwrap();
    for s in test_states(&g) {
        assert!(max_diff(&a.apply(&s).unwrap(), &s) < 1e-6);
    }
}

#[test]
fn window_of_interval_matches_closed_form() {
    let g = grid(512);
    let pg = PhaseGrid::conjugate(&g);
    let apod = pure_state_apodization(&gaussian_ground(&g), &pg).unwrap();
    let chi = smooth_indicator(e02(), 0.0, &g).unwrap();
    let w = window_function(&PositionWeight::Indicator(chi), &apod).unwrap();
    let closed = gaussian_window_closed_form(&e02(), &g).unwrap();
    let err = w
        .values()
        .iter()
        .zip(closed.values())
        .fold(0.0f64, |m, (a, b)| m.max((a.re - b.re / PI.sqrt()).abs()));
    assert!(err < 1e-8, "err {err}");
}

#[test]
fn window_of_unit_weight_is_unit() {
    let g = grid(256);
    let apod = pure_state_apodization(&gaussian_ground(&g), &PhaseGrid::conjugate(&g)).unwrap();
    let one = SampledFunction1D::from_real_fn(g, |_| 1.0).unwrap();
    let w = window_function(&one.into(), &apod).unwrap();
    assert!(w.values().iter().all(|z| (z.re - 1.0).abs() < 1e-10));
    let ww = weyl_wigner_apodization(&PhaseGrid::conjugate(&g)).unwrap();
    let u = SampledFunction1D::from_real_fn(g, |x: f64| (-x * x).exp()).unwrap();
    assert_eq!(window_function(&u.clone().into(), &ww).unwrap(), u);
}

#[test]
fn window_fourier_is_transform_of_window() {
    let g = grid(256);
    let pg = PhaseGrid::conjugate(&g);
    // complex fiducial so that Π(0, p) is not even in p
    let psi = gaussian_packet(&g, 0.3, 0.8, 1.2);
    let apod = pure_state_apodization(&psi, &pg).unwrap();
    let u: PositionWeight<f64> = SampledFunction1D::from_real_fn(g, |x: f64| (-(x - 1.0) * (x - 1.0)).exp()).unwrap().into();
    let w = window_function(&u, &apod).unwrap();
    let wh = fourier_1d_onto(&w, Direction::Forward, &pg.p_axis).unwrap();
    let direct = window_fourier(&u, &apod).unwrap();
    assert!(max_diff(&wh, &direct) < 1e-9);
    // Gaussian u and Gaussian fiducial: product of Gaussians, û·e^{-p²/4}
    let ground = pure_state_apodization(&gaussian_ground(&g), &pg).unwrap();
    let wf = window_fourier(&u, &ground).unwrap();
    for (k, z) in wf.values().iter().enumerate() {
        let p = pg.p_axis.point(k);
        let uhat = Complex::new(0.0, -p).exp() * (-p * p / 4.0).exp() / 2f64.sqrt();
        assert!((z - uhat * (-p * p / 4.0).exp()).norm() < 1e-12);
    }
}

#[test]
fn position_offset_profile_matches_quadrature() {
    // b(x) = -∫u(y)(x - y)γ(x - y)dy against adaptive quadrature
    let g = grid(256);
    let apod = pure_state_apodization(&gaussian_ground(&g), &PhaseGrid::conjugate(&g)).unwrap();
    let u_fn = |y: f64| (-(y - 1.0) * (y - 1.0) / 0.5).exp();
    let u = SampledFunction1D::from_real_fn(g, u_fn).unwrap();
    let prof = coefficient_profiles(&u.into(), &apod).unwrap();
    for x in [-1.0, 0.0, 0.5, 1.0, 2.5] {
        let j = g.nearest_index(x).unwrap();
        let integrand = |y: f64| u_fn(y) * (x - y) * (-(x - y) * (x - y)).exp() / PI.sqrt();
        let oracle = -(-15..15)
            .map(|k| quadrature::double_exponential::integrate(integrand, k as f64, k as f64 + 1.0, 1e-15).integral)
            .sum::<f64>();
        assert!((prof.b.values()[j].re - oracle).abs() < 1e-7, "x={x} got {} want {oracle}", prof.b.values()[j].re);
    }
}

#[test]
fn profiles_of_sharp_indicator_are_smooth() {
    let g = grid(512);
    let apod = pure_state_apodization(&gaussian_ground(&g), &PhaseGrid::conjugate(&g)).unwrap();
    let u = PositionWeight::Indicator(smooth_indicator(e02(), 0.0, &g).unwrap());
    let prof = coefficient_profiles(&u, &apod).unwrap();
    for f in [&prof.w, &prof.b, &prof.c, &prof.d] {
        let v = f.values();
        let second = |s: usize| {
            (s..v.len() - s).fold(0.0f64, |m, j| m.max((v[j + s] - v[j] * 2.0 + v[j - s]).norm() / (s * s) as f64))
        };
        let ratio = second(1) / second(2);
        assert!(v.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        assert!(ratio < 1.5, "ratio {ratio}");
    }
}

#[test]
fn unit_weight_momentum_is_p() {
    let g = grid(256);
    let apod = pure_state_apodization(&gaussian_ground(&g), &PhaseGrid::conjugate(&g)).unwrap();
    let one = SampledFunction1D::from_real_fn(g, |_| 1.0).unwrap();
    let a = quantize_u_pn(&one.into(), 1, &apod, &g).unwrap();
    let p = momentum_matrix(&g, Scheme::Spectral);
    for s in test_states(&g) {
        assert!(max_diff(&a.apply(&s).unwrap(), &p.apply(&s).unwrap()) < 1e-6);
    }
}

#[test]
fn kernel_and_profile_routes_agree() {
    let g = grid(256);
    let apod = pure_state_apodization(&gaussian_ground(&g), &PhaseGrid::conjugate(&g)).unwrap();
    let u = PositionWeight::Indicator(smooth_indicator(e02(), 0.4, &g).unwrap());
    for n in 0..=2 {
        let profile = quantize_u_pn(&u, n, &apod, &g).unwrap();
        let direct = kernel_u_pn(&u, n, &apod, &g, 4).unwrap();
        let mut err = 0.0f64;
        for s in test_states(&g) {
            err = err.max(max_diff(&profile.apply(&s).unwrap(), &direct.apply(&s).unwrap()));
        }
        assert!(err < 1e-5, "n={n} err={err}");
        assert!(profile.hermitian_residual() < 1e-8);
    }
}

#[test]
fn covariance_under_translation() {
    let g = grid(256);
    let pg = PhaseGrid::conjugate(&g);
    let apod = pure_state_apodization(&gaussian_ground(&g), &pg).unwrap();
    let q0 = 0.75;
    let f = |q: f64, p: f64| (-(q * q) / 2.0 - p * p / 3.0).exp() * (1.0 + 0.3 * p);
    let base = kernel(&SampledFunction2D::from_real_fn(pg, f).unwrap(), &apod, &g).unwrap();
    let moved = kernel(&SampledFunction2D::from_real_fn(pg, |q, p| f(q - q0, p)).unwrap(), &apod, &g).unwrap();
    let u = displacement_matrix(&g, q0, 0.0).unwrap();
    let conj = u.compose(&base).unwrap().compose(&u.adjoint()).unwrap();
    assert!(conj.max_action_diff(&moved).unwrap() < 1e-5);
}

#[test]
fn trace_formula_cases() {
    let g = grid(256);
    let pg = PhaseGrid::conjugate(&g);
    let apod = pure_state_apodization(&gaussian_ground(&g), &pg).unwrap();
    let f = SampledFunction2D::from_real_fn(pg, |q, p| (-(q * q + p * p) / 2.0).exp()).unwrap();
    let t = trace_check(&kernel(&f, &apod, &g).unwrap(), &f);
    assert!((t.lhs - 1.0).abs() < 1e-4 && (t.rhs - 1.0).abs() < 1e-4);
    let odd = SampledFunction2D::from_real_fn(pg, |q, p| q * (-(q * q + p * p) / 2.0).exp()).unwrap();
    let t = trace_check(&kernel(&odd, &apod, &g).unwrap(), &odd);
    assert!(t.lhs.abs() < 1e-6 && t.rhs.abs() < 1e-6);
    let zero = SampledFunction2D::from_real_fn(pg, |_, _| 0.0).unwrap();
    assert_eq!(trace_check(&kernel(&zero, &apod, &g).unwrap(), &zero).abs_err, 0.0);
}

#[test]
fn canonical_and_deformed_commutators() {
    let g = grid(256);
    let pg = PhaseGrid::conjugate(&g);
    let apod = pure_state_apodization(&gaussian_ground(&g), &pg).unwrap();
    let q = position_matrix(&g);
    let p = momentum_matrix(&g, Scheme::Spectral);
    let c = commutator(&q, &p).unwrap();
    for s in test_states(&g) {
        assert!(max_diff(&c.apply(&s).unwrap(), &s.scaled(Complex::new(0.0, 1.0))) < 1e-6);
    }
    let obs = truncated_observables(e02(), 0.2, &apod, &g).unwrap();
    assert_eq!(obs.position.hermitian_residual(), 0.0);
    assert!(obs.momentum.hermitian_flag() && obs.kinetic.hermitian_flag());
    let c = commutator(&obs.position, &obs.momentum).unwrap();
    let diag = obs.profiles.deformed_ccr();
    for s in [gaussian_packet(&g, 1.0, 0.3, 0.0), gaussian_packet(&g, 0.5, 0.5, 2.0)] {
        let lhs = c.apply(&s).unwrap();
        let rhs = s.map(|_, z| z).unwrap();
        let rhs = SampledFunction1D::new(g, rhs.values().iter().zip(&diag).map(|(a, b)| a * b).collect()).unwrap();
        assert!(max_diff(&lhs, &rhs) < 1e-5);
    }
}

#[test]
fn real_symbol_gives_symmetric_kernel() {
    let g = grid(128);
    let pg = PhaseGrid::conjugate(&g);
    let apod = pure_state_apodization(&gaussian_ground(&g), &pg).unwrap();
    let f = SampledFunction2D::from_real_fn(pg, |q, p| (q - p) * (-(q * q + p * p) / 3.0).exp()).unwrap();
    assert!(kernel(&f, &apod, &g).unwrap().hermitian_residual() < 1e-7);
    let ww = weyl_wigner_apodization(&pg).unwrap();
    assert!(kernel(&f, &ww, &g).unwrap().hermitian_residual() < 1e-7);
}
