use std::sync::OnceLock;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::grid::{LineGrid, PhaseGrid, SampledFunction1D, SampledFunction2D, Warning};
use crate::operator::{circulant_from_symbol, OperatorMatrix, SymbolParity};
use crate::scalar::{cis, cis_ratio, czero, Real};
use crate::transforms::{
    apply_symbol, partial_fourier_p, symplectic_fourier, upsample, Dft, Direction, DEFAULT_DECAY_FLOOR,
};

/// Tolerance on the sign tests of the assumption report.
pub const ASSUMPTION_TOL: f64 = 1e-9;
/// Largest accepted ratio of second differences at spacing `h` and `2h`.
pub const SMOOTHNESS_RATIO_LIMIT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApodizationKind {
    WeylWigner,
    PureState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Holds,
    Fails,
    /// Satisfied only as a statement about measures (`Π ≡ 1`).
    Distributional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionCheck<T> {
    pub status: CheckStatus,
    /// Minimum for sign checks, maximum second difference for the smoothness proxy.
    pub extremum: T,
}

/// Grid evidence for the three structural assumptions on `Π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionReport<T> {
    /// `𝔉_s[Π] ≥ 0`.
    pub nonneg_symplectic: AssumptionCheck<T>,
    /// Second differences of `Π̂_p` stay bounded when the spacing halves.
    pub smoothness: AssumptionCheck<T>,
    pub smoothness_ratio: T,
    /// `Π̂_p(0, y) ≥ 0`.
    pub nonneg_partial_at_origin: AssumptionCheck<T>,
}

impl<T: Real> AssumptionReport<T> {
    fn distributional() -> Self {
        let c = AssumptionCheck {
            status: CheckStatus::Distributional,
            extremum: T::zero(),
        };
        Self {
            nonneg_symplectic: c,
            smoothness: c,
            smoothness_ratio: T::one(),
            nonneg_partial_at_origin: c,
        }
    }
}

/// Apodization `Π(q, p)` with its marginal profiles.
#[derive(Debug, Clone)]
pub struct Apodization<T: Real> {
    pub kind: ApodizationKind,
    pub pi_values: SampledFunction2D<T>,
    pub psi: Option<SampledFunction1D<T>>,
    /// `γ(x)`, the position profile; a unit-mass spike for Weyl-Wigner.
    pub gamma: SampledFunction1D<T>,
    /// `ϖ(p)`, the momentum profile; a unit-mass spike for Weyl-Wigner.
    pub varpi: SampledFunction1D<T>,
    pub assumption_report: AssumptionReport<T>,
    /// `Π(-q,-p) = Π(q,p)` on the grid.
    pub even: bool,
    /// `Π(-q,-p) = conj Π(q,p)` on the grid.
    pub symmetric: bool,
    autocorrelation: OnceLock<SampledFunction2D<T>>,
}

fn require_centered_conjugate<T: Real>(grid: &PhaseGrid<T>) -> Result<()> {
    if grid.q_axis.is_centered() && grid.is_conjugate_of(&grid.q_axis) {
        Ok(())
    } else {
        Err(Error::GridMismatch(
            "phase grid must be the centered conjugate grid of its position axis".into(),
        ))
    }
}

fn spike<T: Real>(grid: &LineGrid<T>) -> SampledFunction1D<T> {
    let mut v = vec![czero(); grid.len()];
    v[grid.len() / 2] = Complex::new(T::one() / grid.dx(), T::zero());
    SampledFunction1D::new(*grid, v).expect("finite")
}

fn mirror_flags<T: Real>(pi: &DMatrix<Complex<T>>) -> (bool, bool) {
    let tol = T::lit(1e-8);
    let (r, c) = pi.shape();
    let (mut even, mut sym) = (true, true);
    for i in 1..r {
        for k in 1..c {
            let a = pi[(i, k)];
            let b = pi[(r - i, c - k)];
            even &= (a - b).norm_sqr().sqrt() <= tol;
            sym &= (a.conj() - b).norm_sqr().sqrt() <= tol;
        }
    }
    (even, sym)
}

/// Weyl-Wigner choice `Π ≡ 1`.
pub fn weyl_wigner_apodization<T: Real>(grid: &PhaseGrid<T>) -> Result<Apodization<T>> {
    require_centered_conjugate(grid)?;
    let (nq, np) = (grid.q_axis.len(), grid.p_axis.len());
    let pi = SampledFunction2D::new(*grid, DMatrix::from_element(nq, np, Complex::new(T::one(), T::zero())))?;
    Ok(Apodization {
        kind: ApodizationKind::WeylWigner,
        pi_values: pi,
        psi: None,
        gamma: spike(&grid.q_axis),
        varpi: spike(&grid.p_axis),
        assumption_report: AssumptionReport::distributional(),
        even: true,
        symmetric: true,
        autocorrelation: OnceLock::new(),
    })
}

/// Rank-one choice `𝔔₀ = |ψ⟩⟨ψ|`, `Π(q,p) = ⟨ψ|U(-q,-p)ψ⟩`.
pub fn pure_state_apodization<T: Real>(psi: &SampledFunction1D<T>, grid: &PhaseGrid<T>) -> Result<Apodization<T>> {
    require_centered_conjugate(grid)?;
    if !grid.q_axis.matches(psi.grid()) {
        return Err(Error::GridMismatch("state grid differs from the q axis".into()));
    }
    let norm = psi.l2_norm();
    if (norm - T::one()).abs() > T::lit(1e-8) {
        return Err(Error::NotNormalized { norm: norm.to_f64() });
    }
    let x = grid.q_axis;
    let n = x.len();
    let half = (n / 2) as i64;
    let root = T::two_pi().sqrt();
    let v = psi.values();
    let mut dft = Dft::new();
    let mut pi = DMatrix::from_element(n, n, czero());
    let mut row = vec![czero(); n];
    for i in 0..n {
        let shift = i as i64 - half;
        for (j, r) in row.iter_mut().enumerate() {
            let m = j as i64 + shift;
            *r = if (0..n as i64).contains(&m) {
                v[j].conj() * v[m as usize]
            } else {
                czero()
            };
        }
        let f = dft.apply(&row, &x, &grid.p_axis, Direction::Forward);
        for (k, z) in f.into_iter().enumerate() {
            let phase: Complex<T> = cis_ratio(-shift * (k as i64 - half), 2 * n as i64);
            pi[(i, k)] = phase * z * root;
        }
    }
    let pi_values = SampledFunction2D::new(*grid, pi)?;
    let inv_root = Complex::new(T::one() / root, T::zero());
    let row0 = pi_values.row(n / 2);
    let gamma = SampledFunction1D::new(x, dft.apply(row0.values(), &grid.p_axis, &x, Direction::Inverse))?
        .scaled(inv_root)
        .into_real_part();
    let col0 = pi_values.column(n / 2);
    let varpi = SampledFunction1D::new(grid.p_axis, dft.apply(col0.values(), &x, &grid.p_axis, Direction::Forward))?
        .scaled(inv_root);
    let (even, symmetric) = mirror_flags(pi_values.values());
    let mut warnings = Vec::new();
    let ratio = psi.edge_ratio();
    if ratio > T::lit(DEFAULT_DECAY_FLOOR) {
        warnings.push(Warning::EdgeDecay {
            context: "fiducial state",
            ratio: ratio.to_f64(),
        });
    }
    let pi_values = pi_values.with_warnings(warnings);
    let report = assumption_report(&pi_values);
    Ok(Apodization {
        kind: ApodizationKind::PureState,
        pi_values,
        psi: Some(psi.clone()),
        gamma,
        varpi,
        assumption_report: report,
        even,
        symmetric,
        autocorrelation: OnceLock::new(),
    })
}

fn second_difference_max<T: Real>(m: &DMatrix<Complex<T>>, stride: usize, h: T) -> T {
    let (r, c) = m.shape();
    let mut best = T::zero();
    let h2 = h * h;
    for i in stride..r.saturating_sub(stride) {
        for k in 0..c {
            let d = m[(i + stride, k)] - m[(i, k)] * T::lit(2.0) + m[(i - stride, k)];
            best = best.max(d.norm_sqr().sqrt() / h2);
        }
    }
    best
}

fn assumption_report<T: Real>(pi: &SampledFunction2D<T>) -> AssumptionReport<T> {
    let tol = T::lit(ASSUMPTION_TOL);
    let sign_check = |min: T| AssumptionCheck {
        status: if min >= -tol { CheckStatus::Holds } else { CheckStatus::Fails },
        extremum: min,
    };
    let fs = symplectic_fourier(pi, false);
    let min_fs = fs.values().iter().fold(T::max_value().unwrap_or(T::one()), |m, z| m.min(z.re));
    let ph = partial_fourier_p(pi);
    let g = ph.grid();
    let transposed = ph.values().transpose();
    let (dq, dy) = (g.q_axis.dx(), g.p_axis.dx());
    let fine = second_difference_max(ph.values(), 1, dq).max(second_difference_max(&transposed, 1, dy));
    let coarse = second_difference_max(ph.values(), 2, dq * T::lit(2.0))
        .max(second_difference_max(&transposed, 2, dy * T::lit(2.0)));
    let ratio = if coarse > T::zero() { fine / coarse } else { T::one() };
    let smooth = AssumptionCheck {
        status: if ratio <= T::lit(SMOOTHNESS_RATIO_LIMIT) {
            CheckStatus::Holds
        } else {
            CheckStatus::Fails
        },
        extremum: fine,
    };
    let n = g.q_axis.len();
    let min_a3 = (0..g.p_axis.len()).fold(T::max_value().unwrap_or(T::one()), |m, k| m.min(ph.at(n / 2, k).re));
    AssumptionReport {
        nonneg_symplectic: sign_check(min_fs),
        smoothness: smooth,
        smoothness_ratio: ratio,
        nonneg_partial_at_origin: sign_check(min_a3),
    }
}

/// Re-evaluates the assumption checks on the stored `Π`.
pub fn validate_assumptions<T: Real>(apod: &Apodization<T>) -> AssumptionReport<T> {
    match apod.kind {
        ApodizationKind::WeylWigner => AssumptionReport::distributional(),
        ApodizationKind::PureState => assumption_report(&apod.pi_values),
    }
}

impl<T: Real> Apodization<T> {
    pub fn grid(&self) -> &PhaseGrid<T> {
        self.pi_values.grid()
    }

    pub fn position_grid(&self) -> &LineGrid<T> {
        &self.pi_values.grid().q_axis
    }

    /// `(2π)^{-1}·𝔉̄_s[Π·Π̃]` with `Π̃(q,p) = Π(-q,-p)`, computed once.
    pub fn autocorrelation_kernel(&self) -> &SampledFunction2D<T> {
        self.autocorrelation.get_or_init(|| {
            let pi = self.pi_values.values();
            let (r, c) = pi.shape();
            let prod = DMatrix::from_fn(r, c, |i, k| {
                let mirrored = if i == 0 || k == 0 {
                    // (−q, −p) falls off the grid; Π(−q,−p) = conj Π(q,p) for Hermitian 𝔔₀
                    pi[(i, k)].conj()
                } else {
                    pi[(r - i, c - k)]
                };
                pi[(i, k)] * mirrored
            });
            let f = SampledFunction2D::new(*self.grid(), prod).expect("finite product");
            let s = symplectic_fourier(&f, true);
            let scale = Complex::new(T::one() / T::two_pi(), T::zero());
            let values = s.values() * scale;
            SampledFunction2D::new(*s.grid(), values)
                .expect("finite")
                .with_warnings(s.warnings().iter().cloned())
        })
    }
}

/// `𝒲_ψ(q,p) = (2π)^{-1} ∫ ψ̄(q + y/2) ψ(q - y/2) e^{iyp} dy`, so that `𝔉_s[Π](q,p) = 2π 𝒲_ψ(-q,-p)`.
pub fn wigner_function<T: Real>(psi: &SampledFunction1D<T>, grid: &PhaseGrid<T>) -> Result<SampledFunction2D<T>> {
    require_centered_conjugate(grid)?;
    if !grid.q_axis.matches(psi.grid()) {
        return Err(Error::GridMismatch("state grid differs from the q axis".into()));
    }
    let norm = psi.l2_norm();
    if (norm - T::one()).abs() > T::lit(1e-8) {
        return Err(Error::NotNormalized { norm: norm.to_f64() });
    }
    let n = grid.q_axis.len();
    let fine = upsample(psi.values(), 2);
    let h = grid.q_axis.dx() * T::lit(0.5);
    let scale = h / T::pi();
    let mut planner = rustfft::FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    let mut out = DMatrix::from_element(n, n, czero());
    let mut acc = vec![czero(); n];
    for i in 0..n {
        acc.iter_mut().for_each(|z| *z = czero());
        let c = 2 * i as i64;
        for m in -(n as i64)..(n as i64) {
            let (a, b) = (c + m, c - m);
            if a < 0 || b < 0 || a >= 2 * n as i64 || b >= 2 * n as i64 {
                continue;
            }
            let term = fine[a as usize].conj() * fine[b as usize];
            let signed = if m.rem_euclid(2) == 0 { term } else { -term };
            acc[m.rem_euclid(n as i64) as usize] += signed;
        }
        ifft.process(&mut acc);
        for (k, z) in acc.iter().enumerate() {
            out[(i, k)] = z * scale;
        }
    }
    SampledFunction2D::new(*grid, out)
}

/// Displacement `U(q,p) = e^{-iqp/2} e^{ipQ} e^{-iqP}`, assembled as `e^{ipQ/2} e^{-iqP} e^{ipQ/2}`.
pub fn displacement_matrix<T: Real>(grid: &LineGrid<T>, q: T, p: T) -> Result<OperatorMatrix<T>> {
    let s = circulant_from_symbol(grid, |k| cis(-q * k), SymbolParity::General);
    let half: Vec<Complex<T>> = grid.points().iter().map(|&x| cis(p * x * T::lit(0.5))).collect();
    let n = grid.len();
    let action = DMatrix::from_fn(n, n, |j, m| half[j] * s[(j, m)] * half[m]);
    let mut warnings = Vec::new();
    let span = grid.x_max() - grid.x_min();
    if q.abs() * T::lit(4.0) > span {
        warnings.push(Warning::ShiftOffGrid { shift: q.to_f64() });
    }
    Ok(OperatorMatrix::from_action(*grid, action)?.with_warnings(warnings))
}

/// `U(q,p)ψ`, i.e. `x ↦ e^{-iqp/2} e^{ipx} ψ(x - q)`, with a wrap-around check.
pub fn displace<T: Real>(psi: &SampledFunction1D<T>, q: T, p: T) -> SampledFunction1D<T> {
    let shifted = apply_symbol(psi, |k| cis(-q * k));
    let grid = *psi.grid();
    let global = cis(-q * p * T::lit(0.5));
    let values: Vec<Complex<T>> = shifted
        .values()
        .iter()
        .enumerate()
        .map(|(j, z)| z * cis(p * grid.point(j)) * global)
        .collect();
    let out = SampledFunction1D::new(grid, values).expect("finite");
    if out.edge_ratio() > T::lit(DEFAULT_DECAY_FLOOR) && psi.edge_ratio() <= T::lit(DEFAULT_DECAY_FLOOR) {
        out.with_warning(Warning::ShiftOffGrid { shift: q.to_f64() })
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{gaussian_ground, hermite_1};

    fn grid() -> LineGrid<f64> {
        // dx = dp
        LineGrid::centered((std::f64::consts::PI * 128.0).sqrt(), 128).unwrap()
    }

    #[test]
    fn gaussian_pi_and_profiles() {
        let g = grid();
        let pg = PhaseGrid::conjugate(&g);
        let a = pure_state_apodization(&gaussian_ground(&g), &pg).unwrap();
        let qs = g.points();
        let ps = pg.p_axis.points();
        let mut err: f64 = 0.0;
        for i in 0..128 {
            for k in 0..128 {
                let want = (-(qs[i] * qs[i] + ps[k] * ps[k]) / 4.0).exp();
                err = err.max((a.pi_values.at(i, k) - Complex::new(want, 0.0)).norm());
            }
        }
        assert!(err < 1e-8, "err {err}");
        for (j, z) in a.gamma.values().iter().enumerate() {
            let x = qs[j];
            assert!((z.re - (-x * x).exp() / std::f64::consts::PI.sqrt()).abs() < 1e-12);
        }
        assert!(a.even && a.symmetric);
        let r = &a.assumption_report;
        assert_eq!(r.nonneg_symplectic.status, CheckStatus::Holds);
        assert_eq!(r.smoothness.status, CheckStatus::Holds);
        assert_eq!(r.nonneg_partial_at_origin.status, CheckStatus::Holds);
    }

    #[test]
    fn unnormalized_state_is_rejected() {
        let g = grid();
        let psi = gaussian_ground(&g).scaled(Complex::new(2.0, 0.0));
        match pure_state_apodization(&psi, &PhaseGrid::conjugate(&g)) {
            Err(Error::NotNormalized { norm }) => assert!((norm - 2.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hermite_fails_first_assumption() {
        let g = grid();
        let a = pure_state_apodization(&hermite_1(&g), &PhaseGrid::conjugate(&g)).unwrap();
        assert_eq!(a.assumption_report.nonneg_symplectic.status, CheckStatus::Fails);
        assert!(a.assumption_report.nonneg_symplectic.extremum < -0.5);
    }

    #[test]
    fn weyl_wigner_profiles_are_spikes() {
        let g = grid();
        let a = weyl_wigner_apodization(&PhaseGrid::conjugate(&g)).unwrap();
        assert!(a.pi_values.values().iter().all(|z| *z == Complex::new(1.0, 0.0)));
        assert!((a.gamma.integral().re - 1.0).abs() < 1e-12);
        assert_eq!(a.assumption_report.nonneg_symplectic.status, CheckStatus::Distributional);
        let u = hermite_1(&g);
        let c = crate::transforms::convolve_1d(&u, &a.gamma).unwrap();
        assert_eq!(c.max_abs_diff(&u).unwrap(), 0.0);
    }

    #[test]
    fn wigner_of_ground_state() {
        let g = grid();
        let pg = PhaseGrid::conjugate(&g);
        let w = wigner_function(&gaussian_ground(&g), &pg).unwrap();
        let (qs, ps) = (g.points(), pg.p_axis.points());
        for i in 0..128 {
            for k in 0..128 {
                let want = (-(qs[i] * qs[i] + ps[k] * ps[k])).exp() / std::f64::consts::PI;
                assert!((w.at(i, k).re - want).abs() < 1e-12);
            }
        }
        assert!((w.integral().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn displacement_identities() {
        let g = grid();
        let id = displacement_matrix(&g, 0.0, 0.0).unwrap();
        assert!(id.max_action_diff(&OperatorMatrix::identity(g)).unwrap() < 1e-14);
        let u = displacement_matrix(&g, 1.0, 0.5).unwrap();
        let back = displacement_matrix(&g, -1.0, -0.5).unwrap();
        assert!(u.adjoint().max_action_diff(&back).unwrap() < 1e-10);
        let uu = u.adjoint().compose(&u).unwrap();
        assert!(uu.max_action_diff(&OperatorMatrix::identity(g)).unwrap() < 1e-8);
    }
}
