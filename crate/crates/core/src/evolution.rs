use nalgebra::{Complex, DMatrix, DVector};

use crate::analysis::{spectrum, well_reference_spectrum};
use crate::error::{Error, Result};
use crate::grid::{LineGrid, SampledFunction1D, Warning};
use crate::mollifier::IntervalSet;
use crate::operator::OperatorMatrix;
use crate::scalar::{cis, creal, czero, Real};

/// Tolerance on the mass of an initial well state outside its interval.
pub const SUPPORT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables<T> {
    pub norm: T,
    pub mean_x: T,
    pub mean_x2: T,
    /// Mass outside the interval of interest, when one is given.
    pub leakage: Option<T>,
    pub energy: T,
}

#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<SampledFunction1D<T>>,
    pub observables: Vec<Observables<T>>,
    pub warnings: Vec<Warning>,
}

/// `∫_{ℝ∖E} |ψ|²` by grid quadrature.
pub fn leakage<T: Real>(psi: &SampledFunction1D<T>, set: &IntervalSet<T>) -> T {
    let g = psi.grid();
    psi.values()
        .iter()
        .enumerate()
        .filter(|(j, _)| !set.contains(g.point(*j)))
        .fold(T::zero(), |acc, (_, z)| acc + z.norm_sqr())
        * g.dx()
}

fn moments<T: Real>(psi: &SampledFunction1D<T>) -> (T, T, T) {
    let g = psi.grid();
    let (mut n, mut m1, mut m2) = (T::zero(), T::zero(), T::zero());
    for (j, z) in psi.values().iter().enumerate() {
        let x = g.point(j);
        let r = z.norm_sqr();
        n += r;
        m1 += r * x;
        m2 += r * x * x;
    }
    let dx = g.dx();
    ((n * dx).sqrt(), m1 * dx, m2 * dx)
}

fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if times.windows(2).all(|w| w[1] > w[0]) && times.iter().all(|t| t.is_finite()) {
        Ok(())
    } else {
        Err(Error::Unsupported("times must be finite and strictly increasing".into()))
    }
}

fn check_normalized<T: Real>(psi: &SampledFunction1D<T>) -> Result<()> {
    let n = psi.l2_norm();
    if (n - T::one()).abs() > T::lit(1e-8) {
        return Err(Error::NotNormalized { norm: n.to_f64() });
    }
    Ok(())
}

/// One eigendecomposition of a Hermitian `H`, reused for every time.
#[derive(Debug, Clone)]
pub struct EigenPropagator<T: Real> {
    hamiltonian: OperatorMatrix<T>,
    eigenvalues: Vec<T>,
    /// Euclidean-orthonormal columns.
    vectors: DMatrix<Complex<T>>,
}

impl<T: Real> EigenPropagator<T> {
    pub fn new(h: &OperatorMatrix<T>) -> Result<Self> {
        if !h.hermitian_flag() {
            return Err(Error::NotHermitian {
                residual: h.hermitian_residual().to_f64(),
            });
        }
        let s = spectrum(h, None)?;
        let root = creal(h.grid().dx().sqrt());
        Ok(Self {
            hamiltonian: h.clone(),
            eigenvalues: s.eigenvalues,
            vectors: s.eigenvectors * root,
        })
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// `e^{-itH} ψ`.
    pub fn evolve(&self, psi: &SampledFunction1D<T>, t: T) -> Result<SampledFunction1D<T>> {
        if !psi.grid().matches(self.hamiltonian.grid()) {
            return Err(Error::GridMismatch("state grid differs from the Hamiltonian grid".into()));
        }
        let v = DVector::from_column_slice(psi.values());
        let mut c = self.vectors.adjoint() * v;
        for (k, z) in c.iter_mut().enumerate() {
            *z *= cis(-self.eigenvalues[k] * t);
        }
        let out = &self.vectors * c;
        SampledFunction1D::new(*psi.grid(), out.iter().copied().collect())
    }

    pub fn propagate(
        &self,
        psi0: &SampledFunction1D<T>,
        times: &[T],
        set: Option<&IntervalSet<T>>,
    ) -> Result<Trajectory<T>> {
        check_times(times)?;
        check_normalized(psi0)?;
        let mut states = Vec::with_capacity(times.len());
        let mut observables = Vec::with_capacity(times.len());
        for &t in times {
            let psi = self.evolve(psi0, t)?;
            let (norm, mean_x, mean_x2) = moments(&psi);
            observables.push(Observables {
                norm,
                mean_x,
                mean_x2,
                leakage: set.map(|s| leakage(&psi, s)),
                energy: self.hamiltonian.expectation(&psi)?.re,
            });
            states.push(psi);
        }
        Ok(Trajectory {
            times: times.to_vec(),
            states,
            observables,
            warnings: self.hamiltonian.warnings().to_vec(),
        })
    }
}

/// Eigenbasis propagation under a Hermitian operator.
pub fn propagate_eigenbasis<T: Real>(
    h: &OperatorMatrix<T>,
    psi0: &SampledFunction1D<T>,
    times: &[T],
) -> Result<Trajectory<T>> {
    EigenPropagator::new(h)?.propagate(psi0, times, None)
}

/// Dirichlet sine basis on the grid nodes strictly inside `E`.
struct WellBasis<T: Real> {
    nodes: Vec<usize>,
    /// `modes[(j, n)]`, quadrature-orthonormal.
    modes: DMatrix<T>,
    energies: Vec<T>,
    misalignment: T,
}

fn well_basis<T: Real>(grid: &LineGrid<T>, set: &IntervalSet<T>) -> Result<WellBasis<T>> {
    let nodes: Vec<usize> = (0..grid.len()).filter(|&j| set.contains(grid.point(j))).collect();
    if nodes.len() < 2 {
        return Err(Error::OutOfGrid("interval holds fewer than two grid nodes".into()));
    }
    let m = nodes.len();
    let dx = grid.dx();
    let alpha_eff = grid.point(nodes[0]) - dx;
    let width_eff = T::idx(m + 1) * dx;
    let norm = (T::lit(2.0) / width_eff).sqrt();
    let modes = DMatrix::from_fn(m, m, |j, n| {
        let x = grid.point(nodes[j]);
        norm * (T::idx(n + 1) * T::pi() * (x - alpha_eff) / width_eff).sin()
    });
    let misalignment = (alpha_eff - set.alpha).abs().max((alpha_eff + width_eff - set.beta).abs());
    Ok(WellBasis {
        nodes,
        modes,
        energies: well_reference_spectrum(set, m),
        misalignment,
    })
}

/// Infinite-well evolution `e^{-itP²}` on `L²(E)` by sine-mode expansion.
pub fn well_propagate<T: Real>(set: &IntervalSet<T>, psi0: &SampledFunction1D<T>, times: &[T]) -> Result<Trajectory<T>> {
    check_times(times)?;
    let outside = leakage(psi0, set);
    if outside > T::lit(SUPPORT_TOL) {
        return Err(Error::SupportViolation { mass: outside.to_f64() });
    }
    check_normalized(psi0)?;
    let grid = *psi0.grid();
    let basis = well_basis(&grid, set)?;
    let dx = grid.dx();
    let m = basis.nodes.len();
    let coeffs: Vec<Complex<T>> = (0..m)
        .map(|n| {
            basis
                .nodes
                .iter()
                .enumerate()
                .fold(czero(), |acc, (j, &node)| acc + psi0.values()[node] * basis.modes[(j, n)])
                * dx
        })
        .collect();
    let mut warnings = Vec::new();
    if basis.misalignment > T::lit(1e-9) * dx.max(T::one()) {
        warnings.push(Warning::Misaligned {
            context: "well basis",
            offset: basis.misalignment.to_f64(),
        });
    }
    let mut states = Vec::with_capacity(times.len());
    let mut observables = Vec::with_capacity(times.len());
    for &t in times {
        let phased: Vec<Complex<T>> = coeffs
            .iter()
            .zip(&basis.energies)
            .map(|(c, &e)| c * cis(-e * t))
            .collect();
        let mut values = vec![czero(); grid.len()];
        for (j, &node) in basis.nodes.iter().enumerate() {
            values[node] = phased
                .iter()
                .enumerate()
                .fold(czero(), |acc, (n, c)| acc + c * basis.modes[(j, n)]);
        }
        let psi = SampledFunction1D::new(grid, values)?;
        let (norm, mean_x, mean_x2) = moments(&psi);
        let energy = coeffs
            .iter()
            .zip(&basis.energies)
            .fold(T::zero(), |acc, (c, &e)| acc + c.norm_sqr() * e);
        observables.push(Observables {
            norm,
            mean_x,
            mean_x2,
            leakage: Some(leakage(&psi, set)),
            energy,
        });
        states.push(psi);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        observables,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionRow<T> {
    pub sharpness: T,
    pub t: T,
    /// `|⟨ψ_well, ψ_a⟩_{L²(E)}| / ‖ψ_a|_E‖`.
    pub fidelity: T,
    /// `‖ψ_a|_E‖`, the factor removed in the fidelity.
    pub renormalization: T,
    pub leakage: T,
    pub mean_x_gap: T,
    pub norm: T,
    pub energy: T,
}

#[derive(Debug, Clone)]
pub struct EvolutionComparison<T: Real> {
    pub rows: Vec<EvolutionRow<T>>,
    /// Final-time fidelity increases along the sharpness sweep.
    pub trend_monotone: bool,
    pub warnings: Vec<Warning>,
}

/// Well evolution against `e^{-itH_s}` for a family of line Hamiltonians ordered by sharpness.
pub fn compare_evolutions<T: Real>(
    set: &IntervalSet<T>,
    family: &[(T, OperatorMatrix<T>)],
    psi0: &SampledFunction1D<T>,
    times: &[T],
) -> Result<EvolutionComparison<T>> {
    let well = well_propagate(set, psi0, times)?;
    let grid = *psi0.grid();
    let inside: Vec<usize> = (0..grid.len()).filter(|&j| set.contains(grid.point(j))).collect();
    let dx = grid.dx();
    let mut rows = Vec::new();
    let mut warnings = well.warnings.clone();
    let mut finals = Vec::new();
    for (sharpness, h) in family {
        let traj = EigenPropagator::new(h)?.propagate(psi0, times, Some(set))?;
        warnings.extend(traj.warnings.iter().cloned());
        for (k, &t) in times.iter().enumerate() {
            let a = &traj.states[k];
            let w = &well.states[k];
            let mut overlap: Complex<T> = czero();
            let mut mass = T::zero();
            for &j in &inside {
                overlap += w.values()[j].conj() * a.values()[j];
                mass += a.values()[j].norm_sqr();
            }
            let renorm = (mass * dx).sqrt();
            let fidelity = if renorm > T::zero() {
                (overlap.norm_sqr().sqrt() * dx / renorm).min(T::one())
            } else {
                T::zero()
            };
            let obs = traj.observables[k];
            rows.push(EvolutionRow {
                sharpness: *sharpness,
                t,
                fidelity,
                renormalization: renorm,
                leakage: obs.leakage.unwrap_or(T::zero()),
                mean_x_gap: obs.mean_x - well.observables[k].mean_x,
                norm: obs.norm,
                energy: obs.energy,
            });
            if k + 1 == times.len() {
                finals.push(fidelity);
            }
        }
    }
    let monotone = finals.windows(2).all(|w| w[1] >= w[0]);
    if !monotone {
        log::warn!(
            "final-time fidelity is not monotone along the sharpness sweep: {:?}",
            finals.iter().map(|f| f.to_f64()).collect::<Vec<_>>()
        );
    }
    Ok(EvolutionComparison {
        rows,
        trend_monotone: monotone,
        warnings,
    })
}
