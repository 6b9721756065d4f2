use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::{LineGrid, SampledFunction1D};
use crate::mollifier::IntervalSet;
use crate::operator::{circulant_from_symbol, OperatorMatrix, SymbolParity};
use crate::scalar::{creal, czero, Real};

/// Residual bound asserted for weighted operators.
pub const WEIGHTED_HERMITIAN_TOL: f64 = 1e-10;

/// Discretization of `P = -i d/dx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Fourier multiplier on the periodic grid.
    #[default]
    Spectral,
    /// Second-order central differences with zero boundary values.
    CentralDiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// `A·P·A`
    Momentum,
    /// `A·P²·A`
    Kinetic,
}

/// `Q = diag(x_j)`.
pub fn position_matrix<T: Real>(grid: &LineGrid<T>) -> OperatorMatrix<T> {
    let xs: Vec<Complex<T>> = grid.points().into_iter().map(creal).collect();
    OperatorMatrix::multiplication(*grid, &xs).expect("finite grid")
}

fn momentum_action<T: Real>(grid: &LineGrid<T>, scheme: Scheme) -> DMatrix<Complex<T>> {
    let n = grid.len();
    match scheme {
        Scheme::Spectral => {
            let nyquist = grid.dual().x_min();
            circulant_from_symbol(
                grid,
                |p| if p == nyquist { czero() } else { creal(p) },
                SymbolParity::RealOdd,
            )
        }
        Scheme::CentralDiff => {
            let h = T::one() / (T::lit(2.0) * grid.dx());
            let mut m = DMatrix::from_element(n, n, czero());
            for j in 0..n - 1 {
                m[(j, j + 1)] = Complex::new(T::zero(), -h);
                m[(j + 1, j)] = Complex::new(T::zero(), h);
            }
            m
        }
    }
}

fn kinetic_action<T: Real>(grid: &LineGrid<T>, scheme: Scheme) -> DMatrix<Complex<T>> {
    let n = grid.len();
    match scheme {
        Scheme::Spectral => circulant_from_symbol(grid, |p| creal(p * p), SymbolParity::RealEven),
        Scheme::CentralDiff => {
            let h2 = T::one() / (grid.dx() * grid.dx());
            let mut m = DMatrix::from_element(n, n, czero());
            for j in 0..n {
                m[(j, j)] = creal(T::lit(2.0) * h2);
                if j + 1 < n {
                    m[(j, j + 1)] = creal(-h2);
                    m[(j + 1, j)] = creal(-h2);
                }
            }
            m
        }
    }
}

/// Action matrix of `Pⁿ` for `n ≤ 2`.
pub(crate) fn momentum_power_action<T: Real>(grid: &LineGrid<T>, power: u32, scheme: Scheme) -> DMatrix<Complex<T>> {
    match power {
        0 => DMatrix::identity(grid.len(), grid.len()),
        1 => momentum_action(grid, scheme),
        _ => kinetic_action(grid, scheme),
    }
}

pub fn momentum_matrix<T: Real>(grid: &LineGrid<T>, scheme: Scheme) -> OperatorMatrix<T> {
    OperatorMatrix::from_action(*grid, momentum_action(grid, scheme)).expect("finite")
}

pub fn kinetic_matrix<T: Real>(grid: &LineGrid<T>, scheme: Scheme) -> OperatorMatrix<T> {
    OperatorMatrix::from_action(*grid, kinetic_action(grid, scheme)).expect("finite")
}

/// `P_a = A·P·A` or `K_a = A·P²·A` with `A = diag(a)`.
#[derive(Debug, Clone)]
pub struct WeightedOperator<T: Real> {
    pub a: SampledFunction1D<T>,
    pub kind: WeightKind,
    pub scheme: Scheme,
    pub matrix: OperatorMatrix<T>,
    pub a_max: T,
}

pub fn weighted_operator<T: Real>(
    a: &SampledFunction1D<T>,
    kind: WeightKind,
    grid: &LineGrid<T>,
    scheme: Scheme,
) -> Result<WeightedOperator<T>> {
    if !a.grid().matches(grid) {
        return Err(Error::GridMismatch("weight and operator grids differ".into()));
    }
    let peak = a.max_abs();
    if a.values().iter().any(|z| z.im.abs() > T::lit(1e-12) * peak.max(T::one())) {
        return Err(Error::Unsupported("weight must be real".into()));
    }
    let mut re = a.real_parts();
    let min = re.iter().fold(T::max_value().unwrap_or(T::one()), |m, &v| m.min(v));
    // roundoff negatives from transform-built weights are clamped
    if min < -T::lit(1e-12) * peak.max(T::one()) {
        return Err(Error::NegativeWeight { min: min.to_f64() });
    }
    for v in re.iter_mut() {
        *v = v.max(T::zero());
    }
    let base = match kind {
        WeightKind::Momentum => momentum_action(grid, scheme),
        WeightKind::Kinetic => kinetic_action(grid, scheme),
    };
    let n = grid.len();
    let scaled = DMatrix::from_fn(n, n, |i, j| base[(i, j)] * (re[i] * re[j]));
    let sym = (&scaled + scaled.adjoint()) * creal(T::lit(0.5));
    let matrix = OperatorMatrix::from_action(*grid, sym)?.with_warnings(a.warnings().iter().cloned());
    let residual = matrix.hermitian_residual();
    if residual >= T::lit(WEIGHTED_HERMITIAN_TOL) {
        return Err(Error::NotHermitian {
            residual: residual.to_f64(),
        });
    }
    Ok(WeightedOperator {
        a: a.clone().into_real_part(),
        kind,
        scheme,
        matrix,
        a_max: re.iter().fold(T::zero(), |m, &v| m.max(v)),
    })
}

/// Eigen-decomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct SpectrumResult<T: Real> {
    pub grid: LineGrid<T>,
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Columns normalized so that `Σ dx |v_j|² = 1`.
    pub eigenvectors: DMatrix<Complex<T>>,
    /// `‖Mv - λv‖₂` for Euclidean-unit `v`.
    pub residuals: Vec<T>,
}

impl<T: Real> SpectrumResult<T> {
    pub fn eigenvector(&self, k: usize) -> SampledFunction1D<T> {
        SampledFunction1D::new(self.grid, self.eigenvectors.column(k).iter().copied().collect()).expect("finite")
    }

    /// Quadrature mass of eigenvector `k` inside `set`.
    pub fn mass_in(&self, k: usize, set: &IntervalSet<T>) -> T {
        let dx = self.grid.dx();
        self.eigenvectors
            .column(k)
            .iter()
            .enumerate()
            .filter(|(j, _)| set.contains(self.grid.point(*j)))
            .fold(T::zero(), |acc, (_, z)| acc + z.norm_sqr() * dx)
    }
}

/// Full Hermitian eigensolve of the action matrix, optionally keeping the lowest `k` pairs.
pub fn spectrum<T: Real>(m: &OperatorMatrix<T>, k: Option<usize>) -> Result<SpectrumResult<T>> {
    if !m.hermitian_flag() {
        return Err(Error::NotHermitian {
            residual: m.hermitian_residual().to_f64(),
        });
    }
    let action = m.action();
    let n = action.nrows();
    let (values, vectors): (Vec<T>, DMatrix<Complex<T>>) = if m.is_real() {
        let re = action.map(|z| z.re);
        let sym = (&re + re.transpose()) * T::lit(0.5);
        let eig = SymmetricEigen::new(sym);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(creal))
    } else {
        let herm = (&action + action.adjoint()) * creal(T::lit(0.5));
        let eig = SymmetricEigen::new(herm);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let keep = k.unwrap_or(n).min(n);
    let order = &order[..keep];
    let inv_root = creal(T::one() / m.grid().dx().sqrt());
    let mut eigenvalues = Vec::with_capacity(keep);
    let mut residuals = Vec::with_capacity(keep);
    let mut eigenvectors = DMatrix::from_element(n, keep, czero());
    for (c, &idx) in order.iter().enumerate() {
        let lambda = values[idx];
        let v = vectors.column(idx);
        let r = &action * v - v * creal(lambda);
        residuals.push(r.norm());
        eigenvalues.push(lambda);
        eigenvectors.set_column(c, &(v * inv_root));
    }
    Ok(SpectrumResult {
        grid: *m.grid(),
        eigenvalues,
        eigenvectors,
        residuals,
    })
}

/// Dirichlet levels `E_n = (nπ/(β - α))²`, `n = 1..=n_max`.
pub fn well_reference_spectrum<T: Real>(set: &IntervalSet<T>, n_max: usize) -> Vec<T> {
    (1..=n_max)
        .map(|n| {
            let k = T::idx(n) * T::pi() / set.width();
            k * k
        })
        .collect()
}

/// One matched level in a spectral comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow<T> {
    pub sharpness: T,
    pub level: usize,
    pub eigenvalue: T,
    pub reference: T,
    /// `(λ - E_n)/E_n`.
    pub relative_gap: T,
    pub mass_in_set: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralComparison<T> {
    pub rows: Vec<ComparisonRow<T>>,
    /// Ground-level gap magnitudes decrease monotonically along the sweep.
    pub ground_trend_monotone: bool,
}

/// Fraction of quadrature mass inside the interval required for a mode to count as well-like.
pub const MASS_THRESHOLD: f64 = 0.5;

/// Tabulates the lowest well-like eigenvalues of each `K_a` against the Dirichlet levels.
///
/// `family` is ordered from least to most sharp.
pub fn compare_spectra<T: Real>(
    family: &[(T, WeightedOperator<T>)],
    set: &IntervalSet<T>,
    levels: usize,
) -> Result<SpectralComparison<T>> {
    let reference = well_reference_spectrum(set, levels);
    let mut rows = Vec::new();
    let mut ground_gaps = Vec::new();
    for (sharpness, op) in family {
        let spec = spectrum(&op.matrix, None)?;
        let mut level = 0;
        for k in 0..spec.eigenvalues.len() {
            if level == levels {
                break;
            }
            let mass = spec.mass_in(k, set);
            if mass < T::lit(MASS_THRESHOLD) {
                continue;
            }
            let lambda = spec.eigenvalues[k];
            let e = reference[level];
            let gap = (lambda - e) / e;
            if level == 0 {
                ground_gaps.push(gap.abs());
            }
            rows.push(ComparisonRow {
                sharpness: *sharpness,
                level: level + 1,
                eigenvalue: lambda,
                reference: e,
                relative_gap: gap,
                mass_in_set: mass,
            });
            level += 1;
        }
    }
    let monotone = ground_gaps.windows(2).all(|w| w[1] <= w[0]);
    if !monotone {
        log::warn!("ground-level gap is not monotone along the sharpness sweep: {ground_gaps:?}",
            ground_gaps = ground_gaps.iter().map(|g| g.to_f64()).collect::<Vec<_>>());
    }
    Ok(SpectralComparison {
        rows,
        ground_trend_monotone: monotone,
    })
}
