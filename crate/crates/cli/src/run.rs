//! One pipeline per command; everything is computed before anything is written.

use nalgebra::Complex;
use serde_json::json;
use wh_quant::analysis::{compare_spectra, spectrum, weighted_operator, Scheme, WeightKind};
use wh_quant::apodization::{
    pure_state_apodization, validate_assumptions, weyl_wigner_apodization, Apodization, ApodizationKind,
    AssumptionCheck, CheckStatus,
};
use wh_quant::deficiency::{deficiency_analysis, deficiency_from_log_weight, BranchReport, DomainKind};
use wh_quant::evolution::{compare_evolutions, well_propagate};
use wh_quant::mollifier::{gaussian_window_ln, indicator_samples, smooth_indicator};
use wh_quant::portrait::{coherent_overlap_min, portrait_convolution, portrait_trace};
use wh_quant::quantizer::{coefficient_profiles, kernel, kernel_u_pn, quantize_u_pn, window_function, PositionWeight};
use wh_quant::states::{from_table, gaussian_ground, gaussian_packet, hermite_1, normalize};
use wh_quant::{LineGrid, PhaseGrid, SampledFunction1D, SampledFunction2D};

use crate::config::{
    ApodizationKindConfig, Command, DomainConfig, LoadedConfig, OperatorConfig, PsiPreset, SchemeConfig,
    SymbolConfig, WeightConfig,
};
use crate::output::{Cell, Table};
use crate::plot::{heatmap, line_plot, Series};

/// Refinement used by the kernel route cross-check in `quantize`.
const KERNEL_REFINE: usize = 4;
/// Portrait rows kept per axis in CSV output.
const PORTRAIT_ROWS: usize = 256;
const SAMPLE_AXIS: [f64; 5] = [-3.0, -1.5, 0.0, 1.5, 3.0];

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Numerical(#[from] wh_quant::Error),
}

#[derive(Debug, Default)]
pub struct Artifacts {
    pub tables: Vec<Table>,
    /// `(file name, svg)`.
    pub plots: Vec<(String, String)>,
    pub warnings: Vec<String>,
    pub summary: serde_json::Value,
}

impl Artifacts {
    fn warn_all<'a>(&mut self, ws: impl IntoIterator<Item = &'a wh_quant::Warning>) {
        for w in ws {
            let s = w.to_string();
            if !self.warnings.contains(&s) {
                self.warnings.push(s);
            }
        }
    }

    fn warn(&mut self, s: String) {
        if !self.warnings.contains(&s) {
            self.warnings.push(s);
        }
    }
}

fn scheme(cfg: &LoadedConfig) -> Scheme {
    match cfg.config.scheme {
        SchemeConfig::Spectral => Scheme::Spectral,
        SchemeConfig::CentralDiff => Scheme::CentralDiff,
    }
}

fn read_table(cfg: &LoadedConfig) -> Result<Vec<(f64, f64)>, RunError> {
    let path = cfg.psi_path().expect("validated");
    let text = std::fs::read_to_string(&path).map_err(|e| RunError::Invalid(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| RunError::Invalid(format!("{} line {}: {e}", path.display(), i + 1)))?;
        if nums.len() != 2 {
            return Err(RunError::Invalid(format!("{} line {}: expected two columns", path.display(), i + 1)));
        }
        rows.push((nums[0], nums[1]));
    }
    if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(RunError::Invalid(format!("{}: x column must increase", path.display())));
    }
    Ok(rows)
}

/// Fiducial state from a preset or a table; table problems count as invalid input.
pub fn fiducial(cfg: &LoadedConfig) -> Result<Option<SampledFunction1D<f64>>, RunError> {
    let Some(a) = cfg.config.apodization.as_ref() else {
        return Ok(None);
    };
    let g = &cfg.grid;
    Ok(match (a.kind, a.psi_preset) {
        (ApodizationKindConfig::WeylWigner, _) => None,
        (_, Some(PsiPreset::GaussianGround)) => Some(gaussian_ground(g)),
        (_, Some(PsiPreset::Hermite1)) => Some(hermite_1(g)),
        (_, None) => {
            let rows = read_table(cfg)?;
            let psi = from_table(g, &rows).map_err(|e| RunError::Invalid(format!("psi_file: {e}")))?;
            Some(normalize(&psi).map_err(|e| RunError::Invalid(format!("psi_file: {e}")))?)
        }
    })
}

fn apodization(cfg: &LoadedConfig, psi: Option<&SampledFunction1D<f64>>) -> Result<Apodization<f64>, RunError> {
    let pg = PhaseGrid::conjugate(&cfg.grid);
    Ok(match psi {
        None => weyl_wigner_apodization(&pg)?,
        Some(psi) => pure_state_apodization(psi, &pg)?,
    })
}

/// The weight `a` for one σ, as samples and as a quantizer weight.
fn weight(cfg: &LoadedConfig, sigma: f64) -> Result<(SampledFunction1D<f64>, PositionWeight<f64>), RunError> {
    let set = cfg.set();
    let g = &cfg.grid;
    Ok(match cfg.config.weight {
        WeightConfig::SmoothIndicator => {
            let u = smooth_indicator(set, sigma, g)?;
            (u.values.clone(), PositionWeight::Indicator(u))
        }
        WeightConfig::GaussianWindow => {
            let (a, b) = (set.alpha, set.beta);
            let f = SampledFunction1D::from_real_fn(*g, |x| gaussian_window_ln(a, b, x).exp())?;
            (f.clone(), PositionWeight::Sampled(f))
        }
        WeightConfig::Indicator => {
            let f = indicator_samples(&set, g);
            (f.clone(), PositionWeight::Sampled(f))
        }
        WeightConfig::Constant => {
            let f = SampledFunction1D::from_real_fn(*g, |_| 1.0)?;
            (f.clone(), PositionWeight::Sampled(f))
        }
    })
}

fn status(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Holds => "holds",
        CheckStatus::Fails => "fails",
        CheckStatus::Distributional => "distributional",
    }
}

pub fn run(cfg: &LoadedConfig) -> Result<Artifacts, RunError> {
    let psi = fiducial(cfg)?;
    let mut out = Artifacts::default();
    match cfg.config.command {
        Command::Window => window(cfg, psi.as_ref(), &mut out)?,
        Command::Quantize => quantize(cfg, psi.as_ref(), &mut out)?,
        Command::Spectrum => spectra(cfg, &mut out)?,
        Command::Deficiency => deficiency(cfg, &mut out)?,
        Command::Portrait => portrait(cfg, psi.as_ref(), &mut out)?,
        Command::Evolve => evolve(cfg, &mut out)?,
        Command::ValidateApodization => validate_apodization(cfg, psi.as_ref(), &mut out)?,
    }
    Ok(out)
}

fn window(cfg: &LoadedConfig, psi: Option<&SampledFunction1D<f64>>, out: &mut Artifacts) -> Result<(), RunError> {
    let apod = apodization(cfg, psi)?;
    let mut table = Table::new("window", vec!["sigma", "x", "u", "w"]);
    let mut series = Vec::new();
    for sigma in cfg.sigmas() {
        let (u, uw) = weight(cfg, sigma)?;
        let w = window_function(&uw, &apod)?;
        out.warn_all(u.warnings());
        out.warn_all(w.warnings());
        let g = &cfg.grid;
        for j in 0..g.len() {
            table.push(vec![sigma.into(), g.point(j).into(), u.values()[j].re.into(), w.values()[j].re.into()]);
        }
        series.push(Series {
            label: format!("w, sigma={sigma}"),
            points: (0..g.len()).map(|j| (g.point(j), w.values()[j].re)).collect(),
        });
    }
    out.tables.push(table);
    if cfg.config.emit_plots {
        let set = cfg.set();
        let title = format!("window function, E=({}, {})", set.alpha, set.beta);
        out.plots.push(("window.svg".into(), line_plot(&title, "x", "w(x)", &series)));
    }
    Ok(())
}

fn quantize(cfg: &LoadedConfig, psi: Option<&SampledFunction1D<f64>>, out: &mut Artifacts) -> Result<(), RunError> {
    let apod = apodization(cfg, psi)?;
    let sigmas = cfg.sigmas();
    if sigmas.len() != 1 {
        return Err(RunError::Invalid("`quantize` takes a single sigma".into()));
    }
    let sigma = sigmas[0];
    let g = cfg.grid;
    let (_, u) = weight(cfg, sigma)?;
    let profiles = coefficient_profiles(&u, &apod)?;
    let c_tilde = profiles.c_tilde();
    let v = profiles.second_order_potential();
    let ccr = profiles.deformed_ccr();
    let mut table = Table::new(
        "profiles",
        vec!["x", "w", "b", "c_tilde", "second_order_potential", "ccr_diagonal"],
    );
    for j in 0..g.len() {
        table.push(vec![
            g.point(j).into(),
            profiles.w.values()[j].re.into(),
            profiles.b.values()[j].re.into(),
            c_tilde.values()[j].re.into(),
            v.values()[j].re.into(),
            ccr[j].im.into(),
        ]);
    }
    out.tables.push(table);

    let power = cfg.config.power;
    let a = quantize_u_pn(&u, power, &apod, &g)?;
    out.warn_all(a.warnings());
    let residual = a.hermitian_residual();
    if residual > cfg.tolerance("hermitian", 1e-7) {
        out.warn(format!("hermitian residual {residual:e} above tolerance"));
    }
    let route = if sigma > 0.0 {
        let k = kernel_u_pn(&u, power, &apod, &g, KERNEL_REFINE)?;
        Cell::Num(a.max_action_diff(&k)?)
    } else {
        Cell::Text("n/a".into())
    };
    let tr = a.trace();
    let mut summary = Table::new(
        "operator",
        vec!["power", "sigma", "hermitian_residual", "trace_re", "trace_im", "kernel_route_gap"],
    );
    summary.push(vec![
        (power as usize).into(),
        sigma.into(),
        residual.into(),
        tr.re.into(),
        tr.im.into(),
        route.clone(),
    ]);
    out.tables.push(summary);
    out.summary = json!({
        "power": power,
        "hermitian_residual": residual,
        "kernel_route_gap": match route { Cell::Num(v) => json!(v), _ => json!(null) },
    });
    if cfg.config.emit_plots {
        let pts = g.points();
        let act = a.action();
        let vals: Vec<Vec<f64>> = (0..g.len()).map(|i| (0..g.len()).map(|k| act[(i, k)].norm()).collect()).collect();
        out.plots.push((
            "operator.svg".into(),
            heatmap(&format!("|A| for u p^{power}"), "x", "x'", &pts, &pts, &vals),
        ));
        let series = vec![
            Series {
                label: "w".into(),
                points: pts.iter().zip(profiles.w.values()).map(|(x, z)| (*x, z.re)).collect(),
            },
            Series {
                label: "b".into(),
                points: pts.iter().zip(profiles.b.values()).map(|(x, z)| (*x, z.re)).collect(),
            },
        ];
        out.plots.push(("profiles.svg".into(), line_plot("coefficient profiles", "x", "value", &series)));
    }
    Ok(())
}

fn weight_kind(cfg: &LoadedConfig) -> WeightKind {
    match cfg.config.operator {
        OperatorConfig::Momentum => WeightKind::Momentum,
        OperatorConfig::Kinetic => WeightKind::Kinetic,
    }
}

fn spectra(cfg: &LoadedConfig, out: &mut Artifacts) -> Result<(), RunError> {
    let set = cfg.set();
    let g = cfg.grid;
    let sigmas = cfg.sigmas();
    let levels = cfg.config.levels.unwrap_or(8).min(g.len());
    let kind = weight_kind(cfg);
    let mut family = Vec::new();
    let mut series = Vec::new();
    for (i, &sigma) in sigmas.iter().enumerate() {
        let (a, _) = weight(cfg, sigma)?;
        out.warn_all(a.warnings());
        let op = weighted_operator(&a, kind, &g, scheme(cfg))?;
        let s = spectrum(&op.matrix, Some(levels))?;
        let scale = op.matrix.action().iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let tol = cfg.tolerance("residual", 1e-8) * scale.max(1.0);
        let name = if sigmas.len() == 1 { "spectrum".to_string() } else { format!("spectrum_{i:02}") };
        let mut table = Table::new(name, vec!["index", "eigenvalue", "residual", "mass_in_E"]);
        for k in 0..s.eigenvalues.len() {
            if s.residuals[k] > tol {
                out.warn(format!("sigma={sigma}: residual {:e} at index {k}", s.residuals[k]));
            }
            table.push(vec![k.into(), s.eigenvalues[k].into(), s.residuals[k].into(), s.mass_in(k, &set).into()]);
        }
        out.tables.push(table);
        series.push(Series {
            label: format!("sigma={sigma}"),
            points: s.eigenvalues.iter().enumerate().map(|(k, &e)| (k as f64, e)).collect(),
        });
        family.push((sigma, op));
    }
    if kind == WeightKind::Kinetic {
        let cmp = compare_spectra(&family, &set, levels)?;
        let mut table = Table::new(
            "comparison",
            vec!["sigma", "level", "eigenvalue", "reference", "relative_gap", "mass_in_E"],
        );
        for r in &cmp.rows {
            table.push(vec![
                r.sharpness.into(),
                r.level.into(),
                r.eigenvalue.into(),
                r.reference.into(),
                r.relative_gap.into(),
                r.mass_in_set.into(),
            ]);
        }
        if !table.rows.is_empty() {
            out.tables.push(table);
        }
        if !cmp.ground_trend_monotone {
            out.warn("ground-level gap is not monotone along the sigma sweep".into());
        }
        out.summary = json!({ "ground_trend_monotone": cmp.ground_trend_monotone });
    }
    if cfg.config.emit_plots {
        out.plots.push(("spectrum.svg".into(), line_plot("lowest eigenvalues", "index", "eigenvalue", &series)));
    }
    Ok(())
}

fn branch_rows(table: &mut Table, sign: &str, b: &BranchReport) {
    for &(l, m) in &b.window_log_mass {
        table.push(vec![sign.into(), l.into(), m.into()]);
    }
}

fn index_cell(n: Option<usize>) -> Cell {
    match n {
        Some(n) => n.into(),
        None => "undetermined".into(),
    }
}

fn deficiency(cfg: &LoadedConfig, out: &mut Artifacts) -> Result<(), RunError> {
    let set = cfg.set();
    let g: LineGrid<f64> = cfg.grid;
    let domain = match cfg.config.domain {
        DomainConfig::WholeLine => DomainKind::WholeLine,
        DomainConfig::Interval => DomainKind::Interval(set),
    };
    let sigma = cfg.sigmas()[0];
    let report = match cfg.config.weight {
        // the window underflows in the tails; use its logarithm directly
        WeightConfig::GaussianWindow => {
            let ln_a: Vec<f64> = g.points().iter().map(|&x| gaussian_window_ln(set.alpha, set.beta, x)).collect();
            deficiency_from_log_weight(&g, &ln_a, &domain)?
        }
        _ => {
            let (a, _) = weight(cfg, sigma)?;
            deficiency_analysis(&a, &domain)?
        }
    };
    let (n_plus, n_minus) = match report.indices_estimate {
        Some((p, m)) => (Some(p), Some(m)),
        None => (
            report.plus_branch.normalizable.map(usize::from),
            report.minus_branch.normalizable.map(usize::from),
        ),
    };
    let mut table = Table::new(
        "deficiency",
        vec!["verdict", "n_plus", "n_minus", "plus_log_growth", "minus_log_growth"],
    );
    table.push(vec![
        report.verdict.as_str().into(),
        index_cell(n_plus),
        index_cell(n_minus),
        report.plus_branch.log_norm_growth.into(),
        report.minus_branch.log_norm_growth.into(),
    ]);
    out.tables.push(table);
    let mut branches = Table::new("branches", vec!["sign", "half_width", "log_mass"]);
    branch_rows(&mut branches, "plus", &report.plus_branch);
    branch_rows(&mut branches, "minus", &report.minus_branch);
    if !branches.rows.is_empty() {
        out.tables.push(branches);
    }
    if !report.zeros.is_empty() {
        out.warn(format!("weight vanishes at {} nodes in range", report.zeros.len()));
    }
    out.summary = json!({
        "verdict": report.verdict.as_str(),
        "indices": report.indices_estimate.map(|(p, m)| vec![p, m]),
    });
    Ok(())
}

fn symbol(cfg: &LoadedConfig, pg: PhaseGrid<f64>) -> Result<SampledFunction2D<f64>, RunError> {
    let f = match cfg.config.symbol {
        SymbolConfig::Position => SampledFunction2D::from_real_fn(pg, |q: f64, _| q),
        SymbolConfig::Momentum => SampledFunction2D::from_real_fn(pg, |_, p: f64| p),
        SymbolConfig::Gaussian => SampledFunction2D::from_real_fn(pg, |q: f64, p: f64| (-(q * q + p * p) / 2.0).exp()),
        SymbolConfig::PositionGaussian => {
            SampledFunction2D::from_real_fn(pg, |q: f64, p: f64| q * (-(q * q + p * p) / 8.0).exp())
        }
    };
    Ok(f?)
}

fn portrait(cfg: &LoadedConfig, psi: Option<&SampledFunction1D<f64>>, out: &mut Artifacts) -> Result<(), RunError> {
    let apod = apodization(cfg, psi)?;
    let pg = *apod.grid();
    let f = symbol(cfg, pg)?;
    let conv = portrait_convolution(&f, &apod)?;
    let v = conv.grid_values().expect("convolution portraits are gridded");
    out.warn_all(v.warnings());
    let n = pg.q_axis.len();
    let stride = n.div_ceil(PORTRAIT_ROWS).max(1);
    let mut table = Table::new("portrait", vec!["q", "p", "value_re", "value_im"]);
    for i in (0..n).step_by(stride) {
        for k in (0..n).step_by(stride) {
            let z = v.at(i, k);
            table.push(vec![pg.q_axis.point(i).into(), pg.p_axis.point(k).into(), z.re.into(), z.im.into()]);
        }
    }
    out.tables.push(table);
    let decaying = matches!(cfg.config.symbol, SymbolConfig::Gaussian | SymbolConfig::PositionGaussian);
    let mut max_gap = None;
    if apod.kind == ApodizationKind::PureState && decaying {
        let a = kernel(&f, &apod, &cfg.grid)?;
        let mut idx = Vec::new();
        for &q in &SAMPLE_AXIS {
            for &p in &SAMPLE_AXIS {
                if let (Some(i), Some(k)) = (pg.q_axis.nearest_index(q), pg.p_axis.nearest_index(p)) {
                    idx.push((i, k));
                }
            }
        }
        let pts: Vec<(f64, f64)> = idx.iter().map(|&(i, k)| (pg.q_axis.point(i), pg.p_axis.point(k))).collect();
        let tr = portrait_trace(&a, &apod, &pts)?;
        let mut t = Table::new(
            "portrait_trace",
            vec!["q", "p", "trace_re", "trace_im", "convolution_re", "convolution_im", "abs_diff"],
        );
        let mut gap = 0.0f64;
        for (s, &(i, k)) in tr.samples().expect("trace portraits are sampled").iter().zip(&idx) {
            let c: Complex<f64> = v.at(i, k);
            let d = (s.value - c).norm();
            gap = gap.max(d);
            t.push(vec![s.q.into(), s.p.into(), s.value.re.into(), s.value.im.into(), c.re.into(), c.im.into(), d.into()]);
        }
        out.tables.push(t);
        max_gap = Some(gap);
    }
    out.summary = json!({
        "source": conv.source,
        "max_trace_convolution_gap": max_gap,
        "coherent_overlap_min": (apod.kind == ApodizationKind::PureState).then(|| coherent_overlap_min(&apod)),
    });
    if cfg.config.emit_plots {
        let qs = pg.q_axis.points();
        let ps = pg.p_axis.points();
        let vals: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|k| v.at(i, k).re).collect()).collect();
        out.plots.push(("portrait.svg".into(), heatmap("lower symbol", "q", "p", &qs, &ps, &vals)));
    }
    Ok(())
}

fn evolve(cfg: &LoadedConfig, out: &mut Artifacts) -> Result<(), RunError> {
    let set = cfg.set();
    let g = cfg.grid;
    let packet = cfg.config.packet.expect("validated");
    let times = cfg.config.times.clone().expect("validated");
    let psi0 = gaussian_packet(&g, packet.x0, packet.width, packet.k0);
    let mut family = Vec::new();
    for sigma in cfg.sigmas() {
        let (a, _) = weight(cfg, sigma)?;
        out.warn_all(a.warnings());
        family.push((sigma, weighted_operator(&a, WeightKind::Kinetic, &g, scheme(cfg))?.matrix));
    }
    let well = well_propagate(&set, &psi0, &times)?;
    out.warn_all(well.warnings.iter());
    let cmp = compare_evolutions(&set, &family, &psi0, &times)?;
    out.warn_all(cmp.warnings.iter());
    let mut wt = Table::new("well", vec!["t", "norm", "mean_x", "mean_x2", "energy"]);
    for (t, o) in times.iter().zip(&well.observables) {
        wt.push(vec![(*t).into(), o.norm.into(), o.mean_x.into(), o.mean_x2.into(), o.energy.into()]);
    }
    out.tables.push(wt);
    let mut ct = Table::new(
        "evolution",
        vec!["sigma", "t", "fidelity", "renormalization", "leakage", "mean_x_gap", "norm", "energy"],
    );
    let norm_tol = cfg.tolerance("normalization", 1e-10);
    for r in &cmp.rows {
        if (r.norm - 1.0).abs() > norm_tol {
            out.warn(format!("sigma={}: norm drift {:e} at t={}", r.sharpness, r.norm - 1.0, r.t));
        }
        ct.push(vec![
            r.sharpness.into(),
            r.t.into(),
            r.fidelity.into(),
            r.renormalization.into(),
            r.leakage.into(),
            r.mean_x_gap.into(),
            r.norm.into(),
            r.energy.into(),
        ]);
    }
    out.tables.push(ct);
    if !cmp.trend_monotone {
        out.warn("final-time fidelity is not monotone along the sigma sweep".into());
    }
    out.summary = json!({ "fidelity_trend_monotone": cmp.trend_monotone });
    if cfg.config.emit_plots {
        let series: Vec<Series> = family
            .iter()
            .map(|(s, _)| Series {
                label: format!("sigma={s}"),
                points: cmp.rows.iter().filter(|r| r.sharpness == *s).map(|r| (r.t, r.fidelity)).collect(),
            })
            .collect();
        out.plots.push(("fidelity.svg".into(), line_plot("fidelity against the well", "t", "fidelity", &series)));
    }
    Ok(())
}

fn check_row(table: &mut Table, name: &str, c: &AssumptionCheck<f64>) {
    table.push(vec![name.into(), status(c.status).into(), c.extremum.into()]);
}

fn validate_apodization(
    cfg: &LoadedConfig,
    psi: Option<&SampledFunction1D<f64>>,
    out: &mut Artifacts,
) -> Result<(), RunError> {
    let apod = apodization(cfg, psi)?;
    let r = validate_assumptions(&apod);
    let mut t = Table::new("assumptions", vec!["check", "status", "extremum"]);
    check_row(&mut t, "nonneg_symplectic", &r.nonneg_symplectic);
    check_row(&mut t, "smoothness", &r.smoothness);
    check_row(&mut t, "nonneg_partial_at_origin", &r.nonneg_partial_at_origin);
    t.push(vec!["smoothness_ratio".into(), "info".into(), r.smoothness_ratio.into()]);
    out.tables.push(t);
    out.summary = json!({
        "nonneg_symplectic": status(r.nonneg_symplectic.status),
        "smoothness": status(r.smoothness.status),
        "nonneg_partial_at_origin": status(r.nonneg_partial_at_origin.status),
    });
    if cfg.config.emit_plots {
        let pg = apod.grid();
        let n = pg.q_axis.len();
        let vals: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|k| apod.pi_values.at(i, k).norm()).collect()).collect();
        out.plots.push((
            "apodization.svg".into(),
            heatmap("|Pi(q,p)|", "q", "p", &pg.q_axis.points(), &pg.p_axis.points(), &vals),
        ));
    }
    Ok(())
}
