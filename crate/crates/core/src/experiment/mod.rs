//! End-to-end comparison: generate a benchmark system, compute its cross
//! Gramian in several ways, sweep reduced orders and tabulate output errors.

mod config;
mod plot;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, Orders};
pub use plot::{emit_plot_data, render_svg, PlotOutput, FIGURES};

use crate::benchmark::{inverse_sylvester_procedure, SeededRng};
use crate::error::{Error, Result, StageContext};
use crate::gramian::{
    cross_gramian_sylvester_with, empirical_cross_gramian_with, empirical_linear_cross_gramian_with, EmpiricalOptions,
    GramianMethod, GramianResult,
};
use crate::matlib::{csv, Matrix};
use crate::metrics::{
    h2_approx_balanced, hinf_sss, is_flagged_unstable, lebesgue_errors, lebesgue_norms, relative, ErrorReport,
    ErrorRow, LebesgueNorms,
};
use crate::reduce::{build_projection, davidson_scores, reduce_with, Projection, Ranking};
use crate::system::{simulate, Input, LtiSystem, Rk4Stepper, Substeps, TimeGrid, Trajectory};

#[derive(Debug, Clone)]
pub struct VariantResult {
    pub gramian: GramianResult,
    pub scores: Vec<f64>,
    pub report: ErrorReport,
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub variants: Vec<VariantResult>,
    pub fom_norms: LebesgueNorms,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl ExperimentOutput {
    pub fn report(&self, method: GramianMethod) -> Option<&ErrorReport> {
        self.variants.iter().find(|v| v.gramian.method == method).map(|v| &v.report)
    }
}

/// Generates the benchmark system from `cfg.spec` and runs the sweep.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let generated = inverse_sylvester_procedure(&cfg.spec).stage("generate system")?;
    let mut out = sweep_system(cfg, &generated.sys)?;
    if cfg.write_matrices {
        let dir = cfg.output_dir.join("system");
        generated.save(&dir).stage("write system")?;
        for f in ["A.csv", "B.csv", "C.csv", "lambda.csv", "U.csv", "spec.json"] {
            out.files.push(dir.join(f));
        }
    }
    Ok(out)
}

/// Runs every configured Gramian variant on a given system; `cfg.spec` is
/// not used.
pub fn sweep_system(cfg: &ExperimentConfig, sys: &LtiSystem) -> Result<ExperimentOutput> {
    cfg.grid.validate()?;
    cfg.perturb.validate()?;
    let n_states = sys.states();
    if cfg.orders.max() > n_states {
        return Err(Error::OrderOutOfRange { n: cfg.orders.max(), max: n_states });
    }
    // Reduced models are integrated with the full model's substep count.
    let grid = cfg.grid.with_substeps(Substeps::Fixed(Rk4Stepper::substeps_for(sys.a(), &cfg.grid)));
    let mut rng = SeededRng::new(cfg.noise_seed);
    let u = Matrix::from_fn(grid.count, sys.inputs(), |_, _| rng.gaussian());
    let (_, y) = simulate(sys, &vec![0.0; n_states], Input::Held(&u), &grid).stage("simulate full model")?;
    let fom_norms = lebesgue_norms(&y);

    let mut variants = Vec::new();
    for &method in &cfg.gramians {
        let label = method.name();
        let gramian = compute_gramian(cfg, sys, method).stage(format!("{label} Gramian"))?;
        let (report, scores) =
            sweep_variant(cfg, &grid, sys, &gramian, &u, &y, fom_norms).stage(format!("{label} sweep"))?;
        variants.push(VariantResult { gramian, scores, report });
    }

    let mut out = ExperimentOutput { variants, fom_norms, files: Vec::new(), warnings: Vec::new() };
    write_outputs(cfg, &u, &y, &mut out).stage("write outputs")?;
    Ok(out)
}

fn compute_gramian(cfg: &ExperimentConfig, sys: &LtiSystem, method: GramianMethod) -> Result<GramianResult> {
    match method {
        GramianMethod::Sylvester => cross_gramian_sylvester_with(sys, cfg.resonance),
        GramianMethod::EmpiricalLinear => empirical_linear_cross_gramian_with(sys, &cfg.grid, cfg.quadrature),
        GramianMethod::Empirical => {
            let opts = EmpiricalOptions { quadrature: cfg.quadrature, centering: cfg.centering };
            empirical_cross_gramian_with(sys, &cfg.grid, &cfg.perturb, opts)
        }
    }
}

/// Projected input and output maps and Gramian diagonal at full order.
struct Balanced {
    w_diag: Vec<f64>,
    b: Matrix,
    c: Matrix,
}

fn balance(sys: &LtiSystem, w: &Matrix, p: &Projection) -> Balanced {
    let ws = w.matmul(&p.reconstructing);
    let n = p.max_order();
    let w_diag = (0..n)
        .map(|i| {
            let r = p.reducing.row(i);
            (0..r.len()).map(|k| r[k] * ws[(k, i)]).sum()
        })
        .collect();
    Balanced { w_diag, b: p.reducing.matmul(sys.b()), c: sys.c().matmul(&p.reconstructing) }
}

fn sweep_variant(
    cfg: &ExperimentConfig,
    grid: &TimeGrid,
    sys: &LtiSystem,
    gramian: &GramianResult,
    u: &Matrix,
    y: &Trajectory,
    fom_norms: LebesgueNorms,
) -> Result<(ErrorReport, Vec<f64>)> {
    let mut p = build_projection(&gramian.w, cfg.projection).stage("projection")?;
    let mut bal = balance(sys, &gramian.w, &p);
    if cfg.ranking == Ranking::Davidson {
        let a_bal = p.reducing.matmul(&sys.a().matmul(&p.reconstructing));
        let sys_bal = LtiSystem::new(a_bal, bal.b.clone(), bal.c.clone())?;
        let d = davidson_scores(&sys_bal, &p.scores)?;
        p = p.reranked(&d)?;
        bal = balance(sys, &gramian.w, &p);
    }
    let h2_ref = h2_approx_balanced(&bal.w_diag, &bal.b, &bal.c, 0)?;
    let hinf_ref = hinf_sss(&p.scores, 0)?;
    let full = reduce_with(sys, &p, cfg.orders.max()).stage("reduce")?;

    let mut rows = Vec::with_capacity(cfg.orders.as_slice().len());
    for &n in cfg.orders.as_slice() {
        let rom = full.leading(n)?;
        let mut row = match simulate(&rom.sys, &vec![0.0; n], Input::Held(u), grid) {
            Ok((_, y_r)) => ErrorRow::from_norms(n, lebesgue_errors(y, &y_r)?, fom_norms),
            Err(Error::Divergence(_)) => {
                let inf = LebesgueNorms { l1: f64::INFINITY, l2: f64::INFINITY, linf: f64::INFINITY };
                let mut r = ErrorRow::from_norms(n, inf, fom_norms);
                r.unstable = true;
                r
            }
            Err(e) => return Err(e).stage(format!("simulate order {n}")),
        };
        row.h2_rel = relative(h2_approx_balanced(&bal.w_diag, &bal.b, &bal.c, n)?, h2_ref);
        row.hinf_rel = relative(hinf_sss(&p.scores, n)?, hinf_ref);
        row.unstable |= is_flagged_unstable(&rom)?;
        rows.push(row);
    }
    let report = ErrorReport { label: gramian.method.name().to_string(), rows };
    Ok((report, p.scores))
}

fn write_outputs(cfg: &ExperimentConfig, u: &Matrix, y: &Trajectory, out: &mut ExperimentOutput) -> Result<()> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    let mut push = |p: PathBuf| out.files.push(p);

    let cfg_path = dir.join("config.json");
    fs::write(&cfg_path, cfg.to_json()?)?;
    push(cfg_path);
    let input_path = dir.join("input.csv");
    csv::save_matrix(&input_path, u)?;
    push(input_path);
    let y_path = dir.join("fom_output.csv");
    write_trajectory(&y_path, y)?;
    push(y_path);

    for v in &out.variants {
        let sub = dir.join(v.gramian.method.name());
        fs::create_dir_all(&sub)?;
        let report_path = sub.join("errors.csv");
        fs::write(&report_path, v.report.to_csv_string())?;
        out.files.push(report_path);
        let scores_path = sub.join("scores.csv");
        csv::save_matrix(&scores_path, &Matrix::column_vector(&v.scores))?;
        out.files.push(scores_path);
        if cfg.write_matrices {
            v.gramian.save(&sub, "gramian")?;
            out.files.push(sub.join("gramian.csv"));
            out.files.push(sub.join("gramian.json"));
        }
    }
    let reports: Vec<ErrorReport> = out.variants.iter().map(|v| v.report.clone()).collect();
    let plots = emit_plot_data(&reports, dir.join("plot"))?;
    out.files.extend(plots.files);
    out.warnings.extend(plots.warnings);
    Ok(())
}

fn write_trajectory(path: &Path, t: &Trajectory) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    t.write_csv(&mut w)?;
    std::io::Write::flush(&mut w)?;
    Ok(())
}

/// Loads the error reports written by a previous run from `dir`.
pub fn load_reports(dir: impl AsRef<Path>) -> Result<Vec<ErrorReport>> {
    let dir = dir.as_ref();
    let mut reports = Vec::new();
    for m in GramianMethod::ALL {
        let path = dir.join(m.name()).join("errors.csv");
        if path.exists() {
            reports.push(ErrorReport::read_csv(m.name(), fs::File::open(&path)?)?);
        }
    }
    Ok(reports)
}
