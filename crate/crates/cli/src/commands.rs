//! One runner per subcommand. Each writes its CSV files (and optionally an
//! SVG plot) to the output directory and returns a verdict against the
//! thresholds of the config.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use paracomm::experiments::{
    qs_tj_decay, rotations_refinement, sigma_uniformity, t1_sweep, wbp_sweep, QsDecay, RotationsCompare, SigmaSweep,
    T1Row, WbpRow,
};
use paracomm::geometry::ParaPoint;
use paracomm::operators::{CurveOpSpec, Excision, HomKernelProfile, RadialWindow};
use paracomm::oscillatory::{decay_sweep, DecaySweep};
use paracomm::regularity::{f_lambda_measure, reg_integral_sweep, shift_bound_check, RegSweepRow, ShiftChoice};
use paracomm::symbols::{check_symbol_conditions, make_symbol, ConditionReport};
use paracomm::{Field64, SymbolA64, TorusGrid64};

use crate::config::RunConfig;
use crate::plot::{emit_plot, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    MultiplierDecay,
    QsDecay,
    KernelReg,
    ShiftBound,
    FLambda,
    Wbp,
    T1Osc,
    SigmaSweep,
    RotationsCompare,
    SymbolCheck,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::MultiplierDecay,
        Command::QsDecay,
        Command::KernelReg,
        Command::ShiftBound,
        Command::FLambda,
        Command::Wbp,
        Command::T1Osc,
        Command::SigmaSweep,
        Command::RotationsCompare,
        Command::SymbolCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::MultiplierDecay => "multiplier-decay",
            Command::QsDecay => "qs-decay",
            Command::KernelReg => "kernel-reg",
            Command::ShiftBound => "shift-bound",
            Command::FLambda => "f-lambda",
            Command::Wbp => "wbp",
            Command::T1Osc => "t1-osc",
            Command::SigmaSweep => "sigma-sweep",
            Command::RotationsCompare => "rotations-compare",
            Command::SymbolCheck => "symbol-check",
        }
    }
}

/// Result of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: Command,
    pub pass: bool,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.command.name(), self.summary)
    }
}

/// CSV header of every file a subcommand writes, by file stem.
pub const CSV_SCHEMAS: [(&str, &str); 11] = [
    ("multiplier-decay", DecaySweep::CSV_HEADER),
    ("qs-decay", QsDecay::CSV_HEADER),
    ("qs-decay-fit", QS_FIT_HEADER),
    ("kernel-reg", RegSweepRow::CSV_HEADER),
    ("shift-bound", SHIFT_HEADER),
    ("f-lambda", F_LAMBDA_HEADER),
    ("wbp", WbpRow::CSV_HEADER),
    ("t1-osc", T1Row::CSV_HEADER),
    ("sigma-sweep", SigmaSweep::CSV_HEADER),
    ("rotations-compare", RotationsCompare::CSV_HEADER),
    ("symbol-check", ConditionReport::CSV_HEADER),
];

const QS_FIT_HEADER: &str = "symbol,j,exponent,intercept,r_squared,n_points";
const SHIFT_HEADER: &str = "lambda,n_samples,max_ratio_t,max_ratio_s,violations,seed";
const F_LAMBDA_HEADER: &str = "lambda,h1,h2,estimate,std_error,hits,n_mc,bound,seed";

struct Ctx<'a> {
    cfg: &'a RunConfig,
    out: &'a Path,
    files: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn csv(&mut self, stem: &str, header: &str, rows: &[String]) -> Result<()> {
        let path = self.out.join(format!("{stem}.csv"));
        let mut text = String::with_capacity(64 * (rows.len() + 1));
        text.push_str(header);
        text.push('\n');
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(path);
        Ok(())
    }

    fn plot(&mut self, stem: &str, series: &[Series], title: &str, x: &str, y: &str) -> Result<()> {
        if !self.cfg.plot {
            return Ok(());
        }
        let path = self.out.join(format!("{stem}.svg"));
        emit_plot(series, &path, title, x, y)?;
        self.files.push(path);
        Ok(())
    }

    fn symbol(&self, name: &str, grid: Option<&TorusGrid64>) -> Result<SymbolA64> {
        Ok(make_symbol(name, &self.cfg.symbol_params(grid))?)
    }

    fn sampled(&self, name: &str, grid: &TorusGrid64) -> Result<SymbolA64> {
        Ok(self.symbol(name, Some(grid))?.sampled_on(grid)?)
    }
}

/// Runs `cmd`, writing outputs under `out` (created if missing).
pub fn run(cmd: Command, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut ctx = Ctx { cfg, out, files: Vec::new() };
    let (pass, summary) = match cmd {
        Command::MultiplierDecay => multiplier_decay(&mut ctx)?,
        Command::QsDecay => qs_decay(&mut ctx)?,
        Command::KernelReg => kernel_reg(&mut ctx)?,
        Command::ShiftBound => shift_bound(&mut ctx)?,
        Command::FLambda => f_lambda(&mut ctx)?,
        Command::Wbp => wbp(&mut ctx)?,
        Command::T1Osc => t1_osc(&mut ctx)?,
        Command::SigmaSweep => sigma_sweep(&mut ctx)?,
        Command::RotationsCompare => rotations(&mut ctx)?,
        Command::SymbolCheck => symbol_check(&mut ctx)?,
    };
    Ok(Outcome { command: cmd, pass, summary, files: ctx.files })
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi == 0.0 {
        1.0
    } else {
        hi / lo
    }
}

fn multiplier_decay(ctx: &mut Ctx) -> Result<(bool, String)> {
    let c = &ctx.cfg.multiplier_decay;
    let mut rows = Vec::new();
    let mut series = Vec::new();
    let (mut pass, mut worst) = (true, f64::MIN);
    for ray in &c.rays {
        let sw = decay_sweep((ray[0], ray[1]), c.k_max)?;
        let slope = sw.log_slope();
        worst = worst.max(slope);
        pass &= sw.all_finite() && slope <= c.max_log_slope;
        rows.extend(sw.csv_rows());
        let norm = (ray[0] * ray[0] + ray[1] * ray[1]).sqrt();
        series.push(Series::new(
            format!("ray ({}, {})", ray[0], ray[1]),
            sw.rows.iter().map(|r| (norm * 2f64.powi(r.k as i32), r.decay_product)).collect(),
        ));
    }
    ctx.csv("multiplier-decay", DecaySweep::CSV_HEADER, &rows)?;
    ctx.plot("multiplier-decay", &series, "|m(ξ)| (|ξ1| + |ξ2|^1/2)", "|ξ|", "product")?;
    Ok((pass, format!("worst log-slope {worst:.4} (limit {})", c.max_log_slope)))
}

fn qs_decay(ctx: &mut Ctx) -> Result<(bool, String)> {
    let c = ctx.cfg.qs_decay.clone();
    let grid = c.grid.build()?;
    let (mut rows, mut fits, mut series) = (Vec::new(), Vec::new(), Vec::new());
    let mut pass = true;
    let mut summary = String::new();
    for name in &c.symbols {
        let a = ctx.sampled(name, &grid)?;
        let d = qs_tj_decay(&a, c.j, &c.s, &grid, c.n_quad, ctx.cfg.seed)?;
        rows.extend(d.csv_rows(name));
        match &d.fit {
            Some(f) => {
                pass &= f.exponent >= c.min_exponent && f.r_squared >= c.min_r_squared;
                fits.push(format!(
                    "{name},{},{:.12e},{:.12e},{:.12e},{}",
                    c.j,
                    f.exponent,
                    f.intercept,
                    f.r_squared,
                    f.points.len()
                ));
                let _ = write!(summary, "{name} ε={:.3} r²={:.3}; ", f.exponent, f.r_squared);
            }
            None => {
                pass = false;
                fits.push(format!("{name},{},nan,nan,nan,0", c.j));
                let _ = write!(summary, "{name} degenerate; ");
            }
        }
        series.push(Series::new(name.clone(), d.rows.iter().map(|r| (r.s, r.norm.norm_estimate)).collect()));
    }
    ctx.csv("qs-decay", QsDecay::CSV_HEADER, &rows)?;
    ctx.csv("qs-decay-fit", QS_FIT_HEADER, &fits)?;
    ctx.plot("qs-decay", &series, "‖Q_s T_j‖", "s", "norm")?;
    Ok((pass, format!("{summary}limits ε ≥ {}, r² ≥ {}", c.min_exponent, c.min_r_squared)))
}

fn kernel_reg(ctx: &mut Ctx) -> Result<(bool, String)> {
    let c = ctx.cfg.kernel_reg.clone();
    let x = ParaPoint::new(c.x[0], c.x[1]);
    let choice = if c.random_h { ShiftChoice::Random } else { ShiftChoice::Corner };
    let (mut rows, mut series) = (Vec::new(), Vec::new());
    let mut pass = true;
    let mut summary = String::new();
    for name in &c.symbols {
        let a = ctx.symbol(name, None)?;
        let sweep = reg_integral_sweep(&a, x, &c.lambdas, ctx.cfg.seed, choice, c.panels)?;
        let sp = spread(sweep.iter().map(|r| r.ratio));
        let refine = sweep.iter().map(|r| r.refinement_change()).fold(0.0, f64::max);
        pass &= sp < c.max_ratio_spread && refine < c.max_refinement_change;
        let _ = write!(summary, "{name} max/min {sp:.3e} refine {refine:.2e}; ");
        rows.extend(sweep.iter().map(|r| r.csv_row(name)));
        series.push(Series::new(format!("{name} ratio"), sweep.iter().map(|r| (r.lambda, r.ratio)).collect()));
    }
    ctx.csv("kernel-reg", RegSweepRow::CSV_HEADER, &rows)?;
    ctx.plot("kernel-reg", &series, "∫|ΔK₀| dy / λ^1/3", "λ", "ratio")?;
    Ok((pass, format!("{summary}limits spread < {}, refine < {}", c.max_ratio_spread, c.max_refinement_change)))
}

fn shift_bound(ctx: &mut Ctx) -> Result<(bool, String)> {
    let c = &ctx.cfg.shift_bound;
    let seed = ctx.cfg.seed;
    let mut rows = Vec::new();
    let (mut violations, mut worst) = (0usize, 0.0f64);
    for &lam in &c.lambdas {
        let r = shift_bound_check(lam, c.samples, seed, ShiftChoice::Random)?;
        violations += r.violations;
        worst = worst.max(r.max_ratio_t).max(r.max_ratio_s);
        rows.push(format!(
            "{:.6e},{},{:.12e},{:.12e},{},{seed}",
            r.lambda, r.n_samples, r.max_ratio_t, r.max_ratio_s, r.violations
        ));
    }
    ctx.csv("shift-bound", SHIFT_HEADER, &rows)?;
    Ok((violations == 0, format!("{violations} violations, worst ratio to λ^2/3 {worst:.4}")))
}

fn f_lambda(ctx: &mut Ctx) -> Result<(bool, String)> {
    let c = &ctx.cfg.f_lambda;
    let seed = ctx.cfg.seed;
    let mut rows = Vec::new();
    let mut pass = true;
    let mut summary = String::new();
    for &lam in &c.lambdas {
        let h = ParaPoint::new(lam, lam * lam);
        let e = f_lambda_measure(ParaPoint::origin(), h, lam, c.samples, seed)?;
        let bound = c.max_constant * lam.powf(2.0 / 3.0);
        let ok = e.estimate <= bound && e.std_error < c.max_rel_std_error * e.estimate;
        pass &= ok;
        let _ = write!(summary, "λ={lam:e}: {:.3e} ± {:.1e} (bound {bound:.3e}); ", e.estimate, e.std_error);
        rows.push(format!(
            "{lam:.6e},{:.6e},{:.6e},{:.12e},{:.12e},{},{},{bound:.12e},{seed}",
            h.x1, h.x2, e.estimate, e.std_error, e.hits, e.n_mc
        ));
    }
    ctx.csv("f-lambda", F_LAMBDA_HEADER, &rows)?;
    Ok((pass, format!("{summary}relative standard error limit {}", c.max_rel_std_error)))
}

fn wbp(ctx: &mut Ctx) -> Result<(bool, String)> {
    let c = ctx.cfg.wbp.clone();
    let base = c.grid.build()?;
    let spec = CurveOpSpec { epsilon: c.epsilon, r_max: c.r_max, n_quad: c.n_quad, ..CurveOpSpec::default() };
    let center = ParaPoint::new(c.center[0], c.center[1]);
    let (mut rows, mut series) = (Vec::new(), Vec::new());
    let mut pass = true;
    let mut summary = String::new();
    for name in &c.symbols {
        let a = ctx.symbol(name, None)?;
        let sweep = wbp_sweep(&a, &c.r, &base, &spec, center)?;
        let sp = spread(sweep.iter().map(|r| r.ratio));
        pass &= sp < c.max_spread;
        if name == "linear_x1" {
            pass &= sp - 1.0 < c.linear_tolerance;
        }
        let _ = write!(summary, "{name} max/min {sp:.4}; ");
        rows.extend(sweep.iter().map(|r| r.csv_row(name)));
        series.push(Series::new(name.clone(), sweep.iter().map(|r| (r.r, r.ratio)).collect()));
    }
    ctx.csv("wbp", WbpRow::CSV_HEADER, &rows)?;
    ctx.plot("wbp", &series, "|⟨ψ, Tφ⟩| / r³", "r", "ratio")?;
    Ok((pass, format!("{summary}limits {} (linear_x1 within {})", c.max_spread, c.linear_tolerance)))
}

fn t1_osc(ctx: &mut Ctx) -> Result<(bool, String)> {
    let c = ctx.cfg.t1_osc.clone();
    let grid = c.grid.build()?;
    let a = ctx.symbol(&c.symbol, None)?;
    let spec = CurveOpSpec { epsilon: c.epsilon, r_max: c.t_max, n_quad: c.n_quad, ..CurveOpSpec::default() };
    let sweep = t1_sweep(&a, c.cubes, c.r, &grid, &spec, ctx.cfg.seed)?;
    let mut v: Vec<f64> = sweep.iter().map(|r| r.oscillation).collect();
    v.sort_by(f64::total_cmp);
    let (max, med) = (v[v.len() - 1], v[v.len() / 2]);
    let ratio = if max == 0.0 { 0.0 } else { max / med };
    let rows: Vec<String> = sweep.iter().map(|r| r.csv_row(&c.symbol, ctx.cfg.seed)).collect();
    ctx.csv("t1-osc", T1Row::CSV_HEADER, &rows)?;
    Ok((ratio < c.max_over_median, format!("max/median {ratio:.3} (limit {})", c.max_over_median)))
}

fn sigma_sweep(ctx: &mut Ctx) -> Result<(bool, String)> {
    let c = ctx.cfg.sigma_sweep.clone();
    let grid = c.grid.build()?;
    let spec = CurveOpSpec { epsilon: c.epsilon, r_max: c.r_max, n_quad: c.n_quad, ..CurveOpSpec::default() };
    let (mut rows, mut pass, mut summary) = (Vec::new(), true, String::new());
    for name in &c.symbols {
        let a = ctx.sampled(name, &grid)?;
        let sw = sigma_uniformity(&a, c.n_sigma, &spec, &grid, ctx.cfg.seed)?;
        let r = sw.max_over_median();
        pass &= r <= c.max_over_median;
        let _ = write!(summary, "{name} {r:.3}; ");
        rows.extend(sw.csv_rows(name));
    }
    ctx.csv("sigma-sweep", SigmaSweep::CSV_HEADER, &rows)?;
    Ok((pass, format!("max/median {summary}limit {}", c.max_over_median)))
}

fn rotations(ctx: &mut Ctx) -> Result<(bool, String)> {
    let c = ctx.cfg.rotations.clone();
    let grid = c.grid.build()?;
    let a = ctx.symbol(&c.symbol, Some(&grid))?;
    let (l1, l2) = (grid.l1(), grid.l2());
    let pi = std::f64::consts::PI;
    let f = Field64::from_real_fn(grid, |p| (pi * p.x1 / l1).cos() * (pi * p.x2 / l2).cos());
    let window = RadialWindow {
        inner: c.inner,
        outer: c.outer,
        taper: c.taper,
        excision: Excision::Polar,
        sub_samples: c.sub_samples,
    };
    let profile = HomKernelProfile::smooth();
    let (coarse, fine) = rotations_refinement(&a, &f, &profile, &window, c.n_sigma, c.n_quad)?;
    let rows = vec![
        coarse.csv_row(&c.symbol, c.n_sigma, c.n_quad, c.sub_samples),
        fine.csv_row(&c.symbol, 2 * c.n_sigma, 2 * c.n_quad, 2 * c.sub_samples),
    ];
    ctx.csv("rotations-compare", RotationsCompare::CSV_HEADER, &rows)?;
    let gain = if fine.rel_error == 0.0 { f64::INFINITY } else { coarse.rel_error / fine.rel_error };
    let pass = coarse.rel_error <= c.max_rel_error && (coarse.rel_error == 0.0 || gain >= c.min_refinement_gain);
    Ok((
        pass,
        format!(
            "rel error {:.3e} -> {:.3e} under refinement (limits {}, gain ≥ {})",
            coarse.rel_error, fine.rel_error, c.max_rel_error, c.min_refinement_gain
        ),
    ))
}

fn symbol_check(ctx: &mut Ctx) -> Result<(bool, String)> {
    let c = ctx.cfg.symbol_check.clone();
    let grid = c.grid.build()?;
    let mut rows = Vec::new();
    let mut pass = true;
    for name in &c.symbols {
        let a = ctx.symbol(name, Some(&grid))?;
        let r = check_symbol_conditions(&a, &grid)?;
        pass &= r.lip_half.is_finite() && r.sup_dx1.is_finite() && r.bmo_d2a.is_finite();
        rows.push(r.csv_row());
    }
    ctx.csv("symbol-check", ConditionReport::CSV_HEADER, &rows)?;
    Ok((pass, format!("{} symbols with finite Lip and BMO estimates", rows.len())))
}
