//! `classify`, `smile` and `tails`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use smilewing_core::{
    compare_wing, smile_curve_with, CriterionClass, tail_slope_curve_with, wing_report, ModelCgf, PricingOptions, Side,
    SmileCurve, TcltCase, WingComparison, WingReport, WingSide,
};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, maturity_tag, num, opt_num, write_file, CsvDoc};
use crate::registry::ModelSpec;

/// A validated configuration with command-line overrides applied.
#[derive(Debug, Clone)]
pub struct Run {
    pub cfg: RunConfig,
    pub spec: ModelSpec,
    pub out_dir: PathBuf,
    pub maturities: Vec<f64>,
}

/// What a subcommand produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub text: String,
    /// `false` when a verification check failed.
    pub passed: bool,
}

impl Run {
    pub fn new(cfg: RunConfig, out: Option<PathBuf>, maturities: &[f64]) -> CliResult<Self> {
        cfg.validate()?;
        if let Some(t) = maturities.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(CliError::config(format!("--maturity must be positive, got {t}")));
        }
        let spec = ModelSpec::from_config(&cfg)?;
        let maturities = if maturities.is_empty() {
            cfg.maturities.clone()
        } else {
            maturities.to_vec()
        };
        let out_dir = out.unwrap_or_else(|| cfg.output.dir.clone());
        Ok(Self {
            cfg,
            spec,
            out_dir,
            maturities,
        })
    }

    pub fn load(path: &Path, out: Option<PathBuf>, maturities: &[f64]) -> CliResult<Self> {
        Self::new(RunConfig::load(path)?, out, maturities)
    }

    pub fn pricing(&self) -> PricingOptions {
        self.cfg.tolerances.pricing()
    }

    /// Runs `f` for every maturity in parallel; results keep the maturity
    /// order and the first error wins.
    pub fn per_maturity<T: Send>(&self, f: impl Fn(f64) -> CliResult<T> + Sync) -> CliResult<Vec<T>> {
        self.maturities.par_iter().map(|&t| f(t)).collect::<Vec<_>>().into_iter().collect()
    }

    fn comments(&self, doc: &mut CsvDoc, t: f64) {
        doc.comment("model", &self.spec.label);
        doc.comment("parameters", &self.spec.parameters);
        doc.comment("maturity", num(t));
    }
}

fn wing_side(report: &WingReport, side: Side) -> &WingSide {
    match side {
        Side::Right => &report.right,
        Side::Left => &report.left,
    }
}

fn case_label(case: Option<TcltCase>) -> String {
    case.map_or_else(|| "none".to_string(), |c| c.to_string())
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Right => "right",
        Side::Left => "left",
    }
}

/// One maturity of the classification report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub model: String,
    pub t: f64,
    pub r_star: f64,
    pub q_star: f64,
    pub right_criterion: String,
    pub left_criterion: String,
    pub right_case: String,
    pub left_case: String,
    pub right_predicted: Option<f64>,
    pub left_predicted: Option<f64>,
    pub right_fitted: Option<f64>,
    pub left_fitted: Option<f64>,
    pub right_applicable: bool,
    pub left_applicable: bool,
    /// Why a predicted or fitted slope is missing, or why a wing is not
    /// covered by a criterion.
    pub notes: Vec<String>,
}

impl ReportRow {
    fn new(model: String, t: f64, report: &WingReport, fits: [&WingComparison; 2]) -> Self {
        let mut notes = Vec::new();
        let mut fitted = [None, None];
        for (i, side) in [Side::Right, Side::Left].into_iter().enumerate() {
            let ws = wing_side(report, side);
            let name = side_name(side);
            if let Some(n) = &ws.note {
                notes.push(n.clone());
            } else if ws.slope.is_none() {
                notes.push(format!("{name} predicted slope unavailable"));
            }
            if !ws.criterion.satisfies_a_criterion() && ws.criterion != CriterionClass::NoBlowup {
                notes.push(format!("{name} blow-up is {}; slope is a lim sup", ws.criterion));
            }
            match &fits[i].fit {
                Ok(f) => fitted[i] = Some(f.fitted_slope),
                Err(e) => notes.push(format!("{name} fit unavailable: {e}")),
            }
        }
        Self {
            model,
            t,
            r_star: report.r_star(),
            q_star: report.q_star(),
            right_criterion: report.right.criterion.label(),
            left_criterion: report.left.criterion.label(),
            right_case: case_label(report.right.case),
            left_case: case_label(report.left.case),
            right_predicted: report.right.slope,
            left_predicted: report.left.slope,
            right_fitted: fitted[0],
            left_fitted: fitted[1],
            right_applicable: report.right.applicable,
            left_applicable: report.left.applicable,
            notes,
        }
    }

    fn csv_record(&self) -> Vec<String> {
        vec![
            num(self.t),
            num(self.r_star),
            num(self.q_star),
            self.right_criterion.clone(),
            self.left_criterion.clone(),
            self.right_case.clone(),
            self.left_case.clone(),
            opt_num(self.right_predicted),
            opt_num(self.left_predicted),
            opt_num(self.right_fitted),
            opt_num(self.left_fitted),
            self.right_applicable.to_string(),
            self.left_applicable.to_string(),
            self.notes.join("; "),
        ]
    }
}

struct SmileRun {
    report: WingReport,
    curve: SmileCurve,
    right: WingComparison,
    left: WingComparison,
}

fn smile_at(run: &Run, t: f64) -> CliResult<SmileRun> {
    let model = run.spec.build(t)?;
    let opts = run.pricing();
    let report = wing_report(&model);
    let curve = smile_curve_with(&model, t, &run.cfg.grids.k.points(), &opts)
        .map_err(|e| CliError::numerical(format!("smile_curve at t={t}"), e))?;
    let fraction = run.cfg.tolerances.wing_fraction;
    let right = compare_wing(&model, &curve, Side::Right, fraction, &opts);
    let left = compare_wing(&model, &curve, Side::Left, fraction, &opts);
    Ok(SmileRun {
        report,
        curve,
        right,
        left,
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

pub fn cmd_classify(run: &Run) -> CliResult<(Vec<ReportRow>, Outcome)> {
    ensure_dir(&run.out_dir)?;
    let rows = run.per_maturity(|t| {
        let s = smile_at(run, t)?;
        Ok(ReportRow::new(run.spec.label.clone(), t, &s.report, [&s.right, &s.left]))
    })?;
    let mut doc = CsvDoc::new(vec![
        "t",
        "r_star",
        "q_star",
        "right_criterion",
        "left_criterion",
        "right_case",
        "left_case",
        "right_predicted",
        "left_predicted",
        "right_fitted",
        "left_fitted",
        "right_applicable",
        "left_applicable",
        "notes",
    ]);
    doc.comment("model", &run.spec.label);
    doc.comment("parameters", &run.spec.parameters);
    doc.comment("wing_fraction", num(run.cfg.tolerances.wing_fraction));
    doc.rows = rows.iter().map(ReportRow::csv_record).collect();
    let path = doc.write(&run.out_dir.join("classify.csv"))?;

    let mut text = String::new();
    let _ = writeln!(text, "model {} ({})", run.spec.label, run.spec.parameters);
    let _ = writeln!(
        text,
        "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}  right criterion / case | left criterion / case",
        "t", "r*", "q*", "psi_R", "fit_R", "psi_L", "fit_L"
    );
    for r in &rows {
        let _ = writeln!(
            text,
            "{:>6} {:>10.6} {:>10.6} {:>10} {:>10} {:>10} {:>10}  {} / {} | {} / {}",
            r.t,
            r.r_star,
            r.q_star,
            fmt_opt(r.right_predicted),
            fmt_opt(r.right_fitted),
            fmt_opt(r.left_predicted),
            fmt_opt(r.left_fitted),
            r.right_criterion,
            r.right_case,
            r.left_criterion,
            r.left_case,
        );
        for n in &r.notes {
            let _ = writeln!(text, "       note: {n}");
        }
    }
    Ok((
        rows,
        Outcome {
            files: vec![path],
            text,
            passed: true,
        },
    ))
}

/// Largest usable `|k|` on one side and its total variance.
fn anchor(curve: &SmileCurve, side: Side) -> Option<(f64, f64)> {
    curve
        .points
        .iter()
        .filter(|p| match side {
            Side::Right => p.k >= 0.0,
            Side::Left => p.k < 0.0,
        })
        .max_by(|a, b| a.k.abs().total_cmp(&b.k.abs()))
        .map(|p| (p.k.abs(), p.total_variance))
}

fn fit_comment(c: &WingComparison) -> String {
    match &c.fit {
        Ok(f) => num(f.fitted_slope),
        Err(e) => format!("unavailable: {e}"),
    }
}

pub fn cmd_smile(run: &Run) -> CliResult<Outcome> {
    ensure_dir(&run.out_dir)?;
    let files = run.per_maturity(|t| {
        let s = smile_at(run, t)?;
        let anchors = [anchor(&s.curve, Side::Right), anchor(&s.curve, Side::Left)];
        let mut doc = CsvDoc::new(vec!["k", "total_variance", "predicted_slope_line"]);
        run.comments(&mut doc, t);
        doc.comment("r_star", num(s.report.r_star()));
        doc.comment("q_star", num(s.report.q_star()));
        for (i, side) in [Side::Right, Side::Left].into_iter().enumerate() {
            let ws = wing_side(&s.report, side);
            let name = side_name(side);
            let cmp = if i == 0 { &s.right } else { &s.left };
            doc.comment(&format!("predicted_slope_{name}"), ws.slope.map_or("none".to_string(), num));
            doc.comment(&format!("criterion_{name}"), ws.criterion.label());
            doc.comment(&format!("tclt_case_{name}"), case_label(ws.case));
            doc.comment(&format!("fitted_slope_{name}"), fit_comment(cmp));
            doc.comment(
                &format!("slope_anchor_{name}"),
                anchors[i].map_or("none".to_string(), |(k, _)| num(k)),
            );
        }
        let dropped: Vec<String> = s.curve.dropped.iter().map(|d| num(d.at)).collect();
        doc.comment("dropped", format!("{} [{}]", dropped.len(), dropped.join(" ")));
        for p in &s.curve.points {
            let (i, side) = if p.k >= 0.0 { (0, Side::Right) } else { (1, Side::Left) };
            let line = match (wing_side(&s.report, side).slope, anchors[i]) {
                (Some(slope), Some((ka, va))) => num(va + slope * (p.k.abs() - ka)),
                _ => String::new(),
            };
            doc.rows.push(vec![num(p.k), num(p.total_variance), line]);
        }
        let name = format!("smile_{}.csv", maturity_tag(t));
        let path = doc.write(&run.out_dir.join(&name))?;
        Ok((path, name, doc.preamble_lines()))
    })?;
    let mut out = Outcome {
        passed: true,
        ..Default::default()
    };
    if run.cfg.output.plot {
        let plots: Vec<String> = run
            .maturities
            .iter()
            .zip(&files)
            .flat_map(|(t, (_, name, skip))| {
                [
                    format!("'{name}' skip {skip} using 1:2 with lines title 't={t}'"),
                    format!("'{name}' skip {skip} using 1:3 with lines dashtype 2 title 't={t} slope'"),
                ]
            })
            .collect();
        let script = format!(
            "set datafile separator ','\nset xlabel 'log-strike k'\nset ylabel 'total implied variance'\nset key left top\nplot {}\n",
            plots.join(", \\\n     ")
        );
        out.files.push(write_file(&run.out_dir.join("smile.gp"), script.as_bytes())?);
    }
    for (path, _, _) in files {
        let _ = writeln!(out.text, "wrote {}", path.display());
        out.files.push(path);
    }
    Ok(out)
}

/// `K_L` at the base endpoint against the clock's explosion point.
fn sup_condition(run: &Run, t: f64, side: Side) -> CliResult<Option<String>> {
    let (Some(base), Some(clock)) = (run.spec.levy(), run.spec.clock) else {
        return Ok(None);
    };
    let pt = clock
        .explosion_point(t)
        .map_err(|e| CliError::numerical(format!("explosion_point at t={t}"), e))?;
    let kl = base.boundary_cgf(side);
    let branch = if kl > pt { "exceeds" } else if kl < pt { "below" } else { "equals" };
    Ok(Some(format!("K_L(endpoint)={} {branch} p_T={}", num(kl), num(pt))))
}

pub fn cmd_tails(run: &Run) -> CliResult<Outcome> {
    ensure_dir(&run.out_dir)?;
    let grid = run.cfg.grids.x.points();
    let opts = run.pricing();
    let files = run.per_maturity(|t| {
        let model = run.spec.build(t)?;
        let report = wing_report(&model);
        let mut written = Vec::new();
        for side in [Side::Right, Side::Left] {
            let name = side_name(side);
            let ws = wing_side(&report, side);
            let curve = tail_slope_curve_with(&model, t, &grid, side, &opts)
                .map_err(|e| CliError::numerical(format!("tail_slope_curve ({name}) at t={t}"), e))?;
            let mut doc = CsvDoc::new(vec!["x", "ratio", "predicted"]);
            run.comments(&mut doc, t);
            doc.comment("side", name);
            doc.comment("predicted", num(ws.critical));
            doc.comment("criterion", ws.criterion.label());
            doc.comment("tclt_case", case_label(ws.case));
            if let Some(s) = sup_condition(run, t, side)? {
                doc.comment("sup_condition", s);
            }
            let dropped: Vec<String> = curve.dropped.iter().map(|d| num(d.at)).collect();
            doc.comment("dropped", format!("{} [{}]", dropped.len(), dropped.join(" ")));
            for p in &curve.points {
                doc.rows.push(vec![num(p.x), num(p.ratio), num(ws.critical)]);
            }
            let file = format!("tails_{}_{name}.csv", maturity_tag(t));
            let path = doc.write(&run.out_dir.join(&file))?;
            written.push((path, file, doc.preamble_lines(), curve.points.last().map(|p| (p.x, p.ratio)), ws.critical));
        }
        Ok(written)
    })?;
    let mut out = Outcome {
        passed: true,
        ..Default::default()
    };
    let all: Vec<_> = run.maturities.iter().zip(&files).flat_map(|(t, w)| w.iter().map(move |f| (*t, f))).collect();
    if run.cfg.output.plot {
        let plots: Vec<String> = all
            .iter()
            .map(|(t, (_, file, skip, _, _))| format!("'{file}' skip {skip} using 1:2 with linespoints title '{file} t={t}'"))
            .collect();
        let script = format!(
            "set datafile separator ','\nset xlabel 'x'\nset ylabel '-log tail / x'\nset key right bottom\nplot {}\n",
            plots.join(", \\\n     ")
        );
        out.files.push(write_file(&run.out_dir.join("tails.gp"), script.as_bytes())?);
    }
    for (t, (path, _, _, last, critical)) in all {
        let _ = match last {
            Some((x, r)) => writeln!(
                out.text,
                "wrote {} (t={t}: ratio {r:.6} at x={x}, predicted {critical:.6})",
                path.display()
            ),
            None => writeln!(out.text, "wrote {} (t={t}: no recoverable points)", path.display()),
        };
        out.files.push(path.clone());
    }
    Ok(out)
}
