//! Task dispatch for a loaded job.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use blockkrylov::krylov::{deflated_krylov, DeflationRecord};
use blockkrylov::linalg::relative_difference;
use blockkrylov::reduction::predicted_floor;
use blockkrylov::systems::{AppendixAReport, AppendixBReport};
use blockkrylov::{
    assemble_case_i, assemble_case_ii, c64, case_i_from_higher_order, case_ii_from_integro_dae,
    linearize_higher_order, linearize_integro_dae, moment_match_report, pade_type_reduce,
    reconstruct, structured_basis_case_i, structured_basis_case_ii, transfer_function,
    verify_appendix_a, verify_appendix_b, CaseIIOperator, CaseIOperator, Factorization,
    FirstOrderSystem, HigherOrderSystem, IntegroDAESystem, Matrix, Scalar, StructuredBasis,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::job::{FactorizationSpec, JobSpec, SweepSpec, SystemSpec, Task};
use crate::mm::{read_matrix_market, write_matrix_market};
use crate::report::{Csv, RunReport, WALL_TIME_KEY};

/// Largest accepted reconstruction residual in the theorem checks.
pub const THEOREM_LIMIT: f64 = 1e-10;
/// Largest accepted appendix factorization residual.
pub const APPENDIX_LIMIT: f64 = 1e-12;
/// Moment error at or below which a moment counts as matched.
pub const MOMENT_THRESHOLD: f64 = 1e-8;

pub enum LoadedSystem {
    HigherOrder(HigherOrderSystem),
    IntegroDae(IntegroDAESystem),
    FirstOrder(FirstOrderSystem),
    CaseI(CaseIOperator),
    CaseII(CaseIIOperator),
}

impl LoadedSystem {
    /// First-order realization used by reduction, sweeps and moments.
    pub fn first_order(&self) -> Result<FirstOrderSystem, CliError> {
        match self {
            LoadedSystem::HigherOrder(s) => Ok(linearize_higher_order(s)),
            LoadedSystem::IntegroDae(s) => Ok(linearize_integro_dae(s)),
            LoadedSystem::FirstOrder(s) => Ok(s.clone()),
            LoadedSystem::CaseI(_) | LoadedSystem::CaseII(_) => Err(CliError::Config(
                "structured operators carry no input/output maps".into(),
            )),
        }
    }

    fn dimensions(&self) -> serde_json::Map<String, Value> {
        let mut d = serde_json::Map::new();
        let (n, n0, l, m, p) = match self {
            LoadedSystem::HigherOrder(s) => (
                s.order() * s.n0(),
                s.n0(),
                s.order(),
                s.inputs(),
                Some(s.outputs()),
            ),
            LoadedSystem::IntegroDae(s) => (
                s.n0() + s.aux_dim(),
                s.n0(),
                2,
                s.inputs(),
                Some(s.outputs()),
            ),
            LoadedSystem::FirstOrder(s) => (s.dim(), s.dim(), 1, s.inputs(), Some(s.outputs())),
            LoadedSystem::CaseI(op) => (op.dim(), op.n0(), op.l(), op.m(), None),
            LoadedSystem::CaseII(op) => (op.dim(), op.n0(), op.l(), op.m(), None),
        };
        d.insert("N".into(), n.into());
        d.insert("n0".into(), n0.into());
        d.insert("l".into(), l.into());
        d.insert("m".into(), m.into());
        if let Some(p) = p {
            d.insert("p".into(), p.into());
        }
        d
    }
}

struct Loader<'a> {
    base: &'a Path,
}

impl Loader<'_> {
    fn resolve(&self, p: &Path) -> PathBuf {
        self.base.join(p)
    }

    fn matrix(&self, p: &Path) -> Result<Matrix, CliError> {
        let path = self.resolve(p);
        read_matrix_market(&path).map_err(|source| CliError::Matrix {
            path: path.display().to_string(),
            source,
        })
    }

    fn matrices(&self, ps: &[PathBuf]) -> Result<Vec<Matrix>, CliError> {
        ps.iter().map(|p| self.matrix(p)).collect()
    }

    fn optional(&self, p: &Option<PathBuf>, rows: usize, cols: usize) -> Result<Matrix, CliError> {
        match p {
            Some(p) => self.matrix(p),
            None => Ok(Matrix::zeros(rows, cols)),
        }
    }

    fn required(&self, p: &Option<PathBuf>, what: &str) -> Result<Matrix, CliError> {
        match p {
            Some(p) => self.matrix(p),
            None => Err(CliError::Config(format!(
                "integro-dae system requires {what}"
            ))),
        }
    }

    fn vector(&self, p: &Path, what: &str) -> Result<Vec<Scalar>, CliError> {
        let v = self.matrix(p)?;
        if v.ncols() != 1 {
            return Err(CliError::Config(format!("{what} must be a column vector")));
        }
        Ok(v.column_entries(0))
    }
}

pub fn load_system(spec: &SystemSpec, base: &Path) -> Result<LoadedSystem, CliError> {
    let ld = Loader { base };
    Ok(match spec {
        SystemSpec::HigherOrder { p, b, l, d } => {
            let b = ld.matrix(b)?;
            let l = ld.matrices(l)?;
            let outputs = l.first().map_or(0, Matrix::nrows);
            let d = ld.optional(d, outputs, b.ncols())?;
            LoadedSystem::HigherOrder(HigherOrderSystem::new(ld.matrices(p)?, b, l, d)?)
        }
        SystemSpec::IntegroDae {
            p1,
            p0,
            factorization,
            f1,
            f2,
            g,
            p_minus_one,
            b,
            l,
            d,
        } => {
            let (p1, p0, b, l) = (ld.matrix(p1)?, ld.matrix(p0)?, ld.matrix(b)?, ld.matrix(l)?);
            let d = ld.optional(d, l.nrows(), b.ncols())?;
            let sys = match factorization {
                FactorizationSpec::Trivial => {
                    if f1.is_some() || f2.is_some() || g.is_some() {
                        return Err(CliError::Config(
                            "trivial factorization takes p_minus_one, not f1/f2/g".into(),
                        ));
                    }
                    let pm1 = ld.required(p_minus_one, "p_minus_one")?;
                    IntegroDAESystem::trivial(p1, p0, pm1, b, l, d)?
                }
                FactorizationSpec::Product | FactorizationSpec::InverseProduct => {
                    if p_minus_one.is_some() {
                        return Err(CliError::Config(
                            "factored P_{-1} takes f1/f2/g, not p_minus_one".into(),
                        ));
                    }
                    let mode = if *factorization == FactorizationSpec::Product {
                        Factorization::Product
                    } else {
                        Factorization::InverseProduct
                    };
                    IntegroDAESystem::new(
                        p1,
                        p0,
                        ld.required(f1, "f1")?,
                        ld.required(f2, "f2")?,
                        ld.required(g, "g")?,
                        mode,
                        b,
                        l,
                        d,
                    )?
                }
            };
            LoadedSystem::IntegroDae(sys)
        }
        SystemSpec::FirstOrder { e, a, b, l, d } => {
            let (e, a, b, l) = (ld.matrix(e)?, ld.matrix(a)?, ld.matrix(b)?, ld.matrix(l)?);
            let d = ld.optional(d, l.nrows(), b.ncols())?;
            LoadedSystem::FirstOrder(FirstOrderSystem::new(e, a, b, l, d)?)
        }
        SystemSpec::CaseI { m, c, sigma, r } => LoadedSystem::CaseI(CaseIOperator::new(
            ld.matrices(m)?,
            ld.vector(c, "c")?,
            ld.matrix(sigma)?,
            ld.matrix(r)?,
        )?),
        SystemSpec::CaseIi { c, m, sigma, r } => LoadedSystem::CaseII(CaseIIOperator::new(
            ld.matrices(c)?,
            ld.matrices(m)?,
            ld.vector(sigma, "sigma")?,
            ld.matrix(r)?,
        )?),
    })
}

/// Result of a task before the report is written.
struct TaskOutput {
    report: RunReport,
    /// Set when a consistency check failed; the report is still written.
    failure: Option<String>,
}

/// Runs `spec`, writing all outputs under `base/output_dir`.
///
/// The report is written even when a consistency check fails; the failure is
/// then returned as [`CliError::Consistency`].
pub fn run_job(spec: &JobSpec, base: &Path) -> Result<RunReport, CliError> {
    spec.validate()?;
    let start = Instant::now();
    let system = load_system(&spec.system, base)?;
    let out_dir = base.join(&spec.output_dir);
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Output(format!("{}: {e}", out_dir.display())))?;
    let s0 = c64(spec.s0.0, spec.s0.1);

    let mut out = match spec.task {
        Task::Reduce => reduce(spec, &system, s0, &out_dir)?,
        Task::Moments => moments_task(spec, &system, s0, &out_dir)?,
        Task::Sweep => {
            let fos = system.first_order()?;
            let sweep = spec.sweep.as_ref().expect("validated");
            write_text(&out_dir.join("sweep.csv"), &sweep_csv(&fos, sweep)?)?;
            TaskOutput {
                report: RunReport::new(spec.task.name()),
                failure: None,
            }
        }
        Task::VerifyTheorem1 | Task::VerifyTheorem2 => verify_theorem(spec, &system, s0)?,
        Task::VerifyAppendix => verify_appendix(spec, &system, s0)?,
    };

    let mut dims = system.dimensions();
    if let Some(Value::Object(extra)) = out.report.get("dimensions") {
        dims.extend(extra.clone());
    }
    out.report.set("dimensions", Value::Object(dims));
    out.report.set("system_kind", spec.system.kind());
    out.report.set("s0", json!([spec.s0.0, spec.s0.1]));
    out.report.set_f64("tol", spec.tol);
    out.report
        .set_f64(WALL_TIME_KEY, start.elapsed().as_secs_f64());
    write_text(&out_dir.join("report.json"), &out.report.to_json())?;
    match out.failure {
        Some(msg) => Err(CliError::Consistency(msg)),
        None => Ok(out.report),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn write_mtx(path: &Path, m: &Matrix) -> Result<(), CliError> {
    write_matrix_market(m, path).map_err(|e| CliError::Output(e.to_string()))
}

fn record_dimensions(record: &DeflationRecord) -> Value {
    json!({
        "N0": record.n0(),
        "k0": record.k0(),
        "block_widths": record.block_widths,
    })
}

fn record_value(record: &DeflationRecord) -> Value {
    json!({
        "start_width": record.start_width,
        "block_widths": record.block_widths,
        "selections": record.selections,
    })
}

fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| crate::report::float_value(x)).collect())
}

fn reduce(
    spec: &JobSpec,
    system: &LoadedSystem,
    s0: Scalar,
    out_dir: &Path,
) -> Result<TaskOutput, CliError> {
    let fos = system.first_order()?;
    let n = spec.n.expect("validated");
    let rom = pade_type_reduce(&fos, s0, n, spec.tol)?;
    let red = rom.system();
    for (name, m) in [
        ("E_n", red.e()),
        ("A_n", red.a()),
        ("B_n", red.b()),
        ("L_n", red.l()),
        ("D_n", red.d()),
    ] {
        write_mtx(&out_dir.join(format!("{name}.mtx")), m)?;
    }
    let mut report = RunReport::new(spec.task.name());
    report.set("dimensions", record_dimensions(rom.record()));
    report.set("n", n);
    report.set("predicted_floor", predicted_floor(rom.record(), n));
    if let Some(jmax) = spec.jmax {
        let rep = moment_match_report(&fos, &rom, jmax, MOMENT_THRESHOLD)?;
        report.set("matched_count", rep.matched_count);
        report.set("moment_relative_errors", floats(&rep.relative_errors));
    }
    if let Some(sweep) = &spec.sweep {
        write_text(&out_dir.join("sweep.csv"), &sweep_csv(red, sweep)?)?;
    }
    Ok(TaskOutput {
        report,
        failure: None,
    })
}

fn moments_task(
    spec: &JobSpec,
    system: &LoadedSystem,
    s0: Scalar,
    out_dir: &Path,
) -> Result<TaskOutput, CliError> {
    let fos = system.first_order()?;
    let n = spec.n.expect("validated");
    let jmax = spec.jmax.expect("validated");
    let rom = pade_type_reduce(&fos, s0, n, spec.tol)?;
    let rep = moment_match_report(&fos, &rom, jmax, MOMENT_THRESHOLD)?;
    let mut csv = Csv::new(&["j".to_string(), "relative_error".to_string()]);
    for (j, e) in rep.relative_errors.iter().enumerate() {
        csv.row_mixed(&[j.to_string()], &[*e]);
    }
    write_text(&out_dir.join("moments.csv"), &csv.finish())?;
    let mut report = RunReport::new(spec.task.name());
    report.set("dimensions", record_dimensions(rom.record()));
    report.set("n", n);
    report.set("jmax", jmax);
    report.set_f64("threshold", MOMENT_THRESHOLD);
    report.set("matched_count", rep.matched_count);
    report.set("predicted_floor", rep.predicted_floor);
    report.set("moment_relative_errors", floats(&rep.relative_errors));
    Ok(TaskOutput {
        report,
        failure: None,
    })
}

/// CSV of `H(s)` on the sweep grid: `s_re, s_im`, then `(re, im)` of each entry
/// in row-major order.
pub fn sweep_csv(fos: &FirstOrderSystem, sweep: &SweepSpec) -> Result<String, CliError> {
    let (p, m) = (fos.outputs(), fos.inputs());
    let mut header = vec!["s_re".to_string(), "s_im".to_string()];
    for i in 1..=p {
        for j in 1..=m {
            header.push(format!("h_{i}_{j}_re"));
            header.push(format!("h_{i}_{j}_im"));
        }
    }
    let mut csv = Csv::new(&header);
    for (re, im) in sweep.points() {
        let h = transfer_function(fos, c64(re, im))?;
        let mut row = vec![re, im];
        for i in 0..p {
            for j in 0..m {
                row.push(h[(i, j)].re);
                row.push(h[(i, j)].im);
            }
        }
        csv.row(&row);
    }
    Ok(csv.finish())
}

/// Strictly-lower entries are exactly zero and diagonal block `k` is exactly
/// `diag * I`.
fn structure_holds(sb: &StructuredBasis, diag: &[Scalar]) -> bool {
    let offsets = sb.record.block_offsets();
    sb.u_blocks.iter().zip(diag).all(|(u, &d)| {
        let n = u.nrows();
        let lower_zero = (0..n).all(|i| (0..i).all(|j| u[(i, j)] == c64(0.0, 0.0)));
        let diag_ok = offsets.windows(2).all(|w| {
            (w[0]..w[1])
                .all(|i| (w[0]..w[1]).all(|j| u[(i, j)] == if i == j { d } else { c64(0.0, 0.0) }))
        });
        lower_zero && diag_ok
    })
}

fn verify_theorem(
    spec: &JobSpec,
    system: &LoadedSystem,
    s0: Scalar,
) -> Result<TaskOutput, CliError> {
    let tol = spec.tol;
    let n_max = spec.n;
    let (sb, reference, reconstructed, diag) = match (spec.task, system) {
        (Task::VerifyTheorem1, LoadedSystem::CaseI(_) | LoadedSystem::HigherOrder(_)) => {
            let op = match system {
                LoadedSystem::CaseI(op) => op.clone(),
                LoadedSystem::HigherOrder(s) => case_i_from_higher_order(s, s0)?,
                _ => unreachable!(),
            };
            let sb = structured_basis_case_i(&op, tol, n_max)?;
            let (m, r) = assemble_case_i(&op);
            let reference = deflated_krylov(&m, &r, tol, n_max)?;
            let rec = reconstruct(&sb, &op)?;
            (sb, reference, rec, op.c().to_vec())
        }
        (Task::VerifyTheorem2, LoadedSystem::CaseII(_) | LoadedSystem::IntegroDae(_)) => {
            let op = match system {
                LoadedSystem::CaseII(op) => op.clone(),
                LoadedSystem::IntegroDae(s) => case_ii_from_integro_dae(s, s0)?,
                _ => unreachable!(),
            };
            let sb = structured_basis_case_ii(&op, tol, n_max)?;
            let (m, r) = assemble_case_ii(&op);
            let reference = deflated_krylov(&m, &r, tol, n_max)?;
            let rec = reconstruct(&sb, &op)?;
            (sb, reference, rec, vec![c64(1.0, 0.0); op.l()])
        }
        _ => unreachable!("validated"),
    };
    let residual = relative_difference(&reconstructed, &reference.matrix);
    let records_equal = sb.record == reference.record;
    let structure = structure_holds(&sb, &diag);

    let mut report = RunReport::new(spec.task.name());
    report.set("dimensions", record_dimensions(&sb.record));
    report.set_f64("reconstruction_residual", residual);
    report.set("records_equal", records_equal);
    report.set("structure_holds", structure);
    report.set("deflation_record", record_value(&sb.record));
    let mut problems = Vec::new();
    if residual.is_nan() || residual > THEOREM_LIMIT {
        problems.push(format!(
            "reconstruction residual {residual:e} exceeds {THEOREM_LIMIT:e}"
        ));
    }
    if !records_equal {
        problems.push("structured and reference deflation records differ".to_string());
    }
    if !structure {
        problems.push("U factors are not in the expected triangular form".to_string());
    }
    Ok(TaskOutput {
        report,
        failure: (!problems.is_empty()).then(|| problems.join("; ")),
    })
}

fn verify_appendix(
    spec: &JobSpec,
    system: &LoadedSystem,
    s0: Scalar,
) -> Result<TaskOutput, CliError> {
    let mut report = RunReport::new(spec.task.name());
    let worst = match system {
        LoadedSystem::HigherOrder(s) => {
            let AppendixAReport {
                factorization,
                inverse,
                closed_form,
            } = verify_appendix_a(s, s0)?;
            report.set_f64("factorization_residual", factorization);
            report.set_f64("inverse_residual", inverse);
            report.set_f64("closed_form_residual", closed_form);
            factorization.max(inverse).max(closed_form)
        }
        LoadedSystem::IntegroDae(s) => {
            let AppendixBReport {
                inverse,
                closed_form,
            } = verify_appendix_b(s, s0)?;
            report.set_f64("inverse_residual", inverse);
            report.set_f64("closed_form_residual", closed_form);
            inverse.max(closed_form)
        }
        _ => unreachable!("validated"),
    };
    let failure = (worst.is_nan() || worst > APPENDIX_LIMIT)
        .then(|| format!("appendix residual {worst:e} exceeds {APPENDIX_LIMIT:e}"));
    Ok(TaskOutput { report, failure })
}
