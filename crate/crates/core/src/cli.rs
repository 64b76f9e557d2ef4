//! The `nilforms` command line: problem file in, report out.
//!
//! Exit codes are 0 when every verdict passes, 1 for unusable input, 2 when
//! a check fails (the report is still written) and 3 when an eigensolve
//! does not converge.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bundlenum::bk::bk_convergence;
use crate::bundlenum::identity::convergence;
use crate::bundlenum::{
    awb_coclosed_check, contraction_identity_check, harmonic_scan, left_invariance_discriminator, ConvergenceTable,
    TorusGrid,
};
use crate::eigen::EigenOptions;
use crate::error::{Error, Result};
use crate::exterior::binomial;
use crate::nilalgebra::adjointness_residual;
use crate::problem::{self, AlgebraSpec, BkSpec, BundleSpec, IdentityKind, IdentitySpec, Kind, Problem, SystoleSpec};
use crate::report::{to_json, Cell, Report, Table, Verdict};
use crate::splitcalc::{eigenform_test, SplitCalculus, EIGEN_TOL};
use crate::systole::{systolic_report, Lattice};

pub const THREADS_ENV: &str = "NILFORMS_THREADS";

/// How `sys_nm1` is computed; echoed next to every systolic section.
pub const SYS_NM1_READING: &str =
    "calibrated reading: fiber_length * covolume * lambda1_dual (fiber-saturated minimal hypersurfaces)";

#[derive(Debug, Parser)]
#[command(name = "nilforms", version, about = "Invariant Hodge theory and systolic checks on nilmanifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cohomology, classification gate and block calculus of a metric Lie algebra.
    Algebra(RunArgs),
    /// Harmonic 1-forms, left-invariance discriminator and systole of a circle bundle.
    Bundle(RunArgs),
    /// Coclosedness and pointwise inner product of dx, dy for a non-flat fiber metric.
    Bk(RunArgs),
    /// Convergence study of a contraction identity on a flat torus.
    Identity(RunArgs),
    /// Systolic ratios of a list of base lattices.
    Systole(RunArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// Problem file (JSON, schema nilforms/1).
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Report destination; standard output if absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Directory for CSV tables.
    #[arg(long, value_name = "DIR")]
    pub csv: Option<PathBuf>,
    /// Grid resolution (finest level for convergence studies).
    #[arg(long, value_name = "N")]
    pub res: Option<usize>,
    /// Primary tolerance of the command.
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
}

impl Command {
    fn parts(&self) -> (Kind, &RunArgs) {
        match self {
            Command::Algebra(a) => (Kind::Algebra, a),
            Command::Bundle(a) => (Kind::Bundle, a),
            Command::Bk(a) => (Kind::BkExample, a),
            Command::Identity(a) => (Kind::IdentityCheck, a),
            Command::Systole(a) => (Kind::Systole, a),
        }
    }
}

/// Command-line overrides of problem-file settings.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub res: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    fn reject(&self, kind: Kind, res: bool, seed: bool) -> Result<()> {
        if res && self.res.is_some() {
            return Err(Error::input(format!("--res does not apply to {} problems", kind.tag())));
        }
        if seed && self.seed.is_some() {
            return Err(Error::input(format!("--seed does not apply to {} problems", kind.tag())));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::input("--tol must be positive"));
            }
        }
        Ok(())
    }

    fn to_value(self) -> Value {
        json!({ "res": self.res, "tol": self.tol, "seed": self.seed })
    }
}

/// A finished computation: the report and its CSV tables.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub tables: Vec<Table>,
}

fn levels(spec_levels: &[usize], res: Option<usize>) -> Result<Vec<usize>> {
    let levels = match res {
        Some(r) => vec![r / 4, r / 2, r],
        None => spec_levels.to_vec(),
    };
    if levels.is_empty() {
        return Err(Error::input("at `levels`: need at least one resolution"));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::input("at `levels`: resolutions must increase"));
    }
    Ok(levels)
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn convergence_table(name: &str, t: &ConvergenceTable) -> Table {
    let mut table = Table::new(name, &["res", "h", "residual", "order"]);
    for r in &t.rows {
        table.push(vec![Cell::U(r.res), Cell::F(r.h), Cell::F(r.residual), r.order.into()]);
    }
    table
}

/// Runs a parsed problem. `kind` is the command the user asked for.
pub fn execute(kind: Kind, file: &problem::ProblemFile, o: Overrides) -> Result<Outcome> {
    if file.kind() != kind {
        return Err(Error::input(format!(
            "the problem file has kind \"{}\" but the command expects \"{}\"",
            file.kind().tag(),
            kind.tag()
        )));
    }
    let (command, (results, verdicts, tables)) = match &file.problem {
        Problem::Algebra(s) => ("algebra", run_algebra(s, o)?),
        Problem::Bundle(s) => ("bundle", run_bundle(s, o)?),
        Problem::BkExample(s) => ("bk", run_bk(s, o)?),
        Problem::IdentityCheck(s) => ("identity", run_identity(s, o)?),
        Problem::Systole(s) => ("systole", run_systole(s, o)?),
    };
    let mut report = Report::new(command, file.source.clone(), results, verdicts);
    report.options = o.to_value();
    Ok(Outcome { report, tables })
}

type Parts = (Value, Vec<Verdict>, Vec<Table>);

fn run_algebra(spec: &AlgebraSpec, o: Overrides) -> Result<Parts> {
    o.reject(Kind::Algebra, true, false)?;
    let tol = o.tol.unwrap_or(spec.tol);
    let alg = spec.build()?;
    let m = alg.dim();
    let betti = alg.betti_numbers();
    let gate = alg.classification_gate();
    let table = alg.bracket_table();
    let jacobi = table.jacobi_residual();
    let orth = table.bracket_orthogonality_check();

    let mut d_squared = Vec::new();
    for p in 0..m.saturating_sub(1) {
        d_squared.push((alg.differential(p + 1) * alg.differential(p)).amax());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed.unwrap_or(0));
    let mut adjointness = Vec::new();
    for p in 0..m {
        let pairs: Vec<(DVector<f64>, DVector<f64>)> = (0..8)
            .map(|_| {
                let a = DVector::from_fn(binomial(m, p), |_, _| rng.random_range(-1.0..1.0));
                let b = DVector::from_fn(binomial(m, p + 1), |_, _| rng.random_range(-1.0..1.0));
                (a, b)
            })
            .collect();
        adjointness.push(adjointness_residual(&alg, p, &pairs));
    }
    let poincare = (0..=m).all(|p| betti[p] == betti[m - p]);
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);

    let mut verdicts = vec![
        Verdict::below("jacobi_residual", jacobi, tol),
        Verdict::holds("brackets_central", orth.passed, orth.max_abs),
        Verdict::below("d_squared", max(&d_squared), tol),
        Verdict::below("adjointness", max(&adjointness), tol),
        Verdict::holds("poincare_duality", poincare, value(&betti)),
    ];
    let mut results = json!({
        "dim": m,
        "betti": betti,
        "gate": gate,
        "jacobi_residual": jacobi,
        "bracket_horizontal_max": orth.max_abs,
        "d_squared": d_squared,
        "adjointness": adjointness,
        "tol": tol,
    });
    let mut tables = Vec::new();
    let mut betti_table = Table::new("betti", &["degree", "betti"]);
    for (p, b) in betti.iter().enumerate() {
        betti_table.push(vec![Cell::U(p), Cell::U(*b)]);
    }
    tables.push(betti_table);

    if alg.central_dim() == 1 {
        let calc = SplitCalculus::new(&alg)?;
        let mut block = Table::new("block", &["degree", "d_error", "dstar_error"]);
        let (mut d_err, mut ds_err) = (Vec::new(), Vec::new());
        for p in 0..=m {
            let d = if p < m { (calc.conjugated_d(p) - alg.differential(p)).amax() } else { 0.0 };
            let ds = if p >= 1 { (calc.conjugated_dstar(p) - alg.codifferential(p)).amax() } else { 0.0 };
            block.push(vec![Cell::U(p), Cell::F(d), Cell::F(ds)]);
            d_err.push(d);
            ds_err.push(ds);
        }
        tables.push(block);
        let theta = alg.central_dual()?;
        let eig = eigenform_test(&alg, &theta, EIGEN_TOL)?;
        verdicts.push(Verdict::below("block_d", max(&d_err), tol));
        verdicts.push(Verdict::below("block_dstar", max(&ds_err), tol));
        results["block_d_error"] = value(&d_err);
        results["block_dstar_error"] = value(&ds_err);
        results["central_dual_eigenform"] = value(&eig);
        results["eigen_tol"] = value(&EIGEN_TOL);
    }
    if let Some(b) = &spec.expect.betti {
        verdicts.push(Verdict::expect("betti", &betti, b));
    }
    if let Some(g) = &spec.expect.gate {
        verdicts.push(Verdict::expect("gate", &gate.class, g));
    }
    Ok((results, verdicts, tables))
}

fn run_bundle(spec: &BundleSpec, o: Overrides) -> Result<Parts> {
    o.reject(Kind::Bundle, false, false)?;
    let tol = o.tol.unwrap_or(spec.tol);
    let res = o.res.unwrap_or(spec.res);
    let metric = spec.build()?;
    let n = metric.dim();
    let grid = TorusGrid::new(n, res)?;
    metric.check_resolution(&grid)?;
    let opts = EigenOptions { seed: o.seed.unwrap_or(0), ..EigenOptions::default() };
    let scan = harmonic_scan(&metric, grid, spec.scan, spec.kernel_tol, &opts)?;
    let expected_kernel = n + usize::from(metric.c().iter().all(|v| *v == 0.0));

    let mut verdicts = vec![
        Verdict::expect("kernel_dim", &scan.kernel_dim, &expected_kernel),
        Verdict::holds("gap_resolved", scan.gap.is_some(), value(&scan.gap)),
        Verdict::below("harmonic_norm_variation", scan.max_norm_variation, tol),
    ];
    let mut results = json!({
        "res": res,
        "harmonic_scan": scan,
        "expected_kernel_dim": expected_kernel,
        "tol": tol,
    });

    let mut tables = Vec::new();
    let mut eig = Table::new("eigenvalues", &["index", "eigenvalue", "residual"]);
    for (i, (v, r)) in scan.eigenvalues.iter().zip(&scan.residuals).enumerate() {
        eig.push(vec![Cell::U(i), Cell::F(*v), Cell::F(*r)]);
    }
    tables.push(eig);
    let mut norms = Table::new("kernel_norms", &["index", "min", "max", "mean", "variation"]);
    for (i, s) in scan.kernel_norms.iter().enumerate() {
        norms.push(vec![Cell::U(i), Cell::F(s.min), Cell::F(s.max), Cell::F(s.mean), Cell::F(s.variation)]);
    }
    tables.push(norms);

    if n == 2 {
        let disc = left_invariance_discriminator(&metric, grid, spec.ratio_tol)?;
        if let Some(e) = spec.expect.left_invariant {
            verdicts.push(Verdict::expect("left_invariant", &disc.is_left_invariant, &e));
        }
        results["discriminator"] = value(&disc);
    }

    let sys = systolic_report(metric.base_lattice(), metric.fiber_length(), spec.equality_tol)?;
    if let Some(e) = spec.expect.equality {
        verdicts.push(Verdict::expect("equality", &sys.equality_flag, &e));
    }
    tables.push(systole_table(&[("base".to_string(), &sys)]));
    results["systole"] = value(&sys);
    results["sys_nm1_reading"] = SYS_NM1_READING.into();
    Ok((results, verdicts, tables))
}

fn systole_table(rows: &[(String, &crate::systole::SystolicReport)]) -> Table {
    let mut t = Table::new(
        "systole",
        &["lattice_id", "lambda1", "lambda1_dual", "product", "vol", "stsys1", "sys_nm1", "ratio", "equality_flag"],
    );
    for (id, r) in rows {
        t.push(vec![
            Cell::S(id.clone()),
            Cell::F(r.lambda1),
            Cell::F(r.lambda1_dual),
            Cell::F(r.product),
            Cell::F(r.vol),
            Cell::F(r.stsys1),
            Cell::F(r.sys_nm1),
            Cell::F(r.ratio),
            Cell::B(r.equality_flag),
        ]);
    }
    t
}

fn run_bk(spec: &BkSpec, o: Overrides) -> Result<Parts> {
    o.reject(Kind::BkExample, false, true)?;
    let tol = o.tol.unwrap_or(spec.tol);
    let levels = levels(&spec.levels, o.res)?;
    let metric = spec.build()?;
    let (rows, table) = bk_convergence(&metric, &levels)?;
    let finest = rows.last().expect("levels are nonempty");
    let mut verdicts = vec![
        Verdict::below("dstar_dx", finest.dstar_dx_max, tol),
        Verdict::below("dstar_dy", finest.dstar_dy_max, tol),
        Verdict::holds("inner_product_order", table.converges_at(spec.min_order), value(&table.min_order)),
    ];
    if let Some([lo, hi]) = spec.expect_range {
        let dev = (finest.inner_min - lo).abs().max((finest.inner_max - hi).abs());
        verdicts.push(Verdict::below("inner_product_range", dev, spec.range_tol));
    }
    let mut levels_table = Table::new(
        "bk_levels",
        &["res", "dstar_dx_max", "dstar_dy_max", "d_dx_max", "d_dy_max", "inner_min", "inner_max", "inner_error"],
    );
    for r in &rows {
        levels_table.push(vec![
            Cell::U(r.res),
            Cell::F(r.dstar_dx_max),
            Cell::F(r.dstar_dy_max),
            Cell::F(r.d_dx_max),
            Cell::F(r.d_dy_max),
            Cell::F(r.inner_min),
            Cell::F(r.inner_max),
            Cell::F(r.inner_error),
        ]);
    }
    let results = json!({
        "levels": rows,
        "convergence": table,
        "tol": tol,
        "min_order": spec.min_order,
        "range_tol": spec.range_tol,
    });
    Ok((results, verdicts, vec![levels_table, convergence_table("convergence", &table)]))
}

fn run_identity(spec: &IdentitySpec, o: Overrides) -> Result<Parts> {
    o.reject(Kind::IdentityCheck, false, false)?;
    let tol = o.tol.unwrap_or(spec.tol);
    let levels = levels(&spec.levels, o.res)?;
    let beta = spec.beta(o.seed)?;
    let (rows, table) = match spec.check {
        IdentityKind::Contraction => convergence(spec.n, &levels, |g| contraction_identity_check(&beta, g))?,
        IdentityKind::Awb => {
            let a = spec.a()?;
            convergence(spec.n, &levels, |g| awb_coclosed_check(&a, &beta, g))?
        }
    };
    let mut verdicts = vec![Verdict::holds(
        "convergence_order",
        table.converges_at(spec.min_order),
        value(&table.min_order),
    )];
    let degenerate = spec.check == IdentityKind::Contraction && spec.n == 2;
    if degenerate {
        let lhs = rows.iter().map(|r| r.lhs_max).fold(0.0, f64::max);
        verdicts.push(Verdict::below("degenerate_lhs", lhs, tol));
    }
    let mut t = Table::new("identity_levels", &["res", "lhs_max", "rhs_max", "residual"]);
    for r in &rows {
        t.push(vec![Cell::U(r.res), Cell::F(r.lhs_max), Cell::F(r.rhs_max), Cell::F(r.residual)]);
    }
    let results = json!({
        "coefficient": if spec.check == IdentityKind::Contraction { Some(spec.n as f64 - 2.0) } else { None },
        "degenerate": degenerate,
        "levels": rows,
        "convergence": table,
        "min_order": spec.min_order,
        "tol": tol,
    });
    Ok((results, verdicts, vec![t, convergence_table("convergence", &table)]))
}

fn run_systole(spec: &SystoleSpec, o: Overrides) -> Result<Parts> {
    o.reject(Kind::Systole, true, true)?;
    let tol = o.tol.unwrap_or(spec.tol);
    if spec.lattices.is_empty() {
        return Err(Error::input("at `lattices`: need at least one lattice"));
    }
    let mut reports = Vec::with_capacity(spec.lattices.len());
    let mut verdicts = Vec::new();
    for (i, l) in spec.lattices.iter().enumerate() {
        let lattice = Lattice::from_columns(&l.basis)
            .map_err(|e| Error::input(format!("at `lattices[{i}].basis`: {e}")))?;
        let r = systolic_report(&lattice, l.fiber_length, tol)?;
        if let Some(e) = l.expect_equality {
            verdicts.push(Verdict::expect(&format!("equality[{}]", l.id), &r.equality_flag, &e));
        }
        reports.push((l.id.clone(), r));
    }
    let rows: Vec<_> = reports.iter().map(|(id, r)| (id.clone(), r)).collect();
    let table = systole_table(&rows);
    let results = json!({
        "lattices": reports.iter().map(|(id, r)| json!({"id": id, "report": r})).collect::<Vec<_>>(),
        "sys_nm1_reading": SYS_NM1_READING,
        "tol": tol,
    });
    Ok((results, verdicts, vec![table]))
}

fn threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::input(format!("{THREADS_ENV} must be a positive integer, got \"{s}\""))),
        },
    }
}

fn run_args(kind: Kind, args: &RunArgs) -> Result<Outcome> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", args.input.display())))?;
    let file = problem::parse(&text)?;
    let overrides = Overrides { res: args.res, tol: args.tol, seed: args.seed };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::input(format!("thread pool: {e}")))?;
    pool.install(|| execute(kind, &file, overrides))
}

fn write_outputs(outcome: &Outcome, args: &RunArgs) -> Result<()> {
    let json = to_json(&outcome.report)?;
    if let Some(dir) = &args.csv {
        fs::create_dir_all(dir)?;
        for t in &outcome.tables {
            t.write(dir)?;
        }
    }
    match &args.out {
        Some(path) => fs::write(path, json)?,
        None => print!("{json}"),
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (kind, args) = cli.command.parts();
    let start = Instant::now();
    let outcome = match run_args(kind, args) {
        Ok(o) => o,
        Err(e @ Error::NoConvergence { .. }) => {
            eprintln!("nilforms: {e}");
            eprintln!("nilforms: try a smaller --res or a different --seed");
            return 3;
        }
        Err(e) => {
            eprintln!("nilforms: {e}");
            return 1;
        }
    };
    if let Err(e) = write_outputs(&outcome, args) {
        eprintln!("nilforms: {e}");
        return 1;
    }
    eprintln!("nilforms: {} finished in {:.3} s", kind.tag(), start.elapsed().as_secs_f64());
    for v in outcome.report.verdicts.iter().filter(|v| !v.passed) {
        eprintln!("nilforms: check failed: {}", v.check);
    }
    if outcome.report.passed {
        0
    } else {
        2
    }
}
