//! Command-line front end: fit landmark shape models by maximum
//! likelihood, compare generator families by modified BIC, run the
//! two-sample mean-shape likelihood-ratio test, evaluate densities,
//! and run the numerical self-check battery.
//!
//! Output is JSON with a fixed key order, one key per line, and floats
//! printed with 17 significant digits, so identical inputs produce
//! byte-identical output (timing lines aside).

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use pwshape::dataset::{read_landmarks, Dataset};
use pwshape::density::{
    CovSpec, DensityContext, GeneratorFamily, ModelSpec, RadialConvention,
};
use pwshape::error::Error;
use pwshape::geometry::{angle_count, matrix_from_angles, preshape, shape_from_v, VStarMode};
use pwshape::inference::{evidence_grade, fit_mle, lrt_mean_shape, FitResult};
use pwshape::kotz::KotzGenerator;
use pwshape::oracle::{
    derivative_report, mass_identity_report, radial_closed_vs_quadrature,
    shape_density_normalization, zonal_sum_report, OracleReport, Verdict,
};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "pwshape",
    about = "Landmark shape densities and mean-shape inference",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the mean configuration of one group by maximum likelihood.
    Fit(FitArgs),
    /// Fit several generator families and rank them by modified BIC.
    Compare(CompareArgs),
    /// Two-sample likelihood-ratio test for a common mean shape.
    Lrt(LrtArgs),
    /// Evaluate the shape log-density of specimens or explicit angles.
    Density(DensityArgs),
    /// Run the numerical self-check battery and report verdicts.
    SelfCheck(SelfCheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Gaussian,
    Kotz,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Printed,
    Derived,
}

#[derive(Clone, Copy, ValueEnum)]
enum VstarArg {
    Cholesky,
    Spectral,
}

#[derive(Args)]
struct ModelArgs {
    /// Generator family.
    #[arg(long, value_enum, default_value_t = ModelKind::Gaussian)]
    model: ModelKind,
    /// Kotz shape parameter (integer-valued; 1 recovers the Gaussian).
    #[arg(long = "T", default_value_t = 2.0)]
    t: f64,
    /// Kotz rate parameter.
    #[arg(long = "R", default_value_t = 0.5)]
    r: f64,
    /// Isotropic landmark variance.
    #[arg(long, default_value_t = 50.0)]
    sigma2: f64,
    /// Zonal series truncation degree.
    #[arg(long, default_value_t = 120)]
    truncation: u32,
    /// Radial integral exponent convention.
    #[arg(long, value_enum, default_value_t = ConventionArg::Printed)]
    radial_convention: ConventionArg,
    /// How the rank-reduced determinant is computed.
    #[arg(long, value_enum, default_value_t = VstarArg::Cholesky)]
    vstar: VstarArg,
    /// Accepted on every command for interface uniformity; the
    /// fitting and density paths draw no random numbers, so results
    /// do not depend on it.
    #[arg(long, default_value_t = 0)]
    #[allow(dead_code)]
    seed: u64,
}

#[derive(Args)]
struct FitArgs {
    /// Landmark TSV file.
    #[arg(long)]
    data: PathBuf,
    /// Group label to fit (defaults to the only group).
    #[arg(long)]
    group: Option<String>,
    #[command(flatten)]
    model: ModelArgs,
    /// Write the JSON report here as well as to stdout; an optimizer
    /// trace CSV is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Landmark TSV file.
    #[arg(long)]
    data: PathBuf,
    /// Group label to fit (defaults to the only group).
    #[arg(long)]
    group: Option<String>,
    #[command(flatten)]
    model: ModelArgs,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LrtArgs {
    /// Landmark TSV file.
    #[arg(long)]
    data: PathBuf,
    /// First group label.
    #[arg(long)]
    group1: String,
    /// Second group label.
    #[arg(long)]
    group2: String,
    #[command(flatten)]
    model: ModelArgs,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    /// Landmark TSV file (alternative to --angles).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Restrict to one group of the data file.
    #[arg(long)]
    group: Option<String>,
    /// Explicit chart angles, comma-separated (alternative to --data).
    #[arg(long, conflicts_with = "data")]
    angles: Option<String>,
    /// Landmark count when using --angles.
    #[arg(long)]
    landmarks: Option<usize>,
    /// Coordinate dimension when using --angles.
    #[arg(long)]
    dim: Option<usize>,
    /// Mean configuration entries, comma-separated row-major
    /// ((landmarks-1) x dim values); zero (central) when omitted.
    #[arg(long)]
    mu: Option<String>,
    #[command(flatten)]
    model: ModelArgs,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelfCheckArgs {
    /// Monte-Carlo sample count for the normalization check.
    #[arg(long, default_value_t = 200_000)]
    mc_samples: u64,
    /// Monte-Carlo master seed.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit(a) => cmd_fit(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Lrt(a) => cmd_lrt(&a),
        Command::Density(a) => cmd_density(&a),
        Command::SelfCheck(a) => cmd_self_check(&a),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(match e {
                Error::Parse { .. } | Error::InvalidData(_) | Error::Io(_) => 2,
                _ => 3,
            });
        }
    }
}

// ---------------------------------------------------------------- JSON

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// 17-significant-digit float literal; round-trips exactly.
fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn num_array(indent: &str, values: &[f64]) -> String {
    if values.is_empty() {
        return "[]".to_string();
    }
    let inner: Vec<String> = values
        .iter()
        .map(|v| format!("{indent}  {}", num(*v)))
        .collect();
    format!("[\n{}\n{indent}]", inner.join(",\n"))
}

fn emit(json: &str, out: &Option<PathBuf>) -> Result<(), Error> {
    println!("{json}");
    if let Some(path) = out {
        std::fs::write(path, format!("{json}\n"))?;
    }
    Ok(())
}

// ------------------------------------------------------------- helpers

fn model_label(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Gaussian => "gaussian",
        ModelKind::Kotz => "kotz",
    }
}

fn convention_label(c: ConventionArg) -> &'static str {
    match c {
        ConventionArg::Printed => "printed",
        ConventionArg::Derived => "derived",
    }
}

fn vstar_label(v: VstarArg) -> &'static str {
    match v {
        VstarArg::Cholesky => "cholesky",
        VstarArg::Spectral => "spectral",
    }
}

fn generator_for(kind: ModelKind, t: f64, r: f64) -> GeneratorFamily {
    match kind {
        ModelKind::Gaussian => GeneratorFamily::Gaussian,
        ModelKind::Kotz => GeneratorFamily::Kotz { t, r },
    }
}

fn effective_t_r(kind: ModelKind, t: f64, r: f64) -> (f64, f64) {
    match kind {
        ModelKind::Gaussian => (1.0, 0.5),
        ModelKind::Kotz => (t, r),
    }
}

fn build_spec(args: &ModelArgs, mu: DMatrix<f64>) -> ModelSpec {
    ModelSpec::new(
        generator_for(args.model, args.t, args.r),
        mu,
        CovSpec::Isotropic(args.sigma2),
    )
    .with_truncation(args.truncation)
    .with_convention(match args.radial_convention {
        ConventionArg::Printed => RadialConvention::Printed,
        ConventionArg::Derived => RadialConvention::Derived,
    })
    .with_vstar(match args.vstar {
        VstarArg::Cholesky => VStarMode::Cholesky,
        VstarArg::Spectral => VStarMode::Spectral,
    })
}

/// Resolved group: its label, specimen ids, and centered preshapes.
type GroupData = (String, Vec<String>, Vec<DMatrix<f64>>);

/// Pull one group out of a dataset as centered preshapes.
fn group_preshapes(ds: &Dataset, group: &Option<String>) -> Result<GroupData, Error> {
    let label = match group {
        Some(g) => g.clone(),
        None => {
            let labels = ds.group_labels();
            if labels.len() != 1 {
                return Err(Error::InvalidData(format!(
                    "data file has {} groups; pass --group to pick one of {:?}",
                    labels.len(),
                    labels
                )));
            }
            labels[0].to_string()
        }
    };
    let specimens = ds.group(&label).ok_or_else(|| {
        Error::InvalidData(format!(
            "group {:?} not found; available: {:?}",
            label,
            ds.group_labels()
        ))
    })?;
    let ids = specimens.iter().map(|s| s.id.clone()).collect();
    let preshapes = specimens.iter().map(|s| preshape(&s.config)).collect();
    Ok((label, ids, preshapes))
}

fn parse_float_list(text: &str, what: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidData(format!("bad {what} entry {tok:?}")))
        })
        .collect()
}

fn mu_hat_row_major(fit: &FitResult) -> Vec<f64> {
    fit.mu_hat.transpose().as_slice().to_vec()
}

fn model_block(args: &ModelArgs) -> String {
    let (t, r) = effective_t_r(args.model, args.t, args.r);
    let mut s = String::new();
    let _ = writeln!(s, "  \"model\": \"{}\",", model_label(args.model));
    let _ = writeln!(s, "  \"T\": {},", num(t));
    let _ = writeln!(s, "  \"R\": {},", num(r));
    let _ = writeln!(s, "  \"sigma2\": {},", num(args.sigma2));
    let _ = writeln!(s, "  \"truncation\": {},", args.truncation);
    let _ = writeln!(
        s,
        "  \"radial_convention\": \"{}\",",
        convention_label(args.radial_convention)
    );
    let _ = writeln!(s, "  \"vstar\": \"{}\",", vstar_label(args.vstar));
    s
}

fn write_trace(out: &Path, fit: &FitResult) -> Result<(), Error> {
    let mut csv = String::from("iteration,log_l\n");
    for (i, ll) in &fit.trace {
        let _ = writeln!(csv, "{i},{}", num(*ll));
    }
    let trace_path = out.with_extension("trace.csv");
    std::fs::write(trace_path, csv)?;
    Ok(())
}

// ------------------------------------------------------------ commands

fn cmd_fit(args: &FitArgs) -> Result<i32, Error> {
    let ds = read_landmarks(&args.data)?;
    let (label, _ids, preshapes) = group_preshapes(&ds, &args.group)?;
    let q = ds.n_landmarks - 1;
    let spec = build_spec(&args.model, DMatrix::zeros(q, ds.dim));
    let fit = fit_mle(&preshapes, &spec)?;
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"command\": \"fit\",");
    let _ = writeln!(s, "  \"group\": \"{}\",", esc(&label));
    s.push_str(&model_block(&args.model));
    let _ = writeln!(s, "  \"n_specimens\": {},", preshapes.len());
    let _ = writeln!(s, "  \"mu_hat\": {},", num_array("  ", &mu_hat_row_major(&fit)));
    let _ = writeln!(s, "  \"log_l\": {},", num(fit.log_l));
    let _ = writeln!(s, "  \"bic_star\": {},", num(fit.bic_star));
    let _ = writeln!(s, "  \"iterations\": {},", fit.iterations);
    let _ = writeln!(s, "  \"optimizer_converged\": {},", fit.optimizer_converged);
    let _ = writeln!(s, "  \"series_converged\": {},", fit.series_converged);
    let _ = writeln!(s, "  \"wall_time_s\": {}", num(fit.wall_time_s));
    s.push('}');
    emit(&s, &args.out)?;
    if let Some(out) = &args.out {
        write_trace(out, &fit)?;
    }
    Ok(0)
}

fn cmd_compare(args: &CompareArgs) -> Result<i32, Error> {
    let ds = read_landmarks(&args.data)?;
    let (label, _ids, preshapes) = group_preshapes(&ds, &args.group)?;
    let q = ds.n_landmarks - 1;
    let candidates: [(ModelKind, f64, f64); 3] = [
        (ModelKind::Gaussian, 1.0, 0.5),
        (ModelKind::Kotz, 2.0, args.model.r),
        (ModelKind::Kotz, 3.0, args.model.r),
    ];
    let mut rows = Vec::new();
    for (kind, t, r) in candidates {
        let spec = ModelSpec::new(
            generator_for(kind, t, r),
            DMatrix::zeros(q, ds.dim),
            CovSpec::Isotropic(args.model.sigma2),
        )
        .with_truncation(args.model.truncation)
        .with_convention(match args.model.radial_convention {
            ConventionArg::Printed => RadialConvention::Printed,
            ConventionArg::Derived => RadialConvention::Derived,
        })
        .with_vstar(match args.model.vstar {
            VstarArg::Cholesky => VStarMode::Cholesky,
            VstarArg::Spectral => VStarMode::Spectral,
        });
        let fit = fit_mle(&preshapes, &spec)?;
        rows.push((kind, t, r, fit));
    }
    rows.sort_by(|a, b| a.3.bic_star.partial_cmp(&b.3.bic_star).unwrap());
    let best = rows[0].3.bic_star;
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"command\": \"compare\",");
    let _ = writeln!(s, "  \"group\": \"{}\",", esc(&label));
    let _ = writeln!(s, "  \"sigma2\": {},", num(args.model.sigma2));
    let _ = writeln!(s, "  \"truncation\": {},", args.model.truncation);
    let _ = writeln!(
        s,
        "  \"radial_convention\": \"{}\",",
        convention_label(args.model.radial_convention)
    );
    let _ = writeln!(s, "  \"n_specimens\": {},", preshapes.len());
    let _ = writeln!(s, "  \"models\": [");
    for (i, (kind, t, r, fit)) in rows.iter().enumerate() {
        let delta = fit.bic_star - best;
        let grade = evidence_grade(delta)?;
        let _ = writeln!(s, "    {{");
        let _ = writeln!(s, "      \"model\": \"{}\",", model_label(*kind));
        let _ = writeln!(s, "      \"T\": {},", num(*t));
        let _ = writeln!(s, "      \"R\": {},", num(*r));
        let _ = writeln!(s, "      \"log_l\": {},", num(fit.log_l));
        let _ = writeln!(s, "      \"bic_star\": {},", num(fit.bic_star));
        let _ = writeln!(s, "      \"delta_bic\": {},", num(delta));
        let _ = writeln!(s, "      \"evidence\": \"{grade}\",");
        let _ = writeln!(s, "      \"mu_hat\": {},", num_array("      ", &mu_hat_row_major(fit)));
        let _ = writeln!(s, "      \"iterations\": {},", fit.iterations);
        let _ = writeln!(s, "      \"optimizer_converged\": {},", fit.optimizer_converged);
        let _ = writeln!(s, "      \"series_converged\": {},", fit.series_converged);
        let _ = writeln!(s, "      \"wall_time_s\": {}", num(fit.wall_time_s));
        let _ = writeln!(s, "    }}{}", if i + 1 < rows.len() { "," } else { "" });
    }
    let _ = writeln!(s, "  ]");
    s.push('}');
    emit(&s, &args.out)?;
    Ok(0)
}

fn cmd_lrt(args: &LrtArgs) -> Result<i32, Error> {
    let started = Instant::now();
    let ds = read_landmarks(&args.data)?;
    let (l1, _ids1, g1) = group_preshapes(&ds, &Some(args.group1.clone()))?;
    let (l2, _ids2, g2) = group_preshapes(&ds, &Some(args.group2.clone()))?;
    let q = ds.n_landmarks - 1;
    let spec = build_spec(&args.model, DMatrix::zeros(q, ds.dim));
    let lrt = lrt_mean_shape(&g1, &g2, &spec)?;
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"command\": \"lrt\",");
    let _ = writeln!(s, "  \"group1\": \"{}\",", esc(&l1));
    let _ = writeln!(s, "  \"group2\": \"{}\",", esc(&l2));
    s.push_str(&model_block(&args.model));
    let _ = writeln!(s, "  \"n_specimens_1\": {},", g1.len());
    let _ = writeln!(s, "  \"n_specimens_2\": {},", g2.len());
    let _ = writeln!(s, "  \"statistic\": {},", num(lrt.statistic));
    let _ = writeln!(s, "  \"df\": {},", lrt.df);
    let _ = writeln!(s, "  \"p_value\": {},", num(lrt.p_value));
    let _ = writeln!(s, "  \"log_l_h0\": {},", num(lrt.log_l_h0));
    let _ = writeln!(s, "  \"log_l_h1\": {},", num(lrt.log_l_h1));
    let _ = writeln!(s, "  \"clamped\": {},", lrt.clamped);
    let _ = writeln!(s, "  \"log_l_group1\": {},", num(lrt.fit_group1.log_l));
    let _ = writeln!(s, "  \"log_l_group2\": {},", num(lrt.fit_group2.log_l));
    let _ = writeln!(
        s,
        "  \"mu_hat_group1\": {},",
        num_array("  ", &mu_hat_row_major(&lrt.fit_group1))
    );
    let _ = writeln!(
        s,
        "  \"mu_hat_group2\": {},",
        num_array("  ", &mu_hat_row_major(&lrt.fit_group2))
    );
    let _ = writeln!(
        s,
        "  \"mu_hat_pooled\": {},",
        num_array("  ", &mu_hat_row_major(&lrt.fit_pooled))
    );
    let _ = writeln!(s, "  \"wall_time_s\": {}", num(started.elapsed().as_secs_f64()));
    s.push('}');
    emit(&s, &args.out)?;
    Ok(0)
}

fn cmd_density(args: &DensityArgs) -> Result<i32, Error> {
    struct Row {
        id: String,
        group: String,
        shape: pwshape::geometry::PseudoWishartShape,
    }
    let mut rows: Vec<Row> = Vec::new();
    let (q, k);
    match (&args.data, &args.angles) {
        (Some(path), None) => {
            let ds = read_landmarks(path)?;
            q = ds.n_landmarks - 1;
            k = ds.dim;
            for (label, specimens) in ds.groups() {
                if let Some(only) = &args.group {
                    if only != label {
                        continue;
                    }
                }
                for sp in specimens {
                    let y = preshape(&sp.config);
                    let shape = pwshape::geometry::pw_coordinates(&y)?;
                    rows.push(Row {
                        id: sp.id.clone(),
                        group: label.clone(),
                        shape,
                    });
                }
            }
            if rows.is_empty() {
                return Err(Error::InvalidData(match &args.group {
                    Some(g) => format!("group {g:?} not found or empty"),
                    None => "data file holds no specimens".to_string(),
                }));
            }
        }
        (None, Some(list)) => {
            let landmarks = args.landmarks.ok_or_else(|| {
                Error::InvalidData("--angles needs --landmarks".to_string())
            })?;
            let dim = args
                .dim
                .ok_or_else(|| Error::InvalidData("--angles needs --dim".to_string()))?;
            if landmarks < 2 || dim == 0 {
                return Err(Error::InvalidData(
                    "--landmarks must be >= 2 and --dim >= 1".to_string(),
                ));
            }
            q = landmarks - 1;
            k = dim;
            let u = parse_float_list(list, "angle")?;
            let expect = angle_count(q, k);
            if u.len() != expect {
                return Err(Error::InvalidData(format!(
                    "{} landmarks in {} dimensions need {} angles, got {}",
                    landmarks,
                    dim,
                    expect,
                    u.len()
                )));
            }
            let vhat = matrix_from_angles(&u, q, k)?;
            let shape = shape_from_v(&vhat, k)?;
            rows.push(Row {
                id: "angles".to_string(),
                group: String::new(),
                shape,
            });
        }
        _ => {
            return Err(Error::InvalidData(
                "pass exactly one of --data or --angles".to_string(),
            ))
        }
    }
    let mu = match &args.mu {
        None => DMatrix::zeros(q, k),
        Some(list) => {
            let vals = parse_float_list(list, "mean")?;
            if vals.len() != q * k {
                return Err(Error::InvalidData(format!(
                    "mean needs {} entries ({q} x {k} row-major), got {}",
                    q * k,
                    vals.len()
                )));
            }
            DMatrix::from_row_slice(q, k, &vals)
        }
    };
    let ctx = DensityContext::new(build_spec(&args.model, mu))?;
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"command\": \"density\",");
    s.push_str(&model_block(&args.model));
    let _ = writeln!(s, "  \"specimens\": [");
    for (i, row) in rows.iter().enumerate() {
        let d = ctx.shape_logdensity(&row.shape)?;
        let _ = writeln!(s, "    {{");
        let _ = writeln!(s, "      \"id\": \"{}\",", esc(&row.id));
        let _ = writeln!(s, "      \"group\": \"{}\",", esc(&row.group));
        let _ = writeln!(s, "      \"r\": {},", num(row.shape.r));
        let _ = writeln!(s, "      \"chart_scale\": {},", num(row.shape.chart_scale));
        let _ = writeln!(s, "      \"u\": {},", num_array("      ", &row.shape.u));
        let _ = writeln!(s, "      \"log_jacobian\": {},", num(row.shape.log_jacobian));
        let _ = writeln!(s, "      \"log_density\": {},", num(d.log_density));
        let _ = writeln!(s, "      \"degrees_used\": {},", d.degrees_used);
        let _ = writeln!(s, "      \"converged\": {}", d.converged);
        let _ = writeln!(s, "    }}{}", if i + 1 < rows.len() { "," } else { "" });
    }
    let _ = writeln!(s, "  ]");
    s.push('}');
    emit(&s, &args.out)?;
    Ok(0)
}

fn cmd_self_check(args: &SelfCheckArgs) -> Result<i32, Error> {
    let mut reports: Vec<OracleReport> = Vec::new();
    reports.push(zonal_sum_report(&[1.3, 0.4], 12, 1e-10));
    reports.push(zonal_sum_report(&[0.9, 0.5, 0.2], 12, 1e-10));
    let m_half = 5.0; // six planar landmarks
    let gaussian = KotzGenerator::gaussian(m_half)?;
    let kotz2 = KotzGenerator::new(2.0, 0.5, m_half)?;
    let kotz3 = KotzGenerator::new(3.0, 0.25, m_half)?;
    for (name, gen) in [
        ("gaussian", &gaussian),
        ("kotz_t2", &kotz2),
        ("kotz_t3", &kotz3),
    ] {
        let mut r = mass_identity_report(gen, 1e-8)?;
        r.name = format!("{} {}", r.name, name);
        reports.push(r);
        for k in [2u32, 4u32] {
            for y in [0.5, 5.0] {
                let mut r = derivative_report(gen, k, y, 1e-6)?;
                r.name = format!("{} {}", r.name, name);
                reports.push(r);
            }
        }
        let mut r = radial_closed_vs_quadrature(gen, 8.0, 4, 0.7, 1.3, 1e-8)?;
        r.name = format!("{} {}", r.name, name);
        reports.push(r);
    }
    // Central isotropic chart normalization for the smallest planar
    // case, under the exponent convention that integrates to one.
    let ctx = DensityContext::new(
        ModelSpec::new(
            GeneratorFamily::Gaussian,
            DMatrix::zeros(2, 2),
            CovSpec::Isotropic(1.0),
        )
        .with_truncation(8)
        .with_convention(RadialConvention::Derived),
    )?;
    reports.push(shape_density_normalization(
        &ctx,
        args.mc_samples,
        args.seed,
        0.02,
    )?);

    let all_pass = reports.iter().all(|r| r.verdict == Verdict::Pass);
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"command\": \"self_check\",");
    let _ = writeln!(s, "  \"mc_samples\": {},", args.mc_samples);
    let _ = writeln!(s, "  \"seed\": {},", args.seed);
    let _ = writeln!(s, "  \"reports\": [");
    for (i, r) in reports.iter().enumerate() {
        let _ = writeln!(s, "    {{");
        let _ = writeln!(s, "      \"name\": \"{}\",", esc(&r.name));
        let _ = writeln!(s, "      \"computed\": {},", num(r.computed));
        let _ = writeln!(s, "      \"reference\": {},", num(r.reference));
        let _ = writeln!(s, "      \"rel_error\": {},", num(r.rel_error));
        let _ = writeln!(s, "      \"samples_or_nodes\": {},", r.samples_or_nodes);
        let _ = writeln!(s, "      \"tolerance\": {},", num(r.tolerance));
        let _ = writeln!(s, "      \"verdict\": \"{}\",", r.verdict);
        let _ = writeln!(
            s,
            "      \"standard_error\": {}",
            match r.standard_error {
                Some(se) => num(se),
                None => "null".to_string(),
            }
        );
        let _ = writeln!(s, "    }}{}", if i + 1 < reports.len() { "," } else { "" });
    }
    let _ = writeln!(s, "  ],");
    let _ = writeln!(s, "  \"all_pass\": {all_pass}");
    s.push('}');
    emit(&s, &args.out)?;
    Ok(if all_pass { 0 } else { 3 })
}
