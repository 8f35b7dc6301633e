mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use sopq_core::{
    horn_format, principal_sigma, verify_all, zonal_eval, Complex64, Error, GroupSignature, HornForm, HornTable,
    MethodTag, QuadratureSpec, RepresentationParams, VerifyReport, ZonalConfig,
};

use output::{emit, Format, OutputRecord};

const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_VERIFY_FAILED: u8 = 4;

/// Zonal spherical functions of SO(p,q).
#[derive(Debug, Parser)]
#[command(name = "sopq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one point.
    Eval(EvalArgs),
    /// Evaluate a grid of rho and alpha values.
    Table(TableArgs),
    /// Cross-check every applicable method; exit 4 on disagreement.
    Verify(VerifyArgs),
    /// Print a Horn parameter table.
    Describe(DescribeArgs),
}

#[derive(Debug, Args)]
struct GroupArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    q: u32,
}

#[derive(Debug, Args)]
struct SigmaArgs {
    /// Principal-series parameter: sigma = -(p+q-2)/2 + i rho.
    #[arg(long, conflicts_with_all = ["sigma_re", "sigma_im"], required_unless_present = "sigma_re")]
    rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    sigma_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "sigma_re")]
    sigma_im: Option<f64>,
    #[arg(long, default_value_t = 0)]
    eps: u8,
}

impl SigmaArgs {
    fn rep(&self, sig: &GroupSignature) -> Result<RepresentationParams, Error> {
        let sigma = match self.rho {
            Some(rho) => principal_sigma(sig, rho).sigma,
            None => Complex64::new(self.sigma_re.unwrap_or(0.0), self.sigma_im.unwrap_or(0.0)),
        };
        RepresentationParams::new(sigma, self.eps)
    }
}

#[derive(Debug, Args)]
struct NumericArgs {
    #[arg(long, default_value_t = ZonalConfig::DEFAULT_MAX_SHELLS)]
    max_shells: u64,
    #[arg(long, default_value_t = QuadratureSpec::DEFAULT_BASE_ORDER)]
    quad_base: usize,
    #[arg(long, default_value_t = QuadratureSpec::DEFAULT_MAX_ORDER)]
    quad_max: usize,
    #[arg(long, default_value_t = QuadratureSpec::DEFAULT_PERIODIC_BASE)]
    quad_periodic: usize,
}

impl NumericArgs {
    fn config(&self, tol: f64) -> Result<ZonalConfig, Error> {
        Ok(ZonalConfig {
            tol,
            max_shells: self.max_shells,
            quad: QuadratureSpec::new(self.quad_base, self.quad_max, self.quad_periodic, tol)?,
            horn13_table: None,
        })
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[command(flatten)]
    sigma: SigmaArgs,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value = "auto")]
    method: MethodTag,
    #[arg(long, default_value_t = ZonalConfig::DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    numeric: NumericArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    rho_list: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    eps: u8,
    #[arg(long, allow_hyphen_values = true)]
    alpha_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    alpha_max: f64,
    #[arg(long)]
    alpha_steps: usize,
    #[arg(long, default_value = "auto")]
    method: MethodTag,
    #[arg(long, default_value_t = ZonalConfig::DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    numeric: NumericArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[command(flatten)]
    sigma: SigmaArgs,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    alpha_list: Vec<f64>,
    /// Largest relative deviation accepted between methods.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Tolerance of the individual evaluations.
    #[arg(long, default_value_t = ZonalConfig::DEFAULT_TOL)]
    eval_tol: f64,
    #[command(flatten)]
    numeric: NumericArgs,
    #[command(flatten)]
    out: OutputArgs,
    /// Add 0.5 to one Horn13 table base before verifying.
    #[arg(long, hide = true)]
    inject_horn13_fault: Option<usize>,
}

#[derive(Debug, Args)]
struct DescribeArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long, value_parser = ["13", "14"])]
    form: String,
    /// Also print the numeric bases for this sigma.
    #[arg(long, allow_hyphen_values = true)]
    sigma_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "sigma_re")]
    sigma_im: Option<f64>,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(std::io::Error),
    VerifyFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            Failure::Core(_) | Failure::Io(_) => EXIT_INVALID,
            Failure::VerifyFailed => EXIT_VERIFY_FAILED,
        }
    }
}

fn eval(a: &EvalArgs) -> Result<(), Failure> {
    let sig = GroupSignature::new(a.group.p, a.group.q)?;
    let rep = a.sigma.rep(&sig)?;
    let cfg = a.numeric.config(a.tol)?;
    let r = zonal_eval(&sig, &rep, a.alpha, a.method, &cfg)?;
    emit(&[OutputRecord::new(&sig, &rep, a.alpha, &r)], a.out.format, a.out.output.as_deref())?;
    Ok(())
}

fn alpha_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, Error> {
    if steps == 0 || !(min.is_finite() && max.is_finite()) {
        return Err(Error::Domain(format!(
            "need finite bounds and at least one step, got [{min}, {max}] with {steps}"
        )));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let h = (max - min) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { max } else { min + h * i as f64 }).collect())
}

fn table(a: &TableArgs) -> Result<(), Failure> {
    let sig = GroupSignature::new(a.group.p, a.group.q)?;
    let cfg = a.numeric.config(a.tol)?;
    let alphas = alpha_grid(a.alpha_min, a.alpha_max, a.alpha_steps)?;
    let reps = a
        .rho_list
        .iter()
        .map(|&rho| RepresentationParams::new(principal_sigma(&sig, rho).sigma, a.eps))
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<(&RepresentationParams, f64)> =
        reps.iter().flat_map(|rep| alphas.iter().map(move |&x| (rep, x))).collect();
    let records = points
        .par_iter()
        .map(|&(rep, alpha)| {
            zonal_eval(&sig, rep, alpha, a.method, &cfg).map(|r| OutputRecord::new(&sig, rep, alpha, &r))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    emit(&records, a.out.format, a.out.output.as_deref())?;
    Ok(())
}

fn summarize(report: &VerifyReport) -> String {
    let mut s = String::new();
    for a in &report.alphas {
        let worst = a.pairs.iter().map(|d| d.rel).fold(0.0, f64::max);
        s.push_str(&format!(
            "alpha={:<8} {} max_rel_dev={:.3e}",
            a.alpha,
            if a.pass() { "ok  " } else { "FAIL" },
            worst
        ));
        if let Some(d) = a.partner_rel {
            s.push_str(&format!(" partner_rel_dev={d:.3e}"));
        }
        if let Some(m) = a.max_imag {
            s.push_str(&format!(" max_abs_imag={m:.3e}"));
        }
        s.push('\n');
        for o in &a.outcomes {
            if let Err(e) = &o.result {
                s.push_str(&format!("  {}: {e}\n", o.method));
            }
        }
        for d in a.pairs.iter().filter(|d| !d.pass) {
            s.push_str(&format!("  {} vs {}: rel_dev={:.3e}\n", d.a, d.b, d.rel));
        }
    }
    if report.pass() {
        s.push_str(&format!("verify: PASS (tol {:e})\n", report.tol));
    } else {
        let suspects: Vec<&str> = report.suspects().iter().map(|m| m.as_str()).collect();
        s.push_str(&format!(
            "verify: FAIL (tol {:e}; suspect methods: {})\n",
            report.tol,
            if suspects.is_empty() { "none isolated".to_string() } else { suspects.join(", ") }
        ));
    }
    s
}

fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let sig = GroupSignature::new(a.group.p, a.group.q)?;
    let rep = a.sigma.rep(&sig)?;
    let mut cfg = a.numeric.config(a.eval_tol)?;
    if let Some(index) = a.inject_horn13_fault {
        cfg.horn13_table = Some(HornTable::of(HornForm::Form13).perturbed(index, 0.5)?);
    }
    let report = verify_all(&sig, &rep, &a.alpha_list, a.tol, &cfg)?;
    let records: Vec<OutputRecord> = report
        .alphas
        .iter()
        .flat_map(|ar| {
            ar.outcomes
                .iter()
                .filter_map(|o| o.result.as_ref().ok())
                .map(|r| OutputRecord::new(&sig, &rep, ar.alpha, r))
                .collect::<Vec<_>>()
        })
        .collect();
    emit(&records, a.out.format, a.out.output.as_deref())?;
    eprint!("{}", summarize(&report));
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::VerifyFailed)
    }
}

fn describe(a: &DescribeArgs) -> Result<(), Failure> {
    let sig = GroupSignature::new(a.group.p, a.group.q)?;
    let form = if a.form == "13" { HornForm::Form13 } else { HornForm::Form14 };
    let table = HornTable::of(form);
    let (p, q) = (sig.p(), sig.q());
    let oriented = if sig.swapped() { format!(" (as SO({p},{q}))") } else { String::new() };
    let mut text = format!(
        "{} for SO({},{}){oriented}; Z = (1/ch a) F(th^2 a, th^2 a)\n{}\n",
        form.tag(),
        a.group.p,
        a.group.q,
        horn_format(&table.series(&sig, Complex64::new(0.0, 0.0), true)?)
    );
    if let Some(re) = a.sigma_re {
        let sigma = Complex64::new(re, a.sigma_im.unwrap_or(0.0));
        text.push_str(&format!("sigma = {sigma}:\n{}\n", horn_format(&table.series(&sig, sigma, false)?)));
    }
    std::io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

fn run(argv: impl IntoIterator<Item = std::ffi::OsString>) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Table(a) => table(a),
        Command::Verify(a) => verify(a),
        Command::Describe(a) => describe(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::VerifyFailed => {}
            }
            f.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
