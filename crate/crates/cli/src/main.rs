use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use zetaforms::asymptotics::{
    asymptotic_check, default_r, min_a_for_dim, optimize_r, p_growth_bound, rates_table, s_bound,
    BoundReport,
};
use zetaforms::partial_fractions::{
    check_coefficient_integrality, check_reconstruction, check_symmetry, integer_scaled,
    p_poly_eval,
};
use zetaforms::precision::{build_linear_form, eval_s, mc_integral, verify_identity_at_z};
use zetaforms::{decompose, Error, ExactRational, FormParams};

const PRECISION_ENV: &str = "ZETAFORMS_PRECISION_BITS";
const DEFAULT_PRECISION: u32 = 256;
const RECONSTRUCTION_SEED: u64 = 0x5eed;

#[derive(Parser)]
#[command(
    name = "zetaforms",
    version,
    about = "Linear forms in odd zeta values and the dimension bounds they give"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format (rates defaults to csv, everything else to json)
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,

    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct FormArgs {
    /// Zeta height a
    #[arg(long)]
    a: u32,
    /// Acceleration parameter (default: nearest a/(log a)^2)
    #[arg(long)]
    r: Option<u32>,
}

impl FormArgs {
    fn r(&self) -> u32 {
        self.r
            .unwrap_or_else(|| default_r(self.a.max(3) as u64) as u32)
    }

    fn params(&self, n: u32) -> Result<FormParams, Failure> {
        Ok(FormParams::new(self.a, self.r(), n)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integer linear forms l_n = d_n^a S_n(1) for even n up to --nmax
    Forms {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, default_value_t = 0)]
        nmax: u32,
        /// Working precision in bits
        #[arg(long)]
        prec: Option<u32>,
    },
    /// Runs the exact and numerical self-checks for n = 0..=--n
    Verify {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        n: u32,
        /// Point z > 1 for the general identity check
        #[arg(long, default_value = "2")]
        z: String,
        #[arg(long)]
        prec: Option<u32>,
        /// Perturbs c[1][0] before checking (test hook)
        #[arg(long, hide = true)]
        inject_mutation: bool,
    },
    /// Empirical growth of |S_n(1)| and of the integer coefficients
    Rates {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, default_value_t = 40)]
        nmax: u32,
        #[arg(long)]
        prec: Option<u32>,
    },
    /// Dimension lower bounds f(a,r)/g(a,r)
    Bound {
        /// Single zeta height
        #[arg(long, conflicts_with_all = ["grid", "find_dim"], required_unless_present_any = ["grid", "find_dim"])]
        a: Option<u64>,
        /// Fix r instead of optimizing (only with --a)
        #[arg(long, requires = "a")]
        r: Option<u64>,
        /// Powers of ten LO:HI, e.g. 1e3:1e9
        #[arg(long, conflicts_with = "find_dim")]
        grid: Option<String>,
        /// Smallest odd a whose bound reaches this value
        #[arg(long)]
        find_dim: Option<f64>,
    },
    /// Monte-Carlo check of the integral representation of S_n(z)
    Integral {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "1")]
        z: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Check(String),
    Cap(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Check(_) => 2,
            Failure::Cap(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Check(m) | Failure::Cap(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Inconsistent { .. } | Error::NonIntegral { .. } => Failure::Check(msg),
            Error::ScanCap(_) | Error::PrecisionUnreachable(_) => Failure::Cap(msg),
            _ => Failure::Usage(msg),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

fn precision(flag: Option<u32>) -> Result<u32, Failure> {
    if let Some(p) = flag {
        return Ok(p);
    }
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Usage(format!(
                "{PRECISION_ENV} must be a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_PRECISION),
    }
}

fn parse_rational(s: &str) -> Result<ExactRational, Failure> {
    s.parse()
        .map_err(|_| Failure::Usage(format!("expected a rational p/q, got {s:?}")))
}

fn parse_power_of_ten(s: &str) -> Result<u32, Failure> {
    let bad = || Failure::Usage(format!("expected a power of ten like 1e3, got {s:?}"));
    let (mant, exp) = s.split_once(['e', 'E']).ok_or_else(bad)?;
    if mant != "1" {
        return Err(bad());
    }
    exp.parse().ok().filter(|&e| e <= 18).ok_or_else(bad)
}

fn require_json(format: Format, what: &str) -> Result<(), Failure> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(Failure::Usage(format!(
            "{what} only supports --output json"
        ))),
    }
}

fn cmd_forms(form: &FormArgs, nmax: u32, prec: u32, out: &mut dyn Write) -> Result<(), Failure> {
    let params = form.params(nmax)?;
    if params.a % 2 == 0 {
        return Err(Failure::Usage(format!(
            "forms needs odd a, got {}",
            params.a
        )));
    }
    for n in (0..=nmax).step_by(2) {
        let f = build_linear_form(&form.params(n)?, prec)?;
        writeln!(
            out,
            "{}",
            serde_json::to_string(&f.to_json()).expect("serializable")
        )?;
    }
    Ok(())
}

fn cmd_verify(
    form: &FormArgs,
    n_max: u32,
    z: &str,
    prec: u32,
    mutate: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    form.params(n_max)?;
    let z = parse_rational(z)?;
    if z <= 1 {
        return Err(Failure::Usage(format!("--z must exceed 1, got {z}")));
    }
    let mut failed = Vec::new();
    for n in 0..=n_max {
        let params = form.params(n)?;
        let mut table = decompose(&params);
        if mutate {
            table = table.with_perturbed_coefficient(1, 0, &ExactRational::one());
        }
        let mut checks: Vec<(&str, bool)> = vec![
            (
                "reconstruction",
                check_reconstruction(&table, RECONSTRUCTION_SEED)?,
            ),
            ("symmetry", check_symmetry(&table)),
            (
                "coefficient-integrality",
                check_coefficient_integrality(&table),
            ),
            ("value-integrality", integer_scaled(&table).is_ok()),
        ];
        if params.odd_route() {
            let one = ExactRational::one();
            let even_zero = (2..=params.a as usize)
                .step_by(2)
                .map(|i| p_poly_eval(&table, i, &one))
                .collect::<Result<Vec<_>, _>>()?
                .iter()
                .all(ExactRational::is_zero);
            checks.push(("even-vanishing", even_zero));
            checks.push(("p1-vanishing", p_poly_eval(&table, 1, &one)?.is_zero()));
            let residual_ok = match build_linear_form(&params, prec) {
                Ok(f) => f.passes(),
                Err(Error::Inconsistent { .. }) => false,
                Err(e) => return Err(e.into()),
            };
            checks.push(("residual", residual_ok));
        }
        let identity = verify_identity_at_z(&params, &z, prec)?;
        checks.push(("identity-at-z", identity.is_below_pow2(prec as i64 - 8)));

        let pass = checks.iter().all(|(_, ok)| *ok);
        let list: Vec<_> = checks
            .iter()
            .map(|(name, ok)| json!({"check": name, "pass": ok}))
            .collect();
        let line = json!({"a": params.a, "r": params.r, "n": n, "checks": list, "pass": pass});
        writeln!(out, "{line}")?;
        failed.extend(
            checks
                .iter()
                .filter(|(_, ok)| !ok)
                .map(|(name, _)| format!("{name} at n={n}")),
        );
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("failed: {}", failed.join(", "))))
    }
}

fn cmd_rates(
    form: &FormArgs,
    nmax: u32,
    prec: u32,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let params = form.params(nmax)?;
    if nmax < 6 {
        return Err(Failure::Usage(format!(
            "--nmax must be at least 6, got {nmax}"
        )));
    }
    let (a, r) = (params.a as u64, params.r as u64);
    let s_b = s_bound(r, a)?.value.unwrap_or(f64::INFINITY);
    let coeff_b = (a as f64).exp() * p_growth_bound(r, a)?;
    let rows = rates_table(params.a, params.r, nmax, prec)?;
    match format {
        Format::Csv => {
            writeln!(out, "n,s_root,coeff_root,s_bound,coeff_bound")?;
            for row in rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    row.n, row.s_root, row.coeff_root, s_b, coeff_b
                )?;
            }
        }
        Format::Json => {
            for row in rows {
                let line = json!({
                    "n": row.n, "s_root": row.s_root, "coeff_root": row.coeff_root,
                    "s_bound": s_b, "coeff_bound": coeff_b,
                });
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(())
}

fn cmd_bound(
    a: Option<u64>,
    r: Option<u64>,
    grid: Option<&str>,
    find_dim: Option<f64>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if let Some(a) = a {
        if a < 3 {
            return Err(Failure::Usage(format!("a must be at least 3, got {a}")));
        }
        let report = match r {
            Some(r) => BoundReport::new(a, r)?,
            None => optimize_r(a),
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&report).expect("serializable")
        )?;
    } else if let Some(spec) = grid {
        let (lo, hi) = spec
            .split_once(':')
            .ok_or_else(|| Failure::Usage(format!("--grid expects LO:HI, got {spec:?}")))?;
        let (lo, hi) = (parse_power_of_ten(lo)?.max(1), parse_power_of_ten(hi)?);
        if lo > hi {
            return Err(Failure::Usage(format!("empty grid {spec:?}")));
        }
        let grid: Vec<u64> = (lo..=hi).map(|k| 10u64.pow(k)).collect();
        for (a, ratio) in asymptotic_check(&grid) {
            let line = json!({"a": a, "ratio": ratio, "report": optimize_r(a)});
            writeln!(out, "{line}")?;
        }
    } else if let Some(target) = find_dim {
        let report = min_a_for_dim(target)?;
        writeln!(
            out,
            "{}",
            serde_json::to_string(&report).expect("serializable")
        )?;
    }
    Ok(())
}

fn cmd_integral(
    form: &FormArgs,
    n: u32,
    z: &str,
    samples: u64,
    seed: u64,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let params = form.params(n)?;
    let z_q = parse_rational(z)?;
    let est = mc_integral(&params, &z_q, samples, seed)?;
    let series = eval_s(&params, &z_q, 64)?.to_f64();
    let z_score = (est.estimate - series) / est.std_error;
    let line = json!({
        "a": params.a, "r": params.r, "n": n, "z": z_q.to_string(),
        "samples": samples, "seed": seed,
        "estimate": est.estimate, "std_error": est.std_error,
        "series": series, "z_score": z_score,
    });
    writeln!(out, "{line}")?;
    if z_score.abs() > 3.0 {
        return Err(Failure::Check(format!("z-score {z_score} exceeds 3")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let default_format = match cli.command {
        Command::Rates { .. } => Format::Csv,
        _ => Format::Json,
    };
    let format = cli.output.unwrap_or(default_format);
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let result = match &cli.command {
        Command::Forms { form, nmax, prec } => {
            require_json(format, "forms")?;
            cmd_forms(form, *nmax, precision(*prec)?, &mut out)
        }
        Command::Verify {
            form,
            n,
            z,
            prec,
            inject_mutation,
        } => {
            require_json(format, "verify")?;
            cmd_verify(form, *n, z, precision(*prec)?, *inject_mutation, &mut out)
        }
        Command::Rates { form, nmax, prec } => {
            cmd_rates(form, *nmax, precision(*prec)?, format, &mut out)
        }
        Command::Bound {
            a,
            r,
            grid,
            find_dim,
        } => {
            require_json(format, "bound")?;
            cmd_bound(*a, *r, grid.as_deref(), *find_dim, &mut out)
        }
        Command::Integral {
            form,
            n,
            z,
            samples,
            seed,
        } => {
            require_json(format, "integral")?;
            cmd_integral(form, *n, z, *samples, *seed, &mut out)
        }
    };
    out.flush()?;
    result
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
