use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use repgrowth::checks::run_checks;
use repgrowth::constructor::DiagonalPlan;
use repgrowth::growth::{truncated_zeta, FactorSpec, Flag};
use repgrowth::rational::parse_rational;
use repgrowth::{
    build_diagonal, build_fixed_type, empirical_slope, exact_abscissa, prg_verdict, ConcreteGroup, Error, Family,
    GroupSpec, LieType, Rational, Result,
};

#[derive(Parser)]
#[command(name = "repgrowth", version, about = "Representation growth of structured profinite groups")]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Truncated zeta function of a spec.
    Zeta {
        #[command(flatten)]
        input: Input,
        /// Dimension cutoff.
        #[arg(long = "N", alias = "n")]
        n: BigUint,
        /// Number of members of each infinite stratum to expand.
        #[arg(long = "J", alias = "j", default_value_t = u64::MAX)]
        j: u64,
    },
    /// Exact abscissa, or empirical slopes with --empirical.
    Abscissa {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        empirical: bool,
        /// Cutoff for the empirical slopes.
        #[arg(long = "N", alias = "n", default_value = "1000")]
        n: BigUint,
    },
    /// Build a spec with prescribed abscissa.
    Construct {
        #[command(subcommand)]
        mode: Construct,
    },
    /// Polynomial representation growth verdict.
    Prg {
        #[command(flatten)]
        input: Input,
    },
    /// Generating-tuple and automorphism counts of a catalog group.
    Gens {
        /// Catalog name: C2, C3, A5, A6, PSL2_5, PSL2_7, PSL2_9, SL2_5.
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 3)]
        max_d: usize,
        /// Also report d(G^k).
        #[arg(long)]
        k: Option<BigUint>,
    },
    /// Run the invariant suite.
    Check,
}

#[derive(Subcommand)]
enum Construct {
    /// Fixed Lie type over the powers of one field.
    Fixed {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        family: String,
        #[arg(long)]
        rank: u32,
        #[arg(long)]
        twisted: bool,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Growing ranks with targets rho - gap/m.
    Diagonal {
        #[arg(long)]
        rho: String,
        #[arg(long, default_value = "1")]
        gap: String,
        #[arg(long, default_value = "A")]
        family: String,
        #[arg(long, default_value_t = 1)]
        rank_offset: u32,
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        stages: u32,
        #[arg(long, default_value = "1000000000")]
        budget: BigUint,
    },
}

#[derive(Args)]
struct Input {
    /// Spec file path, or inline JSON.
    #[arg(long, conflicts_with_all = ["example", "group"])]
    spec: Option<String>,
    /// Built-in family: sl2-primes.
    #[arg(long, conflicts_with = "group")]
    example: Option<String>,
    #[arg(long, default_value_t = 3)]
    d: u32,
    /// A single finite factor: SL2 or PSL2.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    q: Option<u64>,
}

impl Input {
    fn load(&self) -> Result<GroupSpec> {
        if let Some(s) = &self.spec {
            let text = if s.trim_start().starts_with('{') {
                s.clone()
            } else {
                std::fs::read_to_string(s)?
            };
            return GroupSpec::from_json_str(&text);
        }
        if let Some(ex) = &self.example {
            return match ex.as_str() {
                "sl2-primes" => GroupSpec::sl2_primes(self.d),
                other => Err(Error::parse("", format!("unknown example {other:?}"))),
            };
        }
        if let Some(g) = &self.group {
            let flag = match g.to_ascii_uppercase().as_str() {
                "SL2" => Flag::Cover,
                "PSL2" => Flag::Simple,
                other => return Err(Error::parse("", format!("unknown group {other:?}, expected SL2 or PSL2"))),
            };
            let q = self.q.ok_or_else(|| Error::parse("", "--group needs --q"))?;
            return GroupSpec::finite(vec![FactorSpec::a1(q, flag)]);
        }
        Err(Error::parse("", "give one of --spec, --example or --group"))
    }
}

fn parse_family(s: &str) -> Result<Family> {
    Family::ALL
        .into_iter()
        .find(|f| f.as_str().eq_ignore_ascii_case(s))
        .ok_or_else(|| Error::parse("", format!("unknown family {s:?}")))
}

fn rho_arg(s: &str) -> Result<Rational> {
    parse_rational(s)
}

enum Output {
    Json(Value),
    Text(String),
}

fn csv_unsupported(format: Format, what: &str) -> Result<()> {
    if format == Format::Csv {
        return Err(Error::precondition(format!("{what} has no CSV form")));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(Output, bool)> {
    let format = cli.format;
    let out = match &cli.command {
        Command::Zeta { input, n, j } => {
            let tz = truncated_zeta(&input.load()?, n, *j)?;
            for w in &tz.warnings {
                eprintln!("warning: {w}");
            }
            match format {
                Format::Csv => Output::Text(tz.series.to_csv()),
                Format::Json => Output::Json(json!({
                    "series": tz.series.to_json(),
                    "warnings": tz.warnings,
                })),
            }
        }
        Command::Abscissa { input, empirical, n } => {
            let spec = input.load()?;
            if *empirical {
                let r = empirical_slope(&spec, n)?;
                for w in &r.warnings {
                    eprintln!("warning: {w}");
                }
                match format {
                    Format::Csv => Output::Text(r.to_csv()),
                    Format::Json => Output::Json(json!({
                        "exact": exact_abscissa(&spec).to_json(),
                        "empirical": r.to_json(),
                    })),
                }
            } else {
                csv_unsupported(format, "the exact abscissa")?;
                Output::Json(exact_abscissa(&spec).to_json())
            }
        }
        Command::Construct { mode } => {
            csv_unsupported(format, "a construction")?;
            match mode {
                Construct::Fixed {
                    rho,
                    family,
                    rank,
                    twisted,
                    p,
                    q,
                } => {
                    let t = LieType::new(parse_family(family)?, *rank, *twisted)?;
                    let spec = build_fixed_type(&rho_arg(rho)?, &t, *p, *q)?;
                    Output::Json(spec.to_json())
                }
                Construct::Diagonal {
                    rho,
                    gap,
                    family,
                    rank_offset,
                    p,
                    stages,
                    budget,
                } => {
                    let plan = DiagonalPlan::harmonic(
                        rho_arg(rho)?,
                        rho_arg(gap)?,
                        parse_family(family)?,
                        *rank_offset,
                        *p,
                        *stages,
                        budget.clone(),
                    )?;
                    let (spec, cert) = build_diagonal(&plan)?;
                    Output::Json(json!({
                        "spec": spec.to_json(),
                        "certificate": cert.to_json(),
                        "abscissa": exact_abscissa(&spec).abscissa.to_string(),
                    }))
                }
            }
        }
        Command::Prg { input } => {
            csv_unsupported(format, "a verdict")?;
            Output::Json(prg_verdict(&input.load()?).to_json())
        }
        Command::Gens { group, max_d, k } => {
            csv_unsupported(format, "generator counts")?;
            let g = ConcreteGroup::catalog(group)?;
            let mut v = g.counts_json(*max_d)?;
            if let Some(k) = k {
                let r = g.min_generators_power(k)?;
                v["power"] = json!({
                    "k": k.to_string(),
                    "d": r.d,
                    "phi_d": r.phi.to_string(),
                    "aut": r.aut.to_string(),
                });
            }
            Output::Json(v)
        }
        Command::Check => {
            let suite = run_checks();
            let pass = suite.pass();
            let out = match format {
                Format::Csv => Output::Text(suite.summary()),
                Format::Json => Output::Json(suite.to_json()),
            };
            return Ok((out, pass));
        }
    };
    Ok((out, true))
}

fn emit(cli: &Cli, out: Output) -> Result<()> {
    let text = match out {
        Output::Json(v) => {
            let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
            s.push('\n');
            s
        }
        Output::Text(s) => s,
    };
    match &cli.output {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("REPGROWTH_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // fails only if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(out, pass)| emit(&cli, out).map(|_| pass));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(5),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

