//! `epg`: compute elliptic genera of Witten phases and verify the
//! correspondences between them.
//!
//! Exit codes: 0 pass, 1 failure, 2 bad input, 3 singular sector,
//! 4 inconclusive.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use epg_core::cyclo::parse_rational;
use epg_core::genus::{
    cy_fermat_genus, hybrid_genus, lg_genus, origin_contrib_equivariant, parse_characters,
    weighted_cy_genus, GenusReport, GroupSpec, HybridPhase, HybridSpec, Truncation, WeightSystem,
};
use epg_core::verify::{
    check_jacobi, run_campaign, verify_hybrid, verify_lg_cy, verify_weighted_lg_cy, CampaignItem,
    CheckReport, Status,
};
use epg_core::Error;
use num_rational::BigRational;

#[derive(Parser)]
#[command(
    name = "epg",
    version,
    about = "Exact elliptic genera of Witten phases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// LG orbifold genus of a quasi-homogeneous polynomial.
    Lg {
        #[command(flatten)]
        w: WeightArgs,
        /// Extra group generators as `[a,b,…]`; the default group is ⟨J_W⟩.
        #[arg(long = "group")]
        group: Vec<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Genus of a Calabi-Yau hypersurface, Fermat or weighted.
    Cy {
        #[arg(long, conflicts_with_all = ["weights", "degree"])]
        fermat: Option<u32>,
        #[arg(long, value_delimiter = ',', requires = "degree")]
        weights: Option<Vec<u32>>,
        #[arg(long)]
        degree: Option<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// One phase of the (n, m) hybrid model.
    Hybrid {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum)]
        phase: Phase,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Equivariant contribution of the origin at `u = c·z`.
    Origin {
        #[command(flatten)]
        w: WeightArgs,
        #[arg(long, default_value = "1")]
        c: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Checks; exit 0 iff every check passes.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// LG Fermat orbifold against the smooth CY hypersurface.
    Lgcy {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// LG orbifold against the weighted CY hypersurface.
    Weighted {
        #[command(flatten)]
        w: WeightArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// The three hybrid phases pairwise.
    Hybrid {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Jacobi transformation laws of a genus report read from JSON.
    Jacobi {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// A JSON list of `{check, params}` entries.
    Campaign {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    weights: Vec<u32>,
    #[arg(long)]
    degree: u32,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, default_value = "2")]
    qmax: String,
    #[arg(long, default_value = "4")]
    ywindow: String,
    /// Exponent denominator; must be a multiple of the one the input needs.
    #[arg(long)]
    denom: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Phase {
    H1,
    H2,
    H3,
}

impl From<Phase> for HybridPhase {
    fn from(p: Phase) -> Self {
        match p {
            Phase::H1 => HybridPhase::H1,
            Phase::H2 => HybridPhase::H2,
            Phase::H3 => HybridPhase::H3,
        }
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_SINGULAR: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Invalid(_) | Error::Json(_) | Error::Io(_) => EXIT_PARSE,
        Error::SingularSector { .. } | Error::SingularLeadingTerm(_) => EXIT_SINGULAR,
        _ => EXIT_FAIL,
    }
}

fn nonneg(s: &str, what: &str) -> epg_core::Result<BigRational> {
    let r = parse_rational(s)?;
    if r < BigRational::from_integer(0.into()) {
        return Err(Error::Parse(format!("{what} must be >= 0, got {s}")));
    }
    Ok(r)
}

impl OutArgs {
    fn truncation(&self) -> epg_core::Result<Truncation> {
        let t = Truncation::new(
            nonneg(&self.qmax, "qmax")?,
            nonneg(&self.ywindow, "ywindow")?,
        );
        Ok(match self.denom {
            Some(d) => t.with_denom(d),
            None => t,
        })
    }

    /// Integer region for the verification commands.
    fn ints(&self) -> epg_core::Result<(i64, i64)> {
        let (q, w) = (
            nonneg(&self.qmax, "qmax")?,
            nonneg(&self.ywindow, "ywindow")?,
        );
        match (q.is_integer(), w.is_integer()) {
            (true, true) => {
                let int = |r: BigRational| {
                    i64::try_from(r.to_integer())
                        .map_err(|_| Error::Parse("region too large".into()))
                };
                Ok((int(q)?, int(w)?))
            }
            _ => Err(Error::Parse(
                "verification regions take integer qmax and ywindow".into(),
            )),
        }
    }
}

fn emit_report(r: &GenusReport, format: Format) -> epg_core::Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&r.to_json()?)?),
        Format::Text => {
            println!("formula: {}", r.formula);
            println!("params: {}", r.params);
            println!("dimension: {}", r.dimension);
            println!("cy_flag: {}", r.cy_flag);
            println!("series: {}", r.series);
        }
    }
    Ok(())
}

fn emit_checks(reports: &[CheckReport], format: Format) -> epg_core::Result<u8> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(reports)?),
        Format::Text => {
            for r in reports {
                println!("{r}");
            }
        }
    }
    Ok(if reports.iter().any(|r| r.status == Status::Fail) {
        EXIT_FAIL
    } else if reports.iter().any(|r| r.status == Status::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        0
    })
}

fn run(cli: Cli) -> epg_core::Result<u8> {
    match cli.command {
        Command::Lg { w, group, out } => {
            let ws = WeightSystem::new(w.weights, w.degree)?;
            let h = if group.is_empty() {
                GroupSpec::grading(&ws)
            } else {
                let mut gens = vec![ws.grading()];
                for g in &group {
                    gens.push(parse_characters(g)?);
                }
                GroupSpec::new(ws.n(), gens)?
            };
            emit_report(&lg_genus(&ws, &h, &out.truncation()?)?, out.format)?;
        }
        Command::Cy {
            fermat,
            weights,
            degree,
            out,
        } => {
            let t = out.truncation()?;
            let r = match (fermat, weights, degree) {
                (Some(n), None, None) => cy_fermat_genus(n, &t)?,
                (None, Some(w), Some(d)) => weighted_cy_genus(&WeightSystem::new(w, d)?, &t)?,
                _ => {
                    return Err(Error::Parse(
                        "give --fermat N or --weights and --degree".into(),
                    ))
                }
            };
            emit_report(&r, out.format)?;
        }
        Command::Hybrid { n, m, phase, out } => {
            emit_report(
                &hybrid_genus(HybridSpec { n, m }, phase.into(), &out.truncation()?)?,
                out.format,
            )?;
        }
        Command::Origin { w, c, out } => {
            let ws = WeightSystem::new(w.weights, w.degree)?;
            emit_report(
                &origin_contrib_equivariant(&ws, &parse_rational(&c)?, &out.truncation()?)?,
                out.format,
            )?;
        }
        Command::Verify { check } => return verify(check),
    }
    Ok(0)
}

fn verify(check: VerifyCommand) -> epg_core::Result<u8> {
    match check {
        VerifyCommand::Lgcy { n, out } => {
            let (q, w) = out.ints()?;
            emit_checks(&[verify_lg_cy(n, q, w)?], out.format)
        }
        VerifyCommand::Weighted { w, out } => {
            let (q, y) = out.ints()?;
            emit_checks(
                &[verify_weighted_lg_cy(
                    &WeightSystem::new(w.weights, w.degree)?,
                    q,
                    y,
                )?],
                out.format,
            )
        }
        VerifyCommand::Hybrid { n, m, out } => {
            let (q, w) = out.ints()?;
            emit_checks(&[verify_hybrid(HybridSpec { n, m }, q, w)?], out.format)
        }
        VerifyCommand::Jacobi { input, format } => {
            let text = std::fs::read_to_string(&input)?;
            let r = GenusReport::from_json(&serde_json::from_str(&text)?)?;
            emit_checks(&[check_jacobi(&r)], format)
        }
        VerifyCommand::Campaign { file, format } => {
            let text = std::fs::read_to_string(&file)?;
            let items: Vec<CampaignItem> = serde_json::from_str(&text)?;
            emit_checks(&run_campaign(&items), format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("EPG_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("epg: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
