//! Argument parsing and subcommand dispatch.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O or format error, 3 not a member, 4 certification
//! or bound failure. Every failure also writes one JSON object on one line to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ridgeless_core::generalization::{
    gradient_estimate_failures, random_design_experiment, verify_lip_domination,
    verify_localized_bounds, verify_sup_error, GroundTruth, GRID_PER_GAP,
};
use ridgeless_core::oracle::{certify_with, GridOptions, OracleError};
use ridgeless_core::{
    characterize, make_dataset_from, network::network_to_pl, network::pl_to_network, sample_member,
    Characterization, Dataset, Design, SampleKnobs, TangentRule, DEFAULT_MEMBERSHIP_TOL,
};
use serde::Serialize;

use crate::io::{self, FormatError};
use crate::plot;
use crate::report::{self, g17};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FORMAT: i32 = 2;
pub const EXIT_NON_MEMBER: i32 = 3;
pub const EXIT_CERTIFICATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ridgeless", version, about = "Minimal-norm ReLU interpolants of 1D data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Rule {
    Uniform,
    Chord,
    Support,
}

impl From<Rule> for TangentRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Uniform => TangentRule::Uniform,
            Rule::Chord => TangentRule::Chord,
            Rule::Support => TangentRule::SupportLines,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Interval verdicts, free blocks, inflection set and minimal TV.
    Characterize {
        data: PathBuf,
        /// Also write the characterization as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The chord interpolant f_D as piecewise-linear JSON.
    Fd {
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Membership test; exit 3 if the function is not a member.
    Check {
        data: PathBuf,
        function: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MEMBERSHIP_TOL)]
        tol: f64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Draw members of the family.
    Sample {
        data: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Rule::Uniform)]
        rule: Rule,
        /// Write member-NNN.json files here instead of printing JSON lines.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Total variation of the derivative.
    Tv { function: PathBuf },
    /// Balanced network realizing the function; prints its cost.
    ToNetwork {
        function: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact piecewise-linear function of a network.
    FromNetwork {
        network: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the minimal TV with an independent grid LP; exit 4 on mismatch.
    Certify {
        data: PathBuf,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 200_000)]
        max_iters: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Generalization bounds for members fitted to samples of a ground truth; exit 4 if
    /// a bound fails.
    Bound {
        /// Dataset; omit and pass --m to sample the ground truth on x_i = i/m.
        data: Option<PathBuf>,
        #[arg(long)]
        fstar: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 100)]
        members: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also report the iid-design experiment (no pass/fail).
        #[arg(long)]
        random_design: bool,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Static SVG of data, f_D, envelopes and sampled members.
    Plot {
        data: PathBuf,
        #[arg(long, default_value_t = 3)]
        members: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Format(FormatError),
    NonMember(Vec<&'static str>),
    Certification(String),
    Bound,
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Self::Format(e)
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Self::Certification(e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
    exit: i32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    violations: Vec<&'static str>,
}

impl Failure {
    fn record(self) -> (i32, String) {
        let (error, message, exit, violations) = match self {
            Self::Usage(m) => ("usage", m, EXIT_USAGE, vec![]),
            Self::Format(e @ FormatError::Io { .. }) => ("io", e.to_string(), EXIT_FORMAT, vec![]),
            Self::Format(e) => ("format", e.to_string(), EXIT_FORMAT, vec![]),
            Self::NonMember(tags) => (
                "non-member",
                "function is not a minimal-TV interpolant".into(),
                EXIT_NON_MEMBER,
                tags,
            ),
            Self::Certification(m) => ("certification", m, EXIT_CERTIFICATION, vec![]),
            Self::Bound => (
                "bound",
                "a generalization bound failed".into(),
                EXIT_CERTIFICATION,
                vec![],
            ),
        };
        let rec = ErrorRecord {
            error,
            message: message.replace('\n', " "),
            exit,
            violations,
        };
        (exit, serde_json::to_string(&rec).expect("record serializes"))
    }
}

/// Seed of the `k`-th draw for user seed `seed` (splitmix64 of the pair).
pub fn member_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed
        .wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => io::write_file(p, text)?,
        None => out.write_all(text.as_bytes()).map_err(stdout_error)?,
    }
    Ok(())
}

fn stdout_error(source: std::io::Error) -> FormatError {
    FormatError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn write_json<T: Serialize>(path: Option<&PathBuf>, value: &T) -> Result<(), Failure> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
        io::write_file(p, &text)?;
    }
    Ok(())
}

fn members(ch: &Characterization, n: usize, seed: u64, rule: TangentRule) -> Vec<ridgeless_core::PiecewiseLinear> {
    (0..n as u64)
        .map(|k| sample_member(ch, member_seed(seed, k), SampleKnobs { rule }))
        .collect()
}

/// Runs the tool on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("").trim_start_matches("error: ");
            return fail(err, Failure::Usage(first.to_string()));
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => fail(err, f),
    }
}

fn fail(err: &mut dyn Write, f: Failure) -> i32 {
    let (code, line) = f.record();
    let _ = writeln!(err, "{line}");
    code
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Characterize { data, json } => {
            let ch = characterize(&io::load_dataset(&data)?);
            write_json(json.as_ref(), &report::CharacterizationJson::from(&ch))?;
            emit(out, None, &report::characterization_text(&ch))
        }
        Command::Fd { data, out: path } => {
            let ch = characterize(&io::load_dataset(&data)?);
            emit(out, path.as_deref(), &(io::pl_to_json(&ch.f_d) + "\n"))
        }
        Command::Check {
            data,
            function,
            tol,
            json,
        } => {
            if !(tol > 0.0) {
                return Err(Failure::Usage("--tol must be positive".into()));
            }
            let ch = characterize(&io::load_dataset(&data)?);
            let f = io::load_pl(&function)?;
            let r = ch.check(&f, tol);
            write_json(json.as_ref(), &report::MembershipJson::from(&r))?;
            emit(out, None, &report::membership_text(&r))?;
            if r.is_member {
                Ok(())
            } else {
                let mut tags: Vec<&'static str> = r.violations.iter().map(|v| v.tag.as_str()).collect();
                tags.dedup();
                Err(Failure::NonMember(tags))
            }
        }
        Command::Sample {
            data,
            n,
            seed,
            rule,
            out_dir,
        } => {
            let ch = characterize(&io::load_dataset(&data)?);
            let fs = members(&ch, n, seed, rule.into());
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(|source| FormatError::Io {
                        path: dir.clone(),
                        source,
                    })?;
                    for (k, f) in fs.iter().enumerate() {
                        let p = dir.join(format!("member-{k:03}.json"));
                        io::write_file(&p, &(io::pl_to_json(f) + "\n"))?;
                        writeln!(out, "{}", p.display()).map_err(stdout_error)?;
                    }
                    Ok(())
                }
                None => {
                    let text: String = fs.iter().map(|f| io::pl_to_json(f) + "\n").collect();
                    emit(out, None, &text)
                }
            }
        }
        Command::Tv { function } => {
            let f = io::load_pl(&function)?;
            emit(out, None, &format!("{}\n", g17(f.tv_of_derivative())))
        }
        Command::ToNetwork {
            function,
            out: path,
        } => {
            let f = io::load_pl(&function)?;
            let net = pl_to_network(&f);
            let json = io::network_to_json(&net) + "\n";
            match path {
                Some(p) => {
                    io::write_file(&p, &json)?;
                    emit(out, None, &format!("cost {}\nwidth {}\n", g17(net.cost()), net.width()))
                }
                None => emit(out, None, &json),
            }
        }
        Command::FromNetwork {
            network,
            out: path,
        } => {
            let net = io::load_network(&network)?;
            emit(out, path.as_deref(), &(io::pl_to_json(&network_to_pl(&net)) + "\n"))
        }
        Command::Certify {
            data,
            grid,
            tol,
            max_iters,
            json,
        } => {
            if grid == 0 || !(tol > 0.0) {
                return Err(Failure::Usage("--grid must be >= 1 and --tol positive".into()));
            }
            let d = io::load_dataset(&data)?;
            let ch = characterize(&d);
            let opts = GridOptions {
                points_per_gap: grid,
                max_iters,
                ..GridOptions::default()
            };
            let r = certify_with(&d, &ch, opts, tol)?;
            write_json(json.as_ref(), &report::CertificateJson::from(&r))?;
            emit(out, None, &report::certificate_text(&r))?;
            if r.pass {
                Ok(())
            } else {
                Err(Failure::Certification(format!(
                    "grid minimum {} differs from {} by more than {}",
                    g17(r.achieved),
                    g17(r.target),
                    g17(tol * r.target.max(1.0))
                )))
            }
        }
        Command::Bound {
            data,
            fstar,
            m,
            members: k,
            seed,
            random_design,
            json,
        } => {
            let gt = GroundTruth::new(io::load_pl(&fstar)?);
            let d = match (data, m) {
                (Some(_), Some(_)) => {
                    return Err(Failure::Usage("pass either a dataset or --m, not both".into()))
                }
                (None, None) => return Err(Failure::Usage("a dataset or --m is required".into())),
                (Some(p), None) => io::load_dataset(&p)?,
                (None, Some(m)) if m < 2 => return Err(Failure::Usage("--m must be >= 2".into())),
                (None, Some(m)) => make_dataset_from(&gt, &Design::Uniform(m)).map_err(FormatError::from)?,
            };
            let report = bounds(&gt, &d, k, seed, random_design)?;
            write_json(json.as_ref(), &report)?;
            emit(out, None, &report::bounds_text(&report))?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Bound)
            }
        }
        Command::Plot {
            data,
            members: k,
            seed,
            out: path,
        } => {
            let ch = characterize(&io::load_dataset(&data)?);
            let fs = members(&ch, k, seed, TangentRule::Uniform);
            emit(out, path.as_deref(), &plot::render(&ch, &fs))
        }
    }
}

fn bounds(
    gt: &GroundTruth,
    d: &Dataset,
    k: usize,
    seed: u64,
    random_design: bool,
) -> Result<report::BoundsJson, Failure> {
    let ch = characterize(d);
    let fs = members(&ch, k, seed, TangentRule::Uniform);
    let data_mismatch = d
        .points()
        .iter()
        .map(|&(x, y)| (y - gt.f_star.evaluate(x)).abs())
        .fold(0.0, f64::max);
    let lip = verify_lip_domination(d, &fs, gt.lipschitz);
    let loc = verify_localized_bounds(d, &fs);
    let (sup_error, sup_error_skipped) = match verify_sup_error(gt, d, &fs, GRID_PER_GAP) {
        Ok(r) => (Some(report::SupJson::from(&r)), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let grad = fs
        .iter()
        .map(|f| gradient_estimate_failures(&ch, f, DEFAULT_MEMBERSHIP_TOL).len())
        .sum();
    let random_design = if random_design {
        let r = random_design_experiment(gt, d.len(), k.max(1), seed).map_err(FormatError::from)?;
        Some(report::RandomDesignJson::from(&r))
    } else {
        None
    };
    let pass = lip.pass
        && loc.pass
        && grad == 0
        && sup_error.as_ref().is_none_or(|s| s.pass && s.localized_pass);
    Ok(report::BoundsJson {
        members: k,
        data_mismatch,
        lipschitz: (&lip).into(),
        sup_error,
        sup_error_skipped,
        localized: (&loc).into(),
        gradient_estimate_failures: grad,
        random_design,
        pass,
    })
}
