//! The `align` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use log::{info, warn};

use crate::error::AlignError;
use crate::io::{parse_fasta, parse_matrix, write_output, InputError, OutputFormat};
use crate::model::{
    validate_scheme, Alphabet, AlphabetKind, ScoringScheme, Sequence, Substitution,
};
use crate::pipeline::{Aligner, AlignerConfig};
use crate::reconstruct::DEFAULT_LEAF_LIMIT;
use crate::wavefront::DEFAULT_BLOCK_DIM;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlphabetChoice {
    Dna,
    Protein,
}

#[derive(Debug, Parser)]
#[command(
    name = "align",
    version,
    about = "Optimal local alignment of two long sequences in linear memory",
    after_help = "Only the first record of each FASTA file is aligned."
)]
struct Args {
    /// FASTA file with the target (first) sequence
    target: PathBuf,
    /// FASTA file with the query (second) sequence
    query: PathBuf,
    /// Score for identical residues [default: 1]
    #[arg(long = "match", value_name = "INT", allow_negative_numbers = true)]
    match_score: Option<i32>,
    /// Score for differing residues [default: -3]
    #[arg(long, value_name = "INT", allow_negative_numbers = true)]
    mismatch: Option<i32>,
    /// NCBI-style substitution matrix file
    #[arg(long, value_name = "FILE", conflicts_with_all = ["match_score", "mismatch"])]
    matrix: Option<PathBuf>,
    /// Penalty charged once per gap
    #[arg(long, default_value_t = 5, allow_negative_numbers = true)]
    gap_open: i32,
    /// Penalty charged per gap residue
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    gap_extend: i32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    workers: u32,
    #[arg(long, default_value_t = DEFAULT_BLOCK_DIM as u32, value_parser = clap::value_parser!(u32).range(1..))]
    block_rows: u32,
    #[arg(long, default_value_t = DEFAULT_BLOCK_DIM as u32, value_parser = clap::value_parser!(u32).range(1..))]
    block_cols: u32,
    /// Largest subproblem area solved directly during reconstruction
    #[arg(long, default_value_t = DEFAULT_LEAF_LIMIT as u64, value_parser = clap::value_parser!(u64).range(1..))]
    leaf_limit: u64,
    /// Evaluate every block of the scoring pass
    #[arg(long)]
    no_prune: bool,
    /// Search the whole matrix instead of a diagonal band
    #[arg(long)]
    no_band: bool,
    /// 2 scores the upper and lower halves of the matrix concurrently
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    split: u8,
    #[arg(long, value_enum, default_value_t = OutputFormat::Stat)]
    out: OutputFormat,
    /// Write results here instead of standard output
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Reject the DNA wildcard N
    #[arg(long)]
    strict: bool,
    #[arg(long, value_enum, default_value_t = AlphabetChoice::Dna)]
    alphabet: AlphabetChoice,
    /// More diagnostics on stderr; repeat for more
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

/// Where substitution scores come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeSource {
    MatchMismatch { match_score: i32, mismatch: i32 },
    MatrixFile(PathBuf),
}

/// A fully parsed invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub target: PathBuf,
    pub query: PathBuf,
    pub scheme: SchemeSource,
    pub gap_open: i32,
    pub gap_extend: i32,
    pub alphabet: AlphabetChoice,
    pub strict: bool,
    pub aligner: AlignerConfig,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub verbosity: u8,
}

impl From<Args> for RunConfig {
    fn from(args: Args) -> Self {
        let scheme = match args.matrix {
            Some(path) => SchemeSource::MatrixFile(path),
            None => SchemeSource::MatchMismatch {
                match_score: args.match_score.unwrap_or(1),
                mismatch: args.mismatch.unwrap_or(-3),
            },
        };
        Self {
            target: args.target,
            query: args.query,
            scheme,
            gap_open: args.gap_open,
            gap_extend: args.gap_extend,
            alphabet: args.alphabet,
            strict: args.strict,
            aligner: AlignerConfig {
                workers: args.workers as usize,
                block_rows: args.block_rows as usize,
                block_cols: args.block_cols as usize,
                prune: !args.no_prune,
                band: !args.no_band,
                leaf_limit: args.leaf_limit as usize,
                split: args.split as usize,
                ..AlignerConfig::default()
            },
            format: args.out,
            output: args.output,
            verbosity: args.verbose,
        }
    }
}

/// A failed run, classified by exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Input(_) => EXIT_INPUT,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<AlignError> for Failure {
    fn from(e: AlignError) -> Self {
        match e {
            AlignError::InvalidParameter(_) | AlignError::NonPositiveMaxScore(_) | AlignError::UnsupportedSplit(_) => {
                Failure::Usage(e.to_string())
            }
            AlignError::IllegalResidue { .. } | AlignError::IncompleteMatrix(..) => Failure::Input(e.to_string()),
            other => Failure::Internal(format!(
                "internal error: {other}\nthis indicates a bug; please file a report with the inputs and flags used"
            )),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn input(path: &Path, e: InputError) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn first_record(path: &Path, alphabet: &Alphabet) -> Result<Sequence, Failure> {
    let mut records = parse_fasta(&read(path)?, alphabet).map_err(|e| input(path, e))?;
    if records.len() > 1 {
        warn!(
            "{}: {} records found, aligning only the first",
            path.display(),
            records.len()
        );
    }
    Ok(records.swap_remove(0))
}

fn build_scheme(config: &RunConfig) -> Result<ScoringScheme, Failure> {
    let kind = match config.alphabet {
        AlphabetChoice::Dna => AlphabetKind::Nucleotide,
        AlphabetChoice::Protein => AlphabetKind::Protein,
    };
    let (substitution, alphabet) = match &config.scheme {
        SchemeSource::MatrixFile(path) => {
            let matrix = parse_matrix(&read(path)?).map_err(|e| input(path, e))?;
            let alphabet = Alphabet::custom(kind, matrix.symbols())?;
            (Substitution::Matrix(matrix), alphabet)
        }
        &SchemeSource::MatchMismatch {
            match_score,
            mismatch,
        } => {
            let alphabet = match kind {
                AlphabetKind::Nucleotide => Alphabet::dna(!config.strict),
                AlphabetKind::Protein => Alphabet::protein(),
            };
            (
                Substitution::MatchMismatch {
                    match_score,
                    mismatch,
                },
                alphabet,
            )
        }
    };
    Ok(validate_scheme(
        &substitution,
        &alphabet,
        config.gap_open,
        config.gap_extend,
    )?)
}

/// Runs a parsed configuration, returning the rendered result.
fn execute(config: &RunConfig) -> Result<String, Failure> {
    let scheme = build_scheme(config)?;
    let target = first_record(&config.target, scheme.alphabet())?;
    let query = first_record(&config.query, scheme.alphabet())?;
    info!(
        "target {} ({} residues), query {} ({} residues)",
        target.id,
        target.len(),
        query.id,
        query.len()
    );
    let aligner = Aligner::new(scheme, config.aligner)?;
    let result = aligner.align(&target, &query)?;
    let report = &result.report;
    if let Some(pass) = &report.score_pass {
        info!(
            "scoring pass pruned {} of {} blocks",
            pass.pruned, pass.blocks
        );
    }
    if let Some(split) = &report.split {
        info!(
            "split stage resolved the {:?} case at row {}",
            split.case, split.split_row
        );
    }
    info!(
        "reconstruction: {} splits, {} leaves, depth {}",
        report.reconstruct.splits, report.reconstruct.leaves, report.reconstruct.max_depth
    );
    Ok(write_output(
        &result.summary,
        &result.path,
        config.format,
        &target,
        &query,
    ))
}

fn init_logging(verbosity: u8) {
    let level = match verbosity {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let env = env_logger::Env::default().default_filter_or(level);
    // a second run in the same process keeps the first logger
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

/// Runs the command line with explicit output streams and returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    let config = RunConfig::from(args);
    init_logging(config.verbosity);

    let written = execute(&config).and_then(|text| {
        let result = match &config.output {
            Some(path) => {
                fs::write(path, text.as_bytes()).map_err(|e| (path.display().to_string(), e))
            }
            None => stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| ("standard output".to_string(), e)),
        };
        result.map_err(|(target, e)| Failure::Internal(format!("cannot write {target}: {e}")))
    });
    match written {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let (Failure::Usage(msg) | Failure::Input(msg) | Failure::Internal(msg)) = &failure;
            let _ = writeln!(stderr, "error: {msg}");
            failure.code()
        }
    }
}

/// Runs the command line on the process's standard streams.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(extra: &[&str]) -> Result<RunConfig, clap::Error> {
        let argv = ["align", "t.fa", "q.fa"].iter().chain(extra);
        Args::try_parse_from(argv).map(RunConfig::from)
    }

    #[test]
    fn defaults() {
        let c = parse(&[]).unwrap();
        assert_eq!(
            c.scheme,
            SchemeSource::MatchMismatch {
                match_score: 1,
                mismatch: -3
            }
        );
        assert_eq!((c.gap_open, c.gap_extend), (5, 2));
        assert_eq!(c.aligner, AlignerConfig::default());
        assert_eq!(c.format, OutputFormat::Stat);
        assert_eq!(c.alphabet, AlphabetChoice::Dna);
    }

    #[test]
    fn flags() {
        let c = parse(&[
            "--match",
            "2",
            "--mismatch",
            "-4",
            "--workers",
            "8",
            "--no-prune",
            "--no-band",
            "--split",
            "2",
            "--leaf-limit",
            "256",
            "--block-rows",
            "64",
            "--block-cols",
            "32",
            "--out",
            "pair",
        ])
        .unwrap();
        assert_eq!(
            c.scheme,
            SchemeSource::MatchMismatch {
                match_score: 2,
                mismatch: -4
            }
        );
        let a = c.aligner;
        assert_eq!(
            (a.workers, a.split, a.leaf_limit, a.block_rows, a.block_cols),
            (8, 2, 256, 64, 32)
        );
        assert!(!a.prune && !a.band);
        assert_eq!(c.format, OutputFormat::Pair);
    }

    #[test]
    fn usage_errors() {
        for bad in [
            &["--split", "3"][..],
            &["--workers", "0"],
            &["--matrix", "m.txt", "--match", "2"],
            &["--out", "xml"],
            &["--leaf-limit", "0"],
        ] {
            assert!(parse(bad).is_err(), "{bad:?}");
        }
        assert!(Args::try_parse_from(["align", "t.fa"]).is_err());
    }

    #[test]
    fn error_classes() {
        assert_eq!(
            Failure::from(AlignError::UnsupportedSplit(3)).code(),
            EXIT_USAGE
        );
        assert_eq!(
            Failure::from(AlignError::NonPositiveMaxScore(0)).code(),
            EXIT_USAGE
        );
        assert_eq!(
            Failure::from(AlignError::IncompleteMatrix('A', 'N')).code(),
            EXIT_INPUT
        );
        let bug = Failure::from(AlignError::ScoreMismatch {
            expected: 1,
            found: 2,
            context: "test",
        });
        assert_eq!(bug.code(), EXIT_INTERNAL);
        let Failure::Internal(msg) = bug else {
            unreachable!()
        };
        assert!(msg.contains("report"));
    }
}
