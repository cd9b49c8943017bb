use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use flipred::algebra::{apply, strongly_equiv_by_commutativity, SeqError};
use flipred::bench::{grid, run_bench};
use flipred::io::{parse_flipseq, parse_ltri, triangulation_from_off, write_flipseq, write_ltri, IoError};
use flipred::ngon::{canonical_certificate, flip_distance_bfs, NgonError, UnlabeledNgon};
use flipred::reducer::{reduce_with, ReduceError, ReduceOptions};
use flipred::seqgen::{random_instance, random_sequence, GenError, GenSpec};
use flipred::{FlipSequence, Setting, Triangulation};

#[derive(Parser)]
#[command(name = "flipred", version, about = "Reduce edge-flip sequences on labeled triangulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a flip sequence and write the shorter sequence.
    Reduce {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        seq: PathBuf,
        /// Output sequence; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report file; stderr when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Skip the before/after weak-equality self-check.
        #[arg(long)]
        no_verify: bool,
    },
    /// Generate a random triangulation.
    GenTri {
        #[arg(long, value_parser = parse_setting)]
        setting: Setting,
        /// Total edge count, boundary included.
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random valid flip sequence on a triangulation.
    GenSeq {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 1.0)]
        redundancy: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two sequences on the same triangulation.
    Verify {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        seq_a: PathBuf,
        #[arg(long)]
        seq_b: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Weak)]
        mode: Mode,
    },
    /// Exact flip distance between two convex polygon triangulations.
    Distance {
        #[arg(long)]
        tri_a: PathBuf,
        #[arg(long)]
        tri_b: PathBuf,
    },
    /// Certificate of a sequence's weak-equivalence class on a convex polygon.
    Canon {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 0)]
        apex: u32,
    },
    /// Generate, reduce and time sequences over a parameter grid.
    Bench {
        #[arg(long, value_delimiter = ',', value_parser = parse_setting, default_value = "convex")]
        settings: Vec<Setting>,
        /// Edge counts; chosen from length and redundancy when omitted.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "500,1000,2000")]
        lengths: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1.1,2,10")]
        redundancies: Vec<f64>,
        /// Seeds per cell.
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a table instead of line records.
        #[arg(long)]
        table: bool,
    },
    /// Convert a triangle-only OFF mesh to .ltri.
    FromOff {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_setting, default_value = "geometric")]
        setting: Setting,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Weak,
    Strong,
}

fn parse_setting(s: &str) -> Result<Setting, String> {
    s.parse()
}

/// Failure classes mapped to exit codes 1, 2 and 3.
enum Failure {
    Input(String),
    Sequence(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Sequence(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Sequence(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<SeqError> for Failure {
    fn from(e: SeqError) -> Self {
        Failure::Sequence(e.to_string())
    }
}

impl From<ReduceError> for Failure {
    fn from(e: ReduceError) -> Self {
        match e {
            ReduceError::Invalid(e) => e.into(),
            ReduceError::Internal(m) => Failure::Internal(m),
        }
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<NgonError> for Failure {
    fn from(e: NgonError) -> Self {
        match e {
            NgonError::Seq(e) => e.into(),
            NgonError::Reduce(e) => e.into(),
            NgonError::Finding(m) => Failure::Internal(m),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: IoError) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn load_tri(path: &Path) -> Result<Triangulation, Failure> {
    parse_ltri(&read(path)?).map_err(|e| with_path(path, e))
}

fn load_seq(path: &Path) -> Result<FlipSequence, Failure> {
    parse_flipseq(&read(path)?).map_err(|e| with_path(path, e))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Reduce { tri, seq, out, report, no_verify } => {
            let t = load_tri(&tri)?;
            let s = load_seq(&seq)?;
            let opts = ReduceOptions { verify_cursor: false, seed: None };
            let (reduced, rep) = reduce_with(&s, &t, &opts)?;
            if !no_verify {
                let before = apply(&s, &t)?;
                let after = apply(&reduced, &t).map_err(|e| Failure::Internal(format!("reduced sequence: {e}")))?;
                if !before.weak_eq(&after) {
                    return Err(Failure::Internal("reduced sequence is not weakly equivalent to the input".into()));
                }
            }
            emit(out.as_deref(), &write_flipseq(&reduced))?;
            match report {
                Some(p) => emit(Some(&p), &rep.to_string())?,
                None => eprint!("{rep}"),
            }
        }
        Command::GenTri { setting, edges, seed, out } => {
            let t = random_instance(&GenSpec::new(setting, edges, 1, 1.0, seed))?;
            emit(out.as_deref(), &write_ltri(&t))?;
        }
        Command::GenSeq { tri, length, redundancy, seed, out } => {
            let t = load_tri(&tri)?;
            let spec = GenSpec::new(t.setting(), t.edge_count(), length, redundancy, seed);
            let s = random_sequence(&t, &spec)?;
            emit(out.as_deref(), &write_flipseq(&s))?;
        }
        Command::Verify { tri, seq_a, seq_b, mode } => {
            let t = load_tri(&tri)?;
            let a = load_seq(&seq_a)?;
            let b = load_seq(&seq_b)?;
            let (ta, tb) = (apply(&a, &t)?, apply(&b, &t)?);
            let (verdict, detail) = match mode {
                Mode::Weak => (ta.weak_eq(&tb), String::new()),
                Mode::Strong => {
                    let strong = ta.strong_eq(&tb);
                    let by_swaps = strongly_equiv_by_commutativity(&a, &b, &t)?;
                    (strong, format!(" by_commutativity={by_swaps}"))
                }
            };
            let name = match mode {
                Mode::Weak => "weak",
                Mode::Strong => "strong",
            };
            println!("{name}_equivalent={verdict}{detail}");
        }
        Command::Distance { tri_a, tri_b } => {
            let a = UnlabeledNgon::from_labeled(&load_tri(&tri_a)?)?;
            let b = UnlabeledNgon::from_labeled(&load_tri(&tri_b)?)?;
            println!("{}", flip_distance_bfs(&a, &b)?);
        }
        Command::Canon { tri, seq, apex } => {
            let t = load_tri(&tri)?;
            let s = load_seq(&seq)?;
            let cert = canonical_certificate(&s, &t, apex)?;
            let labels: Vec<String> = cert.iter().map(|l| l.to_string()).collect();
            println!("{}", labels.join(" "));
        }
        Command::Bench { settings, sizes, lengths, redundancies, seeds, base_seed, out, table } => {
            let edges: Vec<Option<usize>> =
                if sizes.is_empty() { vec![None] } else { sizes.into_iter().map(Some).collect() };
            let seed_list: Vec<u64> = (base_seed..base_seed + seeds).collect();
            let report = run_bench(&grid(&settings, &edges, &lengths, &redundancies, &seed_list));
            let text = if table { report.render_table() } else { report.to_string() };
            emit(out.as_deref(), &text)?;
        }
        Command::FromOff { input, setting, out } => {
            let t = triangulation_from_off(&read(&input)?, setting).map_err(|e| with_path(&input, e))?;
            emit(out.as_deref(), &write_ltri(&t))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
