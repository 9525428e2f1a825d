use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flagcode::codes::FlagRankCode;
use flagcode::flags::UpperTriangular;
use flagcode::netsim::{Probability, Topology};
use flagcode_cli::commands::{self, CodeKind, Message, RoundTrip};
use flagcode_cli::format::{parse_code_file, parse_received, parse_upper, write_code_file, Received};
use flagcode_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "flagcode", version, about = "Flag rank metric codes and degenerate-flag network coding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a code file.
    GenCode {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Dimension of a random code.
        #[arg(long)]
        dim: Option<usize>,
        /// Seed of a random code.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print dimension, minimum distance, dual dimension and d_max(n+1).
    CodeInfo { code: PathBuf },
    /// Print the packets (and optionally the flag) the source sends for a codeword.
    Encode {
        code: PathBuf,
        #[command(flatten)]
        input: MessageInput,
        /// Accept matrices that are not codewords.
        #[arg(long)]
        raw: bool,
        /// Also print the RREF bases of the flag members.
        #[arg(long)]
        flag: bool,
    },
    /// Decode a received matrix, flag or packet listing.
    Decode {
        code: PathBuf,
        #[command(flatten)]
        input: WordInput,
    },
    /// Exhaustive minimum distance and weight distribution.
    OracleMindist { code: PathBuf },
    /// Exhaustive nearest codeword.
    OracleNearest {
        code: PathBuf,
        #[command(flatten)]
        input: WordInput,
    },
    /// Check that extraction inverts the matrix-to-flag map.
    FlagRoundtrip {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        /// A single matrix to map and print; all of U^n(K) if neither this nor --samples is given.
        #[arg(long, conflicts_with = "samples")]
        matrix: Option<String>,
        #[arg(long, requires = "seed")]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a seeded simulation campaign.
    Simulate {
        code: PathBuf,
        /// Topology file.
        #[arg(long, conflicts_with = "line", required_unless_present = "line")]
        topology: Option<PathBuf>,
        /// Use a lossless line network with this many relays.
        #[arg(long)]
        line: Option<usize>,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Add an error of flag rank at most this value to every extracted matrix.
        #[arg(long)]
        inject_weight: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also write the per-trial table to this file.
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct MessageInput {
    /// Message index: base-q digits of the coefficients, first basis matrix most significant.
    #[arg(long)]
    index: Option<u128>,
    /// Matrix text, e.g. `1,0;0,1`.
    #[arg(long)]
    matrix: Option<String>,
    /// File holding a matrix.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct WordInput {
    #[arg(long)]
    matrix: Option<String>,
    /// File holding a matrix, a flag or a packet listing.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    MaxDistance,
    #[value(name = "example-T")]
    ExampleT,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Table,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_code(path: &Path) -> CliResult<FlagRankCode> {
    parse_code_file(&path.display().to_string(), &read(path)?)
}

fn word(code: &FlagRankCode, input: &WordInput) -> CliResult<Received> {
    match (&input.matrix, &input.input) {
        (Some(text), _) => parse_received(code.spec(), code.n(), "--matrix", text),
        (None, Some(path)) => parse_received(code.spec(), code.n(), &path.display().to_string(), &read(path)?),
        (None, None) => unreachable!("clap requires one input"),
    }
}

fn matrix_word(code: &FlagRankCode, input: &WordInput) -> CliResult<UpperTriangular> {
    match word(code, input)? {
        Received::Matrix(a) => Ok(a),
        _ => Err(CliError::Usage("expected a matrix".into())),
    }
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::GenCode { q, n, kind, dim, seed, out } => {
            let kind = match kind {
                Kind::MaxDistance => CodeKind::MaxDistance,
                Kind::ExampleT => CodeKind::ExampleT,
                Kind::Random => CodeKind::Random,
            };
            let text = write_code_file(&commands::gen_code(q, n, kind, dim, seed)?);
            match out {
                Some(path) => write(&path, &text).map(|()| String::new()),
                None => Ok(text),
            }
        }
        Command::CodeInfo { code } => Ok(commands::code_info(&load_code(&code)?)),
        Command::Encode { code, input, raw, flag } => {
            let code = load_code(&code)?;
            let message = match (input.index, input.matrix, input.input) {
                (Some(i), _, _) => Message::Index(i),
                (_, Some(text), _) => Message::Matrix(parse_upper(code.spec(), code.n(), "--matrix", &text)?),
                (_, _, Some(path)) => {
                    Message::Matrix(parse_upper(code.spec(), code.n(), &path.display().to_string(), &read(&path)?)?)
                }
                _ => unreachable!("clap requires one input"),
            };
            commands::encode(&code, &message, raw, flag)
        }
        Command::Decode { code, input } => {
            let code = load_code(&code)?;
            commands::decode(&code, &word(&code, &input)?)
        }
        Command::OracleMindist { code } => commands::oracle_mindist(&load_code(&code)?),
        Command::OracleNearest { code, input } => {
            let code = load_code(&code)?;
            commands::oracle_nearest(&code, &matrix_word(&code, &input)?)
        }
        Command::FlagRoundtrip { q, n, matrix, samples, seed } => {
            let spec = commands::field_of_order(q)?;
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let which = match (matrix, samples) {
                (Some(text), _) => RoundTrip::One(parse_upper(&spec, n, "--matrix", &text)?),
                (None, Some(count)) => RoundTrip::Sample { count, seed: seed.expect("clap requires --seed") },
                (None, None) => RoundTrip::All,
            };
            commands::flag_roundtrip(&spec, n, &which)
        }
        Command::Simulate { code, topology, line, trials, seed, inject_weight, format, table } => {
            let code = load_code(&code)?;
            let topology = match (topology, line) {
                (Some(path), _) => {
                    let origin = path.display().to_string();
                    read(&path)?
                        .parse::<Topology>()
                        .map_err(|e| CliError::Usage(format!("{origin}: {e}")))?
                }
                (None, Some(relays)) => Topology::line(relays, Probability::ZERO, Probability::ZERO),
                (None, None) => unreachable!("clap requires a topology"),
            };
            let report = commands::simulate(code, topology, trials, seed, inject_weight)?;
            if let Some(path) = table {
                write(&path, &report.to_table())?;
            }
            Ok(match format {
                Format::Text => report.to_text(),
                Format::Table => report.to_table(),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("flagcode: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
