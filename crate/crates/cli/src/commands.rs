//! Command implementations. Each takes parsed inputs and returns the text to
//! print, so the binary only handles argument parsing and file I/O.

use std::fmt::Write as _;

use flagcode::codes::{build_max_distance_code, example_t_code, exhaustive_nearest, random_code, FlagRankCode, SyndromeTable};
use flagcode::flags::{d_max, flag_from_matrix, flag_rank, matrix_from_flag, matrix_from_spaces, packed_len, UpperTriangular};
use flagcode::gf::FieldSpec;
use flagcode::netsim::{source_emit, CampaignConfig, SimReport, Simulation, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};
use crate::format::{write_flag, Received};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeKind {
    MaxDistance,
    ExampleT,
    Random,
}

pub fn field_of_order(q: u32) -> CliResult<FieldSpec> {
    FieldSpec::of_order(q).map_err(|e| CliError::Usage(format!("--q {q}: {e}")))
}

pub fn gen_code(q: u32, n: usize, kind: CodeKind, dim: Option<usize>, seed: Option<u64>) -> CliResult<FlagRankCode> {
    let spec = field_of_order(q)?;
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    match kind {
        CodeKind::ExampleT => {
            if (q, n) != (3, 4) {
                return Err(CliError::Usage(format!("example-T is defined for --q 3 --n 4, not --q {q} --n {n}")));
            }
            Ok(example_t_code())
        }
        CodeKind::MaxDistance => build_max_distance_code(&spec, n).map_err(|e| CliError::Usage(e.to_string())),
        CodeKind::Random => {
            let dim = dim.ok_or_else(|| CliError::Usage("--kind random needs --dim".into()))?;
            let len = packed_len(n);
            if dim == 0 || dim > len {
                return Err(CliError::Usage(format!("--dim must be in 1..={len} for n = {n}, got {dim}")));
            }
            let seed = seed.ok_or_else(|| CliError::Usage("--kind random needs --seed".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_code(&spec, n, dim, &mut rng).map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

pub fn code_info(code: &FlagRankCode) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "field: {}", code.spec());
    let _ = writeln!(s, "n: {}", code.n());
    let _ = writeln!(s, "dim: {}", code.dim());
    match code.min_distance() {
        Ok(d) => {
            let _ = writeln!(s, "min distance: {d}");
        }
        Err(e) => {
            let _ = writeln!(s, "min distance: not computed ({e})");
        }
    }
    let _ = writeln!(s, "dual dim: {}", code.dual_basis().len());
    let _ = writeln!(s, "d_max(n+1): {}", d_max(code.n() + 1));
    s
}

/// What to encode: a message index or an explicit matrix.
#[derive(Clone, Debug)]
pub enum Message {
    Index(u128),
    Matrix(UpperTriangular),
}

/// Packet listing of a codeword, optionally followed by its flag.
pub fn encode(code: &FlagRankCode, message: &Message, raw: bool, with_flag: bool) -> CliResult<String> {
    let delta = match message {
        Message::Index(i) => code.codeword(*i).map_err(|e| CliError::Usage(e.to_string()))?,
        Message::Matrix(m) => {
            if !raw && !code.contains(m)? {
                return Err(CliError::Validation(format!("{m} is not a codeword (pass --raw to send it anyway)")));
            }
            m.clone()
        }
    };
    let mut s = String::new();
    let _ = writeln!(s, "# matrix: {delta}");
    for p in source_emit(&delta) {
        let payload: Vec<String> = p.payload.iter().map(u32::to_string).collect();
        let _ = writeln!(s, "packet {}: {}", p.seq, payload.join(","));
    }
    if with_flag {
        s.push_str(&write_flag(flag_from_matrix(&delta).spaces()));
    }
    Ok(s)
}

/// Extracts the matrix of a received word, decodes it and reports the flag
/// rank distance between the two.
pub fn decode(code: &FlagRankCode, received: &Received) -> CliResult<String> {
    let a = match received {
        Received::Matrix(a) => a.clone(),
        Received::Flag(spaces) | Received::Packets(spaces) => matrix_from_spaces(spaces)?,
    };
    let table = SyndromeTable::build(code)?;
    let c = table.decode(&a)?;
    let d = flag_rank(&a.sub(&c)?);
    Ok(format!("extracted: {a}\ndecoded: {c}\ndistance: {d}\n"))
}

pub fn oracle_mindist(code: &FlagRankCode) -> CliResult<String> {
    let d = code.min_distance()?;
    let dist = code.weight_distribution()?;
    let weights: Vec<String> = dist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(w, c)| format!("{w}:{c}"))
        .collect();
    Ok(format!("min distance: {d}\nweight distribution: {}\n", weights.join(",")))
}

pub fn oracle_nearest(code: &FlagRankCode, a: &UpperTriangular) -> CliResult<String> {
    let (c, d) = exhaustive_nearest(code, a)?;
    Ok(format!("nearest: {c}\ndistance: {d}\n"))
}

/// Which matrices `flag-roundtrip` checks.
#[derive(Clone, Debug)]
pub enum RoundTrip {
    One(UpperTriangular),
    All,
    Sample { count: u64, seed: u64 },
}

/// Maps matrices to flags and back, reporting any mismatch as a validation error.
pub fn flag_roundtrip(spec: &FieldSpec, n: usize, which: &RoundTrip) -> CliResult<String> {
    let check = |a: &UpperTriangular| -> CliResult<()> {
        let back = matrix_from_flag(&flag_from_matrix(a))?;
        if &back == a {
            Ok(())
        } else {
            Err(CliError::Validation(format!("round trip of {a} gave {back}")))
        }
    };
    match which {
        RoundTrip::One(a) => {
            check(a)?;
            let flag = flag_from_matrix(a);
            Ok(format!("{}extracted: {}\nround trip: exact\n", write_flag(flag.spaces()), matrix_from_flag(&flag)?))
        }
        RoundTrip::All => {
            let total = u128::from(spec.order())
                .checked_pow(packed_len(n) as u32)
                .filter(|&t| t <= flagcode::codes::ENUMERATION_BUDGET)
                .ok_or_else(|| {
                    CliError::Budget(flagcode::Error::Budget {
                        required: u128::from(spec.order()).saturating_pow(packed_len(n) as u32),
                        limit: flagcode::codes::ENUMERATION_BUDGET,
                    })
                })?;
            for i in 0..total {
                check(&UpperTriangular::from_index(spec, n, i))?;
            }
            Ok(format!("checked {total} matrices of U^{n}({spec}): round trip exact\n"))
        }
        RoundTrip::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for _ in 0..*count {
                let entries = (0..packed_len(n)).map(|_| rng.gen_range(0..spec.order())).collect();
                check(&UpperTriangular::from_packed(spec, n, entries)?)?;
            }
            Ok(format!("checked {count} random matrices of U^{n}({spec}): round trip exact\n"))
        }
    }
}

pub fn simulate(
    code: FlagRankCode,
    topology: Topology,
    trials: u64,
    seed: u64,
    inject_weight: Option<usize>,
) -> CliResult<SimReport> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let sim = Simulation::new(topology, code)?;
    Ok(sim.run_campaign(trials, seed, &CampaignConfig { inject_weight })?)
}
