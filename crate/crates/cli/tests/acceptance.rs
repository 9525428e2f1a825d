//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use flagcode::codes::{
    block_diagonal_pattern, build_max_distance_code, example_t_code, exhaustive_nearest, FlagRankCode, SyndromeTable,
};
use flagcode::flags::{
    d_max, flag_distance, flag_from_matrix, flag_rank, full_flag_distance, full_flag_distance_via_product,
    full_flag_from_matrix, matrix_from_flag, packed_len, UpperTriangular,
};
use flagcode::gf::FieldSpec;
use flagcode::linalg::Subspace;
use flagcode::netsim::{
    expected_baseline_ops, expected_projected_ops, node_combine, source_emit, CampaignConfig, Coefficients, Inbox,
    OpTally, Probability, Simulation, Topology,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn f2() -> FieldSpec {
    FieldSpec::prime(2).unwrap()
}

fn f3() -> FieldSpec {
    FieldSpec::prime(3).unwrap()
}

fn all(spec: &FieldSpec, n: usize) -> Vec<UpperTriangular> {
    let total = u128::from(spec.order()).pow(packed_len(n) as u32);
    (0..total).map(|i| UpperTriangular::from_index(spec, n, i)).collect()
}

fn random(spec: &FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> UpperTriangular {
    let entries = (0..packed_len(n)).map(|_| rng.gen_range(0..spec.order())).collect();
    UpperTriangular::from_packed(spec, n, entries).unwrap()
}

fn flagcode(args: &[&str]) -> std::result::Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_flagcode"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(out.stdout)
    } else {
        Err(format!("flagcode {args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()))
    }
}

fn example_code_reproduction() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("t.code");
    flagcode(&["gen-code", "--q", "3", "--n", "4", "--kind", "example-T", "--out", path.to_str().unwrap()])?;
    let info = String::from_utf8(flagcode(&["code-info", path.to_str().unwrap()])?).unwrap();
    ensure(info.contains("field: GF(3)\nn: 4\ndim: 4\nmin distance: 5\n"), || format!("code-info said {info:?}"))?;
    let code = flagcode_cli::format::parse_code_file("t.code", &std::fs::read_to_string(&path).unwrap())
        .map_err(|e| e.to_string())?;
    let words = code.codewords().map_err(|e| e.to_string())?.count();
    let d = code.min_distance().map_err(|e| e.to_string())?;
    ensure(words == 81 && d == 5 && code.dim() == 4, || format!("{words} codewords, d = {d}"))?;
    Ok(format!("dim 4 over GF(3), {words} codewords, min distance {d}"))
}

fn pattern_space_maximum() -> Check {
    let pattern = block_diagonal_pattern(&f3());
    let ranks: Vec<usize> = pattern.codewords().map_err(|e| e.to_string())?.map(|a| flag_rank(&a)).collect();
    let max = ranks.iter().copied().max().unwrap();
    ensure(ranks.len() == 729 && max == 4, || format!("{} matrices, max {max}", ranks.len()))?;
    Ok(format!("729 matrices, max flag rank {max}"))
}

fn isometry() -> Check {
    let mats = all(&f2(), 3);
    let flags: Vec<_> = mats.iter().map(flag_from_matrix).collect();
    let mut pairs = 0;
    for (a, fa) in mats.iter().zip(&flags) {
        for (b, fb) in mats.iter().zip(&flags) {
            let d = flag_distance(fa, fb).map_err(|e| e.to_string())?;
            ensure(d == flag_rank(&a.sub(b).unwrap()), || format!("{a} vs {b}"))?;
            pairs += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x150);
    for _ in 0..10_000 {
        let (a, b) = (random(&f3(), 4, &mut rng), random(&f3(), 4, &mut rng));
        let d = flag_distance(&flag_from_matrix(&a), &flag_from_matrix(&b)).map_err(|e| e.to_string())?;
        ensure(d == flag_rank(&a.sub(&b).unwrap()), || format!("{a} vs {b}"))?;
        pairs += 1;
    }
    Ok(format!("{pairs} pairs exact"))
}

fn bijection() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb1);
    let random_cases: Vec<_> = (0..10_000).map(|_| random(&f3(), 4, &mut rng)).collect();
    let mut cases = 0;
    for a in all(&f2(), 3).iter().chain(&random_cases) {
        let back = matrix_from_flag(&flag_from_matrix(a)).map_err(|e| e.to_string())?;
        ensure(&back == a, || format!("{a} came back as {back}"))?;
        cases += 1;
    }
    Ok(format!("{cases} round trips exact"))
}

fn max_distance_constructions() -> Check {
    let mut parts = Vec::new();
    for (n, dim, d) in [(3, 2, 4), (4, 2, 6)] {
        let start = Instant::now();
        let code = build_max_distance_code(&f2(), n).map_err(|e| e.to_string())?;
        let got = code.min_distance().map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        ensure(code.dim() == dim && got == d && got == d_max(n + 1), || {
            format!("n = {n}: dim {}, min distance {got}", code.dim())
        })?;
        ensure(elapsed < Duration::from_secs(1), || format!("n = {n} took {elapsed:?}"))?;
        parts.push(format!("n={n}: dim {dim}, d {got}"));
    }
    Ok(parts.join("; "))
}

fn dimension_bound() -> Check {
    let spaces = Subspace::enumerate(&f2(), packed_len(3), 3);
    ensure(spaces.len() == 1395, || format!("{} subspaces", spaces.len()))?;
    let mut best = 0;
    for s in &spaces {
        let gens: Vec<_> = (0..3)
            .map(|r| UpperTriangular::from_packed(&f2(), 3, s.basis().row(r).to_vec()).unwrap())
            .collect();
        let d = FlagRankCode::new(&f2(), 3, gens).map_err(|e| e.to_string())?.min_distance().map_err(|e| e.to_string())?;
        best = best.max(d);
    }
    ensure(best < 4, || format!("found a 3-dimensional code with distance {best}"))?;
    Ok(format!("1395 codes, best min distance {best}"))
}

fn maximum_flag_rank() -> Check {
    let mut parts = Vec::new();
    for (n, expected) in [(2, 2), (3, 4), (4, 6)] {
        let max = all(&f2(), n).iter().map(flag_rank).max().unwrap();
        ensure(max == expected && max == d_max(n + 1), || format!("n = {n}: max {max}"))?;
        parts.push(format!("n={n}: {max}"));
    }
    Ok(parts.join(", "))
}

fn decoder_matches_oracle() -> Check {
    let mut checked = 0;
    let mut agree = |code: &FlagRankCode, table: &SyndromeTable, a: &UpperTriangular| -> std::result::Result<(), String> {
        let c = table.decode(a).map_err(|e| e.to_string())?;
        let (_, best) = exhaustive_nearest(code, a).map_err(|e| e.to_string())?;
        let got = flag_rank(&a.sub(&c).unwrap());
        checked += 1;
        ensure(code.contains(&c).unwrap() && got == best, || format!("{a}: decoder {got}, oracle {best}"))
    };
    for n in [3, 4] {
        let code = build_max_distance_code(&f2(), n).map_err(|e| e.to_string())?;
        let table = SyndromeTable::build(&code).map_err(|e| e.to_string())?;
        for a in all(&f2(), n) {
            agree(&code, &table, &a)?;
        }
    }
    let t = example_t_code();
    let table = SyndromeTable::build(&t).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xdec);
    for _ in 0..1000 {
        agree(&t, &table, &random(&f3(), 4, &mut rng))?;
    }
    Ok(format!("{checked} inputs agree with the exhaustive oracle"))
}

fn full_flag_comparison() -> Check {
    let mats = all(&f2(), 3);
    let full: Vec<_> = mats.iter().map(full_flag_from_matrix).collect();
    let degenerate: Vec<_> = mats.iter().map(flag_from_matrix).collect();
    for i in 0..mats.len() {
        for j in 0..mats.len() {
            let (g, d) = (&mats[i], &mats[j]);
            let lhs = full_flag_distance(&full[i], &full[j]).map_err(|e| e.to_string())?;
            let rhs = full_flag_distance_via_product(g, d).map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || format!("full flags of {g}, {d}: {lhs} vs {rhs}"))?;
            let lhs = flag_distance(&degenerate[i], &degenerate[j]).map_err(|e| e.to_string())?;
            ensure(lhs == flag_rank(&g.sub(d).unwrap()), || format!("degenerate flags of {g}, {d}"))?;
        }
    }
    Ok("both identities exact on 4096 pairs".into())
}

fn protocol_end_to_end() -> Check {
    let codes = [
        ("example-T", example_t_code()),
        ("max-distance q=2 n=3", build_max_distance_code(&f2(), 3).unwrap()),
        ("max-distance q=2 n=4", build_max_distance_code(&f2(), 4).unwrap()),
    ];
    let mut parts = Vec::new();
    for (name, code) in codes {
        let t = (code.min_distance().map_err(|e| e.to_string())? - 1) / 2;
        let sim = Simulation::new(Topology::line(3, Probability::ZERO, Probability::ZERO), code).map_err(|e| e.to_string())?;
        let clean = sim.run_campaign(100, 1, &CampaignConfig::default()).map_err(|e| e.to_string())?;
        ensure(clean.successes == 100 && clean.invariant_violations == 0, || {
            format!("{name}: {} of 100 lossless trials succeeded", clean.successes)
        })?;
        for t_idx in 0..100 {
            let trial = sim.run_trial(1, t_idx, &CampaignConfig::default()).map_err(|e| e.to_string())?;
            ensure(trial.sinks[0].decoded.as_ref() == Some(&trial.sent), || format!("{name}: trial {t_idx} recovered a different matrix"))?;
        }
        let noisy = sim
            .run_campaign(100, 2, &CampaignConfig { inject_weight: Some(t) })
            .map_err(|e| e.to_string())?;
        ensure(noisy.successes == 100, || format!("{name}: {} of 100 trials with injected errors decoded", noisy.successes))?;
        parts.push(format!("{name}: 100/100 clean, 100/100 with frk<={t} errors"));
    }
    Ok(parts.join("; "))
}

fn cost_instrumentation() -> Check {
    let n = 4;
    let code = example_t_code();
    let delta = code.codeword(50).unwrap();
    let mut inbox = Inbox::new(n);
    for p in source_emit(&delta) {
        inbox.push(p).unwrap();
    }
    let mut tally = OpTally::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    node_combine(code.spec(), &inbox, &Coefficients::random(code.spec(), &inbox, &mut rng), &mut tally);
    for i in 1..=n {
        let (p, b) = (tally.projected[i - 1], tally.baseline[i - 1]);
        let closed = (i * (n + 1) - i * (i + 1) / 2) as u64;
        ensure(p == closed && p == expected_projected_ops(n, i), || format!("step {i}: {p} recorded, {closed} expected"))?;
        ensure(b == (i * (n + 1)) as u64 && b == expected_baseline_ops(n, i), || format!("step {i}: baseline {b}"))?;
    }
    let sim = Simulation::new(Topology::line(1, Probability::ZERO, Probability::ZERO), code).map_err(|e| e.to_string())?;
    let report = sim.run_campaign(20, 5, &CampaignConfig::default()).map_err(|e| e.to_string())?;
    ensure(report.ops_match_closed_form(), || "campaign totals differ from the closed form".into())?;
    Ok(format!("projected {:?}, baseline {:?}", tally.projected, tally.baseline))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let code = dir.path().join("t.code");
    flagcode(&["gen-code", "--q", "3", "--n", "4", "--kind", "example-T", "--out", code.to_str().unwrap()])?;
    let topo = dir.path().join("net.topo");
    std::fs::write(
        &topo,
        "node s source\nnode a relay\nnode b relay\nnode c relay\nnode t sink\n\
         edge s a 0.05 0.01\nedge s b 0 0.02\nedge a c 0.1 0\nedge b c 0 0\nedge c t 0.02 0.05\nedge a t 0 0\n",
    )
    .unwrap();
    let code = code.to_str().unwrap();
    let topo = topo.to_str().unwrap();
    let runs: [&[&str]; 3] = [
        &["simulate", code, "--topology", topo, "--trials", "200", "--seed", "17"],
        &["simulate", code, "--topology", topo, "--trials", "200", "--seed", "17", "--format", "table"],
        &["simulate", code, "--line", "3", "--trials", "100", "--seed", "8", "--inject-weight", "2"],
    ];
    for args in runs {
        let (a, b) = (flagcode(args)?, flagcode(args)?);
        ensure(a == b, || format!("{args:?} differed between runs"))?;
    }
    Ok("3 invocations byte-identical across runs".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Option<Duration>, fn() -> Check); 12] = [
        (1, "example code reproduction", Some(Duration::from_secs(1)), example_code_reproduction),
        (2, "pattern space maximum flag rank", Some(Duration::from_secs(1)), pattern_space_maximum),
        (3, "isometry", Some(Duration::from_secs(10)), isometry),
        (4, "bijection", None, bijection),
        (5, "maximum-distance constructions", None, max_distance_constructions),
        (6, "dimension bound search", Some(Duration::from_secs(30)), dimension_bound),
        (7, "maximum flag rank", None, maximum_flag_rank),
        (8, "decoder vs exhaustive oracle", None, decoder_matches_oracle),
        (9, "full-flag comparison", None, full_flag_comparison),
        (10, "protocol end to end", None, protocol_end_to_end),
        (11, "cost instrumentation", None, cost_instrumentation),
        (12, "determinism", None, determinism),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(limit)) if elapsed >= limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("criterion {id}: PASS  {name} ({detail}) [{elapsed:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("criterion {id}: FAIL  {name}: {why} [{elapsed:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
