//! Seeded simulation of degenerate-flag network coding.
//!
//! The source sends row `i` of `(I_i | Δ_[i])` with sequence number `i`.
//! Relays forward, for every `i`, a random combination
//! `Z_i = Σ_{j<=i} a_ij pr_{j,i}(Y_j)` of what they received. The receiver
//! spans the projected packets into `W_1, ..., W_n`, checks that the result is
//! a big-cell degenerate flag, extracts the upper triangular matrix and
//! decodes it with the syndrome table.
//!
//! Every random choice of a trial comes from one ChaCha stream derived from
//! the campaign seed and the trial index, so campaigns are reproducible and
//! trials can run in parallel.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codes::{FlagRankCode, SyndromeTable};
use crate::error::{domain, Error, Result};
use crate::flags::{chain_step_holds, flag_from_matrix, flag_rank, matrix_from_spaces, UpperTriangular};
use crate::gf::FieldSpec;
use crate::linalg::{MatrixF, Subspace};

/// A payload of `n + 1` element codes tagged with a sequence number in `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Packet {
    pub seq: usize,
    pub payload: Vec<u32>,
}

/// Packets held by a node, grouped by sequence number.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Inbox {
    by_seq: Vec<Vec<Vec<u32>>>,
}

impl Inbox {
    pub fn new(n: usize) -> Self {
        Self { by_seq: vec![Vec::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.by_seq.len()
    }

    pub fn push(&mut self, packet: Packet) -> Result<()> {
        let n = self.n();
        if packet.seq == 0 || packet.seq > n {
            return Err(domain(format!("sequence number {} outside 1..={n}", packet.seq)));
        }
        if packet.payload.len() != n + 1 {
            return Err(domain(format!("payload of length {}, expected {}", packet.payload.len(), n + 1)));
        }
        self.by_seq[packet.seq - 1].push(packet.payload);
        Ok(())
    }

    /// Payloads received with sequence number `seq` (1-based).
    pub fn payloads(&self, seq: usize) -> &[Vec<u32>] {
        &self.by_seq[seq - 1]
    }

    pub fn len(&self) -> usize {
        self.by_seq.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `(X_i, i)` where `X_i` is row `i` of `(I_i | Δ_[i])`.
pub fn source_emit(delta: &UpperTriangular) -> Vec<Packet> {
    let n = delta.n();
    (1..=n)
        .map(|i| {
            let mut payload = vec![0; n + 1];
            payload[i - 1] = 1;
            for l in i..=n {
                payload[l] = delta.code(i - 1, l - 1);
            }
            Packet { seq: i, payload }
        })
        .collect()
}

/// Per-packet coefficients `a[i][j][t]` for output `i`, input sequence `j <= i`
/// and the `t`-th packet received with sequence number `j` (all 0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coefficients {
    a: Vec<Vec<Vec<u32>>>,
}

impl Coefficients {
    /// `a_ij` applied to every packet of sequence `j`; `lower` is `n x n`
    /// lower triangular (entries above the diagonal are ignored).
    pub fn from_lower_triangular(lower: &MatrixF, inbox: &Inbox) -> Self {
        let n = inbox.n();
        let a = (0..n)
            .map(|i| (0..=i).map(|j| vec![lower.code(i, j); inbox.by_seq[j].len()]).collect())
            .collect();
        Self { a }
    }

    /// `a_ii` uniform in `K \ {0}` and `a_ij` (`j < i`) uniform in `K`, drawn
    /// independently for every received packet.
    pub fn random<R: Rng + ?Sized>(spec: &FieldSpec, inbox: &Inbox, rng: &mut R) -> Self {
        let q = spec.order();
        let n = inbox.n();
        let a = (0..n)
            .map(|i| {
                (0..=i)
                    .map(|j| {
                        (0..inbox.by_seq[j].len())
                            .map(|_| if j == i { rng.gen_range(1..q) } else { rng.gen_range(0..q) })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { a }
    }
}

/// Multiply-add counts per output sequence number.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OpTally {
    /// Counted with the zeroed block of `pr_{j,i}` skipped: `n + 1 - (i - j + 1)` per term.
    pub projected: Vec<u64>,
    /// Unprojected combination: `n + 1` per term.
    pub baseline: Vec<u64>,
    /// Number of `node_combine` invocations.
    pub combinations: u64,
}

impl OpTally {
    pub fn new(n: usize) -> Self {
        Self { projected: vec![0; n], baseline: vec![0; n], combinations: 0 }
    }

    fn absorb(&mut self, other: &OpTally) {
        for (a, b) in self.projected.iter_mut().zip(&other.projected) {
            *a += b;
        }
        for (a, b) in self.baseline.iter_mut().zip(&other.baseline) {
            *a += b;
        }
        self.combinations += other.combinations;
    }
}

/// Closed-form multiply-add count at step `i` for one vector per sequence
/// number: `i(n+1) - i(i+1)/2`.
pub fn expected_projected_ops(n: usize, i: usize) -> u64 {
    (i * (n + 1) - i * (i + 1) / 2) as u64
}

/// Unprojected baseline `i(n+1)`.
pub fn expected_baseline_ops(n: usize, i: usize) -> u64 {
    (i * (n + 1)) as u64
}

/// `Z_i = Σ_{j<=i} Σ_t a_ijt pr_{j,i}(Y_jt)` for every `i`; returns `(Z_i, i)`.
///
/// The tally counts `n + 1 - (i - j + 1)` operations per term, which sums to
/// `i(n+1) - i(i+1)/2` when one vector per sequence number is held. The
/// projection itself only zeroes `i - j` coordinates, so the arithmetic below
/// touches one coordinate more per term than the tally records.
pub fn node_combine(spec: &FieldSpec, inbox: &Inbox, coeffs: &Coefficients, tally: &mut OpTally) -> Vec<Packet> {
    let n = inbox.n();
    tally.combinations += 1;
    (1..=n)
        .map(|i| {
            let mut z = vec![0u32; n + 1];
            for j in 1..=i {
                for (t, y) in inbox.by_seq[j - 1].iter().enumerate() {
                    let a = coeffs.a[i - 1][j - 1][t];
                    // Coordinates j+1..=i (1-based) are zeroed by pr_{j,i}.
                    for (k, zk) in z.iter_mut().enumerate() {
                        if k >= j && k < i {
                            continue;
                        }
                        *zk = spec.mul_add(*zk, a, y[k]);
                    }
                    tally.projected[i - 1] += (n + 1 - (i - j + 1)) as u64;
                    tally.baseline[i - 1] += (n + 1) as u64;
                }
            }
            Packet { seq: i, payload: z }
        })
        .collect()
}

/// `W_i = <pr_{j,i}(R) : R received with sequence number j <= i>`.
pub fn receiver_reconstruct(spec: &FieldSpec, inbox: &Inbox) -> Vec<Subspace> {
    let n = inbox.n();
    (1..=n)
        .map(|i| {
            let mut rows = Vec::new();
            let mut count = 0;
            for j in 1..=i {
                for r in &inbox.by_seq[j - 1] {
                    let mut v = r.clone();
                    v[j..i].iter_mut().for_each(|x| *x = 0);
                    rows.extend(v);
                    count += 1;
                }
            }
            Subspace::from_rows(&MatrixF::from_codes(spec, count, n + 1, rows).expect("shape"))
        })
        .collect()
}

/// Whether `pr_{i+1}(W_i) ⊆ W_{i+1}` for all `i`, regardless of dimensions.
pub fn chain_holds(spaces: &[Subspace]) -> bool {
    spaces.windows(2).enumerate().all(|(k, w)| chain_step_holds(&w[0], &w[1], k + 1))
}

/// Exact decimal probability `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Probability {
    num: u64,
    den: u64,
}

impl Probability {
    pub const ZERO: Probability = Probability { num: 0, den: 1 };
    pub const ONE: Probability = Probability { num: 1, den: 1 };

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        rng.gen_range(0..self.den) < self.num
    }
}

impl FromStr for Probability {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || domain(format!("`{s}` is not a probability in [0, 1]"));
        let s = s.trim();
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() || frac.len() > 18 {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac_v: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|x| x.checked_add(frac_v)).ok_or_else(bad)?;
        if num > den {
            return Err(bad());
        }
        Ok(Probability { num, den })
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == self.den {
            return f.write_str("1");
        }
        if self.num == 0 {
            return f.write_str("0");
        }
        let digits = self.den.trailing_zeros() as usize; // den is a power of ten
        let s = format!("{:0width$}", self.num, width = digits);
        write!(f, "0.{}", s.trim_end_matches('0'))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Source,
    Relay,
    Sink,
}

impl FromStr for Role {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(Role::Source),
            "relay" => Ok(Role::Relay),
            "sink" => Ok(Role::Sink),
            other => Err(domain(format!("unknown role `{other}`"))),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Source => "source",
            Role::Relay => "relay",
            Role::Sink => "sink",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub erasure: Probability,
    pub corruption: Probability,
}

/// A directed acyclic network with one source and at least one sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    order: Vec<usize>,
}

impl Topology {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self> {
        let sources = nodes.iter().filter(|n| n.role == Role::Source).count();
        if sources != 1 {
            return Err(domain(format!("topology needs exactly one source, found {sources}")));
        }
        if !nodes.iter().any(|n| n.role == Role::Sink) {
            return Err(domain("topology needs at least one sink"));
        }
        let mut seen = HashMap::new();
        for (k, n) in nodes.iter().enumerate() {
            if seen.insert(n.name.as_str(), k).is_some() {
                return Err(domain(format!("duplicate node `{}`", n.name)));
            }
        }
        for e in &edges {
            if e.from >= nodes.len() || e.to >= nodes.len() {
                return Err(domain("edge endpoint out of range"));
            }
            if nodes[e.from].role == Role::Sink {
                return Err(domain(format!("sink `{}` cannot forward", nodes[e.from].name)));
            }
            if nodes[e.to].role == Role::Source {
                return Err(domain("edges into the source are not allowed"));
            }
        }
        // Kahn's algorithm, lowest node index first.
        let mut indeg = vec![0usize; nodes.len()];
        for e in &edges {
            indeg[e.to] += 1;
        }
        let mut ready: std::collections::BTreeSet<usize> = (0..nodes.len()).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(nodes.len());
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for e in edges.iter().filter(|e| e.from == v) {
                indeg[e.to] -= 1;
                if indeg[e.to] == 0 {
                    ready.insert(e.to);
                }
            }
        }
        if order.len() != nodes.len() {
            return Err(domain("topology has a cycle"));
        }
        Ok(Self { nodes, edges, order })
    }

    /// Source, `relays` relays and a sink in a line, every edge with the same probabilities.
    pub fn line(relays: usize, erasure: Probability, corruption: Probability) -> Self {
        let mut nodes = vec![Node { name: "s".into(), role: Role::Source }];
        nodes.extend((1..=relays).map(|k| Node { name: format!("r{k}"), role: Role::Relay }));
        nodes.push(Node { name: "t".into(), role: Role::Sink });
        let edges = (0..=relays).map(|k| Edge { from: k, to: k + 1, erasure, corruption }).collect();
        Self::new(nodes, edges).expect("a line is a valid topology")
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_lossless(&self) -> bool {
        self.edges.iter().all(|e| e.erasure.is_zero() && e.corruption.is_zero())
    }

    /// Lossless and every relay fed by a single edge: the sink must then see the sent flag.
    fn preserves_flag(&self) -> bool {
        self.is_lossless()
            && self
                .nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| n.role == Role::Relay)
                .all(|(v, _)| self.edges.iter().filter(|e| e.to == v).count() == 1)
    }
}

/// Line-based text format:
///
/// ```text
/// # comment
/// node s source
/// node r1 relay
/// node t sink
/// edge s r1 0 0
/// edge r1 t 0.05 0.01
/// ```
impl FromStr for Topology {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut index = HashMap::new();
        let mut pending = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| domain(format!("line {}: {msg}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["node", name, role] => {
                    let role = role.parse::<Role>().map_err(|e| at(e.to_string()))?;
                    index.insert(name.to_string(), nodes.len());
                    nodes.push(Node { name: name.to_string(), role });
                }
                ["edge", from, to, erasure, corruption] => {
                    let erasure = erasure.parse::<Probability>().map_err(|e| at(e.to_string()))?;
                    let corruption = corruption.parse::<Probability>().map_err(|e| at(e.to_string()))?;
                    pending.push((lineno + 1, from.to_string(), to.to_string(), erasure, corruption));
                }
                _ => return Err(at(format!("cannot parse `{line}`"))),
            }
        }
        let mut edges = Vec::with_capacity(pending.len());
        for (lineno, from, to, erasure, corruption) in pending {
            let lookup = |name: &str| {
                index
                    .get(name)
                    .copied()
                    .ok_or_else(|| domain(format!("line {lineno}: unknown node `{name}`")))
            };
            edges.push(Edge { from: lookup(&from)?, to: lookup(&to)?, erasure, corruption });
        }
        Topology::new(nodes, edges)
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            writeln!(f, "node {} {}", n.name, n.role)?;
        }
        for e in &self.edges {
            writeln!(
                f,
                "edge {} {} {} {}",
                self.nodes[e.from].name, self.nodes[e.to].name, e.erasure, e.corruption
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Success,
    /// The received tuple is not a big-cell degenerate flag.
    CellFailure,
    /// Decoding produced a codeword other than the one sent.
    Miscorrection,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Success => "success",
            Outcome::CellFailure => "cell-failure",
            Outcome::Miscorrection => "miscorrection",
        })
    }
}

/// What one sink saw in one trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SinkResult {
    pub node: usize,
    pub outcome: Outcome,
    pub received: Vec<Subspace>,
    pub extracted: Option<UpperTriangular>,
    pub decoded: Option<UpperTriangular>,
    /// `frk(extracted - decoded)`.
    pub distance: Option<usize>,
    pub chain_ok: bool,
    /// Set when the topology must deliver the sent flag unchanged.
    pub flag_preserved: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub index: u64,
    pub sent: UpperTriangular,
    /// Miscorrection at any sink dominates cell failure, which dominates success.
    pub outcome: Outcome,
    pub sinks: Vec<SinkResult>,
    /// Per node, indexed like the topology's node list.
    pub ops: Vec<OpTally>,
    pub delivered: usize,
    pub erased: usize,
    pub corrupted: usize,
}

/// Optional fault injection applied on top of the channel model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Injection {
    /// Added to the extracted matrix before decoding.
    pub matrix_error: Option<UpperTriangular>,
}

/// Campaign parameters beyond the trial count and seed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CampaignConfig {
    /// Inject a random extracted-matrix error of flag rank at most this value in every trial.
    pub inject_weight: Option<usize>,
}

/// A topology together with a code and its decoding table.
pub struct Simulation {
    topology: Topology,
    code: FlagRankCode,
    table: SyndromeTable,
}

/// The random stream for trial `index` of a campaign seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Random error with flag rank at most `max_weight`, built as a sum of
/// single-entry matrices. The entry at 0-based `(r, c)` lies in the corner
/// slices `r+1..=c+1` and so contributes flag rank `c - r + 1`.
pub fn random_error<R: Rng + ?Sized>(spec: &FieldSpec, n: usize, max_weight: usize, rng: &mut R) -> UpperTriangular {
    let mut e = UpperTriangular::zero(spec, n);
    let mut budget = max_weight;
    while budget > 0 {
        let choices: Vec<(usize, usize)> = (0..n)
            .flat_map(|r| (r..n).map(move |c| (r, c)))
            .filter(|&(r, c)| c - r < budget)
            .collect();
        let (r, c) = choices[rng.gen_range(0..choices.len())];
        let v = rng.gen_range(1..spec.order());
        let cur = e.code(r, c);
        e.set_code(r, c, spec.add(cur, v));
        budget -= c - r + 1;
        if rng.gen_bool(0.5) {
            break;
        }
    }
    debug_assert!(flag_rank(&e) <= max_weight);
    e
}

impl Simulation {
    pub fn new(topology: Topology, code: FlagRankCode) -> Result<Self> {
        let table = SyndromeTable::build(&code)?;
        Ok(Self { topology, code, table })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn code(&self) -> &FlagRankCode {
        &self.code
    }

    pub fn table(&self) -> &SyndromeTable {
        &self.table
    }

    /// One transmission of `sent`, driven by `rng`.
    pub fn run_trial_with<R: Rng + ?Sized>(
        &self,
        index: u64,
        sent: &UpperTriangular,
        injection: &Injection,
        rng: &mut R,
    ) -> Result<TrialOutcome> {
        let spec = self.code.spec();
        let n = self.code.n();
        if !self.code.contains(sent)? {
            return Err(domain("sent matrix is not a codeword"));
        }
        let topo = &self.topology;
        let mut inboxes = vec![Inbox::new(n); topo.nodes.len()];
        let mut ops = vec![OpTally::new(n); topo.nodes.len()];
        let (mut delivered, mut erased, mut corrupted) = (0, 0, 0);

        for &v in &topo.order {
            let out_edges = topo.edges.iter().filter(|e| e.from == v);
            for edge in out_edges {
                let packets = match topo.nodes[v].role {
                    Role::Source => source_emit(sent),
                    Role::Relay => {
                        let coeffs = Coefficients::random(spec, &inboxes[v], rng);
                        node_combine(spec, &inboxes[v], &coeffs, &mut ops[v])
                    }
                    Role::Sink => unreachable!("sinks have no outgoing edges"),
                };
                for mut p in packets {
                    if edge.erasure.sample(rng) {
                        erased += 1;
                        continue;
                    }
                    if edge.corruption.sample(rng) {
                        p.payload = (0..=n).map(|_| rng.gen_range(0..spec.order())).collect();
                        corrupted += 1;
                    }
                    delivered += 1;
                    inboxes[edge.to].push(p)?;
                }
            }
        }

        let sent_flag = flag_from_matrix(sent);
        let preserves = topo.preserves_flag();
        let mut sinks = Vec::new();
        for (v, node) in topo.nodes.iter().enumerate() {
            if node.role != Role::Sink {
                continue;
            }
            let received = receiver_reconstruct(spec, &inboxes[v]);
            let chain_ok = chain_holds(&received);
            let flag_preserved = preserves.then(|| received.as_slice() == sent_flag.spaces());
            let (outcome, extracted, decoded, distance) = match matrix_from_spaces(&received) {
                Err(_) => (Outcome::CellFailure, None, None, None),
                Ok(a) => {
                    let a = match &injection.matrix_error {
                        Some(e) => a.add(e)?,
                        None => a,
                    };
                    let c = self.table.decode(&a)?;
                    let d = flag_rank(&a.sub(&c)?);
                    let outcome = if &c == sent { Outcome::Success } else { Outcome::Miscorrection };
                    (outcome, Some(a), Some(c), Some(d))
                }
            };
            sinks.push(SinkResult { node: v, outcome, received, extracted, decoded, distance, chain_ok, flag_preserved });
        }
        let outcome = if sinks.iter().any(|s| s.outcome == Outcome::Miscorrection) {
            Outcome::Miscorrection
        } else if sinks.iter().any(|s| s.outcome == Outcome::CellFailure) {
            Outcome::CellFailure
        } else {
            Outcome::Success
        };
        Ok(TrialOutcome { index, sent: sent.clone(), outcome, sinks, ops, delivered, erased, corrupted })
    }

    /// One trial with its own stream: draws a uniform codeword, then the optional
    /// injected error, then runs the network.
    pub fn run_trial(&self, seed: u64, index: u64, config: &CampaignConfig) -> Result<TrialOutcome> {
        let mut rng = trial_rng(seed, index);
        let msg = rng.gen_range(0..self.code.size());
        let sent = self.code.codeword(msg)?;
        let injection = Injection {
            matrix_error: config
                .inject_weight
                .map(|w| random_error(self.code.spec(), self.code.n(), w, &mut rng)),
        };
        self.run_trial_with(index, &sent, &injection, &mut rng)
    }

    /// Runs `trials` independent trials (in parallel) and aggregates them in index order.
    pub fn run_campaign(&self, trials: u64, seed: u64, config: &CampaignConfig) -> Result<SimReport> {
        if trials == 0 {
            return Err(domain("a campaign needs at least one trial"));
        }
        let outcomes = (0..trials)
            .into_par_iter()
            .map(|t| self.run_trial(seed, t, config))
            .collect::<Result<Vec<_>>>()?;
        Ok(SimReport::aggregate(self, seed, config, &outcomes))
    }
}

/// One row of the per-trial table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRow {
    pub index: u64,
    pub outcome: Outcome,
    pub sent: String,
    pub decoded: String,
    pub distance: Option<usize>,
    pub delivered: usize,
    pub erased: usize,
    pub corrupted: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeOps {
    pub name: String,
    pub tally: OpTally,
}

/// Aggregated campaign result. Deterministic in its inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimReport {
    pub seed: u64,
    pub trials: u64,
    pub field: String,
    pub n: usize,
    pub code_dim: usize,
    pub inject_weight: Option<usize>,
    pub successes: u64,
    pub cell_failures: u64,
    pub miscorrections: u64,
    /// Trials where a sink saw a broken chain or a lossless path altered the flag.
    pub invariant_violations: u64,
    pub op_counts: Vec<NodeOps>,
    /// `i(n+1) - i(i+1)/2` for `i = 1..=n`.
    pub op_count_expected: Vec<u64>,
    /// `i(n+1)` for `i = 1..=n`.
    pub baseline_expected: Vec<u64>,
    pub rows: Vec<TrialRow>,
}

impl SimReport {
    fn aggregate(sim: &Simulation, seed: u64, config: &CampaignConfig, outcomes: &[TrialOutcome]) -> Self {
        let n = sim.code.n();
        let nodes = sim.topology.nodes();
        let mut op_counts: Vec<NodeOps> = nodes
            .iter()
            .map(|nd| NodeOps { name: nd.name.clone(), tally: OpTally::new(n) })
            .collect();
        let (mut successes, mut cell_failures, mut miscorrections, mut violations) = (0, 0, 0, 0);
        let mut rows = Vec::with_capacity(outcomes.len());
        for t in outcomes {
            match t.outcome {
                Outcome::Success => successes += 1,
                Outcome::CellFailure => cell_failures += 1,
                Outcome::Miscorrection => miscorrections += 1,
            }
            if t.sinks.iter().any(|s| !s.chain_ok || s.flag_preserved == Some(false)) {
                violations += 1;
            }
            for (acc, tally) in op_counts.iter_mut().zip(&t.ops) {
                acc.tally.absorb(tally);
            }
            let first = &t.sinks[0];
            rows.push(TrialRow {
                index: t.index,
                outcome: t.outcome,
                sent: t.sent.to_string(),
                decoded: first.decoded.as_ref().map_or_else(String::new, ToString::to_string),
                distance: first.distance,
                delivered: t.delivered,
                erased: t.erased,
                corrupted: t.corrupted,
            });
        }
        op_counts.retain(|o| nodes.iter().any(|nd| nd.name == o.name && nd.role == Role::Relay));
        Self {
            seed,
            trials: outcomes.len() as u64,
            field: sim.code.spec().to_string(),
            n,
            code_dim: sim.code.dim(),
            inject_weight: config.inject_weight,
            successes,
            cell_failures,
            miscorrections,
            invariant_violations: violations,
            op_counts,
            op_count_expected: (1..=n).map(|i| expected_projected_ops(n, i)).collect(),
            baseline_expected: (1..=n).map(|i| expected_baseline_ops(n, i)).collect(),
            rows,
        }
    }

    pub fn failures(&self) -> u64 {
        self.cell_failures + self.miscorrections
    }

    /// Whether every relay's totals equal `combinations` times the closed-form
    /// per-step counts. Holds when each relay receives exactly one vector per
    /// sequence number in every trial, e.g. on a lossless line.
    pub fn ops_match_closed_form(&self) -> bool {
        self.op_counts.iter().all(|node| {
            let c = node.tally.combinations;
            (0..self.n).all(|i| {
                node.tally.projected[i] == c * self.op_count_expected[i]
                    && node.tally.baseline[i] == c * self.baseline_expected[i]
            })
        })
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "flagcode simulation report");
        let _ = writeln!(s, "field: {}", self.field);
        let _ = writeln!(s, "n: {}", self.n);
        let _ = writeln!(s, "code dimension: {}", self.code_dim);
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(s, "trials: {}", self.trials);
        if let Some(w) = self.inject_weight {
            let _ = writeln!(s, "injected extracted-matrix error: flag rank <= {w}");
        }
        let _ = writeln!(s, "successes: {}", self.successes);
        let _ = writeln!(s, "cell failures: {}", self.cell_failures);
        let _ = writeln!(s, "miscorrections: {}", self.miscorrections);
        let _ = writeln!(s, "invariant violations: {}", self.invariant_violations);
        let _ = writeln!(s, "multiply-adds per step i = 1..n (projected / baseline):");
        let _ = writeln!(
            s,
            "  closed form per combination: {} / {}",
            join(&self.op_count_expected),
            join(&self.baseline_expected)
        );
        for node in &self.op_counts {
            let _ = writeln!(
                s,
                "  {} totals over {} combinations: {} / {}",
                node.name,
                node.tally.combinations,
                join(&node.tally.projected),
                join(&node.tally.baseline)
            );
        }
        s
    }

    /// Machine-readable table, one row per trial, then one row per relay and step.
    pub fn to_table(&self) -> String {
        let mut s = String::from("kind,trial,outcome,distance,delivered,erased,corrupted,sent,decoded\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "trial,{},{},{},{},{},{},\"{}\",\"{}\"",
                r.index,
                r.outcome,
                r.distance.map_or_else(String::new, |d| d.to_string()),
                r.delivered,
                r.erased,
                r.corrupted,
                r.sent,
                r.decoded
            );
        }
        s.push_str("kind,node,step,combinations,projected,baseline,expected_projected,expected_baseline\n");
        for node in &self.op_counts {
            for i in 0..self.n {
                let _ = writeln!(
                    s,
                    "ops,{},{},{},{},{},{},{}",
                    node.name,
                    i + 1,
                    node.tally.combinations,
                    node.tally.projected[i],
                    node.tally.baseline[i],
                    self.op_count_expected[i],
                    self.baseline_expected[i]
                );
            }
        }
        s
    }
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}
