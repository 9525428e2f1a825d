//! Flag rank metric codes: linear subspaces of `U^n(K)` measured by flag rank.
//!
//! Besides the code type itself this module provides the trace-form dual,
//! syndromes, the coset-leader table used for syndrome decoding, an exhaustive
//! nearest-codeword oracle, and the maximum-distance construction that places
//! the regular representation of a degree-`k` extension field in the upper
//! right `k x k` block.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::flags::{flag_rank, packed_len, UpperTriangular};
use crate::gf::{poly, FieldElement, FieldSpec};
use crate::linalg::MatrixF;

/// Largest number of elements any enumeration in this module will visit.
pub const ENUMERATION_BUDGET: u128 = 1 << 24;

fn count(q: u32, exp: usize) -> u128 {
    u128::from(q).checked_pow(exp as u32).unwrap_or(u128::MAX)
}

fn check_budget(required: u128) -> Result<()> {
    if required > ENUMERATION_BUDGET {
        Err(Error::Budget { required, limit: ENUMERATION_BUDGET })
    } else {
        Ok(())
    }
}

/// A `K`-linear code in `U^n(K)`, stored by a basis.
#[derive(Debug)]
pub struct FlagRankCode {
    spec: FieldSpec,
    n: usize,
    basis: Vec<UpperTriangular>,
    dual_basis: OnceLock<Vec<UpperTriangular>>,
    min_distance: OnceLock<usize>,
}

impl Clone for FlagRankCode {
    fn clone(&self) -> Self {
        Self {
            spec: self.spec.clone(),
            n: self.n,
            basis: self.basis.clone(),
            dual_basis: self.dual_basis.clone(),
            min_distance: self.min_distance.clone(),
        }
    }
}

impl PartialEq for FlagRankCode {
    /// Equality of codes as subspaces.
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
            && self.n == other.n
            && self.dim() == other.dim()
            && other.basis.iter().all(|b| self.contains(b).unwrap_or(false))
    }
}

impl FlagRankCode {
    /// Code spanned by `basis`, which must be linearly independent.
    pub fn new(spec: &FieldSpec, n: usize, basis: Vec<UpperTriangular>) -> Result<Self> {
        for b in &basis {
            spec.ensure_same(b.spec())?;
            if b.n() != n {
                return Err(domain(format!("basis matrix of size {} in a code with n = {n}", b.n())));
            }
        }
        let code = Self {
            spec: spec.clone(),
            n,
            basis,
            dual_basis: OnceLock::new(),
            min_distance: OnceLock::new(),
        };
        if code.generator_matrix().rank() != code.basis.len() {
            return Err(domain("basis matrices are linearly dependent"));
        }
        Ok(code)
    }

    /// Code spanned by arbitrary generators; dependent generators are dropped
    /// and the basis is put in reduced echelon form.
    pub fn from_generators(spec: &FieldSpec, n: usize, gens: &[UpperTriangular]) -> Result<Self> {
        let len = packed_len(n);
        let mut data = Vec::with_capacity(gens.len() * len);
        for g in gens {
            spec.ensure_same(g.spec())?;
            if g.n() != n {
                return Err(domain("generator of the wrong size"));
            }
            data.extend_from_slice(g.packed());
        }
        let (r, rank) = MatrixF::from_codes(spec, gens.len(), len, data)?.rref();
        let basis = (0..rank)
            .map(|i| UpperTriangular::from_packed(spec, n, r.row(i).to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec, n, basis)
    }

    /// The whole space `U^n(K)`.
    pub fn full_space(spec: &FieldSpec, n: usize) -> Self {
        let len = packed_len(n);
        let basis = (0..len)
            .map(|k| {
                let mut e = vec![0; len];
                e[k] = 1;
                UpperTriangular::from_packed(spec, n, e).expect("unit vector")
            })
            .collect();
        Self::new(spec, n, basis).expect("unit vectors are independent")
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[UpperTriangular] {
        &self.basis
    }

    /// Number of codewords, saturating.
    pub fn size(&self) -> u128 {
        count(self.spec.order(), self.dim())
    }

    /// Rows are the packed basis matrices.
    pub fn generator_matrix(&self) -> MatrixF {
        let len = packed_len(self.n);
        let data = self.basis.iter().flat_map(|b| b.packed().iter().copied()).collect();
        MatrixF::from_codes(&self.spec, self.basis.len(), len, data).expect("shape")
    }

    /// `Σ_i m_i B_i` for a message of `dim` field elements.
    pub fn encode(&self, message: &[FieldElement]) -> Result<UpperTriangular> {
        if message.len() != self.dim() {
            return Err(domain(format!("message of length {} for a code of dimension {}", message.len(), self.dim())));
        }
        let mut out = UpperTriangular::zero(&self.spec, self.n);
        for (m, b) in message.iter().zip(&self.basis) {
            self.spec.ensure_same(m.spec())?;
            out.add_scaled(m.code(), b);
        }
        Ok(out)
    }

    /// Codeword whose message is the base-`q` expansion of `index`, coefficient
    /// of the first basis element most significant.
    pub fn codeword(&self, index: u128) -> Result<UpperTriangular> {
        if index >= self.size() {
            return Err(domain(format!("message index {index} out of range (code has {} words)", self.size())));
        }
        Ok(self.codeword_unchecked(index))
    }

    fn codeword_unchecked(&self, mut index: u128) -> UpperTriangular {
        let q = u128::from(self.spec.order());
        let mut out = UpperTriangular::zero(&self.spec, self.n);
        for b in self.basis.iter().rev() {
            let digit = (index % q) as u32;
            index /= q;
            if digit != 0 {
                out.add_scaled(digit, b);
            }
        }
        out
    }

    /// All codewords in message-index order. Fails beyond the enumeration budget.
    pub fn codewords(&self) -> Result<impl Iterator<Item = UpperTriangular> + '_> {
        check_budget(self.size())?;
        Ok((0..self.size()).map(move |i| self.codeword_unchecked(i)))
    }

    /// Basis of the dual code under the trace form, computed once.
    pub fn dual_basis(&self) -> &[UpperTriangular] {
        self.dual_basis.get_or_init(|| {
            let len = packed_len(self.n);
            let kernel = if self.basis.is_empty() {
                MatrixF::identity(&self.spec, len)
            } else {
                self.generator_matrix().kernel()
            };
            (0..kernel.rows())
                .map(|r| UpperTriangular::from_packed(&self.spec, self.n, kernel.row(r).to_vec()).expect("shape"))
                .collect()
        })
    }

    pub fn dual(&self) -> FlagRankCode {
        FlagRankCode::new(&self.spec, self.n, self.dual_basis().to_vec()).expect("kernel basis is independent")
    }

    /// Membership via the syndrome against the dual basis.
    pub fn contains(&self, a: &UpperTriangular) -> Result<bool> {
        Ok(syndrome_codes(a, self.dual_basis())?.iter().all(|&c| c == 0))
    }

    /// Minimum flag rank over nonzero codewords, by enumeration.
    pub fn min_distance(&self) -> Result<usize> {
        if let Some(&d) = self.min_distance.get() {
            return Ok(d);
        }
        if self.dim() == 0 {
            return Err(domain("the zero code has no minimum distance"));
        }
        check_budget(self.size())?;
        let d = (1..self.size())
            .into_par_iter()
            .map(|i| flag_rank(&self.codeword_unchecked(i)))
            .min()
            .expect("nonzero codewords exist");
        Ok(*self.min_distance.get_or_init(|| d))
    }

    /// Number of codewords of each flag rank, index = flag rank.
    pub fn weight_distribution(&self) -> Result<Vec<u128>> {
        let mut dist = vec![0u128; crate::flags::d_max(self.n + 1) + 1];
        for c in self.codewords()? {
            dist[flag_rank(&c)] += 1;
        }
        Ok(dist)
    }
}

/// The trace form `A·B = trace(A Bᵀ) = Σ_{i<=j} A_ij B_ij`.
pub fn trace_pairing(a: &UpperTriangular, b: &UpperTriangular) -> Result<FieldElement> {
    check_same_shape(a, b)?;
    a.spec().element(pairing_code(a, b))
}

fn check_same_shape(a: &UpperTriangular, b: &UpperTriangular) -> Result<()> {
    a.spec().ensure_same(b.spec())?;
    if a.n() != b.n() {
        return Err(domain(format!("matrix sizes {} and {} differ", a.n(), b.n())));
    }
    Ok(())
}

fn pairing_code(a: &UpperTriangular, b: &UpperTriangular) -> u32 {
    let spec = a.spec();
    a.packed().iter().zip(b.packed()).fold(0, |acc, (&x, &y)| spec.mul_add(acc, x, y))
}

/// `(Δ_1·A, ..., Δ_ℓ·A)` for a dual basis `(Δ_1, ..., Δ_ℓ)`.
pub fn syndrome(a: &UpperTriangular, dual_basis: &[UpperTriangular]) -> Result<Vec<FieldElement>> {
    syndrome_codes(a, dual_basis)?
        .into_iter()
        .map(|c| a.spec().element(c))
        .collect()
}

fn syndrome_codes(a: &UpperTriangular, dual_basis: &[UpperTriangular]) -> Result<Vec<u32>> {
    dual_basis
        .iter()
        .map(|d| {
            check_same_shape(a, d)?;
            Ok(pairing_code(d, a))
        })
        .collect()
}

/// A minimal coset leader and its flag rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leader {
    pub matrix: UpperTriangular,
    pub weight: usize,
}

/// Coset leaders for every line `<f>` of syndromes, keyed by the
/// representative whose first nonzero coordinate is 1.
#[derive(Clone, Debug)]
pub struct SyndromeTable {
    spec: FieldSpec,
    n: usize,
    dual_basis: Vec<UpperTriangular>,
    leaders: BTreeMap<Vec<u32>, Leader>,
}

/// Scales a nonzero vector so its first nonzero entry is 1; returns the
/// normalised vector and the scalar `a` with `v = a · normalised`.
fn normalize(spec: &FieldSpec, v: &[u32]) -> Option<(Vec<u32>, u32)> {
    let a = *v.iter().find(|&&c| c != 0)?;
    let inv = spec.inv(a).expect("nonzero");
    Some((v.iter().map(|&c| spec.mul(c, inv)).collect(), a))
}

impl SyndromeTable {
    /// Computes the dual basis and, by one pass over `U^n(K)` in lexicographic
    /// order, the lexicographically smallest minimum-weight member of every
    /// coset with a normalised syndrome.
    pub fn build(code: &FlagRankCode) -> Result<Self> {
        let spec = code.spec().clone();
        let n = code.n();
        let dual_basis = code.dual_basis().to_vec();
        let mut leaders = BTreeMap::new();
        if !dual_basis.is_empty() {
            let total = count(spec.order(), packed_len(n));
            check_budget(total)?;
            let chunk = 1u128 << 12;
            let chunks = total.div_ceil(chunk);
            let partial: Vec<BTreeMap<Vec<u32>, Leader>> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut local: BTreeMap<Vec<u32>, Leader> = BTreeMap::new();
                    for idx in c * chunk..((c + 1) * chunk).min(total) {
                        let a = UpperTriangular::from_index(&spec, n, idx);
                        let syn = syndrome_codes(&a, &dual_basis).expect("shapes agree");
                        match syn.iter().find(|&&x| x != 0) {
                            Some(&1) => {}
                            _ => continue,
                        }
                        let weight = flag_rank(&a);
                        // Indices increase, so the first minimum seen is lexicographically smallest.
                        let better = local.get(&syn).is_none_or(|l| weight < l.weight);
                        if better {
                            local.insert(syn, Leader { matrix: a, weight });
                        }
                    }
                    local
                })
                .collect();
            // Chunks are in index order; the tie-break is reapplied while merging.
            for part in partial {
                for (key, cand) in part {
                    match leaders.get(&key) {
                        Some(Leader { weight, .. }) if *weight <= cand.weight => {}
                        _ => {
                            leaders.insert(key, cand);
                        }
                    }
                }
            }
        }
        Ok(Self { spec, n, dual_basis, leaders })
    }

    pub fn dual_basis(&self) -> &[UpperTriangular] {
        &self.dual_basis
    }

    /// Number of stored lines.
    pub fn len(&self) -> usize {
        self.leaders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaders.is_empty()
    }

    /// Stored `(normalised syndrome, leader)` pairs in key order.
    pub fn leaders(&self) -> impl Iterator<Item = (&[u32], &Leader)> {
        self.leaders.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Largest leader weight: every word is within this flag rank of the code.
    pub fn covering_radius(&self) -> usize {
        self.leaders.values().map(|l| l.weight).max().unwrap_or(0)
    }

    /// Leader for an arbitrary syndrome `g = a f`, i.e. `a A_f`.
    pub fn leader_for(&self, syndrome: &[u32]) -> Option<UpperTriangular> {
        let (key, a) = normalize(&self.spec, syndrome)?;
        self.leaders.get(&key).map(|l| l.matrix.scale_code(a))
    }

    /// Returns a codeword nearest to `a` in flag rank.
    pub fn decode(&self, a: &UpperTriangular) -> Result<UpperTriangular> {
        self.spec.ensure_same(a.spec())?;
        if a.n() != self.n {
            return Err(domain(format!("received matrix of size {}, code has n = {}", a.n(), self.n)));
        }
        let g = syndrome_codes(a, &self.dual_basis)?;
        match self.leader_for(&g) {
            None => Ok(a.clone()),
            Some(err) => a.sub(&err),
        }
    }
}

/// Brute-force nearest codeword. Ties go to the lexicographically smallest
/// codeword in packed-entry order.
pub fn exhaustive_nearest(code: &FlagRankCode, a: &UpperTriangular) -> Result<(UpperTriangular, usize)> {
    code.spec().ensure_same(a.spec())?;
    if a.n() != code.n() {
        return Err(domain("received matrix has the wrong size"));
    }
    let mut best: Option<(usize, UpperTriangular)> = None;
    for c in code.codewords()? {
        let d = flag_rank(&a.sub(&c)?);
        let take = match &best {
            None => true,
            Some((bd, bc)) => d < *bd || (d == *bd && c.packed() < bc.packed()),
        };
        if take {
            best = Some((d, c));
        }
    }
    let (d, c) = best.expect("every code contains zero");
    Ok((c, d))
}

/// Companion matrix of a monic polynomial `g` of degree `k` over `spec`: the
/// matrix of multiplication by `y` on `K[y]/(g)` in the basis `1, y, ..., y^{k-1}`.
fn companion(spec: &FieldSpec, g: &[u32]) -> MatrixF {
    let k = g.len() - 1;
    let mut c = MatrixF::zeros(spec, k, k);
    for r in 0..k.saturating_sub(1) {
        c.set_code(r, r + 1, 1);
    }
    for col in 0..k {
        c.set_code(k - 1, col, spec.neg(g[col]));
    }
    c
}

/// Maximum-distance code: `{ (0 ρ(f); 0 0) : f ∈ F }` with `[F:K] = k = ⌊(n+1)/2⌋`
/// and the `k x k` block in rows `1..=k`, columns `n+1-k..=n`.
///
/// Minimum distance is `k^2` when `n+1 = 2k` and `k(k+1)` when `n+1 = 2k+1`.
pub fn build_max_distance_code(spec: &FieldSpec, n: usize) -> Result<FlagRankCode> {
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let k = (n + 1) / 2;
    let g = poly::smallest_irreducible(spec, k);
    let c = companion(spec, &g);
    let mut power = MatrixF::identity(spec, k);
    let mut basis = Vec::with_capacity(k);
    for _ in 0..k {
        let mut delta = UpperTriangular::zero(spec, n);
        for r in 0..k {
            for col in 0..k {
                delta.set_code(r, n - k + col, power.code(r, col));
            }
        }
        basis.push(delta);
        power = power.matmul(&c)?;
    }
    FlagRankCode::new(spec, n, basis)
}

/// Random code of the given dimension: uniformly drawn generator rows,
/// redrawn until independent, then reduced to echelon form.
pub fn random_code<R: Rng + ?Sized>(spec: &FieldSpec, n: usize, dim: usize, rng: &mut R) -> Result<FlagRankCode> {
    let len = packed_len(n);
    if dim > len {
        return Err(domain(format!("dimension {dim} exceeds dim U^{n} = {len}")));
    }
    loop {
        let data: Vec<u32> = (0..dim * len).map(|_| rng.gen_range(0..spec.order())).collect();
        let m = MatrixF::from_codes(spec, dim, len, data)?;
        if m.rank() == dim {
            let gens = (0..dim)
                .map(|r| UpperTriangular::from_packed(spec, n, m.row(r).to_vec()))
                .collect::<Result<Vec<_>>>()?;
            return FlagRankCode::from_generators(spec, n, &gens);
        }
    }
}

/// Basis matrices of the four-dimensional example code over `GF(3)` with `n = 4`.
pub const EXAMPLE_T_BASIS: [[[u32; 4]; 4]; 4] = [
    [[1, 0, 1, 1], [0, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 0]],
    [[0, 2, 1, 0], [0, 2, 2, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
    [[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]],
    [[0, 0, 0, 1], [0, 0, 2, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
];

/// The four-dimensional example code over `GF(3)`, `n = 4`, minimum distance 5.
pub fn example_t_code() -> FlagRankCode {
    let spec = FieldSpec::prime(3).expect("3 is prime");
    let basis = EXAMPLE_T_BASIS
        .iter()
        .map(|rows| {
            let data = rows.iter().flatten().copied().collect();
            UpperTriangular::from_matrix(&MatrixF::from_codes(&spec, 4, 4, data).expect("4x4"))
                .expect("upper triangular")
        })
        .collect();
    FlagRankCode::new(&spec, 4, basis).expect("independent basis")
}

/// The six-dimensional pattern space of `U^4(K)` supported on positions
/// (1,1), (1,2), (2,2), (3,3), (3,4), (4,4). Every matrix in it has flag rank at most 4.
pub fn block_diagonal_pattern(spec: &FieldSpec) -> FlagRankCode {
    let gens = [(0, 0), (0, 1), (1, 1), (2, 2), (2, 3), (3, 3)]
        .into_iter()
        .map(|(i, j)| {
            let mut d = UpperTriangular::zero(spec, 4);
            d.set_code(i, j, 1);
            d
        })
        .collect();
    FlagRankCode::new(spec, 4, gens).expect("unit matrices")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flags::d_max;
    use crate::gf::regular_representation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    #[test]
    fn example_t_parameters() {
        let t = example_t_code();
        assert_eq!(t.dim(), 4);
        assert_eq!(t.size(), 81);
        assert_eq!(t.min_distance().unwrap(), 5);
        assert_eq!(t.dual().dim(), 6);
        assert!(t.min_distance().unwrap() <= d_max(5));
    }

    #[test]
    fn zero_code_has_no_min_distance() {
        let z = FlagRankCode::new(&f2(), 3, vec![]).unwrap();
        assert!(z.min_distance().is_err());
        assert_eq!(z.dual(), FlagRankCode::full_space(&f2(), 3));
    }

    #[test]
    fn dependent_basis_rejected() {
        let t = example_t_code();
        let mut b = t.basis().to_vec();
        b.push(b[0].add(&b[1]).unwrap());
        assert!(FlagRankCode::new(t.spec(), 4, b).is_err());
    }

    #[test]
    fn max_distance_constructions() {
        let even = build_max_distance_code(&f2(), 3).unwrap();
        assert_eq!((even.dim(), even.min_distance().unwrap()), (2, 4));
        let odd = build_max_distance_code(&f2(), 4).unwrap();
        assert_eq!((odd.dim(), odd.min_distance().unwrap()), (2, 6));
        assert!(even.contains(&UpperTriangular::zero(&f2(), 3)).unwrap());
        for (q, n) in [(3, 3), (3, 4), (4, 3), (2, 5), (2, 1), (2, 2), (5, 2)] {
            let spec = FieldSpec::of_order(q).unwrap();
            let c = build_max_distance_code(&spec, n).unwrap();
            assert_eq!(c.dim(), (n + 1) / 2);
            assert_eq!(c.min_distance().unwrap(), d_max(n + 1), "q={q} n={n}");
        }
    }

    #[test]
    fn companion_agrees_with_regular_representation() {
        let ext = FieldSpec::extension(2, 3).unwrap();
        let x = ext.from_coefficients(&[0, 1]).unwrap();
        let rho = regular_representation(&x, &f2()).unwrap();
        assert_eq!(companion(&f2(), ext.modulus().unwrap()), rho);
    }

    #[test]
    fn trace_pairing_examples() {
        let s = f2();
        let mut e11 = UpperTriangular::zero(&s, 3);
        e11.set_code(0, 0, 1);
        let mut e23 = UpperTriangular::zero(&s, 3);
        e23.set_code(1, 2, 1);
        assert_eq!(trace_pairing(&e11, &e11).unwrap().code(), 1);
        assert_eq!(trace_pairing(&e11, &e23).unwrap().code(), 0);
        let t = example_t_code();
        // Entrywise over the packed entries: (0+0+1+0) + (2+0+0) + (1+0) + 0 = 4 ≡ 1 (mod 3).
        assert_eq!(trace_pairing(&t.basis()[0], &t.basis()[1]).unwrap().code(), 1);
        assert!(trace_pairing(&e11, &UpperTriangular::zero(&s, 2)).is_err());
    }

    #[test]
    fn syndromes() {
        let t = example_t_code();
        let dual = t.dual_basis();
        for c in t.codewords().unwrap() {
            assert!(syndrome(&c, dual).unwrap().iter().all(FieldElement::is_zero));
        }
        let mut e = UpperTriangular::zero(t.spec(), 4);
        e.set_code(0, 0, 1);
        let s1 = syndrome(&e, dual).unwrap();
        let two = t.spec().element(2).unwrap();
        let s2 = syndrome(&e.scale(&two).unwrap(), dual).unwrap();
        for (a, b) in s1.iter().zip(&s2) {
            assert_eq!(a.mul(&two).unwrap(), *b);
        }
        assert!(!t.contains(&e).unwrap());
    }

    #[test]
    fn duality_random_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..200 {
            let q = if trial % 2 == 0 { 2 } else { 3 };
            let spec = FieldSpec::prime(q).unwrap();
            let n = 1 + trial % 4;
            let len = packed_len(n);
            let dim = rng.gen_range(0..=len);
            let c = random_code(&spec, n, dim, &mut rng).unwrap();
            let d = c.dual();
            assert_eq!(c.dim() + d.dim(), len);
            assert_eq!(d.dual(), c);
            for a in c.basis() {
                for b in d.basis() {
                    assert!(trace_pairing(a, b).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn table_sizes() {
        let full = FlagRankCode::full_space(&f2(), 3);
        let table = SyndromeTable::build(&full).unwrap();
        assert!(table.is_empty());
        let a = UpperTriangular::from_index(&f2(), 3, 37);
        assert_eq!(table.decode(&a).unwrap(), a);

        let even = build_max_distance_code(&f2(), 3).unwrap();
        let table = SyndromeTable::build(&even).unwrap();
        assert_eq!(table.len(), 15);
        assert_eq!(table.dual_basis().len(), 4);
    }

    /// Leader invariants by brute force over each coset.
    #[test]
    fn leaders_are_minimal_and_lexicographically_first() {
        let t = example_t_code();
        let table = SyndromeTable::build(&t).unwrap();
        assert_eq!(table.len(), (3usize.pow(6) - 1) / 2);
        let mut best: BTreeMap<Vec<u32>, (usize, Vec<u32>)> = BTreeMap::new();
        for idx in 0..3u128.pow(10) {
            let a = UpperTriangular::from_index(t.spec(), 4, idx);
            let syn = syndrome_codes(&a, table.dual_basis()).unwrap();
            if syn.iter().all(|&x| x == 0) {
                continue;
            }
            let key = (flag_rank(&a), a.packed().to_vec());
            let e = best.entry(syn).or_insert(key.clone());
            if key < *e {
                *e = key;
            }
        }
        for (key, leader) in table.leaders() {
            let (w, packed) = &best[key];
            assert_eq!(leader.weight, *w);
            assert_eq!(leader.matrix.packed(), packed.as_slice());
            assert_eq!(syndrome_codes(&leader.matrix, table.dual_basis()).unwrap(), key);
        }
        // Minimum distance 5 gives unique decoding radius 2, so weight <= 2 errors are leaders.
        assert!(table.covering_radius() >= 2);
    }

    #[test]
    fn decode_matches_oracle_exhaustively_small() {
        let even = build_max_distance_code(&f2(), 3).unwrap();
        let table = SyndromeTable::build(&even).unwrap();
        for idx in 0..64 {
            let a = UpperTriangular::from_index(&f2(), 3, idx);
            let c = table.decode(&a).unwrap();
            assert!(even.contains(&c).unwrap());
            let (_, d) = exhaustive_nearest(&even, &a).unwrap();
            assert_eq!(flag_rank(&a.sub(&c).unwrap()), d);
            assert!(d <= table.covering_radius());
        }
        for c in even.codewords().unwrap() {
            assert_eq!(table.decode(&c).unwrap(), c);
            assert_eq!(exhaustive_nearest(&even, &c).unwrap(), (c.clone(), 0));
        }
    }

    #[test]
    fn unique_decoding_within_radius() {
        let t = example_t_code();
        let table = SyndromeTable::build(&t).unwrap();
        let radius = (t.min_distance().unwrap() - 1) / 2;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut tested = 0;
        while tested < 300 {
            let e = UpperTriangular::from_index(t.spec(), 4, rng.gen_range(0..3u128.pow(10)));
            if flag_rank(&e) > radius {
                continue;
            }
            let c = t.codeword(rng.gen_range(0..81)).unwrap();
            let received = c.add(&e).unwrap();
            assert_eq!(table.decode(&received).unwrap(), c);
            assert_eq!(exhaustive_nearest(&t, &received).unwrap().0, c);
            tested += 1;
        }
    }

    #[test]
    fn budget_is_enforced() {
        // 3^21 words in U^6(F_3).
        let big = FlagRankCode::full_space(&FieldSpec::prime(3).unwrap(), 6);
        assert!(matches!(big.min_distance(), Err(Error::Budget { .. })));
        let small = FlagRankCode::new(big.spec(), 6, vec![big.basis()[0].clone()]).unwrap();
        assert!(matches!(SyndromeTable::build(&small), Err(Error::Budget { .. })));
    }

    #[test]
    fn pattern_space_max_flag_rank() {
        let spec = FieldSpec::prime(3).unwrap();
        let d = block_diagonal_pattern(&spec);
        let max = d.codewords().unwrap().map(|c| flag_rank(&c)).max().unwrap();
        assert_eq!(max, 4);
    }
}
