//! Degenerate flags in `V = K^{n+1}` and their parametrisation by upper
//! triangular matrices.
//!
//! A tuple `(V_1, ..., V_n)` with `dim V_i = i` is a degenerate flag when
//! zeroing coordinate `i+1` maps `V_i` into `V_{i+1}`. The big cell consists of
//! the degenerate flags whose members all have RREF shape `(I_i | A_i)`; it is
//! in bijection with `n x n` upper triangular matrices via the corner slices
//! `Δ_[i]`, and the sum of Grassmann distances becomes the flag rank metric.
//!
//! Indices in the public API follow the mathematical convention (1-based)
//! where they name coordinates or flag positions; matrix storage is 0-based.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::gf::{FieldElement, FieldSpec};
use crate::linalg::{MatrixF, Subspace};

/// An `n x n` upper triangular matrix, stored as its `n(n+1)/2` entries
/// `Δ_{ij}` (`i <= j`) in row-major packed order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UpperTriangular {
    spec: FieldSpec,
    n: usize,
    entries: Vec<u32>,
}

/// Number of entries of an `n x n` upper triangular matrix.
pub fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

impl UpperTriangular {
    pub fn zero(spec: &FieldSpec, n: usize) -> Self {
        Self { spec: spec.clone(), n, entries: vec![0; packed_len(n)] }
    }

    pub fn from_packed(spec: &FieldSpec, n: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != packed_len(n) {
            return Err(domain(format!(
                "{} packed entries given, {n}x{n} upper triangular needs {}",
                entries.len(),
                packed_len(n)
            )));
        }
        if let Some(bad) = entries.iter().find(|&&c| c >= spec.order()) {
            return Err(domain(format!("entry {bad} is not an element of {spec}")));
        }
        Ok(Self { spec: spec.clone(), n, entries })
    }

    /// From a square matrix; entries strictly below the diagonal must vanish.
    pub fn from_matrix(m: &MatrixF) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(domain(format!("{}x{} matrix is not square", m.rows(), m.cols())));
        }
        let n = m.rows();
        let mut entries = Vec::with_capacity(packed_len(n));
        for i in 0..n {
            for j in 0..n {
                if j < i {
                    if m.code(i, j) != 0 {
                        return Err(domain(format!(
                            "entry ({}, {}) below the diagonal is nonzero",
                            i + 1,
                            j + 1
                        )));
                    }
                } else {
                    entries.push(m.code(i, j));
                }
            }
        }
        Ok(Self { spec: m.spec().clone(), n, entries })
    }

    /// The element of `U^n(K)` whose packed entries are the base-`q` digits of
    /// `index`, first entry most significant. Index order is lexicographic order.
    pub fn from_index(spec: &FieldSpec, n: usize, mut index: u128) -> Self {
        let q = u128::from(spec.order());
        let mut entries = vec![0; packed_len(n)];
        for e in entries.iter_mut().rev() {
            *e = (index % q) as u32;
            index /= q;
        }
        Self { spec: spec.clone(), n, entries }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn packed(&self) -> &[u32] {
        &self.entries
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        // Rows 0..i contribute n + (n-1) + ... + (n-i+1) entries.
        i * self.n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    /// Entry code at 0-based `(i, j)`; zero below the diagonal.
    pub fn code(&self, i: usize, j: usize) -> u32 {
        if j < i {
            0
        } else {
            self.entries[self.offset(i, j)]
        }
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.spec.element(self.code(i, j)).expect("reduced")
    }

    pub(crate) fn set_code(&mut self, i: usize, j: usize, v: u32) {
        let o = self.offset(i, j);
        self.entries[o] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&c| c == 0)
    }

    pub fn to_matrix(&self) -> MatrixF {
        let n = self.n;
        let data = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.code(i, j)).collect();
        MatrixF::from_codes(&self.spec, n, n, data).expect("shape")
    }

    /// The corner slice `Δ_[i]` (1-based `i`): rows `1..=i`, columns `i..=n`.
    pub fn corner(&self, i: usize) -> MatrixF {
        assert!(i >= 1 && i <= self.n, "corner index {i} out of 1..={}", self.n);
        let cols = self.n + 1 - i;
        let mut data = Vec::with_capacity(i * cols);
        for r in 0..i {
            for c in i - 1..self.n {
                data.push(self.code(r, c));
            }
        }
        MatrixF::from_codes(&self.spec, i, cols, data).expect("shape")
    }

    fn ensure_compatible(&self, other: &Self) -> Result<()> {
        self.spec.ensure_same(&other.spec)?;
        if self.n != other.n {
            return Err(domain(format!("matrix sizes {} and {} differ", self.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| self.spec.add(a, b)).collect();
        Ok(Self { entries, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| self.spec.sub(a, b)).collect();
        Ok(Self { entries, ..self.clone() })
    }

    pub fn scale(&self, a: &FieldElement) -> Result<Self> {
        self.spec.ensure_same(a.spec())?;
        Ok(self.scale_code(a.code()))
    }

    pub(crate) fn scale_code(&self, a: u32) -> Self {
        let entries = self.entries.iter().map(|&x| self.spec.mul(x, a)).collect();
        Self { entries, ..self.clone() }
    }

    /// `self + a * other` on codes; callers check compatibility.
    pub(crate) fn add_scaled(&mut self, a: u32, other: &Self) {
        for (x, &y) in self.entries.iter_mut().zip(&other.entries) {
            *x = self.spec.mul_add(*x, a, y);
        }
    }
}

impl fmt::Debug for UpperTriangular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{}[{}]", self.n, self.to_matrix())
    }
}

/// Matrix text format of the full `n x n` matrix.
impl fmt::Display for UpperTriangular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_matrix())
    }
}

/// `pr_{j,i}`: zeroes the 1-based coordinates `j+1..=i` of `v`. `pr_{i,i}` is the identity.
pub fn project(v: &[u32], j: usize, i: usize) -> Result<Vec<u32>> {
    if j < 1 || j > i || i > v.len() {
        return Err(domain(format!(
            "projection pr_{{{j},{i}}} needs 1 <= j <= i <= {}",
            v.len()
        )));
    }
    let mut out = v.to_vec();
    out[j..i].iter_mut().for_each(|x| *x = 0);
    Ok(out)
}

/// Whether `spaces = (V_1, ..., V_n)` is a degenerate flag: `dim V_i = i`,
/// a common ambient space of dimension `n + 1`, and `pr_{i+1}(V_i) ⊆ V_{i+1}`.
pub fn is_degenerate_flag(spaces: &[Subspace]) -> bool {
    check_degenerate_flag(spaces).is_ok()
}

fn check_degenerate_flag(spaces: &[Subspace]) -> Result<()> {
    let n = spaces.len();
    let Some(first) = spaces.first() else {
        return Err(domain("empty flag"));
    };
    for (k, v) in spaces.iter().enumerate() {
        first.spec().ensure_same(v.spec())?;
        if v.ambient_dim() != n + 1 {
            return Err(domain(format!("V_{} lives in dimension {}, expected {}", k + 1, v.ambient_dim(), n + 1)));
        }
        if v.dim() != k + 1 {
            return Err(domain(format!("dim V_{} = {}", k + 1, v.dim())));
        }
    }
    for i in 1..n {
        if !chain_step_holds(&spaces[i - 1], &spaces[i], i) {
            return Err(domain(format!("pr_{}(V_{i}) is not contained in V_{}", i + 1, i + 1)));
        }
    }
    Ok(())
}

/// `pr_{i+1}(lower) ⊆ upper`, tested one basis row at a time.
pub(crate) fn chain_step_holds(lower: &Subspace, upper: &Subspace, i: usize) -> bool {
    let basis = lower.basis();
    (0..basis.rows()).all(|r| {
        let projected = project(basis.row(r), i, i + 1).expect("index in range");
        let line = Subspace::from_rows(
            &MatrixF::from_codes(lower.spec(), 1, projected.len(), projected).expect("shape"),
        );
        upper.sum(&line).map(|s| s.dim() == upper.dim()).unwrap_or(false)
    })
}

/// A point of the degenerate flag variety.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DegenerateFlag {
    spaces: Vec<Subspace>,
}

impl DegenerateFlag {
    pub fn new(spaces: Vec<Subspace>) -> Result<Self> {
        check_degenerate_flag(&spaces)?;
        Ok(Self { spaces })
    }

    pub fn n(&self) -> usize {
        self.spaces.len()
    }

    pub fn spaces(&self) -> &[Subspace] {
        &self.spaces
    }

    pub fn spec(&self) -> &FieldSpec {
        self.spaces[0].spec()
    }

    pub fn is_big_cell(&self) -> bool {
        self.spaces.iter().all(Subspace::is_big_cell)
    }
}

impl fmt::Debug for DegenerateFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.spaces).finish()
    }
}

/// `𝔉^(a)`: `V_i` is the row space of `(I_i | Δ_[i])`.
pub fn flag_from_matrix(delta: &UpperTriangular) -> DegenerateFlag {
    let spaces = (1..=delta.n()).map(|i| Subspace::from_big_cell(&delta.corner(i))).collect();
    DegenerateFlag { spaces }
}

/// `Δ^(a)`: recovers the upper triangular matrix of a big-cell degenerate flag.
pub fn matrix_from_flag(flag: &DegenerateFlag) -> Result<UpperTriangular> {
    if let Some((k, v)) = flag.spaces().iter().enumerate().find(|(_, v)| !v.is_big_cell()) {
        return Err(Error::Cell(format!("V_{} has pivots {:?}", k + 1, v.pivots())));
    }
    let gens: Vec<&MatrixF> = flag.spaces().iter().map(Subspace::basis).collect();
    extract_matrix(flag.spec(), &gens)
}

/// Validates `spaces` as a big-cell degenerate flag and runs the extraction.
///
/// Fails with [`Error::Cell`] when some `V_i` has the wrong dimension or is
/// outside the big cell; with [`Error::Domain`] when the chain condition fails.
pub fn matrix_from_spaces(spaces: &[Subspace]) -> Result<UpperTriangular> {
    for (k, v) in spaces.iter().enumerate() {
        if v.dim() != k + 1 {
            return Err(Error::Cell(format!("dim W_{} = {}, expected {}", k + 1, v.dim(), k + 1)));
        }
        if !v.is_big_cell() {
            return Err(Error::Cell(format!("W_{} has pivots {:?}", k + 1, v.pivots())));
        }
    }
    check_degenerate_flag(spaces)?;
    let gens: Vec<&MatrixF> = spaces.iter().map(Subspace::basis).collect();
    extract_matrix(spaces[0].spec(), &gens)
}

/// The extraction proper. `gens[i-1]` is any generating matrix of `U_i`; the
/// caller guarantees the tuple is a big-cell degenerate flag.
fn extract_matrix(spec: &FieldSpec, gens: &[&MatrixF]) -> Result<UpperTriangular> {
    let n = gens.len();
    let mut delta = UpperTriangular::zero(spec, n);

    let pick = |basis: &MatrixF, coord: usize| -> Result<Vec<u32>> {
        (0..basis.rows())
            .map(|r| basis.row(r))
            .find(|row| row[coord] != 0)
            .map(<[u32]>::to_vec)
            .ok_or_else(|| Error::Cell(format!("no vector with nonzero coordinate {}", coord + 1)))
    };

    // Δ_[1] = (u_2/u_1, ..., u_{n+1}/u_1) for some u ∈ U_1 with u_1 ≠ 0.
    let u = pick(gens[0], 0)?;
    let inv = spec.inv(u[0])?;
    for l in 1..=n {
        delta.set_code(0, l - 1, spec.mul(u[l], inv));
    }

    for i in 2..=n {
        // A = Δ_[i-1] without its first column: rows 1..i-1, columns i..n.
        // Pick w ∈ U_i with w_i ≠ 0; the new row is (v - Σ_j w_j A_j) / w_i.
        let w = pick(gens[i - 1], i - 1)?;
        let mut row: Vec<u32> = w[i..=n].to_vec();
        for j in 1..i {
            let wj = w[j - 1];
            if wj == 0 {
                continue;
            }
            let neg = spec.neg(wj);
            for (k, x) in row.iter_mut().enumerate() {
                *x = spec.mul_add(*x, neg, delta.code(j - 1, i - 1 + k));
            }
        }
        let inv = spec.inv(w[i - 1])?;
        for (k, x) in row.into_iter().enumerate() {
            delta.set_code(i - 1, i - 1 + k, spec.mul(x, inv));
        }
    }
    Ok(delta)
}

/// `frk(Δ) = Σ_i rk(Δ_[i])`.
pub fn flag_rank(delta: &UpperTriangular) -> usize {
    (1..=delta.n()).map(|i| delta.corner(i).rank()).sum()
}

/// Sum of componentwise Grassmann distances on `Π_i Gr_i(V)`.
pub fn product_distance(a: &[Subspace], b: &[Subspace]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(domain(format!("tuples of length {} and {}", a.len(), b.len())));
    }
    a.iter().zip(b).map(|(u, w)| u.grassmann_distance(w)).sum()
}

pub fn flag_distance(f: &DegenerateFlag, g: &DegenerateFlag) -> Result<usize> {
    product_distance(f.spaces(), g.spaces())
}

/// Largest possible value of the summed Grassmann distance in `K^{n+1}`:
/// `k^2` for `n+1 = 2k`, `k(k+1)` for `n+1 = 2k+1`.
pub fn d_max(n_plus_1: usize) -> usize {
    let k = n_plus_1 / 2;
    if n_plus_1 % 2 == 0 {
        k * k
    } else {
        k * (k + 1)
    }
}

/// A full flag `U_1 ⊆ U_2 ⊆ ... ⊆ U_n` in `K^{n+1}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FullFlag {
    spaces: Vec<Subspace>,
}

impl FullFlag {
    pub fn new(spaces: Vec<Subspace>) -> Result<Self> {
        let n = spaces.len();
        for (k, v) in spaces.iter().enumerate() {
            if v.dim() != k + 1 || v.ambient_dim() != n + 1 {
                return Err(domain(format!("U_{} has dim {} in K^{}", k + 1, v.dim(), v.ambient_dim())));
            }
        }
        for w in spaces.windows(2) {
            if !w[0].is_subspace_of(&w[1]) {
                return Err(domain("full flag members are not nested"));
            }
        }
        Ok(Self { spaces })
    }

    pub fn spaces(&self) -> &[Subspace] {
        &self.spaces
    }

    pub fn n(&self) -> usize {
        self.spaces.len()
    }
}

/// `Φ(Δ)`: unit upper triangular `(n+1) x (n+1)` matrix with `Φ_{i,j+1} = Δ_{i,j}`.
pub fn phi(delta: &UpperTriangular) -> MatrixF {
    let n = delta.n();
    let mut m = MatrixF::identity(delta.spec(), n + 1);
    for i in 0..n {
        for j in i..n {
            m.set_code(i, j + 1, delta.code(i, j));
        }
    }
    m
}

/// Inverse of [`phi`]; rejects matrices that are not unit upper triangular.
pub fn phi_inverse(m: &MatrixF) -> Result<UpperTriangular> {
    if m.rows() != m.cols() || m.rows() == 0 {
        return Err(domain("Φ⁻¹ needs a nonempty square matrix"));
    }
    let size = m.rows();
    for i in 0..size {
        for j in 0..=i {
            let expected = u32::from(i == j);
            if m.code(i, j) != expected {
                return Err(domain("matrix is not unit upper triangular"));
            }
        }
    }
    let n = size - 1;
    let mut delta = UpperTriangular::zero(m.spec(), n);
    for i in 0..n {
        for j in i..n {
            delta.set_code(i, j, m.code(i, j + 1));
        }
    }
    Ok(delta)
}

/// `𝔉`: `U_i` is spanned by the first `i` rows of `Φ(Δ)`.
pub fn full_flag_from_matrix(delta: &UpperTriangular) -> FullFlag {
    let p = phi(delta);
    let spaces = (1..=delta.n()).map(|i| Subspace::from_rows(&p.submatrix(0..i, 0..p.cols()))).collect();
    FullFlag { spaces }
}

pub fn full_flag_distance(f: &FullFlag, g: &FullFlag) -> Result<usize> {
    product_distance(f.spaces(), g.spaces())
}

/// `frk(Φ⁻¹(Φ(Γ) Φ(Δ)⁻¹))`, the flag-rank expression of the distance between `𝔉(Γ)` and `𝔉(Δ)`.
pub fn full_flag_distance_via_product(gamma: &UpperTriangular, delta: &UpperTriangular) -> Result<usize> {
    let prod = phi(gamma).matmul(&phi(delta).inverse()?)?;
    Ok(flag_rank(&phi_inverse(&prod)?))
}
