//! Exact matrices and subspaces over a finite field.
//!
//! Subspaces of `K^{n+1}` are kept in canonical form: the reduced row echelon
//! basis without zero rows. Equality of subspaces is therefore structural.

use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{domain, Error, Result};
use crate::gf::{FieldElement, FieldSpec};

/// Dense row-major matrix of field-element codes.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixF {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Hash for MatrixF {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.data.hash(state);
    }
}

impl MatrixF {
    pub fn zeros(spec: &FieldSpec, rows: usize, cols: usize) -> Self {
        Self { spec: spec.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(spec: &FieldSpec, size: usize) -> Self {
        let mut m = Self::zeros(spec, size, size);
        for i in 0..size {
            m.data[i * size + i] = 1;
        }
        m
    }

    /// Builds a matrix from element codes in row-major order.
    pub fn from_codes(spec: &FieldSpec, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(domain(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|&&c| c >= spec.order()) {
            return Err(domain(format!("entry {bad} is not an element of {spec}")));
        }
        Ok(Self { spec: spec.clone(), rows, cols, data })
    }

    /// Builds a matrix from rows of elements. All rows must share length and field.
    pub fn from_elements(spec: &FieldSpec, rows: &[Vec<FieldElement>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(domain("ragged rows"));
            }
            for e in row {
                spec.ensure_same(e.spec())?;
                data.push(e.code());
            }
        }
        Ok(Self { spec: spec.clone(), rows: rows.len(), cols, data })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.spec.element(self.code(r, c)).expect("stored codes are reduced")
    }

    #[inline]
    pub fn code(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub(crate) fn set_code(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_codes(&self) -> Vec<u32> {
        self.data.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }

    fn ensure_shape(&self, other: &MatrixF) -> Result<()> {
        self.spec.ensure_same(&other.spec)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(domain(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &MatrixF) -> Result<MatrixF> {
        self.ensure_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.spec.add(a, b)).collect();
        Ok(Self { data, ..self.clone() })
    }

    pub fn sub(&self, other: &MatrixF) -> Result<MatrixF> {
        self.ensure_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.spec.sub(a, b)).collect();
        Ok(Self { data, ..self.clone() })
    }

    pub fn scale(&self, a: &FieldElement) -> Result<MatrixF> {
        self.spec.ensure_same(a.spec())?;
        let data = self.data.iter().map(|&x| self.spec.mul(x, a.code())).collect();
        Ok(Self { data, ..self.clone() })
    }

    pub fn matmul(&self, other: &MatrixF) -> Result<MatrixF> {
        self.spec.ensure_same(&other.spec)?;
        if self.cols != other.rows {
            return Err(domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.spec, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.code(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = self.spec.mul_add(out.code(i, j), a, other.code(k, j));
                    out.set_code(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> MatrixF {
        let mut out = Self::zeros(&self.spec, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set_code(c, r, self.code(r, c));
            }
        }
        out
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &MatrixF) -> Result<MatrixF> {
        self.spec.ensure_same(&other.spec)?;
        if self.cols != other.cols {
            return Err(domain(format!("column count {} vs {}", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self { spec: self.spec.clone(), rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Sub-matrix with the given row and column ranges.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> MatrixF {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for r in rows.clone() {
            data.extend_from_slice(&self.row(r)[cols.clone()]);
        }
        Self { spec: self.spec.clone(), rows: rows.len(), cols: cols.len(), data }
    }

    /// Reduced row echelon form and rank. Zero rows are kept at the bottom.
    pub fn rref(&self) -> (MatrixF, usize) {
        let mut m = self.clone();
        let rank = rref_in_place(&self.spec, &mut m.data, m.rows, m.cols);
        (m, rank)
    }

    pub fn rank(&self) -> usize {
        let mut data = self.data.clone();
        rref_in_place(&self.spec, &mut data, self.rows, self.cols)
    }

    /// Basis (as rows) of the right kernel `{x : M x = 0}`.
    pub fn kernel(&self) -> MatrixF {
        let (r, rank) = self.rref();
        let pivots = pivot_columns(&r, rank);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Self::zeros(&self.spec, free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out.set_code(k, fc, 1);
            for (row, &pc) in pivots.iter().enumerate() {
                out.set_code(k, pc, self.spec.neg(r.code(row, fc)));
            }
        }
        out
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self) -> Result<MatrixF> {
        if self.rows != self.cols {
            return Err(domain("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let mut aug = Self::zeros(&self.spec, n, 2 * n);
        for r in 0..n {
            aug.data[r * 2 * n..r * 2 * n + n].copy_from_slice(self.row(r));
            aug.data[r * 2 * n + n + r] = 1;
        }
        let (red, _) = aug.rref();
        if red.submatrix(0..n, 0..n) != Self::identity(&self.spec, n) {
            return Err(Error::DivisionByZero);
        }
        Ok(red.submatrix(0..n, n..2 * n))
    }
}

fn rref_in_place(spec: &FieldSpec, data: &mut [u32], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| data[r * cols + col] != 0) else {
            continue;
        };
        if piv != rank {
            for c in 0..cols {
                data.swap(piv * cols + c, rank * cols + c);
            }
        }
        let inv = spec.inv(data[rank * cols + col]).expect("pivot is nonzero");
        for c in col..cols {
            data[rank * cols + c] = spec.mul(data[rank * cols + c], inv);
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = data[r * cols + col];
            if factor == 0 {
                continue;
            }
            let neg = spec.neg(factor);
            for c in col..cols {
                let v = spec.mul_add(data[r * cols + c], neg, data[rank * cols + c]);
                data[r * cols + c] = v;
            }
        }
        rank += 1;
    }
    rank
}

fn pivot_columns(rref: &MatrixF, rank: usize) -> Vec<usize> {
    (0..rank)
        .map(|r| rref.row(r).iter().position(|&c| c != 0).expect("nonzero row"))
        .collect()
}

impl fmt::Debug for MatrixF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixF[{}x{} over {}]({self})", self.rows, self.cols, self.spec)
    }
}

/// Matrix text format: rows separated by `;`, entries by `,`.
impl fmt::Display for MatrixF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            if r > 0 {
                f.write_str(";")?;
            }
            let row: Vec<String> = self.row(r).iter().map(u32::to_string).collect();
            f.write_str(&row.join(","))?;
        }
        Ok(())
    }
}

/// Parses the matrix text format. Entries are element codes.
pub fn parse_matrix(spec: &FieldSpec, text: &str) -> Result<MatrixF> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(MatrixF::zeros(spec, 0, 0));
    }
    let rows = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|e| {
                    e.trim()
                        .parse::<u32>()
                        .map_err(|_| domain(format!("bad matrix entry `{}`", e.trim())))
                })
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(domain("ragged rows in matrix text"));
    }
    MatrixF::from_codes(spec, rows.len(), cols, rows.concat())
}

/// A subspace of `K^{ambient}` stored by its RREF basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: MatrixF,
}

impl Subspace {
    /// Row space of `m`.
    pub fn from_rows(m: &MatrixF) -> Subspace {
        let (r, rank) = m.rref();
        Subspace { basis: r.submatrix(0..rank, 0..m.cols) }
    }

    pub fn zero(spec: &FieldSpec, ambient_dim: usize) -> Subspace {
        Subspace { basis: MatrixF::zeros(spec, 0, ambient_dim) }
    }

    /// Row space of `(I_i | a)` for an `i x (n+1-i)` matrix `a`; already canonical.
    pub fn from_big_cell(a: &MatrixF) -> Subspace {
        let i = a.rows();
        let width = i + a.cols();
        let mut basis = MatrixF::zeros(a.spec(), i, width);
        for r in 0..i {
            basis.set_code(r, r, 1);
            for c in 0..a.cols() {
                basis.set_code(r, i + c, a.code(r, c));
            }
        }
        Subspace { basis }
    }

    pub fn spec(&self) -> &FieldSpec {
        self.basis.spec()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    /// The RREF basis (no zero rows).
    pub fn basis(&self) -> &MatrixF {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        pivot_columns(&self.basis, self.dim())
    }

    fn ensure_compatible(&self, other: &Subspace) -> Result<()> {
        self.spec().ensure_same(other.spec())?;
        if self.ambient_dim() != other.ambient_dim() {
            return Err(domain(format!(
                "ambient dimensions {} and {} differ",
                self.ambient_dim(),
                other.ambient_dim()
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.ensure_compatible(other)?;
        Ok(Subspace::from_rows(&self.basis.vstack(&other.basis)?))
    }

    /// Whether the vector (element codes, length `ambient_dim`) lies in the subspace.
    pub fn contains(&self, v: &[u32]) -> bool {
        if v.len() != self.ambient_dim() {
            return false;
        }
        let spec = self.spec();
        let mut rest = v.to_vec();
        for (r, p) in self.pivots().into_iter().enumerate() {
            let f = rest[p];
            if f == 0 {
                continue;
            }
            let neg = spec.neg(f);
            for (x, &b) in rest.iter_mut().zip(self.basis.row(r)) {
                *x = spec.mul_add(*x, neg, b);
            }
        }
        rest.iter().all(|&x| x == 0)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        (0..self.dim()).all(|r| other.contains(self.basis.row(r)))
    }

    /// Grassmann distance `½(dim(U+W) − dim(U∩W))` between equidimensional subspaces.
    pub fn grassmann_distance(&self, other: &Subspace) -> Result<usize> {
        self.ensure_compatible(other)?;
        if self.dim() != other.dim() {
            return Err(domain(format!(
                "Grassmann distance needs equal dimensions, got {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        // dim(U∩W) = 2i - dim(U+W), so the distance is dim(U+W) - i.
        Ok(self.sum(other)?.dim() - self.dim())
    }

    /// True iff the RREF basis has the shape `(I_i | A)`.
    pub fn is_big_cell(&self) -> bool {
        self.pivots().into_iter().enumerate().all(|(r, p)| r == p)
    }

    /// The unique `A` with `self = rowspace(I_i | A)`.
    pub fn big_cell_matrix(&self, i: usize) -> Result<MatrixF> {
        if self.dim() != i {
            return Err(Error::Cell(format!("expected dimension {i}, found {}", self.dim())));
        }
        if !self.is_big_cell() {
            return Err(Error::Cell(format!("pivot columns {:?} are not 0..{i}", self.pivots())));
        }
        Ok(self.basis.submatrix(0..i, i..self.ambient_dim()))
    }

    /// Every subspace of `K^{ambient}` of dimension `dim`, enumerated through RREF shapes.
    pub fn enumerate(spec: &FieldSpec, ambient: usize, dim: usize) -> Vec<Subspace> {
        let mut out = Vec::new();
        if dim > ambient {
            return out;
        }
        let q = spec.order();
        for pivots in combinations(ambient, dim) {
            // Free positions: in row r, columns after pivot r that are not pivots.
            let free: Vec<(usize, usize)> = (0..dim)
                .flat_map(|r| {
                    let pv = &pivots;
                    (pivots[r] + 1..ambient).filter(move |c| !pv.contains(c)).map(move |c| (r, c))
                })
                .collect();
            let total = (q as u64).pow(free.len() as u32);
            for idx in 0..total {
                let mut basis = MatrixF::zeros(spec, dim, ambient);
                for (r, &p) in pivots.iter().enumerate() {
                    basis.set_code(r, p, 1);
                }
                let mut rest = idx;
                for &(r, c) in &free {
                    basis.set_code(r, c, (rest % q as u64) as u32);
                    rest /= q as u64;
                }
                out.push(Subspace { basis });
            }
        }
        out
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.basis)
    }
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn f3() -> FieldSpec {
        FieldSpec::prime(3).unwrap()
    }

    fn m(spec: &FieldSpec, text: &str) -> MatrixF {
        parse_matrix(spec, text).unwrap()
    }

    #[test]
    fn rref_examples() {
        let s = f3();
        let (r, rank) = m(&s, "1,1;0,0;1,1").rref();
        assert_eq!(rank, 1);
        assert_eq!(r, m(&s, "1,1;0,0;0,0"));
        let id = MatrixF::identity(&s, 3);
        assert_eq!(id.rref(), (id.clone(), 3));
        let (r, rank) = m(&s, "0,2;1,0").rref();
        assert_eq!((r, rank), (MatrixF::identity(&s, 2), 2));
        assert_eq!(m(&s, "0,2;1,0").rank(), 2);
    }

    #[test]
    fn rref_canonical_exhaustive_2x3_f2() {
        let s = f2();
        let all: Vec<MatrixF> = (0..64u32)
            .map(|i| MatrixF::from_codes(&s, 2, 3, (0..6).map(|b| (i >> b) & 1).collect()).unwrap())
            .collect();
        for a in &all {
            let (r, rank) = a.rref();
            assert_eq!(r.rref(), (r.clone(), rank));
            assert!(rank <= 2);
            for b in &all {
                let same_space = Subspace::from_rows(a) == Subspace::from_rows(b);
                // Row spaces agree iff each is contained in the other.
                let contained = Subspace::from_rows(a).is_subspace_of(&Subspace::from_rows(b))
                    && Subspace::from_rows(b).is_subspace_of(&Subspace::from_rows(a));
                assert_eq!(same_space, contained);
                if same_space {
                    assert_eq!(a.rref().0, b.rref().0);
                }
            }
        }
    }

    #[test]
    fn subspace_examples() {
        let s = f3();
        let u1 = Subspace::from_rows(&m(&s, "1,1,0,1,1"));
        assert_eq!(u1.dim(), 1);
        assert!(u1.contains(&[2, 2, 0, 2, 2]));
        assert_eq!(Subspace::from_rows(&MatrixF::zeros(&s, 2, 3)).dim(), 0);
        assert_eq!(Subspace::from_rows(&m(&s, "1,0;0,1")).dim(), 2);

        let b = f2();
        let e1 = Subspace::from_rows(&m(&b, "1,0,0"));
        let e2 = Subspace::from_rows(&m(&b, "0,1,0"));
        assert_eq!(e1.sum(&e2).unwrap(), Subspace::from_rows(&m(&b, "1,0,0;0,1,0")));
        assert_eq!(e1.sum(&e1).unwrap(), e1);
        assert_eq!(e1.sum(&Subspace::zero(&b, 3)).unwrap(), e1);
        assert!(e1.sum(&Subspace::zero(&b, 2)).is_err());
    }

    #[test]
    fn grassmann_examples() {
        let b = f2();
        let e1 = Subspace::from_rows(&m(&b, "1,0"));
        let e2 = Subspace::from_rows(&m(&b, "0,1"));
        assert_eq!(e1.grassmann_distance(&e2).unwrap(), 1);
        assert_eq!(e1.grassmann_distance(&e1).unwrap(), 0);
        let p = Subspace::from_rows(&m(&b, "1,0,0,0;0,1,0,0"));
        let q = Subspace::from_rows(&m(&b, "0,0,1,0;0,0,0,1"));
        assert_eq!(p.grassmann_distance(&q).unwrap(), 2);
        let line = Subspace::from_rows(&m(&b, "1,0,0,0"));
        assert!(p.grassmann_distance(&line).is_err());
    }

    #[test]
    fn big_cell_examples() {
        let b = f2();
        assert!(Subspace::from_rows(&m(&b, "1,0,1;0,1,1")).is_big_cell());
        assert!(!Subspace::from_rows(&m(&b, "0,1")).is_big_cell());
        assert!(Subspace::from_rows(&m(&b, "1,0")).is_big_cell());
        let s = f3();
        let u = Subspace::from_rows(&m(&s, "1,1,0,1,1"));
        assert_eq!(u.big_cell_matrix(1).unwrap(), m(&s, "1,0,1,1"));
        let full = Subspace::from_rows(&MatrixF::identity(&s, 3));
        assert_eq!(full.big_cell_matrix(3).unwrap().cols(), 0);
        let a = Subspace::from_rows(&m(&s, "1,0,0,0;0,1,0,0"));
        assert!(a.big_cell_matrix(2).unwrap().is_zero());
        assert!(matches!(
            Subspace::from_rows(&m(&b, "0,1")).big_cell_matrix(1),
            Err(Error::Cell(_))
        ));
    }

    #[test]
    fn enumeration_counts() {
        let b = f2();
        // Gaussian binomials over F2.
        assert_eq!(Subspace::enumerate(&b, 3, 1).len(), 7);
        assert_eq!(Subspace::enumerate(&b, 4, 2).len(), 35);
        assert_eq!(Subspace::enumerate(&b, 6, 3).len(), 1395);
        assert_eq!(Subspace::enumerate(&f3(), 3, 1).len(), 13);
    }

    #[test]
    fn grassmann_is_metric_and_max_matches() {
        let b = f2();
        for (amb, dim) in [(3, 1), (4, 2), (4, 1), (4, 3), (3, 2), (2, 1)] {
            let all = Subspace::enumerate(&b, amb, dim);
            let mut max = 0;
            for u in &all {
                for w in &all {
                    let d = u.grassmann_distance(w).unwrap();
                    assert_eq!(d == 0, u == w);
                    assert_eq!(d, w.grassmann_distance(u).unwrap());
                    max = max.max(d);
                    if amb * dim <= 8 {
                        for v in &all {
                            let duv = u.grassmann_distance(v).unwrap();
                            let dvw = v.grassmann_distance(w).unwrap();
                            assert!(d <= duv + dvw);
                        }
                    }
                }
            }
            assert_eq!(max, dim.min(amb - dim), "max distance on Gr_{dim}(F_2^{amb})");
        }
    }

    #[test]
    fn big_cell_distance_is_rank_difference() {
        let b = f2();
        for (amb, i) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2)] {
            let w = amb - i;
            let mats: Vec<MatrixF> = (0..1u32 << (i * w))
                .map(|x| MatrixF::from_codes(&b, i, w, (0..i * w).map(|k| (x >> k) & 1).collect()).unwrap())
                .collect();
            for a in &mats {
                for c in &mats {
                    let d = Subspace::from_big_cell(a)
                        .grassmann_distance(&Subspace::from_big_cell(c))
                        .unwrap();
                    assert_eq!(d, a.sub(c).unwrap().rank());
                }
            }
        }
    }

    #[test]
    fn kernel_and_inverse() {
        let s = f3();
        let a = m(&s, "1,2,0,1;0,1,1,2");
        let k = a.kernel();
        assert_eq!(k.rows(), 2);
        assert!(a.matmul(&k.transpose()).unwrap().is_zero());
        let g = m(&s, "1,2;0,1");
        assert_eq!(g.matmul(&g.inverse().unwrap()).unwrap(), MatrixF::identity(&s, 2));
        assert!(m(&s, "1,1;1,1").inverse().is_err());
    }
}
