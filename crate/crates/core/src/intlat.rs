//! Exact linear algebra over the integers.
//!
//! Matrices act on row vectors from the right (`v ↦ vM`). Every lattice is a
//! sublattice of `Z^d` stored as the rows of its row Hermite normal form, so two
//! lattices are equal exactly when their basis matrices are equal.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bounds::euler_phi;
use crate::error::{Error, Result};

/// Dense integer matrix with arbitrary-precision entries, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for (i, row) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    /// Builds a matrix from its rows. `cols` is needed to describe matrices with
    /// no rows; every row must have exactly `cols` entries.
    pub fn new(cols: usize, data: Vec<Vec<BigInt>>) -> Result<Self> {
        if let Some(bad) = data.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a matrix with {} columns",
                bad.len(),
                cols
            )));
        }
        Ok(Self {
            rows: data.len(),
            cols,
            data,
        })
    }

    /// Convenience constructor for small literal matrices. Panics on ragged input.
    pub fn from_i64(cols: usize, rows: &[&[i64]]) -> Self {
        let data = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::new(cols, data).expect("ragged literal matrix")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![vec![BigInt::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i]
    }

    pub fn row_vecs(&self) -> &[Vec<BigInt>] {
        &self.data
    }

    pub fn into_rows(self) -> Vec<Vec<BigInt>> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i][j] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().flatten().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && self.data.iter().enumerate().all(|(i, row)| {
                row.iter()
                    .enumerate()
                    .all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() })
            })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(Self { data, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(Self { data, ..*self })
    }

    pub fn neg(&self) -> Self {
        let data = self
            .data
            .iter()
            .map(|r| r.iter().map(|x| -x).collect())
            .collect();
        Self { data, ..*self }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .map(|r| vec_mul_unchecked(r, other))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// `M^k` for a square matrix, by repeated squaring.
    pub fn pow(&self, mut k: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Horizontal concatenation `(A | B)`.
    pub fn hcat(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hcat of {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.iter().chain(b).cloned().collect())
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    /// Vertical concatenation (rows of `self` followed by rows of `other`).
    pub fn vcat(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vcat of {} columns with {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Row vector times matrix, `vM`.
    pub fn left_mul(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} times {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(vec_mul_unchecked(v, self))
    }

    /// `I + M + ... + M^{k-1}`.
    pub fn geometric_sum(&self, k: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut acc = Self::zeros(self.rows, self.cols);
        let mut power = Self::identity(self.rows);
        for _ in 0..k {
            acc = acc.add(&power)?;
            power = power.mul(self)?;
        }
        Ok(acc)
    }

    /// Exact inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let ech = echelon(self);
        if ech.pivots.len() != self.rows || !echelon_top(&ech, self.cols).is_identity() {
            return Err(Error::NotUnimodular);
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.rows,
            data: ech.transform,
        })
    }
}

fn vec_mul_unchecked(v: &[BigInt], m: &IntMatrix) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); m.cols];
    for (x, row) in v.iter().zip(&m.data) {
        if x.is_zero() {
            continue;
        }
        for (o, y) in out.iter_mut().zip(row) {
            *o += x * y;
        }
    }
    out
}

pub(crate) fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Result of row reduction: `transform · input = reduced`, with the nonzero
/// rows of `reduced` on top forming the Hermite normal form.
struct Echelon {
    reduced: Vec<Vec<BigInt>>,
    transform: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

fn echelon_top(e: &Echelon, cols: usize) -> IntMatrix {
    IntMatrix {
        rows: e.pivots.len(),
        cols,
        data: e.reduced[..e.pivots.len()].to_vec(),
    }
}

fn axpy_row(target: &mut [BigInt], coeff: &BigInt, source: &[BigInt]) {
    for (t, s) in target.iter_mut().zip(source) {
        *t += coeff * s;
    }
}

fn echelon(m: &IntMatrix) -> Echelon {
    let r = m.rows;
    let mut h = m.data.clone();
    let mut u = IntMatrix::identity(r).data;
    let mut pivots = Vec::new();
    let mut k = 0;
    for j in 0..m.cols {
        if k == r {
            break;
        }
        for i in (k + 1)..r {
            if h[i][j].is_zero() {
                continue;
            }
            if h[k][j].is_zero() {
                h.swap(k, i);
                u.swap(k, i);
                continue;
            }
            let a = h[k][j].clone();
            let b = h[i][j].clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let a1 = &a / &g;
            let b1 = &b / &g;
            let combine = |rows: &mut Vec<Vec<BigInt>>| {
                let rk = rows[k].clone();
                let ri = rows[i].clone();
                rows[k] = rk.iter().zip(&ri).map(|(p, q)| &x * p + &y * q).collect();
                rows[i] = rk
                    .iter()
                    .zip(&ri)
                    .map(|(p, q)| -&b1 * p + &a1 * q)
                    .collect();
            };
            combine(&mut h);
            combine(&mut u);
        }
        if h[k][j].is_zero() {
            continue;
        }
        if h[k][j].is_negative() {
            for x in h[k].iter_mut().chain(u[k].iter_mut()) {
                *x = -&*x;
            }
        }
        let pivot = h[k][j].clone();
        for i in 0..k {
            let q = h[i][j].div_floor(&pivot);
            if q.is_zero() {
                continue;
            }
            let neg_q = -q;
            let (hk, uk) = (h[k].clone(), u[k].clone());
            axpy_row(&mut h[i], &neg_q, &hk);
            axpy_row(&mut u[i], &neg_q, &uk);
        }
        pivots.push(j);
        k += 1;
    }
    Echelon {
        reduced: h,
        transform: u,
        pivots,
    }
}

/// A sublattice of `Z^d`, stored in canonical row Hermite normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    basis: IntMatrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(Z^{}: ", self.dim)?;
        let rows: Vec<String> = self
            .basis
            .data
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("({})", cells.join(","))
            })
            .collect();
        write!(f, "<{}>)", rows.join(", "))
    }
}

impl Lattice {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            basis: IntMatrix::zeros(0, dim),
            pivots: Vec::new(),
        }
    }

    pub fn full(dim: usize) -> Self {
        Self {
            dim,
            basis: IntMatrix::identity(dim),
            pivots: (0..dim).collect(),
        }
    }

    /// The lattice spanned by `generators`, each of length `dim`.
    pub fn from_generators(dim: usize, generators: Vec<Vec<BigInt>>) -> Result<Self> {
        Ok(hnf(&IntMatrix::new(dim, generators)?))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.rows
    }

    pub fn is_zero(&self) -> bool {
        self.basis.rows == 0
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> &[Vec<BigInt>] {
        &self.basis.data
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against a lattice in Z^{}",
                len, self.dim
            )));
        }
        Ok(())
    }

    /// Coordinates of `v` in the HNF basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        self.check_dim(v.len())?;
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (row, &p) in self.basis.data.iter().zip(&self.pivots) {
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return Ok(None);
            }
            axpy_row(&mut rest, &-&q, row);
            coords.push(q);
        }
        Ok(is_zero_vec(&rest).then_some(coords))
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        Ok(self.coordinates(v)?.is_some())
    }

    /// Canonical representative of `v + L`: pivot coordinates reduced into `[0, pivot)`.
    pub fn reduce(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        self.check_dim(v.len())?;
        let mut rest = v.to_vec();
        for (row, &p) in self.basis.data.iter().zip(&self.pivots) {
            let q = rest[p].div_floor(&row[p]);
            if !q.is_zero() {
                axpy_row(&mut rest, &-q, row);
            }
        }
        Ok(rest)
    }

    pub fn is_subset(&self, other: &Lattice) -> Result<bool> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "Z^{} vs Z^{}",
                self.dim, other.dim
            )));
        }
        for row in &self.basis.data {
            if !other.contains(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Coordinates of `self`'s basis in `sup`'s basis (rank(self) x rank(sup)).
    fn coordinates_in(&self, sup: &Lattice) -> Result<IntMatrix> {
        if self.dim != sup.dim {
            return Err(Error::DimensionMismatch(format!(
                "Z^{} vs Z^{}",
                self.dim, sup.dim
            )));
        }
        let mut data = Vec::with_capacity(self.rank());
        for row in &self.basis.data {
            match sup.coordinates(row)? {
                Some(c) => data.push(c),
                None => return Err(Error::NotSublattice),
            }
        }
        IntMatrix::new(sup.rank(), data)
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        Ok(image_lattice(&self.basis.vcat(&other.basis)?))
    }

    pub fn intersect(&self, other: &Lattice) -> Result<Lattice> {
        lattice_intersect(self, other)
    }

    /// Image `{vM : v ∈ L}`.
    pub fn map(&self, m: &IntMatrix) -> Result<Lattice> {
        if m.rows != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "lattice in Z^{} mapped by {}x{} matrix",
                self.dim, m.rows, m.cols
            )));
        }
        Ok(image_lattice(&self.basis.mul(m)?))
    }
}

/// Index of a lattice in another, possibly infinite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Index {
    Finite(BigUint),
    Infinite,
}

impl Index {
    pub fn is_finite(&self) -> bool {
        matches!(self, Index::Finite(_))
    }

    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            Index::Finite(x) => Some(x),
            Index::Infinite => None,
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(x) => write!(f, "{x}"),
            Index::Infinite => write!(f, "inf"),
        }
    }
}

/// Order of a group element, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(k) => Some(k),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

/// Row lattice of `m` in canonical Hermite normal form.
pub fn hnf(m: &IntMatrix) -> Lattice {
    let e = echelon(m);
    Lattice {
        dim: m.cols,
        basis: echelon_top(&e, m.cols),
        pivots: e.pivots,
    }
}

/// `{v ∈ Z^rows : vM = 0}`.
pub fn kernel_lattice(m: &IntMatrix) -> Lattice {
    let e = echelon(m);
    let rank = e.pivots.len();
    let kernel_rows = e.transform[rank..].to_vec();
    hnf(&IntMatrix {
        rows: kernel_rows.len(),
        cols: m.rows,
        data: kernel_rows,
    })
}

pub fn image_lattice(m: &IntMatrix) -> Lattice {
    hnf(m)
}

pub fn lattice_intersect(a: &Lattice, b: &Lattice) -> Result<Lattice> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!(
            "intersecting lattices in Z^{} and Z^{}",
            a.dim, b.dim
        )));
    }
    if a.is_zero() || b.is_zero() {
        return Ok(Lattice::zero(a.dim));
    }
    // x·A = y·B  <=>  (x, y) ∈ ker [A; -B]
    let stacked = a.basis.vcat(&b.basis.neg())?;
    let ker = kernel_lattice(&stacked);
    let gens: Vec<Vec<BigInt>> = ker
        .basis
        .data
        .iter()
        .map(|row| vec_mul_unchecked(&row[..a.rank()], &a.basis))
        .collect();
    Lattice::from_generators(a.dim, gens)
}

/// `[sup : sub]`, the product of the elementary divisors of `sub` inside `sup`.
pub fn lattice_index(sub: &Lattice, sup: &Lattice) -> Result<Index> {
    let coords = sub.coordinates_in(sup)?;
    if sub.rank() < sup.rank() {
        return Ok(Index::Infinite);
    }
    let product = elementary_divisors(&coords)
        .into_iter()
        .fold(BigInt::one(), |acc, d| acc * d);
    Ok(Index::Finite(product.magnitude().clone()))
}

/// `{v ∈ domain : vM ∈ target}`.
pub fn lattice_preimage(domain: &Lattice, m: &IntMatrix, target: &Lattice) -> Result<Lattice> {
    if domain.dim != m.rows || target.dim != m.cols {
        return Err(Error::DimensionMismatch(format!(
            "preimage of a lattice in Z^{} under {}x{} from a domain in Z^{}",
            target.dim, m.rows, m.cols, domain.dim
        )));
    }
    if domain.is_zero() {
        return Ok(domain.clone());
    }
    let image = domain.basis.mul(m)?;
    let stacked = image.vcat(&target.basis.neg())?;
    let ker = kernel_lattice(&stacked);
    let gens: Vec<Vec<BigInt>> = ker
        .basis
        .data
        .iter()
        .map(|row| vec_mul_unchecked(&row[..domain.rank()], &domain.basis))
        .collect();
    Lattice::from_generators(domain.dim, gens)
}

/// One representative per coset of `sub` in `sup`; the zero vector comes first.
pub fn coset_reps(sub: &Lattice, sup: &Lattice) -> Result<Vec<Vec<BigInt>>> {
    let coords = sub.coordinates_in(sup)?;
    if sub.rank() < sup.rank() {
        return Err(Error::InfiniteIndex);
    }
    // In sup-coordinates sub is a full-rank lattice with triangular HNF; the
    // box 0 <= x_i < h_ii is a complete residue system.
    let tri = hnf(&coords);
    let radices: Vec<BigInt> = (0..tri.rank())
        .map(|i| tri.basis.data[i][i].clone())
        .collect();
    let mut reps = Vec::new();
    let mut digits = vec![BigInt::zero(); radices.len()];
    loop {
        reps.push(vec_mul_unchecked(&digits, &sup.basis));
        // increment the mixed-radix counter, last coordinate fastest
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return Ok(reps);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = BigInt::zero();
        }
    }
}

/// True iff `sup / sub` is torsion-free.
pub fn is_direct_summand(sub: &Lattice, sup: &Lattice) -> Result<bool> {
    let coords = sub.coordinates_in(sup)?;
    Ok(elementary_divisors(&coords).iter().all(One::is_one))
}

/// Some integer `x` with `xM = b`, or `None` when no integer solution exists.
/// The particular solution is the one with every coordinate attached to a zero
/// row of the Hermite form set to zero.
pub fn solve_left(m: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != m.cols {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for a matrix with {} columns",
            b.len(),
            m.cols
        )));
    }
    let e = echelon(m);
    let mut rest = b.to_vec();
    let mut y = Vec::with_capacity(e.pivots.len());
    for (row, &p) in e.reduced.iter().zip(&e.pivots) {
        let (q, r) = rest[p].div_rem(&row[p]);
        if !r.is_zero() {
            return Ok(None);
        }
        axpy_row(&mut rest, &-&q, row);
        y.push(q);
    }
    if !is_zero_vec(&rest) {
        return Ok(None);
    }
    let mut x = vec![BigInt::zero(); m.rows];
    for (coeff, urow) in y.iter().zip(&e.transform) {
        axpy_row(&mut x, coeff, urow);
    }
    Ok(Some(x))
}

/// Nonzero diagonal entries of the Smith normal form, each positive, each
/// dividing the next.
pub fn elementary_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.data.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // bring the smallest nonzero entry of the remaining block to (t, t)
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            for i in (t + 1)..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                if a[i][t].is_multiple_of(&a[t][t]) {
                    let f = -(&a[i][t] / &a[t][t]);
                    let rt = a[t].clone();
                    axpy_row(&mut a[i], &f, &rt);
                    continue;
                }
                let eg = a[t][t].extended_gcd(&a[i][t]);
                let (g, x, y) = (eg.gcd, eg.x, eg.y);
                let p1 = &a[t][t] / &g;
                let q1 = &a[i][t] / &g;
                let rt = a[t].clone();
                let ri = a[i].clone();
                a[t] = rt.iter().zip(&ri).map(|(p, q)| &x * p + &y * q).collect();
                a[i] = rt
                    .iter()
                    .zip(&ri)
                    .map(|(p, q)| -&q1 * p + &p1 * q)
                    .collect();
            }
            for j in (t + 1)..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                if a[t][j].is_multiple_of(&a[t][t]) {
                    let f = &a[t][j] / &a[t][t];
                    for row in a.iter_mut() {
                        let d = &f * &row[t];
                        row[j] -= d;
                    }
                    continue;
                }
                let eg = a[t][t].extended_gcd(&a[t][j]);
                let (g, x, y) = (eg.gcd, eg.x, eg.y);
                let p1 = &a[t][t] / &g;
                let q1 = &a[t][j] / &g;
                for row in a.iter_mut() {
                    let (ct, cj) = (row[t].clone(), row[j].clone());
                    row[t] = &x * &ct + &y * &cj;
                    row[j] = -&q1 * &ct + &p1 * &cj;
                }
            }
            // column operations may have refilled column t
            if ((t + 1)..rows).any(|i| !a[i][t].is_zero()) {
                continue;
            }
            // the pivot must divide the rest of the block; otherwise fold the
            // offending row into row t and eliminate again
            let pivot = a[t][t].clone();
            let bad =
                ((t + 1)..rows).find(|&i| ((t + 1)..cols).any(|j| !a[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    let ri = a[i].clone();
                    axpy_row(&mut a[t], &BigInt::one(), &ri);
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// Polynomials with integer coefficients, lowest degree first.
pub(crate) mod poly {
    use num_bigint::BigInt;
    use num_traits::{One, Zero};

    pub type Poly = Vec<BigInt>;

    pub fn trim(mut p: Poly) -> Poly {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
        p
    }

    /// Divides by a monic polynomial; returns `(quotient, remainder)`.
    pub fn div_monic(num: &[BigInt], den: &[BigInt]) -> (Poly, Poly) {
        let den_deg = den.len() - 1;
        let mut rem = num.to_vec();
        if rem.len() <= den_deg {
            return (Vec::new(), trim(rem));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - den_deg];
        for k in (0..quot.len()).rev() {
            let c = rem[k + den_deg].clone();
            if c.is_zero() {
                continue;
            }
            for (i, d) in den.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
            quot[k] = c;
        }
        (trim(quot), trim(rem))
    }

    /// The cyclotomic polynomial Φ_d.
    pub fn cyclotomic(d: u64) -> Poly {
        let mut p: Poly = vec![BigInt::zero(); d as usize + 1];
        p[0] = -BigInt::one();
        p[d as usize] = BigInt::one();
        for e in 1..d {
            if d.is_multiple_of(e) {
                p = div_monic(&p, &cyclotomic(e)).0;
            }
        }
        p
    }
}

/// Characteristic polynomial `det(xI - Q)` by the Faddeev–LeVerrier recurrence.
/// All divisions are exact over the integers.
pub fn characteristic_polynomial(q: &IntMatrix) -> Result<Vec<BigInt>> {
    if !q.is_square() {
        return Err(Error::NonSquare {
            rows: q.rows,
            cols: q.cols,
        });
    }
    let n = q.rows;
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut mk = IntMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = q.mul(&mk)?;
        for i in 0..n {
            next.data[i][i] += &coeffs[n - k + 1];
        }
        mk = next;
        let aq = q.mul(&mk)?;
        let trace: BigInt = (0..n).map(|i| aq.data[i][i].clone()).sum();
        coeffs[n - k] = -trace / BigInt::from(k);
    }
    Ok(coeffs)
}

/// Cyclotomic factors of `charpoly(Q)`: pairs `(d, multiplicity)` for every
/// `d` with `φ(d) <= m`, plus the cofactor left after dividing them out.
fn cyclotomic_part(q: &IntMatrix) -> Result<(Vec<(u64, usize)>, poly::Poly)> {
    let mut chi = characteristic_polynomial(q)?;
    let m = q.rows as u64;
    let mut found = Vec::new();
    if m == 0 {
        return Ok((found, chi));
    }
    for d in 1..=(2 * m * m + 1) {
        if euler_phi(d) > m {
            continue;
        }
        let phi_d = poly::cyclotomic(d);
        let mut mult = 0;
        loop {
            if chi.len() < phi_d.len() {
                break;
            }
            let (quot, rem) = poly::div_monic(&chi, &phi_d);
            if !rem.is_empty() {
                break;
            }
            chi = quot;
            mult += 1;
        }
        if mult > 0 {
            found.push((d, mult));
        }
    }
    Ok((found, chi))
}

fn lcm_u64(values: impl IntoIterator<Item = u64>) -> u64 {
    values.into_iter().fold(1, |acc, d| acc.lcm(&d))
}

/// Least `k >= 1` with `Q^k = I`, or infinite.
///
/// A finite-order `Q` has a squarefree minimal polynomial whose roots are
/// roots of unity of orders `d` with `φ(d) <= m`, so its order divides the lcm
/// `s` of those `d`. The search therefore only visits divisors of `s`; the
/// answer is the same as testing every `k <= L1(m)`.
pub fn matrix_order(q: &IntMatrix) -> Result<Order> {
    let (factors, cofactor) = cyclotomic_part(q)?;
    if cofactor.len() != 1 {
        return Ok(Order::Infinite);
    }
    let s = lcm_u64(factors.iter().map(|&(d, _)| d));
    if !q.pow(s)?.is_identity() {
        return Ok(Order::Infinite);
    }
    let mut divisors: Vec<u64> = (1..=s).filter(|k| s % k == 0).collect();
    divisors.sort_unstable();
    for k in divisors {
        if q.pow(k)?.is_identity() {
            return Ok(Order::Finite(k));
        }
    }
    unreachable!("Q^s = I was checked above")
}

/// Lcm of the orders of the root-of-unity eigenvalues of `Q` (1 if there are
/// none). `Fix Q^p ⊆ Fix Q^s` for every `p >= 1`.
pub fn unity_exponent(q: &IntMatrix) -> Result<u64> {
    let (factors, _) = cyclotomic_part(q)?;
    Ok(lcm_u64(factors.iter().map(|&(d, _)| d)))
}

/// A vector with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatVector(pub Vec<BigRational>);

impl RatVector {
    pub fn from_integers(v: &[BigInt]) -> Self {
        Self(
            v.iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &RatVector) -> RatVector {
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `vM` over the rationals.
    pub fn mul_matrix(&self, m: &IntMatrix) -> RatVector {
        let mut out = vec![BigRational::zero(); m.cols];
        for (x, row) in self.0.iter().zip(&m.data) {
            for (o, y) in out.iter_mut().zip(row) {
                *o += x * BigRational::from_integer(y.clone());
            }
        }
        RatVector(out)
    }

    /// The integer vector, when every coordinate is integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.0
            .iter()
            .map(|x| x.is_integer().then(|| x.to_integer()))
            .collect()
    }
}

/// Splits `v = v1 + v2` with `v1(Q - I) = 0` and `v2(I + Q + ... + Q^{k-1}) = 0`.
///
/// Over the rationals the split is `v1 = v·S/k`, `S = I + ... + Q^{k-1}`. The
/// two integer kernels need not span `Z^m` (the swap matrix is an example), so the
/// components are rational in general.
pub fn split_ker(q: &IntMatrix, k: u64, v: &[BigInt]) -> Result<(RatVector, RatVector)> {
    if !q.is_square() {
        return Err(Error::NonSquare {
            rows: q.rows,
            cols: q.cols,
        });
    }
    if v.len() != q.rows {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a {}x{} matrix",
            v.len(),
            q.rows,
            q.cols
        )));
    }
    if k == 0 || !q.pow(k)?.is_identity() {
        return Err(Error::NotOfOrder(k));
    }
    let s = q.geometric_sum(k)?;
    let vs = vec_mul_unchecked(v, &s);
    let kk = BigInt::from(k);
    let v1 = RatVector(
        vs.into_iter()
            .map(|x| BigRational::new(x, kk.clone()))
            .collect(),
    );
    let v2 = RatVector(
        v.iter()
            .zip(&v1.0)
            .map(|(a, b)| BigRational::from_integer(a.clone()) - b)
            .collect(),
    );
    Ok((v1, v2))
}

/// Integer vector from small literals.
pub fn ivec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(dim: usize, rows: &[&[i64]]) -> Lattice {
        hnf(&IntMatrix::from_i64(dim, rows))
    }

    /// Every Z-combination of `gens` with coefficients in [-r, r].
    fn small_span(gens: &[Vec<i64>], r: i64) -> std::collections::BTreeSet<Vec<i64>> {
        let mut out = std::collections::BTreeSet::new();
        let dim = gens.first().map_or(0, |g| g.len());
        let mut coeffs = vec![-r; gens.len()];
        loop {
            let mut v = vec![0; dim];
            for (c, g) in coeffs.iter().zip(gens) {
                for (x, y) in v.iter_mut().zip(g) {
                    *x += c * y;
                }
            }
            out.insert(v);
            let mut pos = coeffs.len();
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                coeffs[pos] += 1;
                if coeffs[pos] <= r {
                    break;
                }
                coeffs[pos] = -r;
            }
        }
    }

    #[test]
    fn hnf_examples() {
        let l = lat(2, &[&[2, 4], &[1, 1]]);
        assert_eq!(l.basis(), &IntMatrix::from_i64(2, &[&[1, 1], &[0, 2]]));
        // both generating sets span the same small box of combinations
        let reduced = lat(2, &[&[1, 1], &[0, 2]]);
        for v in small_span(&[vec![2, 4], vec![1, 1]], 3) {
            assert!(reduced.contains(&ivec(&v)).unwrap(), "{v:?}");
        }
        for v in small_span(&[vec![1, 1], vec![0, 2]], 3) {
            assert!(lat(2, &[&[2, 4], &[1, 1]]).contains(&ivec(&v)).unwrap());
        }
        assert_eq!(
            hnf(&IntMatrix::identity(3)).basis(),
            &IntMatrix::identity(3)
        );
        assert!(lat(2, &[&[0, 0]]).is_zero());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(
            kernel_lattice(&IntMatrix::from_i64(1, &[&[1], &[-1]])),
            lat(2, &[&[1, 1]])
        );
        assert!(kernel_lattice(&IntMatrix::identity(2)).is_zero());
        assert_eq!(kernel_lattice(&IntMatrix::zeros(2, 2)), Lattice::full(2));
    }

    #[test]
    fn image_examples() {
        let q = IntMatrix::from_i64(2, &[&[1, 0], &[0, -1]]);
        let qi = q.sub(&IntMatrix::identity(2)).unwrap();
        assert_eq!(image_lattice(&qi), lat(2, &[&[0, 2]]));
        assert!(image_lattice(&IntMatrix::zeros(3, 2)).is_zero());
        assert_eq!(
            image_lattice(&IntMatrix::from_i64(2, &[&[0, 1], &[0, 2]])),
            lat(2, &[&[0, 1]])
        );
    }

    #[test]
    fn intersect_examples() {
        let a = lat(2, &[&[0, 2]]);
        let b = lat(2, &[&[0, 1]]);
        assert_eq!(a.intersect(&b).unwrap(), a);
        assert_eq!(b.intersect(&b).unwrap(), b);
        assert!(lat(2, &[&[1, 0]])
            .intersect(&lat(2, &[&[0, 1]]))
            .unwrap()
            .is_zero());
        assert!(matches!(
            Lattice::zero(2).intersect(&Lattice::zero(3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn index_examples() {
        let big = lat(2, &[&[0, 1]]);
        let small = lat(2, &[&[0, 2]]);
        assert_eq!(
            lattice_index(&small, &big).unwrap(),
            Index::Finite(2u32.into())
        );
        assert_eq!(
            lattice_index(&big, &big).unwrap(),
            Index::Finite(1u32.into())
        );
        assert_eq!(
            lattice_index(&lat(2, &[&[1, 0]]), &Lattice::full(2)).unwrap(),
            Index::Infinite
        );
        assert_eq!(lattice_index(&big, &small), Err(Error::NotSublattice));
    }

    #[test]
    fn preimage_examples() {
        let domain = lat(3, &[&[0, 1, 0], &[0, 0, 1]]);
        let p = IntMatrix::from_i64(2, &[&[1, 0], &[0, 1], &[0, 2]]);
        let target = lat(2, &[&[0, 2]]);
        assert_eq!(
            lattice_preimage(&domain, &p, &target).unwrap(),
            lat(3, &[&[0, 2, 0], &[0, 0, 1]])
        );
        assert_eq!(
            lattice_preimage(&domain, &p, &Lattice::full(2)).unwrap(),
            domain
        );
        assert_eq!(
            lattice_preimage(&domain, &IntMatrix::zeros(3, 2), &Lattice::zero(2)).unwrap(),
            domain
        );
    }

    #[test]
    fn coset_examples() {
        let sup = lat(3, &[&[0, 1, 0], &[0, 0, 1]]);
        let sub = lat(3, &[&[0, 2, 0], &[0, 0, 1]]);
        let reps = coset_reps(&sub, &sup).unwrap();
        // brute force: sup vectors with coordinates in [0, 1], modulo sub
        let mut classes = std::collections::BTreeSet::new();
        for a in 0..=1 {
            for b in 0..=1 {
                classes.insert(sub.reduce(&ivec(&[0, a, b])).unwrap());
            }
        }
        assert_eq!(classes.len(), 2);
        assert_eq!(reps, vec![ivec(&[0, 0, 0]), ivec(&[0, 1, 0])]);
        assert_eq!(coset_reps(&sup, &sup).unwrap(), vec![ivec(&[0, 0, 0])]);
        assert_eq!(
            coset_reps(&lat(1, &[&[3]]), &Lattice::full(1)).unwrap(),
            vec![ivec(&[0]), ivec(&[1]), ivec(&[2])]
        );
        assert_eq!(
            coset_reps(&lat(2, &[&[1, 0]]), &Lattice::full(2)),
            Err(Error::InfiniteIndex)
        );
    }

    #[test]
    fn direct_summand_examples() {
        assert!(is_direct_summand(&lat(2, &[&[1, 0]]), &Lattice::full(2)).unwrap());
        assert!(!is_direct_summand(&lat(2, &[&[0, 2]]), &Lattice::full(2)).unwrap());
        // the quotient Z^2/<(0,2)> has the 2-torsion class of (0,1)
        let sub = lat(2, &[&[0, 2]]);
        assert!(!sub.contains(&ivec(&[0, 1])).unwrap());
        assert!(sub.contains(&ivec(&[0, 2])).unwrap());
        assert!(
            !is_direct_summand(&lat(2, &[&[2, 0], &[0, 3]]), &lat(2, &[&[2, 0], &[0, 1]])).unwrap()
        );
        assert_eq!(
            elementary_divisors(&IntMatrix::from_i64(2, &[&[1, 0], &[0, 3]])),
            vec![BigInt::from(1), BigInt::from(3)]
        );
    }

    #[test]
    fn solve_examples() {
        let m = IntMatrix::from_i64(2, &[&[0, 0], &[0, 2]]);
        assert_eq!(solve_left(&m, &ivec(&[0, 2])).unwrap(), Some(ivec(&[0, 1])));
        assert_eq!(solve_left(&m, &ivec(&[0, 0])).unwrap(), Some(ivec(&[0, 0])));
        let two = IntMatrix::from_i64(1, &[&[2]]);
        assert_eq!(solve_left(&two, &ivec(&[1])).unwrap(), None);
        assert!(solve_left(&two, &ivec(&[1, 2])).is_err());
    }

    #[test]
    fn order_examples() {
        let q = IntMatrix::from_i64(2, &[&[1, 0], &[0, -1]]);
        assert_eq!(matrix_order(&q).unwrap(), Order::Finite(2));
        assert_eq!(
            matrix_order(&IntMatrix::identity(3)).unwrap(),
            Order::Finite(1)
        );
        let shear = IntMatrix::from_i64(2, &[&[1, 1], &[0, 1]]);
        assert_eq!(matrix_order(&shear).unwrap(), Order::Infinite);
        for k in 1..20 {
            assert!(!shear.pow(k).unwrap().is_identity());
        }
        assert!(matches!(
            matrix_order(&IntMatrix::zeros(2, 3)),
            Err(Error::NonSquare { .. })
        ));
    }

    #[test]
    fn unity_exponent_examples() {
        let q = IntMatrix::from_i64(2, &[&[2, 0], &[0, -1]]);
        assert_eq!(unity_exponent(&q).unwrap(), 2);
        let per = kernel_lattice(&q.pow(2).unwrap().sub(&IntMatrix::identity(2)).unwrap());
        assert_eq!(per, lat(2, &[&[0, 1]]));
        assert_eq!(unity_exponent(&IntMatrix::identity(4)).unwrap(), 1);
        let rot = IntMatrix::from_i64(2, &[&[0, -1], &[1, 0]]);
        assert_eq!(unity_exponent(&rot).unwrap(), 4);
        assert!(rot.pow(4).unwrap().is_identity());
        assert!(!rot.pow(2).unwrap().is_identity());
    }

    #[test]
    fn charpoly_and_cyclotomics() {
        let q = IntMatrix::from_i64(2, &[&[1, 2], &[3, 4]]);
        // x^2 - 5x - 2
        assert_eq!(characteristic_polynomial(&q).unwrap(), ivec(&[-2, -5, 1]));
        assert_eq!(poly::cyclotomic(1), ivec(&[-1, 1]));
        assert_eq!(poly::cyclotomic(6), ivec(&[1, -1, 1]));
        assert_eq!(poly::cyclotomic(12), ivec(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn split_examples() {
        let q = IntMatrix::from_i64(2, &[&[1, 0], &[0, -1]]);
        let (v1, v2) = split_ker(&q, 2, &ivec(&[3, 5])).unwrap();
        assert_eq!(v1, RatVector::from_integers(&ivec(&[3, 0])));
        assert_eq!(v2, RatVector::from_integers(&ivec(&[0, 5])));
        let (z1, z2) = split_ker(&q, 2, &ivec(&[0, 0])).unwrap();
        assert!(z1.is_zero() && z2.is_zero());
        let swap = IntMatrix::from_i64(2, &[&[0, 1], &[1, 0]]);
        let (v1, v2) = split_ker(&swap, 2, &ivec(&[1, 0])).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(v1, RatVector(vec![half.clone(), half.clone()]));
        assert_eq!(v2, RatVector(vec![half.clone(), -half]));
        assert!(v1
            .mul_matrix(&swap.sub(&IntMatrix::identity(2)).unwrap())
            .is_zero());
        assert!(v2.mul_matrix(&swap.geometric_sum(2).unwrap()).is_zero());
        assert_eq!(
            split_ker(&swap, 3, &ivec(&[1, 0])),
            Err(Error::NotOfOrder(3))
        );
    }

    #[test]
    fn unimodular_inverse() {
        let q = IntMatrix::from_i64(2, &[&[2, 1], &[1, 1]]);
        let inv = q.inverse_unimodular().unwrap();
        assert!(q.mul(&inv).unwrap().is_identity());
        assert_eq!(
            IntMatrix::from_i64(1, &[&[2]]).inverse_unimodular(),
            Err(Error::NotUnimodular)
        );
    }
}
