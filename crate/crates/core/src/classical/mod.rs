//! Classical F_q-linear codes over blocked alphabets.
//!
//! A code of length `n` over the alphabet `F_q^ext` is stored as an
//! F_q-subspace of `F_q^{n*ext}`; symbol weight counts nonzero blocks.
//! Folding only changes `ext` and `n`, so folded codes share all machinery.

mod decode;
mod frs;

pub use decode::*;
pub use frs::*;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{bail, Result};
use crate::gf::Field;
use crate::linalg::{checked_count, vector_at, Matrix, RowSpace};
use crate::poly;

/// Enumeration cap for brute-force routines.
pub const ENUM_LIMIT: u64 = 1 << 26;

/// Evaluation structure retained from a GRS construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrsInfo {
    pub gamma: u32,
    pub k: usize,
    pub multipliers: Vec<u32>,
}

/// Parameters of a generalized Reed-Solomon code with evaluation points
/// `1, gamma, ..., gamma^{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrsSpec {
    pub field: Field,
    pub n: usize,
    pub k: usize,
    pub gamma: u32,
    pub multipliers: Vec<u32>,
}

impl GrsSpec {
    /// Plain Reed-Solomon: all multipliers one, primitive evaluation base.
    pub fn rs(field: &Field, n: usize, k: usize) -> GrsSpec {
        GrsSpec { field: field.clone(), n, k, gamma: field.primitive(), multipliers: vec![1; n] }
    }

    pub fn points(&self) -> Vec<u32> {
        (0..self.n).map(|i| self.field.pow(self.gamma, i as u64)).collect()
    }

    fn validate(&self) -> Result<()> {
        let q = self.field.q() as usize;
        if self.k == 0 || self.k >= self.n || self.n >= q {
            bail!(Parameter, "GRS needs 0 < k < n < q, got k={} n={} q={q}", self.k, self.n);
        }
        if self.multipliers.len() != self.n || self.multipliers.iter().any(|&u| u == 0 || u >= q as u32) {
            bail!(Parameter, "GRS multipliers must be {} nonzero field elements", self.n);
        }
        let pts = self.points();
        let mut sorted = pts.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.n {
            bail!(Parameter, "evaluation points are not distinct; gamma has order below n");
        }
        Ok(())
    }
}

/// An F_q-linear code of length `n` over `F_q^ext`.
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: Field,
    ext: usize,
    n: usize,
    generator: Matrix,
    parity: Matrix,
    space: RowSpace,
    /// Columns and inverse used to read messages off codewords.
    msg_cols: Vec<usize>,
    msg_inv: Matrix,
    grs: Option<GrsInfo>,
}

impl PartialEq for LinearCode {
    /// Equality as sets of codewords with the same blocking.
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.ext == other.ext && self.n == other.n && self.space == other.space
    }
}

impl LinearCode {
    /// Code spanned by the rows of `generator` (dependent rows are an error).
    pub fn from_generator(field: &Field, ext: usize, generator: Matrix) -> Result<LinearCode> {
        if ext == 0 || generator.cols % ext != 0 {
            bail!(Structural, "generator width {} is not a multiple of ext {ext}", generator.cols);
        }
        let space = RowSpace::new(field, &generator);
        if space.dim() != generator.rows {
            bail!(Structural, "generator rows are linearly dependent");
        }
        let parity = space.basis.nullspace(field);
        Self::assemble(field, ext, generator, parity, space)
    }

    /// Code with the given parity-check matrix.
    pub fn from_parity(field: &Field, ext: usize, parity: Matrix) -> Result<LinearCode> {
        if ext == 0 || parity.cols % ext != 0 {
            bail!(Structural, "parity width {} is not a multiple of ext {ext}", parity.cols);
        }
        let pspace = RowSpace::new(field, &parity);
        let generator = pspace.basis.nullspace(field);
        let space = RowSpace::new(field, &generator);
        let mut pm = pspace.basis;
        if pm.rows == 0 {
            pm = Matrix::zeros(0, parity.cols);
        }
        Self::assemble(field, ext, generator, pm, space)
    }

    /// Code spanned by possibly dependent rows.
    pub fn from_spanning(field: &Field, ext: usize, rows: &Matrix) -> Result<LinearCode> {
        let space = RowSpace::new(field, rows);
        Self::from_generator(field, ext, space.basis)
    }

    /// The whole space `(F_q^ext)^n`.
    pub fn full(field: &Field, ext: usize, n: usize) -> LinearCode {
        Self::from_generator(field, ext, Matrix::identity(n * ext)).expect("identity has full rank")
    }

    /// The zero code.
    pub fn zero(field: &Field, ext: usize, n: usize) -> LinearCode {
        Self::from_generator(field, ext, Matrix::zeros(0, n * ext)).expect("empty generator")
    }

    fn assemble(field: &Field, ext: usize, generator: Matrix, parity: Matrix, space: RowSpace) -> Result<LinearCode> {
        let len = generator.cols;
        let msg_cols = space.pivots.clone();
        let mut sub = Matrix::zeros(generator.rows, generator.rows);
        for i in 0..generator.rows {
            for (j, &c) in msg_cols.iter().enumerate() {
                sub.set(i, j, generator.get(i, c));
            }
        }
        let msg_inv = sub.inverse(field).ok_or_else(|| {
            crate::error::Error::Internal("generator restricted to pivots is singular".into())
        })?;
        let parity = if parity.rows == 0 { Matrix::zeros(0, len) } else { parity };
        Ok(LinearCode { field: field.clone(), ext, n: len / ext, generator, parity, space, msg_cols, msg_inv, grs: None })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn ext(&self) -> usize {
        self.ext
    }
    /// Block length in alphabet symbols.
    pub fn n(&self) -> usize {
        self.n
    }
    /// Length in base-field coordinates.
    pub fn len(&self) -> usize {
        self.n * self.ext
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Dimension over the base field.
    pub fn dim(&self) -> usize {
        self.generator.rows
    }
    /// Dimension over the alphabet (may be fractional for folded codes).
    pub fn k(&self) -> f64 {
        self.dim() as f64 / self.ext as f64
    }
    pub fn rate(&self) -> f64 {
        self.dim() as f64 / self.len() as f64
    }
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }
    pub fn parity(&self) -> &Matrix {
        &self.parity
    }
    pub fn space(&self) -> &RowSpace {
        &self.space
    }
    pub fn grs(&self) -> Option<&GrsInfo> {
        self.grs.as_ref()
    }

    pub fn encode(&self, msg: &[u32]) -> Vec<u32> {
        self.generator.vec_mul(&self.field, msg)
    }

    /// Message of a codeword (inverse of [`encode`](Self::encode)).
    pub fn message(&self, cw: &[u32]) -> Vec<u32> {
        let picked: Vec<u32> = self.msg_cols.iter().map(|&c| cw[c]).collect();
        self.msg_inv.vec_mul(&self.field, &picked)
    }

    pub fn contains(&self, w: &[u32]) -> bool {
        w.len() == self.len() && self.syndrome(w).iter().all(|&x| x == 0)
    }

    /// `H w`.
    pub fn syndrome(&self, w: &[u32]) -> Vec<u32> {
        self.parity.mul_vec(&self.field, w)
    }

    pub fn weight(&self, w: &[u32]) -> usize {
        symbol_weight(w, self.ext)
    }

    pub fn distance_between(&self, a: &[u32], b: &[u32]) -> usize {
        symbol_distance(a, b, self.ext)
    }

    /// The dual code under the standard dot product on base coordinates.
    pub fn dual(&self) -> LinearCode {
        let mut d = LinearCode::from_generator(&self.field, self.ext, self.parity.clone()).expect("parity rows independent");
        d.parity = self.space.basis.clone();
        d
    }

    /// Whether `other` is a subcode of `self`; on failure returns a witness row.
    pub fn contains_code(&self, other: &LinearCode) -> std::result::Result<(), Vec<u32>> {
        match self.space.contains_space(&self.field, &other.generator) {
            Some(w) => Err(w),
            None => Ok(()),
        }
    }

    /// Same codewords regrouped into blocks of `m` consecutive symbols.
    pub fn fold(&self, m: usize) -> Result<LinearCode> {
        if m == 0 || self.n % m != 0 {
            bail!(Parameter, "fold {m} does not divide block length {}", self.n);
        }
        let mut c = self.clone();
        c.ext = self.ext * m;
        c.n = self.n / m;
        Ok(c)
    }

    /// Reblock with a new ext dividing the total length.
    pub fn reblock(&self, ext: usize) -> Result<LinearCode> {
        if ext == 0 || self.len() % ext != 0 {
            bail!(Parameter, "ext {ext} does not divide length {}", self.len());
        }
        let mut c = self.clone();
        c.ext = ext;
        c.n = self.len() / ext;
        if ext != self.ext {
            c.grs = self.grs.clone().filter(|_| self.ext == 1 || ext % self.ext == 0);
        }
        Ok(c)
    }

    /// Codeword for the `idx`-th message in lexicographic order.
    pub fn codeword_at(&self, idx: u64) -> Vec<u32> {
        self.encode(&vector_at(self.field.q(), self.dim(), idx))
    }

    pub fn codeword_count(&self) -> Result<u64> {
        checked_count(self.field.q(), self.dim(), ENUM_LIMIT)
    }

    /// Visit every codeword in message-lexicographic order (parallel chunks,
    /// results merged in order by the callers that need determinism).
    pub fn codewords(&self) -> Result<Vec<Vec<u32>>> {
        let count = self.codeword_count()?;
        Ok((0..count).map(|i| self.codeword_at(i)).collect())
    }

    /// Exact minimum symbol distance by brute force. Enumerates codewords
    /// when few, otherwise searches for the smallest set of symbol positions
    /// supporting a nonzero codeword. Returns `None` for the zero code.
    pub fn min_distance(&self) -> Result<Option<usize>> {
        if self.dim() == 0 {
            return Ok(None);
        }
        if let Ok(count) = checked_count(self.field.q(), self.dim(), 1 << 22) {
            let best = (1..count)
                .into_par_iter()
                .map(|i| self.weight(&self.codeword_at(i)))
                .min()
                .unwrap();
            return Ok(Some(best));
        }
        self.min_distance_by_supports().map(Some)
    }

    /// Smallest `w` such that some `w` symbol positions carry a nonzero codeword:
    /// the parity columns restricted to those positions are dependent.
    fn min_distance_by_supports(&self) -> Result<usize> {
        let n = self.n;
        for w in 1..=n {
            let subsets = binomial(n, w);
            if subsets > ENUM_LIMIT {
                bail!(Infeasible, "support search over C({n},{w}) subsets");
            }
            let found = combinations(n, w).into_par_iter().any(|set| {
                let cols: Vec<usize> = set.iter().flat_map(|&s| s * self.ext..(s + 1) * self.ext).collect();
                let mut sub = Matrix::zeros(self.parity.rows, cols.len());
                for r in 0..self.parity.rows {
                    for (j, &c) in cols.iter().enumerate() {
                        sub.set(r, j, self.parity.get(r, c));
                    }
                }
                sub.rank(&self.field) < cols.len()
            });
            if found {
                return Ok(w);
            }
        }
        unreachable!("nonzero code has a codeword")
    }
}

pub fn symbol_weight(w: &[u32], ext: usize) -> usize {
    w.chunks(ext).filter(|b| b.iter().any(|&x| x != 0)).count()
}

pub fn symbol_distance(a: &[u32], b: &[u32], ext: usize) -> usize {
    a.chunks(ext).zip(b.chunks(ext)).filter(|(x, y)| x != y).count()
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    r
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Build the GRS code of `spec`.
pub fn grs_build(spec: &GrsSpec) -> Result<LinearCode> {
    spec.validate()?;
    let f = &spec.field;
    let pts = spec.points();
    let rows: Vec<Vec<u32>> = (0..spec.k)
        .map(|j| (0..spec.n).map(|i| f.mul(spec.multipliers[i], f.pow(pts[i], j as u64))).collect())
        .collect();
    let mut code = LinearCode::from_generator(f, 1, Matrix::from_rows(&rows, spec.n))?;
    code.grs = Some(GrsInfo { gamma: spec.gamma, k: spec.k, multipliers: spec.multipliers.clone() });
    Ok(code)
}

/// Multipliers of the dual GRS code, `v_i = (u_i prod_{j != i}(a_i - a_j))^{-1}`,
/// scaled so that `v_0 = 1`.
pub fn grs_dual(spec: &GrsSpec) -> GrsSpec {
    let f = &spec.field;
    let pts = spec.points();
    let mut v: Vec<u32> = (0..spec.n)
        .map(|i| {
            let mut prod = spec.multipliers[i];
            for j in 0..spec.n {
                if j != i {
                    prod = f.mul(prod, f.sub(pts[i], pts[j]));
                }
            }
            f.inv_nz(prod)
        })
        .collect();
    let scale = f.inv_nz(v[0]);
    for x in v.iter_mut() {
        *x = f.mul(*x, scale);
    }
    GrsSpec { field: f.clone(), n: spec.n, k: spec.n - spec.k, gamma: spec.gamma, multipliers: v }
}

/// Message polynomial evaluation: the GRS codeword of coefficients `msg`.
pub fn grs_encode_poly(spec: &GrsSpec, msg: &[u32]) -> Vec<u32> {
    let f = &spec.field;
    spec.points()
        .iter()
        .zip(&spec.multipliers)
        .map(|(&x, &u)| f.mul(u, poly::eval(f, msg, x)))
        .collect()
}

/// A folded code together with its unfolded base.
#[derive(Debug, Clone)]
pub struct FoldedCode {
    pub base: LinearCode,
    pub fold: usize,
    pub code: LinearCode,
}

pub fn fold(code: &LinearCode, m: usize) -> Result<FoldedCode> {
    Ok(FoldedCode { base: code.clone(), fold: m, code: code.fold(m)? })
}

/// A code together with a subcode.
#[derive(Debug, Clone)]
pub struct CosetCode {
    pub outer: LinearCode,
    pub inner: LinearCode,
}

impl CosetCode {
    pub fn new(outer: LinearCode, inner: LinearCode) -> Result<CosetCode> {
        if outer.field() != inner.field() || outer.len() != inner.len() {
            bail!(Structural, "coset code components have different shapes");
        }
        if let Err(w) = outer.contains_code(&inner) {
            bail!(Structural, "subcode row {w:?} is not in the code");
        }
        Ok(CosetCode { outer, inner })
    }

    /// Canonical coset representative of a codeword.
    pub fn canonical(&self, cw: &[u32]) -> Vec<u32> {
        self.inner.space().reduce(self.inner.field(), cw)
    }
}

/// Uniformly random `rows x cols` matrix of full row rank.
pub fn random_full_rank<R: Rng>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Result<Matrix> {
    for _ in 0..1000 {
        let data = (0..rows * cols).map(|_| rng.gen_range(0..field.q())).collect();
        let m = Matrix { rows, cols, data };
        if m.rank(field) == rows {
            return Ok(m);
        }
    }
    bail!(Construction, "could not sample {rows} independent vectors in F^{cols}")
}

/// Nested pair with `C2^perp ⊆ C1`: sample `k1` independent vectors, `C1`
/// is their span and `C2` has the first `n - k1` of them as parity checks.
pub fn sample_nested_pair<R: Rng>(field: &Field, n: usize, k1: usize, rng: &mut R) -> Result<(LinearCode, LinearCode)> {
    if k1 > n || 2 * k1 < n {
        bail!(Parameter, "need n/2 <= k1 <= n, got k1={k1} n={n}");
    }
    let g = random_full_rank(field, k1, n, rng)?;
    let k2 = n - k1;
    let c1 = LinearCode::from_generator(field, 1, g.clone())?;
    let h2 = Matrix { rows: k2, cols: n, data: g.data[..k2 * n].to_vec() };
    let c2 = LinearCode::from_parity(field, 1, h2)?;
    Ok((c1, c2))
}

/// Binary Hamming code of length `2^r - 1`.
pub fn hamming(r: usize) -> Result<LinearCode> {
    let f = Field::prime(2)?;
    let n = (1usize << r) - 1;
    let mut h = Matrix::zeros(r, n);
    for j in 0..n {
        for i in 0..r {
            h.set(i, j, (((j + 1) >> i) & 1) as u32);
        }
    }
    LinearCode::from_parity(&f, 1, h)
}

/// Binary even-weight code of length `n`.
pub fn even_weight(n: usize) -> Result<LinearCode> {
    let f = Field::prime(2)?;
    LinearCode::from_parity(&f, 1, Matrix::from_rows(&[vec![1; n]], n))
}
