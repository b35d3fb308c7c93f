//! CSS codes, quantum folding, folded quantum RS codes, quantum list
//! decoding and list recovery, and random CSS ensembles.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use rayon::prelude::*;

use crate::classical::{
    ball_size, grs_build, grs_dual, group_cosets, list_recover, BallTable, CosetCode, CosetEntry, GrsSpec, LinearCode,
    ListMode, RecoveryMode, ENUM_LIMIT,
};
use crate::error::{bail, Error, Result};
use crate::gf::Field;
use crate::linalg::{Matrix, RowSpace};
use crate::pauli::{pair_weight, PauliFrame, StabilizerCode, Syndrome};

/// CSS(C1, C2) with `C2^perp ⊆ C1`.
#[derive(Debug, Clone)]
pub struct CssCode {
    c1: LinearCode,
    c2: LinearCode,
    c1_perp: LinearCode,
    c2_perp: LinearCode,
    stab: StabilizerCode,
    /// Rows of the X-type checks (basis of C2^perp), then Z-type (basis of C1^perp).
    x_checks: Matrix,
    z_checks: Matrix,
}

impl CssCode {
    pub fn c1(&self) -> &LinearCode {
        &self.c1
    }
    pub fn c2(&self) -> &LinearCode {
        &self.c2
    }
    pub fn c1_perp(&self) -> &LinearCode {
        &self.c1_perp
    }
    pub fn c2_perp(&self) -> &LinearCode {
        &self.c2_perp
    }
    pub fn stab(&self) -> &StabilizerCode {
        &self.stab
    }
    pub fn field(&self) -> &Field {
        self.c1.field()
    }
    pub fn ext(&self) -> usize {
        self.c1.ext()
    }
    /// Block length in symbols.
    pub fn n(&self) -> usize {
        self.c1.n()
    }
    /// Length in base-field qudits.
    pub fn len(&self) -> usize {
        self.c1.len()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Encoded base-field qudits.
    pub fn k(&self) -> usize {
        self.stab.k()
    }
    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.len() as f64
    }
    pub fn x_checks(&self) -> &Matrix {
        &self.x_checks
    }
    pub fn z_checks(&self) -> &Matrix {
        &self.z_checks
    }

    /// `C1 / C2^perp`: X-part cosets.
    pub fn x_cosets(&self) -> CosetCode {
        CosetCode { outer: self.c1.clone(), inner: self.c2_perp.clone() }
    }

    /// `C2 / C1^perp`: Z-part cosets.
    pub fn z_cosets(&self) -> CosetCode {
        CosetCode { outer: self.c2.clone(), inner: self.c1_perp.clone() }
    }

    pub fn syndrome(&self, e: &PauliFrame) -> Result<Syndrome> {
        self.stab.syndrome(e)
    }

    /// Some `(e_x, e_z)` with the given syndrome.
    pub fn solve_syndrome(&self, s: &Syndrome) -> Result<(Vec<u32>, Vec<u32>)> {
        let f = self.field();
        let fq = s.to_fq(f);
        let nx = self.x_checks.rows;
        if fq.len() != nx + self.z_checks.rows {
            bail!(Structural, "syndrome of length {} for {} generators", fq.len(), nx + self.z_checks.rows);
        }
        // X-check rows a: value <a, e_z>. Z-check rows b: value -<e_x, b>.
        let ez = self.x_checks.solve(f, &fq[..nx]).ok_or_else(|| Error::Internal("X-check system inconsistent".into()))?;
        let rhs: Vec<u32> = fq[nx..].iter().map(|&v| f.neg(v)).collect();
        let ex = self.z_checks.solve(f, &rhs).ok_or_else(|| Error::Internal("Z-check system inconsistent".into()))?;
        Ok((ex, ez))
    }

    /// Exact minimum weight over `N \ S` via the classical components.
    pub fn distance(&self) -> Result<Option<usize>> {
        if self.k() == 0 {
            return Ok(None);
        }
        let side = |c: &LinearCode, sub: &LinearCode| -> Result<usize> {
            let count = c.codeword_count()?;
            Ok((1..count)
                .into_par_iter()
                .filter_map(|i| {
                    let w = c.codeword_at(i);
                    (!sub.space().contains(c.field(), &w)).then(|| c.weight(&w))
                })
                .min()
                .unwrap_or(usize::MAX))
        };
        Ok(Some(side(&self.c1, &self.c2_perp)?.min(side(&self.c2, &self.c1_perp)?)))
    }
}

/// Greedy extension of `sub` by rows of `code` in order: coset representatives.
fn coset_reps(f: &Field, code: &LinearCode, sub: &LinearCode) -> Vec<Vec<u32>> {
    let mut span = sub.space().clone();
    let mut reps = Vec::new();
    for i in 0..code.generator().rows {
        let row = code.generator().row(i);
        if span.insert(f, row) {
            reps.push(row.to_vec());
        }
    }
    reps
}

/// Bases of `C1/C2^perp` and `C2/C1^perp` paired to the identity Gram matrix.
pub fn dual_coset_bases(
    f: &Field,
    c1: &LinearCode,
    c2_perp: &LinearCode,
    c2: &LinearCode,
    c1_perp: &LinearCode,
) -> Result<(Vec<Vec<u32>>, Vec<Vec<u32>>)> {
    let xs = coset_reps(f, c1, c2_perp);
    let zs = coset_reps(f, c2, c1_perp);
    if xs.len() != zs.len() {
        bail!(Construction, "coset spaces have dimensions {} and {}", xs.len(), zs.len());
    }
    let k = xs.len();
    let mut gram = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram.set(i, j, f.dot(&xs[i], &zs[j]));
        }
    }
    let inv = gram.inverse(f).ok_or_else(|| Error::Construction("coset pairing is degenerate".into()))?;
    // z'_j = sum_l inv[l][j] z_l gives <x_i, z'_j> = (G inv)_{ij}.
    let zs2 = (0..k)
        .map(|j| {
            let mut v = vec![0u32; zs.first().map_or(0, |z| z.len())];
            for (l, z) in zs.iter().enumerate() {
                f.axpy(&mut v, inv.get(l, j), z);
            }
            v
        })
        .collect();
    Ok((xs, zs2))
}

/// CSS(C1, C2); requires `C2^perp ⊆ C1`.
pub fn build_css(c1: &LinearCode, c2: &LinearCode) -> Result<CssCode> {
    if c1.field() != c2.field() || c1.len() != c2.len() || c1.ext() != c2.ext() {
        bail!(Structural, "classical components have different shapes");
    }
    let f = c1.field().clone();
    let c2_perp = c2.dual();
    let c1_perp = c1.dual();
    if let Err(w) = c1.contains_code(&c2_perp) {
        bail!(Structural, "C2^perp is not contained in C1; witness {w:?}");
    }
    let ext = c1.ext();
    let len = c1.len();
    let x_checks = c2_perp.generator().clone();
    let z_checks = c1_perp.generator().clone();
    let mut gens: Vec<PauliFrame> = (0..x_checks.rows).map(|i| PauliFrame::x_only(x_checks.row(i).to_vec(), ext)).collect();
    gens.extend((0..z_checks.rows).map(|i| PauliFrame::z_only(z_checks.row(i).to_vec(), ext)));
    let (xs, zs) = dual_coset_bases(&f, c1, &c2_perp, c2, &c1_perp)?;
    let lx = xs.into_iter().map(|x| PauliFrame::x_only(x, ext)).collect();
    let lz = zs.into_iter().map(|z| PauliFrame::z_only(z, ext)).collect();
    let stab = StabilizerCode::with_logicals(&f, ext, len, gens, lx, lz)?;
    Ok(CssCode { c1: c1.clone(), c2: c2.clone(), c1_perp, c2_perp, stab, x_checks, z_checks })
}

/// Fold both classical components by `m`.
pub fn fold_quantum(css: &CssCode, m: usize) -> Result<CssCode> {
    build_css(&css.c1.fold(m)?, &css.c2.fold(m)?)
}

/// Quantum GRS code: `C1 = RS[n, k1]`, `C2^perp = RS[n, n - k1]`, both with
/// unit multipliers and shared evaluation points.
pub fn quantum_grs(field: &Field, n: usize, k1: usize) -> Result<CssCode> {
    if 2 * k1 <= n || k1 >= n {
        bail!(Parameter, "quantum GRS needs n/2 < k1 < n, got k1={k1} n={n}");
    }
    let k2 = n - k1;
    let c1 = grs_build(&GrsSpec::rs(field, n, k1))?;
    let c2 = grs_build(&grs_dual(&GrsSpec::rs(field, n, k2)))?;
    build_css(&c1, &c2)
}

/// Integral dimension `n * (1 + R) / 2` for a rate given as a fraction.
pub fn qgrs_k1(n: usize, rate_num: usize, rate_den: usize) -> Result<usize> {
    let num = n * (rate_den + rate_num);
    if rate_num >= rate_den || num % (2 * rate_den) != 0 {
        bail!(Parameter, "n(1+R)/2 is not an integer for n={n}, R={rate_num}/{rate_den}");
    }
    Ok(num / (2 * rate_den))
}

/// Folded quantum RS code of rate `rate_num/rate_den`, folding `m`.
pub fn build_fqrs(field: &Field, n: usize, rate_num: usize, rate_den: usize, m: usize) -> Result<CssCode> {
    if m == 0 || n % m != 0 {
        bail!(Parameter, "folding {m} does not divide n={n}");
    }
    if n >= field.q() as usize {
        bail!(Parameter, "n={n} must be below q={}", field.q());
    }
    let k1 = qgrs_k1(n, rate_num, rate_den)?;
    fold_quantum(&quantum_grs(field, n, k1)?, m)
}

/// Classical list decoding strategy for one CSS side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QldMode {
    /// Syndrome-indexed error balls.
    Ball,
    /// Enumerate the classical code.
    BruteForce,
    /// Folded RS algebraic decoder with `s` variables.
    FrsAlgebraic { s: usize },
}

/// One stabilizer-distinct candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QldEntry {
    /// Lowest-weight member found for this class.
    pub op: PauliFrame,
    pub min_weight: usize,
    /// Some member has weight within the radius.
    pub within_radius: bool,
    /// Canonical stabilizer-coset representative.
    pub canonical: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct QldOutput {
    /// All `L_x * L_z` pairs.
    pub entries: Vec<QldEntry>,
    pub x_list: usize,
    pub z_list: usize,
}

impl QldOutput {
    pub fn raw_size(&self) -> usize {
        self.entries.len()
    }
    /// Entries with a member of weight within the radius.
    pub fn covered(&self) -> Vec<&QldEntry> {
        self.entries.iter().filter(|e| e.within_radius).collect()
    }
}

/// A reusable quantum list decoder at a fixed radius.
pub struct QldDecoder<'a> {
    css: &'a CssCode,
    radius: usize,
    mode: QldMode,
    tables: Option<(BallTable, BallTable)>,
}

impl<'a> QldDecoder<'a> {
    pub fn new(css: &'a CssCode, radius: usize, mode: QldMode) -> Result<QldDecoder<'a>> {
        let tables = match mode {
            QldMode::Ball => Some((BallTable::new(&css.c1, radius)?, BallTable::new(&css.c2, radius)?)),
            _ => None,
        };
        Ok(QldDecoder { css, radius, mode, tables })
    }

    fn side(&self, x_side: bool, received: &[u32]) -> Result<Vec<CosetEntry>> {
        let (cc, code) = if x_side { (self.css.x_cosets(), &self.css.c1) } else { (self.css.z_cosets(), &self.css.c2) };
        let words = match (&self.tables, self.mode) {
            (Some((tx, tz)), _) => (if x_side { tx } else { tz }).list(code, received),
            (None, QldMode::BruteForce) => crate::classical::list_decode(code, received, self.radius, ListMode::BruteForce)?,
            (None, QldMode::FrsAlgebraic { s }) => {
                crate::classical::list_decode(code, received, self.radius, ListMode::FrsAlgebraic { s })?
            }
            (None, QldMode::Ball) => unreachable!(),
        };
        Ok(group_cosets(&cc, words))
    }

    /// Candidates for syndrome `s`, following the CSS reduction: solve for
    /// any `(e_x, e_z)`, coset-list-decode each side, and pair the results.
    pub fn decode(&self, s: &Syndrome) -> Result<QldOutput> {
        let css = self.css;
        let f = css.field();
        let (ex, ez) = css.solve_syndrome(s)?;
        let xs = self.side(true, &ex)?;
        let zs = self.side(false, &ez)?;
        let diff = |e: &[u32], c: &[u32]| -> Vec<u32> { e.iter().zip(c).map(|(&a, &b)| f.sub(a, b)).collect() };
        let xerr: Vec<Vec<Vec<u32>>> = xs.iter().map(|g| g.members.iter().map(|c| diff(&ex, c)).collect()).collect();
        let zerr: Vec<Vec<Vec<u32>>> = zs.iter().map(|g| g.members.iter().map(|c| diff(&ez, c)).collect()).collect();
        let mut entries = Vec::with_capacity(xs.len() * zs.len());
        for xa in &xerr {
            for zb in &zerr {
                let mut best: Option<(usize, &Vec<u32>, &Vec<u32>)> = None;
                for a in xa {
                    for b in zb {
                        let w = pair_weight(a, b, css.ext());
                        if best.is_none_or(|(bw, _, _)| w < bw) {
                            best = Some((w, a, b));
                        }
                    }
                }
                let (w, a, b) = best.expect("coset groups are nonempty");
                let op = PauliFrame { x: a.clone(), z: b.clone(), phase: 0, ext: css.ext() };
                let canonical = css.stab.canonical(&op);
                entries.push(QldEntry { op, min_weight: w, within_radius: w <= self.radius, canonical });
            }
        }
        Ok(QldOutput { entries, x_list: xs.len(), z_list: zs.len() })
    }
}

/// One-shot quantum list decoding of syndrome `s` at `radius` errors.
pub fn qld_decode(css: &CssCode, s: &Syndrome, radius: usize, mode: QldMode) -> Result<QldOutput> {
    QldDecoder::new(css, radius, mode)?.decode(s)
}

/// Exhaustive map from syndrome to the stabilizer classes of Paulis with
/// weight at most `radius` carrying it.
pub fn exhaustive_qld(stab: &StabilizerCode, radius: usize) -> Result<HashMap<Vec<u32>, BTreeSet<Vec<u32>>>> {
    let per = (stab.field().q() as u64).pow(2 * stab.ext() as u32);
    let size = ball_size(per as u32, stab.n(), 1, radius);
    if size > ENUM_LIMIT {
        bail!(Infeasible, "exhaustive enumeration of {size} Paulis");
    }
    let n = stab.n();
    // Parallel over the first support position class to keep memory per worker bounded.
    let parts: Vec<HashMap<Vec<u32>, BTreeSet<Vec<u32>>>> = (0..=radius.min(n))
        .into_par_iter()
        .flat_map(|w| crate::classical::combinations(n, w).into_par_iter())
        .fold(HashMap::new, |mut acc: HashMap<Vec<u32>, BTreeSet<Vec<u32>>>, support| {
            crate::pauli::for_each_on_support(stab.field().q(), stab.ext(), n, &support, |e| {
                acc.entry(stab.syndrome_fq(e)).or_default().insert(stab.canonical(e));
            });
            acc
        })
        .collect();
    let mut out: HashMap<Vec<u32>, BTreeSet<Vec<u32>>> = HashMap::new();
    for part in parts {
        for (k, v) in part {
            out.entry(k).or_default().extend(v);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QldReport {
    pub radius: usize,
    pub syndromes: usize,
    pub max_count: usize,
    pub within_ell: bool,
    /// Histogram: list size -> number of syndromes.
    pub histogram: Vec<(usize, usize)>,
}

/// Count stabilizer-distinct low-weight Paulis per syndrome.
pub fn verify_qld(css: &CssCode, radius: usize, ell: usize) -> Result<QldReport> {
    let map = exhaustive_qld(&css.stab, radius)?;
    let mut hist: HashMap<usize, usize> = HashMap::new();
    for v in map.values() {
        *hist.entry(v.len()).or_default() += 1;
    }
    let max_count = hist.keys().copied().max().unwrap_or(0);
    let mut histogram: Vec<(usize, usize)> = hist.into_iter().collect();
    histogram.sort_unstable();
    Ok(QldReport { radius, syndromes: map.len(), max_count, within_ell: max_count <= ell, histogram })
}

/// Quantum list recovery. `sets[i]` holds single-symbol Paulis as
/// `(x_block, z_block)` pairs.
pub fn qlr_decode(
    css: &CssCode,
    s: &Syndrome,
    sets: &[Vec<(Vec<u32>, Vec<u32>)>],
    agree: usize,
    ell: usize,
    mode: RecoveryMode,
) -> Result<Vec<PauliFrame>> {
    let f = css.field();
    let ext = css.ext();
    if sets.len() != css.n() {
        bail!(Structural, "{} sets for {} symbols", sets.len(), css.n());
    }
    if let Some(i) = sets.iter().position(|st| st.len() > ell) {
        bail!(Parameter, "set {i} has {} > {ell} entries", sets[i].len());
    }
    let (ex, ez) = css.solve_syndrome(s)?;
    let shift = |e: &[u32], i: usize, v: &[u32]| -> Vec<u32> {
        (0..ext).map(|t| f.sub(e[i * ext + t], v[t])).collect()
    };
    let mut sx: Vec<Vec<Vec<u32>>> = Vec::new();
    let mut sz: Vec<Vec<Vec<u32>>> = Vec::new();
    for (i, st) in sets.iter().enumerate() {
        let mut a: Vec<Vec<u32>> = st.iter().map(|(x, _)| shift(&ex, i, x)).collect();
        let mut b: Vec<Vec<u32>> = st.iter().map(|(_, z)| shift(&ez, i, z)).collect();
        a.sort();
        a.dedup();
        b.sort();
        b.dedup();
        sx.push(a);
        sz.push(b);
    }
    let l1 = list_recover(&css.c1, &sx, agree, ell, mode)?;
    let l2 = list_recover(&css.c2, &sz, agree, ell, mode)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for c1 in &l1 {
        for c2 in &l2 {
            let x: Vec<u32> = ex.iter().zip(c1).map(|(&a, &b)| f.sub(a, b)).collect();
            let z: Vec<u32> = ez.iter().zip(c2).map(|(&a, &b)| f.sub(a, b)).collect();
            let hits = (0..css.n())
                .filter(|&i| {
                    let r = i * ext..(i + 1) * ext;
                    sets[i].iter().any(|(a, b)| a.as_slice() == &x[r.clone()] && b.as_slice() == &z[r.clone()])
                })
                .count();
            if hits >= agree {
                let op = PauliFrame { x, z, phase: 0, ext };
                if seen.insert(css.stab.canonical(&op)) {
                    out.push(op);
                }
            }
        }
    }
    Ok(out)
}

/// Random CSS code `[[n, k]]` from the nested-pair ensemble.
pub fn sample_random_css<R: Rng>(field: &Field, n: usize, k: usize, rng: &mut R) -> Result<CssCode> {
    if (n + k) % 2 != 0 || k > n {
        bail!(Parameter, "(n+k)/2 must be an integer with k <= n");
    }
    let (c1, c2) = crate::classical::sample_nested_pair(field, n, (n + k) / 2, rng)?;
    build_css(&c1, &c2)
}

/// Expand a code over GF(p^r) to F_p coordinates, in the polynomial basis
/// (`dual = false`) or its trace dual (`dual = true`). Symbols keep their
/// grouping: the result has `ext = r * code.ext()`.
pub fn expand_code(code: &LinearCode, base: &Field, dual: bool) -> Result<LinearCode> {
    let big = code.field();
    if big.p() != base.p() || !base.is_prime_field() {
        bail!(Unsupported, "expansion is to the prime subfield only");
    }
    let r = big.m() as usize;
    let basis = big.poly_basis();
    let mut rows = Matrix::zeros(0, code.len() * r);
    for i in 0..code.generator().rows {
        for &b in &basis {
            let v: Vec<u32> = code
                .generator()
                .row(i)
                .iter()
                .flat_map(|&y| {
                    let y = big.mul(y, b);
                    if dual {
                        big.dual_coords(y)
                    } else {
                        big.digits(y)
                    }
                })
                .collect();
            rows.push_row(&v);
        }
    }
    LinearCode::from_spanning(base, code.ext() * r, &rows)
}

/// Expand CSS(C1, C2) over GF(p^r) to a CSS code over F_p.
pub fn expand_css(c1: &LinearCode, c2: &LinearCode, base: &Field) -> Result<CssCode> {
    build_css(&expand_code(c1, base, false)?, &expand_code(c2, base, true)?)
}

/// Quantum Wozencraft-style ensemble: hyperplanes `C1, C2` of GF(p^r)^s with
/// `C1^perp ⊆ C2`, expanded to F_p. Block length `r s`, rate `1 - 2/s`.
pub fn sample_qwozencraft<R: Rng>(p: u32, r: u32, s: usize, rng: &mut R) -> Result<CssCode> {
    if s < 3 {
        bail!(Parameter, "need s >= 3 for positive rate");
    }
    let big = Field::new(p, r)?;
    let base = Field::prime(p)?;
    let q = big.q();
    let h: Vec<u32> = loop {
        let v: Vec<u32> = (0..s).map(|_| rng.gen_range(0..q)).collect();
        if v.iter().any(|&x| x != 0) {
            break v;
        }
    };
    let h2: Vec<u32> = loop {
        let v: Vec<u32> = (0..s).map(|_| rng.gen_range(0..q)).collect();
        if v.iter().any(|&x| x != 0) && big.dot(&h, &v) == 0 {
            break v;
        }
    };
    let c1 = LinearCode::from_parity(&big, 1, Matrix::from_rows(&[h], s))?;
    let c2 = LinearCode::from_parity(&big, 1, Matrix::from_rows(&[h2], s))?;
    let css = expand_css(&c1, &c2, &base)?;
    build_css(&css.c1.reblock(1)?, &css.c2.reblock(1)?)
}

/// q-ary entropy.
pub fn entropy_q(q: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return (q - 1.0).log(q);
    }
    x * (q - 1.0).log(q) - x * x.log(q) - (1.0 - x) * (1.0 - x).log(q)
}

/// Inverse of `entropy_q` on `[0, 1 - 1/q]`.
pub fn entropy_q_inv(q: f64, y: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0 - 1.0 / q);
    if y <= 0.0 {
        return 0.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if entropy_q(q, mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Whether the stabilizer row space of `a` equals that of `b`.
pub fn same_stabilizer(a: &StabilizerCode, b: &StabilizerCode) -> bool {
    a.field() == b.field() && a.len() == b.len() && a.stabilizer_space() == b.stabilizer_space()
}

/// Row space of a set of vectors (helper for comparisons in tests).
pub fn span_of(f: &Field, rows: &[Vec<u32>], cols: usize) -> RowSpace {
    RowSpace::from_rows(f, rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{even_weight, hamming};
    use crate::pauli::{compose, Class};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn steane() -> CssCode {
        let h = hamming(3).unwrap();
        build_css(&h, &h).unwrap()
    }

    #[test]
    fn steane_parameters() {
        let c = steane();
        assert_eq!((c.len(), c.k()), (7, 1));
        assert_eq!(c.distance().unwrap(), Some(3));
        assert_eq!(c.stab().brute_force_distance(1 << 20).unwrap(), Some(3));
    }

    #[test]
    fn steane_syndromes_and_classes() {
        let c = steane();
        let f = c.field().clone();
        let x1 = PauliFrame::x_only(vec![1, 0, 0, 0, 0, 0, 0], 1);
        let z2 = PauliFrame::z_only(vec![0, 1, 0, 0, 0, 0, 0], 1);
        let s = c.syndrome(&x1.mul(&f, &z2)).unwrap();
        assert_eq!(s, c.syndrome(&x1).unwrap().add(&f, &c.syndrome(&z2).unwrap()));
        let x = PauliFrame::x_only(vec![1], 1);
        let z = PauliFrame::z_only(vec![1], 1);
        assert_eq!(crate::pauli::commutation_phase(&f, &x, &z).unwrap(), 1);
        assert_eq!(c.stab().classify(&c.stab().generators()[0]).unwrap(), Class::Stabilizer);
        assert_eq!(c.stab().classify(&c.stab().logical_x()[0]).unwrap(), Class::Logical);
        assert_eq!(c.stab().classify(&x1).unwrap(), Class::Detectable);
        let (a, b) = c.stab().logical_coords(&c.stab().lift(&[1], &[0]));
        assert_eq!((a, b), (vec![1], vec![0]));
    }

    #[test]
    fn compose_with_inner_repetition() {
        let e = even_weight(4).unwrap();
        let outer = build_css(&e, &e).unwrap();
        let f = outer.field().clone();
        let inner = StabilizerCode::new(&f, 1, 2, vec![PauliFrame::z_only(vec![1, 1], 1)]).unwrap();
        let cc = compose(outer.stab(), &inner).unwrap();
        assert_eq!((cc.len(), cc.k(), cc.r()), (4, 1, 3));
        for g in outer.stab().generators() {
            assert!(cc.in_stabilizer(g));
        }
    }

    #[test]
    fn text_roundtrip() {
        let f = Field::new(3, 2).unwrap();
        let e = PauliFrame::new(vec![1, 2, 0, 5], vec![0, 8, 3, 1], 2).unwrap();
        let t = e.to_text(&f).unwrap();
        assert_eq!(PauliFrame::from_text(&f, &t, 2).unwrap(), e);
    }

    #[test]
    fn qgrs_shape_and_monomial_logicals() {
        let f = Field::prime(7).unwrap();
        let c = quantum_grs(&f, 6, 4).unwrap();
        assert_eq!((c.len(), c.k()), (6, 2));
        assert_eq!(c.distance().unwrap(), Some(3));
        for lx in c.stab().logical_x() {
            assert_eq!(c.c1().generator().rows, 4);
            assert!((0..4).any(|i| c.c1().generator().row(i) == lx.x.as_slice()));
        }
        let folded = fold_quantum(&c, 2).unwrap();
        assert_eq!((folded.n(), folded.ext(), folded.k()), (3, 2, 2));
    }

    #[test]
    fn qld_matches_exhaustive_on_four_qubit_code() {
        let e = even_weight(4).unwrap();
        let c = build_css(&e, &e).unwrap();
        assert_eq!(c.k(), 2);
        let map = exhaustive_qld(c.stab(), 1).unwrap();
        let dec = QldDecoder::new(&c, 1, QldMode::Ball).unwrap();
        let f = c.field().clone();
        for idx in 0..(1u64 << c.stab().r()) {
            let s = Syndrome::from_fq(&f, &crate::linalg::vector_at(2, c.stab().r(), idx));
            let out = dec.decode(&s).unwrap();
            let got: BTreeSet<Vec<u32>> = out.covered().iter().map(|e| e.canonical.clone()).collect();
            let want = map.get(&s.to_fq(&f)).cloned().unwrap_or_default();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn qlr_recovers_planted_error() {
        let f = Field::prime(7).unwrap();
        let c = build_fqrs(&f, 6, 1, 3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut x = vec![0u32; 6];
        let mut z = vec![0u32; 6];
        for j in 0..2 {
            x[j] = rng.gen_range(1..7);
            z[j + 2] = rng.gen_range(1..7);
        }
        let e = PauliFrame::new(x.clone(), z.clone(), 2).unwrap();
        let s = c.syndrome(&e).unwrap();
        let sets: Vec<Vec<(Vec<u32>, Vec<u32>)>> =
            (0..3).map(|i| vec![(x[2 * i..2 * i + 2].to_vec(), z[2 * i..2 * i + 2].to_vec())]).collect();
        let out = qlr_decode(&c, &s, &sets, 3, 1, RecoveryMode::BruteForce).unwrap();
        assert_eq!(out.len(), 1);
        assert!(c.stab().is_equivalent(&out[0], &e).unwrap());
    }

    #[test]
    fn random_ensembles_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = Field::prime(3).unwrap();
        let c = sample_random_css(&f, 8, 2, &mut rng).unwrap();
        assert_eq!(c.k(), 2);
        let w = sample_qwozencraft(2, 2, 4, &mut rng).unwrap();
        assert_eq!((w.len(), w.k(), w.ext()), (8, 4, 1));
    }

    #[test]
    fn entropy_inverse() {
        let x = entropy_q_inv(4.0, 0.5);
        assert!((entropy_q(4.0, x) - 0.5).abs() < 1e-9);
    }
}
