//! Unique decoding, list decoding, coset list decoding and list recovery.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{binomial, frs_list_decode, frs_list_recover, LinearCode, ENUM_LIMIT};
use crate::error::{bail, Result};
use crate::linalg::Matrix;
use crate::poly;

/// Number of errors tolerated at relative radius `tau` (rounded down).
pub fn radius_of(tau: f64, n: usize) -> usize {
    (tau * n as f64 + 1e-9).floor().max(0.0) as usize
}

/// Number of agreements required at relative agreement `eta` (rounded up).
pub fn agreement_of(eta: f64, n: usize) -> usize {
    (eta * n as f64 - 1e-9).ceil().max(0.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniqueMode {
    Auto,
    BerlekampWelch,
    SyndromeTable,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniqueOutcome {
    pub codeword: Option<Vec<u32>>,
    /// The radius exceeds half the minimum distance.
    pub beyond_half_distance: bool,
    /// More than one codeword lies within the radius.
    pub ambiguous: bool,
}

/// Minimum distance when cheaply known (GRS) or computable by brute force.
pub fn known_distance(code: &LinearCode) -> Option<usize> {
    if let Some(g) = code.grs() {
        if code.ext() == 1 {
            return Some(code.n() - g.k + 1);
        }
    }
    code.min_distance().ok().flatten()
}

/// Return the unique codeword within `radius` symbols of `received`, if any.
pub fn unique_decode(code: &LinearCode, received: &[u32], radius: usize, mode: UniqueMode) -> Result<UniqueOutcome> {
    if received.len() != code.len() {
        bail!(Structural, "received word has length {}, expected {}", received.len(), code.len());
    }
    let beyond = known_distance(code).is_some_and(|d| 2 * radius > d.saturating_sub(1));
    let mode = match mode {
        UniqueMode::Auto if code.grs().is_some() && code.ext() == 1 && !beyond => UniqueMode::BerlekampWelch,
        UniqueMode::Auto if code.codeword_count().is_ok() => UniqueMode::BruteForce,
        UniqueMode::Auto => UniqueMode::SyndromeTable,
        m => m,
    };
    let candidates = match mode {
        UniqueMode::BerlekampWelch => berlekamp_welch(code, received, radius)?.into_iter().collect(),
        UniqueMode::BruteForce => brute_force_ball(code, received, radius)?,
        UniqueMode::SyndromeTable => {
            let table = BallTable::new(code, radius)?;
            table.list(code, received)
        }
        UniqueMode::Auto => unreachable!(),
    };
    let ambiguous = candidates.len() > 1;
    Ok(UniqueOutcome {
        codeword: if candidates.len() == 1 { candidates.into_iter().next() } else { None },
        beyond_half_distance: beyond,
        ambiguous,
    })
}

/// Berlekamp-Welch for GRS codes with `ext = 1`.
pub fn berlekamp_welch(code: &LinearCode, received: &[u32], radius: usize) -> Result<Option<Vec<u32>>> {
    let Some(g) = code.grs() else {
        bail!(Unsupported, "Berlekamp-Welch needs a GRS code");
    };
    if code.ext() != 1 {
        bail!(Unsupported, "Berlekamp-Welch runs on unfolded GRS codes");
    }
    let f = code.field();
    let n = code.n();
    let k = g.k;
    let e = radius.min((n - k) / 2);
    let pts: Vec<u32> = (0..n).map(|i| f.pow(g.gamma, i as u64)).collect();
    let r: Vec<u32> = (0..n).map(|i| f.mul(received[i], f.inv_nz(g.multipliers[i]))).collect();
    // Unknowns: E_0..E_{e-1} (E monic of degree e), Q_0..Q_{e+k-1}.
    // Q(a_i) - r_i E(a_i) = r_i a_i^e.
    let cols = e + e + k;
    let mut a = Matrix::zeros(n, cols);
    let mut b = vec![0u32; n];
    for i in 0..n {
        let mut pw = 1u32;
        for j in 0..e + k {
            if j < e {
                a.set(i, j, f.neg(f.mul(r[i], pw)));
            }
            a.set(i, e + j, pw);
            pw = f.mul(pw, pts[i]);
        }
        b[i] = f.mul(r[i], f.pow(pts[i], e as u64));
    }
    let Some(sol) = a.solve(f, &b) else {
        return Ok(None);
    };
    let mut epoly = sol[..e].to_vec();
    epoly.push(1);
    let qpoly = sol[e..].to_vec();
    let (quot, rem) = poly::divmod(f, &qpoly, &epoly);
    if !rem.is_empty() || quot.len() > k {
        return Ok(None);
    }
    let mut msg = quot;
    msg.resize(k, 0);
    let cw = code.encode(&msg);
    Ok((code.distance_between(&cw, received) <= radius).then_some(cw))
}

/// Same contract as [`berlekamp_welch`], decoded with Gao's partial
/// extended Euclid in `O(n^2)` field operations.
pub fn gao_decode(code: &LinearCode, received: &[u32], radius: usize) -> Result<Option<Vec<u32>>> {
    let Some(g) = code.grs() else {
        bail!(Unsupported, "Gao decoding needs a GRS code");
    };
    if code.ext() != 1 {
        bail!(Unsupported, "Gao decoding runs on unfolded GRS codes");
    }
    let f = code.field();
    let n = code.n();
    let k = g.k;
    let pts: Vec<u32> = (0..n).map(|i| f.pow(g.gamma, i as u64)).collect();
    let r: Vec<u32> = (0..n).map(|i| f.mul(received[i], f.inv_nz(g.multipliers[i]))).collect();
    // g0 = prod (x - a_i)
    let mut g0 = vec![1u32];
    for &a in &pts {
        g0 = poly::mul(f, &g0, &[f.neg(a), 1]);
    }
    // g1 interpolates r: sum r_i / g0'(a_i) * g0 / (x - a_i)
    let deriv: Vec<u32> = (1..g0.len()).map(|i| f.mul(g0[i], (i as u64 % f.p() as u64) as u32)).collect();
    let mut g1 = vec![0u32; n];
    for i in 0..n {
        if r[i] == 0 {
            continue;
        }
        let c = f.mul(r[i], f.inv_nz(poly::eval(f, &deriv, pts[i])));
        // synthetic division of g0 by (x - a_i)
        let mut carry = 0u32;
        for j in (0..n).rev() {
            carry = f.add(g0[j + 1], f.mul(carry, pts[i]));
            g1[j] = f.add(g1[j], f.mul(c, carry));
        }
    }
    poly::trim(&mut g1);
    let (mut r0, mut r1) = (g0, g1);
    let (mut v0, mut v1) = (Vec::new(), vec![1u32]);
    while poly::degree(&r1).is_some_and(|d| 2 * d >= n + k) {
        let (q, rem) = poly::divmod(f, &r0, &r1);
        let qv = poly::mul(f, &q, &v1);
        let mut v2 = v0;
        v2.resize(v2.len().max(qv.len()), 0);
        for (a, b) in v2.iter_mut().zip(&qv) {
            *a = f.sub(*a, *b);
        }
        poly::trim(&mut v2);
        (r0, r1) = (r1, rem);
        (v0, v1) = (v1, v2);
    }
    let (quot, rem) = poly::divmod(f, &r1, &v1);
    if !rem.is_empty() || quot.len() > k {
        return Ok(None);
    }
    let mut msg = quot;
    msg.resize(k, 0);
    let cw = code.encode(&msg);
    Ok((code.distance_between(&cw, received) <= radius).then_some(cw))
}

/// All codewords within `radius` by enumerating the code.
pub fn brute_force_ball(code: &LinearCode, received: &[u32], radius: usize) -> Result<Vec<Vec<u32>>> {
    let count = code.codeword_count()?;
    let chunk = 4096u64;
    let chunks = count.div_ceil(chunk);
    let found: Vec<Vec<Vec<u32>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            for i in c * chunk..((c + 1) * chunk).min(count) {
                let cw = code.codeword_at(i);
                if code.distance_between(&cw, received) <= radius {
                    out.push(cw);
                }
            }
            out
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// Visit every vector of length `n*ext` with symbol weight at most `radius`.
pub fn for_each_low_weight(q: u32, n: usize, ext: usize, radius: usize, mut visit: impl FnMut(&[u32])) {
    let mut v = vec![0u32; n * ext];
    fn rec(
        q: u32,
        n: usize,
        ext: usize,
        start: usize,
        left: usize,
        v: &mut Vec<u32>,
        visit: &mut dyn FnMut(&[u32]),
    ) {
        visit(v);
        if left == 0 {
            return;
        }
        for pos in start..n {
            // every nonzero block value at `pos`
            let total = (q as u64).pow(ext as u32);
            for val in 1..total {
                let mut x = val;
                for t in 0..ext {
                    v[pos * ext + t] = (x % q as u64) as u32;
                    x /= q as u64;
                }
                rec(q, n, ext, pos + 1, left - 1, v, visit);
            }
            for t in 0..ext {
                v[pos * ext + t] = 0;
            }
        }
    }
    rec(q, n, ext, 0, radius, &mut v, &mut visit);
}

/// Number of vectors of symbol weight at most `radius`.
pub fn ball_size(q: u32, n: usize, ext: usize, radius: usize) -> u64 {
    let per = (q as u64).saturating_pow(ext as u32) - 1;
    (0..=radius.min(n)).fold(0u64, |acc, w| acc.saturating_add(binomial(n, w).saturating_mul(per.saturating_pow(w as u32))))
}

/// Syndrome-indexed table of every low-weight error pattern.
#[derive(Debug, Clone)]
pub struct BallTable {
    pub radius: usize,
    map: HashMap<Vec<u32>, Vec<Vec<u32>>>,
}

impl BallTable {
    pub fn new(code: &LinearCode, radius: usize) -> Result<BallTable> {
        let size = ball_size(code.field().q(), code.n(), code.ext(), radius);
        if size > ENUM_LIMIT {
            bail!(Infeasible, "error ball of {size} patterns");
        }
        let mut map: HashMap<Vec<u32>, Vec<Vec<u32>>> = HashMap::new();
        for_each_low_weight(code.field().q(), code.n(), code.ext(), radius, |e| {
            map.entry(code.syndrome(e)).or_default().push(e.to_vec());
        });
        Ok(BallTable { radius, map })
    }

    /// Error patterns with the given syndrome.
    pub fn errors(&self, syndrome: &[u32]) -> &[Vec<u32>] {
        self.map.get(syndrome).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Codewords within the radius of `received`.
    pub fn list(&self, code: &LinearCode, received: &[u32]) -> Vec<Vec<u32>> {
        let f = code.field();
        self.errors(&code.syndrome(received))
            .iter()
            .map(|e| received.iter().zip(e).map(|(&r, &x)| f.sub(r, x)).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListMode {
    /// Enumerate all codewords.
    BruteForce,
    /// Enumerate the error ball by syndrome.
    Ball,
    /// Folded Reed-Solomon interpolation with `s` variables.
    FrsAlgebraic { s: usize },
}

/// Sort codewords by message vector.
pub fn sort_by_message(code: &LinearCode, words: &mut [Vec<u32>]) {
    words.sort_by_cached_key(|w| code.message(w));
}

/// Every codeword within `radius` symbols of `received`, in message order.
pub fn list_decode(code: &LinearCode, received: &[u32], radius: usize, mode: ListMode) -> Result<Vec<Vec<u32>>> {
    if received.len() != code.len() {
        bail!(Structural, "received word has length {}, expected {}", received.len(), code.len());
    }
    let mut out = match mode {
        ListMode::BruteForce => brute_force_ball(code, received, radius)?,
        ListMode::Ball => BallTable::new(code, radius)?.list(code, received),
        ListMode::FrsAlgebraic { s } => frs_list_decode(code, received, radius, s)?,
    };
    sort_by_message(code, &mut out);
    Ok(out)
}

/// One coset of `C/C'` meeting the ball.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetEntry {
    /// Canonical representative (reduced modulo the subcode).
    pub rep: Vec<u32>,
    /// Every codeword of this coset inside the ball.
    pub members: Vec<Vec<u32>>,
}

/// Group ball codewords by coset of the subcode.
pub fn group_cosets(cc: &super::CosetCode, words: Vec<Vec<u32>>) -> Vec<CosetEntry> {
    let mut groups: Vec<CosetEntry> = Vec::new();
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    for w in words {
        let rep = cc.canonical(&w);
        match index.get(&rep) {
            Some(&i) => groups[i].members.push(w),
            None => {
                index.insert(rep.clone(), groups.len());
                groups.push(CosetEntry { rep, members: vec![w] });
            }
        }
    }
    groups.sort_by(|a, b| a.rep.cmp(&b.rep));
    groups
}

/// One representative per coset of `C/C'` meeting the ball of `radius`.
pub fn coset_list_decode(
    cc: &super::CosetCode,
    received: &[u32],
    radius: usize,
    mode: ListMode,
) -> Result<Vec<CosetEntry>> {
    let words = list_decode(&cc.outer, received, radius, mode)?;
    Ok(group_cosets(cc, words))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoveryMode {
    BruteForce,
    FrsAlgebraic { s: usize },
}

/// Every codeword whose symbols lie in `sets[i]` at `agree` or more positions.
/// Each set entry is one alphabet symbol (`ext` base coordinates).
pub fn list_recover(
    code: &LinearCode,
    sets: &[Vec<Vec<u32>>],
    agree: usize,
    ell: usize,
    mode: RecoveryMode,
) -> Result<Vec<Vec<u32>>> {
    if sets.len() != code.n() {
        bail!(Structural, "{} sets for block length {}", sets.len(), code.n());
    }
    if let Some(i) = sets.iter().position(|s| s.len() > ell) {
        bail!(Parameter, "set {i} has {} > {ell} entries", sets[i].len());
    }
    if sets.iter().flatten().any(|s| s.len() != code.ext()) {
        bail!(Structural, "set entries must be alphabet symbols of width {}", code.ext());
    }
    let mut out = match mode {
        RecoveryMode::BruteForce => {
            let count = code.codeword_count()?;
            (0..count)
                .into_par_iter()
                .filter_map(|i| {
                    let cw = code.codeword_at(i);
                    (agreement(code, &cw, sets) >= agree).then_some(cw)
                })
                .collect()
        }
        RecoveryMode::FrsAlgebraic { s } => frs_list_recover(code, sets, agree, s)?,
    };
    sort_by_message(code, &mut out);
    Ok(out)
}

/// Number of positions whose symbol lies in the corresponding set.
pub fn agreement(code: &LinearCode, cw: &[u32], sets: &[Vec<Vec<u32>>]) -> usize {
    cw.chunks(code.ext()).zip(sets).filter(|(sym, set)| set.iter().any(|s| s.as_slice() == *sym)).count()
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::gf::Field;

    fn rs45() -> LinearCode {
        let f = Field::prime(5).unwrap();
        grs_build(&GrsSpec { field: f, n: 4, k: 2, gamma: 2, multipliers: vec![1; 4] }).unwrap()
    }

    #[test]
    fn gao_matches_berlekamp_welch() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (q, m, n, k) in [(7u32, 1u32, 6usize, 2usize), (2, 3, 7, 3), (11, 3, 40, 25), (3, 2, 8, 5)] {
            let f = Field::new(q, m).unwrap();
            let mut spec = GrsSpec::rs(&f, n, k);
            spec.multipliers = (0..n).map(|_| rng.gen_range(1..f.q())).collect();
            let code = grs_build(&spec).unwrap();
            let t = (n - k) / 2;
            for _ in 0..60 {
                let msg: Vec<u32> = (0..k).map(|_| rng.gen_range(0..f.q())).collect();
                let mut w = code.encode(&msg);
                for _ in 0..rng.gen_range(0..=t + 2) {
                    let i = rng.gen_range(0..n);
                    w[i] = rng.gen_range(0..f.q());
                }
                for radius in [t, t.saturating_sub(1)] {
                    assert_eq!(gao_decode(&code, &w, radius).unwrap(), berlekamp_welch(&code, &w, radius).unwrap());
                }
            }
        }
    }

    #[test]
    fn unique_decode_modes_agree() {
        let c = rs45();
        let r = vec![2, 3, 1, 4];
        for mode in [UniqueMode::BerlekampWelch, UniqueMode::BruteForce, UniqueMode::SyndromeTable, UniqueMode::Auto] {
            let out = unique_decode(&c, &r, 1, mode).unwrap();
            assert_eq!(out.codeword, Some(vec![2, 3, 0, 4]), "{mode:?}");
        }
        let cw = vec![2, 3, 0, 4];
        assert_eq!(unique_decode(&c, &cw, 0, UniqueMode::Auto).unwrap().codeword, Some(cw));
    }

    #[test]
    fn ambiguity_flagged_beyond_half_distance() {
        let c = rs45();
        // midpoint between 0 and a weight-3 codeword differs from each in 2 places
        let a = c.encode(&[1, 1]); // (2,3,0,4)
        let mid = vec![a[0], a[1], 0, 0];
        let out = unique_decode(&c, &mid, 2, UniqueMode::BruteForce).unwrap();
        assert!(out.beyond_half_distance);
        assert!(out.ambiguous);
        assert_eq!(out.codeword, None);
    }

    #[test]
    fn list_decode_examples() {
        let c = rs45();
        assert_eq!(list_decode(&c, &[2, 3, 1, 4], 1, ListMode::BruteForce).unwrap(), vec![vec![2, 3, 0, 4]]);
        assert_eq!(list_decode(&c, &[2, 3, 1, 4], 0, ListMode::BruteForce).unwrap(), Vec::<Vec<u32>>::new());
        let a = list_decode(&c, &[2, 3, 1, 1], 2, ListMode::BruteForce).unwrap();
        let b = list_decode(&c, &[2, 3, 1, 1], 2, ListMode::Ball).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hamming_coset_decoding() {
        let h = hamming(3).unwrap();
        let cc = CosetCode::new(h.clone(), h.dual()).unwrap();
        let cw = h.codeword_at(11);
        let mut r = cw.clone();
        r[4] ^= 1;
        let out = coset_list_decode(&cc, &r, 1, ListMode::BruteForce).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].members.contains(&cw));
        let same = CosetCode::new(h.clone(), h.clone()).unwrap();
        assert!(coset_list_decode(&same, &r, 2, ListMode::BruteForce).unwrap().len() <= 1);
    }

    #[test]
    fn list_recovery_examples() {
        let c = rs45();
        let truth = c.encode(&[3, 4]);
        let sets: Vec<Vec<Vec<u32>>> = truth.iter().map(|&t| vec![vec![t], vec![(t + 1) % 5]]).collect();
        let out = list_recover(&c, &sets, 4, 2, RecoveryMode::BruteForce).unwrap();
        assert!(out.contains(&truth));
        let full: Vec<Vec<Vec<u32>>> = (0..4).map(|_| (0..5).map(|v| vec![v]).collect()).collect();
        assert_eq!(list_recover(&c, &full, 4, 5, RecoveryMode::BruteForce).unwrap().len(), 25);
        assert!(list_recover(&c, &full, 4, 4, RecoveryMode::BruteForce).is_err());
        let singles: Vec<Vec<Vec<u32>>> = [2, 3, 1, 4].iter().map(|&t| vec![vec![t]]).collect();
        assert_eq!(
            list_recover(&c, &singles, 3, 1, RecoveryMode::BruteForce).unwrap(),
            list_decode(&c, &[2, 3, 1, 4], 1, ListMode::BruteForce).unwrap()
        );
    }
}
