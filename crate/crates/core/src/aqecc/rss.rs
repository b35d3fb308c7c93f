//! Robust secret sharing: Shamir shares over F_a with pairwise one-time MACs.
//!
//! Share `i` carries its Shamir value `v_i in F_a^s`, a tag
//! `tau_ij = c_ij + <b_ij, v_i>` for every other party `j`, and the keys
//! `(b_ji, c_ji)` with which it checks every other share.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classical::{binomial, combinations};
use crate::error::{bail, Result};
use crate::gf::Field;
use crate::linalg::checked_count;

/// Cap on the randomness enumerated by [`check_privacy`].
pub const PRIVACY_ENUM_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone)]
pub struct RssScheme {
    field: Field,
    n: usize,
    s: usize,
    d: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Share {
    pub value: Vec<u32>,
    /// `tags[j]`, unused at the own index.
    pub tags: Vec<u32>,
    /// `key_b[j]`, `key_c[j]`: key checking share `j`.
    pub key_b: Vec<Vec<u32>>,
    pub key_c: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RssAbort {
    TooFewAccepted,
    Inconsistent,
}

impl RssScheme {
    /// `n` parties, secrets in `F_a^s`, threshold `d`. Needs `n >= 2d + 1`
    /// and `a > n` for distinct nonzero evaluation points.
    pub fn new(field: &Field, n: usize, s: usize, d: usize) -> Result<RssScheme> {
        if n < 2 * d + 1 {
            bail!(Parameter, "robust reconstruction needs n >= 2d + 1, got n={n} d={d}");
        }
        if field.q() as usize <= n {
            bail!(Parameter, "alphabet size {} must exceed the share count {n}", field.q());
        }
        if s == 0 {
            bail!(Parameter, "secret length must be positive");
        }
        Ok(RssScheme { field: field.clone(), n, s, d })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn d(&self) -> usize {
        self.d
    }

    /// Forgery bound: each of at most `d` modified shares needs `n - 2d`
    /// honest acceptances among `n - d`, each with chance `1/a`.
    pub fn eps(&self) -> f64 {
        let (n, d) = (self.n, self.d);
        let a = self.field.q() as f64;
        d as f64 * binomial(n - d, n - 2 * d) as f64 * a.powi(-((n - 2 * d) as i32))
    }

    /// Minimum number of other parties that must accept a share.
    pub fn acceptance_threshold(&self) -> usize {
        self.n - 1 - self.d
    }

    fn point(&self, i: usize) -> u32 {
        (i + 1) as u32
    }

    /// Length of the randomness vector consumed by [`RssScheme::share_with`].
    pub fn randomness_len(&self) -> usize {
        self.s * self.d + self.n * self.n * (self.s + 1)
    }
    fn coef_idx(&self, l: usize, e: usize) -> usize {
        l * self.d + (e - 1)
    }
    fn b_idx(&self, i: usize, j: usize, l: usize) -> usize {
        self.s * self.d + (i * self.n + j) * (self.s + 1) + l
    }
    fn c_idx(&self, i: usize, j: usize) -> usize {
        self.b_idx(i, j, self.s)
    }

    /// Randomness positions that influence the shares held by `set`.
    pub fn view_dependencies(&self, set: &[usize]) -> Vec<usize> {
        let mut deps: Vec<usize> = (0..self.s).flat_map(|l| (1..=self.d).map(move |e| (l, e))).map(|(l, e)| self.coef_idx(l, e)).collect();
        for &i in set {
            for j in 0..self.n {
                if j == i {
                    continue;
                }
                for (a, b) in [(i, j), (j, i)] {
                    deps.extend((0..self.s).map(|l| self.b_idx(a, b, l)));
                    deps.push(self.c_idx(a, b));
                }
            }
        }
        deps.sort_unstable();
        deps.dedup();
        deps
    }

    pub fn share<R: Rng>(&self, secret: &[u32], rng: &mut R) -> Result<Vec<Share>> {
        let a = self.field.q();
        let rand: Vec<u32> = (0..self.randomness_len()).map(|_| rng.gen_range(0..a)).collect();
        self.share_with(secret, &rand)
    }

    /// Deterministic sharing from an explicit randomness vector.
    pub fn share_with(&self, secret: &[u32], rand: &[u32]) -> Result<Vec<Share>> {
        let f = &self.field;
        if secret.len() != self.s || secret.iter().any(|&c| c >= f.q()) {
            bail!(Domain, "secret must be {} symbols of F_{}", self.s, f.q());
        }
        if rand.len() != self.randomness_len() {
            bail!(Structural, "randomness has length {}, expected {}", rand.len(), self.randomness_len());
        }
        let values: Vec<Vec<u32>> = (0..self.n)
            .map(|i| {
                let x = self.point(i);
                (0..self.s)
                    .map(|l| {
                        let mut acc = 0u32;
                        for e in (1..=self.d).rev() {
                            acc = f.mul(f.add(acc, rand[self.coef_idx(l, e)]), x);
                        }
                        f.add(acc, secret[l])
                    })
                    .collect()
            })
            .collect();
        let b = |i: usize, j: usize| -> Vec<u32> { (0..self.s).map(|l| rand[self.b_idx(i, j, l)]).collect() };
        Ok((0..self.n)
            .map(|i| {
                let tags = (0..self.n)
                    .map(|j| if j == i { 0 } else { f.add(rand[self.c_idx(i, j)], f.dot(&b(i, j), &values[i])) })
                    .collect();
                let key_b = (0..self.n).map(|j| if j == i { vec![0; self.s] } else { b(j, i) }).collect();
                let key_c = (0..self.n).map(|j| if j == i { 0 } else { rand[self.c_idx(j, i)] }).collect();
                Share { value: values[i].clone(), tags, key_b, key_c }
            })
            .collect())
    }

    fn well_formed(&self, sh: &Share) -> bool {
        let q = self.field.q();
        sh.value.len() == self.s
            && sh.tags.len() == self.n
            && sh.key_b.len() == self.n
            && sh.key_c.len() == self.n
            && sh.key_b.iter().all(|b| b.len() == self.s && b.iter().all(|&c| c < q))
            && sh.value.iter().chain(&sh.tags).chain(&sh.key_c).all(|&c| c < q)
    }

    /// Indices whose share passes at least the threshold of MAC checks.
    pub fn accepted(&self, shares: &[Share]) -> Vec<usize> {
        let f = &self.field;
        let ok: Vec<bool> = shares.iter().map(|s| self.well_formed(s)).collect();
        (0..self.n)
            .filter(|&i| {
                ok[i]
                    && (0..self.n)
                        .filter(|&j| {
                            j != i && ok[j] && {
                                let expect = f.add(shares[j].key_c[i], f.dot(&shares[j].key_b[i], &shares[i].value));
                                shares[i].tags[j] == expect
                            }
                        })
                        .count()
                        >= self.acceptance_threshold()
            })
            .collect()
    }

    /// Interpolate from accepted shares; abort on too few or inconsistent shares.
    pub fn reconstruct(&self, shares: &[Share]) -> Result<std::result::Result<Vec<u32>, RssAbort>> {
        if shares.len() != self.n {
            bail!(Structural, "expected {} shares, got {}", self.n, shares.len());
        }
        let f = &self.field;
        let acc = self.accepted(shares);
        if acc.len() < self.d + 1 {
            return Ok(Err(RssAbort::TooFewAccepted));
        }
        let basis = &acc[..=self.d];
        // Lagrange weights at a point x from the basis points.
        let weights = |x: u32| -> Vec<u32> {
            basis
                .iter()
                .map(|&i| {
                    let xi = self.point(i);
                    let mut w = 1u32;
                    for &j in basis {
                        if j != i {
                            let xj = self.point(j);
                            w = f.mul(w, f.mul(f.sub(x, xj), f.inv_nz(f.sub(xi, xj))));
                        }
                    }
                    w
                })
                .collect()
        };
        let eval = |x: u32| -> Vec<u32> {
            let w = weights(x);
            (0..self.s)
                .map(|l| basis.iter().zip(&w).fold(0u32, |a, (&i, &wi)| f.add(a, f.mul(wi, shares[i].value[l]))))
                .collect()
        };
        for &i in &acc[self.d + 1..] {
            if eval(self.point(i)) != shares[i].value {
                return Ok(Err(RssAbort::Inconsistent));
            }
        }
        Ok(Ok(eval(0)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivacyReport {
    pub sets_checked: usize,
    /// Randomness assignments enumerated per set and secret.
    pub assignments: u64,
    pub identical: bool,
    pub failing_set: Option<Vec<usize>>,
}

/// Exact check that the shares on every `d`-set have the same distribution
/// under the two secrets. Randomness outside the set's dependencies is held
/// at zero since it cannot affect the view.
pub fn check_privacy(scheme: &RssScheme, secret_a: &[u32], secret_b: &[u32]) -> Result<PrivacyReport> {
    let a = scheme.field.q();
    let mut report = PrivacyReport { sets_checked: 0, assignments: 0, identical: true, failing_set: None };
    for set in combinations(scheme.n, scheme.d) {
        let deps = scheme.view_dependencies(&set);
        let count = checked_count(a, deps.len(), PRIVACY_ENUM_LIMIT)?;
        let hist = |secret: &[u32]| -> Result<HashMap<Vec<Share>, u64>> {
            let mut h: HashMap<Vec<Share>, u64> = HashMap::new();
            let mut rand = vec![0u32; scheme.randomness_len()];
            let mut err = None;
            crate::linalg::for_each_vector(a, deps.len(), |vals| {
                if err.is_some() {
                    return;
                }
                for (&p, &v) in deps.iter().zip(vals) {
                    rand[p] = v;
                }
                match scheme.share_with(secret, &rand) {
                    Ok(sh) => *h.entry(set.iter().map(|&i| sh[i].clone()).collect()).or_default() += 1,
                    Err(e) => err = Some(e),
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(h),
            }
        };
        let same = hist(secret_a)? == hist(secret_b)?;
        report.sets_checked += 1;
        report.assignments = count;
        if !same {
            report.identical = false;
            report.failing_set = Some(set);
            break;
        }
    }
    Ok(report)
}

/// How an adversary rewrites the shares it controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShareAttack {
    /// Fresh uniform values for every field of the share.
    RandomReplace,
    /// Shift the value by a random nonzero offset, keep tags and keys.
    ShiftValue,
    /// Shift the value and replace tags by uniform guesses.
    ShiftAndGuess,
}

/// Apply `attack` to the shares at `positions`, using only those shares.
pub fn corrupt_shares<R: Rng>(scheme: &RssScheme, shares: &mut [Share], positions: &[usize], attack: ShareAttack, rng: &mut R) {
    let f = &scheme.field;
    let a = f.q();
    for &i in positions {
        let sh = &mut shares[i];
        match attack {
            ShareAttack::RandomReplace => {
                sh.value.iter_mut().chain(sh.tags.iter_mut()).chain(sh.key_c.iter_mut()).for_each(|c| *c = rng.gen_range(0..a));
                sh.key_b.iter_mut().flatten().for_each(|c| *c = rng.gen_range(0..a));
            }
            ShareAttack::ShiftValue | ShareAttack::ShiftAndGuess => {
                let l = rng.gen_range(0..scheme.s);
                sh.value[l] = f.add(sh.value[l], rng.gen_range(1..a));
                if attack == ShareAttack::ShiftAndGuess {
                    sh.tags.iter_mut().for_each(|c| *c = rng.gen_range(0..a));
                }
            }
        }
    }
}
