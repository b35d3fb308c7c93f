//! Adversary models, Monte-Carlo trial runners and result tables.
//!
//! Every trial draws its randomness from a generator seeded by
//! `trial_seed(master, index)`, so results do not depend on the thread count.

use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ael::{AelCode, AelUniqueDecoder};
use crate::aqecc::{corrupt_shares, Aqecc, DirectAqecc, PrivateAqecc, ShareAttack, TieBreak, TrialOutcome};
use crate::error::{bail, Error, Result};
use crate::pauli::{PauliFrame, Syndrome};

/// How the adversary picks its support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SupportModel {
    /// Uniform subset of size equal to the budget.
    RandomSubset,
    /// A fixed set of symbol positions.
    Fixed { positions: Vec<usize> },
    /// Every support; only meaningful for exact sweeps.
    ExhaustiveSweep,
}

/// What the adversary applies on its support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorModel {
    /// Uniform Pauli on each support symbol (identity allowed).
    UniformPauliOnSupport,
    /// Uniform nonidentity Pauli on each support symbol.
    NonidentityOnSupport,
    /// Uniform Paulis on a window of consecutive symbols.
    Burst,
    /// Every Pauli; only meaningful for exact sweeps.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryModel {
    pub support: SupportModel,
    pub error: ErrorModel,
    pub weight_budget: usize,
}

impl AdversaryModel {
    pub fn random(weight_budget: usize) -> AdversaryModel {
        AdversaryModel { support: SupportModel::RandomSubset, error: ErrorModel::UniformPauliOnSupport, weight_budget }
    }

    /// Budget `floor(delta n)`.
    pub fn with_delta(delta: f64, n: usize) -> AdversaryModel {
        AdversaryModel::random((delta * n as f64 + 1e-9).floor() as usize)
    }

    pub fn is_exhaustive(&self) -> bool {
        self.support == SupportModel::ExhaustiveSweep || self.error == ErrorModel::Exhaustive
    }

    /// Validate against a code with `n` symbols.
    pub fn check(&self, n: usize) -> Result<()> {
        if self.weight_budget > n {
            bail!(Config, "weight budget {} exceeds the {n} symbols", self.weight_budget);
        }
        if self.is_exhaustive() {
            bail!(Config, "exhaustive adversaries are run by the sweep commands, not by sampling");
        }
        if let SupportModel::Fixed { positions } = &self.support {
            if positions.len() > self.weight_budget || positions.iter().any(|&p| p >= n) {
                bail!(Config, "fixed support {positions:?} exceeds the budget or the length {n}");
            }
        }
        Ok(())
    }

    /// Support positions for one trial.
    pub fn sample_support<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        let w = self.weight_budget.min(n);
        let mut s = match (&self.support, self.error) {
            (SupportModel::Fixed { positions }, _) => positions.clone(),
            (_, ErrorModel::Burst) if w > 0 => {
                let start = rng.gen_range(0..n);
                (0..w).map(|i| (start + i) % n).collect()
            }
            _ => sample(rng, n, w).into_vec(),
        };
        s.sort_unstable();
        s
    }

    /// Sample an error on `n` symbols of `ext` qudits over `F_q`.
    pub fn sample_error<R: Rng>(&self, q: u32, ext: usize, n: usize, rng: &mut R) -> (Vec<usize>, PauliFrame) {
        let support = self.sample_support(n, rng);
        let mut e = PauliFrame::identity(ext, n);
        for &p in &support {
            loop {
                for t in 0..ext {
                    e.x[p * ext + t] = rng.gen_range(0..q);
                    e.z[p * ext + t] = rng.gen_range(0..q);
                }
                let nontrivial = (0..ext).any(|t| e.x[p * ext + t] != 0 || e.z[p * ext + t] != 0);
                if nontrivial || self.error != ErrorModel::NonidentityOnSupport {
                    break;
                }
            }
        }
        (support, e)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed derived from the master seed and the trial index.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

fn digest(values: &[u32]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &v in values {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

/// Wilson score interval at the given normal quantile.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the endpoints are exact at 0 and `trials` failures
    let lo = if failures == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if failures == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub weight: usize,
    pub support: Vec<usize>,
    pub key: String,
    pub syndrome: String,
    pub outcome: TrialOutcome,
    /// Direct mode: blocks left with a non-stabilizer residual; AEL mode:
    /// blocks carrying more errors than the inner radius.
    pub bad_blocks: Option<usize>,
    pub heavy_blocks: Option<usize>,
    pub tail: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mode: String,
    pub trials: u64,
    pub success: u64,
    pub miscorrect: u64,
    pub reject: u64,
    /// `failures / trials` as an exact fraction.
    pub failure_fraction: String,
    pub failure_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub bound: f64,
    pub bound_name: String,
    /// Wilson lower limit does not exceed the bound.
    pub pass: bool,
    pub mean_bad_blocks: Option<f64>,
    pub mean_tail: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

pub const CSV_HEADER: [&str; 10] =
    ["trial", "seed", "weight", "support", "key", "syndrome", "outcome", "bad_blocks", "heavy_blocks", "tail"];

impl ResultsTable {
    fn new(mode: &str, records: Vec<TrialRecord>, bound: f64, bound_name: &str) -> ResultsTable {
        let count = |o| records.iter().filter(|r| r.outcome == o).count() as u64;
        let trials = records.len() as u64;
        let (success, miscorrect, reject) =
            (count(TrialOutcome::Success), count(TrialOutcome::Miscorrect), count(TrialOutcome::Reject));
        let fails = miscorrect + reject;
        let (lo, hi) = wilson_interval(fails, trials, Z95);
        let mean = |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> Option<f64> {
            let v: Vec<f64> = records.iter().filter_map(f).collect();
            (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
        };
        let mean_bad_blocks = mean(&|r| r.bad_blocks.map(|b| b as f64));
        let mean_tail = mean(&|r| r.tail);
        let summary = Summary {
            mode: mode.into(),
            trials,
            success,
            miscorrect,
            reject,
            failure_fraction: format!("{fails}/{trials}"),
            failure_rate: if trials == 0 { 0.0 } else { fails as f64 / trials as f64 },
            wilson_low: lo,
            wilson_high: hi,
            bound,
            bound_name: bound_name.into(),
            pass: lo <= bound,
            mean_bad_blocks,
            mean_tail,
        };
        ResultsTable { records, summary }
    }

    pub fn failures(&self) -> u64 {
        self.summary.miscorrect + self.summary.reject
    }

    /// One row per trial, stable column order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(CSV_HEADER).map_err(io)?;
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            let support = r.support.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";");
            wr.write_record([
                r.trial.to_string(),
                r.seed.to_string(),
                r.weight.to_string(),
                support,
                r.key.clone(),
                r.syndrome.clone(),
                r.outcome.as_str().to_string(),
                opt(r.bad_blocks),
                opt(r.heavy_blocks),
                r.tail.map(|t| format!("{t:.6e}")).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        wr.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))?;
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.summary).map_err(|e| Error::Internal(e.to_string()))
    }
}

fn run_indexed<F>(trials: u64, master: u64, f: F) -> Result<Vec<TrialRecord>>
where
    F: Fn(u64, u64, &mut ChaCha8Rng) -> Result<TrialRecord> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(master, i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            f(i, seed, &mut rng)
        })
        .collect()
}

fn syndrome_text(s: &Syndrome) -> String {
    digest(&s.values)
}

/// Sample a key and an error, decode, and judge in the keyed composed code.
pub fn run_private_trials(
    pa: &PrivateAqecc,
    adv: &AdversaryModel,
    trials: u64,
    master: u64,
    tie: TieBreak,
) -> Result<ResultsTable> {
    adv.check(pa.n())?;
    let dec = pa.decoder()?;
    let q = pa.qld().field().q();
    let records = run_indexed(trials, master, |i, seed, rng| {
        let key = rng.gen_range(0..pa.key_count());
        let (support, e) = adv.sample_error(q, 1, pa.n(), rng);
        let outcome = dec.outcome(key, &e, tie)?;
        Ok(TrialRecord {
            trial: i,
            seed,
            weight: e.weight(),
            support,
            key: key.to_string(),
            syndrome: syndrome_text(&pa.qld_syndrome(&e)?),
            outcome,
            bad_blocks: None,
            heavy_blocks: None,
            tail: None,
        })
    })?;
    Ok(ResultsTable::new("private", records, pa.failure_bound(), "2 L eps"))
}

/// Which layers the adversary corrupts in keyed-code trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layers {
    Both,
    SharesOnly,
}

/// Share the key, corrupt the same positions in both layers, reconstruct
/// the key and decode with it. A wrong or aborted key counts as a failure.
pub fn run_aqecc_trials(
    aq: &Aqecc,
    adv: &AdversaryModel,
    trials: u64,
    master: u64,
    attack: ShareAttack,
    layers: Layers,
    tie: TieBreak,
) -> Result<ResultsTable> {
    let pa = aq.private();
    adv.check(pa.n())?;
    let dec = pa.decoder()?;
    let q = pa.qld().field().q();
    let records = run_indexed(trials, master, |i, seed, rng| {
        let key = rng.gen_range(0..pa.key_count());
        let mut shares = aq.rss().share(&aq.key_to_secret(key), rng)?;
        let (support, mut e) = adv.sample_error(q, 1, pa.n(), rng);
        if layers == Layers::SharesOnly {
            e = PauliFrame::identity(1, pa.n());
        }
        corrupt_shares(aq.rss(), &mut shares, &support, attack, rng);
        let outcome = match aq.rss().reconstruct(&shares)? {
            Err(_) => TrialOutcome::Reject,
            Ok(secret) => match aq.secret_to_key(&secret) {
                Some(k) if k == key => dec.outcome(key, &e, tie)?,
                _ => TrialOutcome::Miscorrect,
            },
        };
        Ok(TrialRecord {
            trial: i,
            seed,
            weight: e.weight(),
            support,
            key: key.to_string(),
            syndrome: syndrome_text(&pa.qld_syndrome(&e)?),
            outcome,
            bad_blocks: None,
            heavy_blocks: None,
            tail: None,
        })
    })?;
    let (bound, name) = match layers {
        Layers::Both => (aq.failure_bound(), "2 L eps + eps_rss"),
        Layers::SharesOnly => (aq.rss().eps(), "eps_rss"),
    };
    Ok(ResultsTable::new("aqecc", records, bound, name))
}

/// Unique decoding of an AEL code; records blocks loaded beyond the inner
/// unique radius.
pub fn run_ael_trials(ael: &AelCode, adv: &AdversaryModel, trials: u64, master: u64) -> Result<ResultsTable> {
    let n = ael.n();
    adv.check(n)?;
    let dec = AelUniqueDecoder::new(ael)?;
    let din = ael.inner.distance()?.unwrap_or(1);
    let tin = din.saturating_sub(1) / 2;
    let f = ael.code.field().clone();
    let stab = ael.code.stab();
    let records = run_indexed(trials, master, |i, seed, rng| {
        let (support, e) = adv.sample_error(f.q(), ael.code.ext(), n, rng);
        let mut t = vec![false; n];
        support.iter().for_each(|&p| t[p] = true);
        let heavy = ael.block_load(&t).iter().filter(|&&w| w > tin).count();
        let out = dec.decode(&e);
        let outcome = match out.correction {
            None => TrialOutcome::Reject,
            Some(c) if stab.is_equivalent(&c, &e)? => TrialOutcome::Success,
            Some(_) => TrialOutcome::Miscorrect,
        };
        Ok(TrialRecord {
            trial: i,
            seed,
            weight: e.weight(),
            support,
            key: String::new(),
            syndrome: syndrome_text(&stab.syndrome(&e)?),
            outcome,
            bad_blocks: Some(out.failed_blocks),
            heavy_blocks: Some(heavy),
            tail: None,
        })
    })?;
    Ok(ResultsTable::new("ael", records, 0.0, "unique radius"))
}

/// Direct construction: independent key per block, errors on physical symbols.
pub fn run_direct_trials(dc: &DirectAqecc, adv: &AdversaryModel, trials: u64, master: u64) -> Result<ResultsTable> {
    let n = dc.n();
    adv.check(n)?;
    let dec = dc.decoder()?;
    let q = dc.inner().qld().field().q();
    let r = dc.inner().n();
    let keys_n = dc.inner().key_count();
    let records = run_indexed(trials, master, |i, seed, rng| {
        let keys: Vec<usize> = (0..n).map(|_| rng.gen_range(0..keys_n)).collect();
        let (support, e) = adv.sample_error(q, r, n, rng);
        let flat = PauliFrame { ext: 1, ..e };
        let out = dec.run(&keys, &flat)?;
        let key_digest = digest(&keys.iter().map(|&k| k as u32).collect::<Vec<_>>());
        Ok(TrialRecord {
            trial: i,
            seed,
            weight: support.len(),
            support,
            key: key_digest,
            syndrome: String::new(),
            outcome: out.outcome,
            bad_blocks: Some(out.bad_blocks),
            heavy_blocks: Some(out.heavy_blocks),
            tail: Some(dc.binomial_tail(out.heavy_blocks)),
        })
    })?;
    let mut table = ResultsTable::new("direct", records, 0.0, "binomial tail");
    let tail = table.summary.mean_tail.unwrap_or(0.0);
    table.summary.bound = tail;
    table.summary.pass = table.summary.wilson_low <= tail;
    Ok(table)
}

/// Empty table for zero-trial runs of any mode.
pub fn empty_table(mode: &str, bound: f64, bound_name: &str) -> ResultsTable {
    ResultsTable::new(mode, Vec::new(), bound, bound_name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aqecc::{build_aqecc, build_ptc, PtcConstruction, RssScheme};
    use crate::css::quantum_grs;
    use crate::gf::Field;

    fn tiny() -> PrivateAqecc {
        let f = Field::prime(7).unwrap();
        PrivateAqecc::new(quantum_grs(&f, 6, 5).unwrap(), build_ptc(&f, 2, 4, PtcConstruction::Explicit).unwrap(), 1)
            .unwrap()
    }

    #[test]
    fn wilson_matches_reference() {
        let (lo, hi) = wilson_interval(10, 100, Z95);
        assert!((lo - 0.0552).abs() < 1e-3 && (hi - 0.1744).abs() < 1e-3);
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
        assert_eq!(wilson_interval(0, 50, Z95).0, 0.0);
        assert_eq!(wilson_interval(50, 50, Z95).1, 1.0);
    }

    #[test]
    fn adversary_respects_budget() {
        let adv = AdversaryModel { support: SupportModel::RandomSubset, error: ErrorModel::Burst, weight_budget: 3 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (s, e) = adv.sample_error(5, 2, 10, &mut rng);
            assert_eq!(s.len(), 3);
            assert!(e.weight() <= 3);
            assert!(e.support().iter().all(|p| s.contains(p)));
        }
        assert!(AdversaryModel::random(11).check(10).is_err());
    }

    #[test]
    fn private_trials_are_deterministic_and_bounded() {
        let pa = tiny();
        let a = run_private_trials(&pa, &AdversaryModel::random(1), 300, 7, TieBreak::LowestIndex).unwrap();
        let b = run_private_trials(&pa, &AdversaryModel::random(1), 300, 7, TieBreak::LowestIndex).unwrap();
        assert_eq!(a, b);
        assert!(a.summary.pass);
        let zero = run_private_trials(&pa, &AdversaryModel::random(0), 50, 7, TieBreak::Strict).unwrap();
        assert_eq!(zero.failures(), 0);
        let mut out = Vec::new();
        a.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 301);
    }

    #[test]
    fn aqecc_trials_budget_zero_and_shares_only() {
        let pa = tiny();
        let f7 = Field::prime(7).unwrap();
        let aq = build_aqecc(pa, RssScheme::new(&f7, 6, 2, 1).unwrap()).unwrap();
        let t0 = run_aqecc_trials(&aq, &AdversaryModel::random(0), 100, 1, ShareAttack::RandomReplace, Layers::Both, TieBreak::LowestIndex).unwrap();
        assert_eq!(t0.failures(), 0);
        let ts = run_aqecc_trials(&aq, &AdversaryModel::random(1), 500, 1, ShareAttack::ShiftValue, Layers::SharesOnly, TieBreak::LowestIndex).unwrap();
        assert!(ts.summary.pass);
    }
}
