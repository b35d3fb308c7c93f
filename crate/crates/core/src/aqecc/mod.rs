//! Private and keyed approximate quantum codes: purity-testing families,
//! the list-then-filter decoder, robust secret sharing of the key, the
//! direct concatenated construction, and parameter/bound calculators.

pub mod direct;
pub mod plan;
pub mod ptc;
pub mod rss;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::css::{verify_qld, CssCode, QldDecoder, QldMode};
use crate::error::{bail, Error, Result};
use crate::pauli::{compose, for_each_pauli_up_to, symplectic_form, PauliFrame, StabilizerCode, Syndrome};

pub use direct::{build_direct_aqecc, DirectAqecc, DirectOutcome};
pub use plan::{plan_parameters, robust_singleton_bound, singleton_check, ParameterPlan, SingletonReport};
pub use ptc::{build_ptc, measure_eps, ptc_target, EpsMeasurement, PtcConstruction, PtcFamily};
pub use rss::{check_privacy, corrupt_shares, PrivacyReport, RssAbort, RssScheme, Share, ShareAttack};

/// Trial classification shared by the decoders and the simulators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialOutcome {
    Success,
    Miscorrect,
    Reject,
}

impl TrialOutcome {
    pub fn is_failure(self) -> bool {
        self != TrialOutcome::Success
    }
    pub fn as_str(self) -> &'static str {
        match self {
            TrialOutcome::Success => "success",
            TrialOutcome::Miscorrect => "miscorrect",
            TrialOutcome::Reject => "reject",
        }
    }
}

/// Tie-breaking among candidates whose keyed syndrome matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Smallest canonical stabilizer-coset representative.
    #[default]
    LowestIndex,
    /// Fail whenever any matching candidate would miscorrect.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrivateDecision {
    Correction(PauliFrame),
    Reject,
}

/// A list-decodable CSS code composed with a keyed PTC family.
#[derive(Debug, Clone)]
pub struct PrivateAqecc {
    qld: CssCode,
    ptc: PtcFamily,
    radius: usize,
    list_size: usize,
    composed: Vec<StabilizerCode>,
}

impl PrivateAqecc {
    /// The QLD code must encode exactly `ptc.n()` qudits and have distance
    /// above `radius`; the list size is measured exhaustively.
    pub fn new(qld: CssCode, ptc: PtcFamily, radius: usize) -> Result<PrivateAqecc> {
        if qld.field() != ptc.field() {
            bail!(Structural, "QLD code and PTC family live over different fields");
        }
        if qld.ext() != 1 {
            bail!(Unsupported, "the QLD code must be unfolded (ext 1)");
        }
        if qld.k() != ptc.n() {
            bail!(Structural, "QLD message size {} differs from PTC block size {}", qld.k(), ptc.n());
        }
        let d = qld.distance()?.unwrap_or(usize::MAX);
        if d <= radius {
            bail!(Parameter, "QLD distance {d} must exceed the radius {radius}");
        }
        let list_size = verify_qld(&qld, radius, usize::MAX)?.max_count;
        let composed = ptc.codes().iter().map(|c| compose(qld.stab(), c)).collect::<Result<Vec<_>>>()?;
        Ok(PrivateAqecc { qld, ptc, radius, list_size, composed })
    }

    pub fn qld(&self) -> &CssCode {
        &self.qld
    }
    pub fn ptc(&self) -> &PtcFamily {
        &self.ptc
    }
    pub fn radius(&self) -> usize {
        self.radius
    }
    pub fn n(&self) -> usize {
        self.qld.n()
    }
    /// Largest number of stabilizer-distinct errors within the radius
    /// sharing one syndrome.
    pub fn list_size(&self) -> usize {
        self.list_size
    }
    pub fn key_count(&self) -> usize {
        self.composed.len()
    }
    pub fn composed(&self, key: usize) -> &StabilizerCode {
        &self.composed[key]
    }
    pub fn eps(&self) -> f64 {
        self.ptc.eps()
    }
    /// Per-error failure bound `L eps`.
    pub fn per_error_bound(&self) -> f64 {
        self.list_size as f64 * self.eps()
    }
    /// Overall failure bound `2 L eps`.
    pub fn failure_bound(&self) -> f64 {
        2.0 * self.per_error_bound()
    }

    fn lifted(&self, key: usize) -> &[PauliFrame] {
        &self.composed[key].generators()[self.qld.stab().r()..]
    }

    /// Syndrome of the QLD checks.
    pub fn qld_syndrome(&self, e: &PauliFrame) -> Result<Syndrome> {
        self.qld.stab().syndrome(e)
    }

    /// Syndrome of the PTC checks lifted into the composed code.
    pub fn ptc_syndrome(&self, key: usize, e: &PauliFrame) -> Syndrome {
        let f = self.qld.field();
        let v: Vec<u32> = self.lifted(key).iter().map(|g| symplectic_form(f, g, e)).collect();
        Syndrome::from_fq(f, &v)
    }

    pub fn decoder(&self) -> Result<PrivateDecoder<'_>> {
        Ok(PrivateDecoder { pa: self, qld: QldDecoder::new(&self.qld, self.radius, QldMode::Ball)? })
    }
}

/// List decoder of the QLD code plus the keyed syndrome filter.
pub struct PrivateDecoder<'a> {
    pa: &'a PrivateAqecc,
    qld: QldDecoder<'a>,
}

impl PrivateDecoder<'_> {
    /// Stabilizer-distinct candidates within the radius, in canonical order.
    pub fn candidates(&self, s_qld: &Syndrome) -> Result<Vec<PauliFrame>> {
        let out = self.qld.decode(s_qld)?;
        let mut c: Vec<(Vec<u32>, PauliFrame)> =
            out.entries.into_iter().filter(|e| e.within_radius).map(|e| (e.canonical, e.op)).collect();
        c.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(c.into_iter().map(|(_, op)| op).collect())
    }

    /// Candidates whose lifted PTC syndrome under `key` equals `s_ptc`.
    pub fn matching(&self, candidates: &[PauliFrame], key: usize, s_ptc: &Syndrome) -> Vec<PauliFrame> {
        candidates.iter().filter(|c| &self.pa.ptc_syndrome(key, c) == s_ptc).cloned().collect()
    }

    /// Pick the first matching candidate, or reject.
    pub fn decode(&self, key: usize, s_qld: &Syndrome, s_ptc: &Syndrome) -> Result<PrivateDecision> {
        let cands = self.candidates(s_qld)?;
        Ok(match self.matching(&cands, key, s_ptc).into_iter().next() {
            Some(op) => PrivateDecision::Correction(op),
            None => PrivateDecision::Reject,
        })
    }

    /// Decode `e` under `key` and judge the result in the keyed composed code.
    pub fn outcome(&self, key: usize, e: &PauliFrame, tie: TieBreak) -> Result<TrialOutcome> {
        let cands = self.candidates(&self.pa.qld_syndrome(e)?)?;
        self.outcome_from(&cands, key, e, tie)
    }

    /// As [`PrivateDecoder::outcome`] with a precomputed candidate list.
    pub fn outcome_from(&self, cands: &[PauliFrame], key: usize, e: &PauliFrame, tie: TieBreak) -> Result<TrialOutcome> {
        let s_ptc = self.pa.ptc_syndrome(key, e);
        let matches = self.matching(cands, key, &s_ptc);
        if matches.is_empty() {
            return Ok(TrialOutcome::Reject);
        }
        let code = self.pa.composed(key);
        let chosen: &[PauliFrame] = match tie {
            TieBreak::LowestIndex => &matches[..1],
            TieBreak::Strict => &matches,
        };
        for c in chosen {
            if !code.is_equivalent(c, e)? {
                return Ok(TrialOutcome::Miscorrect);
            }
        }
        Ok(TrialOutcome::Success)
    }
}

/// Exact error-by-key sweep of the private decoder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrivateSweep {
    pub errors: u64,
    pub keys: usize,
    pub list_size: usize,
    pub eps: f64,
    /// Worst number of failing keys for a single error.
    pub max_failing_keys: usize,
    pub max_per_error: f64,
    /// Failure averaged over errors and keys.
    pub mean_failure: f64,
    pub per_error_bound: f64,
    pub overall_bound: f64,
    pub worst_error: Option<String>,
}

impl PrivateSweep {
    pub fn holds(&self) -> bool {
        self.max_per_error <= self.per_error_bound && self.max_per_error <= self.overall_bound
    }
}

/// Every Pauli of weight at most the radius against every key.
pub fn exhaustive_private_sweep(pa: &PrivateAqecc, tie: TieBreak) -> Result<PrivateSweep> {
    let dec = pa.decoder()?;
    let f = pa.qld.field();
    let mut errors = Vec::new();
    for_each_pauli_up_to(f.q(), 1, pa.n(), pa.radius, |e| errors.push(e.clone()));
    let keys = pa.key_count();
    let fails: Vec<usize> = errors
        .par_iter()
        .map(|e| -> Result<usize> {
            let cands = dec.candidates(&pa.qld_syndrome(e)?)?;
            let mut n = 0;
            for k in 0..keys {
                if dec.outcome_from(&cands, k, e, tie)?.is_failure() {
                    n += 1;
                }
            }
            Ok(n)
        })
        .collect::<Result<Vec<_>>>()?;
    let (wi, &max) = fails.iter().enumerate().max_by_key(|&(i, c)| (*c, std::cmp::Reverse(i))).ok_or_else(|| Error::Internal("no errors enumerated".into()))?;
    let total: usize = fails.iter().sum();
    Ok(PrivateSweep {
        errors: errors.len() as u64,
        keys,
        list_size: pa.list_size,
        eps: pa.eps(),
        max_failing_keys: max,
        max_per_error: max as f64 / keys as f64,
        mean_failure: total as f64 / (keys * errors.len()) as f64,
        per_error_bound: pa.per_error_bound(),
        overall_bound: pa.failure_bound(),
        worst_error: (max > 0).then(|| errors[wi].to_text(f)).transpose()?,
    })
}

/// A private code whose key travels in a robust secret sharing.
#[derive(Debug, Clone)]
pub struct Aqecc {
    private: PrivateAqecc,
    rss: RssScheme,
}

/// Pair each code symbol with one share. The key's `lambda` base-`q` digits
/// must fit into the `s` symbols of `F_a`.
pub fn build_aqecc(private: PrivateAqecc, rss: RssScheme) -> Result<Aqecc> {
    if rss.n() != private.n() {
        bail!(Structural, "{} shares for a code of length {}", rss.n(), private.n());
    }
    let q = private.ptc().field().q();
    if rss.s() < private.ptc().lambda() || rss.field().q() < q {
        bail!(
            Parameter,
            "secret capacity {} symbols of F_{} cannot hold a key of {} symbols of F_{}",
            rss.s(),
            rss.field().q(),
            private.ptc().lambda(),
            q
        );
    }
    if rss.d() < private.radius() {
        bail!(Parameter, "sharing threshold {} is below the adversary budget {}", rss.d(), private.radius());
    }
    Ok(Aqecc { private, rss })
}

impl Aqecc {
    pub fn private(&self) -> &PrivateAqecc {
        &self.private
    }
    pub fn rss(&self) -> &RssScheme {
        &self.rss
    }
    /// Combined alphabet size `q * a`.
    pub fn alphabet(&self) -> u64 {
        self.private.qld().field().q() as u64 * self.rss.field().q() as u64
    }
    pub fn failure_bound(&self) -> f64 {
        self.private.failure_bound() + self.rss.eps()
    }

    pub fn key_to_secret(&self, key: usize) -> Vec<u32> {
        let q = self.private.ptc().field().q() as usize;
        let mut rest = key;
        (0..self.rss.s())
            .map(|_| {
                let d = rest % q;
                rest /= q;
                d as u32
            })
            .collect()
    }

    /// Inverse of [`Aqecc::key_to_secret`]; `None` outside the key range.
    pub fn secret_to_key(&self, secret: &[u32]) -> Option<usize> {
        let q = self.private.ptc().field().q() as usize;
        let mut key = 0usize;
        for &d in secret.iter().rev() {
            if d as usize >= q {
                return None;
            }
            key = key.checked_mul(q)?.checked_add(d as usize)?;
        }
        (key < self.private.key_count()).then_some(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::css::quantum_grs;
    use crate::gf::Field;

    fn tiny() -> PrivateAqecc {
        let f = Field::prime(7).unwrap();
        let qld = quantum_grs(&f, 6, 5).unwrap();
        let ptc = build_ptc(&f, 2, 4, PtcConstruction::Explicit).unwrap();
        PrivateAqecc::new(qld, ptc, 1).unwrap()
    }

    #[test]
    fn identity_is_corrected() {
        let pa = tiny();
        let dec = pa.decoder().unwrap();
        let id = PauliFrame::identity(1, 6);
        for k in [0, 7, 48] {
            let d = dec.decode(k, &pa.qld_syndrome(&id).unwrap(), &pa.ptc_syndrome(k, &id)).unwrap();
            let PrivateDecision::Correction(c) = d else { panic!("rejected identity") };
            assert!(pa.composed(k).in_stabilizer(&c));
        }
    }

    #[test]
    fn sweep_respects_bounds() {
        let pa = tiny();
        assert!(pa.list_size() >= 1);
        for tie in [TieBreak::LowestIndex, TieBreak::Strict] {
            let sw = exhaustive_private_sweep(&pa, tie).unwrap();
            assert_eq!(sw.errors, 1 + 6 * 48);
            assert!(sw.holds(), "{sw:?}");
            assert!(sw.mean_failure <= sw.overall_bound);
        }
    }

    #[test]
    fn key_capacity_and_roundtrip() {
        let pa = tiny();
        let f7 = Field::prime(7).unwrap();
        assert!(build_aqecc(pa.clone(), RssScheme::new(&f7, 6, 1, 1).unwrap()).is_err());
        let aq = build_aqecc(pa, RssScheme::new(&f7, 6, 2, 1).unwrap()).unwrap();
        assert_eq!(aq.alphabet(), 49);
        for k in 0..49 {
            assert_eq!(aq.secret_to_key(&aq.key_to_secret(k)), Some(k));
        }
    }
}
