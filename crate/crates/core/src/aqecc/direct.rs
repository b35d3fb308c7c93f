//! Direct construction: outer quantum GRS code over GF(q^k), each outer
//! symbol encoded into an independently keyed inner private code, and the
//! inner qudits redistributed along a bipartite graph.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{PrivateAqecc, PrivateDecoder, TrialOutcome};
use crate::ael::BipartiteGraph;
use crate::classical::{binomial, gao_decode};
use crate::css::CssCode;
use crate::error::{bail, Result};
use crate::gf::Field;
use crate::linalg::{checked_count, vector_at};
use crate::pauli::{PauliFrame, Syndrome};

#[derive(Debug, Clone)]
pub struct DirectAqecc {
    inner: PrivateAqecc,
    outer: CssCode,
    big: Field,
    graph: BipartiteGraph,
    t_out: usize,
}

/// Outer code over GF(q^k) with `k` the logical size of the keyed inner
/// code; the graph has one left vertex per outer symbol and degree equal
/// to the inner block length.
pub fn build_direct_aqecc(outer: CssCode, inner: PrivateAqecc, graph: BipartiteGraph) -> Result<DirectAqecc> {
    let k_inner = inner.composed(0).k();
    let q = inner.qld().field().q();
    let big = Field::new(q, k_inner as u32)?;
    if outer.field() != &big || outer.ext() != 1 {
        bail!(Structural, "outer code must be unfolded over GF({q}^{k_inner})");
    }
    if outer.c1().grs().is_none() || outer.c2().grs().is_none() {
        bail!(Unsupported, "outer decoding needs GRS components");
    }
    if graph.n() != outer.n() || graph.r() != inner.n() {
        bail!(
            Structural,
            "graph ({} vertices, degree {}) does not match outer length {} and inner length {}",
            graph.n(),
            graph.r(),
            outer.n(),
            inner.n()
        );
    }
    let k1 = outer.c1().dim();
    let k2 = outer.c2().dim();
    let t_out = (outer.n() - k1.max(k2)) / 2;
    Ok(DirectAqecc { inner, outer, big, graph, t_out })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectOutcome {
    pub outcome: TrialOutcome,
    /// Blocks whose residual is not a stabilizer of the keyed inner code.
    pub bad_blocks: usize,
    /// Blocks hit by more errors than the inner radius.
    pub heavy_blocks: usize,
}

impl DirectAqecc {
    pub fn inner(&self) -> &PrivateAqecc {
        &self.inner
    }
    pub fn outer(&self) -> &CssCode {
        &self.outer
    }
    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }
    /// Number of outer blocks (and of physical symbols).
    pub fn n(&self) -> usize {
        self.outer.n()
    }
    /// Physical qudits.
    pub fn qudits(&self) -> usize {
        self.outer.n() * self.inner.n()
    }
    pub fn t_out(&self) -> usize {
        self.t_out
    }
    /// Logical qudits over GF(q): outer dimension times inner symbol size.
    pub fn k(&self) -> usize {
        self.outer.k() * self.big.m() as usize
    }
    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.qudits() as f64
    }
    /// Per-block failure probability used in the tail: `min(1, L eps)`.
    pub fn block_failure(&self) -> f64 {
        self.inner.per_error_bound().min(1.0)
    }

    /// `Pr[Bin(n - heavy, p) + heavy > t_out]` with `p` the block failure bound.
    pub fn binomial_tail(&self, heavy: usize) -> f64 {
        binomial_tail(self.n(), heavy, self.block_failure(), self.t_out + 1)
    }

    /// Split a physical error (symbol `v` holds qudits `v r .. v r + r`)
    /// into the inner blocks through the graph.
    pub fn inner_errors(&self, e: &PauliFrame) -> Vec<PauliFrame> {
        let r = self.inner.n();
        (0..self.n())
            .map(|u| {
                let mut b = PauliFrame::identity(1, r);
                for j in 0..r {
                    let (v, port) = self.graph.edge(u, j);
                    b.x[j] = e.x[v * r + port];
                    b.z[j] = e.z[v * r + port];
                }
                b
            })
            .collect()
    }

    /// Decoder with the inner candidate list precomputed for every inner
    /// syndrome when there are at most [`LIST_CACHE_LIMIT`] of them.
    pub fn decoder(&self) -> Result<DirectDecoder<'_>> {
        let inner = self.inner.decoder()?;
        let f = self.inner.qld().field();
        let r = self.inner.qld().stab().r();
        let mut lists = HashMap::new();
        if let Ok(count) = checked_count(f.q(), r, LIST_CACHE_LIMIT) {
            for idx in 0..count {
                let s = vector_at(f.q(), r, idx);
                lists.insert(s.clone(), inner.candidates(&Syndrome::from_fq(f, &s))?);
            }
        }
        Ok(DirectDecoder { code: self, inner, lists })
    }
}

/// `Pr[Bin(n - heavy, p) >= threshold - heavy]`.
pub fn binomial_tail(n: usize, heavy: usize, p: f64, threshold: usize) -> f64 {
    if heavy >= threshold {
        return 1.0;
    }
    let m = n.saturating_sub(heavy);
    let need = threshold - heavy;
    (need..=m).map(|j| binomial(m, j) as f64 * p.powi(j as i32) * (1.0 - p).powi((m - j) as i32)).sum::<f64>().min(1.0)
}

/// Cap on the number of inner syndromes whose candidate lists are cached.
pub const LIST_CACHE_LIMIT: u64 = 1 << 16;

pub struct DirectDecoder<'a> {
    code: &'a DirectAqecc,
    inner: PrivateDecoder<'a>,
    lists: HashMap<Vec<u32>, Vec<PauliFrame>>,
}

impl DirectDecoder<'_> {
    /// Decode a physical error with one key per block.
    pub fn run(&self, keys: &[usize], e: &PauliFrame) -> Result<DirectOutcome> {
        let dc = self.code;
        if keys.len() != dc.n() || e.len() != dc.qudits() {
            bail!(Structural, "need {} keys and {} qudits", dc.n(), dc.qudits());
        }
        let f = dc.inner.qld().field();
        let big = &dc.big;
        let mut xs = vec![0u32; dc.n()];
        let mut zs = vec![0u32; dc.n()];
        let (mut bad, mut heavy) = (0, 0);
        for (u, eu) in dc.inner_errors(e).iter().enumerate() {
            if eu.is_identity() {
                continue;
            }
            if eu.weight() > dc.inner.radius() {
                heavy += 1;
            }
            let key = keys[u];
            let syn = dc.inner.qld().stab().syndrome_fq(eu);
            let computed;
            let cands = match self.lists.get(&syn) {
                Some(c) => c,
                None => {
                    computed = self.inner.candidates(&Syndrome::from_fq(f, &syn))?;
                    &computed
                }
            };
            let s_ptc = dc.inner.ptc_syndrome(key, eu);
            let residual = match self.inner.matching(cands, key, &s_ptc).into_iter().next() {
                Some(c) => eu.mul(f, &c.inverse(f)),
                None => eu.clone(),
            };
            let code = dc.inner.composed(key);
            if code.in_stabilizer(&residual) {
                continue;
            }
            bad += 1;
            let (a, b) = code.logical_coords(&residual);
            let (mut x, z) = (big.from_digits(&a), big.from_dual_coords(&b));
            // A block left outside the stabilizer is never a silent symbol.
            if x == 0 && z == 0 {
                x = 1;
            }
            xs[u] = x;
            zs[u] = z;
        }
        let outcome = if bad == 0 {
            TrialOutcome::Success
        } else {
            let t = dc.t_out;
            match (gao_decode(dc.outer.c1(), &xs, t)?, gao_decode(dc.outer.c2(), &zs, t)?) {
                (Some(cx), Some(cz)) => {
                    if dc.outer.c2_perp().contains(&cx) && dc.outer.c1_perp().contains(&cz) {
                        TrialOutcome::Success
                    } else {
                        TrialOutcome::Miscorrect
                    }
                }
                _ => TrialOutcome::Reject,
            }
        };
        Ok(DirectOutcome { outcome, bad_blocks: bad, heavy_blocks: heavy })
    }
}
