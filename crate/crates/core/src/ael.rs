//! Pseudorandom bipartite graphs, the edge permutation, CSS concatenation
//! and AEL distance amplification with its unique and list decoders.

use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classical::{
    combinations, for_each_low_weight, list_recover, BallTable, LinearCode, ListMode, RecoveryMode,
};
use crate::css::{build_css, dual_coset_bases, CssCode};
use crate::error::{bail, Error, Result};
use crate::gf::Field;
use crate::linalg::Matrix;
use crate::pauli::{PauliFrame, Syndrome};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphData {
    n: usize,
    r: usize,
    /// Right endpoints of each left vertex, any order.
    left: Vec<Vec<usize>>,
}

/// `r`-biregular bipartite multigraph on `n + n` vertices with port labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphData", into = "GraphData")]
pub struct BipartiteGraph {
    n: usize,
    r: usize,
    /// `adj[u][j] = (v, port of this edge at v)`.
    adj: Vec<Vec<(usize, usize)>>,
}

impl TryFrom<GraphData> for BipartiteGraph {
    type Error = Error;
    fn try_from(d: GraphData) -> Result<Self> {
        if d.left.len() != d.n {
            bail!(Structural, "{} adjacency lists for {} vertices", d.left.len(), d.n);
        }
        let g = BipartiteGraph::from_left_lists(d.n, d.left)?;
        if g.r != d.r {
            bail!(Structural, "declared degree {} but lists have degree {}", d.r, g.r);
        }
        Ok(g)
    }
}

impl From<BipartiteGraph> for GraphData {
    fn from(g: BipartiteGraph) -> GraphData {
        GraphData { n: g.n, r: g.r, left: g.adj.iter().map(|a| a.iter().map(|e| e.0).collect()).collect() }
    }
}

impl BipartiteGraph {
    /// Build from the right endpoints of every left vertex. Ports are
    /// labeled lexicographically by opposite endpoint, then multiplicity.
    pub fn from_left_lists(n: usize, mut lists: Vec<Vec<usize>>) -> Result<BipartiteGraph> {
        let r = lists.first().map_or(0, |l| l.len());
        if n == 0 || r == 0 || lists.len() != n {
            bail!(Structural, "graph needs n >= 1 lists of positive degree");
        }
        let mut deg = vec![0usize; n];
        for l in &mut lists {
            if l.len() != r {
                bail!(Structural, "left degrees differ");
            }
            l.sort_unstable();
            for &v in l.iter() {
                if v >= n {
                    bail!(Structural, "right vertex {v} out of range");
                }
                deg[v] += 1;
            }
        }
        if deg.iter().any(|&d| d != r) {
            bail!(Structural, "right side is not {r}-regular");
        }
        let mut next = vec![0usize; n];
        let adj = lists
            .iter()
            .map(|l| {
                l.iter()
                    .map(|&v| {
                        next[v] += 1;
                        (v, next[v] - 1)
                    })
                    .collect()
            })
            .collect();
        Ok(BipartiteGraph { n, r, adj })
    }

    pub fn complete(n: usize) -> BipartiteGraph {
        BipartiteGraph::from_left_lists(n, vec![(0..n).collect(); n]).expect("complete graph is regular")
    }

    /// Union of `r` uniformly random perfect matchings.
    pub fn random<R: Rng>(n: usize, r: usize, rng: &mut R) -> BipartiteGraph {
        let mut lists = vec![Vec::with_capacity(r); n];
        let mut perm: Vec<usize> = (0..n).collect();
        for _ in 0..r {
            perm.shuffle(rng);
            for (u, &v) in perm.iter().enumerate() {
                lists[u].push(v);
            }
        }
        BipartiteGraph::from_left_lists(n, lists).expect("union of matchings is regular")
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn edge(&self, u: usize, j: usize) -> (usize, usize) {
        self.adj[u][j]
    }

    /// Edge multiplicities.
    pub fn biadjacency(&self) -> Vec<Vec<usize>> {
        let mut m = vec![vec![0usize; self.n]; self.n];
        for (u, a) in self.adj.iter().enumerate() {
            for &(v, _) in a {
                m[u][v] += 1;
            }
        }
        m
    }

    /// Second singular value of the biadjacency matrix.
    pub fn second_singular_value(&self) -> f64 {
        let b = self.biadjacency();
        let m = DMatrix::from_fn(self.n, self.n, |i, j| b[i][j] as f64);
        let mut ev: Vec<f64> = (&m * m.transpose()).symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        ev.get(1).map_or(0.0, |&x| x.max(0.0).sqrt())
    }
}

/// Outcome of a pseudorandomness measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudorandomReport {
    /// Largest `| |E(S,T)| - r|S||T|/n | / (r sqrt(|S||T|))` seen.
    pub eps: f64,
    /// Pair attaining it.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
    pub exhaustive: bool,
    pub pass: bool,
}

fn worst_t_for(g: &BipartiteGraph, s: &[usize], best: &mut (f64, Option<(Vec<usize>, Vec<usize>)>)) {
    let n = g.n;
    let mut c = vec![0usize; n];
    for &u in s {
        for &(v, _) in &g.adj[u] {
            c[v] += 1;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| c[b].cmp(&c[a]));
    let (mut top, mut bottom) = (0usize, 0usize);
    let r = g.r as f64;
    let sz = s.len() as f64;
    for t in 1..=n {
        top += c[order[t - 1]];
        bottom += c[order[n - t]];
        let expect = r * sz * t as f64 / n as f64;
        let scale = r * (sz * t as f64).sqrt();
        for (val, hi) in [(top, true), (bottom, false)] {
            let dev = (val as f64 - expect).abs() / scale;
            if dev > best.0 + 1e-12 {
                let tset: Vec<usize> =
                    if hi { order[..t].to_vec() } else { order[n - t..].to_vec() };
                let mut tset = tset;
                tset.sort_unstable();
                *best = (dev, Some((s.to_vec(), tset)));
            }
        }
    }
}

/// Largest vertex count for exhaustive pseudorandomness checks.
pub const EXHAUSTIVE_GRAPH_LIMIT: usize = 20;

/// Exact pseudorandomness parameter: maximizing over `T` for each fixed `S`
/// only needs the largest and smallest degree sums into `T`.
pub fn measure_pseudorandom(g: &BipartiteGraph) -> Result<PseudorandomReport> {
    if g.n > EXHAUSTIVE_GRAPH_LIMIT {
        bail!(Infeasible, "exhaustive check on {} vertices per side", g.n);
    }
    let mut best = (0.0, None);
    for mask in 1u64..(1u64 << g.n) {
        let s: Vec<usize> = (0..g.n).filter(|&i| mask >> i & 1 == 1).collect();
        worst_t_for(g, &s, &mut best);
    }
    Ok(PseudorandomReport { eps: best.0, witness: best.1, exhaustive: true, pass: true })
}

/// Sampled lower bound on the pseudorandomness parameter.
pub fn sample_pseudorandom<R: Rng>(g: &BipartiteGraph, samples: usize, rng: &mut R) -> PseudorandomReport {
    let mut best = (0.0, None);
    for _ in 0..samples {
        let s: Vec<usize> = (0..g.n).filter(|_| rng.gen_bool(0.5)).collect();
        if !s.is_empty() {
            worst_t_for(g, &s, &mut best);
        }
    }
    PseudorandomReport { eps: best.0, witness: best.1, exhaustive: false, pass: true }
}

/// Exhaustive when feasible, otherwise `samples` random left sets.
pub fn check_pseudorandom(g: &BipartiteGraph, eps: f64, samples: usize, seed: u64) -> Result<PseudorandomReport> {
    let mut rep = if g.n <= EXHAUSTIVE_GRAPH_LIMIT {
        measure_pseudorandom(g)?
    } else {
        sample_pseudorandom(g, samples, &mut ChaCha8Rng::seed_from_u64(seed))
    };
    rep.pass = rep.eps <= eps + 1e-12;
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// Exact measurement over all vertex subsets.
    Exhaustive,
    /// Second singular value bound from the expander mixing lemma.
    Spectral,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpanderBuild {
    pub graph: BipartiteGraph,
    pub eps: f64,
    pub certificate: Certificate,
    pub attempts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct ExpanderOptions {
    pub certificate: Option<Certificate>,
    pub max_attempts: usize,
    /// Reject degrees below `4 / eps^2`.
    pub degree_guard: bool,
}

impl Default for ExpanderOptions {
    fn default() -> Self {
        ExpanderOptions { certificate: None, max_attempts: 2000, degree_guard: true }
    }
}

/// Randomized search for a certified `eps`-pseudorandom `r`-regular graph.
pub fn build_expander(n: usize, r: usize, eps: f64, seed: u64) -> Result<ExpanderBuild> {
    build_expander_with(n, r, eps, seed, ExpanderOptions::default())
}

pub fn build_expander_with(n: usize, r: usize, eps: f64, seed: u64, opts: ExpanderOptions) -> Result<ExpanderBuild> {
    if r == 0 || r > n.max(1) * n {
        bail!(Parameter, "degree {r} invalid for n={n}");
    }
    if r == n {
        return Ok(ExpanderBuild { graph: BipartiteGraph::complete(n), eps: 0.0, certificate: Certificate::Exhaustive, attempts: 0, seed });
    }
    if opts.degree_guard && (r as f64) < 4.0 / (eps * eps) {
        bail!(Parameter, "degree {r} is below 4/eps^2 = {:.3}", 4.0 / (eps * eps));
    }
    let cert = opts.certificate.unwrap_or(if n <= 12 { Certificate::Exhaustive } else { Certificate::Spectral });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for attempt in 1..=opts.max_attempts {
        let g = BipartiteGraph::random(n, r, &mut rng);
        let e = match cert {
            Certificate::Exhaustive => measure_pseudorandom(&g)?.eps,
            Certificate::Spectral => g.second_singular_value() / r as f64,
        };
        best = best.min(e);
        if e <= eps + 1e-12 {
            return Ok(ExpanderBuild { graph: g, eps: e, certificate: cert, attempts: attempt, seed });
        }
    }
    bail!(Construction, "no graph within eps={eps} after {} attempts; best {best:.4}", opts.max_attempts)
}

/// Image of port position `u * r + j` under the edge permutation.
pub fn pi_apply(g: &BipartiteGraph, pos: usize) -> Result<usize> {
    if pos >= g.n * g.r {
        bail!(Structural, "position {pos} out of range {}", g.n * g.r);
    }
    let (v, port) = g.adj[pos / g.r][pos % g.r];
    Ok(v * g.r + port)
}

pub fn pi_invert(g: &BipartiteGraph, pos: usize) -> Result<usize> {
    if pos >= g.n * g.r {
        bail!(Structural, "position {pos} out of range {}", g.n * g.r);
    }
    let (v, port) = (pos / g.r, pos % g.r);
    for (u, a) in g.adj.iter().enumerate() {
        if let Some(j) = a.iter().position(|&e| e == (v, port)) {
            return Ok(u * g.r + j);
        }
    }
    Err(Error::Internal("port labels are not a bijection".into()))
}

/// The full permutation as a table.
pub fn pi_table(g: &BipartiteGraph) -> Vec<usize> {
    (0..g.n * g.r).map(|p| pi_apply(g, p).expect("in range")).collect()
}

/// Left vertices with at least `alpha_in * r` edges into `t`.
pub fn overloaded(g: &BipartiteGraph, t: &[bool], alpha_in: f64) -> usize {
    let need = alpha_in * g.r as f64;
    g.adj.iter().filter(|a| a.iter().filter(|e| t[e.0]).count() as f64 >= need - 1e-12).count()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExppermResult {
    pub count: usize,
    pub within_budget: bool,
    /// `count < alpha_out * n`.
    pub holds: bool,
}

/// Largest `|T|` covered by the spreading guarantee.
pub fn expperm_budget(n: usize, eps0: f64, alpha_in: f64, alpha_out: f64) -> Option<usize> {
    let x = (alpha_in - eps0 * (alpha_in / alpha_out).sqrt()) * n as f64;
    (x >= 0.0).then(|| (x + 1e-9).floor() as usize)
}

pub fn expperm_check(g: &BipartiteGraph, t: &[usize], eps0: f64, alpha_in: f64, alpha_out: f64) -> ExppermResult {
    let mut mask = vec![false; g.n];
    for &v in t {
        mask[v] = true;
    }
    let count = overloaded(g, &mask, alpha_in);
    let within_budget = expperm_budget(g.n, eps0, alpha_in, alpha_out).is_some_and(|b| t.len() <= b);
    ExppermResult { count, within_budget, holds: (count as f64) < alpha_out * g.n as f64 }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LemmaSweep {
    pub checked: usize,
    pub violations: Vec<(f64, f64, Vec<usize>, usize)>,
}

/// Every `T` within budget for every grid point.
pub fn expperm_sweep(g: &BipartiteGraph, eps0: f64, alphas_in: &[f64], alphas_out: &[f64]) -> Result<LemmaSweep> {
    if g.n > EXHAUSTIVE_GRAPH_LIMIT {
        bail!(Infeasible, "subset sweep on {} vertices", g.n);
    }
    let mut out = LemmaSweep::default();
    for &ai in alphas_in {
        for &ao in alphas_out {
            let Some(budget) = expperm_budget(g.n, eps0, ai, ao) else { continue };
            for mask in 0u64..(1u64 << g.n) {
                if mask.count_ones() as usize > budget {
                    continue;
                }
                let t: Vec<bool> = (0..g.n).map(|i| mask >> i & 1 == 1).collect();
                let count = overloaded(g, &t, ai);
                out.checked += 1;
                if count as f64 >= ao * g.n as f64 {
                    let ts = (0..g.n).filter(|&i| t[i]).collect();
                    out.violations.push((ai, ao, ts, count));
                }
            }
        }
    }
    Ok(out)
}

/// Duality-preserving inner coset encoders.
#[derive(Debug, Clone)]
pub struct InnerEncoders {
    field: Field,
    xs: Vec<Vec<u32>>,
    zs: Vec<Vec<u32>>,
}

impl InnerEncoders {
    pub fn new(inner: &CssCode) -> Result<InnerEncoders> {
        let f = inner.field();
        let (xs, zs) = dual_coset_bases(f, inner.c1(), inner.c2_perp(), inner.c2(), inner.c1_perp())?;
        Ok(InnerEncoders { field: f.clone(), xs, zs })
    }
    pub fn k(&self) -> usize {
        self.xs.len()
    }
    fn combine(&self, basis: &[Vec<u32>], msg: &[u32]) -> Vec<u32> {
        let mut v = vec![0u32; basis.first().map_or(0, |b| b.len())];
        for (b, &c) in basis.iter().zip(msg) {
            self.field.axpy(&mut v, c, b);
        }
        v
    }
    /// Representative of the `C1 / C2^perp` coset for a message.
    pub fn enc1(&self, msg: &[u32]) -> Vec<u32> {
        self.combine(&self.xs, msg)
    }
    /// Representative of the `C2 / C1^perp` coset for a message.
    pub fn enc2(&self, msg: &[u32]) -> Vec<u32> {
        self.combine(&self.zs, msg)
    }
    /// Message of a `C1` word.
    pub fn dec1(&self, v: &[u32]) -> Vec<u32> {
        self.zs.iter().map(|z| self.field.dot(v, z)).collect()
    }
    /// Message of a `C2` word.
    pub fn dec2(&self, w: &[u32]) -> Vec<u32> {
        self.xs.iter().map(|x| self.field.dot(x, w)).collect()
    }
}

fn lift(enc: &InnerEncoders, word: &[u32], first: bool) -> Vec<u32> {
    word.chunks(enc.k())
        .flat_map(|sym| if first { enc.enc1(sym) } else { enc.enc2(sym) })
        .collect()
}

fn block_rows(rows: &Matrix, blocks: usize, block_len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for b in 0..blocks {
        for i in 0..rows.rows {
            let mut v = vec![0u32; blocks * block_len];
            v[b * block_len..(b + 1) * block_len].copy_from_slice(rows.row(i));
            out.push(v);
        }
    }
    out
}

fn concat_parts(outer: &CssCode, inner: &CssCode, enc: &InnerEncoders) -> Result<(LinearCode, LinearCode)> {
    let f = inner.field();
    if outer.field() != f {
        bail!(Parameter, "outer and inner codes use different base fields");
    }
    if outer.ext() != inner.k() {
        bail!(Parameter, "outer alphabet has {} base coordinates, inner code encodes {}", outer.ext(), inner.k());
    }
    let nout = outer.n();
    let blen = inner.len();
    let build = |code: &LinearCode, sub: &LinearCode, first: bool| -> Result<LinearCode> {
        let mut rows: Vec<Vec<u32>> = code.generator().row_vecs().iter().map(|r| lift(enc, r, first)).collect();
        rows.extend(block_rows(sub.generator(), nout, blen));
        LinearCode::from_spanning(f, inner.ext(), &Matrix::from_rows(&rows, nout * blen))
    };
    let c1 = build(outer.c1(), inner.c2_perp(), true)?;
    let c2 = build(outer.c2(), inner.c1_perp(), false)?;
    // Dual descriptions: C1^perp = C1out^perp lifted by enc2 plus inner C1^perp blocks.
    let c1_perp = build(&outer.c1().dual(), inner.c1_perp(), false)?;
    if c1_perp.dim() + c1.dim() != c1.len() || c1.contains_code(&c1_perp.dual()).is_err() {
        bail!(Construction, "concatenated components fail the duality identity");
    }
    Ok((c1, c2))
}

/// CSS concatenation with duality-preserving inner encoders.
pub fn concat_css(outer: &CssCode, inner: &CssCode) -> Result<CssCode> {
    let enc = InnerEncoders::new(inner)?;
    let (c1, c2) = concat_parts(outer, inner, &enc)?;
    build_css(&c1, &c2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AelMode {
    /// One `n_in`-ary symbol per graph vertex.
    Basic,
    /// Symbols of `r` inner qudits; `r` divides `n_in`.
    Reducing { r: usize },
}

/// Permute inner symbols by `perm` and regroup to `new_ext`.
fn permute_code(code: &LinearCode, perm: &[usize], new_ext: usize) -> Result<LinearCode> {
    let e = code.ext();
    let rows: Vec<Vec<u32>> = code
        .generator()
        .row_vecs()
        .iter()
        .map(|row| permute_vec(row, perm, e))
        .collect();
    LinearCode::from_generator(code.field(), new_ext, Matrix::from_rows(&rows, code.len()))
}

fn permute_vec(v: &[u32], perm: &[usize], ext: usize) -> Vec<u32> {
    let mut w = vec![0u32; v.len()];
    for (p, &t) in perm.iter().enumerate() {
        w[t * ext..(t + 1) * ext].copy_from_slice(&v[p * ext..(p + 1) * ext]);
    }
    w
}

fn unpermute_vec(w: &[u32], perm: &[usize], ext: usize) -> Vec<u32> {
    let mut v = vec![0u32; w.len()];
    for (p, &t) in perm.iter().enumerate() {
        v[p * ext..(p + 1) * ext].copy_from_slice(&w[t * ext..(t + 1) * ext]);
    }
    v
}

#[derive(Debug, Clone)]
pub struct AelCode {
    pub outer: CssCode,
    pub inner: CssCode,
    pub graph: BipartiteGraph,
    pub mode: AelMode,
    pub enc: InnerEncoders,
    pub concat: CssCode,
    pub code: CssCode,
    /// Concatenated inner-symbol position -> position in the final code.
    pub perm: Vec<usize>,
}

impl AelCode {
    /// Inner qudits per final symbol.
    pub fn block(&self) -> usize {
        self.graph.r
    }
    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn permute(&self, e: &PauliFrame) -> PauliFrame {
        let x = self.inner.ext();
        PauliFrame { x: permute_vec(&e.x, &self.perm, x), z: permute_vec(&e.z, &self.perm, x), phase: e.phase, ext: self.code.ext() }
    }

    pub fn unpermute(&self, e: &PauliFrame) -> PauliFrame {
        let x = self.inner.ext();
        PauliFrame {
            x: unpermute_vec(&e.x, &self.perm, x),
            z: unpermute_vec(&e.z, &self.perm, x),
            phase: e.phase,
            ext: self.inner.ext(),
        }
    }

    /// Inner blocks touched per final symbol set: `weights[i]` is how many
    /// inner qudits of block `i` land in `t`.
    pub fn block_load(&self, t: &[bool]) -> Vec<usize> {
        let nin = self.inner.n();
        let mut w = vec![0usize; self.outer.n()];
        for (p, &dst) in self.perm.iter().enumerate() {
            if t[dst / self.block()] {
                w[p / nin] += 1;
            }
        }
        w
    }

    /// Largest number of inner blocks with more than `inner_radius` touched
    /// qudits over all final supports of size `radius`.
    pub fn max_bad_blocks(&self, radius: usize, inner_radius: usize) -> usize {
        let n = self.n();
        combinations(n, radius.min(n))
            .into_iter()
            .map(|supp| {
                let mut t = vec![false; n];
                for i in supp {
                    t[i] = true;
                }
                self.block_load(&t).iter().filter(|&&w| w > inner_radius).count()
            })
            .max()
            .unwrap_or(0)
    }
}

/// AEL amplification of `outer` by `inner` along `graph`.
pub fn build_ael(outer: &CssCode, inner: &CssCode, graph: &BipartiteGraph, mode: AelMode) -> Result<AelCode> {
    let nin = inner.n();
    let r = match mode {
        AelMode::Basic => nin,
        AelMode::Reducing { r } => {
            if r == 0 || nin % r != 0 {
                bail!(Parameter, "block size {r} must divide the inner length {nin}");
            }
            r
        }
    };
    if graph.r != r || graph.n * r != outer.n() * nin {
        bail!(Parameter, "graph has side {} and degree {}, mode needs side {} and degree {r}", graph.n, graph.r, outer.n() * nin / r);
    }
    let enc = InnerEncoders::new(inner)?;
    let (c1, c2) = concat_parts(outer, inner, &enc)?;
    let concat = build_css(&c1, &c2)?;
    let perm = pi_table(graph);
    let ext = inner.ext() * r;
    let code = build_css(&permute_code(&c1, &perm, ext)?, &permute_code(&c2, &perm, ext)?)?;
    Ok(AelCode { outer: outer.clone(), inner: inner.clone(), graph: graph.clone(), mode, enc, concat, code, perm })
}

/// Relative distance guaranteed for the basic construction.
pub fn basic_distance_bound(delta_in: f64, delta_out: f64, eps0: f64) -> f64 {
    delta_in - 2.0 * eps0 * (delta_in / delta_out).sqrt()
}

/// Relative distance guaranteed for the alphabet-reducing construction.
pub fn reducing_distance_bound(delta_in: f64, delta_out: f64, eps0: f64) -> f64 {
    delta_in - 6.0 * (eps0 / 2.0 * (delta_in / delta_out).sqrt()).powf(2.0 / 3.0)
}

/// Fraction of symbols the basic unique decoder is guaranteed to correct.
pub fn basic_unique_radius(delta_in: f64, delta_out: f64, eps0: f64) -> f64 {
    delta_in / 2.0 - eps0 * (delta_in / delta_out).sqrt()
}

#[derive(Debug, Clone)]
pub struct AelOutcome {
    /// Correction on the final code, or `None` when the outer decoder fails.
    pub correction: Option<PauliFrame>,
    /// Inner blocks whose syndrome had no pattern within the inner radius.
    pub failed_blocks: usize,
}

/// Concatenated unique decoder: inner syndrome tables per block, then an
/// outer syndrome table on the induced symbol errors.
pub struct AelUniqueDecoder<'a> {
    ael: &'a AelCode,
    inner_x: HashMap<Vec<u32>, Vec<u32>>,
    inner_z: HashMap<Vec<u32>, Vec<u32>>,
    outer_x: BallTable,
    outer_z: BallTable,
    checks_x: Vec<Vec<u32>>,
    checks_z: Vec<Vec<u32>>,
}

fn min_weight_table(code: &LinearCode, radius: usize) -> HashMap<Vec<u32>, Vec<u32>> {
    let mut t: HashMap<Vec<u32>, (usize, Vec<u32>)> = HashMap::new();
    for_each_low_weight(code.field().q(), code.n(), code.ext(), radius, |e| {
        let w = code.weight(e);
        let s = code.syndrome(e);
        match t.get(&s) {
            Some((bw, _)) if *bw <= w => {}
            _ => {
                t.insert(s, (w, e.to_vec()));
            }
        }
    });
    t.into_iter().map(|(k, (_, v))| (k, v)).collect()
}

impl<'a> AelUniqueDecoder<'a> {
    pub fn new(ael: &'a AelCode) -> Result<AelUniqueDecoder<'a>> {
        let din = ael.inner.distance()?.ok_or_else(|| Error::Parameter("inner code encodes nothing".into()))?;
        let dout = ael.outer.distance()?.ok_or_else(|| Error::Parameter("outer code encodes nothing".into()))?;
        let tin = (din - 1) / 2;
        let tout = (dout - 1) / 2;
        let enc = &ael.enc;
        Ok(AelUniqueDecoder {
            ael,
            inner_x: min_weight_table(ael.inner.c1(), tin),
            inner_z: min_weight_table(ael.inner.c2(), tin),
            outer_x: BallTable::new(ael.outer.c1(), tout)?,
            outer_z: BallTable::new(ael.outer.c2(), tout)?,
            checks_x: ael.outer.c1().parity().row_vecs().iter().map(|h| lift(enc, h, false)).collect(),
            checks_z: ael.outer.c2().parity().row_vecs().iter().map(|h| lift(enc, h, true)).collect(),
        })
    }

    fn side(&self, e: &[u32], first: bool, failed: &mut usize) -> Option<Vec<u32>> {
        let a = self.ael;
        let f = a.inner.field();
        let (icode, table, otable, ocode, checks) = if first {
            (a.inner.c1(), &self.inner_x, &self.outer_x, a.outer.c1(), &self.checks_x)
        } else {
            (a.inner.c2(), &self.inner_z, &self.outer_z, a.outer.c2(), &self.checks_z)
        };
        let blen = icode.len();
        let mut corr = Vec::with_capacity(e.len());
        for blk in e.chunks(blen) {
            match table.get(&icode.syndrome(blk)) {
                Some(c) => corr.extend_from_slice(c),
                None => {
                    *failed += 1;
                    corr.extend(std::iter::repeat(0).take(blen));
                }
            }
        }
        let resid: Vec<u32> = e.iter().zip(&corr).map(|(&x, &c)| f.sub(x, c)).collect();
        let syn: Vec<u32> = checks.iter().map(|h| f.dot(h, &resid)).collect();
        let outer_err = otable.errors(&syn).iter().min_by_key(|w| ocode.weight(w))?;
        let lifted = lift(&a.enc, outer_err, first);
        Some(corr.iter().zip(&lifted).map(|(&c, &l)| f.add(c, l)).collect())
    }

    /// Correction for the error `e` given on the final code. Only the
    /// syndromes of `e` influence the result.
    pub fn decode(&self, e: &PauliFrame) -> AelOutcome {
        let u = self.ael.unpermute(e);
        let mut failed = 0;
        let x = self.side(&u.x, true, &mut failed);
        let z = self.side(&u.z, false, &mut failed);
        let correction = match (x, z) {
            (Some(x), Some(z)) => {
                Some(self.ael.permute(&PauliFrame { x, z, phase: 0, ext: self.ael.inner.ext() }))
            }
            _ => None,
        };
        AelOutcome { correction, failed_blocks: failed / 2 }
    }
}

/// One-shot unique decoding.
pub fn ael_unique_decode(ael: &AelCode, e: &PauliFrame) -> Result<AelOutcome> {
    Ok(AelUniqueDecoder::new(ael)?.decode(e))
}

#[derive(Debug, Clone)]
pub struct AelListOutput {
    /// Stabilizer-distinct candidates with a member of weight within the radius.
    pub entries: Vec<PauliFrame>,
    /// Agreement demanded from the outer list recovery.
    pub agreement: usize,
    pub x_candidates: usize,
    pub z_candidates: usize,
}

/// List decoding by inner coset lists, outer list recovery and an exact
/// weight filter over stabilizer cosets. `inner_radius` is the per-block
/// radius in inner qudits.
pub fn ael_list_decode(ael: &AelCode, s: &Syndrome, radius: usize, inner_radius: usize) -> Result<AelListOutput> {
    let code = &ael.code;
    let f = code.field();
    let ext_in = ael.inner.ext();
    let n = code.n();
    if n > 64 {
        bail!(Unsupported, "list decoding supports at most 64 final symbols");
    }
    let (ex, ez) = code.solve_syndrome(s)?;
    let bad = ael.max_bad_blocks(radius, inner_radius);
    let agree = ael.outer.n().saturating_sub(bad);

    let side = |e: &[u32], first: bool| -> Result<Vec<Vec<u32>>> {
        let (cc, ocode, sub) = if first {
            (ael.inner.x_cosets(), ael.outer.c1(), code.c2_perp())
        } else {
            (ael.inner.z_cosets(), ael.outer.c2(), code.c1_perp())
        };
        let blen = ael.inner.len();
        let mut sets = Vec::new();
        for blk in unpermute_vec(e, &ael.perm, ext_in).chunks(blen) {
            let entries = crate::classical::coset_list_decode(&cc, blk, inner_radius, ListMode::BruteForce)?;
            let mut st: Vec<Vec<u32>> = entries
                .iter()
                .map(|c| if first { ael.enc.dec1(&c.rep) } else { ael.enc.dec2(&c.rep) })
                .collect();
            st.sort();
            st.dedup();
            sets.push(st);
        }
        let ell = sets.iter().map(|s| s.len()).max().unwrap_or(0).max(1);
        let words = list_recover(ocode, &sets, agree, ell, RecoveryMode::BruteForce)?;
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for w in words {
            let c = permute_vec(&lift(&ael.enc, &w, first), &ael.perm, ext_in);
            let err: Vec<u32> = e.iter().zip(&c).map(|(&a, &b)| f.sub(a, b)).collect();
            if seen.insert(sub.space().reduce(f, &err)) {
                out.push(err);
            }
        }
        Ok(out)
    };
    let xs = side(&ex, true)?;
    let zs = side(&ez, false)?;

    // Supports of low-weight members of each stabilizer coset.
    let supports = |base: &[u32], sub: &LinearCode| -> Result<Vec<(u64, Vec<u32>)>> {
        let mut out: HashMap<u64, Vec<u32>> = HashMap::new();
        for i in 0..sub.codeword_count()? {
            let v: Vec<u32> = base.iter().zip(sub.codeword_at(i)).map(|(&a, b)| f.add(a, b)).collect();
            let m = support_mask(&v, code.ext());
            if m.count_ones() as usize <= radius {
                out.entry(m).or_insert(v);
            }
        }
        Ok(out.into_iter().collect())
    };
    let xsup: Vec<Vec<(u64, Vec<u32>)>> = xs.iter().map(|x| supports(x, code.c2_perp())).collect::<Result<_>>()?;
    let zsup: Vec<Vec<(u64, Vec<u32>)>> = zs.iter().map(|z| supports(z, code.c1_perp())).collect::<Result<_>>()?;
    let mut entries = Vec::new();
    for xa in &xsup {
        for zb in &zsup {
            let hit = xa
                .iter()
                .flat_map(|a| zb.iter().map(move |b| (a, b)))
                .filter(|(a, b)| ((a.0 | b.0).count_ones() as usize) <= radius)
                .min_by_key(|(a, b)| (a.0 | b.0).count_ones());
            if let Some((a, b)) = hit {
                entries.push(PauliFrame { x: a.1.clone(), z: b.1.clone(), phase: 0, ext: code.ext() });
            }
        }
    }
    Ok(AelListOutput { entries, agreement: agree, x_candidates: xs.len(), z_candidates: zs.len() })
}

fn support_mask(v: &[u32], ext: usize) -> u64 {
    v.chunks(ext).enumerate().fold(0u64, |m, (i, b)| if b.iter().any(|&x| x != 0) { m | 1 << i } else { m })
}

/// Random binary CSS code `[[n, k]]` over the alphabet `F_2^ext`.
pub fn random_outer<R: Rng>(field: &Field, n: usize, ext: usize, k: usize, rng: &mut R) -> Result<CssCode> {
    let c = crate::css::sample_random_css(field, n * ext, k, rng)?;
    build_css(&c.c1().reblock(ext)?, &c.c2().reblock(ext)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{even_weight, hamming};
    use crate::css::exhaustive_qld;

    fn four_qubit() -> CssCode {
        let e = even_weight(4).unwrap();
        build_css(&e, &e).unwrap()
    }

    fn steane() -> CssCode {
        let h = hamming(3).unwrap();
        build_css(&h, &h).unwrap()
    }

    #[test]
    fn pseudorandomness_examples() {
        assert_eq!(measure_pseudorandom(&BipartiteGraph::complete(6)).unwrap().eps, 0.0);
        let matching = BipartiteGraph::from_left_lists(4, vec![vec![0], vec![1], vec![2], vec![3]]).unwrap();
        let rep = check_pseudorandom(&matching, 0.5, 0, 0).unwrap();
        assert!(!rep.pass);
        // |E({0},{0})| = 1 against 1/4 expected
        assert!(rep.eps >= 0.75 - 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = BipartiteGraph::random(8, 4, &mut rng);
        let mut rng2 = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(g, BipartiteGraph::random(8, 4, &mut rng2));
        let e = measure_pseudorandom(&g).unwrap().eps;
        assert!(e > 0.0 && e <= 1.0);
    }

    #[test]
    fn spectral_certificate_bounds_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let g = BipartiteGraph::random(8, 3, &mut rng);
            let exact = measure_pseudorandom(&g).unwrap().eps;
            assert!(exact <= g.second_singular_value() / 3.0 + 1e-9);
        }
    }

    #[test]
    fn expander_search() {
        assert_eq!(build_expander(8, 8, 0.0, 1).unwrap().eps, 0.0);
        assert!(matches!(build_expander(10, 6, 0.745, 1), Err(Error::Parameter(_))));
        let opts = ExpanderOptions { certificate: Some(Certificate::Spectral), degree_guard: false, ..Default::default() };
        let b = build_expander_with(10, 6, 2.0 * 5f64.sqrt() / 6.0, 1, opts).unwrap();
        assert!(b.graph.second_singular_value() / 6.0 <= 0.7454);
    }

    #[test]
    fn permutation_roundtrip_and_hand_trace() {
        let g = BipartiteGraph::from_left_lists(2, vec![vec![1, 0], vec![1, 0]]).unwrap();
        // left 0 sorted ports: (0 -> right 0), (1 -> right 1); right 0 sees left 0 first.
        assert_eq!(g.edge(0, 1), (1, 0));
        assert_eq!(g.edge(1, 0), (0, 1));
        assert_eq!(pi_apply(&g, 1).unwrap(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = BipartiteGraph::random(6, 3, &mut rng);
        for p in 0..18 {
            assert_eq!(pi_invert(&g, pi_apply(&g, p).unwrap()).unwrap(), p);
        }
        assert!(pi_apply(&g, 18).is_err());
    }

    #[test]
    fn concatenation_with_trivial_inner_is_outer() {
        let f = Field::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let outer = random_outer(&f, 4, 2, 2, &mut rng).unwrap();
        let full = LinearCode::full(&f, 2, 1);
        let inner = build_css(&full, &full).unwrap();
        let c = concat_css(&outer, &inner).unwrap();
        assert!(c.c1() == outer.c1() && c.c2() == outer.c2());
    }

    #[test]
    fn encoders_preserve_duality() {
        let inner = steane();
        let enc = InnerEncoders::new(&inner).unwrap();
        let f = inner.field();
        for x in 0..2u32 {
            for y in 0..2u32 {
                assert_eq!(f.dot(&enc.enc1(&[x]), &enc.enc2(&[y])), f.mul(x, y));
            }
        }
    }

    #[test]
    fn tiny_ael_distance_and_rate() {
        let f = Field::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let outer = random_outer(&f, 4, 2, 2, &mut rng).unwrap();
        let inner = four_qubit();
        let ael = build_ael(&outer, &inner, &BipartiteGraph::complete(4), AelMode::Basic).unwrap();
        assert_eq!(ael.code.k(), outer.k());
        assert!((ael.code.rate() - outer.rate() * inner.rate()).abs() < 1e-12);
        let d = ael.code.distance().unwrap().unwrap();
        assert!(d as f64 / 4.0 >= basic_distance_bound(0.5, 0.25, 0.0));
        let same = build_ael(&outer, &inner, &BipartiteGraph::complete(4), AelMode::Reducing { r: 4 }).unwrap();
        assert!(same.code.c1() == ael.code.c1());
    }

    #[test]
    fn unique_decoding_corrects_within_radius() {
        let ael = build_ael(&steane(), &steane(), &BipartiteGraph::complete(7), AelMode::Basic).unwrap();
        let dec = AelUniqueDecoder::new(&ael).unwrap();
        let id = PauliFrame::identity(ael.code.ext(), ael.code.n());
        let out = dec.decode(&id);
        assert!(ael.code.stab().in_stabilizer(out.correction.as_ref().unwrap()));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let mut e = id.clone();
            let sym = rng.gen_range(0..7);
            for t in 0..7 {
                e.x[sym * 7 + t] = rng.gen_range(0..2);
                e.z[sym * 7 + t] = rng.gen_range(0..2);
            }
            let c = dec.decode(&e).correction.unwrap();
            assert!(ael.code.stab().is_equivalent(&c, &e).unwrap());
        }
        // One inner block fully corrupted before the permutation.
        let mut u = PauliFrame::identity(1, 49);
        for t in 0..7 {
            u.x[t] = rng.gen_range(0..2);
            u.z[t] = 1;
        }
        let e = ael.permute(&u);
        let c = dec.decode(&e).correction.unwrap();
        assert!(ael.code.stab().is_equivalent(&c, &e).unwrap());
    }

    #[test]
    fn list_decoding_matches_exhaustive() {
        let f = Field::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let outer = random_outer(&f, 4, 2, 2, &mut rng).unwrap();
        let ael = build_ael(&outer, &four_qubit(), &BipartiteGraph::complete(4), AelMode::Basic).unwrap();
        let stab = ael.code.stab();
        let map = exhaustive_qld(stab, 1).unwrap();
        for (syn, want) in map.iter().take(300) {
            let s = Syndrome::from_fq(&f, syn);
            let out = ael_list_decode(&ael, &s, 1, 1).unwrap();
            let got: BTreeSet<Vec<u32>> = out.entries.iter().map(|e| stab.canonical(e)).collect();
            assert_eq!(&got, want);
        }
    }

    #[test]
    fn expperm_sweep_on_measured_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = BipartiteGraph::random(8, 4, &mut rng);
        let eps0 = measure_pseudorandom(&g).unwrap().eps;
        let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
        let sweep = expperm_sweep(&g, eps0, &grid, &grid).unwrap();
        assert!(sweep.violations.is_empty());
        assert_eq!(expperm_check(&g, &[], eps0, 0.5, 0.5).count, 0);
    }
}
