//! Code description files and pipeline configs (TOML, `schema = 1`,
//! unknown keys rejected).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ael::{build_ael, build_expander_with, random_outer, AelCode, AelMode, BipartiteGraph, Certificate, ExpanderOptions};
use crate::aqecc::{
    build_aqecc, build_direct_aqecc, build_ptc, Aqecc, DirectAqecc, PrivateAqecc, PtcConstruction, PtcFamily, RssScheme,
    ShareAttack, TieBreak,
};
use crate::classical::{fold, grs_build, hamming, GrsSpec, LinearCode};
use crate::css::{build_css, fold_quantum, quantum_grs, CssCode};
use crate::error::{bail, Error, Result};
use crate::gf::{Field, FieldConfig};
use crate::linalg::Matrix;
use crate::pauli::{PauliFrame, StabilizerCode};
use crate::sim::{AdversaryModel, ErrorModel, Layers, SupportModel};

pub const SCHEMA: u32 = 1;

fn one() -> usize {
    1
}

/// Graph source for AEL codes and the direct construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphDesc {
    Complete { n: usize },
    Random { n: usize, r: usize, seed: u64 },
    /// Searched until its pseudorandomness is certified at `eps`.
    Expander { n: usize, r: usize, eps: f64, seed: u64, #[serde(default)] spectral: bool },
    Explicit { graph: BipartiteGraph },
}

impl GraphDesc {
    pub fn build(&self) -> Result<BipartiteGraph> {
        Ok(match self {
            GraphDesc::Complete { n } => BipartiteGraph::complete(*n),
            GraphDesc::Random { n, r, seed } => BipartiteGraph::random(*n, *r, &mut ChaCha8Rng::seed_from_u64(*seed)),
            GraphDesc::Expander { n, r, eps, seed, spectral } => {
                let opts = ExpanderOptions {
                    certificate: Some(if *spectral { Certificate::Spectral } else { Certificate::Exhaustive }),
                    degree_guard: false,
                    ..ExpanderOptions::default()
                };
                build_expander_with(*n, *r, *eps, *seed, opts)?.graph
            }
            GraphDesc::Explicit { graph } => graph.clone(),
        })
    }
}

/// Any buildable object, tagged by `type`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CodeDesc {
    /// Reed-Solomon with unit multipliers, or GRS with explicit ones.
    Grs {
        n: usize,
        k: usize,
        #[serde(default)]
        multipliers: Option<Vec<u32>>,
        #[serde(default = "one")]
        fold: usize,
    },
    /// Explicit generator rows (field elements, `n * ext` per row).
    Linear {
        #[serde(default = "one")]
        ext: usize,
        generator: Vec<Vec<u32>>,
    },
    Hamming { r: usize },
    Css { c1: Box<CodeDesc>, c2: Box<CodeDesc> },
    /// CSS(Hamming(3), Hamming(3)).
    Steane,
    Qgrs {
        n: usize,
        k1: usize,
        #[serde(default = "one")]
        fold: usize,
    },
    /// Random binary CSS code reblocked to `ext`.
    RandomCss { n: usize, ext: usize, k: usize, seed: u64 },
    Stabilizer {
        #[serde(default = "one")]
        ext: usize,
        n: usize,
        generators: Vec<String>,
    },
    Ael {
        outer: Box<CodeDesc>,
        inner: Box<CodeDesc>,
        graph: GraphDesc,
        #[serde(default = "basic")]
        mode: AelMode,
    },
    Ptc {
        lambda: usize,
        n: usize,
        #[serde(default = "explicit")]
        construction: PtcConstruction,
    },
    Rss { n: usize, s: usize, d: usize },
}

fn basic() -> AelMode {
    AelMode::Basic
}
fn explicit() -> PtcConstruction {
    PtcConstruction::Explicit
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub schema: u32,
    pub field: FieldConfig,
    pub code: CodeDesc,
}

#[derive(Debug, Clone)]
pub enum Built {
    Classical(LinearCode),
    Quantum(CssCode),
    Stabilizer(StabilizerCode),
    Ael(Box<AelCode>),
    Ptc(PtcFamily),
    Rss(RssScheme),
}

impl Built {
    pub fn kind(&self) -> &'static str {
        match self {
            Built::Classical(_) => "classical",
            Built::Quantum(_) => "css",
            Built::Stabilizer(_) => "stabilizer",
            Built::Ael(_) => "ael",
            Built::Ptc(_) => "ptc",
            Built::Rss(_) => "rss",
        }
    }

    /// Stabilizer view of quantum objects.
    pub fn stabilizer(&self) -> Option<&StabilizerCode> {
        match self {
            Built::Quantum(c) => Some(c.stab()),
            Built::Stabilizer(s) => Some(s),
            Built::Ael(a) => Some(a.code.stab()),
            _ => None,
        }
    }

    pub fn css(&self) -> Option<&CssCode> {
        match self {
            Built::Quantum(c) => Some(c),
            Built::Ael(a) => Some(&a.code),
            _ => None,
        }
    }
}

fn config_err(what: &str, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("{what}: {e}"))
}

fn check_schema(schema: u32) -> Result<()> {
    if schema != SCHEMA {
        bail!(Config, "unsupported schema {schema}, expected {SCHEMA}");
    }
    Ok(())
}

pub fn parse_code_file(text: &str) -> Result<CodeFile> {
    let file: CodeFile = toml::from_str(text).map_err(|e| config_err("code file", e))?;
    check_schema(file.schema)?;
    Ok(file)
}

pub fn load_code_file(path: &std::path::Path) -> Result<CodeFile> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(&path.display().to_string(), e))?;
    parse_code_file(&text)
}

fn classical(b: Built) -> Result<LinearCode> {
    match b {
        Built::Classical(c) => Ok(c),
        other => Err(Error::Config(format!("expected a classical code, found {}", other.kind()))),
    }
}

fn quantum(b: Built) -> Result<CssCode> {
    match b {
        Built::Quantum(c) => Ok(c),
        Built::Ael(a) => Ok(a.code),
        other => Err(Error::Config(format!("expected a CSS code, found {}", other.kind()))),
    }
}

/// Build a described object over `field`.
pub fn build(field: &Field, desc: &CodeDesc) -> Result<Built> {
    Ok(match desc {
        CodeDesc::Grs { n, k, multipliers, fold: m } => {
            let mut spec = GrsSpec::rs(field, *n, *k);
            if let Some(v) = multipliers {
                if v.len() != *n || v.iter().any(|&c| c == 0 || c >= field.q()) {
                    bail!(Config, "need {n} nonzero multipliers in the field");
                }
                spec.multipliers = v.clone();
            }
            let code = grs_build(&spec)?;
            Built::Classical(if *m > 1 { fold(&code, *m)?.code } else { code })
        }
        CodeDesc::Linear { ext, generator } => {
            let cols = generator.first().map_or(0, |r| r.len());
            if cols == 0 || generator.iter().any(|r| r.len() != cols || r.iter().any(|&c| c >= field.q())) {
                bail!(Config, "generator rows must be nonempty, equally long and inside the field");
            }
            Built::Classical(LinearCode::from_spanning(field, *ext, &Matrix::from_rows(generator, cols))?)
        }
        CodeDesc::Hamming { r } => {
            if field.q() != 2 {
                bail!(Config, "Hamming codes are binary");
            }
            Built::Classical(hamming(*r)?)
        }
        CodeDesc::Css { c1, c2 } => {
            Built::Quantum(build_css(&classical(build(field, c1)?)?, &classical(build(field, c2)?)?)?)
        }
        CodeDesc::Steane => {
            if field.q() != 2 {
                bail!(Config, "the Steane code is binary");
            }
            let h = hamming(3)?;
            Built::Quantum(build_css(&h, &h)?)
        }
        CodeDesc::Qgrs { n, k1, fold: m } => {
            let c = quantum_grs(field, *n, *k1)?;
            Built::Quantum(if *m > 1 { fold_quantum(&c, *m)? } else { c })
        }
        CodeDesc::RandomCss { n, ext, k, seed } => {
            Built::Quantum(random_outer(field, *n, *ext, *k, &mut ChaCha8Rng::seed_from_u64(*seed))?)
        }
        CodeDesc::Stabilizer { ext, n, generators } => {
            let gens =
                generators.iter().map(|g| PauliFrame::from_text(field, g, *ext)).collect::<Result<Vec<_>>>()?;
            Built::Stabilizer(StabilizerCode::new(field, *ext, n * ext, gens)?)
        }
        CodeDesc::Ael { outer, inner, graph, mode } => {
            let outer = quantum(build(field, outer)?)?;
            let inner = quantum(build(field, inner)?)?;
            Built::Ael(Box::new(build_ael(&outer, &inner, &graph.build()?, *mode)?))
        }
        CodeDesc::Ptc { lambda, n, construction } => Built::Ptc(build_ptc(field, *lambda, *n, *construction)?),
        CodeDesc::Rss { n, s, d } => Built::Rss(RssScheme::new(field, *n, *s, *d)?),
    })
}

fn linear_desc(c: &LinearCode) -> CodeDesc {
    CodeDesc::Linear { ext: c.ext(), generator: c.generator().row_vecs() }
}

/// Fully explicit description of a built code, if it is a code.
pub fn explicit_file(field: &Field, b: &Built) -> Option<CodeFile> {
    let code = match b {
        Built::Classical(c) => linear_desc(c),
        Built::Quantum(c) => CodeDesc::Css { c1: Box::new(linear_desc(c.c1())), c2: Box::new(linear_desc(c.c2())) },
        Built::Ael(a) => {
            CodeDesc::Css { c1: Box::new(linear_desc(a.code.c1())), c2: Box::new(linear_desc(a.code.c2())) }
        }
        Built::Stabilizer(s) => CodeDesc::Stabilizer {
            ext: s.ext(),
            n: s.n(),
            generators: s.generators().iter().map(|g| g.to_text(field)).collect::<Result<Vec<_>>>().ok()?,
        },
        Built::Ptc(_) | Built::Rss(_) => return None,
    };
    Some(CodeFile { schema: SCHEMA, field: field.config(), code })
}

pub fn to_toml(file: &CodeFile) -> Result<String> {
    toml::to_string(file).map_err(|e| Error::Internal(e.to_string()))
}

/// Which trial runner a pipeline uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    Private,
    Aqecc,
    Ael,
    Direct,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PtcSpec {
    pub lambda: usize,
    #[serde(default = "explicit")]
    pub construction: PtcConstruction,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RssSpec {
    pub field: FieldConfig,
    pub s: usize,
    pub d: usize,
    #[serde(default = "random_replace")]
    pub attack: ShareAttack,
}

fn random_replace() -> ShareAttack {
    ShareAttack::RandomReplace
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectSpec {
    /// Outer length and C1 dimension of the outer quantum GRS code.
    pub n: usize,
    pub k1: usize,
    #[serde(default)]
    pub graph_seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySpec {
    #[serde(default = "random_subset")]
    pub support: SupportModel,
    #[serde(default = "uniform")]
    pub error: ErrorModel,
    /// Absolute budget; takes precedence over `delta`.
    #[serde(default)]
    pub weight_budget: Option<usize>,
    #[serde(default)]
    pub delta: Option<f64>,
}

fn random_subset() -> SupportModel {
    SupportModel::RandomSubset
}
fn uniform() -> ErrorModel {
    ErrorModel::UniformPauliOnSupport
}

impl Default for AdversarySpec {
    fn default() -> Self {
        AdversarySpec { support: random_subset(), error: uniform(), weight_budget: None, delta: None }
    }
}

impl AdversarySpec {
    /// Model for `n` symbols; the budget defaults to `fallback`.
    pub fn model(&self, n: usize, fallback: usize) -> AdversaryModel {
        let budget = self
            .weight_budget
            .or_else(|| self.delta.map(|d| (d * n as f64 + 1e-9).floor() as usize))
            .unwrap_or(fallback);
        AdversaryModel { support: self.support.clone(), error: self.error, weight_budget: budget }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub schema: u32,
    pub mode: SimMode,
    pub trials: u64,
    #[serde(default)]
    pub seed: Option<u64>,
    pub field: FieldConfig,
    /// QLD code (private, keyed, direct inner) or AEL code.
    pub code: CodeDesc,
    /// Inner list-decoding radius; defaults to 1.
    #[serde(default)]
    pub radius: Option<usize>,
    #[serde(default)]
    pub ptc: Option<PtcSpec>,
    #[serde(default)]
    pub rss: Option<RssSpec>,
    #[serde(default)]
    pub direct: Option<DirectSpec>,
    #[serde(default)]
    pub adversary: Option<AdversarySpec>,
    #[serde(default)]
    pub tie_break: TieBreak,
    #[serde(default = "both")]
    pub layers: Layers,
}

fn both() -> Layers {
    Layers::Both
}

pub fn parse_sim_config(text: &str) -> Result<SimConfig> {
    let cfg: SimConfig = toml::from_str(text).map_err(|e| config_err("pipeline config", e))?;
    check_schema(cfg.schema)?;
    Ok(cfg)
}

/// Objects a pipeline config resolves to.
pub enum Pipeline {
    Private(PrivateAqecc),
    Aqecc(Aqecc),
    Ael(Box<AelCode>),
    Direct(DirectAqecc),
}

impl SimConfig {
    fn private(&self, field: &Field) -> Result<PrivateAqecc> {
        let qld = quantum(build(field, &self.code)?)?;
        let Some(ptc) = &self.ptc else {
            bail!(Config, "mode {:?} needs a [ptc] table", self.mode);
        };
        let fam = build_ptc(field, ptc.lambda, qld.k(), ptc.construction)?;
        PrivateAqecc::new(qld, fam, self.radius.unwrap_or(1))
    }

    /// Validate and build every object the run needs.
    pub fn pipeline(&self) -> Result<Pipeline> {
        let field = Field::from_config(&self.field)?;
        Ok(match self.mode {
            SimMode::Private => Pipeline::Private(self.private(&field)?),
            SimMode::Aqecc => {
                let Some(r) = &self.rss else {
                    bail!(Config, "mode aqecc needs an [rss] table");
                };
                let pa = self.private(&field)?;
                let rf = Field::from_config(&r.field)?;
                Pipeline::Aqecc(build_aqecc(pa.clone(), RssScheme::new(&rf, pa.n(), r.s, r.d)?)?)
            }
            SimMode::Ael => match build(&field, &self.code)? {
                Built::Ael(a) => Pipeline::Ael(a),
                other => bail!(Config, "mode ael needs an ael code, found {}", other.kind()),
            },
            SimMode::Direct => {
                let Some(d) = &self.direct else {
                    bail!(Config, "mode direct needs a [direct] table");
                };
                let pa = self.private(&field)?;
                let big = Field::new(field.q(), pa.composed(0).k() as u32)?;
                let outer = quantum_grs(&big, d.n, d.k1)?;
                let g = BipartiteGraph::random(d.n, pa.n(), &mut ChaCha8Rng::seed_from_u64(d.graph_seed));
                Pipeline::Direct(build_direct_aqecc(outer, pa, g)?)
            }
        })
    }

    pub fn attack(&self) -> ShareAttack {
        self.rss.as_ref().map_or(ShareAttack::RandomReplace, |r| r.attack)
    }
}
