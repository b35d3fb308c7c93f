//! Generalized Pauli operators and F_q-linear stabilizer codes.
//!
//! `E_{a,b} = X^a Z^b` is stored as the pair `(a, b)` over F_q. Two
//! operators commute iff the trace of the F_q-valued symplectic form
//! `<a,b'> - <a',b>` vanishes. Stabilizer groups here are F_q-linear, so
//! each listed generator `g` stands for the `m` F_p-generators `x^i g`, and
//! a syndrome holds `tr(x^i <g, E>)` for every generator and every `i`.

use std::fmt;

use crate::classical::symbol_weight;
use crate::error::{bail, Error, Result};
use crate::gf::Field;
use crate::linalg::{Matrix, RowSpace};

/// A Pauli operator `omega^phase X^x Z^z` on `n` symbols of width `ext`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliFrame {
    pub x: Vec<u32>,
    pub z: Vec<u32>,
    pub phase: u32,
    pub ext: usize,
}

impl fmt::Debug for PauliFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli(x={:?}, z={:?}, ph={})", self.x, self.z, self.phase)
    }
}

impl PauliFrame {
    pub fn identity(ext: usize, n: usize) -> PauliFrame {
        PauliFrame { x: vec![0; n * ext], z: vec![0; n * ext], phase: 0, ext }
    }

    pub fn new(x: Vec<u32>, z: Vec<u32>, ext: usize) -> Result<PauliFrame> {
        if x.len() != z.len() || ext == 0 || x.len() % ext != 0 {
            bail!(Structural, "x/z parts of lengths {} and {} do not fit ext {ext}", x.len(), z.len());
        }
        Ok(PauliFrame { x, z, phase: 0, ext })
    }

    pub fn x_only(x: Vec<u32>, ext: usize) -> PauliFrame {
        let z = vec![0; x.len()];
        PauliFrame { x, z, phase: 0, ext }
    }

    pub fn z_only(z: Vec<u32>, ext: usize) -> PauliFrame {
        let x = vec![0; z.len()];
        PauliFrame { x, z, phase: 0, ext }
    }

    /// Number of symbols.
    pub fn n(&self) -> usize {
        self.x.len() / self.ext
    }

    /// Number of base coordinates.
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Symbols where the x or z part is nonzero.
    pub fn weight(&self) -> usize {
        self.support().len()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&j| {
                let r = j * self.ext..(j + 1) * self.ext;
                self.x[r.clone()].iter().any(|&v| v != 0) || self.z[r].iter().any(|&v| v != 0)
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&v| v == 0) && self.z.iter().all(|&v| v == 0)
    }

    /// `(x | z)` as one vector.
    pub fn symplectic(&self) -> Vec<u32> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.z);
        v
    }

    pub fn from_symplectic(v: &[u32], ext: usize) -> PauliFrame {
        let h = v.len() / 2;
        PauliFrame { x: v[..h].to_vec(), z: v[h..].to_vec(), phase: 0, ext }
    }

    fn check_shape(&self, o: &PauliFrame) -> Result<()> {
        if self.x.len() != o.x.len() {
            bail!(Structural, "Pauli lengths {} and {} differ", self.x.len(), o.x.len());
        }
        Ok(())
    }

    /// Product `self * o`, with the phase from moving `Z^b` past `X^{a'}`.
    pub fn mul(&self, f: &Field, o: &PauliFrame) -> PauliFrame {
        let x = self.x.iter().zip(&o.x).map(|(&a, &b)| f.add(a, b)).collect();
        let z = self.z.iter().zip(&o.z).map(|(&a, &b)| f.add(a, b)).collect();
        let p = f.p();
        let extra = f.trace(f.dot(&self.z, &o.x));
        let phase = (self.phase + o.phase + extra) % p;
        PauliFrame { x, z, phase, ext: self.ext }
    }

    /// `self^{-1}` up to phase.
    pub fn inverse(&self, f: &Field) -> PauliFrame {
        PauliFrame {
            x: self.x.iter().map(|&v| f.neg(v)).collect(),
            z: self.z.iter().map(|&v| f.neg(v)).collect(),
            phase: 0,
            ext: self.ext,
        }
    }

    /// `c * (x, z)` for a scalar `c`, phase dropped.
    pub fn scale(&self, f: &Field, c: u32) -> PauliFrame {
        PauliFrame {
            x: self.x.iter().map(|&v| f.mul(c, v)).collect(),
            z: self.z.iter().map(|&v| f.mul(c, v)).collect(),
            phase: 0,
            ext: self.ext,
        }
    }

    /// Write in the text form `X:<digits>;Z:<digits>;ph:<int>`. Each element
    /// is `m` base-`p` digits (constant term first); blocks are separated by `.`.
    pub fn to_text(&self, f: &Field) -> Result<String> {
        Ok(format!("X:{};Z:{};ph:{}", encode_digits(f, &self.x, self.ext)?, encode_digits(f, &self.z, self.ext)?, self.phase))
    }

    pub fn from_text(f: &Field, s: &str, ext: usize) -> Result<PauliFrame> {
        let mut x = None;
        let mut z = None;
        let mut ph = 0u32;
        for part in s.trim().split(';') {
            let (key, val) = part.split_once(':').ok_or_else(|| Error::Config(format!("malformed Pauli field {part:?}")))?;
            match key.trim() {
                "X" => x = Some(decode_digits(f, val.trim())?),
                "Z" => z = Some(decode_digits(f, val.trim())?),
                "ph" => {
                    ph = val.trim().parse::<u32>().map_err(|e| Error::Config(format!("bad phase: {e}")))? % f.p();
                }
                other => bail!(Config, "unknown Pauli field {other:?}"),
            }
        }
        let (Some(x), Some(z)) = (x, z) else {
            bail!(Config, "Pauli text needs both X and Z parts");
        };
        let mut e = PauliFrame::new(x, z, ext)?;
        e.phase = ph;
        Ok(e)
    }
}

const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// Base-field digits of a vector, blocks separated by `.`.
pub fn encode_digits(f: &Field, v: &[u32], ext: usize) -> Result<String> {
    if f.p() > 36 {
        bail!(Unsupported, "text form supports characteristic up to 36");
    }
    let mut s = String::new();
    for (i, &e) in v.iter().enumerate() {
        if i > 0 && ext > 1 && i % ext == 0 {
            s.push('.');
        }
        for d in f.digits(e) {
            s.push(DIGITS[d as usize] as char);
        }
    }
    Ok(s)
}

pub fn decode_digits(f: &Field, s: &str) -> Result<Vec<u32>> {
    let m = f.m() as usize;
    let digits: Vec<u32> = s
        .chars()
        .filter(|&c| c != '.')
        .map(|c| {
            c.to_digit(36)
                .filter(|&d| d < f.p())
                .ok_or_else(|| Error::Config(format!("invalid digit {c:?} for characteristic {}", f.p())))
        })
        .collect::<Result<_>>()?;
    if digits.len() % m != 0 {
        bail!(Config, "digit count {} is not a multiple of m = {m}", digits.len());
    }
    Ok(digits.chunks(m).map(|c| f.from_digits(c)).collect())
}

/// F_q-valued symplectic form `<a,b'> - <a',b>`.
pub fn symplectic_form(f: &Field, e: &PauliFrame, o: &PauliFrame) -> u32 {
    f.sub(f.dot(&e.x, &o.z), f.dot(&o.x, &e.z))
}

/// Commutation phase in F_p: the trace of the symplectic form.
pub fn commutation_phase(f: &Field, e: &PauliFrame, o: &PauliFrame) -> Result<u32> {
    e.check_shape(o)?;
    Ok(f.trace(symplectic_form(f, e, o)))
}

/// Vector of commutation phases against the F_p-generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syndrome {
    pub values: Vec<u32>,
}

impl Syndrome {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Group F_p digits back into one F_q value per F_q-generator.
    pub fn to_fq(&self, f: &Field) -> Vec<u32> {
        self.values.chunks(f.m() as usize).map(|c| f.from_dual_coords(c)).collect()
    }

    pub fn from_fq(f: &Field, v: &[u32]) -> Syndrome {
        Syndrome { values: v.iter().flat_map(|&x| f.dual_coords(x)).collect() }
    }

    pub fn add(&self, f: &Field, o: &Syndrome) -> Syndrome {
        let p = f.p();
        Syndrome { values: self.values.iter().zip(&o.values).map(|(a, b)| (a + b) % p).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Stabilizer,
    Logical,
    Detectable,
}

/// An F_q-linear stabilizer code with a logical dictionary.
#[derive(Debug, Clone)]
pub struct StabilizerCode {
    field: Field,
    ext: usize,
    len: usize,
    generators: Vec<PauliFrame>,
    logical_x: Vec<PauliFrame>,
    logical_z: Vec<PauliFrame>,
    stab: RowSpace,
}

impl StabilizerCode {
    /// Code stabilized by the F_q-span of `generators`; a logical dictionary
    /// is derived by symplectic Gram-Schmidt on the normalizer.
    pub fn new(field: &Field, ext: usize, len: usize, generators: Vec<PauliFrame>) -> Result<StabilizerCode> {
        let code = Self::unchecked(field, ext, len, generators, Vec::new(), Vec::new())?;
        let (lx, lz) = code.derive_logicals()?;
        let code = StabilizerCode { logical_x: lx, logical_z: lz, ..code };
        code.verify()?;
        Ok(code)
    }

    /// Code with a supplied logical dictionary (verified).
    pub fn with_logicals(
        field: &Field,
        ext: usize,
        len: usize,
        generators: Vec<PauliFrame>,
        logical_x: Vec<PauliFrame>,
        logical_z: Vec<PauliFrame>,
    ) -> Result<StabilizerCode> {
        let code = Self::unchecked(field, ext, len, generators, logical_x, logical_z)?;
        code.verify()?;
        Ok(code)
    }

    fn unchecked(
        field: &Field,
        ext: usize,
        len: usize,
        generators: Vec<PauliFrame>,
        logical_x: Vec<PauliFrame>,
        logical_z: Vec<PauliFrame>,
    ) -> Result<StabilizerCode> {
        if ext == 0 || len % ext != 0 {
            bail!(Structural, "length {len} is not a multiple of ext {ext}");
        }
        for g in generators.iter().chain(&logical_x).chain(&logical_z) {
            if g.len() != len {
                bail!(Structural, "operator of length {} in a code of length {len}", g.len());
            }
        }
        let rows: Vec<Vec<u32>> = generators.iter().map(|g| g.symplectic()).collect();
        let stab = RowSpace::from_rows(field, &rows, 2 * len);
        if stab.dim() != generators.len() {
            bail!(Structural, "stabilizer generators are not independent");
        }
        let generators = generators.into_iter().map(|g| PauliFrame { ext, ..g }).collect();
        let fix = |v: Vec<PauliFrame>| v.into_iter().map(|g| PauliFrame { ext, ..g }).collect();
        Ok(StabilizerCode { field: field.clone(), ext, len, generators, logical_x: fix(logical_x), logical_z: fix(logical_z), stab })
    }

    /// Check commutation and the logical Gram matrix.
    pub fn verify(&self) -> Result<()> {
        let f = &self.field;
        for (i, g) in self.generators.iter().enumerate() {
            for h in &self.generators[i..] {
                if symplectic_form(f, g, h) != 0 {
                    bail!(Structural, "stabilizer generators do not commute");
                }
            }
        }
        let k = self.k();
        if self.logical_x.len() != k || self.logical_z.len() != k {
            bail!(Internal, "logical dictionary has {}+{} entries, expected {k} each", self.logical_x.len(), self.logical_z.len());
        }
        for l in self.logical_x.iter().chain(&self.logical_z) {
            if self.generators.iter().any(|g| symplectic_form(f, g, l) != 0) {
                bail!(Internal, "logical operator outside the normalizer");
            }
        }
        for i in 0..k {
            for j in 0..k {
                let want = u32::from(i == j);
                if symplectic_form(f, &self.logical_x[i], &self.logical_z[j]) != want
                    || symplectic_form(f, &self.logical_x[i], &self.logical_x[j]) != 0
                    || symplectic_form(f, &self.logical_z[i], &self.logical_z[j]) != 0
                {
                    bail!(Internal, "logical dictionary is not symplectic");
                }
            }
        }
        Ok(())
    }

    fn normalizer(&self) -> Matrix {
        let f = &self.field;
        let mut cons = Matrix::zeros(0, 2 * self.len);
        for g in &self.generators {
            // <g_x, v_z> - <v_x, g_z> as a row acting on (v_x | v_z)
            let mut row: Vec<u32> = g.z.iter().map(|&v| f.neg(v)).collect();
            row.extend_from_slice(&g.x);
            cons.push_row(&row);
        }
        cons.nullspace(f)
    }

    fn derive_logicals(&self) -> Result<(Vec<PauliFrame>, Vec<PauliFrame>)> {
        let f = &self.field;
        let norm = self.normalizer();
        let mut span = self.stab.clone();
        let mut pool: Vec<PauliFrame> = Vec::new();
        for i in 0..norm.rows {
            if span.insert(f, norm.row(i)) {
                pool.push(PauliFrame::from_symplectic(norm.row(i), self.ext));
            }
        }
        let (mut lx, mut lz) = (Vec::new(), Vec::new());
        while !pool.is_empty() {
            let u = pool.remove(0);
            let Some(idx) = pool.iter().position(|w| symplectic_form(f, &u, w) != 0) else {
                bail!(Internal, "normalizer modulo stabilizer is degenerate");
            };
            let w = pool.remove(idx);
            let w = w.scale(f, f.inv_nz(symplectic_form(f, &u, &w)));
            for v in pool.iter_mut() {
                let a = symplectic_form(f, v, &w);
                let b = symplectic_form(f, v, &u);
                let mut s = v.symplectic();
                f.axpy(&mut s, f.neg(a), &u.symplectic());
                f.axpy(&mut s, b, &w.symplectic());
                *v = PauliFrame::from_symplectic(&s, self.ext);
            }
            lx.push(u);
            lz.push(w);
        }
        Ok((lx, lz))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn ext(&self) -> usize {
        self.ext
    }
    /// Number of symbols.
    pub fn n(&self) -> usize {
        self.len / self.ext
    }
    /// Number of base-field qudits.
    pub fn len(&self) -> usize {
        self.len
    }
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
    /// Number of encoded base-field qudits, `len - r/m`.
    pub fn k(&self) -> usize {
        self.len - self.generators.len()
    }
    /// F_q-generators.
    pub fn generators(&self) -> &[PauliFrame] {
        &self.generators
    }
    /// Number of F_p-generators `r`.
    pub fn r(&self) -> usize {
        self.generators.len() * self.field.m() as usize
    }
    /// The `r` F_p-generators `x^i g`.
    pub fn fp_generators(&self) -> Vec<PauliFrame> {
        let basis = self.field.poly_basis();
        self.generators.iter().flat_map(|g| basis.iter().map(move |&b| g.scale(&self.field, b))).collect()
    }
    pub fn logical_x(&self) -> &[PauliFrame] {
        &self.logical_x
    }
    pub fn logical_z(&self) -> &[PauliFrame] {
        &self.logical_z
    }
    pub fn stabilizer_space(&self) -> &RowSpace {
        &self.stab
    }

    fn check(&self, e: &PauliFrame) -> Result<()> {
        if e.len() != self.len {
            bail!(Structural, "operator length {} vs code length {}", e.len(), self.len);
        }
        Ok(())
    }

    /// Symplectic form against each F_q-generator.
    pub fn syndrome_fq(&self, e: &PauliFrame) -> Vec<u32> {
        self.generators.iter().map(|g| symplectic_form(&self.field, g, e)).collect()
    }

    /// Commutation phases against the F_p-generators.
    pub fn syndrome(&self, e: &PauliFrame) -> Result<Syndrome> {
        self.check(e)?;
        Ok(Syndrome::from_fq(&self.field, &self.syndrome_fq(e)))
    }

    pub fn in_stabilizer(&self, e: &PauliFrame) -> bool {
        self.stab.contains(&self.field, &e.symplectic())
    }

    /// Whether `o^{-1} o'` is a stabilizer, phases ignored.
    pub fn is_equivalent(&self, o: &PauliFrame, o2: &PauliFrame) -> Result<bool> {
        self.check(o)?;
        self.check(o2)?;
        let f = &self.field;
        let d: Vec<u32> = o2.symplectic().iter().zip(o.symplectic()).map(|(&a, b)| f.sub(a, b)).collect();
        Ok(self.stab.contains(f, &d))
    }

    /// Canonical representative of the stabilizer coset of `e`.
    pub fn canonical(&self, e: &PauliFrame) -> Vec<u32> {
        self.stab.reduce(&self.field, &e.symplectic())
    }

    pub fn classify(&self, e: &PauliFrame) -> Result<Class> {
        self.check(e)?;
        if self.syndrome_fq(e).iter().any(|&v| v != 0) {
            Ok(Class::Detectable)
        } else if self.in_stabilizer(e) {
            Ok(Class::Stabilizer)
        } else {
            Ok(Class::Logical)
        }
    }

    /// Message-space Pauli `(a, b)` lifted through the logical dictionary.
    pub fn lift(&self, a: &[u32], b: &[u32]) -> PauliFrame {
        let f = &self.field;
        let mut v = vec![0u32; 2 * self.len];
        for (i, &c) in a.iter().enumerate() {
            f.axpy(&mut v, c, &self.logical_x[i].symplectic());
        }
        for (i, &c) in b.iter().enumerate() {
            f.axpy(&mut v, c, &self.logical_z[i].symplectic());
        }
        PauliFrame::from_symplectic(&v, self.ext)
    }

    /// Logical content `(a, b)` of a normalizer element.
    pub fn logical_coords(&self, e: &PauliFrame) -> (Vec<u32>, Vec<u32>) {
        let f = &self.field;
        let a = self.logical_z.iter().map(|lz| symplectic_form(f, e, lz)).collect();
        let b = self.logical_x.iter().map(|lx| f.neg(symplectic_form(f, e, lx))).collect();
        (a, b)
    }

    /// Minimum weight of a logical operator by enumeration of weight strata.
    /// Returns `None` when `k = 0`.
    pub fn brute_force_distance(&self, limit: u64) -> Result<Option<usize>> {
        if self.k() == 0 {
            return Ok(None);
        }
        let q = self.field.q() as u64;
        let per = q.saturating_pow(2 * self.ext as u32) - 1;
        let n = self.n();
        for w in 1..=n {
            let stratum = crate::classical::binomial(n, w).saturating_mul(per.saturating_pow(w as u32));
            if stratum > limit {
                bail!(Infeasible, "weight-{w} stratum has {stratum} operators, above the limit {limit}");
            }
            if self.find_logical_of_weight(w).is_some() {
                return Ok(Some(w));
            }
        }
        Err(Error::Internal("no logical operator found".into()))
    }

    /// Some logical operator of exactly weight `w`.
    pub fn find_logical_of_weight(&self, w: usize) -> Option<PauliFrame> {
        use rayon::prelude::*;
        let n = self.n();
        crate::classical::combinations(n, w).into_par_iter().find_map_any(|support| {
            let mut found = None;
            for_each_on_support(self.field.q(), self.ext, n, &support, |e| {
                if found.is_none() && self.syndrome_fq(e).iter().all(|&v| v == 0) && !self.in_stabilizer(e) {
                    found = Some(e.clone());
                }
            });
            found
        })
    }
}

/// Visit every Pauli that is nontrivial on exactly the symbols of `support`.
pub fn for_each_on_support(q: u32, ext: usize, n: usize, support: &[usize], mut visit: impl FnMut(&PauliFrame)) {
    let per = (q as u64).pow(2 * ext as u32);
    let mut e = PauliFrame::identity(ext, n);
    let mut vals = vec![1u64; support.len()];
    loop {
        for (s, &pos) in support.iter().enumerate() {
            let mut v = vals[s];
            for t in 0..ext {
                e.x[pos * ext + t] = (v % q as u64) as u32;
                v /= q as u64;
            }
            for t in 0..ext {
                e.z[pos * ext + t] = (v % q as u64) as u32;
                v /= q as u64;
            }
        }
        visit(&e);
        let mut i = support.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] < per {
                break;
            }
            vals[i] = 1;
        }
    }
}

/// Visit every Pauli of weight at most `radius`, by increasing weight.
pub fn for_each_pauli_up_to(q: u32, ext: usize, n: usize, radius: usize, mut visit: impl FnMut(&PauliFrame)) {
    for w in 0..=radius.min(n) {
        for support in crate::classical::combinations(n, w) {
            for_each_on_support(q, ext, n, &support, &mut visit);
        }
    }
}

/// Compose an outer code `[[n, m]]` with a code `[[m, k]]` on its message space.
pub fn compose(q1: &StabilizerCode, q2: &StabilizerCode) -> Result<StabilizerCode> {
    if q1.field() != q2.field() {
        bail!(Structural, "composed codes live over different fields");
    }
    if q1.k() != q2.len() {
        bail!(Structural, "message size {} differs from inner block size {}", q1.k(), q2.len());
    }
    let lift = |e: &PauliFrame| q1.lift(&e.x, &e.z);
    let mut gens = q1.generators().to_vec();
    gens.extend(q2.generators().iter().map(lift));
    let lx = q2.logical_x().iter().map(lift).collect();
    let lz = q2.logical_z().iter().map(lift).collect();
    StabilizerCode::with_logicals(q1.field(), q1.ext(), q1.len(), gens, lx, lz)
        .map_err(|e| Error::Internal(format!("composition failed: {e}")))
}

/// Weight of the symbol-blocked vector pair.
pub fn pair_weight(x: &[u32], z: &[u32], ext: usize) -> usize {
    let or: Vec<u32> = x.iter().zip(z).map(|(&a, &b)| u32::from(a != 0 || b != 0)).collect();
    symbol_weight(&or, ext)
}
