//! Arithmetic in GF(p^m).
//!
//! Elements are stored as plain `u32` indices: the coefficient vector
//! `(c_0, ..., c_{m-1})` in the polynomial basis maps to `sum c_i p^i`.
//! The prime subfield therefore sits at indices `0..p`. Hot loops work on
//! raw indices through [`Field`]; [`FieldElement`] is a checked wrapper
//! that carries its field and refuses to mix fields.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};

/// Largest field size handled by log/antilog tables.
const TABLE_LIMIT: u32 = 1 << 16;
/// Largest supported field size.
const SIZE_LIMIT: u64 = 1 << 20;

/// Conway polynomials, coefficients from the constant term up (monic term included).
const CONWAY: &[(u32, &[u32])] = &[
    (2, &[1, 1]),
    (2, &[1, 1, 1]),
    (2, &[1, 1, 0, 1]),
    (2, &[1, 1, 0, 0, 1]),
    (2, &[1, 0, 1, 0, 0, 1]),
    (2, &[1, 1, 0, 1, 1, 0, 1]),
    (2, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (2, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (2, &[1, 0, 0, 0, 1, 0, 0, 0, 0, 1]),
    (2, &[1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 1]),
    (2, &[1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
    (2, &[1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 1]),
    (2, &[1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
    (2, &[1, 0, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 1]),
    (2, &[1, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
    (2, &[1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
    (3, &[1, 1]),
    (3, &[2, 2, 1]),
    (3, &[1, 2, 0, 1]),
    (3, &[2, 0, 0, 2, 1]),
    (3, &[1, 2, 0, 0, 0, 1]),
    (3, &[2, 2, 1, 0, 2, 0, 1]),
    (5, &[3, 1]),
    (5, &[2, 4, 1]),
    (5, &[3, 3, 0, 1]),
    (5, &[2, 4, 4, 0, 1]),
    (7, &[4, 1]),
    (7, &[3, 6, 1]),
    (7, &[4, 0, 6, 1]),
    (11, &[9, 1]),
    (11, &[2, 7, 1]),
    (13, &[11, 1]),
    (13, &[2, 12, 1]),
    (17, &[14, 1]),
    (17, &[3, 16, 1]),
];

/// Serializable description of a field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub p: u32,
    #[serde(default = "one")]
    pub m: u32,
    #[serde(default)]
    pub modulus: Option<Vec<u32>>,
}

fn one() -> u32 {
    1
}

struct Inner {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    primitive: u32,
    /// exp table of length 2(q-1) and log table of length q (log[0] unused).
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
    add: Option<Vec<u32>>,
    /// Dual basis of the polynomial basis under the trace form.
    dual: Vec<u32>,
}

/// A finite field GF(p^m). Cheap to clone; immutable and thread-safe.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.m == other.0.m && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.m)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---- polynomials over GF(p), coefficient vectors low degree first ----

fn poly_trim(a: &mut Vec<u32>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let df = f.len() - 1;
    let lead_inv = modinv(f[df], p);
    while r.len() > df {
        let c = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = r.len() - 1 - df;
        if c != 0 {
            for (i, &fc) in f.iter().enumerate() {
                let t = (c as u64 * fc as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
    }
    poly_trim(&mut r);
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|v| v as u32).collect();
    poly_rem(&prod, f, p)
}

fn poly_powmod(base: &[u32], mut e: u64, f: &[u32], p: u32) -> Vec<u32> {
    let mut result = vec![1u32];
    let mut b = poly_rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    result
}

fn modinv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Trial division by every monic polynomial of degree 1..=m/2.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    for d in 1..=m / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut v = idx;
            for _ in 0..d {
                g.push((v % p as u64) as u32);
                v /= p as u64;
            }
            g.push(1);
            let r = poly_rem(f, &g, p);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

fn x_is_primitive(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    let order = (p as u64).pow(m as u32) - 1;
    let x = if m == 1 { vec![(p - f[0]) % p] } else { vec![0, 1] };
    if m == 1 && x[0] == 0 {
        return false;
    }
    let one = poly_powmod(&x, order, f, p);
    if one != vec![1] {
        return false;
    }
    prime_factors(order)
        .into_iter()
        .all(|r| poly_powmod(&x, order / r, f, p) != vec![1])
}

/// The table polynomial if present, else the lexicographically first primitive one.
fn default_modulus(p: u32, m: u32) -> Vec<u32> {
    if let Some((_, f)) = CONWAY.iter().find(|(pp, f)| *pp == p && f.len() as u32 == m + 1) {
        return f.to_vec();
    }
    let count = (p as u64).pow(m);
    for idx in 0..count {
        let mut f = Vec::with_capacity(m as usize + 1);
        let mut v = idx;
        for _ in 0..m {
            f.push((v % p as u64) as u32);
            v /= p as u64;
        }
        f.push(1);
        if f[0] != 0 && is_irreducible(&f, p) && x_is_primitive(&f, p) {
            return f;
        }
    }
    unreachable!("primitive polynomials exist for every degree")
}

impl Field {
    /// GF(p^m) with the default modulus.
    pub fn new(p: u32, m: u32) -> Result<Field> {
        Self::check_size(p, m)?;
        Self::build(p, m, default_modulus(p, m))
    }

    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Field> {
        Self::new(p, 1)
    }

    /// GF(p^m) with an explicit monic modulus (constant term first).
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Field> {
        if modulus.len() < 2 {
            bail!(Parameter, "modulus must have degree at least 1");
        }
        let m = (modulus.len() - 1) as u32;
        Self::check_size(p, m)?;
        if *modulus.last().unwrap() != 1 {
            bail!(Parameter, "modulus must be monic");
        }
        if modulus.iter().any(|&c| c >= p) {
            bail!(Domain, "modulus coefficients must lie in [0, {p})");
        }
        if !is_irreducible(modulus, p) {
            bail!(Domain, "modulus {modulus:?} is reducible over GF({p})");
        }
        Self::build(p, m, modulus.to_vec())
    }

    pub fn from_config(cfg: &FieldConfig) -> Result<Field> {
        match &cfg.modulus {
            Some(f) => {
                if f.len() as u32 != cfg.m + 1 {
                    bail!(Config, "modulus length must be m+1");
                }
                Self::with_modulus(cfg.p, f)
            }
            None => Self::new(cfg.p, cfg.m),
        }
    }

    pub fn config(&self) -> FieldConfig {
        FieldConfig { p: self.0.p, m: self.0.m, modulus: Some(self.0.modulus.clone()) }
    }

    fn check_size(p: u32, m: u32) -> Result<()> {
        if !is_prime(p) {
            bail!(Parameter, "characteristic {p} is not prime");
        }
        if m == 0 {
            bail!(Parameter, "extension degree must be positive");
        }
        let q = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q > SIZE_LIMIT {
            bail!(Unsupported, "GF({p}^{m}) exceeds the 2^20 element limit");
        }
        Ok(())
    }

    fn build(p: u32, m: u32, modulus: Vec<u32>) -> Result<Field> {
        let q = p.pow(m);
        let mut inner = Inner {
            p,
            m,
            q,
            modulus,
            primitive: 0,
            exp: Vec::new(),
            log: Vec::new(),
            trace: Vec::new(),
            add: None,
            dual: Vec::new(),
        };
        if p > 2 && m > 1 && q <= 1024 {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digit_add(p, m, a, b);
                }
            }
            inner.add = Some(t);
        }
        let mut field = Field(Arc::new(inner));
        let primitive = field.find_primitive();
        let inner = Arc::get_mut(&mut field.0).expect("fresh field");
        inner.primitive = primitive;
        if q <= TABLE_LIMIT {
            let mut exp = vec![0u32; 2 * (q as usize - 1)];
            let mut log = vec![0u32; q as usize];
            let mut cur = 1u32;
            for i in 0..(q - 1) as usize {
                exp[i] = cur;
                log[cur as usize] = i as u32;
                cur = poly_mul_idx(p, m, &inner.modulus, cur, primitive);
            }
            for i in (q - 1) as usize..exp.len() {
                exp[i] = exp[i - (q - 1) as usize];
            }
            inner.exp = exp;
            inner.log = log;
        }
        if q <= TABLE_LIMIT {
            let tr: Vec<u32> = (0..q).map(|a| field.trace_slow(a)).collect();
            Arc::get_mut(&mut field.0).unwrap().trace = tr;
        }
        let dual = field.compute_dual(&field.poly_basis())?;
        Arc::get_mut(&mut field.0).unwrap().dual = dual;
        Ok(field)
    }

    fn find_primitive(&self) -> u32 {
        let (p, m) = (self.0.p, self.0.m);
        if x_is_primitive(&self.0.modulus, p) {
            return if m == 1 { (p - self.0.modulus[0]) % p } else { p };
        }
        let order = self.0.q as u64 - 1;
        let factors = prime_factors(order);
        (1..self.0.q)
            .find(|&g| factors.iter().all(|&r| self.pow_slow(g, order / r) != 1))
            .expect("multiplicative group is cyclic")
    }

    fn pow_slow(&self, a: u32, mut e: u64) -> u32 {
        let mut r = 1u32;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = poly_mul_idx(self.0.p, self.0.m, &self.0.modulus, r, b);
            }
            b = poly_mul_idx(self.0.p, self.0.m, &self.0.modulus, b, b);
            e >>= 1;
        }
        r
    }

    fn trace_slow(&self, a: u32) -> u32 {
        let mut acc = 0u32;
        let mut cur = a;
        for _ in 0..self.0.m {
            acc = self.add(acc, cur);
            cur = self.pow_slow(cur, self.0.p as u64);
        }
        debug_assert!(acc < self.0.p);
        acc
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }
    #[inline]
    pub fn m(&self) -> u32 {
        self.0.m
    }
    /// Number of elements.
    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }
    /// Generator of the multiplicative group.
    pub fn primitive(&self) -> u32 {
        self.0.primitive
    }
    /// Whether the field is its own prime field.
    pub fn is_prime_field(&self) -> bool {
        self.0.m == 1
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let i = &*self.0;
        if i.p == 2 {
            a ^ b
        } else if i.m == 1 {
            let s = a + b;
            if s >= i.p {
                s - i.p
            } else {
                s
            }
        } else if let Some(t) = &i.add {
            t[(a * i.q + b) as usize]
        } else {
            digit_add(i.p, i.m, a, b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        let i = &*self.0;
        if i.p == 2 || a == 0 {
            a
        } else if i.m == 1 {
            i.p - a
        } else {
            let mut out = 0u32;
            let mut pw = 1u32;
            let mut v = a;
            for _ in 0..i.m {
                let d = v % i.p;
                v /= i.p;
                out += ((i.p - d) % i.p) * pw;
                pw *= i.p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let i = &*self.0;
        if !i.log.is_empty() {
            i.exp[(i.log[a as usize] + i.log[b as usize]) as usize]
        } else {
            poly_mul_idx(i.p, i.m, &i.modulus, a, b)
        }
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let i = &*self.0;
        if !i.log.is_empty() {
            let l = i.log[a as usize];
            Some(i.exp[((i.q - 1 - l) % (i.q - 1)) as usize])
        } else {
            Some(self.pow_slow(a, i.q as u64 - 2))
        }
    }

    /// Inverse of a value known to be nonzero.
    #[inline]
    pub fn inv_nz(&self, a: u32) -> u32 {
        self.inv(a).expect("inverse of zero")
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let i = &*self.0;
        if !i.log.is_empty() {
            let l = (i.log[a as usize] as u64 * (e % (i.q as u64 - 1))) % (i.q as u64 - 1);
            i.exp[l as usize]
        } else {
            self.pow_slow(a, e)
        }
    }

    /// `primitive^e` for any integer exponent.
    pub fn exp(&self, e: i64) -> u32 {
        let ord = self.0.q as i64 - 1;
        self.pow(self.0.primitive, e.rem_euclid(ord) as u64)
    }

    /// Absolute trace to GF(p); the result is a prime-field index.
    #[inline]
    pub fn trace(&self, a: u32) -> u32 {
        if self.0.m == 1 {
            return a;
        }
        if !self.0.trace.is_empty() {
            self.0.trace[a as usize]
        } else {
            self.trace_slow(a)
        }
    }

    /// Coefficients in the polynomial basis, constant term first.
    pub fn digits(&self, a: u32) -> Vec<u32> {
        let mut v = a;
        (0..self.0.m)
            .map(|_| {
                let d = v % self.0.p;
                v /= self.0.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0u32, |acc, &c| acc * self.0.p + c)
    }

    /// Polynomial basis 1, x, ..., x^{m-1} as element indices.
    pub fn poly_basis(&self) -> Vec<u32> {
        (0..self.0.m).map(|i| self.0.p.pow(i)).collect()
    }

    /// Dual of the polynomial basis under the trace form.
    pub fn poly_dual_basis(&self) -> &[u32] {
        &self.0.dual
    }

    /// Coordinates of `a` in the dual of the polynomial basis: `tr(a * x^i)`.
    pub fn dual_coords(&self, a: u32) -> Vec<u32> {
        self.poly_basis().iter().map(|&b| self.trace(self.mul(a, b))).collect()
    }

    /// Element with the given coordinates in the dual of the polynomial basis.
    pub fn from_dual_coords(&self, c: &[u32]) -> u32 {
        let mut acc = 0;
        for (&ci, &bi) in c.iter().zip(self.0.dual.iter()) {
            acc = self.add(acc, self.mul(ci, bi));
        }
        acc
    }

    fn compute_dual(&self, alpha: &[u32]) -> Result<Vec<u32>> {
        let m = self.0.m as usize;
        let p = self.0.p;
        if alpha.len() != m {
            bail!(Structural, "basis must have {m} elements");
        }
        // Solve for beta_j = sum_k c_jk x^k with tr(alpha_i beta_j) = delta_ij.
        // M[i][k] = tr(alpha_i x^k); C = M^{-1} transposed.
        let xs = self.poly_basis();
        let mut aug: Vec<Vec<u32>> = (0..m)
            .map(|i| {
                let mut row: Vec<u32> = xs.iter().map(|&x| self.trace(self.mul(alpha[i], x))).collect();
                row.extend((0..m).map(|j| u32::from(i == j)));
                row
            })
            .collect();
        for col in 0..m {
            let piv = (col..m).find(|&r| aug[r][col] != 0);
            let Some(piv) = piv else {
                bail!(Domain, "basis is linearly dependent over GF({p})");
            };
            aug.swap(col, piv);
            let inv = modinv(aug[col][col], p) as u64;
            for v in aug[col].iter_mut() {
                *v = (*v as u64 * inv % p as u64) as u32;
            }
            for r in 0..m {
                if r != col && aug[r][col] != 0 {
                    let f = aug[r][col] as u64;
                    for c in 0..2 * m {
                        let t = (f * aug[col][c] as u64 % p as u64) as u32;
                        aug[r][c] = (aug[r][c] + p - t) % p;
                    }
                }
            }
        }
        // Rows of aug[.., m..] hold M^{-1}; beta_j has coefficients (M^{-1})[k][j].
        Ok((0..m)
            .map(|j| {
                let coeffs: Vec<u32> = (0..m).map(|k| aug[k][m + j]).collect();
                self.from_digits(&coeffs)
            })
            .collect())
    }

    /// Checked element constructor.
    pub fn element(&self, value: u32) -> Result<FieldElement<'_>> {
        if value >= self.0.q {
            bail!(Domain, "{value} is not an element of GF({})", self.0.q);
        }
        Ok(FieldElement { field: self, value })
    }

    /// Dot product of two equal-length vectors.
    pub fn dot(&self, a: &[u32], b: &[u32]) -> u32 {
        let mut acc = 0;
        for (&x, &y) in a.iter().zip(b) {
            if x != 0 && y != 0 {
                acc = self.add(acc, self.mul(x, y));
            }
        }
        acc
    }

    /// `y += c * x` elementwise.
    pub fn axpy(&self, y: &mut [u32], c: u32, x: &[u32]) {
        if c == 0 {
            return;
        }
        for (yi, &xi) in y.iter_mut().zip(x) {
            if xi != 0 {
                *yi = self.add(*yi, self.mul(c, xi));
            }
        }
    }
}

fn digit_add(p: u32, m: u32, a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0u32;
    let mut pw = 1u32;
    for _ in 0..m {
        let d = (a % p + b % p) % p;
        a /= p;
        b /= p;
        out += d * pw;
        pw *= p;
    }
    out
}

fn poly_mul_idx(p: u32, m: u32, modulus: &[u32], a: u32, b: u32) -> u32 {
    let split = |mut v: u32| -> Vec<u32> {
        (0..m)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    };
    let r = poly_mulmod(&split(a), &split(b), modulus, p);
    r.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

/// A pair of bases with `tr(alpha_i beta_j) = [i == j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualBasisPair {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
}

impl DualBasisPair {
    /// Coordinates of `a` in `alpha`: `tr(a beta_i)`.
    pub fn alpha_coords(&self, f: &Field, a: u32) -> Vec<u32> {
        self.beta.iter().map(|&b| f.trace(f.mul(a, b))).collect()
    }
    /// Coordinates of `a` in `beta`: `tr(a alpha_i)`.
    pub fn beta_coords(&self, f: &Field, a: u32) -> Vec<u32> {
        self.alpha.iter().map(|&b| f.trace(f.mul(a, b))).collect()
    }
}

/// Dual basis of `alpha` under the trace form.
pub fn dual_basis(f: &Field, alpha: &[u32]) -> Result<DualBasisPair> {
    if alpha.iter().any(|&a| a >= f.q()) {
        bail!(Domain, "basis element outside the field");
    }
    let beta = f.compute_dual(alpha)?;
    Ok(DualBasisPair { alpha: alpha.to_vec(), beta })
}

/// An element bound to its field. Arithmetic across different fields fails.
#[derive(Clone, Copy)]
pub struct FieldElement<'f> {
    field: &'f Field,
    value: u32,
}

impl fmt::Debug for FieldElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({})", self.field, self.value)
    }
}

impl PartialEq for FieldElement<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.value == other.value
    }
}

impl<'f> FieldElement<'f> {
    pub fn value(&self) -> u32 {
        self.value
    }
    pub fn field(&self) -> &'f Field {
        self.field
    }
    /// Polynomial-basis coefficients.
    pub fn coeffs(&self) -> Vec<u32> {
        self.field.digits(self.value)
    }

    fn same(&self, o: &Self) -> Result<()> {
        if self.field != o.field {
            return Err(Error::Structural(format!("mixing {:?} and {:?}", self.field, o.field)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        Ok(Self { field: self.field, value: self.field.add(self.value, o.value) })
    }
    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        Ok(Self { field: self.field, value: self.field.sub(self.value, o.value) })
    }
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        Ok(Self { field: self.field, value: self.field.mul(self.value, o.value) })
    }
    pub fn inv(&self) -> Result<Self> {
        match self.field.inv(self.value) {
            Some(v) => Ok(Self { field: self.field, value: v }),
            None => Err(Error::Domain("inverse of zero".into())),
        }
    }
    pub fn pow(&self, e: u64) -> Self {
        Self { field: self.field, value: self.field.pow(self.value, e) }
    }
    pub fn trace(&self) -> u32 {
        self.field.trace(self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conway_table_entries_are_primitive() {
        for (p, f) in CONWAY {
            assert!(is_irreducible(f, *p), "{p} {f:?}");
            assert!(x_is_primitive(f, *p), "{p} {f:?}");
        }
    }

    #[test]
    fn gf4_basics() {
        let f = Field::new(2, 2).unwrap();
        let w = 2; // x
        let w2 = f.mul(w, w);
        assert_eq!(w2, 3);
        assert_eq!(f.mul(w, w2), 1);
        assert_eq!(f.trace(0), 0);
        assert_eq!(f.trace(w), 1);
        assert_eq!(f.trace(1), 0);
    }

    #[test]
    fn gf5_inverse() {
        let f = Field::prime(5).unwrap();
        assert_eq!(f.inv(3), Some(2));
        assert_eq!(f.inv(0), None);
    }

    #[test]
    fn mismatched_fields_rejected() {
        let a = Field::prime(5).unwrap();
        let b = Field::prime(7).unwrap();
        let x = a.element(1).unwrap();
        let y = b.element(1).unwrap();
        assert!(matches!(x.add(&y), Err(Error::Structural(_))));
        assert!(matches!(a.element(0).unwrap().inv(), Err(Error::Domain(_))));
    }

    #[test]
    fn gf4_self_dual_basis() {
        let f = Field::new(2, 2).unwrap();
        let pair = dual_basis(&f, &[2, 3]).unwrap();
        assert_eq!(pair.beta, vec![2, 3]);
        assert!(dual_basis(&f, &[1, 1]).is_err());
        let f2 = Field::prime(2).unwrap();
        assert_eq!(dual_basis(&f2, &[1]).unwrap().beta, vec![1]);
    }

    #[test]
    fn large_field_without_tables_agrees() {
        let f = Field::new(2, 17).unwrap();
        let a = 12345;
        let ai = f.inv(a).unwrap();
        assert_eq!(f.mul(a, ai), 1);
        assert_eq!(f.pow(a, (f.q() - 1) as u64), 1);
        assert!(Field::new(2, 21).is_err());
    }

    #[test]
    fn search_fallback_finds_primitive_modulus() {
        let f = Field::new(3, 7).unwrap();
        assert_eq!(f.pow(f.primitive(), (f.q() - 1) as u64), 1);
        assert_ne!(f.pow(f.primitive(), ((f.q() - 1) / 2) as u64), 1);
    }
}
