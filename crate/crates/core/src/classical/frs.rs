//! Linear-algebraic list decoding and list recovery for folded GRS codes.
//!
//! Interpolate `Q(X, Y_1..Y_s) = A_0(X) + sum_t A_t(X) Y_t` through every
//! length-`s` window of every candidate folded symbol, then solve the linear
//! system `A_0(X) + sum_t A_t(X) f(gamma^{t-1} X) = 0` for the message
//! polynomial `f`. The solution set is an affine space, enumerated and
//! filtered by true agreement.

use super::{agreement, LinearCode, ENUM_LIMIT};
use crate::error::{bail, Result};
use crate::linalg::{checked_count, for_each_vector, Matrix};

struct Shape {
    m: usize,
    k: usize,
    d: usize,
}

fn shape(code: &LinearCode, s: usize, constraints: usize) -> Result<Shape> {
    let Some(g) = code.grs() else {
        bail!(Unsupported, "algebraic mode needs a folded GRS code");
    };
    let m = code.ext();
    if s == 0 || s > m {
        bail!(Parameter, "need 1 <= s <= m, got s={s} m={m}");
    }
    let k = g.k;
    // smallest D with (s+1)(D+1) + k - 1 > constraints
    let mut d = 0usize;
    while (s + 1) * (d + 1) + k - 1 <= constraints {
        d += 1;
    }
    Ok(Shape { m, k, d })
}

/// Agreement count above which the algebraic decoder provably finds every
/// codeword, for sets of size at most `ell`.
pub fn frs_required_agreement(code: &LinearCode, s: usize, ell: usize) -> Result<usize> {
    let m = code.ext();
    let c = code.n() * ell * (m + 1 - s.min(m));
    let sh = shape(code, s, c)?;
    Ok((sh.d + sh.k - 1) / (sh.m - s + 1) + 1)
}

/// Algebraic list decoding of a folded GRS code within `radius` symbols.
pub fn frs_list_decode(code: &LinearCode, received: &[u32], radius: usize, s: usize) -> Result<Vec<Vec<u32>>> {
    let m = code.ext();
    let sets: Vec<Vec<Vec<u32>>> = received.chunks(m).map(|b| vec![b.to_vec()]).collect();
    let agree = code.n().saturating_sub(radius);
    frs_list_recover(code, &sets, agree, s)
}

/// Algebraic list recovery: codewords with at least `agree` symbols in the sets.
pub fn frs_list_recover(code: &LinearCode, sets: &[Vec<Vec<u32>>], agree: usize, s: usize) -> Result<Vec<Vec<u32>>> {
    let f = code.field();
    let g = code.grs().ok_or_else(|| crate::error::Error::Unsupported("algebraic mode needs a folded GRS code".into()))?;
    let m = code.ext();
    if s == 0 || s > m {
        bail!(Parameter, "need 1 <= s <= m, got s={s} m={m}");
    }
    let windows = m - s + 1;
    let constraints: usize = sets.iter().map(|st| st.len()).sum::<usize>() * windows;
    let sh = shape(code, s, constraints)?;
    let (k, d) = (sh.k, sh.d);
    let a0_len = d + k;
    let unknowns = a0_len + s * (d + 1);

    let mut rows = Matrix::zeros(0, unknowns);
    for (i, set) in sets.iter().enumerate() {
        for sym in set {
            for l in 0..windows {
                let j0 = i * m + l;
                let alpha = f.pow(g.gamma, j0 as u64);
                let mut row = vec![0u32; unknowns];
                let mut pw = 1u32;
                for e in 0..a0_len {
                    row[e] = pw;
                    pw = f.mul(pw, alpha);
                }
                for t in 0..s {
                    let y = f.mul(sym[l + t], f.inv_nz(g.multipliers[j0 + t]));
                    let mut pw = y;
                    for e in 0..=d {
                        row[a0_len + t * (d + 1) + e] = pw;
                        pw = f.mul(pw, alpha);
                    }
                }
                rows.push_row(&row);
            }
        }
    }
    let kernel = rows.nullspace(f);
    if kernel.rows == 0 {
        return Err(crate::error::Error::Internal("interpolation system has only the zero solution".into()));
    }
    let q = kernel.row(0);
    let a0 = &q[..a0_len];
    let at = |t: usize, e: usize| -> u32 {
        if e <= d {
            q[a0_len + t * (d + 1) + e]
        } else {
            0
        }
    };

    // Coefficient of X^e in sum_t A_t(X) f(gamma^t X) equals -A_0[e].
    let mut sys = Matrix::zeros(a0_len, k);
    let rhs: Vec<u32> = a0.iter().map(|&c| f.neg(c)).collect();
    for e in 0..a0_len {
        for j in 0..k.min(e + 1) {
            let mut c = 0u32;
            for t in 0..s {
                let coef = at(t, e - j);
                if coef != 0 {
                    c = f.add(c, f.mul(coef, f.pow(g.gamma, (t * j) as u64)));
                }
            }
            sys.set(e, j, c);
        }
    }
    let Some(particular) = sys.solve(f, &rhs) else {
        return Ok(Vec::new());
    };
    let free = sys.nullspace(f);
    checked_count(f.q(), free.rows, ENUM_LIMIT)?;
    let mut out = Vec::new();
    for_each_vector(f.q(), free.rows, |coef| {
        let mut msg = particular.clone();
        for (r, &c) in coef.iter().enumerate() {
            f.axpy(&mut msg, c, free.row(r));
        }
        let cw = code.encode(&msg);
        if agreement(code, &cw, sets) >= agree {
            out.push(cw);
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::gf::Field;

    #[test]
    fn decodes_two_of_four_corrupted_blocks() {
        let f = Field::prime(17).unwrap();
        let base = grs_build(&GrsSpec::rs(&f, 16, 2)).unwrap();
        let code = base.fold(4).unwrap();
        assert_eq!(frs_required_agreement(&code, 2, 1).unwrap(), 2);
        let cw = code.encode(&[5, 9]);
        let mut r = cw.clone();
        for j in 0..8 {
            r[j] = (r[j] + 1 + j as u32) % 17;
        }
        let alg = list_decode(&code, &r, 2, ListMode::FrsAlgebraic { s: 2 }).unwrap();
        let bf = list_decode(&code, &r, 2, ListMode::BruteForce).unwrap();
        assert_eq!(alg, bf);
        assert!(alg.contains(&cw));
    }
}
