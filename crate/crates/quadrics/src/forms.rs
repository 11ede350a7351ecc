//! Quadratic-form data model: exact linear algebra over the rationals,
//! signature, real normal-form reduction and the affine shift reduction.
//!
//! F(z) = (1/2) Az.z with A integral symmetric, even diagonal, det != 0.

use crate::error::{Error, Result};
use crate::nt;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Deserialize;
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    dim: usize,
    a: Vec<BigInt>, // row-major d x d
    det: BigInt,
    signature: (usize, usize),
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticForm(d={}, det={})", self.dim, self.det)
    }
}

/// Real linear map z -> Z = (u, x, y) with Q(Z) = +-F(z),
/// Q(u, x, y) = |u|^2/2 + x.y.
#[derive(Debug, Clone)]
pub struct NormalFormMap {
    pub dim: usize,
    /// row-major d x d, Z = L z
    pub l_map: Vec<f64>,
    /// inverse map, z = L^{-1} Z
    pub l_inv: Vec<f64>,
    /// number of u coordinates
    pub n: usize,
    /// number of hyperbolic pairs
    pub d1: usize,
    pub det_abs: f64,
    /// true when -F was normalized instead of F
    pub flipped: bool,
}

#[derive(Debug, Clone)]
pub struct LatticeProblem {
    pub form: QuadraticForm,
    pub m: BigRational,
    pub l: BigRational,
    /// L^2 m, exact
    pub ml2: BigInt,
}

/// Detected split structure: F = sum over pairs z_i z_j + sum (A_kk/2) z_k^2.
#[derive(Debug, Clone)]
pub struct SplitStructure {
    /// index pairs (i, j), i < j, with A_ij = 1 and rows otherwise zero
    pub pairs: Vec<(usize, usize)>,
    /// diagonal coordinates (k, A_kk/2)
    pub diag: Vec<(usize, i64)>,
}

impl SplitStructure {
    /// True when the form is exactly F_d = sum x_i y_i (no diagonal part).
    pub fn is_pure(&self) -> bool {
        self.diag.is_empty()
    }
}

#[derive(Deserialize)]
struct FormFile {
    dim: usize,
    matrix: Vec<i64>,
}

impl QuadraticForm {
    /// Build from a row-major integer matrix, validating every invariant.
    pub fn new(dim: usize, entries: Vec<BigInt>) -> Result<Self> {
        if dim < 3 {
            return Err(Error::DimensionTooSmall { got: dim });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
            if (&entries[i * dim + i] % 2u8) != BigInt::zero() {
                return Err(Error::OddDiagonal { i });
            }
        }
        let det = bareiss_det(dim, &entries);
        if det.is_zero() {
            return Err(Error::Degenerate);
        }
        let signature = rational_signature(dim, &entries)?;
        Ok(Self {
            dim,
            a: entries,
            det,
            signature,
        })
    }

    pub fn from_i64(dim: usize, entries: &[i64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    /// Parse the form description document: {"dim": d, "matrix": [row-major]}.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: FormFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("form file: {e}")))?;
        Self::from_i64(f.dim, &f.matrix)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.a[i * self.dim + j]
    }

    /// Matrix entries as i64 (all desk-scale forms fit).
    pub fn entries_i64(&self) -> Result<Vec<i64>> {
        self.a
            .iter()
            .map(|e| {
                e.to_i64().ok_or_else(|| {
                    Error::InvalidParam("matrix entry exceeds i64 range".into())
                })
            })
            .collect()
    }

    pub fn entries_f64(&self) -> Vec<f64> {
        self.a.iter().map(|e| e.to_f64().unwrap()).collect()
    }

    /// F(z) = (1/2) z^T A z, exact.
    pub fn eval(&self, z: &[BigRational]) -> Result<BigRational> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        let mut acc = BigRational::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += BigRational::from(self.a[i * self.dim + j].clone()) * &z[i] * &z[j];
            }
        }
        Ok(acc / BigRational::from(BigInt::from(2)))
    }

    /// F(z) for an integer vector, exact in i128 (no overflow at desk scale).
    pub fn eval_i64(&self, z: &[i64]) -> Result<i128> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        let a = self.entries_i64()?;
        let mut acc: i128 = 0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += a[i * self.dim + j] as i128 * z[i] as i128 * z[j] as i128;
            }
        }
        Ok(acc / 2)
    }

    pub fn eval_f64(&self, z: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            let mut row = 0.0;
            for j in 0..self.dim {
                row += self.a[i * self.dim + j].to_f64().unwrap() * z[j];
            }
            acc += z[i] * row;
        }
        0.5 * acc
    }

    /// Exact inverse of A as a rational matrix (row-major).
    pub fn inverse(&self) -> Vec<BigRational> {
        let d = self.dim;
        let mut m: Vec<BigRational> = self
            .a
            .iter()
            .map(|e| BigRational::from(e.clone()))
            .collect();
        let mut inv: Vec<BigRational> = vec![BigRational::zero(); d * d];
        for i in 0..d {
            inv[i * d + i] = BigRational::one();
        }
        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| !m[r * d + col].is_zero())
                .expect("non-degenerate");
            if pivot != col {
                for j in 0..d {
                    m.swap(col * d + j, pivot * d + j);
                    inv.swap(col * d + j, pivot * d + j);
                }
            }
            let p = m[col * d + col].clone();
            for j in 0..d {
                m[col * d + j] /= p.clone();
                inv[col * d + j] /= p.clone();
            }
            for r in 0..d {
                if r != col && !m[r * d + col].is_zero() {
                    let f = m[r * d + col].clone();
                    for j in 0..d {
                        let t = m[col * d + j].clone() * &f;
                        m[r * d + j] -= t;
                        let t = inv[col * d + j].clone() * &f;
                        inv[r * d + j] -= t;
                    }
                }
            }
        }
        inv
    }

    /// c^T A^{-1} c, exact.
    pub fn inv_quadratic(&self, c: &[i64]) -> BigRational {
        let d = self.dim;
        let inv = self.inverse();
        let mut acc = BigRational::zero();
        for i in 0..d {
            for j in 0..d {
                acc += inv[i * d + j].clone()
                    * BigRational::from(BigInt::from(c[i]))
                    * BigRational::from(BigInt::from(c[j]));
            }
        }
        acc
    }

    /// Detect the split shape F = sum of unit pairs plus a diagonal part.
    pub fn split_structure(&self) -> Option<SplitStructure> {
        let a = self.entries_i64().ok()?;
        let d = self.dim;
        let mut used = vec![false; d];
        let mut pairs = Vec::new();
        let mut diag = Vec::new();
        for i in 0..d {
            if used[i] {
                continue;
            }
            let row_nonzero: Vec<usize> =
                (0..d).filter(|&j| a[i * d + j] != 0).collect();
            match row_nonzero.as_slice() {
                [j] if *j == i => {
                    diag.push((i, a[i * d + i] / 2));
                    used[i] = true;
                }
                [j] if !used[*j] && a[i * d + *j] == 1 && a[i * d + i] == 0 => {
                    // partner row must mirror
                    let j = *j;
                    let partner: Vec<usize> =
                        (0..d).filter(|&k| a[j * d + k] != 0).collect();
                    if partner == vec![i] && a[j * d + j] == 0 {
                        pairs.push((i.min(j), i.max(j)));
                        used[i] = true;
                        used[j] = true;
                    } else {
                        return None;
                    }
                }
                _ => return None,
            }
        }
        if pairs.is_empty() {
            return None;
        }
        Some(SplitStructure { pairs, diag })
    }

    /// The split form F_d = sum_{i<=d/2} x_i y_i with coordinates
    /// (x_1..x_s, y_1..y_s).
    pub fn split_fd(d: usize) -> Result<Self> {
        if d % 2 != 0 {
            return Err(Error::ClosedFormUnavailable { got: d });
        }
        let s = d / 2;
        let mut m = vec![0i64; d * d];
        for i in 0..s {
            m[i * d + (s + i)] = 1;
            m[(s + i) * d + i] = 1;
        }
        Self::from_i64(d, &m)
    }

    /// Uniform hash for provenance metadata.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.dim.to_le_bytes());
        for e in &self.a {
            h.update(e.to_signed_bytes_le());
            h.update([0xff]);
        }
        let digest = h.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Fraction-free Bareiss determinant of an integer matrix.
fn bareiss_det(d: usize, a: &[BigInt]) -> BigInt {
    let mut m: Vec<BigInt> = a.to_vec();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..d {
        if m[k * d + k].is_zero() {
            let swap = ((k + 1)..d).find(|&r| !m[r * d + k].is_zero());
            match swap {
                Some(r) => {
                    for j in 0..d {
                        m.swap(k * d + j, r * d + j);
                    }
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in (k + 1)..d {
            for j in (k + 1)..d {
                let num = &m[i * d + j] * &m[k * d + k] - &m[i * d + k] * &m[k * d + j];
                m[i * d + j] = num / &prev;
            }
            m[i * d + k] = BigInt::zero();
        }
        prev = m[k * d + k].clone();
    }
    let det = m[(d - 1) * d + (d - 1)].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Exact inertia by symmetric congruence reduction over the rationals.
fn rational_signature(d: usize, a: &[BigInt]) -> Result<(usize, usize)> {
    let mut m: Vec<BigRational> = a.iter().map(|e| BigRational::from(e.clone())).collect();
    let mut alive: Vec<usize> = (0..d).collect();
    let mut n_plus = 0usize;
    let mut n_minus = 0usize;
    while !alive.is_empty() {
        // find a nonzero diagonal among alive coordinates
        let diag = alive
            .iter()
            .position(|&i| !m[i * d + i].is_zero());
        let pivot_idx = match diag {
            Some(pos) => alive[pos],
            None => {
                // all diagonals zero: find off-diagonal and symmetrize
                let mut found = None;
                'outer: for (pi, &i) in alive.iter().enumerate() {
                    for &j in alive.iter().skip(pi + 1) {
                        if !m[i * d + j].is_zero() {
                            found = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                let (i, j) = found.ok_or(Error::Degenerate)?;
                // congruence e_i += e_j : row/col update
                for k in 0..d {
                    let t = m[j * d + k].clone();
                    m[i * d + k] += t;
                }
                for k in 0..d {
                    let t = m[k * d + j].clone();
                    m[k * d + i] += t;
                }
                i
            }
        };
        let p = m[pivot_idx * d + pivot_idx].clone();
        debug_assert!(!p.is_zero());
        if p.is_positive() {
            n_plus += 1;
        } else {
            n_minus += 1;
        }
        alive.retain(|&i| i != pivot_idx);
        // Schur complement on the remaining block
        for &i in &alive {
            if m[i * d + pivot_idx].is_zero() {
                continue;
            }
            let f = m[i * d + pivot_idx].clone() / &p;
            for &j in &alive {
                let t = m[pivot_idx * d + j].clone() * &f;
                m[i * d + j] -= t;
            }
            m[i * d + pivot_idx] = BigRational::zero();
        }
        for &j in &alive {
            m[pivot_idx * d + j] = BigRational::zero();
        }
    }
    if n_plus + n_minus < d {
        return Err(Error::Degenerate);
    }
    Ok((n_plus, n_minus))
}

/// Cyclic-sweep Jacobi eigendecomposition of a symmetric matrix.
/// Returns (eigenvalues, eigenvectors as columns of v): a = v diag(w) v^T.
fn jacobi_eigen(d: usize, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off += m[p * d + q] * m[p * d + q];
            }
        }
        if off.sqrt() < 1e-15 * norm {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[p * d + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * d + p];
                let aqq = m[q * d + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let mkp = m[k * d + p];
                    let mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p * d + k];
                    let mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let w = (0..d).map(|i| m[i * d + i]).collect();
    (w, v)
}

fn mat_mul(d: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

fn mat_inv(d: usize, a: &[f64]) -> Vec<f64> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; d * d];
    for i in 0..d {
        inv[i * d + i] = 1.0;
    }
    for col in 0..d {
        let mut pivot = col;
        for r in (col + 1)..d {
            if m[r * d + col].abs() > m[pivot * d + col].abs() {
                pivot = r;
            }
        }
        for j in 0..d {
            m.swap(col * d + j, pivot * d + j);
            inv.swap(col * d + j, pivot * d + j);
        }
        let p = m[col * d + col];
        for j in 0..d {
            m[col * d + j] /= p;
            inv[col * d + j] /= p;
        }
        for r in 0..d {
            if r != col {
                let f = m[r * d + col];
                if f != 0.0 {
                    for j in 0..d {
                        m[r * d + j] -= f * m[col * d + j];
                        inv[r * d + j] -= f * inv[col * d + j];
                    }
                }
            }
        }
    }
    inv
}

/// Reduce F to the normal form Q(u,x,y) = |u|^2/2 + x.y (or -F when the
/// negative index exceeds the positive one).
pub fn normalize_form(form: &QuadraticForm) -> Result<NormalFormMap> {
    let d = form.dim();
    let (n_plus, n_minus) = form.signature();
    let flipped = n_minus > n_plus;
    let mut a = form.entries_f64();
    if flipped {
        for e in a.iter_mut() {
            *e = -*e;
        }
    }
    let (w, v) = jacobi_eigen(d, &a);
    // positive eigenpairs sorted by eigenvalue descending (deterministic),
    // negatives by |eigenvalue| descending
    let mut pos: Vec<usize> = (0..d).filter(|&i| w[i] > 0.0).collect();
    let mut neg: Vec<usize> = (0..d).filter(|&i| w[i] <= 0.0).collect();
    pos.sort_by(|&i, &j| w[j].partial_cmp(&w[i]).unwrap().then(i.cmp(&j)));
    neg.sort_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap().then(i.cmp(&j)));
    let d1 = neg.len();
    let n = pos.len() - d1;
    debug_assert_eq!(n + 2 * d1, d);

    // rows of S: coordinates of (u, x, y) in terms of the scaled eigenbasis.
    // p_i = sqrt(w_i) (V^T z)_i for positive i; q_j = sqrt(-w_j) (V^T z)_j.
    // u_k = p_{d1+k}; x_j = (p_j + q_j)/sqrt(2); y_j = (p_j - q_j)/sqrt(2).
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut l_map = vec![0.0; d * d];
    let scaled_row = |eig_idx: usize| -> Vec<f64> {
        let s = w[eig_idx].abs().sqrt();
        (0..d).map(|k| s * v[k * d + eig_idx]).collect()
    };
    for k in 0..n {
        let row = scaled_row(pos[d1 + k]);
        l_map[k * d..(k + 1) * d].copy_from_slice(&row);
    }
    for j in 0..d1 {
        let rp = scaled_row(pos[j]);
        let rq = scaled_row(neg[j]);
        for k in 0..d {
            l_map[(n + j) * d + k] = inv_sqrt2 * (rp[k] + rq[k]);
            l_map[(n + d1 + j) * d + k] = inv_sqrt2 * (rp[k] - rq[k]);
        }
    }
    let l_inv = mat_inv(d, &l_map);
    let det_abs = w.iter().map(|x| x.abs().sqrt()).product();
    Ok(NormalFormMap {
        dim: d,
        l_map,
        l_inv,
        n,
        d1,
        det_abs,
        flipped,
    })
}

impl NormalFormMap {
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.l_map[i * d + j] * z[j]).sum())
            .collect()
    }

    pub fn apply_inv(&self, big_z: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.l_inv[i * d + j] * big_z[j]).sum())
            .collect()
    }

    /// Q(u, x, y) = |u|^2/2 + x.y in the map's coordinate layout.
    pub fn q_normal(&self, big_z: &[f64]) -> f64 {
        let mut q = 0.0;
        for k in 0..self.n {
            q += 0.5 * big_z[k] * big_z[k];
        }
        for j in 0..self.d1 {
            q += big_z[self.n + j] * big_z[self.n + self.d1 + j];
        }
        q
    }
}

impl LatticeProblem {
    pub fn new(form: QuadraticForm, m: BigRational, l: BigRational) -> Result<Self> {
        if l < BigRational::one() {
            return Err(Error::InvalidParam(format!("L must be >= 1, got {l}")));
        }
        let ml2 = &m * &l * &l;
        if !ml2.is_integer() {
            return Err(Error::NotInteger {
                what: "L^2 m",
                value: ml2.to_string(),
            });
        }
        Ok(Self {
            form,
            m,
            l,
            ml2: ml2.to_integer(),
        })
    }
}

/// Reduce a non-homogeneous form (1/2)Az.z + z_*.z + tau to the homogeneous
/// problem with shifted weight: returns (m, shift) with shift = A^{-1} z_*.
pub fn reduce_affine(
    form: &QuadraticForm,
    z_star: &[BigRational],
    tau: &BigRational,
    l: &BigRational,
) -> Result<(BigRational, Vec<BigRational>)> {
    let d = form.dim();
    if z_star.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: z_star.len(),
        });
    }
    let inv = form.inverse();
    let shift: Vec<BigRational> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| inv[i * d + j].clone() * &z_star[j])
                .sum::<BigRational>()
        })
        .collect();
    for (i, s) in shift.iter().enumerate() {
        if !(s * l).is_integer() {
            return Err(Error::OffLattice {
                i,
                value: s.to_string(),
            });
        }
    }
    let tau_l2 = tau * l * l;
    if !tau_l2.is_integer() {
        return Err(Error::NotInteger {
            what: "tau L^2",
            value: tau_l2.to_string(),
        });
    }
    let m = form.eval(&shift)? - tau;
    Ok((m, shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn rat(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    pub(crate) fn f4() -> QuadraticForm {
        QuadraticForm::split_fd(4).unwrap()
    }

    #[test]
    fn eval_f4_example() {
        // z = (1,2,3,4) as (x1,x2,y1,y2) -> 1*3 + 2*4 = 11
        let f = f4();
        let z: Vec<BigRational> = [1, 2, 3, 4].iter().map(|&v| rat(v)).collect();
        assert_eq!(f.eval(&z).unwrap(), rat(11));
        let zero: Vec<BigRational> = vec![rat(0); 4];
        assert_eq!(f.eval(&zero).unwrap(), rat(0));
    }

    #[test]
    fn eval_two_i_example() {
        let f = QuadraticForm::from_i64(4, &[2, 0, 0, 0, 0, 2, 0, 0, 0, 0, 2, 0, 0, 0, 0, 2])
            .unwrap();
        let z: Vec<BigRational> = vec![rat(1); 4];
        assert_eq!(f.eval(&z).unwrap(), rat(4));
        assert_eq!(f.signature(), (4, 0));
    }

    #[test]
    fn integer_valued_on_integer_vectors() {
        let f = QuadraticForm::from_i64(
            4,
            &[2, 1, 0, 3, 1, -4, 5, 0, 0, 5, 6, 1, 3, 0, 1, 2],
        )
        .unwrap();
        for z in [[1i64, 2, 3, 4], [-7, 0, 2, 9], [5, 5, 5, 5]] {
            let v = f
                .eval(&z.iter().map(|&x| rat(x)).collect::<Vec<_>>())
                .unwrap();
            assert!(v.is_integer(), "F({z:?}) = {v} not an integer");
        }
    }

    #[test]
    fn signatures() {
        assert_eq!(f4().signature(), (2, 2));
        assert_eq!(f4().det(), &BigInt::from(1));
        let g = QuadraticForm::from_i64(
            4,
            &[0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, -4],
        )
        .unwrap();
        assert_eq!(g.signature(), (2, 2));
        assert_eq!(g.det(), &BigInt::from(8));
    }

    #[test]
    fn validation_errors() {
        // odd diagonal
        let e = QuadraticForm::from_i64(3, &[1, 0, 0, 0, 2, 0, 0, 0, 2]).unwrap_err();
        assert!(matches!(e, Error::OddDiagonal { i: 0 }));
        // not symmetric
        let e = QuadraticForm::from_i64(3, &[2, 1, 0, 0, 2, 0, 0, 0, 2]).unwrap_err();
        assert!(matches!(e, Error::NotSymmetric { .. }));
        // degenerate
        let e = QuadraticForm::from_i64(3, &[2, 0, 0, 0, 2, 0, 0, 0, 0]).unwrap_err();
        assert!(matches!(e, Error::Degenerate));
        // too small
        let e = QuadraticForm::from_i64(2, &[2, 0, 0, 2]).unwrap_err();
        assert!(matches!(e, Error::DimensionTooSmall { .. }));
    }

    #[test]
    fn signature_invariant_under_unimodular_congruence() {
        // A -> S^T A S with det S = +-1 preserves inertia
        let f = QuadraticForm::from_i64(
            4,
            &[2, 1, 0, 0, 1, -2, 1, 0, 0, 1, 4, 1, 0, 0, 1, -6],
        )
        .unwrap();
        let sig = f.signature();
        let s_mats: [[i64; 16]; 3] = [
            [1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1],
            [1, 0, 0, 0, 2, 1, 0, 0, 0, -3, 1, 0, 0, 0, 0, 1],
            [0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 5, 0, 0, 0, 1],
        ];
        for s in s_mats {
            let mut b = vec![BigInt::zero(); 16];
            for i in 0..4 {
                for j in 0..4 {
                    let mut acc = BigInt::zero();
                    for k in 0..4 {
                        for l in 0..4 {
                            acc += BigInt::from(s[k * 4 + i])
                                * f.entry(k, l)
                                * BigInt::from(s[l * 4 + j]);
                        }
                    }
                    b[i * 4 + j] = acc;
                }
            }
            let g = QuadraticForm::new(4, b).unwrap();
            assert_eq!(g.signature(), sig);
        }
    }

    #[test]
    fn normal_form_roundtrip_f4() {
        let f = f4();
        let map = normalize_form(&f).unwrap();
        assert_eq!(map.n, 0);
        assert_eq!(map.d1, 2);
        assert!(!map.flipped);
        assert!((map.det_abs - 1.0).abs() < 1e-10);
        let mut state = 0x12345678u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for _ in 0..1000 {
            let z: Vec<f64> = (0..4).map(|_| 10.0 * rnd()).collect();
            let big_z = map.apply(&z);
            let q = map.q_normal(&big_z);
            let fz = f.eval_f64(&z);
            let want = if map.flipped { -fz } else { fz };
            let scale = 1e-10 * (1.0 + z.iter().map(|v| v * v).sum::<f64>());
            assert!((q - want).abs() < scale, "{q} vs {want}");
        }
    }

    #[test]
    fn normal_form_various() {
        for entries in [
            vec![2i64, 0, 0, 0, 0, 2, 0, 0, 0, 0, 2, 0, 0, 0, 0, 2],
            vec![0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, -4],
            vec![-2, 0, 0, 0, 0, -2, 0, 0, 0, 0, -2, 0, 0, 0, 0, 2],
        ] {
            let f = QuadraticForm::from_i64(4, &entries).unwrap();
            let map = normalize_form(&f).unwrap();
            let (np, nm) = f.signature();
            assert_eq!(map.d1, np.min(nm));
            assert_eq!(map.flipped, nm > np);
            let expect_det = f.det().to_f64().unwrap().abs().sqrt();
            assert!((map.det_abs - expect_det).abs() < 1e-8 * expect_det.max(1.0));
            for z in [[1.0, 0.5, -2.0, 3.0], [0.1, 0.0, 4.0, -1.0]] {
                let big_z = map.apply(&z);
                let q = map.q_normal(&big_z);
                let fz = f.eval_f64(&z);
                let want = if map.flipped { -fz } else { fz };
                assert!((q - want).abs() < 1e-9 * (1.0 + fz.abs()));
                let back = map.apply_inv(&big_z);
                for (zi, bi) in z.iter().zip(&back) {
                    assert!((zi - bi).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn reduce_affine_examples() {
        let f = f4();
        let one = BigRational::one();
        // homogeneous case
        let (m, shift) = reduce_affine(&f, &vec![rat(0); 4], &rat(0), &one).unwrap();
        assert_eq!(m, rat(0));
        assert!(shift.iter().all(|s| s.is_zero()));
        // z* = A e1, tau = 0 -> shift e1, m = F(e1) = 0
        let zs: Vec<BigRational> = (0..4).map(|i| BigRational::from(f.entry(i, 0).clone())).collect();
        let (m, shift) = reduce_affine(&f, &zs, &rat(0), &one).unwrap();
        assert_eq!(shift[0], rat(1));
        assert_eq!(m, rat(0));
        // z* = A (1,1,1,1), tau = 2 -> m = F(1,1,1,1) - 2 = 0
        let ones: Vec<BigRational> = vec![one.clone(); 4];
        let zs: Vec<BigRational> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| BigRational::from(f.entry(i, j).clone()) * &ones[j])
                    .sum()
            })
            .collect();
        let (m, _) = reduce_affine(&f, &zs, &rat(2), &one).unwrap();
        assert_eq!(m, rat(0));
        // off-lattice shift rejected
        let bad: Vec<BigRational> = vec![
            BigRational::new(BigInt::from(1), BigInt::from(3)),
            rat(0),
            rat(0),
            rat(0),
        ];
        // A^{-1} of f4 swaps blocks; z* = (1/3,0,0,0) gives shift (0,0,1/3,0)
        assert!(matches!(
            reduce_affine(&f, &bad, &rat(0), &one),
            Err(Error::OffLattice { .. })
        ));
    }

    #[test]
    fn lattice_problem_integrality() {
        let f = f4();
        let ok = LatticeProblem::new(
            f.clone(),
            BigRational::new(BigInt::from(1), BigInt::from(4)),
            rat(2),
        )
        .unwrap();
        assert_eq!(ok.ml2, BigInt::from(1));
        let bad = LatticeProblem::new(
            f,
            BigRational::new(BigInt::from(1), BigInt::from(3)),
            rat(2),
        );
        assert!(matches!(bad, Err(Error::NotInteger { .. })));
    }

    #[test]
    fn split_detection() {
        assert!(f4().split_structure().unwrap().is_pure());
        let d5 = QuadraticForm::from_i64(
            5,
            &[
                0, 1, 0, 0, 0, //
                1, 0, 0, 0, 0, //
                0, 0, 0, 1, 0, //
                0, 0, 1, 0, 0, //
                0, 0, 0, 0, 2,
            ],
        )
        .unwrap();
        let s = d5.split_structure().unwrap();
        assert_eq!(s.pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(s.diag, vec![(4, 1)]);
        assert!(!s.is_pure());
        let dense = QuadraticForm::from_i64(3, &[2, 1, 0, 1, 2, 0, 0, 0, 2]).unwrap();
        assert!(dense.split_structure().is_none());
    }

    #[test]
    fn form_file_parsing() {
        let f = QuadraticForm::from_json(
            r#"{"dim": 4, "matrix": [0,0,1,0, 0,0,0,1, 1,0,0,0, 0,1,0,0]}"#,
        )
        .unwrap();
        assert_eq!(f.signature(), (2, 2));
        let err = QuadraticForm::from_json(r#"{"dim": 3, "matrix": [1,0,0, 0,2,0, 0,0,2]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("even-diagonal"));
    }
}
