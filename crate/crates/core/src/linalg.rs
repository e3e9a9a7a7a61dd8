//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here is row-major and dense. Dimensions stay below ~64 so no
//! blocking or sparse formats are used.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default tolerance for Hermiticity and positivity checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Off-diagonal norm threshold at which Jacobi sweeps stop.
const JACOBI_THRESHOLD: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    /// Builds a matrix from row-major entries, rejecting bad lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("{rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real-valued rows; handy in tests and constructors.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let ccount = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != ccount) {
            return Err(Error::InvalidShape("ragged rows".into()));
        }
        Self::new(r, ccount, rows.iter().flat_map(|row| row.iter().map(|&x| cr(x))).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { cr(1.0) } else { cr(0.0) })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { cr(values[i]) } else { cr(0.0) })
    }

    /// Column vector from amplitudes.
    pub fn column(v: &[C64]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// |a⟩⟨b|
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn dagger(&self) -> Matrix {
        dagger(self)
    }

    pub fn scale(&self, s: C64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Matrix {
        self.scale(cr(s))
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        matmul(self, other)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                left: shape_str(self),
                right: format!("vector of length {}", v.len()),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |m - m†| entrywise; infinite for non-square input.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// max |a - b| entrywise; infinite on shape mismatch.
    pub fn max_diff(&self, other: &Matrix) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.max_diff(other) <= tol
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch { left: shape_str(self), right: shape_str(other) });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(C64, C64) -> C64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// (m + m†)/2, used to scrub rounding asymmetry after products.
    pub fn hermitian_part(&self) -> Matrix {
        let n = self.rows;
        Matrix::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }
}

fn shape_str(m: &Matrix) -> String {
    format!("{}x{}", m.rows, m.cols)
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; use the `try_*` methods or `matmul`
// when shapes come from user input.

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix add")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix sub")
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        matmul(self, rhs).expect("matrix mul")
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale_real(-1.0)
    }
}

/// Subsystem dimensions of a composite space, first factor most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimSpec {
    factors: Vec<usize>,
}

impl DimSpec {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(Error::InvalidShape(format!("dimension factors {factors:?}")));
        }
        Ok(Self { factors })
    }

    pub fn bipartite(a: usize, b: usize) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn total(&self) -> usize {
        self.factors.iter().product()
    }
}

/// Conjugate transpose.
pub fn dagger(m: &Matrix) -> Matrix {
    Matrix::from_fn(m.cols, m.rows, |i, j| m[(j, i)].conj())
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch { left: shape_str(a), right: shape_str(b) });
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            let brow = &b.data[k * b.cols..(k + 1) * b.cols];
            let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
            for (o, bkj) in orow.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

/// Kronecker product with `a`'s indices major.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    Matrix::from_fn(a.rows * b.rows, a.cols * b.cols, |i, j| {
        a[(i / b.rows, j / b.cols)] * b[(i % b.rows, j % b.cols)]
    })
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub fn trace(m: &Matrix) -> Result<C64> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    Ok((0..m.rows).map(|i| m[(i, i)]).sum())
}

/// Reduced matrix on factor `keep`, tracing out every other factor.
pub fn partial_trace(m: &Matrix, dims: &DimSpec, keep: usize) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    if dims.total() != m.rows {
        return Err(Error::InconsistentDims { factors: dims.factors.clone(), dim: m.rows });
    }
    if keep >= dims.factors.len() {
        return Err(Error::InvalidShape(format!(
            "keep index {keep} for {} factors",
            dims.factors.len()
        )));
    }
    let d = dims.factors[keep];
    let left: usize = dims.factors[..keep].iter().product();
    let right: usize = dims.factors[keep + 1..].iter().product();
    let idx = |l: usize, k: usize, r: usize| (l * d + k) * right + r;
    Ok(Matrix::from_fn(d, d, |k1, k2| {
        let mut acc = C64::new(0.0, 0.0);
        for l in 0..left {
            for r in 0..right {
                acc += m[(idx(l, k1, r), idx(l, k2, r))];
            }
        }
        acc
    }))
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: Matrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.col(k)
    }

    /// Σ f(a_k) v_k v_k†
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.vectors.rows;
        let mut out = Matrix::zeros(n, n);
        for (k, &a) in self.values.iter().enumerate() {
            let fa = f(a);
            if fa == 0.0 {
                continue;
            }
            let v = self.vector(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * fa;
                }
            }
        }
        out
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
pub fn eig_hermitian(m: &Matrix, tol: f64) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let deviation = m.hermiticity_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius().max(1.0);

    let off_norm = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= JACOBI_THRESHOLD * scale {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // Phase out a_pq, then a real rotation zeroes the pair.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = 0.5 * (2.0 * mag).atan2(aqq - app);
                let (s, cs) = theta.sin_cos();
                // U restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let u_pp = cr(cs);
                let u_pq = cr(s);
                let u_qp = -phase.conj() * s;
                let u_qq = phase.conj() * cs;

                // A <- A U
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                // A <- U† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = cr(0.0);
                a[(q, p)] = cr(0.0);
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
                // V <- V U
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

pub fn min_eigenvalue(m: &Matrix, tol: f64) -> Result<f64> {
    Ok(eig_hermitian(m, tol)?.values[0])
}

/// Hermitian within `tol` and smallest eigenvalue ≥ −tol.
pub fn is_psd(m: &Matrix, tol: f64) -> bool {
    match eig_hermitian(m, tol) {
        Ok(e) => e.values[0] >= -tol,
        Err(_) => false,
    }
}

/// Principal square root of a PSD matrix; eigenvalues are clamped at zero.
pub fn psd_sqrt(m: &Matrix, tol: f64) -> Result<Matrix> {
    let e = eig_hermitian(m, tol)?;
    if e.values[0] < -tol {
        return Err(Error::InvalidPovm(format!(
            "negative eigenvalue {:.3e} under square root",
            e.values[0]
        )));
    }
    Ok(e.map_spectrum(|x| x.max(0.0).sqrt()))
}

/// ⟨a|b⟩
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// ⟨a|M|b⟩
pub fn sandwich(a: &[C64], m: &Matrix, b: &[C64]) -> Result<C64> {
    Ok(inner(a, &m.apply(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(n: usize, m: usize, seed: u64) -> Matrix {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        Matrix::from_fn(n, m, |_, _| c(next(), next()))
    }

    fn random_hermitian(n: usize, seed: u64) -> Matrix {
        let x = lcg_matrix(n, n, seed);
        (&x + &x.dagger()).scale_real(0.5)
    }

    #[test]
    fn dagger_basics() {
        let x = lcg_matrix(3, 3, 1);
        assert_eq!(dagger(&dagger(&x)), x);
        assert_eq!(dagger(&Matrix::identity(2)), Matrix::identity(2));
        let g = [cr(1.0), cr(0.0)];
        let e = [cr(0.0), cr(1.0)];
        assert_eq!(dagger(&Matrix::outer(&g, &e)), Matrix::outer(&e, &g));
    }

    #[test]
    fn matmul_basics() {
        let x = lcg_matrix(2, 2, 3);
        assert!(matmul(&Matrix::identity(2), &x).unwrap().approx_eq(&x, 0.0));
        let g = [cr(1.0), cr(0.0)];
        let e = [cr(0.0), cr(1.0)];
        let ge = Matrix::outer(&g, &e);
        assert_eq!(matmul(&ge, &Matrix::column(&e)).unwrap(), Matrix::column(&g));
        let a = lcg_matrix(2, 2, 4);
        let b = lcg_matrix(2, 2, 5);
        let lhs = dagger(&(&a * &b));
        let rhs = &b.dagger() * &a.dagger();
        assert!(lhs.approx_eq(&rhs, 1e-14));
    }

    #[test]
    fn matmul_mismatch_names_shapes() {
        let err = matmul(&Matrix::zeros(2, 3), &Matrix::zeros(2, 3)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2x3"), "{msg}");
    }

    #[test]
    fn kron_basics() {
        assert_eq!(kron(&Matrix::identity(2), &Matrix::identity(2)), Matrix::identity(4));
        // ordering (g, e) ⊗ (0, 1): |e0⟩ is index 2
        let e = Matrix::column(&[cr(0.0), cr(1.0)]);
        let zero = Matrix::column(&[cr(1.0), cr(0.0)]);
        let v = kron(&e, &zero);
        assert_eq!(v.col(0), vec![cr(0.0), cr(0.0), cr(1.0), cr(0.0)]);
        let a = lcg_matrix(2, 2, 7);
        let b = lcg_matrix(3, 3, 8);
        let lhs = trace(&kron(&a, &b)).unwrap();
        let rhs = trace(&a).unwrap() * trace(&b).unwrap();
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn trace_basics() {
        assert_eq!(trace(&Matrix::identity(3)).unwrap(), cr(3.0));
        assert!(trace(&Matrix::zeros(2, 3)).is_err());
        let rho = random_hermitian(3, 11);
        let a = random_hermitian(3, 12);
        assert!(trace(&(&rho * &a)).unwrap().im.abs() < 1e-12);
    }

    #[test]
    fn partial_trace_bell_like() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // (|e0⟩ + |g1⟩)/√2 with ordering g=0, e=1 and field 0, 1
        let psi = [cr(0.0), cr(s), cr(s), cr(0.0)];
        let rho = Matrix::outer(&psi, &psi);
        let dims = DimSpec::bipartite(2, 2).unwrap();
        let red = partial_trace(&rho, &dims, 0).unwrap();
        assert!(red.approx_eq(&Matrix::diag_real(&[0.5, 0.5]), 1e-12));
    }

    #[test]
    fn partial_trace_product_and_general() {
        let a = random_hermitian(2, 21);
        let b = random_hermitian(3, 22);
        let tb = trace(&b).unwrap();
        let ta = trace(&a).unwrap();
        let ab = kron(&a, &b);
        let dims = DimSpec::bipartite(2, 3).unwrap();
        let ra = partial_trace(&ab, &dims, 0).unwrap();
        assert!(ra.approx_eq(&a.scale(tb), 1e-12));
        let rb = partial_trace(&ab, &dims, 1).unwrap();
        assert!(rb.approx_eq(&b.scale(ta), 1e-12));

        // three factors, keep the middle
        let cm = random_hermitian(2, 23);
        let abc = kron(&kron(&a, &b), &cm);
        let dims3 = DimSpec::new(vec![2, 3, 2]).unwrap();
        let mid = partial_trace(&abc, &dims3, 1).unwrap();
        assert!(mid.approx_eq(&b.scale(ta * trace(&cm).unwrap()), 1e-12));
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = Matrix::identity(4);
        let dims = DimSpec::bipartite(2, 3).unwrap();
        assert!(matches!(partial_trace(&m, &dims, 0), Err(Error::InconsistentDims { .. })));
    }

    #[test]
    fn eig_pauli_z_and_identity() {
        let z = Matrix::diag_real(&[1.0, -1.0]);
        let e = eig_hermitian(&z, DEFAULT_TOL).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
        let e3 = eig_hermitian(&Matrix::identity(3), DEFAULT_TOL).unwrap();
        assert!(e3.values.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        let vv = &e3.vectors.dagger() * &e3.vectors;
        assert!(vv.approx_eq(&Matrix::identity(3), 1e-12));
    }

    #[test]
    fn eig_random_reconstructs() {
        for seed in 0..20 {
            let m = random_hermitian(4, 100 + seed);
            let e = eig_hermitian(&m, DEFAULT_TOL).unwrap();
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            let vv = &e.vectors.dagger() * &e.vectors;
            assert!(vv.approx_eq(&Matrix::identity(4), 1e-10));
            for k in 0..4 {
                let v = e.vector(k);
                let mv = m.apply(&v).unwrap();
                for i in 0..4 {
                    assert!((mv[i] - v[i] * e.values[k]).norm() < 1e-9);
                }
            }
            assert!(e.map_spectrum(|x| x).approx_eq(&m, 1e-9));
            let tr = trace(&m).unwrap().re;
            assert!((e.values.iter().sum::<f64>() - tr).abs() < 1e-10);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        match eig_hermitian(&m, DEFAULT_TOL) {
            Err(Error::NotHermitian { deviation, .. }) => assert!((deviation - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn psd_check_consistent_with_quadratic_form() {
        let x = lcg_matrix(3, 3, 55);
        let psd = &x * &x.dagger();
        assert!(is_psd(&psd, DEFAULT_TOL));
        let shifted = &psd - &Matrix::identity(3).scale_real(10.0);
        assert!(!is_psd(&shifted, DEFAULT_TOL));
        for s in 0..100 {
            let v = lcg_matrix(3, 1, 1000 + s).col(0);
            assert!(sandwich(&v, &psd, &v).unwrap().re >= -DEFAULT_TOL);
        }
        let root = psd_sqrt(&psd, DEFAULT_TOL).unwrap();
        assert!((&root * &root).approx_eq(&psd, 1e-9));
        assert!(root.is_hermitian(1e-12));
    }

    #[test]
    fn new_rejects_non_finite() {
        assert!(Matrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(Matrix::new(2, 2, vec![cr(1.0)]).is_err());
    }
}
