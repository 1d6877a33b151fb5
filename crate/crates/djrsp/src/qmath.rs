//! Dense complex linear algebra for registers of up to three qubits.
//!
//! Conventions used throughout the crate:
//!
//! * Qubit 0 is the **most significant** basis bit: the basis index of an
//!   n-qubit register reads as the bit string of its qubits in order, so
//!   for three qubits A, B, C the state |abc⟩ sits at index 4a + 2b + c.
//! * Matrices are stored dense in row-major order. The maximum dimension
//!   is 8, so no sparsity or blocking is ever worth it.
//! * Values are immutable after construction and safe to share across
//!   threads.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// Largest register size the crate supports.
pub const MAX_QUBITS: usize = 3;

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<S: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<S>>,
}

impl<S: Scalar> ComplexMatrix<S> {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<S>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::new entry count",
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState(
                "matrix entries must be finite".to_string(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(S::zero(), S::zero()); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::new(S::one(), S::zero());
        }
        m
    }

    /// 2x2 matrix from row-major real entries.
    pub fn from_real_2x2(entries: [S; 4]) -> Self {
        Self {
            rows: 2,
            cols: 2,
            data: entries
                .iter()
                .map(|&x| Complex::new(x, S::zero()))
                .collect(),
        }
    }

    /// Rank-1 outer product |ket⟩⟨ket| of a complex column vector.
    pub fn outer(ket: &[Complex<S>]) -> Self {
        let d = ket.len();
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(ket[i] * ket[j].conj());
            }
        }
        Self {
            rows: d,
            cols: d,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<S> {
        self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Complex<S>] {
        &self.data
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product inner dimension",
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik.re == S::zero() && aik.im == S::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += aik * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix sum shape",
                expected: self.rows * self.cols,
                actual: other.rows * other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, factor: Complex<S>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: S) -> Self {
        self.scale(Complex::new(factor, S::zero()))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<S> {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .sum()
    }

    /// Largest elementwise absolute difference against `other`.
    pub fn max_abs_diff(&self, other: &Self) -> S {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(S::zero(), S::max)
    }

    /// Largest deviation from hermiticity, `max |m[i][j] - conj(m[j][i])|`.
    pub fn hermiticity_error(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self.data[i * self.cols + j] - self.data[j * self.cols + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Pauli σx.
pub fn pauli_x<S: Scalar>() -> ComplexMatrix<S> {
    ComplexMatrix::from_real_2x2([S::zero(), S::one(), S::one(), S::zero()])
}

/// Pauli σy with the convention [[0, -i], [i, 0]].
pub fn pauli_y<S: Scalar>() -> ComplexMatrix<S> {
    let zero = Complex::new(S::zero(), S::zero());
    let i = Complex::new(S::zero(), S::one());
    ComplexMatrix::new(2, 2, vec![zero, -i, i, zero]).expect("constant matrix")
}

/// Pauli σz.
pub fn pauli_z<S: Scalar>() -> ComplexMatrix<S> {
    ComplexMatrix::from_real_2x2([S::one(), S::zero(), S::zero(), -S::one()])
}

/// Kronecker product with `a`'s indices as the high-order block.
pub fn tensor<S: Scalar>(a: &ComplexMatrix<S>, b: &ComplexMatrix<S>) -> ComplexMatrix<S> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut data = vec![Complex::new(S::zero(), S::zero()); rows * cols];
    for i1 in 0..a.rows {
        for j1 in 0..a.cols {
            let aij = a.data[i1 * a.cols + j1];
            for i2 in 0..b.rows {
                for j2 in 0..b.cols {
                    let r = i1 * b.rows + i2;
                    let c = j1 * b.cols + j2;
                    data[r * cols + c] = aij * b.data[i2 * b.cols + j2];
                }
            }
        }
    }
    ComplexMatrix { rows, cols, data }
}

/// Lifts a single-qubit operator to `num_qubits` by tensoring identities
/// around it, with `target` counted from the most significant qubit.
pub fn embed<S: Scalar>(
    op: &ComplexMatrix<S>,
    target: usize,
    num_qubits: usize,
) -> Result<ComplexMatrix<S>> {
    if target >= num_qubits {
        return Err(Error::QubitOutOfRange {
            index: target,
            num_qubits,
        });
    }
    if op.rows != 2 || op.cols != 2 {
        return Err(Error::DimensionMismatch {
            context: "embed expects a single-qubit operator",
            expected: 2,
            actual: op.rows,
        });
    }
    let mut out = ComplexMatrix::identity(1);
    for q in 0..num_qubits {
        let factor = if q == target {
            op.clone()
        } else {
            ComplexMatrix::identity(2)
        };
        out = tensor(&out, &factor);
    }
    Ok(out)
}

/// Pure state of a small qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<S: Scalar> {
    num_qubits: usize,
    amplitudes: Vec<Complex<S>>,
}

impl<S: Scalar> PureState<S> {
    /// Builds a normalized state; the squared norm must be 1 within the
    /// structural tolerance of the scalar type.
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex<S>>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::QubitOutOfRange {
                index: num_qubits,
                num_qubits: MAX_QUBITS,
            });
        }
        let dim = 1usize << num_qubits;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "PureState amplitude count",
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        let norm_sq: S = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - S::one()).abs() > S::structural_tol() {
            return Err(Error::InvalidState(format!(
                "pure state squared norm {norm_sq} deviates from 1"
            )));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<S>] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Density operator |ψ⟩⟨ψ| of this state.
    pub fn density(&self) -> DensityOperator<S> {
        DensityOperator {
            num_qubits: self.num_qubits,
            matrix: ComplexMatrix::outer(&self.amplitudes),
        }
    }
}

/// Density operator on a small qubit register.
///
/// Hermiticity is enforced at construction; the trace is 1 for normalized
/// states, while unnormalized intermediates produced by [`apply`] carry
/// their weight in the trace until the caller renormalizes.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<S: Scalar> {
    num_qubits: usize,
    matrix: ComplexMatrix<S>,
}

impl<S: Scalar> DensityOperator<S> {
    pub fn new(num_qubits: usize, matrix: ComplexMatrix<S>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::QubitOutOfRange {
                index: num_qubits,
                num_qubits: MAX_QUBITS,
            });
        }
        let dim = 1usize << num_qubits;
        if matrix.rows != dim || matrix.cols != dim {
            return Err(Error::DimensionMismatch {
                context: "DensityOperator matrix dimension",
                expected: dim,
                actual: matrix.rows,
            });
        }
        let herm = matrix.hermiticity_error();
        if herm > S::structural_tol() {
            return Err(Error::InvalidState(format!(
                "density operator deviates from hermiticity by {herm}"
            )));
        }
        Ok(Self { num_qubits, matrix })
    }

    pub fn from_pure(state: &PureState<S>) -> Self {
        state.density()
    }

    /// Maximally mixed state I/2^n.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let w = S::one() / real::<S>(dim as i32);
        Self {
            num_qubits,
            matrix: ComplexMatrix::identity(dim).scale_real(w),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix<S> {
        &self.matrix
    }

    /// Real part of the trace; the imaginary part of a hermitian matrix
    /// trace is zero up to rounding.
    pub fn trace_real(&self) -> S {
        self.matrix.trace().re
    }

    /// Rescales by 1/weight, for renormalizing after a selective operation
    /// whose success probability is `weight`.
    pub fn renormalized(&self, weight: S) -> Result<Self> {
        if weight < S::zero_probability_cutoff() {
            return Err(Error::ZeroProbability);
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            matrix: self.matrix.scale_real(S::one() / weight),
        })
    }

    pub fn hermiticity_error(&self) -> S {
        self.matrix.hermiticity_error()
    }

    /// Smallest eigenvalue, for positive-semidefiniteness checks.
    pub fn min_eigenvalue(&self) -> S {
        let eigs = hermitian_eigenvalues(&self.matrix);
        eigs.into_iter().fold(S::infinity(), S::min)
    }

    /// Eigenvalue spectrum in ascending order.
    pub fn eigenvalues(&self) -> Vec<S> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Checks the invariants of a normalized physical state: unit trace
    /// within the structural tolerance and spectrum above the PSD floor.
    pub fn validate_normalized(&self) -> Result<()> {
        let tr = self.trace_real();
        if (tr - S::one()).abs() > S::structural_tol() {
            return Err(Error::InvalidState(format!(
                "density operator trace {tr} deviates from 1"
            )));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < S::psd_floor() {
            return Err(Error::InvalidState(format!(
                "density operator has eigenvalue {min_eig} below the PSD floor"
            )));
        }
        Ok(())
    }
}

/// Conjugation op·ρ·op†. The result is generally unnormalized; its trace
/// is the weight of the branch and renormalization is the caller's job.
pub fn apply<S: Scalar>(
    op: &ComplexMatrix<S>,
    rho: &DensityOperator<S>,
) -> Result<DensityOperator<S>> {
    if !op.is_square() || op.rows != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: "apply operator dimension",
            expected: rho.dim(),
            actual: op.rows,
        });
    }
    let m = op.mul(rho.matrix())?.mul(&op.adjoint())?;
    Ok(DensityOperator {
        num_qubits: rho.num_qubits,
        matrix: m,
    })
}

/// Inserts `bit` at position `pos` (counted from the most significant bit
/// of an `n`-bit index) into an (n-1)-bit index.
fn insert_bit(index: usize, pos: usize, bit: usize, n: usize) -> usize {
    let shift = n - 1 - pos;
    let high = index >> shift;
    let low = index & ((1 << shift) - 1);
    (((high << 1) | bit) << shift) | low
}

/// Traces out qubit `drop`, preserving the order of the remaining qubits.
pub fn partial_trace<S: Scalar>(
    rho: &DensityOperator<S>,
    drop: usize,
) -> Result<DensityOperator<S>> {
    let n = rho.num_qubits;
    if n < 2 {
        return Err(Error::InvalidState(
            "partial trace needs at least two qubits".to_string(),
        ));
    }
    if drop >= n {
        return Err(Error::QubitOutOfRange {
            index: drop,
            num_qubits: n,
        });
    }
    let out_dim = 1usize << (n - 1);
    let mut data = vec![Complex::new(S::zero(), S::zero()); out_dim * out_dim];
    for i in 0..out_dim {
        for j in 0..out_dim {
            let mut acc = Complex::new(S::zero(), S::zero());
            for k in 0..2 {
                let fi = insert_bit(i, drop, k, n);
                let fj = insert_bit(j, drop, k, n);
                acc += rho.matrix.get(fi, fj);
            }
            data[i * out_dim + j] = acc;
        }
    }
    Ok(DensityOperator {
        num_qubits: n - 1,
        matrix: ComplexMatrix {
            rows: out_dim,
            cols: out_dim,
            data,
        },
    })
}

/// Fidelity |⟨φ|ρ|φ⟩| of a normalized density operator against a pure
/// state, clamped into [0, 1] against rounding spill.
pub fn fidelity_pure<S: Scalar>(phi: &PureState<S>, rho: &DensityOperator<S>) -> Result<S> {
    if phi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: "fidelity state dimension",
            expected: rho.dim(),
            actual: phi.dim(),
        });
    }
    let d = phi.dim();
    let mut acc = Complex::new(S::zero(), S::zero());
    for i in 0..d {
        for j in 0..d {
            acc += phi.amplitudes[i].conj() * rho.matrix.get(i, j) * phi.amplitudes[j];
        }
    }
    Ok(acc.norm().min(S::one()).max(S::zero()))
}

/// Eigenvalues of a hermitian matrix via cyclic Jacobi on the real
/// symmetric embedding [[X, -Y], [Y, X]] of H = X + iY; each eigenvalue of
/// H appears twice in the embedding, so every other sorted value is kept.
fn hermitian_eigenvalues<S: Scalar>(m: &ComplexMatrix<S>) -> Vec<S> {
    let n = m.rows;
    let dim = 2 * n;
    let mut a = vec![S::zero(); dim * dim];
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            a[i * dim + j] = z.re;
            a[i * dim + (j + n)] = -z.im;
            a[(i + n) * dim + j] = z.im;
            a[(i + n) * dim + (j + n)] = z.re;
        }
    }
    symmetric_eigenvalues(&mut a, dim)
        .into_iter()
        .step_by(2)
        .collect()
}

/// Cyclic Jacobi eigenvalue iteration for a dense real symmetric matrix.
fn symmetric_eigenvalues<S: Scalar>(a: &mut [S], n: usize) -> Vec<S> {
    let eps = S::epsilon();
    let half = S::from_f64(0.5).unwrap();
    for _sweep in 0..100 {
        let mut off = S::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        let scale: S = (0..n).map(|i| a[i * n + i].abs()).sum();
        let scale = scale.max(S::one());
        if off.sqrt() <= eps * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= eps * scale {
                    continue;
                }
                let theta = half * (a[q * n + q] - a[p * n + p]) / apq;
                let t = {
                    let sign = if theta >= S::zero() {
                        S::one()
                    } else {
                        -S::one()
                    };
                    sign / (theta.abs() + (theta * theta + S::one()).sqrt())
                };
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<S> = (0..n).map(|i| a[i * n + i]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eigs
}
