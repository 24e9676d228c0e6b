//! Dense complex linear algebra: Hermitian and general eigendecompositions,
//! spectral norms, singular vectors and PSD square roots.
//!
//! Every routine is a pure function of its inputs. Tolerances are relative
//! to the operand's norm with an absolute floor of [`ABS_FLOOR`].
//!
//! Singular values and the complex Schur form come from `nalgebra`. The
//! Hermitian eigensolver is a cyclic complex Jacobi method, which keeps the
//! `sqrt(λ_max(A*A))` cross-check of [`spectral_norm`] on an independent path.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Absolute floor applied to every norm-relative tolerance.
pub const ABS_FLOOR: f64 = 1e-14;

/// Unit-norm tolerance for [`UnitVector`].
pub const UNIT_TOL: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-12;
const PSD_CLAMP: f64 = 1e-10;
const MAX_JACOBI_SWEEPS: usize = 100;

/// `norm` clamped below by [`ABS_FLOOR`].
#[inline]
pub fn scale(norm: f64) -> f64 {
    norm.max(ABS_FLOOR)
}

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Unimodular scalar `e^{iθ}`.
pub fn unimodular(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

/// Rejects matrices with an empty dimension or a NaN/Inf entry.
pub fn check_matrix(a: &ComplexMatrix) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::Shape(format!(
            "matrix must be at least 1x1, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            let z = a[(r, c)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

pub fn frobenius(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn vector_norm(v: &ComplexVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Euclidean inner product `[u, v] = v* u` (conjugate-linear in `v`).
pub fn euclid_inner(u: &ComplexVector, v: &ComplexVector) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// A complex vector of Euclidean norm one (within [`UNIT_TOL`]).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(ComplexVector);

impl UnitVector {
    pub fn new(v: ComplexVector) -> Result<Self> {
        let n = vector_norm(&v);
        if v.is_empty() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm: n });
        }
        Ok(UnitVector(v))
    }

    pub fn normalize(v: ComplexVector) -> Result<Self> {
        let n = vector_norm(&v);
        if v.is_empty() || n == 0.0 || !n.is_finite() {
            return Err(Error::Degenerate("cannot normalize a zero vector"));
        }
        Ok(UnitVector(v.unscale(n)))
    }

    /// Canonical basis vector `e_k` of `C^dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut v = ComplexVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        UnitVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &ComplexVector {
        &self.0
    }

    pub fn into_inner(self) -> ComplexVector {
        self.0
    }

    /// Rotates the phase so that the largest-modulus entry (first one on
    /// ties) is real and positive.
    pub fn phase_normalized(self) -> Self {
        let mut best = 0;
        for (i, z) in self.0.iter().enumerate() {
            if z.norm() > self.0[best].norm() {
                best = i;
            }
        }
        let pivot = self.0[best];
        let r = pivot.norm();
        if r == 0.0 {
            return self;
        }
        let rot = pivot.conj() / r;
        let mut v = self.0.map(|z| z * rot);
        v[best] = C64::new(v[best].norm(), 0.0);
        UnitVector(v)
    }
}

/// An eigenvalue with a unit eigenvector and its residual `‖Av − μv‖`.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: C64,
    pub vector: UnitVector,
    pub residual: f64,
}

/// Output of [`hermitian_eig`]: real eigenvalues in descending order with
/// matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: Vec<UnitVector>,
}

impl HermitianEig {
    /// Reassembles `Σ λ_i v_i v_i*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.first().map_or(0, UnitVector::dim);
        let mut a = ComplexMatrix::zeros(n, n);
        for (lam, v) in self.values.iter().zip(&self.vectors) {
            let v = v.as_vector();
            a += (v * v.adjoint()).scale(*lam);
        }
        a
    }
}

fn require_square(a: &ComplexMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

/// Largest entry of `|A − A*|`.
pub fn hermitian_deviation(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

fn require_hermitian(a: &ComplexMatrix) -> Result<()> {
    require_square(a)?;
    let dev = hermitian_deviation(a);
    if dev > HERMITIAN_TOL * scale(frobenius(a)) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    require_hermitian(a)?;
    let n = a.nrows();
    // Work on the exactly Hermitian part.
    let mut w = (a + a.adjoint()).unscale(2.0);
    let mut v = ComplexMatrix::identity(n, n);
    let total = frobenius(&w);

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += w[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= f64::EPSILON * 0.5 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = w[(p, q)];
                let mag = g.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = w[(p, p)].re;
                let aqq = w[(q, q)].re;
                let zeta = (aqq - app) / (2.0 * mag);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let e = g / mag;
                let jpq = e * s;
                let jqp = -(e.conj() * s);
                // W <- W J
                for k in 0..n {
                    let wkp = w[(k, p)];
                    let wkq = w[(k, q)];
                    w[(k, p)] = wkp * c + wkq * jqp;
                    w[(k, q)] = wkp * jpq + wkq * c;
                }
                // W <- J* W
                for k in 0..n {
                    let wpk = w[(p, k)];
                    let wqk = w[(q, k)];
                    w[(p, k)] = wpk * c + wqk * jqp.conj();
                    w[(q, k)] = wpk * jpq.conj() + wqk * c;
                }
                w[(p, q)] = C64::new(0.0, 0.0);
                w[(q, p)] = C64::new(0.0, 0.0);
                w[(p, p)].im = 0.0;
                w[(q, q)].im = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].re.total_cmp(&w[(i, i)].re));
    let values = order.iter().map(|&i| w[(i, i)].re).collect();
    let vectors = order
        .iter()
        .map(|&i| UnitVector::normalize(v.column(i).into_owned()))
        .collect::<Result<Vec<_>>>()?;
    Ok(HermitianEig { values, vectors })
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_max_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(a)?.values[0])
}

/// Eigenvalues of a square matrix (with multiplicity) and unit eigenvectors.
///
/// Uses the complex Schur form `A = Q T Q*`; the eigenvector for `T_kk` is
/// obtained by back substitution in `T` and mapped through `Q`. Near-zero
/// pivots are perturbed to `ε‖T‖` (as in LAPACK's `trevc`), so defective or
/// clustered eigenvalues get a vector whose `residual` records the
/// accuracy actually achieved.
pub fn general_eig(a: &ComplexMatrix) -> Result<Vec<EigenPair>> {
    require_square(a)?;
    let n = a.nrows();
    let schur =
        Schur::try_new(a.clone(), f64::EPSILON, 100 * n.max(10)).ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    // Floor keeps |denom|² representable in complex division.
    let smin = (f64::EPSILON * frobenius(&t)).max(1e-150);

    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let mu = t[(k, k)];
        let mut z = ComplexVector::zeros(n);
        z[k] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let s: C64 = ((j + 1)..=k).map(|l| t[(j, l)] * z[l]).sum();
            let mut denom = t[(j, j)] - mu;
            if denom.norm() < smin {
                denom = C64::new(smin, 0.0);
            }
            z[j] = -s / denom;
            let big = z.iter().fold(0.0f64, |m, c| m.max(c.norm()));
            if big > 1e100 {
                z.unscale_mut(big);
            }
        }
        let vector = UnitVector::normalize(&q * z)?;
        let residual = vector_norm(&(a * vector.as_vector() - vector.as_vector() * mu));
        pairs.push(EigenPair {
            value: mu,
            vector,
            residual,
        });
    }
    Ok(pairs)
}

/// Largest singular value.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |m: f64, &s| m.max(s))
}

/// Top singular triplet `(σ, u, v)` with `A v = σ u` and `u* A = σ v*`.
///
/// The first maximal singular value in the solver's ordering is taken and
/// `u` is phase-normalized; `v` carries the matching phase.
pub fn top_singular_triplet(a: &ComplexMatrix) -> Result<(f64, UnitVector, UnitVector)> {
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let mut best = 0;
    for i in 1..sv.len() {
        if sv[i] > sv[best] {
            best = i;
        }
    }
    let sigma = sv[best];
    if sigma == 0.0 {
        return Err(Error::Degenerate("zero matrix has no top singular vector"));
    }
    let u_mat = svd.u.as_ref().ok_or(Error::NoConvergence)?;
    let vt = svd.v_t.as_ref().ok_or(Error::NoConvergence)?;
    let u_raw = UnitVector::normalize(u_mat.column(best).into_owned())?;
    let u = u_raw.clone().phase_normalized();
    // Same phase rotation applied to v keeps A v = σ u.
    let rot = euclid_inner(u.as_vector(), u_raw.as_vector());
    let v_raw: ComplexVector = vt.row(best).adjoint();
    let v = UnitVector::normalize(v_raw.map(|z| z * rot))?;
    Ok((sigma, u, v))
}

/// Left singular vector for the top singular value, phase-normalized.
pub fn top_left_singular_vector(a: &ComplexMatrix) -> Result<(f64, UnitVector)> {
    let (s, u, _) = top_singular_triplet(a)?;
    Ok((s, u))
}

/// Positive square root of a PSD matrix. Eigenvalues down to
/// `−1e-10·‖A‖` are clamped to zero.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    let norm = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = *eig.values.last().expect("non-empty spectrum");
    if min < -PSD_CLAMP * scale(norm) {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let n = a.nrows();
    let mut b = ComplexMatrix::zeros(n, n);
    for (lam, v) in eig.values.iter().zip(&eig.vectors) {
        let v = v.as_vector();
        b += (v * v.adjoint()).scale(lam.max(0.0).sqrt());
    }
    Ok(b)
}

/// Elementary operator `ξ ⊗ η = ξη*`, mapping `ν ↦ [ν, η] ξ`.
pub fn outer(xi: &ComplexVector, eta: &ComplexVector) -> ComplexMatrix {
    xi * eta.adjoint()
}

/// Result of [`max_modulus_eigenpair`].
#[derive(Debug, Clone)]
pub struct MaxEigen {
    pub pair: EigenPair,
    /// Set for the zero matrix, whose eigenvector is arbitrary.
    pub degenerate: bool,
}

/// Relative band inside which two moduli count as tied.
const MODULUS_TIE: f64 = 1e-12;

/// Picks the eigenpair of maximal modulus; ties (moduli within a relative
/// `1e-12`) go to the larger real part, then the larger imaginary part.
pub fn select_max_modulus(pairs: Vec<EigenPair>) -> Option<EigenPair> {
    let top = pairs.iter().fold(0.0f64, |m, p| m.max(p.value.norm()));
    let band = MODULUS_TIE * scale(top);
    pairs
        .into_iter()
        .filter(|p| p.value.norm() >= top - band)
        .reduce(|best, p| {
            let ord = p
                .value
                .re
                .total_cmp(&best.value.re)
                .then(p.value.im.total_cmp(&best.value.im));
            if ord.is_gt() {
                p
            } else {
                best
            }
        })
}

/// Eigenpair of maximal modulus with deterministic tie-breaking. The zero
/// matrix yields value 0 with `e_1`, flagged degenerate.
pub fn max_modulus_eigenpair(a: &ComplexMatrix) -> Result<MaxEigen> {
    require_square(a)?;
    if a.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Ok(MaxEigen {
            pair: EigenPair {
                value: C64::new(0.0, 0.0),
                vector: UnitVector::basis(a.nrows(), 0),
                residual: 0.0,
            },
            degenerate: true,
        });
    }
    let pair = select_max_modulus(general_eig(a)?).ok_or(Error::NoConvergence)?;
    Ok(MaxEigen {
        pair,
        degenerate: false,
    })
}

/// Spectral radius.
pub fn spectral_radius(a: &ComplexMatrix) -> Result<f64> {
    Ok(general_eig(a)?
        .iter()
        .fold(0.0f64, |m, p| m.max(p.value.norm())))
}

/// Vector state `[Aξ, ξ] = ξ* A ξ`.
pub fn bracket(a: &ComplexMatrix, xi: &ComplexVector) -> C64 {
    euclid_inner(&(a * xi), xi)
}

/// Integer matrix power `A^k` (k ≥ 1).
pub fn matrix_power(a: &ComplexMatrix, k: u32) -> ComplexMatrix {
    let mut out = a.clone();
    for _ in 1..k {
        out = &out * a;
    }
    out
}
