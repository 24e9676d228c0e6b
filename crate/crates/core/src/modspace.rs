//! The Hilbert `M_d(ℂ)`-module `E = M_{d×m}(ℂ)` with inner product
//! `⟨x, y⟩ = x y*`.
//!
//! `m = 1` is the column space `ℂ^d` with `⟨x, y⟩ = x ⊗ y`; `m = d` is the
//! matrix algebra acting on itself; `m = n·d` models the direct sum of `n`
//! copies. For every `d, m ≥ 1` the span of `{x y*}` is all of `M_d`, so the
//! module is full.

use crate::error::{Error, Result};
use crate::numkernel::{
    bracket, check_matrix, frobenius, outer, scale, spectral_norm, top_left_singular_vector,
    ComplexMatrix, UnitVector, C64,
};

/// Frobenius tolerance for the basic-vector invariant `⟨x,x⟩ = ξξ*`.
pub const BASIC_TOL: f64 = 1e-10;

/// An element of `M_{d×m}(ℂ)`: `d` is the dimension of `H = ℂ^d`, `m` the
/// multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleElement {
    entries: ComplexMatrix,
}

impl ModuleElement {
    pub fn new(entries: ComplexMatrix) -> Result<Self> {
        check_matrix(&entries)?;
        Ok(ModuleElement { entries })
    }

    pub fn zeros(d: usize, m: usize) -> Self {
        assert!(d >= 1 && m >= 1, "module dimensions must be positive");
        ModuleElement {
            entries: ComplexMatrix::zeros(d, m),
        }
    }

    pub fn d(&self) -> usize {
        self.entries.nrows()
    }

    pub fn m(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> ComplexMatrix {
        self.entries
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.entries)
    }

    /// Zero up to the absolute tolerance floor.
    pub fn is_zero(&self) -> bool {
        self.norm() <= crate::numkernel::ABS_FLOOR
    }

    pub fn check_same_shape(&self, other: &ModuleElement) -> Result<()> {
        if self.d() != other.d() || self.m() != other.m() {
            return Err(Error::Shape(format!(
                "module elements have shapes {}x{} and {}x{}",
                self.d(),
                self.m(),
                other.d(),
                other.m()
            )));
        }
        Ok(())
    }

    /// `x + λ y`.
    pub fn add_scaled(&self, other: &ModuleElement, lambda: C64) -> Result<ModuleElement> {
        self.check_same_shape(other)?;
        Ok(ModuleElement {
            entries: &self.entries + &other.entries * lambda,
        })
    }

    pub fn scaled(&self, c: C64) -> ModuleElement {
        ModuleElement {
            entries: &self.entries * c,
        }
    }

    /// Module action `a · x` for `a ∈ M_d`.
    pub fn left_mul(&self, a: &ComplexMatrix) -> Result<ModuleElement> {
        if a.ncols() != self.d() || a.nrows() != self.d() {
            return Err(Error::Shape(format!(
                "coefficient must be {d}x{d}, got {}x{}",
                a.nrows(),
                a.ncols(),
                d = self.d()
            )));
        }
        Ok(ModuleElement {
            entries: a * &self.entries,
        })
    }
}

/// `⟨x, y⟩ = x y*`, a `d×d` matrix.
pub fn inner_product(x: &ModuleElement, y: &ModuleElement) -> Result<ComplexMatrix> {
    x.check_same_shape(y)?;
    Ok(&x.entries * y.entries.adjoint())
}

/// `‖x‖ = ‖⟨x,x⟩‖^{1/2}`, computed as the spectral norm of `x` itself.
pub fn norm(x: &ModuleElement) -> f64 {
    x.norm()
}

/// Vector state `[Aξ, ξ]`.
pub fn vector_state(a: &ComplexMatrix, xi: &UnitVector) -> Result<C64> {
    if a.nrows() != xi.dim() || a.ncols() != xi.dim() {
        return Err(Error::Shape(format!(
            "vector state of a {}x{} matrix at a vector of dimension {}",
            a.nrows(),
            a.ncols(),
            xi.dim()
        )));
    }
    Ok(bracket(a, xi.as_vector()))
}

/// A rank-one projection `ξξ*` on `ℂ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalProjection {
    xi: UnitVector,
}

impl MinimalProjection {
    pub fn new(xi: UnitVector) -> Self {
        MinimalProjection { xi }
    }

    pub fn xi(&self) -> &UnitVector {
        &self.xi
    }

    pub fn matrix(&self) -> ComplexMatrix {
        outer(self.xi.as_vector(), self.xi.as_vector())
    }

    /// `e · x`.
    pub fn apply(&self, x: &ModuleElement) -> Result<ModuleElement> {
        x.left_mul(&self.matrix())
    }
}

/// A module element `x = ξ v*` together with the unit vector `ξ` for which
/// `⟨x, x⟩ = ξξ*`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicVector {
    element: ModuleElement,
    xi: UnitVector,
}

impl BasicVector {
    /// Validates `‖⟨x,x⟩ − ξξ*‖_F ≤ 1e-10`.
    pub fn new(element: ModuleElement, xi: UnitVector) -> Result<Self> {
        let b = BasicVector { element, xi };
        let dev = b.deviation();
        if !(dev <= BASIC_TOL) {
            return Err(Error::Precondition(format!(
                "not a basic vector: ‖⟨x,x⟩ − ξξ*‖_F = {dev:e}"
            )));
        }
        Ok(b)
    }

    pub fn element(&self) -> &ModuleElement {
        &self.element
    }

    pub fn xi(&self) -> &UnitVector {
        &self.xi
    }

    /// Frobenius distance between `⟨x,x⟩` and `ξξ*`.
    pub fn deviation(&self) -> f64 {
        if self.xi.dim() != self.element.d() {
            return f64::INFINITY;
        }
        let gram = &self.element.entries * self.element.entries.adjoint();
        frobenius(&(gram - outer(self.xi.as_vector(), self.xi.as_vector())))
    }
}

/// Minimal projection `e = ξξ*` with `‖e x‖ = ‖x‖`; `ξ` is the top left
/// singular vector of `x`, phase-normalized.
pub fn norm_attaining_projection(x: &ModuleElement) -> Result<MinimalProjection> {
    if x.is_zero() {
        return Err(Error::Degenerate(
            "zero element has no norm-attaining projection",
        ));
    }
    let (_, xi) = top_left_singular_vector(x.entries())?;
    Ok(MinimalProjection::new(xi))
}

/// The basic vector `ξ v*`.
pub fn make_basic(xi: &UnitVector, v: &UnitVector) -> Result<BasicVector> {
    // Re-validate: callers may have built the vectors with a looser check.
    let xi = UnitVector::new(xi.as_vector().clone())?;
    let v = UnitVector::new(v.as_vector().clone())?;
    let element = ModuleElement::new(outer(xi.as_vector(), v.as_vector()))?;
    BasicVector::new(element, xi)
}

/// Right-action matrix `y* x` (m×m) of `θ_{x,y}: z ↦ ⟨z, y⟩ x = z (y* x)`.
pub fn theta_matrix(x: &ModuleElement, y: &ModuleElement) -> Result<ComplexMatrix> {
    x.check_same_shape(y)?;
    Ok(y.entries.adjoint() * &x.entries)
}

/// Relative tolerance helper: `tol · (value + 1)`.
pub(crate) fn shifted(tol: f64, value: f64) -> f64 {
    tol * (value + 1.0)
}

/// Relative comparison `|a − b| ≤ tol · max(|a|, |b|, floor)`.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale(a.abs().max(b.abs()))
}
