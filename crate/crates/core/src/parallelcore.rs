//! Element-level decision procedures: norm-parallelism by definition, by the
//! eigenvalue criterion and by vector-state witness; Birkhoff–James
//! orthogonality; and the equivalence chains built on top of them.
//!
//! Conventions shared by every predicate:
//! - tolerances are shifted by one, `tol · (scale + 1)`, so they stay
//!   meaningful for near-zero norms;
//! - the zero element is parallel to, and Birkhoff–James orthogonal to,
//!   every element;
//! - the *relative deficit* of a decision is `(target − attained) /
//!   (target + 1)`; a predicate answers true iff the deficit is at most
//!   `tol`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modspace::{inner_product, norm_attaining_projection, shifted, ModuleElement};
use crate::numkernel::{
    bracket, matrix_power, max_modulus_eigenpair, psd_sqrt, scale, spectral_norm, spectral_radius,
    top_left_singular_vector, ComplexMatrix, UnitVector, C64,
};
use crate::search::{maximize_on_circle, minimize_in_disk, CircleMax, CIRCLE_GRID};
use crate::serial;

pub const DEFAULT_TOL: f64 = 1e-8;

/// `(target − attained) / (target + 1)`.
pub fn relative_deficit(attained: f64, target: f64) -> f64 {
    (target - attained) / (target + 1.0)
}

/// True when a deficit falls strictly inside the ambiguous band
/// `(tol, margin)`.
pub fn in_knife_edge_band(deficit: f64, tol: f64, margin: f64) -> bool {
    deficit > tol && deficit < margin
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn is_zero_matrix(a: &ComplexMatrix) -> bool {
    a.iter().all(|z| z.norm() == 0.0) || spectral_norm(a) <= crate::numkernel::ABS_FLOOR
}

/// Maximizes `λ ↦ ‖a + λb‖` over the unit circle.
pub fn matrix_circle_search(a: &ComplexMatrix, b: &ComplexMatrix) -> CircleMax {
    if is_zero_matrix(b) {
        return CircleMax {
            theta: 0.0,
            lambda: one(),
            value: spectral_norm(a),
        };
    }
    maximize_on_circle(|lambda| spectral_norm(&(a + b * lambda)), CIRCLE_GRID)
}

/// Outcome of a definition-based parallelism test on two matrices.
#[derive(Debug, Clone, Copy)]
pub struct NormParallel {
    pub parallel: bool,
    pub lambda: C64,
    pub attained: f64,
    pub target: f64,
}

impl NormParallel {
    pub fn deficit(&self) -> f64 {
        relative_deficit(self.attained, self.target)
    }
}

/// `a ‖ b` in the spectral norm: `max_λ ‖a + λb‖ ≥ ‖a‖ + ‖b‖ − tol·(‖a‖+‖b‖+1)`.
pub fn matrices_parallel(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<NormParallel> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!(
            "cannot compare {:?} and {:?} matrices",
            a.shape(),
            b.shape()
        )));
    }
    let target = spectral_norm(a) + spectral_norm(b);
    let found = if is_zero_matrix(a) || is_zero_matrix(b) {
        CircleMax {
            theta: 0.0,
            lambda: one(),
            value: spectral_norm(&(a + b)),
        }
    } else {
        matrix_circle_search(a, b)
    };
    Ok(NormParallel {
        parallel: found.value >= target - shifted(tol, target),
        lambda: found.lambda,
        attained: found.value,
        target,
    })
}

/// How a [`ParallelCertificate`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Definition,
    Eigen,
    VectorState,
}

/// Witness data for `x ‖ y`: the unimodular `λ`, a unit vector `ξ`, the
/// attained value and its distance from the target (`‖x‖+‖y‖` for the
/// definition, `‖x‖‖y‖` for the eigen and vector-state forms).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParallelCertificate {
    #[serde(with = "serial::complex")]
    pub lambda: C64,
    #[serde(with = "serial::unit_vector")]
    pub xi: UnitVector,
    pub attained: f64,
    pub target: f64,
    pub residual: f64,
    pub kind: CertificateKind,
}

impl ParallelCertificate {
    pub fn deficit(&self) -> f64 {
        relative_deficit(self.attained, self.target)
    }
}

/// Maximum of `‖x + λy‖` over `λ ∈ 𝕋`.
pub fn circle_search_max(x: &ModuleElement, y: &ModuleElement) -> Result<CircleMax> {
    x.check_same_shape(y)?;
    Ok(matrix_circle_search(x.entries(), y.entries()))
}

fn fallback_xi(x: &ModuleElement, y: &ModuleElement) -> Result<UnitVector> {
    if !x.is_zero() {
        Ok(norm_attaining_projection(x)?.xi().clone())
    } else if !y.is_zero() {
        Ok(norm_attaining_projection(y)?.xi().clone())
    } else {
        Ok(UnitVector::basis(x.d(), 0))
    }
}

/// `x ‖ y` straight from the definition `‖x + λy‖ = ‖x‖ + ‖y‖`.
///
/// The certificate's `ξ` spans the minimal projection attaining
/// `‖x + λ*y‖`.
pub fn is_parallel_def(
    x: &ModuleElement,
    y: &ModuleElement,
    tol: f64,
) -> Result<(bool, ParallelCertificate)> {
    x.check_same_shape(y)?;
    let np = matrices_parallel(x.entries(), y.entries(), tol)?;
    let sum = x.add_scaled(y, np.lambda)?;
    let xi = if sum.is_zero() {
        fallback_xi(x, y)?
    } else {
        top_left_singular_vector(sum.entries())?.1
    };
    Ok((
        np.parallel,
        ParallelCertificate {
            lambda: np.lambda,
            xi,
            attained: np.attained,
            target: np.target,
            residual: (np.attained - np.target).abs(),
            kind: CertificateKind::Definition,
        },
    ))
}

/// `x ‖ y` via the eigenvalue criterion: `⟨x, y⟩` has an eigenvalue of
/// modulus `‖x‖‖y‖`. The spectral radius never exceeds `‖x‖‖y‖`, so this is
/// an equality test on the largest modulus.
pub fn is_parallel_eig(
    x: &ModuleElement,
    y: &ModuleElement,
    tol: f64,
) -> Result<(bool, ParallelCertificate)> {
    let t = inner_product(x, y)?;
    let target = x.norm() * y.norm();
    if x.is_zero() || y.is_zero() {
        return Ok((
            true,
            ParallelCertificate {
                lambda: one(),
                xi: fallback_xi(x, y)?,
                attained: 0.0,
                target,
                residual: target,
                kind: CertificateKind::Eigen,
            },
        ));
    }
    let top = max_modulus_eigenpair(&t)?;
    let modulus = top.pair.value.norm();
    let lambda = if modulus > 0.0 {
        top.pair.value / modulus
    } else {
        one()
    };
    Ok((
        modulus >= target - shifted(tol, target),
        ParallelCertificate {
            lambda,
            xi: top.pair.vector,
            attained: modulus,
            target,
            residual: (modulus - target).abs(),
            kind: CertificateKind::Eigen,
        },
    ))
}

/// A vector-state witness for `x ‖ y` together with the three brackets
/// that must saturate: `[⟨x,x⟩ξ,ξ] = ‖x‖²`, `[⟨y,y⟩ξ,ξ] = ‖y‖²` and
/// `|[⟨x,y⟩ξ,ξ]| = ‖x‖‖y‖`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorStateWitness {
    pub certificate: ParallelCertificate,
    pub norm_x: f64,
    pub norm_y: f64,
    pub bracket_xx: f64,
    pub bracket_yy: f64,
    #[serde(with = "serial::complex")]
    pub bracket_xy: C64,
}

impl VectorStateWitness {
    /// Largest relative violation among the saturation equalities,
    /// including `|[⟨x,y⟩ξ,ξ]| = [⟨x,x⟩ξ,ξ]^{1/2} [⟨y,y⟩ξ,ξ]^{1/2}`.
    pub fn max_relative_deviation(&self) -> f64 {
        let nxy = scale(self.norm_x * self.norm_y);
        let xy = self.bracket_xy.norm();
        [
            (xy - self.norm_x * self.norm_y).abs() / nxy,
            (self.bracket_xx - self.norm_x.powi(2)).abs() / scale(self.norm_x.powi(2)),
            (self.bracket_yy - self.norm_y.powi(2)).abs() / scale(self.norm_y.powi(2)),
            (xy - self.bracket_xx.max(0.0).sqrt() * self.bracket_yy.max(0.0).sqrt()).abs() / nxy,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Vector-state witness built from the eigenvector of `⟨x, y⟩` at its
/// maximal-modulus eigenvalue. Fails with a precondition error if the
/// eigen criterion rejects the pair.
pub fn parallel_witness(
    x: &ModuleElement,
    y: &ModuleElement,
    tol: f64,
) -> Result<VectorStateWitness> {
    let (parallel, eig_cert) = is_parallel_eig(x, y, tol)?;
    if !parallel {
        return Err(Error::Precondition(format!(
            "elements are not parallel (spectral radius deficit {:e})",
            eig_cert.target - eig_cert.attained
        )));
    }
    let xi = eig_cert.xi;
    let v = xi.as_vector();
    let bxx = bracket(&inner_product(x, x)?, v).re;
    let byy = bracket(&inner_product(y, y)?, v).re;
    let bxy = bracket(&inner_product(x, y)?, v);
    let (nx, ny) = (x.norm(), y.norm());
    let attained = bxy.norm();
    let lambda = if attained > 0.0 {
        bxy / attained
    } else {
        one()
    };
    Ok(VectorStateWitness {
        certificate: ParallelCertificate {
            lambda,
            xi,
            attained,
            target: nx * ny,
            residual: (attained - nx * ny).abs(),
            kind: CertificateKind::VectorState,
        },
        norm_x: nx,
        norm_y: ny,
        bracket_xx: bxx,
        bracket_yy: byy,
        bracket_xy: bxy,
    })
}

/// Minimum of `‖x + λy‖` over `λ ∈ ℂ` and its gap to `‖x‖`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BJCertificate {
    #[serde(with = "serial::complex")]
    pub lambda_min: C64,
    pub min_value: f64,
    pub gap: f64,
}

/// Minimizes the convex map `λ ↦ ‖x + λy‖`. Its minimizer lies in the disk
/// `|λ| ≤ 2‖x‖/‖y‖`, outside of which `‖x + λy‖ > ‖x‖`.
pub fn bj_min(x: &ModuleElement, y: &ModuleElement) -> Result<BJCertificate> {
    x.check_same_shape(y)?;
    let nx = x.norm();
    if y.is_zero() || x.is_zero() {
        return Ok(BJCertificate {
            lambda_min: C64::new(0.0, 0.0),
            min_value: nx,
            gap: 0.0,
        });
    }
    let radius = 2.0 * nx / y.norm();
    let (xe, ye) = (x.entries(), y.entries());
    let found = minimize_in_disk(|lambda| spectral_norm(&(xe + ye * lambda)), radius);
    Ok(BJCertificate {
        lambda_min: found.lambda,
        min_value: found.value,
        gap: found.value - nx,
    })
}

/// `x ⊥_B y` iff `min_λ ‖x + λy‖ ≥ ‖x‖ − tol·(‖x‖+1)`.
pub fn is_bj_orthogonal(x: &ModuleElement, y: &ModuleElement, tol: f64) -> Result<bool> {
    let cert = bj_min(x, y)?;
    Ok(cert.gap >= -shifted(tol, x.norm()))
}

/// Relation between the parallelism scalar `λ*` and the scalar used in the
/// orthogonality consequent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaConvention {
    Direct,
    Conjugate,
    Negated,
    NegatedConjugate,
}

impl LambdaConvention {
    pub const ALL: [LambdaConvention; 4] = [
        LambdaConvention::Direct,
        LambdaConvention::Conjugate,
        LambdaConvention::Negated,
        LambdaConvention::NegatedConjugate,
    ];

    pub fn apply(self, lambda: C64) -> C64 {
        match self {
            LambdaConvention::Direct => lambda,
            LambdaConvention::Conjugate => lambda.conj(),
            LambdaConvention::Negated => -lambda,
            LambdaConvention::NegatedConjugate => -lambda.conj(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConsequentOutcome {
    pub holds: bool,
    pub lambda_star: C64,
    /// First convention (in [`LambdaConvention::ALL`] order) satisfying both
    /// clauses.
    pub convention: Option<LambdaConvention>,
}

/// For `x ‖ y`, checks that for some `λ` tied to the parallelism scalar
/// both `x ⊥_B (‖y‖⟨x,x⟩x + λ‖x‖⟨y,x⟩x)` and
/// `y ⊥_B (‖x‖⟨y,y⟩y + λ‖y‖⟨y,x⟩y)` hold.
pub fn orthogonality_consequent_check(
    x: &ModuleElement,
    y: &ModuleElement,
    tol: f64,
) -> Result<ConsequentOutcome> {
    let (parallel, cert) = is_parallel_def(x, y, tol)?;
    if !parallel {
        return Err(Error::Precondition(
            "orthogonality consequent needs a parallel pair".into(),
        ));
    }
    // The circle search pins λ* only to about √ε; the eigen route is exact
    // to rounding and the consequent is sensitive to λ at first order.
    let (eig_parallel, eig_cert) = is_parallel_eig(x, y, tol)?;
    let lambda_star = if eig_parallel && !x.is_zero() && !y.is_zero() {
        eig_cert.lambda
    } else {
        cert.lambda
    };
    let (nx, ny) = (x.norm(), y.norm());
    let xx_x = x.left_mul(&inner_product(x, x)?)?;
    let yx_x = x.left_mul(&inner_product(y, x)?)?;
    let yy_y = y.left_mul(&inner_product(y, y)?)?;
    let yx_y = y.left_mul(&inner_product(y, x)?)?;
    for conv in LambdaConvention::ALL {
        let lambda = conv.apply(lambda_star);
        let zx = xx_x
            .scaled(C64::new(ny, 0.0))
            .add_scaled(&yx_x, lambda * nx)?;
        let zy = yy_y
            .scaled(C64::new(nx, 0.0))
            .add_scaled(&yx_y, lambda * ny)?;
        if orthogonal_to_consequent(x, &zx, nx * nx * ny, tol)?
            && orthogonal_to_consequent(y, &zy, ny * ny * nx, tol)?
        {
            return Ok(ConsequentOutcome {
                holds: true,
                lambda_star,
                convention: Some(conv),
            });
        }
    }
    Ok(ConsequentOutcome {
        holds: false,
        lambda_star,
        convention: None,
    })
}

/// `x ⊥_B z`, where `z` below rounding level of its terms (`scale`) counts
/// as zero.
fn orthogonal_to_consequent(
    x: &ModuleElement,
    z: &ModuleElement,
    scale: f64,
    tol: f64,
) -> Result<bool> {
    if z.norm() <= shifted(tol, scale) {
        return Ok(true);
    }
    is_bj_orthogonal(x, z, tol)
}

/// Spectral radius and norm of a square matrix.
#[derive(Debug, Clone, Copy)]
pub struct IdentityParallel {
    pub parallel: bool,
    pub radius: f64,
    pub norm: f64,
}

impl IdentityParallel {
    pub fn deficit(&self) -> f64 {
        relative_deficit(self.radius, self.norm)
    }
}

/// `t ‖ I` realized as "the spectral radius of `t` equals `‖t‖`".
pub fn identity_parallel(t: &ComplexMatrix, tol: f64) -> Result<IdentityParallel> {
    let norm = spectral_norm(t);
    let radius = spectral_radius(t)?;
    Ok(IdentityParallel {
        parallel: radius >= norm - shifted(tol, norm),
        radius,
        norm,
    })
}

pub fn matrix_parallel_identity(t: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(identity_parallel(t, tol)?.parallel)
}

/// One boolean clause of an equivalence chain with its relative deficit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub verdict: bool,
    pub deficit: f64,
}

impl Clause {
    fn new(name: impl Into<String>, verdict: bool, deficit: f64) -> Self {
        Clause {
            name: name.into(),
            verdict,
            deficit,
        }
    }
}

/// Results of the element-level chain anchored at the definition of
/// `x ‖ y`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InnerChainReport {
    pub reference: Clause,
    /// Clauses equivalent to `reference` whenever `⟨x,y⟩^k x` and
    /// `⟨y,x⟩^k y` are not both zero.
    pub clauses: Vec<Clause>,
    /// Clauses implied by `reference` but not equivalent to it: the
    /// spectral radius of `⟨x,y⟩` may equal `‖⟨x,y⟩‖` while
    /// `‖⟨x,y⟩‖ < ‖x‖‖y‖` (e.g. `⟨x,y⟩ = 0`, or any `d = 1` pair).
    pub necessary: Vec<Clause>,
    /// `|⟨x,y⟩| ‖ I`. A positive matrix always attains its norm on its
    /// spectrum, so this clause is true for every pair.
    pub abs_clause: Clause,
}

impl InnerChainReport {
    /// Equivalent clauses that differ from the reference, and necessary
    /// clauses that fail while the reference holds.
    pub fn disagreements(&self) -> Vec<&Clause> {
        let r = self.reference.verdict;
        self.clauses
            .iter()
            .filter(|c| c.verdict != r)
            .chain(self.necessary.iter().filter(|c| r && !c.verdict))
            .collect()
    }

    pub fn is_knife_edge(&self, tol: f64, margin: f64) -> bool {
        std::iter::once(&self.reference)
            .chain(&self.clauses)
            .chain(&self.necessary)
            .any(|c| in_knife_edge_band(c.deficit, tol, margin))
    }

    /// Largest deficit gap between a disagreeing clause and the reference.
    pub fn max_deviation(&self) -> f64 {
        self.disagreements()
            .iter()
            .map(|c| (c.deficit - self.reference.deficit).abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates the chain for `x ‖ y`: the equivalent clauses
/// `⟨x,y⟩^k x ‖ ⟨y,x⟩^k y` for `k = 1, 2, 3` (that is `A^k x ‖ A*^k y` with
/// `A = θ_{x,y}`), the necessary clauses `⟨x,y⟩^k ‖ I` and
/// `⟨x,y⟩ ‖ ⟨y,x⟩`, and the always-true `|⟨x,y⟩| ‖ I`.
pub fn inner_chain_report(
    x: &ModuleElement,
    y: &ModuleElement,
    tol: f64,
) -> Result<InnerChainReport> {
    let (def, cert) = is_parallel_def(x, y, tol)?;
    let reference = Clause::new("definition", def, cert.deficit());
    let t = inner_product(x, y)?;
    let t_star = t.adjoint();
    let mut clauses = Vec::new();
    let mut necessary = Vec::new();

    for k in 1..=3u32 {
        let tk = matrix_power(&t, k);
        let ip = identity_parallel(&tk, tol)?;
        necessary.push(Clause::new(
            format!("inner-power-{k}-identity"),
            ip.parallel,
            ip.deficit(),
        ));
    }
    let adj = matrices_parallel(&t, &t_star, tol)?;
    necessary.push(Clause::new("inner-adjoint", adj.parallel, adj.deficit()));
    for k in 1..=3u32 {
        let ax = x.left_mul(&matrix_power(&t, k))?;
        let ay = y.left_mul(&matrix_power(&t_star, k))?;
        let (p, c) = is_parallel_def(&ax, &ay, tol)?;
        clauses.push(Clause::new(
            format!("theta-power-{k}-action"),
            p,
            c.deficit(),
        ));
    }

    let abs = identity_parallel(&psd_sqrt(&(&t_star * &t))?, tol)?;
    Ok(InnerChainReport {
        reference,
        clauses,
        necessary,
        abs_clause: Clause::new("abs-inner-identity", abs.parallel, abs.deficit()),
    })
}

/// Comparison of parallelism with linear dependence for `m = 1`.
#[derive(Debug, Clone, Copy)]
pub struct RankOneCheck {
    pub parallel: bool,
    pub dependent: bool,
    /// `|[x, y]| = ‖x‖‖y‖` within tolerance.
    pub cauchy_schwarz_equal: bool,
    pub parallel_deficit: f64,
    pub dependence_ratio: f64,
}

impl RankOneCheck {
    pub fn agrees(&self) -> bool {
        self.parallel == self.dependent && self.parallel == self.cauchy_schwarz_equal
    }
}

/// In the column module `ℂ^d` (m = 1) parallelism is linear dependence.
/// Dependence is tested by `σ₂ ≤ tol·σ₁` on the `d×2` matrix `[x y]`.
pub fn rank_one_model_check(
    x: &ModuleElement,
    y: &ModuleElement,
    tol: f64,
) -> Result<RankOneCheck> {
    x.check_same_shape(y)?;
    if x.m() != 1 {
        return Err(Error::Shape(format!(
            "rank-one model needs m = 1, got m = {}",
            x.m()
        )));
    }
    let (parallel, cert) = is_parallel_def(x, y, tol)?;
    let d = x.d();
    let pair = ComplexMatrix::from_fn(d, 2, |r, c| {
        if c == 0 {
            x.entries()[(r, 0)]
        } else {
            y.entries()[(r, 0)]
        }
    });
    let sv = pair.svd(false, false).singular_values;
    let (s1, s2) = if sv.len() < 2 {
        (sv[0], 0.0)
    } else {
        (sv[0].max(sv[1]), sv[0].min(sv[1]))
    };
    let ratio = if s1 > 0.0 { s2 / s1 } else { 0.0 };
    let dependent = x.is_zero() || y.is_zero() || ratio <= tol;
    let (nx, ny) = (x.norm(), y.norm());
    let ip: C64 = y
        .entries()
        .iter()
        .zip(x.entries().iter())
        .map(|(b, a)| a * b.conj())
        .sum();
    let cauchy_schwarz_equal = (ip.norm() - nx * ny).abs() <= shifted(tol, nx * ny);
    Ok(RankOneCheck {
        parallel,
        dependent,
        cauchy_schwarz_equal,
        parallel_deficit: cert.deficit(),
        dependence_ratio: ratio,
    })
}
