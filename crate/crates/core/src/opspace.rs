//! Adjointable operators on `E = M_{d×m}(ℂ)`.
//!
//! Every adjointable operator on `E` is right multiplication `x ↦ xA` by an
//! `m×m` matrix. Sketch: `T` is `M_d`-linear, so it commutes with the left
//! action of `M_d`; writing `x = Σ e_i e_iᵀ x` and using `T(e_i e_1ᵀ x') =
//! e_i e_1ᵀ T(x')` shows `T` is determined by its action on rows, and that
//! action is one linear map `ℂ^m → ℂ^m` shared by all rows. The adjoint of
//! `x ↦ xA` is `x ↦ xA*`; [`AdjointableOperator::adjoint`] is checked
//! against `⟨Tx, y⟩ = ⟨x, T*y⟩` in the tests.
//!
//! Composition: `compose(T, S)` is "apply `S`, then `T`" and has matrix
//! `A_S · A_T`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modspace::{
    inner_product, make_basic, shifted, theta_matrix, BasicVector, ModuleElement,
};
use crate::numkernel::{
    bracket, check_matrix, frobenius, general_eig, scale, spectral_norm, top_left_singular_vector,
    ComplexMatrix, UnitVector, C64,
};
use crate::parallelcore::{
    identity_parallel, is_parallel_def, is_parallel_eig, matrices_parallel, relative_deficit,
    Clause,
};
use crate::serial;

/// Right multiplication by `a` on `M_{d×m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointableOperator {
    d: usize,
    a: ComplexMatrix,
}

impl AdjointableOperator {
    pub fn new(d: usize, a: ComplexMatrix) -> Result<Self> {
        check_matrix(&a)?;
        if !a.is_square() {
            return Err(Error::Shape(format!(
                "right-action matrix must be square, got {}×{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if d == 0 || a.nrows() == 0 {
            return Err(Error::Shape("operator dimensions must be positive".into()));
        }
        Ok(AdjointableOperator { d, a })
    }

    pub fn identity(d: usize, m: usize) -> Self {
        AdjointableOperator {
            d,
            a: ComplexMatrix::identity(m, m),
        }
    }

    /// `θ_{x,y}: z ↦ ⟨z, y⟩ x`.
    pub fn theta(x: &ModuleElement, y: &ModuleElement) -> Result<Self> {
        AdjointableOperator::new(x.d(), theta_matrix(x, y)?)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn adjoint(&self) -> Self {
        AdjointableOperator {
            d: self.d,
            a: self.a.adjoint(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &AdjointableOperator) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(AdjointableOperator {
            d: self.d,
            a: &other.a * &self.a,
        })
    }

    pub fn scaled(&self, c: C64) -> Self {
        AdjointableOperator {
            d: self.d,
            a: &self.a * c,
        }
    }

    pub fn check_same_shape(&self, other: &AdjointableOperator) -> Result<()> {
        if self.d != other.d || self.m() != other.m() {
            return Err(Error::Shape(format!(
                "operators on {}×{} and {}×{} modules",
                self.d,
                self.m(),
                other.d,
                other.m()
            )));
        }
        Ok(())
    }

    fn check_element(&self, x: &ModuleElement) -> Result<()> {
        if x.d() != self.d || x.m() != self.m() {
            return Err(Error::Shape(format!(
                "operator on {}×{} module applied to a {}×{} element",
                self.d,
                self.m(),
                x.d(),
                x.m()
            )));
        }
        Ok(())
    }
}

pub fn op_apply(t: &AdjointableOperator, x: &ModuleElement) -> Result<ModuleElement> {
    t.check_element(x)?;
    ModuleElement::new(x.entries() * &t.a)
}

/// `‖T‖ = ‖A‖`, the supremum of `‖Tx‖` over basic vectors.
pub fn op_norm(t: &AdjointableOperator) -> f64 {
    spectral_norm(&t.a)
}

/// Basic vector `e₁ v*` with `v` a top left singular vector of `A`, so that
/// `‖T(e₁ v*)‖ = ‖v* A‖ = ‖T‖`.
pub fn op_norm_witness(t: &AdjointableOperator) -> Result<BasicVector> {
    if op_norm(t) <= crate::numkernel::ABS_FLOOR {
        return Err(Error::Degenerate("zero operator has no norm witness"));
    }
    let (_, v) = top_left_singular_vector(&t.a)?;
    make_basic(&UnitVector::basis(t.d, 0), &v)
}

/// `T ‖ S` by circle search on `λ ↦ ‖A_T + λA_S‖`. Returns the verdict and
/// the maximizing `λ`.
pub fn op_parallel_def(
    t: &AdjointableOperator,
    s: &AdjointableOperator,
    tol: f64,
) -> Result<(bool, C64)> {
    let np = op_parallel_search(t, s, tol)?;
    Ok((np.parallel, np.lambda))
}

fn op_parallel_search(
    t: &AdjointableOperator,
    s: &AdjointableOperator,
    tol: f64,
) -> Result<crate::parallelcore::NormParallel> {
    t.check_same_shape(s)?;
    matrices_parallel(&t.a, &s.a, tol)
}

/// Single basic-vector witness for `T ‖ S`.
#[derive(Debug, Clone)]
pub struct OperatorParallelCertificate {
    pub lambda: C64,
    pub basic: BasicVector,
    /// `[⟨Tx, Sx⟩ξ, ξ]`.
    pub bracket_value: C64,
    /// Largest absolute violation among `|bracket| = ‖T‖‖S‖`,
    /// `‖Tx‖ = ‖T‖` and `‖Sx‖ = ‖S‖`.
    pub residual: f64,
    pub norm_t: f64,
    pub norm_s: f64,
    pub norm_tx: f64,
    pub norm_sx: f64,
    /// `Tx ‖ Sx` by definition.
    pub images_parallel: bool,
}

impl OperatorParallelCertificate {
    /// Residual relative to `‖T‖‖S‖ + ‖T‖ + ‖S‖ + 1`.
    pub fn relative_residual(&self) -> f64 {
        self.residual / (self.norm_t * self.norm_s + self.norm_t + self.norm_s + 1.0)
    }

    /// The bracket recomputed from the basic vector through module inner
    /// products, independently of the search.
    pub fn recompute_bracket(
        &self,
        t: &AdjointableOperator,
        s: &AdjointableOperator,
    ) -> Result<C64> {
        let x = self.basic.element();
        let tx = op_apply(t, x)?;
        let sx = op_apply(s, x)?;
        Ok(bracket(
            &inner_product(&tx, &sx)?,
            self.basic.xi().as_vector(),
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateRepr {
    #[serde(with = "serial::complex")]
    lambda: C64,
    #[serde(with = "serial::unit_vector")]
    xi: UnitVector,
    basic: Vec<Vec<[f64; 2]>>,
    #[serde(with = "serial::complex")]
    bracket_value: C64,
    residual: f64,
    norm_t: f64,
    norm_s: f64,
    norm_tx: f64,
    norm_sx: f64,
    images_parallel: bool,
}

impl Serialize for OperatorParallelCertificate {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateRepr {
            lambda: self.lambda,
            xi: self.basic.xi().clone(),
            basic: serial::matrix_rows(self.basic.element().entries()),
            bracket_value: self.bracket_value,
            residual: self.residual,
            norm_t: self.norm_t,
            norm_s: self.norm_s,
            norm_tx: self.norm_tx,
            norm_sx: self.norm_sx,
            images_parallel: self.images_parallel,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for OperatorParallelCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = CertificateRepr::deserialize(de)?;
        let d = r.basic.len();
        let m = r.basic.first().map_or(0, Vec::len);
        let entries =
            serial::matrix_from_rows("basic", &r.basic, d, m).map_err(D::Error::custom)?;
        let element = ModuleElement::new(entries).map_err(D::Error::custom)?;
        let basic = BasicVector::new(element, r.xi).map_err(D::Error::custom)?;
        Ok(OperatorParallelCertificate {
            lambda: r.lambda,
            basic,
            bracket_value: r.bracket_value,
            residual: r.residual,
            norm_t: r.norm_t,
            norm_s: r.norm_s,
            norm_tx: r.norm_tx,
            norm_sx: r.norm_sx,
            images_parallel: r.images_parallel,
        })
    }
}

/// Witness for `T ‖ S` from a single basic vector `x = e₁ v*`, with `v` a
/// top left singular vector of `A_T + λ*A_S`. Then
/// `[⟨Tx, Sx⟩ξ, ξ] = v* A_T A_S* v = λ‖T‖‖S‖`.
pub fn op_parallel_witness(
    t: &AdjointableOperator,
    s: &AdjointableOperator,
    tol: f64,
) -> Result<OperatorParallelCertificate> {
    let np = op_parallel_search(t, s, tol)?;
    if !np.parallel {
        return Err(Error::Precondition(format!(
            "operators are not parallel (relative deficit {:e})",
            np.deficit()
        )));
    }
    let xi = UnitVector::basis(t.d, 0);
    let sum = &t.a + &s.a * np.lambda;
    let v = if spectral_norm(&sum) <= crate::numkernel::ABS_FLOOR {
        if op_norm(t) > crate::numkernel::ABS_FLOOR {
            top_left_singular_vector(&t.a)?.1
        } else if op_norm(s) > crate::numkernel::ABS_FLOOR {
            top_left_singular_vector(&s.a)?.1
        } else {
            UnitVector::basis(t.m(), 0)
        }
    } else {
        top_left_singular_vector(&sum)?.1
    };
    operator_certificate(t, s, &xi, &v, np.lambda, tol)
}

fn operator_certificate(
    t: &AdjointableOperator,
    s: &AdjointableOperator,
    xi: &UnitVector,
    v: &UnitVector,
    fallback_lambda: C64,
    tol: f64,
) -> Result<OperatorParallelCertificate> {
    let basic = make_basic(xi, v)?;
    let x = basic.element();
    let tx = op_apply(t, x)?;
    let sx = op_apply(s, x)?;
    let value = bracket(&inner_product(&tx, &sx)?, xi.as_vector());
    let (nt, ns) = (op_norm(t), op_norm(s));
    let (ntx, nsx) = (tx.norm(), sx.norm());
    // The search pins λ only to about √ε; the bracket phase is exact.
    let lambda = if value.norm() > 0.0 {
        value / value.norm()
    } else {
        fallback_lambda
    };
    let residual = (value.norm() - nt * ns)
        .abs()
        .max((ntx - nt).abs())
        .max((nsx - ns).abs());
    let (images_parallel, _) = is_parallel_def(&tx, &sx, tol)?;
    Ok(OperatorParallelCertificate {
        lambda,
        basic,
        bracket_value: value,
        residual,
        norm_t: nt,
        norm_s: ns,
        norm_tx: ntx,
        norm_sx: nsx,
        images_parallel,
    })
}

/// `T*T ‖ T*S` and `‖T*S‖ = ‖T‖‖S‖`.
pub fn op_parallel_tstar(
    t: &AdjointableOperator,
    s: &AdjointableOperator,
    tol: f64,
) -> Result<bool> {
    Ok(op_parallel_tstar_detail(t, s, tol)?.0)
}

/// Verdict of [`op_parallel_tstar`] with the smaller relative deficit of
/// its two conditions' margins (the decision quantity).
pub fn op_parallel_tstar_detail(
    t: &AdjointableOperator,
    s: &AdjointableOperator,
    tol: f64,
) -> Result<(bool, f64)> {
    t.check_same_shape(s)?;
    let t_star = t.adjoint();
    let tt = t_star.compose(t)?;
    let ts = t_star.compose(s)?;
    let np = matrices_parallel(&tt.a, &ts.a, tol)?;
    let (nt, ns) = (op_norm(t), op_norm(s));
    let target = nt * ns;
    let norm_ts = op_norm(&ts);
    let norm_ok = norm_ts >= target - shifted(tol, target);
    let deficit = np.deficit().max(relative_deficit(norm_ts, target));
    Ok((np.parallel && norm_ok, deficit))
}

/// Result of deciding `T ‖ I`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityWitness {
    pub parallel: bool,
    pub spectral_radius: f64,
    pub norm: f64,
    /// Phases `μ/|μ|` of every eigenvalue attaining the spectral radius,
    /// sorted by argument in `[0, 2π)`.
    #[serde(with = "serial::complex_vec")]
    pub phases: Vec<C64>,
    #[serde(with = "serial::complex")]
    pub lambda: C64,
    /// `‖Tx − λ‖T‖x‖` at `x = e₁ w*`, `w` a left eigenvector for the first
    /// phase.
    pub residual: f64,
    #[serde(with = "serial::unit_vector")]
    pub left_eigenvector: UnitVector,
    /// `T ‖ T*` by definition.
    pub adjoint_parallel: bool,
    pub deficit: f64,
}

/// Decides `T ‖ I` through the spectral radius and builds the basic-vector
/// residual from a left eigenvector `w* A = μ w*` (an eigenvector of `A*`
/// for `μ̄`).
pub fn identity_parallel_op(t: &AdjointableOperator, tol: f64) -> Result<IdentityWitness> {
    let ip = identity_parallel(&t.a, tol)?;
    let norm = ip.norm;
    let mut pairs = general_eig(&t.a.adjoint())?;
    for p in &mut pairs {
        p.value = p.value.conj();
    }
    let rho = pairs.iter().fold(0.0f64, |m, p| m.max(p.value.norm()));
    let band = shifted(tol, rho);
    let mut attaining: Vec<_> = pairs
        .into_iter()
        .filter(|p| p.value.norm() >= rho - band)
        .collect();
    let arg = |z: C64| z.arg().rem_euclid(std::f64::consts::TAU);
    attaining.sort_by(|p, q| {
        arg(p.value)
            .total_cmp(&arg(q.value))
            .then(q.value.norm().total_cmp(&p.value.norm()))
    });
    let phase = |z: C64| {
        if z.norm() > 0.0 {
            z / z.norm()
        } else {
            C64::new(1.0, 0.0)
        }
    };
    let phases: Vec<C64> = attaining.iter().map(|p| phase(p.value)).collect();
    let first = attaining.into_iter().next().ok_or(Error::NoConvergence)?;
    let lambda = phase(first.value);
    let w = first.vector;
    let basic = make_basic(&UnitVector::basis(t.d, 0), &w)?;
    let x = basic.element();
    let tx = op_apply(t, x)?;
    let residual = frobenius(&(tx.entries() - x.entries() * (lambda * norm)));
    let adjoint_parallel = matrices_parallel(&t.a, &t.a.adjoint(), tol)?.parallel;
    Ok(IdentityWitness {
        parallel: ip.parallel,
        spectral_radius: ip.radius,
        norm,
        phases,
        lambda,
        residual,
        left_eigenvector: w,
        adjoint_parallel,
        deficit: ip.deficit(),
    })
}

/// `θ_{x,y} ‖ θ_{z,u}` with its single-witness bracket.
#[derive(Debug, Clone)]
pub struct ThetaPairOutcome {
    pub parallel: bool,
    pub deficit: f64,
    pub certificate: Option<OperatorParallelCertificate>,
    /// `[⟨x₀, y⟩⟨x, z⟩⟨u, x₀⟩ξ, ξ]` at the witness `x₀`, computed from
    /// module inner products.
    pub inner_form: Option<C64>,
}

pub fn theta_pair_parallel(
    x: &ModuleElement,
    y: &ModuleElement,
    z: &ModuleElement,
    u: &ModuleElement,
    tol: f64,
) -> Result<ThetaPairOutcome> {
    x.check_same_shape(z)?;
    let t = AdjointableOperator::theta(x, y)?;
    let s = AdjointableOperator::theta(z, u)?;
    let np = op_parallel_search(&t, &s, tol)?;
    if !np.parallel {
        return Ok(ThetaPairOutcome {
            parallel: false,
            deficit: np.deficit(),
            certificate: None,
            inner_form: None,
        });
    }
    let cert = op_parallel_witness(&t, &s, tol)?;
    let x0 = cert.basic.element();
    let chain = inner_product(x0, y)? * inner_product(x, z)? * inner_product(u, x0)?;
    let inner_form = bracket(&chain, cert.basic.xi().as_vector());
    Ok(ThetaPairOutcome {
        parallel: true,
        deficit: np.deficit(),
        certificate: Some(cert),
        inner_form: Some(inner_form),
    })
}

/// Four-way comparison for `θ_{x,x} ‖ θ_{y,y}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaDiagReport {
    /// `θ_{x,x} ‖ θ_{y,y}` by circle search.
    pub theta_parallel: Clause,
    /// `‖θ_{x,x} + θ_{y,y}‖ = ‖θ_{x,x}‖ + ‖θ_{y,y}‖`.
    pub plus_additive: Clause,
    /// `‖⟨x,y⟩‖ = ‖x‖‖y‖`.
    pub inner_norm: Clause,
    /// `|[⟨v,x⟩⟨x,y⟩⟨y,v⟩ξ,ξ]| = ‖x‖²‖y‖²` at a basic vector `v`.
    pub witness: Clause,
}

impl ThetaDiagReport {
    pub fn clauses(&self) -> [&Clause; 4] {
        [
            &self.theta_parallel,
            &self.plus_additive,
            &self.inner_norm,
            &self.witness,
        ]
    }

    pub fn agree(&self) -> bool {
        let v = self.theta_parallel.verdict;
        self.clauses().iter().all(|c| c.verdict == v)
    }

    pub fn max_deficit_gap(&self) -> f64 {
        spread(&self.clauses())
    }
}

fn spread(clauses: &[&Clause]) -> f64 {
    let lo = clauses
        .iter()
        .map(|c| c.deficit)
        .fold(f64::INFINITY, f64::min);
    let hi = clauses
        .iter()
        .map(|c| c.deficit)
        .fold(f64::NEG_INFINITY, f64::max);
    (hi - lo).max(0.0)
}

fn clause_at(name: &str, attained: f64, target: f64, tol: f64) -> Clause {
    let deficit = relative_deficit(attained, target);
    Clause {
        name: name.into(),
        verdict: deficit <= tol,
        deficit,
    }
}

pub fn theta_diag_suite(x: &ModuleElement, y: &ModuleElement, tol: f64) -> Result<ThetaDiagReport> {
    x.check_same_shape(y)?;
    let p = theta_matrix(x, x)?;
    let q = theta_matrix(y, y)?;
    let np = matrices_parallel(&p, &q, tol)?;
    let theta_parallel = Clause {
        name: "theta-parallel".into(),
        verdict: np.parallel,
        deficit: np.deficit(),
    };
    let (np_, nq) = (spectral_norm(&p), spectral_norm(&q));
    let plus_additive = clause_at("plus-additive", spectral_norm(&(&p + &q)), np_ + nq, tol);
    let (nx, ny) = (x.norm(), y.norm());
    let inner_norm = clause_at(
        "inner-norm",
        spectral_norm(&inner_product(x, y)?),
        nx * ny,
        tol,
    );

    let sum = &p + &q * np.lambda;
    let target = nx * nx * ny * ny;
    let witness_value = if spectral_norm(&sum) <= crate::numkernel::ABS_FLOOR {
        0.0
    } else {
        let (_, v) = top_left_singular_vector(&sum)?;
        let xi = UnitVector::basis(x.d(), 0);
        let w = make_basic(&xi, &v)?;
        let w = w.element();
        let chain = inner_product(w, x)? * inner_product(x, y)? * inner_product(y, w)?;
        bracket(&chain, xi.as_vector()).norm()
    };
    let witness = if x.is_zero() || y.is_zero() {
        clause_at("witness", 0.0, 0.0, tol)
    } else {
        clause_at("witness", witness_value, target, tol)
    };
    Ok(ThetaDiagReport {
        theta_parallel,
        plus_additive,
        inner_norm,
        witness,
    })
}

/// Tolerance on `‖NN* − N*N‖ / ‖N‖²` for the normal-inner-product suite.
pub const NORMAL_TOL: f64 = 1e-10;

/// Equivalences when `⟨x, y⟩` is normal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalCaseReport {
    pub parallel: Clause,
    pub inner_norm: Clause,
    pub theta_parallel: Clause,
    /// `|[⟨x,y⟩ξ,ξ]| = ‖x‖‖y‖` at the eigenvector `ξ`.
    pub witness: Clause,
}

impl NormalCaseReport {
    pub fn clauses(&self) -> [&Clause; 4] {
        [
            &self.parallel,
            &self.inner_norm,
            &self.theta_parallel,
            &self.witness,
        ]
    }

    pub fn agree(&self) -> bool {
        let v = self.parallel.verdict;
        self.clauses().iter().all(|c| c.verdict == v)
    }

    pub fn max_deficit_gap(&self) -> f64 {
        spread(&self.clauses())
    }
}

/// `‖NN* − N*N‖` relative to `‖N‖²`.
pub fn normality_defect(n: &ComplexMatrix) -> f64 {
    let norm = spectral_norm(n);
    if norm == 0.0 {
        return 0.0;
    }
    spectral_norm(&(n * n.adjoint() - n.adjoint() * n)) / (norm * norm)
}

pub fn normal_case_suite(
    x: &ModuleElement,
    y: &ModuleElement,
    tol: f64,
) -> Result<NormalCaseReport> {
    let n = inner_product(x, y)?;
    let defect = normality_defect(&n);
    if defect > NORMAL_TOL {
        return Err(Error::Precondition(format!(
            "inner product is not normal (defect {defect:e})"
        )));
    }
    let (def, cert) = is_parallel_def(x, y, tol)?;
    let (nx, ny) = (x.norm(), y.norm());
    let inner_norm = clause_at("inner-norm", spectral_norm(&n), nx * ny, tol);
    let np = matrices_parallel(&theta_matrix(x, x)?, &theta_matrix(y, y)?, tol)?;
    let (_, eig) = is_parallel_eig(x, y, tol)?;
    let state = bracket(&n, eig.xi.as_vector()).norm();
    Ok(NormalCaseReport {
        parallel: Clause {
            name: "definition".into(),
            verdict: def,
            deficit: cert.deficit(),
        },
        inner_norm,
        theta_parallel: Clause {
            name: "theta-parallel".into(),
            verdict: np.parallel,
            deficit: np.deficit(),
        },
        witness: clause_at("witness", state, nx * ny, tol),
    })
}

/// For `m = d` (the algebra over itself): the deviation of `θ_{t,s}` from
/// right multiplication by `s*t`, and of `θ_{s,t}` from right
/// multiplication by `t*s`, applied to `z`.
pub fn self_module_theta_deviation(
    t: &ModuleElement,
    s: &ModuleElement,
    z: &ModuleElement,
) -> Result<(f64, f64)> {
    if t.d() != t.m() {
        return Err(Error::Shape(format!(
            "the algebra over itself needs m = d, got {}×{}",
            t.d(),
            t.m()
        )));
    }
    let (te, se) = (t.entries(), s.entries());
    let r_st = AdjointableOperator::new(t.d(), se.adjoint() * te)?;
    let r_ts = AdjointableOperator::new(t.d(), te.adjoint() * se)?;
    let theta_ts = t.left_mul(&inner_product(z, s)?)?;
    let theta_st = s.left_mul(&inner_product(z, t)?)?;
    let dev = |a: &ModuleElement, b: &ModuleElement| {
        frobenius(&(a.entries() - b.entries())) / scale(frobenius(a.entries()))
    };
    Ok((
        dev(&theta_ts, &op_apply(&r_st, z)?),
        dev(&theta_st, &op_apply(&r_ts, z)?),
    ))
}
