//! Seeded instance generators. Every generator is a pure function of its
//! seed and dimensions.

use crate::error::{Error, Result};
use crate::harness::rng::{mix, SplitMix64};
use crate::modspace::{norm_attaining_projection, ModuleElement};
use crate::numkernel::{
    spectral_norm, top_singular_triplet, ComplexMatrix, ComplexVector, UnitVector, C64,
};
use crate::opspace::{op_parallel_def, AdjointableOperator};
use crate::parallelcore::{is_bj_orthogonal, is_parallel_def};

/// Tolerance at which constructed positive instances are validated.
pub const VALIDATION_TOL: f64 = 1e-9;

/// Elements with a smaller norm are regenerated.
pub const MIN_NORM: f64 = 1e-8;

const MAX_ATTEMPTS: u64 = 16;

fn check_dims(d: usize, m: usize) -> Result<()> {
    if d == 0 || m == 0 {
        return Err(Error::Config(format!(
            "dimensions must be positive, got d = {d}, m = {m}"
        )));
    }
    Ok(())
}

fn element(rng: &mut SplitMix64, d: usize, m: usize) -> ModuleElement {
    ModuleElement::new(rng.complex_matrix(d, m)).expect("Gaussian entries are finite")
}

fn unit(rng: &mut SplitMix64, n: usize) -> UnitVector {
    loop {
        let v = rng.complex_matrix(n, 1).column(0).into_owned();
        if let Ok(u) = UnitVector::normalize(v) {
            return u;
        }
    }
}

/// Haar-like unitary from the QR factorization of a Gaussian matrix.
fn unitary(rng: &mut SplitMix64, n: usize) -> ComplexMatrix {
    rng.complex_matrix(n, n).qr().q()
}

/// `μ` uniform by area in the annulus `0.5 ≤ |μ| ≤ 2`.
fn annulus(rng: &mut SplitMix64) -> C64 {
    let r = (0.25 + rng.uniform() * (4.0 - 0.25)).sqrt();
    C64::from_polar(r, std::f64::consts::TAU * rng.uniform())
}

/// Runs `build` on successive attempt seeds until it produces a value.
fn retry<T>(seed: u64, mut build: impl FnMut(&mut SplitMix64) -> Result<Option<T>>) -> Result<T> {
    let mut s = seed;
    for _ in 0..MAX_ATTEMPTS {
        if let Some(v) = build(&mut SplitMix64::new(s))? {
            return Ok(v);
        }
        s = mix(s);
    }
    Err(Error::Degenerate("generator exhausted its attempts"))
}

/// `d×m` element with i.i.d. standard complex Gaussian entries.
pub fn gen_element(seed: u64, d: usize, m: usize) -> Result<ModuleElement> {
    check_dims(d, m)?;
    Ok(element(&mut SplitMix64::new(seed), d, m))
}

/// Random pair with independent Gaussian entries.
pub fn gen_random_pair(seed: u64, d: usize, m: usize) -> Result<(ModuleElement, ModuleElement)> {
    check_dims(d, m)?;
    let mut rng = SplitMix64::new(seed);
    let x = element(&mut rng, d, m);
    let y = element(&mut rng, d, m);
    Ok((x, y))
}

/// `(x, μ e x)` with `e` the norm-attaining projection of `x`; validated
/// against the definition at [`VALIDATION_TOL`].
pub fn gen_parallel_pair(seed: u64, d: usize, m: usize) -> Result<(ModuleElement, ModuleElement)> {
    check_dims(d, m)?;
    retry(seed, |rng| {
        let x = element(rng, d, m);
        if x.norm() < MIN_NORM {
            return Ok(None);
        }
        let mu = annulus(rng);
        let y = norm_attaining_projection(&x)?.apply(&x)?.scaled(mu);
        Ok(is_parallel_def(&x, &y, VALIDATION_TOL)?.0.then_some((x, y)))
    })
}

/// `x` on the first `⌈d/2⌉` rows and `y` on the rest; for `m ≥ 2` the
/// columns are split the same way, which makes `⟨x, y⟩ = 0` exactly. With
/// row blocks alone, `‖x + λy‖ ≥ ‖x‖` already holds because `x` is a
/// compression of `x + λy`.
pub fn gen_bj_pair(seed: u64, d: usize, m: usize) -> Result<(ModuleElement, ModuleElement)> {
    check_dims(d, m)?;
    if d < 2 {
        return Err(Error::Config("disjoint-support pairs need d ≥ 2".into()));
    }
    let split = d.div_ceil(2);
    let col_split = if m >= 2 { m.div_ceil(2) } else { m };
    retry(seed, |rng| {
        let mut a = rng.complex_matrix(d, m);
        let mut b = rng.complex_matrix(d, m);
        for r in 0..d {
            for c in 0..m {
                if !(r < split && c < col_split) {
                    a[(r, c)] = C64::new(0.0, 0.0);
                }
                if r < split || (m >= 2 && c < col_split) {
                    b[(r, c)] = C64::new(0.0, 0.0);
                }
            }
        }
        let (x, y) = (ModuleElement::new(a)?, ModuleElement::new(b)?);
        Ok(is_bj_orthogonal(&x, &y, VALIDATION_TOL)?.then_some((x, y)))
    })
}

/// Operator with an `m×m` Gaussian right-action matrix.
pub fn gen_operator(seed: u64, d: usize, m: usize) -> Result<AdjointableOperator> {
    check_dims(d, m)?;
    AdjointableOperator::new(d, SplitMix64::new(seed).complex_matrix(m, m))
}

/// `(T, S)` with `A_S = μ u w* + P`: `u`, `w` the top singular pair of
/// `A_T`, `P` random on the orthogonal complements with `‖P‖ = |μ|/2`.
/// Validated against the definition at [`VALIDATION_TOL`].
pub fn gen_parallel_operators(
    seed: u64,
    d: usize,
    m: usize,
) -> Result<(AdjointableOperator, AdjointableOperator)> {
    check_dims(d, m)?;
    retry(seed, |rng| {
        let a = rng.complex_matrix(m, m);
        if spectral_norm(&a) < MIN_NORM {
            return Ok(None);
        }
        let (_, u, w) = top_singular_triplet(&a)?;
        let mu = annulus(rng);
        let (u, w) = (u.as_vector(), w.as_vector());
        let pu = ComplexMatrix::identity(m, m) - u * u.adjoint();
        let pw = ComplexMatrix::identity(m, m) - w * w.adjoint();
        let mut p = &pu * rng.complex_matrix(m, m) * &pw;
        let np = spectral_norm(&p);
        if np > 0.0 {
            p *= C64::new(0.5 * mu.norm() / np, 0.0);
        }
        let b = u * w.adjoint() * mu + p;
        let t = AdjointableOperator::new(d, a)?;
        let s = AdjointableOperator::new(d, b)?;
        Ok(op_parallel_def(&t, &s, VALIDATION_TOL)?.0.then_some((t, s)))
    })
}

/// Operator with Hermitian right-action matrix `(G + G*)/2`.
pub fn gen_hermitian_operator(seed: u64, d: usize, m: usize) -> Result<AdjointableOperator> {
    check_dims(d, m)?;
    let g = SplitMix64::new(seed).complex_matrix(m, m);
    AdjointableOperator::new(d, (&g + g.adjoint()) * C64::new(0.5, 0.0))
}

/// Nonzero nilpotent right-action matrix `U N U*`, `N` strictly upper
/// triangular. Needs `m ≥ 2`.
pub fn gen_nilpotent_operator(seed: u64, d: usize, m: usize) -> Result<AdjointableOperator> {
    check_dims(d, m)?;
    if m < 2 {
        return Err(Error::Config(
            "nonzero nilpotent matrices need m ≥ 2".into(),
        ));
    }
    let mut rng = SplitMix64::new(seed);
    let mut n = rng.complex_matrix(m, m);
    for r in 0..m {
        for c in 0..=r {
            n[(r, c)] = C64::new(0.0, 0.0);
        }
    }
    let u = unitary(&mut rng, m);
    AdjointableOperator::new(d, &u * n * u.adjoint())
}

/// `(x, y)` where `y` shares `x`'s top right singular vector `w` and attains
/// its norm there: `y = s a w* + (I − aa*) Y (I − ww*)` with the second term
/// of norm `s/2`. Then `θ_{x,x} ‖ θ_{y,y}`.
pub fn gen_theta_positive_pair(
    seed: u64,
    d: usize,
    m: usize,
) -> Result<(ModuleElement, ModuleElement)> {
    check_dims(d, m)?;
    retry(seed, |rng| {
        let x = element(rng, d, m);
        if x.norm() < MIN_NORM {
            return Ok(None);
        }
        let (_, _, w) = top_singular_triplet(x.entries())?;
        let a = unit(rng, d);
        let s = 0.5 + 1.5 * rng.uniform();
        let (a, w) = (a.as_vector(), w.as_vector());
        let pa = ComplexMatrix::identity(d, d) - a * a.adjoint();
        let pw = ComplexMatrix::identity(m, m) - w * w.adjoint();
        let g = rng.complex_matrix(d, m);
        let mut rest = &pa * &g * &pw;
        let nr = spectral_norm(&rest);
        // the complement is empty when d = 1 or m = 1; don't blow up rounding noise
        if nr > 1e-6 * spectral_norm(&g) {
            rest *= C64::new(0.5 * s / nr, 0.0);
        } else {
            rest.fill(C64::new(0.0, 0.0));
        }
        let y = ModuleElement::new(a * w.adjoint() * C64::new(s, 0.0) + rest)?;
        Ok(Some((x, y)))
    })
}

/// `x = [I_d | 0]` and `y = [N | B]` with `N = U D U*` normal, so
/// `⟨x, y⟩ = N*` is normal. `B = 0` when `positive`, Gaussian otherwise
/// (which needs `m > d`). Needs `m ≥ d`.
pub fn gen_normal_instance(
    seed: u64,
    d: usize,
    m: usize,
    positive: bool,
) -> Result<(ModuleElement, ModuleElement)> {
    check_dims(d, m)?;
    if m < d || (!positive && m == d) {
        return Err(Error::Config(format!(
            "normal instances need m ≥ d (m > d for negatives), got d = {d}, m = {m}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let u = unitary(&mut rng, d);
    let diag = ComplexVector::from_fn(d, |_, _| rng.complex_gaussian());
    let n = &u * ComplexMatrix::from_diagonal(&diag) * u.adjoint();
    let b = if positive {
        ComplexMatrix::zeros(d, m - d)
    } else {
        rng.complex_matrix(d, m - d)
    };
    let x = ModuleElement::new(ComplexMatrix::from_fn(d, m, |r, c| {
        if r == c {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))?;
    let y = ModuleElement::new(ComplexMatrix::from_fn(d, m, |r, c| {
        if c < d {
            n[(r, c)]
        } else {
            b[(r, c - d)]
        }
    }))?;
    Ok((x, y))
}
