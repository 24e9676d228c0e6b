//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Oracles here are computed with plain nalgebra calls (Hermitian
//! eigenvalues of Gram matrices, direct products), not through the
//! library's search routines.

use std::process::{Command, ExitCode};
use std::time::Instant;

use kmod::harness::{
    gen_element, gen_hermitian_operator, gen_nilpotent_operator, gen_normal_instance, gen_operator,
    gen_parallel_operators, gen_parallel_pair, gen_random_pair, gen_theta_positive_pair,
    SplitMix64,
};
use kmod::modspace::{make_basic, ModuleElement};
use kmod::numkernel::{ComplexMatrix, ComplexVector, UnitVector, C64};
use kmod::opspace::{
    identity_parallel_op, normal_case_suite, op_apply, op_norm_witness, op_parallel_def,
    op_parallel_tstar_detail, op_parallel_witness, theta_diag_suite,
};
use kmod::parallelcore::{
    in_knife_edge_band, is_parallel_def, is_parallel_eig, matrices_parallel, parallel_witness,
};

const TOL: f64 = 1e-8;
const MARGIN: f64 = 1e-6;

fn edge(deficit: f64) -> bool {
    in_knife_edge_band(deficit, TOL, MARGIN)
}

/// Spectral norm as the square root of the top eigenvalue of `a a*`.
fn gram_norm(a: &ComplexMatrix) -> f64 {
    let g = a * a.adjoint();
    g.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, &v| m.max(v))
        .max(0.0)
        .sqrt()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn state(a: &ComplexMatrix, xi: &ComplexVector) -> C64 {
    (xi.adjoint() * a * xi)[(0, 0)]
}

struct Line {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: String) -> Line {
    Line { ok, detail }
}

fn criterion_1() -> Line {
    let dims: Vec<(usize, usize)> = [2, 3, 4]
        .iter()
        .flat_map(|&d| [1, 2, 4, 6].map(move |m| (d, m)))
        .collect();
    let mut disagreements = 0;
    let mut skipped = 0;
    for i in 0..500u64 {
        let (d, m) = dims[i as usize % dims.len()];
        let (x, y) = gen_random_pair(1_000 + i, d, m).unwrap();
        let (p, c) = is_parallel_def(&x, &y, TOL).unwrap();
        let (q, e) = is_parallel_eig(&x, &y, TOL).unwrap();
        if edge(c.deficit()) || edge(e.deficit()) {
            skipped += 1;
        } else if p != q {
            disagreements += 1;
        }
    }
    let mut constructed_fail = 0;
    let mut worst = 0.0f64;
    for i in 0..200u64 {
        let (d, m) = dims[i as usize % dims.len()];
        let (x, y) = gen_parallel_pair(5_000 + i, d, m).unwrap();
        let def = is_parallel_def(&x, &y, TOL).unwrap().0;
        let eig = is_parallel_eig(&x, &y, TOL).unwrap().0;
        let w = parallel_witness(&x, &y, TOL).unwrap();
        let xi = w.certificate.xi.as_vector();
        let (xe, ye) = (x.entries(), y.entries());
        let (nx, ny) = (gram_norm(xe), gram_norm(ye));
        let bxx = state(&(xe * xe.adjoint()), xi).re;
        let byy = state(&(ye * ye.adjoint()), xi).re;
        let bxy = state(&(xe * ye.adjoint()), xi).norm();
        let dev = rel(bxx, nx * nx)
            .max(rel(byy, ny * ny))
            .max(rel(bxy, nx * ny));
        worst = worst.max(dev);
        if !(def && eig && dev <= 1e-8) {
            constructed_fail += 1;
        }
    }
    check(
        disagreements == 0 && constructed_fail == 0,
        format!(
            "500 random pairs: {disagreements} disagreements, {skipped} knife-edge; \
             200 constructed: {constructed_fail} failures, max bracket deviation {worst:.2e}"
        ),
    )
}

fn random_unit(rng: &mut SplitMix64, n: usize) -> UnitVector {
    UnitVector::normalize(rng.complex_matrix(n, 1).column(0).into_owned()).unwrap()
}

fn criterion_2() -> Line {
    let mut worst_attain = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut fails = 0;
    for i in 0..200u64 {
        let d = 1 + (i as usize % 4);
        let m = 1 + (i as usize % 8);
        let t = gen_operator(10_000 + i, d, m).unwrap();
        let a = t.matrix();
        let norm = gram_norm(&a.adjoint());
        let w = op_norm_witness(&t).unwrap();
        let attained = gram_norm(&(w.element().entries() * a));
        let dev = rel(attained, norm);
        worst_attain = worst_attain.max(dev);
        let mut ok = dev <= 1e-10;
        let mut rng = SplitMix64::new(20_000 + i);
        for _ in 0..100 {
            let b = make_basic(&random_unit(&mut rng, d), &random_unit(&mut rng, m)).unwrap();
            let v = gram_norm(&(b.element().entries() * a));
            worst_excess = worst_excess.max(v - norm);
            ok &= v <= norm + 1e-10;
        }
        if !ok {
            fails += 1;
        }
    }
    check(
        fails == 0,
        format!(
            "200 operators: {fails} failures, max attainment deviation {worst_attain:.2e}, \
             max sampled excess {worst_excess:.2e}"
        ),
    )
}

fn criterion_3() -> Line {
    let mut fails = 0;
    let mut worst = 0.0f64;
    for i in 0..200u64 {
        let d = 1 + (i as usize % 4);
        let m = 1 + (i as usize % 6);
        let (t, s) = gen_parallel_operators(30_000 + i, d, m).unwrap();
        let c = op_parallel_witness(&t, &s, TOL).unwrap();
        let (at, as_) = (t.matrix(), s.matrix());
        let (nt, ns) = (gram_norm(&at.adjoint()), gram_norm(&as_.adjoint()));
        let x = c.basic.element();
        let tx = op_apply(&t, x).unwrap();
        let sx = op_apply(&s, x).unwrap();
        // x = ξ v*: the bracket is v* A_T A_S* v
        let v = x.entries().row(0).adjoint();
        let bracket = (v.adjoint() * at * as_.adjoint() * &v)[(0, 0)];
        let dev = rel(bracket.norm(), nt * ns)
            .max(rel(gram_norm(tx.entries()), nt))
            .max(rel(gram_norm(sx.entries()), ns))
            .max((bracket - c.bracket_value).norm() / (nt * ns))
            .max(c.relative_residual());
        let images = is_parallel_def(&tx, &sx, TOL).unwrap().0;
        worst = worst.max(dev);
        if !(dev < 1e-8 && images) {
            fails += 1;
        }
    }
    check(
        fails == 0,
        format!("200 constructed operator pairs: {fails} failures, max residual {worst:.2e}"),
    )
}

fn criterion_4() -> Line {
    let mut qualified = 0;
    let mut skipped = 0;
    let mut disagreements = 0;
    let mut seed = 40_000u64;
    while qualified < 500 {
        seed += 1;
        let d = 1 + (seed as usize % 4);
        let m = 1 + (seed as usize % 6);
        let (t, s) = if seed % 2 == 0 {
            gen_parallel_operators(seed, d, m).unwrap()
        } else {
            (
                gen_operator(seed, d, m).unwrap(),
                gen_operator(seed ^ 0xABCD, d, m).unwrap(),
            )
        };
        let np = matrices_parallel(t.matrix(), s.matrix(), TOL).unwrap();
        let def = op_parallel_def(&t, &s, TOL).unwrap().0;
        let (ts, ts_deficit) = op_parallel_tstar_detail(&t, &s, TOL).unwrap();
        if edge(np.deficit()) || edge(ts_deficit) {
            skipped += 1;
            continue;
        }
        qualified += 1;
        if def != ts {
            disagreements += 1;
        }
    }
    check(
        disagreements == 0,
        format!("500 qualified pairs: {disagreements} disagreements, {skipped} knife-edge"),
    )
}

fn criterion_5() -> Line {
    let mut herm_fail = 0;
    let mut worst = 0.0f64;
    let mut nil_fail = 0;
    let mut chain_fail = 0;
    let mut skipped = 0;
    for i in 0..100u64 {
        let d = 1 + (i as usize % 4);
        let m = 1 + (i as usize % 6);
        let t = gen_hermitian_operator(50_000 + i, d, m).unwrap();
        let w = identity_parallel_op(&t, TOL).unwrap();
        // residual ‖Tx − λ‖T‖x‖ at x = ξ w*, recomputed
        let x = make_basic(&UnitVector::basis(d, 0), &w.left_eigenvector).unwrap();
        let xe = x.element().entries();
        let r = xe * t.matrix() - xe * (w.lambda * gram_norm(t.matrix()));
        let residual = gram_norm(&r);
        worst = worst.max(residual);
        if !(w.parallel && residual < 1e-8) {
            herm_fail += 1;
        }
        if edge(w.deficit) {
            skipped += 1;
        } else if w.parallel != w.adjoint_parallel {
            chain_fail += 1;
        }

        let m = 2 + (i as usize % 5);
        let n = gen_nilpotent_operator(60_000 + i, d, m).unwrap();
        let w = identity_parallel_op(&n, TOL).unwrap();
        if w.parallel {
            nil_fail += 1;
        }
        if edge(w.deficit) {
            skipped += 1;
        } else if w.parallel != w.adjoint_parallel {
            chain_fail += 1;
        }
    }
    check(
        herm_fail == 0 && nil_fail == 0 && chain_fail == 0,
        format!(
            "100 Hermitian: {herm_fail} failures (max residual {worst:.2e}); \
             100 nilpotent: {nil_fail} failures; T‖I vs T‖T*: {chain_fail} disagreements, \
             {skipped} knife-edge"
        ),
    )
}

fn criterion_6() -> Line {
    let mut disagreements = 0;
    let mut skipped = 0;
    let mut positives = 0;
    for i in 0..600u64 {
        let d = 1 + (i as usize % 4);
        let m = 1 + (i as usize % 6);
        let (x, y) = if i < 500 {
            gen_random_pair(70_000 + i, d, m).unwrap()
        } else {
            gen_theta_positive_pair(70_000 + i, d, m).unwrap()
        };
        let r = theta_diag_suite(&x, &y, TOL).unwrap();
        if r.clauses().iter().any(|c| edge(c.deficit)) {
            skipped += 1;
            continue;
        }
        // (c) recomputed: ‖x y*‖ against ‖x‖‖y‖
        let (xe, ye) = (x.entries(), y.entries());
        let c_oracle = rel(
            gram_norm(&(xe * ye.adjoint())),
            gram_norm(xe) * gram_norm(ye),
        ) <= TOL;
        if !r.agree() || c_oracle != r.inner_norm.verdict {
            disagreements += 1;
        }
        if i >= 500 && r.theta_parallel.verdict {
            positives += 1;
        }
    }
    check(
        disagreements == 0 && positives + skipped >= 100,
        format!(
            "600 pairs: {disagreements} disagreements, {skipped} knife-edge, \
             {positives}/100 constructed positives"
        ),
    )
}

fn criterion_7() -> Line {
    let mut disagreements = 0;
    let mut skipped = 0;
    for i in 0..200u64 {
        let d = 1 + (i as usize % 4);
        let m = d + 1 + (i as usize % 3);
        let (x, y) = gen_normal_instance(80_000 + i, d, m, i % 2 == 0).unwrap();
        let r = normal_case_suite(&x, &y, TOL).unwrap();
        if r.clauses().iter().any(|c| edge(c.deficit)) {
            skipped += 1;
            continue;
        }
        if !r.agree() || (i % 2 == 0 && !r.parallel.verdict) {
            disagreements += 1;
        }
    }
    check(
        disagreements == 0,
        format!("200 normal instances: {disagreements} disagreements, {skipped} knife-edge"),
    )
}

fn criterion_8() -> Line {
    let mut mismatches = 0;
    let mut cs_mismatches = 0;
    for i in 0..600u64 {
        let d = 1 + (i as usize % 5);
        let (x, y) = if i < 500 {
            gen_random_pair(90_000 + i, d, 1).unwrap()
        } else {
            let x = gen_element(90_000 + i, d, 1).unwrap();
            let mut rng = SplitMix64::new(i);
            let c = rng.complex_gaussian();
            let y = x.scaled(c);
            (x, y)
        };
        let parallel = is_parallel_def(&x, &y, 1e-9).unwrap().0;
        let pair = ComplexMatrix::from_fn(d, 2, |r, c| {
            if c == 0 {
                x.entries()[(r, 0)]
            } else {
                y.entries()[(r, 0)]
            }
        });
        let sv = pair.singular_values();
        let (s1, s2) = if sv.len() < 2 {
            (sv[0], 0.0)
        } else {
            (sv[0].max(sv[1]), sv[0].min(sv[1]))
        };
        let dependent = s2 <= 1e-9 * s1;
        let ip = (y.entries().adjoint() * x.entries())[(0, 0)].norm();
        let cs = rel(ip, x.entries().norm() * y.entries().norm()) <= 1e-9;
        if parallel != dependent {
            mismatches += 1;
        }
        if cs != parallel {
            cs_mismatches += 1;
        }
    }
    check(
        mismatches == 0 && cs_mismatches == 0,
        format!(
            "600 vector pairs: {mismatches} parallel/dependence mismatches, \
             {cs_mismatches} Cauchy-Schwarz mismatches"
        ),
    )
}

fn diag2(a: f64, b: f64) -> ModuleElement {
    ModuleElement::new(ComplexMatrix::from_fn(2, 2, |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if i == 0 {
            C64::new(a, 0.0)
        } else {
            C64::new(b, 0.0)
        }
    }))
    .unwrap()
}

fn criterion_9() -> Line {
    let mut fails = Vec::new();
    for i in 0..20u64 {
        let y = gen_element(100_000 + i, 3, 2).unwrap();
        let z = ModuleElement::zeros(3, 2);
        let ok = is_parallel_def(&z, &y, TOL).unwrap().0
            && is_parallel_def(&y, &z, TOL).unwrap().0
            && is_parallel_eig(&z, &y, TOL).unwrap().0
            && is_parallel_eig(&y, &z, TOL).unwrap().0;
        if !ok {
            fails.push(format!("zero vs seed {}", 100_000 + i));
        }
    }
    let (a, z, b) = (diag2(1.0, 0.0), ModuleElement::zeros(2, 2), diag2(0.0, 1.0));
    let triple = is_parallel_def(&a, &z, TOL).unwrap().0
        && is_parallel_def(&z, &b, TOL).unwrap().0
        && !is_parallel_def(&a, &b, TOL).unwrap().0
        && !is_parallel_eig(&a, &b, TOL).unwrap().0;
    if !triple {
        fails.push("non-transitivity triple".into());
    }
    let mut skipped = 0;
    let mut rng = SplitMix64::new(424242);
    for i in 0..100u64 {
        let d = 1 + (i as usize % 4);
        let m = 1 + (i as usize % 5);
        let (x, y) = if i % 2 == 0 {
            gen_parallel_pair(110_000 + i, d, m).unwrap()
        } else {
            gen_random_pair(110_000 + i, d, m).unwrap()
        };
        let sa = if rng.uniform() < 0.5 { -1.0 } else { 1.0 } * (0.1 + 9.9 * rng.uniform());
        let sb = if rng.uniform() < 0.5 { -1.0 } else { 1.0 } * (0.1 + 9.9 * rng.uniform());
        let (p, c1) = is_parallel_def(&x, &y, TOL).unwrap();
        let (q, c2) = is_parallel_def(&y, &x, TOL).unwrap();
        let (r, c3) = is_parallel_def(
            &x.scaled(C64::new(sa, 0.0)),
            &y.scaled(C64::new(sb, 0.0)),
            TOL,
        )
        .unwrap();
        if [c1.deficit(), c2.deficit(), c3.deficit()]
            .iter()
            .any(|&v| edge(v))
        {
            skipped += 1;
            continue;
        }
        if !(p == q && p == r) || (i % 2 == 0 && !p) {
            fails.push(format!("homogeneity/symmetry pair {i}"));
        }
    }
    check(
        fails.is_empty(),
        format!(
            "edge battery: {} failures {:?}, {skipped} knife-edge",
            fails.len(),
            fails
        ),
    )
}

fn criterion_10() -> Line {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_kmod"))
            .args(["suite", "run", "--seed", "7", "--trials", "200", "--out"])
            .arg(&out)
            .output()
            .unwrap()
            .status;
        (status.code(), std::fs::read(&out).unwrap_or_default())
    };
    let (c1, r1) = run("first.json");
    let (c2, r2) = run("second.json");
    check(
        !r1.is_empty() && r1 == r2 && c1 == Some(0) && c2 == Some(0),
        format!(
            "two runs: {} and {} bytes, identical: {}, exit codes {:?}/{:?}",
            r1.len(),
            r2.len(),
            r1 == r2,
            c1,
            c2
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Line); 10] = [
        ("definition vs eigen criterion", criterion_1),
        ("operator norm attained on basic vectors", criterion_2),
        (
            "single basic-vector witness for operator parallelism",
            criterion_3,
        ),
        ("T ‖ S vs T*T ‖ T*S", criterion_4),
        ("parallelism with the identity", criterion_5),
        ("θ_{x,x} ‖ θ_{y,y} four-way agreement", criterion_6),
        ("normal inner product equivalences", criterion_7),
        ("column model: parallel = dependent", criterion_8),
        ("degenerate and edge cases", criterion_9),
        ("suite report determinism", criterion_10),
    ];
    let mut all = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let line = run();
        all &= line.ok;
        println!(
            "criterion {:>2} {}: {} ({}; {:.1}s)",
            k + 1,
            if line.ok { "PASS" } else { "FAIL" },
            name,
            line.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
