//! Scalar searches over the unit circle and over a disk in the complex plane.

use crate::numkernel::{unimodular, C64};

/// Number of uniform angles probed before refinement.
pub const CIRCLE_GRID: usize = 4096;

/// Angular width at which golden-section refinement stops.
pub const ANGLE_TOL: f64 = 1e-12;

/// Local maxima of the grid that get refined.
const REFINED_PEAKS: usize = 3;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy)]
pub struct CircleMax {
    pub theta: f64,
    pub lambda: C64,
    pub value: f64,
}

/// Maximizes `f(e^{iθ})` over `θ ∈ [0, 2π)`.
///
/// `grid` uniform angles are probed, then each of the best few local maxima
/// is refined by golden-section search on its two neighbouring grid cells
/// down to [`ANGLE_TOL`]. A refined point replaces the grid optimum only if
/// it is larger by more than rounding noise, so exactly attained grid
/// points (θ = 0, π, ...) are kept verbatim.
///
/// For `f(λ) = ‖x + λy‖` the Lipschitz bound `|∂θ f| ≤ ‖y‖` caps the
/// pre-refinement error at `π‖y‖/grid`.
pub fn maximize_on_circle<F: FnMut(C64) -> f64>(mut f: F, grid: usize) -> CircleMax {
    assert!(grid >= 3, "circle grid needs at least three points");
    let step = std::f64::consts::TAU / grid as f64;
    let values: Vec<f64> = (0..grid).map(|k| f(unimodular(k as f64 * step))).collect();

    let mut peaks: Vec<usize> = (0..grid)
        .filter(|&k| {
            let prev = values[(k + grid - 1) % grid];
            let next = values[(k + 1) % grid];
            values[k] >= prev && values[k] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(REFINED_PEAKS);

    let first_best = (0..grid)
        .reduce(|b, k| if values[k] > values[b] { k } else { b })
        .unwrap_or(0);
    let mut best = CircleMax {
        theta: first_best as f64 * step,
        lambda: unimodular(first_best as f64 * step),
        value: values[first_best],
    };
    for k in peaks {
        let centre = k as f64 * step;
        let (theta, value) = golden_max(&mut f, centre - step, centre + step);
        if value > best.value + 4.0 * f64::EPSILON * best.value.abs() {
            let theta = theta.rem_euclid(std::f64::consts::TAU);
            best = CircleMax {
                theta,
                lambda: unimodular(theta),
                value,
            };
        }
    }
    best
}

fn golden_max<F: FnMut(C64) -> f64>(f: &mut F, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let mut fc = f(unimodular(c));
    let mut fd = f(unimodular(d));
    let (mut best_t, mut best_v) = if fc >= fd { (c, fc) } else { (d, fd) };
    while b - a > ANGLE_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(unimodular(c));
            if fc > best_v {
                best_t = c;
                best_v = fc;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(unimodular(d));
            if fd > best_v {
                best_t = d;
                best_v = fd;
            }
        }
    }
    (best_t, best_v)
}

#[derive(Debug, Clone, Copy)]
pub struct DiskMin {
    pub lambda: C64,
    pub value: f64,
}

const DISK_RINGS: usize = 24;
const DISK_SPOKES: usize = 48;
const PATTERN_DIRECTIONS: usize = 16;
const PATTERN_STEP_TOL: f64 = 1e-10;
const PATTERN_MAX_ITERS: usize = 20_000;

/// Minimizes a convex `f` over `ℂ`, given that a minimizer lies in the disk
/// `|λ| ≤ radius`.
///
/// A polar grid over the disk seeds a compass search with 16 directions,
/// rotated by the golden angle at every step reduction, halving the step
/// until it falls below `1e-10 · radius`.
pub fn minimize_in_disk<F: FnMut(C64) -> f64>(mut f: F, radius: f64) -> DiskMin {
    let origin = C64::new(0.0, 0.0);
    let mut best = DiskMin {
        lambda: origin,
        value: f(origin),
    };
    if !(radius > 0.0) || !radius.is_finite() {
        return best;
    }
    for ring in 1..=DISK_RINGS {
        let r = radius * ring as f64 / DISK_RINGS as f64;
        for spoke in 0..DISK_SPOKES {
            let lambda = unimodular(std::f64::consts::TAU * spoke as f64 / DISK_SPOKES as f64) * r;
            let v = f(lambda);
            if v < best.value {
                best = DiskMin { lambda, value: v };
            }
        }
    }

    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut step = radius / DISK_RINGS as f64;
    let stop = PATTERN_STEP_TOL * radius;
    let mut offset = 0.0;
    let mut iters = 0;
    while step > stop && iters < PATTERN_MAX_ITERS {
        iters += 1;
        let mut improved: Option<DiskMin> = None;
        for k in 0..PATTERN_DIRECTIONS {
            let dir =
                unimodular(offset + std::f64::consts::TAU * k as f64 / PATTERN_DIRECTIONS as f64);
            let lambda = best.lambda + dir * step;
            let v = f(lambda);
            if v < improved.map_or(best.value, |m| m.value) {
                improved = Some(DiskMin { lambda, value: v });
            }
        }
        match improved {
            Some(m) => best = m,
            None => {
                step *= 0.5;
                offset += golden_angle;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_max_of_real_part() {
        // max Re(e^{iθ} e^{-i}) at θ = 1
        let target = unimodular(-1.0);
        let m = maximize_on_circle(|l| (l * target).re, CIRCLE_GRID);
        assert!((m.theta - 1.0).abs() < 1e-7);
        assert!((m.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn circle_max_keeps_exact_grid_point() {
        let m = maximize_on_circle(|l| (C64::new(1.0, 0.0) + l).norm(), CIRCLE_GRID);
        assert_eq!(m.theta, 0.0);
        assert_eq!(m.lambda, C64::new(1.0, 0.0));
        assert_eq!(m.value, 2.0);
    }

    #[test]
    fn circle_max_handles_kinked_peak() {
        // max(|cos θ|, |sin θ|)-like ridge with kinks at the peak
        let f = |l: C64| (l.re - 0.3).abs().max((l.im + 0.1).abs());
        let m = maximize_on_circle(f, CIRCLE_GRID);
        let brute = (0..200_000)
            .map(|k| f(unimodular(k as f64 * std::f64::consts::TAU / 200_000.0)))
            .fold(f64::MIN, f64::max);
        assert!(m.value >= brute - 1e-9);
    }

    #[test]
    fn disk_min_of_shifted_modulus() {
        let c = C64::new(0.3, -0.4);
        let m = minimize_in_disk(|l| (l - c).norm() + 1.0, 2.0);
        assert!((m.lambda - c).norm() < 1e-8);
        assert!((m.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn disk_min_of_nonsmooth_max() {
        let f = |l: C64| (l.re - 0.25).abs().max((l.im - 0.5).abs() * 2.0) + 0.5;
        let m = minimize_in_disk(f, 3.0);
        assert!((m.value - 0.5).abs() < 1e-9, "{}", m.value);
    }

    #[test]
    fn disk_min_zero_radius() {
        let m = minimize_in_disk(|l| l.norm() + 2.0, 0.0);
        assert_eq!(m.value, 2.0);
    }
}
