//! Box-bounded Nelder-Mead simplex descent with multi-start grid seeding.
//!
//! Parameters are scaled to the unit box internally; every proposed vertex
//! is clamped back into the box. Convergence is declared when the largest
//! pairwise vertex distance (in scaled coordinates) drops below the stated
//! tolerance.

pub(crate) struct MinimizeOutcome {
    /// Minimizer in native coordinates.
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: u64,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` over the box `[lo, hi]`, restarting from 8 fixed grid
/// seeds and keeping the best outcome.
pub(crate) fn minimize_multistart(
    f: &mut dyn FnMut(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    diameter_tol: f64,
    max_iters: usize,
) -> MinimizeOutcome {
    let dim = lo.len();
    assert_eq!(dim, hi.len());
    let mut evaluations = 0u64;
    let mut scaled_f = |u: &[f64]| {
        let native: Vec<f64> = u
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(&ui, (&l, &h))| l + ui * (h - l))
            .collect();
        f(&native)
    };

    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for start in grid_starts(dim) {
        let (u, value, evals, converged) =
            nelder_mead_unit(&mut scaled_f, &start, diameter_tol, max_iters);
        evaluations += evals;
        let better = match &best {
            None => true,
            Some((_, best_value, _)) => value < *best_value,
        };
        if better {
            best = Some((u, value, converged));
        }
    }

    let (u, value, converged) = best.expect("at least one start");
    let x = u
        .iter()
        .zip(lo.iter().zip(hi))
        .map(|(&ui, (&l, &h))| l + ui * (h - l))
        .collect();
    MinimizeOutcome {
        x,
        value,
        evaluations,
        converged,
    }
}

/// Eight deterministic start points in the unit box.
fn grid_starts(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => {
            let axis = [0.15, 0.5, 0.85];
            let mut starts = Vec::with_capacity(8);
            for &x in &axis {
                for &y in &axis {
                    if (x, y) != (0.5, 0.5) {
                        starts.push(vec![x, y]);
                    }
                }
            }
            starts
        }
        3 => {
            let mut starts = Vec::with_capacity(8);
            for corner in 0..8u32 {
                starts.push(
                    (0..3)
                        .map(|j| if corner >> j & 1 == 1 { 0.8 } else { 0.2 })
                        .collect(),
                );
            }
            starts
        }
        _ => {
            // Kronecker sequence fallback for other dimensions.
            let alphas: Vec<f64> = (0..dim)
                .map(|j| (2.0 + j as f64).sqrt().fract())
                .collect();
            (1..=8u32)
                .map(|k| {
                    alphas
                        .iter()
                        .map(|a| (f64::from(k) * a).fract().clamp(0.05, 0.95))
                        .collect()
                })
                .collect()
        }
    }
}

fn clamp_unit(u: &mut [f64]) {
    for v in u {
        *v = v.clamp(0.0, 1.0);
    }
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..simplex.len() {
        for j in i + 1..simplex.len() {
            let dist = simplex[i]
                .iter()
                .zip(&simplex[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d = d.max(dist);
        }
    }
    d
}

fn nelder_mead_unit(
    f: &mut impl FnMut(&[f64]) -> f64,
    start: &[f64],
    diameter_tol: f64,
    max_iters: usize,
) -> (Vec<f64>, f64, u64, bool) {
    let dim = start.len();
    let mut evals = 0u64;
    let mut eval = |u: &[f64]| -> f64 {
        evals += 1;
        f(u)
    };

    // Initial simplex: the start plus one step of 0.25 along each axis,
    // flipped when that would leave the box.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = start.to_vec();
    let f0 = eval(&v0);
    simplex.push((v0, f0));
    for j in 0..dim {
        let mut v = start.to_vec();
        v[j] = if v[j] + 0.25 <= 1.0 {
            v[j] + 0.25
        } else {
            v[j] - 0.25
        };
        let fj = eval(&v);
        simplex.push((v, fj));
    }

    let mut converged = false;
    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let vertices: Vec<Vec<f64>> = simplex.iter().map(|(v, _)| v.clone()).collect();
        if diameter(&vertices) < diameter_tol {
            converged = true;
            break;
        }

        let worst = simplex[dim].clone();
        let mut centroid = vec![0.0; dim];
        for (v, _) in simplex.iter().take(dim) {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }

        let mut reflected: Vec<f64> = centroid
            .iter()
            .zip(&worst.0)
            .map(|(c, w)| c + REFLECT * (c - w))
            .collect();
        clamp_unit(&mut reflected);
        let f_reflected = eval(&reflected);

        if f_reflected < simplex[0].1 {
            let mut expanded: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + EXPAND * (c - w))
                .collect();
            clamp_unit(&mut expanded);
            let f_expanded = eval(&expanded);
            simplex[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
        } else if f_reflected < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_reflected);
        } else {
            // Contract toward the better of the reflected point and the
            // worst vertex.
            let (toward, f_toward) = if f_reflected < worst.1 {
                (&reflected, f_reflected)
            } else {
                (&worst.0, worst.1)
            };
            let mut contracted: Vec<f64> = centroid
                .iter()
                .zip(toward)
                .map(|(c, x)| c + CONTRACT * (x - c))
                .collect();
            clamp_unit(&mut contracted);
            let f_contracted = eval(&contracted);
            if f_contracted < f_toward {
                simplex[dim] = (contracted, f_contracted);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let mut shrunk: Vec<f64> = best
                        .iter()
                        .zip(&entry.0)
                        .map(|(b, x)| b + SHRINK * (x - b))
                        .collect();
                    clamp_unit(&mut shrunk);
                    let fs = eval(&shrunk);
                    *entry = (shrunk, fs);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (v, value) = simplex.swap_remove(0);
    (v, value, evals, converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_quadratic_minimum() {
        let mut f = |x: &[f64]| (x[0] - 0.03).powi(2) + 4.0 * (x[1] - 0.21).powi(2);
        let out = minimize_multistart(&mut f, &[0.0, 0.0], &[0.1, 0.5], 1e-8, 500);
        assert!(out.converged);
        assert!((out.x[0] - 0.03).abs() < 1e-6);
        assert!((out.x[1] - 0.21).abs() < 1e-6);
    }

    #[test]
    fn clamps_to_boundary_minimum() {
        let mut f = |x: &[f64]| (x[0] + 1.0).powi(2) + x[1].powi(2);
        let out = minimize_multistart(&mut f, &[0.0, 0.0], &[1.0, 1.0], 1e-8, 500);
        assert!(out.x[0].abs() < 1e-6);
        assert!(out.x[1].abs() < 1e-6);
    }

    #[test]
    fn escapes_local_basins_via_multistart() {
        // Two basins; the global one is narrow and off-center.
        let mut f = |x: &[f64]| {
            let a = (x[0] - 0.9).powi(2) + (x[1] - 0.9).powi(2);
            let b = 0.05 + (x[0] - 0.2).powi(2) + (x[1] - 0.3).powi(2);
            (a).min(b)
        };
        let out = minimize_multistart(&mut f, &[0.0, 0.0], &[1.0, 1.0], 1e-8, 500);
        assert!((out.x[0] - 0.9).abs() < 1e-5);
        assert!((out.x[1] - 0.9).abs() < 1e-5);
    }

    #[test]
    fn three_dimensional_recovery() {
        let mut f = |x: &[f64]| {
            (x[0] - 0.01).powi(2) + (x[1] - 0.4).powi(2) + 2.0 * (x[2] - 0.25).powi(2)
        };
        let out = minimize_multistart(&mut f, &[0.0; 3], &[0.1, 0.5, 0.5], 1e-8, 800);
        assert!(out.converged);
        assert!((out.x[0] - 0.01).abs() < 1e-6);
        assert!((out.x[1] - 0.4).abs() < 1e-6);
        assert!((out.x[2] - 0.25).abs() < 1e-6);
    }
}
