use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PolyError, UniPoly};

/// Absolute tolerance on the scaled residual `|p(z)| / (1 + max|c|)`.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 500;
/// Seed for the angular offset of the initial circle.
pub const DEFAULT_SEED: u64 = 0x0abe_87e8;
/// Roots closer than `CLUSTER_RADIUS * (1 + |z|)` are merged.
pub const CLUSTER_RADIUS: f64 = 1e-6;

const GOLDEN_ANGLE: f64 = PI * 0.763_932_022_500_210_3; // π(3 − √5)

/// A group of numerically coincident roots.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCluster {
    /// Mean of the member estimates.
    pub value: Complex64,
    pub multiplicity_estimate: usize,
    /// Largest distance of a member from `value`.
    pub radius: f64,
    /// `|p(value)|`.
    pub residual: f64,
    /// The individual Aberth estimates that were merged into this cluster.
    pub members: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AberthOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for AberthOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_ROOT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: DEFAULT_SEED,
        }
    }
}

/// All roots of `p`, clustered, using the default seed.
pub fn aberth_roots(p: &UniPoly, tol: f64, max_iter: usize) -> Result<Vec<RootCluster>, PolyError> {
    aberth_roots_with(
        p,
        &AberthOptions {
            tol,
            max_iter,
            ..AberthOptions::default()
        },
    )
}

pub fn aberth_roots_with(p: &UniPoly, opts: &AberthOptions) -> Result<Vec<RootCluster>, PolyError> {
    let roots = aberth_raw(p, opts)?;
    Ok(cluster_roots(p, &roots))
}

/// Simultaneous Aberth–Ehrlich iteration. Returns `deg p` root estimates
/// (unclustered, in iteration order).
pub fn aberth_raw(p: &UniPoly, opts: &AberthOptions) -> Result<Vec<Complex64>, PolyError> {
    let n = p.degree();
    if p.is_zero() || n == 0 {
        return Err(PolyError::InvalidDegree { degree: n });
    }
    if n == 1 {
        let c = p.coeffs();
        return Ok(vec![-c[0] / c[1]]);
    }

    // normalise to unit max coefficient
    let q = p.scale(Complex64::new(1.0 / p.max_coeff_norm(), 0.0));
    let lead = q.leading();
    let cauchy = 1.0
        + q.coeffs()[..n]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let offset: f64 = rng.random_range(0.0..2.0 * PI);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(cauchy, offset + GOLDEN_ANGLE * k as f64))
        .collect();

    let mut done = vec![false; n];
    let mut iterations = 0;
    while iterations < opts.max_iter && !done.iter().all(|&d| d) {
        iterations += 1;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (v, dv) = q.eval_with_derivative(z[k]);
            if v.norm() <= 4.0 * f64::EPSILON * q.abs_eval(z[k]) {
                done[k] = true;
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !w.re.is_finite() || !w.im.is_finite() {
                // zero derivative or collision: nudge off the bad spot
                let nudge = Complex64::from_polar(
                    1e-3 * (1.0 + z[k].norm()),
                    GOLDEN_ANGLE * (k + iterations) as f64,
                );
                z[k] += nudge;
                continue;
            }
            z[k] -= w;
            if w.norm() <= 2.0 * f64::EPSILON * z[k].norm() {
                done[k] = true;
            }
        }
    }

    let bound = opts.tol * (1.0 + p.max_coeff_norm());
    let acceptable = |r: &Complex64| {
        let v = p.eval(*r).norm();
        v <= bound || v <= 16.0 * f64::EPSILON * p.abs_eval(*r)
    };
    if z.iter().all(acceptable) {
        Ok(z)
    } else {
        Err(PolyError::NonConvergence { iterations })
    }
}

/// Merge estimates within `CLUSTER_RADIUS * (1 + |z|)` of each other
/// (transitively). Output is sorted by real then imaginary part.
pub fn cluster_roots(p: &UniPoly, roots: &[Complex64]) -> Vec<RootCluster> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = 1.0 + roots[i].norm().max(roots[j].norm());
            if (roots[i] - roots[j]).norm() <= CLUSTER_RADIUS * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }

    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for (i, &root) in roots.iter().enumerate() {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(root);
    }

    let mut clusters: Vec<RootCluster> = groups
        .into_iter()
        .map(|members| {
            let value = members.iter().sum::<Complex64>() / members.len() as f64;
            let radius = members
                .iter()
                .map(|m| (m - value).norm())
                .fold(0.0, f64::max);
            RootCluster {
                value,
                multiplicity_estimate: members.len(),
                radius,
                residual: p.eval(value).norm(),
                members,
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    clusters
}
