//! Critical curves, caustics, cusp detection through the tangent–kernel
//! angle, and real-image-count grids over the source plane.

mod contour;

pub use contour::{marching_squares, Polyline, Window};

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::catalog::{CatastropheModel, ModelId};
use crate::imaging::{invariant_report, solve_images, SolveOptions};

/// Grid resolution used when tracing a critical curve without a closed form.
pub const DEFAULT_TRACE_RESOLUTION: usize = 512;
/// Bisection tolerance on the curve parameter for cusp refinement.
pub const CUSP_PARAM_TOL: f64 = 1e-8;
/// Half-width of the parameter range for open critical curves.
pub const OPEN_CURVE_EXTENT: f64 = 2.0;
/// Half-width of the hyperbolic parameter `u` on each hyperbola branch.
pub const HYPERBOLA_EXTENT: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CausticError {
    #[error("{0}: critical set has no rank-1 real points")]
    EmptyCriticalSet(ModelId),
    #[error("invalid window or resolution")]
    InvalidGrid,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalPoint {
    pub x: [f64; 2],
    /// `η(x)`; filled by [`caustic_map`].
    pub caustic_y: [f64; 2],
    /// Unit tangent, oriented along increasing `parameter_t`.
    pub tangent: [f64; 2],
    /// Unit vector spanning `ker J_η(x)`.
    pub kernel_dir: [f64; 2],
    /// Angle between tangent and kernel, in `[0, π/2]`.
    pub beta: f64,
    /// `det[tangent, kernel_dir]`, the signed tangent–kernel alignment.
    pub alignment: f64,
    pub parameter_t: f64,
    /// Connected component of the critical curve the point lies on.
    pub branch: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cusp {
    pub branch: usize,
    pub parameter_t: f64,
    pub x: [f64; 2],
    pub caustic_y: [f64; 2],
}

/// Closed-form parametrizations of the real critical sets.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Curve {
    /// `x = (t, 0)`
    FoldLine,
    /// `x = (−3t², t)`
    CuspParabola,
    /// `x = (t, −2ct − 4t³)`
    Swallowtail { c: f64 },
    /// `x = centre + r(cos t, sin t)`
    Circle { centre: [f64; 2], r: f64 },
    /// `x = σk(eᵗ, e⁻ᵗ)`, `σ = +1` on branch 0 and `−1` on branch 1
    Hyperbola { k: f64 },
}

impl Curve {
    fn for_model(model: &CatastropheModel) -> Result<Self, CausticError> {
        let s = model.shape();
        let degenerate = s == 0.0
            && !matches!(
                model.id,
                ModelId::Fold | ModelId::Cusp | ModelId::Swallowtail
            );
        if degenerate || !s.is_finite() {
            return Err(CausticError::EmptyCriticalSet(model.id));
        }
        Ok(match model.id {
            ModelId::Fold => Curve::FoldLine,
            ModelId::Cusp => Curve::CuspParabola,
            ModelId::Swallowtail => Curve::Swallowtail { c: s },
            ModelId::EllipticUmbilic => Curve::Circle {
                centre: [0.0, 0.0],
                r: s.abs() / 3.0,
            },
            ModelId::HyperbolicUmbilic => Curve::Hyperbola { k: s.abs() / 6.0 },
            ModelId::EllipticUmbilicLensing => Curve::Circle {
                centre: [s, 0.0],
                r: s.abs(),
            },
            ModelId::HyperbolicUmbilicLensing => Curve::Hyperbola { k: s.abs() },
        })
    }

    fn branches(&self) -> usize {
        match self {
            Curve::Hyperbola { .. } => 2,
            _ => 1,
        }
    }

    fn closed(&self) -> bool {
        matches!(self, Curve::Circle { .. })
    }

    fn range(&self) -> [f64; 2] {
        match self {
            Curve::Circle { .. } => [0.0, TAU],
            Curve::Hyperbola { .. } => [-HYPERBOLA_EXTENT, HYPERBOLA_EXTENT],
            _ => [-OPEN_CURVE_EXTENT, OPEN_CURVE_EXTENT],
        }
    }

    /// Point and velocity at parameter `t`.
    fn eval(&self, branch: usize, t: f64) -> ([f64; 2], [f64; 2]) {
        match *self {
            Curve::FoldLine => ([t, 0.0], [1.0, 0.0]),
            Curve::CuspParabola => ([-3.0 * t * t, t], [-6.0 * t, 1.0]),
            Curve::Swallowtail { c } => (
                [t, -2.0 * c * t - 4.0 * t.powi(3)],
                [1.0, -2.0 * c - 12.0 * t * t],
            ),
            Curve::Circle { centre, r } => {
                let (s, c) = t.sin_cos();
                ([centre[0] + r * c, centre[1] + r * s], [-r * s, r * c])
            }
            Curve::Hyperbola { k } => {
                let sigma = if branch == 0 { 1.0 } else { -1.0 };
                let (e, f) = (t.exp(), (-t).exp());
                (
                    [sigma * k * e, sigma * k * f],
                    [sigma * k * e, -sigma * k * f],
                )
            }
        }
    }
}

fn unit(v: [f64; 2]) -> Option<[f64; 2]> {
    let n = v[0].hypot(v[1]);
    (n > 0.0 && n.is_finite()).then(|| [v[0] / n, v[1] / n])
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Unit kernel vector of a rank-1 matrix: orthogonal to its larger row.
/// `None` at rank-0 points.
pub fn kernel_direction(j: [[f64; 2]; 2]) -> Option<[f64; 2]> {
    let n0 = j[0][0].hypot(j[0][1]);
    let n1 = j[1][0].hypot(j[1][1]);
    let row = if n0 >= n1 { j[0] } else { j[1] };
    if n0.max(n1) <= 1e-12 {
        return None;
    }
    unit([-row[1], row[0]])
}

/// Critical point at `x` with the given tangent; `None` at rank-0 points.
fn critical_point(
    model: &CatastropheModel,
    x: [f64; 2],
    velocity: [f64; 2],
    t: f64,
    branch: usize,
) -> Option<CriticalPoint> {
    let tangent = unit(velocity)?;
    let kernel_dir = kernel_direction(model.jacobian_real(x))?;
    let alignment = cross(tangent, kernel_dir);
    Some(CriticalPoint {
        x,
        caustic_y: [f64::NAN; 2],
        tangent,
        kernel_dir,
        beta: dot(tangent, kernel_dir).abs().min(1.0).acos(),
        alignment,
        parameter_t: t,
        branch,
    })
}

/// `samples` points on the real critical set, from a closed-form
/// parametrization. Parameters sit at cell midpoints of the range; the
/// hyperbolic umbilics split the samples over their two branches. The
/// returned points have `caustic_y` filled.
pub fn critical_curve(
    model: &CatastropheModel,
    samples: usize,
) -> Result<Vec<CriticalPoint>, CausticError> {
    let curve = Curve::for_model(model)?;
    let nb = curve.branches();
    let [t0, t1] = curve.range();
    let mut out = Vec::with_capacity(samples);
    for b in 0..nb {
        let n = samples / nb + usize::from(b < samples % nb);
        for k in 0..n {
            let t = t0 + (t1 - t0) * (k as f64 + 0.5) / n as f64;
            let (x, v) = curve.eval(b, t);
            if let Some(p) = critical_point(model, x, v, t, b) {
                out.push(p);
            }
        }
    }
    if out.is_empty() && samples > 0 {
        return Err(CausticError::EmptyCriticalSet(model.id));
    }
    caustic_map(model, &mut out);
    Ok(out)
}

/// Window three times the size of the critical set's bounding box, used for
/// contour tracing.
pub fn default_trace_window(model: &CatastropheModel) -> Result<Window, CausticError> {
    let curve = Curve::for_model(model)?;
    let [t0, t1] = curve.range();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for b in 0..curve.branches() {
        for k in 0..=256 {
            let (x, _) = curve.eval(b, t0 + (t1 - t0) * k as f64 / 256.0);
            for i in 0..2 {
                lo[i] = lo[i].min(x[i]);
                hi[i] = hi[i].max(x[i]);
            }
        }
    }
    let half = |i: usize| 1.5 * (hi[i] - lo[i]).max(1e-3);
    let mid = |i: usize| 0.5 * (hi[i] + lo[i]);
    Ok(Window::new(
        mid(0) - half(0),
        mid(0) + half(0),
        mid(1) - half(1),
        mid(1) + half(1),
    ))
}

/// Critical set traced by marching squares on `det J_η` and polished onto
/// the zero set by Newton steps along the gradient. Branches are the
/// extracted polylines, parametrized by arc length.
pub fn trace_critical_curve(
    model: &CatastropheModel,
    window: Window,
    resolution: usize,
) -> Result<Vec<CriticalPoint>, CausticError> {
    if !window.is_valid() || resolution < 2 {
        return Err(CausticError::InvalidGrid);
    }
    let det = model.det_jacobian_poly();
    let grad = [
        det.partial(crate::poly::Var::Z1),
        det.partial(crate::poly::Var::Z2),
    ];
    let f = |x: [f64; 2]| det.eval_real(x);
    let lines = marching_squares(f, window, [resolution, resolution]);
    let mut out = Vec::new();
    for (b, line) in lines.iter().enumerate() {
        let mut s = 0.0;
        let mut prev: Option<[f64; 2]> = None;
        let n = line.points.len();
        for (k, &p0) in line.points.iter().enumerate() {
            let mut x = p0;
            for _ in 0..8 {
                let g = [grad[0].eval_real(x), grad[1].eval_real(x)];
                let gg = dot(g, g);
                if gg == 0.0 {
                    break;
                }
                let v = f(x);
                x = [x[0] - v * g[0] / gg, x[1] - v * g[1] / gg];
            }
            if let Some(q) = prev {
                s += (x[0] - q[0]).hypot(x[1] - q[1]);
            }
            prev = Some(x);
            // orient the gradient normal along the polyline
            let g = [grad[0].eval_real(x), grad[1].eval_real(x)];
            let mut tangent = [-g[1], g[0]];
            let (a, c) = (
                line.points[k.saturating_sub(1)],
                line.points[(k + 1).min(n - 1)],
            );
            if dot(tangent, [c[0] - a[0], c[1] - a[1]]) < 0.0 {
                tangent = [-tangent[0], -tangent[1]];
            }
            if let Some(p) = critical_point(model, x, tangent, s, b) {
                out.push(p);
            }
        }
    }
    if out.is_empty() {
        return Err(CausticError::EmptyCriticalSet(model.id));
    }
    caustic_map(model, &mut out);
    Ok(out)
}

/// Fill `caustic_y = η(x)`.
pub fn caustic_map(model: &CatastropheModel, points: &mut [CriticalPoint]) {
    for p in points {
        p.caustic_y = model.eta_real(p.x);
    }
}

/// Zeros of β along each branch: sign changes of the tangent–kernel
/// alignment between neighbours, with the kernel's arbitrary sign factored
/// out. Closed-form curves are refined by bisection on the parameter;
/// traced curves by linear interpolation.
pub fn beta_cusp_detect(model: &CatastropheModel, points: &[CriticalPoint]) -> Vec<Cusp> {
    let curve = Curve::for_model(model).ok();
    let mut cusps = Vec::new();
    let mut start = 0;
    while start < points.len() {
        let branch = points[start].branch;
        let end = start
            + points[start..]
                .iter()
                .take_while(|p| p.branch == branch)
                .count();
        let pts = &points[start..end];
        let closed = match curve {
            Some(c) => c.closed(),
            None => is_closed_polyline(pts),
        };
        scan_branch(model, curve, pts, closed, &mut cusps);
        start = end;
    }
    cusps.sort_by(|a, b| {
        a.branch
            .cmp(&b.branch)
            .then(a.parameter_t.total_cmp(&b.parameter_t))
    });
    cusps
}

fn is_closed_polyline(pts: &[CriticalPoint]) -> bool {
    if pts.len() < 3 {
        return false;
    }
    let gap = |a: &CriticalPoint, b: &CriticalPoint| (a.x[0] - b.x[0]).hypot(a.x[1] - b.x[1]);
    let max_step = pts
        .windows(2)
        .map(|w| gap(&w[0], &w[1]))
        .fold(0.0, f64::max);
    gap(&pts[0], &pts[pts.len() - 1]) <= 2.0 * max_step
}

/// Alignment of `q` expressed in the tangent and kernel orientation of `p`.
fn relative_alignment(p: &CriticalPoint, q: &CriticalPoint) -> f64 {
    let sk = dot(p.kernel_dir, q.kernel_dir).signum();
    let st = dot(p.tangent, q.tangent).signum();
    q.alignment * sk * st
}

fn scan_branch(
    model: &CatastropheModel,
    curve: Option<Curve>,
    pts: &[CriticalPoint],
    closed: bool,
    out: &mut Vec<Cusp>,
) {
    let n = pts.len();
    if n < 2 {
        return;
    }
    let pairs = if closed { n } else { n - 1 };
    let period = curve.map(|c| c.range()[1] - c.range()[0]).unwrap_or(0.0);
    for i in 0..pairs {
        let (a, b) = (&pts[i], &pts[(i + 1) % n]);
        let (sa, sb) = (a.alignment, relative_alignment(a, b));
        if sa == 0.0 {
            // exact zero on a sample: a cusp only if the neighbours disagree
            let prev = if i > 0 || closed {
                Some(&pts[(i + n - 1) % n])
            } else {
                None
            };
            if let Some(p) = prev {
                if relative_alignment(a, p) * sb < 0.0 {
                    out.push(cusp_at(model, a.branch, a.parameter_t, a.x));
                }
            }
            continue;
        }
        if sa * sb >= 0.0 {
            continue;
        }
        let wrap = closed && i + 1 == n;
        let tb = if wrap {
            b.parameter_t + period
        } else {
            b.parameter_t
        };
        let cusp = match curve {
            Some(c) => {
                let t = bisect_alignment(model, c, a, tb);
                let t = if closed { t.rem_euclid(period) } else { t };
                cusp_at(model, a.branch, t, c.eval(a.branch, t).0)
            }
            None => {
                let w = sa / (sa - sb);
                let x = [
                    a.x[0] + w * (b.x[0] - a.x[0]),
                    a.x[1] + w * (b.x[1] - a.x[1]),
                ];
                cusp_at(model, a.branch, a.parameter_t + w * (tb - a.parameter_t), x)
            }
        };
        out.push(cusp);
    }
}

fn cusp_at(model: &CatastropheModel, branch: usize, t: f64, x: [f64; 2]) -> Cusp {
    Cusp {
        branch,
        parameter_t: t,
        x,
        caustic_y: model.eta_real(x),
    }
}

fn bisect_alignment(model: &CatastropheModel, curve: Curve, a: &CriticalPoint, tb: f64) -> f64 {
    let s = |t: f64| -> f64 {
        let (x, v) = curve.eval(a.branch, t);
        match critical_point(model, x, v, t, a.branch) {
            Some(q) => relative_alignment(a, &q),
            None => 0.0,
        }
    };
    let (mut lo, mut hi) = (a.parameter_t, tb);
    let slo = a.alignment;
    while hi - lo > CUSP_PARAM_TOL {
        let mid = 0.5 * (lo + hi);
        let sm = s(mid);
        if sm == 0.0 {
            return mid;
        }
        if (sm > 0.0) == (slo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Flags the sample nearest to each cusp on its branch.
pub fn nearest_samples(points: &[CriticalPoint], cusps: &[Cusp]) -> Vec<bool> {
    let mut flags = vec![false; points.len()];
    for c in cusps {
        let best = points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.branch == c.branch)
            .min_by(|(_, p), (_, q)| {
                angular_gap(p.parameter_t, c.parameter_t)
                    .total_cmp(&angular_gap(q.parameter_t, c.parameter_t))
            });
        if let Some((k, _)) = best {
            flags[k] = true;
        }
    }
    flags
}

fn angular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if (0.0..=TAU).contains(&a) && (0.0..=TAU).contains(&b) {
        d.min(TAU - d)
    } else {
        d
    }
}

/// Real image counts over a grid of source positions.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageCountGrid {
    pub model_id: ModelId,
    pub window: Window,
    /// `[n_y1, n_y2]` cells.
    pub resolution: [usize; 2],
    /// Row-major over `y2` rows of `y1` cells; 0 for rejected cells.
    pub counts: Vec<usize>,
    /// Source on or near a caustic, or the solve was incomplete.
    pub rejected: Vec<bool>,
    /// `Σ_real μ` per cell; NaN for rejected cells.
    pub sum_real: Vec<f64>,
    /// `|Σ_real μ| / max(1, Σ|μ|)` per cell; NaN for rejected cells.
    pub real_defect: Vec<f64>,
}

impl ImageCountGrid {
    /// Source position at the centre of cell `(i, j)`.
    pub fn cell_centre(&self, i: usize, j: usize) -> [f64; 2] {
        cell_centre(&self.window, self.resolution, i, j)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.resolution[0] + i
    }

    pub fn count(&self, i: usize, j: usize) -> Option<usize> {
        let k = self.index(i, j);
        (!self.rejected[k]).then_some(self.counts[k])
    }

    /// Largest count difference between horizontally or vertically adjacent
    /// non-rejected cells.
    pub fn max_adjacent_jump(&self) -> usize {
        let [nx, ny] = self.resolution;
        let mut worst = 0;
        for j in 0..ny {
            for i in 0..nx {
                let Some(a) = self.count(i, j) else { continue };
                for (di, dj) in [(1, 0), (0, 1)] {
                    if i + di < nx && j + dj < ny {
                        if let Some(b) = self.count(i + di, j + dj) {
                            worst = worst.max(a.abs_diff(b));
                        }
                    }
                }
            }
        }
        worst
    }

    /// Adjacent non-rejected cells differ by an odd amount or by more than 2.
    pub fn parity_violations(&self) -> usize {
        let [nx, ny] = self.resolution;
        let mut bad = 0;
        for j in 0..ny {
            for i in 0..nx {
                let Some(a) = self.count(i, j) else { continue };
                for (di, dj) in [(1, 0), (0, 1)] {
                    if i + di < nx && j + dj < ny {
                        if let Some(b) = self.count(i + di, j + dj) {
                            let d = a.abs_diff(b);
                            bad += usize::from(d != 0 && d != 2);
                        }
                    }
                }
            }
        }
        bad
    }

    /// Distinct counts over non-rejected cells, ascending.
    pub fn distinct_counts(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.counts.len())
            .filter(|&k| !self.rejected[k])
            .map(|k| self.counts[k])
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn cell_centre(window: &Window, resolution: [usize; 2], i: usize, j: usize) -> [f64; 2] {
    let dx = (window.x[1] - window.x[0]) / resolution[0] as f64;
    let dy = (window.y[1] - window.y[0]) / resolution[1] as f64;
    [
        window.x[0] + (i as f64 + 0.5) * dx,
        window.y[0] + (j as f64 + 0.5) * dy,
    ]
}

/// Solve at every cell centre of `window` and record the number of real
/// images. The template's shape parameter is kept; its source is replaced.
pub fn image_count_grid(
    template: &CatastropheModel,
    window: Window,
    resolution: [usize; 2],
    opts: &SolveOptions,
) -> Result<ImageCountGrid, CausticError> {
    if !window.is_valid() || resolution[0] < 2 || resolution[1] < 2 {
        return Err(CausticError::InvalidGrid);
    }
    let [nx, ny] = resolution;
    let cells: Vec<(usize, f64, f64)> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let y = cell_centre(&window, resolution, k % nx, k / nx);
            match solve_images(&template.with_source(y), opts) {
                Ok(ss) => {
                    let rep = invariant_report(&ss).expect("complete set");
                    (rep.n_real, rep.sum_real, rep.normalized_real_defect)
                }
                Err(_) => (usize::MAX, f64::NAN, f64::NAN),
            }
        })
        .collect();
    let rejected: Vec<bool> = cells.iter().map(|c| c.0 == usize::MAX).collect();
    Ok(ImageCountGrid {
        model_id: template.id,
        window,
        resolution,
        counts: cells
            .iter()
            .map(|c| if c.0 == usize::MAX { 0 } else { c.0 })
            .collect(),
        rejected,
        sum_real: cells.iter().map(|c| c.1).collect(),
        real_defect: cells.iter().map(|c| c.2).collect(),
    })
}

/// Radial distance range `(min, max)` of `points` from `centre`.
pub fn radial_range(points: &[CriticalPoint], centre: [f64; 2]) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), p| {
        let r = (p.x[0] - centre[0]).hypot(p.x[1] - centre[1]);
        (lo.min(r), hi.max(r))
    })
}

/// The deltoid traced by the elliptic umbilic caustic for `c = 3`, at angle `θ`.
pub fn deltoid(theta: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (2.0 * theta).sin_cos();
    [-3.0 * c2 - 6.0 * c, 3.0 * s2 - 6.0 * s]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{instantiate, ControlParams};
    use std::f64::consts::PI;

    fn model(id: ModelId, s: f64) -> CatastropheModel {
        instantiate(id, ControlParams::for_model(id, s, [0.0, 0.0])).unwrap()
    }

    #[test]
    fn points_are_critical() {
        for id in ModelId::ALL {
            let m = model(id, 1.3);
            let pts = critical_curve(&m, 400).unwrap();
            assert_eq!(pts.len(), 400, "{id}");
            for p in &pts {
                let j = m.jacobian_real(p.x);
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                let scale = 1.0 + j.iter().flatten().map(|v| v * v).sum::<f64>();
                assert!(det.abs() <= 1e-8 * scale, "{id}: det {det} at {:?}", p.x);
                let jk = [dot(j[0], p.kernel_dir), dot(j[1], p.kernel_dir)];
                assert!(jk[0].hypot(jk[1]) <= 1e-6, "{id}");
                assert!((0.0..=PI / 2.0).contains(&p.beta));
            }
        }
    }

    #[test]
    fn elliptic_umbilic_circle_and_deltoid() {
        let m = model(ModelId::EllipticUmbilic, 3.0);
        let pts = critical_curve(&m, 2000).unwrap();
        let (lo, hi) = radial_range(&pts, [0.0, 0.0]);
        assert!((lo - 1.0).abs() <= 1e-12 && (hi - 1.0).abs() <= 1e-12);
        for p in &pts {
            let d = deltoid(p.parameter_t);
            assert!((p.caustic_y[0] - d[0]).abs() < 1e-12 && (p.caustic_y[1] - d[1]).abs() < 1e-12);
        }
        let cusps = beta_cusp_detect(&m, &pts);
        assert_eq!(cusps.len(), 3);
        for c in &cusps {
            let r = c.caustic_y[0].hypot(c.caustic_y[1]);
            assert!((r - 9.0).abs() < 1e-6, "cusp at {:?}", c.caustic_y);
        }
    }

    #[test]
    fn fold_and_cusp_maps() {
        let f = model(ModelId::Fold, 0.0);
        let pts = critical_curve(&f, 10).unwrap();
        assert!(pts
            .iter()
            .all(|p| p.caustic_y[1] == 0.0 && p.caustic_y[0] == p.x[0]));
        assert!(pts.iter().all(|p| p.beta > 1.0));
        assert!(beta_cusp_detect(&f, &pts).is_empty());

        let c = model(ModelId::Cusp, 0.0);
        let pts = critical_curve(&c, 101).unwrap();
        for p in &pts {
            let t = p.x[1];
            assert!((p.caustic_y[0] + 3.0 * t * t).abs() < 1e-14);
            assert!((p.caustic_y[1] + 2.0 * t.powi(3)).abs() < 1e-12);
        }
        let cusps = beta_cusp_detect(&c, &pts);
        assert_eq!(cusps.len(), 1);
        assert!(cusps[0].x[1].abs() < 1e-8);
        let even = critical_curve(&c, 100).unwrap();
        let cusps = beta_cusp_detect(&c, &even);
        assert_eq!(cusps.len(), 1);
        assert!(cusps[0].parameter_t.abs() < 1e-8);
    }

    #[test]
    fn elliptic_umbilic_cusp_count_is_stable_in_c() {
        for c in [-5.0, -3.0, -1.0, 1.0, 3.0, 5.0] {
            let m = model(ModelId::EllipticUmbilic, c);
            let pts = critical_curve(&m, 720).unwrap();
            assert_eq!(beta_cusp_detect(&m, &pts).len(), 3, "c = {c}");
        }
    }

    #[test]
    fn degenerate_umbilic_has_no_curve() {
        for id in [ModelId::EllipticUmbilic, ModelId::HyperbolicUmbilic] {
            let m = model(id, 0.0);
            assert_eq!(
                critical_curve(&m, 10),
                Err(CausticError::EmptyCriticalSet(id))
            );
        }
    }

    #[test]
    fn hyperbolic_umbilic_branches() {
        let m = model(ModelId::HyperbolicUmbilic, 1.0);
        let pts = critical_curve(&m, 200).unwrap();
        assert_eq!(pts.iter().filter(|p| p.branch == 0).count(), 100);
        for p in &pts {
            assert!((36.0 * p.x[0] * p.x[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn traced_curve_matches_closed_form() {
        let m = model(ModelId::EllipticUmbilic, 3.0);
        let w = default_trace_window(&m).unwrap();
        let pts = trace_critical_curve(&m, w, 128).unwrap();
        let (lo, hi) = radial_range(&pts, [0.0, 0.0]);
        assert!((lo - 1.0).abs() < 1e-10 && (hi - 1.0).abs() < 1e-10);
        assert_eq!(beta_cusp_detect(&m, &pts).len(), 3);
    }

    #[test]
    fn fold_grid_counts() {
        let m = model(ModelId::Fold, 0.0);
        let g = image_count_grid(
            &m,
            Window::new(-1.0, 1.0, -1.0, 1.0),
            [4, 4],
            &SolveOptions::default(),
        )
        .unwrap();
        for j in 0..4 {
            for i in 0..4 {
                let y = g.cell_centre(i, j);
                assert_eq!(g.count(i, j), Some(if y[1] > 0.0 { 2 } else { 0 }));
            }
        }
    }

    #[test]
    fn grid_rejects_bad_resolution() {
        let m = model(ModelId::Fold, 0.0);
        let w = Window::new(-1.0, 1.0, -1.0, 1.0);
        assert_eq!(
            image_count_grid(&m, w, [1, 4], &SolveOptions::default()),
            Err(CausticError::InvalidGrid)
        );
    }
}
