//! Marching-squares extraction of the zero set of a scalar field on a grid.

use std::collections::HashMap;

/// Rectangle `[x_min, x_max] × [y_min, y_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self {
            x: [x_min, x_max],
            y: [y_min, y_max],
        }
    }

    pub fn from_array(w: [f64; 4]) -> Self {
        Self::new(w[0], w[1], w[2], w[3])
    }

    pub fn is_valid(&self) -> bool {
        self.x[0] < self.x[1]
            && self.y[0] < self.y[1]
            && self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }
}

/// A connected piece of the zero set, as an ordered list of points.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Edge {
    /// Between nodes `(i, j)` and `(i + 1, j)`.
    H(usize, usize),
    /// Between nodes `(i, j)` and `(i, j + 1)`.
    V(usize, usize),
}

/// Zero set of `f` over `window`, sampled on `nodes[0] × nodes[1]` grid nodes.
pub fn marching_squares<F>(f: F, window: Window, nodes: [usize; 2]) -> Vec<Polyline>
where
    F: Fn([f64; 2]) -> f64,
{
    let [nx, ny] = nodes;
    assert!(
        nx >= 2 && ny >= 2,
        "marching squares needs at least 2×2 nodes"
    );
    let dx = (window.x[1] - window.x[0]) / (nx - 1) as f64;
    let dy = (window.y[1] - window.y[0]) / (ny - 1) as f64;
    let node = |i: usize, j: usize| [window.x[0] + i as f64 * dx, window.y[0] + j as f64 * dy];

    // exact zeros are nudged so every crossing lies strictly inside an edge
    let vals: Vec<f64> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| {
            let v = f(node(i, j));
            if v == 0.0 {
                f64::MIN_POSITIVE
            } else {
                v
            }
        })
        .collect();
    let val = |i: usize, j: usize| vals[j * nx + i];

    let crossing = |e: Edge| -> [f64; 2] {
        let (a, b) = match e {
            Edge::H(i, j) => ((i, j), (i + 1, j)),
            Edge::V(i, j) => ((i, j), (i, j + 1)),
        };
        let (fa, fb) = (val(a.0, a.1), val(b.0, b.1));
        let s = fa / (fa - fb);
        let (pa, pb) = (node(a.0, a.1), node(b.0, b.1));
        [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])]
    };

    let mut segments: Vec<[Edge; 2]> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let corners = [val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)];
            // edges in corner order: bottom, right, top, left
            let edges = [
                Edge::H(i, j),
                Edge::V(i + 1, j),
                Edge::H(i, j + 1),
                Edge::V(i, j),
            ];
            let cut: Vec<Edge> = (0..4)
                .filter(|&k| (corners[k] > 0.0) != (corners[(k + 1) % 4] > 0.0))
                .map(|k| edges[k])
                .collect();
            match cut.len() {
                2 => segments.push([cut[0], cut[1]]),
                4 => {
                    let centre = corners.iter().sum::<f64>() / 4.0;
                    if (centre > 0.0) == (corners[0] > 0.0) {
                        segments.push([edges[0], edges[3]]);
                        segments.push([edges[1], edges[2]]);
                    } else {
                        segments.push([edges[0], edges[1]]);
                        segments.push([edges[2], edges[3]]);
                    }
                }
                _ => {}
            }
        }
    }

    let mut incident: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, s) in segments.iter().enumerate() {
        for e in s {
            incident.entry(*e).or_default().push(k);
        }
    }

    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    // open chains first start from boundary edges (one incident segment)
    let mut starts: Vec<usize> = (0..segments.len())
        .filter(|&k| segments[k].iter().any(|e| incident[e].len() == 1))
        .collect();
    starts.extend(0..segments.len());
    for start in starts {
        if used[start] {
            continue;
        }
        let s = segments[start];
        let first = if incident[&s[0]].len() == 1 {
            s[0]
        } else {
            s[1]
        };
        let mut edges = vec![first];
        let mut at = if first == s[0] { s[1] } else { s[0] };
        used[start] = true;
        let closed = loop {
            edges.push(at);
            let next = incident[&at].iter().copied().find(|&k| !used[k]);
            match next {
                Some(k) => {
                    used[k] = true;
                    let seg = segments[k];
                    at = if seg[0] == at { seg[1] } else { seg[0] };
                }
                None => break at == first && edges.len() > 2,
            }
        };
        if closed {
            edges.pop();
        }
        out.push(Polyline {
            points: edges.into_iter().map(crossing).collect(),
            closed,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_is_one_closed_loop() {
        let lines = marching_squares(
            |p| p[0] * p[0] + p[1] * p[1] - 1.0,
            Window::new(-2.0, 2.0, -2.0, 2.0),
            [81, 81],
        );
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        for p in &lines[0].points {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r - 1.0).abs() < 5e-3, "r = {r}");
        }
    }

    #[test]
    fn hyperbola_gives_two_open_branches() {
        let lines = marching_squares(
            |p| p[0] * p[1] - 0.25,
            Window::new(-2.0, 2.0, -2.0, 2.0),
            [64, 64],
        );
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| !l.closed));
    }

    #[test]
    fn no_crossings_no_lines() {
        let lines = marching_squares(
            |p| 1.0 + p[0] * p[0],
            Window::new(-1.0, 1.0, -1.0, 1.0),
            [8, 8],
        );
        assert!(lines.is_empty());
    }
}
