//! Shared fixtures for the solver benchmarks.

use lefschetz_lens::catalog::{instantiate, ControlParams, ModelId};
use lefschetz_lens::poly::UniPoly;
use lefschetz_lens::CatastropheModel;

/// A generic, off-caustic instance of every catalog model.
pub fn generic_models() -> Vec<CatastropheModel> {
    ModelId::ALL
        .iter()
        .map(|&id| {
            let params = ControlParams::for_model(id, 1.3, [0.31, -0.17]);
            instantiate(id, params).expect("generic parameters are valid")
        })
        .collect()
}

/// `Π (z − k/(d+1))` for `k = 1..=d`, with real well-separated roots.
pub fn separated_poly(d: usize) -> UniPoly {
    let roots: Vec<_> = (1..=d)
        .map(|k| lefschetz_lens::Complex64::new(k as f64 / (d + 1) as f64, 0.0))
        .collect();
    UniPoly::from_roots(lefschetz_lens::Complex64::new(1.0, 0.0), &roots)
}
