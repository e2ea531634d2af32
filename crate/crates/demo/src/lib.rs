//! Browser bindings for three operations of the `switchmix` library: the
//! spectral summary of an enumerated state space, the worst-start mixing curve,
//! and a seeded run of the simple switch chain.
//!
//! Each exported function returns a JSON string. The `*_json` functions hold
//! the logic and are callable from Rust; the `#[wasm_bindgen]` wrappers turn
//! their errors into JavaScript exceptions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use switchmix::config::sample_uniform_simple;
use switchmix::enumerate::DEFAULT_CAP;
use switchmix::kernels::step_simple;
use switchmix::spectral::StateSpace;
use wasm_bindgen::prelude::*;

/// Largest graph side accepted by [`walk_json`], to keep the page responsive.
pub const MAX_WALK_N: usize = 200;

/// Largest number of steps accepted by [`walk_json`].
pub const MAX_WALK_STEPS: u32 = 10_000_000;

fn check_size(n: usize, d: usize) -> Result<(), String> {
    if d == 0 || n < d {
        return Err(format!("need 1 ≤ d ≤ n, got n={n}, d={d}"));
    }
    Ok(())
}

fn space(n: usize, d: usize, multigraph: bool) -> Result<StateSpace, String> {
    check_size(n, d)?;
    StateSpace::enumerate(n, d, !multigraph, DEFAULT_CAP).map_err(|e| e.to_string())
}

/// Size, spectral gap, Poincaré constant, relaxation time and `t_mix(1/4)` of the
/// continuous-time chain on the enumerated space.
pub fn spectrum_json(n: usize, d: usize, multigraph: bool) -> Result<String, String> {
    let s = space(n, d, multigraph)?;
    let mut chain = s.chain().map_err(|e| e.to_string())?;
    let ex = chain.extremes();
    let t_mix = if s.len() <= switchmix::spectral::DENSE_LIMIT {
        Some(chain.t_mix(0.25).map_err(|e| e.to_string())?)
    } else {
        None
    };
    Ok(json!({
        "n": n,
        "d": d,
        "space": s.label(),
        "states": s.len(),
        "gap": ex.gap,
        "poincare": 1.0 / ex.gap,
        "t_rel": 1.0 / ex.gap,
        "lambda_min": 1.0 - ex.top,
        "t_mix_quarter": t_mix,
    })
    .to_string())
}

/// Worst-start total-variation distance at `points` times evenly spaced up to `horizon`.
pub fn mixing_json(n: usize, d: usize, multigraph: bool, horizon: f64, points: usize) -> Result<String, String> {
    if !(horizon > 0.0 && horizon.is_finite()) || points < 2 {
        return Err("need a positive horizon and at least two points".into());
    }
    let s = space(n, d, multigraph)?;
    if s.len() > switchmix::spectral::DENSE_LIMIT {
        return Err(format!("{} states is too many for a dense mixing curve", s.len()));
    }
    let mut chain = s.chain().map_err(|e| e.to_string())?;
    let ts: Vec<f64> = (0..points).map(|k| horizon * k as f64 / (points - 1) as f64).collect();
    let curve: Vec<[f64; 2]> = chain.mixing_curve(None, &ts).into_iter().map(|(t, tv)| [t, tv]).collect();
    Ok(json!({ "states": s.len(), "curve": curve }).to_string())
}

/// Runs `steps` steps of the simple switch chain from a uniform simple graph and
/// returns the adjacency matrix and the number of accepted moves.
pub fn walk_json(n: usize, d: usize, steps: u32, seed: u64) -> Result<String, String> {
    check_size(n, d)?;
    if n > MAX_WALK_N {
        return Err(format!("n is limited to {MAX_WALK_N} in the demo"));
    }
    if steps > MAX_WALK_STEPS {
        return Err(format!("steps are limited to {MAX_WALK_STEPS} in the demo"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = sample_uniform_simple(n, d, &mut rng);
    let mut g = start.clone();
    let mut accepted = 0u32;
    for _ in 0..steps {
        accepted += u32::from(step_simple(&mut g, &mut rng));
    }
    let changed = start.matrix().iter().flatten().zip(g.matrix().iter().flatten()).filter(|(a, b)| a != b).count();
    Ok(json!({
        "n": n,
        "d": d,
        "steps": steps,
        "accepted": accepted,
        "changed_entries": changed,
        "simple": g.is_simple(),
        "matrix": g.matrix(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn spectrum(n: usize, d: usize, multigraph: bool) -> Result<String, JsError> {
    spectrum_json(n, d, multigraph).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn mixing(n: usize, d: usize, multigraph: bool, horizon: f64, points: usize) -> Result<String, JsError> {
    mixing_json(n, d, multigraph, horizon, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn walk(n: usize, d: usize, steps: u32, seed: u64) -> Result<String, JsError> {
    walk_json(n, d, steps, seed).map_err(|e| JsError::new(&e))
}
