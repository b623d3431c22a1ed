//! Browser bindings: a bound breakdown, a conditional distance estimate and
//! the local limit check of a binomial count. Every function returns a JSON
//! string, or throws a string naming the problem.

use serde_json::json;
use wasm_bindgen::prelude::*;

use cclt::bounds::{bound_t11_conditional, bound_t23, llt_ratio_envelope};
use cclt::core::PairCase;
use cclt::empirics::{conditional_distance, llt_check};
use cclt::models::{EvenOdd11, Pattern01, Urn, WedgeEdge};
use cclt::moments::{estimate_residual_summary, SummaryOptions};
use cclt::transform::Transformed;
use cclt::{CountLaw, PairModel};

/// Scale draws for the change of variable; the page favours responsiveness.
const SIGMA_SAMPLES: usize = 20_000;

fn err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

trait Task {
    fn run<M: PairModel>(&self, m: &M) -> cclt::Result<serde_json::Value>;
}

fn with_model(name: &str, n: usize, p: f64, seed: u64, task: &impl Task) -> Result<String, JsValue> {
    fn go<M: PairModel + Clone>(m: M, seed: u64, task: &impl Task) -> cclt::Result<serde_json::Value> {
        if m.contract().case == PairCase::Split {
            task.run(&Transformed::new(m, SIGMA_SAMPLES, seed)?)
        } else {
            task.run(&m)
        }
    }
    let v = match name {
        "pattern01" => Pattern01::new(n, p).and_then(|m| go(m, seed, task)),
        "evenodd11" => EvenOdd11::new(n, p).and_then(|m| go(m, seed, task)),
        "wedge-edge" => WedgeEdge::new(n, p).and_then(|m| go(m, seed, task)),
        "urn" => Urn::new(n, p, (1.0 - p) / 2.0).and_then(|m| go(m, seed, task)),
        other => Err(cclt::Error::UnknownModel(other.to_string())),
    }
    .map_err(err)?;
    Ok(v.to_string())
}

struct Bound {
    k: i64,
    samples: usize,
    seed: u64,
}

impl Task for Bound {
    fn run<M: PairModel>(&self, m: &M) -> cclt::Result<serde_json::Value> {
        let opts = SummaryOptions {
            samples: self.samples,
            unconditional: self.samples,
            seed: self.seed,
            holder_p: None,
        };
        let s = estimate_residual_summary(m, self.k, &opts)?;
        let r = if s.lambda0.is_some() {
            bound_t11_conditional(&s)?
        } else {
            bound_t23(&s)?
        };
        Ok(r.to_json())
    }
}

/// Per-term bound at `Y = k` from `samples` conditioned draws.
#[wasm_bindgen]
pub fn bound_report(model: &str, n: usize, p: f64, k: i32, samples: usize, seed: u64) -> Result<String, JsValue> {
    let task = Bound {
        k: k as i64,
        samples,
        seed,
    };
    with_model(model, n, p, seed, &task)
}

struct Distance {
    k: i64,
    samples: usize,
    seed: u64,
}

impl Task for Distance {
    fn run<M: PairModel>(&self, m: &M) -> cclt::Result<serde_json::Value> {
        let d = conditional_distance(m, self.k, self.samples, self.seed)?;
        Ok(json!({
            "k": d.k,
            "samples": d.samples,
            "distance": d.distance,
            "stderr": d.stderr,
            "acceptance": d.acceptance,
        }))
    }
}

/// W1 distance of `W` given `Y = k` to the standard normal.
#[wasm_bindgen]
pub fn distance(model: &str, n: usize, p: f64, k: i32, samples: usize, seed: u64) -> Result<String, JsValue> {
    let task = Distance {
        k: k as i64,
        samples,
        seed,
    };
    with_model(model, n, p, seed, &task)
}

/// `ε_Y`, the exact `|1 - p_{k-1}/p_k|` and its envelope for `Bin(n, p)`.
#[wasm_bindgen]
pub fn llt_binomial(n: usize, p: f64, k: i32) -> Result<String, JsValue> {
    if !(p > 0.0 && p < 1.0) || n == 0 {
        return Err(err("need n >= 1 and 0 < p < 1"));
    }
    let law = CountLaw::binomial(n, p);
    let r = llt_check(&law);
    let k = k as i64;
    let exact = law.ratio(k).map(|v| (1.0 - v).abs());
    let envelope = llt_ratio_envelope(r.eps_y, k, r.sigma).map_err(err)?;
    Ok(json!({
        "sigma": r.sigma,
        "eps_y": r.eps_y,
        "argmax_y": r.argmax_y,
        "ratio_error": exact,
        "envelope": envelope,
        "implied_constant": exact.map(|e| e / envelope),
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operations_return_json() {
        let b: serde_json::Value = serde_json::from_str(&bound_report("pattern01", 64, 0.5, 0, 2000, 1).unwrap()).unwrap();
        assert!(b["total"].as_f64().unwrap() > 0.0);
        let d: serde_json::Value = serde_json::from_str(&distance("evenodd11", 64, 0.5, 0, 2000, 1).unwrap()).unwrap();
        assert!(d["distance"].as_f64().unwrap() > 0.0);
        let l: serde_json::Value = serde_json::from_str(&llt_binomial(100, 0.5, 0).unwrap()).unwrap();
        assert!((l["ratio_error"].as_f64().unwrap() - 1.0 / 51.0).abs() < 1e-12);
    }
}
