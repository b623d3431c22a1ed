//! One line per acceptance criterion. Exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use cclt::bounds::{bound_t23, llt_ratio_bound, llt_ratio_envelope, stein_constants};
use cclt::core::CountLaw;
use cclt::empirics::{
    conditional_distance, llt_check, rate_regression, sample_conditional, sliced_w1_to_std_normal,
    w1_to_std_normal,
};
use cclt::models::{EvenOdd11, Pattern01, SubgraphSpec, TriangleWedge, WedgeEdge};
use cclt::moments::{estimate_residual_summary, exact_moments, SummaryOptions, ABS_Z_MEAN};
use cclt::normal;
use cclt::oracle::{exact_decomposition_check, pattern01_table, wedge_table, Fraction};
use cclt::rng::{substream, with_workers};
use cclt::transform::{symmetrised_drift_check, Transformed, DEFAULT_SIGMA_SAMPLES};
use cclt::{PairModel, Result};
use rand_distr::{Distribution, StandardNormal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: u32, title: &str, started: Instant, outcome: Result<Outcome>) -> bool {
    let secs = started.elapsed().as_secs_f64();
    match outcome {
        Ok(o) => {
            let tag = if o.pass { "PASS" } else { "FAIL" };
            println!("criterion {id} [{tag}] {title} ({secs:.1}s): {}", o.detail);
            o.pass
        }
        Err(e) => {
            println!("criterion {id} [FAIL] {title} ({secs:.1}s): error: {e}");
            false
        }
    }
}

fn criterion1() -> Result<Outcome> {
    let mut mean_err: f64 = 0.0;
    let mut var_err: f64 = 0.0;
    let mut worst = (0, 0, 0.0, 0.0);
    for n in 3..=12 {
        for row in pattern01_table(n)? {
            mean_err = mean_err.max((row.exact_mean - row.formula_mean).abs());
            let f = row.formula_variance.unwrap_or(f64::NAN);
            let e = (row.exact_variance - f).abs();
            if e > var_err {
                var_err = e;
                worst = (n, row.count, row.exact_variance, f);
            }
        }
    }
    let (mean_ok, var_ok) = (mean_err <= 1e-10, var_err <= 1e-10);
    Ok(Outcome {
        pass: mean_ok && var_ok,
        detail: format!(
            "mean max err {mean_err:.2e} ({}); variance max err {var_err:.3e} ({}), worst n={} m={}: enumerated {:.6} vs displayed {:.6}",
            if mean_ok { "ok" } else { "fails" },
            if var_ok { "ok" } else { "fails" },
            worst.0,
            worst.1,
            worst.2,
            worst.3
        ),
    })
}

fn criterion2() -> Result<Outcome> {
    let mut mean_err: f64 = 0.0;
    for n in [4, 5] {
        for row in wedge_table(n)? {
            mean_err = mean_err.max((row.exact_mean - row.formula_mean).abs());
        }
    }
    let mut er_max: f64 = 0.0;
    let mut exact_zero = true;
    let patterns = [
        ("triangle", SubgraphSpec::triangle()),
        ("K4", SubgraphSpec::complete(4)),
        ("P4", SubgraphSpec::path(4)),
    ];
    for n in [4, 5, 6] {
        for (_, h) in &patterns {
            for p in [Fraction::new(1, 2)?, Fraction::new(1, 3)?] {
                let c = exact_decomposition_check(n, p, h)?;
                er_max = er_max.max(c.mean_residual.abs());
                exact_zero &= c.mean_residual_exact == "0";
            }
        }
    }
    Ok(Outcome {
        pass: mean_err <= 1e-10 && er_max <= 1e-9,
        detail: format!(
            "E(U|E=m) max err {mean_err:.2e} at n in {{4,5}}; max |E R_H| {er_max:.2e} over triangle, K4, P4, n in {{4,5,6}}, p in {{1/2,1/3}} (rational zero: {exact_zero})"
        ),
    })
}

fn r0_gap<M: PairModel>(m: &M, declared: impl Fn(&M::Config) -> [f64; 2]) -> Result<f64> {
    let q = m.constants().q;
    let mut gap: f64 = 0.0;
    m.for_each_config(&mut |_, cfg| {
        let e = exact_moments(m, cfg);
        let d = declared(cfg);
        gap = gap
            .max((e.m0_plus - q - d[0]).abs())
            .max((e.m0_minus - q - d[1]).abs());
    })?;
    Ok(gap)
}

fn drift_margin<M: PairModel>(t: &Transformed<M>) -> Result<(f64, f64, usize)> {
    let law = t.count_law();
    let base = law.base_count();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_decomp: f64 = 0.0;
    let mut checked = 0;
    for c in 0..law.pmf.len() {
        let k = c as i64 - base;
        let r = symmetrised_drift_check(t, k)?;
        worst_excess = worst_excess.max(r.drift - r.envelope);
        worst_decomp = worst_decomp.max(r.max_decomposition_error);
        checked += 1;
    }
    Ok((worst_excess, worst_decomp, checked))
}

fn criterion3() -> Result<Outcome> {
    let mut excess = f64::NEG_INFINITY;
    let mut decomp: f64 = 0.0;
    let mut cases = 0;
    let mut gap: f64 = 0.0;
    for n in [6, 8, 10, 12] {
        for p in [0.5, 0.3] {
            let m = Pattern01::new(n, p)?;
            let c = m.constants().clone();
            gap = gap.max(r0_gap(&m, |cfg| {
                let y = m.observe(cfg).y;
                [-c.lambda * c.a_plus * y, c.lambda * c.a_minus * y]
            })?);
            let (e, d, k) = drift_margin(&Transformed::new(m, 0, 0)?)?;
            excess = excess.max(e);
            decomp = decomp.max(d);
            cases += k;

            let m = EvenOdd11::new(n, p)?;
            let c = m.constants().clone();
            if p == 0.5 {
                gap = gap.max(r0_gap(&m, |cfg| {
                    let y = m.observe(cfg).y;
                    [-c.lambda * c.a_plus * y, c.lambda * c.a_minus * y]
                })?);
            } else {
                gap = gap.max(r0_gap(&m, |cfg| m.declared_r0(cfg))?);
            }
            let (e, d, k) = drift_margin(&Transformed::new(m, 0, 0)?)?;
            excess = excess.max(e);
            decomp = decomp.max(d);
            cases += k;
        }
    }
    Ok(Outcome {
        pass: excess <= 1e-12 && gap <= 1e-12,
        detail: format!(
            "{cases} (model, n, p, k) cases; max(drift - envelope) {excess:.2e}; component sum vs direct residual {decomp:.1e}; max |M0 - Q - R0| {gap:.1e}"
        ),
    })
}

fn criterion4() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut pass = true;
    for n in [256, 1024] {
        let t = Transformed::new(Pattern01::new(n, 0.5)?, 0, 0)?;
        let opts = SummaryOptions {
            samples: 200_000,
            seed: 41,
            ..SummaryOptions::default()
        };
        let s = estimate_residual_summary(&t, 0, &opts)?;
        let b = bound_t23(&s)?;
        let d = conditional_distance(&t, 0, 200_000, 43)?;
        let ok = b.total >= d.distance - 3.0 * d.stderr;
        pass &= ok;
        lines.push(format!(
            "n={n}: bound {:.4} vs W1 {:.5} +- {:.5}",
            b.total, d.distance, d.stderr
        ));
    }
    Ok(Outcome {
        pass,
        detail: lines.join("; "),
    })
}

fn slope<M: PairModel>(make: impl Fn(usize) -> Result<M>, ns: &[usize], samples: usize) -> Result<(f64, String)> {
    let mut pts = Vec::new();
    for &n in ns {
        let t = Transformed::new(make(n)?, 0, 0)?;
        let s = sample_conditional(&t, 0, samples, 1000 + n as u64)?;
        pts.push((n as f64, w1_to_std_normal(&s.coordinate(0))?));
    }
    let fit = rate_regression(&pts)?;
    let series = pts
        .iter()
        .map(|(n, d)| format!("{n}:{d:.4}"))
        .collect::<Vec<_>>()
        .join(" ");
    Ok((fit.slope, series))
}

fn criterion5() -> Result<Outcome> {
    let binary: Vec<usize> = (6..=12).map(|e| 1 << e).collect();
    let graphs = [16, 32, 64, 128];
    let samples = 200_000;
    let runs = [
        ("pattern01", slope(|n| Pattern01::new(n, 0.5), &binary, samples)?),
        ("evenodd11", slope(|n| EvenOdd11::new(n, 0.5), &binary, samples)?),
        ("wedge_edge", slope(|n| WedgeEdge::new(n, 0.5), &graphs, samples)?),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, (s, series)) in &runs {
        let ok = (-0.7..=-0.3).contains(s);
        pass &= ok;
        parts.push(format!("{name} slope {s:.3} [{series}]"));
    }
    Ok(Outcome {
        pass,
        detail: parts.join("; "),
    })
}

fn criterion6() -> Result<Outcome> {
    let samples = 20_000;
    let t = Transformed::new(TriangleWedge::new(64, 0.5)?, DEFAULT_SIGMA_SAMPLES, 60)?;
    let s = sample_conditional(&t, 0, samples, 61)?;
    let d = sliced_w1_to_std_normal(&s.values, 2, 64, 61)?;
    let mut rng = substream(62, 0);
    let reference: Vec<[f64; 2]> = (0..samples)
        .map(|_| [StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)])
        .collect();
    let r = sliced_w1_to_std_normal(&reference, 2, 64, 61)?;
    let limit = 1.5 * r + 0.05;
    Ok(Outcome {
        pass: d < limit,
        detail: format!("sliced W1 {d:.4} vs limit {limit:.4} (normal reference {r:.4}, {samples} samples)"),
    })
}

fn criterion7() -> Result<Outcome> {
    let c = stein_constants();
    // E|Z| by Simpson on 2 x φ(x) over [0, 40].
    let m = 400_000;
    let h = 40.0 / m as f64;
    let f = |x: f64| 2.0 * x * normal::pdf(x);
    let mut s = f(0.0) + f(40.0);
    for i in 1..m {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let abs_z = s * h / 3.0;
    let c2_ok = c.c2 > 0.96787 && c.c2 < 0.96789;
    let c3_ok = c.c3 > 1.50995 && c.c3 < 1.51001;
    let z_err = (abs_z - (2.0 / PI).sqrt()).abs().max((ABS_Z_MEAN - c.abs_z_mean).abs());
    let q_err = (c.sqrt_pi_over_8_quarter - 0.791_616_743_543_079_8).abs();
    Ok(Outcome {
        pass: c2_ok && c3_ok && z_err <= 1e-12 && q_err <= 1e-12,
        detail: format!(
            "c2 = {:.9} ({}); c3 = {:.9} ({}, window (1.50995, 1.51001)); E|Z| err {z_err:.1e}; (pi/8)^(1/4) err {q_err:.1e}",
            c.c2,
            if c2_ok { "in window" } else { "outside window" },
            c.c3,
            if c3_ok { "in window" } else { "outside" }
        ),
    })
}

fn criterion8() -> Result<Outcome> {
    let point = w1_to_std_normal(&[0.0; 1000])?;
    let point_err = (point - (2.0 / PI).sqrt()).abs();
    let n = 10_000;
    let q: Vec<f64> = (0..n)
        .map(|i| normal::quantile((i as f64 + 0.5) / n as f64))
        .collect();
    let quant = w1_to_std_normal(&q)?;
    let m = Pattern01::new(512, 0.5)?;
    let run = |w: usize| -> Result<String> {
        with_workers(w, || {
            let d = conditional_distance(&m, 0, 20_000, 7)?;
            Ok(serde_json::to_string(&d).expect("serialisable"))
        })
    };
    let (a, b, c) = (run(1)?, run(4)?, run(0)?);
    let identical = a == b && b == c;
    Ok(Outcome {
        pass: point_err <= 1e-6 && quant < 5e-4 && identical,
        detail: format!(
            "point mass err {point_err:.1e}; quantile sample W1 {quant:.2e}; identical bytes across runs and worker counts: {identical}"
        ),
    })
}

fn criterion9() -> Result<Outcome> {
    let law = CountLaw::binomial(100, 0.5);
    let llt = llt_check(&law);
    let exact = (1.0 - law.ratio(0).expect("in support")).abs();
    let ratio_ok = (exact - 1.0 / 51.0).abs() < 1e-14;
    let literal = llt_ratio_bound(llt.eps_y, 0, llt.sigma)?;
    let envelope = llt_ratio_envelope(llt.eps_y, 0, llt.sigma)?;
    let implied = exact / envelope;
    Ok(Outcome {
        pass: ratio_ok && envelope >= exact && implied <= 4.0,
        detail: format!(
            "eps_Y = {:.6e} at y = {}; |1 - r_0| = {exact:.6} (1/51: {ratio_ok}); envelope with |k| floored at 1: {envelope:.6}, implied constant {implied:.3}; literal k = 0 envelope {literal:.6e}, implied constant {:.1}",
            llt.eps_y,
            llt.argmax_y,
            exact / literal
        ),
    })
}

fn main() {
    type Check = fn() -> Result<Outcome>;
    let checks: [(u32, &str, Check); 9] = [
        (1, "pattern01 conditional mean and variance", criterion1),
        (2, "graph identities and subgraph decomposition", criterion2),
        (3, "assumption verification by enumeration", criterion3),
        (4, "bound dominates distance for pattern01", criterion4),
        (5, "rate bands", criterion5),
        (6, "triangle-wedge sliced distance", criterion6),
        (7, "constants", criterion7),
        (8, "estimator calibration and determinism", criterion8),
        (9, "local limit machinery", criterion9),
    ];
    let mut failed = Vec::new();
    for (id, title, f) in checks {
        let t = Instant::now();
        if !report(id, title, t, f()) {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: {} of 9 criteria fail: {failed:?}", failed.len());
        std::process::exit(1);
    }
}
