use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Result};
use serde_json::{json, Value};

use cclt::bounds::{
    bound_l22, bound_l51, bound_t11_conditional, bound_t16_llt, bound_t21, bound_t23, bound_t31,
    llt_ratio_bound, llt_ratio_envelope, LltInputs, T31Variant,
};
use cclt::core::{diag2, PairCase};
use cclt::empirics::{conditional_distance, llt_check, rate_regression, DistanceReport};
use cclt::models::{
    Darts, EvenOdd11, MultiDarts, Pattern01, ScoreTable, SubgraphModel, SubgraphSpec, Toy,
    TriangleWedge, Urn, WedgeEdge,
};
use cclt::moments::{
    estimate_residual_summary, exact_moments, exact_residual_summary, SummaryOptions,
};
use cclt::oracle::{exact_decomposition_check, pattern01_table, wedge_table, Fraction};
use cclt::transform::{symmetrised_drift_check, Transformed};
use cclt::{BoundReport, CountLaw, Error, PairModel, ResidualSummary, TheoremTag};

use crate::config::{Settings, TransformMode};
use crate::output::{num, opt_num, Artifact, Table};

pub const MODELS: &[&str] = &[
    "pattern01",
    "evenodd11",
    "toy",
    "urn",
    "darts",
    "multi-darts",
    "wedge-edge",
    "triangle-wedge",
];

pub const DISTANCE_COLUMNS: &[&str] = &[
    "model",
    "n",
    "k",
    "samples",
    "distance",
    "stderr",
    "bound_total",
    "seed",
];

/// Work that is generic over the model type.
pub trait ModelTask {
    type Out;
    fn run<M: PairModel + Clone>(self, m: M) -> Result<Self::Out>;
}

fn canonical(name: &str) -> String {
    name.trim().to_ascii_lowercase().replace('_', "-")
}

/// Build the named model at size `n` and hand it to `task`, wrapped in the
/// change of variable when `transform` says so.
pub fn with_model<T: ModelTask>(s: &Settings, n: usize, transform: bool, task: T) -> Result<T::Out> {
    macro_rules! go {
        ($m:expr) => {{
            let m = $m?;
            let wrap = match s.transform {
                TransformMode::On => true,
                TransformMode::Off => false,
                TransformMode::Auto => m.contract().case == PairCase::Split,
            };
            if transform && wrap {
                task.run(Transformed::new(m, s.sigma_samples, s.seed)?)
            } else {
                task.run(m)
            }
        }};
    }
    let p = s.p;
    match canonical(s.model()?).as_str() {
        "pattern01" => go!(Pattern01::new(n, p)),
        "evenodd11" => go!(EvenOdd11::new(n, p)),
        "toy" => go!(Toy::alternating(n, p, s.amp)),
        "urn" => go!(Urn::new(n, p, s.p2)),
        "darts" => go!(Darts::new(n, p, ScoreTable::half_split(p))),
        "multi-darts" | "multidarts" => go!(MultiDarts::new(n)),
        "wedge-edge" | "wedge" => go!(WedgeEdge::new(n, p)),
        "triangle-wedge" | "triangle" => go!(TriangleWedge::new(n, p)),
        other => Err(anyhow!(
            "{}; known models: {}",
            Error::UnknownModel(other.to_string()),
            MODELS.join(", ")
        )),
    }
}

pub fn parse_theorem(s: &str) -> Result<TheoremTag> {
    TheoremTag::parse(s).ok_or_else(|| {
        anyhow!("unknown theorem `{s}`; expected t11, t21, l22, t23, l51, t31-4mom or t31-3mom")
    })
}

fn default_theorem<M: PairModel>(m: &M) -> TheoremTag {
    match (m.contract().case, m.dim()) {
        (PairCase::Stay { .. }, _) => TheoremTag::T11,
        (_, 2) => TheoremTag::T31Fourth,
        _ => TheoremTag::T23,
    }
}

fn evaluate(tag: TheoremTag, s: &ResidualSummary) -> Result<BoundReport> {
    let unit = diag2(1.0, if s.dim == 2 { 1.0 } else { 0.0 });
    let mut r = match tag {
        TheoremTag::T11 => bound_t11_conditional(s)?,
        TheoremTag::T21 => bound_t21(s, false)?,
        TheoremTag::L22 => bound_l22(s)?,
        TheoremTag::T23 => bound_t23(s)?,
        TheoremTag::L51 => bound_l51(s, s.dim as f64)?,
        TheoremTag::T31Fourth | TheoremTag::T31Third => {
            let v = if tag == TheoremTag::T31Fourth {
                T31Variant::Fourth
            } else {
                T31Variant::Third
            };
            bound_t31(s, &unit, v)?
        }
        TheoremTag::T13 | TheoremTag::T16 => bail!(
            "theorem {tag:?} is not available from a conditional summary; use `llt` for the local limit bound"
        ),
    };
    if matches!(tag, TheoremTag::T31Fourth | TheoremTag::T31Third) {
        r.caveats
            .push("Sigma taken as the identity of the unit-variance coordinates".into());
    }
    Ok(r)
}

fn summary<M: PairModel>(m: &M, k: i64, samples: usize, seed: u64) -> Result<ResidualSummary> {
    Ok(if samples == 0 {
        exact_residual_summary(m, k, Some(8.0))?
    } else {
        estimate_residual_summary(
            m,
            k,
            &SummaryOptions {
                samples,
                unconditional: samples,
                seed,
                holder_p: Some(8.0),
            },
        )?
    })
}

struct DistanceTask {
    k: i64,
    samples: usize,
    seed: u64,
    theorem: Option<String>,
}

impl ModelTask for DistanceTask {
    type Out = (DistanceReport, Option<BoundReport>);

    fn run<M: PairModel + Clone>(self, m: M) -> Result<Self::Out> {
        if self.samples == 0 {
            bail!("--samples must be positive for a distance estimate");
        }
        let d = conditional_distance(&m, self.k, self.samples, self.seed)?;
        let b = match &self.theorem {
            Some(t) => {
                let s = summary(&m, self.k, self.samples, self.seed)?;
                Some(evaluate(parse_theorem(t)?, &s)?)
            }
            None => None,
        };
        Ok((d, b))
    }
}

fn distance_row(s: &Settings, n: usize, d: &DistanceReport, b: Option<&BoundReport>) -> Vec<Value> {
    vec![
        Value::from(canonical(s.model.as_deref().unwrap_or_default())),
        Value::from(n),
        Value::from(d.k),
        Value::from(d.samples),
        num(d.distance),
        num(d.stderr),
        opt_num(b.map(|b| b.total)),
        Value::from(s.seed),
    ]
}

pub fn distance(s: &Settings) -> Result<Artifact> {
    let n = s.n()?;
    let task = DistanceTask {
        k: s.k,
        samples: s.samples,
        seed: s.seed,
        theorem: s.theorem.clone(),
    };
    let (d, b) = with_model(s, n, true, task)?;
    let mut t = Table::new(DISTANCE_COLUMNS);
    t.push(distance_row(s, n, &d, b.as_ref()));
    let mut a = Artifact {
        table: Some(t),
        ..Default::default()
    };
    a.summary.push(("acceptance".into(), format!("{:.6}", d.acceptance)));
    if let Some(b) = b {
        a.summary.push(("bound".into(), format!("{:?} {}", b.theorem, b.total)));
        a.document = Some(json!({ "bound": b.to_json() }));
    }
    Ok(a)
}

pub fn rate(s: &Settings) -> Result<Artifact> {
    if s.ns.len() < 4 {
        bail!("--ns needs at least 4 sizes for a rate fit, got {}", s.ns.len());
    }
    let mut t = Table::new(DISTANCE_COLUMNS);
    let mut points = Vec::new();
    for &n in &s.ns {
        let task = DistanceTask {
            k: s.k,
            samples: s.samples,
            seed: s.seed,
            theorem: s.theorem.clone(),
        };
        let (d, b) = with_model(s, n, true, task)?;
        points.push((n as f64, d.distance));
        t.push(distance_row(s, n, &d, b.as_ref()));
    }
    let fit = rate_regression(&points)?;
    Ok(Artifact {
        table: Some(t),
        document: Some(json!({ "fit": fit })),
        summary: vec![
            ("slope".into(), format!("{:.6}", fit.slope)),
            ("slope_stderr".into(), format!("{:.6}", fit.slope_stderr)),
            ("intercept".into(), format!("{:.6}", fit.intercept)),
        ],
    })
}

struct BoundTask {
    k: i64,
    samples: usize,
    seed: u64,
    theorem: Option<String>,
}

impl ModelTask for BoundTask {
    type Out = (BoundReport, ResidualSummary);

    fn run<M: PairModel + Clone>(self, m: M) -> Result<Self::Out> {
        let tag = match &self.theorem {
            Some(t) => parse_theorem(t)?,
            None => default_theorem(&m),
        };
        let s = summary(&m, self.k, self.samples, self.seed)?;
        Ok((evaluate(tag, &s)?, s))
    }
}

pub fn bound(s: &Settings) -> Result<Artifact> {
    let n = s.n()?;
    let task = BoundTask {
        k: s.k,
        samples: s.samples,
        seed: s.seed,
        theorem: s.theorem.clone(),
    };
    let (b, summary) = with_model(s, n, true, task)?;
    let mut doc = b.to_json();
    doc["run"] = json!({
        "model": canonical(s.model()?),
        "n": n,
        "k": s.k,
        "p": s.p,
        "samples": s.samples,
        "seed": s.seed,
        "source": if s.samples == 0 { "enumeration" } else { "monte-carlo" },
    });
    doc["summary"] = serde_json::to_value(&summary)?;
    let mut table = Table::new(&["term", "value"]);
    for (name, v) in &b.terms {
        table.push(vec![Value::from(name.as_str()), num(*v)]);
    }
    table.push(vec![Value::from("total"), num(b.total)]);
    let mut a = Artifact {
        summary: vec![("total".into(), b.total.to_string())],
        ..Default::default()
    };
    if s.format == crate::config::Format::Csv {
        a.table = Some(table);
    }
    a.document = Some(doc);
    Ok(a)
}

struct VerifyTask {
    sigma_samples: usize,
    seed: u64,
}

impl ModelTask for VerifyTask {
    type Out = Table;

    fn run<M: PairModel + Clone>(self, m: M) -> Result<Table> {
        if m.contract().case != PairCase::Split || m.dim() != 1 {
            bail!(
                "verify-assumptions covers one-dimensional split-case models; `{}` is not one",
                m.name()
            );
        }
        let q = m.constants().q;
        let law = m.count_law().clone();
        let mut r0_gap = vec![0.0f64; law.pmf.len()];
        m.for_each_config(&mut |_, cfg| {
            let e = exact_moments(&m, cfg);
            let d = m.declared_r0(cfg);
            let g = &mut r0_gap[m.count(cfg)];
            *g = g.max((e.m0_plus - q - d[0]).abs()).max((e.m0_minus - q - d[1]).abs());
        })?;
        let t = Transformed::new(m, self.sigma_samples, self.seed)?;
        let mut table = Table::new(&[
            "k",
            "prob",
            "drift",
            "envelope",
            "within_envelope",
            "decomposition_error",
            "r0_error",
        ]);
        let base = law.base_count();
        for (c, &pr) in law.pmf.iter().enumerate() {
            if pr <= 0.0 {
                continue;
            }
            let k = c as i64 - base;
            let d = symmetrised_drift_check(&t, k)?;
            table.push(vec![
                Value::from(k),
                num(pr),
                num(d.drift),
                num(d.envelope),
                Value::from(d.drift <= d.envelope + 1e-12),
                num(d.max_decomposition_error),
                num(r0_gap[c]),
            ]);
        }
        Ok(table)
    }
}

pub fn verify_assumptions(s: &Settings) -> Result<Artifact> {
    let table = with_model(
        s,
        s.n()?,
        false,
        VerifyTask {
            sigma_samples: s.sigma_samples,
            seed: s.seed,
        },
    )?;
    let all = table.rows.iter().all(|r| r[4] == Value::Bool(true));
    let r0 = table
        .rows
        .iter()
        .filter_map(|r| r[6].as_f64())
        .fold(0.0, f64::max);
    Ok(Artifact {
        table: Some(table),
        document: None,
        summary: vec![
            ("drift_within_envelope".into(), all.to_string()),
            ("max_r0_error".into(), format!("{r0:e}")),
        ],
    })
}

pub fn oracle_check(s: &Settings) -> Result<Artifact> {
    let n = s.n()?;
    let name = canonical(s.model()?);
    let rows = match name.as_str() {
        "pattern01" => pattern01_table(n)?,
        "wedge-edge" | "wedge" => wedge_table(n)?,
        other => bail!("oracle-check supports pattern01 and wedge-edge, not `{other}`"),
    };
    let mut t = Table::new(&[
        "model",
        "n",
        "m",
        "exact_mean",
        "formula_mean",
        "abs_error",
        "exact_variance",
        "formula_variance",
    ]);
    let mut max_err: f64 = 0.0;
    for r in &rows {
        let err = (r.exact_mean - r.formula_mean).abs();
        max_err = max_err.max(err);
        t.push(vec![
            Value::from(name.as_str()),
            Value::from(n),
            Value::from(r.count),
            num(r.exact_mean),
            num(r.formula_mean),
            num(err),
            num(r.exact_variance),
            opt_num(r.formula_variance),
        ]);
    }
    Ok(Artifact {
        table: Some(t),
        document: Some(json!({ "max_abs_error": max_err, "p": 0.5 })),
        summary: vec![
            ("max_abs_error".into(), format!("{max_err:e}")),
            ("p".into(), "0.5".into()),
        ],
    })
}

struct LawTask;

impl ModelTask for LawTask {
    type Out = (CountLaw, &'static str);

    fn run<M: PairModel + Clone>(self, m: M) -> Result<Self::Out> {
        Ok((m.count_law().clone(), m.name()))
    }
}

/// Number of Bernoulli trials when `Y` is a centred binomial count.
fn binomial_trials(name: &str, n: usize) -> Option<usize> {
    match name {
        "pattern01" => Some(n),
        "wedge-edge" | "triangle-wedge" => Some(n * (n - 1) / 2),
        _ => None,
    }
}

pub fn llt(s: &Settings) -> Result<Artifact> {
    let n = s.n()?;
    let (law, name) = with_model(s, n, false, LawTask)?;
    let r = llt_check(&law);
    let exact = law.ratio(s.k).map(|v| (1.0 - v).abs());
    let bound = llt_ratio_bound(r.eps_y, s.k, r.sigma)?;
    let envelope = llt_ratio_envelope(r.eps_y, s.k, r.sigma)?;
    let t16 = match binomial_trials(name, n) {
        Some(trials) => Some(bound_t16_llt(&LltInputs::binomial(trials, s.p), s.llt_c)?),
        None => None,
    };
    let mut t = Table::new(&[
        "model",
        "n",
        "p",
        "k",
        "sigma_y",
        "eps_y",
        "argmax_y",
        "ratio_error",
        "ratio_bound",
        "ratio_envelope",
        "llt_bound_total",
    ]);
    t.push(vec![
        Value::from(name),
        Value::from(n),
        num(s.p),
        Value::from(s.k),
        num(r.sigma),
        num(r.eps_y),
        num(r.argmax_y),
        opt_num(exact),
        num(bound),
        num(envelope),
        opt_num(t16.as_ref().map(|b| b.total)),
    ]);
    let mut summary = vec![("eps_y".into(), format!("{:e}", r.eps_y))];
    if let Some(e) = exact {
        summary.push(("implied_constant".into(), format!("{:.6}", e / envelope)));
    }
    Ok(Artifact {
        table: Some(t),
        document: t16.map(|b| json!({ "llt_bound": b.to_json() })),
        summary,
    })
}

/// `a/b`, or a terminating decimal read digit by digit.
fn fraction(text: &str) -> Result<Fraction> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim().parse::<i64>()?, b.trim().parse::<i64>()?),
        None => {
            let (int, frac) = t.split_once('.').unwrap_or((t, ""));
            if frac.len() > 12 {
                bail!("p = {t} has too many decimal digits for an exact check");
            }
            let den = 10i64.pow(frac.len() as u32);
            let whole: i64 = if int.is_empty() { 0 } else { int.parse()? };
            let part: i64 = if frac.is_empty() { 0 } else { frac.parse()? };
            (whole * den + part, den)
        }
    };
    Ok(Fraction::new(num, den)?)
}

pub fn decompose(s: &Settings) -> Result<Artifact> {
    let n = s.n()?;
    let spec = SubgraphSpec::parse(&s.pattern)?;
    let summary = SubgraphModel::new(n, s.p, spec.clone())?.summary();
    let mut doc = BTreeMap::new();
    doc.insert("pattern", json!(s.pattern));
    doc.insert("summary", serde_json::to_value(&summary)?);
    let mut lines = vec![
        ("ext_t".into(), summary.ext_t.to_string()),
        ("ext_u".into(), summary.ext_u.to_string()),
        ("var_residual".into(), summary.var_residual.to_string()),
    ];
    if n <= 7 {
        let c = exact_decomposition_check(n, fraction(&s.p_text)?, &spec)?;
        lines.push(("mean_residual_exact".into(), c.mean_residual_exact.clone()));
        doc.insert("exact", serde_json::to_value(&c)?);
    } else {
        lines.push((
            "exact".into(),
            "skipped: the exact check enumerates graphs on at most 7 vertices".into(),
        ));
    }
    Ok(Artifact {
        table: None,
        document: Some(serde_json::to_value(doc)?),
        summary: lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_fractions() {
        assert_eq!(fraction("0.25").unwrap(), Fraction::new(25, 100).unwrap());
        assert_eq!(fraction("1/3").unwrap(), Fraction::new(1, 3).unwrap());
        assert!(fraction("1.5").is_err());
    }
}
