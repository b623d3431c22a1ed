//! Flag set shared by every subcommand, plus the `key=value` config file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransformMode {
    /// Change of variable for split-case models only.
    Auto,
    On,
    Off,
}

/// Every option is optional on the command line so that the config file can
/// fill the gaps; [`Settings::resolve`] applies defaults last.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// Flat `key=value` file using the flag names; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// pattern01, evenodd11, toy, urn, darts, multi-darts, wedge-edge, triangle-wedge.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Site probability; `decompose` also takes a fraction such as `1/3`.
    #[arg(long)]
    pub p: Option<String>,
    /// Second urn probability.
    #[arg(long)]
    pub p2: Option<f64>,
    /// Perturbation amplitude of the toy model.
    #[arg(long)]
    pub amp: Option<f64>,
    /// Integer offset on the lattice of `Y`.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Conditioned samples; 0 asks `bound` for exact enumeration.
    #[arg(long)]
    pub samples: Option<usize>,
    /// t11, t21, l22, t23, l51, t31-4mom, t31-3mom.
    #[arg(long)]
    pub theorem: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Comma-separated sizes for `rate`.
    #[arg(long)]
    pub ns: Option<String>,
    #[arg(long, value_enum)]
    pub transform: Option<TransformMode>,
    /// Unconditional draws for a Monte Carlo scale of the transformed statistic.
    #[arg(long)]
    pub sigma_samples: Option<usize>,
    /// Subgraph for `decompose`: triangle, wedge, k4, p4, c4 or an edge list `0-1,1-2`.
    #[arg(long)]
    pub pattern: Option<String>,
    /// Universal constant used in the local limit bound.
    #[arg(long)]
    pub llt_c: Option<f64>,
}

const KEYS: &[&str] = &[
    "model", "n", "p", "p2", "amp", "k", "seed", "samples", "theorem", "out", "format", "workers",
    "ns", "transform", "sigma-samples", "pattern", "llt-c",
];

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| anyhow!("config key `{key}`: cannot parse `{v}`: {e}"))
}

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> Result<T> {
    T::from_str(v, true).map_err(|e| anyhow!("config key `{key}`: {e}"))
}

impl Flags {
    /// Fill unset flags from the config file, if one was given.
    pub fn merge_config(&mut self) -> Result<()> {
        let Some(path) = self.config.clone() else {
            return Ok(());
        };
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        for (key, v) in parse_config(&text)? {
            let v = v.as_str();
            match key.as_str() {
                "model" => fill(&mut self.model, || Ok(v.to_string()))?,
                "n" => fill(&mut self.n, || parse(&key, v))?,
                "p" => fill(&mut self.p, || Ok(v.to_string()))?,
                "p2" => fill(&mut self.p2, || parse(&key, v))?,
                "amp" => fill(&mut self.amp, || parse(&key, v))?,
                "k" => fill(&mut self.k, || parse(&key, v))?,
                "seed" => fill(&mut self.seed, || parse(&key, v))?,
                "samples" => fill(&mut self.samples, || parse(&key, v))?,
                "theorem" => fill(&mut self.theorem, || Ok(v.to_string()))?,
                "out" => fill(&mut self.out, || Ok(PathBuf::from(v)))?,
                "format" => fill(&mut self.format, || parse_enum(&key, v))?,
                "workers" => fill(&mut self.workers, || parse(&key, v))?,
                "ns" => fill(&mut self.ns, || Ok(v.to_string()))?,
                "transform" => fill(&mut self.transform, || parse_enum(&key, v))?,
                "sigma-samples" => fill(&mut self.sigma_samples, || parse(&key, v))?,
                "pattern" => fill(&mut self.pattern, || Ok(v.to_string()))?,
                "llt-c" => fill(&mut self.llt_c, || parse(&key, v))?,
                _ => unreachable!("keys are checked by parse_config"),
            }
        }
        Ok(())
    }
}

fn fill<T>(slot: &mut Option<T>, value: impl FnOnce() -> Result<T>) -> Result<()> {
    if slot.is_none() {
        *slot = Some(value()?);
    }
    Ok(())
}

/// `key=value` per line; blank lines and `#` comments are skipped, and
/// underscores in keys are read as hyphens.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected key=value, got `{line}`", i + 1))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            bail!("config line {}: unknown key `{key}`", i + 1);
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            bail!("config line {}: key `{key}` given twice", i + 1);
        }
    }
    Ok(out)
}

/// Flags after merging and defaults.
#[derive(Clone, Debug)]
pub struct Settings {
    pub model: Option<String>,
    pub n: Option<usize>,
    pub p_text: String,
    pub p: f64,
    pub p2: f64,
    pub amp: f64,
    pub k: i64,
    pub seed: u64,
    pub samples: usize,
    pub theorem: Option<String>,
    pub out: PathBuf,
    pub format: Format,
    pub workers: usize,
    pub ns: Vec<usize>,
    pub transform: TransformMode,
    pub sigma_samples: usize,
    pub pattern: String,
    pub llt_c: f64,
}

/// Decimal or `a/b`.
pub fn parse_probability(s: &str) -> Result<f64> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().with_context(|| format!("bad numerator in `{s}`"))?;
            let b: f64 = b.trim().parse().with_context(|| format!("bad denominator in `{s}`"))?;
            a / b
        }
        None => s.trim().parse().with_context(|| format!("bad probability `{s}`"))?,
    };
    if !(v > 0.0 && v < 1.0) {
        bail!("p = {s} must lie strictly between 0 and 1");
    }
    Ok(v)
}

impl Settings {
    /// `default_format` differs per subcommand: reports are JSON, tables CSV.
    pub fn resolve(f: &Flags, default_format: Format) -> Result<Self> {
        let p_text = f.p.clone().unwrap_or_else(|| "0.5".into());
        let ns = match &f.ns {
            Some(s) => s
                .split(',')
                .map(|t| parse::<usize>("ns", t.trim()))
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        Ok(Settings {
            model: f.model.clone(),
            n: f.n,
            p: parse_probability(&p_text)?,
            p_text,
            p2: f.p2.unwrap_or(0.3),
            amp: f.amp.unwrap_or(0.5),
            k: f.k.unwrap_or(0),
            seed: f.seed.unwrap_or(1),
            samples: f.samples.unwrap_or(20_000),
            theorem: f.theorem.clone(),
            out: f.out.clone().unwrap_or_else(|| PathBuf::from("cclt-out")),
            format: f.format.unwrap_or(default_format),
            workers: f.workers.unwrap_or(0),
            ns,
            transform: f.transform.unwrap_or(TransformMode::Auto),
            sigma_samples: f.sigma_samples.unwrap_or(cclt::transform::DEFAULT_SIGMA_SAMPLES),
            pattern: f.pattern.clone().unwrap_or_else(|| "triangle".into()),
            llt_c: f.llt_c.unwrap_or(1.0),
        })
    }

    pub fn model(&self) -> Result<&str> {
        self.model.as_deref().ok_or_else(|| anyhow!("missing --model"))
    }

    pub fn n(&self) -> Result<usize> {
        self.n.ok_or_else(|| anyhow!("missing --n"))
    }

    /// Resolved settings as `key=value` lines for the manifest.
    pub fn echo(&self) -> Vec<(String, String)> {
        let opt = |v: &Option<String>| v.clone().unwrap_or_default();
        vec![
            ("model".into(), opt(&self.model)),
            ("n".into(), self.n.map(|n| n.to_string()).unwrap_or_default()),
            ("p".into(), self.p_text.clone()),
            ("p2".into(), self.p2.to_string()),
            ("amp".into(), self.amp.to_string()),
            ("k".into(), self.k.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("samples".into(), self.samples.to_string()),
            ("theorem".into(), opt(&self.theorem)),
            ("out".into(), self.out.display().to_string()),
            ("format".into(), format!("{:?}", self.format).to_lowercase()),
            ("workers".into(), self.workers.to_string()),
            (
                "ns".into(),
                self.ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
            ),
            ("transform".into(), format!("{:?}", self.transform).to_lowercase()),
            ("sigma-samples".into(), self.sigma_samples.to_string()),
            ("pattern".into(), self.pattern.clone()),
            ("llt-c".into(), self.llt_c.to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let m = parse_config("# run\nmodel = pattern01\nsigma_samples=10\n\nk=-2\n").unwrap();
        assert_eq!(m["model"], "pattern01");
        assert_eq!(m["sigma-samples"], "10");
        assert_eq!(m["k"], "-2");
        assert!(parse_config("colour=red").unwrap_err().to_string().contains("colour"));
        assert!(parse_config("n=1\nn=2").is_err());
        assert!(parse_config("just words").is_err());
    }

    #[test]
    fn probabilities() {
        assert_eq!(parse_probability("1/4").unwrap(), 0.25);
        assert_eq!(parse_probability("0.3").unwrap(), 0.3);
        assert!(parse_probability("1.5").is_err());
    }
}
