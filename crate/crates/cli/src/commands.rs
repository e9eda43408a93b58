//! One function per subcommand; each returns the report it would print.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use coherence_core::{
    build_figure_one, build_figure_two, coherence_measure, compare_general_with, compare_pair,
    decide_expansion, load_distribution, max_coherence_posterior, posterior_confidence, BayesNet,
    Criterion, Evidence, ExpansionMode, FigureSpec, JointDistribution, ReliabilityParams,
    WeightVector,
};

use crate::report::{Measure, RunReport};

const RELAXED_WARNING: &str =
    "closed-form shortcut unavailable (per-source reliabilities, extra edges or shared sources); values are network read-offs";

/// `--x`, or `--p` with `--q`. Clap enforces that the two forms exclude
/// each other; whether one is required depends on the subcommand.
#[derive(Debug, Clone, Copy, Default)]
pub struct Reliability {
    pub x: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
}

impl Reliability {
    /// The likelihood ratio, validating `(p, q)` when given that way.
    fn ratio(&self) -> Result<Option<f64>> {
        match (self.x, self.p, self.q) {
            (Some(x), None, None) => Ok(Some(x)),
            (None, Some(p), Some(q)) => Ok(Some(ReliabilityParams::new(p, q)?.likelihood_ratio())),
            (None, None, None) => Ok(None),
            _ => bail!("give either --x or both --p and --q"),
        }
    }

    fn record(&self, report: &mut RunReport, x: f64) {
        if let (Some(p), Some(q)) = (self.p, self.q) {
            report.number("p", p);
            report.number("q", q);
        }
        report.number("x", x);
        report.number("r", 1.0 - x);
    }
}

fn read_input(report: &mut RunReport, path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    report.input(&path.display().to_string(), &bytes);
    String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
}

fn read_distribution(report: &mut RunReport, path: &Path) -> Result<JointDistribution<f64>> {
    let text = read_input(report, path)?;
    load_distribution(&text).with_context(|| format!("loading distribution {}", path.display()))
}

pub fn coherence(
    mut report: RunReport,
    file: &Path,
    reliability: Reliability,
) -> Result<RunReport> {
    let x = reliability
        .ratio()?
        .ok_or_else(|| anyhow!("give either --x or both --p and --q"))?;
    let w = read_distribution(&mut report, file)?.weight_vector();
    let c = coherence_measure(&w, &x)?;
    report.measure("n", Measure::Count(w.n()));
    report.measure("a", Measure::Vector(w.coefficients().to_vec()));
    report.number("a0", *w.a0());
    reliability.record(&mut report, x);
    report.number("posterior", posterior_confidence(&w, &x)?);
    report.number("max_posterior", max_coherence_posterior(w.a0(), w.n(), &x)?);
    report.number("coherence", c.c);
    Ok(report)
}

pub fn order(
    mut report: RunReport,
    first: &Path,
    second: &Path,
    resolution: Option<usize>,
) -> Result<RunReport> {
    let a = read_distribution(&mut report, first)?.weight_vector();
    let b = read_distribution(&mut report, second)?.weight_vector();
    if a.n() != b.n() {
        bail!(coherence_core::Error::SizeMismatch(a.n(), b.n()));
    }
    let verdict = if a.n() == 2 {
        if resolution.is_some() {
            report.warn("--probe-resolution ignored: the pair criterion is exact for n = 2");
        }
        compare_pair(&a, &b)?
    } else {
        compare_general_with(
            &a,
            &b,
            resolution.unwrap_or(coherence_core::coherence::DEFAULT_PROBE_RESOLUTION),
        )?
    };
    report.measure("n", Measure::Count(a.n()));
    report.measure("a_first", Measure::Vector(a.coefficients().to_vec()));
    report.measure("a_second", Measure::Vector(b.coefficients().to_vec()));
    report.verdict("relation", verdict.relation);
    report.verdict("criterion", verdict.criterion);
    if verdict.criterion == Criterion::GridProbe {
        let res = resolution.unwrap_or(coherence_core::coherence::DEFAULT_PROBE_RESOLUTION);
        report.warn(format!(
            "grid-probe verdict is evidence only, not a proof: sufficient condition did not fire, \
             sign checked at {res} points"
        ));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fixed,
    Averaged,
}

pub fn expand(
    mut report: RunReport,
    file: &Path,
    mode: Mode,
    reliability: Reliability,
    threshold: f64,
) -> Result<RunReport> {
    let x = reliability.ratio()?;
    let mode = match (mode, x) {
        (Mode::Fixed, Some(x)) => ExpansionMode::FixedX(x),
        (Mode::Fixed, None) => bail!("--mode fixed requires --x or --p/--q"),
        (Mode::Averaged, Some(_)) => {
            report.warn("reliability flags ignored in averaged mode");
            ExpansionMode::Averaged
        }
        (Mode::Averaged, None) => ExpansionMode::Averaged,
    };
    let joint = read_distribution(&mut report, file)?;
    if joint.n() < 2 {
        bail!(
            "expansion needs a joint over at least two variables, got {}",
            joint.n()
        );
    }
    let old: WeightVector<f64> = joint.marginal_prefix(joint.n() - 1)?.weight_vector();
    let new = joint.weight_vector();
    let verdict = decide_expansion(&old, &new, mode, threshold)?;

    report.measure("n", Measure::Count(old.n()));
    report.measure("a_old", Measure::Vector(old.coefficients().to_vec()));
    report.measure("a_new", Measure::Vector(new.coefficients().to_vec()));
    report.measure("mode", Measure::Text(mode.to_string()));
    if let ExpansionMode::FixedX(x) = mode {
        reliability.record(&mut report, x);
    }
    report.number("e_old", verdict.value_old);
    report.number("e_new", verdict.value_new);
    report.number("threshold", threshold);
    report.verdict(
        "expansion",
        if verdict.accept { "accept" } else { "reject" },
    );
    report.verdict("threshold_met", verdict.threshold_met);
    Ok(report)
}

/// Parses one `--d-sep` value: `X|Y|Z`, or `X Y Z` separated by
/// whitespace. Each part is a comma-separated list; `Z` may be empty or `-`.
pub fn parse_dsep(value: &str) -> Result<[Vec<String>; 3]> {
    let parts: Vec<&str> = if value.contains('|') {
        value.split('|').collect()
    } else {
        value.split_whitespace().collect()
    };
    if parts.len() != 3 {
        bail!("--d-sep expects X|Y|Z (comma-separated lists), got {value:?}");
    }
    let list = |s: &str| -> Vec<String> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty() && *t != "-")
            .map(str::to_string)
            .collect()
    };
    let sets = [list(parts[0]), list(parts[1]), list(parts[2])];
    if sets[0].is_empty() || sets[1].is_empty() {
        bail!("--d-sep needs non-empty X and Y, got {value:?}");
    }
    Ok(sets)
}

pub fn bn(
    mut report: RunReport,
    network: &Path,
    evidence: Option<&Path>,
    query: Option<&str>,
    dseps: &[String],
) -> Result<RunReport> {
    if query.is_none() && dseps.is_empty() {
        bail!("nothing to do: give --query and/or --d-sep");
    }
    let text = read_input(&mut report, network)?;
    let net = BayesNet::<f64>::from_json(&text)
        .with_context(|| format!("loading network {}", network.display()))?;
    let evidence = match evidence {
        Some(path) => {
            let text = read_input(&mut report, path)?;
            Evidence::from_json(&text)
                .with_context(|| format!("loading evidence {}", path.display()))?
        }
        None => Evidence::new(),
    };
    report.measure("nodes", Measure::Count(net.len()));
    report.measure("observed", Measure::Count(evidence.len()));
    if let Some(q) = query {
        let given: Vec<String> = evidence
            .iter()
            .map(|(k, v)| format!("{k}={}", if v { "T" } else { "F" }))
            .collect();
        let p = net.posterior(q, &evidence)?;
        report.number(&format!("P({q}=T | {})", given.join(",")), p);
    }
    for value in dseps {
        let [xs, ys, zs] = parse_dsep(value)?;
        let sep = net.d_separated(&refs(&xs), &refs(&ys), &refs(&zs))?;
        report.verdict(
            &format!("{} _|_ {} | {}", xs.join(","), ys.join(","), zs.join(",")),
            if sep { "d-separated" } else { "d-connected" },
        );
    }
    Ok(report)
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    One,
    Two,
}

fn emit(report: &mut RunReport, net: &BayesNet<f64>, path: Option<&Path>) -> Result<()> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(&net.to_json())? + "\n";
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        report.measure("emitted", Measure::Text(path.display().to_string()));
    }
    Ok(())
}

pub fn figure(
    mut report: RunReport,
    which: Figure,
    spec_path: &Path,
    threshold: f64,
    emit_path: Option<&Path>,
) -> Result<RunReport> {
    let text = read_input(&mut report, spec_path)?;
    let spec = FigureSpec::<f64>::from_json(&text)
        .with_context(|| format!("loading spec {}", spec_path.display()))?;
    let ratio = spec.likelihood_ratio();
    if ratio.is_none() {
        report.warn(RELAXED_WARNING);
    }
    match which {
        Figure::One => {
            let fig = build_figure_one(&spec)?;
            report.measure("n", Measure::Count(fig.n));
            report.measure("nodes", Measure::Count(fig.net.len()));
            report.number("posterior", fig.posterior_confidence()?);
            report.number("max_posterior", fig.max_coherence_posterior()?);
            report.number("coherence", fig.coherence()?);
            if let Some(x) = ratio {
                report.number("x", x);
                let closed = coherence_measure(&spec.distribution.weight_vector(), &x)?;
                report.number("coherence_closed_form", closed.c);
            }
            emit(&mut report, &fig.net, emit_path)?;
        }
        Figure::Two => {
            let fig = build_figure_two(&spec)?;
            let verdict = fig.decide(threshold)?;
            report.measure("n", Measure::Count(fig.n));
            report.measure("nodes", Measure::Count(fig.net.len()));
            if let Some(x) = ratio {
                report.number("x", x);
            }
            report.number("e_old", verdict.value_old);
            report.number("e_new", verdict.value_new);
            report.number("threshold", threshold);
            report.verdict(
                "expansion",
                if verdict.accept { "accept" } else { "reject" },
            );
            report.verdict("threshold_met", verdict.threshold_met);
            emit(&mut report, &fig.net, emit_path)?;
        }
    }
    Ok(report)
}
