use coslaw_core::cosine::{CosineFamily, EvalStrategy, SERIES_DOMAIN};
use coslaw_core::discrete::{discrete_verdict, DiscreteCosineSequence};
use coslaw_core::laws::{
    classify_scalar_dichotomy, law_verdict, scaled_gap_witness, scan_with_samples, LawVerdict, LimitPoint, ScanConfig,
    TailEstimate,
};
use coslaw_core::linalg::operator_norm;
use coslaw_core::semigroup::{exp_semigroup_trace, semigroup_verdict, PowerSemigroup, EXP_DOMAIN};
use coslaw_core::sqrt_halving::{doubling_residual, dyadic_reconstruct_with_margin, halve, DEFAULT_MARGIN};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Format};
use crate::format::{csv, float, json_line};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Scan,
    Classify,
    Halve,
    Reconstruct,
    Discrete,
    Semigroup,
    Witness,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Scan => "scan",
            Self::Classify => "classify",
            Self::Halve => "halve",
            Self::Reconstruct => "reconstruct",
            Self::Discrete => "discrete",
            Self::Semigroup => "semigroup",
            Self::Witness => "witness",
        }
    }

    fn default_format(self) -> Format {
        match self {
            Self::Scan | Self::Discrete | Self::Semigroup => Format::Csv,
            _ => Format::Jsonl,
        }
    }
}

/// Result of one command.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Deterministic CSV or JSON-lines text.
    pub payload: String,
    /// One-line human summary.
    pub summary: String,
    /// Structured results for the run report.
    pub result: Value,
    /// Nonzero when the command produced partial output before failing.
    pub exit_code: i32,
}

impl Outcome {
    fn ok(payload: String, summary: String, result: Value) -> Self {
        Self { payload, summary, result, exit_code: 0 }
    }
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let format = cfg.output.format.unwrap_or(command.default_format());
    match command {
        Command::Scan => scan(cfg, format),
        Command::Classify => classify(cfg, format),
        Command::Halve => halve_cmd(cfg, format),
        Command::Reconstruct => reconstruct(cfg, format),
        Command::Discrete => discrete(cfg, format),
        Command::Semigroup => semigroup(cfg, format),
        Command::Witness => witness(cfg, format),
    }
}

fn lines(records: &[Value]) -> String {
    records.iter().map(|r| json_line(r) + "\n").collect()
}

fn estimate_record(est: &TailEstimate) -> Value {
    json!({
        "record": "tail_estimate",
        "limsup": est.limsup_estimate,
        "trend": est.trend,
        "grid_error_bound": est.grid_error_bound,
        "worst_t": est.worst_sample.0,
        "worst_norm": est.worst_sample.1,
        "overflowed_at": est.overflowed_at,
        "windows": est.window_sups.iter().map(|w| [w.start, w.sup, w.at]).collect::<Vec<_>>(),
    })
}

fn verdict_record(v: &LawVerdict) -> Value {
    let mut record = v.record();
    record["record"] = json!("verdict");
    record
}

fn describe(est: &TailEstimate) -> String {
    match est.limsup_estimate.finite() {
        Some(l) => format!("limsup ≈ {} ({:?}, {} windows)", float(l), est.trend, est.window_sups.len()),
        None => format!("overflowed at t = {}", est.overflowed_at.map_or("?".into(), float)),
    }
}

fn describe_verdict(v: &LawVerdict) -> String {
    format!(
        "r = {}: premise {}, conclusion {}",
        v.threshold_r,
        if v.premise_holds { "holds" } else { "fails" },
        if v.conclusion_holds { "holds" } else { "fails" }
    )
}

fn default_scan(family: &CosineFamily) -> ScanConfig {
    match family {
        CosineFamily::Scalar(f) => ScanConfig::scalar_infinity_default(f.a),
        CosineFamily::Matrix(f) => {
            let mut cfg = ScanConfig::periodic_default(family.lipschitz_bound().unwrap_or(f.generator_norm()));
            let reach = SERIES_DOMAIN / f.generator_norm();
            if f.strategy() == EvalStrategy::Series && cfg.t_end > reach {
                cfg.t_end = 0.999 * reach;
                cfg.window_len = cfg.window_len.min(cfg.t_end / 5.0);
            }
            cfg
        }
    }
}

fn scan(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let family = cfg.family()?;
    let scan_cfg = cfg.scan_overrides().apply(default_scan(&family));
    let trace = scan_with_samples(&family, &scan_cfg)?;
    let verdict = cfg.law_r().map(|r| law_verdict(&family, r, trace.estimate.clone(), scan_cfg.tol_zero)).transpose()?;

    let mut records = vec![estimate_record(&trace.estimate)];
    records.extend(verdict.as_ref().map(verdict_record));
    let payload = match format {
        Format::Csv => csv("t,norm", trace.samples.iter().map(|&(t, v)| [float(t), float(v)])),
        Format::Jsonl => lines(&records),
    };
    let mut summary = format!("scan: {} samples, {}", trace.samples.len(), describe(&trace.estimate));
    if let Some(v) = &verdict {
        summary += &format!("; {}", describe_verdict(v));
    }
    Ok(Outcome::ok(payload, summary, Value::Array(records)))
}

fn classify(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let a = match cfg.family()? {
        CosineFamily::Scalar(f) => f.a,
        CosineFamily::Matrix(_) => return Err(CliError::Config("classify needs a scalar family".into())),
    };
    let t0 = cfg.classify.map_or(LimitPoint::Infinity, |c| c.t0);
    let default = match t0 {
        LimitPoint::Infinity => ScanConfig::scalar_infinity_default(a),
        LimitPoint::Zero => ScanConfig::scalar_zero_default(),
    };
    let result = classify_scalar_dichotomy(a, t0, &cfg.scan_overrides().apply(default))?;
    let record = json!({
        "record": "dichotomy",
        "a": [a.re, a.im],
        "t0": result.t0,
        "class": result.class,
        "recovered_a": result.recovered_a,
        "limsup": result.evidence.limsup_estimate,
        "trend": result.evidence.trend,
    });
    let payload = match format {
        Format::Csv => csv("t,norm", result.evidence.window_sups.iter().map(|w| [float(w.at), float(w.sup)])),
        Format::Jsonl => lines(std::slice::from_ref(&record)),
    };
    let summary = format!("classify a = {a} at t0 = {:?}: {:?}, {}", t0, result.class, describe(&result.evidence));
    Ok(Outcome::ok(payload, summary, record))
}

fn halve_cmd(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let section = cfg.section(&cfg.halve, "halve")?;
    let margin = section.margin.unwrap_or(DEFAULT_MARGIN);
    let (c2s, reference) = match (&section.c2s, section.s) {
        (Some(m), s) => {
            let reference = match (s, cfg.family.is_some()) {
                (Some(s), true) => Some(cfg.family()?.eval(s)?),
                _ => None,
            };
            (m.clone(), reference)
        }
        (None, Some(s)) => {
            let family = cfg.family()?;
            (family.eval(2.0 * s)?, Some(family.eval(s)?))
        }
        (None, None) => return Err(CliError::Config("halve needs \"C2s\" or \"s\" with a family".into())),
    };
    let cs = halve(&c2s, margin)?;
    let residual = doubling_residual(&cs, &c2s);
    let error = reference.map(|r| operator_norm(&(&cs - &r)));
    let record = json!({"record": "halve", "Cs": cs, "doubling_residual": residual, "error": error});
    let payload = match format {
        Format::Csv => csv("stage,residual,error", [[1.to_string(), float(residual), error.map_or(String::new(), float)]]),
        Format::Jsonl => lines(std::slice::from_ref(&record)),
    };
    let summary = format!(
        "halve: doubling residual {}{}",
        float(residual),
        error.map_or(String::new(), |e| format!(", error vs family {}", float(e)))
    );
    Ok(Outcome::ok(payload, summary, record))
}

fn reconstruct(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let section = cfg.section(&cfg.reconstruct, "reconstruct")?;
    let family = if cfg.family.is_some() { Some(cfg.family()?) } else { None };
    let c1 = match (&section.c1, &family) {
        (Some(m), _) => m.clone(),
        (None, Some(f)) => f.eval(1.0)?,
        (None, None) => return Err(CliError::Config("reconstruct needs \"C1\" or a family".into())),
    };
    let (stages, failure) = match dyadic_reconstruct_with_margin(&c1, section.depth, section.margin.unwrap_or(DEFAULT_MARGIN))
    {
        Ok(stages) => (stages, None),
        Err(partial) => (partial.stages, Some((partial.failed_stage, partial.error))),
    };

    let mut records = Vec::with_capacity(stages.len() + 1);
    let mut previous = &c1;
    for (j, stage) in stages.iter().enumerate() {
        let s = 0.5f64.powi(j as i32 + 1);
        let error = match &family {
            Some(f) => Some(operator_norm(&(stage - &f.eval(s)?))),
            None => None,
        };
        records.push(json!({
            "record": "stage",
            "stage": j + 1,
            "s": s,
            "residual": doubling_residual(stage, previous),
            "error": error,
            "C": stage,
        }));
        previous = stage;
    }
    if let Some((stage, error)) = &failure {
        records.push(json!({"record": "failure", "stage": stage, "error": error.to_string()}));
    }
    let payload = match format {
        Format::Csv => csv(
            "stage,s,residual,error",
            records.iter().filter(|r| r["record"] == "stage").map(|r| {
                [
                    r["stage"].to_string(),
                    float(r["s"].as_f64().unwrap_or(f64::NAN)),
                    float(r["residual"].as_f64().unwrap_or(f64::NAN)),
                    r["error"].as_f64().map_or(String::new(), float),
                ]
            }),
        ),
        Format::Jsonl => lines(&records),
    };
    let worst = records.iter().filter_map(|r| r["error"].as_f64()).fold(None, |acc: Option<f64>, e| {
        Some(acc.map_or(e, |a| a.max(e)))
    });
    let mut summary = format!("reconstruct: {} of {} stages", stages.len(), section.depth);
    if let Some(w) = worst {
        summary += &format!(", worst stage error {}", float(w));
    }
    let exit_code = match failure {
        Some((stage, error)) => {
            summary += &format!("; stage {stage} failed: {error}");
            CliError::Core(error).exit_code()
        }
        None => 0,
    };
    Ok(Outcome { payload, summary, result: Value::Array(records), exit_code })
}

fn discrete(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let section = cfg.section(&cfg.discrete, "discrete")?;
    let seq = DiscreteCosineSequence::new(section.x.clone())?;
    let trace = seq.norm_trace(section.n)?;
    let verdict = discrete_verdict(&seq, cfg.law_r().unwrap_or(1.5), &trace, section.tol_zero)?;
    let record = verdict_record(&verdict);
    let payload = match format {
        Format::Csv => csv("n,norm", trace.samples.iter().map(|&(n, v)| [n.to_string(), float(v)])),
        Format::Jsonl => lines(std::slice::from_ref(&record)),
    };
    let summary = format!("discrete: N = {}, tail {}; {}", section.n, describe(&verdict.evidence), describe_verdict(&verdict));
    Ok(Outcome::ok(payload, summary, record))
}

fn semigroup(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let section = cfg.section(&cfg.semigroup, "semigroup")?;
    let r = cfg.law_r().unwrap_or(1.0);
    match (&section.t, &section.g) {
        (Some(t), None) => {
            let sg = PowerSemigroup::new(t.clone())?;
            let trace = sg.norm_trace(section.n)?;
            let cesaro = trace.cesaro();
            let verdict = semigroup_verdict(&sg, r, &trace, section.tol_zero)?;
            let mut record = verdict_record(&verdict);
            record["cesaro_liminf"] = json!(cesaro.liminf_estimate);
            let payload = match format {
                Format::Csv => csv(
                    "n,norm,cesaro",
                    trace.samples.iter().zip(&cesaro.averages).map(|(&(n, v), &a)| [n.to_string(), float(v), float(a)]),
                ),
                Format::Jsonl => lines(std::slice::from_ref(&record)),
            };
            let liminf = cesaro.liminf_estimate.finite().map_or("overflowed".into(), float);
            let summary = format!("semigroup: Cesàro liminf {liminf}; {}", describe_verdict(&verdict));
            Ok(Outcome::ok(payload, summary, record))
        }
        (None, Some(g)) => {
            let g_norm = operator_norm(g);
            let horizon = if g_norm > 0.0 { (EXP_DOMAIN / g_norm).min(1e3) } else { 1e3 };
            let scan_cfg = cfg.scan_overrides().apply(ScanConfig::new(0.0, horizon, horizon / 4000.0, horizon / 10.0));
            let (verdict, trace) = exp_semigroup_trace(g, r, &scan_cfg)?;
            let record = verdict_record(&verdict);
            let payload = match format {
                Format::Csv => csv("t,norm", trace.samples.iter().map(|&(t, v)| [float(t), float(v)])),
                Format::Jsonl => lines(std::slice::from_ref(&record)),
            };
            let summary = format!("exp semigroup: {}; {}", describe(&trace.estimate), describe_verdict(&verdict));
            Ok(Outcome::ok(payload, summary, record))
        }
        _ => Err(CliError::Config("semigroup needs exactly one of \"T\" or \"G\"".into())),
    }
}

fn witness(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let section = *cfg.section(&cfg.witness, "witness")?;
    let scan_cfg = cfg.scan_overrides().apply(ScanConfig::witness_default(section.a, section.b));
    let w = scaled_gap_witness(section.a, section.b, &scan_cfg)?;
    let record = json!({"record": "witness", "a": section.a, "b": section.b, "value": w.value, "at": w.at});
    let payload = match format {
        Format::Csv => csv("a,b,value,at", [[float(section.a), float(section.b), float(w.value), float(w.at)]]),
        Format::Jsonl => lines(std::slice::from_ref(&record)),
    };
    let summary = format!(
        "witness: sup |cos({}t) − cos({}t)| = {} at t = {}",
        section.a,
        section.b,
        float(w.value),
        float(w.at)
    );
    Ok(Outcome::ok(payload, summary, record))
}
