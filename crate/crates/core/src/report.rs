//! Batch experiments behind the command line tool: configuration, JSON
//! certificates, CSV tables and exit codes.
//!
//! Exit codes: 0 pass, 1 inconclusive, 2 violation or error.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::automorphism::Automorphism;
use crate::cancellation::{
    certify, check_words, cyclic_words_up_to, labelled_generators, lemma1_constants, sample_cyclic_words,
    CancellationReport, CertifyConfig,
};
use crate::matrix::poly;
use crate::oracle::{build_ball, verify_tau_bounds, BallIndex};
use crate::translen::{
    doubling_violations, lambda_lower_abelian, tau_estimate, witness_pointwise, Method, Status, TauConfig,
    TauEstimate, SLOPE_TOLERANCE,
};
use crate::upg::{exceptional_closed_form, FilteredGraphMap, UpgError};
use crate::word::CyclicWord;
use crate::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// An automorphism given inline as `{"rank", "images"}` or by file path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutInput {
    File { file: PathBuf },
    Inline(Value),
}

impl AutInput {
    pub fn load(&self, base: &Path) -> Result<Automorphism, Error> {
        match self {
            AutInput::File { file } => {
                let path = if file.is_absolute() { file.clone() } else { base.join(file) };
                Automorphism::from_json(&fs::read_to_string(path)?)
            }
            AutInput::Inline(v) => Automorphism::from_json(&v.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rank: usize,
    pub automorphisms: Vec<AutInput>,
    pub k_max: usize,
    pub length_budget: usize,
    pub bcc_depth: usize,
    pub oracle_radius: usize,
    pub node_budget: usize,
    pub workers: usize,
    pub samples: usize,
    pub exhaustive_max_len: usize,
    pub max_len: usize,
    pub seed: u64,
    /// Use this cyclic cancellation constant instead of the computed one.
    pub constant_override: Option<usize>,
    pub upg_fixture: Option<PathBuf>,
    pub upg_iterations: usize,
    /// A certificate written by `tau` to re-check.
    pub certificate: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            rank: 2,
            automorphisms: Vec::new(),
            k_max: 40,
            length_budget: 200_000,
            bcc_depth: 6,
            oracle_radius: 5,
            node_budget: 10_000_000,
            workers: 0,
            samples: 10_000,
            exhaustive_max_len: 8,
            max_len: 40,
            seed: 0,
            constant_override: None,
            upg_fixture: None,
            upg_iterations: 50,
            certificate: None,
            out_dir: None,
            base_dir: PathBuf::from("."),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig, Error> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<ExperimentConfig, Error> {
        let mut cfg = ExperimentConfig::from_json(&fs::read_to_string(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("rank", self.rank),
            ("k_max", self.k_max),
            ("length_budget", self.length_budget),
            ("bcc_depth", self.bcc_depth),
            ("node_budget", self.node_budget),
            ("max_len", self.max_len),
            ("upg_iterations", self.upg_iterations),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.rank < 2 {
            return Err(Error::Config("rank must be at least 2".into()));
        }
        Ok(())
    }

    pub fn tau_config(&self) -> TauConfig {
        TauConfig {
            k_max: self.k_max,
            length_budget: self.length_budget,
            seed: self.seed,
            ..TauConfig::default()
        }
    }

    fn certify_config(&self) -> CertifyConfig {
        CertifyConfig {
            exhaustive_max_len: self.exhaustive_max_len,
            samples: self.samples,
            max_len: self.max_len,
            seed: self.seed,
            max_doublings: 3,
        }
    }

    pub fn load_automorphisms(&self) -> Result<Vec<Automorphism>, Error> {
        let auts = self
            .automorphisms
            .iter()
            .map(|a| a.load(&self.base_dir))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(bad) = auts.iter().find(|a| a.rank() != self.rank) {
            return Err(Error::Config(format!("automorphism of rank {} in a rank {} config", bad.rank(), self.rank)));
        }
        Ok(auts)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

/// Result of one command: the JSON report, files written and exit code.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Value,
    pub files: Vec<PathBuf>,
}

/// Rounds `x` to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with floats rounded, so equal inputs give equal bytes.
pub fn to_stable_json<T: Serialize>(x: &T) -> String {
    let mut v = serde_json::to_value(x).expect("report serializes");
    round_floats(&mut v);
    serde_json::to_string_pretty(&v).expect("value serializes")
}

fn write_out(cfg: &ExperimentConfig, name: &str, body: &str, files: &mut Vec<PathBuf>) -> Result<(), Error> {
    if let Some(dir) = &cfg.out_dir {
        let dir = cfg.resolve(dir);
        fs::create_dir_all(&dir)?;
        let path = dir.join(name);
        fs::write(&path, body)?;
        files.push(path);
    }
    Ok(())
}

/// CSV of `(k, L_k, alpha_tilde_k)`; missing entries are left blank.
pub fn growth_csv(est: &TauEstimate) -> String {
    let lk = est.growth.as_ref().map(|g| g.table.clone()).unwrap_or_default();
    let ak = est.witness.as_ref().map(|w| w.table.clone()).unwrap_or_default();
    let n = lk.len().max(ak.len());
    let mut out = String::from("k,L_k,alpha_tilde_k\n");
    for i in 0..n {
        let k = lk.get(i).map(|r| r.0).or(ak.get(i).map(|r| r.0)).unwrap_or(i as u64 + 1);
        let l = lk.get(i).map_or(String::new(), |r| r.1.to_string());
        let a = ak.get(i).map_or(String::new(), |r| r.1.to_string());
        out.push_str(&format!("{k},{l},{a}\n"));
    }
    out
}

/// Stabilized and certified cancellation constants for the config's rank.
pub fn cancellation_report(cfg: &ExperimentConfig) -> Result<CancellationReport, Error> {
    let mut report = lemma1_constants(cfg.rank, cfg.bcc_depth)?;
    if let Some(c) = cfg.constant_override {
        report.lemma1_cyclic_constant = c;
        return Ok(report);
    }
    certify(&mut report, &cfg.certify_config())?;
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TauItem {
    pub index: usize,
    pub automorphism: Automorphism,
    pub estimate: TauEstimate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TauCertificate {
    pub kind: String,
    pub rank: usize,
    pub tau_config: TauConfig,
    pub cancellation: CancellationReport,
    pub results: Vec<TauItem>,
}

pub fn run_tau(cfg: &ExperimentConfig) -> Result<TauCertificate, Error> {
    let auts = cfg.load_automorphisms()?;
    let report = cancellation_report(cfg)?;
    let tcfg = cfg.tau_config();
    let estimates = auts
        .par_iter()
        .map(|o| tau_estimate(o, &report, &tcfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TauCertificate {
        kind: "tau".into(),
        rank: cfg.rank,
        tau_config: tcfg,
        cancellation: report,
        results: auts
            .into_iter()
            .zip(estimates)
            .enumerate()
            .map(|(index, (automorphism, estimate))| TauItem {
                index,
                automorphism,
                estimate,
            })
            .collect(),
    })
}

/// Runs `tau_estimate` on every input; writes `tau.json` and one CSV per
/// input when `out_dir` is set.
pub fn cmd_tau(cfg: &ExperimentConfig) -> Result<Outcome, Error> {
    let cert = run_tau(cfg)?;
    let mut files = Vec::new();
    let body = to_stable_json(&cert);
    write_out(cfg, "tau.json", &body, &mut files)?;
    for item in &cert.results {
        write_out(cfg, &format!("growth_{}.csv", item.index), &growth_csv(&item.estimate), &mut files)?;
    }
    let inconclusive = cert.results.iter().any(|r| r.estimate.status == Status::Inconclusive);
    Ok(Outcome {
        exit_code: if inconclusive { EXIT_INCONCLUSIVE } else { EXIT_PASS },
        report: serde_json::from_str(&body).expect("round trip"),
        files,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Suite {
    pub name: String,
    pub checks: usize,
    pub violations: usize,
    pub passed: bool,
    pub details: Vec<String>,
}

impl Suite {
    fn new(name: &str, checks: usize, details: Vec<String>) -> Suite {
        Suite {
            name: name.into(),
            checks,
            violations: details.len(),
            passed: details.is_empty(),
            details: details.into_iter().take(10).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub rank: usize,
    pub constant: usize,
    pub suites: Vec<Suite>,
    pub warnings: Vec<String>,
    pub passed: usize,
    pub failed: usize,
}

fn lemma_words(cfg: &ExperimentConfig, exhaustive: usize, samples: usize, max_len: usize, seed: u64) -> Vec<CyclicWord> {
    let mut words = cyclic_words_up_to(cfg.rank, exhaustive);
    words.extend(sample_cyclic_words(cfg.rank, samples, max_len, seed));
    words
}

fn summarize(rank: usize, constant: usize, suites: Vec<Suite>, warnings: Vec<String>) -> Outcome {
    let failed = suites.iter().filter(|s| !s.passed).count();
    let summary = VerifySummary {
        rank,
        constant,
        passed: suites.len() - failed,
        failed,
        suites,
        warnings,
    };
    Outcome {
        exit_code: if failed > 0 { EXIT_VIOLATION } else { EXIT_PASS },
        report: serde_json::from_str(&to_stable_json(&summary)).expect("round trip"),
        files: Vec::new(),
    }
}

/// Cancellation, doubling inequality and oracle checks, or a re-check of
/// `cfg.certificate` when set.
pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<Outcome, Error> {
    if let Some(path) = &cfg.certificate {
        let cert: TauCertificate = serde_json::from_str(&fs::read_to_string(cfg.resolve(path))?)?;
        let mut out = recheck_certificate(&cert)?;
        let mut files = Vec::new();
        write_out(cfg, "verify.json", &serde_json::to_string_pretty(&out.report)?, &mut files)?;
        out.files = files;
        return Ok(out);
    }
    let mut warnings = Vec::new();
    let report = cancellation_report(cfg).or_else(|e| match e {
        // an uncertifiable constant is itself a failing suite below
        Error::Cancellation(_) => lemma1_constants(cfg.rank, cfg.bcc_depth).map_err(Error::from),
        other => Err(other),
    })?;
    let constant = cfg.constant_override.unwrap_or(report.lemma1_cyclic_constant);
    if cfg.samples == 0 {
        warnings.push("empty suite: zero random samples requested".into());
    }
    let words = lemma_words(cfg, cfg.exhaustive_max_len, cfg.samples, cfg.max_len, cfg.seed);
    let gens = labelled_generators(cfg.rank);
    let lemma: Vec<String> = check_words(&gens, &words, constant)
        .into_iter()
        .map(|v| format!("{} on {}: {} -> {} (C = {})", v.generator, v.word, v.before, v.after, v.constant))
        .collect();
    let doubling: Vec<String> = doubling_violations(cfg.rank, &words)
        .into_iter()
        .map(|v| format!("{} on {}: {} -> {}", v.generator, v.word, v.before, v.after))
        .collect();
    let checks = words.len() * gens.len();
    let mut suites = vec![Suite::new("lemma1", checks, lemma), Suite::new("doubling", checks, doubling)];

    let auts = cfg.load_automorphisms()?;
    if !auts.is_empty() {
        let mut report = report;
        report.lemma1_cyclic_constant = constant;
        let ball = build_ball(cfg.rank, cfg.oracle_radius, cfg.node_budget, cfg.workers)?;
        let tcfg = cfg.tau_config();
        let mut details = Vec::new();
        let mut checks = 0;
        for (i, o) in auts.iter().enumerate() {
            let est = tau_estimate(o, &report, &tcfg)?;
            if est.lower > est.upper {
                details.push(format!("input {i}: lower {} > upper {}", est.lower, est.upper));
            }
            let r = verify_tau_bounds(&ball, o, &est, 4 * cfg.oracle_radius.max(1) + 24)?;
            checks += r.checks.len() + 1;
            for c in r.checks.iter().filter(|c| !c.ok) {
                details.push(format!(
                    "input {i}: ||O^{}|| = {} outside [{}, {:?}]",
                    c.k, c.norm, c.required_min, c.allowed_max
                ));
            }
        }
        suites.push(Suite::new("oracle", checks, details));
    } else {
        warnings.push("no automorphisms given: oracle suite skipped".into());
    }
    Ok(summarize(cfg.rank, constant, suites, warnings))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Re-checks a `tau` certificate from its recorded data: the cancellation
/// word set, homology certificates, witness tables and decomposition
/// lengths. No search is repeated.
pub fn recheck_certificate(cert: &TauCertificate) -> Result<Outcome, Error> {
    let rank = cert.rank;
    let c = cert.cancellation.lemma1_cyclic_constant;
    let mut suites = Vec::new();
    let mut warnings = Vec::new();
    match &cert.cancellation.certification {
        Some(lc) => {
            let mut words = cyclic_words_up_to(rank, lc.exhaustive_max_len);
            words.extend(sample_cyclic_words(rank, lc.samples, lc.max_len, lc.seed));
            let details: Vec<String> = check_words(&labelled_generators(rank), &words, lc.constant)
                .into_iter()
                .map(|v| format!("{} on {}", v.generator, v.word))
                .collect();
            let mut details = details;
            if lc.constant != c {
                details.push(format!("certified constant {} differs from {c}", lc.constant));
            }
            let checks = words.len();
            suites.push(Suite::new("lemma1", checks, details));
        }
        None => warnings.push("cancellation constant carries no certification".into()),
    }
    let mut details = Vec::new();
    let mut checks = 0;
    for item in &cert.results {
        let o = item.automorphism.outer_canonical()?.to_automorphism();
        let e = &item.estimate;
        let tag = format!("input {}", item.index);
        checks += 1;
        if e.lower > e.upper {
            details.push(format!("{tag}: lower > upper"));
        }
        match (e.status, e.method) {
            (Status::Inconclusive, _) => {
                if e.lower != 0.0 {
                    details.push(format!("{tag}: inconclusive with positive lower bound"));
                }
            }
            (_, Some(Method::FiniteOrder)) => {
                let p = e.s.unwrap_or(0);
                if p == 0 || !o.power(p).outer_canonical()?.is_identity() || e.lower != 0.0 || e.upper != 0.0 {
                    details.push(format!("{tag}: finite order not confirmed"));
                }
            }
            (_, Some(Method::Case1Exponential)) => {
                let charpoly = o.abelianization_matrix().characteristic_polynomial();
                let cyclotomic = charpoly.map_or(true, |p| poly::is_cyclotomic_product(&p));
                let lambda = lambda_lower_abelian(&o);
                if cyclotomic || !e.lambda.is_some_and(|l| close(l, lambda)) || !close(e.lower, lambda.log2()) {
                    details.push(format!("{tag}: exponential certificate does not re-check"));
                }
            }
            (_, Some(Method::Case2Upg)) => {
                if !recheck_witness(&o, e, c)? {
                    details.push(format!("{tag}: witness certificate does not re-check"));
                }
            }
            (_, None) => details.push(format!("{tag}: certified estimate without a method")),
        }
        if let Some(step) = e.upper_steps.last() {
            checks += 1;
            let pk = o.power(step.k as usize);
            let class = pk.outer_canonical()?;
            let best = class
                .minimal_representatives(crate::translen::UPPER_REPRESENTATIVES)?
                .iter()
                .map(|r| {
                    let d = r.nielsen_decompose()?;
                    let back = d.evaluate(rank)?;
                    Ok::<_, Error>(if back.outer_equal(&pk)? { d.len() } else { usize::MAX })
                })
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .min()
                .unwrap_or(usize::MAX);
            if best as u64 > step.decomposition_length || !close(e.upper, step.ratio) {
                details.push(format!("{tag}: upper bound does not re-check"));
            }
        }
    }
    suites.push(Suite::new("estimates", checks, details));
    Ok(summarize(rank, c, suites, warnings))
}

fn recheck_witness(o: &Automorphism, e: &TauEstimate, c: usize) -> Result<bool, Error> {
    let (Some(s), Some(w), Some(ec)) = (e.s, e.witness.as_ref(), e.constant) else {
        return Ok(false);
    };
    if ec != c || c == 0 || !close(e.lower, 1.0 / (c as f64 * s as f64)) {
        return Ok(false);
    }
    let unipotent = o
        .abelianization_matrix()
        .checked_pow(s as u32)
        .ok()
        .and_then(|m| m.is_unipotent().ok())
        .unwrap_or(false);
    if !unipotent {
        return Ok(false);
    }
    let word = w.word.trim_start_matches('[').trim_end_matches(']');
    let mut cur = CyclicWord::parse(o.rank(), word)?;
    if cur.alpha_tilde() != w.initial_alpha_tilde {
        return Ok(false);
    }
    let p = o.power(s);
    for &(k, a) in &w.table {
        cur = p.apply_cyclic(&cur)?;
        if cur.alpha_tilde() as u64 != a || k == 0 {
            return Ok(false);
        }
    }
    let nearest = w.slope.round();
    Ok(nearest >= 1.0 && (w.slope - nearest).abs() <= SLOPE_TOLERANCE * nearest && witness_pointwise(w))
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormRow {
    pub i: usize,
    pub j: usize,
    pub r: i64,
    pub k: u64,
    pub power: i64,
    pub matches: bool,
}

/// Closed form against iteration for every exceptional family `(i, j)`,
/// `r` in `{0, 1, 2}`, `k <= iterations`.
pub fn closed_form_table(map: &FilteredGraphMap, iterations: usize) -> Result<Vec<ClosedFormRow>, UpgError> {
    let linear = map.linear_edges();
    let mut rows = Vec::new();
    for a in &linear {
        for b in &linear {
            let (i, j) = (a.edge + 1, b.edge + 1);
            if j > i || a.nielsen_loop != b.nielsen_loop {
                continue;
            }
            for r in 0..=2 {
                let Ok(e) = map.exceptional(i, j, r) else { continue };
                let mut cur = e.to_edge_path();
                for k in 1..=iterations as u64 {
                    cur = map.apply(&cur);
                    let cf = exceptional_closed_form(&e, k);
                    rows.push(ClosedFormRow {
                        i,
                        j,
                        r,
                        k,
                        power: cf.power,
                        matches: cf.to_edge_path() == cur,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Validation, growth witness and closed-form table for a UPG fixture.
pub fn cmd_upg(cfg: &ExperimentConfig) -> Result<Outcome, Error> {
    let path = cfg
        .upg_fixture
        .as_ref()
        .ok_or_else(|| Error::Config("upg_fixture is required".into()))?;
    let map = FilteredGraphMap::from_json(&fs::read_to_string(cfg.resolve(path))?)?;
    run_upg(cfg, &map)
}

pub fn run_upg(cfg: &ExperimentConfig, map: &FilteredGraphMap) -> Result<Outcome, Error> {
    let validation = map.validate_upg_rep();
    let mut files = Vec::new();
    if !validation.valid {
        let report = json!({ "kind": "upg", "validation": validation });
        return Ok(Outcome {
            exit_code: EXIT_VIOLATION,
            report,
            files,
        });
    }
    let witness = map.find_witness(cfg.upg_iterations);
    let rows = closed_form_table(map, cfg.upg_iterations)?;
    let mismatches = rows.iter().filter(|r| !r.matches).count();
    let mut csv = String::from("i,j,r,k,power,matches\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{},{},{}\n", r.i, r.j, r.r, r.k, r.power, r.matches));
    }
    let (witness_json, exit) = match &witness {
        Ok(w) => (serde_json::to_value(w)?, EXIT_PASS),
        Err(e) => (json!({ "error": e.to_string() }), EXIT_INCONCLUSIVE),
    };
    let exit_code = if mismatches > 0 { EXIT_VIOLATION } else { exit };
    let mut report = json!({
        "kind": "upg",
        "validation": validation,
        "linear_edges": map.linear_edges(),
        "witness": witness_json,
        "closed_form": { "rows": rows.len(), "mismatches": mismatches },
    });
    round_floats(&mut report);
    write_out(cfg, "upg.json", &serde_json::to_string_pretty(&report)?, &mut files)?;
    write_out(cfg, "closed_form.csv", &csv, &mut files)?;
    Ok(Outcome {
        exit_code,
        report,
        files,
    })
}

/// Ball summary with layer sizes; saves a snapshot under `out_dir`.
pub fn cmd_oracle_build(cfg: &ExperimentConfig) -> Result<(Outcome, BallIndex), Error> {
    let ball = build_ball(cfg.rank, cfg.oracle_radius, cfg.node_budget, cfg.workers)?;
    let mut files = Vec::new();
    if let Some(dir) = &cfg.out_dir {
        let dir = cfg.resolve(dir);
        fs::create_dir_all(&dir)?;
        let path = dir.join(format!("ball_n{}_r{}.jsonl", cfg.rank, cfg.oracle_radius));
        ball.save(&path)?;
        files.push(path);
    }
    let report = json!({
        "kind": "oracle",
        "rank": ball.rank(),
        "radius": ball.radius(),
        "layers": ball.layers(),
        "nodes": ball.len(),
        "generators": crate::oracle::GENERATOR_CONVENTION,
    });
    Ok((
        Outcome {
            exit_code: EXIT_PASS,
            report,
            files,
        },
        ball,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::upg::fixtures;

    fn twist_cfg() -> ExperimentConfig {
        ExperimentConfig {
            automorphisms: vec![
                AutInput::Inline(json!({"rank": 2, "images": ["ab", "b"]})),
                AutInput::Inline(json!({"rank": 2, "images": ["b", "a"]})),
                AutInput::Inline(json!({"rank": 2, "images": ["b", "ab"]})),
            ],
            samples: 500,
            exhaustive_max_len: 6,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        let mut v = json!({"a": [1.23456789012345678, 2], "b": {"c": 1e-20 / 3.0}});
        round_floats(&mut v);
        assert_eq!(v["a"][0], json!(1.23456789012));
        assert_eq!(v["a"][1], json!(2));
    }

    #[test]
    fn config_defaults_and_errors() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(cfg.rank, 2);
        assert!(ExperimentConfig::from_json(r#"{"k_max": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"rank": 1}"#).is_err());
        let err = ExperimentConfig::from_json("{\n  \"rank\": 2,\n  oops\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(ExperimentConfig::from_json(r#"{"rnak": 2}"#).is_err());
    }

    #[test]
    fn tau_report_and_recheck() {
        let cfg = twist_cfg();
        let out = cmd_tau(&cfg).unwrap();
        assert_eq!(out.exit_code, EXIT_PASS);
        let cert: TauCertificate = serde_json::from_value(out.report.clone()).unwrap();
        let c = cert.cancellation.lemma1_cyclic_constant as f64;
        let twist = &cert.results[0].estimate;
        assert!((twist.lower - 1.0 / c).abs() < 1e-12 && twist.upper <= 1.0);
        assert_eq!(cert.results[1].estimate.method, Some(Method::FiniteOrder));
        let re = recheck_certificate(&cert).unwrap();
        assert_eq!(re.exit_code, EXIT_PASS, "{}", re.report);

        let mut tampered = cert.clone();
        tampered.results[0].estimate.lower *= 2.0;
        assert_eq!(recheck_certificate(&tampered).unwrap().exit_code, EXIT_VIOLATION);
        let mut tampered = cert;
        if let Some(w) = tampered.results[0].estimate.witness.as_mut() {
            w.table[3].1 += 5;
        }
        assert_eq!(recheck_certificate(&tampered).unwrap().exit_code, EXIT_VIOLATION);
    }

    #[test]
    fn tau_is_deterministic() {
        let cfg = twist_cfg();
        let a = cmd_tau(&cfg).unwrap().report;
        let b = cmd_tau(&cfg).unwrap().report;
        assert_eq!(to_stable_json(&a), to_stable_json(&b));
    }

    #[test]
    fn verify_passes_and_catches_small_constant() {
        let mut cfg = twist_cfg();
        cfg.oracle_radius = 4;
        let out = cmd_verify(&cfg).unwrap();
        assert_eq!(out.exit_code, EXIT_PASS, "{}", out.report);
        assert!(out.report["constant"].as_u64().unwrap() >= 1);
        // the sharp constant on these words is 1
        cfg.constant_override = Some(0);
        cfg.automorphisms.clear();
        let out = cmd_verify(&cfg).unwrap();
        assert_eq!(out.exit_code, EXIT_VIOLATION);
        cfg.samples = 0;
        let out = cmd_verify(&cfg).unwrap();
        assert!(out.report["warnings"][0].as_str().unwrap().contains("empty suite"));
    }

    #[test]
    fn upg_reports() {
        let cfg = ExperimentConfig::default();
        let out = run_upg(&cfg, &fixtures::dehn_twist()).unwrap();
        assert_eq!(out.exit_code, EXIT_PASS);
        assert_eq!(out.report["witness"]["slope"], json!(1.0));
        let out = run_upg(&cfg, &fixtures::identity_rose()).unwrap();
        assert_eq!(out.exit_code, EXIT_INCONCLUSIVE);
        let out = run_upg(&cfg, &fixtures::three_stratum()).unwrap();
        assert_eq!(out.exit_code, EXIT_PASS);
        assert_eq!(out.report["closed_form"]["mismatches"], json!(0));
        assert!(out.report["closed_form"]["rows"].as_u64().unwrap() >= 150);
    }

    #[test]
    fn csv_layout() {
        let cert = run_tau(&twist_cfg()).unwrap();
        let csv = growth_csv(&cert.results[0].estimate);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,L_k,alpha_tilde_k"));
        assert!(lines.next().unwrap().starts_with("1,"));
    }
}
