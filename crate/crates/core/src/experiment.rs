//! Batch experiments behind the command-line tool.
//!
//! Each subcommand turns an [`ExperimentConfig`] into CSV text. Every output
//! starts with `#` comment lines recording the crate version, the experiment
//! parameters and the master seed. Execution details (worker count, output
//! path) are left out of the header so reruns compare byte for byte.
//!
//! Simulation trial `t` at SNR grid point `k` uses trial index `(k << 32) | t`
//! for its message, fading and noise streams.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::analysis::{
    achievable_rate, bound_table_at, capacity_reference, db_to_power, optimized_fading_error_bound, rate_table_csv,
    sphere_bound, RateBound, MARTINET_G, MARTINET_G1,
};
use crate::channel::{transmit, ChannelModel};
use crate::codebook::{carve, CodeConfig, Codebook};
use crate::decoder::{ml_decode, nld_decode};
use crate::lattice::{invariants, shortest_vector, LatticeInvariants};
use crate::numberfield::{
    default_ideal_radius, embedding_matrix, find_field, ideal_lattice, min_ideal, FieldSpec, IdealSpec,
};
use crate::rng::{stream_rng, Stream};
use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Invariants,
    Rates,
    Bounds,
    Simulate,
    Ideal,
}

impl Subcommand {
    pub fn label(self) -> &'static str {
        match self {
            Subcommand::Invariants => "invariants",
            Subcommand::Rates => "rates",
            Subcommand::Bounds => "bounds",
            Subcommand::Simulate => "simulate",
            Subcommand::Ideal => "ideal",
        }
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Subcommand::Invariants, Subcommand::Rates, Subcommand::Bounds, Subcommand::Simulate, Subcommand::Ideal]
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown subcommand `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecoderChoice {
    Nld,
    Ml,
    Both,
}

impl DecoderChoice {
    fn nld(self) -> bool {
        self != DecoderChoice::Ml
    }

    fn ml(self) -> bool {
        self != DecoderChoice::Nld
    }
}

impl fmt::Display for DecoderChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderChoice::Nld => "nld",
            DecoderChoice::Ml => "ml",
            DecoderChoice::Both => "both",
        })
    }
}

impl FromStr for DecoderChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nld" => Ok(DecoderChoice::Nld),
            "ml" => Ok(DecoderChoice::Ml),
            "both" => Ok(DecoderChoice::Both),
            _ => Err(Error::Config(format!("unknown decoder `{s}`"))),
        }
    }
}

/// Parses `a,b,c` or the inclusive range `start:stop:step`.
pub fn parse_snr_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("bad SNR grid `{s}`"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts.iter().map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?;
        let (start, stop, step) = (v[0], v[1], v[2]);
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|k| start + step * k as f64).collect());
    }
    if parts.len() != 1 {
        return Err(bad());
    }
    let grid: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub subcommand: Subcommand,
    /// `None` means every catalog field where that makes sense.
    pub field: Option<String>,
    pub rate: f64,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub decoder: DecoderChoice,
    /// Defaults to the AWGN model matching the field.
    pub model: Option<ChannelModel>,
    pub output: Option<PathBuf>,
    pub catalog: Option<PathBuf>,
    /// Worker threads for simulation; `None` uses all cores.
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        ExperimentConfig {
            subcommand,
            field: None,
            rate: 1.0,
            snr_db: vec![20.0],
            trials: 1000,
            seed: 1,
            decoder: DecoderChoice::Both,
            model: None,
            output: None,
            catalog: None,
            workers: None,
        }
    }

    /// Sets one `key = value` entry. Keys match the command-line flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("bad value for `{what}`: `{value}`"));
        match key {
            "subcommand" => self.subcommand = value.parse()?,
            "field" => self.field = Some(value.to_string()),
            "rate" => self.rate = value.parse().map_err(|_| bad(key))?,
            "snr" => self.snr_db = parse_snr_grid(value)?,
            "trials" => self.trials = value.parse().map_err(|_| bad(key))?,
            "seed" => self.seed = value.parse().map_err(|_| bad(key))?,
            "decoder" => self.decoder = value.parse()?,
            "model" => self.model = Some(value.parse()?),
            "out" => self.output = Some(PathBuf::from(value)),
            "catalog" => self.catalog = Some(PathBuf::from(value)),
            "workers" => self.workers = Some(value.parse().map_err(|_| bad(key))?),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(k.trim(), v.trim()).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        if !(self.rate > 0.0) {
            return Err(Error::Config(format!("rate must be positive, got {}", self.rate)));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// The experiment parameters as a single `key=value` line.
    pub fn describe(&self) -> String {
        let snr: Vec<String> = self.snr_db.iter().map(|x| x.to_string()).collect();
        format!(
            "subcommand={} field={} rate={} snr={} trials={} seed={} decoder={} model={} catalog={}",
            self.subcommand.label(),
            self.field.as_deref().unwrap_or("all"),
            self.rate,
            snr.join(","),
            self.trials,
            self.seed,
            self.decoder,
            self.model.map_or("auto".to_string(), |m| m.to_string()),
            self.catalog.as_ref().map_or("builtin".to_string(), |p| p.display().to_string()),
        )
    }

    fn header(&self) -> String {
        format!("# nflattice {VERSION}\n# config: {}\n# seed={}\n", self.describe(), self.seed)
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) { format!("\"{}\"", s.replace('"', "\"\"")) } else { s.to_string() }
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:.12e}"))
}

fn selected<'a>(catalog: &'a [FieldSpec], name: Option<&str>) -> Result<Vec<&'a FieldSpec>> {
    match name {
        Some(n) => Ok(vec![find_field(catalog, n)?]),
        None => Ok(catalog.iter().collect()),
    }
}

/// Runs the configured subcommand and returns its CSV.
pub fn run(config: &ExperimentConfig, catalog: &[FieldSpec]) -> Result<String> {
    config.validate()?;
    let mut out = config.header();
    let body = match config.subcommand {
        Subcommand::Invariants => invariants_table(config, catalog)?,
        Subcommand::Rates => rates_table(config, catalog)?,
        Subcommand::Bounds => bounds_table(config),
        Subcommand::Simulate => simulate(config, catalog)?,
        Subcommand::Ideal => ideal_table(config, catalog)?,
    };
    out.push_str(&body);
    Ok(out)
}

/// Invariants of ψ(O_K) with the predicted closed forms.
pub fn field_invariants(field: &FieldSpec) -> Result<LatticeInvariants> {
    let lattice = embedding_matrix(field)?;
    invariants(&lattice, 2.0 * (field.degree as f64).sqrt(), Some(1.0))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn invariants_table(config: &ExperimentConfig, catalog: &[FieldSpec]) -> Result<String> {
    let mut out = String::from(
        "field,degree,r1,r2,disc,volume,volume_pred,sv,sv_pred,dp,dp_pred,nsv,nsv_pred,ndp,ndp_pred,max_mismatch\n",
    );
    for f in selected(catalog, config.field.as_deref())? {
        let inv = field_invariants(f)?;
        let sv_pred = (f.n() as f64).sqrt();
        let ndp = inv.ndp.ok_or(Error::UnknownInvariant("ndp"))?;
        let mismatch = [
            rel(inv.volume, f.predicted_volume()),
            rel(inv.sv, sv_pred),
            rel(inv.dp_min.unwrap_or(f64::NAN), 1.0),
            rel(inv.nsv, f.predicted_nsv()),
            rel(ndp, f.predicted_ndp()),
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        writeln!(
            out,
            "{},{},{},{},{},{:.12e},{:.12e},{:.12e},{:.12e},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e}",
            csv_text(&f.name),
            f.degree,
            f.signature.0,
            f.signature.1,
            f.disc,
            inv.volume,
            f.predicted_volume(),
            inv.sv,
            sv_pred,
            opt(inv.dp_min),
            1.0,
            inv.nsv,
            f.predicted_nsv(),
            ndp,
            f.predicted_ndp(),
            mismatch
        )
        .unwrap();
        if !(mismatch <= 1e-8) {
            return Err(Error::Inconsistent(format!("{}: invariants differ from closed forms by {mismatch:e}", f.name)));
        }
    }
    Ok(out)
}

fn rates_table(config: &ExperimentConfig, catalog: &[FieldSpec]) -> Result<String> {
    let field = config.field.as_deref().map(|n| find_field(catalog, n)).transpose()?;
    let mut rows: Vec<RateBound> = Vec::new();
    for &db in &config.snr_db {
        let p = db_to_power(db);
        for model in ChannelModel::ALL {
            let mut tower = achievable_rate(model, p, if model.is_complex() { MARTINET_G } else { MARTINET_G1 });
            tower.label = format!("martinet_{model}");
            rows.push(tower);
            if let Some(f) = field {
                if f.is_totally_real() != model.is_complex() {
                    let mut b = achievable_rate(model, p, f.root_discriminant());
                    b.label = format!("field_{model}");
                    b.parameters.push(("root_disc".into(), f.root_discriminant()));
                    rows.push(b);
                }
            }
            rows.push(RateBound {
                label: format!("capacity_{model}"),
                channel: model,
                power: p,
                rate: capacity_reference(model, p),
                gap: 0.0,
                parameters: vec![("P".into(), p)],
            });
        }
    }
    Ok(rate_table_csv(&rows))
}

fn bounds_table(config: &ExperimentConfig) -> String {
    let rows: Vec<RateBound> = config.snr_db.iter().flat_map(|&db| bound_table_at(db_to_power(db))).collect();
    rate_table_csv(&rows)
}

fn ideal_table(config: &ExperimentConfig, catalog: &[FieldSpec]) -> Result<String> {
    let mut out = String::from(
        "field,ideal,norm,class,principal,min_ideal,element_norm,certified,ndp,ndp_from_min,n_min,idealform_ndp\n",
    );
    let fields = selected(catalog, config.field.as_deref())?;
    let explicit = config.field.is_some();
    for f in fields {
        if f.ideals.is_empty() && !explicit {
            continue;
        }
        let ideals: Vec<IdealSpec> = if f.ideals.is_empty() { vec![f.unit_ideal()] } else { f.ideals.clone() };
        let n_min = f.n_min().unwrap_or(1);
        for ideal in &ideals {
            let m = min_ideal(f, ideal, default_ideal_radius(f, ideal))?;
            let lattice = ideal_lattice(f, ideal)?;
            let witness = crate::lattice::norm(&lattice.point(&m.coords));
            let sv = shortest_vector(&lattice)?.norm;
            let inv = invariants(&lattice, witness.max(1.5 * sv), None)?;
            writeln!(
                out,
                "{},{},{},{},{},{:.12e},{:.12e},{},{},{:.12e},{},{:.12e}",
                csv_text(&f.name),
                csv_text(&ideal.label),
                ideal.norm,
                csv_text(&ideal.class_label),
                ideal.principal,
                m.value,
                m.element_norm,
                m.certified,
                opt(inv.ndp),
                f.ndp_from_min_ideal(m.value),
                n_min,
                f.idealform_ndp(n_min),
            )
            .unwrap();
        }
    }
    Ok(out)
}

/// Error counts at one SNR point.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationPoint {
    pub snr_db: f64,
    pub trials: u64,
    pub errors_nld: Option<u64>,
    pub errors_ml: Option<u64>,
    /// Violations of "NLD correct ⇒ ML correct" (both decoders only).
    pub dominance_violations: u64,
    pub sphere_bound: Option<f64>,
    pub chernoff_bound: Option<f64>,
    pub signal_power: f64,
    pub noise_power: f64,
    pub codebook_size: usize,
}

impl SimulationPoint {
    pub fn pe_nld(&self) -> Option<f64> {
        self.errors_nld.map(|e| e as f64 / self.trials as f64)
    }

    pub fn pe_ml(&self) -> Option<f64> {
        self.errors_ml.map(|e| e as f64 / self.trials as f64)
    }

    /// Binomial standard error of the primary estimate (NLD when run).
    pub fn mc_sigma(&self) -> f64 {
        let p = self.pe_nld().or(self.pe_ml()).unwrap_or(0.0);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// The channel model a simulation uses: explicit, or AWGN matching the field.
pub fn resolve_model(config: &ExperimentConfig, field: &FieldSpec) -> Result<ChannelModel> {
    let model = config.model.unwrap_or(ChannelModel::for_signature(!field.is_totally_real(), false));
    if model.is_complex() == field.is_totally_real() {
        return Err(Error::Config(format!("{model} does not match the signature of {}", field.name)));
    }
    Ok(model)
}

/// Runs the Monte Carlo campaign without formatting.
pub fn simulate_points(config: &ExperimentConfig, catalog: &[FieldSpec]) -> Result<Vec<SimulationPoint>> {
    config.validate()?;
    let name = config.field.as_deref().ok_or_else(|| Error::Config("simulate needs a field".into()))?;
    let field = find_field(catalog, name)?;
    let model = resolve_model(config, field)?;
    let sv = shortest_vector(&embedding_matrix(field)?)?.norm;
    let job = || -> Result<Vec<SimulationPoint>> {
        config
            .snr_db
            .iter()
            .enumerate()
            .map(|(k, &db)| {
                let code = carve(&CodeConfig { field, rate: config.rate, power: db_to_power(db), seed: config.seed })?;
                simulate_point(config, &code, model, k as u64, db, sv)
            })
            .collect()
    };
    match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(job),
        None => job(),
    }
}

struct TrialResult {
    nld_correct: Option<bool>,
    ml_correct: Option<bool>,
    signal: f64,
    noise: f64,
}

fn simulate_point(
    config: &ExperimentConfig,
    code: &Codebook,
    model: ChannelModel,
    point: u64,
    snr_db: f64,
    sv: f64,
) -> Result<SimulationPoint> {
    if config.trials > u32::MAX as u64 {
        return Err(Error::Config("at most 2^32 - 1 trials per SNR point".into()));
    }
    let n = code.n as f64;
    let results: Vec<TrialResult> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let index = (point << 32) | t;
            let sent = stream_rng(config.seed, index, Stream::Message).random_range(0..code.len());
            let s = &code.points[sent];
            let (y, r) = transmit(s, model, config.seed, index)?;
            let nld_correct =
                if config.decoder.nld() { Some(nld_decode(&y, &r, code, sent)?.correct) } else { None };
            let ml_correct = if config.decoder.ml() { Some(ml_decode(&y, &r, code, sent)?.correct) } else { None };
            let faded = r.apply_fading(s);
            Ok(TrialResult {
                nld_correct,
                ml_correct,
                signal: faded.iter().map(|x| x * x).sum::<f64>() / n,
                noise: r.noise.iter().map(|x| x * x).sum::<f64>() / n,
            })
        })
        .collect::<Result<_>>()?;
    let errors = |f: fn(&TrialResult) -> Option<bool>| -> Option<u64> {
        results.iter().map(|r| f(r).map(|ok| u64::from(!ok))).sum()
    };
    let errors_nld = errors(|r| r.nld_correct);
    let errors_ml = errors(|r| r.ml_correct);
    let dominance_violations =
        results.iter().filter(|r| r.nld_correct == Some(true) && r.ml_correct == Some(false)).count() as u64;
    let trials = config.trials as f64;
    let signal_power = results.iter().map(|r| r.signal).sum::<f64>() / trials;
    let noise_power = results.iter().map(|r| r.noise).sum::<f64>() / trials;
    let (sphere, chernoff) = if model.is_fading() {
        (None, Some(optimized_fading_error_bound(code.n, code.alpha, model)?.value))
    } else {
        (Some(sphere_bound(code.alpha * sv, code.n, model)?), None)
    };
    Ok(SimulationPoint {
        snr_db,
        trials: config.trials,
        errors_nld,
        errors_ml,
        dominance_violations,
        sphere_bound: sphere,
        chernoff_bound: chernoff,
        signal_power,
        noise_power,
        codebook_size: code.len(),
    })
}

fn simulate(config: &ExperimentConfig, catalog: &[FieldSpec]) -> Result<String> {
    let points = simulate_points(config, catalog)?;
    let mut out = String::from(
        "snr_db,trials,errors_nld,errors_ml,pe_nld,pe_ml,mc_sigma,sphere_bound,chernoff_bound\n",
    );
    let count = |x: Option<u64>| x.map_or(String::new(), |v| v.to_string());
    for p in &points {
        writeln!(
            out,
            "{},{},{},{},{},{},{:.6e},{},{}",
            p.snr_db,
            p.trials,
            count(p.errors_nld),
            count(p.errors_ml),
            opt(p.pe_nld()),
            opt(p.pe_ml()),
            p.mc_sigma(),
            opt(p.sphere_bound),
            opt(p.chernoff_bound)
        )
        .unwrap();
    }
    for p in &points {
        // average noise energy per channel use is 1, so the SNR is P
        let p_lin = db_to_power(p.snr_db);
        let noise_sigma = (2.0 / p.trials as f64).sqrt();
        writeln!(
            out,
            "# snr_db={} codewords={} signal_power={:.6e} noise_power={:.6e} power_limit={:.6e} dominance_violations={}",
            p.snr_db, p.codebook_size, p.signal_power, p.noise_power, p_lin, p.dominance_violations
        )
        .unwrap();
        if (p.noise_power - 1.0).abs() > 6.0 * noise_sigma + 1e-12 {
            return Err(Error::Inconsistent(format!("empirical noise power {} is not 1", p.noise_power)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::builtin_catalog;

    fn cfg(sub: Subcommand) -> ExperimentConfig {
        ExperimentConfig::new(sub)
    }

    #[test]
    fn snr_grids() {
        assert_eq!(parse_snr_grid("10,12.5, 15").unwrap(), vec![10.0, 12.5, 15.0]);
        assert_eq!(parse_snr_grid("8:20:4").unwrap(), vec![8.0, 12.0, 16.0, 20.0]);
        assert!(parse_snr_grid("").is_err());
        assert!(parse_snr_grid("1:0:1").is_err());
        assert!(parse_snr_grid("a,b").is_err());
    }

    #[test]
    fn config_file_and_overrides() {
        let mut c = cfg(Subcommand::Simulate);
        c.apply_file_text("# campaign\nfield = Q(i)\nrate = 1.5\nsnr = 10:14:2\ntrials = 50 # few\n").unwrap();
        assert_eq!(c.field.as_deref(), Some("Q(i)"));
        assert_eq!(c.snr_db, vec![10.0, 12.0, 14.0]);
        assert_eq!(c.trials, 50);
        c.set("trials", "7").unwrap();
        assert_eq!(c.trials, 7);
        match c.apply_file_text("rate = 1\nbogus = 3\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        c.trials = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn invariants_output() {
        let catalog = builtin_catalog();
        let mut c = cfg(Subcommand::Invariants);
        c.field = Some("Q(sqrt(2))".into());
        let csv = run(&c, &catalog).unwrap();
        let row = csv.lines().find(|l| l.starts_with("Q(sqrt(2))")).unwrap();
        let cols: Vec<&str> = row.split(',').collect();
        let ndp: f64 = cols[13].parse().unwrap();
        assert!((ndp - 0.3535534).abs() < 1e-7);
        let mismatch: f64 = cols[15].parse().unwrap();
        assert!(mismatch <= 1e-8);
        assert!(csv.starts_with("# nflattice "));
    }

    #[test]
    fn ideal_output() {
        let catalog = builtin_catalog();
        let mut c = cfg(Subcommand::Ideal);
        c.field = Some("Q(sqrt(-5))".into());
        let csv = run(&c, &catalog).unwrap();
        let rows: Vec<&str> = csv.lines().filter(|l| l.starts_with("Q(sqrt(-5))")).collect();
        assert_eq!(rows.len(), 3);
        let value = |r: &str| -> f64 { r.rsplit(',').nth(6).unwrap().parse().unwrap() };
        assert!((value(rows[0]) - 1.0).abs() < 1e-12);
        assert!((value(rows[1]) - 2f64.sqrt()).abs() < 1e-12);
        assert!(rows[1].contains("\"(2, 1+sqrt(-5))\""));
    }

    #[test]
    fn rates_and_bounds_output() {
        let catalog = builtin_catalog();
        let mut c = cfg(Subcommand::Rates);
        c.field = Some("Q(zeta5)".into());
        c.snr_db = vec![10.0, 20.0];
        let csv = run(&c, &catalog).unwrap();
        assert!(csv.lines().any(|l| l.starts_with("field_awgn_complex,awgn_complex,20.000000,")));
        assert!(!csv.lines().any(|l| l.starts_with("field_awgn_real")));
        let csv = run(&cfg(Subcommand::Bounds), &catalog).unwrap();
        assert!(csv.lines().any(|l| l.starts_with("odlyzko_limit,rayleigh_real,20.000000,")));
    }

    #[test]
    fn simulate_is_deterministic_across_workers() {
        let catalog = builtin_catalog();
        let mut c = cfg(Subcommand::Simulate);
        c.field = Some("Q(i)".into());
        c.model = Some(ChannelModel::RayleighComplex);
        c.snr_db = vec![8.0, 14.0];
        c.trials = 300;
        c.workers = Some(1);
        let a = run(&c, &catalog).unwrap();
        c.workers = Some(3);
        let b = run(&c, &catalog).unwrap();
        assert_eq!(a, b);
        c.seed = 2;
        assert_ne!(run(&c, &catalog).unwrap(), a);
    }

    #[test]
    fn simulate_rejects_mismatched_model() {
        let catalog = builtin_catalog();
        let mut c = cfg(Subcommand::Simulate);
        c.field = Some("Q(i)".into());
        c.model = Some(ChannelModel::AwgnReal);
        assert!(run(&c, &catalog).is_err());
        c.field = Some("nope".into());
        assert!(matches!(run(&c, &catalog), Err(Error::UnknownField(_))));
    }

    #[test]
    fn simulated_points_are_sane() {
        let catalog = builtin_catalog();
        let mut c = cfg(Subcommand::Simulate);
        c.field = Some("Q(sqrt(2))".into());
        c.snr_db = vec![6.0, 12.0];
        c.trials = 2000;
        let pts = simulate_points(&c, &catalog).unwrap();
        for p in &pts {
            assert_eq!(p.dominance_violations, 0);
            assert!(p.errors_ml.unwrap() <= p.errors_nld.unwrap());
            assert!(p.signal_power <= db_to_power(p.snr_db));
            assert!((p.noise_power - 1.0).abs() < 0.1);
            assert!(p.pe_nld().unwrap() <= p.sphere_bound.unwrap() + 3.0 * p.mc_sigma());
        }
    }
}
