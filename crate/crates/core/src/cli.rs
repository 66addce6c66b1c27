//! The `hankel-up` experiment runner.
//!
//! Every subcommand resolves a [`Config`] from an optional JSON or TOML file
//! and command-line flags (flags win), runs one experiment and writes
//! `<command>-<seq>.json` (plus `<command>-<seq>.csv` for sampled functions,
//! columns `x,f,Ff`) into the output directory. Existing files are never
//! overwritten. The output directory is `--out`, else `$HANKEL_UP_OUT`, else
//! `reports`.
//!
//! Exit status: 0 when every asserted inequality holds, 1 when one fails or
//! a documented precondition does not hold, 2 for invalid input, 3 when a
//! numerical method fails to converge.

use std::ffi::OsString;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Value};

use crate::error::{domain, Error, Result};
use crate::experiments::{
    annihilation_experiment, default_thin_c, heisenberg_check, lp_sweep, product_formula_suite, transform_check,
};
use crate::measure::{lebesgue, mu_alpha, IntervalSet};
use crate::spectral::RadialFunction;
use crate::specfun::Alpha;
use crate::thinsets::{is_thin, make_thin_example};
use crate::uncertainty::local_sweep;
use crate::zoo::TestFunction;

pub const OUT_ENV: &str = "HANKEL_UP_OUT";

#[derive(Debug, Parser)]
#[command(name = "hankel-up", version, about = "Uncertainty experiments for the Hankel transform")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Plancherel, round-trip and Gaussian checks on one test function.
    Transform,
    /// Product formula and kernel mass of the generalized translation.
    Translate,
    /// Localization norms, constants and the inequality sweep for (S, Σ).
    Annihilate,
    /// Thinness of S (the example family when S is not given).
    ThinCheck,
    /// Builds the example family and checks it.
    ThinExample,
    /// Schur bounds of the dyadic decomposition over an ε-sweep.
    Lp,
    /// Random local uncertainty instances in one regime.
    Local,
    /// Heisenberg ratio of one test function.
    Heisenberg,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Translate => "translate",
            Command::Annihilate => "annihilate",
            Command::ThinCheck => "thin-check",
            Command::ThinExample => "thin-example",
            Command::Lp => "lp",
            Command::Local => "local",
            Command::Heisenberg => "heisenberg",
        }
    }

    /// Config keys the command reads.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Command::Transform | Command::Heisenberg => &["alpha", "R", "n", "f"],
            Command::Translate => &["alpha", "instances", "seed"],
            Command::Annihilate => &["alpha", "S", "Sigma", "R", "n", "instances", "seed"],
            Command::ThinCheck => &["alpha", "S", "R", "eps", "c", "kmin", "kmax"],
            Command::ThinExample => &["alpha", "eps", "c", "kmin", "kmax"],
            Command::Lp => &["alpha", "R", "n", "eps", "c", "kmin", "kmax"],
            Command::Local => &["alpha", "s", "instances", "seed"],
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// JSON or TOML config file (by extension); flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory [default: $HANKEL_UP_OUT, else ./reports].
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Time set as `lo,hi;lo,hi;…`.
    #[arg(long = "S", global = true, value_name = "INTERVALS", value_parser = parse_set)]
    pub s_set: Option<IntervalSet>,
    /// Frequency set as `lo,hi;lo,hi;…`.
    #[arg(long = "Sigma", global = true, value_name = "INTERVALS", value_parser = parse_set)]
    pub sigma: Option<IntervalSet>,
    /// Grid radius.
    #[arg(long = "R", global = true)]
    pub radius: Option<f64>,
    /// Grid size.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Test function: gaussian, gaussian-poly, bump or bessel-mode.
    #[arg(long, global = true, value_parser = parse_function)]
    pub f: Option<TestFunction>,
    /// Thinness level; a comma-separated list for `lp`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Constant of the example family [default: 10 (2π)^{α+1}].
    #[arg(long, global = true)]
    pub c: Option<f64>,
    #[arg(long, global = true)]
    pub kmin: Option<u64>,
    #[arg(long, global = true)]
    pub kmax: Option<u64>,
    /// Exponent of the local uncertainty inequality.
    #[arg(long, global = true)]
    pub s: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of random instances.
    #[arg(long, global = true)]
    pub instances: Option<usize>,
}

fn parse_set(text: &str) -> std::result::Result<IntervalSet, String> {
    let mut parts = Vec::new();
    for piece in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (lo, hi) = piece.split_once(',').ok_or_else(|| format!("expected lo,hi in {piece:?}"))?;
        let lo: f64 = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
        parts.push((lo, hi));
    }
    IntervalSet::new(parts).map_err(|e| e.to_string())
}

fn parse_function(text: &str) -> std::result::Result<TestFunction, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

/// A resolved or partial experiment description. Absent keys take
/// per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(rename = "S", skip_serializing_if = "Option::is_none")]
    pub s_set: Option<IntervalSet>,
    #[serde(rename = "Sigma", skip_serializing_if = "Option::is_none")]
    pub sigma: Option<IntervalSet>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<TestFunction>,
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmin: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<f64>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Eps {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(Some(match Eps::deserialize(d)? {
        Eps::One(x) => vec![x],
        Eps::Many(v) => v,
    }))
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))
        } else {
            Ok(serde_json::from_str(&text)?)
        }
    }

    /// Values from `self`, falling back to `base`.
    pub fn over(self, base: Config) -> Config {
        Config {
            alpha: self.alpha.or(base.alpha),
            s_set: self.s_set.or(base.s_set),
            sigma: self.sigma.or(base.sigma),
            radius: self.radius.or(base.radius),
            n: self.n.or(base.n),
            f: self.f.or(base.f),
            eps: self.eps.or(base.eps),
            c: self.c.or(base.c),
            kmin: self.kmin.or(base.kmin),
            kmax: self.kmax.or(base.kmax),
            s: self.s.or(base.s),
            seed: self.seed.or(base.seed),
            instances: self.instances.or(base.instances),
        }
    }

    fn present_keys(&self) -> Vec<&'static str> {
        let v = serde_json::to_value(self).expect("config serializes");
        let mut keys = Vec::new();
        for key in ["alpha", "S", "Sigma", "R", "n", "f", "eps", "c", "kmin", "kmax", "s", "seed", "instances"] {
            if v.get(key).is_some() {
                keys.push(key);
            }
        }
        keys
    }

    /// Rejects keys the command does not read and fills in its defaults.
    pub fn resolve(mut self, command: Command) -> Result<Config> {
        let allowed = command.keys();
        if let Some(key) = self.present_keys().into_iter().find(|k| !allowed.contains(k)) {
            return domain(format!("{key} is not used by {}", command.name()));
        }
        let alpha = Alpha::new(*self.alpha.get_or_insert(0.0))?;
        match command {
            Command::Transform | Command::Heisenberg => {
                self.radius.get_or_insert(8.0);
                self.n.get_or_insert(1024);
                self.f.get_or_insert(TestFunction::Gaussian);
            }
            Command::Translate => {
                self.instances.get_or_insert(100);
                self.seed.get_or_insert(0);
            }
            Command::Annihilate => {
                let unit = IntervalSet::interval(0.0, 1.0)?;
                self.s_set.get_or_insert_with(|| unit.clone());
                self.sigma.get_or_insert(unit);
                self.radius.get_or_insert(8.0);
                self.n.get_or_insert(1024);
                self.instances.get_or_insert(100);
                self.seed.get_or_insert(0);
            }
            Command::ThinCheck | Command::ThinExample => {
                self.eps.get_or_insert_with(|| vec![0.1]);
                if self.s_set.is_none() {
                    self.c.get_or_insert(default_thin_c(alpha));
                    self.kmin.get_or_insert(100);
                    let kmax = *self.kmax.get_or_insert(10_000);
                    if command == Command::ThinCheck {
                        self.radius.get_or_insert(kmax as f64 + 1.0);
                    }
                } else {
                    if self.c.is_some() || self.kmin.is_some() || self.kmax.is_some() {
                        return domain("c, kmin and kmax describe the example family and conflict with S");
                    }
                    let top = self.s_set.as_ref().map_or(1.0, |s| s.sup().max(1.0));
                    self.radius.get_or_insert(top);
                }
            }
            Command::Lp => {
                self.eps.get_or_insert_with(|| vec![0.01, 0.02, 0.04]);
                self.c.get_or_insert(default_thin_c(alpha));
                self.kmin.get_or_insert(2);
                self.kmax.get_or_insert(6);
                self.radius.get_or_insert(8.0);
                self.n.get_or_insert(1024);
            }
            Command::Local => {
                self.s.get_or_insert(0.5);
                self.instances.get_or_insert(200);
                self.seed.get_or_insert(0);
            }
        }
        self.validate(command)?;
        Ok(self)
    }

    fn validate(&self, command: Command) -> Result<()> {
        if let Some(r) = self.radius {
            if !(r.is_finite() && r > 0.0) {
                return domain(format!("R must be positive, got {r}"));
            }
        }
        if let Some(eps) = &self.eps {
            if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
                return domain(format!("eps values must lie in (0, 1), got {eps:?}"));
            }
            if command != Command::Lp && eps.len() != 1 {
                return domain(format!("{} takes a single eps", command.name()));
            }
        }
        if self.instances == Some(0) {
            return domain("instances must be positive");
        }
        Ok(())
    }

    fn alpha(&self) -> Result<Alpha> {
        Alpha::new(self.alpha.unwrap_or(0.0))
    }
}

/// One finished experiment.
pub struct Outcome {
    pub result: Value,
    pub pass: bool,
    /// `(x, f, Ff)` rows.
    pub samples: Option<(RadialFunction, RadialFunction)>,
}

fn required<T: Clone>(v: &Option<T>) -> T {
    v.clone().expect("resolved config carries every key its command reads")
}

/// Runs `command` on a resolved config.
pub fn execute(command: Command, cfg: &Config) -> Result<Outcome> {
    let alpha = cfg.alpha()?;
    let outcome = match command {
        Command::Transform => {
            let (f, ff, rep) = transform_check(alpha, required(&cfg.f), required(&cfg.radius), required(&cfg.n))?;
            Outcome { pass: rep.passes(), result: to_value(&rep)?, samples: Some((f, ff)) }
        }
        Command::Heisenberg => {
            let (f, ff, rep) = heisenberg_check(alpha, required(&cfg.f), required(&cfg.radius), required(&cfg.n))?;
            Outcome { pass: rep.passes(), result: to_value(&rep)?, samples: Some((f, ff)) }
        }
        Command::Translate => {
            let rep = product_formula_suite(alpha, required(&cfg.instances), required(&cfg.seed));
            Outcome { pass: rep.passes(), result: to_value(&rep)?, samples: None }
        }
        Command::Annihilate => {
            let rep = annihilation_experiment(
                alpha,
                cfg.s_set.as_ref().expect("resolved"),
                cfg.sigma.as_ref().expect("resolved"),
                required(&cfg.radius),
                required(&cfg.n),
                required(&cfg.instances),
                required(&cfg.seed),
            )?;
            Outcome { pass: rep.passes(), result: to_value(&rep)?, samples: None }
        }
        Command::ThinCheck => {
            let eps = required(&cfg.eps)[0];
            let set = match &cfg.s_set {
                Some(s) => s.clone(),
                None => make_thin_example(eps, required(&cfg.c), required(&cfg.kmin), required(&cfg.kmax))?,
            };
            let rep = is_thin(&set, eps, alpha, required(&cfg.radius))?;
            Outcome { pass: rep.is_thin, result: to_value(&rep)?, samples: None }
        }
        Command::ThinExample => {
            let eps = required(&cfg.eps)[0];
            let kmax = required(&cfg.kmax);
            let set = make_thin_example(eps, required(&cfg.c), required(&cfg.kmin), kmax)?;
            let rep = is_thin(&set, eps, alpha, kmax as f64 + 1.0)?;
            let result = json!({
                "components": set.intervals().len(),
                "lebesgue": lebesgue(&set),
                "mu_alpha": mu_alpha(alpha, &set),
                "thin": rep,
                "S": set,
            });
            Outcome { pass: rep.is_thin, result, samples: None }
        }
        Command::Lp => {
            let sweep = lp_sweep(
                alpha,
                required(&cfg.radius),
                required(&cfg.n),
                &required(&cfg.eps),
                required(&cfg.c),
                required(&cfg.kmin),
                required(&cfg.kmax),
            )?;
            Outcome { pass: sweep.passes(), result: to_value(&sweep)?, samples: None }
        }
        Command::Local => {
            let rep = local_sweep(alpha, required(&cfg.s), required(&cfg.instances), required(&cfg.seed))?;
            Outcome { pass: rep.violations == 0, result: to_value(&rep)?, samples: None }
        }
    };
    Ok(outcome)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

/// The report file body: the outcome wrapped with the command, the crate
/// version and the resolved config.
pub fn report(command: Command, cfg: &Config, outcome: &Outcome) -> Result<String> {
    let body = json!({
        "command": command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "result": outcome.result,
        "pass": outcome.pass,
    });
    let mut text = serde_json::to_string_pretty(&body)?;
    text.push('\n');
    Ok(text)
}

pub fn samples_csv(f: &RadialFunction, ff: &RadialFunction) -> String {
    let mut out = String::from("x,f,Ff\n");
    for ((x, v), w) in f.grid().nodes().iter().zip(f.values()).zip(ff.values()) {
        out.push_str(&format!("{x:e},{v:e},{w:e}\n"));
    }
    out
}

/// Smallest sequence number not yet used by `stem-*.json` in `dir`.
fn next_sequence(dir: &Path, stem: &str) -> Result<u32> {
    let prefix = format!("{stem}-");
    let mut next = 1;
    for entry in fs::read_dir(dir)? {
        let name = entry?.file_name();
        let name = name.to_string_lossy();
        if let Some(seq) = name.strip_prefix(&prefix).and_then(|r| r.strip_suffix(".json")) {
            if let Ok(k) = seq.parse::<u32>() {
                next = next.max(k + 1);
            }
        }
    }
    Ok(next)
}

fn write_new(path: &Path, text: &str) -> Result<()> {
    let mut file = OpenOptions::new().write(true).create_new(true).open(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

/// Writes the report (and CSV) for a finished run and returns the report
/// path.
pub fn write_outputs(dir: &Path, command: Command, cfg: &Config, outcome: &Outcome) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let seq = next_sequence(dir, command.name())?;
    let stem = format!("{}-{seq:04}", command.name());
    let json_path = dir.join(format!("{stem}.json"));
    if let Some((f, ff)) = &outcome.samples {
        write_new(&dir.join(format!("{stem}.csv")), &samples_csv(f, ff))?;
    }
    write_new(&json_path, &report(command, cfg, outcome)?)?;
    Ok(json_path)
}

fn options_config(o: &Options) -> Config {
    Config {
        alpha: o.alpha,
        s_set: o.s_set.clone(),
        sigma: o.sigma.clone(),
        radius: o.radius,
        n: o.n,
        f: o.f,
        eps: o.eps.clone(),
        c: o.c,
        kmin: o.kmin,
        kmax: o.kmax,
        s: o.s,
        seed: o.seed,
        instances: o.instances,
    }
}

fn run(cli: Cli) -> Result<(PathBuf, bool)> {
    let base = match &cli.options.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let cfg = options_config(&cli.options).over(base).resolve(cli.command)?;
    let outcome = execute(cli.command, &cfg)?;
    let dir = cli
        .options
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("reports"));
    let path = write_outputs(&dir, cli.command, &cfg, &outcome)?;
    Ok((path, outcome.pass))
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Precondition(_) => 1,
        Error::Convergence { .. } => 3,
        Error::Domain(_) | Error::GridMismatch(_) | Error::Io(_) | Error::Json(_) => 2,
    }
}

/// Parses `args`, runs the experiment and returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let command = cli.command;
    match run(cli) {
        Ok((path, pass)) => {
            println!("{} {} {}", command.name(), if pass { "PASS" } else { "FAIL" }, path.display());
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("hankel-up {}: {e}", command.name());
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    main_with(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("hankel-up").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn interval_flags() {
        let s = parse_set("0,1; 2.5,3").unwrap();
        assert_eq!(s.intervals(), &[(0.0, 1.0), (2.5, 3.0)]);
        assert!(parse_set("").unwrap().is_empty());
        assert!(parse_set("1").is_err());
        assert!(parse_set("2,1").is_err());
    }

    #[test]
    fn flags_after_the_subcommand() {
        let cli = parse(&["annihilate", "--alpha", "0", "--S", "0,1", "--Sigma", "0,1", "--R", "8", "--n", "1024"]);
        assert_eq!(cli.command, Command::Annihilate);
        assert_eq!(cli.options.n, Some(1024));
        let cli = parse(&["lp", "--eps", "0.01,0.02"]);
        assert_eq!(cli.options.eps, Some(vec![0.01, 0.02]));
        let cli = parse(&["--alpha", "-0.25", "transform", "--f", "bump"]);
        assert_eq!(cli.options.alpha, Some(-0.25));
        assert_eq!(cli.options.f, Some(TestFunction::Bump));
    }

    #[test]
    fn flags_override_files_and_defaults_fill_in() {
        let file: Config = serde_json::from_str(r#"{"alpha": 1, "eps": 0.2, "n": 64}"#).unwrap();
        assert_eq!(file.eps, Some(vec![0.2]));
        let flags = Config { n: Some(128), ..Config::default() };
        let cfg = flags.over(file).resolve(Command::Lp);
        assert!(cfg.is_ok());
        let cfg = cfg.unwrap();
        assert_eq!((cfg.alpha, cfg.n, cfg.kmin, cfg.radius), (Some(1.0), Some(128), Some(2), Some(8.0)));
        let toml: Config = toml::from_str("alpha = 0.5\nS = [[0.0, 1.0]]\n").unwrap();
        assert_eq!(toml.s_set.unwrap().intervals(), &[(0.0, 1.0)]);
        assert!(serde_json::from_str::<Config>(r#"{"beta": 1}"#).is_err());
    }

    #[test]
    fn resolution_rejects_bad_input() {
        let bad = |c: Config, cmd| matches!(c.resolve(cmd), Err(Error::Domain(_)));
        assert!(bad(Config { n: Some(10), ..Config::default() }, Command::Local));
        assert!(bad(Config { alpha: Some(-0.5), ..Config::default() }, Command::Transform));
        assert!(bad(Config { eps: Some(vec![1.5]), ..Config::default() }, Command::ThinExample));
        assert!(bad(Config { eps: Some(vec![0.1, 0.2]), ..Config::default() }, Command::ThinCheck));
        let with_set = Config { s_set: Some(IntervalSet::interval(0.0, 1.0).unwrap()), ..Config::default() };
        assert!(bad(Config { kmin: Some(3), ..with_set.clone() }, Command::ThinCheck));
        assert_eq!(with_set.resolve(Command::ThinCheck).unwrap().radius, Some(1.0));
    }

    #[test]
    fn sequence_numbers_skip_existing_reports() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(next_sequence(dir.path(), "lp").unwrap(), 1);
        fs::write(dir.path().join("lp-0003.json"), "{}").unwrap();
        fs::write(dir.path().join("lp-x.json"), "{}").unwrap();
        fs::write(dir.path().join("local-0009.json"), "{}").unwrap();
        assert_eq!(next_sequence(dir.path(), "lp").unwrap(), 4);
        assert!(write_new(&dir.path().join("lp-0003.json"), "{}").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Precondition("p".into())), 1);
        assert_eq!(exit_code(&Error::Domain("d".into())), 2);
        assert_eq!(exit_code(&Error::Convergence { what: "w".into(), iterations: 3 }), 3);
        assert_eq!(main_with(["hankel-up", "frobnicate"]), 2);
        assert_eq!(main_with(["hankel-up", "local", "--n", "3"]), 2);
    }
}
