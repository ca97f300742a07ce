//! Run configuration: a JSON file whose keys may be overridden from the
//! command line.

use std::path::{Path, PathBuf};

use ibcolor::eval::RkkConfig;
use ibcolor::ib::{geometric_schedule, AnnealConfig, AnnealMode, DEFAULT_MAX_ITER, DEFAULT_MERGE_TOL, DEFAULT_TOL};
use ibcolor::meaning_space::DEFAULT_SIGMA_SQ;
use ibcolor::priors::{DEFAULT_CAPACITY_MAX_ITER, DEFAULT_CAPACITY_TOL};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub chip_file: Option<PathBuf>,
    pub lab_file: Option<PathBuf>,
    pub term_file: Option<PathBuf>,
    /// Term file in the same layout whose rows are relabeled as language 111.
    pub english_file: Option<PathBuf>,
    pub out_dir: PathBuf,

    pub sigma_sq: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_steps: usize,
    /// Explicit ascending β grid; replaces the geometric one when set.
    pub schedule: Option<Vec<f64>>,
    /// Defaults to the number of chips.
    pub k_max: Option<usize>,
    pub anneal_mode: AnnealMode,
    pub tol: f64,
    pub max_iter: usize,
    pub perturbation: f64,
    pub collapse_tol: f64,
    pub merge_tol: f64,

    pub capacity_tol: f64,
    pub capacity_max_iter: usize,

    pub rkk_beta_max: f64,
    pub rkk_steps: usize,
    pub rkk_restarts: usize,

    pub seed: u64,
    pub folds: usize,
    pub language: Option<u32>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let anneal = AnnealConfig::new(vec![1.0], 1);
        let rkk = RkkConfig::default();
        Self {
            chip_file: None,
            lab_file: None,
            term_file: None,
            english_file: None,
            out_dir: PathBuf::from("out"),
            sigma_sq: DEFAULT_SIGMA_SQ,
            beta_min: 1.0,
            beta_max: 8192.0,
            beta_steps: 1500,
            schedule: None,
            k_max: None,
            anneal_mode: AnnealMode::Both,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            perturbation: anneal.perturbation,
            collapse_tol: anneal.collapse_tol,
            merge_tol: DEFAULT_MERGE_TOL,
            capacity_tol: DEFAULT_CAPACITY_TOL,
            capacity_max_iter: DEFAULT_CAPACITY_MAX_ITER,
            rkk_beta_max: rkk.beta_max,
            rkk_steps: rkk.schedule_steps,
            rkk_restarts: rkk.restarts,
            seed: 0,
            folds: 5,
            language: None,
        }
    }
}

/// Flag values that override the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub chip_file: Option<PathBuf>,
    pub lab_file: Option<PathBuf>,
    pub term_file: Option<PathBuf>,
    pub english_file: Option<PathBuf>,
    pub sigma_sq: Option<f64>,
    pub beta_min: Option<f64>,
    pub beta_max: Option<f64>,
    pub beta_steps: Option<usize>,
    pub seed: Option<u64>,
    pub language: Option<u32>,
    pub folds: Option<usize>,
}

impl RunConfig {
    /// Read a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.chip_file,
            &mut cfg.lab_file,
            &mut cfg.term_file,
            &mut cfg.english_file,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if cfg.out_dir.is_relative() {
            cfg.out_dir = base.join(&cfg.out_dir);
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($($f:ident),*) => {$(
                if let Some(v) = &o.$f {
                    self.$f = v.clone().into();
                }
            )*};
        }
        set!(out_dir, sigma_sq, beta_min, beta_max, beta_steps, seed, folds);
        set!(chip_file, lab_file, term_file, english_file, language);
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.sigma_sq > 0.0) {
            return Err(CliError::input(format!(
                "sigma_sq must be positive, got {}",
                self.sigma_sq
            )));
        }
        if self.folds == 0 {
            return Err(CliError::input("folds must be at least 1"));
        }
        self.schedule()?;
        Ok(())
    }

    pub fn schedule(&self) -> Result<Vec<f64>, CliError> {
        match &self.schedule {
            Some(s) => Ok(s.clone()),
            None => geometric_schedule(self.beta_min, self.beta_max, self.beta_steps).map_err(CliError::from),
        }
    }

    pub fn anneal_config(&self, n_chips: usize) -> Result<AnnealConfig, CliError> {
        let mut a = AnnealConfig::new(self.schedule()?, self.k_max.unwrap_or(n_chips));
        a.tol = self.tol;
        a.max_iter = self.max_iter;
        a.seed = self.seed;
        a.perturbation = self.perturbation;
        a.merge_tol = self.merge_tol;
        a.collapse_tol = self.collapse_tol;
        a.mode = self.anneal_mode;
        Ok(a)
    }

    pub fn rkk_config(&self) -> RkkConfig {
        RkkConfig {
            beta_max: self.rkk_beta_max,
            schedule_steps: self.rkk_steps,
            restarts: self.rkk_restarts,
            seed: self.seed,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    /// The settings that determine computed results: everything except
    /// file locations.
    fn computational(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        let obj = v.as_object_mut().expect("config is an object");
        for k in [
            "chip_file",
            "lab_file",
            "term_file",
            "english_file",
            "out_dir",
            "language",
        ] {
            obj.remove(k);
        }
        v
    }

    /// Digest of the computational settings named in `keys` (all of them
    /// when `keys` is empty) together with `extra`, which carries input or
    /// upstream artifact digests.
    pub fn digest(&self, keys: &[&str], extra: &[&str]) -> String {
        let mut v = self.computational();
        if !keys.is_empty() {
            let obj = v.as_object_mut().expect("config is an object");
            obj.retain(|k, _| keys.contains(&k.as_str()));
        }
        let mut h = Sha256::new();
        h.update(v.to_string().as_bytes());
        for e in extra {
            h.update(b"\0");
            h.update(e.as_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Settings that determine ingestion outputs.
pub const INGEST_KEYS: &[&str] = &["capacity_tol", "capacity_max_iter", "seed"];

/// Settings that determine an IB curve.
pub const CURVE_KEYS: &[&str] = &[
    "sigma_sq",
    "beta_min",
    "beta_max",
    "beta_steps",
    "schedule",
    "k_max",
    "anneal_mode",
    "tol",
    "max_iter",
    "perturbation",
    "collapse_tol",
    "merge_tol",
    "seed",
];

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_and_overrides() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let partial: RunConfig = serde_json::from_str(r#"{"seed": 9, "beta_steps": 10}"#).unwrap();
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.sigma_sq, DEFAULT_SIGMA_SQ);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sede": 9}"#).is_err());

        let mut c = RunConfig::default();
        c.apply(&Overrides {
            seed: Some(4),
            sigma_sq: Some(100.0),
            ..Default::default()
        });
        assert_eq!((c.seed, c.sigma_sq), (4, 100.0));
    }

    #[test]
    fn digest_ignores_paths() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.out_dir = PathBuf::from("elsewhere");
        b.term_file = Some(PathBuf::from("t.txt"));
        assert_eq!(a.digest(&[], &["x"]), b.digest(&[], &["x"]));
        assert_ne!(a.digest(&[], &["x"]), a.digest(&[], &["y"]));
        b.folds = 3;
        assert_eq!(a.digest(CURVE_KEYS, &[]), b.digest(CURVE_KEYS, &[]));
        assert_ne!(a.digest(&[], &[]), b.digest(&[], &[]));
        b.seed = 1;
        assert_ne!(a.digest(CURVE_KEYS, &[]), b.digest(CURVE_KEYS, &[]));
    }
}
