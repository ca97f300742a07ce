//! The five subcommands. Each one reads its inputs from the configured
//! files or from artifacts of earlier commands, and writes its outputs under
//! `out_dir`:
//!
//! ```text
//! ingest/    manifest.json palette.json priors.json priors.tsv source.json encoders/lang_NNN.json
//! curve/     curve.json curve.encoders.json transitions.tsv
//! eval/      eval.json eval.tsv summary.tsv
//! crossval/  fold_K/curve.json ... report.json crossval.tsv summary.tsv folds.tsv assignment.tsv
//! export/    lang_NNN/{language,ib}_{grid,centroids}.tsv
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use ibcolor::eval::export::{category_centroids, centroid_table, eval_table, naming_grid, summary_table};
use ibcolor::eval::{
    cross_validate_with, evaluate_languages, fit_beta, CrossValReport, EvalConfig, LanguageEval, PrincipleSummary,
};
use ibcolor::ib::persist::{load_curve, read_curve_meta, save_curve};
use ibcolor::ib::{anneal_curve, IBCurve, Prior};
use ibcolor::meaning_space::{ColorChip, MeaningSpace, Palette};
use ibcolor::priors::{average_source, priors_table, reference_prior, CognitiveSource, LanguagePrior};
use ibcolor::wcs::{
    assemble_palette, estimate_encoder, group_by_language, parse_chip_rows, parse_lab_rows, parse_term_rows,
    relabel_language, LanguageEncoder, ENGLISH_LANGUAGE_ID,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{sha256_hex, RunConfig, CURVE_KEYS, INGEST_KEYS};
use crate::CliError;

const MANIFEST_FORMAT: &str = "ibcolor-ingest";

/// A JSON artifact body with the digest of the configuration that produced
/// it and the run seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Stamped<T> {
    config_digest: String,
    seed: u64,
    #[serde(flatten)]
    data: T,
}

fn stamp_tsv(digest: &str, seed: u64, body: &str) -> String {
    format!("# config_digest={digest} seed={seed}\n{body}")
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<String, CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::input(e.to_string()))? + "\n";
    write(path, &text)?;
    Ok(text)
}

fn read_artifact<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text =
        fs::read_to_string(path).map_err(|_| CliError::missing(format!("missing artifact {}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn read_input(role: &str, path: &Option<PathBuf>) -> Result<(PathBuf, Vec<u8>), CliError> {
    let path = path
        .clone()
        .ok_or_else(|| CliError::input(format!("no {role} file configured")))?;
    let bytes =
        fs::read(&path).map_err(|e| CliError::input(format!("cannot read {role} file {}: {e}", path.display())))?;
    Ok((path, bytes))
}

fn with_path(path: &Path) -> impl Fn(ibcolor::Error) -> CliError + '_ {
    move |e| CliError::input(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderEntry {
    pub language_id: u32,
    pub file: String,
    pub terms: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub code_version: String,
    pub inputs: Vec<InputRecord>,
    pub chips: usize,
    pub palette: String,
    pub palette_sha256: String,
    pub priors: String,
    pub source: String,
    pub source_sha256: String,
    pub skipped_blank: usize,
    pub encoders: Vec<EncoderEntry>,
    /// Languages whose capacity iteration stopped before the tolerance.
    pub unconverged_priors: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PaletteFile {
    chips: Vec<ColorChip>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PriorsFile {
    priors: Vec<LanguagePrior>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SourceFile {
    source: CognitiveSource,
}

/// Everything later commands need from ingestion.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub digest: String,
    pub seed: u64,
    pub manifest: Manifest,
    pub palette: Palette,
    pub languages: Vec<LanguageEncoder>,
    pub priors: Vec<LanguagePrior>,
    pub source: CognitiveSource,
}

impl Ingested {
    pub fn prior(&self) -> Result<Prior, CliError> {
        Ok(self.source.to_prior()?)
    }

    pub fn space(&self, cfg: &RunConfig) -> Result<MeaningSpace, CliError> {
        Ok(MeaningSpace::build(&self.palette, cfg.sigma_sq)?)
    }
}

fn ingest_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("ingest")
}

fn sha_file(path: &Path) -> Option<String> {
    fs::read(path).ok().map(|b| sha256_hex(&b))
}

/// Parse the survey files and write encoders, reference priors, the
/// averaged source and a manifest. Reuses earlier output when the inputs and
/// settings are unchanged.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<Ingested, CliError> {
    cfg.validate()?;
    let (chip_path, chip_bytes) = read_input("chip", &cfg.chip_file)?;
    let (lab_path, lab_bytes) = read_input("lab", &cfg.lab_file)?;
    let (term_path, term_bytes) = read_input("term", &cfg.term_file)?;
    let english = match &cfg.english_file {
        Some(_) => Some(read_input("english", &cfg.english_file)?),
        None => None,
    };
    let mut inputs = vec![
        InputRecord {
            role: "chip".into(),
            path: chip_path.display().to_string(),
            sha256: sha256_hex(&chip_bytes),
        },
        InputRecord {
            role: "lab".into(),
            path: lab_path.display().to_string(),
            sha256: sha256_hex(&lab_bytes),
        },
        InputRecord {
            role: "term".into(),
            path: term_path.display().to_string(),
            sha256: sha256_hex(&term_bytes),
        },
    ];
    if let Some((p, b)) = &english {
        inputs.push(InputRecord {
            role: "english".into(),
            path: p.display().to_string(),
            sha256: sha256_hex(b),
        });
    }
    let input_digests: Vec<&str> = inputs.iter().map(|i| i.sha256.as_str()).collect();
    let digest = cfg.digest(INGEST_KEYS, &input_digests);
    let dir = ingest_dir(cfg);

    if let Ok(cached) = load_ingest(cfg) {
        if cached.digest == digest && ingest_files_intact(&dir, &cached.manifest) {
            log::info!("ingest: inputs unchanged, reusing {}", dir.display());
            return finish_ingest(cached);
        }
    }

    let cells = parse_chip_rows(BufReader::new(&chip_bytes[..])).map_err(with_path(&chip_path))?;
    let labs = parse_lab_rows(BufReader::new(&lab_bytes[..])).map_err(with_path(&lab_path))?;
    let palette = assemble_palette(&cells, &labs).map_err(with_path(&lab_path))?;
    let max_chip = palette.chips().iter().map(|c| c.chip_id).max().unwrap_or(0);
    let terms = parse_term_rows(BufReader::new(&term_bytes[..]), max_chip).map_err(with_path(&term_path))?;
    let mut observations = terms.observations;
    let mut skipped_blank = terms.skipped_blank;
    if let Some((p, b)) = &english {
        if observations.iter().any(|o| o.language_id == ENGLISH_LANGUAGE_ID) {
            return Err(CliError::input(format!(
                "{}: language {ENGLISH_LANGUAGE_ID} is reserved for the English file",
                term_path.display()
            )));
        }
        let eng = parse_term_rows(BufReader::new(&b[..]), max_chip).map_err(with_path(p))?;
        let mut eng_obs = eng.observations;
        relabel_language(&mut eng_obs, ENGLISH_LANGUAGE_ID);
        observations.extend(eng_obs);
        skipped_blank += eng.skipped_blank;
    }
    log::info!(
        "ingest: {} chips, {} naming responses ({} blank skipped)",
        palette.len(),
        observations.len(),
        skipped_blank
    );

    let grouped = group_by_language(&observations);
    if grouped.is_empty() {
        return Err(CliError::input(format!("{}: no naming responses", term_path.display())));
    }
    let mut languages = Vec::with_capacity(grouped.len());
    for (&id, obs) in &grouped {
        languages.push(estimate_encoder(id, obs, &palette).map_err(with_path(&term_path))?);
    }
    let mut priors = Vec::with_capacity(languages.len());
    for lang in &languages {
        let p = reference_prior(lang.language_id, &lang.matrix, cfg.capacity_tol, cfg.capacity_max_iter)?;
        log::info!(
            "ingest: language {} has {} terms, capacity {:.4} bits",
            lang.language_id,
            lang.n_terms(),
            p.capacity
        );
        priors.push(p);
    }
    let source = average_source(&priors)?;

    let seed = cfg.seed;
    let stamp = |data| Stamped {
        config_digest: digest.clone(),
        seed,
        data,
    };
    let palette_text = write_json(
        &dir.join("palette.json"),
        &stamp(PaletteFile {
            chips: palette.chips().to_vec(),
        }),
    )?;
    let mut encoders = Vec::with_capacity(languages.len());
    for lang in &languages {
        let file = format!("encoders/lang_{:03}.json", lang.language_id);
        let text = write_json(&dir.join(&file), &stamp_encoder(&digest, seed, lang))?;
        encoders.push(EncoderEntry {
            language_id: lang.language_id,
            file,
            terms: lang.n_terms(),
            sha256: sha256_hex(text.as_bytes()),
        });
    }
    write_json(
        &dir.join("priors.json"),
        &Stamped {
            config_digest: digest.clone(),
            seed,
            data: PriorsFile { priors: priors.clone() },
        },
    )?;
    write(
        &dir.join("priors.tsv"),
        &stamp_tsv(&digest, seed, &priors_table(&palette, &priors)),
    )?;
    let source_text = write_json(
        &dir.join("source.json"),
        &Stamped {
            config_digest: digest.clone(),
            seed,
            data: SourceFile { source: source.clone() },
        },
    )?;
    let manifest = Manifest {
        format: MANIFEST_FORMAT.into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        inputs,
        chips: palette.len(),
        palette: "palette.json".into(),
        palette_sha256: sha256_hex(palette_text.as_bytes()),
        priors: "priors.json".into(),
        source: "source.json".into(),
        source_sha256: sha256_hex(source_text.as_bytes()),
        skipped_blank,
        encoders,
        unconverged_priors: priors.iter().filter(|p| !p.converged).map(|p| p.language_id).collect(),
    };
    write_json(
        &dir.join("manifest.json"),
        &Stamped {
            config_digest: digest.clone(),
            seed,
            data: manifest.clone(),
        },
    )?;
    log::info!("ingest: wrote {} encoders to {}", languages.len(), dir.display());
    finish_ingest(Ingested {
        digest,
        seed,
        manifest,
        palette,
        languages,
        priors,
        source,
    })
}

fn finish_ingest(ing: Ingested) -> Result<Ingested, CliError> {
    if !ing.manifest.unconverged_priors.is_empty() {
        return Err(CliError::convergence(format!(
            "capacity iteration did not converge for languages {:?}",
            ing.manifest.unconverged_priors
        )));
    }
    Ok(ing)
}

fn stamp_encoder(digest: &str, seed: u64, lang: &LanguageEncoder) -> Stamped<LanguageEncoder> {
    Stamped {
        config_digest: digest.into(),
        seed,
        data: lang.clone(),
    }
}

fn ingest_files_intact(dir: &Path, m: &Manifest) -> bool {
    sha_file(&dir.join(&m.palette)).as_deref() == Some(m.palette_sha256.as_str())
        && sha_file(&dir.join(&m.source)).as_deref() == Some(m.source_sha256.as_str())
        && m.encoders
            .iter()
            .all(|e| sha_file(&dir.join(&e.file)).as_deref() == Some(e.sha256.as_str()))
}

/// Read the artifacts written by [`cmd_ingest`].
pub fn load_ingest(cfg: &RunConfig) -> Result<Ingested, CliError> {
    let dir = ingest_dir(cfg);
    let path = dir.join("manifest.json");
    if !path.exists() {
        return Err(CliError::missing(format!(
            "no ingest manifest at {}; run `ibcolor ingest` first",
            path.display()
        )));
    }
    let m: Stamped<Manifest> = read_artifact(&path)?;
    if m.data.format != MANIFEST_FORMAT {
        return Err(CliError::input(format!("{} is not an ingest manifest", path.display())));
    }
    let pal: Stamped<PaletteFile> = read_artifact(&dir.join(&m.data.palette))?;
    let palette = Palette::new(pal.data.chips)?;
    let mut languages = Vec::with_capacity(m.data.encoders.len());
    for e in &m.data.encoders {
        let s: Stamped<LanguageEncoder> = read_artifact(&dir.join(&e.file))?;
        languages.push(s.data);
    }
    let priors: Stamped<PriorsFile> = read_artifact(&dir.join(&m.data.priors))?;
    let source: Stamped<SourceFile> = read_artifact(&dir.join(&m.data.source))?;
    Ok(Ingested {
        digest: m.config_digest,
        seed: m.seed,
        manifest: m.data,
        palette,
        languages,
        priors: priors.data.priors,
        source: source.data.source,
    })
}

fn source_digest(prior: &Prior) -> String {
    sha256_hex(
        serde_json::to_string(&prior.probs().to_vec())
            .expect("floats serialize")
            .as_bytes(),
    )
}

/// A curve on disk together with the digest it was stored under.
#[derive(Debug, Clone)]
pub struct CurveArtifact {
    pub curve: IBCurve,
    pub path: PathBuf,
    pub digest: String,
    pub reused: bool,
}

impl CurveArtifact {
    pub fn unconverged(&self) -> Vec<usize> {
        (0..self.curve.points.len())
            .filter(|&i| !self.curve.converged[i])
            .collect()
    }
}

/// Anneal a curve into `dir`, or reuse the one there if it was built from
/// the same settings, source and palette.
fn curve_in(cfg: &RunConfig, ing: &Ingested, prior: &Prior, dir: &Path) -> Result<CurveArtifact, CliError> {
    let digest = cfg.digest(CURVE_KEYS, &[&source_digest(prior), &ing.manifest.palette_sha256]);
    let path = dir.join("curve.json");
    if let Ok(meta) = read_curve_meta(&path) {
        if meta.config_digest == digest {
            if let Ok(curve) = load_curve(&path) {
                log::info!("curve: settings unchanged, reusing {}", path.display());
                return Ok(CurveArtifact {
                    curve,
                    path,
                    digest,
                    reused: true,
                });
            }
        }
    }
    let space = ing.space(cfg)?;
    let anneal = cfg.anneal_config(ing.palette.len())?;
    log::info!(
        "curve: annealing {} grid points over {} chips",
        anneal.schedule.len(),
        ing.palette.len()
    );
    let curve = anneal_curve(prior, &space, &anneal)?;
    fs::create_dir_all(dir).map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
    save_curve(&curve, &path, Some(cfg.sigma_sq), &digest)?;
    let mut log = String::from("beta\tk_before\tk_after\n");
    for (beta, a, b) in curve.transitions() {
        let _ = writeln!(log, "{beta:.10}\t{a}\t{b}");
    }
    write(&dir.join("transitions.tsv"), &stamp_tsv(&digest, cfg.seed, &log))?;
    log::info!(
        "curve: {} transitions, max complexity {:.4} bits",
        curve.transitions().len(),
        curve.max_complexity()
    );
    Ok(CurveArtifact {
        curve,
        path,
        digest,
        reused: false,
    })
}

/// Build the IB curve for the ingested source.
pub fn cmd_curve(cfg: &RunConfig) -> Result<CurveArtifact, CliError> {
    cfg.validate()?;
    let ing = load_ingest(cfg)?;
    let prior = ing.prior()?;
    let art = curve_in(cfg, &ing, &prior, &cfg.out_dir.join("curve"))?;
    let bad = art.unconverged();
    if !bad.is_empty() {
        return Err(CliError::convergence(format!(
            "{} curve points did not converge (first at beta {})",
            bad.len(),
            art.curve.points[bad[0]].beta
        )));
    }
    Ok(art)
}

fn load_main_curve(cfg: &RunConfig) -> Result<IBCurve, CliError> {
    let path = cfg.out_dir.join("curve").join("curve.json");
    if !path.exists() {
        return Err(CliError::missing(format!(
            "no curve at {}; run `ibcolor curve` first",
            path.display()
        )));
    }
    load_curve(&path).map_err(|e| CliError::missing(format!("{}: {e}", path.display())))
}

fn eval_config(cfg: &RunConfig, n_chips: usize) -> Result<EvalConfig, CliError> {
    Ok(EvalConfig {
        anneal: cfg.anneal_config(n_chips)?,
        rkk: cfg.rkk_config(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub units: String,
    pub entries: Vec<LanguageEval>,
    pub summary: Vec<PrincipleSummary>,
}

/// Score every ingested language against the stored curve.
pub fn cmd_eval(cfg: &RunConfig) -> Result<EvalReport, CliError> {
    cfg.validate()?;
    let ing = load_ingest(cfg)?;
    let curve = load_main_curve(cfg)?;
    let prior = ing.prior()?;
    let space = ing.space(cfg)?;
    if curve.meaning_digest != space.digest() || curve.source != prior {
        return Err(CliError::missing(
            "stored curve was built for a different source or meaning space; rerun `ibcolor curve`",
        ));
    }
    let curve_sha = sha_file(&cfg.out_dir.join("curve").join("curve.json")).unwrap_or_default();
    let digest = cfg.digest(&[], &[&ing.digest, &curve_sha]);
    let refs: Vec<&LanguageEncoder> = ing.languages.iter().collect();
    let entries = evaluate_languages(&refs, &curve, &prior, &space, &cfg.rkk_config(), 0)?;
    let summary = ibcolor::eval::summarize(&entries);
    let dir = cfg.out_dir.join("eval");
    let report = EvalReport {
        units: "bits".into(),
        entries,
        summary,
    };
    write_json(
        &dir.join("eval.json"),
        &Stamped {
            config_digest: digest.clone(),
            seed: cfg.seed,
            data: report.clone(),
        },
    )?;
    write(
        &dir.join("eval.tsv"),
        &stamp_tsv(&digest, cfg.seed, &eval_table(&report.entries)),
    )?;
    write(
        &dir.join("summary.tsv"),
        &stamp_tsv(
            &digest,
            cfg.seed,
            &format!("# epsilon in bits\n{}", summary_table(&report.summary)),
        ),
    )?;
    log::info!("eval: scored {} languages", report.entries.len());
    Ok(report)
}

/// Cross-validation over languages; each fold's curve is cached under
/// `crossval/fold_K`.
pub fn cmd_crossval(cfg: &RunConfig) -> Result<CrossValReport, CliError> {
    cfg.validate()?;
    let ing = load_ingest(cfg)?;
    let space = ing.space(cfg)?;
    let dir = cfg.out_dir.join("crossval");
    let digest = cfg.digest(&[], &[&ing.digest]);
    let econf = eval_config(cfg, ing.palette.len())?;
    let mut unconverged = Vec::new();
    let mut failure: Option<CliError> = None;
    let report = {
        let mut build = |fold: usize, prior: &Prior| match curve_in(cfg, &ing, prior, &dir.join(format!("fold_{fold}")))
        {
            Ok(art) => {
                if !art.unconverged().is_empty() {
                    unconverged.push(fold);
                }
                Ok(art.curve)
            }
            Err(e) => {
                let msg = e.message.clone();
                failure = Some(e);
                Err(ibcolor::Error::InvalidArgument(msg))
            }
        };
        cross_validate_with(
            &ing.languages,
            &ing.priors,
            &space,
            &econf,
            cfg.folds,
            cfg.seed,
            &mut build,
        )
    };
    let report = match (report, failure) {
        (Ok(r), _) => r,
        (Err(_), Some(e)) => return Err(e),
        (Err(e), None) => return Err(e.into()),
    };

    let stamped = Stamped {
        config_digest: digest.clone(),
        seed: cfg.seed,
        data: report.clone(),
    };
    write_json(&dir.join("report.json"), &stamped)?;
    write(
        &dir.join("crossval.tsv"),
        &stamp_tsv(&digest, cfg.seed, &eval_table(&report.entries)),
    )?;
    write(
        &dir.join("summary.tsv"),
        &stamp_tsv(
            &digest,
            cfg.seed,
            &format!("# epsilon in bits\n{}", summary_table(&report.summary)),
        ),
    )?;
    let mut folds = String::from("fold\t");
    folds.push_str(summary_table(&[]).trim_end());
    folds.push('\n');
    for (f, s) in report.per_fold.iter().enumerate() {
        for line in summary_table(s).lines().skip(1) {
            let _ = writeln!(folds, "{f}\t{line}");
        }
    }
    write(&dir.join("folds.tsv"), &stamp_tsv(&digest, cfg.seed, &folds))?;
    let mut assign = String::from("language_id\tfold\n");
    for (id, f) in &report.assignment {
        let _ = writeln!(assign, "{id}\t{f}");
    }
    write(&dir.join("assignment.tsv"), &stamp_tsv(&digest, cfg.seed, &assign))?;
    log::info!("crossval: {} folds, {} languages", report.folds, report.entries.len());
    if !unconverged.is_empty() {
        return Err(CliError::convergence(format!(
            "curves for folds {unconverged:?} have unconverged points"
        )));
    }
    Ok(report)
}

/// Paths written by [`cmd_export`].
#[derive(Debug, Clone)]
pub struct ExportFiles {
    pub language_grid: PathBuf,
    pub ib_grid: PathBuf,
    pub language_centroids: PathBuf,
    pub ib_centroids: PathBuf,
}

/// Naming grids and category centroids for one language and for the IB
/// encoder it is matched with.
pub fn cmd_export(cfg: &RunConfig) -> Result<ExportFiles, CliError> {
    cfg.validate()?;
    let id = cfg
        .language
        .ok_or_else(|| CliError::input("export needs a language id (--language)"))?;
    let ing = load_ingest(cfg)?;
    let lang = ing
        .languages
        .iter()
        .find(|l| l.language_id == id)
        .ok_or_else(|| CliError::input(format!("unknown language id {id}")))?;
    let curve = load_main_curve(cfg)?;
    let prior = ing.prior()?;
    let space = ing.space(cfg)?;
    let encoder = lang.to_encoder(&prior)?;
    let fit = fit_beta(id, &encoder, &curve, &prior, &space)?;
    let matched = curve.encoder(fit.point);
    let ib_words: Vec<String> = (1..=matched.n_words()).map(|w| format!("w{w}")).collect();

    let curve_sha = sha_file(&cfg.out_dir.join("curve").join("curve.json")).unwrap_or_default();
    let digest = cfg.digest(&[], &[&ing.digest, &curve_sha]);
    let dir = cfg.out_dir.join("export").join(format!("lang_{id:03}"));
    let head = format!(
        "# language={id} beta={:.10} epsilon={:.10} gnid={:.10} point={}\n",
        fit.beta, fit.epsilon, fit.gnid, fit.point
    );
    let files = ExportFiles {
        language_grid: dir.join("language_grid.tsv"),
        ib_grid: dir.join("ib_grid.tsv"),
        language_centroids: dir.join("language_centroids.tsv"),
        ib_centroids: dir.join("ib_centroids.tsv"),
    };
    let out = |body: String| stamp_tsv(&digest, cfg.seed, &format!("{head}{body}"));
    write(
        &files.language_grid,
        &out(naming_grid(&lang.matrix, &ing.palette, &lang.terms)),
    )?;
    write(
        &files.ib_grid,
        &out(naming_grid(matched.matrix(), &ing.palette, &ib_words)),
    )?;
    write(
        &files.language_centroids,
        &out(centroid_table(&category_centroids(
            &encoder,
            &prior,
            &ing.palette,
            &lang.terms,
        ))),
    )?;
    write(
        &files.ib_centroids,
        &out(centroid_table(&category_centroids(
            matched,
            &prior,
            &ing.palette,
            &ib_words,
        ))),
    )?;
    log::info!("export: language {id} matched at beta {:.4}", fit.beta);
    Ok(files)
}
