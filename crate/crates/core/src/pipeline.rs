//! End-to-end evaluation: labels, per-game features, model selection on
//! puzzle-aware splits, permutation significance and final model fitting.

use std::collections::BTreeMap;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::conversation::FeatureMap;
use crate::corpus::GameRecord;
use crate::geo::{label_game, ConstructivenessLabel, Objective};
use crate::lingfeat::{
    early_window, group_features, FeatureGroup, Featurizer, PosCounts, PosVocabulary,
    EARLY_HORIZON_S, EARLY_MAX_COVERAGE, SCALAR_FEATURES,
};
use crate::model::{
    cross_validate, ensemble_search, iteration_seed, permutation_test_many, puzzle_aware_splits,
    select_candidate, train_logreg, Candidate, CvResult, Design, Ensemble, EvalReport,
    GridConfig, Hyperparameters, LogRegModel, ModelError, Split, Standardizer, TrainOptions,
};
use crate::text::LexiconSet;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no usable games after preparation")]
    NoGames,
    #[error("model artifact does not match: {0}")]
    Artifact(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// The whole conversation.
    Full,
    /// Only the opening window of the team phase.
    Early20,
}

impl Mode {
    pub fn code(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Early20 => "early20",
        }
    }

    pub fn from_code(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Some(Mode::Full),
            "early20" => Some(Mode::Early20),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub objective: Objective,
    pub seed: u64,
    pub n_iter: usize,
    pub train_frac: f64,
    pub n_perm: usize,
    /// Extra resampled splits for a variance estimate; 0 disables.
    pub bootstrap_splits: usize,
    pub grid: GridConfig,
    pub horizon_s: f64,
    pub max_coverage: f64,
    pub train: TrainOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Full,
            objective: Objective::Constructive,
            seed: 0,
            n_iter: 20,
            train_frac: 0.8,
            n_perm: 5000,
            bootstrap_splits: 0,
            grid: GridConfig::default(),
            horizon_s: EARLY_HORIZON_S,
            max_coverage: EARLY_MAX_COVERAGE,
            train: TrainOptions::default(),
        }
    }
}

/// Hex SHA-256 of a value's JSON form.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("config serialises");
    hex::encode(Sha256::digest(json.as_bytes()))
}

/// Hash of the scalar feature registry.
pub fn registry_hash() -> String {
    hex::encode(Sha256::digest(SCALAR_FEATURES.join("\n").as_bytes()))
}

/// Per-game inputs to modelling, in corpus order.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub game_ids: Vec<String>,
    pub puzzles: Vec<String>,
    pub labels: Vec<ConstructivenessLabel>,
    pub scalars: Vec<FeatureMap>,
    pub pos: Vec<PosCounts>,
    /// Games left out, with a reason code.
    pub excluded: Vec<(String, String)>,
    pub mode: Mode,
}

impl Prepared {
    pub fn len(&self) -> usize {
        self.game_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.game_ids.is_empty()
    }

    pub fn objective_labels(&self, objective: Objective) -> Vec<bool> {
        self.labels.iter().map(|l| l.objective(objective)).collect()
    }
}

enum Outcome {
    Kept(String, String, ConstructivenessLabel, FeatureMap, PosCounts),
    Excluded(String, String),
}

/// Labels every game from its full record and featurises either the full
/// game or its opening window. Games without a label, and in windowed mode
/// games without events or with too much of the interaction in the window,
/// are excluded.
pub fn prepare(
    games: &[GameRecord],
    lexicons: &LexiconSet,
    mode: Mode,
    horizon_s: f64,
    max_coverage: f64,
    max_order: usize,
) -> Prepared {
    let fz = Featurizer::new(lexicons);
    let outcomes: Vec<Outcome> = games
        .par_iter()
        .map(|g| {
            let id = g.game_id.clone();
            let label = match label_game(g) {
                Ok(l) => l,
                Err(_) => return Outcome::Excluded(id, "NO_LABEL".into()),
            };
            let window;
            let view = match mode {
                Mode::Full => g,
                Mode::Early20 => match early_window(g, horizon_s, max_coverage) {
                    Err(_) => return Outcome::Excluded(id, "NO_EVENTS".into()),
                    Ok(w) if !w.eligible => return Outcome::Excluded(id, "EARLY_COVERAGE".into()),
                    Ok(w) => {
                        window = w.game;
                        &window
                    }
                },
            };
            let (scalars, pos) = fz.analyze(view, max_order);
            Outcome::Kept(id, g.puzzle_id.clone(), label, scalars, pos)
        })
        .collect();
    let mut p = Prepared {
        game_ids: Vec::new(),
        puzzles: Vec::new(),
        labels: Vec::new(),
        scalars: Vec::new(),
        pos: Vec::new(),
        excluded: Vec::new(),
        mode,
    };
    for o in outcomes {
        match o {
            Outcome::Kept(id, puzzle, label, scalars, pos) => {
                p.game_ids.push(id);
                p.puzzles.push(puzzle);
                p.labels.push(label);
                p.scalars.push(scalars);
                p.pos.push(pos);
            }
            Outcome::Excluded(id, reason) => p.excluded.push((id, reason)),
        }
    }
    p
}

fn scalar_rows(maps: &[&FeatureMap], names: &[&str]) -> Design<f64> {
    let mut x = Array2::zeros((maps.len(), names.len()));
    let mut mask = Array2::from_elem((maps.len(), names.len()), false);
    for (r, m) in maps.iter().enumerate() {
        for (c, n) in names.iter().enumerate() {
            if let Some(v) = m.get(n) {
                x[[r, c]] = v;
                mask[[r, c]] = true;
            }
        }
    }
    Design { x, mask }
}

fn pos_rows(counts: &[&PosCounts], vocab: &PosVocabulary) -> Design<f64> {
    let mut x = Array2::zeros((counts.len(), vocab.len()));
    for (r, c) in counts.iter().enumerate() {
        let total = c.total(vocab.n);
        if total == 0 {
            continue;
        }
        for (j, k) in vocab.ngrams.iter().enumerate() {
            x[[r, j]] = c.count(k) as f64 / total as f64;
        }
    }
    Design::dense(x)
}

/// Raw design matrix of `group` for the games in `idx`.
pub fn group_design(
    prepared: &Prepared,
    group: FeatureGroup,
    vocab: Option<&PosVocabulary>,
    idx: &[usize],
) -> Design<f64> {
    match group {
        FeatureGroup::Pos => {
            let counts: Vec<&PosCounts> = idx.iter().map(|&i| &prepared.pos[i]).collect();
            pos_rows(&counts, vocab.expect("POS design needs a vocabulary"))
        }
        g => {
            let maps: Vec<&FeatureMap> = idx.iter().map(|&i| &prepared.scalars[i]).collect();
            scalar_rows(&maps, &group_features(g))
        }
    }
}

fn split_vocab(prepared: &Prepared, cand: &Candidate, train: &[usize]) -> Option<PosVocabulary> {
    let (n, d) = (cand.pos_n?, cand.min_df?);
    Some(PosVocabulary::fit(train.iter().map(|&i| &prepared.pos[i]), n, d))
}

fn cv_group(
    prepared: &Prepared,
    labels: &[bool],
    splits: &[Split],
    group: FeatureGroup,
    cand: &Candidate,
    opts: TrainOptions,
) -> Result<CvResult, ModelError> {
    cross_validate(splits, labels, cand.c, opts, |s| {
        let vocab = split_vocab(prepared, cand, &s.train);
        (
            group_design(prepared, group, vocab.as_ref(), &s.train),
            group_design(prepared, group, vocab.as_ref(), &s.validation),
        )
    })
}

#[derive(Debug, Clone)]
pub struct GroupFit {
    pub group: FeatureGroup,
    pub candidate: Candidate,
    pub cv: CvResult,
}

/// Selected models and their validation results on one set of splits.
#[derive(Debug, Clone)]
pub struct Selection {
    pub splits: Vec<Split>,
    pub groups: Vec<GroupFit>,
    pub ensemble: Ensemble,
    pub combined: CvResult,
}

impl Selection {
    pub fn hyperparameters(&self) -> Vec<(String, Candidate)> {
        self.groups
            .iter()
            .map(|g| (g.group.name().to_string(), g.candidate))
            .collect()
    }
}

/// Grid search of each feature group, then of the ensemble weights, by mean
/// validation AUC over puzzle-aware splits.
pub fn select_models(
    prepared: &Prepared,
    labels: &[bool],
    cfg: &PipelineConfig,
) -> Result<Selection, PipelineError> {
    if prepared.is_empty() {
        return Err(PipelineError::NoGames);
    }
    let splits = puzzle_aware_splits(&prepared.puzzles, labels, cfg.n_iter, cfg.train_frac, cfg.seed)?;
    let mut groups = Vec::new();
    for group in FeatureGroup::ALL {
        let cands = cfg.grid.candidates(group == FeatureGroup::Pos);
        let results = cands
            .par_iter()
            .map(|c| cv_group(prepared, labels, &splits, group, c, cfg.train))
            .collect::<Result<Vec<_>, _>>()?;
        let scored: Vec<(Candidate, f64)> = cands
            .iter()
            .zip(&results)
            .map(|(c, r)| (*c, r.mean_auc))
            .collect();
        let best = select_candidate(&scored).ok_or(ModelError::InvalidParameter("empty grid".into()))?;
        groups.push(GroupFit {
            group,
            candidate: cands[best],
            cv: results.into_iter().nth(best).expect("index in range"),
        });
    }
    let members: Vec<&CvResult> = groups.iter().map(|g| &g.cv).collect();
    let (ensemble, combined) = ensemble_search(&members, &splits, labels, cfg.grid.weight_steps)?;
    Ok(Selection {
        splits,
        groups,
        ensemble,
        combined,
    })
}

/// Validation results of fixed hyperparameters on the given splits: one per
/// group, then the ensemble.
pub fn evaluate_fixed(
    prepared: &Prepared,
    labels: &[bool],
    splits: &[Split],
    members: &[(FeatureGroup, Candidate)],
    ensemble: &Ensemble,
    opts: TrainOptions,
) -> Result<Vec<CvResult>, ModelError> {
    let mut out = members
        .iter()
        .map(|(g, c)| cv_group(prepared, labels, splits, *g, c, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let preds = (0..splits.len())
        .map(|s| {
            let probs: Vec<&[f64]> = out.iter().map(|r| r.predictions[s].as_slice()).collect();
            ensemble.combine(&probs)
        })
        .collect();
    out.push(CvResult::from_predictions(preds, splits, labels)?);
    Ok(out)
}

pub const FEATURE_SETS: [&str; 5] = ["baseline", "linguistic", "interaction", "pos", "all"];

fn member_list(sel: &[(String, Candidate)]) -> Vec<(FeatureGroup, Candidate)> {
    sel.iter()
        .map(|(g, c)| (FeatureGroup::from_name(g).expect("known group"), *c))
        .collect()
}

/// Chosen hyperparameters of every group plus ensemble weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChosenSettings {
    pub members: Vec<(String, Candidate)>,
    pub ensemble_weights: Vec<f64>,
}

/// Cross-validated reports for each feature set and the combined model. With
/// `fixed` settings the grid search is skipped.
pub fn evaluate(
    prepared: &Prepared,
    cfg: &PipelineConfig,
    fixed: Option<&ChosenSettings>,
    lexicon_checksum: &str,
) -> Result<Vec<EvalReport>, PipelineError> {
    if prepared.is_empty() {
        return Err(PipelineError::NoGames);
    }
    let labels = prepared.objective_labels(cfg.objective);
    let (settings, results) = match fixed {
        None => {
            let sel = select_models(prepared, &labels, cfg)?;
            let settings = ChosenSettings {
                members: sel.hyperparameters(),
                ensemble_weights: sel.ensemble.weights.clone(),
            };
            let mut results: Vec<CvResult> = sel.groups.into_iter().map(|g| g.cv).collect();
            results.push(sel.combined);
            (settings, results)
        }
        Some(s) => {
            let splits =
                puzzle_aware_splits(&prepared.puzzles, &labels, cfg.n_iter, cfg.train_frac, cfg.seed)?;
            let ens = Ensemble {
                weights: s.ensemble_weights.clone(),
            };
            let r = evaluate_fixed(prepared, &labels, &splits, &member_list(&s.members), &ens, cfg.train)?;
            (s.clone(), r)
        }
    };
    let members = member_list(&settings.members);
    let ensemble = Ensemble {
        weights: settings.ensemble_weights.clone(),
    };

    let observed: Vec<f64> = results.iter().map(|r| r.mean_auc).collect();
    let perms = if cfg.n_perm > 0 {
        Some(permutation_test_many(&labels, &observed, cfg.n_perm, cfg.seed, |y| {
            let splits = puzzle_aware_splits(&prepared.puzzles, y, cfg.n_iter, cfg.train_frac, cfg.seed)?;
            let r = evaluate_fixed(prepared, y, &splits, &members, &ensemble, cfg.train)?;
            Ok(r.iter().map(|c| c.mean_auc).collect())
        })?)
    } else {
        None
    };
    let resampled = if cfg.bootstrap_splits > 0 {
        let seed = iteration_seed(cfg.seed, usize::MAX);
        let splits =
            puzzle_aware_splits(&prepared.puzzles, &labels, cfg.bootstrap_splits, cfg.train_frac, seed)?;
        let r = evaluate_fixed(prepared, &labels, &splits, &members, &ensemble, cfg.train)?;
        Some(r.iter().map(|c| (c.mean_auc, c.sd_auc())).collect::<Vec<_>>())
    } else {
        None
    };

    // report order follows FEATURE_SETS; results follow FeatureGroup::ALL then the ensemble
    let index_of = |set: &str| match set {
        "all" => results.len() - 1,
        g => FeatureGroup::ALL
            .iter()
            .position(|x| x.name() == g)
            .expect("known feature set"),
    };
    let cfg_hash = config_hash(cfg);
    let n_positive = labels.iter().filter(|&&l| l).count();
    Ok(FEATURE_SETS
        .iter()
        .map(|set| {
            let i = index_of(set);
            let r = &results[i];
            let hp = if *set == "all" {
                Hyperparameters {
                    members: settings.members.clone(),
                    ensemble_weights: Some(settings.ensemble_weights.clone()),
                }
            } else {
                Hyperparameters {
                    members: vec![settings.members[i].clone()],
                    ensemble_weights: None,
                }
            };
            EvalReport {
                objective: cfg.objective.code().to_string(),
                mode: cfg.mode.code().to_string(),
                feature_set: set.to_string(),
                n_games: labels.len(),
                n_positive,
                aucs: r.aucs.clone(),
                mean_auc: r.mean_auc,
                sd_auc: r.sd_auc(),
                p_value: perms.as_ref().map(|p| p[i].p_value),
                n_perm: cfg.n_perm,
                hyperparameters: hp,
                resampled: resampled.as_ref().map(|v| v[i]),
                seed: cfg.seed,
                config_hash: cfg_hash.clone(),
                lexicon_checksum: lexicon_checksum.to_string(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupArtifact {
    pub group: FeatureGroup,
    pub candidate: Candidate,
    pub feature_names: Vec<String>,
    pub pos_vocabulary: Option<PosVocabulary>,
    pub standardizer: Standardizer<f64>,
    pub model: LogRegModel<f64>,
}

/// Models refitted on every prepared game with the selected settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub registry_hash: String,
    pub objective: Objective,
    pub mode: Mode,
    pub seed: u64,
    pub groups: Vec<GroupArtifact>,
    pub ensemble_weights: Vec<f64>,
    pub config_hash: String,
    pub lexicon_checksum: String,
}

impl ModelArtifact {
    pub fn settings(&self) -> ChosenSettings {
        ChosenSettings {
            members: self
                .groups
                .iter()
                .map(|g| (g.group.name().to_string(), g.candidate))
                .collect(),
            ensemble_weights: self.ensemble_weights.clone(),
        }
    }

    /// Combined probability for each prepared game.
    pub fn predict(&self, prepared: &Prepared) -> Result<Vec<f64>, PipelineError> {
        if self.registry_hash != registry_hash() {
            return Err(PipelineError::Artifact("feature registry changed".into()));
        }
        let idx: Vec<usize> = (0..prepared.len()).collect();
        let member_probs: Vec<Vec<f64>> = self
            .groups
            .iter()
            .map(|g| {
                let d = group_design(prepared, g.group, g.pos_vocabulary.as_ref(), &idx);
                g.model.predict_proba(g.standardizer.apply(&d).view()).to_vec()
            })
            .collect();
        let refs: Vec<&[f64]> = member_probs.iter().map(Vec::as_slice).collect();
        Ok(Ensemble {
            weights: self.ensemble_weights.clone(),
        }
        .combine(&refs))
    }
}

/// Selects settings on puzzle-aware splits, then refits every group on all
/// prepared games.
pub fn train_final(
    prepared: &Prepared,
    cfg: &PipelineConfig,
    lexicon_checksum: &str,
) -> Result<ModelArtifact, PipelineError> {
    let labels = prepared.objective_labels(cfg.objective);
    let sel = select_models(prepared, &labels, cfg)?;
    let all: Vec<usize> = (0..prepared.len()).collect();
    let groups = sel
        .groups
        .iter()
        .map(|g| {
            let vocab = split_vocab(prepared, &g.candidate, &all);
            let d = group_design(prepared, g.group, vocab.as_ref(), &all);
            let (standardizer, x) = Standardizer::fit_apply(&d);
            let model = train_logreg(x.view(), &labels, g.candidate.c, cfg.train)?;
            let feature_names = match &vocab {
                Some(v) => v.ngrams.clone(),
                None => group_features(g.group).iter().map(|s| s.to_string()).collect(),
            };
            Ok(GroupArtifact {
                group: g.group,
                candidate: g.candidate,
                feature_names,
                pos_vocabulary: vocab,
                standardizer,
                model,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    Ok(ModelArtifact {
        registry_hash: registry_hash(),
        objective: cfg.objective,
        mode: cfg.mode,
        seed: cfg.seed,
        groups,
        ensemble_weights: sel.ensemble.weights,
        config_hash: config_hash(cfg),
        lexicon_checksum: lexicon_checksum.to_string(),
    })
}

/// Class counts per objective.
pub fn class_balance(labels: &[ConstructivenessLabel]) -> BTreeMap<&'static str, (usize, usize)> {
    Objective::ALL
        .iter()
        .map(|o| {
            let pos = labels.iter().filter(|l| l.objective(*o)).count();
            (o.code(), (pos, labels.len() - pos))
        })
        .collect()
}
