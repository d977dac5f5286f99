use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use teamtalk::corpus::{filter_corpus, read_corpus, read_corpus_lenient, FilterConfig, FilterReport};
use teamtalk::geo::{convergence_profile, label_game, score, score_profile, summarize_solo};
use teamtalk::ideaflow::extract_ideas;
use teamtalk::lingfeat::PosVocabulary;
use teamtalk::model::EvalReport;
use teamtalk::pipeline::{
    class_balance, config_hash, evaluate, prepare, train_final, ModelArtifact, PipelineConfig,
    Prepared, FEATURE_SETS,
};
use teamtalk::{FeatureVector, Featurizer, GameRecord, LexiconSet, Mode, Objective};

use crate::output::{cell, histogram, histogram_svg, OutDir, Provenance};
use crate::{Command, CorpusArgs, ModelArgs};

/// Bad flag values that clap cannot catch. Exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

enum Lexicons {
    Builtin(&'static LexiconSet),
    Loaded(Box<LexiconSet>),
}

impl Lexicons {
    fn load(dir: Option<&Path>) -> Result<Self> {
        Ok(match dir {
            None => Lexicons::Builtin(LexiconSet::builtin()),
            Some(d) => Lexicons::Loaded(Box::new(
                LexiconSet::load_dir(d).with_context(|| format!("loading lexicons from {}", d.display()))?,
            )),
        })
    }

    fn get(&self) -> &LexiconSet {
        match self {
            Lexicons::Builtin(l) => l,
            Lexicons::Loaded(l) => l,
        }
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    command: &'a Command,
    config_hash: &'a str,
    lexicon_checksum: &'a str,
    lexicon_files: &'a BTreeMap<String, String>,
}

fn open_out(root: &Path, command: &Command, lexicons: &LexiconSet) -> Result<OutDir> {
    let provenance = Provenance {
        config_hash: config_hash(command),
        lexicon_checksum: lexicons.checksum(),
    };
    let out = OutDir::create(root, provenance)?;
    out.json(
        "config.json",
        &RunRecord {
            command,
            config_hash: &out.provenance.config_hash,
            lexicon_checksum: &out.provenance.lexicon_checksum,
            lexicon_files: &lexicons.checksums,
        },
    )?;
    Ok(out)
}

fn filter_config(strict_cheat: bool) -> FilterConfig {
    FilterConfig {
        strict_cheat,
        ..FilterConfig::default()
    }
}

/// Reads a corpus, stopping at the first invalid line, and applies the
/// quality filters.
fn load_games(io: &CorpusArgs) -> Result<(Vec<GameRecord>, FilterReport)> {
    let f = File::open(&io.corpus).with_context(|| format!("opening {}", io.corpus.display()))?;
    let games = read_corpus(BufReader::new(f)).with_context(|| format!("reading {}", io.corpus.display()))?;
    let (kept, report) = filter_corpus(&games, &filter_config(io.strict_cheat));
    eprintln!(
        "{} games read, {} kept, {} rejected by filters",
        games.len(),
        kept.len(),
        report.rejected.len()
    );
    Ok((kept, report))
}

pub fn run(command: &Command) -> Result<bool> {
    match command {
        Command::Validate {
            corpus,
            lexicons,
            out,
            strict_cheat,
        } => validate(command, corpus, lexicons.as_deref(), out.as_deref(), *strict_cheat),
        Command::Score { io } => score_games(command, io),
        Command::Analyze {
            io,
            bins,
            svg,
            profile_len,
        } => analyze(command, io, *bins, *svg, *profile_len),
        Command::Featurize {
            io,
            mode,
            pos_n,
            min_df,
        } => featurize(command, io, (*mode).into(), *pos_n, *min_df),
        Command::Train { io, model } => train(command, io, model),
        Command::Evaluate {
            io,
            model,
            n_perm,
            bootstrap_splits,
            model_path,
        } => evaluate_cmd(command, io, model, *n_perm, *bootstrap_splits, model_path.as_deref()),
        Command::Report { reports, out } => report(command, reports, out),
        Command::Synth {
            out,
            n_games,
            n_puzzles,
            seed,
        } => synth(command, out, *n_games, *n_puzzles, *seed),
    }
}

#[derive(Serialize)]
struct InvalidLine {
    line: usize,
    error: String,
}

#[derive(Serialize)]
struct Validation {
    lines: usize,
    invalid: Vec<InvalidLine>,
    filters: FilterReport,
}

fn validate(
    command: &Command,
    corpus: &Path,
    lexicons: Option<&Path>,
    out: Option<&Path>,
    strict_cheat: bool,
) -> Result<bool> {
    let lx = Lexicons::load(lexicons)?;
    let f = File::open(corpus).with_context(|| format!("opening {}", corpus.display()))?;
    let lines = read_corpus_lenient(BufReader::new(f))?;
    let mut games = Vec::new();
    let mut invalid = Vec::new();
    let n_lines = lines.len();
    for (line, r) in lines {
        match r {
            Ok(g) => games.push(g),
            Err(e) => {
                eprintln!("line {line}: {e}");
                invalid.push(InvalidLine {
                    line,
                    error: e.to_string(),
                });
            }
        }
    }
    let (kept, filters) = filter_corpus(&games, &filter_config(strict_cheat));
    eprintln!(
        "{n_lines} records, {} invalid, {} kept after filters",
        invalid.len(),
        kept.len()
    );
    let mut by_reason: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &filters.rejected {
        *by_reason.entry(r.reason.code()).or_default() += 1;
    }
    for (reason, n) in &by_reason {
        eprintln!("  {reason}: {n}");
    }
    let ok = invalid.is_empty();
    if let Some(root) = out {
        let out = open_out(root, command, lx.get())?;
        out.json_stamped(
            "validation.json",
            &Validation {
                lines: n_lines,
                invalid,
                filters,
            },
        )?;
    }
    Ok(ok)
}

fn write_rejections(out: &OutDir, report: &FilterReport) -> Result<()> {
    let mut w = out.csv("rejected.csv", &["game_id", "reason"])?;
    for r in &report.rejected {
        w.write_record([r.game_id.as_str(), r.reason.code()])?;
    }
    w.flush()?;
    Ok(())
}

fn score_games(command: &Command, io: &CorpusArgs) -> Result<bool> {
    let lx = Lexicons::load(io.lexicons.as_deref())?;
    let out = open_out(&io.out, command, lx.get())?;
    let (games, filters) = load_games(io)?;
    write_rejections(&out, &filters)?;
    let mut w = out.csv(
        "scores.csv",
        &[
            "game_id", "puzzle_id", "team_size", "n_solo", "team_score", "solo_mean", "solo_best",
            "solo_worst", "c_avg", "c_best", "c_worst", "PP", "P", "MM",
        ],
    )?;
    let mut labelled = Vec::new();
    for g in &games {
        let Some(team) = g.final_guess else { continue };
        let solo: Vec<f64> = g
            .solo_guesses
            .iter()
            .map(|s| score(s.location, g.true_location).value())
            .collect();
        let (Ok(summary), Ok(label)) = (summarize_solo(&solo), label_game(g)) else {
            eprintln!("{}: no solo guesses, not scored", g.game_id);
            continue;
        };
        let flag = |b: bool| if b { "1" } else { "0" }.to_string();
        w.write_record([
            g.game_id.clone(),
            g.puzzle_id.clone(),
            g.team_size().to_string(),
            solo.len().to_string(),
            score(team, g.true_location).value().to_string(),
            summary.mean.to_string(),
            summary.best.to_string(),
            summary.worst.to_string(),
            label.c_avg.to_string(),
            label.c_best.to_string(),
            label.c_worst.to_string(),
            flag(label.obj_best),
            flag(label.obj_constructive),
            flag(label.obj_worst),
        ])?;
        labelled.push(label);
    }
    w.flush()?;
    let mut w = out.csv("class_balance.csv", &["objective", "positive", "negative"])?;
    for (obj, (p, n)) in class_balance(&labelled) {
        w.write_record([obj.to_string(), p.to_string(), n.to_string()])?;
    }
    w.flush()?;
    Ok(true)
}

fn analyze(command: &Command, io: &CorpusArgs, bins: usize, svg: bool, k: usize) -> Result<bool> {
    if bins == 0 {
        bail!(UsageError("--bins must be at least 1".into()));
    }
    let lx = Lexicons::load(io.lexicons.as_deref())?;
    let lexicons = lx.get();
    let out = open_out(&io.out, command, lexicons)?;
    let (games, filters) = load_games(io)?;
    write_rejections(&out, &filters)?;
    let fz = Featurizer::new(lexicons);

    let ideas: Vec<_> = games
        .par_iter()
        .map(|g| {
            let conv = fz.conversation(g);
            extract_ideas(&conv.messages, &lexicons.stopwords, &lexicons.hedges)
        })
        .collect();
    let mut w = out.csv(
        "ideas.csv",
        &[
            "game_id", "term", "introducer", "intro_msg", "intro_hedged", "adopter", "adopt_msg",
            "adopt_hedged",
        ],
    )?;
    for (g, events) in games.iter().zip(&ideas) {
        for e in events {
            for a in &e.adoptions {
                w.write_record([
                    g.game_id.as_str(),
                    &e.term,
                    &e.introducer,
                    &e.intro_msg_index.to_string(),
                    if e.intro_hedged { "1" } else { "0" },
                    &a.player,
                    &a.msg_index.to_string(),
                    if a.hedged { "1" } else { "0" },
                ])?;
            }
        }
    }
    w.flush()?;

    let mut conv_w = out.csv("convergence.csv", &["game_id", "step", "distance_km"])?;
    let mut prof_w = out.csv("score_profile.csv", &["game_id", "stage", "step", "score"])?;
    let mut skipped = 0;
    for g in &games {
        let (Ok(conv), Ok(prof)) = (convergence_profile(g, k), score_profile(g, k)) else {
            skipped += 1;
            continue;
        };
        for (i, d) in conv.iter().enumerate() {
            let step = i as i64 - k as i64;
            conv_w.write_record([g.game_id.clone(), step.to_string(), d.to_string()])?;
        }
        if let Some(s) = prof.mean_solo {
            prof_w.write_record([g.game_id.clone(), "solo".into(), "0".into(), s.value().to_string()])?;
        }
        for (i, s) in prof.intermediate.iter().enumerate() {
            prof_w.write_record([
                g.game_id.clone(),
                "intermediate".into(),
                (i + 1).to_string(),
                s.value().to_string(),
            ])?;
        }
        prof_w.write_record([
            g.game_id.clone(),
            "final".into(),
            (k + 1).to_string(),
            prof.final_score.value().to_string(),
        ])?;
    }
    conv_w.flush()?;
    prof_w.flush()?;
    if skipped > 0 {
        eprintln!("{skipped} games with fewer than {k} marker moves left out of the profiles");
    }

    let c_avg: Vec<f64> = games.iter().filter_map(|g| label_game(g).ok()).map(|l| l.c_avg).collect();
    let hist = histogram(&c_avg, bins);
    let mut w = out.csv("constructiveness_hist.csv", &["bin_lo", "bin_hi", "count"])?;
    for b in &hist {
        w.write_record([b.lo.to_string(), b.hi.to_string(), b.count.to_string()])?;
    }
    w.flush()?;
    if svg {
        out.text(
            "constructiveness_hist.svg",
            &histogram_svg(&hist, "c_avg (team score minus mean solo score)", &out.provenance),
        )?;
    }
    Ok(true)
}

fn write_exclusions(out: &OutDir, prepared: &Prepared) -> Result<()> {
    let mut w = out.csv("excluded.csv", &["game_id", "reason"])?;
    for (id, reason) in &prepared.excluded {
        w.write_record([id, reason])?;
    }
    w.flush()?;
    Ok(())
}

fn prepare_games(io: &CorpusArgs, lexicons: &LexiconSet, out: &OutDir, mode: Mode, max_order: usize) -> Result<Prepared> {
    let (games, filters) = load_games(io)?;
    write_rejections(out, &filters)?;
    let defaults = PipelineConfig::default();
    let prepared = prepare(&games, lexicons, mode, defaults.horizon_s, defaults.max_coverage, max_order);
    write_exclusions(out, &prepared)?;
    eprintln!("{} games prepared, {} excluded", prepared.len(), prepared.excluded.len());
    if prepared.is_empty() {
        bail!("no games left to model");
    }
    Ok(prepared)
}

#[derive(Serialize)]
struct VocabularyFile<'a> {
    mode: &'a str,
    vocabulary: &'a PosVocabulary,
}

fn featurize(command: &Command, io: &CorpusArgs, mode: Mode, pos_n: usize, min_df: usize) -> Result<bool> {
    if pos_n == 0 {
        bail!(UsageError("--pos-n must be at least 1".into()));
    }
    let lx = Lexicons::load(io.lexicons.as_deref())?;
    let out = open_out(&io.out, command, lx.get())?;
    let prepared = prepare_games(io, lx.get(), &out, mode, pos_n)?;
    let vocab = PosVocabulary::fit(&prepared.pos, pos_n, min_df);
    let rows: Vec<FeatureVector> = prepared
        .scalars
        .iter()
        .zip(&prepared.pos)
        .map(|(s, p)| FeatureVector::assemble(s, &vocab.transform(p), &vocab))
        .collect();
    let names: Vec<&str> = rows
        .first()
        .map(|r| r.names.iter().map(String::as_str).collect())
        .unwrap_or_default();
    let header: Vec<&str> = ["game_id", "puzzle_id"].into_iter().chain(names).collect();
    let mut w = out.csv("features.csv", &header)?;
    for ((id, puzzle), row) in prepared.game_ids.iter().zip(&prepared.puzzles).zip(&rows) {
        let mut rec = vec![id.clone(), puzzle.clone()];
        rec.extend(
            row.values
                .iter()
                .zip(&row.mask)
                .map(|(v, m)| cell(m.then_some(*v))),
        );
        w.write_record(&rec)?;
    }
    w.flush()?;
    out.json_stamped(
        "pos_vocabulary.json",
        &VocabularyFile {
            mode: mode.code(),
            vocabulary: &vocab,
        },
    )?;
    Ok(true)
}

fn pipeline_config(model: &ModelArgs) -> Result<PipelineConfig> {
    if !(model.train_frac > 0.0 && model.train_frac < 1.0) {
        bail!(UsageError("--train-frac must lie strictly between 0 and 1".into()));
    }
    if model.n_iter == 0 {
        bail!(UsageError("--n-iter must be at least 1".into()));
    }
    Ok(PipelineConfig {
        mode: model.mode.into(),
        objective: model.objective.into(),
        seed: model.seed,
        n_iter: model.n_iter,
        train_frac: model.train_frac,
        ..PipelineConfig::default()
    })
}

fn train(command: &Command, io: &CorpusArgs, model: &ModelArgs) -> Result<bool> {
    let cfg = pipeline_config(model)?;
    let lx = Lexicons::load(io.lexicons.as_deref())?;
    let out = open_out(&io.out, command, lx.get())?;
    let prepared = prepare_games(io, lx.get(), &out, cfg.mode, cfg.grid.max_pos_n())?;
    let mut artifact = train_final(&prepared, &cfg, &out.provenance.lexicon_checksum)?;
    artifact.config_hash = out.provenance.config_hash.clone();
    out.json("model.json", &artifact)?;
    Ok(true)
}

fn report_name(objective: Objective, mode: Mode) -> String {
    format!("eval_{}_{}", objective.code().to_ascii_lowercase(), mode.code())
}

fn evaluate_cmd(
    command: &Command,
    io: &CorpusArgs,
    model: &ModelArgs,
    n_perm: usize,
    bootstrap_splits: usize,
    model_path: Option<&Path>,
) -> Result<bool> {
    let cfg = PipelineConfig {
        n_perm,
        bootstrap_splits,
        ..pipeline_config(model)?
    };
    let fixed = match model_path {
        None => None,
        Some(p) => {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            let a: ModelArtifact = serde_json::from_reader(BufReader::new(f))
                .with_context(|| format!("reading model {}", p.display()))?;
            if a.objective != cfg.objective || a.mode != cfg.mode {
                eprintln!(
                    "warning: model was trained for {} / {}, evaluating {} / {}",
                    a.objective.code(),
                    a.mode.code(),
                    cfg.objective.code(),
                    cfg.mode.code()
                );
            }
            Some(a.settings())
        }
    };
    let lx = Lexicons::load(io.lexicons.as_deref())?;
    let out = open_out(&io.out, command, lx.get())?;
    let max_order = match &fixed {
        Some(s) => s
            .members
            .iter()
            .filter_map(|(_, c)| c.pos_n)
            .max()
            .unwrap_or(1),
        None => cfg.grid.max_pos_n(),
    };
    let prepared = prepare_games(io, lx.get(), &out, cfg.mode, max_order)?;
    let mut reports = evaluate(&prepared, &cfg, fixed.as_ref(), &out.provenance.lexicon_checksum)?;
    for r in &mut reports {
        r.config_hash = out.provenance.config_hash.clone();
    }
    let name = report_name(cfg.objective, cfg.mode);
    out.json(&format!("{name}.json"), &reports)?;
    let mut w = out.csv(
        &format!("{name}.csv"),
        &["feature_set", "objective", "mode", "n_games", "n_positive", "mean_auc", "sd_auc", "p_value", "stars"],
    )?;
    for r in &reports {
        w.write_record([
            r.feature_set.clone(),
            r.objective.clone(),
            r.mode.clone(),
            r.n_games.to_string(),
            r.n_positive.to_string(),
            r.mean_auc.to_string(),
            r.sd_auc.to_string(),
            cell(r.p_value),
            r.stars().to_string(),
        ])?;
        eprintln!("{:<12} AUC {:.3} {}", r.feature_set, r.mean_auc, r.stars());
    }
    w.flush()?;
    Ok(true)
}

fn read_reports(path: &Path) -> Result<Vec<EvalReport>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(many) = serde_json::from_str::<Vec<EvalReport>>(&text) {
        return Ok(many);
    }
    let one: EvalReport =
        serde_json::from_str(&text).with_context(|| format!("{} is not an evaluation report", path.display()))?;
    Ok(vec![one])
}

const ROW_LABELS: [&str; 5] = ["Baseline", "Linguistic", "Interaction", "POS", "All"];

/// Cell label per (feature set, column), with columns objectives by modes.
pub fn table(reports: &[EvalReport]) -> (Vec<String>, Vec<Vec<String>>) {
    let columns: Vec<(&str, &str)> = Objective::ALL
        .iter()
        .flat_map(|o| [Mode::Full, Mode::Early20].map(|m| (o.code(), m.code())))
        .collect();
    let mut cells: BTreeMap<(&str, &str, &str), &EvalReport> = BTreeMap::new();
    for r in reports {
        if cells
            .insert((r.feature_set.as_str(), r.objective.as_str(), r.mode.as_str()), r)
            .is_some()
        {
            eprintln!(
                "warning: several reports for {} / {} / {}, keeping the last",
                r.feature_set, r.objective, r.mode
            );
        }
    }
    let header = std::iter::once("feature_set".to_string())
        .chain(columns.iter().map(|(o, m)| format!("{o} {m}")))
        .collect();
    let rows = FEATURE_SETS
        .iter()
        .zip(ROW_LABELS)
        .map(|(set, label)| {
            std::iter::once(label.to_string())
                .chain(columns.iter().map(|(o, m)| {
                    cells
                        .get(&(*set, *o, *m))
                        .map_or(String::new(), |r| format!("{:.2}{}", r.mean_auc, r.stars()))
                }))
                .collect()
        })
        .collect();
    (header, rows)
}

fn report(command: &Command, paths: &[std::path::PathBuf], root: &Path) -> Result<bool> {
    let mut reports = Vec::new();
    for p in paths {
        reports.extend(read_reports(p)?);
    }
    let checksums: BTreeSet<&str> = reports.iter().map(|r| r.lexicon_checksum.as_str()).collect();
    if checksums.len() > 1 {
        eprintln!("warning: reports were produced with different lexicons");
    }
    let provenance = Provenance {
        config_hash: config_hash(command),
        lexicon_checksum: checksums.into_iter().collect::<Vec<_>>().join("+"),
    };
    let out = OutDir::create(root, provenance)?;
    out.json_stamped("config.json", &BTreeMap::from([("command", command)]))?;
    let (header, rows) = table(&reports);
    let mut w = out.csv("table.csv", &header.iter().map(String::as_str).collect::<Vec<_>>())?;
    for r in &rows {
        w.write_record(r)?;
    }
    w.flush()?;
    let mut md = format!("<!-- {} -->\n\n", out.provenance.comment().trim_start_matches("# "));
    md.push_str(&format!("| {} |\n", header.join(" | ")));
    md.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for r in &rows {
        md.push_str(&format!("| {} |\n", r.join(" | ")));
    }
    md.push_str("\nMean validation AUC. * p < 0.05, ** p < 0.01, *** p < 0.001 (label permutation test).\n");
    out.text("table.md", &md)?;
    Ok(true)
}

#[derive(Serialize)]
struct SynthRecord<'a> {
    config: &'a teamtalk::synth::SynthConfig,
    n_quick: usize,
}

fn synth(command: &Command, root: &Path, n_games: usize, n_puzzles: usize, seed: u64) -> Result<bool> {
    if n_puzzles == 0 || n_games == 0 {
        bail!(UsageError("--n-games and --n-puzzles must be at least 1".into()));
    }
    let cfg = teamtalk::synth::SynthConfig {
        n_games,
        n_puzzles,
        seed,
        ..Default::default()
    };
    let (games, manifest) = teamtalk::synth::generate_corpus(&cfg)?;
    let out = open_out(root, command, LexiconSet::builtin())?;
    let mut f = std::io::BufWriter::new(File::create(out.path("corpus.jsonl"))?);
    teamtalk::corpus::write_corpus(&games, &mut f)?;
    f.flush()?;
    let mut w = out.csv("manifest.csv", &["game_id", "puzzle_id", "archetype", "quick"])?;
    for m in &manifest {
        w.write_record([
            m.game_id.as_str(),
            &m.puzzle_id,
            &m.archetype,
            if m.quick { "1" } else { "0" },
        ])?;
    }
    w.flush()?;
    out.json_stamped(
        "synth.json",
        &SynthRecord {
            config: &cfg,
            n_quick: manifest.iter().filter(|m| m.quick).count(),
        },
    )?;
    eprintln!("{} games written to {}", games.len(), out.path("corpus.jsonl").display());
    Ok(true)
}
