//! Executes one subcommand and writes its artifacts plus `manifest.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use sha2::{Digest, Sha256};
use thematic_core::rank::context_vectors_csv;
use thematic_core::{
    build_ulist, compare_methods, corpus_stats, elbow_select, event_occurrence_series, extract_events, inertia_curve,
    kmeans, partition_certainty, rank, silhouette, to_sorted_json, top_k, tweet_length_series, vectorize,
    CompareOptions, ContextVector, CooccurrenceIndex, Corpus, Error, EventSet, IngestOptions, KMeansParams, KPolicy,
    Scheme, SeriesPoint, StopwordList,
};

use crate::config::{CommandName, RunConfig};

/// A failed run, classified for the exit code.
#[derive(Debug)]
pub enum RunError {
    Input { stage: &'static str, message: String },
    Compute { stage: &'static str, message: String },
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Input { .. } => 3,
            RunError::Compute { .. } => 4,
        }
    }

    fn core(stage: &'static str, err: Error) -> Self {
        let message = err.to_string();
        if err.is_input_error() {
            RunError::Input { stage, message }
        } else {
            RunError::Compute { stage, message }
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Input { stage, message } => write!(f, "input error [{stage}]: {message}"),
            RunError::Compute { stage, message } => write!(f, "error [{stage}]: {message}"),
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Tracks written files so a failed run can remove its partial output.
struct Outputs {
    dir: PathBuf,
    written: Vec<(String, String)>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self, RunError> {
        fs::create_dir_all(dir).map_err(|e| RunError::Compute {
            stage: "output",
            message: format!("cannot create {}: {e}", dir.display()),
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| RunError::Compute {
            stage: "output",
            message: format!("cannot write {}: {e}", path.display()),
        })?;
        self.written.push((name.to_string(), sha256_hex(contents.as_bytes())));
        Ok(())
    }

    fn discard(&self) {
        for (name, _) in &self.written {
            let _ = fs::remove_file(self.dir.join(name));
        }
        let _ = fs::remove_file(self.dir.join("manifest.json"));
    }
}

struct Context {
    corpus: Corpus,
    options: IngestOptions,
    input_sha256: String,
    stopwords_sha256: Option<String>,
    warnings: Vec<String>,
}

fn read_bytes(path: &Path, stage: &'static str) -> Result<Vec<u8>, RunError> {
    fs::read(path).map_err(|e| RunError::Input {
        stage,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn load(config: &RunConfig) -> Result<Context, RunError> {
    let (stopwords, stopwords_sha256) = match &config.stopwords {
        Some(path) => {
            let bytes = read_bytes(path, "stopwords")?;
            let text = String::from_utf8_lossy(&bytes);
            (StopwordList::parse(&text), Some(sha256_hex(&bytes)))
        }
        None => (StopwordList::english(), None),
    };
    let options = IngestOptions {
        stopwords,
        min_token_len: config.min_token_len,
        lenient: config.lenient,
    };
    // Read the bytes once so the manifest hashes exactly what was parsed.
    let bytes = read_bytes(&config.input, "ingest")?;
    let (corpus, report) = thematic_core::ingest::ingest_reader(bytes.as_slice(), config.format, &options)
        .map_err(|e| RunError::core("ingest", e))?;
    let mut warnings = Vec::new();
    for (line, reason) in &report.skipped {
        warnings.push(format!("skipped line {line}: {reason}"));
    }
    if corpus.is_empty() {
        warnings.push(format!("{} contains no documents", config.input.display()));
    }
    Ok(Context {
        corpus,
        options,
        input_sha256: sha256_hex(&bytes),
        stopwords_sha256,
        warnings,
    })
}

fn events_for(config: &RunConfig, ctx: &mut Context) -> EventSet {
    let query = config.query.as_deref().unwrap_or("");
    let events = extract_events(query, &ctx.corpus, &ctx.options);
    if events.is_empty() && !query.trim().is_empty() {
        ctx.warnings
            .push(format!("no term of the query {query:?} occurs in the corpus"));
    }
    events
}

fn series_csv(points: &[SeriesPoint]) -> String {
    let mut out = String::from("timestamp,value\n");
    for p in points {
        out.push_str(&format!("{},{}\n", p.timestamp, p.value));
    }
    out
}

fn context_vectors(config: &RunConfig, ctx: &Context, events: &EventSet) -> Result<Vec<ContextVector>, RunError> {
    let index = CooccurrenceIndex::build(&ctx.corpus);
    let ulist = build_ulist(&index, events, config.count_mode).map_err(|e| RunError::core("rank", e))?;
    Ok(rank(ulist)
        .into_iter()
        .map(|cv| partition_certainty(cv, config.threshold))
        .collect())
}

fn kmeans_params(config: &RunConfig) -> KMeansParams {
    KMeansParams {
        seed: config.seed.unwrap_or_default(),
        max_iter: config.max_iter,
        restarts: config.restarts,
    }
}

fn run_ingest(ctx: &Context, out: &mut Outputs) -> Result<(), RunError> {
    let mut body = String::new();
    for doc in ctx.corpus.documents() {
        let value = serde_json::to_value(doc).expect("document serializes");
        body.push_str(&value.to_string());
        body.push('\n');
    }
    out.write("corpus.jsonl", &body)
}

fn run_series(config: &RunConfig, ctx: &mut Context, out: &mut Outputs) -> Result<(), RunError> {
    out.write("tweet_length.csv", &series_csv(&tweet_length_series(&ctx.corpus)))?;
    if config.query.is_some() {
        let events = events_for(config, ctx);
        for event in events.iter() {
            out.write(
                &format!("event_{event}.csv"),
                &series_csv(&event_occurrence_series(&ctx.corpus, event)),
            )?;
        }
    }
    Ok(())
}

fn run_rank(config: &RunConfig, ctx: &mut Context, out: &mut Outputs) -> Result<(), RunError> {
    let events = events_for(config, ctx);
    let mut vectors = context_vectors(config, ctx, &events)?;
    if let Some(k) = config.top_k {
        vectors = vectors.iter().map(|cv| top_k(cv, k, config.label)).collect();
    }
    if !events.is_empty() && vectors.iter().all(|cv| cv.entries.is_empty()) {
        ctx.warnings.push("no keyword co-occurs with any event".into());
    }
    out.write("context_vectors.json", &to_sorted_json(&vectors))?;
    out.write("context_vectors.csv", &context_vectors_csv(&vectors))?;
    if config.dump_index {
        let index = CooccurrenceIndex::build(&ctx.corpus);
        let doc_ids: Vec<&str> = ctx.corpus.documents().iter().map(|d| d.id.as_str()).collect();
        let dump = json!({
            "doc_ids": doc_ids,
            "incidence": index.incidence_table(),
            "total_tokens": index.total_token_count(),
        });
        out.write("index.json", &to_sorted_json(&dump))?;
    }
    Ok(())
}

fn inertia_csv(rows: impl IntoIterator<Item = (String, usize, f64)>, with_scheme: bool) -> String {
    let mut out = String::from(if with_scheme {
        "scheme,k,inertia\n"
    } else {
        "k,inertia\n"
    });
    for (scheme, k, inertia) in rows {
        if with_scheme {
            out.push_str(&format!("{scheme},{k},{inertia}\n"));
        } else {
            out.push_str(&format!("{k},{inertia}\n"));
        }
    }
    out
}

fn run_cluster(config: &RunConfig, ctx: &mut Context, out: &mut Outputs) -> Result<(), RunError> {
    let stage = "cluster";
    let context = if config.schemes.contains(&Scheme::Thematic) {
        let events = events_for(config, ctx);
        context_vectors(config, ctx, &events)?
    } else {
        Vec::new()
    };
    let params = kmeans_params(config);
    for &scheme in &config.schemes {
        let vectors = vectorize(&ctx.corpus, scheme, Some(&context)).map_err(|e| RunError::core(stage, e))?;
        let (vectors, skipped) = thematic_core::cluster::drop_empty(vectors);
        if skipped > 0 {
            ctx.warnings
                .push(format!("{scheme}: skipped {skipped} empty document vectors"));
        }
        let (k, curve) = match config.k_policy {
            KPolicy::Fixed(k) => (k, None),
            KPolicy::Elbow { k_max } => {
                let curve =
                    inertia_curve(&vectors, k_max.min(vectors.len()), &params).map_err(|e| RunError::core(stage, e))?;
                (elbow_select(&curve).map_err(|e| RunError::core(stage, e))?, Some(curve))
            }
        };
        let result = kmeans(&vectors, k, &params).map_err(|e| RunError::core(stage, e))?;
        let curve = curve.unwrap_or_else(|| vec![(k, result.inertia)]);
        let score = silhouette(&vectors, &result.assignments).ok();
        let report = json!({
            "scheme": scheme,
            "result": result,
            "inertia_curve": curve,
            "silhouette": score,
            "skipped_docs": skipped,
        });
        out.write(&format!("clustering_{scheme}.json"), &to_sorted_json(&report))?;
        let rows = curve.iter().map(|&(k, i)| (String::new(), k, i));
        out.write(&format!("inertia_{scheme}.csv"), &inertia_csv(rows, false))?;
    }
    Ok(())
}

fn run_compare(config: &RunConfig, ctx: &mut Context, out: &mut Outputs) -> Result<(), RunError> {
    let events = if config.schemes.contains(&Scheme::Thematic) {
        events_for(config, ctx)
    } else {
        EventSet::default()
    };
    let options = CompareOptions {
        schemes: config.schemes.clone(),
        k_policy: config.k_policy,
        kmeans: kmeans_params(config),
        count_mode: config.count_mode,
    };
    let report = compare_methods(&ctx.corpus, &events, &options).map_err(|e| RunError::core("compare", e))?;
    for (scheme, r) in &report.schemes {
        if r.skipped_docs > 0 {
            ctx.warnings
                .push(format!("{scheme}: skipped {} empty document vectors", r.skipped_docs));
        }
    }
    out.write("comparison.json", &report.to_json())?;
    let rows = report
        .schemes
        .iter()
        .flat_map(|(s, r)| r.inertia_curve.iter().map(move |&(k, i)| (s.to_string(), k, i)));
    out.write("inertia_curves.csv", &inertia_csv(rows, true))
}

fn manifest(config: &RunConfig, ctx: &Context, outputs: &Outputs) -> String {
    let echo = config.echo();
    let outputs: Vec<_> = outputs
        .written
        .iter()
        .map(|(file, sha)| json!({ "file": file, "sha256": sha }))
        .collect();
    let mut inputs = BTreeMap::new();
    inputs.insert("input", ctx.input_sha256.clone());
    if let Some(sha) = &ctx.stopwords_sha256 {
        inputs.insert("stopwords", sha.clone());
    }
    to_sorted_json(&json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": config.command.as_str(),
        "config": echo,
        "config_digest": sha256_hex(to_sorted_json(&echo).as_bytes()),
        "input_sha256": inputs,
        "outputs": outputs,
        "warnings": ctx.warnings,
    }))
}

/// Runs the configured command. Warnings are returned for the caller to
/// print; on error every file written by this run is removed.
pub fn execute(config: &RunConfig) -> Result<Vec<String>, RunError> {
    let mut ctx = load(config)?;
    let mut out = Outputs::new(&config.out)?;
    let result = match config.command {
        CommandName::Ingest => run_ingest(&ctx, &mut out),
        CommandName::Stats => out.write("stats.json", &to_sorted_json(&corpus_stats(&ctx.corpus))),
        CommandName::Series => run_series(config, &mut ctx, &mut out),
        CommandName::Rank => run_rank(config, &mut ctx, &mut out),
        CommandName::Cluster => run_cluster(config, &mut ctx, &mut out),
        CommandName::Compare => run_compare(config, &mut ctx, &mut out),
    };
    let result = result.and_then(|()| {
        let body = manifest(config, &ctx, &out);
        fs::write(out.dir.join("manifest.json"), body).map_err(|e| RunError::Compute {
            stage: "output",
            message: format!("cannot write manifest: {e}"),
        })
    });
    match result {
        Ok(()) => Ok(ctx.warnings),
        Err(err) => {
            out.discard();
            Err(err)
        }
    }
}
