//! Flag and config-file handling. A config file is flat `key = value` text;
//! flags given on the command line win over file values.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thematic_core::{CountMode, Format, KPolicy, LabelFilter, Scheme, DEFAULT_CERTAINTY_THRESHOLD};

#[derive(Debug)]
pub enum ConfigError {
    Cli(clap::Error),
    UnknownKey { key: String, line: usize },
    Invalid { key: String, value: String, reason: String },
    Missing { key: &'static str, command: &'static str },
    Conflict(String),
    Unreadable { path: PathBuf, reason: String },
}

impl std::error::Error for ConfigError {}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Cli(err) => f.write_str(err.to_string().trim_end()),
            ConfigError::UnknownKey { key, line } => write!(f, "unknown config key {key:?} on line {line}"),
            ConfigError::Invalid { key, value, reason } => write!(f, "invalid value {value:?} for {key}: {reason}"),
            ConfigError::Missing { key, command } => write!(f, "`{command}` requires {key}"),
            ConfigError::Conflict(msg) => f.write_str(msg),
            ConfigError::Unreadable { path, reason } => write!(f, "cannot read config {}: {reason}", path.display()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "thematic",
    version,
    about = "Event-conditioned thematic context vectors for short-text corpora"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize and tokenize a corpus, writing corpus.jsonl
    Ingest(Flags),
    /// Dataset summary (documents, vocabulary, tokens, time span)
    Stats(Flags),
    /// Tweet-length and per-event occurrence time series as CSV
    Series(Flags),
    /// Ranked thematic context vectors for the query's events
    Rank(Flags),
    /// K-means clustering of the corpus under each weighting scheme
    Cluster(Flags),
    /// Silhouette comparison of TF, TF-IDF and thematic weighting
    Compare(Flags),
}

impl Command {
    pub fn split(self) -> (CommandName, Flags) {
        match self {
            Command::Ingest(f) => (CommandName::Ingest, f),
            Command::Stats(f) => (CommandName::Stats, f),
            Command::Series(f) => (CommandName::Series, f),
            Command::Rank(f) => (CommandName::Rank, f),
            Command::Cluster(f) => (CommandName::Cluster, f),
            Command::Compare(f) => (CommandName::Compare, f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Ingest,
    Stats,
    Series,
    Rank,
    Cluster,
    Compare,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Ingest => "ingest",
            CommandName::Stats => "stats",
            CommandName::Series => "series",
            CommandName::Rank => "rank",
            CommandName::Cluster => "cluster",
            CommandName::Compare => "compare",
        }
    }
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "jsonl" | "json-lines" | "jsonlines" => Ok(Format::JsonLines),
        other => Err(format!("unknown format {other:?} (expected csv or jsonl)")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("{other:?} is not a boolean")),
    }
}

fn parse_schemes(s: &str) -> Result<Vec<Scheme>, String> {
    s.split(',').map(|p| Scheme::from_str(p.trim())).collect()
}

/// Every setting, all optional so the file and flag layers can be merged.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Flat `key = value` config file supplying defaults
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input corpus (CSV or JSON lines)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input format; guessed from the extension when omitted
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
    /// Stopword file replacing the built-in English list
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub min_token_len: Option<usize>,
    /// Free-text query; its in-corpus terms become events
    #[arg(long)]
    pub query: Option<String>,
    /// How the event count enters the information gain: raw or normalized
    #[arg(long, value_parser = CountMode::from_str)]
    pub count_mode: Option<CountMode>,
    /// Ranked weights below this value are labelled certain
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Keep only the first N entries per context vector
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Label filter applied with --top-k: certain, uncertain or all
    #[arg(long, value_parser = LabelFilter::from_str)]
    pub label: Option<LabelFilter>,
    /// Comma-separated weighting schemes: tf,tfidf,thematic
    #[arg(long, value_delimiter = ',', value_parser = Scheme::from_str)]
    pub schemes: Option<Vec<Scheme>>,
    /// Fixed number of clusters (disables elbow selection)
    #[arg(long)]
    pub k: Option<usize>,
    /// Largest k tried by elbow selection
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip malformed rows instead of failing
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_parser = parse_bool)]
    pub lenient: Option<bool>,
    /// Also write the term → document incidence table (rank only)
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_parser = parse_bool)]
    pub dump_index: Option<bool>,
}

impl Flags {
    /// Parses a config file body into the same shape as the flags.
    pub fn from_config_text(text: &str) -> Result<Self, ConfigError> {
        let mut flags = Flags::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Invalid {
                    key: format!("line {}", n + 1),
                    value: line.to_string(),
                    reason: "expected `key = value`".into(),
                });
            };
            let key = key.trim().replace('-', "_");
            let value = value.trim().trim_matches('"').to_string();
            flags.set(&key, &value, n + 1)?;
        }
        Ok(flags)
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        fn parse<T, E: ToString>(key: &str, value: &str, f: impl Fn(&str) -> Result<T, E>) -> Result<T, ConfigError> {
            f(value).map_err(|e| ConfigError::Invalid {
                key: key.to_string(),
                value: value.to_string(),
                reason: e.to_string(),
            })
        }
        match key {
            "input" => self.input = Some(value.into()),
            "format" => self.format = Some(parse(key, value, parse_format)?),
            "stopwords" => self.stopwords = Some(value.into()),
            "min_token_len" => self.min_token_len = Some(parse(key, value, usize::from_str)?),
            "query" => self.query = Some(value.into()),
            "count_mode" => self.count_mode = Some(parse(key, value, CountMode::from_str)?),
            "threshold" => self.threshold = Some(parse(key, value, f64::from_str)?),
            "top_k" => self.top_k = Some(parse(key, value, usize::from_str)?),
            "label" => self.label = Some(parse(key, value, LabelFilter::from_str)?),
            "schemes" => self.schemes = Some(parse(key, value, parse_schemes)?),
            "k" => self.k = Some(parse(key, value, usize::from_str)?),
            "k_max" => self.k_max = Some(parse(key, value, usize::from_str)?),
            "seed" => self.seed = Some(parse(key, value, u64::from_str)?),
            "restarts" => self.restarts = Some(parse(key, value, usize::from_str)?),
            "max_iter" => self.max_iter = Some(parse(key, value, usize::from_str)?),
            "out" => self.out = Some(value.into()),
            "lenient" => self.lenient = Some(parse(key, value, parse_bool)?),
            "dump_index" => self.dump_index = Some(parse(key, value, parse_bool)?),
            other => {
                return Err(ConfigError::UnknownKey {
                    key: other.to_string(),
                    line,
                })
            }
        }
        Ok(())
    }

    /// Fills every unset field from `base`.
    pub fn over(self, base: Flags) -> Flags {
        Flags {
            config: self.config.or(base.config),
            input: self.input.or(base.input),
            format: self.format.or(base.format),
            stopwords: self.stopwords.or(base.stopwords),
            min_token_len: self.min_token_len.or(base.min_token_len),
            query: self.query.or(base.query),
            count_mode: self.count_mode.or(base.count_mode),
            threshold: self.threshold.or(base.threshold),
            top_k: self.top_k.or(base.top_k),
            label: self.label.or(base.label),
            schemes: self.schemes.or(base.schemes),
            k: self.k.or(base.k),
            k_max: self.k_max.or(base.k_max),
            seed: self.seed.or(base.seed),
            restarts: self.restarts.or(base.restarts),
            max_iter: self.max_iter.or(base.max_iter),
            out: self.out.or(base.out),
            lenient: self.lenient.or(base.lenient),
            dump_index: self.dump_index.or(base.dump_index),
        }
    }
}

/// The effective settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandName,
    pub input: PathBuf,
    pub format: Format,
    pub stopwords: Option<PathBuf>,
    pub min_token_len: usize,
    pub query: Option<String>,
    pub count_mode: CountMode,
    pub threshold: f64,
    pub top_k: Option<usize>,
    pub label: LabelFilter,
    pub schemes: Vec<Scheme>,
    pub k_policy: KPolicy,
    pub seed: Option<u64>,
    pub restarts: usize,
    pub max_iter: usize,
    pub out: PathBuf,
    pub lenient: bool,
    pub dump_index: bool,
}

impl RunConfig {
    /// Stable key → value view echoed into the manifest. The output directory
    /// is left out so runs into different directories stay comparable.
    pub fn echo(&self) -> BTreeMap<&'static str, String> {
        let mut map = BTreeMap::new();
        map.insert("command", self.command.as_str().to_string());
        map.insert("input", self.input.display().to_string());
        map.insert(
            "format",
            match self.format {
                Format::Csv => "csv",
                Format::JsonLines => "jsonl",
            }
            .to_string(),
        );
        if let Some(s) = &self.stopwords {
            map.insert("stopwords", s.display().to_string());
        }
        map.insert("min_token_len", self.min_token_len.to_string());
        if let Some(q) = &self.query {
            map.insert("query", q.clone());
        }
        map.insert("count_mode", self.count_mode.to_string());
        map.insert("threshold", self.threshold.to_string());
        if let Some(k) = self.top_k {
            map.insert("top_k", k.to_string());
        }
        map.insert(
            "label",
            match self.label {
                LabelFilter::Certain => "certain",
                LabelFilter::Uncertain => "uncertain",
                LabelFilter::All => "all",
            }
            .to_string(),
        );
        map.insert(
            "schemes",
            self.schemes.iter().map(|s| s.name()).collect::<Vec<_>>().join(","),
        );
        match self.k_policy {
            KPolicy::Fixed(k) => map.insert("k", k.to_string()),
            KPolicy::Elbow { k_max } => map.insert("k_max", k_max.to_string()),
        };
        if let Some(seed) = self.seed {
            map.insert("seed", seed.to_string());
        }
        map.insert("restarts", self.restarts.to_string());
        map.insert("max_iter", self.max_iter.to_string());
        map.insert("lenient", self.lenient.to_string());
        map.insert("dump_index", self.dump_index.to_string());
        map
    }
}

fn read_config_file(path: &Path) -> Result<Flags, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    Flags::from_config_text(&text)
}

/// Merges flags over the optional config file and validates the result for
/// `command`.
pub fn resolve(command: CommandName, flags: Flags) -> Result<RunConfig, ConfigError> {
    let flags = match flags.config.clone() {
        Some(path) => flags.over(read_config_file(&path)?),
        None => flags,
    };
    let name = command.as_str();
    let input = flags.input.ok_or(ConfigError::Missing {
        key: "--input",
        command: name,
    })?;
    if input.as_os_str().is_empty() {
        return Err(ConfigError::Missing {
            key: "--input",
            command: name,
        });
    }
    let schemes = flags.schemes.unwrap_or_else(|| Scheme::ALL.to_vec());
    if schemes.is_empty() {
        return Err(ConfigError::Missing {
            key: "--schemes",
            command: name,
        });
    }
    let needs_query = match command {
        CommandName::Rank => true,
        CommandName::Cluster | CommandName::Compare => schemes.contains(&Scheme::Thematic),
        _ => false,
    };
    if needs_query && flags.query.as_deref().is_none_or(|q| q.trim().is_empty()) {
        return Err(ConfigError::Missing {
            key: "--query",
            command: name,
        });
    }
    let needs_seed = matches!(command, CommandName::Cluster | CommandName::Compare);
    if needs_seed && flags.seed.is_none() {
        return Err(ConfigError::Missing {
            key: "--seed",
            command: name,
        });
    }
    let k_policy = match (flags.k, flags.k_max) {
        (Some(_), Some(_)) => return Err(ConfigError::Conflict("--k and --k-max are mutually exclusive".into())),
        (Some(0), None) => {
            return Err(ConfigError::Invalid {
                key: "k".into(),
                value: "0".into(),
                reason: "must be at least 1".into(),
            })
        }
        (Some(k), None) => KPolicy::Fixed(k),
        (None, Some(k_max)) if k_max < 3 => {
            return Err(ConfigError::Invalid {
                key: "k_max".into(),
                value: k_max.to_string(),
                reason: "elbow selection needs at least 3".into(),
            })
        }
        (None, k_max) => KPolicy::Elbow {
            k_max: k_max.unwrap_or(10),
        },
    };
    let threshold = flags.threshold.unwrap_or(DEFAULT_CERTAINTY_THRESHOLD);
    if !threshold.is_finite() {
        return Err(ConfigError::Invalid {
            key: "threshold".into(),
            value: threshold.to_string(),
            reason: "must be finite".into(),
        });
    }
    if flags.top_k == Some(0) {
        return Err(ConfigError::Invalid {
            key: "top_k".into(),
            value: "0".into(),
            reason: "must be at least 1".into(),
        });
    }
    let format = flags.format.unwrap_or_else(|| Format::from_path(&input));
    Ok(RunConfig {
        command,
        input,
        format,
        stopwords: flags.stopwords,
        min_token_len: flags.min_token_len.unwrap_or(2),
        query: flags.query,
        count_mode: flags.count_mode.unwrap_or_default(),
        threshold,
        top_k: flags.top_k,
        label: flags.label.unwrap_or_default(),
        schemes,
        k_policy,
        seed: flags.seed,
        restarts: flags.restarts.unwrap_or(8).max(1),
        max_iter: flags.max_iter.unwrap_or(100).max(1),
        out: flags.out.unwrap_or_else(|| PathBuf::from("out")),
        lenient: flags.lenient.unwrap_or(false),
        dump_index: flags.dump_index.unwrap_or(false),
    })
}

/// Parses an argument list (including the program name) into a run config.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(ConfigError::Cli)?;
    let (command, flags) = cli.command.split();
    resolve(command, flags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_flags_map_onto_config() {
        let cfg = parse_config([
            "thematic",
            "rank",
            "--input",
            "s4.csv",
            "--query",
            "medical care",
            "--seed",
            "7",
        ])
        .unwrap();
        assert_eq!(cfg.command, CommandName::Rank);
        assert_eq!(cfg.query.as_deref(), Some("medical care"));
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.count_mode, CountMode::Raw);
        assert_eq!(cfg.threshold, 1.0);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.k_policy, KPolicy::Elbow { k_max: 10 });
    }

    #[test]
    fn flags_override_file() {
        let file = Flags::from_config_text("seed = 1\nquery = care\ncount-mode = normalized\n").unwrap();
        let flags = Flags {
            input: Some("s4.csv".into()),
            seed: Some(7),
            ..Default::default()
        };
        let cfg = resolve(CommandName::Compare, flags.over(file)).unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.query.as_deref(), Some("care"));
        assert_eq!(cfg.count_mode, CountMode::Normalized);
    }

    #[test]
    fn bad_count_mode_names_the_flag() {
        let err = parse_config(["thematic", "rank", "--input", "a.csv", "--count-mode", "bogus"]).unwrap_err();
        assert!(err.to_string().contains("--count-mode"), "{err}");
    }

    #[test]
    fn unknown_and_mistyped_keys() {
        let err = Flags::from_config_text("colour = blue").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { ref key, line: 1 } if key == "colour"));
        let err = Flags::from_config_text("# c\nseed = soon").unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
    }

    #[test]
    fn required_inputs_per_command() {
        let missing_input = parse_config(["thematic", "stats"]).unwrap_err();
        assert!(missing_input.to_string().contains("--input"));
        let missing_seed = parse_config(["thematic", "compare", "--input", "a.csv", "--query", "x"]).unwrap_err();
        assert!(missing_seed.to_string().contains("--seed"));
        let missing_query = parse_config(["thematic", "rank", "--input", "a.csv"]).unwrap_err();
        assert!(missing_query.to_string().contains("--query"));
        // Baseline-only clustering does not need a query.
        parse_config([
            "thematic",
            "cluster",
            "--input",
            "a.csv",
            "--seed",
            "1",
            "--schemes",
            "tf,tfidf",
        ])
        .unwrap();
    }

    #[test]
    fn k_policy_validation() {
        let cfg = parse_config([
            "thematic",
            "cluster",
            "--input",
            "a.csv",
            "--seed",
            "1",
            "--schemes",
            "tf",
            "--k",
            "3",
        ])
        .unwrap();
        assert_eq!(cfg.k_policy, KPolicy::Fixed(3));
        assert!(parse_config(["thematic", "stats", "--input", "a", "--k", "3", "--k-max", "5"]).is_err());
        assert!(parse_config(["thematic", "stats", "--input", "a", "--k-max", "2"]).is_err());
    }

    #[test]
    fn bare_boolean_flags() {
        let cfg = parse_config(["thematic", "ingest", "--input", "a.jsonl", "--lenient"]).unwrap();
        assert!(cfg.lenient);
        assert_eq!(cfg.format, Format::JsonLines);
    }
}
