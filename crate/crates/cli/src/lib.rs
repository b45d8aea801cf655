//! The `affect` command: chat server, scripted local runs, log export,
//! analyses and dialogue-act classifier training.

use std::fs;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use affect_analysis::{build_report, export_csv, parse_log_dir, Analyzer, ReportKind};
use affect_chat::http::{serve, ServeOptions};
use affect_chat::session_log::parse_tsv;
use affect_chat::stdio::run_stdio;
use affect_chat::{ChatServer, Clock, ManualClock, Resources, ScenarioKind, SessionConfig, SessionLog, SessionMeta, SystemClock};
use affect_core::control::ProfileKind;
use affect_core::lexicon::{load_lexicons, resolve_lexicon_dir};
use affect_core::perception::dialogue_act::{cross_validate, load_corpus};
use affect_core::perception::{ClassifierVersion, LinearDaModel, SentimentConfig, TrainConfig};
use affect_core::{bundled_data_dir, default_lexicon_dir};
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "affect", version, about = "Affective chat agent: serve, run, export, analyze")]
pub struct Cli {
    /// Directory holding scenarios, patterns, profiles and corpora.
    #[arg(long, global = true)]
    pub data_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Report {
    WordCount,
    Categories,
    Sentiment,
}

impl From<Report> for ReportKind {
    fn from(r: Report) -> Self {
        match r {
            Report::WordCount => ReportKind::WordCount,
            Report::Categories => ReportKind::Categories,
            Report::Sentiment => ReportKind::Sentiment,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Websocket chat server with the experimenter console endpoints.
    Serve {
        /// TOML server config.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Address to listen on, e.g. 127.0.0.1:8080.
        #[arg(long)]
        listen: Option<String>,
    },
    /// One session driven by JSON frames on stdin (or --script), frames out on stdout.
    RunLocal {
        #[arg(long)]
        scenario: ScenarioKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "neutral")]
        profile: ProfileKind,
        /// Session length in seconds; the scenario default otherwise.
        #[arg(long)]
        duration: Option<u64>,
        #[arg(long)]
        script: Option<PathBuf>,
        /// Write the closed session's TSV and JSON here.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Use real time instead of a manual clock moved by `wait` frames.
        #[arg(long)]
        wall_clock: bool,
        /// Leave the session running at end of input.
        #[arg(long)]
        no_finish: bool,
    },
    /// Download a closed session's log from a running server.
    Export {
        #[arg(long)]
        room: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "http://127.0.0.1:8080")]
        server: String,
    },
    /// Text analyses over a directory of exported logs.
    Analyze {
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        lexicons: Option<PathBuf>,
        /// Dialogue-act model; checked for readability, not used by the reports.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum)]
        report: Report,
        #[arg(long, default_value = "v3_1")]
        classifier: ClassifierVersion,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-validate and train the dialogue-act classifier.
    TrainDa {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 12)]
        epochs: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// `serve --config` file. Relative paths resolve against the file.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerConfig {
    pub listen: Option<String>,
    pub data_dir: Option<PathBuf>,
    pub lexicons: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub tick_ms: Option<u64>,
    pub export_dir: Option<PathBuf>,
}

impl ServerConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut c: Self = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut c.data_dir, &mut c.lexicons, &mut c.model, &mut c.export_dir].into_iter().flatten() {
            *p = base.join(&*p);
        }
        Ok(c)
    }
}

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

fn resources(data_dir: &Path, lexicons: Option<&Path>, model: Option<&Path>) -> Result<Resources> {
    let lexicons = lexicons
        .map(Path::to_path_buf)
        .unwrap_or_else(|| resolve_lexicon_dir(data_dir.join("lexicons")));
    Ok(Resources::load(data_dir, &lexicons, model)?)
}

pub fn run(cli: Cli) -> Result<()> {
    let data_dir = cli.data_dir.clone().unwrap_or_else(bundled_data_dir);
    match cli.command {
        Command::Serve { config, listen } => {
            let cfg = config.as_deref().map(ServerConfig::load).transpose()?.unwrap_or_default();
            let data_dir = cfg.data_dir.clone().unwrap_or(data_dir);
            let res = resources(&data_dir, cfg.lexicons.as_deref(), cfg.model.as_deref())?;
            let server = Arc::new(ChatServer::new(Arc::new(res), Arc::new(SystemClock)));
            let listen = listen.or(cfg.listen).unwrap_or_else(|| DEFAULT_LISTEN.into());
            let opts = ServeOptions {
                tick: Duration::from_millis(cfg.tick_ms.unwrap_or(1000).max(1)),
                export_dir: cfg.export_dir,
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(&listen).await?;
                log::info!("listening on {}", listener.local_addr()?);
                serve(server, listener, opts).await
            })?;
            Ok(())
        }
        Command::RunLocal {
            scenario,
            seed,
            profile,
            duration,
            script,
            export,
            wall_clock,
            no_finish,
        } => {
            let res = resources(&data_dir, None, None)?;
            let (clock, manual): (Arc<dyn Clock>, Option<Arc<ManualClock>>) = if wall_clock {
                (Arc::new(SystemClock), None)
            } else {
                let m = Arc::new(ManualClock::at_epoch());
                (m.clone(), Some(m))
            };
            let server = ChatServer::new(Arc::new(res), clock);
            let mut config = SessionConfig::new(scenario).with_seed(seed).with_profile(profile);
            config.duration = duration;
            let room = server.create_session(&config)?;
            let stdout = io::stdout();
            let mut out = stdout.lock();
            match script {
                Some(p) => {
                    let f = fs::File::open(&p).with_context(|| format!("opening {}", p.display()))?;
                    run_stdio(&server, manual, BufReader::new(f), &mut out, !no_finish)?
                }
                None => run_stdio(&server, manual, io::stdin().lock(), &mut out, !no_finish)?,
            }
            if let Some(dir) = export {
                let log = server.export_log(&room)?;
                let (tsv, json) = log.write_to(&dir)?;
                eprintln!("wrote {} and {}", tsv.display(), json.display());
            }
            Ok(())
        }
        Command::Export { room, out, server } => {
            let url = format!("{}/sessions/{room}/export", server.trim_end_matches('/'));
            let resp = reqwest::blocking::get(&url).with_context(|| format!("GET {url}"))?;
            let status = resp.status();
            let body = resp.text()?;
            if !status.is_success() {
                bail!("{url}: {status}: {body}");
            }
            #[derive(Deserialize)]
            struct Exported {
                tsv: String,
                json: SessionMeta,
            }
            let e: Exported = serde_json::from_str(&body).context("export response")?;
            let log = SessionLog {
                messages: parse_tsv(&e.tsv)?,
                meta: e.json,
            };
            let (tsv, json) = log.write_to(&out)?;
            println!("wrote {} and {}", tsv.display(), json.display());
            Ok(())
        }
        Command::Analyze {
            logs,
            lexicons,
            model,
            report,
            classifier,
            out,
        } => {
            let lexicons = lexicons.unwrap_or_else(default_lexicon_dir);
            let bundle = load_lexicons(&lexicons).with_context(|| format!("lexicons in {}", lexicons.display()))?;
            if let Some(m) = &model {
                LinearDaModel::load(m).with_context(|| format!("model {}", m.display()))?;
            }
            let sentiment = SentimentConfig::load(&lexicons, classifier)?;
            let analyzer = Analyzer::new(Arc::new(bundle), sentiment);
            let records = parse_log_dir(&logs, &analyzer)?;
            let rows = build_report(&records, report.into());
            export_csv(&rows, &out)?;
            println!("{} utterances, {} rows written to {}", records.len(), rows.len(), out.display());
            if let Some(r) = rows.iter().find(|r| r.metric == "word_ratio").and_then(|r| r.mean) {
                let verdict = if r > 2.0 { "more than twice" } else { "not more than twice" };
                println!("system/user word ratio {r:.2} ({verdict})");
            }
            Ok(())
        }
        Command::TrainDa {
            corpus,
            out,
            folds,
            epochs,
            seed,
        } => {
            let corpus_path = corpus.unwrap_or_else(|| data_dir.join("corpus/da.tsv"));
            let corpus = load_corpus(&corpus_path)?;
            let bundle = load_lexicons(resolve_lexicon_dir(data_dir.join("lexicons")))?;
            let config = TrainConfig { epochs, seed };
            let cv = cross_validate(&corpus, &bundle.modifiers, folds, config)?;
            for (i, acc) in cv.fold_accuracy.iter().enumerate() {
                println!("fold {:>2}: {acc:.3}", i + 1);
            }
            println!("{}-fold accuracy {:.3} ({}/{})", cv.folds, cv.accuracy(), cv.correct, cv.total);
            if let Some(out) = out {
                let model = LinearDaModel::train(&corpus, &bundle.modifiers, config)?;
                model.save(&out)?;
                println!("model written to {}", out.display());
            }
            Ok(())
        }
    }
}
