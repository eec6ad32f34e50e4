// Copyright 2026 The rdfvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


//! `rdfvc` command-line interface.
//!
//! Repository commands go through the service API: in process by default, or
//! over HTTP with `--server`. The harness commands (`generate`,
//! `verify-replay`, `fuzz-merge`) always run locally.

use std::io::{Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rdfvc_core::harness::fuzz::{fuzz_merge, FuzzConfig};
use rdfvc_core::harness::gen::{gen_dataset, gen_patch_log};
use rdfvc_core::harness::patchlog::PatchLog;
use rdfvc_core::harness::replay::verify_replay;
use rdfvc_core::history::Repository;
use rdfvc_core::atomic::atomic_partition;
use rdfvc_core::rdf::{parse_nquads, Dataset};
use rdfvc_proto::*;
use rdfvc_server::{LocalApi, Service};

const EXIT_ERROR: u8 = 1;
const EXIT_CONFLICTS: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "rdfvc", version, about = "Version control for RDF datasets")]
struct Cli {
    /// Repository directory.
    #[arg(long, global = true, default_value = ".")]
    repo: PathBuf,
    /// Talk to a running service instead of opening the repository.
    #[arg(long, global = true, env = "RDFVC_SERVER")]
    server: Option<String>,
    /// Tab-separated output for scripts.
    #[arg(long, global = true)]
    porcelain: bool,
    #[arg(long, global = true, env = "RDFVC_AUTHOR")]
    author: Option<String>,
    /// Commit timestamp in seconds, for reproducible histories.
    #[arg(long, global = true, hide = true, env = "RDFVC_TIMESTAMP")]
    timestamp: Option<i64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Create an empty repository.
    Init,
    Status,
    /// Record the contents of an N-Quads file as the new state of the branch.
    Commit {
        #[arg(short, long)]
        message: String,
        /// `-` reads standard input.
        #[arg(short, long)]
        file: PathBuf,
    },
    Log { rev: Option<String> },
    /// Class-level difference between two revisions.
    Diff { from: String, to: String },
    /// Print the dataset of a revision as canonical N-Quads.
    Show { rev: Option<String> },
    /// List branches, or create one.
    Branch { name: Option<String>, at: Option<String> },
    Checkout { name: String },
    Merge(MergeArgs),
    /// Finish a conflicted merge with `keep <hash>` / `drop <hash>` lines.
    Resolve {
        #[arg(short, long)]
        file: PathBuf,
    },
    /// Undo the change introduced by a commit.
    Revert { rev: String },
    #[command(subcommand)]
    Remote(RemoteCommand),
    Push {
        remote: String,
        branch: String,
        /// Defaults to the current branch.
        #[arg(long)]
        local: Option<String>,
    },
    Pull {
        remote: String,
        branch: String,
        #[arg(short, long, default_value = "three-way")]
        strategy: String,
        #[arg(short = 'o', long)]
        conflicts_out: Option<PathBuf>,
    },
    /// Serve the repository over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        addr: String,
    },
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Replay an update log into a fresh repository and compare every
    /// snapshot with an independent reference store.
    VerifyReplay {
        #[arg(short, long)]
        initial: PathBuf,
        #[arg(short, long)]
        log: PathBuf,
        /// Repository to replay into; a temporary one by default.
        #[arg(long)]
        into: Option<PathBuf>,
    },
    /// Randomized three-way merges checked against class arithmetic.
    FuzzMerge {
        #[arg(short, long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = FuzzConfig::default().base_size)]
        base_size: usize,
        #[arg(long, default_value_t = FuzzConfig::default().blank_ratio)]
        blank_ratio: f64,
        #[arg(long, default_value_t = FuzzConfig::default().max_edit)]
        max_edit: usize,
    },
}

#[derive(Args, Debug)]
struct MergeArgs {
    #[arg(required_unless_present = "abort")]
    rev: Option<String>,
    #[arg(short, long, default_value = "three-way")]
    strategy: String,
    #[arg(short, long)]
    message: Option<String>,
    /// Discard a pending conflicted merge.
    #[arg(long, conflicts_with_all = ["rev", "message"])]
    abort: bool,
    /// Also write the conflict file here.
    #[arg(short = 'o', long)]
    conflicts_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum RemoteCommand {
    Add { name: String, path: PathBuf },
    List,
}

#[derive(Subcommand, Debug)]
enum GenerateCommand {
    /// A random dataset as canonical N-Quads.
    Dataset {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.2)]
        blank_ratio: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// A random update log against an initial dataset.
    Log {
        #[arg(short, long)]
        initial: PathBuf,
        #[arg(long)]
        transactions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn error(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_ERROR,
            message: message.into(),
        }
    }
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        Failure::error(e.message)
    }
}

impl From<rdfvc_core::Error> for Failure {
    fn from(e: rdfvc_core::Error) -> Self {
        Failure::error(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    let runtime = match tokio::runtime::Builder::new_multi_thread().enable_all().build() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    match runtime.block_on(run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn connect(cli: &Cli) -> Box<dyn Api> {
    match &cli.server {
        Some(url) => Box::new(rdfvc_client::Client::new(url.clone())),
        None => Box::new(LocalApi::new(Service::new(cli.repo.clone()))),
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    let res = if path == Path::new("-") {
        std::io::stdin().read_to_end(&mut buf).map(|_| ())
    } else {
        std::fs::read(path).map(|b| buf = b)
    };
    res.map_err(|e| Failure::error(format!("{}: {e}", path.display())))?;
    Ok(buf)
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let res = match path {
        Some(p) => std::fs::write(p, bytes),
        None => std::io::stdout().lock().write_all(bytes),
    };
    res.map_err(|e| Failure::error(e.to_string()))
}

fn read_dataset(path: &Path) -> Result<Dataset, Failure> {
    parse_nquads(&read_input(path)?).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn short(id: &str) -> &str {
    id.get(..12).unwrap_or(id)
}

async fn run(cli: Cli) -> Outcome {
    let author = Author {
        name: cli.author.clone(),
        timestamp: cli.timestamp,
    };
    let porcelain = cli.porcelain;
    let api = connect(&cli);
    match cli.command {
        Command::Init => {
            let st = api.init().await?;
            if porcelain {
                println!("init\t{}", st.branch);
            } else {
                println!("Initialized empty repository on branch {}", st.branch);
            }
        }
        Command::Status => print_status(&api.status().await?, porcelain),
        Command::Commit { message, file } => {
            let nquads = String::from_utf8(read_input(&file)?).map_err(|e| Failure::error(e.to_string()))?;
            let r = api.commit(CommitRequest { message, nquads, author }).await?;
            print_commit("commit", &r, porcelain);
        }
        Command::Log { rev } => {
            for c in api.log(rev).await? {
                if porcelain {
                    println!(
                        "{}\t{}\t{}\t{}\t{}\t{}",
                        c.id,
                        c.parents.join(","),
                        c.timestamp,
                        c.author,
                        c.strategy.as_deref().unwrap_or("-"),
                        c.message
                    );
                } else {
                    let merge = c.strategy.map(|s| format!(" (merge, {s})")).unwrap_or_default();
                    println!("commit {}{merge}", c.id);
                    println!("Author: {}  Time: {}", c.author, c.timestamp);
                    println!("    {}\n", c.message);
                }
            }
        }
        Command::Diff { from, to } => {
            let d = api.diff(from, to).await?;
            if porcelain {
                println!("diff\t{}\t{}", d.added, d.removed);
            }
            print!("{}", d.text);
        }
        Command::Show { rev } => {
            let s = api.snapshot(rev).await?;
            print!("{}", s.nquads);
        }
        Command::Branch { name: None, at: _ } => {
            let list = api.branches().await?;
            for b in list.branches {
                let mark = if b.name == list.current { "*" } else { " " };
                if porcelain {
                    println!("{mark}\t{}\t{}", b.name, b.head);
                } else {
                    println!("{mark} {} {}", b.name, short(&b.head));
                }
            }
        }
        Command::Branch { name: Some(name), at } => {
            let b = api.create_branch(BranchRequest { name, at }).await?;
            if porcelain {
                println!("branch\t{}\t{}", b.name, b.head);
            } else {
                println!("Created branch {} at {}", b.name, short(&b.head));
            }
        }
        Command::Checkout { name } => {
            let st = api.checkout(CheckoutRequest { name }).await?;
            if porcelain {
                println!("checkout\t{}\t{}", st.branch, st.head.as_deref().unwrap_or("-"));
            } else {
                println!("Switched to branch {}", st.branch);
            }
        }
        Command::Merge(args) if args.abort => {
            let st = api.abort_merge().await?;
            if porcelain {
                println!("abort\t{}", st.branch);
            } else {
                println!("Merge aborted");
            }
        }
        Command::Merge(args) => {
            let req = MergeRequest {
                theirs: args.rev.expect("required unless --abort"),
                strategy: args.strategy,
                message: args.message,
                author,
            };
            let r = api.merge(req).await?;
            return report_merge(&r, args.conflicts_out.as_deref(), porcelain);
        }
        Command::Resolve { file } => {
            let resolution = String::from_utf8(read_input(&file)?).map_err(|e| Failure::error(e.to_string()))?;
            let r = api.resolve(ResolveRequest { resolution, author }).await?;
            print_commit("resolve", &r, porcelain);
        }
        Command::Revert { rev } => {
            let r = api.revert(RevertRequest { rev, author }).await?;
            print_commit("revert", &r, porcelain);
        }
        Command::Remote(RemoteCommand::Add { name, path }) => {
            let path = path.display().to_string();
            let r = api.add_remote(RemoteInfo { name, path }).await?;
            if porcelain {
                println!("remote\t{}\t{}", r.name, r.path);
            }
        }
        Command::Remote(RemoteCommand::List) => {
            for r in api.remotes().await? {
                if porcelain {
                    println!("remote\t{}\t{}", r.name, r.path);
                } else {
                    println!("{} {}", r.name, r.path);
                }
            }
        }
        Command::Push { remote, branch, local } => {
            let r = api
                .push(PushRequest {
                    remote,
                    branch,
                    local_branch: local,
                })
                .await?;
            let previous = r.previous.as_deref().unwrap_or("-");
            if porcelain {
                println!("push\t{previous}\t{}\t{}", r.head, r.objects);
            } else if r.previous.as_deref() == Some(r.head.as_str()) {
                println!("Everything up to date");
            } else {
                println!("{}..{}  ({} objects)", short(previous), short(&r.head), r.objects);
            }
        }
        Command::Pull {
            remote,
            branch,
            strategy,
            conflicts_out,
        } => {
            let r = api
                .pull(PullRequest {
                    remote,
                    branch,
                    strategy,
                    author,
                })
                .await?;
            let head = r.head.as_deref().unwrap_or("-");
            match (r.status, &r.merge) {
                (PullStatus::Conflicts | PullStatus::Merged, Some(m)) => {
                    return report_merge(m, conflicts_out.as_deref(), porcelain);
                }
                (PullStatus::UpToDate, _) if porcelain => println!("pull\tup-to-date\t{head}"),
                (PullStatus::UpToDate, _) => println!("Already up to date"),
                (_, _) if porcelain => println!("pull\tfast-forward\t{head}"),
                (_, _) => println!("Fast-forward to {}", short(head)),
            }
        }
        Command::Serve { addr } => {
            let listener = tokio::net::TcpListener::bind(&addr)
                .await
                .map_err(|e| Failure::error(format!("{addr}: {e}")))?;
            let local = listener.local_addr().map_err(|e| Failure::error(e.to_string()))?;
            println!("listening on http://{local}");
            let _ = std::io::stdout().flush();
            rdfvc_server::serve(listener, Arc::new(Service::new(cli.repo.clone())))
                .await
                .map_err(|e| Failure::error(e.to_string()))?;
        }
        Command::Generate(g) => generate(g)?,
        Command::VerifyReplay { initial, log, into } => {
            let initial = read_dataset(&initial)?;
            let text = String::from_utf8(read_input(&log)?).map_err(|e| Failure::error(e.to_string()))?;
            let log = PatchLog::parse(&text)?;
            let scratch;
            let dir = match into {
                Some(d) => d,
                None => {
                    scratch = tempfile::tempdir().map_err(|e| Failure::error(e.to_string()))?;
                    scratch.path().join("replay")
                }
            };
            let started = Instant::now();
            let repo = Repository::init(&dir)?;
            let r = verify_replay(&repo, &initial, &log)?;
            let secs = started.elapsed().as_secs_f64();
            if porcelain {
                println!("replay\t{}\t{}\t{}\t{}", r.transactions, r.applied, r.skipped, r.mismatches);
            } else {
                println!(
                    "{} transactions: {} applied, {} without effect, {} mismatches ({secs:.1}s)",
                    r.transactions, r.applied, r.skipped, r.mismatches
                );
                if let Some(i) = r.first_mismatch {
                    println!("first mismatch after transaction {i}");
                }
            }
            return Ok(if r.is_ok() { 0 } else { EXIT_VERIFY });
        }
        Command::FuzzMerge {
            n,
            seed,
            base_size,
            blank_ratio,
            max_edit,
        } => {
            let config = FuzzConfig {
                base_size,
                blank_ratio,
                max_edit,
            };
            let started = Instant::now();
            let r = fuzz_merge(n, seed, &config)?;
            let secs = started.elapsed().as_secs_f64();
            if porcelain {
                println!("fuzz\t{}\t{}\t{}", r.iterations, r.failures.len(), r.fingerprint);
            } else {
                println!("{} iterations, {} failures ({secs:.1}s)", r.iterations, r.failures.len());
            }
            for f in &r.failures {
                eprintln!("iteration {} (seed {}): {}", f.iteration, f.seed, f.message);
            }
            return Ok(if r.is_ok() { 0 } else { EXIT_VERIFY });
        }
    }
    Ok(0)
}

fn generate(g: GenerateCommand) -> Result<(), Failure> {
    match g {
        GenerateCommand::Dataset {
            size,
            seed,
            blank_ratio,
            out,
        } => {
            let d = gen_dataset(seed, size, blank_ratio);
            write_output(out.as_deref(), &atomic_partition(&d).canonical_bytes())
        }
        GenerateCommand::Log {
            initial,
            transactions,
            seed,
            out,
        } => {
            let initial = read_dataset(&initial)?;
            let log = gen_patch_log(seed, &initial, transactions);
            write_output(out.as_deref(), log.to_text().as_bytes())
        }
    }
}

fn print_status(st: &Status, porcelain: bool) {
    let head = st.head.as_deref().unwrap_or("-");
    if porcelain {
        println!("status\t{}\t{head}\t{}\t{}", st.branch, st.statements, st.classes);
        if let Some(p) = &st.pending_merge {
            println!("pending\t{}\t{}\t{}", p.ours, p.theirs, p.strategy);
        }
        return;
    }
    println!("On branch {}", st.branch);
    match &st.head {
        Some(h) => println!("Head {h}, {} statements in {} classes", st.statements, st.classes),
        None => println!("No commits yet"),
    }
    if let Some(p) = &st.pending_merge {
        println!(
            "Merging {} ({}): resolve the conflicts or run `merge --abort`",
            short(&p.theirs),
            p.strategy
        );
    }
}

fn print_commit(what: &str, r: &CommitResponse, porcelain: bool) {
    if porcelain {
        println!("{what}\t{}\t{}\t{}", r.id, r.added, r.removed);
    } else {
        println!("[{}] +{} -{} classes", short(&r.id), r.added, r.removed);
    }
}

fn report_merge(r: &MergeResponse, conflicts_out: Option<&Path>, porcelain: bool) -> Outcome {
    let base = r.base.as_deref().unwrap_or("-");
    match r.status {
        MergeStatus::UpToDate if porcelain => println!("merge\tup-to-date\t{}", r.ours),
        MergeStatus::UpToDate => println!("Already up to date"),
        MergeStatus::Merged if porcelain => println!(
            "merge\tmerged\t{}\t{}\t{}",
            r.commit.as_deref().unwrap_or("-"),
            r.strategy,
            r.result_statements
        ),
        MergeStatus::Merged => println!(
            "Merged {} with {} into {} ({} statements)",
            short(&r.theirs),
            r.strategy,
            short(r.commit.as_deref().unwrap_or("-")),
            r.result_statements
        ),
        MergeStatus::Conflicts => {
            if porcelain {
                println!("merge\tconflicts\t{}\t{}\t{base}\t{}", r.ours, r.theirs, r.conflicts.len());
                for c in &r.conflicts {
                    println!("conflict\t{}\t{}", c.side.as_str(), c.class);
                }
            } else {
                println!("{} conflicting classes; nothing was committed", r.conflicts.len());
                for c in &r.conflicts {
                    println!("  {} {}", c.side.as_str(), c.class);
                }
                println!("Resolve with `rdfvc resolve -f <file>` or `rdfvc merge --abort`");
            }
            if let (Some(path), Some(text)) = (conflicts_out, &r.conflict_file) {
                write_output(Some(path), text.as_bytes())?;
            }
            return Ok(EXIT_CONFLICTS);
        }
    }
    Ok(0)
}
