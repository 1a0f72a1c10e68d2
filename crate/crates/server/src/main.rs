use std::fs;
use std::io;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use persuade_core::dialogue::ProfileChoice;
use persuade_core::pack::{covid19, load_pack, ContentPack, PackError};
use persuade_core::sim::{builtin_mix, run_batch, ProfileMix, BUILTIN_MIXES};
use persuade_server::{repl, ws, Service};

#[derive(Parser)]
#[command(name = "persuade", version, about = "Needs-driven persuasive dialogue engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the WebSocket endpoint `/session` and the client page.
    Serve {
        /// Content pack file; the built-in COVID-19 pack when omitted.
        #[arg(long, env = "PERSUADE_PACK")]
        pack: Option<PathBuf>,
        #[arg(long, env = "PERSUADE_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "PERSUADE_BIND", default_value = "127.0.0.1")]
        bind: String,
        /// Directory for JSONL transcripts, one file per session.
        #[arg(long, env = "PERSUADE_TRANSCRIPTS")]
        transcripts: Option<PathBuf>,
        /// Static client files served under `/` instead of the built-in page.
        #[arg(long, env = "PERSUADE_ASSETS")]
        assets: Option<PathBuf>,
    },
    /// Hold a dialogue in the terminal.
    Repl {
        #[arg(long, env = "PERSUADE_PACK")]
        pack: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Profile::Random)]
        profile: Profile,
        /// Write the session transcript here when the dialogue stops.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Content pack tools.
    Pack {
        #[command(subcommand)]
        command: PackCommand,
    },
    /// Run scripted users against the engine and audit every transcript.
    Simulate {
        #[arg(long, env = "PERSUADE_PACK")]
        pack: Option<PathBuf>,
        /// Profile mix file, or one of: skeptic, compliant, mixed, study-mix.
        #[arg(long, default_value = "mixed")]
        profiles: String,
        #[arg(long, default_value_t = 1000)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ethical profile of the simulated sessions.
        #[arg(long, value_enum, default_value_t = Profile::Random)]
        ethical: Profile,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PackCommand {
    /// Validate a pack and print every diagnostic.
    Check { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    #[value(name = "open_minded")]
    OpenMinded,
    Neutral,
    Random,
}

impl From<Profile> for ProfileChoice {
    fn from(p: Profile) -> Self {
        match p {
            Profile::OpenMinded => ProfileChoice::OpenMinded,
            Profile::Neutral => ProfileChoice::Neutral,
            Profile::Random => ProfileChoice::Random,
        }
    }
}

fn read_pack(path: Option<&Path>) -> Result<ContentPack, String> {
    let Some(path) = path else {
        return Ok(covid19());
    };
    let doc = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    load_pack(&doc).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_mix(spec: &str) -> Result<ProfileMix, String> {
    if let Some(mix) = builtin_mix(spec) {
        return Ok(mix);
    }
    let doc = fs::read_to_string(spec).map_err(|e| {
        format!("{spec}: {e} (built-in mixes: {})", BUILTIN_MIXES.join(", "))
    })?;
    ProfileMix::parse(&doc).map_err(|e| format!("{spec}: {e}"))
}

fn pack_check(file: &Path) -> ExitCode {
    let doc = match fs::read_to_string(file) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return ExitCode::from(2);
        }
    };
    match load_pack(&doc) {
        Ok(pack) => {
            let templates: usize = pack.scenes.iter().map(|s| s.templates.len()).sum();
            println!(
                "ok: {} {} ({} scenes, {} templates)",
                pack.id(),
                pack.version(),
                pack.scenes.len(),
                templates
            );
            ExitCode::SUCCESS
        }
        Err(PackError::Invalid(diags)) => {
            for d in &diags {
                println!("{}: {d}", file.display());
            }
            println!("{} problem(s)", diags.len());
            ExitCode::FAILURE
        }
        Err(e) => {
            println!("{}: {e}", file.display());
            ExitCode::FAILURE
        }
    }
}

fn simulate(
    pack: Option<&Path>,
    profiles: &str,
    runs: u64,
    seed: u64,
    ethical: Profile,
    report: Option<&Path>,
) -> Result<ExitCode, String> {
    let pack = Arc::new(read_pack(pack)?);
    let mix = read_mix(profiles)?;
    let result = run_batch(pack, &mix, runs.max(1), seed, ethical.into()).map_err(|e| e.to_string())?;
    if let Some(path) = report {
        fs::write(path, result.to_json()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    print!("{}", result.summary_table());
    Ok(if result.violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

async fn serve(
    pack: ContentPack,
    bind: &str,
    port: u16,
    transcripts: Option<PathBuf>,
    assets: Option<PathBuf>,
) -> io::Result<()> {
    if let Some(dir) = &transcripts {
        fs::create_dir_all(dir)?;
    }
    let addr: SocketAddr = format!("{bind}:{port}")
        .parse()
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, format!("{bind}:{port}: {e}")))?;
    let pack_id = pack.id().to_string();
    let service = Arc::new(Service::new([pack], transcripts));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!(
        "serving pack {pack_id} on ws://{}/session",
        listener.local_addr()?
    );
    axum::serve(listener, ws::router(service, assets))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Serve {
            pack,
            port,
            bind,
            transcripts,
            assets,
        } => read_pack(pack.as_deref()).and_then(|pack| {
            tokio::runtime::Runtime::new()
                .and_then(|rt| rt.block_on(serve(pack, &bind, port, transcripts, assets)))
                .map(|()| ExitCode::SUCCESS)
                .map_err(|e| e.to_string())
        }),
        Command::Repl {
            pack,
            seed,
            profile,
            transcript,
        } => read_pack(pack.as_deref()).and_then(|pack| {
            let stdin = io::stdin();
            let session = repl::run(Arc::new(pack), seed, profile.into(), stdin.lock(), io::stdout())
                .map_err(|e| e.to_string())?;
            if let Some(path) = transcript {
                fs::write(&path, session.transcript().to_jsonl())
                    .map_err(|e| format!("{}: {e}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }),
        Command::Pack {
            command: PackCommand::Check { file },
        } => Ok(pack_check(&file)),
        Command::Simulate {
            pack,
            profiles,
            runs,
            seed,
            ethical,
            report,
        } => simulate(pack.as_deref(), &profiles, runs, seed, ethical, report.as_deref()),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
