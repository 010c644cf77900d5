use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use casino_core::GameKind;
use casino_platform::service::replay_journal;
use casino_platform::sim::{self, SimParams, SimReport};
use casino_platform::{Config, Service};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "casino", version, about = "Casino platform service and simulator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Monte-Carlo run against the exact odds; exits 1 on disagreement.
    Simulate(SimArgs),
    /// Reserve trajectory for a bank of the given size.
    Solvency {
        #[arg(long)]
        reserve: u64,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Replay a journal from genesis and print the resulting state hash.
    Replay {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Game {
    Dice,
    Slots,
    Roulette,
    Blackjack,
}

impl From<Game> for GameKind {
    fn from(g: Game) -> Self {
        match g {
            Game::Dice => GameKind::Dice,
            Game::Slots => GameKind::Slots,
            Game::Roulette => GameKind::Roulette,
            Game::Blackjack => GameKind::Blackjack,
        }
    }
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, value_enum)]
    game: Game,
    #[arg(long, default_value_t = 1_000_000)]
    rounds: u64,
    #[arg(long, default_value_t = 10)]
    stake: u64,
    #[arg(long, default_value_t = sim::DEFAULT_STAND_THRESHOLD)]
    stand_threshold: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = sim::DEFAULT_SHARDS)]
    shards: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl SimArgs {
    fn params(&self) -> SimParams {
        SimParams {
            game: self.game.into(),
            rounds: self.rounds,
            stake: self.stake,
            stand_threshold: self.stand_threshold,
            seed: self.seed,
            shards: self.shards,
        }
    }
}

const VALIDATION: u8 = 2;
const DISAGREEMENT: u8 = 1;

fn print_report(r: &SimReport, format: Format) {
    match format {
        Format::Text => print!("{}", r.to_text()),
        Format::Json => println!("{}", serde_json::to_string_pretty(r).expect("serializes")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Serve { config } => serve(&config),
        Cmd::Simulate(args) => match sim::simulate(&args.params()) {
            Ok(r) => {
                print_report(&r, args.format);
                if r.within_tolerance {
                    ExitCode::SUCCESS
                } else {
                    eprintln!("casino: empirical results disagree with the exact odds");
                    ExitCode::from(DISAGREEMENT)
                }
            }
            Err(e) => {
                eprintln!("casino: {e}");
                ExitCode::from(VALIDATION)
            }
        },
        Cmd::Solvency { reserve, sim: args } => match sim::solvency(&args.params(), reserve) {
            Ok(r) => {
                print_report(&r, args.format);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("casino: {e}");
                ExitCode::from(VALIDATION)
            }
        },
        Cmd::Replay { config } => {
            let outcome = Config::load(&config).and_then(|c| replay_journal(&c));
            match outcome {
                Ok(state) => {
                    println!("seq: {}", state.last_seq);
                    println!("state_hash: {}", hex::encode(state.platform.state_hash()));
                    println!("conservation_ok: {}", state.platform.conservation_check());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("casino: {e}");
                    ExitCode::from(VALIDATION)
                }
            }
        }
    }
}

fn serve(path: &std::path::Path) -> ExitCode {
    let config = match Config::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("casino: {e}");
            return ExitCode::from(VALIDATION);
        }
    };
    let service = match Service::open(&config) {
        Ok(s) => Arc::new(s),
        Err(e) => {
            eprintln!("casino: {e}");
            return ExitCode::from(VALIDATION);
        }
    };
    let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
    match runtime.block_on(casino_platform::http::serve(service, config.listen_addr)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("casino: {e}");
            ExitCode::FAILURE
        }
    }
}
