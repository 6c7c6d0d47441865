//! `mddw`: keys, watermarking, detection, claims, benchmarks and game suites.
//!
//! Exit codes: 0 success (detect: watermark found; clmver/claim: valid proof),
//! 1 negative result, 2 usage or configuration error, 3 I/O or transport error.

mod commands;
mod failure;
mod files;
mod model_spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mddw::algebra::GroupId;
use mddw::games::Suite;
use mddw::oracles::Token;
use mddw::watermark::BackendKind;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use commands::{GenSettings, Keys};
use failure::{Failure, Outcome};
use files::{read_json, write_json, ClaimFile, Role, TextFile};
use model_spec::ModelSpec;

#[derive(Parser)]
#[command(name = "mddw", version, about = "Designated-detector watermarking for token streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen {
        #[arg(long, value_parser = parse_backend)]
        scheme: BackendKind,
        #[arg(long, value_enum)]
        role: Role,
        #[arg(long, value_parser = parse_group, default_value = "prod128")]
        group: GroupId,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write a copy without secrets.
        #[arg(long)]
        public_out: Option<PathBuf>,
    },
    /// Generate a watermarked text with the signer's key.
    Watermark {
        /// Signer key.
        #[arg(long)]
        key: PathBuf,
        #[command(flatten)]
        designated: Designated,
        #[command(flatten)]
        gen: Generation,
        #[arg(long)]
        out: PathBuf,
    },
    /// Look for a watermark; prints {"detected","offset"}.
    Detect {
        #[arg(long)]
        text: PathBuf,
        /// Detector key with its secret (not used for pdw).
        #[arg(long)]
        key: Option<PathBuf>,
        /// Signer's public key.
        #[arg(long)]
        signer: PathBuf,
        #[command(flatten)]
        designated: Designated,
    },
    /// Produce a text every designated detector accepts, using all their secrets.
    ForgeDs {
        /// Signer's public key.
        #[arg(long)]
        signer: PathBuf,
        #[command(flatten)]
        designated: Designated,
        #[command(flatten)]
        gen: Generation,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prove authorship of a cmdvs text.
    Claim {
        /// Signer key with secrets.
        #[arg(long)]
        key: PathBuf,
        #[command(flatten)]
        designated: Designated,
        #[arg(long)]
        text: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a claim proof; prints {"valid"}.
    Clmver {
        /// Claimed signer's public key.
        #[arg(long)]
        signer: PathBuf,
        #[command(flatten)]
        designated: Designated,
        #[arg(long)]
        text: PathBuf,
        #[arg(long)]
        claim: PathBuf,
    },
    /// Time generation and detection with fresh keys.
    Bench {
        #[arg(long, value_parser = parse_backend)]
        backend: BackendKind,
        #[arg(long, value_parser = parse_group, default_value = "prod128")]
        group: GroupId,
        /// Number of designated detectors.
        #[arg(long, default_value_t = 3)]
        detectors: usize,
        #[arg(long, default_value_t = 3)]
        runs: usize,
        #[command(flatten)]
        gen: Generation,
    },
    /// Run security-game suites and print their reports.
    Games {
        /// One suite, or all of them when omitted.
        #[arg(long, value_parser = parse_suite)]
        suite: Option<Suite>,
        /// Trials per suite; defaults to acceptance scale.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Designated {
    /// Key file of a designated detector; repeat for each (public copies suffice
    /// except for forge-ds).
    #[arg(long = "verifier")]
    verifiers: Vec<PathBuf>,
}

#[derive(Args)]
struct Generation {
    /// Output length in tokens.
    #[arg(long)]
    n: usize,
    /// Block length.
    #[arg(long, default_value_t = 2)]
    ell: usize,
    /// `mock:seed=..,V=..,k=..` or `http:<url>`.
    #[arg(long, default_value = "mock")]
    model: ModelSpec,
    /// Vocabulary size of an http model.
    #[arg(long)]
    vocab: Option<u32>,
    /// Prompt tokens, comma separated.
    #[arg(long, value_delimiter = ',')]
    prompt: Vec<Token>,
    /// Tag length for ddw and pdw.
    #[arg(long)]
    tag_bits: Option<usize>,
    #[arg(long)]
    max_attempts: Option<u32>,
    /// Makes the output reproducible with the mock model.
    #[arg(long)]
    seed: Option<u64>,
}

impl Generation {
    fn settings(&self) -> GenSettings {
        GenSettings {
            n: self.n,
            ell: self.ell,
            model: self.model.clone(),
            vocab: self.vocab,
            prompt: self.prompt.clone(),
            tag_bits: self.tag_bits,
            max_attempts: self.max_attempts,
        }
    }
}

fn parse_backend(s: &str) -> Result<BackendKind, String> {
    s.parse().map_err(|e: mddw::watermark::WatermarkError| e.to_string())
}

fn parse_group(s: &str) -> Result<GroupId, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn rng_for(seed: Option<u64>) -> ChaCha20Rng {
    seed.map_or_else(ChaCha20Rng::from_entropy, ChaCha20Rng::seed_from_u64)
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("serializable"));
}

fn verdict(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

fn run(cli: Cli) -> Outcome<u8> {
    match cli.command {
        Command::Keygen {
            scheme,
            role,
            group,
            seed,
            out,
            public_out,
        } => {
            let key = commands::keygen(scheme, role, group, &mut rng_for(seed))?;
            write_json(&out, &key)?;
            if let Some(p) = public_out {
                write_json(&p, &key.public())?;
            }
            eprintln!("wrote {scheme} {role} key for {group} to {}", out.display());
            Ok(0)
        }
        Command::Watermark {
            key,
            designated,
            gen,
            out,
        } => {
            let keys = Keys::read(Some(key), None, &designated.verifiers)?;
            let text = commands::watermark(&keys, &gen.settings(), &mut rng_for(gen.seed))?;
            write_json(&out, &text)?;
            eprintln!(
                "wrote {} tokens carrying {} watermark(s) to {}",
                text.tokens.len(),
                text.watermark_params().watermark_count(),
                out.display()
            );
            Ok(0)
        }
        Command::Detect {
            text,
            key,
            signer,
            designated,
        } => {
            let keys = Keys::read(key, Some(signer), &designated.verifiers)?;
            let text: TextFile = read_json(&text)?;
            let result = commands::detect_text(&keys, &text)?;
            print_json(&result);
            Ok(verdict(result.detected))
        }
        Command::ForgeDs {
            signer,
            designated,
            gen,
            out,
        } => {
            let keys = Keys::read(None, Some(signer), &designated.verifiers)?;
            let text = commands::forge(&keys, &gen.settings(), &mut rng_for(gen.seed))?;
            write_json(&out, &text)?;
            eprintln!("wrote forged text of {} tokens to {}", text.tokens.len(), out.display());
            Ok(0)
        }
        Command::Claim {
            key,
            designated,
            text,
            out,
        } => {
            let keys = Keys::read(Some(key), None, &designated.verifiers)?;
            let text: TextFile = read_json(&text)?;
            let claim = commands::claim(&keys, &text)?;
            write_json(&out, &claim)?;
            eprintln!("claimed {} watermark slot(s)", claim.proofs.len());
            Ok(verdict(!claim.proofs.is_empty()))
        }
        Command::Clmver {
            signer,
            designated,
            text,
            claim,
        } => {
            let keys = Keys::read(None, Some(signer), &designated.verifiers)?;
            let text: TextFile = read_json(&text)?;
            let claim: ClaimFile = read_json(&claim)?;
            let valid = commands::clmver(&keys, &text, &claim)?;
            print_json(&serde_json::json!({ "valid": valid }));
            Ok(verdict(valid))
        }
        Command::Bench {
            backend,
            group,
            detectors,
            runs,
            gen,
        } => {
            let report = commands::bench(backend, group, detectors, runs, &gen.settings(), &mut rng_for(gen.seed))?;
            eprintln!(
                "{backend}/{group}: generation {:.1} ms, detection {:.1} ms (mean of {runs})",
                report.generation_mean_ms, report.detection_mean_ms
            );
            print_json(&report);
            Ok(0)
        }
        Command::Games {
            suite,
            trials,
            seed,
            out,
        } => {
            let reports = commands::games(suite, trials, seed);
            for r in &reports {
                let verdict = if r.passed() { "pass" } else { "FAIL" };
                eprintln!(
                    "{verdict} {}: {} trials, {} failures",
                    r.suite.as_str(),
                    r.trials,
                    r.failures
                );
            }
            match out {
                Some(p) => write_json(&p, &reports)?,
                None => print_json(&reports),
            }
            Ok(verdict(reports.iter().all(|r| r.passed())))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
