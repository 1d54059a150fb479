use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use pioucrypt::lattice::serialize_w;
use pioucrypt::{
    analyze, decrypt_pipeline, encrypt_pipeline, generate_lattice_points, nmf_multiplicative,
    parse_seed, LatticeVectors, NmfConfig, PipelineConfig, WindowSpec,
};

#[derive(Parser)]
#[command(name = "pioucrypt", version, about = "Two-layer lossless image cipher")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt a PPM/PGM image into cipher.ppm, cipher.oea and OEA-key.txt.
    Encrypt {
        image: PathBuf,
        /// Master seed, decimal or 0x-prefixed hex.
        #[arg(long, env = "PIOUCRYPT_SEED")]
        seed: String,
        /// Output directory for the bundle.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Recover the plain image from a bundle.
    Decrypt {
        cipher_image: PathBuf,
        oea_cipher: PathBuf,
        oea_key: PathBuf,
        #[arg(long, default_value = "decrypted.ppm")]
        out: PathBuf,
    },
    /// Print per-channel histograms as CSV.
    Analyze {
        image: PathBuf,
        /// Write to this file instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Dump the lattice points and NMF factors for a given basis.
    Lattice {
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        v0: [i64; 2],
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        v1: [i64; 2],
        /// Window as WIDTHxHEIGHT.
        #[arg(long, value_parser = parse_window)]
        window: (u64, u64),
        /// Seed for the NMF initializer.
        #[arg(long, default_value = "0")]
        nmf_seed: String,
    },
}

fn parse_vector(s: &str) -> Result<[i64; 2], String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let num = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    Ok([num(x)?, num(y)?])
}

fn parse_window(s: &str) -> Result<(u64, u64), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
    let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(w)?, num(h)?))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Encrypt { image, seed, out } => {
            let seed = parse_seed(&seed)?;
            let cfg = PipelineConfig::new(seed).with_out_dir(out);
            let (bundle, paths) = encrypt_pipeline(&image, &cfg)?;
            println!(
                "lattice v0={:?} v1={:?} points={}",
                bundle.lattice.v0(),
                bundle.lattice.v1(),
                bundle.lattice_points
            );
            for p in [&paths.cipher_image, &paths.oea_cipher, &paths.oea_key] {
                println!("wrote {}", p.display());
            }
        }
        Command::Decrypt {
            cipher_image,
            oea_cipher,
            oea_key,
            out,
        } => {
            decrypt_pipeline(&cipher_image, &oea_cipher, &oea_key, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Analyze { image, csv } => {
            let report = analyze(&image, csv.as_deref())?;
            if csv.is_none() {
                report.write_csv(io::stdout().lock())?;
            }
        }
        Command::Lattice {
            v0,
            v1,
            window,
            nmf_seed,
        } => {
            let vectors = LatticeVectors::new(v0, v1)?;
            let window = WindowSpec::new(window.0, window.1)?;
            let points = generate_lattice_points(&vectors, window);
            if points.is_empty() {
                bail!("no lattice points inside the window");
            }
            let cfg = NmfConfig {
                init_seed: parse_seed(&nmf_seed)?,
                ..NmfConfig::default()
            };
            let run = nmf_multiplicative(&points.to_matrix(), &cfg)?;

            let mut out = io::stdout().lock();
            writeln!(out, "points {}", points.len())?;
            for p in points.points() {
                writeln!(out, "{} {}", p[0], p[1])?;
            }
            writeln!(
                out,
                "iterations {} error {:.6e}",
                run.iterations(),
                run.final_error()
            )?;
            out.write_all(serialize_w(run.factors.w()).as_bytes())?;
            let h = run.factors.h();
            writeln!(out, "H {} {}", h.rows(), h.cols())?;
            for r in 0..h.rows() {
                let row: Vec<String> = h.row(r).iter().map(|v| format!("{v:.5}")).collect();
                writeln!(out, "{}", row.join(" "))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Library errors already carry their causes in the message.
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
