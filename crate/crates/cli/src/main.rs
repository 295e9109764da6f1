use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "climbtrace", version, about = "Analyze and manage accelerometer climb traces")]
struct Cli {
    /// Climb storage directory
    #[arg(long, env = "CLIMBTRACE_DIR", global = true)]
    dir: Option<PathBuf>,

    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a CSV log, resample it to 20 Hz and store it as a climb
    Ingest {
        csv: PathBuf,
        #[arg(long)]
        title: Option<String>,
        /// Wall-clock start of the log; defaults to the file's modification time
        #[arg(long, allow_negative_numbers = true)]
        recorded_at_ms: Option<i64>,
        /// Drop samples recorded in the first N seconds
        #[arg(long, default_value_t = 0.0)]
        trim_lead: f64,
    },
    /// List stored climbs, newest first
    List,
    /// Print the smoothness report of a climb
    Analyze { id: String },
    /// Remove everything recorded after a point in the climb
    Crop {
        id: String,
        /// Cut time in seconds
        #[arg(long)]
        at: f64,
    },
    Rename {
        id: String,
        #[arg(long)]
        title: String,
    },
    Delete { id: String },
    /// Link a video file (in the storage directory) to a climb
    AttachVideo {
        id: String,
        #[arg(long)]
        file: String,
        #[arg(long)]
        fps: f64,
        /// Trace start position within the video; inferred from the filename when omitted
        #[arg(long, allow_negative_numbers = true)]
        offset_ms: Option<i64>,
    },
    /// Write a climb as shareable JSON
    Export {
        id: String,
        /// Output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Import {
        #[arg(long)]
        file: PathBuf,
    },
    /// Render a climb graph as SVG
    Graph {
        id: String,
        #[arg(long, value_enum, default_value_t = Mode::Detail)]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 300.0)]
        box_width: f64,
        #[arg(long, default_value_t = 120.0)]
        box_height: f64,
        /// Print per-second scores on the shaded bands
        #[arg(long)]
        labels: bool,
    },
    /// Run the local review API
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: std::net::IpAddr,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Detail,
    Thumbnail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
