use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;
use std::time::UNIX_EPOCH;

use anyhow::{anyhow, Context, Result};
use chrono::DateTime;
use serde::Serialize;

use climbtrace_core::graphout::{layout, render_svg_with, GraphMode, SvgOptions};
use climbtrace_core::ingest::{parse_csv, resample};
use climbtrace_core::metrics::SmoothnessReport;
use climbtrace_core::store::{ClimbRecord, ClimbStore, ClimbSummary};
use climbtrace_core::videosync::attach_video;

use crate::{Cli, Command, Mode};

#[derive(Serialize)]
struct Analysis<'a> {
    id: &'a str,
    title: &'a str,
    report: &'a SmoothnessReport,
}

#[derive(Serialize)]
struct CropOutput<'a> {
    previous_id: &'a str,
    #[serde(flatten)]
    summary: ClimbSummary,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn format_date(ms: i64) -> String {
    DateTime::from_timestamp_millis(ms)
        .map(|d| d.format("%Y-%m-%d %H:%M").to_string())
        .unwrap_or_else(|| ms.to_string())
}

fn format_score(score: Option<u32>) -> String {
    score.map_or_else(|| "-".to_string(), |s| s.to_string())
}

fn print_summary(s: &ClimbSummary) {
    println!("id        {}", s.id);
    println!("title     {}", s.title);
    println!("duration  {:.2} s", s.duration);
    println!("score     {}", format_score(s.display_score));
}

fn file_mtime_ms(path: &Path) -> Result<i64> {
    let modified = fs::metadata(path)?.modified()?;
    let since = modified
        .duration_since(UNIX_EPOCH)
        .map_err(|_| anyhow!("file modification time predates 1970"))?;
    Ok(since.as_millis() as i64)
}

pub fn run(cli: Cli) -> Result<()> {
    let dir = cli
        .dir
        .ok_or_else(|| anyhow!("no storage directory; pass --dir or set CLIMBTRACE_DIR"))?;
    let json = cli.json;

    if let Command::Serve { port, bind } = cli.command {
        return serve(&dir, SocketAddr::new(bind, port));
    }

    let store = ClimbStore::open(&dir)?;
    let resolve = |prefix: &str| store.resolve(prefix);

    match cli.command {
        Command::Ingest {
            csv,
            title,
            recorded_at_ms,
            trim_lead,
        } => {
            let bytes = fs::read(&csv).with_context(|| format!("reading {}", csv.display()))?;
            let mut log = parse_csv(&bytes).with_context(|| format!("parsing {}", csv.display()))?;
            log.source_epoch_ms = match recorded_at_ms {
                Some(ms) => ms,
                None => file_mtime_ms(&csv)?,
            };
            let trace = resample(&log.trim_lead(trim_lead))?;
            let record = ClimbRecord::new(trace, title);
            store.save(&record)?;
            let summary = record.summary();
            if json {
                print_json(&summary)?;
            } else {
                print_summary(&summary);
            }
        }
        Command::List => {
            let summaries: Vec<ClimbSummary> =
                store.records()?.iter().map(ClimbRecord::summary).collect();
            if json {
                print_json(&summaries)?;
            } else {
                println!(
                    "{:<10}  {:<24}  {:<16}  {:>9}  {:>5}",
                    "ID", "TITLE", "DATE", "DURATION", "SCORE"
                );
                for s in &summaries {
                    println!(
                        "{:<10}  {:<24}  {:<16}  {:>7.2} s  {:>5}",
                        &s.id[..10],
                        s.title,
                        format_date(s.recorded_at_ms),
                        s.duration,
                        format_score(s.display_score)
                    );
                }
            }
        }
        Command::Analyze { id } => {
            let record = store.get(&resolve(&id)?)?;
            let report = record
                .report()
                .with_context(|| format!("climb {} cannot be scored", record.id()))?;
            if json {
                print_json(&Analysis {
                    id: record.id(),
                    title: &record.title,
                    report: &report,
                })?;
            } else {
                print_report(&record, &report);
            }
        }
        Command::Crop { id, at } => {
            let id = resolve(&id)?;
            let record = store.crop(&id, at)?;
            let summary = record.summary();
            if json {
                print_json(&CropOutput {
                    previous_id: &id,
                    summary,
                })?;
            } else {
                print_summary(&summary);
            }
        }
        Command::Rename { id, title } => {
            let record = store.rename(&resolve(&id)?, &title)?;
            if json {
                print_json(&record.summary())?;
            } else {
                print_summary(&record.summary());
            }
        }
        Command::Delete { id } => {
            let id = resolve(&id)?;
            store.delete(&id)?;
            if json {
                print_json(&serde_json::json!({ "deleted": id }))?;
            } else {
                println!("deleted {id}");
            }
        }
        Command::AttachVideo {
            id,
            file,
            fps,
            offset_ms,
        } => {
            let name = Path::new(&file)
                .file_name()
                .and_then(|n| n.to_str())
                .ok_or_else(|| anyhow!("invalid video file name {file:?}"))?
                .to_string();
            if !store.dir().join(&name).is_file() {
                eprintln!(
                    "warning: {name} is not in {}; the review service will not find it",
                    store.dir().display()
                );
            }
            let record = attach_video(&store, &resolve(&id)?, &name, fps, offset_ms)?;
            let link = record.video.expect("video just attached");
            if json {
                print_json(&link)?;
            } else {
                println!("video     {}", link.filename);
                println!("fps       {}", link.fps);
                println!("offset    {} ms", link.offset_ms);
            }
        }
        Command::Export { id, out } => {
            let bytes = store.export_climb(&resolve(&id)?)?;
            match out {
                Some(path) => fs::write(&path, &bytes)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => io::stdout().lock().write_all(&bytes)?,
            }
        }
        Command::Import { file } => {
            let bytes = fs::read(&file).with_context(|| format!("reading {}", file.display()))?;
            let record = store.import_climb(&bytes)?;
            if json {
                print_json(&record.summary())?;
            } else {
                print_summary(&record.summary());
            }
        }
        Command::Graph {
            id,
            mode,
            out,
            box_width,
            box_height,
            labels,
        } => {
            let record = store.get(&resolve(&id)?)?;
            let mode = match mode {
                Mode::Detail => GraphMode::Detail,
                Mode::Thumbnail => GraphMode::Thumbnail,
            };
            let spec = layout(record.trace(), mode, box_width, box_height)?;
            let svg = render_svg_with(&spec, SvgOptions { score_labels: labels });
            fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
            if json {
                print_json(&serde_json::json!({ "out": out, "width": spec.width, "height": spec.height }))?;
            } else {
                println!("wrote {} ({} x {} px)", out.display(), spec.width, spec.height);
            }
        }
        Command::Serve { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn print_report(record: &ClimbRecord, r: &SmoothnessReport) {
    println!("id             {}", record.id());
    println!("title          {}", record.title);
    println!("recorded       {}", format_date(record.recorded_at_ms()));
    println!("duration       {:.2} s", r.duration);
    println!("min            {:.4} g", r.min);
    println!("max            {:.4} g", r.max);
    println!("mean           {:.4} g", r.mean);
    println!("variance       {:.6}", r.variance);
    println!("mean_sq_diff   {:.6}", r.mean_sq_diff);
    match r.lag1_autocorr {
        Some(a) => println!("lag1_autocorr  {a:.6}"),
        None => println!("lag1_autocorr  -"),
    }
    println!("score          {}", r.display_score);
    let windows: Vec<String> = r
        .per_second_scores
        .iter()
        .map(|w| format!("{}:{}", w.window, w.score))
        .collect();
    println!("per-second     {}", windows.join(" "));
    if !record.trace().gap_flags.is_empty() {
        let gaps: Vec<String> = record
            .trace()
            .gap_flags
            .iter()
            .map(|g| format!("{:.2}-{:.2}s", g.0, g.1))
            .collect();
        println!("sampling gaps  {}", gaps.join(" "));
    }
}

fn serve(dir: &Path, addr: SocketAddr) -> Result<()> {
    let store = Arc::new(ClimbStore::open(dir)?);
    let loaded = store.load_all()?;
    for skipped in &loaded.skipped {
        eprintln!("skipping {}: {}", skipped.path.display(), skipped.reason);
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = climbtrace_service::bind(addr)
            .await
            .with_context(|| format!("binding {addr}"))?;
        eprintln!(
            "serving {} climbs from {} on http://{}",
            loaded.records.len(),
            dir.display(),
            listener.local_addr()?
        );
        climbtrace_service::serve(listener, store).await?;
        Ok(())
    })
}
