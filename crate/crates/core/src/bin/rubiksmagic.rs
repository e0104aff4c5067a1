use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use rayon::prelude::*;

use rubiks_magic::classify::{classify, export_records, ClassificationTable, MAX_TABLE_TILES};
use rubiks_magic::{enumerate_assemblages, enumerate_canonical, CuratedSet, EmbeddingParams, Sequence, SequenceRecord};

/// Enumerates planar face-up configurations of the Rubik's Magic puzzle.
///
/// Without a sequence, lists every canonical sequence of N tiles. With `-c SEQ`
/// describes SEQ and its assemblages with Δ = 0; a bare SEQ also describes its
/// canonical representative. `--lk`, `--table` and `--export` add linking data
/// not printed by default.
#[derive(Parser, Debug)]
#[command(name = "rubiksmagic")]
struct Args {
    /// Number of tiles (even, 4 to 20).
    #[arg(short = 'n', default_value_t = 8, value_parser = tile_count)]
    n: usize,
    /// Describe this sequence as given.
    #[arg(short = 'c', value_name = "SEQ", conflicts_with = "sequence")]
    check: Option<String>,
    /// Describe this sequence and its canonical representative.
    #[arg(value_name = "SEQ")]
    sequence: Option<String>,
    /// Print the per-flap classification table (n <= 12).
    #[arg(long)]
    table: bool,
    /// Append L, Lt, writhe, self-crossings and a verdict to each Δ = 0 assemblage line.
    #[arg(long)]
    lk: bool,
    /// Write one JSON record per canonical sequence to PATH.
    #[arg(long, value_name = "PATH")]
    export: Option<PathBuf>,
    /// Override an embedding parameter, e.g. `--param face_offset=0.1`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

fn tile_count(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    rubiks_magic::sequence::check_tile_count(n).map_err(|e| e.to_string())?;
    Ok(n)
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}\n");
    eprintln!("{}", Args::command().render_usage());
    ExitCode::from(2)
}

fn info_line(seq: &Sequence) -> String {
    let asms = enumerate_assemblages(seq);
    let zero = asms.iter().filter(|a| a.metric_invariant().delta == 0).count();
    format!(
        "{seq} f={} area={} Dc={} symcount={} assemblages={} deltaiszero={}",
        seq.flap_count(),
        seq.area(),
        seq.delta_c(),
        seq.symmetry_group().len(),
        asms.len(),
        zero
    )
}

fn assemblage_lines(seq: &Sequence) -> Vec<String> {
    enumerate_assemblages(seq)
        .iter()
        .filter(|a| a.metric_invariant().delta == 0)
        .map(|a| format!(" Assemblage with delta = 0: {a}"))
        .collect()
}

fn linked_lines(rec: &SequenceRecord) -> Vec<String> {
    rec.delta_zero()
        .map(|a| {
            let link = a.link.as_ref().expect("Δ = 0 records carry a link report");
            format!(" Assemblage with delta = 0: {} | {link} {}", a.assemblage, a.verdict)
        })
        .collect()
}

struct Run {
    params: EmbeddingParams,
    curated: CuratedSet,
    lk: bool,
}

impl Run {
    fn record(&self, seq: &Sequence) -> Result<SequenceRecord, String> {
        classify(seq, &self.params, &self.curated).map_err(|e| e.to_string())
    }

    /// The info line and assemblage lines of one sequence.
    fn block(&self, seq: &Sequence) -> Result<Vec<String>, String> {
        let mut lines = vec![info_line(seq)];
        if self.lk {
            let (canon, _) = seq.canonical_representative();
            if canon != *seq {
                return Err(format!("--lk needs a canonical sequence; {seq} is equivalent to {canon}"));
            }
            lines.extend(linked_lines(&self.record(seq)?));
        } else {
            lines.extend(assemblage_lines(seq));
        }
        Ok(lines)
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            eprint!("{text}");
            if !text.contains("Usage:") {
                eprintln!("\n{}", Args::command().render_usage());
            }
            return ExitCode::from(2);
        }
    };
    let mut params = EmbeddingParams::default();
    for kv in &args.params {
        if let Err(e) = params.apply_override(kv) {
            return usage_error(&e.to_string());
        }
    }
    let given = match args.check.as_ref().or(args.sequence.as_ref()) {
        Some(text) => match text.parse::<Sequence>() {
            Ok(s) => Some(s),
            Err(e) => return usage_error(&e.to_string()),
        },
        None => None,
    };
    let n = given.as_ref().map_or(args.n, Sequence::len);
    if (args.lk || args.table || args.export.is_some()) && n > MAX_TABLE_TILES {
        return usage_error(&format!("linking data is limited to n <= {MAX_TABLE_TILES}"));
    }
    let run = Run { params, curated: CuratedSet::builtin(), lk: args.lk };
    match execute(&args, given, n, &run) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn execute(args: &Args, given: Option<Sequence>, n: usize, run: &Run) -> Result<(), String> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let io_err = |e: io::Error| e.to_string();
    let records = match given {
        Some(seq) => {
            let (canon, _) = seq.canonical_representative();
            if args.check.is_some() {
                for line in run.block(&seq)? {
                    writeln!(out, "{line}").map_err(io_err)?;
                }
            } else {
                writeln!(out, "{}", info_line(&seq)).map_err(io_err)?;
                for line in run.block(&canon)? {
                    writeln!(out, "{line}").map_err(io_err)?;
                }
            }
            if args.table || args.export.is_some() {
                vec![run.record(&canon)?]
            } else {
                Vec::new()
            }
        }
        None => {
            let seqs = enumerate_canonical(n).map_err(|e| e.to_string())?;
            if args.lk || args.table || args.export.is_some() {
                let records: Vec<SequenceRecord> =
                    seqs.par_iter().map(|s| run.record(s)).collect::<Result<_, _>>()?;
                if !args.table {
                    for (s, r) in seqs.iter().zip(&records) {
                        writeln!(out, "{}", info_line(s)).map_err(io_err)?;
                        if args.lk {
                            for line in linked_lines(r) {
                                writeln!(out, "{line}").map_err(io_err)?;
                            }
                        }
                    }
                    writeln!(out, "Found {} sequences", seqs.len()).map_err(io_err)?;
                }
                records
            } else {
                let lines: Vec<String> = seqs.par_iter().map(info_line).collect();
                for line in lines {
                    writeln!(out, "{line}").map_err(io_err)?;
                }
                writeln!(out, "Found {} sequences", seqs.len()).map_err(io_err)?;
                Vec::new()
            }
        }
    };
    if args.table {
        write!(out, "{}", ClassificationTable::from_records(n, &records)).map_err(io_err)?;
    }
    if let Some(path) = &args.export {
        fs::write(path, export_records(&records)).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    out.flush().map_err(io_err)
}
