use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;
use veerkit::order::max_depth_from_env;
use veerkit::report::{self, exit_code, Report};
use veerkit::svg::{self, What};
use veerkit::{Error, Veering};

#[derive(Parser)]
#[command(name = "veerkit", version, about = "Veering triangulation toolkit")]
struct Cli {
    /// Seed for sampled data.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Taut, transverse and veering checks on a signature or a census file.
    Check {
        #[arg(required_unless_present = "file")]
        sig: Option<String>,
        #[arg(long, conflicts_with = "sig")]
        file: Option<PathBuf>,
    },
    /// Circular order of three cusps named t<k>.v<j>[/g<face>...].
    Order {
        sig: String,
        a: String,
        b: String,
        c: String,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Rebuilds the triangulation from link-space rectangles.
    Roundtrip {
        sig: String,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Draws the upper landscape of a grown continent.
    Render {
        sig: String,
        #[arg(long, value_enum, default_value = "layer")]
        what: WhatArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        #[arg(long)]
        max_depth: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WhatArg {
    Layer,
    Tracks,
    Crowns,
    Rectangles,
}

impl From<WhatArg> for What {
    fn from(w: WhatArg) -> What {
        match w {
            WhatArg::Layer => What::Layer,
            WhatArg::Tracks => What::Tracks,
            WhatArg::Crowns => What::Crowns,
            WhatArg::Rectangles => What::Rectangles,
        }
    }
}

fn emit(r: &Report) {
    println!("{}", serde_json::to_string(r).expect("report serialises"));
}

fn fail(cmd: &str, input: Vec<String>, e: &Error, start: Instant) -> ExitCode {
    emit(&Report::failure(cmd, input, e, start));
    ExitCode::from(exit_code(e) as u8)
}

fn veering(sig: &str) -> Result<Arc<Veering>, Error> {
    Veering::from_sig(sig).map(Arc::new)
}

fn cap(d: Option<usize>) -> usize {
    d.unwrap_or_else(max_depth_from_env)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match cli.cmd {
        Cmd::Check { sig: Some(sig), .. } => match report::check_signature(&sig) {
            Ok(r) => {
                let pass = r.passes();
                let code = if pass { 0 } else { 1 };
                let stats = json!({ "seed": cli.seed });
                emit(&Report::new("check", vec![sig], pass, serde_json::to_value(&r).expect("json"), start, stats));
                ExitCode::from(code)
            }
            Err(e) => fail("check", vec![sig], &e, start),
        },
        Cmd::Check { file: Some(path), .. } => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    let err = Error::MalformedSignature(format!("cannot read {}: {e}", path.display()));
                    return fail("check", vec![path.display().to_string()], &err, start);
                }
            };
            let records = report::census_records(&text);
            let (lines, summary) = report::check_batch(&records);
            for l in &lines {
                println!("{l}");
            }
            let pass = summary.failed == 0;
            let results: Value = serde_json::to_value(&summary).expect("json");
            emit(&Report::new("check", vec![path.display().to_string()], pass, results, start, json!({ "seed": cli.seed })));
            ExitCode::from(if pass { 0 } else { 1 })
        }
        Cmd::Check { .. } => unreachable!("clap requires a signature or a file"),
        Cmd::Order { sig, a, b, c, max_depth } => {
            let input = vec![sig.clone(), a.clone(), b.clone(), c.clone()];
            let res = veering(&sig).and_then(|v| report::order_names(v, [&a, &b, &c], cap(max_depth)));
            match res {
                Ok(o) => {
                    let stats = json!({ "witness_tets": o.witness_tets, "max_depth": cap(max_depth) });
                    emit(&Report::new("order", input, true, serde_json::to_value(&o).expect("json"), start, stats));
                    ExitCode::SUCCESS
                }
                Err(e) => fail("order", input, &e, start),
            }
        }
        Cmd::Roundtrip { sig, radius, max_depth } => {
            let res = veering(&sig).and_then(|v| report::roundtrip(v, radius, cap(max_depth)));
            match res {
                Ok(r) => {
                    let stats = json!({
                        "radius": r.radius,
                        "continent_tets": r.continent_tets,
                        "lifted": r.reconstruction.lifted,
                        "depth": r.reconstruction.depth,
                    });
                    let pass = r.pass;
                    emit(&Report::new("roundtrip", vec![sig], pass, serde_json::to_value(&r).expect("json"), start, stats));
                    ExitCode::from(if pass { 0 } else { 1 })
                }
                Err(e) => fail("roundtrip", vec![sig], &e, start),
            }
        }
        Cmd::Render { sig, what, out, radius, max_depth } => {
            let input = vec![sig.clone()];
            let res = veering(&sig).and_then(|v| svg::render(v, what.into(), radius, cap(max_depth)));
            match res {
                Ok(r) => {
                    if let Err(e) = std::fs::write(&out, &r.svg) {
                        eprintln!("cannot write {}: {e}", out.display());
                        return ExitCode::from(1);
                    }
                    let mut results = r.summary;
                    results["out"] = json!(out.display().to_string());
                    emit(&Report::new("render", input, true, results, start, json!({ "seed": cli.seed })));
                    ExitCode::SUCCESS
                }
                Err(e) => fail("render", input, &e, start),
            }
        }
    }
}
