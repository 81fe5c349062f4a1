//! `itfkit`: validate platform models, enumerate interference channels,
//! check capacities, generate accelerator fragments, and export reports.
//!
//! Exit codes: 0 clean, 1 usage or parse failure, 2 analysis findings of
//! severity error (over-capacity verdicts, unitary violations).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use itfkit_core::dsl;
use itfkit_core::model::{flatten, ComponentId, Platform};
use itfkit_core::report::{
    build_report, export_dot, orbit_lines, report_json, scenario_findings, Report, ReportOptions,
};
use itfkit_core::templates::{
    instantiate, render_fragment, AccessModel, ConfigOp, Coupling, HostBinding, TemplateSpec,
};
use itfkit_core::txn::{enumerate_paths, resolve_transactions, route_exhaustiveness};

#[derive(Parser)]
#[command(name = "itfkit", version, about = "Platform interference and capacity analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model, printing diagnostics.
    Validate { file: PathBuf },
    /// Enumerate all simple paths between an initiator and a target.
    Paths {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Enumerate and classify concurrent-transaction scenarios.
    Interfere {
        file: PathBuf,
        /// Largest scenario size.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Treat transactions of one application as concurrent.
        #[arg(long)]
        include_same_app: bool,
        /// Report every scenario instead of one representative per orbit.
        #[arg(long)]
        no_quotient: bool,
        /// Write the findings as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Aggregate demand per component and check declared capacities.
    Capacity {
        file: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Emit an accelerator model fragment as `.pml` text.
    Template {
        #[arg(long, value_enum)]
        case: Case,
        /// Decompose into k parallel initiators (semi/active only).
        #[arg(long)]
        parallel: Option<u32>,
        /// Declare generated initiators as a symmetry class.
        #[arg(long)]
        symmetric: bool,
        #[arg(long)]
        name: String,
        /// Attachment transporter in the host platform.
        #[arg(long)]
        attach: String,
        /// Shared targets, comma separated.
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
        /// Controlling core (required for tightly/semi, optional for active).
        #[arg(long)]
        controller: Option<String>,
    },
    /// Export the component graph as DOT.
    ExportDot {
        file: PathBuf,
        /// Finding id whose channel components to highlight.
        #[arg(long)]
        highlight: Option<String>,
    },
    /// Build the full analysis report.
    Report {
        file: PathBuf,
        #[arg(long)]
        json: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    Tightly,
    Passive,
    Semi,
    Active,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version are not failures.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load(file: &Path) -> Result<Platform, String> {
    let text = fs::read_to_string(file)
        .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    dsl::parse(&text, &file.to_string_lossy()).map_err(|diags| {
        diags
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("\n")
    })
}

fn write_out(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Validate { file } => {
            let text = fs::read_to_string(&file)
                .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
            match dsl::parse(&text, &file.to_string_lossy()) {
                Err(diags) => {
                    for d in &diags {
                        eprintln!("{d}");
                    }
                    Ok(ExitCode::from(1))
                }
                Ok(platform) => {
                    if let Err(diags) = resolve_transactions(&platform) {
                        for d in &diags {
                            eprintln!("{d}");
                        }
                        return Ok(ExitCode::from(1));
                    }
                    for w in route_exhaustiveness(&platform) {
                        eprintln!("{w}");
                    }
                    let flat = flatten(&platform).map_err(|e| e.to_string())?;
                    println!(
                        "{}: valid ({} components, {} links, {} transactions)",
                        platform.name,
                        flat.len(),
                        flat.links().count(),
                        platform.transactions().len()
                    );
                    Ok(ExitCode::SUCCESS)
                }
            }
        }

        Command::Paths { file, from, to } => {
            let platform = load(&file)?;
            let flat = flatten(&platform).map_err(|e| e.to_string())?;
            let paths = enumerate_paths(
                &flat,
                &ComponentId::new(from),
                &ComponentId::new(to),
            )
            .map_err(|e| e.to_string())?;
            if paths.is_empty() {
                println!("no path");
            }
            for p in paths {
                let hops: Vec<&str> = p.iter().map(|c| c.as_str()).collect();
                println!("{}", hops.join(" -> "));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Interfere {
            file,
            n,
            include_same_app,
            no_quotient,
            json,
        } => {
            let platform = load(&file)?;
            let opts = ReportOptions {
                n_max: n,
                include_same_app,
                quotient: !no_quotient,
            };
            for line in orbit_lines(&platform, &opts).map_err(|e| e.to_string())? {
                println!("{line}");
            }
            if let Some(path) = json {
                let findings = scenario_findings(&platform, &opts).map_err(|e| e.to_string())?;
                let value = serde_json::to_value(&findings).expect("findings serialize");
                let mut text =
                    serde_json::to_string_pretty(&value).expect("value prints");
                text.push('\n');
                write_out(&path, &text)?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Capacity { file, json } => {
            let platform = load(&file)?;
            let report =
                itfkit_core::capacity::check_capacity(&platform).map_err(|e| e.to_string())?;
            for entry in &report.entries {
                let capacity = entry
                    .capacity
                    .map(|c| c.to_string())
                    .unwrap_or_else(|| "unspecified".into());
                println!(
                    "{:<24} demand {:>16} B/s  capacity {:>16}  {}",
                    entry.demand.component,
                    entry.demand.bytes_per_second,
                    capacity,
                    entry.verdict.as_str()
                );
            }
            if let Some(path) = json {
                let value = serde_json::to_value(&report).expect("report serializes");
                let mut text =
                    serde_json::to_string_pretty(&value).expect("value prints");
                text.push('\n');
                write_out(&path, &text)?;
            }
            Ok(if report.has_overload() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }

        Command::Template {
            case,
            parallel,
            symmetric,
            name,
            attach,
            targets,
            controller,
        } => {
            let coupling = match case {
                Case::Tightly => Coupling::TightlyCoupled,
                Case::Passive => Coupling::Passive,
                Case::Semi => Coupling::SemiActive,
                Case::Active => Coupling::Active,
            };
            let access = match parallel {
                Some(k) => AccessModel::Parallel(k),
                None => AccessModel::Unitary,
            };
            let config_profile = match coupling {
                // A starter profile; authors adjust rates after review.
                Coupling::SemiActive => vec![ConfigOp {
                    service: "config".into(),
                    rate: 0,
                    payload: 0,
                }],
                _ => Vec::new(),
            };
            let spec = TemplateSpec {
                coupling,
                access,
                name,
                host: HostBinding {
                    controller: controller.map(ComponentId::new),
                    attachment: ComponentId::new(attach),
                    shared_targets: targets.into_iter().map(ComponentId::new).collect(),
                },
                expansion: None,
                config_profile,
                symmetric,
            };
            let fragment = instantiate(&spec).map_err(|e| e.to_string())?;
            print!("{}", render_fragment(&fragment));
            Ok(ExitCode::SUCCESS)
        }

        Command::ExportDot { file, highlight } => {
            let platform = load(&file)?;
            let finding = match &highlight {
                Some(id) => {
                    let report = build_report(&platform, &ReportOptions::default())
                        .map_err(|e| e.to_string())?;
                    Some(
                        report
                            .findings
                            .into_iter()
                            .find(|f| f.id == *id)
                            .ok_or_else(|| format!("no finding with id `{id}`"))?,
                    )
                }
                None => None,
            };
            let dot = export_dot(&platform, finding.as_ref()).map_err(|e| e.to_string())?;
            print!("{dot}");
            Ok(ExitCode::SUCCESS)
        }

        Command::Report { file, json } => {
            let platform = load(&file)?;
            let report =
                build_report(&platform, &ReportOptions::default()).map_err(|e| e.to_string())?;
            write_out(&json, &report_json(&report))?;
            print_summary(&report);
            Ok(if report.has_errors() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn print_summary(report: &Report) {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for f in &report.findings {
        *counts.entry(f.kind.slug()).or_default() += 1;
    }
    println!(
        "{}: {} findings ({})",
        report.platform.name,
        report.findings.len(),
        counts
            .iter()
            .map(|(k, v)| format!("{k}: {v}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    for a in &report.assumptions {
        println!("assumption: {a}");
    }
}
