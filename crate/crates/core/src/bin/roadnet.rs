use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use roadnet::pipeline::{run_network, run_pipeline, run_profiles, validate_outputs, PipelineConfig};
use roadnet::Error;

/// Compile road centerlines and a heightfield into a semantic road network,
/// a textured road mesh and a lane graph.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: network.json, roads.obj, profiles/*.csv, report.json.
    Build(RunArgs),
    /// 2D network only: network.json without elevations or lanes.
    Network(RunArgs),
    /// Network and elevation stage: profiles/*.csv.
    Profile(RunArgs),
    /// Check the invariants of an existing output directory.
    Validate {
        /// Directory holding network.json and roads.obj.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON pipeline configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// GeoJSON centerlines.
    #[arg(long)]
    centerlines: Option<PathBuf>,
    /// Heightfield (.asc, or .pgm with a .geo.json sidecar).
    #[arg(long)]
    heightfield: Option<PathBuf>,
    #[arg(long)]
    l_dis: Option<f64>,
    #[arg(long)]
    u: Option<f64>,
    #[arg(long)]
    i: Option<f64>,
    /// Profile sampling interval in meters.
    #[arg(long)]
    ds: Option<f64>,
    #[arg(long)]
    slope_max: Option<f64>,
    #[arg(long)]
    kappa_max: Option<f64>,
    #[arg(long)]
    lane_width: Option<f64>,
    #[arg(long)]
    lanes_per_link: Option<usize>,
    #[arg(long)]
    dp_epsilon: Option<f64>,
    #[arg(long)]
    mesh_step: Option<f64>,
}

impl RunArgs {
    fn config(&self) -> Result<PipelineConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = &self.out {
            cfg.out_dir = v.clone();
        }
        if let Some(v) = &self.centerlines {
            cfg.centerlines = v.clone();
        }
        if let Some(v) = &self.heightfield {
            cfg.heightfield = v.clone();
        }
        cfg.l_dis = self.l_dis.or(cfg.l_dis);
        cfg.u = self.u.or(cfg.u);
        cfg.i = self.i.or(cfg.i);
        cfg.lane_width = self.lane_width.or(cfg.lane_width);
        cfg.lanes_per_link = self.lanes_per_link.or(cfg.lanes_per_link);
        if let Some(v) = self.ds {
            cfg.profile.ds = v;
        }
        if let Some(v) = self.slope_max {
            cfg.profile.slope_max = v;
        }
        if let Some(v) = self.kappa_max {
            cfg.profile.kappa_max = v;
        }
        if let Some(v) = self.dp_epsilon {
            cfg.tolerances.dp_epsilon = v;
        }
        if let Some(v) = self.mesh_step {
            cfg.mesh_step = v;
        }
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Build(a) => {
            let cfg = a.config()?;
            let report = run_pipeline(&cfg)?;
            let c = &report.counts;
            println!(
                "{} intersections, {} links, {} turning lanes, {} connectors in {:.2} s; output in {}",
                c.intersections,
                c.links,
                c.ilanes,
                c.connectors,
                report.total_seconds,
                cfg.out_dir.display()
            );
            for w in &report.warnings {
                log::warn!("{w}");
            }
            Ok(report.certificates.all_pass)
        }
        Command::Network(a) => {
            let cfg = a.config()?;
            let net = run_network(&cfg)?;
            println!(
                "{} intersections, {} links; wrote {}",
                net.intersections.len(),
                net.links.len(),
                cfg.out_dir.join("network.json").display()
            );
            Ok(true)
        }
        Command::Profile(a) => {
            let cfg = a.config()?;
            let elev = run_profiles(&cfg)?;
            println!(
                "{} profiles written to {}",
                elev.profiles.len(),
                cfg.out_dir.join("profiles").display()
            );
            Ok(true)
        }
        Command::Validate { out } => {
            let rep = validate_outputs(&out)?;
            for c in &rep.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                println!("{status} {}", c.name);
                for f in c.failures.iter().take(20) {
                    println!("    {f}");
                }
            }
            Ok(rep.passed())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
