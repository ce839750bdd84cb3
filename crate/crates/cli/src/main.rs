use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sparsecut::bounds::{bounds_sweep, write_bounds_csv, PipParams};
use sparsecut::closure::{bounding_box, sampled_closure, sparse_closure, unit_box, ClosureResult};
use sparsecut::distance::{cut_depth, dist_to_vertices, exact_dist, shoot, write_shooting_csv, CutDepth};
use sparsecut::extform::{build_tree_extform, check_prop3};
use sparsecut::instances::{gen_halfcube, gen_hyperplane_slice, gen_pip, gen_random01, gen_simplex};
use sparsecut::kernel::io::{load_hrep, load_vrep, save_json, to_json};
use sparsecut::kernel::v_to_h;
use sparsecut::lab::{sweep, validate, write_sweep_csv, ExperimentConfig, SweepOptions};
use sparsecut::sparsify::{find_sparse_separator, verify_sparsifier_stats, write_attempts_csv};
use sparsecut::{Constraint, Error, Rat, RatVec, Result, VRep};

#[derive(Parser)]
#[command(name = "sparsecut", version, about = "Exact k-sparse closure experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    /// Inclusive range `a..b`.
    #[arg(long, value_parser = parse_range)]
    k_range: Option<(usize, usize)>,
    #[arg(long, default_value_t = 1000)]
    dirs: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 20_000)]
    budget_vertices: usize,
    /// Output path or stem; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance.
    Gen {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Number of points (random01, slice).
        #[arg(long, default_value_t = 0)]
        t: usize,
        /// Slice weight.
        #[arg(long, default_value_t = 0)]
        w: usize,
        /// Packing rows.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Packing coefficient bound.
        #[arg(long = "big-m", default_value_t = 10)]
        big_m: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Exact k-sparse closure of a V-polytope.
    Closure {
        instance: PathBuf,
        /// Intersect only this many sampled supports.
        #[arg(long)]
        supports: Option<usize>,
        #[arg(long, value_enum, default_value_t = BoxKind::Bounding)]
        r#box: BoxKind,
        #[command(flatten)]
        common: Common,
    },
    /// Exact distance from a V-polytope to its closure or to a given H-polytope.
    Dist {
        instance: PathBuf,
        /// H-polytope to measure against instead of the closure.
        #[arg(long)]
        against: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Shooting lower bound on the closure distance.
    Shoot {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Depth of every facet of P with respect to its closure.
    Depth {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Closure distance, shooting bound and bound formulas for a range of k.
    Sweep {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Bound formulas over a range of k.
    Bounds {
        /// Take n, t and the vertex norm from an instance.
        instance: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        max_norm: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long = "big-m")]
        big_m: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Sparsified cuts.
    Sparsify {
        #[command(subcommand)]
        mode: SparsifyMode,
    },
    /// Tree extended formulation of the half-cube and its closure.
    Extform {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Quick self-check of the main properties.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum SparsifyMode {
    /// Sparse cut separating a point from a V-polytope.
    Separate {
        instance: PathBuf,
        /// Comma-separated rationals.
        #[arg(long, value_parser = parse_vec)]
        point: RatVec,
        #[arg(long)]
        max_tries: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo statistics of the sparsifier of a direction.
    Stats {
        #[arg(long, value_parser = parse_vec)]
        direction: RatVec,
        /// Probe vectors, comma-separated rationals each.
        #[arg(long, value_parser = parse_vec)]
        probe: Vec<RatVec>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Simplex,
    Halfcube,
    Random01,
    Slice,
    Pip,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoxKind {
    Bounding,
    Unit,
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or("expected a..b")?;
    let a = a.parse().map_err(|e| format!("{e}"))?;
    let b = b.trim_start_matches('=').parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_vec(s: &str) -> std::result::Result<RatVec, String> {
    s.split(',').map(|x| x.parse::<Rat>().map_err(|e| e.to_string())).collect()
}

impl Common {
    fn config(&self, subcommand: &str, instances: Vec<PathBuf>) -> Result<ExperimentConfig> {
        let k_range = match (self.k, self.k_range) {
            (Some(k), None) => Some((k, k)),
            (None, r) => r,
            (Some(_), Some(_)) => return Err(Error::Precondition("give --k or --k-range, not both".into())),
        };
        let c = ExperimentConfig {
            subcommand: subcommand.into(),
            instances,
            seed: self.seed,
            k_range,
            trials: self.trials,
            dirs: self.dirs,
            budget_vertices: self.budget_vertices,
            out: self.out.clone(),
        };
        c.check_caps()?;
        Ok(c)
    }

    fn single_k(&self) -> Result<usize> {
        self.k.ok_or_else(|| Error::Precondition("--k is required".into()))
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    match out {
        Some(p) => save_json(p, value),
        None => {
            println!("{}", to_json(value)?);
            Ok(())
        }
    }
}

fn stem(out: &Option<PathBuf>, default: &str) -> String {
    out.as_deref().unwrap_or(Path::new(default)).to_string_lossy().into_owned()
}

fn closure_of(p: &VRep, k: usize) -> Result<ClosureResult> {
    let (lo, hi) = bounding_box(p);
    sparse_closure(p, k, &lo, &hi)
}

#[derive(Serialize)]
struct DepthRow {
    facet: Constraint,
    #[serde(flatten)]
    depth: CutDepth,
    dist_sq: Rat,
    within: bool,
}

#[derive(Serialize)]
struct Written {
    written: Vec<String>,
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen { family, n, t, w, m, big_m, common } => {
            let cfg = common.config("gen", vec![])?;
            let out = stem(&cfg.out, "instance");
            let mut written = vec![format!("{out}.vrep.json")];
            let p = match family {
                Family::Simplex => gen_simplex(n)?,
                Family::Halfcube => gen_halfcube(n)?,
                Family::Random01 => gen_random01(n, t, cfg.require_seed()?)?.vrep,
                Family::Slice => gen_hyperplane_slice(n, w, t, cfg.require_seed()?)?,
                Family::Pip => {
                    let inst = gen_pip(n, m, big_m, cfg.require_seed()?)?;
                    inst.save(&out)?;
                    written.push(format!("{out}.pip.json"));
                    println!("{}", to_json(&Written { written })?);
                    return Ok(true);
                }
            };
            save_json(&written[0], &p)?;
            println!("{}", to_json(&Written { written })?);
        }
        Command::Closure { instance, supports, r#box, common } => {
            let cfg = common.config("closure", vec![instance.clone()])?;
            let p = load_vrep(&instance)?;
            let k = common.single_k()?;
            let (lo, hi) = match r#box {
                BoxKind::Bounding => bounding_box(&p),
                BoxKind::Unit => unit_box(p.dim),
            };
            let c = match supports {
                Some(s) => sampled_closure(&p, k, &lo, &hi, s, cfg.require_seed()?)?,
                None => sparse_closure(&p, k, &lo, &hi)?,
            };
            match &cfg.out {
                Some(_) => {
                    let out = stem(&cfg.out, "closure");
                    c.save(&out)?;
                    let written = vec![format!("{out}.hrep.json"), format!("{out}.prov.json")];
                    println!("{}", to_json(&Written { written })?);
                }
                None => println!("{}", to_json(&c.closure)?),
            }
        }
        Command::Dist { instance, against, common } => {
            let cfg = common.config("dist", vec![instance.clone()])?;
            let p = load_vrep(&instance)?;
            let report = match against {
                Some(q) => exact_dist(&p, &load_hrep(q)?)?,
                None => {
                    let c = closure_of(&p, common.single_k()?)?;
                    dist_to_vertices(&p, &c.vertex_set()?.vertices)?
                }
            };
            emit(&cfg.out, &report)?;
        }
        Command::Shoot { instance, common } => {
            let cfg = common.config("shoot", vec![instance.clone()])?;
            let p = load_vrep(&instance)?;
            let c = closure_of(&p, common.single_k()?)?;
            let report = shoot(&p, &c.closure, cfg.dirs, cfg.require_seed()?, &[])?;
            write_shooting_csv(&report, sink(&cfg.out)?)?;
            eprintln!("best_lb_sq = {} ({} directions)", report.best_lb_sq, report.directions_tried);
        }
        Command::Depth { instance, common } => {
            let cfg = common.config("depth", vec![instance.clone()])?;
            let p = load_vrep(&instance)?;
            let c = closure_of(&p, common.single_k()?)?;
            let dist_sq = dist_to_vertices(&p, &c.vertex_set()?.vertices)?.dist_sq;
            let h = v_to_h(&p)?;
            let facets = h.inequalities.iter().cloned().chain(h.equations.iter().flat_map(|e| [e.clone(), e.negated()]));
            let rows = facets
                .map(|f| {
                    let depth = cut_depth(&f.a, &f.b, &c.closure)?;
                    let within = depth.gamma_sq_scaled <= dist_sq;
                    Ok(DepthRow { facet: f, depth, dist_sq: dist_sq.clone(), within })
                })
                .collect::<Result<Vec<_>>>()?;
            emit(&cfg.out, &rows)?;
        }
        Command::Sweep { instance, common } => {
            let cfg = common.config("sweep", vec![instance.clone()])?;
            let p = load_vrep(&instance)?;
            let opts = SweepOptions {
                seed: cfg.require_seed()?,
                dirs: cfg.dirs,
                budget_vertices: cfg.budget_vertices,
                extra_dirs: vec![],
            };
            let rows = sweep(&p, &cfg.ks(p.dim)?, &opts)?;
            write_sweep_csv(&rows, sink(&cfg.out)?)?;
        }
        Command::Bounds { instance, n, t, max_norm, m, big_m, common } => {
            let cfg = common.config("bounds", instance.iter().cloned().collect())?;
            let (n, t, max_norm) = match &instance {
                Some(path) => {
                    let p = load_vrep(path)?;
                    (p.dim, p.vertices.len(), p.max_vertex_norm_sq().to_f64().sqrt())
                }
                None => {
                    let need = |what: &str| Error::Precondition(format!("--{what} is required without an instance"));
                    let n = n.ok_or_else(|| need("n"))?;
                    (n, t.ok_or_else(|| need("t"))?, max_norm.unwrap_or((n as f64).sqrt()))
                }
            };
            let pip = match (m, big_m) {
                (Some(m), Some(big_m)) => Some(PipParams { m, big_m }),
                (None, None) => None,
                _ => return Err(Error::Precondition("--m and --big-m go together".into())),
            };
            let rows = bounds_sweep(n, t, max_norm, pip, &cfg.ks(n)?);
            write_bounds_csv(&rows, sink(&cfg.out)?)?;
        }
        Command::Sparsify { mode: SparsifyMode::Separate { instance, point, max_tries, common } } => {
            let cfg = common.config("sparsify", vec![instance.clone()])?;
            let p = load_vrep(&instance)?;
            let cut = find_sparse_separator(&p, &point, common.single_k()?, max_tries, cfg.require_seed()?)?;
            let out = stem(&cfg.out, "sparse_cut");
            save_json(format!("{out}.cut.json"), &cut)?;
            write_attempts_csv(&cut.attempts, File::create(format!("{out}.attempts.csv"))?)?;
            let written = vec![format!("{out}.cut.json"), format!("{out}.attempts.csv")];
            println!("{}", to_json(&Written { written })?);
        }
        Command::Sparsify { mode: SparsifyMode::Stats { direction, probe, common } } => {
            let cfg = common.config("sparsify", vec![])?;
            let n = direction.dim();
            let probes = if probe.is_empty() { vec![RatVec::ones(n)] } else { probe };
            let stats =
                verify_sparsifier_stats(&direction, common.single_k()?, n, &probes, cfg.trials as u64, cfg.require_seed()?)?;
            emit(&cfg.out, &stats)?;
        }
        Command::Extform { n, common } => {
            let cfg = common.config("extform", vec![])?;
            let tree = build_tree_extform(n)?;
            let out = stem(&cfg.out, "extform");
            save_json(format!("{out}.q.hrep.json"), &tree.set.q)?;
            save_json(format!("{out}.proj.hrep.json"), &tree.set.projection())?;
            let mut written = vec![format!("{out}.q.hrep.json"), format!("{out}.proj.hrep.json")];
            if let Some(k) = common.k {
                let report = check_prop3(&gen_halfcube(n)?, &tree.set, k)?;
                save_json(format!("{out}.report.json"), &report)?;
                written.push(format!("{out}.report.json"));
            }
            println!("{}", to_json(&Written { written })?);
        }
        Command::Validate { common } => {
            let cfg = common.config("validate", vec![])?;
            let report = validate(cfg.require_seed()?);
            emit(&cfg.out, &report)?;
            return Ok(report.passed);
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let report = ErrorReport { error: e.kind(), message: e.to_string() };
            eprintln!("{}", serde_json::to_string(&report).expect("plain strings"));
            ExitCode::from(1)
        }
    }
}
