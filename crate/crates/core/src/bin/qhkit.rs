use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qhkit::checks::{self, CheckConfig, CheckReport};
use qhkit::experiments::{self, ExperimentResult};
use qhkit::io::{self, RunManifest};
use qhkit::metric::{self, Estimator, DEFAULT_EDGE_TOL, DEFAULT_LEVEL};
use qhkit::{Domain, Error, MapSpec, MapUnderTest, Point};

#[derive(Parser)]
#[command(name = "qhkit", version, about = "Quasihyperbolic metric estimates, map checks and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Grid refinement level.
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance added to every checked inequality.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Output directory.
    #[arg(long, default_value = "qhkit-out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Print k_upper, k_lower and j for a pair of points.
    Dist {
        /// Domain spec: a JSON file, or the JSON text itself.
        #[arg(long)]
        domain: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[command(flatten)]
        common: Common,
    },
    /// Write the near-geodesic realizing k_upper as coordinate rows.
    Geodesic {
        #[arg(long)]
        domain: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// Vertex pairs sampled for the near-geodesic constant.
        #[arg(long, default_value_t = 200)]
        sample_pairs: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run one checker: qh, cqh, relative, qs, semisolid, solid, uniform, thmD, local-global.
    Check {
        name: String,
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        domain: Option<String>,
        /// Number of sampled pairs.
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        /// M for cqh (defaults to the advertised QH constant).
        #[arg(long = "m-bound")]
        m_bound: Option<f64>,
        /// C for cqh.
        #[arg(long = "c-bound", default_value_t = 0.0)]
        c_bound: f64,
        /// Slope of the linear gauge φ(t) = a t for semisolid and solid.
        #[arg(long, default_value_t = 1.0)]
        phi: f64,
        /// Largest |x - y| / d(x) for the relative gauge.
        #[arg(long, default_value_t = 0.5)]
        t0: f64,
        /// Ball fraction for the QS gauge.
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        /// Ball center for the QS gauge (defaults to the deepest sampled point).
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        #[arg(long, default_value_t = 500)]
        triples: usize,
        /// Maximal balls used by local-global.
        #[arg(long, default_value_t = 8)]
        centers: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run a scripted experiment: example1, example2, lemma1, uniformity.
    Experiment {
        name: String,
        /// Comma-separated t values (example1).
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        /// Comma-separated segment counts (example2).
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0.05)]
        r: f64,
        #[arg(long = "bend-degrees", default_value_t = 90.0)]
        bend_degrees: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Comma-separated s values (lemma1).
        #[arg(long, value_delimiter = ',')]
        s: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
}

fn read_spec(arg: &str) -> Result<String, Error> {
    let t = arg.trim_start();
    if t.starts_with('{') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).map_err(|e| Error::validation("spec", format!("cannot read `{arg}`: {e}")))
    }
}

fn load_domain(arg: &str) -> Result<Domain, Error> {
    Domain::from_json(&read_spec(arg)?)
}

fn load_map(arg: &str) -> Result<(MapSpec, MapUnderTest), Error> {
    let spec = MapSpec::parse(&read_spec(arg)?)?;
    let f = spec.build()?;
    Ok((spec, f))
}

fn parse_point(field: &str, s: &str) -> Result<Point, Error> {
    let coords: Result<Vec<f64>, _> = s.split(',').map(|c| c.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|_| Error::validation(field, format!("cannot parse `{s}` as a point")))?;
    Point::from_slice(&coords).map_err(|e| Error::validation(field, e.to_string()))
}

fn run_manifest(command: &str, domain: Option<&str>, map: Option<&str>, c: &Common, params: Value) -> RunManifest {
    RunManifest {
        command: command.into(),
        domain: domain.map(String::from),
        map: map.map(String::from),
        seed: c.seed,
        level: c.level,
        tol: c.tol,
        edge_tol: DEFAULT_EDGE_TOL,
        out: c.out.display().to_string(),
        params,
    }
}

fn print_report(rep: &CheckReport) {
    println!("check {} on {}", rep.check, rep.subject);
    for (k, v) in &rep.constants {
        println!("  {k} = {v}");
    }
    for g in &rep.gauges {
        println!("  gauge {}: {} populated bins", g.name, g.populated_bins());
    }
    for w in &rep.worst_witness {
        let pts: Vec<String> = w.points.iter().map(|p| p.to_string()).collect();
        println!("  witness {}: value {} at {}", w.label, w.value, pts.join(" "));
    }
    for (k, v) in &rep.verdicts {
        println!("  verdict {k}: {}", if *v { "pass" } else { "FAIL" });
    }
}

fn print_experiment(res: &ExperimentResult) {
    println!("experiment {}", res.name);
    println!("  {}", res.columns.join(","));
    for r in &res.rows {
        let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        println!("  {}", cells.join(","));
    }
    for (k, v) in &res.verdicts {
        println!("  verdict {k}: {}", if *v { "pass" } else { "FAIL" });
    }
}

fn deepest_point(d: &Domain, seed: u64) -> Result<Point, Error> {
    let pts = d.sample_interior(200, 0.0, seed)?;
    let mut best = (pts[0], 0.0);
    for p in pts {
        let dp = d.dist_to_boundary(&p)?;
        if dp > best.1 {
            best = (p, dp);
        }
    }
    Ok(best.0)
}

fn cmd_check(
    name: &str,
    map_arg: Option<&str>,
    domain_arg: Option<&str>,
    a: &CheckArgs,
    common: &Common,
) -> Result<bool, Error> {
    let cfg = CheckConfig {
        level: common.level,
        seed: common.seed,
        tol: common.tol,
    };
    let needs_map = !matches!(name, "uniform" | "thmD");
    let map = map_arg.map(load_map).transpose()?;
    let domain = domain_arg.map(load_domain).transpose()?;
    let params = json!({
        "pairs": a.pairs, "m_bound": a.m_bound, "c_bound": a.c_bound, "phi": a.phi,
        "t0": a.t0, "q": a.q, "center": a.center, "triples": a.triples, "centers": a.centers,
        "map_spec": map.as_ref().map(|m| m.0.to_value()),
    });
    let run = run_manifest(&format!("check {name}"), domain_arg, map_arg, common, params);
    let f = match (&map, needs_map) {
        (Some((_, f)), _) => Some(f),
        (None, true) => return Err(Error::validation("map", format!("check `{name}` needs --map"))),
        (None, false) => None,
    };
    let phi_a = a.phi;
    let phi = move |t: f64| phi_a * t;
    let rep = match name {
        "qh" | "cqh" | "semisolid" | "solid" | "relative" | "local-global" => {
            let f = f.expect("map checked above");
            let pairs = if name == "relative" {
                checks::sample_local_pairs(&f.source, a.pairs, a.t0, cfg.seed)?
            } else {
                checks::sample_pairs(&f.source, a.pairs, cfg.seed)?
            };
            match name {
                "qh" => checks::estimate_qh_constant(f, &pairs, &cfg)?.1,
                "cqh" => {
                    let m = a
                        .m_bound
                        .or(f.advertised.m_qh)
                        .ok_or_else(|| Error::validation("m-bound", "no M given and the map advertises none"))?;
                    checks::check_cqh(f, &pairs, m, a.c_bound, &cfg)?
                }
                "semisolid" => checks::check_semisolid(f, &pairs, &phi, &cfg)?,
                "solid" => checks::check_solid(f, &pairs, &phi, &cfg)?,
                "relative" => {
                    let g = checks::estimate_relative_theta(f, &pairs, a.t0)?;
                    gauge_report("relative", f, g, &cfg, pairs.len())
                }
                _ => {
                    let centers: Vec<Point> = pairs
                        .iter()
                        .take(a.pairs / 2)
                        .take(a.centers)
                        .map(|p| p.0)
                        .collect();
                    checks::local_to_global_qh(f, &centers, &pairs, &cfg)?
                }
            }
        }
        "qs" => {
            let f = f.expect("map checked above");
            let center = match &a.center {
                Some(c) => parse_point("center", c)?,
                None => deepest_point(&f.source, cfg.seed)?,
            };
            let triples = checks::sample_triples(&f.source, &center, a.q, a.triples, cfg.seed)?;
            let g = checks::estimate_qs_eta(f, &center, a.q, &triples)?;
            let mut rep = gauge_report("qs", f, g, &cfg, 0);
            rep.manifest.triples = triples.len();
            rep
        }
        "uniform" | "thmD" => {
            let d = match (&domain, f) {
                (Some(d), _) => d.clone(),
                (None, Some(f)) => f.source.clone(),
                (None, None) => return Err(Error::validation("domain", format!("check `{name}` needs --domain or --map"))),
            };
            let pairs = checks::sample_pairs(&d, a.pairs, cfg.seed)?;
            if name == "uniform" {
                checks::uniformity_check(&d, &pairs, &cfg)?.1
            } else {
                checks::theorem_d_fit(&d, &pairs, &cfg)?.report
            }
        }
        other => return Err(Error::validation("check", format!("unknown check `{other}`"))),
    };
    print_report(&rep);
    for p in io::write_report(&common.out, &rep, &run)? {
        println!("  wrote {}", p.display());
    }
    Ok(rep.passed())
}

fn gauge_report(check: &str, f: &MapUnderTest, g: checks::EmpiricalGauge, cfg: &CheckConfig, pairs: usize) -> CheckReport {
    let mut rep = CheckReport::new(check, &f.name, cfg);
    rep.manifest.pairs = pairs;
    let monotone = g.monotone_envelope.windows(2).all(|w| w[0] <= w[1]);
    if let Some(&(t, v)) = g.samples().iter().max_by(|p, q| p.1.total_cmp(&q.1)) {
        rep.constants.insert(format!("{}_sup", g.name), v);
        rep.constants.insert(format!("{}_sup_at", g.name), t);
    }
    rep.verdicts.insert("envelope_monotone".into(), monotone);
    rep.gauges.push(g);
    rep
}

struct CheckArgs {
    pairs: usize,
    m_bound: Option<f64>,
    c_bound: f64,
    phi: f64,
    t0: f64,
    q: f64,
    center: Option<String>,
    triples: usize,
    centers: usize,
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Dist { domain, x, y, common } => {
            let d = load_domain(&domain)?;
            let (x, y) = (parse_point("x", &x)?, parse_point("y", &y)?);
            let est = Estimator::shared();
            let up = est.k_upper(&d, &x, &y, common.level)?;
            let lo = metric::k_lower(&d, &x, &y)?;
            let j = metric::j_metric(&d, &x, &y)?;
            println!("k_upper {}", up.value);
            println!("k_lower {}", lo.value);
            println!("j {j}");
            println!("tolerance {}", up.abs_tol);
            Ok(true)
        }
        Command::Geodesic {
            domain,
            x,
            y,
            sample_pairs,
            common,
        } => {
            let d = load_domain(&domain)?;
            let (px, py) = (parse_point("x", &x)?, parse_point("y", &y)?);
            let path = metric::extract_neargeodesic(&d, &px, &py, common.level)?;
            let c = metric::neargeodesic_constant(&path, &d, sample_pairs, common.level)?;
            let k = metric::qh_length(&path, &d, common.tol)?;
            fs::create_dir_all(&common.out)?;
            let base = io::stem("geodesic", common.seed);
            let csv = common.out.join(format!("{base}.csv"));
            io::write_path(&csv, path.points())?;
            let run = run_manifest("geodesic", Some(&domain), None, &common, json!({ "x": x, "y": y }));
            let doc = common.out.join(format!("{base}.json"));
            io::write_json(
                &doc,
                &json!({
                    "vertices": path.len(),
                    "qh_length": k.value,
                    "euclidean_length": path.euclidean_length(),
                    "neargeodesic_constant": c,
                    "run": run,
                }),
            )?;
            println!("vertices {}", path.len());
            println!("qh_length {}", k.value);
            println!("neargeodesic_constant {c}");
            println!("wrote {}", csv.display());
            Ok(true)
        }
        Command::Check {
            name,
            map,
            domain,
            pairs,
            m_bound,
            c_bound,
            phi,
            t0,
            q,
            center,
            triples,
            centers,
            common,
        } => {
            let a = CheckArgs {
                pairs,
                m_bound,
                c_bound,
                phi,
                t0,
                q,
                center,
                triples,
                centers,
            };
            cmd_check(&name, map.as_deref(), domain.as_deref(), &a, &common)
        }
        Command::Experiment {
            name,
            t,
            m,
            r,
            bend_degrees,
            trials,
            s,
            common,
        } => {
            let res = match name.as_str() {
                "example1" => experiments::run_example1(&t.unwrap_or(vec![0.1, 0.05, 0.02]), common.level)?,
                "example2" => experiments::run_example2(&m.unwrap_or(vec![2, 5, 10, 20]), r, bend_degrees.to_radians())?,
                "lemma1" => experiments::run_lemma1(trials, &s.unwrap_or(vec![0.3, 0.5, 0.9]), common.seed)?,
                "uniformity" => experiments::run_uniformity(common.level, common.seed)?,
                other => {
                    return Err(Error::validation(
                        "experiment",
                        format!("unknown experiment `{other}`; expected one of {}", experiments::EXPERIMENTS.join(", ")),
                    ))
                }
            };
            print_experiment(&res);
            let run = run_manifest(&format!("experiment {name}"), None, None, &common, res.manifest.params.clone());
            for p in io::write_experiment(&common.out, &res, &run)? {
                println!("  wrote {}", p.display());
            }
            Ok(res.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
