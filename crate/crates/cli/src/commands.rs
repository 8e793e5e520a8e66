//! Subcommand bodies. Each produces its output files in memory; the caller
//! writes them and records digests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lfpp_core::balls::{filled_metric_ball, hitting_radius};
use lfpp_core::confluence::{confluence_ensemble, ConfluenceSetup};
use lfpp_core::experiments::{
    bilipschitz_estimate, crossing_study, fit_exponent, holder_scan, replica_seeds,
    rotation_anisotropy, tightness_compare, FitLevel,
};
use lfpp_core::field::{sample_field, COVARIANCE_SCALE};
use lfpp_core::measure::{
    ball_volume_dimension, gmc_coordinate_check, gmc_study, gmc_translation_check,
};
use lfpp_core::metric::{
    build_graph, distance_field, internal_distance, point_distance, trace_geodesic, weyl_shift,
};
use lfpp_core::mollify::mollify;
use lfpp_core::params::derive_params;
use lfpp_core::seed::{task_seed, SEED_RULE};
use lfpp_core::{FieldSample, GridSpec, MetricGraph, Normalization, Parameters, Rect, Vertex};

use crate::config::{Config, NormalizationKind};
use crate::error::{CliError, ConfigError};
use crate::manifest::{sha256_file, FileDigest, RunManifest, TaskTiming, MANIFEST_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    FieldSample,
    Dist,
    Ball,
    Geodesic,
    Confluence,
    Crossings,
    Fit,
    Bilip,
    Tightness,
    Rotation,
    Holder,
    Gmc,
    Dim,
    AxiomsAll,
}

impl Command {
    pub const ALL: [Command; 14] = [
        Command::FieldSample,
        Command::Dist,
        Command::Ball,
        Command::Geodesic,
        Command::Confluence,
        Command::Crossings,
        Command::Fit,
        Command::Bilip,
        Command::Tightness,
        Command::Rotation,
        Command::Holder,
        Command::Gmc,
        Command::Dim,
        Command::AxiomsAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::FieldSample => "field-sample",
            Command::Dist => "dist",
            Command::Ball => "ball",
            Command::Geodesic => "geodesic",
            Command::Confluence => "confluence",
            Command::Crossings => "crossings",
            Command::Fit => "fit",
            Command::Bilip => "bilip",
            Command::Tightness => "tightness",
            Command::Rotation => "rotation",
            Command::Holder => "holder",
            Command::Gmc => "gmc",
            Command::Dim => "dim",
            Command::AxiomsAll => "axioms-all",
        }
    }

    pub fn from_name(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Fields alive at once per worker, for the memory estimate.
    fn fields_per_task(self, cfg: &Config) -> usize {
        match self {
            Command::Crossings | Command::Rotation | Command::Gmc => 2 + cfg.run.eps.len(),
            Command::Fit => 0,
            _ => 3,
        }
    }

    fn parallel(self) -> bool {
        matches!(
            self,
            Command::Crossings
                | Command::Confluence
                | Command::Tightness
                | Command::Rotation
                | Command::Gmc
                | Command::Dim
        )
    }
}

/// Files produced by a command, in write order.
#[derive(Default)]
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
    inputs: Vec<FileDigest>,
    /// Set when the command ran but a check it performs failed.
    failure: Option<String>,
}

impl Outputs {
    fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }
}

struct Ctx<'a> {
    cfg: &'a Config,
    params: Parameters,
    spec: GridSpec,
    tasks: Vec<TaskTiming>,
}

impl Ctx<'_> {
    fn timed<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.tasks.push(TaskTiming {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    fn eps(&self) -> Result<f64, CliError> {
        Ok(self.cfg.first_eps()?)
    }

    fn normalization(&self) -> Normalization {
        match self.cfg.field.normalization {
            NormalizationKind::MeanZero => Normalization::MeanZero,
            NormalizationKind::CircleAverageZero => Normalization::CircleAverageZero {
                center: self.spec.window.center(),
                radius: self.cfg.field.circle_radius,
            },
        }
    }

    /// The single field used by field-sample, dist, ball, geodesic and bilip replica 0.
    fn field(&self) -> Result<FieldSample, CliError> {
        let seed = task_seed(self.cfg.seed, "field", 0);
        Ok(sample_field(&self.spec, seed, self.normalization())?)
    }

    fn graph(&self, field: &FieldSample) -> Result<MetricGraph, CliError> {
        let m = mollify(field, self.eps()?)?;
        Ok(build_graph(
            &m,
            self.params.xi,
            self.cfg.metric.stencil,
            self.cfg.metric.anisotropy,
        )?)
    }

    fn point(&self, p: Option<[f64; 2]>, default: (f64, f64)) -> Result<Vertex, CliError> {
        let (x, y) = p.map_or(default, |[x, y]| (x, y));
        Ok(self.spec.nearest_vertex(x, y)?)
    }

    fn source(&self) -> Result<Vertex, CliError> {
        self.point(self.cfg.points.source, self.spec.window.center())
    }

    fn target(&self) -> Result<Vertex, CliError> {
        let s = self
            .cfg
            .points
            .source
            .map_or(self.spec.window.center(), |[x, y]| (x, y));
        self.point(self.cfg.points.target, (s.0 + 0.25, s.1))
    }
}

/// Rough peak memory of a command, in bytes.
pub fn memory_estimate(cmd: Command, cfg: &Config, workers: usize) -> f64 {
    let n2 = (cfg.grid.n * cfg.grid.n) as f64;
    // Two complex spectra, the real fields, and the window graph with its search state.
    let per_task = n2 * (32.0 + 8.0 * cmd.fields_per_task(cfg) as f64 + 12.0);
    let concurrent = if cmd.parallel() {
        workers.min(cfg.run.replicas).max(1)
    } else {
        1
    };
    per_task * concurrent as f64
}

/// Runs `cmd` and writes its outputs and manifest into `out`.
pub fn run(cmd: Command, cfg: &Config, out: &Path) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    cfg.validate()?;
    let cap = cfg.run.memory_cap_gib * (1u64 << 30) as f64;
    let need = memory_estimate(cmd, cfg, rayon::current_num_threads());
    if need > cap {
        return Err(CliError::Resource(format!(
            "{} on a {}^2 grid needs about {:.2} GiB, above the cap of {} GiB",
            cmd.name(),
            cfg.grid.n,
            need / (1u64 << 30) as f64,
            cfg.run.memory_cap_gib
        )));
    }
    let mut resolved = cfg.clone();
    if cmd == Command::Fit {
        resolved.fit.input = absolute(out, &cfg.fit.input)?.display().to_string();
    }
    let mut ctx = Ctx {
        cfg: &resolved,
        params: resolved.parameters()?,
        spec: resolved.grid_spec()?,
        tasks: Vec::new(),
    };
    let outputs = match cmd {
        Command::FieldSample => field_sample(&mut ctx)?,
        Command::Dist => dist(&mut ctx)?,
        Command::Ball => ball(&mut ctx)?,
        Command::Geodesic => geodesic(&mut ctx)?,
        Command::Confluence => confluence(&mut ctx)?,
        Command::Crossings => crossings(&mut ctx)?,
        Command::Fit => fit(&mut ctx)?,
        Command::Bilip => bilip(&mut ctx)?,
        Command::Tightness => tightness(&mut ctx)?,
        Command::Rotation => rotation(&mut ctx)?,
        Command::Holder => holder(&mut ctx)?,
        Command::Gmc => gmc(&mut ctx)?,
        Command::Dim => dim(&mut ctx)?,
        Command::AxiomsAll => axioms(&mut ctx)?,
    };
    std::fs::create_dir_all(out)?;
    let mut digests = Vec::new();
    for (name, bytes) in &outputs.files {
        let path = out.join(name);
        std::fs::write(&path, bytes)?;
        digests.push(FileDigest {
            file: name.clone(),
            sha256: sha256_file(&path)?,
        });
    }
    let manifest = RunManifest {
        manifest_version: MANIFEST_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: cmd.name().to_string(),
        root_seed: resolved.seed,
        config: resolved.clone(),
        seed_rule: SEED_RULE.to_string(),
        covariance_scale: COVARIANCE_SCALE,
        matched_calibration: lfpp_core::field::matched_calibration(resolved.grid.n),
        inputs: outputs.inputs,
        outputs: digests,
        wall_seconds: start.elapsed().as_secs_f64(),
        tasks: ctx.tasks,
    };
    manifest.write(out)?;
    match outputs.failure {
        Some(msg) => Err(CliError::Run(msg)),
        None => Ok(manifest),
    }
}

fn absolute(out: &Path, file: &str) -> Result<PathBuf, CliError> {
    let p = Path::new(file);
    let p = if p.is_absolute() {
        p.to_path_buf()
    } else {
        out.join(p)
    };
    Ok(std::path::absolute(&p)?)
}

fn csv(header: &str) -> String {
    format!("{header}\n")
}

fn field_sample(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let eps = ctx.eps()?;
    let f = ctx.field()?;
    let m = ctx.timed("mollify", || mollify(&f, eps))?;
    let (mut fb, mut mb) = (Vec::new(), Vec::new());
    f.write_dump_to(&mut fb)?;
    m.write_dump_to(&mut mb)?;
    let mut out = Outputs::default();
    out.add("field.bin", fb);
    out.add("mollified.bin", mb);
    Ok(out)
}

fn dist(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let g = ctx.graph(&ctx.field()?)?;
    let src = ctx.source()?;
    let df = ctx.timed("dijkstra", || distance_field(&g, &[src]))?;
    let mut bytes = Vec::new();
    df.write_csv(&mut bytes)?;
    let mut out = Outputs::default();
    out.add("dist.csv", bytes);
    Ok(out)
}

fn geodesic(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let g = ctx.graph(&ctx.field()?)?;
    let (src, dst) = (ctx.source()?, ctx.target()?);
    let df = ctx.timed("dijkstra", || distance_field(&g, &[src]))?;
    let geo = trace_geodesic(&df, dst)?;
    let mut bytes = Vec::new();
    geo.write_csv(&mut bytes)?;
    let mut out = Outputs::default();
    out.add("geodesic.csv", bytes);
    Ok(out)
}

fn ball(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let g = ctx.graph(&ctx.field()?)?;
    let src = ctx.source()?;
    let df = ctx.timed("dijkstra", || distance_field(&g, &[src]))?;
    let s = hitting_radius(&df, ctx.cfg.ball.euclidean_radius)?;
    let b = filled_metric_ball(&df, s)?;
    let mut bytes = Vec::new();
    b.write_csv(&df, &mut bytes)?;
    let mut out = Outputs::default();
    out.add("ball.csv", bytes);
    Ok(out)
}

fn confluence(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let c = &ctx.cfg.confluence;
    let setup = ConfluenceSetup {
        eps: ctx.eps()?,
        inner_r: c.inner_r,
        outer_r: c.outer_r.clone(),
        stencil: ctx.cfg.metric.stencil,
        targets: ctx.cfg.targets(),
    };
    let (params, spec, replicas, seed) = (ctx.params, ctx.spec, ctx.cfg.run.replicas, ctx.cfg.seed);
    let reports = ctx.timed("replicas", || {
        confluence_ensemble(&params, &spec, &setup, replicas, seed)
    })?;
    let mut s = csv("seed,s,t,targets,ancestor_count");
    for r in &reports {
        for e in &r.entries {
            writeln!(
                s,
                "{},{},{},{},{}",
                r.seed, e.s, e.t, e.targets_per_t, e.ancestor_count
            )
            .unwrap();
        }
    }
    let mut out = Outputs::default();
    out.add("confluence.csv", s.into_bytes());
    Ok(out)
}

fn crossings(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let (params, spec, cfg) = (ctx.params, ctx.spec, ctx.cfg);
    let rep = ctx.timed("replicas", || {
        crossing_study(
            &params,
            &spec,
            &cfg.run.eps,
            cfg.run.replicas,
            cfg.seed,
            cfg.metric.stencil,
        )
    })?;
    let mut s = csv("gamma,d,eps,seed,crossing");
    for level in &rep.levels {
        for (seed, c) in level.seeds.iter().zip(&level.crossings) {
            writeln!(
                s,
                "{},{},{},{},{}",
                params.gamma, params.d, level.eps, seed, c
            )
            .unwrap();
        }
    }
    let mut out = Outputs::default();
    out.add("crossings.csv", s.into_bytes());
    Ok(out)
}

/// Rows of a crossings.csv: `(gamma, d, eps, crossing)`.
fn read_crossings(path: &Path) -> Result<Vec<(f64, f64, f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("fit.input: cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next() != Some("gamma,d,eps,seed,crossing") {
        return Err(ConfigError(format!(
            "fit.input: {} is not a crossings.csv",
            path.display()
        ))
        .into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            let num = |k: usize| -> Result<f64, CliError> {
                cols.get(k).and_then(|c| c.parse().ok()).ok_or_else(|| {
                    ConfigError(format!(
                        "fit.input: bad row {} in {}",
                        i + 2,
                        path.display()
                    ))
                    .into()
                })
            };
            Ok((num(0)?, num(1)?, num(2)?, num(4)?))
        })
        .collect()
}

fn fit(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let path = PathBuf::from(&ctx.cfg.fit.input);
    let rows = read_crossings(&path)?;
    let (gamma, d) = rows
        .first()
        .map(|r| (r.0, r.1))
        .ok_or_else(|| ConfigError("fit.input: no rows".into()))?;
    let mut levels: Vec<FitLevel> = Vec::new();
    for &(_, _, eps, c) in &rows {
        match levels.iter_mut().find(|l| l.log_x == eps.ln()) {
            Some(l) => l.samples.push(c),
            None => levels.push(FitLevel {
                log_x: eps.ln(),
                samples: vec![c],
            }),
        }
    }
    let (boot, seed) = (ctx.cfg.run.bootstrap, ctx.cfg.seed);
    let rep = ctx.timed("fit", || fit_exponent(&levels, boot, seed))?;
    let target = derive_params(gamma, d)?.exponent_one_minus_xiq;
    let mut s = csv("slope,ci_lo,ci_hi,target");
    writeln!(s, "{},{},{},{}", rep.slope, rep.ci.lo, rep.ci.hi, target).unwrap();
    let mut out = Outputs::default();
    out.inputs.push(FileDigest {
        file: path.display().to_string(),
        sha256: sha256_file(&path)?,
    });
    out.add("fit.csv", s.into_bytes());
    Ok(out)
}

fn bilip(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let cfg = ctx.cfg;
    let eps = ctx.eps()?;
    let seeds = replica_seeds(cfg.seed, "bilip", cfg.run.replicas)?;
    let mut s = csv("pair_id,sep,da,db,ratio");
    let mut next_id = 0;
    for (i, &seed) in seeds.iter().enumerate() {
        let f = sample_field(&ctx.spec, seed, ctx.normalization())?;
        let m = mollify(&f, eps)?;
        let a = build_graph(&m, ctx.params.xi, cfg.metric.stencil, cfg.metric.anisotropy)?;
        let b = build_graph(
            &m,
            ctx.params.xi,
            cfg.bilip.stencil_b,
            cfg.bilip.anisotropy_b,
        )?;
        let rep = ctx.timed(&format!("replica {i}"), || {
            bilipschitz_estimate(&a, &b, cfg.bilip.beta, cfg.bilip.pairs, seed)
        })?;
        for p in &rep.pairs {
            writeln!(
                s,
                "{},{},{},{},{}",
                next_id + p.pair_id,
                p.sep,
                p.da,
                p.db,
                p.ratio
            )
            .unwrap();
        }
        next_id += rep.pairs.len();
    }
    let mut out = Outputs::default();
    out.add("bilip.csv", s.into_bytes());
    Ok(out)
}

fn tightness(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let (params, spec, cfg) = (ctx.params, ctx.spec, ctx.cfg);
    let eps = ctx.eps()?;
    let t = &cfg.tightness;
    let rep = ctx.timed("replicas", || {
        tightness_compare(&params, &spec, eps, t.r1, t.r2, cfg.run.replicas, cfg.seed)
    })?;
    let mut s = csv("r,seed,normalized_distance");
    for (r, xs) in [(rep.r1, &rep.normalized_r1), (rep.r2, &rep.normalized_r2)] {
        for (seed, x) in rep.seeds.iter().zip(xs) {
            writeln!(s, "{r},{seed},{x}").unwrap();
        }
    }
    eprintln!("tightness: KS statistic {}", rep.ks);
    let mut out = Outputs::default();
    out.add("tightness.csv", s.into_bytes());
    Ok(out)
}

fn rotation(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let (params, spec, cfg) = (ctx.params, ctx.spec, ctx.cfg);
    let rep = ctx.timed("replicas", || {
        rotation_anisotropy(
            &params,
            &spec,
            cfg.rotation.anisotropy,
            &cfg.run.eps,
            cfg.run.replicas,
            cfg.seed,
        )
    })?;
    let mut s = csv("eps,ratio,ci_lo,ci_hi");
    for l in &rep.levels {
        writeln!(s, "{},{},{},{}", l.eps, l.ratio, l.ci.lo, l.ci.hi).unwrap();
    }
    let mut out = Outputs::default();
    out.add("rotation.csv", s.into_bytes());
    Ok(out)
}

fn holder(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let g = ctx.graph(&ctx.field()?)?;
    let (params, cfg) = (ctx.params, ctx.cfg);
    let rep = ctx.timed("scan", || {
        holder_scan(&g, &params, cfg.holder.pairs_per_decade, cfg.seed)
    })?;
    let mut s = csv("decade,sep_anchor,sep,d_anchor,d,slope,inside");
    for p in &rep.pairs {
        let inside = (p.slope > rep.chi && p.slope < rep.chi_prime) as u8;
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            p.decade, p.sep_anchor, p.sep, p.d_anchor, p.d, p.slope, inside
        )
        .unwrap();
    }
    let mut out = Outputs::default();
    out.add("holder.csv", s.into_bytes());
    Ok(out)
}

fn gmc(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let (spec, cfg) = (ctx.spec, ctx.cfg);
    let gamma = ctx.params.gamma;
    let regions: Vec<Rect> = cfg
        .gmc
        .regions
        .iter()
        .map(|r| Rect::new(r[0], r[1], r[2], r[3]))
        .collect();
    let rep = ctx.timed("replicas", || {
        gmc_study(
            gamma,
            &spec,
            &cfg.run.eps,
            &regions,
            cfg.run.replicas,
            cfg.seed,
        )
    })?;
    let mut s = csv("gamma,eps,seed,region_id,mass");
    for level in &rep.levels {
        for (seed, masses) in rep.seeds.iter().zip(&level.masses) {
            for (j, m) in masses.iter().enumerate() {
                writeln!(s, "{},{},{},{},{}", gamma, level.eps, seed, j, m).unwrap();
            }
        }
    }
    let mut out = Outputs::default();
    out.add("gmc.csv", s.into_bytes());
    Ok(out)
}

fn dim(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let (params, spec, cfg) = (ctx.params, ctx.spec, ctx.cfg);
    let eps = ctx.eps()?;
    let rep = ctx.timed("replicas", || {
        ball_volume_dimension(
            &params,
            &spec,
            eps,
            &cfg.dim.s_ladder,
            cfg.run.replicas,
            cfg.seed,
        )
    })?;
    let mut s = csv("gamma,seed,s,ball_mass");
    for r in &rep.replicas {
        for (radius, mass) in &r.volumes {
            writeln!(s, "{},{},{},{}", params.gamma, r.seed, radius, mass).unwrap();
        }
    }
    let mut f = csv("slope,ci_lo,ci_hi,target");
    writeln!(
        f,
        "{},{},{},{}",
        rep.fit.slope, rep.fit.ci.lo, rep.fit.ci.hi, params.d
    )
    .unwrap();
    let mut out = Outputs::default();
    out.add("dim.csv", s.into_bytes());
    out.add("dim_fit.csv", f.into_bytes());
    Ok(out)
}

struct Check {
    name: &'static str,
    error: f64,
    tolerance: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Exact graph-level checks of the metric axioms and measure identities on
/// the configured grid.
fn axioms(ctx: &mut Ctx) -> Result<Outputs, CliError> {
    let spec = ctx.spec;
    let params = ctx.params;
    let eps = ctx.eps()?;
    let stencil = ctx.cfg.metric.stencil;
    let a = ctx.cfg.metric.anisotropy;
    let seeds = replica_seeds(ctx.cfg.seed, "axioms", ctx.cfg.run.replicas.min(5))?;
    let wi = spec.window_index();
    let mut checks = vec![
        Check {
            name: "weyl_constant",
            error: 0.0,
            tolerance: 1e-12,
        },
        Check {
            name: "weyl_tree_changes",
            error: 0.0,
            tolerance: 0.0,
        },
        Check {
            name: "symmetry",
            error: 0.0,
            tolerance: 1e-12,
        },
        Check {
            name: "length_space",
            error: 0.0,
            tolerance: 0.0,
        },
        Check {
            name: "locality",
            error: 0.0,
            tolerance: 0.0,
        },
        Check {
            name: "internal_at_least_point",
            error: 0.0,
            tolerance: 0.0,
        },
        Check {
            name: "translation",
            error: 0.0,
            tolerance: 1e-12,
        },
        Check {
            name: "heat_semigroup",
            error: 0.0,
            tolerance: 1e-10,
        },
        Check {
            name: "gmc_translation",
            error: 0.0,
            tolerance: 1e-12,
        },
        Check {
            name: "gmc_identity_scaling",
            error: 0.0,
            tolerance: 0.0,
        },
    ];
    let mut bump = |name: &str, e: f64| {
        let c = checks.iter_mut().find(|c| c.name == name).unwrap();
        c.error = c.error.max(e);
    };
    let start = Instant::now();
    for (i, &seed) in seeds.iter().enumerate() {
        let f = sample_field(&spec, seed, Normalization::MeanZero)?;
        let m = mollify(&f, eps)?;
        let g = build_graph(&m, params.xi, stencil, a)?;
        // Deterministic probe vertices spread over the window.
        let probe = |k: usize| wi.global((k * 7919 + i * 104_729) % wi.len());
        let (u, v) = (probe(1), probe(2));

        let base = distance_field(&g, &[u])?;
        for c in [-1.0, 0.3, 2.0] {
            let shifted = weyl_shift(&g, |_| c)?;
            let df = distance_field(&shifted, &[u])?;
            let k = (params.xi * c).exp();
            for j in 0..g.len() {
                bump("weyl_constant", rel(df.dist[j], k * base.dist[j]));
                if df.predecessor(j) != base.predecessor(j) {
                    bump("weyl_tree_changes", 1.0);
                }
            }
        }

        bump(
            "symmetry",
            rel(point_distance(&g, u, v)?, point_distance(&g, v, u)?),
        );

        let from_v = distance_field(&g, &[v])?;
        for j in (0..g.len()).step_by(97) {
            if g.vertex(j) == v {
                continue;
            }
            let best = g
                .neighbors(j)
                .into_iter()
                .map(|(m, c)| c + from_v.dist[m])
                .fold(f64::INFINITY, f64::min);
            bump("length_space", rel(from_v.dist[j], best));
        }

        // A centred square covering a quarter of the window.
        let (qw, qh) = (wi.width / 4, wi.height / 4);
        let inside = move |x: Vertex| {
            let (lx, ly) = (x.ix as i64 - wi.ix0 as i64, x.iy as i64 - wi.iy0 as i64);
            lx >= qw as i64 && lx < 3 * qw as i64 && ly >= qh as i64 && ly < 3 * qh as i64
        };
        let (p, q) = (
            wi.global(qh * 2 * wi.width + qw + 1),
            wi.global((3 * qh - 1) * wi.width + 3 * qw - 2),
        );
        let other = mollify(
            &sample_field(&spec, seed ^ 0x5555, Normalization::MeanZero)?,
            eps,
        )?;
        let mut restricted = m.clone();
        for (j, x) in restricted.values.iter_mut().enumerate() {
            if !inside(Vertex::new(j % spec.n, j / spec.n)) {
                *x = other.values[j];
            }
        }
        let local = build_graph(&restricted, params.xi, stencil, a)?;
        let d_full = internal_distance(&g, p, q, inside)?;
        let d_local = internal_distance(&local, p, q, inside)?;
        bump("locality", rel(d_full, d_local));
        if d_full < point_distance(&g, p, q)? {
            bump("internal_at_least_point", 1.0);
        }

        let (sx, sy) = (qw / 2 + 1, qh / 3 + 1);
        let moved = f.translated(sx, sy);
        let gm = build_graph(&mollify(&moved, eps)?, params.xi, stencil, a)?;
        let shift = |x: Vertex| Vertex::new(x.ix + sx, x.iy + sy);
        let inside_shifted =
            move |x: Vertex| x.ix >= sx && x.iy >= sy && inside(Vertex::new(x.ix - sx, x.iy - sy));
        let d_moved = internal_distance(&gm, p, q, inside)?;
        let d_orig = internal_distance(&g, shift(p), shift(q), inside_shifted)?;
        bump("translation", rel(d_moved, d_orig));

        let twice = mollify(&mollify(&f, eps)?.as_field(), eps)?;
        let once = mollify(&f, eps * 2f64.sqrt())?;
        let scale = once.values.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        let diff = twice
            .values
            .iter()
            .zip(&once.values)
            .fold(0.0f64, |s, (x, y)| s.max((x - y).abs()));
        bump("heat_semigroup", diff / scale);

        let w = spec.window;
        let region = Rect::new(
            w.x0 + 0.25 * w.width(),
            w.y0 + 0.25 * w.height(),
            w.x0 + 0.5 * w.width(),
            w.y0 + 0.5 * w.height(),
        );
        let (l, r) = gmc_translation_check(&f, params.gamma, eps, (sx, sy), region)?;
        bump("gmc_translation", rel(l, r));
        let (l, r) = gmc_coordinate_check(&f, &params, eps, 1.0, region)?;
        bump("gmc_identity_scaling", rel(l, r));
    }
    ctx.tasks.push(TaskTiming {
        name: "checks".into(),
        seconds: start.elapsed().as_secs_f64(),
    });
    let mut s = csv("check,max_error,tolerance,pass");
    let mut failed = Vec::new();
    for c in &checks {
        let pass = c.error <= c.tolerance;
        if !pass {
            failed.push(c.name);
        }
        writeln!(s, "{},{},{},{}", c.name, c.error, c.tolerance, pass as u8).unwrap();
    }
    let mut out = Outputs::default();
    out.add("axioms.csv", s.into_bytes());
    if !failed.is_empty() {
        out.failure = Some(format!("axiom checks failed: {}", failed.join(", ")));
    }
    Ok(out)
}

/// Reruns a manifest into `out` and compares every output digest.
pub fn replay(manifest_path: &Path, out: &Path) -> Result<RunManifest, CliError> {
    let recorded = RunManifest::read(manifest_path)?;
    let cmd = Command::from_name(&recorded.command).ok_or_else(|| {
        ConfigError(format!(
            "manifest names unknown command {:?}",
            recorded.command
        ))
    })?;
    for input in &recorded.inputs {
        let now = sha256_file(Path::new(&input.file))?;
        if now != input.sha256 {
            return Err(CliError::Digest(format!("input {} changed", input.file)));
        }
    }
    let fresh = run(cmd, &recorded.config, out)?;
    let mut mismatches = Vec::new();
    for want in &recorded.outputs {
        match fresh.outputs.iter().find(|o| o.file == want.file) {
            Some(got) if got.sha256 == want.sha256 => {}
            Some(_) => mismatches.push(want.file.clone()),
            None => mismatches.push(format!("{} (missing)", want.file)),
        }
    }
    if fresh.outputs.len() != recorded.outputs.len() {
        mismatches.push("output file list differs".into());
    }
    if mismatches.is_empty() {
        Ok(fresh)
    } else {
        Err(CliError::Digest(mismatches.join(", ")))
    }
}
