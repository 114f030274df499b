use std::collections::BTreeSet;
use std::sync::Arc;

use polargeo::chart::SharedChart;
use polargeo::isoparametric::{section_weyl_group, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP};
use polargeo::mesh::Mesh;
use polargeo::polar::{certify_polar, section_at, PolarGrid};
use polargeo::synthesis::{
    equivariance_check, multi_rotational, prepare_profile, rotation_hypersurface, section_slice_check, sweep,
    transversality_check, warped_to_rotation, BlockOptions, Completion, EvennessOptions, MetricOptions,
    PreparedProfile, ProfileHypersurface, SweepOptions, SweptHypersurface, WarpedProductSpec,
};
use polargeo::{GeomError, LinearAction, SectionSubspace, VecN};

use crate::config::{positive, RunConfig, SynthSpec};
use crate::exit::{CliError, Code};
use crate::info::POLAR_SAMPLES;
use crate::inputs::{load_action, profile_chart, read_to_string};
use crate::meta::{MeshMeta, MetaAction, MetaSection, META_VERSION};
use crate::output::{fmt_f, write_atomic, Outcome};

pub const DEFAULT_TRIALS: usize = 50;
const SINGULAR_TOL: f64 = 1e-9;

struct Built {
    action: LinearAction,
    section: SectionSubspace,
    prepared: PreparedProfile,
    swept: SweptHypersurface,
    block: Option<(Vec<usize>, Vec<f64>)>,
}

fn record_geom(o: &mut Outcome, e: GeomError) -> CliError {
    match &e {
        GeomError::NotWeylInvariant { deviation } => o.value("weyl_deviation", *deviation),
        GeomError::NotEven { order, value } => {
            o.kv("evenness_failed_order", order);
            o.value("evenness_odd_derivative", *value);
        }
        GeomError::Unrealizable { node, mismatch } => {
            o.kv("unrealizable_node", node);
            o.value("realizability_mismatch", *mismatch);
        }
        _ => {}
    }
    e.into()
}

fn block_options(cfg: &RunConfig, spec: &SynthSpec, param_dim: usize) -> Result<BlockOptions, CliError> {
    let [nodes, groups] = cfg.resolution()?;
    let seed = cfg.seed.unwrap_or(polargeo::action::DEFAULT_SEED);
    let evenness_tol = match spec.evenness_tol {
        Some(t) => positive("evenness_tol", Some(t))?,
        None => f64::INFINITY,
    };
    Ok(BlockOptions {
        profile_counts: vec![nodes; param_dim],
        sweep: SweepOptions { seed, group_count: groups, singular_tol: SINGULAR_TOL },
        tol: cfg.tol()?,
        evenness: EvennessOptions { tol: evenness_tol, ..EvennessOptions::default() },
    })
}

fn build(cfg: &RunConfig, spec: &SynthSpec, chart: SharedChart, o: &mut Outcome) -> Result<Built, CliError> {
    let opts = block_options(cfg, spec, chart.param_dim())?;
    let need = |what: &str| CliError::new(Code::Usage, format!("{} mode needs `{what}`", spec.mode));
    let from_block = |b: polargeo::synthesis::BlockHypersurface| Built {
        section: b.swept.section().clone(),
        action: b.action,
        prepared: b.prepared,
        swept: b.swept,
        block: Some((b.block_dims, b.radii)),
    };
    match spec.mode.as_str() {
        "rotation" => {
            let n = spec.n.ok_or_else(|| need("n"))?;
            let k = chart.ambient_dim().saturating_sub(1);
            rotation_hypersurface(k, n, chart, &opts).map(from_block).map_err(|e| record_geom(o, e))
        }
        "multirot" => {
            let blocks = spec.blocks.clone().ok_or_else(|| need("blocks"))?;
            let radii = spec.radii.clone().unwrap_or_else(|| vec![1.0; blocks.len().saturating_sub(1)]);
            multi_rotational(&blocks, &radii, chart, &opts).map(from_block).map_err(|e| record_geom(o, e))
        }
        "warped" => {
            let fiber_dim = spec.fiber_dim.ok_or_else(|| need("fiber_dim"))?;
            let metric_tol = positive("metric_tol", spec.metric_tol)?;
            let fd_step = cfg.fd_step()?;
            let scale = spec.rho_scale.unwrap_or(1.0);
            let c = spec.fiber_radius.unwrap_or(1.0);
            let k = chart.param_dim();
            let base = Arc::clone(&chart);
            let ws = WarpedProductSpec::from_fn(chart, &opts.profile_counts, move |u| scale * base.eval(u)[k], fiber_dim)?
                .with_fiber_radius(c);
            let mo = MetricOptions { fd_step, realizability_tol: opts.tol, seed: opts.sweep.seed, ..MetricOptions::default() };
            let w = warped_to_rotation(&ws, &opts, mo).map_err(|e| record_geom(o, e))?;
            o.section("warped metric");
            o.kv("fiber_dim", fiber_dim);
            o.kv("fd_step", fmt_f(fd_step));
            o.kv("metric_samples", w.metric.samples);
            o.value("metric_relative_error", w.metric.max_relative_error);
            o.check("metric", w.metric.max_relative_error < metric_tol, Code::Metric);
            Ok(from_block(w.rotation))
        }
        "sweep" => {
            let aspec = cfg.action.as_ref().ok_or_else(|| need("[action]"))?;
            let action = load_action(cfg, aspec)?;
            let p = spec.section_point.as_ref().ok_or_else(|| need("section_point"))?;
            if p.len() != action.ambient_dim() {
                return Err(CliError::new(Code::Usage, "section_point has the wrong dimension"));
            }
            let section = section_at(&action, &VecN::from_column_slice(p))?;
            let cert = certify_polar(&action, &section, PolarGrid { samples: POLAR_SAMPLES, seed: opts.sweep.seed, tol: opts.tol });
            if !cert.polar {
                o.value("polar_residual", cert.max_residual);
                return Err(CliError::new(Code::Polarity, format!("action is not polar (residual {:e})", cert.max_residual)));
            }
            let w = section_weyl_group(&action, &section, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP)?;
            let profile = ProfileHypersurface::new(section.clone(), chart, &opts.profile_counts)?;
            let prepared = prepare_profile(profile, &w, opts.tol, opts.evenness).map_err(|e| record_geom(o, e))?;
            let swept = sweep(&action, &prepared.profile, &opts.sweep)?;
            Ok(Built { action, section, prepared, swept, block: None })
        }
        other => Err(CliError::new(Code::Usage, format!("unknown synth mode `{other}`"))),
    }
}

pub fn synth(cfg: &RunConfig, o: &mut Outcome) -> Result<(), CliError> {
    let spec = cfg.synth.clone().ok_or_else(|| CliError::new(Code::Usage, "missing [synth] table"))?;
    let tol = cfg.tol()?;
    let [nodes, groups] = cfg.resolution()?;
    let seed = cfg.seed.unwrap_or(polargeo::action::DEFAULT_SEED);
    let trials = spec.equivariance_trials.unwrap_or(DEFAULT_TRIALS);
    let out = cfg.out_dir()?;
    o.section("synthesis");
    o.kv("mode", &spec.mode);
    o.kv("profile", &spec.profile.kind);
    o.kv("resolution", format!("{nodes}x{groups}"));
    o.kv("seed", seed);
    o.kv("tol", fmt_f(tol));
    let chart = profile_chart(cfg, &spec.profile)?;
    let built = build(cfg, &spec, chart, o)?;

    let prepared = &built.prepared;
    if !prepared.contacts.is_empty() && spec.evenness_tol.is_none() {
        return Err(CliError::new(Code::Usage, "profile meets a Weyl wall: set `evenness_tol` in [synth]"));
    }
    o.section("profile");
    o.kv("nodes", prepared.profile.len());
    o.kv("closed", prepared.profile.closed());
    o.kv(
        "completion",
        match prepared.completion {
            Completion::Chamber => "chamber",
            Completion::Invariant => "invariant",
        },
    );
    if let Some(r) = &prepared.invariance {
        o.value("weyl_deviation", r.max_deviation);
    }
    o.check("weyl_invariance", true, Code::WeylInvariance);
    o.kv("wall_contacts", prepared.contacts.len());
    for c in &prepared.contacts {
        let odd: Vec<String> = c.report.odd_derivatives.iter().map(|(k, v)| format!("{k}:{}", fmt_f(*v))).collect();
        o.kv(&format!("contact node {} wall {}", c.node, c.wall), odd.join(" "));
    }
    if !prepared.contacts.is_empty() {
        o.check("evenness", true, Code::Evenness);
    }

    let cert = certify_polar(&built.action, &built.section, PolarGrid { samples: POLAR_SAMPLES, seed, tol });
    o.section("checks");
    o.value("polar_residual", cert.max_residual);
    o.check("polarity", cert.polar, Code::Polarity);
    let swept = &built.swept;
    o.kv("samples", swept.samples().len());
    o.kv("singular_samples", swept.singular_count());
    o.kv("weyl_representatives", swept.weyl_representatives());
    let eq = equivariance_check(swept, &built.action, trials, seed);
    o.kv("equivariance_trials", eq.trials);
    o.value("resolution", eq.resolution);
    o.value("equivariance_residual", eq.max_residual);
    o.value("equivariance_bound", eq.bound);
    o.check("equivariance", eq.passed, Code::Equivariance);
    let tr = transversality_check(&built.section, swept, tol);
    o.kv("transversality_checked", tr.checked);
    o.value("transversality_margin", tr.min_margin);
    o.check("transversality", tr.passed, Code::Transversality);
    let sl = section_slice_check(swept, &prepared.profile, tol);
    o.kv("slice_samples", sl.slice_count);
    o.value("slice_off_profile", sl.max_off_profile);
    o.value("slice_uncovered", sl.max_uncovered);
    o.check("slice", sl.passed, Code::Slice);

    let walls: BTreeSet<usize> = prepared.contacts.iter().map(|c| c.node).collect();
    let profile_text = match (&spec.profile.kind[..], &spec.profile.file) {
        ("points", Some(f)) => Some(read_to_string(&cfg.resolve(f), "profile")?),
        _ => None,
    };
    let mut stored = spec.clone();
    stored.profile.file = None;
    let meta = MeshMeta {
        format: META_VERSION,
        mode: spec.mode.clone(),
        seed,
        profile_nodes: nodes,
        group_count: groups,
        resolution: swept.resolution(),
        compact: prepared.profile.closed() || walls.len() >= 2,
        block_dims: built.block.as_ref().map(|b| b.0.clone()),
        radii: built.block.as_ref().map(|b| b.1.clone()),
        profile_text,
        action: MetaAction::from_action(&built.action),
        section: MetaSection::from_section(&built.section),
        synth: stored,
    };
    let mesh = Mesh::from_swept(swept);
    let mesh_path = out.join("mesh.obj");
    write_atomic(&mesh_path, &mesh.write_string())?;
    let meta_text = toml::to_string(&meta).map_err(|e| CliError::new(Code::Io, format!("metadata: {e}")))?;
    write_atomic(&crate::meta::meta_path(&mesh_path), &meta_text)?;
    o.section("outputs");
    o.kv("mesh", "mesh.obj");
    o.kv("metadata", "mesh.meta.toml");
    Ok(())
}
