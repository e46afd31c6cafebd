//! One function per subcommand. Each returns the record sets it produced
//! plus a verdict on the numerical invariants it checked; the caller turns
//! the verdict into the process exit status.

use crate::record::{RecordSet, Value};
use levylab_core::concentration::{
    cpn_family, cpn_family_via_haar, estimate_concentration, ConcentrationReport,
};
use levylab_core::experiments::{
    hilbert_coordinate_moment, induced_measure, sobolev_norms, yn_diameter,
    yn_tube_is_whole_space, zn_mass_outside, ActionSpec, CircleFamilyZ, EmbeddingTag, GroupTag,
    TargetSet, TargetTag,
};
use levylab_core::liealg::{
    build_basis, chi_coefficient, structure_constants, MatrixAlgebra,
};
use levylab_core::rng::{batched_map, RandomStream};
use levylab_core::rootdata::{
    build_root_system, closed_form_log_volume, log_volume_ratio, macdonald_log_volume,
    normalized_volume_ratio, ratio_asymptote, GroupSpec, SeriesTag,
};
use levylab_core::sampling::{
    matrix_to_doubles, sample_orthogonal, sample_special_unitary, sample_symplectic,
    sample_unitary, write_sample_dump, HaarSample, SampleDump,
};
use levylab_core::stats::{ks_one_sample, ks_two_sample};
use levylab_core::{Error, Result};
use statrs::distribution::{Beta, ContinuousCDF};
use std::path::Path;
use std::time::Instant;

/// Tolerances the driver enforces; matching the library test suite.
const VOLUME_REL_TOL: f64 = 1e-10;
const CHI_TOL: f64 = 1e-9;
const KILLING_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-10;
const ZN_NORM_TOL: f64 = 1e-8;
const SOBOLEV_W_TOL: f64 = 1e-6;
const SOBOLEV_L2_TOL: f64 = 1e-8;
const KS_ALPHA: f64 = 0.01;
/// Largest series parameter a volume sweep will accept.
const MAX_SWEEP_N: u32 = 500;

#[derive(Debug, Clone, Copy)]
pub struct Ctx {
    pub seed: u64,
    pub timings: bool,
}

pub struct CommandOutput {
    pub sets: Vec<RecordSet>,
    pub invariants_hold: bool,
}

impl CommandOutput {
    fn one(set: RecordSet, ok: bool) -> Self {
        Self { sets: vec![set], invariants_hold: ok }
    }
}

fn finish(mut set: RecordSet, started: Instant, ctx: Ctx) -> RecordSet {
    if ctx.timings {
        let ms = started.elapsed().as_millis() as u64;
        let rows = set.len();
        set.append_column("runtime_ms", vec![Value::UInt(ms); rows]);
    }
    set
}

fn txt(s: impl Into<String>) -> Value {
    Value::Text(s.into())
}

pub fn volume(
    series: SeriesTag,
    n_min: Option<u32>,
    n_max: u32,
    center: u32,
    ctx: Ctx,
) -> Result<CommandOutput> {
    let start = Instant::now();
    let lo = n_min.unwrap_or_else(|| series.min_n());
    series.validate_n(lo)?;
    if n_max < lo || n_max > MAX_SWEEP_N {
        return Err(Error::InvalidSpec(format!(
            "volume sweep needs {lo} <= n-max <= {MAX_SWEEP_N}, got {n_max}"
        )));
    }
    let mut set = RecordSet::new(
        "volume",
        ctx.seed,
        vec![
            "series",
            "n",
            "group",
            "center_order",
            "dim",
            "log_volume",
            "log_volume_closed_form",
            "relative_gap",
            "agree",
        ],
    );
    let mut ok = true;
    for n in lo..=n_max {
        let spec = GroupSpec::quotient(series, n, center)?;
        let rs = build_root_system(series, n)?;
        let mac = macdonald_log_volume(&rs, center)?.log_value;
        let cf = closed_form_log_volume(&spec)?.log_value;
        let gap = (mac - cf).abs() / cf.abs().max(1.0);
        let agree = gap < VOLUME_REL_TOL;
        ok &= agree;
        set.push(vec![
            txt(series.to_string()),
            Value::UInt(n as u64),
            txt(series.group_name(n)),
            Value::UInt(center as u64),
            Value::UInt(spec.dimension()),
            Value::Float(mac),
            Value::Float(cf),
            Value::Float(gap),
            Value::Bool(agree),
        ]);
    }
    Ok(CommandOutput::one(finish(set, start, ctx), ok))
}

pub fn ratio(
    series_list: &[SeriesTag],
    n_min: Option<u32>,
    n_max: u32,
    ctx: Ctx,
) -> Result<CommandOutput> {
    let start = Instant::now();
    if n_max > MAX_SWEEP_N {
        return Err(Error::InvalidSpec(format!(
            "ratio sweep capped at n-max {MAX_SWEEP_N}, got {n_max}"
        )));
    }
    let mut set = RecordSet::new(
        "ratio",
        ctx.seed,
        vec!["series", "n", "log_volume", "ratio", "normalized_ratio", "asymptote"],
    );
    for &series in series_list {
        // Smallest n with a valid consecutive pair below it.
        let valid_lo = match series {
            SeriesTag::A => series.min_n(),
            _ => series.min_n() + 1,
        };
        let lo = n_min.unwrap_or(valid_lo);
        if lo < valid_lo || n_max < lo {
            return Err(Error::InvalidSpec(format!(
                "series {series} ratios need {valid_lo} <= n-min <= n-max, got {lo}..={n_max}"
            )));
        }
        for n in lo..=n_max {
            let spec = GroupSpec::simply_connected(series, n)?;
            let log_v = closed_form_log_volume(&spec)?.log_value;
            // The raw ratio of consecutive volumes underflows past moderate
            // n; it is reported as the float it is, the normalized column is
            // the meaningful one.
            let raw = log_volume_ratio(series, n)?.exp();
            let normalized = normalized_volume_ratio(series, n)?;
            set.push(vec![
                txt(series.to_string()),
                Value::UInt(n as u64),
                Value::Float(log_v),
                Value::Float(raw),
                Value::Float(normalized),
                Value::Float(ratio_asymptote(series, n)),
            ]);
        }
    }
    Ok(CommandOutput::one(finish(set, start, ctx), true))
}

pub fn chi(pairs: &[(SeriesTag, u32)], ctx: Ctx) -> Result<CommandOutput> {
    let start = Instant::now();
    let mut set = RecordSet::new(
        "chi",
        ctx.seed,
        vec![
            "series",
            "n",
            "group",
            "algebra",
            "dim_alg",
            "chi",
            "closed_form",
            "spread",
            "ricci_bound",
            "killing_ok",
            "matches_closed_form",
        ],
    );
    let mut ok = true;
    for &(series, n) in pairs {
        let spec = GroupSpec::simply_connected(series, n)?;
        let algebra = MatrixAlgebra::from_group(&spec);
        let basis = build_basis(algebra)?;
        let sc = structure_constants(&basis)?;
        let report = chi_coefficient(&sc)?;
        let closed = algebra.chi_closed_form();
        let killing_ok = report.killing_diagonal_spread < KILLING_TOL;
        let matches = (report.chi - closed).abs() < CHI_TOL;
        ok &= killing_ok && matches;
        set.push(vec![
            txt(series.to_string()),
            Value::UInt(n as u64),
            txt(series.group_name(n)),
            txt(algebra.to_string()),
            Value::UInt(basis.dim_alg as u64),
            Value::Float(report.chi),
            Value::Float(closed),
            Value::Float(report.killing_diagonal_spread),
            Value::Float(report.ricci_bound),
            Value::Bool(killing_ok),
            Value::Bool(matches),
        ]);
    }
    Ok(CommandOutput::one(finish(set, start, ctx), ok))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum HaarGroupArg {
    So,
    Su,
    U,
    Usp,
}

impl HaarGroupArg {
    fn complex(self) -> bool {
        !matches!(self, HaarGroupArg::So)
    }

    fn label(self, n: usize) -> String {
        match self {
            HaarGroupArg::So => format!("SO({n})"),
            HaarGroupArg::Su => format!("SU({n})"),
            HaarGroupArg::U => format!("U({n})"),
            HaarGroupArg::Usp => format!("USp({})", 2 * n),
        }
    }

    /// Law of the squared modulus of the top-left entry: the first column is
    /// uniform on the unit sphere of R^n, C^n, or C^{2n}.
    fn first_entry_law(self, n: usize) -> (f64, f64) {
        match self {
            HaarGroupArg::So => (0.5, (n as f64 - 1.0) / 2.0),
            HaarGroupArg::Su | HaarGroupArg::U => (1.0, n as f64 - 1.0),
            HaarGroupArg::Usp => (1.0, 2.0 * n as f64 - 1.0),
        }
    }
}

pub fn haar_check(
    specs: &[(HaarGroupArg, usize)],
    samples: u64,
    dump: Option<&Path>,
    ctx: Ctx,
    stream_base: u64,
) -> Result<CommandOutput> {
    let start = Instant::now();
    if samples < 20 {
        return Err(Error::InsufficientData(format!(
            "need at least 20 samples for the distribution check, got {samples}"
        )));
    }
    if dump.is_some() && specs.len() != 1 {
        return Err(Error::InvalidSpec("--dump works with a single group".into()));
    }
    let mut set = RecordSet::new(
        "haar-check",
        ctx.seed,
        vec![
            "group",
            "n",
            "samples",
            "max_residual",
            "residual_ok",
            "entry_law",
            "ks_statistic",
            "ks_p",
            "ks_ok",
        ],
    );
    let mut ok = true;
    for (i, &(group, n)) in specs.iter().enumerate() {
        let min_n = if group == HaarGroupArg::Usp { 1 } else { 2 };
        if n < min_n {
            return Err(Error::InvalidSpec(format!(
                "haar-check needs n >= {min_n} for {group:?}, the entry law degenerates below"
            )));
        }
        let mut rng = RandomStream::new(ctx.seed, stream_base + i as u64).rng();
        let mut max_residual: f64 = 0.0;
        let mut entry_sq = Vec::with_capacity(samples as usize);
        let mut payload = Vec::new();
        let mut matrix_size = 0;
        for _ in 0..samples {
            let s: HaarSample = match group {
                HaarGroupArg::So => sample_orthogonal(n, &mut rng)?,
                HaarGroupArg::Su => sample_special_unitary(n, &mut rng)?,
                HaarGroupArg::U => sample_unitary(n, &mut rng)?,
                HaarGroupArg::Usp => sample_symplectic(n, &mut rng)?,
            };
            max_residual = max_residual.max(s.residuals().max());
            entry_sq.push(if group.complex() {
                s.matrix[(0, 0)].norm_sqr()
            } else {
                s.matrix[(0, 0)].re * s.matrix[(0, 0)].re
            });
            matrix_size = s.matrix.nrows();
            if dump.is_some() {
                payload.extend(matrix_to_doubles(&s.matrix, group.complex()));
            }
        }
        if let Some(path) = dump {
            write_sample_dump(
                path,
                &SampleDump {
                    n: matrix_size as u32,
                    complex: group.complex(),
                    count: samples as u32,
                    payload,
                },
            )?;
        }
        let (a, b) = group.first_entry_law(n);
        let beta = Beta::new(a, b).map_err(|e| Error::Domain(e.to_string()))?;
        let ks = ks_one_sample(&entry_sq, |x| beta.cdf(x))?;
        let residual_ok = max_residual < RESIDUAL_TOL;
        let ks_ok = !ks.rejects_at(KS_ALPHA);
        ok &= residual_ok && ks_ok;
        set.push(vec![
            txt(group.label(n)),
            Value::UInt(n as u64),
            Value::UInt(samples),
            Value::Float(max_residual),
            Value::Bool(residual_ok),
            txt(format!("Beta({a},{b})")),
            Value::Float(ks.statistic),
            Value::Float(ks.p_value),
            Value::Bool(ks_ok),
        ]);
    }
    Ok(CommandOutput::one(finish(set, start, ctx), ok))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RouteArg {
    Angles,
    Vector,
    Both,
}

pub fn cpn(
    ns: &[u32],
    epsilons: &[f64],
    trials: u64,
    route: RouteArg,
    plot: Option<&Path>,
    ctx: Ctx,
    stream_base: u64,
) -> Result<CommandOutput> {
    let start = Instant::now();
    if ns.is_empty() || ns.contains(&0) {
        return Err(Error::InvalidSpec("need at least one n >= 1".into()));
    }
    let routes: &[&str] = match route {
        RouteArg::Angles => &["angles"],
        RouteArg::Vector => &["vector"],
        RouteArg::Both => &["angles", "vector"],
    };
    let mut set = RecordSet::new(
        "cpn",
        ctx.seed,
        vec!["route", "n", "epsilon", "exact", "mc", "halfwidth", "within"],
    );
    let mut ok = true;
    let mut reports: Vec<Vec<ConcentrationReport>> = Vec::new();
    for (r, name) in routes.iter().enumerate() {
        let mut per_route = Vec::new();
        for (i, &n) in ns.iter().enumerate() {
            let family =
                if *name == "angles" { cpn_family(n) } else { cpn_family_via_haar(n) };
            let stream =
                RandomStream::new(ctx.seed, stream_base + ((r * ns.len() + i) as u64) * 1024);
            let report = estimate_concentration(&family, epsilons, trials, stream)?;
            for e in &report.entries {
                let exact = e.exact_mass.expect("built-in families carry exact masses");
                let within = (e.mc_mass - exact).abs() <= e.mc_halfwidth;
                ok &= within;
                set.push(vec![
                    txt(*name),
                    Value::UInt(e.n),
                    Value::Float(e.epsilon),
                    Value::Float(exact),
                    Value::Float(e.mc_mass),
                    Value::Float(e.mc_halfwidth),
                    Value::Bool(within),
                ]);
            }
            per_route.push(report);
        }
        reports.push(per_route);
    }
    if let Some(path) = plot {
        let mut merged = reports[0][0].clone();
        for r in &reports[0][1..] {
            merged = merged.merge(r.clone())?;
        }
        crate::record::emit_plot_data(&merged, path)?;
    }

    let mut sets = vec![finish(set, start, ctx)];
    if route == RouteArg::Both {
        let ks_start = Instant::now();
        let mut ks_set = RecordSet::new(
            "cpn-route-ks",
            ctx.seed,
            vec!["n", "draws", "ks_statistic", "ks_p", "ks_ok"],
        );
        for (i, &n) in ns.iter().enumerate() {
            let draws = trials.min(100_000);
            let a = batched_map(
                draws,
                4096,
                RandomStream::new(ctx.seed, stream_base + (1 << 20) + (i as u64) * 2048),
                |rng| (cpn_family(n).sampler)(rng),
            )?;
            let b = batched_map(
                draws,
                4096,
                RandomStream::new(ctx.seed, stream_base + (1 << 20) + (i as u64) * 2048 + 1024),
                |rng| (cpn_family_via_haar(n).sampler)(rng),
            )?;
            let ks = ks_two_sample(&a, &b)?;
            let pass = !ks.rejects_at(KS_ALPHA);
            ok &= pass;
            ks_set.push(vec![
                Value::UInt(n as u64),
                Value::UInt(draws),
                Value::Float(ks.statistic),
                Value::Float(ks.p_value),
                Value::Bool(pass),
            ]);
        }
        sets.push(finish(ks_set, ks_start, ctx));
    }
    Ok(CommandOutput { sets, invariants_hold: ok })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyArg {
    Y,
    Z,
}

pub fn circle(
    family: FamilyArg,
    ns: &[u64],
    delta: f64,
    trials: Option<u64>,
    ctx: Ctx,
    stream_base: u64,
) -> Result<CommandOutput> {
    let start = Instant::now();
    if ns.is_empty() {
        return Err(Error::InvalidSpec("need at least one n".into()));
    }
    match family {
        FamilyArg::Y => {
            let mut set = RecordSet::new(
                "circle-y",
                ctx.seed,
                vec!["n", "diameter", "epsilon", "tube_is_whole_space"],
            );
            for &n in ns {
                set.push(vec![
                    Value::UInt(n),
                    Value::Float(yn_diameter(n)?),
                    Value::Float(delta),
                    Value::Bool(yn_tube_is_whole_space(n, delta)?),
                ]);
            }
            Ok(CommandOutput::one(finish(set, start, ctx), true))
        }
        FamilyArg::Z => {
            let mut fields = vec![
                "n",
                "norm_const",
                "normalization_defect",
                "normalization_ok",
                "delta",
                "mass_outside",
            ];
            if trials.is_some() {
                fields.extend(["trials", "mc_mass", "mc_halfwidth", "mc_within"]);
            }
            let mut set = RecordSet::new("circle-z", ctx.seed, fields);
            let mut ok = true;
            for (i, &n) in ns.iter().enumerate() {
                let fam = CircleFamilyZ::new(n)?;
                let defect = fam.normalization_defect();
                let norm_ok = defect < ZN_NORM_TOL;
                ok &= norm_ok;
                let mass = zn_mass_outside(n, delta)?;
                let mut row = vec![
                    Value::UInt(n),
                    Value::Float(fam.norm_const),
                    Value::Float(defect),
                    Value::Bool(norm_ok),
                    Value::Float(delta),
                    Value::Float(mass),
                ];
                if let Some(t) = trials {
                    let stream = RandomStream::new(ctx.seed, stream_base + (i as u64) * 1024);
                    let report = estimate_concentration(&fam.observable(), &[delta], t, stream)?;
                    let e = &report.entries[0];
                    let within = (e.mc_mass - mass).abs() <= e.mc_halfwidth;
                    ok &= within;
                    row.extend([
                        Value::UInt(t),
                        Value::Float(e.mc_mass),
                        Value::Float(e.mc_halfwidth),
                        Value::Bool(within),
                    ]);
                }
                set.push(row);
            }
            Ok(CommandOutput::one(finish(set, start, ctx), ok))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ActionGroupArg {
    So,
    Su,
    U,
    Weights,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ActionTargetArg {
    Sphere,
    Circle,
    Hilbert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EmbeddingArg {
    Trivial,
    Fundamental,
    Axis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SetArg {
    Arc,
    Halfspace,
    Weakball,
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("expected a number, got {p:?}")))
        })
        .collect()
}

pub fn parse_i64_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidSpec(format!("expected an integer, got {p:?}")))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn action(
    group: ActionGroupArg,
    group_n: Option<usize>,
    weights: Option<&str>,
    target: ActionTargetArg,
    target_n: Option<usize>,
    embedding: EmbeddingArg,
    axis: Option<&str>,
    base: &str,
    set_kind: SetArg,
    set_params: &str,
    outside: bool,
    trials: u64,
    ctx: Ctx,
    stream_base: u64,
) -> Result<CommandOutput> {
    let start = Instant::now();
    let group_tag = match group {
        ActionGroupArg::Weights => {
            let w = parse_i64_list(weights.ok_or_else(|| {
                Error::InvalidSpec("--weights is required with --group weights".into())
            })?)?;
            GroupTag::CircleWeights(w)
        }
        other => {
            let n = group_n.ok_or_else(|| {
                Error::InvalidSpec("--group-n is required for matrix groups".into())
            })?;
            match other {
                ActionGroupArg::So => GroupTag::SpecialOrthogonal(n),
                ActionGroupArg::Su => GroupTag::SpecialUnitary(n),
                ActionGroupArg::U => GroupTag::Unitary(n),
                ActionGroupArg::Weights => unreachable!(),
            }
        }
    };
    let target_tag = match target {
        ActionTargetArg::Circle => TargetTag::Circle,
        ActionTargetArg::Sphere => TargetTag::Sphere(target_n.ok_or_else(|| {
            Error::InvalidSpec("--target-n is required for sphere targets".into())
        })?),
        ActionTargetArg::Hilbert => TargetTag::HilbertTruncation(target_n.ok_or_else(|| {
            Error::InvalidSpec("--target-n is required for truncation targets".into())
        })?),
    };
    let embedding_tag = match embedding {
        EmbeddingArg::Trivial => EmbeddingTag::Trivial,
        EmbeddingArg::Fundamental => EmbeddingTag::Fundamental,
        EmbeddingArg::Axis => {
            let a = parse_f64_list(axis.ok_or_else(|| {
                Error::InvalidSpec("--axis is required with --embedding axis".into())
            })?)?;
            if a.len() != 3 {
                return Err(Error::InvalidSpec("axis needs exactly 3 coordinates".into()));
            }
            EmbeddingTag::AxisRotation { axis: [a[0], a[1], a[2]] }
        }
    };
    let base_point = parse_f64_list(base)?;
    let params = parse_f64_list(set_params)?;
    let inner = match set_kind {
        SetArg::Arc => {
            if params.len() != 2 {
                return Err(Error::InvalidSpec("arc takes start,length".into()));
            }
            TargetSet::Arc { start: params[0], length: params[1] }
        }
        SetArg::Halfspace => {
            if params.len() != 2 || params[0] < 0.0 || params[0].fract() != 0.0 {
                return Err(Error::InvalidSpec("halfspace takes coordinate,level".into()));
            }
            TargetSet::HalfSpace { coordinate: params[0] as usize, level: params[1] }
        }
        SetArg::Weakball => {
            if params.len() < 3 {
                return Err(Error::InvalidSpec("weakball takes center,epsilon,v1,...".into()));
            }
            TargetSet::WeakBall {
                center: params[0],
                epsilon: params[1],
                v: params[2..].to_vec(),
            }
        }
    };
    let target_set =
        if outside { TargetSet::Complement(Box::new(inner)) } else { inner };

    let spec = ActionSpec { group: group_tag, target: target_tag, embedding: embedding_tag };
    let estimate = induced_measure(
        &spec,
        &base_point,
        &target_set,
        trials,
        RandomStream::new(ctx.seed, stream_base),
    )?;
    let mut set = RecordSet::new(
        "action",
        ctx.seed,
        vec![
            "group",
            "target",
            "embedding",
            "base_point",
            "target_set",
            "trials",
            "probability",
            "halfwidth",
        ],
    );
    set.push(vec![
        txt(format!("{:?}", spec.group)),
        txt(format!("{:?}", spec.target)),
        txt(format!("{:?}", spec.embedding)),
        txt(format!("{base_point:?}")),
        txt(format!("{target_set:?}")),
        Value::UInt(trials),
        Value::Float(estimate.probability),
        Value::Float(estimate.halfwidth),
    ]);
    Ok(CommandOutput::one(finish(set, start, ctx), true))
}

pub fn hilbert(
    dims: &[usize],
    trials: u64,
    level: f64,
    vector: Option<&str>,
    ctx: Ctx,
    stream_base: u64,
) -> Result<CommandOutput> {
    let start = Instant::now();
    if dims.is_empty() {
        return Err(Error::InvalidSpec("need at least one truncation dimension".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("tail level must lie in (0,1), got {level}")));
    }
    let v = match vector {
        Some(s) => parse_f64_list(s)?,
        None => vec![1.0],
    };
    let mut set = RecordSet::new(
        "hilbert",
        ctx.seed,
        vec![
            "dim",
            "trials",
            "exact_moment",
            "moment",
            "moment_stderr",
            "moment_ok",
            "level",
            "tail",
            "tail_halfwidth",
            "chebyshev_bound",
            "tail_ok",
        ],
    );
    let mut ok = true;
    for (i, &dim) in dims.iter().enumerate() {
        let m = hilbert_coordinate_moment(
            dim,
            &v,
            trials,
            RandomStream::new(ctx.seed, stream_base + (i as u64) * 1024),
        )?;
        let moment_ok = (m.estimate - m.exact).abs() <= 3.0 * m.stderr;

        let spec = ActionSpec {
            group: GroupTag::SpecialOrthogonal(dim),
            target: TargetTag::HilbertTruncation(dim),
            embedding: EmbeddingTag::Fundamental,
        };
        let tail_set = TargetSet::Complement(Box::new(TargetSet::WeakBall {
            v: vec![1.0],
            center: 0.0,
            epsilon: level,
        }));
        let tail = induced_measure(
            &spec,
            &[1.0],
            &tail_set,
            trials,
            RandomStream::new(ctx.seed, stream_base + (1 << 20) + (i as u64) * 1024),
        )?;
        // Chebyshev from the exact second moment 1/dim, with a factor-2
        // slack so Monte Carlo noise cannot flip a true pass.
        let bound = (1.0 / (dim as f64 * level * level)).min(1.0);
        let tail_ok = tail.probability <= (2.0 * bound).min(1.0);
        ok &= moment_ok && tail_ok;
        set.push(vec![
            Value::UInt(dim as u64),
            Value::UInt(trials),
            Value::Float(m.exact),
            Value::Float(m.estimate),
            Value::Float(m.stderr),
            Value::Bool(moment_ok),
            Value::Float(level),
            Value::Float(tail.probability),
            Value::Float(tail.halfwidth),
            Value::Float(bound),
            Value::Bool(tail_ok),
        ]);
    }
    Ok(CommandOutput::one(finish(set, start, ctx), ok))
}

pub fn sobolev(ns: &[u32], points: Option<usize>, ctx: Ctx) -> Result<CommandOutput> {
    let start = Instant::now();
    if ns.is_empty() {
        return Err(Error::InvalidSpec("need at least one mode number".into()));
    }
    let mut set = RecordSet::new(
        "sobolev",
        ctx.seed,
        vec![
            "n",
            "points",
            "w12_norm",
            "w12_defect",
            "w12_ok",
            "l2_norm",
            "l2_target",
            "l2_defect",
            "l2_ok",
        ],
    );
    let mut ok = true;
    for &n in ns {
        let pts = points.unwrap_or(20 * n as usize);
        let (w12, l2) = sobolev_norms(n, pts)?;
        let target = 1.0 / (n as f64 * n as f64 + 1.0).sqrt();
        let w12_defect = (w12 - 1.0).abs();
        let l2_defect = (l2 - target).abs();
        let w12_ok = w12_defect < SOBOLEV_W_TOL;
        let l2_ok = l2_defect < SOBOLEV_L2_TOL;
        ok &= w12_ok && l2_ok;
        set.push(vec![
            Value::UInt(n as u64),
            Value::UInt(pts as u64),
            Value::Float(w12),
            Value::Float(w12_defect),
            Value::Bool(w12_ok),
            Value::Float(l2),
            Value::Float(target),
            Value::Float(l2_defect),
            Value::Bool(l2_ok),
        ]);
    }
    Ok(CommandOutput::one(finish(set, start, ctx), ok))
}

/// Fixed battery of every experiment with seeds derived from the run seed.
/// Section k draws from stream ids starting at k * 2^32, so no two sections
/// share randomness.
pub fn suite(trials: u64, ctx: Ctx) -> Result<CommandOutput> {
    const SECTION: u64 = 1 << 32;
    let mut sets = Vec::new();
    let mut ok = true;
    let push = |out: CommandOutput, sets: &mut Vec<RecordSet>, ok: &mut bool| {
        *ok &= out.invariants_hold;
        sets.extend(out.sets);
    };

    for series in SeriesTag::ALL {
        push(volume(series, None, 30, 1, ctx)?, &mut sets, &mut ok);
    }
    for series in SeriesTag::ALL {
        push(ratio(&[series], Some(25), 200, ctx)?, &mut sets, &mut ok);
    }
    push(
        chi(
            &[
                (SeriesTag::A, 2),
                (SeriesTag::A, 3),
                (SeriesTag::A, 4),
                (SeriesTag::B, 2),
                (SeriesTag::B, 3),
                (SeriesTag::C, 2),
                (SeriesTag::C, 3),
                (SeriesTag::D, 4),
            ],
            ctx,
        )?,
        &mut sets,
        &mut ok,
    );
    push(
        haar_check(
            &[
                (HaarGroupArg::So, 2),
                (HaarGroupArg::So, 6),
                (HaarGroupArg::Su, 2),
                (HaarGroupArg::Su, 6),
                (HaarGroupArg::U, 3),
                (HaarGroupArg::Usp, 2),
                (HaarGroupArg::Usp, 3),
            ],
            200,
            None,
            ctx,
            2 * SECTION,
        )?,
        &mut sets,
        &mut ok,
    );
    push(
        cpn(&[5, 20], &[0.2, 0.3], trials, RouteArg::Both, None, ctx, 3 * SECTION)?,
        &mut sets,
        &mut ok,
    );
    push(
        circle(FamilyArg::Y, &[1, 4, 64], 1.0, None, ctx, 4 * SECTION)?,
        &mut sets,
        &mut ok,
    );
    push(
        circle(FamilyArg::Z, &[5, 20, 80], 0.3, Some(trials), ctx, 5 * SECTION)?,
        &mut sets,
        &mut ok,
    );
    push(
        action(
            ActionGroupArg::So,
            Some(2),
            None,
            ActionTargetArg::Circle,
            None,
            EmbeddingArg::Fundamental,
            None,
            "0.7",
            SetArg::Arc,
            "4.0,1.3",
            false,
            trials,
            ctx,
            6 * SECTION,
        )?,
        &mut sets,
        &mut ok,
    );
    push(
        action(
            ActionGroupArg::So,
            Some(3),
            None,
            ActionTargetArg::Circle,
            None,
            EmbeddingArg::Trivial,
            None,
            "1.0",
            SetArg::Arc,
            "0.8,0.5",
            false,
            500,
            ctx,
            7 * SECTION,
        )?,
        &mut sets,
        &mut ok,
    );
    push(
        hilbert(&[10, 100, 10_000], trials, 0.1, None, ctx, 8 * SECTION)?,
        &mut sets,
        &mut ok,
    );
    push(sobolev(&[1, 10, 100], None, ctx)?, &mut sets, &mut ok);

    Ok(CommandOutput { sets, invariants_hold: ok })
}
