use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use anyhow::{bail, Context};
use plexsim::ingest::parse_utc_offset;
use plexsim::simmetrics::{parse_attributes, write_attributes};
use plexsim::{
    aggregate_counts, aggregate_proximity, build_layer, default_alpha_grid, derive_seed,
    filter_participants, filter_proximity_window, generate, icc_alpha_sweep, icc_p_value,
    icc_std_envelope, overlap_alpha_sweep, parse_counts, parse_events, weighted_icc, write_counts,
    ActivityThresholds, AttributeTable, Convention, DirectedCountLayer, Error, Execution,
    IccResult, Layer, PValueOptions, ParticipantActivity, ProximityConfig, SynthConfig,
};
use serde::Serialize;

use crate::args::{AttributeArgs, Format, InputArgs, NullArgs};
use crate::config::{
    parse_encoding, AttributeConfig, BootstrapConfig, FileRef, InputConfig, RunConfig,
    SignificanceConfig,
};
use crate::output::Output;

/// Counts for the selected layers, in `Layer` order.
pub struct Dataset {
    pub counts: Vec<DirectedCountLayer>,
    pub activity: Option<Vec<(ParticipantActivity, bool)>>,
    pub config: InputConfig,
}

impl Dataset {
    fn participants(&self) -> usize {
        self.counts.first().map_or(0, |c| c.node_set().len())
    }
}

fn select_layers(
    mut available: Vec<DirectedCountLayer>,
    requested: &[Layer],
) -> anyhow::Result<Vec<DirectedCountLayer>> {
    if requested.is_empty() {
        return Ok(available);
    }
    let wanted: BTreeSet<Layer> = requested.iter().copied().collect();
    for l in &wanted {
        if !available.iter().any(|c| c.layer() == *l) {
            bail!("layer {l} is not present in the input");
        }
    }
    available.retain(|c| wanted.contains(&c.layer()));
    Ok(available)
}

pub fn load_input(args: &InputArgs) -> anyhow::Result<Dataset> {
    if let Some(path) = &args.counts {
        let (file, bytes) = FileRef::read(path)?;
        let counts = parse_counts(&bytes[..]).with_context(|| path.display().to_string())?;
        let counts = select_layers(counts, &args.layers)?;
        let layers = counts.iter().map(|c| c.layer()).collect();
        return Ok(Dataset {
            counts,
            activity: None,
            config: InputConfig::Counts { file, layers },
        });
    }
    let path = args
        .events
        .as_ref()
        .expect("clap requires events or counts");
    let (file, bytes) = FileRef::read(path)?;
    let events = parse_events(&bytes[..]).with_context(|| path.display().to_string())?;
    let f = &args.filters;
    let proximity = ProximityConfig {
        rssi_threshold: f.rssi_threshold,
        gap_cap_seconds: f.gap_cap,
        bin_seconds: f.bin_seconds,
    };
    if proximity.bin_seconds <= 0 || proximity.gap_cap_seconds < 0 {
        bail!("--bin-seconds must be positive and --gap-cap nonnegative");
    }
    let thresholds = (!f.no_activity_filter).then_some(ActivityThresholds {
        min_span_days: f.min_span_days,
        min_calls: f.min_calls,
        min_sms: f.min_sms,
        min_proximity_hours: f.min_proximity_hours,
    });
    let everyone = ActivityThresholds {
        min_span_days: 0.0,
        min_calls: 0,
        min_sms: 0,
        min_proximity_hours: 0.0,
    };
    let (nodes, summaries) = filter_participants(
        &events,
        thresholds.as_ref().unwrap_or(&everyone),
        &proximity,
    )
    .with_context(|| path.display().to_string())?;
    let activity = summaries
        .into_iter()
        .map(|a| {
            let kept = nodes.contains(&a.node);
            (a, kept)
        })
        .collect();

    let windowed = if f.no_window {
        events
    } else {
        let offset = parse_utc_offset(&f.utc_offset)?;
        filter_proximity_window(&events, offset)
    };
    let present: Vec<Layer> = Layer::ALL
        .into_iter()
        .filter(|l| windowed.iter().any(|e| e.layer == *l))
        .collect();
    let layers = if args.layers.is_empty() {
        present
    } else {
        args.layers.clone()
    };
    let mut counts = Vec::new();
    for layer in Layer::ALL.into_iter().filter(|l| layers.contains(l)) {
        counts.push(match layer {
            Layer::Proximity => aggregate_proximity(&windowed, &nodes, &proximity)
                .with_context(|| path.display().to_string())?,
            _ => aggregate_counts(layer, &windowed, &nodes),
        });
    }
    let layers = counts.iter().map(|c| c.layer()).collect();
    Ok(Dataset {
        counts,
        activity: Some(activity),
        config: InputConfig::Events {
            file,
            layers,
            thresholds,
            proximity,
            utc_offset: (!f.no_window).then(|| f.utc_offset.clone()),
        },
    })
}

pub fn load_attributes(
    args: &AttributeArgs,
) -> anyhow::Result<(AttributeTable, Vec<String>, AttributeConfig)> {
    let mut encodings = BTreeMap::new();
    for spec in &args.encoding {
        let (var, map) = parse_encoding(spec)?;
        if encodings.insert(var.clone(), map).is_some() {
            bail!("encoding for `{var}` given twice");
        }
    }
    let (file, bytes) = FileRef::read(&args.attributes)?;
    let table = parse_attributes(&bytes[..], &encodings)
        .with_context(|| args.attributes.display().to_string())?;
    let variables: Vec<String> = if args.variables.is_empty() {
        table.variables().map(str::to_string).collect()
    } else {
        for v in &args.variables {
            if table.kind(v).is_none() {
                return Err(Error::UnknownVariable(v.clone()).into());
            }
        }
        args.variables.clone()
    };
    if variables.is_empty() {
        bail!("{} defines no variables", args.attributes.display());
    }
    let config = AttributeConfig {
        file,
        variables: variables.clone(),
        encodings,
    };
    Ok((table, variables, config))
}

fn check_alphas(alphas: &[f64]) -> anyhow::Result<()> {
    if alphas.is_empty() {
        bail!("no alpha given");
    }
    for &a in alphas {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::NegativeAlpha(a).into());
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct LayerSummary {
    layer: Layer,
    nodes: usize,
    edges: usize,
    directed_entries: usize,
    total: f64,
}

#[derive(Serialize)]
struct ActivityRow<'a> {
    node: &'a str,
    span_days: f64,
    call_count: u64,
    sms_count: u64,
    proximity_hours: f64,
    included: bool,
}

pub fn build(input: &InputArgs, alpha: f64, out_dir: &Path) -> anyhow::Result<()> {
    check_alphas(&[alpha])?;
    let data = load_input(input)?;
    let mut config = RunConfig::new("build");
    config.input = Some(data.config.clone());
    config.alphas = vec![alpha];
    let out = Output::new(out_dir, &config)?;

    let mut layers = Vec::new();
    for counts in &data.counts {
        let layer = build_layer(counts, alpha)?;
        out.csv_with(&format!("layer_{}.csv", counts.layer()), |buf| {
            layer.write_edges(buf, None)
        })?;
        layers.push(LayerSummary {
            layer: counts.layer(),
            nodes: layer.nodes().len(),
            edges: layer.edges().len(),
            directed_entries: counts.len(),
            total: counts.total(),
        });
    }
    out.csv_with("counts.csv", |buf| write_counts(buf, &data.counts))?;
    if let Some(activity) = &data.activity {
        let rows: Vec<ActivityRow> = activity
            .iter()
            .map(|(a, kept)| ActivityRow {
                node: &a.node,
                span_days: a.span_days,
                call_count: a.call_count,
                sms_count: a.sms_count,
                proximity_hours: a.proximity_hours,
                included: *kept,
            })
            .collect();
        out.table("activity", &rows, Format::Csv)?;
    }
    let manifest = serde_json::json!({
        "alpha": alpha,
        "participants": data.participants(),
        "layers": layers,
    });
    out.json("manifest.json", "manifest", &manifest)?;
    out.snapshot()
}

#[derive(Serialize)]
struct IccRow<'a> {
    layer: Layer,
    variable: &'a str,
    alpha: f64,
    r: f64,
    s_sq: f64,
    t_sq: f64,
    x_bar: f64,
    pair_count: usize,
    excluded_pairs: usize,
    convention: Convention,
}

impl<'a> From<&'a IccResult> for IccRow<'a> {
    fn from(r: &'a IccResult) -> Self {
        Self {
            layer: r.layer,
            variable: &r.variable,
            alpha: r.alpha,
            r: r.r,
            s_sq: r.s_sq,
            t_sq: r.t_sq,
            x_bar: r.x_bar,
            pair_count: r.pair_count,
            excluded_pairs: r.excluded_pairs,
            convention: r.convention,
        }
    }
}

pub struct AnalysisArgs<'a> {
    pub input: &'a InputArgs,
    pub attrs: &'a AttributeArgs,
    pub alphas: &'a [f64],
    pub convention: Convention,
    pub format: Format,
}

fn prepare(
    command: &'static str,
    a: &AnalysisArgs,
) -> anyhow::Result<(Dataset, AttributeTable, Vec<String>, RunConfig)> {
    check_alphas(a.alphas)?;
    let data = load_input(a.input)?;
    let (table, variables, attr_config) = load_attributes(a.attrs)?;
    let mut config = RunConfig::new(command);
    config.input = Some(data.config.clone());
    config.attributes = Some(attr_config);
    config.alphas = a.alphas.to_vec();
    config.convention = Some(a.convention);
    config.format = Some(a.format);
    Ok((data, table, variables, config))
}

pub fn similarity(a: &AnalysisArgs, out_dir: &Path) -> anyhow::Result<()> {
    let (data, attrs, variables, config) = prepare("similarity", a)?;
    let mut results = Vec::new();
    for &alpha in a.alphas {
        for counts in &data.counts {
            let layer = build_layer(counts, alpha)?;
            for v in &variables {
                results.push(weighted_icc(&layer, &attrs, v, a.convention)?);
            }
        }
    }
    let out = Output::new(out_dir, &config)?;
    let rows: Vec<IccRow> = results.iter().map(IccRow::from).collect();
    out.table("similarity", &rows, a.format)?;
    out.snapshot()
}

#[derive(Serialize)]
struct PValueRow<'a> {
    layer: Layer,
    variable: &'a str,
    alpha: f64,
    r: f64,
    p_value: f64,
    #[serde(rename = "B")]
    replicas: usize,
    discarded_replicas: usize,
    null_mean: f64,
    null_std: f64,
    null_model: plexsim::NullModel,
    sidedness: plexsim::Sidedness,
    estimator: plexsim::PValueEstimator,
    seed: u64,
}

#[derive(Serialize)]
struct NullRow<'a> {
    layer: Layer,
    variable: &'a str,
    alpha: f64,
    replica: usize,
    r: Option<f64>,
}

pub fn pvalues(
    a: &AnalysisArgs,
    null: &NullArgs,
    exec: Execution,
    out_dir: &Path,
) -> anyhow::Result<()> {
    let (data, attrs, variables, mut config) = prepare("pvalues", a)?;
    if null.replicas == 0 {
        bail!("--replicas must be at least 1");
    }
    let sig = SignificanceConfig {
        replicas: null.replicas,
        seed: null.seed,
        null_model: null.null_model.into(),
        sidedness: null.sidedness.into(),
        estimator: null.estimator.into(),
    };
    let mut results = Vec::new();
    for &alpha in a.alphas {
        for counts in &data.counts {
            let layer = build_layer(counts, alpha)?;
            for v in &variables {
                let opts = PValueOptions {
                    replicas: sig.replicas,
                    seed: derive_seed(sig.seed, &format!("pvalues/{}/{v}/{alpha}", counts.layer())),
                    null_model: sig.null_model,
                    sidedness: sig.sidedness,
                    estimator: sig.estimator,
                    convention: a.convention,
                    execution: exec,
                };
                results.push(icc_p_value(&layer, &attrs, v, &opts)?);
            }
        }
    }
    config.significance = Some(sig);
    let out = Output::new(out_dir, &config)?;
    let rows: Vec<PValueRow> = results
        .iter()
        .map(|s| PValueRow {
            layer: s.layer,
            variable: &s.variable,
            alpha: s.alpha,
            r: s.observed_r,
            p_value: s.p_value,
            replicas: s.replicas,
            discarded_replicas: s.discarded_replicas,
            null_mean: s.null_mean,
            null_std: s.null_std,
            null_model: s.null_model,
            sidedness: s.sidedness,
            estimator: s.estimator,
            seed: s.seed,
        })
        .collect();
    out.table("pvalues", &rows, a.format)?;
    let null_rows: Vec<NullRow> = results
        .iter()
        .flat_map(|s| {
            s.null_distribution
                .iter()
                .enumerate()
                .map(|(i, r)| NullRow {
                    layer: s.layer,
                    variable: &s.variable,
                    alpha: s.alpha,
                    replica: i,
                    r: *r,
                })
        })
        .collect();
    out.table("null_distribution", &null_rows, a.format)?;
    out.snapshot()
}

#[derive(Serialize)]
struct SweepRow {
    layer: Layer,
    variable: String,
    alpha: f64,
    r: Option<f64>,
    s_sq: Option<f64>,
    t_sq: Option<f64>,
    x_bar: Option<f64>,
    pair_count: Option<usize>,
    excluded_pairs: Option<usize>,
    convention: Convention,
    std: Option<f64>,
    status: &'static str,
    note: String,
}

pub fn sweep(
    a: &AnalysisArgs,
    bootstrap_replicas: usize,
    seed: u64,
    exec: Execution,
    out_dir: &Path,
) -> anyhow::Result<()> {
    let (data, attrs, variables, mut config) = prepare("sweep", a)?;
    let mut rows = Vec::new();
    for counts in &data.counts {
        for v in &variables {
            for point in icc_alpha_sweep(counts, &attrs, v, a.alphas, a.convention, exec) {
                let mut row = SweepRow {
                    layer: counts.layer(),
                    variable: v.clone(),
                    alpha: point.alpha,
                    r: None,
                    s_sq: None,
                    t_sq: None,
                    x_bar: None,
                    pair_count: None,
                    excluded_pairs: None,
                    convention: a.convention,
                    std: None,
                    status: "ok",
                    note: String::new(),
                };
                match point.result {
                    Ok(res) => {
                        row.r = Some(res.r);
                        row.s_sq = Some(res.s_sq);
                        row.t_sq = Some(res.t_sq);
                        row.x_bar = Some(res.x_bar);
                        row.pair_count = Some(res.pair_count);
                        row.excluded_pairs = Some(res.excluded_pairs);
                        if bootstrap_replicas > 0 {
                            let layer = build_layer(counts, point.alpha)?;
                            let sub = derive_seed(
                                seed,
                                &format!("sweep/{}/{v}/{}", counts.layer(), point.alpha),
                            );
                            match icc_std_envelope(
                                &layer,
                                &attrs,
                                v,
                                bootstrap_replicas,
                                sub,
                                a.convention,
                                exec,
                            ) {
                                Ok(env) => row.std = Some(env.std),
                                Err(e) if e.is_undefined_statistic() => {
                                    row.note = format!("std: {e}")
                                }
                                Err(e) => return Err(e.into()),
                            }
                        }
                    }
                    Err(e) if e.is_undefined_statistic() => {
                        row.status = "undefined";
                        row.note = e.to_string();
                    }
                    Err(e) => return Err(e.into()),
                }
                rows.push(row);
            }
        }
    }
    config.bootstrap = Some(BootstrapConfig {
        replicas: bootstrap_replicas,
        seed,
    });
    let out = Output::new(out_dir, &config)?;
    out.table("sweep", &rows, a.format)?;
    out.snapshot()
}

#[derive(Serialize)]
struct OverlapRow {
    alpha: f64,
    layer_a: Layer,
    layer_b: Layer,
    r_p: Option<f64>,
    pair_domain: plexsim::PairDomain,
    pair_count: Option<u64>,
    status: &'static str,
}

pub fn overlap(
    input: &InputArgs,
    alphas: &[f64],
    domain: plexsim::PairDomain,
    format: Format,
    exec: Execution,
    out_dir: &Path,
) -> anyhow::Result<()> {
    check_alphas(alphas)?;
    let data = load_input(input)?;
    let points = overlap_alpha_sweep(&data.counts, alphas, domain, exec)?;
    let mut rows = Vec::new();
    for point in points {
        let m = point.result?;
        for i in 0..m.layers.len() {
            for j in i + 1..m.layers.len() {
                let r_p = m.r_p[i][j];
                rows.push(OverlapRow {
                    alpha: point.alpha,
                    layer_a: m.layers[i],
                    layer_b: m.layers[j],
                    r_p,
                    pair_domain: domain,
                    pair_count: r_p.map(|_| m.pair_domain_size[i][j]),
                    status: if r_p.is_some() { "ok" } else { "undefined" },
                });
            }
        }
    }
    let mut config = RunConfig::new("overlap");
    config.input = Some(data.config);
    config.alphas = alphas.to_vec();
    config.pair_domain = Some(domain);
    config.format = Some(format);
    let out = Output::new(out_dir, &config)?;
    out.table("overlap", &rows, format)?;
    out.snapshot()
}

pub struct SynthOverrides {
    pub nodes: Option<usize>,
    pub seed: Option<u64>,
    pub cross_link: bool,
    pub layer_coupling: Option<f64>,
}

pub fn synth(config_path: Option<&Path>, o: &SynthOverrides, out_dir: &Path) -> anyhow::Result<()> {
    let mut cfg = match config_path {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<SynthConfig>(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => SynthConfig::default(),
    };
    if let Some(n) = o.nodes {
        cfg.n_nodes = n;
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(rho) = o.layer_coupling {
        cfg.layer_coupling = rho;
    }
    cfg.cross_link_mode |= o.cross_link;
    let data = generate(&cfg)?;
    let mut config = RunConfig::new("synth");
    config.synth = Some(cfg);
    let out = Output::new(out_dir, &config)?;
    out.csv_with("counts.csv", |buf| write_counts(buf, &data.counts))?;
    out.csv_with("attributes.csv", |buf| {
        write_attributes(buf, &data.attributes)
    })?;
    out.snapshot()
}

pub fn export_graph(
    input: &InputArgs,
    alpha: f64,
    prune: Option<f64>,
    out_dir: &Path,
) -> anyhow::Result<()> {
    check_alphas(&[alpha])?;
    if let Some(p) = prune {
        if !(p.is_finite() && p >= 0.0) {
            bail!("--prune must be a nonnegative number, got {p}");
        }
    }
    let data = load_input(input)?;
    let mut config = RunConfig::new("export-graph");
    config.input = Some(data.config.clone());
    config.alphas = vec![alpha];
    config.prune = prune;
    let out = Output::new(out_dir, &config)?;
    for counts in &data.counts {
        let layer = build_layer(counts, alpha)?;
        out.csv_with(&format!("edges_{}.csv", counts.layer()), |buf| {
            layer.write_edges(buf, prune)
        })?;
        out.csv_with(&format!("nodes_{}.csv", counts.layer()), |buf| {
            layer.write_strengths(buf)
        })?;
    }
    out.snapshot()
}

/// Keeps `default_alpha_grid` when no grid was given.
pub fn alpha_grid(given: &[f64]) -> Vec<f64> {
    if given.is_empty() {
        default_alpha_grid()
    } else {
        given.to_vec()
    }
}
