use std::path::{Path, PathBuf};

use serde_json::json;
use trichonet::{
    default_gamma, emit_histogram, fit_trichotomy, parse_edge_list, parse_histogram,
    run_ensemble, self_consistent_gamma, stationary_with_leak, ClosedFormPmf, DegreeHistogram,
    DegreeMode, Delimiter, Directedness, EdgeListSpec, FitConfig, FitReport, GammaExponent,
    GridConfig, ModelParams, ResidentialCase, ResidentialTimeSpec, SelfLoopPolicy, SimConfig,
    SimMode, STABILITY_LIMIT,
};

use crate::args::{
    CompareArgs, DegreeModeArg, DelimiterArg, EvalArgs, FitArgs, IntegrateArgs, ModelKind,
    SimulateArgs,
};
use crate::output::{csv_table, emit, in_phase, write_file, Failure, RunManifest};

fn parse_mode(s: &str) -> Result<SimMode, Failure> {
    if s == "standard" {
        return Ok(SimMode::Standard);
    }
    let count = s
        .strip_prefix("poisson-fixed:")
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| Failure::usage(format!("unknown mode {s:?} (standard|poisson-fixed:<count>)")))?;
    Ok(SimMode::PoissonFixedSet { fixed_count: count })
}

pub fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let mode = parse_mode(&a.mode)?;
    if a.exclude_isolated && mode != SimMode::Standard {
        return Err(Failure::usage("--exclude-isolated applies to standard mode only"));
    }
    let params = a.model.params(if a.exclude_isolated { 1 } else { 0 })?;
    let config = SimConfig::new(params, a.n, a.runs, a.seed)
        .with_mode(mode)
        .with_tail_variance(a.tail_variance)
        .with_threads(a.threads);
    let ensemble = run_ensemble(&config)?;
    let rows: Vec<(u64, [f64; 2])> = (ensemble.k_min()..=ensemble.k_max())
        .map(|k| (k, [ensemble.prob(k), ensemble.variance(k)]))
        .collect();
    let csv = csv_table(
        "degree,mean_probability,variance",
        rows.iter().map(|(k, v)| (*k, &v[..])),
    );
    emit(a.out.as_deref(), &csv)?;
    if let Some(path) = &a.hist_out {
        write_file(path, &emit_histogram(&ensemble.pooled_histogram()))?;
    }
    if let Some(out) = &a.out {
        let mut manifest = RunManifest::new("simulate", &config);
        manifest.rng_seed = Some(a.seed);
        manifest.artifacts.push(out.clone());
        manifest.artifacts.extend(a.hist_out.clone());
        manifest.results = ensemble.tail_variance().map(|v| json!({ "tail_variance": v }));
        manifest.write_beside(out)?;
    }
    Ok(())
}

fn edge_spec(a: &FitArgs, path: &Path) -> EdgeListSpec {
    EdgeListSpec {
        delimiter: match a.delimiter {
            DelimiterArg::Auto => Delimiter::Auto,
            DelimiterArg::Whitespace => Delimiter::Whitespace,
            DelimiterArg::Comma => Delimiter::Comma,
            DelimiterArg::Tab => Delimiter::Tab,
        },
        directedness: if a.directed { Directedness::Directed } else { Directedness::Undirected },
        degree_mode: match a.degree_mode {
            DegreeModeArg::In => DegreeMode::In,
            DegreeModeArg::Out => DegreeMode::Out,
            DegreeModeArg::Total => DegreeMode::Total,
        },
        comment_prefix: a.comment,
        self_loops: if a.drop_self_loops { SelfLoopPolicy::Drop } else { SelfLoopPolicy::Count },
        dedup: a.dedup,
        ..EdgeListSpec::new(path)
    }
}

pub fn fit(a: FitArgs) -> Result<(), Failure> {
    let (hist, input, edges) = match (&a.hist, &a.edges) {
        (Some(path), _) => (parse_histogram(path).map_err(in_phase("ingest"))?, path.clone(), None),
        (None, Some(path)) => {
            let spec = edge_spec(&a, path);
            let hist = parse_edge_list(&spec).map_err(in_phase("ingest"))?;
            (hist, path.clone(), Some(spec))
        }
        (None, None) => return Err(Failure::usage("one of --hist or --edges is required")),
    };
    let dataset = a
        .dataset
        .clone()
        .or_else(|| input.file_stem().map(|s| s.to_string_lossy().into_owned()));
    let config = FitConfig {
        initial_lower: a.l0,
        initial_upper: a.u0,
        search_boundaries: !a.fixed_boundaries,
        max_head_params: a.max_head_params,
        gamma_convention: a.gamma_convention.into(),
        head_indexing: a.head_indexing.into(),
        dataset,
    };
    let report = fit_trichotomy(&hist, &config).map_err(in_phase("fit"))?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    emit(a.out.as_deref(), &json)?;
    let curve = a
        .curve
        .clone()
        .or_else(|| a.out.as_ref().map(|o| o.with_extension("curve.csv")));
    if let Some(path) = &curve {
        write_file(path, &curve_csv(&hist, &report))?;
    }
    if let Some(out) = &a.out {
        let resolved = json!({ "input": input, "edge_list": edges, "fit": config });
        let mut manifest = RunManifest::new("fit", &resolved);
        manifest.artifacts.push(out.clone());
        manifest.artifacts.extend(curve);
        manifest.warnings = report.warnings.clone();
        manifest.write_beside(out)?;
    }
    Ok(())
}

fn curve_csv(hist: &DegreeHistogram, report: &FitReport) -> String {
    let lo = hist.k_min().unwrap_or(1).max(1);
    let hi = hist.k_max().unwrap_or(lo);
    let rows: Vec<(u64, [f64; 2])> = (lo..=hi)
        .map(|k| (k, [hist.prob(k), report.fitted_prob(k)]))
        .collect();
    csv_table("degree,empirical,fitted", rows.iter().map(|(k, v)| (*k, &v[..])))
}

fn eval_params(a: &EvalArgs) -> Result<ModelParams, Failure> {
    let (Some(l), Some(u)) = (a.lower_bound, a.upper_bound) else {
        return Err(Failure::usage("trichotomy needs --L and --U"));
    };
    Ok(ModelParams::new(
        l,
        a.lower_threshold.unwrap_or(l),
        a.upper_threshold.unwrap_or(u),
        u,
    )?)
}

pub fn eval(a: EvalArgs) -> Result<(), Failure> {
    let k_max = a.k_max.unwrap_or(100);
    let need_p0 = || {
        if a.p0.is_empty() {
            Err(Failure::usage("mixture models need --p0"))
        } else {
            Ok(a.p0.as_slice())
        }
    };
    let (rows, source): (Vec<(u64, f64)>, serde_json::Value) = match a.model {
        ModelKind::Poisson => {
            let mean = a.mean.ok_or_else(|| Failure::usage("poisson needs --mean"))?;
            if mean == 0.0 {
                // no arrivals ever attach: all mass stays at degree 0
                let rows = (0..=k_max).map(|k| (k, if k == 0 { 1.0 } else { 0.0 })).collect();
                (rows, json!({ "kind": "poisson", "mean": 0.0 }))
            } else {
                pmf_rows(ClosedFormPmf::poisson(mean, k_max)?)
            }
        }
        ModelKind::Exp => pmf_rows(ClosedFormPmf::exp_network(k_max)?),
        ModelKind::Ba => pmf_rows(ClosedFormPmf::ba_power_law(k_max)?),
        ModelKind::MixtureGeom => pmf_rows(ClosedFormPmf::trunc_geom_mixture(
            need_p0()?,
            a.indexing.into(),
            k_max,
        )?),
        ModelKind::MixturePl => pmf_rows(ClosedFormPmf::trunc_power_law_mixture(need_p0()?, k_max)?),
        ModelKind::Trichotomy => {
            let params = eval_params(&a)?;
            let gamma = match a.gamma {
                Some(g) => GammaExponent::new(g, &params)?,
                None => default_gamma(&params, a.n),
            };
            let (rows, source) = pmf_rows(ClosedFormPmf::trichotomy(&params, gamma, a.n)?);
            let limit = a.k_max.unwrap_or(a.n);
            (rows.into_iter().filter(|(k, _)| *k <= limit).collect(), source)
        }
    };
    let table: Vec<(u64, [f64; 1])> = rows.iter().map(|(k, p)| (*k, [*p])).collect();
    emit(
        a.out.as_deref(),
        &csv_table("degree,probability", table.iter().map(|(k, v)| (*k, &v[..]))),
    )?;
    if let Some(out) = &a.out {
        let resolved = json!({ "model": source, "k_max": a.k_max, "network_size": a.n });
        let mut manifest = RunManifest::new("eval", &resolved);
        manifest.artifacts.push(out.clone());
        manifest.write_beside(out)?;
    }
    Ok(())
}

fn pmf_rows(pmf: ClosedFormPmf) -> (Vec<(u64, f64)>, serde_json::Value) {
    let source = serde_json::to_value(pmf.source()).expect("source serializes");
    (pmf.iter().collect(), source)
}

fn parse_case(s: &str, params: &ModelParams, grid: &GridConfig) -> Result<ResidentialCase, Failure> {
    Ok(match s {
        "ba" => ResidentialCase::BarabasiAlbert,
        "large-u" => ResidentialCase::LargeU,
        "small-u" => ResidentialCase::SmallU,
        "self-consistent" => ResidentialCase::Gamma {
            gamma: self_consistent_gamma(params, grid)?,
        },
        other => {
            let gamma = other
                .strip_prefix("gamma:")
                .and_then(|g| g.parse().ok())
                .ok_or_else(|| {
                    Failure::usage(format!(
                        "unknown residential case {other:?} (ba|large-u|small-u|gamma:<value>|self-consistent)"
                    ))
                })?;
            ResidentialCase::Gamma { gamma }
        }
    })
}

pub fn integrate(a: IntegrateArgs) -> Result<(), Failure> {
    let params = a.model.params(a.k0)?;
    let mut grid = GridConfig::for_params(&params, a.t_end);
    if let Some(k) = a.kmax {
        let rate = params.arrival_rate() * params.max_modified_degree(k) as f64;
        grid = grid.with_k_max(k).with_dt(STABILITY_LIMIT / rate);
    }
    if let Some(dt) = a.dt {
        grid = grid.with_dt(dt);
    }
    let case = parse_case(&a.residential_case, &params, &grid)?;
    let spec = ResidentialTimeSpec::new(case, &params, a.t_end)?;
    let (pmf, leak) = stationary_with_leak(&params, &params.big_bang_init(), &spec, &grid)?;
    let mut warnings = Vec::new();
    if leak > grid.leak_tol {
        let w = format!(
            "{leak:.3e} probability mass flowed past k_max = {} (tolerance {:.1e})",
            grid.k_max, grid.leak_tol
        );
        eprintln!("warning: {w}");
        warnings.push(w);
    }
    let table: Vec<(u64, [f64; 1])> = pmf.iter().map(|(k, p)| (k, [p])).collect();
    emit(
        a.out.as_deref(),
        &csv_table("degree,probability", table.iter().map(|(k, v)| (*k, &v[..]))),
    )?;
    if let Some(out) = &a.out {
        let resolved = json!({ "params": params, "grid": grid, "residential": spec });
        let mut manifest = RunManifest::new("integrate", &resolved);
        manifest.artifacts.push(out.clone());
        manifest.results = Some(json!({ "leak": leak }));
        manifest.warnings = warnings;
        manifest.write_beside(out)?;
    }
    Ok(())
}

fn read_report(path: &PathBuf) -> Result<FitReport, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

pub fn compare(a: CompareArgs) -> Result<(), Failure> {
    if a.reports.is_empty() {
        return Err(Failure::usage("at least one report is required"));
    }
    let mut out = format!("{}\n", trichonet::fitting::CSV_HEADER);
    let mut failed = Vec::new();
    for path in &a.reports {
        match read_report(path) {
            Ok(report) => {
                out.push_str(&report.csv_row());
                out.push('\n');
            }
            Err(f) => failed.push(f.message),
        }
    }
    if !failed.is_empty() {
        return Err(Failure::data(format!("unreadable reports:\n  {}", failed.join("\n  "))));
    }
    emit(a.out.as_deref(), &out)?;
    if let Some(path) = &a.out {
        let mut manifest = RunManifest::new("compare", &a.reports);
        manifest.artifacts.push(path.clone());
        manifest.write_beside(path)?;
    }
    Ok(())
}
