use std::fs;
use std::path::Path;

use alt_cardinal::construct::{
    dead_band, order_embedding_check, reconstruct, representation_check, verify_affine_uniqueness,
    ReconstructedUtility, ReconstructionOptions, AFFINE_RESIDUAL_THRESHOLD,
};
use alt_cardinal::gossen::{check_ggfl, check_midpoint_concavity, ConcavityLaw, ConcavityVerdict};
use alt_cardinal::smooth::{
    alep_classify, alep_classify_reconstruction, debreu_smoothness_proxy, line_smoothness_limit, AlepLabel,
    DebreuOptions, LineVerdict, DEFAULT_ALEP_THRESHOLD,
};
use alt_cardinal::system::{
    check_consistency, check_continuity_proxy, check_crossover, check_monotonicity, check_second_consistency,
    AxiomReport, CheckOptions, UniformSampler,
};
use alt_cardinal::zoo::{catalog, intensity_catalog};
use alt_cardinal::{AltOracle, BoxDomain, Error, Point};
use anyhow::Context;
use serde::Serialize;
use serde_json::json;

use crate::config::{config_error, point_pair, resolve, AlepSource, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn from(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

const GRID_LIMIT: usize = 1_000_000;

fn out_dir(cfg: &RunConfig) -> anyhow::Result<&Path> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    Ok(&cfg.out)
}

/// Writes `{"config": ..., <key>: ...}` as pretty JSON with a trailing newline.
fn write_report(cfg: &RunConfig, file: &str, body: serde_json::Value) -> anyhow::Result<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("config".into(), serde_json::to_value(cfg)?);
    if let serde_json::Value::Object(m) = body {
        doc.extend(m);
    }
    let path = out_dir(cfg)?.join(file);
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc))?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn csv_writer(cfg: &RunConfig, file: &str) -> anyhow::Result<csv::Writer<fs::File>> {
    let path = out_dir(cfg)?.join(file);
    csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))
}

fn coord_header(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// All grid points, first coordinate slowest. `interior` keeps them off the faces.
fn grid_points(dom: &BoxDomain<f64>, per_axis: usize, interior: bool) -> anyhow::Result<Vec<Point<f64>>> {
    let n = dom.dim();
    let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(per_axis)).filter(|&t| t <= GRID_LIMIT);
    let Some(total) = total else {
        return Err(config_error(format!("grid of {per_axis}^{n} points exceeds {GRID_LIMIT}")));
    };
    let frac = |k: usize| {
        if interior {
            (k + 1) as f64 / (per_axis + 1) as f64
        } else {
            k as f64 / (per_axis - 1) as f64
        }
    };
    (0..total)
        .map(|mut idx| {
            let mut c = vec![0.0; n];
            for i in (0..n).rev() {
                c[i] = dom.lower()[i] + frac(idx % per_axis) * dom.extent(i);
                idx /= per_axis;
            }
            Ok(dom.clamp(&Point::from_f64(&c)?))
        })
        .collect()
}

fn line(label: &str, r: &AxiomReport) {
    let proxy = if r.proxy { " (proxy)" } else { "" };
    println!(
        "{label}: {}{proxy}, evaluated {}, skipped {}, violations {}",
        if r.passed() { "pass" } else { "FAIL" },
        r.evaluated,
        r.skipped,
        r.violation_count
    );
}

pub fn verify(cfg: &RunConfig) -> anyhow::Result<Status> {
    let r = resolve(cfg)?;
    let o = &r.oracle;
    let opts = CheckOptions::new(cfg.trials, cfg.seed);
    let reports = vec![
        check_consistency(o, &UniformSampler, &opts)?,
        check_crossover(o, &UniformSampler, &opts, cfg.tol_t)?,
        check_second_consistency(o, &UniformSampler, &opts)?,
        check_continuity_proxy(o, &UniformSampler, &opts, cfg.continuity_delta)?,
        check_monotonicity(o, &UniformSampler, &opts)?,
    ];
    let mut summary = Vec::new();
    for rep in &reports {
        let name = rep.axiom.name();
        line(name, rep);
        write_report(cfg, &format!("{name}.json"), json!({ "report": rep }))?;
        summary.push(json!({
            "axiom": name,
            "verdict": rep.verdict,
            "proxy": rep.proxy,
            "violation_count": rep.violation_count,
        }));
    }
    let ok = reports.iter().all(AxiomReport::passed);
    write_report(cfg, "summary.json", json!({ "oracle": o.name(), "passed": ok, "axioms": summary }))?;
    Ok(Status::from(ok))
}

/// Precondition failures of the construction are a failed run, not a usage error.
fn build<'o>(
    cfg: &RunConfig,
    oracle: &'o AltOracle<f64>,
    segment: Option<alt_cardinal::construct::Segment<f64>>,
) -> anyhow::Result<Result<ReconstructedUtility<'o, f64>, Error>> {
    let anchors = point_pair(&cfg.anchors, "anchors")?;
    let opts = ReconstructionOptions { depth: cfg.depth, tol_t: cfg.tol_t, segment, anchors };
    match reconstruct(oracle, opts) {
        Ok(u) => Ok(Ok(u)),
        Err(e @ (Error::NotMonotone(_) | Error::Ordering(_) | Error::ConstructionFailed(_))) => Ok(Err(e)),
        Err(e) => Err(config_error(e.to_string())),
    }
}

pub fn reconstruct_cmd(cfg: &RunConfig) -> anyhow::Result<Status> {
    let r = resolve(cfg)?;
    let o = &r.oracle;
    let custom_segment = r.segment.is_some();
    let recon = match build(cfg, o, r.segment)? {
        Ok(u) => u,
        Err(e) => {
            eprintln!("precondition failed: {e}");
            write_report(cfg, "reconstruction.json", json!({ "error": e.to_string() }))?;
            return Ok(Status::Fail);
        }
    };
    let band = dead_band::<f64>(cfg.depth);
    let rep = representation_check(&recon, cfg.trials, cfg.seed, band)?;
    let order = order_embedding_check(&recon, cfg.trials, cfg.seed, band)?;
    println!(
        "depth {}: {} rungs, {} oracle calls; representation mismatches outside band {} of {}; order mismatches {}",
        cfg.depth,
        recon.ladder().len(),
        recon.construction_calls(),
        rep.mismatches_outside_band,
        rep.samples,
        order.mismatches_outside_band
    );
    let mut ok = rep.passed() && order.passed();

    let affine = match point_pair(&cfg.second_anchors, "second_anchors")? {
        None => None,
        Some(_) if custom_segment => {
            return Err(config_error("the affine check runs on the main diagonal; drop the custom segment"))
        }
        Some(second) => {
            let first = {
                let (y, x) = recon.anchors();
                (y.clone(), x.clone())
            };
            let fit = verify_affine_uniqueness(o, first, second, cfg.depth, cfg.trials, cfg.seed)
                .map_err(|e| config_error(e.to_string()))?;
            println!("affine fit: alpha {}, beta {}, max residual {:.3e}", fit.alpha, fit.beta, fit.max_residual);
            ok &= fit.passed(AFFINE_RESIDUAL_THRESHOLD);
            Some(fit)
        }
    };
    write_report(cfg, "utility.json", json!({ "artifact": recon.artifact() }))?;
    write_report(
        cfg,
        "representation.json",
        json!({ "representation": rep, "order_embedding": order, "affine": affine, "passed": ok }),
    )?;

    let mut w = csv_writer(cfg, "grid.csv")?;
    let n = o.dim();
    let mut header = coord_header(n);
    header.push("value".into());
    w.write_record(&header)?;
    for p in grid_points(o.domain(), cfg.grid, false)? {
        let mut row: Vec<String> = p.coords().iter().map(f64::to_string).collect();
        row.push(recon.evaluate(&p)?.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(Status::from(ok))
}

fn unstrict(mut v: ConcavityVerdict, strict: bool) -> ConcavityVerdict {
    if !strict && v.law == ConcavityLaw::HoldsStrictly {
        v.law = ConcavityLaw::Holds;
    }
    v
}

pub fn concavity(cfg: &RunConfig) -> anyhow::Result<Status> {
    let r = resolve(cfg)?;
    let o = &r.oracle;
    let opts = CheckOptions::new(cfg.trials, cfg.seed);
    let ggfl = unstrict(check_ggfl(o, &UniformSampler, &opts)?, cfg.strict);
    println!("oracle law: {:?}, violations {} of {}", ggfl.law, ggfl.violation_count, ggfl.evaluated);
    let (midpoint, note) = match build(cfg, o, r.segment)? {
        Ok(recon) => {
            let tol = 2.0 * dead_band::<f64>(cfg.depth);
            let v = check_midpoint_concavity(|p| recon.evaluate(p), o.domain(), &UniformSampler, &opts, tol, None)?;
            let v = unstrict(v, cfg.strict);
            println!("reconstruction midpoint: {:?}, violations {} of {}", v.law, v.violation_count, v.evaluated);
            (Some(v), None)
        }
        Err(e) => {
            println!("reconstruction skipped: {e}");
            (None, Some(format!("reconstruction skipped: {e}")))
        }
    };
    let ok = ggfl.law.holds() && midpoint.as_ref().is_none_or(|m| m.law.holds());
    write_report(cfg, "concavity.json", json!({ "ggfl": ggfl, "midpoint": midpoint, "note": note, "concave": ok }))?;
    Ok(Status::from(ok))
}

pub fn smoothness(cfg: &RunConfig) -> anyhow::Result<Status> {
    let r = resolve(cfg)?;
    let o = &r.oracle;
    let report = line_smoothness_limit(o, cfg.b, cfg.a_schedule.clone()).map_err(|e| config_error(e.to_string()))?;
    println!("line limit at b = {}: {} +/- {:.1e} ({:?})", cfg.b, report.estimate, report.uncertainty, report.verdict);
    let dopts = DebreuOptions { step: cfg.debreu_step, ..Default::default() };
    let debreu = debreu_smoothness_proxy(o, &UniformSampler, &CheckOptions::new(cfg.trials, cfg.seed), dopts)
        .map_err(|e| config_error(e.to_string()))?;
    println!(
        "debreu proxy: {}, failures {} of {}",
        if debreu.passed { "pass" } else { "FAIL" },
        debreu.failures,
        debreu.evaluated
    );
    let ok = report.verdict == LineVerdict::LineSmooth && debreu.passed;
    let mut w = csv_writer(cfg, "limit.csv")?;
    w.write_record(["a", "f", "quotient"])?;
    for row in &report.rows {
        w.write_record([row.a.to_string(), row.f.to_string(), row.quotient.to_string()])?;
    }
    w.flush()?;
    write_report(cfg, "smoothness.json", json!({ "line": report, "debreu": debreu, "smooth": ok }))?;
    Ok(Status::from(ok))
}

pub fn alep(cfg: &RunConfig) -> anyhow::Result<Status> {
    let r = resolve(cfg)?;
    let o = &r.oracle;
    let source =
        cfg.alep_source.unwrap_or(if r.utility.is_some() { AlepSource::Analytic } else { AlepSource::Reconstruction });
    let points = grid_points(o.domain(), cfg.grid, true)?;
    let classes = match source {
        AlepSource::Analytic => {
            let Some(u) = &r.utility else {
                return Err(config_error("analytic ALEP needs a utility fixture or expression"));
            };
            alep_classify(|x| Ok(u.eval(x.coords())), o.domain(), &points, cfg.pair, cfg.h, DEFAULT_ALEP_THRESHOLD)
        }
        AlepSource::Reconstruction => {
            let recon = match build(cfg, o, r.segment)? {
                Ok(u) => u,
                Err(e) => {
                    eprintln!("precondition failed: {e}");
                    return Ok(Status::Fail);
                }
            };
            alep_classify_reconstruction(&recon, &points, cfg.pair, cfg.h, DEFAULT_ALEP_THRESHOLD)
        }
    }
    .map_err(|e| config_error(e.to_string()))?;

    let count = |l: AlepLabel| classes.iter().filter(|c| c.label == l).count();
    println!(
        "{} points: substitute {}, complement {}, neutral {}, indeterminate {}",
        classes.len(),
        count(AlepLabel::Substitute),
        count(AlepLabel::Complement),
        count(AlepLabel::Neutral),
        count(AlepLabel::Indeterminate)
    );
    let mut w = csv_writer(cfg, "alep.csv")?;
    let mut header = coord_header(o.dim());
    header.extend(["estimate".to_string(), "label".to_string()]);
    w.write_record(&header)?;
    for c in &classes {
        let mut row: Vec<String> = c.point.iter().map(f64::to_string).collect();
        row.push(c.estimate.to_string());
        row.push(label_name(c.label).into());
        w.write_record(&row)?;
    }
    w.flush()?;
    write_report(cfg, "alep.json", json!({ "source": source, "classifications": classes }))?;
    Ok(Status::from(count(AlepLabel::Indeterminate) == 0))
}

fn label_name(l: AlepLabel) -> &'static str {
    match l {
        AlepLabel::Substitute => "substitute",
        AlepLabel::Complement => "complement",
        AlepLabel::Neutral => "neutral",
        AlepLabel::Indeterminate => "indeterminate",
    }
}

#[derive(Serialize)]
struct CatalogEntry {
    name: String,
    kind: &'static str,
    dim: usize,
    domain: alt_cardinal::DomainSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    concavity: Option<alt_cardinal::zoo::ConcavityTag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    smoothness: Option<alt_cardinal::zoo::SmoothnessTags>,
    #[serde(skip_serializing_if = "Option::is_none")]
    monotone: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    continuous: Option<bool>,
    description: String,
}

pub fn catalog_cmd() -> anyhow::Result<Status> {
    let mut entries: Vec<CatalogEntry> = catalog::<f64>()
        .into_iter()
        .map(|u| CatalogEntry {
            name: u.name,
            kind: "utility",
            dim: u.dim,
            domain: u.domain,
            concavity: Some(u.concavity),
            smoothness: Some(u.smoothness),
            monotone: Some(u.monotone),
            continuous: Some(u.continuous),
            description: u.description,
        })
        .collect();
    entries.extend(intensity_catalog::<f64>().into_iter().map(|g| CatalogEntry {
        name: g.name,
        kind: "intensity",
        dim: g.dim,
        domain: g.domain,
        concavity: None,
        smoothness: None,
        monotone: None,
        continuous: None,
        description: g.description,
    }));
    println!("{}", serde_json::to_string_pretty(&entries)?);
    Ok(Status::Pass)
}
