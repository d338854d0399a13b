//! Run configuration: a JSON document with command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use alt_cardinal::construct::{Segment, DEFAULT_DEPTH, DEFAULT_TOL_T};
use alt_cardinal::system::DEFAULT_CONTINUITY_DELTA;
use alt_cardinal::zoo::{lookup, make_difference_oracle, make_intensity_oracle, ExpressionFile, Fixture, UtilitySpec};
use alt_cardinal::{AltOracle, BoxDomain, DomainSpec, Point};
use serde::{Deserialize, Serialize};

/// A usage or configuration problem; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Catalog fixture name.
    pub oracle: Option<String>,
    /// JSON expression file, as an alternative to `oracle`.
    pub expr: Option<PathBuf>,
    /// Box override; the fixture's own box when absent.
    pub domain: Option<DomainSpec>,
    pub seed: u64,
    pub trials: usize,
    pub depth: u32,
    /// Equal-band width; estimated from the utility range when absent.
    pub eps_eq: Option<f64>,
    pub tol_t: f64,
    /// Finite-difference step for ALEP.
    pub h: f64,
    /// Diagonal scale for the line-smoothness limit.
    pub b: f64,
    /// Custom `a` schedule for the line-smoothness limit, decreasing.
    pub a_schedule: Option<Vec<f64>>,
    /// Debreu proxy step, relative to the box extent.
    pub debreu_step: f64,
    pub continuity_delta: f64,
    pub strict: bool,
    /// Reference segment ends; the main diagonal or the fixture's segment when absent.
    pub segment: Option<[Vec<f64>; 2]>,
    /// `(y*, x*)` with values 0 and 1.
    pub anchors: Option<[Vec<f64>; 2]>,
    pub second_anchors: Option<[Vec<f64>; 2]>,
    /// Grid points per axis for tables.
    pub grid: usize,
    pub pair: (usize, usize),
    /// `analytic` or `reconstruction`, for ALEP.
    pub alep_source: Option<AlepSource>,
    pub out: PathBuf,
    /// Thread count; results do not depend on it, so it is not echoed.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AlepSource {
    Analytic,
    Reconstruction,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            oracle: None,
            expr: None,
            domain: None,
            seed: 0,
            trials: 1000,
            depth: DEFAULT_DEPTH,
            eps_eq: None,
            tol_t: DEFAULT_TOL_T,
            h: 1e-2,
            b: 1.0,
            a_schedule: None,
            debreu_step: alt_cardinal::smooth::DEFAULT_DEBREU_STEP,
            continuity_delta: DEFAULT_CONTINUITY_DELTA,
            strict: false,
            segment: None,
            anchors: None,
            second_anchors: None,
            grid: 11,
            pair: (0, 1),
            alep_source: None,
            out: PathBuf::from("altcard-out"),
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| config_error(format!("invalid config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        match (&self.oracle, &self.expr) {
            (None, None) => return Err(config_error("no oracle given: pass --oracle NAME or --expr FILE")),
            (Some(_), Some(_)) => return Err(config_error("--oracle and --expr are mutually exclusive")),
            (None, Some(p)) if !p.is_file() => {
                return Err(config_error(format!("expression file {} does not exist", p.display())))
            }
            _ => {}
        }
        let positive = [
            ("tol_t", self.tol_t),
            ("h", self.h),
            ("b", self.b),
            ("debreu_step", self.debreu_step),
            ("continuity_delta", self.continuity_delta),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_error(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(e) = self.eps_eq {
            if !(e > 0.0 && e.is_finite()) {
                return Err(config_error(format!("eps_eq must be positive, got {e}")));
            }
        }
        if self.trials == 0 {
            return Err(config_error("trials must be at least 1"));
        }
        if self.depth > 30 {
            return Err(config_error(format!("depth {} is above the supported 30", self.depth)));
        }
        if self.grid < 2 {
            return Err(config_error("grid needs at least 2 points per axis"));
        }
        if self.workers == Some(0) {
            return Err(config_error("workers must be at least 1"));
        }
        Ok(())
    }
}

/// The oracle together with what is known about its source.
pub struct Resolved {
    pub oracle: AltOracle<f64>,
    pub utility: Option<UtilitySpec<f64>>,
    pub segment: Option<Segment<f64>>,
}

fn point(c: &[f64], what: &str) -> anyhow::Result<Point<f64>> {
    Point::from_f64(c).map_err(|e| config_error(format!("{what}: {e}")))
}

pub fn point_pair(p: &Option<[Vec<f64>; 2]>, what: &str) -> anyhow::Result<Option<(Point<f64>, Point<f64>)>> {
    p.as_ref().map(|[a, b]| Ok((point(a, what)?, point(b, what)?))).transpose()
}

pub fn resolve(cfg: &RunConfig) -> anyhow::Result<Resolved> {
    let cfg_err = |e: alt_cardinal::Error| config_error(e.to_string());
    let (utility, intensity) = match (&cfg.oracle, &cfg.expr) {
        (Some(name), _) => match lookup::<f64>(name).map_err(cfg_err)? {
            Fixture::Utility(u) => (Some(u), None),
            Fixture::Intensity(g) => (None, Some(g)),
        },
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            let spec = ExpressionFile::from_json(&text).and_then(|f| f.into_spec()).map_err(cfg_err)?;
            (Some(spec), None)
        }
        (None, None) => return Err(config_error("no oracle given")),
    };
    let own_domain = match (&utility, &intensity) {
        (Some(u), _) => u.domain.clone(),
        (_, Some(g)) => g.domain.clone(),
        _ => unreachable!(),
    };
    let domain = BoxDomain::from_spec(cfg.domain.as_ref().unwrap_or(&own_domain)).map_err(cfg_err)?;
    let oracle = match (&utility, &intensity) {
        (Some(u), _) => make_difference_oracle(u, domain.clone(), cfg.eps_eq),
        (_, Some(g)) => make_intensity_oracle(g, domain.clone(), cfg.eps_eq),
        _ => unreachable!(),
    }
    .map_err(cfg_err)?;
    let segment = match point_pair(&cfg.segment, "segment")? {
        Some((p, q)) => Some(Segment::new(p, q, &domain).map_err(cfg_err)?),
        None => match &utility {
            Some(u) => u.reference_segment(&domain).map_err(cfg_err)?,
            None => None,
        },
    };
    Ok(Resolved { oracle, utility, segment })
}

/// Parses `"1,1;5,5"` into two points.
pub fn parse_point_pair(s: &str) -> Result<[Vec<f64>; 2], String> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != 2 {
        return Err(format!("expected two points separated by ';', got {s:?}"));
    }
    let parse = |p: &str| -> Result<Vec<f64>, String> {
        p.split(',').map(|c| c.trim().parse::<f64>().map_err(|e| format!("{c:?}: {e}"))).collect()
    };
    Ok([parse(parts[0])?, parse(parts[1])?])
}

/// Parses `"0,1"`.
pub fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected i,j, got {s:?}"))?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}
