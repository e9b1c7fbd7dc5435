use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::curve::{ConnectingSpec, Domain};
use crate::error::{Error, Result};
use crate::geom::{Annulus, Region};
use crate::mapzoo::{MapFamily, MapKind};
use crate::modsolve::{Grid, SolverConfig};
use crate::verify::PoletskySampling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Modulus,
    VerifyPoletsky,
    Equicontinuity,
    ClosureScan,
    ZooDump,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Modulus => "modulus",
            Command::VerifyPoletsky => "verify-poletsky",
            Command::Equicontinuity => "equicontinuity",
            Command::ClosureScan => "closure-scan",
            Command::ZooDump => "zoo-dump",
        }
    }
}

/// One JSON document describing a run; every section has defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// When present, must agree with the command given on the command line.
    pub command: Option<Command>,
    pub seed: u64,
    pub threads: usize,
    pub map: MapConfig,
    pub solver: SolverConfig,
    pub modulus: ModulusConfig,
    pub poletsky: PoletskyConfig,
    pub scan: ScanConfig,
    pub closure: ClosureConfig,
    pub zoo: ZooConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            name: "scenario".into(),
            command: None,
            seed: 0,
            threads: 1,
            map: MapConfig::default(),
            solver: SolverConfig::default(),
            modulus: ModulusConfig::default(),
            poletsky: PoletskyConfig::default(),
            scan: ScanConfig::default(),
            closure: ClosureConfig::default(),
            zoo: ZooConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapConfig {
    pub kind: MapKind,
    pub m: u32,
    pub alpha: f64,
    pub dim: usize,
    pub p: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            kind: MapKind::PlanarBranched,
            m: 2,
            alpha: 0.5,
            dim: 2,
            p: 3.0,
        }
    }
}

impl MapConfig {
    pub fn build(&self, m: u32, alpha: f64) -> Result<MapFamily> {
        MapFamily::new(self.kind, m, alpha, self.dim, self.p)
    }
}

/// Curve family whose modulus is computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    /// All grid curves joining `e` to `f` inside `domain`.
    Connecting { e: Region, f: Region, domain: Domain },
    /// `count` radial segments crossing an annulus.
    Radial { annulus: Annulus, count: usize, step: f64 },
    /// A family file in the plain-text curve format.
    File { path: String },
}

impl FamilyConfig {
    pub fn connecting(&self) -> Option<ConnectingSpec> {
        match self {
            FamilyConfig::Connecting { e, f, domain } => Some(ConnectingSpec {
                e: e.clone(),
                f: f.clone(),
                domain: domain.clone(),
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModulusConfig {
    pub p: f64,
    pub grid: Grid,
    pub family: FamilyConfig,
    /// Cells along the first axis of each run, other axes scaled to keep the
    /// aspect ratio of `grid`; a single run on `grid` when empty.
    pub resolutions: Vec<usize>,
    /// Reference value; the verdict fails beyond `tolerance` relative error.
    pub expected: Option<f64>,
    pub tolerance: f64,
    pub include_density: bool,
}

impl Default for ModulusConfig {
    fn default() -> Self {
        ModulusConfig {
            p: 2.0,
            grid: Grid {
                lo: vec![-2.0, -2.0],
                hi: vec![2.0, 2.0],
                cells: vec![128, 128],
            },
            family: FamilyConfig::Connecting {
                e: Region::Ball {
                    center: vec![0.0, 0.0],
                    radius: 1.0,
                },
                f: Region::Exterior {
                    center: vec![0.0, 0.0],
                    radius: 2.0,
                },
                domain: Domain::Whole,
            },
            resolutions: Vec::new(),
            expected: None,
            tolerance: 0.05,
            include_density: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoletskyConfig {
    pub ms: Vec<u32>,
    pub alphas: Vec<f64>,
    pub y0: Vec<f64>,
    pub shells: Vec<(f64, f64)>,
    /// Sampling density; dimension-dependent defaults when absent.
    pub sampling: Option<PoletskySampling>,
}

impl Default for PoletskyConfig {
    fn default() -> Self {
        PoletskyConfig {
            ms: vec![1, 2, 4, 8],
            alphas: vec![0.25, 0.5],
            y0: vec![0.0, 0.0],
            shells: vec![(0.3, 0.6), (0.1, 0.8)],
            sampling: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub ms: Vec<u32>,
    pub x0: Vec<f64>,
    pub r0: f64,
    /// Sample radii; `r0 / 2^k` for `k < 8` when empty.
    pub radii: Vec<f64>,
    /// Directions per radius; 64 in the plane and 128 in space when absent.
    pub directions: Option<usize>,
    /// Also scan the scaling family and its inverse.
    pub contrast: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            ms: (1..=16).collect(),
            x0: vec![0.0, 0.0],
            r0: 0.4,
            radii: Vec::new(),
            directions: None,
            contrast: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClosureConfig {
    pub ms: Vec<u32>,
    /// Boundary centres; eight points of `|x| = 2` when empty.
    pub boundary: Vec<Vec<f64>>,
    pub r0: f64,
    pub radii: Vec<f64>,
    pub directions: Option<usize>,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        ClosureConfig {
            ms: (1..=16).collect(),
            boundary: Vec::new(),
            r0: 0.4,
            radii: Vec::new(),
            directions: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZooConfig {
    pub samples: usize,
    /// Finite-difference step of the numeric dilatation.
    pub fd_step: f64,
}

impl Default for ZooConfig {
    fn default() -> Self {
        ZooConfig {
            samples: 100,
            fd_step: 1e-6,
        }
    }
}

/// Sets `path` (dot separated, numeric parts index arrays) to `value`,
/// parsed as JSON when possible and kept as a string otherwise.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let Some((path, raw)) = assignment.split_once('=') else {
        return Err(Error::Config(format!("override `{assignment}` is not key=value")));
    };
    let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::Config(format!("empty key segment in `{path}`")));
        }
        let last = i + 1 == parts.len();
        if let Ok(k) = part.parse::<usize>() {
            let Value::Array(arr) = cur else {
                return Err(Error::Config(format!("`{part}` in `{path}` indexes a non-array")));
            };
            if k >= arr.len() {
                return Err(Error::Config(format!("index {k} out of range in `{path}`")));
            }
            if last {
                arr[k] = value;
                return Ok(());
            }
            cur = &mut arr[k];
        } else {
            if cur.is_null() {
                *cur = Value::Object(Default::default());
            }
            let Value::Object(obj) = cur else {
                return Err(Error::Config(format!("`{part}` in `{path}` keys into a non-object")));
            };
            if last {
                obj.insert(part.to_string(), value);
                return Ok(());
            }
            cur = obj.entry(part.to_string()).or_insert(Value::Null);
        }
    }
    Ok(())
}

/// Reads the scenario, applies overrides on top of the defaults and the
/// file, and returns the fully resolved configuration.
pub fn resolve(config: Option<&str>, overrides: &[String]) -> Result<Scenario> {
    let mut doc = serde_json::to_value(Scenario::default()).expect("defaults serialize");
    if let Some(text) = config {
        let file: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        merge(&mut doc, file);
    }
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let sc: Scenario = serde_json::from_value(doc).map_err(|e| Error::Config(e.to_string()))?;
    Ok(sc)
}

/// Deep merge of objects; anything else in `top` replaces `base`.
fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                // a tagged enum must be replaced wholesale
                let replace = v.get("kind").is_some();
                match b.get_mut(&k) {
                    Some(slot) if !replace => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) => *b = t,
    }
}
