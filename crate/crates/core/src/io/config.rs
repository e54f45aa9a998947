//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, list values are
//! comma-separated. Unknown and repeated keys are errors. Every value is
//! checked against the preconditions of the module that consumes it before
//! anything is computed.
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `command` | from the command line | `energy`, `sweep`, `diagnose`, `minimize` or `export` |
//! | `surface` | required | `sphere R`, `torus R r`, `ellipsoid a b c` or `chain count R spacing` |
//! | `orientation` | `inside` | side on which `d > 0` |
//! | `n` | required | grid points per axis |
//! | `extent` | required | half width `L` of the box `[-L, L]³` |
//! | `eps` | | single interface width |
//! | `eps_list` | | strictly decreasing widths for `sweep` |
//! | `kappa_b`, `kappa_G`, `H0` | `1`, `-0.5`, `0` | Helfrich moduli |
//! | `require_constraint` | `none` | `none`, `strict` or `relaxed` |
//! | `grad_floor` | `1e-12` | flat-set threshold on `|∇u|` |
//! | `profile` | `sqrt2` | `sqrt2` (width `√2·eps`) or `unit` (width `eps`) |
//! | `nbins` | `32` | level-set histogram bins |
//! | `offsets` | `0.05,0.1,0.2` | distance offsets for `diagnose` |
//! | `chain_counts` | `1,2,3,4` | chain lengths for `diagnose` |
//! | `seed` | `0` | noise seed for `minimize` |
//! | `noise` | `0.01` | noise amplitude added to the start of `minimize` |
//! | `lambda_area`, `lambda_vol` | `1`, `1000` | penalty weights |
//! | `target_area`, `target_mass` | recovery field | constraint targets |
//! | `max_iters`, `step0`, `grad_tol`, `backtrack` | `200`, `1e-3`, `1e-8`, `0.5` | descent controls |
//! | `out` | `.` | output directory |

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::energy::{HelfrichParams, PhaseParams, DEFAULT_GRAD_FLOOR};
use crate::error::{Error, Result};
use crate::geometry::{ImplicitSurface, Orientation, SurfaceKind};
use crate::grid::Grid3;
pub use crate::recovery::ProfileWidth;

const KEYS: &[&str] = &[
    "command",
    "surface",
    "orientation",
    "n",
    "extent",
    "eps",
    "eps_list",
    "kappa_b",
    "kappa_G",
    "H0",
    "require_constraint",
    "grad_floor",
    "profile",
    "nbins",
    "offsets",
    "chain_counts",
    "seed",
    "noise",
    "lambda_area",
    "lambda_vol",
    "target_area",
    "target_mass",
    "max_iters",
    "step0",
    "grad_tol",
    "backtrack",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Energy,
    Sweep,
    Diagnose,
    Minimize,
    Export,
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "energy" => Ok(Command::Energy),
            "sweep" => Ok(Command::Sweep),
            "diagnose" => Ok(Command::Diagnose),
            "minimize" => Ok(Command::Minimize),
            "export" => Ok(Command::Export),
            _ => Err(format!("unknown command `{s}`")),
        }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Energy => "energy",
            Command::Sweep => "sweep",
            Command::Diagnose => "diagnose",
            Command::Minimize => "minimize",
            Command::Export => "export",
        }
    }
}

/// Which coercivity condition on `κ_G/κ_b` the run insists on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstraintMode {
    #[default]
    None,
    Strict,
    Relaxed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeSpec {
    pub lambda_area: f64,
    pub lambda_vol: f64,
    /// `None`: use `P_eps` of the recovery field.
    pub target_area: Option<f64>,
    /// `None`: use the mass of the recovery field.
    pub target_mass: Option<f64>,
    pub max_iters: usize,
    pub step0: f64,
    pub grad_tol: f64,
    pub backtrack: f64,
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub surface: ImplicitSurface,
    pub grid: Grid3,
    pub eps: Option<f64>,
    pub eps_list: Vec<f64>,
    pub hp: HelfrichParams,
    pub constraint: ConstraintMode,
    pub grad_floor: f64,
    pub profile: ProfileWidth,
    pub nbins: usize,
    pub offsets: Vec<f64>,
    pub chain_counts: Vec<usize>,
    pub seed: u64,
    pub minimize: MinimizeSpec,
    pub out: PathBuf,
    lines: BTreeMap<String, usize>,
    last_line: usize,
}

impl RunConfig {
    fn line_of(&self, key: &str) -> usize {
        self.lines.get(key).copied().unwrap_or(self.last_line)
    }

    fn config_error(&self, key: &str, message: impl Into<String>) -> Error {
        Error::Config {
            line: self.line_of(key),
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// Phase parameters for one `eps` with the configured floor.
    pub fn phase(&self, eps: f64) -> Result<PhaseParams> {
        PhaseParams::with_floor(eps, self.grad_floor)
    }

    /// The single `eps` needed by every command except `sweep`.
    pub fn single_eps(&self) -> Result<f64> {
        self.eps
            .ok_or_else(|| self.config_error("eps", "this command needs a single `eps`"))
    }

    /// `eps_list`, or `[eps]` when only `eps` is given.
    pub fn sweep_eps(&self) -> Result<Vec<f64>> {
        match (self.eps_list.is_empty(), self.eps) {
            (false, _) => Ok(self.eps_list.clone()),
            (true, Some(e)) => Ok(vec![e]),
            (true, None) => Err(self.config_error("eps_list", "sweep needs `eps_list` or `eps`")),
        }
    }

    /// Checks that `command` has what it needs and agrees with the file.
    pub fn for_command(mut self, command: Command) -> Result<Self> {
        if let Some(c) = self.command {
            if c != command {
                return Err(self.config_error(
                    "command",
                    format!("file says `{}` but `{}` was requested", c.name(), command.name()),
                ));
            }
        }
        self.command = Some(command);
        match command {
            Command::Sweep => {
                self.sweep_eps()?;
            }
            _ => {
                self.single_eps()?;
            }
        }
        Ok(self)
    }
}

struct Entry {
    line: usize,
    value: String,
}

struct Raw {
    entries: BTreeMap<String, Entry>,
    last_line: usize,
}

fn err(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

impl Raw {
    fn parse(text: &str) -> Result<Raw> {
        let mut entries = BTreeMap::new();
        let mut last_line = 1;
        for (i, raw_line) in text.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(err(line, content, "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(err(line, key, "unknown key"));
            }
            if value.is_empty() {
                return Err(err(line, key, "empty value"));
            }
            if let Some(prev) = entries.get(key) {
                let prev: &Entry = prev;
                return Err(err(line, key, format!("repeated key (first set on line {})", prev.line)));
            }
            entries.insert(
                key.to_string(),
                Entry {
                    line,
                    value: value.to_string(),
                },
            );
        }
        Ok(Raw { entries, last_line })
    }

    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(self.last_line, |e| e.line)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.entries
            .get(key)
            .map(|e| {
                e.value
                    .parse::<T>()
                    .map_err(|_| err(e.line, key, format!("malformed value `{}`", e.value)))
            })
            .transpose()
    }

    fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| err(self.last_line, key, "required key missing"))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|item| {
                item.trim()
                    .parse::<T>()
                    .map_err(|_| err(e.line, key, format!("malformed list item `{}`", item.trim())))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    /// Wraps a module precondition failure as a config error on `key`.
    fn check<T>(&self, key: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Precondition(m) => err(self.line(key), key, m),
            other => other,
        })
    }
}

fn parse_surface(raw: &Raw) -> Result<ImplicitSurface> {
    let key = "surface";
    let text: String = raw.required(key)?;
    let line = raw.line(key);
    let mut words = text.split_whitespace();
    let name = words.next().unwrap_or("");
    let nums = words
        .map(|w| w.parse::<f64>().map_err(|_| err(line, key, format!("malformed number `{w}`"))))
        .collect::<Result<Vec<f64>>>()?;
    let arity = |k: usize| -> Result<()> {
        if nums.len() == k {
            Ok(())
        } else {
            Err(err(line, key, format!("`{name}` takes {k} numbers, got {}", nums.len())))
        }
    };
    let kind = match name {
        "sphere" => {
            arity(1)?;
            SurfaceKind::Sphere { radius: nums[0] }
        }
        "torus" => {
            arity(2)?;
            SurfaceKind::Torus {
                major: nums[0],
                minor: nums[1],
            }
        }
        "ellipsoid" => {
            arity(3)?;
            SurfaceKind::Ellipsoid {
                a: nums[0],
                b: nums[1],
                c: nums[2],
            }
        }
        "chain" => {
            arity(3)?;
            if !(nums[0] >= 1.0 && nums[0].fract() == 0.0) {
                return Err(err(line, key, "chain count must be a positive integer"));
            }
            SurfaceKind::SphereChain {
                count: nums[0] as usize,
                radius: nums[1],
                spacing: nums[2],
            }
        }
        _ => return Err(err(line, key, format!("unknown surface `{name}`"))),
    };
    let orientation = match raw.get_or::<String>("orientation", "inside".into())?.as_str() {
        "inside" => Orientation::Inside,
        "outside" => Orientation::Outside,
        other => {
            return Err(err(
                raw.line("orientation"),
                "orientation",
                format!("expected `inside` or `outside`, got `{other}`"),
            ))
        }
    };
    raw.check(key, ImplicitSurface::new(kind, orientation))
}

fn choice<T: Copy>(raw: &Raw, key: &str, options: &[(&str, T)], default: T) -> Result<T> {
    let Some(v) = raw.get::<String>(key)? else {
        return Ok(default);
    };
    options
        .iter()
        .find(|(name, _)| *name == v)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|o| o.0).collect();
            err(raw.line(key), key, format!("expected one of {names:?}, got `{v}`"))
        })
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw = Raw::parse(text)?;
    let command = raw
        .get::<String>("command")?
        .map(|c| c.parse::<Command>().map_err(|m| err(raw.line("command"), "command", m)))
        .transpose()?;

    let surface = parse_surface(&raw)?;
    let n: usize = raw.required("n")?;
    let extent: f64 = raw.required("extent")?;
    let grid = raw.check("n", Grid3::cube(n, extent))?;

    let kappa_b = raw.get_or("kappa_b", 1.0)?;
    let kappa_g = raw.get_or("kappa_G", -0.5)?;
    let h0 = raw.get_or("H0", 0.0)?;
    let hp = raw.check("kappa_b", HelfrichParams::new(kappa_b, kappa_g, h0))?;
    let constraint = choice(
        &raw,
        "require_constraint",
        &[
            ("none", ConstraintMode::None),
            ("strict", ConstraintMode::Strict),
            ("relaxed", ConstraintMode::Relaxed),
        ],
        ConstraintMode::None,
    )?;
    let ratio = kappa_g / kappa_b;
    match constraint {
        ConstraintMode::Strict if !hp.strict_constraint() => {
            return Err(err(
                raw.line("require_constraint"),
                "kappa_G",
                format!("kappa_G/kappa_b = {ratio} is outside (-1, 0)"),
            ))
        }
        ConstraintMode::Relaxed if !hp.relaxed_constraint() => {
            return Err(err(
                raw.line("require_constraint"),
                "kappa_G",
                format!("kappa_G/kappa_b = {ratio} violates the relaxed condition"),
            ))
        }
        _ => {}
    }

    let grad_floor = raw.get_or("grad_floor", DEFAULT_GRAD_FLOOR)?;
    let eps: Option<f64> = raw.get("eps")?;
    let eps_list: Vec<f64> = raw.list("eps_list")?.unwrap_or_default();
    if eps.is_some() && !eps_list.is_empty() {
        return Err(err(raw.line("eps_list"), "eps_list", "give either `eps` or `eps_list`, not both"));
    }
    for (key, values) in [("eps", eps.into_iter().collect::<Vec<_>>()), ("eps_list", eps_list.clone())] {
        for e in values {
            let p = raw.check(key, PhaseParams::with_floor(e, grad_floor))?;
            raw.check(key, p.check_grid(&grid))?;
            if e >= 1.0 {
                return Err(err(raw.line(key), key, format!("eps must be below 1, got {e}")));
            }
        }
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(err(raw.line("eps_list"), "eps_list", "values must be strictly decreasing"));
    }

    let profile = choice(
        &raw,
        "profile",
        &[("sqrt2", ProfileWidth::Sqrt2), ("unit", ProfileWidth::Unit)],
        ProfileWidth::Sqrt2,
    )?;
    let nbins = raw.get_or("nbins", 32usize)?;
    if nbins < 8 {
        return Err(err(raw.line("nbins"), "nbins", format!("need at least 8 bins, got {nbins}")));
    }
    let offsets = raw.list("offsets")?.unwrap_or_else(|| vec![0.05, 0.1, 0.2]);
    let tube = 0.5 / surface.max_curvature();
    if let Some(t) = offsets.iter().find(|t: &&f64| !(t.abs() < tube)) {
        return Err(err(raw.line("offsets"), "offsets", format!("offset {t} leaves the tube |t| < {tube}")));
    }
    let chain_counts = raw.list("chain_counts")?.unwrap_or_else(|| vec![1, 2, 3, 4]);
    if chain_counts.contains(&0) {
        return Err(err(raw.line("chain_counts"), "chain_counts", "counts must be positive"));
    }
    let seed = raw.get_or("seed", 0u64)?;

    let minimize = MinimizeSpec {
        lambda_area: raw.get_or("lambda_area", 1.0)?,
        lambda_vol: raw.get_or("lambda_vol", 1e3)?,
        target_area: raw.get("target_area")?,
        target_mass: raw.get("target_mass")?,
        max_iters: raw.get_or("max_iters", 200)?,
        step0: raw.get_or("step0", 1e-3)?,
        grad_tol: raw.get_or("grad_tol", 1e-8)?,
        backtrack: raw.get_or("backtrack", 0.5)?,
        noise: raw.get_or("noise", 0.01)?,
    };
    let m = &minimize;
    let finite_target = |t: Option<f64>| t.is_none_or(f64::is_finite);
    let checks = [
        ("lambda_area", m.lambda_area >= 0.0 && m.lambda_area.is_finite(), "must be finite and >= 0"),
        ("lambda_vol", m.lambda_vol >= 0.0 && m.lambda_vol.is_finite(), "must be finite and >= 0"),
        ("target_area", finite_target(m.target_area), "must be finite"),
        ("target_mass", finite_target(m.target_mass), "must be finite"),
        ("step0", m.step0 > 0.0 && m.step0.is_finite(), "must be positive and finite"),
        ("grad_tol", m.grad_tol > 0.0 && m.grad_tol.is_finite(), "must be positive and finite"),
        ("backtrack", m.backtrack > 0.0 && m.backtrack < 1.0, "must lie in (0, 1)"),
        ("noise", m.noise >= 0.0 && m.noise.is_finite(), "must be finite and >= 0"),
    ];
    if let Some((key, _, message)) = checks.iter().find(|c| !c.1) {
        return Err(err(raw.line(key), key, *message));
    }

    Ok(RunConfig {
        command,
        surface,
        grid,
        eps,
        eps_list,
        hp,
        constraint,
        grad_floor,
        profile,
        nbins,
        offsets,
        chain_counts,
        seed,
        minimize,
        out: raw.get_or("out", PathBuf::from("."))?,
        lines: raw.entries.iter().map(|(k, e)| (k.clone(), e.line)).collect(),
        last_line: raw.last_line,
    })
}
