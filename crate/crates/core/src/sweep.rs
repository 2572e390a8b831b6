//! Run configuration, sweep orchestration and CSV/JSON output.
//!
//! Configuration grammar (TOML, every section optional except `[[sweep]]`):
//!
//! ```toml
//! mode = "hubbard-nn"          # or "full"
//! tracked_levels = 8           # energies written by `spectrum`
//!
//! [material]
//! effective_mass_ratio = 0.067
//! relative_permittivity = 12.9
//!
//! [geometry]
//! a = 22.0                     # nm
//! R = 150.0                    # nm; required unless swept
//! hbar_omega0 = 5.0            # meV
//!
//! [detunings]
//! eps_l = 0.0                  # meV
//! eps_r = 0.0
//!
//! [[sweep]]
//! axis = "eps_l"               # eps_l | eps_r | hbar_omega0 | a | R
//! min = -5.0
//! max = 5.0
//! steps = 11
//!
//! [output]
//! csv = "out.csv"
//! json = "out.json"            # defaults to the csv path with a .json extension
//!
//! [tolerance]
//! rel = 1e-8
//! abs = 1e-12
//! max_subdivisions = 20000
//! ```

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::couplings::{capacitive_params_from_integrals, crosstalk_map, Axis, MIN_ALPHA0};
use crate::device::{set_detunings, Detunings, Device, DeviceGeometry, MaterialParams};
use crate::error::{Error, Result};
use crate::integrals::Integrals;
use crate::manybody::{
    continue_ids, solve, track_sweep, AssemblyMode, Branch, Label, Solution, DIM,
};
use crate::quadrature::Tolerance;
use crate::spin_effective::j_eff_bond;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TRACKED_LEVELS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "eps_l")]
    EpsL,
    #[serde(rename = "eps_r")]
    EpsR,
    #[serde(rename = "hbar_omega0")]
    HbarOmega0,
    #[serde(rename = "a")]
    A,
    #[serde(rename = "R")]
    R,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            Self::EpsL => "eps_l",
            Self::EpsR => "eps_r",
            Self::HbarOmega0 => "hbar_omega0",
            Self::A => "a",
            Self::R => "R",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisConfig {
    pub fn grid(&self) -> Axis {
        Axis {
            min: self.min,
            max: self.max,
            steps: self.steps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialConfig {
    pub effective_mass_ratio: f64,
    pub relative_permittivity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub a: f64,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    pub hbar_omega0: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

impl From<ToleranceConfig> for Tolerance {
    fn from(t: ToleranceConfig) -> Self {
        Tolerance {
            rel: t.rel,
            abs: t.abs,
            max_subdivisions: t.max_subdivisions,
        }
    }
}

/// Fully validated run configuration with every default made explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: AssemblyMode,
    pub tracked_levels: usize,
    pub material: MaterialConfig,
    pub geometry: GeometryConfig,
    pub detunings: Detunings,
    pub sweep: Vec<AxisConfig>,
    pub output: OutputConfig,
    pub tolerance: ToleranceConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<Spanned<AssemblyMode>>,
    tracked_levels: Option<Spanned<usize>>,
    material: Option<Spanned<RawMaterial>>,
    geometry: Option<Spanned<RawGeometry>>,
    detunings: Option<Spanned<RawDetunings>>,
    sweep: Option<Spanned<Vec<Spanned<AxisConfig>>>>,
    output: Option<OutputConfig>,
    tolerance: Option<Spanned<RawTolerance>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawMaterial {
    effective_mass_ratio: Option<Spanned<f64>>,
    relative_permittivity: Option<Spanned<f64>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    a: Option<Spanned<f64>>,
    #[serde(rename = "R")]
    r: Option<Spanned<f64>>,
    hbar_omega0: Option<Spanned<f64>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawDetunings {
    eps_l: Option<Spanned<f64>>,
    eps_r: Option<Spanned<f64>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTolerance {
    rel: Option<Spanned<f64>>,
    abs: Option<Spanned<f64>>,
    max_subdivisions: Option<Spanned<usize>>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn config_error(text: &str, span: Range<usize>, msg: impl fmt::Display) -> Error {
    Error::Config(format!("line {}: {msg}", line_of(text, span.start)))
}

fn value_or<T: Copy>(v: &Option<Spanned<T>>, default: T) -> (T, Range<usize>) {
    match v {
        Some(s) => (*s.get_ref(), s.span()),
        None => (default, 0..0),
    }
}

/// Parse and validate a TOML run configuration. Errors carry the line of
/// the offending key.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(1);
        Error::Config(format!("line {line}: {}", e.message().trim()))
    })?;
    let err = |span: Range<usize>, msg: String| config_error(text, span, msg);
    let positive = |(v, span): (f64, Range<usize>), name: &str| -> Result<f64> {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(err(
                span,
                format!("`{name}` must be finite and > 0, got {v}"),
            ))
        }
    };

    let gaas = MaterialParams::gaas();
    let mat = raw.material.as_ref().map(|m| m.get_ref());
    let material = MaterialConfig {
        effective_mass_ratio: positive(
            value_or(
                &mat.and_then(|m| m.effective_mass_ratio.clone()),
                gaas.effective_mass_ratio(),
            ),
            "effective_mass_ratio",
        )?,
        relative_permittivity: positive(
            value_or(
                &mat.and_then(|m| m.relative_permittivity.clone()),
                gaas.relative_permittivity(),
            ),
            "relative_permittivity",
        )?,
    };

    let geo_span = raw.geometry.as_ref().map(|g| g.span()).unwrap_or(0..0);
    let geo = raw.geometry.as_ref().map(|g| g.get_ref());
    let a = positive(value_or(&geo.and_then(|g| g.a.clone()), 22.0), "a")?;
    let hbar_omega0 = positive(
        value_or(&geo.and_then(|g| g.hbar_omega0.clone()), 5.0),
        "hbar_omega0",
    )?;
    let r = match geo.and_then(|g| g.r.clone()) {
        Some(s) => {
            let (v, span) = (*s.get_ref(), s.span());
            if !(v.is_finite() && v > a) {
                return Err(err(
                    span,
                    format!("`R` must satisfy R > a (= {a}), got {v}"),
                ));
            }
            Some(v)
        }
        None => None,
    };

    let det = raw.detunings.as_ref().map(|d| d.get_ref());
    let finite = |(v, span): (f64, Range<usize>), name: &str| -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err(span, format!("`{name}` must be finite, got {v}")))
        }
    };
    let detunings = Detunings {
        eps_l: finite(value_or(&det.and_then(|d| d.eps_l.clone()), 0.0), "eps_l")?,
        eps_r: finite(value_or(&det.and_then(|d| d.eps_r.clone()), 0.0), "eps_r")?,
    };

    let Some(sweep_raw) = raw.sweep else {
        return Err(Error::Config(
            "line 1: missing required field `sweep`".into(),
        ));
    };
    let mut sweep = Vec::new();
    for s in sweep_raw.get_ref() {
        let ax = *s.get_ref();
        if ax.steps < 2 {
            return Err(err(
                s.span(),
                format!(
                    "`steps` must be >= 2 on axis `{}`, got {}",
                    ax.axis.name(),
                    ax.steps
                ),
            ));
        }
        if !(ax.min.is_finite() && ax.max.is_finite() && ax.min < ax.max) {
            return Err(err(
                s.span(),
                format!(
                    "axis `{}` needs finite min < max, got [{}, {}]",
                    ax.axis.name(),
                    ax.min,
                    ax.max
                ),
            ));
        }
        if sweep.iter().any(|o: &AxisConfig| o.axis == ax.axis) {
            return Err(err(
                s.span(),
                format!("axis `{}` swept twice", ax.axis.name()),
            ));
        }
        let bad = match ax.axis {
            SweepAxis::A | SweepAxis::HbarOmega0 => ax.min <= 0.0,
            SweepAxis::R => ax.min <= a,
            _ => false,
        };
        if bad {
            return Err(err(
                s.span(),
                format!(
                    "axis `{}` leaves the physical domain at min = {}",
                    ax.axis.name(),
                    ax.min
                ),
            ));
        }
        if ax.axis == SweepAxis::A {
            if let Some(r) = r {
                if ax.max >= r {
                    return Err(err(
                        s.span(),
                        format!("axis `a` must stay below R = {r}, got max = {}", ax.max),
                    ));
                }
            }
        }
        sweep.push(ax);
    }
    if sweep.is_empty() {
        return Err(err(
            sweep_raw.span(),
            "`sweep` needs at least one axis".into(),
        ));
    }
    if r.is_none() && !sweep.iter().any(|s| s.axis == SweepAxis::R) {
        return Err(err(
            geo_span,
            "missing required field `R` in [geometry] (or sweep it)".into(),
        ));
    }

    let (tracked_levels, tl_span) = value_or(&raw.tracked_levels, DEFAULT_TRACKED_LEVELS);
    if tracked_levels == 0 || tracked_levels > DIM {
        return Err(err(
            tl_span,
            format!("`tracked_levels` must lie in 1..={DIM}, got {tracked_levels}"),
        ));
    }

    let d = Tolerance::default();
    let tol = raw.tolerance.as_ref().map(|t| t.get_ref());
    let tolerance = ToleranceConfig {
        rel: positive(value_or(&tol.and_then(|t| t.rel.clone()), d.rel), "rel")?,
        abs: positive(value_or(&tol.and_then(|t| t.abs.clone()), d.abs), "abs")?,
        max_subdivisions: {
            let (v, span) = value_or(
                &tol.and_then(|t| t.max_subdivisions.clone()),
                d.max_subdivisions,
            );
            if v == 0 {
                return Err(err(span, "`max_subdivisions` must be > 0".into()));
            }
            v
        },
    };

    Ok(RunConfig {
        mode: raw.mode.map(|m| *m.get_ref()).unwrap_or_default(),
        tracked_levels,
        material,
        geometry: GeometryConfig { a, r, hbar_omega0 },
        detunings,
        sweep,
        output: raw.output.unwrap_or_default(),
        tolerance,
    })
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }

    pub fn tol(&self) -> Tolerance {
        self.tolerance.into()
    }

    /// Device at the configured base point with the given swept coordinates applied.
    pub fn device_at(&self, coords: &[(SweepAxis, f64)]) -> Result<Device> {
        let material = MaterialParams::new(
            self.material.effective_mass_ratio,
            self.material.relative_permittivity,
        )?;
        let (mut a, mut r, mut hw) = (
            self.geometry.a,
            self.geometry.r.unwrap_or(f64::NAN),
            self.geometry.hbar_omega0,
        );
        let mut det = self.detunings;
        for &(axis, v) in coords {
            match axis {
                SweepAxis::EpsL => det.eps_l = v,
                SweepAxis::EpsR => det.eps_r = v,
                SweepAxis::HbarOmega0 => hw = v,
                SweepAxis::A => a = v,
                SweepAxis::R => r = v,
            }
        }
        let g = DeviceGeometry::new(a, r, [0.0; 4], hw)?;
        Device::new(material, set_detunings(&g, det))
    }

    fn single_axis(&self, command: Command, allowed: &[SweepAxis]) -> Result<AxisConfig> {
        match self.sweep.as_slice() {
            [ax] if allowed.contains(&ax.axis) => Ok(*ax),
            [ax] => Err(Error::Config(format!(
                "`{command}` cannot sweep `{}` (allowed: {})",
                ax.axis.name(),
                allowed
                    .iter()
                    .map(|a| a.name())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))),
            s => Err(Error::Config(format!(
                "`{command}` needs exactly one sweep axis, got {}",
                s.len()
            ))),
        }
    }

    /// Sidecar path: explicit `json`, else the csv path with a `.json` extension.
    pub fn json_path(&self, csv: &Path) -> PathBuf {
        self.output
            .json
            .clone()
            .unwrap_or_else(|| csv.with_extension("json"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Exchange,
    Couplings,
    Crosstalk,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Spectrum => "spectrum",
            Self::Exchange => "exchange",
            Self::Couplings => "couplings",
            Self::Crosstalk => "crosstalk",
        })
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "spectrum" => Ok(Self::Spectrum),
            "exchange" => Ok(Self::Exchange),
            "couplings" => Ok(Self::Couplings),
            "crosstalk" => Ok(Self::Crosstalk),
            _ => Err(format!("unknown command `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Flag(bool),
    /// Masked cell; written as an empty field.
    Missing,
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Num(x)
    } else {
        Value::Missing
    }
}

fn masked(r: Result<f64>) -> Result<Value> {
    match r {
        Ok(v) => Ok(num(v)),
        Err(Error::Resonance { .. } | Error::UndefinedRatio { .. }) => Ok(Value::Missing),
        Err(e) => Err(e),
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Num(x) => write!(f, "{x:.16e}"),
            Self::Flag(b) => f.write_str(if *b { "1" } else { "0" }),
            Self::Missing => Ok(()),
        }
    }
}

/// Output records; the last column is always `invalid`, set whenever a
/// value in the row is masked.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(mut columns: Vec<String>) -> Self {
        columns.push("invalid".into());
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, mut row: Vec<Value>) {
        debug_assert_eq!(row.len() + 1, self.columns.len());
        let invalid = row.iter().any(|v| matches!(v, Value::Missing));
        row.push(Value::Flag(invalid));
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn masked_rows(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(r.last(), Some(Value::Flag(true))))
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# schema={SCHEMA_VERSION}\n{}\n", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn run(command: Command, config: &RunConfig) -> Result<Table> {
    match command {
        Command::Spectrum => run_spectrum(config),
        Command::Exchange => run_exchange(config),
        Command::Couplings => run_couplings(config),
        Command::Crosstalk => run_crosstalk(config),
    }
}

fn solve_points(config: &RunConfig, ax: AxisConfig) -> Result<Vec<(f64, Integrals, Solution)>> {
    ax.grid()
        .values()
        .par_iter()
        .map(|&x| {
            let ints = Integrals::compute(&config.device_at(&[(ax.axis, x)])?, config.tol())?;
            let sol = solve(&ints, config.mode)?;
            Ok((x, ints, sol))
        })
        .collect()
}

/// Tracked energies, branch energies/dominances and validity along one axis.
pub fn run_spectrum(config: &RunConfig) -> Result<Table> {
    use SweepAxis::*;
    let ax = config.single_axis(Command::Spectrum, &[EpsL, EpsR, HbarOmega0, A, R])?;
    let points = solve_points(config, ax)?;
    let levels = config.tracked_levels;
    let mut columns = vec![ax.axis.name().to_string()];
    columns.extend((0..levels).map(|k| format!("E_{k}")));
    let branches = [Branch::SS, Branch::TS, Branch::ST];
    for prefix in ["E", "dominance", "valid"] {
        columns.extend(branches.iter().map(|b| format!("{prefix}_{b:?}")));
    }
    columns.extend(["sudd_weight_TS".into(), "tracking_lost".into()]);
    let mut table = Table::new(columns);

    let sudd = Label::UpUpDownDown.index();
    let mut ids: Vec<usize> = (0..DIM).collect();
    let mut previous: Option<&Solution> = None;
    for (x, _, sol) in &points {
        let mut lost = false;
        if let Some(p) = previous {
            let t = track_sweep(&p.spectrum.vectors, &sol.spectrum.vectors);
            lost = t.lost;
            ids = continue_ids(&ids, &t);
        }
        let mut by_id = vec![0.0; DIM];
        for (col, &id) in ids.iter().enumerate() {
            by_id[id] = sol.spectrum.energies[col];
        }
        let c = &sol.classification;
        let mut row = vec![num(*x)];
        row.extend(by_id[..levels].iter().map(|&e| num(e)));
        row.extend(branches.iter().map(|&b| num(c.get(b).energy)));
        row.extend(branches.iter().map(|&b| num(c.get(b).dominance)));
        row.extend(branches.iter().map(|&b| Value::Flag(c.get(b).is_valid())));
        row.push(num(
            sol.spectrum.compositions[(sudd, c.get(Branch::TS).state)]
        ));
        row.push(Value::Flag(lost));
        table.push(row);
        previous = Some(sol);
    }
    Ok(table)
}

/// `J^ST_12` with its validity flag and `J^eff_12` along one axis.
pub fn run_exchange(config: &RunConfig) -> Result<Table> {
    use SweepAxis::*;
    let ax = config.single_axis(Command::Exchange, &[EpsL, HbarOmega0, A, R])?;
    let points = solve_points(config, ax)?;
    let mut table = Table::new(vec![
        ax.axis.name().into(),
        "J_ST_12".into(),
        "valid_ST_12".into(),
        "J_eff_12".into(),
    ]);
    for (x, ints, sol) in &points {
        table.push(vec![
            num(*x),
            num(sol.exchange.j12),
            Value::Flag(sol.exchange.valid12),
            masked(j_eff_bond(0, &ints.hubbard()))?,
        ]);
    }
    Ok(table)
}

/// Inter-qubit exchange, capacitive coupling and their ratio along one axis.
pub fn run_couplings(config: &RunConfig) -> Result<Table> {
    use SweepAxis::*;
    let ax = config.single_axis(Command::Couplings, &[EpsL, EpsR, HbarOmega0, A, R])?;
    let rows = ax
        .grid()
        .values()
        .par_iter()
        .map(|&x| -> Result<Vec<Value>> {
            let device = config.device_at(&[(ax.axis, x)])?;
            let ints = Integrals::compute(&device, config.tol())?;
            let at = device.geometry.detunings();
            let cap = capacitive_params_from_integrals(&ints, at)?;
            let j23 = masked(j_eff_bond(1, &ints.hubbard()))?;
            let chi = match j23 {
                Value::Num(j) if cap.alpha0.abs() >= MIN_ALPHA0 => num(j / cap.alpha0),
                _ => Value::Missing,
            };
            Ok(vec![
                num(x),
                num(device.geometry.r / device.geometry.a),
                j23,
                num(cap.alpha0),
                num(cap.beta1),
                num(cap.beta2),
                chi,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(
        [
            ax.axis.name(),
            "R_over_a",
            "J_eff_23",
            "alpha0",
            "beta1",
            "beta2",
            "chi",
        ]
        .map(String::from)
        .to_vec(),
    );
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// `J^eff_12` and `J^eff_34` over an `eps_l x eps_r` grid, row-major in `eps_l`.
pub fn run_crosstalk(config: &RunConfig) -> Result<Table> {
    let find = |axis| config.sweep.iter().find(|s| s.axis == axis).copied();
    let (Some(l), Some(r), 2) = (
        find(SweepAxis::EpsL),
        find(SweepAxis::EpsR),
        config.sweep.len(),
    ) else {
        return Err(Error::Config(
            "`crosstalk` needs exactly the two sweep axes `eps_l` and `eps_r`".into(),
        ));
    };
    let device = config.device_at(&[])?;
    let map = crosstalk_map(l.grid(), r.grid(), &device, config.tol())?;
    let mut table = Table::new(
        ["eps_l", "eps_r", "J_eff_12", "J_eff_34"]
            .map(String::from)
            .to_vec(),
    );
    for c in &map.cells {
        table.push(vec![
            num(c.eps_l),
            num(c.eps_r),
            c.j12.map_or(Value::Missing, num),
            c.j34.map_or(Value::Missing, num),
        ]);
    }
    Ok(table)
}

/// JSON sidecar written next to every CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata<'a> {
    pub schema: u32,
    pub command: Command,
    pub library_version: &'static str,
    pub rows: usize,
    pub masked_rows: usize,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub config: &'a RunConfig,
}

impl<'a> RunMetadata<'a> {
    pub fn new(
        command: Command,
        config: &'a RunConfig,
        table: &Table,
        threads: usize,
        wall_time_seconds: f64,
    ) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            command,
            library_version: env!("CARGO_PKG_VERSION"),
            rows: table.rows.len(),
            masked_rows: table.masked_rows(),
            threads,
            wall_time_seconds,
            config,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metadata always serializes")
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParameter { .. } => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "[geometry]\nR = 150.0\n\n[[sweep]]\naxis = \"eps_l\"\nmin = -2.0\nmax = 2.0\nsteps = 3\n";

    fn config_line(text: &str) -> usize {
        match parse_config(text) {
            Err(Error::Config(m)) => m
                .strip_prefix("line ")
                .and_then(|s| s.split(':').next())
                .and_then(|n| n.parse().ok())
                .unwrap_or_else(|| panic!("no line in `{m}`")),
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_geometry_gets_defaults() {
        let c = parse_config(
            "[geometry]\n[[sweep]]\naxis = \"R\"\nmin = 40.0\nmax = 60.0\nsteps = 2\n",
        )
        .unwrap();
        assert_eq!(c.geometry.a, 22.0);
        assert_eq!(c.geometry.hbar_omega0, 5.0);
        assert_eq!(c.geometry.r, None);
        assert_eq!(c.material.effective_mass_ratio, 0.067);
        assert_eq!(c.material.relative_permittivity, 12.9);
        assert_eq!(c.mode, AssemblyMode::HubbardNn);
    }

    #[test]
    fn negative_a_names_the_invariant() {
        let text = "[geometry]\na = -1.0\nR = 100.0\n[[sweep]]\naxis = \"eps_l\"\nmin = 0.0\nmax = 1.0\nsteps = 2\n";
        let Err(Error::Config(m)) = parse_config(text) else {
            panic!()
        };
        assert!(m.contains("`a`") && m.contains("> 0"), "{m}");
        assert_eq!(config_line(text), 2);
    }

    #[test]
    fn unknown_key_is_rejected_with_its_line() {
        let text = format!("{MINIMAL}\n[tolerance]\nrel = 1e-6\nrelative = 3\n");
        assert_eq!(config_line(&text), 12);
        assert_eq!(config_line("colour = 1\n"), 1);
        assert_eq!(config_line(&format!("{MINIMAL}speed = 3\n")), 9);
        assert!(parse_config(&format!("{MINIMAL}[output]\npath = \"x\"\n")).is_err());
    }

    #[test]
    fn degenerate_axis_rejected() {
        let one = MINIMAL.replace("steps = 3", "steps = 1");
        assert_eq!(config_line(&one), 4);
        let flat = MINIMAL.replace("max = 2.0", "max = -2.0");
        assert!(parse_config(&flat).is_err());
    }

    #[test]
    fn missing_required_fields() {
        assert!(matches!(
            parse_config("[geometry]\nR = 50.0\n"),
            Err(Error::Config(_))
        ));
        let no_r = MINIMAL.replace("R = 150.0\n", "");
        let Err(Error::Config(m)) = parse_config(&no_r) else {
            panic!()
        };
        assert!(m.contains("`R`"), "{m}");
        let no_steps = MINIMAL.replace("steps = 3\n", "");
        let Err(Error::Config(m)) = parse_config(&no_steps) else {
            panic!()
        };
        assert!(m.contains("steps"), "{m}");
    }

    #[test]
    fn round_trip() {
        let text = "mode = \"full\"\n[material]\neffective_mass_ratio = 0.05\n[geometry]\nR = 60.5\n\
                    [detunings]\neps_r = -1.25\n[[sweep]]\naxis = \"eps_l\"\nmin = -1.0\nmax = 1.0\nsteps = 4\n\
                    [[sweep]]\naxis = \"eps_r\"\nmin = -1.0\nmax = 3.0\nsteps = 2\n[output]\ncsv = \"x.csv\"\n";
        let c = parse_config(text).unwrap();
        let again = parse_config(&c.to_toml()).unwrap();
        assert_eq!(c, again);
        let base = parse_config(MINIMAL).unwrap();
        assert_eq!(parse_config(&base.to_toml()).unwrap(), base);
    }

    #[test]
    fn csv_formatting() {
        let mut t = Table::new(vec!["x".into(), "y".into()]);
        t.push(vec![Value::Num(0.1), Value::Num(-2.0)]);
        t.push(vec![Value::Num(1.0), num(f64::NAN)]);
        let csv = t.to_csv();
        assert_eq!(
            csv,
            "# schema=1\nx,y,invalid\n1.0000000000000001e-1,-2.0000000000000000e0,0\n1.0000000000000000e0,,1\n"
        );
        assert_eq!(t.masked_rows(), 1);
        // 17 significant digits round-trip every double exactly.
        let back: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn command_axis_restrictions() {
        let c = parse_config(&MINIMAL.replace("eps_l", "eps_r")).unwrap();
        assert!(matches!(run_exchange(&c), Err(Error::Config(_))));
        assert!(matches!(run_crosstalk(&c), Err(Error::Config(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Eigensolver("x".into())), EXIT_NUMERICAL);
        assert_eq!(
            exit_code(&Error::QuadratureNonConvergence {
                estimate: 0.0,
                error: 1.0,
                subdivisions: 1
            }),
            EXIT_NUMERICAL
        );
    }

    #[test]
    fn exchange_sweep_columns() {
        let c = parse_config(MINIMAL).unwrap();
        let t = run_exchange(&c).unwrap();
        assert_eq!(
            t.columns,
            ["eps_l", "J_ST_12", "valid_ST_12", "J_eff_12", "invalid"]
        );
        assert_eq!(t.rows.len(), 3);
        let Value::Num(j) = t.rows[1][3] else {
            panic!()
        };
        assert!(j > 0.0);
    }
}
