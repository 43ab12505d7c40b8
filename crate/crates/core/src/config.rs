//! Flat `key = value [unit]` scenario files.
//!
//! One assignment per line, `#` starts a comment. Numeric values may be a single
//! number, a comma-separated list, or ranges `a:step:b` (inclusive), followed by
//! an optional unit that applies to every item. Values without a unit are taken
//! in the base unit of the key (see [`KEYS`]). Environment variables named
//! `SPINDIFF_` + the key in upper case with `.` replaced by `__` override the file,
//! e.g. `SPINDIFF_CELL__RADIUS="12 mm"`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use sha2::{Digest, Sha256};

use crate::dynamics::SweepScenario;
use crate::eigenmodes::{Cell, QuadratureOrder};
use crate::error::{Error, Result};
use crate::gas::{GasSpec, RateTable, TORR};
use crate::optics::SlitSpec;

pub const ENV_PREFIX: &str = "SPINDIFF_";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Length,
    Pressure,
    Power,
    Temperature,
    Time,
    Frequency,
    Number,
    Integer,
    Word,
}

impl Kind {
    pub fn base_unit(self) -> &'static str {
        match self {
            Kind::Length => "m",
            Kind::Pressure => "torr",
            Kind::Power => "W",
            Kind::Temperature => "K",
            Kind::Time => "s",
            Kind::Frequency => "Hz",
            Kind::Number | Kind::Integer | Kind::Word => "",
        }
    }

    fn convert(self, v: f64, unit: &str) -> Option<f64> {
        let scale = match (self, unit) {
            (_, "") => return Some(v),
            (Kind::Length, "m") => 1.0,
            (Kind::Length, "cm") => 1e-2,
            (Kind::Length, "mm") => 1e-3,
            (Kind::Length, "um") => 1e-6,
            (Kind::Length, "nm") => 1e-9,
            (Kind::Pressure, "torr") => 1.0,
            (Kind::Pressure, "Pa") => 1.0 / TORR,
            (Kind::Pressure, "mbar") => 100.0 / TORR,
            (Kind::Power, "W") => 1.0,
            (Kind::Power, "mW") => 1e-3,
            (Kind::Power, "uW") => 1e-6,
            (Kind::Temperature, "K") => 1.0,
            (Kind::Temperature, "C") => return Some(v + 273.15),
            (Kind::Time, "s") => 1.0,
            (Kind::Time, "ms") => 1e-3,
            (Kind::Time, "us") => 1e-6,
            (Kind::Frequency, "Hz") => 1.0,
            (Kind::Frequency, "kHz") => 1e3,
            (Kind::Frequency, "MHz") => 1e6,
            _ => return None,
        };
        Some(v * scale)
    }
}

pub struct KeyDef {
    pub key: &'static str,
    pub kind: Kind,
    /// Accepts a list of values.
    pub list: bool,
    pub default: &'static str,
    pub doc: &'static str,
}

const fn key(key: &'static str, kind: Kind, default: &'static str, doc: &'static str) -> KeyDef {
    KeyDef { key, kind, list: false, default, doc }
}

const fn list(key: &'static str, kind: Kind, default: &'static str, doc: &'static str) -> KeyDef {
    KeyDef { key, kind, list: true, default, doc }
}

use Kind::*;

/// Every recognised key with its default.
pub const KEYS: &[KeyDef] = &[
    key("cell.geometry", Word, "sphere", "sphere or box"),
    key("cell.radius", Length, "10 mm", "sphere radius"),
    key("cell.mean_free_path", Length, "0.1 um", "alkali mean free path at the wall"),
    key("cell.wall_n", Number, "1", "wall parameter N"),
    key("cell.lx", Length, "4 mm", "box edge along x"),
    key("cell.ly", Length, "4 mm", "box edge along y"),
    key("cell.lz", Length, "2 mm", "box edge along z"),
    key("gas.buffer", Pressure, "500 torr", "buffer gas pressure"),
    key("gas.quench", Pressure, "20 torr", "quench gas pressure"),
    key("gas.vapor_a", Number, "7.0458135922807914", "log10 P[torr] = A - B/T"),
    key("gas.vapor_b", Number, "3830", "vapor law B (K)"),
    key("gas.d_ref", Number, "1.5e-5", "diffusion coefficient at 760 torr, 0 C (m^2/s)"),
    key("gas.sigma", Number, "1e-16", "resonant absorption cross-section (m^2)"),
    key("gas.k_se", Number, "1", "spin-exchange coefficient in M = k_SE N_A p_A"),
    key("gas.gyro", Number, "3.4986e9", "gyromagnetic ratio (Hz/T)"),
    key("rates.sd_cs_ne", Number, "1", "spin destruction, buffer (1/s)"),
    key("rates.sd_cs_n2", Number, "1.5", "spin destruction, quench (1/s)"),
    key("rates.sd_cs_cs", Number, "0.5", "spin destruction, alkali (1/s)"),
    key("rates.se_cs_ne", Number, "0", "spin exchange, buffer (1/s)"),
    key("rates.se_cs_cs", Number, "1", "spin exchange, alkali (1/s)"),
    key("rates.pumping", Number, "0.5", "optical pumping rate (1/s)"),
    key("rates.gradient", Number, "0.1", "gradient relaxation (1/s)"),
    key("rates.epsilon", Number, "5", "slowing-down factor"),
    key("rates.q_se", Number, "5", "spin-exchange slowing factor"),
    key("temperature", Temperature, "60 C", "cell temperature of the pump sweeps"),
    list("temperatures", Temperature, "40:10:100 C", "temperature grid of fig2/fig4"),
    key("wall.eta", Number, "0.5", "dirty-wall coefficient in R_eff = R / (1 + eta N_A / 1e18 m^-3)"),
    key("pump.waist", Length, "3 mm", "pump rms waist"),
    key("pump.offset_x", Length, "0 mm", "pump centre x"),
    key("pump.offset_y", Length, "0 mm", "pump centre y"),
    key("pump.p_sat", Power, "0.2 mW", "pump saturation power"),
    key("probe.waist", Length, "3 mm", "probe rms waist"),
    key("slit.width", Length, "1 mm", "slit width along z"),
    list("slit.positions", Length, "-9:0.5:9 mm", "slit centres"),
    list("sweep.powers", Power, "0, 0.01:0.01:0.09, 0.1:0.1:0.7, 0.8:0.2:7 mW", "pump power grid"),
    key("couple.j_scale", Number, "31.4", "|J| = j_scale (N_A / 1e18 m^-3) p_A (1/s)"),
    key("couple.gradient_re", Number, "1e-9", "field gradient, real part (T/m)"),
    key("couple.gradient_im", Number, "0", "field gradient, imaginary part (T/m)"),
    key("couple.kappa_shift", Number, "150", "light shift per effective intensity (rad/s per W/m^2)"),
    key("couple.kappa_broad", Number, "0.03", "power broadening per effective intensity (1/s per W/m^2)"),
    key("couple.kappa_se", Number, "1", "spin-exchange shift per unit M / 1e18 m^-3 (rad/s)"),
    key("couple.eta1", Number, "1", "gain of mode 1"),
    key("couple.eta2", Number, "1", "gain of mode 2"),
    key("couple.t_int", Time, "1 s", "drive duration"),
    key("couple.larmor", Frequency, "1 kHz", "Larmor frequency"),
    key("couple.power", Power, "1 mW", "pump power of the `couple` subcommand"),
    key("modes.l_max", Integer, "3", "highest angular order in mode tables"),
    key("modes.count", Integer, "3", "radial roots per order (sphere) or modes (box)"),
    key("quad.radial", Integer, "64", "quadrature nodes, radial or x"),
    key("quad.polar", Integer, "32", "quadrature nodes, polar or y"),
    key("quad.azimuthal", Integer, "32", "quadrature nodes, azimuthal or z"),
    list("scan.wall_c", Number, "0:0.005:0.4", "wall parameter c = (wall factor at k=1) / R for the fig2 scan"),
    list("scan.waists", Length, "0.5:0.25:12 mm", "pump waists for suppl-beam"),
    key("fit.components", Integer, "2", "Lorentzians per fit"),
    key("fit.noise", Number, "0.01", "noise of the synthetic spectrum in fig2"),
    key("noneon.lx", Length, "4 mm", "box edge x of the no-neon cell"),
    key("noneon.ly", Length, "4 mm", "box edge y"),
    key("noneon.lz", Length, "2 mm", "box edge z"),
    key("noneon.buffer", Pressure, "200 torr", "N2 buffer of the no-neon cell"),
    key("noneon.temperature", Temperature, "80 C", "temperature of the no-neon sweep"),
    key("noneon.j_scale", Number, "0", "coupling scale of the no-neon sweep"),
    key("seed", Integer, "0", "random seed"),
];

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Num(Vec<f64>),
    Word(String),
}

fn find(key: &str) -> Option<&'static KeyDef> {
    KEYS.iter().find(|k| k.key == key)
}

fn parse_number(s: &str, line: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse { line, message: format!("'{}' is not a number", s.trim()) })
}

fn expand_range(item: &str, line: usize) -> Result<Vec<f64>> {
    let parts: Vec<&str> = item.split(':').collect();
    match parts.len() {
        1 => Ok(vec![parse_number(parts[0], line)?]),
        3 => {
            let a = parse_number(parts[0], line)?;
            let step = parse_number(parts[1], line)?;
            let b = parse_number(parts[2], line)?;
            if !(step > 0.0) || b < a {
                return Err(Error::Parse { line, message: format!("range '{item}' needs step > 0 and a <= b") });
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            if n > 1_000_000 {
                return Err(Error::Parse { line, message: format!("range '{item}' is too long") });
            }
            Ok((0..=n).map(|i| a + step * i as f64).collect())
        }
        _ => Err(Error::Parse { line, message: format!("'{item}' is neither a number nor a:step:b") }),
    }
}

fn parse_value(def: &KeyDef, text: &str, line: usize) -> Result<Value> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse { line, message: format!("{} has no value", def.key) });
    }
    if def.kind == Word {
        if text.split_whitespace().count() != 1 {
            return Err(Error::Parse { line, message: format!("{} takes a single word", def.key) });
        }
        return Ok(Value::Word(text.to_string()));
    }
    let (body, unit) = match text.rsplit_once(char::is_whitespace) {
        Some((b, u)) if u.starts_with(|c: char| c.is_ascii_alphabetic()) => (b, u),
        _ => (text, ""),
    };
    let mut values = Vec::new();
    for item in body.split(',') {
        values.extend(expand_range(item, line)?);
    }
    if !def.list && values.len() != 1 {
        return Err(Error::Parse { line, message: format!("{} takes a single value", def.key) });
    }
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        let c = def.kind.convert(v, unit).ok_or_else(|| Error::Parse {
            line,
            message: format!("unit '{unit}' does not fit {} (base unit '{}')", def.key, def.kind.base_unit()),
        })?;
        if def.kind == Integer && (c.fract() != 0.0 || c < 0.0) {
            return Err(Error::Parse { line, message: format!("{} must be a non-negative integer", def.key) });
        }
        out.push(c);
    }
    Ok(Value::Num(out))
}

/// Raw key/value table: defaults, then file, then environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    values: BTreeMap<&'static str, Value>,
}

impl Default for Settings {
    fn default() -> Self {
        let values =
            KEYS.iter().map(|d| (d.key, parse_value(d, d.default, 0).expect("default table parses"))).collect();
        Self { values }
    }
}

impl Settings {
    /// Apply `key = value` lines. Unknown keys are collected and reported together.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut unknown = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(Error::Parse { line, message: format!("expected 'key = value', got '{content}'") });
            };
            let k = k.trim();
            match find(k) {
                Some(def) => {
                    self.values.insert(def.key, parse_value(def, v, line)?);
                }
                None => unknown.push(format!("{k} (line {line})")),
            }
        }
        if !unknown.is_empty() {
            return Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))));
        }
        Ok(())
    }

    /// Overrides from (name, value) pairs such as `std::env::vars()`.
    pub fn apply_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<()> {
        for (name, value) in vars {
            let Some(rest) = name.strip_prefix(ENV_PREFIX) else { continue };
            let k = rest.to_ascii_lowercase().replace("__", ".");
            // process-level variables handled by the CLI
            if matches!(k.as_str(), "out" | "threads" | "config") {
                continue;
            }
            let def = find(&k).ok_or_else(|| Error::Config(format!("unknown key {k} from {name}")))?;
            let v = parse_value(def, &value, 0).map_err(|e| Error::Config(format!("{name}: {e}")))?;
            self.values.insert(def.key, v);
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let def = find(key).ok_or_else(|| Error::Config(format!("unknown key {key}")))?;
        self.values.insert(def.key, parse_value(def, value, 0)?);
        Ok(())
    }

    fn nums(&self, key: &str) -> &[f64] {
        match &self.values[key] {
            Value::Num(v) => v,
            Value::Word(_) => unreachable!("numeric key {key}"),
        }
    }

    fn num(&self, key: &str) -> f64 {
        self.nums(key)[0]
    }

    fn word(&self, key: &str) -> &str {
        match &self.values[key] {
            Value::Word(w) => w,
            Value::Num(_) => unreachable!("word key {key}"),
        }
    }

    /// One `key = value` line per key in table order, base units, round-trip precision.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for d in KEYS {
            match &self.values[d.key] {
                Value::Word(w) => writeln!(s, "{} = {w}", d.key).unwrap(),
                Value::Num(v) => {
                    let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
                    writeln!(s, "{} = {}", d.key, items.join(", ")).unwrap();
                }
            }
        }
        s
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub j_scale: f64,
    pub gradient: C64,
    pub kappa_shift: f64,
    pub kappa_broad: f64,
    pub kappa_se: f64,
    pub eta: [f64; 2],
    pub t_int: f64,
    pub larmor: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoNeon {
    pub edges: [f64; 3],
    pub buffer: f64,
    pub temperature: f64,
    pub j_scale: f64,
}

/// A validated scenario in SI units (pressures in torr).
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cell: Cell,
    pub gas: GasSpec,
    pub rates: RateTable,
    pub temperature: f64,
    pub temperatures: Vec<f64>,
    pub wall_eta: f64,
    pub pump_waist: f64,
    pub pump_offset: [f64; 2],
    pub p_sat: f64,
    pub probe_waist: f64,
    pub slit: SlitSpec,
    pub powers: Vec<f64>,
    pub coupling: Coupling,
    pub l_max: u32,
    pub mode_count: usize,
    pub order: QuadratureOrder,
    pub wall_scan: Vec<f64>,
    pub waist_scan: Vec<f64>,
    pub fit_components: usize,
    pub fit_noise: f64,
    pub noneon: NoNeon,
    pub seed: u64,
    /// sha256 of the canonical settings.
    pub hash: String,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario::from_settings(&Settings::default()).expect("defaults are valid")
    }
}

impl Scenario {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let cell = match s.word("cell.geometry") {
            "sphere" => Cell::sphere(s.num("cell.radius"), s.num("cell.mean_free_path"), s.num("cell.wall_n"))?,
            "box" => Cell::cuboid(s.num("cell.lx"), s.num("cell.ly"), s.num("cell.lz"))?,
            other => return Err(Error::Config(format!("cell.geometry must be sphere or box, got '{other}'"))),
        };
        let gas = GasSpec {
            buffer_pressure: s.num("gas.buffer"),
            quench_pressure: s.num("gas.quench"),
            vapor_a: s.num("gas.vapor_a"),
            vapor_b: s.num("gas.vapor_b"),
            d_ref: s.num("gas.d_ref"),
            sigma: s.num("gas.sigma"),
            k_se: s.num("gas.k_se"),
            gyro: 2.0 * std::f64::consts::PI * s.num("gas.gyro"),
        };
        gas.validate()?;
        let rates = RateTable {
            sd_cs_ne: s.num("rates.sd_cs_ne"),
            sd_cs_n2: s.num("rates.sd_cs_n2"),
            sd_cs_cs: s.num("rates.sd_cs_cs"),
            se_cs_ne: s.num("rates.se_cs_ne"),
            se_cs_cs: s.num("rates.se_cs_cs"),
            pumping: s.num("rates.pumping"),
            gradient: s.num("rates.gradient"),
            epsilon: s.num("rates.epsilon"),
            q_se: s.num("rates.q_se"),
        };
        rates.validate()?;
        let slit = SlitSpec { width: s.num("slit.width"), positions: s.nums("slit.positions").to_vec() };
        slit.validate(&cell)?;
        let order = QuadratureOrder::new(
            s.num("quad.radial") as usize,
            s.num("quad.polar") as usize,
            s.num("quad.azimuthal") as usize,
        )?;
        let nonempty = |k: &str| -> Result<Vec<f64>> {
            let v = s.nums(k).to_vec();
            if v.is_empty() {
                return Err(Error::Config(format!("{k} is empty")));
            }
            Ok(v)
        };
        let sc = Scenario {
            cell,
            gas,
            rates,
            temperature: s.num("temperature"),
            temperatures: nonempty("temperatures")?,
            wall_eta: s.num("wall.eta"),
            pump_waist: s.num("pump.waist"),
            pump_offset: [s.num("pump.offset_x"), s.num("pump.offset_y")],
            p_sat: s.num("pump.p_sat"),
            probe_waist: s.num("probe.waist"),
            slit,
            powers: nonempty("sweep.powers")?,
            coupling: Coupling {
                j_scale: s.num("couple.j_scale"),
                gradient: C64::new(s.num("couple.gradient_re"), s.num("couple.gradient_im")),
                kappa_shift: s.num("couple.kappa_shift"),
                kappa_broad: s.num("couple.kappa_broad"),
                kappa_se: s.num("couple.kappa_se"),
                eta: [s.num("couple.eta1"), s.num("couple.eta2")],
                t_int: s.num("couple.t_int"),
                larmor: s.num("couple.larmor"),
                power: s.num("couple.power"),
            },
            l_max: s.num("modes.l_max") as u32,
            mode_count: s.num("modes.count") as usize,
            order,
            wall_scan: nonempty("scan.wall_c")?,
            waist_scan: nonempty("scan.waists")?,
            fit_components: s.num("fit.components") as usize,
            fit_noise: s.num("fit.noise"),
            noneon: NoNeon {
                edges: [s.num("noneon.lx"), s.num("noneon.ly"), s.num("noneon.lz")],
                buffer: s.num("noneon.buffer"),
                temperature: s.num("noneon.temperature"),
                j_scale: s.num("noneon.j_scale"),
            },
            seed: s.num("seed") as u64,
            hash: s.hash(),
        };
        if !(sc.temperature > 0.0) || sc.temperatures.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::Config("temperatures must be above 0 K".into()));
        }
        if sc.mode_count == 0 || sc.fit_components == 0 {
            return Err(Error::Config("modes.count and fit.components must be >= 1".into()));
        }
        sc.sweep()?;
        Ok(sc)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        s.apply_text(text)?;
        Scenario::from_settings(&s)
    }

    /// Defaults, then the file (if any), then `SPINDIFF_` environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        Self::load_settings(path).and_then(|s| Scenario::from_settings(&s))
    }

    pub fn load_settings(path: Option<&Path>) -> Result<Settings> {
        let mut s = Settings::default();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)?;
            s.apply_text(&text)?;
        }
        s.apply_env(std::env::vars())?;
        Ok(s)
    }

    /// The pump sweep of this scenario.
    pub fn sweep(&self) -> Result<SweepScenario> {
        let c = &self.coupling;
        SweepScenario::builder()
            .cell(self.cell)
            .gas(self.gas)
            .rates(self.rates)
            .temperature(self.temperature)
            .powers(self.powers.clone())
            .pump_waist(self.pump_waist)
            .pump_offset(self.pump_offset)
            .p_sat(self.p_sat)
            .j_scale(c.j_scale)
            .gradient(c.gradient)
            .kappa_shift(c.kappa_shift)
            .kappa_broad(c.kappa_broad)
            .kappa_se(c.kappa_se)
            .eta(c.eta)
            .t_int(c.t_int)
            .larmor(c.larmor)
            .order(self.order)
            .build()
    }

    /// The box-cell sweep without noble gas.
    pub fn noneon_sweep(&self) -> Result<SweepScenario> {
        let mut s = self.sweep()?;
        let [lx, ly, lz] = self.noneon.edges;
        s.cell = Cell::cuboid(lx, ly, lz)?;
        s.gas.buffer_pressure = self.noneon.buffer;
        s.gas.quench_pressure = 0.0;
        s.temperature = self.noneon.temperature;
        s.j_scale = self.noneon.j_scale;
        s.modes = None;
        s.validate()?;
        Ok(s)
    }
}

/// Markdown table of every key, for documentation.
pub fn key_table() -> String {
    let mut s = String::from("| key | default | unit | meaning |\n|---|---|---|---|\n");
    for d in KEYS {
        let doc = d.doc.replace('|', "\\|");
        writeln!(s, "| `{}` | `{}` | {} | {doc} |", d.key, d.default, d.kind.base_unit()).unwrap();
    }
    s
}
