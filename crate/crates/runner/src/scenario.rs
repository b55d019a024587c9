//! Scenario files: `[section]` headers, `key = value` lines, `#` comments.
//!
//! ```text
//! [scenario]
//! name = kg_bump
//! seed = 7
//! checks = criteria blew_up inf2
//!
//! [model]
//! kind = klein_gordon
//! length = 20
//! n = 399
//!
//! [data]
//! source = shapes
//! u0 = bump center=10 width=2 amp=3
//! u1 = u0_power power=2 scale=0.7071067811865476
//!
//! [run]
//! t_max = 20
//! ```

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use blowup_core::integrator::RunConfig;
use blowup_core::models::GammaSplit;
use blowup_core::nonlinearity::KirchhoffCoefficients;

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("missing key `{key}` in [{section}]")]
    MissingKey { section: String, key: String },
    #[error("missing section [{0}]")]
    MissingSection(String),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Criteria,
    NotCriteria,
    KgCondition,
    NbCondition,
    NotNbCondition,
    FgCertificate,
    EnergyTarget,
    BlewUp,
    Survived,
    Inf1,
    Inf2,
    Concavity,
    Nb5,
    EnergyDrift,
    LevineBound,
}

impl Check {
    pub const ALL: [Check; 15] = [
        Check::Criteria,
        Check::NotCriteria,
        Check::KgCondition,
        Check::NbCondition,
        Check::NotNbCondition,
        Check::FgCertificate,
        Check::EnergyTarget,
        Check::BlewUp,
        Check::Survived,
        Check::Inf1,
        Check::Inf2,
        Check::Concavity,
        Check::Nb5,
        Check::EnergyDrift,
        Check::LevineBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Criteria => "criteria",
            Check::NotCriteria => "not_criteria",
            Check::KgCondition => "kg_condition",
            Check::NbCondition => "nb_condition",
            Check::NotNbCondition => "not_nb_condition",
            Check::FgCertificate => "fg_certificate",
            Check::EnergyTarget => "energy_target",
            Check::BlewUp => "blew_up",
            Check::Survived => "survived",
            Check::Inf1 => "inf1",
            Check::Inf2 => "inf2",
            Check::Concavity => "concavity",
            Check::Nb5 => "nb5",
            Check::EnergyDrift => "energy_drift",
            Check::LevineBound => "levine_bound",
        }
    }

    /// Checks that can be decided without time stepping.
    pub fn is_static(self) -> bool {
        matches!(
            self,
            Check::Criteria
                | Check::NotCriteria
                | Check::KgCondition
                | Check::NbCondition
                | Check::NotNbCondition
                | Check::FgCertificate
                | Check::EnergyTarget
        )
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown check `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Law {
    pub p: Option<f64>,
    pub lower: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelDesc {
    KleinGordon { length: f64, n: usize, mass: f64, p: f64, linear: bool },
    KleinGordon2d { lx: f64, ly: f64, nx: usize, ny: usize, mass: f64, p: f64, linear: bool },
    Boussinesq { length: f64, n: usize, a: f64, nu: f64, m: u32, poly: Vec<f64>, linear: bool },
    Plate { geometry: PlateGrid, kirchhoff: Option<KirchhoffCoefficients>, law: Option<Law> },
    NonlinearBoundary { length: f64, cells: usize, b: f64, law: Option<Law>, split: GammaSplit },
    ScalarOde { a0: f64, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlateGrid {
    Interval { length: f64, n: usize },
    Rectangle { lx: f64, ly: f64, nx: usize, ny: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Zero,
    Const { value: f64 },
    Sine { mode: f64, amp: f64 },
    Bump { center: f64, center_y: Option<f64>, width: f64, amp: f64 },
    Gauss { center: f64, center_y: Option<f64>, width: f64, amp: f64 },
    Linear { slope: f64, offset: f64 },
    Parabola { amp: f64 },
    Random { amp: f64 },
    /// Velocity only: a multiple of the displacement.
    ScaledU0 { scale: f64 },
    /// Velocity only: `scale |u0|^power`.
    PowerU0 { power: f64, scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataDesc {
    Shapes { u0: Shape, u1: Shape },
    Explicit { u0: Vec<f64>, u1: Vec<f64> },
    Builder { seed0: Shape, seed1: Shape, k2: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub drift_tol: f64,
    pub fg_samples: usize,
    pub model: ModelDesc,
    pub data: DataDesc,
    pub run: RunConfig,
}

struct Entry {
    key: String,
    value: String,
    line: usize,
    used: bool,
}

struct Section {
    name: String,
    entries: Vec<Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let e = self.entries.iter_mut().find(|e| e.key == key)?;
        e.used = true;
        Some((e.value.clone(), e.line))
    }

    fn parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ParseError>
    where
        T::Err: fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|e| syntax(line, format!("bad value for `{key}`: {e}"))),
        }
    }

    fn required<T: FromStr>(&mut self, key: &str) -> Result<T, ParseError>
    where
        T::Err: fmt::Display,
    {
        self.parsed(key)?.ok_or_else(|| ParseError::MissingKey {
            section: self.name.clone(),
            key: key.into(),
        })
    }

    fn or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, ParseError>
    where
        T::Err: fmt::Display,
    {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    fn numbers(&mut self, key: &str) -> Result<Option<Vec<f64>>, ParseError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => parse_numbers(&v, line).map(Some),
        }
    }

    fn finish(self) -> Result<(), ParseError> {
        match self.entries.into_iter().find(|e| !e.used) {
            Some(e) => Err(ParseError::UnknownKey { line: e.line, section: self.name, key: e.key }),
            None => Ok(()),
        }
    }
}

fn parse_numbers(v: &str, line: usize) -> Result<Vec<f64>, ParseError> {
    v.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| syntax(line, format!("bad number `{t}`: {e}"))))
        .collect()
}

fn split_sections(text: &str) -> Result<Vec<Section>, ParseError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| syntax(line, "unterminated section header"))?
                .trim();
            if !matches!(name, "scenario" | "model" | "data" | "run") {
                return Err(syntax(line, format!("unknown section [{name}]")));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(syntax(line, format!("duplicate section [{name}]")));
            }
            sections.push(Section { name: name.into(), entries: Vec::new() });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(syntax(line, format!("bad key `{key}`")));
        }
        let section = sections
            .last_mut()
            .ok_or_else(|| syntax(line, "key outside of any section"))?;
        if section.entries.iter().any(|e| e.key == key) {
            return Err(syntax(line, format!("duplicate key `{key}`")));
        }
        section.entries.push(Entry { key: key.into(), value: value.into(), line, used: false });
    }
    Ok(sections)
}

fn take_section(sections: &mut Vec<Section>, name: &str) -> Option<Section> {
    let idx = sections.iter().position(|s| s.name == name)?;
    Some(sections.remove(idx))
}

fn parse_law(sec: &mut Section) -> Result<Option<Law>, ParseError> {
    let p = sec.parsed::<f64>("law_p")?;
    let lower = sec.numbers("law_lower")?.unwrap_or_default();
    Ok(match (p, lower.is_empty()) {
        (None, true) => None,
        _ => Some(Law { p, lower }),
    })
}

fn parse_model(mut sec: Section) -> Result<ModelDesc, ParseError> {
    let (kind, line) = sec.take("kind").ok_or_else(|| ParseError::MissingKey {
        section: "model".into(),
        key: "kind".into(),
    })?;
    let model = match kind.as_str() {
        "klein_gordon" => ModelDesc::KleinGordon {
            length: sec.required("length")?,
            n: sec.required("n")?,
            mass: sec.or("mass", 1.0)?,
            p: sec.or("p", 2.0)?,
            linear: sec.or("linear", false)?,
        },
        "klein_gordon_2d" => ModelDesc::KleinGordon2d {
            lx: sec.required("lx")?,
            ly: sec.required("ly")?,
            nx: sec.required("nx")?,
            ny: sec.required("ny")?,
            mass: sec.or("mass", 1.0)?,
            p: sec.or("p", 2.0)?,
            linear: sec.or("linear", false)?,
        },
        "boussinesq" => ModelDesc::Boussinesq {
            length: sec.or("length", 1.0)?,
            n: sec.required("n")?,
            a: sec.required("a")?,
            nu: sec.or("nu", 1.0)?,
            m: sec.or("m", 2)?,
            poly: sec.numbers("poly")?.unwrap_or_default(),
            linear: sec.or("linear", false)?,
        },
        "plate" => {
            let geometry = match sec.parsed::<f64>("length")? {
                Some(length) => PlateGrid::Interval { length, n: sec.required("n")? },
                None => PlateGrid::Rectangle {
                    lx: sec.required("lx")?,
                    ly: sec.required("ly")?,
                    nx: sec.required("nx")?,
                    ny: sec.required("ny")?,
                },
            };
            let kirchhoff = match sec.numbers("kirchhoff")? {
                None => None,
                Some(c) if c.len() == 4 => Some(KirchhoffCoefficients { a1: c[0], a2: c[1], b1: c[2], b2: c[3] }),
                Some(_) => return Err(syntax(line, "kirchhoff needs four numbers: a1 a2 b1 b2")),
            };
            ModelDesc::Plate { geometry, kirchhoff, law: parse_law(&mut sec)? }
        }
        "nonlinear_boundary" => {
            let split = match sec.take("split") {
                None => GammaSplit::BothEnds,
                Some((s, l)) => match s.as_str() {
                    "both" => GammaSplit::BothEnds,
                    "right" => GammaSplit::RightEndOnly,
                    other => return Err(syntax(l, format!("split must be `both` or `right`, got `{other}`"))),
                },
            };
            ModelDesc::NonlinearBoundary {
                length: sec.or("length", 1.0)?,
                cells: sec.required("cells")?,
                b: sec.or("b", 1.0)?,
                law: parse_law(&mut sec)?,
                split,
            }
        }
        "scalar_ode" => ModelDesc::ScalarOde { a0: sec.or("a0", 1.0)?, p: sec.or("p", 2.0)? },
        other => return Err(syntax(line, format!("unknown model kind `{other}`"))),
    };
    sec.finish()?;
    Ok(model)
}

pub fn parse_shape(text: &str, line: usize) -> Result<Shape, ParseError> {
    let mut tokens = text.split_whitespace();
    let name = tokens.next().ok_or_else(|| syntax(line, "empty shape"))?;
    let mut params: Vec<(String, f64, bool)> = Vec::new();
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("shape parameter `{tok}` is not `name=value`")))?;
        let v: f64 = v.parse().map_err(|e| syntax(line, format!("bad shape parameter `{tok}`: {e}")))?;
        params.push((k.into(), v, false));
    }
    let mut get = |key: &str, default: Option<f64>| -> Result<f64, ParseError> {
        match params.iter_mut().find(|p| p.0 == key) {
            Some(p) => {
                p.2 = true;
                Ok(p.1)
            }
            None => default.ok_or_else(|| syntax(line, format!("shape `{name}` needs `{key}=`"))),
        }
    };
    let shape = match name {
        "zero" => Shape::Zero,
        "const" => Shape::Const { value: get("value", None)? },
        "sine" => Shape::Sine { mode: get("mode", Some(1.0))?, amp: get("amp", Some(1.0))? },
        "bump" | "gauss" => {
            let center = get("center", None)?;
            let center_y = get("center_y", Some(f64::NAN)).map(|c| (!c.is_nan()).then_some(c))?;
            let width = get("width", None)?;
            let amp = get("amp", Some(1.0))?;
            if name == "bump" {
                Shape::Bump { center, center_y, width, amp }
            } else {
                Shape::Gauss { center, center_y, width, amp }
            }
        }
        "linear" => Shape::Linear { slope: get("slope", None)?, offset: get("offset", Some(0.0))? },
        "parabola" => Shape::Parabola { amp: get("amp", Some(1.0))? },
        "random" => Shape::Random { amp: get("amp", Some(1.0))? },
        "u0" => Shape::ScaledU0 { scale: get("scale", Some(1.0))? },
        "u0_power" => Shape::PowerU0 { power: get("power", None)?, scale: get("scale", Some(1.0))? },
        other => return Err(syntax(line, format!("unknown shape `{other}`"))),
    };
    if let Some(p) = params.iter().find(|p| !p.2) {
        return Err(syntax(line, format!("shape `{name}` has no parameter `{}`", p.0)));
    }
    Ok(shape)
}

fn shape_field(sec: &mut Section, key: &str) -> Result<(Shape, usize), ParseError> {
    let (text, line) = sec.take(key).ok_or_else(|| ParseError::MissingKey {
        section: "data".into(),
        key: key.into(),
    })?;
    Ok((parse_shape(&text, line)?, line))
}

fn parse_data(mut sec: Section) -> Result<DataDesc, ParseError> {
    let (source, line) = sec.take("source").ok_or_else(|| ParseError::MissingKey {
        section: "data".into(),
        key: "source".into(),
    })?;
    let data = match source.as_str() {
        "shapes" => {
            let (u0, l0) = shape_field(&mut sec, "u0")?;
            if matches!(u0, Shape::ScaledU0 { .. } | Shape::PowerU0 { .. }) {
                return Err(syntax(l0, "u0 cannot refer to itself"));
            }
            let (u1, _) = shape_field(&mut sec, "u1")?;
            DataDesc::Shapes { u0, u1 }
        }
        "explicit" => {
            let u0 = sec.numbers("u0")?;
            let u1 = sec.numbers("u1")?;
            match (u0, u1) {
                (Some(u0), Some(u1)) => DataDesc::Explicit { u0, u1 },
                _ => return Err(syntax(line, "explicit data needs both u0 and u1")),
            }
        }
        "builder" => {
            let (seed0, l0) = shape_field(&mut sec, "u0")?;
            let (seed1, l1) = shape_field(&mut sec, "u1")?;
            for (s, l) in [(&seed0, l0), (&seed1, l1)] {
                if matches!(s, Shape::ScaledU0 { .. } | Shape::PowerU0 { .. }) {
                    return Err(syntax(l, "builder seeds must be independent shapes"));
                }
            }
            DataDesc::Builder { seed0, seed1, k2: sec.required("k2")? }
        }
        other => return Err(syntax(line, format!("unknown data source `{other}`"))),
    };
    sec.finish()?;
    Ok(data)
}

fn parse_run(sec: Option<Section>) -> Result<RunConfig, ParseError> {
    let d = RunConfig::default();
    let Some(mut sec) = sec else { return Ok(d) };
    let cfg = RunConfig {
        dt0: sec.or("dt0", d.dt0)?,
        t_max: sec.or("t_max", d.t_max)?,
        psi_cap: sec.or("psi_cap", d.psi_cap)?,
        dt_floor: sec.or("dt_floor", d.dt_floor)?,
        record_every: sec.or("record_every", d.record_every)?,
        adapt: sec.or("adapt", d.adapt)?,
        c_cfl: sec.or("c_cfl", d.c_cfl)?,
        c_nl: sec.or("c_nl", d.c_nl)?,
        max_steps: sec.or("max_steps", d.max_steps)?,
        keep_states: false,
    };
    sec.finish()?;
    Ok(cfg)
}

pub fn parse_str(text: &str) -> Result<Scenario, ParseError> {
    let mut sections = split_sections(text)?;
    let mut head = take_section(&mut sections, "scenario").ok_or_else(|| ParseError::MissingSection("scenario".into()))?;
    let name: String = head.required("name")?;
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(ParseError::Syntax { line: 0, message: format!("scenario name `{name}` must be [A-Za-z0-9_-]+") });
    }
    let seed: u64 = head.required("seed")?;
    let mut checks = Vec::new();
    if let Some((list, line)) = head.take("checks") {
        for tok in list.split_whitespace() {
            let c: Check = tok.parse().map_err(|e: String| syntax(line, e))?;
            if checks.contains(&c) {
                return Err(syntax(line, format!("check `{tok}` listed twice")));
            }
            checks.push(c);
        }
    }
    let drift_tol = head.or("drift_tol", 1e-4)?;
    let fg_samples = head.or("fg_samples", 200)?;
    head.finish()?;
    let model = parse_model(take_section(&mut sections, "model").ok_or_else(|| ParseError::MissingSection("model".into()))?)?;
    let data = parse_data(take_section(&mut sections, "data").ok_or_else(|| ParseError::MissingSection("data".into()))?)?;
    let run = parse_run(take_section(&mut sections, "run"))?;
    Ok(Scenario { name, seed, checks, drift_tol, fg_samples, model, data, run })
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_str(&text)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let centered = |f: &mut fmt::Formatter<'_>, name, center, cy: &Option<f64>, width, amp| {
            write!(f, "{name} center={center}")?;
            if let Some(cy) = cy {
                write!(f, " center_y={cy}")?;
            }
            write!(f, " width={width} amp={amp}")
        };
        match self {
            Shape::Zero => write!(f, "zero"),
            Shape::Const { value } => write!(f, "const value={value}"),
            Shape::Sine { mode, amp } => write!(f, "sine mode={mode} amp={amp}"),
            Shape::Bump { center, center_y, width, amp } => centered(f, "bump", center, center_y, width, amp),
            Shape::Gauss { center, center_y, width, amp } => centered(f, "gauss", center, center_y, width, amp),
            Shape::Linear { slope, offset } => write!(f, "linear slope={slope} offset={offset}"),
            Shape::Parabola { amp } => write!(f, "parabola amp={amp}"),
            Shape::Random { amp } => write!(f, "random amp={amp}"),
            Shape::ScaledU0 { scale } => write!(f, "u0 scale={scale}"),
            Shape::PowerU0 { power, scale } => write!(f, "u0_power power={power} scale={scale}"),
        }
    }
}

fn write_law(out: &mut String, law: &Option<Law>) {
    if let Some(law) = law {
        if let Some(p) = law.p {
            let _ = writeln!(out, "law_p = {p}");
        }
        if !law.lower.is_empty() {
            let _ = writeln!(out, "law_lower = {}", join(&law.lower));
        }
    }
}

impl Scenario {
    /// Canonical text form; parsing it gives back an equal scenario.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let checks: Vec<&str> = self.checks.iter().map(|c| c.name()).collect();
        let _ = writeln!(out, "[scenario]\nname = {}\nseed = {}", self.name, self.seed);
        let _ = writeln!(out, "checks = {}", checks.join(" "));
        let _ = writeln!(out, "drift_tol = {}\nfg_samples = {}\n", self.drift_tol, self.fg_samples);
        out.push_str("[model]\n");
        match &self.model {
            ModelDesc::KleinGordon { length, n, mass, p, linear } => {
                let _ = writeln!(out, "kind = klein_gordon\nlength = {length}\nn = {n}\nmass = {mass}\np = {p}\nlinear = {linear}");
            }
            ModelDesc::KleinGordon2d { lx, ly, nx, ny, mass, p, linear } => {
                let _ = writeln!(
                    out,
                    "kind = klein_gordon_2d\nlx = {lx}\nly = {ly}\nnx = {nx}\nny = {ny}\nmass = {mass}\np = {p}\nlinear = {linear}"
                );
            }
            ModelDesc::Boussinesq { length, n, a, nu, m, poly, linear } => {
                let _ = writeln!(out, "kind = boussinesq\nlength = {length}\nn = {n}\na = {a}\nnu = {nu}\nm = {m}");
                if !poly.is_empty() {
                    let _ = writeln!(out, "poly = {}", join(poly));
                }
                let _ = writeln!(out, "linear = {linear}");
            }
            ModelDesc::Plate { geometry, kirchhoff, law } => {
                out.push_str("kind = plate\n");
                match geometry {
                    PlateGrid::Interval { length, n } => {
                        let _ = writeln!(out, "length = {length}\nn = {n}");
                    }
                    PlateGrid::Rectangle { lx, ly, nx, ny } => {
                        let _ = writeln!(out, "lx = {lx}\nly = {ly}\nnx = {nx}\nny = {ny}");
                    }
                }
                if let Some(k) = kirchhoff {
                    let _ = writeln!(out, "kirchhoff = {} {} {} {}", k.a1, k.a2, k.b1, k.b2);
                }
                write_law(&mut out, law);
            }
            ModelDesc::NonlinearBoundary { length, cells, b, law, split } => {
                let split = match split {
                    GammaSplit::BothEnds => "both",
                    GammaSplit::RightEndOnly => "right",
                };
                let _ = writeln!(out, "kind = nonlinear_boundary\nlength = {length}\ncells = {cells}\nb = {b}\nsplit = {split}");
                write_law(&mut out, law);
            }
            ModelDesc::ScalarOde { a0, p } => {
                let _ = writeln!(out, "kind = scalar_ode\na0 = {a0}\np = {p}");
            }
        }
        out.push_str("\n[data]\n");
        match &self.data {
            DataDesc::Shapes { u0, u1 } => {
                let _ = writeln!(out, "source = shapes\nu0 = {u0}\nu1 = {u1}");
            }
            DataDesc::Explicit { u0, u1 } => {
                let _ = writeln!(out, "source = explicit\nu0 = {}\nu1 = {}", join(u0), join(u1));
            }
            DataDesc::Builder { seed0, seed1, k2 } => {
                let _ = writeln!(out, "source = builder\nu0 = {seed0}\nu1 = {seed1}\nk2 = {k2}");
            }
        }
        let r = &self.run;
        let _ = writeln!(
            out,
            "\n[run]\ndt0 = {}\nt_max = {}\npsi_cap = {}\ndt_floor = {}\nrecord_every = {}\nadapt = {}\nc_cfl = {}\nc_nl = {}\nmax_steps = {}",
            r.dt0, r.t_max, r.psi_cap, r.dt_floor, r.record_every, r.adapt, r.c_cfl, r.c_nl, r.max_steps
        );
        out
    }
}
