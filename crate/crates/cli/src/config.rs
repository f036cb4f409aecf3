//! Sectioned `key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! [run]
//! scenario = larmor
//! dt = 0.005
//!
//! [fields]
//! b_ext = 0, 0, 1.5
//! ```
//!
//! Sections: `grid`, `fields`, `closure`, `toggles`, `run`, `poisson`,
//! `initial`. A key may also be written fully qualified (`grid.n_q = 32`)
//! anywhere in the file. When `run.scenario` is given its preset is the
//! starting point and every other key overrides it, regardless of order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use spinwig_core::output::load_table_dir;
use spinwig_core::selfenergy::{SelfEnergySet, TableClosure};
use spinwig_core::transport::RunConfig;
use spinwig_core::{
    make_grid, Error, QBoundary, RelaxationClosure, Result, Scenario, SelfEnergyClosure, TermGroup,
};

pub const SECTIONS: [&str; 7] = [
    "grid", "fields", "closure", "toggles", "run", "poisson", "initial",
];

/// A parsed configuration. The table directory is kept alongside the run
/// configuration so the resolved echo can name it.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub run: RunConfig,
    pub table_dir: Option<PathBuf>,
}

/// Values given on the command line; applied after the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub n_steps: Option<usize>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    section: String,
    key: String,
    value: String,
}

impl Entry {
    fn name(&self) -> String {
        format!("{}.{}", self.section, self.key)
    }

    fn err(&self, message: impl std::fmt::Display) -> Error {
        Error::Parse {
            line: self.line,
            message: format!("{}: {message}", self.name()),
        }
    }

    fn parse<T: FromStr>(&self) -> Result<T> {
        self.value
            .parse()
            .map_err(|_| self.err(format!("cannot parse '{}'", self.value)))
    }

    fn float(&self) -> Result<f64> {
        self.parse()
    }

    fn flag(&self) -> Result<bool> {
        match self.value.as_str() {
            "true" | "on" | "yes" | "1" => Ok(true),
            "false" | "off" | "no" | "0" => Ok(false),
            v => Err(self.err(format!("expected a boolean, got '{v}'"))),
        }
    }

    fn floats<const N: usize>(&self) -> Result<[f64; N]> {
        let parts: Vec<&str> = self.value.split(',').map(str::trim).collect();
        if parts.len() != N {
            return Err(self.err(format!("expected {N} comma-separated numbers")));
        }
        let mut out = [0.0; N];
        for (o, p) in out.iter_mut().zip(parts) {
            *o = p
                .parse()
                .map_err(|_| self.err(format!("cannot parse '{p}'")))?;
        }
        Ok(out)
    }
}

fn tokenize(text: &str) -> Result<Vec<Entry>> {
    let mut section: Option<String> = None;
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("malformed section header '{content}'"),
                })?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown section '{name}'"),
                });
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected 'key = value', got '{content}'"),
        })?;
        let key = key.trim();
        let value = value.trim().to_string();
        let (sec, key) = match key.split_once('.') {
            Some((s, k)) => (s.to_string(), k.to_string()),
            None => match &section {
                Some(s) => (s.clone(), key.to_string()),
                None => {
                    return Err(Error::Parse {
                        line,
                        message: format!("key '{key}' outside of any section"),
                    })
                }
            },
        };
        if !SECTIONS.contains(&sec.as_str()) {
            return Err(Error::Parse {
                line,
                message: format!("unknown key '{sec}.{key}'"),
            });
        }
        entries.push(Entry {
            line,
            section: sec,
            key,
            value,
        });
    }
    Ok(entries)
}

/// Closure settings gathered before the grid is known.
struct ClosureDraft {
    kind: Option<String>,
    relax: RelaxationClosure,
    axis_given: bool,
    table_dir: Option<PathBuf>,
    c_a: f64,
}

fn apply(cfg: &mut RunConfig, draft: &mut ClosureDraft, e: &Entry, base_dir: &Path) -> Result<()> {
    let g = &mut cfg.grid;
    let f = &mut cfg.fields;
    let ini = &mut cfg.initial;
    let po = &mut cfg.poisson;
    match (e.section.as_str(), e.key.as_str()) {
        ("grid", "n_q") => g.n_q = e.parse()?,
        ("grid", "n_p") => g.n_p = e.parse()?,
        ("grid", "momentum_dims") => g.momentum_dims = e.parse()?,
        ("grid", "q_min") => g.q_min = e.float()?,
        ("grid", "q_max") => g.q_max = e.float()?,
        ("grid", "p_min") => g.p_min = e.float()?,
        ("grid", "p_max") => g.p_max = e.float()?,
        ("grid", "q_boundary") => {
            g.q_boundary = QBoundary::from_str(&e.value).map_err(|m| e.err(m))?
        }

        ("fields", "b_ext") => f.b_ext = e.floats::<3>()?,
        ("fields", "alpha_rashba") => f.alpha_rashba = e.float()?,
        ("fields", "beta_dresselhaus") => f.beta_dresselhaus = e.float()?,
        ("fields", "g_s") => f.g_s = e.float()?,
        ("fields", "zeeman_scale") => f.zeeman_scale = e.float()?,
        ("fields", "e_ext") => f.e_ext = e.float()?,
        ("fields", "bias") => f.device.bias = e.float()?,
        ("fields", "barrier_height") => f.device.barrier_height = e.float()?,
        ("fields", "barrier_center") => f.device.barrier_center = e.float()?,
        ("fields", "barrier_width") => f.device.barrier_width = e.float()?,
        ("fields", "use_poisson") => f.use_poisson = e.flag()?,
        ("fields", "rashba_field_scaling") => f.rashba_field_scaling = e.flag()?,
        ("fields", "lorentz_half_factor") => f.lorentz_half_factor = e.flag()?,

        ("closure", "kind") => match e.value.as_str() {
            "none" | "relaxation_time" | "table" => draft.kind = Some(e.value.clone()),
            v => return Err(e.err(format!("unknown closure kind '{v}'"))),
        },
        ("closure", "tau_p") => draft.relax.tau_p = e.float()?,
        ("closure", "t1") => draft.relax.t1 = e.float()?,
        ("closure", "t2") => draft.relax.t2 = e.float()?,
        ("closure", "m_eq") => draft.relax.m_eq = e.floats::<3>()?,
        ("closure", "relax_axis") => {
            draft.relax.relax_axis = e.floats::<3>()?;
            draft.axis_given = true;
        }
        ("closure", "eq_width") => draft.relax.eq_width = e.float()?,
        ("closure", "spin_momentum_scattering") => {
            draft.relax.spin_momentum_scattering = e.flag()?
        }
        ("closure", "table_dir") => draft.table_dir = Some(base_dir.join(&e.value)),
        ("closure", "c_a") => draft.c_a = e.float()?,

        ("toggles", name) => {
            let group = TermGroup::from_str(name).map_err(|_| e.err("unknown term group"))?;
            cfg.toggles.set(group, e.flag()?);
        }

        ("run", "scenario") => {}
        ("run", "dt") => cfg.dt = e.float()?,
        ("run", "n_steps") => cfg.n_steps = e.parse()?,
        ("run", "output_every") => cfg.output_every = e.parse()?,
        ("run", "snapshot_every") => cfg.snapshot_every = e.parse()?,
        ("run", "strict_cfl") => cfg.strict_cfl = e.flag()?,
        ("run", "seed") => cfg.seed = e.parse()?,

        ("poisson", "epsilon") => po.epsilon = e.float()?,
        ("poisson", "rho_background") => po.rho_background = e.float()?,
        ("poisson", "phi_left") => po.phi_left = e.float()?,
        ("poisson", "phi_right") => po.phi_right = e.float()?,

        ("initial", "center_q") => ini.center_q = e.float()?,
        ("initial", "center_p") => ini.center_p = e.floats::<2>()?,
        ("initial", "width_q") => ini.width_q = e.float()?,
        ("initial", "width_p") => ini.width_p = e.float()?,
        ("initial", "polarization") => ini.polarization = e.floats::<3>()?,
        ("initial", "amplitude") => ini.amplitude = e.float()?,

        _ => return Err(e.err("unknown key")),
    }
    Ok(())
}

/// Parses configuration text. Relative table directories resolve against
/// `base_dir`.
pub fn parse_str(text: &str, base_dir: &Path, overrides: &Overrides) -> Result<CliConfig> {
    let entries = tokenize(text)?;
    let mut scenario = Scenario::Custom;
    for e in entries.iter().filter(|e| e.name() == "run.scenario") {
        scenario = e.parse().map_err(|_| e.err(format!("unknown scenario '{}'", e.value)))?;
    }
    if let Some(s) = overrides.scenario {
        scenario = s;
    }
    let mut cfg = scenario.preset();
    let mut draft = ClosureDraft {
        kind: None,
        relax: cfg.closure.relaxation().cloned().unwrap_or_default(),
        axis_given: cfg.closure.relaxation().is_some(),
        table_dir: None,
        c_a: match &cfg.closure {
            SelfEnergyClosure::Table(t) => t.c_a,
            _ => 1.0,
        },
    };
    for e in &entries {
        apply(&mut cfg, &mut draft, e, base_dir)?;
    }
    if let Some(n) = overrides.n_steps {
        cfg.n_steps = n;
    }
    if let Some(dt) = overrides.dt {
        cfg.dt = dt;
    }
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }

    let kind = draft
        .kind
        .unwrap_or_else(|| cfg.closure.kind().to_string());
    let mut table_dir = None;
    cfg.closure = match kind.as_str() {
        "none" => SelfEnergyClosure::None,
        "relaxation_time" => {
            let mut r = draft.relax;
            if !draft.axis_given {
                r.relax_axis = RelaxationClosure::default_axis(cfg.fields.b_ext);
            }
            SelfEnergyClosure::RelaxationTime(r)
        }
        _ => {
            let grid = make_grid(&cfg.grid)?;
            let set = match &draft.table_dir {
                Some(dir) => load_table_dir(dir, &grid)?,
                None => SelfEnergySet::zeros(&grid),
            };
            table_dir = draft.table_dir;
            SelfEnergyClosure::Table(Box::new(TableClosure {
                set,
                c_a: draft.c_a,
            }))
        }
    };
    cfg.scenario = scenario;
    cfg.check()?;
    Ok(CliConfig {
        run: cfg,
        table_dir,
    })
}

pub fn parse_config(path: &Path, overrides: &Overrides) -> Result<CliConfig> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_str(&text, base, overrides)
}

fn vec_str(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

struct Echo(String);

impl Echo {
    fn section(&mut self, name: &str) {
        if !self.0.is_empty() {
            self.0.push('\n');
        }
        let _ = writeln!(self.0, "[{name}]");
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key} = {value}");
    }

    fn num(&mut self, key: &str, value: f64) {
        // `{:?}` is the shortest representation that parses back exactly.
        self.kv(key, format!("{value:?}"));
    }
}

/// Every parameter of `cfg` in the input format. Parsing the result gives
/// back an equal configuration.
pub fn resolved_config(cfg: &CliConfig) -> String {
    let r = &cfg.run;
    let mut s = Echo(String::new());

    s.section("run");
    s.kv("scenario", r.scenario);
    s.num("dt", r.dt);
    s.kv("n_steps", r.n_steps);
    s.kv("output_every", r.output_every);
    s.kv("snapshot_every", r.snapshot_every);
    s.kv("strict_cfl", r.strict_cfl);
    s.kv("seed", r.seed);

    let g = &r.grid;
    s.section("grid");
    s.kv("n_q", g.n_q);
    s.kv("n_p", g.n_p);
    s.kv("momentum_dims", g.momentum_dims);
    s.num("q_min", g.q_min);
    s.num("q_max", g.q_max);
    s.num("p_min", g.p_min);
    s.num("p_max", g.p_max);
    s.kv("q_boundary", g.q_boundary);

    let f = &r.fields;
    s.section("fields");
    s.kv("b_ext", vec_str(&f.b_ext));
    s.num("alpha_rashba", f.alpha_rashba);
    s.num("beta_dresselhaus", f.beta_dresselhaus);
    s.num("g_s", f.g_s);
    s.num("zeeman_scale", f.zeeman_scale);
    s.num("e_ext", f.e_ext);
    s.num("bias", f.device.bias);
    s.num("barrier_height", f.device.barrier_height);
    s.num("barrier_center", f.device.barrier_center);
    s.num("barrier_width", f.device.barrier_width);
    s.kv("use_poisson", f.use_poisson);
    s.kv("rashba_field_scaling", f.rashba_field_scaling);
    s.kv("lorentz_half_factor", f.lorentz_half_factor);

    s.section("closure");
    s.kv("kind", r.closure.kind());
    match &r.closure {
        SelfEnergyClosure::None => {}
        SelfEnergyClosure::RelaxationTime(c) => {
            s.num("tau_p", c.tau_p);
            s.num("t1", c.t1);
            s.num("t2", c.t2);
            s.kv("m_eq", vec_str(&c.m_eq));
            s.kv("relax_axis", vec_str(&c.relax_axis));
            s.num("eq_width", c.eq_width);
            s.kv("spin_momentum_scattering", c.spin_momentum_scattering);
        }
        SelfEnergyClosure::Table(t) => {
            s.num("c_a", t.c_a);
            if let Some(dir) = &cfg.table_dir {
                let abs = fs::canonicalize(dir).unwrap_or_else(|_| dir.clone());
                s.kv("table_dir", abs.display());
            }
        }
    }

    s.section("toggles");
    for group in TermGroup::ALL {
        s.kv(group.name(), r.toggles.enabled(group));
    }

    let i = &r.initial;
    s.section("initial");
    s.num("center_q", i.center_q);
    s.kv("center_p", vec_str(&i.center_p));
    s.num("width_q", i.width_q);
    s.num("width_p", i.width_p);
    s.kv("polarization", vec_str(&i.polarization));
    s.num("amplitude", i.amplitude);

    let p = &r.poisson;
    s.section("poisson");
    s.num("epsilon", p.epsilon);
    s.num("rho_background", p.rho_background);
    s.num("phi_left", p.phi_left);
    s.num("phi_right", p.phi_right);
    s.0
}
