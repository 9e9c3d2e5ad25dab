//! Configuration file support and settings resolution.
//!
//! Every command line flag has a TOML key of the same name (underscores
//! for dashes). Precedence is flags, then config file, then built-in
//! defaults. [`resolve`] merges the three into a [`Resolved`] value that
//! the command layer consumes, and [`Resolved::to_toml`] prints it back
//! for the `--dump-config` reproducibility flow.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use spectral::Error;

use crate::{
    CliError, Command, ConstraintArg, ExpansionArg, FormatArg, KindArg, MatrixArg, ModeArg,
    PolicyArg, RecipeArg, WeightingArg,
};

/// Raw contents of a `--config` file. Every key is optional; enum-valued
/// keys hold the same strings the corresponding flag accepts.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    command: Option<String>,
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    format: Option<String>,
    nodes: Option<usize>,
    graph: Option<String>,
    epsilon: Option<f64>,
    k: Option<usize>,
    mode: Option<String>,
    weighting: Option<String>,
    sigma: Option<f64>,
    matrix: Option<String>,
    kind: Option<String>,
    m: Option<usize>,
    constraint: Option<String>,
    expansion: Option<String>,
    model_out: Option<PathBuf>,
    clusters: Option<usize>,
    seed: Option<u64>,
    metrics: Option<PathBuf>,
    reference: Option<PathBuf>,
    plot: Option<PathBuf>,
    h0: Option<PathBuf>,
    dt: Option<f64>,
    steps: Option<usize>,
    sample_every: Option<usize>,
    times: Option<String>,
    on_instability: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(Error::from)?;
        toml::from_str(&text).map_err(|e| {
            CliError::from(Error::Parse(format!(
                "config file {}: {}",
                path.display(),
                e.message()
            )))
        })
    }
}

/// Graph construction settings after merging. `graph` stays optional
/// because edge-list inputs need no recipe at all; the command layer
/// demands one only when the input is a sample file.
#[derive(Debug, Clone)]
pub struct RecipeSettings {
    pub graph: Option<RecipeArg>,
    pub epsilon: Option<f64>,
    pub k: Option<usize>,
    pub mode: ModeArg,
    pub weighting: WeightingArg,
    pub sigma: Option<f64>,
}

/// Trajectory request of the diffuse command.
#[derive(Debug, Clone)]
pub enum Schedule {
    /// Explicit Euler steps, recording every `sample_every`-th state.
    Discrete {
        dt: f64,
        steps: usize,
        sample_every: usize,
        policy: PolicyArg,
    },
    /// Exact eigenmode solution at the listed times.
    Analytic { times: Vec<f64> },
}

/// Command-specific settings after resolution.
#[derive(Debug, Clone)]
pub enum Operation {
    Graph {
        matrix: MatrixArg,
    },
    Spectrum {
        kind: KindArg,
    },
    EmbedLem {
        m: usize,
        constraint: ConstraintArg,
        plot: Option<PathBuf>,
    },
    EmbedLpp {
        m: usize,
        expansion: ExpansionArg,
        model_out: Option<PathBuf>,
        plot: Option<PathBuf>,
    },
    Cluster {
        clusters: usize,
        seed: u64,
        metrics: Option<PathBuf>,
        reference: Option<PathBuf>,
        plot: Option<PathBuf>,
    },
    Diffuse {
        h0: PathBuf,
        schedule: Schedule,
    },
}

/// Fully resolved run settings: what executes, where the data comes from
/// and where the results go.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub input: PathBuf,
    pub output: PathBuf,
    pub format: Option<FormatArg>,
    pub nodes: Option<usize>,
    pub recipe: RecipeSettings,
    pub op: Operation,
}

/// Missing-setting error shared by resolution and the command layer.
pub fn required<T>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| Error::Parse(format!("missing required setting: {key}")).into())
}

fn merge_enum<T: ValueEnum>(
    flag: Option<T>,
    file: &Option<String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file {
        None => Ok(None),
        Some(s) => match T::from_str(s, true) {
            Ok(v) => Ok(Some(v)),
            Err(_) => {
                Err(Error::Parse(format!("invalid value {s:?} for config key {key}")).into())
            }
        },
    }
}

fn parse_times(s: &str) -> Result<Vec<f64>, CliError> {
    let mut times = Vec::new();
    for part in s.split(',') {
        let p = part.trim();
        if p.is_empty() {
            return Err(Error::Parse(format!("empty entry in times list {s:?}")).into());
        }
        let t: f64 = p
            .parse()
            .map_err(|_| Error::Parse(format!("cannot parse time value {p:?}")))?;
        times.push(t);
    }
    Ok(times)
}

pub fn resolve(cmd: &Command, file: &FileConfig) -> Result<Resolved, CliError> {
    let command_name = match cmd {
        Command::Graph(_) => "graph",
        Command::Spectrum(_) => "spectrum",
        Command::EmbedLem(_) => "embed-lem",
        Command::EmbedLpp(_) => "embed-lpp",
        Command::Cluster(_) => "cluster",
        Command::Diffuse(_) => "diffuse",
    };
    // A dumped config names its command; refuse to replay it under a
    // different one instead of silently reinterpreting the settings.
    if let Some(expected) = &file.command {
        if expected != command_name {
            return Err(Error::Parse(format!(
                "config file is for the {expected} command, not {command_name}"
            ))
            .into());
        }
    }
    let (io, recipe_args) = match cmd {
        Command::Graph(c) => (&c.io, &c.recipe),
        Command::Spectrum(c) => (&c.io, &c.recipe),
        Command::EmbedLem(c) => (&c.io, &c.recipe),
        Command::EmbedLpp(c) => (&c.io, &c.recipe),
        Command::Cluster(c) => (&c.io, &c.recipe),
        Command::Diffuse(c) => (&c.io, &c.recipe),
    };
    let input = required(io.input.clone().or_else(|| file.input.clone()), "input")?;
    let output = required(io.output.clone().or_else(|| file.output.clone()), "output")?;
    let format = merge_enum(io.format, &file.format, "format")?;
    let nodes = io.nodes.or(file.nodes);
    let recipe = RecipeSettings {
        graph: merge_enum(recipe_args.graph_recipe, &file.graph, "graph")?,
        epsilon: recipe_args.epsilon.or(file.epsilon),
        k: recipe_args.k.or(file.k),
        mode: merge_enum(recipe_args.mode, &file.mode, "mode")?.unwrap_or(ModeArg::Symmetric),
        weighting: merge_enum(recipe_args.weighting, &file.weighting, "weighting")?
            .unwrap_or(WeightingArg::Binary),
        sigma: recipe_args.sigma.or(file.sigma),
    };

    let op = match cmd {
        Command::Graph(c) => Operation::Graph {
            matrix: merge_enum(c.matrix, &file.matrix, "matrix")?.unwrap_or(MatrixArg::Weights),
        },
        Command::Spectrum(c) => Operation::Spectrum {
            kind: merge_enum(c.kind, &file.kind, "kind")?.unwrap_or(KindArg::Generalized),
        },
        Command::EmbedLem(c) => Operation::EmbedLem {
            m: required(c.m.or(file.m), "m")?,
            constraint: merge_enum(c.constraint, &file.constraint, "constraint")?
                .unwrap_or(ConstraintArg::DWeighted),
            plot: c.plot.clone().or_else(|| file.plot.clone()),
        },
        Command::EmbedLpp(c) => Operation::EmbedLpp {
            m: required(c.m.or(file.m), "m")?,
            expansion: merge_enum(c.expansion, &file.expansion, "expansion")?
                .unwrap_or(ExpansionArg::None),
            model_out: c.model_out.clone().or_else(|| file.model_out.clone()),
            plot: c.plot.clone().or_else(|| file.plot.clone()),
        },
        Command::Cluster(c) => {
            // The k of a knn recipe means neighbors, so the cluster count
            // must arrive separately there; on every other recipe a bare
            // --k unambiguously means the cluster count and is accepted
            // as a synonym for --clusters.
            let clusters = match c.clusters.or(file.clusters) {
                Some(v) => v,
                None if recipe.graph != Some(RecipeArg::Knn) => required(recipe.k, "clusters")?,
                None => {
                    return Err(
                        Error::Parse("missing required setting: clusters".into()).into()
                    )
                }
            };
            Operation::Cluster {
                clusters,
                seed: c.seed.or(file.seed).unwrap_or(0),
                metrics: c.metrics.clone().or_else(|| file.metrics.clone()),
                reference: c.reference.clone().or_else(|| file.reference.clone()),
                plot: c.plot.clone().or_else(|| file.plot.clone()),
            }
        }
        Command::Diffuse(c) => {
            let h0 = required(c.h0.clone().or_else(|| file.h0.clone()), "h0")?;
            let schedule = resolve_schedule(c, file)?;
            Operation::Diffuse { h0, schedule }
        }
    };

    Ok(Resolved {
        input,
        output,
        format,
        nodes,
        recipe,
        op,
    })
}

/// Picks between the analytic and discrete trajectory modes. Flags decide
/// the mode when any trajectory flag is present (so a config file holding
/// the other mode's keys does not conflict); inside one source, times and
/// dt/steps exclude each other.
fn resolve_schedule(c: &crate::DiffuseCmd, file: &FileConfig) -> Result<Schedule, CliError> {
    let flag_analytic = c.times.is_some();
    let flag_discrete = c.dt.is_some() || c.steps.is_some();
    if flag_analytic && flag_discrete {
        return Err(Error::InvalidRecipe(
            "specify either times or dt and steps, not both".into(),
        )
        .into());
    }
    let (times, dt, steps) = if flag_analytic {
        (c.times.clone(), None, None)
    } else if flag_discrete {
        (None, c.dt.or(file.dt), c.steps.or(file.steps))
    } else {
        if file.times.is_some() && (file.dt.is_some() || file.steps.is_some()) {
            return Err(Error::InvalidRecipe(
                "specify either times or dt and steps, not both".into(),
            )
            .into());
        }
        (file.times.clone(), file.dt, file.steps)
    };
    match times {
        Some(list) => Ok(Schedule::Analytic {
            times: parse_times(&list)?,
        }),
        None => {
            let dt = required(dt, "dt")?;
            let steps = required(steps, "steps")?;
            let sample_every = c.sample_every.or(file.sample_every).unwrap_or(1);
            if sample_every == 0 {
                return Err(Error::InvalidRecipe("sample-every must be positive".into()).into());
            }
            let policy = merge_enum(c.on_instability, &file.on_instability, "on_instability")?
                .unwrap_or(PolicyArg::Reject);
            Ok(Schedule::Discrete {
                dt,
                steps,
                sample_every,
                policy,
            })
        }
    }
}

fn enum_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .expect("value enums have no skipped variants")
        .get_name()
        .to_string()
}

fn toml_str(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn toml_path(p: &Path) -> String {
    toml_str(&p.display().to_string())
}

fn toml_float(x: f64) -> String {
    format!("{x:?}")
}

impl Resolved {
    /// The resolved settings as a TOML document that, saved as a config
    /// file, reproduces this run without any flags beyond the command.
    pub fn to_toml(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let w = &mut out;
        let command = match &self.op {
            Operation::Graph { .. } => "graph",
            Operation::Spectrum { .. } => "spectrum",
            Operation::EmbedLem { .. } => "embed-lem",
            Operation::EmbedLpp { .. } => "embed-lpp",
            Operation::Cluster { .. } => "cluster",
            Operation::Diffuse { .. } => "diffuse",
        };
        let _ = writeln!(w, "command = {}", toml_str(command));
        let _ = writeln!(w, "input = {}", toml_path(&self.input));
        let _ = writeln!(w, "output = {}", toml_path(&self.output));
        if let Some(f) = self.format {
            let _ = writeln!(w, "format = {}", toml_str(&enum_name(&f)));
        }
        if let Some(n) = self.nodes {
            let _ = writeln!(w, "nodes = {n}");
        }
        if let Some(g) = self.recipe.graph {
            let _ = writeln!(w, "graph = {}", toml_str(&enum_name(&g)));
        }
        if let Some(e) = self.recipe.epsilon {
            let _ = writeln!(w, "epsilon = {}", toml_float(e));
        }
        if let Some(k) = self.recipe.k {
            let _ = writeln!(w, "k = {k}");
        }
        let _ = writeln!(w, "mode = {}", toml_str(&enum_name(&self.recipe.mode)));
        let _ = writeln!(
            w,
            "weighting = {}",
            toml_str(&enum_name(&self.recipe.weighting))
        );
        if let Some(s) = self.recipe.sigma {
            let _ = writeln!(w, "sigma = {}", toml_float(s));
        }
        match &self.op {
            Operation::Graph { matrix } => {
                let _ = writeln!(w, "matrix = {}", toml_str(&enum_name(matrix)));
            }
            Operation::Spectrum { kind } => {
                let _ = writeln!(w, "kind = {}", toml_str(&enum_name(kind)));
            }
            Operation::EmbedLem {
                m,
                constraint,
                plot,
            } => {
                let _ = writeln!(w, "m = {m}");
                let _ = writeln!(w, "constraint = {}", toml_str(&enum_name(constraint)));
                if let Some(p) = plot {
                    let _ = writeln!(w, "plot = {}", toml_path(p));
                }
            }
            Operation::EmbedLpp {
                m,
                expansion,
                model_out,
                plot,
            } => {
                let _ = writeln!(w, "m = {m}");
                let _ = writeln!(w, "expansion = {}", toml_str(&enum_name(expansion)));
                if let Some(p) = model_out {
                    let _ = writeln!(w, "model_out = {}", toml_path(p));
                }
                if let Some(p) = plot {
                    let _ = writeln!(w, "plot = {}", toml_path(p));
                }
            }
            Operation::Cluster {
                clusters,
                seed,
                metrics,
                reference,
                plot,
            } => {
                let _ = writeln!(w, "clusters = {clusters}");
                let _ = writeln!(w, "seed = {seed}");
                if let Some(p) = metrics {
                    let _ = writeln!(w, "metrics = {}", toml_path(p));
                }
                if let Some(p) = reference {
                    let _ = writeln!(w, "reference = {}", toml_path(p));
                }
                if let Some(p) = plot {
                    let _ = writeln!(w, "plot = {}", toml_path(p));
                }
            }
            Operation::Diffuse { h0, schedule } => {
                let _ = writeln!(w, "h0 = {}", toml_path(h0));
                match schedule {
                    Schedule::Discrete {
                        dt,
                        steps,
                        sample_every,
                        policy,
                    } => {
                        let _ = writeln!(w, "dt = {}", toml_float(*dt));
                        let _ = writeln!(w, "steps = {steps}");
                        let _ = writeln!(w, "sample_every = {sample_every}");
                        let _ = writeln!(
                            w,
                            "on_instability = {}",
                            toml_str(&enum_name(policy))
                        );
                    }
                    Schedule::Analytic { times } => {
                        let joined = times
                            .iter()
                            .map(|t| format!("{t:?}"))
                            .collect::<Vec<_>>()
                            .join(",");
                        let _ = writeln!(w, "times = {}", toml_str(&joined));
                    }
                }
            }
        }
        out
    }
}
