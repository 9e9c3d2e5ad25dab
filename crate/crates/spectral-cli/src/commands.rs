//! Execution layer: load the input, run the resolved operation, write the
//! outputs.
//!
//! Every command renders all of its output strings before writing any
//! file, so a failure late in the pipeline (a rejected plot dimension, an
//! unreadable reference label file) leaves no partial results behind.

use std::path::Path;

use ndarray::s;
use serde::Serialize;

use spectral::io::{
    format_embedding, format_labels, format_lpp_model, format_matrix, format_spectrum,
    format_trajectory, read_dataset_csv, read_edge_list, read_labels, read_vector,
};
use spectral::{
    adjusted_rand_index, build_graph, degree_vector, generalized_eig, hat_eig, kmeans, laplacian,
    lem_embed_with, lpp_fit, lpp_transform, random_walk_normalized, solve_analytic,
    spectral_coordinates, step_discrete_with, sym_eig, sym_normalized, ClusterAssignment,
    DataSet, Error, Expansion, GraphRecipe, HeatState, KnnMode, LemConstraint, SimilarityGraph,
    StabilityPolicy, Weighting,
};

use crate::config::{required, Operation, RecipeSettings, Resolved, Schedule};
use crate::svg::scatter_svg;
use crate::{
    CliError, ConstraintArg, ExpansionArg, FormatArg, KindArg, MatrixArg, ModeArg, PolicyArg,
    RecipeArg, WeightingArg,
};

/// Parsed input file, either sample coordinates or a ready-made graph.
enum LoadedInput {
    Samples(DataSet),
    Edges(SimilarityGraph),
}

fn infer_format(path: &Path) -> Result<FormatArg, CliError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(FormatArg::Csv),
        Some("edges") => Ok(FormatArg::Edges),
        _ => Err(Error::Parse(format!(
            "cannot infer the input format of {}; pass --format csv or --format edges",
            path.display()
        ))
        .into()),
    }
}

fn load_input(r: &Resolved) -> Result<LoadedInput, CliError> {
    let format = match r.format {
        Some(f) => f,
        None => infer_format(&r.input)?,
    };
    match format {
        FormatArg::Csv => Ok(LoadedInput::Samples(read_dataset_csv(&r.input)?)),
        FormatArg::Edges => Ok(LoadedInput::Edges(read_edge_list(&r.input, r.nodes)?)),
    }
}

fn build_recipe(s: &RecipeSettings) -> Result<GraphRecipe, CliError> {
    let kind = match s.graph {
        Some(k) => k,
        None => {
            return Err(Error::InvalidRecipe(
                "sample input needs a graph recipe; pass --graph epsilon, knn or full".into(),
            )
            .into())
        }
    };
    let weighting = |s: &RecipeSettings| -> Result<Weighting, CliError> {
        match s.weighting {
            WeightingArg::Binary => Ok(Weighting::Binary),
            WeightingArg::Gaussian => Ok(Weighting::Gaussian {
                sigma: required(s.sigma, "sigma")?,
            }),
        }
    };
    match kind {
        RecipeArg::Epsilon => Ok(GraphRecipe::Epsilon {
            epsilon: required(s.epsilon, "epsilon")?,
            weighting: weighting(s)?,
        }),
        RecipeArg::Knn => Ok(GraphRecipe::Knn {
            k: required(s.k, "k")?,
            mode: match s.mode {
                ModeArg::Mutual => KnnMode::Mutual,
                ModeArg::Symmetric => KnnMode::Symmetric,
            },
            weighting: weighting(s)?,
        }),
        RecipeArg::Full => Ok(GraphRecipe::Full {
            sigma: required(s.sigma, "sigma")?,
        }),
    }
}

/// The similarity graph of the run: edge lists are taken as-is, sample
/// files go through the resolved recipe.
fn obtain_graph(input: &LoadedInput, recipe: &RecipeSettings) -> Result<SimilarityGraph, CliError> {
    match input {
        LoadedInput::Edges(g) => Ok(g.clone()),
        LoadedInput::Samples(d) => Ok(build_graph(d, &build_recipe(recipe)?)?),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::from(Error::from(e)))
}

pub fn execute(r: &Resolved) -> Result<(), CliError> {
    let input = load_input(r)?;
    match &r.op {
        Operation::Graph { matrix } => graph_cmd(r, &input, *matrix),
        Operation::Spectrum { kind } => spectrum_cmd(r, &input, *kind),
        Operation::EmbedLem {
            m,
            constraint,
            plot,
        } => embed_lem_cmd(r, &input, *m, *constraint, plot.as_deref()),
        Operation::EmbedLpp {
            m,
            expansion,
            model_out,
            plot,
        } => embed_lpp_cmd(r, &input, *m, *expansion, model_out.as_deref(), plot.as_deref()),
        Operation::Cluster {
            clusters,
            seed,
            metrics,
            reference,
            plot,
        } => cluster_cmd(
            r,
            &input,
            *clusters,
            *seed,
            metrics.as_deref(),
            reference.as_deref(),
            plot.as_deref(),
        ),
        Operation::Diffuse { h0, schedule } => diffuse_cmd(r, &input, h0, schedule),
    }
}

fn graph_cmd(r: &Resolved, input: &LoadedInput, matrix: MatrixArg) -> Result<(), CliError> {
    let g = obtain_graph(input, &r.recipe)?;
    let m = match matrix {
        MatrixArg::Weights => g.weights().clone(),
        MatrixArg::Laplacian => laplacian(&g),
        MatrixArg::SymNormalized => sym_normalized(&g)?,
        MatrixArg::RandomWalk => random_walk_normalized(&g)?,
    };
    write_text(&r.output, &format_matrix(&m))
}

fn spectrum_cmd(r: &Resolved, input: &LoadedInput, kind: KindArg) -> Result<(), CliError> {
    let g = obtain_graph(input, &r.recipe)?;
    let spectrum = match kind {
        KindArg::Ordinary => sym_eig(&laplacian(&g))?,
        KindArg::SymNormalized => hat_eig(&sym_normalized(&g)?)?,
        KindArg::Generalized => generalized_eig(&laplacian(&g), &degree_vector(&g))?,
    };
    write_text(&r.output, &format_spectrum(&spectrum))
}

fn embed_lem_cmd(
    r: &Resolved,
    input: &LoadedInput,
    m: usize,
    constraint: ConstraintArg,
    plot: Option<&Path>,
) -> Result<(), CliError> {
    let g = obtain_graph(input, &r.recipe)?;
    let lem_constraint = match constraint {
        ConstraintArg::DWeighted => LemConstraint::DWeighted,
        ConstraintArg::Identity => LemConstraint::Identity,
    };
    let embedding = lem_embed_with(&g, m, lem_constraint)?;
    let embedding_text = format_embedding(&embedding);
    let plot_text = match plot {
        Some(_) => Some(scatter_svg(embedding.coords.view(), None)?),
        None => None,
    };
    write_text(&r.output, &embedding_text)?;
    if let (Some(path), Some(text)) = (plot, &plot_text) {
        write_text(path, text)?;
    }
    Ok(())
}

fn embed_lpp_cmd(
    r: &Resolved,
    input: &LoadedInput,
    m: usize,
    expansion: ExpansionArg,
    model_out: Option<&Path>,
    plot: Option<&Path>,
) -> Result<(), CliError> {
    let data = match input {
        LoadedInput::Samples(d) => d,
        LoadedInput::Edges(_) => {
            return Err(Error::InvalidRecipe(
                "projection fitting needs sample coordinates, not an edge list".into(),
            )
            .into())
        }
    };
    let g = build_graph(data, &build_recipe(&r.recipe)?)?;
    let expansion = match expansion {
        ExpansionArg::None => None,
        ExpansionArg::Monomials1 => Some(Expansion::Monomials { degree: 1 }),
        ExpansionArg::Monomials2 => Some(Expansion::Monomials { degree: 2 }),
    };
    let model = lpp_fit(data, &g, m, expansion)?;
    let embedding = lpp_transform(&model, data)?;
    let embedding_text = format_embedding(&embedding);
    let model_text = model_out.map(|_| format_lpp_model(&model));
    let plot_text = match plot {
        Some(_) => Some(scatter_svg(embedding.coords.view(), None)?),
        None => None,
    };
    write_text(&r.output, &embedding_text)?;
    if let (Some(path), Some(text)) = (model_out, &model_text) {
        write_text(path, text)?;
    }
    if let (Some(path), Some(text)) = (plot, &plot_text) {
        write_text(path, text)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Metrics {
    inertia: f64,
    iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    ari_vs_reference: Option<f64>,
}

fn metrics_json(a: &ClusterAssignment, ari: Option<f64>) -> String {
    let metrics = Metrics {
        inertia: a.inertia,
        iterations: a.iterations,
        ari_vs_reference: ari,
    };
    let mut text = serde_json::to_string_pretty(&metrics).expect("metrics serialize");
    text.push('\n');
    text
}

fn cluster_cmd(
    r: &Resolved,
    input: &LoadedInput,
    clusters: usize,
    seed: u64,
    metrics: Option<&Path>,
    reference: Option<&Path>,
    plot: Option<&Path>,
) -> Result<(), CliError> {
    let g = obtain_graph(input, &r.recipe)?;
    let coords = spectral_coordinates(&g, clusters)?;
    let assignment = kmeans(&coords.samples(), clusters, seed)?;
    let labels_text = format_labels(&assignment.labels);
    let metrics_text = match metrics {
        Some(_) => {
            let ari = match reference {
                Some(path) => {
                    let reference_labels = read_labels(path)?;
                    Some(adjusted_rand_index(&assignment.labels, &reference_labels)?)
                }
                None => None,
            };
            Some(metrics_json(&assignment, ari))
        }
        None => None,
    };
    let plot_text = match plot {
        Some(_) => {
            // Plot at most the first two spectral coordinates, colored by
            // the assigned cluster.
            let rows = coords.coords.nrows().min(2);
            Some(scatter_svg(
                coords.coords.slice(s![..rows, ..]),
                Some(&assignment.labels),
            )?)
        }
        None => None,
    };
    write_text(&r.output, &labels_text)?;
    if let (Some(path), Some(text)) = (metrics, &metrics_text) {
        write_text(path, text)?;
    }
    if let (Some(path), Some(text)) = (plot, &plot_text) {
        write_text(path, text)?;
    }
    Ok(())
}

fn diffuse_cmd(
    r: &Resolved,
    input: &LoadedInput,
    h0_path: &Path,
    schedule: &Schedule,
) -> Result<(), CliError> {
    let g = obtain_graph(input, &r.recipe)?;
    let temperatures = read_vector(h0_path)?;
    if temperatures.len() != g.n_nodes() {
        return Err(Error::ShapeError(format!(
            "initial temperatures have {} entries but the graph has {} nodes",
            temperatures.len(),
            g.n_nodes()
        ))
        .into());
    }
    let l = laplacian(&g);
    let h0 = HeatState::initial(temperatures);
    let mut warned_unstable = false;
    let (times, states) = match schedule {
        Schedule::Analytic { times } => {
            let mut states = Vec::with_capacity(times.len());
            for &t in times {
                states.push(solve_analytic(&l, &h0, t)?.temperatures);
            }
            (times.clone(), states)
        }
        Schedule::Discrete {
            dt,
            steps,
            sample_every,
            policy,
        } => {
            let policy = match policy {
                PolicyArg::Reject => StabilityPolicy::Reject,
                PolicyArg::Proceed => StabilityPolicy::Proceed,
            };
            let mut times = vec![h0.time];
            let mut states = vec![h0.temperatures.clone()];
            let mut current = h0;
            let mut done = 0usize;
            while done < *steps {
                let chunk = (*sample_every).min(steps - done);
                let outcome = step_discrete_with(&l, &current, *dt, chunk, policy)?;
                warned_unstable = warned_unstable || outcome.unstable;
                current = outcome.state;
                done += chunk;
                times.push(current.time);
                states.push(current.temperatures.clone());
            }
            (times, states)
        }
    };
    let text = format_trajectory(&times, &states)?;
    write_text(&r.output, &text)?;
    if warned_unstable {
        eprintln!("warning: step size is at or beyond the divergence threshold; the trajectory may grow without bound");
    }
    Ok(())
}
