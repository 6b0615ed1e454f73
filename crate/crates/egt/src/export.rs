//! CSV, DOT and metadata writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use egt_core::chain::TransitionMatrix;
use egt_core::game::{MetaGame, Provenance};
use egt_core::population::StateSpace;
use egt_core::simulator::{BatchAbsorption, Trajectory, PRNG_NAME};
use egt_core::solver::{AbsorptionResult, Rgb};
use serde::Serialize;

use crate::pipeline::{Analysis, Experiment};
use crate::{Error, Result};

pub const STATES_CSV: &str = "states.csv";
pub const B_MATRIX_CSV: &str = "b_matrix.csv";
pub const TRANSITIONS_CSV: &str = "transitions.csv";
pub const ABSORPTION_CSV: &str = "absorption.csv";
pub const TRAJECTORY_CSV: &str = "trajectory.csv";
pub const BATCH_CSV: &str = "batch_absorption.csv";
pub const STG_DOT: &str = "stg.dot";
pub const METADATA_JSON: &str = "run_metadata.json";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_probability(p: f64) -> String {
    format!("{p:.16e}")
}

pub fn states_csv(space: &StateSpace) -> String {
    let mut out = String::from("index");
    for m in 1..=space.strategies() {
        let _ = write!(out, ",s{m}");
    }
    out.push('\n');
    for (i, s) in space.states().iter().enumerate() {
        let _ = write!(out, "{i}");
        for c in s.counts() {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    out
}

pub fn b_matrix_csv(meta: &MetaGame) -> String {
    let mut out = meta.names().join(",");
    out.push('\n');
    for row in meta.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn transitions_csv(p: &TransitionMatrix) -> String {
    let mut out = String::from("from_index,to_index,probability\n");
    for (i, row) in p.rows().iter().enumerate() {
        for &(j, prob) in row {
            let _ = writeln!(out, "{i},{j},{}", format_probability(prob));
        }
    }
    out
}

pub fn absorption_csv(res: &AbsorptionResult, colors: &[Rgb]) -> String {
    let mut out = String::from("state_index");
    for k in 0..res.classes().len() {
        let _ = write!(out, ",class_{k}");
    }
    out.push_str(",r,g,b\n");
    for (i, (row, c)) in res.probs().iter().zip(colors).enumerate() {
        let _ = write!(out, "{i}");
        for &p in row {
            let _ = write!(out, ",{}", format_probability(p));
        }
        let _ = writeln!(out, ",{},{},{}", c.r, c.g, c.b);
    }
    out
}

pub fn trajectory_csv(t: &Trajectory) -> String {
    let m = t.states.first().map_or(3, |s| s.strategies());
    let mut out = String::from("generation");
    for k in 1..=m {
        let _ = write!(out, ",s{k}");
    }
    out.push('\n');
    for (j, s) in t.states.iter().enumerate() {
        let _ = write!(out, "{j}");
        for c in s.counts() {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    out
}

pub fn batch_csv(batch: &BatchAbsorption) -> String {
    let mut out = String::from("class_index,count,frequency\n");
    for (k, (&count, freq)) in batch
        .class_counts
        .iter()
        .zip(batch.frequencies())
        .enumerate()
    {
        let _ = writeln!(out, "{k},{count},{}", format_probability(freq));
    }
    let _ = writeln!(
        out,
        "non_absorbed,{},{}",
        batch.non_absorbed,
        format_probability(batch.non_absorbed as f64 / batch.runs as f64)
    );
    out
}

/// Rendering options for [`to_dot`].
#[derive(Debug, Clone, PartialEq)]
pub struct DotOptions {
    /// Draw self-loops.
    pub self_loops: bool,
    /// Layout units per player.
    pub scale: f64,
    /// Graph caption.
    pub label: String,
}

impl Default for DotOptions {
    fn default() -> Self {
        Self {
            self_loops: false,
            scale: 1.0,
            label: String::new(),
        }
    }
}

/// Node identifier `s_<s1>_<s2>_<s3>`.
pub fn node_id(counts: &[usize]) -> String {
    let mut id = String::from("s");
    for c in counts {
        let _ = write!(id, "_{c}");
    }
    id
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// State transition graph. Nodes sit at `(s1, s2)`, are filled with their
/// absorption color and appear in canonical order; edges follow in
/// canonical source then target order.
pub fn to_dot(p: &TransitionMatrix, colors: &[Rgb], options: &DotOptions) -> String {
    let space = p.space();
    let mut out = String::from("digraph stg {\n");
    let _ = writeln!(
        out,
        "  graph [label=\"{}\", outputorder=edgesfirst];",
        escape(&options.label)
    );
    out.push_str("  node [shape=circle, style=filled, fixedsize=true, width=0.25, label=\"\"];\n");
    out.push_str("  edge [arrowsize=0.5, fontsize=8];\n");
    for (s, color) in space.states().iter().zip(colors) {
        let x = s.count(0) as f64 * options.scale;
        let y = s.counts().get(1).map_or(0.0, |&c| c as f64 * options.scale);
        let _ = writeln!(
            out,
            "  {} [pos=\"{x},{y}!\", fillcolor=\"{}\"];",
            node_id(s.counts()),
            color.hex()
        );
    }
    for (i, row) in p.rows().iter().enumerate() {
        for &(j, prob) in row {
            if i == j && !options.self_loops {
                continue;
            }
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{prob:.4}\"];",
                node_id(space.state(i).counts()),
                node_id(space.state(j).counts())
            );
        }
    }
    out.push_str("}\n");
    out
}

/// Contents of `run_metadata.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub game: String,
    pub a: Option<f64>,
    pub strategies: Vec<String>,
    pub rounds: Option<u64>,
    pub players: usize,
    pub protocol: String,
    pub eta: Option<f64>,
    pub states: usize,
    pub prng: String,
    pub seed: Option<u64>,
    pub generations: Option<usize>,
    pub transient_states: Option<usize>,
    pub recurrent_classes: Option<Vec<Vec<usize>>>,
    pub absorbing_states: Option<Vec<usize>>,
    pub solve_residual: Option<f64>,
    pub files: Vec<String>,
}

impl RunMetadata {
    pub fn new(command: &str, exp: &Experiment) -> Self {
        let rounds = match exp.meta.provenance() {
            Provenance::Iterated { rounds, .. } => Some(*rounds),
            Provenance::Direct => None,
        };
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            game: exp.config.game.to_string(),
            a: exp.config.a,
            strategies: exp.meta.names().to_vec(),
            rounds,
            players: exp.space.players(),
            protocol: exp.protocol.short_name().into(),
            eta: exp.protocol.eta(),
            states: exp.space.len(),
            prng: PRNG_NAME.into(),
            seed: None,
            generations: None,
            transient_states: None,
            recurrent_classes: None,
            absorbing_states: None,
            solve_residual: None,
            files: Vec::new(),
        }
    }

    pub fn with_analysis(mut self, analysis: &Analysis) -> Self {
        self.transient_states = Some(analysis.classification.transient().len());
        self.recurrent_classes = Some(analysis.classification.recurrent_classes().to_vec());
        self.absorbing_states = Some(analysis.classification.absorbing_states());
        self.solve_residual = Some(analysis.absorption.residual());
        self
    }
}

/// Collects files and writes them, metadata last.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    written: Vec<String>,
}

impl ArtifactWriter {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| Error::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| Error::Write { path, source })?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Writes `run_metadata.json` listing every file written so far.
    pub fn finish(mut self, mut metadata: RunMetadata) -> Result<Vec<String>> {
        metadata.files = self.written.clone();
        let mut json = serde_json::to_string_pretty(&metadata)?;
        json.push('\n');
        self.write(METADATA_JSON, &json)?;
        Ok(self.written)
    }
}

/// Writes the full artifact set of an analyzed experiment.
pub fn export_all(
    command: &str,
    exp: &Experiment,
    analysis: &Analysis,
    dir: &Path,
) -> Result<Vec<String>> {
    let mut w = ArtifactWriter::create(dir)?;
    w.write(STATES_CSV, &states_csv(&exp.space))?;
    w.write(B_MATRIX_CSV, &b_matrix_csv(&exp.meta))?;
    w.write(TRANSITIONS_CSV, &transitions_csv(&analysis.transitions))?;
    w.write(
        ABSORPTION_CSV,
        &absorption_csv(&analysis.absorption, &analysis.colors),
    )?;
    let options = DotOptions {
        self_loops: exp.config.self_loops,
        scale: exp.config.scale,
        label: format!(
            "{} N={} {}",
            exp.config.game,
            exp.space.players(),
            exp.protocol
        ),
    };
    w.write(
        STG_DOT,
        &to_dot(&analysis.transitions, &analysis.colors, &options),
    )?;
    w.finish(RunMetadata::new(command, exp).with_analysis(analysis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    #[test]
    fn probability_format_round_trips() {
        for p in [1.0, 1.0 / 3.0, 2.0 / 3.0, 1e-300, 0.0] {
            let text = format_probability(p);
            assert_eq!(text.parse::<f64>().unwrap(), p);
        }
        assert_eq!(format_probability(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn small_files() {
        let exp = Experiment::new(&RunConfig::default()).unwrap();
        assert_eq!(
            b_matrix_csv(&exp.meta),
            "AllC,AllD,TitForTat\n3000,1000,3000\n4000,2000,2002\n3000,1999,3000\n"
        );
        let states = states_csv(&exp.space);
        assert!(states.starts_with("index,s1,s2,s3\n0,0,0,3\n1,0,1,2\n"));
        assert_eq!(states.lines().count(), 11);
    }

    #[test]
    fn dot_for_three_players() {
        let exp = Experiment::new(&RunConfig::default()).unwrap();
        let analysis = exp.analyze().unwrap();
        let dot = to_dot(
            &analysis.transitions,
            &analysis.colors,
            &DotOptions::default(),
        );
        assert!(dot.contains("  s_3_0_0 [pos=\"3,0!\", fillcolor=\"#FF0000\"];\n"));
        assert!(dot.contains("  s_0_0_3 [pos=\"0,0!\", fillcolor=\"#0000FF\"];\n"));
        assert!(dot.contains("  s_1_1_1 -> s_0_2_1 [label=\"0.3333\"];\n"));
        assert!(!dot.contains("s_3_0_0 -> "));
        assert_eq!(dot.matches("fillcolor").count(), 10);
        let with_loops = to_dot(
            &analysis.transitions,
            &analysis.colors,
            &DotOptions {
                self_loops: true,
                ..DotOptions::default()
            },
        );
        assert!(with_loops.contains("  s_3_0_0 -> s_3_0_0 [label=\"1.0000\"];\n"));
    }

    #[test]
    fn single_player_graph_has_no_edges() {
        let cfg = RunConfig {
            players: 1,
            ..RunConfig::default()
        };
        let exp = Experiment::new(&cfg).unwrap();
        let analysis = exp.analyze().unwrap();
        let dot = to_dot(
            &analysis.transitions,
            &analysis.colors,
            &DotOptions::default(),
        );
        assert_eq!(dot.matches(" -> ").count(), 0);
        assert_eq!(dot.matches("fillcolor=").count(), 3);
    }
}
