//! Text and CSV renderings of proposition reports.

use std::fmt::Write as _;
use std::path::Path;

use egt_core::checker::{
    check_prop1, check_prop2, BestStrategyCriterion, PropositionReport, Violation,
};
use egt_core::game::MetaGame;

use crate::export::{format_probability, ArtifactWriter};
use crate::Result;

pub const PROP1_TXT: &str = "prop1_report.txt";
pub const PROP1_CSV: &str = "prop1_violations.csv";
pub const PROP2_TXT: &str = "prop2_report.txt";
pub const PROP2_CSV: &str = "prop2_violations.csv";
pub const PROP2_FINDINGS_CSV: &str = "prop2_findings.csv";

fn one_based(strategies: &[usize]) -> String {
    strategies
        .iter()
        .map(|m| (m + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn counts_csv(counts: &[usize]) -> String {
    counts
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// `players,s1,s2,s3,kind,expected,observed,absorbing,probability`; strategy
/// sets are 1-based and space separated.
pub fn violations_csv(reports: &[PropositionReport]) -> String {
    let mut out = String::from("players,s1,s2,s3,kind,expected,observed,absorbing,probability\n");
    for report in reports {
        for v in &report.violations {
            let state = counts_csv(v.state().counts());
            let tail = match v {
                Violation::BestStrategy {
                    expected, observed, ..
                } => {
                    format!(
                        "best_strategy,{},{},,",
                        one_based(expected),
                        one_based(observed)
                    )
                }
                Violation::AbsorbingSet { absorbing, .. } => {
                    format!("absorbing_set,,,{absorbing},")
                }
                Violation::GreenAbsorption { probability, .. } => {
                    format!("green_absorption,,,,{}", format_probability(*probability))
                }
            };
            let _ = writeln!(out, "{},{state},{tail}", report.players);
        }
    }
    out
}

/// `players,s1,s2,s3,in_s1,in_s2,green_probability`.
pub fn findings_csv(reports: &[PropositionReport]) -> String {
    let mut out = String::from("players,s1,s2,s3,in_s1,in_s2,green_probability\n");
    for report in reports {
        for f in &report.findings {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                report.players,
                counts_csv(f.state.counts()),
                f.in_s1,
                f.in_s2,
                format_probability(f.probability)
            );
        }
    }
    out
}

/// Concatenated text reports separated by blank lines.
pub fn text_report(reports: &[PropositionReport]) -> String {
    reports
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Reports for both propositions over a range of `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropositionRun {
    pub prop1: Vec<PropositionReport>,
    pub prop2: Vec<PropositionReport>,
}

impl PropositionRun {
    pub fn new(
        players: &[usize],
        rounds: u64,
        meta: &MetaGame,
        criterion: BestStrategyCriterion,
    ) -> Result<Self> {
        let mut prop1 = Vec::with_capacity(players.len());
        let mut prop2 = Vec::with_capacity(players.len());
        for &n in players {
            prop1.push(check_prop1(n, rounds, meta, criterion)?);
            prop2.push(check_prop2(n, meta)?);
        }
        Ok(Self { prop1, prop2 })
    }

    pub fn prop1_passed(&self) -> bool {
        self.prop1.iter().all(|r| r.passed)
    }

    pub fn prop2_passed(&self) -> bool {
        self.prop2.iter().all(|r| r.passed)
    }

    /// One line per proposition and `N`.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in self.prop1.iter().chain(&self.prop2) {
            let _ = writeln!(
                out,
                "prop{} N={:>3}: {} ({} violations over {} states)",
                r.proposition.number(),
                r.players,
                if r.passed { "PASS" } else { "FAIL" },
                r.violations.len(),
                r.states_checked
            );
        }
        out
    }

    /// Writes the text reports and CSVs into `writer`.
    pub fn write(&self, writer: &mut ArtifactWriter) -> Result<()> {
        writer.write(PROP1_TXT, &text_report(&self.prop1))?;
        writer.write(PROP1_CSV, &violations_csv(&self.prop1))?;
        writer.write(PROP2_TXT, &text_report(&self.prop2))?;
        writer.write(PROP2_CSV, &violations_csv(&self.prop2))?;
        writer.write(PROP2_FINDINGS_CSV, &findings_csv(&self.prop2))?;
        Ok(())
    }

    /// Writes the reports into `dir` without metadata.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        self.write(&mut ArtifactWriter::create(dir)?)
    }
}
