//! Machine- and human-readable reports.
//!
//! JSON key order follows struct field order, so the same inputs always give
//! byte-identical output. Every real number is rounded to 15 significant
//! digits before it is written, in both JSON and text form.

use std::fmt::Write as _;

use serde::Serialize;

use crate::assignments::{cross_check, enumerate_satisfying, pair_contexts, parity_witness, Constraint};
use crate::dsl::Scenario;
use crate::perspective::{exact_distribution, sample_from, Context};
use crate::scenario::Encoding;
use crate::sign::Sign;
use crate::TOLERANCE;

pub const TOOL: &str = "relfacts";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to 15 significant digits; magnitudes below 1e-15 become 0.
pub fn round15(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        return 0.0;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

/// The textual form used for numbers in every output mode.
pub fn format_number(x: f64) -> String {
    serde_json::to_string(&round15(x)).expect("finite numbers serialize")
}

fn rounded<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round15(*x))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub encoding: Encoding,
    pub seed: u64,
    pub shots: usize,
}

impl Meta {
    pub fn new(encoding: Encoding, seed: u64, shots: usize) -> Self {
        Meta {
            tool: TOOL,
            version: VERSION,
            encoding,
            seed,
            shots,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionEntry {
    pub tuple: Vec<Sign>,
    #[serde(serialize_with = "rounded")]
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tally {
    pub tuple: Vec<Sign>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductFrequencies {
    #[serde(serialize_with = "rounded")]
    pub plus: f64,
    #[serde(serialize_with = "rounded")]
    pub minus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingReport {
    pub shots: usize,
    pub seed: u64,
    pub tallies: Vec<Tally>,
    pub product_frequencies: ProductFrequencies,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextReport {
    pub name: String,
    pub labels: Vec<String>,
    pub distribution: Vec<DistributionEntry>,
    #[serde(serialize_with = "rounded")]
    pub expectation: f64,
    /// Every support tuple has the same product.
    pub deterministic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingReport>,
    #[serde(skip)]
    pub normalized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintEntry {
    pub name: String,
    pub labels: Vec<String>,
    pub parity: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckEntry {
    pub constraint: String,
    /// `None` when no context measures the constraint's three labels.
    pub context: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsoluteCheck {
    pub constraints: Vec<ConstraintEntry>,
    pub satisfying_count: usize,
    /// Names of the constraints whose product is contradictory.
    pub certificate: Option<Vec<String>>,
    pub verdict: Verdict,
    pub cross_check: Vec<CrossCheckEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub meta: Meta,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contexts: Option<Vec<ContextReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub absolute_check: Option<AbsoluteCheck>,
}

impl Report {
    /// True if any check in the report failed: a non-normalized distribution,
    /// a cross-check FAIL, or a constraint with no context to check it.
    pub fn has_failures(&self) -> bool {
        let bad_context = self.contexts.iter().flatten().any(|c| !c.normalized);
        let bad_check = self
            .absolute_check
            .as_ref()
            .is_some_and(|a| a.cross_check.iter().any(|r| !r.pass));
        bad_context || bad_check
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        render_text(self)
    }
}

pub fn context_report(c: &Context, sampling: Option<(usize, u64)>) -> ContextReport {
    let dist = exact_distribution(c);
    let sampling = sampling.map(|(shots, seed)| {
        let draws = sample_from(&dist, shots, seed);
        let tallies: Vec<Tally> = dist
            .entries
            .iter()
            .map(|e| Tally {
                tuple: e.outcomes.clone(),
                count: draws.iter().filter(|d| **d == e.outcomes).count(),
            })
            .collect();
        let plus = draws
            .iter()
            .filter(|d| Sign::product(d.iter().copied()) == Sign::Plus)
            .count();
        SamplingReport {
            shots,
            seed,
            tallies,
            product_frequencies: ProductFrequencies {
                plus: plus as f64 / shots as f64,
                minus: (shots - plus) as f64 / shots as f64,
            },
        }
    });
    ContextReport {
        name: c.name().to_string(),
        labels: dist.labels.clone(),
        distribution: dist
            .entries
            .iter()
            .map(|e| DistributionEntry {
                tuple: e.outcomes.clone(),
                probability: e.probability,
            })
            .collect(),
        expectation: dist.product_expectation(),
        deterministic: dist.deterministic_product().is_some(),
        sampling,
        normalized: (dist.total_probability() - 1.0).abs() < TOLERANCE,
    }
}

pub fn absolute_check(constraints: &[Constraint], contexts: &[Context]) -> AbsoluteCheck {
    let pairing = pair_contexts(constraints, contexts);
    let (paired_cs, paired_ctx): (Vec<Constraint>, Vec<Context>) = constraints
        .iter()
        .zip(&pairing)
        .filter_map(|(c, p)| p.map(|i| (c.clone(), contexts[i].clone())))
        .unzip();
    let checked = cross_check(&paired_cs, &paired_ctx).expect("pairs are matched by label");
    let mut rows = checked.rows.into_iter();
    let cross_check = constraints
        .iter()
        .zip(&pairing)
        .map(|(c, p)| match p {
            Some(_) => {
                let row = rows.next().expect("one row per paired constraint");
                CrossCheckEntry {
                    constraint: row.constraint,
                    context: Some(row.context),
                    pass: row.pass,
                }
            }
            None => CrossCheckEntry {
                constraint: c.name().to_string(),
                context: None,
                pass: false,
            },
        })
        .collect();
    let satisfying_count = enumerate_satisfying(constraints).len();
    AbsoluteCheck {
        constraints: constraints
            .iter()
            .map(|c| ConstraintEntry {
                name: c.name().to_string(),
                labels: c.labels().iter().map(ToString::to_string).collect(),
                parity: c.parity(),
            })
            .collect(),
        satisfying_count,
        certificate: parity_witness(constraints).map(|cert| {
            cert.members
                .iter()
                .map(|&i| constraints[i].name().to_string())
                .collect()
        }),
        verdict: if satisfying_count == 0 {
            Verdict::Unsat
        } else {
            Verdict::Sat
        },
        cross_check,
    }
}

/// Which parts of a full report to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sections {
    pub contexts: bool,
    pub sampling: bool,
    pub absolute: bool,
}

pub fn build_report(scenario: &Scenario, meta: Meta, sections: Sections) -> Report {
    let sampling = sections.sampling.then_some((meta.shots, meta.seed));
    let contexts = sections
        .contexts
        .then(|| scenario.contexts.iter().map(|c| context_report(c, sampling)).collect());
    let absolute_check = sections
        .absolute
        .then(|| absolute_check(&scenario.constraints, &scenario.contexts));
    Report {
        meta,
        contexts,
        absolute_check,
    }
}

fn table(rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..rows.first().map_or(0, Vec::len))
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        out.push_str("  ");
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn tuple_cells(t: &[Sign]) -> Vec<String> {
    t.iter().map(ToString::to_string).collect()
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let m = &r.meta;
    let _ = writeln!(
        out,
        "{} {}  encoding={}  seed={}  shots={}",
        m.tool, m.version, m.encoding, m.seed, m.shots
    );
    if let Some(contexts) = &r.contexts {
        out.push_str("\nContexts\n");
        let mut rows = vec![vec![
            "context".to_string(),
            "labels".to_string(),
            "expectation".to_string(),
            "deterministic".to_string(),
        ]];
        for c in contexts {
            rows.push(vec![
                c.name.clone(),
                c.labels.join(" "),
                format_number(c.expectation),
                if c.deterministic { "yes" } else { "no" }.to_string(),
            ]);
        }
        out.push_str(&table(&rows));
        for c in contexts {
            let _ = writeln!(out, "\nDistribution {}", c.name);
            let mut header = c.labels.clone();
            header.push("probability".into());
            let mut rows = vec![header];
            for e in &c.distribution {
                let mut row = tuple_cells(&e.tuple);
                row.push(format_number(e.probability));
                rows.push(row);
            }
            out.push_str(&table(&rows));
            if let Some(s) = &c.sampling {
                let _ = writeln!(out, "\nSamples {} (shots={} seed={})", c.name, s.shots, s.seed);
                let mut header = c.labels.clone();
                header.push("count".into());
                let mut rows = vec![header];
                for t in &s.tallies {
                    let mut row = tuple_cells(&t.tuple);
                    row.push(t.count.to_string());
                    rows.push(row);
                }
                out.push_str(&table(&rows));
                let _ = writeln!(
                    out,
                    "  product +1 frequency: {}\n  product -1 frequency: {}",
                    format_number(s.product_frequencies.plus),
                    format_number(s.product_frequencies.minus)
                );
            }
        }
    }
    if let Some(a) = &r.absolute_check {
        out.push_str("\nAbsolute assignments\n");
        let mut rows = vec![vec![
            "constraint".to_string(),
            "product".to_string(),
            "parity".to_string(),
            "context".to_string(),
            "cross-check".to_string(),
        ]];
        for (c, x) in a.constraints.iter().zip(&a.cross_check) {
            rows.push(vec![
                c.name.clone(),
                c.labels.join("*"),
                c.parity.to_string(),
                x.context.clone().unwrap_or_else(|| "-".into()),
                if x.pass { "PASS" } else { "FAIL" }.to_string(),
            ]);
        }
        out.push_str(&table(&rows));
        let _ = writeln!(out, "  satisfying assignments: {} of 64", a.satisfying_count);
        let cert = a
            .certificate
            .as_ref()
            .map_or_else(|| "none".to_string(), |c| c.join(", "));
        let _ = writeln!(out, "  parity certificate: {cert}");
        let verdict = match a.verdict {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
        };
        let _ = writeln!(out, "  verdict: {verdict}");
    }
    out
}
