//! Versioned analysis reports: a structured JSON document and a
//! deterministic plain-text rendering assembled from the same data. Every
//! number in a report is taken from a domain struct produced by one
//! operation of the other modules; this module only formats.

use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use crate::coverings::{genus, CoveringData, HurwitzCount};
use crate::families::{Claim, FamilyOutcome, FamilyParams};
use crate::graphs::{PrymCertificate, PrymGraph, QuadSurd, Spectrum, SrgParams};
use crate::prym::{DimensionReport, FixedPointReport};
use crate::splitting::{ConversionReport, FiberProductReport, SplitResult};

pub const SCHEMA_VERSION: u64 = 1;

/// Output format selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

/// One report under assembly. Sections append both a JSON fragment and the
/// matching text lines, so the two renderings always agree.
#[derive(Debug)]
pub struct Report {
    command: String,
    body: Map<String, Value>,
    lines: Vec<String>,
    warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            command: command.to_string(),
            body: Map::new(),
            lines: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.body.insert(key.to_string(), value);
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn warn(&mut self, text: impl Into<String>) {
        self.warnings.push(text.into());
    }

    pub fn has_warnings(&self) -> bool {
        !self.warnings.is_empty()
    }

    /// Renders the finished report. Identical inputs produce identical bytes.
    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                let mut root = Map::new();
                root.insert("schema_version".into(), json!(SCHEMA_VERSION));
                root.insert("command".into(), json!(self.command));
                for (key, value) in &self.body {
                    root.insert(key.clone(), value.clone());
                }
                root.insert("warnings".into(), json!(self.warnings));
                let mut text = serde_json::to_string_pretty(&Value::Object(root))
                    .expect("report values serialize");
                text.push('\n');
                text
            }
            ReportFormat::Text => {
                let mut out = format!("prymlab report v{SCHEMA_VERSION}: {}\n", self.command);
                for line in &self.lines {
                    out.push_str(line);
                    out.push('\n');
                }
                for warning in &self.warnings {
                    out.push_str("warning: ");
                    out.push_str(warning);
                    out.push('\n');
                }
                out
            }
        }
    }
}

fn surd_value(value: &QuadSurd) -> Value {
    match value.as_integer() {
        Some(n) => json!(n),
        None => json!(value.to_string()),
    }
}

fn eigenvalue_text(value: &QuadSurd) -> String {
    match value.as_integer() {
        Some(n) if n >= 0 => n.to_string(),
        _ => format!("({value})"),
    }
}

fn spectrum_text(spectrum: &Spectrum) -> String {
    format!(
        "{}^{} {}^{} {}^{}",
        spectrum.k,
        spectrum.mult_k,
        eigenvalue_text(&spectrum.r_plus),
        spectrum.m_plus,
        eigenvalue_text(&spectrum.r_minus),
        spectrum.m_minus
    )
}

/// Graph section: parameters, spectrum, and the certificate or the reason
/// certification failed.
pub fn graph_section(
    report: &mut Report,
    graph: &PrymGraph,
    params: &SrgParams,
    spectrum: &Spectrum,
    group_order: Option<&BigUint>,
    certificate: &Result<PrymCertificate, String>,
) {
    let cert_value = match certificate {
        Ok(cert) => json!({
            "k": cert.k,
            "r_plus": cert.r_plus,
            "r_minus": cert.r_minus,
            "c": cert.c,
        }),
        Err(reason) => json!({ "failed": reason }),
    };
    report.set(
        "graph",
        json!({
            "label": graph.label,
            "vertices": params.d,
            "parameters": { "d": params.d, "k": params.k, "lambda": params.lambda, "mu": params.mu },
            "spectrum": {
                "k": spectrum.k,
                "mult_k": spectrum.mult_k,
                "r_plus": surd_value(&spectrum.r_plus),
                "r_minus": surd_value(&spectrum.r_minus),
                "m_plus": spectrum.m_plus,
                "m_minus": spectrum.m_minus,
                "integral": spectrum.is_integral(),
            },
            "group_order": group_order.map(|o| o.to_string()),
            "certificate": cert_value,
        }),
    );
    report.line(format!("graph: {}", graph.label));
    report.line(format!(
        "  parameters: ({}, {}, {}, {})",
        params.d, params.k, params.lambda, params.mu
    ));
    report.line(format!("  spectrum: {}", spectrum_text(spectrum)));
    if let Some(order) = group_order {
        report.line(format!("  generated group order: {order}"));
    }
    match certificate {
        Ok(cert) => report.line(format!(
            "  certificate: k = {}, r_plus = {}, r_minus = {}, c = {}",
            cert.k, cert.r_plus, cert.r_minus, cert.c
        )),
        Err(reason) => report.line(format!("  certificate: unavailable ({reason})")),
    }
    if !spectrum.is_integral() {
        report.warn("the graph spectrum is not integral, so no correspondence matrix exists");
    }
}

/// Covering section: degree, branch count, and genus.
pub fn covering_section(report: &mut Report, covering: &CoveringData) {
    let g = genus(covering);
    report.set(
        "covering",
        json!({
            "degree": covering.degree(),
            "branch_points": covering.branch_points().len(),
            "genus": g,
        }),
    );
    report.line(format!(
        "covering: degree {}, {} branch points, genus {}",
        covering.degree(),
        covering.branch_points().len(),
        g
    ));
}

/// Analysis section: the dimension report plus the nonempty fixed-point sets.
pub fn analysis_section(
    report: &mut Report,
    analysis: &DimensionReport,
    fixed: &FixedPointReport,
) {
    let sets: Vec<Value> = fixed
        .per_cycle
        .iter()
        .filter(|cycle| !cycle.sets.is_empty())
        .map(|cycle| {
            json!({
                "branch": cycle.branch_label,
                "cycle_start": cycle.cycle[0] + 1,
                "order": cycle.order,
                "sets": cycle.sets.iter().map(|(s, ts)| json!([s, ts])).collect::<Vec<_>>(),
            })
        })
        .collect();
    report.set(
        "analysis",
        json!({
            "genus": analysis.genus,
            "fixed_point_free": analysis.fixed_point_free,
            "intersection_number": analysis.intersection,
            "d_plus": analysis.d_plus,
            "d_minus": analysis.d_minus,
            "exponent": analysis.exponent,
            "prym_tyurin": analysis.prym_tyurin,
            "eta": analysis.eta,
            "d_zero": analysis.d0,
            "diagonal": analysis.s_diag,
            "fixed_point_sets": sets,
        }),
    );
    report.line("analysis:".to_string());
    report.line(format!("  genus: {}", analysis.genus));
    report.line(format!("  fixed_point_free: {}", analysis.fixed_point_free));
    report.line(format!("  intersection_number: {}", analysis.intersection));
    report.line(format!("  d_plus: {}", analysis.d_plus));
    report.line(format!("  d_minus: {}", analysis.d_minus));
    match analysis.exponent {
        Some(e) => report.line(format!("  exponent: {e}")),
        None => report.line("  exponent: none".to_string()),
    }
    report.line(format!("  prym_tyurin: {}", analysis.prym_tyurin));
    for cycle in fixed.per_cycle.iter().filter(|c| !c.sets.is_empty()) {
        let sets: Vec<String> = cycle
            .sets
            .iter()
            .map(|(s, ts)| {
                let ts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                format!("value {s} at powers {{{}}}", ts.join(", "))
            })
            .collect();
        report.line(format!(
            "  fixed points on branch {} (cycle at {}): {}",
            cycle.branch_label,
            cycle.cycle[0] + 1,
            sets.join("; ")
        ));
    }
}

/// Split section: block structure, quotient covering summary, flags, and
/// the classical dimension pair when the blocks are complete.
pub fn split_section(report: &mut Report, split: &SplitResult, dims: Option<(i64, i64)>) {
    let quotient_genus = split.genus_quotient;
    report.set(
        "split",
        json!({
            "blocks": split.blocks.len(),
            "relative_degree": split.relative_degree,
            "quotient": {
                "degree": split.block_covering.degree(),
                "branch_points": split.block_covering.branch_points().len(),
                "genus": quotient_genus,
            },
            "simple": split.simple,
            "complete_blocks": split.complete_blocks,
            "d_plus": dims.map(|(p, _)| p),
            "d_minus": dims.map(|(_, m)| m),
        }),
    );
    report.line(format!(
        "split: {} blocks of size {}, quotient degree {} with {} branch points, quotient genus {}",
        split.blocks.len(),
        split.relative_degree,
        split.block_covering.degree(),
        split.block_covering.branch_points().len(),
        quotient_genus
    ));
    report.line(format!(
        "  simple: {}, complete blocks: {}",
        split.simple, split.complete_blocks
    ));
    if let Some((d_plus, d_minus)) = dims {
        report.line(format!("  d_plus: {d_plus}, d_minus: {d_minus}"));
    }
}

/// Fiber-product section: the two coordinate coverings and the group
/// certificates.
pub fn fiber_section(report: &mut Report, fiber: &FiberProductReport) {
    report.set(
        "fiber_product",
        json!({
            "first": { "degree": fiber.first.degree(), "genus": fiber.genus_first },
            "second": { "degree": fiber.second.degree(), "genus": fiber.genus_second },
            "order_monodromy": fiber.order_monodromy.to_string(),
            "order_first_stabilizer": fiber.order_first.to_string(),
            "order_second_stabilizer": fiber.order_second.to_string(),
            "order_intersection": fiber.order_intersection.to_string(),
            "intersection_is_point_stabilizer": fiber.intersection_is_point_stabilizer,
            "join_is_monodromy": fiber.join_is_monodromy,
            "d_plus": fiber.d_plus,
            "d_plus_matches": fiber.d_plus_matches,
        }),
    );
    report.line(format!(
        "fiber product: first degree {} genus {}, second degree {} genus {}",
        fiber.first.degree(),
        fiber.genus_first,
        fiber.second.degree(),
        fiber.genus_second
    ));
    report.line(format!(
        "  orders: monodromy {}, stabilizers {} and {}, intersection {}",
        fiber.order_monodromy, fiber.order_first, fiber.order_second, fiber.order_intersection
    ));
    report.line(format!(
        "  certificates: intersection is point stabilizer: {}, join is monodromy: {}",
        fiber.intersection_is_point_stabilizer, fiber.join_is_monodromy
    ));
    report.line(format!(
        "  d_plus: {} (matches quotient genera: {})",
        fiber.d_plus, fiber.d_plus_matches
    ));
}

/// Conversion section: direction, level split, and the preserved dimensions.
pub fn conversion_section(
    report: &mut Report,
    direction: &str,
    conversion: Option<&ConversionReport>,
    before: &DimensionReport,
    after: &DimensionReport,
) {
    let mut value = json!({
        "direction": direction,
        "before": { "genus": before.genus, "d_plus": before.d_plus, "d_minus": before.d_minus },
        "after": { "genus": after.genus, "d_plus": after.d_plus, "d_minus": after.d_minus },
    });
    if let Some(conv) = conversion {
        value["l1"] = json!(conv.l1);
        value["l2"] = json!(conv.l2);
    }
    report.set("conversion", value);
    report.line(format!("conversion: {direction}"));
    if let Some(conv) = conversion {
        report.line(format!("  levels: l1 = {}, l2 = {}", conv.l1, conv.l2));
    }
    report.line(format!(
        "  before: genus {}, d_plus {}, d_minus {}",
        before.genus, before.d_plus, before.d_minus
    ));
    report.line(format!(
        "  after: genus {}, d_plus {}, d_minus {}",
        after.genus, after.d_plus, after.d_minus
    ));
}

/// Class-counting section.
pub fn hurwitz_section(report: &mut Report, filter: &str, count: &HurwitzCount) {
    report.set(
        "hurwitz",
        json!({
            "filter": filter,
            "tuples": count.tuples,
            "classes": count.classes,
            "search_cost": count.search_cost.to_string(),
        }),
    );
    report.line(format!(
        "hurwitz count: {} tuples, {} classes (filter {filter}, search cost {})",
        count.tuples, count.classes, count.search_cost
    ));
}

fn params_text(params: &FamilyParams) -> String {
    let mut parts = Vec::new();
    if let Some(n) = params.n {
        parts.push(format!("n = {n}"));
    }
    if let Some(l) = params.l {
        parts.push(format!("l = {l}"));
    }
    if let Some(l1) = params.l1 {
        parts.push(format!("l1 = {l1}"));
    }
    if let Some(l2) = params.l2 {
        parts.push(format!("l2 = {l2}"));
    }
    if let Some(m) = params.m {
        parts.push(format!("m = {m}"));
    }
    if parts.is_empty() {
        "none".to_string()
    } else {
        parts.join(", ")
    }
}

/// Claim list with one PASS/FAIL line per quantity.
pub fn claims_section(report: &mut Report, claims: &[Claim]) -> bool {
    let values: Vec<Value> = claims
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "expected": c.expected,
                "actual": c.actual,
                "pass": c.passed(),
            })
        })
        .collect();
    report.set("claims", json!(values));
    let mut all = true;
    for c in claims {
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        all &= c.passed();
        report.line(format!(
            "claim {}: expected {}, actual {}: {verdict}",
            c.name, c.expected, c.actual
        ));
    }
    report.set("all_claims_pass", json!(all));
    report.line(format!("result: {}", if all { "PASS" } else { "FAIL" }));
    all
}

/// Full example section: header, analysis, optional split and fiber
/// sections, claims, and the family warnings. Returns whether every claim
/// passed.
pub fn example_section(report: &mut Report, outcome: &FamilyOutcome) -> bool {
    report.set(
        "example",
        json!({
            "id": outcome.id.token(),
            "title": outcome.id.title(),
            "params": outcome.params,
        }),
    );
    report.line(format!("example {}: {}", outcome.id.token(), outcome.id.title()));
    report.line(format!("params: {}", params_text(&outcome.params)));
    covering_section(report, outcome.triple.covering());
    analysis_section(report, &outcome.analysis, &outcome.fixed);
    if let Some(split) = &outcome.split {
        let dims = if split.complete_blocks {
            crate::splitting::classical_prym_dims(split, outcome.analysis.genus).ok()
        } else {
            None
        };
        split_section(report, split, dims);
    }
    if let Some(fiber) = &outcome.fiber {
        fiber_section(report, fiber);
    }
    for warning in &outcome.warnings {
        report.warn(warning.clone());
    }
    claims_section(report, &outcome.claims)
}
