//! Static HTML report. The factor tree uses `<details>` elements, so the page
//! collapses and expands without scripts and loads nothing from the network.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::ReportMeta;
use crate::assessment::{AssessmentResult, FactorNode, Grade, MeasureValue, UtilityInterval};
use crate::model::{FactorKind, Polarity};

const STYLE: &str = r#"
body { font-family: system-ui, sans-serif; margin: 2em; color: #222; }
h1 { font-size: 1.4em; }
ul.tree { list-style: none; padding-left: 1.2em; }
summary { cursor: pointer; padding: 2px 0; }
.badge { display: inline-block; min-width: 4.5em; padding: 1px 6px; border-radius: 4px; color: #fff; font-weight: bold; text-align: center; }
.grade-1 { background: #1a7f37; } .grade-2 { background: #4c9a2a; } .grade-3 { background: #a0a02a; }
.grade-4 { background: #c67c00; } .grade-5 { background: #c24e00; } .grade-6 { background: #b00020; }
.bar { display: inline-block; position: relative; width: 120px; height: 10px; background: #eee; vertical-align: middle; margin: 0 6px; }
.bar span { position: absolute; top: 0; height: 10px; background: #3a6ea5; min-width: 2px; }
.low-confidence > summary { font-style: italic; }
.flag { color: #b00020; font-size: 0.85em; margin-left: 4px; }
.kind { color: #777; font-size: 0.85em; }
.ref { color: #555; }
table { border-collapse: collapse; margin: 4px 0 8px 1.2em; font-size: 0.9em; }
td, th { border: 1px solid #ccc; padding: 2px 6px; text-align: left; }
"#;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

fn anchor(id: &str) -> String {
    format!("f-{}", escape(id))
}

/// `1 (1.87)`: discrete grade with the continuous value.
pub(crate) fn grade_label(g: &Grade) -> String {
    format!("{} ({:.2})", g.discrete, g.continuous)
}

fn badge(g: &Grade) -> String {
    format!("<span class=\"badge grade-{}\">{}</span>", g.discrete, grade_label(g))
}

fn bar(u: &UtilityInterval) -> String {
    let left = 100.0 * u.lo;
    let width = 100.0 * u.width();
    format!(
        "<span class=\"bar\" title=\"[{:.4}, {:.4}]\"><span style=\"left:{left:.2}%;width:{width:.2}%\"></span></span>",
        u.lo, u.hi
    )
}

fn measure_table(out: &mut String, node: &FactorNode) {
    if node.measures.is_empty() {
        return;
    }
    out.push_str("<table><tr><th>Measure</th><th>Weight</th><th>Value</th><th>Utility</th></tr>");
    for m in &node.measures {
        let value = match m.value {
            MeasureValue::Present(v) => format!("{v:e}"),
            MeasureValue::Missing => "missing".to_string(),
        };
        let _ = write!(
            out,
            "<tr><td>{}</td><td>{:.4}</td><td>{}</td><td>[{:.4}, {:.4}]</td></tr>",
            escape(&m.measure_id),
            m.weight,
            value,
            m.utility.lo,
            m.utility.hi
        );
    }
    out.push_str("</table>");
}

struct Renderer<'a> {
    result: &'a AssessmentResult,
    rendered: BTreeSet<&'a str>,
    out: String,
}

impl<'a> Renderer<'a> {
    fn node(&mut self, id: &'a str, weight: Option<(f64, Polarity)>) {
        let Some(node) = self.result.nodes.get(id) else { return };
        let prefix = match weight {
            Some((w, Polarity::Negative)) => format!("<span class=\"kind\">w={w:.4}, negative</span> "),
            Some((w, Polarity::Positive)) => format!("<span class=\"kind\">w={w:.4}</span> "),
            None => String::new(),
        };
        if !self.rendered.insert(id) {
            let _ = write!(
                self.out,
                "<li class=\"ref\">{prefix}{} <a href=\"#{}\">{}</a></li>",
                badge(&node.grade),
                anchor(id),
                escape(&node.name)
            );
            return;
        }
        let kind = match node.kind {
            FactorKind::QualityAspect => "quality aspect",
            FactorKind::ProductFactor => "product factor",
        };
        let class = if node.low_confidence() { " class=\"low-confidence\"" } else { "" };
        let flag = if node.low_confidence() {
            format!("<span class=\"flag\">low confidence, width {:.2}</span>", node.utility.width())
        } else {
            String::new()
        };
        let _ = write!(
            self.out,
            "<li id=\"{}\" data-factor=\"{}\"><details open{class}><summary>{prefix}{}{}<b>{}</b> <span class=\"kind\">{kind}</span>{flag}</summary>",
            anchor(id),
            escape(id),
            badge(&node.grade),
            bar(&node.utility),
            escape(&node.name),
        );
        measure_table(&mut self.out, node);
        if !node.children.is_empty() {
            self.out.push_str("<ul class=\"tree\">");
            for c in &node.children {
                self.node(&c.factor_id, Some((c.weight, c.polarity)));
            }
            self.out.push_str("</ul>");
        }
        self.out.push_str("</details></li>");
    }
}

/// Renders a single self-contained HTML page.
pub fn to_html(result: &AssessmentResult, meta: &ReportMeta) -> String {
    let mut r = Renderer { result, rendered: BTreeSet::new(), out: String::new() };
    let title = format!("Quality assessment: {} {}", result.system_name, result.system_version);
    let _ = write!(
        r.out,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n<style>{STYLE}</style>\n</head>\n<body>\n<h1>{}</h1>\n<p>Models: {} &middot; generated {}</p>\n<ul class=\"tree\">",
        escape(&title),
        escape(&title),
        escape(&result.models.join(", ")),
        escape(&meta.generated_at),
    );
    for root in &result.roots {
        r.node(root, None);
    }
    r.out.push_str("</ul>\n<h2>Measures</h2>\n<table><tr><th>Factor</th><th>Measure</th><th>Weight</th><th>Value</th><th>Utility</th></tr>");
    for (id, node) in &result.nodes {
        for m in &node.measures {
            let value = match m.value {
                MeasureValue::Present(v) => format!("{v:e}"),
                MeasureValue::Missing => "missing".to_string(),
            };
            let _ = write!(
                r.out,
                "<tr><td><a href=\"#{}\">{}</a></td><td>{}</td><td>{:.4}</td><td>{}</td><td>[{:.4}, {:.4}]</td></tr>",
                anchor(id),
                escape(id),
                escape(&m.measure_id),
                m.weight,
                value,
                m.utility.lo,
                m.utility.hi
            );
        }
    }
    r.out.push_str("</table>\n</body>\n</html>\n");
    r.out
}
