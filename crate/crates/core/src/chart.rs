//! Self-contained SVG 1.1 bar charts with deterministic output.

use std::fmt::Write as _;

use crate::coupling::{HistogramBin, SymptomCoupling};
use crate::model::SYMPTOM_NAMES;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 90.0;

/// Plot height in pixels; the tallest bar spans it exactly.
pub const PLOT_HEIGHT: f64 = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

#[derive(Debug, Clone, PartialEq)]
pub struct Bar {
    pub label: String,
    pub value: u64,
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
    out
}

/// Vertical bar chart, bars in the given order.
pub fn bar_chart(title: &str, x_label: &str, y_label: &str, bars: &[Bar]) -> String {
    let max = bars.iter().map(|b| b.value).max().unwrap_or(0).max(1) as f64;
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let slot = if bars.is_empty() {
        plot_w
    } else {
        plot_w / bars.len() as f64
    };
    let bar_w = slot * 0.7;
    let base_y = MARGIN_TOP + PLOT_HEIGHT;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{base_y}\" x2=\"{:.2}\" y2=\"{base_y}\" stroke=\"black\"/>",
        WIDTH - MARGIN_RIGHT
    );
    let _ = writeln!(
        s,
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{base_y}\" stroke=\"black\"/>"
    );
    for (i, b) in bars.iter().enumerate() {
        let h = b.value as f64 / max * PLOT_HEIGHT;
        let x = MARGIN_LEFT + i as f64 * slot + (slot - bar_w) / 2.0;
        let y = base_y - h;
        let cx = x + bar_w / 2.0;
        let _ = writeln!(
            s,
            "<rect class=\"bar\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{bar_w:.2}\" height=\"{h:.2}\" fill=\"steelblue\"><title>{}: {}</title></rect>",
            escape(&b.label),
            b.value
        );
        let _ = writeln!(
            s,
            "<text x=\"{cx:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            y - 4.0,
            b.value
        );
        let _ = writeln!(
            s,
            "<text x=\"{cx:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\" transform=\"rotate(-40 {cx:.2} {:.2})\">{}</text>",
            base_y + 14.0,
            base_y + 14.0,
            escape(&b.label)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 8.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{}</text>",
        MARGIN_TOP + PLOT_HEIGHT / 2.0,
        MARGIN_TOP + PLOT_HEIGHT / 2.0,
        escape(y_label)
    );
    s.push_str("</svg>\n");
    s
}

pub fn cbo_histogram_chart(bins: &[HistogramBin]) -> String {
    let bars: Vec<Bar> = bins
        .iter()
        .map(|b| Bar {
            label: format!("CBO {}", b.cbo),
            value: b.patients as u64,
        })
        .collect();
    bar_chart(
        "Histogram of CBO metric",
        "CBO metric value",
        "Number of patients",
        &bars,
    )
}

/// Patients per symptom, in symptom order. Stands in for the coupling
/// results figure, whose content is not recoverable.
pub fn symptom_count_chart(rows: &[SymptomCoupling]) -> String {
    let mut rows: Vec<&SymptomCoupling> = rows.iter().collect();
    rows.sort_by_key(|r| r.symptom_index);
    let bars: Vec<Bar> = rows
        .iter()
        .map(|r| Bar {
            label: format!("{} ({})", SYMPTOM_NAMES[r.symptom_index - 1], r.symptom_index),
            value: r.count as u64,
        })
        .collect();
    bar_chart(
        "Single symptom coupling counts (stand-in for coupling results)",
        "Symptom",
        "Number of patients",
        &bars,
    )
}

/// Extracts `(label, value)` from the `<title>` of every bar.
pub fn bar_values(svg: &str) -> Vec<(String, u64)> {
    svg.lines()
        .filter(|l| l.starts_with("<rect class=\"bar\""))
        .filter_map(|l| {
            let start = l.find("<title>")? + "<title>".len();
            let end = l.find("</title>")?;
            let (label, value) = l[start..end].rsplit_once(": ")?;
            Some((label.to_string(), value.parse().ok()?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{cbo, cbo_histogram, single_symptom_coupling};
    use crate::model::table1;

    #[test]
    fn histogram_bars() {
        let svg = cbo_histogram_chart(&cbo_histogram(&cbo(&table1()).unwrap()));
        let vals: Vec<u64> = bar_values(&svg).into_iter().map(|(_, v)| v).collect();
        assert_eq!(vals, vec![4, 6, 10]);
        assert!(svg.contains("height=\"260.00\""));
        assert_eq!(svg, cbo_histogram_chart(&cbo_histogram(&cbo(&table1()).unwrap())));
    }

    #[test]
    fn symptom_bars() {
        let svg = symptom_count_chart(&single_symptom_coupling(&table1()).unwrap());
        let vals = bar_values(&svg);
        assert_eq!(vals.len(), 10);
        let tallest = vals.iter().max_by_key(|(_, v)| *v).unwrap();
        assert_eq!(tallest, &("Sweating (6)".to_string(), 14));
    }

    #[test]
    fn escapes_markup() {
        let svg = bar_chart(
            "a<b",
            "x",
            "y",
            &[Bar {
                label: "&".into(),
                value: 1,
            }],
        );
        assert!(svg.contains("a&lt;b") && svg.contains("&amp;: 1"));
    }
}
