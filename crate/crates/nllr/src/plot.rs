//! Training-curve rendering as standalone SVG 1.1 documents.
//!
//! Two panels side by side, loss on the left and accuracy on the right,
//! each with a train and a test series, axis labels, ticks, and a shared
//! legend. The output is a pure function of the input rows: no timestamps,
//! no randomness, fixed float formatting.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::train::MetricsRow;

const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 48.0;
const PANEL_GAP: f64 = 48.0;
const PANEL_HEIGHT: f64 = 260.0;
const MIN_PLOT_WIDTH: f64 = 300.0;
const TRAIN_COLOR: &str = "#1f6fb2";
const TEST_COLOR: &str = "#d1495b";

struct Scale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        if self.d1 == self.d0 {
            (self.r0 + self.r1) / 2.0
        } else {
            self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
        }
    }
}

struct Panel<'a> {
    x0: f64,
    title: &'a str,
    y_domain: (f64, f64),
    tick_decimals: usize,
    values: &'a dyn Fn(&MetricsRow) -> (f64, f64),
}

fn emit_panel(out: &mut String, rows: &[MetricsRow], plot_w: f64, panel: &Panel) {
    let x = Scale {
        d0: rows[0].epoch as f64,
        d1: rows[rows.len() - 1].epoch as f64,
        r0: panel.x0,
        r1: panel.x0 + plot_w,
    };
    let y = Scale {
        d0: panel.y_domain.0,
        d1: panel.y_domain.1,
        r0: MARGIN_TOP + PANEL_HEIGHT,
        r1: MARGIN_TOP,
    };

    let _ = write!(
        out,
        r##"<rect x="{:.2}" y="{:.2}" width="{plot_w:.2}" height="{PANEL_HEIGHT:.2}" fill="none" stroke="#444" stroke-width="1"/>"##,
        panel.x0, MARGIN_TOP
    );
    let _ = write!(
        out,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-weight="bold">{}</text>"##,
        panel.x0 + plot_w / 2.0,
        MARGIN_TOP - 12.0,
        panel.title
    );

    for t in 0..5 {
        let v = y.d0 + (y.d1 - y.d0) * t as f64 / 4.0;
        let py = y.map(v);
        let _ = write!(
            out,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd" stroke-width="1"/>"##,
            panel.x0,
            panel.x0 + plot_w
        );
        let _ = write!(
            out,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.prec$}</text>"##,
            panel.x0 - 6.0,
            py + 4.0,
            v,
            prec = panel.tick_decimals
        );
    }

    let mut tick_epochs = vec![rows[0].epoch];
    for e in [rows[rows.len() / 2].epoch, rows[rows.len() - 1].epoch] {
        if *tick_epochs.last().unwrap() != e {
            tick_epochs.push(e);
        }
    }
    for e in tick_epochs {
        let px = x.map(e as f64);
        let base = MARGIN_TOP + PANEL_HEIGHT;
        let _ = write!(
            out,
            r##"<line x1="{px:.2}" y1="{base:.2}" x2="{px:.2}" y2="{:.2}" stroke="#444" stroke-width="1"/>"##,
            base + 4.0
        );
        let _ = write!(
            out,
            r##"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{e}</text>"##,
            base + 18.0
        );
    }
    let _ = write!(
        out,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">epoch</text>"##,
        panel.x0 + plot_w / 2.0,
        MARGIN_TOP + PANEL_HEIGHT + 36.0
    );
    let _ = write!(
        out,
        r##"<text transform="translate({:.2},{:.2}) rotate(-90)" text-anchor="middle">{}</text>"##,
        panel.x0 - 48.0,
        MARGIN_TOP + PANEL_HEIGHT / 2.0,
        panel.title
    );

    for (color, pick) in [(TRAIN_COLOR, 0usize), (TEST_COLOR, 1usize)] {
        if rows.len() >= 2 {
            let mut points = String::new();
            for row in rows {
                let (train, test) = (panel.values)(row);
                let v = if pick == 0 { train } else { test };
                let _ = write!(points, "{:.2},{:.2} ", x.map(row.epoch as f64), y.map(v));
            }
            let _ = write!(
                out,
                r##"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"##,
                points.trim_end()
            );
        }
        for row in rows {
            let (train, test) = (panel.values)(row);
            let v = if pick == 0 { train } else { test };
            let _ = write!(
                out,
                r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"##,
                x.map(row.epoch as f64),
                y.map(v)
            );
        }
    }
}

/// Render metric curves for one training run. Errors on an empty row list;
/// everything else, including a single row, produces a valid document.
pub fn render_svg(rows: &[MetricsRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig(
            "curve rendering needs at least one metrics row".into(),
        ));
    }
    let plot_w = MIN_PLOT_WIDTH.max(2.0 * rows.len() as f64);
    let panel1_x = MARGIN_LEFT;
    let panel2_x = MARGIN_LEFT + plot_w + PANEL_GAP + MARGIN_LEFT;
    let width = panel2_x + plot_w + MARGIN_RIGHT;
    let height = MARGIN_TOP + PANEL_HEIGHT + MARGIN_BOTTOM;

    let mut loss_min = f64::INFINITY;
    let mut loss_max = f64::NEG_INFINITY;
    for row in rows {
        loss_min = loss_min.min(row.train_loss).min(row.test_loss);
        loss_max = loss_max.max(row.train_loss).max(row.test_loss);
    }
    let pad = if loss_max > loss_min {
        0.05 * (loss_max - loss_min)
    } else {
        1.0
    };
    let loss_domain = (loss_min - pad, loss_max + pad);

    let mut out = String::new();
    let _ = write!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"##
    );
    let _ = write!(
        out,
        r##"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"##
    );

    emit_panel(
        &mut out,
        rows,
        plot_w,
        &Panel {
            x0: panel1_x,
            title: "loss",
            y_domain: loss_domain,
            tick_decimals: 3,
            values: &|r| (r.train_loss, r.test_loss),
        },
    );
    emit_panel(
        &mut out,
        rows,
        plot_w,
        &Panel {
            x0: panel2_x,
            title: "accuracy",
            y_domain: (-0.02, 1.02),
            tick_decimals: 2,
            values: &|r| (r.train_acc, r.test_acc),
        },
    );

    let legend_x = width - MARGIN_RIGHT - 150.0;
    for (i, (color, label)) in [(TRAIN_COLOR, "train"), (TEST_COLOR, "test")]
        .iter()
        .enumerate()
    {
        let lx = legend_x + 80.0 * i as f64;
        let _ = write!(
            out,
            r##"<line x1="{lx:.2}" y1="14" x2="{:.2}" y2="14" stroke="{color}" stroke-width="2"/>"##,
            lx + 22.0
        );
        let _ = write!(out, r##"<text x="{:.2}" y="18">{label}</text>"##, lx + 28.0);
    }

    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(epoch: usize, loss: f64, acc: f64) -> MetricsRow {
        MetricsRow {
            epoch,
            train_loss: loss,
            train_acc: acc,
            test_loss: loss + 0.1,
            test_acc: (acc - 0.05).max(0.0),
        }
    }

    fn attr_values(svg: &str, attr: &str) -> Vec<f64> {
        let needle = format!("{attr}=\"");
        let mut values = Vec::new();
        let mut rest = svg;
        while let Some(at) = rest.find(&needle) {
            rest = &rest[at + needle.len()..];
            let end = rest.find('"').unwrap();
            values.push(rest[..end].parse::<f64>().unwrap());
            rest = &rest[end..];
        }
        values
    }

    #[test]
    fn single_row_renders_four_data_points() {
        let svg = render_svg(&[row(1, 2.3, 0.1)]).unwrap();
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\""));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg.matches("<polyline").count(), 0);
        for needle in [">loss<", ">accuracy<", ">epoch<", ">train<", ">test<"] {
            assert!(svg.contains(needle), "missing {needle}");
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let rows: Vec<MetricsRow> = (1..=20)
            .map(|e| row(e, 2.0 / e as f64, 1.0 - 0.5 / e as f64))
            .collect();
        assert_eq!(render_svg(&rows).unwrap(), render_svg(&rows).unwrap());
    }

    #[test]
    fn wide_runs_scale_the_canvas_and_stay_inside_the_viewbox() {
        let rows: Vec<MetricsRow> = (1..=500)
            .map(|e| row(e, -10.0 + 500.0 / e as f64, (e as f64 / 500.0).min(1.0)))
            .collect();
        let svg = render_svg(&rows).unwrap();

        let widths = attr_values(&svg, "width");
        let width = widths[0];
        let height = attr_values(&svg, "height")[0];
        assert!(width > 2.0 * 500.0, "width {width} does not scale");
        let narrow = attr_values(&render_svg(&rows[..5]).unwrap(), "width")[0];
        assert!(width > narrow);

        assert_eq!(svg.matches("<circle").count(), 2000);
        assert_eq!(svg.matches("<polyline").count(), 4);
        for cx in attr_values(&svg, "cx") {
            assert!(cx >= 0.0 && cx <= width, "cx {cx} outside viewBox");
        }
        for cy in attr_values(&svg, "cy") {
            assert!(cy >= 0.0 && cy <= height, "cy {cy} outside viewBox");
        }
    }

    #[test]
    fn flat_series_and_empty_input_edge_cases() {
        let rows = vec![row(1, 1.5, 0.5), row(2, 1.5, 0.5)];
        let svg = render_svg(&rows).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(render_svg(&[]).is_err());
    }
}
