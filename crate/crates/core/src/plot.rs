//! Minimal SVG line plotter: polylines on linear or log axes, nothing more.
//! The emitted figures are simple curves, so a lightweight deterministic
//! writer beats a plotting stack.

/// Axis scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// One polyline.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// A single-panel line plot.
#[derive(Debug, Clone)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<Series>,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 48.0;

impl LinePlot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        LinePlot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series: Vec::new(),
        }
    }

    pub fn log_log(mut self) -> Self {
        self.x_scale = Scale::Log;
        self.y_scale = Scale::Log;
        self
    }

    pub fn with_series(mut self, label: &str, points: Vec<(f64, f64)>) -> Self {
        self.series.push(Series {
            label: label.into(),
            points,
        });
        self
    }

    /// Render to an SVG document. Points that cannot be shown on the chosen
    /// scale (non-positive on log axes, non-finite anywhere) are dropped.
    pub fn to_svg(&self) -> String {
        let usable = |p: &(f64, f64)| -> bool {
            p.0.is_finite()
                && p.1.is_finite()
                && (self.x_scale == Scale::Linear || p.0 > 0.0)
                && (self.y_scale == Scale::Linear || p.1 > 0.0)
        };
        let tx = |v: f64| match self.x_scale {
            Scale::Linear => v,
            Scale::Log => v.log10(),
        };
        let ty = |v: f64| match self.y_scale {
            Scale::Linear => v,
            Scale::Log => v.log10(),
        };

        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for s in &self.series {
            for p in s.points.iter().filter(|p| usable(p)) {
                xs.push(tx(p.0));
                ys.push(ty(p.1));
            }
        }
        let (x_min, x_max) = padded_bounds(&xs);
        let (y_min, y_max) = padded_bounds(&ys);

        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
        let px = |v: f64| MARGIN_L + (v - x_min) / (x_max - x_min) * plot_w;
        let py = |v: f64| HEIGHT - MARGIN_B - (v - y_min) / (y_max - y_min) * plot_h;

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        ));
        svg.push_str(&format!(
            "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
            WIDTH / 2.0,
            escape(&self.title)
        ));

        // axes
        svg.push_str(&format!(
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
             fill=\"none\" stroke=\"#333\"/>\n"
        ));

        for (value, label) in ticks(x_min, x_max, self.x_scale) {
            let x = px(value);
            svg.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"#ccc\"/>\n",
                MARGIN_T,
                HEIGHT - MARGIN_B
            ));
            svg.push_str(&format!(
                "<text x=\"{x:.2}\" y=\"{}\" text-anchor=\"middle\">{label}</text>\n",
                HEIGHT - MARGIN_B + 16.0
            ));
        }
        for (value, label) in ticks(y_min, y_max, self.y_scale) {
            let y = py(value);
            svg.push_str(&format!(
                "<line x1=\"{MARGIN_L}\" y1=\"{y:.2}\" x2=\"{}\" y2=\"{y:.2}\" stroke=\"#ccc\"/>\n",
                WIDTH - MARGIN_R
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{label}</text>\n",
                MARGIN_L - 6.0,
                y + 4.0
            ));
        }

        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_L + plot_w / 2.0,
            HEIGHT - 10.0,
            escape(&self.x_label)
        ));
        svg.push_str(&format!(
            "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
            MARGIN_T + plot_h / 2.0,
            MARGIN_T + plot_h / 2.0,
            escape(&self.y_label)
        ));

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let coords: Vec<String> = s
                .points
                .iter()
                .filter(|p| usable(p))
                .map(|p| format!("{:.2},{:.2}", px(tx(p.0)), py(ty(p.1))))
                .collect();
            if coords.is_empty() {
                continue;
            }
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                coords.join(" ")
            ));
            let ly = MARGIN_T + 14.0 + 16.0 * i as f64;
            svg.push_str(&format!(
                "<line x1=\"{}\" y1=\"{ly:.2}\" x2=\"{}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                MARGIN_L + 8.0,
                MARGIN_L + 28.0
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{:.2}\">{}</text>\n",
                MARGIN_L + 34.0,
                ly + 4.0,
                escape(&s.label)
            ));
        }

        svg.push_str("</svg>\n");
        svg
    }
}

fn padded_bounds(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 1.0);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = (hi - lo) * 0.04;
    (lo - pad, hi + pad)
}

/// Tick positions in transformed coordinates with their labels.
fn ticks(lo: f64, hi: f64, scale: Scale) -> Vec<(f64, String)> {
    match scale {
        Scale::Linear => {
            let step = nice_step(hi - lo);
            let mut out = Vec::new();
            let mut v = (lo / step).ceil() * step;
            while v <= hi + step * 1e-9 {
                out.push((v, trim_number(v)));
                v += step;
            }
            out
        }
        Scale::Log => {
            // values are log10; label at integer decades
            let mut out = Vec::new();
            let mut e = lo.ceil() as i64;
            while (e as f64) <= hi {
                out.push((e as f64, format!("1e{e}")));
                e += 1;
            }
            if out.len() < 2 {
                out = vec![(lo, trim_number(lo)), (hi, trim_number(hi))];
            }
            out
        }
    }
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    step * mag
}

fn trim_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 1e5 || v.abs() < 1e-3 {
        return format!("{v:.1e}");
    }
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
