//! Minimal SVG 1.1 writer shared by the word cloud and dendrogram renderers.
//!
//! Output is plain UTF-8 text with numbers printed at two decimals, so the
//! same input always produces the same bytes.

use std::fmt::Write;

pub struct SvgDocument {
    buf: String,
}

/// Formats a coordinate or size.
pub fn num(x: f64) -> String {
    let s = format!("{:.2}", x);
    // Avoid "-0.00".
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

impl SvgDocument {
    pub fn new(width: f64, height: f64) -> Self {
        let mut buf = String::new();
        buf.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            buf,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
            w = num(width),
            h = num(height)
        );
        SvgDocument { buf }
    }

    /// Appends `<name attr="value" ...>text</name>`, or a self-closing element
    /// when `text` is `None`. Attribute values are escaped.
    pub fn element(&mut self, name: &str, attrs: &[(&str, String)], text: Option<&str>) {
        self.buf.push_str("  <");
        self.buf.push_str(name);
        for (key, value) in attrs {
            let _ = write!(self.buf, " {key}=\"{}\"", escape(value));
        }
        match text {
            Some(t) => {
                let _ = writeln!(self.buf, ">{}</{name}>", escape(t));
            }
            None => self.buf.push_str("/>\n"),
        }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        self.element(
            "rect",
            &[
                ("x", num(x)),
                ("y", num(y)),
                ("width", num(w)),
                ("height", num(h)),
                ("fill", fill.to_string()),
            ],
            None,
        );
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        self.element(
            "line",
            &[
                ("x1", num(x1)),
                ("y1", num(y1)),
                ("x2", num(x2)),
                ("y2", num(y2)),
                ("stroke", stroke.to_string()),
            ],
            None,
        );
    }

    pub fn finish(mut self) -> Vec<u8> {
        self.buf.push_str("</svg>\n");
        self.buf.into_bytes()
    }
}
