use serde::Serialize;
use serde_json::{Number, Value};

/// Scientific notation with four significant digits, as a JSON number.
/// Infinite values (zero-probability mean times) become the string "inf".
pub fn sci(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(format!("{x:.3e}").parse::<Number>().expect("formatted float is a JSON number"))
    } else if x.is_nan() {
        Value::Null
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn sci_text(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.3e}")
    } else {
        "inf".into()
    }
}

/// A titled table for the csv and markdown renderings.
#[derive(Clone, Debug, Default)]
pub struct Section {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Section {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Section {
            title: title.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }
}

#[derive(Serialize)]
pub struct ReportEnvelope {
    pub tool_version: &'static str,
    pub subcommand: String,
    pub parameters: Value,
    pub results: Value,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
}

pub struct Report {
    pub envelope: ReportEnvelope,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(subcommand: impl Into<String>, parameters: Value) -> Self {
        Report {
            envelope: ReportEnvelope {
                tool_version: env!("CARGO_PKG_VERSION"),
                subcommand: subcommand.into(),
                parameters,
                results: Value::Null,
                warnings: Vec::new(),
                passed: None,
            },
            sections: Vec::new(),
        }
    }

    pub fn failed(&self) -> bool {
        self.envelope.passed == Some(false)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.envelope).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Markdown => self.to_markdown(),
        }
    }

    fn to_csv(&self) -> String {
        let quote = |s: &str| {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        let mut out = String::new();
        for (i, sec) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("# {}\n", sec.title));
            for line in std::iter::once(&sec.header).chain(&sec.rows) {
                let cells: Vec<String> = line.iter().map(|c| quote(c)).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        for w in &self.envelope.warnings {
            out.push_str(&format!("# warning: {w}\n"));
        }
        out
    }

    fn to_markdown(&self) -> String {
        let mut out = String::new();
        for sec in &self.sections {
            out.push_str(&format!("### {}\n\n", sec.title));
            out.push_str(&format!("| {} |\n", sec.header.join(" | ")));
            out.push_str(&format!("|{}\n", "---|".repeat(sec.header.len())));
            for r in &sec.rows {
                out.push_str(&format!("| {} |\n", r.join(" | ")));
            }
            out.push('\n');
        }
        if !self.envelope.warnings.is_empty() {
            out.push_str("Warnings:\n\n");
            for w in &self.envelope.warnings {
                out.push_str(&format!("- {w}\n"));
            }
        }
        if let Some(p) = self.envelope.passed {
            out.push_str(&format!("\nResult: {}\n", if p { "PASS" } else { "FAIL" }));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}
