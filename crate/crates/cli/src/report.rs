//! Run reports and their text and JSON renderings.
//!
//! JSON schema (stable):
//!
//! ```text
//! {
//!   "command": str,
//!   "status": "pass" | "fail" | "error",
//!   "timing_ms": num,
//!   "error": str | null,
//!   "residuals": [{"name": str, "value": num | null, "limit": num | null,
//!                  "strict": bool, "pass": bool}],
//!   "sections": [{"title": str, "matrix": [[[re, im], ...], ...]}
//!              | {"title": str, "table": {"header": [str], "rows": [[str]]}}
//!              | {"title": str, "lines": [str]}],
//!   "diagnostics": [{"severity": str, "line": int, "column": int,
//!                    "code": str, "message": str}]
//! }
//! ```
//!
//! Non-finite residual values are written as `null`.

use std::fmt::Write;

use qnet_core::netdsl::ParseDiagnostic;
use qnet_core::ComplexMatrix;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Matrix(ComplexMatrix),
    Table {
        header: Vec<String>,
        rows: Vec<Vec<String>>,
    },
    Lines(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub title: String,
    pub body: Body,
}

/// A named value with an optional acceptance limit: passes when
/// `value <= limit` (or `value < limit` when `strict`). Without a limit it
/// is informational and always passes.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub limit: Option<f64>,
    pub strict: bool,
}

impl Residual {
    pub fn passed(&self) -> bool {
        match self.limit {
            None => true,
            Some(l) if self.strict => self.value < l,
            Some(l) => self.value <= l,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub status: Status,
    pub sections: Vec<Section>,
    pub residuals: Vec<Residual>,
    pub diagnostics: Vec<ParseDiagnostic>,
    pub error: Option<String>,
    /// Exit code used when `status` is `Error`: 2 for usage and input
    /// problems, 3 for numerical failures.
    pub error_code: i32,
    pub timing_ms: f64,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            status: Status::Pass,
            sections: Vec::new(),
            residuals: Vec::new(),
            diagnostics: Vec::new(),
            error: None,
            error_code: 2,
            timing_ms: 0.0,
        }
    }

    pub fn matrix(&mut self, title: impl Into<String>, m: &ComplexMatrix) {
        self.sections.push(Section {
            title: title.into(),
            body: Body::Matrix(m.clone()),
        });
    }

    pub fn lines(&mut self, title: impl Into<String>, lines: Vec<String>) {
        self.sections.push(Section {
            title: title.into(),
            body: Body::Lines(lines),
        });
    }

    pub fn table(&mut self, title: impl Into<String>, header: &[&str], rows: Vec<Vec<String>>) {
        self.sections.push(Section {
            title: title.into(),
            body: Body::Table {
                header: header.iter().map(|s| s.to_string()).collect(),
                rows,
            },
        });
    }

    pub fn gated(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.residuals.push(Residual {
            name: name.into(),
            value,
            limit: Some(limit),
            strict: false,
        });
    }

    pub fn info(&mut self, name: impl Into<String>, value: f64) {
        self.residuals.push(Residual {
            name: name.into(),
            value,
            limit: None,
            strict: false,
        });
    }

    pub fn abort(&mut self, code: i32, message: impl Into<String>) {
        self.status = Status::Error;
        self.error_code = code;
        self.error = Some(message.into());
    }

    pub fn residual(&self, name: &str) -> Option<&Residual> {
        self.residuals.iter().find(|r| r.name == name)
    }

    /// Fail when a gated residual misses its limit; errors stay errors.
    pub fn settle(&mut self) {
        if self.status == Status::Pass && !self.residuals.iter().all(Residual::passed) {
            self.status = Status::Fail;
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => self.error_code,
        }
    }

    pub fn to_json(&self) -> Value {
        let num = |x: f64| if x.is_finite() { json!(x) } else { Value::Null };
        let residuals: Vec<Value> = self
            .residuals
            .iter()
            .map(|r| {
                json!({
                    "name": r.name,
                    "value": num(r.value),
                    "limit": r.limit.map_or(Value::Null, num),
                    "strict": r.strict,
                    "pass": r.passed(),
                })
            })
            .collect();
        let sections: Vec<Value> = self
            .sections
            .iter()
            .map(|s| match &s.body {
                Body::Matrix(m) => json!({"title": s.title, "matrix": matrix_json(m)}),
                Body::Table { header, rows } => {
                    json!({"title": s.title, "table": {"header": header, "rows": rows}})
                }
                Body::Lines(lines) => json!({"title": s.title, "lines": lines}),
            })
            .collect();
        let diagnostics: Vec<Value> = self
            .diagnostics
            .iter()
            .map(|d| {
                json!({
                    "severity": d.severity.as_str(),
                    "line": d.line,
                    "column": d.column,
                    "code": d.code,
                    "message": d.message,
                })
            })
            .collect();
        json!({
            "command": self.command,
            "status": self.status.as_str(),
            "timing_ms": self.timing_ms,
            "error": self.error,
            "residuals": residuals,
            "sections": sections,
            "diagnostics": diagnostics,
        })
    }

    pub fn to_text(&self) -> String {
        let mut w = String::new();
        let _ = writeln!(w, "command: {}", self.command);
        let _ = writeln!(w, "status: {}", self.status.as_str());
        if let Some(e) = &self.error {
            let _ = writeln!(w, "error: {e}");
        }
        for d in &self.diagnostics {
            let _ = writeln!(w, "{d}");
        }
        for s in &self.sections {
            let _ = writeln!(w, "\n[{}]", s.title);
            match &s.body {
                Body::Matrix(m) => w.push_str(&matrix_text(m)),
                Body::Table { header, rows } => w.push_str(&table_text(header, rows)),
                Body::Lines(lines) => {
                    for l in lines {
                        let _ = writeln!(w, "  {l}");
                    }
                }
            }
        }
        if !self.residuals.is_empty() {
            w.push_str("\n[residuals]\n");
            let rows: Vec<Vec<String>> = self
                .residuals
                .iter()
                .map(|r| {
                    let (limit, verdict) = match r.limit {
                        None => (String::new(), "info"),
                        Some(l) => (
                            format!("{} {:e}", if r.strict { "<" } else { "<=" }, l),
                            if r.passed() { "pass" } else { "FAIL" },
                        ),
                    };
                    vec![r.name.clone(), format!("{:e}", r.value), limit, verdict.to_string()]
                })
                .collect();
            w.push_str(&table_text(
                &["name", "value", "limit", "result"].map(String::from),
                &rows,
            ));
        }
        let _ = writeln!(w, "\ntime: {:.3} ms", self.timing_ms);
        w
    }
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

/// `%g`-style rendering with 6 significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s)
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        format!("{}e{e}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// `a+bi` with both parts at 6 significant digits.
pub fn entry_text(re: f64, im: f64) -> String {
    let sign = if im.is_sign_negative() && im != 0.0 { '-' } else { '+' };
    format!("{}{}{}i", sig6(re), sign, sig6(im.abs()))
}

pub fn matrix_text(m: &ComplexMatrix) -> String {
    if m.rows() == 0 || m.cols() == 0 {
        return format!("  ({}x{} empty)\n", m.rows(), m.cols());
    }
    let cells: Vec<Vec<String>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| entry_text(z.re, z.im)).collect())
        .collect();
    let widths: Vec<usize> = (0..m.cols())
        .map(|j| cells.iter().map(|r| r[j].len()).max().unwrap_or(0))
        .collect();
    let mut w = String::new();
    for row in &cells {
        w.push(' ');
        for (cell, width) in row.iter().zip(&widths) {
            let _ = write!(w, " {cell:>width$}");
        }
        w.push('\n');
    }
    w
}

fn table_text(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let widths: Vec<usize> = (0..cols)
        .map(|j| {
            rows.iter()
                .filter_map(|r| r.get(j))
                .map(String::len)
                .chain([header[j].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut w = String::new();
    for row in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let mut line = String::from(" ");
        for (j, width) in widths.iter().enumerate() {
            let cell = row.get(j).map_or("", String::as_str);
            let _ = write!(line, " {cell:<width$}");
        }
        w.push_str(line.trim_end());
        w.push('\n');
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use qnet_core::c64;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(-1.5), "-1.5");
        assert_eq!(sig6(0.105), "0.105");
        assert_eq!(sig6(1.0 / 3.0), "0.333333");
        assert_eq!(sig6(123456789.0), "1.23457e8");
        assert_eq!(sig6(2.5e-7), "2.5e-7");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn matrices_align() {
        let m = ComplexMatrix::from_rows(&[[c64(-1.5, 0.0), c64(0.0, -0.2)], [c64(10.0, 1.0), c64(0.0, 0.0)]]).unwrap();
        assert_eq!(matrix_text(&m), "  -1.5+0i 0-0.2i\n    10+1i   0+0i\n");
    }

    #[test]
    fn strict_limit() {
        let r = Residual {
            name: "x".into(),
            value: 0.0,
            limit: Some(0.0),
            strict: true,
        };
        assert!(!r.passed());
        let nan = Residual {
            name: "y".into(),
            value: f64::NAN,
            limit: Some(1.0),
            strict: false,
        };
        assert!(!nan.passed());
    }
}
