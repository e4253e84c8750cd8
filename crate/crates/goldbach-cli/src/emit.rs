//! Output shaping: JSON lines, CSV with fixed headers, and a loose
//! human format. Floats go through one formatter so repeated runs are
//! byte-identical.

use goldbach_core::util::fmt_float;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

/// One output field. Csv prints Null as an empty cell; Json prints
/// non-finite floats as null (JSON has no NaN).
#[derive(Clone, Debug)]
pub enum Val {
    U(u64),
    I(i64),
    F(f64),
    S(String),
    B(bool),
    Null,
    ListU(Vec<u64>),
    Triples(Vec<(u64, u64, u64)>),
}

#[derive(Clone, Debug)]
pub struct Rec(pub Vec<(&'static str, Val)>);

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn json_val(v: &Val) -> String {
    match v {
        Val::U(x) => x.to_string(),
        Val::I(x) => x.to_string(),
        Val::F(x) if x.is_finite() => fmt_float(*x),
        Val::F(_) => "null".into(),
        Val::S(s) => format!("\"{}\"", json_escape(s)),
        Val::B(b) => b.to_string(),
        Val::Null => "null".into(),
        Val::ListU(xs) => {
            let inner: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
            format!("[{}]", inner.join(","))
        }
        Val::Triples(ts) => {
            let inner: Vec<String> = ts
                .iter()
                .map(|(a, b, c)| format!("[{a},{b},{c}]"))
                .collect();
            format!("[{}]", inner.join(","))
        }
    }
}

fn json_line(rec: &Rec) -> String {
    let fields: Vec<String> = rec
        .0
        .iter()
        .map(|(k, v)| format!("\"{k}\":{}", json_val(v)))
        .collect();
    format!("{{{}}}", fields.join(","))
}

fn csv_val(v: &Val) -> String {
    match v {
        Val::U(x) => x.to_string(),
        Val::I(x) => x.to_string(),
        Val::F(x) => fmt_float(*x),
        Val::S(s) => s.clone(),
        Val::B(b) => b.to_string(),
        Val::Null => String::new(),
        Val::ListU(_) | Val::Triples(_) => String::new(),
    }
}

fn human_line(rec: &Rec) -> String {
    let fields: Vec<String> = rec
        .0
        .iter()
        .map(|(k, v)| match v {
            Val::F(x) => format!("{k} = {x}"),
            Val::S(s) => format!("{k} = {s}"),
            Val::Triples(ts) => format!("{k} = {ts:?}"),
            Val::ListU(xs) => format!("{k} = {xs:?}"),
            Val::Null => format!("{k} = -"),
            other => format!("{k} = {}", csv_val(other)),
        })
        .collect();
    fields.join(", ")
}

/// Render a homogeneous table plus trailing summary records. CSV emits
/// the fixed header and the table only; JSON emits one object per line
/// for both table and summary; human mirrors JSON loosely.
pub fn render(format: Format, header: &str, table: &[Rec], summary: &[Rec]) -> String {
    let mut out = String::new();
    match format {
        Format::Json => {
            for rec in table.iter().chain(summary) {
                out.push_str(&json_line(rec));
                out.push('\n');
            }
        }
        Format::Csv => {
            out.push_str(header);
            out.push('\n');
            for rec in table {
                let row: Vec<String> = rec.0.iter().map(|(_, v)| csv_val(v)).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        Format::Human => {
            for rec in table.iter().chain(summary) {
                out.push_str(&human_line(rec));
                out.push('\n');
            }
        }
    }
    out
}
