//! Byte-stable number formatting and output plumbing.
//!
//! Every float is printed in fixed 17-significant-digit scientific
//! notation, which round-trips any f64 exactly and does not depend on a
//! shortest-representation search.

use std::fs;
use std::io::Write;

pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `nan` for undefined cells in CSV output.
pub fn float17_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => float17(v),
        None => "nan".to_string(),
    }
}

/// JSON value: a float or null.
pub fn json_f64_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => float17(v),
        None => "null".to_string(),
    }
}

pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn json_f64_array(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| float17(*v)).collect();
    format!("[{}]", items.join(", "))
}

/// Write `content` to `path`, or stdout when no path is given. Content is
/// expected to end with a newline already.
pub fn write_output(path: Option<&str>, content: &str) -> Result<(), String> {
    debug_assert!(content.is_empty() || content.ends_with('\n'));
    match path {
        Some(p) => fs::write(p, content).map_err(|e| format!("cannot write {p}: {e}")),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    }
}
