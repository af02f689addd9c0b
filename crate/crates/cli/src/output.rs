//! CSV rows and the output sink.

use std::fmt::Write as _;
use std::io::Write as _;

use padic_wavelet::io::fmt_float;
use padic_wavelet::{LocallyConstantFn, Scalar, WaveletExpansion};

use crate::{CliError, RunConfig};

pub fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cfg.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

/// Exact value text: a rational when the value is one, otherwise the
/// shortest of the sign-folded and canonical forms.
pub fn exact_text<S: Scalar>(v: &S) -> String {
    match v.as_cyclotomic() {
        Some(c) => {
            let canonical = c.canonical();
            if let Some(q) = canonical.as_rational() {
                return q.to_string();
            }
            let folded = c.fold_signs();
            if canonical.term_count() < folded.term_count() {
                canonical.to_string()
            } else {
                folded.to_string()
            }
        }
        None => String::new(),
    }
}

/// `re,im,exact`.
pub fn value_columns<S: Scalar>(v: &S) -> String {
    let z = v.to_complex();
    format!("{},{},{}", fmt_float(z.re), fmt_float(z.im), exact_text(v))
}

pub const VALUE_HEADER: &str = "re,im,exact";

pub fn digits_text(d: &[u64]) -> String {
    d.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

pub fn function_csv<S: Scalar>(f: &LocallyConstantFn<S>) -> String {
    let mut out = format!("digits,norm_exponent,{VALUE_HEADER}\n");
    for (i, v) in f.entries() {
        let cell = f.cell(i);
        let norm = cell.norm_exponent().map_or_else(|| "-inf".into(), |e| e.to_string());
        let _ = writeln!(out, "{},{norm},{}", digits_text(&cell.rep_digits()), value_columns(v));
    }
    out
}

pub fn expansion_csv<S: Scalar>(e: &WaveletExpansion<S>) -> String {
    let mut out = format!("n,m_digits,j,{VALUE_HEADER}\n");
    for (idx, v) in e.iter() {
        let _ = writeln!(out, "{},{},{},{}", idx.n, digits_text(&idx.m_digits), idx.j, value_columns(v));
    }
    out
}
