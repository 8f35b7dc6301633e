use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sopq_core::{EvalResult, GroupSignature, RepresentationParams};

pub const CSV_HEADER: &str = "p,q,sigma_re,sigma_im,eps,alpha,method,value_re,value_im,abs_err_est,work";

/// One evaluation, with (p, q) in the order the user gave them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub p: u32,
    pub q: u32,
    pub sigma_re: f64,
    pub sigma_im: f64,
    pub eps: u8,
    pub alpha: f64,
    pub method: String,
    pub value_re: f64,
    pub value_im: f64,
    pub abs_err_est: f64,
    pub work: u64,
}

impl OutputRecord {
    pub fn new(sig: &GroupSignature, rep: &RepresentationParams, alpha: f64, r: &EvalResult) -> Self {
        let (p, q) = sig.original();
        Self {
            p,
            q,
            sigma_re: rep.sigma.re,
            sigma_im: rep.sigma.im,
            eps: rep.eps(),
            alpha,
            method: r.method.to_string(),
            value_re: r.value.re,
            value_im: r.value.im,
            abs_err_est: r.abs_err_est,
            work: r.work,
        }
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{:.16e},{:.16e},{},{:.16e},{},{:.16e},{:.16e},{:.16e},{}",
            self.p,
            self.q,
            self.sigma_re,
            self.sigma_im,
            self.eps,
            self.alpha,
            self.method,
            self.value_re,
            self.value_im,
            self.abs_err_est,
            self.work
        )
    }

    /// Parses a row written by [`emit`] in CSV format.
    #[cfg_attr(not(test), allow(dead_code))]
    pub fn from_csv_row(line: &str) -> Option<Self> {
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 11 {
            return None;
        }
        Some(Self {
            p: f[0].parse().ok()?,
            q: f[1].parse().ok()?,
            sigma_re: f[2].parse().ok()?,
            sigma_im: f[3].parse().ok()?,
            eps: f[4].parse().ok()?,
            alpha: f[5].parse().ok()?,
            method: f[6].to_string(),
            value_re: f[7].parse().ok()?,
            value_im: f[8].parse().ok()?,
            abs_err_est: f[9].parse().ok()?,
            work: f[10].parse().ok()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn render(records: &[OutputRecord], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in records {
                out.push_str(&r.csv_row());
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut out = serde_json::to_string_pretty(records).expect("records serialize");
            out.push('\n');
            out
        }
    }
}

/// Writes the records to `sink`, or to standard output when it is `None`.
pub fn emit(records: &[OutputRecord], format: Format, sink: Option<&Path>) -> io::Result<()> {
    let text = render(records, format);
    match sink {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(text.as_bytes())?;
            w.flush()
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
