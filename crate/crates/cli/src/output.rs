//! Output files. Every file carries the run's config hash and lexicon
//! checksum: CSV files as a leading comment line, JSON files as fields.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct Provenance {
    pub config_hash: String,
    pub lexicon_checksum: String,
}

impl Provenance {
    pub fn comment(&self) -> String {
        format!("# config={} lexicons={}", self.config_hash, self.lexicon_checksum)
    }
}

pub struct OutDir {
    root: PathBuf,
    pub provenance: Provenance,
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    config_hash: &'a str,
    lexicon_checksum: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

impl OutDir {
    pub fn create(root: &Path, provenance: Provenance) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            provenance,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn open(&self, name: &str) -> Result<BufWriter<File>> {
        let p = self.path(name);
        let f = File::create(&p).with_context(|| format!("writing {}", p.display()))?;
        Ok(BufWriter::new(f))
    }

    pub fn csv(&self, name: &str, header: &[&str]) -> Result<csv::Writer<BufWriter<File>>> {
        let mut w = self.open(name)?;
        writeln!(w, "{}", self.provenance.comment())?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(header)?;
        Ok(out)
    }

    /// Writes a JSON object with the provenance fields merged in.
    pub fn json_stamped<T: Serialize>(&self, name: &str, body: &T) -> Result<()> {
        self.json(
            name,
            &Stamped {
                config_hash: &self.provenance.config_hash,
                lexicon_checksum: &self.provenance.lexicon_checksum,
                body,
            },
        )
    }

    /// Writes a value that already records its own provenance.
    pub fn json<T: Serialize>(&self, name: &str, body: &T) -> Result<()> {
        let mut w = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, body)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn text(&self, name: &str, body: &str) -> Result<()> {
        let mut w = self.open(name)?;
        w.write_all(body.as_bytes())?;
        w.flush()?;
        Ok(())
    }
}

/// Formats an optional value, leaving the cell empty when absent.
pub fn cell(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Equal-width bins spanning the data; the last bin is closed.
pub fn histogram(values: &[f64], bins: usize) -> Vec<Bin> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for v in values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| Bin {
            lo: lo + width * i as f64,
            hi: lo + width * (i + 1) as f64,
            count,
        })
        .collect()
}

pub fn histogram_svg(bins: &[Bin], title: &str, provenance: &Provenance) -> String {
    let (w, h, pad) = (640.0, 360.0, 40.0);
    let max = bins.iter().map(|b| b.count).max().unwrap_or(0).max(1) as f64;
    let bar_w = (w - 2.0 * pad) / bins.len().max(1) as f64;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <!-- {} -->\n\
         <text x=\"{pad}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n",
        provenance.comment().trim_start_matches("# ")
    );
    for (i, b) in bins.iter().enumerate() {
        let bh = (h - 2.0 * pad) * b.count as f64 / max;
        let x = pad + bar_w * i as f64;
        let y = h - pad - bh;
        let fill = if b.hi <= 0.0 { "#c0504d" } else { "#4f81bd" };
        s.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{bh:.2}\" fill=\"{fill}\"><title>[{:.0}, {:.0}): {}</title></rect>\n",
            (bar_w - 1.0).max(0.5),
            b.lo,
            b.hi,
            b.count
        ));
    }
    if let (Some(first), Some(last)) = (bins.first(), bins.last()) {
        s.push_str(&format!(
            "<text x=\"{pad}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{:.0}</text>\n\
             <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.0}</text>\n",
            h - pad + 16.0,
            first.lo,
            w - pad,
            h - pad + 16.0,
            last.hi
        ));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts_everything() {
        let v = [-3.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        let h = histogram(&v, 3);
        assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), v.len());
        assert_eq!(h[0].lo, -3.0);
        assert_eq!(h[2].hi, 3.0);
        assert_eq!(h[2].count, 3);
    }

    #[test]
    fn constant_values_fall_in_first_bin() {
        let h = histogram(&[5.0, 5.0], 4);
        assert_eq!(h[0].count, 2);
    }

    #[test]
    fn empty_input_gives_no_bins() {
        assert!(histogram(&[], 10).is_empty());
    }
}
