use std::io::Write;

use serde_json::Value;

use super::config::Format;
use crate::error::Result;

/// Tabular command output with a JSON rendering.
#[derive(Debug, Clone)]
pub struct Report {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
}

impl Report {
    pub fn new(headers: &[&str], json: Value) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            json,
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn render<W: Write>(&self, format: Format, mut w: W) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, &self.json)?;
                writeln!(w)?;
            }
            Format::Csv => {
                let mut out = csv::Writer::from_writer(&mut w);
                out.write_record(&self.headers)?;
                for r in &self.rows {
                    out.write_record(r)?;
                }
                out.flush()?;
            }
            Format::Table => {
                let mut width: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
                for r in &self.rows {
                    for (i, c) in r.iter().enumerate() {
                        width[i] = width[i].max(c.len());
                    }
                }
                let line = |cells: &[String]| {
                    cells
                        .iter()
                        .enumerate()
                        .map(|(i, c)| format!("{c:<w$}", w = width[i]))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                };
                writeln!(w, "{}", line(&self.headers))?;
                writeln!(w, "{}", width.iter().map(|n| "-".repeat(*n)).collect::<Vec<_>>().join("  "))?;
                for r in &self.rows {
                    writeln!(w, "{}", line(r))?;
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn num(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_renderings() {
        let mut r = Report::new(&["id", "value"], serde_json::json!({"id": "a", "value": 1.5}));
        r.push(vec!["a".into(), num(1.5)]);
        let mut buf = Vec::new();
        r.render(Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "id,value\na,1.5\n");
        let mut buf = Vec::new();
        r.render(Format::Table, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "id  value\n--  -----\na   1.5\n");
        let mut buf = Vec::new();
        r.render(Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["value"], 1.5);
    }
}
