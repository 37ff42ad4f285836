//! Two-axis fidelity grids, their CSV form and pointwise maxima.

use std::io::{self, Write};

use crate::error::ConfigError;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityGrid {
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Row-major with `x` outer: `values[ix * y.len() + iy]`.
    pub values: Vec<f64>,
    /// `key=value` pairs written as leading `#` lines.
    pub metadata: Vec<(String, String)>,
}

impl FidelityGrid {
    pub fn new(x_label: &str, y_label: &str, x: Vec<f64>, y: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), x.len() * y.len(), "grid shape");
        FidelityGrid {
            x_label: x_label.into(),
            y_label: y_label.into(),
            x,
            y,
            values,
            metadata: Vec::new(),
        }
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.y.len() + iy]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// `(x, y)` of the flat index `k`.
    pub fn coordinates(&self, k: usize) -> (f64, f64) {
        (self.x[k / self.y.len()], self.y[k % self.y.len()])
    }

    /// Metadata comments and the column header.
    pub fn write_header<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "{},{},F", self.x_label, self.y_label)
    }

    pub fn format_row(&self, k: usize, value: f64) -> String {
        let (x, y) = self.coordinates(k);
        format!("{},{},{}\n", fmt_real(x), fmt_real(y), fmt_real(value))
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        self.write_header(out)?;
        for (k, &v) in self.values.iter().enumerate() {
            out.write_all(self.format_row(k, v).as_bytes())?;
        }
        Ok(())
    }

    /// Parses the output of [`FidelityGrid::write_csv`]; extra columns are ignored.
    pub fn read_csv(text: &str) -> Result<Self, ConfigError> {
        let metadata = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .filter_map(|l| l.trim_start_matches('#').trim().split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let bad = |line: usize, message: String| ConfigError::Syntax { line, message };
        let headers = reader.headers().map_err(|e| bad(0, e.to_string()))?.clone();
        if headers.len() < 3 {
            return Err(bad(0, "grid CSV needs at least three columns".into()));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| bad(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let field = |i: usize| -> Result<f64, ConfigError> {
                record
                    .get(i)
                    .unwrap_or("")
                    .parse::<f64>()
                    .map_err(|_| bad(line, format!("column {} is not a number", i + 1)))
            };
            rows.push((field(0)?, field(1)?, field(2)?, line));
        }
        let mut x: Vec<f64> = Vec::new();
        let mut y: Vec<f64> = Vec::new();
        for &(a, b, _, _) in &rows {
            if x.last() != Some(&a) {
                x.push(a);
            }
            if !y.contains(&b) {
                y.push(b);
            }
        }
        if rows.len() != x.len() * y.len() || rows.is_empty() {
            return Err(bad(0, format!("{} rows do not form a {}x{} grid", rows.len(), x.len(), y.len())));
        }
        let mut grid = FidelityGrid::new(&headers[0], &headers[1], x, y, rows.iter().map(|r| r.2).collect());
        for (k, &(a, b, _, line)) in rows.iter().enumerate() {
            if grid.coordinates(k) != (a, b) {
                return Err(bad(line, "rows are not in grid order".into()));
            }
        }
        grid.metadata = metadata;
        Ok(grid)
    }

    fn axes_match(&self, other: &FidelityGrid) -> Result<(), ConfigError> {
        if self.x_label != other.x_label || self.y_label != other.y_label {
            return Err(ConfigError::AxisMismatch(format!(
                "labels ({}, {}) vs ({}, {})",
                self.x_label, self.y_label, other.x_label, other.y_label
            )));
        }
        if self.x != other.x {
            return Err(ConfigError::AxisMismatch(format!("{} values differ", self.x_label)));
        }
        if self.y != other.y {
            return Err(ConfigError::AxisMismatch(format!("{} values differ", self.y_label)));
        }
        Ok(())
    }
}

/// Pointwise maximum over several grids with the winning input per point.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinedGrid {
    pub grid: FidelityGrid,
    /// Index into the input list; ties go to the earliest input.
    pub provenance: Vec<usize>,
    pub sources: Vec<String>,
}

impl CombinedGrid {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for (i, s) in self.sources.iter().enumerate() {
            writeln!(out, "# source{i}={s}")?;
        }
        writeln!(out, "{},{},F,source", self.grid.x_label, self.grid.y_label)?;
        for (k, &v) in self.grid.values.iter().enumerate() {
            let (x, y) = self.grid.coordinates(k);
            writeln!(out, "{},{},{},{}", fmt_real(x), fmt_real(y), fmt_real(v), self.provenance[k])?;
        }
        Ok(())
    }
}

/// Pointwise maximum; `sources` names the inputs in the output.
pub fn combine_max_fidelity(grids: &[FidelityGrid], sources: &[String]) -> Result<CombinedGrid, ConfigError> {
    let Some(first) = grids.first() else {
        return Err(ConfigError::AxisMismatch("no input grids".into()));
    };
    for g in &grids[1..] {
        first.axes_match(g)?;
    }
    let mut values = first.values.clone();
    let mut provenance = vec![0; values.len()];
    for (i, g) in grids.iter().enumerate().skip(1) {
        for (k, &v) in g.values.iter().enumerate() {
            if v > values[k] {
                values[k] = v;
                provenance[k] = i;
            }
        }
    }
    let mut grid = FidelityGrid::new(&first.x_label, &first.y_label, first.x.clone(), first.y.clone(), values);
    grid.metadata = vec![("combined".into(), grids.len().to_string())];
    let sources = (0..grids.len())
        .map(|i| sources.get(i).cloned().unwrap_or_else(|| i.to_string()))
        .collect();
    Ok(CombinedGrid { grid, provenance, sources })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(values: Vec<f64>) -> FidelityGrid {
        FidelityGrid::new("JT", "dT", vec![0.0, 0.25, 0.5], vec![-1.0, 1.0], values)
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut g = grid(vec![0.1, 1.0 / 3.0, 0.99, std::f64::consts::PI / 4.0, 1e-17, 1.0]);
        g.metadata.push(("initial".into(), "mi".into()));
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# initial=mi\nJT,dT,F\n"));
        assert_eq!(FidelityGrid::read_csv(&text).unwrap(), g);
    }

    #[test]
    fn single_input_is_identity() {
        let g = grid(vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        let c = combine_max_fidelity(std::slice::from_ref(&g), &[]).unwrap();
        assert_eq!(c.grid.values, g.values);
        assert!(c.provenance.iter().all(|&p| p == 0));
    }

    #[test]
    fn maximum_with_provenance() {
        let a = grid(vec![0.1, 0.9, 0.3, 0.4, 0.5, 0.6]);
        let b = grid(vec![0.2, 0.8, 0.3, 0.7, 0.1, 0.6]);
        let c = combine_max_fidelity(&[a, b], &["a".into(), "b".into()]).unwrap();
        assert_eq!(c.grid.values, vec![0.2, 0.9, 0.3, 0.7, 0.5, 0.6]);
        assert_eq!(c.provenance, vec![1, 0, 0, 1, 0, 0]);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("JT,dT,F,source\n"));
    }

    #[test]
    fn mismatched_axes_are_rejected() {
        let a = grid(vec![0.0; 6]);
        let mut b = grid(vec![0.0; 6]);
        b.y[1] = 0.5;
        assert!(matches!(combine_max_fidelity(&[a.clone(), b], &[]), Err(ConfigError::AxisMismatch(_))));
        let c = FidelityGrid::new("rJ", "dT", a.x.clone(), a.y.clone(), vec![0.0; 6]);
        assert!(combine_max_fidelity(&[a, c], &[]).is_err());
        assert!(combine_max_fidelity(&[], &[]).is_err());
    }

    #[test]
    fn malformed_grid_csv() {
        assert!(FidelityGrid::read_csv("JT,dT,F\n0,0,0.5\n0,1,x\n").is_err());
        assert!(FidelityGrid::read_csv("JT,dT,F\n0,0,0.5\n0,1,0.5\n1,0,0.5\n").is_err());
    }
}
