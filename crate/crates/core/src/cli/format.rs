//! Deterministic text, JSON and CSV rendering.

use num_complex::Complex64;

use crate::spin_core::CMatrix;

/// Relative threshold below which a value in a table prints as `0`.
pub const SNAP_REL: f64 = 1e-12;

/// Formats with 12 significant digits, trailing zeros trimmed; `|x| <
/// snap` prints as `0`.
pub fn fmt_num(x: f64, snap: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 || x.abs() < snap {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let out = if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    };
    if out == "-0" {
        "0".into()
    } else {
        out
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn snap_for<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    SNAP_REL * values.into_iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

fn matrix_snap(m: &CMatrix) -> f64 {
    SNAP_REL * m.iter().fold(0.0f64, |a, z| a.max(z.re.abs()).max(z.im.abs()))
}

fn fmt_complex(z: Complex64, snap: f64, real_only: bool) -> String {
    let re = fmt_num(z.re, snap);
    if real_only {
        return re;
    }
    let im = fmt_num(z.im, snap);
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

/// Pads columns to equal width; the first column is left-aligned, the rest
/// right-aligned.
pub fn render_table(header: &[String], rows: &[Vec<String>]) -> String {
    let ncols = header.len();
    let mut widths = vec![0usize; ncols];
    for r in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for r in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let mut line = String::new();
        for (c, (cell, w)) in r.iter().zip(&widths).enumerate() {
            let pad = " ".repeat(w - cell.chars().count());
            if c == 0 {
                line.push_str(cell);
                line.push_str(&pad);
            } else {
                line.push_str("  ");
                line.push_str(&pad);
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn json_string_list(items: &[String]) -> String {
    let parts: Vec<String> = items.iter().map(|s| json_string(s)).collect();
    format!("[{}]", parts.join(","))
}

/// Labeled matrix in the three output formats.
pub struct LabeledMatrix<'a> {
    pub rows: &'a [String],
    pub cols: &'a [String],
    pub entries: &'a CMatrix,
}

impl LabeledMatrix<'_> {
    fn real_only(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0 || z.im.abs() < matrix_snap(self.entries))
    }

    pub fn table(&self, corner: &str) -> String {
        let snap = matrix_snap(self.entries);
        let real = self.real_only();
        let mut header = vec![corner.to_string()];
        header.extend(self.cols.iter().cloned());
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(r, label)| {
                let mut row = vec![label.clone()];
                row.extend((0..self.cols.len()).map(|c| fmt_complex(self.entries[(r, c)], snap, real)));
                row
            })
            .collect();
        render_table(&header, &rows)
    }

    /// `{"rows":[…],"cols":[…],"entries":[[[re,im],…],…]}`
    pub fn json(&self) -> String {
        let snap = matrix_snap(self.entries);
        let rows: Vec<String> = (0..self.rows.len())
            .map(|r| {
                let cells: Vec<String> = (0..self.cols.len())
                    .map(|c| {
                        let z = self.entries[(r, c)];
                        format!("[{},{}]", fmt_num(z.re, snap), fmt_num(z.im, snap))
                    })
                    .collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!(
            "{{\"rows\":{},\"cols\":{},\"entries\":[{}]}}\n",
            json_string_list(self.rows),
            json_string_list(self.cols),
            rows.join(",")
        )
    }

    pub fn csv(&self, corner: &str) -> String {
        let snap = matrix_snap(self.entries);
        let real = self.real_only();
        let mut header = vec![corner.to_string()];
        header.extend(self.cols.iter().cloned());
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(r, label)| {
                let mut row = vec![label.clone()];
                row.extend((0..self.cols.len()).map(|c| fmt_complex(self.entries[(r, c)], snap, real)));
                row
            })
            .collect();
        to_csv(&header, &rows)
    }
}

pub fn to_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
