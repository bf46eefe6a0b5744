//! Number formatting and matrix reports.

use serde_json::json;

/// `x` rounded to `digits` significant digits, then printed in the shortest
/// form that reads back to the rounded value.
pub fn num(x: f64, digits: u32) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1) as usize, x)
        .parse()
        .expect("formatted float parses");
    // Avoid printing "-0".
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded}")
}

pub fn round(x: f64, digits: u32) -> f64 {
    num(x, digits).parse().unwrap_or(x)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Symmetric all-pairs distances with a zero diagonal.
pub struct MatrixReport {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub metric: String,
}

impl MatrixReport {
    pub fn to_csv(&self, digits: u32) -> String {
        let mut out = String::new();
        out.push_str("tree");
        for l in &self.labels {
            out.push(',');
            out.push_str(&csv_field(l));
        }
        out.push_str("\r\n");
        for (label, row) in self.labels.iter().zip(&self.values) {
            out.push_str(&csv_field(label));
            for &v in row {
                out.push(',');
                out.push_str(&num(v, digits));
            }
            out.push_str("\r\n");
        }
        out
    }

    pub fn to_json(&self, digits: u32) -> String {
        let values: Vec<Vec<f64>> = self
            .values
            .iter()
            .map(|row| row.iter().map(|&v| round(v, digits)).collect())
            .collect();
        let doc = json!({
            "metric": self.metric,
            "labels": self.labels,
            "values": values,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("matrix serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(num(2.0, 12), "2");
        assert_eq!(num(0.1 + 0.2, 12), "0.3");
        assert_eq!(num(2.0000000004, 12), "2.0000000004");
        assert_eq!(num(2.0000000004, 6), "2");
        assert_eq!(num(-1.5, 12), "-1.5");
        assert_eq!(num(-0.0, 12), "0");
        assert_eq!(num(f64::INFINITY, 12), "inf");
    }

    #[test]
    fn csv_is_rfc4180() {
        let m = MatrixReport {
            labels: vec!["a.nwk:0".into(), "b,c:1".into()],
            values: vec![vec![0.0, 1.5], vec![1.5, 0.0]],
            metric: "linf".into(),
        };
        assert_eq!(m.to_csv(12), "tree,a.nwk:0,\"b,c:1\"\r\na.nwk:0,0,1.5\r\n\"b,c:1\",1.5,0\r\n");
    }
}
