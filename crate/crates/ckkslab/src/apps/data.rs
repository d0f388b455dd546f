//! Training sets: CSV ingestion and synthetic Gaussian blobs.

use std::io::Read;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use super::AppError;

/// Feature rows with labels in {-1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
}

impl Dataset {
    pub fn samples(&self) -> usize {
        self.features.len()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    /// z_i = y_i x_i.
    pub fn signed_rows(&self) -> Vec<Vec<f64>> {
        self.features.iter().zip(&self.labels).map(|(x, &y)| x.iter().map(|v| v * y).collect()).collect()
    }

    /// Mean logistic loss of the weights.
    pub fn loss(&self, w: &[f64]) -> f64 {
        let n = self.samples() as f64;
        self.signed_rows()
            .iter()
            .map(|z| {
                let t: f64 = z.iter().zip(w).map(|(a, b)| a * b).sum();
                (-t).exp().ln_1p()
            })
            .sum::<f64>()
            / n
    }

    pub fn accuracy(&self, w: &[f64]) -> f64 {
        let ok = self.signed_rows().iter().filter(|z| z.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() > 0.0).count();
        ok as f64 / self.samples() as f64
    }

    /// Reads a CSV with a header row. The column named `label` (or `y`)
    /// holds the class; values of 0 are mapped to -1. Every other column is
    /// a feature.
    pub fn from_csv(reader: impl Read) -> Result<Self, AppError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        let label_col = headers
            .iter()
            .position(|h| matches!(h.trim().to_ascii_lowercase().as_str(), "label" | "y"))
            .ok_or_else(|| AppError::Data("missing label column".into()))?;
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let mut row = Vec::with_capacity(rec.len() - 1);
            for (i, cell) in rec.iter().enumerate() {
                let v: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|_| AppError::Data(format!("row {}: bad number {cell:?}", line + 1)))?;
                if i == label_col {
                    labels.push(if v > 0.0 { 1.0 } else { -1.0 });
                } else {
                    row.push(v);
                }
            }
            features.push(row);
        }
        if features.is_empty() {
            return Err(AppError::Data("no samples".into()));
        }
        Ok(Self { features, labels })
    }

    pub fn to_csv(&self) -> Result<String, AppError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = (0..self.dim()).map(|j| format!("x{j}")).collect();
        header.push("label".into());
        w.write_record(&header)?;
        for (x, y) in self.features.iter().zip(&self.labels) {
            let mut rec: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            rec.push(y.to_string());
            w.write_record(&rec)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| AppError::Data(e.to_string()))?)
            .map_err(|e| AppError::Data(e.to_string()))
    }
}

/// Two Gaussian blobs centred at +-`separation` / 2 on every axis, with
/// alternating labels.
pub fn gaussian_blobs(samples: usize, dim: usize, separation: f64, stddev: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, stddev).expect("positive stddev");
    let mut features = Vec::with_capacity(samples);
    let mut labels = Vec::with_capacity(samples);
    for i in 0..samples {
        let y = if i % 2 == 0 { 1.0 } else { -1.0 };
        features.push((0..dim).map(|_| y * separation / 2.0 + noise.sample(&mut rng)).collect());
        labels.push(y);
    }
    Dataset { features, labels }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip() {
        let d = gaussian_blobs(6, 3, 1.0, 0.3, 1);
        let text = d.to_csv().unwrap();
        assert!(text.starts_with("x0,x1,x2,label"));
        assert_eq!(Dataset::from_csv(text.as_bytes()).unwrap(), d);
    }

    #[test]
    fn csv_errors() {
        assert!(Dataset::from_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(Dataset::from_csv("a,label\nx,1\n".as_bytes()).is_err());
        let d = Dataset::from_csv("y,a\n0,2.5\n1,-1\n".as_bytes()).unwrap();
        assert_eq!(d.labels, vec![-1.0, 1.0]);
        assert_eq!(d.features, vec![vec![2.5], vec![-1.0]]);
    }

    #[test]
    fn blobs_are_deterministic_and_separable() {
        let a = gaussian_blobs(32, 4, 2.0, 0.3, 7);
        assert_eq!(a, gaussian_blobs(32, 4, 2.0, 0.3, 7));
        assert_eq!(a.accuracy(&[1.0; 4]), 1.0);
    }
}
