//! Generates the 500-row synthetic LibSVM fixture used by the tests.
//!
//! Rows mimic the layout of the adult (a9a) data: 14 categorical attributes,
//! one-hot encoded into 123 binary columns, so every row has exactly 14
//! active features. Category frequencies are skewed (Zipf-like), as in the
//! census attributes. Labels come from a planted linear model with Gaussian
//! label noise and are balanced 250/250 by rejection.
//!
//! cargo run -p sgdol-core --example gen_fixture -- crates/core/tests/fixtures/synthetic500.svm

use std::fs::File;
use std::io::BufWriter;

use sgdol::oracles::{write_libsvm, Dataset};
use sgdol::RngStream;

const ROWS: usize = 500;
/// Category counts per attribute; they sum to 123.
const GROUPS: [usize; 14] = [5, 7, 5, 16, 6, 7, 14, 6, 5, 2, 2, 2, 5, 41];
const LABEL_NOISE: f64 = 1.0;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "synthetic500.svm".to_string());
    let features: usize = GROUPS.iter().sum();
    let mut rng = RngStream::new(20_190_601, 0);
    let planted: Vec<f64> = (0..features).map(|_| rng.standard_normal()).collect();
    let offset: f64 = -planted.iter().sum::<f64>() * GROUPS.len() as f64 / features as f64;

    // cumulative Zipf(1.2) weights per group
    let cdfs: Vec<Vec<f64>> = GROUPS
        .iter()
        .map(|&k| {
            let w: Vec<f64> = (1..=k).map(|j| (j as f64).powf(-1.2)).collect();
            let total: f64 = w.iter().sum();
            w.iter()
                .scan(0.0, |acc, v| {
                    *acc += v / total;
                    Some(*acc)
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(ROWS * (features + 1));
    let mut labels = Vec::with_capacity(ROWS);
    let (mut pos, mut neg) = (0, 0);
    while labels.len() < ROWS {
        let mut row = vec![0.0; features];
        let mut start = 0;
        for (g, &k) in GROUPS.iter().enumerate() {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            let j = cdfs[g].iter().position(|c| u < *c).unwrap_or(k - 1);
            row[start + j] = 1.0;
            start += k;
        }
        let score: f64 = row.iter().zip(&planted).map(|(a, w)| a * w).sum::<f64>()
            + offset
            + LABEL_NOISE * rng.standard_normal();
        let label = if score > 0.0 { 1.0 } else { -1.0 };
        let slot = if label > 0.0 { &mut pos } else { &mut neg };
        if *slot == ROWS / 2 {
            continue;
        }
        *slot += 1;
        rows.extend_from_slice(&row);
        rows.push(1.0);
        labels.push(label);
    }

    let data = Dataset::new(rows, labels, features + 1, true).expect("valid dataset");
    let out = BufWriter::new(File::create(&path).expect("create output"));
    write_libsvm(&data, out).expect("write fixture");
    eprintln!("wrote {ROWS} rows to {path}");
}
