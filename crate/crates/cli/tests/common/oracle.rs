//! Reference implementations written independently of the engine, used to
//! derive expected values.

use std::path::Path;

use normprobe_cli::{datasets, nprb};
use normprobe_core::datamodel::DatasetRows;
use normprobe_core::probe::{stratified_splits, SplitSpec};

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                let (upper, lower) = a.split_at_mut(row);
                for (target, source) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *target -= factor * source;
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `w . x + b` with the intercept stored last in `theta`.
pub fn decision(theta: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    theta[..d].iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + theta[d]
}

/// Mean negative log-likelihood, using log(1 + e^-m) for margin m.
pub fn mean_nll(x: &[Vec<f64>], y: &[bool], theta: &[f64]) -> f64 {
    let total: f64 = x
        .iter()
        .zip(y)
        .map(|(row, &label)| {
            let z = decision(theta, row);
            let m = if label { z } else { -z };
            if m > 0.0 {
                (-m).exp().ln_1p()
            } else {
                -m + m.exp().ln_1p()
            }
        })
        .sum();
    total / x.len() as f64
}

fn gradient_and_hessian(x: &[Vec<f64>], y: &[bool], theta: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let p = theta.len();
    let n = x.len() as f64;
    let mut g = vec![0.0; p];
    let mut h = vec![vec![0.0; p]; p];
    for (row, &label) in x.iter().zip(y) {
        let s = sigmoid(decision(theta, row));
        let r = s - if label { 1.0 } else { 0.0 };
        let weight = s * (1.0 - s);
        let feature = |k: usize| if k < row.len() { row[k] } else { 1.0 };
        for (a, (ga, ha)) in g.iter_mut().zip(&mut h).enumerate() {
            *ga += r * feature(a) / n;
            for (b, hab) in ha.iter_mut().enumerate() {
                *hab += weight * feature(a) * feature(b) / n;
            }
        }
    }
    (g, h)
}

/// Newton's method from `start`. Steps are halved until the loss stops
/// rising; once the Newton decrement is below 1e-12 the loss no longer
/// resolves progress and full steps are taken. `None` when the likelihood has
/// no finite maximiser in reach (separable data).
pub fn newton_logistic(x: &[Vec<f64>], y: &[bool], start: Vec<f64>) -> Option<(Vec<f64>, f64)> {
    let mut theta = start;
    let mut loss = mean_nll(x, y, &theta);
    let mut polish = 0;
    for _ in 0..2000 {
        let (g, h) = gradient_and_hessian(x, y, &theta);
        let step = solve(h, g.clone())?;
        let decrement: f64 = g.iter().zip(&step).map(|(a, b)| a * b).sum();
        if decrement < 1e-12 {
            if decrement < 1e-30 || polish == 5 {
                return theta.iter().all(|v| v.abs() < 1e3).then_some((theta, loss));
            }
            polish += 1;
            theta = theta.iter().zip(&step).map(|(a, s)| a - s).collect();
            loss = mean_nll(x, y, &theta);
            continue;
        }
        let mut t = 1.0;
        loop {
            let candidate: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a - t * s).collect();
            let next = mean_nll(x, y, &candidate);
            if next <= loss {
                theta = candidate;
                loss = next;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                return None;
            }
        }
        if theta.iter().any(|v| v.abs() > 1e6) {
            return None;
        }
    }
    None
}

/// Exhaustive grid over `[-range, range]^p` followed by refinement of the
/// best grid point with Newton's method.
pub fn grid_then_newton(
    x: &[Vec<f64>],
    y: &[bool],
    range: f64,
    steps: usize,
) -> Option<(Vec<f64>, f64)> {
    let p = x[0].len() + 1;
    let mut best = (vec![0.0; p], mean_nll(x, y, &vec![0.0; p]));
    let mut index = vec![0usize; p];
    let coordinate = |i: usize| -range + 2.0 * range * i as f64 / (steps - 1) as f64;
    loop {
        let theta: Vec<f64> = index.iter().map(|&i| coordinate(i)).collect();
        let loss = mean_nll(x, y, &theta);
        if loss < best.1 {
            best = (theta, loss);
        }
        let mut k = 0;
        loop {
            if k == p {
                return newton_logistic(x, y, best.0);
            }
            index[k] += 1;
            if index[k] < steps {
                break;
            }
            index[k] = 0;
            k += 1;
        }
    }
}

/// Per-fold expected values for one model on the planted norms.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedRow {
    pub model: String,
    pub attribute: String,
    pub repeat: usize,
    pub fold: usize,
    pub test_positive_rate: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub f1_selectivity: f64,
}

pub const EXPECTED_HEADER: &str =
    "model,attribute,repeat,fold,test_positive_rate,precision,recall,f1,f1_selectivity";

fn share(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Cross-validated logistic probes on a norms dataset, computed with the
/// Newton fit above and hand-counted metrics. Fold assignment is the only
/// piece taken from the engine.
pub fn planted_pipeline(embeddings: &Path, norms: &Path, spec: &SplitSpec) -> Vec<ExpectedRow> {
    let table = nprb::read(embeddings).expect("embeddings");
    let companion = datasets::companion_path(norms, None).expect("companion");
    let data = datasets::read_norms(norms, &companion).expect("norms");
    let rows: Vec<Vec<f64>> = data
        .concepts()
        .iter()
        .map(|c| table.get(c).expect("every concept embedded").to_vec())
        .collect();
    let mut out = Vec::new();
    for (j, attribute) in data.attributes().iter().enumerate() {
        let y = data.column(j);
        for split in stratified_splits(&y, spec).expect("splits") {
            let xs: Vec<Vec<f64>> = split.train.iter().map(|&i| rows[i].clone()).collect();
            let ys: Vec<bool> = split.train.iter().map(|&i| y[i]).collect();
            let (theta, _) = newton_logistic(&xs, &ys, vec![0.0; rows[0].len() + 1])
                .unwrap_or_else(|| {
                    panic!("{} fold {} has no finite fit", attribute.name(), split.fold)
                });
            let (mut tp, mut fp, mut fn_, mut pos) = (0, 0, 0, 0);
            for &i in &split.test {
                let predicted = decision(&theta, &rows[i]) > 0.0;
                pos += usize::from(y[i]);
                match (predicted, y[i]) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    (false, false) => {}
                }
            }
            let q = share(pos, split.test.len());
            let f1 = share(2 * tp, 2 * tp + fp + fn_);
            out.push(ExpectedRow {
                model: table.model_name().to_owned(),
                attribute: attribute.name().to_owned(),
                repeat: split.repeat,
                fold: split.fold,
                test_positive_rate: q,
                precision: share(tp, tp + fp),
                recall: share(tp, tp + fn_),
                f1,
                f1_selectivity: f1 - q,
            });
        }
    }
    out
}

pub fn expected_csv(rows: &[ExpectedRow]) -> String {
    let mut s = format!("{EXPECTED_HEADER}\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.model,
            r.attribute,
            r.repeat,
            r.fold,
            r.test_positive_rate,
            r.precision,
            r.recall,
            r.f1,
            r.f1_selectivity
        ));
    }
    s
}

pub fn parse_expected(text: &str) -> Vec<ExpectedRow> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(EXPECTED_HEADER));
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let num = |k: usize| -> f64 { f[k].parse().expect("number") };
            ExpectedRow {
                model: f[0].to_owned(),
                attribute: f[1].to_owned(),
                repeat: f[2].parse().expect("repeat"),
                fold: f[3].parse().expect("fold"),
                test_positive_rate: num(4),
                precision: num(5),
                recall: num(6),
                f1: num(7),
                f1_selectivity: num(8),
            }
        })
        .collect()
}
