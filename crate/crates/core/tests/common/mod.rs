#![allow(dead_code)]

use benchdyn::ingest::ResultRecord;
use chrono::NaiveDate;

pub fn day(offset: i64) -> NaiveDate {
    NaiveDate::from_ymd_opt(2015, 1, 1).unwrap() + chrono::Duration::days(offset)
}

pub fn record(benchmark: &str, metric: &str, value: f64, date: NaiveDate, paper: &str) -> ResultRecord {
    ResultRecord {
        benchmark_id: benchmark.to_string(),
        dataset_name: benchmark.to_string(),
        task_name: "task".to_string(),
        metric_name: metric.to_string(),
        raw_value: value,
        value,
        date,
        paper_id: paper.to_string(),
        model_name: None,
    }
}

/// Series with one result per given day offset.
pub fn series(benchmark: &str, values: &[f64], offsets: &[i64]) -> Vec<ResultRecord> {
    values
        .iter()
        .zip(offsets)
        .enumerate()
        .map(|(i, (v, o))| record(benchmark, "score", *v, day(*o), &format!("{benchmark}-p{i}")))
        .collect()
}

/// Reference Welch statistic and Welch-Satterthwaite degrees of freedom.
pub fn welch_reference(a: &[f64], b: &[f64]) -> (f64, f64) {
    let stats = |x: &[f64]| {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (n, mean, var)
    };
    let (na, ma, va) = stats(a);
    let (nb, mb, vb) = stats(b);
    let qa = va / na;
    let qb = vb / nb;
    let t = (ma - mb) / (qa + qb).sqrt();
    let df = (qa + qb).powi(2) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    (t, df)
}

#[allow(clippy::too_many_arguments)]
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Upper tail of Student's t by quadrature. Substituting t = sqrt(df) tan(theta)
/// turns the density into a multiple of cos(theta)^(df - 1) on (-pi/2, pi/2).
pub fn t_upper_tail_oracle(t: f64, df: f64) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let f = |theta: f64| theta.cos().max(0.0).powf(df - 1.0);
    let lower = (t / df.sqrt()).atan();
    let total = 2.0 * adaptive_simpson(f, 0.0, half_pi, 1e-14);
    adaptive_simpson(f, lower, half_pi, 1e-14) / total
}

/// Oracle for the running-max subsequence: brute force over every subset,
/// keeping the strictly increasing subsequences whose every member beats
/// everything before it in the input.
pub fn brute_force_sota(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut best: Vec<usize> = Vec::new();
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let valid = idx.iter().all(|&i| values[..i].iter().all(|&v| values[i] > v))
            && (0..n).all(|j| idx.contains(&j) || values[..j].iter().any(|&v| v >= values[j]));
        if valid && idx.len() > best.len() {
            best = idx;
        }
    }
    best
}
