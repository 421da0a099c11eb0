/// Mean and population standard deviation; `None` for an empty sample.
pub fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().fold(0.0, |a, x| a + x) / n;
    let var = xs.iter().fold(0.0, |a, x| a + (x - mean) * (x - mean)) / n;
    Some((mean, var.sqrt()))
}

/// `mean ± std`, or `-` when nothing was observed.
pub fn format_mean_std(v: Option<(f64, f64)>, digits: usize) -> String {
    match v {
        Some((m, s)) => format!("{m:.digits$} ± {s:.digits$}"),
        None => "-".into(),
    }
}
