//! Scalar and simplex maximisers used by the time and state searches.

use crate::error::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// `count` points spaced evenly in `ln t` on `[lo, hi]`, both ends included.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Index of the largest value; ties resolve to the smallest index.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Golden-section maximisation on `[a, b]` until `b − a ≤ rel_width · midpoint`.
///
/// Returns the best point evaluated, ties going to the smaller abscissa.
pub fn golden_section_max<F>(mut f: F, mut a: f64, mut b: f64, rel_width: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f2 > f1 { (x2, f2) } else { (x1, f1) };
    while b - a > rel_width * 0.5 * (a + b).abs() {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
            if f1 > best.1 || (f1 == best.1 && x1 < best.0) {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub initial_step: f64,
    pub max_evals: usize,
    /// Stop when the spread of simplex values falls below this, relative to the best value.
    pub value_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { initial_step: 0.25, max_evals: 200, value_tol: 1e-9 }
    }
}

/// Nelder–Mead maximisation from `start`. Returns the best point seen and its value.
pub fn nelder_mead_max<F>(mut f: F, start: &[f64], options: &SimplexOptions) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let d = start.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((start.to_vec(), eval(start, &mut evals)?));
    for i in 0..d {
        let mut x = start.to_vec();
        x[i] += if x[i].abs() > 1e-12 { options.initial_step * x[i].signum() } else { options.initial_step };
        let v = eval(&x, &mut evals)?;
        simplex.push((x, v));
    }
    loop {
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let best = simplex[0].1;
        let worst = simplex[d].1;
        if evals >= options.max_evals || (best - worst).abs() <= options.value_tol * best.abs().max(1e-300) {
            break;
        }
        let centroid: Vec<f64> = (0..d).map(|j| simplex[..d].iter().map(|(x, _)| x[j]).sum::<f64>() / d as f64).collect();
        let toward = |coef: f64, from: &[f64]| -> Vec<f64> { centroid.iter().zip(from).map(|(c, w)| c + coef * (c - w)).collect() };
        let worst_point = simplex[d].0.clone();
        let reflected = toward(1.0, &worst_point);
        let fr = eval(&reflected, &mut evals)?;
        if fr > simplex[0].1 {
            let expanded = toward(2.0, &worst_point);
            let fe = eval(&expanded, &mut evals)?;
            simplex[d] = if fe > fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr > simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr > worst {
                let x = toward(0.5, &worst_point);
                let v = eval(&x, &mut evals)?;
                (x, v)
            } else {
                let x = toward(-0.5, &worst_point);
                let v = eval(&x, &mut evals)?;
                (x, v)
            };
            if fc > worst.max(fr) {
                simplex[d] = (contracted, fc);
            } else {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = anchor.iter().zip(&vertex.0).map(|(a, v)| a + 0.5 * (v - a)).collect();
                    let v = eval(&x, &mut evals)?;
                    *vertex = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(simplex.swap_remove(0))
}
