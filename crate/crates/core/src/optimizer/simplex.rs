//! Nelder-Mead simplex descent.

/// Outcome of a simplex run.
#[derive(Debug, Clone)]
pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Minimizes `f` from `x0` with an initial simplex of edge `step`, stopping when the simplex
/// diameter drops below `tol` or after `max_iter` iterations.
pub(crate) fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> SimplexResult {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    let mut iterations = 0;
    while iterations < max_iter {
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]).then(i.cmp(&j)));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];
        let diameter = pts
            .iter()
            .map(|p| p.iter().zip(&pts[best]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < tol {
            break;
        }
        iterations += 1;
        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&pts[i]) {
                *c += v;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);
        let along = |t: f64, out: &mut Vec<f64>, worst: &Vec<f64>| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(worst) {
                *o = c + t * (c - w);
            }
        };
        along(1.0, &mut trial, &pts[worst]);
        let fr = f(&trial);
        if fr < vals[best] {
            along(2.0, &mut trial2, &pts[worst]);
            let fe = f(&trial2);
            if fe < fr {
                pts[worst].copy_from_slice(&trial2);
                vals[worst] = fe;
            } else {
                pts[worst].copy_from_slice(&trial);
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second_worst] {
            pts[worst].copy_from_slice(&trial);
            vals[worst] = fr;
            continue;
        }
        let (t, reference) = if fr < vals[worst] {
            (0.5, fr)
        } else {
            (-0.5, vals[worst])
        };
        along(t, &mut trial2, &pts[worst]);
        let fc = f(&trial2);
        if fc < reference {
            pts[worst].copy_from_slice(&trial2);
            vals[worst] = fc;
            continue;
        }
        let anchor = pts[best].clone();
        for &i in &order[1..] {
            for (p, a) in pts[i].iter_mut().zip(&anchor) {
                *p = a + 0.5 * (*p - a);
            }
            vals[i] = f(&pts[i]);
        }
    }
    let best = (0..=n)
        .min_by(|&i, &j| vals[i].total_cmp(&vals[j]).then(i.cmp(&j)))
        .expect("simplex has vertices");
    SimplexResult {
        x: pts[best].clone(),
        value: vals[best],
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(&mut f, &[-1.2, 1.0], 0.5, 1e-10, 5000);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn nonsmooth_abs() {
        let mut f = |x: &[f64]| (x[0] - 0.3).abs() + 2.0 * (x[1] + 0.1).abs();
        let r = nelder_mead(&mut f, &[1.0, 1.0], 0.3, 1e-11, 5000);
        assert!(r.value < 1e-9, "{r:?}");
    }

    #[test]
    fn respects_iteration_budget() {
        let mut f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let r = nelder_mead(&mut f, &[1.0; 4], 0.1, 0.0, 7);
        assert_eq!(r.iterations, 7);
    }
}
