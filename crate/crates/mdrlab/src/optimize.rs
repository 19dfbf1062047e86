//! Small derivative-free searches used by the region and bound solvers.
//!
//! Everything here is deterministic: fixed iteration budgets, no randomness.
//! Callers provide coarse scans to bracket a global optimum and these
//! routines polish it.

/// Minimizes f over [lo, hi] by golden-section search; f should be unimodal
/// on the interval. Returns (argmin, min).
pub fn golden_min(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// Scans f over `samples` points of [lo, hi] inclusive, then golden-refines
/// around the best sample. Robust to mild multimodality. Returns (argmin, min).
pub fn scan_then_golden(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    samples: usize,
    xtol: f64,
) -> (f64, f64) {
    assert!(samples >= 3, "need at least three scan points");
    let step = (hi - lo) / (samples - 1) as f64;
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    let mut values = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = lo + step * i as f64;
        let v = f(x);
        values.push(v);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = if best_i == 0 { lo } else { lo + step * (best_i - 1) as f64 };
    let b = if best_i + 1 >= samples { hi } else { lo + step * (best_i + 1) as f64 };
    let (x, v) = golden_min(f, a, b, xtol);
    if v < best_v {
        (x, v)
    } else {
        (lo + step * best_i as f64, best_v)
    }
}

/// Finds the first t in (0, t_max] with g(t) >= 0 by coarse scan plus
/// bisection; g(0) must be negative. Returns None when no crossing exists.
pub fn first_crossing(g: &dyn Fn(f64) -> f64, t_max: f64, steps: usize, iters: usize) -> Option<f64> {
    let step = t_max / steps as f64;
    let mut lo = 0.0;
    let mut hi = f64::NAN;
    for i in 1..=steps {
        let t = if i == steps { t_max } else { step * i as f64 };
        if g(t) >= 0.0 {
            hi = t;
            break;
        }
        lo = t;
    }
    if hi.is_nan() {
        return None;
    }
    let mut hi = hi;
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Nelder-Mead maximization of f from a start point, with per-coordinate
/// initial steps. Returns (argmax, max). Deterministic fixed-budget variant.
pub fn nelder_mead_max(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    max_iters: usize,
    ftol: f64,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let neg = |x: &[f64]| -f(x);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for k in 0..n {
        let mut p = start.to_vec();
        p[k] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| neg(p)).collect();

    for _ in 0..max_iters {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite objective"));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];
        if (values[worst] - values[best]).abs() < ftol {
            break;
        }

        let mut centroid = vec![0.0; n];
        for &i in order.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x / n as f64;
            }
        }
        let lerp = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = lerp(1.0);
        let fr = neg(&reflected);
        if fr < values[best] {
            let expanded = lerp(2.0);
            let fe = neg(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = lerp(-0.5);
            let fc = neg(&contracted);
            if fc < values[worst] {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                let best_point = simplex[best].clone();
                for i in 0..=n {
                    if i == best {
                        continue;
                    }
                    for (x, b) in simplex[i].iter_mut().zip(&best_point) {
                        *x = b + 0.5 * (*x - b);
                    }
                    values[i] = neg(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), -values[best])
}
