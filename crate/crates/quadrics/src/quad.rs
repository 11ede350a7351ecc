//! One-dimensional adaptive quadrature (Gauss–Kronrod 7-15) and
//! Gauss–Legendre node generation for the tensor rules.

/// Kronrod-15 nodes on [-1, 1] (positive half; symmetric).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
/// Embedded Gauss-7 weights (for the odd-indexed Kronrod nodes).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub err: f64,
    pub evals: u64,
}

fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut resk = 0.0;
    let mut resg = 0.0;
    for i in 0..8 {
        if XGK[i] == 0.0 {
            let v = f(c);
            resk += WGK[i] * v;
            resg += WG[3] * v;
        } else {
            let v1 = f(c - h * XGK[i]);
            let v2 = f(c + h * XGK[i]);
            resk += WGK[i] * (v1 + v2);
            if i % 2 == 1 {
                resg += WG[i / 2] * (v1 + v2);
            }
        }
    }
    (resk * h, (resk - resg).abs() * h)
}

/// Adaptive bisection on [a, b] until the summed error estimate is below
/// `tol` (absolute) or `max_iter` splits have been spent.
pub fn adaptive(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> QuadResult {
    adaptive_with(f, a, b, tol, 2000)
}

pub fn adaptive_with(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_iter: usize,
) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            err: 0.0,
            evals: 0,
        };
    }
    // (err, a, b, value); refine the worst interval first, deterministic
    // tie-break on the left endpoint.
    let (v, e) = gk15(f, a, b);
    let mut intervals = vec![(e, a, b, v)];
    let mut evals = 15u64;
    for _ in 0..max_iter {
        let total_err: f64 = intervals.iter().map(|t| t.0).sum();
        if total_err <= tol {
            break;
        }
        let mut worst = 0usize;
        for (i, t) in intervals.iter().enumerate() {
            let w = &intervals[worst];
            if t.0 > w.0 || (t.0 == w.0 && t.1 < w.1) {
                worst = i;
            }
        }
        let (_, wa, wb, _) = intervals.swap_remove(worst);
        let m = 0.5 * (wa + wb);
        if m == wa || m == wb {
            // interval at floating-point resolution; keep it as converged
            let (v, _) = gk15(f, wa, wb);
            intervals.push((0.0, wa, wb, v));
            evals += 15;
            continue;
        }
        let (v1, e1) = gk15(f, wa, m);
        let (v2, e2) = gk15(f, m, wb);
        evals += 30;
        intervals.push((e1, wa, m, v1));
        intervals.push((e2, m, wb, v2));
    }
    let mut value = 0.0;
    let mut err = 0.0;
    // fixed summation order for determinism
    intervals.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
    for t in &intervals {
        value += t.3;
        err += t.0;
    }
    QuadResult { value, err, evals }
}

/// Integrate over a list of breakpoints, adaptively per piece.
pub fn adaptive_pieces(
    f: &mut dyn FnMut(f64) -> f64,
    points: &[f64],
    tol: f64,
) -> QuadResult {
    let mut value = 0.0;
    let mut err = 0.0;
    let mut evals = 0;
    let per = tol / (points.len().max(2) - 1) as f64;
    for w in points.windows(2) {
        let r = adaptive(f, w[0], w[1], per);
        value += r.value;
        err += r.err;
        evals += r.evals;
    }
    QuadResult { value, err, evals }
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on
/// the Legendre polynomial; deterministic for a given n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Tricomi-style initial guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p0 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss–Legendre rule on [a, b]: `panels` panels of `order` nodes.
pub fn composite_gl(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let c = lo + 0.5 * h;
        for k in 0..order {
            nodes.push(c + 0.5 * h * xs[k]);
            weights.push(0.5 * h * ws[k]);
        }
    }
    (nodes, weights)
}
