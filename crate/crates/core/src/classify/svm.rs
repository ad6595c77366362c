//! C-SVM on a precomputed kernel, solved by SMO with second-order working
//! set selection, and one-vs-one multiclass voting.

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const SMO_TOLERANCE: f64 = 1e-3;
const TAU: f64 = 1e-12;
const MAX_ITER: usize = 10_000_000;

/// Two-class problem between `classes.0` (positive side) and `classes.1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryModel {
    pub classes: (usize, usize),
    /// Support vectors as indices into the training set.
    pub support: Vec<usize>,
    /// `alpha_i * y_i` for each support vector.
    pub coef: Vec<f64>,
    /// Decision value is `sum coef_i K(x, s_i) - rho`.
    pub rho: f64,
    pub iterations: usize,
}

impl BinaryModel {
    pub fn decision(&self, k_row: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(&s, &c)| c * k_row[s])
            .sum::<f64>()
            - self.rho
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    /// Distinct training labels, ascending.
    pub classes: Vec<usize>,
    /// One model per class pair `(a, b)` with `a < b`, in lexicographic order.
    pub models: Vec<BinaryModel>,
    pub n_train: usize,
    pub c: f64,
}

/// Dual solution of a binary problem.
#[derive(Clone, Debug)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub objective: f64,
    pub iterations: usize,
}

/// Minimizes `0.5 a'Qa - sum a` subject to `0 <= a <= c` and `y'a = 0`,
/// with `Q_ij = y_i y_j K_ij`. `y` entries are `+1` or `-1`.
pub fn smo_solve(k: &[Vec<f64>], y: &[f64], c: f64) -> DualSolution {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i][j];
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let up = |a: f64, yi: f64| if yi > 0.0 { a < c } else { a > 0.0 };
    let low = |a: f64, yi: f64| if yi > 0.0 { a > 0.0 } else { a < c };
    let mut iterations = 0;
    while iterations < MAX_ITER {
        // Maximal violating index, lowest index on ties.
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if up(alpha[t], y[t]) && -y[t] * grad[t] > gmax {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !low(alpha[t], y[t]) {
                continue;
            }
            gmax2 = gmax2.max(y[t] * grad[t]);
            if i == usize::MAX {
                continue;
            }
            let b = gmax + y[t] * grad[t];
            if b > 0.0 {
                let mut a = k[i][i] + k[t][t] - 2.0 * k[i][t];
                if a <= 0.0 {
                    a = TAU;
                }
                let obj = -(b * b) / a;
                if obj < best {
                    best = obj;
                    j = t;
                }
            }
        }
        if gmax + gmax2 < SMO_TOLERANCE || i == usize::MAX || j == usize::MAX {
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = k[i][i] + k[j][j] - 2.0 * k[i][j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = k[i][i] + k[j][j] - 2.0 * k[i][j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }
    if iterations == MAX_ITER {
        log::warn!("SMO stopped after {MAX_ITER} iterations without reaching tolerance");
    }

    // Bias from free variables, or the midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };
    let objective = (0..n).map(|t| alpha[t] * (grad[t] - 1.0)).sum::<f64>() / 2.0;
    DualSolution {
        alpha,
        rho,
        objective,
        iterations,
    }
}

fn check_square(k: &[Vec<f64>], n: usize) -> Result<()> {
    if k.len() != n || k.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!("kernel matrix must be {n} x {n}")));
    }
    Ok(())
}

/// Trains one binary model per class pair on the training kernel `k`.
pub fn svm_train(k: &[Vec<f64>], labels: &[usize], c: f64) -> Result<SvmModel> {
    let n = labels.len();
    check_square(k, n)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput("C must be positive".into()));
    }
    if k.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("kernel matrix has non-finite entries".into()));
    }
    if looks_indefinite(k) {
        log::warn!("kernel matrix is not positive semidefinite; training anyway");
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::InvalidInput("training set needs at least two classes".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..classes.len())
        .flat_map(|a| (a + 1..classes.len()).map(move |b| (a, b)))
        .collect();
    let models = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (ca, cb) = (classes[a], classes[b]);
            let idx: Vec<usize> = (0..n).filter(|&i| labels[i] == ca || labels[i] == cb).collect();
            let y: Vec<f64> = idx.iter().map(|&i| if labels[i] == ca { 1.0 } else { -1.0 }).collect();
            let sub: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| k[i][j]).collect()).collect();
            let sol = smo_solve(&sub, &y, c);
            let (support, coef) = idx
                .iter()
                .zip(sol.alpha.iter().zip(&y))
                .filter(|(_, (a, _))| **a > 0.0)
                .map(|(&i, (a, yi))| (i, a * yi))
                .unzip();
            BinaryModel {
                classes: (ca, cb),
                support,
                coef,
                rho: sol.rho,
                iterations: sol.iterations,
            }
        })
        .collect();
    Ok(SvmModel {
        classes,
        models,
        n_train: n,
        c,
    })
}

/// Cheap necessary conditions for positive semidefiniteness: non-negative
/// diagonal and every 2x2 principal minor non-negative.
fn looks_indefinite(k: &[Vec<f64>]) -> bool {
    let n = k.len();
    (0..n).any(|i| k[i][i] < 0.0 || (0..i).any(|j| k[i][j] * k[i][j] > k[i][i] * k[j][j] * (1.0 + 1e-9) + 1e-12))
}

/// Predicted labels for rows of the test-by-train kernel. Vote ties go to
/// the lowest class.
pub fn svm_predict(model: &SvmModel, k_cross: &[Vec<f64>]) -> Result<Vec<usize>> {
    if k_cross.iter().any(|r| r.len() != model.n_train) {
        return Err(Error::InvalidInput(format!(
            "kernel rows must have one column per training graph ({})",
            model.n_train
        )));
    }
    Ok(k_cross
        .iter()
        .map(|row| {
            let mut votes = vec![0usize; model.classes.len()];
            for m in &model.models {
                let winner = if m.decision(row) > 0.0 {
                    m.classes.0
                } else {
                    m.classes.1
                };
                votes[model.classes.binary_search(&winner).expect("class of a trained pair")] += 1;
            }
            let mut best = 0;
            for (c, &v) in votes.iter().enumerate() {
                if v > votes[best] {
                    best = c;
                }
            }
            model.classes[best]
        })
        .collect())
}
