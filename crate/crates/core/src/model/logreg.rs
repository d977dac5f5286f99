use ndarray::{Array1, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub max_iter: usize,
    /// Stop once the gradient's largest absolute component is below this.
    pub tol: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel<T> {
    pub weights: Vec<T>,
    pub bias: T,
    pub c: T,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value after each accepted step, starting at the initial point.
    #[serde(skip)]
    pub loss_trace: Vec<T>,
}

fn softplus<T: Real>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// Mean logistic loss plus `|w|^2 / (2 C m)`, with its gradient in the
/// weights and in the bias.
pub fn loss_and_gradient<T: Real>(
    x: ArrayView2<T>,
    y: &[bool],
    w: ArrayView1<T>,
    b: T,
    c: T,
) -> (T, Array1<T>, T) {
    let m = T::from_count(x.nrows());
    let z = x.dot(&w) + b;
    let mut loss = T::zero();
    let mut resid = Array1::zeros(z.len());
    for ((zi, &yi), r) in z.iter().zip(y).zip(resid.iter_mut()) {
        loss = loss + if yi { softplus(-*zi) } else { softplus(*zi) };
        *r = sigmoid(*zi) - if yi { T::one() } else { T::zero() };
    }
    let penalty = w.dot(&w) / (T::lit(2.0) * c * m);
    let grad_w = x.t().dot(&resid) / m + &w.mapv(|v| v / (c * m));
    let grad_b = resid.sum() / m;
    (loss / m + penalty, grad_w, grad_b)
}

fn loss_only<T: Real>(x: ArrayView2<T>, y: &[bool], w: ArrayView1<T>, b: T, c: T) -> T {
    let m = T::from_count(x.nrows());
    let z = x.dot(&w) + b;
    let loss: T = z
        .iter()
        .zip(y)
        .map(|(zi, &yi)| if yi { softplus(-*zi) } else { softplus(*zi) })
        .sum();
    loss / m + w.dot(&w) / (T::lit(2.0) * c * m)
}

/// Deterministic full-batch gradient descent with Armijo backtracking from
/// the zero vector.
pub fn train_logreg<T: Real>(
    x: ArrayView2<T>,
    y: &[bool],
    c: T,
    opts: TrainOptions,
) -> Result<LogRegModel<T>, ModelError> {
    if x.nrows() != y.len() {
        return Err(ModelError::Shape(format!("{} rows vs {} labels", x.nrows(), y.len())));
    }
    if !(c > T::zero()) {
        return Err(ModelError::InvalidParameter(format!("C must be positive, got {c}")));
    }
    if y.iter().all(|&l| l) || y.iter().all(|&l| !l) {
        return Err(ModelError::SingleClassLabels);
    }
    let tol = T::lit(opts.tol);
    let mut w = Array1::<T>::zeros(x.ncols());
    let mut b = T::zero();
    let (mut loss, mut gw, mut gb) = loss_and_gradient(x, y, w.view(), b, c);
    let mut trace = vec![loss];
    let mut step = T::one();
    let mut iterations = 0;
    let mut converged = false;
    let armijo = T::lit(1e-4);

    while iterations < opts.max_iter {
        let gmax = gw.iter().fold(gb.abs(), |acc, g| acc.max(g.abs()));
        if gmax < tol {
            converged = true;
            break;
        }
        let gnorm2 = gw.dot(&gw) + gb * gb;
        step = step * T::lit(2.0);
        let mut accepted = None;
        for _ in 0..60 {
            let w_new = &w - &gw.mapv(|g| g * step);
            let b_new = b - gb * step;
            let l_new = loss_only(x, y, w_new.view(), b_new, c);
            if l_new <= loss - armijo * step * gnorm2 {
                accepted = Some((w_new, b_new));
                break;
            }
            step = step * T::lit(0.5);
        }
        let Some((w_new, b_new)) = accepted else {
            break;
        };
        w = w_new;
        b = b_new;
        let (l, g, g0) = loss_and_gradient(x, y, w.view(), b, c);
        loss = l;
        gw = g;
        gb = g0;
        trace.push(loss);
        iterations += 1;
    }
    if !converged {
        converged = gw.iter().fold(gb.abs(), |acc, g| acc.max(g.abs())) < tol;
    }
    Ok(LogRegModel {
        weights: w.to_vec(),
        bias: b,
        c,
        iterations,
        converged,
        loss_trace: trace,
    })
}

impl<T: Real> LogRegModel<T> {
    pub fn decision(&self, x: ArrayView2<T>) -> Array1<T> {
        x.dot(&ArrayView1::from(&self.weights)) + self.bias
    }

    pub fn predict_proba(&self, x: ArrayView2<T>) -> Array1<T> {
        self.decision(x).mapv(sigmoid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::auc;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn separable() -> (Array2<f64>, Vec<bool>) {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..16 {
            let a = (i % 4) as f64 - 1.5;
            let b = (i / 4) as f64 - 1.5;
            rows.extend([a, b]);
            y.push(a + b > 0.1);
        }
        (Array2::from_shape_vec((16, 2), rows).unwrap(), y)
    }

    #[test]
    fn separable_toy_set() {
        let (x, y) = separable();
        let m = train_logreg(x.view(), &y, 10.0, TrainOptions::default()).unwrap();
        let p = m.predict_proba(x.view());
        let a: f64 = auc(p.as_slice().unwrap(), &y).unwrap();
        assert!(a >= 0.99, "auc {a}");
        assert!(m.weights.iter().all(|w| w.is_finite()));
    }

    #[test]
    fn loss_never_increases() {
        let (x, y) = separable();
        let m = train_logreg(x.view(), &y, 100.0, TrainOptions::default()).unwrap();
        assert!(m.loss_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x: Array2<f64> = Array2::from_shape_fn((30, 3), |_| rng.random_range(-2.0..2.0));
        let y: Vec<bool> = (0..30).map(|_| rng.random_bool(0.5)).collect();
        for _ in 0..10 {
            let w: Array1<f64> = Array1::from_shape_fn(3, |_| rng.random_range(-1.0..1.0));
            let b: f64 = rng.random_range(-1.0..1.0);
            let (_, gw, gb) = loss_and_gradient(x.view(), &y, w.view(), b, 0.5);
            let h = 1e-5;
            for j in 0..3 {
                let (mut wp, mut wm) = (w.clone(), w.clone());
                wp[j] += h;
                wm[j] -= h;
                let fd = (loss_only(x.view(), &y, wp.view(), b, 0.5)
                    - loss_only(x.view(), &y, wm.view(), b, 0.5))
                    / (2.0 * h);
                assert!((fd - gw[j]).abs() / gw[j].abs().max(1e-8) < 1e-5);
            }
            let fd = (loss_only(x.view(), &y, w.view(), b + h, 0.5)
                - loss_only(x.view(), &y, w.view(), b - h, 0.5))
                / (2.0 * h);
            assert!((fd - gb).abs() / gb.abs().max(1e-8) < 1e-5);
        }
    }

    #[test]
    fn bias_is_not_penalised() {
        let x = Array2::<f64>::zeros((4, 1));
        let y = [true, true, true, false];
        let m = train_logreg(x.view(), &y, 0.01, TrainOptions::default()).unwrap();
        assert!(m.converged);
        assert!((sigmoid(m.bias) - 0.75).abs() < 1e-6);
    }

    #[test]
    fn single_precision_trains() {
        let (x, y) = separable();
        let x32 = x.mapv(|v| v as f32);
        let m = train_logreg(x32.view(), &y, 1.0f32, TrainOptions::default()).unwrap();
        let p = m.predict_proba(x32.view());
        let a: f64 = auc(p.as_slice().unwrap(), &y).unwrap();
        assert!(a >= 0.99);
    }

    #[test]
    fn rejects_bad_input() {
        let x = array![[1.0], [2.0]];
        assert_eq!(
            train_logreg(x.view(), &[true, true], 1.0, TrainOptions::default()),
            Err(ModelError::SingleClassLabels)
        );
        assert!(train_logreg(x.view(), &[true, false], 0.0, TrainOptions::default()).is_err());
        assert!(train_logreg(x.view(), &[true], 1.0, TrainOptions::default()).is_err());
    }

    #[test]
    fn empty_feature_set_learns_prior() {
        let x = Array2::<f64>::zeros((3, 0));
        let m = train_logreg(x.view(), &[true, false, false], 1.0, TrainOptions::default()).unwrap();
        let p = m.predict_proba(x.view());
        assert!((p[0] - 1.0 / 3.0).abs() < 1e-6);
    }
}
