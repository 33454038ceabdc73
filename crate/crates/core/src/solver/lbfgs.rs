//! Limited-memory BFGS history for a barrier objective whose parameter `t`
//! changes between iterations.
//!
//! Gradient differences of `g` and `G` are stored separately, so the pair
//! `psi_k = q_k + Q_k / t` can be re-formed at the current `t` every time
//! a direction is requested.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Pair {
    r: Vec<f64>,
    q: Vec<f64>,
    big_q: Vec<f64>,
}

/// Ring buffer of `(r_k, q_k, Q_k)` triples.
#[derive(Debug, Clone)]
pub struct History {
    capacity: usize,
    pairs: VecDeque<Pair>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl History {
    pub fn new(capacity: usize) -> Self {
        History {
            capacity,
            pairs: VecDeque::with_capacity(capacity.min(4096)),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn clear(&mut self) {
        self.pairs.clear();
    }

    /// Appends `r = u_i - u_{i-1}`, `q = grad g(u_i) - grad g(u_{i-1})` and
    /// `Q = grad G(u_i) - grad G(u_{i-1})`, evicting the oldest triple when full.
    pub fn push(&mut self, r: Vec<f64>, q: Vec<f64>, big_q: Vec<f64>) {
        if self.capacity == 0 {
            return;
        }
        if self.pairs.len() == self.capacity {
            self.pairs.pop_front();
        }
        self.pairs.push_back(Pair { r, q, big_q });
    }

    /// Two-loop recursion for `-H^{-1} grad`, with the initial Hessian the
    /// diagonal `h_diag` and curvature pairs formed at barrier parameter `t`.
    /// Pairs with `r^T psi <= 0` are left out.
    pub fn direction(&self, grad: &[f64], t: f64, h_diag: &[f64]) -> Vec<f64> {
        let mut d: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut kept: Vec<(usize, Vec<f64>, f64, f64)> = Vec::with_capacity(self.pairs.len());
        for (k, p) in self.pairs.iter().enumerate().rev() {
            let psi: Vec<f64> = p.q.iter().zip(&p.big_q).map(|(a, b)| a + b / t).collect();
            let curv = dot(&p.r, &psi);
            if !(curv > 0.0) || !curv.is_finite() {
                continue;
            }
            let sigma = dot(&p.r, &d) / curv;
            d.iter_mut().zip(&psi).for_each(|(x, y)| *x -= sigma * y);
            kept.push((k, psi, curv, sigma));
        }
        d.iter_mut().zip(h_diag).for_each(|(x, h)| *x /= h);
        for (k, psi, curv, sigma) in kept.into_iter().rev() {
            let r = &self.pairs[k].r;
            let beta = dot(&psi, &d) / curv;
            d.iter_mut().zip(r).for_each(|(x, r)| *x += r * (sigma - beta));
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_history_is_scaled_steepest_descent() {
        let h = History::new(3);
        let d = h.direction(&[2.0, -4.0], 1.0, &[2.0, 4.0]);
        assert_eq!(d, vec![-1.0, 1.0]);
    }

    #[test]
    fn single_pair_matches_bfgs_update() {
        // f(x) = x^T A x / 2 with A = diag(2, 8), H0 = I.
        let r = vec![1.0, 1.0];
        let y = vec![2.0, 8.0];
        let mut h = History::new(5);
        h.push(r.clone(), y.clone(), vec![0.0, 0.0]);
        let grad = [1.0, -2.0];
        let d = h.direction(&grad, 7.0, &[1.0, 1.0]);

        // Dense inverse BFGS update: Hk = (I - rho s y^T)(I - rho y s^T) + rho s s^T.
        let rho = 1.0 / (r[0] * y[0] + r[1] * y[1]);
        let mut hk = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    let a = if i == k { 1.0 } else { 0.0 } - rho * r[i] * y[k];
                    let b = if k == j { 1.0 } else { 0.0 } - rho * y[k] * r[j];
                    acc += a * b;
                }
                hk[i][j] = acc + rho * r[i] * r[j];
            }
        }
        for i in 0..2 {
            let want = -(hk[i][0] * grad[0] + hk[i][1] * grad[1]);
            assert!((d[i] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn psi_uses_current_t() {
        let mut h = History::new(2);
        h.push(vec![1.0], vec![0.0], vec![4.0]);
        // psi = 4 / t; the secant step on a 1-D problem is -grad / psi.
        let d = h.direction(&[1.0], 2.0, &[1.0]);
        assert!((d[0] + 0.5).abs() < 1e-15);
        let d = h.direction(&[1.0], 4.0, &[1.0]);
        assert!((d[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_positive_curvature_is_skipped() {
        let mut h = History::new(2);
        h.push(vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 0.0]);
        let d = h.direction(&[1.0, 1.0], 1.0, &[1.0, 1.0]);
        assert_eq!(d, vec![-1.0, -1.0]);
    }

    #[test]
    fn capacity_evicts_oldest() {
        let mut h = History::new(2);
        for k in 0..5 {
            h.push(vec![k as f64], vec![1.0], vec![0.0]);
        }
        assert_eq!(h.len(), 2);
        assert_eq!(h.pairs[0].r, vec![3.0]);
    }
}
