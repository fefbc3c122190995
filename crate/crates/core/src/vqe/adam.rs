use serde::{Deserialize, Serialize};

/// ADAM moment estimates for one parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u32,
}

impl Adam {
    pub fn new(len: usize, lr: f64, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self { lr, beta1, beta2, epsilon, m: vec![0.0; len], v: vec![0.0; len], t: 0 }
    }

    pub fn steps(&self) -> u32 {
        self.t
    }

    /// One bias-corrected update of `params` against `grad`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        assert_eq!(params.len(), self.m.len(), "parameter length changed under ADAM");
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for (((x, &g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *x -= self.lr * (*m / c1) / ((*v / c2).sqrt() + self.epsilon);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut adam = Adam::new(3, 0.1, 0.9, 0.999, 1e-8);
        let mut p = vec![1.0, -2.0, 0.5];
        for _ in 0..100 {
            adam.step(&mut p, &[0.0; 3]);
        }
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn quadratic_bowl() {
        // f(x) = Σ c_k (x_k − t_k)², minimum at t
        let target = [1.5, -0.7, 3.0];
        let curv = [1.0, 4.0, 0.5];
        let mut adam = Adam::new(3, 0.05, 0.9, 0.999, 1e-8);
        let mut x = vec![0.0; 3];
        for _ in 0..500 {
            let g: Vec<f64> = (0..3).map(|k| 2.0 * curv[k] * (x[k] - target[k])).collect();
            adam.step(&mut x, &g);
        }
        for k in 0..3 {
            assert!((x[k] - target[k]).abs() < 1e-2, "{x:?}");
        }
    }
}
