//! Composite Simpson rules on uniformly sampled data.

use crate::scalar::Scalar;

/// Uniform nodes `t_i = i·h` on `[0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub panels: usize,
}

impl Default for UniformGrid {
    fn default() -> Self {
        Self { panels: 2048 }
    }
}

impl UniformGrid {
    pub fn new(panels: usize) -> Self {
        assert!(panels >= 2, "need at least two panels");
        Self { panels }
    }

    pub fn len(&self) -> usize {
        self.panels + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step<T: Scalar>(&self) -> T {
        T::half() / T::from_usize(self.panels).unwrap()
    }

    pub fn node<T: Scalar>(&self, i: usize) -> T {
        if i == self.panels {
            T::half()
        } else {
            self.step::<T>() * T::from_usize(i).unwrap()
        }
    }

    pub fn nodes<T: Scalar>(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Samples `f` at every node.
    pub fn sample<T: Scalar>(&self, f: impl Fn(T) -> T) -> Vec<T> {
        (0..self.len()).map(|i| f(self.node(i))).collect()
    }
}

/// `∫` of uniformly spaced samples. An odd panel count closes with the
/// 3/8 rule on the last three panels.
pub fn simpson<T: Scalar>(y: &[T], h: T) -> T {
    let panels = y.len().saturating_sub(1);
    match panels {
        0 => T::zero(),
        1 => (y[0] + y[1]) * h * T::half(),
        _ if panels % 2 == 0 => simpson_even(y, h),
        3 => three_eighths(&y[0..4], h),
        _ => simpson_even(&y[..panels - 2], h) + three_eighths(&y[panels - 3..], h),
    }
}

fn simpson_even<T: Scalar>(y: &[T], h: T) -> T {
    let n = y.len() - 1;
    let mut acc = y[0] + y[n];
    for (i, &v) in y.iter().enumerate().take(n).skip(1) {
        acc += if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) } * v;
    }
    acc * h / T::lit(3.0)
}

fn three_eighths<T: Scalar>(y: &[T], h: T) -> T {
    (y[0] + T::lit(3.0) * (y[1] + y[2]) + y[3]) * h * T::lit(3.0) / T::lit(8.0)
}

/// `I_i = ∫_{x_0}^{x_i}` at every node.
///
/// Even nodes chain Simpson pairs from `x_0`; odd nodes chain them from a
/// quadratic-interpolation estimate of the first panel.
pub fn cumulative<T: Scalar>(y: &[T], h: T) -> Vec<T> {
    let n = y.len();
    let mut out = vec![T::zero(); n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = (y[0] + y[1]) * h * T::half();
        return out;
    }
    let twelfth = h / T::lit(12.0);
    out[1] = (T::lit(5.0) * y[0] + T::lit(8.0) * y[1] - y[2]) * twelfth;
    let third = h / T::lit(3.0);
    for i in 2..n {
        out[i] = out[i - 2] + (y[i - 2] + T::lit(4.0) * y[i - 1] + y[i]) * third;
    }
    out
}

/// `J_i = ∫_{x_i}^{x_last}` at every node.
pub fn cumulative_from_right<T: Scalar>(y: &[T], h: T) -> Vec<T> {
    let rev: Vec<T> = y.iter().rev().copied().collect();
    let mut out = cumulative(&rev, h);
    out.reverse();
    out
}

/// Weights of the `order`-th derivative at `x0` from values at `nodes`
/// (Fornberg's recursion).
pub fn fd_weights(order: usize, x0: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// `order`-th derivative at the last sample, sixth-order one-sided.
fn right_derivative<T: Scalar>(u: &[T], h: T, order: usize) -> T {
    let points = 6 + order;
    assert!(u.len() >= points, "need {points} samples");
    let nodes: Vec<f64> = (0..points).map(|j| -(j as f64)).collect();
    let w = fd_weights(order, 0.0, &nodes);
    let last = u.len() - 1;
    let acc: T = w.iter().enumerate().map(|(j, &c)| T::lit(c) * u[last - j]).sum();
    acc / h.powi(order as i32)
}

/// First derivative at the last sample.
pub fn right_slope<T: Scalar>(u: &[T], h: T) -> T {
    right_derivative(u, h, 1)
}

/// Second derivative at the last sample.
pub fn right_curvature<T: Scalar>(u: &[T], h: T) -> T {
    right_derivative(u, h, 2)
}
