//! Fourth-order central finite-difference stencils on two-variable functions.

use std::ops::{Add, Mul};

use crate::jet::{Jet, JET_ORDER};
use crate::scalar::Real;

pub type Stencil = [(i32, f64)];

pub const D1: [(i32, f64); 4] = [(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)];
pub const D2: [(i32, f64); 5] =
    [(-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0), (1, 16.0 / 12.0), (2, -1.0 / 12.0)];
pub const D3: [(i32, f64); 6] = [
    (-3, 1.0 / 8.0),
    (-2, -1.0),
    (-1, 13.0 / 8.0),
    (1, -13.0 / 8.0),
    (2, 1.0),
    (3, -1.0 / 8.0),
];

fn stencil_for(k: usize) -> &'static Stencil {
    match k {
        1 => &D1,
        2 => &D2,
        _ => &D3,
    }
}

/// Tensor product of 1-D stencils, `axes = [(axis, stencil), ...]`, with step `h` on every axis.
/// The result is not divided by any power of `h`.
pub fn apply<T, V, F>(f: &F, x: [T; 2], axes: &[(usize, &Stencil)], h: T) -> V
where
    T: Real,
    V: Copy + Add<Output = V> + Mul<T, Output = V>,
    F: Fn([T; 2]) -> V + ?Sized,
{
    fn rec<T, V, F>(f: &F, x: [T; 2], axes: &[(usize, &Stencil)], off: [T; 2], w: T, h: T, acc: &mut Option<V>)
    where
        T: Real,
        V: Copy + Add<Output = V> + Mul<T, Output = V>,
        F: Fn([T; 2]) -> V + ?Sized,
    {
        match axes.split_first() {
            None => {
                let v = f([x[0] + off[0], x[1] + off[1]]) * w;
                *acc = Some(match *acc {
                    Some(a) => a + v,
                    None => v,
                });
            }
            Some(((axis, st), rest)) => {
                for &(k, c) in st.iter() {
                    let mut o = off;
                    o[*axis] += T::lit(k as f64) * h;
                    rec(f, x, rest, o, w * T::lit(c), h, acc);
                }
            }
        }
    }
    let mut acc = None;
    rec(f, x, axes, [T::zero(); 2], T::one(), h, &mut acc);
    acc.expect("stencil has at least one point")
}

/// `∂₁^i ∂₂^j f(x)` for `1 ≤ i + j ≤ 3`.
pub fn partial<T, V, F>(f: &F, x: [T; 2], i: usize, j: usize, h: T) -> V
where
    T: Real,
    V: Copy + Add<Output = V> + Mul<T, Output = V>,
    F: Fn([T; 2]) -> V + ?Sized,
{
    let mut axes: Vec<(usize, &Stencil)> = Vec::with_capacity(2);
    if i > 0 {
        axes.push((0, stencil_for(i)));
    }
    if j > 0 {
        axes.push((1, stencil_for(j)));
    }
    apply(f, x, &axes, h) * (T::one() / h.powi((i + j) as i32))
}

/// Order-3 jet of a scalar function from finite differences with step `h`.
pub fn scalar_jet<T: Real, F: Fn([T; 2]) -> T + ?Sized>(f: &F, x: [T; 2], h: T) -> Jet<T> {
    let mut p = [[T::zero(); JET_ORDER + 1]; JET_ORDER + 1];
    for (i, row) in p.iter_mut().enumerate() {
        for (j, pij) in row.iter_mut().enumerate() {
            *pij = match i + j {
                0 => f(x),
                n if n <= JET_ORDER => partial(f, x, i, j, h),
                _ => T::zero(),
            };
        }
    }
    Jet::from_partials(p, JET_ORDER)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quartic() {
        let f = |x: [f64; 2]| x[0].powi(3) * x[1] + 2.0 * x[1].powi(2) - x[0];
        let x = [0.4, -0.3];
        let h = 1e-2;
        assert!((partial(&f, x, 1, 0, h) - (3.0 * 0.16 * -0.3 - 1.0)).abs() < 1e-11);
        assert!((partial(&f, x, 0, 2, h) - 4.0).abs() < 1e-9);
        assert!((partial(&f, x, 2, 1, h) - 6.0 * 0.4).abs() < 1e-8);
        assert!((partial(&f, x, 3, 0, h) - 6.0 * -0.3).abs() < 1e-8);
        let j = scalar_jet(&f, x, h);
        assert!((j.partial(1, 1) - 3.0 * 0.16).abs() < 1e-9);
    }
}
