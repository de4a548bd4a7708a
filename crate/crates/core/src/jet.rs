use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

/// Highest total degree kept.
pub const JET_ORDER: usize = 3;
const N: usize = JET_ORDER + 1;

/// Truncated two-variable Taylor expansion `Σ c[i][j] dx₁^i dx₂^j` with `i + j ≤ order`.
///
/// `order` tracks how many coefficients are trustworthy: arithmetic keeps the minimum of the
/// operands and each differentiation lowers it by one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T> {
    c: [[T; N]; N],
    order: usize,
}

impl<T: Real> Jet<T> {
    pub fn constant(v: T) -> Self {
        let mut c = [[T::zero(); N]; N];
        c[0][0] = v;
        Jet { c, order: JET_ORDER }
    }

    /// Jet of the coordinate `x_axis` around a base value.
    pub fn variable(axis: usize, base: T) -> Self {
        let mut j = Self::constant(base);
        if axis == 0 {
            j.c[1][0] = T::one();
        } else {
            j.c[0][1] = T::one();
        }
        j
    }

    /// Jet of `g(x_axis)` from `[g, g', g'', g''']` at the base point.
    pub fn from_univariate(axis: usize, derivs: [T; N]) -> Self {
        let mut j = Self::constant(derivs[0]);
        let mut fact = T::one();
        for (k, d) in derivs.iter().enumerate().skip(1) {
            fact *= T::lit(k as f64);
            if axis == 0 {
                j.c[k][0] = *d / fact;
            } else {
                j.c[0][k] = *d / fact;
            }
        }
        j
    }

    /// Jet from partial derivatives, `partials[i][j] = ∂₁^i ∂₂^j f` for `i + j ≤ order`.
    pub fn from_partials(partials: [[T; N]; N], order: usize) -> Self {
        let mut c = [[T::zero(); N]; N];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, cij) in row.iter_mut().enumerate() {
                if i + j <= order {
                    *cij = partials[i][j] / T::lit((factorial(i) * factorial(j)) as f64);
                }
            }
        }
        Jet { c, order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> T {
        self.c[0][0]
    }

    /// `∂₁^i ∂₂^j` at the base point.
    pub fn partial(&self, i: usize, j: usize) -> T {
        debug_assert!(i + j <= self.order, "partial of order {} beyond jet order {}", i + j, self.order);
        self.c[i][j] * T::lit((factorial(i) * factorial(j)) as f64)
    }

    pub fn d(&self, axis: usize) -> Self {
        let mut c = [[T::zero(); N]; N];
        for i in 0..N {
            for j in 0..N - i {
                let (si, sj) = if axis == 0 { (i + 1, j) } else { (i, j + 1) };
                if si + sj < N {
                    let k = if axis == 0 { si } else { sj };
                    c[i][j] = self.c[si][sj] * T::lit(k as f64);
                }
            }
        }
        Jet { c, order: self.order.saturating_sub(1) }
    }

    pub fn d1(&self) -> Self {
        self.d(0)
    }

    pub fn d2(&self) -> Self {
        self.d(1)
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        out.c.iter_mut().flatten().for_each(|v| *v *= s);
        out
    }

    pub fn recip(&self) -> Self {
        let f00 = self.c[0][0];
        let inv = T::one() / f00;
        let mut g = [[T::zero(); N]; N];
        g[0][0] = inv;
        for deg in 1..N {
            for i in 0..=deg {
                let j = deg - i;
                let mut acc = T::zero();
                for a in 0..=i {
                    for b in 0..=j {
                        if a + b > 0 {
                            acc += self.c[a][b] * g[i - a][j - b];
                        }
                    }
                }
                g[i][j] = -acc * inv;
            }
        }
        Jet { c: g, order: self.order }
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.c[i][j] += o.c[i][j];
            }
        }
        out.order = self.order.min(o.order);
        out
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [[T::zero(); N]; N];
        for i in 0..N {
            for j in 0..N - i {
                for a in 0..=i {
                    for b in 0..=j {
                        c[i][j] += self.c[a][b] * o.c[i - a][j - b];
                    }
                }
            }
        }
        Jet { c, order: self.order.min(o.order) }
    }
}

impl<T: Real> Mul<T> for Jet<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}
