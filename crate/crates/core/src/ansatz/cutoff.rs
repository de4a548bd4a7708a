use crate::scalar::Real;

// q(u) = 1 − P(u), P(u) = 126u⁵ − 420u⁶ + 540u⁷ − 315u⁸ + 70u⁹
const P: [f64; 10] = [0.0, 0.0, 0.0, 0.0, 0.0, 126.0, -420.0, 540.0, -315.0, 70.0];

fn poly_derivs<T: Real>(u: T) -> [T; 5] {
    let mut out = [T::zero(); 5];
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for n in (k..P.len()).rev() {
            let falling: f64 = (0..k).map(|i| (n - i) as f64).product();
            acc = acc * u + T::lit(P[n] * falling);
        }
        *o = acc;
    }
    out
}

/// Even C⁴ cutoff: 1 on `|s| ≤ ½`, 0 on `|s| ≥ 1`. Returns the value and derivatives up to
/// fourth order in `s`.
pub fn cutoff<T: Real>(s: T) -> [T; 5] {
    let a = s.abs();
    let half = T::lit(0.5);
    if a <= half {
        return [T::one(), T::zero(), T::zero(), T::zero(), T::zero()];
    }
    if a >= T::one() {
        return [T::zero(); 5];
    }
    let u = a + a - T::one();
    let p = poly_derivs(u);
    let sg = s.signum();
    let two = T::lit(2.0);
    [
        T::one() - p[0],
        -p[1] * two * sg,
        -p[2] * two * two,
        -p[3] * two * two * two * sg,
        -p[4] * two * two * two * two,
    ]
}

/// Radial cutoff `c(|x|/R)` on the plane with its gradient and Hessian.
pub fn radial_cutoff<T: Real>(x: [T; 2], radius: T) -> (T, [T; 2], [[T; 2]; 2]) {
    let rho = x[0].hypot(x[1]);
    let c = cutoff(rho / radius);
    let mut g = [T::zero(); 2];
    let mut h = [[T::zero(); 2]; 2];
    if c[1] == T::zero() && c[2] == T::zero() {
        return (c[0], g, h);
    }
    let (d1, d2) = (c[1] / radius, c[2] / (radius * radius));
    let n = [x[0] / rho, x[1] / rho];
    for i in 0..2 {
        g[i] = d1 * n[i];
        for j in 0..2 {
            let delta = if i == j { T::one() } else { T::zero() };
            h[i][j] = d2 * n[i] * n[j] + d1 * (delta - n[i] * n[j]) / rho;
        }
    }
    (c[0], g, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        assert_eq!(cutoff(0.0f64), [1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(cutoff(0.5f64)[0], 1.0);
        assert_eq!(cutoff(1.0f64), [0.0; 5]);
        assert_eq!(cutoff(-1.3f64), [0.0; 5]);
        let m = cutoff(0.75f64);
        assert!((m[0] - 0.5).abs() < 1e-15);
        assert_eq!(cutoff(-0.6f64)[0], cutoff(0.6f64)[0]);
    }

    #[test]
    fn derivatives_match_differences_and_vanish_at_joins() {
        let h = 1e-5;
        for s in [0.55f64, 0.7, 0.81, 0.93, -0.66] {
            let c = cutoff(s);
            for k in 0..4 {
                let fd = (cutoff(s + h)[k] - cutoff(s - h)[k]) / (2.0 * h);
                assert!((fd - c[k + 1]).abs() < 1e-4 * (1.0 + c[k + 1].abs()), "s={s} k={k}");
            }
        }
        for s in [0.5f64, 1.0] {
            let inner = cutoff(s - 1e-12);
            let outer = cutoff(s + 1e-12);
            for k in 1..5 {
                assert!(inner[k].abs() < 1e-6 && outer[k].abs() < 1e-6, "s={s} k={k}");
            }
        }
    }

    #[test]
    fn integral_matches_refined_midpoint() {
        let n = 200_000;
        let dx = 2.0 / n as f64;
        let sum: f64 = (0..n).map(|i| cutoff(-1.0 + (i as f64 + 0.5) * dx)[0]).sum::<f64>() * dx;
        assert!((sum - 1.5).abs() < 1e-9);
    }

    #[test]
    fn radial_gradient_matches_differences() {
        let x = [0.21f64, -0.17];
        let (v, g, hs) = radial_cutoff(x, 0.4);
        let h = 1e-6;
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let (vp, gp, _) = radial_cutoff(xp, 0.4);
            let (vm, gm, _) = radial_cutoff(xm, 0.4);
            assert!(((vp - vm) / (2.0 * h) - g[i]).abs() < 1e-8);
            for j in 0..2 {
                assert!(((gp[j] - gm[j]) / (2.0 * h) - hs[j][i]).abs() < 1e-6);
            }
        }
        assert!(v > 0.0 && v < 1.0);
        assert_eq!(radial_cutoff([0.0f64, 0.0], 0.4).0, 1.0);
    }
}
