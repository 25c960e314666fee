//! Scalar root location on an interval: dense sign scan, bisection, and a
//! guarded secant-Newton polish.

use crate::error::Result;
use crate::scalar::Scalar;

/// A refined root and the function value left there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Root<T> {
    pub x: T,
    pub fx: T,
}

fn opposite<T: Scalar>(a: T, b: T) -> bool {
    (a < T::zero() && b > T::zero()) || (a > T::zero() && b < T::zero())
}

/// Bisects a sign change on `[a, b]` down to adjacent floating-point values.
pub(crate) fn bisect<T, F>(f: &mut F, mut a: T, mut fa: T, mut b: T) -> Result<T>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    for _ in 0..200 {
        let m = (a + b) * T::half();
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == T::zero() {
            return Ok(m);
        }
        if opposite(fa, fm) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok((a + b) * T::half())
}

/// A few Newton steps with a forward-difference slope. Steps that leave
/// `[lo, hi]` or fail to shrink `|f|` are rejected.
pub(crate) fn polish<T, F>(f: &mut F, x0: T, lo: T, hi: T, h: T) -> Result<Root<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let mut x = x0;
    let mut fx = f(x)?;
    for _ in 0..4 {
        if fx == T::zero() {
            break;
        }
        let slope = (f(x + h)? - fx) / h;
        if slope == T::zero() || !slope.is_finite() {
            break;
        }
        let xn = x - fx / slope;
        if !(xn >= lo && xn <= hi) {
            break;
        }
        let fxn = f(xn)?;
        if fxn.abs() >= fx.abs() {
            break;
        }
        x = xn;
        fx = fxn;
    }
    Ok(Root { x, fx })
}

/// Minimizes `sign · f` on `[a, b]` by golden-section search.
fn golden_min<T, F>(f: &mut F, sign: T, mut a: T, mut b: T) -> Result<(T, T)>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..80 {
        if sign * f1 < sign * f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
        if opposite(f1, sign) || f1 == T::zero() {
            return Ok((x1, f1));
        }
        if opposite(f2, sign) || f2 == T::zero() {
            return Ok((x2, f2));
        }
        if b - a <= T::epsilon() * (a.abs() + b.abs()) {
            break;
        }
    }
    Ok(if sign * f1 < sign * f2 { (x1, f1) } else { (x2, f2) })
}

/// All sign changes of `f` on `[lo, hi]` found from `samples` equally spaced
/// evaluations, each refined by bisection.
///
/// Local extrema of `|f|` between samples of equal sign are searched for a
/// hidden pair of roots.
pub(crate) fn scan_roots<T, F>(mut f: F, lo: T, hi: T, samples: usize) -> Result<Vec<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let n = samples.max(2);
    let step = (hi - lo) / T::from_usize(n - 1).unwrap();
    let xs: Vec<T> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * T::from_usize(i).unwrap() })
        .collect();
    let mut fs = Vec::with_capacity(n);
    for &x in &xs {
        fs.push(f(x)?);
    }

    let mut roots = Vec::new();
    for i in 0..n {
        if !fs[i].is_finite() {
            continue;
        }
        if fs[i] == T::zero() {
            roots.push(xs[i]);
            continue;
        }
        if i + 1 < n && fs[i + 1].is_finite() && opposite(fs[i], fs[i + 1]) {
            roots.push(bisect(&mut f, xs[i], fs[i], xs[i + 1])?);
        }
        if i > 0 && i + 1 < n {
            let (l, m, r) = (fs[i - 1], fs[i], fs[i + 1]);
            let same = !opposite(l, m) && !opposite(m, r) && l != T::zero() && r != T::zero();
            if same && l.is_finite() && r.is_finite() && m.abs() < l.abs() && m.abs() <= r.abs() {
                let sign = m.signum();
                let (xm, fm) = golden_min(&mut f, sign, xs[i - 1], xs[i + 1])?;
                if fm == T::zero() {
                    roots.push(xm);
                } else if opposite(fm, sign) {
                    roots.push(bisect(&mut f, xs[i - 1], l, xm)?);
                    roots.push(bisect(&mut f, xm, fm, xs[i + 1])?);
                }
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * T::lit(16.0) * (T::one() + b.abs()));
    Ok(roots)
}
