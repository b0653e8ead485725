use crate::scalar::Scalar;

/// Probabilists' Hermite polynomial `He_n(x)`.
pub fn hermite<T: Scalar>(n: usize, x: T) -> T {
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = x;
    for k in 1..n {
        let next = x * cur - T::of_usize(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[He_0(x), ..., He_max(x)]`.
pub fn hermite_table<T: Scalar>(max: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(T::one());
    if max >= 1 {
        out.push(x);
    }
    for k in 1..max {
        let next = x * out[k] - T::of_usize(k) * out[k - 1];
        out.push(next);
    }
    out
}

/// Monomial coefficients of `He_n`, lowest degree first.
pub fn hermite_coefficients(n: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for k in 1..n {
        let mut next = vec![0.0; k + 2];
        for (p, &c) in cur.iter().enumerate() {
            next[p + 1] += c;
        }
        for (p, &c) in prev.iter().enumerate() {
            next[p] -= k as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}
