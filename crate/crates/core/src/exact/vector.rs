//! Helpers for coordinate vectors stored as `Vec<Gauss>`.

use super::scalar::{Gauss, Rat};

pub fn zeros(n: usize) -> Vec<Gauss> {
    vec![Gauss::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Vec<Gauss> {
    let mut v = zeros(n);
    v[i] = Gauss::one();
    v
}

pub fn add(a: &[Gauss], b: &[Gauss]) -> Vec<Gauss> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Gauss], b: &[Gauss]) -> Vec<Gauss> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: &Gauss, a: &[Gauss]) -> Vec<Gauss> {
    if c.is_zero() {
        return zeros(a.len());
    }
    a.iter().map(|x| c * x).collect()
}

pub fn scale_rat(c: &Rat, a: &[Gauss]) -> Vec<Gauss> {
    a.iter().map(|x| x * c).collect()
}

pub fn neg(a: &[Gauss]) -> Vec<Gauss> {
    a.iter().map(|x| -x).collect()
}

pub fn axpy(acc: &mut [Gauss], c: &Gauss, x: &[Gauss]) {
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(x) {
        if !b.is_zero() {
            *a += &(c * b);
        }
    }
}

pub fn is_zero(a: &[Gauss]) -> bool {
    a.iter().all(Gauss::is_zero)
}

pub fn is_real(a: &[Gauss]) -> bool {
    a.iter().all(Gauss::is_real)
}

pub fn conj(a: &[Gauss]) -> Vec<Gauss> {
    a.iter().map(Gauss::conj).collect()
}

pub fn mul_i(a: &[Gauss]) -> Vec<Gauss> {
    a.iter().map(Gauss::mul_i).collect()
}

pub fn re(a: &[Gauss]) -> Vec<Gauss> {
    a.iter().map(|x| Gauss::real(x.re.clone())).collect()
}

pub fn im(a: &[Gauss]) -> Vec<Gauss> {
    a.iter().map(|x| Gauss::real(x.im.clone())).collect()
}

/// Bilinear (not Hermitian) pairing.
pub fn dot(a: &[Gauss], b: &[Gauss]) -> Gauss {
    let mut s = Gauss::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += &(x * y);
        }
    }
    s
}

pub fn pad(a: &[Gauss], n: usize) -> Vec<Gauss> {
    let mut v = a.to_vec();
    v.resize(n, Gauss::zero());
    v
}

/// Renders `sum c_i label_i` with the given labels, e.g. `-2 A1 + 1/2 E31`.
pub fn format_combination(v: &[Gauss], labels: &[String]) -> String {
    let mut out = String::new();
    for (c, l) in v.iter().zip(labels) {
        if c.is_zero() {
            continue;
        }
        let (neg, mag) =
            if c.is_real() && c.re < Rat::from_integer(0.into()) { (true, -c) } else { (false, c.clone()) };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mag != Gauss::one() {
            out.push_str(&format!("{mag} "));
        }
        out.push_str(l);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
