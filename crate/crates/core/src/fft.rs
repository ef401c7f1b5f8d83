//! In-repo radix-2 complex FFT (iterative Cooley-Tukey with bit reversal).

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    pub fn from_re(re: f64) -> Self {
        Complex { re, im: 0.0 }
    }

    /// e^{i theta}
    pub fn cis(theta: f64) -> Self {
        Complex { re: theta.cos(), im: theta.sin() }
    }

    pub fn conj(self) -> Self {
        Complex { re: self.re, im: -self.im }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn scale(self, s: f64) -> Self {
        Complex { re: self.re * s, im: self.im * s }
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex { re: -self.re, im: -self.im }
    }
}

/// In-place radix-2 FFT. Forward uses the e^{-2 pi i jk/n} convention;
/// the inverse includes the 1/n normalization. `n` must be a power of two.
pub fn fft_in_place(buf: &mut [Complex], inverse: bool) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    if n <= 1 {
        return;
    }
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * std::f64::consts::PI / len as f64;
        let wlen = Complex::cis(ang);
        let mut i = 0;
        while i < n {
            let mut w = Complex::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = buf[i + k];
                let v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w = w * wlen;
            }
            i += len;
        }
        len <<= 1;
    }
    if inverse {
        let s = 1.0 / n as f64;
        for v in buf.iter_mut() {
            *v = v.scale(s);
        }
    }
}

/// Signed wavenumbers 2 pi k / L in FFT ordering, with the Nyquist mode
/// zeroed (it carries no usable sign information for odd derivatives).
pub fn wavenumbers(n: usize, period: f64) -> Vec<f64> {
    let scale = 2.0 * std::f64::consts::PI / period;
    let mut k = vec![0.0; n];
    for i in 1..n / 2 {
        k[i] = i as f64 * scale;
        k[n - i] = -(i as f64) * scale;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dft_naive(x: &[Complex]) -> Vec<Complex> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex::ZERO;
                for (j, &v) in x.iter().enumerate() {
                    acc = acc + v * Complex::cis(-2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64);
                }
                acc
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let n = 64;
        let mut x: Vec<Complex> = (0..n)
            .map(|j| {
                let t = j as f64;
                Complex::new((0.3 * t).sin() + 0.2, (0.11 * t).cos())
            })
            .collect();
        let expect = dft_naive(&x);
        fft_in_place(&mut x, false);
        for (a, b) in x.iter().zip(&expect) {
            assert!((*a - *b).abs() < 1e-9);
        }
    }

    #[test]
    fn roundtrip_is_identity() {
        let n = 256;
        let orig: Vec<Complex> = (0..n)
            .map(|j| Complex::new((j as f64 * 0.017).sin(), (j as f64 * 0.013).cos()))
            .collect();
        let mut x = orig.clone();
        fft_in_place(&mut x, false);
        fft_in_place(&mut x, true);
        for (a, b) in x.iter().zip(&orig) {
            assert!((*a - *b).abs() < 1e-12);
        }
    }

    #[test]
    fn impulse_transforms_to_constant() {
        let mut x = vec![Complex::ZERO; 32];
        x[0] = Complex::from_re(1.0);
        fft_in_place(&mut x, false);
        for v in &x {
            assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }
}
