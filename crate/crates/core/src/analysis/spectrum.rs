use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// In-place iterative radix-2 FFT; the length must be a power of two.
pub fn fft(x: &mut [Complex64]) {
    let n = x.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            x.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = -2.0 * PI / len as f64;
        let half = len / 2;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = Complex64::from_polar(1.0, ang * k as f64);
                let a = x[start + k];
                let b = x[start + k + half] * w;
                x[start + k] = a + b;
                x[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// One-sided magnitude spectrum of `x` sampled at `h`: mean removed, Hann
/// window applied, zero-padded to the next power of two.
/// Returns `(frequencies in Hz, magnitudes)`.
pub fn magnitude_spectrum(x: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() < 2 {
        return Err(Error::EmptyTrace);
    }
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let nfft = n.next_power_of_two();
    let mut buf = alloc::vec![Complex64::new(0.0, 0.0); nfft];
    for (i, (&xi, b)) in x.iter().zip(buf.iter_mut()).enumerate() {
        let w = 0.5 - 0.5 * libm::cos(2.0 * PI * i as f64 / (n - 1) as f64);
        *b = Complex64::new((xi - mean) * w, 0.0);
    }
    fft(&mut buf);
    let df = 1.0 / (nfft as f64 * h);
    let half = nfft / 2 + 1;
    let freqs = (0..half).map(|k| k as f64 * df).collect();
    let mags = buf[..half].iter().map(|c| c.norm()).collect();
    Ok((freqs, mags))
}

/// Frequency (Hz) of the largest non-DC spectral peak, refined by a
/// parabola through the peak bin and its neighbours.
pub fn dominant_frequency(x: &[f64], h: f64) -> Result<f64> {
    let (freqs, mags) = magnitude_spectrum(x, h)?;
    if mags.len() < 2 {
        return Err(Error::EmptyTrace);
    }
    let (k, _) = mags
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("spectrum has a non-DC bin");
    let df = freqs[1];
    if k + 1 >= mags.len() {
        return Ok(freqs[k]);
    }
    let (a, b, c) = (mags[k - 1], mags[k], mags[k + 1]);
    let denom = a - 2.0 * b + c;
    let offset = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    Ok((k as f64 + offset.clamp(-0.5, 0.5)) * df)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impulse_is_flat() {
        let mut x = alloc::vec![Complex64::new(0.0, 0.0); 8];
        x[0] = Complex64::new(1.0, 0.0);
        fft(&mut x);
        assert!(x.iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn tone_bin() {
        let mut x: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new(libm::cos(2.0 * PI * 3.0 * i as f64 / 16.0), 0.0))
            .collect();
        fft(&mut x);
        assert!((x[3].norm() - 8.0).abs() < 1e-12);
        assert!((x[13].norm() - 8.0).abs() < 1e-12);
        assert!(x[4].norm() < 1e-12);
    }
}
