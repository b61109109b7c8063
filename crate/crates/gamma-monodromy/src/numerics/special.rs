//! Gamma-family special functions on the complex plane.

use std::f64::consts::PI;

use num_complex::Complex64 as Cx;

use super::jet::Jet;
use crate::error::{GmError, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `zeta(k)` for `k = 2..=13`.
pub const ZETA: [f64; 12] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_2,
    1.082_323_233_711_138_2,
    1.036_927_755_143_369_9,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
];

/// Taylor coefficients of `log Gamma(1 + x)` up to `x^12`.
pub fn log_gamma_one_plus_coeffs() -> [f64; 13] {
    let mut c = [0.0; 13];
    c[1] = -EULER_GAMMA;
    for k in 2..=12 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[k] = sign * ZETA[k - 2] / k as f64;
    }
    c
}

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

fn is_nonpositive_integer(z: Cx) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn lanczos_log_gamma(z: Cx) -> Cx {
    // Valid for Re z >= 1/2.
    let zm1 = z - 1.0;
    let mut sum = Cx::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (zm1 + k as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (zm1 + 0.5) * t.ln() - t + sum.ln()
}

/// `log Gamma(z)` on the branch that is real on the positive axis and
/// continuous off the cut `(-inf, 0]`.
pub fn log_gamma(z: Cx) -> Result<Cx> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(GmError::InvalidArgument(format!("log_gamma({z})")));
    }
    if is_nonpositive_integer(z) {
        return Err(GmError::Pole { z });
    }
    if z.re >= 0.5 {
        return Ok(lanczos_log_gamma(z));
    }
    // Reflection fixes the modulus; the imaginary part is then moved onto the
    // branch given by the recurrence log Gamma(z) = log Gamma(z+N) - sum log(z+k).
    let refl = Cx::new(PI.ln(), 0.0) - (PI * z).sin().ln() - lanczos_log_gamma(1.0 - z);
    let shift = (0.5 - z.re).ceil() as usize;
    let mut im_ref = lanczos_log_gamma(z + shift as f64).im;
    for k in 0..shift {
        im_ref -= (z + k as f64).arg();
    }
    let turns = ((im_ref - refl.im) / (2.0 * PI)).round();
    Ok(Cx::new(refl.re, refl.im + 2.0 * PI * turns))
}

pub fn gamma(z: Cx) -> Result<Cx> {
    Ok(log_gamma(z)?.exp())
}

const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174_611.0 / 330.0,
];

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, b| a * b as f64)
}

/// The polygamma function `psi^{(k)}(z)`, with `k = 0` the digamma function.
pub fn polygamma(k: usize, z: Cx) -> Result<Cx> {
    if k > 12 {
        return Err(GmError::InvalidArgument(format!("polygamma order {k} > 12")));
    }
    if is_nonpositive_integer(z) {
        return Err(GmError::Pole { z });
    }
    let sign_k = if k % 2 == 0 { 1.0 } else { -1.0 };
    let kf = factorial(k);
    let mut acc = Cx::new(0.0, 0.0);
    let mut x = z;
    // psi^(k)(x) = psi^(k)(x+1) - (-1)^k k! / x^(k+1)
    while x.re < 20.0 {
        acc -= sign_k * kf / x.powi(k as i32 + 1);
        x += 1.0;
    }
    let asym = if k == 0 {
        let mut s = x.ln() - 0.5 / x;
        let x2 = x * x;
        let mut p = x2;
        for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
            s -= b / (2.0 * (j + 1) as f64 * p);
            p *= x2;
        }
        s
    } else {
        let lead = if k % 2 == 1 { 1.0 } else { -1.0 };
        let mut s = factorial(k - 1) / x.powi(k as i32) + kf / (2.0 * x.powi(k as i32 + 1));
        for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
            let two_j = 2 * (j + 1);
            s += b * factorial(two_j + k - 1) / factorial(two_j) / x.powi((two_j + k) as i32);
        }
        lead * s
    };
    Ok(acc + asym)
}

/// Taylor jet of `log Gamma(z + w)` in `w`.
pub fn log_gamma_jet(z: Cx, order: usize) -> Result<Jet> {
    let mut j = Jet::zero(order);
    j.coeffs[0] = log_gamma(z)?;
    for k in 1..=order {
        j.coeffs[k] = polygamma(k - 1, z)? / factorial(k);
    }
    Ok(j)
}

/// Taylor jet of the entire function `1/Gamma(z + w)` in `w`.
///
/// Near the poles of Gamma the expansion point is pushed to the right with
/// `1/Gamma(x) = x (x+1) ... (x+N-1) / Gamma(x+N)`.
pub fn recip_gamma_jet(z: Cx, order: usize) -> Result<Jet> {
    if order > 12 {
        return Err(GmError::InvalidArgument(format!("jet order {order} > 12")));
    }
    if z.re >= 0.5 {
        let lg = log_gamma_jet(z, order)?;
        return Ok((-&lg).exp());
    }
    let shift = (0.5 - z.re).ceil() as usize;
    let mut acc = Jet::constant(Cx::new(1.0, 0.0), order);
    for j in 0..shift {
        acc = &acc * &Jet::variable(z + j as f64, order);
    }
    let tail = (-&log_gamma_jet(z + shift as f64, order)?).exp();
    let out = &acc * &tail;
    if out.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(GmError::NonFinite(format!("1/Gamma jet at {z}")));
    }
    Ok(out)
}

/// `1/Gamma(z + w) = exp(scale) * jet(w)`, with the size of the shift
/// product kept in `scale` so that arguments far to the left neither
/// overflow nor lose the jet to rounding.
pub fn recip_gamma_jet_scaled(z: Cx, order: usize) -> Result<(Jet, f64)> {
    if order > 12 {
        return Err(GmError::InvalidArgument(format!("jet order {order} > 12")));
    }
    let shift = if z.re >= 0.5 { 0 } else { (0.5 - z.re).ceil() as usize };
    let mut scale = 0.0;
    let mut acc = Jet::constant(Cx::new(1.0, 0.0), order);
    for j in 0..shift {
        let c = z + j as f64;
        let size = c.norm().max(1.0);
        // (c + w) / size
        let mut factor = Jet::zero(order);
        factor.coeffs[0] = c / size;
        if order >= 1 {
            factor.coeffs[1] = Cx::new(1.0 / size, 0.0);
        }
        acc = &acc * &factor;
        scale += size.ln();
    }
    let mut lg = -&log_gamma_jet(z + shift as f64, order)?;
    scale += lg.coeffs[0].re;
    lg.coeffs[0].re = 0.0;
    let out = &acc * &lg.exp();
    if out.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(GmError::NonFinite(format!("1/Gamma jet at {z}")));
    }
    Ok((out, scale))
}

/// Exponential integral `E1(x)` for real `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 needs a positive argument");
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        // Modified Lentz evaluation of the continued fraction.
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..300 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(npts: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; npts];
    let mut weights = vec![0.0; npts];
    let m = npts.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (npts as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=npts {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * x * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            dp = npts as f64 * (x * p1 - p2) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[npts - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[npts - 1 - i] = w;
    }
    (nodes, weights)
}
