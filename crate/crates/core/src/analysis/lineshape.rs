use crate::error::{Error, Result};
use crate::units::HARTREE_EV;

use super::RealSpectrum;

/// Width and position of a single resonance. Energies in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineshapeFit {
    /// Lorentzian fit center when the fit succeeded, else the midpoint of
    /// the half-maximum crossings.
    pub center: f64,
    /// Distance between the interpolated half-maximum crossings.
    pub fwhm: f64,
    pub gamma: f64,
    pub peak_height: f64,
    pub fit_center: Option<f64>,
    pub fit_fwhm: Option<f64>,
    /// Crossing and fitted widths differ by more than 10%.
    pub disagreement: bool,
    pub bins_above_half: usize,
}

/// Half-maximum width of the strongest peak with `lo <= omega <= hi` (a.u.).
///
/// The Lorentzian refinement uses the contiguous bins around the maximum
/// that exceed `fit_level` times the peak value.
pub fn fwhm(spectrum: &RealSpectrum, window: (f64, f64), fit_level: f64) -> Result<LineshapeFit> {
    let range = spectrum.window(window.0, window.1);
    if range.len() < 3 {
        return Err(Error::InsufficientResolution(format!(
            "window [{:.4}, {:.4}] holds {} bins",
            window.0,
            window.1,
            range.len()
        )));
    }
    let w = &spectrum.omega[range.clone()];
    let v = &spectrum.values[range];
    let (p, &peak) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    if !(peak > 0.0) {
        return Err(Error::InsufficientResolution(
            "no positive peak in window".into(),
        ));
    }
    let half = 0.5 * peak;

    let mut l = p;
    while l > 0 && v[l - 1] >= half {
        l -= 1;
    }
    let mut r = p;
    while r + 1 < v.len() && v[r + 1] >= half {
        r += 1;
    }
    let bins = r - l + 1;
    if l == 0 || r + 1 == v.len() {
        return Err(Error::InsufficientResolution(
            "half maximum is not reached inside the window".into(),
        ));
    }
    if bins < 3 {
        return Err(Error::InsufficientResolution(format!(
            "only {bins} bins above half maximum"
        )));
    }
    let cross = |a: usize, b: usize| w[a] + (half - v[a]) / (v[b] - v[a]) * (w[b] - w[a]);
    let left = cross(l - 1, l);
    let right = cross(r + 1, r);
    let width = right - left;

    let mut fl = p;
    while fl > 0 && v[fl - 1] >= fit_level * peak {
        fl -= 1;
    }
    let mut fr = p;
    while fr + 1 < v.len() && v[fr + 1] >= fit_level * peak {
        fr += 1;
    }
    let fit = if fr - fl + 1 >= 3 {
        fit_lorentzian(&w[fl..=fr], &v[fl..=fr], [peak, w[p], 0.5 * width])
    } else {
        None
    };

    let fit_center = fit.map(|f| f[1]);
    let fit_fwhm = fit.map(|f| 2.0 * f[2].abs());
    let disagreement = fit_fwhm.is_some_and(|fw| (fw - width).abs() > 0.1 * width);
    let center = fit_center.unwrap_or(0.5 * (left + right));
    Ok(LineshapeFit {
        center: center * HARTREE_EV,
        fwhm: width * HARTREE_EV,
        gamma: 0.5 * width * HARTREE_EV,
        peak_height: fit.map_or(peak, |f| f[0]),
        fit_center: fit_center.map(|c| c * HARTREE_EV),
        fit_fwhm: fit_fwhm.map(|f| f * HARTREE_EV),
        disagreement,
        bins_above_half: bins,
    })
}

/// Levenberg-Marquardt fit of `h / (1 + ((w - c) / g)^2)`.
fn fit_lorentzian(w: &[f64], y: &[f64], start: [f64; 3]) -> Option<[f64; 3]> {
    let resid = |p: &[f64; 3]| -> f64 {
        w.iter()
            .zip(y)
            .map(|(&wi, &yi)| {
                let u = (wi - p[1]) / p[2];
                let d = p[0] / (1.0 + u * u) - yi;
                d * d
            })
            .sum()
    };
    let mut p = start;
    let mut cost = resid(&p);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for (&wi, &yi) in w.iter().zip(y) {
            let u = (wi - p[1]) / p[2];
            let den = 1.0 + u * u;
            let f = p[0] / den;
            let j = [
                1.0 / den,
                p[0] * 2.0 * u / (p[2] * den * den),
                p[0] * 2.0 * u * u / (p[2] * den * den),
            ];
            for a in 0..3 {
                jtr[a] += j[a] * (f - yi);
                for b in 0..3 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..20 {
            let mut m = jtj;
            for (a, row) in m.iter_mut().enumerate() {
                row[a] *= 1.0 + lambda;
            }
            let step = solve3(m, jtr)?;
            let trial = [p[0] - step[0], p[1] - step[1], p[2] - step[2]];
            let c = resid(&trial);
            if c.is_finite() && c <= cost {
                let done = (cost - c) <= 1e-15 * cost.max(1e-300);
                p = trial;
                cost = c;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if done {
                    return Some(p);
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (p.iter().all(|x| x.is_finite()) && p[2] != 0.0).then_some(p)
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut x = [0.0; 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut mk = m;
        for r in 0..3 {
            mk[r][k] = b[r];
        }
        *xk = det(&mk) / d;
    }
    Some(x)
}

/// Shift of the fitted resonance center, `on - off`, in meV.
pub fn peak_shift(on: &RealSpectrum, off: &RealSpectrum, window: (f64, f64)) -> Result<f64> {
    let a = fwhm(on, window, 0.8)?;
    let b = fwhm(off, window, 0.8)?;
    Ok((a.center - b.center) * 1e3)
}
