//! Pollution sources: the compactly supported mollifier and the convolved
//! anisotropic / hydrostatic source pair.

use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{config, Result};
use crate::fields::{dealias_in_place, Field, Parity, SpectralGrid, Spectrum, Wavenumbers};

/// `exp(1 / (r^2 - 1))` inside the unit ball, 0 outside.
#[inline]
pub fn mollifier_profile(r: f64) -> f64 {
    if r < 1.0 {
        (1.0 / (r * r - 1.0)).exp()
    } else {
        0.0
    }
}

const RADIAL_NODES: usize = 4000;

/// Trapezoid rule on [0, 1]. The integrands used here are even at 0 and
/// flat at 1, so the rule converges spectrally.
fn radial_quadrature(f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / RADIAL_NODES as f64;
    let mut acc = 0.5 * f(0.0);
    for i in 1..RADIAL_NODES {
        acc += f(i as f64 * h);
    }
    acc * h
}

/// Mass of the mollifier, independent of its width: the integral of
/// `exp(1/(|y|^2 - 1))` over the unit ball.
pub fn mollifier_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| 4.0 * PI * radial_quadrature(|r| r * r * mollifier_profile(r)))
}

/// Fourier transform of the unit-mass mollifier at wavenumber magnitude
/// `kappa` (already multiplied by the width). Equals 1 at 0.
pub fn mollifier_transform(kappa: f64) -> f64 {
    let raw = if kappa.abs() < 1e-8 {
        4.0 * PI * radial_quadrature(|r| r * r * mollifier_profile(r))
    } else {
        4.0 * PI / kappa * radial_quadrature(|r| r * (kappa * r).sin() * mollifier_profile(r))
    };
    raw / mollifier_mass()
}

fn check_center(grid: &SpectralGrid, center: [f64; 3]) -> Result<()> {
    let inside = center[0] > 0.0
        && center[0] < 1.0
        && center[1] > 0.0
        && center[1] < 1.0
        && center[2] > -grid.a
        && center[2] < grid.a;
    if !inside {
        return config(format!("source center {center:?} is not strictly inside the box"));
    }
    Ok(())
}

fn check_width(grid: &SpectralGrid, eps: f64) -> Result<()> {
    let half_min_period = 0.5 * grid.periods().iter().cloned().fold(f64::INFINITY, f64::min);
    if !(eps > 0.0 && eps < half_min_period) {
        return config(format!(
            "mollifier width {eps} must be positive and below half the smallest period ({half_min_period})"
        ));
    }
    Ok(())
}

/// Shortest periodic offset from `center` to `x`.
fn wrapped_offset(grid: &SpectralGrid, x: [f64; 3], center: [f64; 3]) -> [f64; 3] {
    let p = grid.periods();
    let mut d = [0.0; 3];
    for i in 0..3 {
        let mut v = (x[i] - center[i]).rem_euclid(p[i]);
        if v > 0.5 * p[i] {
            v -= p[i];
        }
        d[i] = v;
    }
    d
}

/// Samples `eps^-3 exp(1 / (|x - center|^2 / eps^2 - 1))`, with the distance
/// measured on the periodic box.
pub fn mollified_delta(grid: &SpectralGrid, eps: f64, center: [f64; 3]) -> Result<Field> {
    check_width(grid, eps)?;
    let g = *grid;
    Ok(Field::from_fn(g, Parity::None, move |x| {
        let d = wrapped_offset(&g, x, center);
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() / eps;
        mollifier_profile(r) / eps.powi(3)
    }))
}

/// Smooth compactly supported bump centred at the box origin (periodic),
/// with peak value `amplitude`.
pub fn default_kernel(grid: &SpectralGrid, radius: f64, amplitude: f64) -> Field {
    bump(grid, [0.0, 0.0, 0.0], radius, amplitude)
}

/// The bump of [`default_kernel`] centred at `center`.
pub fn bump(grid: &SpectralGrid, center: [f64; 3], radius: f64, amplitude: f64) -> Field {
    let g = *grid;
    Field::from_fn(g, Parity::None, move |x| {
        let d = wrapped_offset(&g, x, center);
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() / radius;
        amplitude * std::f64::consts::E * mollifier_profile(r)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    /// Point source; the kernel is the band-limited delta of the grid.
    MollifiedDelta,
    /// Mollifier convolved with a smooth kernel.
    ConvolvedDelta,
    Zero,
    /// A smooth field used unchanged for both systems.
    CustomSmooth,
}

#[derive(Clone, Debug)]
pub struct SourceSpec {
    pub kind: SourceKind,
    /// Mollifier width; tied to the aspect ratio of the run.
    pub eps: f64,
    pub center: [f64; 3],
    /// Kernel centred at the box origin. Required for `CustomSmooth`;
    /// `ConvolvedDelta` falls back to [`default_kernel`] with radius 0.25.
    pub kernel: Option<Field>,
}

impl SourceSpec {
    pub fn zero() -> Self {
        Self {
            kind: SourceKind::Zero,
            eps: 0.1,
            center: [0.5, 0.5, -0.5],
            kernel: None,
        }
    }

    pub fn convolved(eps: f64, center: [f64; 3], kernel: Option<Field>) -> Self {
        Self {
            kind: SourceKind::ConvolvedDelta,
            eps,
            center,
            kernel,
        }
    }
}

/// Anisotropic and hydrostatic sources on the grid.
#[derive(Clone, Debug)]
pub struct SourcePair {
    pub s_eps: Field,
    pub s_limit: Field,
}

fn translate_coeffs(s: &Spectrum, center: [f64; 3], eps: Option<f64>) -> Spectrum {
    let g = *s.grid();
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let wn = Wavenumbers::new(&g);
    let mut out = s.clone();
    let coeffs = out.coeffs_mut();
    wn.for_each_mode(&g, |idx, k| {
        let c = coeffs[idx];
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let phase = Complex64::from_polar(1.0, -(k[0] * center[0] + k[1] * center[1] + k[2] * center[2]));
        let damp = match eps {
            Some(e) => {
                let kappa = e * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
                *cache
                    .entry(kappa.to_bits())
                    .or_insert_with(|| mollifier_transform(kappa))
            }
            None => 1.0,
        };
        coeffs[idx] = c * phase * damp;
    });
    out
}

/// Odd extension across z = 0 by antisymmetrization, `s(z) - s(-z)`.
/// For a source supported in the lower half this is exactly the odd extension.
fn odd_extension(f: &Field) -> Field {
    f.sub(&f.reflect_z()).with_parity(Parity::Odd)
}

fn band_limited_delta(grid: &SpectralGrid) -> Spectrum {
    let mut s = Spectrum::zeros(*grid, Parity::None);
    let v = grid.volume();
    for c in s.coeffs_mut() {
        *c = Complex64::new(1.0 / v, 0.0);
    }
    s
}

/// Dealiased spectrum of the kernel convolved with the mollifier.
fn kernel_spectrum(spec: &SourceSpec, grid: &SpectralGrid) -> Result<Spectrum> {
    check_center(grid, spec.center)?;
    check_width(grid, spec.eps)?;
    let mut base = match (spec.kind, &spec.kernel) {
        (SourceKind::MollifiedDelta, _) => band_limited_delta(grid),
        (_, Some(k)) => {
            if k.grid() != grid {
                return config("source kernel lives on a different grid");
            }
            k.spectrum()
        }
        (_, None) => default_kernel(grid, 0.25, 1.0).spectrum(),
    };
    dealias_in_place(&mut base);
    Ok(base)
}

/// Builds `s_eps = (delta_eps / M) * phi` and `s = phi(. - center)`, both
/// odd-extended in z and truncated to the dealiased band. The mollifier is
/// normalized by its mass `M` so that `s_eps -> s`.
pub fn build_source(spec: &SourceSpec, grid: &SpectralGrid) -> Result<SourcePair> {
    let zero = || Field::zeros(*grid, Parity::Odd);
    match spec.kind {
        SourceKind::Zero => {
            return Ok(SourcePair {
                s_eps: zero(),
                s_limit: zero(),
            })
        }
        SourceKind::CustomSmooth => {
            let Some(kernel) = &spec.kernel else {
                return config("custom-smooth source needs a kernel field");
            };
            if kernel.grid() != grid {
                return config("source kernel lives on a different grid");
            }
            let mut s = kernel.spectrum();
            dealias_in_place(&mut s);
            let f = s.to_field().with_parity(Parity::Odd).symmetrize();
            return Ok(SourcePair {
                s_eps: f.clone(),
                s_limit: f,
            });
        }
        _ => {}
    }
    let base = kernel_spectrum(spec, grid)?;
    let s_eps = translate_coeffs(&base, spec.center, Some(spec.eps)).to_field();
    let s_limit = translate_coeffs(&base, spec.center, None).to_field();
    let trunc = |f: Field| {
        let mut s = odd_extension(&f).spectrum();
        dealias_in_place(&mut s);
        s.to_field()
    };
    Ok(SourcePair {
        s_eps: trunc(s_eps),
        s_limit: trunc(s_limit),
    })
}

/// Imaginary residue left by the spectral convolution for a spec.
pub fn convolution_residue(spec: &SourceSpec, grid: &SpectralGrid) -> Result<f64> {
    let base = kernel_spectrum(spec, grid)?;
    Ok(translate_coeffs(&base, spec.center, Some(spec.eps)).imaginary_residue())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_constant() {
        // independent check: composite Simpson on r^2 exp(1/(r^2-1))
        let n = 20000;
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let r = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * r * r * mollifier_profile(r);
        }
        let simpson = 4.0 * PI * acc * h / 3.0;
        assert!((mollifier_mass() - simpson).abs() < 1e-10);
        assert!((mollifier_mass() - 0.441088887).abs() < 1e-8);
    }

    #[test]
    fn center_value_and_edge() {
        let g = SpectralGrid::new(40, 40, 20, 0.5).unwrap();
        let c = g.point(20, 20, 10);
        let d = mollified_delta(&g, 0.1, c).unwrap();
        assert!((d.at(20, 20, 10) - (-1.0_f64).exp() / 1e-3).abs() < 1e-9);
        // node at distance exactly eps
        assert_eq!(d.at(24, 20, 10), 0.0);
        assert!(d.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn oversized_support_rejected() {
        let g = SpectralGrid::new(16, 16, 16, 0.2).unwrap();
        assert!(mollified_delta(&g, 0.25, [0.5, 0.5, 0.0]).is_err());
        assert!(mollified_delta(&g, 0.0, [0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn zero_kind_is_zero() {
        let g = SpectralGrid::cubic(8, 1.0).unwrap();
        let s = build_source(&SourceSpec::zero(), &g).unwrap();
        assert_eq!(s.s_eps.max_abs(), 0.0);
        assert_eq!(s.s_limit.max_abs(), 0.0);
    }

    #[test]
    fn custom_smooth_needs_kernel() {
        let g = SpectralGrid::cubic(8, 1.0).unwrap();
        let spec = SourceSpec {
            kind: SourceKind::CustomSmooth,
            eps: 0.1,
            center: [0.5, 0.5, -0.5],
            kernel: None,
        };
        assert!(matches!(build_source(&spec, &g), Err(crate::Error::Config(_))));
    }

    #[test]
    fn transform_small_argument_expansion() {
        // second moment: ghat(k) ~ 1 - k^2 <r^2> / 6 for a radial unit-mass kernel
        let m2 = 4.0 * PI * radial_quadrature(|r| r.powi(4) * mollifier_profile(r)) / mollifier_mass();
        let k = 1e-2;
        let expect = 1.0 - k * k * m2 / 6.0;
        assert!((mollifier_transform(k) - expect).abs() < 1e-9);
        assert!((mollifier_transform(0.0) - 1.0).abs() < 1e-14);
    }
}
