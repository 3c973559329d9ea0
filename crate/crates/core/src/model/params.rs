use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

use crate::error::{config, Result};

/// Model constants of the rescaled system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Aspect ratio, also the downwind diffusivity scale.
    pub eps: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// Modulus of the Earth rotation vector.
    pub f: f64,
    /// Angle between the downwind axis and east, radians.
    pub theta: f64,
    /// Latitude, radians.
    pub phi: f64,
    /// Half-height of the extended box.
    pub a: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            eps: 0.1,
            nu1: 1.0,
            nu2: 1.0,
            nu3: 1.0,
            k1: 1.0,
            k2: 1.0,
            k3: 1.0,
            f: 1.0,
            theta: FRAC_PI_4,
            phi: FRAC_PI_4,
            a: 1.0,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return config(format!("eps must lie in (0, 1], got {}", self.eps));
        }
        for (name, v) in [
            ("nu1", self.nu1),
            ("nu2", self.nu2),
            ("nu3", self.nu3),
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("a", self.a),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return config(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.f.is_finite() && self.f >= 0.0) {
            return config(format!("f must be nonnegative, got {}", self.f));
        }
        if !self.theta.is_finite() || !self.phi.is_finite() {
            return config("theta and phi must be finite");
        }
        Ok(())
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn coriolis(&self) -> Coriolis {
        rotate_coriolis(self.f, self.theta, self.phi)
    }

    pub fn viscosity(&self) -> [f64; 3] {
        [self.nu1, self.nu2, self.nu3]
    }

    /// Tracer diffusivities of the anisotropic system: (eps K1, K2, K3).
    pub fn aniso_diffusivity(&self) -> [f64; 3] {
        [self.eps * self.k1, self.k2, self.k3]
    }
}

/// Components of twice the rotation vector in downwind-matching axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coriolis {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Rotates `f (0, cos phi, sin phi)` by `theta` about the vertical and doubles it.
pub fn rotate_coriolis(f: f64, theta: f64, phi: f64) -> Coriolis {
    Coriolis {
        alpha: -2.0 * f * theta.sin() * phi.cos(),
        beta: 2.0 * f * theta.cos() * phi.cos(),
        gamma: 2.0 * f * phi.sin(),
    }
}

/// Quantities on the thin physical domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThinDomainQuantities {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub v_x: f64,
    pub v_y: f64,
    pub v_z: f64,
    pub nu_x: f64,
    pub nu_y: f64,
    pub nu_z: f64,
    pub k_x: f64,
    pub k_y: f64,
    pub k_z: f64,
    /// Pollutant concentration P.
    pub concentration: f64,
    /// Pollutant source Q.
    pub source: f64,
    pub pressure: f64,
}

/// The same quantities on the eps-free box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaledQuantities {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub c: f64,
    pub s: f64,
    pub p: f64,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return config(format!("scaling needs eps > 0, got {eps}"));
    }
    Ok(())
}

/// Applies z = eps x3, v_z = eps u3, nu_z = eps^2 nu3, K_z = eps^2 K3,
/// K_x = eps K1, P = c / eps, Q = s / eps, q = p.
pub fn scale_forward(q: &ThinDomainQuantities, eps: f64) -> Result<RescaledQuantities> {
    check_eps(eps)?;
    Ok(RescaledQuantities {
        x1: q.x,
        x2: q.y,
        x3: q.z / eps,
        u1: q.v_x,
        u2: q.v_y,
        u3: q.v_z / eps,
        nu1: q.nu_x,
        nu2: q.nu_y,
        nu3: q.nu_z / (eps * eps),
        k1: q.k_x / eps,
        k2: q.k_y,
        k3: q.k_z / (eps * eps),
        c: eps * q.concentration,
        s: eps * q.source,
        p: q.pressure,
    })
}

pub fn scale_inverse(r: &RescaledQuantities, eps: f64) -> Result<ThinDomainQuantities> {
    check_eps(eps)?;
    Ok(ThinDomainQuantities {
        x: r.x1,
        y: r.x2,
        z: eps * r.x3,
        v_x: r.u1,
        v_y: r.u2,
        v_z: eps * r.u3,
        nu_x: r.nu1,
        nu_y: r.nu2,
        nu_z: eps * eps * r.nu3,
        k_x: eps * r.k1,
        k_y: r.k2,
        k_z: eps * eps * r.k3,
        concentration: r.c / eps,
        source: r.s / eps,
        pressure: r.p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn geophysical_frame_at_zero_angle() {
        let c = rotate_coriolis(1.3, 0.0, 0.6);
        assert_eq!(c.alpha, -0.0);
        assert!((c.beta - 2.0 * 1.3 * 0.6_f64.cos()).abs() < 1e-15);
        assert!((c.gamma - 2.0 * 1.3 * 0.6_f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn quarter_turn_points_along_minus_x() {
        let c = rotate_coriolis(1.0, FRAC_PI_2, 0.0);
        assert!((c.alpha + 2.0).abs() < 1e-15);
        assert!(c.beta.abs() < 1e-15);
        assert!(c.gamma.abs() < 1e-15);
    }

    #[test]
    fn matches_rotation_matrix() {
        // oracle: explicit 3x3 rotation about z applied to f (0, cos phi, sin phi)
        for &(f, th, ph) in &[(1.0, 0.3, 0.9), (0.7, -2.0, 1.2), (2.5, PI, -0.4)] {
            let w = [0.0, f * f64::cos(ph), f * f64::sin(ph)];
            let r = [
                [f64::cos(th), -f64::sin(th), 0.0],
                [f64::sin(th), f64::cos(th), 0.0],
                [0.0, 0.0, 1.0],
            ];
            let rw: Vec<f64> = (0..3)
                .map(|i| 2.0 * (0..3).map(|j| r[i][j] * w[j]).sum::<f64>())
                .collect();
            let c = rotate_coriolis(f, th, ph);
            assert!((c.alpha - rw[0]).abs() < 1e-14);
            assert!((c.beta - rw[1]).abs() < 1e-14);
            assert!((c.gamma - rw[2]).abs() < 1e-14);
        }
    }

    fn sample() -> ThinDomainQuantities {
        ThinDomainQuantities {
            x: 0.3,
            y: 0.7,
            z: 0.01,
            v_x: 2.0,
            v_y: -1.0,
            v_z: 0.02,
            nu_x: 1.5,
            nu_y: 0.5,
            nu_z: 0.003,
            k_x: 0.04,
            k_y: 0.9,
            k_z: 0.002,
            concentration: 3.0,
            source: 7.0,
            pressure: 11.0,
        }
    }

    #[test]
    fn unit_eps_is_identity() {
        let q = sample();
        let r = scale_forward(&q, 1.0).unwrap();
        assert_eq!(scale_inverse(&r, 1.0).unwrap(), q);
        assert_eq!(r.u3, q.v_z);
        assert_eq!(r.k1, q.k_x);
    }

    #[test]
    fn vertical_velocity_substitution() {
        let r = scale_forward(&sample(), 0.1).unwrap();
        assert!((r.u3 - 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_eps_rejected() {
        assert!(scale_forward(&sample(), 0.0).is_err());
        assert!(scale_inverse(&scale_forward(&sample(), 0.5).unwrap(), 0.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::default().validate().is_ok());
        assert!(PhysicalParams::default().with_eps(0.0).validate().is_err());
        assert!(PhysicalParams::default().with_eps(1.5).validate().is_err());
        let mut p = PhysicalParams::default();
        p.k2 = 0.0;
        assert!(p.validate().is_err());
    }
}
