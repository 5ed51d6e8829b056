//! Riemann solvers expressed as HDG stabilisation matrices, and the classic
//! two-state DG fluxes they descend from.
//!
//! The HDG trace flux is `F(u_hat) n + tau(u_hat) (u_e - u_hat)`; each
//! scheme is just a choice of `tau`:
//!
//! | scheme | tau |
//! |---|---|
//! | Lax-Friedrichs | `(|v.n| + c) I` |
//! | Roe | `R diag(max(|lambda_i|, delta)) L` |
//! | HLL | `s+ I`, `s+ = max(0, v.n + c)` |
//! | HLLE | as HLL with `s+` also maximised over the element states |
//! | HLLEM | `s+ R diag(1, theta, theta, 1) L`, `theta = max(|v.n| / (|v.n| + c), theta0)` |
//!
//! Everything is evaluated at the hybrid state `u_hat`.
//!
//! The discontinuous-stabilisation derivation of the HLL family writes the
//! intermediate state with the denominator `s+ + s-`, whereas the two-state
//! HLL flux uses `s+ - s-`. The stabilisation matrices above are the
//! definitions used here; [`dg_reference_flux`] uses the classic `s+ - s-`
//! form.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use thiserror::Error;

use crate::ad::Real;
use crate::physics::{
    eigensystem, inviscid_normal_flux, pressure, sound_speed, velocity, GasModel, Jac, NSD, NVAR,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RiemannScheme {
    LaxFriedrichs,
    Roe { delta: f64 },
    Hll,
    Hlle,
    Hllem { theta0: f64 },
}

pub const DEFAULT_THETA0: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiemannError {
    #[error("unknown Riemann scheme {0:?} (expected lf, roe[:delta], hll, hlle or hllem[:theta0])")]
    UnknownScheme(String),
    #[error("invalid scheme parameter in {0:?}")]
    BadParameter(String),
    #[error("degenerate state: density {rho}, pressure {p}")]
    DegenerateState { rho: f64, p: f64 },
}

impl RiemannScheme {
    /// The four schemes compared throughout the verification studies.
    pub const STUDY: [RiemannScheme; 4] = [
        RiemannScheme::LaxFriedrichs,
        RiemannScheme::Roe { delta: 0.0 },
        RiemannScheme::Hll,
        RiemannScheme::Hllem {
            theta0: DEFAULT_THETA0,
        },
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::LaxFriedrichs => "LF",
            Self::Roe { .. } => "Roe",
            Self::Hll => "HLL",
            Self::Hlle => "HLLE",
            Self::Hllem { .. } => "HLLEM",
        }
    }

    fn validate(self, src: &str) -> Result<Self, RiemannError> {
        let ok = match self {
            Self::Roe { delta } => delta >= 0.0 && delta.is_finite(),
            Self::Hllem { theta0 } => theta0 > 0.0 && theta0 < 1.0,
            _ => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(RiemannError::BadParameter(src.to_string()))
        }
    }
}

impl FromStr for RiemannScheme {
    type Err = RiemannError;

    /// Parses `lf | roe[:delta] | hll | hlle | hllem[:theta0]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let (name, param) = match lower.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (lower.as_str(), None),
        };
        let value = |p: Option<&str>, default: f64| -> Result<f64, RiemannError> {
            p.map_or(Ok(default), |p| {
                p.trim()
                    .parse()
                    .map_err(|_| RiemannError::BadParameter(s.to_string()))
            })
        };
        let scheme = match name {
            "lf" | "laxfriedrichs" | "lax-friedrichs" if param.is_none() => Self::LaxFriedrichs,
            "roe" => Self::Roe {
                delta: value(param, 0.0)?,
            },
            "hll" if param.is_none() => Self::Hll,
            "hlle" if param.is_none() => Self::Hlle,
            "hllem" => Self::Hllem {
                theta0: value(param, DEFAULT_THETA0)?,
            },
            _ => return Err(RiemannError::UnknownScheme(s.to_string())),
        };
        scheme.validate(s)
    }
}

impl fmt::Display for RiemannScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LaxFriedrichs => write!(f, "lf"),
            Self::Roe { delta } => write!(f, "roe:{delta}"),
            Self::Hll => write!(f, "hll"),
            Self::Hlle => write!(f, "hlle"),
            Self::Hllem { theta0 } => write!(f, "hllem:{theta0}"),
        }
    }
}

/// `Phi_ii = max(|lambda_i|, delta)`.
pub fn entropy_fix_eigs<T: Real>(lambda: &[T; NVAR], delta: f64) -> [T; NVAR] {
    std::array::from_fn(|i| lambda[i].abs().max(T::cst(delta)))
}

/// Wave-speed estimates `(s+, s-)` at the hybrid state. With `others`, the
/// HLLE variant also maximises (minimises) over the given side states.
pub fn wave_speeds<T: Real>(
    u_hat: &[T; NVAR],
    n: [f64; NSD],
    gamma: f64,
    others: &[&[T; NVAR]],
) -> (T, T) {
    let speeds = |u: &[T; NVAR]| {
        let v = velocity(u);
        let vn = v[0] * n[0] + v[1] * n[1];
        let c = sound_speed(u, gamma);
        (vn + c, vn - c)
    };
    let (mut sp, mut sm) = speeds(u_hat);
    for u in others {
        let (a, b) = speeds(u);
        sp = sp.max(a);
        sm = sm.min(b);
    }
    (sp.max(T::zero()), sm.min(T::zero()))
}

fn scaled_identity<T: Real>(s: T) -> Jac<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { s } else { T::zero() }))
}

/// Convective stabilisation `tau(u_hat)` for a unit normal `n`.
///
/// `u_e` is only consulted by the HLLE variant, whose wave-speed bound also
/// includes the element state.
pub fn tau_kernel<T: Real>(
    scheme: RiemannScheme,
    u_hat: &[T; NVAR],
    u_e: &[T; NVAR],
    n: [f64; NSD],
    gamma: f64,
) -> Jac<T> {
    match scheme {
        RiemannScheme::LaxFriedrichs => {
            let v = velocity(u_hat);
            let vn = v[0] * n[0] + v[1] * n[1];
            scaled_identity(vn.abs() + sound_speed(u_hat, gamma))
        }
        RiemannScheme::Roe { delta } => {
            let es = eigensystem(u_hat, n, gamma);
            es.compose(&entropy_fix_eigs(&es.lambda, delta))
        }
        RiemannScheme::Hll => scaled_identity(wave_speeds(u_hat, n, gamma, &[]).0),
        RiemannScheme::Hlle => scaled_identity(wave_speeds(u_hat, n, gamma, &[u_e]).0),
        RiemannScheme::Hllem { theta0 } => {
            let es = eigensystem(u_hat, n, gamma);
            let vn = es.lambda[1];
            let c = (es.lambda[3] - es.lambda[0]) * 0.5;
            let theta = (vn.abs() / (vn.abs() + c)).max(T::cst(theta0));
            let sp = (vn + c).max(T::zero());
            let mut out = es.compose(&[T::one(), theta, theta, T::one()]);
            for row in out.iter_mut() {
                for x in row.iter_mut() {
                    *x = *x * sp;
                }
            }
            out
        }
    }
}

/// Stabilisation matrix together with a flag set when it vanishes because
/// the face is a supersonic inflow (`s+ = 0`) for an HLL-type scheme.
#[derive(Debug, Clone, Copy)]
pub struct Stabilization {
    pub tau: Matrix4<f64>,
    pub upwinded: bool,
}

fn check_state(u: &[f64; NVAR], gamma: f64) -> Result<(), RiemannError> {
    let p = pressure(u, gamma);
    if !(u[0] > 0.0 && p > 0.0) {
        return Err(RiemannError::DegenerateState { rho: u[0], p });
    }
    Ok(())
}

/// Checked [`tau_kernel`] at the hybrid state alone.
pub fn stabilization_tau(
    scheme: RiemannScheme,
    u_hat: &[f64; NVAR],
    n: [f64; NSD],
    gas: &GasModel,
) -> Result<Stabilization, RiemannError> {
    check_state(u_hat, gas.gamma)?;
    let tau = tau_kernel(scheme, u_hat, u_hat, n, gas.gamma);
    let tau = Matrix4::from_fn(|i, j| tau[i][j]);
    let upwinded = matches!(
        scheme,
        RiemannScheme::Hll | RiemannScheme::Hlle | RiemannScheme::Hllem { .. }
    ) && wave_speeds(u_hat, n, gas.gamma, &[]).0 == 0.0;
    Ok(Stabilization { tau, upwinded })
}

/// HDG trace flux `F(u_hat) n + tau(u_hat) (u_e - u_hat)`.
pub fn trace_flux_kernel<T: Real>(
    scheme: RiemannScheme,
    u_hat: &[T; NVAR],
    u_e: &[T; NVAR],
    n: [f64; NSD],
    gamma: f64,
) -> [T; NVAR] {
    let mut f = inviscid_normal_flux(u_hat, n, gamma);
    let tau = tau_kernel(scheme, u_hat, u_e, n, gamma);
    for i in 0..NVAR {
        for j in 0..NVAR {
            f[i] += tau[i][j] * (u_e[j] - u_hat[j]);
        }
    }
    f
}

/// Checked [`trace_flux_kernel`].
pub fn trace_flux(
    u_hat: &[f64; NVAR],
    u_e: &[f64; NVAR],
    n: [f64; NSD],
    scheme: RiemannScheme,
    gas: &GasModel,
) -> Result<[f64; NVAR], RiemannError> {
    check_state(u_hat, gas.gamma)?;
    check_state(u_e, gas.gamma)?;
    Ok(trace_flux_kernel(scheme, u_hat, u_e, n, gas.gamma))
}

/// Two-state HLL-type flux for given wave speeds `s+ >= 0 >= s-` and
/// contact matrix `theta` (identity for HLL):
/// `(s+ F+ - s- F-) / (s+ - s-) - s+ s- / (s+ - s-) theta (u+ - u-)`.
pub fn hll_two_state(
    f_plus: &[f64; NVAR],
    f_minus: &[f64; NVAR],
    jump: &[f64; NVAR],
    sp: f64,
    sm: f64,
    theta: &Jac<f64>,
) -> [f64; NVAR] {
    let w = sp - sm;
    if w == 0.0 {
        return std::array::from_fn(|i| 0.5 * (f_plus[i] + f_minus[i]));
    }
    std::array::from_fn(|i| {
        let d: f64 = (0..NVAR).map(|j| theta[i][j] * jump[j]).sum();
        (sp * f_plus[i] - sm * f_minus[i]) / w - sp * sm / w * d
    })
}

/// Classic two-state DG flux seen from the `+` side with normal `n`
/// pointing from `+` to `-`. LF and Roe use the arithmetic mean as the
/// intermediate state; the HLL family uses the mean for its wave speeds.
pub fn dg_reference_flux(
    u_plus: &[f64; NVAR],
    u_minus: &[f64; NVAR],
    n: [f64; NSD],
    scheme: RiemannScheme,
    gas: &GasModel,
) -> [f64; NVAR] {
    let g = gas.gamma;
    let star: [f64; NVAR] = std::array::from_fn(|i| 0.5 * (u_plus[i] + u_minus[i]));
    let fp = inviscid_normal_flux(u_plus, n, g);
    let fm = inviscid_normal_flux(u_minus, n, g);
    let jump: [f64; NVAR] = std::array::from_fn(|i| u_plus[i] - u_minus[i]);
    let apply = |m: &Jac<f64>, scale: f64| -> [f64; NVAR] {
        std::array::from_fn(|i| scale * (0..NVAR).map(|j| m[i][j] * jump[j]).sum::<f64>())
    };
    let central: [f64; NVAR] = std::array::from_fn(|i| 0.5 * (fp[i] + fm[i]));
    match scheme {
        RiemannScheme::LaxFriedrichs => {
            let v = velocity(&star);
            let lmax = (v[0] * n[0] + v[1] * n[1]).abs() + sound_speed(&star, g);
            std::array::from_fn(|i| central[i] + 0.5 * lmax * jump[i])
        }
        RiemannScheme::Roe { delta } => {
            let es = eigensystem(&star, n, g);
            let d = apply(&es.compose(&entropy_fix_eigs(&es.lambda, delta)), 0.5);
            std::array::from_fn(|i| central[i] + d[i])
        }
        RiemannScheme::Hll | RiemannScheme::Hlle | RiemannScheme::Hllem { .. } => {
            let others: Vec<&[f64; NVAR]> = if matches!(scheme, RiemannScheme::Hlle) {
                vec![u_plus, u_minus]
            } else {
                vec![]
            };
            let (sp, sm) = wave_speeds(&star, n, g, &others);
            let theta = match scheme {
                RiemannScheme::Hllem { theta0 } => {
                    let es = eigensystem(&star, n, g);
                    let vn = es.lambda[1];
                    let c = sound_speed(&star, g);
                    let th = (vn.abs() / (vn.abs() + c)).max(theta0);
                    es.compose(&[1.0, th, th, 1.0])
                }
                _ => scaled_identity(1.0),
            };
            hll_two_state(&fp, &fm, &jump, sp, sm, &theta)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::conservative_from_primitive;

    fn gas() -> GasModel {
        GasModel::inviscid(0.5)
    }

    fn rest() -> [f64; NVAR] {
        // unit sound speed: p = rho / gamma
        conservative_from_primitive(1.0, [0.0, 0.0], 1.0 / 1.4, 1.4)
    }

    fn max_abs(a: &Matrix4<f64>) -> f64 {
        a.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn parses_scheme_strings() {
        assert_eq!("lf".parse::<RiemannScheme>().unwrap(), RiemannScheme::LaxFriedrichs);
        assert_eq!(
            "roe:0.1".parse::<RiemannScheme>().unwrap(),
            RiemannScheme::Roe { delta: 0.1 }
        );
        assert_eq!("roe".parse::<RiemannScheme>().unwrap(), RiemannScheme::Roe { delta: 0.0 });
        assert_eq!("HLL".parse::<RiemannScheme>().unwrap(), RiemannScheme::Hll);
        assert_eq!(
            "hllem".parse::<RiemannScheme>().unwrap(),
            RiemannScheme::Hllem { theta0: 1e-8 }
        );
        assert!("roe:-1".parse::<RiemannScheme>().is_err());
        assert!("hllem:1.5".parse::<RiemannScheme>().is_err());
        assert!("hllc".parse::<RiemannScheme>().is_err());
        for s in RiemannScheme::STUDY {
            assert_eq!(s.to_string().parse::<RiemannScheme>().unwrap(), s);
        }
    }

    #[test]
    fn lf_at_rest_is_identity() {
        let t = stabilization_tau(RiemannScheme::LaxFriedrichs, &rest(), [1.0, 0.0], &gas()).unwrap();
        assert!(max_abs(&(t.tau - Matrix4::identity())) < 1e-14);
    }

    #[test]
    fn hll_subsonic_speed() {
        let u = conservative_from_primitive(1.0, [0.5, 0.0], 1.0 / 1.4, 1.4);
        let t = stabilization_tau(RiemannScheme::Hll, &u, [1.0, 0.0], &gas()).unwrap();
        assert!(max_abs(&(t.tau - Matrix4::identity() * 1.5)) < 1e-14);
        assert!(!t.upwinded);
        let u = conservative_from_primitive(1.0, [-2.0, 0.0], 1.0 / 1.4, 1.4);
        let t = stabilization_tau(RiemannScheme::Hll, &u, [1.0, 0.0], &gas()).unwrap();
        assert!(t.upwinded && max_abs(&t.tau) == 0.0);
    }

    #[test]
    fn hllem_clamps_theta_for_aligned_flow() {
        let u = conservative_from_primitive(1.0, [0.0, 0.7], 1.0 / 1.4, 1.4);
        let n = [1.0, 0.0];
        let t = stabilization_tau(RiemannScheme::Hllem { theta0: 1e-3 }, &u, n, &gas()).unwrap();
        let es = eigensystem(&u, n, 1.4);
        let expect = es.compose(&[1.0, 1e-3, 1e-3, 1.0]);
        let expect = Matrix4::from_fn(|i, j| expect[i][j]);
        assert!(max_abs(&(t.tau - expect)) < 1e-13);
    }

    #[test]
    fn entropy_fix_examples() {
        let phi = entropy_fix_eigs(&[-0.05, 0.0, 0.0, 1.9], 0.1);
        assert_eq!(phi, [0.1, 0.1, 0.1, 1.9]);
        let phi = entropy_fix_eigs(&[-0.05, 0.0, 0.3, 1.9], 0.0);
        assert_eq!(phi, [0.05, 0.0, 0.3, 1.9]);
        assert_eq!(entropy_fix_eigs(&[-0.5, 0.2, 0.2, 0.9], 2.0), [2.0; 4]);
    }

    #[test]
    fn wave_speed_examples() {
        let sup = conservative_from_primitive(1.0, [2.0, 0.0], 1.0 / 1.4, 1.4);
        let (sp, sm) = wave_speeds(&sup, [1.0, 0.0], 1.4, &[]);
        assert!((sp - 3.0).abs() < 1e-14 && sm == 0.0);
        let (sp, sm) = wave_speeds(&sup, [-1.0, 0.0], 1.4, &[]);
        assert!(sp == 0.0 && (sm + 3.0).abs() < 1e-14);
        let slow = conservative_from_primitive(1.0, [0.2, 0.0], 1.0 / 1.4, 1.4);
        let fast = conservative_from_primitive(1.0, [0.9, 0.0], 1.0 / 1.4, 1.4);
        let (sp, _) = wave_speeds(&slow, [1.0, 0.0], 1.4, &[&fast, &slow]);
        assert!((sp - 1.9).abs() < 1e-14);
    }

    #[test]
    fn lf_trace_flux_adds_scaled_jump() {
        let u = rest();
        let mut ue = u;
        ue[0] += 1e-3;
        let f = trace_flux(&u, &ue, [1.0, 0.0], RiemannScheme::LaxFriedrichs, &gas()).unwrap();
        let fu = inviscid_normal_flux(&u, [1.0, 0.0], 1.4);
        assert!((f[0] - fu[0] - 1e-3).abs() < 1e-15);
        for i in 1..NVAR {
            assert!((f[i] - fu[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn dg_hll_upwinds_supersonic_flow() {
        let up = conservative_from_primitive(1.0, [2.0, 0.1], 1.0 / 1.4, 1.4);
        let um = conservative_from_primitive(1.1, [2.1, 0.0], 0.8 / 1.4, 1.4);
        let f = dg_reference_flux(&up, &um, [1.0, 0.0], RiemannScheme::Hll, &gas());
        let fp = inviscid_normal_flux(&up, [1.0, 0.0], 1.4);
        for i in 0..NVAR {
            assert!((f[i] - fp[i]).abs() < 1e-13);
        }
    }
}
