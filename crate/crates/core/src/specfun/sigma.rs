use num_complex::Complex64;

use super::{lattice_distance, EllipticArgument, ModularPoint, SeriesTruncation, Theta1, DEFAULT_LATTICE_FLOOR};
use crate::error::{Error, Result};

/// σ_λ(t), E(t), ρ(λ) and ρ'(λ) at one (λ, t, τ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaE {
    pub sigma: Complex64,
    pub e: Complex64,
    pub rho: Complex64,
    pub rho_prime: Complex64,
}

pub fn sigma_and_e(
    arg: &EllipticArgument,
    t: Complex64,
    pt: &ModularPoint,
    trunc: &SeriesTruncation,
) -> Result<SigmaE> {
    sigma_and_e_with_floor(arg, t, pt, trunc, DEFAULT_LATTICE_FLOOR)
}

pub fn sigma_and_e_with_floor(
    arg: &EllipticArgument,
    t: Complex64,
    pt: &ModularPoint,
    trunc: &SeriesTruncation,
    floor: f64,
) -> Result<SigmaE> {
    trunc.validate()?;
    if arg.lattice_distance < floor {
        return Err(Error::PoleProximity {
            argument: "lambda",
            distance: arg.lattice_distance,
            floor,
        });
    }
    let dt = lattice_distance(t, pt.tau());
    if dt < floor {
        return Err(Error::PoleProximity {
            argument: "t",
            distance: dt,
            floor,
        });
    }
    let th = Theta1::new(pt, trunc);
    let lam = arg.lambda;
    let d0 = th.derivative_at_zero();
    let t_val = th.value(t)?;
    let l0 = th.value(lam)?;
    let l1 = th.eval(lam, 1, 0)?;
    let l2 = th.eval(lam, 2, 0)?;
    let rho = l1 / l0;
    Ok(SigmaE {
        sigma: th.value(lam - t)? * d0 / (l0 * t_val),
        e: t_val / d0,
        rho,
        rho_prime: l2 / l0 - rho * rho,
    })
}
