//! Exact truncated q-series over the Gaussian rationals.

mod builtins;
mod gaussian;
mod identity;
mod series;

pub use builtins::{alternating_pair, expand_builtin, Builtin};
pub use gaussian::GaussianRational;
pub use identity::{check_series_identity, SeriesExpr, SeriesIdentity, SeriesMismatch, SeriesReport};
pub use series::{format_qexp, BivariateSeries, QExp, SeriesRow};

use num_rational::Ratio;

fn b(x: Builtin) -> SeriesExpr {
    SeriesExpr::builtin(x)
}

fn th0(kappa: u32, n: i64) -> SeriesExpr {
    b(Builtin::theta_level_at_zero(kappa, n))
}

fn two() -> GaussianRational {
    GaussianRational::from_integer(2)
}

/// θ^s_{2,1}(λ) = ϑ₁(λ + 1/2), with full x-dependence.
pub fn half_period_shift() -> SeriesIdentity {
    SeriesIdentity {
        name: "half-period-shift".into(),
        lhs: b(Builtin::ThetaLevel {
            kappa: 2,
            n: 1,
            at_zero: false,
            symmetrized: true,
        }),
        rhs: b(Builtin::Theta1 { half_shifts: 1 }),
    }
}

/// 2θ_{2,1}(0) = η φ₃², with φ₃² = 2 (φ₃/√2)².
pub fn theta21_eta_phi3() -> SeriesIdentity {
    SeriesIdentity {
        name: "theta21-eta-phi3".into(),
        lhs: SeriesExpr::scale(two(), th0(2, 1)),
        rhs: SeriesExpr::scale(
            two(),
            SeriesExpr::times(b(Builtin::Eta), SeriesExpr::pow(b(Builtin::Phi3Reduced), 2)),
        ),
    }
}

/// (θ_{4,1}(0) − θ_{4,3}(0)) φ₁ = η.
pub fn theta4_phi1() -> SeriesIdentity {
    SeriesIdentity {
        name: "theta4-phi1".into(),
        lhs: SeriesExpr::times(SeriesExpr::minus(th0(4, 1), th0(4, 3)), b(Builtin::Phi1)),
        rhs: b(Builtin::Eta),
    }
}

/// (θ_{4,1}(0) + θ_{4,3}(0)) φ₂ = η.
pub fn theta4_phi2() -> SeriesIdentity {
    SeriesIdentity {
        name: "theta4-phi2".into(),
        lhs: SeriesExpr::times(SeriesExpr::plus(th0(4, 1), th0(4, 3)), b(Builtin::Phi2)),
        rhs: b(Builtin::Eta),
    }
}

/// ((θ_{4,0}(0) − θ_{4,4}(0)) φ₃)² = 2η², the square of (θ_{4,0} − θ_{4,4})φ₃ = √2 η.
pub fn theta4_phi3_squared() -> SeriesIdentity {
    SeriesIdentity {
        name: "theta4-phi3-squared".into(),
        lhs: SeriesExpr::scale(
            two(),
            SeriesExpr::times(
                SeriesExpr::pow(SeriesExpr::minus(th0(4, 0), th0(4, 4)), 2),
                SeriesExpr::pow(b(Builtin::Phi3Reduced), 2),
            ),
        ),
        rhs: SeriesExpr::scale(two(), SeriesExpr::pow(b(Builtin::Eta), 2)),
    }
}

/// θ_{6,1}(0) − θ_{6,5}(0) = η.
pub fn theta6_eta() -> SeriesIdentity {
    SeriesIdentity {
        name: "theta6-eta".into(),
        lhs: SeriesExpr::minus(th0(6, 1), th0(6, 5)),
        rhs: b(Builtin::Eta),
    }
}

/// Every built-in theta identity with the order it is checked to by default.
pub fn theta_identities() -> Vec<(SeriesIdentity, QExp)> {
    vec![
        (half_period_shift(), Ratio::from_integer(5)),
        (theta21_eta_phi3(), Ratio::from_integer(20)),
        (theta4_phi1(), Ratio::from_integer(20)),
        (theta4_phi2(), Ratio::from_integer(20)),
        (theta4_phi3_squared(), Ratio::from_integer(20)),
        (theta6_eta(), Ratio::from_integer(20)),
    ]
}

/// Identities looked up by name.
pub fn identity_by_name(name: &str) -> Option<SeriesIdentity> {
    theta_identities()
        .into_iter()
        .map(|(id, _)| id)
        .find(|id| id.name == name)
}
