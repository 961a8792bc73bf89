//! The Selberg zeta function: partial Euler products, the log-derivative
//! series, cusp integrals, topological residue tables, the functional
//! equation factor, `Ξ'/Ξ`, and the geometric side of the trace formula.

mod cusp;
mod divisor;
mod functional;
mod geometric;
mod product;

pub use cusp::{angle_from_defect, cusp_integral, cusp_integral_quad, cusp_integral_series, CuspIntegral, SERIES_TOL};
pub use divisor::{
    negative_residue, residue_table, DivisorEntry, DivisorTable, PoleLocation, ScatteringInput, TRACE_INTEGRALITY_TOL,
};
pub use functional::{digamma_poisson, psi_factor, xi_logderiv, FunctionalEqParams, XiData, XiForm};
pub use geometric::{
    cusp_kernel_integral, digamma_integral, e_constant, geometric_side, identity_integral, ClassBundle, CuspEllipticTerm,
    GeometricReport, GroupData, NceTerm, Normalization, SpectralExternal, TermEntry, TermStatus,
};
pub use product::{
    expand_classes, log_zeta_partial, logderiv_central_difference, zeta_logderiv_series, zeta_partial, LoxTerm, RepEig,
    ZetaClass, DEFAULT_KL_TOL, MAX_KL_SUM,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::resolvent_pair;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Synthetic data: one fake eigenvalue `λ = 1 - s₁²`, constant `φ'/φ = κ`,
    /// and a loxodromic series defined through the trace formula.
    #[test]
    fn consistent_xi_satisfies_spectral_identity() {
        let (s, b) = (2.0, 3.0);
        let (s1, kappa) = (0.5, 0.3);
        let data = GroupData { vol: 0.3, dim_v: 1, index: 2, k_inf: 1, l_inf: 1, eta: 1.1, lattice_sums: vec![] };
        let bundle = ClassBundle {
            lox: vec![],
            nce: vec![NceTerm { trace: c(1.0), torsion_order: 2, sin2: 1.0, n0: Some(5.8) }],
            cusp: vec![CuspEllipticTerm {
                trace: crate::bianchi::Cyclo12::one(),
                centralizer_order: 4,
                one_minus_eps2_sq: 4,
                c_abs: 2f64.sqrt(),
            }],
        };
        let tr_s0 = 1.0;
        let pair = resolvent_pair(c(s), c(b)).unwrap();
        // (1/4π) ∫ h(1+t²) κ dt = κ/4 (1/s - 1/B)
        let phase = c(kappa / 4.0 * (1.0 / s - 1.0 / b));
        let ext = SpectralExternal { tr_s0: Some(tr_s0), phase_term: Some(phase) };
        let report = geometric_side(&pair, &data, &bundle, &ext, Normalization::Standard).unwrap();
        let spectral_sum = (pair.h)(c(1.0 - s1 * s1));
        let non_lox: Complex64 = report.terms.iter().filter(|t| t.label != "loxodromic").map(|t| t.value).sum();
        // trace formula: Σ h(λ) = geometric side, so the loxodromic term is the remainder
        let lox_diff = spectral_sum - non_lox;
        let lox_b = c(0.017);
        let lox_s = (lox_diff + lox_b / (2.0 * b)) * (2.0 * s);
        let xi = XiData::new(&data, &bundle, tr_s0, Normalization::Standard).unwrap();
        let lhs = xi_logderiv(c(s), lox_s, &xi, XiForm::Consistent).unwrap() / (2.0 * s)
            - xi_logderiv(c(b), lox_b, &xi, XiForm::Consistent).unwrap() / (2.0 * b);
        let spectral = c(1.0 / (s * s - s1 * s1) - 1.0 / (b * b - s1 * s1)) - phase;
        assert!((lhs - spectral).norm() < 1e-8, "{lhs} vs {spectral}");
        // the displayed expression misses the identity term and carries the
        // opposite signs, so it does not satisfy the identity
        let disp = xi_logderiv(c(s), lox_s, &xi, XiForm::Displayed).unwrap() / (2.0 * s)
            - xi_logderiv(c(b), lox_b, &xi, XiForm::Displayed).unwrap() / (2.0 * b);
        assert!((disp - spectral).norm() > 1e-3);
    }
}
