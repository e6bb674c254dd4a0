// Fourier-multiplier operators: the fractional Laplacian (spectral and
// singular-integral forms), the fractional heat semigroup and its gradient,
// the K * grad G tensor action, and the Riesz constitutive velocity.
#pragma once

#include "sqg/grid.hpp"

namespace sqg {

// Caches the multiplier tables for one (alpha, nu, grid) triple. Zero
// frequency maps to 0 for Lambda^{2 alpha}, gradients and the Riesz
// multiplier, and to 1 for the semigroup. Odd (imaginary) multipliers have
// their Nyquist rows zeroed so real fields stay real.
struct OperatorContext {
    double alpha = 0.0;
    double nu = 0.0;
    GridSpec spec;
    std::vector<double> lam2a;      // |xi|^{2 alpha}
    std::vector<double> gx, gy;     // gradient frequencies (Nyquist zeroed)
    std::vector<double> rzx, rzy;   // xi_perp / |xi| (Nyquist zeroed, 0 at xi=0)

    OperatorContext(double alpha_, double nu_, const GridSpec& s);
};

ScalarField fractional_laplacian_spectral(const OperatorContext& ctx, const ScalarField& f);
ScalarField fractional_laplacian_spectral(const ScalarField& f, double alpha);

// Symmetrized second-difference quadrature of the singular-integral form with
// normalization c_alpha = 4^alpha Gamma(1+alpha) / (pi |Gamma(-alpha)|).
// Cells inside |z| <= epsilon are replaced by the local Laplacian correction;
// the constant term beyond r_cut is corrected analytically. f is extended
// periodically, so r_cut may exceed the domain size. alpha = 1 is rejected
// (callers use the spectral path there). r_cut = 0 selects min(lx,ly)/4.
ScalarField fractional_laplacian_integral(const ScalarField& f, double alpha, double epsilon,
                                          double r_cut = 0.0);
std::vector<double> fractional_laplacian_integral_at(const ScalarField& f, double alpha,
                                                     double epsilon,
                                                     const std::vector<std::pair<int, int>>& pts,
                                                     double r_cut = 0.0);

// exp(-nu |xi|^{2 alpha} t) and  i xi exp(-nu |xi|^{2 alpha} t); t >= 0.
ScalarField heat_semigroup(const OperatorContext& ctx, const ScalarField& f, double t);
VectorField grad_heat_semigroup(const OperatorContext& ctx, const ScalarField& f, double t);

// (K * grad G_alpha(t)) applied to p: the divergence contraction
// i xi . p_hat times the semigroup, pushed through the Riesz multiplier.
// Requires t > 0 (the kernel is not integrable at t = 0).
VectorField k_grad_semigroup_apply(const OperatorContext& ctx, const VectorField& p, double t);

// u = -grad_perp Lambda^{-1} theta as the multiplier -i xi_perp / |xi|.
VectorField riesz_velocity(const ScalarField& theta);

ScalarField divergence(const VectorField& u);
VectorField gradient(const ScalarField& f);
ScalarField mean_removed(const ScalarField& f);
double mean_value(const ScalarField& f);

// Pointwise product with the 2/3-rule spectral truncation applied after.
ScalarField multiply_dealiased(const ScalarField& a, const ScalarField& b);
ScalarField dealias_23(const ScalarField& f);

// Both sides of PV K * f = psi * grad_perp f (psi = -1/(2 pi |x|)) on the
// truncated domain; returns the relative L-inf discrepancy over the given
// sample points (all points when pts is empty).
double pv_gradient_identity_check(const ScalarField& f,
                                  const std::vector<std::pair<int, int>>& pts = {});

}  // namespace sqg
