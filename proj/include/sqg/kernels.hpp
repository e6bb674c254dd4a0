// Fractional heat kernel profiles, the Riesz-type kernel K, annulus-truncated
// principal-value convolution, and Littlewood-Paley blocks.
//
// Perpendicular convention used throughout: for a vector v, v_perp = (-v2, v1),
// and the velocity operator acts spectrally as  u_hat = -i xi_perp / |xi| theta_hat.
// The matching real-space kernel is K(x) = (-x2, x1) / (2 pi |x|^3).
#pragma once

#include <vector>

#include "sqg/grid.hpp"

namespace sqg {

// Radial table of g_alpha(1,.) and its radial derivative. Values are samples
// of the time-1 kernel for the given diffusion coefficient nu; rescaling to
// other times goes through the dilation law in heat_kernel_at.
struct KernelProfile {
    double alpha = 0.0;
    double nu = 0.0;
    std::vector<double> radii;    // ascending, radii[0] == 0
    std::vector<double> values;   // g(1, r)
    std::vector<double> dvalues;  // d/dr g(1, r)
    double mass = 0.0;            // 2 pi * int g r dr including the fitted tail
    double tail_slope = 0.0;      // d ln g / d ln r fitted near r_max
    double quad_residual = 0.0;   // neglected spectral-tail bound, relative to g(0)
    double r_split = 0.0;         // boundary between the r^2-zone and the log-zone

    double value_at(double r) const;
    double dvalue_at(double r) const;
    double r_max() const { return radii.back(); }

  private:
    friend KernelProfile heat_kernel_profile(double, double, double, int);
    struct Interp {
        std::vector<double> x, y, slope;  // Hermite data
        double eval(double q) const;
    };
    Interp val_a_, val_b_, dvq_a_, dv_b_;  // zone A in q=r^2, zone B in log-log
    double floor_radius_ = 0.0;            // last radius with a trustworthy value
};

// Builds the radial table by Fourier-Bessel inversion of exp(-nu s^{2alpha}).
// alpha in [1/2, 1] (the 1/2 endpoint carries the Poisson closed form).
KernelProfile heat_kernel_profile(double alpha, double nu, double r_max, int n_samples = 1280);

// Radius where g(1,r) has decayed to ~1e-8 of g(1,0); a sensible table extent.
double default_profile_radius(double alpha, double nu);

// Dilated evaluation g(t, x) = t^{-1/alpha} g(1, |x| t^{-1/(2 alpha)}).
double heat_kernel_at(const KernelProfile& profile, double t, Vec2 x);
double heat_kernel_value(const KernelProfile& profile, double t, double r);

// K(x) = (-x2, x1) / (2 pi |x|^3); throws on x = 0.
Vec2 riesz_kernel(Vec2 x);

// Direct-sum convolution of chi_{r<|x-y|<R} K against f on the truncated
// plane (no periodic images). O(N^2); parallel over output rows.
VectorField annulus_pv_convolve(const ScalarField& f, double r, double R);

// Same truncated-plane sum evaluated only at the given sample indices.
std::vector<Vec2> annulus_pv_convolve_at(const ScalarField& f, double r, double R,
                                         const std::vector<std::pair<int, int>>& points);

// Smooth dyadic shell mask in |xi| / 2^j: ramps over [1/2, 3/4], is 1 on
// [3/4, 1], ramps down over [1, 3/2]; shells telescope to 1 for xi != 0.
double lp_mask(double xi_norm, int j);

// Spectral shell projection. If the shell support lies entirely above the
// resolved wavenumbers the result is zero and *resolved is set false.
ScalarField lp_project(const ScalarField& f, int j, bool* resolved = nullptr);

// (LP block of K) * f: mask times the multiplier -i xi_perp / |xi|.
VectorField lp_riesz_block(const ScalarField& f, int j, bool* resolved = nullptr);

}  // namespace sqg
