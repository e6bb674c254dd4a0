// Radial Fourier-Bessel quadrature: integrals of the form
//   I(r) = \int_0^inf exp(-c s^{2a}) J_m(s r) s^p ds
// used to invert radially symmetric spectral kernels.
#pragma once

namespace sqg::detail {

struct OscResult {
    double value = 0.0;
    double cancellation = 0.0;  // sum of |panel| over |result|
    double tail_bound = 0.0;    // bound on the neglected s > S0 remainder
    bool used_quad = false;     // __float128 path taken
};

// m in {0,1}; p >= 1; c > 0; a in [1/2, 1]. The oscillatory range is summed
// over fixed Gauss panels aligned to J_m periods; when panel cancellation
// exceeds what double precision can support the sum is redone in __float128
// with quadmath Bessel values.
OscResult exp_bessel_integral(double c, double a, int m, int p, double r);

// Exact moment \int_0^inf exp(-c s^{2a}) s^p ds = Gamma((p+1)/(2a)) / (2a c^{(p+1)/(2a)}).
double exp_power_moment(double c, double a, int p);

}  // namespace sqg::detail
