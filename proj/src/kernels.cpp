#include "sqg/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "sqg/hankel.hpp"

namespace sqg {
namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// 4th-order finite-difference slopes on a uniform grid (one-sided stencils of
// the same order at the edges; they set the interpolation floor near r = 0).
std::vector<double> fd_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n);
    const double h = x[1] - x[0];
    auto stencil5 = [&](std::ptrdiff_t base, int dir) {
        // derivative at base from samples base, base+dir, ..., base+4 dir
        auto v = [&](int k) { return y[std::size_t(base + std::ptrdiff_t(k) * dir)]; };
        return dir * (-25 * v(0) + 48 * v(1) - 36 * v(2) + 16 * v(3) - 3 * v(4)) / (12 * h);
    };
    auto stencil5_off = [&](std::ptrdiff_t base, int dir) {
        // derivative at base from samples base-dir, base, ..., base+3 dir
        auto v = [&](int k) { return y[std::size_t(base + std::ptrdiff_t(k) * dir)]; };
        return dir * (-3 * v(-1) - 10 * v(0) + 18 * v(1) - 6 * v(2) + v(3)) / (12 * h);
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= 2 && i + 2 < n)
            m[i] = (-y[i + 2] + 8 * y[i + 1] - 8 * y[i - 1] + y[i - 2]) / (12 * h);
        else if (i == 0)
            m[i] = stencil5(0, 1);
        else if (i == 1)
            m[i] = stencil5_off(1, 1);
        else if (i == n - 2)
            m[i] = stencil5_off(std::ptrdiff_t(n) - 2, -1);
        else
            m[i] = stencil5(std::ptrdiff_t(n) - 1, -1);
    }
    return m;
}

// Composite Simpson on a uniform grid (odd point count enforced by callers).
double simpson(const std::vector<double>& y, double h) {
    double s = y.front() + y.back();
    for (std::size_t i = 1; i + 1 < y.size(); ++i) s += (i % 2 ? 4.0 : 2.0) * y[i];
    return s * h / 3.0;
}

}  // namespace

double KernelProfile::Interp::eval(double q) const {
    if (q <= x.front()) return y.front();
    if (q >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), q);
    const std::size_t i = std::size_t(it - x.begin()) - 1;
    const double h = x[i + 1] - x[i];
    const double t = (q - x[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h * slope[i] +
           (-2 * t3 + 3 * t2) * y[i + 1] + (t3 - t2) * h * slope[i + 1];
}

double KernelProfile::value_at(double r) const {
    r = std::abs(r);
    if (r <= r_split) return val_a_.eval(r * r);
    if (r <= floor_radius_) return std::exp(val_b_.eval(std::log(r)));
    const double edge = std::exp(val_b_.eval(std::log(floor_radius_)));
    return edge * std::pow(r / floor_radius_, tail_slope);
}

double KernelProfile::dvalue_at(double r) const {
    r = std::abs(r);
    if (r <= r_split) return 2.0 * r * dvq_a_.eval(r * r);
    if (r <= floor_radius_) return -std::exp(dv_b_.eval(std::log(r)));
    const double edge = -std::exp(dv_b_.eval(std::log(floor_radius_)));
    return edge * std::pow(r / floor_radius_, tail_slope - 1.0);
}

double default_profile_radius(double alpha, double nu) {
    const double g0 = detail::exp_power_moment(nu, alpha, 1) / kTwoPi;
    double lo = std::pow(nu, 1.0 / (2.0 * alpha)), hi = lo;
    while (detail::exp_bessel_integral(nu, alpha, 0, 1, hi).value / kTwoPi > 1e-8 * g0)
        hi *= 2.0;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = detail::exp_bessel_integral(nu, alpha, 0, 1, mid).value / kTwoPi;
        (v > 1e-8 * g0 ? lo : hi) = mid;
    }
    return std::max(hi, 8.0 * std::pow(nu, 1.0 / (2.0 * alpha)));
}

KernelProfile heat_kernel_profile(double alpha, double nu, double r_max, int n_samples) {
    ensure(alpha >= 0.5 && alpha <= 1.0, "heat_kernel_profile: alpha in [1/2, 1]");
    ensure(nu > 0.0, "heat_kernel_profile: nu > 0");
    ensure(r_max >= 8.0 * std::pow(nu, 1.0 / (2.0 * alpha)),
           "heat_kernel_profile: r_max >= 8 nu^{1/(2 alpha)}");
    ensure(n_samples >= 256, "heat_kernel_profile: n_samples >= 256");

    KernelProfile prof;
    prof.alpha = alpha;
    prof.nu = nu;
    prof.r_split = 2.0 * std::pow(nu, 1.0 / (2.0 * alpha));

    int n_a = (2 * n_samples) / 5;
    int n_b = n_samples - n_a;
    if (n_a % 2 == 0) ++n_a;
    if (n_b % 2 == 0) ++n_b;

    // zone A: uniform in q = r^2 on [0, r_split^2]
    const double q_max = prof.r_split * prof.r_split;
    std::vector<double> q_a(n_a), g_a(n_a), dq_a(n_a);
    // zone B: uniform in ln r on [r_split, r_max]
    std::vector<double> lr_b(n_b), g_b(n_b), dg_b(n_b);

    double residual = 0.0;
    auto g_of = [&](double r) {
        auto res = detail::exp_bessel_integral(nu, alpha, 0, 1, r);
        residual = std::max(residual, res.tail_bound);
        return res.value / kTwoPi;
    };
    auto dg_of = [&](double r) {
        auto res = detail::exp_bessel_integral(nu, alpha, 1, 2, r);
        residual = std::max(residual, res.tail_bound);
        return -res.value / kTwoPi;
    };

    for (int i = 0; i < n_a; ++i) {
        q_a[i] = q_max * double(i) / (n_a - 1);
        const double r = std::sqrt(q_a[i]);
        g_a[i] = g_of(r);
        // dg/dq = g'(r) / (2r); exact moment at the origin
        dq_a[i] = i == 0 ? -detail::exp_power_moment(nu, alpha, 3) / (8.0 * M_PI)
                         : dg_of(r) / (2.0 * r);
    }
    const double lr0 = std::log(prof.r_split), lr1 = std::log(r_max);
    for (int i = 0; i < n_b; ++i) {
        lr_b[i] = lr0 + (lr1 - lr0) * double(i) / (n_b - 1);
        const double r = std::exp(lr_b[i]);
        g_b[i] = g_of(r);
        dg_b[i] = dg_of(r);
    }

    const double g0 = g_a[0];
    prof.quad_residual = residual / (kTwoPi * g0);

    // Below the hybrid quadrature noise floor values are no longer meaningful;
    // the table is truncated there and the fitted tail extends it.
    const double floor_val = 1e-28 * g0;
    int last_b = n_b - 1;
    while (last_b > 8 && (g_b[last_b] <= floor_val || -dg_b[last_b] <= floor_val)) --last_b;
    if (last_b % 2 == 0 && last_b + 1 < n_b) ++last_b;  // keep Simpson parity

    // assemble the public table
    prof.radii.reserve(std::size_t(n_a) + last_b);
    prof.values.reserve(prof.radii.capacity());
    prof.dvalues.reserve(prof.radii.capacity());
    for (int i = 0; i < n_a; ++i) {
        const double r = std::sqrt(q_a[i]);
        prof.radii.push_back(r);
        prof.values.push_back(g_a[i]);
        prof.dvalues.push_back(2.0 * r * dq_a[i]);
    }
    for (int i = 1; i <= last_b; ++i) {
        prof.radii.push_back(std::exp(lr_b[i]));
        prof.values.push_back(g_b[i]);
        prof.dvalues.push_back(dg_b[i]);
    }

    // interpolants
    prof.val_a_.x = q_a;
    prof.val_a_.y = g_a;
    prof.val_a_.slope = fd_slopes(q_a, g_a);
    prof.dvq_a_.x = q_a;
    prof.dvq_a_.y = dq_a;
    prof.dvq_a_.slope = fd_slopes(q_a, dq_a);

    std::vector<double> lr_t(lr_b.begin(), lr_b.begin() + last_b + 1);
    std::vector<double> lg_t(last_b + 1), ldg_t(last_b + 1);
    for (int i = 0; i <= last_b; ++i) {
        lg_t[i] = std::log(g_b[i]);
        ldg_t[i] = std::log(-dg_b[i]);
    }
    prof.val_b_.x = lr_t;
    prof.val_b_.y = lg_t;
    prof.val_b_.slope = fd_slopes(lr_t, lg_t);
    prof.dv_b_.x = lr_t;
    prof.dv_b_.y = ldg_t;
    prof.dv_b_.slope = fd_slopes(lr_t, ldg_t);
    prof.floor_radius_ = std::exp(lr_t.back());

    // tail slope: least squares over the last decade of the trusted range
    {
        std::vector<double> xs, ys;
        for (int i = 0; i <= last_b; ++i)
            if (lr_t[i] >= lr_t[last_b] - std::log(10.0) / 2) {
                xs.push_back(lr_t[i]);
                ys.push_back(lg_t[i]);
            }
        prof.tail_slope = xs.size() >= 2 ? fit_slope(xs, ys) : -(2.0 + 2.0 * alpha);
    }

    // mass = 2 pi int g r dr: zone A as (1/2) int g dq, zone B as int g r^2 dlnr
    std::vector<double> gb_r2(last_b + 1);
    for (int i = 0; i <= last_b; ++i) {
        const double r = std::exp(lr_t[i]);
        gb_r2[i] = g_b[i] * r * r;
    }
    double mass = kTwoPi * (0.5 * simpson(g_a, q_a[1] - q_a[0]) + simpson(gb_r2, lr_t[1] - lr_t[0]));
    if (prof.tail_slope < -2.05) {
        const double re = prof.floor_radius_;
        mass += kTwoPi * g_b[last_b] * re * re / (-prof.tail_slope - 2.0);
    }
    prof.mass = mass;
    return prof;
}

double heat_kernel_value(const KernelProfile& p, double t, double r) {
    if (!(t > 0.0)) throw config_error("heat_kernel_at: t > 0 required");
    const double lam = std::pow(t, 1.0 / (2.0 * p.alpha));
    return p.value_at(r / lam) / (lam * lam);
}

double heat_kernel_at(const KernelProfile& p, double t, Vec2 x) {
    return heat_kernel_value(p, t, x.norm());
}

Vec2 riesz_kernel(Vec2 x) {
    const double r = x.norm();
    if (r == 0.0) throw config_error("riesz_kernel: x = 0");
    const double c = 1.0 / (kTwoPi * r * r * r);
    return {-x.y * c, x.x * c};
}

std::vector<Vec2> annulus_pv_convolve_at(const ScalarField& f, double r, double R,
                                         const std::vector<std::pair<int, int>>& points) {
    f.check_valid();
    ensure(r > 0.0 && r < R, "annulus_pv_convolve: need 0 < r < R");
    ensure(R <= std::min(f.spec.lx, f.spec.ly) / 2.0 + 1e-12,
           "annulus_pv_convolve: R <= min(lx,ly)/2");
    const GridSpec& s = f.spec;
    const double cell = s.hx() * s.hy();
    const double r2 = r * r, R2 = R * R;
    std::vector<Vec2> out(points.size());
    parallel_for(points.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t pi = lo; pi < hi; ++pi) {
            const auto [px, py] = points[pi];
            const double x0 = s.x(px), y0 = s.y(py);
            double ax = 0.0, ay = 0.0;
            for (int iy = 0; iy < s.ny; ++iy) {
                const double dy = y0 - s.y(iy);
                const double dy2 = dy * dy;
                if (dy2 > R2) continue;
                const double* row = &f.samples[std::size_t(iy) * s.nx];
                for (int ix = 0; ix < s.nx; ++ix) {
                    const double dx = x0 - s.x(ix);
                    const double d2 = dx * dx + dy2;
                    // tolerances keep samples exactly on the inner ring from
                    // flipping in and out with the rounding of lx/nx
                    if (d2 <= r2 * (1.0 + 1e-9) || d2 >= R2 * (1.0 - 1e-12)) continue;
                    const double w = row[ix] / (kTwoPi * d2 * std::sqrt(d2));
                    ax -= dy * w;
                    ay += dx * w;
                }
            }
            out[pi] = {ax * cell, ay * cell};
        }
    });
    return out;
}

VectorField annulus_pv_convolve(const ScalarField& f, double r, double R) {
    const GridSpec& s = f.spec;
    std::vector<std::pair<int, int>> pts;
    pts.reserve(std::size_t(s.n()));
    for (int iy = 0; iy < s.ny; ++iy)
        for (int ix = 0; ix < s.nx; ++ix) pts.push_back({ix, iy});
    const auto vals = annulus_pv_convolve_at(f, r, R, pts);
    VectorField out(s);
    for (std::size_t i = 0; i < vals.size(); ++i) {
        out.x.samples[i] = vals[i].x;
        out.y.samples[i] = vals[i].y;
    }
    return out;
}

namespace {

// C-infinity ramp from 0 at u<=0 to 1 at u>=1.
double smooth_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

}  // namespace

double lp_mask(double xi_norm, int j) {
    const double s = xi_norm / std::ldexp(1.0, j);
    if (s <= 0.5 || s >= 1.5) return 0.0;
    if (s < 0.75) return smooth_step((s - 0.5) / 0.25);
    if (s <= 1.0) return 1.0;
    return 1.0 - smooth_step((s / 2.0 - 0.5) / 0.25);
}

namespace {

bool shell_resolved(const GridSpec& s, int j) {
    // largest resolved |xi| along the shorter spectral extent
    const double xi_cap = std::min(M_PI * s.nx / s.lx, M_PI * s.ny / s.ly);
    return 0.5 * std::ldexp(1.0, j) < xi_cap;
}

}  // namespace

ScalarField lp_project(const ScalarField& f, int j, bool* resolved) {
    const bool ok = shell_resolved(f.spec, j);
    if (resolved) *resolved = ok;
    if (!ok) return ScalarField(f.spec);
    SpectralField F = forward_transform(f);
    const GridSpec& s = f.spec;
    for (int iy = 0; iy < s.ny; ++iy)
        for (int ix = 0; ix < s.nx; ++ix) {
            const double xin = std::hypot(s.freq_x(ix), s.freq_y(iy));
            F.at(ix, iy) *= lp_mask(xin, j);
        }
    return inverse_transform(F);
}

VectorField lp_riesz_block(const ScalarField& f, int j, bool* resolved) {
    const bool ok = shell_resolved(f.spec, j);
    if (resolved) *resolved = ok;
    VectorField out(f.spec);
    if (!ok) return out;
    SpectralField F = forward_transform(f);
    const GridSpec& s = f.spec;
    SpectralField U1(s), U2(s);
    for (int iy = 0; iy < s.ny; ++iy)
        for (int ix = 0; ix < s.nx; ++ix) {
            const double xi1 = s.freq_x(ix), xi2 = s.freq_y(iy);
            const double xin = std::hypot(xi1, xi2);
            if (xin == 0.0) continue;
            const std::complex<double> m = lp_mask(xin, j) * F.at(ix, iy) / xin;
            U1.at(ix, iy) = std::complex<double>(0, 1) * xi2 * m;   // -i * (-xi2)/|xi|
            U2.at(ix, iy) = std::complex<double>(0, -1) * xi1 * m;  // -i * (xi1)/|xi|
        }
    out.x = inverse_transform(U1);
    out.y = inverse_transform(U2);
    return out;
}

}  // namespace sqg
