#include "sqg/operators.hpp"

#include <algorithm>
#include <cmath>

#include "sqg/kernels.hpp"

namespace sqg {
namespace {

constexpr double kTwoPi = 2.0 * M_PI;

SpectralField apply_real_multiplier(const SpectralField& F, const std::vector<double>& m) {
    SpectralField out = F;
    for (std::size_t i = 0; i < out.coeff.size(); ++i) out.coeff[i] *= m[i];
    return out;
}

}  // namespace

OperatorContext::OperatorContext(double alpha_, double nu_, const GridSpec& s)
    : alpha(alpha_), nu(nu_), spec(s) {
    s.validate();
    ensure(alpha > 0.0 && alpha <= 1.0, "OperatorContext: alpha in (0, 1]");
    ensure(nu > 0.0, "OperatorContext: nu > 0");
    const std::size_t n = std::size_t(s.n());
    lam2a.resize(n);
    gx.resize(n);
    gy.resize(n);
    rzx.resize(n);
    rzy.resize(n);
    for (int iy = 0; iy < s.ny; ++iy)
        for (int ix = 0; ix < s.nx; ++ix) {
            const std::size_t i = std::size_t(iy) * s.nx + ix;
            const double xi1 = s.freq_x(ix), xi2 = s.freq_y(iy);
            const double xin = std::hypot(xi1, xi2);
            lam2a[i] = std::pow(xin, 2.0 * alpha);
            const bool nyq_x = ix == s.nx / 2, nyq_y = iy == s.ny / 2;
            gx[i] = nyq_x || nyq_y ? 0.0 : xi1;
            gy[i] = nyq_x || nyq_y ? 0.0 : xi2;
            if (xin > 0.0 && !nyq_x && !nyq_y) {
                rzx[i] = -xi2 / xin;  // xi_perp = (-xi2, xi1)
                rzy[i] = xi1 / xin;
            }
        }
    lam2a[0] = 0.0;
}

ScalarField fractional_laplacian_spectral(const OperatorContext& ctx, const ScalarField& f) {
    SpectralField F = forward_transform(f);
    return inverse_transform(apply_real_multiplier(F, ctx.lam2a));
}

ScalarField fractional_laplacian_spectral(const ScalarField& f, double alpha) {
    OperatorContext ctx(alpha, 1.0, f.spec);
    return fractional_laplacian_spectral(ctx, f);
}

ScalarField heat_semigroup(const OperatorContext& ctx, const ScalarField& f, double t) {
    ensure(t >= 0.0, "heat_semigroup: t >= 0 required");
    SpectralField F = forward_transform(f);
    for (std::size_t i = 0; i < F.coeff.size(); ++i)
        F.coeff[i] *= std::exp(-ctx.nu * ctx.lam2a[i] * t);
    return inverse_transform(F);
}

VectorField grad_heat_semigroup(const OperatorContext& ctx, const ScalarField& f, double t) {
    ensure(t >= 0.0, "grad_heat_semigroup: t >= 0 required");
    SpectralField F = forward_transform(f);
    SpectralField U1(f.spec), U2(f.spec);
    const std::complex<double> I(0, 1);
    for (std::size_t i = 0; i < F.coeff.size(); ++i) {
        const auto c = F.coeff[i] * std::exp(-ctx.nu * ctx.lam2a[i] * t);
        U1.coeff[i] = I * ctx.gx[i] * c;
        U2.coeff[i] = I * ctx.gy[i] * c;
    }
    VectorField out(f.spec);
    out.x = inverse_transform(U1);
    out.y = inverse_transform(U2);
    return out;
}

VectorField k_grad_semigroup_apply(const OperatorContext& ctx, const VectorField& p, double t) {
    ensure(t > 0.0, "k_grad_semigroup_apply: t > 0 required");
    SpectralField P1 = forward_transform(p.x);
    SpectralField P2 = forward_transform(p.y);
    SpectralField U1(p.spec()), U2(p.spec());
    const std::complex<double> I(0, 1);
    for (std::size_t i = 0; i < P1.coeff.size(); ++i) {
        // scalar contraction i xi . p_hat, then the Riesz multiplier -i xi_perp/|xi|
        const auto w =
            I * (ctx.gx[i] * P1.coeff[i] + ctx.gy[i] * P2.coeff[i]) *
            std::exp(-ctx.nu * ctx.lam2a[i] * t);
        U1.coeff[i] = -I * ctx.rzx[i] * w;
        U2.coeff[i] = -I * ctx.rzy[i] * w;
    }
    VectorField out(p.spec());
    out.x = inverse_transform(U1);
    out.y = inverse_transform(U2);
    return out;
}

VectorField riesz_velocity(const ScalarField& theta) {
    OperatorContext ctx(1.0, 1.0, theta.spec);
    SpectralField F = forward_transform(theta);
    SpectralField U1(theta.spec), U2(theta.spec);
    const std::complex<double> I(0, 1);
    for (std::size_t i = 0; i < F.coeff.size(); ++i) {
        U1.coeff[i] = -I * ctx.rzx[i] * F.coeff[i];
        U2.coeff[i] = -I * ctx.rzy[i] * F.coeff[i];
    }
    VectorField out(theta.spec);
    out.x = inverse_transform(U1);
    out.y = inverse_transform(U2);
    return out;
}

ScalarField divergence(const VectorField& u) {
    OperatorContext ctx(1.0, 1.0, u.spec());
    SpectralField U1 = forward_transform(u.x);
    SpectralField U2 = forward_transform(u.y);
    const std::complex<double> I(0, 1);
    SpectralField D(u.spec());
    for (std::size_t i = 0; i < D.coeff.size(); ++i)
        D.coeff[i] = I * (ctx.gx[i] * U1.coeff[i] + ctx.gy[i] * U2.coeff[i]);
    return inverse_transform(D);
}

VectorField gradient(const ScalarField& f) {
    OperatorContext ctx(1.0, 1.0, f.spec);
    return grad_heat_semigroup(ctx, f, 0.0);
}

double mean_value(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.samples) s += v;
    return s / double(f.samples.size());
}

ScalarField mean_removed(const ScalarField& f) {
    ScalarField out = f;
    const double m = mean_value(f);
    for (double& v : out.samples) v -= m;
    return out;
}

ScalarField dealias_23(const ScalarField& f) {
    SpectralField F = forward_transform(f);
    const GridSpec& s = f.spec;
    for (int iy = 0; iy < s.ny; ++iy)
        for (int ix = 0; ix < s.nx; ++ix)
            if (std::abs(s.kx(ix)) > s.nx / 3 || std::abs(s.ky(iy)) > s.ny / 3)
                F.at(ix, iy) = 0.0;
    return inverse_transform(F);
}

ScalarField multiply_dealiased(const ScalarField& a, const ScalarField& b) {
    ensure(a.spec == b.spec, "multiply_dealiased: grid mismatch");
    ScalarField prod = a;
    for (std::size_t i = 0; i < prod.samples.size(); ++i) prod.samples[i] *= b.samples[i];
    return dealias_23(prod);
}

// ---------------------------------------------------------------------------
// singular-integral fractional Laplacian

namespace {

double c_alpha(double alpha) {
    return std::pow(4.0, alpha) * std::tgamma(1.0 + alpha) /
           (M_PI * std::abs(std::tgamma(-alpha)));
}

// 12-point Gauss-Legendre on [0,1] (weights sum to 1), for cell integrals.
struct CellRule {
    static constexpr int n = 12;
    double x[n], w[n];
    CellRule() {
        for (int i = 0; i < n; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 64; ++it) {
                double p0 = 1, p1 = 0;
                for (int j = 0; j < n; ++j) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
                }
                double dp = n * (z * p0 - p1) / (z * z - 1.0);
                double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            double p0 = 1, p1 = 0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
            }
            double dp = n * (z * p0 - p1) / (z * z - 1.0);
            x[i] = (1.0 - z) / 2.0;
            w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

const CellRule& cell_rule() {
    static const CellRule r;
    return r;
}

// integral of |z|^{-2-2alpha} over the rectangle cell centered at (cx, cy)
double cell_kernel_weight(double cx, double cy, double hx, double hy, double s_exp) {
    const auto& g = cell_rule();
    double acc = 0.0;
    for (int i = 0; i < CellRule::n; ++i)
        for (int j = 0; j < CellRule::n; ++j) {
            const double zx = cx + (g.x[i] - 0.5) * hx;
            const double zy = cy + (g.x[j] - 0.5) * hy;
            acc += g.w[i] * g.w[j] * std::pow(zx * zx + zy * zy, -s_exp / 2.0);
        }
    return acc * hx * hy;
}

// integral of z1^2 |z|^{-2-2alpha} (moment = 2) or |z|^4 |z|^{-2-2alpha}
// (moment = 4) over the cell; the origin cell is integrated in polar form
// (the integrand is bounded there but not smooth).
double cell_moment_weight(double cx, double cy, double hx, double hy, double s_exp, int moment) {
    const auto& g = cell_rule();
    if (cx == 0.0 && cy == 0.0) {
        // sum over angular panels; rho(phi) is the rectangle boundary
        double acc = 0.0;
        const int nphi = 64;
        for (int k = 0; k < nphi; ++k)
            for (int i = 0; i < CellRule::n; ++i) {
                const double phi = (k + g.x[i]) * (2.0 * M_PI / nphi);
                const double c = std::cos(phi), s = std::sin(phi);
                const double rho =
                    std::min(hx / 2.0 / std::max(std::abs(c), 1e-300),
                             hy / 2.0 / std::max(std::abs(s), 1e-300));
                const double ang = moment == 2 ? c * c : 1.0;
                const double pw = moment + 2.0 - s_exp;
                acc += g.w[i] * (2.0 * M_PI / nphi) * ang * std::pow(rho, pw) / pw;
            }
        return acc;
    }
    double acc = 0.0;
    for (int i = 0; i < CellRule::n; ++i)
        for (int j = 0; j < CellRule::n; ++j) {
            const double zx = cx + (g.x[i] - 0.5) * hx;
            const double zy = cy + (g.x[j] - 0.5) * hy;
            const double r2 = zx * zx + zy * zy;
            const double num = moment == 2 ? zx * zx : r2 * r2;
            acc += g.w[i] * g.w[j] * num * std::pow(r2, -s_exp / 2.0);
        }
    return acc * hx * hy;
}

}  // namespace

std::vector<double> fractional_laplacian_integral_at(const ScalarField& f, double alpha,
                                                     double epsilon,
                                                     const std::vector<std::pair<int, int>>& pts,
                                                     double r_cut) {
    f.check_valid();
    ensure(alpha > 0.5 && alpha < 1.0,
           "fractional_laplacian_integral: alpha in (1/2, 1); use the spectral form at alpha = 1");
    const GridSpec& s = f.spec;
    const double hx = s.hx(), hy = s.hy();
    ensure(epsilon >= std::max(hx, hy), "fractional_laplacian_integral: epsilon >= grid spacing");
    if (r_cut <= 0.0) r_cut = std::min(s.lx, s.ly) / 4.0;
    ensure(r_cut > 2.0 * epsilon, "fractional_laplacian_integral: r_cut > 2 epsilon");

    const double s_exp = 2.0 + 2.0 * alpha;
    const double ca = c_alpha(alpha);

    // cell-aligned weights; inner cells contribute through the local
    // Laplacian moment instead of the second difference
    const int mx = int(std::ceil(r_cut / hx)), my = int(std::ceil(r_cut / hy));
    struct Offset {
        int ox, oy;
        double w;
    };
    std::vector<Offset> outer;
    // m2, m4: z1^2 and |z|^4 kernel moments of the inner cell union, plus the
    // quadratic/quartic sampling defects of the outer cell weights (cell
    // integrals versus point values at cell centers), which make the scheme
    // exact on local quadratics and quartics.
    double m2 = 0.0, m4 = 0.0;
    for (int oy = -my; oy <= my; ++oy)
        for (int ox = -mx; ox <= mx; ++ox) {
            const double cx = ox * hx, cy = oy * hy;
            const double d = std::hypot(cx, cy);
            if (d > r_cut) continue;
            if (d <= epsilon) {
                m2 += cell_moment_weight(cx, cy, hx, hy, s_exp, 2);
                m4 += cell_moment_weight(cx, cy, hx, hy, s_exp, 4);
            } else {
                const double w = cell_kernel_weight(cx, cy, hx, hy, s_exp);
                outer.push_back({ox, oy, w});
                if (d <= 8.0 * epsilon) {
                    m2 += cell_moment_weight(cx, cy, hx, hy, s_exp, 2) - w * cx * cx;
                    m4 += cell_moment_weight(cx, cy, hx, hy, s_exp, 4) - w * d * d * d * d;
                }
            }
        }

    // spectral Laplacian and bilaplacian drive the inner-region Taylor terms:
    // int_U (f(x) - f(x+z)) k dz = -(Delta f / 2) m2 - (Delta^2 f / 64) m4 + O(m6)
    const GridSpec& sp = f.spec;
    SpectralField fh = forward_transform(f);
    SpectralField l1h(sp), l2h(sp);
    for (int iy = 0; iy < sp.ny; ++iy)
        for (int ix = 0; ix < sp.nx; ++ix) {
            const double xin2 = sp.freq_x(ix) * sp.freq_x(ix) + sp.freq_y(iy) * sp.freq_y(iy);
            l1h.at(ix, iy) = -xin2 * fh.at(ix, iy);
            l2h.at(ix, iy) = xin2 * xin2 * fh.at(ix, iy);
        }
    const ScalarField lap = inverse_transform(l1h);    // Delta f
    const ScalarField bilap = inverse_transform(l2h);  // Delta^2 f

    // beyond r_cut the periodic field keeps oscillating around its mean, so
    // the analytic remainder of the constant term acts on f(x) - mean(f)
    const double tail = ca * M_PI / alpha * std::pow(r_cut, -2.0 * alpha);
    const double f_mean = mean_value(f);

    std::vector<double> out(pts.size());
    parallel_for(pts.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t pi = lo; pi < hi; ++pi) {
            const auto [px, py] = pts[pi];
            const double fx = f.at(px, py);
            double acc = 0.0;
            for (const Offset& o : outer) {
                int jx = (px + o.ox) % s.nx, jy = (py + o.oy) % s.ny;
                if (jx < 0) jx += s.nx;
                if (jy < 0) jy += s.ny;
                acc += o.w * (fx - f.at(jx, jy));
            }
            out[pi] = ca * (acc - 0.5 * lap.at(px, py) * m2 - bilap.at(px, py) * m4 / 64.0) +
                      tail * (fx - f_mean);
        }
    });
    return out;
}

ScalarField fractional_laplacian_integral(const ScalarField& f, double alpha, double epsilon,
                                          double r_cut) {
    std::vector<std::pair<int, int>> pts;
    pts.reserve(std::size_t(f.spec.n()));
    for (int iy = 0; iy < f.spec.ny; ++iy)
        for (int ix = 0; ix < f.spec.nx; ++ix) pts.push_back({ix, iy});
    const auto vals = fractional_laplacian_integral_at(f, alpha, epsilon, pts, r_cut);
    ScalarField out(f.spec);
    out.samples = vals;
    return out;
}

// ---------------------------------------------------------------------------
// PV gradient identity

double pv_gradient_identity_check(const ScalarField& f,
                                  const std::vector<std::pair<int, int>>& pts_in) {
    f.check_valid();
    const GridSpec& s = f.spec;
    std::vector<std::pair<int, int>> pts = pts_in;
    if (pts.empty())
        for (int iy = 0; iy < s.ny; ++iy)
            for (int ix = 0; ix < s.nx; ++ix) pts.push_back({ix, iy});

    const double r_in = std::max(s.hx(), s.hy());
    const double r_out = 0.499 * std::min(s.lx, s.ly);
    auto left = annulus_pv_convolve_at(f, r_in, r_out, pts);

    VectorField gf = gradient(f);
    ScalarField gp1(s), gp2(s);  // grad_perp f = (-d2 f, d1 f)
    for (std::size_t i = 0; i < gp1.samples.size(); ++i) {
        gp1.samples[i] = -gf.y.samples[i];
        gp2.samples[i] = gf.x.samples[i];
    }
    // spectral Hessian for the second-moment refinement below
    ScalarField fxx(s), fxy(s), fyy(s);
    {
        SpectralField fh = forward_transform(f);
        SpectralField hxx(s), hxy(s), hyy(s);
        for (int iy = 0; iy < s.ny; ++iy)
            for (int ix = 0; ix < s.nx; ++ix) {
                if (ix == s.nx / 2 || iy == s.ny / 2) continue;  // keep symmetry
                const double x1 = s.freq_x(ix), x2 = s.freq_y(iy);
                const auto c = fh.at(ix, iy);
                hxx.at(ix, iy) = -x1 * x1 * c;
                hxy.at(ix, iy) = -x1 * x2 * c;
                hyy.at(ix, iy) = -x2 * x2 * c;
            }
        fxx = inverse_transform(hxx);
        fxy = inverse_transform(hxy);
        fyy = inverse_transform(hyy);
    }

    // Complete the annulus sum to the r -> 0 principal value and refine its
    // near field. Midpoint weights lose first-order accuracy where the kernel
    // varies across a cell, and for an odd kernel the first-moment errors of
    // +-c cells reinforce instead of cancel, an O(h |grad f|) defect. Replace
    // nearby cells with exact kernel integrals plus the first-moment term
    // against the sampled gradient; the origin cell keeps only its moment
    // (its kernel integral vanishes by parity).
    {
        const auto& g = cell_rule();
        const double hx = s.hx(), hy = s.hy();
        const int reach = 40;
        for (int oy = -reach; oy <= reach; ++oy)
            for (int ox = -reach; ox <= reach; ++ox) {
                const double cx = ox * hx, cy = oy * hy;
                const double d2 = cx * cx + cy * cy;
                if (d2 > reach * reach * r_in * r_in) continue;
                double k1 = 0.0, k2 = 0.0;
                double t11 = 0.0, t12 = 0.0, t21 = 0.0, t22 = 0.0;
                double s111 = 0.0, s112 = 0.0, s122 = 0.0;  // int K_1 (z-c)_j (z-c)_k
                double s211 = 0.0, s212 = 0.0, s222 = 0.0;
                auto accumulate = [&](double zx, double zy, double w) {
                    const double dx1 = zx - cx, dx2 = zy - cy;
                    k1 += w * -zy;
                    k2 += w * zx;
                    t11 += w * -zy * dx1;
                    t12 += w * -zy * dx2;
                    t21 += w * zx * dx1;
                    t22 += w * zx * dx2;
                    s111 += w * -zy * dx1 * dx1;
                    s112 += w * -zy * dx1 * dx2;
                    s122 += w * -zy * dx2 * dx2;
                    s211 += w * zx * dx1 * dx1;
                    s212 += w * zx * dx1 * dx2;
                    s222 += w * zx * dx2 * dx2;
                };
                if (ox == 0 && oy == 0) {
                    // polar panels: the kernel is odd so only the moments
                    // survive; integrand stays bounded toward the origin
                    const int nphi = 64, nrad = CellRule::n;
                    for (int k = 0; k < nphi; ++k)
                        for (int i = 0; i < CellRule::n; ++i) {
                            const double phi = (k + g.x[i]) * (2.0 * M_PI / nphi);
                            const double c = std::cos(phi), sn = std::sin(phi);
                            const double rho =
                                std::min(hx / 2.0 / std::max(std::abs(c), 1e-300),
                                         hy / 2.0 / std::max(std::abs(sn), 1e-300));
                            for (int q = 0; q < nrad; ++q) {
                                const double r = rho * g.x[q];
                                const double w = g.w[q] * rho * g.w[i] * (2.0 * M_PI / nphi) *
                                                 r / (kTwoPi * r * r * r);
                                accumulate(r * c, r * sn, w);
                            }
                        }
                    k1 = k2 = 0.0;  // exact by parity
                } else {
                    for (int i = 0; i < CellRule::n; ++i)
                        for (int j = 0; j < CellRule::n; ++j) {
                            const double zx = cx + (g.x[i] - 0.5) * hx;
                            const double zy = cy + (g.x[j] - 0.5) * hy;
                            const double w = g.w[i] * g.w[j] * hx * hy /
                                             (kTwoPi * std::pow(zx * zx + zy * zy, 1.5));
                            accumulate(zx, zy, w);
                        }
                    if (d2 > r_in * r_in * (1.0 + 1e-9)) {  // annulus predicate
                        const Vec2 mid = riesz_kernel({cx, cy});
                        k1 -= hx * hy * mid.x;
                        k2 -= hx * hy * mid.y;
                    }
                }
                for (std::size_t p = 0; p < pts.size(); ++p) {
                    // truncated-plane semantics: samples outside the box are zero
                    const int jx = pts[p].first - ox, jy = pts[p].second - oy;
                    if (jx < 0 || jx >= s.nx || jy < 0 || jy >= s.ny) continue;
                    const std::size_t j = std::size_t(jy) * s.nx + jx;
                    // f(x-z) ~ f(y) - grad f(y).(z-c) + (z-c)^T H(y) (z-c)/2
                    left[p].x += k1 * f.samples[j] -
                                 (t11 * gf.x.samples[j] + t12 * gf.y.samples[j]) +
                                 0.5 * (s111 * fxx.samples[j] + 2.0 * s112 * fxy.samples[j] +
                                        s122 * fyy.samples[j]);
                    left[p].y += k2 * f.samples[j] -
                                 (t21 * gf.x.samples[j] + t22 * gf.y.samples[j]) +
                                 0.5 * (s211 * fxx.samples[j] + 2.0 * s212 * fxy.samples[j] +
                                        s222 * fyy.samples[j]);
                }
            }
    }

    // right side: psi * grad_perp f with psi = -1/(2 pi |x|), truncated at the
    // same outer radius; the origin cell uses the exact integral of 1/|z|
    const double hx = s.hx(), hy = s.hy();
    // int over origin cell of 1/|z| dz, polar form over the rectangle
    double w0 = 0.0;
    {
        const auto& g = cell_rule();
        const int nphi = 64;
        for (int k = 0; k < nphi; ++k)
            for (int i = 0; i < CellRule::n; ++i) {
                const double phi = (k + g.x[i]) * (2.0 * M_PI / nphi);
                const double c = std::cos(phi), sn = std::sin(phi);
                const double rho = std::min(hx / 2.0 / std::max(std::abs(c), 1e-300),
                                            hy / 2.0 / std::max(std::abs(sn), 1e-300));
                w0 += g.w[i] * (2.0 * M_PI / nphi) * rho;
            }
    }
    const double cell = hx * hy;
    const double R2 = r_out * r_out;
    std::vector<Vec2> right(pts.size());
    parallel_for(pts.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t pi = lo; pi < hi; ++pi) {
            const auto [px, py] = pts[pi];
            const double x0 = s.x(px), y0 = s.y(py);
            double a1 = 0.0, a2 = 0.0;
            for (int iy = 0; iy < s.ny; ++iy) {
                const double dy = y0 - s.y(iy);
                if (dy * dy > R2) continue;
                for (int ix = 0; ix < s.nx; ++ix) {
                    const double dx = x0 - s.x(ix);
                    const double d2 = dx * dx + dy * dy;
                    if (d2 >= R2) continue;
                    const std::size_t j = std::size_t(iy) * s.nx + ix;
                    const double w =
                        d2 == 0.0 ? w0 : cell / std::sqrt(d2);
                    a1 += w * gp1.samples[j];
                    a2 += w * gp2.samples[j];
                }
            }
            right[pi] = {-a1 / kTwoPi, -a2 / kTwoPi};
        }
    });

    // near-field refinement of the psi route: exact cell integrals of 1/|z|
    // plus the first moment against the (spectral) gradient of grad_perp f
    {
        const auto& g = cell_rule();
        const int reach = 40;
        for (int oy = -reach; oy <= reach; ++oy)
            for (int ox = -reach; ox <= reach; ++ox) {
                const double cx = ox * hx, cy = oy * hy;
                const double d2 = cx * cx + cy * cy;
                if (d2 > reach * reach * std::max(hx, hy) * std::max(hx, hy)) continue;
                double w_exact = 0.0, m1 = 0.0, m2 = 0.0;
                if (ox == 0 && oy == 0) {
                    w_exact = w0;  // first moment vanishes by parity
                } else {
                    for (int i = 0; i < CellRule::n; ++i)
                        for (int j = 0; j < CellRule::n; ++j) {
                            const double zx = cx + (g.x[i] - 0.5) * hx;
                            const double zy = cy + (g.x[j] - 0.5) * hy;
                            const double w =
                                g.w[i] * g.w[j] * cell / std::sqrt(zx * zx + zy * zy);
                            w_exact += w;
                            m1 += w * (zx - cx);
                            m2 += w * (zy - cy);
                        }
                    w_exact -= cell / std::sqrt(d2);  // replace the midpoint weight
                }
                for (std::size_t p = 0; p < pts.size(); ++p) {
                    const int jx = pts[p].first - ox, jy = pts[p].second - oy;
                    if (jx < 0 || jx >= s.nx || jy < 0 || jy >= s.ny) continue;
                    const std::size_t j = std::size_t(jy) * s.nx + jx;
                    if (ox == 0 && oy == 0) continue;  // w0 already applied above
                    // gp(x - z) ~ gp(y) - grad gp(y) . (z - c)
                    right[p].x +=
                        (-1.0 / kTwoPi) *
                        (w_exact * gp1.samples[j] -
                         (m1 * -fxy.samples[j] + m2 * -fyy.samples[j]));
                    right[p].y += (-1.0 / kTwoPi) *
                                  (w_exact * gp2.samples[j] -
                                   (m1 * fxx.samples[j] + m2 * fxy.samples[j]));
                }
            }
    }

    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        worst = std::max({worst, std::abs(left[i].x - right[i].x),
                          std::abs(left[i].y - right[i].y)});
        scale = std::max({scale, std::abs(left[i].x), std::abs(left[i].y)});
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

}  // namespace sqg
