#include "sqg/hankel.hpp"

#include <quadmath.h>

#include <array>
#include <cmath>
#include <mutex>
#include <vector>

#include "sqg/common.hpp"

namespace sqg::detail {
namespace {

constexpr int kGL = 16;
constexpr double kTailLog = 46.0;  // exp(-46) ~ 1e-20 envelope cutoff

// Gauss-Legendre nodes/weights on [0,1], computed in __float128 by Newton
// iteration on the recurrence.
struct GaussRule {
    std::array<__float128, kGL> x{}, w{};
    GaussRule() {
        const __float128 one = 1;
        for (int i = 0; i < kGL; ++i) {
            // initial guess on [-1,1]
            __float128 z = cosq(M_PIq * (__float128)(i + 0.75) / (kGL + 0.5));
            for (int it = 0; it < 60; ++it) {
                __float128 p0 = 1, p1 = 0;
                for (int j = 0; j < kGL; ++j) {
                    __float128 p2 = p1;
                    p1 = p0;
                    p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
                }
                __float128 dp = kGL * (z * p0 - p1) / (z * z - one);
                __float128 dz = p0 / dp;
                z -= dz;
                if (fabsq(dz) < 1e-33q) break;
            }
            __float128 p0 = 1, p1 = 0;
            for (int j = 0; j < kGL; ++j) {
                __float128 p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
            }
            __float128 dp = kGL * (z * p0 - p1) / (z * z - one);
            x[i] = (one - z) / 2;  // map to [0,1], ascending
            w[i] = one / ((one - z * z) * dp * dp);
        }
    }
};

const GaussRule& gauss_rule() {
    static const GaussRule rule;
    return rule;
}

// One Gauss panel of the fixed u-ladder with cached J_m values.
struct Panel {
    double u0, u1;
    std::array<double, kGL> u, w, j;
    std::array<__float128, kGL> uq, wq, jq;
    bool has_q = false;
};

struct Ladder {
    int m;
    std::vector<Panel> panels;  // dyadic panels below pi, then [k*pi,(k+1)*pi]
    double umax = 0.0;
    std::mutex mutex;

    void grow(double target) {
        std::lock_guard<std::mutex> lock(mutex);
        if (panels.empty()) {
            // dyadic refinement of [0, pi] toward the origin
            std::vector<std::pair<double, double>> spans;
            double hi = M_PI;
            for (int k = 0; k < 48; ++k) {
                spans.push_back({hi / 2, hi});
                hi /= 2;
            }
            for (auto it = spans.rbegin(); it != spans.rend(); ++it) add_panel(it->first, it->second);
            umax = M_PI;
        }
        while (umax < target) {
            add_panel(umax, umax + M_PI);
            umax += M_PI;
        }
    }

    void fill_quad() {
        std::lock_guard<std::mutex> lock(mutex);
        for (auto& p : panels) {
            if (p.has_q) continue;
            for (int i = 0; i < kGL; ++i)
                p.jq[i] = m == 0 ? j0q(p.uq[i]) : j1q(p.uq[i]);
            p.has_q = true;
        }
    }

  private:
    void add_panel(double a, double b) {
        const auto& g = gauss_rule();
        Panel p;
        p.u0 = a;
        p.u1 = b;
        const __float128 aq = a, hq = (__float128)b - (__float128)a;
        for (int i = 0; i < kGL; ++i) {
            p.uq[i] = aq + hq * g.x[i];
            p.wq[i] = hq * g.w[i];
            p.u[i] = (double)p.uq[i];
            p.w[i] = (double)p.wq[i];
            p.j[i] = std::cyl_bessel_j(double(m), p.u[i]);
        }
        panels.push_back(p);
    }
};

Ladder& ladder_for(int m) {
    static Ladder l0{0, {}, 0.0, {}};
    static Ladder l1{1, {}, 0.0, {}};
    return m == 0 ? l0 : l1;
}

double tail_bound_estimate(double c, double a, int p, double s0) {
    // integrand beyond s0 is under exp(-c s^{2a}) s^p; linearize the exponent
    const double beta = 2.0 * a * c * std::pow(s0, 2.0 * a - 1.0);
    return std::exp(-c * std::pow(s0, 2.0 * a)) * std::pow(s0, double(p)) *
           (1.0 / beta + double(p) / (beta * beta * s0) + 1.0 / (beta * beta * beta));
}

// Non-oscillatory case (r*S0 below one period): integrate in s directly.
OscResult smooth_path(double c, double a, int m, int p, double r, double s0) {
    const auto& g = gauss_rule();
    double total = 0.0;
    auto add_span = [&](double lo, double hi) {
        for (int i = 0; i < kGL; ++i) {
            const double s = lo + (hi - lo) * double(g.x[i]);
            const double w = (hi - lo) * double(g.w[i]);
            const double jv = m == 0 ? (r == 0.0 ? 1.0 : std::cyl_bessel_j(0.0, s * r))
                                     : (r == 0.0 ? 0.0 : std::cyl_bessel_j(1.0, s * r));
            total += w * std::exp(-c * std::pow(s, 2.0 * a)) * jv * std::pow(s, double(p));
        }
    };
    const int n_panels = 48;
    const double h = s0 / n_panels;
    double lo = h;
    for (int k = 48; k > 0; --k) {  // dyadic refinement into the origin
        add_span(lo / 2, lo);
        lo /= 2;
    }
    for (int k = 1; k < n_panels; ++k) add_span(k * h, (k + 1) * h);
    OscResult out;
    out.value = total;
    out.cancellation = 1.0;
    out.tail_bound = tail_bound_estimate(c, a, p, s0);
    return out;
}

}  // namespace

double exp_power_moment(double c, double a, int p) {
    const double e = (p + 1.0) / (2.0 * a);
    return std::tgamma(e) / (2.0 * a * std::pow(c, e));
}

OscResult exp_bessel_integral(double c, double a, int m, int p, double r) {
    ensure(c > 0.0 && a >= 0.5 && a <= 1.0 && (m == 0 || m == 1) && p >= 1 && r >= 0.0,
           "exp_bessel_integral: bad arguments");
    const double s0 = std::pow(kTailLog / c, 1.0 / (2.0 * a));
    if (r * s0 < M_PI) return smooth_path(c, a, m, p, r, s0);

    // substitute u = s*r; J_m(u) values are cached on a fixed panel ladder
    Ladder& lad = ladder_for(m);
    const double utarget = s0 * r;
    if (lad.umax < utarget) lad.grow(utarget);

    const double inv_r = 1.0 / r;
    const double scale = std::pow(inv_r, double(p + 1));
    double total = 0.0, sum_abs = 0.0;
    std::size_t used = 0;
    {
        std::lock_guard<std::mutex> lock(lad.mutex);
        for (const Panel& pa : lad.panels) {
            if (pa.u0 >= utarget) break;
            double part = 0.0;
            for (int i = 0; i < kGL; ++i) {
                const double s = pa.u[i] * inv_r;
                part += pa.w[i] * pa.j[i] * std::exp(-c * std::pow(s, 2.0 * a)) *
                        std::pow(pa.u[i], double(p));
            }
            total += part;
            sum_abs += std::abs(part);
            ++used;
        }
    }
    OscResult out;
    out.value = total * scale;
    out.tail_bound = tail_bound_estimate(c, a, p, s0);
    out.cancellation = sum_abs / std::max(std::abs(total), 1e-300);

    // beyond ~3e7 the double path keeps fewer than 8-9 good digits
    if (out.cancellation > 3e7) {
        lad.fill_quad();
        const __float128 cq = c, aq2 = 2.0 * a, pq = p;
        __float128 totq = 0;
        std::lock_guard<std::mutex> lock(lad.mutex);
        for (const Panel& pa : lad.panels) {
            if (pa.u0 >= utarget) break;
            __float128 part = 0;
            for (int i = 0; i < kGL; ++i) {
                const __float128 s = pa.uq[i] / (__float128)r;
                part += pa.wq[i] * pa.jq[i] * expq(-cq * powq(s, aq2)) * powq(pa.uq[i], pq);
            }
            totq += part;
        }
        out.value = double(totq * powq((__float128)inv_r, (__float128)(p + 1)));
        out.used_quad = true;
    }
    (void)used;
    return out;
}

}  // namespace sqg::detail
