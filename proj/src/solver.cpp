#include "sqg/solver.hpp"

#include <algorithm>
#include <cmath>

namespace sqg {

void SolverConfig::validate() const {
    spec.validate();
    ensure(alpha > 0.5 && alpha <= 1.0, "SolverConfig: alpha in (1/2, 1]");
    ensure(nu > 0.0, "SolverConfig: nu > 0");
    ensure(n_time_nodes >= 8, "SolverConfig: n_time_nodes >= 8");
    ensure(picard_tol > 0.0, "SolverConfig: picard_tol > 0");
    ensure(max_picard_iters > 0, "SolverConfig: max_picard_iters > 0");
    ensure(kernel_constant_C > 0.0, "SolverConfig: kernel_constant_C > 0 (measure it)");
    ensure(safety > 0.0, "SolverConfig: safety > 0");
}

double grad_g_l1(double alpha, double nu, double t, int n, double domain) {
    GridSpec s{n, n, domain, domain};
    ScalarField delta(s);
    delta.at(0, 0) = 1.0 / (s.hx() * s.hy());
    OperatorContext ctx(alpha, nu, s);
    const VectorField g = grad_heat_semigroup(ctx, delta, t);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.x.samples.size(); ++i)
        acc += std::hypot(g.x.samples[i], g.y.samples[i]);
    return acc * s.hx() * s.hy();
}

double k_grad_g_tensor_l1(double alpha, double nu, double t, int n, double domain) {
    GridSpec s{n, n, domain, domain};
    ScalarField delta(s);
    delta.at(0, 0) = 1.0 / (s.hx() * s.hy());
    OperatorContext ctx(alpha, nu, s);
    SpectralField D = forward_transform(delta);
    // tensor rows K^j * d_i g: multiplier (-i rz_j)(i g_i) e^{-nu lam t}
    std::vector<const std::vector<double>*> rz = {&ctx.rzx, &ctx.rzy};
    std::vector<const std::vector<double>*> gr = {&ctx.gx, &ctx.gy};
    std::vector<ScalarField> comp;
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
            SpectralField T(s);
            for (std::size_t m = 0; m < T.coeff.size(); ++m)
                T.coeff[m] = D.coeff[m] * ((*rz[j])[m] * (*gr[i])[m]) *
                             std::exp(-nu * ctx.lam2a[m] * t);
            comp.push_back(inverse_transform(T));
        }
    double acc = 0.0;
    for (std::size_t m = 0; m < comp[0].samples.size(); ++m) {
        double fro = 0.0;
        for (const auto& c : comp) fro += c.samples[m] * c.samples[m];
        acc += std::sqrt(fro);
    }
    return acc * s.hx() * s.hy();
}

double measure_kernel_constant(double alpha, double nu, int n, double domain) {
    return std::max(grad_g_l1(alpha, nu, 1.0, n, domain),
                    k_grad_g_tensor_l1(alpha, nu, 1.0, n, domain));
}

double picard_interval_length(double theta0_linf, double u0_linf, const SolverConfig& cfg) {
    ensure(theta0_linf >= 0.0 && u0_linf >= 0.0, "picard_interval_length: norms >= 0");
    const double total = theta0_linf + u0_linf;
    if (total == 0.0)
        throw config_error("picard_interval_length: trivial data (both norms zero)");
    const double a = cfg.alpha;
    const double base = (2.0 * a - 1.0) / (16.0 * a * cfg.kernel_constant_C * total);
    return std::pow(base, 2.0 * a / (2.0 * a - 1.0)) * cfg.safety;
}

double gronwall_u_bound(double u0_linf, double theta_sup, double alpha, double C, double t) {
    ensure(u0_linf >= 0.0 && theta_sup >= 0.0 && t >= 0.0 && C > 0.0,
           "gronwall_u_bound: nonnegative inputs, C > 0");
    const double mu = 2.0 * alpha / (2.0 * alpha - 1.0);
    const double b0 = std::beta(1.0 / mu, 1.0);
    const double c_alpha = mu * C * std::pow(2.0 * alpha * b0, 1.0 / (2.0 * alpha - 1.0));
    return mu * u0_linf * std::exp(c_alpha * std::pow(theta_sup, mu) * t);
}

double continuation_first_tau(double theta0_linf, double u0_linf, const SolverConfig& cfg) {
    const double mu = 2.0 * cfg.alpha / (2.0 * cfg.alpha - 1.0);
    return picard_interval_length(theta0_linf, mu * u0_linf, cfg);
}

std::vector<DuhamelPanel> duhamel_panels(const std::vector<double>& nodes, int t_index,
                                         double gamma) {
    ensure(gamma > 0.0 && gamma < 1.0, "duhamel_panels: gamma in (0,1)");
    ensure(t_index >= 1 && std::size_t(t_index) < nodes.size(), "duhamel_panels: bad t_index");
    const double t = nodes[t_index];
    std::vector<DuhamelPanel> out;
    out.reserve(std::size_t(t_index));
    for (int m = 0; m < t_index; ++m) {
        const double sl = nodes[m], sr = nodes[m + 1];
        const double b = t - sl, a = t - sr;  // 0 <= a < b
        const double om = 1.0 - gamma;
        const double i0 = (std::pow(b, om) - std::pow(a, om)) / om;
        const double i1s = (std::pow(b, om + 1.0) - std::pow(a, om + 1.0)) / (om + 1.0);
        // i1s = int (t-s)^{-gamma} (t-s) ds, so int s w = t i0 - i1s
        const double delta = sr - sl;
        DuhamelPanel p;
        p.left_node = m;
        p.gap_star = i1s / i0;
        p.w_left = ((sr - t) * i0 + i1s) / delta;
        p.w_right = ((t - sl) * i0 - i1s) / delta;
        out.push_back(p);
    }
    return out;
}

namespace {

// right-clustered nodes on [t0, t0 + tau]
std::vector<double> chebyshev_nodes(double t0, double tau, int m) {
    std::vector<double> nodes(m);
    for (int i = 0; i < m; ++i)
        nodes[i] = t0 + tau * std::sin(M_PI * i / (2.0 * (m - 1)));
    nodes[m - 1] = t0 + tau;
    return nodes;
}

double sup_diff(const ScalarField& a, const ScalarField& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        worst = std::max(worst, std::abs(a.samples[i] - b.samples[i]));
    return worst;
}

double sup_diff(const VectorField& a, const VectorField& b) {
    return std::max(sup_diff(a.x, b.x), sup_diff(a.y, b.y));
}

// Spectral workspace for one interval: per-target accumulation tables
// W[k][j](xi) collecting gap_star^gamma * exp(-nu lam gap_star) times the
// panel hat weights, so that the Duhamel term at node k is
//   sum_j W[k][j](xi) * (i xi . F_hat_j)(xi)
// pushed through i (theta equation) or the Riesz multiplier (u equation).
struct IntervalTables {
    const OperatorContext& ctx;
    std::vector<double> nodes;
    std::vector<std::vector<std::vector<double>>> w;  // [k][j][xi]
    std::vector<std::vector<double>> semigroup;       // exp(-nu lam (t_k - t_0))

    IntervalTables(const OperatorContext& c, const std::vector<double>& nds, double gamma)
        : ctx(c), nodes(nds) {
        const std::size_t n = ctx.lam2a.size();
        const int m = int(nodes.size());
        w.resize(m);
        semigroup.resize(m);
        for (int k = 0; k < m; ++k) {
            semigroup[k].resize(n);
            const double gap = nodes[k] - nodes[0];
            for (std::size_t i = 0; i < n; ++i)
                semigroup[k][i] = std::exp(-ctx.nu * ctx.lam2a[i] * gap);
            if (k == 0) continue;
            w[k].assign(std::size_t(k) + 1, std::vector<double>(n, 0.0));
            for (const auto& p : duhamel_panels(nodes, k, gamma)) {
                const double fac = std::pow(p.gap_star, gamma);
                for (std::size_t i = 0; i < n; ++i) {
                    const double e = fac * std::exp(-ctx.nu * ctx.lam2a[i] * p.gap_star);
                    w[k][p.left_node][i] += p.w_left * e;
                    w[k][p.left_node + 1][i] += p.w_right * e;
                }
            }
        }
    }
};

// i xi . F_hat for the product field F = (theta u), dealiased.
SpectralField contraction_spectrum(const OperatorContext& ctx, const ScalarField& f1,
                                   const ScalarField& f2, bool dealias) {
    SpectralField a = forward_transform(f1);
    SpectralField b = forward_transform(f2);
    const GridSpec& s = ctx.spec;
    SpectralField p(s);
    const std::complex<double> imag(0, 1);
    for (int iy = 0; iy < s.ny; ++iy)
        for (int ix = 0; ix < s.nx; ++ix) {
            const std::size_t i = std::size_t(iy) * s.nx + ix;
            if (dealias && (std::abs(s.kx(ix)) > s.nx / 3 || std::abs(s.ky(iy)) > s.ny / 3))
                continue;
            p.coeff[i] = imag * (ctx.gx[i] * a.coeff[i] + ctx.gy[i] * b.coeff[i]);
        }
    return p;
}

ScalarField product(const ScalarField& a, const ScalarField& b) {
    ScalarField out = a;
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] *= b.samples[i];
    return out;
}

ScalarField product_sum(const ScalarField& a, const ScalarField& b, const ScalarField& c,
                        const ScalarField& d) {
    ScalarField out = a;
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] = a.samples[i] * b.samples[i] + c.samples[i] * d.samples[i];
    return out;
}

}  // namespace

TrajectorySegment solve_interval(const ScalarField& theta0, const VectorField& u0, double tau,
                                 const SolverConfig& cfg, double t_start) {
    cfg.validate();
    theta0.check_valid();
    ensure(theta0.spec == cfg.spec && u0.spec() == cfg.spec, "solve_interval: grid mismatch");
    ensure(tau > 0.0, "solve_interval: tau > 0");

    const int m = cfg.n_time_nodes;
    TrajectorySegment seg;
    seg.t_start = t_start;
    seg.tau = tau;
    seg.t_nodes = chebyshev_nodes(t_start, tau, m);

    const double th0 = field_norms(theta0).linf;
    const double u0n = linf_norm(u0);
    const double scale0 = th0 + u0n;
    if (scale0 > 0.0) {
        const double tau_max = picard_interval_length(th0, u0n, cfg);
        seg.size_condition_satisfied = tau <= tau_max * (1.0 + 1e-12);
    }

    OperatorContext ctx(cfg.alpha, cfg.nu, cfg.spec);
    IntervalTables tables(ctx, seg.t_nodes, cfg.gamma());
    const std::size_t n = ctx.lam2a.size();

    // free-evolution terms, kept spectral
    SpectralField th0_hat = forward_transform(theta0);
    SpectralField u0x_hat = forward_transform(u0.x);
    SpectralField u0y_hat = forward_transform(u0.y);
    std::vector<SpectralField> a_hat(m, SpectralField(cfg.spec));
    std::vector<SpectralField> bx_hat(m, SpectralField(cfg.spec)), by_hat(m, SpectralField(cfg.spec));
    for (int k = 0; k < m; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            a_hat[k].coeff[i] = tables.semigroup[k][i] * th0_hat.coeff[i];
            bx_hat[k].coeff[i] = tables.semigroup[k][i] * u0x_hat.coeff[i];
            by_hat[k].coeff[i] = tables.semigroup[k][i] * u0y_hat.coeff[i];
        }

    seg.theta_nodes.assign(m, theta0);
    seg.u_nodes.assign(m, u0);

    // degenerate data: the product term vanishes identically, pure diffusion
    if (th0 == 0.0 || u0n == 0.0) {
        for (int k = 0; k < m; ++k) {
            seg.theta_nodes[k] = inverse_transform(a_hat[k]);
            VectorField u(cfg.spec);
            u.x = inverse_transform(bx_hat[k]);
            u.y = inverse_transform(by_hat[k]);
            seg.u_nodes[k] = u;
        }
        return seg;
    }

    const double inner_tol = cfg.picard_tol / 10.0 * scale0;
    const double outer_tol = cfg.picard_tol * scale0;
    const std::complex<double> imag(0, 1);

    std::vector<SpectralField> p_hat(m, SpectralField(cfg.spec));
    auto refresh_products = [&](const std::vector<ScalarField>& th,
                                const std::vector<VectorField>& uu) {
        for (int j = 0; j < m; ++j)
            p_hat[j] = contraction_spectrum(ctx, product(th[j], uu[j].x),
                                            product(th[j], uu[j].y), cfg.dealias);
    };

    for (int outer = 0; outer < cfg.max_picard_iters; ++outer) {
        // inner fixed point: theta^{n+1} = T_{u^n} theta^{n+1}
        std::vector<ScalarField> theta_new = seg.theta_nodes;
        bool inner_ok = false;
        for (int inner = 0; inner < 400; ++inner) {
            refresh_products(theta_new, seg.u_nodes);
            double diff = 0.0;
            for (int k = 1; k < m; ++k) {
                SpectralField acc = a_hat[k];
                for (int j = 0; j <= k; ++j) {
                    const auto& wk = tables.w[k][j];
                    for (std::size_t i = 0; i < n; ++i) acc.coeff[i] -= wk[i] * p_hat[j].coeff[i];
                }
                ScalarField cand = inverse_transform(acc);
                diff = std::max(diff, sup_diff(cand, theta_new[k]));
                theta_new[k] = std::move(cand);
            }
            if (diff <= inner_tol) {
                inner_ok = true;
                break;
            }
        }
        if (!inner_ok)
            throw convergence_error("solve_interval: inner fixed point stalled", seg.outer_diffs);

        // outer velocity update u^{n+1} = U_{theta^{n+1}} u^n
        refresh_products(theta_new, seg.u_nodes);
        std::vector<VectorField> u_new = seg.u_nodes;
        for (int k = 1; k < m; ++k) {
            SpectralField ax = bx_hat[k], ay = by_hat[k];
            for (int j = 0; j <= k; ++j) {
                const auto& wk = tables.w[k][j];
                for (std::size_t i = 0; i < n; ++i) {
                    const auto c = wk[i] * p_hat[j].coeff[i];
                    ax.coeff[i] -= -imag * ctx.rzx[i] * c;
                    ay.coeff[i] -= -imag * ctx.rzy[i] * c;
                }
            }
            u_new[k].x = inverse_transform(ax);
            u_new[k].y = inverse_transform(ay);
        }

        double outer_diff = 0.0;
        for (int k = 0; k < m; ++k)
            outer_diff = std::max(outer_diff, sup_diff(theta_new[k], seg.theta_nodes[k]) +
                                                  sup_diff(u_new[k], seg.u_nodes[k]));
        seg.theta_nodes = std::move(theta_new);
        seg.u_nodes = std::move(u_new);
        seg.outer_diffs.push_back(outer_diff);
        if (outer_diff <= outer_tol) return seg;
    }
    throw convergence_error("solve_interval: no convergence within max_picard_iters",
                            seg.outer_diffs);
}

GlobalSolution solve_global(const ScalarField& theta0, const VectorField& u0, double T,
                            const SolverConfig& cfg) {
    cfg.validate();
    ensure(T > 0.0, "solve_global: T > 0");
    GlobalSolution out;
    const double th0 = field_norms(theta0).linf;
    const double u0n = linf_norm(u0);
    const double a = cfg.alpha;
    const double mu = 2.0 * a / (2.0 * a - 1.0);
    const double b0 = std::beta(1.0 / mu, 1.0);
    const double c_alpha =
        mu * cfg.kernel_constant_C * std::pow(2.0 * a * b0, 1.0 / (2.0 * a - 1.0));

    ScalarField theta = theta0;
    VectorField u = u0;
    double s_prev = 0.0;
    const int max_intervals = 4096;
    for (int n_int = 0; n_int < max_intervals && s_prev < T; ++n_int) {
        // size condition with the Gronwall-bounded velocity norm
        double tau;
        if (th0 + u0n == 0.0) {
            tau = T - s_prev;  // trivial data evolves trivially
        } else {
            const double grown_u = mu * u0n * std::exp(c_alpha * std::pow(th0, mu) * s_prev);
            const double base =
                (2.0 * a - 1.0) / (16.0 * a * cfg.kernel_constant_C * (th0 + grown_u));
            tau = std::pow(base, mu) * cfg.safety;
        }
        tau = std::min(tau, T - s_prev);
        TrajectorySegment seg;
        try {
            seg = solve_interval(theta, u, tau, cfg, s_prev);
        } catch (const convergence_error& e) {
            throw convergence_error("solve_global: interval " + std::to_string(n_int) +
                                        " at S=" + std::to_string(s_prev) + ": " + e.what(),
                                    e.history);
        }
        theta = seg.theta_nodes.back();
        u = seg.u_nodes.back();
        s_prev += tau;
        const double th_now = field_norms(theta).linf;
        if (th0 > 0.0 && th_now > (1.0 + 1e-6) * th0)
            throw error("solve_global: maximum-principle assertion failed at S=" +
                        std::to_string(s_prev) + " (" + std::to_string(th_now) + " > " +
                        std::to_string(th0) + "); discretization bug suspected");
        out.schedule.taus.push_back(tau);
        out.schedule.cum_times.push_back(s_prev);
        out.schedule.theta_linf.push_back(th_now);
        out.schedule.u_linf.push_back(linf_norm(u));
        out.segments.push_back(std::move(seg));
    }
    if (s_prev < T)
        throw convergence_error("solve_global: interval budget exhausted before T", {});
    return out;
}

DerivativeTrajectories derivative_propagation(const TrajectorySegment& seg,
                                              const SolverConfig& cfg) {
    cfg.validate();
    ensure(!seg.theta_nodes.empty(), "derivative_propagation: empty segment");
    const int m = int(seg.t_nodes.size());
    OperatorContext ctx(cfg.alpha, cfg.nu, cfg.spec);
    IntervalTables tables(ctx, seg.t_nodes, cfg.gamma());
    const std::size_t n = ctx.lam2a.size();
    const std::complex<double> imag(0, 1);

    DerivativeTrajectories out;
    const VectorField grad_th0 = gradient(seg.theta_nodes[0]);
    const VectorField grad_u0x = gradient(seg.u_nodes[0].x);
    const VectorField grad_u0y = gradient(seg.u_nodes[0].y);

    double scale0 = field_norms(seg.theta_nodes[0]).linf + linf_norm(seg.u_nodes[0]);
    scale0 = std::max(scale0, linf_norm(grad_th0) + linf_norm(grad_u0x) + linf_norm(grad_u0y));
    const double inner_tol = cfg.picard_tol / 10.0 * scale0;
    const double outer_tol = cfg.picard_tol * scale0;

    for (int dir = 0; dir < 2; ++dir) {
        const ScalarField& dth0 = dir == 0 ? grad_th0.x : grad_th0.y;
        ScalarField du0x = dir == 0 ? grad_u0x.x : grad_u0x.y;
        ScalarField du0y = dir == 0 ? grad_u0y.x : grad_u0y.y;

        std::vector<SpectralField> a_hat(m, SpectralField(cfg.spec));
        std::vector<SpectralField> bx_hat(m, SpectralField(cfg.spec)),
            by_hat(m, SpectralField(cfg.spec));
        {
            SpectralField d0 = forward_transform(dth0);
            SpectralField e0 = forward_transform(du0x);
            SpectralField f0 = forward_transform(du0y);
            for (int k = 0; k < m; ++k)
                for (std::size_t i = 0; i < n; ++i) {
                    a_hat[k].coeff[i] = tables.semigroup[k][i] * d0.coeff[i];
                    bx_hat[k].coeff[i] = tables.semigroup[k][i] * e0.coeff[i];
                    by_hat[k].coeff[i] = tables.semigroup[k][i] * f0.coeff[i];
                }
        }

        std::vector<ScalarField> thx(m, dth0);
        std::vector<VectorField> ux(m, VectorField(cfg.spec));
        for (int k = 0; k < m; ++k) {
            ux[k].x = du0x;
            ux[k].y = du0y;
        }

        std::vector<SpectralField> p_hat(m, SpectralField(cfg.spec));
        auto refresh = [&](const std::vector<ScalarField>& thx_cur,
                           const std::vector<VectorField>& ux_cur) {
            // V = theta * ux + thx * u, componentwise
            for (int j = 0; j < m; ++j) {
                ScalarField v1 = product_sum(seg.theta_nodes[j], ux_cur[j].x, thx_cur[j],
                                             seg.u_nodes[j].x);
                ScalarField v2 = product_sum(seg.theta_nodes[j], ux_cur[j].y, thx_cur[j],
                                             seg.u_nodes[j].y);
                p_hat[j] = contraction_spectrum(ctx, v1, v2, cfg.dealias);
            }
        };

        std::vector<double> diffs;
        for (int outer = 0; outer < cfg.max_picard_iters; ++outer) {
            std::vector<ScalarField> thx_new = thx;
            bool inner_ok = false;
            for (int inner = 0; inner < 400; ++inner) {
                refresh(thx_new, ux);
                double diff = 0.0;
                for (int k = 1; k < m; ++k) {
                    SpectralField acc = a_hat[k];
                    for (int j = 0; j <= k; ++j) {
                        const auto& wk = tables.w[k][j];
                        for (std::size_t i = 0; i < n; ++i)
                            acc.coeff[i] -= wk[i] * p_hat[j].coeff[i];
                    }
                    ScalarField cand = inverse_transform(acc);
                    diff = std::max(diff, sup_diff(cand, thx_new[k]));
                    thx_new[k] = std::move(cand);
                }
                if (diff <= inner_tol) {
                    inner_ok = true;
                    break;
                }
            }
            if (!inner_ok)
                throw convergence_error("derivative_propagation: inner fixed point stalled",
                                        diffs);

            refresh(thx_new, ux);
            std::vector<VectorField> ux_new = ux;
            for (int k = 1; k < m; ++k) {
                SpectralField ax = bx_hat[k], ay = by_hat[k];
                for (int j = 0; j <= k; ++j) {
                    const auto& wk = tables.w[k][j];
                    for (std::size_t i = 0; i < n; ++i) {
                        const auto c = wk[i] * p_hat[j].coeff[i];
                        ax.coeff[i] -= -imag * ctx.rzx[i] * c;
                        ay.coeff[i] -= -imag * ctx.rzy[i] * c;
                    }
                }
                ux_new[k].x = inverse_transform(ax);
                ux_new[k].y = inverse_transform(ay);
            }

            double outer_diff = 0.0;
            for (int k = 0; k < m; ++k)
                outer_diff = std::max(outer_diff, sup_diff(thx_new[k], thx[k]) +
                                                      sup_diff(ux_new[k], ux[k]));
            thx = std::move(thx_new);
            ux = std::move(ux_new);
            diffs.push_back(outer_diff);
            if (outer_diff <= outer_tol) break;
            if (outer == cfg.max_picard_iters - 1)
                throw convergence_error("derivative_propagation: no convergence", diffs);
        }
        for (double d : diffs) out.outer_diffs.push_back(d);
        if (dir == 0) {
            out.dtheta_x = std::move(thx);
            out.du_x = std::move(ux);
        } else {
            out.dtheta_y = std::move(thx);
            out.du_y = std::move(ux);
        }
    }
    return out;
}

}  // namespace sqg
