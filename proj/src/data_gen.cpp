#include "sqg/data_gen.hpp"

#include <cmath>

#include "sqg/kernels.hpp"
#include "sqg/operators.hpp"

namespace sqg {
namespace {

// splitmix64; the uniform/normal draws are hand-rolled so byte-identical
// reruns do not depend on library distribution internals.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double normal() {
        double u1 = uniform(), u2 = uniform();
        while (u1 == 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

// C-infinity bump supported on |x| < radius, amplitude 1 at the center.
double bump_value(double r, double radius) {
    const double s = r / radius;
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double min_image(double d, double l) {
    while (d > l / 2) d -= l;
    while (d < -l / 2) d += l;
    return d;
}

}  // namespace

DataKind parse_data_kind(const std::string& name) {
    if (name == "mode") return DataKind::Mode;
    if (name == "bumps") return DataKind::Bumps;
    if (name == "psi") return DataKind::Psi;
    if (name == "random") return DataKind::Random;
    throw config_error("unknown data kind: " + name);
}

const char* data_kind_name(DataKind k) {
    switch (k) {
        case DataKind::Mode: return "mode";
        case DataKind::Bumps: return "bumps";
        case DataKind::Psi: return "psi";
        case DataKind::Random: return "random";
    }
    return "?";
}

ScalarField centered_bump(const GridSpec& spec, double radius) {
    const double cx = spec.lx / 2, cy = spec.ly / 2;
    return ScalarField::from_function(spec, [&](double x, double y) {
        const double r = std::hypot(min_image(x - cx, spec.lx), min_image(y - cy, spec.ly));
        return bump_value(r, radius);
    });
}

ScalarField sparse_bump_lattice(const GridSpec& spec, double bump_radius, bool alternate_signs,
                                double extent_frac) {
    if (bump_radius <= 0.0) bump_radius = std::min(spec.lx, spec.ly) / 24.0;
    const double cx = spec.lx / 2, cy = spec.ly / 2;
    // dyadic positions +-2^i relative to the center, scaled so the widest
    // ring keeps a margin from the boundary (the truncated-plane convolution
    // checks are edge-sensitive)
    std::vector<double> pos;
    const double extent = extent_frac * std::min(spec.lx, spec.ly);
    for (double p = extent; p > bump_radius * 2.0; p /= 2.0) {
        pos.push_back(p);
        pos.push_back(-p);
    }
    ScalarField f(spec);
    int parity = 0;
    for (double px : pos)
        for (double py : pos) {
            const double sign = alternate_signs ? (parity++ % 2 ? -1.0 : 1.0) : 1.0;
            for (int iy = 0; iy < spec.ny; ++iy)
                for (int ix = 0; ix < spec.nx; ++ix) {
                    const double dx = min_image(spec.x(ix) - (cx + px), spec.lx);
                    const double dy = min_image(spec.y(iy) - (cy + py), spec.ly);
                    f.at(ix, iy) += sign * bump_value(std::hypot(dx, dy), bump_radius);
                }
        }
    return f;
}

ScalarField random_band_limited(const GridSpec& spec, std::uint64_t seed, int k_min, int k_max) {
    if (k_max <= 0) k_max = std::min(spec.nx, spec.ny) / 6;
    ensure(k_min >= 1 && k_max >= k_min, "random_band_limited: bad band");
    Rng rng(seed);
    SpectralField F(spec);
    // fill independent half-spectrum draws, then mirror for Hermitian symmetry
    for (int iy = 0; iy < spec.ny; ++iy)
        for (int ix = 0; ix < spec.nx; ++ix) {
            const int k1 = spec.kx(ix), k2 = spec.ky(iy);
            const double kn = std::hypot(double(k1), double(k2));
            if (kn < k_min || kn > k_max) continue;
            if (k2 < 0 || (k2 == 0 && k1 <= 0)) continue;
            const double amp = std::exp(-0.5 * kn * kn / double(k_max * k_max));
            const std::complex<double> c(rng.normal() * amp, rng.normal() * amp);
            F.at(ix, iy) = c;
            const int jx = ix == 0 ? 0 : spec.nx - ix;
            const int jy = iy == 0 ? 0 : spec.ny - iy;
            F.at(jx, jy) = std::conj(c);
        }
    ScalarField f = inverse_transform(F);
    const double sup = field_norms(f).linf;
    if (sup > 0.0)
        for (double& v : f.samples) v /= sup;
    return f;
}

std::pair<ScalarField, VectorField> generate_data(DataKind kind, const GridSpec& spec,
                                                  std::uint64_t seed) {
    spec.validate();
    switch (kind) {
        case DataKind::Mode: {
            ScalarField theta = ScalarField::from_function(
                spec, [&](double x, double) { return std::cos(2.0 * M_PI * x / spec.lx); });
            return {theta, riesz_velocity(theta)};
        }
        case DataKind::Psi: {
            const ScalarField psi = centered_bump(spec, 0.4 * std::min(spec.lx, spec.ly));
            // theta = Lambda psi, u = -grad_perp psi = riesz_velocity(theta)
            const ScalarField theta = fractional_laplacian_spectral(psi, 0.5);
            return {theta, riesz_velocity(theta)};
        }
        case DataKind::Random: {
            ScalarField theta = random_band_limited(spec, seed);
            return {theta, riesz_velocity(theta)};
        }
        case DataKind::Bumps: {
            ScalarField theta = sparse_bump_lattice(spec);
            const double r_in = std::max(spec.hx(), spec.hy());
            const double r_out = 0.499 * std::min(spec.lx, spec.ly);
            return {theta, annulus_pv_convolve(theta, r_in, r_out)};
        }
    }
    throw config_error("generate_data: bad kind");
}

}  // namespace sqg
