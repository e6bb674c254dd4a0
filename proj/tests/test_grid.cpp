#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "sqg/data_gen.hpp"
#include "sqg/grid.hpp"

using namespace sqg;

namespace {

GridSpec unit_grid(int n, double l) { return GridSpec{n, n, l, l}; }

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        worst = std::max(worst, std::abs(a.samples[i] - b.samples[i]));
    return worst;
}

}  // namespace

TEST_CASE("forward transform of a constant is a single zero mode") {
    auto f = ScalarField::from_function(unit_grid(16, 1.0), [](double, double) { return 3.25; });
    SpectralField F = forward_transform(f);
    CHECK(std::abs(F.at(0, 0) - 3.25) < 1e-14);
    double off = 0.0;
    for (int iy = 0; iy < 16; ++iy)
        for (int ix = 0; ix < 16; ++ix)
            if (ix || iy) off = std::max(off, std::abs(F.at(ix, iy)));
    CHECK(off < 1e-14);
}

TEST_CASE("cos mode splits into half coefficients at +-k") {
    GridSpec s = unit_grid(32, 2.0);
    auto f = ScalarField::from_function(s, [&](double x, double) {
        return std::cos(2.0 * M_PI * x / s.lx);
    });
    SpectralField F = forward_transform(f);
    CHECK(std::abs(F.at(1, 0) - 0.5) < 1e-13);
    CHECK(std::abs(F.at(31, 0) - 0.5) < 1e-13);
    CHECK(std::abs(F.at(2, 0)) < 1e-13);
}

TEST_CASE("Parseval with the lx*ly normalization") {
    GridSpec s{64, 64, 3.0, 2.0};
    ScalarField f = random_band_limited(s, 99);
    SpectralField F = forward_transform(f);
    double energy = 0.0;
    for (const auto& c : F.coeff) energy += std::norm(c);
    energy *= s.lx * s.ly;
    const double l2 = field_norms(f).l2;
    CHECK(std::abs(l2 * l2 - energy) <= 1e-10 * energy);
}

TEST_CASE("inverse transform basics and roundtrip") {
    GridSpec s = unit_grid(32, 2.0);
    SUBCASE("delta at zero gives the constant") {
        SpectralField F(s);
        F.at(0, 0) = 1.0;
        ScalarField f = inverse_transform(F);
        for (double v : f.samples) CHECK(std::abs(v - 1.0) < 1e-14);
    }
    SUBCASE("half coefficients reconstruct the cosine") {
        SpectralField F(s);
        F.at(1, 0) = 0.5;
        F.at(31, 0) = 0.5;
        ScalarField f = inverse_transform(F);
        auto want = ScalarField::from_function(
            s, [&](double x, double) { return std::cos(2.0 * M_PI * x / s.lx); });
        CHECK(max_abs_diff(f, want) < 1e-13);
    }
    SUBCASE("roundtrip error at the 1e-12 contract") {
        ScalarField f = random_band_limited(s, 5);
        ScalarField back = inverse_transform(forward_transform(f));
        CHECK(max_abs_diff(f, back) <= 1e-12 * field_norms(f).linf);
    }
    SUBCASE("non-Hermitian input is rejected") {
        SpectralField F(s);
        F.at(3, 5) = {1.0, 2.0};  // no conjugate partner
        CHECK_THROWS_AS((void)inverse_transform(F), format_error);
    }
}

TEST_CASE("field norms") {
    SUBCASE("constant 2 on the unit torus") {
        auto f = ScalarField::from_function(unit_grid(16, 1.0), [](double, double) { return 2.0; });
        FieldNorms n = field_norms(f);
        CHECK(n.linf == doctest::Approx(2.0));
        CHECK(n.l1 == doctest::Approx(2.0));
        CHECK(n.l2 == doctest::Approx(2.0));
    }
    SUBCASE("cosine L2 norm is 1/sqrt(2)") {
        GridSpec s = unit_grid(64, 1.0);
        auto f = ScalarField::from_function(
            s, [](double x, double) { return std::cos(2.0 * M_PI * x); });
        CHECK(field_norms(f).l2 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("discrete Gaussian kernel has unit L1 mass") {
        // closed form g_1(1,x) = exp(-r^2/4)/(4 pi); the lattice sum converges
        // to the integral exponentially fast (Poisson summation)
        GridSpec s = unit_grid(128, 40.0);
        auto f = ScalarField::from_function(s, [&](double x, double y) {
            const double dx = x - 20.0, dy = y - 20.0;
            return std::exp(-(dx * dx + dy * dy) / 4.0) / (4.0 * M_PI);
        });
        CHECK(std::abs(field_norms(f).l1 - 1.0) <= 1e-6);
    }
}

TEST_CASE("Holder seminorm estimator") {
    SUBCASE("constant field gives zero") {
        auto f = ScalarField::from_function(unit_grid(32, 1.0), [](double, double) { return 7.0; });
        CHECK(holder_seminorm(f, 0.5, 0.25) == 0.0);
    }
    SUBCASE("linear ramp lower bound") {
        GridSpec s = unit_grid(64, 1.0);
        auto f = ScalarField::from_function(s, [](double x, double) { return x; });
        const double max_r = 0.25;
        const double est = holder_seminorm(f, 0.5, max_r);
        CHECK(est >= std::sqrt(max_r) * (1.0 - s.hx() / max_r));
    }
    SUBCASE("within 5% of the all-pairs oracle on 32x32") {
        GridSpec s = unit_grid(32, 1.0);
        auto f = ScalarField::from_function(
            s, [](double x, double) { return std::cos(2.0 * M_PI * x); });
        const double gamma = 0.4, max_r = 0.25;
        double brute = 0.0;
        for (int ay = 0; ay < s.ny; ++ay)
            for (int ax = 0; ax < s.nx; ++ax)
                for (int by = 0; by < s.ny; ++by)
                    for (int bx = 0; bx < s.nx; ++bx) {
                        if (ax == bx && ay == by) continue;
                        double dx = std::abs(s.x(ax) - s.x(bx));
                        double dy = std::abs(s.y(ay) - s.y(by));
                        dx = std::min(dx, s.lx - dx);
                        dy = std::min(dy, s.ly - dy);
                        const double d = std::hypot(dx, dy);
                        if (d > max_r) continue;
                        brute = std::max(brute, std::abs(f.at(ax, ay) - f.at(bx, by)) /
                                                    std::pow(d, gamma));
                    }
        const double est = holder_seminorm(f, gamma, max_r);
        CHECK(est <= brute * (1.0 + 1e-12));
        CHECK(est >= 0.95 * brute);
    }
    SUBCASE("monotone in max_radius and homogeneous") {
        GridSpec s = unit_grid(32, 4.0);
        ScalarField f = random_band_limited(s, 17);
        double prev = 0.0;
        for (double r : {0.25, 0.5, 0.75, 1.0}) {
            const double v = holder_seminorm(f, 0.6, r);
            CHECK(v >= prev * (1.0 - 1e-14));
            prev = v;
        }
        ScalarField g = f;
        for (double& v : g.samples) v *= -2.5;
        CHECK(holder_seminorm(g, 0.6, 1.0) ==
              doctest::Approx(2.5 * holder_seminorm(f, 0.6, 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("field file roundtrip and error paths") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sqg_grid_test";
    fs::create_directories(dir);
    GridSpec s{16, 24, 2.5, 1.5};
    ScalarField f = random_band_limited(s, 3);
    const fs::path path = dir / "f.sqgf";
    write_field(f, path);
    auto slurp = [&] {
        std::ifstream is(path, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(is), {});
    };

    SUBCASE("payload roundtrips bit-exactly") {
        ScalarField g = read_field(path);
        CHECK(g.spec == f.spec);
        CHECK(std::memcmp(g.samples.data(), f.samples.data(),
                          f.samples.size() * sizeof(double)) == 0);
    }
    SUBCASE("corrupt magic is a format error") {
        std::string bytes = slurp();
        bytes[0] = 'X';
        const fs::path bad = dir / "bad_magic.sqgf";
        std::ofstream(bad, std::ios::binary).write(bytes.data(), std::streamsize(bytes.size()));
        CHECK_THROWS_AS((void)read_field(bad), format_error);
    }
    SUBCASE("truncated payload is a format error") {
        std::string bytes = slurp();
        bytes.resize(bytes.size() - 9);
        const fs::path bad = dir / "short.sqgf";
        std::ofstream(bad, std::ios::binary).write(bytes.data(), std::streamsize(bytes.size()));
        CHECK_THROWS_AS((void)read_field(bad), format_error);
    }
    SUBCASE("unknown version is a format error") {
        std::string bytes = slurp();
        bytes[4] = 9;
        const fs::path bad = dir / "version.sqgf";
        std::ofstream(bad, std::ios::binary).write(bytes.data(), std::streamsize(bytes.size()));
        CHECK_THROWS_AS((void)read_field(bad), format_error);
    }
    SUBCASE("missing file is an io error") {
        CHECK_THROWS_AS((void)read_field(dir / "nope.sqgf"), io_error);
    }
}

TEST_CASE("grid spec validation") {
    CHECK_THROWS_AS(GridSpec({6, 16, 1.0, 1.0}).validate(), config_error);
    CHECK_THROWS_AS(GridSpec({16, 15, 1.0, 1.0}).validate(), config_error);
    CHECK_THROWS_AS(GridSpec({16, 16, 0.0, 1.0}).validate(), config_error);
}
