// Periodic grid fields, spectral transforms, norms, Hölder seminorm
// estimation, and the binary field-file format.
#pragma once

#include <complex>
#include <filesystem>
#include <vector>

#include "sqg/common.hpp"

namespace sqg {

struct GridSpec {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;

    void validate() const;
    int n() const { return nx * ny; }
    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    // Sample coordinates; the grid covers [0,lx) x [0,ly).
    double x(int ix) const { return ix * hx(); }
    double y(int iy) const { return iy * hy(); }
    // Signed integer wavenumber for storage index along each axis.
    int kx(int ix) const { return ix <= nx / 2 ? ix : ix - nx; }
    int ky(int iy) const { return iy <= ny / 2 ? iy : iy - ny; }
    // Physical frequency xi = 2*pi*k/L.
    double freq_x(int ix) const { return 2.0 * M_PI * kx(ix) / lx; }
    double freq_y(int iy) const { return 2.0 * M_PI * ky(iy) / ly; }
    bool operator==(const GridSpec&) const = default;
};

// Row-major samples, y-major rows with x fastest: samples[iy*nx + ix].
struct ScalarField {
    GridSpec spec;
    std::vector<double> samples;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& s) : spec(s), samples(s.n(), 0.0) { s.validate(); }

    double& at(int ix, int iy) { return samples[std::size_t(iy) * spec.nx + ix]; }
    double at(int ix, int iy) const { return samples[std::size_t(iy) * spec.nx + ix]; }

    template <class F>
    static ScalarField from_function(const GridSpec& s, F&& f) {
        ScalarField out(s);
        for (int iy = 0; iy < s.ny; ++iy)
            for (int ix = 0; ix < s.nx; ++ix) out.at(ix, iy) = f(s.x(ix), s.y(iy));
        return out;
    }
    void check_valid() const;
};

struct VectorField {
    ScalarField x;
    ScalarField y;

    VectorField() = default;
    explicit VectorField(const GridSpec& s) : x(s), y(s) {}
    const GridSpec& spec() const { return x.spec; }
};

// Complex coefficients indexed like samples; entry (ix,iy) carries integer
// wavevector (kx(ix), ky(iy)). Hermitian symmetry <=> real field.
struct SpectralField {
    GridSpec spec;
    std::vector<std::complex<double>> coeff;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& s) : spec(s), coeff(s.n(), {0.0, 0.0}) {}

    std::complex<double>& at(int ix, int iy) { return coeff[std::size_t(iy) * spec.nx + ix]; }
    std::complex<double> at(int ix, int iy) const { return coeff[std::size_t(iy) * spec.nx + ix]; }
    double hermitian_defect() const;  // max |F(k) - conj(F(-k))|
};

// Coefficient convention: F(k) = (1/(nx*ny)) * sum_j f_j exp(-i xi_k . x_j),
// so a constant c maps to coefficient c at k = 0.
SpectralField forward_transform(const ScalarField& f);

// Throws format_error when the input is not Hermitian-symmetric.
ScalarField inverse_transform(const SpectralField& F);

struct FieldNorms {
    double linf = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
};
FieldNorms field_norms(const ScalarField& f);
double linf_norm(const VectorField& u);  // max over points of |(u1,u2)|

// Hölder quotient sup over a fixed offset stencil (axis, diagonal and a
// log-spaced radial ladder), offsets capped at max_radius.
double holder_seminorm(const ScalarField& f, double gamma, double max_radius);

// Offsets the estimator uses; exposed so tests can compare stencil vs all-pairs.
std::vector<std::pair<int, int>> holder_stencil(const GridSpec& s, double max_radius);

// Binary format: "SQGF", u32 version=1, u32 nx, u32 ny, f64 lx, f64 ly,
// then nx*ny little-endian f64 samples row-major.
void write_field(const ScalarField& f, const std::filesystem::path& path);
ScalarField read_field(const std::filesystem::path& path);

}  // namespace sqg
