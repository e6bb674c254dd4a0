// FFTW-backed transforms with a mutex-guarded plan cache. Plans are created
// with FFTW_ESTIMATE on aligned scratch buffers and reused through
// fftw_execute_dft on per-call buffers of the same shape.
#include <fftw3.h>

#include <map>
#include <mutex>

#include "sqg/grid.hpp"

namespace sqg {
namespace {

struct PlanKey {
    int nx, ny, sign;
    bool operator<(const PlanKey& o) const {
        return std::tie(nx, ny, sign) < std::tie(o.nx, o.ny, o.sign);
    }
};

std::mutex g_planner_mutex;
std::map<PlanKey, fftw_plan> g_plans;

fftw_plan plan_for(int nx, int ny, int sign) {
    std::lock_guard<std::mutex> lock(g_planner_mutex);
    PlanKey key{nx, ny, sign};
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;
    fftw_complex* scratch = fftw_alloc_complex(std::size_t(nx) * ny);
    // Row-major: FFTW wants the slow dimension first, ours is y.
    fftw_plan p = fftw_plan_dft_2d(ny, nx, scratch, scratch, sign, FFTW_ESTIMATE);
    fftw_free(scratch);
    g_plans.emplace(key, p);
    return p;
}

struct AlignedBuffer {
    fftw_complex* ptr;
    explicit AlignedBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {}
    ~AlignedBuffer() { fftw_free(ptr); }
    AlignedBuffer(const AlignedBuffer&) = delete;
    AlignedBuffer& operator=(const AlignedBuffer&) = delete;
};

}  // namespace

SpectralField forward_transform(const ScalarField& f) {
    f.check_valid();
    const GridSpec& s = f.spec;
    const std::size_t n = std::size_t(s.n());
    AlignedBuffer buf(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf.ptr[i][0] = f.samples[i];
        buf.ptr[i][1] = 0.0;
    }
    fftw_execute_dft(plan_for(s.nx, s.ny, FFTW_FORWARD), buf.ptr, buf.ptr);
    SpectralField out(s);
    const double scale = 1.0 / double(n);
    for (std::size_t i = 0; i < n; ++i)
        out.coeff[i] = {buf.ptr[i][0] * scale, buf.ptr[i][1] * scale};
    return out;
}

ScalarField inverse_transform(const SpectralField& F) {
    const GridSpec& s = F.spec;
    s.validate();
    const double defect = F.hermitian_defect();
    double scale = 0.0;
    for (const auto& c : F.coeff) scale = std::max(scale, std::abs(c));
    if (defect > 1e-7 * std::max(scale, 1e-300))
        throw format_error("inverse_transform: input is not Hermitian-symmetric");
    const std::size_t n = std::size_t(s.n());
    AlignedBuffer buf(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf.ptr[i][0] = F.coeff[i].real();
        buf.ptr[i][1] = F.coeff[i].imag();
    }
    fftw_execute_dft(plan_for(s.nx, s.ny, FFTW_BACKWARD), buf.ptr, buf.ptr);
    ScalarField out(s);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = buf.ptr[i][0];
    return out;
}

double SpectralField::hermitian_defect() const {
    double worst = 0.0;
    for (int iy = 0; iy < spec.ny; ++iy) {
        const int jy = iy == 0 ? 0 : spec.ny - iy;
        for (int ix = 0; ix < spec.nx; ++ix) {
            const int jx = ix == 0 ? 0 : spec.nx - ix;
            const auto d = at(ix, iy) - std::conj(at(jx, jy));
            worst = std::max(worst, std::abs(d));
        }
    }
    return worst;
}

}  // namespace sqg
