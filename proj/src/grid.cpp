#include "sqg/grid.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <set>

namespace sqg {

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; byte swapping not implemented");

void GridSpec::validate() const {
    ensure(nx >= 8 && ny >= 8, "GridSpec: nx, ny >= 8 required");
    ensure(nx % 2 == 0 && ny % 2 == 0, "GridSpec: nx, ny must be even");
    ensure(lx > 0.0 && ly > 0.0, "GridSpec: lx, ly > 0 required");
}

void ScalarField::check_valid() const {
    spec.validate();
    ensure(samples.size() == std::size_t(spec.n()), "ScalarField: sample count mismatch");
    for (double v : samples)
        if (!std::isfinite(v)) throw config_error("ScalarField: non-finite sample");
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& chunk_fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t nthreads = std::min<std::size_t>(hw, n == 0 ? 1 : n);
    if (nthreads <= 1 || n < 2) {
        chunk_fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t step = (n + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
        const std::size_t lo = t * step;
        const std::size_t hi = std::min(n, lo + step);
        if (lo >= hi) break;
        pool.emplace_back(chunk_fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

FieldNorms field_norms(const ScalarField& f) {
    f.check_valid();
    FieldNorms out;
    double sum_abs = 0.0, sum_sq = 0.0;
    for (double v : f.samples) {
        out.linf = std::max(out.linf, std::abs(v));
        sum_abs += std::abs(v);
        sum_sq += v * v;
    }
    const double cell = f.spec.hx() * f.spec.hy();
    out.l1 = cell * sum_abs;
    out.l2 = std::sqrt(cell * sum_sq);
    return out;
}

double linf_norm(const VectorField& u) {
    double worst = 0.0;
    for (std::size_t i = 0; i < u.x.samples.size(); ++i)
        worst = std::max(worst, std::hypot(u.x.samples[i], u.y.samples[i]));
    return worst;
}

std::vector<std::pair<int, int>> holder_stencil(const GridSpec& s, double max_radius) {
    // Fixed geometric magnitude ladder so a larger max_radius yields a
    // superset stencil (keeps the estimator monotone in max_radius).
    static const int ladder[] = {1,  2,  3,  4,   6,   8,   11,  16,  23,  32,
                                 45, 64, 91, 128, 181, 256, 362, 512, 724, 1024};
    const std::pair<int, int> dirs[] = {{1, 0}, {0, 1}, {1, 1},  {1, -1},
                                        {2, 1}, {1, 2}, {2, -1}, {-1, 2}};
    std::set<std::pair<int, int>> offsets;
    for (auto [dx, dy] : dirs) {
        for (int m : ladder) {
            const int ox = m * dx, oy = m * dy;
            const double len = std::hypot(ox * s.hx(), oy * s.hy());
            if (len <= max_radius && std::abs(ox) < s.nx && std::abs(oy) < s.ny)
                offsets.insert({ox, oy});
        }
    }
    return {offsets.begin(), offsets.end()};
}

double holder_seminorm(const ScalarField& f, double gamma, double max_radius) {
    f.check_valid();
    ensure(gamma > 0.0 && gamma < 1.0, "holder_seminorm: gamma in (0,1) required");
    ensure(max_radius <= std::min(f.spec.lx, f.spec.ly) / 4.0 + 1e-12,
           "holder_seminorm: max_radius <= min(lx,ly)/4 required");
    const GridSpec& s = f.spec;
    const auto offsets = holder_stencil(s, max_radius);
    double sup = 0.0;
    for (auto [ox, oy] : offsets) {
        const double len = std::hypot(ox * s.hx(), oy * s.hy());
        double diff = 0.0;
        for (int iy = 0; iy < s.ny; ++iy) {
            const int jy = ((iy + oy) % s.ny + s.ny) % s.ny;
            const double* row = &f.samples[std::size_t(iy) * s.nx];
            const double* row2 = &f.samples[std::size_t(jy) * s.nx];
            for (int ix = 0; ix < s.nx; ++ix) {
                int jx = ix + ox;
                jx -= s.nx * ((jx >= s.nx) - (jx < 0 ? 1 : 0));
                if (jx < 0) jx += s.nx;
                diff = std::max(diff, std::abs(row[ix] - row2[jx]));
            }
        }
        sup = std::max(sup, diff / std::pow(len, gamma));
    }
    return sup;
}

namespace {

constexpr char kMagic[4] = {'S', 'Q', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw format_error("field file truncated in header");
    return v;
}

}  // namespace

void write_field(const ScalarField& f, const std::filesystem::path& path) {
    f.check_valid();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    os.write(kMagic, 4);
    put(os, kVersion);
    put(os, std::uint32_t(f.spec.nx));
    put(os, std::uint32_t(f.spec.ny));
    put(os, f.spec.lx);
    put(os, f.spec.ly);
    os.write(reinterpret_cast<const char*>(f.samples.data()),
             std::streamsize(f.samples.size() * sizeof(double)));
    if (!os) throw io_error("write failed: " + path.string());
}

ScalarField read_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open for reading: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw format_error("bad magic in field file: " + path.string());
    const auto version = take<std::uint32_t>(is);
    if (version != kVersion)
        throw format_error("unsupported field file version " + std::to_string(version));
    GridSpec s;
    s.nx = int(take<std::uint32_t>(is));
    s.ny = int(take<std::uint32_t>(is));
    s.lx = take<double>(is);
    s.ly = take<double>(is);
    s.validate();
    ScalarField f(s);
    is.read(reinterpret_cast<char*>(f.samples.data()),
            std::streamsize(f.samples.size() * sizeof(double)));
    if (std::size_t(is.gcount()) != f.samples.size() * sizeof(double))
        throw format_error("field file payload length mismatch: " + path.string());
    f.check_valid();
    return f;
}

}  // namespace sqg
