// Shared error types and small utilities.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sqg {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad parameters or malformed configuration.
struct config_error : error {
    using error::error;
};

// Filesystem-level failures.
struct io_error : error {
    using error::error;
};

// On-disk payload is readable but not a valid field file.
struct format_error : error {
    using error::error;
};

// Iteration failed to reach tolerance; carries the recorded difference history.
struct convergence_error : error {
    std::vector<double> history;
    convergence_error(const std::string& msg, std::vector<double> hist)
        : error(msg), history(std::move(hist)) {}
};

inline void ensure(bool ok, const std::string& msg) {
    if (!ok) throw config_error(msg);
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Static chunking over [0, n); pool sized for this machine.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& chunk_fn);

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    ensure(x.size() == y.size() && x.size() >= 2, "fit_slope: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// FNV-1a, used to stamp artifacts with their manifest identity.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace sqg
