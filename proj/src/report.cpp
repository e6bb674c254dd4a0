#include "sqg/report.hpp"

#include <cmath>
#include <fstream>

#include "sqg/common.hpp"

namespace sqg {

namespace {

bool evaluate(double measured, double target, double tol, TolMode mode) {
    switch (mode) {
        case TolMode::Abs:
            return std::abs(measured - target) <= tol;
        case TolMode::Rel:
            return std::abs(measured - target) <= tol * std::abs(target);
        case TolMode::UpperBound:
            return measured <= target + tol;
        case TolMode::LowerBound:
            return measured >= target - tol;
        case TolMode::Info:
            return true;
    }
    return false;
}

}  // namespace

const char* tol_mode_name(TolMode m) {
    switch (m) {
        case TolMode::Abs: return "abs";
        case TolMode::Rel: return "rel";
        case TolMode::UpperBound: return "upper";
        case TolMode::LowerBound: return "lower";
        case TolMode::Info: return "info";
    }
    return "?";
}

CheckRow& DiagnosticsReport::add(const std::string& name, double measured, double target,
                                 double tolerance, TolMode mode) {
    CheckRow row;
    row.name = name;
    row.measured = measured;
    row.target = target;
    row.tolerance = tolerance;
    row.mode = mode;
    row.pass = evaluate(measured, target, tolerance, mode);
    rows.push_back(std::move(row));
    return rows.back();
}

void DiagnosticsReport::merge(const DiagnosticsReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

bool DiagnosticsReport::all_pass() const {
    for (const auto& r : rows)
        if (r.mode != TolMode::Info && !r.pass) return false;
    return true;
}

void DiagnosticsReport::write_csv(const std::filesystem::path& path,
                                  const std::string& manifest_hash) const {
    std::ofstream os(path);
    if (!os) throw io_error("cannot write report: " + path.string());
    if (!manifest_hash.empty()) os << "# manifest=" << manifest_hash << "\n";
    os << "check_name,measured_value,target,tolerance,mode,pass,metadata\n";
    os.precision(15);
    for (const auto& r : rows) {
        os << r.name << ',' << r.measured << ',' << r.target << ',' << r.tolerance << ','
           << tol_mode_name(r.mode) << ',' << (r.pass ? "1" : "0") << ',';
        bool first = true;
        for (const auto& [k, v] : r.metadata) {
            if (!first) os << ';';
            os << k << '=' << v;
            first = false;
        }
        os << '\n';
    }
    if (!os) throw io_error("write failed: " + path.string());
}

}  // namespace sqg
