// Named scalar metrics with machine-checkable pass semantics.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sqg {

enum class TolMode {
    Abs,         // |measured - target| <= tolerance
    Rel,         // |measured - target| <= tolerance * |target|
    UpperBound,  // measured <= target + tolerance
    LowerBound,  // measured >= target - tolerance
    Info,        // non-gating
};

struct CheckRow {
    std::string name;
    double measured = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    TolMode mode = TolMode::Abs;
    bool pass = true;
    std::map<std::string, std::string> metadata;
};

struct DiagnosticsReport {
    std::vector<CheckRow> rows;

    CheckRow& add(const std::string& name, double measured, double target, double tolerance,
                  TolMode mode);
    void merge(const DiagnosticsReport& other);
    bool all_pass() const;  // Info rows do not gate
    void write_csv(const std::filesystem::path& path, const std::string& manifest_hash) const;
};

const char* tol_mode_name(TolMode m);

}  // namespace sqg
