#pragma once

// Deterministic text output: CSV with a leading "# config" line and
// round-trip formatted doubles, and small JSON helpers.

#include <complex>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace magflow {

using json = nlohmann::ordered_json;

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline json to_json(std::complex<double> z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

template <class T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const json& config, const std::vector<std::string>& columns) : out_(out) {
        out_ << "# config " << config.dump() << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
    }

    CsvWriter& cell(double x) { return raw(format_double(x)); }
    CsvWriter& cell(long long x) { return raw(std::to_string(x)); }
    CsvWriter& cell(int x) { return raw(std::to_string(x)); }
    CsvWriter& cell(const std::string& s) { return raw(s); }
    CsvWriter& empty() { return raw(""); }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }

private:
    CsvWriter& raw(const std::string& s) {
        if (!first_) out_ << ',';
        out_ << s;
        first_ = false;
        return *this;
    }

    std::ostream& out_;
    bool first_ = true;
};

}  // namespace magflow
