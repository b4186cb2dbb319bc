#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tvme {

/// Dated price-index levels. Dates are opaque sortable labels (YYYY:MM or any
/// zero-padded scheme that orders lexicographically); no date arithmetic is
/// ever performed on them.
struct PriceSeries {
    std::vector<std::string> dates;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Dated log returns.
struct ReturnSeries {
    std::vector<std::string> dates;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

struct DescriptiveStats {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation, n-1 denominator
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;
};

enum class ValueKind { Prices, Returns };

/// Names of the date and value columns in an input CSV.
struct ColumnSpec {
    std::string date_col = "date";
    std::string value_col = "value";
};

namespace detail {

inline std::string trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

struct RawSeries {
    std::vector<std::string> dates;
    std::vector<double> values;
};

/// Shared CSV reader. Row numbers in error messages are 1-based file line
/// numbers (the header is line 1).
inline RawSeries load_series_csv(const std::string& path, const ColumnSpec& cols,
                                 ValueKind kind) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty file: " + path);
    }
    const auto header = split_csv_line(line);
    auto find_col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw std::runtime_error("column '" + name + "' not found in " + path);
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t date_idx = find_col(cols.date_col);
    const std::size_t value_idx = find_col(cols.value_col);

    RawSeries out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;  // tolerate trailing blank lines
        const auto fields = split_csv_line(line);
        if (fields.size() <= std::max(date_idx, value_idx)) {
            throw std::runtime_error("parse failure at row " + std::to_string(lineno) +
                                     ": too few fields");
        }
        const std::string& date = fields[date_idx];
        const std::string& value = fields[value_idx];
        if (date.empty() || value.empty()) {
            throw std::runtime_error("missing value at row " + std::to_string(lineno));
        }
        double v;
        if (!parse_double(value, v)) {
            throw std::runtime_error("parse failure at row " + std::to_string(lineno) +
                                     ": '" + value + "' is not numeric");
        }
        if (kind == ValueKind::Prices && v <= 0.0) {
            throw std::runtime_error("non-positive price at row " + std::to_string(lineno));
        }
        if (!out.dates.empty() && date <= out.dates.back()) {
            throw std::runtime_error("non-monotone dates at row " + std::to_string(lineno) +
                                     ": '" + date + "' after '" + out.dates.back() + "'");
        }
        out.dates.push_back(date);
        out.values.push_back(v);
    }
    if (out.values.empty()) {
        throw std::runtime_error("no data rows in " + path);
    }
    return out;
}

}  // namespace detail

inline PriceSeries load_price_csv(const std::string& path, const ColumnSpec& cols = {}) {
    auto raw = detail::load_series_csv(path, cols, ValueKind::Prices);
    if (raw.values.size() < 2) {
        throw std::runtime_error("series too short: need at least 2 prices");
    }
    return PriceSeries{std::move(raw.dates), std::move(raw.values)};
}

inline ReturnSeries load_return_csv(const std::string& path, const ColumnSpec& cols = {}) {
    auto raw = detail::load_series_csv(path, cols, ValueKind::Returns);
    return ReturnSeries{std::move(raw.dates), std::move(raw.values)};
}

/// Log first differences: values[t] = ln p[t+1] - ln p[t]. The resulting
/// series is dated by the later period of each pair.
inline ReturnSeries to_log_returns(const PriceSeries& p) {
    if (p.size() < 2) {
        throw std::invalid_argument("series too short: need at least 2 prices");
    }
    ReturnSeries r;
    r.dates.assign(p.dates.begin() + 1, p.dates.end());
    r.values.resize(p.size() - 1);
    for (std::size_t t = 0; t + 1 < p.size(); ++t) {
        r.values[t] = std::log(p.values[t + 1]) - std::log(p.values[t]);
    }
    return r;
}

inline DescriptiveStats describe(const ReturnSeries& r) {
    const std::size_t n = r.size();
    if (n < 2) {
        throw std::invalid_argument("series too short: need at least 2 observations");
    }
    DescriptiveStats s;
    s.n = n;
    s.mean = std::accumulate(r.values.begin(), r.values.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : r.values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(n - 1));
    auto [mn, mx] = std::minmax_element(r.values.begin(), r.values.end());
    s.min = *mn;
    s.max = *mx;
    return s;
}

}  // namespace tvme
