#include "uscr/data.hpp"
#include "uscr/errors.hpp"
#include "uscr/simd_kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace uscr {

std::string family_name(Family f) {
    switch (f) {
        case Family::Logistic: return "logistic";
        case Family::Poisson: return "poisson";
        case Family::Gamma: return "gamma";
        case Family::NegBin: return "negbin";
        case Family::Beta: return "beta";
        case Family::Weibull: return "weibull";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    for (Family f : kAllFamilies)
        if (family_name(f) == name) return f;
    throw ValidationError("unknown family '" + name + "'");
}

std::string response_kind_name(ResponseKind k) {
    switch (k) {
        case ResponseKind::Binary: return "binary";
        case ResponseKind::Count: return "count";
        case ResponseKind::UnitInterval: return "unit-interval";
        case ResponseKind::Positive: return "positive";
        case ResponseKind::Continuous: return "continuous";
    }
    return "?";
}

ResponseKind response_kind_from_name(const std::string& name) {
    for (ResponseKind k : {ResponseKind::Binary, ResponseKind::Count,
                           ResponseKind::UnitInterval, ResponseKind::Positive,
                           ResponseKind::Continuous})
        if (response_kind_name(k) == name) return k;
    throw ValidationError("unknown response kind '" + name + "'");
}

ResponseKind infer_response_kind(std::span<const double> values) {
    bool binary = true, count = true, unit = true, positive = true;
    for (double v : values) {
        if (v != 0.0 && v != 1.0) binary = false;
        if (v < 0.0 || v != std::floor(v)) count = false;
        if (v <= 0.0 || v >= 1.0) unit = false;
        if (v <= 0.0) positive = false;
    }
    if (binary) return ResponseKind::Binary;
    if (count) return ResponseKind::Count;
    if (unit) return ResponseKind::UnitInterval;
    if (positive) return ResponseKind::Positive;
    return ResponseKind::Continuous;
}

namespace {

bool kind_holds(std::span<const double> values, ResponseKind k) {
    switch (k) {
        case ResponseKind::Binary:
            return std::all_of(values.begin(), values.end(),
                               [](double v) { return v == 0.0 || v == 1.0; });
        case ResponseKind::Count:
            return std::all_of(values.begin(), values.end(), [](double v) {
                return v >= 0.0 && v == std::floor(v);
            });
        case ResponseKind::UnitInterval:
            return std::all_of(values.begin(), values.end(),
                               [](double v) { return v > 0.0 && v < 1.0; });
        case ResponseKind::Positive:
            return std::all_of(values.begin(), values.end(),
                               [](double v) { return v > 0.0; });
        case ResponseKind::Continuous:
            return true;
    }
    return false;
}

} // namespace

ResponseVector make_response(std::vector<double> values,
                             std::optional<ResponseKind> forced) {
    if (values.size() < 4)
        throw ValidationError("response needs at least 4 observations, got " +
                              std::to_string(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw ValidationError("response value at row " +
                                  std::to_string(i + 1) + " is not finite");
    ResponseKind kind;
    if (forced) {
        if (!kind_holds(values, *forced))
            throw ValidationError("response values do not satisfy forced kind " +
                                  response_kind_name(*forced));
        kind = *forced;
    } else {
        kind = infer_response_kind(values);
    }
    return ResponseVector{std::move(values), kind};
}

PredictorMatrix::PredictorMatrix(std::size_t n, std::size_t d,
                                 std::vector<double> values)
    : n_(n), d_(d), values_(std::move(values)) {
    if (n_ < 1 || d_ < 1)
        throw ValidationError("predictor matrix needs n >= 1 and d >= 1");
    if (values_.size() != n_ * d_)
        throw ValidationError("predictor matrix size mismatch: expected " +
                              std::to_string(n_ * d_) + " values, got " +
                              std::to_string(values_.size()));
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i]))
            throw ValidationError(
                "predictor value at row " + std::to_string(i % n_ + 1) +
                ", column " + std::to_string(i / n_ + 1) + " is not finite");
    names_.resize(d_);
    for (std::size_t j = 0; j < d_; ++j) names_[j] = "x" + std::to_string(j + 1);
    moments_.resize(d_);
    for (std::size_t j = 0; j < d_; ++j) {
        const auto s = simd::moment_sums(column(j));
        ColumnMoments m;
        m.sum = s.sum;
        m.sumsq = s.sumsq;
        m.mean = s.sum / double(n_);
        m.variance = n_ > 1
            ? (s.sumsq - s.sum * s.sum / double(n_)) / double(n_ - 1)
            : 0.0;
        moments_[j] = m;
    }
}

std::span<const double> PredictorMatrix::column(std::size_t j) const {
    if (j >= d_)
        throw std::out_of_range("predictor column " + std::to_string(j) +
                                " out of range (d = " + std::to_string(d_) + ")");
    return {values_.data() + j * n_, n_};
}

const ColumnMoments& PredictorMatrix::moments(std::size_t j) const {
    if (j >= d_)
        throw std::out_of_range("predictor column " + std::to_string(j) +
                                " out of range (d = " + std::to_string(d_) + ")");
    return moments_[j];
}

void PredictorMatrix::set_names(std::vector<std::string> names) {
    if (!names.empty() && names.size() != d_)
        throw ValidationError("predictor name count mismatch");
    names_ = std::move(names);
}

ResponseKind required_kind(Family family) {
    switch (family) {
        case Family::Logistic: return ResponseKind::Binary;
        case Family::Poisson:
        case Family::NegBin: return ResponseKind::Count;
        case Family::Beta: return ResponseKind::UnitInterval;
        case Family::Gamma:
        case Family::Weibull: return ResponseKind::Positive;
    }
    return ResponseKind::Continuous;
}

void validate_for_family(const ResponseVector& y, Family family) {
    const ResponseKind need = required_kind(family);
    if (y.kind != need)
        throw ValidationError("family " + family_name(family) + " needs a " +
                              response_kind_name(need) + " response, got " +
                              response_kind_name(y.kind));
}

namespace {

bool is_missing_token(std::string s) {
    for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s.empty() || s == "na" || s == "nan" || s == "null";
}

std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_cell(const std::string& raw, double& out) {
    const std::string s = strip(raw);
    if (s.empty()) return false;
    const char* p = s.c_str();
    char* end = nullptr;
    out = std::strtod(p, &end);
    return end == p + s.size() && std::isfinite(out);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, delim)) cells.push_back(cell);
    if (!line.empty() && line.back() == delim) cells.emplace_back();
    return cells;
}

} // namespace

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!strip(line).empty()) lines.push_back(line);
    }
    if (lines.empty()) throw ParseError("'" + path + "' is empty");

    const char delim = opts.delimiter != '\0'
        ? opts.delimiter
        : (lines[0].find('\t') != std::string::npos ? '\t' : ',');

    const auto first = split_line(lines[0], delim);
    const std::size_t ncols = first.size();
    if (ncols < 2)
        throw ParseError("'" + path + "' needs a response and at least one predictor column");

    bool header;
    if (opts.has_header) {
        header = *opts.has_header;
    } else {
        double v;
        header = std::any_of(first.begin(), first.end(), [&](const std::string& c) {
            return !is_missing_token(strip(c)) && !parse_cell(c, v);
        });
    }

    std::vector<std::string> col_names(ncols);
    if (header) {
        for (std::size_t j = 0; j < ncols; ++j) col_names[j] = strip(first[j]);
    } else {
        for (std::size_t j = 0; j < ncols; ++j)
            col_names[j] = "c" + std::to_string(j);
    }

    // Resolve the response column: a name when it matches a header cell,
    // otherwise a 0-based index.
    std::size_t ycol = ncols;
    const auto byname = std::find(col_names.begin(), col_names.end(), opts.response);
    if (header && byname != col_names.end()) {
        ycol = std::size_t(byname - col_names.begin());
    } else {
        char* end = nullptr;
        const long idx = std::strtol(opts.response.c_str(), &end, 10);
        if (end != opts.response.c_str() + opts.response.size() || idx < 0)
            throw ValidationError("response column '" + opts.response +
                                  "' not found" + (header ? "" : " (no header row)"));
        if (std::size_t(idx) >= ncols)
            throw ValidationError("response column index " + std::to_string(idx) +
                                  " out of range (file has " +
                                  std::to_string(ncols) + " columns)");
        ycol = std::size_t(idx);
    }

    const std::size_t data_start = header ? 1 : 0;
    const std::size_t n = lines.size() - data_start;
    if (n < 4)
        throw ValidationError("'" + path + "' has " + std::to_string(n) +
                              " data rows; need at least 4");

    const std::size_t d = ncols - 1;
    std::vector<double> yvals(n);
    std::vector<double> xvals(n * d);

    for (std::size_t r = 0; r < n; ++r) {
        const auto cells = split_line(lines[data_start + r], delim);
        const std::size_t human_row = data_start + r + 1;
        if (cells.size() != ncols)
            throw ParseError("row " + std::to_string(human_row) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(ncols));
        std::size_t xj = 0;
        for (std::size_t j = 0; j < ncols; ++j) {
            const std::string cell = strip(cells[j]);
            if (is_missing_token(cell))
                throw ParseError("missing value at row " +
                                 std::to_string(human_row) + ", column " +
                                 std::to_string(j + 1) + " (" + col_names[j] + ")");
            double v;
            if (!parse_cell(cell, v))
                throw ParseError("cannot parse '" + cell + "' at row " +
                                 std::to_string(human_row) + ", column " +
                                 std::to_string(j + 1) + " (" + col_names[j] + ")");
            if (j == ycol) {
                yvals[r] = v;
            } else {
                xvals[xj * n + r] = v;
                ++xj;
            }
        }
    }

    std::vector<std::string> xnames;
    xnames.reserve(d);
    for (std::size_t j = 0; j < ncols; ++j)
        if (j != ycol) xnames.push_back(col_names[j]);

    PredictorMatrix X(n, d, std::move(xvals));
    X.set_names(std::move(xnames));
    return Dataset{make_response(std::move(yvals), opts.forced_kind), std::move(X)};
}

void save_csv(const Dataset& ds, const std::string& path, char delimiter) {
    const std::size_t n = ds.predictors.rows();
    const std::size_t d = ds.predictors.cols();
    if (ds.response.values.size() != n)
        throw ValidationError("response/predictor row count mismatch");

    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");

    out << "y";
    const auto& names = ds.predictors.names();
    for (std::size_t j = 0; j < d; ++j)
        out << delimiter << (names.empty() ? "x" + std::to_string(j) : names[j]);
    out << "\n";

    char buf[32];
    for (std::size_t r = 0; r < n; ++r) {
        std::snprintf(buf, sizeof buf, "%.17g", ds.response.values[r]);
        out << buf;
        for (std::size_t j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.predictors.column(j)[r]);
            out << delimiter << buf;
        }
        out << "\n";
    }
    if (!out) throw DataError("write to '" + path + "' failed");
}

} // namespace uscr
