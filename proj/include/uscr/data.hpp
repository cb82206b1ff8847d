#pragma once

#include "uscr/family.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uscr {

// Most specific description of a response column.  Inference tries these in
// order, so a column of zeros and ones is Binary even though it is also a
// valid Count or Continuous column.
enum class ResponseKind { Binary, Count, UnitInterval, Positive, Continuous };

std::string response_kind_name(ResponseKind k);
ResponseKind response_kind_from_name(const std::string& name);

// Classifies values (all finite, n >= 1) by the precedence above.
ResponseKind infer_response_kind(std::span<const double> values);

struct ResponseVector {
    std::vector<double> values;
    ResponseKind kind;
};

// Validates (finite values, n >= 4) and infers the kind unless one is forced.
// A forced kind must itself hold for the values.
ResponseVector make_response(std::vector<double> values,
                             std::optional<ResponseKind> forced = std::nullopt);

struct ColumnMoments {
    double sum;
    double sumsq;
    double mean;
    double variance; // sample variance, n-1 denominator
};

// Dense column-major predictor block with per-column moments cached at
// construction; screening reads columns as spans.
class PredictorMatrix {
public:
    // values holds d columns of length n, column j contiguous at j*n.
    PredictorMatrix(std::size_t n, std::size_t d, std::vector<double> values);

    std::size_t rows() const { return n_; }
    std::size_t cols() const { return d_; }

    std::span<const double> column(std::size_t j) const;
    const ColumnMoments& moments(std::size_t j) const;
    const std::vector<std::string>& names() const { return names_; }
    void set_names(std::vector<std::string> names);

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> values_;
    std::vector<ColumnMoments> moments_;
    std::vector<std::string> names_;
};

struct Dataset {
    ResponseVector response;
    PredictorMatrix predictors;
};

// Throws ValidationError when the response kind does not match the family:
// Logistic needs Binary; Poisson and NegBin need Count; Gamma and Weibull
// need Positive; Beta needs UnitInterval.
void validate_for_family(const ResponseVector& y, Family family);

// Kind the family requires, for messages and CLI checks.
ResponseKind required_kind(Family family);

struct CsvOptions {
    // '\0' sniffs the delimiter from the first line (tab if present, else comma).
    char delimiter = '\0';
    // Unset sniffs: a first row with any non-numeric cell is a header.
    std::optional<bool> has_header;
    // Response column by name (needs a header) or by 0-based index.
    std::string response = "0";
    std::optional<ResponseKind> forced_kind;
};

// Loads a rectangular numeric table; the named column becomes the response
// and every other column a predictor.  Missing values ("", na, nan, null) and
// unparsable cells raise ParseError naming the 1-based row and column.
Dataset load_csv(const std::string& path, const CsvOptions& opts = {});

// Writes response plus predictors with round-trip precision ("%.17g"), same
// dialect load_csv reads back.
void save_csv(const Dataset& ds, const std::string& path,
              char delimiter = ',');

} // namespace uscr
