#pragma once

#include "uscr/screen.hpp"
#include "uscr/simulate.hpp"

#include <string>
#include <utility>
#include <vector>

namespace uscr {

inline constexpr const char* kVersion = "1.0.0";

// Extra key/value lines the caller wants in the '#' header block (seed,
// input path, preset, ...).
using HeaderFields = std::vector<std::pair<std::string, std::string>>;

// Shortest round-trip decimal form of v (std::to_chars).
std::string format_double(double v);

// CSV: '#' header lines carrying the full resolved configuration, version,
// operation counters, and (unless suppressed) timings; then one body row
// per (column, test) with columns index,test,statistic,pvalue,selected,error.
// Bodies never contain timing data, so equal headers imply equal bodies.
std::string screening_report_csv(const ScreeningReport& rep,
                                 const HeaderFields& extra = {},
                                 bool include_timings = true);
std::string screening_report_json(const ScreeningReport& rep,
                                  const HeaderFields& extra = {},
                                  bool include_timings = true);

// Same body as the screening CSV plus per-pair agreement header lines.
std::string agreement_report_csv(const AgreementReport& rep,
                                 const HeaderFields& extra = {},
                                 bool include_timings = true);
std::string agreement_report_json(const AgreementReport& rep,
                                  const HeaderFields& extra = {},
                                  bool include_timings = true);

// One body row per test: design columns, type I error, pair metrics.
std::string metrics_table_csv(const MetricsTable& table,
                              const HeaderFields& extra = {},
                              bool include_timings = true);
std::string metrics_table_json(const MetricsTable& table,
                               const HeaderFields& extra = {},
                               bool include_timings = true);

std::string detection_metrics_csv(const DetectionMetrics& dm,
                                  const HeaderFields& extra = {});
std::string detection_metrics_json(const DetectionMetrics& dm,
                                   const HeaderFields& extra = {});

// Writes to path through a same-directory temp file renamed on success, so
// failures leave no partial output.  Path "-" streams to stdout.
void write_output(const std::string& path, const std::string& content);

} // namespace uscr
