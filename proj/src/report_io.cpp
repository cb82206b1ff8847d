#include "uscr/report_io.hpp"
#include "uscr/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace uscr {

namespace {

using nlohmann::json;

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string tests_joined(const std::vector<TestKind>& tests) {
    std::string s;
    for (std::size_t i = 0; i < tests.size(); ++i) {
        if (i) s += ',';
        s += test_kind_name(tests[i]);
    }
    return s;
}

std::string params_joined(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

void put(std::ostringstream& os, const std::string& key,
         const std::string& value) {
    os << "# " << key << "=" << value << "\n";
}

json null_fit_json(const NullFit& nf) {
    json j;
    j["family"] = family_name(nf.family);
    j["loglik0"] = nf.loglik0;
    j["n"] = nf.n;
    switch (nf.family) {
        case Family::Logistic:
            j["p"] = std::get<LogisticNull>(nf.params).p;
            break;
        case Family::Poisson:
            j["lambda"] = std::get<PoissonNull>(nf.params).lambda;
            break;
        case Family::Gamma: {
            const auto& g = std::get<GammaNull>(nf.params);
            j["shape"] = g.shape;
            j["rate"] = g.rate;
            break;
        }
        case Family::NegBin: {
            const auto& nb = std::get<NegBinNull>(nf.params);
            j["r"] = nb.r;
            j["p"] = nb.p;
            break;
        }
        case Family::Beta: {
            const auto& b = std::get<BetaNull>(nf.params);
            j["alpha"] = b.alpha;
            j["beta"] = b.beta;
            break;
        }
        case Family::Weibull: {
            const auto& w = std::get<WeibullNull>(nf.params);
            j["shape"] = w.shape;
            j["scale"] = w.scale;
            break;
        }
    }
    return j;
}

std::string null_fit_line(const NullFit& nf) {
    const json j = null_fit_json(nf);
    std::string s;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!s.empty()) s += ' ';
        s += it.key();
        s += '=';
        if (it->is_string()) s += it->get<std::string>();
        else if (it->is_number_float()) s += format_double(it->get<double>());
        else s += it->dump();
    }
    return s;
}

void put_screening_header(std::ostringstream& os, const ScreeningReport& rep,
                          const HeaderFields& extra, bool include_timings,
                          const char* kind) {
    put(os, "uniscreen", kVersion);
    put(os, "report", kind);
    put(os, "family", family_name(rep.config.family));
    put(os, "tests", tests_joined(rep.config.tests));
    put(os, "rule", selection_rule_name(rep.config.rule));
    put(os, "alpha", format_double(rep.config.alpha));
    if (rep.config.rule == SelectionRule::TopK)
        put(os, "k", std::to_string(rep.config.k));
    put(os, "n", std::to_string(rep.n));
    put(os, "d", std::to_string(rep.d));
    put(os, "null_fit_count", std::to_string(rep.null_fit_count));
    put(os, "h1_fit_count", std::to_string(rep.h1_fit_count));
    put(os, "min_raw_llr", format_double(rep.min_raw_llr));
    if (rep.null_fit) put(os, "null_fit", null_fit_line(*rep.null_fit));
    for (const auto& [k, v] : extra) put(os, k, v);
    if (include_timings) {
        put(os, "null_fit_seconds", format_double(rep.null_fit_seconds));
        for (std::size_t ti = 0; ti < rep.config.tests.size(); ++ti)
            put(os, "seconds_" + test_kind_name(rep.config.tests[ti]),
                format_double(rep.test_seconds[ti]));
    }
}

void put_screening_body(std::ostringstream& os, const ScreeningReport& rep) {
    os << "index,test,statistic,pvalue,selected,error\n";
    for (const ColumnResult& col : rep.columns) {
        for (std::size_t ti = 0; ti < rep.config.tests.size(); ++ti) {
            const CellResult& cell = col.cells[ti];
            os << col.index << ','
               << test_kind_name(rep.config.tests[ti]) << ',';
            if (cell.ok())
                os << format_double(cell.outcome.statistic) << ','
                   << format_double(cell.outcome.pvalue);
            else
                os << ',';
            os << ',' << (col.selected ? 1 : 0) << ','
               << csv_escape(cell.error) << "\n";
        }
    }
}

json screening_json_value(const ScreeningReport& rep, const HeaderFields& extra,
                          bool include_timings) {
    json j;
    j["uniscreen"] = kVersion;
    json cfg;
    cfg["family"] = family_name(rep.config.family);
    json tests = json::array();
    for (TestKind t : rep.config.tests) tests.push_back(test_kind_name(t));
    cfg["tests"] = tests;
    cfg["rule"] = selection_rule_name(rep.config.rule);
    cfg["alpha"] = rep.config.alpha;
    if (rep.config.rule == SelectionRule::TopK) cfg["k"] = rep.config.k;
    // The worker count is an execution resource, not configuration: results
    // are bit-identical across thread counts, and the header must be too.
    j["config"] = cfg;
    j["n"] = rep.n;
    j["d"] = rep.d;
    j["null_fit_count"] = rep.null_fit_count;
    j["h1_fit_count"] = rep.h1_fit_count;
    j["min_raw_llr"] = rep.min_raw_llr;
    if (rep.null_fit) j["null_fit"] = null_fit_json(*rep.null_fit);
    for (const auto& [k, v] : extra) j["run"][k] = v;
    if (include_timings) {
        json t;
        t["null_fit_seconds"] = rep.null_fit_seconds;
        for (std::size_t ti = 0; ti < rep.config.tests.size(); ++ti)
            t["seconds_" + test_kind_name(rep.config.tests[ti])] =
                rep.test_seconds[ti];
        j["timings"] = t;
    }
    json cols = json::array();
    for (const ColumnResult& col : rep.columns) {
        json c;
        c["index"] = col.index;
        c["name"] = col.name;
        c["selected"] = col.selected;
        json cells = json::array();
        for (std::size_t ti = 0; ti < rep.config.tests.size(); ++ti) {
            const CellResult& cell = col.cells[ti];
            json e;
            e["test"] = test_kind_name(rep.config.tests[ti]);
            if (cell.ok()) {
                e["statistic"] = cell.outcome.statistic;
                e["pvalue"] = cell.outcome.pvalue;
                if (cell.outcome.df) e["df"] = *cell.outcome.df;
            } else {
                e["error"] = cell.error;
            }
            cells.push_back(e);
        }
        c["tests"] = cells;
        cols.push_back(c);
    }
    j["columns"] = cols;
    j["selected"] = rep.selected;
    return j;
}

json pair_json(const PairAgreement& p, bool include_timings) {
    json e;
    e["baseline"] = test_kind_name(p.baseline);
    e["other"] = test_kind_name(p.other);
    e["pvalue_correlation"] = p.pvalue_correlation;
    e["agreement_fraction"] = p.agreement_fraction;
    if (include_timings) e["speedup"] = p.speedup;
    e["common"] = p.common;
    e["excluded"] = p.excluded;
    return e;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string screening_report_csv(const ScreeningReport& rep,
                                 const HeaderFields& extra,
                                 bool include_timings) {
    std::ostringstream os;
    put_screening_header(os, rep, extra, include_timings, "screening");
    put_screening_body(os, rep);
    return os.str();
}

std::string screening_report_json(const ScreeningReport& rep,
                                  const HeaderFields& extra,
                                  bool include_timings) {
    return screening_json_value(rep, extra, include_timings).dump(2) + "\n";
}

std::string agreement_report_csv(const AgreementReport& rep,
                                 const HeaderFields& extra,
                                 bool include_timings) {
    std::ostringstream os;
    put_screening_header(os, rep.screening, extra, include_timings,
                         "agreement");
    for (const PairAgreement& p : rep.pairs) {
        std::string line = "baseline=" + test_kind_name(p.baseline) +
                           " other=" + test_kind_name(p.other) +
                           " pvalue_correlation=" +
                           format_double(p.pvalue_correlation) +
                           " agreement=" + format_double(p.agreement_fraction);
        if (include_timings)
            line += " speedup=" + format_double(p.speedup);
        line += " common=" + std::to_string(p.common) +
                " excluded=" + std::to_string(p.excluded);
        put(os, "pair", line);
    }
    put_screening_body(os, rep.screening);
    return os.str();
}

std::string agreement_report_json(const AgreementReport& rep,
                                  const HeaderFields& extra,
                                  bool include_timings) {
    json j = screening_json_value(rep.screening, extra, include_timings);
    json pairs = json::array();
    for (const PairAgreement& p : rep.pairs)
        pairs.push_back(pair_json(p, include_timings));
    j["pairs"] = pairs;
    return j.dump(2) + "\n";
}

namespace {

void put_design_header(std::ostringstream& os, const SimDesign& ds,
                       const std::vector<TestKind>& tests,
                       const HeaderFields& extra, const char* kind) {
    put(os, "uniscreen", kVersion);
    put(os, "report", kind);
    put(os, "family", family_name(ds.family));
    put(os, "null_params", params_joined(ds.null_params));
    put(os, "n", std::to_string(ds.n));
    put(os, "d", std::to_string(ds.d));
    put(os, "replications", std::to_string(ds.replications));
    put(os, "seed", std::to_string(ds.seed));
    put(os, "tests", tests_joined(tests));
    for (const auto& [k, v] : extra) put(os, k, v);
}

json design_json(const SimDesign& ds) {
    json j;
    j["family"] = family_name(ds.family);
    j["null_params"] = ds.null_params;
    j["n"] = ds.n;
    j["d"] = ds.d;
    j["replications"] = ds.replications;
    j["seed"] = ds.seed;
    return j;
}

} // namespace

std::string metrics_table_csv(const MetricsTable& table,
                              const HeaderFields& extra,
                              bool include_timings) {
    std::ostringstream os;
    put_design_header(os, table.design, table.tests, extra, "metrics");
    if (include_timings) {
        for (const TestMetrics& tm : table.per_test)
            put(os, "seconds_" + test_kind_name(tm.test),
                format_double(tm.mean_seconds));
        for (const PairSummary& p : table.pairs)
            put(os, "speedup_" + test_kind_name(p.other) + "_vs_" +
                        test_kind_name(p.baseline),
                format_double(p.speedup));
    }
    os << "family,null_params,n,d,replications,test,type_i_error,"
          "pvalue_correlation,agreement\n";
    for (std::size_t ti = 0; ti < table.per_test.size(); ++ti) {
        const TestMetrics& tm = table.per_test[ti];
        os << family_name(table.design.family) << ','
           << csv_escape(params_joined(table.design.null_params)) << ','
           << table.design.n << ',' << table.design.d << ','
           << table.design.replications << ',' << test_kind_name(tm.test)
           << ',' << format_double(tm.type_i_error) << ',';
        if (ti > 0) {
            const PairSummary& p = table.pairs[ti - 1];
            os << format_double(p.pvalue_correlation) << ','
               << format_double(p.agreement);
        } else {
            os << ',';
        }
        os << "\n";
    }
    return os.str();
}

std::string metrics_table_json(const MetricsTable& table,
                               const HeaderFields& extra,
                               bool include_timings) {
    json j;
    j["uniscreen"] = kVersion;
    j["report"] = "metrics";
    j["design"] = design_json(table.design);
    json tests = json::array();
    for (TestKind t : table.tests) tests.push_back(test_kind_name(t));
    j["tests"] = tests;
    for (const auto& [k, v] : extra) j["run"][k] = v;
    json per = json::array();
    for (const TestMetrics& tm : table.per_test) {
        json e;
        e["test"] = test_kind_name(tm.test);
        e["type_i_error"] = tm.type_i_error;
        if (include_timings) e["mean_seconds"] = tm.mean_seconds;
        e["pooled_pvalues"] = tm.pooled_pvalues;
        per.push_back(e);
    }
    j["per_test"] = per;
    json pairs = json::array();
    for (const PairSummary& p : table.pairs) {
        json e;
        e["baseline"] = test_kind_name(p.baseline);
        e["other"] = test_kind_name(p.other);
        e["pvalue_correlation"] = p.pvalue_correlation;
        e["agreement"] = p.agreement;
        if (include_timings) e["speedup"] = p.speedup;
        pairs.push_back(e);
    }
    j["pairs"] = pairs;
    return j.dump(2) + "\n";
}

std::string detection_metrics_csv(const DetectionMetrics& dm,
                                  const HeaderFields& extra) {
    std::ostringstream os;
    put_design_header(os, dm.design, dm.tests, extra, "detection");
    os << "family,null_params,n,d,replications,test,first_rank_rate\n";
    for (std::size_t ti = 0; ti < dm.tests.size(); ++ti) {
        os << family_name(dm.design.family) << ','
           << csv_escape(params_joined(dm.design.null_params)) << ','
           << dm.design.n << ',' << dm.design.d << ','
           << dm.design.replications << ',' << test_kind_name(dm.tests[ti])
           << ',' << format_double(dm.first_rank_rate[ti]) << "\n";
    }
    return os.str();
}

std::string detection_metrics_json(const DetectionMetrics& dm,
                                   const HeaderFields& extra) {
    json j;
    j["uniscreen"] = kVersion;
    j["report"] = "detection";
    j["design"] = design_json(dm.design);
    json tests = json::array();
    for (TestKind t : dm.tests) tests.push_back(test_kind_name(t));
    j["tests"] = tests;
    for (const auto& [k, v] : extra) j["run"][k] = v;
    json rates = json::array();
    for (std::size_t ti = 0; ti < dm.tests.size(); ++ti) {
        json e;
        e["test"] = test_kind_name(dm.tests[ti]);
        e["first_rank_rate"] = dm.first_rank_rate[ti];
        rates.push_back(e);
    }
    j["detection"] = rates;
    return j.dump(2) + "\n";
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-" || path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
        std::fflush(stdout);
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), std::streamsize(content.size()));
        if (!out)
            throw DataError("failed while writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw DataError("cannot move output into place at '" + path +
                        "': " + ec.message());
    }
}

} // namespace uscr
