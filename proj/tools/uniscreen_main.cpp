#include "uscr/data.hpp"
#include "uscr/errors.hpp"
#include "uscr/report_io.hpp"
#include "uscr/screen.hpp"
#include "uscr/simulate.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace uscr;

struct IoOpts {
    std::string output = "-";
    std::string format = "csv";
    unsigned threads = 0;
    bool no_timings = false;
};

void add_io_opts(CLI::App* sub, IoOpts& io) {
    sub->add_option("-o,--output", io.output,
                    "Output path ('-' for stdout)");
    sub->add_option("--format", io.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", io.threads,
                    "Worker threads for the column sweep (0 = all cores)")
        ->envname("UNISCREEN_THREADS");
    sub->add_flag("--no-timings", io.no_timings,
                  "Omit wall-clock fields from the output");
}

struct DataOpts {
    std::string input;
    std::string response = "0";
    std::string delimiter;
    std::optional<bool> has_header;
    std::string kind;
};

void add_data_opts(CLI::App* sub, DataOpts& d) {
    sub->add_option("-i,--input", d.input, "Input CSV/TSV file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--response", d.response,
                    "Response column: header name or 0-based index");
    sub->add_option("--delimiter", d.delimiter,
                    "Field delimiter (default: sniffed)")
        ->check(CLI::Validator(
            [](std::string& s) {
                return s.size() == 1 ? std::string{}
                                     : std::string{"needs a single character"};
            },
            "CHAR"));
    auto* hdr = sub->add_flag("--header", "Treat the first line as a header");
    auto* nohdr =
        sub->add_flag("--no-header", "Treat the first line as data");
    nohdr->excludes(hdr);
    sub->parse_complete_callback([&d, hdr, nohdr] {
        if (hdr->count()) d.has_header = true;
        if (nohdr->count()) d.has_header = false;
    });
    sub->add_option("--kind", d.kind,
                    "Force the response kind instead of inferring it")
        ->check(CLI::IsMember(
            {"binary", "count", "unit-interval", "positive", "continuous"}));
}

Dataset load_dataset(const DataOpts& d) {
    CsvOptions opts;
    opts.response = d.response;
    if (!d.delimiter.empty()) opts.delimiter = d.delimiter[0];
    opts.has_header = d.has_header;
    if (!d.kind.empty()) opts.forced_kind = response_kind_from_name(d.kind);
    return load_csv(d.input, opts);
}

struct SelectOpts {
    std::string rule = "topk";
    std::size_t k = 0; // 0 = floor(n / ln n)
    double alpha = 0.05;
};

void add_select_opts(CLI::App* sub, SelectOpts& s) {
    sub->add_option("--select", s.rule, "Selection rule")
        ->check(CLI::IsMember({"topk", "threshold"}));
    sub->add_option("--topk", s.k,
                    "Number of columns TopK keeps (default: n / ln n)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--alpha", s.alpha, "Significance level")
        ->check(CLI::Range(std::nextafter(0.0, 1.0), 1.0));
}

std::vector<TestKind> parse_tests(const std::vector<std::string>& names) {
    std::vector<TestKind> tests;
    tests.reserve(names.size());
    for (const std::string& s : names) tests.push_back(test_kind_from_name(s));
    return tests;
}

ScreeningConfig make_config(Family family, const std::vector<TestKind>& tests,
                            const SelectOpts& sel, const IoOpts& io) {
    ScreeningConfig cfg;
    cfg.family = family;
    cfg.tests = tests;
    cfg.rule = sel.rule == "threshold" ? SelectionRule::Threshold
                                       : SelectionRule::TopK;
    cfg.alpha = sel.alpha;
    cfg.k = sel.k;
    cfg.threads = io.threads;
    return cfg;
}

// Appends "_tag" before the extension; passthrough for stdout.
std::string suffixed_path(const std::string& path, const std::string& tag) {
    if (path == "-" || path.empty()) return path;
    const std::filesystem::path p(path);
    std::filesystem::path out = p.parent_path() / p.stem();
    std::string s = out.string() + "_" + tag;
    return s + p.extension().string();
}

struct FilterArgs {
    DataOpts data;
    IoOpts io;
    SelectOpts sel;
    std::string family;
    std::string test = "score";
};

int run_filter(const FilterArgs& a) {
    const Dataset ds = load_dataset(a.data);
    const ScreeningConfig cfg =
        make_config(family_from_name(a.family), {test_kind_from_name(a.test)},
                    a.sel, a.io);
    const ScreeningReport rep = screen(ds, cfg);
    const HeaderFields extra = {{"input", a.data.input},
                                {"response", a.data.response}};
    const std::string out =
        a.io.format == "json"
            ? screening_report_json(rep, extra, !a.io.no_timings)
            : screening_report_csv(rep, extra, !a.io.no_timings);
    write_output(a.io.output, out);
    return 0;
}

struct CompareArgs {
    DataOpts data;
    IoOpts io;
    SelectOpts sel;
    std::string family;
    std::vector<std::string> tests;
};

int run_compare(const CompareArgs& a) {
    const Dataset ds = load_dataset(a.data);
    const ScreeningConfig cfg = make_config(
        family_from_name(a.family), parse_tests(a.tests), a.sel, a.io);
    const AgreementReport rep = compare_tests(ds, cfg);
    const HeaderFields extra = {{"input", a.data.input},
                                {"response", a.data.response}};
    const std::string out =
        a.io.format == "json"
            ? agreement_report_json(rep, extra, !a.io.no_timings)
            : agreement_report_csv(rep, extra, !a.io.no_timings);
    write_output(a.io.output, out);
    return 0;
}

struct SimulateArgs {
    IoOpts io;
    std::string preset;
    std::string family;
    std::vector<double> null_params;
    std::vector<std::size_t> n_values;
    std::size_t d = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 1;
    std::vector<std::string> tests;
};

// One simulation cell: a resolved design plus whether it is a planted
// (detection) run rather than a null-calibration run.
struct SimCell {
    SimDesign design;
    bool planted = false;
};

int run_simulate(const SimulateArgs& a) {
    std::vector<SimCell> cells;
    std::vector<TestKind> tests;
    const bool custom_family = !a.family.empty();
    const bool custom_params = !a.null_params.empty();

    auto base_design = [&](Family fam) {
        SimDesign ds;
        ds.family = fam;
        ds.seed = a.seed;
        return ds;
    };

    if (a.preset.empty()) {
        if (!custom_family)
            throw ValidationError("simulate needs --preset or --family");
        SimDesign ds = base_design(family_from_name(a.family));
        ds.null_params = a.null_params;
        ds.n = a.n_values.empty() ? 20000 : a.n_values[0];
        ds.d = a.d ? a.d : 100;
        ds.replications = a.reps ? a.reps : 10;
        for (std::size_t i = 1; i < a.n_values.size(); ++i) {
            SimDesign extra = ds;
            extra.n = a.n_values[i];
            cells.push_back({extra, false});
        }
        cells.insert(cells.begin(), {ds, false});
        tests = a.tests.empty()
                    ? std::vector<TestKind>{TestKind::Score, TestKind::Llr}
                    : parse_tests(a.tests);
    } else {
        Family preset_family;
        std::vector<std::vector<double>> param_grid;
        std::vector<std::size_t> n_grid;
        std::size_t d_default = 0, reps_default = 10;
        bool planted = false;
        if (a.preset == "table2" || a.preset == "table3") {
            preset_family = Family::Logistic;
            for (double p : {0.1, 0.2, 0.3, 0.4, 0.5}) param_grid.push_back({p});
            n_grid = {20000};
            d_default = 200;
            tests = a.preset == "table2"
                        ? std::vector<TestKind>{TestKind::Score, TestKind::Llr}
                        : std::vector<TestKind>{TestKind::Score, TestKind::Llr,
                                                TestKind::WelchT};
        } else if (a.preset == "table6") {
            preset_family = Family::Gamma;
            param_grid = {{1.0, 5.0}, {5.0, 5.0}};
            n_grid = {50000};
            d_default = 100;
            tests = {TestKind::Score, TestKind::Llr};
        } else if (a.preset == "table8") {
            preset_family = Family::Beta;
            param_grid = {{5.0, 10.0}, {0.5, 0.5}, {10.0, 5.0}};
            n_grid = {100, 500};
            d_default = 100;
            reps_default = 20;
            planted = true;
            tests = {TestKind::Score, TestKind::PearsonZ};
        } else {
            throw ValidationError("unknown preset '" + a.preset + "'");
        }
        if (custom_family && family_from_name(a.family) != preset_family)
            throw ValidationError("preset " + a.preset + " uses the " +
                                  family_name(preset_family) + " family");
        if (custom_params) param_grid = {a.null_params};
        if (!a.n_values.empty()) n_grid = a.n_values;
        if (!a.tests.empty()) tests = parse_tests(a.tests);
        for (const auto& params : param_grid) {
            for (std::size_t n : n_grid) {
                SimDesign ds = base_design(preset_family);
                ds.null_params = params;
                ds.n = n;
                ds.d = a.d ? a.d : d_default;
                ds.replications = a.reps ? a.reps : reps_default;
                cells.push_back({ds, planted});
            }
        }
    }

    for (SimCell& cell : cells) cell.design = resolve_design(cell.design);

    for (const SimCell& cell : cells) {
        std::string tag = family_name(cell.design.family);
        for (double v : cell.design.null_params) tag += "_" + format_double(v);
        tag += "_n" + std::to_string(cell.design.n);
        HeaderFields extra;
        if (!a.preset.empty()) extra.push_back({"preset", a.preset});
        std::string out;
        if (cell.planted) {
            const DetectionMetrics dm =
                run_planted_experiment(cell.design, tests, a.io.threads);
            out = a.io.format == "json" ? detection_metrics_json(dm, extra)
                                        : detection_metrics_csv(dm, extra);
        } else {
            const MetricsTable table =
                run_experiment(cell.design, tests, a.io.threads);
            out = a.io.format == "json"
                      ? metrics_table_json(table, extra, !a.io.no_timings)
                      : metrics_table_csv(table, extra, !a.io.no_timings);
        }
        write_output(cells.size() > 1 ? suffixed_path(a.io.output, tag)
                                      : a.io.output,
                     out);
    }
    return 0;
}

struct BenchArgs {
    IoOpts io;
    std::string family = "logistic";
    std::vector<double> null_params;
    std::vector<std::size_t> n_values = {100000};
    std::size_t d = 500;
    std::size_t reps = 1;
    std::uint64_t seed = 1;
};

int run_bench(const BenchArgs& a) {
    std::ostringstream os;
    const Family family = family_from_name(a.family);
    os << "# uniscreen=" << kVersion << "\n# report=bench\n# family="
       << a.family << "\n# d=" << a.d << "\n# reps=" << a.reps
       << "\n# seed=" << a.seed << "\n";
    os << "n,d,score_seconds,llr_seconds,speedup,null_fits,h1_fits\n";
    for (std::size_t n : a.n_values) {
        SimDesign ds;
        ds.family = family;
        ds.null_params = a.null_params;
        ds.n = n;
        ds.d = a.d;
        ds.replications = 1;
        ds.seed = a.seed;
        ds = resolve_design(ds);
        double score_s = 0.0, llr_s = 0.0;
        std::size_t null_fits = 0, h1_fits = 0;
        for (std::size_t rep = 0; rep < a.reps; ++rep) {
            const Dataset data = generate_null_dataset(ds, rep);
            ScreeningConfig cfg;
            cfg.family = family;
            cfg.tests = {TestKind::Score, TestKind::Llr};
            cfg.threads = a.io.threads;
            const ScreeningReport rp = screen(data, cfg);
            score_s += rp.test_seconds[0];
            llr_s += rp.test_seconds[1];
            null_fits += rp.null_fit_count;
            h1_fits += rp.h1_fit_count;
        }
        score_s /= double(a.reps);
        llr_s /= double(a.reps);
        os << n << ',' << a.d << ',' << format_double(score_s) << ','
           << format_double(llr_s) << ','
           << format_double(score_s > 0.0 ? llr_s / score_s : 0.0) << ','
           << null_fits << ',' << h1_fits << "\n";
    }
    write_output(a.io.output, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Univariate screening with score tests"};
    app.require_subcommand(1);

    FilterArgs filter;
    auto* f = app.add_subcommand(
        "filter", "Screen every predictor column against the response");
    add_data_opts(f, filter.data);
    f->add_option("--family", filter.family, "Regression family")
        ->required()
        ->check(CLI::IsMember({"logistic", "poisson", "gamma", "negbin",
                               "beta", "weibull"}));
    f->add_option("--test", filter.test, "Test to run per column")
        ->check(CLI::IsMember({"score", "llr", "pearson", "welch"}));
    add_select_opts(f, filter.sel);
    add_io_opts(f, filter.io);

    CompareArgs compare;
    auto* c = app.add_subcommand(
        "compare", "Run several tests and measure their agreement");
    add_data_opts(c, compare.data);
    c->add_option("--family", compare.family, "Regression family")
        ->required()
        ->check(CLI::IsMember({"logistic", "poisson", "gamma", "negbin",
                               "beta", "weibull"}));
    c->add_option("--tests", compare.tests,
                  "Comma-separated tests; the first is the baseline")
        ->required()
        ->delimiter(',');
    add_select_opts(c, compare.sel);
    add_io_opts(c, compare.io);

    SimulateArgs simulate;
    auto* s = app.add_subcommand(
        "simulate", "Monte Carlo null-calibration and detection experiments");
    s->add_option("--preset", simulate.preset,
                  "Canned design: table2|table3|table6|table8")
        ->check(CLI::IsMember({"table2", "table3", "table6", "table8"}));
    s->add_option("--family", simulate.family, "Regression family")
        ->check(CLI::IsMember({"logistic", "poisson", "gamma", "negbin",
                               "beta", "weibull"}));
    s->add_option("--null-params", simulate.null_params,
                  "Comma-separated family null parameters")
        ->delimiter(',');
    s->add_option("--n", simulate.n_values, "Sample size(s)")
        ->delimiter(',');
    s->add_option("--d", simulate.d, "Predictor count");
    s->add_option("--reps", simulate.reps, "Replications");
    s->add_option("--seed", simulate.seed, "Master seed");
    s->add_option("--tests", simulate.tests, "Tests to run")->delimiter(',');
    add_io_opts(s, simulate.io);

    BenchArgs bench;
    auto* b = app.add_subcommand(
        "bench", "Time score vs LLR sweeps over an (n, d) grid");
    b->add_option("--family", bench.family, "Regression family")
        ->check(CLI::IsMember({"logistic", "poisson", "gamma", "negbin",
                               "beta", "weibull"}));
    b->add_option("--null-params", bench.null_params,
                  "Comma-separated family null parameters")
        ->delimiter(',');
    b->add_option("--n", bench.n_values, "Sample size grid")->delimiter(',');
    b->add_option("--d", bench.d, "Predictor count");
    b->add_option("--reps", bench.reps, "Repetitions to average over")
        ->check(CLI::PositiveNumber);
    b->add_option("--seed", bench.seed, "Master seed");
    add_io_opts(b, bench.io);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (f->parsed()) return run_filter(filter);
        if (c->parsed()) return run_compare(compare);
        if (s->parsed()) return run_simulate(simulate);
        if (b->parsed()) return run_bench(bench);
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
