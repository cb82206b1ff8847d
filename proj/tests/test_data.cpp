#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uscr/data.hpp"
#include "uscr/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

using namespace uscr;
namespace fs = std::filesystem;

namespace {

// Writes a fixture file and removes it when the test ends.
struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path(fs::temp_directory_path() / name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_CASE("kind inference follows most-specific-first precedence") {
    CHECK(infer_response_kind(std::vector<double>{0, 1, 1, 0}) ==
          ResponseKind::Binary);
    CHECK(infer_response_kind(std::vector<double>{0, 0, 0, 0}) ==
          ResponseKind::Binary);
    CHECK(infer_response_kind(std::vector<double>{0, 1, 2, 5}) ==
          ResponseKind::Count);
    CHECK(infer_response_kind(std::vector<double>{0.2, 0.5, 0.9, 0.3}) ==
          ResponseKind::UnitInterval);
    // 0.5 alongside 2.0 forces Positive, not UnitInterval.
    CHECK(infer_response_kind(std::vector<double>{0.5, 2.0, 1.5, 3.0}) ==
          ResponseKind::Positive);
    CHECK(infer_response_kind(std::vector<double>{-1.5, 2.0, 0.0, 1.0}) ==
          ResponseKind::Continuous);
    // A zero disqualifies the open unit interval.
    CHECK(infer_response_kind(std::vector<double>{0.0, 0.5, 0.7, 0.9}) ==
          ResponseKind::Continuous);
}

TEST_CASE("make_response validates size, finiteness, and forced kinds") {
    CHECK_THROWS_AS(make_response({1.0, 2.0, 3.0}), ValidationError);
    CHECK_THROWS_AS(make_response({1.0, 2.0, 3.0, std::nan("")}),
                    ValidationError);
    const ResponseVector good = make_response({0, 1, 1, 0});
    CHECK(good.kind == ResponseKind::Binary);
    // Binary values also satisfy a forced Count reading.
    CHECK(make_response({0, 1, 1, 0}, ResponseKind::Count).kind ==
          ResponseKind::Count);
    CHECK_THROWS_AS(make_response({0, 1, 1, 0}, ResponseKind::UnitInterval),
                    ValidationError);
    // All-zero counts are structurally fine; degeneracy is a fit concern.
    CHECK(make_response({0, 0, 0, 0, 0}, ResponseKind::Count).kind ==
          ResponseKind::Count);
}

TEST_CASE("column moments match hand values") {
    const PredictorMatrix m(3, 2, {1, 2, 3, 5, 5, 5});
    CHECK(m.moments(0).sum == 6.0);
    CHECK(m.moments(0).sumsq == 14.0);
    CHECK(m.moments(0).mean == 2.0);
    CHECK(m.moments(0).variance == 1.0);
    CHECK(m.moments(1).variance == 0.0);
    const PredictorMatrix m2(2, 1, {-1, 1});
    CHECK(m2.moments(0).sum == 0.0);
    CHECK(m2.moments(0).sumsq == 2.0);
    CHECK(m2.moments(0).mean == 0.0);
    CHECK(m2.moments(0).variance == 2.0);
}

TEST_CASE("predictor matrix validates shape and rejects non-finite values") {
    CHECK_THROWS_AS(PredictorMatrix(2, 2, {1, 2, 3}), ValidationError);
    CHECK_THROWS_AS(PredictorMatrix(0, 1, {}), ValidationError);
    CHECK_THROWS_AS(PredictorMatrix(2, 1, {1.0, std::nan("")}),
                    ValidationError);
    const PredictorMatrix m(2, 2, {1, 2, 3, 4});
    CHECK(m.names()[0] == "x1");
    CHECK(m.names()[1] == "x2");
    CHECK_THROWS_AS(m.column(2), std::out_of_range);
}

TEST_CASE("family/response compatibility") {
    const ResponseVector bin = make_response({0, 1, 1, 0});
    CHECK_NOTHROW(validate_for_family(bin, Family::Logistic));
    CHECK_THROWS_AS(validate_for_family(bin, Family::Beta), ValidationError);
    CHECK_THROWS_AS(validate_for_family(bin, Family::Gamma), ValidationError);
    const ResponseVector zeros = make_response({0, 0, 0, 0, 0}, ResponseKind::Count);
    CHECK_NOTHROW(validate_for_family(zeros, Family::Poisson));
    CHECK(required_kind(Family::Weibull) == ResponseKind::Positive);
    CHECK(required_kind(Family::NegBin) == ResponseKind::Count);
}

TEST_CASE("csv load with header sniffing and binary response") {
    TempFile f("uscr_t1.csv",
               "y,a,b\n0,1.5,2\n1,2.5,3\n1,3.5,4\n0,4.5,5\n1,5.5,6\n");
    const Dataset ds = load_csv(f.str());
    CHECK(ds.response.kind == ResponseKind::Binary);
    CHECK(ds.response.values.size() == 5);
    CHECK(ds.predictors.cols() == 2);
    CHECK(ds.predictors.names()[0] == "a");
    CHECK(ds.predictors.column(0)[0] == 1.5);
    CHECK(ds.predictors.column(1)[4] == 6.0);
}

TEST_CASE("csv response selection by name and by index") {
    TempFile f("uscr_t2.csv",
               "a,y,b\n1,0,2\n2,1,3\n3,1,4\n4,0,5\n");
    CsvOptions by_y;
    by_y.response = "y";
    const Dataset byname = load_csv(f.str(), by_y);
    CHECK(byname.response.kind == ResponseKind::Binary);
    CHECK(byname.predictors.names() ==
          std::vector<std::string>{"a", "b"});
    CsvOptions by_1;
    by_1.response = "1";
    const Dataset byindex = load_csv(f.str(), by_1);
    CHECK(byindex.response.values == byname.response.values);
    CsvOptions by_zz;
    by_zz.response = "zz";
    CHECK_THROWS_AS(load_csv(f.str(), by_zz), ValidationError);
    CsvOptions by_7;
    by_7.response = "7";
    CHECK_THROWS_AS(load_csv(f.str(), by_7), ValidationError);
}

TEST_CASE("csv delimiter sniffing picks tab when present") {
    TempFile f("uscr_t3.tsv",
               "y\ta\n0\t1\n1\t2\n1\t3\n0\t4\n");
    const Dataset ds = load_csv(f.str());
    CHECK(ds.predictors.cols() == 1);
    CHECK(ds.predictors.column(0)[3] == 4.0);
}

TEST_CASE("csv headerless file with explicit flag") {
    TempFile f("uscr_t4.csv", "0,1\n1,2\n1,3\n0,4\n");
    CsvOptions no_header;
    no_header.has_header = false;
    const Dataset ds = load_csv(f.str(), no_header);
    CHECK(ds.response.values.size() == 4);
    // Sniffing reaches the same answer: an all-numeric first row is data.
    const Dataset sniffed = load_csv(f.str());
    CHECK(sniffed.response.values.size() == 4);
}

TEST_CASE("csv missing and malformed cells name the 1-based location") {
    TempFile miss("uscr_t5.csv", "y,a\n0,1\n1,\n1,3\n0,4\n");
    CHECK_THROWS_WITH_AS(load_csv(miss.str()),
                         doctest::Contains("row 3, column 2"), ParseError);
    TempFile na("uscr_t6.csv", "y,a\n0,1\n1,2\n1,NA\n0,4\n");
    CHECK_THROWS_AS(load_csv(na.str()), ParseError);
    TempFile bad("uscr_t7.csv", "y,a\n0,1\n1,2\n1,3\n0,4x\n");
    CHECK_THROWS_WITH_AS(load_csv(bad.str()),
                         doctest::Contains("row 5, column 2"), ParseError);
    TempFile ragged("uscr_t8.csv", "y,a\n0,1\n1,2,9\n1,3\n0,4\n");
    CHECK_THROWS_AS(load_csv(ragged.str()), ParseError);
}

TEST_CASE("csv structural errors") {
    CHECK_THROWS_AS(load_csv("/nonexistent/uscr.csv"), DataError);
    TempFile empty("uscr_t9.csv", "\n\n");
    CHECK_THROWS_AS(load_csv(empty.str()), ParseError);
    TempFile onecol("uscr_t10.csv", "y\n0\n1\n1\n0\n");
    CHECK_THROWS_AS(load_csv(onecol.str()), ParseError);
    TempFile short3("uscr_t11.csv", "y,a\n0,1\n1,2\n1,3\n");
    CHECK_THROWS_AS(load_csv(short3.str()), ValidationError);
}

TEST_CASE("csv forced kind applies to the loaded response") {
    TempFile f("uscr_t12.csv", "y,a\n0,1\n1,2\n1,3\n0,4\n");
    CsvOptions as_count;
    as_count.forced_kind = ResponseKind::Count;
    const Dataset ds = load_csv(f.str(), as_count);
    CHECK(ds.response.kind == ResponseKind::Count);
    CsvOptions as_positive;
    as_positive.forced_kind = ResponseKind::Positive;
    CHECK_THROWS_AS(load_csv(f.str(), as_positive), ValidationError);
}

TEST_CASE("crlf line endings are accepted") {
    TempFile f("uscr_t13.csv", "y,a\r\n0,1\r\n1,2\r\n1,3\r\n0,4\r\n");
    const Dataset ds = load_csv(f.str());
    CHECK(ds.response.values.size() == 4);
}

TEST_CASE("save and reload round-trips doubles bit-exactly") {
    std::mt19937_64 eng(31);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t n = 50, d = 3;
    std::vector<double> y(n), x(n * d);
    for (double& v : y) v = std::exp(g(eng)); // positive response
    for (double& v : x) v = g(eng) * 1e3;
    const Dataset ds{make_response(y), PredictorMatrix(n, d, x)};

    const fs::path p = fs::temp_directory_path() / "uscr_rt.csv";
    save_csv(ds, p.string());
    const Dataset back = load_csv(p.string());
    std::error_code ec;
    fs::remove(p, ec);

    REQUIRE(back.response.values.size() == n);
    REQUIRE(back.predictors.cols() == d);
    CHECK(back.response.kind == ds.response.kind);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(back.response.values[i] == ds.response.values[i]);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < n; ++i)
            CHECK(back.predictors.column(j)[i] == ds.predictors.column(j)[i]);
}

TEST_CASE("kind inference is order-independent") {
    std::vector<double> v{0.25, 0.75, 0.5, 0.125, 0.875};
    const ResponseKind k1 = infer_response_kind(v);
    std::reverse(v.begin(), v.end());
    CHECK(infer_response_kind(v) == k1);
}
