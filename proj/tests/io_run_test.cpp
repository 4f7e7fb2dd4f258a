#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "qlyap/io.hpp"
#include "qlyap/random.hpp"
#include "qlyap/run.hpp"

namespace qlyap {
namespace {

namespace fs = std::filesystem;

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path dir = fs::temp_directory_path() / "qlyap_io_run_test";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
}

ExponentEstimate two_samples() {
    ExponentEstimate e;
    e.samples = {{1.0, 0.5}, {2.0, 1.25}};
    e.rate = 0.75;
    e.standard_error = 0.0;
    e.converged = true;
    return e;
}

TEST(MatrixJson, RoundTrip) {
    Rng rng(1);
    const ComplexMatrix m = random_matrix(3, rng);
    const ComplexMatrix back = matrix_from_json(Json::parse(matrix_to_json(m).dump()));
    EXPECT_EQ(back, m);
}

TEST(MatrixJson, ImaginaryPartOptionalAndSizeChecked) {
    const ComplexMatrix m = matrix_from_json(Json::parse(R"({"dim": 2, "re": [1, 2, 3, 4]})"));
    EXPECT_EQ(m(1, 0), Complex(3, 0));
    EXPECT_THROW(matrix_from_json(Json::parse(R"({"dim": 2, "re": [1, 2, 3]})")), ConfigError);
    EXPECT_THROW(matrix_from_json(Json::parse(R"({"re": [1]})")), ConfigError);
}

TEST(MapJson, Descriptors) {
    const ComplexMatrix x = diagonal({0.5, 0.25});
    EXPECT_EQ(map_from_json(Json::parse(R"({"kind":"scalar","name":"logistic","r":4.0})")).apply(x),
              DynamicalMap::scalar(ScalarMap::logistic(4)).apply(x));
    const auto kraus = map_from_json(Json::parse(R"({"kind":"kraus","ops":[{"dim":2,"re":[0,1,1,0]}]})"));
    EXPECT_LE(operator_norm(kraus.apply(x) - diagonal({0.25, 0.5})), 1e-15);
    const auto flow = map_from_json(Json::parse(R"({"kind":"flow","generator":{"dim":2,"re":[1,0,0,2]},"unitary":true})"));
    EXPECT_TRUE(flow.is_flow());
    const auto horo = map_from_json(Json::parse(
        R"({"kind":"horocyclic","K":{"dim":2,"re":[0,0,0,1]},"G":{"dim":2,"re":[0,1,0,0]},"rate":1.0})"));
    EXPECT_TRUE(horo.is_flow());
    const auto poly = scalar_map_from_json(
        Json::parse(R"({"name":"polynomial","nodes":[0,0.5,1],"values":[0,1,0],"domain":[0,1]})"));
    EXPECT_NEAR(poly(0.25), 0.75, 1e-15);
    EXPECT_THROW(map_from_json(Json::parse(R"({"kind":"lindblad"})")), ConfigError);
    EXPECT_THROW(scalar_map_from_json(Json::parse(R"({"name":"henon"})")), ConfigError);
}

TEST(EstimateJson, RoundTripThroughSchema) {
    ExponentEstimate e = two_samples();
    e.argmax_direction = std::array<double, 2>{0.0, 1.0};
    const Json j = Json::parse(estimate_to_json(e).dump());
    for (const char* key : {"rate", "stderr", "converged", "samples", "argmax_direction"}) EXPECT_TRUE(j.contains(key));
    const ExponentEstimate back = estimate_from_json(j);
    EXPECT_EQ(back.rate, e.rate);
    EXPECT_EQ(back.converged, e.converged);
    EXPECT_EQ(back.argmax_direction, e.argmax_direction);
    ASSERT_EQ(back.samples.size(), 2u);
    EXPECT_EQ(back.samples[1].log_norm, 1.25);
    EXPECT_EQ(estimate_to_json(back), estimate_to_json(e));
}

TEST(EstimateJson, NonFiniteBecomesNull) {
    ExponentEstimate e;
    e.rate = -std::numeric_limits<double>::infinity();
    const Json j = estimate_to_json(e);
    EXPECT_TRUE(j.at("rate").is_null());
    EXPECT_TRUE(j.at("argmax_direction").is_null());
    EXPECT_EQ(estimate_from_json(j).rate, -std::numeric_limits<double>::infinity());
}

TEST(EstimateCsv, TwoSamples) {
    EXPECT_EQ(estimate_to_csv(two_samples()),
              "time,log_norm\n"
              "1,0.5\n"
              "2,1.25\n"
              "# rate=0.75\n"
              "# stderr=0\n"
              "# converged=true\n");
}

TEST(EstimateCsv, EmptyEstimateIsHeaderAndFooter) {
    ExponentEstimate e;
    e.rate = -std::numeric_limits<double>::infinity();
    EXPECT_EQ(emit_report(e, ReportFormat::csv), "time,log_norm\n# rate=-inf\n# stderr=0\n# converged=false\n");
}

TEST(RunConfig, ClassicalDoubling) {
    const auto path = write_temp("doubling.json", R"({
        "task": "classical",
        "map": {"kind": "scalar", "name": "doubling"},
        "x0": 0.1234567,
        "n_max": 1000
    })");
    std::string diag;
    const RunResult r = run_config(path.string(), ReportFormat::json, &diag);
    ASSERT_EQ(r.exit_code, kExitOk) << diag;
    EXPECT_NEAR(Json::parse(r.report).at("rate").get<double>(), std::numbers::ln2, 1e-12);
}

TEST(RunConfig, VerifyIdentitiesSeedSeven) {
    const auto path = write_temp("identities.json", R"({"task": "verify_identities", "seed": 7})");
    const RunResult r = run_config(path.string(), ReportFormat::json);
    ASSERT_EQ(r.exit_code, kExitOk);
    const Json j = Json::parse(r.report);
    EXPECT_TRUE(j.at("all_passed").get<bool>());
    std::vector<std::string> names;
    for (const auto& c : j.at("checks")) names.push_back(c.at("name").get<std::string>());
    EXPECT_NE(std::find(names.begin(), names.end(), "leibniz_exact"), names.end());
    EXPECT_NE(std::find(names.begin(), names.end(), "taylor_remainder_order"), names.end());
    EXPECT_NE(std::find(names.begin(), names.end(), "first_derivative_agreement"), names.end());
}

TEST(RunConfig, MalformedJsonIsParseError) {
    const auto path = write_temp("malformed.json", R"({"task": "classical", )");
    std::string diag;
    const RunResult r = run_config(path.string(), ReportFormat::json, &diag);
    EXPECT_EQ(r.exit_code, kExitError);
    EXPECT_NE(diag.find("ConfigParse"), std::string::npos) << diag;
    EXPECT_TRUE(r.report.empty());
}

TEST(RunConfig, ConfigErrorsExitOne) {
    const std::vector<std::pair<std::string, std::string>> cases{
        {"unknown_task.json", R"({"task": "spectrum"})"},
        {"no_map.json", R"({"task": "classical", "n_max": 10})"},
        {"no_schedule.json", R"({"task": "classical", "map": {"kind": "scalar", "name": "doubling"}})"},
        {"missing_matrix.json",
         R"({"task": "qle_discrete", "map": {"kind": "scalar", "name": "affine", "c": 2}, "n_max": 10})"},
        {"escape.json", R"({"task": "classical", "map": {"kind": "scalar", "name": "logistic", "r": 5},
                            "x0": 0.5, "n_max": 10})"},
    };
    for (const auto& [name, text] : cases) {
        std::string diag;
        EXPECT_EQ(run_config(write_temp(name, text).string(), ReportFormat::json, &diag).exit_code, kExitError)
            << name;
        EXPECT_FALSE(diag.empty()) << name;
    }
    std::string diag;
    EXPECT_EQ(run_config("/nonexistent/qlyap.json", ReportFormat::json, &diag).exit_code, kExitError);
}

TEST(RunConfig, NotConvergedExitsTwo) {
    // A zero derivative on the orbit produces a flagged, non-converged estimate.
    const auto path = write_temp("critical.json", R"({
        "task": "classical",
        "map": {"kind": "scalar", "name": "logistic", "r": 4},
        "x0": 0.5,
        "n_max": 20
    })");
    const RunResult r = run_config(path.string(), ReportFormat::json);
    EXPECT_EQ(r.exit_code, kExitNotConverged);
    EXPECT_TRUE(Json::parse(r.report).at("rate").is_null());
}

TEST(RunConfig, EveryTaskRuns) {
    const std::string k = R"({"dim":2,"re":[1,0,0,-1]})";
    const std::string e12 = R"({"dim":2,"re":[0,1,0,0]})";
    const std::string e21 = R"({"dim":2,"re":[0,0,1,0]})";
    const std::string a = R"({"dim":2,"re":[0.3,-0.7,1.1,0.4],"im":[0,0.2,-0.5,0]})";
    const std::vector<std::pair<std::string, std::string>> cases{
        {"qle_discrete.json", R"({"task":"qle_discrete","map":{"kind":"scalar","name":"affine","c":2},
            "matrices":{"A":{"dim":2,"re":[0.3,0.1,0.1,0.6]},"B":)" + a + R"(},"n_max":50})"},
        {"qle_horocyclic.json", R"({"task":"qle_horocyclic",
            "map":{"kind":"horocyclic","K":{"dim":2,"re":[0,0,0,1]},"G":)" + e12 + R"(,"rate":1.0},
            "matrices":{"A":{"dim":2,"re":[0,1,1,0]}},"t_grid":{"start":0,"stop":20,"count":201}})"},
        {"qle_upper.json", R"({"task":"qle_upper","map":{"kind":"similarity","generator":)" + k + R"(},
            "matrices":{"A":)" + a + R"(,"L1":)" + e12 + R"(,"L2":)" + e21 + R"(},
            "n_angles":64,"t_grid":{"start":0,"stop":15,"count":301}})"},
        {"verify_sup.json", R"({"task":"verify_sup","map":{"kind":"scalar","name":"logistic","r":4},
            "matrices":{"A":{"dim":2,"re":[0.3,0.1,0.1,0.6]}},"n_max":200})"},
    };
    for (const auto& [name, text] : cases) {
        std::string diag;
        const RunResult r = run_config(write_temp(name, text).string(), ReportFormat::json, &diag);
        ASSERT_NE(r.exit_code, kExitError) << name << ": " << diag;
        const Json j = Json::parse(r.report);
        const bool ok = j.contains("converged") ? j.at("converged").get<bool>() : j.at("passed").get<bool>();
        EXPECT_EQ(r.exit_code, ok ? kExitOk : kExitNotConverged) << name;
    }
}

TEST(RunConfig, CsvReportsForSummaryTasks) {
    const auto path = write_temp("sup_csv.json", R"({"task":"verify_sup",
        "map":{"kind":"scalar","name":"affine","c":1.5},
        "matrices":{"A":{"dim":2,"re":[1,0,0,2]}},"n_max":10})");
    const RunResult r = run_config(path.string(), ReportFormat::csv);
    ASSERT_EQ(r.exit_code, kExitOk);
    EXPECT_EQ(r.report.rfind("key,value\n", 0), 0u) << r.report;
    EXPECT_NE(r.report.find("\ntask,verify_sup\n"), std::string::npos);
    EXPECT_NE(r.report.find("passed,true"), std::string::npos);
}

TEST(RunConfig, OutputPathAndTimeGrid) {
    const auto path = write_temp("with_output.json", R"({"task":"classical",
        "map":{"kind":"scalar","name":"doubling"},"x0":0.3,"n_max":20,"output":"/tmp/x.json"})");
    EXPECT_EQ(run_config(path.string(), ReportFormat::json).output, std::optional<std::string>("/tmp/x.json"));
    const auto g = time_grid_from_json(Json::parse(R"({"start":0,"stop":1,"count":5})"));
    ASSERT_EQ(g.size(), 5u);
    EXPECT_DOUBLE_EQ(g[1], 0.25);
    EXPECT_THROW(time_grid_from_json(Json::parse(R"({"start":0,"stop":1,"count":1})")), ConfigError);
}

TEST(RunConfig, IdenticalConfigsGiveByteIdenticalReports) {
    const auto path = write_temp("determinism.json", R"({"task":"verify_identities","seed":11,
        "leibniz_pairs":20,"derivative_instances":5})");
    const RunResult first = run_config(path.string(), ReportFormat::json);
    const RunResult second = run_config(path.string(), ReportFormat::json);
    EXPECT_EQ(first.report, second.report);
    EXPECT_FALSE(first.report.empty());
}

}  // namespace
}  // namespace qlyap
