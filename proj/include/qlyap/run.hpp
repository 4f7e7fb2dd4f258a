#pragma once

// Batch runs: a JSON run configuration names a task, a map descriptor, input
// matrices and a schedule; executing it yields a report and an exit status
// (0 success, 2 produced but not converged / not passed, 1 error).

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qlyap/dynamics.hpp"
#include "qlyap/errors.hpp"
#include "qlyap/exponents.hpp"
#include "qlyap/identities.hpp"
#include "qlyap/io.hpp"

namespace qlyap {

enum class Task { classical, qle_discrete, qle_horocyclic, qle_upper, verify_sup, verify_identities };

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

struct RunConfig {
    Task task = Task::classical;
    Json map;
    std::map<std::string, ComplexMatrix> matrices;
    double x0 = 0.0;
    std::size_t n_max = 0;
    std::vector<double> t_grid;
    EstimatorOptions estimator;
    std::size_t n_angles = 64;
    std::uint64_t seed = 7;
    IdentitySuiteOptions identities;
    double sup_defect_tolerance = 1e-6;
    double sup_identity_tolerance = 1e-9;
    std::optional<std::string> output;

    std::string a_name = "A";
    std::string b_name = "B";
    std::string l1_name = "L1";
    std::string l2_name = "L2";

    [[nodiscard]] const ComplexMatrix& matrix(const std::string& name) const {
        auto it = matrices.find(name);
        if (it == matrices.end()) throw ConfigError("matrix '" + name + "' is not defined");
        return it->second;
    }
};

struct RunResult {
    int exit_code = kExitOk;
    std::string report;
    /// Output path named in the configuration, if any.
    std::optional<std::string> output;
};

inline Task task_from_string(const std::string& s) {
    static const std::map<std::string, Task> names{{"classical", Task::classical},
                                                   {"qle_discrete", Task::qle_discrete},
                                                   {"qle_horocyclic", Task::qle_horocyclic},
                                                   {"qle_upper", Task::qle_upper},
                                                   {"verify_sup", Task::verify_sup},
                                                   {"verify_identities", Task::verify_identities}};
    auto it = names.find(s);
    if (it == names.end()) throw ConfigError("unknown task '" + s + "'");
    return it->second;
}

/// Either an explicit array or {"start", "stop", "count"} (inclusive, uniform).
inline std::vector<double> time_grid_from_json(const Json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    const double start = j.at("start").get<double>();
    const double stop = j.at("stop").get<double>();
    const auto count = j.at("count").get<std::size_t>();
    if (count < 2) throw ConfigError("t_grid count must be at least 2");
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return grid;
}

inline RunConfig run_config_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("run configuration must be a JSON object");
    try {
        RunConfig c;
        c.task = task_from_string(j.at("task").get<std::string>());
        if (j.contains("map")) c.map = j.at("map");
        if (j.contains("matrices")) {
            for (const auto& [name, m] : j.at("matrices").items()) c.matrices.emplace(name, matrix_from_json(m));
        }
        c.x0 = j.value("x0", 0.0);
        c.n_max = j.value("n_max", std::size_t{0});
        if (j.contains("t_grid")) c.t_grid = time_grid_from_json(j.at("t_grid"));
        c.estimator.tail_fraction = j.value("tail_fraction", 0.5);
        c.estimator.mode = j.value("limsup", false) ? FitMode::limsup : FitMode::lim;
        c.estimator.step_time = j.value("step_time", 1.0);
        c.n_angles = j.value("n_angles", std::size_t{64});
        c.seed = j.value("seed", std::uint64_t{7});
        c.identities.seed = c.seed;
        c.identities.leibniz_pairs = j.value("leibniz_pairs", c.identities.leibniz_pairs);
        c.identities.derivative_instances = j.value("derivative_instances", c.identities.derivative_instances);
        c.sup_defect_tolerance = j.value("defect_tolerance", c.sup_defect_tolerance);
        c.sup_identity_tolerance = j.value("identity_tolerance", c.sup_identity_tolerance);
        if (j.contains("output")) c.output = j.at("output").get<std::string>();
        c.a_name = j.value("a", c.a_name);
        c.b_name = j.value("b", c.b_name);
        c.l1_name = j.value("l1", c.l1_name);
        c.l2_name = j.value("l2", c.l2_name);

        const bool needs_map = c.task != Task::verify_identities;
        if (needs_map && c.map.is_null()) throw ConfigError("task needs a \"map\" descriptor");
        switch (c.task) {
            case Task::classical:
            case Task::qle_discrete:
            case Task::verify_sup:
                if (c.n_max == 0) throw ConfigError("schedule n_max must be positive");
                break;
            case Task::qle_horocyclic:
            case Task::qle_upper:
                if (c.t_grid.empty()) throw ConfigError("schedule t_grid must be non-empty");
                break;
            case Task::verify_identities:
                break;
        }
        return c;
    } catch (const Json::exception& e) {
        throw ConfigError(e.what());
    }
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigParse(e.what());
    }
    return run_config_from_json(j);
}

namespace detail {

inline std::string emit_fields(const Json& fields, ReportFormat format) {
    if (format == ReportFormat::json) return fields.dump(2) + "\n";
    std::string out = "key,value\n";
    for (const auto& [k, v] : fields.items()) {
        if (v.is_structured()) continue;
        out += k + "," + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
    }
    return out;
}

inline RunResult estimate_result(const ExponentEstimate& e, ReportFormat format) {
    return {e.converged ? kExitOk : kExitNotConverged, emit_report(e, format)};
}

}  // namespace detail

inline RunResult execute(const RunConfig& c, ReportFormat format) {
    switch (c.task) {
        case Task::classical: {
            const ScalarMap f = scalar_map_from_json(c.map);
            return detail::estimate_result(classical_lyapunov(f, c.x0, c.n_max, c.estimator), format);
        }
        case Task::qle_discrete: {
            const DynamicalMap m = map_from_json(c.map);
            const ComplexMatrix& a = c.matrix(c.a_name);
            const ComplexMatrix b = c.matrices.count(c.b_name) ? c.matrix(c.b_name) : identity(a.rows());
            return detail::estimate_result(qle_discrete(m, a, b, c.n_max, c.estimator), format);
        }
        case Task::qle_horocyclic: {
            const HorocyclicModel h = horocyclic_from_json(c.map);
            return detail::estimate_result(qle_horocyclic(h, c.matrix(c.a_name), c.t_grid, c.estimator), format);
        }
        case Task::qle_upper: {
            const DynamicalMap m = map_from_json(c.map);
            return detail::estimate_result(qle_upper(m, c.matrix(c.a_name), c.matrix(c.l1_name),
                                                     c.matrix(c.l2_name), c.n_angles, c.t_grid, c.estimator),
                                           format);
        }
        case Task::verify_sup: {
            const ScalarMap f = scalar_map_from_json(c.map);
            const SupFormulaReport r = verify_sup_formula(f, c.matrix(c.a_name), c.n_max);
            const bool passed =
                r.defect <= c.sup_defect_tolerance && r.max_identity_defect <= c.sup_identity_tolerance;
            const Json fields{{"task", "verify_sup"},
                              {"n", r.n},
                              {"lhs", r.lhs},
                              {"rhs", r.rhs},
                              {"defect", r.defect},
                              {"max_identity_defect", r.max_identity_defect},
                              {"passed", passed}};
            return {passed ? kExitOk : kExitNotConverged, detail::emit_fields(fields, format)};
        }
        case Task::verify_identities: {
            const IdentitySuiteReport r = run_identity_suite(c.identities);
            Json checks = Json::array();
            for (const auto& check : r.checks) {
                checks.push_back({{"name", check.name},
                                  {"count", check.count},
                                  {"max_defect", check.max_defect},
                                  {"tolerance", check.tolerance},
                                  {"passed", check.passed}});
            }
            const Json fields{{"task", "verify_identities"},
                              {"seed", r.seed},
                              {"all_passed", r.all_passed()},
                              {"checks", std::move(checks)}};
            std::string text = detail::emit_fields(fields, format);
            if (format == ReportFormat::csv) {
                text += "check,count,max_defect,tolerance,passed\n";
                for (const auto& check : r.checks) {
                    text += check.name + "," + std::to_string(check.count) + "," +
                            detail::format_double(check.max_defect) + "," + detail::format_double(check.tolerance) +
                            "," + (check.passed ? "true" : "false") + "\n";
                }
            }
            return {r.all_passed() ? kExitOk : kExitNotConverged, std::move(text)};
        }
    }
    throw ConfigError("unhandled task");
}

/// Loads and executes a configuration file. Any error becomes exit status 1
/// with an empty report and its message in `diagnostic`.
inline RunResult run_config(const std::string& path, ReportFormat format, std::string* diagnostic = nullptr) {
    try {
        const RunConfig config = load_run_config(path);
        RunResult r = execute(config, format);
        r.output = config.output;
        return r;
    } catch (const std::exception& e) {
        if (diagnostic) *diagnostic = e.what();
        return {kExitError, {}};
    }
}

}  // namespace qlyap
