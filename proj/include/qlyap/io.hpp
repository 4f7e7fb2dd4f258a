#pragma once

// JSON and CSV serialization: matrices, map descriptors and estimates.

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "qlyap/dynamics.hpp"
#include "qlyap/errors.hpp"
#include "qlyap/exponents.hpp"
#include "qlyap/linalg.hpp"

namespace qlyap {

using Json = nlohmann::json;

/// {"dim": d, "re": [row-major], "im": [row-major]}; "im" may be omitted.
inline Json matrix_to_json(const ComplexMatrix& m) {
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    }
    return Json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline ComplexMatrix matrix_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("re")) {
        throw ConfigError("matrix needs \"dim\" and \"re\"");
    }
    const auto dim = j.at("dim").get<long>();
    if (dim < 1) throw ConfigError("matrix dim must be positive");
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
    const auto count = static_cast<std::size_t>(dim * dim);
    if (re.size() != count || im.size() != count) {
        throw ConfigError("matrix of dim " + std::to_string(dim) + " needs " + std::to_string(count) + " entries");
    }
    ComplexMatrix m(dim, dim);
    for (long i = 0; i < dim; ++i) {
        for (long k = 0; k < dim; ++k) {
            const auto idx = static_cast<std::size_t>(i * dim + k);
            m(i, k) = Complex(re[idx], im[idx]);
        }
    }
    return m;
}

/// Built-in scalar maps by name, plus "polynomial" (interpolated from
/// "nodes"/"values" on "domain").
inline ScalarMap scalar_map_from_json(const Json& j) {
    const auto name = j.at("name").get<std::string>();
    if (name == "logistic") return ScalarMap::logistic(j.value("r", 4.0));
    if (name == "tent") return ScalarMap::tent(j.value("a", 2.0));
    if (name == "doubling") return ScalarMap::doubling();
    if (name == "affine") return ScalarMap::affine(j.value("c", 1.0), j.value("b", 0.0));
    if (name == "polynomial") {
        const auto domain = j.at("domain").get<std::vector<double>>();
        if (domain.size() != 2) throw ConfigError("polynomial map domain must be [lo, hi]");
        return ScalarMap::interpolated("polynomial", j.at("nodes").get<std::vector<double>>(),
                                       j.at("values").get<std::vector<double>>(), {domain[0], domain[1]},
                                       j.value("invariant", false));
    }
    throw ConfigError("unknown scalar map '" + name + "'");
}

inline HorocyclicModel horocyclic_from_json(const Json& j) {
    if (j.at("kind").get<std::string>() != "horocyclic") throw ConfigError("expected a horocyclic map descriptor");
    return {matrix_from_json(j.at("K")), matrix_from_json(j.at("G")), j.at("rate").get<double>()};
}

/// A "horocyclic" descriptor yields its similarity flow.
inline DynamicalMap map_from_json(const Json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "scalar") return DynamicalMap::scalar(scalar_map_from_json(j));
    if (kind == "kraus") {
        std::vector<ComplexMatrix> ops;
        for (const auto& op : j.at("ops")) ops.push_back(matrix_from_json(op));
        return DynamicalMap::kraus(std::move(ops));
    }
    if (kind == "flow") {
        return DynamicalMap::conjugation_flow(matrix_from_json(j.at("generator")), j.value("unitary", true));
    }
    if (kind == "similarity") return DynamicalMap::similarity_flow(matrix_from_json(j.at("generator")));
    if (kind == "horocyclic") return horocyclic_from_json(j).flow();
    throw ConfigError("unknown map kind '" + kind + "'");
}

namespace detail {

inline Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

/// Shortest round-trip decimal form.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace detail

/// {"rate", "stderr", "converged", "samples": [[t, log_norm], ...],
/// "argmax_direction": [a1, a2] | null}. Non-finite numbers become null.
inline Json estimate_to_json(const ExponentEstimate& e) {
    Json samples = Json::array();
    for (const auto& s : e.samples) {
        samples.push_back(Json::array({detail::finite_or_null(s.time), detail::finite_or_null(s.log_norm)}));
    }
    Json out{{"rate", detail::finite_or_null(e.rate)},
             {"stderr", detail::finite_or_null(e.standard_error)},
             {"converged", e.converged},
             {"samples", std::move(samples)},
             {"argmax_direction", nullptr}};
    if (e.argmax_direction) out["argmax_direction"] = {(*e.argmax_direction)[0], (*e.argmax_direction)[1]};
    return out;
}

inline ExponentEstimate estimate_from_json(const Json& j) {
    const auto number = [](const Json& v) {
        return v.is_null() ? -std::numeric_limits<double>::infinity() : v.get<double>();
    };
    ExponentEstimate e;
    e.rate = number(j.at("rate"));
    e.standard_error = j.at("stderr").is_null() ? 0.0 : j.at("stderr").get<double>();
    e.converged = j.at("converged").get<bool>();
    for (const auto& s : j.at("samples")) e.samples.push_back({s.at(0).get<double>(), number(s.at(1))});
    if (!j.at("argmax_direction").is_null()) {
        e.argmax_direction = {j.at("argmax_direction").at(0).get<double>(),
                              j.at("argmax_direction").at(1).get<double>()};
    }
    return e;
}

/// Header "time,log_norm", one line per sample, then "# key=value" footer lines.
inline std::string estimate_to_csv(const ExponentEstimate& e) {
    std::string out = "time,log_norm\n";
    for (const auto& s : e.samples) {
        out += detail::format_double(s.time);
        out += ',';
        out += detail::format_double(s.log_norm);
        out += '\n';
    }
    out += "# rate=" + detail::format_double(e.rate) + "\n";
    out += "# stderr=" + detail::format_double(e.standard_error) + "\n";
    out += std::string("# converged=") + (e.converged ? "true" : "false") + "\n";
    if (e.argmax_direction) {
        out += "# argmax_direction=" + detail::format_double((*e.argmax_direction)[0]) + "," +
               detail::format_double((*e.argmax_direction)[1]) + "\n";
    }
    return out;
}

enum class ReportFormat { json, csv };

inline std::string emit_report(const ExponentEstimate& e, ReportFormat format) {
    return format == ReportFormat::json ? estimate_to_json(e).dump(2) + "\n" : estimate_to_csv(e);
}

}  // namespace qlyap
