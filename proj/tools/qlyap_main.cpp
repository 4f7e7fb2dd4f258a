#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qlyap/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Classical and quantum Lyapunov exponents of finite-dimensional operator dynamics"};
    std::string config_path;
    std::string out_path;
    std::string format_name = "json";
    bool quiet = false;
    app.add_option("--config", config_path, "Run configuration (JSON)")->required();
    app.add_option("--out", out_path, "Report destination (default: config \"output\" or stdout)");
    app.add_option("--format", format_name, "Report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--quiet", quiet, "Suppress diagnostics");
    CLI11_PARSE(app, argc, argv);

    const auto format = format_name == "csv" ? qlyap::ReportFormat::csv : qlyap::ReportFormat::json;
    std::string diagnostic;
    const qlyap::RunResult result = qlyap::run_config(config_path, format, &diagnostic);
    if (result.exit_code == qlyap::kExitError) {
        std::cerr << "error: " << diagnostic << '\n';
        return result.exit_code;
    }

    const std::string destination = !out_path.empty() ? out_path : result.output.value_or("");
    if (destination.empty() || destination == "-") {
        std::cout << result.report;
    } else {
        std::ofstream out(destination, std::ios::binary);
        if (!out || !(out << result.report)) {
            std::cerr << "error: cannot write report to '" << destination << "'\n";
            return qlyap::kExitError;
        }
    }
    if (!quiet && result.exit_code == qlyap::kExitNotConverged) {
        std::cerr << "warning: estimate did not converge or a check failed\n";
    }
    return result.exit_code;
}
