// wshift: spectra of diagonally perturbed bilateral weighted shifts.
//
//   wshift scan --config job.json --out grid.csv --out grid.pgm
//   wshift radii --json '{"model": {...}}' --lambda 3
//
// Flags override the matching top-level knobs of the config.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "wshift/job.hpp"

namespace {

wshift::cplx parse_lambda(const std::string& text) {
    // "re" or "re,im"
    const auto comma = text.find(',');
    std::size_t used = 0;
    const double re = std::stod(text.substr(0, comma), &used);
    if (used != (comma == std::string::npos ? text.size() : comma)) throw wshift::ConfigError("bad --lambda " + text);
    if (comma == std::string::npos) return {re, 0.0};
    const auto rest = text.substr(comma + 1);
    const double im = std::stod(rest, &used);
    if (used != rest.size()) throw wshift::ConfigError("bad --lambda " + text);
    return {re, im};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra of diagonally perturbed bilateral weighted shift operators"};
    std::string command;
    std::string config_path;
    std::string inline_json;
    std::optional<int> k_max;
    std::optional<double> eps;
    std::optional<int> threads;
    std::vector<std::string> outs;
    std::string format;
    std::vector<std::string> lambdas;

    app.add_option("command", command, "radii | membership | scan | boundary | nshift | verify-inverse | oracle | compare");
    auto* cfg = app.add_option("--config", config_path, "job config (JSON file)");
    app.add_option("--json", inline_json, "job config as inline JSON")->excludes(cfg);
    app.add_option("--k-max", k_max, "truncation depth for the radii (>= 8)");
    app.add_option("--eps", eps, "membership band, default 10/k_max");
    app.add_option("--threads", threads, "worker threads (0: OpenMP default)");
    app.add_option("--out", outs, "output file; repeatable");
    app.add_option("--format", format, "format for --out files without a known extension, or for stdout")
        ->check(CLI::IsMember({"csv", "json", "pgm"}));
    app.add_option("--lambda", lambdas, "spectral parameter as re or re,im; repeatable");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(wshift::ExitCode::config_error);
    }

    try {
        std::string text = inline_json;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw wshift::ConfigError("cannot read config " + config_path);
            std::ostringstream buf;
            buf << in.rdbuf();
            text = buf.str();
        }
        if (text.empty()) throw wshift::ConfigError("give a job with --config or --json");
        wshift::json j;
        try {
            j = wshift::json::parse(text);
        } catch (const wshift::json::parse_error& e) {
            throw wshift::ConfigError(std::string("malformed JSON: ") + e.what());
        }
        auto job = wshift::parse_job(j);
        if (!command.empty()) job.command = command;
        if (k_max) job.k_max = *k_max;
        if (eps) job.eps = *eps;
        if (threads) job.threads = *threads;
        if (!lambdas.empty()) {
            job.lambdas.clear();
            for (const auto& l : lambdas) job.lambdas.push_back(parse_lambda(l));
        }
        if (!outs.empty()) {
            job.outputs.clear();
            for (const auto& o : outs) {
                wshift::OutputSpec spec{o, ""};
                const bool known_ext = o.ends_with(".csv") || o.ends_with(".json") || o.ends_with(".pgm");
                if (!known_ext) spec.format = format;
                job.outputs.push_back(spec);
            }
        } else {
            job.stdout_format = format;
        }
        return static_cast<int>(wshift::run(job, std::cout, std::cerr));
    } catch (const wshift::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return static_cast<int>(wshift::ExitCode::config_error);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return static_cast<int>(wshift::ExitCode::config_error);
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return static_cast<int>(wshift::ExitCode::config_error);
    }
}
