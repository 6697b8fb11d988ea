#pragma once

// A single job: one command applied to one model with its numeric knobs.
//
// Config JSON (only "command" and "model" are required):
//   {"command": "scan",
//    "model": {...},
//    "k_max": 64, "eps": 0.15625, "threads": 0,
//    "lambda": z  |  "lambdas": [z, ...],
//    "grid": {"box": [x0, x1, y0, y1], "nx": 64, "ny": 64, "max_depth": 3, "budget": 4194304},
//    "series": {"length": 64},
//    "oracle": {"n": 128, "boundary": "circulant", "offset": 0, "delta": 0.1},
//    "outputs": [{"path": "grid.csv", "format": "csv"}, ...]}
// Without outputs the primary result goes to stdout.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wshift/io.hpp"

namespace wshift {

enum class ExitCode : int { ok = 0, failure = 1, config_error = 2, budget_exceeded = 3 };

struct OutputSpec {
    std::string path;
    std::string format;  // csv, json or pgm; empty: inferred from the extension
};

struct JobConfig {
    std::string command;
    std::optional<ShiftModel> model;
    int k_max = 64;
    std::optional<double> eps;
    int threads = 0;
    std::vector<cplx> lambdas;

    std::optional<Box> box;
    int nx = 64;
    int ny = 64;
    int max_depth = 3;
    std::size_t budget = std::size_t{1} << 22;

    int series_length = 64;

    int oracle_n = 128;
    TruncationBoundary oracle_boundary = TruncationBoundary::circulant;
    std::optional<Index> oracle_offset;
    std::optional<double> oracle_delta;

    std::vector<OutputSpec> outputs;
    std::string stdout_format;  // empty: the command's primary format
};

bool known_command(const std::string& name);

/// Throws ConfigError for unknown fields, wrong types or out-of-range knobs.
JobConfig parse_job(const json& j);

/// Bounds checks shared by config and flag paths. Throws ConfigError.
void validate(const JobConfig& config);

ScanParams scan_params(const JobConfig& config);

/// Runs the job and writes its outputs (all files are produced only after the
/// whole computation succeeded). Diagnostics go to `err`.
ExitCode run(const JobConfig& config, std::ostream& out, std::ostream& err);

}  // namespace wshift
