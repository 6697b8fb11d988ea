#pragma once

// JSON schemas, grid/boundary/report serialization and file output.
//
// Sequence JSON ("kind" selects the remaining fields; complex numbers are a
// number or a [re, im] pair):
//   {"kind": "constant", "value": z}
//   {"kind": "periodic", "values": [z, ...]}
//   {"kind": "step", "left": z, "right": z}
//   {"kind": "explicit", "start": i, "values": [z, ...], "left": z, "right": z}
//   {"kind": "random", "seed": s, "start": i, "end": j, "modulus": [lo, hi],
//    "left": z, "right": z, "phase": true}
// Model JSON: {"weights": <sequence>, "diagonals": <sequence>, "step": n}.
// Unknown fields are rejected.

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

#include "wshift/inverse_series.hpp"
#include "wshift/oracle.hpp"
#include "wshift/spectrum.hpp"

namespace wshift {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using json = nlohmann::ordered_json;

cplx parse_complex(const json& j, const std::string& where);
SequenceSpec parse_sequence(const json& j, const std::string& where = "sequence");
ShiftModel parse_model(const json& j);

json complex_to_json(cplx z);
json sequence_to_json(const SequenceSpec& spec);
json model_to_json(const ShiftModel& model);

/// %.17g, with "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);

/// Finite doubles as numbers, non-finite ones as the strings above.
json real_to_json(double v);

/// One row per sampled lattice point in row-major (y, x) order.
std::string grid_to_csv(const RegionGrid& grid);

/// Reads a CSV written by grid_to_csv back onto the lattice described by the
/// metadata fields of `shape` (box, nx, ny, max_depth, k_max, eps) and rebuilds
/// the leaf cells. Throws ConfigError on malformed input.
RegionGrid grid_from_csv(const std::string& text, const RegionGrid& shape);

json grid_to_json(const RegionGrid& grid);

/// Binary PGM of the base cells, top row = largest imaginary part.
std::string grid_to_pgm(const RegionGrid& grid);

json boundary_to_json(const BoundaryPolyline& boundary);
json estimate_to_json(const RadiusEstimate& e);
json membership_to_json(const MembershipResult& m);
json report_to_json(const CompareReport& r);
std::string eigenvalues_to_csv(const std::vector<cplx>& values);

/// Writes through a temporary file in the same directory and renames it into
/// place. Throws std::runtime_error naming the path on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace wshift
