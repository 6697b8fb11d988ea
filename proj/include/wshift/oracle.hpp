#pragma once

// Finite-section cross-checks for the radius-based spectrum: dense N x N
// truncations of T with zero or circulant closure, their eigenvalues and the
// smallest singular value of (A - lambda) on a grid.
//
// Zero-closure truncations of shifts are spectrally misleading (the N x N
// lower shift is nilpotent); circulant closures of periodic models put every
// eigenvalue on the spectral curve. Both are shipped so the comparison report
// can show the difference.

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

#include "wshift/spectrum.hpp"

namespace wshift {

enum class TruncationBoundary { zero, circulant };

std::string_view to_string(TruncationBoundary b);

struct TruncatedMatrix {
    Eigen::MatrixXcd entries;
    TruncationBoundary boundary = TruncationBoundary::zero;
    Index offset = 0;  // operator index of the first basis vector

    int size() const { return static_cast<int>(entries.rows()); }
};

struct EigenFailure : std::runtime_error {
    EigenFailure(const std::string& what, long iterations) : std::runtime_error(what), iterations(iterations) {}
    long iterations;
};

constexpr int kDenseCap = 2048;

/// entries(i+1, i) = w_{a+i}, entries(i, i) = d_{a+i}; circulant adds
/// entries(0, N-1) = w_{a+N-1}. Requires step 1 and, for circulant closure of a
/// periodic model, N divisible by the period.
TruncatedMatrix truncate(const ShiftModel& model, int n, TruncationBoundary boundary, Index offset);

/// Offset centring the truncation on the model's non-periodic core.
Index default_offset(const ShiftModel& model, int n);

std::vector<cplx> eigenvalues(const TruncatedMatrix& m, int cap = kDenseCap);

/// Smallest singular value of (a - lambda I) by inverse iteration on
/// (a - lambda)^* (a - lambda), falling back to a dense SVD if it stalls.
double sigma_min(const Eigen::MatrixXcd& a, cplx lambda);

/// Reference value from a full singular value decomposition.
double sigma_min_svd(const Eigen::MatrixXcd& a, cplx lambda);

/// ||A^* A - A A^*||_F.
double non_normality(const TruncatedMatrix& m);

struct SigmaGrid {
    Box box;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;  // (ny + 1) rows of (nx + 1) lattice points, row 0 at y0

    cplx at(int ix, int iy) const;
    double value(int ix, int iy) const { return values[static_cast<std::size_t>(iy * (nx + 1) + ix)]; }
};

SigmaGrid sigma_min_grid(const TruncatedMatrix& m, const Box& box, int nx, int ny,
                         Execution execution = Execution::parallel, int threads = 0);
SigmaGrid sigma_min_grid(const ShiftModel& model, int n, TruncationBoundary boundary, const Box& box, int nx, int ny,
                         Execution execution = Execution::parallel, int threads = 0);

struct OracleParams {
    int n = 128;
    std::optional<Index> offset;
    std::optional<double> delta;  // default: two base-cell diagonals
};

struct CompareReport {
    int n_used = 0;
    double delta = 0.0;
    std::vector<cplx> circulant_eigenvalues;
    double max_eigenvalue_to_region = 0.0;    // to leaf cells classed inside or boundary
    double max_eigenvalue_to_boundary = 0.0;  // to the extracted polylines
    double inside_coverage = 0.0;             // inside cells within delta of some eigenvalue
    std::size_t inside_cells = 0;
    std::vector<cplx> zero_boundary_eigenvalues;
    std::vector<cplx> zero_boundary_discrepancies;  // farther than delta from the scanned set
};

/// Distance from a point to the union of leaf cells classed inside or boundary.
double distance_to_region(const RegionGrid& grid, cplx z);
double distance_to_polyline(const BoundaryPolyline& poly, cplx z);

/// For n-shifts the truncations are taken per residue-class submodel.
CompareReport compare(const ShiftModel& model, const RegionGrid& grid, const BoundaryPolyline& boundary,
                      const OracleParams& params);

}  // namespace wshift
