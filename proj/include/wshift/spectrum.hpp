#pragma once

// Membership of lambda in sigma(T) from the growth rates R+ and R-:
//   S invertible:      lambda in sigma(T)  <=>  R+(lambda) >= 1 and R-(lambda) >= 1
//   S not invertible:  lambda in sigma(T)  <=>  R+(lambda) >= 1
// and its realization as a classified, adaptively refined grid over a box.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wshift/radii.hpp"

namespace wshift {

/// Which side of the exact (eps = 0) criterion a point falls on. Points
/// outside the spectrum are split by the convergent series direction, so a
/// curve-shaped spectrum shows up as the interface between the two kinds.
enum class PointLabel : std::uint8_t { spectrum, forward_resolvent, backward_resolvent };

struct MembershipResult {
    cplx lambda;
    RadiusEstimate r_plus;
    std::optional<RadiusEstimate> r_minus;  // absent when S is not invertible
    bool in_spectrum = false;
    double margin = 0.0;
    PointLabel label = PointLabel::spectrum;
};

inline double default_eps(int k_max) { return 10.0 / k_max; }

/// Classification from radius values alone; r_minus empty for a non-invertible shift.
/// Ties at exactly 1 - eps count as inside.
bool classify(double r_plus, std::optional<double> r_minus, double eps);

/// Sign-definite label and margin (min |log R| over the deciding conditions).
PointLabel exact_label(double r_plus, std::optional<double> r_minus);
double membership_margin(double r_plus, std::optional<double> r_minus, bool in_spectrum);

class MembershipEvaluator {
public:
    MembershipEvaluator(const ShiftModel& model, int k_max, double eps, RadiusOptions options = {});

    MembershipResult operator()(cplx lambda) const;
    double eps() const { return eps_; }
    const RadiusEvaluator& radii() const { return radii_; }

private:
    RadiusEvaluator radii_;
    double eps_;
};

/// Requires step 1 (n-shifts go through decompose_union).
MembershipResult membership(const ShiftModel& model, cplx lambda, int k_max, double eps);

struct Box {
    double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;
    bool operator==(const Box&) const = default;
};

/// Centered on the mean diagonal value with half-width (||S|| + sup|d - c|) * 1.1,
/// which encloses the spectrum by the triangle inequality.
Box default_box(const ShiftModel& model);

/// True if the box contains a disk known to enclose sigma(T).
bool box_encloses_spectrum(const ShiftModel& model, const Box& box);

enum class CellClass : std::uint8_t { outside, inside, boundary };

std::string_view to_string(CellClass c);
std::string_view to_string(PointLabel l);

/// Per-component data stored at every sampled lattice point.
struct ComponentSample {
    double r_plus = 0.0;
    double r_minus = 0.0;  // NaN when S is not invertible
    bool in_spectrum = false;
    PointLabel label = PointLabel::spectrum;
    double margin = 0.0;
};

struct GridSample {
    bool in_spectrum = false;  // union over components
    std::vector<ComponentSample> parts;

    /// Component reported in flat outputs: first one inside the spectrum,
    /// otherwise the one closest to it.
    const ComponentSample& representative() const;
};

/// Point of the finest lattice: lambda = (x0 + x * hx_fine, y0 + y * hy_fine).
struct LatticePoint {
    std::int64_t x = 0;
    std::int64_t y = 0;
    // Row-major order: by y, then x.
    auto operator<=>(const LatticePoint& o) const {
        if (auto c = y <=> o.y; c != 0) return c;
        return x <=> o.x;
    }
    bool operator==(const LatticePoint&) const = default;
};

/// Leaf cell of the refinement tree, in finest-lattice units.
struct Cell {
    std::int64_t x = 0;
    std::int64_t y = 0;
    std::int64_t size = 1;
    int depth = 0;
    CellClass cls = CellClass::outside;
};

struct RegionGrid {
    Box box;
    int nx = 0;
    int ny = 0;
    int max_depth = 0;
    int k_max = 0;
    double eps = 0.0;
    int components = 1;

    std::map<LatticePoint, GridSample> samples;
    std::vector<Cell> leaves;              // sorted by (y, x)
    std::vector<CellClass> base_classes;   // ny rows of nx, row 0 at y0
    std::vector<std::string> warnings;

    std::int64_t scale() const { return std::int64_t{1} << max_depth; }
    double fine_dx() const { return (box.x1 - box.x0) / (static_cast<double>(nx) * scale()); }
    double fine_dy() const { return (box.y1 - box.y0) / (static_cast<double>(ny) * scale()); }
    cplx at(LatticePoint p) const;
    cplx cell_center(const Cell& c) const;
    double cell_width(const Cell& c) const { return fine_dx() * static_cast<double>(c.size); }
    double cell_diagonal(const Cell& c) const;
    double finest_diagonal() const;

    const GridSample* find(LatticePoint p) const;
};

enum class Execution { serial, parallel };

struct ScanParams {
    std::optional<Box> box;  // default_box when empty
    int nx = 64;
    int ny = 64;
    int k_max = 64;
    std::optional<double> eps;  // default_eps(k_max) when empty
    int max_depth = 3;
    std::size_t cell_budget = std::size_t{1} << 22;
    int threads = 0;  // 0: OpenMP default
    Execution execution = Execution::parallel;
    RadiusOptions radius_options{};
};

/// Refinement or sample count exceeded the configured cap.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void validate(const ScanParams& params);

/// Corner-sampled classification with bisection of mixed cells up to max_depth.
/// Requires step 1.
RegionGrid scan(const ShiftModel& model, const ScanParams& params);

/// Scans the n residue-class 1-shifts on a common lattice; a point is inside
/// iff it is inside for some residue class. For n = 1 this is scan().
RegionGrid decompose_union(const ShiftModel& model, const ScanParams& params);

/// Lower-level entry point: scan with an arbitrary per-point evaluator returning
/// one ComponentSample per component.
using PointEvaluator = std::function<std::vector<ComponentSample>(cplx)>;
RegionGrid scan_with(const PointEvaluator& evaluate, int components, const Box& box, const ScanParams& params);

/// Evaluates `evaluate` on every point; parallel version uses OpenMP with
/// results merged by index, so the output does not depend on the thread count.
std::vector<std::vector<ComponentSample>> evaluate_points_serial(const PointEvaluator& evaluate,
                                                                 const std::vector<cplx>& points);
std::vector<std::vector<ComponentSample>> evaluate_points_parallel(const PointEvaluator& evaluate,
                                                                   const std::vector<cplx>& points, int threads);

/// Rebuilds leaves and classes from the samples of a grid (used when reading
/// a grid back from CSV). A cell is split iff its center was sampled.
void rebuild_cells(RegionGrid& grid);

/// Ordered boundary components (closed curves or open arcs).
struct BoundaryPolyline {
    struct Component {
        bool closed = false;
        std::vector<cplx> vertices;
    };
    std::vector<Component> components;
};

/// Contour extraction on the refined lattice. Crossings are placed on cell
/// edges whose endpoints carry different exact labels, interpolating log R+
/// (spectrum/forward), log R- (spectrum/backward) or log R+ - log R-
/// (forward/backward, the centerline of a curve-shaped spectrum).
BoundaryPolyline extract_boundary(const RegionGrid& grid);

}  // namespace wshift
