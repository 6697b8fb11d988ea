#pragma once

// Explicit inverse F of T - lambda built column by column.
//
// Forward (R+ < 1):  F e_i = sum_{l>=0} a^i_{i+l} e_{i+l},
//     a^i_{i+l} = (-1)^l prod_{m=0}^{l-1} w_{i+m} / prod_{m=0}^{l} (d_{i+m} - lambda).
// Backward (R- < 1): F e_i = sum_{k>=1} a^i_{i-k} e_{i-k},
//     a^i_{i-k} = (-1)^{k+1} prod_{m=1}^{k-1} (d_{i-m} - lambda) / prod_{m=1}^{k} w_{i-m}.

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "wshift/radii.hpp"

namespace wshift {

enum class SeriesDirection { forward, backward };

std::string_view to_string(SeriesDirection d);

/// Some d_i equals lambda inside the working range; the forward series does not exist.
struct DenominatorZero : std::domain_error {
    using std::domain_error::domain_error;
};

/// Some weight vanishes inside the working range; the backward series does not exist.
struct WeightZero : std::domain_error {
    using std::domain_error::domain_error;
};

/// Coefficient stored as log-modulus and unit phase.
struct PolarCoefficient {
    double log_modulus = 0.0;
    cplx phase{1.0, 0.0};

    cplx value() const;
};

class InverseSeries {
public:
    InverseSeries(SeriesDirection direction, cplx lambda, int length, IndexRange columns,
                  std::vector<PolarCoefficient> coeffs);

    SeriesDirection direction() const { return direction_; }
    cplx lambda() const { return lambda_; }
    int length() const { return length_; }
    IndexRange columns() const { return columns_; }
    double tail_bound() const { return tail_bound_; }

    /// Forward: a^i_{i+offset}, offset = 0..L. Backward: a^i_{i-offset}, offset = 1..L.
    /// Zero outside the stored offsets.
    cplx coefficient(Index column, int offset) const;
    const PolarCoefficient& polar(Index column, int offset) const;

    /// Row index reached by `offset` from `column`.
    Index row(Index column, int offset) const {
        return direction_ == SeriesDirection::forward ? column + offset : column - offset;
    }
    int first_offset() const { return direction_ == SeriesDirection::forward ? 0 : 1; }

private:
    std::size_t slot(Index column, int offset) const;

    SeriesDirection direction_;
    cplx lambda_;
    int length_;
    IndexRange columns_;
    std::vector<PolarCoefficient> coeffs_;  // row-major by column, length + 1 slots each
    double tail_bound_ = 0.0;
};

/// Fundamental window of the model padded by L on both sides.
IndexRange default_series_range(const ShiftModel& model, int length);

/// Throws DenominatorZero. Caller is responsible for R+(lambda) < 1.
InverseSeries build_forward(const ShiftModel& model, cplx lambda, int length, IndexRange columns);
InverseSeries build_forward(const ShiftModel& model, cplx lambda, int length);

/// Throws WeightZero. Caller is responsible for R-(lambda) < 1.
InverseSeries build_backward(const ShiftModel& model, cplx lambda, int length, IndexRange columns);
InverseSeries build_backward(const ShiftModel& model, cplx lambda, int length);

/// Pre-check gate: the series in `direction` converges iff the matching radius is < 1.
bool series_admissible(const RadiusEvaluator& radii, cplx lambda, SeriesDirection direction);

/// max over probes of the l2 norms of (F(T-lambda) - I) e_i and ((T-lambda)F - I) e_i.
/// Throws std::out_of_range if a probe needs a column outside the series range.
double residual_identity(const InverseSeries& series, const ShiftModel& model, std::span<const Index> probes);

/// Largest relative defect of the termwise cancellations
///   forward:  w_i a^{i+1}_{i+l+1} + (d_i - lambda) a^i_{i+l+1} = 0
///   backward: w_{i-l-1} a^i_{i-l-1} + (d_{i-l} - lambda) a^i_{i-l} = 0
/// over all stored columns and offsets.
double telescoping_defect(const InverseSeries& series, const ShiftModel& model);

/// Series length L with rate^L <= target (at least 1).
int length_for_rate(double rate, double target = 1e-8);

/// Picks the admissible direction (smaller radius first), chooses L from the
/// radius and builds. Empty if neither direction is admissible or the build fails.
std::optional<InverseSeries> build_inverse(const ShiftModel& model, cplx lambda, int k_max,
                                           double target = 1e-8, int max_length = 1024);

}  // namespace wshift
