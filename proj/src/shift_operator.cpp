#include "wshift/shift_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wshift {

namespace {

struct Extrema {
    double sup = 0.0;
    double inf = std::numeric_limits<double>::infinity();
};

Extrema modulus_extrema(const SequenceSpec& s) {
    Extrema e;
    const auto range = fundamental_window(s, 1);
    for (Index i = range.first; i <= range.last; ++i) {
        const double m = std::abs(s(i));
        e.sup = std::max(e.sup, m);
        e.inf = std::min(e.inf, m);
    }
    return e;
}

// Extremal log-modulus product over windows of length k; -inf encodes a zero.
template <class Pick>
double window_extremum(const SequenceSpec& weights, int k, double init, Pick pick) {
    if (k < 1) throw std::invalid_argument("window length must be >= 1");
    const auto range = fundamental_window(weights, k);
    const auto values = sample(weights, IndexRange{range.first, range.last + k - 1});
    const LogModulusPrefix prefix(values);
    double best = init;
    for (Index s = 0; s < range.size(); ++s) best = pick(best, prefix.window(static_cast<std::size_t>(s), k));
    return best;
}

}  // namespace

ShiftModel::ShiftModel(SequenceSpec weights, SequenceSpec diagonals, int step)
    : weights_(std::move(weights)), diagonals_(std::move(diagonals)), step_(step) {
    if (step_ < 1) throw std::invalid_argument("shift step must be >= 1");
    const auto w = modulus_extrema(weights_);
    weight_sup_ = w.sup;
    weight_inf_ = w.inf;
    diag_sup_ = modulus_extrema(diagonals_).sup;
}

SequenceLayout ShiftModel::layout() const { return combine(weights_.layout(), diagonals_.layout()); }

ShiftModel ShiftModel::residue_model(int residue) const {
    return ShiftModel(weights_.subsample(residue, step_), diagonals_.subsample(residue, step_), 1);
}

double norm_power(const ShiftModel& model, int k) {
    if (model.step() != 1) throw std::invalid_argument("norm_power: apply to each residue submodel of an n-shift");
    const double log_sup = window_extremum(model.weights(), k, -std::numeric_limits<double>::infinity(),
                                           [](double a, double b) { return std::max(a, b); });
    return std::exp(log_sup);
}

double inf_power(const ShiftModel& model, int k) {
    if (model.step() != 1) throw std::invalid_argument("inf_power: apply to each residue submodel of an n-shift");
    const double log_inf = window_extremum(model.weights(), k, std::numeric_limits<double>::infinity(),
                                           [](double a, double b) { return std::min(a, b); });
    return std::exp(log_inf);
}

ShiftModel normalize_phases(const ShiftModel& model) {
    return ShiftModel(model.weights().moduli(), model.diagonals(), model.step());
}

RadiusBounds spectral_radius_bounds(const ShiftModel& model, int k_max) {
    if (model.diag_sup() != 0.0) throw std::invalid_argument("spectral_radius_bounds: diagonals must vanish");
    if (model.step() != 1) throw std::invalid_argument("spectral_radius_bounds: step must be 1");
    if (k_max < 1) throw std::invalid_argument("spectral_radius_bounds: k_max must be >= 1");

    RadiusBounds out;
    out.outer_upper = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= k_max; ++k) {
        const double root = std::pow(norm_power(model, k), 1.0 / k);
        out.outer_upper = std::min(out.outer_upper, root);
        if (k == k_max) out.outer_estimate = root;
        if (model.shift_invertible()) {
            const double inner = std::pow(inf_power(model, k), 1.0 / k);
            out.inner_lower = std::max(out.inner_lower, inner);
            if (k == k_max) out.inner_estimate = inner;
        }
    }
    return out;
}

}  // namespace wshift
