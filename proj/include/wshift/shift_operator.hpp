#pragma once

#include "wshift/sequence.hpp"

namespace wshift {

/// T = S_n + D with S_n e_i = w_i e_{i+n} and D e_i = d_i e_i.
///
/// All sequence kinds are bounded, so S_n is always bounded; the sup/inf of
/// the weights are exact extrema over the finite description.
class ShiftModel {
public:
    ShiftModel(SequenceSpec weights, SequenceSpec diagonals, int step = 1);

    const SequenceSpec& weights() const { return weights_; }
    const SequenceSpec& diagonals() const { return diagonals_; }
    int step() const { return step_; }

    double weight_sup() const { return weight_sup_; }
    double weight_inf() const { return weight_inf_; }
    double diag_sup() const { return diag_sup_; }

    bool shift_invertible() const { return weight_inf_ > 0.0; }

    /// Joint layout of weights and diagonals.
    SequenceLayout layout() const;

    /// The 1-shift acting on span{e_{j + i n} : i in Z}.
    ShiftModel residue_model(int residue) const;

private:
    SequenceSpec weights_;
    SequenceSpec diagonals_;
    int step_;
    double weight_sup_;
    double weight_inf_;
    double diag_sup_;
};

/// ||S^k|| = sup_i |w_i w_{i+1} ... w_{i+k-1}|, exact via the fundamental window.
double norm_power(const ShiftModel& model, int k);

/// inf_i |w_i ... w_{i+k-1}|, so that ||S^{-k}|| = 1 / inf_power(k).
double inf_power(const ShiftModel& model, int k);

inline bool shift_invertible(const ShiftModel& model) { return model.shift_invertible(); }

/// Same model with weights replaced by their moduli.
ShiftModel normalize_phases(const ShiftModel& model);

struct RadiusBounds {
    double outer_upper = 0.0;     // min_k ||S^k||^{1/k} >= r(S)
    double outer_estimate = 0.0;  // ||S^{k_max}||^{1/k_max}
    double inner_lower = 0.0;     // max_k (inf_power(k))^{1/k} <= 1/r(S^{-1}); 0 if S is not invertible
    double inner_estimate = 0.0;  // inf_power(k_max)^{1/k_max}
};

/// Spectral radius of S and of S^{-1} (as the inner radius 1/r(S^{-1})) for
/// a pure shift. Throws std::invalid_argument if the diagonal is not zero or
/// the step is not 1.
RadiusBounds spectral_radius_bounds(const ShiftModel& model, int k_max);

}  // namespace wshift
