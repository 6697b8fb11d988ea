#pragma once

// Forward and backward growth rates of the window quotients
//
//   R+(lambda) = lim_k [ sup_i |prod_{m=0}^{k-1} w_{i+m}| / |prod_{m=0}^{k} (d_{i+m} - lambda)| ]^{1/k}
//   R-(lambda) = lim_k [ sup_i |prod_{m=0}^{k-1} (d_{i-m} - lambda)| / |prod_{m=0}^{k} w_{i-m}| ]^{1/k}
//
// whose position relative to 1 decides whether lambda lies in the spectrum of
// T = S + D. Values are extended reals: a zero denominator factor makes the
// quotient +inf (and takes precedence over a zero numerator), a zero
// numerator factor makes it 0.

#include <string_view>
#include <vector>

#include "wshift/shift_operator.hpp"

namespace wshift {

enum class RadiusMethod {
    closed_form_constant,
    closed_form_periodic,
    truncated_slope,
    truncated_root,
    degenerate,  // R- of a non-invertible shift
};

std::string_view to_string(RadiusMethod m);

struct RadiusEstimate {
    double value = 0.0;
    int k_used = 0;  // 0 for closed forms
    RadiusMethod method = RadiusMethod::truncated_slope;
    double uncertainty = 0.0;
};

struct RadiusOptions {
    bool allow_closed_form = true;
};

/// Precomputes the lambda-independent data of a 1-shift model so that R+ and R-
/// can be evaluated at many points. Immutable; safe to share across threads.
class RadiusEvaluator {
public:
    RadiusEvaluator(const ShiftModel& model, int k_max, RadiusOptions options = {});

    RadiusEstimate r_plus(cplx lambda) const;
    RadiusEstimate r_minus(cplx lambda) const;

    /// s_k = max over window starts of the log window quotient, k = 1..k_max
    /// (index 0 unused). Forward quotient of R+, backward quotient of R-.
    std::vector<double> forward_log_maxima(cplx lambda) const;
    std::vector<double> backward_log_maxima(cplx lambda) const;

    int k_max() const { return k_max_; }
    bool invertible() const { return invertible_; }
    bool uses_closed_form() const { return closed_form_; }

private:
    std::vector<double> log_maxima(cplx lambda, bool forward, int k_lo) const;
    RadiusEstimate truncated(const std::vector<double>& s) const;

    int k_max_;
    bool invertible_;
    bool closed_form_ = false;
    Index period_ = 1;
    std::vector<cplx> period_weights_;
    std::vector<cplx> period_diagonals_;
    double period_log_weights_ = 0.0;
    bool period_weight_zero_ = false;

    Index starts_ = 0;
    std::vector<cplx> weights_;    // w over [a, b + k_max + 1]
    std::vector<cplx> diagonals_;  // d over the same block
    LogModulusPrefix weight_prefix_;
};

/// Requires k_max >= 8 and step 1.
RadiusEstimate r_plus(const ShiftModel& model, cplx lambda, int k_max);
RadiusEstimate r_minus(const ShiftModel& model, cplx lambda, int k_max);

struct OriginCheck {
    RadiusEstimate r_plus;
    RadiusEstimate r_minus;
    bool consistent = false;  // R+(0) <= 1 + tol or R-(0) <= 1 + tol
};

/// Radii at lambda = 0. An invertible T must satisfy at least one of
/// R+(0) <= 1, R-(0) <= 1.
OriginCheck origin_check(const ShiftModel& model, int k_max, double tol = 1e-6);

}  // namespace wshift
