#pragma once

// Finitely described bi-infinite complex sequences {v_i}, i in Z.
//
// Every supported kind is eventually periodic on both sides (constant tails
// count as period 1), so a supremum over all of Z of any window quantity of
// bounded length is attained on a finite index range, the fundamental window.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace wshift {

using cplx = std::complex<double>;
using Index = std::int64_t;

/// Closed integer interval [first, last].
struct IndexRange {
    Index first = 0;
    Index last = 0;

    Index size() const { return last - first + 1; }
    bool contains(Index i) const { return first <= i && i <= last; }
    bool operator==(const IndexRange&) const = default;
};

enum class SequenceKind { constant, periodic, step, explicit_table, random };

struct ConstantSeq {
    cplx value;
};

/// v_i = values[i mod p] with non-negative remainder.
struct PeriodicSeq {
    std::vector<cplx> values;
};

/// v_i = left for i < 0, right for i >= 0.
struct StepSeq {
    cplx left;
    cplx right;
};

/// v_i = values[i - start] on the table span, constant tails outside.
struct ExplicitSeq {
    Index start = 0;
    std::vector<cplx> values;
    cplx left;
    cplx right;
};

/// Seeded random values on [first, last]; modulus uniform in
/// [modulus_lo, modulus_hi], phase uniform in [0, 2pi) when random_phase.
struct RandomSeq {
    std::uint64_t seed = 0;
    Index first = 0;
    Index last = 0;
    double modulus_lo = 1.0;
    double modulus_hi = 1.0;
    cplx left;
    cplx right;
    bool random_phase = true;
};

/// Where a sequence stops being periodic: values outside `core` repeat with
/// `period` on each side. No core means the sequence is periodic everywhere.
struct SequenceLayout {
    std::optional<IndexRange> core;
    Index period = 1;
};

class SequenceSpec {
public:
    using Payload = std::variant<ConstantSeq, PeriodicSeq, StepSeq, ExplicitSeq, RandomSeq>;

    static SequenceSpec constant(cplx value);
    static SequenceSpec periodic(std::vector<cplx> values);
    static SequenceSpec step(cplx left, cplx right);
    static SequenceSpec explicit_table(Index start, std::vector<cplx> values, cplx left, cplx right);
    static SequenceSpec random(const RandomSeq& params);

    SequenceKind kind() const;
    const Payload& payload() const { return payload_; }

    cplx operator()(Index i) const;

    SequenceLayout layout() const;

    /// Period when the sequence is periodic on all of Z (constant: 1).
    std::optional<Index> global_period() const;

    /// The same kind of sequence with every value replaced by |v_i|
    /// (random sequences are materialized into an explicit table).
    SequenceSpec moduli() const;

    /// Multiplies each stored value by exp(i * phase). `phases` holds one angle
    /// per stored value in storage order, tails last (left, right). Used to
    /// build unitarily equivalent weight sequences.
    SequenceSpec with_phases(std::span<const double> phases) const;

    /// Number of stored values (period entries, table entries plus tails, ...).
    std::size_t stored_count() const;

    /// w'_i = w_{residue + i * step}, the restriction to one residue class.
    SequenceSpec subsample(Index residue, Index step) const;

private:
    explicit SequenceSpec(Payload p);

    Payload payload_;
    std::vector<cplx> random_values_;  // materialized once for RandomSeq
};

inline cplx eval(const SequenceSpec& spec, Index i) { return spec(i); }

/// Joint layout of several sequences: hull of the cores, lcm of the periods.
SequenceLayout combine(const SequenceLayout& a, const SequenceLayout& b);

/// Start indices that reach every distinct window of length <= max_len.
IndexRange fundamental_window(const SequenceLayout& layout, Index max_len);
IndexRange fundamental_window(const SequenceSpec& spec, Index max_len);

/// Prefix sums of log|v_i - shift| over a contiguous block of values.
///
/// Zeros are tracked separately so that window queries keep the extended-real
/// semantics: a window containing a zero has log-product -inf.
class LogModulusPrefix {
public:
    LogModulusPrefix() = default;
    LogModulusPrefix(std::span<const cplx> values, cplx shift = {});

    /// P[j] = sum_{t<j} log|v_t - shift|, -inf once a zero has been seen.
    double operator[](std::size_t j) const;

    /// log prod_{t=j}^{j+len-1} |v_t - shift|.
    double window(std::size_t j, std::size_t len) const;
    bool window_has_zero(std::size_t j, std::size_t len) const {
        return zeros_[j + len] != zeros_[j];
    }
    double window_finite(std::size_t j, std::size_t len) const { return sums_[j + len] - sums_[j]; }

    std::size_t size() const { return sums_.size(); }

private:
    std::vector<double> sums_;
    std::vector<std::uint32_t> zeros_;
};

/// Values v_a..v_b of a sequence.
std::vector<cplx> sample(const SequenceSpec& spec, IndexRange range);

/// Extended-real prefix array P with P[j] = sum_{i=a}^{a+j-1} log|v_i|.
std::vector<double> log_modulus_prefix(const SequenceSpec& spec, IndexRange range);

}  // namespace wshift
