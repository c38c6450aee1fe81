#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "terraspec/common.hpp"
#include "terraspec/sequences.hpp"

namespace terraspec {

enum class SectionKind { rhaly, resolvent, general };

/// N x N lower-triangular complex matrix in packed row storage.
/// Indices are 0-based: (i, k) with k <= i holds entry a_{i+1,k+1}.
class FiniteSection {
public:
    FiniteSection(Index n, SectionKind kind);

    [[nodiscard]] Index n() const noexcept { return n_; }
    [[nodiscard]] SectionKind kind() const noexcept { return kind_; }

    /// Entry (i, k); zero above the diagonal.
    [[nodiscard]] Complex operator()(Index i, Index k) const noexcept {
        return k > i ? Complex{} : data_[offset(i) + static_cast<std::size_t>(k)];
    }
    void set(Index i, Index k, Complex v);

    [[nodiscard]] std::span<const Complex> row(Index i) const noexcept {
        return {data_.data() + offset(i), static_cast<std::size_t>(i + 1)};
    }

    [[nodiscard]] Eigen::MatrixXcd dense() const;

    /// Weights (r, s) recorded by conjugate_section.
    [[nodiscard]] const std::optional<std::pair<WeightSpec, WeightSpec>>& weights() const noexcept {
        return weights_;
    }
    void attach_weights(WeightSpec r, WeightSpec s) { weights_.emplace(std::move(r), std::move(s)); }

private:
    [[nodiscard]] static std::size_t offset(Index i) noexcept {
        const auto u = static_cast<std::size_t>(i);
        return u * (u + 1) / 2;
    }

    Index n_;
    SectionKind kind_;
    std::vector<Complex> data_;
    std::optional<std::pair<WeightSpec, WeightSpec>> weights_;
};

/// Leading n x n block of the terraced matrix: row i is a_i up to the diagonal.
[[nodiscard]] FiniteSection build_section(const SequenceSpec& a, Index n);

/// y = sec * x. Throws "dimension-mismatch".
[[nodiscard]] std::vector<Complex> apply(const FiniteSection& sec, std::span<const Complex> x);

/// D_s * sec * D_r^{-1}: entry (i,k) becomes s_i * entry / r_k.
[[nodiscard]] FiniteSection conjugate_section(const FiniteSection& sec, const WeightSpec& r,
                                              const WeightSpec& s);

struct CriterionSample {
    Index n = 0;
    double value = 0.0;      ///< c_n = s_n a_n sum_{k<=n} 1/r_k (inf when not representable)
    double log_value = 0.0;  ///< log c_n, always finite
};

struct CriterionSequence {
    std::vector<CriterionSample> samples;
    bool log_space = false;  ///< switched to log-space accumulation of sum 1/r_k
    bool truncated = false;  ///< some c_n overflowed a double even after the switch
};

/// Samples every n <= min(n_max, dense_limit) and dyadic n beyond, up to n_max.
[[nodiscard]] CriterionSequence criterion_sequence(const SequenceSpec& a, const WeightSpec& r,
                                                   const WeightSpec& s, Index n_max,
                                                   Index dense_limit = 1000);

enum class Method { analytic, numeric };

[[nodiscard]] std::string_view to_string(Method m) noexcept;

struct BoundednessReport {
    std::vector<CriterionSample> criterion_samples;
    double sup_estimate = 0.0;
    Tri bounded = Tri::inconclusive;
    Tri compact = Tri::inconclusive;
    std::optional<double> norm;
    /// lim c_n from the composed class when it is finite and non-zero.
    std::optional<double> analytic_limit;
    Method method = Method::numeric;
    double trailing_slope = 0.0;  ///< log-log slope over the last dyadic probes
};

struct BoundednessOptions {
    Index n_max = 1 << 16;
    double slope_tolerance = 0.02;  ///< |slope| below this reads as "settled"
    double drift_threshold = 0.05;  ///< |slope| above this reads as a trend
};

[[nodiscard]] BoundednessReport classify_boundedness(const SequenceSpec& a, const WeightSpec& r,
                                                     const WeightSpec& s,
                                                     const BoundednessOptions& opts = {});

struct NormBounds {
    double lower = 0.0;  ///< sup |a_n|
    double upper = 0.0;  ///< sup n |a_n|
    Index lower_at = 0;
    Index upper_at = 0;
};

/// Two-sided bound on the operator norm on c0(s) for decreasing s.
/// Throws "weight-not-decreasing".
[[nodiscard]] NormBounds operator_norm_bounds(const SequenceSpec& a, const WeightSpec& s,
                                              Index n_max);

enum class MatrixVerdict { pass, fail, inconclusive };
[[nodiscard]] std::string_view to_string(MatrixVerdict v) noexcept;

struct MatrixTestResult {
    MatrixVerdict verdict = MatrixVerdict::inconclusive;
    double row_sup = 0.0;      ///< sup over probes of s_n sum_k |a_nk| / r_k
    double row_slope = 0.0;    ///< trailing log-log slope of the weighted row sums
    bool columns_decay = false;
    double worst_column_tail = 0.0;  ///< largest s_n |a_nk| at n = n_max over tested k
};

using EntryFn = std::function<Complex(Index, Index)>;

/// Weighted row-sum and column-decay conditions for a general lower-triangular
/// matrix (1-based entry function) to map c0(r) into c0(s).
[[nodiscard]] MatrixTestResult matrix_bounded_test(const EntryFn& entry, const WeightSpec& r,
                                                   const WeightSpec& s, Index n_max);

/// Entry function of the terraced matrix, for matrix_bounded_test.
[[nodiscard]] EntryFn rhaly_entries(const SequenceSpec& a);

}  // namespace terraspec
