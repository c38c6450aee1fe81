#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "terraspec/asymptotics.hpp"
#include "terraspec/common.hpp"
#include "terraspec/rhaly_operator.hpp"
#include "terraspec/sequences.hpp"

namespace terraspec {

enum class SNumberSource { svd_of_section, synthetic, user };
[[nodiscard]] std::string_view to_string(SNumberSource s) noexcept;

/// Non-increasing, non-negative s-number data s_1 >= s_2 >= ... >= 0.
///
/// Without `asym` the sequence is finitely supported: s_j = 0 for j beyond
/// `values`. With `asym`, the class describes the behaviour of s_j past the
/// stored prefix.
struct SNumberSequence {
    std::vector<double> values;
    SNumberSource source = SNumberSource::user;
    std::optional<AsymptoticClass> asym;

    /// Validates ordering and sign. Throws "snumbers-not-monotone".
    [[nodiscard]] static SNumberSequence make(std::vector<double> values, SNumberSource source,
                                              std::optional<AsymptoticClass> asym = std::nullopt);
};

/// Singular values, largest first.
[[nodiscard]] std::vector<double> singular_values(const Eigen::MatrixXd& m);
[[nodiscard]] std::vector<double> singular_values(const Eigen::MatrixXcd& m);

/// s-numbers of the weight-conjugated section D_s A D_r^{-1}.
[[nodiscard]] SNumberSequence snumbers_from_section(const FiniteSection& sec, const WeightSpec& r,
                                                    const WeightSpec& s, Index cap = 512);

/// Does a_i * (s_1 + ... + s_i) * r_i vanish?
[[nodiscard]] Tri stype_membership(const SNumberSequence& snum, const SequenceSpec& a,
                                   const WeightSpec& r, Index n_max = 1 << 16);

enum class TailStatus { negligible, dominant_possible, analytic_zero };
[[nodiscard]] std::string_view to_string(TailStatus t) noexcept;

struct QuasiNormResult {
    double value = 0.0;
    Index argmax_index = 1;  ///< 1-based
    Index truncation_n = 0;
    TailStatus tail_status = TailStatus::dominant_possible;
};

/// max_{i<=N} |a_i * sum_{j<=i} s_j| * r_i over the stored prefix.
[[nodiscard]] QuasiNormResult quasi_norm(const SNumberSequence& snum, const SequenceSpec& a,
                                         const WeightSpec& r);

struct IdealFlags {
    Tri ideal_ok = Tri::inconclusive;   ///< a_n r_n -> 0
    Tri closed_ok = Tri::inconclusive;  ///< n a_n r_n -> 0
    Tri qnorm_normalized = Tri::inconclusive;  ///< sup a_i r_i == 1 (within 1e-9)
    double sup_ar = 0.0;
};

[[nodiscard]] IdealFlags ideal_preconditions(const SequenceSpec& a, const WeightSpec& r,
                                             Index n_max = 1 << 16);

struct AxiomViolations {
    std::int64_t quasi_triangle = 0;
    std::int64_t lower_bound = 0;
    std::int64_t lipschitz = 0;
    std::int64_t composition = 0;
    std::int64_t rank = 0;
    std::int64_t additive = 0;
    std::int64_t multiplicative = 0;
    std::int64_t monotone = 0;

    [[nodiscard]] std::int64_t total() const noexcept {
        return quasi_triangle + lower_bound + lipschitz + composition + rank + additive +
               multiplicative + monotone;
    }
};

struct AxiomReport {
    std::int64_t trials = 0;
    Index dim = 0;
    std::uint64_t seed = 0;
    bool normalized = false;  ///< a, r satisfied sup a_i r_i = 1; lower-bound checks assume it
    AxiomViolations violations;
};

/// Random-matrix trials of the quasi-norm and s-number inequalities. Entries
/// are uniform in [-1, 1]; trial t draws from its own seed (seed, t), so the
/// report is the same for any `jobs`.
[[nodiscard]] AxiomReport check_quasinorm_axioms(std::int64_t trials, Index dim,
                                                 const SequenceSpec& a, const WeightSpec& r,
                                                 std::uint64_t seed, unsigned jobs = 1);

/// Q^(s) of a raw s-value vector, as used by the trials.
[[nodiscard]] double quasi_norm_value(std::span<const double> svals, std::span<const double> ar);

struct InclusionReport {
    std::int64_t checked = 0;
    std::int64_t t_members = 0;
    std::int64_t r_members_among_t = 0;
    std::int64_t unresolved = 0;
    std::vector<std::int64_t> counterexamples;  ///< sample indices
};

/// For r <= t, every t-member sample must be an r-member.
/// Throws "weights-not-ordered".
[[nodiscard]] InclusionReport inclusion_check(const WeightSpec& r, const WeightSpec& t,
                                              const std::vector<SNumberSequence>& samples,
                                              const SequenceSpec& a, Index n_max = 1 << 16);

/// Does R_a v lie in c0(r)? A finite vector is extended by zeros.
[[nodiscard]] Tri chi_space_membership(std::span<const Complex> v, const SequenceSpec& a,
                                       const WeightSpec& r, Index n_max = 1 << 16);
[[nodiscard]] Tri chi_space_membership(const SequenceSpec& v, const SequenceSpec& a,
                                       const WeightSpec& r, Index n_max = 1 << 16);

}  // namespace terraspec
