#pragma once

// Exact algebra on growth classes C * rho^n * n^p * (log n)^q of positive
// sequences. Limits and series convergence of the criterion sequences are
// decided from the class fields rather than from finite samples.

#include <optional>
#include <string_view>

namespace terraspec {

struct AsymptoticClass {
    double constant = 1.0;
    double geo_base = 1.0;
    double power = 0.0;
    double log_power = 0.0;

    /// Validating constructor: constant and geo_base must be positive and finite.
    [[nodiscard]] static AsymptoticClass make(double constant, double geo_base, double power,
                                              double log_power);

    /// n^p, the class used for the n^{alpha*chi} factors.
    [[nodiscard]] static AsymptoticClass power_of_n(double p) { return {1.0, 1.0, p, 0.0}; }

    /// C * rho^n * n^p * (log n)^q; requires n >= 2 when q != 0.
    [[nodiscard]] double value(double n) const;
    [[nodiscard]] double log_value(double n) const;

    friend bool operator==(const AsymptoticClass&, const AsymptoticClass&) = default;
};

enum class Limit { zero, finite_nonzero, infinite };
enum class SumVerdict { convergent, divergent, undecided_boundary };

[[nodiscard]] std::string_view to_string(Limit l) noexcept;
[[nodiscard]] std::string_view to_string(SumVerdict v) noexcept;

/// Series verdict. `growth` is the class of the partial sums when divergent and
/// of the tails sum_{k>n} when convergent; empty when undecided.
struct SumClass {
    SumVerdict verdict = SumVerdict::undecided_boundary;
    std::optional<AsymptoticClass> growth;
};

/// Exponents within this distance of an integer boundary are snapped onto it
/// by the decision functions (limit_class, partial_sum). mul stays exact.
inline constexpr double kExponentSnap = 1e-12;

[[nodiscard]] AsymptoticClass mul(const AsymptoticClass& a, const AsymptoticClass& b);
[[nodiscard]] AsymptoticClass reciprocal(const AsymptoticClass& a);
[[nodiscard]] Limit limit_class(const AsymptoticClass& a);
[[nodiscard]] SumClass partial_sum(const AsymptoticClass& a);

}  // namespace terraspec
