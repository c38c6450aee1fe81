#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "terraspec/asymptotics.hpp"
#include "terraspec/common.hpp"

namespace terraspec {

enum class Family {
    cesaro_scaled,   // chi / n
    p_cesaro,        // n^{-p}
    log_reciprocal,  // 1 / log(n+1)
    power_weight,    // n^{-beta}
    geometric,       // rho0^n
    constant,        // c
    table,           // finite user data, 1-based
    custom,
};

[[nodiscard]] std::string_view to_string(Family f) noexcept;
[[nodiscard]] Family family_from_string(std::string_view name);

/// An immutable positive sequence {x_n}_{n>=1}, used both for the diagonal
/// entries a_n and for weight vectors r_n, s_n. Copies share their storage.
class SequenceSpec {
public:
    using Fn = std::function<double(Index)>;

    static SequenceSpec cesaro_scaled(double chi);
    static SequenceSpec p_cesaro(double p);
    static SequenceSpec log_reciprocal();
    static SequenceSpec power_weight(double beta);
    static SequenceSpec geometric(double rho0);
    static SequenceSpec constant(double c);
    static SequenceSpec table(std::vector<double> values);
    static SequenceSpec custom(Fn fn, std::optional<AsymptoticClass> asym = std::nullopt,
                               std::string label = "custom");

    /// Generic factory keyed by family; params are positional in the order of
    /// the named factories above (table takes the values themselves).
    static SequenceSpec make_family(Family family, std::vector<double> params);

    [[nodiscard]] double eval(Index n) const;
    /// log(eval(n)), computed without forming eval(n) where the family allows,
    /// so geometric weights stay representable far past underflow.
    [[nodiscard]] double log_eval(Index n) const;

    [[nodiscard]] Family family() const noexcept { return family_; }
    [[nodiscard]] const std::vector<double>& params() const noexcept { return params_; }
    [[nodiscard]] const std::optional<AsymptoticClass>& asym() const noexcept { return asym_; }
    /// Largest valid index, present only for the table family.
    [[nodiscard]] std::optional<Index> max_index() const noexcept;
    [[nodiscard]] std::string describe() const;

private:
    SequenceSpec(Family family, std::vector<double> params, std::optional<AsymptoticClass> asym);

    Family family_;
    std::vector<double> params_;
    std::optional<AsymptoticClass> asym_;
    std::shared_ptr<const Fn> fn_;
    std::string label_;
};

using WeightSpec = SequenceSpec;

enum class ChiMethod { analytic, numeric };

struct ChiEstimate {
    double chi = 0.0;
    ChiMethod method = ChiMethod::numeric;
    double residual = 0.0;  ///< max |n a_n - chi| over the probes
};

/// chi = lim n a_n. Analytic when the class is C/n; otherwise probes the
/// window dyadically. Throws "chi-not-convergent" or "chi-zero".
[[nodiscard]] ChiEstimate estimate_chi(const SequenceSpec& a, Index n_lo, Index n_hi);

struct WeightFlags {
    bool bounded = false;
    bool strictly_positive = false;
    bool decreasing = false;  ///< non-strict
    /// inf_k w_k > 0, in which case c0(w) coincides with c0 (informational).
    bool bounded_below = false;
};

/// Throws "weight-not-positive" when some w_n <= 0 for n <= n_max.
[[nodiscard]] WeightFlags verify_weight(const WeightSpec& w, Index n_max);

}  // namespace terraspec
