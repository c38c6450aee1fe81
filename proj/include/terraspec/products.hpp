#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "terraspec/common.hpp"
#include "terraspec/sequences.hpp"

namespace terraspec {

/// Re(1/lambda). Throws "alpha-undefined-at-zero".
[[nodiscard]] double alpha(Complex lambda);

/// prod_{k=m+1}^{n} (1 - a_k/lambda), kept as log-magnitude plus accumulated argument.
struct LogProduct {
    double log_magnitude = 0.0;
    double argument = 0.0;  ///< sum of principal arguments, not reduced mod 2*pi
    Index m = 0;
    Index n = 0;
    bool exact_zero = false;
    bool near_singular = false;  ///< some a_k within 1e-12 relative of lambda
    Index zero_index = 0;        ///< first k with a_k == lambda when exact_zero

    [[nodiscard]] Complex value() const;
};

[[nodiscard]] LogProduct log_product(const SequenceSpec& a, Complex lambda, Index m, Index n);

enum class BandVerdict { bounded_band, drifting, degenerate };
[[nodiscard]] std::string_view to_string(BandVerdict v) noexcept;

struct BandPoint {
    Index n = 0;
    double ratio = 0.0;      ///< |P_n| * n^{alpha*chi}
    double log_ratio = 0.0;
};

struct BandReport {
    std::vector<BandPoint> ratios;
    double band_min = 0.0;
    double band_max = 0.0;
    double log_log_slope = 0.0;
    double exponent = 0.0;  ///< the alpha*chi (possibly overridden) that was tested
    BandVerdict verdict = BandVerdict::degenerate;
};

struct BandOptions {
    double slope_tolerance = 0.02;
    double band_ratio = 1e3;
    /// Test this exponent instead of alpha*chi (diagnostics, perturbation runs).
    std::optional<double> exponent;
};

/// Checks that |prod_{k<=n}(1 - a_k/lambda)| * n^{alpha*chi} stays in a band
/// over dyadic n in [n_lo, n_hi]. Throws "lambda-in-S" when a factor vanishes.
[[nodiscard]] BandReport ratio_band(const SequenceSpec& a, Complex lambda, double chi, Index n_lo,
                                    Index n_hi, const BandOptions& opts = {});

}  // namespace terraspec
