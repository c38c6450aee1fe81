#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "terraspec/common.hpp"
#include "terraspec/rhaly_operator.hpp"
#include "terraspec/sequences.hpp"

namespace terraspec {

enum class DiskPosition { interior, boundary, exterior };
[[nodiscard]] std::string_view to_string(DiskPosition d) noexcept;

struct DiskResult {
    DiskPosition position = DiskPosition::boundary;
    bool at_zero = false;         ///< lambda == 0, which sits on the circle
    bool tests_disagreed = false;  ///< geometric and alpha-based tests differed
};

/// Position of lambda relative to the disk |z - chi/2| <= chi/2. The
/// geometric test and the sign of Re(1/lambda) - 1/chi are both evaluated
/// with relative tolerance `tol`; any disagreement reports the boundary.
[[nodiscard]] DiskResult disk_position(Complex lambda, double chi, double tol = 1e-12);

struct DistanceToS {
    double distance = 0.0;
    std::optional<Index> nearest;  ///< empty when the accumulation point 0 is nearest
};

/// The diagonal set S = {a_k : k <= n_max}, sorted for fast lookups.
class DiagonalSet {
public:
    DiagonalSet(const SequenceSpec& a, Index n_max);

    /// First index k with |a_k - lambda| <= snap * max(1, |lambda|).
    [[nodiscard]] std::optional<Index> find(Complex lambda, double snap) const;
    /// Distance to {a_k : k <= n_max} union {0}.
    [[nodiscard]] DistanceToS distance(Complex lambda) const;
    /// True when lambda is a positive real below every scanned a_k, so that
    /// membership in S cannot be settled by the scan.
    [[nodiscard]] bool beyond_scan(Complex lambda, double snap) const;

    [[nodiscard]] Index size() const noexcept { return n_max_; }
    [[nodiscard]] double value(Index k) const { return values_[static_cast<std::size_t>(k - 1)]; }

private:
    Index n_max_;
    std::vector<double> values_;                  // by index
    std::vector<std::pair<double, Index>> sorted_;  // (value, index) ascending
};

[[nodiscard]] DistanceToS dist_to_S(Complex lambda, const SequenceSpec& a, Index n_max);

struct SpectrumOptions {
    Index n_max = 100000;        ///< scan length for S and numeric fallbacks
    double snap = 1e-13;         ///< S-membership snap tolerance
    double near_s = 0.1;         ///< d_lambda below this suppresses verification claims
    double disk_tolerance = 1e-12;
};

struct PointTestResult {
    Tri member = Tri::inconclusive;
    Tri in_s = Tri::no;
    std::optional<Index> index;
    double exponent = 0.0;  ///< alpha * chi
    Method method = Method::analytic;
    bool shortcut = false;  ///< decided by the lambda > chi inclusion
    std::string diagnostic;
};

/// Membership in the point spectrum on c0(s): lambda must equal some a_m and
/// a_n s_n n^{alpha chi} must vanish.
[[nodiscard]] PointTestResult point_spectrum_test(Complex lambda, const SequenceSpec& a,
                                                  const WeightSpec& s, double chi,
                                                  const SpectrumOptions& opts = {});

/// Eigenvector of the N-section for lambda = a_m (first match): zeros before m,
/// x_m = 1, then x_n = (a_n/a_m) / prod_{j=m+1}^{n} (1 - a_j/lambda).
[[nodiscard]] std::vector<Complex> eigenvector(Complex lambda, const SequenceSpec& a, Index N,
                                               double snap = 1e-13);

/// Adjoint eigenvector x_n = prod_{j<n} (1 - a_j/lambda), x_1 = 1.
[[nodiscard]] std::vector<Complex> adjoint_eigvector(Complex lambda, const SequenceSpec& a,
                                                     Index N);

struct AdjointTestResult {
    Tri member = Tri::inconclusive;
    Method method = Method::analytic;
    std::string diagnostic;
};

/// Membership in the point spectrum of the adjoint on c0(s)*.
[[nodiscard]] AdjointTestResult adjoint_point_test(Complex lambda, const SequenceSpec& a,
                                                   const WeightSpec& s, double chi,
                                                   const SpectrumOptions& opts = {});

enum class SpectralLabel { resolvent, point, residual, continuous_candidate, boundary_unknown };
[[nodiscard]] std::string_view to_string(SpectralLabel l) noexcept;

struct SpectralEvidence {
    std::optional<double> alpha;  ///< Re(1/lambda); empty at 0
    std::optional<double> alpha_chi;
    DiskResult disk;
    Tri in_s = Tri::no;
    std::optional<Index> s_index;
    DistanceToS dist;
    Tri a1 = Tri::no;
    Tri a2 = Tri::no;
    std::string limit_diag;
    std::string series_diag;
    std::string error;
};

struct SpectralPoint {
    Complex lambda;
    SpectralLabel label = SpectralLabel::boundary_unknown;
    SpectralEvidence evidence;
};

/// Everything classify_point needs that does not depend on lambda. Building it
/// validates the standing hypotheses once; reuse it across many points.
class SpectrumContext {
public:
    SpectrumContext(SequenceSpec a, WeightSpec s, double chi, SpectrumOptions opts = {});

    [[nodiscard]] SpectralPoint classify(Complex lambda) const;

    [[nodiscard]] const SequenceSpec& a() const noexcept { return a_; }
    [[nodiscard]] const WeightSpec& s() const noexcept { return s_; }
    [[nodiscard]] double chi() const noexcept { return chi_; }
    [[nodiscard]] bool s_decreasing() const noexcept { return s_decreasing_; }
    [[nodiscard]] const DiagonalSet& diagonal() const noexcept { return diag_; }
    [[nodiscard]] const SpectrumOptions& options() const noexcept { return opts_; }

    [[nodiscard]] PointTestResult point_test(Complex lambda) const;
    [[nodiscard]] AdjointTestResult adjoint_test(Complex lambda) const;

private:
    SequenceSpec a_;
    WeightSpec s_;
    double chi_;
    SpectrumOptions opts_;
    DiagonalSet diag_;
    bool s_decreasing_ = false;
};

/// Classifies lambda against the fine-spectrum partition. Throws when s is
/// unbounded or the operator is not bounded on c0(s).
[[nodiscard]] SpectralPoint classify_point(Complex lambda, const SequenceSpec& a,
                                           const WeightSpec& s, double chi,
                                           const SpectrumOptions& opts = {});

/// (R_N - lambda I)^{-1} from the closed-form entries. Throws "lambda-in-S"
/// or "resolvent-undefined-at-zero".
[[nodiscard]] FiniteSection resolvent_section(Complex lambda, const SequenceSpec& a, Index N);

struct ResolventCheck {
    double left_residual = 0.0;   ///< max |((R - lambda I) B - I)_{ij}|
    double right_residual = 0.0;  ///< max |(B (R - lambda I) - I)_{ij}|
    double max_residual = 0.0;
    double d_lambda = 0.0;
    bool claimed = true;  ///< false when lambda is too close to S-bar to vouch for
    bool pass = false;
};

[[nodiscard]] ResolventCheck verify_resolvent(Complex lambda, const SequenceSpec& a, Index N,
                                              double tol, const SpectrumOptions& opts = {});

struct GridSpec {
    double re_lo = 0.0, re_hi = 0.0;
    double im_lo = 0.0, im_hi = 0.0;
    Index re_steps = 2;  ///< nodes along the real axis
    Index im_steps = 2;

    /// Nodes in row-major order: imaginary index outer, real index inner.
    [[nodiscard]] std::vector<Complex> nodes() const;
};

[[nodiscard]] std::vector<SpectralPoint> spectrum_grid(const SpectrumContext& ctx,
                                                       const GridSpec& grid, unsigned jobs = 1);

struct PseudoNode {
    Complex lambda;
    double sigma_min = 0.0;
    std::vector<bool> within;  ///< sigma_min <= eps_j for each requested eps
};

/// Smallest singular value of (sec - lambda I) on every grid node.
/// Throws "section-too-large" above `cap`.
[[nodiscard]] std::vector<PseudoNode> pseudospectrum_grid(const FiniteSection& sec,
                                                          const GridSpec& grid,
                                                          const std::vector<double>& epsilons,
                                                          unsigned jobs = 1, Index cap = 512);

}  // namespace terraspec
