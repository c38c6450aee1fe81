#include "terraspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "terraspec/parallel.hpp"
#include "terraspec/products.hpp"

namespace terraspec {

namespace {

constexpr double kTrend = 0.05;
constexpr double kSettled = 0.02;

// Running complex product kept as mantissa * 2^exponent, so long products
// neither overflow nor underflow while each step rounds like a plain multiply.
class ScaledProduct {
public:
    void multiply(Complex f) {
        mant_ *= f;
        const double m = std::max(std::abs(mant_.real()), std::abs(mant_.imag()));
        if (m == 0.0 || !std::isfinite(m)) return;
        int e = 0;
        std::frexp(m, &e);
        mant_ = {std::ldexp(mant_.real(), -e), std::ldexp(mant_.imag(), -e)};
        exp2_ += e;
    }

    [[nodiscard]] bool is_zero() const noexcept { return mant_ == Complex{}; }

    /// num * 2^{-exp2} / mantissa, i.e. num / product.
    [[nodiscard]] Complex divide(Complex num) const {
        const Complex q = num / mant_;
        return {std::ldexp(q.real(), -exp2_), std::ldexp(q.imag(), -exp2_)};
    }

    /// num * product.
    [[nodiscard]] Complex times(Complex num) const {
        const Complex q = num * mant_;
        return {std::ldexp(q.real(), exp2_), std::ldexp(q.imag(), exp2_)};
    }

private:
    Complex mant_{1.0, 0.0};
    int exp2_ = 0;
};

Index table_cap(const SequenceSpec& seq, Index n) {
    if (auto mx = seq.max_index()) return std::min(n, *mx);
    return n;
}

double trailing_slope(const std::vector<double>& log_n, const std::vector<double>& log_v) {
    const std::size_t m = std::min<std::size_t>(4, log_n.size());
    std::vector<double> xs(log_n.end() - static_cast<std::ptrdiff_t>(m), log_n.end());
    std::vector<double> ys(log_v.end() - static_cast<std::ptrdiff_t>(m), log_v.end());
    return ls_slope(xs, ys);
}

}  // namespace

std::string_view to_string(DiskPosition d) noexcept {
    switch (d) {
        case DiskPosition::interior: return "interior";
        case DiskPosition::boundary: return "boundary";
        case DiskPosition::exterior: return "exterior";
    }
    return "boundary";
}

std::string_view to_string(SpectralLabel l) noexcept {
    switch (l) {
        case SpectralLabel::resolvent: return "resolvent";
        case SpectralLabel::point: return "point";
        case SpectralLabel::residual: return "residual";
        case SpectralLabel::continuous_candidate: return "continuous_candidate";
        case SpectralLabel::boundary_unknown: return "boundary_unknown";
    }
    return "boundary_unknown";
}

DiskResult disk_position(Complex lambda, double chi, double tol) {
    if (!(chi > 0.0)) throw Error("chi-zero", "disk needs chi > 0");
    DiskResult res;
    if (lambda == Complex{}) {
        res.at_zero = true;
        res.position = DiskPosition::boundary;
        return res;
    }
    const double radius = chi / 2.0;
    const double dist = std::abs(lambda - radius);
    DiskPosition geometric = DiskPosition::boundary;
    if (dist < radius * (1.0 - tol)) geometric = DiskPosition::interior;
    if (dist > radius * (1.0 + tol)) geometric = DiskPosition::exterior;

    const double ac = alpha(lambda) * chi;
    DiskPosition by_alpha = DiskPosition::boundary;
    if (ac > 1.0 + tol) by_alpha = DiskPosition::interior;
    if (ac < 1.0 - tol) by_alpha = DiskPosition::exterior;

    if (geometric == by_alpha) {
        res.position = geometric;
    } else {
        res.position = DiskPosition::boundary;
        res.tests_disagreed = true;
    }
    return res;
}

DiagonalSet::DiagonalSet(const SequenceSpec& a, Index n_max) : n_max_(table_cap(a, n_max)) {
    if (n_max_ < 1) throw Error("invalid-window", "n_max must be >= 1");
    values_.reserve(static_cast<std::size_t>(n_max_));
    sorted_.reserve(static_cast<std::size_t>(n_max_));
    for (Index k = 1; k <= n_max_; ++k) {
        const double v = a.eval(k);
        values_.push_back(v);
        sorted_.emplace_back(v, k);
    }
    std::sort(sorted_.begin(), sorted_.end());
}

std::optional<Index> DiagonalSet::find(Complex lambda, double snap) const {
    const double tol = snap * std::max(1.0, std::abs(lambda));
    if (std::abs(lambda.imag()) > tol) return std::nullopt;
    const double re = lambda.real();
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(),
                               std::make_pair(re - tol, Index{0}));
    std::optional<Index> best;
    for (; it != sorted_.end() && it->first <= re + tol; ++it) {
        if (!best || it->second < *best) best = it->second;
    }
    return best;
}

DistanceToS DiagonalSet::distance(Complex lambda) const {
    DistanceToS out{std::abs(lambda), std::nullopt};
    const double re = lambda.real();
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), std::make_pair(re, Index{0}));
    auto consider = [&](std::vector<std::pair<double, Index>>::const_iterator c) {
        // first index among equal values
        auto first = std::lower_bound(sorted_.begin(), sorted_.end(),
                                      std::make_pair(c->first, Index{0}));
        const double d = std::abs(lambda - first->first);
        if (d < out.distance || (d == out.distance && out.nearest && first->second < *out.nearest)) {
            out.distance = d;
            out.nearest = first->second;
        }
    };
    if (it != sorted_.end()) consider(it);
    if (it != sorted_.begin()) consider(std::prev(it));
    return out;
}

bool DiagonalSet::beyond_scan(Complex lambda, double snap) const {
    const double tol = snap * std::max(1.0, std::abs(lambda));
    if (std::abs(lambda.imag()) > tol) return false;
    return lambda.real() > 0.0 && lambda.real() < sorted_.front().first - tol;
}

DistanceToS dist_to_S(Complex lambda, const SequenceSpec& a, Index n_max) {
    return DiagonalSet(a, n_max).distance(lambda);
}

// ---------------------------------------------------------------------------

SpectrumContext::SpectrumContext(SequenceSpec a, WeightSpec s, double chi, SpectrumOptions opts)
    : a_(std::move(a)), s_(std::move(s)), chi_(chi), opts_(opts), diag_(a_, opts.n_max) {
    if (!(chi_ > 0.0) || !std::isfinite(chi_)) throw Error("chi-zero", "chi must be positive");
    const Index scan = table_cap(s_, std::min<Index>(opts_.n_max, 1 << 16));
    const WeightFlags flags = verify_weight(s_, std::max<Index>(scan, 2));
    if (!flags.bounded) throw Error("weight-unbounded", "spectral results need a bounded weight s");
    s_decreasing_ = flags.decreasing;

    BoundednessOptions bopts;
    bopts.n_max = std::min<Index>(opts_.n_max, 1 << 14);
    if (classify_boundedness(a_, s_, s_, bopts).bounded == Tri::no) {
        throw Error("operator-unbounded", "the operator is not bounded on c0(s)");
    }
}

PointTestResult SpectrumContext::point_test(Complex lambda) const {
    PointTestResult res;
    if (lambda == Complex{}) {
        res.member = Tri::no;
        res.diagnostic = "0 is not a diagonal value";
        return res;
    }
    res.index = diag_.find(lambda, opts_.snap);
    if (!res.index) {
        if (diag_.beyond_scan(lambda, opts_.snap)) {
            res.in_s = Tri::inconclusive;
            res.member = Tri::inconclusive;
            res.diagnostic = "below the scanned diagonal values";
        } else {
            res.member = Tri::no;
            res.diagnostic = "not in S";
        }
        return res;
    }
    res.in_s = Tri::yes;
    const double am = diag_.value(*res.index);
    res.exponent = chi_ / am;

    if (am > chi_) {
        res.member = Tri::yes;
        res.shortcut = true;
        res.diagnostic = "lambda > chi";
        return res;
    }
    if (a_.asym() && s_.asym()) {
        const AsymptoticClass term =
            mul(mul(*a_.asym(), *s_.asym()), AsymptoticClass::power_of_n(res.exponent));
        const Limit lim = limit_class(term);
        res.member = to_tri(lim == Limit::zero);
        res.method = Method::analytic;
        res.diagnostic = "a_n s_n n^(alpha chi) -> " + std::string(to_string(lim));
        return res;
    }

    res.method = Method::numeric;
    std::vector<double> ln, lv;
    for (Index n : dyadic_probes(8, table_cap(s_, table_cap(a_, opts_.n_max)))) {
        ln.push_back(std::log(static_cast<double>(n)));
        lv.push_back(a_.log_eval(n) + s_.log_eval(n) + res.exponent * ln.back());
    }
    const double slope = ln.size() >= 3 ? trailing_slope(ln, lv) : 0.0;
    if (ln.size() < 3) {
        res.member = Tri::inconclusive;
    } else if (slope < -kTrend) {
        res.member = Tri::yes;
    } else if (slope > -kSettled) {
        res.member = Tri::no;
    } else {
        res.member = Tri::inconclusive;
    }
    res.diagnostic = "numeric log-log slope " + std::to_string(slope);
    return res;
}

AdjointTestResult SpectrumContext::adjoint_test(Complex lambda) const {
    AdjointTestResult res;
    if (lambda == Complex{}) {
        res.member = Tri::no;
        res.diagnostic = "0 is never an adjoint eigenvalue";
        return res;
    }
    if (diag_.find(lambda, opts_.snap)) {
        res.member = Tri::yes;
        res.diagnostic = "lambda in S";
        return res;
    }
    if (diag_.beyond_scan(lambda, opts_.snap)) {
        res.member = Tri::inconclusive;
        res.diagnostic = "below the scanned diagonal values";
        return res;
    }
    const DiskResult disk = disk_position(lambda, chi_, opts_.disk_tolerance);
    if (disk.position != DiskPosition::interior) {
        res.member = Tri::no;
        res.diagnostic = "outside the open disk";
        return res;
    }

    const double ac = alpha(lambda) * chi_;
    if (s_.asym()) {
        const AsymptoticClass term = mul(reciprocal(*s_.asym()), AsymptoticClass::power_of_n(-ac));
        const SumClass sum = partial_sum(term);
        if (sum.verdict != SumVerdict::undecided_boundary) {
            res.member = to_tri(sum.verdict == SumVerdict::convergent);
            res.diagnostic = "sum 1/(s_n n^(alpha chi)) " + std::string(to_string(sum.verdict));
            return res;
        }
    }

    // Dyadic block sums: geometric decay means convergence.
    res.method = Method::numeric;
    const Index n_max = table_cap(s_, opts_.n_max);
    std::vector<double> blocks;
    for (Index lo = 1; 2 * lo - 1 <= n_max; lo *= 2) {
        CompensatedSum<double> acc;
        for (Index n = lo; n < 2 * lo; ++n) {
            acc.add(std::exp(-s_.log_eval(n) - ac * std::log(static_cast<double>(n))));
        }
        blocks.push_back(acc.value());
    }
    if (blocks.size() < 4) {
        res.member = Tri::inconclusive;
        res.diagnostic = "too few dyadic blocks";
        return res;
    }
    bool shrinking = true, holding = true;
    for (std::size_t i = blocks.size() - 3; i < blocks.size(); ++i) {
        const double ratio = blocks[i] / blocks[i - 1];
        shrinking = shrinking && ratio < 0.9;
        holding = holding && ratio >= 0.99;
    }
    res.member = shrinking ? Tri::yes : (holding ? Tri::no : Tri::inconclusive);
    res.diagnostic = "numeric dyadic block sums";
    return res;
}

SpectralPoint SpectrumContext::classify(Complex lambda) const {
    SpectralPoint pt;
    pt.lambda = lambda;
    auto& ev = pt.evidence;
    ev.dist = diag_.distance(lambda);
    ev.disk = disk_position(lambda, chi_, opts_.disk_tolerance);

    if (lambda == Complex{}) {
        pt.label = SpectralLabel::continuous_candidate;
        ev.limit_diag = "0 lies in the continuous spectrum";
        return pt;
    }
    ev.alpha = alpha(lambda);
    ev.alpha_chi = *ev.alpha * chi_;

    const PointTestResult pt_res = point_test(lambda);
    ev.in_s = pt_res.in_s;
    ev.s_index = pt_res.index;
    ev.limit_diag = pt_res.diagnostic;

    if (pt_res.in_s == Tri::inconclusive) {
        ev.a1 = Tri::inconclusive;
        ev.a2 = Tri::inconclusive;
        pt.label = SpectralLabel::boundary_unknown;
        return pt;
    }
    if (pt_res.in_s == Tri::yes) {
        ev.a1 = pt_res.member;
        ev.a2 = Tri::no;  // A2 excludes S
        ev.series_diag = "lambda in S";
        switch (pt_res.member) {
            case Tri::yes: pt.label = SpectralLabel::point; break;
            case Tri::no: pt.label = SpectralLabel::residual; break;
            case Tri::inconclusive: pt.label = SpectralLabel::boundary_unknown; break;
        }
        return pt;
    }

    ev.a1 = Tri::no;
    const AdjointTestResult adj = adjoint_test(lambda);
    ev.a2 = adj.member;
    ev.series_diag = adj.diagnostic;
    if (adj.member == Tri::yes) {
        pt.label = SpectralLabel::residual;
    } else if (adj.member == Tri::inconclusive) {
        pt.label = SpectralLabel::boundary_unknown;
    } else {
        switch (ev.disk.position) {
            case DiskPosition::exterior:
                pt.label = s_decreasing_ ? SpectralLabel::resolvent : SpectralLabel::boundary_unknown;
                if (!s_decreasing_) ev.error = "s not decreasing: exterior rule suppressed";
                break;
            case DiskPosition::boundary: pt.label = SpectralLabel::boundary_unknown; break;
            case DiskPosition::interior: pt.label = SpectralLabel::continuous_candidate; break;
        }
    }
    return pt;
}

PointTestResult point_spectrum_test(Complex lambda, const SequenceSpec& a, const WeightSpec& s,
                                    double chi, const SpectrumOptions& opts) {
    return SpectrumContext(a, s, chi, opts).point_test(lambda);
}

AdjointTestResult adjoint_point_test(Complex lambda, const SequenceSpec& a, const WeightSpec& s,
                                     double chi, const SpectrumOptions& opts) {
    return SpectrumContext(a, s, chi, opts).adjoint_test(lambda);
}

SpectralPoint classify_point(Complex lambda, const SequenceSpec& a, const WeightSpec& s,
                             double chi, const SpectrumOptions& opts) {
    return SpectrumContext(a, s, chi, opts).classify(lambda);
}

// ---------------------------------------------------------------------------

std::vector<Complex> eigenvector(Complex lambda, const SequenceSpec& a, Index N, double snap) {
    if (N < 1) throw Error("invalid-dimension", "N must be >= 1");
    std::optional<Index> m;
    const double tol = snap * std::max(1.0, std::abs(lambda));
    for (Index k = 1; k <= N && !m; ++k) {
        if (std::abs(lambda - a.eval(k)) <= tol) m = k;
    }
    if (!m) throw Error("not-an-eigencandidate", "lambda is not among a_1..a_N");
    const double am = a.eval(*m);
    const Complex lam{am, 0.0};

    std::vector<Complex> x(static_cast<std::size_t>(N));
    x[static_cast<std::size_t>(*m - 1)] = 1.0;
    ScaledProduct prod;
    for (Index n = *m + 1; n <= N; ++n) {
        const double an = a.eval(n);
        if (std::abs(lam - an) <= tol) {
            throw Error("repeated-diagonal-unsupported",
                        "a_" + std::to_string(n) + " repeats the eigenvalue");
        }
        prod.multiply(1.0 - an / lam);
        x[static_cast<std::size_t>(n - 1)] = prod.divide(Complex{an / am, 0.0});
    }
    return x;
}

std::vector<Complex> adjoint_eigvector(Complex lambda, const SequenceSpec& a, Index N) {
    if (lambda == Complex{}) {
        throw Error("zero-not-adjoint-eigenvalue", "0 is not an eigenvalue of the adjoint");
    }
    if (N < 1) throw Error("invalid-dimension", "N must be >= 1");
    std::vector<Complex> x(static_cast<std::size_t>(N));
    x[0] = 1.0;
    ScaledProduct prod;
    bool zero = false;
    for (Index n = 2; n <= N; ++n) {
        const double prev = a.eval(n - 1);
        if (!zero) {
            if (Complex{prev, 0.0} == lambda) {
                zero = true;
            } else {
                prod.multiply(1.0 - prev / lambda);
            }
        }
        x[static_cast<std::size_t>(n - 1)] = zero ? Complex{} : prod.times(Complex{1.0, 0.0});
    }
    return x;
}

FiniteSection resolvent_section(Complex lambda, const SequenceSpec& a, Index N) {
    if (lambda == Complex{}) throw Error("resolvent-undefined-at-zero", "lambda must be non-zero");
    if (N < 1) throw Error("invalid-dimension", "N must be >= 1");
    std::vector<double> av(static_cast<std::size_t>(N));
    for (Index k = 1; k <= N; ++k) {
        av[static_cast<std::size_t>(k - 1)] = a.eval(k);
        if (Complex{av[static_cast<std::size_t>(k - 1)], 0.0} == lambda) {
            throw Error("lambda-in-S", "a_" + std::to_string(k) + " equals lambda");
        }
    }
    const Complex lam2 = lambda * lambda;
    FiniteSection out(N, SectionKind::resolvent);
    for (Index n = 1; n <= N; ++n) {
        const double an = av[static_cast<std::size_t>(n - 1)];
        out.set(n - 1, n - 1, 1.0 / (an - lambda));
        ScaledProduct prod;  // prod_{j=k}^{n} (1 - a_j/lambda)
        prod.multiply(1.0 - an / lambda);
        for (Index k = n - 1; k >= 1; --k) {
            prod.multiply(1.0 - av[static_cast<std::size_t>(k - 1)] / lambda);
            out.set(n - 1, k - 1, prod.divide(-an / lam2));
        }
    }
    return out;
}

ResolventCheck verify_resolvent(Complex lambda, const SequenceSpec& a, Index N, double tol,
                                const SpectrumOptions& opts) {
    const FiniteSection b = resolvent_section(lambda, a, N);
    Eigen::MatrixXcd shifted = build_section(a, N).dense();
    shifted.diagonal().array() -= lambda;
    const Eigen::MatrixXcd bd = b.dense();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(N, N);

    ResolventCheck chk;
    chk.left_residual = (shifted * bd - id).cwiseAbs().maxCoeff();
    chk.right_residual = (bd * shifted - id).cwiseAbs().maxCoeff();
    chk.max_residual = std::max(chk.left_residual, chk.right_residual);
    chk.d_lambda = dist_to_S(lambda, a, table_cap(a, opts.n_max)).distance;
    chk.claimed = chk.d_lambda >= opts.near_s;
    chk.pass = chk.max_residual <= tol;
    return chk;
}

std::vector<Complex> GridSpec::nodes() const {
    if (re_steps < 2 || im_steps < 2) throw Error("invalid-grid", "grid needs >= 2 nodes per axis");
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(re_steps * im_steps));
    const double dre = (re_hi - re_lo) / static_cast<double>(re_steps - 1);
    const double dim = (im_hi - im_lo) / static_cast<double>(im_steps - 1);
    for (Index j = 0; j < im_steps; ++j) {
        const double im = j == im_steps - 1 ? im_hi : im_lo + static_cast<double>(j) * dim;
        for (Index i = 0; i < re_steps; ++i) {
            const double re = i == re_steps - 1 ? re_hi : re_lo + static_cast<double>(i) * dre;
            out.emplace_back(re, im);
        }
    }
    return out;
}

std::vector<SpectralPoint> spectrum_grid(const SpectrumContext& ctx, const GridSpec& grid,
                                         unsigned jobs) {
    const auto nodes = grid.nodes();
    std::vector<SpectralPoint> out(nodes.size());
    parallel_for(nodes.size(), jobs, [&](std::size_t i) {
        try {
            out[i] = ctx.classify(nodes[i]);
        } catch (const Error& e) {
            out[i].lambda = nodes[i];
            out[i].label = SpectralLabel::boundary_unknown;
            out[i].evidence.error = e.what();
        }
    });
    return out;
}

std::vector<PseudoNode> pseudospectrum_grid(const FiniteSection& sec, const GridSpec& grid,
                                            const std::vector<double>& epsilons, unsigned jobs,
                                            Index cap) {
    if (sec.n() > cap) {
        throw Error("section-too-large",
                    "dimension " + std::to_string(sec.n()) + " exceeds cap " + std::to_string(cap));
    }
    const auto nodes = grid.nodes();
    const Eigen::MatrixXcd base = sec.dense();
    std::vector<PseudoNode> out(nodes.size());
    parallel_for(nodes.size(), jobs, [&](std::size_t i) {
        Eigen::MatrixXcd m = base;
        m.diagonal().array() -= nodes[i];
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
        PseudoNode node;
        node.lambda = nodes[i];
        node.sigma_min = svd.singularValues().minCoeff();
        for (double eps : epsilons) node.within.push_back(node.sigma_min <= eps);
        out[i] = std::move(node);
    });
    return out;
}

}  // namespace terraspec
