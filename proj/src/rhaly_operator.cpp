#include "terraspec/rhaly_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace terraspec {

namespace {

// Sums of 1/r_k beyond this switch to log-space accumulation.
constexpr double kLinearSumCeiling = 1e300;
// Samples are dense up to here, dyadic beyond.

double log_add(double x, double y) {
    if (x < y) std::swap(x, y);
    if (y == -std::numeric_limits<double>::infinity()) return x;
    return x + std::log1p(std::exp(y - x));
}

Index clip_to_tables(Index n_max, std::initializer_list<const SequenceSpec*> seqs) {
    for (const auto* s : seqs) {
        if (auto mx = s->max_index()) n_max = std::min(n_max, *mx);
    }
    return n_max;
}

// Slope of log y vs log n over the last `count` probes.
double trailing_slope(const std::vector<Index>& ns, const std::vector<double>& log_ys,
                      std::size_t count = 4) {
    const std::size_t m = std::min(count, ns.size());
    std::vector<double> xs, ys;
    for (std::size_t i = ns.size() - m; i < ns.size(); ++i) {
        xs.push_back(std::log(static_cast<double>(ns[i])));
        ys.push_back(log_ys[i]);
    }
    return ls_slope(xs, ys);
}

}  // namespace

FiniteSection::FiniteSection(Index n, SectionKind kind) : n_(n), kind_(kind) {
    if (n < 1) throw Error("invalid-dimension", "section dimension must be >= 1");
    data_.assign(offset(n), Complex{});
}

void FiniteSection::set(Index i, Index k, Complex v) {
    if (i < 0 || i >= n_ || k < 0 || k > i) {
        throw Error("index-out-of-range", "entry outside the lower triangle");
    }
    data_[offset(i) + static_cast<std::size_t>(k)] = v;
}

Eigen::MatrixXcd FiniteSection::dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n_, n_);
    for (Index i = 0; i < n_; ++i) {
        for (Index k = 0; k <= i; ++k) m(i, k) = (*this)(i, k);
    }
    return m;
}

FiniteSection build_section(const SequenceSpec& a, Index n) {
    FiniteSection sec(n, SectionKind::rhaly);
    for (Index i = 0; i < n; ++i) {
        const Complex ai{a.eval(i + 1), 0.0};
        for (Index k = 0; k <= i; ++k) sec.set(i, k, ai);
    }
    return sec;
}

std::vector<Complex> apply(const FiniteSection& sec, std::span<const Complex> x) {
    if (static_cast<Index>(x.size()) != sec.n()) {
        throw Error("dimension-mismatch", "vector length " + std::to_string(x.size()) +
                                              " vs section " + std::to_string(sec.n()));
    }
    std::vector<Complex> y(x.size());
    for (Index i = 0; i < sec.n(); ++i) {
        CompensatedSum<Complex> acc;
        const auto row = sec.row(i);
        for (std::size_t k = 0; k < row.size(); ++k) acc.add(row[k] * x[k]);
        y[static_cast<std::size_t>(i)] = acc.value();
    }
    return y;
}

FiniteSection conjugate_section(const FiniteSection& sec, const WeightSpec& r,
                                const WeightSpec& s) {
    const Index n = sec.n();
    std::vector<double> rv(static_cast<std::size_t>(n)), sv(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        rv[static_cast<std::size_t>(i)] = r.eval(i + 1);
        sv[static_cast<std::size_t>(i)] = s.eval(i + 1);
        if (!(rv[static_cast<std::size_t>(i)] > 0.0) || !(sv[static_cast<std::size_t>(i)] > 0.0)) {
            throw Error("weight-not-positive", "weights must be strictly positive on 1..n");
        }
    }
    FiniteSection out(n, sec.kind());
    for (Index i = 0; i < n; ++i) {
        const double si = sv[static_cast<std::size_t>(i)];
        for (Index k = 0; k <= i; ++k) {
            out.set(i, k, si * sec(i, k) / rv[static_cast<std::size_t>(k)]);
        }
    }
    out.attach_weights(r, s);
    return out;
}

CriterionSequence criterion_sequence(const SequenceSpec& a, const WeightSpec& r,
                                     const WeightSpec& s, Index n_max, Index dense_limit) {
    if (n_max < 1) throw Error("invalid-window", "n_max must be >= 1");
    CriterionSequence out;
    CompensatedSum<double> linear;
    double log_sum = -std::numeric_limits<double>::infinity();
    Index next_dyadic = 2 * std::max<Index>(dense_limit, 1);

    for (Index n = 1; n <= n_max; ++n) {
        const double log_inv_r = -r.log_eval(n);
        if (!out.log_space) {
            const double inv_r = std::exp(log_inv_r);
            if (std::isfinite(inv_r) && linear.value() + inv_r < kLinearSumCeiling) {
                linear.add(inv_r);
            } else {
                out.log_space = true;
                log_sum = std::log(linear.value());
            }
        }
        if (out.log_space) log_sum = log_add(log_sum, log_inv_r);

        bool sample = n <= dense_limit || n == n_max;
        if (n == next_dyadic) {
            sample = true;
            next_dyadic *= 2;
        }
        if (!sample) continue;

        CriterionSample cs;
        cs.n = n;
        const double sum = out.log_space ? 0.0 : linear.value();
        const double la = a.log_eval(n);
        const double ls = s.log_eval(n);
        cs.log_value = la + ls + (out.log_space ? log_sum : std::log(sum));
        const double sn = out.log_space ? 0.0 : s.eval(n);
        const double an = a.eval(n);
        if (!out.log_space && sn * an >= std::numeric_limits<double>::min()) {
            cs.value = sn * an * sum;
        } else {
            cs.value = std::exp(cs.log_value);
        }
        if (!std::isfinite(cs.value)) out.truncated = true;
        out.samples.push_back(cs);
    }
    return out;
}

std::string_view to_string(Method m) noexcept {
    return m == Method::analytic ? "analytic" : "numeric";
}

BoundednessReport classify_boundedness(const SequenceSpec& a, const WeightSpec& r,
                                       const WeightSpec& s, const BoundednessOptions& opts) {
    BoundednessReport rep;
    const Index n_max = clip_to_tables(opts.n_max, {&a, &r, &s});
    auto seq = criterion_sequence(a, r, s, n_max);
    rep.criterion_samples = std::move(seq.samples);
    for (const auto& cs : rep.criterion_samples) rep.sup_estimate = std::max(rep.sup_estimate, cs.value);

    std::vector<Index> ns;
    std::vector<double> logs;
    for (const auto& cs : rep.criterion_samples) {
        if (cs.n >= 8 && (cs.n & (cs.n - 1)) == 0) {
            ns.push_back(cs.n);
            logs.push_back(cs.log_value);
        }
    }
    if (ns.size() >= 2) rep.trailing_slope = trailing_slope(ns, logs);

    bool decided = false;
    if (a.asym() && r.asym() && s.asym()) {
        const SumClass sum = partial_sum(reciprocal(*r.asym()));
        if (sum.verdict != SumVerdict::undecided_boundary) {
            const AsymptoticClass growth = sum.verdict == SumVerdict::divergent
                                               ? *sum.growth
                                               : AsymptoticClass{1.0, 1.0, 0.0, 0.0};
            const AsymptoticClass composed = mul(mul(*a.asym(), *s.asym()), growth);
            switch (limit_class(composed)) {
                case Limit::infinite:
                    rep.bounded = Tri::no;
                    rep.compact = Tri::no;
                    break;
                case Limit::zero:
                    rep.bounded = Tri::yes;
                    rep.compact = Tri::yes;
                    break;
                case Limit::finite_nonzero:
                    rep.bounded = Tri::yes;
                    rep.compact = Tri::no;
                    if (sum.verdict == SumVerdict::divergent) rep.analytic_limit = composed.constant;
                    break;
            }
            rep.method = Method::analytic;
            decided = true;
        }
    }

    if (!decided) {
        rep.method = Method::numeric;
        if (ns.size() < 3) {
            rep.bounded = Tri::inconclusive;
            rep.compact = Tri::inconclusive;
        } else if (rep.trailing_slope > opts.drift_threshold) {
            rep.bounded = Tri::no;
            rep.compact = Tri::no;
        } else if (rep.trailing_slope < -opts.drift_threshold) {
            rep.bounded = Tri::yes;
            rep.compact = Tri::yes;
        } else if (std::abs(rep.trailing_slope) < opts.slope_tolerance) {
            rep.bounded = Tri::yes;
            rep.compact = Tri::no;
        }
    }

    if (rep.bounded == Tri::yes) {
        double norm = rep.sup_estimate;
        if (rep.analytic_limit) norm = std::max(norm, *rep.analytic_limit);
        rep.norm = norm;
    }
    return rep;
}

NormBounds operator_norm_bounds(const SequenceSpec& a, const WeightSpec& s, Index n_max) {
    n_max = clip_to_tables(n_max, {&a, &s});
    if (n_max >= 2 && !verify_weight(s, n_max).decreasing) {
        throw Error("weight-not-decreasing", "norm bounds need a decreasing weight");
    }
    NormBounds b;
    for (Index n = 1; n <= n_max; ++n) {
        const double an = std::abs(a.eval(n));
        if (an > b.lower) {
            b.lower = an;
            b.lower_at = n;
        }
        const double nan_ = static_cast<double>(n) * an;
        if (nan_ > b.upper) {
            b.upper = nan_;
            b.upper_at = n;
        }
    }
    return b;
}

std::string_view to_string(MatrixVerdict v) noexcept {
    switch (v) {
        case MatrixVerdict::pass: return "pass";
        case MatrixVerdict::fail: return "fail";
        case MatrixVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

EntryFn rhaly_entries(const SequenceSpec& a) {
    return [a](Index i, Index k) { return k <= i ? Complex{a.eval(i), 0.0} : Complex{}; };
}

MatrixTestResult matrix_bounded_test(const EntryFn& entry, const WeightSpec& r,
                                     const WeightSpec& s, Index n_max) {
    constexpr double kColumnTolerance = 1e-8;
    constexpr double kSettled = 0.02;
    constexpr double kTrend = 0.05;

    n_max = clip_to_tables(n_max, {&r, &s});
    MatrixTestResult res;
    const auto probes = dyadic_probes(1, n_max);

    std::vector<double> log_rows;
    for (Index n : probes) {
        const double ls = s.log_eval(n);
        CompensatedSum<double> acc;
        for (Index k = 1; k <= n; ++k) {
            const double mag = std::abs(entry(n, k));
            if (mag == 0.0) continue;
            acc.add(std::exp(ls + std::log(mag) - r.log_eval(k)));
        }
        const double sigma = acc.value();
        res.row_sup = std::max(res.row_sup, sigma);
        log_rows.push_back(std::log(std::max(sigma, std::numeric_limits<double>::min())));
    }
    res.row_slope = probes.size() >= 2 ? trailing_slope(probes, log_rows) : 0.0;

    // Columns k = 1..3: s_n |a_nk| must vanish as n grows.
    res.columns_decay = true;
    for (Index k = 1; k <= std::min<Index>(3, n_max); ++k) {
        std::vector<Index> ns;
        std::vector<double> logs;
        double last = 0.0;
        for (Index n : probes) {
            if (n < k) continue;
            const double v = std::exp(s.log_eval(n)) * std::abs(entry(n, k));
            ns.push_back(n);
            logs.push_back(std::log(std::max(v, std::numeric_limits<double>::min())));
            last = v;
        }
        res.worst_column_tail = std::max(res.worst_column_tail, last);
        const bool tiny = last < kColumnTolerance;
        const bool trending_down = ns.size() >= 3 && trailing_slope(ns, logs) < -kTrend;
        if (!tiny && !trending_down) res.columns_decay = false;
    }

    if (probes.size() < 3) {
        res.verdict = MatrixVerdict::inconclusive;
    } else if (res.row_slope > kTrend || !res.columns_decay) {
        res.verdict = MatrixVerdict::fail;
    } else if (std::abs(res.row_slope) < kSettled || res.row_slope < 0.0) {
        res.verdict = MatrixVerdict::pass;
    } else {
        res.verdict = MatrixVerdict::inconclusive;
    }
    return res;
}

}  // namespace terraspec
