#include "terraspec/ideals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include <Eigen/SVD>

#include "terraspec/parallel.hpp"

namespace terraspec {

namespace {

constexpr double kTrend = 0.05;
constexpr double kSettled = 0.02;
constexpr double kTrialTolerance = 1e-9;

Index cap_to_tables(Index n, std::initializer_list<const SequenceSpec*> seqs) {
    for (const auto* s : seqs) {
        if (auto mx = s->max_index()) n = std::min(n, *mx);
    }
    return n;
}

// Vanishing of exp(log_term(n)) judged from the trailing dyadic log-log slope.
Tri numeric_vanishes(const std::function<double(Index)>& log_term, Index n_max) {
    std::vector<double> xs, ys;
    for (Index n : dyadic_probes(8, n_max)) {
        if (n < 8) continue;
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(log_term(n));
    }
    if (xs.size() < 3) return Tri::inconclusive;
    const std::size_t m = std::min<std::size_t>(4, xs.size());
    const std::vector<double> tx(xs.end() - static_cast<std::ptrdiff_t>(m), xs.end());
    const std::vector<double> ty(ys.end() - static_cast<std::ptrdiff_t>(m), ys.end());
    const double slope = ls_slope(tx, ty);
    if (slope < -kTrend) return Tri::yes;
    if (slope > -kSettled) return Tri::no;
    return Tri::inconclusive;
}

// lim a_i r_i = 0 ?
Tri ar_vanishes(const SequenceSpec& a, const WeightSpec& r, Index n_max) {
    if (a.asym() && r.asym()) return to_tri(limit_class(mul(*a.asym(), *r.asym())) == Limit::zero);
    return numeric_vanishes([&](Index n) { return a.log_eval(n) + r.log_eval(n); },
                            cap_to_tables(n_max, {&a, &r}));
}

// lim a_i r_i G_i = 0 where G is the partial-sum sequence of a positive
// sequence with growth class `cls`.
Tri averaged_class_vanishes(const AsymptoticClass& cls, const SequenceSpec& a, const WeightSpec& r,
                            Index n_max) {
    const SumClass sum = partial_sum(cls);
    if (sum.verdict == SumVerdict::undecided_boundary) {
        // partial sums of the boundary classes grow no faster than log n
        return numeric_vanishes(
            [&](Index n) {
                return a.log_eval(n) + r.log_eval(n) + std::log(std::log(static_cast<double>(n) + 1.0));
            },
            cap_to_tables(n_max, {&a, &r}));
    }
    const AsymptoticClass growth =
        sum.verdict == SumVerdict::divergent ? *sum.growth : AsymptoticClass{1.0, 1.0, 0.0, 0.0};
    if (a.asym() && r.asym()) {
        return to_tri(limit_class(mul(mul(*a.asym(), *r.asym()), growth)) == Limit::zero);
    }
    return numeric_vanishes(
        [&](Index n) {
            return a.log_eval(n) + r.log_eval(n) + growth.log_value(static_cast<double>(std::max<Index>(n, 2)));
        },
        cap_to_tables(n_max, {&a, &r}));
}

}  // namespace

std::string_view to_string(SNumberSource s) noexcept {
    switch (s) {
        case SNumberSource::svd_of_section: return "svd_of_section";
        case SNumberSource::synthetic: return "synthetic";
        case SNumberSource::user: return "user";
    }
    return "user";
}

std::string_view to_string(TailStatus t) noexcept {
    switch (t) {
        case TailStatus::negligible: return "negligible";
        case TailStatus::dominant_possible: return "dominant_possible";
        case TailStatus::analytic_zero: return "analytic_zero";
    }
    return "dominant_possible";
}

SNumberSequence SNumberSequence::make(std::vector<double> values, SNumberSource source,
                                      std::optional<AsymptoticClass> asym) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
            throw Error("snumbers-not-monotone", "s-numbers must be finite and non-negative");
        }
        if (i > 0 && values[i] > values[i - 1]) {
            throw Error("snumbers-not-monotone",
                        "s_" + std::to_string(i + 1) + " exceeds s_" + std::to_string(i));
        }
    }
    return {std::move(values), source, asym};
}

std::vector<double> singular_values(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    return {sv.data(), sv.data() + sv.size()};
}

std::vector<double> singular_values(const Eigen::MatrixXcd& m) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    return {sv.data(), sv.data() + sv.size()};
}

SNumberSequence snumbers_from_section(const FiniteSection& sec, const WeightSpec& r,
                                      const WeightSpec& s, Index cap) {
    if (sec.n() > cap) throw Error("section-too-large", "section exceeds the dense cap");
    const FiniteSection weighted = conjugate_section(sec, r, s);
    auto values = singular_values(weighted.dense());
    // SVD output is sorted; clamp rounding-level inversions so the invariant holds exactly.
    for (std::size_t i = 1; i < values.size(); ++i) values[i] = std::min(values[i], values[i - 1]);
    return SNumberSequence::make(std::move(values), SNumberSource::svd_of_section);
}

Tri stype_membership(const SNumberSequence& snum, const SequenceSpec& a, const WeightSpec& r,
                     Index n_max) {
    if (snum.asym) return averaged_class_vanishes(*snum.asym, a, r, n_max);
    double total = 0.0;
    for (double v : snum.values) total += v;
    if (total == 0.0) return Tri::yes;
    return ar_vanishes(a, r, n_max);
}

double quasi_norm_value(std::span<const double> svals, std::span<const double> ar) {
    CompensatedSum<double> prefix;
    double best = 0.0;
    const std::size_t n = std::min(svals.size(), ar.size());
    for (std::size_t i = 0; i < n; ++i) {
        prefix.add(svals[i]);
        best = std::max(best, std::abs(ar[i] * prefix.value()));
    }
    return best;
}

QuasiNormResult quasi_norm(const SNumberSequence& snum, const SequenceSpec& a,
                           const WeightSpec& r) {
    if (snum.values.empty()) throw Error("empty-snumbers", "quasi-norm needs at least one value");
    QuasiNormResult res;
    res.truncation_n = static_cast<Index>(snum.values.size());

    CompensatedSum<double> prefix;
    std::vector<double> terms;
    for (Index i = 1; i <= res.truncation_n; ++i) {
        prefix.add(snum.values[static_cast<std::size_t>(i - 1)]);
        const double term = std::abs(a.eval(i) * prefix.value()) * r.eval(i);
        terms.push_back(term);
        if (term > res.value) {
            res.value = term;
            res.argmax_index = i;
        }
    }

    bool decreasing_after = true;
    for (std::size_t i = static_cast<std::size_t>(res.argmax_index); i < terms.size(); ++i) {
        if (terms[i] > terms[i - 1]) decreasing_after = false;
    }

    if (snum.asym) {
        if (decreasing_after && stype_membership(snum, a, r) == Tri::yes && a.asym() && r.asym()) {
            res.tail_status = TailStatus::analytic_zero;
        }
        return res;
    }

    // Finite support: past N the terms are total * a_i r_i, so the prefix
    // maximum stands when a_i r_i never climbs back above a_N r_N.
    const Index n = res.truncation_n;
    const double last_ar = a.eval(n) * r.eval(n);
    bool tail_dominated = ar_vanishes(a, r, 1 << 16) == Tri::yes;
    if (tail_dominated) {
        const Index hi = cap_to_tables(n * 1024, {&a, &r});
        for (Index i : dyadic_probes(n + 1, std::max(hi, n + 1))) {
            if (i > hi) break;
            if (a.eval(i) * r.eval(i) > last_ar) tail_dominated = false;
        }
    }
    res.tail_status = tail_dominated ? TailStatus::negligible : TailStatus::dominant_possible;
    return res;
}

IdealFlags ideal_preconditions(const SequenceSpec& a, const WeightSpec& r, Index n_max) {
    IdealFlags flags;
    const Index scan = cap_to_tables(n_max, {&a, &r});
    flags.ideal_ok = ar_vanishes(a, r, n_max);
    if (a.asym() && r.asym()) {
        const auto nar = mul(mul(*a.asym(), *r.asym()), AsymptoticClass::power_of_n(1.0));
        flags.closed_ok = to_tri(limit_class(nar) == Limit::zero);
    } else {
        flags.closed_ok = numeric_vanishes(
            [&](Index k) { return std::log(static_cast<double>(k)) + a.log_eval(k) + r.log_eval(k); },
            scan);
    }

    for (Index i = 1; i <= scan; ++i) flags.sup_ar = std::max(flags.sup_ar, a.eval(i) * r.eval(i));
    bool unbounded = false;
    if (a.asym() && r.asym()) {
        const auto ar = mul(*a.asym(), *r.asym());
        switch (limit_class(ar)) {
            case Limit::infinite: unbounded = true; break;
            case Limit::finite_nonzero: flags.sup_ar = std::max(flags.sup_ar, ar.constant); break;
            case Limit::zero: break;
        }
        flags.qnorm_normalized = unbounded ? Tri::no : to_tri(std::abs(flags.sup_ar - 1.0) <= 1e-9);
    } else {
        flags.qnorm_normalized = to_tri(std::abs(flags.sup_ar - 1.0) <= 1e-9);
    }
    return flags;
}

AxiomReport check_quasinorm_axioms(std::int64_t trials, Index dim, const SequenceSpec& a,
                                   const WeightSpec& r, std::uint64_t seed, unsigned jobs) {
    if (trials < 0 || dim < 2) throw Error("invalid-trials", "need trials >= 0 and dim >= 2");
    AxiomReport rep;
    rep.trials = trials;
    rep.dim = dim;
    rep.seed = seed;
    rep.normalized = ideal_preconditions(a, r).qnorm_normalized == Tri::yes;

    std::vector<double> ar(static_cast<std::size_t>(dim));
    for (Index i = 1; i <= dim; ++i) ar[static_cast<std::size_t>(i - 1)] = a.eval(i) * r.eval(i);

    std::vector<AxiomViolations> per_trial(static_cast<std::size_t>(trials));
    parallel_for(per_trial.size(), jobs, [&](std::size_t t) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(t)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        auto random_matrix = [&](Index rows, Index cols) {
            Eigen::MatrixXd m(rows, cols);
            for (Index i = 0; i < rows; ++i) {
                for (Index j = 0; j < cols; ++j) m(i, j) = unif(rng);
            }
            return m;
        };
        const Eigen::MatrixXd phi = random_matrix(dim, dim);
        const Eigen::MatrixXd psi = random_matrix(dim, dim);
        const Eigen::MatrixXd zeta = random_matrix(dim, dim);
        const Eigen::MatrixXd eta = random_matrix(dim, dim);
        const Index k = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(dim - 1));
        const Eigen::MatrixXd low_rank = random_matrix(dim, k) * random_matrix(k, dim);

        const auto s_phi = singular_values(phi);
        const auto s_psi = singular_values(psi);
        const auto s_sum = singular_values(Eigen::MatrixXd(phi + psi));
        const auto s_diff = singular_values(Eigen::MatrixXd(phi - psi));
        const auto s_prod = singular_values(Eigen::MatrixXd(phi * psi));
        const auto s_comp = singular_values(Eigen::MatrixXd(zeta * phi * eta));
        const auto s_zeta = singular_values(zeta);
        const auto s_eta = singular_values(eta);
        const auto s_low = singular_values(low_rank);

        const double q_phi = quasi_norm_value(s_phi, ar);
        const double q_psi = quasi_norm_value(s_psi, ar);
        AxiomViolations& v = per_trial[t];
        const auto n = static_cast<std::size_t>(dim);

        if (quasi_norm_value(s_sum, ar) > 2.0 * (q_phi + q_psi) + kTrialTolerance) ++v.quasi_triangle;
        if (rep.normalized && s_phi[0] > q_phi + kTrialTolerance) ++v.lower_bound;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(s_phi[i] - s_psi[i]) > s_diff[0] + kTrialTolerance) {
                ++v.lipschitz;
                break;
            }
        }
        if (quasi_norm_value(s_comp, ar) > s_zeta[0] * q_phi * s_eta[0] + kTrialTolerance) {
            ++v.composition;
        }
        for (std::size_t j = static_cast<std::size_t>(k); j < n; ++j) {
            if (s_low[j] > 1e-10 * s_low[0]) {
                ++v.rank;
                break;
            }
        }
        bool add_bad = false, mul_bad = false;
        for (std::size_t m = 1; m <= n; ++m) {
            for (std::size_t l = 1; m + l - 1 <= n; ++l) {
                const std::size_t idx = m + l - 2;
                add_bad = add_bad || s_sum[idx] > s_phi[m - 1] + s_psi[l - 1] + kTrialTolerance;
                mul_bad = mul_bad || s_prod[idx] > s_phi[m - 1] * s_psi[l - 1] + kTrialTolerance;
            }
        }
        v.additive += add_bad ? 1 : 0;
        v.multiplicative += mul_bad ? 1 : 0;
        for (const auto* sv : {&s_phi, &s_psi, &s_sum, &s_comp}) {
            if (!std::is_sorted(sv->rbegin(), sv->rend())) {
                ++v.monotone;
                break;
            }
        }
    });

    for (const auto& v : per_trial) {
        rep.violations.quasi_triangle += v.quasi_triangle;
        rep.violations.lower_bound += v.lower_bound;
        rep.violations.lipschitz += v.lipschitz;
        rep.violations.composition += v.composition;
        rep.violations.rank += v.rank;
        rep.violations.additive += v.additive;
        rep.violations.multiplicative += v.multiplicative;
        rep.violations.monotone += v.monotone;
    }
    return rep;
}

InclusionReport inclusion_check(const WeightSpec& r, const WeightSpec& t,
                                const std::vector<SNumberSequence>& samples,
                                const SequenceSpec& a, Index n_max) {
    const Index scan = cap_to_tables(n_max, {&r, &t});
    for (Index n = 1; n <= scan; ++n) {
        if (r.eval(n) > t.eval(n)) {
            throw Error("weights-not-ordered", "r_" + std::to_string(n) + " > t_" + std::to_string(n));
        }
    }
    InclusionReport rep;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        ++rep.checked;
        if (stype_membership(samples[i], a, t, n_max) != Tri::yes) continue;
        ++rep.t_members;
        switch (stype_membership(samples[i], a, r, n_max)) {
            case Tri::yes: ++rep.r_members_among_t; break;
            case Tri::no: rep.counterexamples.push_back(static_cast<std::int64_t>(i)); break;
            case Tri::inconclusive: ++rep.unresolved; break;
        }
    }
    return rep;
}

Tri chi_space_membership(std::span<const Complex> v, const SequenceSpec& a, const WeightSpec& r,
                         Index n_max) {
    CompensatedSum<Complex> total;
    for (const auto& x : v) total.add(x);
    if (total.value() == Complex{}) return Tri::yes;
    return ar_vanishes(a, r, n_max);
}

Tri chi_space_membership(const SequenceSpec& v, const SequenceSpec& a, const WeightSpec& r,
                         Index n_max) {
    if (v.asym()) return averaged_class_vanishes(*v.asym(), a, r, n_max);
    const Index scan = cap_to_tables(n_max, {&v, &a, &r});
    std::vector<double> prefix(static_cast<std::size_t>(scan) + 1, 0.0);
    CompensatedSum<double> acc;
    for (Index i = 1; i <= scan; ++i) {
        acc.add(v.eval(i));
        prefix[static_cast<std::size_t>(i)] = acc.value();
    }
    return numeric_vanishes(
        [&](Index n) {
            return a.log_eval(n) + r.log_eval(n) + std::log(prefix[static_cast<std::size_t>(n)]);
        },
        scan);
}

}  // namespace terraspec
