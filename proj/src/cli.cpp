#include "terraspec/cli.hpp"

#include <cstdlib>
#include <map>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "terraspec/ideals.hpp"
#include "terraspec/products.hpp"
#include "terraspec/rhaly_operator.hpp"
#include "terraspec/spectrum.hpp"

namespace terraspec::cli {

using nlohmann::json;

namespace {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json tri_json(Tri t) { return std::string(to_string(t)); }

// ---- config access --------------------------------------------------------

template <typename T>
T get_or(const json& cfg, const char* key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

Index get_index(const json& cfg, const char* key, Index fallback, Index minimum = 1) {
    const auto v = get_or<Index>(cfg, key, fallback);
    if (v < minimum) throw ConfigError(fmt::format("field '{}' must be >= {}", key, minimum));
    return v;
}

double tolerance(const json& cfg, const char* key, double fallback) {
    const json tol = cfg.value("tolerances", json::object());
    const double v = get_or<double>(tol, key, fallback);
    if (!(v > 0.0)) throw ConfigError(fmt::format("tolerance '{}' must be > 0", key));
    return v;
}

SequenceSpec sequence_field(const json& cfg, const char* key, bool required) {
    if (!cfg.contains(key)) {
        if (required) throw ConfigError(std::string("missing sequence '") + key + "'");
        return SequenceSpec::constant(1.0);
    }
    return parse_sequence(cfg.at(key));
}

Complex parse_complex(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
    throw ConfigError("complex values are numbers, [re, im] or {\"re\":..,\"im\":..}");
}

std::vector<Complex> lambdas(const json& cfg) {
    std::vector<Complex> out;
    if (cfg.contains("lambda")) out.push_back(parse_complex(cfg.at("lambda")));
    if (cfg.contains("lambdas")) {
        for (const auto& j : cfg.at("lambdas")) out.push_back(parse_complex(j));
    }
    if (out.empty()) throw ConfigError("need 'lambda' or 'lambdas'");
    return out;
}

double chi_of(const json& cfg, const SequenceSpec& a) {
    if (cfg.contains("chi")) {
        const double chi = cfg.at("chi").get<double>();
        if (!(chi > 0.0)) throw ConfigError("chi must be > 0");
        return chi;
    }
    return estimate_chi(a, 1, a.max_index().value_or(Index{1} << 20)).chi;
}

GridSpec parse_grid(const json& cfg) {
    if (!cfg.contains("grid")) throw ConfigError("missing 'grid'");
    const json& g = cfg.at("grid");
    GridSpec grid;
    const auto re = g.at("re_range").get<std::vector<double>>();
    const auto im = g.at("im_range").get<std::vector<double>>();
    if (re.size() != 2 || im.size() != 2) throw ConfigError("ranges are [lo, hi]");
    grid.re_lo = re[0];
    grid.re_hi = re[1];
    grid.im_lo = im[0];
    grid.im_hi = im[1];
    const json& res = g.at("resolution");
    if (res.is_array()) {
        grid.re_steps = res.at(0).get<Index>();
        grid.im_steps = res.at(1).get<Index>();
    } else {
        grid.re_steps = grid.im_steps = res.get<Index>();
    }
    return grid;
}

SpectrumOptions spectrum_options(const json& cfg) {
    SpectrumOptions o;
    o.n_max = get_index(cfg, "n_max", o.n_max);
    o.snap = tolerance(cfg, "snap", o.snap);
    o.near_s = tolerance(cfg, "near_s", o.near_s);
    return o;
}

// ---- output envelope ------------------------------------------------------

json envelope(std::string_view command, const json& cfg) {
    return json{{"tool", kToolName}, {"version", kVersion}, {"command", command},
                {"config_digest", config_digest(cfg)}};
}

std::string csv_header(std::string_view command, const json& cfg) {
    return fmt::format("# {} {} {}\n# config_digest {}\n", kToolName, kVersion, command,
                       config_digest(cfg));
}

json point_json(const SpectralPoint& p) {
    const auto& ev = p.evidence;
    json j{{"lambda", complex_json(p.lambda)},
           {"label", to_string(p.label)},
           {"alpha", opt_json(ev.alpha)},
           {"alpha_chi", opt_json(ev.alpha_chi)},
           {"disk_position", to_string(ev.disk.position)},
           {"disk_at_zero", ev.disk.at_zero},
           {"in_S", tri_json(ev.in_s)},
           {"S_index", ev.s_index ? json(*ev.s_index) : json(nullptr)},
           {"dist_to_S", ev.dist.distance},
           {"nearest_index", ev.dist.nearest ? json(*ev.dist.nearest) : json(nullptr)},
           {"A1", tri_json(ev.a1)},
           {"A2", tri_json(ev.a2)},
           {"limit_diag", ev.limit_diag},
           {"series_diag", ev.series_diag}};
    if (!ev.error.empty()) j["error"] = ev.error;
    return j;
}

// ---- subcommands ----------------------------------------------------------

CommandResult cmd_classify(const json& cfg, unsigned) {
    const auto a = sequence_field(cfg, "a", true);
    const auto r = sequence_field(cfg, "r", false);
    const auto s = sequence_field(cfg, "s", false);
    BoundednessOptions opts;
    opts.n_max = get_index(cfg, "n_max", opts.n_max);
    opts.slope_tolerance = tolerance(cfg, "slope", opts.slope_tolerance);
    const auto rep = classify_boundedness(a, r, s, opts);

    json samples = json::array();
    for (const auto& cs : rep.criterion_samples) {
        samples.push_back(json::array({cs.n, cs.value}));
    }
    json out = envelope("classify", cfg);
    out["report"] = {{"bounded", tri_json(rep.bounded)},
                     {"compact", tri_json(rep.compact)},
                     {"norm", opt_json(rep.norm)},
                     {"analytic_limit", opt_json(rep.analytic_limit)},
                     {"sup_estimate", rep.sup_estimate},
                     {"trailing_slope", rep.trailing_slope},
                     {"method", to_string(rep.method)},
                     {"criterion_samples", samples}};
    if (cfg.value("r", json()) == cfg.value("s", json())) {
        try {
            const auto b = operator_norm_bounds(a, s, opts.n_max);
            out["report"]["norm_bounds"] = {{"lower", b.lower}, {"upper", b.upper}};
        } catch (const Error&) {
            // bounds need a decreasing weight; omitted otherwise
        }
    }
    const bool decisive = rep.bounded != Tri::inconclusive && rep.compact != Tri::inconclusive;
    return {decisive ? kOk : kInconclusive, out.dump(2) + "\n", ""};
}

CommandResult cmd_spectrum_map(const json& cfg, unsigned jobs) {
    const auto a = sequence_field(cfg, "a", true);
    const auto s = sequence_field(cfg, "s", false);
    const double chi = chi_of(cfg, a);
    const GridSpec grid = parse_grid(cfg);
    const SpectrumContext ctx(a, s, chi, spectrum_options(cfg));
    const auto points = spectrum_grid(ctx, grid, jobs);

    if (get_or<std::string>(cfg, "format", "csv") == "json") {
        json out = envelope("spectrum-map", cfg);
        out["chi"] = chi;
        out["points"] = json::array();
        for (const auto& p : points) out["points"].push_back(point_json(p));
        return {kOk, out.dump(2) + "\n", ""};
    }
    std::string csv = csv_header("spectrum-map", cfg);
    csv += "re,im,label,alpha,alpha_chi,dist_to_S,a1,a2\n";
    for (const auto& p : points) {
        const auto& ev = p.evidence;
        csv += fmt::format("{},{},{},{},{},{},{},{}\n", num(p.lambda.real()), num(p.lambda.imag()),
                           to_string(p.label), ev.alpha ? num(*ev.alpha) : "",
                           ev.alpha_chi ? num(*ev.alpha_chi) : "", num(ev.dist.distance),
                           to_string(ev.a1), to_string(ev.a2));
    }
    return {kOk, csv, ""};
}

CommandResult cmd_point_test(const json& cfg, unsigned) {
    const auto a = sequence_field(cfg, "a", true);
    const auto s = sequence_field(cfg, "s", false);
    const double chi = chi_of(cfg, a);
    const SpectrumContext ctx(a, s, chi, spectrum_options(cfg));
    json out = envelope("point-test", cfg);
    out["chi"] = chi;
    out["points"] = json::array();
    int code = kOk;
    for (Complex lam : lambdas(cfg)) {
        const auto pt = ctx.classify(lam);
        json j = point_json(pt);
        const auto pt_res = ctx.point_test(lam);
        const auto adj = ctx.adjoint_test(lam);
        j["point_spectrum"] = {{"member", tri_json(pt_res.member)},
                               {"method", to_string(pt_res.method)},
                               {"shortcut", pt_res.shortcut},
                               {"diagnostic", pt_res.diagnostic}};
        j["adjoint_point_spectrum"] = {{"member", tri_json(adj.member)},
                                       {"method", to_string(adj.method)},
                                       {"diagnostic", adj.diagnostic}};
        if (pt.label == SpectralLabel::boundary_unknown) code = kInconclusive;
        out["points"].push_back(j);
    }
    return {code, out.dump(2) + "\n", ""};
}

CommandResult cmd_resolvent_verify(const json& cfg, unsigned) {
    const auto a = sequence_field(cfg, "a", true);
    const Index n = get_index(cfg, "N", 200);
    const double tol = tolerance(cfg, "residual", 1e-10);
    const auto opts = spectrum_options(cfg);
    json out = envelope("resolvent-verify", cfg);
    out["N"] = n;
    out["results"] = json::array();
    int code = kOk;
    for (Complex lam : lambdas(cfg)) {
        const auto chk = verify_resolvent(lam, a, n, tol, opts);
        out["results"].push_back({{"lambda", complex_json(lam)},
                                  {"left_residual", chk.left_residual},
                                  {"right_residual", chk.right_residual},
                                  {"max_residual", chk.max_residual},
                                  {"d_lambda", chk.d_lambda},
                                  {"claimed", chk.claimed},
                                  {"pass", chk.pass}});
        if (!chk.pass) {
            code = kAssertion;
        } else if (!chk.claimed && code == kOk) {
            code = kInconclusive;
        }
    }
    return {code, out.dump(2) + "\n", ""};
}

CommandResult cmd_product_band(const json& cfg, unsigned) {
    const auto a = sequence_field(cfg, "a", true);
    const double chi = chi_of(cfg, a);
    const auto range = get_or<std::vector<Index>>(cfg, "n_range", {Index{1} << 7, Index{1} << 15});
    if (range.size() != 2) throw ConfigError("n_range is [lo, hi]");
    BandOptions opts;
    opts.slope_tolerance = tolerance(cfg, "slope", opts.slope_tolerance);
    opts.band_ratio = tolerance(cfg, "band_ratio", opts.band_ratio);
    const double shift = get_or<double>(cfg, "exponent_shift", 0.0);
    const std::string expect = get_or<std::string>(cfg, "expect", "bounded_band");

    std::vector<BandReport> reports;
    int code = kOk;
    for (Complex lam : lambdas(cfg)) {
        if (shift != 0.0) opts.exponent = alpha(lam) * chi + shift;
        reports.push_back(ratio_band(a, lam, chi, range[0], range[1], opts));
        const auto verdict = reports.back().verdict;
        if (verdict == BandVerdict::degenerate) {
            code = std::max<int>(code, kInconclusive);
        } else if (to_string(verdict) != expect) {
            code = kAssertion;
        }
    }

    if (get_or<std::string>(cfg, "format", "json") == "csv") {
        std::string csv = csv_header("product-band", cfg);
        csv += "lambda_re,lambda_im,n,ratio\n";
        const auto lams = lambdas(cfg);
        for (std::size_t i = 0; i < reports.size(); ++i) {
            for (const auto& p : reports[i].ratios) {
                csv += fmt::format("{},{},{},{}\n", num(lams[i].real()), num(lams[i].imag()), p.n,
                                   num(p.ratio));
            }
        }
        return {code, csv, ""};
    }
    json out = envelope("product-band", cfg);
    out["chi"] = chi;
    out["results"] = json::array();
    const auto lams = lambdas(cfg);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& rep = reports[i];
        json ratios = json::array();
        for (const auto& p : rep.ratios) ratios.push_back(json::array({p.n, p.ratio}));
        out["results"].push_back({{"lambda", complex_json(lams[i])},
                                  {"exponent", rep.exponent},
                                  {"band", json::array({rep.band_min, rep.band_max})},
                                  {"log_log_slope", rep.log_log_slope},
                                  {"verdict", to_string(rep.verdict)},
                                  {"ratios", ratios}});
    }
    return {code, out.dump(2) + "\n", ""};
}

SNumberSequence snumbers_from_config(const json& cfg, const SequenceSpec& a, const WeightSpec& r) {
    if (cfg.contains("snumbers")) {
        const json& j = cfg.at("snumbers");
        std::optional<AsymptoticClass> asym;
        if (j.contains("asym")) {
            const json& c = j.at("asym");
            asym = AsymptoticClass::make(c.value("constant", 1.0), c.value("geo_base", 1.0),
                                         c.value("power", 0.0), c.value("log_power", 0.0));
        }
        return SNumberSequence::make(j.at("values").get<std::vector<double>>(), SNumberSource::user,
                                     asym);
    }
    const Index n = get_index(cfg, "N", 16);
    const auto s = cfg.contains("s") ? parse_sequence(cfg.at("s")) : r;
    return snumbers_from_section(build_section(a, n), r, s);
}

CommandResult cmd_ideal_qnorm(const json& cfg, unsigned) {
    const auto a = sequence_field(cfg, "a", true);
    const auto r = sequence_field(cfg, "r", false);
    const auto snum = snumbers_from_config(cfg, a, r);
    const auto q = quasi_norm(snum, a, r);
    const auto member = stype_membership(snum, a, r);
    const auto flags = ideal_preconditions(a, r);

    json out = envelope("ideal-qnorm", cfg);
    out["snumbers"] = {{"source", to_string(snum.source)}, {"values", snum.values}};
    out["quasi_norm"] = {{"value", q.value},
                         {"argmax_index", q.argmax_index},
                         {"truncation_N", q.truncation_n},
                         {"tail_status", to_string(q.tail_status)}};
    out["stype_member"] = tri_json(member);
    out["preconditions"] = {{"ideal_ok", tri_json(flags.ideal_ok)},
                            {"closed_ok", tri_json(flags.closed_ok)},
                            {"qnorm_normalized", tri_json(flags.qnorm_normalized)},
                            {"sup_ar", flags.sup_ar}};
    return {member == Tri::inconclusive ? kInconclusive : kOk, out.dump(2) + "\n", ""};
}

// Synthetic s-sequences for the inclusion check: power laws and geometric decay.
std::vector<SNumberSequence> synthetic_samples(std::int64_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> power(0.05, 3.0);
    std::uniform_real_distribution<double> base(0.05, 0.95);
    std::vector<SNumberSequence> out;
    for (std::int64_t i = 0; i < count; ++i) {
        AsymptoticClass cls = (i % 2 == 0) ? AsymptoticClass{1.0, 1.0, -power(rng), 0.0}
                                           : AsymptoticClass{1.0, base(rng), 0.0, 0.0};
        std::vector<double> values;
        for (Index n = 1; n <= 16; ++n) values.push_back(cls.value(static_cast<double>(n) + 1.0));
        out.push_back(SNumberSequence::make(std::move(values), SNumberSource::synthetic, cls));
    }
    return out;
}

CommandResult cmd_ideal_axioms(const json& cfg, unsigned jobs) {
    const auto a = sequence_field(cfg, "a", true);
    const auto r = sequence_field(cfg, "r", false);
    const auto trials = get_or<std::int64_t>(cfg, "trials", 200);
    const Index dim = get_index(cfg, "dim", 8, 2);
    const auto seed = get_or<std::uint64_t>(cfg, "seed", 0);
    const auto rep = check_quasinorm_axioms(trials, dim, a, r, seed, jobs);

    json out = envelope("ideal-axioms", cfg);
    out["trials"] = rep.trials;
    out["dim"] = rep.dim;
    out["seed"] = rep.seed;
    out["normalized"] = rep.normalized;
    const auto& v = rep.violations;
    out["violations"] = {{"quasi_triangle", v.quasi_triangle}, {"lower_bound", v.lower_bound},
                         {"lipschitz", v.lipschitz},           {"composition", v.composition},
                         {"rank", v.rank},                     {"additive", v.additive},
                         {"multiplicative", v.multiplicative}, {"monotone", v.monotone}};
    int code = v.total() == 0 ? kOk : kAssertion;

    if (cfg.contains("t")) {
        const auto t = parse_sequence(cfg.at("t"));
        const auto samples = synthetic_samples(get_or<std::int64_t>(cfg, "inclusion_samples", 50), seed);
        const auto inc = inclusion_check(r, t, samples, a);
        out["inclusion"] = {{"checked", inc.checked},
                            {"t_members", inc.t_members},
                            {"r_members_among_t", inc.r_members_among_t},
                            {"unresolved", inc.unresolved},
                            {"counterexamples", inc.counterexamples}};
        if (!inc.counterexamples.empty()) code = kAssertion;
    }
    return {code, out.dump(2) + "\n", ""};
}

using Handler = CommandResult (*)(const json&, unsigned);

const std::map<std::string, Handler, std::less<>>& handlers() {
    static const std::map<std::string, Handler, std::less<>> table{
        {"classify", cmd_classify},
        {"spectrum-map", cmd_spectrum_map},
        {"point-test", cmd_point_test},
        {"resolvent-verify", cmd_resolvent_verify},
        {"product-band", cmd_product_band},
        {"ideal-qnorm", cmd_ideal_qnorm},
        {"ideal-axioms", cmd_ideal_axioms},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, _] : handlers()) out.push_back(name);
        return out;
    }();
    return names;
}

SequenceSpec parse_sequence(const json& j) {
    if (!j.is_object() || !j.contains("family")) {
        throw ConfigError("sequence must be {\"family\": ..., \"params\": {...}}");
    }
    const Family fam = family_from_string(j.at("family").get<std::string>());
    const json params = j.value("params", json::object());
    auto need = [&](const char* key) {
        if (!params.contains(key)) {
            throw ConfigError(fmt::format("family {} needs param '{}'", to_string(fam), key));
        }
        return params.at(key).get<double>();
    };
    switch (fam) {
        case Family::cesaro_scaled: return SequenceSpec::cesaro_scaled(need("chi"));
        case Family::p_cesaro: return SequenceSpec::p_cesaro(need("p"));
        case Family::log_reciprocal: return SequenceSpec::log_reciprocal();
        case Family::power_weight: return SequenceSpec::power_weight(need("beta"));
        case Family::geometric: return SequenceSpec::geometric(need("rho"));
        case Family::constant: return SequenceSpec::constant(need("c"));
        case Family::table:
            return SequenceSpec::table(params.at("values").get<std::vector<double>>());
        case Family::custom: break;
    }
    throw ConfigError("custom sequences cannot be described in a config file");
}

std::string config_digest(const json& config) {
    const std::string text = config.dump();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

void apply_env_overrides(json& config) {
    if (const char* seed = std::getenv("TERRASPEC_SEED"); seed && *seed) {
        try {
            config["seed"] = std::stoull(seed);
        } catch (const std::exception&) {
            throw std::invalid_argument("TERRASPEC_SEED must be an unsigned integer");
        }
    }
}

CommandResult run(std::string_view command, const json& config, unsigned jobs) {
    const auto& table = handlers();
    const auto it = table.find(command);
    if (it == table.end()) return {kUsage, "", fmt::format("unknown command '{}'", command)};
    try {
        return it->second(config, jobs);
    } catch (const ConfigError& e) {
        return {kUsage, "", std::string("config error: ") + e.what()};
    } catch (const json::exception& e) {
        return {kUsage, "", std::string("config error: ") + e.what()};
    } catch (const Error& e) {
        return {kUsage, "", std::string("error: ") + e.what()};
    }
}

}  // namespace terraspec::cli
