#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "besov_ns/calibration.hpp"
#include "besov_ns/constants.hpp"
#include "besov_ns/criteria.hpp"
#include "besov_ns/io.hpp"
#include "besov_ns/report.hpp"

namespace besov_ns::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad invocation or malformed configuration; maps to exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"decompose", "norms", "paraproduct", "solve", "criteria", "calibrate"};
    return c;
}

inline const std::vector<std::string>& experiments() {
    static const std::vector<std::string> e{"regularity", "theta", "blowup", "uniqueness", "bootstrap", "persistence",
                                            "chain"};
    return e;
}

/// Every recognised key with its default. A null default means "take it from
/// the constants file".
inline nlohmann::json default_config() {
    using nlohmann::json;
    return json{
        {"command", ""},
        {"seed", 0},
        {"out", "out"},
        {"input", ""},
        {"constants", kDefaultConstantsFile},
        {"threads", 0},
        {"grid", {{"dim", 2}, {"N", 64}}},
        {"initial", {{"kind", "taylor-green"}, {"s", -0.5}, {"amplitude", 1.0}, {"wavevector", {1, 0, 0}}}},
        {"solver",
         {{"T", 1.0},
          {"dt", 1e-3},
          {"n_picard", 8},
          {"dealias", "padded"},
          {"tol_fixpoint", 1e-10},
          {"order", 2},
          {"substeps", 1},
          {"nonlinear", true},
          {"blowup_threshold", 1e8},
          {"geometric_samples", 16},
          {"geometric_decades", 8.0}}},
        {"norms", {{"s", {-0.5, 0.25, 0.5, 0.75}}, {"q", {2, 4, "inf"}}, {"heat_delta", 1.0}}},
        {"paraproduct", {{"count", 100}}},
        {"criteria",
         {{"experiment", ""},
          {"r", 0.5},
          {"sigma", 0.75},
          {"delta_list", {0.1, 0.05, 0.025}},
          {"epsilon", nullptr},
          {"levels", 2},
          {"c1", nullptr},
          {"c2", nullptr},
          {"persistence_multiple", nullptr},
          {"bootstrap", {{"A", nullptr}, {"B", nullptr}, {"f", json::array()}}}}},
        {"calibration",
         {{"corpus_size", 100}, {"band", 0.2}, {"grid_sizes", {32, 64}}, {"stability_sizes", {32, 64, 128}},
          {"write_constants", false}}},
    };
}

namespace detail {

/// 1-based line and column of a 0-based byte offset.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

/// Best-effort location of a JSON pointer in the source text: each token is
/// searched as a quoted key after the previous one.
inline std::pair<std::size_t, std::size_t> locate(const std::string& text, const std::string& pointer) {
    std::size_t pos = 0;
    std::size_t found = 0;
    std::istringstream is(pointer);
    std::string token;
    while (std::getline(is, token, '/')) {
        if (token.empty()) continue;
        const auto p = text.find("\"" + token + "\"", pos);
        if (p == std::string::npos) break;
        found = p;
        pos = p + token.size() + 2;
    }
    return line_column(text, found);
}

inline std::string anchor(const std::string& origin, std::pair<std::size_t, std::size_t> lc) {
    return origin + ":" + std::to_string(lc.first) + ":" + std::to_string(lc.second);
}

inline const char* type_label(const nlohmann::json& j) {
    if (j.is_null()) return "number or null";
    if (j.is_boolean()) return "boolean";
    if (j.is_number_integer()) return "integer";
    if (j.is_number()) return "number";
    if (j.is_string()) return "string";
    if (j.is_array()) return "array";
    return "object";
}

inline bool compatible(const nlohmann::json& def, const nlohmann::json& v) {
    if (def.is_null()) return v.is_null() || v.is_number();
    if (def.is_boolean()) return v.is_boolean();
    if (def.is_number_integer()) return v.is_number_integer();
    if (def.is_number()) return v.is_number();
    if (def.is_string()) return v.is_string();
    if (def.is_array()) return v.is_array();
    return v.is_object();
}

/// Overlays `src` onto `dst`, rejecting unknown keys and mistyped values.
inline void overlay(nlohmann::json& dst, const nlohmann::json& src, const std::string& prefix, const std::string& text,
                    const std::string& origin) {
    if (!src.is_object()) throw UsageError(anchor(origin, locate(text, prefix)) + ": " + prefix + " must be an object");
    for (const auto& [k, v] : src.items()) {
        const std::string ptr = prefix + "/" + k;
        if (!dst.contains(k)) throw UsageError(anchor(origin, locate(text, ptr)) + ": unknown key '" + ptr + "'");
        auto& d = dst[k];
        if (d.is_object()) {
            overlay(d, v, ptr, text, origin);
        } else if (!compatible(d, v)) {
            throw UsageError(anchor(origin, locate(text, ptr)) + ": '" + ptr + "' must be " + type_label(d));
        } else {
            d = v;
        }
    }
}

inline double parse_q(const nlohmann::json& v) {
    if (v.is_string() && v.get<std::string>() == "inf") return kInf;
    if (v.is_number()) return v.get<double>();
    throw UsageError("config: integrability exponents must be numbers or \"inf\"");
}

inline std::string q_key(double q) { return q == kInf ? "inf" : delta_key(q); }

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace detail

/// Parses config text; syntax and schema errors carry `origin:LINE:COL`.
inline nlohmann::json parse_config(const std::string& text, const std::string& origin) {
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::string msg = e.what();
        if (const auto p = msg.find(": "); p != std::string::npos) msg = msg.substr(p + 2);
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        throw UsageError(detail::anchor(origin, detail::line_column(text, at)) + ": " + msg);
    }
    nlohmann::json cfg = default_config();
    detail::overlay(cfg, parsed, "", text, origin);
    return cfg;
}

inline nlohmann::json load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), path.string());
}

/// Settings resolved from an effective config.
struct RunContext {
    nlohmann::json config;
    std::string command;
    std::uint64_t seed = 0;
    std::filesystem::path out;

    TorusGrid grid() const { return TorusGrid(config["grid"]["dim"].get<int>(), config["grid"]["N"].get<int>()); }

    SolverConfig solver() const {
        const auto& s = config["solver"];
        SolverConfig c;
        c.grid = grid();
        c.T = s["T"].get<double>();
        c.dt = s["dt"].get<double>();
        c.n_picard = s["n_picard"].get<int>();
        const auto dealias = s["dealias"].get<std::string>();
        if (dealias == "padded") {
            c.dealias = ProductMode::Padded;
        } else if (dealias == "full") {
            c.dealias = ProductMode::Full;
        } else {
            throw UsageError("solver.dealias must be 'padded' or 'full'");
        }
        c.tol_fixpoint = s["tol_fixpoint"].get<double>();
        c.quad.order = s["order"].get<int>();
        c.quad.substeps = s["substeps"].get<int>();
        c.nonlinear = s["nonlinear"].get<bool>();
        c.blowup_threshold = s["blowup_threshold"].get<double>();
        c.geometric_samples = s["geometric_samples"].get<int>();
        c.geometric_decades = s["geometric_decades"].get<double>();
        c.validate();
        return c;
    }

    CriterionParams params() const {
        const auto& c = config["criteria"];
        CriterionParams p;
        p.r = c["r"].get<double>();
        p.sigma = c["sigma"].get<double>();
        p.delta_list = c["delta_list"].get<std::vector<double>>();
        if (!c["epsilon"].is_null()) p.epsilon_guess = c["epsilon"].get<double>();
        p.validate();
        return p;
    }

    std::string input() const { return config["input"].get<std::string>(); }

    FourierField initial_field() const {
        if (!input().empty()) {
            if (!std::filesystem::exists(input() + ".json") && !std::filesystem::exists(input())) {
                throw UsageError("input field '" + input() + "' does not exist");
            }
            return read_field(input());
        }
        const auto& i = config["initial"];
        InitialFieldSpec spec;
        spec.kind = parse_initial_kind(i["kind"].get<std::string>());
        spec.s = i["s"].get<double>();
        spec.seed = seed;
        spec.amplitude = i["amplitude"].get<double>();
        const auto k = i["wavevector"].get<std::vector<int>>();
        for (std::size_t a = 0; a < std::min<std::size_t>(3, k.size()); ++a) spec.wavevector[a] = k[a];
        return make_initial_field(spec, grid());
    }

    /// Frozen constant `name`, unless the config sets `override` explicitly.
    double constant(const nlohmann::json& override, const std::string& name) const {
        if (!override.is_null()) return override.get<double>();
        const std::filesystem::path path = config["constants"].get<std::string>();
        if (!std::filesystem::exists(path)) {
            throw UsageError("constant '" + name + "' not set in config and constants file " + path.string() +
                             " is missing (run calibrate)");
        }
        return ConstantsFile::load(path).value(name);
    }

    std::optional<ConstantsFile> constants_file() const {
        const std::filesystem::path path = config["constants"].get<std::string>();
        if (!std::filesystem::exists(path)) return std::nullopt;
        return ConstantsFile::load(path);
    }
};

namespace detail {

inline std::vector<double> indices(std::size_t n, double start = 0.0) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = start + static_cast<double>(i);
    return v;
}

inline ExperimentReport run_decompose(const RunContext& ctx) {
    const auto f = ctx.initial_field();
    const DyadicFamily fam(f.grid());
    FourierField sum(f.grid(), f.components());
    std::vector<double> l2, linf;
    for (int j = -1; j <= fam.jmax(); ++j) {
        const auto b = block(f, j, fam);
        l2.push_back(lp_norm(b, 2.0));
        linf.push_back(lp_norm(b, kInf));
        sum += b;
    }
    const double err = max_coefficient_difference(sum, f);
    const double scale = max_coefficient_abs(f);
    ExperimentReport rep("decompose");
    rep.add_series("block_l2", indices(l2.size(), -1.0), l2);
    rep.add_series("block_linf", indices(linf.size(), -1.0), linf);
    rep.add_scalar("jmax", fam.jmax());
    rep.add_scalar("reconstruction_error", err);
    rep.add_scalar("field_scale", scale);
    rep.add_verdict("reconstruction_exact", err <= 1e-13 * std::max(1.0, scale), {"reconstruction_error", "field_scale"});
    std::filesystem::create_directories(ctx.out);
    std::ofstream os(ctx.out / "dyadic_family.csv");
    fam.write_csv(os);
    return rep;
}

inline ExperimentReport run_norms(const RunContext& ctx) {
    const auto f = ctx.initial_field();
    const DyadicFamily fam(f.grid());
    const auto& nc = ctx.config["norms"];
    const auto svals = nc["s"].get<std::vector<double>>();
    std::vector<double> qvals;
    for (const auto& q : nc["q"]) qvals.push_back(parse_q(q));
    const double heat_delta = nc["heat_delta"].get<double>();
    const auto constants = ctx.constants_file();
    const auto params = ctx.params();

    ExperimentReport rep("norms");
    for (double q : qvals) {
        rep.add_scalar("lp_q" + q_key(q), lp_norm(f, q));
        for (double s : svals) {
            rep.add_scalar("besov_s" + delta_key(s) + "_q" + q_key(q), besov_norm(f, BesovIndex(s, q), fam));
        }
        for (double s : svals) {
            if (!(s > 0.0)) continue;
            const std::string key = "heat_char_ratio_s" + delta_key(s) + "_q" + q_key(q);
            rep.add_scalar(key, safe_ratio(heat_characterization_norm(f, s, q, heat_delta),
                                           besov_norm(f, BesovIndex(-s, q), fam)));
            const std::string cname = "heat_char_ratio_s" + delta_key(s);
            if (q == kInf && heat_delta == 1.0 && constants && constants->has(cname)) {
                rep.add_verdict("heat_char_in_band_s" + delta_key(s), constants->get(cname).inside(rep.scalar(key)), {key});
            }
        }
    }
    const auto blocks = block_lp_norms(f, kInf, fam);
    rep.add_series("block_linf", indices(blocks.size(), -1.0), blocks);
    rep.add_scalar("sobolev_h_half", sobolev_h_norm(f, 0.5));
    const auto gmo = check_gmo(f, 0.5, 1.0, fam);
    rep.add_scalar("gmo_exponent_q", gmo.exponent_q);
    rep.add_scalar("gmo_ratio", gmo.ratio);
    const auto interp = check_interpolation(f, params.r, params.sigma, fam);
    rep.add_scalar("interpolation_ratio", interp.ratio);
    if (constants && constants->has("gmo")) {
        rep.add_verdict("gmo_below_frozen", constants->get("gmo").below(gmo.ratio), {"gmo_ratio"});
    }
    if (constants && constants->has("interpolation") && params.r == 0.5 && params.sigma == 0.75) {
        rep.add_verdict("interpolation_below_frozen", constants->get("interpolation").below(interp.ratio),
                        {"interpolation_ratio"});
    }
    return rep;
}

inline ExperimentReport run_paraproduct(const RunContext& ctx) {
    const TorusGrid g = ctx.grid();
    const DyadicFamily fam(g);
    const auto count = ctx.config["paraproduct"]["count"].get<std::size_t>();
    if (count == 0) throw UsageError("paraproduct.count must be positive");
    std::vector<double> errs(count);
    parallel_for(count, [&](std::size_t i) {
        const auto f = random_field(g, 1, calibration::stream(ctx.seed, 20, 2 * i), 0.5);
        const auto h = random_field(g, 1, calibration::stream(ctx.seed, 20, 2 * i + 1), 1.5);
        const auto prod = pointwise_product(f, h, ProductMode::Full);
        const FourierField sum = pi1(f, h, fam) + pi2(h, f, fam);
        errs[i] = safe_ratio(max_coefficient_difference(sum, prod), max_coefficient_abs(prod));
    });
    const auto law = calibration::law_constant(g, count, ctx.seed);
    ExperimentReport rep("paraproduct");
    rep.add_series("identity_error", indices(count), errs);
    double worst = 0.0;
    for (double e : errs) worst = std::max(worst, e);
    rep.add_scalar("identity_error_max", worst);
    rep.add_scalar("law_pi1", law.pi1);
    rep.add_scalar("law_pi2", law.pi2);
    rep.add_verdict("identity_holds", worst <= 1e-12, {"identity_error_max"});
    if (const auto constants = ctx.constants_file()) {
        if (constants->has("paraproduct_law_pi1") && constants->has("paraproduct_law_pi2")) {
            rep.add_verdict("law_stable",
                            constants->get("paraproduct_law_pi1").stable(law.pi1) &&
                                constants->get("paraproduct_law_pi2").stable(law.pi2),
                            {"law_pi1", "law_pi2"});
        }
    }
    return rep;
}

inline nlohmann::json diagnostics_json(const PicardDiagnostics& d) {
    return {{"sigma", d.sigma},
            {"contraction_ratio", d.contraction_ratio},
            {"non_contraction", d.non_contraction},
            {"iterations", d.iterations},
            {"early_stop", d.early_stop},
            {"fixed_point_residual", d.fixed_point_residual},
            {"warnings", d.warnings}};
}

inline void add_trace_series(ExperimentReport& rep, const TimeTrace& u) {
    std::vector<double> l2(u.size()), sup(u.size()), div(u.size());
    parallel_for(u.size(), [&](std::size_t i) {
        l2[i] = l2_norm(u.field(i));
        sup[i] = lp_norm(u.field(i), kInf);
        div[i] = divergence_defect(u.field(i));
    });
    rep.add_series("l2_norm", u.times(), l2);
    rep.add_series("sup_norm", u.times(), sup);
    rep.add_series("divergence_defect", u.times(), div);
    double worst = 0.0;
    for (double d : div) worst = std::max(worst, d);
    rep.add_scalar("max_divergence_defect", worst);
}

inline ExperimentReport run_solve(const RunContext& ctx) {
    const auto cfg = ctx.solver();
    const auto u0 = ctx.initial_field();
    ExperimentReport rep("solve");
    try {
        const auto res = picard_solve(u0, cfg);
        write_trace(ctx.out / "trace", res.solution, ctx.config, diagnostics_json(res.diagnostics));
        add_trace_series(rep, res.solution);
        rep.add_series("picard_sigma", indices(res.diagnostics.sigma.size()), res.diagnostics.sigma);
        rep.add_scalar("iterations", res.diagnostics.iterations);
        rep.add_scalar("fixed_point_residual", res.diagnostics.fixed_point_residual);
        rep.add_scalar("final_time", res.solution.end());
        rep.add_verdict("completed", true, {"final_time"});
        rep.add_verdict("divergence_free", rep.scalar("max_divergence_defect") <= 1e-11, {"max_divergence_defect"});
    } catch (const BlowupSuspected& e) {
        const auto& partial = e.partial_trace();
        nlohmann::json diag = {{"halted", true}, {"last_valid_time", e.last_valid_time()}, {"iteration", e.iteration()}};
        write_trace(ctx.out / "trace", partial, ctx.config, diag);
        if (!partial.empty()) add_trace_series(rep, partial);
        rep.add_scalar("last_valid_time", e.last_valid_time());
        rep.add_scalar("halted_iteration", e.iteration());
        rep.add_verdict("completed", false, {"last_valid_time"});
    }
    return rep;
}

/// Trace from --input, or a fresh solve; a halted solve yields its partial trace.
inline TimeTrace obtain_trace(const RunContext& ctx) {
    if (!ctx.input().empty()) {
        if (!std::filesystem::exists(std::filesystem::path(ctx.input()) / "manifest.json")) {
            throw UsageError("input trace '" + ctx.input() + "' has no manifest.json");
        }
        return read_trace(ctx.input());
    }
    try {
        return picard_solve(ctx.initial_field(), ctx.solver()).solution;
    } catch (const BlowupSuspected& e) {
        return e.partial_trace();
    }
}

inline ExperimentReport run_theta(const RunContext& ctx, const TimeTrace& u, const CriterionParams& params) {
    const DyadicFamily fam(u.grid());
    auto deltas = params.delta_list;
    std::sort(deltas.begin(), deltas.end());
    std::vector<double> th;
    for (double d : deltas) th.push_back(theta_window(u, params.r, d, fam));
    ExperimentReport rep("theta");
    rep.add_series("theta", deltas, th);
    rep.add_scalar("theta_delta0", th.back());
    const auto& c = ctx.config["criteria"];
    if (!c["c1"].is_null() || ctx.constants_file()) {
        const double c1 = ctx.constant(c["c1"], "chain_c1");
        rep.add_scalar("smallness_threshold", 1.0 / (2.0 * c1));
        rep.add_verdict("theta_small", th.back() < 1.0 / (2.0 * c1), {"theta_delta0", "smallness_threshold"});
    }
    return rep;
}

inline ExperimentReport run_bootstrap(const RunContext& ctx) {
    const auto& b = ctx.config["criteria"]["bootstrap"];
    if (b["A"].is_null() || b["B"].is_null() || b["f"].empty()) {
        throw UsageError("criteria.bootstrap needs A, B and a nonempty series f");
    }
    const double A = b["A"].get<double>(), B = b["B"].get<double>();
    const auto f = b["f"].get<std::vector<double>>();
    const auto res = bootstrap_check(f, A, B);
    ExperimentReport rep("bootstrap");
    rep.add_series("f", indices(f.size()), f);
    rep.add_scalar("A", A);
    rep.add_scalar("B", B);
    rep.add_scalar("lower_root", res.lower_root);
    rep.add_scalar("upper_root", res.upper_root);
    rep.add_verdict("hypotheses_met", res.hypotheses_met, {"f", "A", "B"});
    if (res.verdict) rep.add_verdict("bounded_by_2A", *res.verdict, {"f", "A"});
    rep.config()["reason"] = res.reason;
    return rep;
}

inline ExperimentReport run_criteria(const RunContext& ctx) {
    const auto experiment = ctx.config["criteria"]["experiment"].get<std::string>();
    if (std::find(experiments().begin(), experiments().end(), experiment) == experiments().end()) {
        throw UsageError("criteria needs --experiment one of regularity|theta|blowup|uniqueness|bootstrap|persistence|chain");
    }
    const auto& c = ctx.config["criteria"];
    if (experiment == "bootstrap") return run_bootstrap(ctx);
    const auto params = ctx.params();
    if (experiment == "uniqueness") {
        UniquenessConfig ucfg;
        ucfg.base = ctx.solver();
        ucfg.levels = c["levels"].get<int>();
        ucfg.probe_seed = ctx.seed;
        return uniqueness_experiment(ctx.initial_field(), ucfg, params);
    }
    if (experiment == "persistence") {
        return persistence_check(ctx.initial_field(), ctx.solver(), params.r,
                                 ctx.constant(c["persistence_multiple"], "persistence_multiple"));
    }
    const TimeTrace u = obtain_trace(ctx);
    if (u.size() < 2) throw UsageError("trace has fewer than two samples");
    const DyadicFamily fam(u.grid());
    if (experiment == "regularity") return regularity_monitor(u);
    if (experiment == "theta") return run_theta(ctx, u, params);
    if (experiment == "blowup") return blowup_tracker(u, params.r, ctx.constant(c["epsilon"], "epsilon"), fam);
    return chain_check(u, params, ctx.constant(c["c1"], "chain_c1"), ctx.constant(c["c2"], "chain_c2"), fam);
}

inline ExperimentReport run_calibrate(const RunContext& ctx) {
    const auto& k = ctx.config["calibration"];
    const auto params = ctx.params();
    CalibrationConfig cc;
    cc.seed = ctx.seed;
    cc.corpus_size = k["corpus_size"].get<std::size_t>();
    cc.band = k["band"].get<double>();
    cc.r = params.r;
    cc.sigma = params.sigma;
    cc.grid_sizes = k["grid_sizes"].get<std::vector<int>>();
    cc.stability_sizes = k["stability_sizes"].get<std::vector<int>>();
    cc.delta_list = params.delta_list;
    if (cc.corpus_size < 20) throw UsageError("calibration.corpus_size must be at least 20");
    ExperimentReport rep;
    const auto fresh = calibration::calibrate_constants(cc, &rep);
    fresh.save(ctx.out / "constants.json");
    if (const auto previous = ctx.constants_file()) {
        for (const auto& [name, c] : fresh.entries()) {
            if (!previous->has(name)) continue;
            rep.add_scalar("previous_" + name, previous->value(name));
            rep.add_verdict("stable_" + name, previous->get(name).stable(c.value), {name, "previous_" + name});
        }
    }
    if (k["write_constants"].get<bool>()) fresh.save(ctx.config["constants"].get<std::string>());
    return rep;
}

}  // namespace detail

/// Runs one command on an effective config and writes the report under `out`.
/// Returns the report; exit status is derived from its verdicts.
inline ExperimentReport execute(const RunContext& ctx) {
    ExperimentReport rep;
    if (ctx.command == "decompose") {
        rep = detail::run_decompose(ctx);
    } else if (ctx.command == "norms") {
        rep = detail::run_norms(ctx);
    } else if (ctx.command == "paraproduct") {
        rep = detail::run_paraproduct(ctx);
    } else if (ctx.command == "solve") {
        rep = detail::run_solve(ctx);
    } else if (ctx.command == "criteria") {
        rep = detail::run_criteria(ctx);
    } else if (ctx.command == "calibrate") {
        rep = detail::run_calibrate(ctx);
    } else {
        throw UsageError("unknown command '" + ctx.command + "'");
    }
    const auto extra = rep.config();
    rep.config() = ctx.config;
    if (!extra.empty()) rep.config()["notes"] = extra;
    rep.provenance() = {{"code_version", kVersion},
                        {"timestamp", detail::utc_timestamp()},
                        {"threads", worker_count()}};
    write_report(rep, ctx.out);
    return rep;
}

/// Entry point: `besov-ns <command> [--config PATH] [flags]`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Littlewood-Paley analysis and mild Navier-Stokes solver on the periodic torus", "besov-ns"};
    std::string command;
    std::string config_path;
    app.add_option("command", command, "decompose | norms | paraproduct | solve | criteria | calibrate")
        ->check(CLI::IsMember(commands()));
    app.add_option("--config", config_path, "JSON config file");

    struct Binding {
        std::string pointer;
        std::optional<std::string> s;
        std::optional<double> d;
        std::optional<long long> i;
        std::optional<bool> b;
    };
    std::vector<std::unique_ptr<Binding>> bindings;
    auto bind = [&](const std::string& flag, const std::string& pointer, char kind, const std::string& help) {
        bindings.push_back(std::make_unique<Binding>());
        Binding& b = *bindings.back();
        b.pointer = pointer;
        switch (kind) {
            case 's': app.add_option(flag, b.s, help); break;
            case 'd': app.add_option(flag, b.d, help); break;
            case 'i': app.add_option(flag, b.i, help); break;
            default: app.add_option(flag, b.b, help); break;
        }
    };
    bind("--seed", "/seed", 'i', "seed for every random draw");
    bind("--out", "/out", 's', "output directory");
    bind("--input", "/input", 's', "input field base path or trace directory");
    bind("--constants", "/constants", 's', "frozen constants file");
    bind("--threads", "/threads", 'i', "worker cap (0: BESOV_NS_THREADS or hardware)");
    bind("--experiment", "/criteria/experiment", 's', "regularity|theta|blowup|uniqueness|bootstrap|persistence|chain");
    bind("--dim", "/grid/dim", 'i', "space dimension (2 or 3)");
    bind("--N", "/grid/N", 'i', "grid points per side");
    bind("--initial", "/initial/kind", 's', "taylor-green|random-besov|single-mode");
    bind("--s", "/initial/s", 'd', "random-besov regularity");
    bind("--amplitude", "/initial/amplitude", 'd', "initial amplitude");
    bind("--T", "/solver/T", 'd', "final time");
    bind("--dt", "/solver/dt", 'd', "uniform time step");
    bind("--n-picard", "/solver/n_picard", 'i', "Picard iterations");
    bind("--dealias", "/solver/dealias", 's', "padded|full");
    bind("--tol-fixpoint", "/solver/tol_fixpoint", 'd', "early-stop tolerance on sigma_n");
    bind("--order", "/solver/order", 'i', "Oseen quadrature order (1 or 2)");
    bind("--substeps", "/solver/substeps", 'i', "Oseen quadrature substeps");
    bind("--nonlinear", "/solver/nonlinear", 'b', "include the bilinear term");
    bind("--blowup-threshold", "/solver/blowup_threshold", 'd', "sup-norm halt threshold");
    bind("--geometric-samples", "/solver/geometric_samples", 'i', "geometric samples near t = 0");
    bind("--geometric-decades", "/solver/geometric_decades", 'd', "binary decades spanned by geometric samples");
    bind("--r", "/criteria/r", 'd', "critical exponent r");
    bind("--sigma", "/criteria/sigma", 'd', "auxiliary regularity sigma");
    bind("--epsilon", "/criteria/epsilon", 'd', "blow-up threshold epsilon");
    bind("--levels", "/criteria/levels", 'i', "uniqueness refinement levels");
    bind("--corpus-size", "/calibration/corpus_size", 'i', "calibration corpus size");
    bind("--write-constants", "/calibration/write_constants", 'b', "overwrite the constants file after calibrating");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        RunContext ctx;
        ctx.config = config_path.empty() ? default_config() : load_config(config_path);
        for (const auto& b : bindings) {
            const nlohmann::json::json_pointer ptr(b->pointer);
            if (b->s) ctx.config[ptr] = *b->s;
            if (b->d) ctx.config[ptr] = *b->d;
            if (b->i) ctx.config[ptr] = *b->i;
            if (b->b) ctx.config[ptr] = *b->b;
        }
        if (!command.empty()) ctx.config["command"] = command;
        ctx.command = ctx.config["command"].get<std::string>();
        if (ctx.command.empty()) throw UsageError("no command given");
        if (std::find(commands().begin(), commands().end(), ctx.command) == commands().end()) {
            throw UsageError("unknown command '" + ctx.command + "'");
        }
        if (ctx.config["seed"].get<long long>() < 0) throw UsageError("seed must be nonnegative");
        ctx.seed = ctx.config["seed"].get<std::uint64_t>();
        ctx.out = ctx.config["out"].get<std::string>();
        if (const int threads = ctx.config["threads"].get<int>(); threads > 0) {
            setenv("BESOV_NS_THREADS", std::to_string(threads).c_str(), 1);
        }
        const auto rep = execute(ctx);
        out << rep.name() << ": " << (rep.passed() ? "PASS" : "FAIL") << " -> " << (ctx.out / (rep.name() + ".json")).string()
            << "\n";
        for (const auto& [k, v] : rep.verdicts()) out << "  " << k << " = " << (v.value ? "true" : "false") << "\n";
        return rep.passed() ? kExitOk : kExitVerdictFailure;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace besov_ns::cli
