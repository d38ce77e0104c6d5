#include "config.hpp"

#include <json.hpp>
#include <numeric>
#include <set>

namespace flexbc {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.contains(it.key()))
            throw ConfigError("config: unknown key '" + where + it.key() + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError("config: bad value for '" + std::string(key) + "': " + e.what());
        }
    }
}

ScheduleConfig parse_schedule(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
    reject_unknown(j, {"kind", "m", "perm", "seed"}, where + ".");
    ScheduleConfig sc;
    read(j, "kind", sc.kind);
    read(j, "m", sc.m);
    read(j, "perm", sc.perm);
    if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
    return sc;
}

StepConfig parse_step(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
    reject_unknown(j, {"mode", "safety", "fixed_tau", "acknowledge_bound_violation"}, where + ".");
    StepConfig sc;
    read(j, "mode", sc.mode);
    read(j, "safety", sc.safety);
    if (j.contains("fixed_tau") && !j.at("fixed_tau").is_null())
        sc.fixed_tau = j.at("fixed_tau").get<double>();
    read(j, "acknowledge_bound_violation", sc.acknowledge_bound_violation);
    return sc;
}

json schedule_json(const ScheduleConfig& sc) {
    json j{{"kind", sc.kind}, {"m", sc.m}};
    if (!sc.perm.empty()) j["perm"] = sc.perm;
    if (sc.seed) j["seed"] = *sc.seed;
    return j;
}

json step_json(const StepConfig& sc) {
    json j{{"mode", sc.mode},
           {"safety", sc.safety},
           {"acknowledge_bound_violation", sc.acknowledge_bound_violation}};
    j["fixed_tau"] = sc.fixed_tau ? json(*sc.fixed_tau) : json(nullptr);
    return j;
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    reject_unknown(j,
                   {"image", "side", "blur", "noise_sigma", "seed", "lambda_a", "lambda_d",
                    "eps", "levels", "grouping", "schedule", "step", "cycles",
                    "tol_displacement", "record_residual", "allow_uncertified", "out_dir",
                    "variants", "equivalence"},
                   "");

    ExperimentConfig cfg;
    read(j, "image", cfg.image);
    read(j, "side", cfg.side);
    if (j.contains("blur")) {
        const json& b = j.at("blur");
        reject_unknown(b, {"taps", "std", "boundary"}, "blur.");
        read(b, "taps", cfg.blur_taps);
        read(b, "std", cfg.blur_std);
        read(b, "boundary", cfg.boundary);
    }
    read(j, "noise_sigma", cfg.noise_sigma);
    read(j, "seed", cfg.seed);
    read(j, "lambda_a", cfg.lambda_a);
    read(j, "lambda_d", cfg.lambda_d);
    read(j, "eps", cfg.eps_logsum);
    read(j, "levels", cfg.levels);
    read(j, "grouping", cfg.grouping);
    if (j.contains("schedule")) cfg.schedule = parse_schedule(j.at("schedule"), "schedule");
    if (j.contains("step")) cfg.step = parse_step(j.at("step"), "step");
    read(j, "cycles", cfg.cycles);
    read(j, "tol_displacement", cfg.tol_displacement);
    read(j, "record_residual", cfg.record_residual);
    read(j, "allow_uncertified", cfg.allow_uncertified);
    read(j, "out_dir", cfg.out_dir);
    if (j.contains("variants")) {
        if (!j.at("variants").is_array()) throw ConfigError("config: 'variants' must be an array");
        for (std::size_t i = 0; i < j.at("variants").size(); ++i) {
            const json& v = j.at("variants").at(i);
            const std::string where = "variants[" + std::to_string(i) + "].";
            reject_unknown(v, {"name", "schedule", "step"}, where);
            VariantConfig vc;
            read(v, "name", vc.name);
            if (vc.name.empty()) throw ConfigError("config: variant without a name");
            if (v.contains("schedule"))
                vc.schedule = parse_schedule(v.at("schedule"), where + "schedule");
            if (v.contains("step")) vc.step = parse_step(v.at("step"), where + "step");
            cfg.variants.push_back(std::move(vc));
        }
    }
    if (j.contains("equivalence")) {
        const json& e = j.at("equivalence");
        reject_unknown(e, {"steps", "m", "tol", "tau", "fast_path"}, "equivalence.");
        read(e, "steps", cfg.equivalence.steps);
        read(e, "m", cfg.equivalence.m);
        read(e, "tol", cfg.equivalence.tol);
        if (e.contains("tau") && !e.at("tau").is_null())
            cfg.equivalence.tau = e.at("tau").get<double>();
        read(e, "fast_path", cfg.equivalence.fast_path);
    }

    if (cfg.side < 4 || cfg.side % 4 != 0)
        throw ConfigError("config: side must be a positive multiple of 4");
    if (cfg.levels != 2) throw ConfigError("config: only levels = 2 is supported");
    if (cfg.blur_taps < 1) throw ConfigError("config: blur.taps must be >= 1");
    if (cfg.blur_taps % 2 == 0)
        throw ConfigError("config: blur.taps must be odd (round an even size up)");
    if (cfg.noise_sigma < 0.0) throw ConfigError("config: noise_sigma must be >= 0");
    if (cfg.cycles < 1) throw ConfigError("config: cycles must be >= 1");
    if (cfg.boundary != "periodic" && cfg.boundary != "symmetric")
        throw ConfigError("config: boundary must be periodic or symmetric");
    parse_grouping(cfg.grouping);
    if (cfg.image.empty()) throw ConfigError("config: 'image' must name a file or 'phantom'");
    return cfg;
}

std::string resolved_config_json(const ExperimentConfig& cfg) {
    json j;
    j["image"] = cfg.image;
    j["side"] = cfg.side;
    j["blur"] = {{"taps", cfg.blur_taps}, {"std", cfg.blur_std}, {"boundary", cfg.boundary}};
    j["noise_sigma"] = cfg.noise_sigma;
    j["seed"] = cfg.seed;
    j["lambda_a"] = cfg.lambda_a;
    j["lambda_d"] = cfg.lambda_d;
    j["eps"] = cfg.eps_logsum;
    j["levels"] = cfg.levels;
    j["grouping"] = cfg.grouping;
    j["schedule"] = schedule_json(cfg.schedule);
    j["step"] = step_json(cfg.step);
    j["cycles"] = cfg.cycles;
    j["tol_displacement"] = cfg.tol_displacement;
    j["record_residual"] = cfg.record_residual;
    j["allow_uncertified"] = cfg.allow_uncertified;
    j["out_dir"] = cfg.out_dir;
    json variants = json::array();
    for (const auto& v : cfg.variants) {
        json vj{{"name", v.name}, {"schedule", schedule_json(v.schedule)}};
        if (v.step) vj["step"] = step_json(*v.step);
        variants.push_back(vj);
    }
    j["variants"] = variants;
    j["equivalence"] = {{"steps", cfg.equivalence.steps},
                        {"m", cfg.equivalence.m},
                        {"tol", cfg.equivalence.tol},
                        {"tau", cfg.equivalence.tau ? json(*cfg.equivalence.tau) : json(nullptr)},
                        {"fast_path", cfg.equivalence.fast_path}};
    return j.dump(2) + "\n";
}

std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override must have the form key=value: " + ov);
        const std::string path = ov.substr(0, eq);
        const std::string value = ov.substr(eq + 1);
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::exception&) {
            parsed = value; // plain string
        }
        json* node = &j;
        std::size_t start = 0;
        while (true) {
            const auto dot = path.find('.', start);
            const std::string key = path.substr(start, dot - start);
            if (key.empty()) throw ConfigError("override has an empty key segment: " + ov);
            if (dot == std::string::npos) {
                (*node)[key] = parsed;
                break;
            }
            node = &(*node)[key];
            start = dot + 1;
        }
    }
    return j.dump();
}

Schedule make_schedule(const ScheduleConfig& sc, Index blocks, std::uint64_t default_seed) {
    const std::uint64_t seed = sc.seed.value_or(default_seed);
    if (sc.kind == "full" || sc.kind == "fb") return Schedule::full(blocks);
    if (sc.kind == "cyclic") {
        std::vector<Index> perm = sc.perm;
        if (perm.empty()) {
            perm.resize(static_cast<std::size_t>(blocks));
            std::iota(perm.begin(), perm.end(), Index{0});
        }
        return Schedule::cyclic(blocks, perm);
    }
    if (sc.kind == "reshuffled") return Schedule::reshuffled_cyclic(blocks, seed);
    if (sc.kind == "flex")
        return Schedule::flex_hierarchical(sc.m, Schedule::HierarchicalPattern::coarse_then_full);
    if (sc.kind == "alternating")
        return Schedule::flex_hierarchical(sc.m, Schedule::HierarchicalPattern::coarse_then_rest);
    if (sc.kind == "two_level") return Schedule::two_level(blocks, sc.m);
    if (sc.kind == "random_single") return Schedule::random_single_block(blocks, seed);
    if (sc.kind == "vscheme") return Schedule::vscheme(blocks, sc.m, seed);
    throw ConfigError("config: unknown schedule kind '" + sc.kind + "'");
}

StepPolicy make_step_policy(const StepConfig& sc) {
    StepPolicy policy;
    if (sc.mode == "nonconvex")
        policy.mode = StepPolicy::Mode::nonconvex;
    else if (sc.mode == "convex_g")
        policy.mode = StepPolicy::Mode::convex_g;
    else
        throw ConfigError("config: step.mode must be nonconvex or convex_g");
    policy.safety = sc.safety;
    policy.fixed_tau = sc.fixed_tau;
    policy.acknowledge_bound_violation = sc.acknowledge_bound_violation;
    return policy;
}

DetailGrouping parse_grouping(const std::string& grouping) {
    if (grouping == "per_orientation") return DetailGrouping::per_orientation;
    if (grouping == "single_detail") return DetailGrouping::single_detail;
    throw ConfigError("config: grouping must be per_orientation or single_detail");
}

} // namespace flexbc
