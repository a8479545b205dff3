#include "abccs/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace abccs {

using nlohmann::ordered_json;

namespace {

void require_keys(const ordered_json& j, const std::string& path,
                  const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigError(path + ": unknown key '" + key + "'");
}

template <typename T>
T get_or(const ordered_json& j, const std::string& path, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const ordered_json::exception& e) {
        throw ConfigError(path + "." + key + ": " + e.what());
    }
}

ParamVec get_vec(const ordered_json& j, const std::string& path, const std::string& key,
                 const ParamVec& fallback, std::size_t expect_dim) {
    if (!j.contains(key)) return fallback;
    ParamVec v;
    try {
        v = j.at(key).get<ParamVec>();
    } catch (const ordered_json::exception& e) {
        throw ConfigError(path + "." + key + ": " + e.what());
    }
    if (v.size() != expect_dim)
        throw ConfigError(path + "." + key + ": expected " + std::to_string(expect_dim) +
                          " components, got " + std::to_string(v.size()));
    return v;
}

ModelKind parse_model(const std::string& s) {
    if (s == "normal-parabola") return ModelKind::normal_parabola;
    if (s == "equicorr") return ModelKind::equicorr;
    if (s == "probit") return ModelKind::probit;
    if (s == "smith") return ModelKind::smith;
    throw ConfigError("model: unknown value '" + s + "'");
}

MethodKind parse_method(const std::string& s) {
    if (s == "abc-cs") return MethodKind::abc_cs;
    if (s == "abc-suffstat") return MethodKind::abc_suffstat;
    if (s == "abc-counts") return MethodKind::abc_counts;
    if (s == "pairwise-mcmc") return MethodKind::pairwise_mcmc;
    if (s == "calibrated-pairwise-mcmc") return MethodKind::calibrated_pairwise_mcmc;
    if (s == "full-mcmc") return MethodKind::full_mcmc;
    throw ConfigError("method: unknown value '" + s + "'");
}

SamplerConfig parse_sampler(const ordered_json& j) {
    SamplerConfig s;
    if (!j.contains("sampler")) return s;
    const ordered_json& sj = j.at("sampler");
    require_keys(sj, "sampler",
                 {"kind", "n_proposals", "alpha", "proposal_df", "proposal_scale_multiplier",
                  "mcmc_iterations", "mcmc_burn_in", "mcmc_scale_multiplier", "resample_to"});
    s.kind = get_or<std::string>(sj, "sampler", "kind", s.kind);
    if (s.kind != "auto" && s.kind != "reject" && s.kind != "importance")
        throw ConfigError("sampler.kind: must be auto, reject or importance");
    s.n_proposals = get_or<std::size_t>(sj, "sampler", "n_proposals", s.n_proposals);
    if (s.n_proposals < 1) throw ConfigError("sampler.n_proposals: must be >= 1");
    s.alpha = get_or<double>(sj, "sampler", "alpha", s.alpha);
    if (!(s.alpha > 0.0 && s.alpha < 1.0))
        throw ConfigError("sampler.alpha: must lie in the open interval (0,1)");
    s.proposal_df = get_or<unsigned>(sj, "sampler", "proposal_df", s.proposal_df);
    if (s.proposal_df < 1) throw ConfigError("sampler.proposal_df: must be >= 1");
    s.proposal_scale_multiplier =
        get_or<double>(sj, "sampler", "proposal_scale_multiplier", s.proposal_scale_multiplier);
    if (!(s.proposal_scale_multiplier > 0.0))
        throw ConfigError("sampler.proposal_scale_multiplier: must be > 0");
    s.mcmc_iterations = get_or<std::size_t>(sj, "sampler", "mcmc_iterations", s.mcmc_iterations);
    s.mcmc_burn_in = get_or<std::size_t>(sj, "sampler", "mcmc_burn_in", s.mcmc_burn_in);
    if (s.mcmc_burn_in >= s.mcmc_iterations)
        throw ConfigError("sampler.mcmc_burn_in: must be < mcmc_iterations");
    s.mcmc_scale_multiplier =
        get_or<double>(sj, "sampler", "mcmc_scale_multiplier", s.mcmc_scale_multiplier);
    if (!(s.mcmc_scale_multiplier > 0.0))
        throw ConfigError("sampler.mcmc_scale_multiplier: must be > 0");
    s.resample_to = get_or<std::size_t>(sj, "sampler", "resample_to", s.resample_to);
    return s;
}

ParabolaParams parse_parabola(const ordered_json& j) {
    ParabolaParams p;
    if (!j.contains("model_params")) return p;
    const ordered_json& m = j.at("model_params");
    require_keys(m, "model_params", {"n", "theta_true", "prior_lo", "prior_hi", "suffstat"});
    p.n = get_or<std::size_t>(m, "model_params", "n", p.n);
    if (p.n < 2) throw ConfigError("model_params.n: must be >= 2");
    p.theta_true = get_or<double>(m, "model_params", "theta_true", p.theta_true);
    p.prior_lo = get_or<double>(m, "model_params", "prior_lo", p.prior_lo);
    p.prior_hi = get_or<double>(m, "model_params", "prior_hi", p.prior_hi);
    if (!(p.prior_lo >= 0.0 && p.prior_hi > p.prior_lo))
        throw ConfigError("model_params.prior: need 0 <= prior_lo < prior_hi");
    if (!(p.theta_true > p.prior_lo && p.theta_true < p.prior_hi))
        throw ConfigError("model_params.theta_true: outside the prior interval");
    p.suffstat = get_or<std::string>(m, "model_params", "suffstat", p.suffstat);
    if (p.suffstat != "t" && p.suffstat != "t1")
        throw ConfigError("model_params.suffstat: must be 't' or 't1'");
    return p;
}

EquicorrParams parse_equicorr(const ordered_json& j) {
    EquicorrParams p;
    if (!j.contains("model_params")) return p;
    const ordered_json& m = j.at("model_params");
    require_keys(m, "model_params", {"n", "q", "theta_true"});
    p.n = get_or<std::size_t>(m, "model_params", "n", p.n);
    p.q = get_or<std::size_t>(m, "model_params", "q", p.q);
    if (p.n < 2 || p.q < 2) throw ConfigError("model_params: need n >= 2 and q >= 2");
    p.theta_true = get_vec(m, "model_params", "theta_true", p.theta_true, 3);
    return p;
}

ProbitParams parse_probit(const ordered_json& j) {
    ProbitParams p;
    if (!j.contains("model_params")) return p;
    const ordered_json& m = j.at("model_params");
    require_keys(m, "model_params", {"n", "q", "theta_true"});
    p.n = get_or<std::size_t>(m, "model_params", "n", p.n);
    p.q = get_or<std::size_t>(m, "model_params", "q", p.q);
    if (p.n < 2 || p.q < 2) throw ConfigError("model_params: need n >= 2 and q >= 2");
    p.theta_true = get_vec(m, "model_params", "theta_true", p.theta_true, 3);
    return p;
}

SmithParams parse_smith(const ordered_json& j) {
    SmithParams p;
    if (!j.contains("model_params")) return p;
    const ordered_json& m = j.at("model_params");
    require_keys(m, "model_params",
                 {"grid_nx", "grid_ny", "grid_spacing", "n_years", "theta_true", "stations_csv",
                  "maxima_csv"});
    p.grid_nx = get_or<std::size_t>(m, "model_params", "grid_nx", p.grid_nx);
    p.grid_ny = get_or<std::size_t>(m, "model_params", "grid_ny", p.grid_ny);
    p.grid_spacing = get_or<double>(m, "model_params", "grid_spacing", p.grid_spacing);
    p.n_years = get_or<std::size_t>(m, "model_params", "n_years", p.n_years);
    p.theta_true = get_vec(m, "model_params", "theta_true", p.theta_true, 10);
    p.stations_csv = get_or<std::string>(m, "model_params", "stations_csv", p.stations_csv);
    p.maxima_csv = get_or<std::string>(m, "model_params", "maxima_csv", p.maxima_csv);
    if (p.stations_csv.empty() != p.maxima_csv.empty())
        throw ConfigError("model_params: stations_csv and maxima_csv must be given together");
    const double s11 = p.theta_true[0], s12 = p.theta_true[1], s22 = p.theta_true[2];
    if (!(s11 > 0.0 && s22 > 0.0 && s12 * s12 < s11 * s22))
        throw ConfigError(
            "model_params.theta_true: (sigma11, sigma12, sigma22) violates positive definiteness");
    if (!(p.theta_true[9] > 0.0)) throw ConfigError("model_params.theta_true: xi must be > 0");
    if (p.stations_csv.empty() && (p.grid_nx < 1 || p.grid_ny < 1 || p.grid_nx * p.grid_ny < 2))
        throw ConfigError("model_params: synthetic grid needs at least 2 stations");
    return p;
}

void check_capability(ModelKind model, MethodKind method, std::size_t probit_q) {
    const auto unsupported = [&](const std::string& why) {
        throw ConfigError("config: method '" + to_string(method) +
                          "' is not supported for model '" + to_string(model) + "' (" + why + ")");
    };
    switch (method) {
        case MethodKind::abc_cs: break;
        case MethodKind::abc_suffstat:
            if (model != ModelKind::normal_parabola && model != ModelKind::equicorr)
                unsupported("no low-dimensional sufficient statistic");
            break;
        case MethodKind::abc_counts:
            if (model != ModelKind::probit) unsupported("count summaries are probit-specific");
            break;
        case MethodKind::pairwise_mcmc:
        case MethodKind::calibrated_pairwise_mcmc:
            if (model == ModelKind::normal_parabola)
                unsupported("the composite likelihood is the full likelihood; use full-mcmc");
            break;
        case MethodKind::full_mcmc:
            if (model == ModelKind::smith) unsupported("full likelihood intractable");
            if (model == ModelKind::probit && probit_q != 2)
                unsupported("probit full likelihood available only for q = 2");
            break;
    }
}

ordered_json sampler_json(const SamplerConfig& s) {
    return ordered_json{{"kind", s.kind},
                        {"n_proposals", s.n_proposals},
                        {"alpha", s.alpha},
                        {"proposal_df", s.proposal_df},
                        {"proposal_scale_multiplier", s.proposal_scale_multiplier},
                        {"mcmc_iterations", s.mcmc_iterations},
                        {"mcmc_burn_in", s.mcmc_burn_in},
                        {"mcmc_scale_multiplier", s.mcmc_scale_multiplier},
                        {"resample_to", s.resample_to}};
}

template <typename Cfg>
ordered_json model_params_json(const Cfg& c) {
    ordered_json m;
    switch (c.model) {
        case ModelKind::normal_parabola:
            m = ordered_json{{"n", c.parabola.n},
                             {"theta_true", c.parabola.theta_true},
                             {"prior_lo", c.parabola.prior_lo},
                             {"prior_hi", c.parabola.prior_hi},
                             {"suffstat", c.parabola.suffstat}};
            break;
        case ModelKind::equicorr:
            m = ordered_json{
                {"n", c.equicorr.n}, {"q", c.equicorr.q}, {"theta_true", c.equicorr.theta_true}};
            break;
        case ModelKind::probit:
            m = ordered_json{
                {"n", c.probit.n}, {"q", c.probit.q}, {"theta_true", c.probit.theta_true}};
            break;
        case ModelKind::smith:
            m = ordered_json{{"grid_nx", c.smith.grid_nx},
                             {"grid_ny", c.smith.grid_ny},
                             {"grid_spacing", c.smith.grid_spacing},
                             {"n_years", c.smith.n_years},
                             {"theta_true", c.smith.theta_true},
                             {"stations_csv", c.smith.stations_csv},
                             {"maxima_csv", c.smith.maxima_csv}};
            break;
    }
    return m;
}

ordered_json load_json(const std::string& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + what + " file " + path);
    try {
        return ordered_json::parse(in);
    } catch (const ordered_json::exception& e) {
        throw ConfigError(what + ": malformed JSON: " + e.what());
    }
}

}  // namespace

std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::normal_parabola: return "normal-parabola";
        case ModelKind::equicorr: return "equicorr";
        case ModelKind::probit: return "probit";
        case ModelKind::smith: return "smith";
    }
    return "?";
}

std::string to_string(MethodKind m) {
    switch (m) {
        case MethodKind::abc_cs: return "abc-cs";
        case MethodKind::abc_suffstat: return "abc-suffstat";
        case MethodKind::abc_counts: return "abc-counts";
        case MethodKind::pairwise_mcmc: return "pairwise-mcmc";
        case MethodKind::calibrated_pairwise_mcmc: return "calibrated-pairwise-mcmc";
        case MethodKind::full_mcmc: return "full-mcmc";
    }
    return "?";
}

RunConfig parse_config_json(const nlohmann::json& plain) {
    const ordered_json j = ordered_json::parse(plain.dump());
    require_keys(j, "config",
                 {"model", "method", "seed", "output_dir", "godambe_replications", "workers",
                  "sampler", "model_params"});
    RunConfig c;
    if (!j.contains("model")) throw ConfigError("config: missing required key 'model'");
    c.model = parse_model(j.at("model").get<std::string>());
    if (!j.contains("method")) throw ConfigError("config: missing required key 'method'");
    c.method = parse_method(j.at("method").get<std::string>());
    c.seed = get_or<std::uint64_t>(j, "config", "seed", c.seed);
    c.output_dir = get_or<std::string>(j, "config", "output_dir", c.output_dir);
    c.godambe_replications =
        get_or<std::size_t>(j, "config", "godambe_replications", c.godambe_replications);
    if (c.godambe_replications < 100)
        throw ConfigError("config.godambe_replications: must be >= 100");
    c.workers = get_or<std::size_t>(j, "config", "workers", 0);
    c.sampler = parse_sampler(j);
    switch (c.model) {
        case ModelKind::normal_parabola: c.parabola = parse_parabola(j); break;
        case ModelKind::equicorr: c.equicorr = parse_equicorr(j); break;
        case ModelKind::probit: c.probit = parse_probit(j); break;
        case ModelKind::smith: c.smith = parse_smith(j); break;
    }
    check_capability(c.model, c.method, c.probit.q);

    ordered_json snap;
    snap["model"] = to_string(c.model);
    snap["method"] = to_string(c.method);
    snap["seed"] = c.seed;
    snap["godambe_replications"] = c.godambe_replications;
    snap["sampler"] = sampler_json(c.sampler);
    snap["model_params"] = model_params_json(c);
    c.snapshot_json = snap.dump(2);
    return c;
}

RunConfig parse_config(const std::string& path) {
    return parse_config_json(nlohmann::json::parse(load_json(path, "config").dump()));
}

StudyConfigFile parse_study_config_json(const nlohmann::json& plain) {
    const ordered_json j = ordered_json::parse(plain.dump());
    require_keys(j, "study",
                 {"model", "methods", "n_trials", "seed", "output_dir", "godambe_replications",
                  "workers", "sampler", "model_params", "true_theta"});
    StudyConfigFile s;
    if (!j.contains("model")) throw ConfigError("study: missing required key 'model'");
    s.model = parse_model(j.at("model").get<std::string>());
    if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty())
        throw ConfigError("study: 'methods' must be a non-empty array");
    for (const auto& m : j.at("methods")) s.methods.push_back(parse_method(m.get<std::string>()));
    s.seed = get_or<std::uint64_t>(j, "study", "seed", s.seed);
    s.output_dir = get_or<std::string>(j, "study", "output_dir", s.output_dir);
    s.godambe_replications =
        get_or<std::size_t>(j, "study", "godambe_replications", s.godambe_replications);
    if (s.godambe_replications < 100)
        throw ConfigError("study.godambe_replications: must be >= 100");
    s.workers = get_or<std::size_t>(j, "study", "workers", 0);
    s.n_trials = get_or<std::size_t>(j, "study", "n_trials", s.n_trials);
    if (s.n_trials < 1) throw ConfigError("study.n_trials: must be >= 1");
    s.sampler = parse_sampler(j);
    switch (s.model) {
        case ModelKind::normal_parabola:
            s.parabola = parse_parabola(j);
            s.true_theta = {s.parabola.theta_true};
            break;
        case ModelKind::equicorr:
            s.equicorr = parse_equicorr(j);
            s.true_theta = s.equicorr.theta_true;
            break;
        case ModelKind::probit:
            s.probit = parse_probit(j);
            s.true_theta = s.probit.theta_true;
            break;
        case ModelKind::smith:
            s.smith = parse_smith(j);
            s.true_theta = s.smith.theta_true;
            break;
    }
    if (j.contains("true_theta"))
        s.true_theta = get_vec(j, "study", "true_theta", s.true_theta, s.true_theta.size());
    for (const auto& m : s.methods) check_capability(s.model, m, s.probit.q);

    const std::uint64_t need = static_cast<std::uint64_t>(s.sampler.n_proposals) +
                               s.godambe_replications + s.sampler.mcmc_iterations + 10000;
    if (need > kStudyMethodStride)
        throw ConfigError("study: sampler budget exceeds the per-method stream block of " +
                          std::to_string(kStudyMethodStride) + " ids");

    ordered_json snap;
    snap["model"] = to_string(s.model);
    ordered_json method_names = ordered_json::array();
    for (auto m : s.methods) method_names.push_back(to_string(m));
    snap["methods"] = method_names;
    snap["n_trials"] = s.n_trials;
    snap["seed"] = s.seed;
    snap["true_theta"] = s.true_theta;
    snap["godambe_replications"] = s.godambe_replications;
    snap["sampler"] = sampler_json(s.sampler);
    snap["model_params"] = model_params_json(s);
    s.snapshot_json = snap.dump(2);
    return s;
}

StudyConfigFile parse_study_config(const std::string& path) {
    return parse_study_config_json(nlohmann::json::parse(load_json(path, "study config").dump()));
}

}  // namespace abccs
