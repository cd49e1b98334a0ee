#include "config.hpp"

#include <fstream>

#include "json.hpp"

namespace sliplab::cli {

using nlohmann::json;

namespace {

BuilderKind parse_builder(const std::string& name) {
    if (name == "recovery_e1") return BuilderKind::RecoveryE1;
    if (name == "single_scale") return BuilderKind::SingleScale;
    if (name == "nested_laminate") return BuilderKind::NestedLaminate;
    if (name == "piecewise") return BuilderKind::Piecewise;
    throw Error(errc::invalid_argument, "unknown builder '" + name + "'");
}

HRule parse_h_rule(const json& j) {
    HRule rule;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "fixed") {
        rule.kind = HRule::Kind::Fixed;
        rule.value = j.at("value").get<double>();
    } else if (kind == "eps_over") {
        rule.kind = HRule::Kind::EpsOver;
        rule.value = j.at("value").get<double>();
    } else if (kind == "eps_squared") {
        rule.kind = HRule::Kind::EpsSquared;
        rule.value = 0.0;
    } else {
        throw Error(errc::invalid_argument, "unknown h_rule kind '" + kind + "'");
    }
    return rule;
}

}  // namespace

int pgm_component_index(const std::string& name) {
    if (name == "A11") return 0;
    if (name == "A12") return 1;
    if (name == "A21") return 2;
    if (name == "A22") return 3;
    throw Error(errc::invalid_argument, "pgm component must be one of A11,A12,A21,A22");
}

void RunConfig::validate() const {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw Error(errc::invalid_argument, "lambda out of (0,1)");
    }
    if (epsilon_list.empty()) {
        throw Error(errc::invalid_argument, "epsilon list is empty");
    }
    for (double e : epsilon_list) {
        if (!(e > 0.0)) throw Error(errc::invalid_argument, "epsilon must be positive");
    }
    if (tau < 0.0) throw Error(errc::invalid_argument, "tau is negative");
    if (tau > 0.0 && !system().is_e1()) {
        throw Error(errc::unsupported_tau, "tau > 0 requires slip direction e1");
    }
    if (!(tol > 0.0)) throw Error(errc::invalid_argument, "tolerance must be positive");
    if (outputs.raster_nx < 1 || outputs.raster_ny < 1) {
        throw Error(errc::invalid_argument, "raster resolution must be >= 1x1");
    }
    pgm_component_index(outputs.pgm_component);
    if (n_soft_bands < 1) throw Error(errc::invalid_argument, "n_soft_bands must be >= 1");
    profile.validate(domain);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::invalid_argument, "cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(errc::invalid_argument, std::string("config is not valid JSON: ") + e.what());
    }

    RunConfig cfg;
    try {
        if (j.contains("slip")) {
            cfg.slip = {j["slip"].at(0).get<double>(), j["slip"].at(1).get<double>()};
        }
        if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
        if (j.contains("tau")) cfg.tau = j["tau"].get<double>();
        if (j.contains("epsilon_list")) {
            cfg.epsilon_list = j["epsilon_list"].get<std::vector<double>>();
        }
        if (j.contains("h_rule") && !j["h_rule"].is_null()) {
            cfg.h_rule = parse_h_rule(j["h_rule"]);
        }
        if (j.contains("rotation_theta")) cfg.rotation_theta = j["rotation_theta"].get<double>();
        if (j.contains("gamma_profile")) {
            cfg.profile.breakpoints =
                j["gamma_profile"].at("breakpoints").get<std::vector<double>>();
            cfg.profile.values = j["gamma_profile"].at("values").get<std::vector<double>>();
        }
        if (j.contains("domain")) {
            const json& d = j["domain"];
            cfg.domain = {d.at("x_min").get<double>(), d.at("x_max").get<double>(),
                          d.at("y_min").get<double>(), d.at("y_max").get<double>()};
        }
        if (j.contains("builder")) cfg.builder = parse_builder(j["builder"].get<std::string>());
        if (j.contains("matrices")) {
            for (const json& m : j["matrices"]) {
                cfg.matrices.push_back(Mat2{m.at(0).get<double>(), m.at(1).get<double>(),
                                            m.at(2).get<double>(), m.at(3).get<double>()});
            }
        }
        if (j.contains("outputs")) {
            const json& o = j["outputs"];
            if (o.contains("dir")) cfg.outputs.dir = o["dir"].get<std::string>();
            if (o.contains("raster")) {
                cfg.outputs.raster_nx = o["raster"].at(0).get<int>();
                cfg.outputs.raster_ny = o["raster"].at(1).get<int>();
            }
            if (o.contains("pgm_component")) {
                cfg.outputs.pgm_component = o["pgm_component"].get<std::string>();
            }
            if (o.contains("write_pgm")) cfg.outputs.write_pgm = o["write_pgm"].get<bool>();
            if (o.contains("write_csv")) cfg.outputs.write_csv = o["write_csv"].get<bool>();
        }
        if (j.contains("rigidity")) {
            const json& r = j["rigidity"];
            if (r.contains("L")) cfg.rigidity.L = r["L"].get<double>();
            if (r.contains("H")) cfg.rigidity.H = r["H"].get<double>();
            if (r.contains("n_grid")) cfg.rigidity.n_grid = r["n_grid"].get<int>();
            if (r.contains("cases")) cfg.rigidity.cases = r["cases"].get<int>();
        }
        if (j.contains("n_soft_bands")) cfg.n_soft_bands = j["n_soft_bands"].get<int>();
        if (j.contains("tolerance")) cfg.tol = j["tolerance"].get<double>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned long>();
    } catch (const json::exception& e) {
        throw Error(errc::invalid_argument, std::string("malformed config field: ") + e.what());
    }
    return cfg;
}

}  // namespace sliplab::cli
