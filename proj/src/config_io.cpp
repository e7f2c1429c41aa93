#include "coss/config_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "coss/errors.hpp"

namespace coss {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& key, const std::string& what) {
    throw ConfigError(source + ": key '" + key + "': " + what);
}

double get_number(const json& j, const std::string& source, const std::string& key) {
    if (!j.is_number()) fail(source, key, "expected a number");
    return j.get<double>();
}

std::size_t get_count(const json& j, const std::string& source, const std::string& key) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        fail(source, key, "expected a non-negative integer");
    }
    return j.get<std::size_t>();
}

CovariateDistribution parse_covariate(const json& j, const std::string& source) {
    if (!j.is_object()) fail(source, "covariate", "expected an object");
    const auto dist_it = j.find("dist");
    if (dist_it == j.end() || !dist_it->is_string()) {
        fail(source, "covariate.dist", "expected \"uniform\" or \"normal\"");
    }
    const std::string dist = dist_it->get<std::string>();
    CovariateDistribution out;
    if (dist == "uniform") {
        out.kind = CovariateDistribution::Kind::Uniform;
        for (const auto& [key, value] : j.items()) {
            if (key == "dist") continue;
            if (key == "lo") out.lo = get_number(value, source, "covariate.lo");
            else if (key == "hi") out.hi = get_number(value, source, "covariate.hi");
            else fail(source, "covariate." + key, "unknown key");
        }
    } else if (dist == "normal") {
        out.kind = CovariateDistribution::Kind::Normal;
        for (const auto& [key, value] : j.items()) {
            if (key == "dist") continue;
            if (key == "mean") out.mean = get_number(value, source, "covariate.mean");
            else if (key == "sd") out.sd = get_number(value, source, "covariate.sd");
            else fail(source, "covariate." + key, "unknown key");
        }
    } else {
        fail(source, "covariate.dist", "expected \"uniform\" or \"normal\", got \"" + dist + "\"");
    }
    return out;
}

}  // namespace

SimulationConfig parse_config_json(const std::string& text, const std::string& source_name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source_name + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(source_name + ": top level must be an object");

    SimulationConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "relationship") {
            if (!value.is_string()) fail(source_name, key, "expected \"linear\" or \"quadratic\"");
            const std::string rel = value.get<std::string>();
            if (rel == "linear") cfg.relationship = Relationship::Linear;
            else if (rel == "quadratic") cfg.relationship = Relationship::Quadratic;
            else fail(source_name, key, "expected \"linear\" or \"quadratic\", got \"" + rel + "\"");
        } else if (key == "a") cfg.a = get_number(value, source_name, key);
        else if (key == "b") cfg.b = get_number(value, source_name, key);
        else if (key == "c") cfg.c = get_number(value, source_name, key);
        else if (key == "mu") cfg.mu = get_number(value, source_name, key);
        else if (key == "eps0") cfg.eps0 = get_number(value, source_name, key);
        else if (key == "eps1") cfg.eps1 = get_number(value, source_name, key);
        else if (key == "population") cfg.population = get_count(value, source_name, key);
        else if (key == "sample_size") cfg.sample_size = get_count(value, source_name, key);
        else if (key == "replications") cfg.replications = get_count(value, source_name, key);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(get_count(value, source_name, key));
        else if (key == "coss_treat_first") {
            if (!value.is_boolean()) fail(source_name, key, "expected true/false");
            cfg.coss_treat_first = value.get<bool>();
        } else if (key == "covariate") {
            cfg.covariate = parse_covariate(value, source_name);
        } else {
            fail(source_name, key, "unknown key");
        }
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source_name + ": " + e.what());
    }
    return cfg;
}

SimulationConfig load_config_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str(), path.string());
}

std::string config_to_json(const SimulationConfig& config) {
    json j;
    j["relationship"] = config.relationship == Relationship::Linear ? "linear" : "quadratic";
    j["a"] = config.a;
    j["b"] = config.b;
    j["c"] = config.c;
    j["mu"] = config.mu;
    j["eps0"] = config.eps0;
    j["eps1"] = config.eps1;
    j["population"] = config.population;
    j["sample_size"] = config.sample_size;
    j["replications"] = config.replications;
    j["seed"] = config.seed;
    j["coss_treat_first"] = config.coss_treat_first;
    if (config.covariate.kind == CovariateDistribution::Kind::Uniform) {
        j["covariate"] = {{"dist", "uniform"}, {"lo", config.covariate.lo}, {"hi", config.covariate.hi}};
    } else {
        j["covariate"] = {{"dist", "normal"}, {"mean", config.covariate.mean}, {"sd", config.covariate.sd}};
    }
    return j.dump(2) + "\n";
}

}  // namespace coss
