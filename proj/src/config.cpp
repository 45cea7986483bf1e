#include "ctcm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ctcm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config field '" + path + "': " + what);
}

const json& require(const json& j, const char* key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double positive_number(const json& j, const std::string& path) {
    const double v = as_number(j, path);
    if (!(v > 0.0) || !std::isfinite(v)) fail(path, "must be positive and finite");
    return v;
}

int positive_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    const long long v = j.get<long long>();
    if (v < 1) fail(path, "must be at least 1");
    return static_cast<int>(v);
}

std::vector<double> number_list(const json& j, const std::string& path) {
    std::vector<double> out;
    if (j.is_number()) {
        out.push_back(positive_number(j, path));
        return out;
    }
    if (!j.is_array() || j.empty()) fail(path, "expected a number or nonempty list");
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(positive_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<double> vector_field(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

PerturbationDistribution parse_eta(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::string type = require(j, "type", path).get<std::string>();
    PerturbationDistribution eta;
    if (type == "uniform-box") {
        UniformBox box;
        box.center = vector_field(require(j, "center", path), path + ".center");
        box.half_width = vector_field(require(j, "half_width", path), path + ".half_width");
        eta = std::move(box);
    } else if (type == "point-mass") {
        eta = PointMass{vector_field(require(j, "value", path), path + ".value")};
    } else if (type == "discrete-mixture") {
        DiscreteMixture mix;
        mix.weights = vector_field(require(j, "weights", path), path + ".weights");
        const json& atoms = require(j, "atoms", path);
        if (!atoms.is_array()) fail(path + ".atoms", "expected an array of vectors");
        for (std::size_t i = 0; i < atoms.size(); ++i)
            mix.atoms.push_back(vector_field(atoms[i], path + ".atoms[" + std::to_string(i) + "]"));
        eta = std::move(mix);
    } else {
        fail(path + ".type", "unknown perturbation type '" + type + "'");
    }
    try {
        validate(eta);
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return eta;
}

WaitDistribution parse_wait(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::string type = require(j, "type", path).get<std::string>();
    WaitDistribution w;
    if (type == "exponential") {
        if (j.contains("rate"))
            w = ExponentialWait{positive_number(j["rate"], path + ".rate")};
        else
            w = ExponentialWait{1.0 / positive_number(require(j, "mean", path), path + ".mean")};
    } else if (type == "truncated-normal") {
        TruncatedNormalWait tn{};
        tn.location = as_number(require(j, "location", path), path + ".location");
        tn.scale = as_number(require(j, "scale", path), path + ".scale");
        w = tn;
    } else if (type == "continuous-poisson") {
        w = ContinuousPoissonWait(positive_number(require(j, "mean", path), path + ".mean"));
    } else {
        fail(path + ".type", "unknown wait type '" + type + "'");
    }
    try {
        validate(w);
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return w;
}

EngineSpec parse_engine(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::string type = require(j, "type", path).get<std::string>();
    EngineSpec spec;
    if (type == "markov") {
        spec.label = "exponential";
    } else if (type == "semi-markov") {
        SemiMarkovConfig waits{parse_wait(require(j, "attach_wait", path), path + ".attach_wait"),
                               parse_wait(require(j, "detach_wait", path), path + ".detach_wait")};
        spec.label = wait_label(waits.detach_wait);
        if (spec.label != wait_label(waits.attach_wait))
            spec.label = wait_label(waits.attach_wait) + "/" + spec.label;
        spec.waits = std::move(waits);
    } else {
        fail(path + ".type", "unknown engine type '" + type + "'");
    }
    if (j.contains("label")) spec.label = j["label"].get<std::string>();
    return spec;
}

std::pair<std::size_t, std::size_t> line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_of_byte(json_text, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream msg;
        msg << "config is not valid JSON at line " << line << ", column " << col;
        throw ConfigError(msg.str());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    ExperimentConfig cfg;
    try {
        if (j.contains("params")) {
            const json& p = j["params"];
            if (!p.is_object()) fail("params", "expected an object");
            if (p.contains("theta_a")) cfg.theta_a = positive_number(p["theta_a"], "params.theta_a");
            if (p.contains("theta_d")) cfg.theta_d_values = number_list(p["theta_d"], "params.theta_d");
            if (p.contains("n")) {
                cfg.n_values.clear();
                const json& n = p["n"];
                if (n.is_array()) {
                    for (std::size_t i = 0; i < n.size(); ++i)
                        cfg.n_values.push_back(positive_int(n[i], "params.n[" + std::to_string(i) + "]"));
                } else {
                    cfg.n_values.push_back(positive_int(n, "params.n"));
                }
            }
            if (p.contains("eta")) cfg.eta = parse_eta(p["eta"], "params.eta");
        }
        if (j.contains("engine") && j.contains("engines"))
            throw ConfigError("config: give either 'engine' or 'engines', not both");
        if (j.contains("engine")) cfg.engines = {parse_engine(j["engine"], "engine")};
        if (j.contains("engines")) {
            const json& list = j["engines"];
            if (!list.is_array() || list.empty()) fail("engines", "expected a nonempty list");
            cfg.engines.clear();
            for (std::size_t i = 0; i < list.size(); ++i)
                cfg.engines.push_back(parse_engine(list[i], "engines[" + std::to_string(i) + "]"));
        }
        if (j.contains("burn_in_hours"))
            cfg.burn_in_s = 3600.0 * positive_number(j["burn_in_hours"], "burn_in_hours");
        if (j.contains("window_end_hours"))
            cfg.window_end_s = 3600.0 * positive_number(j["window_end_hours"], "window_end_hours");
        cfg.horizon_s = cfg.window_end_s;
        if (j.contains("horizon_hours"))
            cfg.horizon_s = 3600.0 * positive_number(j["horizon_hours"], "horizon_hours");
        if (j.contains("ensemble_size")) cfg.ensemble_size = positive_int(j["ensemble_size"], "ensemble_size");
        if (j.contains("seed")) {
            if (!j["seed"].is_number_integer()) fail("seed", "expected an integer");
            cfg.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("output")) {
            const json& o = j["output"];
            if (!o.is_object()) fail("output", "expected an object");
            if (o.contains("csv") && !o["csv"].is_null()) cfg.csv_path = o["csv"].get<std::string>();
            if (o.contains("jsonl") && !o["jsonl"].is_null())
                cfg.jsonl_path = o["jsonl"].get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (!(cfg.burn_in_s < cfg.window_end_s))
        throw ConfigError("config: burn_in_hours must be smaller than window_end_hours");
    if (!(cfg.window_end_s <= cfg.horizon_s))
        throw ConfigError("config: horizon_hours must be at least window_end_hours");
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

PerturbationDistribution parse_eta_json(const std::string& json_text) {
    return parse_eta(json::parse(json_text), "eta");
}

WaitDistribution parse_wait_json(const std::string& json_text) {
    return parse_wait(json::parse(json_text), "wait");
}

} // namespace ctcm
