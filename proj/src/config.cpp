#include "kdv5/config.hpp"

#include "kdv5/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace kdv5 {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// '#' outside a JSON string starts a comment
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
        if (c == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

json value_of(const std::string& raw) {
    try {
        return json::parse(raw);
    } catch (const json::exception&) {
        return json(raw);
    }
}

template <class T>
T as(const json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for " + key + ": " + v.dump());
    }
}

int as_int(const json& v, const std::string& key) {
    const double d = as<double>(v, key);
    if (d != static_cast<int>(d)) throw ConfigError("config: " + key + " must be an integer");
    return static_cast<int>(d);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::optional<json> model;
    std::vector<double> model_params;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const json v = value_of(trim(line.substr(eq + 1)));
        if (!seen.insert(key).second) throw ConfigError("config: repeated key " + key);

        if (key == "experiment") c.experiment = experiment_from_string(as<std::string>(v, key));
        else if (key == "model") model = v;
        else if (key == "model.params") model_params = as<std::vector<double>>(v, key);
        else if (key == "grid.L") c.grid.L = as<double>(v, key);
        else if (key == "grid.N") c.grid.N = as_int(v, key);
        else if (key == "solver.dt") c.solver.dt = as<double>(v, key);
        else if (key == "solver.t_end") c.solver.t_end = as<double>(v, key);
        else if (key == "solver.scheme") c.solver.scheme = scheme_from_string(as<std::string>(v, key));
        else if (key == "solver.dealias") c.solver.dealias = dealias_from_string(as<std::string>(v, key));
        else if (key == "solver.stride") c.solver.stride = as_int(v, key);
        else if (key == "solver.seam_margin") c.solver.seam_margin = as<double>(v, key);
        else if (key == "data.id") c.data.id = as<std::string>(v, key);
        else if (key == "data.params") c.data.params = as<std::map<std::string, double>>(v, key);
        else if (key == "seed") c.seed = as<std::uint64_t>(v, key);
        else if (key == "functionals") {
            if (!v.is_array()) throw ConfigError("config: functionals must be a list");
            for (const auto& f : v) {
                FunctionalSpec s;
                try {
                    for (const auto& [k, x] : f.items())
                        if (k != "kind" && k != "l" && k != "n" && k != "eps" && k != "b" && k != "nu")
                            throw ConfigError("config: unknown functional field " + k);
                    s.kind = f.value("kind", s.kind);
                    s.l = f.value("l", s.l);
                    s.n = f.value("n", s.n);
                    s.eps = f.value("eps", s.eps);
                    s.b = f.value("b", s.b);
                    s.nu = f.value("nu", s.nu);
                } catch (const json::exception& e) {
                    throw ConfigError(std::string("config: functional entry: ") + e.what());
                }
                c.functionals.push_back(s);
            }
        } else if (key == "window.x0") c.window.x0 = as<double>(v, key);
        else if (key == "window.eps") c.window.eps = as<double>(v, key);
        else if (key == "window.b") c.window.b = as<double>(v, key);
        else if (key == "window.R") c.window.R = as<double>(v, key);
        else if (key == "window.nu") c.window.nu = v.is_array() ? as<std::vector<double>>(v, key) : std::vector<double>{as<double>(v, key)};
        else if (key == "l") c.l = as_int(v, key);
        else if (key == "n") c.n = as_int(v, key);
        else if (key == "dt_safety") c.dt_safety = as<double>(v, key);
        else throw ConfigError("config: unknown key " + key);
    }
    if (model) {
        try {
            if (model->is_string()) c.model = catalog(model->get<std::string>(), model_params);
            else c.model = model_from_json(model->dump());
        } catch (const ContractViolation& e) {
            throw ConfigError(e.what());
        }
    } else {
        c.model = catalog("kdv5");
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;  // std::map keys: sorted
    j["experiment"] = to_string(c.experiment);
    j["model"] = json::parse(model_to_json(c.model));
    j["grid"] = {{"L", c.grid.L}, {"N", c.grid.N}};
    j["solver"] = {{"dt", c.solver.dt},
                   {"t_end", c.solver.t_end},
                   {"scheme", to_string(c.solver.scheme)},
                   {"dealias", to_string(c.solver.dealias)},
                   {"stride", c.solver.stride},
                   {"seam_margin", c.solver.seam_margin}};
    j["data"] = {{"id", c.data.id}, {"params", c.data.params}};
    j["seed"] = c.seed;
    j["functionals"] = json::array();
    for (const auto& f : c.functionals)
        j["functionals"].push_back({{"kind", f.kind}, {"l", f.l}, {"n", f.n}, {"eps", f.eps}, {"b", f.b}, {"nu", f.nu}});
    j["window"] = {{"x0", c.window.x0}, {"eps", c.window.eps}, {"b", c.window.b}, {"R", c.window.R}, {"nu", c.window.nu}};
    j["l"] = c.l;
    j["n"] = c.n;
    j["dt_safety"] = c.dt_safety;
    return j.dump();
}

}  // namespace kdv5
