#include "delayrc/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "delayrc/errors.hpp"

namespace delayrc {

namespace {

using boost::property_tree::ptree;

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Drops a trailing "# ..." or "; ..." comment that sits outside quotes.
std::string strip_comment(const std::string& s) {
    char quote = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char ch = s[i];
        if (quote) {
            if (ch == quote) quote = 0;
        } else if (ch == '"' || ch == '\'') {
            quote = ch;
        } else if ((ch == '#' || ch == ';') && (i == 0 || std::isspace(static_cast<unsigned char>(s[i - 1])))) {
            return s.substr(0, i);
        }
    }
    return s;
}

std::string unquote(std::string s) {
    s = strip_comment(s);
    const auto first = s.find_first_not_of(" \t");
    const auto last = s.find_last_not_of(" \t");
    s = first == std::string::npos ? "" : s.substr(first, last - first + 1);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

// One [section] with lower-cased keys; every key must be consumed.
class Section {
public:
    Section(std::string name, const ptree* tree) : name_(std::move(name)) {
        if (!tree) return;
        for (const auto& [key, node] : *tree) {
            if (!node.empty()) throw ConfigError("config: nested keys are not supported in [" + name_ + "]");
            const auto k = lower(key);
            if (!values_.emplace(k, unquote(node.data())).second) {
                throw ConfigError("config: duplicate key '" + key + "' in [" + name_ + "]");
            }
        }
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string text(const std::string& key, const std::string& fallback) {
        used_.insert(key);
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double real(const std::string& key, double fallback) {
        used_.insert(key);
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(it->second, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != it->second.size()) {
            throw ConfigError("config: [" + name_ + "] " + key + " = '" + it->second + "' is not a number");
        }
        return v;
    }

    long long integer(const std::string& key, long long fallback) {
        const double v = real(key, static_cast<double>(fallback));
        if (v != std::floor(v)) {
            throw ConfigError("config: [" + name_ + "] " + key + " must be an integer");
        }
        return static_cast<long long>(v);
    }

    void check_consumed() const {
        for (const auto& [key, value] : values_) {
            if (!used_.count(key)) throw ConfigError("config: unknown key '" + key + "' in [" + name_ + "]");
        }
    }

private:
    std::string name_;
    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
};

}  // namespace

ExperimentConfig RunConfig::experiment() const {
    ExperimentConfig ex;
    ex.model = model;
    ex.timing = timing();
    ex.k_train = k_train;
    ex.buffer_inputs = buffer_inputs;
    ex.n_masks = n_masks;
    ex.seed = seed;
    ex.integrator = integrator;
    ex.capacity.l_max = l_max;
    ex.capacity.ridge.lambda_rule = lambda_rule;
    ex.threads = threads;
    return ex;
}

RunConfig parse_config(const std::string& text) {
    ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    std::map<std::string, const ptree*> sections;
    for (const auto& [name, node] : tree) {
        if (node.empty() && !node.data().empty()) {
            throw ConfigError("config: key '" + name + "' must belong to a section");
        }
        sections[lower(name)] = &node;
    }
    for (const auto& [name, node] : sections) {
        if (name != "model" && name != "timing" && name != "sim") {
            throw ConfigError("config: unknown section [" + name + "]");
        }
    }
    auto section = [&](const std::string& name) {
        const auto it = sections.find(name);
        return Section(name, it == sections.end() ? nullptr : it->second);
    };

    RunConfig cfg;
    Section model = section("model");
    Section timing = section("timing");
    Section sim = section("sim");

    const std::string type = lower(model.text("type", "stuart_landau"));
    if (type == "stuart_landau") {
        StuartLandauParams p;
        p.p_sl = model.real("p_sl", p.p_sl);
        p.kappa = model.real("kappa", p.kappa);
        p.gamma_nl = model.real("gamma_nl", p.gamma_nl);
        p.eta = model.real("eta", p.eta);
        if (!(p.eta > 0.0)) throw ConfigError("config: eta must be positive");
        cfg.model = p;
    } else if (type == "mackey_glass") {
        MackeyGlassParams p;
        p.p_mg = model.real("p_mg", p.p_mg);
        p.alpha = model.real("alpha", p.alpha);
        p.exponent_p = model.real("exponent_p", p.exponent_p);
        p.eta = model.real("eta", p.eta);
        if (!(p.eta > 0.0)) throw ConfigError("config: eta must be positive");
        cfg.model = p;
    } else if (type == "custom") {
        LinearDdeParams p;
        p.a = model.real("a", p.a);
        p.b = model.real("b", p.b);
        p.c = model.real("c", p.c);
        cfg.model = p;
    } else {
        throw ConfigError("config: unknown model type '" + type +
                          "' (expected stuart_landau, mackey_glass or custom)");
    }
    // The delay may be given with the model parameters instead of the timing.
    const double model_tau = model.real("tau", -1.0);

    cfg.T = timing.real("t", cfg.T);
    cfg.n_v = static_cast<int>(timing.integer("n_v", cfg.n_v));
    if (timing.has("tau") && model_tau > 0.0) {
        throw ConfigError("config: tau given in both [model] and [timing]");
    }
    cfg.tau = timing.real("tau", model_tau > 0.0 ? model_tau : cfg.T);

    cfg.integrator.dt = sim.real("dt", cfg.integrator.dt);
    cfg.integrator.transient_time = sim.real("transient_time", cfg.integrator.transient_time);
    cfg.buffer_inputs = static_cast<int>(sim.integer("buffer_inputs", cfg.buffer_inputs));
    cfg.k_train = static_cast<int>(sim.integer("k", cfg.k_train));
    cfg.n_masks = static_cast<int>(sim.integer("masks", cfg.n_masks));
    const long long seed = sim.integer("seed", static_cast<long long>(cfg.seed));
    if (seed < 0) throw ConfigError("config: seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.l_max = static_cast<int>(sim.integer("l_max", cfg.l_max));
    cfg.lambda_rule = sim.real("lambda_rule", cfg.lambda_rule);
    const long long threads = sim.integer("threads", 0);
    if (threads < 0) throw ConfigError("config: threads must be nonnegative");
    cfg.threads = static_cast<unsigned>(threads);

    model.check_consumed();
    timing.check_consumed();
    sim.check_consumed();

    if (!(cfg.integrator.dt > 0.0)) throw ConfigError("config: dt must be positive");
    if (cfg.k_train < 1) throw ConfigError("config: K must be positive");
    if (cfg.buffer_inputs < 0) throw ConfigError("config: buffer_inputs must be nonnegative");
    if (cfg.n_masks < 1) throw ConfigError("config: masks must be positive");
    if (cfg.l_max < 0) throw ConfigError("config: l_max must be nonnegative");
    if (!(cfg.lambda_rule > 0.0)) throw ConfigError("config: lambda_rule must be positive");
    (void)cfg.timing();  // validates T, N_V, tau
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

}  // namespace delayrc
