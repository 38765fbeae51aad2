#include "fzl/config.hpp"

#include <fstream>
#include <sstream>

namespace fzl {

namespace {

std::string trim(const std::string& s)
{
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

Config Config::parse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

Config Config::parse_text(const std::string& text)
{
    Config cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        cfg.values_[key] = value;
    }
    return cfg;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const
{
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const
{
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + it->second + "'");
    }
}

int Config::get_int(const std::string& key, int fallback) const
{
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        int v = std::stoi(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + it->second + "'");
    }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const
{
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an unsigned integer, got '" +
                          it->second + "'");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + it->second + "'");
}

std::vector<std::string> Config::get_list(const std::string& key,
                                          const std::vector<std::string>& fallback) const
{
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::string> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::string Config::get_choice(const std::string& key, const std::string& fallback,
                               const std::set<std::string>& accepted) const
{
    std::string v = get_string(key, fallback);
    if (!accepted.count(v)) {
        std::string opts;
        for (const auto& a : accepted) opts += (opts.empty() ? "" : " | ") + a;
        throw ConfigError("key '" + key + "': invalid value '" + v + "' (accepted: " +
                          opts + ")");
    }
    return v;
}

void Config::validate_keys(const std::set<std::string>& registry) const
{
    for (const auto& [key, value] : values_) {
        if (!registry.count(key)) {
            std::string hint;
            for (const auto& known : registry)
                if (known.rfind(key.substr(0, key.find('.')), 0) == 0) {
                    hint = known;
                    break;
                }
            throw ConfigError("unknown config key '" + key + "'" +
                              (hint.empty() ? "" : " (did you mean '" + hint + "'?)"));
        }
    }
}

std::string Config::serialize() const
{
    std::string out;
    for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
    return out;
}

const std::set<std::string>& config_key_registry()
{
    static const std::set<std::string> registry{
        "gamma",
        "kernel.variant",
        "kernel.kappa",
        "kernel.k2",
        "kernel.soft_core_eps",
        "domain.kind",
        "domain.side",
        "domain.dim",
        "N",
        "seed",
        "mode",
        "init.condition",
        "init.temperature",
        "init.t1",
        "init.t2",
        "init.t3",
        "init.bump_speed",
        "init.bump_temperature",
        "widths.alpha",
        "widths.beta",
        "widths.uniform_x",
        "integrator.scheme",
        "integrator.dt",
        "integrator.t_end",
        "integrator.snapshot_every",
        "rate.kind",
        "rate.amplitude",
        "parallel.threads",
        "parallel.deterministic",
        "probes",
        "oracle.threshold",
        "oracle.lambda_scale",
        "debug.flip_projection",
        // resolved-output extras accepted on replay
        "budget.momentum",
        "budget.energy",
        "budget.tol_j",
        "budget.tol_chain",
        "budget.tol_weak",
        "meta.version",
        "meta.rng",
        "meta.k1",
        "meta.kappa_const",
        "meta.note",
    };
    return registry;
}

} // namespace fzl
