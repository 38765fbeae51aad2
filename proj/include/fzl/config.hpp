#ifndef FZL_CONFIG_HPP
#define FZL_CONFIG_HPP

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fzl {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat `key = value` configuration with dotted namespaces. No nesting, no
// includes; the same grammar is used for run.meta so every run replays from
// its own metadata.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key,
                                      const std::vector<std::string>& fallback) const;

    // enumerated value with a closed set of accepted spellings
    std::string get_choice(const std::string& key, const std::string& fallback,
                           const std::set<std::string>& accepted) const;

    // rejects keys outside the published registry, naming the offender
    void validate_keys(const std::set<std::string>& registry) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    std::string serialize() const;

private:
    std::map<std::string, std::string> values_;
};

// Registry of every key the CLI understands.
const std::set<std::string>& config_key_registry();

} // namespace fzl

#endif
