#pragma once

// Flat `key = value` configuration with dotted namespaces.
//
//   # comment
//   grid.n = 2
//   minimize.eps = 0.2, 0.1, 0.05
//
// Every subcommand declares a schema (key, default, help). Keys missing
// from the schema are rejected; the resolved view fills in defaults and
// is written next to the outputs.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ymhlab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SchemaEntry {
    std::string key;
    std::string default_value;
    std::string help;
};

using Schema = std::vector<SchemaEntry>;

class Config {
public:
    // Throws ConfigError with the origin and line number on malformed lines
    // or duplicate keys.
    static Config parse(const std::string& text, const std::string& origin = "<config>");
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Schema defaults overlaid with the configuration.
class Resolved {
public:
    // Throws ConfigError naming every unknown key.
    Resolved(const Config& cfg, const Schema& schema);

    const std::string& text(const std::string& key) const;
    double real(const std::string& key) const;
    long integer(const std::string& key) const;
    std::uint64_t u64(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<long> integers(const std::string& key) const;

    // One `key = value` line per schema key, sorted by key.
    std::string dump() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace ymhlab
