#include "config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ymhlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty() || k.front() == '.' || k.back() == '.') return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_')) return false;
    return true;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': cannot parse '" + v + "'");
    return out;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
        if (cfg.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str(), path);
}

Resolved::Resolved(const Config& cfg, const Schema& schema) {
    for (const auto& e : schema) values_[e.key] = e.default_value;
    std::string unknown;
    for (const auto& [k, v] : cfg.values()) {
        auto it = values_.find(k);
        if (it == values_.end()) {
            unknown += (unknown.empty() ? "" : ", ") + k;
            continue;
        }
        it->second = v;
    }
    if (!unknown.empty()) throw ConfigError("unknown config keys: " + unknown);
}

const std::string& Resolved::text(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("config key '" + key + "' is not part of this command's schema");
    return it->second;
}

double Resolved::real(const std::string& key) const {
    const std::string& v = text(key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

long Resolved::integer(const std::string& key) const { return parse_number<long>(key, text(key)); }

std::uint64_t Resolved::u64(const std::string& key) const { return parse_number<std::uint64_t>(key, text(key)); }

bool Resolved::flag(const std::string& key) const {
    const std::string& v = text(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> Resolved::reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(text(key))) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': bad list entry '" + item + "'");
        }
    }
    return out;
}

std::vector<long> Resolved::integers(const std::string& key) const {
    std::vector<long> out;
    for (const auto& item : split_list(text(key))) out.push_back(parse_number<long>(key, item));
    return out;
}

std::string Resolved::dump() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

}  // namespace ymhlab
