#include "swfem/io/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "swfem/error.hpp"

namespace swfem {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "config line " + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(where + "empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (c.has(full)) throw ConfigError(where + "duplicate key " + full);
        c.values_[full] = trim(line.substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::optional<std::string> Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> Config::get_double(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(*v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v->size() || !std::isfinite(d)) throw ConfigError(key + ": not a finite number: '" + *v + "'");
    return d;
}

std::optional<int> Config::get_int(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    std::size_t used = 0;
    int i = 0;
    try {
        i = std::stoi(*v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v->size()) throw ConfigError(key + ": not an integer: '" + *v + "'");
    return i;
}

std::optional<bool> Config::get_bool(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    std::transform(v->begin(), v->end(), v->begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (*v == "true" || *v == "yes" || *v == "on" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "off" || *v == "0") return false;
    throw ConfigError(key + ": not a boolean: '" + *v + "'");
}

}  // namespace swfem
