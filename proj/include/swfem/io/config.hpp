#pragma once

#include <map>
#include <optional>
#include <string>

namespace swfem {

/// Plain-text configuration: `key = value` lines, optional `[section]`
/// headers that prefix later keys as `section.key`, and `#` or `;` comments.
class Config {
public:
    /// Throws ConfigError (with the line number) on malformed lines or
    /// duplicate keys, IoError when the file cannot be read.
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    /// Typed accessors throw ConfigError when the value does not parse.
    std::optional<double> get_double(const std::string& key) const;
    std::optional<int> get_int(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace swfem
