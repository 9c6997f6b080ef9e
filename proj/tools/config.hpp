#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace loewner::cli {

/// Parse or type error at a 1-based line and column (0 when not tied to a
/// position in the file).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line_, int column_)
        : std::runtime_error(msg), line(line_), column(column_) {}
    int line;
    int column;

    /// "origin:line:column: message", or "origin: message" without a position.
    [[nodiscard]] std::string located(const std::string& origin) const
    {
        if (line <= 0)
            return origin + ": " + what();
        return origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what();
    }
};

using Value = std::variant<double, bool, std::string, std::vector<double>, std::vector<std::string>>;

struct Entry {
    Value value;
    int line = 0;
    int column = 0;   // column of the value
};

/// Flat key-value file with one table per block:
///
///     # comment
///     [driver]
///     kind = "bp"
///     p = "(1 + z)/(1 - z)"
///     [grids]
///     radii = [0.3, 0.6]
///
/// Values are numbers, true/false, double-quoted strings, or single-line
/// arrays of numbers or of strings. Keys may appear once per table.
class Config {
public:
    static Config parse(std::string_view text);
    static Config load(const std::filesystem::path& path);

    [[nodiscard]] bool has_section(const std::string& section) const { return tables_.count(section) != 0; }
    [[nodiscard]] bool has(const std::string& section, const std::string& key) const;

    [[nodiscard]] double number(const std::string& section, const std::string& key) const;
    [[nodiscard]] double number(const std::string& section, const std::string& key, double fallback) const;
    [[nodiscard]] bool boolean(const std::string& section, const std::string& key, bool fallback) const;
    [[nodiscard]] std::string string(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::string string(const std::string& section, const std::string& key,
                                     const std::string& fallback) const;
    [[nodiscard]] std::vector<double> numbers(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::vector<double> numbers(const std::string& section, const std::string& key,
                                              std::vector<double> fallback) const;

    /// Raises ConfigError at the first key of `section` outside `allowed`.
    void restrict_keys(const std::string& section, const std::vector<std::string>& allowed) const;
    /// Raises ConfigError at the first table outside `allowed`.
    void restrict_sections(const std::vector<std::string>& allowed) const;

    /// Position of a key, for diagnostics raised by callers.
    [[nodiscard]] const Entry& entry(const std::string& section, const std::string& key) const;

    /// Canonical text of one table (sorted keys, 17-digit numbers), used as a cache key.
    [[nodiscard]] std::string canonical(const std::string& section) const;

private:
    struct Table {
        int line = 0;
        std::map<std::string, Entry> entries;
    };
    [[nodiscard]] const Entry* find(const std::string& section, const std::string& key) const;
    [[noreturn]] void missing(const std::string& section, const std::string& key) const;

    std::map<std::string, Table> tables_;
};

} // namespace loewner::cli
