#include "config.hpp"

#include "loewner/frame_cache.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace loewner::cli {

namespace {

class LineParser {
public:
    LineParser(std::string_view text, int line) : s_(text), line_(line) {}

    [[noreturn]] void error(const std::string& msg) const { throw ConfigError(msg, line_, column()); }
    [[nodiscard]] int column() const { return static_cast<int>(pos_) + 1; }

    void skip_ws()
    {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t'))
            ++pos_;
    }
    [[nodiscard]] bool at_end_or_comment()
    {
        skip_ws();
        return pos_ >= s_.size() || s_[pos_] == '#';
    }
    [[nodiscard]] char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void expect(char c)
    {
        skip_ws();
        if (peek() != c)
            error(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string identifier()
    {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        if (pos_ == start)
            error("expected a name");
        return std::string(s_.substr(start, pos_ - start));
    }

    std::string quoted()
    {
        const std::size_t open = pos_;
        ++pos_;   // opening quote
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\') {
                ++pos_;
                if (pos_ >= s_.size())
                    break;
                const char c = s_[pos_];
                if (c != '"' && c != '\\')
                    error("unsupported escape sequence");
                out += c;
            } else {
                out += s_[pos_];
            }
            ++pos_;
        }
        if (pos_ >= s_.size()) {
            pos_ = open;
            error("unterminated string");
        }
        ++pos_;
        return out;
    }

    double number()
    {
        std::size_t p = pos_;
        if (p < s_.size() && s_[p] == '+')
            ++p;
        double x = 0.0;
        const auto [end, ec] = std::from_chars(s_.data() + p, s_.data() + s_.size(), x);
        if (ec != std::errc() || end == s_.data() + p)
            error("expected a number, string, boolean or array");
        // "1e", "2x", "1.5.2": report the token, not its tail.
        if (end < s_.data() + s_.size() && (std::isalnum(static_cast<unsigned char>(*end)) || *end == '.'))
            error("malformed number");
        pos_ = static_cast<std::size_t>(end - s_.data());
        return x;
    }

    Value scalar_or_array()
    {
        skip_ws();
        const char c = peek();
        if (c == '"')
            return quoted();
        if (c == '[')
            return array();
        if (s_.substr(pos_, 4) == "true") {
            pos_ += 4;
            return true;
        }
        if (s_.substr(pos_, 5) == "false") {
            pos_ += 5;
            return false;
        }
        return number();
    }

    Value array()
    {
        ++pos_;
        skip_ws();
        if (peek() == ']') {
            ++pos_;
            return std::vector<double>{};
        }
        if (peek() == '"') {
            std::vector<std::string> out;
            for (;;) {
                skip_ws();
                if (peek() != '"')
                    error("array elements must all be strings");
                out.push_back(quoted());
                if (!separator())
                    return out;
            }
        }
        std::vector<double> out;
        for (;;) {
            skip_ws();
            out.push_back(number());
            if (!separator())
                return out;
        }
    }

private:
    // Consumes "," (true) or "]" (false).
    bool separator()
    {
        skip_ws();
        if (peek() == ',') {
            ++pos_;
            return true;
        }
        if (peek() == ']') {
            ++pos_;
            return false;
        }
        error("expected ',' or ']'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_;
};

const char* type_name(const Value& v)
{
    switch (v.index()) {
    case 0: return "a number";
    case 1: return "a boolean";
    case 2: return "a string";
    default: return "an array";
    }
}

} // namespace

Config Config::parse(std::string_view text)
{
    Config cfg;
    Table* current = nullptr;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        ++line_no;
        start = end + 1;

        LineParser lp(line, line_no);
        if (lp.at_end_or_comment())
            continue;
        if (lp.peek() == '[') {
            lp.expect('[');
            const int col = lp.column();
            const std::string name = lp.identifier();
            lp.expect(']');
            if (!lp.at_end_or_comment())
                lp.error("unexpected text after table header");
            if (cfg.tables_.count(name))
                throw ConfigError("table [" + name + "] appears twice", line_no, col);
            current = &cfg.tables_[name];
            current->line = line_no;
            continue;
        }
        const int key_col = lp.column();
        const std::string key = lp.identifier();
        if (!current)
            throw ConfigError("key '" + key + "' outside any table", line_no, key_col);
        lp.expect('=');
        lp.skip_ws();
        Entry e;
        e.line = line_no;
        e.column = lp.column();
        e.value = lp.scalar_or_array();
        if (!lp.at_end_or_comment())
            lp.error("unexpected text after value");
        if (!current->entries.emplace(key, std::move(e)).second)
            throw ConfigError("duplicate key '" + key + "'", line_no, key_col);
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file " + path.string(), 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const Entry* Config::find(const std::string& section, const std::string& key) const
{
    const auto t = tables_.find(section);
    if (t == tables_.end())
        return nullptr;
    const auto e = t->second.entries.find(key);
    return e == t->second.entries.end() ? nullptr : &e->second;
}

bool Config::has(const std::string& section, const std::string& key) const
{
    return find(section, key) != nullptr;
}

void Config::missing(const std::string& section, const std::string& key) const
{
    const auto t = tables_.find(section);
    const int line = t == tables_.end() ? 1 : t->second.line;
    throw ConfigError("missing key " + section + "." + key, line, 1);
}

const Entry& Config::entry(const std::string& section, const std::string& key) const
{
    const Entry* e = find(section, key);
    if (!e)
        missing(section, key);
    return *e;
}

double Config::number(const std::string& section, const std::string& key) const
{
    const Entry& e = entry(section, key);
    if (const double* x = std::get_if<double>(&e.value))
        return *x;
    throw ConfigError(section + "." + key + " must be a number, not " + type_name(e.value), e.line, e.column);
}

double Config::number(const std::string& section, const std::string& key, double fallback) const
{
    return has(section, key) ? number(section, key) : fallback;
}

bool Config::boolean(const std::string& section, const std::string& key, bool fallback) const
{
    const Entry* e = find(section, key);
    if (!e)
        return fallback;
    if (const bool* b = std::get_if<bool>(&e->value))
        return *b;
    throw ConfigError(section + "." + key + " must be true or false", e->line, e->column);
}

std::string Config::string(const std::string& section, const std::string& key) const
{
    const Entry& e = entry(section, key);
    if (const std::string* s = std::get_if<std::string>(&e.value))
        return *s;
    throw ConfigError(section + "." + key + " must be a string, not " + type_name(e.value), e.line, e.column);
}

std::string Config::string(const std::string& section, const std::string& key, const std::string& fallback) const
{
    return has(section, key) ? string(section, key) : fallback;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key) const
{
    const Entry& e = entry(section, key);
    if (const auto* v = std::get_if<std::vector<double>>(&e.value))
        return *v;
    if (const double* x = std::get_if<double>(&e.value))
        return {*x};
    throw ConfigError(section + "." + key + " must be an array of numbers", e.line, e.column);
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    std::vector<double> fallback) const
{
    return has(section, key) ? numbers(section, key) : std::move(fallback);
}

void Config::restrict_keys(const std::string& section, const std::vector<std::string>& allowed) const
{
    const auto t = tables_.find(section);
    if (t == tables_.end())
        return;
    for (const auto& [key, e] : t->second.entries)
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in [" + section + "]", e.line, 1);
}

void Config::restrict_sections(const std::vector<std::string>& allowed) const
{
    for (const auto& [name, t] : tables_)
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
            throw ConfigError("unknown table [" + name + "]", t.line, 1);
}

std::string Config::canonical(const std::string& section) const
{
    std::string out = "[" + section + "]\n";
    const auto t = tables_.find(section);
    if (t == tables_.end())
        return out;
    for (const auto& [key, e] : t->second.entries) {
        out += key + "=";
        std::visit(
            [&out](const auto& v) {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, double>) {
                    out += format_real(v);
                } else if constexpr (std::is_same_v<V, bool>) {
                    out += v ? "true" : "false";
                } else if constexpr (std::is_same_v<V, std::string>) {
                    out += "\"" + v + "\"";
                } else if constexpr (std::is_same_v<V, std::vector<double>>) {
                    for (double x : v)
                        out += format_real(x) + ",";
                } else {
                    for (const auto& s : v)
                        out += "\"" + s + "\",";
                }
            },
            e.value);
        out += "\n";
    }
    return out;
}

} // namespace loewner::cli
