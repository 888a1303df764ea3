#pragma once

// Scenario-runner plumbing: key = value config parsing that reports every
// error with its line number, deterministic CSV emission (17 significant
// digits, FNV-1a checksum header), and a small self-contained SVG plotter.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace entime {
namespace io {

// ---------- checksums ----------

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// ---------- config parsing ----------

struct ConfigError {
    int line = 0;  // 1-based; 0 when no single line is at fault
    std::string message;
};

struct ScenarioConfig {
    std::string scenario;
    std::string text;  // raw config bytes, checksummed into every output
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;

    bool has(const std::string& key) const { return values.count(key) != 0; }

    // Typed getters run after validation, so conversion cannot fail here.
    double real(const std::string& key, double fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : std::strtod(it->second.c_str(), nullptr);
    }
    long integer(const std::string& key, long fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : std::strtol(it->second.c_str(), nullptr, 10);
    }
    std::uint64_t seed() const {
        return std::strtoull(values.at("seed").c_str(), nullptr, 10);
    }
    std::string text_value(const std::string& key, const std::string& fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
    std::vector<double> real_list(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(values.at(key));
        std::string item;
        while (std::getline(ss, item, ','))
            out.push_back(std::strtod(item.c_str(), nullptr));
        return out;
    }
};

struct ParseResult {
    std::optional<ScenarioConfig> config;
    std::vector<ConfigError> errors;  // every problem found, not just the first
};

namespace detail {

enum class KeyType { u64, integer, real, real_list, boolean, text };

struct KeySpec {
    KeyType type = KeyType::real;
    bool required = false;
};

// Per-scenario key tables. A seed entry marked required makes the scenario
// stochastic by contract; deterministic scenarios reject a seed as unknown
// only if absent from their table, so they simply omit it.
inline const std::map<std::string, std::map<std::string, KeySpec>>& scenario_keys() {
    using T = KeyType;
    static const std::map<std::string, std::map<std::string, KeySpec>> table = {
        {"dem-step",
         {{"n_env", {T::integer}}, {"bandwidth", {T::real}}, {"center", {T::real}},
          {"t_max", {T::real}}, {"samples", {T::integer}}, {"weight0", {T::real}},
          {"output", {T::text}}}},
        {"dem-thermal",
         {{"n_env", {T::integer}}, {"tau", {T::real}}, {"t_max", {T::real}},
          {"samples", {T::integer}}, {"weight0", {T::real}}, {"output", {T::text}}}},
        {"dem-discrete",
         {{"frequencies", {T::real_list, true}}, {"weights", {T::real_list, true}},
          {"t_max", {T::real, true}}, {"samples", {T::integer}},
          {"weight0", {T::real}}, {"output", {T::text}}}},
        {"epoch-chain",
         {{"seed", {T::u64, true}}, {"n_env", {T::integer}}, {"bandwidth", {T::real}},
          {"epochs", {T::integer}}, {"spacing", {T::real}}, {"weight0", {T::real}},
          {"mode", {T::text}}, {"remix", {T::boolean}}, {"output", {T::text}}}},
        {"multipartite-chain",
         {{"seed", {T::u64, true}}, {"dims", {T::real_list}}, {"output", {T::text}}}},
        {"grw-trajectory",
         {{"seed", {T::u64, true}}, {"x_min", {T::real}}, {"x_max", {T::real}},
          {"n_points", {T::integer}}, {"sigma", {T::real}}, {"center", {T::real}},
          {"rate", {T::real}}, {"alpha", {T::real}}, {"t_end", {T::real}},
          {"samples", {T::integer}}, {"free_h", {T::boolean}}, {"output", {T::text}}}},
        {"grw-ensemble",
         {{"seed", {T::u64, true}}, {"x_min", {T::real}}, {"x_max", {T::real}},
          {"n_points", {T::integer}}, {"sigma", {T::real}}, {"x0", {T::real}},
          {"rate", {T::real}}, {"alpha", {T::real}}, {"t_end", {T::real}},
          {"samples", {T::integer}}, {"n_traj", {T::integer}}, {"rk4_dt", {T::real}},
          {"output", {T::text}}}},
        {"master-eq",
         {{"x_min", {T::real}}, {"x_max", {T::real}}, {"n_points", {T::integer}},
          {"sigma", {T::real}}, {"x0", {T::real}}, {"rate", {T::real}},
          {"alpha", {T::real}}, {"t_end", {T::real}}, {"samples", {T::integer}},
          {"rk4_dt", {T::real}}, {"free_h", {T::boolean}}, {"output", {T::text}}}},
        {"energy-audit",
         {{"seed", {T::u64, true}}, {"n_env", {T::integer}}, {"bandwidth", {T::real}},
          {"center", {T::real}}, {"weight0", {T::real}}, {"mode", {T::text}},
          {"t_max", {T::real}}, {"samples", {T::integer}}, {"scale", {T::real}},
          {"output", {T::text}}}},
        {"bipartite-random",
         {{"seed", {T::u64, true}}, {"dim_s", {T::integer}}, {"dim_e", {T::integer}},
          {"trials", {T::integer}}, {"output", {T::text}}}},
        {"thermo-clausius",
         {{"n_levels", {T::integer}}, {"T", {T::real}}, {"V", {T::real}},
          {"dv", {T::real}}, {"halvings", {T::integer}}, {"output", {T::text}}}},
        {"gas-mixing",
         {{"N", {T::integer, true}}, {"T", {T::real, true}}, {"dT", {T::real, true}},
          {"samples", {T::integer}}, {"output", {T::text}}}},
    };
    return table;
}

inline bool parse_full(const std::string& s, KeyType t) {
    const char* c = s.c_str();
    char* end = nullptr;
    switch (t) {
        case KeyType::u64:
            if (s.empty() || s[0] == '-') return false;
            std::strtoull(c, &end, 10);
            return end && *end == '\0';
        case KeyType::integer:
            std::strtol(c, &end, 10);
            return end && *end == '\0';
        case KeyType::real:
            std::strtod(c, &end);
            return end && *end == '\0';
        case KeyType::real_list: {
            std::stringstream ss(s);
            std::string item;
            int count = 0;
            while (std::getline(ss, item, ',')) {
                std::strtod(item.c_str(), &end);
                if (!end || *end != '\0' || item.empty()) return false;
                ++count;
            }
            return count > 0;
        }
        case KeyType::boolean:
            return s == "true" || s == "false" || s == "0" || s == "1";
        case KeyType::text:
            return !s.empty();
    }
    return false;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

inline ParseResult parse_config(const std::string& text) {
    ParseResult result;
    ScenarioConfig cfg;
    cfg.text = text;

    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            result.errors.push_back({lineno, "TypeError: expected key = value"});
            continue;
        }
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            result.errors.push_back({lineno, "TypeError: empty key or value"});
            continue;
        }
        if (cfg.values.count(key)) {
            result.errors.push_back({lineno, "TypeError: duplicate assignment of '" + key + "'"});
            continue;
        }
        cfg.values[key] = value;
        cfg.lines[key] = lineno;
    }

    auto sc = cfg.values.find("scenario");
    if (sc == cfg.values.end()) {
        result.errors.push_back({0, "MissingKey: 'scenario'"});
        return result;
    }
    int scenario_line = cfg.lines["scenario"];
    const auto& table = detail::scenario_keys();
    auto spec = table.find(sc->second);
    if (spec == table.end()) {
        result.errors.push_back({scenario_line, "TypeError: unknown scenario '" + sc->second + "'"});
        return result;
    }
    cfg.scenario = sc->second;

    for (const auto& [key, value] : cfg.values) {
        if (key == "scenario") continue;
        auto ks = spec->second.find(key);
        if (ks == spec->second.end()) {
            result.errors.push_back({cfg.lines[key], "UnknownKey: '" + key
                + "' is not a key of scenario '" + cfg.scenario + "'"});
        } else if (!detail::parse_full(value, ks->second.type)) {
            result.errors.push_back({cfg.lines[key], "TypeError: bad value '" + value
                + "' for key '" + key + "'"});
        }
    }
    // Missing keys have no line of their own; they are reported against the
    // scenario declaration that made them mandatory.
    for (const auto& [key, ks] : spec->second)
        if (ks.required && !cfg.values.count(key))
            result.errors.push_back({scenario_line, "MissingKey: '" + key
                + "' is required by scenario '" + cfg.scenario + "'"});

    if (result.errors.empty()) result.config = std::move(cfg);
    return result;
}

// ---------- CSV emission ----------

// Accumulates rows in memory so the checksum can cover the exact bytes
// written. All reals go through %.17g for round-trip exactness.
class CsvWriter {
public:
    CsvWriter(const std::vector<std::string>& columns, std::uint64_t config_checksum) {
        buffer_ = "# config_checksum=" + hex64(config_checksum) + "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            buffer_ += (i ? "," : "") + columns[i];
        buffer_ += "\n";
        width_ = columns.size();
    }

    class Row {
    public:
        explicit Row(CsvWriter& w) : writer_(w) {}
        ~Row() { writer_.end_row(cells_); }
        Row& operator<<(double v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            cells_.push_back(buf);
            return *this;
        }
        Row& operator<<(long v) {
            cells_.push_back(std::to_string(v));
            return *this;
        }
        Row& operator<<(int v) { return *this << static_cast<long>(v); }

    private:
        CsvWriter& writer_;
        std::vector<std::string> cells_;
    };

    Row row() { return Row(*this); }

    const std::string& bytes() const { return buffer_; }
    std::uint64_t checksum() const { return fnv1a64(buffer_); }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("CsvWriter: cannot open '" + path + "'");
        out << buffer_;
    }

private:
    friend class Row;
    void end_row(const std::vector<std::string>& cells) {
        if (cells.size() != width_)
            throw std::logic_error("CsvWriter: row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i)
            buffer_ += (i ? "," : "") + cells[i];
        buffer_ += "\n";
    }

    std::string buffer_;
    std::size_t width_ = 0;
};

// ---------- SVG line plots ----------

// Minimal static plot: every numeric series against the first column, fixed
// palette, no external assets. Good enough to eyeball a decay curve.
inline std::string svg_line_plot(const std::string& title,
                                 const std::vector<std::string>& columns,
                                 const std::vector<std::vector<double>>& rows) {
    const double w = 720, h = 480, ml = 60, mr = 20, mt = 40, mb = 40;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    if (rows.empty() || columns.size() < 2) {
        svg << "</svg>\n";
        return svg.str();
    }

    double x_lo = rows.front()[0], x_hi = x_lo, y_lo = rows.front()[1], y_hi = y_lo;
    for (const auto& r : rows) {
        x_lo = std::min(x_lo, r[0]);
        x_hi = std::max(x_hi, r[0]);
        for (std::size_t c = 1; c < r.size(); ++c) {
            y_lo = std::min(y_lo, r[c]);
            y_hi = std::max(y_hi, r[c]);
        }
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - y_lo) / (y_hi - y_lo) * (h - mt - mb); };

    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr
        << "\" height=\"" << h - mt - mb << "\" fill=\"none\" stroke=\"#888\"/>\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", y_lo);
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << py(y_lo) << "\" text-anchor=\"end\" "
        << "font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", y_hi);
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << py(y_hi) + 10 << "\" text-anchor=\"end\" "
        << "font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", x_lo);
    svg << "<text x=\"" << px(x_lo) << "\" y=\"" << h - mb + 16
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", x_hi);
    svg << "<text x=\"" << px(x_hi) << "\" y=\"" << h - mb + 16 << "\" text-anchor=\"end\" "
        << "font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";

    for (std::size_t c = 1; c < columns.size(); ++c) {
        const char* color = palette[(c - 1) % 6];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(r[0]), py(r[c]));
            svg << buf;
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << w - mr - 8 << "\" y=\"" << mt + 16 * c
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
            << color << "\">" << columns[c] << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace io
}  // namespace entime
