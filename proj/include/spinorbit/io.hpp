#pragma once

// CSV output, run manifests and key=value configuration files for the command-line tool.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spinorbit/errors.hpp"

namespace spinorbit::io {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// 17 significant digits, so every double survives a text round trip.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    /// Append a row of pre-formatted cells.
    void add_row(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) throw DomainError("CSV row width does not match header");
        rows_.push_back(std::move(cells));
    }

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }

    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct Manifest {
    std::string subcommand;
    std::map<std::string, std::string> parameters;
    nlohmann::json grids = nlohmann::json::object();
    std::vector<std::string> outputs;
    bool deterministic = true;
    std::string version{kToolVersion};

    nlohmann::json to_json() const {
        return {{"tool", "spinorbit"},
                {"version", version},
                {"subcommand", subcommand},
                {"parameters", parameters},
                {"grids", grids},
                {"deterministic", deterministic},
                {"outputs", outputs}};
    }

    static Manifest from_json(const nlohmann::json& j) {
        Manifest m;
        m.subcommand = j.at("subcommand").get<std::string>();
        m.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
        m.grids = j.value("grids", nlohmann::json::object());
        m.outputs = j.value("outputs", std::vector<std::string>{});
        m.deterministic = j.value("deterministic", true);
        m.version = j.value("version", std::string(kToolVersion));
        return m;
    }
};

inline std::string manifest_path(const std::string& csv_path) { return csv_path + ".manifest.json"; }

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw Error("failed writing '" + path + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Config {
    std::map<std::string, std::string> values;
    std::string subcommand;  // set when the config is a manifest
};

/// Parse either a key=value file (blank lines and '#' comments ignored) or a run manifest.
inline Config parse_config(const std::string& text) {
    Config cfg;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const auto m = Manifest::from_json(nlohmann::json::parse(text));
        cfg.values = m.parameters;
        cfg.subcommand = m.subcommand;
        return cfg;
    }
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DomainError("config line " + std::to_string(lineno) + ": expected key=value");
        }
        auto key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        if (key.empty()) throw DomainError("config line " + std::to_string(lineno) + ": empty key");
        cfg.values[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

/// Command-line arguments with config values inserted for every key the user did not pass.
/// `args` excludes the program name; config-derived flags go first so explicit flags win.
inline std::vector<std::string> merge_config(const std::vector<std::string>& args, const Config& cfg) {
    auto given = [&](const std::string& key) {
        const std::string flag = "--" + key;
        for (const auto& a : args) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        }
        return false;
    };
    std::vector<std::string> out;
    for (const auto& [k, v] : cfg.values) {
        if (k == "config" || given(k)) continue;
        out.push_back("--" + k + "=" + v);
    }
    out.insert(out.end(), args.begin(), args.end());
    return out;
}

}  // namespace spinorbit::io
