// runrecord.hpp -- configuration loading (defaults < file < env < flags),
// append-only JSON run records, and deterministic CSV emission.
#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "subconv/common.hpp"

namespace subconv {

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct Config {
    std::map<std::string, std::string> values;
    std::vector<std::string> unknown_keys;

    static const std::set<std::string>& known_keys() {
        static const std::set<std::string> keys = {
            "threads",  "out_dir", "runs_dir", "epsilon", "qmax",   "nmax",  "q",
            "a",        "scale",   "t",        "N",       "K",      "tmin",  "tmax",
            "points",   "max",     "precision", "draws",  "n_coeff", "plot", "tol",
            "check",
        };
        return keys;
    }

    static std::map<std::string, std::string> defaults() {
        return {
            {"threads", "0"},       {"out_dir", "out"},   {"runs_dir", "runs"},
            {"epsilon", "0.02"},    {"precision", "1e-8"}, {"tol", "1e-9"},
            {"n_coeff", "100000"},
        };
    }

    bool has(const std::string& k) const { return values.count(k) != 0; }
    std::string get(const std::string& k, const std::string& dflt = "") const {
        auto it = values.find(k);
        return it == values.end() ? dflt : it->second;
    }
    double get_double(const std::string& k, double dflt) const {
        auto it = values.find(k);
        return it == values.end() ? dflt : std::strtod(it->second.c_str(), nullptr);
    }
    int64_t get_int(const std::string& k, int64_t dflt) const {
        auto it = values.find(k);
        return it == values.end() ? dflt : std::strtoll(it->second.c_str(), nullptr, 10);
    }

    void set_if_known(const std::string& k, const std::string& v) {
        if (known_keys().count(k))
            values[k] = v;
        else
            unknown_keys.push_back(k);
    }
};

// Flat key=value text or a JSON object; malformed input names the line.
inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config file not found: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    Config cfg;
    for (auto& [k, v] : Config::defaults()) cfg.values[k] = v;

    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded()) throw config_error("malformed JSON config: " + path + " line 1");
        for (auto& [k, v] : j.items()) {
            std::string s = v.is_string() ? v.get<std::string>() : v.dump();
            cfg.set_if_known(k, s);
        }
        return cfg;
    }
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("malformed config at " + path + " line " +
                               std::to_string(lineno));
        auto trim = [](std::string s) {
            std::size_t b = s.find_first_not_of(" \t\r");
            std::size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k.empty())
            throw config_error("malformed config at " + path + " line " +
                               std::to_string(lineno));
        cfg.set_if_known(k, v);
    }
    return cfg;
}

// Environment overlay: SUBCONV_<KEY> overrides file values for every key.
inline void overlay_env(Config& cfg) {
    for (const std::string& k : Config::known_keys()) {
        std::string env = "SUBCONV_";
        for (char c : k) env += static_cast<char>(std::toupper(c));
        if (const char* v = std::getenv(env.c_str())) cfg.values[k] = v;
    }
}

// --------------------------------------------------------------------------
// CSV with fixed column order and 17-significant-digit floats, so identical
// configurations produce byte-identical bodies.
// --------------------------------------------------------------------------
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            body_ += (i ? "," : "") + columns_[i];
        body_ += "\n";
    }

    static std::string fmt(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) body_ += (i ? "," : "") + cells[i];
        body_ += "\n";
        ++rows_;
    }

    const std::string& body() const { return body_; }
    std::size_t rows() const { return rows_; }

    void write(const std::string& path) const {
        std::filesystem::create_directories(std::filesystem::path(path).parent_path());
        std::ofstream out(path, std::ios::binary);
        out << body_;
    }

  private:
    std::vector<std::string> columns_;
    std::string body_;
    std::size_t rows_ = 0;
};

// --------------------------------------------------------------------------
// Append-only run records: one JSON document per run under runs/.
// --------------------------------------------------------------------------
struct RunRecord {
    std::string command;
    nlohmann::json config_snapshot = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    std::map<std::string, double> residuals;
    std::string started_at;
    double duration_s = 0.0;
    std::string artifact_version = ARTIFACT_VERSION;

    static std::string now_iso() {
        auto now = std::chrono::system_clock::now();
        std::time_t tt = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
        return buf;
    }

    std::string write(const std::string& runs_dir) const {
        std::filesystem::create_directories(runs_dir);
        auto stamp = std::chrono::duration_cast<std::chrono::microseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
        std::string path;
        for (int k = 0;; ++k) {
            path = runs_dir + "/run_" + std::to_string(stamp) + "_" + std::to_string(k) +
                   ".json";
            if (!std::filesystem::exists(path)) break;
        }
        nlohmann::json j;
        j["command"] = command;
        j["config_snapshot"] = config_snapshot;
        j["results"] = results;
        j["residuals"] = residuals;
        j["started_at"] = started_at;
        j["duration_s"] = duration_s;
        j["artifact_version"] = artifact_version;
        std::ofstream out(path);
        out << j.dump(2) << "\n";
        return path;
    }
};

}  // namespace subconv
