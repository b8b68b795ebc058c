#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "subconv/cli.hpp"

using namespace subconv;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("subconv_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& sub) const { return (path / sub).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::vector<std::string>& args, const TempDir& td, std::string* out = nullptr) {
    std::vector<std::string> full = args;
    full.push_back("--out-dir");
    full.push_back(td.str("out"));
    full.push_back("--runs-dir");
    full.push_back(td.str("runs"));
    std::ostringstream oss;
    int rc = cli::run(full, oss);
    if (out) *out = oss.str();
    return rc;
}

}  // namespace

TEST_CASE("config precedence: defaults < file < env < flags") {
    TempDir td;
    {
        std::ofstream f(td.str("cfg.txt"));
        f << "# comment line\n";
        f << "epsilon = 0.03\n";
        f << "qmax=4\n";
        f << "mystery_key = 12\n";
    }
    Config cfg = load_config(td.str("cfg.txt"));
    REQUIRE(cfg.get_double("epsilon", 0.0) == 0.03);
    REQUIRE(cfg.get_int("qmax", 0) == 4);
    REQUIRE(cfg.unknown_keys == std::vector<std::string>{"mystery_key"});
    // defaults survive for untouched keys
    REQUIRE(cfg.get("out_dir", "") == "out");

    setenv("SUBCONV_EPSILON", "0.05", 1);
    overlay_env(cfg);
    REQUIRE(cfg.get_double("epsilon", 0.0) == 0.05);
    unsetenv("SUBCONV_EPSILON");

    cfg.set_if_known("epsilon", "0.07");  // flag wins
    REQUIRE(cfg.get_double("epsilon", 0.0) == 0.07);
}

TEST_CASE("malformed config names the offending line") {
    TempDir td;
    {
        std::ofstream f(td.str("bad.txt"));
        f << "epsilon = 0.03\n";
        f << "not a key value pair\n";
    }
    try {
        load_config(td.str("bad.txt"));
        FAIL("expected config_error");
    } catch (const config_error& e) {
        REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
    REQUIRE_THROWS_AS(load_config(td.str("missing.txt")), config_error);
}

TEST_CASE("json config accepted") {
    TempDir td;
    {
        std::ofstream f(td.str("cfg.json"));
        f << "{\"epsilon\": 0.04, \"qmax\": 3, \"weird\": true}\n";
    }
    Config cfg = load_config(td.str("cfg.json"));
    REQUIRE(cfg.get_double("epsilon", 0.0) == 0.04);
    REQUIRE(cfg.unknown_keys.size() == 1);
}

TEST_CASE("unknown verb prints usage and exits 2") {
    TempDir td;
    std::string out;
    REQUIRE(run_cli({"verify", "nonsense"}, td, &out) == 2);
    REQUIRE(out.find("usage:") != std::string::npos);
    REQUIRE(run_cli({}, td, &out) == 2);
}

TEST_CASE("charsum verb: runs, records, deterministic across thread counts") {
    TempDir td1, td2;
    std::string out;
    REQUIRE(run_cli({"verify", "charsum", "--max", "6", "--threads", "1"}, td1, &out) == 0);
    REQUIRE(run_cli({"verify", "charsum", "--max", "6", "--threads", "8"}, td2, &out) == 0);
    std::string csv1 = slurp(td1.str("out/charsum.csv"));
    std::string csv2 = slurp(td2.str("out/charsum.csv"));
    REQUIRE(!csv1.empty());
    REQUIRE(csv1 == csv2);

    // one run record per invocation, append-only
    REQUIRE(fs::exists(td1.str("runs")));
    std::size_t count = 0;
    for (auto& e : fs::directory_iterator(td1.str("runs"))) (void)e, ++count;
    REQUIRE(count == 1);
    REQUIRE(run_cli({"verify", "charsum", "--max", "4"}, td1, &out) == 0);
    count = 0;
    for (auto& e : fs::directory_iterator(td1.str("runs"))) (void)e, ++count;
    REQUIRE(count == 2);
}

TEST_CASE("run records snapshot tolerances and flag unknown keys") {
    TempDir td;
    {
        std::ofstream f(td.str("cfg.txt"));
        f << "oddball = 1\n";
    }
    std::string out;
    REQUIRE(run_cli({"verify", "charsum", "--max", "4", "--config", td.str("cfg.txt")}, td,
                    &out) == 0);
    REQUIRE(out.find("warning: unknown config key 'oddball'") != std::string::npos);
    for (auto& e : fs::directory_iterator(td.str("runs"))) {
        nlohmann::json j = nlohmann::json::parse(slurp(e.path().string()));
        REQUIRE(j["command"] == "verify charsum");
        REQUIRE(j["config_snapshot"].contains("charsum_tol"));
        REQUIRE(j["results"]["ignored_keys"][0] == "oddball");
        REQUIRE(j.contains("started_at"));
        REQUIRE(j["artifact_version"] == ARTIFACT_VERSION);
    }
}

TEST_CASE("delta verb emits the full residual grid") {
    TempDir td;
    std::string out;
    REQUIRE(run_cli({"verify", "delta", "--qmax", "3", "--nmax", "5"}, td, &out) == 0);
    std::string csv = slurp(td.str("out/delta.csv"));
    // header + 3 * 11 rows
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 11);
    REQUIRE(csv.rfind("n,Q,residual\n", 0) == 0);
}

TEST_CASE("csv floats are emitted with 17 significant digits") {
    REQUIRE(CsvWriter::fmt(1.0 / 3.0) == "0.33333333333333331");
    REQUIRE(CsvWriter::fmt(1.0) == "1");
}
