#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wbb/netsim/config.hpp"
#include "wbb/netsim/sim.hpp"

using namespace wbb::netsim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path temp_dir(const char* tag) {
    fs::path dir = fs::temp_directory_path() / (std::string("wbbsim-test-") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json sample_config() {
    return json{{"label", "cli"},
                {"n", 4},
                {"f", 1},
                {"protocol", "WBB"},
                {"seed", 21},
                {"witness", {{"mode", "FORCED_GOOD"}}},
                {"workload", {{"instances_per_process", 1}, {"sources", {0}}}},
                {"guarantees_expected", true}};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(WBBSIM_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("scenario config json round trip") {
    const ScenarioConfig cfg = ScenarioConfig::from_json(sample_config());
    CHECK(cfg.n == 4);
    CHECK(cfg.resolved_f() == 1);
    CHECK(cfg.protocol == Protocol::Wbb);
    CHECK(cfg.witness.mode == OracleMode::ForcedGood);
    const ScenarioConfig again = ScenarioConfig::from_json(cfg.to_json());
    CHECK(again.to_json() == cfg.to_json());
}

TEST_CASE("config json errors are invalid_argument") {
    json bad = sample_config();
    bad.erase("seed");
    CHECK_THROWS_AS(ScenarioConfig::from_json(bad), std::invalid_argument);
    bad = sample_config();
    bad["protocol"] = "GOSSIP";
    CHECK_THROWS_AS(ScenarioConfig::from_json(bad), std::invalid_argument);
    bad = sample_config();
    bad["f"] = 2;
    CHECK_THROWS_AS(ScenarioConfig::from_json(bad), std::invalid_argument);
}

TEST_CASE("cli simulate writes metrics, summary and manifest") {
    const fs::path dir = temp_dir("simulate");
    const fs::path cfg_path = dir / "cfg.json";
    std::ofstream(cfg_path) << sample_config().dump();
    const int rc =
        run_cli("simulate " + cfg_path.string() + " --out " + (dir / "out").string());
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "out" / "metrics.csv"));
    CHECK(fs::exists(dir / "out" / "summary.json"));
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    const json manifest = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest.at("resolved_seed") == 21);
    // every output file is listed
    for (const char* name : {"metrics.csv", "summary.json"}) {
        bool listed = false;
        for (const auto& entry : manifest.at("outputs")) {
            listed = listed || entry == name;
        }
        CHECK(listed);
    }
}

TEST_CASE("cli reruns are byte-identical on csv bodies") {
    const fs::path dir = temp_dir("rerun");
    const fs::path cfg_path = dir / "cfg.json";
    json cfg = sample_config();
    cfg["delay"] = {{"base", 1}, {"jitter", 3}, {"loss_prob", 0.02}};
    std::ofstream(cfg_path) << cfg.dump();
    REQUIRE(run_cli("simulate " + cfg_path.string() + " --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cli("simulate " + cfg_path.string() + " --out " + (dir / "b").string()) == 0);
    CHECK(slurp(dir / "a" / "metrics.csv") == slurp(dir / "b" / "metrics.csv"));
    CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "b" / "summary.json"));
}

TEST_CASE("cli trace flag adds a trace output") {
    const fs::path dir = temp_dir("trace");
    const fs::path cfg_path = dir / "cfg.json";
    std::ofstream(cfg_path) << sample_config().dump();
    REQUIRE(run_cli("simulate " + cfg_path.string() + " --trace --out " +
                    (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "trace.ndjson"));
    CHECK(slurp(dir / "out" / "trace.ndjson").size() > 0);
}

TEST_CASE("cli rejects invalid configs with exit code 2") {
    const fs::path dir = temp_dir("invalid");
    const fs::path cfg_path = dir / "cfg.json";
    json bad = sample_config();
    bad["f"] = 2;  // f >= n/3
    std::ofstream(cfg_path) << bad.dump();
    CHECK(run_cli("simulate " + cfg_path.string() + " --out " + (dir / "out").string()) == 2);
    CHECK(run_cli("simulate /nonexistent.json") == 2);
}

TEST_CASE("cli epsilon sweep emits a monotone column") {
    const fs::path dir = temp_dir("epsilon");
    const int rc = run_cli(
        "epsilon --n 256 --f 25 --r 1024 --b 4 --w-min 20 --w-max 60 --w-step 20 --out " +
        (dir / "out").string());
    REQUIRE(rc == 0);
    const std::string csv = slurp(dir / "out" / "epsilon.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    double prev = 2.0;
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        const auto pos = line.rfind(',');
        const double eps = std::stod(line.substr(pos + 1));
        CHECK(eps <= prev);
        prev = eps;
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("cli gathering reports the censoring fraction") {
    const fs::path dir = temp_dir("gathering");
    const int rc = run_cli(
        "gathering --n 100 --t 0.25 --s 0.6 --b 2 --r 128 --simulate --runs 10 --cap 200 "
        "--seed 3 --out " +
        (dir / "out").string());
    REQUIRE(rc == 0);
    CHECK(fs::exists(dir / "out" / "bound.csv"));
    CHECK(fs::exists(dir / "out" / "samples.csv"));
    const json manifest = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest.contains("censored_fraction"));
}

TEST_CASE("cli compare emits the ratio table") {
    const fs::path dir = temp_dir("compare");
    json bracha = sample_config();
    bracha["protocol"] = "BRACHA";
    bracha["label"] = "bracha";
    json wbb = sample_config();
    wbb["label"] = "wbb";
    std::ofstream(dir / "bracha.json") << bracha.dump();
    std::ofstream(dir / "wbb.json") << wbb.dump();
    const int rc = run_cli("compare " + (dir / "bracha.json").string() + " " +
                           (dir / "wbb.json").string() + " --out " + (dir / "out").string());
    REQUIRE(rc == 0);
    const std::string csv = slurp(dir / "out" / "comparison.csv");
    CHECK(csv.find("bracha,BRACHA") != std::string::npos);
    CHECK(csv.find("wbb,WBB") != std::string::npos);
}

TEST_CASE("cli exits 3 when a guaranteed scenario violates its guarantees") {
    const fs::path dir = temp_dir("violation");
    const fs::path cfg_path = dir / "cfg.json";
    // fully faulty mute witness sets without recovery: the correct source's
    // instance cannot deliver anywhere, a liveness failure under claimed
    // guarantees
    json cfg = sample_config();
    cfg["witness"] = {{"mode", "FORCED_BAD"}};
    cfg["adversary"] = {{"modes", {"MUTE_WITNESS"}}, {"count", 1}, {"corrupted", {3}}};
    std::ofstream(cfg_path) << cfg.dump();
    CHECK(run_cli("simulate " + cfg_path.string() + " --out " + (dir / "out").string()) == 3);
}
