#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wbb/analysis.hpp"
#include "wbb/netsim/compare.hpp"
#include "wbb/netsim/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "wbbsim 0.1.0";

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

class Manifest {
public:
    Manifest(std::string command, fs::path out_dir)
        : out_dir_(std::move(out_dir)) {
        doc_["tool_version"] = kVersion;
        doc_["command"] = std::move(command);
        doc_["started_at"] = timestamp_now();
        doc_["outputs"] = json::array();
        fs::create_directories(out_dir_);
    }

    void set(const std::string& key, const json& value) { doc_[key] = value; }

    void write_text(const std::string& name, const std::string& body) {
        std::ofstream out(out_dir_ / name, std::ios::binary);
        out << body;
        doc_["outputs"].push_back(name);
    }

    std::ofstream open_stream(const std::string& name) {
        doc_["outputs"].push_back(name);
        return std::ofstream(out_dir_ / name, std::ios::binary);
    }

    void finalize() {
        doc_["finished_at"] = timestamp_now();
        std::ofstream out(out_dir_ / "manifest.json", std::ios::binary);
        out << doc_.dump(2) << '\n';
    }

    const fs::path& dir() const { return out_dir_; }

private:
    fs::path out_dir_;
    json doc_;
};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    return j;
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 std::string out_dir, bool trace) {
    wbb::netsim::ScenarioConfig cfg =
        wbb::netsim::ScenarioConfig::from_json(load_json(config_path));
    if (seed.has_value()) {
        cfg.seed = *seed;
        cfg.validate();
    }
    Manifest manifest("simulate", out_dir.empty() ? "out-simulate" : out_dir);
    manifest.set("config_path", config_path);
    manifest.set("resolved_seed", cfg.seed);
    manifest.set("config", cfg.to_json());

    wbb::netsim::RunResult result;
    if (trace) {
        std::ofstream trace_out = manifest.open_stream("trace.ndjson");
        result = wbb::netsim::run(cfg, &trace_out);
    } else {
        result = wbb::netsim::run(cfg);
    }
    manifest.write_text("metrics.csv", wbb::netsim::metrics_csv(result));
    manifest.write_text("summary.json", wbb::netsim::summary_json(result).dump(2) + "\n");
    manifest.finalize();

    std::cout << "instances=" << result.summary.instances
              << " messages=" << result.summary.messages
              << " deliveries=" << result.summary.deliveries
              << " consistency_violations=" << result.summary.consistency_violations
              << " liveness_failures=" << result.summary.liveness_failures << '\n';
    if (cfg.guarantees_expected && (result.summary.consistency_violations > 0 ||
                                    result.summary.liveness_failures > 0)) {
        std::cerr << "scenario claimed guarantees but violated them\n";
        return 3;
    }
    return 0;
}

int cmd_epsilon(std::size_t n, std::optional<double> faulty_ratio,
                std::optional<std::size_t> f, std::uint64_t r, std::uint32_t b,
                std::uint64_t mu, double w_min, double w_max, double w_step,
                std::optional<std::size_t> k, std::string out_dir) {
    Manifest manifest("epsilon", out_dir.empty() ? "out-epsilon" : out_dir);
    std::ostringstream csv;
    csv << "n,f,r,b,expected_w,d,mu,k,pr_live,pr_safe,epsilon\n";
    for (double w = w_min; w <= w_max + 1e-9; w += w_step) {
        wbb::analysis::SecurityQuery q;
        q.n = n;
        q.f = f;
        if (!f.has_value()) {
            q.faulty_ratio = faulty_ratio;
        }
        q.r = r;
        q.b = b;
        q.mu = mu;
        q.expected_w = w;
        q.k = k;
        const wbb::analysis::EpsilonResult res = wbb::analysis::epsilon(q);
        csv << n << ',' << q.resolved_f() << ',' << r << ',' << b << ',' << w << ','
            << res.d << ',' << mu << ',' << res.k << ','
            << res.pr_live.convert_to<double>() << ','
            << res.pr_safe.convert_to<double>() << ','
            << res.epsilon.convert_to<double>() << '\n';
        std::cout << "w=" << w << " k=" << res.k
                  << " epsilon=" << res.epsilon.convert_to<double>() << '\n';
    }
    manifest.write_text("epsilon.csv", csv.str());
    manifest.finalize();
    return 0;
}

int cmd_gathering(std::size_t n, double t, double s, double c, std::uint32_t b,
                  std::uint64_t r, bool simulate, std::size_t runs, std::uint64_t cap,
                  std::uint64_t seed, std::string out_dir) {
    Manifest manifest("gathering", out_dir.empty() ? "out-gathering" : out_dir);
    wbb::analysis::GatheringQuery q;
    q.n = n;
    q.t = t;
    q.s = s;
    q.c = c;
    q.b = b;
    q.r = r;
    const double bound = wbb::analysis::gathering_bound(q);
    std::ostringstream csv;
    csv << "n,b,r,c,t,s,q,f,k,bound_steps\n";
    csv << n << ',' << b << ',' << r << ',' << c << ',' << t << ',' << s << ',' << q.q()
        << ',' << q.walkers() << ',' << q.threshold() << ',' << bound << '\n';
    manifest.write_text("bound.csv", csv.str());
    std::cout << "bound_steps=" << bound << " k=" << q.threshold() << " f=" << q.walkers()
              << '\n';
    if (simulate) {
        const auto samples = wbb::analysis::gathering_sim(q, runs, seed, cap);
        std::ostringstream sim_csv;
        sim_csv << "run,steps,censored\n";
        std::size_t censored = 0;
        double sum = 0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            sim_csv << i << ',' << samples[i].steps << ',' << (samples[i].censored ? 1 : 0)
                    << '\n';
            censored += samples[i].censored ? 1 : 0;
            sum += static_cast<double>(samples[i].steps);
        }
        manifest.write_text("samples.csv", sim_csv.str());
        manifest.set("resolved_seed", seed);
        const double mean = sum / static_cast<double>(samples.size());
        const double censored_fraction =
            static_cast<double>(censored) / static_cast<double>(samples.size());
        manifest.set("censored_fraction", censored_fraction);
        std::cout << "runs=" << samples.size() << " mean_steps=" << mean
                  << " censored_fraction=" << censored_fraction << '\n';
    }
    manifest.finalize();
    return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths,
                std::optional<std::uint64_t> seed, std::string out_dir) {
    std::vector<wbb::netsim::ScenarioConfig> cfgs;
    for (const std::string& path : config_paths) {
        wbb::netsim::ScenarioConfig cfg =
            wbb::netsim::ScenarioConfig::from_json(load_json(path));
        if (seed.has_value()) {
            cfg.seed = *seed;
        }
        cfgs.push_back(std::move(cfg));
    }
    Manifest manifest("compare", out_dir.empty() ? "out-compare" : out_dir);
    manifest.set("configs", config_paths);
    if (seed.has_value()) {
        manifest.set("resolved_seed", *seed);
    }
    const auto rows = wbb::netsim::compare(cfgs);
    const std::string csv = wbb::netsim::compare_csv(rows);
    manifest.write_text("comparison.csv", csv);
    manifest.finalize();
    std::cout << csv;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"witness-based reliable broadcast simulator and analysis toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run one scenario config");
    std::string sim_config;
    std::string sim_out;
    bool sim_trace = false;
    std::optional<std::uint64_t> sim_seed;
    sim->add_option("config", sim_config, "scenario config (JSON)")->required();
    sim->add_option("--seed", sim_seed, "override the config seed");
    sim->add_option("--out", sim_out, "output directory");
    sim->add_flag("--trace", sim_trace, "write a replayable NDJSON trace");

    // epsilon
    auto* eps = app.add_subcommand("epsilon", "security-parameter sweep");
    std::size_t eps_n = 1024;
    std::optional<double> eps_ratio;
    std::optional<std::size_t> eps_f;
    std::uint64_t eps_r = 1ull << 16;
    std::uint32_t eps_b = 16;
    std::uint64_t eps_mu = 0;
    double eps_wmin = 100, eps_wmax = 100, eps_wstep = 10;
    std::optional<std::size_t> eps_k;
    std::string eps_out;
    eps->add_option("--n", eps_n, "system size");
    eps->add_option("--faulty-ratio", eps_ratio, "faulty fraction of n");
    eps->add_option("--f", eps_f, "faulty count");
    eps->add_option("--r", eps_r, "ring modulus");
    eps->add_option("--b", eps_b, "ring dimensions");
    eps->add_option("--mu", eps_mu, "history uncertainty radius");
    eps->add_option("--w-min", eps_wmin, "smallest expected witness size");
    eps->add_option("--w-max", eps_wmax, "largest expected witness size");
    eps->add_option("--w-step", eps_wstep, "sweep step");
    eps->add_option("--k", eps_k, "fixed threshold (default balanced)");
    eps->add_option("--out", eps_out, "output directory");

    // gathering
    auto* gat = app.add_subcommand("gathering", "passive-attack gathering time");
    std::size_t gat_n = 100;
    double gat_t = 0.25, gat_s = 0.6, gat_c = 1.0;
    std::uint32_t gat_b = 2;
    std::uint64_t gat_r = 256;
    bool gat_sim = false;
    std::size_t gat_runs = 100;
    std::uint64_t gat_cap = 1'000'000;
    std::uint64_t gat_seed = 1;
    std::string gat_out;
    gat->add_option("--n", gat_n, "system size");
    gat->add_option("--t", gat_t, "compromised population ratio");
    gat->add_option("--s", gat_s, "target compromised witness ratio");
    gat->add_option("--c", gat_c, "witness-size coefficient (size = c log2 n)");
    gat->add_option("--b", gat_b, "ring dimensions");
    gat->add_option("--r", gat_r, "ring modulus");
    gat->add_flag("--simulate", gat_sim, "run the random-walk simulation");
    gat->add_option("--runs", gat_runs, "simulation runs");
    gat->add_option("--cap", gat_cap, "step cap per run");
    gat->add_option("--seed", gat_seed, "simulation seed");
    gat->add_option("--out", gat_out, "output directory");

    // compare
    auto* cmp = app.add_subcommand("compare", "normalized protocol comparison");
    std::vector<std::string> cmp_configs;
    std::optional<std::uint64_t> cmp_seed;
    std::string cmp_out;
    cmp->add_option("configs", cmp_configs, "scenario configs (JSON)")->required();
    cmp->add_option("--seed", cmp_seed, "override every config seed");
    cmp->add_option("--out", cmp_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            return cmd_simulate(sim_config, sim_seed, sim_out, sim_trace);
        }
        if (eps->parsed()) {
            return cmd_epsilon(eps_n, eps_ratio, eps_f, eps_r, eps_b, eps_mu, eps_wmin,
                               eps_wmax, eps_wstep, eps_k, eps_out);
        }
        if (gat->parsed()) {
            return cmd_gathering(gat_n, gat_t, gat_s, gat_c, gat_b, gat_r, gat_sim,
                                 gat_runs, gat_cap, gat_seed, gat_out);
        }
        if (cmp->parsed()) {
            return cmd_compare(cmp_configs, cmp_seed, cmp_out);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
