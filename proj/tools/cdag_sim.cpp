#include "cdag/errors.hpp"
#include "cdag/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace cdag;

namespace {

struct ConfigFlags {
    std::string file;
    std::map<std::string, std::string> values;

    void attach(CLI::App* app) {
        app->add_option("--config-file", file, "key = value file applied before CDAG_* variables and flags");
        for (const auto& key : SimConfig::keys()) {
            app->add_option("--" + key, values[key], "SimConfig key '" + key + "'");
        }
    }

    // base or file, then environment, then flags
    SimConfig build(SimConfig base = {}) const {
        SimConfig c = file.empty() ? std::move(base) : SimConfig::from_file(file);
        c.apply_env();
        if (auto it = values.find("config"); it != values.end() && !it->second.empty()) c.set("config", it->second);
        for (const auto& [k, v] : values) {
            if (k != "config" && !v.empty()) c.set(k, v);
        }
        return c;
    }
};

std::string join(const fs::path& dir, const std::string& name) { return (dir / name).string(); }

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

std::string csv_of(const std::vector<MetricsReport>& rows) {
    std::ostringstream out;
    write_csv(out, rows);
    return out.str();
}

// A sweep writes rows as they arrive so an interrupted run keeps its prefix.
class CsvSink {
public:
    explicit CsvSink(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw Error(ErrorCode::Io, "cannot write " + path);
        out_ << csv_header() << '\n' << std::flush;
    }
    void add(const MetricsReport& r) {
        out_ << csv_row(r) << '\n' << std::flush;
        if (!out_) throw Error(ErrorCode::Io, "cannot write " + path_);
    }

private:
    std::string path_;
    std::ofstream out_;
};

int cmd_run(const SimConfig& cfg, std::uint32_t seeds, const fs::path& out, const std::string& trace_path) {
    ensure_dir(out);
    if (!trace_path.empty()) seeds = 1;
    ExperimentPlan plan;
    plan.base = cfg;
    plan.seeds = seeds;
    std::vector<MetricsReport> rows;
    if (!trace_path.empty()) {
        // A traced run is always a single seed.
        std::ofstream trace(trace_path, std::ios::binary);
        if (!trace) throw Error(ErrorCode::Io, "cannot write " + trace_path);
        rows.push_back(report_for(cfg, run_simulation(cfg, &trace)));
    } else {
        rows = run_experiment(plan);
    }
    write_file(join(out, "run.cfg"), cfg.to_text() + "# seeds = " + std::to_string(seeds) + "\n");
    write_file(join(out, "results.csv"), csv_of(rows));
    write_file(join(out, "results.json"), reports_to_json(rows));
    std::cout << csv_of(rows);
    return 0;
}

int cmd_sweep(ExperimentPlan plan, const fs::path& out, unsigned threads) {
    ensure_dir(out);
    write_file(join(out, "plan.json"), plan.to_json());
    CsvSink sink(join(out, "results.csv"));
    RunOptions opts;
    opts.threads = threads;
    opts.on_row = [&](const MetricsReport& r) { sink.add(r); };
    opts.on_progress = [](std::size_t done, std::size_t total) {
        std::cerr << "\r[" << done << "/" << total << "]" << (done == total ? "\n" : "") << std::flush;
    };
    auto rows = run_experiment(plan, opts);
    write_file(join(out, "results.json"), reports_to_json(rows));
    std::size_t skipped = 0;
    for (const auto& r : rows) skipped += r.skipped;
    std::cerr << rows.size() << " rows, " << skipped << " skipped -> " << join(out, "results.csv") << "\n";
    return 0;
}

int cmd_export(const SimConfig& cfg, const fs::path& out, const std::string& format) {
    ensure_dir(out);
    auto run = run_simulation(cfg);
    if (format == "json" || format == "both") write_file(join(out, "ledger.json"), ledger_to_json(run));
    if (format == "dot" || format == "both") write_file(join(out, "ledger.dot"), ledger_to_dot(run));
    std::cout << csv_header() << '\n' << csv_row(report_for(cfg, run)) << '\n';
    return 0;
}

int cmd_replay(const std::string& stored, std::optional<std::uint32_t> seeds_flag, const std::string& check,
               const fs::path& out) {
    auto text = read_file(stored);
    auto cfg = SimConfig::from_text(text);
    std::uint32_t seeds = 1;
    if (auto pos = text.find("# seeds = "); pos != std::string::npos) seeds = std::stoul(text.substr(pos + 10));
    if (seeds_flag) seeds = *seeds_flag;

    ExperimentPlan plan;
    plan.base = cfg;
    plan.seeds = seeds;
    const auto csv = csv_of(run_experiment(plan));
    if (!out.empty()) {
        ensure_dir(out);
        write_file(join(out, "replay.csv"), csv);
    }
    std::cout << csv;
    if (!check.empty()) {
        if (read_file(check) != csv) {
            std::cerr << "replay differs from " << check << "\n";
            return 1;
        }
        std::cerr << "replay matches " << check << "\n";
    }
    return 0;
}

std::vector<std::uint32_t> parse_uints(const std::string& list, const std::string& flag) {
    std::vector<std::uint32_t> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidParameter, flag + ": cannot parse '" + item + "'");
        }
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& list, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidParameter, flag + ": cannot parse '" + item + "'");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CDAG / Colosseum discrete-event simulator.\n"
                 "Every SimConfig key is also read from CDAG_<KEY> (e.g. CDAG_N, CDAG_TAU_S);\n"
                 "flags override the environment, which overrides --config-file."};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run one configuration and write results.csv/json and run.cfg");
    ConfigFlags run_flags;
    run_flags.attach(run);
    std::uint32_t run_seeds = 1;
    std::string out_dir = ".";
    std::string trace_path;
    run->add_option("--seeds", run_seeds, "Consecutive seeds starting at --seed")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--trace", trace_path, "Write the message trace of a single-seed run");

    auto* sweep = app.add_subcommand("sweep", "Run an experiment plan over a worker pool");
    ConfigFlags sweep_flags;
    sweep_flags.attach(sweep);
    std::string plan_path, nodes, alphas, configs, fracs;
    std::optional<std::uint32_t> sweep_seeds;
    unsigned threads = 0;
    sweep->add_option("--plan", plan_path, "Plan JSON; flags below refine it");
    sweep->add_option("--nodes", nodes, "Comma-separated node counts");
    sweep->add_option("--alphas", alphas, "Comma-separated alpha values");
    sweep->add_option("--configs", configs, "Comma-separated fixed configurations (1..3)");
    sweep->add_option("--fracs", fracs, "Comma-separated malicious fractions");
    sweep->add_option("--seeds", sweep_seeds, "Seeds per point")->check(CLI::PositiveNumber);
    sweep->add_option("--threads", threads, "Worker threads (0 = hardware)");
    sweep->add_option("--out", out_dir, "Output directory");

    auto* exp = app.add_subcommand("export", "Run once and export the reference ledger");
    ConfigFlags exp_flags;
    exp_flags.attach(exp);
    std::string format = "both";
    exp->add_option("--format", format, "json, dot or both")->check(CLI::IsMember({"json", "dot", "both"}));
    exp->add_option("--out", out_dir, "Output directory");

    auto* replay = app.add_subcommand("replay", "Re-run a stored run.cfg and reproduce its CSV");
    std::string stored, check;
    std::optional<std::uint32_t> replay_seeds;
    std::string replay_out;
    replay->add_option("stored", stored, "run.cfg written by `run`")->required();
    replay->add_option("--check", check, "CSV to compare byte for byte; exit 1 on difference");
    replay->add_option("--seeds", replay_seeds, "Override the stored seed count");
    replay->add_option("--out", replay_out, "Also write replay.csv here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_flags.build(), run_seeds, out_dir, trace_path);
        if (*sweep) {
            ExperimentPlan plan = plan_path.empty() ? ExperimentPlan{} : ExperimentPlan::from_file(plan_path);
            plan.base = sweep_flags.build(plan.base);
            if (!nodes.empty()) plan.nodes = parse_uints(nodes, "--nodes");
            if (!alphas.empty()) plan.alphas = parse_uints(alphas, "--alphas");
            if (!configs.empty()) plan.configs = parse_uints(configs, "--configs");
            if (!fracs.empty()) plan.malicious_fracs = parse_doubles(fracs, "--fracs");
            if (sweep_seeds) plan.seeds = *sweep_seeds;
            return cmd_sweep(plan, out_dir, threads);
        }
        if (*exp) return cmd_export(exp_flags.build(), out_dir, format);
        if (*replay) return cmd_replay(stored, replay_seeds, check, replay_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
