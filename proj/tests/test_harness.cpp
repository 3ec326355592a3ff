#include "cdag/errors.hpp"
#include "cdag/harness.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <regex>
#include <sstream>

using namespace cdag;

namespace {

SimConfig tiny() {
    SimConfig c;
    c.n = 12;
    c.alpha = 2;
    c.k = 6;
    c.duration_slots = 6;
    c.block_bytes = 40'000;
    return c;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

TEST_CASE("csv schema is fixed") {
    const std::vector<std::string> expected = {
        "n",           "alpha",         "config",        "tau_s",       "block_bytes",
        "malicious_frac", "seed",       "slots",         "throughput_tps", "latency_min_s",
        "latency_avg_s", "latency_max_s", "orphan_rate", "avg_round_s", "avg_blocks_per_cblock",
    };
    CHECK(csv_columns() == expected);
    std::ostringstream out;
    write_csv(out, {});
    CHECK(out.str() == csv_header() + "\n");
    CHECK(split(csv_header()).size() == 15);
}

TEST_CASE("csv rows use dot decimals and mark mean rows") {
    MetricsReport r;
    r.n = 64;
    r.alpha = 3;
    r.tau_s = 12.5;
    r.malicious_frac = 0.2;
    r.seed = 7;
    r.throughput_tps = 1234.5;
    r.latency = {60.25, 70, 80, 3};
    auto cells = split(csv_row(r));
    REQUIRE(cells.size() == 15);
    CHECK(cells[3] == "12.5");
    CHECK(cells[5] == "0.2");
    CHECK(cells[6] == "7");
    CHECK(cells[8] == "1234.5");
    CHECK(cells[9] == "60.25");
    r.seed.reset();
    CHECK(split(csv_row(r))[6] == "mean");
    r.skipped = true;
    cells = split(csv_row(r));
    REQUIRE(cells.size() == 15);
    CHECK(cells[8].empty());
    CHECK(cells[14].empty());
}

TEST_CASE("one point and one seed give one row") {
    ExperimentPlan plan;
    plan.base = tiny();
    auto rows = run_experiment(plan);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].seed == plan.base.seed);
    CHECK_FALSE(rows[0].skipped);
    CHECK(rows[0].slots == 6);
}

TEST_CASE("several seeds add a mean row") {
    ExperimentPlan plan;
    plan.base = tiny();
    plan.base.seed = 40;
    plan.seeds = 2;
    std::vector<std::string> seen;
    std::size_t last_done = 0;
    RunOptions opts;
    opts.on_row = [&](const MetricsReport& r) { seen.push_back(csv_row(r)); };
    opts.on_progress = [&](std::size_t done, std::size_t total) {
        CHECK(total == 2);
        last_done = done;
    };
    auto rows = run_experiment(plan, opts);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].seed == 40);
    CHECK(rows[1].seed == 41);
    CHECK_FALSE(rows[2].seed.has_value());
    CHECK(last_done == 2);
    REQUIRE(seen.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(seen[i] == csv_row(rows[i]));

    // recomputed by hand
    const auto& a = rows[0];
    const auto& b = rows[1];
    const auto& m = rows[2];
    CHECK(m.throughput_tps == doctest::Approx((a.throughput_tps + b.throughput_tps) / 2));
    CHECK(m.orphan_rate == doctest::Approx((a.orphan_rate + b.orphan_rate) / 2));
    CHECK(m.avg_round_s == doctest::Approx((a.avg_round_s + b.avg_round_s) / 2));
    CHECK(m.avg_blocks_per_cblock == doctest::Approx((a.avg_blocks_per_cblock + b.avg_blocks_per_cblock) / 2));
    CHECK(m.latency.avg_s == doctest::Approx((a.latency.avg_s + b.latency.avg_s) / 2));
    CHECK(m.latency.min_s == std::min(a.latency.min_s, b.latency.min_s));
    CHECK(m.latency.max_s == std::max(a.latency.max_s, b.latency.max_s));
}

TEST_CASE("infeasible points become skipped rows") {
    ExperimentPlan plan;
    plan.base = tiny();
    plan.alphas = {2, 4};  // 2^4 > 12
    auto rows = run_experiment(plan);
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].skipped);
    CHECK(rows[1].skipped);
    CHECK(rows[1].skip_reason.find("alpha") != std::string::npos);
    CHECK(rows[1].alpha == 4);
}

TEST_CASE("sweep points follow the axes") {
    ExperimentPlan plan;
    plan.base = tiny();
    plan.configs = {1, 3};
    plan.nodes = {16, 32};
    plan.malicious_fracs = {0, 0.1};
    auto pts = plan.points();
    REQUIRE(pts.size() == 8);
    CHECK(pts[0].config_id == 1);
    CHECK(pts[0].block_bytes == 1'000'000);
    CHECK(pts[0].tau_s == 20);
    CHECK(pts[0].n == 16);
    CHECK(pts[1].n == 32);
    CHECK(pts[2].malicious_frac == 0.1);
    CHECK(pts[4].config_id == 3);
    CHECK(pts[4].tau_s == 10);
    plan.configs = {7};
    REQUIRE(plan.points().size() == 4);
    CHECK_THROWS_AS(plan.points()[0].validate(), Error);
}

TEST_CASE("plans serialize and reload") {
    ExperimentPlan plan;
    plan.base = tiny();
    plan.base.malicious = {1, 2};
    plan.nodes = {16, 32};
    plan.malicious_fracs = {0, 0.25};
    plan.seeds = 3;
    CHECK(ExperimentPlan::from_json(plan.to_json()) == plan);

    auto p = ExperimentPlan::from_json(R"({"base": {"config": 2, "n": 32, "tau_s": 9, "malicious": [4, 5]},
                                          "alphas": [2, 3], "seeds": 4})");
    CHECK(p.base.n == 32);
    CHECK(p.base.tau_s == 9);
    CHECK(p.base.block_bytes == 750'000);
    CHECK(p.base.malicious == std::vector<std::uint32_t>{4, 5});
    CHECK(p.alphas == std::vector<std::uint32_t>{2, 3});
    CHECK(p.seeds == 4);

    CHECK_THROWS_AS(ExperimentPlan::from_json("{not json"), Error);
    CHECK_THROWS_AS(ExperimentPlan::from_json(R"({"seeds": 0})"), Error);
    CHECK_THROWS_AS(ExperimentPlan::from_json(R"({"base": {"nodes": 3}})"), Error);
}

TEST_CASE("reports round trip through json") {
    ExperimentPlan plan;
    plan.base = tiny();
    plan.seeds = 2;
    auto rows = run_experiment(plan);
    CHECK(reports_from_json(reports_to_json(rows)) == rows);
    CHECK(reports_from_json("[]").empty());
}

TEST_CASE("worker count does not change results") {
    ExperimentPlan plan;
    plan.base = tiny();
    plan.nodes = {12, 16};
    plan.seeds = 2;
    RunOptions one;
    one.threads = 1;
    RunOptions three;
    three.threads = 3;
    CHECK(run_experiment(plan, one) == run_experiment(plan, three));
}

TEST_CASE("unwritable destinations raise io errors with the path") {
    const std::string path = "/nonexistent-dir/out.csv";
    try {
        write_file(path, "x");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
        CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
    CHECK_THROWS_AS(read_file("/nonexistent-dir/in.json"), Error);

    auto tmp = std::filesystem::temp_directory_path() / "cdag_harness_file.txt";
    write_file(tmp.string(), "a,b\n");
    CHECK(read_file(tmp.string()) == "a,b\n");
    std::filesystem::remove(tmp);
}

TEST_CASE("ledger dot export is layered by tournament") {
    auto c = tiny();
    c.duration_slots = 3;
    auto run = run_simulation(c);
    auto dot = ledger_to_dot(run);

    std::map<std::string, std::pair<char, std::uint64_t>> kind;  // id -> (b|c, tournament)
    std::regex node_re(R"re("([bc][0-9a-f]+)" \[[^\]]*comment="(block|cblock) t=(\d+)")re");
    for (auto it = std::sregex_iterator(dot.begin(), dot.end(), node_re); it != std::sregex_iterator(); ++it) {
        kind[(*it)[1]] = {(*it)[2] == "block" ? 'b' : 'c', std::stoull((*it)[3])};
    }
    REQUIRE(kind.size() == run.reference_store->block_count() + run.reference_store->cblock_count());

    std::regex edge_re(R"re("([bc][0-9a-f]+)" -> "([bc][0-9a-f]+)")re");
    std::map<std::string, std::vector<std::string>> adj;
    std::size_t edges = 0;
    for (auto it = std::sregex_iterator(dot.begin(), dot.end(), edge_re); it != std::sregex_iterator(); ++it) {
        const auto from = kind.at((*it)[1]);
        const auto to = kind.at((*it)[2]);
        CHECK(from.first != to.first);  // bipartite: blocks and C-Blocks alternate
        if (from.first == 'c') {
            CHECK(from.second == to.second);  // a C-Block holds blocks of its own tournament
        } else {
            CHECK(to.second < from.second);  // a block extends an earlier C-Block
        }
        adj[(*it)[1]].push_back((*it)[2]);
        ++edges;
    }
    CHECK(edges > 0);

    // acyclic: every node gets a finite depth
    std::map<std::string, int> state;
    std::function<bool(const std::string&)> dfs = [&](const std::string& v) {
        if (state[v] == 1) return false;
        if (state[v] == 2) return true;
        state[v] = 1;
        for (const auto& w : adj[v]) {
            if (!dfs(w)) return false;
        }
        state[v] = 2;
        return true;
    };
    for (const auto& [id, k] : kind) CHECK(dfs(id));
}

TEST_CASE("ledger json export lists the main chain") {
    auto c = tiny();
    auto run = run_simulation(c);
    auto j = nlohmann::json::parse(ledger_to_json(run));
    CHECK(j.at("final_tip") == run.final_tip.hex());
    std::size_t main = 0;
    for (const auto& cb : j.at("cblocks")) main += cb.at("main_chain").get<bool>();
    std::size_t depth = 0;
    for (auto h = run.final_tip; !run.reference_store->cblock(h)->is_genesis();
         h = run.reference_store->cblock(h)->prev_cblock) {
        ++depth;
    }
    CHECK(main == depth + 1);
    CHECK(j.at("blocks").size() == run.reference_store->block_count());
    CHECK(j.at("confirmed").size() == run.nodes[run.reference].confirmed.size());
}
