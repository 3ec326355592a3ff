#include "cdag/harness.hpp"

#include "cdag/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace cdag {

namespace {

using json = nlohmann::json;

std::string num(double v) {
    if (!std::isfinite(v)) return "";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::unordered_map<BlockHash, BlockPtr> proposed_index(const SimResult& run) {
    std::unordered_map<BlockHash, BlockPtr> out;
    out.reserve(run.proposed.size());
    for (const auto& rec : run.proposed) out.emplace(rec.block->hash(), rec.block);
    return out;
}

}  // namespace

std::vector<std::pair<BlockPtr, double>> block_latencies(const SimResult& run) {
    std::vector<std::pair<BlockPtr, double>> out;
    for (const auto& rec : run.proposed) {
        auto it = run.confirmed_at.find(rec.block->hash());
        if (it != run.confirmed_at.end()) out.emplace_back(rec.block, it->second - rec.emitted);
    }
    return out;
}

MetricsReport compute_metrics(const SimResult& run) {
    const auto& cfg = run.config;
    MetricsReport m;
    m.slots = cfg.duration_slots;
    m.simulated_s = run.end_time - run.start_time;

    const auto& store = *run.reference_store;
    const auto order = total_order(run.final_tip, store);
    const std::unordered_set<BlockHash> main(order.begin(), order.end());
    const auto tip_t = store.cblock(run.final_tip)->tournament_no;

    m.proposed_blocks = run.proposed.size();
    m.main_chain_blocks = order.size();
    for (const auto& rec : run.proposed) {
        if (rec.block->tournament_no() > tip_t) {
            ++m.in_flight_blocks;
        } else if (!main.contains(rec.block->hash())) {
            ++m.orphaned_blocks;
        }
    }
    const auto settled = m.orphaned_blocks + m.main_chain_blocks;
    m.orphan_rate = settled ? static_cast<double>(m.orphaned_blocks) / static_cast<double>(settled) : 0.0;

    std::uint64_t cblocks = 0;
    for (auto h = run.final_tip; !store.cblock(h)->is_genesis(); h = store.cblock(h)->prev_cblock) ++cblocks;
    m.avg_blocks_per_cblock = cblocks ? static_cast<double>(order.size()) / static_cast<double>(cblocks) : 0.0;

    const auto& ref = run.nodes.at(run.reference);
    for (const auto& h : ref.confirmed) m.confirmed_txs += store.block(h)->txs().size();
    m.throughput_tps = m.simulated_s > 0 ? static_cast<double>(m.confirmed_txs) / m.simulated_s : 0.0;

    double sum = 0;
    for (const auto& [b, lat] : block_latencies(run)) {
        if (b->tournament_no() <= cfg.f + 1) continue;
        if (m.latency.samples == 0) {
            m.latency.min_s = m.latency.max_s = lat;
        } else {
            m.latency.min_s = std::min(m.latency.min_s, lat);
            m.latency.max_s = std::max(m.latency.max_s, lat);
        }
        sum += lat;
        ++m.latency.samples;
    }
    if (m.latency.samples) m.latency.avg_s = sum / static_cast<double>(m.latency.samples);

    m.avg_round_s = run.rounds_timed ? run.round_time_sum / static_cast<double>(run.rounds_timed) : 0.0;
    if (!run.qualifiers.empty()) {
        double q = 0;
        for (auto x : run.qualifiers) q += x;
        m.mean_qualifiers = q / static_cast<double>(run.qualifiers.size());
    }
    return m;
}

std::uint64_t conflicting_confirmations(const SimResult& run) {
    const auto blocks = proposed_index(run);
    std::uint64_t conflicts = 0;
    for (const auto& node : run.nodes) {
        if (!node.honest) continue;
        std::unordered_map<SpendRef, std::vector<TxHash>> spenders;
        for (const auto& h : node.confirmed) {
            for (const auto& tx : blocks.at(h)->txs()) {
                for (auto in : tx->inputs) {
                    auto& list = spenders[in];
                    if (std::find(list.begin(), list.end(), tx->hash) == list.end()) list.push_back(tx->hash);
                }
            }
        }
        for (const auto& [in, list] : spenders) conflicts += list.size() * (list.size() - 1) / 2;
    }
    return conflicts;
}

bool honest_prefixes_agree(const SimResult& run) {
    // Pairwise prefix consistency is the same as every list being a prefix of the longest.
    const NodeOutcome* longest = nullptr;
    for (const auto& node : run.nodes) {
        if (node.honest && (!longest || node.confirmed.size() > longest->confirmed.size())) longest = &node;
    }
    if (!longest) return true;
    for (const auto& node : run.nodes) {
        if (!node.honest) continue;
        if (!std::equal(node.confirmed.begin(), node.confirmed.end(), longest->confirmed.begin())) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

std::vector<SimConfig> ExperimentPlan::points() const {
    auto or_base = [](const auto& axis, auto base) {
        using T = decltype(base);
        return axis.empty() ? std::vector<T>{base} : std::vector<T>(axis.begin(), axis.end());
    };
    std::vector<SimConfig> out;
    for (auto c : or_base(configs, base.config_id)) {
        for (auto mf : or_base(malicious_fracs, base.malicious_frac)) {
            for (auto a : or_base(alphas, base.alpha)) {
                for (auto nn : or_base(nodes, base.n)) {
                    SimConfig p = base;
                    if (!configs.empty()) {
                        // An unknown id stays on the point and fails validation as a skipped row.
                        if (c <= 3) p.apply_preset(c);
                        p.config_id = c;
                    }
                    p.malicious_frac = mf;
                    p.alpha = a;
                    p.n = nn;
                    out.push_back(std::move(p));
                }
            }
        }
    }
    return out;
}

std::string ExperimentPlan::to_json() const {
    json j;
    j["base"] = base.to_text();
    j["nodes"] = nodes;
    j["alphas"] = alphas;
    j["configs"] = configs;
    j["malicious_fracs"] = malicious_fracs;
    j["seeds"] = seeds;
    return j.dump(2);
}

ExperimentPlan ExperimentPlan::from_json(const std::string& text) {
    ExperimentPlan p;
    try {
        auto j = json::parse(text);
        if (j.contains("base")) {
            const auto& b = j.at("base");
            if (b.is_string()) {
                p.base = SimConfig::from_text(b.get<std::string>());
            } else {
                // Object form: {"n": 32, "tau_s": 10, ...}; the preset goes first.
                if (b.contains("config")) p.base.set("config", b.at("config").dump());
                for (const auto& [k, v] : b.items()) {
                    if (k == "config") continue;
                    if (v.is_string()) {
                        p.base.set(k, v.get<std::string>());
                    } else if (v.is_array()) {
                        std::string joined;
                        for (const auto& x : v) joined += (joined.empty() ? "" : ",") + x.dump();
                        p.base.set(k, joined);
                    } else {
                        p.base.set(k, v.dump());
                    }
                }
            }
        }
        p.nodes = j.value("nodes", std::vector<std::uint32_t>{});
        p.alphas = j.value("alphas", std::vector<std::uint32_t>{});
        p.configs = j.value("configs", std::vector<std::uint32_t>{});
        p.malicious_fracs = j.value("malicious_fracs", std::vector<double>{});
        p.seeds = j.value("seeds", 1u);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidParameter, std::string("plan: ") + e.what());
    }
    if (p.seeds < 1) throw Error(ErrorCode::InvalidParameter, "plan: seeds must be at least 1");
    return p;
}

ExperimentPlan ExperimentPlan::from_file(const std::string& path) { return from_json(read_file(path)); }

// ---------------------------------------------------------------------------

MetricsReport report_for(const SimConfig& config, const SimResult& run) {
    auto m = compute_metrics(run);
    m.n = config.n;
    m.alpha = config.alpha;
    m.config = config.config_id;
    m.tau_s = config.tau_s;
    m.block_bytes = config.block_bytes;
    m.malicious_frac = config.malicious_frac;
    m.seed = config.seed;
    return m;
}

MetricsReport mean_row(const std::vector<MetricsReport>& rows) {
    MetricsReport out;
    if (!rows.empty()) {
        const auto& f = rows.front();
        out.n = f.n;
        out.alpha = f.alpha;
        out.config = f.config;
        out.tau_s = f.tau_s;
        out.block_bytes = f.block_bytes;
        out.malicious_frac = f.malicious_frac;
        out.slots = f.slots;
    }
    std::size_t used = 0;
    std::size_t lat_rows = 0;
    bool first_lat = true;
    for (const auto& r : rows) {
        if (r.skipped) continue;
        ++used;
        out.throughput_tps += r.throughput_tps;
        out.orphan_rate += r.orphan_rate;
        out.avg_round_s += r.avg_round_s;
        out.avg_blocks_per_cblock += r.avg_blocks_per_cblock;
        out.simulated_s += r.simulated_s;
        out.confirmed_txs += r.confirmed_txs;
        out.proposed_blocks += r.proposed_blocks;
        out.main_chain_blocks += r.main_chain_blocks;
        out.orphaned_blocks += r.orphaned_blocks;
        out.in_flight_blocks += r.in_flight_blocks;
        out.mean_qualifiers += r.mean_qualifiers;
        if (r.latency.samples) {
            out.latency.min_s = first_lat ? r.latency.min_s : std::min(out.latency.min_s, r.latency.min_s);
            out.latency.max_s = first_lat ? r.latency.max_s : std::max(out.latency.max_s, r.latency.max_s);
            out.latency.avg_s += r.latency.avg_s;
            out.latency.samples += r.latency.samples;
            first_lat = false;
            ++lat_rows;
        }
    }
    if (used == 0) {
        out.skipped = true;
        out.skip_reason = rows.empty() ? "no rows" : rows.front().skip_reason;
        return out;
    }
    const auto k = static_cast<double>(used);
    out.throughput_tps /= k;
    out.orphan_rate /= k;
    out.avg_round_s /= k;
    out.avg_blocks_per_cblock /= k;
    out.mean_qualifiers /= k;
    if (lat_rows) out.latency.avg_s /= static_cast<double>(lat_rows);
    return out;
}

std::vector<MetricsReport> run_experiment(const ExperimentPlan& plan, const RunOptions& options) {
    const auto points = plan.points();
    const std::size_t seeds = std::max<std::uint32_t>(plan.seeds, 1);
    const std::size_t total = points.size() * seeds;

    std::vector<std::optional<MetricsReport>> slots(total);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            auto cfg = points[i / seeds];
            cfg.seed = plan.base.seed + i % seeds;
            MetricsReport row;
            try {
                row = report_for(cfg, run_simulation(cfg));
            } catch (const Error& e) {
                row.n = cfg.n;
                row.alpha = cfg.alpha;
                row.config = cfg.config_id;
                row.tau_s = cfg.tau_s;
                row.block_bytes = cfg.block_bytes;
                row.malicious_frac = cfg.malicious_frac;
                row.seed = cfg.seed;
                row.slots = cfg.duration_slots;
                row.skipped = true;
                row.skip_reason = e.what();
            }
            std::lock_guard lock(mu);
            slots[i] = std::move(row);
            cv.notify_all();
        }
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);

    std::vector<MetricsReport> out;
    std::vector<MetricsReport> point_rows;
    for (std::size_t i = 0; i < total; ++i) {
        MetricsReport row;
        {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return slots[i].has_value(); });
            row = std::move(*slots[i]);
        }
        auto emit = [&](const MetricsReport& r) {
            out.push_back(r);
            if (options.on_row) options.on_row(r);
        };
        emit(row);
        point_rows.push_back(std::move(row));
        if (point_rows.size() == seeds) {
            if (seeds > 1 && !point_rows.front().skipped) emit(mean_row(point_rows));
            point_rows.clear();
        }
        if (options.on_progress) options.on_progress(i + 1, total);
    }
    for (auto& t : pool) t.join();
    return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "n",       "alpha",          "config",         "tau_s",          "block_bytes",
        "malicious_frac", "seed",    "slots",          "throughput_tps", "latency_min_s",
        "latency_avg_s",  "latency_max_s", "orphan_rate", "avg_round_s",  "avg_blocks_per_cblock",
    };
    return cols;
}

std::string csv_header() {
    std::string out;
    for (const auto& c : csv_columns()) out += (out.empty() ? "" : ",") + c;
    return out;
}

std::string csv_row(const MetricsReport& r) {
    std::vector<std::string> f = {
        std::to_string(r.n),
        std::to_string(r.alpha),
        std::to_string(r.config),
        num(r.tau_s),
        std::to_string(r.block_bytes),
        num(r.malicious_frac),
        r.seed ? std::to_string(*r.seed) : "mean",
        std::to_string(r.slots),
    };
    if (r.skipped) {
        f.resize(csv_columns().size());
    } else {
        const bool lat = r.latency.samples > 0;
        f.push_back(num(r.throughput_tps));
        f.push_back(lat ? num(r.latency.min_s) : "");
        f.push_back(lat ? num(r.latency.avg_s) : "");
        f.push_back(lat ? num(r.latency.max_s) : "");
        f.push_back(num(r.orphan_rate));
        f.push_back(num(r.avg_round_s));
        f.push_back(num(r.avg_blocks_per_cblock));
    }
    std::string out;
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
    return out;
}

void write_csv(std::ostream& out, const std::vector<MetricsReport>& reports) {
    out << csv_header() << '\n';
    for (const auto& r : reports) out << csv_row(r) << '\n';
}

namespace {

json to_j(const MetricsReport& r) {
    return json{
        {"n", r.n},
        {"alpha", r.alpha},
        {"config", r.config},
        {"tau_s", r.tau_s},
        {"block_bytes", r.block_bytes},
        {"malicious_frac", r.malicious_frac},
        {"seed", r.seed ? json(*r.seed) : json(nullptr)},
        {"slots", r.slots},
        {"skipped", r.skipped},
        {"skip_reason", r.skip_reason},
        {"throughput_tps", r.throughput_tps},
        {"latency", {{"min_s", r.latency.min_s}, {"avg_s", r.latency.avg_s}, {"max_s", r.latency.max_s},
                     {"samples", r.latency.samples}}},
        {"orphan_rate", r.orphan_rate},
        {"avg_round_s", r.avg_round_s},
        {"avg_blocks_per_cblock", r.avg_blocks_per_cblock},
        {"simulated_s", r.simulated_s},
        {"confirmed_txs", r.confirmed_txs},
        {"proposed_blocks", r.proposed_blocks},
        {"main_chain_blocks", r.main_chain_blocks},
        {"orphaned_blocks", r.orphaned_blocks},
        {"in_flight_blocks", r.in_flight_blocks},
        {"mean_qualifiers", r.mean_qualifiers},
    };
}

MetricsReport from_j(const json& j) {
    MetricsReport r;
    j.at("n").get_to(r.n);
    j.at("alpha").get_to(r.alpha);
    j.at("config").get_to(r.config);
    j.at("tau_s").get_to(r.tau_s);
    j.at("block_bytes").get_to(r.block_bytes);
    j.at("malicious_frac").get_to(r.malicious_frac);
    if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
    j.at("slots").get_to(r.slots);
    j.at("skipped").get_to(r.skipped);
    j.at("skip_reason").get_to(r.skip_reason);
    j.at("throughput_tps").get_to(r.throughput_tps);
    const auto& l = j.at("latency");
    l.at("min_s").get_to(r.latency.min_s);
    l.at("avg_s").get_to(r.latency.avg_s);
    l.at("max_s").get_to(r.latency.max_s);
    l.at("samples").get_to(r.latency.samples);
    j.at("orphan_rate").get_to(r.orphan_rate);
    j.at("avg_round_s").get_to(r.avg_round_s);
    j.at("avg_blocks_per_cblock").get_to(r.avg_blocks_per_cblock);
    j.at("simulated_s").get_to(r.simulated_s);
    j.at("confirmed_txs").get_to(r.confirmed_txs);
    j.at("proposed_blocks").get_to(r.proposed_blocks);
    j.at("main_chain_blocks").get_to(r.main_chain_blocks);
    j.at("orphaned_blocks").get_to(r.orphaned_blocks);
    j.at("in_flight_blocks").get_to(r.in_flight_blocks);
    j.at("mean_qualifiers").get_to(r.mean_qualifiers);
    return r;
}

}  // namespace

std::string reports_to_json(const std::vector<MetricsReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_j(r));
    return arr.dump(2);
}

std::vector<MetricsReport> reports_from_json(const std::string& text) {
    std::vector<MetricsReport> out;
    try {
        for (const auto& j : json::parse(text)) out.push_back(from_j(j));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidParameter, std::string("reports: ") + e.what());
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Stored C-Blocks and blocks in a stable order: by tournament, then hash.
template <class Map>
auto sorted_items(const Map& m) {
    std::vector<typename Map::mapped_type> out;
    for (const auto& [h, p] : m) out.push_back(p);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        auto ta = a->tournament_no(), tb = b->tournament_no();
        return ta != tb ? ta < tb : a->hash() < b->hash();
    });
    return out;
}

std::vector<CBlockPtr> sorted_cblocks(const LedgerStore& store) {
    std::vector<CBlockPtr> out;
    for (const auto& [h, c] : store.cblocks()) out.push_back(c);
    std::sort(out.begin(), out.end(), [](const CBlockPtr& a, const CBlockPtr& b) {
        return a->tournament_no != b->tournament_no ? a->tournament_no < b->tournament_no : a->hash < b->hash;
    });
    return out;
}

std::unordered_set<CBlockHash> main_chain(const SimResult& run) {
    const auto& store = *run.reference_store;
    std::unordered_set<CBlockHash> out;
    for (auto h = run.final_tip;; h = store.cblock(h)->prev_cblock) {
        out.insert(h);
        if (store.cblock(h)->is_genesis()) break;
    }
    return out;
}

}  // namespace

std::string ledger_to_json(const SimResult& run) {
    const auto& store = *run.reference_store;
    const auto chain = main_chain(run);
    const auto order = total_order(run.final_tip, store);
    const std::unordered_set<BlockHash> on_chain(order.begin(), order.end());

    json cblocks = json::array();
    for (const auto& c : sorted_cblocks(store)) {
        json inc = json::array();
        for (const auto& h : c->included) inc.push_back(h.hex());
        cblocks.push_back({{"hash", c->hash.hex()},
                           {"tournament", c->tournament_no},
                           {"prev", c->prev_cblock.hex()},
                           {"included", inc},
                           {"main_chain", chain.contains(c->hash)}});
    }
    json blocks = json::array();
    for (const auto& b : sorted_items(store.blocks())) {
        blocks.push_back({{"hash", b->hash().hex()},
                          {"tournament", b->tournament_no()},
                          {"prev_cblock", b->prev_cblock().hex()},
                          {"bucket", b->bucket_id()},
                          {"proposer", b->proposer()},
                          {"txs", b->txs().size()},
                          {"fouls", store.foul_count(b->hash())},
                          {"main_chain", on_chain.contains(b->hash())}});
    }
    json confirmed = json::array();
    for (const auto& h : run.nodes.at(run.reference).confirmed) confirmed.push_back(h.hex());
    json j{{"reference_node", run.reference},
           {"final_tip", run.final_tip.hex()},
           {"cblocks", cblocks},
           {"blocks", blocks},
           {"confirmed", confirmed}};
    return j.dump(2);
}

std::string ledger_to_dot(const SimResult& run) {
    const auto& store = *run.reference_store;
    const auto chain = main_chain(run);
    std::ostringstream out;
    out << "digraph cdag {\n  rankdir=RL;\n";
    for (const auto& c : sorted_cblocks(store)) {
        out << "  \"c" << c->hash.short_hex() << "\" [shape=ellipse, label=\"C t" << c->tournament_no << "\\n"
            << c->hash.short_hex() << "\", comment=\"cblock t=" << c->tournament_no << "\""
            << (chain.contains(c->hash) ? ", style=bold" : "") << "];\n";
    }
    const auto blocks = sorted_items(store.blocks());
    for (const auto& b : blocks) {
        out << "  \"b" << b->hash().short_hex() << "\" [shape=box, label=\"B t" << b->tournament_no() << " #"
            << b->bucket_id() << "\\n" << b->hash().short_hex() << "\", comment=\"block t=" << b->tournament_no()
            << "\"];\n";
    }
    for (const auto& b : blocks) {
        out << "  \"b" << b->hash().short_hex() << "\" -> \"c" << b->prev_cblock().short_hex() << "\";\n";
    }
    for (const auto& c : sorted_cblocks(store)) {
        for (const auto& h : c->included) {
            out << "  \"c" << c->hash.short_hex() << "\" -> \"b" << h.short_hex() << "\";\n";
        }
    }
    out << "}\n";
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << text;
    if (!out.flush()) throw Error(ErrorCode::Io, "cannot write " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace cdag
