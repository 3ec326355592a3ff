#pragma once

#include "cdag/config.hpp"
#include "cdag/simulation.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cdag {

struct LatencyStats {
    double min_s = 0;
    double avg_s = 0;
    double max_s = 0;
    std::size_t samples = 0;

    bool operator==(const LatencyStats&) const = default;
};

/// Metrics of one run, or the mean over a point's seeds.
struct MetricsReport {
    // point
    std::uint32_t n = 0;
    std::uint32_t alpha = 0;
    std::uint32_t config = 0;
    double tau_s = 0;
    std::uint64_t block_bytes = 0;
    double malicious_frac = 0;
    std::optional<std::uint64_t> seed;  // empty on a mean row
    std::uint32_t slots = 0;

    bool skipped = false;
    std::string skip_reason;

    double throughput_tps = 0;
    LatencyStats latency;
    double orphan_rate = 0;
    double avg_round_s = 0;
    double avg_blocks_per_cblock = 0;

    // accounting behind the rates
    double simulated_s = 0;
    std::uint64_t confirmed_txs = 0;
    std::uint64_t proposed_blocks = 0;
    std::uint64_t main_chain_blocks = 0;
    std::uint64_t orphaned_blocks = 0;
    std::uint64_t in_flight_blocks = 0;
    double mean_qualifiers = 0;

    bool operator==(const MetricsReport&) const = default;
};

/// Metrics from the reference node's view.
///
/// Throughput counts every confirmed transaction over the whole run. Latency
/// runs from block emission to confirmation and skips blocks of the first
/// F+1 tournaments. Orphans are proposed blocks missing from the main chain,
/// counted up to the final tip's tournament; later blocks are in flight.
MetricsReport compute_metrics(const SimResult& run);

/// Emission-to-confirmation delay of every confirmed block, warm-up included.
std::vector<std::pair<BlockPtr, double>> block_latencies(const SimResult& run);

/// Pairs of distinct confirmed transactions sharing an input, per honest node.
std::uint64_t conflicting_confirmations(const SimResult& run);

/// Every pair of honest confirmed lists is prefix-consistent.
bool honest_prefixes_agree(const SimResult& run);

struct ExperimentPlan {
    SimConfig base;
    std::vector<std::uint32_t> nodes;    // empty keeps base.n
    std::vector<std::uint32_t> alphas;   // empty keeps base.alpha
    std::vector<std::uint32_t> configs;  // 1..3; empty keeps the base slot/block pair
    std::vector<double> malicious_fracs; // empty keeps base.malicious_frac
    std::uint32_t seeds = 1;             // seeds base.seed, base.seed+1, ...

    /// Points in sweep order: config, then malicious fraction, alpha, nodes.
    std::vector<SimConfig> points() const;

    std::string to_json() const;
    static ExperimentPlan from_json(const std::string& text);
    static ExperimentPlan from_file(const std::string& path);

    bool operator==(const ExperimentPlan&) const = default;
};

struct RunOptions {
    unsigned threads = 0;  // 0 picks the hardware concurrency
    /// Called by the collecting thread for each row in final order.
    std::function<void(const MetricsReport&)> on_row;
    std::function<void(std::size_t done, std::size_t total)> on_progress;
};

/// Per-seed rows of every point, followed by a mean row when a point has more
/// than one seed. An invalid point yields skipped rows and no mean.
std::vector<MetricsReport> run_experiment(const ExperimentPlan& plan, const RunOptions& options = {});

/// Mean of per-seed rows of one point; skipped rows are ignored.
MetricsReport mean_row(const std::vector<MetricsReport>& rows);

MetricsReport report_for(const SimConfig& config, const SimResult& run);

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const MetricsReport& r);
void write_csv(std::ostream& out, const std::vector<MetricsReport>& reports);

std::string reports_to_json(const std::vector<MetricsReport>& reports);
std::vector<MetricsReport> reports_from_json(const std::string& text);

std::string ledger_to_json(const SimResult& run);
/// Graphviz view of the reference node's ledger: blocks point at their parent
/// C-Block and C-Blocks point at the blocks they include.
std::string ledger_to_dot(const SimResult& run);

/// Writes text to path, throwing Io with the path on failure.
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace cdag
