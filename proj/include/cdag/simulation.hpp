#pragma once

#include "cdag/config.hpp"
#include "cdag/ledger.hpp"
#include "cdag/network.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

namespace cdag {

struct BlockRecord {
    BlockPtr block;
    SimTime emitted = 0;
};

struct NodeOutcome {
    NodeId id = 0;
    bool honest = true;
    AdversaryProfile profile;
    std::vector<BlockHash> confirmed;  // append-only, in total order
    std::uint64_t reversals = 0;       // times the heaviest chain stopped extending `confirmed`
    std::uint64_t resyncs = 0;
};

struct FoulEvent {
    NodeId subject = 0;
    std::uint64_t tournament_no = 0;
    bool evidence = false;
    SimTime applied_at = 0;  // at the reference node
};

struct SimResult {
    SimConfig config;
    NodeId reference = 0;  // lowest-id honest node; metrics are taken from its view
    SimTime start_time = 0;
    SimTime end_time = 0;
    std::vector<BlockRecord> proposed;
    std::unordered_map<BlockHash, SimTime> confirmed_at;  // reference node
    std::vector<NodeOutcome> nodes;
    CBlockHash final_tip;
    std::shared_ptr<const LedgerStore> reference_store;
    std::vector<std::uint32_t> qualifiers;              // per tournament 1..S
    std::map<std::uint32_t, std::vector<std::uint32_t>> unpaired;  // round -> count per tournament 1..S
    double round_time_sum = 0;
    std::uint64_t rounds_timed = 0;
    std::vector<FoulEvent> fouls;
    std::map<std::string, std::uint64_t> counters;
    TrafficStats traffic;
    Digest trace_digest;
    std::uint64_t events = 0;
};

/// One seeded run: N nodes play a tournament per slot, qualifiers propose
/// blocks, and every node converges blocks into C-Blocks over a simulated
/// network. Identical configs give identical results.
SimResult run_simulation(const SimConfig& config, std::ostream* trace = nullptr);

}  // namespace cdag
