#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cdag {

/// Every knob of one simulated run. Text form is `key = value` per line;
/// `#` starts a comment.
struct SimConfig {
    std::uint32_t n = 64;
    std::uint32_t alpha = 4;
    std::uint32_t k = 16;              // keeper replication
    double tau_s = 20.0;
    std::uint32_t buckets = 40;
    std::uint32_t f = 3;               // full confirmations required
    std::uint64_t block_bytes = 1'000'000;
    std::uint32_t tx_bytes = 350;
    double bandwidth_bps = 25e6;
    double latency_min_ms = 20;
    double latency_max_ms = 100;
    double tx_rate = 0;                // transactions per second; 0 keeps every bucket stocked
    double double_spend_rate = 0;      // fraction of transactions that get a conflicting twin
    double malicious_frac = 0;
    std::vector<std::uint32_t> malicious;  // explicit ids, added to the fraction
    std::string adversary = "mixed";   // mixed | negligent | validator:<1-5> | keeper:<1-4> | multiplay | bypass
    double skew_ms = 500;              // clock offsets uniform in ±skew
    double drift_ppm = 0;
    std::uint32_t duration_slots = 30;
    std::uint64_t seed = 1;
    std::uint32_t probe_budget = 0;    // 0 means 2·ceil(log2 N)
    double pairing_frac = 0.15;        // pairing deadline per round, fraction of tau
    double validator_wait_frac = 0.10; // validator wait per round, fraction of tau
    bool resync = true;
    std::uint32_t config_id = 0;       // 1..3 for the fixed block size / slot pairs, 0 otherwise

    /// Applies one of the three fixed block size / slot length pairs.
    void apply_preset(std::uint32_t id);

    /// Throws InvalidParameter naming the first offending key.
    void validate() const;

    /// Sets one key from text. Throws InvalidParameter for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    std::map<std::string, std::string> to_map() const;
    std::string to_text() const;
    static SimConfig from_text(const std::string& text);
    static SimConfig from_file(const std::string& path);

    /// Overrides keys from environment variables named prefix + upper-case key,
    /// e.g. CDAG_N or CDAG_TAU_S.
    void apply_env(const std::string& prefix = "CDAG_");

    static std::vector<std::string> keys();

    bool operator==(const SimConfig&) const = default;
};

}  // namespace cdag
