#pragma once

#include "cdag/digest.hpp"

#include <cstdint>

namespace cdag {

/// Simulated seconds.
using SimTime = double;

/// Wait certificate gating entry into one tournament. Certificates form a
/// per-node hash chain; a bootstrap certificate chains from an oracle anchor.
struct BarrierCertificate {
    std::uint64_t tournament_no = 0;
    SimTime issued_at = 0;
    SimTime wait = 0;
    NodeId node = 0;
    Digest prev_cert_hash;
    Digest cert_hash;

    bool operator==(const BarrierCertificate&) const = default;
};

Digest certificate_hash(const Digest& prev, std::uint64_t tournament_no, NodeId node);

/// The single logical time oracle. Tournament t occupies
/// [genesis_time + (t-1)·tau, genesis_time + t·tau).
struct OracleState {
    SimTime genesis_time = 0;
    SimTime tau = 20;
    Digest genesis_hash;

    std::uint64_t current_tournament(SimTime now) const;
    SimTime slot_start(std::uint64_t tournament_no) const;
    /// Pseudo-certificate that bootstrap certificates for tournament_no + 1 chain from.
    BarrierCertificate anchor(std::uint64_t tournament_no) const;
};

/// Next certificate in `prev`'s chain, issued tau + skew after prev. Negative
/// skew is clamped to zero: a timer never fires early.
BarrierCertificate wait_certificate(NodeId node, const BarrierCertificate& prev, SimTime tau, SimTime skew);

/// Hash chaining, tournament succession and a positive wait.
bool verify_certificate(const BarrierCertificate& cert, const BarrierCertificate& prev);

/// Bootstrap certificate for the oracle's current tournament at `now`,
/// issued at that slot's start shifted by the node's clock offset.
BarrierCertificate resync(NodeId node, const OracleState& oracle, SimTime now, SimTime offset = 0);

/// Messages more than one tournament away are not processed.
inline bool within_tolerance(std::uint64_t mine, std::uint64_t theirs) {
    return (mine > theirs ? mine - theirs : theirs - mine) <= 1;
}

/// Counts messages from strictly later tournaments and fires once the
/// threshold is reached.
class ResyncTrigger {
public:
    explicit ResyncTrigger(unsigned threshold = 3) : threshold_(threshold) {}

    /// True when the caller should poll the oracle.
    bool observe(std::uint64_t mine, std::uint64_t theirs);
    void reset() { seen_ = 0; }
    unsigned seen() const { return seen_; }

private:
    unsigned threshold_;
    unsigned seen_ = 0;
};

}  // namespace cdag
