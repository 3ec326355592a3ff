#include "cdag/barrier.hpp"

#include <algorithm>
#include <cmath>

namespace cdag {

Digest certificate_hash(const Digest& prev, std::uint64_t tournament_no, NodeId node) {
    return Hasher().add("barrier").add(prev).add(tournament_no).add(node).finish();
}

std::uint64_t OracleState::current_tournament(SimTime now) const {
    if (now < genesis_time) return 0;
    return static_cast<std::uint64_t>(std::floor((now - genesis_time) / tau)) + 1;
}

SimTime OracleState::slot_start(std::uint64_t tournament_no) const {
    return genesis_time + (static_cast<double>(tournament_no) - 1.0) * tau;
}

BarrierCertificate OracleState::anchor(std::uint64_t tournament_no) const {
    BarrierCertificate a;
    a.tournament_no = tournament_no;
    a.issued_at = slot_start(tournament_no);
    a.wait = tau;
    a.node = 0;
    a.prev_cert_hash = genesis_hash;
    a.cert_hash = Hasher().add("oracle-anchor").add(genesis_hash).add(tournament_no).finish();
    return a;
}

BarrierCertificate wait_certificate(NodeId node, const BarrierCertificate& prev, SimTime tau, SimTime skew) {
    BarrierCertificate c;
    c.tournament_no = prev.tournament_no + 1;
    c.issued_at = prev.issued_at + tau + std::max(0.0, skew);
    c.wait = tau;
    c.node = node;
    c.prev_cert_hash = prev.cert_hash;
    c.cert_hash = certificate_hash(prev.cert_hash, c.tournament_no, node);
    return c;
}

bool verify_certificate(const BarrierCertificate& cert, const BarrierCertificate& prev) {
    return cert.tournament_no == prev.tournament_no + 1 && cert.prev_cert_hash == prev.cert_hash && cert.wait > 0 &&
           cert.cert_hash == certificate_hash(cert.prev_cert_hash, cert.tournament_no, cert.node);
}

BarrierCertificate resync(NodeId node, const OracleState& oracle, SimTime now, SimTime offset) {
    auto t = std::max<std::uint64_t>(1, oracle.current_tournament(now));
    auto c = wait_certificate(node, oracle.anchor(t - 1), oracle.tau, 0);
    c.issued_at = oracle.slot_start(t) + offset;
    return c;
}

bool ResyncTrigger::observe(std::uint64_t mine, std::uint64_t theirs) {
    if (theirs <= mine) return false;
    if (++seen_ < threshold_) return false;
    seen_ = 0;
    return true;
}

}  // namespace cdag
