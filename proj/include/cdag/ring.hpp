#pragma once

#include "cdag/digest.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace cdag {

/// Identifier circle. Node i sits at positions()[i]; lookups map a key to
/// the first node clockwise from it.
class Ring {
public:
    explicit Ring(std::vector<std::uint64_t> positions);

    /// Positions derived from hash("ring", seed, i).
    static Ring from_seed(std::size_t n, std::uint64_t seed);

    std::size_t size() const { return positions_.size(); }
    std::uint64_t position(NodeId n) const { return positions_.at(n); }
    NodeId successor(NodeId n) const;
    NodeId lookup(std::uint64_t key) const;
    NodeId lookup(const Digest& key) const { return lookup(key.prefix64()); }
    /// Node ids in clockwise order starting from the smallest position.
    const std::vector<NodeId>& clockwise() const { return order_; }

private:
    std::vector<std::uint64_t> positions_;
    std::vector<NodeId> order_;
    std::vector<std::size_t> rank_;
};

/// ceil(log2 n), with a minimum of 1.
std::uint32_t ceil_log2(std::size_t n);

/// Per-node routing tables of ceil(log2 N) distinct random peers.
std::vector<std::vector<NodeId>> make_routing_tables(const Ring& ring, std::mt19937_64& rng);

}  // namespace cdag
