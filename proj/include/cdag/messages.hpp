#pragma once

#include "cdag/block.hpp"
#include "cdag/colosseum.hpp"
#include "cdag/ledger.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>

namespace cdag {

enum class MsgKind : std::uint8_t {
    TxGossip,
    HeaderAnnounce,
    BodyRequest,
    BlockBody,
    PoWinMsg,
    KeeperVote,
    FoulAlert,
    BarrierSync,
    PairProbe,
    PairReply,
    PairCancel,
    GameProposal,
    ResultQuery,
    ResultAnswer,
};
inline constexpr std::size_t kMsgKindCount = 14;

const char* to_string(MsgKind k);

/// Wire size of fixed-size kinds. BlockBody and TxGossip are sized by content.
std::uint64_t fixed_size(MsgKind k);

struct HeaderAnnounceMsg {
    BlockHash block;
    CBlockHash prev;
    std::uint32_t bucket = 0;
    NodeId proposer = 0;
};

struct BodyRequestMsg {
    Digest hash;
    bool cblock = false;
};

/// Either a block with its parent C-Block, or a C-Block alone.
struct BlockBodyMsg {
    BlockPtr block;
    CBlockPtr cblock;
};

enum class PoWinRoute : std::uint8_t { ToPlayer, ToKeeper, KeeperGossip };

struct PoWinPayload {
    PoWin powin;
    PoWinRoute route = PoWinRoute::ToPlayer;
    NodeId subject = 0;  // whose keepers this copy is for
};

struct KeeperVotePayload {
    KeeperVoteRecord vote;
};

struct FoulAlertPayload {
    FoulNotice notice;
};

struct PairProbeMsg {
    std::uint32_t round = 1;
    std::optional<PoWin> prev;  // the prober's previous-round win
    BarrierCertificate cert;
};

enum class PairRefusal : std::uint8_t { None, Busy, WrongRound, WrongTournament, NotPlaying, Excluded };

struct PairReplyMsg {
    std::uint32_t round = 1;
    bool accept = false;
    PairRefusal reason = PairRefusal::None;
    std::optional<PoWin> prev;
    std::uint32_t responder_round = 0;
    std::vector<NodeId> hints;  // other nodes recently seen seeking this round, freshest first
};

struct PairCancelMsg {
    Digest match_id;
};

struct GameProposalMsg {
    MatchSpec match;
    GameProposal proposal;
};

struct ResultQueryMsg {
    Digest match_id;
    NodeId subject = 0;
};

struct ResultAnswerMsg {
    Digest match_id;
    std::optional<PoWin> powin;
};

using Payload = std::variant<std::monostate, HeaderAnnounceMsg, BodyRequestMsg, BlockBodyMsg, PoWinPayload,
                             KeeperVotePayload, FoulAlertPayload, PairProbeMsg, PairReplyMsg, PairCancelMsg,
                             GameProposalMsg, ResultQueryMsg, ResultAnswerMsg>;

struct Message {
    MsgKind kind = MsgKind::BarrierSync;
    NodeId origin = 0;
    NodeId sender = 0;
    std::uint32_t hops = 0;
    std::uint64_t bytes = 0;
    std::uint64_t tournament_no = 0;
    Digest id;            // content digest; duplicate suppression key for gossip
    bool gossip = false;  // relayed by the network on first receipt
    std::shared_ptr<const Payload> body;

    template <class T>
    const T& as() const {
        return std::get<T>(*body);
    }
};

/// Builds a message with its size derived from the kind and payload.
Message make_message(MsgKind kind, NodeId origin, std::uint64_t tournament_no, const Digest& id, Payload body);

}  // namespace cdag
