#include "cdag/errors.hpp"

namespace cdag {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::CorruptStore: return "CorruptStore";
        case ErrorCode::EmptySlot: return "EmptySlot";
        case ErrorCode::NoTransactions: return "NoTransactions";
        case ErrorCode::NotInChain: return "NotInChain";
        case ErrorCode::NotInSlot: return "NotInSlot";
        case ErrorCode::Io: return "IoError";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace cdag
