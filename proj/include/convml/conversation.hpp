#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "convml/pcap.hpp"

namespace convml {

struct Endpoint {
    uint32_t ip = 0;
    uint16_t port = 0;
    auto operator<=>(const Endpoint&) const = default;
};

/// Direction-insensitive 5-tuple: endpoints are stored sorted so that
/// (proto, a, b) and (proto, b, a) compare and hash identically.
struct ConversationKey {
    uint8_t protocol = 0;
    Endpoint lo;
    Endpoint hi;

    static ConversationKey canonical(uint8_t protocol, Endpoint x, Endpoint y) {
        if (y < x) std::swap(x, y);
        return ConversationKey{protocol, x, y};
    }

    auto operator<=>(const ConversationKey&) const = default;
};

struct ConversationKeyHash {
    size_t operator()(const ConversationKey& k) const {
        uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](uint64_t v) {
            h ^= v;
            h *= 0x100000001b3ULL;
        };
        mix(k.protocol);
        mix(k.lo.ip);
        mix(k.lo.port);
        mix(k.hi.ip);
        mix(k.hi.port);
        return static_cast<size_t>(h);
    }
};

/// One bidirectional 5-tuple aggregate. Endpoint A is the sender of the
/// conversation's first observed packet; totals are directional sums.
struct Conversation {
    uint8_t protocol = 0;
    uint32_t address_a = 0;
    uint16_t port_a = 0;
    uint32_t address_b = 0;
    uint16_t port_b = 0;
    uint64_t packets = 0;
    uint64_t bytes = 0;
    uint64_t packets_ab = 0;
    uint64_t bytes_ab = 0;
    uint64_t packets_ba = 0;
    uint64_t bytes_ba = 0;
    double rel_start = 0.0;  // first packet time relative to capture start
    double duration = 0.0;   // last minus first packet time
    std::string source_capture;

    ConversationKey key() const {
        return ConversationKey::canonical(protocol, {address_a, port_a}, {address_b, port_b});
    }

    bool operator==(const Conversation&) const = default;
};

/**
 * Accumulates packets of one capture into conversations.
 *
 * Single-consumer, one table per capture. finalize() computes totals and
 * timing and returns conversations ordered by (rel_start, canonical key);
 * it does not mutate the table and may be called repeatedly.
 */
class ConversationTable {
public:
    explicit ConversationTable(std::string capture_id = {}) : capture_id_(std::move(capture_id)) {}

    /// Fold one packet in. packet.protocol must be 6 or 17.
    void accumulate(const PacketRecord& packet);

    /// rel_start is measured against capture_start, the capture's first
    /// decoded packet timestamp.
    std::vector<Conversation> finalize(double capture_start) const;

    /// Convenience: uses the first accumulated packet's timestamp as start.
    std::vector<Conversation> finalize() const { return finalize(first_packet_time_); }

    size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    uint64_t packets_accumulated() const { return packets_accumulated_; }
    const std::string& capture_id() const { return capture_id_; }

private:
    struct Entry {
        Conversation conv;
        double first_time = 0.0;
        double last_time = 0.0;
    };

    std::string capture_id_;
    std::unordered_map<ConversationKey, Entry, ConversationKeyHash> entries_;
    uint64_t packets_accumulated_ = 0;
    double first_packet_time_ = 0.0;
};

/// Decode a whole capture file and aggregate it in one pass.
std::vector<Conversation> extract_conversations(const std::string& pcap_path,
                                                const std::string& capture_id);

}  // namespace convml
