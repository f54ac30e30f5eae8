#include "convml/conversation.hpp"

#include <algorithm>

namespace convml {

void ConversationTable::accumulate(const PacketRecord& packet) {
    if (packets_accumulated_ == 0) {
        first_packet_time_ = packet.timestamp;
    }
    ++packets_accumulated_;

    const Endpoint src{packet.src_ip, packet.src_port};
    const Endpoint dst{packet.dst_ip, packet.dst_port};
    const ConversationKey key = ConversationKey::canonical(packet.protocol, src, dst);

    auto [it, inserted] = entries_.try_emplace(key);
    Entry& entry = it->second;
    if (inserted) {
        // First packet seen for this key: its sender becomes endpoint A.
        entry.conv.protocol = packet.protocol;
        entry.conv.address_a = packet.src_ip;
        entry.conv.port_a = packet.src_port;
        entry.conv.address_b = packet.dst_ip;
        entry.conv.port_b = packet.dst_port;
        entry.conv.source_capture = capture_id_;
        entry.first_time = packet.timestamp;
        entry.last_time = packet.timestamp;
    } else {
        entry.first_time = std::min(entry.first_time, packet.timestamp);
        entry.last_time = std::max(entry.last_time, packet.timestamp);
    }

    const bool a_to_b = src.ip == entry.conv.address_a && src.port == entry.conv.port_a;
    if (a_to_b) {
        entry.conv.packets_ab += 1;
        entry.conv.bytes_ab += packet.wire_bytes;
    } else {
        entry.conv.packets_ba += 1;
        entry.conv.bytes_ba += packet.wire_bytes;
    }
}

std::vector<Conversation> ConversationTable::finalize(double capture_start) const {
    std::vector<Conversation> out;
    out.reserve(entries_.size());
    for (const auto& [key, entry] : entries_) {
        Conversation c = entry.conv;
        c.packets = c.packets_ab + c.packets_ba;
        c.bytes = c.bytes_ab + c.bytes_ba;
        c.rel_start = entry.first_time - capture_start;
        c.duration = entry.last_time - entry.first_time;
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const Conversation& a, const Conversation& b) {
        if (a.rel_start != b.rel_start) return a.rel_start < b.rel_start;
        return a.key() < b.key();
    });
    return out;
}

std::vector<Conversation> extract_conversations(const std::string& pcap_path,
                                                const std::string& capture_id) {
    CaptureReader reader(pcap_path);
    ConversationTable table(capture_id);
    for (;;) {
        auto n = reader.next();
        if (n.status == CaptureReader::Next::Status::End) break;
        if (n.status == CaptureReader::Next::Status::Packet) {
            table.accumulate(n.packet);
        }
    }
    return table.finalize();
}

}  // namespace convml
