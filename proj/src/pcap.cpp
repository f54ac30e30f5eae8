#include "convml/pcap.hpp"

#include <array>
#include <cstring>

namespace convml {

namespace {

constexpr uint32_t kMagicMicro = 0xa1b2c3d4;
constexpr uint32_t kMagicNano = 0xa1b23c4d;
constexpr uint32_t kPcapngBlock = 0x0a0d0d0a;
constexpr uint32_t kLinkEthernet = 1;
constexpr uint16_t kEthertypeIpv4 = 0x0800;
constexpr uint16_t kEthertypeVlan = 0x8100;
constexpr size_t kEthernetHeader = 14;
constexpr size_t kVlanTag = 4;
constexpr uint32_t kMinWireBytes = 14 + 20 + 8;  // link + IP + UDP
// Records claiming more captured bytes than this are treated as corrupt.
constexpr uint32_t kMaxCapturedBytes = 64u * 1024 * 1024;

uint32_t read_u32(const uint8_t* p, ByteOrder order) {
    if (order == ByteOrder::Little) {
        return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
               static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
    }
    return static_cast<uint32_t>(p[0]) << 24 | static_cast<uint32_t>(p[1]) << 16 |
           static_cast<uint32_t>(p[2]) << 8 | static_cast<uint32_t>(p[3]);
}

uint16_t read_be16(const uint8_t* p) {
    return static_cast<uint16_t>(static_cast<uint16_t>(p[0]) << 8 | p[1]);
}

uint32_t read_be32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) << 24 | static_cast<uint32_t>(p[1]) << 16 |
           static_cast<uint32_t>(p[2]) << 8 | static_cast<uint32_t>(p[3]);
}

}  // namespace

const char* to_string(SkipReason reason) {
    switch (reason) {
        case SkipReason::NonIp: return "non-ip";
        case SkipReason::NonIpv4: return "non-ipv4";
        case SkipReason::Fragment: return "fragment";
        case SkipReason::UnsupportedProtocol: return "unsupported-protocol";
        case SkipReason::BadLength: return "bad-length";
        case SkipReason::TruncatedRecord: return "truncated-record";
    }
    return "unknown";
}

CaptureReader::CaptureReader(const std::string& path) : path_(path) {
    file_.open(path, std::ios::binary);
    if (!file_) {
        throw IoError("cannot open capture file: " + path);
    }

    std::array<uint8_t, 24> header{};
    file_.read(reinterpret_cast<char*>(header.data()), header.size());
    if (file_.gcount() != static_cast<std::streamsize>(header.size())) {
        throw Truncated("file shorter than the 24-byte pcap global header: " + path);
    }

    const uint32_t magic_le = read_u32(header.data(), ByteOrder::Little);
    const uint32_t magic_be = read_u32(header.data(), ByteOrder::Big);
    if (magic_le == kPcapngBlock || magic_be == kPcapngBlock) {
        throw UnsupportedFormat("pcapng not supported (classic pcap only): " + path);
    }
    if (magic_le == kMagicMicro) {
        byte_order_ = ByteOrder::Little;
        resolution_ = TimeResolution::Microsecond;
    } else if (magic_be == kMagicMicro) {
        byte_order_ = ByteOrder::Big;
        resolution_ = TimeResolution::Microsecond;
    } else if (magic_le == kMagicNano) {
        byte_order_ = ByteOrder::Little;
        resolution_ = TimeResolution::Nanosecond;
    } else if (magic_be == kMagicNano) {
        byte_order_ = ByteOrder::Big;
        resolution_ = TimeResolution::Nanosecond;
    } else {
        throw UnsupportedFormat("unrecognized capture magic: " + path);
    }

    link_type_ = read_u32(header.data() + 20, byte_order_);
    if (link_type_ != kLinkEthernet) {
        throw UnsupportedFormat("link type " + std::to_string(link_type_) +
                                " not supported (Ethernet required): " + path);
    }
}

CaptureReader::Next CaptureReader::skip(SkipReason reason) {
    ++skips_[reason];
    Next out;
    out.status = Next::Status::Skipped;
    out.reason = reason;
    return out;
}

CaptureReader::Next CaptureReader::next() {
    Next out;
    if (done_) {
        return out;
    }

    std::array<uint8_t, 16> rec{};
    file_.read(reinterpret_cast<char*>(rec.data()), rec.size());
    const auto got = file_.gcount();
    if (got != static_cast<std::streamsize>(rec.size())) {
        done_ = true;
        truncated_ = got != 0;  // a partial record header means the file was cut
        return out;
    }
    ++records_seen_;

    const uint32_t ts_sec = read_u32(rec.data(), byte_order_);
    const uint32_t ts_frac = read_u32(rec.data() + 4, byte_order_);
    const uint32_t incl_len = read_u32(rec.data() + 8, byte_order_);
    const uint32_t orig_len = read_u32(rec.data() + 12, byte_order_);

    if (incl_len == 0 || incl_len > kMaxCapturedBytes) {
        // No trustworthy way to resynchronize; stop after counting the record.
        done_ = true;
        truncated_ = true;
        return skip(SkipReason::BadLength);
    }

    body_.resize(incl_len);
    file_.read(reinterpret_cast<char*>(body_.data()), incl_len);
    if (file_.gcount() != static_cast<std::streamsize>(incl_len)) {
        done_ = true;
        truncated_ = true;
        return skip(SkipReason::TruncatedRecord);
    }

    // Ethernet, with one VLAN tag unwrapped transparently.
    if (body_.size() < kEthernetHeader) {
        return skip(SkipReason::BadLength);
    }
    size_t l3 = kEthernetHeader;
    uint16_t ethertype = read_be16(body_.data() + 12);
    if (ethertype == kEthertypeVlan) {
        if (body_.size() < kEthernetHeader + kVlanTag) {
            return skip(SkipReason::BadLength);
        }
        ethertype = read_be16(body_.data() + 16);
        l3 += kVlanTag;
    }
    if (ethertype != kEthertypeIpv4) {
        return skip(SkipReason::NonIp);
    }

    // IPv4.
    if (body_.size() < l3 + 20) {
        return skip(SkipReason::BadLength);
    }
    const uint8_t* ip = body_.data() + l3;
    if ((ip[0] >> 4) != 4) {
        return skip(SkipReason::NonIpv4);
    }
    const size_t ihl = static_cast<size_t>(ip[0] & 0x0f) * 4;
    if (ihl < 20 || body_.size() < l3 + ihl) {
        return skip(SkipReason::BadLength);
    }
    const uint16_t frag = read_be16(ip + 6);
    if ((frag & 0x1fff) != 0) {
        return skip(SkipReason::Fragment);  // ports only live in the first fragment
    }
    const uint8_t protocol = ip[9];
    if (protocol != 6 && protocol != 17) {
        return skip(SkipReason::UnsupportedProtocol);
    }

    // TCP/UDP ports sit in the first four transport bytes either way.
    const size_t l4 = l3 + ihl;
    if (body_.size() < l4 + 4) {
        return skip(SkipReason::BadLength);
    }
    if (orig_len < kMinWireBytes) {
        return skip(SkipReason::BadLength);
    }

    PacketRecord& pkt = out.packet;
    pkt.protocol = protocol;
    pkt.src_ip = read_be32(ip + 12);
    pkt.dst_ip = read_be32(ip + 16);
    pkt.src_port = read_be16(body_.data() + l4);
    pkt.dst_port = read_be16(body_.data() + l4 + 2);
    pkt.wire_bytes = orig_len;
    const double unit = resolution_ == TimeResolution::Microsecond ? 1e-6 : 1e-9;
    pkt.timestamp = static_cast<double>(ts_sec) + static_cast<double>(ts_frac) * unit;

    out.status = Next::Status::Packet;
    ++packets_emitted_;
    return out;
}

std::vector<PacketRecord> CaptureReader::read_all() {
    std::vector<PacketRecord> packets;
    for (;;) {
        Next n = next();
        if (n.status == Next::Status::End) {
            break;
        }
        if (n.status == Next::Status::Packet) {
            packets.push_back(n.packet);
        }
    }
    return packets;
}

}  // namespace convml
