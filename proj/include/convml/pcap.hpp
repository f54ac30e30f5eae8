#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "convml/errors.hpp"

namespace convml {

/// One decoded transport-layer packet. Addresses and ports are host-order
/// numeric values; src_ip == (a<<24)|(b<<16)|(c<<8)|d for dotted quad a.b.c.d.
struct PacketRecord {
    double timestamp = 0.0;  // seconds since capture epoch
    uint8_t protocol = 0;    // 6 = TCP, 17 = UDP
    uint32_t src_ip = 0;
    uint16_t src_port = 0;
    uint32_t dst_ip = 0;
    uint16_t dst_port = 0;
    uint32_t wire_bytes = 0;  // original on-wire frame length
};

enum class ByteOrder { Little, Big };
enum class TimeResolution { Microsecond, Nanosecond };

/// Why a record was skipped rather than decoded.
enum class SkipReason {
    NonIp,                // ethertype is not IPv4 (ARP, IPv6, double VLAN, ...)
    NonIpv4,              // IP version field is not 4
    Fragment,             // non-first IP fragment, ports unavailable
    UnsupportedProtocol,  // IP protocol other than TCP/UDP
    BadLength,            // header lengths inconsistent or captured data too short
    TruncatedRecord,      // record body cut off by end of file
};

const char* to_string(SkipReason reason);

/**
 * Stream decoder for classic pcap files (Ethernet link type).
 *
 * Per-record corruption is never fatal: undecodable records are counted by
 * reason and the stream continues. Every complete record header encountered
 * yields exactly one packet or one skip, so
 *   packets_emitted() + sum(skip_counts()) == records_seen().
 *
 * pcapng and non-Ethernet captures are rejected at open with
 * UnsupportedFormat; a file shorter than the 24-byte global header throws
 * Truncated.
 */
class CaptureReader {
public:
    explicit CaptureReader(const std::string& path);

    CaptureReader(const CaptureReader&) = delete;
    CaptureReader& operator=(const CaptureReader&) = delete;
    CaptureReader(CaptureReader&&) = default;
    CaptureReader& operator=(CaptureReader&&) = default;

    struct Next {
        enum class Status { Packet, Skipped, End };
        Status status = Status::End;
        PacketRecord packet{};              // valid when status == Packet
        SkipReason reason = SkipReason::BadLength;  // valid when status == Skipped
    };

    /// Advance to the next record. Never throws; corruption is reported as
    /// Skipped and end of stream as End.
    Next next();

    /// Drain the stream into a vector (convenience for whole-file decoding).
    std::vector<PacketRecord> read_all();

    const std::string& source() const { return path_; }
    ByteOrder byte_order() const { return byte_order_; }
    TimeResolution resolution() const { return resolution_; }
    uint32_t link_type() const { return link_type_; }

    const std::map<SkipReason, uint64_t>& skip_counts() const { return skips_; }
    uint64_t records_seen() const { return records_seen_; }
    uint64_t packets_emitted() const { return packets_emitted_; }

    /// True once the file ended mid-record (incomplete header or body).
    bool truncated() const { return truncated_; }

private:
    Next skip(SkipReason reason);

    std::string path_;
    std::ifstream file_;
    ByteOrder byte_order_ = ByteOrder::Little;
    TimeResolution resolution_ = TimeResolution::Microsecond;
    uint32_t link_type_ = 0;
    std::map<SkipReason, uint64_t> skips_;
    uint64_t records_seen_ = 0;
    uint64_t packets_emitted_ = 0;
    bool truncated_ = false;
    bool done_ = false;
    std::vector<uint8_t> body_;  // reused record buffer
};

}  // namespace convml
