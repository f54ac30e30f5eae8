#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "convml/conversation.hpp"
#include "convml/dataset.hpp"

namespace convml {

/// Inclusive integer range.
struct CountRange {
    uint64_t lo = 1;
    uint64_t hi = 1;
};

/**
 * Parameters for one synthetic capture. The seed fully determines the output:
 * the same config produces byte-identical pcap data and ground truth.
 *
 * Malware-style configs model beaconing to remote endpoints (many short
 * conversations, unusual ports); goodware-style configs model ordinary
 * web/NTP/NetBIOS mixes. The packaged profiles produce cleanly separable
 * classes; the overlapping variants draw both classes from the same pools.
 */
struct ScenarioConfig {
    Label label = Label::Goodware;
    CountRange conversations{8, 16};
    CountRange packets_per_conversation{2, 30};
    CountRange payload_bytes{0, 1400};          // per packet, capped at 60000
    CountRange start_offset_micros{0, 30000000};  // conversation start in the capture
    CountRange gap_micros{1000, 500000};        // between packets of one conversation
    double tcp_fraction = 0.8;
    double reply_probability = 0.5;     // chance a follow-up packet flows B->A
    double mirror_port_fraction = 0.0;  // A's port copies B's (NTP/NetBIOS style)
    uint32_t local_host = 0x0a00020f;   // 10.0.2.15
    std::vector<uint32_t> remote_pool;  // candidate B addresses
    std::vector<uint16_t> remote_ports; // candidate B ports
    uint64_t seed = 0;

    static ScenarioConfig goodware_profile(uint64_t seed);
    static ScenarioConfig malware_profile(uint64_t seed);
    /// Same pools and shapes for both classes; nothing to separate on.
    static ScenarioConfig goodware_overlapping(uint64_t seed);
    static ScenarioConfig malware_overlapping(uint64_t seed);
};

struct GeneratedCapture {
    std::vector<uint8_t> pcap;                // classic pcap file image
    std::vector<Conversation> ground_truth;   // what decode+aggregate must produce
    Label label = Label::Goodware;
};

/// Produce a capture whose decoded, aggregated conversations equal the
/// returned ground truth exactly. Packets are interleaved across
/// conversations in timestamp order.
GeneratedCapture generate_capture(const ScenarioConfig& config,
                                  const std::string& capture_id = "");

struct CorpusEntry {
    std::string file;  // pcap file name within the corpus directory
    Label label = Label::Goodware;
};

struct Corpus {
    std::string directory;
    std::string manifest_path;
    std::vector<CorpusEntry> entries;
};

/// Write captures_per_class pcaps per class into out_dir, each named by a
/// synthetic hash, plus a `manifest.csv` mapping file to label. Per-capture
/// seeds derive from the corpus seed; the configs' own seeds are ignored.
Corpus generate_corpus(const ScenarioConfig& goodware, const ScenarioConfig& malware,
                       size_t captures_per_class, uint64_t seed, const std::string& out_dir);

/// Read a `file,label` manifest back. Keys are the file names as written.
std::map<std::string, Label> read_manifest(const std::string& path);

}  // namespace convml
