#include "convml/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "convml/pipeline.hpp"
#include "convml/rng.hpp"
#include "textutil.hpp"

namespace convml {

namespace {

constexpr uint64_t kEpochBaseSeconds = 1600000000;  // fixed capture epoch
constexpr uint64_t kMaxPayload = 60000;

std::vector<uint32_t> address_block(const char* base_dotted, uint32_t count) {
    const uint32_t base = ip_to_decimal(base_dotted);
    std::vector<uint32_t> out;
    out.reserve(count);
    for (uint32_t i = 0; i < count; ++i) out.push_back(base + i);
    return out;
}

void check_range(const CountRange& r, const char* what) {
    if (r.lo > r.hi) {
        throw Error(std::string("empty range for ") + what);
    }
}

void validate(const ScenarioConfig& config) {
    check_range(config.conversations, "conversation count");
    check_range(config.packets_per_conversation, "packets per conversation");
    check_range(config.payload_bytes, "payload bytes");
    check_range(config.start_offset_micros, "start offset");
    check_range(config.gap_micros, "packet gap");
    if (config.packets_per_conversation.lo < 1) {
        throw Error("conversations need at least one packet");
    }
    if (config.payload_bytes.hi > kMaxPayload) {
        throw Error("payload size exceeds the frame size limit");
    }
    if (config.remote_pool.empty() || config.remote_ports.empty()) {
        throw Error("remote address and port pools must be non-empty");
    }
    for (uint32_t addr : config.remote_pool) {
        if (addr == config.local_host) {
            throw Error("remote pool must not contain the local host address");
        }
    }
}

struct SynthPacket {
    uint64_t t_us = 0;
    uint8_t protocol = 6;
    uint32_t src_ip = 0;
    uint16_t src_port = 0;
    uint32_t dst_ip = 0;
    uint16_t dst_port = 0;
    uint32_t frame_len = 0;
};

void put_u16be(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_u32be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_u32le(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

void append_frame(std::vector<uint8_t>& out, const SynthPacket& pkt) {
    // pcap record header (little endian, microsecond resolution).
    const uint64_t seconds = kEpochBaseSeconds + pkt.t_us / 1000000;
    const uint32_t micros = static_cast<uint32_t>(pkt.t_us % 1000000);
    put_u32le(out, static_cast<uint32_t>(seconds));
    put_u32le(out, micros);
    put_u32le(out, pkt.frame_len);
    put_u32le(out, pkt.frame_len);

    // Ethernet, zeroed MACs.
    out.insert(out.end(), 12, 0);
    put_u16be(out, 0x0800);

    // IPv4, no options, zero checksum (the decoder does not verify it).
    const uint16_t ip_total = static_cast<uint16_t>(pkt.frame_len - 14);
    out.push_back(0x45);
    out.push_back(0x00);
    put_u16be(out, ip_total);
    put_u16be(out, 0);       // identification
    put_u16be(out, 0);       // flags + fragment offset
    out.push_back(64);       // ttl
    out.push_back(pkt.protocol);
    put_u16be(out, 0);       // header checksum
    put_u32be(out, pkt.src_ip);
    put_u32be(out, pkt.dst_ip);

    size_t payload;
    if (pkt.protocol == 6) {
        put_u16be(out, pkt.src_port);
        put_u16be(out, pkt.dst_port);
        put_u32be(out, 0);   // sequence
        put_u32be(out, 0);   // ack
        out.push_back(0x50); // data offset
        out.push_back(0x10); // ACK
        put_u16be(out, 0x2000);  // window
        put_u16be(out, 0);   // checksum
        put_u16be(out, 0);   // urgent pointer
        payload = pkt.frame_len - 14 - 20 - 20;
    } else {
        put_u16be(out, pkt.src_port);
        put_u16be(out, pkt.dst_port);
        put_u16be(out, static_cast<uint16_t>(pkt.frame_len - 14 - 20));
        put_u16be(out, 0);   // checksum
        payload = pkt.frame_len - 14 - 20 - 8;
    }
    out.insert(out.end(), payload, 0);
}

double record_time_seconds(uint64_t t_us) {
    const uint64_t seconds = kEpochBaseSeconds + t_us / 1000000;
    const uint32_t micros = static_cast<uint32_t>(t_us % 1000000);
    // Must match the decoder's timestamp arithmetic bit for bit.
    return static_cast<double>(static_cast<uint32_t>(seconds)) +
           static_cast<double>(micros) * 1e-6;
}

}  // namespace

ScenarioConfig ScenarioConfig::goodware_profile(uint64_t seed) {
    ScenarioConfig c;
    c.label = Label::Goodware;
    c.conversations = {8, 20};
    c.packets_per_conversation = {4, 60};
    c.payload_bytes = {100, 1400};
    c.gap_micros = {500, 300000};
    c.tcp_fraction = 0.8;
    c.reply_probability = 0.55;
    c.mirror_port_fraction = 0.2;
    c.remote_pool = address_block("93.184.216.10", 24);
    auto extra = address_block("142.250.64.70", 16);
    c.remote_pool.insert(c.remote_pool.end(), extra.begin(), extra.end());
    c.remote_ports = {80, 443, 443, 8080, 123, 137, 53};
    c.seed = seed;
    return c;
}

ScenarioConfig ScenarioConfig::malware_profile(uint64_t seed) {
    ScenarioConfig c;
    c.label = Label::Malware;
    c.conversations = {20, 40};
    c.packets_per_conversation = {1, 6};
    c.payload_bytes = {20, 160};
    c.gap_micros = {200000, 2000000};
    c.tcp_fraction = 0.5;
    c.reply_probability = 0.35;
    c.mirror_port_fraction = 0.0;
    c.remote_pool = address_block("91.121.216.90", 32);
    auto extra = address_block("185.100.84.10", 16);
    c.remote_pool.insert(c.remote_pool.end(), extra.begin(), extra.end());
    c.remote_ports = {4444, 6892, 8118, 9001};
    c.seed = seed;
    return c;
}

ScenarioConfig ScenarioConfig::goodware_overlapping(uint64_t seed) {
    ScenarioConfig c = goodware_profile(seed);
    c.mirror_port_fraction = 0.0;
    c.remote_ports = {80, 443};
    c.remote_pool = address_block("198.51.100.1", 32);
    c.packets_per_conversation = {2, 20};
    c.payload_bytes = {40, 600};
    c.conversations = {10, 24};
    return c;
}

ScenarioConfig ScenarioConfig::malware_overlapping(uint64_t seed) {
    ScenarioConfig c = goodware_overlapping(seed);
    c.label = Label::Malware;
    return c;
}

GeneratedCapture generate_capture(const ScenarioConfig& config, const std::string& capture_id) {
    validate(config);
    Engine rng(config.seed);

    struct ConvState {
        Conversation conv;
        uint64_t first_us = 0;
        uint64_t last_us = 0;
    };
    std::vector<ConvState> states;
    std::vector<SynthPacket> packets;
    std::set<ConversationKey> used_keys;

    const uint64_t conv_count = rng.range(config.conversations.lo, config.conversations.hi);
    for (uint64_t ci = 0; ci < conv_count; ++ci) {
        const uint8_t protocol = rng.chance(config.tcp_fraction) ? 6 : 17;

        // Draw an unused 5-tuple; after a few collisions walk the ephemeral
        // port space linearly.
        uint32_t remote_ip = 0;
        uint16_t remote_port = 0;
        uint16_t local_port = 0;
        ConversationKey key;
        bool unique = false;
        for (int attempt = 0; attempt < 64 && !unique; ++attempt) {
            remote_ip = rng.pick(config.remote_pool);
            remote_port = rng.pick(config.remote_ports);
            local_port = rng.chance(config.mirror_port_fraction)
                             ? remote_port
                             : static_cast<uint16_t>(49152 + rng.below(16384));
            key = ConversationKey::canonical(protocol, {config.local_host, local_port},
                                             {remote_ip, remote_port});
            unique = used_keys.insert(key).second;
        }
        for (uint32_t offset = 0; offset < 16384 && !unique; ++offset) {
            local_port = static_cast<uint16_t>(49152 + offset);
            key = ConversationKey::canonical(protocol, {config.local_host, local_port},
                                             {remote_ip, remote_port});
            unique = used_keys.insert(key).second;
        }
        if (!unique) {
            throw Error("could not find an unused 5-tuple for the capture");
        }

        ConvState state;
        state.conv.protocol = protocol;
        state.conv.address_a = config.local_host;
        state.conv.port_a = local_port;
        state.conv.address_b = remote_ip;
        state.conv.port_b = remote_port;
        state.conv.source_capture = capture_id;

        const uint64_t pkts = rng.range(config.packets_per_conversation.lo,
                                        config.packets_per_conversation.hi);
        uint64_t t_us = rng.range(config.start_offset_micros.lo, config.start_offset_micros.hi);
        state.first_us = t_us;
        for (uint64_t p = 0; p < pkts; ++p) {
            // The first packet always flows A->B so the local host initiates.
            const bool b_to_a = p > 0 && rng.chance(config.reply_probability);
            const uint64_t payload = rng.range(config.payload_bytes.lo, config.payload_bytes.hi);
            SynthPacket pkt;
            pkt.t_us = t_us;
            pkt.protocol = protocol;
            pkt.frame_len =
                static_cast<uint32_t>(14 + 20 + (protocol == 6 ? 20 : 8) + payload);
            if (b_to_a) {
                pkt.src_ip = remote_ip;
                pkt.src_port = remote_port;
                pkt.dst_ip = config.local_host;
                pkt.dst_port = local_port;
                state.conv.packets_ba += 1;
                state.conv.bytes_ba += pkt.frame_len;
            } else {
                pkt.src_ip = config.local_host;
                pkt.src_port = local_port;
                pkt.dst_ip = remote_ip;
                pkt.dst_port = remote_port;
                state.conv.packets_ab += 1;
                state.conv.bytes_ab += pkt.frame_len;
            }
            packets.push_back(pkt);
            state.last_us = t_us;
            t_us += rng.range(config.gap_micros.lo, config.gap_micros.hi);
        }
        states.push_back(std::move(state));
    }

    std::stable_sort(packets.begin(), packets.end(),
                     [](const SynthPacket& a, const SynthPacket& b) { return a.t_us < b.t_us; });

    GeneratedCapture out;
    out.label = config.label;

    // Classic pcap global header: little endian, microseconds, Ethernet.
    put_u32le(out.pcap, 0xa1b2c3d4);
    out.pcap.push_back(2);
    out.pcap.push_back(0);
    out.pcap.push_back(4);
    out.pcap.push_back(0);
    put_u32le(out.pcap, 0);      // thiszone
    put_u32le(out.pcap, 0);      // sigfigs
    put_u32le(out.pcap, 65535);  // snaplen
    put_u32le(out.pcap, 1);      // link type
    for (const SynthPacket& pkt : packets) {
        append_frame(out.pcap, pkt);
    }

    const uint64_t capture_first_us = packets.empty() ? 0 : packets.front().t_us;
    const double capture_start = record_time_seconds(capture_first_us);
    for (ConvState& state : states) {
        state.conv.packets = state.conv.packets_ab + state.conv.packets_ba;
        state.conv.bytes = state.conv.bytes_ab + state.conv.bytes_ba;
        state.conv.rel_start = record_time_seconds(state.first_us) - capture_start;
        state.conv.duration =
            record_time_seconds(state.last_us) - record_time_seconds(state.first_us);
        out.ground_truth.push_back(std::move(state.conv));
    }
    std::sort(out.ground_truth.begin(), out.ground_truth.end(),
              [](const Conversation& a, const Conversation& b) {
                  if (a.rel_start != b.rel_start) return a.rel_start < b.rel_start;
                  return a.key() < b.key();
              });
    return out;
}

namespace {

std::string synthetic_hash(uint64_t corpus_seed, const std::string& tag) {
    const uint64_t h1 = derive_seed(corpus_seed, tag + "/hash-hi");
    const uint64_t h2 = derive_seed(corpus_seed, tag + "/hash-lo");
    char buf[36];
    std::snprintf(buf, sizeof(buf), "%016llx%016llx", static_cast<unsigned long long>(h1),
                  static_cast<unsigned long long>(h2));
    return buf;
}

}  // namespace

Corpus generate_corpus(const ScenarioConfig& goodware, const ScenarioConfig& malware,
                       size_t captures_per_class, uint64_t seed, const std::string& out_dir) {
    if (captures_per_class < 1) {
        throw Error("corpus needs at least one capture per class");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create corpus directory: " + out_dir + ": " + ec.message());
    }

    Corpus corpus;
    corpus.directory = out_dir;
    corpus.manifest_path = (std::filesystem::path(out_dir) / "manifest.csv").string();

    auto emit = [&](const ScenarioConfig& base, size_t index) {
        const std::string tag =
            std::string(to_string(base.label)) + "-" + std::to_string(index);
        ScenarioConfig config = base;
        config.seed = derive_seed(seed, tag);
        const std::string name = synthetic_hash(seed, tag) + ".pcap";
        const GeneratedCapture capture = generate_capture(config, name);

        const auto path = std::filesystem::path(out_dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw IoError("cannot write capture: " + path.string());
        }
        out.write(reinterpret_cast<const char*>(capture.pcap.data()),
                  static_cast<std::streamsize>(capture.pcap.size()));
        corpus.entries.push_back({name, base.label});
    };

    for (size_t i = 0; i < captures_per_class; ++i) emit(goodware, i);
    for (size_t i = 0; i < captures_per_class; ++i) emit(malware, i);

    std::ofstream manifest(corpus.manifest_path, std::ios::binary);
    if (!manifest) {
        throw IoError("cannot write manifest: " + corpus.manifest_path);
    }
    manifest << "file,label\n";
    for (const CorpusEntry& entry : corpus.entries) {
        manifest << entry.file << ',' << to_string(entry.label) << "\n";
    }
    return corpus;
}

std::map<std::string, Label> read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read manifest: " + path);
    }
    std::map<std::string, Label> out;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = detail::trim(raw);
        if (line.empty()) continue;
        if (line_no == 1 && line == "file,label") continue;
        const size_t comma = line.rfind(',');
        if (comma == std::string_view::npos) {
            throw ParseError("manifest rows must be 'file,label'", line_no);
        }
        const std::string_view file = detail::trim(line.substr(0, comma));
        const std::string_view label = detail::trim(line.substr(comma + 1));
        if (file.empty()) {
            throw ParseError("manifest row has an empty file name", line_no);
        }
        out[std::string(file)] = label_from_string(label);
    }
    return out;
}

}  // namespace convml
