#pragma once

// Independent reference implementations and fixture builders used by the
// unit and acceptance suites. Everything here is deliberately written from
// first principles, separate from the library code paths it checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "convml/conversation.hpp"
#include "convml/dataset.hpp"
#include "convml/pcap.hpp"

namespace oracle {

/// Brute-force single-pass aggregation: group packets by the normalized
/// 5-tuple, sum fields directly, order by (rel_start, canonical tuple).
std::vector<convml::Conversation> aggregate_reference(
    const std::vector<convml::PacketRecord>& packets, const std::string& capture_id);

/// Direct evaluation of the standard confusion-matrix formulas.
struct MetricValues {
    std::optional<double> tpr, fpr, precision, recall, f_measure;
};
MetricValues metrics_reference(uint64_t tp, uint64_t fp, uint64_t tn, uint64_t fn);

/// Positional dotted-quad value: a*2^24 + b*2^16 + c*2^8 + d.
uint64_t ip_reference(uint64_t a, uint64_t b, uint64_t c, uint64_t d);

/// Shannon entropy straight from the definition.
double entropy_reference(const std::vector<uint64_t>& counts);

// ---- pcap fixture building ----

struct FrameOptions {
    uint8_t protocol = 6;
    uint32_t src_ip = 0x0a00020f;
    uint16_t src_port = 49152;
    uint32_t dst_ip = 0x5db8d822;
    uint16_t dst_port = 80;
    size_t payload = 10;
    bool vlan = false;
    uint16_t ethertype = 0x0800;
    uint8_t ip_version = 4;
    uint16_t fragment_field = 0;  // raw flags+offset field
};

std::vector<uint8_t> make_frame(const FrameOptions& options);

class PcapBuilder {
public:
    explicit PcapBuilder(bool nanosecond = false, bool big_endian = false,
                         uint32_t link_type = 1);

    /// Appends a record whose captured bytes are `frame`; orig_len defaults
    /// to the captured length.
    void add_record(uint32_t ts_sec, uint32_t ts_frac, const std::vector<uint8_t>& frame,
                    std::optional<uint32_t> orig_len = std::nullopt,
                    std::optional<uint32_t> incl_len = std::nullopt);

    /// Appends raw bytes verbatim (for truncation and corruption fixtures).
    void add_raw(const std::vector<uint8_t>& bytes);

    const std::vector<uint8_t>& bytes() const { return data_; }

private:
    bool big_endian_;
    std::vector<uint8_t> data_;
};

// ---- dataset fixtures ----

/// Ad-hoc dataset with attribute names x0, x1, ... (Custom schema).
convml::Dataset custom_dataset(
    const std::vector<std::pair<convml::Label, std::vector<double>>>& rows);

/// Conflict-free random dataset: attribute 0 takes all-distinct values, so a
/// fully grown tree can always separate it.
convml::Dataset conflict_free_random(uint64_t seed, size_t count, size_t attributes);

/// Unique writable scratch directory for this test process.
std::string temp_dir();

/// Write bytes under temp_dir()/name and return the full path.
std::string write_temp(const std::string& name, const std::vector<uint8_t>& bytes);

std::vector<uint8_t> read_file(const std::string& path);

}  // namespace oracle
