#include <doctest.h>

#include <filesystem>

#include "convml/decision_tree.hpp"
#include "convml/evaluation.hpp"
#include "convml/pipeline.hpp"
#include "convml/rng.hpp"
#include "convml/synth.hpp"
#include "support/oracles.hpp"

using convml::Conversation;
using convml::GeneratedCapture;
using convml::Label;
using convml::ScenarioConfig;

namespace {

std::vector<Conversation> decode_and_aggregate(const GeneratedCapture& capture,
                                               const std::string& id) {
    const auto path = oracle::write_temp("synth/" + id + ".pcap", capture.pcap);
    convml::CaptureReader reader(path);
    convml::ConversationTable table(id);
    std::vector<convml::PacketRecord> packets = reader.read_all();
    CHECK(reader.truncated() == false);
    for (const auto& p : packets) table.accumulate(p);
    return packets.empty() ? table.finalize(0.0) : table.finalize(packets.front().timestamp);
}

}  // namespace

TEST_CASE("the requested conversation count is exactly honored") {
    ScenarioConfig config = ScenarioConfig::goodware_profile(5);
    config.conversations = {13, 13};
    const auto capture = convml::generate_capture(config, "x");
    CHECK(capture.ground_truth.size() == 13);
    CHECK(capture.label == Label::Goodware);
    for (const auto& c : capture.ground_truth) {
        CHECK(c.source_capture == "x");
        CHECK(c.packets >= 1);
        CHECK(c.packets == c.packets_ab + c.packets_ba);
        CHECK(c.bytes == c.bytes_ab + c.bytes_ba);
        CHECK(c.rel_start >= 0.0);
        CHECK(c.duration >= 0.0);
        CHECK(c.address_a == config.local_host);  // the local host initiates
    }
}

TEST_CASE("the same config produces byte-identical captures") {
    const ScenarioConfig config = ScenarioConfig::malware_profile(99);
    const auto a = convml::generate_capture(config, "same");
    const auto b = convml::generate_capture(config, "same");
    CHECK(a.pcap == b.pcap);
    CHECK(a.ground_truth == b.ground_truth);

    ScenarioConfig other = config;
    other.seed = 100;
    CHECK(convml::generate_capture(other, "same").pcap != a.pcap);
}

TEST_CASE("decoding a generated capture reproduces the ground truth exactly") {
    for (uint64_t seed = 1; seed <= 12; ++seed) {
        const ScenarioConfig config = seed % 2 ? ScenarioConfig::goodware_profile(seed)
                                               : ScenarioConfig::malware_profile(seed);
        const std::string id = "rt" + std::to_string(seed);
        const auto capture = convml::generate_capture(config, id);
        CHECK(decode_and_aggregate(capture, id) == capture.ground_truth);
    }
}

TEST_CASE("generated timestamps never decrease within a file") {
    const auto capture =
        convml::generate_capture(ScenarioConfig::goodware_profile(31), "mono");
    const auto path = oracle::write_temp("synth/mono.pcap", capture.pcap);
    convml::CaptureReader reader(path);
    double last = -1.0;
    for (const auto& p : reader.read_all()) {
        CHECK(p.timestamp >= last);
        last = p.timestamp;
    }
}

TEST_CASE("overlapping profiles share pools while separable ones do not") {
    const auto g = ScenarioConfig::goodware_profile(1);
    const auto m = ScenarioConfig::malware_profile(1);
    for (uint16_t port : m.remote_ports) {
        CHECK(std::find(g.remote_ports.begin(), g.remote_ports.end(), port) ==
              g.remote_ports.end());
    }
    const auto og = ScenarioConfig::goodware_overlapping(1);
    const auto om = ScenarioConfig::malware_overlapping(1);
    CHECK(og.remote_ports == om.remote_ports);
    CHECK(og.remote_pool == om.remote_pool);
    CHECK(om.label == Label::Malware);
}

TEST_CASE("overlapping profiles defeat the separation a separable corpus allows") {
    // Identical pools and shapes for both classes leave nothing to learn;
    // the tree's holdout advantage collapses compared to the separable case.
    auto corpus_metrics = [](const ScenarioConfig& good, const ScenarioConfig& bad,
                             const std::string& name) {
        std::vector<convml::CleanRow> rows;
        std::map<std::string, Label> labels;
        for (int i = 0; i < 10; ++i) {
            for (const ScenarioConfig* base : {&good, &bad}) {
                ScenarioConfig config = *base;
                const std::string id =
                    name + "-" + to_string(base->label) + std::to_string(i);
                config.seed = convml::derive_seed(1234, id);
                const auto capture = convml::generate_capture(config, id);
                labels[id] = base->label;
                const auto path = oracle::write_temp("synth/" + id + ".pcap", capture.pcap);
                const auto cleaned = convml::clean(convml::extract_conversations(path, id));
                rows.insert(rows.end(), cleaned.begin(), cleaned.end());
            }
        }
        const auto split = convml::grouped_split(convml::make_dataset(rows, labels), 0.6, 5);
        const auto tree = convml::train_decision_tree(split.train);
        const auto metrics = convml::evaluate_holdout(*tree, split.test);
        return std::pair{metrics.tpr.value_or(0.0), metrics.fpr.value_or(1.0)};
    };

    const auto [sep_tpr, sep_fpr] = corpus_metrics(ScenarioConfig::goodware_profile(0),
                                                   ScenarioConfig::malware_profile(0), "sep");
    CHECK(sep_tpr - sep_fpr > 0.9);

    const auto [ovl_tpr, ovl_fpr] =
        corpus_metrics(ScenarioConfig::goodware_overlapping(0),
                       ScenarioConfig::malware_overlapping(0), "ovl");
    CHECK(ovl_tpr - ovl_fpr < 0.5);
}

TEST_CASE("invalid configs are rejected") {
    ScenarioConfig config = ScenarioConfig::goodware_profile(1);
    config.remote_pool.clear();
    CHECK_THROWS_AS(convml::generate_capture(config), convml::Error);

    config = ScenarioConfig::goodware_profile(1);
    config.packets_per_conversation = {0, 0};
    CHECK_THROWS_AS(convml::generate_capture(config), convml::Error);

    config = ScenarioConfig::goodware_profile(1);
    config.conversations = {5, 2};
    CHECK_THROWS_AS(convml::generate_capture(config), convml::Error);

    config = ScenarioConfig::goodware_profile(1);
    config.remote_pool.push_back(config.local_host);
    CHECK_THROWS_AS(convml::generate_capture(config), convml::Error);
}

TEST_CASE("a corpus writes one pcap per sample plus a label manifest") {
    const auto dir = std::filesystem::path(oracle::temp_dir()) / "corpus22";
    const auto corpus =
        convml::generate_corpus(ScenarioConfig::goodware_profile(0),
                                ScenarioConfig::malware_profile(0), 2, 77, dir.string());
    CHECK(corpus.entries.size() == 4);
    size_t goodware = 0, malware = 0;
    for (const auto& entry : corpus.entries) {
        CHECK(std::filesystem::exists(dir / entry.file));
        CHECK(entry.file.size() == 32 + 5);  // 128-bit hex name + ".pcap"
        (entry.label == Label::Goodware ? goodware : malware) += 1;
    }
    CHECK(goodware == 2);
    CHECK(malware == 2);

    const auto manifest = convml::read_manifest(corpus.manifest_path);
    CHECK(manifest.size() == 4);
    for (const auto& entry : corpus.entries) {
        CHECK(manifest.at(entry.file) == entry.label);
    }
}

TEST_CASE("malformed manifests are rejected with the offending line") {
    const auto path = oracle::write_temp("synth/bad_manifest.csv",
                                         {'f', 'i', 'l', 'e', '\n'});
    CHECK_THROWS_AS(convml::read_manifest(path), convml::ParseError);
}
