#include <doctest.h>

#include <random>
#include <sstream>

#include "convml/dataset_io.hpp"

using convml::Dataset;
using convml::Instance;
using convml::Label;

namespace {

Dataset table4_row1() {
    Instance inst;
    inst.label = Label::Goodware;
    inst.values = {6, 3232236160.0, 55559, 1177009456.0, 80, 7, 854, 12, 1737};
    inst.group = "sample0";
    return Dataset(Dataset::full_feature_names(), {inst});
}

Dataset random_dataset(uint64_t seed, bool with_groups) {
    std::mt19937_64 rng(seed);
    std::vector<Instance> rows;
    const size_t n = 5 + rng() % 40;
    for (size_t i = 0; i < n; ++i) {
        Instance inst;
        inst.label = rng() % 2 ? Label::Malware : Label::Goodware;
        for (int a = 0; a < 9; ++a) {
            // Mix integral and fractional values to exercise formatting.
            const double v = double(rng() % 100000);
            inst.values.push_back(rng() % 3 == 0 ? v / 128.0 : v);
        }
        if (with_groups) inst.group = "grp" + std::to_string(rng() % 4);
        rows.push_back(std::move(inst));
    }
    return Dataset(Dataset::full_feature_names(), std::move(rows));
}

std::string arff_string(const Dataset& ds) {
    std::ostringstream out;
    convml::export_arff(ds, out);
    return std::move(out).str();
}

Dataset arff_parse(const std::string& text) {
    std::istringstream in(text);
    return convml::import_arff(in);
}

}  // namespace

TEST_CASE("the class attribute and a known row serialize exactly") {
    const std::string text = arff_string(table4_row1());
    CHECK(text.find("@ATTRIBUTE Label {Goodware,Malware}") != std::string::npos);
    CHECK(text.find("\nGoodware,6,3232236160,55559,1177009456,80,7,854,12,1737\n") !=
          std::string::npos);
}

TEST_CASE("ARFF export is byte-stable and round-trips exactly") {
    for (uint64_t seed : {1, 2, 3, 4, 5}) {
        const Dataset ds = random_dataset(seed, seed % 2 == 0);
        const std::string once = arff_string(ds);
        CHECK(once == arff_string(ds));
        const Dataset back = arff_parse(once);
        CHECK(back == ds);
        for (size_t i = 0; i < ds.size(); ++i) {
            CHECK(back.instances()[i].group == ds.instances()[i].group);
        }
    }
}

TEST_CASE("an empty dataset exports a header-only CSV that reads back empty") {
    const Dataset empty(Dataset::full_feature_names(), {});
    std::ostringstream out;
    convml::export_csv(empty, out);
    const std::string text = std::move(out).str();
    CHECK(text ==
          "Label,Protocol,Address_A,Port_A,Address_B,Port_B,Packets_A_B,Bytes_A_B,"
          "Packets_B_A,Bytes_B_A,Group\n");
    std::istringstream in(text);
    CHECK(convml::import_csv(in).empty());
}

TEST_CASE("CSV round-trips exactly, including groups") {
    for (uint64_t seed : {7, 8, 9}) {
        const Dataset ds = random_dataset(seed, true);
        std::ostringstream out;
        convml::export_csv(ds, out);
        const std::string text = std::move(out).str();
        CHECK(text.rfind("Label,Protocol,", 0) == 0);
        CHECK(text.find(",Group\n") != std::string::npos);
        std::istringstream in(text);
        const Dataset back = convml::import_csv(in);
        CHECK(back == ds);
        for (size_t i = 0; i < ds.size(); ++i) {
            CHECK(back.instances()[i].group == ds.instances()[i].group);
        }
    }
}

TEST_CASE("ARFF keywords parse case-insensitively and comments are skipped") {
    const Dataset ds = arff_parse(
        "% leading comment\n"
        "@relation anything\n"
        "@attribute Label {Goodware,Malware}\n"
        "@Attribute X real\n"
        "@ATTRIBUTE Y NUMERIC\n"
        "@data\n"
        "% group=alpha\n"
        "Goodware,1.5,2\n"
        "Malware,3,0.25\n");
    CHECK(ds.size() == 2);
    CHECK(ds.feature_names() == std::vector<std::string>{"X", "Y"});
    CHECK(ds.instances()[0].group == "alpha");
    CHECK(ds.instances()[0].values == std::vector<double>{1.5, 2});
    CHECK(ds.instances()[1].label == Label::Malware);
}

TEST_CASE("the class attribute may sit anywhere in the declaration order") {
    const Dataset ds = arff_parse(
        "@relation r\n"
        "@attribute A real\n"
        "@attribute B real\n"
        "@attribute Label {Goodware,Malware}\n"
        "@data\n"
        "1,2,Malware\n");
    CHECK(ds.feature_names() == std::vector<std::string>{"A", "B"});
    CHECK(ds.instances()[0].label == Label::Malware);
    CHECK(ds.instances()[0].values == std::vector<double>{1, 2});
}

TEST_CASE("ARFF parse failures carry line numbers") {
    SUBCASE("unknown attribute type") {
        try {
            arff_parse("@relation r\n@attribute Label {Goodware,Malware}\n@attribute X string\n");
            FAIL("expected ParseError");
        } catch (const convml::ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("arity mismatch") {
        try {
            arff_parse(
                "@relation r\n@attribute Label {Goodware,Malware}\n@attribute X real\n"
                "@data\nGoodware,1,2\n");
            FAIL("expected ParseError");
        } catch (const convml::ParseError& e) {
            CHECK(e.line() == 5);
        }
    }
    SUBCASE("undeclared nominal value") {
        try {
            arff_parse(
                "@relation r\n@attribute Label {Goodware,Malware}\n@attribute X real\n"
                "@data\nMidware,1\n");
            FAIL("expected ParseError");
        } catch (const convml::ParseError& e) {
            CHECK(e.line() == 5);
        }
    }
    SUBCASE("numeric garbage") {
        CHECK_THROWS_AS(arff_parse("@relation r\n@attribute Label {Goodware,Malware}\n"
                                   "@attribute X real\n@data\nGoodware,abc\n"),
                        convml::ParseError);
    }
    SUBCASE("missing data section") {
        CHECK_THROWS_AS(arff_parse("@relation r\n@attribute Label {Goodware,Malware}\n"),
                        convml::ParseError);
    }
    SUBCASE("class attribute must be the two known values") {
        CHECK_THROWS_AS(arff_parse("@relation r\n@attribute Label {Yes,No}\n@data\nYes\n"),
                        convml::ParseError);
    }
}

TEST_CASE("random garbage never crashes the importers") {
    std::mt19937_64 rng(0xfeed);
    const std::string alphabet = "@{},%GoodwareMalware 0123456789.\nREAL";
    for (int round = 0; round < 300; ++round) {
        std::string noise;
        const size_t len = rng() % 400;
        for (size_t i = 0; i < len; ++i) noise += alphabet[rng() % alphabet.size()];
        try {
            arff_parse(noise);
        } catch (const convml::Error&) {
            // Malformed input must fail loudly, not crash or hang.
        }
        try {
            std::istringstream in(noise);
            convml::import_csv(in);
        } catch (const convml::Error&) {
        }
    }
}

TEST_CASE("extension-based dispatch rejects unknown suffixes") {
    const Dataset ds = table4_row1();
    CHECK_THROWS_AS(convml::export_dataset(ds, "/tmp/ds.parquet"), convml::Error);
    CHECK_THROWS_AS(convml::import_dataset("/tmp/ds.parquet"), convml::Error);
}
