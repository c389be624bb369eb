#include <doctest.h>

#include <cmath>
#include <fstream>

#include "grar/error.hpp"
#include "grar/manifest.hpp"
#include "grar/report.hpp"
#include "grar/synth.hpp"
#include "grar/track_io.hpp"
#include "support.hpp"

using namespace grar;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string track_line(const std::string& id, long frame, const std::string& crop, double x0,
                       double y0, double x1, double y1, double conf = 1.0) {
    std::string s = id + " " + std::to_string(frame) + " " + format_number(x0) + " " +
                    format_number(y0) + " " + format_number(x1) + " " + format_number(y1) + " " +
                    crop;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        s += " " + format_number(x0 + 1) + " " + format_number(y0 + 1) + " " + format_number(conf);
    }
    return s + "\n";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("format_number round-trips") {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.normal(0.0, 1e3) * std::pow(10.0, rng.uniform(-8, 8));
        CHECK(std::stod(format_number(v)) == v);
    }
}

TEST_CASE("png round trip") {
    const auto dir = grar::test::scratch_dir("png");
    RgbImage img(7, 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 7; ++x) img.set(x, y, {static_cast<std::uint8_t>(x * 30), static_cast<std::uint8_t>(y * 50), 3});
    write_png(dir / "a.png", img);
    CHECK(read_png(dir / "a.png") == img);
    CHECK_THROWS_AS(read_png(dir / "none.png"), IoError);
    write_text(dir / "junk.png", "not a png");
    CHECK_THROWS_AS(read_png(dir / "junk.png"), IoError);
}

TEST_CASE("track file: small fixtures") {
    const auto dir = grar::test::scratch_dir("tracks");
    write_png(dir / "c.png", RgbImage(20, 30));
    write_text(dir / "one.txt", "# comment\n" + track_line("p", 0, "c.png", 0, 0, 20, 30) +
                                    track_line("p", 1, "c.png", 5, 5, 25, 35) + "\n" +
                                    track_line("p", 2, "c.png", 1, 0, 21, 30));
    const auto tracks = load_tracks(dir / "one.txt");
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].poses.size() == 3);
    CHECK(tracks[0].crops.frames.size() == 3);
    CHECK(tracks[0].poses.frames[1].box.x_min == 5.0);

    write_text(dir / "empty.txt", "");
    CHECK(load_tracks(dir / "empty.txt").empty());

    write_text(dir / "wrong_size.txt", track_line("p", 0, "c.png", 0, 0, 21, 30));
    CHECK_THROWS_AS(load_tracks(dir / "wrong_size.txt"), DimensionError);
    CHECK(load_sequences(dir / "wrong_size.txt").size() == 1);

    std::string short_line = track_line("p", 0, "c.png", 0, 0, 20, 30);
    short_line.erase(short_line.rfind(' '));
    write_text(dir / "short.txt", short_line + "\n");
    CHECK_THROWS_AS(load_tracks(dir / "short.txt"), ParseError);

    write_text(dir / "missing.txt", track_line("p", 0, "nope.png", 0, 0, 20, 30));
    CHECK_THROWS_AS(load_tracks(dir / "missing.txt"), IoError);
    CHECK_THROWS_AS(load_tracks(dir / "absent.txt"), IoError);
}

TEST_CASE("track file round trip of a generated corpus") {
    CorpusSpec spec;
    spec.per_class = 2;
    spec.frames = 12;
    spec.corruption.outlier_rate = 0.2;
    spec.corruption.occlusion_rate = 0.2;
    const auto corpus = make_corpus(spec);
    std::vector<Track> tracks;
    for (const auto& t : corpus) tracks.push_back(t.track);
    const auto dir = grar::test::scratch_dir("roundtrip");
    write_tracks(dir / "tracks.txt", tracks);
    const auto back = load_tracks(dir / "tracks.txt");
    REQUIRE(back.size() == tracks.size());
    for (std::size_t t = 0; t < tracks.size(); ++t) {
        CHECK(back[t].poses.person_id == tracks[t].poses.person_id);
        REQUIRE(back[t].poses.size() == tracks[t].poses.size());
        for (std::size_t f = 0; f < tracks[t].poses.size(); ++f) {
            const auto& a = tracks[t].poses.frames[f];
            const auto& b = back[t].poses.frames[f];
            CHECK(a.frame_index == b.frame_index);
            CHECK(a.box == b.box);
            for (std::size_t j = 0; j < kNumJoints; ++j) {
                CHECK(std::abs(a.pose[j].x - b.pose[j].x) <= 1e-6);
                CHECK(std::abs(a.pose[j].y - b.pose[j].y) <= 1e-6);
                CHECK(std::abs(a.pose[j].confidence - b.pose[j].confidence) <= 1e-6);
            }
            CHECK(back[t].crops.frames[f].image == tracks[t].crops.frames[f].image);
        }
    }
}

TEST_CASE("sequence warnings") {
    PoseSequence seq;
    seq.person_id = "w";
    Pose good;
    for (auto& j : good.joints) j = {1.0, 1.0, 1.0};
    for (long f = 0; f < 4; ++f) seq.frames.push_back({f, good, BoundingBox{0, 0, 5, 5}});
    CHECK(validate_sequence(seq).empty());
    seq.frames[2].pose = Pose{};
    auto w = validate_sequence(seq);
    REQUIRE(w.size() == 1);
    CHECK(w[0].kind == SequenceWarning::Kind::low_confidence);
    CHECK(w[0].frame_index == 2);
    seq.frames[2].pose = good;
    seq.frames[3].frame_index = 2;
    w = validate_sequence(seq);
    REQUIRE(w.size() == 1);
    CHECK(w[0].kind == SequenceWarning::Kind::non_monotone);
    CHECK(w[0].position == 3);
}

TEST_CASE("manifest round trip and placeholders") {
    DatasetManifest m;
    m.entries.push_back({"grids/a.png", "a", "walk", Split::train, 3, {4, 10, 22}});
    m.entries.push_back({"", "b", "run", Split::test, 0, {}});
    const auto dir = grar::test::scratch_dir("manifest");
    write_manifest(dir / "m.txt", m);
    CHECK(read_manifest(dir / "m.txt") == m);
    CHECK(m.classes() == std::vector<std::string>{"run", "walk"});
    CHECK(m.select(Split::test).size() == 1);
    CHECK(m.find("b")->label == "run");
    CHECK(m.find("zz") == nullptr);

    std::ifstream in(dir / "m.txt");
    std::string first, second;
    std::getline(in, first);
    while (first.starts_with("#")) std::getline(in, first);
    std::getline(in, second);
    CHECK(first == "grids/a.png a walk train 3 4,10,22");
    CHECK(second == "- b run test 0 -");
}

TEST_CASE("manifest errors") {
    const auto dir = grar::test::scratch_dir("manifest_bad");
    auto bad = [&](const std::string& text) {
        write_text(dir / "m.txt", text);
        return dir / "m.txt";
    };
    CHECK_THROWS_AS(read_manifest(bad("g.png a walk train 1\n")), ParseError);
    CHECK_THROWS_AS(read_manifest(bad("g.png a walk dev 1 3\n")), ParseError);
    CHECK_THROWS_AS(read_manifest(bad("g.png a walk train 2 3\n")), SchemaError);
    CHECK_THROWS_AS(read_manifest(bad("- a walk train 1 3\n")), SchemaError);
    CHECK_THROWS_AS(read_manifest(bad("g.png a walk train 1 3\nh.png a run test 1 4\n")),
                    SchemaError);
    CHECK_THROWS_AS(read_manifest(dir / "absent.txt"), IoError);
    CHECK_THROWS_AS(parse_split("val"), ConfigError);
}

TEST_CASE("report round trip and schema checks") {
    auto r = EvalReport::empty({"a", "b", "c"});
    r.add("a", "a");
    r.add("a", "b");
    r.add("b", "b");
    r.add("c", "c");
    r.add("c", "c");
    CHECK(r.samples() == 5);
    CHECK(r.accuracy() == doctest::Approx(0.8));
    CHECK(r.class_accuracy(0) == 0.5);
    CHECK(r.class_samples(2) == 2);
    CHECK_THROWS(r.add("z", "a"));
    const auto dir = grar::test::scratch_dir("report");
    write_report(dir / "r.txt", r);
    const auto back = read_report(dir / "r.txt");
    CHECK(back.labels == r.labels);
    CHECK(back.confusion == r.confusion);

    std::ifstream in(dir / "r.txt");
    std::string text((std::istreambuf_iterator<char>(in)), {});
    const auto pos = text.find("samples 5");
    REQUIRE(pos != std::string::npos);
    write_text(dir / "bad.txt", text.replace(pos, 9, "samples 6"));
    CHECK_THROWS(read_report(dir / "bad.txt"));
}

}
