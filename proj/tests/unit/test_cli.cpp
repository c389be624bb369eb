#include <doctest.h>

#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "grar/classifier.hpp"
#include "grar/cli.hpp"
#include "grar/manifest.hpp"
#include "grar/pipeline.hpp"
#include "grar/report.hpp"
#include "grar/track_io.hpp"
#include "support.hpp"

using namespace grar;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// Every regular file under `root`, relative path -> contents.
std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = bytes(e.path());
    return out;
}

const fs::path& small_corpus() {
    static const fs::path dir = [] {
        const auto d = grar::test::scratch_dir("cli_corpus");
        const auto r = cli({"synth", "--out", (d / "c").string(), "--per-class", "3", "--frames",
                            "30", "--classes", "walk,wave,idle", "--seed", "4", "--outlier-rate",
                            "0.1"});
        REQUIRE(r.code == 0);
        return d / "c";
    }();
    return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth and ingest") {
    const auto c = small_corpus();
    const auto m = read_manifest(c / "manifest.txt");
    CHECK(m.entries.size() == 9);
    CHECK(m.classes() == std::vector<std::string>{"idle", "walk", "wave"});
    const auto r = cli({"ingest", "--tracks", (c / "tracks.txt").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("tracks 9 frames 270") != std::string::npos);
}

TEST_CASE("staged commands equal the one-shot run, for any --jobs") {
    const auto c = small_corpus();
    const auto d = grar::test::scratch_dir("cli_staged");
    const std::string tracks = (c / "tracks.txt").string();
    const std::string manifest = (c / "manifest.txt").string();
    const auto staged = d / "staged";
    fs::create_directories(staged);
    REQUIRE(cli({"cluster", "--tracks", tracks, "--out", (staged / "keyposes.txt").string()}).code == 0);
    REQUIRE(cli({"grid", "--tracks", tracks, "--keyposes", (staged / "keyposes.txt").string(),
                 "--manifest", manifest, "--out-dir", staged.string()}).code == 0);
    REQUIRE(cli({"train", "--manifest", (staged / "manifest.txt").string(), "--out",
                 (staged / "model.txt").string()}).code == 0);
    REQUIRE(cli({"eval", "--manifest", (staged / "manifest.txt").string(), "--model",
                 (staged / "model.txt").string(), "--out", (staged / "report.txt").string()}).code == 0);

    const auto one = cli({"run", "--tracks", tracks, "--manifest", manifest, "--out-dir",
                          (d / "one").string()});
    REQUIRE(one.code == 0);
    const auto four = cli({"--jobs", "4", "run", "--tracks", tracks, "--manifest", manifest,
                           "--out-dir", (d / "four").string()});
    REQUIRE(four.code == 0);
    CHECK(one.out == four.out);
    const auto t = tree(staged);
    CHECK(t.size() == 4 + 9);
    CHECK(t == tree(d / "one"));
    CHECK(t == tree(d / "four"));

    // Idempotent: a second run rewrites the same bytes.
    REQUIRE(cli({"run", "--tracks", tracks, "--manifest", manifest, "--out-dir",
                 (d / "one").string()}).code == 0);
    CHECK(t == tree(d / "one"));

    const auto m = read_manifest(staged / "manifest.txt");
    for (const auto& e : m.entries) {
        CHECK(e.grid_relpath == "grids/" + e.person_id + ".png");
        CHECK(e.k == 4);
    }
    const auto report = read_report(staged / "report.txt");
    CHECK(report.samples() == m.select(Split::test).size());
}

TEST_CASE("grid with attention off copies raw crops") {
    const auto c = small_corpus();
    const auto d = grar::test::scratch_dir("cli_plain");
    const std::string tracks = (c / "tracks.txt").string();
    REQUIRE(cli({"cluster", "--tracks", tracks, "--out", (d / "k.txt").string(), "--bbox-refine",
                 "off"}).code == 0);
    REQUIRE(cli({"grid", "--tracks", tracks, "--keyposes", (d / "k.txt").string(), "--manifest",
                 (c / "manifest.txt").string(), "--out-dir", d.string(), "--attention", "off",
                 "--bbox-refine", "off"}).code == 0);
    const auto loaded = load_tracks(c / "tracks.txt");
    const auto m = read_manifest(d / "manifest.txt");
    for (const auto& e : m.entries) {
        const auto it = std::find_if(loaded.begin(), loaded.end(),
                                     [&](const Track& t) { return t.poses.person_id == e.person_id; });
        REQUIRE(it != loaded.end());
        std::vector<RgbImage> cells;
        for (long f : e.medoid_indices) cells.push_back(it->crops.find(f)->image);
        const auto g = compose_grid(cells, GridLayout::for_cells(cells.size()));
        CHECK(read_png(d / e.grid_relpath) == g.raster);
    }
}

TEST_CASE("eval of a separable fixture reports accuracy 1") {
    const auto d = grar::test::scratch_dir("cli_fixture");
    fs::create_directories(d / "grids");
    DatasetManifest m;
    for (int i = 0; i < 12; ++i) {
        const bool left = i % 2 == 0;
        RgbImage img(24, 24, {20, 20, 20});
        img.fill_rect(left ? 0 : 12, 0, 12, 24, {230, 230, 230});
        img.set(i, i, {128, 128, 128});
        const std::string name = "g" + std::to_string(i);
        write_png(d / "grids" / (name + ".png"), img);
        m.entries.push_back({"grids/" + name + ".png", name, left ? "left" : "right",
                             i < 8 ? Split::train : Split::test, 1, {static_cast<long>(i)}});
    }
    write_manifest(d / "manifest.txt", m);
    REQUIRE(cli({"train", "--manifest", (d / "manifest.txt").string(), "--out",
                 (d / "model.txt").string(), "--feature-side", "8"}).code == 0);
    const auto r = cli({"eval", "--manifest", (d / "manifest.txt").string(), "--model",
                        (d / "model.txt").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("accuracy 1\n") != std::string::npos);
}

TEST_CASE("config file with flag precedence") {
    const auto c = small_corpus();
    const auto d = grar::test::scratch_dir("cli_config");
    std::ofstream(d / "grar.ini") << "jobs = 2\n[cluster]\nk = 3\nmethod = kmeans\n";
    const std::string tracks = (c / "tracks.txt").string();
    REQUIRE(cli({"--config", (d / "grar.ini").string(), "cluster", "--tracks", tracks, "--out",
                 (d / "a.txt").string()}).code == 0);
    REQUIRE(cli({"--config", (d / "grar.ini").string(), "cluster", "--tracks", tracks, "--out",
                 (d / "b.txt").string(), "--k", "2"}).code == 0);
    CHECK(read_keyposes(d / "a.txt")[0].medoid_frame_indices.size() == 3);
    CHECK(read_keyposes(d / "b.txt")[0].medoid_frame_indices.size() == 2);
}

TEST_CASE("ablate prints one row per variant and seed") {
    const auto c = small_corpus();
    const auto r = cli({"ablate", "--study", "table2", "--tracks", (c / "tracks.txt").string(),
                        "--manifest", (c / "manifest.txt").string(), "--epochs", "5"});
    REQUIRE(r.code == 0);
    for (const Variant v : kAllVariants) {
        CHECK(r.out.find(std::string("row ") + variant_name(v) + " 0 ") != std::string::npos);
        CHECK(r.out.find(std::string("mean ") + variant_name(v) + " ") != std::string::npos);
    }
}

TEST_CASE("failures exit nonzero with a diagnostic") {
    const auto c = small_corpus();
    auto r = cli({"cluster", "--tracks", (c / "tracks.txt").string(), "--out", "x", "--bogus"});
    CHECK(r.code != 0);
    CHECK(!r.err.empty());
    r = cli({});
    CHECK(r.code != 0);
    r = cli({"cluster", "--tracks", "/nonexistent/tracks.txt", "--out", "x"});
    CHECK(r.code != 0);
    CHECK(r.err.find("error:") != std::string::npos);
    r = cli({"cluster", "--tracks", (c / "tracks.txt").string(), "--out", "x", "--method", "dbscan"});
    CHECK(r.code != 0);
    const auto d = grar::test::scratch_dir("cli_schema");
    std::ofstream(d / "m.txt") << "- nobody walk train 0 -\n";
    REQUIRE(cli({"cluster", "--tracks", (c / "tracks.txt").string(), "--out",
                 (d / "k.txt").string()}).code == 0);
    r = cli({"grid", "--tracks", (c / "tracks.txt").string(), "--keyposes", (d / "k.txt").string(),
             "--manifest", (d / "m.txt").string(), "--out-dir", d.string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("nobody") != std::string::npos);
}

}
