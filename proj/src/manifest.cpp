#include "grar/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "grar/error.hpp"

namespace grar {

const char* split_name(Split s) noexcept { return s == Split::train ? "train" : "test"; }

Split parse_split(std::string_view text) {
    if (text == "train") return Split::train;
    if (text == "test") return Split::test;
    throw ConfigError("unknown split '" + std::string(text) + "' (expected train or test)");
}

std::vector<std::string> DatasetManifest::classes() const {
    std::set<std::string> s;
    for (const auto& e : entries) {
        s.insert(e.label);
    }
    return {s.begin(), s.end()};
}

std::vector<ManifestEntry> DatasetManifest::select(Split split) const {
    std::vector<ManifestEntry> out;
    std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
                 [split](const ManifestEntry& e) { return e.split == split; });
    return out;
}

const ManifestEntry* DatasetManifest::find(std::string_view person_id) const noexcept {
    for (const auto& e : entries) {
        if (e.person_id == person_id) {
            return &e;
        }
    }
    return nullptr;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open manifest " + path.string());
    }
    const std::string where = path.string();
    DatasetManifest m;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::vector<std::string> f;
        for (std::string tok; ss >> tok;) {
            f.push_back(std::move(tok));
        }
        if (f.empty() || f[0].front() == '#') {
            continue;
        }
        if (f.size() != 6) {
            throw ParseError(where, line_no,
                             "expected 6 fields (grid_relpath person_id label split k "
                             "medoid_indices), found " + std::to_string(f.size()));
        }
        ManifestEntry e;
        e.grid_relpath = f[0] == "-" ? "" : f[0];
        e.person_id = f[1];
        e.label = f[2];
        try {
            e.split = parse_split(f[3]);
        } catch (const ConfigError& err) {
            throw ParseError(where, line_no, std::string("field 4 (split): ") + err.what());
        }
        const auto [p, ec] = std::from_chars(f[4].data(), f[4].data() + f[4].size(), e.k);
        if (ec != std::errc{} || p != f[4].data() + f[4].size()) {
            throw ParseError(where, line_no, "field 5 (k): not a count");
        }
        if (f[5] != "-") {
            std::istringstream items(f[5]);
            for (std::string item; std::getline(items, item, ',');) {
                long v = 0;
                const auto [q, ec2] = std::from_chars(item.data(), item.data() + item.size(), v);
                if (ec2 != std::errc{} || q != item.data() + item.size()) {
                    throw ParseError(where, line_no,
                                     "field 6 (medoid_indices): bad index '" + item + "'");
                }
                e.medoid_indices.push_back(v);
            }
        }
        if (e.medoid_indices.size() != e.k) {
            throw SchemaError(where + ":" + std::to_string(line_no) + ": k = " +
                              std::to_string(e.k) + " but " +
                              std::to_string(e.medoid_indices.size()) + " medoid indices");
        }
        if (e.has_grid() != (e.k > 0)) {
            throw SchemaError(where + ":" + std::to_string(line_no) +
                              ": a grid path needs k >= 1 and k >= 1 needs a grid path");
        }
        if (!ids.insert(e.person_id).second) {
            throw SchemaError(where + ":" + std::to_string(line_no) + ": duplicate person_id " +
                              e.person_id);
        }
        m.entries.push_back(std::move(e));
    }
    return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot create manifest " + path.string());
    }
    for (const auto& e : manifest.entries) {
        out << (e.has_grid() ? e.grid_relpath : "-") << ' ' << e.person_id << ' ' << e.label
            << ' ' << split_name(e.split) << ' ' << e.k << ' ';
        if (e.medoid_indices.empty()) {
            out << '-';
        }
        for (std::size_t i = 0; i < e.medoid_indices.size(); ++i) {
            out << (i ? "," : "") << e.medoid_indices[i];
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

}  // namespace grar
