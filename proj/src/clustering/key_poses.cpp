#include <charconv>
#include <fstream>
#include <sstream>

#include "finalize.hpp"
#include "grar/clustering.hpp"
#include "grar/track_io.hpp"

namespace grar {

const char* method_name(ClusterMethod m) noexcept {
    switch (m) {
        case ClusterMethod::pam: return "pam";
        case ClusterMethod::kmeans: return "kmeans";
        case ClusterMethod::gmm: return "gmm";
    }
    return "?";
}

ClusterMethod parse_method(std::string_view name) {
    if (name == "pam") return ClusterMethod::pam;
    if (name == "kmeans") return ClusterMethod::kmeans;
    if (name == "gmm") return ClusterMethod::gmm;
    throw ConfigError("unknown clustering method '" + std::string(name) +
                      "' (expected pam, kmeans or gmm)");
}

namespace {

KeyPoseSet uniform_fallback(std::span<const NormalizedPose> all, std::size_t k) {
    const std::size_t n = all.size();
    const std::size_t count = std::min(k, n);
    std::vector<std::size_t> medoids(count);
    for (std::size_t i = 0; i < count; ++i) {
        medoids[i] = (2 * i + 1) * n / (2 * count);
    }
    const PoseMatrix packed(all);
    std::vector<std::size_t> slots(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < count; ++s) {
            const double d = packed.masked_l1(i, medoids[s]);
            if (d < best) {
                best = d;
                slots[i] = s;
            }
        }
    }
    for (std::size_t s = 0; s < count; ++s) {
        slots[medoids[s]] = s;
    }
    KeyPoseSet out = detail::finalize(all, packed, std::move(medoids), std::move(slots));
    out.fallback = true;
    return out;
}

}  // namespace

KeyPoseSet select_key_poses(const PoseSequence& seq, const ClusterConfig& cfg) {
    if (seq.frames.empty()) {
        throw ConfigError("track " + seq.person_id + " has no frames");
    }
    if (cfg.k == 0) {
        throw ConfigError("k must be at least 1");
    }
    const auto normalized = normalize_sequence(seq, cfg.conf_threshold);
    std::vector<NormalizedPose> usable;
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        if (seq.frames[i].pose.mean_confidence() >= cfg.conf_threshold) {
            usable.push_back(normalized[i]);
        }
    }
    KeyPoseSet out = usable.size() < cfg.k ? uniform_fallback(normalized, cfg.k)
                                           : cluster_poses(usable, cfg);
    out.person_id = seq.person_id;
    return out;
}

KeyPoseRecord to_record(const KeyPoseSet& set) {
    return {set.person_id, set.medoid_frame_indices, set.total_cost};
}

void write_keyposes(const std::filesystem::path& path, std::span<const KeyPoseRecord> records) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot create key-pose file " + path.string());
    }
    for (const auto& r : records) {
        out << r.person_id << ' ' << r.medoid_frame_indices.size() << ' ';
        for (std::size_t i = 0; i < r.medoid_frame_indices.size(); ++i) {
            out << (i ? "," : "") << r.medoid_frame_indices[i];
        }
        out << ' ' << format_number(r.total_cost) << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::vector<KeyPoseRecord> read_keyposes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open key-pose file " + path.string());
    }
    std::vector<KeyPoseRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string id, k_text, list, cost_text, extra;
        if (!(ss >> id)) {
            continue;
        }
        if (id.front() == '#') {
            continue;
        }
        if (!(ss >> k_text >> list >> cost_text) || (ss >> extra)) {
            throw ParseError(path.string(), line_no, "expected 4 fields: person_id k medoids cost");
        }
        KeyPoseRecord rec;
        rec.person_id = id;
        std::size_t k = 0;
        if (std::from_chars(k_text.data(), k_text.data() + k_text.size(), k).ec != std::errc{}) {
            throw ParseError(path.string(), line_no, "field 2 (k): not an integer");
        }
        std::istringstream items(list);
        std::string item;
        while (std::getline(items, item, ',')) {
            long v = 0;
            const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc{} || p != item.data() + item.size()) {
                throw ParseError(path.string(), line_no, "field 3 (medoids): bad index '" + item + "'");
            }
            rec.medoid_frame_indices.push_back(v);
        }
        if (rec.medoid_frame_indices.size() != k) {
            throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": k = " +
                              std::to_string(k) + " but " +
                              std::to_string(rec.medoid_frame_indices.size()) + " medoids listed");
        }
        const auto [p, ec] = std::from_chars(cost_text.data(), cost_text.data() + cost_text.size(),
                                             rec.total_cost);
        if (ec != std::errc{} || p != cost_text.data() + cost_text.size()) {
            throw ParseError(path.string(), line_no, "field 4 (cost): not a number");
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace grar
