#include "grar/track_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "grar/error.hpp"

namespace grar {

namespace {

constexpr std::size_t kHeaderFields = 7;
constexpr std::size_t kFieldsPerJoint = 3;
constexpr std::size_t kRecordFields = kHeaderFields + kFieldsPerJoint * kNumJoints;

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
            ++j;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

std::string field_name(std::size_t field) {
    static constexpr std::array<const char*, kHeaderFields> header{
        "person_id", "frame_index", "x_min", "y_min", "x_max", "y_max", "crop_relpath"};
    if (field < kHeaderFields) {
        return header[field];
    }
    const std::size_t joint = (field - kHeaderFields) / kFieldsPerJoint;
    static constexpr std::array<const char*, 3> suffix{"x", "y", "c"};
    return "j" + std::to_string(joint) + suffix[(field - kHeaderFields) % kFieldsPerJoint];
}

struct LineContext {
    const std::string& file;
    std::size_t line;

    [[noreturn]] void fail(std::size_t field, const std::string& what) const {
        throw ParseError(file, line, "field " + std::to_string(field + 1) + " (" +
                                         field_name(field) + "): " + what);
    }

    double number(std::string_view tok, std::size_t field) const {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            fail(field, "expected a decimal number, got '" + std::string(tok) + "'");
        }
        if (!std::isfinite(v)) {
            fail(field, "value is not finite");
        }
        return v;
    }

    long integer(std::string_view tok, std::size_t field) const {
        long v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            fail(field, "expected an integer, got '" + std::string(tok) + "'");
        }
        return v;
    }
};

struct ParsedRecord {
    std::string person_id;
    TrackFrame frame;
    std::string crop_relpath;
};

ParsedRecord parse_record(const std::vector<std::string_view>& tok, const LineContext& ctx) {
    if (tok.size() != kRecordFields) {
        if (tok.size() > kHeaderFields && (tok.size() - kHeaderFields) % kFieldsPerJoint == 0) {
            throw SchemaError(ctx.file + ":" + std::to_string(ctx.line) + ": expected " +
                              std::to_string(kNumJoints) + " joints, found " +
                              std::to_string((tok.size() - kHeaderFields) / kFieldsPerJoint));
        }
        throw ParseError(ctx.file, ctx.line,
                         "expected " + std::to_string(kRecordFields) + " fields, found " +
                             std::to_string(tok.size()));
    }
    ParsedRecord rec;
    rec.person_id = std::string(tok[0]);
    rec.frame.frame_index = ctx.integer(tok[1], 1);
    rec.frame.box = {ctx.number(tok[2], 2), ctx.number(tok[3], 3), ctx.number(tok[4], 4),
                     ctx.number(tok[5], 5)};
    if (!rec.frame.box.valid()) {
        throw SchemaError(ctx.file + ":" + std::to_string(ctx.line) +
                          ": bounding box requires x_min < x_max and y_min < y_max");
    }
    rec.crop_relpath = std::string(tok[6]);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        const std::size_t f = kHeaderFields + j * kFieldsPerJoint;
        Keypoint& kp = rec.frame.pose[j];
        kp.x = ctx.number(tok[f], f);
        kp.y = ctx.number(tok[f + 1], f + 1);
        kp.confidence = ctx.number(tok[f + 2], f + 2);
        if (kp.confidence < 0.0 || kp.confidence > 1.0) {
            throw SchemaError(ctx.file + ":" + std::to_string(ctx.line) + ": field " +
                              std::to_string(f + 3) + " (" + field_name(f + 2) +
                              "): confidence outside [0,1]");
        }
    }
    return rec;
}

template <typename OnRecord>
void scan_file(const std::filesystem::path& path, OnRecord&& on_record) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open track file " + path.string());
    }
    const std::string file = path.string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0].front() == '#') {
            continue;
        }
        LineContext ctx{file, line_no};
        on_record(parse_record(tok, ctx), ctx);
    }
}

}  // namespace

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::vector<PoseSequence> load_sequences(const std::filesystem::path& path) {
    std::vector<PoseSequence> out;
    std::unordered_map<std::string, std::size_t> slot;
    scan_file(path, [&](ParsedRecord rec, const LineContext&) {
        auto [it, inserted] = slot.try_emplace(rec.person_id, out.size());
        if (inserted) {
            out.push_back(PoseSequence{rec.person_id, {}});
        }
        out[it->second].frames.push_back(std::move(rec.frame));
    });
    return out;
}

std::vector<Track> load_tracks(const std::filesystem::path& path) {
    std::vector<Track> out;
    std::unordered_map<std::string, std::size_t> slot;
    const auto base = path.parent_path();
    scan_file(path, [&](ParsedRecord rec, const LineContext& ctx) {
        auto [it, inserted] = slot.try_emplace(rec.person_id, out.size());
        if (inserted) {
            Track t;
            t.poses.person_id = rec.person_id;
            t.crops.person_id = rec.person_id;
            out.push_back(std::move(t));
        }
        Track& track = out[it->second];

        const auto crop_path = base / rec.crop_relpath;
        if (!std::filesystem::exists(crop_path)) {
            throw IoError(ctx.file + ":" + std::to_string(ctx.line) + ": missing crop " +
                          crop_path.string());
        }
        CropFrame crop{rec.frame.frame_index, read_png(crop_path), rec.crop_relpath};
        const int w = rec.frame.box.pixel_width();
        const int h = rec.frame.box.pixel_height();
        if (crop.image.width() != w || crop.image.height() != h) {
            std::ostringstream msg;
            msg << ctx.file << ":" << ctx.line << ": crop " << rec.crop_relpath << " is "
                << crop.image.width() << "x" << crop.image.height() << ", box needs " << w << "x"
                << h;
            throw DimensionError(msg.str());
        }
        track.crops.frames.push_back(std::move(crop));
        track.poses.frames.push_back(std::move(rec.frame));
    });
    return out;
}

void write_tracks(const std::filesystem::path& path, const std::vector<Track>& tracks) {
    const auto base = path.parent_path();
    if (!base.empty()) {
        std::filesystem::create_directories(base);
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot create track file " + path.string());
    }
    for (const auto& track : tracks) {
        if (track.crops.frames.size() != track.poses.frames.size()) {
            throw DimensionError("track " + track.poses.person_id +
                                 ": crop count does not match frame count");
        }
        for (std::size_t i = 0; i < track.poses.frames.size(); ++i) {
            const TrackFrame& f = track.poses.frames[i];
            const CropFrame& c = track.crops.frames[i];
            if (c.frame_index != f.frame_index) {
                throw DimensionError("track " + track.poses.person_id + ": crop for frame " +
                                     std::to_string(c.frame_index) + " misaligned with frame " +
                                     std::to_string(f.frame_index));
            }
            std::string rel = c.relpath;
            if (rel.empty()) {
                rel = "crops/" + track.poses.person_id + "/" + std::to_string(f.frame_index) +
                      ".png";
            }
            const auto crop_path = base / rel;
            std::filesystem::create_directories(crop_path.parent_path());
            write_png(crop_path, c.image);

            out << track.poses.person_id << ' ' << f.frame_index << ' '
                << format_number(f.box.x_min) << ' ' << format_number(f.box.y_min) << ' '
                << format_number(f.box.x_max) << ' ' << format_number(f.box.y_max) << ' ' << rel;
            for (const auto& kp : f.pose.joints) {
                out << ' ' << format_number(kp.x) << ' ' << format_number(kp.y) << ' '
                    << format_number(kp.confidence);
            }
            out << '\n';
        }
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::vector<SequenceWarning> validate_sequence(const PoseSequence& seq, double conf_threshold) {
    std::vector<SequenceWarning> out;
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        const auto& f = seq.frames[i];
        const double mean = f.pose.mean_confidence();
        if (mean < conf_threshold) {
            out.push_back({SequenceWarning::Kind::low_confidence, i, f.frame_index,
                           "frame " + std::to_string(f.frame_index) + ": mean confidence " +
                               format_number(mean) + " below " + format_number(conf_threshold)});
        }
        if (i > 0 && f.frame_index <= seq.frames[i - 1].frame_index) {
            out.push_back({SequenceWarning::Kind::non_monotone, i, f.frame_index,
                           "frame " + std::to_string(f.frame_index) + " does not follow frame " +
                               std::to_string(seq.frames[i - 1].frame_index)});
        }
    }
    return out;
}

}  // namespace grar
