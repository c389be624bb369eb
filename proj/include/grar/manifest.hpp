#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace grar {

enum class Split { train, test };

const char* split_name(Split s) noexcept;
/// Throws ConfigError for anything but "train" / "test".
Split parse_split(std::string_view text);

/// One grid image and its label.
///
/// Before gridding a record has no grid yet: grid_relpath and the medoid list
/// are written as "-" and k as 0.
struct ManifestEntry {
    std::string grid_relpath;
    std::string person_id;
    std::string label;
    Split split = Split::train;
    std::size_t k = 0;
    /// Frame indices of the key poses, in cell order.
    std::vector<long> medoid_indices;

    bool has_grid() const noexcept { return !grid_relpath.empty(); }

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Line format, whitespace separated, '#' starts a comment line:
///
///     grid_relpath person_id label split k medoid_indices
///
/// with medoid_indices comma separated. Paths are relative to the manifest.
struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    /// Sorted distinct labels.
    std::vector<std::string> classes() const;
    std::vector<ManifestEntry> select(Split split) const;
    const ManifestEntry* find(std::string_view person_id) const noexcept;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Throws ParseError / SchemaError naming the line, IoError if unreadable.
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

}  // namespace grar
