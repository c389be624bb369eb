#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace grar {

/// Test-set evaluation: confusion counts indexed [true][predicted].
struct EvalReport {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> confusion;

    /// Counts the pair; both labels must be in `labels`.
    void add(const std::string& truth, const std::string& predicted);

    std::size_t samples() const noexcept;
    double accuracy() const noexcept;
    std::size_t class_samples(std::size_t c) const noexcept;
    double class_accuracy(std::size_t c) const noexcept;

    static EvalReport empty(std::vector<std::string> labels);
};

/// Line-oriented report:
///
///     report grar-eval v1
///     samples <N>
///     accuracy <acc>
///     class_accuracy <label> <acc> <n>          (one per label)
///     confusion_labels <label>...
///     confusion <true_label> <count>...         (one per label, predicted in label order)
void write_report(std::ostream& out, const EvalReport& report);
void write_report(const std::filesystem::path& path, const EvalReport& report);
EvalReport read_report(const std::filesystem::path& path);

}  // namespace grar
