#include "grar/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "grar/error.hpp"
#include "grar/track_io.hpp"

namespace grar {

namespace {

std::size_t label_index(const std::vector<std::string>& labels, const std::string& l) {
    const auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end()) {
        throw ConfigError("label '" + l + "' is not in the report's label set");
    }
    return static_cast<std::size_t>(it - labels.begin());
}

}  // namespace

EvalReport EvalReport::empty(std::vector<std::string> labels) {
    EvalReport r;
    r.confusion.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
    r.labels = std::move(labels);
    return r;
}

void EvalReport::add(const std::string& truth, const std::string& predicted) {
    ++confusion[label_index(labels, truth)][label_index(labels, predicted)];
}

std::size_t EvalReport::samples() const noexcept {
    std::size_t n = 0;
    for (std::size_t c = 0; c < labels.size(); ++c) {
        n += class_samples(c);
    }
    return n;
}

double EvalReport::accuracy() const noexcept {
    std::size_t hit = 0;
    for (std::size_t c = 0; c < labels.size(); ++c) {
        hit += confusion[c][c];
    }
    const std::size_t n = samples();
    return n == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(n);
}

std::size_t EvalReport::class_samples(std::size_t c) const noexcept {
    std::size_t n = 0;
    for (const std::size_t v : confusion[c]) {
        n += v;
    }
    return n;
}

double EvalReport::class_accuracy(std::size_t c) const noexcept {
    const std::size_t n = class_samples(c);
    return n == 0 ? 0.0 : static_cast<double>(confusion[c][c]) / static_cast<double>(n);
}

void write_report(std::ostream& out, const EvalReport& r) {
    out << "report grar-eval v1\n";
    out << "samples " << r.samples() << '\n';
    out << "accuracy " << format_number(r.accuracy()) << '\n';
    for (std::size_t c = 0; c < r.labels.size(); ++c) {
        out << "class_accuracy " << r.labels[c] << ' ' << format_number(r.class_accuracy(c)) << ' '
            << r.class_samples(c) << '\n';
    }
    out << "confusion_labels";
    for (const auto& l : r.labels) {
        out << ' ' << l;
    }
    out << '\n';
    for (std::size_t c = 0; c < r.labels.size(); ++c) {
        out << "confusion " << r.labels[c];
        for (const std::size_t v : r.confusion[c]) {
            out << ' ' << v;
        }
        out << '\n';
    }
}

void write_report(const std::filesystem::path& path, const EvalReport& report) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot create report " + path.string());
    }
    write_report(out, report);
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

EvalReport read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open report " + path.string());
    }
    const std::string where = path.string();
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || line != "report grar-eval v1") {
        throw ParseError(where, 1, "not a grar-eval v1 report");
    }
    ++line_no;
    EvalReport r;
    bool have_labels = false;
    std::size_t declared = 0;
    std::vector<bool> seen;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) {
            continue;
        }
        if (tag == "samples") {
            ss >> declared;
        } else if (tag == "confusion_labels") {
            std::vector<std::string> labels;
            for (std::string l; ss >> l;) {
                labels.push_back(l);
            }
            r = EvalReport::empty(std::move(labels));
            seen.assign(r.labels.size(), false);
            have_labels = true;
        } else if (tag == "confusion") {
            if (!have_labels) {
                throw ParseError(where, line_no, "confusion row before confusion_labels");
            }
            std::string label;
            ss >> label;
            std::size_t c = 0;
            try {
                c = label_index(r.labels, label);
            } catch (const ConfigError& e) {
                throw ParseError(where, line_no, e.what());
            }
            for (std::size_t p = 0; p < r.labels.size(); ++p) {
                if (!(ss >> r.confusion[c][p])) {
                    throw ParseError(where, line_no, "confusion row for " + label + " is short");
                }
            }
            seen[c] = true;
        }
        // accuracy and class_accuracy are derived; they are recomputed.
    }
    if (!have_labels || std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw SchemaError(where + ": incomplete confusion matrix");
    }
    if (r.samples() != declared) {
        throw SchemaError(where + ": samples " + std::to_string(declared) +
                          " disagrees with confusion total " + std::to_string(r.samples()));
    }
    return r;
}

}  // namespace grar
