#include "grar/classifier.hpp"

#include <algorithm>
#include <cstdint>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "grar/error.hpp"
#include "grar/rng.hpp"
#include "grar/simd/kernels.hpp"
#include "grar/track_io.hpp"

namespace grar {

namespace {

struct Tap {
    int src;
    std::int64_t weight;
};

// Output cell u covers [u*n, (u+1)*n) and source pixel x covers
// [x*side, (x+1)*side), both in units of 1/(n*side) of the image, so
// every overlap is an exact integer.
std::vector<std::vector<Tap>> area_taps(int n, int side) {
    std::vector<std::vector<Tap>> taps(static_cast<std::size_t>(side));
    for (int u = 0; u < side; ++u) {
        const long lo = static_cast<long>(u) * n, hi = lo + n;
        for (int x = static_cast<int>(lo / side); x < n && static_cast<long>(x) * side < hi; ++x) {
            const long a = std::max(lo, static_cast<long>(x) * side);
            const long b = std::min(hi, static_cast<long>(x + 1) * side);
            if (b > a) {
                taps[static_cast<std::size_t>(u)].push_back({x, b - a});
            }
        }
    }
    return taps;
}

void check_label(const std::string& label) {
    if (label.empty() || std::any_of(label.begin(), label.end(),
                                     [](unsigned char c) { return std::isspace(c) != 0; })) {
        throw ConfigError("class label '" + label + "' must be non-empty without whitespace");
    }
}

// -log softmax_y(z) and, optionally, the probabilities.
double sample_loss(const std::vector<double>& z, std::size_t y, std::vector<double>* probs) {
    const double top = *std::max_element(z.begin(), z.end());
    double acc = 0.0;
    for (const double v : z) {
        acc += std::exp(v - top);
    }
    const double lse = top + std::log(acc);
    if (probs != nullptr) {
        probs->resize(z.size());
        for (std::size_t c = 0; c < z.size(); ++c) {
            (*probs)[c] = std::exp(z[c] - lse);
        }
    }
    return lse - z[y];
}

void check_dim(const LinearSoftmaxModel& model, const FeatureVector& x) {
    if (x.values.size() != model.dim) {
        throw DimensionError("feature vector has " + std::to_string(x.values.size()) +
                             " values, model expects " + std::to_string(model.dim));
    }
}

// Loss and gradient summed over batch[idx]; the caller divides.
double accumulate(const LinearSoftmaxModel& model, std::span<const Example> data,
                  std::span<const std::size_t> idx, LossGradient& g) {
    const std::size_t n = model.num_classes();
    std::vector<double> probs;
    double loss = 0.0;
    for (const std::size_t i : idx) {
        const Example& ex = data[i];
        check_dim(model, ex.features);
        const std::size_t y = model.class_index(ex.label);
        loss += sample_loss(model.logits(ex.features.values), y, &probs);
        for (std::size_t c = 0; c < n; ++c) {
            const double delta = probs[c] - (c == y ? 1.0 : 0.0);
            g.d_bias[c] += delta;
            simd::active().axpy(delta, ex.features.values.data(), &g.d_weights[c * model.dim],
                                model.dim);
        }
    }
    return loss;
}

struct AdamState {
    std::vector<double> m, v;
    double b1t = 1.0, b2t = 1.0;
};

void adam_step(std::vector<double>& theta, const std::vector<double>& grad, AdamState& s,
               const TrainConfig& cfg, double lr) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
        s.m[i] = cfg.beta1 * s.m[i] + (1.0 - cfg.beta1) * grad[i];
        s.v[i] = cfg.beta2 * s.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double m_hat = s.m[i] / (1.0 - s.b1t);
        const double v_hat = s.v[i] / (1.0 - s.b2t);
        theta[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

}  // namespace

FeatureVector featurize(const RgbImage& raster, int side) {
    if (side < 8) {
        throw ConfigError("feature side must be at least 8, got " + std::to_string(side));
    }
    if (raster.empty()) {
        throw DimensionError("cannot featurize an empty raster");
    }
    const int w = raster.width(), h = raster.height();
    const auto tx = area_taps(w, side);
    const auto ty = area_taps(h, side);

    // Integer gray times integer overlap, summed exactly in both passes; one
    // division at the end, so a constant image maps to exactly gray / 255000.
    std::vector<std::int64_t> rows(static_cast<std::size_t>(h) * static_cast<std::size_t>(side));
    for (int y = 0; y < h; ++y) {
        for (int u = 0; u < side; ++u) {
            std::int64_t acc = 0;
            for (const Tap& t : tx[static_cast<std::size_t>(u)]) {
                const Rgb p = raster.at(t.src, y);
                acc += t.weight * (299 * std::int64_t{p[0]} + 587 * std::int64_t{p[1]} +
                                   114 * std::int64_t{p[2]});
            }
            rows[static_cast<std::size_t>(y) * static_cast<std::size_t>(side) +
                 static_cast<std::size_t>(u)] = acc;
        }
    }
    const double scale = 255000.0 * static_cast<double>(w) * static_cast<double>(h);
    FeatureVector out;
    out.side = side;
    out.values.resize(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
    for (int v = 0; v < side; ++v) {
        for (int u = 0; u < side; ++u) {
            std::int64_t acc = 0;
            for (const Tap& t : ty[static_cast<std::size_t>(v)]) {
                acc += t.weight * rows[static_cast<std::size_t>(t.src) *
                                           static_cast<std::size_t>(side) +
                                       static_cast<std::size_t>(u)];
            }
            out.values[static_cast<std::size_t>(v) * static_cast<std::size_t>(side) +
                       static_cast<std::size_t>(u)] =
                std::clamp(static_cast<double>(acc) / scale, 0.0, 1.0);
        }
    }
    return out;
}

LinearSoftmaxModel LinearSoftmaxModel::zeros(std::vector<std::string> classes, std::size_t dim) {
    if (classes.empty()) {
        throw ConfigError("model needs at least one class");
    }
    std::set<std::string> seen;
    for (const auto& c : classes) {
        check_label(c);
        if (!seen.insert(c).second) {
            throw ConfigError("duplicate class label '" + c + "'");
        }
    }
    LinearSoftmaxModel m;
    m.dim = dim;
    m.weights.assign(classes.size() * dim, 0.0);
    m.bias.assign(classes.size(), 0.0);
    m.classes = std::move(classes);
    return m;
}

std::size_t LinearSoftmaxModel::class_index(const std::string& label) const {
    const auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) {
        throw ConfigError("unknown label '" + label + "'");
    }
    return static_cast<std::size_t>(it - classes.begin());
}

std::vector<double> LinearSoftmaxModel::logits(std::span<const double> x) const {
    std::vector<double> z(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        z[c] = bias[c] + simd::active().dot(&weights[c * dim], x.data(), dim);
    }
    return z;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> z(logits.begin(), logits.end());
    std::vector<double> p;
    sample_loss(z, 0, &p);
    return p;
}

double cross_entropy_loss(const LinearSoftmaxModel& model, std::span<const Example> batch) {
    if (batch.empty()) {
        throw ConfigError("loss of an empty batch");
    }
    // Running mean: a batch of equal losses averages to exactly that loss.
    double mean = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        check_dim(model, batch[i].features);
        const double l = sample_loss(model.logits(batch[i].features.values),
                                     model.class_index(batch[i].label), nullptr);
        mean += (l - mean) / static_cast<double>(i + 1);
    }
    return mean;
}

LossGradient loss_gradient(const LinearSoftmaxModel& model, std::span<const Example> batch) {
    if (batch.empty()) {
        throw ConfigError("gradient of an empty batch");
    }
    LossGradient g;
    g.d_weights.assign(model.weights.size(), 0.0);
    g.d_bias.assign(model.bias.size(), 0.0);
    std::vector<std::size_t> idx(batch.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const double n = static_cast<double>(batch.size());
    g.loss = accumulate(model, batch, idx, g) / n;
    for (double& v : g.d_weights) v /= n;
    for (double& v : g.d_bias) v /= n;
    return g;
}

TrainResult train(std::span<const Example> data, const TrainConfig& cfg) {
    if (data.empty()) {
        throw ConfigError("training set is empty");
    }
    if (cfg.batch_size == 0) {
        throw ConfigError("batch size must be at least 1");
    }
    std::set<std::string> labels;
    for (const auto& ex : data) {
        labels.insert(ex.label);
    }
    if (labels.size() < 2) {
        throw ConfigError("training needs at least 2 classes, found " +
                          std::to_string(labels.size()));
    }
    const std::size_t dim = data.front().features.values.size();
    TrainResult result{LinearSoftmaxModel::zeros({labels.begin(), labels.end()}, dim), {}, {}};
    LinearSoftmaxModel& model = result.model;
    model.train_config = cfg;

    AdamState sw{std::vector<double>(model.weights.size(), 0.0),
                 std::vector<double>(model.weights.size(), 0.0)};
    AdamState sb{std::vector<double>(model.bias.size(), 0.0),
                 std::vector<double>(model.bias.size(), 0.0)};
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    double lr = cfg.learning_rate;
    double best = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng(derive_seed(cfg.seed, epoch));
        rng.shuffle(order.begin(), order.end());
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            const std::span<const std::size_t> idx(order.data() + start, end - start);
            LossGradient g;
            g.d_weights.assign(model.weights.size(), 0.0);
            g.d_bias.assign(model.bias.size(), 0.0);
            accumulate(model, data, idx, g);
            const double inv = 1.0 / static_cast<double>(idx.size());
            for (double& v : g.d_weights) v *= inv;
            for (double& v : g.d_bias) v *= inv;
            sw.b1t *= cfg.beta1;
            sw.b2t *= cfg.beta2;
            sb.b1t = sw.b1t;
            sb.b2t = sw.b2t;
            adam_step(model.weights, g.d_weights, sw, cfg, lr);
            adam_step(model.bias, g.d_bias, sb, cfg, lr);
        }
        const double loss = cross_entropy_loss(model, data);
        result.epoch_loss.push_back(loss);
        result.epoch_learning_rate.push_back(lr);
        if (loss < best) {
            best = loss;
            stale = 0;
        } else if (++stale >= cfg.plateau_patience) {
            lr *= cfg.plateau_factor;
            stale = 0;
        }
    }
    return result;
}

Prediction predict(const LinearSoftmaxModel& model, const FeatureVector& x) {
    check_dim(model, x);
    Prediction p;
    p.probabilities = softmax(model.logits(x.values));
    p.index = static_cast<std::size_t>(
        std::max_element(p.probabilities.begin(), p.probabilities.end()) -
        p.probabilities.begin());
    p.label = model.classes[p.index];
    return p;
}

std::string majority_activity(std::span<const std::string> labels) {
    if (labels.empty()) {
        throw ConfigError("majority of an empty label list");
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& l : labels) {
        ++counts[l];
    }
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) {
            best = it;
        }
    }
    return best->first;
}

void save_model(const std::filesystem::path& path, const LinearSoftmaxModel& model) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot create model file " + path.string());
    }
    const TrainConfig& t = model.train_config;
    out << "grar-linear-softmax 1\n";
    out << "classes " << model.classes.size();
    for (const auto& c : model.classes) {
        out << ' ' << c;
    }
    out << "\ndim " << model.dim << '\n';
    out << "train " << format_number(t.learning_rate) << ' ' << t.epochs << ' ' << t.batch_size
        << ' ' << format_number(t.beta1) << ' ' << format_number(t.beta2) << ' '
        << format_number(t.epsilon) << ' ' << format_number(t.plateau_factor) << ' '
        << t.plateau_patience << ' ' << t.seed << '\n';
    out << "bias";
    for (const double b : model.bias) {
        out << ' ' << format_number(b);
    }
    out << '\n';
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        out << "w " << c;
        for (std::size_t d = 0; d < model.dim; ++d) {
            out << ' ' << format_number(model.weights[c * model.dim + d]);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

LinearSoftmaxModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open model file " + path.string());
    }
    const std::string where = path.string();
    std::size_t line_no = 0;
    std::string line;
    auto next = [&](const std::string& key) {
        if (!std::getline(in, line)) {
            throw ParseError(where, line_no + 1, "missing '" + key + "' record");
        }
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag != key) {
            throw ParseError(where, line_no, "expected '" + key + "', found '" + tag + "'");
        }
        return ss;
    };
    auto fail = [&](const std::string& what) { throw ParseError(where, line_no, what); };

    {
        auto ss = next("grar-linear-softmax");
        int version = 0;
        if (!(ss >> version) || version != 1) {
            fail("unsupported checkpoint version");
        }
    }
    std::vector<std::string> classes;
    {
        auto ss = next("classes");
        std::size_t n = 0;
        ss >> n;
        std::string c;
        while (ss >> c) {
            classes.push_back(c);
        }
        if (classes.size() != n || n == 0) {
            fail("class count does not match labels");
        }
    }
    std::size_t dim = 0;
    if (!(next("dim") >> dim)) {
        fail("bad dim");
    }
    TrainConfig t;
    if (!(next("train") >> t.learning_rate >> t.epochs >> t.batch_size >> t.beta1 >> t.beta2 >>
          t.epsilon >> t.plateau_factor >> t.plateau_patience >> t.seed)) {
        fail("bad train record");
    }
    LinearSoftmaxModel model = LinearSoftmaxModel::zeros(std::move(classes), dim);
    model.train_config = t;
    auto read_numbers = [&](std::istringstream& ss, double* dst, std::size_t n) {
        std::string tok;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(ss >> tok)) {
                fail("expected " + std::to_string(n) + " values");
            }
            const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), dst[i]);
            if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(dst[i])) {
                fail("bad parameter '" + tok + "'");
            }
        }
        if (ss >> tok) {
            fail("trailing values");
        }
    };
    {
        auto ss = next("bias");
        read_numbers(ss, model.bias.data(), model.bias.size());
    }
    for (std::size_t c = 0; c < model.num_classes(); ++c) {
        auto ss = next("w");
        std::size_t row = 0;
        if (!(ss >> row) || row != c) {
            fail("weight rows out of order");
        }
        read_numbers(ss, &model.weights[c * dim], dim);
    }
    return model;
}

}  // namespace grar
