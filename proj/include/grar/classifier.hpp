#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "grar/grid.hpp"
#include "grar/image.hpp"

namespace grar {

inline constexpr int kDefaultFeatureSide = 64;

/// Downsampled grayscale grid, row-major, values in [0, 1].
struct FeatureVector {
    std::vector<double> values;
    int side = 0;
};

/// Grayscale (0.299 R + 0.587 G + 0.114 B), area-average resample to
/// side x side, scaled to [0, 1]. side >= 8.
FeatureVector featurize(const RgbImage& raster, int side = kDefaultFeatureSide);
inline FeatureVector featurize(const GridImage& grid, int side = kDefaultFeatureSide) {
    return featurize(grid.raster, side);
}

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t epochs = 100;
    std::size_t batch_size = 16;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-3;
    /// Multiply the learning rate by plateau_factor after plateau_patience
    /// epochs without a lower training loss.
    double plateau_factor = 0.2;
    std::size_t plateau_patience = 10;
    std::uint64_t seed = 0;
};

/// softmax(W x + b) over `classes`.
struct LinearSoftmaxModel {
    std::vector<std::string> classes;
    std::size_t dim = 0;
    std::vector<double> weights;  ///< classes.size() x dim, row-major
    std::vector<double> bias;
    TrainConfig train_config;

    /// W = 0, b = 0. Classes must be non-empty, unique and free of whitespace.
    static LinearSoftmaxModel zeros(std::vector<std::string> classes, std::size_t dim);

    std::size_t num_classes() const noexcept { return classes.size(); }
    /// Throws ConfigError for labels the model does not know.
    std::size_t class_index(const std::string& label) const;
    std::vector<double> logits(std::span<const double> x) const;
};

struct Example {
    FeatureVector features;
    std::string label;
};

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

/// Mean of -log softmax_y(W x + b) over the batch.
double cross_entropy_loss(const LinearSoftmaxModel& model, std::span<const Example> batch);

struct LossGradient {
    double loss = 0.0;
    std::vector<double> d_weights;
    std::vector<double> d_bias;
};

LossGradient loss_gradient(const LinearSoftmaxModel& model, std::span<const Example> batch);

struct TrainResult {
    LinearSoftmaxModel model;
    /// Training loss after each epoch, and the learning rate that epoch used.
    std::vector<double> epoch_loss;
    std::vector<double> epoch_learning_rate;
};

/// Adam on minibatches drawn by a seeded shuffle each epoch. Classes are the
/// sorted distinct labels; fewer than two is a ConfigError.
TrainResult train(std::span<const Example> data, const TrainConfig& cfg = {});

struct Prediction {
    std::string label;
    std::size_t index = 0;
    std::vector<double> probabilities;
};

/// Throws DimensionError when the feature size differs from the model's.
Prediction predict(const LinearSoftmaxModel& model, const FeatureVector& x);

/// Most frequent label; ties go to the lexicographically smallest.
std::string majority_activity(std::span<const std::string> labels);

/// Text checkpoint, exact round trip:
///
///     grar-linear-softmax 1
///     classes <n> <label>...
///     dim <D>
///     train <lr> <epochs> <batch> <beta1> <beta2> <eps> <factor> <patience> <seed>
///     bias <b_1> ... <b_n>
///     w <c> <W_c1> ... <W_cD>        (one line per class)
void save_model(const std::filesystem::path& path, const LinearSoftmaxModel& model);
LinearSoftmaxModel load_model(const std::filesystem::path& path);

}  // namespace grar
