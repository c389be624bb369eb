#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grar/normalize.hpp"
#include "grar/pose.hpp"

namespace grar {

enum class ClusterMethod { pam, kmeans, gmm };

const char* method_name(ClusterMethod m) noexcept;
ClusterMethod parse_method(std::string_view name);  ///< throws ConfigError

struct ClusterConfig {
    std::size_t k = 4;
    ClusterMethod method = ClusterMethod::pam;
    std::uint64_t seed = 0;
    std::size_t restarts = 5;
    std::size_t max_iters = 100;
    double conf_threshold = kLowConfidence;
};

/// Key poses of one track and the partition they induce.
///
/// `medoids` index the list that was clustered and are ascending, so for a
/// temporally ordered track the key poses come out in temporal order.
/// `assignments[i]` is the cluster (0..k-1) of clustered pose i and
/// `total_cost` is the masked-L1 sum of every pose to its cluster's medoid.
struct KeyPoseSet {
    std::string person_id;
    std::vector<std::size_t> medoids;
    std::vector<long> medoid_frame_indices;
    std::vector<NormalizedPose> medoid_vectors;
    std::vector<long> frame_indices;  ///< frame index of each clustered pose
    std::vector<std::size_t> assignments;
    double total_cost = 0.0;
    /// Set when the track had fewer usable frames than k and key poses were
    /// sampled uniformly in time instead of clustered.
    bool fallback = false;

    std::size_t k() const noexcept { return medoids.size(); }
};

/// Distance returned when two poses share no valid joint: the largest value a
/// rescaled L1 distance between unit-box poses can take (17 joints x 2).
inline constexpr double kNoOverlapDistance = 34.0;

/// L1 distance over joints valid in both poses, rescaled by 17 / shared joints.
double masked_l1(const NormalizedPose& a, const NormalizedPose& b) noexcept;

/// Poses packed as contiguous coordinate and weight rows for the SIMD kernels.
class PoseMatrix {
public:
    explicit PoseMatrix(std::span<const NormalizedPose> poses);

    std::size_t size() const noexcept { return rows_; }
    const double* coords(std::size_t i) const noexcept { return &coords_[i * kPoseDims]; }
    const double* weights(std::size_t i) const noexcept { return &weights_[i * kPoseDims]; }

    double masked_l1(std::size_t i, std::size_t j) const noexcept;

private:
    std::size_t rows_;
    std::vector<double> coords_;
    std::vector<double> weights_;
};

/// Dense symmetric masked-L1 dissimilarity matrix.
class DistanceMatrix {
public:
    explicit DistanceMatrix(const PoseMatrix& poses);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }

    /// Cost of assigning every point to its nearest medoid (ties go to the
    /// earliest slot), summed in point order. Optionally returns the slot of
    /// each point.
    double assignment_cost(std::span<const std::size_t> medoids,
                           std::vector<std::size_t>* slots = nullptr) const;

private:
    std::size_t n_;
    std::vector<double> d_;
};

/// PAM: random initial medoids, then steepest-descent single swaps until no
/// swap lowers the cost. The best of cfg.restarts seeded runs is returned.
KeyPoseSet pam_cluster(std::span<const NormalizedPose> poses, const ClusterConfig& cfg);

struct KMeansFit {
    std::vector<std::array<double, kPoseDims>> centroids;
    std::vector<std::size_t> assignments;
    double sse = 0.0;
    std::size_t iterations = 0;
    std::size_t reseeds = 0;  ///< empty clusters refilled during the run
};

/// Lloyd iterations with farthest-point seeding on masked squared-Euclidean
/// distance. Best SSE over cfg.restarts seeds.
KMeansFit fit_kmeans(std::span<const NormalizedPose> poses, const ClusterConfig& cfg);

/// K-means; each cluster's medoid is the member nearest its centroid.
KeyPoseSet kmeans_cluster(std::span<const NormalizedPose> poses, const ClusterConfig& cfg);

inline constexpr double kGmmVarianceFloor = 1e-4;
inline constexpr double kGmmTolerance = 1e-6;

struct GmmFit {
    std::vector<double> mix;  ///< mixing weights
    std::vector<std::array<double, kPoseDims>> means;
    std::vector<std::array<double, kPoseDims>> variances;
    std::vector<std::vector<double>> responsibilities;  ///< [point][component]
    std::vector<double> log_likelihood;                 ///< one entry per E-step
    std::size_t iterations = 0;
};

/// EM for a diagonal-covariance mixture, initialised from fit_kmeans. Masked
/// coordinates are treated as missing, so each pose contributes the marginal
/// density of its valid joints.
GmmFit fit_gmm(std::span<const NormalizedPose> poses, const ClusterConfig& cfg);

/// GMM; each component's medoid is the pose with the highest responsibility.
KeyPoseSet gmm_cluster(std::span<const NormalizedPose> poses, const ClusterConfig& cfg);

/// Dispatches on cfg.method.
KeyPoseSet cluster_poses(std::span<const NormalizedPose> poses, const ClusterConfig& cfg);

/// Normalizes `seq` against its (already refined) boxes, drops frames with
/// mean confidence below cfg.conf_threshold and clusters the rest. With fewer
/// usable frames than k, samples min(k, frames) frames uniformly in time and
/// sets `fallback`.
KeyPoseSet select_key_poses(const PoseSequence& seq, const ClusterConfig& cfg);

/// Cached key-pose record: `person_id k idx,idx,... cost`.
struct KeyPoseRecord {
    std::string person_id;
    std::vector<long> medoid_frame_indices;
    double total_cost = 0.0;

    friend bool operator==(const KeyPoseRecord&, const KeyPoseRecord&) = default;
};

KeyPoseRecord to_record(const KeyPoseSet& set);
void write_keyposes(const std::filesystem::path& path, std::span<const KeyPoseRecord> records);
std::vector<KeyPoseRecord> read_keyposes(const std::filesystem::path& path);

}  // namespace grar
