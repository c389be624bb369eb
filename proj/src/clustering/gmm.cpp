#include <cmath>
#include <limits>

#include "finalize.hpp"
#include "grar/clustering.hpp"
#include "grar/simd/kernels.hpp"

namespace grar {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

using Row = std::array<double, kPoseDims>;

}  // namespace

GmmFit fit_gmm(std::span<const NormalizedPose> poses, const ClusterConfig& cfg) {
    const KMeansFit init = fit_kmeans(poses, cfg);
    const PoseMatrix x(poses);
    const std::size_t n = poses.size();
    const std::size_t k = cfg.k;
    const auto& kern = simd::active();

    GmmFit fit;
    fit.mix.assign(k, 0.0);
    fit.means = init.centroids;
    fit.variances.assign(k, Row{});
    {
        std::vector<Row> sq(k, Row{}), wsum(k, Row{});
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = init.assignments[i];
            fit.mix[j] += 1.0;
            for (std::size_t d = 0; d < kPoseDims; ++d) {
                const double diff = x.coords(i)[d] - fit.means[j][d];
                sq[j][d] += x.weights(i)[d] * diff * diff;
                wsum[j][d] += x.weights(i)[d];
            }
        }
        for (std::size_t j = 0; j < k; ++j) {
            fit.mix[j] /= static_cast<double>(n);
            for (std::size_t d = 0; d < kPoseDims; ++d) {
                const double v = wsum[j][d] > 0.0 ? sq[j][d] / wsum[j][d] : 0.0;
                fit.variances[j][d] = std::max(v, kGmmVarianceFloor);
            }
        }
    }

    fit.responsibilities.assign(n, std::vector<double>(k, 0.0));
    std::vector<Row> inv_var(k), log_norm(k);
    std::vector<double> logp(k);

    for (std::size_t iter = 0; iter < std::max<std::size_t>(cfg.max_iters, 1); ++iter) {
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t d = 0; d < kPoseDims; ++d) {
                inv_var[j][d] = 1.0 / fit.variances[j][d];
                log_norm[j][d] = kLog2Pi + std::log(fit.variances[j][d]);
            }
        }

        // E-step
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                if (fit.mix[j] <= 0.0) {
                    logp[j] = -std::numeric_limits<double>::infinity();
                    continue;
                }
                const double quad = kern.weighted_sq_dist(x.coords(i), x.weights(i),
                                                          fit.means[j].data(), inv_var[j].data(),
                                                          kPoseDims);
                const double norm = kern.dot(x.weights(i), log_norm[j].data(), kPoseDims);
                logp[j] = std::log(fit.mix[j]) - 0.5 * (norm + quad);
                top = std::max(top, logp[j]);
            }
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                acc += std::exp(logp[j] - top);
            }
            const double lse = top + std::log(acc);
            ll += lse;
            for (std::size_t j = 0; j < k; ++j) {
                fit.responsibilities[i][j] = std::exp(logp[j] - lse);
            }
        }
        fit.log_likelihood.push_back(ll);
        fit.iterations = iter + 1;
        const std::size_t h = fit.log_likelihood.size();
        if (h >= 2 && fit.log_likelihood[h - 1] - fit.log_likelihood[h - 2] < kGmmTolerance) {
            break;
        }
        if (iter + 1 == cfg.max_iters) {
            break;
        }

        // M-step; a dimension a component never observes keeps its parameters
        for (std::size_t j = 0; j < k; ++j) {
            double nk = 0.0;
            Row sum{}, wsum{};
            for (std::size_t i = 0; i < n; ++i) {
                const double r = fit.responsibilities[i][j];
                nk += r;
                for (std::size_t d = 0; d < kPoseDims; ++d) {
                    const double rw = r * x.weights(i)[d];
                    sum[d] += rw * x.coords(i)[d];
                    wsum[d] += rw;
                }
            }
            fit.mix[j] = nk / static_cast<double>(n);
            Row mean = fit.means[j];
            for (std::size_t d = 0; d < kPoseDims; ++d) {
                if (wsum[d] > 0.0) {
                    mean[d] = sum[d] / wsum[d];
                }
            }
            Row sq{};
            for (std::size_t i = 0; i < n; ++i) {
                const double r = fit.responsibilities[i][j];
                for (std::size_t d = 0; d < kPoseDims; ++d) {
                    const double diff = x.coords(i)[d] - mean[d];
                    sq[d] += r * x.weights(i)[d] * diff * diff;
                }
            }
            for (std::size_t d = 0; d < kPoseDims; ++d) {
                if (wsum[d] > 0.0) {
                    fit.variances[j][d] = std::max(sq[d] / wsum[d], kGmmVarianceFloor);
                }
            }
            fit.means[j] = mean;
        }
    }
    return fit;
}

KeyPoseSet gmm_cluster(std::span<const NormalizedPose> poses, const ClusterConfig& cfg) {
    const GmmFit fit = fit_gmm(poses, cfg);
    const std::size_t n = poses.size();
    const std::size_t k = cfg.k;

    std::vector<std::size_t> slots(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = fit.responsibilities[i];
        slots[i] = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
    }
    // Log density of each pose under each component. Responsibilities of
    // well-separated components saturate at 1, so density breaks those ties.
    const PoseMatrix x(poses);
    const auto& kern = simd::active();
    std::vector<std::vector<double>> density(n, std::vector<double>(k));
    for (std::size_t j = 0; j < k; ++j) {
        Row inv_var, log_norm;
        for (std::size_t d = 0; d < kPoseDims; ++d) {
            inv_var[d] = 1.0 / fit.variances[j][d];
            log_norm[d] = kLog2Pi + std::log(fit.variances[j][d]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            density[i][j] = -0.5 * (kern.dot(x.weights(i), log_norm.data(), kPoseDims) +
                                    kern.weighted_sq_dist(x.coords(i), x.weights(i),
                                                          fit.means[j].data(), inv_var.data(),
                                                          kPoseDims));
        }
    }
    // Components pick in order; a pose already taken cannot be picked twice.
    // Preference: own members, then responsibility, then density.
    std::vector<std::size_t> medoids(k, n);
    std::vector<char> taken(n, 0);
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) {
                continue;
            }
            if (best == n) {
                best = i;
                continue;
            }
            const bool member = slots[i] == j, best_member = slots[best] == j;
            const double r = fit.responsibilities[i][j], rb = fit.responsibilities[best][j];
            if (member != best_member ? member
                                      : (r != rb ? r > rb : density[i][j] > density[best][j])) {
                best = i;
            }
        }
        medoids[j] = best;
        taken[best] = 1;
        slots[best] = j;
    }
    return detail::finalize(poses, x, std::move(medoids), std::move(slots));
}

KeyPoseSet cluster_poses(std::span<const NormalizedPose> poses, const ClusterConfig& cfg) {
    switch (cfg.method) {
        case ClusterMethod::pam: return pam_cluster(poses, cfg);
        case ClusterMethod::kmeans: return kmeans_cluster(poses, cfg);
        case ClusterMethod::gmm: return gmm_cluster(poses, cfg);
    }
    throw ConfigError("unknown clustering method");
}

}  // namespace grar
