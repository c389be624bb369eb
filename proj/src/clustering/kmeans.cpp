#include <limits>

#include "finalize.hpp"
#include "grar/clustering.hpp"
#include "grar/rng.hpp"
#include "grar/simd/kernels.hpp"

namespace grar {

namespace {

using Centroid = std::array<double, kPoseDims>;

double sq_dist(const PoseMatrix& x, std::size_t i, const Centroid& c) {
    return simd::active().masked_sq_dist(x.coords(i), x.weights(i), c.data(), kPoseDims);
}

Centroid centroid_of(const PoseMatrix& x, std::size_t i) {
    Centroid c{};
    std::copy(x.coords(i), x.coords(i) + kPoseDims, c.begin());
    return c;
}

std::size_t nearest_centroid(const PoseMatrix& x, std::size_t i,
                             const std::vector<Centroid>& centroids, double* dist) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < centroids.size(); ++j) {
        const double v = sq_dist(x, i, centroids[j]);
        if (v < best) {
            best = v;
            best_j = j;
        }
    }
    if (dist != nullptr) {
        *dist = best;
    }
    return best_j;
}

// Greedy farthest-point seeding from a seeded first point.
std::vector<Centroid> seed_centroids(const PoseMatrix& x, std::size_t k, std::size_t first) {
    const std::size_t n = x.size();
    std::vector<Centroid> centroids{centroid_of(x, first)};
    std::vector<char> chosen(n, 0);
    chosen[first] = 1;
    std::vector<double> closest(n);
    for (std::size_t i = 0; i < n; ++i) {
        closest[i] = sq_dist(x, i, centroids[0]);
    }
    while (centroids.size() < k) {
        std::size_t pick = n;
        double far = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!chosen[i] && closest[i] > far) {
                far = closest[i];
                pick = i;
            }
        }
        chosen[pick] = 1;
        centroids.push_back(centroid_of(x, pick));
        for (std::size_t i = 0; i < n; ++i) {
            closest[i] = std::min(closest[i], sq_dist(x, i, centroids.back()));
        }
    }
    return centroids;
}

KMeansFit lloyd(const PoseMatrix& x, std::vector<Centroid> centroids, std::size_t max_iters) {
    const std::size_t n = x.size();
    const std::size_t k = centroids.size();
    KMeansFit fit;
    std::vector<std::size_t> assign(n, k);
    std::vector<double> dist(n);

    for (std::size_t iter = 0; iter < std::max<std::size_t>(max_iters, 1); ++iter) {
        bool changed = false;
        std::vector<std::size_t> count(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = nearest_centroid(x, i, centroids, &dist[i]);
            changed |= (j != assign[i]);
            assign[i] = j;
            ++count[j];
        }
        // Refill empty clusters with the point farthest from its centroid,
        // taken only from clusters that can spare a member.
        for (std::size_t j = 0; j < k; ++j) {
            if (count[j] != 0) {
                continue;
            }
            std::size_t pick = n;
            double far = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (count[assign[i]] > 1 && dist[i] > far) {
                    far = dist[i];
                    pick = i;
                }
            }
            --count[assign[pick]];
            assign[pick] = j;
            count[j] = 1;
            dist[pick] = 0.0;
            centroids[j] = centroid_of(x, pick);
            ++fit.reseeds;
            changed = true;
        }
        fit.iterations = iter + 1;
        if (!changed) {
            break;
        }
        std::vector<Centroid> sum(k, Centroid{});
        std::vector<Centroid> weight(k, Centroid{});
        for (std::size_t i = 0; i < n; ++i) {
            const double* c = x.coords(i);
            const double* w = x.weights(i);
            for (std::size_t d = 0; d < kPoseDims; ++d) {
                sum[assign[i]][d] += w[d] * c[d];
                weight[assign[i]][d] += w[d];
            }
        }
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t d = 0; d < kPoseDims; ++d) {
                if (weight[j][d] > 0.0) {
                    centroids[j][d] = sum[j][d] / weight[j][d];
                }
            }
        }
    }
    fit.sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fit.sse += sq_dist(x, i, centroids[assign[i]]);
    }
    fit.centroids = std::move(centroids);
    fit.assignments = std::move(assign);
    return fit;
}

}  // namespace

KMeansFit fit_kmeans(std::span<const NormalizedPose> poses, const ClusterConfig& cfg) {
    detail::check_k(cfg.k, poses.size());
    if (cfg.restarts == 0) {
        throw ConfigError("restarts must be at least 1");
    }
    const PoseMatrix x(poses);
    KMeansFit best;
    best.sse = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        Rng rng(derive_seed(cfg.seed, r));
        const std::size_t first = rng.below(poses.size());
        KMeansFit fit = lloyd(x, seed_centroids(x, cfg.k, first), cfg.max_iters);
        if (fit.sse < best.sse) {
            best = std::move(fit);
        }
    }
    return best;
}

KeyPoseSet kmeans_cluster(std::span<const NormalizedPose> poses, const ClusterConfig& cfg) {
    const KMeansFit fit = fit_kmeans(poses, cfg);
    const PoseMatrix x(poses);
    std::vector<std::size_t> medoids(cfg.k, poses.size());
    std::vector<double> best(cfg.k, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < poses.size(); ++i) {
        const std::size_t j = fit.assignments[i];
        const double v = sq_dist(x, i, fit.centroids[j]);
        if (v < best[j]) {
            best[j] = v;
            medoids[j] = i;
        }
    }
    return detail::finalize(poses, x, std::move(medoids), fit.assignments);
}

}  // namespace grar
