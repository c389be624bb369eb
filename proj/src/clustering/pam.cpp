#include <limits>
#include <optional>

#include "finalize.hpp"
#include "grar/clustering.hpp"
#include "grar/rng.hpp"

namespace grar {

namespace {

struct PamRun {
    std::vector<std::size_t> medoids;
    double cost = std::numeric_limits<double>::infinity();
};

std::vector<std::size_t> random_medoids(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(pool[i], pool[i + rng.below(n - i)]);
    }
    pool.resize(k);
    return pool;
}

// Swap phase. Each candidate (slot, x) is scored exactly: every point takes the
// minimum of its distance to the surviving medoids and to x, summed in point
// order, so the accepted cost is bit-identical to a fresh assignment_cost().
PamRun swap_phase(const DistanceMatrix& d, std::vector<std::size_t> medoids) {
    const std::size_t n = d.size();
    const std::size_t k = medoids.size();
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> nearest(n), second(n);
    std::vector<std::size_t> nearest_slot(n);
    std::vector<char> is_medoid(n);

    double cost = d.assignment_cost(medoids);
    for (;;) {
        std::fill(is_medoid.begin(), is_medoid.end(), 0);
        for (std::size_t m : medoids) {
            is_medoid[m] = 1;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double b1 = inf, b2 = inf;
            std::size_t s1 = 0;
            for (std::size_t s = 0; s < k; ++s) {
                const double v = d(i, medoids[s]);
                if (v < b1) {
                    b2 = b1;
                    b1 = v;
                    s1 = s;
                } else if (v < b2) {
                    b2 = v;
                }
            }
            nearest[i] = b1;
            second[i] = b2;
            nearest_slot[i] = s1;
        }

        double best_cost = cost;
        std::optional<std::pair<std::size_t, std::size_t>> best_swap;
        for (std::size_t slot = 0; slot < k; ++slot) {
            for (std::size_t x = 0; x < n; ++x) {
                if (is_medoid[x]) {
                    continue;
                }
                double total = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double keep = nearest_slot[i] == slot ? second[i] : nearest[i];
                    total += std::min(keep, d(i, x));
                }
                if (total < best_cost) {
                    best_cost = total;
                    best_swap = {slot, x};
                }
            }
        }
        if (!best_swap) {
            break;
        }
        medoids[best_swap->first] = best_swap->second;
        cost = best_cost;
    }
    return {std::move(medoids), cost};
}

}  // namespace

KeyPoseSet pam_cluster(std::span<const NormalizedPose> poses, const ClusterConfig& cfg) {
    detail::check_k(cfg.k, poses.size());
    if (cfg.restarts == 0) {
        throw ConfigError("restarts must be at least 1");
    }
    const PoseMatrix packed(poses);
    const DistanceMatrix d(packed);

    PamRun best;
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        Rng rng(derive_seed(cfg.seed, r));
        PamRun run = swap_phase(d, random_medoids(poses.size(), cfg.k, rng));
        if (run.cost < best.cost) {
            best = std::move(run);
        }
    }
    std::vector<std::size_t> slots;
    d.assignment_cost(best.medoids, &slots);
    return detail::finalize(poses, packed, std::move(best.medoids), std::move(slots));
}

}  // namespace grar
