#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gdpm/divergence.hpp"
#include "gdpm/fgen.hpp"

namespace gdpm {

enum class Optimizer { WeightedMean, Newton };
enum class OverlapPolicy { ShiftToClusterMean, Error };

Optimizer default_optimizer(const FSpec& f);

struct ClusteringConfig {
    double lambda = 1.0;
    double delta = 0.0;  // <= 0 picks the default 1e-6 * n
    int max_outer_iter = 300;
    int max_inner_iter = 100;
    Optimizer optimizer = Optimizer::WeightedMean;
    OverlapPolicy overlap_policy = OverlapPolicy::ShiftToClusterMean;
    std::uint64_t rng_seed = 0;
};

struct ClusterState {
    std::vector<Vec> centers;
    std::vector<int> labels;
    int cluster_count() const { return static_cast<int>(centers.size()); }
};

struct FitResult {
    ClusterState state;
    double objective = 0.0;
    double avg_distortion = 0.0;
    double max_distortion = 0.0;
    int iterations = 0;
    bool converged = false;
    int newton_failures = 0;
};

// Observer for step-level objective values; phases are "assign" and "refine".
using TraceFn = std::function<void(const std::string& phase, double objective)>;

// Eq.-style total objective: sum_i f(d(x_i, theta_{c(i)})) + f(lambda) K.
double objective_eval(const FSpec& f, const DivergenceSpec& div, const Mat& data,
                      const ClusterState& state, double lambda);

// One sequential assignment pass; spawns a cluster at x_i whenever
// min_k d(x_i, theta_k) > lambda. Empty clusters are pruned afterwards.
void assign_step(const DivergenceSpec& div, const Mat& data, ClusterState& state,
                 double lambda);

// One application of the f'-weighted mean update (or its total-Bregman
// gradient-space analogue) for cluster k.
Vec center_update_weighted(const FSpec& f, const DivergenceSpec& div,
                           const Mat& data, const ClusterState& state, int k);

// One damped, descent-guaranteed Newton step for cluster k.
Vec center_update_newton(const FSpec& f, const DivergenceSpec& div,
                         const Mat& data, const ClusterState& state, int k);

// Shift a stalled center to the unweighted member mean (ShiftToClusterMean).
Vec resolve_overlap(const FSpec& f, const DivergenceSpec& div, const Mat& data,
                    const ClusterState& state, int k);

FitResult fit(const FSpec& f, const DivergenceSpec& div, const Mat& data,
              const ClusteringConfig& config, const TraceFn& trace = nullptr);

// Inner center refinement for one cluster holding all given rows; used by
// the influence analysis, which needs a single tightly converged center.
Vec refine_single_cluster(const FSpec& f, const DivergenceSpec& div,
                          const Mat& data, double tol, int max_iter = 100000,
                          Optimizer opt = Optimizer::WeightedMean);

}  // namespace gdpm
