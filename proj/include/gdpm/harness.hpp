#pragma once

#include <string>
#include <vector>

#include "gdpm/core.hpp"
#include "gdpm/dataio.hpp"
#include "gdpm/metrics.hpp"

namespace gdpm {

// Penalty-sweep protocol: per beta, decay lambda from the single-cluster
// maximum distortion and average K / NMI / max distortion over shuffles.
struct SweepConfig {
    std::vector<double> betas;
    FKind f_kind = FKind::PowerMean;  // PowerMean (a = 0) or LogSumExp
    DivergenceSpec div;
    int n_shuffles = 10;
    std::uint64_t seed = 0;
    double lambda_decay = 1.01;
    double k_cap_multiplier = 3.0;
    ClusteringConfig fit_cfg;  // lambda/optimizer fields are overwritten per cell
};

struct SweepCell {
    double beta = 0.0;
    double lambda = 0.0;
    double mean_k = 0.0;
    double mean_nmi = 0.0;
    double mean_maxdist = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    double d_hat_m = 0.0;  // initial lambda: max single-cluster max distortion
    int k_true = 0;
};

FSpec sweep_fspec(FKind kind, double beta);

SweepResult run_sweep(const Dataset& ds, const SweepConfig& cfg);

void write_sweep_csv(const std::string& path, const SweepResult& result);

// Block-quantization pipeline: blockify, optionally RMS-scale the block
// coordinates, cluster, replace each block by its center, rebuild the image.
struct QuantizeConfig {
    FSpec f;
    DivergenceSpec div;
    ClusteringConfig fit_cfg;
    bool standardize = true;
};

struct QuantizeResult {
    Image image;
    int k = 0;
    double compression_ratio = 0.0;  // 100 * K / n_blocks, percent
    DistortionStats stats;           // in clustering (scaled) space
    int newton_failures = 0;
};

QuantizeResult quantize(const Image& img, const QuantizeConfig& cfg);

}  // namespace gdpm
