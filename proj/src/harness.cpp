#include "gdpm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace gdpm {

FSpec sweep_fspec(FKind kind, double beta) {
    switch (kind) {
        case FKind::Linear:
            return FSpec::linear();
        case FKind::PowerMean:
            return FSpec::power_mean(beta);
        case FKind::LogSumExp:
            return FSpec::log_sum_exp(beta);
    }
    return FSpec::linear();
}

SweepResult run_sweep(const Dataset& ds, const SweepConfig& cfg) {
    if (cfg.betas.empty()) throw DomainError("sweep needs a nonempty beta grid");
    if (cfg.lambda_decay <= 1.0) throw DomainError("lambda decay must exceed 1");
    if (cfg.n_shuffles < 1) throw DomainError("sweep needs at least one shuffle");
    if (!ds.true_labels) throw DomainError("sweep needs true labels for NMI");

    SweepResult res;
    res.k_true = static_cast<int>(
        std::set<int>(ds.true_labels->begin(), ds.true_labels->end()).size());

    // Step 1: the largest single-cluster maximum distortion over the beta grid
    // seeds the lambda schedule.
    for (double beta : cfg.betas) {
        FSpec f = sweep_fspec(cfg.f_kind, beta);
        Vec theta = refine_single_cluster(f, cfg.div, ds.data, 1e-9, 100000,
                                          default_optimizer(f));
        for (Eigen::Index i = 0; i < ds.data.rows(); ++i) {
            res.d_hat_m = std::max(res.d_hat_m, cfg.div.eval(ds.data.row(i), theta));
        }
    }

    // Shuffled copies are fixed per shuffle index and shared across betas so
    // columns of the grid are comparable.
    std::vector<Dataset> shuffled;
    shuffled.reserve(cfg.n_shuffles);
    for (int s = 0; s < cfg.n_shuffles; ++s) {
        shuffled.push_back(shuffle(ds, cfg.seed + static_cast<std::uint64_t>(s)));
    }

    const double k_cap = cfg.k_cap_multiplier * static_cast<double>(res.k_true);
    for (double beta : cfg.betas) {
        FSpec f = sweep_fspec(cfg.f_kind, beta);
        ClusteringConfig fit_cfg = cfg.fit_cfg;
        fit_cfg.optimizer = default_optimizer(f);
        double lambda = res.d_hat_m;
        for (;;) {
            SweepCell cell;
            cell.beta = beta;
            cell.lambda = lambda;
            fit_cfg.lambda = lambda;
            for (const Dataset& sds : shuffled) {
                FitResult r = fit(f, cfg.div, sds.data, fit_cfg);
                cell.mean_k += r.state.cluster_count();
                cell.mean_nmi += nmi(r.state.labels, *sds.true_labels);
                cell.mean_maxdist += r.max_distortion;
            }
            const double ns = static_cast<double>(cfg.n_shuffles);
            cell.mean_k /= ns;
            cell.mean_nmi /= ns;
            cell.mean_maxdist /= ns;
            res.cells.push_back(cell);
            if (cell.mean_k > k_cap) break;
            lambda /= cfg.lambda_decay;
        }
    }
    return res;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write sweep CSV: " + path);
    out << "beta,lambda,mean_k,mean_nmi,mean_maxdist\n";
    out.precision(6);
    for (const auto& c : result.cells) {
        out << c.beta << ',' << c.lambda << ',' << c.mean_k << ',' << c.mean_nmi
            << ',' << c.mean_maxdist << '\n';
    }
    if (!out) throw IoError("failed writing sweep CSV: " + path);
}

QuantizeResult quantize(const Image& img, const QuantizeConfig& cfg) {
    ImageBlocks blocks = blockify(img);
    const Eigen::Index n = blocks.blocks.rows();

    // Scale per coordinate by RMS; constant-zero coordinates keep scale 1 so
    // flat image regions do not abort the pipeline.
    Vec scale = Vec::Ones(blocks.blocks.cols());
    Mat work = blocks.blocks;
    if (cfg.standardize) {
        Vec rms = column_rms(blocks.blocks);
        for (Eigen::Index j = 0; j < rms.size(); ++j) {
            if (rms[j] > 0.0) scale[j] = rms[j];
        }
        work = blocks.blocks.array().rowwise() / scale.transpose().array();
    }

    QuantizeResult res;
    FitResult r = fit(cfg.f, cfg.div, work, cfg.fit_cfg);
    res.k = r.state.cluster_count();
    res.newton_failures = r.newton_failures;
    res.compression_ratio = 100.0 * static_cast<double>(res.k) /
                            static_cast<double>(n);
    res.stats = distortion_stats(cfg.div, work, r.state);

    ImageBlocks quantized = blocks;
    for (Eigen::Index i = 0; i < n; ++i) {
        Vec center = r.state.centers[r.state.labels[i]].cwiseProduct(scale);
        quantized.blocks.row(i) = center.transpose();
    }
    res.image = deblockify(quantized);
    return res;
}

}  // namespace gdpm
