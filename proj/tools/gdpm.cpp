#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gdpm/harness.hpp"
#include "gdpm/influence.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gdpm;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct DivOpts {
    std::string div = "sqdist";
    double alpha = 2.0;
    int binomial_n = 1;
    double tbd_c = -1.0;  // < 0 -> plain Bregman
    bool dim_average = false;
};

struct FOpts {
    std::string f = "pow";
    double beta = 1.0;
    double beta_star = 0.0;  // > 0 overrides beta via the dimension rescale
    double a = 0.0;
};

void add_div_opts(CLI::App* cmd, DivOpts& o) {
    cmd->add_option("--div", o.div, "Divergence: sqdist|alpha|exploss|binomial")
        ->check(CLI::IsMember({"sqdist", "alpha", "exploss", "binomial"}));
    cmd->add_option("--alpha", o.alpha, "Alpha-divergence parameter");
    cmd->add_option("--binomial-n", o.binomial_n, "Binomial trial count N");
    cmd->add_option("--tbd-c", o.tbd_c, "Total-Bregman constant c (enables tBD)");
    cmd->add_flag("--dim-average", o.dim_average,
                  "Average the divergence over dimensions");
}

void add_f_opts(CLI::App* cmd, FOpts& o) {
    cmd->add_option("--f", o.f, "Distortion transform: linear|pow|lse")
        ->check(CLI::IsMember({"linear", "pow", "lse"}));
    cmd->add_option("--beta", o.beta, "Transform parameter beta");
    cmd->add_option("--beta-star", o.beta_star,
                    "Target beta before dimension-averaging rescale (lse)");
    cmd->add_option("--a", o.a, "Power-mean offset a >= 0");
}

DivergenceSpec make_div(const DivOpts& o) {
    DivergenceSpec d;
    if (o.div == "sqdist") {
        d.gen = ConvexGenerator::squared_distance();
    } else if (o.div == "alpha") {
        d.gen = ConvexGenerator::alpha_div(o.alpha);
    } else if (o.div == "exploss") {
        d.gen = ConvexGenerator::exp_loss();
    } else {
        d.gen = ConvexGenerator::binomial(o.binomial_n);
    }
    if (o.tbd_c >= 0.0) d.tbd_c = o.tbd_c;
    d.dim_average = o.dim_average;
    return d;
}

FSpec make_f(const FOpts& o, int dims, double* eff_beta_out = nullptr) {
    double beta = o.beta;
    if (o.beta_star > 0.0) beta = effective_beta(o.beta_star, dims);
    if (eff_beta_out) *eff_beta_out = beta;
    if (o.f == "linear") return FSpec::linear();
    if (o.f == "pow") return FSpec::power_mean(beta, o.a);
    return FSpec::log_sum_exp(beta);
}

Dataset load_dataset(const std::string& input, const std::string& label,
                     const std::string& label_map_path, bool standardize_flag) {
    LabelMap map;
    if (!label_map_path.empty()) map = load_label_map(label_map_path);
    Dataset ds = load_csv(input, label, map);
    if (standardize_flag) ds = standardize(ds);
    return ds;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

int run_cluster(const std::string& input, const std::string& label,
                const std::string& label_map, bool std_flag, const FOpts& fo,
                const DivOpts& dvo, double lambda, double delta,
                const std::string& out_dir) {
    Dataset ds = load_dataset(input, label, label_map, std_flag);
    DivergenceSpec div = make_div(dvo);
    double eff_beta = 0.0;
    FSpec f = make_f(fo, static_cast<int>(ds.data.cols()), &eff_beta);

    ClusteringConfig cfg;
    cfg.lambda = lambda;
    cfg.delta = delta;
    cfg.optimizer = default_optimizer(f);
    FitResult r = fit(f, div, ds.data, cfg);

    json out;
    out["k"] = r.state.cluster_count();
    out["labels"] = r.state.labels;
    std::vector<std::vector<double>> centers;
    for (const Vec& c : r.state.centers) {
        centers.emplace_back(c.data(), c.data() + c.size());
    }
    out["centers"] = centers;
    out["objective"] = r.objective;
    out["avg_distortion"] = r.avg_distortion;
    out["max_distortion"] = r.max_distortion;
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    out["newton_failures"] = r.newton_failures;
    out["metadata"] = {{"f", fo.f},
                       {"effective_beta", eff_beta},
                       {"a", fo.a},
                       {"divergence", dvo.div},
                       {"lambda", lambda},
                       {"dropped_rows", ds.dropped_rows}};
    if (ds.true_labels) out["nmi"] = nmi(r.state.labels, *ds.true_labels);

    if (out_dir.empty()) {
        std::cout << out.dump(2) << '\n';
    } else {
        fs::create_directories(out_dir);
        write_json(fs::path(out_dir) / "result.json", out);
    }
    return r.newton_failures > 0 ? kExitNumerical : 0;
}

int run_sweep_cmd(const std::string& input, const std::string& label,
                  const std::string& label_map, bool std_flag,
                  const std::string& f_kind, const DivOpts& dvo,
                  double beta_min, double beta_max, double beta_step,
                  int shuffles, bool paper_scale, std::uint64_t seed,
                  double decay, double k_cap, double delta,
                  const std::string& out_dir) {
    Dataset ds = load_dataset(input, label, label_map, std_flag);
    SweepConfig cfg;
    cfg.div = make_div(dvo);
    cfg.f_kind = f_kind == "lse" ? FKind::LogSumExp : FKind::PowerMean;
    for (double b = beta_min; b <= beta_max + 1e-9; b += beta_step) {
        cfg.betas.push_back(b);
    }
    cfg.n_shuffles = paper_scale ? 100 : shuffles;
    cfg.seed = seed;
    cfg.lambda_decay = decay;
    cfg.k_cap_multiplier = k_cap;
    cfg.fit_cfg.delta = delta;

    SweepResult res = run_sweep(ds, cfg);
    fs::create_directories(out_dir.empty() ? "." : out_dir);
    fs::path csv = fs::path(out_dir.empty() ? "." : out_dir) / "sweep.csv";
    write_sweep_csv(csv.string(), res);
    std::cout << "wrote " << csv.string() << " (" << res.cells.size()
              << " cells, initial lambda " << res.d_hat_m << ")\n";
    return 0;
}

int run_influence_cmd(const FOpts& fo, const DivOpts& dvo,
                      std::vector<double> betas, double theta, double x_min,
                      double x_max, int points, const std::string& out_dir) {
    DivergenceSpec div = make_div(dvo);
    if (betas.empty()) betas.push_back(fo.beta);
    fs::create_directories(out_dir.empty() ? "." : out_dir);
    fs::path dir(out_dir.empty() ? "." : out_dir);

    json report = json::array();
    for (double beta : betas) {
        FOpts one = fo;
        one.beta = beta;
        FSpec f = make_f(one, 1);
        double exclude = f.prime_unbounded_at_zero() ? 1e-6 : 0.0;
        auto grid = curve_grid(theta, x_min, x_max, points, exclude);
        auto curve = influence_curve_1d(f, div, theta, grid);

        std::ostringstream name;
        name << "curve_" << fo.f << "_" << dvo.div << "_beta" << beta << ".csv";
        std::ofstream out(dir / name.str());
        if (!out) throw IoError("cannot write curve file");
        out << "x_star,value\n";
        out.precision(6);
        for (const auto& p : curve) out << p.x_star << ',' << p.value << '\n';

        json entry = {{"f", fo.f}, {"beta", beta}, {"divergence", dvo.div},
                      {"curve_file", name.str()}};
        try {
            entry["robustness"] = robustness_name(classify_robustness(f, div));
        } catch (const UnsupportedPairError& e) {
            entry["robustness"] = "unsupported";
            entry["note"] = e.what();
        }
        report.push_back(entry);
    }
    write_json(dir / "influence_report.json", report);
    std::cout << "wrote " << report.size() << " curve file(s) to "
              << dir.string() << '\n';
    return 0;
}

int run_quantize_cmd(const std::string& image_path, const FOpts& fo,
                     const DivOpts& dvo, double lambda, double delta,
                     bool std_flag, const std::string& out_dir) {
    Image img = load_ppm(image_path);
    QuantizeConfig cfg;
    cfg.div = make_div(dvo);
    cfg.f = make_f(fo, 192);
    cfg.standardize = std_flag;
    cfg.fit_cfg.lambda = lambda;
    cfg.fit_cfg.delta = delta;
    cfg.fit_cfg.optimizer = default_optimizer(cfg.f);

    QuantizeResult res = quantize(img, cfg);
    fs::create_directories(out_dir.empty() ? "." : out_dir);
    fs::path dir(out_dir.empty() ? "." : out_dir);
    save_ppm((dir / "quantized.ppm").string(), res.image);

    json stats = {{"k", res.k},
                  {"n_blocks", res.image.width / 8 * (res.image.height / 8)},
                  {"compression_ratio_percent", res.compression_ratio},
                  {"avg_distortion", res.stats.avg},
                  {"max_distortion", res.stats.max},
                  {"newton_failures", res.newton_failures}};
    write_json(dir / "stats.json", stats);
    std::cout << stats.dump(2) << '\n';
    return res.newton_failures > 0 ? kExitNumerical : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized DP-means clustering for f-separable distortions"};
    app.require_subcommand(1);

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Single clustering run");
    std::string input, label, label_map, out_dir;
    bool std_flag = false;
    FOpts fo;
    DivOpts dvo;
    double lambda = 1.0, delta = 0.0;
    cluster->add_option("--input", input, "CSV dataset")->required();
    cluster->add_option("--label", label, "Label column (name or index)");
    cluster->add_option("--label-map", label_map, "Label mapping CSV");
    cluster->add_flag("--standardize", std_flag, "Divide columns by RMS");
    add_f_opts(cluster, fo);
    add_div_opts(cluster, dvo);
    cluster->add_option("--lambda", lambda, "Cluster-creation penalty")->required();
    cluster->add_option("--delta", delta, "Convergence threshold");
    cluster->add_option("--out-dir", out_dir, "Output directory (default stdout)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Penalty sweep over a beta grid");
    std::string s_input, s_label, s_label_map, s_out_dir = "sweep_out", s_f = "pow";
    bool s_std = false, paper_scale = false;
    DivOpts s_dvo;
    double beta_min = -2.0, beta_max = 5.0, beta_step = 0.1;
    int shuffles = 10;
    std::uint64_t seed = 0;
    double decay = 1.01, k_cap = 3.0, s_delta = 0.0;
    sweep->add_option("--input", s_input, "CSV dataset")->required();
    sweep->add_option("--label", s_label, "Label column")->required();
    sweep->add_option("--label-map", s_label_map, "Label mapping CSV");
    sweep->add_flag("--standardize", s_std, "Divide columns by RMS");
    sweep->add_option("--f", s_f, "Transform family: pow|lse")
        ->check(CLI::IsMember({"pow", "lse"}));
    add_div_opts(sweep, s_dvo);
    sweep->add_option("--beta-min", beta_min, "Beta grid start");
    sweep->add_option("--beta-max", beta_max, "Beta grid end");
    sweep->add_option("--beta-step", beta_step, "Beta grid step");
    sweep->add_option("--shuffles", shuffles, "Shuffle count");
    sweep->add_flag("--paper-scale", paper_scale, "Use 100 shuffles");
    sweep->add_option("--seed", seed, "Shuffle seed");
    sweep->add_option("--lambda-decay", decay, "Penalty decay factor (> 1)");
    sweep->add_option("--k-cap-multiplier", k_cap, "Stop at mean K > cap * K_true");
    sweep->add_option("--delta", s_delta, "Convergence threshold");
    sweep->add_option("--out-dir", s_out_dir, "Output directory");

    // influence
    auto* infl = app.add_subcommand("influence", "Influence curves + classification");
    FOpts i_fo;
    DivOpts i_dvo;
    std::vector<double> i_betas;
    double theta = 0.0, x_min = 0.0, x_max = 10.0;
    int points = 200;
    std::string i_out_dir = "influence_out";
    add_f_opts(infl, i_fo);
    add_div_opts(infl, i_dvo);
    infl->add_option("--betas", i_betas, "Beta values (one curve file each)");
    infl->add_option("--theta", theta, "Center location");
    infl->add_option("--x-min", x_min, "Grid start");
    infl->add_option("--x-max", x_max, "Grid end");
    infl->add_option("--points", points, "Grid size");
    infl->add_option("--out-dir", i_out_dir, "Output directory");

    // quantize
    auto* quant = app.add_subcommand("quantize", "Block-quantize a PPM image");
    std::string image_path, q_out_dir = "quantize_out";
    FOpts q_fo;
    DivOpts q_dvo;
    double q_lambda = 1.0, q_delta = 0.0;
    bool q_std = true;
    quant->add_option("--image", image_path, "PPM (P6) image")->required();
    add_f_opts(quant, q_fo);
    add_div_opts(quant, q_dvo);
    quant->add_option("--lambda", q_lambda, "Cluster-creation penalty")->required();
    quant->add_option("--delta", q_delta, "Convergence threshold");
    quant->add_flag("--standardize,!--no-standardize", q_std,
                    "Divide block coordinates by RMS (default on)");
    quant->add_option("--out-dir", q_out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cluster->parsed()) {
            return run_cluster(input, label, label_map, std_flag, fo, dvo, lambda,
                               delta, out_dir);
        }
        if (sweep->parsed()) {
            return run_sweep_cmd(s_input, s_label, s_label_map, s_std, s_f, s_dvo,
                                 beta_min, beta_max, beta_step, shuffles,
                                 paper_scale, seed, decay, k_cap, s_delta,
                                 s_out_dir);
        }
        if (infl->parsed()) {
            return run_influence_cmd(i_fo, i_dvo, i_betas, theta, x_min, x_max,
                                     points, i_out_dir);
        }
        if (quant->parsed()) {
            return run_quantize_cmd(image_path, q_fo, q_dvo, q_lambda, q_delta,
                                    q_std, q_out_dir);
        }
    } catch (const IoError& e) {
        std::cerr << "error (io): " << e.what() << '\n';
        return kExitInput;
    } catch (const EmptyDatasetError& e) {
        std::cerr << "error (empty-dataset): " << e.what() << '\n';
        return kExitInput;
    } catch (const BadDimensionsError& e) {
        std::cerr << "error (bad-dimensions): " << e.what() << '\n';
        return kExitInput;
    } catch (const ZeroVarianceError& e) {
        std::cerr << "error (zero-variance): " << e.what() << '\n';
        return kExitInput;
    } catch (const DomainError& e) {
        std::cerr << "error (domain): " << e.what() << '\n';
        return kExitInput;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error (dimension-mismatch): " << e.what() << '\n';
        return kExitInput;
    } catch (const LengthMismatch& e) {
        std::cerr << "error (length-mismatch): " << e.what() << '\n';
        return kExitInput;
    } catch (const Error& e) {
        std::cerr << "error (numerical): " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
