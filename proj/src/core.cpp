#include "gdpm/core.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gdpm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStallDist = 1e-15;

// f(z) with -inf at z + a = 0 for beta <= 0 instead of an error; the solver
// treats such objectives as degenerate rather than aborting.
double f_eval_ext(const FSpec& f, double z) {
    if (f.kind == FKind::PowerMean && z + f.a == 0.0 && f.beta <= 0.0) {
        return -kInf;
    }
    return f_eval(f, z);
}

std::vector<int> members_of(const ClusterState& state, int k) {
    std::vector<int> m;
    for (int i = 0; i < static_cast<int>(state.labels.size()); ++i) {
        if (state.labels[i] == k) m.push_back(i);
    }
    return m;
}

double cluster_loss_plain(const FSpec& f, const DivergenceSpec& div,
                          const Mat& data, const std::vector<int>& members,
                          const Vec& theta) {
    double s = 0.0;
    for (int i : members) s += f_eval_ext(f, div.eval(data.row(i), theta));
    return s;
}

// Strictly increasing transform of the restricted loss, finite even where
// sum f(d_i) overflows (power mean / log-sum-exp with large beta).
double cluster_loss_stab(const FSpec& f, const DivergenceSpec& div,
                         const Mat& data, const std::vector<int>& members,
                         const Vec& theta) {
    if (f.kind == FKind::Linear ||
        (f.kind == FKind::PowerMean && (f.beta == 0.0 || f.beta == 1.0)) ||
        (f.kind == FKind::LogSumExp && f.beta == 1.0)) {
        return cluster_loss_plain(f, div, data, members, theta);
    }
    double sgn = 1.0;
    std::vector<double> terms;
    terms.reserve(members.size());
    if (f.kind == FKind::PowerMean) {
        sgn = f.beta > 0.0 ? 1.0 : -1.0;
        for (int i : members) {
            double za = div.eval(data.row(i), theta) + f.a;
            terms.push_back(za > 0.0 ? f.beta * std::log(za) : -kInf);
        }
    } else {
        sgn = f.beta > 1.0 ? 1.0 : -1.0;
        for (int i : members) {
            terms.push_back((f.beta - 1.0) * div.eval(data.row(i), theta));
        }
    }
    double m = -kInf;
    for (double t : terms) m = std::max(m, t);
    if (m == -kInf) return sgn * -kInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return sgn * (m + std::log(s));
}

double min_member_distance(const DivergenceSpec& div, const Mat& data,
                           const std::vector<int>& members, const Vec& theta) {
    double dmin = kInf;
    for (int i : members) dmin = std::min(dmin, div.eval(data.row(i), theta));
    return dmin;
}

Vec member_mean(const Mat& data, const std::vector<int>& members) {
    Vec m = Vec::Zero(data.cols());
    for (int i : members) m += data.row(i).transpose();
    return m / static_cast<double>(members.size());
}

// One weighted-mean application; weights are normalized by the largest f'
// so that extreme beta never overflows. Assumes the stall case was handled.
Vec weighted_step(const FSpec& f, const DivergenceSpec& div, const Mat& data,
                  const std::vector<int>& members, const Vec& theta) {
    const int m = static_cast<int>(members.size());
    std::vector<double> logfp(m);
    double maxlog = -kInf;
    for (int j = 0; j < m; ++j) {
        logfp[j] = f_log_prime(f, div.eval(data.row(members[j]), theta));
        maxlog = std::max(maxlog, logfp[j]);
    }
    if (!std::isfinite(maxlog)) {
        throw OverlapStallError("infinite weight in weighted update");
    }
    if (div.is_tbd()) {
        const Eigen::Index L = theta.size();
        Vec num = Vec::Zero(L);
        double den = 0.0;
        for (int j = 0; j < m; ++j) {
            Vec x = data.row(members[j]).transpose();
            double w = std::exp(logfp[j] - maxlog) * div.tbd_scale(x);
            for (Eigen::Index l = 0; l < L; ++l) {
                num[l] += w * div.gen.phi_d1(x[l]);
            }
            den += w;
        }
        Vec out(L);
        for (Eigen::Index l = 0; l < L; ++l) {
            out[l] = div.gen.phi_d1_inv(num[l] / den);
        }
        return out;
    }
    Vec num = Vec::Zero(theta.size());
    double den = 0.0;
    for (int j = 0; j < m; ++j) {
        double w = std::exp(logfp[j] - maxlog);
        num += w * data.row(members[j]).transpose();
        den += w;
    }
    return num / den;
}

bool center_valid(const ConvexGenerator& gen, const Vec& theta) {
    for (Eigen::Index l = 0; l < theta.size(); ++l) {
        if (!gen.center_in_domain(theta[l])) return false;
    }
    return true;
}

Vec newton_step(const FSpec& f, const DivergenceSpec& div, const Mat& data,
                const std::vector<int>& members, const Vec& theta) {
    const Eigen::Index L = theta.size();
    const int m = static_cast<int>(members.size());

    std::vector<double> logfp(m), d(m);
    double maxlog = -kInf;
    for (int j = 0; j < m; ++j) {
        d[j] = div.eval(data.row(members[j]), theta);
        logfp[j] = f_log_prime(f, d[j]);
        maxlog = std::max(maxlog, logfp[j]);
    }
    if (maxlog == -kInf) return theta;
    if (maxlog == kInf) {
        throw OverlapStallError("infinite weight in Newton update");
    }

    // Gradient and Hessian of the restricted loss, scaled by 1/max f'.
    // The Newton direction is invariant to the common scale.
    Vec grad = Vec::Zero(L);
    Mat hess = Mat::Zero(L, L);
    for (int j = 0; j < m; ++j) {
        Vec x = data.row(members[j]).transpose();
        double w = std::exp(logfp[j] - maxlog);
        Vec g = div.grad_theta(x, theta);
        Vec h = div.hess_diag_theta(x, theta);
        grad += w * g;
        // a member at d = 0 has w = 0 but an infinite f''/f' ratio; its
        // curvature term is 0 * inf * (0 outer product) and must drop out
        double c = w * f_prime_ratio(f, d[j]);
        if (std::isfinite(c) && c != 0.0) hess += c * (g * g.transpose());
        hess.diagonal() += w * h;
    }
    if (grad.lpNorm<Eigen::Infinity>() < 1e-15) return theta;

    // Regularize until the factorization succeeds.
    double diag_scale = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
    double tau = 0.0;
    Eigen::LLT<Mat> llt;
    for (;;) {
        Mat h_reg = hess;
        h_reg.diagonal().array() += tau;
        llt.compute(h_reg);
        if (llt.info() == Eigen::Success) break;
        tau = tau == 0.0 ? 1e-10 * diag_scale : 2.0 * tau;
        if (!std::isfinite(tau)) {
            throw LineSearchFailure("Newton Hessian regularization diverged");
        }
    }
    Vec p = -llt.solve(grad);

    // Backtrack against the plain restricted loss when it is finite; the
    // stabilized transform only takes over where sum f(d_i) overflows.
    double v0_plain = cluster_loss_plain(f, div, data, members, theta);
    bool use_plain = std::isfinite(v0_plain);
    double v0 = use_plain ? v0_plain
                          : cluster_loss_stab(f, div, data, members, theta);
    double t = 1.0;
    for (int h = 0; h < 60; ++h) {
        if ((t * p).lpNorm<Eigen::Infinity>() < 1e-14) return theta;
        Vec cand = theta + t * p;
        if (center_valid(div.gen, cand)) {
            double v = use_plain ? cluster_loss_plain(f, div, data, members, cand)
                                 : cluster_loss_stab(f, div, data, members, cand);
            if (v < v0) return cand;
        }
        t *= 0.5;
    }
    throw LineSearchFailure("Newton backtracking exhausted 60 halvings");
}

struct RefineResult {
    Vec theta;
    int newton_failures = 0;
};

RefineResult refine_center(const FSpec& f, const DivergenceSpec& div,
                           const Mat& data, const std::vector<int>& members,
                           Vec theta, double delta, int max_inner,
                           Optimizer opt, OverlapPolicy policy) {
    RefineResult res;
    if (opt == Optimizer::Newton) {
        double prev_plain = cluster_loss_plain(f, div, data, members, theta);
        double prev_stab = cluster_loss_stab(f, div, data, members, theta);
        for (int it = 0; it < max_inner; ++it) {
            Vec next;
            try {
                next = newton_step(f, div, data, members, theta);
            } catch (const LineSearchFailure&) {
                ++res.newton_failures;
                break;
            }
            if (next == theta) break;
            theta = std::move(next);
            double plain = cluster_loss_plain(f, div, data, members, theta);
            double stab = cluster_loss_stab(f, div, data, members, theta);
            bool done;
            if (std::isfinite(prev_plain) && std::isfinite(plain)) {
                done = prev_plain - plain < delta;
            } else {
                done = prev_stab - stab < delta;
            }
            prev_plain = plain;
            prev_stab = stab;
            if (done) break;
        }
        res.theta = std::move(theta);
        return res;
    }

    // Weighted-mean path (Theorem-backed for linear/concave f).
    double loss = cluster_loss_plain(f, div, data, members, theta);
    bool shifted = false;
    Vec stall_theta;
    double stall_loss = kInf;
    for (int it = 0; it < max_inner; ++it) {
        if (f.prime_unbounded_at_zero() &&
            min_member_distance(div, data, members, theta) < kStallDist) {
            if (members.size() == 1) break;  // singleton optimum
            if (policy == OverlapPolicy::Error) {
                throw OverlapStallError("center overlaps a member point and f'(0) = inf");
            }
            if (shifted) break;  // reconverged onto a point after the shift
            shifted = true;
            stall_theta = theta;
            stall_loss = loss;
            theta = member_mean(data, members);
            loss = cluster_loss_plain(f, div, data, members, theta);
            continue;
        }
        Vec next = weighted_step(f, div, data, members, theta);
        double next_loss = cluster_loss_plain(f, div, data, members, next);
        theta = std::move(next);
        if (next_loss == -kInf) {
            loss = next_loss;
            break;
        }
        bool done = loss - next_loss < delta;
        loss = next_loss;
        if (done) break;
    }
    // The shift itself carries no descent guarantee; keep the stalled center
    // if the post-shift refinement did not actually improve on it.
    if (shifted && !(loss <= stall_loss)) {
        theta = stall_theta;
    }
    res.theta = std::move(theta);
    return res;
}

double objective_ext(const FSpec& f, const DivergenceSpec& div, const Mat& data,
                     const ClusterState& state, double lambda) {
    double s = 0.0;
    for (int i = 0; i < static_cast<int>(state.labels.size()); ++i) {
        s += f_eval_ext(f, div.eval(data.row(i), state.centers[state.labels[i]]));
    }
    return s + f_eval(f, lambda) * static_cast<double>(state.cluster_count());
}

}  // namespace

Optimizer default_optimizer(const FSpec& f) {
    return f.shape() == FShape::Convex ? Optimizer::Newton
                                       : Optimizer::WeightedMean;
}

double objective_eval(const FSpec& f, const DivergenceSpec& div, const Mat& data,
                      const ClusterState& state, double lambda) {
    if (static_cast<Eigen::Index>(state.labels.size()) != data.rows()) {
        throw DimensionMismatch("label count does not match data rows");
    }
    double s = 0.0;
    for (int i = 0; i < static_cast<int>(state.labels.size()); ++i) {
        s += f_eval(f, div.eval(data.row(i), state.centers[state.labels[i]]));
    }
    return s + f_eval(f, lambda) * static_cast<double>(state.cluster_count());
}

void assign_step(const DivergenceSpec& div, const Mat& data, ClusterState& state,
                 double lambda) {
    const int n = static_cast<int>(data.rows());
    for (int i = 0; i < n; ++i) {
        Vec x = data.row(i).transpose();
        double dmin = kInf;
        int kmin = 0;
        for (int k = 0; k < state.cluster_count(); ++k) {
            double d = div.eval(x, state.centers[k]);
            if (d < dmin) {
                dmin = d;
                kmin = k;
            }
        }
        if (dmin > lambda) {
            state.centers.push_back(x);
            state.labels[i] = state.cluster_count() - 1;
        } else {
            state.labels[i] = kmin;
        }
    }
    // Prune clusters emptied by reassignment, compacting labels.
    std::vector<int> count(state.centers.size(), 0);
    for (int lab : state.labels) ++count[lab];
    std::vector<int> remap(state.centers.size(), -1);
    std::vector<Vec> kept;
    for (int k = 0; k < state.cluster_count(); ++k) {
        if (count[k] > 0) {
            remap[k] = static_cast<int>(kept.size());
            kept.push_back(std::move(state.centers[k]));
        }
    }
    state.centers = std::move(kept);
    for (int& lab : state.labels) lab = remap[lab];
}

Vec center_update_weighted(const FSpec& f, const DivergenceSpec& div,
                           const Mat& data, const ClusterState& state, int k) {
    auto members = members_of(state, k);
    if (members.empty()) throw EmptyClusterError("weighted update of an empty cluster");
    const Vec& theta = state.centers[k];
    if (f.prime_unbounded_at_zero() &&
        min_member_distance(div, data, members, theta) < kStallDist) {
        throw OverlapStallError("center overlaps a member point and f'(0) = inf");
    }
    return weighted_step(f, div, data, members, theta);
}

Vec center_update_newton(const FSpec& f, const DivergenceSpec& div,
                         const Mat& data, const ClusterState& state, int k) {
    auto members = members_of(state, k);
    if (members.empty()) throw EmptyClusterError("Newton update of an empty cluster");
    return newton_step(f, div, data, members, state.centers[k]);
}

Vec resolve_overlap(const FSpec& f, const DivergenceSpec& div, const Mat& data,
                    const ClusterState& state, int k) {
    (void)f;
    (void)div;
    auto members = members_of(state, k);
    if (members.empty()) throw EmptyClusterError("overlap resolution of an empty cluster");
    if (members.size() == 1) return state.centers[k];
    return member_mean(data, members);
}

FitResult fit(const FSpec& f, const DivergenceSpec& div, const Mat& data,
              const ClusteringConfig& config, const TraceFn& trace) {
    const int n = static_cast<int>(data.rows());
    if (n < 1) throw EmptyDatasetError("fit requires at least one data point");
    for (int i = 0; i < n; ++i) div.gen.check_data(data.row(i));
    if (config.lambda <= 0.0) throw DomainError("lambda must be positive");
    if (config.optimizer == Optimizer::WeightedMean && f.shape() == FShape::Convex) {
        throw Error("weighted-mean updates require linear or concave f; use Newton");
    }
    const double delta = config.delta > 0.0
                             ? config.delta
                             : 1e-6 * static_cast<double>(n);

    FitResult res;
    ClusterState& state = res.state;
    state.labels.assign(n, 0);
    state.centers.push_back(data.colwise().mean().transpose());

    auto refine_all = [&]() {
        for (int k = 0; k < state.cluster_count(); ++k) {
            auto members = members_of(state, k);
            auto r = refine_center(f, div, data, members, state.centers[k], delta,
                                   config.max_inner_iter, config.optimizer,
                                   config.overlap_policy);
            state.centers[k] = std::move(r.theta);
            res.newton_failures += r.newton_failures;
            if (trace) trace("refine", objective_ext(f, div, data, state, config.lambda));
        }
    };

    refine_all();  // initial single-cluster refinement

    double prev_obj = objective_ext(f, div, data, state, config.lambda);
    std::vector<int> prev_labels = state.labels;
    for (int t = 0; t < config.max_outer_iter; ++t) {
        ++res.iterations;
        assign_step(div, data, state, config.lambda);
        if (trace) trace("assign", objective_ext(f, div, data, state, config.lambda));
        refine_all();
        double obj = objective_ext(f, div, data, state, config.lambda);
        bool labels_same = state.labels == prev_labels;
        bool obj_converged = std::isfinite(obj) && std::isfinite(prev_obj) &&
                             prev_obj - obj < delta;
        prev_obj = obj;
        prev_labels = state.labels;
        if (obj_converged || labels_same) {
            res.converged = true;
            break;
        }
    }

    res.objective = prev_obj;
    res.avg_distortion = 0.0;
    res.max_distortion = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = div.eval(data.row(i), state.centers[state.labels[i]]);
        res.avg_distortion += d;
        res.max_distortion = std::max(res.max_distortion, d);
    }
    res.avg_distortion /= static_cast<double>(n);
    return res;
}

Vec refine_single_cluster(const FSpec& f, const DivergenceSpec& div,
                          const Mat& data, double tol, int max_iter,
                          Optimizer opt) {
    std::vector<int> members(data.rows());
    for (int i = 0; i < static_cast<int>(data.rows()); ++i) members[i] = i;
    Vec theta = data.colwise().mean().transpose();
    auto r = refine_center(f, div, data, members, std::move(theta), tol, max_iter,
                           opt, OverlapPolicy::ShiftToClusterMean);
    return r.theta;
}

}  // namespace gdpm
