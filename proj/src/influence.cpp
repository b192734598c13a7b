#include "gdpm/influence.hpp"

#include <Eigen/LU>

#include <cmath>

namespace gdpm {

namespace {

// Does f'(z) -> 0 as z -> inf? (Drives the redescending branch for tBD.)
bool prime_vanishes_at_infinity(const FSpec& f) {
    switch (f.kind) {
        case FKind::Linear:
            return false;
        case FKind::PowerMean:
            return f.beta < 1.0;
        case FKind::LogSumExp:
            return f.beta < 1.0;
    }
    return false;
}

RobustnessClass classify_power_mean_alpha(double beta, double alpha) {
    if (alpha < 1.0) {
        if (beta > 0.0) return RobustnessClass::Divergent;
        if (beta == 0.0) return RobustnessClass::Bounded;
        return RobustnessClass::Redescending;
    }
    if (alpha == 1.0) {
        return beta > 0.0 ? RobustnessClass::Divergent
                          : RobustnessClass::Redescending;
    }
    double crit = 1.0 - 1.0 / alpha;
    if (beta > crit) return RobustnessClass::Divergent;
    if (beta == crit) return RobustnessClass::Bounded;
    return RobustnessClass::Redescending;
}

RobustnessClass classify_power_mean_exp_loss(double beta) {
    if (beta >= 1.0) return RobustnessClass::Divergent;
    if (beta == 0.0) return RobustnessClass::Bounded;  // worst case over directions
    return RobustnessClass::Redescending;
}

}  // namespace

const char* robustness_name(RobustnessClass c) {
    switch (c) {
        case RobustnessClass::Divergent:
            return "divergent";
        case RobustnessClass::Bounded:
            return "bounded";
        case RobustnessClass::Redescending:
            return "redescending";
    }
    return "unknown";
}

Vec analytic_influence(const FSpec& f, const DivergenceSpec& div,
                       const Mat& cluster_data, const Vec& theta,
                       const Vec& x_star) {
    const int m = static_cast<int>(cluster_data.rows());
    const Eigen::Index L = theta.size();
    Mat g_mat = Mat::Zero(L, L);
    for (int i = 0; i < m; ++i) {
        Vec x = cluster_data.row(i).transpose();
        double d = div.eval(x, theta);
        Vec g = div.grad_theta(x, theta);
        Vec h = div.hess_diag_theta(x, theta);
        g_mat += f_second(f, d) * (g * g.transpose());
        g_mat.diagonal() += f_prime(f, d) * h;
    }
    Eigen::FullPivLU<Mat> lu(g_mat);
    if (!lu.isInvertible()) {
        throw SingularGError("influence matrix G is singular");
    }
    double d_star = div.eval(x_star, theta);
    Vec rhs = f_prime(f, d_star) * div.grad_theta(x_star, theta);
    return -static_cast<double>(m) * lu.solve(rhs);
}

Vec empirical_influence(const FSpec& f, const DivergenceSpec& div,
                        const Mat& cluster_data, const Vec& x_star,
                        double tol) {
    const int m = static_cast<int>(cluster_data.rows());
    Optimizer opt = default_optimizer(f);
    Vec theta = refine_single_cluster(f, div, cluster_data, tol, 100000, opt);
    Mat extended(m + 1, cluster_data.cols());
    extended.topRows(m) = cluster_data;
    extended.row(m) = x_star.transpose();
    Vec theta_tilde = refine_single_cluster(f, div, extended, tol, 100000, opt);
    return static_cast<double>(m) * (theta_tilde - theta);
}

RobustnessClass classify_robustness(const FSpec& f, const DivergenceSpec& div) {
    if (div.gen.kind == GeneratorKind::Binomial) {
        throw UnsupportedPairError(
            "no robustness rule for the binomial loss (outliers cannot diverge)");
    }
    if (div.is_tbd()) {
        if (f.shape() == FShape::Convex) return RobustnessClass::Divergent;
        return prime_vanishes_at_infinity(f) ? RobustnessClass::Redescending
                                             : RobustnessClass::Bounded;
    }
    switch (f.kind) {
        case FKind::Linear:
            return RobustnessClass::Divergent;
        case FKind::LogSumExp:
            return f.beta < 1.0 ? RobustnessClass::Redescending
                                : RobustnessClass::Divergent;
        case FKind::PowerMean:
            switch (div.gen.kind) {
                case GeneratorKind::SquaredDistance:
                    return classify_power_mean_alpha(f.beta, 2.0);
                case GeneratorKind::Alpha:
                    return classify_power_mean_alpha(f.beta, div.gen.alpha);
                case GeneratorKind::ExpLoss:
                    return classify_power_mean_exp_loss(f.beta);
                case GeneratorKind::Binomial:
                    break;  // handled above
            }
            break;
    }
    throw UnsupportedPairError("no robustness rule for this (f, divergence) pair");
}

std::vector<CurvePoint> influence_curve_1d(const FSpec& f,
                                           const DivergenceSpec& div,
                                           double theta,
                                           const std::vector<double>& grid) {
    Vec th(1);
    th[0] = theta;
    std::vector<CurvePoint> out;
    out.reserve(grid.size());
    double phi2 = div.gen.phi_d2(theta);
    for (double x : grid) {
        if (x == theta) {
            out.push_back({x, 0.0});
            continue;
        }
        Vec xv(1);
        xv[0] = x;
        double d = div.eval(xv, th);
        out.push_back({x, f_prime(f, d) * phi2 * (x - theta)});
    }
    return out;
}

std::vector<double> curve_grid(double theta, double lo, double hi, int points,
                               double exclude_delta) {
    if (points < 2 || !(hi > lo)) throw DomainError("bad curve grid spec");
    std::vector<double> g;
    g.reserve(points);
    bool geometric = lo > 0.0 && hi / lo > 100.0;
    for (int i = 0; i < points; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(points - 1);
        double x = geometric ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
        if (exclude_delta > 0.0 && std::abs(x - theta) <= exclude_delta) continue;
        g.push_back(x);
    }
    return g;
}

}  // namespace gdpm
