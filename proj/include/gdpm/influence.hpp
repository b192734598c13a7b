#pragma once

#include <vector>

#include "gdpm/core.hpp"

namespace gdpm {

enum class RobustnessClass { Divergent, Bounded, Redescending };

const char* robustness_name(RobustnessClass c);

// IF(x*) = -m G^{-1} f'(d(x*, theta)) grad_theta d(x*, theta), with
// G = sum_i [ f''(d_i) g_i g_i^T + f'(d_i) diag(h_i) ].
Vec analytic_influence(const FSpec& f, const DivergenceSpec& div,
                       const Mat& cluster_data, const Vec& theta,
                       const Vec& x_star);

// m * (theta_tilde - theta): center shift from appending x_star, both centers
// refined to tolerance tol.
Vec empirical_influence(const FSpec& f, const DivergenceSpec& div,
                        const Mat& cluster_data, const Vec& x_star,
                        double tol = 1e-12);

// Closed-form decision tables for the asymptotic influence behavior.
// Throws UnsupportedPairError for pairs without a backing rule (binomial).
RobustnessClass classify_robustness(const FSpec& f, const DivergenceSpec& div);

struct CurvePoint {
    double x_star;
    double value;
};

// One-dimensional signed influence factor f'(d(x*, theta)) phi''(theta)
// (x* - theta) over the given grid. Exactly 0 at x* = theta.
std::vector<CurvePoint> influence_curve_1d(const FSpec& f,
                                           const DivergenceSpec& div,
                                           double theta,
                                           const std::vector<double>& grid);

// Log-spaced probe grid in (lo, hi]; excludes a delta-ball around theta so
// specs with unbounded f' near zero distortion stay evaluable.
std::vector<double> curve_grid(double theta, double lo, double hi, int points,
                               double exclude_delta = 0.0);

}  // namespace gdpm
