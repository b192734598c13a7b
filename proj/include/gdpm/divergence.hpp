#pragma once

#include <Eigen/Core>
#include <optional>

#include "gdpm/errors.hpp"

namespace gdpm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class GeneratorKind { SquaredDistance, Alpha, ExpLoss, Binomial };

// Strictly convex scalar generator phi. All divergences are built per
// coordinate from phi and summed over dimensions.
struct ConvexGenerator {
    GeneratorKind kind = GeneratorKind::SquaredDistance;
    double alpha = 2.0;   // Alpha only
    int binomial_n = 1;   // Binomial only

    static ConvexGenerator squared_distance();
    static ConvexGenerator alpha_div(double alpha);
    static ConvexGenerator exp_loss();
    static ConvexGenerator binomial(int n);

    double phi(double x) const;
    double phi_d1(double x) const;
    double phi_d2(double x) const;
    double phi_d3(double x) const;
    // Inverse of phi' (needed by the total-Bregman center update).
    double phi_d1_inv(double y) const;

    // Closed-form scalar divergence d_phi(x, theta).
    double d_scalar(double x, double theta) const;

    // True when the domain of phi is all of R.
    bool whole_line_domain() const;
    // Data points may sit on the closed domain boundary (binomial: x in {0, N});
    // centers must stay strictly interior with a 1e-12 guard.
    bool data_in_domain(double x) const;
    bool center_in_domain(double theta) const;

    void check_data(const Vec& x) const;
    void check_center(const Vec& theta) const;
};

struct DivergenceSpec {
    ConvexGenerator gen;
    std::optional<double> tbd_c;  // total-Bregman wrapper when set
    bool dim_average = false;

    bool is_tbd() const { return tbd_c.has_value(); }

    // d(x, theta), optionally divided by the dimension count.
    double eval(const Vec& x, const Vec& theta) const;
    // Gradient of d with respect to theta.
    Vec grad_theta(const Vec& x, const Vec& theta) const;
    // The Hessian with respect to theta is diagonal; entries only.
    Vec hess_diag_theta(const Vec& x, const Vec& theta) const;

    // 1 / sqrt(1 + c^2 ||grad phi(x)||^2); 1 for plain Bregman divergences.
    double tbd_scale(const Vec& x) const;
};

}  // namespace gdpm
