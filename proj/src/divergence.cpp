#include "gdpm/divergence.hpp"

#include <cmath>
#include <limits>

namespace gdpm {

namespace {

constexpr double kBoundaryGuard = 1e-12;

bool is_positive_even_integer(double a) {
    if (a <= 0.0) return false;
    double r = std::round(a);
    if (std::abs(a - r) > 0.0) return false;
    return std::fmod(r, 2.0) == 0.0;
}

// x ln(x/y) with the 0 ln 0 = 0 convention.
double xlogx_over(double x, double y) {
    if (x == 0.0) return 0.0;
    return x * std::log(x / y);
}

// Odd-integer root, valid for negative bases.
double signed_root(double base, double inv_exponent) {
    if (base >= 0.0) return std::pow(base, 1.0 / inv_exponent);
    return -std::pow(-base, 1.0 / inv_exponent);
}

}  // namespace

ConvexGenerator ConvexGenerator::squared_distance() {
    return {GeneratorKind::SquaredDistance};
}

ConvexGenerator ConvexGenerator::alpha_div(double alpha) {
    ConvexGenerator g;
    g.kind = GeneratorKind::Alpha;
    g.alpha = alpha;
    return g;
}

ConvexGenerator ConvexGenerator::exp_loss() {
    ConvexGenerator g;
    g.kind = GeneratorKind::ExpLoss;
    return g;
}

ConvexGenerator ConvexGenerator::binomial(int n) {
    if (n <= 0) throw DomainError("binomial generator requires N >= 1");
    ConvexGenerator g;
    g.kind = GeneratorKind::Binomial;
    g.binomial_n = n;
    return g;
}

bool ConvexGenerator::whole_line_domain() const {
    switch (kind) {
        case GeneratorKind::SquaredDistance:
        case GeneratorKind::ExpLoss:
            return true;
        case GeneratorKind::Alpha:
            return is_positive_even_integer(alpha);
        case GeneratorKind::Binomial:
            return false;
    }
    return false;
}

bool ConvexGenerator::data_in_domain(double x) const {
    if (kind == GeneratorKind::Binomial) {
        return x >= 0.0 && x <= static_cast<double>(binomial_n);
    }
    if (whole_line_domain()) return std::isfinite(x);
    return x > 0.0;
}

bool ConvexGenerator::center_in_domain(double theta) const {
    if (kind == GeneratorKind::Binomial) {
        return theta > kBoundaryGuard &&
               theta < static_cast<double>(binomial_n) - kBoundaryGuard;
    }
    if (whole_line_domain()) return std::isfinite(theta);
    return theta > kBoundaryGuard;
}

void ConvexGenerator::check_data(const Vec& x) const {
    for (Eigen::Index l = 0; l < x.size(); ++l) {
        if (!data_in_domain(x[l])) {
            throw DomainError("data coordinate outside generator domain");
        }
    }
}

void ConvexGenerator::check_center(const Vec& theta) const {
    for (Eigen::Index l = 0; l < theta.size(); ++l) {
        if (!center_in_domain(theta[l])) {
            throw DomainError("center coordinate outside generator domain");
        }
    }
}

double ConvexGenerator::phi(double x) const {
    switch (kind) {
        case GeneratorKind::SquaredDistance:
            return x * x;
        case GeneratorKind::Alpha:
            if (alpha == 0.0) return -std::log(x) + x - 1.0;
            if (alpha == 1.0) return xlogx_over(x, 1.0) - x + 1.0;
            return std::pow(x, alpha) / (alpha * (alpha - 1.0)) -
                   x / (alpha - 1.0) + 1.0 / alpha;
        case GeneratorKind::ExpLoss:
            return std::exp(x);
        case GeneratorKind::Binomial: {
            double n = static_cast<double>(binomial_n);
            return xlogx_over(x, 1.0) + xlogx_over(n - x, 1.0);
        }
    }
    return 0.0;
}

double ConvexGenerator::phi_d1(double x) const {
    switch (kind) {
        case GeneratorKind::SquaredDistance:
            return 2.0 * x;
        case GeneratorKind::Alpha:
            if (alpha == 0.0) return 1.0 - 1.0 / x;
            if (alpha == 1.0) return std::log(x);
            return (std::pow(x, alpha - 1.0) - 1.0) / (alpha - 1.0);
        case GeneratorKind::ExpLoss:
            return std::exp(x);
        case GeneratorKind::Binomial:
            return std::log(x / (static_cast<double>(binomial_n) - x));
    }
    return 0.0;
}

double ConvexGenerator::phi_d2(double x) const {
    switch (kind) {
        case GeneratorKind::SquaredDistance:
            return 2.0;
        case GeneratorKind::Alpha:
            if (alpha == 0.0) return 1.0 / (x * x);
            if (alpha == 1.0) return 1.0 / x;
            return std::pow(x, alpha - 2.0);
        case GeneratorKind::ExpLoss:
            return std::exp(x);
        case GeneratorKind::Binomial: {
            double n = static_cast<double>(binomial_n);
            return 1.0 / x + 1.0 / (n - x);
        }
    }
    return 0.0;
}

double ConvexGenerator::phi_d3(double x) const {
    switch (kind) {
        case GeneratorKind::SquaredDistance:
            return 0.0;
        case GeneratorKind::Alpha:
            if (alpha == 0.0) return -2.0 / (x * x * x);
            if (alpha == 1.0) return -1.0 / (x * x);
            return (alpha - 2.0) * std::pow(x, alpha - 3.0);
        case GeneratorKind::ExpLoss:
            return std::exp(x);
        case GeneratorKind::Binomial: {
            double n = static_cast<double>(binomial_n);
            return -1.0 / (x * x) + 1.0 / ((n - x) * (n - x));
        }
    }
    return 0.0;
}

double ConvexGenerator::phi_d1_inv(double y) const {
    switch (kind) {
        case GeneratorKind::SquaredDistance:
            return y / 2.0;
        case GeneratorKind::Alpha: {
            if (alpha == 0.0) {
                if (y >= 1.0) throw RangeError("phi' inverse: argument >= 1");
                return 1.0 / (1.0 - y);
            }
            if (alpha == 1.0) return std::exp(y);
            double base = 1.0 + (alpha - 1.0) * y;
            if (whole_line_domain()) return signed_root(base, alpha - 1.0);
            if (base <= 0.0) throw RangeError("phi' inverse: out of range");
            return std::pow(base, 1.0 / (alpha - 1.0));
        }
        case GeneratorKind::ExpLoss:
            if (y <= 0.0) throw RangeError("phi' inverse: nonpositive argument");
            return std::log(y);
        case GeneratorKind::Binomial:
            return static_cast<double>(binomial_n) / (1.0 + std::exp(-y));
    }
    return 0.0;
}

double ConvexGenerator::d_scalar(double x, double theta) const {
    if (x == theta) return 0.0;
    double d = 0.0;
    switch (kind) {
        case GeneratorKind::SquaredDistance:
            d = (x - theta) * (x - theta);
            break;
        case GeneratorKind::Alpha:
            if (alpha == 0.0) {
                d = x / theta - std::log(x / theta) - 1.0;
            } else if (alpha == 1.0) {
                d = xlogx_over(x, theta) - (x - theta);
            } else {
                d = (std::pow(x, alpha) + (alpha - 1.0) * std::pow(theta, alpha) -
                     alpha * x * std::pow(theta, alpha - 1.0)) /
                    (alpha * (alpha - 1.0));
            }
            break;
        case GeneratorKind::ExpLoss: {
            double et = std::exp(theta);
            d = std::exp(x) - et - et * (x - theta);
            break;
        }
        case GeneratorKind::Binomial: {
            double n = static_cast<double>(binomial_n);
            d = xlogx_over(x, theta) + xlogx_over(n - x, n - theta);
            break;
        }
    }
    // Rounding can drive near-identical arguments a few ulps negative.
    return d < 0.0 ? 0.0 : d;
}

double DivergenceSpec::tbd_scale(const Vec& x) const {
    if (!is_tbd()) return 1.0;
    double c = *tbd_c;
    double s = 0.0;
    for (Eigen::Index l = 0; l < x.size(); ++l) {
        double g = gen.phi_d1(x[l]);
        s += g * g;
    }
    return 1.0 / std::sqrt(1.0 + c * c * s);
}

double DivergenceSpec::eval(const Vec& x, const Vec& theta) const {
    if (x.size() != theta.size()) {
        throw DimensionMismatch("divergence arguments differ in length");
    }
    gen.check_data(x);
    gen.check_center(theta);
    double sum = 0.0;
    if (is_tbd()) {
        // tBD(x, theta) = d_phi(theta, x) / sqrt(1 + c^2 ||grad phi(x)||^2)
        for (Eigen::Index l = 0; l < x.size(); ++l) {
            sum += gen.d_scalar(theta[l], x[l]);
        }
        sum *= tbd_scale(x);
    } else {
        for (Eigen::Index l = 0; l < x.size(); ++l) {
            sum += gen.d_scalar(x[l], theta[l]);
        }
    }
    if (dim_average) sum /= static_cast<double>(x.size());
    return sum;
}

Vec DivergenceSpec::grad_theta(const Vec& x, const Vec& theta) const {
    if (x.size() != theta.size()) {
        throw DimensionMismatch("divergence arguments differ in length");
    }
    gen.check_data(x);
    gen.check_center(theta);
    Vec g(theta.size());
    double scale = dim_average ? 1.0 / static_cast<double>(x.size()) : 1.0;
    if (is_tbd()) {
        scale *= tbd_scale(x);
        for (Eigen::Index l = 0; l < x.size(); ++l) {
            g[l] = scale * (gen.phi_d1(theta[l]) - gen.phi_d1(x[l]));
        }
    } else {
        for (Eigen::Index l = 0; l < x.size(); ++l) {
            g[l] = -scale * gen.phi_d2(theta[l]) * (x[l] - theta[l]);
        }
    }
    return g;
}

Vec DivergenceSpec::hess_diag_theta(const Vec& x, const Vec& theta) const {
    if (x.size() != theta.size()) {
        throw DimensionMismatch("divergence arguments differ in length");
    }
    gen.check_data(x);
    gen.check_center(theta);
    Vec h(theta.size());
    double scale = dim_average ? 1.0 / static_cast<double>(x.size()) : 1.0;
    if (is_tbd()) {
        scale *= tbd_scale(x);
        for (Eigen::Index l = 0; l < x.size(); ++l) {
            h[l] = scale * gen.phi_d2(theta[l]);
        }
    } else {
        for (Eigen::Index l = 0; l < x.size(); ++l) {
            h[l] = scale * (gen.phi_d2(theta[l]) -
                            gen.phi_d3(theta[l]) * (x[l] - theta[l]));
        }
    }
    return h;
}

}  // namespace gdpm
