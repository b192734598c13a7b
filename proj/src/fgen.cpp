#include "gdpm/fgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gdpm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

FSpec FSpec::linear() { return {FKind::Linear, 1.0, 0.0}; }

FSpec FSpec::power_mean(double beta, double a) {
    if (a < 0.0) throw DomainError("power mean requires a >= 0");
    return {FKind::PowerMean, beta, a};
}

FSpec FSpec::log_sum_exp(double beta) { return {FKind::LogSumExp, beta, 0.0}; }

FShape FSpec::shape() const {
    if (kind == FKind::Linear) return FShape::Linear;
    if (beta < 1.0) return FShape::Concave;
    if (beta > 1.0) return FShape::Convex;
    return FShape::Linear;
}

bool FSpec::prime_unbounded_at_zero() const {
    return kind == FKind::PowerMean && a == 0.0 && beta < 1.0;
}

double f_eval(const FSpec& spec, double z) {
    switch (spec.kind) {
        case FKind::Linear:
            return z;
        case FKind::PowerMean: {
            double za = z + spec.a;
            if (za == 0.0 && spec.beta <= 0.0) {
                throw DomainError("power mean f undefined at z + a = 0 for beta <= 0");
            }
            if (spec.beta == 0.0) return std::log(za);
            return (std::pow(za, spec.beta) - 1.0) / spec.beta;
        }
        case FKind::LogSumExp: {
            double b1 = spec.beta - 1.0;
            if (b1 == 0.0) return z;
            return std::expm1(b1 * z) / b1;
        }
    }
    return 0.0;
}

double f_prime(const FSpec& spec, double z) {
    switch (spec.kind) {
        case FKind::Linear:
            return 1.0;
        case FKind::PowerMean: {
            double za = z + spec.a;
            if (za == 0.0 && spec.beta < 1.0) {
                throw InfiniteWeightError("f'(0) = inf for power mean with a = 0, beta < 1");
            }
            return std::pow(za, spec.beta - 1.0);
        }
        case FKind::LogSumExp:
            return std::exp((spec.beta - 1.0) * z);
    }
    return 0.0;
}

double f_second(const FSpec& spec, double z) {
    switch (spec.kind) {
        case FKind::Linear:
            return 0.0;
        case FKind::PowerMean:
            return (spec.beta - 1.0) * std::pow(z + spec.a, spec.beta - 2.0);
        case FKind::LogSumExp: {
            double b1 = spec.beta - 1.0;
            return b1 * std::exp(b1 * z);
        }
    }
    return 0.0;
}

double f_log_prime(const FSpec& spec, double z) {
    switch (spec.kind) {
        case FKind::Linear:
            return 0.0;
        case FKind::PowerMean: {
            double za = z + spec.a;
            if (za == 0.0) return spec.beta < 1.0 ? kInf : (spec.beta == 1.0 ? 0.0 : -kInf);
            return (spec.beta - 1.0) * std::log(za);
        }
        case FKind::LogSumExp:
            return (spec.beta - 1.0) * z;
    }
    return 0.0;
}

double f_prime_ratio(const FSpec& spec, double z) {
    switch (spec.kind) {
        case FKind::Linear:
            return 0.0;
        case FKind::PowerMean:
            return (spec.beta - 1.0) / (z + spec.a);
        case FKind::LogSumExp:
            return spec.beta - 1.0;
    }
    return 0.0;
}

double f_inverse(const FSpec& spec, double y) {
    constexpr double kSlack = 1e-12;
    double z = 0.0;
    switch (spec.kind) {
        case FKind::Linear:
            z = y;
            break;
        case FKind::PowerMean: {
            if (spec.beta == 0.0) {
                z = std::exp(y) - spec.a;
            } else {
                double t = spec.beta * y + 1.0;
                if (t <= 0.0) throw RangeError("f_inverse: argument outside range of f");
                z = std::pow(t, 1.0 / spec.beta) - spec.a;
            }
            break;
        }
        case FKind::LogSumExp: {
            double b1 = spec.beta - 1.0;
            if (b1 == 0.0) {
                z = y;
            } else {
                double t = b1 * y + 1.0;
                if (t <= 0.0) throw RangeError("f_inverse: argument outside range of f");
                z = std::log(t) / b1;
            }
            break;
        }
    }
    if (z < -kSlack * std::max(1.0, std::abs(y))) {
        throw RangeError("f_inverse: argument below f(0)");
    }
    return std::max(z, 0.0);
}

double f_mean(const FSpec& spec, std::span<const double> values) {
    if (values.empty()) throw DomainError("f_mean of an empty list");
    const double n = static_cast<double>(values.size());
    switch (spec.kind) {
        case FKind::Linear: {
            double s = 0.0;
            for (double z : values) s += z;
            return s / n;
        }
        case FKind::PowerMean: {
            // Power mean in log space; (z+a)^beta overflows for large beta.
            if (spec.beta == 0.0) {
                double s = 0.0;
                for (double z : values) {
                    double za = z + spec.a;
                    if (za == 0.0) throw DomainError("geometric f_mean with a zero element");
                    s += std::log(za);
                }
                return std::max(std::exp(s / n) - spec.a, 0.0);
            }
            double m = -kInf;
            for (double z : values) {
                double za = z + spec.a;
                if (za == 0.0 && spec.beta < 0.0) {
                    throw DomainError("power f_mean with a zero element and beta < 0");
                }
                if (za > 0.0) m = std::max(m, spec.beta * std::log(za));
            }
            if (m == -kInf) return 0.0;  // all elements at z + a = 0, beta > 0
            double s = 0.0;
            for (double z : values) {
                double za = z + spec.a;
                s += za > 0.0 ? std::exp(spec.beta * std::log(za) - m) : 0.0;
            }
            double log_pm = (m + std::log(s / n)) / spec.beta;
            return std::max(std::exp(log_pm) - spec.a, 0.0);
        }
        case FKind::LogSumExp: {
            double b1 = spec.beta - 1.0;
            if (b1 == 0.0) {
                double s = 0.0;
                for (double z : values) s += z;
                return s / n;
            }
            double m = -kInf;
            for (double z : values) m = std::max(m, b1 * z);
            double s = 0.0;
            for (double z : values) s += std::exp(b1 * z - m);
            return std::max((m + std::log(s / n)) / b1, 0.0);
        }
    }
    return 0.0;
}

double effective_beta(double beta_star, int dims) {
    if (dims < 1) throw DomainError("effective_beta requires dims >= 1");
    return (beta_star - 1.0) / static_cast<double>(dims) + 1.0;
}

}  // namespace gdpm
