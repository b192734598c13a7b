#pragma once

#include <span>

#include "gdpm/errors.hpp"

namespace gdpm {

enum class FKind { Linear, PowerMean, LogSumExp };
enum class FShape { Linear, Concave, Convex };

// Monotone increasing f defining the f-separable distortion measure.
struct FSpec {
    FKind kind = FKind::Linear;
    double beta = 1.0;
    double a = 0.0;  // PowerMean offset

    static FSpec linear();
    static FSpec power_mean(double beta, double a = 0.0);
    static FSpec log_sum_exp(double beta);

    FShape shape() const;
    // True when f'(z) -> inf as z -> 0 (power mean with a = 0, beta < 1);
    // a center sitting on a data point then never moves under weighted updates.
    bool prime_unbounded_at_zero() const;
};

double f_eval(const FSpec& spec, double z);
double f_prime(const FSpec& spec, double z);
double f_second(const FSpec& spec, double z);
double f_inverse(const FSpec& spec, double y);
double f_mean(const FSpec& spec, std::span<const double> values);

// log f'(z); finite even where f' itself overflows a double.
double f_log_prime(const FSpec& spec, double z);
// f''(z) / f'(z).
double f_prime_ratio(const FSpec& spec, double z);

// Dimension-averaged divergences rescale the log-sum-exp parameter.
double effective_beta(double beta_star, int dims);

}  // namespace gdpm
