#pragma once

#include <vector>

#include "gdpm/core.hpp"

namespace gdpm {

// NMI(C, A) = I(C, A) / sqrt(H(C) H(A)), natural-log plug-in estimates.
// If either labeling has zero entropy, returns 1 when the partitions are
// identical and 0 otherwise.
double nmi(const std::vector<int>& c, const std::vector<int>& a);

struct DistortionStats {
    double avg = 0.0;
    double max = 0.0;
};

DistortionStats distortion_stats(const DivergenceSpec& div, const Mat& data,
                                 const ClusterState& state);

}  // namespace gdpm
