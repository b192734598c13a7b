#include "gdpm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace gdpm {

namespace {

// Partitions are identical up to label renaming.
bool same_partition(const std::vector<int>& c, const std::vector<int>& a) {
    std::map<int, int> fwd, bwd;
    for (size_t i = 0; i < c.size(); ++i) {
        auto f = fwd.emplace(c[i], a[i]);
        if (!f.second && f.first->second != a[i]) return false;
        auto b = bwd.emplace(a[i], c[i]);
        if (!b.second && b.first->second != c[i]) return false;
    }
    return true;
}

}  // namespace

double nmi(const std::vector<int>& c, const std::vector<int>& a) {
    if (c.size() != a.size()) throw LengthMismatch("labelings differ in length");
    if (c.empty()) throw EmptyDatasetError("nmi of empty labelings");
    const double n = static_cast<double>(c.size());

    std::map<int, int> cc, ca;
    std::map<std::pair<int, int>, int> joint;
    for (size_t i = 0; i < c.size(); ++i) {
        ++cc[c[i]];
        ++ca[a[i]];
        ++joint[{c[i], a[i]}];
    }

    // Sum in a canonical order so the result is bitwise symmetric in (c, a)
    // and invariant under label bijections.
    auto sorted_sum = [](std::vector<double>& terms) {
        std::sort(terms.begin(), terms.end());
        double s = 0.0;
        for (double t : terms) s += t;
        return s;
    };
    auto entropy = [&](const std::map<int, int>& counts) {
        std::vector<double> terms;
        terms.reserve(counts.size());
        for (const auto& [lab, cnt] : counts) {
            double p = cnt / n;
            terms.push_back(-p * std::log(p));
        }
        return sorted_sum(terms);
    };
    double hc = entropy(cc);
    double ha = entropy(ca);
    if (hc == 0.0 || ha == 0.0) return same_partition(c, a) ? 1.0 : 0.0;

    std::vector<double> terms;
    terms.reserve(joint.size());
    for (const auto& [key, cnt] : joint) {
        double pxy = cnt / n;
        double px = cc.at(key.first) / n;
        double py = ca.at(key.second) / n;
        terms.push_back(pxy * std::log(pxy / (px * py)));
    }
    double mi = sorted_sum(terms);
    return std::max(mi, 0.0) / std::sqrt(hc * ha);
}

DistortionStats distortion_stats(const DivergenceSpec& div, const Mat& data,
                                 const ClusterState& state) {
    if (static_cast<Eigen::Index>(state.labels.size()) != data.rows()) {
        throw DimensionMismatch("label count does not match data rows");
    }
    DistortionStats s;
    const int n = static_cast<int>(data.rows());
    for (int i = 0; i < n; ++i) {
        double d = div.eval(data.row(i), state.centers[state.labels[i]]);
        s.avg += d;
        s.max = std::max(s.max, d);
    }
    s.avg /= static_cast<double>(n);
    return s;
}

}  // namespace gdpm
