#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gdpm/divergence.hpp"

namespace gdpm {

struct Dataset {
    Mat data;
    std::optional<std::vector<int>> true_labels;
    std::vector<std::string> feature_names;
    int dropped_rows = 0;
};

using LabelMap = std::unordered_map<std::string, std::string>;

// Two-column CSV: from_label,to_label. Unmapped labels pass through.
LabelMap load_label_map(const std::string& path);

// Numeric CSV with optional header. Rows containing a missing or unparsable
// cell are dropped (counted in dropped_rows). label_column selects by header
// name, or by 0-based index when there is no header; mapped label strings are
// factorized to 0..K-1 in order of first appearance.
Dataset load_csv(const std::string& path, const std::string& label_column = "",
                 const LabelMap& label_map = {});

// Per-column RMS of ds.data.
Vec column_rms(const Mat& data);

// Divide each column by its root mean square (no centering).
Dataset standardize(const Dataset& ds);

// Deterministic row permutation (labels in lockstep).
Dataset shuffle(const Dataset& ds, std::uint64_t seed);

struct Image {
    int width = 0;
    int height = 0;
    std::vector<unsigned char> pixels;  // RGB, row-major
};

Image load_ppm(const std::string& path);
void save_ppm(const std::string& path, const Image& img);

struct ImageBlocks {
    Mat blocks;  // n x 192, one row per 8x8 block: pixels row-major, R,G,B each
    int block_rows = 0;
    int block_cols = 0;
};

ImageBlocks blockify(const Image& img);
Image deblockify(const ImageBlocks& blocks);

}  // namespace gdpm
