#include "gdpm/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace gdpm {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            cells.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(trim(cur));
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty() || s == "?") return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace

LabelMap load_label_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open label map: " + path);
    LabelMap map;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 2) throw IoError("label map rows need 2 columns");
        map[cells[0]] = cells[1];
    }
    return map;
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const LabelMap& label_map) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV: " + path);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw EmptyDatasetError("CSV has no rows: " + path);

    // Header detection: any cell in the first row that is not a number.
    bool has_header = false;
    for (const auto& cell : rows[0]) {
        double v;
        if (!parse_double(cell, v) && cell != "?") {
            has_header = true;
            break;
        }
    }

    const size_t ncols = rows[0].size();
    Dataset ds;
    size_t first_data = 0;
    if (has_header) {
        ds.feature_names = rows[0];
        first_data = 1;
    }

    int label_idx = -1;
    if (!label_column.empty()) {
        if (has_header) {
            for (size_t j = 0; j < ncols; ++j) {
                if (rows[0][j] == label_column) {
                    label_idx = static_cast<int>(j);
                    break;
                }
            }
        }
        if (label_idx < 0) {
            int idx = 0;
            auto [p, ec] = std::from_chars(
                label_column.data(), label_column.data() + label_column.size(), idx);
            if (ec == std::errc{} && p == label_column.data() + label_column.size() &&
                idx >= 0 && idx < static_cast<int>(ncols)) {
                label_idx = idx;
            } else {
                throw IoError("label column not found: " + label_column);
            }
        }
        if (has_header) {
            ds.feature_names.erase(ds.feature_names.begin() + label_idx);
        }
    }

    std::vector<std::vector<double>> feats;
    std::vector<std::string> raw_labels;
    for (size_t r = first_data; r < rows.size(); ++r) {
        if (rows[r].size() != ncols) {
            ++ds.dropped_rows;
            continue;
        }
        std::vector<double> feat;
        feat.reserve(ncols);
        std::string lab;
        bool ok = true;
        for (size_t j = 0; j < ncols; ++j) {
            if (static_cast<int>(j) == label_idx) {
                lab = rows[r][j];
                if (lab.empty() || lab == "?") ok = false;
                continue;
            }
            double v;
            if (!parse_double(rows[r][j], v)) {
                ok = false;
                break;
            }
            feat.push_back(v);
        }
        if (!ok) {
            ++ds.dropped_rows;
            continue;
        }
        feats.push_back(std::move(feat));
        if (label_idx >= 0) raw_labels.push_back(std::move(lab));
    }
    if (feats.empty()) throw EmptyDatasetError("all CSV rows dropped: " + path);

    ds.data.resize(static_cast<Eigen::Index>(feats.size()),
                   static_cast<Eigen::Index>(feats[0].size()));
    for (size_t i = 0; i < feats.size(); ++i) {
        for (size_t j = 0; j < feats[i].size(); ++j) {
            ds.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                feats[i][j];
        }
    }

    if (label_idx >= 0) {
        std::vector<int> labs;
        std::unordered_map<std::string, int> codes;
        labs.reserve(raw_labels.size());
        for (auto& l : raw_labels) {
            auto it = label_map.find(l);
            const std::string& mapped = it != label_map.end() ? it->second : l;
            auto ins = codes.emplace(mapped, static_cast<int>(codes.size()));
            labs.push_back(ins.first->second);
        }
        ds.true_labels = std::move(labs);
    }
    return ds;
}

Vec column_rms(const Mat& data) {
    const double n = static_cast<double>(data.rows());
    return (data.array().square().colwise().sum() / n).sqrt().transpose();
}

Dataset standardize(const Dataset& ds) {
    Vec rms = column_rms(ds.data);
    for (Eigen::Index j = 0; j < rms.size(); ++j) {
        if (rms[j] == 0.0) throw ZeroVarianceError("column with zero RMS");
    }
    Dataset out = ds;
    out.data = ds.data.array().rowwise() / rms.transpose().array();
    return out;
}

Dataset shuffle(const Dataset& ds, std::uint64_t seed) {
    const int n = static_cast<int>(ds.data.rows());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::mt19937_64 gen(seed);
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(gen() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    Dataset out = ds;
    for (int i = 0; i < n; ++i) out.data.row(i) = ds.data.row(perm[i]);
    if (ds.true_labels) {
        std::vector<int> labs(n);
        for (int i = 0; i < n; ++i) labs[i] = (*ds.true_labels)[perm[i]];
        out.true_labels = std::move(labs);
    }
    return out;
}

Image load_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image: " + path);
    auto next_token = [&in]() {
        std::string tok;
        for (;;) {
            int c = in.get();
            if (c == EOF) throw IoError("truncated PPM header");
            if (c == '#') {
                while (c != EOF && c != '\n') c = in.get();
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
    };
    if (next_token() != "P6") throw IoError("not a binary PPM (P6) file");
    Image img;
    img.width = std::stoi(next_token());
    img.height = std::stoi(next_token());
    int maxval = std::stoi(next_token());
    if (img.width <= 0 || img.height <= 0 || maxval != 255) {
        throw IoError("unsupported PPM geometry or depth");
    }
    img.pixels.resize(static_cast<size_t>(img.width) * img.height * 3);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
        throw IoError("truncated PPM pixel data");
    }
    return img;
}

void save_ppm(const std::string& path, const Image& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write image: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw IoError("failed writing PPM: " + path);
}

ImageBlocks blockify(const Image& img) {
    if (img.width % 8 != 0 || img.height % 8 != 0 || img.width == 0 ||
        img.height == 0) {
        throw BadDimensionsError("image dimensions must be positive multiples of 8");
    }
    ImageBlocks b;
    b.block_rows = img.height / 8;
    b.block_cols = img.width / 8;
    b.blocks.resize(static_cast<Eigen::Index>(b.block_rows) * b.block_cols, 192);
    for (int br = 0; br < b.block_rows; ++br) {
        for (int bc = 0; bc < b.block_cols; ++bc) {
            Eigen::Index row = static_cast<Eigen::Index>(br) * b.block_cols + bc;
            int col = 0;
            for (int py = 0; py < 8; ++py) {
                for (int px = 0; px < 8; ++px) {
                    size_t p = (static_cast<size_t>(br * 8 + py) * img.width +
                                (bc * 8 + px)) *
                               3;
                    b.blocks(row, col++) = img.pixels[p];
                    b.blocks(row, col++) = img.pixels[p + 1];
                    b.blocks(row, col++) = img.pixels[p + 2];
                }
            }
        }
    }
    return b;
}

Image deblockify(const ImageBlocks& blocks) {
    if (blocks.blocks.cols() != 192 ||
        blocks.blocks.rows() !=
            static_cast<Eigen::Index>(blocks.block_rows) * blocks.block_cols) {
        throw BadDimensionsError("inconsistent block grid");
    }
    Image img;
    img.width = blocks.block_cols * 8;
    img.height = blocks.block_rows * 8;
    img.pixels.resize(static_cast<size_t>(img.width) * img.height * 3);
    for (int br = 0; br < blocks.block_rows; ++br) {
        for (int bc = 0; bc < blocks.block_cols; ++bc) {
            Eigen::Index row = static_cast<Eigen::Index>(br) * blocks.block_cols + bc;
            int col = 0;
            for (int py = 0; py < 8; ++py) {
                for (int px = 0; px < 8; ++px) {
                    size_t p = (static_cast<size_t>(br * 8 + py) * img.width +
                                (bc * 8 + px)) *
                               3;
                    for (int ch = 0; ch < 3; ++ch) {
                        double v = std::round(blocks.blocks(row, col++));
                        img.pixels[p + ch] = static_cast<unsigned char>(
                            std::clamp(v, 0.0, 255.0));
                    }
                }
            }
        }
    }
    return img;
}

}  // namespace gdpm
