#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "gdpm/dataio.hpp"

using namespace gdpm;
namespace fs = std::filesystem;

namespace {

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path(fs::temp_directory_path() / name) {
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

}  // namespace

TEST_CASE("csv loading") {
    TempFile plain("gdpm_t1.csv", "1,2\n3,4\n5,6\n");
    Dataset ds = load_csv(plain.path.string());
    CHECK(ds.data.rows() == 3);
    CHECK(ds.data.cols() == 2);
    CHECK(ds.data(2, 1) == 6.0);
    CHECK(!ds.true_labels);

    // rows with missing cells are dropped
    TempFile missing("gdpm_t2.csv", "1,2\n?,4\n5,6\n");
    ds = load_csv(missing.path.string());
    CHECK(ds.data.rows() == 2);
    CHECK(ds.dropped_rows == 1);

    // header + label factorization in order of first appearance
    TempFile labeled("gdpm_t3.csv", "x,y,class\n1,2,a\n3,4,b\n5,6,a\n");
    ds = load_csv(labeled.path.string(), "class");
    REQUIRE(ds.true_labels.has_value());
    CHECK(*ds.true_labels == std::vector<int>{0, 1, 0});
    CHECK(ds.data.cols() == 2);
    CHECK(ds.feature_names == std::vector<std::string>{"x", "y"});

    // label column by index when there is no header
    TempFile idx("gdpm_t4.csv", "1,2,7\n3,4,8\n");
    ds = load_csv(idx.path.string(), "2");
    REQUIRE(ds.true_labels.has_value());
    CHECK(*ds.true_labels == std::vector<int>{0, 1});

    CHECK_THROWS_AS(load_csv("/nonexistent/nope.csv"), IoError);
    TempFile empty("gdpm_t5.csv", "?,?\n");
    CHECK_THROWS_AS(load_csv(empty.path.string()), EmptyDatasetError);
}

TEST_CASE("label mapping merges classes") {
    TempFile data("gdpm_t6.csv", "x,class\n1,h1\n2,h2\n3,ok\n4,h3\n");
    TempFile mapf("gdpm_t7.csv", "h1,sick\nh2,sick\nh3,sick\n");
    LabelMap map = load_label_map(mapf.path.string());
    Dataset ds = load_csv(data.path.string(), "class", map);
    REQUIRE(ds.true_labels.has_value());
    CHECK(*ds.true_labels == std::vector<int>{0, 0, 1, 0});
}

TEST_CASE("rms standardization") {
    Dataset ds;
    ds.data.resize(2, 1);
    ds.data << 3.0, 4.0;
    Dataset out = standardize(ds);
    double rms = std::sqrt(12.5);
    CHECK(out.data(0, 0) == doctest::Approx(3.0 / rms));
    CHECK(out.data(1, 0) == doctest::Approx(4.0 / rms));
    CHECK(column_rms(out.data)[0] == doctest::Approx(1.0).epsilon(1e-12));

    // idempotence
    Dataset twice = standardize(out);
    CHECK((twice.data - out.data).lpNorm<Eigen::Infinity>() < 1e-12);

    // constant nonzero column maps to ones (no centering)
    Dataset cst;
    cst.data.resize(2, 1);
    cst.data << 2.0, 2.0;
    CHECK(standardize(cst).data(0, 0) == doctest::Approx(1.0));

    Dataset zero;
    zero.data = Mat::Zero(3, 1);
    CHECK_THROWS_AS(standardize(zero), ZeroVarianceError);
}

TEST_CASE("seeded shuffle") {
    Dataset ds;
    ds.data.resize(6, 2);
    for (Eigen::Index i = 0; i < 6; ++i) {
        ds.data(i, 0) = i;
        ds.data(i, 1) = 10 * i;
    }
    ds.true_labels = std::vector<int>{0, 0, 1, 1, 2, 2};

    Dataset s1 = shuffle(ds, 42);
    Dataset s2 = shuffle(ds, 42);
    CHECK((s1.data - s2.data).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(*s1.true_labels == *s2.true_labels);

    // (row, label) pairing preserved as a multiset
    std::map<double, int> orig, shuf;
    for (Eigen::Index i = 0; i < 6; ++i) {
        orig[ds.data(i, 0)] = (*ds.true_labels)[i];
        shuf[s1.data(i, 0)] = (*s1.true_labels)[i];
    }
    CHECK(orig == shuf);

    Dataset single;
    single.data.resize(1, 1);
    single.data << 7.0;
    CHECK(shuffle(single, 99).data(0, 0) == 7.0);
}

TEST_CASE("image blocks round trip") {
    std::mt19937 rng(8);
    std::uniform_int_distribution<int> byte(0, 255);

    Image img;
    img.width = 32;
    img.height = 16;
    img.pixels.resize(32 * 16 * 3);
    for (auto& p : img.pixels) p = static_cast<unsigned char>(byte(rng));

    ImageBlocks b = blockify(img);
    CHECK(b.blocks.rows() == 8);
    CHECK(b.blocks.cols() == 192);
    CHECK(b.block_rows == 2);
    CHECK(b.block_cols == 4);

    Image back = deblockify(b);
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.pixels == img.pixels);

    // solid 8x8 image: one block repeating the three channel constants
    Image solid;
    solid.width = solid.height = 8;
    solid.pixels.assign(8 * 8 * 3, 0);
    for (size_t i = 0; i < solid.pixels.size(); i += 3) {
        solid.pixels[i] = 10;
        solid.pixels[i + 1] = 20;
        solid.pixels[i + 2] = 30;
    }
    ImageBlocks sb = blockify(solid);
    CHECK(sb.blocks.rows() == 1);
    for (int p = 0; p < 64; ++p) {
        CHECK(sb.blocks(0, 3 * p) == 10.0);
        CHECK(sb.blocks(0, 3 * p + 1) == 20.0);
        CHECK(sb.blocks(0, 3 * p + 2) == 30.0);
    }

    Image bad;
    bad.width = 10;
    bad.height = 8;
    bad.pixels.assign(10 * 8 * 3, 0);
    CHECK_THROWS_AS(blockify(bad), BadDimensionsError);
}

TEST_CASE("ppm io round trip") {
    std::mt19937 rng(12);
    std::uniform_int_distribution<int> byte(0, 255);
    Image img;
    img.width = 24;
    img.height = 8;
    img.pixels.resize(24 * 8 * 3);
    for (auto& p : img.pixels) p = static_cast<unsigned char>(byte(rng));

    fs::path path = fs::temp_directory_path() / "gdpm_t8.ppm";
    save_ppm(path.string(), img);
    Image back = load_ppm(path.string());
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.pixels == img.pixels);
    fs::remove(path);

    CHECK_THROWS_AS(load_ppm("/nonexistent/img.ppm"), IoError);
}
