#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gdpm/dataio.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* cli = GDPM_CLI_PATH;

int run(const std::string& args) {
    std::string cmd = std::string(cli) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return (status >> 8) & 0xff;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() /
                     ("gdpm_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("cluster subcommand") {
    TempDir tmp;
    fs::path csv = tmp.path / "data.csv";
    std::ofstream(csv) << "x,y,class\n0,0,a\n0.1,0,a\n100,0,b\n100.1,0,b\n";

    std::string base = std::string("cluster --input ") + csv.string() +
                       " --label class --f linear --div sqdist";
    CHECK(run(base + " --lambda 1 --out-dir " + (tmp.path / "o1").string()) == 0);
    json r = json::parse(slurp(tmp.path / "o1" / "result.json"));
    CHECK(r["k"] == 2);
    CHECK(r["nmi"] == doctest::Approx(1.0));
    CHECK(r["labels"].size() == 4);

    // huge penalty keeps a single cluster
    CHECK(run(base + " --lambda 1e9 --out-dir " + (tmp.path / "o2").string()) == 0);
    r = json::parse(slurp(tmp.path / "o2" / "result.json"));
    CHECK(r["k"] == 1);

    // missing input is an input error (exit 2)
    CHECK(run("cluster --input /nonexistent.csv --lambda 1") == 2);
    // negative data under a positive-domain divergence is an input error
    fs::path neg = tmp.path / "neg.csv";
    std::ofstream(neg) << "-1,2\n3,4\n";
    CHECK(run("cluster --input " + neg.string() + " --div alpha --alpha 1 --lambda 1") == 2);
}

TEST_CASE("effective beta is recorded for dimension-averaged lse") {
    TempDir tmp;
    fs::path csv = tmp.path / "d8.csv";
    std::ofstream out(csv);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 8; ++j) out << (i + j % 3) << (j == 7 ? '\n' : ',');
    }
    out.close();
    CHECK(run("cluster --input " + csv.string() +
              " --f lse --beta-star 5 --div sqdist --dim-average --lambda 100"
              " --out-dir " + (tmp.path / "o").string()) == 0);
    json r = json::parse(slurp(tmp.path / "o" / "result.json"));
    CHECK(r["metadata"]["effective_beta"] == doctest::Approx(1.5));
}

TEST_CASE("sweep subcommand is deterministic") {
    TempDir tmp;
    fs::path csv = tmp.path / "data.csv";
    std::ofstream out(csv);
    out << "x,class\n";
    for (int i = 0; i < 10; ++i) out << 0.1 * i << ",a\n";
    for (int i = 0; i < 10; ++i) out << 10.0 + 0.1 * i << ",b\n";
    out.close();

    std::string args = "sweep --input " + csv.string() +
                       " --label class --f pow --div sqdist --beta-min 1"
                       " --beta-max 1 --beta-step 1 --shuffles 2 --seed 7"
                       " --lambda-decay 2.0";
    CHECK(run(args + " --out-dir " + (tmp.path / "s1").string()) == 0);
    CHECK(run(args + " --out-dir " + (tmp.path / "s2").string()) == 0);
    std::string csv1 = slurp(tmp.path / "s1" / "sweep.csv");
    CHECK(csv1 == slurp(tmp.path / "s2" / "sweep.csv"));
    CHECK(csv1.rfind("beta,lambda,mean_k,mean_nmi,mean_maxdist\n", 0) == 0);
    // at least the initial-lambda row plus one decayed row
    CHECK(std::count(csv1.begin(), csv1.end(), '\n') >= 3);
}

TEST_CASE("influence subcommand emits curves and a report") {
    TempDir tmp;
    CHECK(run("influence --f pow --div sqdist --betas -1 0.25 --theta 0"
              " --x-min 0 --x-max 10 --points 50 --out-dir " +
              (tmp.path / "inf").string()) == 0);
    CHECK(fs::exists(tmp.path / "inf" / "curve_pow_sqdist_beta-1.csv"));
    CHECK(fs::exists(tmp.path / "inf" / "curve_pow_sqdist_beta0.25.csv"));
    json rep = json::parse(slurp(tmp.path / "inf" / "influence_report.json"));
    CHECK(rep.size() == 2);
    CHECK(rep[0]["robustness"] == "redescending");
    CHECK(rep[1]["robustness"] == "redescending");
}

TEST_CASE("quantize subcommand") {
    TempDir tmp;
    gdpm::Image img;
    img.width = 32;
    img.height = 16;
    img.pixels.resize(32 * 16 * 3);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 32; ++x) {
            size_t p = (static_cast<size_t>(y) * 32 + x) * 3;
            unsigned char v = x < 16 ? 40 : 200;
            img.pixels[p] = v;
            img.pixels[p + 1] = static_cast<unsigned char>(255 - v);
            img.pixels[p + 2] = 128;
        }
    }
    fs::path ppm = tmp.path / "img.ppm";
    gdpm::save_ppm(ppm.string(), img);

    CHECK(run("quantize --image " + ppm.string() +
              " --f pow --beta 1 --div sqdist --lambda 1 --no-standardize"
              " --out-dir " + (tmp.path / "q").string()) == 0);
    json stats = json::parse(slurp(tmp.path / "q" / "stats.json"));
    CHECK(stats["k"] == 2);  // two solid block colors
    CHECK(stats["n_blocks"] == 8);
    CHECK(stats["compression_ratio_percent"] == doctest::Approx(25.0));
    gdpm::Image out = gdpm::load_ppm((tmp.path / "q" / "quantized.ppm").string());
    CHECK(out.width == 32);
    CHECK(out.height == 16);
    CHECK(out.pixels == img.pixels);  // solid blocks reconstruct exactly
}
