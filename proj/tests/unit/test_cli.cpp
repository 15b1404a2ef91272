#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sjm/cli.hpp"

namespace fs = std::filesystem;
using sjm::cli::run;

namespace {

struct ScratchDir {
    fs::path path;
    ScratchDir() {
        path = fs::temp_directory_path() / ("sjm_cli_" + std::to_string(std::random_device{}()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

struct Result {
    int code;
    std::string out, err;
};

Result sjmRun(std::vector<std::string> args) {
    args.insert(args.begin(), "sjm");
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool sameTree(const fs::path& a, const fs::path& b) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), a));
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file() && !fs::exists(a / fs::relative(e.path(), b))) return false;
    for (const auto& f : files)
        if (f.filename() != "timing.json" && slurp(a / f) != slurp(b / f)) return false;
    return !files.empty();
}

}  // namespace

TEST_CASE("scenarios lists the seven settings") {
    const Result r = sjmRun({"scenarios"});
    CHECK(r.code == 0);
    int lines = 0;
    for (char c : r.out) lines += c == '\n';
    CHECK(lines == 8);
    CHECK(r.out.find("0.05") != std::string::npos);
}

TEST_CASE("simulate is reproducible and both formats load") {
    ScratchDir dir;
    CHECK(sjmRun({"simulate", "--scenario", "2", "--out", dir / "a", "--seed", "4", "--subjects", "10", "--nodes", "6"})
              .code == 0);
    CHECK(sjmRun({"simulate", "--scenario", "2", "--out", dir / "b", "--seed", "4", "--subjects", "10", "--nodes", "6"})
              .code == 0);
    CHECK(sameTree(dir / "a", dir / "b"));
    CHECK(sjmRun({"simulate", "--scenario", "2", "--out", dir / "m", "--seed", "4", "--subjects", "10", "--nodes", "6",
                  "--format", "matrices"})
              .code == 0);
    CHECK(fs::exists(dir / "m/networks/subject_0009.csv"));
    CHECK(fs::exists(dir / "a/truth.json"));
}

TEST_CASE("fit then summarize") {
    ScratchDir dir;
    REQUIRE(sjmRun({"simulate", "--scenario", "5", "--out", dir / "data", "--seed", "2", "--subjects", "20", "--nodes",
                    "6"})
                .code == 0);
    const Result fit = sjmRun({"fit", "--data", dir / "data", "--out", dir / "chain", "--iterations", "60", "--burnin",
                               "20", "--rank", "2", "--seed", "3"});
    REQUIRE(fit.code == 0);
    CHECK(fs::exists(dir / "chain/draws.csv"));
    CHECK(fs::exists(dir / "chain/timing.json"));

    CHECK(sjmRun({"summarize", "--chain", dir / "chain", "--min-pairs", "1"}).code == 1);

    const Result ok = sjmRun({"summarize", "--chain", dir / "chain", "--truth", dir / "data", "--bins", "4"});
    REQUIRE(ok.code == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "chain/summary/summary.json"));
    CHECK(summary.contains("truth"));
    std::istringstream inc(slurp(dir / "chain/summary/inclusion.csv"));
    std::string line;
    std::getline(inc, line);
    int rows = 0;
    while (std::getline(inc, line)) {
        const auto a = line.find(',');
        const double p = std::stod(line.substr(a + 1, line.find(',', a + 1) - a - 1));
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        ++rows;
    }
    CHECK(rows == 6);
    CHECK(fs::exists(dir / "chain/summary/spatial_curve.csv"));
    CHECK(fs::exists(dir / "chain/summary/cross_covariance.csv"));

    const Result again = sjmRun({"fit", "--data", dir / "data", "--out", dir / "chain2", "--iterations", "60",
                                 "--burnin", "20", "--rank", "2", "--seed", "3"});
    REQUIRE(again.code == 0);
    CHECK(slurp(dir / "chain/draws.csv") == slurp(dir / "chain2/draws.csv"));
}

TEST_CASE("configuration files feed the fit") {
    ScratchDir dir;
    REQUIRE(sjmRun({"simulate", "--scenario", "1", "--out", dir / "data", "--subjects", "10", "--nodes", "5"}).code == 0);
    std::ofstream(dir / "cfg.json") << R"({"version": 1, "R": 2, "iterations": 30, "burnin": 10, "variant": "independent-attribute"})";
    const Result r = sjmRun({"fit", "--data", dir / "data", "--out", dir / "chain", "--config", dir / "cfg.json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("20 draws") != std::string::npos);
    CHECK(r.out.find("independent-attribute") != std::string::npos);

    std::ofstream(dir / "bad.json") << R"({"version": 1, "iteration": 30})";
    const Result bad = sjmRun({"fit", "--data", dir / "data", "--out", dir / "c2", "--config", dir / "bad.json"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("iteration") != std::string::npos);
}

TEST_CASE("invalid input exits with status 1") {
    ScratchDir dir;
    CHECK(sjmRun({}).code == 1);
    CHECK(sjmRun({"frobnicate"}).code == 1);
    CHECK(sjmRun({"simulate", "--scenario", "9", "--out", dir / "x"}).code == 1);
    CHECK(sjmRun({"simulate", "--scenario", "1"}).code == 1);
    CHECK(sjmRun({"simulate", "--scenario", "1", "--out", dir / "x", "--format", "parquet"}).code == 1);
    const Result missing = sjmRun({"fit", "--data", dir / "nowhere", "--out", dir / "c"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("nowhere") != std::string::npos);
    REQUIRE(sjmRun({"simulate", "--scenario", "1", "--out", dir / "d", "--subjects", "5", "--nodes", "4"}).code == 0);
    CHECK(sjmRun({"fit", "--data", dir / "d", "--out", dir / "c", "--variant", "bogus"}).code == 1);
    CHECK(sjmRun({"fit", "--data", dir / "d", "--out", dir / "c", "--iterations", "10", "--burnin", "10"}).code == 1);
    CHECK(sjmRun({"fit", "--data", dir / "d", "--out", dir / "c", "--init", "random"}).code == 1);
    CHECK(sjmRun({"compare", "--scenario", "1", "--threads", "0", "--out", dir / "r"}).code == 1);
    CHECK(sjmRun({"summarize", "--chain", dir / "nochain"}).code == 1);
}

TEST_CASE("summarize refuses a chain fitted to other data") {
    ScratchDir dir;
    REQUIRE(sjmRun({"simulate", "--scenario", "1", "--out", dir / "d1", "--subjects", "5", "--nodes", "4", "--seed", "1"})
                .code == 0);
    REQUIRE(sjmRun({"simulate", "--scenario", "1", "--out", dir / "d2", "--subjects", "5", "--nodes", "4", "--seed", "2"})
                .code == 0);
    REQUIRE(sjmRun({"fit", "--data", dir / "d1", "--out", dir / "c", "--iterations", "20", "--burnin", "10"}).code == 0);
    const Result r = sjmRun({"summarize", "--chain", dir / "c", "--data", dir / "d2"});
    CHECK(r.code == 1);
    CHECK(r.err.find("fingerprint") != std::string::npos);
}

TEST_CASE("compare writes a report") {
    ScratchDir dir;
    std::ofstream(dir / "cfg.json") << R"({"version": 1, "R": 2, "iterations": 30, "burnin": 10})";
    const Result r = sjmRun({"compare", "--scenario", "3", "--replicates", "2", "--threads", "2", "--variants",
                             "spatial-joint,independent-network", "--config", dir / "cfg.json", "--out", dir / "rep"});
    REQUIRE(r.code == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "rep/report.json"));
    CHECK(report["version"] == 1);
    CHECK(fs::exists(dir / "rep/timing.json"));
}
