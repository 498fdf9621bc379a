#include "doctest.h"

#include "nct/io.hpp"
#include "nct/sim.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = NCT_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("nct_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int value = 0;
        return value;
    }
};

int run(const std::string& args, const fs::path& stderr_to = {}) {
    std::string command = kCli + " " + args;
    if (!stderr_to.empty()) command += " 2> " + stderr_to.string();
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

const char* kMaternConfig = R"({
  "model": {"dimension": 2, "radius": 0.05,
            "intensity": {"kind": "constant", "lambda": 50.0},
            "rule": {"kind": "matern1"}},
  "window": {"lower": [0.0, 0.0], "upper": [1.0, 1.0]},
  "seed": 424242,
  "simulate": {"replicates": 40, "coupled": true, "write_patterns": true}
})";

} // namespace

TEST_CASE("simulate output is byte-identical across thread counts") {
    TempDir dir;
    write(dir.path / "config.json", kMaternConfig);
    const fs::path out1 = dir.path / "run1";
    const fs::path out8 = dir.path / "run8";
    REQUIRE(run("simulate --config " + (dir.path / "config.json").string() +
                " --threads 1 --out " + out1.string()) == 0);
    REQUIRE(run("simulate --config " + (dir.path / "config.json").string() +
                " --threads 8 --out " + out8.string()) == 0);
    CHECK(slurp(out1 / "patterns.csv") == slurp(out8 / "patterns.csv"));
    CHECK(slurp(out1 / "summaries.csv") == slurp(out8 / "summaries.csv"));
    CHECK(slurp(out1 / "summaries.csv").rfind("# config_hash=", 0) == 0);
}

TEST_CASE("binary pattern files round-trip") {
    TempDir dir;
    std::string config(kMaternConfig);
    config.replace(config.find("\"write_patterns\": true"),
                   std::string("\"write_patterns\": true").size(),
                   "\"write_patterns\": true, \"pattern_format\": \"bin\"");
    write(dir.path / "config.json", config);
    REQUIRE(run("simulate --config " + (dir.path / "config.json").string() + " --out " +
                (dir.path / "out").string()) == 0);

    std::ifstream in(dir.path / "out" / "patterns.bin", std::ios::binary);
    REQUIRE(in.good());
    const auto read_u64 = [&in] {
        std::uint64_t value = 0;
        for (int b = 0; b < 8; ++b) {
            char byte;
            in.get(byte);
            value |= static_cast<std::uint64_t>(static_cast<unsigned char>(byte)) << (8 * b);
        }
        return value;
    };
    const std::uint64_t embedded_hash = read_u64();
    CHECK(embedded_hash != 0);
    const std::uint64_t n = read_u64();
    CHECK(n == 40);
    const nct::Window window = nct::Window::unit_cube(2);
    std::size_t total_points = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const nct::PointPattern pattern = nct::pattern_from_binary(in, window);
        pattern.validate();
        total_points += pattern.size();
    }
    CHECK(total_points > 0);

    // The same seed through the library gives the same first replicate.
    const nct::Model model =
        nct::Model::homogeneous(2, 0.05, 50.0, nct::RetentionRule::matern_i());
    std::ifstream again(dir.path / "out" / "patterns.bin", std::ios::binary);
    again.seekg(16); // skip hash + count header
    const nct::PointPattern first = nct::pattern_from_binary(again, window);
    const nct::CoupledThinning direct = nct::simulate_coupled(model, window, {424242, 0});
    CHECK(first.coords == direct.dependent.coords);
}

TEST_CASE("analyze emits the expected curves") {
    TempDir dir;
    SUBCASE("Matern I curve vanishes at contact") {
        write(dir.path / "config.json", R"({
          "model": {"dimension": 2, "radius": 0.05,
                    "intensity": {"kind": "constant", "lambda": 50.0},
                    "rule": {"kind": "matern1"}},
          "analyze": {"grid_points": 50}
        })");
        REQUIRE(run("analyze --config " + (dir.path / "config.json").string() + " --out " +
                    (dir.path / "out").string()) == 0);
        std::istringstream curve(slurp(dir.path / "out" / "g_curve.csv"));
        std::string line;
        std::getline(curve, line);
        CHECK(line.rfind("# config_hash=", 0) == 0);
        std::getline(curve, line);
        CHECK(line == "t,g");
        while (std::getline(curve, line)) {
            const auto comma = line.find(',');
            const double t = std::stod(line.substr(0, comma));
            const double g = std::stod(line.substr(comma + 1));
            if (t <= 1.0) CHECK(g == 0.0);
            if (t > 2.0) CHECK(g == 1.0);
        }
    }
    SUBCASE("independent thinning curve is identically one") {
        write(dir.path / "config.json", R"({
          "model": {"dimension": 2, "radius": 0.05,
                    "intensity": {"kind": "constant", "lambda": 50.0},
                    "rule": {"kind": "constant", "c": 0.7}},
          "analyze": {"grid_points": 40}
        })");
        REQUIRE(run("analyze --config " + (dir.path / "config.json").string() + " --out " +
                    (dir.path / "out").string()) == 0);
        std::istringstream curve(slurp(dir.path / "out" / "g_curve.csv"));
        std::string line;
        std::getline(curve, line);
        std::getline(curve, line);
        while (std::getline(curve, line)) {
            const double g = std::stod(line.substr(line.find(',') + 1));
            CHECK(g == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("geometric ring values match the first-order formula") {
        write(dir.path / "config.json", R"({
          "model": {"dimension": 2, "radius": 0.01,
                    "intensity": {"kind": "constant", "lambda": 50.0},
                    "rule": {"kind": "geometric", "q": 0.9, "s": 0.5}},
          "analyze": {"grid_points": 40}
        })");
        REQUIRE(run("analyze --config " + (dir.path / "config.json").string() + " --out " +
                    (dir.path / "out").string()) == 0);
        const nct::Model model = nct::Model::homogeneous(
            2, 0.01, 50.0, nct::RetentionRule::geometric_soft_core(0.9, 0.5));
        const double mu = model.mean_neighbours();
        const nct::OverlapKernel omega(2);
        std::istringstream curve(slurp(dir.path / "out" / "g_curve.csv"));
        std::string line;
        std::getline(curve, line);
        std::getline(curve, line);
        while (std::getline(curve, line)) {
            const auto comma = line.find(',');
            const double t = std::stod(line.substr(0, comma));
            const double g = std::stod(line.substr(comma + 1));
            if (t > 1.0 && t <= 2.0) {
                const double ring = 1.0 + mu * omega(t) * 0.25;
                CHECK(std::fabs(g - ring) < 10.0 * mu * mu);
            }
        }
    }
}

TEST_CASE("estimate and bounds commands produce their tables") {
    TempDir dir;
    write(dir.path / "config.json", R"({
      "model": {"dimension": 2, "radius": 0.05,
                "intensity": {"kind": "constant", "lambda": 50.0},
                "rule": {"kind": "geometric", "q": 0.9, "s": 0.5}},
      "seed": 7,
      "estimate": {"replicates": 60},
      "bounds": {"quad_tol": 1e-6}
    })");
    REQUIRE(run("estimate --config " + (dir.path / "config.json").string() + " --out " +
                (dir.path / "est").string()) == 0);
    const std::string g_estimate = slurp(dir.path / "est" / "g_estimate.csv");
    CHECK(g_estimate.find("bin_lo,bin_hi,g_hat,se,g_exact") != std::string::npos);

    REQUIRE(run("bounds --config " + (dir.path / "config.json").string() + " --out " +
                (dir.path / "bnd").string()) == 0);
    const std::string comparison = slurp(dir.path / "bnd" / "bounds_comparison.csv");
    CHECK(comparison.find("CouplingTV") != std::string::npos);
    CHECK(comparison.find("parity") != std::string::npos);
    CHECK(fs::exists(dir.path / "bnd" / "bound_SteinGeneral.json"));
    CHECK(fs::exists(dir.path / "bnd" / "bounds_comparison.md"));
}

TEST_CASE("config errors name the offending JSON path and exit with 2") {
    TempDir dir;
    write(dir.path / "bad.json", R"({"model": {"dimension": 2, "radius": -0.5}})");
    const fs::path err = dir.path / "stderr.txt";
    CHECK(run("analyze --config " + (dir.path / "bad.json").string(), err) == 2);
    CHECK(slurp(err).find("$.model") != std::string::npos);

    write(dir.path / "bad2.json", R"({"model": {"rule": {"kind": "nope"}}})");
    CHECK(run("analyze --config " + (dir.path / "bad2.json").string(), err) == 2);
    CHECK(slurp(err).find("$.model.rule") != std::string::npos);

    CHECK(run("analyze --config " + (dir.path / "missing.json").string(), err) == 2);
}

TEST_CASE("numeric failures exit with 3") {
    TempDir dir;
    // mu is enormous, so E[p(N)] underflows and the pair-correlation ratio
    // degenerates.
    write(dir.path / "config.json", R"({
      "model": {"dimension": 2, "radius": 3.0,
                "intensity": {"kind": "constant", "lambda": 200.0},
                "rule": {"kind": "matern1"}},
      "analyze": {"grid_points": 5}
    })");
    const fs::path err = dir.path / "stderr.txt";
    CHECK(run("analyze --config " + (dir.path / "config.json").string() + " --out " +
                  (dir.path / "out").string(),
              err) == 3);
    CHECK(slurp(err).find("numeric failure") != std::string::npos);
}

TEST_CASE("every output file carries the canonical config hash") {
    TempDir dir;
    write(dir.path / "config.json", R"({
      "model": {"dimension": 2, "radius": 0.05,
                "intensity": {"kind": "constant", "lambda": 40.0},
                "rule": {"kind": "geometric", "q": 0.9, "s": 0.5}},
      "seed": 99,
      "simulate": {"replicates": 10, "coupled": true},
      "estimate": {"replicates": 20},
      "bounds": {"quad_tol": 1e-5}
    })");
    const std::string base = "--config " + (dir.path / "config.json").string() + " --out " +
                             (dir.path / "out").string();
    REQUIRE(run("analyze " + base) == 0);
    REQUIRE(run("simulate " + base) == 0);
    REQUIRE(run("estimate " + base) == 0);
    REQUIRE(run("bounds " + base) == 0);

    // All runs share one config, so one hash must appear in every file.
    std::string hash;
    for (const auto& entry : fs::directory_iterator(dir.path / "out")) {
        if (entry.path().extension() == ".bin") continue;
        const std::string content = slurp(entry.path());
        const auto key = content.find("config_hash");
        REQUIRE_MESSAGE(key != std::string::npos, entry.path().string());
        std::string found;
        for (std::size_t i = content.find_first_of("0123456789abcdef", key + 12);
             i < content.size() && found.size() < 16; ++i)
            found += content[i];
        if (hash.empty()) hash = found;
        CHECK_MESSAGE(found == hash, entry.path().string());
    }
    CHECK(hash.size() == 16);
}

TEST_CASE("selftest passes and reports per-check lines") {
    TempDir dir;
    const fs::path log = dir.path / "out.txt";
    const int status =
        std::system((kCli + " selftest > " + log.string() + " 2>&1").c_str());
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    const std::string output = slurp(log);
    CHECK(output.find("selftest: all checks passed") != std::string::npos);
    CHECK(output.find("... ok") != std::string::npos);
}

TEST_CASE("config canonical form round-trips") {
    // from_json_text(canonical_json()) must reproduce the same canonical
    // string; exercised through the config translation unit linked into
    // this test.
    extern std::string nct_test_canonical_roundtrip(const std::string&);
    const std::string canonical = nct_test_canonical_roundtrip(kMaternConfig);
    const std::string again = nct_test_canonical_roundtrip(canonical);
    CHECK(canonical == again);
    CHECK(canonical.find("\"seed\":424242") != std::string::npos);
}
