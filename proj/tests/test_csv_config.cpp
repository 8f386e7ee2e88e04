#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "glwalk/config.hpp"
#include "glwalk/csv.hpp"
#include "glwalk/errors.hpp"
#include "glwalk/runner.hpp"

using namespace glwalk;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    fs::path p = fs::temp_directory_path() / "glwalk_test_csv";
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("csv round trip with schema header") {
    fs::path f = temp_dir() / "t.csv";
    write_csv_atomic(f, "demo", {"a", "b"}, {{"1", "2.5"}, {"3", "x"}});
    CsvTable t = read_csv(f);
    CHECK(t.kind == "demo");
    CHECK(t.columns == std::vector<std::string>{"a", "b"});
    CHECK(t.rows.size() == 2);
    CHECK(t.rows[1][1] == "x");
    CHECK(t.col("b") == 1);
    CHECK_THROWS_AS(t.col("c"), SchemaMismatchError);
    CHECK_THROWS_AS(read_csv_expect(f, "other"), SchemaMismatchError);
    CHECK_FALSE(fs::exists(f.string() + ".tmp")); // atomic write leaves no temp
}

TEST_CASE("fmt_double round-trips through text exactly") {
    for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0, -0.0, 123456789.123456789}) {
        std::string s = fmt_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("sample matrix persists bit-exactly") {
    SampleMatrix sm;
    sm.n_grid = {4, 16};
    sm.paths = 3;
    RngStream rng(5);
    auto fill = [&](std::vector<std::vector<double>>& v) {
        v.assign(2, std::vector<double>(3));
        for (auto& row : v)
            for (double& x : row) x = rng.next_gaussian() * 1e3;
    };
    fill(sm.log_vec_norm);
    fill(sm.log_mat_norm);
    fill(sm.log_spec_radius);
    fs::path f = temp_dir() / "samples.csv";
    write_sample_matrix(f, sm);
    SampleMatrix back = read_sample_matrix(f);
    CHECK(back.n_grid == sm.n_grid);
    CHECK(back.paths == sm.paths);
    for (std::size_t g = 0; g < 2; ++g)
        for (std::size_t p = 0; p < 3; ++p) {
            CHECK(back.log_vec_norm[g][p] == sm.log_vec_norm[g][p]);
            CHECK(back.log_mat_norm[g][p] == sm.log_mat_norm[g][p]);
            CHECK(back.log_spec_radius[g][p] == sm.log_spec_radius[g][p]);
        }
}

TEST_CASE("config parsing and validation") {
    nlohmann::json j = {
        {"seed", 42},
        {"workers", 2},
        {"burn_in", 100},
        {"ensemble",
         {{"d", 2}, {"family", "rot_diag_rot"}, {"tail_index", 4.5}, {"declared_q", 4.0}}},
    };
    ExperimentConfig c = ExperimentConfig::from_json(j);
    CHECK(c.seed == 42);
    CHECK(c.ensemble.family == Family::rot_diag_rot);
    CHECK(c.burn_in == 100);
    CHECK_THROWS_AS(c.block("be_curve"), ConfigError);

    nlohmann::json no_seed = j;
    no_seed.erase("seed");
    CHECK_THROWS_AS(ExperimentConfig::from_json(no_seed), ConfigError);

    nlohmann::json bad_family = j;
    bad_family["ensemble"]["family"] = "mystery";
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_family), ConfigError);

    nlohmann::json bad_q = j;
    bad_q["ensemble"]["declared_q"] = 4.6; // q >= tail index
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_q), ConfigError);
}

TEST_CASE("two_atom config takes row-major atom literals") {
    nlohmann::json j = {
        {"seed", 1},
        {"ensemble",
         {{"d", 2},
          {"family", "two_atom"},
          {"atoms", {{2.0, 0.0, 0.0, 0.5}, {0.0, -1.0, 1.0, 0.0}}}}},
    };
    ExperimentConfig c = ExperimentConfig::from_json(j);
    CHECK(c.ensemble.atoms[0](0, 0) == 2.0);
    CHECK(c.ensemble.atoms[1](0, 1) == -1.0);
}

TEST_CASE("GLWALK_BUDGET environment override") {
    nlohmann::json j = {
        {"seed", 1},
        {"ensemble", {{"d", 2}, {"family", "orthogonal_only"}}},
    };
    setenv("GLWALK_BUDGET", "12345", 1);
    ExperimentConfig c = ExperimentConfig::from_json(j);
    CHECK(c.budget == 12345);
    setenv("GLWALK_BUDGET", "bogus", 1);
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
    unsetenv("GLWALK_BUDGET");
}

TEST_CASE("fnv1a64 known vectors and file checksums") {
    CHECK(fnv1a64("", 0) == UINT64_C(0xcbf29ce484222325));
    CHECK(fnv1a64("a", 1) == UINT64_C(0xaf63dc4c8601ec8c));
    fs::path f = temp_dir() / "sum.txt";
    {
        std::ofstream out(f, std::ios::binary);
        out << "a";
    }
    CHECK(fnv1a64_file(f) == UINT64_C(0xaf63dc4c8601ec8c));
    CHECK(hex64(UINT64_C(0xaf63dc4c8601ec8c)) == "af63dc4c8601ec8c");
}

TEST_CASE("manifest lists outputs with checksums") {
    fs::path dir = temp_dir();
    fs::path out = dir / "m_out.csv";
    write_csv_atomic(out, "demo", {"x"}, {{"1"}});
    RunManifest m;
    m.config_hash = "deadbeef";
    m.start_time = "2020-01-01T00:00:00Z";
    m.end_time = "2020-01-01T00:00:01Z";
    m.add_file(out);
    fs::path mpath = dir / "manifest.json";
    m.write(mpath);
    std::ifstream in(mpath);
    nlohmann::json j;
    in >> j;
    CHECK(j["config_hash"] == "deadbeef");
    CHECK(j["outputs"].size() == 1);
    CHECK(j["outputs"][0]["file"] == "m_out.csv");
    CHECK(j["outputs"][0]["checksum"] == hex64(fnv1a64_file(out)));
}
