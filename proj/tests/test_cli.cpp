#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const std::string& stdout_path = "cli_stdout.txt") {
    const std::string cmd = std::string(SDHEAT_CLI_PATH) + " " + args + " > " + stdout_path + " 2> cli_stderr.txt";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("kernel slice on stdout") {
    REQUIRE(run("kernel --dim 1 --dx 1 --c 1 --t 0.5 --radius 32") == 0);
    const std::string csv = slurp("cli_stdout.txt");
    CHECK(csv.rfind("alpha_1,value\n", 0) == 0);
    CHECK(csv.find("\n0,0.46575960") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("kernel --frobnicate 3") == 2);
    CHECK(slurp("cli_stderr.txt").find("frobnicate") != std::string::npos);
    CHECK(run("") == 2);
    CHECK(run("kernel --t -1") == 2);
    CHECK(run("gamma --coeff sine:1,2,1 --dx 0.25 --radius 8") == 2);
    CHECK(run("verify --suite bogus") == 2);
    CHECK(run("compare --a missing.csv --b missing.csv") == 1);
    std::ofstream("bad_config.json") << "{\"dx\": \"wide\"}";
    CHECK(run("kernel --config bad_config.json") == 2);
}

TEST_CASE("gamma writes field and sidecar, failures leave no files") {
    fs::remove("g.csv");
    fs::remove("g.csv.json");
    REQUIRE(run("gamma --coeff sine:1,0.5,1 --dx 0.125 --radius 16 --t 0.25 --tol 1e-8 -o g.csv") == 0);
    REQUIRE(fs::exists("g.csv"));
    const auto meta = nlohmann::json::parse(slurp("g.csv.json"));
    for (const char* k : {"m_max", "fitted_C3", "quad_nodes", "tail_estimate", "config"}) CHECK(meta.contains(k));

    // identical invocations are byte-identical
    REQUIRE(run("gamma --coeff sine:1,0.5,1 --dx 0.125 --radius 16 --t 0.25 --tol 1e-8 -o g2.csv") == 0);
    CHECK(slurp("g.csv") == slurp("g2.csv"));

    REQUIRE(run("oracle --coeff sine:1,0.5,1 --dx 0.125 --radius 16 --t 0.25 --tol 1e-12 -o o.csv") == 0);
    REQUIRE(run("compare --a g.csv --b o.csv --dx 0.125 --norm linf") == 0);
    const auto cmp = nlohmann::json::parse(slurp("cli_stdout.txt"));
    CHECK(cmp["value"].get<double>() < 1e-6);
    REQUIRE(run("compare --a g.csv --b g.csv --dx 0.125") == 0);
    CHECK(nlohmann::json::parse(slurp("cli_stdout.txt"))["l1"].get<double>() == 0.0);

    fs::remove("fail.csv");
    CHECK(run("gamma --coeff sine:1,0.5,1 --dx 0.125 --radius 16 --t 0.25 --tol 1e-17 -o fail.csv") == 3);
    CHECK_FALSE(fs::exists("fail.csv"));
    CHECK_FALSE(fs::exists("fail.csv.json"));
}

TEST_CASE("config dump round trip") {
    REQUIRE(run("solve --coeff const:1 --psi gauss:1 --dx 0.25 --radius 8 --times 0.1,0.2 --dump-config",
                "dump1.json") == 0);
    REQUIRE(run("solve --config dump1.json --dump-config", "dump2.json") == 0);
    CHECK(slurp("dump1.json") == slurp("dump2.json"));
    // flags override the file
    REQUIRE(run("solve --config dump1.json --radius 4 --dump-config", "dump3.json") == 0);
    CHECK(nlohmann::json::parse(slurp("dump3.json"))["radius"] == 4);
}

TEST_CASE("solve writes slices and a report") {
    REQUIRE(run("solve --coeff const:1 --psi gauss:1 --source const:0.5 --potential const:1 --dx 0.25 "
                "--radius 16 --times 0.1,0.2,0.3 -o sol") == 0);
    for (int k = 0; k < 3; ++k) CHECK(fs::exists("sol_t" + std::to_string(k) + ".csv"));
    const auto rep = nlohmann::json::parse(slurp("sol.json"));
    for (const char* k : {"panels", "picard_iters", "residual", "slices", "config"}) CHECK(rep.contains(k));
    CHECK(rep["slices"].size() == 3);
}

TEST_CASE("bound-check and verify") {
    REQUIRE(run("bound-check --bound lorentz --m 0 --dx 0.5,0.25 --per-decade 4") == 0);
    const auto j = nlohmann::json::parse(slurp("cli_stdout.txt"));
    CHECK(j["bound_id"] == "lorentz_m0");
    CHECK(j["per_dx"].size() == 2);

    REQUIRE(run("--threads 1 verify --suite mass") == 0);
    const auto v = nlohmann::json::parse(slurp("cli_stdout.txt"));
    CHECK(v["pass"] == true);
    const std::string first = slurp("cli_stdout.txt");
    REQUIRE(run("verify --suite mass --threads 1") == 0);
    CHECK(slurp("cli_stdout.txt") == first);

    // a suite that fails on the merits exits 3
    CHECK(run("verify --suite pang") == 3);
}
