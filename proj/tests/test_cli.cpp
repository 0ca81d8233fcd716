#include "cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "fdyn-cli");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = fdyn::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string temp_file(const std::string& name, const std::string& text)
{
    const auto p = std::filesystem::temp_directory_path() / ("fdyn_test_" + name);
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("cli: cantor dim report")
{
    const auto r = cli({"cantor", "dim", "--model", "ternary", "--tol", "1e-6"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["command"] == "cantor dim");
    CHECK(j["config"]["model"] == "ternary");
    CHECK(j.contains("versions"));
    const double lo = j["result"]["dimension"]["lower"], hi = j["result"]["dimension"]["upper"];
    CHECK(lo <= 0.6309297536);
    CHECK(hi >= 0.6309297535);
    CHECK(hi - lo <= 1e-6);
}

TEST_CASE("cli: mpy bound")
{
    const auto r = cli({"py", "mpy-bound", "--ds", "0.52", "--du", "0.52", "--eta", "0.01", "--beta", "2", "--tau", "0.01"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["result"]["d"].get<double>() == doctest::Approx(1.5153).epsilon(1e-4));
    const auto bad = cli({"py", "mpy-bound", "--ds", "0.61", "--du", "0.61", "--eta", "0.01", "--beta", "2", "--tau", "0.01"});
    REQUIRE(bad.code == 0);
    CHECK_FALSE(nlohmann::json::parse(bad.out)["result"]["feasible"].get<bool>());
}

TEST_CASE("cli: validation failures exit 2 with a useful message")
{
    const auto overlap = temp_file("overlap.json", R"({"hull": [0, 1], "branches": [
        {"label": "A", "domain": [0, "1/2"], "map": {"type": "affine", "slope": 2, "offset": 0}},
        {"label": "B", "domain": ["2/5", 1], "map": {"type": "affine", "slope": "5/3", "offset": "-2/3"}}]})");
    const auto r = cli({"model", "validate", "--model", overlap});
    CHECK(r.code == 2);
    CHECK(r.err.find("overlap") != std::string::npos);

    const auto broken = temp_file("broken.json", "{\n  \"hull\": [0, 1],\n  \"branches\": [\n");
    const auto b = cli({"model", "validate", "--model", broken});
    CHECK(b.code == 2);
    CHECK(b.err.find("line") != std::string::npos);
    CHECK(b.err.find("column") != std::string::npos);

    CHECK(cli({"cantor", "dim", "--model", "ternary", "--tol", "-1"}).code == 2);
    CHECK(cli({"cantor", "frobnicate"}).code == 2);
    CHECK(cli({"py", "exclude", "--eta", "0.5"}).code == 2);
}

TEST_CASE("cli: resolution and budget failures exit 3")
{
    CHECK(cli({"cantor", "gaps", "--model", "ternary", "--depth", "40"}).code == 3);
    CHECK(cli({"py", "catalog", "--model", "toy_het", "--n-max", "10", "--w-min", "1e-9", "--max-elements", "20"}).code == 3);
}

TEST_CASE("cli: model list and validate")
{
    const auto r = cli({"model", "list"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("toy_het") != std::string::npos);
    CHECK(cli({"model", "validate", "--model", "toy_het"}).code == 0);
    CHECK(cli({"model", "validate", "--model", "markov_golden"}).code == 0);
}

TEST_CASE("cli: CSV output and environment overrides")
{
    const auto path = (std::filesystem::temp_directory_path() / "fdyn_test_gaps.csv").string();
    REQUIRE(cli({"cantor", "gaps", "--model", "ternary", "--depth", "2", "--out", path}).code == 0);
    const std::string csv = slurp(path);
    CHECK(csv.rfind("# ", 0) == 0);
    CHECK(csv.find("0.111111111111") != std::string::npos);

    setenv("FDYN_DEPTH", "3", 1);
    const auto r = cli({"cantor", "gaps", "--model", "ternary"});
    unsetenv("FDYN_DEPTH");
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["config"]["depth"] == 3);
}

TEST_CASE("cli: identical runs give identical bytes")
{
    const std::vector<std::string> args{"scan", "marstrand", "--model", "middle_fifth", "--depth", "6"};
    const auto a = cli(args);
    const auto b = cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto c = args;
    c.insert(c.end(), {"--threads", "4"});
    CHECK(cli(c).out == a.out);
    const auto t = cli({"cantor", "dim", "--model", "ternary", "--timestamp"});
    CHECK(nlohmann::json::parse(t.out).contains("timestamp"));
}
