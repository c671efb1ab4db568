#include "doctest.h"

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the command-line tool with stderr folded into stdout.
Run run(const std::string& args) {
    const std::string cmd = std::string(DCBNET_CLI_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    while (const auto n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string scenario(const std::string& name) { return std::string(DCBNET_SCENARIO_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = std::string(DCBNET_TEST_TMP) + "/" + name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("build reports the state space") {
    auto r = run("build " + scenario("toy.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("5 states, 9 transitions") != std::string::npos);
    r = run("build " + scenario("single.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("2 states, 2 transitions") != std::string::npos);
}

TEST_CASE("dot output") {
    const auto path = std::string(DCBNET_TEST_TMP) + "/toy.dot";
    const auto r = run("build " + scenario("toy.json") + " --dot " + path);
    CHECK(r.code == 0);
    std::ifstream in(path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.rfind("digraph", 0) == 0);
}

TEST_CASE("validation failures exit with 1") {
    const auto bad = write_temp(
        "bad_primary.json",
        R"({"n_basic": 4, "scheme": "P2DCB", "wlans": [{"id": "Q", "lo": 1, "len": 2, "primary": 3, "cw": 16}]})");
    auto r = run("build " + bad);
    CHECK(r.code == 1);
    CHECK(r.out.find("'Q'") != std::string::npos);

    r = run("solve " + std::string(DCBNET_TEST_TMP) + "/does_not_exist.json");
    CHECK(r.code == 1);
    r = run("solve " + scenario("toy.json") + " --p-e 2");
    CHECK(r.code == 1);
    r = run("frobnicate");
    CHECK(r.code == 1);
    r = run("--help");
    CHECK(r.code == 0);
}

TEST_CASE("solve with certain loss gives zero throughput") {
    const auto r = run("solve " + scenario("toy.json") + " --p-e 1 --csv -");
    CHECK(r.code == 0);
    CHECK(r.out.find("\nA,0,") != std::string::npos);
    CHECK(r.out.find("\nB,0,") != std::string::npos);
}

TEST_CASE("csv output carries provenance") {
    const auto r = run("solve " + scenario("toy.json") + " --csv -");
    CHECK(r.code == 0);
    CHECK(r.out.find("# dcbnet ") != std::string::npos);
    CHECK(r.out.find("command=solve") != std::string::npos);
    CHECK(r.out.find("scenario_hash=") != std::string::npos);
    CHECK(r.out.find("wlan_id,throughput_bps,expected_width") != std::string::npos);
}

TEST_CASE("analyze is deterministic") {
    const auto a = run("analyze " + scenario("toy.json") + " --seed 3");
    const auto b = run("analyze " + scenario("toy.json") + " --seed 3");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("mixing") != std::string::npos);
}

TEST_CASE("simulate and dense-sweep run") {
    auto r = run("simulate " + scenario("toy.json") + " --replications 2 --horizon 2 --csv -");
    CHECK(r.code == 0);
    CHECK(r.out.find("command=simulate") != std::string::npos);
    r = run("simulate " + scenario("toy.json") + " --mode hovering");
    CHECK(r.code == 1);
    r = run("dense-sweep --m-values 1,2 --replications 2 --horizon 1 --csv -");
    CHECK(r.code == 0);
    CHECK(r.out.find("M,scheme,") != std::string::npos);
}

}
