#include <mjsr/io.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using mjsr::io::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(MJSR_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const std::string& name) { return std::string(MJSR_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "mjsr_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

json aggregates(const std::string& args) {
    const auto r = run(args + " --format json");
    EXPECT_EQ(r.code, 0) << args;
    return json::parse(r.out)["aggregates"];
}

} // namespace

TEST(Cli, BoundsOnGoldenMean) {
    const auto r = run("bounds " + data("golden_mean.json") + " --format json");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    for (const char* key : {"tool", "version", "command", "instance_hash", "norm", "tolerances", "points",
                            "aggregates", "verdicts"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_NEAR(j["aggregates"]["best_lower"].get<double>(), 2.449490, 1e-6);
    EXPECT_NEAR(j["aggregates"]["best_upper"].get<double>(), 2.449490, 1e-6);
    EXPECT_EQ(j["points"].size(), 16u);
    EXPECT_EQ(j["norm"], "rowsum");
}

TEST(Cli, OutputIsByteStable) {
    for (const char* fmt : {"text", "json"}) {
        const auto a = run("bounds " + data("example1.json") + " --n-max 5 --threads 4 --format " + fmt);
        const auto b = run("bounds " + data("example1.json") + " --n-max 5 --threads 1 --format " + fmt);
        EXPECT_EQ(a.code, 0);
        EXPECT_EQ(a.out, b.out);
    }
}

TEST(Cli, KStepFileIsRecodedFirst) {
    const auto agg = aggregates("bounds " + data("golden_order2.json") + " --n-max 8");
    EXPECT_NEAR(agg["best_lower"].get<double>(), std::sqrt(6.0), 1e-9);
    const auto rec = run("kstep-recode " + data("golden_order2.json"));
    ASSERT_EQ(rec.code, 0);
    EXPECT_EQ(json::parse(rec.out)["omega"], json::parse("[[1,0,1],[1,0,1],[0,1,0]]"));
}

TEST(Cli, ValidationErrorExitsThreeWithLocation) {
    const std::string cmd = std::string(MJSR_CLI_PATH) + " bounds " + data("bad_omega.json") + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    ASSERT_NE(p, nullptr);
    char buf[4096];
    std::string out;
    for (std::size_t got; (got = std::fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, got);
    const int status = pclose(p);
    EXPECT_EQ(WEXITSTATUS(status), 3);
    EXPECT_NE(out.find("omega[2,1]"), std::string::npos) << out;
}

TEST(Cli, ParseAndUsageErrorsExitTwo) {
    const auto bad = scratch("not_json.json");
    write(bad, "{\"dimension\": 1, \"matrices\": ");
    EXPECT_EQ(run("bounds " + bad.string()).code, 2);
    EXPECT_EQ(run("bounds " + data("golden_mean.json") + " --norm spectral").code, 2);
    EXPECT_EQ(run("bounds " + data("golden_mean.json") + " --class periodic").code, 2);
    EXPECT_EQ(run("frobnicate " + data("golden_mean.json")).code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, BudgetExceededExitsFour) {
    EXPECT_EQ(run("bounds " + data("pair.json") + " --n-max 30").code, 4);
    EXPECT_EQ(run("bounds " + data("pair.json") + " --n-max 10 --budget 100").code, 4);
    EXPECT_EQ(run("words " + data("pair.json") + " --n 20 --class chain --budget 1000").code, 4);
}

TEST(Cli, LiftRoundTripMatchesOriginal) {
    const auto lifted = run("lift " + data("example1.json"));
    ASSERT_EQ(lifted.code, 0);
    const auto path = scratch("example1_lift.json");
    write(path, lifted.out);
    const auto j = json::parse(lifted.out);
    EXPECT_EQ(j["dimension"], 8);
    EXPECT_EQ(j["omega"], json::parse("[[1,1,1,1],[1,1,1,1],[1,1,1,1],[1,1,1,1]]"));

    for (const char* norm : {"rowsum", "colsum", "frobenius"}) {
        const std::string flags = std::string(" --n-max 5 --norm ") + norm;
        const auto a = aggregates("bounds " + path.string() + flags);
        const auto b = aggregates("bounds " + data("example1.json") + flags);
        for (const char* k : {"best_lower", "best_upper"})
            EXPECT_NEAR(a[k].get<double>(), b[k].get<double>(), 1e-9 * (1 + b[k].get<double>())) << norm << " " << k;
    }
}

TEST(Cli, LiftOfSingletonIsTheInput) {
    const auto path = scratch("single.json");
    write(path, R"({"dimension":2,"field":"real","matrices":[[[1,2],[3,4]]],"omega":[[1]]})");
    const auto r = run("lift " + path.string());
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["matrices"], json::parse("[[[1.0,2.0],[3.0,4.0]]]"));
    EXPECT_EQ(j["omega"], json::parse("[[1]]"));
}

TEST(Cli, VerifyExampleAndCorruptedLift) {
    const auto good = run("lift " + data("example1.json"));
    const auto good_path = scratch("good_lift.json");
    write(good_path, good.out);
    EXPECT_EQ(run("verify " + data("example1.json") + " --n-max 4 --lift " + good_path.string()).code, 0);

    auto j = json::parse(good.out);
    for (auto& row : j["matrices"][2])
        for (auto& x : row) x = 0.0;
    const auto bad_path = scratch("corrupted_lift.json");
    write(bad_path, j.dump());
    const auto r = run("verify " + data("example1.json") + " --n-max 4 --format json --lift " + bad_path.string());
    EXPECT_EQ(r.code, 1);
    const auto report = json::parse(r.out);
    bool members_failed = false;
    for (const auto& v : report["verdicts"])
        if (v["name"] == "claimed_lift_members") members_failed = !v["passed"].get<bool>();
    EXPECT_TRUE(members_failed);
}

TEST(Cli, VerifyReportsCrossBoundMargins) {
    const auto r = run("verify " + data("golden_mean.json") + " --format json");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    bool seen = false;
    for (const auto& v : j["verdicts"])
        if (v["name"] == "cross_bound") {
            seen = true;
            EXPECT_EQ(v["details"].size(), 7u);
            EXPECT_NEAR(v["details"][0]["margin"].get<double>(), 3.0 - std::sqrt(6.0), 1e-9);
        }
    EXPECT_TRUE(seen);
    EXPECT_EQ(run("verify " + data("golden_order2.json") + " --n-max 6").code, 0);
    EXPECT_EQ(run("verify " + data("acyclic.json") + " --n-max 4").code, 0);
}

TEST(Cli, Words) {
    auto r = run("words " + data("golden_mean.json") + " --n 2");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "(1,1)\n(1,2)\n(2,1)\ncount 3 (matches transfer count)\n");
    r = run("words " + data("example1.json") + " --n 3 --class periodic --format json");
    EXPECT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    bool found = false;
    for (const auto& w : j["words"]) found = found || w == json::parse("[1,3,4]");
    EXPECT_TRUE(found);
    EXPECT_TRUE(j["count_check"].get<bool>());
    r = run("words " + data("example1.json") + " --n 1 --class chain --format json");
    EXPECT_EQ(json::parse(r.out)["count"], 4);
    r = run("words " + data("golden_order2.json") + " --n 3");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("count 5"), std::string::npos) << r.out;
}

TEST(Cli, CompareClassesShowsStrictGap) {
    const auto r = run("bounds " + data("acyclic.json") + " --n-max 2 --compare-classes --format json");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    double markov = -1, chain = -1;
    for (const auto& p : j["points"])
        if (p["n"] == 2) {
            if (p["class"] == "markov") markov = p["value"];
            if (p["class"] == "chain") chain = p["value"];
        }
    EXPECT_EQ(markov, 0.0);
    EXPECT_NEAR(chain, std::sqrt(6.0), 1e-9);
    EXPECT_TRUE(j["verdicts"][0]["passed"].get<bool>());
}

TEST(Cli, ComplexInstance) {
    const auto agg = aggregates("bounds " + data("rotation_complex.json") + " --n-max 4");
    EXPECT_NEAR(agg["best_lower"].get<double>(), 1.0, 1e-9);
    EXPECT_NEAR(agg["best_upper"].get<double>(), 1.0, 1e-9);
}
