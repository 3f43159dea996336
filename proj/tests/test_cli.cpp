#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qcl/cli.hpp"

using namespace qcl;
using namespace qcl::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() / ("qcl_test_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::remove_all(d);
    return d;
}

Options cached(const fs::path& dir) { return {true, dir.string(), 1, ""}; }
Options uncached() { return {false, "", 1, ""}; }

Json result_of(const Outcome& o) { return Json::parse(o.json); }

}  // namespace

TEST(Cli, GaussIdentityExample) {
    const Outcome o = run({"gauss", {{"p", "3"}, {"va", "0"}, {"vt", "0"}, {"xi", "0"}}, {}}, uncached());
    ASSERT_EQ(o.exit_code, 0) << o.json;
    const Json j = result_of(o);
    EXPECT_EQ(j["schema"], "v1");
    EXPECT_EQ(j["result"]["value_rational"]["num"], "1");
    EXPECT_EQ(j["result"]["value_rational"]["den"], "1");
}

TEST(Cli, CountBothEngines) {
    const Outcome o = run({"count", {{"n", "2"}, {"upsilon", "+-"}, {"X", "1"}, {"engine", "both"}}, {}}, uncached());
    ASSERT_EQ(o.exit_code, 0);
    const Json r = result_of(o)["result"];
    EXPECT_TRUE(r["equal"].get<bool>());
    EXPECT_EQ(r["counts"]["conv"], r["counts"]["brute"]);
    EXPECT_EQ(r["counts"]["conv"], "385");
}

TEST(Cli, CanonicalFormIgnoresSpelling) {
    const Request a = canonicalize({"count", {{"upsilon", "+-"}}, 7});
    const Request b = canonicalize({"count", {{"upsilon", "1,-1"}, {"n", "02"}, {"X", "1"}}, {}});
    EXPECT_EQ(canonical_string(a), canonical_string(b));
    EXPECT_EQ(request_hash(a), request_hash(b));
    EXPECT_EQ(request_hash(a).size(), 32u);
    EXPECT_FALSE(a.seed.has_value());
    const Request c = canonicalize({"density", {{"kind", "box"}, {"eps", "2/20"}}, {}});
    EXPECT_EQ(c.params.at("eps"), "1/10");
    EXPECT_EQ(c.params.at("upsilon"), "1,1");
    EXPECT_EQ(*c.seed, 1u);
}

TEST(Cli, CacheHitGivesIdenticalBytes) {
    const fs::path dir = fresh_dir("cache");
    const Request r{"repnum", {{"mmax", "30"}}, {}};
    const Outcome cold = run(r, cached(dir));
    const Outcome warm = run(r, cached(dir));
    EXPECT_FALSE(cold.cache_hit);
    EXPECT_TRUE(warm.cache_hit);
    EXPECT_EQ(cold.json, warm.json);
    EXPECT_TRUE(fs::exists(dir / (request_hash(canonicalize(r)) + ".json")));
    // Bypassing the cache recomputes the same bytes.
    EXPECT_EQ(run(r, uncached()).json, cold.json);
    fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"repnum", {{"m", "0"}}, {}}, uncached()).exit_code, 2);
    EXPECT_EQ(run({"count", {{"upsilon", "+-"}, {"bogus", "1"}}, {}}, uncached()).exit_code, 2);
    EXPECT_EQ(run({"nosuch", {}, {}}, uncached()).exit_code, 2);
    EXPECT_EQ(run({"gauss", {{"p", "4"}}, {}}, uncached()).exit_code, 2);
    EXPECT_EQ(run({"count", {{"upsilon", "+-+"}}, {}}, uncached()).exit_code, 2);
    const Outcome bad = run({"gauss", {{"p", "x"}}, {}}, uncached());
    EXPECT_EQ(result_of(bad)["error"]["kind"], 2);
    // Errors are not cached.
    const fs::path dir = fresh_dir("err");
    run({"repnum", {{"m", "0"}}, {}}, cached(dir));
    EXPECT_FALSE(fs::exists(dir) && !fs::is_empty(dir));
    fs::remove_all(dir);
}

TEST(Cli, VerificationResultsAreReported) {
    // A nonzero alpha must give an exactly vanishing difference; exit 0 means the certificate held.
    const Outcome o = run({"delta-check", {{"alpha", "2,0,0,0"}, {"Q", "8"}}, {}}, uncached());
    EXPECT_EQ(o.exit_code, 0);
    EXPECT_EQ(result_of(o)["result"]["difference"]["num"], "0");
}

TEST(Cli, MainEntryFlagsAndCsv) {
    const fs::path dir = fresh_dir("main");
    fs::create_directories(dir);
    const std::string csv = (dir / "out.csv").string();
    std::ostringstream out, err;
    const int code = main_entry({"--cache-dir", (dir / "c").string(), "--csv", csv, "--threads", "2", "density",
                                 "--kind", "split", "--p", "3", "--m", "2", "--upsilon=1,-1"},
                                out, err);
    EXPECT_EQ(code, 0) << err.str();
    std::ifstream f(csv);
    std::string header;
    std::getline(f, header);
    EXPECT_EQ(header, "count,m,normalized,p,split");
    int rows = 0;
    for (std::string line; std::getline(f, line);) ++rows;
    EXPECT_EQ(rows, 2);

    std::ostringstream out2, err2;
    main_entry({"--cache-dir", (dir / "c").string(), "density", "--kind=split", "--p=3", "--m=2", "--upsilon", "+-"}, out2, err2);
    EXPECT_EQ(out.str(), out2.str());
    EXPECT_NE(err2.str().find("cache hit"), std::string::npos);

    std::ostringstream out3, err3;
    EXPECT_EQ(main_entry({"count", "--upsilon"}, out3, err3), 2);
    fs::remove_all(dir);
}

TEST(Cli, ConfigFileAndEnvironmentPrecedence) {
    const fs::path dir = fresh_dir("cfg");
    fs::create_directories(dir);
    const fs::path cfg = dir / "qcl.conf";
    std::ofstream(cfg) << "# test config\ncache_dir = " << (dir / "from_config").string() << "\nthreads=2\n";
    std::ostringstream out, err;
    ASSERT_EQ(main_entry({"--config", cfg.string(), "repnum", "--m", "9"}, out, err), 0) << err.str();
    EXPECT_TRUE(fs::exists(dir / "from_config"));
    std::ostringstream o2, e2;
    ASSERT_EQ(main_entry({"--config", cfg.string(), "--cache-dir", (dir / "from_flag").string(), "repnum", "--m", "9"}, o2, e2), 0);
    EXPECT_TRUE(fs::exists(dir / "from_flag"));
    setenv("QCL_CACHE_DIR", (dir / "from_env").string().c_str(), 1);
    std::ostringstream o3, e3;
    ASSERT_EQ(main_entry({"--config", cfg.string(), "--cache-dir", (dir / "from_flag").string(), "repnum", "--m", "10"}, o3, e3), 0);
    unsetenv("QCL_CACHE_DIR");
    EXPECT_TRUE(fs::exists(dir / "from_env"));
    EXPECT_EQ(out.str(), o2.str());
    fs::remove_all(dir);
}

TEST(Cli, AuditExitStatusAndTimingOnStderr) {
    std::ostringstream out, err;
    const int code = main_entry({"--no-cache", "audit", "gauss-laws"}, out, err);
    EXPECT_EQ(code, 0);
    EXPECT_NE(err.str().find("[PASS] gauss-laws/shift_law"), std::string::npos);
    EXPECT_EQ(out.str().find("seconds"), std::string::npos);
    std::ostringstream o2, e2;
    EXPECT_EQ(main_entry({"--no-cache", "audit", "nosuch"}, o2, e2), 2);
}
