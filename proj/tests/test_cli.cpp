#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "biparam/error.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using biparam::cli::run;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch()
{
    const fs::path d = fs::current_path() / "cli_scratch";
    fs::create_directories(d);
    return d;
}

std::string path(const std::string& name)
{
    return (scratch() / name).string();
}

} // namespace

TEST_CASE("every subcommand runs at small sizes")
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::vector<std::string>> runs{
        {"check-symbol"},
        {"check-symbol", "--symbol", "two_param_tensor", "--mode", "two_param", "--order", "2"},
        {"kato-ponce", "--n", "512", "--width", "0.01"},
        {"kato-ponce", "--dim", "2", "--n", "128", "--width", "0.03", "--beta", "1", "--lambdas", "1,2"},
        {"squarefns", "--n", "32", "--mode", "MS"},
        {"squarefns", "--n", "32", "--mode", "SS"},
        {"squarefns", "--n", "32", "--mode", "MM"},
        {"tiles-stopping", "--n", "64"},
        {"tiles-use-bound", "--n", "64", "--instances", "3"},
        {"stratify", "--n", "32"},
        {"journe", "--n", "64", "--rectangles", "4"},
        {"counterexample", "--n", "16..64", "--samples", "2"},
        {"counterexample", "--op", "v2", "--n", "16..64", "--samples", "2"},
        {"counterexample", "--op", "control", "--n", "16..64", "--samples", "2"},
        {"counterexample", "--op", "s", "--n", "16..1024"},
        {"bht-crosscheck", "--n", "32"},
        {"bht-crosscheck", "--dim", "2", "--n", "16"},
    };
    int i = 0;
    for (auto args : runs) {
        const std::string out = path("run" + std::to_string(i++) + ".csv");
        args.insert(args.end(), {"--out", out});
        CAPTURE(args[0]);
        const auto r = call(args);
        CHECK(r.code == 0);
        CHECK(r.err.empty());
        CHECK(fs::file_size(out) > 0);
        const std::string manifest = slurp(out + ".manifest");
        CHECK(manifest.find("subcommand = " + args[0]) != std::string::npos);
        CHECK(manifest.find("exit_code = 0") != std::string::npos);
        CHECK(manifest.find("wall_seconds") != std::string::npos);
    }
    CHECK(fs::exists(path("run4.csv.MS.bpgf")));
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 60.0);
}

TEST_CASE("same seed gives identical output")
{
    for (const std::string sub : {"journe", "tiles-stopping"}) {
        const auto a = path(sub + "_a.csv"), b = path(sub + "_b.csv");
        REQUIRE(call({sub, "--n", "64", "--seed", "7", "--out", a}).code == 0);
        REQUIRE(call({sub, "--n", "64", "--seed", "7", "--out", b}).code == 0);
        CHECK(slurp(a) == slurp(b));
    }
    // thread count does not change results
    const auto a = path("ce_1.csv"), b = path("ce_3.csv");
    REQUIRE(call({"counterexample", "--n", "16..64", "--samples", "2", "--threads", "1", "--out", a}).code == 0);
    REQUIRE(call({"counterexample", "--n", "16..64", "--samples", "2", "--threads", "3", "--out", b}).code == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("invalid input exits with the validation code")
{
    CHECK(call({"counterexample", "--r", "2", "--out", path("bad.csv")}).code == 2);
    CHECK(call({"kato-ponce", "--p", "3", "--out", path("bad.csv")}).code == 2);
    CHECK(call({"squarefns", "--mode", "XY", "--out", path("bad.csv")}).code == 2);
    CHECK(call({"journe", "--n", "100", "--out", path("bad.csv")}).code == 2);
    CHECK(call({"journe", "--set", "nonsense=1"}).code == 2);
    CHECK(call({"no-such-command"}).code == 2);
    CHECK(call({}).code == 2);
    const auto r = call({"counterexample", "--r", "2", "--out", path("bad.csv")});
    CHECK(r.err.find("Hoelder") != std::string::npos);
    CHECK(call({"journe", "--help"}).code == 0);
}

TEST_CASE("config sources and precedence")
{
    const auto kv = biparam::cli::parse_config_text("# comment\n n = 64 \nseed=3 # trailing\n\nout = x.csv\n");
    CHECK(kv.at("n") == "64");
    CHECK(kv.at("seed") == "3");
    CHECK(kv.at("out") == "x.csv");
    CHECK_THROWS_AS(biparam::cli::parse_config_text("just words\n"), biparam::InvalidArgument);

    biparam::cli::ExperimentConfig c{"counterexample", biparam::cli::subcommand_defaults("counterexample")};
    c.values["n"] = "16..128";
    CHECK(c.get_sizes("n") == std::vector<int>{16, 32, 64, 128});
    c.values["n"] = "3,5,9";
    CHECK(c.get_sizes("n") == std::vector<int>{3, 5, 9});
    c.values["p"] = "1/3,inf,2";
    const auto l = c.get_list("p");
    CHECK(l[0] == doctest::Approx(1.0 / 3));
    CHECK(std::isinf(l[1]));
    c.values["p"] = "abc";
    CHECK_THROWS_AS(c.get_double("p"), biparam::InvalidArgument);
    CHECK_THROWS_AS(biparam::cli::subcommand_defaults("nope"), biparam::InvalidArgument);

    // file sets seed 5 and n 64; a flag then overrides n and --set overrides seed
    const auto cfg = path("journe.cfg");
    std::ofstream(cfg) << "n = 64\nseed = 5\nrectangles = 3\n";
    const auto out = path("cfg.csv");
    REQUIRE(call({"journe", "--config", cfg, "--n", "128", "--set", "seed=9", "--out", out}).code == 0);
    const std::string m = slurp(out + ".manifest");
    CHECK(m.find("config.n = 128") != std::string::npos);
    CHECK(m.find("config.seed = 9") != std::string::npos);
    CHECK(m.find("config.rectangles = 3") != std::string::npos);
    std::ofstream(cfg) << "bogus = 1\n";
    CHECK(call({"journe", "--config", cfg}).code == 2);
}

TEST_CASE("report merges summaries")
{
    const auto empty = call({"report"});
    CHECK(empty.code == 0);
    CHECK(empty.out == "file,schema,metric,value\n");

    const auto a = path("rep_a.csv"), b = path("rep_b.csv"), j = path("rep_j.csv");
    REQUIRE(call({"counterexample", "--n", "16..64", "--samples", "2", "--out", a}).code == 0);
    REQUIRE(call({"counterexample", "--op", "control", "--n", "16..64", "--samples", "2", "--out", b}).code == 0);
    REQUIRE(call({"journe", "--n", "64", "--out", j}).code == 0);
    const auto merged = path("merged.csv");
    CHECK(call({"report", a, b, "--out", merged}).code == 0);
    const std::string text = slurp(merged);
    CHECK(text.find("rep_a.csv,growth,slope") != std::string::npos);
    CHECK(text.find("rep_b.csv,growth,slope") != std::string::npos);

    const auto mixed = call({"report", a, j});
    CHECK(mixed.code != 0);
    CHECK(mixed.err.find("column") != std::string::npos);
    CHECK(call({"report", path("missing.csv")}).code == 2);
}
