#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "besov_ns/cli.hpp"

using namespace besov_ns;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("besov_ns_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "besov-ns");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

/// Report text with the provenance block removed.
std::string without_provenance(const fs::path& p) {
    auto j = nlohmann::json::parse(slurp(p));
    j.erase("provenance");
    return j.dump();
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

const std::vector<std::string> kSmallSolve{"--N", "16", "--T", "0.1", "--dt", "0.01", "--n-picard", "3"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
}

}  // namespace

TEST(CliConfig, LineColumnOfByteOffset) {
    const std::string text = "ab\ncd\n\nef";
    using LC = std::pair<std::size_t, std::size_t>;
    EXPECT_EQ(cli::detail::line_column(text, 0), LC(1, 1));
    EXPECT_EQ(cli::detail::line_column(text, 4), LC(2, 2));
    EXPECT_EQ(cli::detail::line_column(text, 7), LC(4, 1));
}

TEST(CliConfig, SyntaxErrorIsLineAnchored) {
    const std::string text = "{\n  \"seed\": 1,\n  \"grid\": {\"N\": }\n}\n";
    try {
        cli::parse_config(text, "cfg.json");
        FAIL() << "expected a usage error";
    } catch (const cli::UsageError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("cfg.json:3:", 0), 0u) << e.what();
    }
}

TEST(CliConfig, UnknownKeyAndWrongTypeAreLineAnchored) {
    try {
        cli::parse_config("{\n\"solver\": {\n  \"dtt\": 0.1\n}}", "a.json");
        FAIL();
    } catch (const cli::UsageError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("a.json:3:3", 0), 0u) << e.what();
        EXPECT_NE(std::string(e.what()).find("/solver/dtt"), std::string::npos);
    }
    try {
        cli::parse_config("{\"grid\": {\"N\": 32.5}}", "b.json");
        FAIL();
    } catch (const cli::UsageError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("b.json:1:11", 0), 0u) << e.what();
    }
}

TEST(CliConfig, FileValuesOverlayDefaults) {
    const auto cfg = cli::parse_config(R"({"seed": 7, "solver": {"dt": 0.02}, "criteria": {"epsilon": 0.5}})", "c.json");
    EXPECT_EQ(cfg["seed"], 7);
    EXPECT_EQ(cfg["solver"]["dt"], 0.02);
    EXPECT_EQ(cfg["solver"]["T"], 1.0);
    EXPECT_EQ(cfg["criteria"]["epsilon"], 0.5);
}

TEST(CliExit, UsageErrorsReturnTwo) {
    const auto dir = scratch("usage");
    EXPECT_EQ(invoke({"frobnicate"}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"solve", "--no-such-flag"}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"solve", "--config", (dir / "missing.json").string()}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"criteria", "--out", dir.string()}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"criteria", "--experiment", "regularity", "--input", (dir / "nothing").string()}).code,
              cli::kExitUsage);
    write_text(dir / "bad.json", "{\n  \"seed\": ,\n}");
    const auto bad = invoke({"solve", "--config", (dir / "bad.json").string()});
    EXPECT_EQ(bad.code, cli::kExitUsage);
    EXPECT_NE(bad.err.find("bad.json:2:"), std::string::npos) << bad.err;
    EXPECT_EQ(invoke({"--help"}).code, cli::kExitOk);
}

TEST(CliExit, VerdictFailureReturnsOne) {
    const auto dir = scratch("verdict");
    write_text(dir / "boot.json", R"({"criteria": {"bootstrap": {"A": 1.0, "B": 1.0, "f": [0.5, 0.6]}}})");
    const auto r = invoke({"criteria", "--experiment", "bootstrap", "--config", (dir / "boot.json").string(), "--out",
                           dir.string()});
    EXPECT_EQ(r.code, cli::kExitVerdictFailure) << r.err;
    const auto rep = report_from_json(read_json_file(dir / "bootstrap.json"));
    EXPECT_FALSE(rep.verdict("hypotheses_met"));

    write_text(dir / "ok.json", R"({"criteria": {"bootstrap": {"A": 0.1, "B": 1.0, "f": [0.1, 0.105, 0.11]}}})");
    EXPECT_EQ(invoke({"criteria", "--experiment", "bootstrap", "--config", (dir / "ok.json").string(), "--out",
                      dir.string()})
                  .code,
              cli::kExitOk);
}

TEST(CliSolve, TraceRoundTripsAndRerunIsBitIdentical) {
    const auto dir = scratch("solve");
    const auto first = invoke(with({"solve", "--out", dir.string()}, kSmallSolve));
    ASSERT_EQ(first.code, cli::kExitOk) << first.err;
    ASSERT_TRUE(fs::exists(dir / "trace" / "manifest.json"));
    const auto report1 = without_provenance(dir / "solve.json");
    const auto sample1 = slurp(dir / "trace" / "sample_00005.bin");
    const auto trace = read_trace(dir / "trace");
    EXPECT_EQ(trace.grid().points(), 16);
    EXPECT_DOUBLE_EQ(trace.end(), 0.1);

    ASSERT_EQ(invoke(with({"solve", "--out", dir.string()}, kSmallSolve)).code, cli::kExitOk);
    EXPECT_EQ(report1, without_provenance(dir / "solve.json"));
    EXPECT_EQ(sample1, slurp(dir / "trace" / "sample_00005.bin"));
}

TEST(CliCriteria, RegularityOnSavedTraceHasVerdictAndPlotData) {
    const auto dir = scratch("regularity");
    ASSERT_EQ(invoke({"solve", "--out", (dir / "run").string(), "--N", "16", "--T", "0.25", "--dt", "0.005",
                      "--initial", "random-besov", "--amplitude", "0.3", "--seed", "4"})
                  .code,
              cli::kExitOk);
    const auto r = invoke({"criteria", "--experiment", "regularity", "--input", (dir / "run" / "trace").string(),
                           "--out", (dir / "crit").string()});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    const auto j = read_json_file(dir / "crit" / "regularity.json");
    ASSERT_TRUE(j["verdicts"].contains("decays_toward_zero"));
    EXPECT_TRUE(j["verdicts"]["decays_toward_zero"]["value"].get<bool>());
    EXPECT_TRUE(fs::exists(dir / "crit" / "sqrt_t_sup_norm.csv"));
    EXPECT_EQ(slurp(dir / "crit" / "sqrt_t_sup_norm.csv").rfind("t,value\n", 0), 0u);
}

TEST(CliCriteria, DeterministicAcrossCommands) {
    const auto dir = scratch("determinism");
    const std::vector<std::vector<std::string>> runs{
        {"decompose", "--initial", "random-besov", "--N", "32", "--seed", "11"},
        {"norms", "--initial", "random-besov", "--N", "32", "--seed", "11"},
        {"paraproduct", "--N", "16", "--seed", "11"},
        {"criteria", "--experiment", "uniqueness", "--N", "16", "--T", "0.1", "--dt", "0.02", "--n-picard", "2",
         "--initial", "random-besov", "--amplitude", "0.2", "--seed", "11"},
    };
    for (const auto& args : runs) {
        const auto out = dir / args[0];
        const auto a = invoke(with(args, {"--out", out.string()}));
        ASSERT_NE(a.code, cli::kExitUsage) << a.err;
        const std::string name = args[0] == "criteria" ? "uniqueness" : args[0];
        const auto first = without_provenance(out / (name + ".json"));
        invoke(with(args, {"--out", out.string()}));
        EXPECT_EQ(first, without_provenance(out / (name + ".json"))) << args[0];
    }
}

TEST(CliConfig, EveryFlagIsEchoedInTheReport) {
    const auto dir = scratch("echo");
    const std::vector<std::pair<std::string, std::string>> flags{
        {"--seed", "/seed"}, {"--N", "/grid/N"}, {"--dim", "/grid/dim"}, {"--T", "/solver/T"},
        {"--dt", "/solver/dt"}, {"--n-picard", "/solver/n_picard"}, {"--dealias", "/solver/dealias"},
        {"--tol-fixpoint", "/solver/tol_fixpoint"}, {"--order", "/solver/order"}, {"--substeps", "/solver/substeps"},
        {"--nonlinear", "/solver/nonlinear"}, {"--blowup-threshold", "/solver/blowup_threshold"},
        {"--geometric-samples", "/solver/geometric_samples"}, {"--geometric-decades", "/solver/geometric_decades"},
        {"--initial", "/initial/kind"}, {"--s", "/initial/s"}, {"--amplitude", "/initial/amplitude"},
        {"--r", "/criteria/r"}, {"--sigma", "/criteria/sigma"}, {"--epsilon", "/criteria/epsilon"},
        {"--levels", "/criteria/levels"}, {"--experiment", "/criteria/experiment"},
        {"--corpus-size", "/calibration/corpus_size"}, {"--write-constants", "/calibration/write_constants"},
        {"--threads", "/threads"}, {"--constants", "/constants"}, {"--out", "/out"}};
    const std::vector<std::string> values{"5", "16", "2", "0.1", "0.02", "2", "full", "1e-9", "1", "2", "false",
                                          "1e6", "8", "4", "taylor-green", "-0.25", "0.5", "0.4", "0.7", "0.3",
                                          "3", "theta", "40", "false", "1", (dir / "consts.json").string(),
                                          dir.string()};
    std::vector<std::string> args{"solve"};
    for (std::size_t i = 0; i < flags.size(); ++i) {
        args.push_back(flags[i].first);
        args.push_back(values[i]);
    }
    const auto r = invoke(args);
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto cfg = read_json_file(dir / "solve.json")["config"];
    for (std::size_t i = 0; i < flags.size(); ++i) {
        const auto& v = cfg[nlohmann::json::json_pointer(flags[i].second)];
        std::string echoed = v.is_string() ? v.get<std::string>() : v.dump();
        if (v.is_number_float()) {
            EXPECT_DOUBLE_EQ(v.get<double>(), std::stod(values[i])) << flags[i].first;
        } else {
            EXPECT_EQ(echoed, values[i]) << flags[i].first;
        }
    }
    EXPECT_EQ(cfg["command"], "solve");
    EXPECT_EQ(read_json_file(dir / "trace" / "manifest.json")["config"], cfg);
}

TEST(CliConfig, FlagsOverrideConfigFile) {
    const auto dir = scratch("override");
    write_text(dir / "c.json", R"({"grid": {"N": 32}, "solver": {"T": 0.1, "dt": 0.02, "n_picard": 2}})");
    ASSERT_EQ(invoke({"solve", "--config", (dir / "c.json").string(), "--N", "16", "--out", dir.string()}).code,
              cli::kExitOk);
    const auto cfg = read_json_file(dir / "solve.json")["config"];
    EXPECT_EQ(cfg["grid"]["N"], 16);
    EXPECT_EQ(cfg["solver"]["dt"], 0.02);
}

TEST(FieldIo, BinaryRoundTripIsExact) {
    const auto dir = scratch("io");
    const TorusGrid g(3, 8);
    const auto f = random_field(g, 3, 9, 1.0);
    write_field(dir / "f", f);
    const auto back = read_field(dir / "f.json");
    EXPECT_EQ(back.components(), 3);
    EXPECT_EQ(max_coefficient_difference(f, back), 0.0);
    const auto side = read_json_file(dir / "f.json");
    EXPECT_EQ(side["dim"], 3);
    EXPECT_EQ(side["n"], 8);
    EXPECT_EQ(fs::file_size(dir / "f.bin"), g.size() * 3 * sizeof(Complex));
}

TEST(FieldIo, TruncatedBinaryIsRejected) {
    const auto dir = scratch("io_trunc");
    write_field(dir / "f", random_field(TorusGrid(2, 8), 2, 1, 1.0));
    fs::resize_file(dir / "f.bin", 100);
    EXPECT_THROW(read_field(dir / "f"), std::runtime_error);
}
