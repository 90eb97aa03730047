#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "mrt/cli.hpp"
#include "mrt/error.hpp"
#include "mrt/io.hpp"
#include "mrt/parallel.hpp"
#include "oracles.hpp"

using namespace mrt;

namespace {

const std::string kData = MRT_DATA_DIR;

Json report_of(const cli::RunResult& r) { return Json::parse(r.report); }

cli::RunConfig config(const std::string& command, const std::string& file) {
    cli::RunConfig cfg;
    cfg.command = command;
    cfg.input = kData + "/" + file;
    return cfg;
}

std::string error_of(const std::string& csv) {
    std::istringstream in(csv);
    try {
        parse_csv(in);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::input);
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Io, CsvParsing) {
    std::istringstream in("# a comment\n# dim=2\n0.5, 0.25, 1\n\n1,2,0.5\n");
    DiscreteMeasure mu = parse_csv(in);
    EXPECT_EQ(mu.size(), 2);
    EXPECT_EQ(mu.dim(), 2);
    EXPECT_EQ(mu.point(0)[1], 0.25);
    EXPECT_EQ(mu.total(), 1.5);
    std::istringstream three("1,2,3,4\n");
    EXPECT_EQ(parse_csv(three).dim(), 3);
}

TEST(Io, CsvErrorsNameTheLine) {
    EXPECT_NE(error_of("0,0,1\n0,0,0\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("0,0,1\n0,x,1\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("0,0,1\n0,0,1,1\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("# dim=3\n0,0,1\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("5\n").find("line 1"), std::string::npos);
    EXPECT_FALSE(error_of("").empty());
}

TEST(Io, JsonParsingAndErrors) {
    DiscreteMeasure mu = parse_json_measure(R"({"dim": 2, "atoms": [[0, 0, 1], [1, 0.5, 2]]})");
    EXPECT_EQ(mu.size(), 2);
    EXPECT_EQ(mu.total(), 3.0);
    auto err = [](const std::string& s) {
        try {
            parse_json_measure(s);
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(err(R"({"dim": 2, "atoms": [[0, 0, 1], [1, 0.5]]})").find("atom 1"), std::string::npos);
    EXPECT_NE(err(R"({"dim": 2, "atoms": [[0, 0, -1]]})").find("atom 0"), std::string::npos);
    EXPECT_FALSE(err(R"({"dim": 2})").empty());
    EXPECT_FALSE(err("{").empty());
}

TEST(Io, JsonRoundTripIsBitwise) {
    oracle::Rng rng(81);
    PointList pts;
    std::vector<double> w;
    for (int i = 0; i < 50; ++i) {
        pts.push_back(oracle::pt(oracle::uniform(rng, -1, 1) / 3, std::exp(oracle::uniform(rng, -30, 30))));
        w.push_back(oracle::uniform(rng, 1e-9, 10));
    }
    DiscreteMeasure mu(to_matrix(pts), w);
    DiscreteMeasure back = parse_json_measure(dump_json(measure_json(mu)));
    ASSERT_EQ(back.size(), mu.size());
    for (int i = 0; i < mu.size(); ++i) {
        EXPECT_EQ(back.point(i), mu.point(i));
        EXPECT_EQ(back.weight(i), mu.weight(i));
    }
}

TEST(Cli, ValidateOnCollinearFixture) {
    cli::RunResult r = cli::run(config("validate", "collinear.csv"));
    EXPECT_EQ(r.exit_code, 0) << r.report;
    Json j = report_of(r);
    EXPECT_TRUE(j.contains("result"));
    EXPECT_EQ(j["config"]["command"], "validate");
}

TEST(Cli, CircleFixtureLengthIsFrozen) {
    std::ifstream in(kData + "/circle_expected.json");
    Json expected = Json::parse(in);
    cli::RunConfig cfg = config("curve", "circle.csv");
    cfg.depth = expected["depth"].get<int>();
    cfg.cstar = expected["cstar"].get<double>();
    cli::RunResult r = cli::run(cfg);
    ASSERT_EQ(r.exit_code, 0) << r.report.substr(0, 2000);
    Json j = report_of(r);
    double got = j["result"]["length"]["dedup"].get<double>();
    double want = expected["dedup_length"].get<double>();
    EXPECT_NEAR(got, want, expected["rel_tol"].get<double>() * want);
    EXPECT_TRUE(j["result"]["soundness"]["ok"].get<bool>());
}

TEST(Cli, SingleAtomJonesIsZero) {
    DiscreteMeasure mu = oracle::measure_of({oracle::pt(0.4, 0.4)});
    cli::RunConfig cfg;
    cfg.command = "jones";
    cfg.k_max = 6;
    cli::RunResult r = cli::run(cfg, mu);
    ASSERT_EQ(r.exit_code, 0) << r.report;
    EXPECT_EQ(r.report.find("\"divergent\": true"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    cli::RunConfig bad = config("beta", "collinear.csv");
    bad.p = 0.5;
    cli::RunResult r = cli::run(bad);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_EQ(report_of(r)["error"]["kind"], "input");
    EXPECT_EQ(cli::run(config("beta", "missing.csv")).exit_code, 2);
    EXPECT_EQ(cli::run(config("nonsense", "collinear.csv")).exit_code, 2);
    cli::RunConfig warn = config("beta", "collinear.csv");
    warn.p = 3.0;
    warn.k_hi = 2;
    Json j = report_of(cli::run(warn));
    EXPECT_TRUE(j.contains("warnings"));
}

TEST(Cli, ReportsDoNotDependOnThreads) {
    cli::RunConfig cfg = config("jones", "collinear.csv");
    cfg.k_max = 5;
    cfg.threads = 1;
    std::string one = cli::run(cfg).report;
    cfg.threads = 4;
    std::string four = cli::run(cfg).report;
    EXPECT_EQ(one, four);
    set_threads(0);
}
