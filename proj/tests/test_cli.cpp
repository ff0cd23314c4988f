#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace poisson_bv;
using poisson_bv::io::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "poisson_bv");
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, Exponents) {
    const auto r = run({"exponents", "--model", "h2", "--lambda", "0.3"});
    EXPECT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    ASSERT_EQ(j.size(), 2u);
    EXPECT_NEAR(j[0][0][0].get<double>(), 0.2, 1e-15);
    EXPECT_NEAR(j[1][0][0].get<double>(), 0.8, 1e-15);
    EXPECT_EQ(j[0][0][1].get<double>(), 0.0);
}

TEST(Cli, GenericRejection) {
    const auto r = run({"generic", "--model", "h2", "--lambda", "-0.5"});
    EXPECT_EQ(r.code, 2);
    const auto e = json::parse(r.err);
    EXPECT_EQ(e["j"], 1);
    EXPECT_EQ(e["w"], "-1");
    EXPECT_EQ(run({"generic", "--model", "h2", "--lambda", "0.3"}).code, 0);
}

TEST(Cli, VerifyInversion) {
    const auto r = run({"verify-inversion", "--model", "h2", "--lambda", "0.7", "--f", "fourier:1", "--tol", "1e-4"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_LE(j["residual_sup"].get<double>(), 1e-4);
    EXPECT_EQ(j["points"].size(), 16u);
    EXPECT_TRUE(j["points"][0].contains("target"));
    const auto bad = run({"verify-inversion", "--model", "h2", "--lambda", "0.7", "--f", "fourier:1", "--tol", "1e-30"});
    EXPECT_EQ(bad.code, 3);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"nonsense"}).code, 1);
    EXPECT_EQ(run({"exponents", "--model", "sl3", "--lambda", "0.3"}).code, 1);
    EXPECT_EQ(run({"exponents", "--model", "h2", "--lambda", "0.3,0.2"}).code, 1);
    EXPECT_EQ(run({"cfun", "--model", "h2", "--lambda", "-0.3"}).code, 2);
    EXPECT_EQ(run({"fuchs-solve", "--op", "0:-1,1", "--rhs", "0,1", "--order", "3"}).code, 2);
    EXPECT_EQ(run({"bv", "--model", "h2", "--lambda", "0.7", "--f", "fourier:1", "--n-points", "4"}).code, 1);
    EXPECT_EQ(run({"bv", "--model", "h2", "--lambda", "0.7", "--f", "fourier:1", "--condition-threshold", "2"}).code, 3);
    const auto r = run({"generic", "--model", "h2", "--lambda", "0"});
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(json::accept(r.err));
}

TEST(Cli, FuchsExamples) {
    auto r = run({"fuchs-solve", "--op", "0:-2.5,1", "--rhs", "0,1", "--order", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_NEAR(j["coefficients"][1][0].get<double>(), -2.0 / 3.0, 1e-15);
    r = run({"fuchs-solve", "--op", "0:3,1;1:1", "--rhs", "1", "--order", "4", "--method", "fixed-point", "--tol", "1e-14"});
    ASSERT_EQ(r.code, 0) << r.err;
    j = json::parse(r.out);
    EXPECT_NEAR(j["coefficients"][1][0].get<double>(), -1.0 / 12.0, 1e-14);
    EXPECT_GT(j["certified_radius"].get<double>(), 0.0);
    r = run({"fuchs-delta", "--op", "0:-0.5,1", "--layer", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["coefficients"][0][0].get<double>(), -2.0 / 3.0, 1e-15);
}

TEST(Cli, PointValues) {
    auto r = run({"spherical", "--model", "h2", "--lambda", "0.7", "--point", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["value"][0].get<double>(), 1.0, 1e-13);
    r = run({"poisson-eval", "--model", "h2xh2", "--lambda", "0.7,1.1", "--f", "fourier2:1", "--point", "0.1+0.2i;-0.3i"});
    EXPECT_EQ(r.code, 0) << r.err;
    r = run({"spherical", "--model", "h3", "--lambda", "0.6", "--point", "0,0,0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const double rr = 2 * std::atanh(0.5);
    EXPECT_NEAR(json::parse(r.out)["value"][0].get<double>(), std::sinh(0.6 * rr) / (0.6 * std::sinh(rr)), 1e-11);
}

TEST(Cli, CsvOutput) {
    auto r = run({"cfun", "--model", "h2", "--lambda", "0.7", "--output", "csv"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "re_c_integral,im_c_integral");
    r = run({"exponents", "--model", "h2xh2", "--lambda", "0.3,0.5", "--output", "csv"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "w,re_1,im_1,re_2,im_2");
    r = run({"bv", "--model", "h2", "--lambda", "0.7", "--f", "fourier:1", "--grid", "4", "--output", "csv"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
}

TEST(Cli, ByteIdenticalRuns) {
    const std::vector<std::string> a{"bv", "--model", "h2", "--lambda", "0.4+0.2i", "--f", "fourier:0.5,0,1,0,0.5", "--grid", "6"};
    const auto r1 = run(a), r2 = run(a);
    EXPECT_EQ(r1.code, 0);
    EXPECT_EQ(r1.out, r2.out);
}

TEST(Cli, HelpForEverySubcommand) {
    const auto top = run({"--help"});
    EXPECT_EQ(top.code, 0);
    for (const char* s : {"exponents", "generic", "poisson-eval", "spherical", "cfun", "bv", "verify-inversion",
                          "fuchs-solve", "fuchs-delta"}) {
        EXPECT_NE(top.out.find(s), std::string::npos) << s;
        const auto h = run({s, "--help"});
        EXPECT_EQ(h.code, 0) << s;
        EXPECT_NE(h.out.find("--output"), std::string::npos) << s;
    }
}

TEST(Cli, ConfigRoundTrip) {
    cli::RunConfig c;
    c.model = "h2xh2";
    c.lambda = {cplx(0.7, -0.1), 1.1};
    c.f = "fourier2:1,0,0;0,1,0;0,0,1";
    c.grid = {6, 8};
    c.tol = 3e-5;
    c.seed = 42;
    c.extraction.n_points = 14;
    c.extraction.t0 = 0.25;
    c.method = "fixed-point";
    const auto back = cli::config_from_json(json::parse(cli::to_json(c).dump()));
    EXPECT_TRUE(back == c);
    EXPECT_EQ(cli::to_json(back).dump(), cli::to_json(c).dump());
    EXPECT_THROW(cli::config_from_json(json{{"bogus", 1}}), Error);
}

TEST(Cli, ConfigFileMergesWithFlags) {
    const auto path = std::filesystem::temp_directory_path() / "poisson_bv_cli_test.json";
    {
        std::ofstream o(path);
        o << R"({"model": "h2", "lambda": [[0.3, 0.0]], "output": "csv"})";
    }
    auto r = run({"exponents", "--config", path.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, 1), "w");
    r = run({"exponents", "--config", path.string(), "--output", "json", "--lambda", "0.1"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NEAR(json::parse(r.out)[0][0][0].get<double>(), 0.4, 1e-15);
    r = run({"exponents", "--config", path.string(), "--dump-config"});
    const auto dumped = json::parse(r.out);
    EXPECT_EQ(dumped["model"], "h2");
    EXPECT_EQ(run({"exponents", "--config", "/nonexistent/x.json"}).code, 1);
    std::filesystem::remove(path);
}

TEST(CliParsing, ComplexNumbers) {
    EXPECT_EQ(io::parse_complex("0.4+0.2i"), cplx(0.4, 0.2));
    EXPECT_EQ(io::parse_complex("-i"), cplx(0.0, -1.0));
    EXPECT_EQ(io::parse_complex("1e-3-2e-2i"), cplx(1e-3, -2e-2));
    EXPECT_EQ(io::parse_complex(" 3 "), cplx(3.0));
    EXPECT_THROW(io::parse_complex("abc"), Error);
    for (cplx z : {cplx(0.1, -0.7), cplx(1e-20, 3.0), cplx(-2.0)})
        EXPECT_EQ(io::parse_complex(io::format_complex(z)), z);
}

TEST(CliParsing, BoundaryFunctionSpecs) {
    auto f = io::parse_boundary_function(ModelId::h2, "fourier:0.5,0,0.5");
    EXPECT_NEAR(f(BoundaryPoint::h2(0.3)).real(), std::cos(0.3), 1e-15);
    f = io::parse_boundary_function(ModelId::h2, "samples:1,0,-1,0");
    EXPECT_NEAR(f(BoundaryPoint::h2(0.0)).real(), 1.0, 1e-14);
    EXPECT_THROW(io::parse_boundary_function(ModelId::h3, "fourier:0.5,0,0.5"), Error);
    EXPECT_THROW(io::parse_boundary_function(ModelId::h2, "cheb:1"), Error);
    const auto j = io::to_json(io::parse_boundary_function(ModelId::h2xh2, "fourier2:0,1,0;1,2,1;0,1,0"));
    const auto g = io::boundary_function_from_json(j);
    EXPECT_EQ(g.coefficient(0, 0), cplx(2.0));
    EXPECT_EQ(g.coefficient(-1, 0), cplx(1.0));
}
