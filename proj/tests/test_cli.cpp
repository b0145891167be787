#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = harq_ee::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("harq_ee_cli_test_" + name);
}

} // namespace

TEST(Cli, GoldenHeaders) {
    EXPECT_EQ(first_line(invoke({"curve", "--snr-grid", "0.01:1:3"}).out), "snr,r_avg,eb_db");
    EXPECT_EQ(first_line(invoke({"ee"}).out), "source,regime,eb_min,eb_min_db,s0,eps_star,a");
    EXPECT_EQ(first_line(invoke({"simulate", "--samples", "1000"}).out), "t,pmf_analytic,pmf_empirical,stderr");
    EXPECT_EQ(first_line(invoke({"queue", "--blocks", "20000", "--M", "3", "--load", "0.5"}).out), "q,overflow_prob");
    EXPECT_EQ(first_line(invoke({"optrate", "--snr-grid", "1:2:2"}).out), "snr,rate,outage,r_avg");
}

TEST(Cli, EeRowUsesStableFormatting) {
    const Outcome r = invoke({"ee", "--M", "1", "--eps", "0.1"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "source,regime,eb_min,eb_min_db,s0,eps_star,a\nconstant,fixed,7.3097927544,8.639051,1.77440080754,,\n");
    EXPECT_NE(r.out.find(",,\n"), std::string::npos);
}

TEST(Cli, ValidationErrorsExitWithTwo) {
    EXPECT_EQ(invoke({"ee", "--eps", "1.5"}).code, 2);
    EXPECT_EQ(invoke({"ee", "--M", "0"}).code, 2);
    EXPECT_EQ(invoke({"ee", "--source", "nope"}).code, 2);
    EXPECT_EQ(invoke({"curve", "--snr-grid", "1:0.1:3"}).code, 2);
    EXPECT_EQ(invoke({"ee", "--p11", "1.0", "--source", "dmarkov"}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_FALSE(invoke({"ee", "--theta", "-1"}).err.empty());
}

TEST(Cli, FailedRunWritesNoFile) {
    const auto path = temp_path("no_output.csv");
    std::filesystem::remove(path);
    EXPECT_EQ(invoke({"ee", "--eps", "0", "--out", path.string()}).code, 2);
    EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(Cli, RerunsAreByteIdentical) {
    const std::vector<std::string> args{"simulate", "--M", "3", "--samples", "50000", "--seed", "9", "--format", "json"};
    const Outcome a = invoke(args);
    const Outcome b = invoke(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const Outcome c = invoke({"queue", "--M", "3", "--blocks", "50000", "--source", "mmps"});
    EXPECT_EQ(c.out, invoke({"queue", "--M", "3", "--blocks", "50000", "--source", "mmps"}).out);
}

TEST(Cli, JsonOutputCarriesConfigAndSummary) {
    const Outcome r = invoke({"simulate", "--M", "2", "--samples", "20000", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["command"], "simulate");
    EXPECT_EQ(doc["config"]["M"], 2);
    EXPECT_EQ(doc["rows"].size(), 2u);
    EXPECT_TRUE(doc["summary"].contains("mu_hat"));
    EXPECT_FALSE(doc["version"].get<std::string>().empty());
}

TEST(Cli, ConfigFileSuppliesDefaultsAndFlagsOverride) {
    const auto path = temp_path("config.json");
    {
        std::ofstream f(path);
        f << R"({"M": 3, "eps": 0.2, "source": "fluid"})";
    }
    const Outcome from_file = invoke({"ee", "--config", path.string()});
    const Outcome explicit_flags = invoke({"ee", "--M", "3", "--eps", "0.2", "--source", "fluid"});
    ASSERT_EQ(from_file.code, 0);
    EXPECT_EQ(from_file.out, explicit_flags.out);
    const Outcome overridden = invoke({"ee", "--config", path.string(), "--M", "1"});
    EXPECT_EQ(overridden.out, invoke({"ee", "--M", "1", "--eps", "0.2", "--source", "fluid"}).out);

    {
        std::ofstream f(path);
        f << R"({"deadline": 3})";
    }
    EXPECT_EQ(invoke({"ee", "--config", path.string()}).code, 2);
    std::filesystem::remove(path);
}

TEST(Cli, WritesToRequestedFile) {
    const auto path = temp_path("curve.csv");
    ASSERT_EQ(invoke({"curve", "--snr-grid", "0.1:1:2", "--out", path.string()}).code, 0);
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    EXPECT_EQ(header, "snr,r_avg,eb_db");
    std::filesystem::remove(path);
}

TEST(Cli, SnrGridParsing) {
    const auto log = harq_ee::cli::parse_snr_grid("1e-3:1:4");
    ASSERT_EQ(log.size(), 4u);
    EXPECT_NEAR(log[1], 1e-2, 1e-15);
    const auto lin = harq_ee::cli::parse_snr_grid("1:2:3:lin");
    EXPECT_DOUBLE_EQ(lin[1], 1.5);
    EXPECT_THROW(harq_ee::cli::parse_snr_grid("1:2"), std::invalid_argument);
    EXPECT_THROW(harq_ee::cli::parse_snr_grid("a:2:3"), std::invalid_argument);
}
