#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "crowdroute/crowdroute.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(CROWDROUTE_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string tmp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("crowdroute_cli_" + name)).string();
}

double field(const std::string& out, const std::string& key) {
    const auto at = out.find(key + " ");
    if (at == std::string::npos) return std::nan("");
    return std::stod(out.substr(at + key.size() + 1));
}

}  // namespace

TEST(Cli, GenerateWritesParsableInstance) {
    const auto path = tmp("inst.json");
    const auto r = run("generate --requests 6 --crowdsourcees 3 --seed 4 --out " + path);
    ASSERT_EQ(r.code, 0) << r.out;
    const auto inst = crowdroute::load_instance(path);
    EXPECT_EQ(inst.num_requests(), 6);
    EXPECT_EQ(inst.num_crowdsourcees(), 3);
    EXPECT_EQ(inst, crowdroute::generate_instance(6, 3, 4));
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run("generate --requests 0 --crowdsourcees 3 --out " + tmp("x.json")).code, 2);
    EXPECT_EQ(run("generate --crowdsourcees 3").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("benchmark --methods simple,bogus --instances 1").code, 2);
    EXPECT_EQ(run("benchmark --methods drl --instances 1").code, 2);
    EXPECT_EQ(run("train --profile tiny").code, 2);
}

TEST(Cli, BadInputsExitThree) {
    const auto bad = tmp("bad.json");
    {
        std::ofstream out(bad);
        out << "{\"requests\": [}";
    }
    const auto model = tmp("m_for_bad.bin");
    ASSERT_EQ(run("train --profile desk --max-steps 150 --min-steps 150 --out " + model).code, 0);
    EXPECT_EQ(run("solve --model " + model + " --instance " + bad).code, 3);
    const auto wrong = tmp("wrong_size.json");
    ASSERT_EQ(run("generate -n 4 -k 2 --out " + wrong).code, 0);
    EXPECT_EQ(run("solve --model " + model + " --instance " + wrong).code, 3);
    EXPECT_EQ(run("solve --model " + bad + " --instance " + wrong).code, 3);
}

TEST(Cli, TrainSolveBenchmarkRoundTrip) {
    const auto model = tmp("model.bin");
    const auto log = tmp("model.log.csv");
    auto r = run("train --profile desk --max-steps 300 --min-steps 300 --seed 2 --out " + model + " --log " + log);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("stopped: "), std::string::npos);
    {
        std::ifstream in(log);
        std::string header;
        std::getline(in, header);
        EXPECT_EQ(header.rfind("step,", 0), 0u) << header;
        int lines = 0;
        for (std::string line; std::getline(in, line);) ++lines;
        EXPECT_EQ(lines, 300);
    }

    const auto inst = tmp("desk.json");
    ASSERT_EQ(run("generate -n 25 -k 11 --seed 9 --out " + inst).code, 0);
    r = run("solve --model " + model + " --instance " + inst + " --dump-plan");
    ASSERT_EQ(r.code, 0) << r.out;
    const double tsc = field(r.out, "tsc"), initial = field(r.out, "initial_tsc");
    EXPECT_LE(tsc, initial + 1e-9);
    EXPECT_NE(r.out.find("backup:"), std::string::npos);

    r = run("solve --model " + model + " --instance " + inst + " --budget 0");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NEAR(field(r.out, "tsc"), field(r.out, "initial_tsc"), 1e-9);
    EXPECT_EQ(field(r.out, "steps"), 0.0);

    const auto csv = tmp("bench.csv");
    r = run("benchmark --model " + model + " --instances 2 --methods drl,simple --out " + csv);
    ASSERT_EQ(r.code, 0) << r.out;
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "instance_seed,method,tsc,seconds,iterations");
    int rows = 0;
    while (std::getline(in, line)) rows += !line.empty();
    EXPECT_EQ(rows, 4);
    EXPECT_NE(r.out.find("method,wins"), std::string::npos);
}

TEST(Cli, BaselineBenchmarkWithoutModel) {
    const auto r = run("benchmark --methods simple,rts,sa --instances 2 -n 8 -k 3");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("1,rts,"), std::string::npos);
    EXPECT_NE(r.out.find("2,sa,"), std::string::npos);
}
