#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

struct Run {
    std::string out;
    int code = -1;
};

Run kida(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + KIDA_CLI_PATH + std::string(" ") + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string samples(const std::string& name) { return std::string(KIDA_SAMPLES_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool has_line(const std::string& text, const std::string& line) {
    return ("\n" + text).find("\n" + line + "\n") != std::string::npos;
}

const std::string delta_23 = "transition --form delta --p 11 --ext cyclotomic:23:degree=11 --lambda 1 --mu 0";

} // namespace

TEST(Tau, Examples) {
    EXPECT_EQ(kida("tau --n 23").out, "18643272\n");
    EXPECT_EQ(kida("tau --n 1").out, "1\n");
    auto r = kida("tau --n 1123 --mod 11");
    EXPECT_EQ(r.out, "2\n");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(kida("tau --n 2").out, "-24\n");
}

TEST(Tau, PrecisionExitCode) {
    EXPECT_EQ(kida("tau --n 5000 --precision 100").code, 2);
    EXPECT_EQ(kida("tau --n 23", "KIDA_PRECISION=10").code, 2);
    EXPECT_EQ(kida("tau --n 23", "KIDA_PRECISION=30").out, "18643272\n");
}

TEST(Hv, Examples) {
    auto a = kida("hv --form delta --p 11 --ell 23 --ext cyclotomic:23:degree=11");
    EXPECT_EQ(a.code, 0);
    EXPECT_TRUE(has_line(a.out, "h = 0"));
    EXPECT_TRUE(has_line(a.out, "case = otherwise"));
    auto b = kida("hv --form delta --p 11 --ell 1123 --ext cyclotomic:1123:degree=11");
    EXPECT_TRUE(has_line(b.out, "h = 20"));
    EXPECT_TRUE(has_line(b.out, "local_type = ups:a=2,c=1"));
    auto c = kida("hv --form sc --e 5");
    EXPECT_EQ(c.code, 0);
    EXPECT_TRUE(has_line(c.out, "h = 0"));
    auto d = kida("hv --form delta --p 11 --ell 1123 --e 11");
    EXPECT_TRUE(has_line(d.out, "h = 20"));
}

TEST(Hv, MissingLocalTypeExitCode) {
    EXPECT_EQ(kida("hv --form ec:a1=0,a2=-1,a3=1,a4=-10,a6=-20 --p 5 --ell 11 --e 5").code, 2);
}

TEST(Transition, Examples) {
    auto a = kida(delta_23);
    EXPECT_EQ(a.code, 0);
    EXPECT_TRUE(has_line(a.out, "output.lambda = 11"));
    auto b = kida("transition --form delta --p 11 --ext cyclotomic:1123:degree=11 --lambda 1 --mu 0");
    EXPECT_TRUE(has_line(b.out, "output.lambda = 31"));
    auto c = kida("transition --form delta --p 11 --ext Q --lambda 4 --mu 0");
    EXPECT_EQ(c.code, 0);
    EXPECT_TRUE(has_line(c.out, "output.lambda = 4"));
}

TEST(Transition, ExitCodes) {
    EXPECT_EQ(kida("transition --form delta --p 11 --ext cyclotomic:23:degree=11 --lambda 1 --mu 1").code, 2);
    EXPECT_EQ(kida("transition --form delta --p 11 --ext bogus --lambda 1 --mu 0").code, 3);
    EXPECT_EQ(kida("transition --form delta --p 11 --ext cyclotomic:22:degree=11 --lambda 1 --mu 0").code, 3);
    EXPECT_EQ(kida("transition --form delta --p 11 --base cyclotomic:23:degree=11 --ext Q --lambda 1 --mu 0").code, 3);
    EXPECT_EQ(kida("transition --form ec:a1=0,a2=-1,a3=1,a4=-10,a6=-20 --p 5 --ext cyclotomic:11:degree=5 "
                   "--lambda 1 --mu 0")
                  .code,
              4);
    EXPECT_EQ(kida("transition --bogus").code, 5);
    EXPECT_EQ(kida("").code, 5);
}

TEST(Transition, LocalOverride) {
    auto r = kida("transition --form ec:a1=0,a2=-1,a3=1,a4=-10,a6=-20 --p 5 --ext cyclotomic:11:degree=5 "
                  "--lambda 1 --mu 0 --local 11=special:unram,triv");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(has_line(r.out, "output.lambda = 9"));
}

TEST(Output, JsonParses) {
    auto r = kida("--json " + delta_23);
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["output"]["lambda"], 11);
    EXPECT_EQ(j["places"][0]["ell"], 23);
    auto t = nlohmann::json::parse(kida("tau --n 23 --json").out);
    EXPECT_EQ(t["tau"], 18643272);
}

TEST(Output, Deterministic) {
    auto a = kida(delta_23 + " --twists");
    auto b = kida(delta_23 + " --twists");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Config, FileAndOverride) {
    auto r = kida("--config " + samples("transition_1123.conf") + " transition");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, slurp(samples("transition_1123.golden")));
    auto o = kida("transition --config " + samples("transition_1123.conf") + " --lambda 2");
    EXPECT_TRUE(has_line(o.out, "output.lambda = 42"));
}

TEST(Config, TableForm) {
    auto r = kida("hv --form table:" + samples("x0_11.table") + " --p 5 --ell 31 --e 5");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(has_line(r.out, "h = 8"));
}

TEST(Verify, Suites) {
    auto a = kida("verify --suite group-identity --seed 7 --size 60");
    EXPECT_EQ(a.code, 0);
    EXPECT_TRUE(has_line(a.out, "passed = true"));
    EXPECT_EQ(kida("verify --suite tower-additivity --seed 1 --size 27").code, 0);
    EXPECT_EQ(kida("verify --suite path-agreement --seed 3").code, 0);
    EXPECT_EQ(kida("verify --suite hasse --seed 1 --size 500").code, 0);
    EXPECT_EQ(kida("verify --suite nonsense").code, 5);
}
