#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the tool with `args` (already shell-quoted) from the test directory.
Run kcoupler(const std::string& args) {
  const std::string cmd = std::string(KCOUPLER_TOOL_PATH) + " " + args + " >cli_out.txt 2>cli_err.txt";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp("cli_out.txt");
  r.err = slurp("cli_err.txt");
  return r;
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string last_line(const std::string& text) {
  const auto end = text.find_last_not_of('\n');
  const auto begin = text.rfind('\n', end);
  return text.substr(begin == std::string::npos ? 0 : begin + 1, end - (begin == std::string::npos ? 0 : begin + 1) + 1);
}

TEST(CliProcess, EmptyScenarioIsUsageError) {
  const auto r = kcoupler("squeeze");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("empty scenario"), std::string::npos);
}

TEST(CliProcess, UnknownFlagAndBadValuesAreUsageErrors) {
  EXPECT_EQ(kcoupler("squeeze --scenario fig2a --bogus 1").code, 2);
  EXPECT_EQ(kcoupler("squeeze --scenario fig2a --format xml").code, 2);
  EXPECT_EQ(kcoupler("squeeze --scenario nope").code, 2);
  EXPECT_EQ(kcoupler("squeeze --scenario fig2a --mode 4").code, 2);
  EXPECT_EQ(kcoupler("wigner --scenario fig4a --format bin").code, 2);
}

TEST(CliProcess, ConfigSyntaxErrorReportsLocation) {
  write_file("bad.json", "{\n  \"chi\": 0.5,\n  \"lambda1\": }\n");
  const auto r = kcoupler("squeeze --config bad.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.json:3:"), std::string::npos) << r.err;
}

TEST(CliProcess, ConfigFieldErrorNamesField) {
  write_file("badfield.json", R"({"base": "fig2a", "steps": -3})");
  const auto r = kcoupler("squeeze --config badfield.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("steps"), std::string::npos) << r.err;
}

TEST(CliProcess, PrecedenceFlagOverConfigOverBuiltin) {
  write_file("over.json", R"({"base": "fig2a", "t1": 5.0, "steps": 5})");
  const auto file = kcoupler("squeeze --config over.json");
  ASSERT_EQ(file.code, 0) << file.err;
  EXPECT_EQ(last_line(file.out).substr(0, 2), "5,");

  const auto flag = kcoupler("squeeze --config over.json --t1 7");
  ASSERT_EQ(flag.code, 0) << flag.err;
  EXPECT_EQ(last_line(flag.out).substr(0, 2), "7,");

  const auto builtin_only = kcoupler("squeeze --scenario fig2a --steps 5");
  EXPECT_EQ(last_line(builtin_only.out).substr(0, 3), "20,");
}

TEST(CliProcess, OutputIsByteDeterministic) {
  const auto a = kcoupler("wigner --scenario fig4a --points 31 --threads 1");
  const auto b = kcoupler("wigner --scenario fig4a --points 31 --threads 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.substr(0, 6), "x,y,w\n");
  EXPECT_EQ(kcoupler("squeeze --scenario fig2b --steps 300").out,
            kcoupler("squeeze --scenario fig2b --steps 300").out);
}

TEST(CliProcess, BinaryWignerWritesHeaderAndData) {
  const auto r = kcoupler("wigner --scenario fig4c --points 11 --format bin --out grid.bin");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp("grid.bin").size(), 8u * 11 * 11);
  const auto header = nlohmann::json::parse(slurp("grid.bin.json"));
  EXPECT_EQ(header["nx"], 11);
  EXPECT_EQ(header["dtype"], "float64-le");
}

TEST(CliProcess, CompareExitCodes) {
  const auto ok = kcoupler("compare --scenario fig2a");
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(nlohmann::json::parse(ok.out)["status"], "pass");

  const auto bad = kcoupler("compare --scenario fig6a --alpha1 1 --alpha2 0 --alpha3 0 --chi-cross 0.5,0.5,0.5");
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(nlohmann::json::parse(bad.out)["status"], "model mismatch detected");
}

TEST(CliProcess, NonConvergenceExitsWithOne) {
  const auto r = kcoupler("wigner --scenario fig4c --points 3 --max-terms 8");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("not converged"), std::string::npos) << r.err;
}

TEST(CliProcess, ScenarioListAndShow) {
  const auto list = kcoupler("scenario list");
  EXPECT_EQ(list.code, 0);
  EXPECT_NE(list.out.find("fig6b"), std::string::npos);
  const auto show = kcoupler("scenario show fig4c");
  ASSERT_EQ(show.code, 0);
  EXPECT_EQ(nlohmann::json::parse(show.out)["mode"], 1);
}

TEST(CliProcess, DisentangleAndClassify) {
  const auto d = kcoupler("disentangle --scenario fig2a --lambda1 0.6 --lambda2 0.8 --t1 20");
  ASSERT_EQ(d.code, 0) << d.err;
  const auto j = nlohmann::json::parse(d.out);
  EXPECT_TRUE(j["commensurate"].get<bool>());
  EXPECT_EQ(j["revival_times"].size(), 3u);

  const auto c = kcoupler("classify --scenario fig4c");
  ASSERT_EQ(c.code, 0);
  EXPECT_NE(c.out.find(",1,-2,"), std::string::npos);
  EXPECT_NE(c.out.find("yscs-like"), std::string::npos);
  EXPECT_NE(c.out.find("mixture-like"), std::string::npos);
}

}  // namespace
