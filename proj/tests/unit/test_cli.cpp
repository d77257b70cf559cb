#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "scalebreak/cli.hpp"
#include "scalebreak/errors.hpp"
#include "scalebreak/random.hpp"
#include "scalebreak/report.hpp"
#include "scalebreak/simlab.hpp"

namespace sb = scalebreak;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("scalebreak_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& body) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  fs::path write_break_series(const std::string& name, std::uint64_t seed) const {
    sb::RandomStream rng(seed, 0);
    std::ostringstream body;
    body.precision(17);
    body << "value\n";
    for (int i = 0; i < 1800; ++i) {
      body << rng.normal() * (i < 800 ? 2.0 : 4.0) << "\n";
    }
    return write(name, body.str());
  }

  struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
  };

  static Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "scalebreak");
    std::vector<const char*> argv;
    for (const auto& a : args) {
      argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = sb::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_F(CliTest, LoadSeriesPlain) {
  const auto s = sb::load_series(write("a.txt", "1.0\n2.5\n-3.0\n"));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], 1.0);
  EXPECT_EQ(s[1], 2.5);
  EXPECT_EQ(s[2], -3.0);
}

TEST_F(CliTest, LoadSeriesHeaderBlanksAndCrlf) {
  EXPECT_EQ(sb::load_series(write("h.txt", "value\n1.0\n")).size(), 1u);
  const auto s = sb::load_series(write("c.txt", "x\r\n 4 \r\n\r\n+5e-1\r\n"));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1], 0.5);
}

TEST_F(CliTest, LoadSeriesErrors) {
  try {
    sb::load_series(write("bad.txt", "1.0\nabc\n"));
    FAIL() << "expected ParseError";
  } catch (const sb::ParseError& e) {
    EXPECT_EQ(e.record(), 2u);
  }
  EXPECT_THROW(sb::load_series(write("inf.txt", "1.0\ninf\n")), sb::ParseError);
  EXPECT_THROW(sb::load_series(write("two.txt", "a\nb\n")), sb::ParseError);
  EXPECT_THROW(sb::load_series(write("empty.txt", "")), sb::InvalidInput);
  EXPECT_THROW(sb::load_series(write("hdr.txt", "value\n\n")), sb::InvalidInput);
  EXPECT_THROW(sb::load_series(dir_ / "missing.txt"), sb::IoError);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, sb::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, sb::kExitUsage);
  EXPECT_EQ(run({"detect"}).code, sb::kExitUsage);
  const auto f = write("x.txt", "1\n2\n").string();
  EXPECT_EQ(run({"detect", "--input", f, "--alpha", "1.5"}).code, sb::kExitUsage);
  EXPECT_EQ(run({"detect", "--input", f, "--max-terms", "2"}).code, sb::kExitUsage);
  EXPECT_EQ(run({"test-scale", "--input", f}).code, sb::kExitUsage);
  EXPECT_EQ(run({"fit-dist", "--input", f, "--bootstrap-b", "50"}).code, sb::kExitUsage);
  EXPECT_EQ(run({"simulate"}).code, sb::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, sb::kExitOk);
}

TEST_F(CliTest, DataErrors) {
  const auto five = write("five.txt", "1\n-2\n3\n-4\n5\n").string();
  const auto r = run({"detect", "--input", five});
  EXPECT_EQ(r.code, sb::kExitData);
  EXPECT_NE(r.err.find("insufficient data"), std::string::npos) << r.err;
  EXPECT_EQ(run({"detect", "--input", (dir_ / "nope.txt").string()}).code, sb::kExitData);
  const auto bad = run({"detect", "--input", write("bad.txt", "1\n2\nzz\n").string()});
  EXPECT_EQ(bad.code, sb::kExitData);
  EXPECT_NE(bad.err.find("record 3"), std::string::npos) << bad.err;
}

TEST_F(CliTest, DetectFindsPlantedBreak) {
  const auto input = write_break_series("seed7.txt", 7).string();
  const auto plot = (dir_ / "plot.csv").string();
  const auto r = run({"detect", "--input", input, "--plot-data", plot});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = sb::Json::parse(r.out);
  const auto l = doc.at("v").at("l_hat").get<std::size_t>();
  EXPECT_GE(l, 760u);
  EXPECT_LE(l, 840u);
  EXPECT_TRUE(doc.at("v").at("reject").get<bool>());
  EXPECT_EQ(doc.at("v").at("method"), "V_MARS");
  EXPECT_EQ(doc.at("c").at("method"), "C_TWOLINE");
  EXPECT_EQ(doc.at("n"), 1800);
  EXPECT_TRUE(doc.at("v").contains("mars"));
  EXPECT_TRUE(doc.at("v").contains("lines"));

  std::ifstream csv(plot);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "j,V,C,V_fit,C_fit");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
  }
  EXPECT_EQ(rows, 1800);
}

TEST_F(CliTest, DetectIsIdempotent) {
  const auto input = write_break_series("in.txt", 3).string();
  const auto a = (dir_ / "a.json").string();
  const auto b = (dir_ / "b.json").string();
  ASSERT_EQ(run({"detect", "--input", input, "--output", a}).code, 0);
  ASSERT_EQ(run({"detect", "--input", input, "--output", b}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const auto doc = sb::read_report(a);
  EXPECT_EQ(sb::dump_report(doc), slurp(a));
}

TEST_F(CliTest, TestScaleMatchesLibrary) {
  const auto input = write("ab.txt", "10\n-10\n-1\n1\n").string();
  const auto r = run({"test-scale", "--input", input, "--split", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = sb::Json::parse(r.out);
  EXPECT_NEAR(doc.at("w_star").get<double>(), -1.7321, 1e-4);
  EXPECT_EQ(doc.at("split"), 2);
  EXPECT_EQ(run({"test-scale", "--input", input, "--split", "4"}).code, sb::kExitData);
}

TEST_F(CliTest, FitDistReportsBothFamilies) {
  sb::RandomStream rng(21, 0);
  std::ostringstream body;
  body.precision(17);
  for (int i = 0; i < 800; ++i) {
    body << rng.normal() * (i < 400 ? 1.0 : 3.0) << "\n";
  }
  const auto input = write("fd.txt", body.str()).string();
  const auto r = run({"fit-dist", "--input", input, "--split", "400", "--bootstrap-b", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = sb::Json::parse(r.out);
  ASSERT_EQ(doc.at("segments").size(), 2u);
  EXPECT_EQ(doc.at("split_source"), "user");
  const auto& seg = doc.at("segments")[1];
  EXPECT_EQ(seg.at("range")[0], 401);
  EXPECT_EQ(seg.at("range")[1], 800);
  EXPECT_EQ(seg.at("gaussian").at("family"), "gaussian");
  EXPECT_NEAR(seg.at("gaussian").at("fitted").at("sigma").get<double>(), 3.0, 0.3);
  EXPECT_EQ(seg.at("stable").at("family"), "stable");
}

TEST_F(CliTest, SimulateFromFileIsReproducible) {
  const auto scenario = write("s.json", R"({"scenarios": [
      {"name": "flat", "first": {"family": "gaussian", "mu": 0, "sigma": 1, "length": 150},
       "second": {"family": "gaussian", "mu": 0, "sigma": 1, "length": 150}, "trials": 6, "seed": 2},
      {"name": "jump", "first": {"family": "stable", "alpha": 1.9, "beta": 0, "sigma": 1, "mu": 0, "length": 150},
       "second": {"family": "stable", "alpha": 1.9, "beta": 0, "sigma": 3, "mu": 0, "length": 150},
       "trials": 6, "seed": 3, "true_l": 150}]})")
                            .string();
  const auto a = (dir_ / "a.json").string();
  const auto b = (dir_ / "b.json").string();
  const auto ra = run({"simulate", "--scenario", scenario, "--output", a});
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(run({"simulate", "--scenario", scenario, "--output", b}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(ra.out.find("flat"), std::string::npos);
  const auto doc = sb::read_report(a);
  ASSERT_EQ(doc.at("scenarios").size(), 2u);
  EXPECT_EQ(doc.at("scenarios")[0].at("l_hat_v_samples").size(), 6u);

  const auto more = run({"simulate", "--scenario", scenario, "--trials", "4"});
  ASSERT_EQ(more.code, 0) << more.err;
  EXPECT_EQ(sb::Json::parse(more.out).at("scenarios")[1].at("spec").at("trials"), 4);
}

TEST_F(CliTest, SimulatePreset) {
  const auto r = run({"simulate", "--scenario", "power", "--trials", "3", "--seed", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = sb::Json::parse(r.out);
  EXPECT_EQ(doc.at("summary").at("kind"), "type_ii");
  EXPECT_EQ(doc.at("summary").at("rows").size(), 3u);
  EXPECT_EQ(run({"simulate", "--scenario", "no-such-preset"}).code, sb::kExitData);
}

TEST_F(CliTest, ScenarioJsonRoundTrip) {
  for (const auto& spec : sb::preset_scenarios("table2", 17, 4)) {
    const auto back = sb::scenario_from_json(sb::to_json(spec));
    EXPECT_EQ(sb::to_json(back), sb::to_json(spec));
    EXPECT_EQ(back.first_segment.stable, spec.first_segment.stable);
    EXPECT_EQ(back.true_l, spec.true_l);
  }
}

TEST_F(CliTest, NonFiniteNumbersEncoded) {
  EXPECT_EQ(sb::number_to_json(INFINITY), "inf");
  EXPECT_EQ(sb::number_to_json(-INFINITY), "-inf");
  EXPECT_EQ(sb::number_to_json(NAN), "nan");
  EXPECT_EQ(sb::number_from_json(sb::Json("inf")), INFINITY);
  EXPECT_TRUE(std::isnan(sb::number_from_json(sb::Json("nan"))));
  EXPECT_EQ(sb::number_from_json(sb::Json(2.5)), 2.5);
}

TEST_F(CliTest, BinaryExitStatus) {
  const auto five = write("five.txt", "1\n-2\n3\n-4\n5\n").string();
  const std::string cmd = std::string(SCALEBREAK_CLI_PATH) + " detect --input " + five +
                          " > " + (dir_ / "o.txt").string() + " 2> " + (dir_ / "e.txt").string();
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), sb::kExitData);
  EXPECT_NE(slurp(dir_ / "e.txt").find("insufficient data"), std::string::npos);

  const int usage = std::system((std::string(SCALEBREAK_CLI_PATH) + " > /dev/null 2>&1").c_str());
  ASSERT_TRUE(WIFEXITED(usage));
  EXPECT_EQ(WEXITSTATUS(usage), sb::kExitUsage);
}
