#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "polyfs/cli.h"
#include "polyfs/report.h"
#include "synthetic.h"

using namespace polyfs;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("polyfs_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "polyfs");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

int run_binary(const std::string &args) {
  const std::string cmd =
      std::string(POLYFS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_text(const fs::path &p, const std::string &text) {
  std::ofstream(p) << text;
}

size_t line_count(const std::string &text) {
  return static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST(Cli, RankOnTinyTable) {
  const fs::path dir = scratch_dir("toy");
  write_text(dir / "toy.csv",
             "a,b,c,label\n"
             "0,0,0.5,x\n1,0,0.1,y\n0,1,0.3,x\n1,1,0.6,y\n"
             "0.1,0.2,0.2,x\n0.9,0.8,0.4,y\n0.2,0.7,0.0,x\n0.8,0.1,0.3,y\n");
  const auto r = run_cli({"rank", "--data", (dir / "toy.csv").string(), "--out",
                          (dir / "out").string(), "--grid-step", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char *f : {"ranking.csv", "ranking.json", "sweep.csv", "trace.csv",
                        "polygons.json", "dataset_meta.json", "rank.manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  }
  const std::string ranking = read_file(dir / "out" / "ranking.csv");
  EXPECT_EQ(line_count(ranking), 4u);
  // Feature a alone separates the classes.
  EXPECT_EQ(ranking.find("\n0,a,"), ranking.find('\n'));
  EXPECT_EQ(line_count(read_file(dir / "out" / "sweep.csv")), 4u);

  const auto manifest = nlohmann::json::parse(read_file(dir / "out" / "rank.manifest.json"));
  EXPECT_EQ(manifest["command"], "rank");
  EXPECT_EQ(manifest["dataset"]["sha256"], cli::fingerprint(dir / "toy.csv"));
  EXPECT_EQ(manifest["dataset"]["sha256"].get<std::string>().size(), 64u);
  fs::remove_all(dir);
}

TEST(Cli, RerunsAreByteIdentical) {
  const fs::path dir = scratch_dir("rerun");
  synth::write_csv(synth::planted_dataset(3, 120, 3, 5).data, dir / "p.csv");
  for (const char *out : {"a", "b"}) {
    const auto r = run_cli({"rank", "--data", (dir / "p.csv").string(), "--out",
                            (dir / out).string(), "--grid-step", "0.25", "--seed", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char *f : {"ranking.csv", "sweep.csv", "trace.csv", "polygons.json"}) {
    EXPECT_EQ(read_file(dir / "a" / f), read_file(dir / "b" / f)) << f;
  }
  fs::remove_all(dir);
}

TEST(Cli, EvalAndTraceThroughTheBinary) {
  const fs::path dir = scratch_dir("binary");
  synth::write_csv(synth::planted_dataset(5, 150, 3, 9).data, dir / "p.csv");
  const std::string data = " --data " + (dir / "p.csv").string();
  ASSERT_EQ(run_binary("rank" + data + " --grid-step 0.25 --out " + (dir / "r").string()), 0);
  ASSERT_EQ(run_binary("eval" + data + " --ranking " + (dir / "r" / "ranking.csv").string() +
                       " --sizes 10,5,1 --trials 4 --out " + (dir / "e").string()),
            0);
  const std::string curve = read_file(dir / "e" / "curve.csv");
  EXPECT_EQ(line_count(curve), 4u);
  EXPECT_NE(curve.find("\n10,"), std::string::npos);
  EXPECT_NE(curve.find("\n1,"), std::string::npos);
  const auto summary = nlohmann::json::parse(read_file(dir / "e" / "summary.json"));
  EXPECT_TRUE(summary.contains("best_size"));

  for (const char *mode : {"hybrid", "plain"}) {
    ASSERT_EQ(run_binary(std::string("trace") + data + " --mode " + mode + " --out " +
                         (dir / "t").string()),
              0);
    const auto j = nlohmann::json::parse(
        read_file(dir / "t" / (std::string("trace_") + mode + ".json")));
    EXPECT_EQ(j["mode"], mode);
    EXPECT_TRUE(fs::exists(dir / "t" / (std::string("trace_") + mode + ".csv")));
  }
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir("codes");
  synth::write_csv(synth::blobs(40, 1), dir / "ok.csv");
  const std::string ok = (dir / "ok.csv").string();

  auto r = run_cli({"trace", "--data", ok, "--alpha", "0.5", "--beta", "0.495",
                    "--gamma", "0.005", "--out", (dir / "t").string()});
  EXPECT_EQ(r.code, 5);
  EXPECT_FALSE(r.err.empty());

  EXPECT_EQ(run_cli({"rank", "--data", (dir / "absent.csv").string()}).code, 2);

  write_text(dir / "nan.csv", "a,b,label\n1,2,x\nnan,1,y\n3,4,x\n");
  r = run_cli({"rank", "--data", (dir / "nan.csv").string(), "--out", (dir / "n").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;

  write_text(dir / "short.csv", "feature_index,feature_name,polygon_area,rank\n0,f0,1,1\n");
  EXPECT_EQ(run_cli({"eval", "--data", ok, "--ranking", (dir / "short.csv").string(),
                     "--out", (dir / "e").string()})
                .code,
            3);

  EXPECT_EQ(run_cli({"rank"}).code, 5);
  EXPECT_EQ(run_cli({"bogus"}).code, 5);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_binary("rank --data " + (dir / "absent.csv").string()), 2);
  fs::remove_all(dir);
}
