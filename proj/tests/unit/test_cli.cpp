#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "sattn/cli/app.hpp"
#include "sattn/data/trajectory.hpp"

namespace fs = std::filesystem;
using sattn::cli::run;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sattn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) fields.push_back(f);
  return fields;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sattn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  // Three small synthetic scenes and a config that trains a tiny model.
  fs::path make_run_config() {
    for (int i = 0; i < 3; ++i) {
      const auto r = invoke({"synth", "--kind", "crossing", "--peds", "2", "--frames", "60", "--seed",
                             std::to_string(10 + i), "--out", path("scene" + std::to_string(i) + ".txt").string()});
      EXPECT_EQ(r.code, 0) << r.err;
    }
    write_file(path("run.cfg"),
               "# tiny run\n"
               "scenes=scene0.txt,scene1.txt,scene2.txt\n"
               "held_out=2\n"
               "window_stride=10\n"
               "epochs=2\n"
               "batch_size=2\n"
               "embed_dim=4\nedge_hidden=6\nnode_hidden=5\nattention_dim=3\n"
               "seed=3\n");
    return path("run.cfg");
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, NoSubcommandIsUsageError) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(CliTest, ConvertPermutesColumns) {
  write_file(path("raw.txt"), "10 3 2.0 5.0\n");
  const auto r = invoke({"convert", path("raw.txt").string(), "--columns", "frame,id,y,x", "--stride", "10"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "1\t3\t5.0\t2.0\n");
}

TEST_F(CliTest, ConvertOutputIsStable) {
  write_file(path("raw.txt"), "0 1 0.5 1.5\n10 1 0.75 1.25\n10 2 -3 4\n");
  ASSERT_EQ(invoke({"convert", path("raw.txt").string(), "--stride", "10", "--out", path("a.txt").string()}).code, 0);
  ASSERT_EQ(invoke({"convert", path("raw.txt").string(), "--stride", "10", "--out", path("b.txt").string()}).code, 0);
  EXPECT_EQ(slurp(path("a.txt")), slurp(path("b.txt")));
  EXPECT_NO_THROW(sattn::data::parse_canonical(slurp(path("a.txt"))));
}

TEST_F(CliTest, BadColumnSpecWritesNothing) {
  write_file(path("raw.txt"), "10 3 2.0 5.0\n");
  const auto r = invoke({"convert", path("raw.txt").string(), "--columns", "frame,id,x", "--out", path("o.txt").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(fs::exists(path("o.txt")));
}

TEST_F(CliTest, BadFrameStrideIsDataError) {
  write_file(path("raw.txt"), "15 3 2.0 5.0\n");
  EXPECT_EQ(invoke({"convert", path("raw.txt").string(), "--stride", "10"}).code, 2);
}

TEST_F(CliTest, SynthIsSeeded) {
  const auto a = invoke({"synth", "--kind", "head_on_swap", "--peds", "2", "--seed", "4"});
  const auto b = invoke({"synth", "--kind", "head_on_swap", "--peds", "2", "--seed", "4"});
  const auto c = invoke({"synth", "--kind", "head_on_swap", "--peds", "2", "--seed", "5"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_NO_THROW(sattn::data::parse_canonical(a.out));
  EXPECT_EQ(invoke({"synth", "--kind", "spiral"}).code, 1);
}

TEST_F(CliTest, UnknownConfigKeyListsValidKeys) {
  write_file(path("bad.cfg"), "epochs=2\nwarp_factor=9\n");
  const auto r = invoke({"train", "--config", path("bad.cfg").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("warp_factor"), std::string::npos);
  EXPECT_NE(r.err.find("learning_rate"), std::string::npos);
  EXPECT_NE(r.err.find("held_out"), std::string::npos);
}

TEST_F(CliTest, MissingSceneFailsBeforeTraining) {
  write_file(path("run.cfg"), "scenes=nowhere.txt\nepochs=1\n");
  const auto r = invoke({"train", "--config", path("run.cfg").string(), "--out", path("out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.find("epoch"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("out")));
}

TEST_F(CliTest, TrainTwiceGivesIdenticalCheckpoints) {
  const fs::path cfg = make_run_config();
  const auto a = invoke({"train", "--config", cfg.string(), "--out", path("a").string()});
  const auto b = invoke({"train", "--config", cfg.string(), "--out", path("b").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(path("a/checkpoint.satn")), slurp(path("b/checkpoint.satn")));
  const auto log = csv_lines(slurp(path("a/train_log.csv")));
  ASSERT_EQ(log.size(), 3u);
  EXPECT_EQ(log[0], "epoch,train_nll,val_nll,grad_norm_mean,wallclock_s");

  const auto c = invoke({"train", "--config", cfg.string(), "--seed", "4", "--out", path("c").string()});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(slurp(path("a/checkpoint.satn")), slurp(path("c/checkpoint.satn")));
}

TEST_F(CliTest, SetOverridesConfigKeys) {
  const fs::path cfg = make_run_config();
  const auto r = invoke({"train", "--config", cfg.string(), "--set", "epochs=1", "--set", "mode=independent_lstm",
                         "--out", path("o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string resolved = slurp(path("o/config.resolved.txt"));
  EXPECT_NE(resolved.find("epochs=1\n"), std::string::npos);
  EXPECT_NE(resolved.find("mode=independent_lstm\n"), std::string::npos);
  EXPECT_EQ(csv_lines(slurp(path("o/train_log.csv"))).size(), 2u);
}

TEST_F(CliTest, PredictAndAttentionOutputs) {
  const fs::path cfg = make_run_config();
  ASSERT_EQ(invoke({"train", "--config", cfg.string(), "--out", path("m").string()}).code, 0);
  const std::string ck = path("m/checkpoint.satn").string();
  const std::string scene = path("scene2.txt").string();

  const auto p1 = invoke({"predict", "--checkpoint", ck, "--data", scene, "--deterministic"});
  const auto p2 = invoke({"predict", "--checkpoint", ck, "--data", scene, "--deterministic",
                          "--out", path("p.csv").string()});
  ASSERT_EQ(p1.code, 0) << p1.err;
  ASSERT_EQ(p2.code, 0) << p2.err;
  EXPECT_EQ(p1.out, slurp(path("p.csv")));
  const auto rows = csv_lines(p1.out);
  EXPECT_EQ(rows[0], "window_id,ped_id,t,mu_x,mu_y,sigma_x,sigma_y,rho,xhat,yhat");
  ASSERT_EQ(rows.size(), 1u + 3u * 2u * 12u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = split(rows[i]);
    ASSERT_EQ(f.size(), 10u);
    const int t = std::stoi(f[2]);
    EXPECT_GE(t, 9);
    EXPECT_LE(t, 20);
    EXPECT_EQ(f[3], f[8]);
    EXPECT_EQ(f[4], f[9]);
    EXPECT_GT(std::stod(f[5]), 0.0);
  }

  const auto s1 = invoke({"predict", "--checkpoint", ck, "--data", scene, "--sample", "--seed", "8"});
  const auto s2 = invoke({"predict", "--checkpoint", ck, "--data", scene, "--sample", "--seed", "8"});
  const auto s3 = invoke({"predict", "--checkpoint", ck, "--data", scene, "--sample", "--seed", "9"});
  EXPECT_EQ(s1.out, s2.out);
  EXPECT_NE(s1.out, s3.out);
  EXPECT_EQ(invoke({"predict", "--checkpoint", ck, "--data", scene, "--sample", "--deterministic"}).code, 1);

  const auto att = invoke({"attention", "--checkpoint", ck, "--data", scene});
  ASSERT_EQ(att.code, 0) << att.err;
  const auto arows = csv_lines(att.out);
  EXPECT_EQ(arows[0], "window_id,ped_id,t,neighbor_id,weight");
  std::map<std::string, std::pair<double, int>> per_node;
  for (std::size_t i = 1; i < arows.size(); ++i) {
    const auto f = split(arows[i]);
    ASSERT_EQ(f.size(), 5u);
    auto& [sum, count] = per_node[f[0] + "/" + f[1] + "/" + f[2]];
    sum += std::stod(f[4]);
    ++count;
  }
  EXPECT_EQ(per_node.size(), 3u * 2u * 19u);
  for (const auto& [key, v] : per_node) {
    EXPECT_NEAR(v.first, 1.0, 1e-9) << key;
    EXPECT_EQ(v.second, 1) << key;
  }

  const auto one = invoke({"predict", "--checkpoint", ck, "--data", scene, "--window", "20"});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(csv_lines(one.out).size(), 1u + 2u * 12u);
  EXPECT_EQ(invoke({"predict", "--checkpoint", ck, "--data", scene, "--window", "55"}).code, 2);
  EXPECT_EQ(invoke({"predict", "--checkpoint", ck, "--data", scene, "--mode", "independent_lstm"}).code, 2);
}

TEST_F(CliTest, EvaluateReportsHeldOutScene) {
  const fs::path cfg = make_run_config();
  ASSERT_EQ(invoke({"train", "--config", cfg.string(), "--out", path("m").string()}).code, 0);
  const auto r = invoke({"evaluate", "--checkpoint", path("m/checkpoint.satn").string(), "--config", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "scene,ade_m,fde_m,n_peds,n_windows");
  EXPECT_EQ(rows[1].substr(0, 7), "scene2,");
  EXPECT_EQ(rows[2].substr(0, 4), "all,");
  EXPECT_EQ(split(rows[2]).at(4), "3");
}

TEST_F(CliTest, CorruptCheckpointIsDataError) {
  write_file(path("bad.satn"), "SATNgarbage");
  write_file(path("scene.txt"), "0\t1\t0.0\t0.0\n");
  EXPECT_EQ(invoke({"predict", "--checkpoint", path("bad.satn").string(), "--data", path("scene.txt").string()}).code, 2);
  EXPECT_EQ(invoke({"predict", "--checkpoint", path("none.satn").string(), "--data", path("scene.txt").string()}).code,
            2);
}
