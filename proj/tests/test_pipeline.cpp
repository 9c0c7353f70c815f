#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rqvt/phantom/dataset.hpp"
#include "rqvt/pipeline/config.hpp"
#include "rqvt/pipeline/extract.hpp"
#include "rqvt/pipeline/feature_table.hpp"
#include "test_util.hpp"

using namespace rqvt;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::IoFailure;
}

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(RQVT_CLI_PATH) + " " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Config, DefaultsAndRoundTrip) {
  const auto c = config_from_json(nlohmann::json::object());
  EXPECT_EQ(c.resample_mm, 0.75);
  EXPECT_EQ(c.band_margin_mm, 2.0);
  EXPECT_EQ(c.k, 5);
  EXPECT_EQ(config_to_json(config_from_json(config_to_json(c))), config_to_json(c));
  const auto d = config_from_json({{"rf", {{"trees", 10}}}, {"vessel", {{"mode", "fixed"}}}, {"k", 3}});
  EXPECT_EQ(d.forest.trees, 10);
  EXPECT_EQ(d.vessel.segmentation.mode, VesselSegmentation::Mode::Fixed);
  EXPECT_EQ(d.k, 3);
}

TEST(Config, Rejections) {
  for (const char* text : {R"({"resample":1})", R"({"rf":{"tree":5}})", R"({"k":"five"})", R"({"k":1})",
                           R"({"band_mode":"inner"})", R"({"bin_width":0})", R"({"vessel":{"curvature_window":0}})"})
    EXPECT_EQ(code_of([&] { config_from_json(nlohmann::json::parse(text)); }), ErrorCode::ConfigError) << text;
  testutil::TempDir dir("cfg");
  testutil::write_file(dir / "bad.json", "{ not json");
  EXPECT_EQ(code_of([&] { load_config(dir / "bad.json"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { load_config(dir / "missing.json"); }), ErrorCode::ConfigError);
}

TEST(Manifest, ParsesAndGroups) {
  testutil::TempDir dir("manifest");
  testutil::write_file(dir / "m.csv",
                       "lesion_id,patient_id,timepoint,volume_path,lesion_mask_path,diameter_mm\n"
                       "B,P2,1,b1.mhd,b1_m.mhd,\n"
                       "B,P2,0,b0.mhd,b0_m.mhd,\n"
                       "A,P1,0,/abs/a0.mhd,a0_m.mhd,31.5\n");
  const auto recs = read_manifest(dir / "m.csv");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].lesion_id, "A");
  EXPECT_EQ(recs[0].scans[0].volume_path, fs::path("/abs/a0.mhd"));
  EXPECT_EQ(recs[0].scans[0].lesion_mask_path, dir / "a0_m.mhd");
  EXPECT_EQ(*recs[0].scans[0].diameter_mm, 31.5);
  EXPECT_FALSE(recs[0].scans[0].lung_mask_path);
  ASSERT_EQ(recs[1].scans.size(), 2u);
  EXPECT_EQ(recs[1].scans[0].timepoint, 0);
  EXPECT_FALSE(recs[1].scans[0].diameter_mm);

  for (const char* text : {"lesion_id,patient_id,timepoint,volume_path\nA,P,0,a\n",
                           "lesion_id,patient_id,timepoint,volume_path,lesion_mask_path\nA,P,x,a,b\n",
                           "lesion_id,patient_id,timepoint,volume_path,lesion_mask_path\nA,P,0,a\n",
                           "lesion_id,patient_id,timepoint,volume_path,lesion_mask_path,diameter_mm\nA,P,0,a,b,wide\n"}) {
    testutil::write_file(dir / "bad.csv", text);
    EXPECT_EQ(code_of([&] { read_manifest(dir / "bad.csv"); }), ErrorCode::ManifestParse) << text;
  }
}

TEST(Labels, FromDiameters) {
  const auto labels = label_lesions({{"a", 0, 30}, {"a", 1, 28}, {"a", 2, 19},
                                     {"b", 2, 25}, {"b", 0, 30}, {"b", 1, 28},
                                     {"c", 0, 30}, {"c", 1, 21}});
  EXPECT_EQ(labels.at("a"), 1);
  EXPECT_EQ(labels.at("b"), 0);
  EXPECT_EQ(labels.at("c"), 1);
  EXPECT_EQ(code_of([] { label_lesions({{"d", 0, 30}}); }), ErrorCode::NoFollowups);
}

TEST(Layout, ColumnIds) {
  const auto& ids = lesion_row_ids();
  ASSERT_EQ(ids.size(), 460u);
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), 460u);
  for (const auto& id : ids) {
    const auto f = parse_feature_id(id);
    ASSERT_TRUE(f) << id;
    EXPECT_EQ(f->id(), id);
  }
  EXPECT_EQ(timepoint_column_ids(0).size(), 230u);
  const auto g = parse_feature_id("glszm_ZoneEntropy_L_TP2");
  ASSERT_TRUE(g);
  EXPECT_EQ(g->family, "glszm");
  EXPECT_EQ(g->name, "ZoneEntropy");
  EXPECT_EQ(g->roi, "L");
  EXPECT_EQ(g->tp, "TP2");
  EXPECT_FALSE(parse_feature_id("glszm_ZoneEntropy_X_TP2"));
  EXPECT_FALSE(parse_feature_id("age"));
}

// One planted dataset shared by the extraction and CLI tests.
class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testutil::TempDir("cli");
    PlantedParams p;
    p.n_lesions = 40;
    p.seed = 3;
    planted_dataset(p, dir_->path() / "data");
    status_ = cli("extract --manifest " + q(dir_->path() / "data" / "manifest.csv") + " --out " + q(features()),
                  dir_->path() / "extract.log");
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static fs::path features() { return dir_->path() / "features.csv"; }
  static fs::path path(const std::string& name) { return dir_->path() / name; }
  static testutil::TempDir* dir_;
  static int status_;
};
testutil::TempDir* Cli::dir_ = nullptr;
int Cli::status_ = -1;

TEST_F(Cli, ExtractWritesFullTable) {
  ASSERT_EQ(status_, 0) << testutil::read_file(path("extract.log"));
  std::vector<bool> labelled;
  const auto d = read_feature_csv(features(), &labelled);
  EXPECT_EQ(d.rows(), 40u);
  EXPECT_EQ(d.feature_ids, lesion_row_ids());
  for (bool b : labelled) EXPECT_TRUE(b);
  for (double v : d.values) EXPECT_TRUE(std::isfinite(v));
  EXPECT_TRUE(d.has_both_classes());
  EXPECT_EQ(select_profile(d, FeatureProfile::Baseline).cols(), 230u);
  EXPECT_EQ(select_profile(d, FeatureProfile::FollowUp).cols(), 230u);
}

TEST_F(Cli, LibraryRowMatchesCli) {
  const auto recs = read_manifest(path("data") / "manifest.csv");
  PipelineConfig cfg;
  const auto row = extract_lesion_row(recs[0], cfg);
  ASSERT_EQ(row.values.size(), kLesionRowColumns);
  const auto d = read_feature_csv(features());
  for (std::size_t c = 0; c < d.cols(); ++c) EXPECT_EQ(row.values[c], d(0, c)) << d.feature_ids[c];

  auto partial = recs[0];
  partial.scans.erase(partial.scans.begin() + 1);
  EXPECT_EQ(code_of([&] { extract_lesion_row(partial, cfg); }), ErrorCode::MissingTimepoint);
}

TEST_F(Cli, ExtractIsolatesFailuresAndReportsExitCodes) {
  const auto lines = [&] {
    std::vector<std::string> v;
    std::istringstream in(testutil::read_file(path("data") / "manifest.csv"));
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
  }();
  // Header plus three lesions (three scans each); break one volume path of the second.
  std::string m = lines[0] + "\n";
  for (std::size_t i = 1; i <= 9; ++i) {
    auto l = lines[i];
    if (i == 4) l.replace(l.find("images/"), 7, "missing/");
    m += l + "\n";
  }
  testutil::write_file(path("data") / "three.csv", m);
  EXPECT_EQ(cli("extract --threads 1 --manifest " + q(path("data") / "three.csv") + " --out " + q(path("three.csv")),
                path("three.log")),
            0);
  EXPECT_EQ(read_feature_csv(path("three.csv")).rows(), 2u);
  EXPECT_NE(testutil::read_file(path("three.log")).find("warning: skipped lesion"), std::string::npos);

  testutil::write_file(path("data") / "empty.csv", lines[0] + "\n");
  EXPECT_EQ(cli("extract --manifest " + q(path("data") / "empty.csv") + " --out " + q(path("e.csv")), path("e.log")), 1);
  testutil::write_file(path("data") / "bad.csv", "lesion_id,timepoint\nA,0\n");
  EXPECT_EQ(cli("extract --manifest " + q(path("data") / "bad.csv") + " --out " + q(path("b.csv")), path("b.log")), 2);
  EXPECT_EQ(cli("extract --bogus", path("p.log")), 2);
  testutil::write_file(path("cfg.json"), R"({"band_margin":2})");
  EXPECT_EQ(cli("cv --features " + q(features()) + " --config " + q(path("cfg.json")) + " --out " + q(path("x")),
                path("c.log")),
            2);
}

TEST_F(Cli, CrossValidationOutputs) {
  ASSERT_EQ(status_, 0);
  for (const char* profile : {"both", "tp1"}) {
    const auto out = path(std::string("cv_") + profile);
    ASSERT_EQ(cli("cv --model gb --k 4 --features " + q(features()) + " --profile " + profile + " --out " + q(out),
                  path("cv.log")),
              0)
        << testutil::read_file(path("cv.log"));
    const auto r = nlohmann::json::parse(testutil::read_file(out / "report.json"));
    EXPECT_EQ(r["features"].get<int>(), std::string(profile) == "both" ? 460 : 230);
    EXPECT_EQ(r["rows"].get<int>(), 40);
    EXPECT_EQ(r["aucs"].size(), 4u);
    EXPECT_EQ(r["top_features"].size(), 10u);
    const double mean = r["mean_auc"].get<double>();
    EXPECT_GE(mean, 0.0);
    EXPECT_LE(mean, 1.0);

    const auto imp = read_csv(out / "importance.csv");
    EXPECT_EQ(imp.rows.size(), r["features"].get<std::size_t>());
    for (const auto& row : imp.rows) {
      const auto f = parse_feature_id(row[1]);
      ASSERT_TRUE(f) << row[1];
      EXPECT_EQ(f->family, row[2]);
      EXPECT_EQ(f->name, row[3]);
    }
    EXPECT_EQ(read_csv(out / "roc.csv").header, (std::vector<std::string>{"fold", "fpr", "tpr", "threshold"}));
  }
}

TEST_F(Cli, RerunsAreByteIdentical) {
  ASSERT_EQ(status_, 0);
  for (int run = 0; run < 2; ++run)
    ASSERT_EQ(cli("cv --model rf --k 3 --threads 4 --features " + q(features()) + " --out " +
                      q(path("rerun" + std::to_string(run))),
                  path("rerun.log")),
              0);
  ASSERT_EQ(cli("cv --model rf --k 3 --threads 1 --features " + q(features()) + " --out " + q(path("rerun_single")),
                path("rerun.log")),
            0);
  for (const char* f : {"report.json", "roc.csv", "importance.csv"}) {
    EXPECT_EQ(testutil::read_file(path("rerun0") / f), testutil::read_file(path("rerun1") / f)) << f;
    EXPECT_EQ(testutil::read_file(path("rerun0") / f), testutil::read_file(path("rerun_single") / f)) << f;
  }

  ASSERT_EQ(cli("extract --threads 2 --manifest " + q(path("data") / "manifest.csv") + " --out " + q(path("again.csv")),
                path("again.log")),
            0);
  EXPECT_EQ(testutil::read_file(features()), testutil::read_file(path("again.csv")));
}

TEST_F(Cli, TrainThenPredictReproducesScores) {
  ASSERT_EQ(status_, 0);
  for (const char* model : {"rf", "gb"}) {
    const auto m = path(std::string(model) + ".json");
    ASSERT_EQ(cli(std::string("train --model ") + model + " --profile tp2 --features " + q(features()) + " --out " + q(m) +
                      " --scores " + q(path("train_scores.csv")),
                  path("train.log")),
              0)
        << testutil::read_file(path("train.log"));
    ASSERT_EQ(cli("predict --model " + q(m) + " --features " + q(features()) + " --out " + q(path("pred.csv")),
                  path("pred.log")),
              0)
        << testutil::read_file(path("pred.log"));
    EXPECT_EQ(testutil::read_file(path("train_scores.csv")), testutil::read_file(path("pred.csv")));
    EXPECT_EQ(read_csv(path("pred.csv")).rows.size(), 40u);
  }
  testutil::write_file(path("broken.json"), "{\"format_version\":1,");
  EXPECT_EQ(cli("predict --model " + q(path("broken.json")) + " --features " + q(features()) + " --out " + q(path("p.csv")),
                path("broken.log")),
            2);
}

TEST_F(Cli, PhantomSubcommand) {
  EXPECT_EQ(cli("phantom make-dataset --n 40 --seed 3 --out " + q(path("regen")), path("regen.log")), 0);
  EXPECT_EQ(testutil::read_file(path("regen") / "truth.csv"), testutil::read_file(path("data") / "truth.csv"));
  EXPECT_EQ(cli("phantom make-dataset --n 10 --out " + q(path("small")), path("small.log")), 1);
}
