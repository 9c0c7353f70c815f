#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "rqvt/ml/cv.hpp"
#include "rqvt/ml/metrics.hpp"
#include "rqvt/ml/model_io.hpp"
#include "test_util.hpp"

using namespace rqvt;
using namespace rqvt::ml;

namespace {

Dataset make(std::size_t cols) {
  Dataset d;
  for (std::size_t c = 0; c < cols; ++c) d.feature_ids.push_back("f" + std::to_string(c));
  return d;
}

// Label = x[signal] > 0, other columns pure noise.
Dataset planted(std::size_t rows, std::size_t cols, std::size_t signal, std::uint64_t seed, double margin = 0.0) {
  auto d = make(cols);
  Rng rng(seed);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> x(cols);
    for (auto& v : x) v = rng.normal();
    const int y = x[signal] > 0.0 ? 1 : 0;
    x[signal] += y ? margin : -margin;
    d.add_row(x, y, "P" + std::to_string(r / 2), "L" + std::to_string(r));
  }
  return d;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::IoFailure;
}

}  // namespace

TEST(Auc, HandCases) {
  EXPECT_DOUBLE_EQ(roc_auc({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}), 0.75);
  EXPECT_DOUBLE_EQ(roc_auc({0.1, 0.2, 0.3}, {0, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc({0.3, 0.2, 0.1}, {0, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(roc_auc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}), 0.5);
  EXPECT_EQ(code_of([] { roc_auc({0.1, 0.2}, {1, 1}); }), ErrorCode::SingleClassLabels);
  EXPECT_EQ(code_of([] { roc_auc({0.1}, {1, 0}); }), ErrorCode::InvalidArgument);
}

TEST(Auc, CurveAreaMatchesRankAuc) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
      s.push_back(std::round(rng.uniform() * 10.0) / 10.0);  // plenty of ties
      y.push_back(i % 3 == 0 ? 1 : 0);
    }
    const auto pts = roc_curve(s, y);
    EXPECT_EQ(pts.front().fpr, 0.0);
    EXPECT_EQ(pts.back().tpr, 1.0);
    EXPECT_EQ(pts.back().fpr, 1.0);
    EXPECT_NEAR(roc_area(pts), roc_auc(s, y), 1e-12);
  }
}

TEST(Forest, SeparableTrainingAccuracy) {
  auto d = make(1);
  for (int i = 0; i < 20; ++i) d.add_row({static_cast<double>(i)}, i >= 10 ? 1 : 0, "P" + std::to_string(i));
  const auto m = train_random_forest(d, {}, 1);
  const auto p = predict_proba(m, d);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i] >= 0.5 ? 1 : 0, d.labels[i]);
}

TEST(Forest, DeterministicAcrossThreads) {
  const auto d = planted(80, 10, 3, 5);
  ForestParams one, four;
  one.trees = four.trees = 50;
  four.threads = 4;
  const auto a = train_random_forest(d, one, 9), b = train_random_forest(d, one, 9), c = train_random_forest(d, four, 9);
  EXPECT_EQ(model_to_json(a).dump(), model_to_json(b).dump());
  EXPECT_EQ(predict_proba(a, d), predict_proba(c, d));
  EXPECT_NE(model_to_json(a).dump(), model_to_json(train_random_forest(d, one, 10)).dump());
}

TEST(Forest, SingleClassRejected) {
  auto d = make(2);
  for (int i = 0; i < 6; ++i) d.add_row({1.0 * i, 2.0}, 1);
  EXPECT_EQ(code_of([&] { train_random_forest(d); }), ErrorCode::SingleClassDataset);
  EXPECT_EQ(code_of([&] { train_gradient_boosting(d); }), ErrorCode::SingleClassDataset);
}

TEST(Boosting, HeldOutAuc) {
  const auto train = planted(200, 5, 0, 11, 0.3);
  const auto test = planted(200, 5, 0, 12, 0.3);
  const auto m = train_gradient_boosting(train, {}, 0);
  EXPECT_GE(roc_auc(predict_proba(m, test), test.labels), 0.95);
}

TEST(Boosting, ZeroLearningRateGivesBaseRate) {
  const auto d = planted(40, 3, 1, 2);
  double pos = 0.0;
  for (int y : d.labels) pos += y;
  BoostingParams p;
  p.learning_rate = 0.0;
  p.stages = 10;
  for (double s : predict_proba(train_gradient_boosting(d, p), d)) EXPECT_NEAR(s, pos / d.rows(), 1e-12);
}

TEST(Predict, HandBuiltModels) {
  Model rf;
  rf.feature_ids = {"a"};
  Tree leaf;
  leaf.add_leaf(0.25);
  rf.trees = {leaf};
  EXPECT_EQ(predict_proba(rf, std::vector<double>{3.0})[0], 0.25);

  Model gb;
  gb.kind = ModelKind::GradientBoosting;
  gb.feature_ids = {"a"};
  EXPECT_EQ(predict_proba(gb, std::vector<double>{3.0})[0], 0.5);
  EXPECT_EQ(code_of([&] { predict_proba(gb, std::vector<double>{1.0, 2.0}); }), ErrorCode::WidthMismatch);
}

TEST(Predict, OutputsAreProbabilities) {
  const auto d = planted(60, 4, 2, 21);
  const auto rf = train_random_forest(d, {}, 1);
  const auto gb = train_gradient_boosting(d, {}, 1);
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> x(4);
    for (auto& v : x) v = (rng.uniform() - 0.5) * 1e6;
    for (const auto* m : {&rf, &gb}) {
      const double p = predict_proba(*m, x)[0];
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(Importance, SingleFeatureAndPlanted) {
  auto d = make(1);
  for (int i = 0; i < 20; ++i) d.add_row({static_cast<double>(i)}, i % 3 == 0 ? 1 : 0);
  const auto imp = feature_importance(train_random_forest(d, {}, 4));
  ASSERT_EQ(imp.size(), 1u);
  EXPECT_DOUBLE_EQ(imp[0].weight, 1.0);

  const auto p = planted(200, 20, 7, 8);
  for (const auto& m : {train_random_forest(p, {}, 1), train_gradient_boosting(p, {}, 1)}) {
    const auto r = feature_importance(m);
    EXPECT_EQ(r[0].feature_id, "f7");
    double s = 0.0;
    for (const auto& e : r) s += e.weight;
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(CrossValidation, PatientsStayTogether) {
  auto d = make(3);
  Rng rng(1);
  for (int p = 0; p < 10; ++p)
    for (int l = 0; l < 3; ++l) {
      const int y = (p + l) % 2;
      d.add_row({rng.normal() + y, rng.normal(), rng.normal()}, y, "P" + std::to_string(p), "L" + std::to_string(p * 3 + l));
    }
  const Trainer t = [](const Dataset& s) { return train_random_forest(s, {50, 0, 2, -1, 1}, 3); };
  const auto r = kfold_cv(d, 5, t, 42);
  ASSERT_EQ(r.folds.size(), 5u);
  std::set<std::string> seen;
  std::size_t rows = 0;
  for (const auto& f : r.folds) {
    EXPECT_EQ(f.test_patients.size(), 2u);
    for (const auto& p : f.test_patients) EXPECT_TRUE(seen.insert(p).second);
    for (auto row : f.test_rows)
      EXPECT_NE(std::find(f.test_patients.begin(), f.test_patients.end(), d.patient_ids[row]), f.test_patients.end());
    rows += f.test_rows.size();
  }
  EXPECT_EQ(rows, d.rows());
  EXPECT_EQ(patient_folds(d, 5, 42), patient_folds(d, 5, 42));
  const auto again = kfold_cv(d, 5, t, 42);
  EXPECT_EQ(again.aucs(), r.aucs());
  EXPECT_EQ(code_of([&] { kfold_cv(d, 1, t, 42); }), ErrorCode::InvalidArgument);
}

TEST(ModelIo, RoundTripIsExact) {
  testutil::TempDir dir("ml_io");
  const auto d = planted(60, 6, 1, 31);
  for (const auto& m : {train_random_forest(d, {30, 0, 2, -1, 1}, 2), train_gradient_boosting(d, {20, 0.1, 3, 1}, 2)}) {
    save_model(m, dir / "m.json");
    const auto back = load_model(dir / "m.json");
    EXPECT_EQ(predict_proba(back, d), predict_proba(m, d));
    save_model(back, dir / "m2.json");
    EXPECT_EQ(testutil::read_file(dir / "m.json"), testutil::read_file(dir / "m2.json"));
  }
}

TEST(ModelIo, CorruptAndVersion) {
  testutil::TempDir dir("ml_bad");
  const auto m = train_random_forest(planted(30, 2, 0, 1), {5, 0, 2, -1, 1}, 0);
  save_model(m, dir / "m.json");
  const auto text = testutil::read_file(dir / "m.json");
  testutil::write_file(dir / "cut.json", text.substr(0, text.size() / 2));
  EXPECT_EQ(code_of([&] { load_model(dir / "cut.json"); }), ErrorCode::CorruptModelFile);

  auto j = model_to_json(m);
  j["format_version"] = kModelFormatVersion + 1;
  testutil::write_file(dir / "v.json", j.dump());
  EXPECT_EQ(code_of([&] { load_model(dir / "v.json"); }), ErrorCode::VersionMismatch);

  j = model_to_json(m);
  j["trees"][0]["left"][0] = 1000;
  testutil::write_file(dir / "t.json", j.dump());
  EXPECT_EQ(code_of([&] { load_model(dir / "t.json"); }), ErrorCode::CorruptModelFile);
}
