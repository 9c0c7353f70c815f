// rqvt_cli: extract / cv / train / predict / phantom make-dataset.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rqvt/ml/model_io.hpp"
#include "rqvt/phantom/dataset.hpp"
#include "rqvt/pipeline/config.hpp"
#include "rqvt/pipeline/extract.hpp"
#include "rqvt/pipeline/feature_table.hpp"
#include "rqvt/pipeline/report.hpp"

namespace fs = std::filesystem;
using namespace rqvt;

namespace {

// 2 = bad input that the user has to fix (flags, config, manifest, tables).
int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::ManifestParse:
    case ErrorCode::WidthMismatch:
    case ErrorCode::CorruptModelFile:
    case ErrorCode::VersionMismatch:
      return 2;
    default:
      return 1;
  }
}

PipelineConfig config_or_default(const std::string& path) { return path.empty() ? PipelineConfig{} : load_config(path); }

struct ModelArgs {
  std::string features, config, model = "rf", profile = "both", out;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  PipelineConfig resolved() const {
    auto cfg = config_or_default(config);
    if (k) cfg.k = *k;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (cfg.k < 2) throw Error(ErrorCode::ConfigError, "k must be >= 2");
    return cfg;
  }
};

ml::Dataset labelled_table(const std::string& path, FeatureProfile profile) {
  std::vector<bool> labelled;
  auto d = read_feature_csv(path, &labelled);
  for (std::size_t r = 0; r < labelled.size(); ++r)
    if (!labelled[r]) throw Error(ErrorCode::ConfigError, path + ": lesion " + d.lesion_ids[r] + " has no label");
  return select_profile(d, profile);
}

int run_extract(const std::string& manifest, const std::string& config, const std::string& out, std::optional<int> threads) {
  auto cfg = config_or_default(config);
  if (threads) cfg.threads = *threads;
  const auto records = read_manifest(manifest);
  const auto outcome = extract_all(records, cfg);
  for (const auto& [id, msg] : outcome.failures) std::cerr << "warning: skipped lesion " << id << ": " << msg << '\n';
  if (outcome.rows.empty()) {
    std::cerr << "error: no rows extracted\n";
    return 1;
  }
  write_feature_csv(outcome.rows, out);
  std::cout << "wrote " << outcome.rows.size() << " rows x " << kLesionRowColumns << " features to " << out << '\n';
  return 0;
}

int run_cv(const ModelArgs& a) {
  const auto cfg = a.resolved();
  const auto kind = ml::parse_model_kind(a.model);
  const auto profile = parse_profile(a.profile);
  const auto d = labelled_table(a.features, profile);
  const auto report = ml::kfold_cv(d, cfg.k, make_trainer(kind, cfg, cfg.seed), cfg.seed);
  fs::create_directories(a.out);
  const auto top = static_cast<std::size_t>(std::max(0, cfg.top_n));
  write_text(fs::path(a.out) / "report.json", cv_report_json(report, d, kind, profile, top).dump(2) + "\n");
  write_text(fs::path(a.out) / "roc.csv", roc_csv(report));
  write_text(fs::path(a.out) / "importance.csv", importance_csv(report.importance));
  std::cout << ml::to_string(kind) << " " << to_string(profile) << " k=" << cfg.k << " mean AUC " << report.mean_auc
            << " +- " << report.std_auc << '\n';
  for (std::size_t i = 0; i < report.importance.size() && i < top; ++i)
    std::cout << "  " << i + 1 << ". " << report.importance[i].feature_id << "  " << report.importance[i].weight << '\n';
  return 0;
}

int run_train(const ModelArgs& a, const std::string& scores) {
  const auto cfg = a.resolved();
  const auto kind = ml::parse_model_kind(a.model);
  std::vector<bool> labelled;
  const auto d = labelled_table(a.features, parse_profile(a.profile));
  const auto model = make_trainer(kind, cfg, cfg.seed)(d);
  ml::save_model(model, a.out);
  if (!scores.empty()) write_text(scores, scores_csv(d, ml::predict_proba(model, d), labelled));
  std::cout << "trained " << ml::to_string(kind) << " on " << d.rows() << " rows x " << d.cols() << " features\n";
  return 0;
}

int run_predict(const std::string& model_path, const std::string& features, const std::string& out) {
  const auto model = ml::load_model(model_path);
  std::vector<bool> labelled;
  const auto d = select_ids(read_feature_csv(features, &labelled), model.feature_ids);
  write_text(out, scores_csv(d, ml::predict_proba(model, d), labelled));
  std::cout << "scored " << d.rows() << " lesions\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radiomics and vessel-tortuosity features for lesion response prediction"};
  app.require_subcommand(1);

  std::string manifest, config, out;
  std::optional<int> threads;
  auto* extract = app.add_subcommand("extract", "Extract the 460-column feature table from a manifest");
  extract->add_option("--manifest", manifest, "Manifest CSV")->required();
  extract->add_option("--config", config, "Config JSON (defaults when omitted)");
  extract->add_option("--out", out, "Feature CSV to write")->required();
  extract->add_option("--threads", threads, "Worker threads (0 = all cores)");

  ModelArgs margs;
  std::string scores;
  auto add_model_opts = [&](CLI::App* c) {
    c->add_option("--features", margs.features, "Feature CSV")->required();
    c->add_option("--config", margs.config, "Config JSON (defaults when omitted)");
    c->add_option("--model", margs.model, "rf or gb");
    c->add_option("--profile", margs.profile, "both, tp1 or tp2");
    c->add_option("--seed", margs.seed, "Seed (overrides config)");
    c->add_option("--threads", margs.threads, "Worker threads for rf (0 = all cores)");
  };
  auto* cv = app.add_subcommand("cv", "Patient-level k-fold cross-validation");
  add_model_opts(cv);
  cv->add_option("--k", margs.k, "Folds (overrides config)");
  cv->add_option("--out", margs.out, "Output directory")->required();
  auto* train = app.add_subcommand("train", "Train a model on the whole table");
  add_model_opts(train);
  train->add_option("--out", margs.out, "Model JSON to write")->required();
  train->add_option("--scores", scores, "Also write training-set scores to this CSV");

  std::string model_path;
  auto* predict = app.add_subcommand("predict", "Score a feature table with a trained model");
  predict->add_option("--model", model_path, "Model JSON")->required();
  predict->add_option("--features", margs.features, "Feature CSV")->required();
  predict->add_option("--out", out, "Scores CSV to write")->required();

  PlantedParams pp;
  auto* phantom = app.add_subcommand("phantom", "Synthetic data generators");
  phantom->require_subcommand(1);
  auto* make = phantom->add_subcommand("make-dataset", "Planted-signal longitudinal lesion dataset");
  make->add_option("--n", pp.n_lesions, "Number of lesions (>= 40)");
  make->add_option("--seed", pp.seed, "Seed");
  make->add_option("--noise-sd", pp.noise_sd, "Intensity noise SD in HU");
  make->add_option("--label-noise", pp.label_noise, "Fraction of lesions whose texture contradicts the response");
  make->add_option("--signal", pp.signal_feature_id, "GLSZM feature carrying the signal");
  make->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*extract) return run_extract(manifest, config, out, threads);
    if (*cv) return run_cv(margs);
    if (*train) return run_train(margs, scores);
    if (*predict) return run_predict(model_path, margs.features, out);
    if (*make) {
      const auto s = planted_dataset(pp, out);
      std::cout << "wrote " << s.lesions << " lesions (" << s.positives << " positive) to " << s.manifest.string() << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
