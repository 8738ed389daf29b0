#include <cstdint>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mtsent/commands.hpp"
#include "mtsent/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"multitask sentiment toolkit"};
  app.set_version_flag("--version", std::string(mtsent::kVersion));
  app.require_subcommand(1);

  mtsent::TrainOptions train_opt;
  std::optional<std::uint64_t> train_seed;
  CLI::App* train = app.add_subcommand("train", "train the joint network");
  train->add_option("-c,--config", train_opt.config_path, "run config (INI)")->required();
  train->add_option("--seed", train_seed, "override the config seed");
  train->add_option("--out", train_opt.out, "run directory (default: runs/<stamp>-<seed>)");
  train->add_flag("--single-task", train_opt.single_task,
                  "train the primary head alone, no auxiliary task");

  mtsent::EvaluateOptions eval_opt;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score a model on a labeled file");
  evaluate->add_option("--model", eval_opt.model_path, "model file")->required();
  evaluate->add_option("--data", eval_opt.data_path, "labeled TSV")->required();
  evaluate->add_option("--scale", eval_opt.scale, "fine | ternary")->required();
  evaluate->add_option("-c,--config", eval_opt.config_path,
                       "run config (needed when the model uses extra features)");
  evaluate->add_option("--out", eval_opt.out, "also write the report here");
  evaluate->add_flag("--fig2", eval_opt.fig2, "append per-class error rows");

  mtsent::PredictOptions pred_opt;
  CLI::App* predict = app.add_subcommand("predict", "label a file of tweets");
  predict->add_option("--model", pred_opt.model_path, "model file")->required();
  predict->add_option("--input", pred_opt.input_path, "TSV with id, label (ignored), text")
      ->required();
  predict->add_option("--task", pred_opt.task, "head to use (default: fine)");
  predict->add_option("-c,--config", pred_opt.config_path,
                      "run config (needed when the model uses extra features)");
  predict->add_option("--out", pred_opt.out, "write predictions here instead of stdout");

  mtsent::BaselineOptions base_opt;
  std::optional<std::uint64_t> base_seed;
  CLI::App* baseline = app.add_subcommand("baseline", "linear baselines over averaged vectors");
  baseline->add_option("-c,--config", base_opt.config_path, "run config (INI)")->required();
  baseline->add_option("--seed", base_seed, "override the config seed");
  baseline->add_option("--out", base_opt.out, "run directory");
  baseline->add_option("--strategy", base_opt.strategy,
                       "svm_ovr | svm_cs | lr_ovr | maxent (default: config)");
  baseline->add_option("--representation", base_opt.representation,
                       "nbow | nbow_plus (default: config)");
  baseline->add_option("--scale", base_opt.scale, "fine | ternary (default: fine)");
  baseline->add_flag("--tune", base_opt.tune, "cross-validated grid search over C");
  baseline->add_option("--tune-on", base_opt.tune_on, "train | train+dev (default: config)");
  baseline->add_option("--c-value", base_opt.c_value, "fixed C when not tuning (default: 1)");

  mtsent::FeaturesOptions feat_opt;
  CLI::App* features = app.add_subcommand("features", "materialize the feature matrix");
  features->add_option("-c,--config", feat_opt.config_path, "run config (INI)")->required();
  features->add_option("--data", feat_opt.data_path, "labeled TSV (default: fine train)");
  features->add_option("--scale", feat_opt.scale, "fine | ternary (default: fine)");
  features->add_option("--out", feat_opt.out, "output directory (default: .)");

  mtsent::SummarizeOptions sum_opt;
  CLI::App* summarize = app.add_subcommand("summarize", "aggregate run records");
  summarize->add_option("dirs", sum_opt.run_dirs, "run directories")->required();

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) {
    train_opt.seed = train_seed;
    return mtsent::cmd_train(train_opt);
  }
  if (evaluate->parsed()) return mtsent::cmd_evaluate(eval_opt);
  if (predict->parsed()) return mtsent::cmd_predict(pred_opt);
  if (baseline->parsed()) {
    base_opt.seed = base_seed;
    return mtsent::cmd_baseline(base_opt);
  }
  if (features->parsed()) return mtsent::cmd_features(feat_opt);
  if (summarize->parsed()) return mtsent::cmd_summarize(sum_opt);
  return mtsent::kExitConfig;
}
