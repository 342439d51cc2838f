#include "intimacy/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "intimacy/augmentation.hpp"
#include "intimacy/evaluation.hpp"
#include "intimacy/languages.hpp"
#include "intimacy/translate.hpp"
#include "intimacy/util.hpp"

namespace intimacy {

namespace {

namespace fs = std::filesystem;

fs::path test_input_path(const RunConfig& config) {
  if (!config.test_path.empty()) return config.test_path;
  return fs::path(config.out_dir) / "test.csv";
}

fs::path predictions_path(const RunConfig& config) {
  return fs::path(config.out_dir) /
         ("predictions_" + to_string(config.mode) + ".tsv");
}

std::unique_ptr<Translator> make_translator(const RunConfig& config) {
  if (config.translator == "identity") {
    return std::make_unique<IdentityTranslator>();
  }
  if (config.translator == "dictionary") {
    return std::make_unique<DictionaryTranslator>(
        DictionaryTranslator::from_file(config.translator_lexicon));
  }
  if (config.translator == "http") {
    return std::make_unique<HttpTranslator>(
        HttpTranslator::parse_endpoint(config.translator_endpoint));
  }
  throw ValidationError("unknown translator '" + config.translator + "'");
}

HandleMap load_handles(const RunConfig& config, const Registry& registry,
                       PredictorBackend& backend) {
  HandleMap handles;
  for (const auto& spec : registry.members()) {
    try {
      handles.emplace(spec.id, load_checkpoint(config.checkpoints_dir, spec,
                                               config.train, backend));
    } catch (const Error& e) {
      std::cerr << "warning: member '" << spec.id
                << "' has no usable checkpoint (" << e.what()
                << "); it will fail if the ensemble resolves it\n";
    }
  }
  return handles;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

}  // namespace

int cmd_prepare(const RunConfig& config, const PrepareOptions&) {
  config.validate();
  if (config.primary_path.empty()) {
    throw ValidationError("prepare: paths.primary is required");
  }
  const CsvOptions csv{config.delimiter};

  auto primary = filter_scored(load_corpus(config.primary_path, Source::primary,
                                           kIntimacyRange, config.columns, csv));
  std::vector<LabeledExample> auxiliary;
  if (!config.auxiliary_path.empty()) {
    auxiliary = filter_scored(
        load_auxiliary(config.auxiliary_path, config.columns, csv));
  }

  DatasetSplit split = make_splits(primary, auxiliary, config.validation_count,
                                   config.seed, config.stratify_validation);
  if (!config.test_path.empty()) {
    split.test = load_corpus(config.test_path, Source::test, kIntimacyRange,
                             config.columns, csv);
    for (const auto& ex : split.test) split.test_provenance.add(ex.source);
  }

  write_split(config.out_dir, split, config.columns, csv);
  std::cerr << "prepare: train=" << split.train.size()
            << " validation=" << split.validation.size()
            << " test=" << split.test.size() << " -> " << config.out_dir << "\n";
  return kExitOk;
}

int cmd_train(const RunConfig& config, const TrainOptions& options) {
  config.validate();
  const CsvOptions csv{config.delimiter};
  const fs::path out_dir(config.out_dir);

  const auto train_examples = load_corpus(out_dir / "train.csv", Source::primary,
                                          kIntimacyRange, config.columns, csv);
  const auto validation_examples =
      load_corpus(out_dir / "validation.csv", Source::primary, kIntimacyRange,
                  config.columns, csv);

  const Registry registry = config.effective_registry();
  auto backend = make_backend(config.backend);
  TrainConfig train_config = config.train;
  train_config.seed = config.seed;

  for (const auto& spec : registry.members()) {
    if (!options.force && checkpoint_exists(config.checkpoints_dir, spec.id)) {
      std::cerr << "train: " << spec.id << ": checkpoint exists, skipping\n";
      continue;
    }
    std::cerr << "train: " << spec.id
              << " lr=" << format_double(train_config.resolved_learning_rate(spec))
              << " epochs=" << train_config.epochs << "\n";
    const auto handle = finetune(spec, train_examples, validation_examples,
                                 train_config, *backend);
    save_checkpoint(config.checkpoints_dir, handle, *backend);
    const auto& metrics = handle.metrics;
    std::cerr << "train: " << spec.id
              << " final_mse=" << format_double(metrics.final_train_mse)
              << " best_val_pearson="
              << (metrics.best_validation_pearson
                      ? format_double(*metrics.best_validation_pearson)
                      : std::string("undefined"))
              << "\n";
  }
  return kExitOk;
}

int cmd_predict(const RunConfig& config, const PredictOptions&) {
  config.validate();
  const CsvOptions csv{config.delimiter};

  const auto examples = load_corpus(test_input_path(config), Source::test,
                                    kIntimacyRange, config.columns, csv);
  const Registry registry = config.effective_registry();
  auto backend = make_backend(config.backend);
  const HandleMap handles = load_handles(config, registry, *backend);

  EnsembleConfig ensemble_config = config.ensemble;
  ensemble_config.mode = config.mode;

  std::vector<PredictionRecord> records;
  if (config.mode == Mode::augmented) {
    auto translator = make_translator(config);
    if (!config.translation_cache.empty()) {
      auto cache = std::make_shared<TranslationCache>(
          TranslationCache::load(config.translation_cache));
      CachingTranslator caching(*translator, *cache);
      records = predict_augmented(examples, registry, handles, ensemble_config,
                                  config.effective_seen_languages(), caching,
                                  *backend, config.on_translation_failure);
      cache->save(config.translation_cache);
    } else {
      records = predict_augmented(examples, registry, handles, ensemble_config,
                                  config.effective_seen_languages(), *translator,
                                  *backend, config.on_translation_failure);
    }
  } else {
    records = predict_corpus(examples, ensemble_config, registry, handles,
                             *backend);
  }

  fs::create_directories(config.out_dir);
  const auto out_path = predictions_path(config);
  write_predictions(out_path, records);
  std::cerr << "predict: " << records.size() << " records -> "
            << out_path.string() << "\n";
  return kExitOk;
}

int cmd_evaluate(const RunConfig& config, const EvaluateOptions& options) {
  config.validate();
  const CsvOptions csv{config.delimiter};

  const auto gold = load_corpus(test_input_path(config), Source::test,
                                kIntimacyRange, config.columns, csv);
  const auto records = read_predictions(predictions_path(config));

  EvaluationReport report =
      evaluate(records, gold, config.effective_seen_languages());
  report.mode = config.mode;
  report.config_fingerprint = config.fingerprint();

  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);
  const std::string mode_name = to_string(config.mode);
  write_text_file(out_dir / ("report_" + mode_name + ".json"),
                  render_report(report, ReportFormat::json));
  write_text_file(out_dir / ("report_" + mode_name + ".csv"),
                  render_report(report, ReportFormat::csv));
  std::cout << render_report(report, parse_report_format(options.format));

  if (options.kde || !options.kde_svg.empty()) {
    std::vector<double> combined;
    combined.reserve(records.size());
    for (const auto& r : records) combined.push_back(r.combined);
    const double h = scott_bandwidth(combined);
    const double lo = std::min(1.0, *std::min_element(combined.begin(), combined.end())) - 5.0 * h;
    const double hi = std::max(5.0, *std::max_element(combined.begin(), combined.end())) + 5.0 * h;
    const auto curve = kde_curve(combined, h, {lo, hi, 601});
    if (options.kde) {
      write_kde_csv(out_dir / ("kde_" + mode_name + ".csv"), curve);
    }
    if (!options.kde_svg.empty()) write_kde_svg(options.kde_svg, curve);
  }
  return kExitOk;
}

int cmd_report(const RunConfig&, const ReportOptions& options) {
  if (options.report_path.empty()) {
    throw ValidationError("report: --report <report.json> is required");
  }
  const auto report = load_report(options.report_path);
  const auto text = render_report(report, parse_report_format(options.format));
  if (options.out_file.empty()) {
    std::cout << text;
  } else {
    write_text_file(options.out_file, text);
  }
  return kExitOk;
}

namespace {

struct CommonFlags {
  std::string config_path;
  std::string mode;
  std::string backend;
  std::string out_dir;
  std::string translator;
  std::uint64_t seed = 0;
  CLI::Option* config_opt = nullptr;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* backend_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* translator_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* app) {
    config_opt = app->add_option("--config", config_path, "JSON run config")
                     ->envname("INTIMACY_CONFIG");
    mode_opt = app->add_option("--mode", mode,
                               "ensemble mode: multilingual|routed|augmented")
                   ->envname("INTIMACY_MODE");
    backend_opt = app->add_option("--backend", backend, "predictor backend: stub|hashed")
                      ->envname("INTIMACY_BACKEND");
    out_opt = app->add_option("--out", out_dir, "output directory")
                  ->envname("INTIMACY_OUT");
    translator_opt = app->add_option("--translator", translator,
                                     "translator: identity|dictionary|http")
                         ->envname("INTIMACY_TRANSLATOR");
    seed_opt = app->add_option("--seed", seed, "random seed")
                   ->envname("INTIMACY_SEED");
  }

  RunConfig build() const {
    RunConfig config;
    if (config_opt->count()) config = RunConfig::load(config_path);
    if (mode_opt->count()) config.mode = parse_mode(mode);
    if (backend_opt->count()) config.backend = backend;
    if (out_opt->count()) config.out_dir = out_dir;
    if (translator_opt->count()) config.translator = translator;
    if (seed_opt->count()) config.seed = seed;
    return config;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"multilingual tweet intimacy regression pipeline"};
  app.require_subcommand(1);

  // prepare
  auto* prepare = app.add_subcommand("prepare", "build train/validation/test splits");
  CommonFlags prepare_flags;
  prepare_flags.attach(prepare);
  std::string primary, auxiliary, test;
  std::size_t validation_count = 0;
  bool stratify = false;
  auto* primary_opt = prepare->add_option("--primary", primary, "primary corpus csv");
  auto* auxiliary_opt = prepare->add_option("--auxiliary", auxiliary, "auxiliary corpus csv");
  auto* test_opt = prepare->add_option("--test", test, "test corpus csv");
  auto* vc_opt = prepare->add_option("--validation-count", validation_count,
                                     "validation examples drawn from primary");
  auto* strat_opt = prepare->add_flag("--stratify", stratify,
                                      "stratify validation sampling by language");

  // train
  auto* train = app.add_subcommand("train", "fine-tune all registry members");
  CommonFlags train_flags;
  train_flags.attach(train);
  TrainOptions train_options;
  train->add_flag("--force", train_options.force, "retrain over existing checkpoints");
  std::string registry_path_flag, checkpoints_flag;
  auto* train_registry_opt = train->add_option("--registry", registry_path_flag,
                                               "registry json");
  auto* train_ckpt_opt = train->add_option("--checkpoints", checkpoints_flag,
                                           "checkpoint directory");

  // predict
  auto* predict = app.add_subcommand("predict", "score the test corpus");
  CommonFlags predict_flags;
  predict_flags.attach(predict);
  std::string predict_registry, predict_ckpt, predict_input;
  auto* predict_registry_opt = predict->add_option("--registry", predict_registry,
                                                   "registry json");
  auto* predict_ckpt_opt = predict->add_option("--checkpoints", predict_ckpt,
                                               "checkpoint directory");
  auto* predict_input_opt = predict->add_option("--input", predict_input,
                                                "corpus to score (default: <out>/test.csv)");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score predictions against gold");
  CommonFlags evaluate_flags;
  evaluate_flags.attach(evaluate_cmd);
  EvaluateOptions evaluate_options;
  std::string evaluate_input;
  evaluate_cmd->add_flag("--kde", evaluate_options.kde,
                         "emit a kernel density estimate of the combined scores");
  evaluate_cmd->add_option("--kde-svg", evaluate_options.kde_svg,
                           "write an svg plot of the kde curve");
  evaluate_cmd->add_option("--format", evaluate_options.format,
                           "stdout format: table|json|csv");
  auto* evaluate_input_opt = evaluate_cmd->add_option(
      "--gold", evaluate_input, "gold corpus (default: <out>/test.csv)");

  // report
  auto* report_cmd = app.add_subcommand("report", "re-render a stored report");
  CommonFlags report_flags;
  report_flags.attach(report_cmd);
  ReportOptions report_options;
  report_cmd->add_option("--report", report_options.report_path, "report json file");
  report_cmd->add_option("--format", report_options.format, "table|json|csv");
  report_cmd->add_option("--out-file", report_options.out_file,
                         "write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*prepare) {
      RunConfig config = prepare_flags.build();
      if (primary_opt->count()) config.primary_path = primary;
      if (auxiliary_opt->count()) config.auxiliary_path = auxiliary;
      if (test_opt->count()) config.test_path = test;
      if (vc_opt->count()) config.validation_count = validation_count;
      if (strat_opt->count()) config.stratify_validation = stratify;
      return cmd_prepare(config, {});
    }
    if (*train) {
      RunConfig config = train_flags.build();
      if (train_registry_opt->count()) config.registry_path = registry_path_flag;
      if (train_ckpt_opt->count()) config.checkpoints_dir = checkpoints_flag;
      return cmd_train(config, train_options);
    }
    if (*predict) {
      RunConfig config = predict_flags.build();
      if (predict_registry_opt->count()) config.registry_path = predict_registry;
      if (predict_ckpt_opt->count()) config.checkpoints_dir = predict_ckpt;
      if (predict_input_opt->count()) config.test_path = predict_input;
      return cmd_predict(config, {});
    }
    if (*evaluate_cmd) {
      RunConfig config = evaluate_flags.build();
      if (evaluate_input_opt->count()) config.test_path = evaluate_input;
      return cmd_evaluate(config, evaluate_options);
    }
    if (*report_cmd) {
      return cmd_report(report_flags.build(), report_options);
    }
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("intimacy");
  for (const auto& a : args) storage.push_back(a);
  std::vector<const char*> argv;
  argv.reserve(storage.size());
  for (const auto& s : storage) argv.push_back(s.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace intimacy
