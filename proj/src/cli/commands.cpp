#include "dimasr/cli/commands.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dimasr/cli/compare.hpp"
#include "dimasr/cli/manifest.hpp"
#include "dimasr/common/error.hpp"
#include "dimasr/data/instance_io.hpp"
#include "dimasr/data/split.hpp"
#include "dimasr/data/stats.hpp"
#include "dimasr/llm/baseline.hpp"
#include "dimasr/metrics/report.hpp"
#include "dimasr/model/checkpoint.hpp"
#include "dimasr/train/train_all.hpp"
#include "dimasr/train/trainer.hpp"

namespace dimasr::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kPrepareSections[] = {"data", "split"};
constexpr std::string_view kTrainSections[] = {"train", "model"};
constexpr std::string_view kPredictSections[] = {"predict"};
constexpr std::string_view kEvalSections[] = {"eval"};
constexpr std::string_view kLlmSections[] = {"llm"};
constexpr std::string_view kCompareSections[] = {"compare"};

/// Collects artifacts and writes the manifest last.
class Run {
 public:
  Run(std::string command, const Settings& settings)
      : settings_(settings), out_(settings.required_path("out", "--out")) {
    manifest_.command = std::move(command);
    manifest_.seed = settings.seed();
    fs::create_directories(out_);
  }

  const fs::path& dir() const { return out_; }

  void input(std::string role, const fs::path& path) { manifest_.inputs.push_back(input_artifact(std::move(role), path)); }

  void input_dir(const std::string& role, const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().filename() != kManifestName) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) input(role, f);
  }

  void write(std::string role, const fs::path& relative, std::string_view bytes) {
    write_file(out_ / relative, bytes);
    output(std::move(role), relative);
  }

  void output(std::string role, const fs::path& relative) {
    manifest_.outputs.push_back(output_artifact(std::move(role), out_, relative));
  }

  void finish() {
    const auto sections = sections_for(manifest_.command);
    manifest_.config = settings_.to_json(sections);
    manifest_.overrides = settings_.overridden(sections);
    manifest_.timestamp = run_timestamp();
    write_manifest(out_, manifest_);
  }

 private:
  const Settings& settings_;
  fs::path out_;
  RunManifest manifest_;
};

std::vector<data::AspectInstance> load_input(const fs::path& path, std::string_view format) {
  if (format == "instances") return data::read_instances(path);
  return data::expand_instances(data::parse_dataset(path, data::parse_format_name(format)));
}

void require_gold(std::span<const data::AspectInstance> instances, std::string_view what) {
  for (const auto& x : instances) {
    if (!x.gold) {
      throw DataError(fmt::format("{} instance '{}' aspect_index {} has no VA label", what, x.sentence_id,
                                  x.aspect_index));
    }
  }
}

std::string describe(std::span<const data::AspectInstance> instances) {
  return fmt::format("{} sentences, {} instances", data::sentence_ids(instances).size(), instances.size());
}

int to_int(const Settings& s, std::string_view key) {
  const long long v = s.integer(key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw UsageError(fmt::format("{} is out of range: {}", key, v));
  }
  return static_cast<int>(v);
}

/// Trains one dataset into `dir`. Used by both single and --all runs.
train::JobOutput train_into(const Settings& s, const fs::path& fit_path, const fs::path& val_path, Run& run,
                            const std::function<void(const std::string&)>& log) {
  const auto config = train_config(s);
  run.input("fit", fit_path);
  run.input("val", val_path);
  const auto fit_set = data::read_instances(fit_path);
  const auto val_set = data::read_instances(val_path);
  log(fmt::format("fit: {}; val: {}", describe(fit_set), describe(val_set)));

  auto model = build_model(s, config);
  train::FitHooks hooks;
  hooks.log = log;
  const auto history = train::fit(model, fit_set, val_set, config, hooks);

  model::save_checkpoint(model, run.dir() / "checkpoint");
  for (const auto& name : {"checkpoint.json", "weights.safetensors", "tokenizer.json"}) {
    if (fs::exists(run.dir() / "checkpoint" / name)) run.output("checkpoint", fs::path("checkpoint") / name);
  }
  run.write("history", "history.json", train::history_to_json(history).dump(2) + "\n");
  run.write("history", "history.tsv", train::history_to_tsv(history));
  const auto& best = history.epochs.at(static_cast<std::size_t>(history.best_epoch - 1));
  log(fmt::format("best epoch {} of {} (val rmse_va {:.4f}){}", history.best_epoch, history.epochs.size(),
                  best.val_rmse_va, history.stopped_early ? ", stopped early" : ""));
  run.finish();
  return {history, run.dir() / "checkpoint"};
}

}  // namespace

std::span<const std::string_view> sections_for(std::string_view command) {
  if (command == "prepare") return kPrepareSections;
  if (command == "train" || command == "train --all") return kTrainSections;
  if (command == "predict") return kPredictSections;
  if (command == "evaluate") return kEvalSections;
  if (command == "llm-baseline") return kLlmSections;
  if (command == "compare") return kCompareSections;
  throw UsageError(fmt::format("unknown command '{}'", command));
}

train::TrainConfig train_config(const Settings& s) {
  train::TrainConfig c;
  c.batch_size = to_int(s, "train.batch_size");
  c.learning_rate = s.real("train.learning_rate");
  c.warmup_ratio = s.real("train.warmup_ratio");
  c.dropout = s.real("train.dropout");
  c.max_epochs = to_int(s, "train.max_epochs");
  c.patience = to_int(s, "train.patience");
  c.min_delta = s.real("train.min_delta");
  c.grad_clip_norm = s.real("train.grad_clip_norm");
  c.seed = s.seed();
  c.max_len = to_int(s, "train.max_len");
  c.weight_decay = s.real("train.weight_decay");
  c.adam_beta1 = s.real("train.adam_beta1");
  c.adam_beta2 = s.real("train.adam_beta2");
  c.adam_eps = s.real("train.adam_eps");
  c.validate();
  return c;
}

model::DimASRModel build_model(const Settings& s, const train::TrainConfig& config) {
  const auto kind = s.text("model.encoder");
  model::ModelOptions options;
  options.input_dropout = config.dropout;
  options.head_dropout = config.dropout;
  options.head_internal_dropout = s.boolean("model.head_internal_dropout");
  if (kind == "stand_in") {
    model::StandInOptions o;
    o.hidden_size = to_int(s, "model.hidden_size");
    o.num_layers = to_int(s, "model.num_layers");
    o.num_heads = to_int(s, "model.num_heads");
    o.intermediate_size = to_int(s, "model.intermediate_size");
    o.vocab_size = to_int(s, "model.vocab_size");
    o.init_stddev = s.real("model.init_stddev");
    o.dropout = config.dropout;
    if (o.hidden_size <= 0 || o.num_layers <= 0 || o.num_heads <= 0 || o.hidden_size % o.num_heads != 0 ||
        o.intermediate_size <= 0 || o.vocab_size <= 0 || o.init_stddev <= 0.0) {
      throw UsageError("stand-in encoder needs positive sizes with hidden_size divisible by num_heads");
    }
    return model::DimASRModel(model::EncoderAdapter::stand_in(o, config.max_len, config.seed), options, config.seed);
  }
  if (kind == "pretrained") {
    const auto dir = s.required_path("model.pretrained_dir", "--pretrained");
    return model::DimASRModel(
        model::EncoderAdapter::load_pretrained(dir, config.max_len, s.boolean("model.double_separator")), options,
        config.seed);
  }
  throw UsageError(fmt::format("model.encoder must be pretrained or stand_in, got '{}'", kind));
}

void cmd_prepare(const Settings& s, std::ostream& log) {
  const auto format = data::parse_format_name(s.text("data.format"));
  const auto mode = s.text("split.mode");
  if (mode != "dev" && mode != "submission") {
    throw UsageError(fmt::format("split.mode must be dev or submission, got '{}'", mode));
  }
  const auto train_path = s.required_path("data.train", "--train");
  std::optional<fs::path> dev_path;
  if (mode == "submission") {
    dev_path = s.required_path("data.dev", "--dev");
  } else if (s.has("data.dev")) {
    log << "note: the dev protocol splits the training file only; data.dev is not used\n";
  }
  Run run("prepare", s);
  const auto language = s.text("data.language");
  const auto domain = s.text("data.domain");

  run.input("train", train_path);
  const auto train_records = data::parse_dataset(train_path, format);
  const auto train_instances = data::expand_instances(train_records);
  require_gold(train_instances, "training");
  std::vector<data::DatasetGroup> groups{{language, domain, "train", train_records}};

  std::vector<data::SentenceRecord> dev_records;
  data::DatasetSplit split;
  if (dev_path) {
    run.input("dev", *dev_path);
    dev_records = data::parse_dataset(*dev_path, format);
    const auto dev_instances = data::expand_instances(dev_records);
    require_gold(dev_instances, "development");
    groups.push_back({language, domain, "dev", dev_records});
    split = data::merge_and_hold_out(train_instances, dev_instances, s.real("split.holdout"), s.seed());
  } else {
    split = data::split_dev_protocol(train_instances, s.real("split.ratio"), s.seed());
  }

  std::vector<data::SentenceRecord> test_records;
  if (const auto test_path = s.path("data.test")) {
    run.input("test", *test_path);
    test_records = data::parse_dataset(*test_path, format);
    groups.push_back({language, domain, "test", test_records});
    run.write("test", "test.jsonl", data::render_instances(data::expand_instances(test_records)));
  }
  run.write("fit", "fit.jsonl", data::render_instances(split.train));
  run.write("val", "val.jsonl", data::render_instances(split.eval));

  std::string stats = data::format_stats_table(data::dataset_stats(groups));
  stats += fmt::format("\n{} protocol, seed {}\n", mode, s.seed());
  stats += fmt::format("fit: {}\n", describe(split.train));
  stats += fmt::format("val: {}\n", describe(split.eval));
  run.write("stats", "stats.txt", stats);
  log << stats;
  run.finish();
}

void print_train_config(const Settings& s, std::ostream& out) {
  const auto c = train_config(s);
  const auto encoder = s.text("model.encoder");
  std::string encoder_line = encoder;
  if (encoder == "pretrained") {
    encoder_line += " (" + (s.has("model.pretrained_dir") ? s.text("model.pretrained_dir") : "no directory set") + ")";
  } else {
    encoder_line += fmt::format(" (d={}, layers={}, heads={})", s.text("model.hidden_size"), s.text("model.num_layers"),
                                s.text("model.num_heads"));
  }
  const std::pair<std::string, std::string> rows[] = {
      {"encoder", encoder_line},
      {"max_len", std::to_string(c.max_len)},
      {"batch_size", std::to_string(c.batch_size)},
      {"learning_rate", short_real(c.learning_rate)},
      {"optimizer", fmt::format("AdamW (beta1 {}, beta2 {}, eps {}, weight_decay {})", short_real(c.adam_beta1),
                                short_real(c.adam_beta2), short_real(c.adam_eps), short_real(c.weight_decay))},
      {"warmup_ratio", short_real(c.warmup_ratio * 100.0) + "%"},
      {"scheduler", "linear decay"},
      {"dropout", short_real(c.dropout)},
      {"max_epochs", std::to_string(c.max_epochs)},
      {"patience", std::to_string(c.patience)},
      {"grad_clip_norm", short_real(c.grad_clip_norm)},
      {"seed", std::to_string(c.seed)},
  };
  for (const auto& [k, v] : rows) fmt::print(out, "{:<15} {}\n", k, v);
}

void cmd_train(const Settings& s, std::ostream& log) {
  fs::path fit_path, val_path;
  if (const auto data_dir = s.path("train.data")) {
    fit_path = *data_dir / "fit.jsonl";
    val_path = *data_dir / "val.jsonl";
  }
  if (const auto p = s.path("train.fit")) fit_path = *p;
  if (const auto p = s.path("train.val")) val_path = *p;
  if (fit_path.empty()) throw UsageError("missing training data: pass --data DIR or --fit FILE");
  if (val_path.empty() || !fs::exists(val_path)) {
    throw DataError(fmt::format("validation set required for early stopping, got none{}",
                                val_path.empty() ? "" : " at " + val_path.string()));
  }
  train_config(s);
  Run run("train", s);
  train_into(s, fit_path, val_path, run, [&](const std::string& line) { log << line << '\n'; });
}

void cmd_train_all(const Settings& s, std::ostream& log) {
  const auto datasets = s.labeled_paths("train.datasets");
  if (datasets.empty()) throw UsageError("--all needs train.datasets entries (NAME=PREPARED_DIR)");
  const int jobs = to_int(s, "train.jobs");
  if (jobs < 1) throw UsageError("train.jobs must be >= 1");
  train_config(s);
  const auto out = s.required_path("out", "--out");

  std::map<std::string, fs::path> dirs;
  std::vector<std::string> names;
  for (const auto& [name, dir] : datasets) {
    if (!dirs.emplace(name, dir).second) throw UsageError(fmt::format("dataset '{}' listed twice", name));
    names.push_back(name);
  }
  std::mutex log_mutex;
  const auto results = train::train_all(
      names,
      [&](const std::string& name) {
        Settings local = s;
        local.set("out", (out / name).string(), Source::command_line);
        local.set("train.data", dirs.at(name).string(), Source::command_line);
        Run run("train", local);
        const auto data_dir = dirs.at(name);
        if (!fs::exists(data_dir / "val.jsonl")) {
          throw DataError(fmt::format("validation set required for early stopping, got none in {}", data_dir.string()));
        }
        return train_into(local, data_dir / "fit.jsonl", data_dir / "val.jsonl", run, [&](const std::string& line) {
          std::lock_guard lock(log_mutex);
          log << '[' << name << "] " << line << '\n';
        });
      },
      static_cast<unsigned>(jobs));

  Run run("train --all", s);
  const auto summary = train::format_train_all_summary(results);
  run.write("summary", "summary.txt", summary);
  for (const auto& r : results) {
    if (r.ok()) run.output("manifest", fs::path(r.name) / kManifestName);
  }
  run.finish();
  log << summary;
  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.ok(); });
  if (failed > 0) throw RuntimeFailure(fmt::format("{} of {} datasets failed", failed, results.size()));
}

void cmd_predict(const Settings& s, std::ostream& log) {
  const auto checkpoint = s.required_path("predict.checkpoint", "--checkpoint");
  const auto input = s.required_path("predict.input", "--input");
  std::optional<int> expected;
  if (s.has("predict.expected_hidden_dim")) expected = to_int(s, "predict.expected_hidden_dim");
  const auto model = model::load_checkpoint(checkpoint, expected);
  const auto instances = load_input(input, s.text("predict.format"));
  if (instances.empty()) throw DataError(fmt::format("{} holds no instances", input.string()));

  Run run("predict", s);
  run.input_dir("checkpoint", checkpoint);
  run.input("input", input);
  const auto va = model.forward(instances, model::Mode::eval);
  std::vector<data::Prediction> predictions;
  predictions.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    predictions.push_back({instances[i].sentence_id, instances[i].aspect_index, instances[i].aspect, va[i]});
  }
  run.write("predictions", "predictions.jsonl", data::render_predictions(predictions));
  if (s.boolean("predict.submission")) {
    run.write("submission", "submission.jsonl", data::render_task_submission(predictions));
  }
  log << fmt::format("{} predictions written to {}\n", predictions.size(), (run.dir() / "predictions.jsonl").string());
  run.finish();
}

void cmd_evaluate(const Settings& s, std::ostream& log) {
  const auto gold = s.required_path("eval.gold", "--gold");
  const auto pred = s.required_path("eval.pred", "--pred");
  const auto v_edges = s.reals("eval.v_edges");
  const auto a_edges = s.reals("eval.a_edges");
  const auto scored =
      metrics::score_files(gold, pred, data::parse_gold_format(s.text("eval.gold_format")), v_edges, a_edges);

  Run run("evaluate", s);
  run.input("gold", gold);
  run.input("pred", pred);
  run.write("report", "report.json", metrics::report_to_json(scored.report, scored.heatmap).dump(2) + "\n");
  const auto text = metrics::format_report_text(scored.report, scored.heatmap);
  run.write("report", "report.txt", text);

  // Largest errors first, for reading failure cases.
  const auto& p = scored.pairs;
  const auto errors = metrics::per_instance_errors(p.preds, p.golds);
  std::vector<std::size_t> order(errors.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return errors[a] > errors[b]; });
  std::string tsv = "id\taspect_index\taspect\tgold\tpred\terror\n";
  for (std::size_t i : order) {
    const auto& x = p.gold_instances[i];
    tsv += fmt::format("{}\t{}\t{}\t{}\t{}\t{:.4f}\n", x.sentence_id, x.aspect_index, x.aspect,
                       data::format_va_string(p.golds[i]), data::format_va_string(p.preds[i]), errors[i]);
  }
  run.write("errors", "errors.tsv", tsv);
  log << text;
  run.finish();
}

void cmd_llm_baseline(const Settings& s, std::ostream& log) {
  llm::LlmRunConfig config;
  config.model = s.text("llm.model");
  config.temperature = s.real("llm.temperature");
  config.max_retries = to_int(s, "llm.max_retries");
  config.concurrency = to_int(s, "llm.concurrency");
  config.validate();

  const bool live = s.boolean("llm.live");
  const auto transcript = s.path("llm.transcript");
  if (live && transcript) throw UsageError("use either --live or --transcript, not both");
  if (!live && !transcript) throw UsageError("llm-baseline needs --live or --transcript FILE");

  const auto input = s.required_path("llm.input", "--input");
  const auto instances = load_input(input, s.text("llm.format"));
  if (instances.empty()) throw DataError(fmt::format("{} holds no instances", input.string()));

  const auto mode = s.text("llm.exemplars");
  const auto count = s.integer("llm.exemplar_count");
  if (count < 0) throw UsageError("llm.exemplar_count must be >= 0");
  std::vector<llm::Exemplar> exemplars;
  std::optional<fs::path> pool_path;
  if (mode == "fixed") {
    const auto& fixed = llm::default_exemplars();
    if (static_cast<std::size_t>(count) > fixed.size()) {
      throw UsageError(fmt::format("only {} fixed exemplars exist, asked for {}", fixed.size(), count));
    }
    exemplars.assign(fixed.begin(), fixed.begin() + count);
  } else if (mode == "sampled") {
    pool_path = s.required_path("llm.exemplar_pool", "--exemplar-pool");
    const auto pool = data::read_instances(*pool_path);
    exemplars = llm::sample_exemplars(pool, static_cast<std::size_t>(count), s.seed());
  } else if (mode != "none") {
    throw UsageError(fmt::format("llm.exemplars must be fixed, sampled or none, got '{}'", mode));
  }

  std::unique_ptr<llm::ChatTransport> transport;
  if (live) {
    llm::EndpointConfig endpoint;
    endpoint.base_url = s.text("llm.base_url");
    endpoint.api_key_env = s.text("llm.api_key_env");
    endpoint.timeout_seconds = to_int(s, "llm.timeout");
    transport = std::make_unique<llm::OpenAiTransport>(endpoint);
  } else {
    transport = std::make_unique<llm::ReplayTransport>(*transcript);
  }

  Run run("llm-baseline", s);
  run.input("input", input);
  if (pool_path) run.input("exemplar_pool", *pool_path);
  if (transcript) run.input("transcript", *transcript);
  const auto result = llm::run_baseline(instances, exemplars, llm::kSystemPrompt, config, *transport);

  run.write("predictions", "predictions.jsonl", data::render_predictions(result.predictions));
  run.write("transcript", "transcript.jsonl", llm::render_transcript(result));
  OrderedJson summary;
  summary["instances"] = result.predictions.size();
  summary["requests"] = result.transcript.size();
  summary["fallbacks"] = result.fallbacks;
  summary["parse_failures"] = result.parse_failures;
  summary["transport_errors"] = result.transport_errors;
  summary["mode"] = live ? "live" : "replay";
  run.write("summary", "summary.json", summary.dump(2) + "\n");
  log << fmt::format("{} instances, {} requests, {} fallbacks ({} parse failures, {} transport errors), {}\n",
                     result.predictions.size(), result.transcript.size(), result.fallbacks, result.parse_failures,
                     result.transport_errors, live ? "live" : "replayed");

  if (const auto gold = s.path("llm.gold")) {
    run.input("gold", *gold);
    const auto scored = metrics::score_files(*gold, run.dir() / "predictions.jsonl");
    run.write("report", "report.json", metrics::report_to_json(scored.report, scored.heatmap).dump(2) + "\n");
    const auto text = metrics::format_report_text(scored.report, scored.heatmap);
    run.write("report", "report.txt", text);
    log << text;
  }
  run.finish();
  if (result.all_failed()) {
    throw RuntimeFailure(fmt::format("every instance fell back to the midpoint ({} of {}); see {}", result.fallbacks,
                                     result.predictions.size(), (run.dir() / "transcript.jsonl").string()));
  }
}

void cmd_compare(const Settings& s, std::ostream& log) {
  const auto metric = s.text("compare.metric");
  const auto reports = s.labeled_paths("compare.reports");
  if (reports.empty()) throw UsageError("compare needs --report METHOD:DATASET=report.json (at least one)");
  Run run("compare", s);
  std::vector<ComparisonEntry> entries;
  for (const auto& [label, path] : reports) {
    auto [method, dataset] = parse_report_label(label);
    run.input(label, path);
    entries.push_back({std::move(method), std::move(dataset), read_report_metric(path, metric)});
  }
  const auto table = build_comparison(entries);
  const auto text = format_comparison(table, metric);
  run.write("table", "compare.txt", text);
  run.write("table", "compare.json", comparison_to_json(table, metric).dump(2) + "\n");
  log << text;
  run.finish();
}

}  // namespace dimasr::cli
