#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dimasr/cli/commands.hpp"
#include "dimasr/cli/manifest.hpp"
#include "dimasr/common/error.hpp"

namespace dimasr::cli {

namespace {

constexpr std::string_view kFooter =
    "Environment:\n"
    "  OPENAI_API_KEY     API key for `llm-baseline --live`. Another variable can be\n"
    "                     named with llm.api_key_env in the config.\n"
    "  SOURCE_DATE_EPOCH  Pins the timestamp written to manifest.json.\n"
    "\n"
    "Config files use `key = value` lines under [data], [split], [train], [model],\n"
    "[predict], [eval], [llm] and [compare] headers; `seed` and `out` sit above\n"
    "the first header. Flags override the file. See configs/ for examples.\n"
    "\n"
    "Exit codes: 0 success, 1 usage or config error, 2 data error, 3 runtime failure.";

std::string help_for(std::string_view key) {
  for (const auto& k : known_keys()) {
    if (k.key == key) {
      std::string h(k.help);
      if (!k.default_value.empty()) h += fmt::format(" [{}]", k.default_value);
      return h + fmt::format(" ({})", key);
    }
  }
  return std::string(key);
}

/// Flag values gathered during parsing and applied after the config layer.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> scalars;
  std::map<std::string, std::vector<std::string>> lists;
  std::vector<std::string> raw;  // --set KEY=VALUE
  std::string config;
  std::string from_manifest;
};

struct Binder {
  CLI::App* app;
  Overrides* ov;

  void option(const std::string& flag, std::string key) {
    app->add_option_function<std::string>(
        flag, [ov = ov, key](const std::string& v) { ov->scalars.emplace_back(key, v); }, help_for(key));
  }
  void flag(const std::string& flag, std::string key) {
    app->add_flag_callback(flag, [ov = ov, key] { ov->scalars.emplace_back(key, "true"); }, help_for(key));
  }
  void list(const std::string& flag, std::string key) {
    app->add_option_function<std::vector<std::string>>(
        flag, [ov = ov, key](const std::vector<std::string>& v) { ov->lists[key] = v; }, help_for(key))
        ->take_all();
  }
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& description, Overrides& ov) {
  auto* sub = app.add_subcommand(name, description);
  auto* config = sub->add_option("--config", ov.config, "settings file (TOML/INI style)");
  sub->add_option("--from-manifest", ov.from_manifest, "repeat the run recorded in this manifest.json")
      ->excludes(config);
  Binder b{sub, &ov};
  b.option("--seed", "seed");
  b.option("--out", "out");
  sub->add_option("--set", ov.raw, "override any setting, e.g. --set train.max_epochs=3")->take_all();
  return sub;
}

Settings resolve(const std::string& command, const Overrides& ov) {
  Settings s;
  if (!ov.config.empty()) s.load_file(ov.config);
  if (!ov.from_manifest.empty()) {
    const auto manifest = read_manifest(ov.from_manifest);
    if (manifest.command != command) {
      throw UsageError(fmt::format("{} was written by '{}', not '{}'", ov.from_manifest, manifest.command, command));
    }
    s.load_manifest_config(manifest.config);
  }
  for (const auto& item : ov.raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("--set expects KEY=VALUE, got '{}'", item));
    s.set(item.substr(0, eq), item.substr(eq + 1));
  }
  for (const auto& [key, value] : ov.scalars) s.set(key, value);
  for (const auto& [key, values] : ov.lists) s.set_list(key, values);
  return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dimensional aspect sentiment regression: data preparation, fine-tuning, scoring and LLM baselines",
               "dimasr"};
  app.require_subcommand(1);
  app.footer(std::string(kFooter));

  Overrides ov;
  bool print_config = false;
  bool all = false;

  auto* prepare = add_command(app, "prepare", "expand and split datasets into fit/val/test instance files", ov);
  {
    Binder b{prepare, &ov};
    b.option("--train", "data.train");
    b.option("--dev", "data.dev");
    b.option("--test", "data.test");
    b.option("--format", "data.format");
    b.option("--mode", "split.mode");
    b.option("--ratio", "split.ratio");
    b.option("--holdout", "split.holdout");
    b.option("--language", "data.language");
    b.option("--domain", "data.domain");
  }
  auto* train = add_command(app, "train", "fine-tune the encoder and regression heads", ov);
  {
    Binder b{train, &ov};
    b.option("--data", "train.data");
    b.option("--fit", "train.fit");
    b.option("--val", "train.val");
    b.list("--dataset", "train.datasets");
    b.option("--jobs", "train.jobs");
    b.option("--encoder", "model.encoder");
    b.option("--pretrained", "model.pretrained_dir");
    b.option("--epochs", "train.max_epochs");
    b.option("--batch-size", "train.batch_size");
    b.option("--lr", "train.learning_rate");
    train->add_flag("--all", all, "train every train.datasets entry into OUT/NAME");
    train->add_flag("--print-config", print_config, "print the resolved hyperparameters and exit");
  }
  auto* predict = add_command(app, "predict", "score instances with a checkpoint", ov);
  {
    Binder b{predict, &ov};
    b.option("--checkpoint", "predict.checkpoint");
    b.option("--input", "predict.input");
    b.option("--format", "predict.format");
    b.flag("--submission", "predict.submission");
    b.option("--expected-hidden-dim", "predict.expected_hidden_dim");
  }
  auto* evaluate = add_command(app, "evaluate", "compare predictions with gold labels", ov);
  {
    Binder b{evaluate, &ov};
    b.option("--gold", "eval.gold");
    b.option("--pred", "eval.pred");
    b.option("--gold-format", "eval.gold_format");
    b.option("--v-edges", "eval.v_edges");
    b.option("--a-edges", "eval.a_edges");
  }
  auto* llm = add_command(app, "llm-baseline", "few-shot prompting baseline (live or replayed)", ov);
  {
    Binder b{llm, &ov};
    b.option("--input", "llm.input");
    b.option("--format", "llm.format");
    b.option("--gold", "llm.gold");
    b.flag("--live", "llm.live");
    b.option("--transcript", "llm.transcript");
    b.option("--model", "llm.model");
    b.option("--temperature", "llm.temperature");
    b.option("--max-retries", "llm.max_retries");
    b.option("--concurrency", "llm.concurrency");
    b.option("--base-url", "llm.base_url");
    b.option("--api-key-env", "llm.api_key_env");
    b.option("--exemplars", "llm.exemplars");
    b.option("--exemplar-count", "llm.exemplar_count");
    b.option("--exemplar-pool", "llm.exemplar_pool");
  }
  auto* compare = add_command(app, "compare", "side-by-side table of evaluation reports", ov);
  {
    Binder b{compare, &ov};
    b.list("--report", "compare.reports");
    b.option("--metric", "compare.metric");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  const auto* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  try {
    const auto settings = resolve(command == "train" && all ? "train --all" : command, ov);
    if (command == "prepare") cmd_prepare(settings, out);
    if (command == "train") {
      if (print_config) {
        print_train_config(settings, out);
      } else if (all) {
        cmd_train_all(settings, out);
      } else {
        cmd_train(settings, out);
      }
    }
    if (command == "predict") cmd_predict(settings, out);
    if (command == "evaluate") cmd_evaluate(settings, out);
    if (command == "llm-baseline") cmd_llm_baseline(settings, out);
    if (command == "compare") cmd_compare(settings, out);
    return 0;
  } catch (const UsageError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  } catch (const DataError& e) {
    fmt::print(err, "data error: {}\n", e.what());
    return 2;
  } catch (const RuntimeFailure& e) {
    fmt::print(err, "failed: {}\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    fmt::print(err, "failed: {}\n", e.what());
    return 3;
  }
}

}  // namespace dimasr::cli
