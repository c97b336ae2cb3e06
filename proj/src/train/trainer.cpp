#include "dimasr/train/trainer.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"
#include "dimasr/metrics/metrics.hpp"
#include "dimasr/nn/optim.hpp"
#include "dimasr/train/early_stopping.hpp"
#include "dimasr/train/schedule.hpp"

namespace dimasr::train {

double compute_loss(std::span<const data::VAPair> preds, std::span<const data::VAPair> golds) {
  if (preds.size() != golds.size()) {
    throw UsageError(fmt::format("loss: {} predictions for {} golds", preds.size(), golds.size()));
  }
  if (preds.empty()) throw UsageError("loss: empty batch");
  double sv = 0.0;
  double sa = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double dv = preds[i].valence() - golds[i].valence();
    const double da = preds[i].arousal() - golds[i].arousal();
    sv += dv * dv;
    sa += da * da;
  }
  const auto n = static_cast<double>(preds.size());
  return sv / n + sa / n;
}

std::size_t steps_per_epoch(std::size_t instances, int batch_size) {
  const auto b = static_cast<std::size_t>(batch_size);
  return (instances + b - 1) / b;
}

namespace {

void require_gold(std::span<const data::AspectInstance> set, std::string_view role) {
  for (const auto& instance : set) {
    if (!instance.gold) {
      throw DataError(fmt::format("{} instance '{}' aspect_index {} has no gold label", role, instance.sentence_id,
                                  instance.aspect_index));
    }
  }
}

double validation_rmse(const model::DimASRModel& model, std::span<const data::AspectInstance> val_set) {
  const auto preds = model.forward(val_set, model::Mode::eval);
  std::vector<data::VAPair> golds;
  golds.reserve(val_set.size());
  for (const auto& instance : val_set) golds.push_back(*instance.gold);
  return metrics::rmse_va(preds, golds);
}

}  // namespace

TrainHistory fit(model::DimASRModel& model, std::span<const data::AspectInstance> fit_set,
                 std::span<const data::AspectInstance> val_set, const TrainConfig& config, const FitHooks& hooks) {
  config.validate();
  if (fit_set.empty()) throw DataError("training set is empty");
  if (val_set.empty()) throw DataError("validation set required for early stopping, got none");
  require_gold(fit_set, "training");
  require_gold(val_set, "validation");

  auto log = [&](const std::string& line) {
    if (hooks.log) hooks.log(line);
  };

  const nn::ParameterList params = model.parameters();
  nn::AdamW optimizer({config.adam_beta1, config.adam_beta2, config.adam_eps, config.weight_decay});
  Rng shuffle_rng(derive_seed(config.seed, "shuffle"));
  Rng dropout_rng(derive_seed(config.seed, "dropout"));
  EarlyStopping stopper(config.patience, config.min_delta);

  const std::size_t per_epoch = steps_per_epoch(fit_set.size(), config.batch_size);
  const std::size_t total_steps = per_epoch * static_cast<std::size_t>(config.max_epochs);
  std::vector<std::size_t> order(fit_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainHistory history;
  std::vector<nn::Matrix> best_values;
  std::size_t step = 0;
  model::DimASRModel::Trace trace;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double epoch_squared = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const auto batch_n = static_cast<double>(end - start);
      nn::zero_grad(params);
      double batch_squared = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& instance = fit_set[order[k]];
        const data::VAPair pred = model.forward_traced(instance, dropout_rng, trace);
        const double ev = pred.valence() - instance.gold->valence();
        const double ea = pred.arousal() - instance.gold->arousal();
        batch_squared += ev * ev + ea * ea;
        model.backward(trace, 2.0 * ev / batch_n, 2.0 * ea / batch_n);
      }
      const double batch_loss = batch_squared / batch_n;
      if (!std::isfinite(batch_loss)) {
        throw RuntimeFailure(fmt::format("non-finite loss {} at epoch {} step {} (batch starting with '{}')",
                                         batch_loss, epoch, step, fit_set[order[start]].sentence_id));
      }
      const double norm = nn::clip_grad_norm(params, config.grad_clip_norm);
      if (!std::isfinite(norm)) {
        throw RuntimeFailure(fmt::format("non-finite gradient norm at epoch {} step {}", epoch, step));
      }
      optimizer.step(params, lr_at(step, total_steps, config));
      ++step;
      epoch_squared += batch_squared;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_squared / static_cast<double>(fit_set.size());
    std::optional<double> injected;
    if (hooks.validation_override) injected = hooks.validation_override(epoch);
    record.val_rmse_va = injected ? *injected : validation_rmse(model, val_set);
    history.epochs.push_back(record);

    if (stopper.update(epoch, record.val_rmse_va)) best_values = nn::snapshot_values(params);
    log(fmt::format("epoch {:>3}  train_loss {:.6f}  val_rmse_va {:.6f}{}", epoch, record.train_loss,
                    record.val_rmse_va, stopper.best_epoch() == epoch ? "  *" : ""));
    if (hooks.on_epoch_end) hooks.on_epoch_end(record, model);

    if (stopper.should_stop() && epoch < config.max_epochs) {
      history.stopped_early = true;
      log(fmt::format("early stop after epoch {}; best epoch {}", epoch, stopper.best_epoch()));
      break;
    }
  }

  if (best_values.empty()) throw RuntimeFailure("validation RMSE_VA was never finite; no epoch to restore");
  history.best_epoch = stopper.best_epoch();
  nn::restore_values(params, best_values);
  return history;
}

OrderedJson history_to_json(const TrainHistory& history) {
  OrderedJson doc;
  doc["best_epoch"] = history.best_epoch;
  doc["stopped_early"] = history.stopped_early;
  OrderedJson rows = OrderedJson::array();
  for (const auto& r : history.epochs) {
    rows.push_back(OrderedJson{{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val_rmse_va", r.val_rmse_va}});
  }
  doc["epochs"] = std::move(rows);
  return doc;
}

TrainHistory history_from_json(const Json& doc) {
  try {
    TrainHistory h;
    h.best_epoch = doc.at("best_epoch").get<int>();
    h.stopped_early = doc.at("stopped_early").get<bool>();
    for (const auto& r : doc.at("epochs")) {
      h.epochs.push_back({r.at("epoch").get<int>(), r.at("train_loss").get<double>(), r.at("val_rmse_va").get<double>()});
    }
    return h;
  } catch (const Json::exception& e) {
    throw DataError(fmt::format("malformed history: {}", e.what()));
  }
}

std::string history_to_tsv(const TrainHistory& history) {
  std::string out = "epoch\ttrain_loss\tval_rmse_va\n";
  for (const auto& r : history.epochs) out += fmt::format("{}\t{:.6f}\t{:.6f}\n", r.epoch, r.train_loss, r.val_rmse_va);
  return out;
}

}  // namespace dimasr::train
