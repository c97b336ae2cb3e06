#include "dimasr/model/model.hpp"

#include <fmt/format.h>

#include "dimasr/common/error.hpp"

namespace dimasr::model {

DimASRModel::DimASRModel(EncoderAdapter encoder, ModelOptions options, std::uint64_t seed)
    : encoder_(std::move(encoder)),
      options_(options),
      seed_(seed),
      head_v_("head_v", encoder_.hidden_dim(), options.head_dropout, options.head_internal_dropout),
      head_a_("head_a", encoder_.hidden_dim(), options.head_dropout, options.head_internal_dropout) {
  if (options.input_dropout < 0.0 || options.input_dropout >= 1.0 || options.head_dropout < 0.0 ||
      options.head_dropout >= 1.0) {
    throw UsageError("dropout rates must be in [0, 1)");
  }
  Rng rng_v(derive_seed(seed, "init/head_v"));
  Rng rng_a(derive_seed(seed, "init/head_a"));
  head_v_.init(rng_v);
  head_a_.init(rng_a);
}

data::VAPair DimASRModel::run(const data::AspectInstance& instance, Rng* rng, Trace* trace) const {
  try {
    const std::vector<int> tokens = encoder_.build_input(instance.text, instance.aspect);
    nn::RowVector h = encoder_.encode(tokens, rng, trace ? &trace->tape : nullptr);
    const nn::Matrix mask = nn::dropout_mask(1, h.cols(), options_.input_dropout, rng);
    h.array() *= mask.row(0).array();
    const double raw_v = head_v_.forward(h, rng, trace ? &trace->valence : nullptr);
    const double raw_a = head_a_.forward(h, rng, trace ? &trace->arousal : nullptr);
    if (trace != nullptr) {
      trace->input_mask = mask;
      trace->raw_valence = raw_v;
      trace->raw_arousal = raw_a;
    }
    return data::VAPair(scale_to_va(raw_v), scale_to_va(raw_a));
  } catch (const DataError& e) {
    throw DataError(fmt::format("instance '{}' aspect_index {}: {}", instance.sentence_id, instance.aspect_index,
                                e.what()));
  } catch (const Error& e) {
    throw RuntimeFailure(fmt::format("instance '{}' aspect_index {}: {}", instance.sentence_id,
                                     instance.aspect_index, e.what()));
  }
}

std::vector<data::VAPair> DimASRModel::forward(std::span<const data::AspectInstance> batch, Mode mode,
                                               Rng* dropout_rng) const {
  if (mode == Mode::train && dropout_rng == nullptr) {
    throw UsageError("train-mode forward needs a dropout generator");
  }
  Rng* rng = mode == Mode::train ? dropout_rng : nullptr;
  std::vector<data::VAPair> out;
  out.reserve(batch.size());
  for (const auto& instance : batch) out.push_back(run(instance, rng, nullptr));
  return out;
}

data::VAPair DimASRModel::forward_traced(const data::AspectInstance& instance, Rng& dropout_rng,
                                         Trace& trace) const {
  return run(instance, &dropout_rng, &trace);
}

void DimASRModel::backward(const Trace& trace, double d_valence, double d_arousal) {
  const double d_raw_v = d_valence * scale_to_va_derivative(trace.raw_valence);
  const double d_raw_a = d_arousal * scale_to_va_derivative(trace.raw_arousal);
  nn::RowVector d_h = head_v_.backward(trace.valence, d_raw_v);
  d_h += head_a_.backward(trace.arousal, d_raw_a);
  d_h.array() *= trace.input_mask.row(0).array();
  encoder_.backward(trace.tape, d_h);
}

nn::ParameterList DimASRModel::parameters() {
  nn::ParameterList out = encoder_.parameters();
  for (nn::Parameter* p : head_v_.parameters()) out.push_back(p);
  for (nn::Parameter* p : head_a_.parameters()) out.push_back(p);
  return out;
}

std::vector<const nn::Parameter*> DimASRModel::parameters() const {
  const auto list = const_cast<DimASRModel*>(this)->parameters();
  return {list.begin(), list.end()};
}

}  // namespace dimasr::model
