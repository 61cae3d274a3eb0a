#include "mcbrp/explanation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "mcbrp/error.hpp"

namespace mcbrp {

std::string_view ToString(RowStatus status) {
  switch (status) {
    case RowStatus::kOk: return "ok";
    case RowStatus::kZeroWidth: return "zero-width";
    case RowStatus::kInsufficientEvidence: return "insufficient-evidence";
    case RowStatus::kSkipped: return "skipped";
  }
  return "unknown";
}

std::size_t Explanation::out_of_range_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ExplanationRow& r) { return r.out_of_range; }));
}

std::string TrendText(std::optional<double> trend) {
  if (!trend || *trend == 0.0) return "No detectable trend";
  return *trend > 0.0 ? "As input increases, prediction increases"
                      : "As input increases, prediction decreases";
}

Explanation ExplainInstance(const Predictor& model, const Dataset& test, std::size_t position,
                            const ErrorTaxonomy& taxonomy, std::span<const FeatureFences> fences,
                            const ExplainParams& params) {
  if (position >= test.num_rows()) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("row position {} out of range", position));
  }
  if (taxonomy.size() != test.num_rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "taxonomy was not computed on this dataset");
  }
  const RowId id = test.row_ids()[position];
  if (!taxonomy.is_large[position] && !params.force) {
    throw Error(ErrorCode::kNotLargeError,
                fmt::format("row {} is a reasonable prediction; explanations target large errors "
                            "(use force to override)",
                            id));
  }

  const auto instance = test.row(position);
  Explanation out;
  out.instance_id = id;
  out.actual = test.target()[position];
  out.predicted = model.predict(instance);
  out.error = std::abs(out.actual - out.predicted);
  out.epsilon_large = taxonomy.epsilon_large;
  out.is_large = taxonomy.is_large[position];

  SurrogateParams surrogate = params.surrogate;
  surrogate.seed = params.seed;
  out.ranking = LocalImportance(model, instance, id, test, params.n, surrogate);

  const SimulationParams simulation{params.m, params.seed, params.workers};
  const SimulationResult sim = Simulate(model, instance, id, out.actual, out.ranking,
                                        taxonomy.epsilon_large, fences, simulation);

  for (std::size_t k = 0; k < sim.strata.size(); ++k) {
    const FeatureStratum& stratum = sim.strata[k];
    ExplanationRow row;
    row.feature = stratum.feature;
    row.feature_name = test.feature_names()[stratum.feature];
    row.importance = out.ranking.ranked_features[k].weight;
    row.value = instance[stratum.feature];
    row.stratum_size = stratum.accepted_count;
    if (stratum.skipped) {
      row.status = RowStatus::kSkipped;
    } else {
      const auto values = stratum.accepted_values();
      row.range = ComputeBounds(values, params.min_stratum);
      if (!row.range) {
        row.status = RowStatus::kInsufficientEvidence;
      } else {
        row.status = row.range->zero_width() ? RowStatus::kZeroWidth : RowStatus::kOk;
        row.trend = ComputeTrend(values, stratum.accepted_predictions());
        row.out_of_range = row.value < row.range->low || row.value > row.range->high;
        out.explainable = true;
      }
    }
    row.trend_text = row.range ? TrendText(row.trend) : "No detectable trend";
    out.rows.push_back(std::move(row));
  }
  return out;
}

Explanation Explain(const Predictor& model, const Dataset& test, std::size_t position,
                    const ErrorTaxonomy& taxonomy, const ExplainParams& params) {
  const auto fences = ComputeAllFeatureFences(test, taxonomy);
  Explanation out = ExplainInstance(model, test, position, taxonomy, fences, params);
  if (!out.explainable) {
    throw Error(ErrorCode::kInsufficientEvidence,
                fmt::format("row {}: no feature reached {} accepted perturbations",
                            out.instance_id, params.min_stratum));
  }
  return out;
}

nlohmann::json ToJson(const Explanation& e) {
  nlohmann::json doc;
  doc["instance_id"] = e.instance_id;
  doc["actual"] = e.actual;
  doc["predicted"] = e.predicted;
  doc["error"] = e.error;
  doc["epsilon_large"] = e.epsilon_large;
  doc["is_large"] = e.is_large;
  doc["status"] = e.explainable ? "explained" : "insufficient-evidence";
  doc["surrogate_fit_quality"] = e.ranking.surrogate_fit_quality;
  auto& rows = doc["rows"] = nlohmann::json::array();
  for (const auto& r : e.rows) {
    nlohmann::json row;
    row["feature"] = r.feature_name;
    row["feature_index"] = r.feature;
    row["importance"] = r.importance;
    row["value"] = r.value;
    row["reasonable_low"] = r.range ? nlohmann::json(r.range->low) : nlohmann::json(nullptr);
    row["reasonable_high"] = r.range ? nlohmann::json(r.range->high) : nlohmann::json(nullptr);
    row["trend"] = r.trend ? nlohmann::json(*r.trend) : nlohmann::json(nullptr);
    row["trend_text"] = r.trend_text;
    row["out_of_range"] = r.out_of_range;
    row["stratum_size"] = r.stratum_size;
    row["status"] = ToString(r.status);
    rows.push_back(std::move(row));
  }
  return doc;
}

std::string RenderTable(const Explanation& e) {
  std::vector<std::array<std::string, 5>> cells;
  cells.push_back({"Input", "Definition", "Trend", "Value", "Reasonable range"});
  for (std::size_t k = 0; k < e.rows.size(); ++k) {
    const auto& r = e.rows[k];
    std::string label = k < 26 ? std::string(1, static_cast<char>('A' + k)) : fmt::format("#{}", k + 1);
    std::string range;
    switch (r.status) {
      case RowStatus::kOk:
      case RowStatus::kZeroWidth:
        range = fmt::format("[{:.2f}, {:.2f}]", r.range->low, r.range->high);
        break;
      case RowStatus::kInsufficientEvidence:
        range = fmt::format("insufficient evidence ({} accepted)", r.stratum_size);
        break;
      case RowStatus::kSkipped:
        range = "not sampled (zero-width fences)";
        break;
    }
    cells.push_back({label, r.feature_name, r.trend_text, fmt::format("{:.2f}", r.value), range});
  }
  std::array<std::size_t, 5> width{};
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < 5; ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out = fmt::format(
      "Instance {}: actual {:.2f}, predicted {:.2f}, error {:.2f} ({} threshold {:.2f})\n",
      e.instance_id, e.actual, e.predicted, e.error, e.is_large ? "above" : "within",
      e.epsilon_large);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& row = cells[i];
    out += fmt::format("{:<{}}  {:<{}}  {:<{}}  {:>{}}  {}\n", row[0], width[0], row[1], width[1],
                       row[2], width[2], row[3], width[3], row[4]);
    if (i == 0) {
      out += std::string(width[0] + width[1] + width[2] + width[3] + width[4] + 8, '-') + '\n';
    }
  }
  if (!e.explainable) out += "No feature has enough accepted perturbations to explain this instance.\n";
  return out;
}

}  // namespace mcbrp
