#include "mcbrp/commands.hpp"

#include <fstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mcbrp/ensemble.hpp"
#include "mcbrp/error.hpp"
#include "mcbrp/explanation.hpp"
#include "mcbrp/parallel.hpp"
#include "mcbrp/surrogate.hpp"
#include "mcbrp/taxonomy.hpp"

namespace mcbrp {

namespace fs = std::filesystem;

namespace {

void EnsureOutputDir(const RunConfig& config) {
  const fs::path dir(config.output_dir);
  if (fs::is_directory(dir)) return;
  if (!config.create_output_dir) {
    throw Error(ErrorCode::kIo, fmt::format("output directory '{}' does not exist", dir.string()));
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo,
                fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw Error(ErrorCode::kIo, fmt::format("failed writing '{}'", path.string()));
}

void WriteJson(const fs::path& path, const nlohmann::json& doc) {
  WriteText(path, doc.dump(2) + "\n");
}

SplitDataset LoadSplit(const RunConfig& config) {
  const Dataset data = LoadCsv(config.data_path(), config.csv_options());
  return SplitByColumnThreshold(data, config.split_column, config.split_threshold,
                                config.keep_split_column);
}

struct PreparedRun {
  SplitDataset split;
  GbrModel model;
  ErrorTaxonomy taxonomy;
  std::vector<FeatureFences> fences;
};

PreparedRun Prepare(const RunConfig& config) {
  Validate(config);
  SplitDataset split = LoadSplit(config);
  GbrModel model = GbrModel::load(fs::path(config.output_dir) / kModelFile);
  if (model.feature_names() != split.test.feature_names()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model feature names differ from the dataset's; retrain with this config");
  }
  if (config.n > split.test.num_features()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("n={} exceeds the {} available features", config.n,
                            split.test.num_features()));
  }
  const auto predicted = model.predict_batch(split.test.rows());
  ErrorTaxonomy taxonomy = ClassifyErrors(split.test.target(), predicted, split.test.row_ids());
  std::vector<FeatureFences> fences;
  if (!taxonomy.reasonable_ids.empty()) fences = ComputeAllFeatureFences(split.test, taxonomy);
  return {std::move(split), std::move(model), std::move(taxonomy), std::move(fences)};
}

// Explains the given test positions, fanning out across instances.
std::vector<Explanation> ExplainMany(const PreparedRun& run, const RunConfig& config,
                                     const std::vector<std::size_t>& positions) {
  ExplainParams params = config.explain_params();
  params.force = true;
  params.workers = 1;
  std::vector<std::optional<Explanation>> slots(positions.size());
  ParallelFor(positions.size(), config.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      slots[k] = ExplainInstance(run.model, run.split.test, positions[k], run.taxonomy,
                                 run.fences, params);
    }
  });
  std::vector<Explanation> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

void WriteExplanation(const RunConfig& config, const Explanation& e) {
  WriteJson(ExplanationPath(config, e.instance_id, ".json"), ToJson(e));
  WriteText(ExplanationPath(config, e.instance_id, ".txt"), RenderTable(e));
}

}  // namespace

fs::path ExplanationPath(const RunConfig& config, RowId id, const char* extension) {
  return fs::path(config.output_dir) / kExplanationDir / fmt::format("explanation_{}{}", id, extension);
}

GenDataResult CmdGenData(const RunConfig& config, std::ostream& log) {
  Validate(config);
  EnsureOutputDir(config);
  const SyntheticData synthetic = GenerateSynthetic(config.synthetic_spec(), config.seed);
  GenDataResult result{config.data_path(), synthetic.dataset.num_rows(),
                       synthetic.outlier_rows.size()};
  const fs::path parent = result.path.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw Error(ErrorCode::kIo, fmt::format("directory '{}' does not exist", parent.string()));
  }
  WriteCsv(synthetic.dataset, result.path, config.id_column.empty() ? "id" : config.id_column);
  fmt::print(log, "wrote {}: {} rows, {} outlier rows\n", result.path.string(), result.rows,
             result.outlier_rows);
  return result;
}

RunSummary CmdTrain(const RunConfig& config, std::ostream& log) {
  Validate(config);
  EnsureOutputDir(config);
  const SplitDataset split = LoadSplit(config);
  const GbrModel model = FitGbr(split.train, config.gbr_params());
  const auto predicted = model.predict_batch(split.test.rows());
  const ErrorTaxonomy taxonomy = ClassifyErrors(split.test.target(), predicted, split.test.row_ids());
  const RunSummary summary = MakeRunSummary(model, split, taxonomy);
  model.save(fs::path(config.output_dir) / kModelFile);
  WriteJson(fs::path(config.output_dir) / kSummaryFile, ToJson(summary));
  fmt::print(log,
             "trained {} trees on {} rows; test R^2 {:.4f}; {} of {} test predictions are large "
             "errors ({:.2f}%, threshold {:.4f})\n",
             model.trees().size(), summary.train_rows, summary.r_squared, summary.large_count,
             summary.test_rows, 100.0 * summary.large_error_fraction, summary.epsilon_large);
  return summary;
}

std::vector<fs::path> CmdExplain(const RunConfig& config, const ExplainSelector& selector,
                                 std::ostream& log) {
  if (selector.row.has_value() == selector.all_large) {
    throw Error(ErrorCode::kInvalidArgument, "select exactly one of a row id or all-large");
  }
  const PreparedRun run = Prepare(config);
  fs::create_directories(fs::path(config.output_dir) / kExplanationDir);

  std::vector<fs::path> written;
  if (selector.row) {
    const auto position = run.split.test.position_of(*selector.row);
    if (!position) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("row id {} is not in the test split", *selector.row));
    }
    if (run.fences.empty()) {
      throw Error(ErrorCode::kEmptyPartition, "every test prediction is a large error; no fences");
    }
    ExplainParams params = config.explain_params();
    params.force = selector.force;
    const Explanation e =
        ExplainInstance(run.model, run.split.test, *position, run.taxonomy, run.fences, params);
    WriteExplanation(config, e);
    written.push_back(ExplanationPath(config, e.instance_id));
    fmt::print(log, "{}", RenderTable(e));
    return written;
  }

  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < run.taxonomy.size(); ++i) {
    if (run.taxonomy.is_large[i]) positions.push_back(i);
  }
  if (positions.empty()) {
    fmt::print(log, "no large errors in the test split; nothing to explain\n");
    return written;
  }
  if (run.fences.empty()) {
    throw Error(ErrorCode::kEmptyPartition, "every test prediction is a large error; no fences");
  }
  const auto explanations = ExplainMany(run, config, positions);
  std::size_t unexplainable = 0;
  for (const auto& e : explanations) {
    WriteExplanation(config, e);
    written.push_back(ExplanationPath(config, e.instance_id));
    if (!e.explainable) ++unexplainable;
  }
  fmt::print(log, "explained {} large-error instances ({} flagged insufficient evidence)\n",
             explanations.size(), unexplainable);
  return written;
}

ReportResult CmdReport(const RunConfig& config, std::ostream& log) {
  const PreparedRun run = Prepare(config);
  const fs::path out_dir(config.output_dir);
  WritePredictionDump(run.model, run.split.test, out_dir / kPredictionsFile);

  std::vector<std::size_t> large_pos;
  std::vector<std::size_t> reasonable_pos;
  for (std::size_t i = 0; i < run.taxonomy.size(); ++i) {
    (run.taxonomy.is_large[i] ? large_pos : reasonable_pos).push_back(i);
  }
  if (config.max_reasonable > 0 && reasonable_pos.size() > config.max_reasonable) {
    std::vector<std::size_t> picked;
    for (std::size_t k = 0; k < config.max_reasonable; ++k) {
      picked.push_back(reasonable_pos[k * reasonable_pos.size() / config.max_reasonable]);
    }
    reasonable_pos = std::move(picked);
  }

  ReportResult result;
  nlohmann::json stats_doc;
  std::vector<Explanation> large;
  std::vector<Explanation> reasonable;
  if (!run.fences.empty()) {
    large = ExplainMany(run, config, large_pos);
    reasonable = ExplainMany(run, config, reasonable_pos);
  }
  auto explained = [](const std::vector<Explanation>& group, std::size_t& unexplainable) {
    std::vector<Explanation> out;
    for (const auto& e : group) {
      if (e.explainable) {
        out.push_back(e);
      } else {
        ++unexplainable;
      }
    }
    return out;
  };
  const auto large_ok = explained(large, result.unexplainable_large);
  const auto reasonable_ok = explained(reasonable, result.unexplainable_reasonable);
  if (large_pos.empty()) {
    stats_doc["note"] = "no large errors in the test split";
  } else if (run.fences.empty()) {
    stats_doc["note"] = "no reasonable predictions in the test split";
  } else if (large_ok.empty() || reasonable_ok.empty()) {
    stats_doc["note"] = "a group has no explainable instances";
  } else {
    result.stats = ComputeOutOfRangeStats(large_ok, reasonable_ok);
    stats_doc = ToJson(*result.stats);
  }
  stats_doc["unexplainable_large"] = result.unexplainable_large;
  stats_doc["unexplainable_reasonable"] = result.unexplainable_reasonable;
  WriteJson(out_dir / kOutOfRangeFile, stats_doc);

  auto rankings_of = [](const std::vector<Explanation>& group) {
    std::vector<ImportanceRanking> out;
    for (const auto& e : group) out.push_back(e.ranking);
    return out;
  };
  const auto& names = run.split.test.feature_names();
  const auto large_rankings = rankings_of(large);
  const auto reasonable_rankings = rankings_of(reasonable);
  const auto large_freq = large_rankings.empty() ? std::vector<FeatureFrequency>{}
                                                 : RankFrequency(large_rankings, names);
  const auto reasonable_freq = reasonable_rankings.empty()
                                   ? std::vector<FeatureFrequency>{}
                                   : RankFrequency(reasonable_rankings, names);
  WriteText(out_dir / kRankFrequencyFile, FormatRankFrequency(large_freq, reasonable_freq));

  if (result.stats) {
    fmt::print(log,
               "all {} features out of range: {:.1f}% of large errors ({} explained) vs {:.1f}% of "
               "reasonable predictions ({} explained)\n",
               result.stats->n, 100.0 * result.stats->all_out_fraction_large,
               result.stats->count_large, 100.0 * result.stats->all_out_fraction_reasonable,
               result.stats->count_reasonable);
  } else {
    fmt::print(log, "{}\n", stats_doc["note"].get<std::string>());
  }
  return result;
}

}  // namespace mcbrp
