#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pmiembed/cooccurrence.hpp"
#include "pmiembed/trainer.hpp"

namespace pmiembed {

// Evaluation columns of the results table, in order. The first six are
// similarity sets scored by Spearman rho, the last two analogy sets scored by
// accuracy.
inline constexpr std::size_t kResultColumns = 8;
inline constexpr std::size_t kSimilarityColumns = 6;
inline constexpr std::array<std::string_view, kResultColumns> kColumnNames = {
    "men", "mturk", "rare_words", "simlex", "relatedness", "similarity", "google", "msr"};

inline bool is_analogy_column(std::size_t column) { return column >= kSimilarityColumns; }

// Column index for a name from kColumnNames.
std::optional<std::size_t> column_index(std::string_view name);

struct CorpusSpec {
    std::string label;
    std::filesystem::path path;
    std::size_t token_target = 0;
    std::optional<std::size_t> max_vocab;  // overrides SweepGrid::max_vocab
};

struct SweepGrid {
    std::vector<CorpusSpec> corpora;
    std::vector<std::size_t> windows;
    std::vector<std::size_t> dims;
    std::size_t max_vocab = 1 << 20;
    std::size_t shard_size = kDefaultShardSize;
    std::size_t min_count = 1;
    Weighting weighting = Weighting::uniform;
    CombineMode mode = CombineMode::row_plus_col;
    TrainConfig train;  // dim is taken from `dims`, seed is the base seed
    std::array<std::optional<std::filesystem::path>, kResultColumns> datasets;
};

// Default grid axes for the `paper` and `desk` presets.
SweepGrid paper_preset();
SweepGrid desk_preset();

// Flat `key = value` settings; later pairs override earlier ones. `corpus`
// may repeat and accumulates. Unknown keys throw ConfigError.
using Settings = std::vector<std::pair<std::string, std::string>>;

// Parses `key = value` lines (`#` comments). Relative corpus and dataset
// paths are resolved against `base_dir`.
Settings parse_settings(std::string_view text, const std::filesystem::path& base_dir);

// Applies settings on top of `grid`. Corpus values are
// `label=path:token_target[:max_vocab]`.
void apply_settings(SweepGrid& grid, const Settings& settings);

// Throws ConfigError for empty axes, duplicate labels, missing files or
// invalid training settings. Runs before any training.
void validate(const SweepGrid& grid);

struct ResultRecord {
    std::string data_size;
    std::size_t window = 0;
    std::size_t dim = 0;
    std::size_t tokens = 0;
    std::array<std::optional<double>, kResultColumns> scores;
    std::array<std::size_t, kResultColumns> used{};
    std::array<std::size_t, kResultColumns> skipped{};
    std::string error;  // training failure for the whole cell, if any
};

// base_seed XOR a stable FNV-1a hash of (label, window, dim).
std::uint64_t grid_seed(std::uint64_t base_seed, std::string_view label, std::size_t window,
                        std::size_t dim);

using SweepLog = std::function<void(const std::string&)>;

// Records in grid order: corpus, then window, then dim. Counts are built once
// per (corpus, window). Cell failures become records with `error` set.
std::vector<ResultRecord> run_sweep(const SweepGrid& grid, const SweepLog& log = {});

enum class ResultFormat { csv, markdown };

// Header `data_size,window,dim,men,...,msr`; scores with 3 decimals, missing
// scores as NA.
std::string render_results(const std::vector<ResultRecord>& records, ResultFormat format);
void emit_results(const std::vector<ResultRecord>& records, ResultFormat format,
                  const std::filesystem::path& path);
std::vector<ResultRecord> parse_results_csv(std::string_view text);

// Per-cell item counts: data_size,window,dim,column,used,skipped,error.
std::string render_counts(const std::vector<ResultRecord>& records);

struct PlotOutput {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

// SVG line charts of score against window, dimension and corpus size, one
// per combination of the other two axes. Similarity series are red,
// analogy series blue. Axes with a single value are skipped with a warning.
PlotOutput emit_trend_plots(const std::vector<ResultRecord>& records,
                            const std::filesystem::path& path_prefix);

}  // namespace pmiembed
