#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pmiembed/cooccurrence.hpp"
#include "pmiembed/pmi.hpp"
#include "pmiembed/vocabulary.hpp"

namespace pmiembed {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row (focus) and column (context) embeddings; both n x d, n == vocab size.
struct EmbeddingModel {
    Matrix row_vectors;
    Matrix col_vectors;
    Vocabulary vocab;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(row_vectors.cols()); }
    std::size_t size() const noexcept { return static_cast<std::size_t>(row_vectors.rows()); }
};

// Stored cell of a shard, addressed relative to the shard's top-left corner.
struct ShardCell {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    double value = 0.0;
};

// One k x k block of the co-occurrence matrix. Only non-zero cells are kept;
// dense() materializes the block when needed.
struct Shard {
    std::size_t row_block = 0;
    std::size_t col_block = 0;
    std::size_t block_size = 0;
    std::vector<ShardCell> cells;

    std::size_t first_row() const noexcept { return row_block * block_size; }
    std::size_t first_col() const noexcept { return col_block * block_size; }
    Matrix dense() const;
};

enum class Optimizer { sgd, adagrad };

Optimizer parse_optimizer(std::string_view name);
std::string_view to_string(Optimizer o);

struct TrainConfig {
    std::size_t dim = 100;
    std::size_t shard_size = 0;  // 0: use the matrix's shard size
    std::size_t epochs = 20;
    double learning_rate = 0.05;
    Optimizer optimizer = Optimizer::adagrad;
    std::uint64_t seed = 1;
    double weight_exponent = 0.5;  // f(x) = weight_scale * x^weight_exponent
    double weight_scale = 1.0;
    std::optional<double> init_scale;  // default 0.1 / sqrt(dim)
    std::size_t workers = 1;

    double effective_init_scale() const;
};

// Throws ConfigError describing the first violated constraint.
void validate(const TrainConfig& config);

// Row-major tiling into (n/k)^2 shards.
std::vector<Shard> partition_into_shards(const CooccurrenceMatrix& cooc, std::size_t shard_size);

// pred(i, j) = <W[first_row + i], C[first_col + j]>.
Matrix predict_shard(const EmbeddingModel& model, const Shard& shard);

struct LossValue {
    double loss = 0.0;
    double dloss_dpred = 0.0;
};

// 0.5 * weight * (pred - pmi)^2.
LossValue observed_loss(double pred, double pmi_value, double weight);

// Soft hinge ln(1 + exp(pred - smoothed_pmi)), overflow-free.
LossValue unobserved_loss(double pred, double smoothed_pmi_value);

// Adagrad accumulators (empty for plain SGD), laid out like the model.
struct OptimizerState {
    Matrix row_accum;
    Matrix col_accum;

    static OptimizerState for_model(const EmbeddingModel& model, Optimizer optimizer);
};

inline constexpr double kAdagradEpsilon = 1e-8;
inline constexpr double kDivergenceLimit = 1e6;

struct ShardGradient {
    double loss = 0.0;
    Matrix rows;  // d loss / d W[first_row .. first_row + k)
    Matrix cols;  // d loss / d C[first_col .. first_col + k)
};

// Total piecewise loss over all k^2 cells and its gradient. Cells in a
// degenerate row or column contribute nothing.
ShardGradient shard_gradient(const EmbeddingModel& model, const Shard& shard,
                             const PmiStats& stats, const TrainConfig& config);

// One optimizer update from the shard's gradient. Returns the shard loss
// before the update. Throws DivergenceError on non-finite loss or parameters
// beyond kDivergenceLimit.
double shard_step(EmbeddingModel& model, const Shard& shard, const PmiStats& stats,
                  const TrainConfig& config, OptimizerState& state, std::size_t epoch = 0);

struct TrainResult {
    EmbeddingModel model;
    std::vector<double> loss_history;  // summed shard losses, one per epoch
};

// Seeded uniform initialization, then `epochs` passes over all shards in a
// freshly shuffled order each epoch. With workers > 1, shards run
// concurrently only when they share neither a row block nor a column block.
TrainResult train(const CooccurrenceMatrix& cooc, const Vocabulary& vocab,
                  const TrainConfig& config);

enum class CombineMode { row_only, row_plus_col };

CombineMode parse_combine_mode(std::string_view name);
std::string_view to_string(CombineMode m);

Matrix combine_embeddings(const EmbeddingModel& model, CombineMode mode);

}  // namespace pmiembed
