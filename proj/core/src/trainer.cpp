#include "pmiembed/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "pmiembed/error.hpp"

namespace pmiembed {

Matrix Shard::dense() const {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(block_size), static_cast<Eigen::Index>(block_size));
    for (const auto& cell : cells) {
        out(cell.row, cell.col) = cell.value;
    }
    return out;
}

Optimizer parse_optimizer(std::string_view name) {
    if (name == "sgd") {
        return Optimizer::sgd;
    }
    if (name == "adagrad") {
        return Optimizer::adagrad;
    }
    throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected sgd|adagrad)");
}

std::string_view to_string(Optimizer o) {
    return o == Optimizer::sgd ? "sgd" : "adagrad";
}

double TrainConfig::effective_init_scale() const {
    return init_scale ? *init_scale : 0.1 / std::sqrt(static_cast<double>(dim));
}

void validate(const TrainConfig& config) {
    if (config.dim < 1) {
        throw ConfigError("dimension must be at least 1");
    }
    if (config.epochs < 1) {
        throw ConfigError("epochs must be at least 1");
    }
    if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
        throw ConfigError("learning rate must be positive");
    }
    if (!(config.weight_exponent >= 0.0 && config.weight_exponent <= 1.0)) {
        throw ConfigError("weight exponent must lie in [0, 1]");
    }
    if (!(config.weight_scale > 0.0) || !std::isfinite(config.weight_scale)) {
        throw ConfigError("weight scale must be positive");
    }
    const double init = config.effective_init_scale();
    if (!(init > 0.0) || !std::isfinite(init)) {
        throw ConfigError("init scale must be positive");
    }
    if (config.workers < 1) {
        throw ConfigError("worker count must be at least 1");
    }
}

std::vector<Shard> partition_into_shards(const CooccurrenceMatrix& cooc, std::size_t shard_size) {
    if (shard_size == 0 || cooc.n() % shard_size != 0) {
        throw ConfigError("matrix side " + std::to_string(cooc.n()) +
                          " is not divisible by shard size " + std::to_string(shard_size));
    }
    const std::size_t blocks = cooc.n() / shard_size;
    std::vector<Shard> shards(blocks * blocks);
    for (std::size_t r = 0; r < blocks; ++r) {
        for (std::size_t c = 0; c < blocks; ++c) {
            auto& s = shards[r * blocks + c];
            s.row_block = r;
            s.col_block = c;
            s.block_size = shard_size;
        }
    }
    for (const auto& e : cooc.entries()) {
        auto& s = shards[(e.row / shard_size) * blocks + e.col / shard_size];
        s.cells.push_back({static_cast<std::uint32_t>(e.row % shard_size),
                           static_cast<std::uint32_t>(e.col % shard_size), e.value});
    }
    return shards;
}

Matrix predict_shard(const EmbeddingModel& model, const Shard& shard) {
    const auto k = static_cast<Eigen::Index>(shard.block_size);
    if (shard.first_row() + shard.block_size > model.size() ||
        shard.first_col() + shard.block_size > static_cast<std::size_t>(model.col_vectors.rows()) ||
        model.row_vectors.cols() != model.col_vectors.cols()) {
        throw InternalError("shard (" + std::to_string(shard.row_block) + ", " +
                            std::to_string(shard.col_block) + ") does not fit the model");
    }
    return model.row_vectors.middleRows(static_cast<Eigen::Index>(shard.first_row()), k) *
           model.col_vectors.middleRows(static_cast<Eigen::Index>(shard.first_col()), k).transpose();
}

LossValue observed_loss(double pred, double pmi_value, double weight) {
    const double diff = pred - pmi_value;
    return {0.5 * weight * diff * diff, weight * diff};
}

LossValue unobserved_loss(double pred, double smoothed_pmi_value) {
    const double z = pred - smoothed_pmi_value;
    if (z > 0.0) {
        const double e = std::exp(-z);
        return {z + std::log1p(e), 1.0 / (1.0 + e)};
    }
    const double e = std::exp(z);
    return {std::log1p(e), e / (1.0 + e)};
}

OptimizerState OptimizerState::for_model(const EmbeddingModel& model, Optimizer optimizer) {
    OptimizerState state;
    if (optimizer == Optimizer::adagrad) {
        state.row_accum = Matrix::Zero(model.row_vectors.rows(), model.row_vectors.cols());
        state.col_accum = Matrix::Zero(model.col_vectors.rows(), model.col_vectors.cols());
    }
    return state;
}

ShardGradient shard_gradient(const EmbeddingModel& model, const Shard& shard,
                             const PmiStats& stats, const TrainConfig& config) {
    const auto k = static_cast<Eigen::Index>(shard.block_size);
    const auto r0 = static_cast<Eigen::Index>(shard.first_row());
    const auto c0 = static_cast<Eigen::Index>(shard.first_col());

    const Matrix pred = predict_shard(model, shard);
    const Matrix counts = shard.dense();
    const auto log_rows = stats.log_row_sums();
    const auto log_cols = stats.log_col_sums();
    const double log_total = stats.log_total();

    Matrix g(k, k);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        const double row_term = log_total - log_rows[static_cast<std::size_t>(r0 + i)];
        for (Eigen::Index j = 0; j < k; ++j) {
            const double base = row_term - log_cols[static_cast<std::size_t>(c0 + j)];
            if (std::isnan(base)) {
                g(i, j) = 0.0;
                continue;
            }
            const double x = counts(i, j);
            LossValue lv;
            if (x > 0.0) {
                const double weight = config.weight_scale * std::pow(x, config.weight_exponent);
                lv = observed_loss(pred(i, j), std::log(x) + base, weight);
            } else {
                lv = unobserved_loss(pred(i, j), base);
            }
            loss += lv.loss;
            g(i, j) = lv.dloss_dpred;
        }
    }

    ShardGradient out;
    out.loss = loss;
    out.rows = g * model.col_vectors.middleRows(c0, k);
    out.cols = g.transpose() * model.row_vectors.middleRows(r0, k);
    return out;
}

namespace {

template <typename Block, typename Grad, typename Accum>
void apply_update(Block&& params, const Grad& grad, Accum&& accum, const TrainConfig& config) {
    if (config.optimizer == Optimizer::sgd) {
        params -= config.learning_rate * grad;
        return;
    }
    accum += grad.cwiseAbs2();
    params.array() -= config.learning_rate * grad.array() / (accum.array().sqrt() + kAdagradEpsilon);
}

template <typename Block>
void check_parameters(const Block& params, const Shard& shard, std::size_t epoch, const char* which) {
    if (!params.allFinite()) {
        throw DivergenceError(shard.row_block, shard.col_block, epoch,
                              std::string("non-finite ") + which + " parameter");
    }
    if (params.size() > 0 && params.cwiseAbs().maxCoeff() > kDivergenceLimit) {
        throw DivergenceError(shard.row_block, shard.col_block, epoch,
                              std::string(which) + " parameter magnitude above 1e6");
    }
}

}  // namespace

double shard_step(EmbeddingModel& model, const Shard& shard, const PmiStats& stats,
                  const TrainConfig& config, OptimizerState& state, std::size_t epoch) {
    const ShardGradient grad = shard_gradient(model, shard, stats, config);
    if (!std::isfinite(grad.loss) || !grad.rows.allFinite() || !grad.cols.allFinite()) {
        throw DivergenceError(shard.row_block, shard.col_block, epoch, "non-finite loss or gradient");
    }
    const auto k = static_cast<Eigen::Index>(shard.block_size);
    const auto r0 = static_cast<Eigen::Index>(shard.first_row());
    const auto c0 = static_cast<Eigen::Index>(shard.first_col());
    auto rows = model.row_vectors.middleRows(r0, k);
    auto cols = model.col_vectors.middleRows(c0, k);
    if (config.optimizer == Optimizer::adagrad) {
        apply_update(rows, grad.rows, state.row_accum.middleRows(r0, k), config);
        apply_update(cols, grad.cols, state.col_accum.middleRows(c0, k), config);
    } else {
        Matrix unused;
        apply_update(rows, grad.rows, unused, config);
        apply_update(cols, grad.cols, unused, config);
    }
    check_parameters(rows, shard, epoch, "row");
    check_parameters(cols, shard, epoch, "column");
    return grad.loss;
}

namespace {

// Runs the epoch's shards on `workers` threads. A shard starts only once no
// running shard holds its row block or its column block; among startable
// shards the earliest in `order` goes first.
void run_epoch_parallel(EmbeddingModel& model, const std::vector<Shard>& shards,
                        const std::vector<std::size_t>& order, const PmiStats& stats,
                        const TrainConfig& config, OptimizerState& state, std::size_t epoch,
                        std::vector<double>& losses) {
    const std::size_t blocks = model.size() / shards.front().block_size;
    std::vector<bool> row_busy(blocks, false);
    std::vector<bool> col_busy(blocks, false);
    // Positions into `order`, earliest first.
    std::vector<std::size_t> pending(order.size());
    std::iota(pending.begin(), pending.end(), std::size_t{0});
    std::mutex mu;
    std::condition_variable cv;
    std::exception_ptr failure;

    auto startable = [&](std::size_t position) {
        const auto& s = shards[order[position]];
        return !row_busy[s.row_block] && !col_busy[s.col_block];
    };

    auto worker = [&] {
        std::unique_lock lock(mu);
        for (;;) {
            auto it = pending.end();
            cv.wait(lock, [&] {
                if (failure || pending.empty()) {
                    return true;
                }
                it = std::find_if(pending.begin(), pending.end(), startable);
                return it != pending.end();
            });
            if (failure || pending.empty()) {
                return;
            }
            const std::size_t position = *it;
            pending.erase(it);
            const auto& shard = shards[order[position]];
            row_busy[shard.row_block] = true;
            col_busy[shard.col_block] = true;
            lock.unlock();

            double loss = 0.0;
            std::exception_ptr error;
            try {
                loss = shard_step(model, shard, stats, config, state, epoch);
            } catch (...) {
                error = std::current_exception();
            }

            lock.lock();
            row_busy[shard.row_block] = false;
            col_busy[shard.col_block] = false;
            losses[position] = loss;
            if (error && !failure) {
                failure = error;
            }
            cv.notify_all();
        }
    };

    {
        std::vector<std::jthread> pool;
        const std::size_t threads = std::min(config.workers, blocks);
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace

TrainResult train(const CooccurrenceMatrix& cooc, const Vocabulary& vocab,
                  const TrainConfig& config) {
    validate(config);
    if (cooc.n() != vocab.size()) {
        throw ConfigError("co-occurrence matrix side " + std::to_string(cooc.n()) +
                          " does not match vocabulary size " + std::to_string(vocab.size()));
    }
    if (cooc.entries().empty()) {
        throw ConfigError("co-occurrence matrix has no entries");
    }
    const std::size_t shard_size = config.shard_size ? config.shard_size : cooc.shard_size();
    const auto shards = partition_into_shards(cooc, shard_size);
    const PmiStats stats(cooc);

    std::mt19937_64 rng(config.seed);
    const double scale = config.effective_init_scale();
    std::uniform_real_distribution<double> init(-scale, scale);
    const auto n = static_cast<Eigen::Index>(cooc.n());
    const auto d = static_cast<Eigen::Index>(config.dim);

    TrainResult result;
    auto& model = result.model;
    model.vocab = vocab;
    model.row_vectors.resize(n, d);
    model.col_vectors.resize(n, d);
    for (Eigen::Index i = 0; i < model.row_vectors.size(); ++i) {
        model.row_vectors.data()[i] = init(rng);
    }
    for (Eigen::Index i = 0; i < model.col_vectors.size(); ++i) {
        model.col_vectors.data()[i] = init(rng);
    }
    OptimizerState state = OptimizerState::for_model(model, config.optimizer);

    std::vector<std::size_t> order(shards.size());
    std::vector<double> losses(shards.size());
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        if (config.workers == 1) {
            for (std::size_t p = 0; p < order.size(); ++p) {
                losses[p] = shard_step(model, shards[order[p]], stats, config, state, epoch);
            }
        } else {
            run_epoch_parallel(model, shards, order, stats, config, state, epoch, losses);
        }
        const double epoch_loss = std::accumulate(losses.begin(), losses.end(), 0.0);
        if (!std::isfinite(epoch_loss)) {
            throw DivergenceError(0, 0, epoch, "non-finite epoch loss");
        }
        result.loss_history.push_back(epoch_loss);
    }
    return result;
}

CombineMode parse_combine_mode(std::string_view name) {
    if (name == "row" || name == "row_only") {
        return CombineMode::row_only;
    }
    if (name == "row+col" || name == "row_plus_col") {
        return CombineMode::row_plus_col;
    }
    throw ConfigError("unknown vector mode '" + std::string(name) + "' (expected row|row+col)");
}

std::string_view to_string(CombineMode m) {
    return m == CombineMode::row_only ? "row" : "row+col";
}

Matrix combine_embeddings(const EmbeddingModel& model, CombineMode mode) {
    if (mode == CombineMode::row_only) {
        return model.row_vectors;
    }
    return model.row_vectors + model.col_vectors;
}

}  // namespace pmiembed
