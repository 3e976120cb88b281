#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "pmiembed/cooccurrence.hpp"
#include "pmiembed/embedding_store.hpp"
#include "pmiembed/eval.hpp"
#include "pmiembed/pmi.hpp"
#include "pmiembed/tokenizer.hpp"
#include "pmiembed/trainer.hpp"
#include "pmiembed/vocabulary.hpp"

using namespace pmiembed;

namespace {

// Zipf-like synthetic corpus of 64-token lines.
TokenStream synthetic_stream(std::size_t tokens, std::size_t types, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TokenStream s;
    Document doc;
    for (std::size_t t = 0; t < tokens; ++t) {
        const auto rank = static_cast<std::size_t>(std::pow(static_cast<double>(types), u(rng)));
        doc.push_back("w" + std::to_string(rank));
        if (doc.size() == 64) {
            s.documents.push_back(std::move(doc));
            doc.clear();
        }
    }
    if (!doc.empty()) {
        s.documents.push_back(std::move(doc));
    }
    s.token_count = tokens;
    return s;
}

void BM_Tokenize(benchmark::State& state) {
    std::string text;
    std::mt19937_64 rng(1);
    for (int line = 0; line < 2000; ++line) {
        for (int t = 0; t < 50; ++t) {
            text += "Word" + std::to_string(rng() % 5000) + (t % 7 == 0 ? ", " : " ");
        }
        text += "\n";
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(tokenize(text));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize)->Unit(benchmark::kMillisecond);

void BM_Count(benchmark::State& state) {
    const auto stream = synthetic_stream(500000, 20000, 2);
    const auto vocab = build_vocabulary(stream, 8192, 256, 1);
    const auto window = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(count_cooccurrences(stream, vocab, window, Weighting::uniform));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * stream.token_count));
}
BENCHMARK(BM_Count)->Arg(1)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ShardStep(benchmark::State& state) {
    const std::size_t k = 256;
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto stream = synthetic_stream(300000, 5000, 3);
    const auto vocab = build_vocabulary(stream, k * 4, k, 1);
    const auto cooc = count_cooccurrences(stream, vocab, 4, Weighting::uniform);
    const PmiStats stats(cooc);
    const auto shards = partition_into_shards(cooc, k);
    TrainConfig config;
    config.dim = d;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    EmbeddingModel model;
    model.vocab = vocab;
    model.row_vectors = Matrix::NullaryExpr(vocab.size(), d, [&] { return u(rng); });
    model.col_vectors = Matrix::NullaryExpr(vocab.size(), d, [&] { return u(rng); });
    auto opt = OptimizerState::for_model(model, Optimizer::adagrad);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(shard_step(model, shards[i++ % shards.size()], stats, config, opt));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * k * k));
}
BENCHMARK(BM_ShardStep)->Arg(20)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_AnalogyBatch(benchmark::State& state) {
    const std::size_t n = 8192, d = 100;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) {
        words.push_back("w" + std::to_string(i));
    }
    VectorTable table(words, Matrix::NullaryExpr(n, d, [&] { return normal(rng); }));
    std::vector<AnalogyQuestion> questions;
    for (int q = 0; q < 2048; ++q) {
        questions.push_back({words[rng() % n], words[rng() % n], words[rng() % n], words[rng() % n], ""});
    }
    const AnalogySolver solver(table);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solver.answer_batch(questions));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * questions.size()));
}
BENCHMARK(BM_AnalogyBatch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
