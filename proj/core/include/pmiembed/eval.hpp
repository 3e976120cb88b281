#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pmiembed/embedding_store.hpp"

namespace pmiembed {

struct SimilarityPair {
    std::string first;
    std::string second;
    double human_score = 0.0;
};

struct SimilarityDataset {
    std::string name;
    std::vector<SimilarityPair> pairs;
};

// a : b :: y : expected, scored as argmax_x cos(v(x), v(a) - v(b) + v(y)).
struct AnalogyQuestion {
    std::string a;
    std::string b;
    std::string y;
    std::string expected;
    std::string section;
};

struct AnalogyDataset {
    std::string name;
    std::vector<AnalogyQuestion> questions;
};

struct EvalReport {
    std::string dataset;
    double score = 0.0;
    std::size_t used = 0;
    std::size_t skipped_oov = 0;
};

// Cosine similarity clamped to [-1, 1]; nullopt if either vector has zero norm.
std::optional<double> cosine(std::span<const double> u, std::span<const double> v);

// Pearson correlation of average ranks. Throws UndefinedCorrelationError
// for fewer than two items or a constant list.
double spearman_rho(std::span<const double> xs, std::span<const double> ys);

// Pairs with an out-of-vocabulary word (or a zero vector) are skipped.
// Throws InsufficientDataError when fewer than two pairs remain.
EvalReport evaluate_similarity(const VectorTable& table, const SimilarityDataset& dataset);

struct AnalogyAnswer {
    std::size_t id = 0;
    std::string word;
    double cosine = 0.0;
};

// Unit-normalized copy of a table for repeated argmax queries.
class AnalogySolver {
public:
    explicit AnalogySolver(const VectorTable& table);

    // Best word outside {a, b, y}; ties go to the lower id. nullopt when a
    // query word is unknown or the offset vector is zero.
    std::optional<AnalogyAnswer> answer(std::string_view a, std::string_view b,
                                        std::string_view y) const;

    // Same as answer() for many questions at once; answers[q] is nullopt for
    // skipped questions.
    std::vector<std::optional<std::size_t>> answer_batch(
        std::span<const AnalogyQuestion> questions) const;

    const VectorTable& table() const noexcept { return *table_; }

private:
    std::optional<Eigen::VectorXd> offset(std::size_t a, std::size_t b, std::size_t y) const;

    const VectorTable* table_;
    Matrix unit_;
    std::vector<bool> usable_;
};

std::optional<AnalogyAnswer> answer_analogy(const VectorTable& table, std::string_view a,
                                            std::string_view b, std::string_view y);

// Accuracy over questions whose four words are all known. Throws
// InsufficientDataError if none are.
EvalReport evaluate_analogy(const VectorTable& table, const AnalogyDataset& dataset);

// `word1 word2 score` per line (tabs or spaces); `#` lines are comments.
SimilarityDataset parse_similarity_dataset(std::string_view text, std::string name);
SimilarityDataset load_similarity_dataset(const std::filesystem::path& path);

// `w1 w2 w3 w4` per line meaning w1 : w2 :: w3 : w4; `:` lines open a
// section. Stored as a = w2, b = w1, y = w3, expected = w4.
AnalogyDataset parse_analogy_dataset(std::string_view text, std::string name);
AnalogyDataset load_analogy_dataset(const std::filesystem::path& path);

}  // namespace pmiembed
