#include "pmiembed/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "pmiembed/error.hpp"
#include "pmiembed/io.hpp"
#include "pmiembed/tokenizer.hpp"

namespace pmiembed {
namespace {

constexpr std::size_t kAnalogyBatch = 512;

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) {
            ++j;
        }
        // Positions i..j-1 share ranks i+1..j.
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t p = i; p < j; ++p) {
            ranks[order[p]] = rank;
        }
        i = j;
    }
    return ranks;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        auto start = line.find_first_not_of(" \t\r", pos);
        if (start == std::string_view::npos) {
            break;
        }
        auto end = line.find_first_of(" \t\r", start);
        if (end == std::string_view::npos) {
            end = line.size();
        }
        fields.push_back(line.substr(start, end - start));
        pos = end;
    }
    return fields;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        fn(line_no, text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    }
}

}  // namespace

std::optional<double> cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw InternalError("cosine of vectors with different dimensions");
    }
    double dot = 0.0;
    double uu = 0.0;
    double vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) {
        return std::nullopt;
    }
    return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

double spearman_rho(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw ConfigError("spearman_rho needs equal-length lists, got " + std::to_string(xs.size()) +
                          " and " + std::to_string(ys.size()));
    }
    if (xs.size() < 2) {
        throw UndefinedCorrelationError("rank correlation needs at least two items");
    }
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const double n = static_cast<double>(rx.size());
    const double mean = (n + 1.0) / 2.0;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw UndefinedCorrelationError("rank correlation is undefined for a constant list");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

EvalReport evaluate_similarity(const VectorTable& table, const SimilarityDataset& dataset) {
    EvalReport report{dataset.name, 0.0, 0, 0};
    std::vector<double> predicted;
    std::vector<double> human;
    for (const auto& pair : dataset.pairs) {
        const auto i = table.find(pair.first);
        const auto j = table.find(pair.second);
        std::optional<double> sim;
        if (i && j) {
            const auto& m = table.vectors();
            sim = cosine({m.row(static_cast<Eigen::Index>(*i)).data(), table.dim()},
                         {m.row(static_cast<Eigen::Index>(*j)).data(), table.dim()});
        }
        if (!sim) {
            ++report.skipped_oov;
            continue;
        }
        predicted.push_back(*sim);
        human.push_back(pair.human_score);
        ++report.used;
    }
    if (report.used < 2) {
        throw InsufficientDataError(dataset.name + ": fewer than two usable similarity pairs",
                                    report.skipped_oov);
    }
    report.score = spearman_rho(predicted, human);
    return report;
}

AnalogySolver::AnalogySolver(const VectorTable& table)
    : table_(&table), unit_(table.vectors()), usable_(table.size(), false) {
    for (Eigen::Index i = 0; i < unit_.rows(); ++i) {
        const double norm = unit_.row(i).norm();
        if (norm > 0.0) {
            unit_.row(i) /= norm;
            usable_[static_cast<std::size_t>(i)] = true;
        }
    }
}

std::optional<Eigen::VectorXd> AnalogySolver::offset(std::size_t a, std::size_t b,
                                                     std::size_t y) const {
    const auto& v = table_->vectors();
    Eigen::VectorXd target = (v.row(static_cast<Eigen::Index>(a)) - v.row(static_cast<Eigen::Index>(b)) +
                              v.row(static_cast<Eigen::Index>(y)))
                                 .transpose();
    if (target.norm() == 0.0) {
        return std::nullopt;
    }
    return target;
}

std::vector<std::optional<std::size_t>> AnalogySolver::answer_batch(
    std::span<const AnalogyQuestion> questions) const {
    std::vector<std::optional<std::size_t>> answers(questions.size());
    const auto dim = static_cast<Eigen::Index>(table_->dim());
    for (std::size_t start = 0; start < questions.size(); start += kAnalogyBatch) {
        const std::size_t count = std::min(kAnalogyBatch, questions.size() - start);
        struct Query {
            std::size_t question;
            std::size_t a, b, y;
        };
        std::vector<Query> queries;
        Matrix targets(static_cast<Eigen::Index>(count), dim);
        for (std::size_t q = start; q < start + count; ++q) {
            const auto& question = questions[q];
            const auto a = table_->find(question.a);
            const auto b = table_->find(question.b);
            const auto y = table_->find(question.y);
            if (!a || !b || !y) {
                continue;
            }
            auto t = offset(*a, *b, *y);
            if (!t) {
                continue;
            }
            targets.row(static_cast<Eigen::Index>(queries.size())) = t->transpose();
            queries.push_back({q, *a, *b, *y});
        }
        if (queries.empty()) {
            continue;
        }
        const Matrix scores =
            unit_ * targets.topRows(static_cast<Eigen::Index>(queries.size())).transpose();
        for (std::size_t k = 0; k < queries.size(); ++k) {
            const auto& query = queries[k];
            std::optional<std::size_t> best;
            double best_score = 0.0;
            for (std::size_t x = 0; x < usable_.size(); ++x) {
                if (!usable_[x] || x == query.a || x == query.b || x == query.y) {
                    continue;
                }
                const double s = scores(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(k));
                if (!best || s > best_score) {
                    best = x;
                    best_score = s;
                }
            }
            answers[query.question] = best;
        }
    }
    return answers;
}

std::optional<AnalogyAnswer> AnalogySolver::answer(std::string_view a, std::string_view b,
                                                   std::string_view y) const {
    const AnalogyQuestion question{std::string(a), std::string(b), std::string(y), {}, {}};
    const auto best = answer_batch({&question, 1}).front();
    if (!best) {
        return std::nullopt;
    }
    const auto target = *offset(*table_->find(a), *table_->find(b), *table_->find(y));
    const auto& v = table_->vectors();
    const auto sim = cosine({v.row(static_cast<Eigen::Index>(*best)).data(), table_->dim()},
                            {target.data(), table_->dim()});
    return AnalogyAnswer{*best, table_->words()[*best], sim.value_or(0.0)};
}

std::optional<AnalogyAnswer> answer_analogy(const VectorTable& table, std::string_view a,
                                            std::string_view b, std::string_view y) {
    return AnalogySolver(table).answer(a, b, y);
}

EvalReport evaluate_analogy(const VectorTable& table, const AnalogyDataset& dataset) {
    const AnalogySolver solver(table);
    const auto answers = solver.answer_batch(dataset.questions);
    EvalReport report{dataset.name, 0.0, 0, 0};
    std::size_t correct = 0;
    for (std::size_t q = 0; q < answers.size(); ++q) {
        const auto& question = dataset.questions[q];
        // A question counts as usable only when all four words are known.
        if (!answers[q] || !table.find(question.expected)) {
            ++report.skipped_oov;
            continue;
        }
        ++report.used;
        if (table.words()[*answers[q]] == question.expected) {
            ++correct;
        }
    }
    if (report.used == 0) {
        throw InsufficientDataError(dataset.name + ": no usable analogy questions", report.skipped_oov);
    }
    report.score = static_cast<double>(correct) / static_cast<double>(report.used);
    return report;
}

SimilarityDataset parse_similarity_dataset(std::string_view text, std::string name) {
    SimilarityDataset dataset{std::move(name), {}};
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto fields = split_fields(line);
        if (fields.empty() || fields.front().starts_with('#')) {
            return;
        }
        if (fields.size() != 3) {
            throw ParseError(line_no, "expected 'word1 word2 score', found " +
                                          std::to_string(fields.size()) + " fields");
        }
        double score = 0.0;
        auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), score);
        if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size() || !std::isfinite(score)) {
            throw ParseError(line_no, "bad score '" + std::string(fields[2]) + "'");
        }
        dataset.pairs.push_back({to_lower_utf8(fields[0]), to_lower_utf8(fields[1]), score});
    });
    return dataset;
}

SimilarityDataset load_similarity_dataset(const std::filesystem::path& path) {
    return parse_similarity_dataset(io::read_file(path), path.stem().string());
}

AnalogyDataset parse_analogy_dataset(std::string_view text, std::string name) {
    AnalogyDataset dataset{std::move(name), {}};
    std::string section;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto fields = split_fields(line);
        if (fields.empty()) {
            return;
        }
        if (fields.front().starts_with(':')) {
            auto header = line.substr(line.find(':') + 1);
            const auto words = split_fields(header);
            section = words.empty() ? std::string{} : std::string(words.front());
            return;
        }
        if (fields.size() != 4) {
            throw ParseError(line_no, "expected four words, found " + std::to_string(fields.size()));
        }
        dataset.questions.push_back({to_lower_utf8(fields[1]), to_lower_utf8(fields[0]),
                                     to_lower_utf8(fields[2]), to_lower_utf8(fields[3]), section});
    });
    return dataset;
}

AnalogyDataset load_analogy_dataset(const std::filesystem::path& path) {
    return parse_analogy_dataset(io::read_file(path), path.stem().string());
}

}  // namespace pmiembed
