#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "pmiembed/error.hpp"
#include "pmiembed/eval.hpp"
#include "tables.hpp"

using namespace pmiembed;

namespace {

std::vector<double> row(const VectorTable& t, std::size_t i) {
    const auto r = t.vectors().row(static_cast<Eigen::Index>(i));
    return {r.data(), r.data() + r.size()};
}

// Brute-force 3CosAdd over a small table.
std::optional<std::string> brute_answer(const VectorTable& t, const AnalogyQuestion& q) {
    auto a = t.find(q.a), b = t.find(q.b), y = t.find(q.y);
    if (!a || !b || !y) {
        return std::nullopt;
    }
    Eigen::RowVectorXd target = t.vectors().row(*a) - t.vectors().row(*b) + t.vectors().row(*y);
    if (target.norm() == 0) {
        return std::nullopt;
    }
    std::optional<std::size_t> best;
    double best_cos = -2;
    for (std::size_t x = 0; x < t.size(); ++x) {
        if (x == *a || x == *b || x == *y || t.vectors().row(x).norm() == 0) {
            continue;
        }
        const double c = t.vectors().row(x).dot(target) / (t.vectors().row(x).norm() * target.norm());
        if (c > best_cos) {
            best_cos = c;
            best = x;
        }
    }
    if (!best) {
        return std::nullopt;
    }
    return t.words()[*best];
}

}  // namespace

TEST_CASE("cosine examples") {
    const std::vector<double> u{0.3, -2, 5};
    CHECK(*cosine(u, u) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(*cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
    CHECK(*cosine(std::vector<double>{1, 0}, std::vector<double>{-2, 0}) == -1.0);
    CHECK_FALSE(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0}).has_value());
}

TEST_CASE("cosine stays within [-1, 1]") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> u(5), v(5);
        for (auto& x : u) x = normal(rng);
        v = u;
        for (auto& x : v) x *= 3.7;
        const double c = *cosine(u, v);
        CHECK(c <= 1.0);
        CHECK(c >= -1.0);
    }
}

TEST_CASE("spearman_rho examples") {
    CHECK(spearman_rho(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}) == doctest::Approx(1.0));
    CHECK(spearman_rho(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0));
    const double tied = spearman_rho(std::vector<double>{1, 2, 2, 4}, std::vector<double>{1, 2, 3, 4});
    CHECK(tied == doctest::Approx(0.9486832980505139).epsilon(1e-14));
    CHECK(oracle::quadratic_ranks({1, 2, 2, 4}) == std::vector<double>{1, 2.5, 2.5, 4});
    CHECK(std::abs(tied - oracle::spearman({1, 2, 2, 4}, {1, 2, 3, 4})) < 1e-12);
}

TEST_CASE("spearman_rho errors") {
    CHECK_THROWS_AS(spearman_rho(std::vector<double>{1}, std::vector<double>{2}), UndefinedCorrelationError);
    CHECK_THROWS_AS(spearman_rho(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                    UndefinedCorrelationError);
    CHECK_THROWS_AS(spearman_rho(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}),
                    UndefinedCorrelationError);
    CHECK_THROWS_AS(spearman_rho(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), ConfigError);
}

TEST_CASE("spearman_rho matches the brute-force reference on tied inputs") {
    std::mt19937_64 rng(77);
    int compared = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t len = 2 + rng() % 99;
        const int levels = 2 + static_cast<int>(rng() % 10);
        std::vector<double> xs(len), ys(len);
        for (std::size_t i = 0; i < len; ++i) {
            xs[i] = static_cast<double>(rng() % static_cast<unsigned>(levels));
            ys[i] = (t % 2 == 0) ? static_cast<double>(rng() % 1000) / 7.0 : xs[i] + static_cast<double>(rng() % 3);
        }
        if (*std::min_element(xs.begin(), xs.end()) == *std::max_element(xs.begin(), xs.end()) ||
            *std::min_element(ys.begin(), ys.end()) == *std::max_element(ys.begin(), ys.end())) {
            CHECK_THROWS_AS(spearman_rho(xs, ys), UndefinedCorrelationError);
            continue;
        }
        CHECK(std::abs(spearman_rho(xs, ys) - oracle::spearman(xs, ys)) <= 1e-12);
        ++compared;
    }
    CHECK(compared > 900);
}

TEST_CASE("evaluate_similarity bookkeeping") {
    VectorTable t({"a", "b", "c"}, Matrix{{1, 0}, {1, 1}, {0, 1}});
    SimilarityDataset ds{"toy", {{"a", "b", 3.0}, {"a", "zzz", 1.0}, {"a", "c", 1.0}}};
    auto r = evaluate_similarity(t, ds);
    CHECK(r.used == 2);
    CHECK(r.skipped_oov == 1);
    CHECK(r.dataset == "toy");
    CHECK(std::abs(r.score) == 1.0);
}

TEST_CASE("evaluate_similarity with matching order scores 1") {
    std::vector<std::string> words;
    Matrix vectors(11, 2);
    for (int i = 0; i <= 10; ++i) {
        words.push_back("w" + std::to_string(i));
        const double angle = 0.15 * i;
        vectors.row(i) << std::cos(angle), std::sin(angle);
    }
    VectorTable t(words, vectors);
    SimilarityDataset ds{"ordered", {}};
    for (int i = 1; i <= 10; ++i) {
        ds.pairs.push_back({"w0", "w" + std::to_string(i), 10.0 - i});
    }
    CHECK(evaluate_similarity(t, ds).score == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evaluate_similarity skips zero vectors and reports insufficient data") {
    VectorTable t({"a", "b", "z"}, Matrix{{1, 0}, {0, 1}, {0, 0}});
    SimilarityDataset ds{"zero", {{"a", "b", 1.0}, {"a", "z", 2.0}, {"b", "q", 3.0}}};
    try {
        evaluate_similarity(t, ds);
        FAIL("expected insufficient data");
    } catch (const InsufficientDataError& e) {
        CHECK(e.skipped_oov() == 2);
    }
}

TEST_CASE("parallelogram analogy") {
    auto t = tables::parallelogram();
    auto ans = answer_analogy(t, "king", "man", "woman");
    REQUIRE(ans.has_value());
    CHECK(ans->word == "queen");
    CHECK(ans->cosine == doctest::Approx(1.0).epsilon(1e-15));
    auto r = evaluate_analogy(t, tables::parallelogram_questions());
    CHECK(r.score == 1.0);
    CHECK(r.used == 1);
    CHECK(r.skipped_oov == 0);
}

TEST_CASE("query words are excluded from the answer") {
    // The target a - b + y = [2, 0.1] is closest to a itself.
    VectorTable t({"a", "b", "y", "near", "far"},
                  Matrix{{2, 0}, {1, 0}, {1, 0.1}, {1, 0.2}, {0, 1}});
    auto ans = answer_analogy(t, "a", "b", "y");
    REQUIRE(ans.has_value());
    CHECK(ans->word == "near");
}

TEST_CASE("orthonormal table returns the basis word") {
    std::vector<std::string> words{"e0", "e1", "e2", "e3", "e4"};
    VectorTable t(words, Matrix::Identity(5, 5));
    // e0 - e1 + e1 = e0 is excluded as a query word; use distinct words.
    Matrix m = Matrix::Identity(6, 5);
    m.row(5) << 1, 1, 0, 0, 0;
    VectorTable t2({"e0", "e1", "e2", "e3", "e4", "mix"}, m);
    auto ans = answer_analogy(t2, "mix", "e0", "e2");
    REQUIRE(ans.has_value());
    CHECK(ans->cosine == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(ans->word == "e1");
    CHECK_FALSE(answer_analogy(t, "e0", "e0", "q").has_value());
}

TEST_CASE("ties go to the lower id") {
    VectorTable t({"a", "b", "y", "first", "second"},
                  Matrix{{1, 0}, {1, 0}, {0, 1}, {0, 2}, {0, 3}});
    auto ans = answer_analogy(t, "a", "b", "y");
    REQUIRE(ans.has_value());
    CHECK(ans->word == "first");
}

TEST_CASE("zero offset is skipped") {
    VectorTable t({"a", "b", "y", "x"}, Matrix{{1, 0}, {0, 1}, {-1, 1}, {1, 1}});
    CHECK_FALSE(answer_analogy(t, "a", "b", "y").has_value());
}

TEST_CASE("evaluate_analogy accuracy and errors") {
    auto t = tables::parallelogram();
    AnalogyDataset two{"two", {{"king", "man", "woman", "queen", ""}, {"king", "man", "woman", "man", ""}}};
    CHECK(evaluate_analogy(t, two).score == 0.5);
    AnalogyDataset oov{"oov", {{"king", "man", "woman", "princess", ""}}};
    CHECK_THROWS_AS(evaluate_analogy(t, oov), InsufficientDataError);
}

TEST_CASE("batched answers agree with brute force on small tables") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        auto t = tables::random_table(10 + rng() % 40, 2 + rng() % 7, rng);
        auto ds = tables::random_analogies(t, 600, rng);
        AnalogySolver solver(t);
        auto batch = solver.answer_batch(ds.questions);
        std::size_t correct = 0, used = 0;
        for (std::size_t q = 0; q < ds.questions.size(); ++q) {
            const auto& question = ds.questions[q];
            auto brute = brute_answer(t, question);
            REQUIRE(brute.has_value() == batch[q].has_value());
            if (brute) {
                CHECK(t.words()[*batch[q]] == *brute);
                auto single = solver.answer(question.a, question.b, question.y);
                CHECK(single->word == *brute);
                if (t.find(question.expected)) {
                    ++used;
                    correct += *brute == question.expected;
                }
            }
        }
        if (used > 0) {
            auto r = evaluate_analogy(t, ds);
            CHECK(r.used == used);
            CHECK(r.used + r.skipped_oov == ds.questions.size());
            CHECK(r.score == static_cast<double>(correct) / static_cast<double>(used));
        }
    }
}

TEST_CASE("reports are invariant to scaling and rotation") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> scalar(0.01, 100.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 1 + rng() % 8;
        auto t = tables::random_table(30, d, rng);
        auto sim = tables::random_similarity(t, 60, rng);
        auto ana = tables::random_analogies(t, 100, rng);
        auto q = tables::random_orthogonal(d, rng);
        for (const auto& other : {tables::scale(t, scalar(rng)), tables::transform(t, q)}) {
            auto a = evaluate_similarity(t, sim);
            auto b = evaluate_similarity(other, sim);
            CHECK(std::abs(a.score - b.score) < 1e-12);
            CHECK(a.used == b.used);
            CHECK(AnalogySolver(t).answer_batch(ana.questions) == AnalogySolver(other).answer_batch(ana.questions));
        }
    }
}

TEST_CASE("dataset parsing") {
    auto sim = parse_similarity_dataset("# comment\nCat\tDog\t7.35\nsun moon 2\n", "toy");
    REQUIRE(sim.pairs.size() == 2);
    CHECK(sim.pairs[0].first == "cat");
    CHECK(sim.pairs[0].second == "dog");
    CHECK(sim.pairs[0].human_score == 7.35);
    CHECK(sim.name == "toy");
    try {
        parse_similarity_dataset("a b 1\na b\n", "bad");
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_similarity_dataset("a b x\n", "bad"), ParseError);

    auto ana = parse_analogy_dataset(": capital-common-countries\nAthens Greece Baghdad Iraq\n", "toy");
    REQUIRE(ana.questions.size() == 1);
    const auto& q = ana.questions[0];
    CHECK(q.a == "greece");
    CHECK(q.b == "athens");
    CHECK(q.y == "baghdad");
    CHECK(q.expected == "iraq");
    CHECK(q.section == "capital-common-countries");
    CHECK(parse_analogy_dataset(": only-a-header\n", "h").questions.empty());
    CHECK_THROWS_AS(parse_analogy_dataset("a b c\n", "bad"), ParseError);
}

TEST_CASE("dataset loaders use the file stem as the name") {
    auto path = std::filesystem::temp_directory_path() / "pmiembed_eval_pairs.tsv";
    {
        std::ofstream out(path);
        out << "cat\tdog\t7.35\n";
    }
    auto ds = load_similarity_dataset(path);
    CHECK(ds.name == "pmiembed_eval_pairs");
    CHECK(ds.pairs.size() == 1);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_analogy_dataset(path), IoError);
}

TEST_CASE("bundled datasets load") {
    const std::filesystem::path data = PMIEMBED_TEST_DATA_DIR;
    CHECK(load_similarity_dataset(data / "wordsim353.tsv").pairs.size() == 353);
    CHECK(load_similarity_dataset(data / "simlex999.txt").pairs.size() == 999);
    auto google = load_analogy_dataset(data / "questions-words.txt");
    CHECK(google.questions.size() == 19544);
    CHECK(google.questions.front().section == "capital-common-countries");
}
