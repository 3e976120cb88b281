#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "pmiembed/io.hpp"
#include "toy_sweep.hpp"

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "pmi-embed");
    std::ostringstream out, err;
    const int code = pmiembed::cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string read(const std::filesystem::path& p) { return pmiembed::io::read_file(p); }

// Runs the whole pipeline into `dir` and returns the produced files.
std::vector<std::filesystem::path> pipeline(const std::filesystem::path& dir, const std::filesystem::path& corpus,
                                            const std::filesystem::path& pairs,
                                            const std::filesystem::path& questions) {
    const auto s = [&](const char* name) { return (dir / name).string(); };
    REQUIRE(run({"--deterministic", "build-vocab", "--input", corpus.string(), "--max-size", "32",
                 "--shard-size", "8", "--min-count", "1", "--output", s("vocab.txt")})
                .code == 0);
    REQUIRE(run({"--deterministic", "count", "--input", corpus.string(), "--vocab", s("vocab.txt"),
                 "--window", "3", "--weighting", "harmonic", "--shard-size", "8", "--output", s("cooc.bin")})
                .code == 0);
    auto trained = run({"--deterministic", "--seed", "5", "train", "--cooc", s("cooc.bin"), "--vocab",
                        s("vocab.txt"), "--dim", "6", "--epochs", "10", "--lr", "0.05", "--optimizer",
                        "adagrad", "--weight-exponent", "0.5", "--weight-scale", "1", "--output",
                        s("model.bin")});
    REQUIRE(trained.code == 0);
    REQUIRE(run({"export", "--model", s("model.bin"), "--mode", "row+col", "--format", "text", "--output",
                 s("vectors.txt")})
                .code == 0);
    REQUIRE(run({"export", "--model", s("model.bin"), "--mode", "row", "--format", "binary", "--output",
                 s("rows.bin")})
                .code == 0);
    auto sim = run({"eval", "--model", s("model.bin"), "--task", "similarity", "--dataset", pairs.string(),
                    "--report", "csv"});
    REQUIRE(sim.code == 0);
    pmiembed::io::write_file_atomic(dir / "similarity.csv", sim.out);
    auto ana = run({"eval", "--model", s("vectors.txt"), "--task", "analogy", "--dataset", questions.string(),
                    "--report", "text"});
    REQUIRE(ana.code == 0);
    pmiembed::io::write_file_atomic(dir / "analogy.txt", ana.out);
    return {dir / "vocab.txt",  dir / "cooc.bin",       dir / "model.bin",  dir / "vectors.txt",
            dir / "rows.bin",   dir / "similarity.csv", dir / "analogy.txt"};
}

}  // namespace

TEST_CASE("--help prints usage and exits 0") {
    auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("build-vocab") != std::string::npos);
    CHECK(r.out.find("sweep") != std::string::npos);
    CHECK(run({"train", "--help"}).out.find("--cooc") != std::string::npos);
}

TEST_CASE("--version names the binary formats") {
    auto r = run({"--version"});
    CHECK(r.code == 0);
    CHECK(r.out.find("pmi-embed") != std::string::npos);
    CHECK(r.out.find("PMCO v1") != std::string::npos);
    CHECK(r.out.find("PMEM v1") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
    auto missing = run({"train", "--vocab", "v.txt", "--output", "m.bin"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("--cooc") != std::string::npos);
    CHECK(run({}).code == 1);
    auto unknown = run({"frobnicate"});
    CHECK(unknown.code == 1);
    CHECK_FALSE(unknown.err.empty());
    CHECK(run({"--workers", "0", "truncate", "--tokens", "1"}).code == 1);
}

TEST_CASE("count --window 0 exits 1") {
    auto dir = toy::fresh_dir("cli_window");
    toy::write(dir / "c.txt", "a b a c\n");
    REQUIRE(run({"build-vocab", "--input", (dir / "c.txt").string(), "--shard-size", "1", "--output",
                 (dir / "v.txt").string()})
                .code == 0);
    auto r = run({"count", "--window", "0", "--input", (dir / "c.txt").string(), "--vocab",
                  (dir / "v.txt").string(), "--shard-size", "1", "--output", (dir / "x.bin").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("window") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "x.bin"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("data errors exit 1 with a message") {
    auto dir = toy::fresh_dir("cli_data");
    auto r = run({"train", "--cooc", (dir / "none.bin").string(), "--vocab", (dir / "none.txt").string(),
                  "--output", (dir / "m.bin").string()});
    CHECK(r.code == 1);
    CHECK(r.err.starts_with("error: "));
    toy::write(dir / "bad.bin", "XXXXjunk");
    CHECK(run({"export", "--model", (dir / "bad.bin").string(), "--output", (dir / "o.txt").string()}).code == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("truncate writes tokenized text") {
    auto dir = toy::fresh_dir("cli_truncate");
    toy::write(dir / "c.txt", "The cat, sat.\nOn the mat!\n");
    auto r = run({"truncate", "--tokens", "4", "--input", (dir / "c.txt").string()});
    CHECK(r.code == 0);
    CHECK(r.out == "the cat sat\non\n");
    std::filesystem::remove_all(dir);
}

TEST_CASE("the pipeline runs end to end and is byte-identical under --deterministic") {
    auto dir = toy::fresh_dir("cli_pipeline");
    toy::write(dir / "corpus.txt", toy::corpus_text(200, 9));
    toy::write(dir / "pairs.txt", toy::similarity_text());
    toy::write(dir / "questions.txt", toy::analogy_text());
    std::filesystem::create_directories(dir / "a");
    std::filesystem::create_directories(dir / "b");
    auto first = pipeline(dir / "a", dir / "corpus.txt", dir / "pairs.txt", dir / "questions.txt");
    auto second = pipeline(dir / "b", dir / "corpus.txt", dir / "pairs.txt", dir / "questions.txt");
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(read(first[i]) == read(second[i]));
    }
    auto csv = read(dir / "a" / "similarity.csv");
    CHECK(csv.starts_with("dataset,score,used,skipped\npairs,"));
    CHECK(csv.find(",32,1\n") != std::string::npos);
    CHECK(read(dir / "a" / "analogy.txt").starts_with("questions: accuracy "));

    auto rows = run({"eval", "--model", (dir / "a" / "rows.bin").string(), "--mode", "row", "--task",
                     "similarity", "--dataset", (dir / "pairs.txt").string(), "--report", "csv"});
    auto text = run({"eval", "--model", (dir / "a" / "vectors.txt").string(), "--task", "similarity",
                     "--dataset", (dir / "pairs.txt").string(), "--report", "csv"});
    CHECK(rows.out == text.out);
    std::filesystem::remove_all(dir);
}

TEST_CASE("failed training leaves no model file") {
    auto dir = toy::fresh_dir("cli_atomic");
    toy::write(dir / "corpus.txt", toy::corpus_text(50, 2));
    const auto s = [&](const char* name) { return (dir / name).string(); };
    REQUIRE(run({"build-vocab", "--input", s("corpus.txt"), "--max-size", "16", "--shard-size", "4", "--output",
                 s("vocab.txt")})
                .code == 0);
    REQUIRE(run({"count", "--input", s("corpus.txt"), "--vocab", s("vocab.txt"), "--window", "2",
                 "--shard-size", "4", "--output", s("cooc.bin")})
                .code == 0);
    auto r = run({"train", "--cooc", s("cooc.bin"), "--vocab", s("vocab.txt"), "--dim", "4", "--epochs", "50",
                  "--optimizer", "sgd", "--lr", "1e6", "--output", s("model.bin")});
    CHECK(r.code == 1);
    CHECK(r.err.find("diverged") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "model.bin"));
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        CHECK(entry.path().filename().string().find("model") == std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep writes tables, counts and plots") {
    auto dir = toy::fresh_dir("cli_sweep");
    auto grid = toy::grid(dir, {1, 2}, {4, 8});
    toy::write(dir / "sweep.conf",
               "corpus = S=corpus.txt:2000\n"
               "corpus = M=corpus.txt:4000\n"
               "windows = 1,2\n"
               "dims = 4,8\n"
               "max_vocab = 32\n"
               "shard_size = 8\n"
               "min_count = 1\n"
               "epochs = 2\n"
               "dataset.men = pairs.txt\n"
               "dataset.google = questions.txt\n");
    auto run_once = [&](const std::string& out) {
        return run({"--deterministic", "sweep", "--config", (dir / "sweep.conf").string(), "--output-dir",
                    (dir / out).string(), "--preset", "desk", "--dims", "4,8,12"});
    };
    auto r = run_once("out1");
    REQUIRE(r.code == 0);
    auto csv = read(dir / "out1" / "results.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 2 * 3);
    CHECK(csv.find("\nS,1,12,") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "out1" / "results.md"));
    CHECK(std::filesystem::exists(dir / "out1" / "counts.csv"));
    CHECK(std::filesystem::exists(dir / "out1" / "plots" / "window_S_d4.svg"));
    CHECK(std::filesystem::exists(dir / "out1" / "plots" / "dim_M_w2.svg"));
    CHECK(std::filesystem::exists(dir / "out1" / "plots" / "corpus_w1_d8.svg"));
    REQUIRE(run_once("out2").code == 0);
    for (auto name : {"results.csv", "results.md", "counts.csv", "plots/window_M_d12.svg"}) {
        CHECK(read(dir / "out1" / name) == read(dir / "out2" / name));
    }

    auto bad = run({"sweep", "--config", (dir / "sweep.conf").string(), "--output-dir", (dir / "out3").string(),
                    "--dims", ""});
    CHECK(bad.code == 1);
    CHECK_FALSE(std::filesystem::exists(dir / "out3" / "results.csv"));
    CHECK(run({"sweep", "--output-dir", (dir / "out4").string(), "--preset", "huge"}).code == 1);
    std::filesystem::remove_all(dir);
}
