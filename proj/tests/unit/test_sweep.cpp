#include <doctest.h>

#include <filesystem>
#include <set>

#include "pmiembed/error.hpp"
#include "pmiembed/io.hpp"
#include "pmiembed/sweep.hpp"
#include "golden.hpp"
#include "toy_sweep.hpp"

using namespace pmiembed;

namespace {

std::string read(const std::filesystem::path& p) { return io::read_file(p); }

ResultRecord record(std::string label, std::size_t window, std::size_t dim,
                    std::array<std::optional<double>, kResultColumns> scores) {
    return golden::record(std::move(label), window, dim, scores);
}

std::vector<ResultRecord> golden_records() { return golden::records(); }

}  // namespace

TEST_CASE("presets") {
    auto paper = paper_preset();
    CHECK(paper.windows == std::vector<std::size_t>{1, 2, 3, 4, 10, 16, 32});
    CHECK(paper.dims == std::vector<std::size_t>{20, 100, 200, 400, 500});
    CHECK(paper.shard_size == 4096);
    auto desk = desk_preset();
    CHECK(desk.windows == std::vector<std::size_t>{1, 4, 10});
    CHECK(desk.dims == std::vector<std::size_t>{20, 100, 200});
    CHECK(desk.shard_size == 256);
    CHECK(desk.train.epochs == 10);
    CHECK(paper.train.epochs == 20);
}

TEST_CASE("grid seeds are stable and distinct") {
    CHECK(grid_seed(1, "S", 1, 20) == grid_seed(1, "S", 1, 20));
    std::set<std::uint64_t> seeds;
    for (auto label : {"S", "M", "L"}) {
        for (std::size_t w : {1, 2, 3, 4, 10, 16, 32}) {
            for (std::size_t d : {20, 100, 200, 400, 500}) {
                seeds.insert(grid_seed(7, label, w, d));
            }
        }
    }
    CHECK(seeds.size() == 105);
    CHECK((grid_seed(0, "S", 1, 20) ^ grid_seed(5, "S", 1, 20)) == 5);
}

TEST_CASE("two windows and one dim give two ordered records") {
    auto dir = toy::fresh_dir("sweep_two");
    auto g = toy::grid(dir, {1, 2}, {20});
    g.corpora.resize(1);
    auto records = run_sweep(g);
    REQUIRE(records.size() == 2);
    CHECK(records[0].window == 1);
    CHECK(records[1].window == 2);
    for (const auto& r : records) {
        CHECK(r.error.empty());
        CHECK(r.data_size == "S");
        CHECK(r.dim == 20);
        CHECK(r.tokens == 2000);
        const auto men = *column_index("men");
        const auto google = *column_index("google");
        REQUIRE(r.scores[men].has_value());
        CHECK(*r.scores[men] >= -1.0);
        CHECK(*r.scores[men] <= 1.0);
        CHECK(r.used[men] + r.skipped[men] == 33);
        CHECK(r.skipped[men] == 1);
        REQUIRE(r.scores[google].has_value());
        CHECK(r.used[google] + r.skipped[google] == 9);
        CHECK_FALSE(r.scores[*column_index("msr")].has_value());
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("the paper-shaped grid on toy corpora yields 105 records in grid order") {
    auto dir = toy::fresh_dir("sweep_full");
    auto paper = paper_preset();
    auto g = toy::grid(dir, paper.windows, paper.dims);
    g.train.epochs = 1;
    auto records = run_sweep(g);
    REQUIRE(records.size() == 105);
    std::size_t i = 0;
    for (const auto& c : g.corpora) {
        for (auto w : g.windows) {
            for (auto d : g.dims) {
                CHECK(records[i].data_size == c.label);
                CHECK(records[i].window == w);
                CHECK(records[i].dim == d);
                CHECK(records[i].error.empty());
                ++i;
            }
        }
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("reruns reproduce every score bit-identically") {
    auto dir = toy::fresh_dir("sweep_rerun");
    auto g = toy::grid(dir, {1, 3}, {8, 16});
    auto a = run_sweep(g);
    auto b = run_sweep(g);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].scores == b[i].scores);
    }
    CHECK(render_results(a, ResultFormat::csv) == render_results(b, ResultFormat::csv));
    std::filesystem::remove_all(dir);
}

TEST_CASE("training failures become error records") {
    auto dir = toy::fresh_dir("sweep_fail");
    auto g = toy::grid(dir, {2}, {4});
    g.corpora.resize(1);
    g.train.optimizer = Optimizer::sgd;
    g.train.learning_rate = 1e6;
    auto records = run_sweep(g);
    REQUIRE(records.size() == 1);
    CHECK_FALSE(records[0].error.empty());
    CHECK(render_results(records, ResultFormat::csv).find("S,2,4,NA,NA,NA,NA,NA,NA,NA,NA") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("invalid grids fail before training") {
    auto dir = toy::fresh_dir("sweep_invalid");
    auto g = toy::grid(dir, {1}, {});
    CHECK_THROWS_AS(run_sweep(g), ConfigError);
    g.dims = {4};
    g.windows = {};
    CHECK_THROWS_AS(run_sweep(g), ConfigError);
    g.windows = {1};
    g.corpora.push_back(g.corpora.front());
    CHECK_THROWS_AS(validate(g), ConfigError);
    g.corpora.pop_back();
    g.corpora[0].path = dir / "missing.txt";
    CHECK_THROWS_AS(validate(g), ConfigError);
    g = toy::grid(dir, {1}, {4});
    g.datasets[*column_index("simlex")] = dir / "missing.txt";
    CHECK_THROWS_AS(validate(g), ConfigError);
    g = toy::grid(dir, {1}, {4});
    g.train.epochs = 0;
    CHECK_THROWS_AS(validate(g), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("CSV matches the golden file byte for byte") {
    const std::filesystem::path golden = PMIEMBED_TEST_GOLDEN_DIR "/results.csv";
    CHECK(render_results(golden_records(), ResultFormat::csv) == read(golden));
    auto out = std::filesystem::temp_directory_path() / "pmiembed_golden_out.csv";
    emit_results(golden_records(), ResultFormat::csv, out);
    CHECK(read(out) == read(golden));
    std::filesystem::remove(out);
}

TEST_CASE("scores render with three decimals") {
    auto csv = render_results({record("S", 1, 20, {0.5714})}, ResultFormat::csv);
    CHECK(csv.find("S,1,20,0.571,NA,") != std::string::npos);
    auto header = csv.substr(0, csv.find('\n'));
    CHECK(header == "data_size,window,dim,men,mturk,rare_words,simlex,relatedness,similarity,google,msr");
}

TEST_CASE("markdown has a header, a separator and one row per record") {
    auto md = render_results(golden_records(), ResultFormat::markdown);
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < md.size()) {
        auto nl = md.find('\n', pos);
        lines.push_back(md.substr(pos, nl - pos));
        pos = nl + 1;
    }
    REQUIRE(lines.size() == 2 + 3);
    CHECK(lines[0].starts_with("| data_size | window | dim | men |"));
    CHECK(lines[1].starts_with("| --- |"));
    CHECK(lines[2] == "| S | 1 | 20 | 0.571 | 0.584 | 0.234 | 0.198 | 0.459 | 0.571 | 0.101 | 0.056 |");
}

TEST_CASE("emit_results refuses an empty record list") {
    CHECK_THROWS_AS(emit_results({}, ResultFormat::csv, std::filesystem::temp_directory_path() / "x.csv"),
                    ConfigError);
}

TEST_CASE("CSV round trip at three decimals") {
    auto records = golden_records();
    auto parsed = parse_results_csv(render_results(records, ResultFormat::csv));
    REQUIRE(parsed.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(parsed[i].data_size == records[i].data_size);
        CHECK(parsed[i].window == records[i].window);
        CHECK(parsed[i].dim == records[i].dim);
        for (std::size_t c = 0; c < kResultColumns; ++c) {
            REQUIRE(parsed[i].scores[c].has_value() == records[i].scores[c].has_value());
            if (records[i].scores[c]) {
                CHECK(std::abs(*parsed[i].scores[c] - *records[i].scores[c]) <= 0.0005 + 1e-12);
            }
        }
    }
    CHECK(render_results(parsed, ResultFormat::csv) == render_results(records, ResultFormat::csv));
    CHECK_THROWS_AS(parse_results_csv("header\nS,1,20,0.5\n"), ParseError);
}

TEST_CASE("counts report") {
    auto r = record("S", 1, 20, {0.5});
    r.used[0] = 10;
    r.skipped[0] = 3;
    auto text = render_counts({r});
    CHECK(text.starts_with("data_size,window,dim,column,used,skipped,error\nS,1,20,men,10,3,\n"));
}

TEST_CASE("window plots at a fixed dim") {
    auto dir = toy::fresh_dir("plots_window");
    std::vector<ResultRecord> records;
    for (std::size_t w : {1, 2, 4}) {
        records.push_back(record("S", w, 100, {0.5, 0.4, std::nullopt, 0.2, 0.1, 0.3, 0.05 * w, 0.02}));
    }
    auto out = emit_trend_plots(records, dir / "plots" / "");
    REQUIRE(out.files.size() == 1);
    CHECK(out.files[0].filename() == "window_S_d100.svg");
    auto svg = read(out.files[0]);
    CHECK(svg.starts_with("<svg"));
    CHECK(svg.find("#b2182b") != std::string::npos);
    CHECK(svg.find("#2166ac") != std::string::npos);
    CHECK(svg.find("stroke-dasharray=\"6 3\"") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(out.warnings.size() == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("no records, no plots") {
    auto dir = toy::fresh_dir("plots_empty");
    auto out = emit_trend_plots({}, dir / "p_");
    CHECK(out.files.empty());
    CHECK(out.warnings.size() == 1);
    CHECK(std::filesystem::is_empty(dir));
    std::filesystem::remove_all(dir);
}

TEST_CASE("the full grid gives three plot families") {
    auto dir = toy::fresh_dir("plots_full");
    auto paper = paper_preset();
    std::vector<ResultRecord> records;
    std::size_t tokens = 1000;
    for (auto label : {"S", "M", "L"}) {
        for (auto w : paper.windows) {
            for (auto d : paper.dims) {
                auto r = record(label, w, d, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.1, 0.1});
                r.tokens = tokens;
                records.push_back(r);
            }
        }
        tokens *= 2;
    }
    auto out = emit_trend_plots(records, dir / "fig_");
    CHECK(out.warnings.empty());
    CHECK(out.files.size() == 3 * 5 + 3 * 7 + 7 * 5);
    std::set<std::string> prefixes;
    for (const auto& f : out.files) {
        const auto name = f.filename().string();
        prefixes.insert(name.substr(4, name.find('_', 4) - 4));
        CHECK(std::filesystem::exists(f));
    }
    CHECK(prefixes == std::set<std::string>{"window", "dim", "corpus"});
    std::filesystem::remove_all(dir);
}

TEST_CASE("settings parsing and precedence") {
    auto base = std::filesystem::path("/data/root");
    auto settings = parse_settings(
        "# comment\n"
        "corpus = S=small.txt:1000\n"
        "corpus = M=/abs/medium.txt:5000:4096\n"
        "windows = 1, 4,10\n"
        "dims = 20,100\n"
        "max-vocab = 8192\n"
        "lr = 0.1\n"
        "weighting = harmonic\n"
        "mode = row\n"
        "dataset.simlex = sets/simlex.txt\n",
        base);
    auto grid = desk_preset();
    apply_settings(grid, settings);
    REQUIRE(grid.corpora.size() == 2);
    CHECK(grid.corpora[0].label == "S");
    CHECK(grid.corpora[0].path == base / "small.txt");
    CHECK(grid.corpora[0].token_target == 1000);
    CHECK_FALSE(grid.corpora[0].max_vocab.has_value());
    CHECK(grid.corpora[1].path == "/abs/medium.txt");
    CHECK(grid.corpora[1].max_vocab == std::size_t{4096});
    CHECK(grid.windows == std::vector<std::size_t>{1, 4, 10});
    CHECK(grid.dims == std::vector<std::size_t>{20, 100});
    CHECK(grid.max_vocab == 8192);
    CHECK(grid.train.learning_rate == 0.1);
    CHECK(grid.weighting == Weighting::harmonic);
    CHECK(grid.mode == CombineMode::row_only);
    CHECK(grid.datasets[*column_index("simlex")] == base / "sets/simlex.txt");

    apply_settings(grid, {{"dims", "50"}, {"corpus", "X=x.txt:10"}});
    CHECK(grid.dims == std::vector<std::size_t>{50});
    REQUIRE(grid.corpora.size() == 1);
    CHECK(grid.corpora[0].label == "X");

    CHECK_THROWS_AS(apply_settings(grid, {{"colour", "blue"}}), ConfigError);
    CHECK_THROWS_AS(apply_settings(grid, {{"dims", "20,abc"}}), ConfigError);
    CHECK_THROWS_AS(apply_settings(grid, {{"dataset.nope", "x"}}), ConfigError);
    CHECK_THROWS_AS(apply_settings(grid, {{"corpus", "nolabel"}}), ConfigError);
    CHECK_THROWS_AS(parse_settings("just words\n", base), ParseError);
}
