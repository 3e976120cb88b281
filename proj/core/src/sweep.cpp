#include "pmiembed/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "pmiembed/embedding_store.hpp"
#include "pmiembed/error.hpp"
#include "pmiembed/eval.hpp"
#include "pmiembed/io.hpp"
#include "pmiembed/tokenizer.hpp"

namespace pmiembed {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string_view key) {
    std::string out(trim(key));
    std::replace(out.begin(), out.end(), '-', '_');
    if (out == "lr") {
        out = "learning_rate";
    }
    return out;
}

template <typename T>
std::optional<T> to_number(std::string_view s) {
    s = trim(s);
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        return std::nullopt;
    }
    return v;
}

template <typename T>
T require_number(std::string_view key, std::string_view value) {
    auto v = to_number<T>(value);
    if (!v) {
        throw ConfigError("setting '" + std::string(key) + "': bad number '" + std::string(value) + "'");
    }
    return *v;
}

std::vector<std::size_t> parse_list(std::string_view key, std::string_view value) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        auto comma = value.find(',', pos);
        auto item = trim(value.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (!item.empty()) {
            out.push_back(require_number<std::size_t>(key, item));
        }
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

CorpusSpec parse_corpus(std::string_view value) {
    value = trim(value);
    const auto eq = value.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("corpus '" + std::string(value) + "' is not label=path:token_target");
    }
    CorpusSpec spec;
    spec.label = std::string(trim(value.substr(0, eq)));
    std::string_view rest = value.substr(eq + 1);
    auto last = rest.rfind(':');
    if (last == std::string_view::npos) {
        throw ConfigError("corpus '" + spec.label + "' needs a token target (label=path:token_target)");
    }
    auto tail = to_number<std::size_t>(rest.substr(last + 1));
    if (!tail) {
        throw ConfigError("corpus '" + spec.label + "': bad token target '" +
                          std::string(rest.substr(last + 1)) + "'");
    }
    std::string_view head = rest.substr(0, last);
    auto prev = head.rfind(':');
    std::optional<std::size_t> middle;
    if (prev != std::string_view::npos) {
        middle = to_number<std::size_t>(head.substr(prev + 1));
    }
    if (middle) {
        spec.token_target = *middle;
        spec.max_vocab = *tail;
        spec.path = std::string(trim(head.substr(0, prev)));
    } else {
        spec.token_target = *tail;
        spec.path = std::string(trim(head));
    }
    return spec;
}

std::string render_corpus(const CorpusSpec& spec) {
    std::string out = spec.label + "=" + spec.path.string() + ":" + std::to_string(spec.token_target);
    if (spec.max_vocab) {
        out += ":" + std::to_string(*spec.max_vocab);
    }
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
    return p.is_absolute() || base.empty() ? p : base / p;
}

std::string format_score(const std::optional<double>& v) {
    if (!v) {
        return "NA";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

}  // namespace

std::optional<std::size_t> column_index(std::string_view name) {
    for (std::size_t c = 0; c < kColumnNames.size(); ++c) {
        if (kColumnNames[c] == name) {
            return c;
        }
    }
    return std::nullopt;
}

SweepGrid paper_preset() {
    SweepGrid grid;
    grid.windows = {1, 2, 3, 4, 10, 16, 32};
    grid.dims = {20, 100, 200, 400, 500};
    grid.shard_size = 4096;
    return grid;
}

SweepGrid desk_preset() {
    SweepGrid grid;
    grid.windows = {1, 4, 10};
    grid.dims = {20, 100, 200};
    grid.shard_size = 256;
    grid.max_vocab = 8192;
    grid.min_count = 5;
    // Keeps a 1M-token desk sweep within half an hour on one core.
    grid.train.epochs = 10;
    return grid;
}

Settings parse_settings(std::string_view text, const std::filesystem::path& base_dir) {
    Settings out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, "expected key = value");
        }
        auto key = normalize_key(line.substr(0, eq));
        std::string value(trim(line.substr(eq + 1)));
        if (key == "corpus") {
            auto spec = parse_corpus(value);
            spec.path = resolve(base_dir, spec.path);
            value = render_corpus(spec);
        } else if (key.starts_with("dataset.") && !value.empty()) {
            value = resolve(base_dir, value).string();
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

void apply_settings(SweepGrid& grid, const Settings& settings) {
    bool corpora_replaced = false;
    for (const auto& [raw_key, value] : settings) {
        const auto key = normalize_key(raw_key);
        if (key == "corpus") {
            if (!corpora_replaced) {
                grid.corpora.clear();
                corpora_replaced = true;
            }
            grid.corpora.push_back(parse_corpus(value));
        } else if (key == "windows") {
            grid.windows = parse_list(key, value);
        } else if (key == "dims") {
            grid.dims = parse_list(key, value);
        } else if (key == "max_vocab") {
            grid.max_vocab = require_number<std::size_t>(key, value);
        } else if (key == "shard_size") {
            grid.shard_size = require_number<std::size_t>(key, value);
        } else if (key == "min_count") {
            grid.min_count = require_number<std::size_t>(key, value);
        } else if (key == "weighting") {
            grid.weighting = parse_weighting(value);
        } else if (key == "mode") {
            grid.mode = parse_combine_mode(value);
        } else if (key == "epochs") {
            grid.train.epochs = require_number<std::size_t>(key, value);
        } else if (key == "learning_rate") {
            grid.train.learning_rate = require_number<double>(key, value);
        } else if (key == "optimizer") {
            grid.train.optimizer = parse_optimizer(value);
        } else if (key == "seed") {
            grid.train.seed = require_number<std::uint64_t>(key, value);
        } else if (key == "weight_exponent") {
            grid.train.weight_exponent = require_number<double>(key, value);
        } else if (key == "weight_scale") {
            grid.train.weight_scale = require_number<double>(key, value);
        } else if (key == "init_scale") {
            grid.train.init_scale = require_number<double>(key, value);
        } else if (key == "workers") {
            grid.train.workers = require_number<std::size_t>(key, value);
        } else if (key.starts_with("dataset.")) {
            const auto column = column_index(std::string_view(key).substr(8));
            if (!column) {
                throw ConfigError("unknown dataset column '" + key.substr(8) + "'");
            }
            if (value.empty()) {
                grid.datasets[*column].reset();
            } else {
                grid.datasets[*column] = value;
            }
        } else {
            throw ConfigError("unknown setting '" + key + "'");
        }
    }
}

void validate(const SweepGrid& grid) {
    if (grid.corpora.empty()) {
        throw ConfigError("sweep needs at least one corpus");
    }
    if (grid.windows.empty()) {
        throw ConfigError("sweep needs at least one window size");
    }
    if (grid.dims.empty()) {
        throw ConfigError("sweep needs at least one dimension");
    }
    if (std::find(grid.windows.begin(), grid.windows.end(), 0) != grid.windows.end()) {
        throw ConfigError("window sizes must be at least 1");
    }
    if (std::find(grid.dims.begin(), grid.dims.end(), 0) != grid.dims.end()) {
        throw ConfigError("dimensions must be at least 1");
    }
    if (grid.shard_size < 1 || grid.min_count < 1) {
        throw ConfigError("shard size and min count must be at least 1");
    }
    std::set<std::string> labels;
    for (const auto& corpus : grid.corpora) {
        if (!labels.insert(corpus.label).second) {
            throw ConfigError("duplicate corpus label '" + corpus.label + "'");
        }
        if (corpus.token_target < 1) {
            throw ConfigError("corpus '" + corpus.label + "' needs a positive token target");
        }
        if (!std::filesystem::is_regular_file(corpus.path)) {
            throw ConfigError("corpus '" + corpus.label + "': no such file " + corpus.path.string());
        }
        if (corpus.max_vocab.value_or(grid.max_vocab) < grid.shard_size) {
            throw ConfigError("corpus '" + corpus.label + "': max vocabulary below shard size");
        }
    }
    for (std::size_t c = 0; c < kResultColumns; ++c) {
        if (grid.datasets[c] && !std::filesystem::is_regular_file(*grid.datasets[c])) {
            throw ConfigError("dataset." + std::string(kColumnNames[c]) + ": no such file " +
                              grid.datasets[c]->string());
        }
    }
    auto probe = grid.train;
    probe.dim = 1;
    validate(probe);
}

std::uint64_t grid_seed(std::uint64_t base_seed, std::string_view label, std::size_t window,
                        std::size_t dim) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](std::string_view bytes) {
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    mix(label);
    mix("|");
    mix(std::to_string(window));
    mix("|");
    mix(std::to_string(dim));
    return base_seed ^ h;
}

std::vector<ResultRecord> run_sweep(const SweepGrid& grid, const SweepLog& log) {
    validate(grid);
    auto say = [&](const std::string& msg) {
        if (log) {
            log(msg);
        }
    };

    // Datasets are parsed up front so malformed files fail before training.
    std::array<std::optional<SimilarityDataset>, kResultColumns> similarity;
    std::array<std::optional<AnalogyDataset>, kResultColumns> analogy;
    for (std::size_t c = 0; c < kResultColumns; ++c) {
        if (!grid.datasets[c]) {
            continue;
        }
        if (is_analogy_column(c)) {
            analogy[c] = load_analogy_dataset(*grid.datasets[c]);
        } else {
            similarity[c] = load_similarity_dataset(*grid.datasets[c]);
        }
    }

    std::vector<ResultRecord> records;
    for (const auto& corpus : grid.corpora) {
        const auto stream = truncate_corpus(tokenize(io::read_text_file(corpus.path)), corpus.token_target);
        const auto vocab = build_vocabulary(stream, corpus.max_vocab.value_or(grid.max_vocab),
                                            grid.shard_size, grid.min_count);
        say("corpus " + corpus.label + ": " + std::to_string(stream.token_count) + " tokens, " +
            std::to_string(vocab.size()) + " words");
        for (const std::size_t window : grid.windows) {
            const auto cooc = count_cooccurrences(stream, vocab, window, grid.weighting, grid.train.workers);
            say("  window " + std::to_string(window) + ": " + std::to_string(cooc.entries().size()) +
                " non-zero cells");
            for (const std::size_t dim : grid.dims) {
                ResultRecord record;
                record.data_size = corpus.label;
                record.window = window;
                record.dim = dim;
                record.tokens = stream.token_count;
                auto config = grid.train;
                config.dim = dim;
                config.shard_size = grid.shard_size;
                config.seed = grid_seed(grid.train.seed, corpus.label, window, dim);
                try {
                    const auto trained = train(cooc, vocab, config);
                    const auto table = make_table(trained.model, grid.mode);
                    for (std::size_t c = 0; c < kResultColumns; ++c) {
                        try {
                            EvalReport report;
                            if (similarity[c]) {
                                report = evaluate_similarity(table, *similarity[c]);
                            } else if (analogy[c]) {
                                report = evaluate_analogy(table, *analogy[c]);
                            } else {
                                continue;
                            }
                            record.scores[c] = report.score;
                            record.used[c] = report.used;
                            record.skipped[c] = report.skipped_oov;
                        } catch (const InsufficientDataError& e) {
                            record.skipped[c] = e.skipped_oov();
                        } catch (const UndefinedCorrelationError&) {
                        }
                    }
                } catch (const Error& e) {
                    record.error = e.what();
                }
                say("    dim " + std::to_string(dim) + (record.error.empty() ? " done" : ": " + record.error));
                records.push_back(std::move(record));
            }
        }
    }
    return records;
}

std::string render_results(const std::vector<ResultRecord>& records, ResultFormat format) {
    std::vector<std::string> header = {"data_size", "window", "dim"};
    for (auto name : kColumnNames) {
        header.emplace_back(name);
    }
    std::string out;
    auto emit_row = [&](const std::vector<std::string>& cells) {
        if (format == ResultFormat::csv) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                out += (i ? "," : "") + cells[i];
            }
        } else {
            out += "|";
            for (const auto& cell : cells) {
                out += " " + cell + " |";
            }
        }
        out += "\n";
    };
    emit_row(header);
    if (format == ResultFormat::markdown) {
        out += "|";
        for (std::size_t i = 0; i < header.size(); ++i) {
            out += i < 3 ? " --- |" : " ---: |";
        }
        out += "\n";
    }
    for (const auto& r : records) {
        std::vector<std::string> cells = {r.data_size, std::to_string(r.window), std::to_string(r.dim)};
        for (const auto& score : r.scores) {
            cells.push_back(format_score(score));
        }
        emit_row(cells);
    }
    return out;
}

void emit_results(const std::vector<ResultRecord>& records, ResultFormat format,
                  const std::filesystem::path& path) {
    if (records.empty()) {
        throw ConfigError("no result records to emit");
    }
    io::write_file_atomic(path, render_results(records, format));
}

std::vector<ResultRecord> parse_results_csv(std::string_view text) {
    std::vector<ResultRecord> records;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line_no == 1) {
            continue;
        }
        std::vector<std::string_view> cells;
        std::size_t pos = 0;
        for (;;) {
            auto comma = line.find(',', pos);
            cells.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
            if (comma == std::string_view::npos) {
                break;
            }
            pos = comma + 1;
        }
        if (cells.size() != 3 + kResultColumns) {
            throw ParseError(line_no, "expected " + std::to_string(3 + kResultColumns) + " columns");
        }
        ResultRecord r;
        r.data_size = std::string(cells[0]);
        auto window = to_number<std::size_t>(cells[1]);
        auto dim = to_number<std::size_t>(cells[2]);
        if (!window || !dim) {
            throw ParseError(line_no, "bad window or dimension");
        }
        r.window = *window;
        r.dim = *dim;
        for (std::size_t c = 0; c < kResultColumns; ++c) {
            if (cells[3 + c] == "NA") {
                continue;
            }
            auto v = to_number<double>(cells[3 + c]);
            if (!v) {
                throw ParseError(line_no, "bad score '" + std::string(cells[3 + c]) + "'");
            }
            r.scores[c] = *v;
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::string render_counts(const std::vector<ResultRecord>& records) {
    std::string out = "data_size,window,dim,column,used,skipped,error\n";
    for (const auto& r : records) {
        for (std::size_t c = 0; c < kResultColumns; ++c) {
            std::string error = r.error;
            std::replace(error.begin(), error.end(), ',', ';');
            out += r.data_size + "," + std::to_string(r.window) + "," + std::to_string(r.dim) + "," +
                   std::string(kColumnNames[c]) + "," + std::to_string(r.used[c]) + "," +
                   std::to_string(r.skipped[c]) + "," + error + "\n";
        }
    }
    return out;
}

}  // namespace pmiembed
