#include "cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "pmiembed/cooccurrence.hpp"
#include "pmiembed/embedding_store.hpp"
#include "pmiembed/error.hpp"
#include "pmiembed/eval.hpp"
#include "pmiembed/io.hpp"
#include "pmiembed/sweep.hpp"
#include "pmiembed/tokenizer.hpp"
#include "pmiembed/trainer.hpp"
#include "pmiembed/vocabulary.hpp"

#ifndef PMIEMBED_VERSION
#define PMIEMBED_VERSION "0.0.0"
#endif

namespace pmiembed::cli {
namespace {

struct GlobalOptions {
    int verbosity = 0;
    std::size_t workers = 1;
    std::uint64_t seed = 1;
    bool seed_given = false;
    bool workers_given = false;
    bool deterministic = false;

    std::size_t effective_workers() const { return deterministic ? 1 : workers; }
};

std::string version_text() {
    return std::string("pmi-embed ") + PMIEMBED_VERSION + "\n" +
           "co-occurrence format PMCO v" + std::to_string(kCooccurrenceFormatVersion) + "\n" +
           "model format PMEM v" + std::to_string(kModelFormatVersion) + "\n";
}

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return std::move(ss).str();
    }
    return io::read_text_file(path);
}

void write_output(const std::string& path, const std::string& data, std::ostream& out) {
    if (path == "-") {
        out << data;
    } else {
        io::write_file_atomic(path, data);
    }
}

struct BuildVocabArgs {
    std::string input;
    std::size_t max_size = std::size_t{1} << 20;
    std::size_t shard_size = kDefaultShardSize;
    std::size_t min_count = 1;
    std::string output;
};

struct CountArgs {
    std::string input;
    std::string vocab;
    std::size_t window = 5;
    std::string weighting = "uniform";
    std::size_t shard_size = kDefaultShardSize;
    std::string output;
};

struct TruncateArgs {
    std::size_t tokens = 0;
    std::string input = "-";
    std::string output = "-";
};

struct TrainArgs {
    std::string cooc;
    std::string vocab;
    TrainConfig config;
    std::string optimizer = "adagrad";
    std::optional<double> init_scale;
    std::string output;
};

struct ExportArgs {
    std::string model;
    std::string mode = "row+col";
    std::string format = "text";
    std::string output;
};

struct EvalArgs {
    std::string model;
    std::string mode = "row+col";
    std::string task;
    std::vector<std::string> datasets;
    std::string report = "text";
};

struct SweepArgs {
    std::string config;
    std::string output_dir;
    std::string preset = "desk";
    // Flag overrides, keyed like the config file.
    std::map<std::string, std::string> overrides;
    std::vector<std::string> corpora;
};

void run_build_vocab(const BuildVocabArgs& a, const GlobalOptions& g, std::ostream& err) {
    const auto stream = tokenize(read_input(a.input));
    const auto vocab = build_vocabulary(stream, a.max_size, a.shard_size, a.min_count);
    save_vocabulary(vocab, a.output);
    if (g.verbosity > 0) {
        err << "vocabulary: " << vocab.size() << " words from " << stream.token_count << " tokens\n";
    }
}

void run_count(const CountArgs& a, const GlobalOptions& g, std::ostream& err) {
    if (a.window < 1) {
        throw ConfigError("--window must be at least 1");
    }
    const auto weighting = parse_weighting(a.weighting);
    const auto vocab = load_vocabulary(a.vocab, a.shard_size);
    const auto stream = tokenize(read_input(a.input));
    const auto cooc = count_cooccurrences(stream, vocab, a.window, weighting, g.effective_workers());
    save_cooccurrences(cooc, a.output);
    if (g.verbosity > 0) {
        err << "co-occurrences: " << cooc.entries().size() << " non-zero cells, |D| = " << cooc.total() << "\n";
    }
}

void run_truncate(const TruncateArgs& a, std::ostream& out) {
    if (a.tokens < 1) {
        throw ConfigError("--tokens must be at least 1");
    }
    const auto stream = truncate_corpus(tokenize(read_input(a.input)), a.tokens);
    write_output(a.output, render_tokens(stream), out);
}

void run_train(TrainArgs a, const GlobalOptions& g, std::ostream& err) {
    const auto cooc = load_cooccurrences(a.cooc);
    const auto vocab = load_vocabulary(a.vocab, cooc.shard_size());
    a.config.optimizer = parse_optimizer(a.optimizer);
    a.config.init_scale = a.init_scale;
    a.config.seed = g.seed;
    a.config.workers = g.effective_workers();
    a.config.shard_size = cooc.shard_size();
    const auto result = train(cooc, vocab, a.config);
    save_binary(result.model, a.output);
    if (g.verbosity > 0) {
        for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
            err << "epoch " << e + 1 << " loss " << result.loss_history[e] << "\n";
        }
    }
}

void run_export(const ExportArgs& a) {
    const auto mode = parse_combine_mode(a.mode);
    const auto model = load_binary(a.model);
    if (a.format == "text") {
        save_text(make_table(model, mode), a.output);
    } else if (a.format == "binary") {
        // Combined vectors take the row slot so `--mode row` reads them back.
        EmbeddingModel exported = model;
        exported.row_vectors = combine_embeddings(model, mode);
        save_binary(exported, a.output);
    } else {
        throw ConfigError("unknown export format '" + a.format + "' (expected text|binary)");
    }
}

void run_eval(const EvalArgs& a, std::ostream& out) {
    const auto mode = parse_combine_mode(a.mode);
    if (a.task != "similarity" && a.task != "analogy") {
        throw ConfigError("unknown task '" + a.task + "' (expected similarity|analogy)");
    }
    if (a.report != "csv" && a.report != "text") {
        throw ConfigError("unknown report format '" + a.report + "' (expected csv|text)");
    }
    const auto table = load_table(a.model, mode);

    struct Row {
        std::string dataset;
        std::optional<double> score;
        std::size_t used = 0;
        std::size_t skipped = 0;
    };
    std::vector<Row> rows;
    for (const auto& path : a.datasets) {
        Row row;
        try {
            EvalReport report;
            if (a.task == "similarity") {
                report = evaluate_similarity(table, load_similarity_dataset(path));
            } else {
                report = evaluate_analogy(table, load_analogy_dataset(path));
            }
            row = {report.dataset, report.score, report.used, report.skipped_oov};
        } catch (const InsufficientDataError& e) {
            row = {std::filesystem::path(path).stem().string(), std::nullopt, 0, e.skipped_oov()};
        }
        rows.push_back(std::move(row));
    }

    auto score_text = [](const std::optional<double>& s) {
        if (!s) {
            return std::string("NA");
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", *s);
        return std::string(buf);
    };
    if (a.report == "csv") {
        out << "dataset,score,used,skipped\n";
        for (const auto& r : rows) {
            out << r.dataset << "," << score_text(r.score) << "," << r.used << "," << r.skipped << "\n";
        }
    } else {
        for (const auto& r : rows) {
            out << r.dataset << ": " << (a.task == "similarity" ? "rho " : "accuracy ")
                << score_text(r.score) << " (" << r.used << " used, " << r.skipped << " skipped)\n";
        }
    }
}

void run_sweep_command(const SweepArgs& a, const GlobalOptions& g, std::ostream& err) {
    SweepGrid grid;
    if (a.preset == "paper") {
        grid = paper_preset();
    } else if (a.preset == "desk") {
        grid = desk_preset();
    } else {
        throw ConfigError("unknown preset '" + a.preset + "' (expected paper|desk)");
    }
    if (!a.config.empty()) {
        const std::filesystem::path config_path(a.config);
        apply_settings(grid, parse_settings(io::read_file(config_path), config_path.parent_path()));
    }
    Settings overrides;
    for (const auto& corpus : a.corpora) {
        overrides.emplace_back("corpus", corpus);
    }
    for (const auto& [key, value] : a.overrides) {
        overrides.emplace_back(key, value);
    }
    if (g.seed_given) {
        overrides.emplace_back("seed", std::to_string(g.seed));
    }
    if (g.workers_given) {
        overrides.emplace_back("workers", std::to_string(g.workers));
    }
    apply_settings(grid, overrides);
    if (g.deterministic) {
        grid.train.workers = 1;
    }
    validate(grid);

    const std::filesystem::path dir(a.output_dir);
    std::filesystem::create_directories(dir);
    SweepLog log;
    if (g.verbosity > 0) {
        log = [&err](const std::string& msg) { err << msg << "\n"; };
    }
    const auto records = run_sweep(grid, log);
    emit_results(records, ResultFormat::csv, dir / "results.csv");
    emit_results(records, ResultFormat::markdown, dir / "results.md");
    io::write_file_atomic(dir / "counts.csv", render_counts(records));
    const auto plots = emit_trend_plots(records, dir / "plots" / "");
    for (const auto& warning : plots.warnings) {
        err << "warning: " << warning << "\n";
    }
    for (const auto& r : records) {
        if (!r.error.empty()) {
            err << "warning: cell " << r.data_size << "/w" << r.window << "/d" << r.dim
                << " failed: " << r.error << "\n";
        }
    }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Word embeddings from sharded PMI factorization: counting, training, "
                 "evaluation and hyper-parameter sweeps.",
                 "pmi-embed"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", version_text());

    GlobalOptions g;
    app.add_flag("-v,--verbose", g.verbosity, "Progress output on stderr (repeat for more)");
    app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "Base random seed");
    app.add_flag("--deterministic", g.deterministic, "Force a single worker");

    BuildVocabArgs vocab_args;
    auto* build_vocab = app.add_subcommand("build-vocab", "Build a frequency-ranked vocabulary");
    build_vocab->add_option("--input", vocab_args.input, "Raw text, one document per line ('-' for stdin)")->required();
    build_vocab->add_option("--max-size", vocab_args.max_size, "Maximum vocabulary size")->capture_default_str();
    build_vocab->add_option("--shard-size", vocab_args.shard_size, "Vocabulary size is rounded down to a multiple of this")->capture_default_str();
    build_vocab->add_option("--min-count", vocab_args.min_count, "Minimum word frequency")->capture_default_str();
    build_vocab->add_option("--output", vocab_args.output, "Vocabulary file")->required();

    CountArgs count_args;
    auto* count = app.add_subcommand("count", "Count windowed co-occurrences");
    count->add_option("--input", count_args.input, "Raw text, one document per line ('-' for stdin)")->required();
    count->add_option("--vocab", count_args.vocab, "Vocabulary file")->required();
    count->add_option("--window", count_args.window, "Context window (positions on each side)")->capture_default_str();
    count->add_option("--weighting", count_args.weighting, "uniform|harmonic")->capture_default_str();
    count->add_option("--shard-size", count_args.shard_size, "Shard size the vocabulary was built with")->capture_default_str();
    count->add_option("--output", count_args.output, "Co-occurrence file")->required();

    TruncateArgs truncate_args;
    auto* truncate = app.add_subcommand("truncate", "Keep the first N tokens of a corpus");
    truncate->add_option("--tokens", truncate_args.tokens, "Token budget")->required();
    truncate->add_option("--input", truncate_args.input, "Raw text ('-' for stdin)")->capture_default_str();
    truncate->add_option("--output", truncate_args.output, "Tokenized text ('-' for stdout)")->capture_default_str();

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train row and column embeddings");
    train_cmd->add_option("--cooc", train_args.cooc, "Co-occurrence file")->required();
    train_cmd->add_option("--vocab", train_args.vocab, "Vocabulary file")->required();
    train_cmd->add_option("--dim", train_args.config.dim, "Embedding dimension")->capture_default_str();
    train_cmd->add_option("--epochs", train_args.config.epochs, "Passes over all shards")->capture_default_str();
    train_cmd->add_option("--lr", train_args.config.learning_rate, "Learning rate")->capture_default_str();
    train_cmd->add_option("--optimizer", train_args.optimizer, "sgd|adagrad")->capture_default_str();
    train_cmd->add_option("--weight-exponent", train_args.config.weight_exponent, "Confidence weight exponent")->capture_default_str();
    train_cmd->add_option("--weight-scale", train_args.config.weight_scale, "Confidence weight scale")->capture_default_str();
    train_cmd->add_option("--init-scale", train_args.init_scale, "Uniform init half-width (default 0.1/sqrt(dim))");
    train_cmd->add_option("--output", train_args.output, "Model file")->required();

    ExportArgs export_args;
    auto* export_cmd = app.add_subcommand("export", "Export word vectors from a model");
    export_cmd->add_option("--model", export_args.model, "Model file")->required();
    export_cmd->add_option("--mode", export_args.mode, "row|row+col")->capture_default_str();
    export_cmd->add_option("--format", export_args.format, "text|binary")->capture_default_str();
    export_cmd->add_option("--output", export_args.output, "Output file")->required();

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "Score vectors on similarity or analogy datasets");
    eval_cmd->add_option("--model", eval_args.model, "Model file or text vector table")->required();
    eval_cmd->add_option("--mode", eval_args.mode, "row|row+col (binary models only)")->capture_default_str();
    eval_cmd->add_option("--task", eval_args.task, "similarity|analogy")->required();
    eval_cmd->add_option("--dataset", eval_args.datasets, "Dataset file (repeatable)")->required();
    eval_cmd->add_option("--report", eval_args.report, "csv|text")->capture_default_str();

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Run a corpus x window x dimension grid");
    sweep->add_option("--config", sweep_args.config, "Flat key = value settings file");
    sweep->add_option("--output-dir", sweep_args.output_dir, "Directory for results and plots")->required();
    sweep->add_option("--preset", sweep_args.preset, "paper|desk")->capture_default_str();
    sweep->add_option("--corpus", sweep_args.corpora, "label=path:token_target[:max_vocab] (repeatable)");
    const std::vector<std::string> sweep_keys = {
        "windows", "dims", "max-vocab", "shard-size", "min-count", "weighting", "mode", "epochs",
        "learning-rate", "optimizer", "weight-exponent", "weight-scale", "init-scale"};
    std::map<std::string, std::string> sweep_values;
    for (const auto& key : sweep_keys) {
        sweep->add_option("--" + key, sweep_values[key], "Overrides '" + key + "' from the config");
    }
    for (auto column : kColumnNames) {
        std::string key = "dataset." + std::string(column);
        std::string flag = "--dataset-" + std::string(column);
        std::replace(flag.begin(), flag.end(), '_', '-');
        sweep->add_option(flag, sweep_values[key], "Dataset file for the " + std::string(column) + " column");
    }

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }
    g.seed_given = app.count("--seed") > 0;
    g.workers_given = app.count("--workers") > 0;

    try {
        if (build_vocab->parsed()) {
            run_build_vocab(vocab_args, g, err);
        } else if (count->parsed()) {
            run_count(count_args, g, err);
        } else if (truncate->parsed()) {
            run_truncate(truncate_args, out);
        } else if (train_cmd->parsed()) {
            run_train(train_args, g, err);
        } else if (export_cmd->parsed()) {
            run_export(export_args);
        } else if (eval_cmd->parsed()) {
            run_eval(eval_args, out);
        } else if (sweep->parsed()) {
            for (const auto& key : sweep_keys) {
                if (sweep->count("--" + key) > 0) {
                    sweep_args.overrides[key] = sweep_values[key];
                }
            }
            for (auto column : kColumnNames) {
                std::string key = "dataset." + std::string(column);
                std::string flag = "--dataset-" + std::string(column);
                std::replace(flag.begin(), flag.end(), '_', '-');
                if (sweep->count(flag) > 0) {
                    sweep_args.overrides[key] = sweep_values[key];
                }
            }
            run_sweep_command(sweep_args, g, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace pmiembed::cli
