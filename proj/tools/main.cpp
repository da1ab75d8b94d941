// liketally command line: batch orchestration of the campaign-analytics
// pipeline over the shared-library C API.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "liketally/liketally.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CliConfig {
    std::string tweets_path;
    std::string followers_path;
    std::string rules_path;
    std::string out_dir = ".";
    std::vector<std::string> candidates;
    std::string spec_path;
    int k = 5;
    double tol = 1e-8;
    int max_iter = 200;
    std::string effect_method = "discrete";
    std::string eval_model = "full";
    std::string format = "json";
    std::uint64_t seed = 0;
    bool dump_matrix = false;
};

struct CorpusDeleter {
    void operator()(lt_corpus* c) const { lt_corpus_free(c); }
};
struct RulesDeleter {
    void operator()(lt_rules* r) const { lt_rules_free(r); }
};
using CorpusPtr = std::unique_ptr<lt_corpus, CorpusDeleter>;
using RulesPtr = std::unique_ptr<lt_rules, RulesDeleter>;

[[noreturn]] void fail(lt_status status) {
    json err = {{"error",
                 {{"module", lt_last_error_module()},
                  {"code", lt_status_name(status)},
                  {"message", lt_last_error_message()}}}};
    std::cerr << err.dump() << "\n";
    std::exit(1);
}

[[noreturn]] void fail_usage(const std::string& message) {
    json err = {{"error", {{"module", "cli"}, {"code", "usage"}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
    std::exit(2);
}

void check(lt_status status) {
    if (status != LT_OK) fail(status);
}

// Owned C string from the API, auto-freed.
struct ApiString {
    char* data = nullptr;
    ~ApiString() { lt_string_free(data); }
    std::string str() const { return data ? data : ""; }
};

lt_options make_options(const CliConfig& config) {
    lt_options options;
    lt_options_init(&options);
    options.tol = config.tol;
    options.max_iter = config.max_iter;
    options.k = config.k;
    options.effect_method =
        config.effect_method == "beta-mu" ? LT_EFFECT_BETA_MU : LT_EFFECT_DISCRETE;
    options.eval_model = config.eval_model == "selected" ? LT_EVAL_SELECTED : LT_EVAL_FULL;
    options.format = config.format == "csv" ? LT_FORMAT_CSV : LT_FORMAT_JSON;
    return options;
}

// temp file + rename so readers never observe a partial artifact
void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path(), ec);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out) fail_usage("cannot write '" + tmp.string() + "'");
        out << content;
    }
    fs::rename(tmp, path, ec);
    if (ec) fail_usage("cannot rename '" + tmp.string() + "' to '" + path.string() + "'");
    std::cout << "wrote " << path.string() << "\n";
}

std::string sanitize(const std::string& id) {
    std::string out = id;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return out;
}

CorpusPtr open_corpus(const CliConfig& config) {
    if (config.tweets_path.empty() || config.followers_path.empty())
        fail_usage("--tweets and --followers are required for this command");
    lt_corpus* corpus = nullptr;
    check(lt_corpus_open(config.tweets_path.c_str(), config.followers_path.c_str(), &corpus));
    return CorpusPtr(corpus);
}

RulesPtr open_rules(const CliConfig& config) {
    lt_rules* rules = nullptr;
    if (config.rules_path.empty())
        check(lt_rules_default(&rules));
    else
        check(lt_rules_load(config.rules_path.c_str(), &rules));
    return RulesPtr(rules);
}

std::vector<std::string> selected_candidates(const lt_corpus* corpus, const CliConfig& config) {
    std::vector<std::string> all;
    for (size_t i = 0; i < lt_corpus_candidate_count(corpus); ++i)
        all.emplace_back(lt_corpus_candidate(corpus, i));
    if (config.candidates.empty()) return all;
    for (const std::string& id : config.candidates)
        if (std::find(all.begin(), all.end(), id) == all.end())
            fail_usage("candidate '" + id + "' does not appear in the corpus");
    std::vector<std::string> out = config.candidates;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Runs fn(candidate) -> artifact string for each candidate in parallel,
// returning results in candidate order.
template <typename Fn>
std::vector<std::pair<std::string, std::string>> per_candidate(
    const std::vector<std::string>& candidates, Fn&& fn) {
    std::vector<std::future<std::string>> futures;
    futures.reserve(candidates.size());
    for (const std::string& id : candidates)
        futures.push_back(std::async(std::launch::async, [&fn, id] { return fn(id); }));
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        out.emplace_back(candidates[i], futures[i].get());
    return out;
}

// Concatenates per-candidate CSVs, keeping a single header line.
std::string merge_csv(const std::vector<std::pair<std::string, std::string>>& parts) {
    std::string merged;
    for (const auto& [candidate, content] : parts) {
        std::size_t eol = content.find('\n');
        if (merged.empty())
            merged = content;
        else if (eol != std::string::npos)
            merged += content.substr(eol + 1);
    }
    return merged;
}

void maybe_dump_matrices(const CliConfig& config, const lt_corpus* corpus, const lt_rules* rules,
                         const std::vector<std::string>& candidates) {
    if (!config.dump_matrix) return;
    for (const std::string& id : candidates) {
        ApiString csv;
        check(lt_design_matrix_csv(corpus, rules, id.c_str(), &csv.data));
        write_file(fs::path(config.out_dir) / ("matrix_" + sanitize(id) + ".csv"), csv.str());
    }
}

int cmd_summarize(const CliConfig& config) {
    CorpusPtr corpus = open_corpus(config);
    std::vector<std::string> ids = selected_candidates(corpus.get(), config);
    lt_format format = config.format == "csv" ? LT_FORMAT_CSV : LT_FORMAT_JSON;
    auto parts = per_candidate(ids, [&](const std::string& id) {
        ApiString out;
        check(lt_summarize(corpus.get(), id.c_str(), format, &out.data));
        return out.str();
    });
    if (format == LT_FORMAT_CSV) {
        write_file(fs::path(config.out_dir) / "summary.csv", merge_csv(parts));
    } else {
        json arr = json::array();
        for (const auto& [id, content] : parts) arr.push_back(json::parse(content));
        write_file(fs::path(config.out_dir) / "summary.json", arr.dump(2) + "\n");
    }
    return 0;
}

int cmd_label(const CliConfig& config) {
    CorpusPtr corpus = open_corpus(config);
    RulesPtr rules = open_rules(config);
    std::vector<std::string> ids = selected_candidates(corpus.get(), config);
    lt_format format = config.format == "csv" ? LT_FORMAT_CSV : LT_FORMAT_JSON;
    auto parts = per_candidate(ids, [&](const std::string& id) {
        ApiString out;
        check(lt_topic_frequencies(corpus.get(), rules.get(), id.c_str(), format, &out.data));
        return out.str();
    });
    if (format == LT_FORMAT_CSV) {
        write_file(fs::path(config.out_dir) / "topic_frequencies.csv", merge_csv(parts));
    } else {
        json arr = json::array();
        for (const auto& [id, content] : parts) arr.push_back(json::parse(content));
        write_file(fs::path(config.out_dir) / "topic_frequencies.json", arr.dump(2) + "\n");
    }
    return 0;
}

int cmd_fit(const CliConfig& config) {
    CorpusPtr corpus = open_corpus(config);
    RulesPtr rules = open_rules(config);
    lt_options options = make_options(config);
    std::vector<std::string> ids = selected_candidates(corpus.get(), config);
    auto parts = per_candidate(ids, [&](const std::string& id) {
        ApiString out;
        check(lt_fit(corpus.get(), rules.get(), id.c_str(), &options, &out.data));
        return out.str();
    });
    if (options.format == LT_FORMAT_CSV) {
        write_file(fs::path(config.out_dir) / "fit.csv", merge_csv(parts));
    } else {
        for (const auto& [id, content] : parts)
            write_file(fs::path(config.out_dir) / ("fit_" + sanitize(id) + ".json"),
                       content + "\n");
    }
    maybe_dump_matrices(config, corpus.get(), rules.get(), ids);
    return 0;
}

int cmd_select(const CliConfig& config) {
    CorpusPtr corpus = open_corpus(config);
    RulesPtr rules = open_rules(config);
    lt_options options = make_options(config);
    std::vector<std::string> ids = selected_candidates(corpus.get(), config);
    auto parts = per_candidate(ids, [&](const std::string& id) {
        ApiString out;
        check(lt_select(corpus.get(), rules.get(), id.c_str(), &options, &out.data));
        return out.str();
    });
    if (options.format == LT_FORMAT_CSV) {
        write_file(fs::path(config.out_dir) / "select.csv", merge_csv(parts));
    } else {
        for (const auto& [id, content] : parts)
            write_file(fs::path(config.out_dir) / ("select_" + sanitize(id) + ".json"),
                       content + "\n");
    }
    return 0;
}

int cmd_effects(const CliConfig& config) {
    CorpusPtr corpus = open_corpus(config);
    RulesPtr rules = open_rules(config);
    lt_options options = make_options(config);
    std::vector<std::string> ids = selected_candidates(corpus.get(), config);
    auto parts = per_candidate(ids, [&](const std::string& id) {
        ApiString out;
        check(lt_effects(corpus.get(), rules.get(), id.c_str(), &options, &out.data));
        return out.str();
    });
    const char* ext = options.format == LT_FORMAT_CSV ? ".csv" : ".json";
    for (const auto& [id, content] : parts)
        write_file(fs::path(config.out_dir) / ("effects_" + sanitize(id) + ext),
                   options.format == LT_FORMAT_CSV ? content : content + "\n");
    maybe_dump_matrices(config, corpus.get(), rules.get(), ids);
    return 0;
}

int cmd_rank(const CliConfig& config) {
    CorpusPtr corpus = open_corpus(config);
    RulesPtr rules = open_rules(config);
    lt_options options = make_options(config);
    std::vector<std::string> ids = selected_candidates(corpus.get(), config);
    std::vector<const char*> id_ptrs;
    for (const std::string& id : ids) id_ptrs.push_back(id.c_str());
    ApiString out;
    check(lt_rank(corpus.get(), rules.get(), id_ptrs.data(), id_ptrs.size(), &options, &out.data));
    const char* name = options.format == LT_FORMAT_CSV ? "rank.csv" : "rank.json";
    write_file(fs::path(config.out_dir) / name,
               options.format == LT_FORMAT_CSV ? out.str() : out.str() + "\n");
    maybe_dump_matrices(config, corpus.get(), rules.get(), ids);
    return 0;
}

int cmd_plotdata(const CliConfig& config) {
    CorpusPtr corpus = open_corpus(config);
    check(lt_plot_data_write(corpus.get(), config.out_dir.c_str()));
    std::cout << "wrote plot data into " << config.out_dir << "\n";
    return 0;
}

// A small demonstration spec; real runs pass --spec.
const char* kDemoSpec = R"({
  "candidate": "synth",
  "n": 2000,
  "beta": [1.0, 0.4, 0.01, -0.2, 0.1, 0.5, -0.3, 0.25],
  "alpha": 0.5,
  "topic_prevalences": [0.3, 0.2, 0.25],
  "seed": 20160918
})";

int cmd_simulate(const CliConfig& config) {
    std::string spec = kDemoSpec;
    if (!config.spec_path.empty()) {
        std::ifstream in(config.spec_path);
        if (!in) fail_usage("cannot open spec '" + config.spec_path + "'");
        std::ostringstream buffer;
        buffer << in.rdbuf();
        spec = buffer.str();
    }
    check(lt_simulate(spec.c_str(), config.seed, config.out_dir.c_str()));
    std::cout << "wrote synthetic corpus into " << config.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"liketally: tweet topic labeling, negative binomial fits, "
                 "stepwise topic selection and tactic ranking"};
    app.require_subcommand(1);

    CliConfig config;
    auto add_common = [&](CLI::App* cmd, bool needs_corpus) {
        if (needs_corpus) {
            cmd->add_option("--tweets", config.tweets_path, "tweets JSON-lines file");
            cmd->add_option("--followers", config.followers_path, "followers CSV file");
        }
        cmd->add_option("--out", config.out_dir, "output directory")->capture_default_str();
        cmd->add_option("--format", config.format, "json|csv")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
    };
    auto add_rules = [&](CLI::App* cmd) {
        cmd->add_option("--rules", config.rules_path, "topic rule JSON (default: built-in)");
    };
    auto add_candidates = [&](CLI::App* cmd) {
        cmd->add_option("--candidate", config.candidates, "restrict to candidate (repeatable)");
    };
    auto add_fit_options = [&](CLI::App* cmd) {
        cmd->add_option("--tol", config.tol, "gradient tolerance")->capture_default_str();
        cmd->add_option("--max-iter", config.max_iter, "iteration cap")->capture_default_str();
        cmd->add_flag("--dump-matrix", config.dump_matrix, "also write matrix_<candidate>.csv");
    };

    CLI::App* summarize = app.add_subcommand("summarize", "per-candidate likes statistics");
    add_common(summarize, true);
    add_candidates(summarize);

    CLI::App* label = app.add_subcommand("label", "topic frequencies per candidate");
    add_common(label, true);
    add_rules(label);
    add_candidates(label);

    CLI::App* fit = app.add_subcommand("fit", "full-model negative binomial fits");
    add_common(fit, true);
    add_rules(fit);
    add_candidates(fit);
    add_fit_options(fit);

    CLI::App* select = app.add_subcommand("select", "forward-stepwise topic selection");
    add_common(select, true);
    add_rules(select);
    add_candidates(select);
    add_fit_options(select);
    select->add_option("--k", config.k, "topics to select")->capture_default_str();

    CLI::App* effects = app.add_subcommand("effects", "marginal effects with 95% intervals");
    add_common(effects, true);
    add_rules(effects);
    add_candidates(effects);
    add_fit_options(effects);
    effects->add_option("--k", config.k, "topics when --eval-model selected")
        ->capture_default_str();
    effects->add_option("--effect-method", config.effect_method, "discrete|beta-mu")
        ->check(CLI::IsMember({"discrete", "beta-mu"}))
        ->capture_default_str();
    effects->add_option("--eval-model", config.eval_model, "full|selected")
        ->check(CLI::IsMember({"full", "selected"}))
        ->capture_default_str();

    CLI::App* rank = app.add_subcommand("rank", "tactic-effectiveness scores and ranking");
    add_common(rank, true);
    add_rules(rank);
    add_candidates(rank);
    add_fit_options(rank);
    rank->add_option("--k", config.k, "topics when --eval-model selected")->capture_default_str();
    rank->add_option("--effect-method", config.effect_method, "discrete|beta-mu")
        ->check(CLI::IsMember({"discrete", "beta-mu"}))
        ->capture_default_str();
    rank->add_option("--eval-model", config.eval_model, "full|selected")
        ->check(CLI::IsMember({"full", "selected"}))
        ->capture_default_str();

    CLI::App* plotdata = app.add_subcommand("plotdata", "log-likes and follower growth data");
    add_common(plotdata, true);

    CLI::App* simulate = app.add_subcommand("simulate", "synthetic corpus with known parameters");
    add_common(simulate, false);
    simulate->add_option("--spec", config.spec_path, "synth spec JSON file");
    simulate->add_option("--seed", config.seed, "seed override (nonzero)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (summarize->parsed()) return cmd_summarize(config);
        if (label->parsed()) return cmd_label(config);
        if (fit->parsed()) return cmd_fit(config);
        if (select->parsed()) return cmd_select(config);
        if (effects->parsed()) return cmd_effects(config);
        if (rank->parsed()) return cmd_rank(config);
        if (plotdata->parsed()) return cmd_plotdata(config);
        if (simulate->parsed()) return cmd_simulate(config);
    } catch (const std::exception& e) {
        fail_usage(e.what());
    }
    return 2;
}
