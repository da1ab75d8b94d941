#include "liketally/liketally.h"

#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "errors.hpp"
#include "pipeline.hpp"
#include "synth.hpp"

using namespace liketally;

namespace {

thread_local std::string g_last_error_message;
thread_local std::string g_last_error_module;

lt_status status_of(errc code) {
    switch (code) {
        case errc::ok: return LT_OK;
        case errc::io: return LT_E_IO;
        case errc::parse: return LT_E_PARSE;
        case errc::schema: return LT_E_SCHEMA;
        case errc::validation: return LT_E_VALIDATION;
        case errc::config: return LT_E_CONFIG;
        case errc::missing_series: return LT_E_MISSING_SERIES;
        case errc::empty_group: return LT_E_EMPTY_GROUP;
        case errc::empty_matrix: return LT_E_EMPTY_MATRIX;
        case errc::singular_design: return LT_E_SINGULAR_DESIGN;
        case errc::nonconcave_at_optimum: return LT_E_NONCONCAVE;
        case errc::bound: return LT_E_BOUND;
        case errc::unknown_topic: return LT_E_UNKNOWN_TOPIC;
        case errc::no_topical_tweets: return LT_E_NO_TOPICAL_TWEETS;
        case errc::degenerate_score: return LT_E_DEGENERATE_SCORE;
        case errc::incompatible_fits: return LT_E_INCOMPATIBLE_FITS;
        case errc::domain: return LT_E_DOMAIN;
        case errc::overflow: return LT_E_OVERFLOW;
        case errc::invalid_argument: return LT_E_INVALID_ARGUMENT;
        case errc::internal: return LT_E_INTERNAL;
    }
    return LT_E_INTERNAL;
}

template <typename Fn>
lt_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error_message.clear();
        g_last_error_module.clear();
        return LT_OK;
    } catch (const Error& e) {
        g_last_error_message = e.what();
        g_last_error_module = e.module();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error_message = e.what();
        g_last_error_module = "internal";
        return LT_E_INTERNAL;
    } catch (...) {
        g_last_error_message = "unknown error";
        g_last_error_module = "internal";
        return LT_E_INTERNAL;
    }
}

char* copy_string(const std::string& text) {
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

void require(bool condition, const char* what) {
    if (!condition) raise(errc::invalid_argument, "capi", what);
}

AnalysisOptions analysis_options(const lt_options* options) {
    AnalysisOptions out;
    if (!options) return out;
    if (options->tol > 0) out.fit.tol = options->tol;
    if (options->max_iter > 0) out.fit.max_iter = options->max_iter;
    out.k = options->k;
    out.effect_method = options->effect_method == LT_EFFECT_BETA_MU ? EffectMethod::beta_mu
                                                                    : EffectMethod::discrete_change;
    out.eval_selected_model = options->eval_model == LT_EVAL_SELECTED;
    return out;
}

lt_format format_of(const lt_options* options) {
    return options ? options->format : LT_FORMAT_JSON;
}

}  // namespace

struct lt_corpus {
    Corpus data;
    std::vector<std::string> candidates;
};

struct lt_rules {
    RuleSet rules;
};

void lt_options_init(lt_options* options) {
    if (!options) return;
    options->tol = 1e-8;
    options->max_iter = 200;
    options->k = 5;
    options->effect_method = LT_EFFECT_DISCRETE;
    options->eval_model = LT_EVAL_FULL;
    options->format = LT_FORMAT_JSON;
}

const char* lt_status_name(lt_status status) {
    switch (status) {
        case LT_OK: return "ok";
        case LT_E_IO: return "io";
        case LT_E_PARSE: return "parse";
        case LT_E_SCHEMA: return "schema";
        case LT_E_VALIDATION: return "validation";
        case LT_E_CONFIG: return "config";
        case LT_E_MISSING_SERIES: return "missing_series";
        case LT_E_EMPTY_GROUP: return "empty_group";
        case LT_E_EMPTY_MATRIX: return "empty_matrix";
        case LT_E_SINGULAR_DESIGN: return "singular_design";
        case LT_E_NONCONCAVE: return "nonconcave_at_optimum";
        case LT_E_BOUND: return "bound";
        case LT_E_UNKNOWN_TOPIC: return "unknown_topic";
        case LT_E_NO_TOPICAL_TWEETS: return "no_topical_tweets";
        case LT_E_DEGENERATE_SCORE: return "degenerate_score";
        case LT_E_INCOMPATIBLE_FITS: return "incompatible_fits";
        case LT_E_DOMAIN: return "domain";
        case LT_E_OVERFLOW: return "overflow";
        case LT_E_INVALID_ARGUMENT: return "invalid_argument";
        case LT_E_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* lt_last_error_message(void) { return g_last_error_message.c_str(); }
const char* lt_last_error_module(void) { return g_last_error_module.c_str(); }

void lt_string_free(char* text) { delete[] text; }

lt_status lt_corpus_open(const char* tweets_path, const char* followers_path, lt_corpus** out) {
    return guarded([&] {
        require(tweets_path && followers_path && out, "null argument to lt_corpus_open");
        auto corpus = std::make_unique<lt_corpus>();
        corpus->data = load_corpus(tweets_path, followers_path);
        corpus->candidates = candidates_of(corpus->data.tweets);
        *out = corpus.release();
    });
}

void lt_corpus_free(lt_corpus* corpus) { delete corpus; }

size_t lt_corpus_tweet_count(const lt_corpus* corpus) {
    return corpus ? corpus->data.tweets.size() : 0;
}

size_t lt_corpus_candidate_count(const lt_corpus* corpus) {
    return corpus ? corpus->candidates.size() : 0;
}

const char* lt_corpus_candidate(const lt_corpus* corpus, size_t index) {
    if (!corpus || index >= corpus->candidates.size()) return nullptr;
    return corpus->candidates[index].c_str();
}

lt_status lt_rules_load(const char* path, lt_rules** out) {
    return guarded([&] {
        require(path && out, "null argument to lt_rules_load");
        *out = new lt_rules{RuleSet::load(path)};
    });
}

lt_status lt_rules_default(lt_rules** out) {
    return guarded([&] {
        require(out != nullptr, "null argument to lt_rules_default");
        *out = new lt_rules{RuleSet::default_rules()};
    });
}

void lt_rules_free(lt_rules* rules) { delete rules; }

size_t lt_rules_figure_count(const lt_rules* rules) {
    return rules ? rules->rules.figure_count() : 0;
}

size_t lt_rules_issue_count(const lt_rules* rules) { return rules ? rules->rules.issue_count() : 0; }

lt_status lt_summarize(const lt_corpus* corpus, const char* candidate, lt_format format,
                       char** out) {
    return guarded([&] {
        require(corpus && candidate && out, "null argument to lt_summarize");
        LikesSummary summary = summarize_likes(corpus->data.tweets, candidate);
        *out = copy_string(format == LT_FORMAT_CSV ? report::summaries_csv({summary})
                                                   : report::summary_to_json(summary).dump(2));
    });
}

lt_status lt_topic_frequencies(const lt_corpus* corpus, const lt_rules* rules,
                               const char* candidate, lt_format format, char** out) {
    return guarded([&] {
        require(corpus && rules && candidate && out, "null argument to lt_topic_frequencies");
        std::vector<TopicLabels> labels = label_tweets(corpus->data.tweets, rules->rules);
        auto counts = topic_frequencies(corpus->data.tweets, labels, rules->rules, candidate);
        *out = copy_string(format == LT_FORMAT_CSV
                               ? report::frequencies_csv(candidate, counts)
                               : report::frequencies_to_json(candidate, counts).dump(2));
    });
}

lt_status lt_fit(const lt_corpus* corpus, const lt_rules* rules, const char* candidate,
                 const lt_options* options, char** out) {
    return guarded([&] {
        require(corpus && rules && candidate && out, "null argument to lt_fit");
        AnalysisOptions opts = analysis_options(options);
        std::vector<TopicLabels> labels = label_tweets(corpus->data.tweets, rules->rules);
        DesignMatrix design = build_design_matrix(corpus->data.tweets, labels,
                                                  corpus->data.followers, candidate, rules->rules);
        FitResult fit = fit_negbin(design, opts.fit);
        *out = copy_string(format_of(options) == LT_FORMAT_CSV
                               ? report::fit_csv(fit)
                               : report::fit_to_json(fit).dump(2));
    });
}

lt_status lt_select(const lt_corpus* corpus, const lt_rules* rules, const char* candidate,
                    const lt_options* options, char** out) {
    return guarded([&] {
        require(corpus && rules && candidate && out, "null argument to lt_select");
        AnalysisOptions opts = analysis_options(options);
        std::vector<TopicLabels> labels = label_tweets(corpus->data.tweets, rules->rules);
        DesignMatrix design = build_design_matrix(corpus->data.tweets, labels,
                                                  corpus->data.followers, candidate, rules->rules);
        SelectionTrace trace = forward_stepwise(design, opts.k, opts.fit);
        *out = copy_string(format_of(options) == LT_FORMAT_CSV
                               ? report::trace_csv(trace)
                               : report::trace_to_json(trace).dump(2));
    });
}

lt_status lt_effects(const lt_corpus* corpus, const lt_rules* rules, const char* candidate,
                     const lt_options* options, char** out) {
    return guarded([&] {
        require(corpus && rules && candidate && out, "null argument to lt_effects");
        AnalysisOptions opts = analysis_options(options);
        CandidateAnalysis analysis = analyze_candidate(corpus->data, rules->rules, candidate, opts);
        std::vector<MarginalEffect> effects;
        effects.reserve(analysis.report.effects.size());
        for (const auto& [topic, effect] : analysis.report.effects) effects.push_back(effect);
        *out = copy_string(format_of(options) == LT_FORMAT_CSV
                               ? report::effects_csv(effects)
                               : report::effects_to_json(candidate, effects).dump(2));
    });
}

lt_status lt_rank(const lt_corpus* corpus, const lt_rules* rules, const char* const* candidates,
                  size_t candidate_count, const lt_options* options, char** out) {
    return guarded([&] {
        require(corpus && rules && out, "null argument to lt_rank");
        require(candidate_count == 0 || candidates != nullptr,
                "candidate list is null but count is nonzero");
        std::vector<std::string> filter;
        for (size_t i = 0; i < candidate_count; ++i) {
            require(candidates[i] != nullptr, "null candidate in list");
            filter.emplace_back(candidates[i]);
        }
        AnalysisOptions opts = analysis_options(options);
        std::vector<TacticReport> reports =
            analyze_and_rank(corpus->data, rules->rules, filter, opts);
        if (format_of(options) == LT_FORMAT_CSV) {
            *out = copy_string(report::rank_csv(reports));
        } else {
            nlohmann::json arr = nlohmann::json::array();
            for (const TacticReport& r : reports) arr.push_back(report::tactic_report_to_json(r));
            *out = copy_string(arr.dump(2));
        }
    });
}

lt_status lt_design_matrix_csv(const lt_corpus* corpus, const lt_rules* rules,
                               const char* candidate, char** out) {
    return guarded([&] {
        require(corpus && rules && candidate && out, "null argument to lt_design_matrix_csv");
        std::vector<TopicLabels> labels = label_tweets(corpus->data.tweets, rules->rules);
        DesignMatrix design = build_design_matrix(corpus->data.tweets, labels,
                                                  corpus->data.followers, candidate, rules->rules);
        *out = copy_string(design.to_csv());
    });
}

lt_status lt_plot_data_write(const lt_corpus* corpus, const char* out_dir) {
    return guarded([&] {
        require(corpus && out_dir, "null argument to lt_plot_data_write");
        emit_plot_data(corpus->data.tweets, corpus->data.followers, out_dir);
    });
}

lt_status lt_simulate(const char* spec_json, uint64_t seed_override, const char* out_dir) {
    return guarded([&] {
        require(spec_json && out_dir, "null argument to lt_simulate");
        SynthSpec spec = SynthSpec::from_json(spec_json);
        if (seed_override != 0) spec.seed = seed_override;
        SynthCorpus corpus = generate(spec);
        emit_corpus(spec, corpus, out_dir);
    });
}
