/*
 * liketally — campaign-analytics C API.
 *
 * The library labels political tweets with figure/issue topics, fits
 * negative binomial regressions of likes on topics and controls, selects
 * salient topics by forward-stepwise search, and scores each candidate's
 * tactic. All state lives behind opaque handles; analysis calls return
 * heap-allocated artifact strings (JSON or CSV) released with
 * lt_string_free. Handles are immutable after creation and safe to share
 * across threads.
 *
 * Every fallible call returns lt_status; on failure lt_last_error_message
 * and lt_last_error_module describe the thread's most recent error.
 */
#ifndef LIKETALLY_H
#define LIKETALLY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LT_API __declspec(dllexport)
#else
#define LT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lt_status {
    LT_OK = 0,
    LT_E_IO,
    LT_E_PARSE,
    LT_E_SCHEMA,
    LT_E_VALIDATION,
    LT_E_CONFIG,
    LT_E_MISSING_SERIES,
    LT_E_EMPTY_GROUP,
    LT_E_EMPTY_MATRIX,
    LT_E_SINGULAR_DESIGN,
    LT_E_NONCONCAVE,
    LT_E_BOUND,
    LT_E_UNKNOWN_TOPIC,
    LT_E_NO_TOPICAL_TWEETS,
    LT_E_DEGENERATE_SCORE,
    LT_E_INCOMPATIBLE_FITS,
    LT_E_DOMAIN,
    LT_E_OVERFLOW,
    LT_E_INVALID_ARGUMENT,
    LT_E_INTERNAL
} lt_status;

typedef enum lt_format { LT_FORMAT_JSON = 0, LT_FORMAT_CSV = 1 } lt_format;

typedef enum lt_effect_method {
    LT_EFFECT_DISCRETE = 0, /* topic 0 -> 1 at covariate means */
    LT_EFFECT_BETA_MU = 1   /* beta_topic * mu at covariate means */
} lt_effect_method;

typedef enum lt_eval_model {
    LT_EVAL_FULL = 0,    /* effects from the full-topic model */
    LT_EVAL_SELECTED = 1 /* effects from the k-step stepwise model */
} lt_eval_model;

typedef struct lt_options {
    double tol;      /* gradient tolerance scale, default 1e-8 */
    int max_iter;    /* quasi-Newton iteration cap, default 200 */
    int k;           /* stepwise steps, default 5 */
    lt_effect_method effect_method;
    lt_eval_model eval_model;
    lt_format format;
} lt_options;

typedef struct lt_corpus lt_corpus; /* tweets + follower series */
typedef struct lt_rules lt_rules;   /* topic keyword rules */

LT_API void lt_options_init(lt_options* options);

LT_API const char* lt_status_name(lt_status status);
LT_API const char* lt_last_error_message(void);
LT_API const char* lt_last_error_module(void);
LT_API void lt_string_free(char* text);

/* ---- corpus ------------------------------------------------------- */

/* tweets: JSON-lines with fields id, candidate, created_at (RFC 3339),
 * text, likes, is_retweet. followers: CSV candidate,at,count. */
LT_API lt_status lt_corpus_open(const char* tweets_path, const char* followers_path,
                                lt_corpus** out);
LT_API void lt_corpus_free(lt_corpus* corpus);
LT_API size_t lt_corpus_tweet_count(const lt_corpus* corpus);
LT_API size_t lt_corpus_candidate_count(const lt_corpus* corpus);
/* Borrowed pointer, valid while the corpus lives; candidates sorted. */
LT_API const char* lt_corpus_candidate(const lt_corpus* corpus, size_t index);

/* ---- rules -------------------------------------------------------- */

LT_API lt_status lt_rules_load(const char* path, lt_rules** out);
/* The built-in reconstruction: 12 figure rules, 10 issue rules. */
LT_API lt_status lt_rules_default(lt_rules** out);
LT_API void lt_rules_free(lt_rules* rules);
LT_API size_t lt_rules_figure_count(const lt_rules* rules);
LT_API size_t lt_rules_issue_count(const lt_rules* rules);

/* ---- analysis ----------------------------------------------------- */
/* Output strings go to *out (caller frees with lt_string_free). A null
 * options pointer means defaults. */

LT_API lt_status lt_summarize(const lt_corpus* corpus, const char* candidate, lt_format format,
                              char** out);
LT_API lt_status lt_topic_frequencies(const lt_corpus* corpus, const lt_rules* rules,
                                      const char* candidate, lt_format format, char** out);
LT_API lt_status lt_fit(const lt_corpus* corpus, const lt_rules* rules, const char* candidate,
                        const lt_options* options, char** out);
LT_API lt_status lt_select(const lt_corpus* corpus, const lt_rules* rules, const char* candidate,
                           const lt_options* options, char** out);
LT_API lt_status lt_effects(const lt_corpus* corpus, const lt_rules* rules, const char* candidate,
                            const lt_options* options, char** out);
/* candidates may be NULL/0 to rank every candidate in the corpus. */
LT_API lt_status lt_rank(const lt_corpus* corpus, const lt_rules* rules,
                         const char* const* candidates, size_t candidate_count,
                         const lt_options* options, char** out);
LT_API lt_status lt_design_matrix_csv(const lt_corpus* corpus, const lt_rules* rules,
                                      const char* candidate, char** out);

/* Writes loglikes.csv, loglikes_hist.csv, followers_daily.csv and
 * plotdata_summary.json into out_dir. */
LT_API lt_status lt_plot_data_write(const lt_corpus* corpus, const char* out_dir);

/* Generates a synthetic corpus (tweets.jsonl, followers.csv,
 * rules_synth.json, truth.json) from a JSON spec; seed_override replaces
 * the spec seed when nonzero. */
LT_API lt_status lt_simulate(const char* spec_json, uint64_t seed_override, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* LIKETALLY_H */
