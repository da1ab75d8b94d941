#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "features.hpp"

namespace liketally {

struct ControlDistributions {
    double followers_lognorm_mu = 0.8;     // ln-scale location of followers (millions)
    double followers_lognorm_sigma = 0.3;
    double length_mean = 14.0;             // Poisson mean of extra words
    double hyperlink_p = 0.35;
    double self_reference_p = 0.2;
};

struct SynthSpec {
    std::string candidate = "synth";
    long long n = 1000;
    std::vector<double> beta;               // intercept, 4 controls, then topics
    double alpha = 0.5;                     // 0 means pure Poisson
    std::vector<double> topic_prevalences;  // Bernoulli rate per topic
    std::vector<std::string> topic_names;   // optional; generated when empty
    ControlDistributions controls;
    std::uint64_t seed = 1;

    static SynthSpec from_json(const std::string& json_text);
    std::string to_json() const;

    // intercept + 4 controls + topics
    std::size_t column_count() const { return 5 + topic_prevalences.size(); }
    std::vector<std::string> column_names() const;
    void validate() const;
};

struct SynthCorpus {
    DesignMatrix design;  // y filled with the generated counts
    std::vector<std::string> texts;
    std::vector<std::int64_t> created_at;
    std::vector<double> followers_raw;  // per-row follower count (not millions)
};

// Draws controls and topic indicators, then y ~ Poisson(mu * g) with
// g ~ Gamma(1/alpha, alpha) (plain Poisson when alpha = 0). Deterministic
// given the seed.
SynthCorpus generate(const SynthSpec& spec);

// Writes tweets.jsonl / followers.csv / rules_synth.json / truth.json so
// the whole pipeline can run over a corpus with known parameters. Texts
// embed one marker keyword per active topic.
void emit_corpus(const SynthSpec& spec, const SynthCorpus& corpus, const std::string& out_dir);

}  // namespace liketally
