#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "features.hpp"
#include "negbin.hpp"

namespace liketally {

enum class EffectMethod {
    discrete_change,  // exp(eta at topic=1) - exp(eta at topic=0), covariates at means
    beta_mu,          // beta_topic * mu at covariate means
};

struct MarginalEffect {
    std::string topic_id;
    double effect = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    EffectMethod method = EffectMethod::discrete_change;
};

struct TacticReport {
    std::string candidate;
    std::map<std::string, double> probs;
    std::map<std::string, MarginalEffect> effects;
    double score = 0.0;
    int rank = 0;
};

// Expected change in likes when the topic switches 0 -> 1 with every other
// covariate held at its sample mean; 95% CI by the delta method from the
// fit's coefficient covariance.
MarginalEffect marginal_effect(const FitResult& fit, const DesignMatrix& design,
                               const std::string& topic_id,
                               EffectMethod method = EffectMethod::discrete_change);

// p(j | i, at least one topic raised): per-topic share of the candidate's
// tweets that carry >= 1 topic from the universe. Multi-labeled tweets
// count once per matching topic, so the probabilities may sum above 1.
std::map<std::string, double> conditional_topic_probs(
    const std::vector<std::set<std::string>>& tweet_labels,
    const std::vector<std::string>& topic_universe);

// Eval(i) = sum_j effect(j) * prob(j). Topics carrying probability but no
// effect estimate (pruned from the fit) are skipped with a warning.
double eval_score(const std::map<std::string, MarginalEffect>& effects,
                  const std::map<std::string, double>& probs);

// Sorts descending by score (ties by candidate id) and assigns ranks 1..n.
std::vector<TacticReport> rank_candidates(std::vector<TacticReport> reports);

}  // namespace liketally
