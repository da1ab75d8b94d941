#include "tactics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "log.hpp"
#include "mathutil.hpp"

namespace liketally {

namespace {
constexpr const char* kModule = "tactics";
}

MarginalEffect marginal_effect(const FitResult& fit, const DesignMatrix& design,
                               const std::string& topic_id, EffectMethod method) {
    const Eigen::Index j = fit.coef_index(topic_id);  // unknown-topic error if absent
    const Eigen::Index k = static_cast<Eigen::Index>(fit.columns.size());
    if (design.X.cols() != k || design.column_names != fit.columns)
        raise(errc::incompatible_fits, kModule,
              "design and fit columns disagree for '" + topic_id + "'");

    Eigen::VectorXd means = design.X.colwise().mean();

    MarginalEffect result;
    result.topic_id = topic_id;
    result.method = method;

    Eigen::VectorXd gradient(k);  // d effect / d beta, for the delta method
    if (method == EffectMethod::discrete_change) {
        Eigen::VectorXd at1 = means, at0 = means;
        at1(j) = 1.0;
        at0(j) = 0.0;
        const double mu1 = std::exp(fit.beta.dot(at1));
        const double mu0 = std::exp(fit.beta.dot(at0));
        result.effect = mu1 - mu0;
        gradient = mu1 * at1 - mu0 * at0;
    } else {
        const double mu = std::exp(fit.beta.dot(means));
        result.effect = fit.beta(j) * mu;
        gradient = fit.beta(j) * mu * means;
        gradient(j) += mu;
    }

    const Eigen::MatrixXd cov_beta = fit.cov.topLeftCorner(k, k);
    const double variance = gradient.dot(cov_beta * gradient);
    double se = 0.0;
    if (std::isnan(variance))
        se = std::numeric_limits<double>::quiet_NaN();
    else if (variance > 0.0)
        se = std::sqrt(variance);
    result.ci_low = result.effect - kNormal975 * se;
    result.ci_high = result.effect + kNormal975 * se;
    return result;
}

std::map<std::string, double> conditional_topic_probs(
    const std::vector<std::set<std::string>>& tweet_labels,
    const std::vector<std::string>& topic_universe) {
    long long denominator = 0;
    std::map<std::string, long long> counts;
    for (const std::string& topic : topic_universe) counts[topic] = 0;
    for (const std::set<std::string>& labels : tweet_labels) {
        bool topical = false;
        for (const std::string& topic : topic_universe) {
            if (labels.count(topic)) {
                topical = true;
                ++counts[topic];
            }
        }
        if (topical) ++denominator;
    }
    if (denominator == 0)
        raise(errc::no_topical_tweets, kModule, "no tweets raise any topic from the universe");

    std::map<std::string, double> probs;
    for (const auto& [topic, count] : counts)
        probs[topic] = static_cast<double>(count) / static_cast<double>(denominator);
    return probs;
}

double eval_score(const std::map<std::string, MarginalEffect>& effects,
                  const std::map<std::string, double>& probs) {
    double score = 0.0;
    bool any = false;
    for (const auto& [topic, prob] : probs) {
        auto it = effects.find(topic);
        if (it == effects.end()) {
            if (prob > 0.0)
                log::warn("eval_score: topic '" + topic +
                          "' has probability mass but no effect estimate, skipped");
            continue;
        }
        score += it->second.effect * prob;
        any = true;
    }
    if (!any)
        raise(errc::degenerate_score, kModule, "no topic has both an effect and a probability");
    return score;
}

std::vector<TacticReport> rank_candidates(std::vector<TacticReport> reports) {
    if (reports.empty())
        raise(errc::invalid_argument, kModule, "nothing to rank");
    std::sort(reports.begin(), reports.end(), [](const TacticReport& a, const TacticReport& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.candidate < b.candidate;
    });
    for (std::size_t i = 0; i < reports.size(); ++i)
        reports[i].rank = static_cast<int>(i) + 1;
    return reports;
}

}  // namespace liketally
