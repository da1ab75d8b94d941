#include "stepwise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "log.hpp"

namespace liketally {

namespace {
constexpr const char* kModule = "stepwise";
}

std::vector<std::string> SelectionTrace::selected_topics() const {
    std::vector<std::string> out;
    out.reserve(steps.size());
    for (const SelectionStep& step : steps) out.push_back(step.topic_id);
    return out;
}

DesignMatrix submodel(const DesignMatrix& design, const std::vector<std::string>& topics) {
    DesignMatrix sub;
    sub.candidate = design.candidate;
    sub.y = design.y;
    sub.row_labels = design.row_labels;
    sub.pruned_topics = design.pruned_topics;

    std::vector<Eigen::Index> cols;
    for (std::size_t j = 0; j < design.column_names.size(); ++j) {
        const std::string& name = design.column_names[j];
        bool is_topic =
            std::find(design.topic_columns.begin(), design.topic_columns.end(), name) !=
            design.topic_columns.end();
        bool wanted =
            !is_topic || std::find(topics.begin(), topics.end(), name) != topics.end();
        if (!wanted) continue;
        cols.push_back(static_cast<Eigen::Index>(j));
        sub.column_names.push_back(name);
        if (is_topic) sub.topic_columns.push_back(name);
    }
    sub.X.resize(design.X.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        sub.X.col(static_cast<Eigen::Index>(j)) = design.X.col(cols[j]);
    return sub;
}

SelectionTrace forward_stepwise(const DesignMatrix& design, int k, const FitOptions& options) {
    const int available = static_cast<int>(design.topic_columns.size());
    if (k < 0 || k > available)
        raise(errc::bound, kModule,
              "k=" + std::to_string(k) + " out of range, candidate '" + design.candidate +
                  "' has " + std::to_string(available) + " selectable topics");

    SelectionTrace trace;
    trace.candidate = design.candidate;
    trace.k = k;
    trace.baseline = fit_negbin(submodel(design, {}), options);

    std::vector<std::string> remaining = design.topic_columns;
    std::sort(remaining.begin(), remaining.end());
    std::vector<std::string> selected;

    for (int step = 0; step < k; ++step) {
        const double neg_inf = -std::numeric_limits<double>::infinity();
        double best_loglik = neg_inf;
        double best_aic = std::numeric_limits<double>::infinity();
        std::size_t best_index = remaining.size();
        std::size_t best_by_aic = remaining.size();
        FitResult best_fit;

        for (std::size_t i = 0; i < remaining.size(); ++i) {
            std::vector<std::string> topics = selected;
            topics.push_back(remaining[i]);
            FitResult fit;
            try {
                fit = fit_negbin(submodel(design, topics), options);
            } catch (const Error& e) {
                if (e.code() == errc::singular_design) {
                    log::warn("stepwise '" + design.candidate + "': topic '" + remaining[i] +
                              "' skipped, " + e.what());
                    continue;
                }
                throw;
            }
            double loglik = fit.loglik;
            if (!fit.converged) {
                log::warn("stepwise '" + design.candidate + "': sub-fit for '" + remaining[i] +
                          "' did not converge, treated as -inf");
                loglik = neg_inf;
            }
            // remaining is sorted, so strict > implements the lexicographic
            // tie-break on equal log-likelihoods.
            if (loglik > best_loglik) {
                best_loglik = loglik;
                best_index = i;
                best_fit = fit;
            }
            if (loglik != neg_inf && fit.aic < best_aic) {
                best_aic = fit.aic;
                best_by_aic = i;
            }
        }
        if (best_index == remaining.size())
            raise(errc::singular_design, kModule,
                  "stepwise '" + design.candidate + "': no fittable topic at step " +
                      std::to_string(step + 1));
        // Same-step models share a parameter count, so the AIC ordering must
        // match the log-likelihood ordering.
        if (best_by_aic != best_index)
            raise(errc::internal, kModule,
                  "AIC argmin disagrees with loglik argmax within a step");

        SelectionStep record;
        record.topic_id = remaining[best_index];
        record.loglik = best_loglik;
        record.aic = best_fit.aic;
        record.fit = std::move(best_fit);
        selected.push_back(record.topic_id);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_index));
        trace.steps.push_back(std::move(record));
    }
    return trace;
}

}  // namespace liketally
