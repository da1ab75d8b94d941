#pragma once

#include <string>
#include <vector>

#include "features.hpp"
#include "negbin.hpp"

namespace liketally {

struct SelectionStep {
    std::string topic_id;
    double loglik = 0.0;
    double aic = 0.0;
    FitResult fit;
};

struct SelectionTrace {
    std::string candidate;
    int k = 0;
    FitResult baseline;  // controls-only model
    std::vector<SelectionStep> steps;

    std::vector<std::string> selected_topics() const;
};

// Builds the sub-design holding the controls plus the named topics, in
// design order.
DesignMatrix submodel(const DesignMatrix& design, const std::vector<std::string>& topics);

// Greedy forward selection: at each step refit one model per remaining
// topic (controls + already selected + that topic) and keep the topic with
// the highest fitted log-likelihood, ties broken by lexicographic topic id.
// Sub-fits that fail on a singular design or do not converge are skipped
// with a warning. k defaults to 5.
SelectionTrace forward_stepwise(const DesignMatrix& design, int k = 5,
                                const FitOptions& options = {});

}  // namespace liketally
