#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpus.hpp"
#include "labeler.hpp"
#include "stepwise.hpp"
#include "tactics.hpp"

namespace liketally {

struct AnalysisOptions {
    FitOptions fit;
    int k = 5;
    EffectMethod effect_method = EffectMethod::discrete_change;
    bool eval_selected_model = false;  // effects from the stepwise model instead of the full one
};

// Full-model analysis for one candidate: design matrix, NB fit, marginal
// effects, conditional topic probabilities, Eval score (rank left at 0).
struct CandidateAnalysis {
    DesignMatrix design;
    FitResult fit;
    TacticReport report;
};

CandidateAnalysis analyze_candidate(const Corpus& corpus, const RuleSet& rules,
                                    const std::string& candidate, const AnalysisOptions& options);

// Analyses candidates (all of the corpus when the list is empty) in
// parallel and assigns ranks.
std::vector<TacticReport> analyze_and_rank(const Corpus& corpus, const RuleSet& rules,
                                           const std::vector<std::string>& candidates,
                                           const AnalysisOptions& options);

// Resolves an explicit candidate filter against the corpus (errors on
// unknown ids), or every corpus candidate when the filter is empty.
std::vector<std::string> resolve_candidates(const Corpus& corpus,
                                            const std::vector<std::string>& filter);

namespace report {

nlohmann::json summary_to_json(const LikesSummary& summary);
std::string summaries_csv(const std::vector<LikesSummary>& summaries);

nlohmann::json frequencies_to_json(const std::string& candidate,
                                   const std::map<std::string, long long>& counts);
std::string frequencies_csv(const std::string& candidate,
                            const std::map<std::string, long long>& counts);

nlohmann::json fit_to_json(const FitResult& fit);
std::string fit_csv(const FitResult& fit);

nlohmann::json trace_to_json(const SelectionTrace& trace);
std::string trace_csv(const SelectionTrace& trace);

nlohmann::json effects_to_json(const std::string& candidate,
                               const std::vector<MarginalEffect>& effects);
std::string effects_csv(const std::vector<MarginalEffect>& effects);

nlohmann::json tactic_report_to_json(const TacticReport& report);
std::string rank_csv(const std::vector<TacticReport>& reports);

}  // namespace report

}  // namespace liketally
