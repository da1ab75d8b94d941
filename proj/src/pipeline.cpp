#include "pipeline.hpp"

#include <algorithm>
#include <future>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "log.hpp"

namespace liketally {

namespace {

constexpr const char* kModule = "pipeline";
using json = nlohmann::json;

// Universe for the conditional probabilities: every declared topic except
// the candidate's own name. Pruned topics keep their probability mass in
// the denominator; they are only skipped later in the Eval sum.
std::vector<std::string> topic_universe(const RuleSet& rules, const std::string& candidate) {
    std::vector<std::string> universe;
    for (const std::string& id : rules.topic_ids())
        if (id != candidate) universe.push_back(id);
    return universe;
}

}  // namespace

CandidateAnalysis analyze_candidate(const Corpus& corpus, const RuleSet& rules,
                                    const std::string& candidate,
                                    const AnalysisOptions& options) {
    CandidateAnalysis analysis;
    std::vector<TopicLabels> labels = label_tweets(corpus.tweets, rules);
    analysis.design =
        build_design_matrix(corpus.tweets, labels, corpus.followers, candidate, rules);

    std::vector<std::string> effect_topics;
    if (options.eval_selected_model) {
        int k = std::min<int>(options.k, static_cast<int>(analysis.design.topic_columns.size()));
        SelectionTrace trace = forward_stepwise(analysis.design, k, options.fit);
        effect_topics = trace.selected_topics();
        std::sort(effect_topics.begin(), effect_topics.end());
        analysis.fit = trace.steps.empty() ? trace.baseline : trace.steps.back().fit;
    } else {
        analysis.fit = fit_negbin(analysis.design, options.fit);
        effect_topics = analysis.design.topic_columns;
    }

    const DesignMatrix effect_design = options.eval_selected_model
                                           ? submodel(analysis.design, effect_topics)
                                           : analysis.design;

    TacticReport& report = analysis.report;
    report.candidate = candidate;
    for (const std::string& topic : effect_topics)
        report.effects[topic] =
            marginal_effect(analysis.fit, effect_design, topic, options.effect_method);
    report.probs =
        conditional_topic_probs(analysis.design.row_labels, topic_universe(rules, candidate));
    report.score = eval_score(report.effects, report.probs);
    return analysis;
}

std::vector<std::string> resolve_candidates(const Corpus& corpus,
                                            const std::vector<std::string>& filter) {
    std::vector<std::string> all = candidates_of(corpus.tweets);
    if (filter.empty()) return all;
    for (const std::string& id : filter)
        if (std::find(all.begin(), all.end(), id) == all.end())
            raise(errc::invalid_argument, kModule, "candidate '" + id + "' not in the corpus");
    std::vector<std::string> out = filter;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<TacticReport> analyze_and_rank(const Corpus& corpus, const RuleSet& rules,
                                           const std::vector<std::string>& candidates,
                                           const AnalysisOptions& options) {
    std::vector<std::string> ids = resolve_candidates(corpus, candidates);
    std::vector<std::future<TacticReport>> futures;
    futures.reserve(ids.size());
    for (const std::string& id : ids)
        futures.push_back(std::async(std::launch::async, [&, id] {
            return analyze_candidate(corpus, rules, id, options).report;
        }));
    std::vector<TacticReport> reports;
    reports.reserve(ids.size());
    for (auto& f : futures) reports.push_back(f.get());
    return rank_candidates(std::move(reports));
}

namespace report {

namespace {

std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

}  // namespace

json summary_to_json(const LikesSummary& s) {
    return {{"candidate", s.candidate}, {"mean", s.mean}, {"sd", s.sd},
            {"min", s.min},             {"max", s.max},   {"n", s.n}};
}

std::string summaries_csv(const std::vector<LikesSummary>& summaries) {
    std::ostringstream out;
    out << "candidate,mean,sd,min,max,n\n";
    for (const LikesSummary& s : summaries)
        out << s.candidate << ',' << csv_num(s.mean) << ',' << csv_num(s.sd) << ',' << s.min
            << ',' << s.max << ',' << s.n << '\n';
    return out.str();
}

json frequencies_to_json(const std::string& candidate,
                         const std::map<std::string, long long>& counts) {
    return {{"candidate", candidate}, {"frequencies", counts}};
}

std::string frequencies_csv(const std::string& candidate,
                            const std::map<std::string, long long>& counts) {
    std::ostringstream out;
    out << "candidate,topic,count\n";
    for (const auto& [topic, count] : counts)
        out << candidate << ',' << topic << ',' << count << '\n';
    return out.str();
}

json fit_to_json(const FitResult& fit) {
    json out = {{"candidate", fit.candidate},
                {"columns", fit.columns},
                {"beta", vector_to_json(fit.beta)},
                {"se", vector_to_json(fit.se)},
                {"z", vector_to_json(fit.z)},
                {"p", vector_to_json(fit.p)},
                {"alpha", fit.alpha},
                {"loglik", fit.loglik},
                {"aic", fit.aic},
                {"n", fit.n},
                {"converged", fit.converged},
                {"iterations", fit.iterations},
                {"log_alpha_se", fit.log_alpha_se},
                {"alpha_se", fit.alpha_se},
                {"alpha_at_boundary", fit.alpha_at_boundary},
                {"gradient_norm_at_opt", fit.gradient_norm_at_opt}};
    return out;
}

std::string fit_csv(const FitResult& fit) {
    std::ostringstream out;
    out << "candidate,term,estimate,se,z,p\n";
    for (std::size_t j = 0; j < fit.columns.size(); ++j) {
        Eigen::Index i = static_cast<Eigen::Index>(j);
        out << fit.candidate << ',' << fit.columns[j] << ',' << csv_num(fit.beta(i)) << ','
            << csv_num(fit.se(i)) << ',' << csv_num(fit.z(i)) << ',' << csv_num(fit.p(i)) << '\n';
    }
    out << fit.candidate << ",alpha," << csv_num(fit.alpha) << ',' << csv_num(fit.alpha_se)
        << ",,\n";
    out << fit.candidate << ",loglik," << csv_num(fit.loglik) << ",,,\n";
    out << fit.candidate << ",aic," << csv_num(fit.aic) << ",,,\n";
    out << fit.candidate << ",n," << fit.n << ",,,\n";
    return out.str();
}

json trace_to_json(const SelectionTrace& trace) {
    json steps = json::array();
    for (const SelectionStep& step : trace.steps)
        steps.push_back({{"topic", step.topic_id},
                         {"loglik", step.loglik},
                         {"aic", step.aic},
                         {"fit", fit_to_json(step.fit)}});
    return steps;
}

std::string trace_csv(const SelectionTrace& trace) {
    std::ostringstream out;
    out << "candidate,step,topic,loglik,aic\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i)
        out << trace.candidate << ',' << i + 1 << ',' << trace.steps[i].topic_id << ','
            << csv_num(trace.steps[i].loglik) << ',' << csv_num(trace.steps[i].aic) << '\n';
    return out.str();
}

json effects_to_json(const std::string& candidate, const std::vector<MarginalEffect>& effects) {
    json items = json::object();
    for (const MarginalEffect& e : effects)
        items[e.topic_id] = {{"effect", e.effect}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}};
    return {{"candidate", candidate}, {"effects", items}};
}

std::string effects_csv(const std::vector<MarginalEffect>& effects) {
    std::ostringstream out;
    out << "topic,effect,ci_low,ci_high\n";
    for (const MarginalEffect& e : effects)
        out << e.topic_id << ',' << csv_num(e.effect) << ',' << csv_num(e.ci_low) << ','
            << csv_num(e.ci_high) << '\n';
    return out.str();
}

json tactic_report_to_json(const TacticReport& report) {
    json effects = json::object();
    for (const auto& [topic, e] : report.effects)
        effects[topic] = {{"effect", e.effect}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}};
    return {{"candidate", report.candidate},
            {"probs", report.probs},
            {"effects", effects},
            {"score", report.score},
            {"rank", report.rank}};
}

std::string rank_csv(const std::vector<TacticReport>& reports) {
    std::ostringstream out;
    out << "candidate,score,rank\n";
    for (const TacticReport& r : reports)
        out << r.candidate << ',' << csv_num(r.score) << ',' << r.rank << '\n';
    return out.str();
}

}  // namespace report

}  // namespace liketally
