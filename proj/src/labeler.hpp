#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace liketally {

struct Tweet;

enum class TopicKind { figure, issue };

struct TopicRule {
    std::string topic_id;
    TopicKind kind = TopicKind::issue;
    std::vector<std::string> patterns;
    bool case_sensitive = false;   // figure rules only; issues always fold
    bool word_boundary = false;    // off by default, plain substring match
};

class RuleSet {
public:
    // Parses and validates the JSON rule file format
    // {"figures": {id: {"patterns": [...], "case_sensitive": bool}},
    //  "issues":  {id: {"patterns": [...]}}}.
    static RuleSet from_json(const std::string& json_text, bool word_boundary = false);
    static RuleSet load(const std::string& path, bool word_boundary = false);
    // The shipped reconstruction of the study's 12 figure and 10 issue rules.
    static RuleSet default_rules(bool word_boundary = false);

    const std::vector<TopicRule>& rules() const { return rules_; }
    const TopicRule* find(const std::string& topic_id) const;
    bool has(const std::string& topic_id) const { return find(topic_id) != nullptr; }

    std::size_t figure_count() const;
    std::size_t issue_count() const;

    // All topic ids, sorted.
    std::vector<std::string> topic_ids() const;

private:
    std::vector<TopicRule> rules_;
};

struct TopicLabels {
    std::string tweet_id;
    std::set<std::string> topics;
};

// Full Unicode case folding of UTF-8 text; malformed bytes pass through.
std::string casefold_utf8(const std::string& text);

std::set<std::string> label_tweet(const std::string& text, const RuleSet& rules);

std::vector<TopicLabels> label_tweets(const std::vector<Tweet>& tweets, const RuleSet& rules);

// Tweet counts per topic over the candidate's non-retweet tweets; every
// rule topic appears in the result, zero when never matched.
std::map<std::string, long long> topic_frequencies(const std::vector<Tweet>& tweets,
                                                   const std::vector<TopicLabels>& labels,
                                                   const RuleSet& rules,
                                                   const std::string& candidate);

}  // namespace liketally
