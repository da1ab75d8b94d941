#pragma once

#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "corpus.hpp"
#include "labeler.hpp"

namespace liketally {

struct DesignMatrix {
    std::string candidate;
    Eigen::VectorXd y;                      // like counts, one per non-retweet tweet
    std::vector<std::string> column_names;  // intercept, controls, then topic columns
    Eigen::MatrixXd X;
    std::vector<std::string> topic_columns;           // selectable topics (surviving)
    std::vector<std::set<std::string>> row_labels;    // per-row topic sets over all rules
    std::vector<std::string> pruned_topics;           // zero-variance topics dropped

    Eigen::Index rows() const { return X.rows(); }
    Eigen::Index cols() const { return X.cols(); }
    Eigen::Index column_index(const std::string& name) const;

    // CSV dump, header "likes,<column names...>".
    std::string to_csv() const;
};

inline constexpr const char* kIntercept = "intercept";
inline constexpr const char* kFollowers = "followers_millions";
inline constexpr const char* kLengthWords = "length_words";
inline constexpr const char* kHyperlink = "hyperlink";
inline constexpr const char* kSelfReference = "self_reference";

long long count_words(const std::string& text);
bool has_hyperlink(const std::string& text);

// Assembles the per-candidate regression design: response and controls
// from the tweets, topic indicator columns from the labels, the
// candidate's own figure topic rerouted to the self_reference control.
// Zero-variance columns (topics and controls alike, never the intercept)
// are dropped with a notice.
DesignMatrix build_design_matrix(const std::vector<Tweet>& tweets,
                                 const std::vector<TopicLabels>& labels,
                                 const FollowerSeries& series, const std::string& candidate,
                                 const RuleSet& rules);

}  // namespace liketally
