#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "timeutil.hpp"

namespace liketally {

struct Tweet {
    std::string id;
    std::string candidate;
    std::int64_t created_at = 0;  // Unix seconds, UTC
    std::string text;
    long long likes = 0;
    bool is_retweet = false;

    friend bool operator==(const Tweet&, const Tweet&) = default;
};

struct FollowerSnapshot {
    std::string candidate;
    std::int64_t at = 0;
    long long count = 0;
};

// Per-candidate snapshots, sorted strictly increasing in time.
class FollowerSeries {
public:
    void add(const FollowerSnapshot& snapshot);
    // Sorts each candidate's snapshots and rejects duplicate timestamps.
    void finalize();

    bool has(const std::string& candidate) const;
    const std::vector<FollowerSnapshot>& snapshots(const std::string& candidate) const;
    std::vector<std::string> candidates() const;

private:
    std::map<std::string, std::vector<FollowerSnapshot>> by_candidate_;
};

struct LikesSummary {
    std::string candidate;
    double mean = 0.0;
    double sd = 0.0;
    long long min = 0;
    long long max = 0;
    long long n = 0;
};

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    long long count = 0;
};

struct LogLikesDistribution {
    std::string candidate;
    std::vector<double> log_likes;    // ln(likes) over non-retweets with likes > 0
    std::vector<HistogramBin> bins;   // Freedman-Diaconis on the log scale
    long long dropped_zero_likes = 0; // likes == 0 rows excluded from the log data
};

std::vector<Tweet> parse_tweets(const std::string& path);
std::string serialize_tweets(const std::vector<Tweet>& tweets);

FollowerSeries parse_followers(const std::string& path);

struct Corpus {
    std::vector<Tweet> tweets;
    FollowerSeries followers;
};

Corpus load_corpus(const std::string& tweets_path, const std::string& followers_path);

// Sorted unique candidate ids appearing in the tweet list.
std::vector<std::string> candidates_of(const std::vector<Tweet>& tweets);

// Sample statistics of likes over the candidate's non-retweet tweets.
// The sd of a single observation is defined as 0 (logged at debug).
LikesSummary summarize_likes(const std::vector<Tweet>& tweets, const std::string& candidate);

// Follower count (in millions) averaged over the given UTC day; linear
// interpolation at the day's noon when no snapshot falls on it, nearest
// snapshot beyond the series ends.
double follower_millions_on_day(const FollowerSeries& series, const std::string& candidate,
                                const UtcDate& day);

LogLikesDistribution log_likes_distribution(const std::vector<Tweet>& tweets,
                                            const std::string& candidate);

// Daily follower values (raw counts, possibly fractional from
// interpolation) over the candidate's snapshot span.
std::vector<std::pair<UtcDate, double>> daily_followers(const FollowerSeries& series,
                                                        const std::string& candidate);

struct PlotDataFiles {
    std::string log_likes_csv;       // candidate,log_likes
    std::string log_likes_hist_csv;  // candidate,bin_low,bin_high,count
    std::string followers_csv;       // candidate,date,followers
    std::string summary_json;        // per-candidate dropped-row counts
};

PlotDataFiles build_plot_data(const std::vector<Tweet>& tweets, const FollowerSeries& series);

// Writes the plot-data CSVs into out_dir (loglikes.csv, loglikes_hist.csv,
// followers_daily.csv, plotdata_summary.json).
void emit_plot_data(const std::vector<Tweet>& tweets, const FollowerSeries& series,
                    const std::string& out_dir);

}  // namespace liketally
