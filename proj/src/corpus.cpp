#include "corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "log.hpp"

namespace liketally {

namespace {

constexpr const char* kModule = "corpus";
using json = nlohmann::json;

const json& require_field(const json& obj, const char* field, std::size_t line_no) {
    auto it = obj.find(field);
    if (it == obj.end())
        raise(errc::schema, kModule,
              "line " + std::to_string(line_no) + ": missing required field '" + field + "'");
    return *it;
}

std::string require_string(const json& obj, const char* field, std::size_t line_no) {
    const json& v = require_field(obj, field, line_no);
    if (!v.is_string())
        raise(errc::schema, kModule,
              "line " + std::to_string(line_no) + ": field '" + field + "' must be a string");
    return v.get<std::string>();
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io, kModule, "cannot open '" + path + "'");
    return in;
}

}  // namespace

std::vector<Tweet> parse_tweets(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<Tweet> tweets;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            raise(errc::parse, kModule,
                  "line " + std::to_string(line_no) + ": malformed JSON object");

        Tweet t;
        t.id = require_string(obj, "id", line_no);
        t.candidate = require_string(obj, "candidate", line_no);
        if (t.candidate.empty())
            raise(errc::validation, kModule,
                  "line " + std::to_string(line_no) + ": candidate must be non-empty");
        t.created_at = parse_rfc3339(require_string(obj, "created_at", line_no), kModule);
        t.text = require_string(obj, "text", line_no);

        const json& likes = require_field(obj, "likes", line_no);
        if (!likes.is_number_integer())
            raise(errc::schema, kModule,
                  "line " + std::to_string(line_no) + ": 'likes' must be an integer count");
        t.likes = likes.get<long long>();
        if (t.likes < 0)
            raise(errc::validation, kModule,
                  "line " + std::to_string(line_no) + ": negative likes (" +
                      std::to_string(t.likes) + ")");

        const json& rt = require_field(obj, "is_retweet", line_no);
        if (!rt.is_boolean())
            raise(errc::schema, kModule,
                  "line " + std::to_string(line_no) + ": 'is_retweet' must be a boolean");
        t.is_retweet = rt.get<bool>();

        tweets.push_back(std::move(t));
    }
    return tweets;
}

std::string serialize_tweets(const std::vector<Tweet>& tweets) {
    std::string out;
    for (const Tweet& t : tweets) {
        json obj = {{"id", t.id},
                    {"candidate", t.candidate},
                    {"created_at", format_rfc3339(t.created_at)},
                    {"text", t.text},
                    {"likes", t.likes},
                    {"is_retweet", t.is_retweet}};
        out += obj.dump();
        out += '\n';
    }
    return out;
}

void FollowerSeries::add(const FollowerSnapshot& snapshot) {
    by_candidate_[snapshot.candidate].push_back(snapshot);
}

void FollowerSeries::finalize() {
    for (auto& [candidate, snaps] : by_candidate_) {
        std::sort(snaps.begin(), snaps.end(),
                  [](const FollowerSnapshot& a, const FollowerSnapshot& b) { return a.at < b.at; });
        for (std::size_t i = 1; i < snaps.size(); ++i) {
            if (snaps[i].at == snaps[i - 1].at)
                raise(errc::validation, kModule,
                      "duplicate follower snapshot time for '" + candidate + "' at " +
                          format_rfc3339(snaps[i].at));
        }
    }
}

bool FollowerSeries::has(const std::string& candidate) const {
    auto it = by_candidate_.find(candidate);
    return it != by_candidate_.end() && !it->second.empty();
}

const std::vector<FollowerSnapshot>& FollowerSeries::snapshots(const std::string& candidate) const {
    auto it = by_candidate_.find(candidate);
    if (it == by_candidate_.end() || it->second.empty())
        raise(errc::missing_series, kModule, "no follower snapshots for '" + candidate + "'");
    return it->second;
}

std::vector<std::string> FollowerSeries::candidates() const {
    std::vector<std::string> out;
    for (const auto& [candidate, snaps] : by_candidate_)
        if (!snaps.empty()) out.push_back(candidate);
    return out;
}

FollowerSeries parse_followers(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) raise(errc::parse, kModule, "empty followers file '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "candidate,at,count")
        raise(errc::schema, kModule, "followers file must start with header 'candidate,at,count'");

    FollowerSeries series;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto c1 = line.find(',');
        auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            raise(errc::parse, kModule, "line " + std::to_string(line_no) + ": expected 3 fields");
        FollowerSnapshot s;
        s.candidate = line.substr(0, c1);
        if (s.candidate.empty())
            raise(errc::validation, kModule,
                  "line " + std::to_string(line_no) + ": candidate must be non-empty");
        s.at = parse_rfc3339(line.substr(c1 + 1, c2 - c1 - 1), kModule);
        std::string count_text = line.substr(c2 + 1);
        try {
            std::size_t used = 0;
            s.count = std::stoll(count_text, &used);
            if (used != count_text.size()) throw std::invalid_argument(count_text);
        } catch (const std::exception&) {
            raise(errc::parse, kModule,
                  "line " + std::to_string(line_no) + ": invalid count '" + count_text + "'");
        }
        if (s.count < 0)
            raise(errc::validation, kModule,
                  "line " + std::to_string(line_no) + ": negative follower count");
        series.add(s);
    }
    series.finalize();
    return series;
}

Corpus load_corpus(const std::string& tweets_path, const std::string& followers_path) {
    Corpus corpus;
    corpus.tweets = parse_tweets(tweets_path);
    corpus.followers = parse_followers(followers_path);
    return corpus;
}

std::vector<std::string> candidates_of(const std::vector<Tweet>& tweets) {
    std::set<std::string> ids;
    for (const Tweet& t : tweets) ids.insert(t.candidate);
    return {ids.begin(), ids.end()};
}

LikesSummary summarize_likes(const std::vector<Tweet>& tweets, const std::string& candidate) {
    std::vector<long long> likes;
    for (const Tweet& t : tweets)
        if (t.candidate == candidate && !t.is_retweet) likes.push_back(t.likes);
    if (likes.empty())
        raise(errc::empty_group, kModule,
              "no non-retweet tweets for candidate '" + candidate + "'");

    LikesSummary s;
    s.candidate = candidate;
    s.n = static_cast<long long>(likes.size());
    s.min = *std::min_element(likes.begin(), likes.end());
    s.max = *std::max_element(likes.begin(), likes.end());
    double sum = 0.0;
    for (long long v : likes) sum += static_cast<double>(v);
    s.mean = sum / static_cast<double>(s.n);
    if (s.n == 1) {
        // Sample sd is undefined for one observation; reported as 0.
        log::debug("summarize_likes: single tweet for '" + candidate + "', sd reported as 0");
        s.sd = 0.0;
    } else {
        double ss = 0.0;
        for (long long v : likes) {
            double d = static_cast<double>(v) - s.mean;
            ss += d * d;
        }
        s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    return s;
}

double follower_millions_on_day(const FollowerSeries& series, const std::string& candidate,
                                const UtcDate& day) {
    const auto& snaps = series.snapshots(candidate);

    double same_day_sum = 0.0;
    int same_day_count = 0;
    for (const FollowerSnapshot& s : snaps) {
        if (utc_date_of(s.at) == day) {
            same_day_sum += static_cast<double>(s.count);
            ++same_day_count;
        }
    }
    if (same_day_count > 0) return same_day_sum / same_day_count / 1e6;

    const FollowerSnapshot* before = nullptr;
    const FollowerSnapshot* after = nullptr;
    for (const FollowerSnapshot& s : snaps) {
        if (utc_date_of(s.at) < day) before = &s;
        if (utc_date_of(s.at) > day && !after) after = &s;
    }
    if (!before) return static_cast<double>(snaps.front().count) / 1e6;
    if (!after) return static_cast<double>(snaps.back().count) / 1e6;

    const double t = static_cast<double>(noon_of(day) - before->at) /
                     static_cast<double>(after->at - before->at);
    const double value = static_cast<double>(before->count) +
                         (static_cast<double>(after->count) - static_cast<double>(before->count)) * t;
    return value / 1e6;
}

namespace {

// Linearly interpolated quantile over sorted values (the "type 7" rule).
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double h = static_cast<double>(n - 1) * p;
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<HistogramBin> freedman_diaconis_bins(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const double lo = values.front();
    const double hi = values.back();
    const double iqr = quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
    const double width = 2.0 * iqr * std::pow(static_cast<double>(n), -1.0 / 3.0);
    if (width <= 0.0 || hi == lo)
        return {HistogramBin{lo, hi, static_cast<long long>(n)}};

    const std::size_t nbins =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / width)));
    std::vector<HistogramBin> bins(nbins);
    for (std::size_t i = 0; i < nbins; ++i) {
        bins[i].low = lo + static_cast<double>(i) * width;
        bins[i].high = lo + static_cast<double>(i + 1) * width;
    }
    for (double v : values) {
        std::size_t i = static_cast<std::size_t>((v - lo) / width);
        if (i >= nbins) i = nbins - 1;
        ++bins[i].count;
    }
    return bins;
}

}  // namespace

LogLikesDistribution log_likes_distribution(const std::vector<Tweet>& tweets,
                                            const std::string& candidate) {
    LogLikesDistribution dist;
    dist.candidate = candidate;
    for (const Tweet& t : tweets) {
        if (t.candidate != candidate || t.is_retweet) continue;
        if (t.likes == 0) {
            ++dist.dropped_zero_likes;
            continue;
        }
        dist.log_likes.push_back(std::log(static_cast<double>(t.likes)));
    }
    if (dist.dropped_zero_likes > 0)
        log::warn("plot data: dropped " + std::to_string(dist.dropped_zero_likes) +
                  " zero-like tweets from log distribution for '" + candidate + "'");
    if (!dist.log_likes.empty()) dist.bins = freedman_diaconis_bins(dist.log_likes);
    return dist;
}

std::vector<std::pair<UtcDate, double>> daily_followers(const FollowerSeries& series,
                                                        const std::string& candidate) {
    const auto& snaps = series.snapshots(candidate);
    UtcDate first = utc_date_of(snaps.front().at);
    UtcDate last = utc_date_of(snaps.back().at);
    std::vector<std::pair<UtcDate, double>> out;
    for (std::int64_t t = noon_of(first); t <= noon_of(last); t += 86400) {
        UtcDate day = utc_date_of(t);
        out.emplace_back(day, follower_millions_on_day(series, candidate, day) * 1e6);
    }
    return out;
}

PlotDataFiles build_plot_data(const std::vector<Tweet>& tweets, const FollowerSeries& series) {
    PlotDataFiles files;
    std::ostringstream log_csv, hist_csv, follow_csv;
    log_csv << "candidate,log_likes\n";
    hist_csv << "candidate,bin_low,bin_high,count\n";
    follow_csv << "candidate,date,followers\n";

    nlohmann::json summary = nlohmann::json::object();
    char buf[64];
    for (const std::string& candidate : candidates_of(tweets)) {
        LogLikesDistribution dist = log_likes_distribution(tweets, candidate);
        for (double v : dist.log_likes) {
            std::snprintf(buf, sizeof buf, "%.12g", v);
            log_csv << candidate << ',' << buf << '\n';
        }
        for (const HistogramBin& bin : dist.bins) {
            std::snprintf(buf, sizeof buf, "%.12g", bin.low);
            hist_csv << candidate << ',' << buf << ',';
            std::snprintf(buf, sizeof buf, "%.12g", bin.high);
            hist_csv << buf << ',' << bin.count << '\n';
        }
        summary[candidate] = {{"dropped_zero_likes", dist.dropped_zero_likes},
                              {"log_rows", dist.log_likes.size()}};
        if (series.has(candidate)) {
            for (const auto& [day, value] : daily_followers(series, candidate)) {
                std::snprintf(buf, sizeof buf, "%.12g", value);
                follow_csv << candidate << ',' << format_date(day) << ',' << buf << '\n';
            }
        }
    }
    files.log_likes_csv = log_csv.str();
    files.log_likes_hist_csv = hist_csv.str();
    files.followers_csv = follow_csv.str();
    files.summary_json = summary.dump(2) + "\n";
    return files;
}

void emit_plot_data(const std::vector<Tweet>& tweets, const FollowerSeries& series,
                    const std::string& out_dir) {
    PlotDataFiles files = build_plot_data(tweets, series);
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    auto write = [&](const std::string& name, const std::string& content) {
        fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path, std::ios::trunc);
        if (!out) raise(errc::io, kModule, "cannot write '" + path.string() + "'");
        out << content;
        if (!out) raise(errc::io, kModule, "write failed for '" + path.string() + "'");
    };
    write("loglikes.csv", files.log_likes_csv);
    write("loglikes_hist.csv", files.log_likes_hist_csv);
    write("followers_daily.csv", files.followers_csv);
    write("plotdata_summary.json", files.summary_json);
}

}  // namespace liketally
