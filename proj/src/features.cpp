#include "features.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

#include "errors.hpp"
#include "log.hpp"

namespace liketally {

namespace {
constexpr const char* kModule = "features";
}

Eigen::Index DesignMatrix::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < column_names.size(); ++i)
        if (column_names[i] == name) return static_cast<Eigen::Index>(i);
    raise(errc::unknown_topic, kModule, "no column named '" + name + "'");
}

std::string DesignMatrix::to_csv() const {
    std::ostringstream out;
    out << "likes";
    for (const std::string& name : column_names) out << ',' << name;
    out << '\n';
    char buf[64];
    for (Eigen::Index i = 0; i < rows(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", y(i));
        out << buf;
        for (Eigen::Index j = 0; j < cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", X(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
    return out.str();
}

long long count_words(const std::string& text) {
    // Tokens are maximal runs separated by Unicode whitespace; in UTF-8 the
    // ASCII space classes plus U+00A0, U+2000..200A, U+2028/9, U+202F,
    // U+205F, U+3000 all begin with distinctive bytes.
    long long count = 0;
    bool in_token = false;
    std::size_t i = 0;
    auto is_space_at = [&](std::size_t pos, int& adv) {
        unsigned char b = static_cast<unsigned char>(text[pos]);
        adv = 1;
        if (b == ' ' || b == '\t' || b == '\n' || b == '\r' || b == '\f' || b == '\v') return true;
        if (b == 0xC2 && pos + 1 < text.size() &&
            static_cast<unsigned char>(text[pos + 1]) == 0xA0) {
            adv = 2;
            return true;
        }
        if (b == 0xE2 && pos + 2 < text.size()) {
            unsigned char b1 = static_cast<unsigned char>(text[pos + 1]);
            unsigned char b2 = static_cast<unsigned char>(text[pos + 2]);
            bool general = b1 == 0x80 && ((b2 >= 0x80 && b2 <= 0x8A) || b2 == 0xA8 || b2 == 0xA9 ||
                                          b2 == 0xAF);
            bool math = b1 == 0x81 && b2 == 0x9F;
            if (general || math) {
                adv = 3;
                return true;
            }
        }
        if (b == 0xE3 && pos + 2 < text.size() &&
            static_cast<unsigned char>(text[pos + 1]) == 0x80 &&
            static_cast<unsigned char>(text[pos + 2]) == 0x80) {
            adv = 3;
            return true;
        }
        return false;
    };
    while (i < text.size()) {
        int adv = 1;
        if (is_space_at(i, adv)) {
            in_token = false;
            i += adv;
        } else {
            if (!in_token) {
                ++count;
                in_token = true;
            }
            ++i;
        }
    }
    return count;
}

bool has_hyperlink(const std::string& text) {
    return text.find("http://") != std::string::npos ||
           text.find("https://") != std::string::npos || text.find("t.co/") != std::string::npos;
}

DesignMatrix build_design_matrix(const std::vector<Tweet>& tweets,
                                 const std::vector<TopicLabels>& labels,
                                 const FollowerSeries& series, const std::string& candidate,
                                 const RuleSet& rules) {
    if (labels.size() != tweets.size())
        raise(errc::invalid_argument, kModule, "labels and tweets are misaligned");

    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < tweets.size(); ++i)
        if (tweets[i].candidate == candidate && !tweets[i].is_retweet) rows.push_back(i);
    if (rows.empty())
        raise(errc::empty_matrix, kModule,
              "candidate '" + candidate + "' has no non-retweet tweets");

    // All topics except the candidate's own figure rule, which feeds the
    // self_reference control instead.
    std::vector<std::string> topic_pool;
    for (const std::string& id : rules.topic_ids())
        if (id != candidate) topic_pool.push_back(id);

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    DesignMatrix design;
    design.candidate = candidate;
    design.y.resize(n);
    design.row_labels.reserve(rows.size());

    Eigen::MatrixXd controls(n, 5);
    Eigen::MatrixXd topics(n, static_cast<Eigen::Index>(topic_pool.size()));
    for (Eigen::Index r = 0; r < n; ++r) {
        const Tweet& t = tweets[rows[static_cast<std::size_t>(r)]];
        const std::set<std::string>& labs = labels[rows[static_cast<std::size_t>(r)]].topics;
        design.row_labels.push_back(labs);
        design.y(r) = static_cast<double>(t.likes);

        double millions = follower_millions_on_day(series, candidate, utc_date_of(t.created_at));
        if (!(millions > 0.0))
            raise(errc::validation, kModule,
                  "follower count for '" + candidate + "' on " +
                      format_date(utc_date_of(t.created_at)) + " is not positive");
        controls(r, 0) = 1.0;
        controls(r, 1) = millions;
        controls(r, 2) = static_cast<double>(count_words(t.text));
        controls(r, 3) = has_hyperlink(t.text) ? 1.0 : 0.0;
        controls(r, 4) = labs.count(candidate) ? 1.0 : 0.0;
        for (std::size_t j = 0; j < topic_pool.size(); ++j)
            topics(r, static_cast<Eigen::Index>(j)) = labs.count(topic_pool[j]) ? 1.0 : 0.0;
    }

    // Controls always stay (column count = 5 + surviving topics); a
    // constant control surfaces as a singular design at fit time.
    const char* control_names[5] = {kIntercept, kFollowers, kLengthWords, kHyperlink,
                                    kSelfReference};
    for (Eigen::Index j = 1; j < 5; ++j)
        if (controls.col(j).maxCoeff() == controls.col(j).minCoeff())
            log::warn("design for '" + candidate + "': control '" + control_names[j] +
                      "' is constant");
    std::vector<Eigen::Index> keep_topics;
    for (std::size_t j = 0; j < topic_pool.size(); ++j) {
        Eigen::Index col = static_cast<Eigen::Index>(j);
        if (topics.col(col).maxCoeff() == topics.col(col).minCoeff()) {
            design.pruned_topics.push_back(topic_pool[j]);
            continue;
        }
        keep_topics.push_back(col);
    }
    if (!design.pruned_topics.empty()) {
        std::string names;
        for (const std::string& id : design.pruned_topics) names += " " + id;
        log::info("design for '" + candidate + "': dropped constant topic columns:" + names);
    }

    design.X.resize(n, static_cast<Eigen::Index>(5 + keep_topics.size()));
    Eigen::Index out = 0;
    for (Eigen::Index j = 0; j < 5; ++j) {
        design.X.col(out++) = controls.col(j);
        design.column_names.push_back(control_names[j]);
    }
    for (Eigen::Index j : keep_topics) {
        design.X.col(out++) = topics.col(j);
        design.column_names.push_back(topic_pool[static_cast<std::size_t>(j)]);
        design.topic_columns.push_back(topic_pool[static_cast<std::size_t>(j)]);
    }
    return design;
}

}  // namespace liketally
