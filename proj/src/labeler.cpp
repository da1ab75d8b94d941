#include "labeler.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "corpus.hpp"
#include "errors.hpp"

namespace liketally {

namespace {

constexpr const char* kModule = "labeler";
using json = nlohmann::json;

#include "casefold_table.inc"

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

void fold_codepoint(std::string& out, char32_t cp) {
    const FoldSingle* begin = std::begin(kFoldSingles);
    const FoldSingle* end = std::end(kFoldSingles);
    const FoldSingle* it = std::lower_bound(
        begin, end, cp, [](const FoldSingle& e, char32_t v) { return e.from < v; });
    if (it != end && it->from == cp) {
        append_utf8(out, it->to);
        return;
    }
    for (const FoldMulti& e : kFoldMultis) {
        if (e.from == cp) {
            for (char32_t t : e.to)
                if (t) append_utf8(out, t);
            return;
        }
    }
    append_utf8(out, cp);
}

}  // namespace

std::string casefold_utf8(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char b = static_cast<unsigned char>(text[i]);
        if (b < 0x80) {
            out += (b >= 'A' && b <= 'Z') ? static_cast<char>(b + 32) : text[i];
            ++i;
            continue;
        }
        int len = (b >= 0xF0) ? 4 : (b >= 0xE0) ? 3 : (b >= 0xC0) ? 2 : 1;
        if (len == 1 || i + len > n) {  // stray continuation or truncated sequence
            out += text[i];
            ++i;
            continue;
        }
        char32_t cp = b & (0x7F >> len);
        bool valid = true;
        for (int k = 1; k < len; ++k) {
            unsigned char c = static_cast<unsigned char>(text[i + k]);
            if ((c & 0xC0) != 0x80) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (c & 0x3F);
        }
        if (!valid) {
            out += text[i];
            ++i;
            continue;
        }
        fold_codepoint(out, cp);
        i += len;
    }
    return out;
}

namespace {

bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool contains(const std::string& haystack, const std::string& needle, bool word_boundary) {
    if (needle.empty()) return false;
    if (!word_boundary) return haystack.find(needle) != std::string::npos;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
        std::size_t end = pos + needle.size();
        bool right_ok = end == haystack.size() || !is_word_char(haystack[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

TopicRule parse_rule(const std::string& topic_id, const json& spec, TopicKind kind,
                     bool word_boundary) {
    TopicRule rule;
    rule.topic_id = topic_id;
    rule.kind = kind;
    rule.word_boundary = word_boundary;
    if (!spec.is_object()) raise(errc::config, kModule, "rule '" + topic_id + "' must be an object");
    auto pats = spec.find("patterns");
    if (pats == spec.end() || !pats->is_array() || pats->empty())
        raise(errc::config, kModule,
              "rule '" + topic_id + "' must declare a non-empty 'patterns' array");
    for (const json& p : *pats) {
        if (!p.is_string() || p.get<std::string>().empty())
            raise(errc::config, kModule, "rule '" + topic_id + "' has an empty pattern");
        rule.patterns.push_back(p.get<std::string>());
    }
    if (kind == TopicKind::figure) {
        auto cs = spec.find("case_sensitive");
        if (cs != spec.end()) {
            if (!cs->is_boolean())
                raise(errc::config, kModule,
                      "rule '" + topic_id + "': case_sensitive must be a boolean");
            rule.case_sensitive = cs->get<bool>();
        }
    }
    // Issue matching always lowercases; fold the stored patterns so the
    // comparison happens in folded space on both sides.
    if (!rule.case_sensitive)
        for (std::string& p : rule.patterns) p = casefold_utf8(p);
    return rule;
}

}  // namespace

RuleSet RuleSet::from_json(const std::string& json_text, bool word_boundary) {
    json root = json::parse(json_text, nullptr, false);
    if (root.is_discarded() || !root.is_object())
        raise(errc::config, kModule, "rule file is not a JSON object");

    RuleSet set;
    auto load_group = [&](const char* key, TopicKind kind) {
        auto group = root.find(key);
        if (group == root.end()) return;
        if (!group->is_object())
            raise(errc::config, kModule, std::string("'") + key + "' must be an object");
        for (auto it = group->begin(); it != group->end(); ++it) {
            if (set.has(it.key()))
                raise(errc::config, kModule, "duplicate topic id '" + it.key() + "'");
            set.rules_.push_back(parse_rule(it.key(), it.value(), kind, word_boundary));
        }
    };
    load_group("figures", TopicKind::figure);
    load_group("issues", TopicKind::issue);
    if (set.rules_.empty()) raise(errc::config, kModule, "rule file declares no topics");
    std::sort(set.rules_.begin(), set.rules_.end(),
              [](const TopicRule& a, const TopicRule& b) { return a.topic_id < b.topic_id; });
    return set;
}

RuleSet RuleSet::load(const std::string& path, bool word_boundary) {
    std::ifstream in(path);
    if (!in) raise(errc::io, kModule, "cannot open rule file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str(), word_boundary);
}

const TopicRule* RuleSet::find(const std::string& topic_id) const {
    auto it = std::lower_bound(rules_.begin(), rules_.end(), topic_id,
                               [](const TopicRule& r, const std::string& v) { return r.topic_id < v; });
    if (it != rules_.end() && it->topic_id == topic_id) return &*it;
    return nullptr;
}

std::size_t RuleSet::figure_count() const {
    return static_cast<std::size_t>(std::count_if(rules_.begin(), rules_.end(), [](const TopicRule& r) {
        return r.kind == TopicKind::figure;
    }));
}

std::size_t RuleSet::issue_count() const { return rules_.size() - figure_count(); }

std::vector<std::string> RuleSet::topic_ids() const {
    std::vector<std::string> ids;
    ids.reserve(rules_.size());
    for (const TopicRule& r : rules_) ids.push_back(r.topic_id);
    return ids;
}

std::set<std::string> label_tweet(const std::string& text, const RuleSet& rules) {
    std::set<std::string> topics;
    if (text.empty()) return topics;
    const std::string folded = casefold_utf8(text);
    for (const TopicRule& rule : rules.rules()) {
        const std::string& haystack = rule.case_sensitive ? text : folded;
        for (const std::string& pattern : rule.patterns) {
            if (contains(haystack, pattern, rule.word_boundary)) {
                topics.insert(rule.topic_id);
                break;
            }
        }
    }
    return topics;
}

std::vector<TopicLabels> label_tweets(const std::vector<Tweet>& tweets, const RuleSet& rules) {
    std::vector<TopicLabels> out;
    out.reserve(tweets.size());
    for (const Tweet& t : tweets) out.push_back({t.id, label_tweet(t.text, rules)});
    return out;
}

std::map<std::string, long long> topic_frequencies(const std::vector<Tweet>& tweets,
                                                   const std::vector<TopicLabels>& labels,
                                                   const RuleSet& rules,
                                                   const std::string& candidate) {
    if (labels.size() != tweets.size())
        raise(errc::invalid_argument, kModule, "labels and tweets are misaligned");
    std::map<std::string, long long> counts;
    for (const std::string& id : rules.topic_ids()) counts[id] = 0;
    for (std::size_t i = 0; i < tweets.size(); ++i) {
        if (tweets[i].candidate != candidate || tweets[i].is_retweet) continue;
        for (const std::string& topic : labels[i].topics) ++counts[topic];
    }
    return counts;
}

}  // namespace liketally
