#include <doctest.h>

#include <algorithm>
#include <random>

#include "corpus.hpp"
#include "errors.hpp"
#include "labeler.hpp"
#include "support.hpp"

using namespace liketally;
using testsupport::tweet;

TEST_CASE("default rule set carries 12 figures and 10 issues") {
    RuleSet rules = RuleSet::default_rules();
    CHECK(rules.figure_count() == 12);
    CHECK(rules.issue_count() == 10);
    CHECK(rules.has("obama"));
    CHECK(rules.has("wall_street"));
}

TEST_CASE("duplicate topic ids are a config error") {
    const char* dup = R"({
        "figures": {"obama": {"patterns": ["obama"]}},
        "issues":  {"obama": {"patterns": ["obama"]}}
    })";
    try {
        RuleSet::from_json(dup);
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::config);
    }
}

TEST_CASE("empty pattern lists and empty patterns are config errors") {
    CHECK_THROWS_AS(RuleSet::from_json(R"({"issues": {"x": {"patterns": []}}})"), Error);
    CHECK_THROWS_AS(RuleSet::from_json(R"({"issues": {"x": {"patterns": [""]}}})"), Error);
    CHECK_THROWS_AS(RuleSet::from_json(R"({"figures": {}, "issues": {}})"), Error);
}

// The three matching rules the study states explicitly.
TEST_CASE("tweets containing Obama get the obama topic") {
    RuleSet rules = RuleSet::default_rules();
    auto topics = label_tweet("Thank you Obama", rules);
    CHECK(topics.count("obama") == 1);
}

TEST_CASE("lowercase transform lets Planned Parenthood match the abortion topic") {
    RuleSet rules = RuleSet::default_rules();
    auto topics = label_tweet("Defund Planned Parenthood now", rules);
    CHECK(topics.count("abortion") == 1);
    CHECK(label_tweet("the abortion debate", rules).count("abortion") == 1);
}

TEST_CASE("rubio matching is case-sensitive: marcorubio or Rubio") {
    RuleSet rules = RuleSet::default_rules();
    CHECK(label_tweet(".@marcorubio is wrong", rules).count("rubio") == 1);
    CHECK(label_tweet("Rubio said it", rules).count("rubio") == 1);
    CHECK(label_tweet("MARCORUBIO", rules).count("rubio") == 0);
    CHECK(label_tweet("rubio lowercased", rules).count("rubio") == 0);
}

TEST_CASE("empty text labels nothing") {
    RuleSet rules = RuleSet::default_rules();
    CHECK(label_tweet("", rules).empty());
}

TEST_CASE("labeling is idempotent and deterministic") {
    RuleSet rules = RuleSet::default_rules();
    const std::string text = "Trump on immigration, Clinton on women: the economy decides";
    auto first = label_tweet(text, rules);
    auto second = label_tweet(text, rules);
    CHECK(first == second);
    CHECK(first.count("trump") == 1);
    CHECK(first.count("immigration") == 1);
    CHECK(first.count("clinton") == 1);
    CHECK(first.count("women") == 1);
    CHECK(first.count("economy") == 1);
}

TEST_CASE("appending a pattern adds its topic and never removes others") {
    RuleSet rules = RuleSet::default_rules();
    std::mt19937 rng(11);
    const std::string bases[] = {"nothing to see", "the economy tonight", "ISIS and Iran",
                                 "Senator Sanders speaks"};
    const std::string patterns[] = {"obama", "gun", "wall street", "immigration", "kasich"};
    for (const std::string& base : bases) {
        auto before = label_tweet(base, rules);
        for (const std::string& pattern : patterns) {
            auto after = label_tweet(base + " " + pattern, rules);
            for (const std::string& topic : before) CHECK(after.count(topic) == 1);
            CHECK(after.size() >= before.size());
        }
    }
}

TEST_CASE("issue labels are unchanged under upper-casing") {
    RuleSet rules = RuleSet::default_rules();
    const std::string texts[] = {"gun control and the economy", "students deserve education",
                                 "Wall Street greed", "drugs flow over the border, ISIS too"};
    for (const std::string& text : texts) {
        std::string upper = text;
        std::transform(upper.begin(), upper.end(), upper.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        auto lower_topics = label_tweet(text, rules);
        auto upper_topics = label_tweet(upper, rules);
        for (const TopicRule& rule : rules.rules()) {
            if (rule.kind != TopicKind::issue) continue;
            CHECK(lower_topics.count(rule.topic_id) == upper_topics.count(rule.topic_id));
        }
    }
}

TEST_CASE("substring containment of texts implies containment of topics") {
    RuleSet rules = RuleSet::default_rules();
    const std::string full = "Trump and Clinton argue about immigration and the economy on Iran";
    for (std::size_t len = 0; len <= full.size(); len += 7) {
        auto partial = label_tweet(full.substr(0, len), rules);
        auto complete = label_tweet(full, rules);
        for (const std::string& topic : partial) CHECK(complete.count(topic) == 1);
    }
}

TEST_CASE("unicode case folding reaches beyond ASCII") {
    RuleSet rules = RuleSet::from_json(R"({"issues": {
        "strasse": {"patterns": ["strasse"]},
        "turkey":  {"patterns": ["istanbul"]}
    }})");
    // U+00DF sharp s folds to "ss"; U+0130 dotted capital I folds to i + combining dot.
    CHECK(label_tweet("die Stra\xC3\x9F""e ist hier", rules).count("strasse") == 1);
    CHECK(casefold_utf8("STRA\xC3\x9F""E") == "strasse");
}

TEST_CASE("word boundary mode is available behind a flag") {
    RuleSet plain = RuleSet::from_json(R"({"issues": {"isis": {"patterns": ["isis"]}}})");
    CHECK(label_tweet("from crisis to recovery", plain).count("isis") == 1);
    RuleSet bounded =
        RuleSet::from_json(R"({"issues": {"isis": {"patterns": ["isis"]}}})", true);
    CHECK(label_tweet("from crisis to recovery", bounded).count("isis") == 0);
    CHECK(label_tweet("ISIS is defeated", bounded).count("isis") == 1);
}

TEST_CASE("topic_frequencies counts multi-labeled tweets once per topic") {
    RuleSet rules = RuleSet::from_json(R"({"issues": {
        "a": {"patterns": ["alpha"]},
        "b": {"patterns": ["beta"]}
    }})");
    std::vector<Tweet> tweets = {tweet("1", "c", 0, "alpha", 1),
                                 tweet("2", "c", 1, "alpha beta", 2),
                                 tweet("3", "c", 2, "neither", 3)};
    auto labels = label_tweets(tweets, rules);
    auto counts = topic_frequencies(tweets, labels, rules, "c");
    CHECK(counts.at("a") == 2);
    CHECK(counts.at("b") == 1);
}

TEST_CASE("topic_frequencies on empty corpus is all zeros") {
    RuleSet rules = RuleSet::default_rules();
    std::vector<Tweet> tweets;
    auto labels = label_tweets(tweets, rules);
    auto counts = topic_frequencies(tweets, labels, rules, "c");
    CHECK(counts.size() == 22);
    for (const auto& [topic, count] : counts) CHECK(count == 0);
}

TEST_CASE("fixture topic tallies match the hand count") {
    RuleSet rules = RuleSet::default_rules();
    auto tweets = parse_tweets(testsupport::fixture("tweets.jsonl"));
    auto labels = label_tweets(tweets, rules);

    auto clinton = topic_frequencies(tweets, labels, rules, "clinton");
    CHECK(clinton.at("trump") == 4);
    CHECK(clinton.at("obama") == 4);
    CHECK(clinton.at("women") == 4);
    CHECK(clinton.at("gun_control") == 3);
    CHECK(clinton.at("economy") == 3);
    CHECK(clinton.at("clinton") == 2);  // self-mentions stay visible here
    CHECK(clinton.at("isis") == 1);     // "crisis" contains "isis" by substring match
    CHECK(clinton.at("kasich") == 0);

    auto sanders = topic_frequencies(tweets, labels, rules, "sanders");
    CHECK(sanders.at("clinton") == 4);
    CHECK(sanders.at("economy") == 5);
    CHECK(sanders.at("wall_street") == 4);
    CHECK(sanders.at("education") == 3);
    CHECK(sanders.at("trump") == 3);

    auto trump = topic_frequencies(tweets, labels, rules, "trump");
    CHECK(trump.at("clinton") == 4);
    CHECK(trump.at("obama") == 3);
    CHECK(trump.at("isis") == 3);
    CHECK(trump.at("immigration") == 4);
    CHECK(trump.at("bush") == 3);
}
