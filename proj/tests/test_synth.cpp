#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "corpus.hpp"
#include "errors.hpp"
#include "features.hpp"
#include "labeler.hpp"
#include "synth.hpp"

using namespace liketally;

namespace {

SynthSpec basic_spec() {
    SynthSpec spec;
    spec.candidate = "synth";
    spec.n = 500;
    spec.topic_prevalences = {0.3, 0.2};
    spec.beta = {1.0, 0.3, 0.01, -0.2, 0.1, 0.5, -0.3};
    spec.alpha = 0.6;
    spec.seed = 99;
    return spec;
}

}  // namespace

TEST_CASE("spec validation rejects malformed specs") {
    SynthSpec spec = basic_spec();
    spec.beta.pop_back();
    CHECK_THROWS_AS(generate(spec), Error);

    spec = basic_spec();
    spec.topic_prevalences[0] = 1.5;
    CHECK_THROWS_AS(generate(spec), Error);

    spec = basic_spec();
    spec.n = 0;
    CHECK_THROWS_AS(generate(spec), Error);

    spec = basic_spec();
    spec.topic_names = {"kwaa", "kwaamore"};  // substring collision
    CHECK_THROWS_AS(generate(spec), Error);
}

TEST_CASE("spec JSON round-trips") {
    SynthSpec spec = basic_spec();
    SynthSpec parsed = SynthSpec::from_json(spec.to_json());
    CHECK(parsed.n == spec.n);
    CHECK(parsed.alpha == spec.alpha);
    CHECK(parsed.beta == spec.beta);
    CHECK(parsed.seed == spec.seed);
    CHECK(parsed.topic_prevalences == spec.topic_prevalences);
}

TEST_CASE("alpha 0 intercept-only: sample mean near exp(beta0)") {
    SynthSpec spec;
    spec.candidate = "synth";
    spec.n = 100000;
    spec.beta = {std::log(5.0), 0.0, 0.0, 0.0, 0.0};
    spec.alpha = 0.0;
    spec.seed = 7;
    // Degenerate controls so mu = 5 for every row.
    spec.controls.followers_lognorm_sigma = 0.0;
    spec.controls.hyperlink_p = 0.0;
    spec.controls.self_reference_p = 0.0;
    spec.controls.length_mean = 0.0;
    SynthCorpus corpus = generate(spec);
    double mean = corpus.design.y.mean();
    CHECK(mean > 4.9);
    CHECK(mean < 5.1);
}

TEST_CASE("NB variance identity: var ~ mu + alpha mu^2") {
    SynthSpec spec;
    spec.candidate = "synth";
    spec.n = 100000;
    spec.beta = {std::log(5.0), 0.0, 0.0, 0.0, 0.0};
    spec.alpha = 1.0;
    spec.seed = 11;
    spec.controls.followers_lognorm_sigma = 0.0;
    spec.controls.hyperlink_p = 0.0;
    spec.controls.self_reference_p = 0.0;
    spec.controls.length_mean = 0.0;
    SynthCorpus corpus = generate(spec);
    double mean = corpus.design.y.mean();
    double var = (corpus.design.y.array() - mean).square().sum() /
                 static_cast<double>(spec.n - 1);
    CHECK(std::fabs(var - 30.0) / 30.0 < 0.05);  // mu + alpha mu^2 = 30
    CHECK(std::fabs(mean - 5.0) / 5.0 < 0.05);
}

TEST_CASE("generated counts are non-negative integers") {
    SynthCorpus corpus = generate(basic_spec());
    for (Eigen::Index i = 0; i < corpus.design.y.size(); ++i) {
        CHECK(corpus.design.y(i) >= 0.0);
        CHECK(std::floor(corpus.design.y(i)) == corpus.design.y(i));
    }
}

TEST_CASE("fixed seeds reproduce byte-identical output") {
    namespace fs = std::filesystem;
    SynthSpec spec = basic_spec();
    spec.n = 200;
    auto dir_a = fs::temp_directory_path() / "lt_synth_a";
    auto dir_b = fs::temp_directory_path() / "lt_synth_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    emit_corpus(spec, generate(spec), dir_a.string());
    emit_corpus(spec, generate(spec), dir_b.string());
    for (const char* name : {"tweets.jsonl", "followers.csv", "rules_synth.json", "truth.json"}) {
        std::ifstream a(dir_a / name), b(dir_b / name);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
        CHECK(!sa.str().empty());
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    // Different seed, different draws.
    SynthSpec other = spec;
    other.seed = spec.seed + 1;
    SynthCorpus base_corpus = generate(spec);
    SynthCorpus other_corpus = generate(other);
    CHECK((base_corpus.design.y - other_corpus.design.y).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("emitted corpus rebuilds to the generated design matrix") {
    namespace fs = std::filesystem;
    SynthSpec spec = basic_spec();
    spec.n = 300;
    SynthCorpus corpus = generate(spec);
    auto dir = fs::temp_directory_path() / "lt_synth_roundtrip";
    fs::remove_all(dir);
    emit_corpus(spec, corpus, dir.string());

    auto tweets = parse_tweets((dir / "tweets.jsonl").string());
    auto followers = parse_followers((dir / "followers.csv").string());
    RuleSet rules = RuleSet::load((dir / "rules_synth.json").string());
    auto labels = label_tweets(tweets, rules);
    DesignMatrix rebuilt = build_design_matrix(tweets, labels, followers, "synth", rules);

    REQUIRE(rebuilt.rows() == corpus.design.rows());
    REQUIRE(rebuilt.column_names == corpus.design.column_names);  // no pruning expected here
    CHECK((rebuilt.y - corpus.design.y).cwiseAbs().maxCoeff() == 0.0);
    CHECK((rebuilt.X - corpus.design.X).cwiseAbs().maxCoeff() < 1e-12);
    fs::remove_all(dir);
}
