#include "synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "corpus.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace liketally {

namespace {

constexpr const char* kModule = "synth";
using json = nlohmann::json;

// 2015-09-18T00:00:00Z, the opening day of the study window.
constexpr std::int64_t kBaseDay = 1442534400;

std::string generated_topic_name(std::size_t index) {
    // Fixed-width marker tokens; equal length keeps any one from being a
    // substring of another.
    std::string name = "kwaa";
    name[2] = static_cast<char>('a' + index / 26);
    name[3] = static_cast<char>('a' + index % 26);
    return name;
}

}  // namespace

std::vector<std::string> SynthSpec::column_names() const {
    std::vector<std::string> names = {kIntercept, kFollowers, kLengthWords, kHyperlink,
                                      kSelfReference};
    for (std::size_t j = 0; j < topic_prevalences.size(); ++j)
        names.push_back(j < topic_names.size() ? topic_names[j] : generated_topic_name(j));
    return names;
}

void SynthSpec::validate() const {
    if (n < 1) raise(errc::validation, kModule, "n must be >= 1");
    if (alpha < 0.0) raise(errc::validation, kModule, "alpha must be >= 0");
    if (beta.size() != column_count())
        raise(errc::validation, kModule,
              "beta has " + std::to_string(beta.size()) + " entries, expected " +
                  std::to_string(column_count()));
    for (double p : topic_prevalences)
        if (!(p >= 0.0 && p <= 1.0))
            raise(errc::validation, kModule, "topic prevalences must lie in [0,1]");
    if (!topic_names.empty() && topic_names.size() != topic_prevalences.size())
        raise(errc::validation, kModule, "topic_names and topic_prevalences sizes disagree");
    if (candidate.empty()) raise(errc::validation, kModule, "candidate must be non-empty");

    std::vector<std::string> tokens = column_names();
    tokens.erase(tokens.begin(), tokens.begin() + 5);
    tokens.push_back(candidate);
    tokens.push_back("update");
    tokens.push_back("filler");
    for (std::size_t a = 0; a < tokens.size(); ++a) {
        if (tokens[a].find_first_of(" \t\n") != std::string::npos)
            raise(errc::validation, kModule, "marker '" + tokens[a] + "' contains whitespace");
        for (std::size_t b = 0; b < tokens.size(); ++b)
            if (a != b && tokens[b].find(tokens[a]) != std::string::npos)
                raise(errc::validation, kModule,
                      "marker '" + tokens[a] + "' is a substring of '" + tokens[b] + "'");
    }
}

SynthSpec SynthSpec::from_json(const std::string& json_text) {
    json root = json::parse(json_text, nullptr, false);
    if (root.is_discarded() || !root.is_object())
        raise(errc::validation, kModule, "synth spec is not a JSON object");
    SynthSpec spec;
    try {
        if (root.contains("candidate")) spec.candidate = root["candidate"].get<std::string>();
        if (root.contains("n")) spec.n = root["n"].get<long long>();
        if (root.contains("beta")) spec.beta = root["beta"].get<std::vector<double>>();
        if (root.contains("alpha")) spec.alpha = root["alpha"].get<double>();
        if (root.contains("topic_prevalences"))
            spec.topic_prevalences = root["topic_prevalences"].get<std::vector<double>>();
        if (root.contains("topic_names"))
            spec.topic_names = root["topic_names"].get<std::vector<std::string>>();
        if (root.contains("seed")) spec.seed = root["seed"].get<std::uint64_t>();
        if (root.contains("controls")) {
            const json& c = root["controls"];
            if (c.contains("followers_lognorm_mu"))
                spec.controls.followers_lognorm_mu = c["followers_lognorm_mu"].get<double>();
            if (c.contains("followers_lognorm_sigma"))
                spec.controls.followers_lognorm_sigma = c["followers_lognorm_sigma"].get<double>();
            if (c.contains("length_mean")) spec.controls.length_mean = c["length_mean"].get<double>();
            if (c.contains("hyperlink_p")) spec.controls.hyperlink_p = c["hyperlink_p"].get<double>();
            if (c.contains("self_reference_p"))
                spec.controls.self_reference_p = c["self_reference_p"].get<double>();
        }
    } catch (const json::exception& e) {
        raise(errc::validation, kModule, std::string("bad synth spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string SynthSpec::to_json() const {
    json root = {{"candidate", candidate},
                 {"n", n},
                 {"beta", beta},
                 {"alpha", alpha},
                 {"topic_prevalences", topic_prevalences},
                 {"seed", seed},
                 {"controls",
                  {{"followers_lognorm_mu", controls.followers_lognorm_mu},
                   {"followers_lognorm_sigma", controls.followers_lognorm_sigma},
                   {"length_mean", controls.length_mean},
                   {"hyperlink_p", controls.hyperlink_p},
                   {"self_reference_p", controls.self_reference_p}}}};
    std::vector<std::string> names = column_names();
    root["topic_names"] = std::vector<std::string>(names.begin() + 5, names.end());
    return root.dump(2);
}

SynthCorpus generate(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    const std::size_t topics = spec.topic_prevalences.size();
    const Eigen::Index n = static_cast<Eigen::Index>(spec.n);
    const Eigen::Index k = static_cast<Eigen::Index>(spec.column_count());
    std::vector<std::string> names = spec.column_names();
    std::vector<std::string> markers(names.begin() + 5, names.end());

    SynthCorpus corpus;
    corpus.design.candidate = spec.candidate;
    corpus.design.column_names = names;
    corpus.design.topic_columns = markers;
    corpus.design.X.resize(n, k);
    corpus.design.y.resize(n);
    corpus.texts.reserve(spec.n);
    corpus.created_at.reserve(spec.n);
    corpus.followers_raw.reserve(spec.n);

    Eigen::Map<const Eigen::VectorXd> beta(spec.beta.data(), k);
    for (Eigen::Index i = 0; i < n; ++i) {
        // One fixed draw order per row keeps the stream reproducible.
        double followers_millions =
            std::exp(spec.controls.followers_lognorm_mu +
                     spec.controls.followers_lognorm_sigma * rng.normal());
        double followers_count = std::llround(followers_millions * 1e6);
        followers_millions = followers_count / 1e6;  // match the file round-trip exactly

        long long extra_words = rng.poisson(spec.controls.length_mean);
        bool hyperlink = rng.bernoulli(spec.controls.hyperlink_p);
        bool self_ref = rng.bernoulli(spec.controls.self_reference_p);

        std::set<std::string> labels;
        std::string text = "update";
        long long words = 1;
        for (std::size_t j = 0; j < topics; ++j) {
            bool active = rng.bernoulli(spec.topic_prevalences[j]);
            corpus.design.X(i, 5 + static_cast<Eigen::Index>(j)) = active ? 1.0 : 0.0;
            if (active) {
                labels.insert(markers[j]);
                text += " " + markers[j];
                ++words;
            }
        }
        if (self_ref) {
            labels.insert(spec.candidate);
            text += " " + spec.candidate;
            ++words;
        }
        for (long long w = 0; w < extra_words; ++w) {
            text += " filler";
            ++words;
        }
        if (hyperlink) {
            text += " http://t.co/x";
            ++words;
        }

        corpus.design.X(i, 0) = 1.0;
        corpus.design.X(i, 1) = followers_millions;
        corpus.design.X(i, 2) = static_cast<double>(words);
        corpus.design.X(i, 3) = hyperlink ? 1.0 : 0.0;
        corpus.design.X(i, 4) = self_ref ? 1.0 : 0.0;
        corpus.design.row_labels.push_back(std::move(labels));
        corpus.texts.push_back(std::move(text));
        corpus.created_at.push_back(kBaseDay + i * 86400 + 15 * 3600);
        corpus.followers_raw.push_back(followers_count);

        double eta = corpus.design.X.row(i).dot(beta);
        eta = std::clamp(eta, -30.0, 30.0);
        double mu = std::exp(eta);
        double lambda = spec.alpha > 0.0
                            ? mu * rng.gamma(1.0 / spec.alpha, spec.alpha)
                            : mu;
        corpus.design.y(i) = static_cast<double>(rng.poisson(lambda));
    }
    return corpus;
}

void emit_corpus(const SynthSpec& spec, const SynthCorpus& corpus, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    auto open = [&](const std::string& name) {
        fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path, std::ios::trunc);
        if (!out) raise(errc::io, kModule, "cannot write '" + path.string() + "'");
        return out;
    };

    {
        std::ofstream out = open("tweets.jsonl");
        std::vector<Tweet> tweets(corpus.texts.size());
        for (std::size_t i = 0; i < corpus.texts.size(); ++i) {
            char id[16];
            std::snprintf(id, sizeof id, "s%06zu", i);
            tweets[i] = Tweet{id, spec.candidate, corpus.created_at[i], corpus.texts[i],
                              static_cast<long long>(corpus.design.y(static_cast<Eigen::Index>(i))),
                              false};
        }
        out << serialize_tweets(tweets);
    }
    {
        std::ofstream out = open("followers.csv");
        out << "candidate,at,count\n";
        for (std::size_t i = 0; i < corpus.followers_raw.size(); ++i) {
            std::int64_t noon = kBaseDay + static_cast<std::int64_t>(i) * 86400 + 12 * 3600;
            out << spec.candidate << ',' << format_rfc3339(noon) << ','
                << static_cast<long long>(corpus.followers_raw[i]) << '\n';
        }
    }
    {
        std::ofstream out = open("rules_synth.json");
        json rules;
        rules["figures"][spec.candidate] = {{"patterns", {spec.candidate}},
                                            {"case_sensitive", false}};
        json issue_rules = json::object();
        std::vector<std::string> names = spec.column_names();
        for (std::size_t j = 5; j < names.size(); ++j)
            issue_rules[names[j]] = {{"patterns", {names[j]}}};
        rules["issues"] = issue_rules;
        out << rules.dump(2) << '\n';
    }
    {
        std::ofstream out = open("truth.json");
        json truth = json::parse(spec.to_json());
        truth["columns"] = spec.column_names();
        out << truth.dump(2) << '\n';
    }
}

}  // namespace liketally
