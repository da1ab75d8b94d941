// Integration tests that drive the installed CLI binary; the path arrives
// as the first non-doctest argument (wired up in CMake).
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#ifndef LIKETALLY_FIXTURE_DIR
#define LIKETALLY_FIXTURE_DIR "tests/fixtures"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string g_cli_path;

std::string fixture(const char* name) {
    return std::string(LIKETALLY_FIXTURE_DIR) + "/" + name;
}

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    RunResult result;
    std::string command = g_cli_path + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buffer;
    while (std::size_t got = fread(buffer.data(), 1, buffer.size(), pipe))
        result.output.append(buffer.data(), got);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* tag) {
        path = fs::temp_directory_path() / (std::string("lt_cli_") + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string corpus_args() {
    return "--tweets " + fixture("tweets.jsonl") + " --followers " + fixture("followers.csv");
}

}  // namespace

TEST_CASE("summarize writes a three-candidate table") {
    TempDir dir("summarize");
    auto result = run_cli("summarize " + corpus_args() + " --out " + dir.path.string());
    REQUIRE(result.exit_code == 0);
    json table = json::parse(slurp(dir.path / "summary.json"));
    REQUIRE(table.is_array());
    REQUIRE(table.size() == 3);
    CHECK(table[0]["candidate"] == "clinton");
    CHECK(table[0]["n"] == 20);

    auto csv = run_cli("summarize " + corpus_args() + " --out " + dir.path.string() +
                       " --format csv");
    REQUIRE(csv.exit_code == 0);
    std::string content = slurp(dir.path / "summary.csv");
    CHECK(content.rfind("candidate,mean,sd,min,max,n\n", 0) == 0);
    CHECK(std::count(content.begin(), content.end(), '\n') == 4);  // header + 3 rows
}

TEST_CASE("summarize restricted to one candidate emits one row") {
    TempDir dir("summarize1");
    auto result = run_cli("summarize " + corpus_args() + " --candidate sanders --out " +
                          dir.path.string());
    REQUIRE(result.exit_code == 0);
    json table = json::parse(slurp(dir.path / "summary.json"));
    REQUIRE(table.size() == 1);
    CHECK(table[0]["candidate"] == "sanders");
    CHECK(table[0]["n"] == 20);
}

TEST_CASE("label emits topic frequencies") {
    TempDir dir("label");
    auto result = run_cli("label " + corpus_args() + " --out " + dir.path.string());
    REQUIRE(result.exit_code == 0);
    json table = json::parse(slurp(dir.path / "topic_frequencies.json"));
    REQUIRE(table.size() == 3);
    CHECK(table[2]["candidate"] == "trump");
    CHECK(table[2]["frequencies"]["immigration"] == 4);
}

TEST_CASE("fit writes one artifact per candidate and honors --dump-matrix") {
    TempDir dir("fit");
    auto result = run_cli("fit " + corpus_args() + " --dump-matrix --out " + dir.path.string());
    REQUIRE(result.exit_code == 0);
    for (const char* name : {"fit_clinton.json", "fit_sanders.json", "fit_trump.json",
                             "matrix_clinton.csv", "matrix_sanders.csv", "matrix_trump.csv"})
        CHECK(fs::exists(dir.path / name));
    json fit = json::parse(slurp(dir.path / "fit_trump.json"));
    CHECK(fit["converged"] == true);
    CHECK(fit["n"] == 20);
}

TEST_CASE("select and effects and rank produce their artifacts") {
    TempDir dir("pipeline");
    auto select = run_cli("select " + corpus_args() + " --candidate clinton --k 2 --out " +
                          dir.path.string());
    REQUIRE(select.exit_code == 0);
    json steps = json::parse(slurp(dir.path / "select_clinton.json"));
    CHECK(steps.size() == 2);

    auto effects = run_cli("effects " + corpus_args() + " --candidate clinton --format csv" +
                           " --out " + dir.path.string());
    REQUIRE(effects.exit_code == 0);
    CHECK(slurp(dir.path / "effects_clinton.csv").rfind("topic,effect,ci_low,ci_high\n", 0) == 0);

    auto rank = run_cli("rank " + corpus_args() + " --out " + dir.path.string());
    REQUIRE(rank.exit_code == 0);
    json reports = json::parse(slurp(dir.path / "rank.json"));
    REQUIRE(reports.size() == 3);
    CHECK(reports[0]["rank"] == 1);
}

TEST_CASE("identical runs produce byte-identical artifacts") {
    TempDir dir_a("det_a");
    TempDir dir_b("det_b");
    std::string args = corpus_args();
    REQUIRE(run_cli("rank " + args + " --out " + dir_a.path.string()).exit_code == 0);
    REQUIRE(run_cli("rank " + args + " --out " + dir_b.path.string()).exit_code == 0);
    CHECK(slurp(dir_a.path / "rank.json") == slurp(dir_b.path / "rank.json"));

    REQUIRE(run_cli("plotdata " + args + " --out " + dir_a.path.string()).exit_code == 0);
    REQUIRE(run_cli("plotdata " + args + " --out " + dir_b.path.string()).exit_code == 0);
    for (const char* name : {"loglikes.csv", "loglikes_hist.csv", "followers_daily.csv"})
        CHECK(slurp(dir_a.path / name) == slurp(dir_b.path / name));
}

TEST_CASE("a retweet-only candidate fails with a machine-readable error") {
    TempDir dir("retweets");
    fs::path tweets = dir.path / "tweets.jsonl";
    {
        std::ofstream out(tweets);
        out << R"({"id":"1","candidate":"ghost","created_at":"2015-10-02T10:00:00Z","text":"RT hi","likes":4,"is_retweet":true})"
            << "\n";
    }
    fs::path followers = dir.path / "followers.csv";
    {
        std::ofstream out(followers);
        out << "candidate,at,count\nghost,2015-10-01T09:00:00Z,1000000\n";
    }
    auto result = run_cli("fit --tweets " + tweets.string() + " --followers " +
                          followers.string() + " --out " + dir.path.string());
    CHECK(result.exit_code != 0);
    auto brace = result.output.find('{');
    REQUIRE(brace != std::string::npos);
    json err = json::parse(result.output.substr(brace));
    CHECK(err["error"]["code"] == "empty_matrix");
    CHECK(err["error"]["module"] == "features");
    CHECK(!err["error"]["message"].get<std::string>().empty());
}

TEST_CASE("simulate then rank runs the pipeline end to end on synthetic data") {
    TempDir dir("simulate");
    auto sim = run_cli("simulate --seed 42 --out " + dir.path.string());
    REQUIRE(sim.exit_code == 0);
    for (const char* name : {"tweets.jsonl", "followers.csv", "rules_synth.json", "truth.json"})
        CHECK(fs::exists(dir.path / name));

    auto rank = run_cli("rank --tweets " + (dir.path / "tweets.jsonl").string() +
                        " --followers " + (dir.path / "followers.csv").string() + " --rules " +
                        (dir.path / "rules_synth.json").string() + " --out " + dir.path.string());
    REQUIRE(rank.exit_code == 0);
    json reports = json::parse(slurp(dir.path / "rank.json"));
    REQUIRE(reports.size() == 1);
    CHECK(reports[0]["candidate"] == "synth");
}

TEST_CASE("unknown candidates are a usage error") {
    TempDir dir("badcand");
    auto result =
        run_cli("summarize " + corpus_args() + " --candidate nobody --out " + dir.path.string());
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("nobody") != std::string::npos);
}

int run_doctest(int argc, char** argv) {
    doctest::Context context;
    context.applyCommandLine(argc, argv);
    return context.run();
}

int main(int argc, char** argv) {
    // First plain argument = CLI binary path; strip it before doctest sees it.
    if (argc > 1 && argv[1][0] != '-') {
        g_cli_path = argv[1];
        argv[1] = argv[0];
        return run_doctest(argc - 1, argv + 1);
    }
    g_cli_path = "./liketally";
    return run_doctest(argc, argv);
}
