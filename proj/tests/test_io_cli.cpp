#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cdag/errors.hpp"
#include "cdag/io.hpp"
#include "cli.hpp"

using namespace cdag;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("cdag_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    [[nodiscard]] std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_data_lines(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lines = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') ++lines;
    return lines;
}

}  // namespace

TEST_CASE("dataset CSV round trip") {
    SimConfig cfg;
    cfg.p = 4;
    cfg.n = 25;
    cfg.theta = 0.5;
    const Simulation sim = simulate(cfg);
    std::stringstream ss;
    write_dataset_csv(ss, sim.data, metadata("test", 1, {}));
    const Dataset back = read_dataset_csv(ss);
    CHECK(back.n() == 25);
    CHECK(back.p() == 4);
    CHECK((back.y() - sim.data.y()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((back.x() - sim.data.x()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("dataset CSV parsing") {
    std::istringstream reordered("# comment\nx2,y1,x1,y2\n1,2,3,4\n\n5,6,7,8\n");
    const Dataset d = read_dataset_csv(reordered);
    CHECK(d.y()(0, 0) == 2);
    CHECK(d.x()(0, 1) == 1);
    CHECK(d.y()(1, 1) == 8);
    CHECK(d.x()(1, 0) == 7);

    std::istringstream y_only("y1,y2\n1,2\n");
    CHECK_FALSE(read_dataset_csv(y_only).has_secondary());

    for (const char* bad : {"", "y1,z2\n1,2\n", "y1,y1\n1,2\n", "y1,y2\n1\n", "y1,y2\n1,abc\n", "y1,x2\n1,2\n",
                            "y1,y2\n1,nan\n"}) {
        CAPTURE(bad);
        std::istringstream in(bad);
        CHECK_THROWS_AS(read_dataset_csv(in), InputError);
    }
}

TEST_CASE("graph and truth JSON round trip") {
    const std::vector<Edge> e{{0, 2}, {1, 2}, {2, 3}};
    const Dag g(4, e);
    CHECK(graph_from_json(graph_to_json(g)) == g);
    CHECK(graph_to_json(g).dump() == R"({"edges":[[0,2],[1,2],[2,3]],"p":4})");

    SimConfig cfg;
    cfg.p = 6;
    cfg.misspec_prob = 0.5;
    const GroundTruth t = simulate(cfg).truth;
    const GroundTruth back = truth_from_json(truth_to_json(t));
    CHECK(back.g == t.g);
    CHECK(back.g_prime == t.g_prime);
    CHECK(back.misspec == t.misspec);

    CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse(R"({"edges": []})")), InputError);
    CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse(R"({"p": 2, "edges": [[0, 1], [1, 0]]})")), InputError);
    CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse(R"({"p": 2, "edges": [[0, 5]]})")), InputError);
    CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse(R"({"p": 2, "edges": [0, 1]})")), InputError);
}

TEST_CASE("score table JSON") {
    ScoreTable t(3, 1);
    t.set(0, 0b010, -std::numeric_limits<double>::infinity());
    t.set(2, 0b011 & 0b001, -1.5);
    const auto j = score_table_to_json(t);
    CHECK(j["0"]["[1]"].is_null());
    CHECK(j["2"]["[0]"].get<double>() == -1.5);
    CHECK(j["1"].size() == 3);
}

TEST_CASE("number formatting keeps 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(std::strtod(format_double(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
}

TEST_CASE("cli pipeline") {
    TempDir dir;
    const auto data = dir / "d.csv", truth = dir / "t.json", graph = dir / "g.json";

    auto sim = invoke({"simulate", "--p", "5", "--n", "100", "--theta", "0", "--seed", "1", "--out-data", data,
                    "--out-truth", truth});
    REQUIRE(sim.code == 0);
    const std::string first_data = slurp(data), first_truth = slurp(truth);
    CHECK(first_data.rfind("# {", 0) == 0);
    CHECK(first_data.find("\"seed\":1") != std::string::npos);
    CHECK(nlohmann::json::parse(first_truth).contains("g_prime"));

    // Global flags may come before the subcommand as well.
    REQUIRE(invoke({"--seed", "1", "simulate", "--p", "5", "--n", "100", "--out-data", data, "--out-truth", truth}).code == 0);
    CHECK(slurp(data) == first_data);
    CHECK(slurp(truth) == first_truth);

    auto est = invoke({"estimate", "--data", data, "--mode", "cdag", "--out", graph});
    REQUIRE(est.code == 0);
    CHECK(est.out.rfind("log_score: ", 0) == 0);
    const std::string first_graph = slurp(graph);
    const nlohmann::json gj = nlohmann::json::parse(first_graph);
    CHECK(gj["meta"]["config"]["mode"] == "CDAG");
    const Dag g = graph_from_json(gj);
    CHECK(graph_from_json(graph_to_json(g)) == g);
    REQUIRE(invoke({"estimate", "--data", data, "--mode", "cdag", "--out", graph}).code == 0);
    CHECK(slurp(graph) == first_graph);

    auto sep = invoke({"csep", "--graph", graph, "--a", "v1", "--b", "v2", "--c", ""});
    REQUIRE(sep.code == 0);
    CHECK((sep.out == "separated: true\n" || sep.out == "separated: false\n"));

    auto scores = invoke({"--quiet", "estimate", "--data", data, "--mode", "dag2", "--g", "50", "--max-parents", "2",
                       "--dump-scores", dir / "s.json"});
    REQUIRE(scores.code == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "s.json")).size() == 10);
    CHECK(scores.out.find("method") == std::string::npos);
}

TEST_CASE("cli csep golden case") {
    TempDir dir;
    const auto graph = dir / "fig.json";
    write_text_file(graph, R"({"p": 3, "edges": [[0, 1], [1, 2]]})");
    CHECK(invoke({"csep", "--graph", graph, "--a", "v3", "--b", "v1", "--c", "v2"}).out == "separated: false\n");
    CHECK(invoke({"csep", "--graph", graph, "--a", "v3", "--b", "v1", "--c", "v2", "--dsep"}).out == "separated: true\n");
    CHECK(invoke({"csep", "--graph", graph, "--a", "w2", "--b", "v1", "--c", "w1"}).out == "separated: true\n");
    CHECK(invoke({"csep", "--graph", graph, "--a", "w3", "--b", "v2", "--c", "w2"}).out == "separated: false\n");
    CHECK(invoke({"csep", "--graph", graph, "--a", "v3", "--b", "v3", "--c", ""}).code == 1);
    CHECK(invoke({"csep", "--graph", graph, "--a", "v9", "--b", "v1"}).code == 1);
    CHECK(invoke({"csep", "--graph", graph, "--a", "q1", "--b", "v1"}).code == 1);
}

TEST_CASE("cli errors and exit codes") {
    TempDir dir;
    auto unknown = invoke({"simulate", "--bogus", "1"});
    CHECK(unknown.code == 1);
    CHECK_FALSE(unknown.err.empty());
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
    CHECK(invoke({"estimate", "--data", dir / "missing.csv"}).code == 1);
    CHECK(invoke({"simulate", "--theta", "2", "--out-data", dir / "a", "--out-truth", dir / "b"}).code == 1);
    CHECK(invoke({"estimate", "--data", dir / "x.csv", "--mode", "pc"}).code == 1);
    CHECK(invoke({"estimate", "--data", dir / "x.csv", "--g", "abc"}).code == 1);

    auto help = invoke({"estimate", "--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("--max-parents") != std::string::npos);

    // A constant secondary column makes the base design singular: numeric failure.
    std::string csv = "y1,y2,x1,x2\n";
    for (int r = 0; r < 20; ++r)
        csv += std::to_string(r % 7) + "," + std::to_string((r * r) % 5) + ",1," + std::to_string(r % 3) + "\n";
    write_text_file(dir / "const.csv", csv);
    auto numeric = invoke({"estimate", "--data", dir / "const.csv", "--mode", "cdag"});
    CHECK(numeric.code == 2);
    CHECK(invoke({"estimate", "--data", dir / "const.csv", "--mode", "dag"}).code == 0);
}

TEST_CASE("cli benchmark and misspec reports") {
    TempDir dir;
    const auto report = dir / "r.csv";
    auto b = invoke({"benchmark", "--theta", "0,0.5,0.99", "--p", "3,4,5", "--n", "20,30,40", "--reps", "1", "--seed",
                  "3", "--out", report});
    REQUIRE(b.code == 0);
    const std::string text = slurp(report);
    CHECK(count_data_lines(text) == 1 + 81);
    CHECK(text.find("theta,p,n,estimator,mean_shd,stderr,reps\n") != std::string::npos);
    CHECK(text.find(",NA,1\n") != std::string::npos);
    REQUIRE(invoke({"benchmark", "--theta", "0,0.5,0.99", "--p", "3,4,5", "--n", "20,30,40", "--reps", "1", "--seed", "3",
                 "--out", report})
                .code == 0);
    CHECK(slurp(report) == text);

    auto m = invoke({"misspec", "--p", "4", "--n", "50", "--reps", "2", "--probs", "0,1"});
    REQUIRE(m.code == 0);
    CHECK(count_data_lines(m.out) == 1 + 6);
    CHECK(m.out.find("misspec_prob,theta,p,n,estimator,mean_shd,stderr,reps\n") != std::string::npos);
}

TEST_CASE("installed binary runs") {
    TempDir dir;
    const std::string cmd = std::string(CDAG_BINARY) + " --quiet simulate --p 3 --n 20 --out-data " + (dir / "d.csv") +
                            " --out-truth " + (dir / "t.json");
    CHECK(std::system(cmd.c_str()) == 0);
    const std::string bad = std::string(CDAG_BINARY) + " simulate --nope > /dev/null 2>&1";
    const int status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(status) == 1);
}
