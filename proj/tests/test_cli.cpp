// End-to-end checks that drive the installed binary the way a user would.

#include <catch2/catch.hpp>

#include <cstdio>
#include <cstdlib>

#include "patmap/fileio.hpp"
#include "test_support.hpp"

using namespace patmap;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    const char* bin = std::getenv("PATMAP_BIN");
    REQUIRE(bin != nullptr);
    const std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[512];
    while (fgets(buf, sizeof(buf), pipe)) result.output += buf;
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

// Three classes, four patents: two in Boston, one in Eindhoven, one Novartis.
void write_fixture(const testsupport::TempDir& tmp) {
    patmap::detail::write_file(tmp.file("scheme.csv"),
                               "code,title\n"
                               "A61K,PREPARATIONS FOR MEDICAL PURPOSES\n"
                               "C07D,HETEROCYCLIC COMPOUNDS\n"
                               "H01L,SEMICONDUCTOR DEVICES\n");
    patmap::detail::write_file(
        tmp.file("corpus.jsonl"),
        "{\"id\":\"p1\",\"date\":\"2016-02-01\",\"cpc4\":[\"A61K\"],\"cited\":[\"u1\",\"u2\"],"
        "\"city\":\"Boston\",\"country\":\"US\"}\n"
        "{\"id\":\"p2\",\"date\":\"2016-03-01\",\"cpc4\":[\"A61K\",\"C07D\"],\"cited\":[\"u1\"],"
        "\"city\":\"Boston\",\"country\":\"US\"}\n"
        "{\"id\":\"p3\",\"date\":\"2016-04-01\",\"cpc4\":[\"H01L\"],\"cited\":[\"u2\",\"u3\"],"
        "\"city\":\"Eindhoven\",\"country\":\"NL\"}\n"
        "{\"id\":\"p4\",\"date\":\"2016-05-01\",\"cpc4\":[\"C07D\",\"H01L\"],\"cited\":[\"u3\"],"
        "\"assignee\":\"Novartis AG\",\"city\":\"Basel\",\"country\":\"CH\"}\n");

    BaseMap base;
    base.nodes.push_back({1, "A61K", 0.1, 0.9, 1});
    base.nodes.push_back({2, "C07D", -0.4, 0.2, 1});
    base.nodes.push_back({3, "H01L", 0.7, -0.6, 2});
    write_vos_map(base, tmp.file("base.txt"));
}

}  // namespace

TEST_CASE("unknown subcommand prints usage and exits 2", "[cli]") {
    auto r = run_cli("frobnicate");
    REQUIRE(r.exit_code == 2);
    REQUIRE_THAT(r.output, Catch::Contains("Usage") || Catch::Contains("subcommand"));
}

TEST_CASE("portfolio run writes every declared artifact", "[cli]") {
    testsupport::TempDir tmp;
    write_fixture(tmp);

    auto sim = run_cli("similarity --input " + tmp.file("corpus.jsonl") + " --scheme " +
                       tmp.file("scheme.csv") + " --kind cosine --output " +
                       tmp.file("cosine.csv"));
    REQUIRE(sim.exit_code == 0);
    REQUIRE_THAT(sim.output, Catch::Contains("similarity: kind=cosine"));

    const std::string portfolio_args =
        "portfolio --input " + tmp.file("corpus.jsonl") + " --scheme " + tmp.file("scheme.csv") +
        " --basemap " + tmp.file("base.txt") + " --cosine " + tmp.file("cosine.csv") +
        " --name boston --city Boston --overlay " + tmp.file("vos.txt") + " --matrix-table " +
        tmp.file("matrix.csv") + " --rao-table " + tmp.file("rao.csv");
    auto port = run_cli(portfolio_args);
    REQUIRE(port.exit_code == 0);
    REQUIRE_THAT(port.output, Catch::Contains("portfolio boston: n=2") &&
                                  Catch::Contains("delta=") && Catch::Contains("d2_3="));

    auto overlay_file = read_vos_map(tmp.file("vos.txt"));
    REQUIRE(overlay_file.rows.size() == 3);
    REQUIRE(overlay_file.has_weight);

    auto table = read_matrix_table(tmp.file("matrix.csv"));
    REQUIRE(table.names == std::vector<std::string>{"boston"});
    // p1 {A61K} + p2 {A61K, C07D}: A61K = 1.5, C07D = 0.5
    REQUIRE(table.columns[0][0] == Approx(1.5).margin(1e-9));
    REQUIRE(table.columns[0][1] == Approx(0.5).margin(1e-9));

    auto rao = read_rao_table(tmp.file("rao.csv"));
    REQUIRE(rao.size() == 1);
    REQUIRE(rao[0].name == "boston");
    REQUIRE(rao[0].n == 2);

    SECTION("a second run with the same name fails with one error line") {
        auto again = run_cli(portfolio_args);
        REQUIRE(again.exit_code == 1);
        REQUIRE_THAT(again.output, Catch::StartsWith("error:"));
        REQUIRE(std::count(again.output.begin(), again.output.end(), '\n') == 1);
    }

    SECTION("a second sample appends a column and a row") {
        auto second = run_cli("portfolio --input " + tmp.file("corpus.jsonl") + " --scheme " +
                              tmp.file("scheme.csv") + " --basemap " + tmp.file("base.txt") +
                              " --cosine " + tmp.file("cosine.csv") +
                              " --name eindhoven --city Eindhoven --overlay " +
                              tmp.file("vos2run.txt") + " --matrix-table " +
                              tmp.file("matrix.csv") + " --rao-table " + tmp.file("rao.csv"));
        REQUIRE(second.exit_code == 0);
        auto table2 = read_matrix_table(tmp.file("matrix.csv"));
        REQUIRE(table2.names == std::vector<std::string>{"boston", "eindhoven"});
        REQUIRE(read_rao_table(tmp.file("rao.csv")).size() == 2);

        SECTION("and local-map connects the runs") {
            auto local = run_cli("local-map --matrix-table " + tmp.file("matrix.csv") +
                                 " --network " + tmp.file("cosine.net") + " --coocc " +
                                 tmp.file("coocc.dat"));
            REQUIRE(local.exit_code == 0);
            std::vector<std::string> labels;
            std::vector<PajekEdge> edges;
            read_pajek_network(tmp.file("cosine.net"), labels, edges);
            REQUIRE(labels == std::vector<std::string>{"boston", "eindhoven"});
        }
    }
}

TEST_CASE("identical configs produce byte-identical artifacts", "[cli]") {
    testsupport::TempDir tmp;
    write_fixture(tmp);
    REQUIRE(run_cli("similarity --input " + tmp.file("corpus.jsonl") + " --scheme " +
                    tmp.file("scheme.csv") + " --kind cosine --output " + tmp.file("cosine.csv"))
                .exit_code == 0);

    for (int run = 1; run <= 2; ++run) {
        auto r = run_cli("portfolio --input " + tmp.file("corpus.jsonl") + " --scheme " +
                         tmp.file("scheme.csv") + " --basemap " + tmp.file("base.txt") +
                         " --cosine " + tmp.file("cosine.csv") + " --name all --overlay " +
                         tmp.file("vos_run" + std::to_string(run) + ".txt"));
        REQUIRE(r.exit_code == 0);
    }
    REQUIRE(patmap::detail::read_file(tmp.file("vos_run1.txt")) ==
            patmap::detail::read_file(tmp.file("vos_run2.txt")));
}

TEST_CASE("diff of a set against itself is all neutral", "[cli]") {
    testsupport::TempDir tmp;
    write_fixture(tmp);
    auto r = run_cli("diff --input " + tmp.file("corpus.jsonl") + " --input2 " +
                     tmp.file("corpus.jsonl") + " --scheme " + tmp.file("scheme.csv") +
                     " --basemap " + tmp.file("base.txt") +
                     " --name a --name2 b --output " + tmp.file("vos2.txt"));
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.output, Catch::Contains("red=0") && Catch::Contains("green=0") &&
                               Catch::Contains("neutral=3"));

    auto map = to_overlay_map(read_vos_map(tmp.file("vos2.txt")));
    REQUIRE(map.is_difference);
    for (const auto& n : map.nodes) {
        REQUIRE(n.color == DiffColor::neutral);
        REQUIRE(n.weight == 0.0);
    }
}

TEST_CASE("diff colors favor the stronger set", "[cli]") {
    testsupport::TempDir tmp;
    write_fixture(tmp);
    // split the corpus: boston patents vs the rest
    patmap::detail::write_file(
        tmp.file("set1.jsonl"),
        "{\"id\":\"p1\",\"date\":\"2016-02-01\",\"cpc4\":[\"A61K\"],\"cited\":[]}\n"
        "{\"id\":\"p2\",\"date\":\"2016-03-01\",\"cpc4\":[\"A61K\"],\"cited\":[]}\n");
    patmap::detail::write_file(
        tmp.file("set2.jsonl"),
        "{\"id\":\"q1\",\"date\":\"2016-02-01\",\"cpc4\":[\"H01L\"],\"cited\":[]}\n");

    auto r = run_cli("diff --input " + tmp.file("set1.jsonl") + " --input2 " +
                     tmp.file("set2.jsonl") + " --scheme " + tmp.file("scheme.csv") +
                     " --basemap " + tmp.file("base.txt") +
                     " --name one --name2 two --output " + tmp.file("vos2.txt"));
    REQUIRE(r.exit_code == 0);
    auto map = to_overlay_map(read_vos_map(tmp.file("vos2.txt")));
    REQUIRE(map.nodes[0].color == DiffColor::red);    // A61K: set1 stronger
    REQUIRE(map.nodes[1].color == DiffColor::neutral);
    REQUIRE(map.nodes[2].color == DiffColor::green);  // H01L: set2 stronger
}

TEST_CASE("cluster and stats subcommands compose", "[cli]") {
    testsupport::TempDir tmp;
    write_fixture(tmp);
    REQUIRE(run_cli("similarity --input " + tmp.file("corpus.jsonl") + " --scheme " +
                    tmp.file("scheme.csv") + " --kind cosine --output " + tmp.file("cosine.csv"))
                .exit_code == 0);

    auto clu = run_cli("cluster --similarity " + tmp.file("cosine.csv") +
                       " --seed 7 --output " + tmp.file("part.cls") + " --terms " +
                       tmp.file("terms.tsv") + " --scheme " + tmp.file("scheme.csv"));
    REQUIRE(clu.exit_code == 0);
    REQUIRE_THAT(clu.output, Catch::Contains("cluster: n=3"));
    REQUIRE(read_pajek_cluster(tmp.file("part.cls")).size() == 3);

    auto v = run_cli("stats cramers-v --a " + tmp.file("part.cls") + " --b " +
                     tmp.file("part.cls") + " --machine");
    // identical labelings correlate perfectly when there are >= 2 clusters;
    // with a single cluster the statistic is undefined and the CLI errors out
    if (v.exit_code == 0) {
        REQUIRE_THAT(v.output, Catch::StartsWith("1.000000"));
    } else {
        REQUIRE_THAT(v.output, Catch::StartsWith("error:"));
    }

    patmap::detail::write_file(tmp.file("x.txt"), "1\n2\n3\n4\n");
    patmap::detail::write_file(tmp.file("y.txt"), "2\n4\n6\n8\n");
    auto pear = run_cli("stats pearson --x " + tmp.file("x.txt") + " --y " + tmp.file("y.txt"));
    REQUIRE(pear.exit_code == 0);
    REQUIRE_THAT(pear.output, Catch::Contains("pearson=1.000000"));
}

TEST_CASE("build-matrix and decompose write their artifacts", "[cli]") {
    testsupport::TempDir tmp;
    write_fixture(tmp);

    auto bm = run_cli("build-matrix --input " + tmp.file("corpus.jsonl") + " --scheme " +
                      tmp.file("scheme.csv") + " --output " + tmp.file("twomode.txt"));
    REQUIRE(bm.exit_code == 0);
    auto dump = read_sparse_dump(tmp.file("twomode.txt"));
    REQUIRE(dump.rows == 3);
    REQUIRE(dump.cols == 3);  // u1, u2, u3

    REQUIRE(run_cli("similarity --input " + tmp.file("corpus.jsonl") + " --scheme " +
                    tmp.file("scheme.csv") + " --kind jaccard --output " +
                    tmp.file("jaccard.csv"))
                .exit_code == 0);
    auto dec = run_cli("decompose --similarity " + tmp.file("jaccard.csv") +
                       " --min-size 2 --out-dir " + tmp.file("maps"));
    REQUIRE(dec.exit_code == 0);
    REQUIRE(std::filesystem::exists(tmp.file("maps") + "/map_manifest.txt"));
    REQUIRE(std::filesystem::exists(tmp.file("maps") + "/map_0.txt"));
}
