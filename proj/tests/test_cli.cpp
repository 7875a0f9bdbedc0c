// Exercises the CLI binary: output shapes, exit codes, error diagnostics.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct CliRun {
    int exit_code;
    std::string out;
};

CliRun run_cli(const std::string& args) {
    std::string cmd = std::string(NEARMATCH_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto dir = std::filesystem::temp_directory_path() / "nearmatch_cli_test";
    std::filesystem::create_directories(dir);
    auto path = dir / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    return path;
}

}  // namespace

TEST_CASE("census subcommand reports nm_of_eps") {
    auto p3 = write_temp("p3.txt", "3 2\n0 1\n1 2\n");
    CliRun r = run_cli("census " + p3.string() + " --eps 0.34");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("\"nm_of_eps\": 2") != std::string::npos);
    REQUIRE(r.out.find("\"by_coverage\"") != std::string::npos);
}

TEST_CASE("malformed graph files exit 1 with a line diagnostic") {
    auto bad = write_temp("bad.txt", "4 2\n0 1\n0 9\n");
    CliRun r = run_cli("census " + bad.string());
    REQUIRE(r.exit_code == 1);
    REQUIRE(r.out.find("line 3") != std::string::npos);
}

TEST_CASE("census over the vertex limit exits 2") {
    std::string big = "30 0\n";
    auto path = write_temp("big.txt", big);
    CliRun r = run_cli("census " + path.string());
    REQUIRE(r.exit_code == 2);
}

TEST_CASE("generate writes a parseable graph with a header") {
    CliRun r = run_cli("generate --kind quasirandom --n 20 --p 0.3 --seed 4");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.rfind("20 ", 0) == 0);
    CliRun again = run_cli("generate --kind quasirandom --n 20 --p 0.3 --seed 4");
    REQUIRE(again.out == r.out);
}

TEST_CASE("generate with a P matrix") {
    CliRun r = run_cli("generate --kind generalized --n 6 --P [[0,1],[1,0]] --seed 1");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.rfind("6 9", 0) == 0);  // K_{3,3}
}

TEST_CASE("bounds subcommand reports provenance") {
    CliRun r = run_cli("bounds --n 1000 --p 0.5 --eps 0.04");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("\"lower_from\"") != std::string::npos);
    REQUIRE(r.out.find("\"lemma_a1\"") != std::string::npos);
    CliRun q = run_cli("bounds --n 1000 --p 0.5 --eps 0.04 --mode quasirandom");
    REQUIRE(q.exit_code == 0);
    REQUIRE(q.out.find("theorem-3.1") != std::string::npos);
}

TEST_CASE("greedy subcommand runs on a generated bipartite instance") {
    auto dir = std::filesystem::temp_directory_path() / "nearmatch_cli_test";
    auto graph = (dir / "bip.txt").string();
    CliRun gen = run_cli("--out " + graph +
                         " generate --kind bipartite-regular --n 200 --p 0.5 --seed 2");
    REQUIRE(gen.exit_code == 0);
    CliRun r = run_cli("greedy " + graph + " --p 0.5 --eps 0.04 --seed 1");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("\"log_count\"") != std::string::npos);
    REQUIRE(r.out.find("\"near_perfect\": true") != std::string::npos);
}

TEST_CASE("pipeline subcommand emits the schema-1 report") {
    auto dir = std::filesystem::temp_directory_path() / "nearmatch_cli_test";
    auto graph = (dir / "gnp.txt").string();
    CliRun gen = run_cli("--out " + graph + " generate --kind quasirandom --n 120 --p 0.6 --seed 9");
    REQUIRE(gen.exit_code == 0);
    CliRun r = run_cli("pipeline " + graph + " --eps 0.1 --seed 1");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("\"schema\": 1") != std::string::npos);
    REQUIRE(r.out.find("\"outcome\": \"bound\"") != std::string::npos);
    REQUIRE(r.out.find("\"ell\"") != std::string::npos);
    REQUIRE(r.out.find("elapsed_ms") == std::string::npos);  // timings are opt-in
}

TEST_CASE("quotient subcommand exports the LP on request") {
    auto dir = std::filesystem::temp_directory_path() / "nearmatch_cli_test";
    auto graph = (dir / "gq.txt").string();
    CliRun gen = run_cli("--out " + graph + " generate --kind quasirandom --n 60 --p 0.7 --seed 3");
    REQUIRE(gen.exit_code == 0);
    auto lp = (dir / "region.lp").string();
    CliRun r = run_cli("quotient " + graph + " --eps 0.2 --export-lp " + lp);
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("\"er\"") != std::string::npos);
    std::ifstream f(lp);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    REQUIRE(text.find("Subject To") != std::string::npos);
}

TEST_CASE("missing file and bad arguments exit 1") {
    REQUIRE(run_cli("census /nonexistent/file.txt").exit_code == 1);
    REQUIRE(run_cli("bounds --n 10 --p 0.05 --eps 0.04").exit_code == 1);  // pn <= 1
    REQUIRE(run_cli("generate --kind unknown --n 4").exit_code == 1);
}
