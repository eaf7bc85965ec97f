// Drives the installed binary end to end through popen.  The contract under
// test: exit 0 on success with exactly one JSON document on stdout, exit 2 on
// usage, io, precondition and budget errors with nothing on stdout, and
// byte-identical reports for identical invocations.

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include <cfikit/json_io.hpp>

using namespace cfikit;
using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string & args, bool quiet_stderr = false) {
    std::string cmd = std::string("\"") + CFIKIT_CLI_PATH + "\" " + args;
    if (quiet_stderr) cmd += " 2>/dev/null";
    FILE * pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// exit 0 plus a single parseable document is the success contract
json expect_report(const RunResult & r) {
    REQUIRE(r.code == 0);
    return json::parse(r.out);
}

std::string scratch(const std::string & name) {
    return (std::filesystem::temp_directory_path() / ("cfikit_cli_" + name)).string();
}

std::string slurp(const std::string & path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spit(const std::string & path, const std::string & text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

} // namespace

TEST_CASE("generation prints the instance or reports the written file") {
    RunResult r = run_cli("gen tseitin --graph k4 --group z2 --sigma odd:v0");
    GroupCsp c = group_csp_from_json(expect_report(r).dump());
    CHECK(c.var_count() == 6);
    CHECK(c.constraints.size() == 4);
    CHECK(c.group.describe() == "Z2");

    std::string path = scratch("k4_odd.json");
    RunResult w = run_cli("gen tseitin --graph k4 --group z2 --sigma odd:v0 -o " + path);
    json meta = expect_report(w);
    CHECK(meta["kind"] == "tseitin");
    CHECK(meta["output"] == path);
    CHECK(meta["variables"] == 6);
    CHECK(meta["constraints"] == 4);
    std::string payload = slurp(path);
    CHECK(meta["hash"] == content_hash(payload));
    CHECK(payload == r.out); // -o writes the same bytes the bare call prints
}

TEST_CASE("verification commands succeed on honest instances") {
    json odd = expect_report(run_cli("verify lemma31 --graph k4 --group z2 --sigma odd:v0"));
    CHECK(odd["satisfiable"] == false);
    CHECK(odd["isomorphic"] == false);
    CHECK(odd["agree"] == true);
    CHECK(odd["roundtrip"] == true);

    json even = expect_report(run_cli("verify lemma31 --graph k4 --group z2 --sigma zero"));
    CHECK(even["satisfiable"] == true);
    CHECK(even["isomorphic"] == true);
    CHECK(even["agree"] == true);

    json psi = expect_report(run_cli("verify psi --graph k4 --group z2 --sigma odd:v0 --level 1"));
    CHECK(psi["ok"] == true);
    CHECK(psi["equations"].get<long>() > 0);
}

TEST_CASE("bad usage and bad inputs exit with code two and empty stdout") {
    const char * bad[] = {
        "",                                      // no subcommand
        "frobnicate",                            // unknown subcommand
        "gen tseitin",                           // missing required option
        "gen tseitin --graph q9",                // unrecognized graph spec
        "gen tseitin --graph k4 --sigma odd:v9", // sigma vertex out of range
        "gen tseitin --graph cubic:8",           // randomized graph without --seed
        "wl --left nope_a.json --right nope_b.json", // missing files
        "verify lemma31 --graph k4 --node-budget 0", // exhausted search budget
    };
    for (const char * args : bad) {
        CAPTURE(args);
        RunResult r = run_cli(args, true);
        CHECK(r.code == 2);
        CHECK(r.out.empty());
    }
}

TEST_CASE("seeded generation is reproducible across processes") {
    RunResult a = run_cli("gen tseitin --graph cubic:8 --seed 7");
    RunResult b = run_cli("gen tseitin --graph cubic:8 --seed 7");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);

    UGraph g = random_regular_2connected(8, 3, 7);
    SigmaCharge sigma;
    sigma.value.assign(8, 0);
    TseitinCsp t = tseitin(DiGraph::orient_by_vertex_order(g), FiniteAbelianGroup({2}), sigma);
    CHECK(a.out == group_csp_to_json(t.csp));
}

TEST_CASE("solution files round trip through the combiner") {
    std::string xp = scratch("comb_x.json");
    std::string yp = scratch("comb_y.json");
    spit(xp, solution_to_json({{0, Rat(1, 2)}, {1, Rat(1, 2)}}));
    spit(yp, solution_to_json({{0, Rat(1, 3)}, {1, Rat(1, 3)}, {2, Rat(1, 3)}}));

    json combined = expect_report(run_cli("witness combine --x " + xp + " --y " + yp));
    CHECK(combined.size() == 1);
    CHECK(combined["2"] == "1");

    std::string op = scratch("comb_out.json");
    json meta = expect_report(run_cli("witness combine --x " + xp + " --y " + yp + " -o " + op));
    CHECK(meta["z"] == 1);
    CHECK(meta["alpha"] == "-1");
    CHECK(meta["beta"] == "1");
    CHECK(slurp(op) == combined.dump(2) + "\n");

    spit(yp, solution_to_json({{0, Rat(1, 2)}}));
    RunResult bad = run_cli("witness combine --x " + xp + " --y " + yp, true);
    CHECK(bad.code == 2); // 1/2 is not a 3-power value
}

TEST_CASE("emitted systems feed the solvers") {
    std::string csp = scratch("c4_zero.json");
    expect_report(run_cli("gen tseitin --graph c4 --group z2 --sigma zero -o " + csp));

    std::string sys = scratch("c4_zero.sys");
    std::string vars = scratch("c4_zero_vars.json");
    json meta = expect_report(
        run_cli("emit lcsp --in " + csp + " --level 1 -o " + sys + " --vars-out " + vars));
    CHECK(meta["nvars"].get<long>() > 0);
    CHECK(slurp(vars).find("nvars") != std::string::npos);

    json zi = expect_report(run_cli("solve integer --in " + sys));
    CHECK(zi["feasible"] == true);
    CHECK(zi["verified"] == true);

    json zp = expect_report(run_cli("solve modp --in " + sys + " -p 2"));
    CHECK(zp["feasible"] == true);
    CHECK(zp["verified"] == true);
}

TEST_CASE("reports are byte stable across runs") {
    std::string pair = scratch("k4_pair.json");
    expect_report(run_cli("gen cfi --graph k4 --group z2 --sigma odd:v0 -o " + pair));

    RunResult w1 = run_cli("wl --in " + pair + " --kmax 2");
    RunResult w2 = run_cli("wl --in " + pair + " --kmax 2");
    json rep = expect_report(w1);
    CHECK(w1.out == w2.out);
    CHECK(rep["per_k"].size() == 2);

    RunResult p1 = run_cli("profile expansion --graph k4");
    RunResult p2 = run_cli("profile expansion --graph k4");
    json prof = expect_report(p1);
    CHECK(p1.out == p2.out);
    CHECK(prof["h"] == "2/1");
    CHECK(prof["ell_suggest"].get<int>() >= 1);

    json core = expect_report(run_cli("profile core --graph k4 --remove 0"));
    CHECK(core["certified"] == true);
    CHECK(core["core_empty"] == false);
}

TEST_CASE("polynomial tools run from files and flags") {
    std::string poly = scratch("pinned.poly");
    spit(poly, "# vars 1\nx0\n\nx0 + -1\n");
    json d0 = expect_report(run_cli("pc derivable --in " + poly + " --field 2 --degree 0"));
    CHECK(d0["derivable"] == false);
    json d1 = expect_report(run_cli("pc derivable --in " + poly + " --field 2 --degree 1"));
    CHECK(d1["derivable"] == true);

    json cat = expect_report(run_cli("pc reduce --catalog"));
    CHECK(cat["rows"].size() == 4);
    CHECK(cat["rows"][0]["name"] == "csp-to-iso");

    json red = expect_report(
        run_cli("pc reduce --kind boolean-to-extended --graph k4 --vstar 0 -p 2"));
    CHECK(red["d1"] == 1);
    CHECK(red["d2"] == 5);
    CHECK(red["source_vars"] == 12);
}
