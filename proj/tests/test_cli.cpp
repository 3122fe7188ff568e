#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#ifndef TORIFIC_CLI_PATH
#error "TORIFIC_CLI_PATH must point at the torific binary"
#endif

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("torific_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int code = -1;
    std::string out, err;
};

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string tag = std::to_string(++counter);
    const std::string out_p = path_of("stdout_" + tag), err_p = path_of("stderr_" + tag);
    const std::string cmd =
        std::string(TORIFIC_CLI_PATH) + " " + args + " > " + out_p + " 2> " + err_p;
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.code = raw == -1 ? -1 : (WIFEXITED(raw) ? WEXITSTATUS(raw) : -2);
    r.out = slurp(out_p);
    r.err = slurp(err_p);
    std::remove(out_p.c_str());
    std::remove(err_p.c_str());
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    for (std::string l; std::getline(ss, l);) out.push_back(l);
    return out;
}

constexpr const char* kTraceHeader = "t,E,D,R,H,M,ding_c,dist_to_limit,sigma_min,sigma_max,dt";

}  // namespace

TEST_CASE("catalog listing") {
    const CliResult r = run_cli("list-polytopes");
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    const auto names = lines_of(r.out);
    CHECK(names.size() == 17);
    for (const char* want :
         {"P1", "P2", "P112", "P123", "P1xP1", "Bl1P2", "Bl2P2", "Bl3P2", "R01", "R02", "R03",
          "R04", "R05", "R06", "R07", "R08", "R09"}) {
        CAPTURE(want);
        CHECK(std::count(names.begin(), names.end(), std::string(want)) == 1);
    }
}

TEST_CASE("extremal json: fixed point and boundary-semistable case") {
    const CliResult r2 = run_cli("extremal --polytope P2");
    REQUIRE(r2.code == 0);
    const Json j2 = Json::parse(r2.out);
    CHECK(j2.at("polytope") == "P2");
    CHECK(j2.at("dim") == 2);
    CHECK(j2.at("volume").get<double>() == doctest::Approx(4.5).epsilon(1e-12));
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(j2.at("barycenter")[i].get<double>()) <= 1e-12);
        CHECK(std::abs(j2.at("eta")[i].get<double>()) <= 1e-12);
        CHECK(std::abs(j2.at("e").at("g")[i].get<double>()) <= 1e-12);
    }
    CHECK(std::abs(j2.at("e").at("c0").get<double>()) <= 1e-12);
    CHECK(j2.at("ell").at("c0").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(j2.at("min_ell").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(j2.at("residual").get<double>() <= 1e-12);

    const CliResult r1 = run_cli("extremal --polytope P112");
    REQUIRE(r1.code == 0);
    const Json j1 = Json::parse(r1.out);
    CHECK(j1.at("eta")[0].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(j1.at("eta")[1].get<double>() == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(j1.at("e").at("c0").get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(j1.at("e").at("g")[1].get<double>() == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(j1.at("min_ell").get<double>() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(j1.at("volume").get<double>() == doctest::Approx(4.0).epsilon(1e-12));

    // --out writes the same document the command prints
    const std::string out_path = path_of("extremal_p112.json");
    const CliResult rf = run_cli("extremal --polytope P112 --out " + out_path);
    REQUIRE(rf.code == 0);
    CHECK(rf.out.empty());
    CHECK(Json::parse(slurp(out_path)) == j1);
}

TEST_CASE("extremal accepts a polytope document instead of a catalog name") {
    const std::string poly_path = path_of("p112_copy.json");
    {
        std::ofstream f(poly_path);
        f << R"({"name":"P112","dimension":2,
                 "vertices":[["-1","-1"],["3","-1"],["-1","1"]],
                 "rays":[[0,1],[-1,-2],[1,0]]})";
    }
    const CliResult r = run_cli("extremal --polytope-file " + poly_path);
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("polytope") == "P112");
    CHECK(j.at("eta")[1].get<double>() == doctest::Approx(1.5).epsilon(1e-12));

    const std::string bad_path = path_of("corrupt.json");
    {
        std::ofstream f(bad_path);
        f << "{ not json";
    }
    CHECK(run_cli("extremal --polytope-file " + bad_path).code == 1);
}

TEST_CASE("destabilizer certificates: semistable and destabilized") {
    const CliResult r1 = run_cli("destabilize --polytope P1");
    REQUIRE(r1.code == 0);
    const Json j1 = Json::parse(r1.out);
    CHECK(j1.at("semistable") == true);
    CHECK(j1.at("certified") == true);
    CHECK(j1.at("w_ell_d").get<double>() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(j1.at("min_ell").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(j1.at("limit_norm").get<double>() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(j1.at("newton").at("iters") == 0);

    const CliResult r3 = run_cli("destabilize --polytope P123");
    REQUIRE(r3.code == 0);
    const Json j3 = Json::parse(r3.out);
    CHECK(j3.at("semistable") == false);
    CHECK(j3.at("certified") == true);
    CHECK(j3.at("w_ell_d").get<double>() == doctest::Approx(-0.2090696131602249).epsilon(1e-9));
    CHECK(j3.at("brute_min").get<double>() == doctest::Approx(-0.15108493309322296).epsilon(1e-9));
    CHECK(j3.at("minimizer_gap").get<double>() >= -1e-12);
    CHECK(j3.at("d_pieces").size() == 2);
    CHECK(j3.at("min_ell").get<double>() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(j3.at("limit_norm").get<double>() == doctest::Approx(0.8428385194173511).epsilon(1e-6));
    CHECK(std::abs(j3.at("orthogonality").get<double>()) <= 1e-10);

    // same command, same bytes
    const CliResult r3b = run_cli("destabilize --polytope P123");
    CHECK(r3b.code == 0);
    CHECK(r3b.out == r3.out);
}

TEST_CASE("flow run: summary line, trace document, state document") {
    const std::string tr = path_of("p1_trace.csv"), st = path_of("p1_state.json");
    const CliResult r = run_cli("flow --polytope P1 --h 1/32 --tmax 10 --init bump:0.1 "
                                "--trace-dt 0.2 --trace " +
                                tr + " --state-out " + st);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("status=plateau") != std::string::npos);
    CHECK(r.out.find("rejections=0") != std::string::npos);

    const auto ls = lines_of(slurp(tr));
    REQUIRE(ls.size() > 15);
    CHECK(ls[0] == "# polytope=P1");
    CHECK(ls[1] == "# h=0.03125");
    CHECK(ls[2] == "# init=bump:0.1");
    CHECK(ls[3] == "# seed=42");
    CHECK(ls[4] == "# status=plateau");
    CHECK(ls[5] == kTraceHeader);
    double prev_t = -1.0, prev_d = 1e300, r_last = 0.0;
    for (size_t i = 6; i < ls.size(); ++i) {
        CAPTURE(i);
        const auto fields = [&] {
            std::vector<std::string> f;
            std::istringstream ss(ls[i]);
            for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
            return f;
        }();
        REQUIRE(fields.size() == 11);
        const double t = std::stod(fields[0]), D = std::stod(fields[2]);
        r_last = std::stod(fields[3]);
        CHECK(t > prev_t);
        CHECK(D <= prev_d + 1e-7);
        prev_t = t;
        prev_d = D;
    }
    CHECK(r_last <= 1e-6);

    const Json sj = Json::parse(slurp(st));
    CHECK(sj.at("polytope") == "P1");
    CHECK(sj.at("h").get<double>() == doctest::Approx(0.03125).epsilon(1e-15));
    CHECK(sj.at("t").get<double>() > 1.0);
    REQUIRE(sj.at("v").size() > 50);
    for (const auto& val : sj.at("v")) CHECK(std::abs(val.get<double>()) < 1.0);

    // byte-identical rerun
    const std::string tr2 = path_of("p1_trace_repeat.csv");
    const CliResult r2 = run_cli("flow --polytope P1 --h 1/32 --tmax 10 --init bump:0.1 "
                                 "--trace-dt 0.2 --trace " +
                                 tr2);
    REQUIRE(r2.code == 0);
    CHECK(r2.out == r.out);
    CHECK(slurp(tr2) == slurp(tr));
}

TEST_CASE("flow accepts a matching certificate and rejects a mismatched one") {
    const std::string cert = path_of("p112_cert.json");
    REQUIRE(run_cli("destabilize --polytope P112 --out " + cert).code == 0);

    const CliResult ok = run_cli("flow --polytope P112 --h 1/16 --tmax 0.3 --init zero --cert " +
                                 cert);
    CHECK(ok.code == 0);
    CHECK(ok.out.find("status=") != std::string::npos);

    const CliResult bad = run_cli("flow --polytope P2 --h 1/16 --tmax 0.3 --cert " + cert);
    CHECK(bad.code == 1);
    CHECK(bad.err.find("certificate covers") != std::string::npos);
}

TEST_CASE("verify subcommand passes on catalog polytopes") {
    for (const char* name : {"P2", "P123"}) {
        CAPTURE(name);
        const CliResult r = run_cli(std::string("verify --polytope ") + name + " --h 1/16");
        REQUIRE(r.code == 0);
        const Json j = Json::parse(r.out);
        CHECK(j.at("pass") == true);
        REQUIRE(j.at("checks").size() >= 13);
        for (const auto& c : j.at("checks")) {
            CAPTURE(c.at("name").get<std::string>());
            CHECK(c.at("pass") == true);
        }
    }
}

TEST_CASE("report summarizes runs and flags broken traces") {
    const std::string tr = path_of("rep_trace.csv"), cert = path_of("rep_cert.json");
    REQUIRE(run_cli("flow --polytope P1 --h 1/32 --tmax 10 --init bump:0.1 --trace-dt 0.2 "
                    "--trace " +
                    tr).code == 0);
    REQUIRE(run_cli("destabilize --polytope P1 --out " + cert).code == 0);

    const CliResult good = run_cli("report --trace " + tr + " --cert " + cert);
    CHECK(good.code == 0);
    CHECK(good.out.find("ALL MONITORS PASS") != std::string::npos);
    CHECK(good.out.find("P1") != std::string::npos);

    // a trace whose Ding column rises must be flagged
    const std::string bad = path_of("rep_bad.csv");
    {
        std::ofstream f(bad);
        f << "# polytope=P1\n" << kTraceHeader << "\n";
        f << "0,-1,-1.0,0.01,0.1,-0.9,-1.3,0.1,0.9,1.1,0.001\n";
        f << "0.5,-1,-0.5,0.009,0.1,-0.4,-1.4,0.09,0.9,1.1,0.001\n";
        f << "1,-1,-0.4,0.008,0.1,-0.3,-1.5,0.08,0.9,1.1,0.001\n";
    }
    const CliResult flagged = run_cli("report --trace " + bad);
    CHECK(flagged.code == 2);
    CHECK(flagged.out.find("MONITOR FAILURES PRESENT") != std::string::npos);
    CHECK(flagged.out.find("FAIL") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_cli("extremal --polytope NOPE").code == 1);
    CHECK(run_cli("extremal").code == 1);
    CHECK(run_cli("frobnicate").code == 1);
    CHECK(run_cli("extremal --polytope P1 --bogus-flag").code == 1);
    CHECK(run_cli("flow --polytope P1 --h 1/4").code == 1);    // spacing gate is (0, 1/8]
    CHECK(run_cli("flow --polytope P1 --h 0.05x").code == 1);  // malformed spacing
    CHECK(run_cli("flow --polytope P1 --init wobble:3").code == 1);
    CHECK(run_cli("flow --polytope P1 --cert " + path_of("missing_cert.json")).code == 1);

    const CliResult r = run_cli("extremal --polytope NOPE");
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("schema flag and bare invocation") {
    const CliResult s = run_cli("--json-schema");
    REQUIRE(s.code == 0);
    const Json j = Json::parse(s.out);
    for (const char* key : {"trace_csv", "extremal", "certificate", "verify", "state"})
        CHECK(j.contains(key));
    CHECK(j.at("trace_csv").at("header") == kTraceHeader);

    const CliResult help = run_cli("");
    CHECK(help.code == 0);
    CHECK(help.out.find("list-polytopes") != std::string::npos);
    CHECK(help.out.find("flow") != std::string::npos);
}
