// End-to-end exercises of the command-line binary: exit codes, output
// contracts, and byte-identical reruns. Invoked as: cli_tests <path-to-binary>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    std::printf("%s %s\n", ok ? "[ok]  " : "[FAIL]", what.c_str());
    if (!ok) ++g_failures;
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& cmd) {
    const std::string full = cmd + " 2>&1";
    std::FILE* p = popen(full.c_str(), "r");
    if (!p) return {-1, {}};
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof(buf), p)) out.append(buf, n);
    const int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_tests <binary>\n");
        return 2;
    }
    const std::string bin = argv[1];
    namespace fs = std::filesystem;
    const fs::path work = fs::temp_directory_path() / "consensus_cli_tests";
    fs::remove_all(work);
    fs::create_directories(work);

    {
        const RunResult r = run(bin + " presets");
        check(r.exit_code == 0, "presets exits 0");
        for (const char* name : {"single-agent", "two-attractive", "two-attractive-both-greedy",
                                 "six-repulsive", "attr-rep-coop", "attr-rep-steal"})
            check(r.out.find(name) != std::string::npos,
                  std::string("presets lists ") + name);
        check(r.out.find("T = 5") != std::string::npos,
              "six-repulsive description mentions its horizon");
        check(r.out.find("k = 6") != std::string::npos,
              "six-repulsive description mentions its agent count");
    }
    {
        const RunResult r = run(bin + " presets --json");
        check(r.exit_code == 0, "presets --json exits 0");
        check(r.out.find("\"name\"") != std::string::npos, "presets --json is json");
    }
    {
        const RunResult r = run(bin + " run missing.toml");
        check(r.exit_code == 2, "run with a missing scenario exits 2");
    }
    {
        const RunResult r = run(bin + " verify --suite bogus");
        check(r.exit_code == 2, "verify with an unknown suite exits 2");
    }
    {
        const RunResult r = run(bin + " run");
        check(r.exit_code == 2, "run without a scenario exits 2");
    }

    // a fast scenario file for the end-to-end run
    const fs::path scen = work / "tiny.toml";
    {
        std::ofstream os(scen);
        os << "[domain]\nx0 = 0\nx1 = 10\ny0 = 0\ny1 = 10\n"
           << "[grid]\nnx = 64\nny = 64\n"
           << "[time]\nT = 0.1\ndt_strategy = 0.01\n"
           << "[density]\nbox = [4, 6, 4, 6]\n"
           << "[[agents]]\nposition = [2, 2]\n"
           << "kernel = {sign = 1, decay_length = 5, form = \"unit\"}\n"
           << "speed_cap = 1.5\nstrategy = {variant = \"greedy\"}\ntarget = [1, 8]\n";
    }
    {
        const RunResult r =
            run(bin + " run " + scen.string() + " --out " + (work / "out1").string());
        check(r.exit_code == 0, "run on a valid scenario exits 0");
        check(r.out.find("J_1=") != std::string::npos, "run prints J_1=<value>");
        check(fs::exists(work / "out1" / "summary.json"), "summary.json written");
        check(fs::exists(work / "out1" / "trajectory.csv"), "trajectory.csv written");
    }
    {
        // identical invocations must produce byte-identical summaries, and the
        // worker count must not matter
        const RunResult r1 = run("CONSENSUS_THREADS=1 " + bin + " run " + scen.string() +
                                 " --out " + (work / "out_a").string());
        const RunResult r2 = run("CONSENSUS_THREADS=3 " + bin + " run " + scen.string() +
                                 " --out " + (work / "out_b").string());
        check(r1.exit_code == 0 && r2.exit_code == 0, "rerun exits 0");
        const std::string a = slurp((work / "out_a" / "summary.json").string());
        const std::string b = slurp((work / "out_b" / "summary.json").string());
        check(!a.empty() && a == b, "summary.json is byte-identical across thread counts");
    }
    {
        // a runtime numerics failure maps to exit 3: frozen density, constant
        // control marching the agent far out of the domain
        const fs::path esc = work / "escape.toml";
        {
            std::ofstream os(esc);
            os << "[domain]\nx0 = 0\nx1 = 10\ny0 = 0\ny1 = 10\n"
               << "[grid]\nnx = 32\nny = 32\n"
               << "[time]\nT = 40\ndt_strategy = 0.5\n"
               << "[density]\nbox = [4, 6, 4, 6]\n"
               << "[[agents]]\nposition = [2, 2]\n"
               << "kernel = {sign = 1, decay_length = 5, form = \"linear\"}\n"
               << "speed_cap = 1.5\nstrategy = {variant = \"constant\", u = [-1.5, 0]}\n";
        }
        const RunResult r = run(bin + " run " + esc.string());
        check(r.exit_code == 3, "agent escape exits 3");
    }
    {
        // trajectory row count = epochs + 1
        const std::string traj = slurp((work / "out1" / "trajectory.csv").string());
        int lines = 0;
        for (char c : traj)
            if (c == '\n') ++lines;
        check(lines == 1 + 10 + 1, "trajectory.csv has header + epochs + 1 rows");
    }
    {
        // snapshots named rho_t<time>.csv appear alongside pgm twins
        const RunResult r = run(bin + " run " + scen.string() + " --snapshots 0.05,0.1 " +
                                " --out " + (work / "out_snap").string());
        check(r.exit_code == 0, "snapshot run exits 0");
        check(fs::exists(work / "out_snap" / "rho_t0.05.csv"), "snapshot csv written");
        check(fs::exists(work / "out_snap" / "rho_t0.05.pgm"), "snapshot pgm written");
        check(fs::exists(work / "out_snap" / "rho_t0.1.csv"), "second snapshot written");
    }

    std::printf("%s: %d failure(s)\n", g_failures ? "FAIL" : "PASS", g_failures);
    return g_failures ? 1 : 0;
}
