#include "hextile/cli.hpp"
#include "hextile/io.hpp"
#include "hextile/synthesis.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace hextile;
namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir
{
public:
    TempDir()
    {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("hextile_test_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }
    std::string str() const { return path_.string(); }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

} // namespace

TEST_CASE("count prints exact integers")
{
    CHECK(run({"count", "2", "2", "2"}).out == "20\n");
    CHECK(run({"count", "1", "1", "1"}).out == "2\n");
    CHECK(run({"count", "5", "5", "5"}).out == "267227532\n");
    CHECK(run({"count", "10"}).out == "9265037718181937012241727284450000\n");
    CHECK(run({"count", "1", "2", "3"}).out == "10\n");
}

TEST_CASE("usage errors exit with code 2")
{
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"count", "0"}).code == kExitUsage);
    CHECK(run({"count", "2", "2"}).code == kExitUsage);
    CHECK(run({"count", "x"}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"eval"}).code == kExitUsage);
    CHECK(run({"scan"}).code == kExitUsage);
    CHECK(run({"cdm", "--no-such-flag"}).code == kExitUsage);
    CHECK(run({"cdm", "--crossover", "3"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("config files are parsed strictly")
{
    TempDir dir;
    auto j = to_json(RunConfig{});
    j["aperture"]["rings"] = 2;
    j["output_dir"] = dir.str();
    j["bogus"] = 1;
    std::ofstream(dir / "bad.json") << j.dump();
    const auto r = run({"cdm", "--config", (dir / "bad.json").string()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("bogus") != std::string::npos);

    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(run({"cdm", "--config", (dir / "broken.json").string()}).code == kExitUsage);
    CHECK(run({"cdm", "--config", (dir / "missing.json").string()}).code == kExitUsage);
}

TEST_CASE("enumerate lists words in order")
{
    const auto r = run({"enumerate", "--rings", "2"});
    REQUIRE(r.code == 0);
    CHECK(line_count(r.out) == 21);
    CHECK(r.out.rfind("t,word\n1,0 0 0 0 0 0 0\n2,0 0 0 1 0 0 0\n", 0) == 0);
    CHECK(r.out.find("20,1 1 1 2 1 1 1\n") != std::string::npos);
    CHECK(line_count(run({"enumerate", "--rings", "3", "--limit", "5"}).out) == 6);
}

TEST_CASE("edm writes its outputs and reproduces them byte for byte")
{
    TempDir a, b;
    const std::vector<std::string> common{"edm", "--rings", "2", "--resolution", "41", "--reference", "cosine-taper"};
    auto args_a = common, args_b = common;
    args_a.insert(args_a.end(), {"--output-dir", a.str()});
    args_b.insert(args_b.end(), {"--output-dir", b.str()});
    const auto r = run(args_a);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("tilings: 20") != std::string::npos);
    CHECK(r.out.find("estimated time") != std::string::npos);
    REQUIRE(run(args_b).code == 0);
    for (const char* f : {"edm_chi.csv", "edm_sorted_chi.csv", "edm_co_optima.csv", "edm_best.json", "edm_worst.json",
                          "edm_best.tiling", "edm_worst.tiling"})
    {
        INFO(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK_FALSE(fs::exists(a / "edm_checkpoint.txt"));
    CHECK(line_count(slurp(a / "edm_chi.csv")) == 21);
    CHECK(slurp(a / "edm_sorted_chi.csv").rfind("rank,t,chi\n", 0) == 0);

    // The best record re-evaluates to its stored cost.
    const auto best = read_json(a / "edm_best.json");
    CHECK(best["method"] == "EDM");
    CHECK_FALSE(best.contains("timestamp"));
    const auto e = run({"eval", "--rings", "2", "--resolution", "41", "--reference", "cosine-taper", "--tiling",
                        (a / "edm_best.tiling").string(), "--output-dir", a.str()});
    REQUIRE(e.code == 0);
    const auto m = read_json(a / "metrics.json");
    const double stored = best["chi"], again = m["chi"];
    CHECK(std::abs(again - stored) <= 1e-12 * std::abs(stored));
    CHECK(read_json(a / "eval_solution.json")["config_hash"] == best["config_hash"]);

    // With --timestamps the record carries the wall-clock time.
    REQUIRE(run({"eval", "--rings", "2", "--resolution", "41", "--tiling", (a / "edm_best.tiling").string(),
                 "--output-dir", a.str(), "--timestamps"})
                .code == 0);
    CHECK(read_json(a / "eval_solution.json").contains("timestamp"));
}

TEST_CASE("edm refuses runs beyond the budget")
{
    TempDir dir;
    const auto r = run({"edm", "--rings", "3", "--resolution", "21", "--budget", "1e-12", "--output-dir", dir.str()});
    CHECK(r.code == kExitBudget);
    CHECK(r.out.find("tilings: 980") != std::string::npos);
    CHECK(r.err.find("budget") != std::string::npos);
    CHECK(run({"edm", "--rings", "7", "--resolution", "3", "--force", "--output-dir", dir.str()}).code == kExitBudget);
}

TEST_CASE("edm resumes from a checkpoint")
{
    TempDir dir;
    const auto ap = build_aperture(2, std::sqrt(3.0) / 4.0);
    RunConfig c;
    c.rings = 2;
    c.resolution = 41;
    c.output_dir = dir.str();
    auto j = to_json(c);
    std::ofstream(dir / "cfg.json") << j.dump();
    const auto eval = TilingEvaluator::from_config(ap, c, 1);
    EdmOptions part;
    part.stop_after = 8;
    std::vector<double> chi;
    TilingWord last;
    part.on_checkpoint = [&](const std::vector<double>& x, const TilingWord& w) {
        chi = x;
        last = w;
    };
    run_edm(eval, part);
    {
        std::ofstream cp(dir / "edm_checkpoint.txt");
        write_checkpoint(cp, {last, chi.size(), config_hash(c)});
        std::ofstream partial(dir / "edm_chi.partial.csv");
        for (double x : chi)
            partial << format_double(x) << '\n';
    }
    const auto r = run({"edm", "--config", (dir / "cfg.json").string(), "--resume"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("resuming after tiling 8") != std::string::npos);
    const auto full = run_edm(eval);
    std::ostringstream expect;
    expect << "t,chi\n";
    for (std::size_t i = 0; i < full.chi.size(); ++i)
        expect << i + 1 << ',' << format_double(full.chi[i]) << '\n';
    CHECK(slurp(dir / "edm_chi.csv") == expect.str());

    // A checkpoint from another configuration is rejected.
    {
        std::ofstream cp(dir / "edm_checkpoint.txt");
        write_checkpoint(cp, {last, chi.size(), "0000000000000000"});
    }
    CHECK(run({"edm", "--config", (dir / "cfg.json").string(), "--resume"}).code == kExitInput);
}

TEST_CASE("cdm runs and repeats")
{
    TempDir dir;
    const std::vector<std::string> base{"cdm",          "--rings",      "3",    "--resolution", "31",
                                        "--population", "12",           "--iterations", "6",
                                        "--output-dir", dir.str()};
    auto r = run(base);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "cdm_trace.csv"));
    CHECK(fs::exists(dir / "cdm_best.tiling"));
    const auto rec = read_json(dir / "cdm_best.json");
    CHECK(rec["method"] == "CDM");
    CHECK(rec["seed"] == 1);
    const auto trace = slurp(dir / "cdm_trace.csv");
    CHECK(trace.rfind("iteration,best_chi,mean_chi,evaluations\n", 0) == 0);

    auto repeated = base;
    repeated.insert(repeated.end(), {"--repeat", "3", "--seed", "5"});
    r = run(repeated);
    REQUIRE(r.code == 0);
    CHECK(line_count(slurp(dir / "cdm_repeat.csv")) == 4);
    for (int s : {5, 6, 7})
        CHECK(fs::exists(dir / ("cdm_seed" + std::to_string(s) + "_trace.csv")));
    CHECK(r.out.find("median=") != std::string::npos);

    // Seed 5 of the repeat run matches a single run with seed 5.
    TempDir single;
    auto one = base;
    one.back() = single.str();
    one.insert(one.end(), {"--seed", "5"});
    REQUIRE(run(one).code == 0);
    CHECK(slurp(single / "cdm_trace.csv") == slurp(dir / "cdm_seed5_trace.csv"));
}

TEST_CASE("eval reports input errors with exit code 4")
{
    TempDir dir;
    CHECK(run({"eval", "--rings", "2", "--tiling", (dir / "none.tiling").string(), "--output-dir", dir.str()}).code ==
          kExitInput);
    std::ofstream(dir / "bad.tiling") << "rings 1\n0,V,0,1\n1,V,0,2\n2,V,3,4\n";
    const auto r = run({"eval", "--rings", "1", "--tiling", (dir / "bad.tiling").string(), "--output-dir", dir.str()});
    CHECK(r.code == kExitInput);
    CHECK(r.err.find("triangle 0") != std::string::npos);

    std::ofstream(dir / "ref.csv") << "triangle_index,amplitude,phase_deg\n0,1,0\n";
    const auto ap = build_aperture(1, 1.0);
    {
        std::ofstream t(dir / "min.tiling");
        write_tiling(t, ap, minimal_tiling(ap));
    }
    const auto f = run({"eval", "--rings", "1", "--tiling", (dir / "min.tiling").string(), "--reference", "file",
                        "--reference-file", (dir / "ref.csv").string(), "--output-dir", dir.str()});
    CHECK(f.code == kExitInput);
    CHECK(f.err.find("triangle 1") != std::string::npos);
}

TEST_CASE("eval writes pattern exports and flags a displaced peak")
{
    TempDir dir;
    const auto ap = build_aperture(2, std::sqrt(3.0) / 4.0);
    {
        std::ofstream t(dir / "min.tiling");
        write_tiling(t, ap, minimal_tiling(ap));
    }
    auto r = run({"eval", "--rings", "2", "--resolution", "31", "--tiling", (dir / "min.tiling").string(),
                  "--output-dir", dir.str()});
    REQUIRE(r.code == 0);
    for (const char* f : {"eval_solution.json", "metrics.json", "pattern.csv", "cut_phi0.csv", "cut_phi90.csv"})
        CHECK(fs::exists(dir / f));
    const auto m = read_json(dir / "metrics.json");
    for (const char* k : {"sll_db", "d_dbi", "hpbw_az_deg", "hpbw_el_deg", "chi"})
        CHECK(m.contains(k));
    CHECK(r.out.find("warning") == std::string::npos);

    r = run({"eval", "--rings", "2", "--resolution", "31", "--tiling", (dir / "min.tiling").string(),
             "--steer-theta", "40", "--output-dir", dir.str()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("warning: pattern peak lies outside the mainlobe region") != std::string::npos);
    CHECK(read_json(dir / "metrics.json")["peak_in_mainlobe"] == false);
}

TEST_CASE("a single scan point matches eval with the same steering")
{
    TempDir dir;
    const auto ap = build_aperture(3, std::sqrt(3.0) / 4.0);
    {
        std::ofstream t(dir / "min.tiling");
        write_tiling(t, ap, minimal_tiling(ap));
    }
    const auto tiling = (dir / "min.tiling").string();
    REQUIRE(run({"scan", "--rings", "3", "--resolution", "61", "--tiling", tiling, "--theta-range", "0", "1", "1",
                 "--phi-range", "0", "1", "1", "--output-dir", dir.str()})
                .code == 0);
    const auto scan = slurp(dir / "scan.csv");
    REQUIRE(line_count(scan) == 2);
    std::istringstream rows(scan.substr(scan.find('\n') + 1));
    std::string tg, pg, sll, d;
    std::getline(rows, tg, ',');
    std::getline(rows, pg, ',');
    std::getline(rows, sll, ',');
    std::getline(rows, d, '\n');

    const double u0 = std::sin(30.0 * std::numbers::pi / 180.0);
    REQUIRE(run({"eval", "--rings", "3", "--resolution", "61", "--tiling", tiling, "--steer-theta", "30",
                 "--mask-center", format_double(u0), "0", "--output-dir", dir.str()})
                .code == 0);
    const auto m = read_json(dir / "metrics.json");
    CHECK(parse_double(sll) == doctest::Approx(m["sll_db"].get<double>()).epsilon(1e-12));
    CHECK(parse_double(d) == doctest::Approx(m["d_dbi"].get<double>()).epsilon(1e-12));
}

TEST_CASE("scan row counts follow the cone sampling")
{
    TempDir dir;
    REQUIRE(run({"scan", "--rings", "2", "--resolution", "21", "--control", "--output-dir", dir.str()}).code == 0);
    CHECK(line_count(slurp(dir / "scan_control.csv")) == 1 + 12 * 72);
    REQUIRE(run({"scan", "--rings", "2", "--resolution", "21", "--control", "--theta-range", "-10", "10", "10",
                 "--phi-range", "0", "360", "60", "--output-dir", dir.str()})
                .code == 0);
    const auto text = slurp(dir / "scan_control.csv");
    CHECK(line_count(text) == 1 + 2 * 6);
    CHECK(text.rfind("theta_gamma,phi_gamma,sll_db,d_dbi\n", 0) == 0);
}
