#include "hextile/cli.hpp"

#include "hextile/enumeration.hpp"
#include "hextile/io.hpp"
#include "hextile/synthesis.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hextile
{
namespace
{

namespace fs = std::filesystem;
using nlohmann::json;

class BudgetRefusal : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Flags that override config keys. Each one patches the config JSON, which is
// then re-validated by the strict parser.
struct Overrides
{
    std::string config_path;
    int rings = 0;
    double cell_side = 0.0;
    int resolution = 0;
    std::uint64_t seed = 0;
    std::string output_dir;
    std::vector<double> mask_center, mask_extent;
    double floor_db = 0.0;
    std::string mask_shape;
    std::string reference;
    std::string reference_file;
    double taper_exponent = 0.0;
    double taper_radius = 0.0;
    double steer_theta = 0.0, steer_phi = 0.0;
    std::string element;
    double element_exponent = 0.0;
    std::size_t population = 0, iterations = 0, stagnation_window = 0;
    double crossover = 0.0, mutation = 0.0, stagnation_threshold = 0.0;
    double budget = 0.0;
    bool timestamps = false;

    std::vector<std::pair<CLI::Option*, std::function<void(json&)>>> patches;

    template <typename T>
    void bind(CLI::App* app, const std::string& flag, T& target, const std::string& help,
              std::function<void(json&, const T&)> apply)
    {
        auto* opt = app->add_option(flag, target, help);
        patches.emplace_back(opt, [&target, apply](json& j) { apply(j, target); });
    }

    void attach(CLI::App* app)
    {
        app->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        bind<int>(app, "--rings", rings, "triangles per hexagon side", [](json& j, const int& v) { j["aperture"]["rings"] = v; });
        bind<double>(app, "--cell-side", cell_side, "triangle side in wavelengths",
                     [](json& j, const double& v) { j["aperture"]["cell_side"] = v; });
        bind<int>(app, "--resolution", resolution, "uv grid samples per axis",
                  [](json& j, const int& v) { j["grid"]["resolution"] = v; });
        bind<std::uint64_t>(app, "--seed", seed, "random seed", [](json& j, const std::uint64_t& v) { j["seed"] = v; });
        bind<std::string>(app, "--output-dir", output_dir, "directory for output files",
                          [](json& j, const std::string& v) { j["output_dir"] = v; });
        auto* c = app->add_option("--mask-center", mask_center, "mainlobe centre u v")->expected(2);
        patches.emplace_back(c, [this](json& j) { j["mask"]["center"] = mask_center; });
        auto* e = app->add_option("--mask-extent", mask_extent, "mainlobe full widths du dv")->expected(2);
        patches.emplace_back(e, [this](json& j) { j["mask"]["extent"] = mask_extent; });
        bind<double>(app, "--floor-db", floor_db, "sidelobe mask level in dB",
                     [](json& j, const double& v) { j["mask"]["floor_db"] = v; });
        bind<std::string>(app, "--mask-shape", mask_shape, "rectangle | ellipse",
                          [](json& j, const std::string& v) { j["mask"]["shape"] = v; });
        bind<std::string>(app, "--reference", reference, "uniform | cosine-taper | file",
                          [](json& j, const std::string& v) { j["reference"]["kind"] = v; });
        bind<std::string>(app, "--reference-file", reference_file, "excitation CSV",
                          [](json& j, const std::string& v) { j["reference"]["path"] = v; });
        bind<double>(app, "--taper-exponent", taper_exponent, "cosine taper exponent p",
                     [](json& j, const double& v) { j["reference"]["taper_exponent"] = v; });
        bind<double>(app, "--taper-radius", taper_radius, "cosine taper radius in wavelengths",
                     [](json& j, const double& v) { j["reference"]["taper_radius"] = v; });
        bind<double>(app, "--steer-theta", steer_theta, "steering theta in degrees",
                     [](json& j, const double& v) { j["steering"]["theta_deg"] = v; });
        bind<double>(app, "--steer-phi", steer_phi, "steering phi in degrees",
                     [](json& j, const double& v) { j["steering"]["phi_deg"] = v; });
        bind<std::string>(app, "--element", element, "isotropic | cosine",
                          [](json& j, const std::string& v) { j["element"]["kind"] = v; });
        bind<double>(app, "--element-exponent", element_exponent, "cosine element exponent",
                     [](json& j, const double& v) { j["element"]["exponent"] = v; });
        bind<std::size_t>(app, "--population", population, "GA population size",
                          [](json& j, const std::size_t& v) { j["ga"]["population"] = v; });
        bind<std::size_t>(app, "--iterations", iterations, "GA iterations",
                          [](json& j, const std::size_t& v) { j["ga"]["iterations"] = v; });
        bind<double>(app, "--crossover", crossover, "crossover probability",
                     [](json& j, const double& v) { j["ga"]["crossover"] = v; });
        bind<double>(app, "--mutation", mutation, "mutation probability",
                     [](json& j, const double& v) { j["ga"]["mutation"] = v; });
        bind<std::size_t>(app, "--stagnation-window", stagnation_window, "stagnation window K_st",
                          [](json& j, const std::size_t& v) { j["ga"]["stagnation_window"] = v; });
        bind<double>(app, "--stagnation-threshold", stagnation_threshold, "stagnation threshold",
                     [](json& j, const double& v) { j["ga"]["stagnation_threshold"] = v; });
        bind<double>(app, "--budget", budget, "EDM time budget in seconds",
                     [](json& j, const double& v) { j["edm"]["budget_seconds"] = v; });
        app->add_flag("--timestamps", timestamps, "record wall-clock time in output records");
    }

    RunConfig resolve() const
    {
        json j = config_path.empty() ? to_json(RunConfig{}) : [&] {
            std::ifstream in(config_path);
            try
            {
                return json::parse(in);
            }
            catch (const json::parse_error& e)
            {
                throw ConfigError("config file '" + config_path + "' is not valid JSON: " + e.what());
            }
        }();
        for (const auto& [opt, patch] : patches)
            if (opt->count() > 0)
                patch(j);
        return config_from_json(j);
    }
};

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

template <typename Fn>
void write_with(const fs::path& path, Fn fn)
{
    std::ostringstream ss;
    fn(ss);
    write_text(path, ss.str());
}

fs::path prepare_output(const RunConfig& config)
{
    fs::path dir(config.output_dir);
    fs::create_directories(dir);
    return dir;
}

void stamp(json& j, bool timestamps)
{
    if (!timestamps)
        return;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["timestamp"] = buf;
}

void save_record(const fs::path& path, const SolutionRecord& record, bool timestamps)
{
    json j = to_json(record);
    stamp(j, timestamps);
    write_text(path, j.dump(2) + "\n");
}

void save_tiling(const fs::path& path, const HexAperture& ap, const Tiling& tiling)
{
    write_with(path, [&](std::ostream& o) { write_tiling(o, ap, tiling); });
}

Tiling load_tiling(const std::string& path, const HexAperture& ap)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open tiling file '" + path + "'");
    return read_tiling(in, ap);
}

// ---------------------------------------------------------------------------

int cmd_count(const std::vector<int>& sides, std::ostream& out)
{
    const auto s = sides.size() == 1 ? std::vector<int>{sides[0], sides[0], sides[0]} : sides;
    if (s.size() != 3)
        throw CLI::ValidationError("count expects 1 or 3 side lengths");
    if (std::any_of(s.begin(), s.end(), [](int v) { return v < 1; }))
        throw CLI::ValidationError("side lengths must be >= 1");
    out << cardinality(s[0], s[1], s[2]) << '\n';
    return kExitOk;
}

int cmd_enumerate(int rings, std::uint64_t limit, const std::string& output, std::ostream& out)
{
    if (rings < 1)
        throw CLI::ValidationError("--rings must be >= 1");
    const auto ap = build_aperture(rings, 1.0);
    std::ofstream file;
    if (!output.empty())
    {
        file.open(output, std::ios::binary);
        if (!file)
            throw std::runtime_error("cannot write '" + output + "'");
    }
    std::ostream& sink = output.empty() ? out : file;
    sink << "t,word\n";
    TilingEnumerator cursor(ap);
    do
    {
        sink << cursor.index() << ',' << to_string(cursor.word()) << '\n';
    } while ((limit == 0 || cursor.index() < limit) && cursor.advance());
    return kExitOk;
}

int cmd_edm(const Overrides& ov, bool force, bool resume, std::ostream& out)
{
    const auto config = ov.resolve();
    const auto dir = prepare_output(config);
    const auto ap = build_aperture(config.rings, config.cell_side);
    const auto evaluator = TilingEvaluator::from_config(ap, config, default_threads());
    const BigInt total = cardinality(config.rings, config.rings, config.rings);
    const auto hash = config_hash(config);

    const auto est = estimate_edm(evaluator, config.edm.warmup, total);
    out << "tilings: " << total << "\n";
    out << "estimated time: " << est.total_seconds << " s (" << est.seconds_per_tiling << " s per tiling)\n";
    if (total > BigInt(std::numeric_limits<std::uint32_t>::max()) ||
        (est.total_seconds > config.edm.budget_seconds && !force))
        throw BudgetRefusal("estimated EDM time exceeds the budget of " + format_double(config.edm.budget_seconds) +
                            " s; use --force or raise edm.budget_seconds");

    const auto checkpoint_path = dir / "edm_checkpoint.txt";
    const auto partial_path = dir / "edm_chi.partial.csv";
    EdmOptions opt;
    opt.tie_tolerance = config.edm.tie_tolerance;
    opt.checkpoint_every = config.edm.checkpoint_every;
    opt.on_checkpoint = [&](const std::vector<double>& chi, const TilingWord& last) {
        write_with(partial_path, [&](std::ostream& o) {
            for (double c : chi)
                o << format_double(c) << '\n';
        });
        write_with(checkpoint_path, [&](std::ostream& o) { write_checkpoint(o, {last, chi.size(), hash}); });
    };
    if (resume && fs::exists(checkpoint_path))
    {
        std::ifstream in(checkpoint_path);
        const auto cp = read_checkpoint(in);
        if (cp.tag != hash)
            throw InputError("checkpoint was written for a different configuration");
        std::ifstream pin(partial_path);
        std::string line;
        while (std::getline(pin, line))
            if (!line.empty())
                opt.resume_chi.push_back(parse_double(line));
        if (opt.resume_chi.size() != cp.index)
            throw InputError("checkpoint data is incomplete");
        opt.resume_word = cp.word;
        out << "resuming after tiling " << opt.resume_chi.size() << "\n";
    }

    const auto result = run_edm(evaluator, opt);
    out << "evaluations: " << result.chi.size() << "\n";

    write_with(dir / "edm_chi.csv", [&](std::ostream& o) {
        o << "t,chi\n";
        for (std::size_t i = 0; i < result.chi.size(); ++i)
            o << i + 1 << ',' << format_double(result.chi[i]) << '\n';
    });
    write_with(dir / "edm_sorted_chi.csv", [&](std::ostream& o) {
        o << "rank,t,chi\n";
        std::size_t rank = 1;
        for (const auto& [t, c] : sorted_curve(result.chi))
            o << rank++ << ',' << t << ',' << format_double(c) << '\n';
    });
    write_with(dir / "edm_co_optima.csv", [&](std::ostream& o) {
        o << "t,chi,word\n";
        TilingEnumerator cursor(ap);
        for (auto t : result.co_optima)
        {
            while (cursor.index() < t)
                cursor.advance();
            o << t << ',' << format_double(result.chi[t - 1]) << ',' << to_string(cursor.word()) << '\n';
        }
    });

    auto emit = [&](const char* name, std::uint64_t t, const TilingWord& word) {
        const auto tiling = evaluator.codec().decode(word);
        auto rec = make_record(evaluator, tiling, "EDM", config);
        rec.chi = result.chi[t - 1];
        rec.extra = {{"t", t}, {"evaluations", result.chi.size()}, {"co_optima", result.co_optima.size()}};
        save_record(dir / (std::string("edm_") + name + ".json"), rec, ov.timestamps);
        save_tiling(dir / (std::string("edm_") + name + ".tiling"), ap, tiling);
        out << name << ": t=" << t << " chi=" << format_double(rec.chi) << " sll_db=" << rec.metrics.sll_db << "\n";
    };
    emit("best", result.best, result.best_word);
    emit("worst", result.worst, result.worst_word);
    out << "co-optimal tilings: " << result.co_optima.size() << "\n";

    fs::remove(checkpoint_path);
    fs::remove(partial_path);
    return kExitOk;
}

struct CdmRun
{
    std::uint64_t seed;
    CdmResult result;
};

int cmd_cdm(const Overrides& ov, std::size_t repeat, std::ostream& out)
{
    const auto config = ov.resolve();
    if (repeat < 1)
        throw CLI::ValidationError("--repeat must be >= 1");
    const auto dir = prepare_output(config);
    const auto ap = build_aperture(config.rings, config.cell_side);
    const auto evaluator = TilingEvaluator::from_config(ap, config, default_threads());

    std::vector<CdmRun> runs;
    for (std::size_t r = 0; r < repeat; ++r)
    {
        GAConfig ga = config.ga;
        ga.seed = config.seed + r;
        runs.push_back({ga.seed, run_cdm(evaluator.codec(), ga, evaluator.oracle())});
        const auto& res = runs.back().result;
        out << "seed " << ga.seed << ": chi=" << format_double(res.best.chi)
            << " iterations=" << res.trace.best_chi.size() - 1 << " termination=" << to_string(res.trace.reason)
            << "\n";
        const auto name = repeat == 1 ? std::string("cdm_trace.csv") : "cdm_seed" + std::to_string(ga.seed) + "_trace.csv";
        write_with(dir / name, [&](std::ostream& o) { write_trace_csv(o, res.trace); });
    }

    const auto best = std::min_element(runs.begin(), runs.end(), [](const CdmRun& a, const CdmRun& b) {
        return a.result.best.chi < b.result.best.chi;
    });
    RunConfig used = config;
    used.seed = best->seed;
    used.ga.seed = best->seed;
    const auto tiling = evaluator.codec().decode(best->result.best.word);
    auto rec = make_record(evaluator, tiling, "CDM", used);
    rec.extra = {{"termination", to_string(best->result.trace.reason)},
                 {"iterations", best->result.trace.best_chi.size() - 1},
                 {"evaluations", best->result.trace.evaluation_count},
                 {"repair_fallbacks", best->result.trace.repair_fallbacks}};
    save_record(dir / "cdm_best.json", rec, ov.timestamps);
    save_tiling(dir / "cdm_best.tiling", ap, tiling);

    if (repeat > 1)
    {
        write_with(dir / "cdm_repeat.csv", [&](std::ostream& o) {
            o << "seed,best_chi,iterations,termination,evaluations\n";
            for (const auto& r : runs)
                o << r.seed << ',' << format_double(r.result.best.chi) << ',' << r.result.trace.best_chi.size() - 1
                  << ',' << to_string(r.result.trace.reason) << ',' << r.result.trace.evaluation_count << '\n';
        });
        std::vector<double> finals;
        for (const auto& r : runs)
            finals.push_back(r.result.best.chi);
        std::sort(finals.begin(), finals.end());
        out << "final chi: min=" << format_double(finals.front())
            << " median=" << format_double(finals[finals.size() / 2]) << " max=" << format_double(finals.back())
            << "\n";
    }
    out << "best: seed=" << best->seed << " chi=" << format_double(rec.chi) << "\n";
    return kExitOk;
}

int cmd_eval(const Overrides& ov, const std::string& tiling_path, std::ostream& out)
{
    const auto config = ov.resolve();
    const auto ap = build_aperture(config.rings, config.cell_side);
    const auto tiling = load_tiling(tiling_path, ap);
    const auto dir = prepare_output(config);
    const auto evaluator = TilingEvaluator::from_config(ap, config, 1);
    const auto rec = make_record(evaluator, tiling, "eval", config);
    const auto grid = evaluator.pattern(tiling);

    save_record(dir / "eval_solution.json", rec, ov.timestamps);
    write_text(dir / "metrics.json", metrics_json(rec.metrics, rec.chi).dump(2) + "\n");
    write_with(dir / "pattern.csv", [&](std::ostream& o) { write_pattern_csv(o, grid); });
    write_with(dir / "cut_phi0.csv", [&](std::ostream& o) { write_cut_csv(o, cut_phi0(grid)); });
    write_with(dir / "cut_phi90.csv", [&](std::ostream& o) { write_cut_csv(o, cut_phi90(grid)); });

    out << "chi=" << format_double(rec.chi) << " sll_db=" << rec.metrics.sll_db
        << " d_dbi=" << rec.metrics.directivity_dbi << " hpbw_az_deg=" << rec.metrics.hpbw_az_deg
        << " hpbw_el_deg=" << rec.metrics.hpbw_el_deg << "\n";
    if (!rec.metrics.peak_in_mainlobe)
        out << "warning: pattern peak lies outside the mainlobe region\n";
    return kExitOk;
}

int cmd_scan(const Overrides& ov, const std::string& tiling_path, bool control, const std::vector<double>& theta,
             const std::vector<double>& phi, std::ostream& out)
{
    auto config = ov.resolve();
    if (theta.size() == 3)
    {
        config.scan.theta_min_deg = theta[0];
        config.scan.theta_max_deg = theta[1];
        config.scan.theta_step_deg = theta[2];
    }
    if (phi.size() == 3)
    {
        config.scan.phi_min_deg = phi[0];
        config.scan.phi_max_deg = phi[1];
        config.scan.phi_step_deg = phi[2];
    }
    validate(config);
    const auto ap = build_aperture(config.rings, config.cell_side);
    const auto dir = prepare_output(config);
    const auto reference = build_reference(ap, config.reference);
    const auto& s = config.scan;
    const auto cone = ScanCone::sampled(s.theta0_deg, s.phi0_deg, s.theta_min_deg, s.theta_max_deg, s.theta_step_deg,
                                        s.phi_min_deg, s.phi_max_deg, s.phi_step_deg);
    const auto element = make_element(config.element);
    std::vector<ScanPoint> points;
    if (control)
        points = scan_map(ap, reference.amplitude, cone, config.mask.mainlobe, config.resolution, element);
    else
        points = scan_map(ap, load_tiling(tiling_path, ap), reference.amplitude, cone, config.mask.mainlobe,
                          config.resolution, element);
    write_with(dir / (control ? "scan_control.csv" : "scan.csv"), [&](std::ostream& o) {
        o << "theta_gamma,phi_gamma,sll_db,d_dbi\n";
        for (const auto& p : points)
            o << format_double(p.theta_gamma_deg) << ',' << format_double(p.phi_gamma_deg) << ','
              << format_double(p.sll_db) << ',' << format_double(p.directivity_dbi) << '\n';
    });
    out << "scan points: " << points.size() << "\n";
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Diamond-tiled hexagonal array synthesis", "hextile"};
    app.require_subcommand(1);

    std::vector<int> sides;
    auto* count = app.add_subcommand("count", "exact number of tilings of a hexagon");
    count->add_option("sides", sides, "one side length (regular) or three (a b c)")->required()->expected(1, 3);

    int rings = 0;
    std::uint64_t limit = 0;
    std::string enum_output;
    auto* enumerate = app.add_subcommand("enumerate", "list tiling words in enumeration order");
    enumerate->add_option("--rings", rings, "triangles per hexagon side")->required();
    enumerate->add_option("--limit", limit, "stop after this many tilings");
    enumerate->add_option("--output", enum_output, "write to a file instead of stdout");

    Overrides edm_ov, cdm_ov, eval_ov, scan_ov;
    bool force = false, resume = false;
    auto* edm = app.add_subcommand("edm", "exhaustive synthesis over all tilings");
    edm_ov.attach(edm);
    edm->add_flag("--force", force, "run even when the time estimate exceeds the budget");
    edm->add_flag("--resume", resume, "continue from the checkpoint in the output directory");

    std::size_t repeat = 1;
    auto* cdm = app.add_subcommand("cdm", "genetic-algorithm synthesis");
    cdm_ov.attach(cdm);
    cdm->add_option("--repeat", repeat, "number of seeds (seed, seed+1, ...)");

    std::string eval_tiling;
    auto* eval = app.add_subcommand("eval", "evaluate one tiling");
    eval_ov.attach(eval);
    eval->add_option("--tiling", eval_tiling, "tiling file")->required();

    std::string scan_tiling;
    bool control = false;
    std::vector<double> theta, phi;
    auto* scan = app.add_subcommand("scan", "SLL and directivity over a scan cone");
    scan_ov.attach(scan);
    scan->add_option("--tiling", scan_tiling, "tiling file");
    scan->add_flag("--control", control, "fully populated array instead of a tiling");
    scan->add_option("--theta-range", theta, "theta_gamma min max step (deg, max excluded)")->expected(3);
    scan->add_option("--phi-range", phi, "phi_gamma min max step (deg, max excluded)")->expected(3);

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (count->parsed())
            return cmd_count(sides, out);
        if (enumerate->parsed())
            return cmd_enumerate(rings, limit, enum_output, out);
        if (edm->parsed())
            return cmd_edm(edm_ov, force, resume, out);
        if (cdm->parsed())
            return cmd_cdm(cdm_ov, repeat, out);
        if (eval->parsed())
            return cmd_eval(eval_ov, eval_tiling, out);
        if (scan->parsed())
        {
            if (scan_tiling.empty() && !control)
                throw CLI::ValidationError("scan needs --tiling or --control");
            return cmd_scan(scan_ov, scan_tiling, control, theta, phi, out);
        }
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return kExitOk;
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << "\n" << "run 'hextile --help' for usage\n";
        return kExitUsage;
    }
    catch (const ConfigError& e)
    {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const BudgetRefusal& e)
    {
        err << "refused: " << e.what() << "\n";
        return kExitBudget;
    }
    catch (const InputError& e)
    {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    catch (const TilingError& e)
    {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace hextile
