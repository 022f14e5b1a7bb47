#include "hextile/synthesis.hpp"

#include "hextile/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

namespace hextile
{
namespace
{

using nlohmann::json;

// Strict object reader: every key read is recorded, leftovers are errors.
class Section
{
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(path_ + " must be an object");
    }

    // Rejects keys that were never read.
    void finish() const
    {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key))
                throw ConfigError("unknown key '" + where(key) + "'");
    }

    bool has(const std::string& key)
    {
        seen_.insert(key);
        return j_.contains(key);
    }

    template <typename T>
    void read(const std::string& key, T& out)
    {
        if (!has(key))
            return;
        const auto& v = j_.at(key);
        try
        {
            if constexpr (std::is_same_v<T, bool>)
            {
                if (!v.is_boolean())
                    throw ConfigError("");
            }
            else if constexpr (std::is_integral_v<T>)
            {
                if (!v.is_number_integer())
                    throw ConfigError("");
                if constexpr (std::is_unsigned_v<T>)
                    if (v.get<long long>() < 0)
                        throw ConfigError("");
            }
            else if constexpr (std::is_floating_point_v<T>)
            {
                if (!v.is_number())
                    throw ConfigError("");
            }
            else if constexpr (std::is_same_v<T, std::string>)
            {
                if (!v.is_string())
                    throw ConfigError("");
            }
            out = v.get<T>();
        }
        catch (const std::exception&)
        {
            throw ConfigError("key '" + where(key) + "' has the wrong type");
        }
    }

    void read_pair(const std::string& key, Eigen::Vector2d& out)
    {
        if (!has(key))
            return;
        const auto& v = j_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw ConfigError("key '" + where(key) + "' must be a two-number array");
        out = {v[0].get<double>(), v[1].get<double>()};
    }

    Section sub(const std::string& key)
    {
        seen_.insert(key);
        return Section(j_.contains(key) ? j_.at(key) : empty(), where(key));
    }

    const json& raw(const std::string& key)
    {
        seen_.insert(key);
        return j_.contains(key) ? j_.at(key) : empty();
    }

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    static const json& empty()
    {
        static const json e = json::object();
        return e;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string shape_name(RegionShape s) { return s == RegionShape::Rectangle ? "rectangle" : "ellipse"; }

std::string reference_name(ReferenceKind k)
{
    switch (k)
    {
    case ReferenceKind::Uniform:
        return "uniform";
    case ReferenceKind::CosineTaper:
        return "cosine-taper";
    case ReferenceKind::File:
        return "file";
    }
    return "uniform";
}

ReferenceKind reference_kind(const std::string& s)
{
    if (s == "uniform")
        return ReferenceKind::Uniform;
    if (s == "cosine-taper")
        return ReferenceKind::CosineTaper;
    if (s == "file")
        return ReferenceKind::File;
    throw ConfigError("reference.kind must be uniform, cosine-taper or file");
}

json to_vec(const std::vector<double>& v) { return json(v); }

std::vector<double> from_eigen(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

} // namespace

RunConfig config_from_json(const json& j)
{
    RunConfig c;
    Section root(j, "");
    int version = -1;
    if (!root.has("schema_version"))
        throw ConfigError("missing schema_version");
    root.read("schema_version", version);
    if (version != kSchemaVersion)
        throw ConfigError("unsupported schema_version " + std::to_string(version));

    {
        auto s = root.sub("aperture");
        s.read("rings", c.rings);
        s.read("cell_side", c.cell_side);
        s.finish();
    }
    {
        auto s = root.sub("mask");
        s.read_pair("center", c.mask.mainlobe.center);
        s.read_pair("extent", c.mask.mainlobe.extent);
        if (s.has("floor_db"))
        {
            const auto& f = s.raw("floor_db");
            if (f.is_null())
                c.mask.floor_db = std::numeric_limits<double>::infinity();
            else
                s.read("floor_db", c.mask.floor_db);
        }
        std::string shape = shape_name(c.mask.mainlobe.shape);
        s.read("shape", shape);
        if (shape == "rectangle")
            c.mask.mainlobe.shape = RegionShape::Rectangle;
        else if (shape == "ellipse")
            c.mask.mainlobe.shape = RegionShape::Ellipse;
        else
            throw ConfigError("mask.shape must be rectangle or ellipse");
        s.finish();
    }
    {
        auto s = root.sub("reference");
        std::string kind = reference_name(c.reference.kind);
        s.read("kind", kind);
        c.reference.kind = reference_kind(kind);
        s.read("taper_exponent", c.reference.taper_exponent);
        if (s.has("taper_radius") && !s.raw("taper_radius").is_null())
        {
            double r = 0.0;
            s.read("taper_radius", r);
            c.reference.taper_radius = r;
        }
        s.read("path", c.reference.path);
        s.finish();
    }
    {
        auto s = root.sub("steering");
        s.read("theta_deg", c.steer_theta_deg);
        s.read("phi_deg", c.steer_phi_deg);
        s.finish();
    }
    {
        auto s = root.sub("element");
        s.read("kind", c.element.kind);
        s.read("exponent", c.element.exponent);
        s.finish();
    }
    {
        auto s = root.sub("grid");
        s.read("resolution", c.resolution);
        s.finish();
    }
    {
        auto s = root.sub("ga");
        s.read("population", c.ga.population);
        s.read("iterations", c.ga.iterations);
        s.read("crossover", c.ga.crossover);
        s.read("mutation", c.ga.mutation);
        s.read("stagnation_window", c.ga.stagnation_window);
        s.read("stagnation_threshold", c.ga.stagnation_threshold);
        s.read("diversity", c.ga.diversity);
        s.read("retry_budget", c.ga.retry_budget);
        s.finish();
    }
    {
        auto s = root.sub("scan");
        s.read("theta0_deg", c.scan.theta0_deg);
        s.read("phi0_deg", c.scan.phi0_deg);
        s.read("theta_min_deg", c.scan.theta_min_deg);
        s.read("theta_max_deg", c.scan.theta_max_deg);
        s.read("theta_step_deg", c.scan.theta_step_deg);
        s.read("phi_min_deg", c.scan.phi_min_deg);
        s.read("phi_max_deg", c.scan.phi_max_deg);
        s.read("phi_step_deg", c.scan.phi_step_deg);
        s.finish();
    }
    {
        auto s = root.sub("edm");
        s.read("budget_seconds", c.edm.budget_seconds);
        s.read("warmup", c.edm.warmup);
        s.read("checkpoint_every", c.edm.checkpoint_every);
        s.read("tie_tolerance", c.edm.tie_tolerance);
        s.finish();
    }
    root.read("output_dir", c.output_dir);
    root.read("seed", c.seed);
    c.ga.seed = c.seed;
    root.finish();
    validate(c);
    return c;
}

void validate(const RunConfig& c)
{
    if (c.rings < 1)
        throw ConfigError("aperture.rings must be >= 1");
    if (!(c.cell_side > 0.0))
        throw ConfigError("aperture.cell_side must be positive");
    if (c.resolution < 2)
        throw ConfigError("grid.resolution must be >= 2");
    if (!(c.mask.mainlobe.extent.x() > 0.0) || !(c.mask.mainlobe.extent.y() > 0.0))
        throw ConfigError("mask.extent must be positive");
    if (c.element.kind != "isotropic" && c.element.kind != "cosine")
        throw ConfigError("element.kind must be isotropic or cosine");
    if (c.reference.kind == ReferenceKind::File && c.reference.path.empty())
        throw ConfigError("reference.path is required for kind 'file'");
    if (!(c.steer_theta_deg >= 0.0 && c.steer_theta_deg < 90.0))
        throw ConfigError("steering.theta_deg must lie in [0, 90)");
    if (!(c.scan.theta_step_deg > 0.0) || !(c.scan.phi_step_deg > 0.0))
        throw ConfigError("scan steps must be positive");
    if (!(c.edm.tie_tolerance >= 0.0))
        throw ConfigError("edm.tie_tolerance must be >= 0");
    try
    {
        c.ga.validate();
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(std::string("ga: ") + e.what());
    }
}

json to_json(const RunConfig& c)
{
    json j;
    j["schema_version"] = kSchemaVersion;
    j["aperture"] = {{"rings", c.rings}, {"cell_side", c.cell_side}};
    j["mask"] = {{"center", {c.mask.mainlobe.center.x(), c.mask.mainlobe.center.y()}},
                 {"extent", {c.mask.mainlobe.extent.x(), c.mask.mainlobe.extent.y()}},
                 {"floor_db", std::isfinite(c.mask.floor_db) ? json(c.mask.floor_db) : json(nullptr)},
                 {"shape", shape_name(c.mask.mainlobe.shape)}};
    j["reference"] = {{"kind", reference_name(c.reference.kind)},
                      {"taper_exponent", c.reference.taper_exponent},
                      {"taper_radius", c.reference.taper_radius ? json(*c.reference.taper_radius) : json(nullptr)},
                      {"path", c.reference.path}};
    j["steering"] = {{"theta_deg", c.steer_theta_deg}, {"phi_deg", c.steer_phi_deg}};
    j["element"] = {{"kind", c.element.kind}, {"exponent", c.element.exponent}};
    j["grid"] = {{"resolution", c.resolution}};
    j["ga"] = {{"population", c.ga.population},
               {"iterations", c.ga.iterations},
               {"crossover", c.ga.crossover},
               {"mutation", c.ga.mutation},
               {"stagnation_window", c.ga.stagnation_window},
               {"stagnation_threshold", c.ga.stagnation_threshold},
               {"diversity", c.ga.diversity},
               {"retry_budget", c.ga.retry_budget}};
    j["scan"] = {{"theta0_deg", c.scan.theta0_deg},         {"phi0_deg", c.scan.phi0_deg},
                 {"theta_min_deg", c.scan.theta_min_deg},   {"theta_max_deg", c.scan.theta_max_deg},
                 {"theta_step_deg", c.scan.theta_step_deg}, {"phi_min_deg", c.scan.phi_min_deg},
                 {"phi_max_deg", c.scan.phi_max_deg},       {"phi_step_deg", c.scan.phi_step_deg}};
    j["edm"] = {{"budget_seconds", c.edm.budget_seconds},
                {"warmup", c.edm.warmup},
                {"checkpoint_every", c.edm.checkpoint_every},
                {"tie_tolerance", c.edm.tie_tolerance}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try
    {
        j = json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const RunConfig& config)
{
    auto j = to_json(config);
    j.erase("output_dir");
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : j.dump())
    {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ElementPattern make_element(const ElementSpec& spec)
{
    if (spec.kind == "isotropic")
        return isotropic_element();
    if (spec.kind == "cosine")
        return cosine_element(spec.exponent);
    throw ConfigError("element.kind must be isotropic or cosine");
}

int default_threads()
{
    if (const char* env = std::getenv("HEXTILE_THREADS"))
    {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n >= 1)
            return static_cast<int>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body)
{
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex lock;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w)
        pool.emplace_back([&, w] {
            try
            {
                for (std::size_t i = w; i < n; i += workers)
                    body(i);
            }
            catch (...)
            {
                std::lock_guard guard(lock);
                if (!failure)
                    failure = std::current_exception();
            }
        });
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------

TilingEvaluator::TilingEvaluator(const HexAperture& aperture, ExcitationSet reference, PowerMask mask, int resolution,
                                 const ElementPattern& element, int threads)
    : aperture_(&aperture), codec_(aperture), reference_(std::move(reference)), mask_(mask),
      af_(element_positions(aperture), resolution, element), threads_(std::max(1, threads))
{
    if (reference_.size() != static_cast<Eigen::Index>(aperture.triangle_count()))
        throw std::invalid_argument("reference length does not match the aperture");
}

TilingEvaluator TilingEvaluator::from_config(const HexAperture& aperture, const RunConfig& config, int threads)
{
    ExcitationSet ref = build_reference(aperture, config.reference);
    if (config.steer_theta_deg != 0.0)
        ref.phase += steering_phases(aperture, config.steer_theta_deg, config.steer_phi_deg);
    return TilingEvaluator(aperture, std::move(ref), config.mask, config.resolution, make_element(config.element),
                           threads);
}

Eigen::VectorXcd TilingEvaluator::weights(const Tiling& tiling) const
{
    return element_weights(tiling, subarray_coefficients(tiling, reference_));
}

double TilingEvaluator::cost(const Tiling& tiling) const { return af_.cost(weights(tiling), mask_); }

PatternGrid TilingEvaluator::pattern(const Tiling& tiling) const { return af_.pattern(weights(tiling)); }

Eigen::VectorXd TilingEvaluator::costs(std::span<const Tiling> tilings) const
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(tilings.size()));
    const std::size_t blocks = (tilings.size() + kBlock - 1) / kBlock;
    parallel_for(blocks, threads_, [&](std::size_t b) {
        const std::size_t first = b * kBlock, count = std::min(kBlock, tilings.size() - first);
        Eigen::MatrixXcd w(af_.element_count(), static_cast<Eigen::Index>(count));
        for (std::size_t i = 0; i < count; ++i)
            w.col(static_cast<Eigen::Index>(i)) = weights(tilings[first + i]);
        out.segment(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)) = af_.costs(w, mask_);
    });
    return out;
}

Eigen::VectorXd TilingEvaluator::costs(std::span<const TilingWord> words) const
{
    std::vector<Tiling> tilings;
    tilings.reserve(words.size());
    for (const auto& w : words)
        tilings.push_back(codec_.decode(w));
    return costs(std::span<const Tiling>(tilings));
}

CostOracle TilingEvaluator::oracle() const
{
    return [this](std::span<const TilingWord> words) { return costs(words); };
}

// ---------------------------------------------------------------------------

std::vector<std::uint64_t> co_optimal(const std::vector<double>& chi, double tolerance)
{
    std::vector<std::uint64_t> out;
    if (chi.empty())
        return out;
    const double best = *std::min_element(chi.begin(), chi.end());
    const double slack = tolerance * std::abs(best);
    for (std::size_t i = 0; i < chi.size(); ++i)
        if (chi[i] - best <= slack)
            out.push_back(i + 1);
    return out;
}

std::vector<std::pair<std::uint64_t, double>> sorted_curve(const std::vector<double>& chi)
{
    std::vector<std::pair<std::uint64_t, double>> out;
    out.reserve(chi.size());
    for (std::size_t i = 0; i < chi.size(); ++i)
        out.emplace_back(i + 1, chi[i]);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

TilingWord word_at(const HexAperture& aperture, std::uint64_t t)
{
    if (t < 1)
        throw std::invalid_argument("tiling index starts at 1");
    TilingEnumerator cursor(aperture);
    while (cursor.index() < t)
        if (!cursor.advance())
            throw std::out_of_range("tiling index beyond the last tiling");
    return cursor.word();
}

EdmResult run_edm(const TilingEvaluator& evaluator, const EdmOptions& options)
{
    const auto& ap = evaluator.aperture();
    EdmResult result;
    result.chi = options.resume_chi;

    std::optional<TilingEnumerator> cursor;
    bool more = true;
    if (result.chi.empty())
        cursor.emplace(ap);
    else
    {
        if (!options.resume_word)
            throw std::invalid_argument("resuming needs the word of the last evaluated tiling");
        cursor.emplace(ap, *options.resume_word, result.chi.size());
        more = cursor->advance();
    }

    std::vector<Tiling> batch;
    std::vector<TilingWord> words;
    const std::size_t batch_size = std::max<std::size_t>(1, options.batch);
    std::uint64_t since_checkpoint = 0;
    TilingWord last_done = options.resume_word.value_or(TilingWord{});
    auto flush = [&] {
        if (batch.empty())
            return;
        const Eigen::VectorXd c = evaluator.costs(std::span<const Tiling>(batch));
        result.chi.insert(result.chi.end(), c.data(), c.data() + c.size());
        since_checkpoint += batch.size();
        last_done = words.back();
        if (options.on_checkpoint && options.checkpoint_every > 0 && since_checkpoint >= options.checkpoint_every)
        {
            options.on_checkpoint(result.chi, last_done);
            since_checkpoint = 0;
        }
        batch.clear();
        words.clear();
    };

    while (more)
    {
        if (options.stop_after > 0 && result.chi.size() + batch.size() >= options.stop_after)
            break;
        batch.push_back(cursor->tiling());
        words.push_back(cursor->word());
        if (batch.size() == batch_size)
            flush();
        more = cursor->advance();
    }
    flush();
    result.complete = !more;
    if (!result.complete)
    {
        if (options.on_checkpoint)
            options.on_checkpoint(result.chi, last_done);
        return result;
    }

    result.co_optima = co_optimal(result.chi, options.tie_tolerance);
    result.best = result.co_optima.front();
    result.worst = static_cast<std::uint64_t>(std::max_element(result.chi.begin(), result.chi.end()) -
                                              result.chi.begin()) + 1;
    result.best_word = word_at(ap, result.best);
    result.worst_word = word_at(ap, result.worst);
    return result;
}

EdmEstimate estimate_edm(const TilingEvaluator& evaluator, std::size_t warmup, const BigInt& total)
{
    TilingEnumerator cursor(evaluator.aperture());
    std::vector<Tiling> sample;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < std::max<std::size_t>(1, warmup); ++i)
    {
        sample.push_back(cursor.tiling());
        if (!cursor.advance())
            break;
    }
    evaluator.costs(std::span<const Tiling>(sample));
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EdmEstimate e;
    e.seconds_per_tiling = elapsed / static_cast<double>(sample.size());
    e.total_seconds = e.seconds_per_tiling * total.convert_to<double>();
    return e;
}

// ---------------------------------------------------------------------------

SolutionRecord make_record(const TilingEvaluator& evaluator, const Tiling& tiling, const std::string& method,
                           const RunConfig& config)
{
    SolutionRecord r;
    r.method = method;
    r.config_hash = config_hash(config);
    r.seed = config.seed;
    r.rings = evaluator.aperture().rings();
    r.word = evaluator.codec().encode(tiling);
    r.tiling = tiling;
    r.coefficients = subarray_coefficients(tiling, evaluator.reference());
    const auto w = element_weights(tiling, r.coefficients);
    r.chi = evaluator.array_factor().cost(w, evaluator.mask());
    r.metrics = metrics(evaluator.array_factor().pattern(w), evaluator.mask().mainlobe);
    return r;
}

json metrics_json(const PatternMetrics& m, double chi)
{
    return {{"sll_db", m.sll_db},
            {"d_dbi", m.directivity_dbi},
            {"hpbw_az_deg", m.hpbw_az_deg},
            {"hpbw_el_deg", m.hpbw_el_deg},
            {"chi", chi},
            {"peak_in_mainlobe", m.peak_in_mainlobe}};
}

json to_json(const SolutionRecord& r)
{
    json tiles = json::array();
    for (const auto& t : r.tiling.tiles())
        tiles.push_back({t.id, std::string(1, to_char(t.orientation)), t.triangles[0], t.triangles[1]});
    json j = {{"method", r.method},
              {"config_hash", r.config_hash},
              {"seed", r.seed},
              {"rings", r.rings},
              {"word", r.word.letters},
              {"tiles", tiles},
              {"coefficients",
               {{"amplitude", to_vec(from_eigen(r.coefficients.amplitude))},
                {"phase_rad", to_vec(from_eigen(r.coefficients.phase))}}},
              {"chi", r.chi},
              {"metrics", metrics_json(r.metrics, r.chi)}};
    for (const auto& [k, v] : r.extra.items())
        j[k] = v;
    return j;
}

SolutionRecord record_from_json(const HexAperture& aperture, const json& j)
{
    try
    {
        SolutionRecord r;
        r.method = j.at("method").get<std::string>();
        r.config_hash = j.at("config_hash").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.rings = j.at("rings").get<int>();
        r.word = TilingWord{j.at("word").get<std::vector<int>>()};
        TilingRecord tr;
        tr.rings = r.rings;
        tr.word = r.word;
        for (const auto& t : j.at("tiles"))
        {
            const auto o = t.at(1).get<std::string>();
            if (o.size() != 1)
                throw InputError("bad tile orientation '" + o + "'");
            tr.tiles.push_back({t.at(0).get<int>(), orientation_from_char(o[0]), t.at(2).get<int>(), t.at(3).get<int>()});
        }
        r.tiling = to_tiling(aperture, tr);
        const auto amp = j.at("coefficients").at("amplitude").get<std::vector<double>>();
        const auto ph = j.at("coefficients").at("phase_rad").get<std::vector<double>>();
        r.coefficients.amplitude = Eigen::Map<const Eigen::VectorXd>(amp.data(), static_cast<Eigen::Index>(amp.size()));
        r.coefficients.phase = Eigen::Map<const Eigen::VectorXd>(ph.data(), static_cast<Eigen::Index>(ph.size()));
        r.chi = j.at("chi").get<double>();
        const auto& m = j.at("metrics");
        r.metrics.sll_db = m.at("sll_db").get<double>();
        r.metrics.directivity_dbi = m.at("d_dbi").get<double>();
        r.metrics.hpbw_az_deg = m.at("hpbw_az_deg").get<double>();
        r.metrics.hpbw_el_deg = m.at("hpbw_el_deg").get<double>();
        r.metrics.peak_in_mainlobe = m.value("peak_in_mainlobe", true);
        return r;
    }
    catch (const json::exception& e)
    {
        throw InputError(std::string("malformed solution record: ") + e.what());
    }
    catch (const std::invalid_argument& e)
    {
        throw InputError(std::string("malformed solution record: ") + e.what());
    }
}

void write_trace_csv(std::ostream& out, const RunTrace& trace)
{
    out << "iteration,best_chi,mean_chi,evaluations\n";
    for (std::size_t k = 0; k < trace.best_chi.size(); ++k)
        out << k << ',' << format_double(trace.best_chi[k]) << ',' << format_double(trace.mean_chi[k]) << ','
            << trace.evaluations[k] << '\n';
}

} // namespace hextile
