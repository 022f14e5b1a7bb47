#ifndef HEXTILE_SYNTHESIS_HPP
#define HEXTILE_SYNTHESIS_HPP

#include "hextile/enumeration.hpp"
#include "hextile/iga.hpp"
#include "hextile/pattern.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hextile
{

// Invalid configuration: unknown keys, wrong types, out-of-range values.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

struct ElementSpec
{
    std::string kind = "isotropic"; // isotropic | cosine
    double exponent = 1.0;
};

struct ScanSpec
{
    double theta0_deg = 30.0;
    double phi0_deg = 0.0;
    double theta_min_deg = -30.0;
    double theta_max_deg = 30.0;
    double theta_step_deg = 5.0;
    double phi_min_deg = 0.0;
    double phi_max_deg = 360.0;
    double phi_step_deg = 5.0;
};

struct EdmSpec
{
    double budget_seconds = 3600.0;
    std::size_t warmup = 100;
    std::size_t checkpoint_every = 20000;
    double tie_tolerance = 1e-12; // relative
};

struct RunConfig
{
    int rings = 4;
    double cell_side = 0.4330127018922193; // sqrt(3)/4 wavelengths
    PowerMask mask;
    ReferenceSpec reference;
    double steer_theta_deg = 0.0;
    double steer_phi_deg = 0.0;
    ElementSpec element;
    int resolution = 201;
    GAConfig ga;
    ScanSpec scan;
    EdmSpec edm;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
};

// Strict parse: unknown keys and bad types raise ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);
void validate(const RunConfig& config);

// FNV-1a 64 of the canonical JSON dump without output_dir, as 16 hex digits.
std::string config_hash(const RunConfig& config);

ElementPattern make_element(const ElementSpec& spec);

// Thread count from HEXTILE_THREADS, else the hardware concurrency.
int default_threads();

// Runs body(i) for i in [0, n) on `threads` workers with a static
// interleaved partition. Exceptions are rethrown on the caller.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

/// Reference excitation (with steering phases applied), mask and grid for one
/// run, with batched and parallel cost evaluation of tilings.
///
/// Batches are evaluated in fixed blocks of 64 tilings, so results depend only
/// on the batch and never on the thread count.
class TilingEvaluator
{
public:
    static constexpr std::size_t kBlock = 64;

    TilingEvaluator(const HexAperture& aperture, ExcitationSet reference, PowerMask mask, int resolution,
                    const ElementPattern& element = isotropic_element(), int threads = 1);

    // Builds reference, mask, grid and element from a config.
    static TilingEvaluator from_config(const HexAperture& aperture, const RunConfig& config, int threads);

    const HexAperture& aperture() const noexcept { return *aperture_; }
    const ExcitationSet& reference() const noexcept { return reference_; }
    const PowerMask& mask() const noexcept { return mask_; }
    const ArrayFactor<double>& array_factor() const noexcept { return af_; }
    const WordCodec& codec() const noexcept { return codec_; }
    int threads() const noexcept { return threads_; }

    Eigen::VectorXcd weights(const Tiling& tiling) const;
    double cost(const Tiling& tiling) const;
    PatternGrid pattern(const Tiling& tiling) const;

    Eigen::VectorXd costs(std::span<const Tiling> tilings) const;
    Eigen::VectorXd costs(std::span<const TilingWord> words) const;
    CostOracle oracle() const;

private:
    const HexAperture* aperture_;
    WordCodec codec_;
    ExcitationSet reference_;
    PowerMask mask_;
    ArrayFactor<double> af_;
    int threads_;
};

// ---------------------------------------------------------------------------
// EDM

struct EdmOptions
{
    // Costs already known for t = 1..resume_chi.size(); resume_word is the word
    // of tiling t = resume_chi.size().
    std::vector<double> resume_chi;
    std::optional<TilingWord> resume_word;
    std::size_t batch = 1024;
    std::uint64_t checkpoint_every = 0; // 0 = never
    std::uint64_t stop_after = 0;       // stop once this many tilings are done (0 = run to the end)
    double tie_tolerance = 1e-12;
    std::function<void(const std::vector<double>& chi, const TilingWord& last_word)> on_checkpoint;
};

struct EdmResult
{
    std::vector<double> chi; // chi[t - 1]
    bool complete = false;
    std::uint64_t best = 0; // 1-based, lowest t among the co-optima
    std::uint64_t worst = 0;
    std::vector<std::uint64_t> co_optima;
    TilingWord best_word;
    TilingWord worst_word;
};

EdmResult run_edm(const TilingEvaluator& evaluator, const EdmOptions& options = {});

// Indices (1-based) of all t with chi within the relative tolerance of the minimum.
std::vector<std::uint64_t> co_optimal(const std::vector<double>& chi, double tolerance);

// (t, chi) ordered from the worst tiling to the best, ties by ascending t.
std::vector<std::pair<std::uint64_t, double>> sorted_curve(const std::vector<double>& chi);

// Word of the t-th tiling (1-based) by walking the enumeration.
TilingWord word_at(const HexAperture& aperture, std::uint64_t t);

struct EdmEstimate
{
    double seconds_per_tiling = 0.0;
    double total_seconds = 0.0;
};

// Times `warmup` evaluations from the start of the enumeration.
EdmEstimate estimate_edm(const TilingEvaluator& evaluator, std::size_t warmup, const BigInt& total);

// ---------------------------------------------------------------------------
// Solution records

struct SolutionRecord
{
    std::string method; // EDM | CDM | eval
    std::string config_hash;
    std::uint64_t seed = 0;
    int rings = 0;
    TilingWord word;
    Tiling tiling;
    SubarrayCoefficients coefficients;
    double chi = 0.0;
    PatternMetrics metrics;
    nlohmann::json extra = nlohmann::json::object();
};

SolutionRecord make_record(const TilingEvaluator& evaluator, const Tiling& tiling, const std::string& method,
                           const RunConfig& config);
nlohmann::json to_json(const SolutionRecord& record);
SolutionRecord record_from_json(const HexAperture& aperture, const nlohmann::json& j);
nlohmann::json metrics_json(const PatternMetrics& m, double chi);

// Trace CSV: `iteration,best_chi,mean_chi,evaluations`.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

} // namespace hextile

#endif // HEXTILE_SYNTHESIS_HPP
