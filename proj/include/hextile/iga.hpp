#ifndef HEXTILE_IGA_HPP
#define HEXTILE_IGA_HPP

#include "hextile/tiling.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hextile
{

struct GAConfig
{
    std::size_t population = 542;
    std::size_t iterations = 1000; // K
    double crossover = 0.9;        // p_c
    double mutation = 0.01;        // p_m
    std::size_t stagnation_window = 50;
    double stagnation_threshold = 1e-4;
    std::uint64_t seed = 1;
    double diversity = 0.1; // minimum normalised Hamming distance at init
    std::size_t retry_budget = 100;

    // Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

struct Individual
{
    TilingWord word;
    double chi = 0.0;
};

enum class Termination
{
    MaskSatisfied,
    MaxIterations,
    Stagnation
};

std::string to_string(Termination t);

struct RunTrace
{
    std::vector<double> best_chi; // index k = 0..k_end
    std::vector<double> mean_chi;
    std::vector<std::uint64_t> evaluations; // cumulative
    Termination reason = Termination::MaxIterations;
    std::uint64_t evaluation_count = 0;
    std::size_t repair_fallbacks = 0;
    double wall_seconds = 0.0;
};

// Costs for a batch of valid words, in order. Must be a pure function of the
// words so that evaluation may be parallelised freely.
using CostOracle = std::function<Eigen::VectorXd(std::span<const TilingWord>)>;

using Rng = std::mt19937_64;

/// Word-space geometry used by the GA: the feasible range of one gene given
/// the genes before it.
///
/// The edge rule is a system of difference constraints on the letters (every
/// constraint has weight 0 or 1), so the range is found by two 0-1 BFS passes
/// from the fixed vertices.
class GeneBounds
{
public:
    explicit GeneBounds(const WordCodec& codec);

    // Inclusive range of letter `prefix.size()` over all valid words starting
    // with `prefix`. Empty (first > second) if the prefix is not extendable.
    std::pair<int, int> range(std::span<const int> prefix) const;

    // Random valid word, each gene uniform in its feasible range.
    TilingWord sample(Rng& rng) const;

private:
    struct Arc
    {
        int to;
        int weight; // w[to] - w[from] <= weight
    };
    const WordCodec* codec_;
    std::vector<std::vector<Arc>> out_;
    std::vector<std::vector<Arc>> in_;
};

double hamming_fraction(const TilingWord& a, const TilingWord& b);

// P distinct valid words including the minimal and maximal ones. Throws
// std::runtime_error if P distinct words cannot be found.
std::vector<TilingWord> init_population(const WordCodec& codec, const GAConfig& config, Rng& rng);

struct StepStats
{
    std::uint64_t evaluations = 0;
    std::size_t repair_fallbacks = 0;
};

/// One generation: elitism, roulette selection on 1/(chi + 1e-12),
/// single-point crossover, +-1 clamped mutation and the repair loop.
/// All random draws happen before the batch evaluation.
std::vector<Individual> step(const WordCodec& codec, const std::vector<Individual>& population,
                             const GAConfig& config, Rng& rng, const CostOracle& oracle, StepStats* stats = nullptr);

struct CdmResult
{
    Individual best;
    RunTrace trace;
};

CdmResult run_cdm(const WordCodec& codec, const GAConfig& config, const CostOracle& oracle);

// Trailing-window stagnation test on the best-cost history (k = size - 1).
bool stagnated(std::span<const double> best_chi, std::size_t window, double threshold);

} // namespace hextile

#endif // HEXTILE_IGA_HPP
