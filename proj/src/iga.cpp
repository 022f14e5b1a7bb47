#include "hextile/iga.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>

namespace hextile
{
namespace
{

constexpr double kFitnessEpsilon = 1e-12;

// Lowers `bound` along arcs: bound[to] = min(bound[to], bound[from] + weight).
template <typename Arcs>
void relax_from(const Arcs& arcs, std::vector<int>& bound, std::deque<int> queue)
{
    while (!queue.empty())
    {
        const int v = queue.front();
        queue.pop_front();
        for (const auto& a : arcs[static_cast<std::size_t>(v)])
        {
            const int candidate = bound[static_cast<std::size_t>(v)] + a.weight;
            if (candidate < bound[static_cast<std::size_t>(a.to)])
            {
                bound[static_cast<std::size_t>(a.to)] = candidate;
                queue.push_back(a.to);
            }
        }
    }
}

double mean_of(const std::vector<Individual>& pop)
{
    double s = 0.0;
    for (const auto& i : pop)
        s += i.chi;
    return s / static_cast<double>(pop.size());
}

std::size_t best_index(const std::vector<Individual>& pop)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (pop[i].chi < pop[best].chi)
            best = i;
    return best;
}

} // namespace

void GAConfig::validate() const
{
    if (population < 2)
        throw std::invalid_argument("population must be >= 2");
    if (iterations < 1)
        throw std::invalid_argument("iterations must be >= 1");
    if (!(crossover >= 0.0 && crossover <= 1.0))
        throw std::invalid_argument("crossover probability must lie in [0, 1]");
    if (!(mutation >= 0.0 && mutation <= 1.0))
        throw std::invalid_argument("mutation probability must lie in [0, 1]");
    if (stagnation_window < 2)
        throw std::invalid_argument("stagnation window must be >= 2");
    if (!(stagnation_threshold >= 0.0))
        throw std::invalid_argument("stagnation threshold must be >= 0");
    if (!(diversity >= 0.0 && diversity <= 1.0))
        throw std::invalid_argument("diversity threshold must lie in [0, 1]");
    if (retry_budget < 1)
        throw std::invalid_argument("retry budget must be >= 1");
}

std::string to_string(Termination t)
{
    switch (t)
    {
    case Termination::MaskSatisfied:
        return "mask-satisfied";
    case Termination::MaxIterations:
        return "max-iterations";
    case Termination::Stagnation:
        return "stagnation";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

GeneBounds::GeneBounds(const WordCodec& codec) : codec_(&codec)
{
    const auto& ap = codec.aperture();
    const auto nv = ap.vertex_count();
    const auto boundary = ap.boundary().values;
    const auto internal = codec.minimal_heights();
    std::vector<int> m(nv);
    for (std::size_t v = 0; v < nv; ++v)
        m[v] = v < internal.size() ? internal[v] : boundary[v - internal.size()];

    out_.resize(nv);
    in_.resize(nv);
    for (const auto& e : ap.edges())
    {
        if (e.on_boundary)
            continue;
        const int d = m[static_cast<std::size_t>(e.head)] - m[static_cast<std::size_t>(e.tail)];
        // h_head - h_tail in [-2, 1], rewritten on the letters.
        const int up = (1 - d) / 3, down = (2 + d) / 3;
        out_[static_cast<std::size_t>(e.tail)].push_back({e.head, up});
        out_[static_cast<std::size_t>(e.head)].push_back({e.tail, down});
        in_[static_cast<std::size_t>(e.head)].push_back({e.tail, up});
        in_[static_cast<std::size_t>(e.tail)].push_back({e.head, down});
    }
}

std::pair<int, int> GeneBounds::range(std::span<const int> prefix) const
{
    const auto length = codec_->length();
    if (prefix.size() >= length)
        throw std::invalid_argument("prefix covers the whole word");
    const auto nv = codec_->aperture().vertex_count();
    std::vector<int> upper(nv, INT_MAX / 2), neg_lower(nv, INT_MAX / 2);
    std::deque<int> fixed;
    for (std::size_t v = 0; v < nv; ++v)
        if (v >= length || v < prefix.size())
        {
            const int w = v < prefix.size() ? prefix[v] : 0;
            upper[v] = w;
            neg_lower[v] = -w;
            fixed.push_back(static_cast<int>(v));
        }
    relax_from(out_, upper, fixed);
    relax_from(in_, neg_lower, fixed);
    const auto k = prefix.size();
    const int lo = std::max(-neg_lower[k], 0);
    const int hi = std::min(upper[k], codec_->depth()[k]);
    return {lo, hi};
}

TilingWord GeneBounds::sample(Rng& rng) const
{
    const auto length = codec_->length();
    const auto nv = codec_->aperture().vertex_count();
    std::vector<int> upper(nv, INT_MAX / 2), neg_lower(nv, INT_MAX / 2);
    std::deque<int> fixed;
    for (std::size_t v = length; v < nv; ++v)
    {
        upper[v] = 0;
        neg_lower[v] = 0;
        fixed.push_back(static_cast<int>(v));
    }
    relax_from(out_, upper, fixed);
    relax_from(in_, neg_lower, fixed);

    TilingWord w{std::vector<int>(length, 0)};
    for (std::size_t k = 0; k < length; ++k)
    {
        const int lo = -neg_lower[k], hi = upper[k];
        if (lo > hi)
            throw std::logic_error("gene bounds became empty");
        const int value = std::uniform_int_distribution<int>(lo, hi)(rng);
        w[k] = value;
        upper[k] = value;
        neg_lower[k] = -value;
        relax_from(out_, upper, std::deque<int>{static_cast<int>(k)});
        relax_from(in_, neg_lower, std::deque<int>{static_cast<int>(k)});
    }
    return w;
}

double hamming_fraction(const TilingWord& a, const TilingWord& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("words differ in length");
    if (a.size() == 0)
        return 0.0;
    std::size_t diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        diff += a[i] != b[i];
    return static_cast<double>(diff) / static_cast<double>(a.size());
}

std::vector<TilingWord> init_population(const WordCodec& codec, const GAConfig& config, Rng& rng)
{
    config.validate();
    const GeneBounds bounds(codec);
    std::vector<TilingWord> pop;
    pop.reserve(config.population);
    pop.push_back(TilingWord{std::vector<int>(codec.length(), 0)});
    TilingWord top{std::vector<int>(codec.depth().begin(), codec.depth().end())};
    if (top != pop.front())
        pop.push_back(std::move(top));
    if (pop.size() > config.population)
        pop.resize(config.population);

    // First pass enforces the diversity threshold; the second only distinctness.
    const std::size_t budget = 200 * config.population + 1000;
    for (double threshold : {config.diversity, 0.0})
        for (std::size_t attempt = 0; attempt < budget && pop.size() < config.population; ++attempt)
        {
            auto w = bounds.sample(rng);
            const bool ok = std::all_of(pop.begin(), pop.end(), [&](const TilingWord& other) {
                const double h = hamming_fraction(w, other);
                return h > 0.0 && h >= threshold;
            });
            if (ok)
                pop.push_back(std::move(w));
        }
    if (pop.size() < config.population)
        throw std::runtime_error("could only find " + std::to_string(pop.size()) + " distinct tilings for a population of " +
                                 std::to_string(config.population));
    return pop;
}

std::vector<Individual> step(const WordCodec& codec, const std::vector<Individual>& population, const GAConfig& config,
                             Rng& rng, const CostOracle& oracle, StepStats* stats)
{
    if (population.empty())
        throw std::invalid_argument("empty population");
    const std::size_t length = codec.length();
    const auto depth = codec.depth();

    std::vector<double> fitness(population.size());
    for (std::size_t i = 0; i < population.size(); ++i)
        fitness[i] = 1.0 / (population[i].chi + kFitnessEpsilon);
    std::discrete_distribution<std::size_t> roulette(fitness.begin(), fitness.end());
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    std::vector<Individual> next;
    next.reserve(config.population);
    next.push_back(population[best_index(population)]);

    std::vector<TilingWord> fresh;
    std::size_t fallbacks = 0;
    while (next.size() + fresh.size() < config.population)
    {
        const auto& a = population[roulette(rng)].word;
        const auto& b = population[roulette(rng)].word;
        bool accepted = false;
        for (std::size_t attempt = 0; attempt < config.retry_budget && !accepted; ++attempt)
        {
            TilingWord child = a;
            if (length > 1 && coin(rng) < config.crossover)
            {
                const auto cut = std::uniform_int_distribution<std::size_t>(1, length - 1)(rng);
                std::copy(b.letters.begin() + static_cast<std::ptrdiff_t>(cut), b.letters.end(),
                          child.letters.begin() + static_cast<std::ptrdiff_t>(cut));
            }
            for (std::size_t l = 0; l < length; ++l)
                if (coin(rng) < config.mutation)
                {
                    const int delta = coin(rng) < 0.5 ? -1 : 1;
                    child[l] = std::clamp(child[l] + delta, 0, depth[l]);
                }
            if (codec.is_valid(child))
            {
                fresh.push_back(std::move(child));
                accepted = true;
            }
        }
        if (!accepted)
        {
            fresh.push_back(a);
            ++fallbacks;
        }
    }

    const Eigen::VectorXd chi = fresh.empty() ? Eigen::VectorXd() : oracle(fresh);
    for (std::size_t i = 0; i < fresh.size(); ++i)
        next.push_back({std::move(fresh[i]), chi(static_cast<Eigen::Index>(i))});
    if (stats)
    {
        stats->evaluations = fresh.size();
        stats->repair_fallbacks = fallbacks;
    }
    return next;
}

bool stagnated(std::span<const double> best_chi, std::size_t window, double threshold)
{
    if (best_chi.size() < window + 2) // needs k > K_st
        return false;
    const std::size_t k = best_chi.size() - 1;
    const double current = best_chi[k];
    if (!(current > 0.0))
        return false;
    double sum = 0.0;
    for (std::size_t j = k - window; j < k; ++j)
        sum += best_chi[j];
    return std::abs(static_cast<double>(window) * current - sum) / current <= threshold;
}

CdmResult run_cdm(const WordCodec& codec, const GAConfig& config, const CostOracle& oracle)
{
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    Rng rng(config.seed);

    // Costs are memoised per word; a repeated word is never re-evaluated.
    std::map<TilingWord, double> cache;
    RunTrace trace;
    auto cached_oracle = [&](std::span<const TilingWord> words) {
        std::vector<TilingWord> todo;
        for (const auto& w : words)
            if (!cache.count(w) && std::find(todo.begin(), todo.end(), w) == todo.end())
                todo.push_back(w);
        if (!todo.empty())
        {
            const Eigen::VectorXd chi = oracle(todo);
            for (std::size_t i = 0; i < todo.size(); ++i)
                cache.emplace(todo[i], chi(static_cast<Eigen::Index>(i)));
            trace.evaluation_count += todo.size();
        }
        Eigen::VectorXd out(static_cast<Eigen::Index>(words.size()));
        for (std::size_t i = 0; i < words.size(); ++i)
            out(static_cast<Eigen::Index>(i)) = cache.at(words[i]);
        return out;
    };

    const auto words = init_population(codec, config, rng);
    const Eigen::VectorXd chi0 = cached_oracle(words);
    std::vector<Individual> pop;
    pop.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i)
        pop.push_back({words[i], chi0(static_cast<Eigen::Index>(i))});

    Individual best = pop[best_index(pop)];
    auto record = [&] {
        trace.best_chi.push_back(best.chi);
        trace.mean_chi.push_back(mean_of(pop));
        trace.evaluations.push_back(trace.evaluation_count);
    };
    record();

    trace.reason = Termination::MaxIterations;
    if (best.chi == 0.0)
        trace.reason = Termination::MaskSatisfied;
    else
        for (std::size_t k = 1; k <= config.iterations; ++k)
        {
            StepStats stats;
            pop = step(codec, pop, config, rng, cached_oracle, &stats);
            trace.repair_fallbacks += stats.repair_fallbacks;
            const auto& leader = pop[best_index(pop)];
            if (leader.chi < best.chi)
                best = leader;
            record();
            if (best.chi == 0.0)
            {
                trace.reason = Termination::MaskSatisfied;
                break;
            }
            if (stagnated(trace.best_chi, config.stagnation_window, config.stagnation_threshold))
            {
                trace.reason = Termination::Stagnation;
                break;
            }
        }
    trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(best), std::move(trace)};
}

} // namespace hextile
