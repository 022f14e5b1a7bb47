#include "hextile/enumeration.hpp"
#include "hextile/iga.hpp"
#include "hextile/synthesis.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace hextile;

namespace
{

std::vector<TilingWord> all_words(const HexAperture& ap)
{
    std::vector<TilingWord> out;
    enumerate_all(ap, [&](std::uint64_t, const TilingWord& w, const Tiling&) { out.push_back(w); });
    return out;
}

CostOracle table_oracle(const std::map<TilingWord, double>& table)
{
    return [&table](std::span<const TilingWord> words) {
        Eigen::VectorXd out(static_cast<Eigen::Index>(words.size()));
        for (std::size_t i = 0; i < words.size(); ++i)
            out(static_cast<Eigen::Index>(i)) = table.at(words[i]);
        return out;
    };
}

CostOracle constant_oracle(double value)
{
    return [value](std::span<const TilingWord> words) {
        return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(words.size()), value);
    };
}

// Checks every word handed to the oracle before delegating.
CostOracle checked(const WordCodec& codec, CostOracle inner)
{
    return [&codec, inner](std::span<const TilingWord> words) {
        for (const auto& w : words)
            REQUIRE(codec.is_valid(w));
        return inner(words);
    };
}

} // namespace

TEST_CASE("gene ranges are exact on small apertures")
{
    for (int n = 1; n <= 3; ++n)
    {
        const auto ap = build_aperture(n, 1.0);
        const WordCodec codec(ap);
        const GeneBounds bounds(codec);
        const auto words = all_words(ap);
        // For each prefix seen, the feasible next letters are exactly those in the words.
        std::map<std::vector<int>, std::set<int>> next;
        for (const auto& w : words)
            for (std::size_t k = 0; k < w.size(); ++k)
                next[std::vector<int>(w.letters.begin(), w.letters.begin() + static_cast<std::ptrdiff_t>(k))].insert(
                    w[k]);
        for (const auto& [prefix, letters] : next)
        {
            const auto [lo, hi] = bounds.range(prefix);
            CHECK(lo == *letters.begin());
            CHECK(hi == *letters.rbegin());
            CHECK(static_cast<int>(letters.size()) == hi - lo + 1);
        }
    }
    const auto ap = build_aperture(2, 1.0);
    const WordCodec codec(ap);
    const GeneBounds bounds(codec);
    const std::vector<int> dead{0, 0, 0, 0, 0, 0, 1}; // forces a letter no word allows
    const auto [lo, hi] = bounds.range(std::span<const int>(dead).first(6));
    CHECK(lo <= hi);
    CHECK_THROWS_AS(bounds.range(dead), std::invalid_argument);
}

TEST_CASE("sampled words are always valid and within depth")
{
    for (int n = 1; n <= 6; ++n)
    {
        const auto ap = build_aperture(n, 1.0);
        const WordCodec codec(ap);
        const GeneBounds bounds(codec);
        Rng rng(static_cast<std::uint64_t>(n));
        for (int i = 0; i < 200; ++i)
        {
            const auto w = bounds.sample(rng);
            REQUIRE(w.size() == codec.length());
            for (std::size_t l = 0; l < w.size(); ++l)
            {
                CHECK(w[l] >= 0);
                CHECK(w[l] <= codec.depth()[l]);
            }
            CHECK(codec.is_valid(w));
        }
    }
}

TEST_CASE("sampling reaches every word of a small aperture")
{
    const auto ap = build_aperture(2, 1.0);
    const WordCodec codec(ap);
    const GeneBounds bounds(codec);
    Rng rng(5);
    std::set<TilingWord> seen;
    for (int i = 0; i < 2000; ++i)
        seen.insert(bounds.sample(rng));
    CHECK(seen.size() == 20);
}

TEST_CASE("hamming fraction")
{
    CHECK(hamming_fraction(TilingWord{{0, 1, 2, 3}}, TilingWord{{0, 1, 0, 0}}) == 0.5);
    CHECK(hamming_fraction(TilingWord{{1}}, TilingWord{{1}}) == 0.0);
    CHECK_THROWS_AS(hamming_fraction(TilingWord{{1}}, TilingWord{{1, 2}}), std::invalid_argument);
}

TEST_CASE("initial population")
{
    const auto ap = build_aperture(2, 1.0);
    const WordCodec codec(ap);
    const auto words = all_words(ap);
    const std::set<TilingWord> valid(words.begin(), words.end());

    GAConfig cfg;
    cfg.population = 10;
    Rng rng(1);
    const auto pop = init_population(codec, cfg, rng);
    CHECK(pop.size() == 10);
    CHECK(std::set<TilingWord>(pop.begin(), pop.end()).size() == 10);
    for (const auto& w : pop)
        CHECK(valid.count(w) == 1);
    CHECK(pop[0] == words.front());
    CHECK(pop[1] == words.back());

    cfg.population = 2;
    const auto two = init_population(codec, cfg, rng);
    CHECK(std::set<TilingWord>(two.begin(), two.end()) == std::set<TilingWord>{words.front(), words.back()});

    cfg.population = 20;
    CHECK(init_population(codec, cfg, rng).size() == 20);
    cfg.population = 21;
    CHECK_THROWS_AS(init_population(codec, cfg, rng), std::runtime_error);
}

TEST_CASE("diversity threshold holds where the space permits")
{
    const auto ap = build_aperture(4, 1.0);
    const WordCodec codec(ap);
    GAConfig cfg;
    cfg.population = 50;
    cfg.diversity = 0.1;
    Rng rng(9);
    const auto pop = init_population(codec, cfg, rng);
    for (std::size_t i = 0; i < pop.size(); ++i)
        for (std::size_t j = i + 1; j < pop.size(); ++j)
            CHECK(hamming_fraction(pop[i], pop[j]) >= 0.1);
}

TEST_CASE("config validation")
{
    GAConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    auto bad = [](auto mutate) {
        GAConfig c;
        mutate(c);
        return c;
    };
    CHECK_THROWS_AS(bad([](GAConfig& c) { c.population = 1; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](GAConfig& c) { c.iterations = 0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](GAConfig& c) { c.crossover = 1.5; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](GAConfig& c) { c.mutation = -0.1; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](GAConfig& c) { c.stagnation_window = 1; }).validate(), std::invalid_argument);
}

TEST_CASE("without variation a step only resamples parents")
{
    const auto ap = build_aperture(3, 1.0);
    const WordCodec codec(ap);
    std::map<TilingWord, double> table;
    double c = 1.0;
    for (const auto& w : all_words(ap))
        table[w] = (c += 0.37);
    GAConfig cfg;
    cfg.population = 12;
    cfg.crossover = 0.0;
    cfg.mutation = 0.0;
    Rng rng(3);
    std::vector<Individual> pop;
    for (const auto& w : init_population(codec, cfg, rng))
        pop.push_back({w, table.at(w)});
    std::set<TilingWord> parents;
    for (const auto& i : pop)
        parents.insert(i.word);

    StepStats stats;
    const auto next = step(codec, pop, cfg, rng, table_oracle(table), &stats);
    CHECK(next.size() == 12);
    CHECK(stats.evaluations == 11);
    CHECK(stats.repair_fallbacks == 0);
    const auto best = std::min_element(pop.begin(), pop.end(), [](auto& a, auto& b) { return a.chi < b.chi; });
    CHECK(next[0].word == best->word);
    CHECK(next[0].chi == best->chi);
    for (const auto& i : next)
    {
        CHECK(parents.count(i.word) == 1);
        CHECK(i.chi == table.at(i.word));
    }
}

TEST_CASE("elitism keeps the best cost from rising")
{
    const auto ap = build_aperture(3, 1.0);
    const WordCodec codec(ap);
    std::map<TilingWord, double> table;
    Rng fill(77);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (const auto& w : all_words(ap))
        table[w] = u(fill);
    GAConfig cfg;
    cfg.population = 16;
    cfg.mutation = 0.2;
    Rng rng(4);
    std::vector<Individual> pop;
    for (const auto& w : init_population(codec, cfg, rng))
        pop.push_back({w, table.at(w)});
    const auto oracle = checked(codec, table_oracle(table));
    double best = 1e9;
    for (int k = 0; k < 50; ++k)
    {
        pop = step(codec, pop, cfg, rng, oracle);
        double now = 1e9;
        for (const auto& i : pop)
            now = std::min(now, i.chi);
        CHECK(now <= best);
        best = now;
    }
}

TEST_CASE("an unbounded mask ends the run before the first step")
{
    const auto ap = build_aperture(3, std::sqrt(3.0) / 4.0);
    TilingEvaluator eval(ap, build_reference(ap, {}), PowerMask::unbounded(), 31);
    GAConfig cfg;
    cfg.population = 10;
    const auto r = run_cdm(eval.codec(), cfg, eval.oracle());
    CHECK(r.best.chi == 0.0);
    CHECK(r.trace.reason == Termination::MaskSatisfied);
    CHECK(r.trace.best_chi.size() == 1);
    CHECK(r.trace.evaluation_count == 10);
}

TEST_CASE("a constant landscape stagnates one step after the window fills")
{
    const auto ap = build_aperture(3, 1.0);
    const WordCodec codec(ap);
    for (std::size_t window : {2u, 5u, 50u})
    {
        GAConfig cfg;
        cfg.population = 10;
        cfg.stagnation_window = window;
        cfg.stagnation_threshold = 1e-6;
        const auto r = run_cdm(codec, cfg, constant_oracle(0.5));
        CHECK(r.trace.reason == Termination::Stagnation);
        CHECK(r.trace.best_chi.size() == window + 2); // k = K_st + 1
    }
    GAConfig cfg;
    cfg.population = 10;
    cfg.iterations = 7;
    const auto r = run_cdm(codec, cfg, constant_oracle(0.5));
    CHECK(r.trace.reason == Termination::MaxIterations);
    CHECK(r.trace.best_chi.size() == 8);
}

TEST_CASE("stagnation test")
{
    const std::vector<double> flat(10, 1.0);
    CHECK_FALSE(stagnated(std::span(flat).first(5), 4, 0.0));
    CHECK(stagnated(std::span(flat).first(6), 4, 0.0));
    std::vector<double> falling{5, 4, 3, 2, 1, 1};
    CHECK_FALSE(stagnated(falling, 4, 1e-3));
    CHECK(stagnated(falling, 4, 10.0));
    const std::vector<double> zero(10, 0.0);
    CHECK_FALSE(stagnated(zero, 4, 1.0));
}

TEST_CASE("runs are reproducible from the seed")
{
    const auto ap = build_aperture(3, std::sqrt(3.0) / 4.0);
    ReferenceSpec taper;
    taper.kind = ReferenceKind::CosineTaper;
    TilingEvaluator one(ap, build_reference(ap, taper), PowerMask{}, 41, isotropic_element(), 1);
    TilingEvaluator four(ap, build_reference(ap, taper), PowerMask{}, 41, isotropic_element(), 4);
    GAConfig cfg;
    cfg.population = 20;
    cfg.iterations = 30;
    cfg.seed = 12;
    const auto a = run_cdm(one.codec(), cfg, checked(one.codec(), one.oracle()));
    const auto b = run_cdm(four.codec(), cfg, four.oracle());
    CHECK(a.trace.best_chi == b.trace.best_chi);
    CHECK(a.trace.mean_chi == b.trace.mean_chi);
    CHECK(a.trace.evaluations == b.trace.evaluations);
    CHECK(a.best.word == b.best.word);
    for (std::size_t k = 1; k < a.trace.best_chi.size(); ++k)
        CHECK(a.trace.best_chi[k] <= a.trace.best_chi[k - 1]);
    cfg.seed = 13;
    const auto c = run_cdm(one.codec(), cfg, one.oracle());
    CHECK((c.trace.mean_chi != a.trace.mean_chi));
}

TEST_CASE("the global optimum of a small aperture is found in almost every run")
{
    const auto ap = build_aperture(2, std::sqrt(3.0) / 4.0);
    ReferenceSpec taper;
    taper.kind = ReferenceKind::CosineTaper;
    TilingEvaluator eval(ap, build_reference(ap, taper), PowerMask{}, 101);
    const auto edm = run_edm(eval);
    const double optimum = edm.chi[edm.best - 1];
    std::map<TilingWord, double> table;
    const auto words = all_words(ap);
    for (std::size_t i = 0; i < words.size(); ++i)
        table[words[i]] = edm.chi[i];
    CHECK(std::set<double>(edm.chi.begin(), edm.chi.end()).size() > 1);

    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
    {
        GAConfig cfg;
        cfg.population = 10;
        cfg.iterations = 100;
        cfg.seed = seed;
        const auto r = run_cdm(eval.codec(), cfg, table_oracle(table));
        hits += r.best.chi == optimum ? 1 : 0;
    }
    MESSAGE("optimum found in " << hits << "/100 runs");
    CHECK(hits >= 95);
}
