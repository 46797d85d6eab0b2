#include <benchmark/benchmark.h>

#include "qkolmo/brudno.hpp"
#include "qkolmo/coding.hpp"
#include "qkolmo/halting.hpp"
#include "qkolmo/machines.hpp"

#include <random>

using namespace qkolmo;

namespace {

std::vector<CVec> random_vectors(std::size_t count, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CVec> out;
    for (std::size_t i = 0; i < count; ++i) {
        CVec v(dim);
        for (std::size_t j = 0; j < dim; ++j)
            v[j] = CRat(Rational(static_cast<long>(rng() % 17) - 8, 1 + static_cast<long>(rng() % 8)),
                        Rational(static_cast<long>(rng() % 17) - 8, 1 + static_cast<long>(rng() % 8)));
        out.push_back(std::move(v));
    }
    return out;
}

void GramSchmidtExact(benchmark::State& state) {
    auto vectors = random_vectors(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0)), 17);
    for (auto _ : state) {
        auto out = gram_schmidt(vectors);
        benchmark::DoNotOptimize(out);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(GramSchmidtExact)->RangeMultiplier(2)->Range(2, 16)->Complexity();

void IdentityEvolution(benchmark::State& state) {
    Machine machine(identity_machine());
    QubitString input = QubitString::classical("011");
    for (auto _ : state) {
        auto out = machine.apply(input, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(IdentityEvolution)->Arg(8)->Arg(16)->Arg(32);

void ExactHaltingSpace(benchmark::State& state) {
    Machine machine(identity_machine());
    for (auto _ : state) {
        HaltingAnalyzer analyzer(machine);  // fresh caches per iteration
        const auto& space = analyzer.exact_halting_space(static_cast<int>(state.range(0)),
                                                         static_cast<int>(state.range(0)) + 1);
        benchmark::DoNotOptimize(space.dim());
    }
}
BENCHMARK(ExactHaltingSpace)->Arg(1)->Arg(2)->Arg(3);

void BlindPrefixCoding(benchmark::State& state) {
    std::vector<int> lengths;
    for (int i = 0; i < state.range(0); ++i) lengths.push_back(6 + (i % 6));
    for (auto _ : state) {
        auto code = blind_prefix_code(lengths);
        benchmark::DoNotOptimize(code);
    }
}
BENCHMARK(BlindPrefixCoding)->Arg(16)->Arg(64);

void BetaMinSpectrum(benchmark::State& state) {
    SourceModel source = SourceModel::make_iid_diag(0.9);
    for (auto _ : state) {
        auto proj = beta_min(source, static_cast<int>(state.range(0)), 0.1);
        benchmark::DoNotOptimize(proj.rank);
    }
}
BENCHMARK(BetaMinSpectrum)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
