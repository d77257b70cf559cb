#include "scalebreak/errors.hpp"
#include "scalebreak/simlab.hpp"

namespace scalebreak {

namespace {

constexpr std::size_t kFirst = 800;
constexpr std::size_t kSecond = 1000;
constexpr std::size_t kHalf = 900;

using G = SegmentGenerator;

ScenarioSpec make(std::string name, G first, G second, std::size_t trials, std::uint64_t seed,
                  bool planted) {
  ScenarioSpec s;
  s.name = std::move(name);
  s.first_segment = first;
  s.second_segment = second;
  s.n_trials = trials;
  s.seed = seed;
  if (planted) {
    s.true_l = first.length;
  }
  return s;
}

ScenarioSpec null_case(std::string name, G first, G second, std::size_t trials,
                       std::uint64_t seed, bool permute = false) {
  ScenarioSpec s = make(std::move(name), first, second, trials, seed, false);
  s.permute = permute;
  return s;
}

// H1 pairs: the break after observation 800 of 1800.
std::vector<ScenarioSpec> break_pairs(const std::vector<std::pair<G, G>>& pairs,
                                      const std::string& prefix, std::size_t trials,
                                      std::uint64_t seed) {
  std::vector<ScenarioSpec> out;
  std::uint64_t offset = 0;
  for (const auto& [a, b] : pairs) {
    out.push_back(make(prefix + "-" + a.label() + "|" + b.label(), a, b, trials, seed + offset++,
                       true));
  }
  return out;
}

}  // namespace

std::vector<std::string> preset_names() { return {"table1", "table2", "fig3", "fig4", "power"}; }

std::vector<ScenarioSpec> preset_scenarios(const std::string& name, std::size_t n_trials,
                                           std::uint64_t seed) {
  if (name == "table1") {
    return {
        null_case("N(0,2)", G::normal(0, 2, kHalf), G::normal(0, 2, kHalf), n_trials, seed),
        null_case("S(1.8,0,1.2,0)", G::levy_stable({1.8, 0, 1.2, 0}, kHalf),
                  G::levy_stable({1.8, 0, 1.2, 0}, kHalf), n_trials, seed + 1),
        null_case("permuted S(1.8,0,1,0)+S(1.9,0,1,0)", G::levy_stable({1.8, 0, 1, 0}, kHalf),
                  G::levy_stable({1.9, 0, 1, 0}, kHalf), n_trials, seed + 2, true),
    };
  }
  if (name == "table2" || name == "fig3") {
    return break_pairs({{G::normal(0, 4, kFirst), G::normal(0, 4.55, kSecond)},
                        {G::levy_stable({1.9, 0, 2, 0}, kFirst),
                         G::levy_stable({1.9, 0, 2.5, 0}, kSecond)},
                        {G::levy_stable({1.8, 0, 2, 0}, kFirst),
                         G::levy_stable({1.85, 0, 2.5, 0}, kSecond)},
                        {G::levy_stable({1.8, 0, 1.2, 0}, kFirst), G::normal(0, 2.45, kSecond)}},
                       name, n_trials, seed);
  }
  if (name == "fig4") {
    return break_pairs({{G::normal(0, 2, kFirst), G::normal(0, 4, kSecond)},
                        {G::levy_stable({1.9, 0, 2, 0}, kFirst),
                         G::levy_stable({1.9, 0, 4, 0}, kSecond)},
                        {G::levy_stable({1.85, 0, 2, 0}, kFirst),
                         G::levy_stable({1.95, 0, 4, 0}, kSecond)},
                        {G::normal(0, 4, kFirst), G::levy_stable({1.9, 0, 1, 0}, kSecond)}},
                       name, n_trials, seed);
  }
  if (name == "power") {
    return break_pairs({{G::normal(0, 4, kFirst), G::normal(0, 4.2, kSecond)},
                        {G::normal(0, 4, kFirst), G::normal(0, 4.55, kSecond)},
                        {G::normal(0, 4, kFirst), G::normal(0, 5.0, kSecond)}},
                       name, n_trials, seed);
  }
  throw InvalidInput("unknown scenario preset '" + name + "'");
}

}  // namespace scalebreak
