#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "respgames/logic/formula.hpp"
#include "respgames/model/psmas.hpp"
#include "respgames/synth/synth.hpp"

namespace respgames::oracle {

struct SimConfig {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  int horizon = 1;
  int state = 0;
  poly::ParamValuation valuation;  // free parameters; dependents are derived
  bool parallel = true;
};

struct Estimate {
  double mean = 0;
  double std_error = 0;
  std::size_t samples = 0;     // histories drawn
  std::size_t hits = 0;        // numerator count
  std::size_t base = 0;        // denominator count
  bool defined = true;         // false when the denominator was never hit
};

struct SampledHistory {
  std::vector<int> states;
  std::vector<model::JointAction> actions;
};

// Samples are drawn in chunks of this size; chunk c uses its own generator
// seeded from (seed, c), so the stream does not depend on the thread count.
inline constexpr std::size_t kChunk = 4096;

// mt19937_64 seed for a chunk: SplitMix64 applied to the master seed and
// chunk index.
std::uint64_t chunk_seed(std::uint64_t master, std::uint64_t chunk);

// Sampler over an instantiated model. Throws InadmissibleError for a
// valuation that is not admissible.
class Simulator {
 public:
  Simulator(const model::Psmas& m, const poly::ParamValuation& valuation);

  template <class Rng>
  SampledHistory sample(Rng& rng, int state, int horizon) const;

  // Visits every sample in index order (serial).
  void for_each(const SimConfig& cfg, const std::function<void(std::size_t, const SampledHistory&)>& fn) const;

  // Counts samples accepted by `classify`, which returns (in base, hit).
  // Chunks run concurrently when cfg.parallel is set; counts are identical
  // either way.
  std::pair<std::size_t, std::size_t> count(
      const SimConfig& cfg, const std::function<std::pair<bool, bool>(const SampledHistory&)>& classify) const;

 private:
  struct Choice {
    std::vector<double> cumulative;
    std::vector<int> values;
  };
  int draw(const Choice& c, double u) const;

  const model::Psmas& m_;
  std::vector<std::vector<Choice>> actions_;  // [state][agent]
  std::map<std::pair<int, model::JointAction>, Choice> successors_;
};

std::vector<SampledHistory> simulate_paths(const model::Psmas& m, const SimConfig& cfg);

// Verdict of a path formula on a full history and the step where it is
// settled. Operands must be propositional.
std::pair<bool, std::size_t> judge(const model::Psmas& m, const logic::PathFormula& psi,
                                   const SampledHistory& h);

// Frequency of `psi` over cfg.samples histories of length horizon(psi).
Estimate estimate_probability(const model::Psmas& m, const SimConfig& cfg, const logic::PathFormula& psi);

// Ratio of the sampled numerator and denominator sets of a responsibility
// degree. The kappa guard is decided exactly by enumeration.
Estimate estimate_degree(const model::Psmas& m, const SimConfig& cfg, int agent, const model::Plan& plan,
                         const logic::PathFormula& psi, logic::DegreeKind kind,
                         const std::vector<int>& coalition);

struct BestResponse {
  std::vector<poly::ParamId> params;         // the agent's grid coordinates
  std::vector<poly::ParamValuation> maximizers;
  poly::Rational value;
  std::size_t points = 0;
};

// Scans the agent's own parameters on a grid of step 1/resolution, others
// held at `others`, with exact utilities. Returns every grid point within
// 1e-12 of the best value.
BestResponse grid_best_response(const synth::UtilityModel& u, int agent, const poly::ParamValuation& others,
                                int resolution = 1000, bool parallel = true);

}  // namespace respgames::oracle
