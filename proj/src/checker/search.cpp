#include "respgames/checker/search.hpp"

#include <cmath>
#include <limits>

#include "respgames/errors.hpp"

namespace respgames::checker {

using poly::ParamId;
using poly::ParamValuation;
using poly::Rational;

std::vector<double> halton_point(std::size_t index, std::size_t dims) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  std::vector<double> out(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const int base = primes[d % 12];
    double f = 1.0, r = 0.0;
    std::size_t i = index + 1;
    while (i > 0) {
      f /= base;
      r += f * static_cast<double>(i % base);
      i /= base;
    }
    out[d] = r;
  }
  return out;
}

namespace {

struct Space {
  std::vector<std::vector<std::size_t>> groups;  // indices into vars sharing a slot

  bool feasible(const std::vector<double>& x) const {
    for (double v : x) {
      if (v < 0.0 || v > 1.0) return false;
    }
    for (const auto& g : groups) {
      double s = 0;
      for (std::size_t i : g) s += x[i];
      if (s > 1.0 + 1e-12) return false;
    }
    return true;
  }

  void project(std::vector<double>& x) const {
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);
    for (const auto& g : groups) {
      double s = 0;
      for (std::size_t i : g) s += x[i];
      if (s > 1.0) {
        for (std::size_t i : g) x[i] /= s;
      }
    }
  }
};

Space make_space(const std::vector<ParamId>& vars) {
  Space sp;
  std::map<std::pair<int, int>, std::size_t> slot_index;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    auto key = std::make_pair(vars[i].agent, vars[i].state);
    auto [it, fresh] = slot_index.emplace(key, sp.groups.size());
    if (fresh) sp.groups.emplace_back();
    sp.groups[it->second].push_back(i);
  }
  return sp;
}

bool wants_large(logic::CompareOp op) {
  return op == logic::CompareOp::Ge || op == logic::CompareOp::Gt;
}

// Score to maximize; NaN and wrong-way infinities rank last.
double score(double v, logic::CompareOp op) {
  if (std::isnan(v)) return -std::numeric_limits<double>::infinity();
  return wants_large(op) ? v : -v;
}

Rational snap(double x) {
  Rational q(static_cast<long>(std::llround(x * 1e9)), 1000000000L);
  q.canonicalize();
  return q;
}

}  // namespace

SearchResult search_witness(const model::Psmas& m, const SearchProblem& p) {
  (void)m;
  const std::size_t d = p.vars.size();
  if (d > kMaxSearchDimension) {
    throw UnsupportedQueryError("coalition has " + std::to_string(d) +
                                " free parameters; the evaluated search handles at most " +
                                std::to_string(kMaxSearchDimension));
  }
  Space space = make_space(p.vars);
  SearchResult result;

  auto full = [&](const std::vector<Rational>& x) {
    ParamValuation v = p.fixed;
    for (std::size_t i = 0; i < d; ++i) v[p.vars[i]] = x[i];
    return v;
  };
  auto satisfies = [&](const std::optional<Rational>& value) {
    if (!value) return wants_large(p.cmp);
    return logic::compare(*value, p.cmp, p.bound);
  };

  // Candidates in the order they are confirmed.
  std::vector<std::vector<Rational>> candidates;

  if (d == 0) {
    candidates.push_back({});
  } else {
    std::vector<double> best_x;
    double best = -std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<double>& x) {
      double s = score(p.approx(x), p.cmp);
      ++result.evaluations;
      if (best_x.empty() || s > best) {
        best = s;
        best_x = x;
      }
    };

    const double grid_points = std::pow(51.0, static_cast<double>(d));
    std::vector<Rational> best_grid;
    if (grid_points <= 2e5) {
      std::vector<int> idx(d, 0);
      while (true) {
        std::vector<double> x(d);
        for (std::size_t i = 0; i < d; ++i) x[i] = idx[i] / 50.0;
        if (space.feasible(x)) {
          double before = best;
          bool was_empty = best_x.empty();
          consider(x);
          if (was_empty || best > before) {
            best_grid.clear();
            for (int k : idx) {
              Rational q(k, 50);
              q.canonicalize();
              best_grid.push_back(q);
            }
          }
        }
        std::size_t j = d;
        bool done = true;
        while (j > 0) {
          --j;
          if (++idx[j] <= 50) {
            done = false;
            break;
          }
          idx[j] = 0;
        }
        if (done) break;
      }
    } else {
      for (std::size_t n = 0; n < 20000; ++n) {
        std::vector<double> x = halton_point(n, d);
        space.project(x);
        consider(x);
      }
    }

    // Pattern search from the best sample.
    std::vector<double> x = best_x;
    double fx = best;
    for (double step = 0.02; step > 1e-10; step /= 2) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (std::size_t i = 0; i < d; ++i) {
          for (double dir : {1.0, -1.0}) {
            std::vector<double> y = x;
            y[i] += dir * step;
            space.project(y);
            if (!space.feasible(y)) continue;
            double fy = score(p.approx(y), p.cmp);
            ++result.evaluations;
            if (fy > fx) {
              x = y;
              fx = fy;
              improved = true;
            }
          }
        }
      }
    }
    std::vector<Rational> polished;
    for (double v : x) polished.push_back(snap(v));
    candidates.push_back(polished);
    if (!best_grid.empty()) candidates.push_back(best_grid);

    // Vertices of the box that lie on the simplex.
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      std::vector<double> corner(d);
      for (std::size_t i = 0; i < d; ++i) corner[i] = (mask >> i) & 1 ? 1.0 : 0.0;
      if (!space.feasible(corner)) continue;
      std::vector<Rational> q;
      for (double v : corner) q.emplace_back(static_cast<long>(v));
      candidates.push_back(q);
    }
  }

  bool have_best = false;
  for (const auto& c : candidates) {
    ParamValuation v = full(c);
    std::optional<Rational> value;
    try {
      value = p.exact(v);
    } catch (const DegenerateQueryError&) {
      continue;
    }
    ++result.evaluations;
    if (satisfies(value)) {
      result.holds = true;
      result.witness = v;
      result.value = value;
      return result;
    }
    if (!have_best) {
      have_best = true;
      result.witness = v;
      result.value = value;
    }
  }
  return result;
}

}  // namespace respgames::checker
