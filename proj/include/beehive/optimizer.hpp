#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "beehive/errors.hpp"

namespace beehive {

/// Control parameters for the bees engine.
///
/// scouts..recruits_per_elite map onto the classic parameter letters
/// n, m, e, nsp and nep; patch_size is ngh (a fraction of each dimension's
/// range in continuous spaces, a hop radius in discrete ones) and
/// stagnation_limit is the number of cycles without improvement after which
/// a site is abandoned.
struct BeesParams {
  int scouts = 20;                 // n: randomly placed bees
  int sites = 5;                   // m: best candidates kept as sites
  int elite_sites = 1;             // e: sites that get the larger recruit wave
  int recruits_per_site = 2;       // nsp
  int recruits_per_elite = 4;      // nep
  double patch_size = 1.0;         // ngh
  int stagnation_limit = std::numeric_limits<int>::max();  // stlim
  int max_iterations = 50;
  std::optional<double> target_fitness;
  // Patch width multiplier applied to a site each cycle it fails to improve;
  // 1.0 keeps patches constant.
  double patch_shrink = 0.8;

  void validate() const {
    if (!(1 <= elite_sites && elite_sites <= sites && sites <= scouts)) {
      raise(Errc::invalid_params, "need 1 <= elite_sites <= sites <= scouts");
    }
    if (recruits_per_site < 1) raise(Errc::invalid_params, "recruits_per_site must be >= 1");
    if (recruits_per_elite < recruits_per_site) {
      raise(Errc::invalid_params, "recruits_per_elite must be >= recruits_per_site");
    }
    if (!(patch_size > 0.0)) raise(Errc::invalid_params, "patch_size must be > 0");
    if (stagnation_limit < 1) raise(Errc::invalid_params, "stagnation_limit must be >= 1");
    if (max_iterations < 1) raise(Errc::invalid_params, "max_iterations must be >= 1");
    if (!(patch_shrink > 0.0 && patch_shrink <= 1.0)) {
      raise(Errc::invalid_params, "patch_shrink must be in (0, 1]");
    }
  }
};

struct GaParams {
  int population_size = 40;
  double crossover_rate = 0.9;
  double mutation_rate = 0.05;
  int tournament_size = 3;
  int max_generations = 100;
  std::optional<double> target_fitness;

  void validate() const {
    if (population_size < 2) raise(Errc::invalid_params, "population_size must be >= 2");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
      raise(Errc::invalid_params, "crossover_rate must be in [0, 1]");
    }
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
      raise(Errc::invalid_params, "mutation_rate must be in [0, 1]");
    }
    if (tournament_size < 1) raise(Errc::invalid_params, "tournament_size must be >= 1");
    if (max_generations < 1) raise(Errc::invalid_params, "max_generations must be >= 1");
  }
};

/// Axis-aligned box over real vectors.
struct BoxSpace {
  using Position = std::vector<double>;

  std::vector<std::pair<double, double>> bounds;  // {lo, hi} per dimension

  static BoxSpace cube(std::size_t dimensions, double lo, double hi) {
    return BoxSpace{std::vector<std::pair<double, double>>(dimensions, {lo, hi})};
  }

  std::size_t dimensions() const { return bounds.size(); }

  void validate() const {
    if (bounds.empty()) raise(Errc::empty_space, "box space has no dimensions");
    for (const auto& [lo, hi] : bounds) {
      if (!(lo < hi)) raise(Errc::empty_space, "box space dimension has no extent");
    }
  }

  Position sample(std::mt19937_64& rng) const {
    Position x(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      x[i] = std::uniform_real_distribution<double>(bounds[i].first, bounds[i].second)(rng);
    }
    return x;
  }

  /// Uniform draw in center +- patch*(hi-lo), clamped to the bounds.
  Position neighborhood_sample(const Position& center, double patch, std::mt19937_64& rng) const {
    Position x(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      double half = patch * (bounds[i].second - bounds[i].first);
      double lo = std::max(bounds[i].first, center[i] - half);
      double hi = std::min(bounds[i].second, center[i] + half);
      x[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    return x;
  }

  /// Arithmetic blend with one uniform weight shared by all genes.
  Position crossover(const Position& a, const Position& b, std::mt19937_64& rng) const {
    double w = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    Position c(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) c[i] = w * a[i] + (1.0 - w) * b[i];
    return c;
  }

  /// Per-gene uniform redraw with the given probability.
  void mutate(Position& x, double rate, std::mt19937_64& rng) const {
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < rate) {
        x[i] = std::uniform_real_distribution<double>(bounds[i].first, bounds[i].second)(rng);
      }
    }
  }
};

/// Finite element set with a hop-distance neighborhood structure.
struct DiscreteSpace {
  using Position = std::size_t;

  std::vector<std::vector<std::size_t>> adjacency;  // element -> neighbor elements

  std::size_t size() const { return adjacency.size(); }

  void validate() const {
    if (adjacency.empty()) raise(Errc::empty_space, "discrete space has no elements");
    for (const auto& nbrs : adjacency) {
      for (std::size_t n : nbrs) {
        if (n >= adjacency.size()) raise(Errc::empty_space, "adjacency references a missing element");
      }
    }
  }

  Position sample(std::mt19937_64& rng) const {
    return std::uniform_int_distribution<std::size_t>(0, adjacency.size() - 1)(rng);
  }

  /// Uniform draw among the elements within floor(patch) hops of the center,
  /// center included; the radius never drops below one hop.
  Position neighborhood_sample(Position center, double patch, std::mt19937_64& rng) const {
    int hops = std::max(1, static_cast<int>(patch));
    std::vector<Position> reachable = within_hops(center, hops);
    return reachable[std::uniform_int_distribution<std::size_t>(0, reachable.size() - 1)(rng)];
  }

  /// Elements at hop distance <= hops from center, center included, sorted.
  std::vector<Position> within_hops(Position center, int hops) const {
    std::vector<char> seen(adjacency.size(), 0);
    std::vector<Position> frontier{center};
    std::vector<Position> all{center};
    seen[center] = 1;
    for (int d = 0; d < hops && !frontier.empty(); ++d) {
      std::vector<Position> next;
      for (Position u : frontier) {
        for (Position v : adjacency[u]) {
          if (!seen[v]) {
            seen[v] = 1;
            next.push_back(v);
            all.push_back(v);
          }
        }
      }
      frontier = std::move(next);
    }
    std::sort(all.begin(), all.end());
    return all;
  }

  Position crossover(const Position& a, const Position& b, std::mt19937_64& rng) const {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.5 ? a : b;
  }

  void mutate(Position& x, double rate, std::mt19937_64& rng) const {
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < rate) x = sample(rng);
  }
};

template <class S>
concept SearchSpace = requires(const S& s, const typename S::Position& pos, double patch, std::mt19937_64& rng) {
  { s.validate() };
  { s.sample(rng) } -> std::same_as<typename S::Position>;
  { s.neighborhood_sample(pos, patch, rng) } -> std::same_as<typename S::Position>;
};

template <class S>
concept EvolvableSpace = SearchSpace<S> &&
    requires(const S& s, typename S::Position pos, double rate, std::mt19937_64& rng) {
      { s.crossover(pos, pos, rng) } -> std::same_as<typename S::Position>;
      { s.mutate(pos, rate, rng) };
    };

template <SearchSpace S>
typename S::Position neighborhood_sample(const S& space, const typename S::Position& center,
                                         double patch, std::mt19937_64& rng) {
  if (!(patch > 0.0)) raise(Errc::invalid_params, "patch must be > 0");
  return space.neighborhood_sample(center, patch, rng);
}

template <class Position>
struct Candidate {
  Position position{};
  double fitness = -std::numeric_limits<double>::infinity();
};

template <class Position>
struct OptimizationReport {
  Candidate<Position> best;
  std::uint64_t evaluations = 0;
  int iterations_run = 0;
  // Best fitness seen so far, recorded once after initialization and once
  // per iteration; non-decreasing by construction.
  std::vector<double> fitness_history;
};

namespace detail {

template <class Position>
struct TrackedBest {
  std::optional<Candidate<Position>> best;

  // Ties keep the earliest candidate.
  void offer(const Position& pos, double fitness) {
    if (!best || fitness > best->fitness) best = Candidate<Position>{pos, fitness};
  }
};

}  // namespace detail

/// Bees engine: maximizes `fitness` over `space`.
///
/// Each iteration ranks the population, recruits around the best `sites`
/// (larger waves around the first `elite_sites` of them), keeps the best
/// recruit per site when it improves on the site, abandons sites stagnant
/// for `stagnation_limit` cycles, and re-seeds every non-site bee uniformly
/// at random. Runs are bit-reproducible for a fixed (fitness, space, params,
/// seed) tuple.
template <SearchSpace S, class F>
OptimizationReport<typename S::Position> bees_optimize(const F& fitness, const S& space,
                                                       const BeesParams& params, std::uint64_t seed) {
  params.validate();
  space.validate();
  using Position = typename S::Position;

  std::mt19937_64 rng(seed);
  OptimizationReport<Position> report;
  detail::TrackedBest<Position> best;

  auto evaluate = [&](const Position& pos) {
    double f = fitness(pos);
    ++report.evaluations;
    best.offer(pos, f);
    return f;
  };

  struct Entry {
    Position pos;
    double fitness;
    std::uint64_t order;  // evaluation index, for stable tie-breaks
    int stagnant = 0;
    double patch_scale = 1.0;
  };

  std::vector<Entry> population;
  population.reserve(static_cast<std::size_t>(params.scouts));
  for (int i = 0; i < params.scouts; ++i) {
    Position pos = space.sample(rng);
    double f = evaluate(pos);
    population.push_back(Entry{std::move(pos), f, report.evaluations - 1});
  }
  report.fitness_history.push_back(best.best->fitness);

  auto done = [&] { return params.target_fitness && best.best->fitness >= *params.target_fitness; };

  std::vector<std::size_t> ranked(population.size());
  std::vector<std::size_t> reseed;
  for (int iter = 1; iter <= params.max_iterations && !done(); ++iter) {
    std::iota(ranked.begin(), ranked.end(), std::size_t{0});
    std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
      if (population[a].fitness != population[b].fitness) {
        return population[a].fitness > population[b].fitness;
      }
      return population[a].order < population[b].order;
    });

    reseed.clear();
    for (int rank = 0; rank < params.sites; ++rank) {
      Entry& site = population[ranked[static_cast<std::size_t>(rank)]];
      if (site.stagnant >= params.stagnation_limit) {
        // Abandoned: its best so far stays in the global archive; the slot
        // rejoins the random search wave below.
        reseed.push_back(ranked[static_cast<std::size_t>(rank)]);
        continue;
      }
      int recruits = rank < params.elite_sites ? params.recruits_per_elite : params.recruits_per_site;
      std::optional<Entry> best_recruit;
      for (int k = 0; k < recruits; ++k) {
        Position pos = space.neighborhood_sample(site.pos, params.patch_size * site.patch_scale, rng);
        double f = evaluate(pos);
        if (!best_recruit || f > best_recruit->fitness) {
          best_recruit = Entry{std::move(pos), f, report.evaluations - 1};
        }
      }
      if (best_recruit && best_recruit->fitness > site.fitness) {
        site.pos = std::move(best_recruit->pos);
        site.fitness = best_recruit->fitness;
        site.order = best_recruit->order;
        site.stagnant = 0;
      } else {
        ++site.stagnant;
        site.patch_scale *= params.patch_shrink;
      }
    }
    for (std::size_t rank = static_cast<std::size_t>(params.sites); rank < ranked.size(); ++rank) {
      reseed.push_back(ranked[rank]);
    }
    for (std::size_t idx : reseed) {
      Entry& bee = population[idx];
      bee.pos = space.sample(rng);
      bee.fitness = evaluate(bee.pos);
      bee.order = report.evaluations - 1;
      bee.stagnant = 0;
      bee.patch_scale = 1.0;
    }

    report.iterations_run = iter;
    report.fitness_history.push_back(best.best->fitness);
  }

  report.best = *best.best;
  return report;
}

/// Generational GA with tournament selection, space-defined crossover and
/// mutation, and elitism of one.
template <EvolvableSpace S, class F>
OptimizationReport<typename S::Position> ga_optimize(const F& fitness, const S& space,
                                                     const GaParams& params, std::uint64_t seed) {
  params.validate();
  space.validate();
  using Position = typename S::Position;

  std::mt19937_64 rng(seed);
  OptimizationReport<Position> report;
  detail::TrackedBest<Position> best;

  auto evaluate = [&](const Position& pos) {
    double f = fitness(pos);
    ++report.evaluations;
    best.offer(pos, f);
    return f;
  };

  struct Entry {
    Position pos;
    double fitness;
    std::uint64_t order;
  };
  auto fitter = [](const Entry& a, const Entry& b) {
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    return a.order < b.order;
  };

  std::vector<Entry> population;
  population.reserve(static_cast<std::size_t>(params.population_size));
  for (int i = 0; i < params.population_size; ++i) {
    Position pos = space.sample(rng);
    double f = evaluate(pos);
    population.push_back(Entry{std::move(pos), f, report.evaluations - 1});
  }
  report.fitness_history.push_back(best.best->fitness);

  auto done = [&] { return params.target_fitness && best.best->fitness >= *params.target_fitness; };

  auto tournament = [&]() -> const Entry& {
    std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
    const Entry* winner = &population[pick(rng)];
    for (int k = 1; k < params.tournament_size; ++k) {
      const Entry& challenger = population[pick(rng)];
      if (fitter(challenger, *winner)) winner = &challenger;
    }
    return *winner;
  };

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int gen = 1; gen <= params.max_generations && !done(); ++gen) {
    std::vector<Entry> next;
    next.reserve(population.size());
    // elitism of one: the generation's best survives unchanged
    next.push_back(*std::min_element(population.begin(), population.end(),
                                     [&](const Entry& a, const Entry& b) { return fitter(a, b); }));
    while (next.size() < population.size()) {
      const Entry& p1 = tournament();
      const Entry& p2 = tournament();
      Position child = unit(rng) < params.crossover_rate ? space.crossover(p1.pos, p2.pos, rng) : p1.pos;
      space.mutate(child, params.mutation_rate, rng);
      double f = evaluate(child);
      next.push_back(Entry{std::move(child), f, report.evaluations - 1});
    }
    population = std::move(next);
    report.iterations_run = gen;
    report.fitness_history.push_back(best.best->fitness);
  }

  report.best = *best.best;
  return report;
}

/// Inverted Schwefel benchmark; the global maximum is ~0 at
/// x_i ~ 420.9687 and every component must stay in [-500, 500].
inline double schwefel(std::span<const double> x) {
  if (x.empty()) raise(Errc::out_of_domain, "schwefel needs at least one dimension");
  double sum = 0.0;
  for (double xi : x) {
    if (!(xi >= -500.0 && xi <= 500.0)) {
      raise(Errc::out_of_domain, "schwefel component outside [-500, 500]");
    }
    sum += xi * std::sin(std::sqrt(std::abs(xi)));
  }
  return sum - 418.9829 * static_cast<double>(x.size());
}

inline constexpr double kSchwefelArgmax = 420.9687;

/// Inverted sphere; global maximum 0 at the origin.
inline double sphere(std::span<const double> x) {
  double sum = 0.0;
  for (double xi : x) sum += xi * xi;
  return -sum;
}

}  // namespace beehive
