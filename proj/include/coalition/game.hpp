#pragma once

// Finite cooperative games with a totally defined characteristic function,
// and exact Shapley values computed two ways: by enumerating all player
// permutations, and by the weighted-subset formula. The two routes are
// mathematically identical; keeping both lets them cross-check each other.
//
// Coalitions are n-bit masks indexing a dense worth table, so every one of
// the 2^n coalitions (including the empty one) must be given a worth.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "coalition/error.hpp"

namespace coalition {

using CoalitionMask = std::uint64_t;

class CoalitionGame {
 public:
  // Hard ceilings keeping worst-case enumeration at seconds scale.
  static constexpr int kMaxPlayers = 20;             // subset formula, n * 2^n
  static constexpr int kMaxPermutationPlayers = 10;  // permutation average, n! * n

  // `worth` holds one value per coalition mask, worth[0] being the empty
  // coalition. Rejects NaN/inf up front rather than letting them propagate.
  CoalitionGame(std::vector<std::string> players, std::vector<double> worth)
      : players_(std::move(players)), worth_(std::move(worth)) {
    const std::size_t n = players_.size();
    if (n < 1) raise(errc::validation, "game needs at least one player");
    if (n > kMaxPlayers) {
      raise(errc::size_limit, "game has " + std::to_string(n) +
                                  " players; the enumeration limit is " +
                                  std::to_string(kMaxPlayers));
    }
    if (worth_.size() != (std::size_t{1} << n)) {
      raise(errc::validation,
            "worth table has " + std::to_string(worth_.size()) +
                " entries; a " + std::to_string(n) + "-player game needs " +
                std::to_string(std::size_t{1} << n));
    }
    for (std::size_t mask = 0; mask < worth_.size(); ++mask) {
      if (!std::isfinite(worth_[mask])) {
        raise(errc::validation,
              "worth of coalition mask " + std::to_string(mask) + " is not finite");
      }
    }
  }

  int player_count() const { return static_cast<int>(players_.size()); }
  const std::vector<std::string>& players() const { return players_; }
  CoalitionMask full_mask() const {
    return (CoalitionMask{1} << players_.size()) - 1;
  }

  double worth(CoalitionMask coalition) const {
    if (coalition >= worth_.size()) {
      raise(errc::invalid_argument, "coalition mask out of range");
    }
    return worth_[coalition];
  }

  const std::vector<double>& worth_table() const { return worth_; }

 private:
  std::vector<std::string> players_;
  std::vector<double> worth_;
};

// Per-player payoffs distributing worth(full) - worth(empty).
struct ShapleyAllocation {
  std::vector<double> values;  // ordered as CoalitionGame::players()
  double grand_worth = 0.0;
  double empty_worth = 0.0;

  double distributed_total() const { return grand_worth - empty_worth; }
};

namespace detail {

// Efficiency must hold up to rounding noise of the enumeration itself; a
// violation here is an internal bug, not a user error.
inline ShapleyAllocation finalize_allocation(std::vector<double> values,
                                             const CoalitionGame& game) {
  ShapleyAllocation allocation{std::move(values), game.worth(game.full_mask()),
                               game.worth(0)};
  double sum = 0.0;
  double scale = 1.0;
  for (double v : allocation.values) sum += v;
  for (double w : game.worth_table()) scale = std::max(scale, std::abs(w));
  if (std::abs(sum - allocation.distributed_total()) > 1e-9 * scale) {
    throw std::logic_error("Shapley allocation violates efficiency");
  }
  return allocation;
}

}  // namespace detail

// worth(coalition + player) - worth(coalition). The player must not already
// be a member.
inline double marginal_contribution(const CoalitionGame& game, int player,
                                    CoalitionMask coalition) {
  if (player < 0 || player >= game.player_count()) {
    raise(errc::invalid_argument, "player index out of range");
  }
  const CoalitionMask bit = CoalitionMask{1} << player;
  if (coalition & bit) {
    raise(errc::invalid_argument,
          "player '" + game.players()[player] + "' is already in the coalition");
  }
  return game.worth(coalition | bit) - game.worth(coalition);
}

// Average of each player's marginal contribution over all n! join orders.
inline ShapleyAllocation shapley_by_permutations(const CoalitionGame& game) {
  const int n = game.player_count();
  if (n > CoalitionGame::kMaxPermutationPlayers) {
    raise(errc::size_limit,
          "permutation enumeration is limited to " +
              std::to_string(CoalitionGame::kMaxPermutationPlayers) +
              " players (got " + std::to_string(n) + "); use the subset formula");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sums(n, 0.0);
  double permutations = 0.0;
  do {
    CoalitionMask joined = 0;
    for (int player : order) {
      const CoalitionMask bit = CoalitionMask{1} << player;
      sums[player] += game.worth(joined | bit) - game.worth(joined);
      joined |= bit;
    }
    permutations += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));

  for (double& s : sums) s /= permutations;
  return detail::finalize_allocation(std::move(sums), game);
}

// Weighted-subset form of the same average: each coalition S not containing
// player i contributes weight |S|! (n-1-|S|)! / n! to i's value. Costs
// n * 2^n instead of n! * n.
inline ShapleyAllocation shapley_by_subsets(const CoalitionGame& game) {
  const int n = game.player_count();

  // weight(s) via the recurrence weight(0) = 1/n, weight(s) = weight(s-1) * s / (n-s)
  std::vector<double> weight(n, 0.0);
  weight[0] = 1.0 / n;
  for (int s = 1; s < n; ++s) {
    weight[s] = weight[s - 1] * static_cast<double>(s) / static_cast<double>(n - s);
  }

  const auto& worth = game.worth_table();
  std::vector<double> values(n, 0.0);
  const CoalitionMask full = game.full_mask();
  for (CoalitionMask mask = 0; mask < full; ++mask) {
    const double base = worth[mask];
    const double w = weight[std::popcount(mask)];
    for (int player = 0; player < n; ++player) {
      const CoalitionMask bit = CoalitionMask{1} << player;
      if (mask & bit) continue;
      values[player] += w * (worth[mask | bit] - base);
    }
  }
  return detail::finalize_allocation(std::move(values), game);
}

}  // namespace coalition
