#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ptgames/games.hpp"

namespace ptg::classical {

// A deterministic communication-free strategy: per player, a total lookup
// table from that player's input value to an output value.
struct LocalStrategy {
    std::vector<std::vector<std::int64_t>> tables;
};

enum class SearchMethod { Exhaustive, Backtracking };

struct SearchResult {
    double best_fraction = 0.0;
    LocalStrategy witness;
    SearchMethod method = SearchMethod::Exhaustive;
    // true when the search space was fully explored, so best_fraction is the
    // true deterministic optimum
    bool exhausted = false;
    std::uint64_t budget_consumed = 0;
    std::string notes;
};

// Share of promised inputs the strategy wins, judged by the game's winning
// predicate. This is the re-verification path for every search result.
double success_fraction(const games::GameSpec& game, const LocalStrategy& strategy);

// Enumerates every deterministic strategy tuple in lexicographic order.
// Refuses when the strategy count exceeds the cap.
SearchResult exhaustive_search(const games::GameSpec& game,
                               std::uint64_t cap = std::uint64_t{1} << 22);

// Backtracking search for a winning classical Deutsch-Jozsa strategy,
// phrased as a 2^k-coloring of the graph on 2^k-bit strings whose edges
// join strings at Hamming distance 2^{k-1}. The equality promise forces
// both players to play the same function, so one coloring is the whole
// strategy. Budget counts node expansions.
SearchResult dj_coloring_search(int k, std::uint64_t budget = std::uint64_t{1} << 24);

} // namespace ptg::classical
