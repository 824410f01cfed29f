#include "ptgames/classical.hpp"

#include <bit>
#include <functional>

namespace ptg::classical {

double success_fraction(const games::GameSpec& game, const LocalStrategy& strategy) {
    if (strategy.tables.size() != static_cast<std::size_t>(game.n_players)) {
        throw DomainError("success_fraction: strategy arity does not match the game");
    }
    for (int i = 0; i < game.n_players; ++i) {
        if (strategy.tables[i].size() != (std::size_t{1} << game.input_bits[i])) {
            throw DomainError("success_fraction: strategy table for player " +
                              std::to_string(i) + " is not total");
        }
    }
    const auto promised = game.promised_inputs();
    std::uint64_t wins = 0;
    std::vector<std::int64_t> outputs(game.n_players);
    for (const auto& input : promised) {
        for (int i = 0; i < game.n_players; ++i) {
            outputs[i] = strategy.tables[i][static_cast<std::size_t>(input[i])];
        }
        if (game.winning(input, outputs)) ++wins;
    }
    return static_cast<double>(wins) / static_cast<double>(promised.size());
}

SearchResult exhaustive_search(const games::GameSpec& game, std::uint64_t cap) {
    // Count the strategy tuples: product over players of |R_i|^{|D_i|}.
    double log2_count = 0.0;
    for (int i = 0; i < game.n_players; ++i) {
        log2_count += static_cast<double>(std::uint64_t{1} << game.input_bits[i]) *
                      game.output_bits[i];
    }
    if (log2_count > 62.0 ||
        (std::uint64_t{1} << static_cast<unsigned>(log2_count)) > cap) {
        throw DomainError(
            "exhaustive_search: strategy count exceeds the cap; use a backtracking search");
    }

    const auto promised = game.promised_inputs();
    std::vector<std::size_t> domain_sizes, range_sizes;
    for (int i = 0; i < game.n_players; ++i) {
        domain_sizes.push_back(std::size_t{1} << game.input_bits[i]);
        range_sizes.push_back(std::size_t{1} << game.output_bits[i]);
    }

    // Flattened strategy, player 0's table first; the odometer increments the
    // last cell fastest, so enumeration is lexicographic.
    std::vector<std::size_t> cell_range;
    for (int i = 0; i < game.n_players; ++i) {
        for (std::size_t d = 0; d < domain_sizes[i]; ++d) cell_range.push_back(range_sizes[i]);
    }
    std::vector<std::int64_t> flat(cell_range.size(), 0);

    auto unflatten = [&]() {
        LocalStrategy s;
        std::size_t at = 0;
        for (int i = 0; i < game.n_players; ++i) {
            s.tables.emplace_back(flat.begin() + at, flat.begin() + at + domain_sizes[i]);
            at += domain_sizes[i];
        }
        return s;
    };

    SearchResult best;
    best.method = SearchMethod::Exhaustive;
    best.best_fraction = -1.0;
    std::uint64_t evaluated = 0;
    std::vector<std::int64_t> outputs(game.n_players);
    while (true) {
        ++evaluated;
        std::uint64_t wins = 0;
        for (const auto& input : promised) {
            std::size_t at = 0;
            for (int i = 0; i < game.n_players; ++i) {
                outputs[i] = flat[at + static_cast<std::size_t>(input[i])];
                at += domain_sizes[i];
            }
            if (game.winning(input, outputs)) ++wins;
        }
        const double fraction =
            static_cast<double>(wins) / static_cast<double>(promised.size());
        if (fraction > best.best_fraction) {
            best.best_fraction = fraction;
            best.witness = unflatten();
        }
        std::size_t d = flat.size();
        while (d > 0) {
            if (++flat[d - 1] < static_cast<std::int64_t>(cell_range[d - 1])) break;
            flat[d - 1] = 0;
            --d;
        }
        if (d == 0) break;
    }
    best.exhausted = true;
    best.budget_consumed = evaluated;
    // Re-verify the winner through the winning-predicate path.
    best.best_fraction = success_fraction(game, best.witness);
    return best;
}

SearchResult dj_coloring_search(int k, std::uint64_t budget) {
    if (k < 1 || k > 3) throw DomainError("dj_coloring_search: k outside 1..3");
    if (budget == 0) throw DomainError("dj_coloring_search: budget must be positive");

    const int m = 1 << k; // string length
    const std::size_t n_vertices = std::size_t{1} << m;
    const std::int64_t n_colors = std::int64_t{1} << k;
    const int half = m / 2;

    std::vector<std::int64_t> colors(n_vertices, -1);
    std::uint64_t expansions = 0;
    bool out_of_budget = false;

    auto conflicts = [&](std::size_t v, std::int64_t c) {
        for (std::size_t u = 0; u < v; ++u) {
            if (colors[u] == c && std::popcount(u ^ v) == half) return true;
        }
        return false;
    };

    // Lexicographic vertex order, first-fit color order.
    std::function<bool(std::size_t)> descend = [&](std::size_t v) -> bool {
        if (v == n_vertices) return true;
        for (std::int64_t c = 0; c < n_colors; ++c) {
            if (conflicts(v, c)) continue;
            if (expansions == budget) {
                out_of_budget = true;
                return false;
            }
            ++expansions;
            colors[v] = c;
            if (descend(v + 1)) return true;
            if (out_of_budget) return false; // keep the deepest partial
            colors[v] = -1;
        }
        return false;
    };
    const bool colored = descend(0);

    SearchResult result;
    result.method = SearchMethod::Backtracking;
    result.budget_consumed = expansions;
    result.exhausted = !out_of_budget;
    result.notes = "equality promise forces both players to share one function";

    std::vector<std::int64_t> table(n_vertices, 0);
    for (std::size_t v = 0; v < n_vertices; ++v) {
        if (colors[v] >= 0) table[v] = colors[v]; // uncolored vertices play 0
    }
    result.witness.tables = {table, table};
    const auto game = games::dj_game(k).first;
    result.best_fraction = success_fraction(game, result.witness);
    if (colored && result.best_fraction != 1.0) {
        throw EvaluationError("dj_coloring_search: coloring failed re-verification");
    }
    return result;
}

} // namespace ptg::classical
