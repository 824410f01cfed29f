#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ptgames/linalg.hpp"
#include "ptgames/semantics.hpp"

namespace ptg::games {

// An n-player cooperative game: per-player input domains and output ranges
// (as bit widths), a promise restricting the dealt inputs, and a winning
// condition over inputs and outputs.
struct GameSpec {
    GameSpec(std::string name, std::vector<int> input_bits, std::vector<int> output_bits,
             std::function<bool(std::span<const std::int64_t>)> promise,
             std::function<bool(std::span<const std::int64_t>, std::span<const std::int64_t>)>
                 winning);

    std::string name;
    int n_players;
    std::vector<int> input_bits;
    std::vector<int> output_bits;
    std::function<bool(std::span<const std::int64_t>)> promise;
    std::function<bool(std::span<const std::int64_t>, std::span<const std::int64_t>)> winning;

    // All promise-satisfying input tuples, lexicographic.
    std::vector<std::vector<std::int64_t>> promised_inputs() const;
    std::uint64_t input_tuple_count() const;
    std::uint64_t output_tuple_count() const;
};

// One player's local program: unitary steps on the player's own qubits,
// each a function of that player's input, followed by a computational-basis
// measurement into the player's output variable.
struct PlayerProgram {
    std::vector<std::function<Operator(std::int64_t)>> steps;
};

struct QuantumStrategy {
    int total_qubits = 0;
    std::vector<std::pair<int, int>> partition; // per player, qubit interval [begin,end)
    StateVector initial;                        // shared-state assignment
    std::vector<Operator> prep_ops;             // unitaries completing the preparation
    std::vector<PlayerProgram> players;
};

// Joint distribution over output tuples, lexicographic by tuple.
struct OutputDist {
    std::vector<std::pair<std::vector<std::int64_t>, double>> entries;
    double total() const;
    double at(std::span<const std::int64_t> outputs) const; // 0 when absent
};

struct InputRow {
    std::vector<std::int64_t> input;
    OutputDist outputs;
    double win_probability = 0.0;
};

struct RefinementCounterexample {
    std::vector<std::int64_t> input;
    std::vector<std::int64_t> output;
    double strategy_value = 0.0;
    double winning_value = 0.0;
};

struct RefinementVerdict {
    bool holds = false;
    std::optional<RefinementCounterexample> counterexample;
};

struct VerificationReport {
    std::string game_name;
    int n_players = 0;
    std::vector<int> input_bits;
    std::vector<int> output_bits;
    double tolerance = 0.0;
    std::vector<InputRow> rows; // lexicographic by input
    RefinementVerdict refinement;
    double min_win_probability = 0.0;
    bool all_wins = false; // every promised input wins with probability 1
};

// Exact joint output distribution of the strategy on one input, computed by
// forward evaluation with the final quantum state summed out.
OutputDist strategy_distribution(const GameSpec& game, const QuantumStrategy& strategy,
                                 std::span<const std::int64_t> input);

// Conditions the strategy on the promise, checks the refinement against the
// normalized winning condition, and reports per-input distributions and win
// probabilities.
VerificationReport verify_winning(const GameSpec& game, const QuantumStrategy& strategy,
                                  double tolerance = sem::kEpsProb);

// --- built-in games ---

std::pair<GameSpec, QuantumStrategy> dj_game(int k);          // 1 <= k <= 3
std::pair<GameSpec, QuantumStrategy> mermin_game();
std::pair<GameSpec, QuantumStrategy> parity_game(int n, int l); // 3<=n<=10, 1<=l<=3

// MSB-first bitstring of a value (position 0 leftmost).
std::string bitstring_of(std::uint64_t value, int width);

} // namespace ptg::games
