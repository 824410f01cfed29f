#include "ptgames/games.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

namespace ptg::games {

namespace {

// Input-space scan limit for the vacuous-promise check at construction.
constexpr std::uint64_t kPromiseScanCap = std::uint64_t{1} << 24;

// Walks input tuples in lexicographic order; visit returns false to stop.
void for_each_input(const std::vector<int>& bits,
                    const std::function<bool(std::span<const std::int64_t>)>& visit) {
    std::vector<std::int64_t> tuple(bits.size(), 0);
    while (true) {
        if (!visit(tuple)) return;
        std::size_t d = tuple.size();
        while (d > 0) {
            if (++tuple[d - 1] < (std::int64_t{1} << bits[d - 1])) break;
            tuple[d - 1] = 0;
            --d;
        }
        if (d == 0) return;
    }
}

} // namespace

GameSpec::GameSpec(
    std::string name_, std::vector<int> input_bits_, std::vector<int> output_bits_,
    std::function<bool(std::span<const std::int64_t>)> promise_,
    std::function<bool(std::span<const std::int64_t>, std::span<const std::int64_t>)> winning_)
    : name(std::move(name_)),
      n_players(static_cast<int>(input_bits_.size())),
      input_bits(std::move(input_bits_)),
      output_bits(std::move(output_bits_)),
      promise(std::move(promise_)),
      winning(std::move(winning_)) {
    if (n_players < 1) throw DomainError("GameSpec: need at least one player");
    if (output_bits.size() != input_bits.size()) {
        throw DomainError("GameSpec: output range count does not match player count");
    }
    for (int b : input_bits) {
        if (b < 0 || b > 16) throw DomainError("GameSpec: unsupported input width");
    }
    for (int b : output_bits) {
        if (b < 0 || b > 16) throw DomainError("GameSpec: unsupported output width");
    }
    bool satisfiable = false;
    std::uint64_t scanned = 0;
    for_each_input(input_bits, [&](std::span<const std::int64_t> tuple) {
        if (promise(tuple)) {
            satisfiable = true;
            return false;
        }
        return ++scanned < kPromiseScanCap;
    });
    if (!satisfiable) {
        if (scanned >= kPromiseScanCap) {
            throw DomainError("GameSpec: no promised input found within the scan budget");
        }
        throw DomainError("GameSpec: the promise is unsatisfiable (vacuous game)");
    }
}

std::vector<std::vector<std::int64_t>> GameSpec::promised_inputs() const {
    std::vector<std::vector<std::int64_t>> out;
    for_each_input(input_bits, [&](std::span<const std::int64_t> tuple) {
        if (promise(tuple)) out.emplace_back(tuple.begin(), tuple.end());
        return true;
    });
    return out;
}

std::uint64_t GameSpec::input_tuple_count() const {
    std::uint64_t count = 1;
    for (int b : input_bits) count <<= b;
    return count;
}

std::uint64_t GameSpec::output_tuple_count() const {
    std::uint64_t count = 1;
    for (int b : output_bits) count <<= b;
    return count;
}

double OutputDist::total() const {
    double t = 0.0;
    for (const auto& e : entries) t += e.second;
    return t;
}

double OutputDist::at(std::span<const std::int64_t> outputs) const {
    for (const auto& e : entries) {
        if (std::equal(e.first.begin(), e.first.end(), outputs.begin(), outputs.end())) {
            return e.second;
        }
    }
    return 0.0;
}

std::string bitstring_of(std::uint64_t value, int width) {
    std::string s(width, '0');
    for (int pos = 0; pos < width; ++pos) {
        if (bit_at(value, pos, width)) s[pos] = '1';
    }
    return s;
}

// ---------------------------------------------------------------------------
// Strategy evaluation through the specification calculus
// ---------------------------------------------------------------------------

namespace {

std::string input_var(int player) { return "x" + std::to_string(player); }
std::string output_var(int player) { return "y" + std::to_string(player); }
std::string party_name(int player) { return "p" + std::to_string(player); }

void check_strategy(const GameSpec& game, const QuantumStrategy& strategy) {
    if (static_cast<int>(strategy.players.size()) != game.n_players ||
        static_cast<int>(strategy.partition.size()) != game.n_players) {
        throw DomainError("strategy: player count does not match the game");
    }
    int expect = 0;
    for (const auto& [begin, end] : strategy.partition) {
        if (begin != expect || end <= begin) {
            throw DomainError("strategy: qubit partition is not a disjoint cover");
        }
        expect = end;
    }
    if (expect != strategy.total_qubits) {
        throw DomainError("strategy: qubit partition does not cover the shared register");
    }
    if (strategy.initial.n_qubits() != strategy.total_qubits) {
        throw DomainError("strategy: shared state size mismatch");
    }
    for (int i = 0; i < game.n_players; ++i) {
        const int width = strategy.partition[i].second - strategy.partition[i].first;
        if (game.output_bits[i] != width) {
            throw DomainError("strategy: player " + std::to_string(i) + " measures " +
                              std::to_string(width) + " qubits but outputs " +
                              std::to_string(game.output_bits[i]) + " bits");
        }
    }
}

struct CompiledStrategy {
    sem::SpacePtr space;
    sem::SpacePtr classical_space; // without the shared register
    sem::Spec program;             // preparation then parallel local programs
};

CompiledStrategy compile_strategy(const GameSpec& game, const QuantumStrategy& strategy) {
    check_strategy(game, strategy);
    std::vector<sem::ClassicalVar> vars;
    for (int i = 0; i < game.n_players; ++i) {
        vars.push_back(sem::bits_var(input_var(i), game.input_bits[i], party_name(i)));
    }
    for (int i = 0; i < game.n_players; ++i) {
        vars.push_back(sem::bits_var(output_var(i), game.output_bits[i], party_name(i)));
    }
    std::vector<sem::PartyQubits> partition;
    for (int i = 0; i < game.n_players; ++i) {
        partition.push_back(
            {party_name(i), strategy.partition[i].first, strategy.partition[i].second});
    }
    auto space = sem::make_space(vars, {{"psi", strategy.total_qubits, partition}});

    sem::Spec program = sem::assign_state(space, "psi", strategy.initial);
    for (const auto& op : strategy.prep_ops) {
        program = sem::seq(program, sem::apply_unitary(space, "psi", op));
    }
    std::vector<sem::LocalProgram> parts;
    for (int i = 0; i < game.n_players; ++i) {
        sem::LocalProgram part{party_name(i), {},
                               sem::LocalMeasurement{output_var(i), std::nullopt}};
        const std::string xvar = input_var(i);
        for (const auto& step : strategy.players[i].steps) {
            part.steps.push_back(
                {[step, xvar](const sem::ProgState& s) { return step(s.get(xvar)); }, {xvar}});
        }
        parts.push_back(std::move(part));
    }
    program = sem::seq(program, sem::parallel(space, "psi", std::move(parts)));

    auto classical_space =
        std::make_shared<const sem::StateSpace>(space->without(std::vector<std::string>{"psi"}));
    return {space, classical_space, std::move(program)};
}

sem::ProgState prestate_for(const CompiledStrategy& cs, const GameSpec& game,
                            std::span<const std::int64_t> input) {
    if (static_cast<int>(input.size()) != game.n_players) {
        throw DomainError("input tuple arity does not match the player count");
    }
    sem::ProgState pre = sem::ProgState::initial(cs.space);
    for (int i = 0; i < game.n_players; ++i) {
        pre = pre.with(input_var(i), input[i]); // throws when outside the domain
    }
    return pre;
}

std::vector<std::int64_t> outputs_of(const sem::ProgState& state, int n_players) {
    std::vector<std::int64_t> out(n_players);
    for (int i = 0; i < n_players; ++i) out[i] = state.get(output_var(i));
    return out;
}

OutputDist dist_from_support(const sem::Support& support, int n_players) {
    std::map<std::vector<std::int64_t>, double> acc;
    for (const auto& e : support) acc[outputs_of(e.state, n_players)] += e.weight;
    OutputDist dist;
    for (auto& [outputs, p] : acc) dist.entries.emplace_back(outputs, p);
    return dist;
}

// The winning condition normalized over output variables, inputs held:
// W!1(x, y') = W(x, y') / #{y' : W(x, y')}.
sem::Spec winning_normalized(const GameSpec& game, const CompiledStrategy& cs) {
    auto counts = std::make_shared<std::map<std::vector<std::int64_t>, double>>();
    auto eval = [game, counts](const sem::ProgState& pre, const sem::ProgState& post) -> double {
        std::vector<std::int64_t> inputs(game.n_players);
        for (int i = 0; i < game.n_players; ++i) inputs[i] = pre.get(input_var(i));
        const auto outputs = outputs_of(post, game.n_players);
        if (!game.winning(inputs, outputs)) return 0.0;
        auto it = counts->find(inputs);
        if (it == counts->end()) {
            double n = 0.0;
            std::vector<std::int64_t> ys(game.n_players, 0);
            while (true) {
                if (game.winning(inputs, ys)) n += 1.0;
                std::size_t d = ys.size();
                while (d > 0) {
                    if (++ys[d - 1] < (std::int64_t{1} << game.output_bits[d - 1])) break;
                    ys[d - 1] = 0;
                    --d;
                }
                if (d == 0) break;
            }
            it = counts->emplace(inputs, n).first;
        }
        return it->second > 0.0 ? 1.0 / it->second : 0.0;
    };
    return sem::Spec::predicate(cs.space, cs.classical_space, std::move(eval),
                                /*boolean=*/false);
}

} // namespace

OutputDist strategy_distribution(const GameSpec& game, const QuantumStrategy& strategy,
                                 std::span<const std::int64_t> input) {
    const CompiledStrategy cs = compile_strategy(game, strategy);
    auto classical = sem::sum_out({"psi"}, cs.program);
    auto support = classical.support(prestate_for(cs, game, input));
    return dist_from_support(support, game.n_players);
}

VerificationReport verify_winning(const GameSpec& game, const QuantumStrategy& strategy,
                                  double tolerance) {
    const CompiledStrategy cs = compile_strategy(game, strategy);
    auto classical = sem::sum_out({"psi"}, cs.program);

    // Evidence: the promise, read from the poststate inputs (unchanged by
    // every strategy program).
    auto promise_post = sem::Spec::predicate(
        cs.classical_space,
        [game](const sem::ProgState&, const sem::ProgState& post) -> double {
            std::vector<std::int64_t> inputs(game.n_players);
            for (int i = 0; i < game.n_players; ++i) inputs[i] = post.get(input_var(i));
            return game.promise(inputs) ? 1.0 : 0.0;
        },
        /*boolean=*/true);
    sem::Spec conditioned = sem::learn(classical, promise_post);
    sem::Spec winning_norm = winning_normalized(game, cs);

    VerificationReport report;
    report.game_name = game.name;
    report.n_players = game.n_players;
    report.input_bits = game.input_bits;
    report.output_bits = game.output_bits;
    report.tolerance = tolerance;

    std::vector<sem::ProgState> prestates;
    for (const auto& input : game.promised_inputs()) {
        prestates.push_back(prestate_for(cs, game, input));
        InputRow row;
        row.input = input;
        row.outputs = dist_from_support(conditioned.support(prestates.back()), game.n_players);
        row.win_probability = 0.0;
        for (const auto& [outputs, p] : row.outputs.entries) {
            if (game.winning(input, outputs)) row.win_probability += p;
        }
        report.rows.push_back(std::move(row));
    }

    const sem::RefineResult refined =
        sem::refines_over(conditioned, winning_norm, tolerance, prestates);
    report.refinement.holds = refined.holds;
    if (refined.witness) {
        std::vector<std::int64_t> inputs(game.n_players);
        for (int i = 0; i < game.n_players; ++i) {
            inputs[i] = refined.witness->pre.get(input_var(i));
        }
        report.refinement.counterexample = RefinementCounterexample{
            inputs, outputs_of(refined.witness->post, game.n_players),
            refined.witness->p_value, refined.witness->q_value};
    }

    report.min_win_probability = 1.0;
    for (const auto& row : report.rows) {
        report.min_win_probability = std::min(report.min_win_probability, row.win_probability);
    }
    report.all_wins = std::abs(report.min_win_probability - 1.0) <= tolerance;
    return report;
}

// ---------------------------------------------------------------------------
// Built-in games
// ---------------------------------------------------------------------------

std::pair<GameSpec, QuantumStrategy> dj_game(int k) {
    if (k < 1 || k > 3) throw DomainError("dj_game: k outside 1..3");
    const int m = 1 << k; // input strings have 2^k bits
    auto promise = [k](std::span<const std::int64_t> x) {
        const int ham = std::popcount(static_cast<std::uint64_t>(x[0] ^ x[1]));
        return ham == 0 || ham == (1 << (k - 1));
    };
    auto winning = [k](std::span<const std::int64_t> x, std::span<const std::int64_t> y) {
        const int ham = std::popcount(static_cast<std::uint64_t>(x[0] ^ x[1]));
        return (ham == 0 && y[0] == y[1]) || (ham == (1 << (k - 1)) && y[0] != y[1]);
    };
    GameSpec game("dj(k=" + std::to_string(k) + ")", {m, m}, {k, k}, promise, winning);

    QuantumStrategy strategy{2 * k,
                             {{0, k}, {k, 2 * k}},
                             basis_state(0, 2 * k),
                             {tensor_op(hadamard_n(k), identity(k)), fanout(k)},
                             {}};
    for (int i = 0; i < 2; ++i) {
        PlayerProgram prog;
        prog.steps.push_back([k, m](std::int64_t x) {
            return dj_oracle(bitstring_of(static_cast<std::uint64_t>(x), m), k);
        });
        prog.steps.push_back([k](std::int64_t) { return hadamard_n(k); });
        strategy.players.push_back(std::move(prog));
    }
    return {std::move(game), std::move(strategy)};
}

std::pair<GameSpec, QuantumStrategy> mermin_game() {
    auto promise = [](std::span<const std::int64_t> x) {
        return ((x[0] + x[1] + x[2]) % 2) == 0;
    };
    auto winning = [](std::span<const std::int64_t> x, std::span<const std::int64_t> y) {
        const std::int64_t sum = x[0] + x[1] + x[2];
        if (sum % 2 != 0) return false;
        return ((y[0] + y[1] + y[2]) % 2) == ((sum / 2) % 2);
    };
    GameSpec game("mermin", {1, 1, 1}, {1, 1, 1}, promise, winning);

    const double inv = 1.0 / std::sqrt(2.0);
    std::vector<Amplitude> ghz(8, Amplitude{0.0, 0.0});
    ghz[0] = {inv, 0.0};
    ghz[7] = {inv, 0.0};
    QuantumStrategy strategy{3, {{0, 1}, {1, 2}, {2, 3}}, StateVector(3, std::move(ghz)), {}, {}};
    for (int i = 0; i < 3; ++i) {
        PlayerProgram prog;
        prog.steps.push_back(
            [](std::int64_t x) { return x == 1 ? phase_gate(M_PI / 2.0) : identity(1); });
        prog.steps.push_back([](std::int64_t) { return hadamard_n(1); });
        strategy.players.push_back(std::move(prog));
    }
    return {std::move(game), std::move(strategy)};
}

std::pair<GameSpec, QuantumStrategy> parity_game(int n, int l) {
    if (n < 3 || n > 10) throw DomainError("parity_game: n outside 3..10");
    if (l < 1 || l > 3) throw DomainError("parity_game: l outside 1..3");
    const std::int64_t modulus = std::int64_t{1} << l;
    auto promise = [n, modulus](std::span<const std::int64_t> a) {
        std::int64_t sum = 0;
        for (int i = 0; i < n; ++i) sum += a[i];
        return sum % modulus == 0;
    };
    auto winning = [n, modulus](std::span<const std::int64_t> a,
                                std::span<const std::int64_t> b) {
        std::int64_t asum = 0, bsum = 0;
        for (int i = 0; i < n; ++i) asum += a[i];
        for (int i = 0; i < n; ++i) bsum += b[i];
        if (asum % modulus != 0) return false;
        return bsum % 2 == (asum / modulus) % 2;
    };
    GameSpec game("parity(n=" + std::to_string(n) + ",l=" + std::to_string(l) + ")",
                  std::vector<int>(n, l), std::vector<int>(n, 1), promise, winning);

    const double inv = 1.0 / std::sqrt(2.0);
    std::vector<Amplitude> ghz(dim_of(n), Amplitude{0.0, 0.0});
    ghz.front() = {inv, 0.0};
    ghz.back() = {inv, 0.0};
    QuantumStrategy strategy{n, {}, StateVector(n, std::move(ghz)), {}, {}};
    for (int i = 0; i < n; ++i) strategy.partition.emplace_back(i, i + 1);
    const double denom = static_cast<double>(modulus);
    for (int i = 0; i < n; ++i) {
        PlayerProgram prog;
        prog.steps.push_back([denom](std::int64_t a) {
            return phase_gate(M_PI * static_cast<double>(a) / denom);
        });
        prog.steps.push_back([](std::int64_t) { return hadamard_n(1); });
        strategy.players.push_back(std::move(prog));
    }
    return {std::move(game), std::move(strategy)};
}

} // namespace ptg::games
