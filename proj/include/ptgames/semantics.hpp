#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptgames/errors.hpp"
#include "ptgames/linalg.hpp"

namespace ptg::sem {

// Tolerance for distribution totals and probability comparisons.
inline constexpr double kEpsProb = 1e-9;

// Measurement branches below kEpsProb are dropped; if the dropped mass ever
// exceeds this budget, evaluation fails instead of renormalizing silently.
inline constexpr double kDroppedMassBudget = 1e-12;

struct ClassicalVar {
    std::string name;
    std::int64_t lo = 0;
    std::int64_t hi = 0; // inclusive
    std::string owner;   // party that may read/write it; empty = shared
};

inline ClassicalVar bits_var(std::string name, int bits, std::string owner = "") {
    return ClassicalVar{std::move(name), 0, (std::int64_t{1} << bits) - 1, std::move(owner)};
}

struct PartyQubits {
    std::string party;
    int begin = 0; // qubit interval [begin, end)
    int end = 0;
};

struct QuantumVar {
    std::string name;
    int n_qubits = 0;
    std::vector<PartyQubits> partition; // disjoint intervals covering 0..n_qubits
};

// Declared finite state space: classical variables with finite domains plus
// quantum registers partitioned between parties.
class StateSpace {
public:
    StateSpace(std::vector<ClassicalVar> classical, std::vector<QuantumVar> quantum);

    const std::vector<ClassicalVar>& classical() const { return classical_; }
    const std::vector<QuantumVar>& quantum() const { return quantum_; }

    int classical_index(std::string_view name) const;  // -1 when absent
    int quantum_index(std::string_view name) const;    // -1 when absent
    const ClassicalVar& classical_at(int i) const { return classical_[i]; }
    const QuantumVar& quantum_at(int i) const { return quantum_[i]; }

    bool same_as(const StateSpace& other) const;

    // Space with the named poststate variables removed (for sum_out).
    StateSpace without(std::span<const std::string> names) const;

    std::uint64_t classical_state_count() const;

private:
    std::vector<ClassicalVar> classical_;
    std::vector<QuantumVar> quantum_;
};

using SpacePtr = std::shared_ptr<const StateSpace>;
SpacePtr make_space(std::vector<ClassicalVar> classical, std::vector<QuantumVar> quantum = {});

// Canonical, totally ordered key for a program state; quantum amplitudes are
// phase-canonicalized and rounded to 1e-12, so states produced by equal
// computations (up to global phase) merge.
struct StateKey {
    std::vector<std::int64_t> parts;
    friend auto operator<=>(const StateKey&, const StateKey&) = default;
};

// One assignment of every declared variable.
class ProgState {
public:
    static ProgState initial(SpacePtr space); // classical at lo, registers at |0..0>

    const StateSpace& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }

    std::int64_t get(std::string_view name) const;
    const StateVector& get_state(std::string_view name) const;
    std::int64_t get_classical(int index) const { return cvals_[index]; }
    const StateVector& get_quantum(int index) const { return qvals_[index]; }

    ProgState with(std::string_view name, std::int64_t value) const;
    ProgState with_state(std::string_view name, StateVector value) const;
    ProgState with_classical(int index, std::int64_t value) const;
    ProgState with_quantum(int index, StateVector value) const;

    // State over a smaller space holding this state's values.
    ProgState project(const SpacePtr& smaller) const;

    StateKey key() const;
    std::string describe() const;

private:
    ProgState(SpacePtr space, std::vector<std::int64_t> cvals, std::vector<StateVector> qvals);
    SpacePtr space_;
    std::vector<std::int64_t> cvals_;
    std::vector<StateVector> qvals_;
};

struct WeightedState {
    ProgState state;
    double weight;
};

// Finite poststate support of a specification at one prestate, merged and
// ordered by state key.
using Support = std::vector<WeightedState>;

// Finite table from poststates to probabilities.
struct Distribution {
    Support entries;
    double total() const;
};

// A specification: a non-negative real-valued function of a
// (prestate, poststate) pair. Program constructors additionally carry a
// forward kernel enumerating the finite reachable support per prestate;
// predicate specifications are evaluated pointwise and fall back to
// exhaustive enumeration on classical-only spaces.
class Spec {
public:
    using Eval = std::function<double(const ProgState&, const ProgState&)>;
    using Kernel = std::function<Support(const ProgState&)>;

    static Spec predicate(SpacePtr space, Eval eval, bool boolean_tag);
    static Spec predicate(SpacePtr pre, SpacePtr post, Eval eval, bool boolean_tag);
    static Spec from_kernel(SpacePtr space, Kernel kernel, bool boolean_tag,
                            bool distribution_tag);
    static Spec from_kernel(SpacePtr pre, SpacePtr post, Kernel kernel, bool boolean_tag,
                            bool distribution_tag);

    double eval(const ProgState& pre, const ProgState& post) const;
    // Poststate support at a prestate: the kernel when present, otherwise
    // enumeration of a classical-only poststate space.
    Support support(const ProgState& pre) const;
    bool has_kernel() const { return static_cast<bool>(kernel_); }

    bool is_boolean() const { return boolean_; }
    bool is_distribution() const { return distribution_; }

    const SpacePtr& pre_space() const { return pre_space_; }
    const SpacePtr& post_space() const { return post_space_; }

    // Distribution table at one prestate; validates the total.
    Distribution distribution(const ProgState& pre) const;

private:
    Spec() = default;
    SpacePtr pre_space_;
    SpacePtr post_space_;
    Eval eval_;
    Kernel kernel_;
    bool boolean_ = false;
    bool distribution_ = false;
};

// --- program constructors ---

Spec ok(SpacePtr space);
Spec assign(SpacePtr space, std::string var,
            std::function<std::int64_t(const ProgState&)> expr);
Spec assign_state(SpacePtr space, std::string psi_var, StateVector value);
Spec apply_unitary(SpacePtr space, std::string psi_var, Operator u);
Spec seq(const Spec& r, const Spec& s);
Spec if_then_else(std::function<double(const ProgState&)> p, const Spec& r, const Spec& s);
Spec measure_computational(SpacePtr space, std::string psi_var, std::string result_var);
Spec measure_general(SpacePtr space, MeasurementFamily family, std::string psi_var,
                     std::string result_var);

// --- entangled parallel composition ---

// One step of a party's local program: a unitary on the party's own qubit
// interval, possibly depending on the party's own classical variables.
struct LocalStep {
    std::function<Operator(const ProgState&)> op;
    std::vector<std::string> reads; // classical variables the step consults
};

struct LocalMeasurement {
    std::string result_var;
    // Computational-basis when absent.
    std::optional<MeasurementFamily> family;
};

struct LocalProgram {
    std::string party;
    std::vector<LocalStep> steps;              // empty = ok
    std::optional<LocalMeasurement> measurement;
};

Spec parallel(SpacePtr space, std::string psi_var, std::vector<LocalProgram> parts);

// The tensored unitary the parties' accumulated steps compose to at one
// prestate (identity for absent parties). Exposed for matrix-level checks.
Operator parallel_unitary(const StateSpace& space, std::string_view psi_var,
                          std::span<const LocalProgram> parts, const ProgState& pre);

// Classical parallel composition over partitioned variables: the pointwise
// product of the parts, each a spec over a sub-space of `space`; variables
// owned by no part are left unchanged.
Spec parallel_classical(SpacePtr space, std::vector<Spec> parts);

// --- spec operators ---

Spec learn(const Spec& p, const Spec& b); // b: boolean spec over the poststate
Spec normalize(const Spec& p);
Spec sum_out(std::vector<std::string> vars, const Spec& p);

struct RefineCounterexample {
    ProgState pre;
    ProgState post;
    double p_value;
    double q_value;
};

struct RefineResult {
    bool holds = false;
    std::optional<RefineCounterexample> witness;
};

// True iff P(pre, post) <= Q(pre, post) + eps for all pairs; enumerates the
// classical-only prestate space.
RefineResult refines(const Spec& p, const Spec& q, double eps);
// Same pointwise check over an explicit list of prestates.
RefineResult refines_over(const Spec& p, const Spec& q, double eps,
                          std::span<const ProgState> prestates);

// All states of a classical-only space, lexicographic in declaration order.
std::vector<ProgState> enumerate_states(const SpacePtr& space);

} // namespace ptg::sem
