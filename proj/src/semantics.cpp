#include "ptgames/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace ptg::sem {

namespace {

std::int64_t round_amp(double v) {
    return std::llround(v * 1e12);
}

Support merge_support(std::vector<WeightedState> entries, bool clamp_boolean) {
    std::map<StateKey, std::size_t> index;
    Support out;
    for (auto& e : entries) {
        if (e.weight == 0.0) continue;
        StateKey k = e.state.key();
        auto [it, inserted] = index.try_emplace(std::move(k), out.size());
        if (inserted) {
            out.push_back(std::move(e));
        } else {
            out[it->second].weight += e.weight;
        }
    }
    if (clamp_boolean) {
        for (auto& e : out) e.weight = e.weight > 0.0 ? 1.0 : 0.0;
    }
    std::sort(out.begin(), out.end(), [](const WeightedState& a, const WeightedState& b) {
        return a.state.key() < b.state.key();
    });
    return out;
}

double check_boolean_value(double v, const char* what) {
    if (std::abs(v) > 1e-9 && std::abs(v - 1.0) > 1e-9) {
        throw EvaluationError(std::string(what) + ": boolean specification produced value " +
                              std::to_string(v));
    }
    return v;
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what) {
    if (a == b) return;
    if (!a || !b || !a->same_as(*b)) {
        throw DomainError(std::string(what) + ": state spaces differ");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// StateSpace
// ---------------------------------------------------------------------------

StateSpace::StateSpace(std::vector<ClassicalVar> classical, std::vector<QuantumVar> quantum)
    : classical_(std::move(classical)), quantum_(std::move(quantum)) {
    for (std::size_t i = 0; i < classical_.size(); ++i) {
        const auto& v = classical_[i];
        if (v.lo > v.hi) throw DomainError("StateSpace: empty domain for " + v.name);
        for (std::size_t j = i + 1; j < classical_.size(); ++j) {
            if (classical_[j].name == v.name) {
                throw DomainError("StateSpace: duplicate variable " + v.name);
            }
        }
        for (const auto& q : quantum_) {
            if (q.name == v.name) throw DomainError("StateSpace: duplicate variable " + v.name);
        }
    }
    for (std::size_t i = 0; i < quantum_.size(); ++i) {
        const auto& q = quantum_[i];
        if (q.n_qubits < 1 || q.n_qubits > kMaxQubits) {
            throw DomainError("StateSpace: unsupported register size for " + q.name);
        }
        for (std::size_t j = i + 1; j < quantum_.size(); ++j) {
            if (quantum_[j].name == q.name) {
                throw DomainError("StateSpace: duplicate variable " + q.name);
            }
        }
        if (!q.partition.empty()) {
            int expect = 0;
            for (const auto& p : q.partition) {
                if (p.begin != expect || p.end <= p.begin) {
                    throw DomainError("StateSpace: partition of " + q.name +
                                      " is not a disjoint cover");
                }
                expect = p.end;
            }
            if (expect != q.n_qubits) {
                throw DomainError("StateSpace: partition of " + q.name +
                                  " does not cover all qubits");
            }
        }
    }
}

int StateSpace::classical_index(std::string_view name) const {
    for (std::size_t i = 0; i < classical_.size(); ++i)
        if (classical_[i].name == name) return static_cast<int>(i);
    return -1;
}

int StateSpace::quantum_index(std::string_view name) const {
    for (std::size_t i = 0; i < quantum_.size(); ++i)
        if (quantum_[i].name == name) return static_cast<int>(i);
    return -1;
}

bool StateSpace::same_as(const StateSpace& other) const {
    if (classical_.size() != other.classical_.size()) return false;
    if (quantum_.size() != other.quantum_.size()) return false;
    for (std::size_t i = 0; i < classical_.size(); ++i) {
        const auto& a = classical_[i];
        const auto& b = other.classical_[i];
        if (a.name != b.name || a.lo != b.lo || a.hi != b.hi) return false;
    }
    for (std::size_t i = 0; i < quantum_.size(); ++i) {
        if (quantum_[i].name != other.quantum_[i].name) return false;
        if (quantum_[i].n_qubits != other.quantum_[i].n_qubits) return false;
    }
    return true;
}

StateSpace StateSpace::without(std::span<const std::string> names) const {
    auto removed = [&](const std::string& name) {
        return std::find(names.begin(), names.end(), name) != names.end();
    };
    for (const auto& name : names) {
        if (classical_index(name) < 0 && quantum_index(name) < 0) {
            throw DomainError("sum_out: unknown variable " + name);
        }
    }
    std::vector<ClassicalVar> c;
    std::vector<QuantumVar> q;
    for (const auto& v : classical_)
        if (!removed(v.name)) c.push_back(v);
    for (const auto& v : quantum_)
        if (!removed(v.name)) q.push_back(v);
    return StateSpace(std::move(c), std::move(q));
}

std::uint64_t StateSpace::classical_state_count() const {
    std::uint64_t count = 1;
    for (const auto& v : classical_) {
        count *= static_cast<std::uint64_t>(v.hi - v.lo + 1);
    }
    return count;
}

SpacePtr make_space(std::vector<ClassicalVar> classical, std::vector<QuantumVar> quantum) {
    return std::make_shared<const StateSpace>(std::move(classical), std::move(quantum));
}

// ---------------------------------------------------------------------------
// ProgState
// ---------------------------------------------------------------------------

ProgState::ProgState(SpacePtr space, std::vector<std::int64_t> cvals,
                     std::vector<StateVector> qvals)
    : space_(std::move(space)), cvals_(std::move(cvals)), qvals_(std::move(qvals)) {}

ProgState ProgState::initial(SpacePtr space) {
    std::vector<std::int64_t> cvals;
    std::vector<StateVector> qvals;
    for (const auto& v : space->classical()) cvals.push_back(v.lo);
    for (const auto& q : space->quantum()) qvals.push_back(basis_state(0, q.n_qubits));
    return ProgState(std::move(space), std::move(cvals), std::move(qvals));
}

std::int64_t ProgState::get(std::string_view name) const {
    const int i = space_->classical_index(name);
    if (i < 0) throw DomainError("ProgState: unknown classical variable " + std::string(name));
    return cvals_[i];
}

const StateVector& ProgState::get_state(std::string_view name) const {
    const int i = space_->quantum_index(name);
    if (i < 0) throw DomainError("ProgState: unknown quantum variable " + std::string(name));
    return qvals_[i];
}

ProgState ProgState::with(std::string_view name, std::int64_t value) const {
    const int i = space_->classical_index(name);
    if (i < 0) throw DomainError("ProgState: unknown classical variable " + std::string(name));
    return with_classical(i, value);
}

ProgState ProgState::with_classical(int index, std::int64_t value) const {
    const auto& v = space_->classical_at(index);
    if (value < v.lo || value > v.hi) {
        throw EvaluationError("value " + std::to_string(value) + " outside the domain of " +
                              v.name);
    }
    ProgState out = *this;
    out.cvals_[index] = value;
    return out;
}

ProgState ProgState::with_state(std::string_view name, StateVector value) const {
    const int i = space_->quantum_index(name);
    if (i < 0) throw DomainError("ProgState: unknown quantum variable " + std::string(name));
    return with_quantum(i, std::move(value));
}

ProgState ProgState::with_quantum(int index, StateVector value) const {
    if (value.n_qubits() != space_->quantum_at(index).n_qubits) {
        throw DomainError("ProgState: register size mismatch for " +
                          space_->quantum_at(index).name);
    }
    ProgState out = *this;
    out.qvals_[index] = std::move(value);
    return out;
}

ProgState ProgState::project(const SpacePtr& smaller) const {
    std::vector<std::int64_t> cvals;
    std::vector<StateVector> qvals;
    for (const auto& v : smaller->classical()) {
        const int i = space_->classical_index(v.name);
        if (i < 0) throw DomainError("project: variable " + v.name + " absent from source state");
        cvals.push_back(cvals_[i]);
    }
    for (const auto& q : smaller->quantum()) {
        const int i = space_->quantum_index(q.name);
        if (i < 0) throw DomainError("project: variable " + q.name + " absent from source state");
        qvals.push_back(qvals_[i]);
    }
    return ProgState(smaller, std::move(cvals), std::move(qvals));
}

StateKey ProgState::key() const {
    StateKey k;
    k.parts = cvals_;
    for (const auto& q : qvals_) {
        k.parts.push_back(static_cast<std::int64_t>(q.dim()));
        // Identify states up to the unobservable global phase.
        for (const auto& a : canonical_phase(q.amps())) {
            k.parts.push_back(round_amp(a.real()));
            k.parts.push_back(round_amp(a.imag()));
        }
    }
    return k;
}

std::string ProgState::describe() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < cvals_.size(); ++i) {
        if (!first) os << ", ";
        os << space_->classical_at(static_cast<int>(i)).name << "=" << cvals_[i];
        first = false;
    }
    for (std::size_t i = 0; i < qvals_.size(); ++i) {
        if (!first) os << ", ";
        os << space_->quantum_at(static_cast<int>(i)).name << "=<" << qvals_[i].n_qubits()
           << "q>";
        first = false;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Spec
// ---------------------------------------------------------------------------

double Distribution::total() const {
    double t = 0.0;
    for (const auto& e : entries) t += e.weight;
    return t;
}

Spec Spec::predicate(SpacePtr space, Eval eval, bool boolean_tag) {
    Spec s;
    s.pre_space_ = space;
    s.post_space_ = std::move(space);
    s.eval_ = std::move(eval);
    s.boolean_ = boolean_tag;
    return s;
}

Spec Spec::predicate(SpacePtr pre, SpacePtr post, Eval eval, bool boolean_tag) {
    Spec s;
    s.pre_space_ = std::move(pre);
    s.post_space_ = std::move(post);
    s.eval_ = std::move(eval);
    s.boolean_ = boolean_tag;
    return s;
}

Spec Spec::from_kernel(SpacePtr space, Kernel kernel, bool boolean_tag, bool distribution_tag) {
    return from_kernel(space, space, std::move(kernel), boolean_tag, distribution_tag);
}

Spec Spec::from_kernel(SpacePtr pre, SpacePtr post, Kernel kernel, bool boolean_tag,
                       bool distribution_tag) {
    Spec s;
    s.pre_space_ = std::move(pre);
    s.post_space_ = std::move(post);
    s.kernel_ = std::move(kernel);
    s.boolean_ = boolean_tag;
    s.distribution_ = distribution_tag;
    return s;
}

double Spec::eval(const ProgState& pre, const ProgState& post) const {
    if (eval_) return eval_(pre, post);
    const StateKey want = post.key();
    for (const auto& e : support(pre)) {
        if (e.state.key() == want) return e.weight;
    }
    return 0.0;
}

Support Spec::support(const ProgState& pre) const {
    if (kernel_) return kernel_(pre);
    // Predicate: enumerate a classical-only poststate space.
    std::vector<WeightedState> entries;
    for (auto& post : enumerate_states(post_space_)) {
        const double v = eval_(pre, post);
        if (v < -1e-12) {
            throw EvaluationError("specification produced a negative value at (" +
                                  pre.describe() + "; " + post.describe() + ")");
        }
        if (v != 0.0) entries.push_back({std::move(post), v});
    }
    return merge_support(std::move(entries), false);
}

Distribution Spec::distribution(const ProgState& pre) const {
    Distribution d{support(pre)};
    for (const auto& e : d.entries) {
        if (e.weight < -kEpsProb) {
            throw EvaluationError("distribution has a negative probability");
        }
    }
    if (std::abs(d.total() - 1.0) > kEpsProb) {
        throw EvaluationError("distribution total " + std::to_string(d.total()) +
                              " is not 1 at prestate " + pre.describe());
    }
    return d;
}

// ---------------------------------------------------------------------------
// Program constructors
// ---------------------------------------------------------------------------

Spec ok(SpacePtr space) {
    return Spec::from_kernel(
        std::move(space), [](const ProgState& pre) -> Support { return {{pre, 1.0}}; },
        /*boolean=*/true, /*distribution=*/true);
}

Spec assign(SpacePtr space, std::string var,
            std::function<std::int64_t(const ProgState&)> expr) {
    if (space->classical_index(var) < 0) {
        throw DomainError("assign: unknown variable " + var);
    }
    return Spec::from_kernel(
        std::move(space),
        [var = std::move(var), expr = std::move(expr)](const ProgState& pre) -> Support {
            return {{pre.with(var, expr(pre)), 1.0}};
        },
        /*boolean=*/true, /*distribution=*/true);
}

Spec assign_state(SpacePtr space, std::string psi_var, StateVector value) {
    const int qi = space->quantum_index(psi_var);
    if (qi < 0) throw DomainError("assign_state: unknown register " + psi_var);
    if (space->quantum_at(qi).n_qubits != value.n_qubits()) {
        throw DomainError("assign_state: register size mismatch for " + psi_var);
    }
    return Spec::from_kernel(
        std::move(space),
        [psi_var = std::move(psi_var), value = std::move(value)](const ProgState& pre)
            -> Support { return {{pre.with_state(psi_var, value), 1.0}}; },
        /*boolean=*/true, /*distribution=*/true);
}

Spec apply_unitary(SpacePtr space, std::string psi_var, Operator u) {
    const int qi = space->quantum_index(psi_var);
    if (qi < 0) throw DomainError("apply_unitary: unknown register " + psi_var);
    if (space->quantum_at(qi).n_qubits != u.n_qubits()) {
        throw DomainError("apply_unitary: operator size mismatch for " + psi_var);
    }
    if (!is_unitary(u)) throw ContractViolation("apply_unitary: operator is not unitary");
    return Spec::from_kernel(
        std::move(space),
        [psi_var = std::move(psi_var), u = std::move(u)](const ProgState& pre) -> Support {
            return {{pre.with_state(psi_var, apply(u, pre.get_state(psi_var))), 1.0}};
        },
        /*boolean=*/true, /*distribution=*/true);
}

Spec seq(const Spec& r, const Spec& s) {
    require_same_space(r.post_space(), s.pre_space(), "seq");
    const bool boolean = r.is_boolean() && s.is_boolean();
    const bool distribution = r.is_distribution() && s.is_distribution();
    Spec out = Spec::from_kernel(
        r.pre_space(), s.post_space(),
        [r, s, boolean](const ProgState& pre) -> Support {
            std::vector<WeightedState> entries;
            for (const auto& mid : r.support(pre)) {
                for (const auto& fin : s.support(mid.state)) {
                    entries.push_back({fin.state, mid.weight * fin.weight});
                }
            }
            return merge_support(std::move(entries), boolean);
        },
        boolean, distribution);
    return out;
}

Spec if_then_else(std::function<double(const ProgState&)> p, const Spec& r, const Spec& s) {
    require_same_space(r.pre_space(), s.pre_space(), "if_then_else");
    require_same_space(r.post_space(), s.post_space(), "if_then_else");
    auto guard = [p = std::move(p)](const ProgState& pre) {
        const double v = p(pre);
        if (!(v >= 0.0 && v <= 1.0)) {
            throw EvaluationError("if_then_else: probability " + std::to_string(v) +
                                  " outside [0,1]");
        }
        return v;
    };
    const bool distribution = r.is_distribution() && s.is_distribution();
    // A probabilistic mixture of boolean specs is not itself boolean.
    return Spec::from_kernel(
        r.pre_space(), r.post_space(),
        [guard, r, s](const ProgState& pre) -> Support {
            const double pv = guard(pre);
            if (pv >= 1.0) return r.support(pre);
            if (pv <= 0.0) return s.support(pre);
            std::vector<WeightedState> entries;
            for (const auto& e : r.support(pre)) entries.push_back({e.state, pv * e.weight});
            for (const auto& e : s.support(pre))
                entries.push_back({e.state, (1.0 - pv) * e.weight});
            return merge_support(std::move(entries), false);
        },
        /*boolean=*/false, distribution);
}

namespace {

// Shared tail of every measurement constructor: prune branches below
// kEpsProb, fail if the dropped mass exceeds the budget, renormalize.
Support finalize_outcomes(std::vector<WeightedState> entries) {
    double dropped = 0.0;
    double kept = 0.0;
    std::vector<WeightedState> keep;
    for (auto& e : entries) {
        if (e.weight < kEpsProb) {
            dropped += e.weight;
        } else {
            kept += e.weight;
            keep.push_back(std::move(e));
        }
    }
    if (dropped > kDroppedMassBudget) {
        throw EvaluationError("measurement dropped probability mass " + std::to_string(dropped) +
                              " beyond budget");
    }
    if (keep.empty()) throw EvaluationError("measurement produced no outcomes");
    for (auto& e : keep) e.weight /= kept;
    return merge_support(std::move(keep), false);
}

void require_result_domain(const StateSpace& space, const std::string& result_var,
                           std::uint64_t outcomes, const char* what) {
    const int ci = space.classical_index(result_var);
    if (ci < 0) throw DomainError(std::string(what) + ": unknown result variable " + result_var);
    const auto& v = space.classical_at(ci);
    if (v.lo > 0 || v.hi < static_cast<std::int64_t>(outcomes) - 1) {
        throw DomainError(std::string(what) + ": domain of " + result_var +
                          " does not cover all outcomes");
    }
}

} // namespace

Spec measure_computational(SpacePtr space, std::string psi_var, std::string result_var) {
    const int qi = space->quantum_index(psi_var);
    if (qi < 0) throw DomainError("measure: unknown register " + psi_var);
    const int n = space->quantum_at(qi).n_qubits;
    require_result_domain(*space, result_var, dim_of(n), "measure");
    return Spec::from_kernel(
        std::move(space),
        [psi_var = std::move(psi_var), result_var = std::move(result_var),
         n](const ProgState& pre) -> Support {
            const StateVector& psi = pre.get_state(psi_var);
            std::vector<WeightedState> entries;
            for (std::size_t r = 0; r < dim_of(n); ++r) {
                const double p = std::norm(psi[r]);
                if (p == 0.0) continue;
                entries.push_back({pre.with(result_var, static_cast<std::int64_t>(r))
                                       .with_state(psi_var, basis_state(r, n)),
                                   p});
            }
            return finalize_outcomes(std::move(entries));
        },
        /*boolean=*/false, /*distribution=*/true);
}

Spec measure_general(SpacePtr space, MeasurementFamily family, std::string psi_var,
                     std::string result_var) {
    const int qi = space->quantum_index(psi_var);
    if (qi < 0) throw DomainError("measure: unknown register " + psi_var);
    if (space->quantum_at(qi).n_qubits != family.n_qubits()) {
        throw DomainError("measure: family size mismatch for " + psi_var);
    }
    if (!completeness_check(family)) {
        throw ContractViolation("measure: family does not satisfy the completeness equation");
    }
    require_result_domain(*space, result_var, family.size(), "measure");
    return Spec::from_kernel(
        std::move(space),
        [family = std::move(family), psi_var = std::move(psi_var),
         result_var = std::move(result_var)](const ProgState& pre) -> Support {
            const StateVector& psi = pre.get_state(psi_var);
            std::vector<WeightedState> entries;
            for (std::size_t r = 0; r < family.size(); ++r) {
                auto collapsed = matvec(family.member(r), psi.amps());
                const double p = norm_squared(collapsed);
                if (p < kEpsProb) {
                    entries.push_back({pre, p}); // pruned by finalize_outcomes
                    continue;
                }
                const double scale = 1.0 / std::sqrt(p);
                for (auto& a : collapsed) a *= scale;
                entries.push_back({pre.with(result_var, static_cast<std::int64_t>(r))
                                       .with_state(psi_var,
                                                   StateVector(psi.n_qubits(),
                                                               std::move(collapsed))),
                                   p});
            }
            return finalize_outcomes(std::move(entries));
        },
        /*boolean=*/false, /*distribution=*/true);
}

// ---------------------------------------------------------------------------
// Parallel composition on an entangled register
// ---------------------------------------------------------------------------

namespace {

struct PartySlot {
    PartyQubits qubits;
    const LocalProgram* program = nullptr; // null = ok
};

std::vector<PartySlot> check_parallel(const StateSpace& space, std::string_view psi_var,
                                      std::span<const LocalProgram> parts) {
    const int qi = space.quantum_index(psi_var);
    if (qi < 0) throw DomainError("parallel: unknown register " + std::string(psi_var));
    const QuantumVar& reg = space.quantum_at(qi);
    if (reg.partition.empty()) {
        throw DomainError("parallel: register " + reg.name + " has no declared partition");
    }
    std::vector<PartySlot> slots;
    for (const auto& pq : reg.partition) slots.push_back({pq, nullptr});
    for (const auto& part : parts) {
        PartySlot* slot = nullptr;
        for (auto& s : slots) {
            if (s.qubits.party == part.party) slot = &s;
        }
        if (slot == nullptr) {
            throw LocalityViolation("parallel: party " + part.party + " owns no qubits of " +
                                    reg.name);
        }
        if (slot->program != nullptr) {
            throw DomainError("parallel: party " + part.party + " appears twice");
        }
        slot->program = &part;
        auto owned = [&](const std::string& name) {
            const int ci = space.classical_index(name);
            if (ci < 0) throw DomainError("parallel: unknown variable " + name);
            return space.classical_at(ci).owner == part.party;
        };
        for (const auto& step : part.steps) {
            for (const auto& name : step.reads) {
                if (!owned(name)) {
                    throw LocalityViolation("parallel: party " + part.party +
                                            " reads variable " + name + " it does not own");
                }
            }
        }
        if (part.measurement) {
            if (!owned(part.measurement->result_var)) {
                throw LocalityViolation("parallel: party " + part.party +
                                        " writes result variable " +
                                        part.measurement->result_var + " it does not own");
            }
            const int width = slot->qubits.end - slot->qubits.begin;
            if (part.measurement->family) {
                if (part.measurement->family->n_qubits() != width) {
                    throw LocalityViolation("parallel: measurement family of party " +
                                            part.party + " does not match its qubit interval");
                }
                if (!completeness_check(*part.measurement->family)) {
                    throw ContractViolation(
                        "parallel: measurement family of party " + part.party +
                        " does not satisfy the completeness equation");
                }
                require_result_domain(space, part.measurement->result_var,
                                      part.measurement->family->size(), "parallel");
            } else {
                require_result_domain(space, part.measurement->result_var, dim_of(width),
                                      "parallel");
            }
        }
    }
    return slots;
}

Operator accumulated_unitary(const PartySlot& slot, const ProgState& pre) {
    const int width = slot.qubits.end - slot.qubits.begin;
    Operator u = identity(width);
    if (slot.program == nullptr) return u;
    for (const auto& step : slot.program->steps) {
        Operator stepped = step.op(pre);
        if (stepped.n_qubits() != width) {
            throw LocalityViolation("parallel: party " + slot.qubits.party +
                                    " applies an operator outside its qubit interval");
        }
        u = product(stepped, u); // later steps act after earlier ones
    }
    return u;
}

} // namespace

Operator parallel_unitary(const StateSpace& space, std::string_view psi_var,
                          std::span<const LocalProgram> parts, const ProgState& pre) {
    auto slots = check_parallel(space, psi_var, parts);
    Operator u = accumulated_unitary(slots.front(), pre);
    for (std::size_t i = 1; i < slots.size(); ++i) {
        u = tensor_op(u, accumulated_unitary(slots[i], pre));
    }
    return u;
}

Spec parallel(SpacePtr space, std::string psi_var, std::vector<LocalProgram> parts) {
    auto slots_probe = check_parallel(*space, psi_var, parts); // validate eagerly
    (void)slots_probe;
    auto kernel = [space, psi_var, parts = std::move(parts)](const ProgState& pre) -> Support {
        auto slots = check_parallel(*space, psi_var, parts);
        const int qi = space->quantum_index(psi_var);
        const int n_total = space->quantum_at(qi).n_qubits;

        Operator u = accumulated_unitary(slots.front(), pre);
        for (std::size_t i = 1; i < slots.size(); ++i) {
            u = tensor_op(u, accumulated_unitary(slots[i], pre));
        }
        StateVector evolved = apply(u, pre.get_state(psi_var));

        struct Measurer {
            const PartySlot* slot;
            int width;
            bool computational;
        };
        std::vector<Measurer> measurers;
        bool any_family = false;
        for (const auto& s : slots) {
            if (s.program && s.program->measurement) {
                const bool comp = !s.program->measurement->family.has_value();
                any_family = any_family || !comp;
                measurers.push_back({&s, s.qubits.end - s.qubits.begin, comp});
            }
        }
        if (measurers.empty()) {
            return {{pre.with_state(psi_var, std::move(evolved)), 1.0}};
        }

        std::vector<WeightedState> entries;
        if (!any_family) {
            // Joint computational measurement of the measuring parties'
            // qubits: group basis indices by the measured slices.
            std::map<std::vector<std::int64_t>, double> probs;
            const std::size_t dim = evolved.dim();
            auto slices_of = [&](std::size_t b) {
                std::vector<std::int64_t> key;
                key.reserve(measurers.size());
                for (const auto& m : measurers) {
                    const int shift = n_total - m.slot->qubits.end;
                    key.push_back(static_cast<std::int64_t>((b >> shift) &
                                                            (dim_of(m.width) - 1)));
                }
                return key;
            };
            for (std::size_t b = 0; b < dim; ++b) {
                const double p = std::norm(evolved[b]);
                if (p > 0.0) probs[slices_of(b)] += p;
            }
            for (const auto& [outcome, p] : probs) {
                if (p < kEpsProb) {
                    entries.push_back({pre, p});
                    continue;
                }
                std::vector<Amplitude> amps(dim, Amplitude{0.0, 0.0});
                const double scale = 1.0 / std::sqrt(p);
                for (std::size_t b = 0; b < dim; ++b) {
                    if (std::norm(evolved[b]) > 0.0 && slices_of(b) == outcome) {
                        amps[b] = evolved[b] * scale;
                    }
                }
                ProgState post = pre.with_state(
                    psi_var, StateVector(n_total, canonical_phase(std::move(amps))));
                for (std::size_t i = 0; i < measurers.size(); ++i) {
                    post = post.with(measurers[i].slot->program->measurement->result_var,
                                     outcome[i]);
                }
                entries.push_back({std::move(post), p});
            }
        } else {
            // General case: tensor the families (computational parties
            // contribute projector families, silent parties identity).
            std::vector<std::size_t> sizes;
            for (const auto& m : measurers) {
                sizes.push_back(m.computational
                                    ? dim_of(m.width)
                                    : m.slot->program->measurement->family->size());
            }
            std::vector<std::size_t> outcome(measurers.size(), 0);
            auto member_for = [&](const PartySlot& s) -> std::optional<std::size_t> {
                for (std::size_t i = 0; i < measurers.size(); ++i)
                    if (measurers[i].slot == &s) return i;
                return std::nullopt;
            };
            while (true) {
                Operator m_full = identity(0);
                bool first = true;
                for (const auto& s : slots) {
                    Operator piece = identity(s.qubits.end - s.qubits.begin);
                    if (auto mi = member_for(s)) {
                        const auto& meas = *measurers[*mi].slot->program->measurement;
                        piece = meas.family ? meas.family->member(outcome[*mi])
                                            : projector(outcome[*mi],
                                                        s.qubits.end - s.qubits.begin);
                    }
                    m_full = first ? piece : tensor_op(m_full, piece);
                    first = false;
                }
                auto collapsed = matvec(m_full, evolved.amps());
                const double p = norm_squared(collapsed);
                if (p < kEpsProb) {
                    entries.push_back({pre, p});
                } else {
                    const double scale = 1.0 / std::sqrt(p);
                    for (auto& a : collapsed) a *= scale;
                    ProgState post = pre.with_state(
                        psi_var, StateVector(n_total, std::move(collapsed)));
                    for (std::size_t i = 0; i < measurers.size(); ++i) {
                        post = post.with(measurers[i].slot->program->measurement->result_var,
                                         static_cast<std::int64_t>(outcome[i]));
                    }
                    entries.push_back({std::move(post), p});
                }
                std::size_t d = outcome.size();
                while (d > 0 && ++outcome[d - 1] == sizes[d - 1]) outcome[--d] = 0;
                if (d == 0) break;
            }
        }
        return finalize_outcomes(std::move(entries));
    };
    return Spec::from_kernel(space, std::move(kernel), /*boolean=*/false,
                             /*distribution=*/true);
}

Spec parallel_classical(SpacePtr space, std::vector<Spec> parts) {
    // Parts must live on disjoint sub-spaces of `space`.
    std::vector<std::string> owned;
    for (const auto& part : parts) {
        for (const auto& v : part.pre_space()->classical()) {
            if (space->classical_index(v.name) < 0) {
                throw DomainError("parallel_classical: unknown variable " + v.name);
            }
            if (std::find(owned.begin(), owned.end(), v.name) != owned.end()) {
                throw LocalityViolation("parallel_classical: variable " + v.name +
                                        " owned by two parts");
            }
            owned.push_back(v.name);
        }
        if (!part.pre_space()->quantum().empty()) {
            throw DomainError("parallel_classical: parts must be classical");
        }
    }
    bool boolean = true;
    bool distribution = true;
    for (const auto& part : parts) {
        boolean = boolean && part.is_boolean();
        distribution = distribution && part.is_distribution();
    }
    return Spec::from_kernel(
        space,
        [space, parts](const ProgState& pre) -> Support {
            std::vector<WeightedState> acc{{pre, 1.0}};
            for (const auto& part : parts) {
                const ProgState sub_pre = pre.project(part.pre_space());
                const Support sub = part.support(sub_pre);
                std::vector<WeightedState> next;
                for (const auto& base : acc) {
                    for (const auto& e : sub) {
                        ProgState merged = base.state;
                        for (const auto& v : part.post_space()->classical()) {
                            merged = merged.with(v.name, e.state.get(v.name));
                        }
                        next.push_back({std::move(merged), base.weight * e.weight});
                    }
                }
                acc = std::move(next);
            }
            return merge_support(std::move(acc), false);
        },
        boolean, distribution);
}

// ---------------------------------------------------------------------------
// Spec operators
// ---------------------------------------------------------------------------

Spec learn(const Spec& p, const Spec& b) {
    if (!b.is_boolean()) throw DomainError("learn: evidence must be a boolean specification");
    require_same_space(p.post_space(), b.post_space(), "learn");
    return Spec::from_kernel(
        p.pre_space(), p.post_space(),
        [p, b](const ProgState& pre) -> Support {
            const Support sup = p.support(pre);
            std::vector<double> bvals;
            bvals.reserve(sup.size());
            double total = 0.0;
            for (const auto& e : sup) {
                const double bv = check_boolean_value(b.eval(e.state, e.state), "learn");
                bvals.push_back(bv);
                total += e.weight * bv;
            }
            if (total <= 0.0) {
                throw UndefinedConditional(
                    "learn: conditioning on a probability-zero event at prestate " +
                    pre.describe());
            }
            std::vector<WeightedState> entries;
            for (std::size_t i = 0; i < sup.size(); ++i) {
                if (bvals[i] > 0.0) {
                    entries.push_back({sup[i].state, sup[i].weight * bvals[i] / total});
                }
            }
            return merge_support(std::move(entries), false);
        },
        /*boolean=*/false, /*distribution=*/true);
}

Spec normalize(const Spec& p) {
    return Spec::from_kernel(
        p.pre_space(), p.post_space(),
        [p](const ProgState& pre) -> Support {
            const Support sup = p.support(pre);
            double total = 0.0;
            for (const auto& e : sup) total += e.weight;
            if (total <= 0.0) {
                throw UndefinedConditional("normalize: zero total at prestate " +
                                           pre.describe());
            }
            std::vector<WeightedState> entries;
            for (const auto& e : sup) entries.push_back({e.state, e.weight / total});
            return merge_support(std::move(entries), false);
        },
        /*boolean=*/false, /*distribution=*/true);
}

Spec sum_out(std::vector<std::string> vars, const Spec& p) {
    auto reduced = std::make_shared<const StateSpace>(p.post_space()->without(vars));
    return Spec::from_kernel(
        p.pre_space(), reduced,
        [p, reduced](const ProgState& pre) -> Support {
            std::vector<WeightedState> entries;
            for (const auto& e : p.support(pre)) {
                entries.push_back({e.state.project(reduced), e.weight});
            }
            return merge_support(std::move(entries), p.is_boolean());
        },
        p.is_boolean(), p.is_distribution());
}

namespace {

std::optional<RefineCounterexample> check_refines_at(const Spec& p, const Spec& q, double eps,
                                                     const ProgState& pre) {
    if (p.has_kernel()) {
        for (const auto& e : p.support(pre)) {
            const double qv = q.eval(pre, e.state);
            if (qv < -1e-12) {
                throw EvaluationError("refines: right-hand specification is negative");
            }
            if (e.weight > qv + eps) {
                return RefineCounterexample{pre, e.state, e.weight, qv};
            }
        }
        return std::nullopt;
    }
    for (const auto& post : enumerate_states(p.post_space())) {
        const double pv = p.eval(pre, post);
        const double qv = q.eval(pre, post);
        if (pv > qv + eps) {
            return RefineCounterexample{pre, post, pv, qv};
        }
    }
    return std::nullopt;
}

} // namespace

RefineResult refines_over(const Spec& p, const Spec& q, double eps,
                          std::span<const ProgState> prestates) {
    require_same_space(p.pre_space(), q.pre_space(), "refines");
    require_same_space(p.post_space(), q.post_space(), "refines");
    for (const auto& pre : prestates) {
        if (auto witness = check_refines_at(p, q, eps, pre)) {
            return {false, std::move(witness)};
        }
    }
    return {true, std::nullopt};
}

RefineResult refines(const Spec& p, const Spec& q, double eps) {
    const auto prestates = enumerate_states(p.pre_space());
    return refines_over(p, q, eps, prestates);
}

std::vector<ProgState> enumerate_states(const SpacePtr& space) {
    if (!space->quantum().empty()) {
        throw DomainError("cannot enumerate states of a space with quantum registers");
    }
    std::vector<ProgState> out;
    ProgState state = ProgState::initial(space);
    const auto& vars = space->classical();
    std::vector<std::int64_t> vals;
    for (const auto& v : vars) vals.push_back(v.lo);
    while (true) {
        ProgState s = state;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            s = s.with_classical(static_cast<int>(i), vals[i]);
        }
        out.push_back(std::move(s));
        std::size_t d = vars.size();
        while (d > 0) {
            if (++vals[d - 1] <= vars[d - 1].hi) break;
            vals[d - 1] = vars[d - 1].lo;
            --d;
        }
        if (d == 0) break;
    }
    return out;
}

} // namespace ptg::sem
