#include "ptgames/linalg.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace ptg {

namespace {

void require_qubit_count(int n_qubits, const char* what) {
    if (n_qubits < 0 || n_qubits > kMaxQubits) {
        throw DomainError(std::string(what) + ": qubit count " + std::to_string(n_qubits) +
                          " outside supported range 0.." + std::to_string(kMaxQubits));
    }
}

void require_finite(const std::vector<Amplitude>& amps, const char* what) {
    for (const auto& a : amps) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw DomainError(std::string(what) + ": non-finite amplitude");
        }
    }
}

} // namespace

double norm_squared(const std::vector<Amplitude>& amps) {
    double total = 0.0;
    for (const auto& a : amps) total += std::norm(a);
    return total;
}

std::vector<Amplitude> canonical_phase(std::vector<Amplitude> amps) {
    for (const auto& a : amps) {
        if (std::abs(a) > 1e-12) {
            const Amplitude rotate = std::conj(a) / std::abs(a);
            for (auto& b : amps) b *= rotate;
            break;
        }
    }
    return amps;
}

StateVector::StateVector(int n_qubits, std::vector<Amplitude> amps)
    : n_qubits_(n_qubits), amps_(std::move(amps)) {
    require_qubit_count(n_qubits_, "StateVector");
    if (amps_.size() != dim_of(n_qubits_)) {
        throw DomainError("StateVector: " + std::to_string(amps_.size()) +
                          " amplitudes for " + std::to_string(n_qubits_) + " qubits");
    }
    require_finite(amps_, "StateVector");
    const double total = norm_squared(amps_);
    if (std::abs(total - 1.0) > kEpsNorm) {
        throw DomainError("StateVector: squared norm " + std::to_string(total) + " is not 1");
    }
}

Operator::Operator(int n_qubits, std::vector<Amplitude> entries)
    : n_qubits_(n_qubits), dim_(dim_of(n_qubits)), entries_(std::move(entries)) {
    require_qubit_count(n_qubits_, "Operator");
    if (entries_.size() != dim_ * dim_) {
        throw DomainError("Operator: entry count " + std::to_string(entries_.size()) +
                          " does not match dimension " + std::to_string(dim_));
    }
    require_finite(entries_, "Operator");
}

MeasurementFamily::MeasurementFamily(int n_qubits, std::vector<Operator> members)
    : n_qubits_(n_qubits), members_(std::move(members)) {
    require_qubit_count(n_qubits_, "MeasurementFamily");
    if (members_.empty()) throw DomainError("MeasurementFamily: no members");
    for (const auto& m : members_) {
        if (m.n_qubits() != n_qubits_) {
            throw DomainError("MeasurementFamily: member dimension mismatch");
        }
    }
}

StateVector basis_state(std::size_t x, int n_qubits) {
    require_qubit_count(n_qubits, "basis_state");
    const std::size_t d = dim_of(n_qubits);
    if (x >= d) {
        throw DomainError("basis_state: index " + std::to_string(x) + " out of range for " +
                          std::to_string(n_qubits) + " qubits");
    }
    std::vector<Amplitude> amps(d, Amplitude{0.0, 0.0});
    amps[x] = Amplitude{1.0, 0.0};
    return StateVector(n_qubits, std::move(amps));
}

Amplitude inner_product(const StateVector& psi, const StateVector& phi) {
    if (psi.n_qubits() != phi.n_qubits()) {
        throw DomainError("inner_product: qubit counts differ");
    }
    Amplitude total{0.0, 0.0};
    for (std::size_t x = 0; x < psi.dim(); ++x) {
        total += std::conj(psi[x]) * phi[x];
    }
    return total;
}

StateVector tensor_state(const StateVector& psi, const StateVector& phi) {
    const int n = psi.n_qubits() + phi.n_qubits();
    require_qubit_count(n, "tensor_state");
    const std::size_t dphi = phi.dim();
    std::vector<Amplitude> amps(dim_of(n));
    for (std::size_t i = 0; i < amps.size(); ++i) {
        amps[i] = psi[i / dphi] * phi[i % dphi];
    }
    return StateVector(n, std::move(amps));
}

std::vector<Amplitude> matvec(const Operator& a, const std::vector<Amplitude>& v) {
    if (v.size() != a.dim()) throw DomainError("matvec: dimension mismatch");
    std::vector<Amplitude> out(a.dim(), Amplitude{0.0, 0.0});
    for (std::size_t row = 0; row < a.dim(); ++row) {
        Amplitude acc{0.0, 0.0};
        for (std::size_t col = 0; col < a.dim(); ++col) {
            acc += a.at(row, col) * v[col];
        }
        out[row] = acc;
    }
    return out;
}

StateVector apply(const Operator& u, const StateVector& psi) {
    if (u.n_qubits() != psi.n_qubits()) {
        throw DomainError("apply: operator acts on " + std::to_string(u.n_qubits()) +
                          " qubits, state has " + std::to_string(psi.n_qubits()));
    }
    if (!is_unitary(u)) {
        throw ContractViolation("apply: operator is not unitary");
    }
    return StateVector(psi.n_qubits(), matvec(u, psi.amps()));
}

Operator identity(int n_qubits) {
    const std::size_t d = dim_of(n_qubits);
    std::vector<Amplitude> entries(d * d, Amplitude{0.0, 0.0});
    for (std::size_t i = 0; i < d; ++i) entries[i * d + i] = Amplitude{1.0, 0.0};
    return Operator(n_qubits, std::move(entries));
}

Operator tensor_op(const Operator& u, const Operator& v) {
    const int n = u.n_qubits() + v.n_qubits();
    require_qubit_count(n, "tensor_op");
    const std::size_t du = u.dim(), dv = v.dim();
    std::vector<Amplitude> entries(du * dv * du * dv);
    for (std::size_t ru = 0; ru < du; ++ru)
        for (std::size_t rv = 0; rv < dv; ++rv)
            for (std::size_t cu = 0; cu < du; ++cu)
                for (std::size_t cv = 0; cv < dv; ++cv)
                    entries[(ru * dv + rv) * du * dv + (cu * dv + cv)] =
                        u.at(ru, cu) * v.at(rv, cv);
    Operator out(n, std::move(entries));
    if (u.unitary_ == true && v.unitary_ == true) out.unitary_ = true;
    return out;
}

Operator product(const Operator& a, const Operator& b) {
    if (a.n_qubits() != b.n_qubits()) throw DomainError("product: dimension mismatch");
    const std::size_t d = a.dim();
    std::vector<Amplitude> entries(d * d, Amplitude{0.0, 0.0});
    for (std::size_t row = 0; row < d; ++row)
        for (std::size_t mid = 0; mid < d; ++mid) {
            const Amplitude am = a.at(row, mid);
            if (am == Amplitude{0.0, 0.0}) continue;
            for (std::size_t col = 0; col < d; ++col)
                entries[row * d + col] += am * b.at(mid, col);
        }
    Operator out(a.n_qubits(), std::move(entries));
    if (a.unitary_ == true && b.unitary_ == true) out.unitary_ = true;
    return out;
}

Operator adjoint(const Operator& u) {
    const std::size_t d = u.dim();
    std::vector<Amplitude> entries(d * d);
    for (std::size_t row = 0; row < d; ++row)
        for (std::size_t col = 0; col < d; ++col)
            entries[row * d + col] = std::conj(u.at(col, row));
    Operator out(u.n_qubits(), std::move(entries));
    out.unitary_ = u.unitary_;
    return out;
}

bool is_unitary(const Operator& u) {
    if (u.unitary_.has_value()) return *u.unitary_;
    const std::size_t d = u.dim();
    bool ok = true;
    for (std::size_t row = 0; row < d && ok; ++row) {
        for (std::size_t col = 0; col < d && ok; ++col) {
            Amplitude acc{0.0, 0.0}; // (U†U)[row][col]
            for (std::size_t k = 0; k < d; ++k) acc += std::conj(u.at(k, row)) * u.at(k, col);
            const Amplitude want = row == col ? Amplitude{1.0, 0.0} : Amplitude{0.0, 0.0};
            if (std::abs(acc - want) > kEpsNorm) ok = false;
        }
    }
    u.unitary_ = ok;
    return ok;
}

Operator hadamard_n(int n_qubits) {
    if (n_qubits < 1) throw DomainError("hadamard_n: need at least one qubit");
    require_qubit_count(n_qubits, "hadamard_n");
    const std::size_t d = dim_of(n_qubits);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<Amplitude> entries(d * d);
    for (std::size_t y = 0; y < d; ++y)
        for (std::size_t x = 0; x < d; ++x) {
            const int sign = std::popcount(x & y) % 2 == 0 ? 1 : -1;
            entries[y * d + x] = Amplitude{sign * scale, 0.0};
        }
    return Operator(n_qubits, std::move(entries));
}

Operator phase_gate(double theta) {
    if (!std::isfinite(theta)) throw DomainError("phase_gate: non-finite angle");
    std::vector<Amplitude> entries{{1.0, 0.0},
                                   {0.0, 0.0},
                                   {0.0, 0.0},
                                   {std::cos(theta), std::sin(theta)}};
    return Operator(1, std::move(entries));
}

Operator dj_oracle(std::string_view bits, int k) {
    const std::size_t d = dim_of(k);
    if (bits.size() != d) {
        throw DomainError("dj_oracle: bitstring length " + std::to_string(bits.size()) +
                          " is not 2^" + std::to_string(k));
    }
    std::vector<Amplitude> entries(d * d, Amplitude{0.0, 0.0});
    for (std::size_t z = 0; z < d; ++z) {
        const char c = bits[z];
        if (c != '0' && c != '1') throw DomainError("dj_oracle: bitstring has non-binary character");
        entries[z * d + z] = Amplitude{c == '1' ? -1.0 : 1.0, 0.0};
    }
    return Operator(k, std::move(entries));
}

Operator fanout(int k) {
    if (k < 1) throw DomainError("fanout: need at least one qubit per register");
    require_qubit_count(2 * k, "fanout");
    const std::size_t d = dim_of(k);
    const std::size_t dd = d * d;
    std::vector<Amplitude> entries(dd * dd, Amplitude{0.0, 0.0});
    for (std::size_t z = 0; z < d; ++z)
        for (std::size_t w = 0; w < d; ++w)
            entries[(z * d + (w ^ z)) * dd + (z * d + w)] = Amplitude{1.0, 0.0};
    return Operator(2 * k, std::move(entries));
}

Operator projector(std::size_t x, int n_qubits) {
    const std::size_t d = dim_of(n_qubits);
    if (x >= d) throw DomainError("projector: index out of range");
    std::vector<Amplitude> entries(d * d, Amplitude{0.0, 0.0});
    entries[x * d + x] = Amplitude{1.0, 0.0};
    return Operator(n_qubits, std::move(entries));
}

bool completeness_check(const MeasurementFamily& family) {
    const std::size_t d = dim_of(family.n_qubits());
    // sum_r M_r†M_r, compared to I entrywise
    for (std::size_t row = 0; row < d; ++row) {
        for (std::size_t col = 0; col < d; ++col) {
            Amplitude acc{0.0, 0.0};
            for (std::size_t r = 0; r < family.size(); ++r) {
                const Operator& m = family.member(r);
                for (std::size_t k = 0; k < d; ++k) acc += std::conj(m.at(k, row)) * m.at(k, col);
            }
            const Amplitude want = row == col ? Amplitude{1.0, 0.0} : Amplitude{0.0, 0.0};
            if (std::abs(acc - want) > kEpsNorm) return false;
        }
    }
    return true;
}

MeasurementFamily computational_family(int n_qubits) {
    std::vector<Operator> members;
    const std::size_t d = dim_of(n_qubits);
    members.reserve(d);
    for (std::size_t m = 0; m < d; ++m) members.push_back(projector(m, n_qubits));
    return MeasurementFamily(n_qubits, std::move(members));
}

} // namespace ptg
