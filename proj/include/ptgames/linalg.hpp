#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ptgames/errors.hpp"

namespace ptg {

using Amplitude = std::complex<double>;

// Tolerance for all vector/matrix identity checks (norms, unitarity,
// completeness).
inline constexpr double kEpsNorm = 1e-9;

// Largest supported register. Everything is stored dense.
inline constexpr int kMaxQubits = 12;

// Index convention: qubit 0 is the most significant bit of a basis index,
// so (psi ⊗ phi)[i] = psi[i div 2^n] * phi[i mod 2^n] where phi has n qubits.
inline std::size_t dim_of(int n_qubits) { return std::size_t{1} << n_qubits; }

// Bit of x at position pos, where position 0 is the leftmost (most
// significant) of a width-bit string.
inline int bit_at(std::uint64_t x, int pos, int width) {
    return static_cast<int>((x >> (width - 1 - pos)) & 1u);
}

// Unit-norm amplitude function over basis indices 0..2^n.
class StateVector {
public:
    StateVector(int n_qubits, std::vector<Amplitude> amps);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const Amplitude& operator[](std::size_t i) const { return amps_[i]; }
    const std::vector<Amplitude>& amps() const { return amps_; }

private:
    int n_qubits_;
    std::vector<Amplitude> amps_;
};

// Dense complex matrix on a 2^n-dimensional space, row-major
// (row = output index, column = input index).
class Operator {
public:
    Operator(int n_qubits, std::vector<Amplitude> entries);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return dim_; }
    const Amplitude& at(std::size_t row, std::size_t col) const {
        return entries_[row * dim_ + col];
    }
    Amplitude& at(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }
    const std::vector<Amplitude>& entries() const { return entries_; }

    // Cached verdict of is_unitary; composition of verified unitaries
    // propagates the flag instead of re-checking.
    friend bool is_unitary(const Operator& u);
    friend Operator tensor_op(const Operator& u, const Operator& v);
    friend Operator product(const Operator& a, const Operator& b);
    friend Operator adjoint(const Operator& u);

private:
    int n_qubits_;
    std::size_t dim_;
    std::vector<Amplitude> entries_;
    mutable std::optional<bool> unitary_;
};

// Indexed collection {M_r} of measurement operators on a common space.
// Completeness (sum_r M_r†M_r = I) is checked where the family is used.
class MeasurementFamily {
public:
    MeasurementFamily(int n_qubits, std::vector<Operator> members);

    int n_qubits() const { return n_qubits_; }
    std::size_t size() const { return members_.size(); }
    const Operator& member(std::size_t r) const { return members_[r]; }

private:
    int n_qubits_;
    std::vector<Operator> members_;
};

StateVector basis_state(std::size_t x, int n_qubits);
Amplitude inner_product(const StateVector& psi, const StateVector& phi);
StateVector tensor_state(const StateVector& psi, const StateVector& phi);

// Program-form evolution: requires a unitary operator.
StateVector apply(const Operator& u, const StateVector& psi);

// Plain matrix-vector product, no unitarity gate (measurement internals).
std::vector<Amplitude> matvec(const Operator& a, const std::vector<Amplitude>& v);

Operator identity(int n_qubits);
Operator tensor_op(const Operator& u, const Operator& v);
Operator product(const Operator& a, const Operator& b); // a·b
Operator adjoint(const Operator& u);
bool is_unitary(const Operator& u);

Operator hadamard_n(int n_qubits);
Operator phase_gate(double theta);

// Diagonal ±1 oracle: entry at basis index z is (-1)^{bits[z]}, with
// position 0 of the bitstring written leftmost.
Operator dj_oracle(std::string_view bits, int k);

// Pairwise fan-out on 2k qubits: |z>|w> -> |z>|w ⊕ z>.
Operator fanout(int k);

// Projector |x><x| on n qubits.
Operator projector(std::size_t x, int n_qubits);

bool completeness_check(const MeasurementFamily& family);

// Computational-basis projective family {|m><m|}.
MeasurementFamily computational_family(int n_qubits);

double norm_squared(const std::vector<Amplitude>& amps);

// Fixes the unobservable global phase: rotates so the first amplitude of
// magnitude above 1e-12 is real and positive.
std::vector<Amplitude> canonical_phase(std::vector<Amplitude> amps);

} // namespace ptg
