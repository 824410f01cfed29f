#include "doctest.h"

#include <bit>
#include <cmath>

#include "ptgames/linalg.hpp"
#include "test_util.hpp"

using namespace ptg;
using test_util::ops_close;
using test_util::random_state;
using test_util::random_unitary;
using test_util::states_close;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

StateVector bell_state() {
    return StateVector(2, {{kInvSqrt2, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {kInvSqrt2, 0.0}});
}
} // namespace

TEST_CASE("basis_state one-hot") {
    auto s = basis_state(0, 1);
    CHECK(s[0] == Amplitude{1.0, 0.0});
    CHECK(s[1] == Amplitude{0.0, 0.0});
    auto t = basis_state(3, 2);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(t[i] == (i == 3 ? Amplitude{1.0, 0.0} : Amplitude{0.0, 0.0}));
    CHECK_THROWS_AS(basis_state(4, 2), DomainError);
}

TEST_CASE("basis states are orthonormal") {
    for (int n = 1; n <= 3; ++n)
        for (std::size_t i = 0; i < dim_of(n); ++i)
            for (std::size_t j = 0; j < dim_of(n); ++j) {
                auto ip = inner_product(basis_state(i, n), basis_state(j, n));
                CHECK(std::abs(ip - Amplitude{i == j ? 1.0 : 0.0, 0.0}) < 1e-12);
            }
}

TEST_CASE("inner_product") {
    auto psi = random_state(3);
    CHECK(std::abs(inner_product(psi, psi) - Amplitude{1.0, 0.0}) < kEpsNorm);
    CHECK(std::abs(inner_product(basis_state(0, 1), basis_state(1, 1))) < 1e-12);
    auto plus = apply(hadamard_n(1), basis_state(0, 1));
    CHECK(std::abs(inner_product(plus, basis_state(0, 1)) - Amplitude{kInvSqrt2, 0.0}) < 1e-12);
    CHECK_THROWS_AS(inner_product(basis_state(0, 1), basis_state(0, 2)), DomainError);
    // conjugate-linearity in the first argument: <psi|phi> = conj(<phi|psi>)
    auto phi = random_state(3);
    CHECK(std::abs(inner_product(psi, phi) - std::conj(inner_product(phi, psi))) < 1e-12);
}

TEST_CASE("tensor_state index law") {
    CHECK(states_close(tensor_state(basis_state(0, 1), basis_state(1, 1)), basis_state(1, 2)));

    auto be = tensor_state(bell_state(), basis_state(0, 1));
    for (std::size_t i = 0; i < 8; ++i) {
        const double want = (i == 0 || i == 6) ? kInvSqrt2 : 0.0;
        CHECK(std::abs(be[i] - Amplitude{want, 0.0}) < 1e-12);
    }

    auto plus = apply(hadamard_n(1), basis_state(0, 1));
    auto pp = tensor_state(plus, plus);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(pp[i] - Amplitude{0.5, 0.0}) < 1e-12);

    // associativity, entrywise
    auto a = random_state(1), b = random_state(2), c = random_state(1);
    CHECK(states_close(tensor_state(tensor_state(a, b), c), tensor_state(a, tensor_state(b, c)),
                       1e-12));
}

TEST_CASE("apply") {
    auto psi = random_state(2);
    CHECK(states_close(apply(identity(2), psi), psi, 1e-12));
    auto h0 = apply(hadamard_n(1), basis_state(0, 1));
    CHECK(std::abs(h0[0] - Amplitude{kInvSqrt2, 0.0}) < 1e-12);
    CHECK(std::abs(h0[1] - Amplitude{kInvSqrt2, 0.0}) < 1e-12);
    for (int trial = 0; trial < 5; ++trial) {
        auto s = random_state(1);
        CHECK(states_close(apply(hadamard_n(1), apply(hadamard_n(1), s)), s));
    }
    // non-unitary operator is rejected
    Operator bad(1, {{2.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
    CHECK_THROWS_AS(apply(bad, basis_state(0, 1)), ContractViolation);
    CHECK_THROWS_AS(apply(identity(2), basis_state(0, 1)), DomainError);
}

TEST_CASE("tensor_op") {
    CHECK(ops_close(tensor_op(identity(1), identity(1)), identity(2)));

    auto after = apply(tensor_op(hadamard_n(1), identity(1)), bell_state());
    CHECK(std::abs(after[0] - Amplitude{0.5, 0.0}) < 1e-12);
    CHECK(std::abs(after[1] - Amplitude{0.5, 0.0}) < 1e-12);
    CHECK(std::abs(after[2] - Amplitude{0.5, 0.0}) < 1e-12);
    CHECK(std::abs(after[3] - Amplitude{-0.5, 0.0}) < 1e-12);

    for (int trial = 0; trial < 5; ++trial) {
        auto u = random_unitary(1), v = random_unitary(1);
        auto psi = random_state(1), phi = random_state(1);
        CHECK(states_close(apply(tensor_op(u, v), tensor_state(psi, phi)),
                           tensor_state(apply(u, psi), apply(v, phi))));
    }
}

TEST_CASE("hadamard_n") {
    auto h = hadamard_n(1);
    CHECK(std::abs(h.at(0, 0) - Amplitude{kInvSqrt2, 0.0}) < 1e-12);
    CHECK(std::abs(h.at(0, 1) - Amplitude{kInvSqrt2, 0.0}) < 1e-12);
    CHECK(std::abs(h.at(1, 0) - Amplitude{kInvSqrt2, 0.0}) < 1e-12);
    CHECK(std::abs(h.at(1, 1) - Amplitude{-kInvSqrt2, 0.0}) < 1e-12);

    for (int n = 1; n <= 4; ++n) {
        auto u = apply(hadamard_n(n), basis_state(0, n));
        const double want = 1.0 / std::sqrt(static_cast<double>(dim_of(n)));
        for (std::size_t i = 0; i < dim_of(n); ++i)
            CHECK(std::abs(u[i] - Amplitude{want, 0.0}) < 1e-12);
    }

    CHECK(ops_close(hadamard_n(2), tensor_op(hadamard_n(1), hadamard_n(1))));

    // basis action: column x has entry (-1)^{x·y}/sqrt(2^n) at row y
    for (int n = 1; n <= 6; ++n) {
        auto hn = hadamard_n(n);
        const double scale = 1.0 / std::sqrt(static_cast<double>(dim_of(n)));
        for (std::size_t x = 0; x < dim_of(n); ++x)
            for (std::size_t y = 0; y < dim_of(n); ++y) {
                const double sign = std::popcount(x & y) % 2 == 0 ? 1.0 : -1.0;
                CHECK(std::abs(hn.at(y, x) - Amplitude{sign * scale, 0.0}) < 1e-9);
            }
    }
}

TEST_CASE("phase_gate") {
    CHECK(ops_close(phase_gate(0.0), identity(1)));
    auto u = phase_gate(M_PI / 2.0);
    auto s = apply(u, apply(u, basis_state(1, 1)));
    CHECK(std::abs(s[1] - Amplitude{-1.0, 0.0}) < 1e-12);
    // theta = pi*alpha/2^l with alpha = 2^l
    auto full = phase_gate(M_PI * 4.0 / 4.0);
    CHECK(std::abs(full.at(1, 1) - Amplitude{-1.0, 0.0}) < 1e-12);
}

TEST_CASE("dj_oracle") {
    CHECK(ops_close(dj_oracle("00", 1), identity(1)));
    auto u = dj_oracle("10", 1);
    CHECK(std::abs(u.at(0, 0) - Amplitude{-1.0, 0.0}) < 1e-12);
    CHECK(std::abs(u.at(1, 1) - Amplitude{1.0, 0.0}) < 1e-12);
    CHECK_THROWS_AS(dj_oracle("101", 1), DomainError);
    CHECK_THROWS_AS(dj_oracle("1x", 1), DomainError);
    // squares to identity
    for (const char* bits : {"0110", "1011", "0001"}) {
        auto o = dj_oracle(bits, 2);
        CHECK(ops_close(product(o, o), identity(2)));
    }
}

TEST_CASE("fanout") {
    for (int k = 1; k <= 2; ++k) {
        auto f = fanout(k);
        const std::size_t d = dim_of(k);
        for (std::size_t z = 0; z < d; ++z) {
            auto in = tensor_state(basis_state(z, k), basis_state(0, k));
            auto out = apply(f, in);
            CHECK(states_close(out, tensor_state(basis_state(z, k), basis_state(z, k))));
        }
    }
    // pair-sum preparation: fanout(H^k ⊗ I)|0...0>
    for (int k = 1; k <= 3; ++k) {
        auto prep = apply(fanout(k), apply(tensor_op(hadamard_n(k), identity(k)),
                                           basis_state(0, 2 * k)));
        const std::size_t d = dim_of(k);
        const double want = 1.0 / std::sqrt(static_cast<double>(d));
        for (std::size_t i = 0; i < d * d; ++i) {
            const bool diag = (i / d) == (i % d);
            CHECK(std::abs(prep[i] - Amplitude{diag ? want : 0.0, 0.0}) < 1e-12);
        }
    }
    // fanout(1) is the permutation swapping indices 2 and 3
    auto f1 = fanout(1);
    auto want = identity(2);
    want.at(2, 2) = {0.0, 0.0};
    want.at(3, 3) = {0.0, 0.0};
    want.at(3, 2) = {1.0, 0.0};
    want.at(2, 3) = {1.0, 0.0};
    CHECK(ops_close(f1, want));
}

TEST_CASE("is_unitary, adjoint, completeness") {
    CHECK(is_unitary(hadamard_n(3)));
    CHECK(is_unitary(phase_gate(0.7)));
    CHECK(is_unitary(dj_oracle("0110", 2)));
    CHECK(is_unitary(fanout(2)));
    CHECK_FALSE(is_unitary(projector(0, 1)));

    CHECK(completeness_check(computational_family(2)));
    // half a family is incomplete
    MeasurementFamily half(1, {projector(0, 1)});
    CHECK_FALSE(completeness_check(half));

    // adjoint defining identity <psi|U phi> = <U† psi|phi>
    for (int trial = 0; trial < 5; ++trial) {
        auto u = random_unitary(2);
        auto psi = random_state(2), phi = random_state(2);
        auto lhs = inner_product(psi, StateVector(2, matvec(u, phi.amps())));
        auto rhs = inner_product(StateVector(2, matvec(adjoint(u), psi.amps())), phi);
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("unitary constructors preserve norm") {
    for (int trial = 0; trial < 5; ++trial) {
        auto psi = random_state(2);
        for (const Operator& u : {hadamard_n(2), tensor_op(phase_gate(1.1), phase_gate(-0.3)),
                                  dj_oracle("1001", 2), fanout(1)}) {
            auto out = apply(u, psi);
            CHECK(std::abs(norm_squared(out.amps()) - 1.0) < kEpsNorm);
        }
    }
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(StateVector(1, {{1.0, 0.0}, {1.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(StateVector(2, {{1.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(StateVector(1, {{std::nan(""), 0.0}, {0.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(Operator(1, {{1.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(basis_state(0, 13), DomainError);
}
