#include "doctest.h"

#include <cmath>
#include <random>

#include "ptgames/semantics.hpp"
#include "test_util.hpp"

using namespace ptg;
using namespace ptg::sem;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

StateVector bell_state() {
    return StateVector(2, {{kInvSqrt2, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {kInvSqrt2, 0.0}});
}

SpacePtr small_space() {
    return make_space({{"x", 0, 3, ""}, {"y", 0, 3, ""}});
}

bool specs_equal_pointwise(const Spec& a, const Spec& b, double tol = 1e-9) {
    for (const auto& pre : enumerate_states(a.pre_space())) {
        for (const auto& post : enumerate_states(a.post_space())) {
            if (std::abs(a.eval(pre, post) - b.eval(pre, post)) > tol) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("ok is the identity specification") {
    auto space = small_space();
    auto id = ok(space);
    auto pre = ProgState::initial(space).with("x", 2).with("y", 1);
    CHECK(id.eval(pre, pre) == 1.0);
    CHECK(id.eval(pre, pre.with("x", 3)) == 0.0);
}

TEST_CASE("assign writes one variable and frames the rest") {
    auto space = small_space();
    auto prog = assign(space, "x", [](const ProgState& s) { return s.get("x") + 1; });
    auto pre = ProgState::initial(space).with("x", 1).with("y", 2);
    CHECK(prog.eval(pre, pre.with("x", 2)) == 1.0);
    CHECK(prog.eval(pre, pre.with("x", 3)) == 0.0);
    CHECK(prog.eval(pre, pre.with("x", 2).with("y", 3)) == 0.0);
    // out-of-domain value names the variable
    auto bad = assign(space, "x", [](const ProgState&) { return std::int64_t{7}; });
    CHECK_THROWS_WITH_AS(bad.support(pre), doctest::Contains("x"), EvaluationError);
}

TEST_CASE("classical parallel composition is conjunction over partitioned variables") {
    auto full = make_space({{"x", 0, 4, ""}, {"y", 0, 4, ""}, {"z", -2, 2, ""}});
    auto pq = make_space({{"x", 0, 4, ""}, {"y", 0, 4, ""}});
    auto zs = make_space({{"z", -2, 2, ""}});
    auto p = seq(assign(pq, "x", [](const ProgState& s) { return s.get("x") + 1; }),
                 assign(pq, "y", [](const ProgState& s) { return s.get("x"); }));
    auto q = assign(zs, "z", [](const ProgState& s) { return -s.get("z"); });
    auto both = parallel_classical(full, {p, q});
    auto expected = Spec::predicate(
        full,
        [](const ProgState& pre, const ProgState& post) -> double {
            return post.get("x") == pre.get("x") + 1 && post.get("y") == pre.get("x") + 1 &&
                   post.get("z") == -pre.get("z");
        },
        /*boolean=*/true);
    for (const auto& pre : enumerate_states(full)) {
        if (pre.get("x") == 4) continue; // x+1 would leave the domain
        for (const auto& post : enumerate_states(full)) {
            CHECK(both.eval(pre, post) == expected.eval(pre, post));
        }
    }
}

TEST_CASE("substitution law") {
    auto space = small_space();
    std::mt19937 gen(7);
    std::uniform_int_distribution<int> coef(0, 3);
    auto random_expr = [&]() {
        const std::int64_t a = coef(gen), b = coef(gen), c = coef(gen);
        return [a, b, c](const ProgState& s) {
            return (a * s.get("x") + b * s.get("y") + c) % 4;
        };
    };
    for (int trial = 0; trial < 25; ++trial) {
        auto e = random_expr();
        // random continuation: two assigns
        const char* v1 = coef(gen) % 2 == 0 ? "x" : "y";
        const char* v2 = coef(gen) % 2 == 0 ? "x" : "y";
        auto cont = seq(assign(space, v1, random_expr()), assign(space, v2, random_expr()));
        auto lhs = seq(assign(space, "x", e), cont);
        for (const auto& pre : enumerate_states(space)) {
            const ProgState substituted = pre.with("x", e(pre));
            for (const auto& post : enumerate_states(space)) {
                CHECK(lhs.eval(pre, post) == doctest::Approx(cont.eval(substituted, post)));
            }
        }
    }
}

TEST_CASE("seq identity and associativity") {
    auto space = small_space();
    auto prog = seq(assign(space, "x", [](const ProgState& s) { return (s.get("x") + 1) % 4; }),
                    assign(space, "y", [](const ProgState& s) { return s.get("x"); }));
    CHECK(specs_equal_pointwise(seq(ok(space), prog), prog));
    CHECK(specs_equal_pointwise(seq(prog, ok(space)), prog));

    auto a = assign(space, "x", [](const ProgState& s) { return (s.get("x") + 1) % 4; });
    auto b = if_then_else([](const ProgState&) { return 0.5; }, ok(space),
                          assign(space, "y", [](const ProgState&) { return std::int64_t{0}; }));
    auto c = assign(space, "y", [](const ProgState& s) { return (s.get("y") + 2) % 4; });
    CHECK(specs_equal_pointwise(seq(seq(a, b), c), seq(a, seq(b, c)), 1e-12));
}

TEST_CASE("seq of distributions is a distribution") {
    auto space = small_space();
    auto coin = [&](const char* var) {
        return if_then_else([](const ProgState&) { return 0.5; },
                            assign(space, var, [](const ProgState&) { return std::int64_t{0}; }),
                            assign(space, var, [](const ProgState&) { return std::int64_t{1}; }));
    };
    auto prog = seq(coin("x"), coin("y"));
    CHECK(prog.is_distribution());
    for (const auto& pre : enumerate_states(space)) {
        CHECK(prog.distribution(pre).total() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("if_then_else") {
    auto space = small_space();
    auto r = assign(space, "x", [](const ProgState&) { return std::int64_t{1}; });
    auto s = assign(space, "x", [](const ProgState&) { return std::int64_t{2}; });
    auto pre = ProgState::initial(space);
    CHECK(specs_equal_pointwise(if_then_else([](const ProgState&) { return 1.0; }, r, s), r));
    CHECK(specs_equal_pointwise(if_then_else([](const ProgState&) { return 0.0; }, r, s), s));
    auto mix = if_then_else([](const ProgState&) { return 0.5; }, r, s);
    CHECK(mix.eval(pre, pre.with("x", 1)) == doctest::Approx(0.5));
    CHECK(mix.eval(pre, pre.with("x", 2)) == doctest::Approx(0.5));
    auto bad = if_then_else([](const ProgState&) { return 1.5; }, r, s);
    CHECK_THROWS_AS(bad.support(pre), EvaluationError);
}

TEST_CASE("conditional unitary equals the power form") {
    auto space = make_space({{"x", 0, 1, ""}}, {{"psi", 1, {}}});
    auto u = phase_gate(M_PI / 2.0);
    auto guarded = if_then_else([](const ProgState& s) { return s.get("x") == 1 ? 1.0 : 0.0; },
                                apply_unitary(space, "psi", u), ok(space));
    for (std::int64_t x : {0, 1}) {
        auto pre = ProgState::initial(space)
                       .with("x", x)
                       .with_state("psi", test_util::random_state(1));
        const Operator powered = x == 1 ? u : identity(1);
        auto direct = apply_unitary(space, "psi", powered);
        const auto got = guarded.support(pre);
        const auto want = direct.support(pre);
        REQUIRE(got.size() == 1);
        REQUIRE(want.size() == 1);
        CHECK(test_util::states_close(got[0].state.get_state("psi"),
                                      want[0].state.get_state("psi"), 1e-12));
    }
}

TEST_CASE("measure_computational on a basis state is deterministic") {
    auto space = make_space({{"r", 0, 7, ""}}, {{"psi", 3, {}}});
    auto m = measure_computational(space, "psi", "r");
    auto pre = ProgState::initial(space).with_state("psi", basis_state(5, 3));
    auto sup = m.support(pre);
    REQUIRE(sup.size() == 1);
    CHECK(sup[0].weight == doctest::Approx(1.0));
    CHECK(sup[0].state.get("r") == 5);
    CHECK(test_util::states_close(sup[0].state.get_state("psi"), basis_state(5, 3)));
}

TEST_CASE("measurement outcome probabilities total 1") {
    auto space = make_space({{"r", 0, 3, ""}}, {{"psi", 2, {}}});
    auto m = measure_computational(space, "psi", "r");
    for (int trial = 0; trial < 10; ++trial) {
        auto pre = ProgState::initial(space).with_state("psi", test_util::random_state(2));
        CHECK(m.distribution(pre).total() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("measure_general with computational projectors equals measure_computational") {
    auto space = make_space({{"r", 0, 3, ""}}, {{"psi", 2, {}}});
    auto mg = measure_general(space, computational_family(2), "psi", "r");
    auto mc = measure_computational(space, "psi", "r");
    for (int trial = 0; trial < 10; ++trial) {
        auto pre = ProgState::initial(space).with_state("psi", test_util::random_state(2));
        auto a = mg.support(pre);
        auto b = mc.support(pre);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].weight == doctest::Approx(b[i].weight).epsilon(1e-9));
            CHECK(a[i].state.get("r") == b[i].state.get("r"));
            CHECK(test_util::states_close_up_to_phase(a[i].state.get_state("psi"),
                                                      b[i].state.get_state("psi")));
            // pointwise as specifications: the same poststate carries the
            // same probability under both measurement forms
            CHECK(mg.eval(pre, b[i].state) == doctest::Approx(b[i].weight).epsilon(1e-9));
        }
    }
}

TEST_CASE("single-member family is a point distribution") {
    auto space = make_space({{"r", 0, 0, ""}}, {{"psi", 1, {}}});
    auto m = measure_general(space, MeasurementFamily(1, {identity(1)}), "psi", "r");
    auto psi = test_util::random_state(1);
    auto pre = ProgState::initial(space).with_state("psi", psi);
    auto sup = m.support(pre);
    REQUIRE(sup.size() == 1);
    CHECK(sup[0].weight == doctest::Approx(1.0));
    CHECK(test_util::states_close(sup[0].state.get_state("psi"), psi));
}

TEST_CASE("two-outcome projectors on |+>") {
    auto space = make_space({{"r", 0, 1, ""}}, {{"psi", 1, {}}});
    MeasurementFamily fam(1, {projector(0, 1), projector(1, 1)});
    auto m = measure_general(space, fam, "psi", "r");
    auto plus = apply(hadamard_n(1), basis_state(0, 1));
    auto sup = m.support(ProgState::initial(space).with_state("psi", plus));
    REQUIRE(sup.size() == 2);
    for (const auto& e : sup) {
        CHECK(e.weight == doctest::Approx(0.5));
        CHECK(test_util::states_close(e.state.get_state("psi"),
                                      basis_state(e.state.get("r"), 1)));
    }
}

TEST_CASE("incomplete family is rejected") {
    auto space = make_space({{"r", 0, 1, ""}}, {{"psi", 1, {}}});
    MeasurementFamily half(1, {projector(0, 1)});
    CHECK_THROWS_AS(measure_general(space, half, "psi", "r"), ContractViolation);
}

TEST_CASE("branch pruning guards dropped mass") {
    auto space = make_space({{"r", 0, 1, ""}}, {{"psi", 1, {}}});
    auto m = measure_computational(space, "psi", "r");
    // amplitude 1e-5: outcome probability 1e-10 is below eps_prob but above
    // the dropped-mass budget, so evaluation must fail loudly
    const double small = 1e-5;
    auto risky = StateVector(1, {{std::sqrt(1.0 - small * small), 0.0}, {small, 0.0}});
    CHECK_THROWS_AS(m.support(ProgState::initial(space).with_state("psi", risky)),
                    EvaluationError);
    // amplitude 1e-7: probability 1e-14 is inside the budget and is dropped
    const double tiny = 1e-7;
    auto fine = StateVector(1, {{std::sqrt(1.0 - tiny * tiny), 0.0}, {tiny, 0.0}});
    auto sup = m.support(ProgState::initial(space).with_state("psi", fine));
    REQUIRE(sup.size() == 1);
    CHECK(sup[0].weight == doctest::Approx(1.0));
}

// Section-3 worked example: Bell state, one party applies H then measures,
// the other only measures; every two-bit outcome has probability 1/4.
TEST_CASE("entangled parallel composition reproduces the Bell example") {
    auto space = make_space(
        {{"p", 0, 1, "alice"}, {"q", 0, 1, "bob"}},
        {{"psi", 2, {{"alice", 0, 1}, {"bob", 1, 2}}}});
    std::vector<LocalProgram> parts;
    parts.push_back({"alice",
                     {{[](const ProgState&) { return hadamard_n(1); }, {}}},
                     LocalMeasurement{"p", std::nullopt}});
    parts.push_back({"bob", {}, LocalMeasurement{"q", std::nullopt}});
    auto prog = seq(assign_state(space, "psi", bell_state()),
                    parallel(space, "psi", parts));
    auto sup = prog.support(ProgState::initial(space));
    REQUIRE(sup.size() == 4);
    for (const auto& e : sup) {
        CHECK(e.weight == doctest::Approx(0.25).epsilon(1e-9));
        const auto outcome = e.state.get("p") * 2 + e.state.get("q");
        CHECK(test_util::states_close(e.state.get_state("psi"),
                                      basis_state(outcome, 2)));
    }
}

TEST_CASE("unitary-only parallel equals one tensored assignment") {
    auto space = make_space({}, {{"psi", 2, {{"a", 0, 1}, {"b", 1, 2}}}});
    auto u = test_util::random_unitary(1);
    std::vector<LocalProgram> parts;
    parts.push_back({"a", {{[u](const ProgState&) { return u; }, {}}}, std::nullopt});
    // party b performs ok (absent)
    auto composed = parallel_unitary(*space, "psi", parts, ProgState::initial(space));
    CHECK(test_util::ops_close(composed, tensor_op(u, identity(1))));

    auto par = parallel(space, "psi", parts);
    auto direct = apply_unitary(space, "psi", tensor_op(u, identity(1)));
    auto pre = ProgState::initial(space).with_state("psi", test_util::random_state(2));
    auto got = par.support(pre);
    auto want = direct.support(pre);
    REQUIRE(got.size() == 1);
    CHECK(test_util::states_close(got[0].state.get_state("psi"),
                                  want[0].state.get_state("psi")));
}

TEST_CASE("three-party conditional parallel equals the tensored program") {
    auto space = make_space(
        {{"x0", 0, 1, "p0"}, {"x1", 0, 1, "p1"}, {"x2", 0, 1, "p2"},
         {"y0", 0, 1, "p0"}, {"y1", 0, 1, "p1"}, {"y2", 0, 1, "p2"}},
        {{"psi", 3, {{"p0", 0, 1}, {"p1", 1, 2}, {"p2", 2, 3}}}});
    auto ghz = StateVector(3, {{kInvSqrt2, 0.0}, {}, {}, {}, {}, {}, {}, {kInvSqrt2, 0.0}});
    auto u = phase_gate(M_PI / 2.0);

    std::vector<LocalProgram> parts;
    for (int i = 0; i < 3; ++i) {
        const std::string x = "x" + std::to_string(i);
        LocalProgram part{"p" + std::to_string(i), {}, LocalMeasurement{"y" + std::to_string(i),
                                                                        std::nullopt}};
        part.steps.push_back({[x, u](const ProgState& s) {
                                  return s.get(x) == 1 ? u : identity(1);
                              },
                              {x}});
        part.steps.push_back({[](const ProgState&) { return hadamard_n(1); }, {}});
        parts.push_back(std::move(part));
    }
    auto par = seq(assign_state(space, "psi", ghz), parallel(space, "psi", parts));

    for (std::int64_t bits = 0; bits < 8; ++bits) {
        auto pre = ProgState::initial(space)
                       .with("x0", (bits >> 2) & 1)
                       .with("x1", (bits >> 1) & 1)
                       .with("x2", bits & 1);
        // single 3-qubit program: H^{⊗3}(U^{x0} ⊗ U^{x1} ⊗ U^{x2}) then measure
        Operator cond = tensor_op(tensor_op(pre.get("x0") ? u : identity(1),
                                            pre.get("x1") ? u : identity(1)),
                                  pre.get("x2") ? u : identity(1));
        auto evolved = apply(product(hadamard_n(3), cond), ghz);
        auto got = par.support(pre);
        double total = 0.0;
        for (const auto& e : got) {
            const std::int64_t m =
                e.state.get("y0") * 4 + e.state.get("y1") * 2 + e.state.get("y2");
            CHECK(e.weight == doctest::Approx(std::norm(evolved[m])).epsilon(1e-9));
            total += e.weight;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("locality violations are rejected") {
    auto space = make_space(
        {{"xa", 0, 1, "alice"}, {"p", 0, 1, "alice"}, {"q", 0, 1, "bob"}},
        {{"psi", 2, {{"alice", 0, 1}, {"bob", 1, 2}}}});
    // bob reads alice's variable
    std::vector<LocalProgram> reads_foreign;
    reads_foreign.push_back({"bob",
                             {{[](const ProgState&) { return identity(1); }, {"xa"}}},
                             std::nullopt});
    CHECK_THROWS_AS(parallel(space, "psi", reads_foreign), LocalityViolation);
    // bob writes alice's result variable
    std::vector<LocalProgram> writes_foreign;
    writes_foreign.push_back({"bob", {}, LocalMeasurement{"p", std::nullopt}});
    CHECK_THROWS_AS(parallel(space, "psi", writes_foreign), LocalityViolation);
    // unknown party
    std::vector<LocalProgram> ghost;
    ghost.push_back({"carol", {}, std::nullopt});
    CHECK_THROWS_AS(parallel(space, "psi", ghost), LocalityViolation);
    // oversized operator escapes the party's interval
    std::vector<LocalProgram> oversized;
    oversized.push_back({"alice",
                         {{[](const ProgState&) { return hadamard_n(2); }, {}}},
                         std::nullopt});
    auto par = parallel(space, "psi", oversized);
    CHECK_THROWS_AS(par.support(ProgState::initial(space)), LocalityViolation);
}

TEST_CASE("learn conditions a distribution") {
    auto space = make_space({{"x", 0, 3, ""}});
    // uniform distribution over x'
    auto uniform = Spec::from_kernel(
        space,
        [space](const ProgState& pre) -> Support {
            Support sup;
            for (std::int64_t v = 0; v < 4; ++v) sup.push_back({pre.with("x", v), 0.25});
            return sup;
        },
        false, true);
    auto even = Spec::predicate(
        space, [](const ProgState&, const ProgState& post) -> double {
            return post.get("x") % 2 == 0 ? 1.0 : 0.0;
        },
        true);
    auto learned = learn(uniform, even);
    auto pre = ProgState::initial(space);
    auto sup = learned.support(pre);
    REQUIRE(sup.size() == 2);
    CHECK(sup[0].state.get("x") == 0);
    CHECK(sup[1].state.get("x") == 2);
    CHECK(sup[0].weight == doctest::Approx(0.5));
    CHECK(sup[1].weight == doctest::Approx(0.5));

    // learn(P, 1) = normalize(P)
    auto one = Spec::predicate(
        space, [](const ProgState&, const ProgState&) -> double { return 1.0; }, true);
    CHECK(specs_equal_pointwise(learn(uniform, one), normalize(uniform), 1e-12));

    // conditioning on an impossible event is an error
    auto never = Spec::predicate(
        space, [](const ProgState&, const ProgState&) -> double { return 0.0; }, true);
    CHECK_THROWS_AS(learn(uniform, never).support(pre), UndefinedConditional);
}

TEST_CASE("normalize is the identity on distributions") {
    auto space = make_space({{"x", 0, 3, ""}});
    auto coin = if_then_else([](const ProgState&) { return 0.25; },
                             assign(space, "x", [](const ProgState&) { return std::int64_t{0}; }),
                             assign(space, "x", [](const ProgState&) { return std::int64_t{1}; }));
    CHECK(specs_equal_pointwise(normalize(coin), coin, 1e-12));
    auto zero = Spec::predicate(
        space, [](const ProgState&, const ProgState&) -> double { return 0.0; }, false);
    CHECK_THROWS_AS(normalize(zero).support(ProgState::initial(space)), UndefinedConditional);
}

TEST_CASE("sum_out removes poststate variables by summation") {
    auto space = make_space({{"x", 0, 1, ""}, {"y", 0, 1, ""}});
    auto coin = [&](const char* var) {
        return if_then_else([](const ProgState&) { return 0.5; },
                            assign(space, var, [](const ProgState&) { return std::int64_t{0}; }),
                            assign(space, var, [](const ProgState&) { return std::int64_t{1}; }));
    };
    auto joint = seq(coin("x"), coin("y"));
    auto marginal = sum_out({"y"}, joint);
    auto pre = ProgState::initial(space);
    auto sup = marginal.support(pre);
    REQUIRE(sup.size() == 2);
    CHECK(sup[0].weight + sup[1].weight == doctest::Approx(1.0));
    CHECK(sup[0].weight == doctest::Approx(0.5));
    CHECK(marginal.post_space()->classical_index("y") == -1);
    CHECK_THROWS_AS(sum_out({"nope"}, joint), DomainError);
}

TEST_CASE("refines compares specifications pointwise") {
    auto space = make_space({{"x", 0, 8, ""}});
    auto target = Spec::predicate(
        space, [](const ProgState& pre, const ProgState& post) -> double {
            return pre.get("x") >= 0 ? (post.get("x") == 0 ? 1.0 : 0.0) : 1.0;
        },
        true);
    CHECK(refines(target, target, 0.0).holds);

    // body: if x = 0 then ok else (x := x - 1 ; target)
    auto body = if_then_else(
        [](const ProgState& s) { return s.get("x") == 0 ? 1.0 : 0.0; }, ok(space),
        seq(assign(space, "x", [](const ProgState& s) { return s.get("x") - 1; }), target));
    CHECK(refines(body, target, 0.0).holds);

    // a wrong body is caught, with a witness
    auto wrong = assign(space, "x", [](const ProgState&) { return std::int64_t{1}; });
    auto res = refines(wrong, target, 0.0);
    CHECK_FALSE(res.holds);
    REQUIRE(res.witness.has_value());
    CHECK(res.witness->post.get("x") == 1);
    CHECK(res.witness->p_value == 1.0);
    CHECK(res.witness->q_value == 0.0);
}

TEST_CASE("boolean refines agrees with truth-table implication") {
    auto space = make_space({{"a", 0, 3, ""}, {"b", 0, 3, ""}});
    std::mt19937 gen(99);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        // random truth tables over (pre, post) indexed by 8 bits
        std::vector<int> tp(256), tq(256);
        for (auto& v : tp) v = bit(gen);
        for (auto& v : tq) v = bit(gen);
        auto idx = [](const ProgState& pre, const ProgState& post) {
            return ((pre.get("a") * 4 + pre.get("b")) * 16 + post.get("a") * 4 + post.get("b"));
        };
        auto p = Spec::predicate(
            space, [tp, idx](const ProgState& pre, const ProgState& post) -> double {
                return tp[idx(pre, post)];
            },
            true);
        auto q = Spec::predicate(
            space, [tq, idx](const ProgState& pre, const ProgState& post) -> double {
                return tq[idx(pre, post)];
            },
            true);
        bool implied = true;
        for (int i = 0; i < 256; ++i) implied = implied && (tp[i] <= tq[i]);
        CHECK(refines(p, q, 0.0).holds == implied);
    }
}

TEST_CASE("distribution totals hold for every program constructor") {
    auto space = make_space({{"x", 0, 3, ""}, {"r", 0, 3, ""}}, {{"psi", 2, {}}});
    auto prog = seq(
        assign(space, "x", [](const ProgState& s) { return (s.get("x") + 1) % 4; }),
        seq(assign_state(space, "psi", test_util::random_state(2)),
            seq(apply_unitary(space, "psi", hadamard_n(2)),
                seq(if_then_else([](const ProgState&) { return 0.3; }, ok(space),
                                 assign(space, "x", [](const ProgState&) { return std::int64_t{0}; })),
                    measure_computational(space, "psi", "r")))));
    CHECK(prog.is_distribution());
    for (std::int64_t x = 0; x < 4; ++x) {
        auto pre = ProgState::initial(space).with("x", x);
        CHECK(prog.distribution(pre).total() == doctest::Approx(1.0).epsilon(1e-9));
    }
}
