#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ptgames/games.hpp"

namespace ptg::dsl {

struct Span {
    int line = 1; // 1-based
    int col = 1;
    std::size_t offset = 0;
    std::size_t length = 0;
};

struct Diagnostic {
    std::string kind; // lexical | syntax | type | semantic
    std::string message;
    Span span;
    std::string to_string() const;
};

struct DslError : std::runtime_error {
    explicit DslError(Diagnostic d) : std::runtime_error(d.to_string()), diagnostic(std::move(d)) {}
    Diagnostic diagnostic;
};

// --- expressions ---

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinOp { Mul, Div, Mod, Add, Sub, Xor, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnOp { Not, Neg };

struct IntLit {
    std::int64_t value;
};
// x0, y2', x[i], y[e]'
struct VarRef {
    bool output = false;
    bool primed = false;
    ExprPtr index; // player index expression (IntLit for the x0 spelling)
};
// a sum-bound name
struct BinderRef {
    std::string name;
};
struct Unary {
    UnOp op;
    ExprPtr operand;
};
struct Binary {
    BinOp op;
    ExprPtr lhs, rhs;
};
struct Popcount {
    ExprPtr operand;
};
// bit(var, index): bit of the variable's value, position 0 leftmost in the
// variable's declared width
struct BitOf {
    ExprPtr var; // must be a VarRef
    ExprPtr index;
};
// sum binder in lo..hi : body   (hi exclusive, like 0,..n)
struct SumExpr {
    std::string binder;
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    ExprPtr body;
};

struct Expr {
    Span span;
    std::variant<IntLit, VarRef, BinderRef, Unary, Binary, Popcount, BitOf, SumExpr> node;
};

// --- game files ---

struct GameAst {
    Span span;
    std::string name;
    int players = 0;
    int input_bits = 0;  // homogeneous across players
    int output_bits = 0;
    ExprPtr promise;
    ExprPtr win;
};

// --- strategy files ---

struct PrepGhz {
    int n = 0;
};
struct PrepPairsum {
    int k = 0;
};
struct PrepAmps {
    std::vector<double> values;
};
using Prep = std::variant<PrepGhz, PrepPairsum, PrepAmps>;

// theta = pi * numerator / denominator; the numerator is a literal or the
// player's own input variable
struct Angle {
    bool zero = false;
    bool input_numerator = false;
    int input_player = 0;
    std::int64_t literal_numerator = 1;
    std::int64_t denominator = 1;
};

struct StmtPhase {
    Angle angle;
    ExprPtr guard; // may be null
};
struct StmtOracleDj {
    int input_player = 0;
};
struct StmtHadamard {};
struct StmtMeasure {
    int output_player = 0;
};

struct StrategyStmt {
    Span span;
    std::variant<StmtPhase, StmtOracleDj, StmtHadamard, StmtMeasure> node;
};

struct PlayerBlock {
    Span span;
    int player = 0;
    std::vector<StrategyStmt> stmts;
};

struct StrategyAst {
    Span span;
    std::string name;
    Span prep_span;
    Prep prep;
    std::vector<PlayerBlock> players;
};

// --- operations ---

GameAst parse_game(std::string_view text);
games::GameSpec compile_game(const GameAst& ast);
std::string print_game(const GameAst& ast);

StrategyAst parse_strategy(std::string_view text);
games::QuantumStrategy compile_strategy(const StrategyAst& ast, const games::GameSpec& game);
std::string print_strategy(const StrategyAst& ast);

// Structural equality, spans ignored (parse-print-parse fixpoint checks).
bool equal(const GameAst& a, const GameAst& b);
bool equal(const StrategyAst& a, const StrategyAst& b);

} // namespace ptg::dsl
