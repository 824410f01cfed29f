#include "ptgames/dsl.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <functional>
#include <sstream>

namespace ptg::dsl {

std::string Diagnostic::to_string() const {
    std::ostringstream os;
    os << kind << " error at " << span.line << ":" << span.col << ": " << message;
    return os.str();
}

namespace {

[[noreturn]] void fail(std::string kind, std::string message, Span span) {
    throw DslError(Diagnostic{std::move(kind), std::move(message), span});
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
    Ident, Int, Float,
    LBrace, RBrace, LParen, RParen, LBracket, RBracket,
    Semi, Colon, Comma, Prime, Arrow, DotDot,
    Plus, Minus, Star, Slash,
    Eq, Ne, Lt, Le, Gt, Ge,
    Eof,
};

struct Token {
    Tok kind;
    std::string text;
    std::int64_t int_value = 0;
    double float_value = 0.0;
    Span span;
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (c == '\n') {
            ++i;
            ++line;
            col = 1;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            ++col;
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        const std::size_t start = i;
        const int start_line = line, start_col = col;
        auto push = [&](Tok kind) {
            out.push_back({kind, std::string(src.substr(start, i - start)), 0, 0.0,
                           Span{start_line, start_col, start, i - start}});
            col += static_cast<int>(i - start);
        };
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            bool is_float = false;
            if (i + 1 < src.size() && src[i] == '.' && src[i + 1] != '.' &&
                std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
                is_float = true;
                ++i;
                while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            }
            Token t{is_float ? Tok::Float : Tok::Int,
                    std::string(src.substr(start, i - start)), 0, 0.0,
                    Span{start_line, start_col, start, i - start}};
            try {
                if (is_float) {
                    t.float_value = std::stod(t.text);
                } else {
                    t.int_value = std::stoll(t.text);
                }
            } catch (const std::exception&) {
                fail("lexical", "number literal out of range", t.span);
            }
            col += static_cast<int>(i - start);
            out.push_back(std::move(t));
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                ++i;
            }
            push(Tok::Ident);
            continue;
        }
        switch (c) {
            case '{': ++i; push(Tok::LBrace); continue;
            case '}': ++i; push(Tok::RBrace); continue;
            case '(': ++i; push(Tok::LParen); continue;
            case ')': ++i; push(Tok::RParen); continue;
            case '[': ++i; push(Tok::LBracket); continue;
            case ']': ++i; push(Tok::RBracket); continue;
            case ';': ++i; push(Tok::Semi); continue;
            case ':': ++i; push(Tok::Colon); continue;
            case ',': ++i; push(Tok::Comma); continue;
            case '\'': ++i; push(Tok::Prime); continue;
            case '+': ++i; push(Tok::Plus); continue;
            case '*': ++i; push(Tok::Star); continue;
            case '/': ++i; push(Tok::Slash); continue;
            case '=': ++i; push(Tok::Eq); continue;
            case '-':
                ++i;
                if (i < src.size() && src[i] == '>') {
                    ++i;
                    push(Tok::Arrow);
                } else {
                    push(Tok::Minus);
                }
                continue;
            case '.':
                ++i;
                if (i < src.size() && src[i] == '.') {
                    ++i;
                    push(Tok::DotDot);
                    continue;
                }
                fail("lexical", "stray '.'", Span{start_line, start_col, start, 1});
            case '!':
                ++i;
                if (i < src.size() && src[i] == '=') {
                    ++i;
                    push(Tok::Ne);
                    continue;
                }
                fail("lexical", "stray '!' (write 'not' or '!=')",
                     Span{start_line, start_col, start, 1});
            case '<':
                ++i;
                if (i < src.size() && src[i] == '=') {
                    ++i;
                    push(Tok::Le);
                } else {
                    push(Tok::Lt);
                }
                continue;
            case '>':
                ++i;
                if (i < src.size() && src[i] == '=') {
                    ++i;
                    push(Tok::Ge);
                } else {
                    push(Tok::Gt);
                }
                continue;
            default:
                fail("lexical", std::string("unexpected character '") + c + "'",
                     Span{start_line, start_col, start, 1});
        }
    }
    out.push_back({Tok::Eof, "<eof>", 0, 0.0, Span{line, col, i, 0}});
    return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    std::vector<Token> tokens;
    std::size_t pos = 0;

    const Token& peek() const { return tokens[std::min(pos, tokens.size() - 1)]; }
    bool at(Tok kind) const { return peek().kind == kind; }
    bool at_kw(std::string_view kw) const {
        return peek().kind == Tok::Ident && peek().text == kw;
    }
    Token take() { return tokens[pos == tokens.size() - 1 ? pos : pos++]; }
    Token expect(Tok kind, const std::string& what) {
        if (!at(kind)) {
            fail("syntax", "expected " + what + " but found '" + peek().text + "'",
                 peek().span);
        }
        return take();
    }
    Token expect_kw(std::string_view kw) {
        if (!at_kw(kw)) {
            fail("syntax", "expected '" + std::string(kw) + "' but found '" + peek().text + "'",
                 peek().span);
        }
        return take();
    }
    std::int64_t expect_int(const std::string& what) {
        return expect(Tok::Int, what).int_value;
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at_kw("or")) {
            take();
            ExprPtr rhs = parse_and();
            lhs = std::make_shared<Expr>(Expr{lhs->span, Binary{BinOp::Or, lhs, rhs}});
        }
        return lhs;
    }
    ExprPtr parse_and() {
        ExprPtr lhs = parse_cmp();
        while (at_kw("and")) {
            take();
            ExprPtr rhs = parse_cmp();
            lhs = std::make_shared<Expr>(Expr{lhs->span, Binary{BinOp::And, lhs, rhs}});
        }
        return lhs;
    }
    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_xor();
        BinOp op;
        switch (peek().kind) {
            case Tok::Eq: op = BinOp::Eq; break;
            case Tok::Ne: op = BinOp::Ne; break;
            case Tok::Lt: op = BinOp::Lt; break;
            case Tok::Le: op = BinOp::Le; break;
            case Tok::Gt: op = BinOp::Gt; break;
            case Tok::Ge: op = BinOp::Ge; break;
            default: return lhs;
        }
        take();
        ExprPtr rhs = parse_xor();
        return std::make_shared<Expr>(Expr{lhs->span, Binary{op, lhs, rhs}});
    }
    ExprPtr parse_xor() {
        ExprPtr lhs = parse_add();
        while (at_kw("xor")) {
            take();
            ExprPtr rhs = parse_add();
            lhs = std::make_shared<Expr>(Expr{lhs->span, Binary{BinOp::Xor, lhs, rhs}});
        }
        return lhs;
    }
    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            const BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
            take();
            ExprPtr rhs = parse_mul();
            lhs = std::make_shared<Expr>(Expr{lhs->span, Binary{op, lhs, rhs}});
        }
        return lhs;
    }
    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        while (at(Tok::Star) || at_kw("div") || at_kw("mod")) {
            const BinOp op =
                at(Tok::Star) ? BinOp::Mul : (at_kw("div") ? BinOp::Div : BinOp::Mod);
            take();
            ExprPtr rhs = parse_unary();
            lhs = std::make_shared<Expr>(Expr{lhs->span, Binary{op, lhs, rhs}});
        }
        return lhs;
    }
    ExprPtr parse_unary() {
        if (at_kw("not")) {
            const Token t = take();
            return std::make_shared<Expr>(Expr{t.span, Unary{UnOp::Not, parse_unary()}});
        }
        if (at(Tok::Minus)) {
            const Token t = take();
            return std::make_shared<Expr>(Expr{t.span, Unary{UnOp::Neg, parse_unary()}});
        }
        return parse_atom();
    }

    ExprPtr parse_atom() {
        const Token t = peek();
        if (t.kind == Tok::Int) {
            take();
            return std::make_shared<Expr>(Expr{t.span, IntLit{t.int_value}});
        }
        if (t.kind == Tok::LParen) {
            take();
            ExprPtr inner = parse_expr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (t.kind == Tok::Ident) {
            if (t.text == "popcount") {
                take();
                expect(Tok::LParen, "'('");
                ExprPtr arg = parse_expr();
                expect(Tok::RParen, "')'");
                return std::make_shared<Expr>(Expr{t.span, Popcount{arg}});
            }
            if (t.text == "bit") {
                take();
                expect(Tok::LParen, "'('");
                ExprPtr var = parse_expr();
                expect(Tok::Comma, "','");
                ExprPtr index = parse_expr();
                expect(Tok::RParen, "')'");
                return std::make_shared<Expr>(Expr{t.span, BitOf{var, index}});
            }
            if (t.text == "sum") {
                take();
                const Token binder = expect(Tok::Ident, "a binder name");
                expect_kw("in");
                const std::int64_t lo = expect_int("an integer bound");
                expect(Tok::DotDot, "'..'");
                const std::int64_t hi = expect_int("an integer bound");
                expect(Tok::Colon, "':'");
                ExprPtr body = parse_expr();
                return std::make_shared<Expr>(Expr{t.span, SumExpr{binder.text, lo, hi, body}});
            }
            return parse_var_or_binder();
        }
        fail("syntax", "expected an expression but found '" + t.text + "'", t.span);
    }

    ExprPtr parse_var_or_binder() {
        const Token t = expect(Tok::Ident, "a name");
        const bool is_x = t.text == "x";
        const bool is_y = t.text == "y";
        if ((is_x || is_y) && at(Tok::LBracket)) {
            take();
            ExprPtr index = parse_expr();
            expect(Tok::RBracket, "']'");
            bool primed = false;
            if (at(Tok::Prime)) {
                take();
                primed = true;
            }
            return std::make_shared<Expr>(Expr{t.span, VarRef{is_y, primed, index}});
        }
        if ((t.text[0] == 'x' || t.text[0] == 'y') && t.text.size() > 1 &&
            std::all_of(t.text.begin() + 1, t.text.end(),
                        [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
            const std::int64_t index = std::stoll(t.text.substr(1));
            bool primed = false;
            if (at(Tok::Prime)) {
                take();
                primed = true;
            }
            auto lit = std::make_shared<Expr>(Expr{t.span, IntLit{index}});
            return std::make_shared<Expr>(Expr{t.span, VarRef{t.text[0] == 'y', primed, lit}});
        }
        return std::make_shared<Expr>(Expr{t.span, BinderRef{t.text}});
    }
};

// ---------------------------------------------------------------------------
// Type checking
// ---------------------------------------------------------------------------

enum class Type { Int, Bool };

struct CheckContext {
    int players = 0;
    bool outputs_allowed = false;
    int restrict_to_player = -1; // strategy guards: only this player's input
    std::vector<std::pair<std::string, std::pair<std::int64_t, std::int64_t>>> binders;
};

bool is_literal_01(const ExprPtr& e) {
    const auto* lit = std::get_if<IntLit>(&e->node);
    return lit != nullptr && (lit->value == 0 || lit->value == 1);
}

Type check(const ExprPtr& e, CheckContext& ctx);

// Booleans are 0/1 values; an integer is accepted in boolean position only
// when it is the literal 0 or 1.
void check_bool(const ExprPtr& e, CheckContext& ctx, const std::string& where) {
    if (is_literal_01(e)) return;
    if (check(e, ctx) == Type::Bool) return;
    fail("type", "expected a boolean " + where, e->span);
}

void check_int(const ExprPtr& e, CheckContext& ctx) {
    check(e, ctx); // booleans count as 0/1 in integer positions
}

Type check(const ExprPtr& e, CheckContext& ctx) {
    return std::visit(
        [&](const auto& node) -> Type {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                return Type::Int;
            } else if constexpr (std::is_same_v<T, VarRef>) {
                if (node.output) {
                    if (!ctx.outputs_allowed) {
                        fail("type",
                             "output variables may appear only in the winning condition",
                             e->span);
                    }
                    if (!node.primed) {
                        fail("type", "output variables are written primed (y0')", e->span);
                    }
                } else if (node.primed) {
                    fail("type", "input variables are not primed", e->span);
                }
                check_int(node.index, ctx);
                if (const auto* lit = std::get_if<IntLit>(&node.index->node)) {
                    if (lit->value < 0 || lit->value >= ctx.players) {
                        fail("semantic",
                             "player index " + std::to_string(lit->value) +
                                 " out of range for " + std::to_string(ctx.players) +
                                 " players",
                             e->span);
                    }
                    if (ctx.restrict_to_player >= 0 &&
                        (node.output || lit->value != ctx.restrict_to_player)) {
                        fail("semantic",
                             "a guard may refer only to the player's own input (x" +
                                 std::to_string(ctx.restrict_to_player) + ")",
                             e->span);
                    }
                } else if (ctx.restrict_to_player >= 0) {
                    fail("semantic", "guards use a fixed player index", e->span);
                } else if (const auto* binder = std::get_if<BinderRef>(&node.index->node)) {
                    for (const auto& [name, range] : ctx.binders) {
                        if (name == binder->name &&
                            (range.first < 0 || range.second > ctx.players)) {
                            fail("semantic", "binder range exceeds the player count", e->span);
                        }
                    }
                }
                return Type::Int;
            } else if constexpr (std::is_same_v<T, BinderRef>) {
                for (const auto& [name, range] : ctx.binders) {
                    if (name == node.name) return Type::Int;
                }
                fail("type", "unknown name '" + node.name + "'", e->span);
            } else if constexpr (std::is_same_v<T, Unary>) {
                if (node.op == UnOp::Not) {
                    check_bool(node.operand, ctx, "after 'not'");
                    return Type::Bool;
                }
                check_int(node.operand, ctx);
                return Type::Int;
            } else if constexpr (std::is_same_v<T, Binary>) {
                switch (node.op) {
                    case BinOp::And:
                    case BinOp::Or:
                        check_bool(node.lhs, ctx, "operand");
                        check_bool(node.rhs, ctx, "operand");
                        return Type::Bool;
                    case BinOp::Eq:
                    case BinOp::Ne:
                    case BinOp::Lt:
                    case BinOp::Le:
                    case BinOp::Gt:
                    case BinOp::Ge:
                        check_int(node.lhs, ctx);
                        check_int(node.rhs, ctx);
                        return Type::Bool;
                    default:
                        check_int(node.lhs, ctx);
                        check_int(node.rhs, ctx);
                        return Type::Int;
                }
            } else if constexpr (std::is_same_v<T, Popcount>) {
                check_int(node.operand, ctx);
                return Type::Int;
            } else if constexpr (std::is_same_v<T, BitOf>) {
                if (!std::holds_alternative<VarRef>(node.var->node)) {
                    fail("type", "bit() takes a variable reference first", node.var->span);
                }
                check(node.var, ctx);
                check_int(node.index, ctx);
                return Type::Int;
            } else if constexpr (std::is_same_v<T, SumExpr>) {
                if (node.lo > node.hi) fail("semantic", "empty sum range", e->span);
                ctx.binders.push_back({node.binder, {node.lo, node.hi}});
                check_int(node.body, ctx);
                ctx.binders.pop_back();
                return Type::Int;
            }
        },
        e->node);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct EvalEnv {
    std::span<const std::int64_t> inputs;
    std::span<const std::int64_t> outputs; // empty when evaluating a promise
    int input_bits = 0;
    int output_bits = 0;
    std::vector<std::pair<std::string, std::int64_t>> binders;
};

std::int64_t eval(const ExprPtr& e, EvalEnv& env) {
    return std::visit(
        [&](const auto& node) -> std::int64_t {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                return node.value;
            } else if constexpr (std::is_same_v<T, VarRef>) {
                const std::int64_t idx = eval(node.index, env);
                const auto& bank = node.output ? env.outputs : env.inputs;
                if (idx < 0 || idx >= static_cast<std::int64_t>(bank.size())) {
                    throw EvaluationError("player index " + std::to_string(idx) +
                                          " out of range");
                }
                return bank[static_cast<std::size_t>(idx)];
            } else if constexpr (std::is_same_v<T, BinderRef>) {
                for (auto it = env.binders.rbegin(); it != env.binders.rend(); ++it) {
                    if (it->first == node.name) return it->second;
                }
                throw EvaluationError("unbound name " + node.name);
            } else if constexpr (std::is_same_v<T, Unary>) {
                const std::int64_t v = eval(node.operand, env);
                return node.op == UnOp::Not ? (v == 0 ? 1 : 0) : -v;
            } else if constexpr (std::is_same_v<T, Binary>) {
                const std::int64_t a = eval(node.lhs, env);
                const std::int64_t b = eval(node.rhs, env);
                switch (node.op) {
                    case BinOp::Mul: return a * b;
                    case BinOp::Div:
                        if (b == 0) throw EvaluationError("division by zero");
                        return a / b;
                    case BinOp::Mod:
                        if (b == 0) throw EvaluationError("modulo by zero");
                        return ((a % b) + b) % b;
                    case BinOp::Add: return a + b;
                    case BinOp::Sub: return a - b;
                    case BinOp::Xor: return a ^ b;
                    case BinOp::Eq: return a == b;
                    case BinOp::Ne: return a != b;
                    case BinOp::Lt: return a < b;
                    case BinOp::Le: return a <= b;
                    case BinOp::Gt: return a > b;
                    case BinOp::Ge: return a >= b;
                    case BinOp::And: return (a != 0 && b != 0) ? 1 : 0;
                    case BinOp::Or: return (a != 0 || b != 0) ? 1 : 0;
                }
                return 0;
            } else if constexpr (std::is_same_v<T, Popcount>) {
                const std::int64_t v = eval(node.operand, env);
                if (v < 0) throw EvaluationError("popcount of a negative value");
                return std::popcount(static_cast<std::uint64_t>(v));
            } else if constexpr (std::is_same_v<T, BitOf>) {
                const auto& var = std::get<VarRef>(node.var->node);
                const std::int64_t value = eval(node.var, env);
                const int width = var.output ? env.output_bits : env.input_bits;
                const std::int64_t pos = eval(node.index, env);
                if (pos < 0 || pos >= width) {
                    throw EvaluationError("bit position " + std::to_string(pos) +
                                          " outside width " + std::to_string(width));
                }
                return bit_at(static_cast<std::uint64_t>(value), static_cast<int>(pos), width);
            } else if constexpr (std::is_same_v<T, SumExpr>) {
                std::int64_t total = 0;
                env.binders.push_back({node.binder, 0});
                for (std::int64_t v = node.lo; v < node.hi; ++v) {
                    env.binders.back().second = v;
                    total += eval(node.body, env);
                }
                env.binders.pop_back();
                return total;
            }
        },
        e->node);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

const char* op_text(BinOp op) {
    switch (op) {
        case BinOp::Mul: return "*";
        case BinOp::Div: return "div";
        case BinOp::Mod: return "mod";
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Xor: return "xor";
        case BinOp::Eq: return "=";
        case BinOp::Ne: return "!=";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::And: return "and";
        case BinOp::Or: return "or";
    }
    return "?";
}

void print_expr(std::ostream& os, const ExprPtr& e) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                os << node.value;
            } else if constexpr (std::is_same_v<T, VarRef>) {
                os << (node.output ? 'y' : 'x');
                if (const auto* lit = std::get_if<IntLit>(&node.index->node)) {
                    os << lit->value;
                } else {
                    os << '[';
                    print_expr(os, node.index);
                    os << ']';
                }
                if (node.primed) os << '\'';
            } else if constexpr (std::is_same_v<T, BinderRef>) {
                os << node.name;
            } else if constexpr (std::is_same_v<T, Unary>) {
                os << '(' << (node.op == UnOp::Not ? "not " : "-");
                print_expr(os, node.operand);
                os << ')';
            } else if constexpr (std::is_same_v<T, Binary>) {
                os << '(';
                print_expr(os, node.lhs);
                os << ' ' << op_text(node.op) << ' ';
                print_expr(os, node.rhs);
                os << ')';
            } else if constexpr (std::is_same_v<T, Popcount>) {
                os << "popcount(";
                print_expr(os, node.operand);
                os << ')';
            } else if constexpr (std::is_same_v<T, BitOf>) {
                os << "bit(";
                print_expr(os, node.var);
                os << ", ";
                print_expr(os, node.index);
                os << ')';
            } else if constexpr (std::is_same_v<T, SumExpr>) {
                os << "(sum " << node.binder << " in " << node.lo << ".." << node.hi << " : ";
                print_expr(os, node.body);
                os << ')';
            }
        },
        e->node);
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->node.index() != b->node.index()) return false;
    if (const auto* la = std::get_if<IntLit>(&a->node)) {
        return la->value == std::get<IntLit>(b->node).value;
    }
    if (const auto* va = std::get_if<VarRef>(&a->node)) {
        const auto& vb = std::get<VarRef>(b->node);
        return va->output == vb.output && va->primed == vb.primed &&
               expr_equal(va->index, vb.index);
    }
    if (const auto* ba = std::get_if<BinderRef>(&a->node)) {
        return ba->name == std::get<BinderRef>(b->node).name;
    }
    if (const auto* ua = std::get_if<Unary>(&a->node)) {
        const auto& ub = std::get<Unary>(b->node);
        return ua->op == ub.op && expr_equal(ua->operand, ub.operand);
    }
    if (const auto* xa = std::get_if<Binary>(&a->node)) {
        const auto& xb = std::get<Binary>(b->node);
        return xa->op == xb.op && expr_equal(xa->lhs, xb.lhs) && expr_equal(xa->rhs, xb.rhs);
    }
    if (const auto* pa = std::get_if<Popcount>(&a->node)) {
        return expr_equal(pa->operand, std::get<Popcount>(b->node).operand);
    }
    if (const auto* ta = std::get_if<BitOf>(&a->node)) {
        const auto& tb = std::get<BitOf>(b->node);
        return expr_equal(ta->var, tb.var) && expr_equal(ta->index, tb.index);
    }
    if (const auto* sa = std::get_if<SumExpr>(&a->node)) {
        const auto& sb = std::get<SumExpr>(b->node);
        return sa->binder == sb.binder && sa->lo == sb.lo && sa->hi == sb.hi &&
               expr_equal(sa->body, sb.body);
    }
    return false;
}

} // namespace

// ---------------------------------------------------------------------------
// Game files
// ---------------------------------------------------------------------------

GameAst parse_game(std::string_view text) {
    Parser p{lex(text)};
    GameAst ast;
    ast.span = p.peek().span;
    p.expect_kw("game");
    ast.name = p.expect(Tok::Ident, "a game name").text;
    p.expect(Tok::LBrace, "'{'");
    p.expect_kw("players");
    ast.players = static_cast<int>(p.expect_int("the player count"));
    p.expect(Tok::Semi, "';'");
    p.expect_kw("input");
    p.expect_kw("bits");
    ast.input_bits = static_cast<int>(p.expect_int("an input width"));
    p.expect(Tok::Semi, "';'");
    p.expect_kw("output");
    p.expect_kw("bits");
    ast.output_bits = static_cast<int>(p.expect_int("an output width"));
    p.expect(Tok::Semi, "';'");
    p.expect_kw("promise");
    p.expect(Tok::Colon, "':'");
    ast.promise = p.parse_expr();
    p.expect(Tok::Semi, "';'");
    p.expect_kw("win");
    p.expect(Tok::Colon, "':'");
    ast.win = p.parse_expr();
    p.expect(Tok::Semi, "';'");
    p.expect(Tok::RBrace, "'}'");
    p.expect(Tok::Eof, "end of file");
    return ast;
}

games::GameSpec compile_game(const GameAst& ast) {
    if (ast.players < 1 || ast.players > 10) {
        fail("semantic", "player count outside 1..10", ast.span);
    }
    if (ast.input_bits < 0 || ast.input_bits > 16) {
        fail("semantic", "input width outside 0..16", ast.span);
    }
    if (ast.output_bits < 0 || ast.output_bits > 16) {
        fail("semantic", "output width outside 0..16", ast.span);
    }
    CheckContext promise_ctx{ast.players, /*outputs_allowed=*/false, -1, {}};
    check_bool(ast.promise, promise_ctx, "promise");
    CheckContext win_ctx{ast.players, /*outputs_allowed=*/true, -1, {}};
    check_bool(ast.win, win_ctx, "winning condition");

    const int players = ast.players;
    const int in_bits = ast.input_bits;
    const int out_bits = ast.output_bits;
    const ExprPtr promise_expr = ast.promise;
    const ExprPtr win_expr = ast.win;
    auto promise = [promise_expr, in_bits](std::span<const std::int64_t> inputs) {
        EvalEnv env{inputs, {}, in_bits, 0, {}};
        return eval(promise_expr, env) != 0;
    };
    auto winning = [win_expr, in_bits, out_bits](std::span<const std::int64_t> inputs,
                                                 std::span<const std::int64_t> outputs) {
        EvalEnv env{inputs, outputs, in_bits, out_bits, {}};
        return eval(win_expr, env) != 0;
    };
    try {
        return games::GameSpec(ast.name, std::vector<int>(players, in_bits),
                               std::vector<int>(players, out_bits), promise, winning);
    } catch (const DomainError& e) {
        fail("semantic", e.what(), ast.promise->span);
    }
}

std::string print_game(const GameAst& ast) {
    std::ostringstream os;
    os << "game " << ast.name << " {\n";
    os << "  players " << ast.players << ";\n";
    os << "  input bits " << ast.input_bits << ";\n";
    os << "  output bits " << ast.output_bits << ";\n";
    os << "  promise: ";
    print_expr(os, ast.promise);
    os << ";\n";
    os << "  win: ";
    print_expr(os, ast.win);
    os << ";\n}\n";
    return os.str();
}

bool equal(const GameAst& a, const GameAst& b) {
    return a.name == b.name && a.players == b.players && a.input_bits == b.input_bits &&
           a.output_bits == b.output_bits && expr_equal(a.promise, b.promise) &&
           expr_equal(a.win, b.win);
}

// ---------------------------------------------------------------------------
// Strategy files
// ---------------------------------------------------------------------------

namespace {

int expect_player_var(Parser& p, char which) {
    const Token t = p.expect(Tok::Ident, std::string(which == 'x' ? "an input" : "an output") +
                                             " variable");
    if (t.text.size() < 2 || t.text[0] != which ||
        !std::all_of(t.text.begin() + 1, t.text.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        fail("syntax",
             std::string("expected a variable like ") + which + "0 but found '" + t.text + "'",
             t.span);
    }
    return static_cast<int>(std::stoll(t.text.substr(1)));
}

Angle parse_angle(Parser& p) {
    Angle angle;
    if (p.at(Tok::Int) && p.peek().int_value == 0) {
        p.take();
        angle.zero = true;
        return angle;
    }
    p.expect_kw("pi");
    if (p.at(Tok::Star)) {
        p.take();
        if (p.at(Tok::Int)) {
            angle.literal_numerator = p.take().int_value;
        } else {
            angle.input_numerator = true;
            angle.input_player = expect_player_var(p, 'x');
        }
    }
    if (p.at(Tok::Slash)) {
        p.take();
        const Token d = p.expect(Tok::Int, "a denominator");
        if (d.int_value <= 0) fail("semantic", "denominator must be positive", d.span);
        angle.denominator = d.int_value;
    }
    return angle;
}

StateVector ghz_state(int n) {
    const double inv = 1.0 / std::sqrt(2.0);
    std::vector<Amplitude> amps(dim_of(n), Amplitude{0.0, 0.0});
    amps.front() = {inv, 0.0};
    amps.back() = {inv, 0.0};
    return StateVector(n, std::move(amps));
}

} // namespace

StrategyAst parse_strategy(std::string_view text) {
    Parser p{lex(text)};
    StrategyAst ast;
    ast.span = p.peek().span;
    p.expect_kw("strategy");
    ast.name = p.expect(Tok::Ident, "a strategy name").text;
    p.expect(Tok::LBrace, "'{'");
    p.expect_kw("shared");
    p.expect(Tok::Colon, "':'");
    ast.prep_span = p.peek().span;
    if (p.at_kw("ghz")) {
        p.take();
        p.expect(Tok::LParen, "'('");
        ast.prep = PrepGhz{static_cast<int>(p.expect_int("a qubit count"))};
        p.expect(Tok::RParen, "')'");
    } else if (p.at_kw("pairsum")) {
        p.take();
        p.expect(Tok::LParen, "'('");
        ast.prep = PrepPairsum{static_cast<int>(p.expect_int("a register size"))};
        p.expect(Tok::RParen, "')'");
    } else if (p.at_kw("amps")) {
        p.take();
        p.expect(Tok::LBracket, "'['");
        PrepAmps amps;
        while (true) {
            double sign = 1.0;
            if (p.at(Tok::Minus)) {
                p.take();
                sign = -1.0;
            }
            if (p.at(Tok::Float)) {
                amps.values.push_back(sign * p.take().float_value);
            } else if (p.at(Tok::Int)) {
                amps.values.push_back(sign * static_cast<double>(p.take().int_value));
            } else {
                fail("syntax", "expected an amplitude", p.peek().span);
            }
            if (p.at(Tok::Comma)) {
                p.take();
                continue;
            }
            break;
        }
        p.expect(Tok::RBracket, "']'");
        ast.prep = std::move(amps);
    } else {
        fail("syntax", "expected ghz(...), pairsum(...) or amps[...]", p.peek().span);
    }
    p.expect(Tok::Semi, "';'");

    while (p.at_kw("player")) {
        PlayerBlock block;
        block.span = p.peek().span;
        p.take();
        block.player = static_cast<int>(p.expect_int("a player index"));
        p.expect(Tok::LBrace, "'{'");
        while (!p.at(Tok::RBrace)) {
            StrategyStmt stmt;
            stmt.span = p.peek().span;
            if (p.at_kw("phase")) {
                p.take();
                p.expect(Tok::LParen, "'('");
                StmtPhase phase;
                phase.angle = parse_angle(p);
                p.expect(Tok::RParen, "')'");
                if (p.at_kw("if")) {
                    p.take();
                    phase.guard = p.parse_expr();
                }
                stmt.node = std::move(phase);
            } else if (p.at_kw("oracle_dj")) {
                p.take();
                p.expect(Tok::LParen, "'('");
                stmt.node = StmtOracleDj{expect_player_var(p, 'x')};
                p.expect(Tok::RParen, "')'");
            } else if (p.at_kw("H")) {
                p.take();
                stmt.node = StmtHadamard{};
            } else if (p.at_kw("measure")) {
                p.take();
                p.expect(Tok::Arrow, "'->'");
                stmt.node = StmtMeasure{expect_player_var(p, 'y')};
            } else {
                fail("syntax", "expected phase, oracle_dj, H or measure", p.peek().span);
            }
            p.expect(Tok::Semi, "';'");
            block.stmts.push_back(std::move(stmt));
        }
        p.expect(Tok::RBrace, "'}'");
        ast.players.push_back(std::move(block));
    }
    p.expect(Tok::RBrace, "'}'");
    p.expect(Tok::Eof, "end of file");
    return ast;
}

games::QuantumStrategy compile_strategy(const StrategyAst& ast, const games::GameSpec& game) {
    games::QuantumStrategy strategy{0, {}, basis_state(0, 1), {}, {}};
    if (const auto* ghz = std::get_if<PrepGhz>(&ast.prep)) {
        if (ghz->n != game.n_players) {
            fail("semantic",
                 "ghz(" + std::to_string(ghz->n) + ") does not match " +
                     std::to_string(game.n_players) + " players",
                 ast.prep_span);
        }
        if (ghz->n < 1 || ghz->n > kMaxQubits) {
            fail("semantic", "ghz register size out of range", ast.prep_span);
        }
        strategy.total_qubits = ghz->n;
        strategy.initial = ghz_state(ghz->n);
    } else if (const auto* ps = std::get_if<PrepPairsum>(&ast.prep)) {
        if (game.n_players != 2) {
            fail("semantic", "pairsum(...) needs exactly two players", ast.prep_span);
        }
        if (ps->k < 1 || 2 * ps->k > kMaxQubits) {
            fail("semantic", "pairsum register size out of range", ast.prep_span);
        }
        strategy.total_qubits = 2 * ps->k;
        strategy.initial = basis_state(0, 2 * ps->k);
        strategy.prep_ops = {tensor_op(hadamard_n(ps->k), identity(ps->k)), fanout(ps->k)};
    } else {
        const auto& amps = std::get<PrepAmps>(ast.prep);
        int n = 0;
        while ((std::size_t{1} << n) < amps.values.size() && n <= kMaxQubits) ++n;
        if ((std::size_t{1} << n) != amps.values.size() || n < 1 || n > kMaxQubits) {
            fail("semantic", "amplitude list length must be a power of two", ast.prep_span);
        }
        std::vector<Amplitude> values;
        for (double v : amps.values) values.push_back({v, 0.0});
        try {
            strategy.initial = StateVector(n, std::move(values));
        } catch (const DomainError& e) {
            fail("semantic", e.what(), ast.prep_span); // norm or finiteness
        }
        strategy.total_qubits = n;
    }
    if (strategy.total_qubits % game.n_players != 0) {
        fail("semantic", "qubits do not split evenly between the players", ast.prep_span);
    }
    const int width = strategy.total_qubits / game.n_players;
    for (int i = 0; i < game.n_players; ++i) {
        strategy.partition.emplace_back(i * width, (i + 1) * width);
        if (game.output_bits[i] != width) {
            fail("semantic",
                 "each player measures " + std::to_string(width) +
                     " qubits but the game expects " + std::to_string(game.output_bits[i]) +
                     " output bits",
                 ast.prep_span);
        }
    }

    std::vector<const PlayerBlock*> blocks(game.n_players, nullptr);
    for (const auto& block : ast.players) {
        if (block.player < 0 || block.player >= game.n_players) {
            fail("semantic", "player index out of range", block.span);
        }
        if (blocks[block.player] != nullptr) {
            fail("semantic", "player " + std::to_string(block.player) + " defined twice",
                 block.span);
        }
        blocks[block.player] = &block;
    }
    for (int i = 0; i < game.n_players; ++i) {
        if (blocks[i] == nullptr) {
            fail("semantic", "player " + std::to_string(i) + " has no program", ast.span);
        }
    }

    strategy.players.resize(game.n_players);
    for (int i = 0; i < game.n_players; ++i) {
        const PlayerBlock& block = *blocks[i];
        bool measured = false;
        for (const auto& stmt : block.stmts) {
            if (measured) fail("semantic", "statements after the measurement", stmt.span);
            if (const auto* phase = std::get_if<StmtPhase>(&stmt.node)) {
                if (width != 1) fail("semantic", "phase() acts on a single qubit", stmt.span);
                const Angle angle = phase->angle;
                if (angle.input_numerator && angle.input_player != i) {
                    fail("semantic", "a player may use only its own input in phase()",
                         stmt.span);
                }
                std::function<bool(std::int64_t)> guard;
                if (phase->guard) {
                    CheckContext ctx{game.n_players, /*outputs_allowed=*/false, i, {}};
                    check_bool(phase->guard, ctx, "guard");
                    const ExprPtr guard_expr = phase->guard;
                    const int players = game.n_players;
                    const int in_bits = game.input_bits[i];
                    const int player = i;
                    guard = [guard_expr, players, player, in_bits](std::int64_t x) {
                        std::vector<std::int64_t> inputs(players, 0);
                        inputs[player] = x;
                        EvalEnv env{inputs, {}, in_bits, 0, {}};
                        return eval(guard_expr, env) != 0;
                    };
                }
                strategy.players[i].steps.push_back([angle, guard](std::int64_t x) {
                    if (guard && !guard(x)) return identity(1);
                    if (angle.zero) return phase_gate(0.0);
                    const double numerator =
                        angle.input_numerator ? static_cast<double>(x)
                                              : static_cast<double>(angle.literal_numerator);
                    return phase_gate(M_PI * numerator /
                                      static_cast<double>(angle.denominator));
                });
            } else if (const auto* oracle = std::get_if<StmtOracleDj>(&stmt.node)) {
                if (oracle->input_player != i) {
                    fail("semantic", "a player may use only its own input in oracle_dj()",
                         stmt.span);
                }
                if (game.input_bits[i] != (1 << width)) {
                    fail("semantic",
                         "oracle_dj needs input bits = 2^(qubits per player); got " +
                             std::to_string(game.input_bits[i]) + " bits for " +
                             std::to_string(width) + " qubits",
                         stmt.span);
                }
                const int m = game.input_bits[i];
                const int w = width;
                strategy.players[i].steps.push_back([m, w](std::int64_t x) {
                    return dj_oracle(games::bitstring_of(static_cast<std::uint64_t>(x), m), w);
                });
            } else if (std::holds_alternative<StmtHadamard>(stmt.node)) {
                const int w = width;
                strategy.players[i].steps.push_back([w](std::int64_t) { return hadamard_n(w); });
            } else {
                const auto& measure = std::get<StmtMeasure>(stmt.node);
                if (measure.output_player != i) {
                    fail("semantic", "a player measures into its own output variable",
                         stmt.span);
                }
                measured = true;
            }
        }
        if (!measured) {
            fail("semantic", "player " + std::to_string(i) + " never measures", block.span);
        }
    }
    return strategy;
}

std::string print_strategy(const StrategyAst& ast) {
    std::ostringstream os;
    os << "strategy " << ast.name << " {\n  shared: ";
    if (const auto* ghz = std::get_if<PrepGhz>(&ast.prep)) {
        os << "ghz(" << ghz->n << ")";
    } else if (const auto* ps = std::get_if<PrepPairsum>(&ast.prep)) {
        os << "pairsum(" << ps->k << ")";
    } else {
        const auto& amps = std::get<PrepAmps>(ast.prep);
        os << "amps[";
        for (std::size_t i = 0; i < amps.values.size(); ++i) {
            if (i > 0) os << ", ";
            std::ostringstream v;
            v.precision(17);
            v << amps.values[i];
            os << v.str();
        }
        os << "]";
    }
    os << ";\n";
    for (const auto& block : ast.players) {
        os << "  player " << block.player << " {\n";
        for (const auto& stmt : block.stmts) {
            os << "    ";
            if (const auto* phase = std::get_if<StmtPhase>(&stmt.node)) {
                os << "phase(";
                const Angle& a = phase->angle;
                if (a.zero) {
                    os << "0";
                } else {
                    os << "pi";
                    if (a.input_numerator) {
                        os << "*x" << a.input_player;
                    } else if (a.literal_numerator != 1) {
                        os << "*" << a.literal_numerator;
                    }
                    if (a.denominator != 1) os << "/" << a.denominator;
                }
                os << ")";
                if (phase->guard) {
                    os << " if ";
                    print_expr(os, phase->guard);
                }
            } else if (const auto* oracle = std::get_if<StmtOracleDj>(&stmt.node)) {
                os << "oracle_dj(x" << oracle->input_player << ")";
            } else if (std::holds_alternative<StmtHadamard>(stmt.node)) {
                os << "H";
            } else {
                os << "measure -> y" << std::get<StmtMeasure>(stmt.node).output_player;
            }
            os << ";\n";
        }
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

bool equal(const StrategyAst& a, const StrategyAst& b) {
    if (a.name != b.name || a.players.size() != b.players.size()) return false;
    if (a.prep.index() != b.prep.index()) return false;
    if (const auto* ga = std::get_if<PrepGhz>(&a.prep)) {
        if (ga->n != std::get<PrepGhz>(b.prep).n) return false;
    } else if (const auto* pa = std::get_if<PrepPairsum>(&a.prep)) {
        if (pa->k != std::get<PrepPairsum>(b.prep).k) return false;
    } else if (std::get<PrepAmps>(a.prep).values != std::get<PrepAmps>(b.prep).values) {
        return false;
    }
    for (std::size_t i = 0; i < a.players.size(); ++i) {
        const auto& pa = a.players[i];
        const auto& pb = b.players[i];
        if (pa.player != pb.player || pa.stmts.size() != pb.stmts.size()) return false;
        for (std::size_t j = 0; j < pa.stmts.size(); ++j) {
            const auto& sa = pa.stmts[j];
            const auto& sb = pb.stmts[j];
            if (sa.node.index() != sb.node.index()) return false;
            if (const auto* fa = std::get_if<StmtPhase>(&sa.node)) {
                const auto& fb = std::get<StmtPhase>(sb.node);
                const Angle& x = fa->angle;
                const Angle& y = fb.angle;
                if (x.zero != y.zero || x.input_numerator != y.input_numerator ||
                    x.input_player != y.input_player ||
                    x.literal_numerator != y.literal_numerator ||
                    x.denominator != y.denominator) {
                    return false;
                }
                if ((fa->guard == nullptr) != (fb.guard == nullptr)) return false;
                if (fa->guard && !expr_equal(fa->guard, fb.guard)) return false;
            } else if (const auto* oa = std::get_if<StmtOracleDj>(&sa.node)) {
                if (oa->input_player != std::get<StmtOracleDj>(sb.node).input_player) {
                    return false;
                }
            } else if (const auto* ma = std::get_if<StmtMeasure>(&sa.node)) {
                if (ma->output_player != std::get<StmtMeasure>(sb.node).output_player) {
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace ptg::dsl
