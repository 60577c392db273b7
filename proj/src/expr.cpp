#include "dirflow/expr.hpp"

#include <cctype>
#include <sstream>

namespace dirflow {

ParseError::ParseError(std::string message, std::size_t position, std::string expected)
    : Error(message + " at position " + std::to_string(position) +
            (expected.empty() ? "" : " (expected " + expected + ")")),
      position_(position),
      expected_(std::move(expected)) {}

namespace {

enum class Tok { ident, number, lparen, rparen, comma, semicolon, pipe, pipe2,
                 arrow, at, plus, minus, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        std::size_t start = pos_;
        if (pos_ >= text_.size()) {
            current_ = {Tok::end, "", start};
            return;
        }
        char c = text_[pos_];
        auto single = [&](Tok k) {
            ++pos_;
            current_ = {k, std::string(1, c), start};
        };
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
                ++end;
            // `^tok` marks a sequence superscript; consume and ignore it.
            std::string word = text_.substr(pos_, end - pos_);
            pos_ = skip_superscript(end);
            current_ = {Tok::ident, word, start};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end])))
                ++end;
            std::string digits = text_.substr(pos_, end - pos_);
            pos_ = end;
            current_ = {Tok::number, digits, start};
            return;
        }
        switch (c) {
            case '(': single(Tok::lparen); return;
            case ')': single(Tok::rparen); return;
            case ',': single(Tok::comma); return;
            case ';': single(Tok::semicolon); return;
            case '@': single(Tok::at); return;
            case '+': single(Tok::plus); return;
            case '|':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '|') {
                    pos_ += 2;
                    current_ = {Tok::pipe2, "||", start};
                } else {
                    single(Tok::pipe);
                }
                return;
            case '-':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                    pos_ += 2;
                    current_ = {Tok::arrow, "->", start};
                } else {
                    single(Tok::minus);
                }
                return;
            default:
                throw ParseError("unexpected character '" + std::string(1, c) + "'", start, "");
        }
    }

    std::size_t skip_superscript(std::size_t pos) const {
        if (pos >= text_.size() || text_[pos] != '^') return pos;
        ++pos;
        std::size_t end = pos;
        while (end < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
            ++end;
        if (end == pos)
            throw ParseError("dangling '^'", pos - 1, "sequence superscript");
        return end;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    Token current_{Tok::end, "", 0};
};

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    MeasureExpr parse_expression() {
        MeasureExpr lhs = parse_measure();
        while (lex_.peek().kind == Tok::plus || lex_.peek().kind == Tok::minus) {
            char op = lex_.take().kind == Tok::plus ? '+' : '-';
            MeasureExpr rhs = parse_measure();
            lhs = MeasureExpr(BinaryExpr{op, std::make_shared<const MeasureExpr>(lhs),
                                         std::make_shared<const MeasureExpr>(rhs)});
        }
        expect(Tok::end, "end of expression");
        return lhs;
    }

private:
    Token expect(Tok kind, const std::string& what) {
        if (lex_.peek().kind != kind)
            throw ParseError("unexpected token \"" + describe(lex_.peek()) + "\"",
                             lex_.peek().pos, what);
        return lex_.take();
    }

    static std::string describe(const Token& t) {
        return t.kind == Tok::end ? "end of input" : t.text;
    }

    std::string parse_name() {
        return expect(Tok::ident, "signal name").text;
    }

    std::vector<std::string> parse_names() {
        std::vector<std::string> names{parse_name()};
        while (lex_.peek().kind == Tok::comma) {
            lex_.take();
            names.push_back(parse_name());
        }
        return names;
    }

    DelayAnnotation parse_delay() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::number) {
            return DelayAnnotation::steps(std::stoi(lex_.take().text));
        }
        if (t.kind == Tok::ident && t.text == "loop") {
            lex_.take();
            return DelayAnnotation::loop_delay();
        }
        throw ParseError("unexpected token \"" + describe(t) + "\"", t.pos,
                         "delay (integer or loop)");
    }

    MeasureExpr parse_measure() {
        Token head = expect(Tok::ident, "H or I");
        if (head.text == "H") return parse_entropy();
        if (head.text == "I") return parse_information();
        throw ParseError("unknown measure \"" + head.text + "\"", head.pos, "H or I");
    }

    MeasureExpr parse_entropy() {
        expect(Tok::lparen, "(");
        EntropyExpr node;
        node.vars = parse_names();
        if (lex_.peek().kind == Tok::pipe) {
            lex_.take();
            node.given = parse_names();
        }
        expect(Tok::rparen, ")");
        return MeasureExpr(std::move(node));
    }

    MeasureExpr parse_information() {
        expect(Tok::lparen, "(");
        std::vector<std::string> first = parse_names();

        if (lex_.peek().kind == Tok::semicolon) {
            lex_.take();
            MutualInfoExpr node;
            node.a = std::move(first);
            node.b = parse_names();
            if (lex_.peek().kind == Tok::pipe) {
                lex_.take();
                node.given = parse_names();
            }
            expect(Tok::rparen, ")");
            return MeasureExpr(std::move(node));
        }

        expect(Tok::arrow, "';' or '->'");
        DirectedExpr node;
        node.sources = std::move(first);
        node.dst = parse_name();
        if (lex_.peek().kind == Tok::at) {
            lex_.take();
            node.delay = parse_delay();
        }
        if (lex_.peek().kind == Tok::pipe2) {
            lex_.take();
            node.causal.push_back(parse_cond());
            while (lex_.peek().kind == Tok::comma) {
                lex_.take();
                node.causal.push_back(parse_cond());
            }
        }
        if (lex_.peek().kind == Tok::pipe) {
            lex_.take();
            node.full = parse_names();
        }
        expect(Tok::rparen, ")");
        return MeasureExpr(std::move(node));
    }

    CausalCond parse_cond() {
        CausalCond cond;
        cond.signal = parse_name();
        if (lex_.peek().kind == Tok::at) {
            lex_.take();
            cond.delay = parse_delay();
        }
        return cond;
    }

    Lexer lex_;
};

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j) out += ",";
        out += names[j];
    }
    return out;
}

std::string format_delay(const DelayAnnotation& d) {
    return d.loop ? "@loop" : "@" + std::to_string(d.value);
}

}  // namespace

bool structurally_equal(const MeasureExpr& a, const MeasureExpr& b) {
    const auto& na = a.node();
    const auto& nb = b.node();
    if (na.index() != nb.index()) return false;
    if (const auto* e = std::get_if<EntropyExpr>(&na))
        return *e == std::get<EntropyExpr>(nb);
    if (const auto* m = std::get_if<MutualInfoExpr>(&na))
        return *m == std::get<MutualInfoExpr>(nb);
    if (const auto* d = std::get_if<DirectedExpr>(&na))
        return *d == std::get<DirectedExpr>(nb);
    const auto& ba = std::get<BinaryExpr>(na);
    const auto& bb = std::get<BinaryExpr>(nb);
    return ba.op == bb.op && structurally_equal(*ba.lhs, *bb.lhs) &&
           structurally_equal(*ba.rhs, *bb.rhs);
}

MeasureExpr parse(const std::string& text) {
    Parser parser(text);
    return parser.parse_expression();
}

std::string format(const MeasureExpr& expr) {
    const auto& node = expr.node();
    if (const auto* e = std::get_if<EntropyExpr>(&node)) {
        std::string out = "H(" + join(e->vars);
        if (!e->given.empty()) out += " | " + join(e->given);
        return out + ")";
    }
    if (const auto* m = std::get_if<MutualInfoExpr>(&node)) {
        std::string out = "I(" + join(m->a) + " ; " + join(m->b);
        if (!m->given.empty()) out += " | " + join(m->given);
        return out + ")";
    }
    if (const auto* d = std::get_if<DirectedExpr>(&node)) {
        std::string out = "I(" + join(d->sources) + " -> " + d->dst;
        if (!d->delay.loop) out += " " + format_delay(d->delay);
        if (!d->causal.empty()) {
            out += " ||";
            for (std::size_t j = 0; j < d->causal.size(); ++j) {
                out += (j ? "," : " ") + d->causal[j].signal;
                const auto& delay = d->causal[j].delay;
                if (delay.loop || delay.value != 0) out += " " + format_delay(delay);
            }
        }
        if (!d->full.empty()) out += " | " + join(d->full);
        return out + ")";
    }
    const auto& b = std::get<BinaryExpr>(node);
    return format(*b.lhs) + " " + b.op + " " + format(*b.rhs);
}

namespace {

DelaySchedule resolve_delay(const DelayAnnotation& d, const TrajectoryDistribution& traj,
                            const std::string& src, const std::string& dst) {
    if (!d.loop) return DelaySchedule::constant(d.value, traj.horizon());
    return effective_delay(traj.spec(), src, dst);
}

}  // namespace

double evaluate(const MeasureExpr& expr, const TrajectoryDistribution& traj) {
    const auto& node = expr.node();
    if (const auto* e = std::get_if<EntropyExpr>(&node)) {
        VarSet vars, given;
        for (const auto& sig : e->vars) {
            if (!traj.table().has_variable({sig, 1})) throw Error("unknown signal " + sig);
            auto seq = traj.sequence(sig);
            vars.insert(seq.begin(), seq.end());
        }
        for (const auto& sig : e->given) {
            if (!traj.table().has_variable({sig, 1})) throw Error("unknown signal " + sig);
            auto seq = traj.sequence(sig);
            given.insert(seq.begin(), seq.end());
        }
        return traj.table().conditional_entropy(vars, given);
    }
    if (const auto* m = std::get_if<MutualInfoExpr>(&node))
        return seq_mutual_info(traj.table(), m->a, m->b, m->given);
    if (const auto* d = std::get_if<DirectedExpr>(&node)) {
        std::vector<SourceTerm> sources;
        for (const auto& sig : d->sources)
            sources.push_back({sig, resolve_delay(d->delay, traj, sig, d->dst)});
        std::vector<ConditioningTerm> conds;
        for (const auto& c : d->causal)
            conds.push_back(ConditioningTerm::causal(
                c.signal, resolve_delay(c.delay, traj, c.signal, d->dst)));
        for (const auto& sig : d->full) conds.push_back(ConditioningTerm::full(sig));
        return directed_info(traj.table(), d->dst, sources, conds);
    }
    const auto& b = std::get<BinaryExpr>(node);
    double lhs = evaluate(*b.lhs, traj);
    double rhs = evaluate(*b.rhs, traj);
    return b.op == '+' ? lhs + rhs : lhs - rhs;
}

}  // namespace dirflow
