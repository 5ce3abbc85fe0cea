#include "astsum/minilang.hpp"

#include <cctype>

namespace astsum {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_keyword(std::string_view s) {
    return s == "fn" || s == "return" || s == "if" || s == "else" || s == "while";
}

constexpr std::string_view kPunctChars = "(){},;=+-*/";

}  // namespace

std::vector<MiniToken> tokenize_minilang(std::string_view source) {
    std::vector<MiniToken> tokens;
    int line = 1, col = 1;
    size_t i = 0;
    while (i < source.size()) {
        char c = source[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++col;
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < source.size() && source[i] != '\n') ++i;
            continue;
        }
        if (is_ident_start(c)) {
            size_t start = i;
            int start_col = col;
            while (i < source.size() && is_ident_char(source[i])) {
                ++i;
                ++col;
            }
            std::string lex(source.substr(start, i - start));
            tokens.push_back({is_keyword(lex) ? TokenKind::Keyword : TokenKind::Ident,
                              std::move(lex), line, start_col});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = i;
            int start_col = col;
            while (i < source.size() && std::isdigit(static_cast<unsigned char>(source[i]))) {
                ++i;
                ++col;
            }
            tokens.push_back({TokenKind::Number, std::string(source.substr(start, i - start)),
                              line, start_col});
            continue;
        }
        if (kPunctChars.find(c) != std::string_view::npos) {
            tokens.push_back({TokenKind::Punct, std::string(1, c), line, col});
            ++i;
            ++col;
            continue;
        }
        throw LexError(std::string("unexpected character '") + c + "'", line, col);
    }
    return tokens;
}

namespace {

// Builds nodes in creation order, then renumbers to preorder at the end:
// left-associative expression folding creates a BinOp after its operands,
// so creation order alone is not preorder.
class Parser {
public:
    explicit Parser(const std::vector<MiniToken>& tokens) : tokens_(tokens) {}

    // A single function parses to its FunctionDef as root; a multi-function
    // program gets a synthetic Program root so the result stays one tree.
    Ast parse_program() {
        if (tokens_.empty()) throw ParseError("empty program; expected 'fn'", 1, 1);
        if (count_funcdefs() > 1) {
            int root = new_node("Program", std::nullopt, -1);
            while (!at_end()) parse_funcdef(root);
        } else {
            parse_funcdef(-1);
            if (!at_end()) {
                const MiniToken& t = peek();
                throw ParseError("expected end of input, got '" + t.lexeme + "'", t.line, t.col);
            }
        }
        Ast raw;
        raw.nodes = std::move(nodes_);
        return renumber_preorder(raw);
    }

private:
    const std::vector<MiniToken>& tokens_;
    size_t pos_ = 0;
    std::vector<AstNode> nodes_;

    bool at_end() const { return pos_ >= tokens_.size(); }

    const MiniToken& peek() const {
        if (at_end()) {
            static MiniToken eof{TokenKind::Punct, "<eof>", 0, 0};
            return eof;
        }
        return tokens_[pos_];
    }

    bool peek_is_keyword(std::string_view kw) const {
        return !at_end() && peek().kind == TokenKind::Keyword && peek().lexeme == kw;
    }

    bool peek_is_punct(std::string_view p) const {
        return !at_end() && peek().kind == TokenKind::Punct && peek().lexeme == p;
    }

    int count_funcdefs() const {
        // Cheap lookahead: count "fn" keywords at statement depth 0.
        int depth = 0, count = 0;
        for (const auto& t : tokens_) {
            if (t.kind == TokenKind::Punct && t.lexeme == "{") ++depth;
            if (t.kind == TokenKind::Punct && t.lexeme == "}") --depth;
            if (depth == 0 && t.kind == TokenKind::Keyword && t.lexeme == "fn") ++count;
        }
        return count;
    }

    [[noreturn]] void fail_expected(const std::string& what) const {
        if (at_end()) {
            int line = tokens_.empty() ? 1 : tokens_.back().line;
            int col = tokens_.empty() ? 1 : tokens_.back().col + 1;
            throw ParseError("expected " + what + ", got end of input", line, col);
        }
        const MiniToken& t = peek();
        throw ParseError("expected " + what + ", got '" + t.lexeme + "'", t.line, t.col);
    }

    MiniToken expect_keyword(std::string_view kw) {
        if (!peek_is_keyword(kw)) fail_expected("'" + std::string(kw) + "'");
        return tokens_[pos_++];
    }

    MiniToken expect_punct(std::string_view p) {
        if (!peek_is_punct(p)) fail_expected("'" + std::string(p) + "'");
        return tokens_[pos_++];
    }

    MiniToken expect_ident() {
        if (at_end() || peek().kind != TokenKind::Ident) fail_expected("identifier");
        return tokens_[pos_++];
    }

    int new_node(std::string label, std::optional<std::string> value, int parent) {
        int id = static_cast<int>(nodes_.size());
        AstNode node;
        node.node_id = id;
        node.label = std::move(label);
        node.value = std::move(value);
        if (parent >= 0) {
            node.parent = parent;
            nodes_[parent].children.push_back(id);
        }
        nodes_.push_back(std::move(node));
        return id;
    }

    void parse_funcdef(int parent) {
        expect_keyword("fn");
        MiniToken name = expect_ident();
        int fn = new_node("FunctionDef", name.lexeme, parent);
        expect_punct("(");
        if (!peek_is_punct(")")) {
            MiniToken p = expect_ident();
            new_node("Param", p.lexeme, fn);
            while (peek_is_punct(",")) {
                ++pos_;
                p = expect_ident();
                new_node("Param", p.lexeme, fn);
            }
        }
        expect_punct(")");
        parse_block(fn);
    }

    int parse_block(int parent) {
        expect_punct("{");
        int block = new_node("Block", std::nullopt, parent);
        while (!peek_is_punct("}")) {
            if (at_end()) fail_expected("'}'");
            parse_stmt(block);
        }
        expect_punct("}");
        return block;
    }

    void parse_stmt(int parent) {
        if (peek_is_keyword("return")) {
            ++pos_;
            int ret = new_node("Return", std::nullopt, parent);
            parse_expr(ret);
            expect_punct(";");
            return;
        }
        if (peek_is_keyword("if")) {
            ++pos_;
            int node = new_node("If", std::nullopt, parent);
            expect_punct("(");
            parse_expr(node);
            expect_punct(")");
            parse_block(node);
            if (peek_is_keyword("else")) {
                ++pos_;
                parse_block(node);
            }
            return;
        }
        if (peek_is_keyword("while")) {
            ++pos_;
            int node = new_node("While", std::nullopt, parent);
            expect_punct("(");
            parse_expr(node);
            expect_punct(")");
            parse_block(node);
            return;
        }
        // assign needs two tokens of lookahead to spot IDENT "=".
        if (!at_end() && peek().kind == TokenKind::Ident && pos_ + 1 < tokens_.size() &&
            tokens_[pos_ + 1].kind == TokenKind::Punct && tokens_[pos_ + 1].lexeme == "=") {
            MiniToken name = tokens_[pos_];
            pos_ += 2;
            int node = new_node("Assign", std::nullopt, parent);
            new_node("Name", name.lexeme, node);
            parse_expr(node);
            expect_punct(";");
            return;
        }
        parse_expr(parent);
        expect_punct(";");
    }

    // expr/term fold left-associatively: the BinOp node adopts the existing
    // left subtree, which is re-parented after creation.
    void parse_expr(int parent) { attach(parent, parse_expr_node()); }

    int parse_expr_node() {
        int lhs = parse_term_node();
        while (peek_is_punct("+") || peek_is_punct("-")) {
            std::string op = tokens_[pos_++].lexeme;
            int rhs = parse_term_node();
            lhs = make_binop(op, lhs, rhs);
        }
        return lhs;
    }

    int parse_term_node() {
        int lhs = parse_factor_node();
        while (peek_is_punct("*") || peek_is_punct("/")) {
            std::string op = tokens_[pos_++].lexeme;
            int rhs = parse_factor_node();
            lhs = make_binop(op, lhs, rhs);
        }
        return lhs;
    }

    int parse_factor_node() {
        if (!at_end() && peek().kind == TokenKind::Number) {
            MiniToken num = tokens_[pos_++];
            return new_node("Num", num.lexeme, -1);
        }
        if (!at_end() && peek().kind == TokenKind::Ident) {
            MiniToken name = tokens_[pos_++];
            if (peek_is_punct("(")) {
                ++pos_;
                int call = new_node("Call", std::nullopt, -1);
                new_node("Name", name.lexeme, call);
                if (!peek_is_punct(")")) {
                    attach(call, parse_expr_node());
                    while (peek_is_punct(",")) {
                        ++pos_;
                        attach(call, parse_expr_node());
                    }
                }
                expect_punct(")");
                return call;
            }
            return new_node("Name", name.lexeme, -1);
        }
        if (peek_is_punct("(")) {
            ++pos_;
            int inner = parse_expr_node();
            expect_punct(")");
            return inner;
        }
        fail_expected("expression");
    }

    int make_binop(const std::string& op, int lhs, int rhs) {
        int node = new_node("BinOp", op, -1);
        attach(node, lhs);
        attach(node, rhs);
        return node;
    }

    void attach(int parent, int child) {
        nodes_[child].parent = parent;
        nodes_[parent].children.push_back(child);
    }
};

}  // namespace

Ast parse_minilang(const std::vector<MiniToken>& tokens) {
    return Parser(tokens).parse_program();
}

Ast parse_minilang_source(std::string_view source) {
    return parse_minilang(tokenize_minilang(source));
}

}  // namespace astsum
