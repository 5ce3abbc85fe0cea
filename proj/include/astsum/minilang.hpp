#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "astsum/ast.hpp"

namespace astsum {

// MiniLang: a small imperative language whose grammar is
//
//   program := funcdef+
//   funcdef := "fn" IDENT "(" [IDENT ("," IDENT)*] ")" block
//   block   := "{" stmt* "}"
//   stmt    := assign ";" | "return" expr ";"
//            | "if" "(" expr ")" block ["else" block]
//            | "while" "(" expr ")" block
//            | expr ";"
//   assign  := IDENT "=" expr
//   expr    := term (("+"|"-") term)*
//   term    := factor (("*"|"/") factor)*
//   factor  := NUMBER | IDENT ["(" [expr ("," expr)*] ")"] | "(" expr ")"
//
// "#" starts a comment running to end of line.

enum class TokenKind { Ident, Number, Keyword, Punct };

struct MiniToken {
    TokenKind kind;
    std::string lexeme;
    int line = 1;
    int col = 1;
};

/// Splits MiniLang source into tokens; whitespace and comments are dropped.
/// Throws LexError on characters outside the alphabet.
std::vector<MiniToken> tokenize_minilang(std::string_view source);

/// Recursive-descent parse into an Ast with preorder ids. Node labels are
/// FunctionDef, Param, Block, If, While, Return, Assign, BinOp, Call, Name,
/// Num; identifier and literal text is stored in value (operators too).
Ast parse_minilang(const std::vector<MiniToken>& tokens);

Ast parse_minilang_source(std::string_view source);

}  // namespace astsum
