#ifndef PACSET_TOY_PARSER_HPP
#define PACSET_TOY_PARSER_HPP

#include "pacset/ast.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace pacset {

// Toy expression language:
//
//   program := ["return"] expr
//   expr    := term (("+" | "-") term)*
//   term    := factor (("*" | "/") factor)*
//   factor  := INT | IDENT | IDENT "(" [expr ("," expr)*] ")" | "(" expr ")"
//
// Binary nodes are labelled with their operator, calls with "call" (first
// child is the callee name), leaves with their token text. A leading
// "return" becomes a unary "return" root. Parenthesised expressions keep
// the inner node but widen its span over the parentheses.

struct ToyToken {
    std::string text;
    std::size_t offset = 0; // byte offset in the source
};

/// Throws ParseError on characters outside the toy alphabet.
std::vector<ToyToken> tokenize_toy(std::string_view source);

/// Throws ParseError (with the byte offset) on any syntax error.
AstTree parse_toy(std::string_view source);

} // namespace pacset

#endif // PACSET_TOY_PARSER_HPP
