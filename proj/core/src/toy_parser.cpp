#include "pacset/toy_parser.hpp"

#include "pacset/errors.hpp"

#include <cctype>

namespace pacset {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Parser {
public:
    Parser(std::vector<ToyToken> tokens, std::size_t source_size)
        : toks_(std::move(tokens)), eof_offset_(source_size) {}

    AstNode program() {
        AstNode root;
        if (peek() == "return") {
            ++pos_;
            AstNode body = expr();
            root.label = "return";
            root.span = {0, body.span.end};
            root.children.push_back(std::move(body));
        } else {
            root = expr();
        }
        if (pos_ < toks_.size()) fail("unexpected '" + toks_[pos_].text + "'");
        return root;
    }

private:
    std::string_view peek() const {
        return pos_ < toks_.size() ? std::string_view(toks_[pos_].text) : std::string_view();
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what, pos_ < toks_.size() ? toks_[pos_].offset : eof_offset_);
    }

    void expect(std::string_view text) {
        if (peek() != text) {
            fail("expected '" + std::string(text) + "'"
                 + (pos_ < toks_.size() ? ", found '" + toks_[pos_].text + "'" : " before end"));
        }
        ++pos_;
    }

    static AstNode binary(std::string op, AstNode lhs, AstNode rhs) {
        AstNode n;
        n.label = std::move(op);
        n.span = {lhs.span.begin, rhs.span.end};
        n.children.push_back(std::move(lhs));
        n.children.push_back(std::move(rhs));
        return n;
    }

    AstNode expr() {
        AstNode lhs = term();
        while (peek() == "+" || peek() == "-") {
            std::string op(peek());
            ++pos_;
            lhs = binary(std::move(op), std::move(lhs), term());
        }
        return lhs;
    }

    AstNode term() {
        AstNode lhs = factor();
        while (peek() == "*" || peek() == "/") {
            std::string op(peek());
            ++pos_;
            lhs = binary(std::move(op), std::move(lhs), factor());
        }
        return lhs;
    }

    AstNode factor() {
        if (pos_ >= toks_.size()) fail("expected an expression before end");
        const std::string& text = toks_[pos_].text;
        const std::size_t start = pos_;
        if (text == "(") {
            ++pos_;
            AstNode inner = expr();
            expect(")");
            inner.span = {start, pos_};
            return inner;
        }
        if (is_digit(text[0])) {
            ++pos_;
            return AstNode{text, {start, pos_}, std::nullopt, {}};
        }
        if (ident_start(text[0]) && text != "return") {
            ++pos_;
            AstNode name{text, {start, pos_}, std::nullopt, {}};
            if (peek() != "(") return name;
            ++pos_;
            AstNode call;
            call.label = "call";
            call.children.push_back(std::move(name));
            if (peek() != ")") {
                call.children.push_back(expr());
                while (peek() == ",") {
                    ++pos_;
                    call.children.push_back(expr());
                }
            }
            expect(")");
            call.span = {start, pos_};
            return call;
        }
        fail("unexpected '" + text + "'");
    }

    std::vector<ToyToken> toks_;
    std::size_t eof_offset_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<ToyToken> tokenize_toy(std::string_view source) {
    std::vector<ToyToken> tokens;
    std::size_t i = 0;
    while (i < source.size()) {
        const char c = source[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        if (ident_start(c)) {
            while (j < source.size() && ident_char(source[j])) ++j;
        } else if (is_digit(c)) {
            while (j < source.size() && is_digit(source[j])) ++j;
            if (j < source.size() && ident_start(source[j])) {
                throw ParseError("malformed integer literal", i);
            }
        } else if (std::string_view("+-*/,()").find(c) == std::string_view::npos) {
            throw ParseError(std::string("unexpected character '") + c + "'", i);
        }
        tokens.push_back({std::string(source.substr(i, j - i)), i});
        i = j;
    }
    return tokens;
}

AstTree parse_toy(std::string_view source) {
    std::vector<ToyToken> toks = tokenize_toy(source);
    std::vector<std::string> texts;
    texts.reserve(toks.size());
    for (const auto& t : toks) texts.push_back(t.text);
    Parser parser(std::move(toks), source.size());
    AstNode root = parser.program();
    return AstTree(std::move(texts), root);
}

} // namespace pacset
