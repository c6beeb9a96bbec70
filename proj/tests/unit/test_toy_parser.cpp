#include "pacset/errors.hpp"
#include "pacset/toy_parser.hpp"

#include "test_trees.hpp"

#include <gtest/gtest.h>

using namespace pacset;
namespace pt = pacset::testing;

TEST(ToyParser, FibSum) {
    const AstTree t = parse_toy("fib(n-1) + fib(n-2)");
    EXPECT_EQ(t.label(0), "+");
    ASSERT_EQ(t.children(0).size(), 2u);
    for (NodeId c : t.children(0)) {
        EXPECT_EQ(t.label(c), "call");
        EXPECT_EQ(t.label(t.children(c)[0]), "fib");
        EXPECT_EQ(t.label(t.children(c)[1]), "-");
    }
    EXPECT_EQ(t.tokens().size(), 13u);
    EXPECT_EQ(t.span(0), (Span{0, 13}));
}

TEST(ToyParser, SingleIdentifier) {
    const AstTree t = parse_toy("x");
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.label(0), "x");
    EXPECT_EQ(t.span(0), (Span{0, 1}));
}

TEST(ToyParser, NestedCallsAndPrecedence) {
    const AstTree t = parse_toy("f(g(1), 2)");
    EXPECT_EQ(t.label(0), "call");
    ASSERT_EQ(t.children(0).size(), 3u);
    EXPECT_EQ(t.label(t.children(0)[1]), "call");
    EXPECT_EQ(t.label(t.children(0)[2]), "2");

    const AstTree p = parse_toy("1 + 2 * 3 - 4");
    EXPECT_EQ(p.label(0), "-");
    EXPECT_EQ(p.label(p.children(0)[0]), "+");
    EXPECT_EQ(p.label(p.children(p.children(0)[0])[1]), "*");

    const AstTree paren = parse_toy("(a + b) * c");
    EXPECT_EQ(paren.label(0), "*");
    EXPECT_EQ(paren.span(paren.children(0)[0]), (Span{0, 5}));

    const AstTree ret = parse_toy("return f()");
    EXPECT_EQ(ret.label(0), "return");
    EXPECT_EQ(ret.label(1), "call");
    EXPECT_EQ(ret.children(1).size(), 1u);
}

TEST(ToyParser, RandomProgramsParseWithLeafSpans) {
    pt::Rng rng(21);
    for (int i = 0; i < 1000; ++i) {
        const std::string src = pt::random_toy_program(rng, 4);
        const AstTree t = parse_toy(src);
        for (NodeId v = 0; v < t.size(); ++v) {
            if (!t.is_leaf(v)) continue;
            // Parentheses around a leaf widen its span symmetrically.
            const Span s = t.span(v);
            const std::size_t width = s.end - s.begin;
            ASSERT_EQ(width % 2, 1u) << src;
            const std::size_t mid = s.begin + width / 2;
            ASSERT_EQ(t.tokens()[mid], t.label(v)) << src;
            for (std::size_t i = s.begin; i < mid; ++i) {
                ASSERT_EQ(t.tokens()[i], "(") << src;
                ASSERT_EQ(t.tokens()[s.end - 1 - (i - s.begin)], ")") << src;
            }
        }
    }
}

TEST(ToyParser, ErrorsCarryOffsets) {
    auto offset_of = [](std::string_view src) -> std::size_t {
        try {
            parse_toy(src);
        } catch (const ParseError& e) {
            return e.offset();
        }
        ADD_FAILURE() << "no error for " << src;
        return 0;
    };
    EXPECT_EQ(offset_of("a + $"), 4u);
    EXPECT_EQ(offset_of("f(1, 2"), 6u);
    EXPECT_EQ(offset_of("1 2"), 2u);
    EXPECT_EQ(offset_of("9x"), 0u);
    EXPECT_EQ(offset_of(""), 0u);
    EXPECT_EQ(offset_of("a +"), 3u);
    EXPECT_THROW(parse_toy(")"), InputError);
}

TEST(ToyTokenizer, Offsets) {
    const auto toks = tokenize_toy("  f(x1,  22)");
    ASSERT_EQ(toks.size(), 6u);
    EXPECT_EQ(toks[0].text, "f");
    EXPECT_EQ(toks[0].offset, 2u);
    EXPECT_EQ(toks[2].text, "x1");
    EXPECT_EQ(toks[4].text, "22");
    EXPECT_EQ(toks[4].offset, 9u);
}
