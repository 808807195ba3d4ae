#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "metamorph/syntax.hpp"
#include "metamorph/transforms.hpp"

namespace metamorph {
namespace {

MethodAst first_variant(const std::string& src, TransformKind kind, std::uint64_t seed = 1) {
    auto vs = apply(parse(src), kind, ApplyMode::SinglePlace, seed);
    EXPECT_FALSE(vs.empty());
    return vs.empty() ? MethodAst{} : vs.front().ast;
}

void expect_same(const MethodAst& got, const std::string& want) {
    EXPECT_TRUE(structural_eq(got, parse(want), false)) << print(got) << "\n--- expected ---\n" << print(parse(want));
}

// Collects every block's statement sexprs, sorted, for multiset comparison.
std::vector<std::string> stmt_multiset(const MethodAst& m) {
    std::vector<std::string> out;
    for_each_stmt(m, [&](const Stmt& s, const NodePath&) { out.push_back(sexpr(s)); });
    std::sort(out.begin(), out.end());
    return out;
}

TEST(RenameTest, CompareToMatchesRenamedFigure) {
    MethodAst m = parse(fixtures::kCompareToOriginal);
    auto sites = enumerate_candidates(m, TransformKind::VN, 0);
    ASSERT_EQ(sites[0].variable, "other");
    TransformedVariant v = variable_renaming(m, sites[0]);
    expect_same(v.ast, fixtures::kCompareToRenamed);
    EXPECT_TRUE(structural_eq(m, v.ast, true));
    EXPECT_FALSE(structural_eq(m, v.ast, false));
    const std::string& src = v.source;
    std::size_t n = 0;
    for (std::size_t at = src.find("var0"); at != std::string::npos; at = src.find("var0", at + 1)) ++n;
    EXPECT_EQ(n, 3u);
    EXPECT_EQ(src.find("other"), std::string::npos);
}

TEST(RenameTest, FreshNameSkipsExisting) {
    MethodAst got = first_variant("void f(int a) { int var0 = a; }", TransformKind::VN);
    expect_same(got, "void f(int var1) { int var0 = var1; }");
    // Freshness is method-wide, including callee and field names.
    got = first_variant("void f(int a) { var0(); this.var1 = a; }", TransformKind::VN);
    expect_same(got, "void f(int var2) { var0(); this.var1 = var2; }");
}

TEST(RenameTest, LeavesUnrelatedOccurrences) {
    // The first `x` is a field read before the local exists.
    MethodAst got = first_variant("void f() { y = x; int x = 1; x++; o.x = 2; }", TransformKind::VN);
    expect_same(got, "void f() { y = x; int var0 = 1; var0++; o.x = 2; }");
}

TEST(RenameTest, RenamesEverySameNamedDeclaration) {
    MethodAst got = first_variant("void f() { for (int i = 0; i < 2; i++) { g(i); } for (int i = 0; i < 3; i++) { } }",
                                  TransformKind::VN);
    expect_same(got, "void f() { for (int var0 = 0; var0 < 2; var0++) { g(var0); } "
                     "for (int var0 = 0; var0 < 3; var0++) { } }");
}

TEST(ExchangeTest, FlipsLiteralsAndNegations) {
    MethodAst got = first_variant("void f(boolean c) { boolean done = false; while (!done) { if (c) { done = true; } } }",
                                  TransformKind::BX);
    expect_same(got, "void f(boolean c) { boolean done = true; while (done) { if (c) { done = false; } } }");
}

TEST(ExchangeTest, Involution) {
    const std::string src = "boolean f(boolean c) { boolean ok = true; if (ok && c) { ok = false; } return !ok || ok; }";
    MethodAst m = parse(src);
    auto sites = enumerate_candidates(m, TransformKind::BX, 0);
    ASSERT_EQ(sites.size(), 1u);
    MethodAst once = boolean_exchange(m, sites[0]).ast;
    EXPECT_FALSE(structural_eq(m, once, false));
    MethodAst twice = boolean_exchange(once, sites[0]).ast;
    EXPECT_TRUE(structural_eq(m, twice, false)) << print(twice);
}

TEST(ExchangeTest, NegatedReadCount) {
    // Reads of ok: plain at 3 places, negated at 1. After the exchange the
    // plain count is the old negated count.
    MethodAst got = first_variant(
        "int f(int n) { boolean ok = false; int r = 0; if (ok) { r = 1; } if (!ok) { r = 2; } "
        "while (ok && n > 0) { n--; } return ok ? r : 0; }",
        TransformKind::BX);
    const std::string s = sexpr(got);
    auto count = [&](const std::string& needle) {
        std::size_t n = 0;
        for (std::size_t at = s.find(needle); at != std::string::npos; at = s.find(needle, at + 1)) ++n;
        return n;
    };
    EXPECT_EQ(count("(unary 0 (id ok))"), 3u) << s;
    EXPECT_EQ(count("(id ok)"), 4u) << s;
}

TEST(LoopTest, ForBecomesWhile) {
    expect_same(first_variant("void f() { for (int i = 0; i < 3; i++) { s(); } }", TransformKind::LX),
                "void f() { { int i = 0; while (i < 3) { s(); i++; } } }");
    expect_same(first_variant("void f() { for (;;) { b(); } }", TransformKind::LX),
                "void f() { { while (true) { b(); } } }");
}

TEST(LoopTest, WhileBecomesFor) {
    expect_same(first_variant("void f() { while (c) { b(); } }", TransformKind::LX), "void f() { for (; c;) { b(); } }");
}

TEST(LoopTest, BodyDeclarationShadowingUpdateIsNested) {
    expect_same(first_variant("void f(int k) { for (int i = 0; i < 3; i += k) { int k = 2; g(k); } }",
                              TransformKind::LX),
                "void f(int k) { { int i = 0; while (i < 3) { { int k = 2; g(k); } i += k; } } }");
}

TEST(SwitchTest, IfChainWithDefault) {
    expect_same(first_variant("void f(int x) { switch (x) { case 0: a(); break; default: b(); break; } }",
                              TransformKind::SF),
                "void f(int x) { { int sel0 = x; if (sel0 == 0) { a(); } else { b(); } } }");
}

TEST(SwitchTest, NoDefaultAndMultipleLabels) {
    MethodAst got = first_variant(
        "int f(int x) { switch (x) { case 0: return 1; case 1: case 2: g(); break; case 3: h(); } return 0; }",
        TransformKind::SF);
    expect_same(got,
                "int f(int x) { { int sel0 = x; if (sel0 == 0) { return 1; } else if (sel0 == 1 || sel0 == 2) "
                "{ g(); } else if (sel0 == 3) { h(); } } return 0; }");
}

TEST(SwitchTest, StringLabelsUseEquals) {
    expect_same(first_variant("void f(String s) { switch (s) { case \"a\": g(); break; } }", TransformKind::SF),
                "void f(String s) { { String sel0 = s; if (sel0.equals(\"a\")) { g(); } } }");
}

TEST(SwitchTest, SelectorTypeComesFromDeclaration) {
    expect_same(first_variant("void f(long n) { switch (n + 1) { case 1: g(); break; } switch (n) { case 1: break; } }",
                              TransformKind::SF),
                "void f(long n) { { int sel0 = n + 1; if (sel0 == 1) { g(); } } switch (n) { case 1: break; } }");
    auto vs = apply(parse("void f(long n) { switch (n) { case 1: g(); break; } }"), TransformKind::SF,
                    ApplyMode::SinglePlace, 0);
    ASSERT_EQ(vs.size(), 1u);
    expect_same(vs[0].ast, "void f(long n) { { long sel0 = n; if (sel0 == 1) { g(); } } }");
}

TEST(SwitchTest, BranchCountMatchesCases) {
    MethodAst got = first_variant(
        "void f(int x) { switch (x) { case 1: a(); break; case 2: b(); break; case 3: c(); break; default: d(); } }",
        TransformKind::SF);
    std::size_t ifs = 0;
    for_each_stmt(got, [&](const Stmt& s, const NodePath&) { ifs += s.is<If>(); });
    EXPECT_EQ(ifs, 3u);
}

TEST(PermuteTest, SwapsAdjacentPair) {
    MethodAst m = parse("void f() { int a = 1; int b = 2; }");
    auto sites = enumerate_candidates(m, TransformKind::PS, 0);
    ASSERT_EQ(sites.size(), 1u);
    MethodAst once = permute_statement(m, sites[0]).ast;
    expect_same(once, "void f() { int b = 2; int a = 1; }");
    EXPECT_EQ(stmt_multiset(m), stmt_multiset(once));
    EXPECT_TRUE(structural_eq(permute_statement(once, sites[0]).ast, m, false));
}

TEST(TryCatchTest, WrapsStatement) {
    expect_same(first_variant("void f(int x) { x = x + 1; }", TransformKind::TC),
                "void f(int x) { try { x = x + 1; } catch (Exception ex0) { ex0.printStackTrace(); } }");
    expect_same(first_variant("void f(int ex0) { ex0++; }", TransformKind::TC),
                "void f(int ex0) { try { ex0++; } catch (Exception ex1) { ex1.printStackTrace(); } }");
}

TEST(UnusedTest, InsertsDeclaration) {
    MethodAst m = parse("void f() { a(); }");
    CandidateSite site{TransformKind::UN, {}, {}, 0};
    MethodAst got = unused_statement_insertion(m, site).ast;
    expect_same(got, "void f() { String unused0 = \"metamorph\"; a(); }");
    Stmt decl{VarDecl{"String", "unused0", Expr{StringLit{"metamorph"}}, false}};
    EXPECT_EQ(node_count(got), node_count(m) + node_count(decl));
    got.body.stmts.erase(got.body.stmts.begin());
    EXPECT_TRUE(structural_eq(got, m, false));
}

TEST(ApplyTest, ModesForRenaming) {
    MethodAst m = parse("int f(int a, int b) { int c = a + b; return c; }");
    auto single = apply(m, TransformKind::VN, ApplyMode::SinglePlace, 0);
    EXPECT_EQ(single.size(), 3u);
    for (const auto& v : single) EXPECT_EQ(v.sites.size(), 1u);
    auto all = apply(m, TransformKind::VN, ApplyMode::AllPlace, 0);
    ASSERT_EQ(all.size(), 1u);
    EXPECT_EQ(all[0].sites.size(), 3u);
    expect_same(all[0].ast, "int f(int var0, int var1) { int var2 = var0 + var1; return var2; }");
}

TEST(ApplyTest, AllPlaceRejectedForOrderAndInsertionKinds) {
    MethodAst m = parse("void f() { int a = 1; int b = 2; }");
    for (TransformKind k : {TransformKind::PS, TransformKind::TC, TransformKind::UN}) {
        EXPECT_THROW(apply(m, k, ApplyMode::AllPlace, 0), ModeUnsupported);
    }
    EXPECT_TRUE(apply(m, TransformKind::SF, ApplyMode::AllPlace, 0).empty());
}

TEST(ApplyTest, AllPlaceNestedLoopsAndSwitches) {
    MethodAst m = parse(
        "void f(int x) { for (int i = 0; i < x; i++) { while (c) { g(); } } "
        "switch (x) { case 1: switch (x) { case 2: h(); break; } break; default: k(); } }");
    auto lx = apply(m, TransformKind::LX, ApplyMode::AllPlace, 0);
    ASSERT_EQ(lx.size(), 1u);
    EXPECT_EQ(lx[0].sites.size(), 2u);
    expect_same(lx[0].ast,
                "void f(int x) { { int i = 0; while (i < x) { for (; c;) { g(); } i++; } } "
                "switch (x) { case 1: switch (x) { case 2: h(); break; } break; default: k(); } }");
    auto sf = apply(m, TransformKind::SF, ApplyMode::AllPlace, 0);
    ASSERT_EQ(sf.size(), 1u);
    expect_same(sf[0].ast,
                "void f(int x) { for (int i = 0; i < x; i++) { while (c) { g(); } } "
                "{ int sel0 = x; if (sel0 == 1) { { int sel1 = x; if (sel1 == 2) { h(); } } } else { k(); } } }");
    // Front-to-back application with re-enumeration gives the same tree.
    MethodAst seq = m;
    for (int step = 0; step < 2; ++step) {
        auto sites = enumerate_candidates(seq, TransformKind::SF, 0);
        ASSERT_FALSE(sites.empty());
        apply_site(seq, sites.front());
    }
    EXPECT_TRUE(structural_eq(seq, sf[0].ast, false)) << print(seq);
}

TEST(ApplyTest, VariantSourceReparses) {
    const std::string src = fixtures::kCompareToOriginal;
    MethodAst m = parse(src);
    for (TransformKind k : kAllKinds) {
        for (const auto& v : apply(m, k, ApplyMode::SinglePlace, 3)) {
            EXPECT_TRUE(structural_eq(parse(v.source), v.ast, false)) << kind_name(k);
            EXPECT_EQ(v.kind, k);
            EXPECT_EQ(v.original_id, "compareTo");
        }
    }
}

TEST(ApplyTest, BadSitesAreRejected) {
    MethodAst m = parse("void f() { a(); }");
    EXPECT_THROW(apply_site(m, CandidateSite{TransformKind::LX, {0}, {}, 0}), std::invalid_argument);
    EXPECT_THROW(apply_site(m, CandidateSite{TransformKind::PS, {}, {}, 0}), std::invalid_argument);
    EXPECT_THROW(apply_site(m, CandidateSite{TransformKind::VN, {}, "zz", 0}), std::invalid_argument);
    EXPECT_THROW(variable_renaming(m, CandidateSite{TransformKind::UN, {}, {}, 0}), std::invalid_argument);
}

TEST(ModeTest, Names) {
    EXPECT_EQ(parse_mode("single"), ApplyMode::SinglePlace);
    EXPECT_EQ(parse_mode("all"), ApplyMode::AllPlace);
    EXPECT_EQ(mode_name(ApplyMode::AllPlace), "all");
    EXPECT_THROW(parse_mode("both"), std::invalid_argument);
}

}  // namespace
}  // namespace metamorph
