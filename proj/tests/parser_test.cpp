#include <gtest/gtest.h>

#include "sirsql/parser.hpp"
#include "sirsql/render.hpp"
#include "support.hpp"

using namespace sirsql;
using namespace sirsql::ast;

namespace {

template <class T>
T only(const std::vector<Statement>& v) {
  EXPECT_EQ(v.size(), 1u);
  return std::get<T>(v.at(0).node);
}

void expect_round_trip(const std::string& text) {
  auto first = parse(text);
  std::string again;
  for (const auto& s : first) again += render_sir(s.node) + ";\n";
  auto second = parse(again);
  ASSERT_EQ(first.size(), second.size()) << again;
  for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(first[i].node, second[i].node) << again;
}

}  // namespace

TEST(Parser, SpSchemeWithTwoIes) {
  auto stmts = parse(test::fixture("sp2_schema.sirsql"));
  ASSERT_EQ(stmts.size(), 3u);
  const auto& sp = std::get<CreateTable>(stmts[2].node);
  EXPECT_EQ(sp.name, "SP");
  std::vector<std::string> attrs, ies;
  std::vector<std::string> key;
  for (const auto& el : sp.elements) {
    if (const auto* a = std::get_if<AttributeDecl>(&el)) attrs.push_back(a->name);
    if (const auto* i = std::get_if<IeDecl>(&el)) {
      ies.push_back(i->name);
      EXPECT_EQ(i->form, IeDecl::Form::Select);
    }
    if (const auto* c = std::get_if<TableConstraint>(&el)) key = c->columns;
  }
  EXPECT_EQ(attrs, (std::vector<std::string>{"S#", "P#", "QTY"}));
  EXPECT_EQ(ies, (std::vector<std::string>{"I_S", "I_P"}));
  EXPECT_EQ(key, (std::vector<std::string>{"S#", "P#"}));
}

TEST(Parser, MinimalQuery) {
  auto s = only<Select>(parse("Select * From SP;"));
  ASSERT_EQ(s.items.size(), 1u);
  EXPECT_EQ(s.items[0].kind, SelectItem::Kind::Star);
  ASSERT_EQ(s.from.size(), 1u);
  EXPECT_EQ(s.from[0].name, "SP");
}

TEST(Parser, AlterIeWithStarMinus) {
  auto a = only<AlterTable>(parse("Alter Table SP Alter I_P As I_P_ALL (Select */P.P# From P Where SP.P# = P.P#);"));
  ASSERT_EQ(a.actions.size(), 1u);
  EXPECT_EQ(a.actions[0].kind, AlterAction::Kind::Alter);
  EXPECT_EQ(a.actions[0].target, "I_P");
  EXPECT_EQ(a.actions[0].replacement.name, "I_P_ALL");
  const auto& item = a.actions[0].replacement.select.items.at(0);
  EXPECT_EQ(item.kind, SelectItem::Kind::StarMinus);
  EXPECT_EQ(item.excluded, (std::vector<QualifiedName>{{"P", "P#"}}));
}

TEST(Parser, AddAfterWithValueShorthand) {
  auto stmts = parse(test::fixture("sp3_alters.sirsql"));
  ASSERT_EQ(stmts.size(), 2u);
  const auto& a = std::get<AlterTable>(stmts[0].node);
  ASSERT_EQ(a.actions.size(), 1u);
  EXPECT_EQ(a.actions[0].kind, AlterAction::Kind::Add);
  EXPECT_EQ(a.actions[0].position, Position::After);
  EXPECT_EQ(a.actions[0].anchor, "WEIGHT");
  ASSERT_EQ(a.actions[0].elements.size(), 2u);
  const auto& t = std::get<IeDecl>(a.actions[0].elements[0]);
  EXPECT_EQ(t.name, "WEIGHT_T");
  EXPECT_EQ(t.form, IeDecl::Form::Value);
  EXPECT_TRUE(t.shorthand);
}

TEST(Parser, CommentsAndPositions) {
  auto stmts = parse("-- header\nSelect 1; /* block\n comment */ Select 2;");
  ASSERT_EQ(stmts.size(), 2u);
  EXPECT_EQ(stmts[0].pos.line, 2);
  EXPECT_EQ(stmts[1].pos.line, 3);
}

TEST(Parser, SyntaxErrorCarriesPosition) {
  try {
    parse("Select *\nFrom ;");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.code(), Errc::SyntaxError);
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Parser, UnterminatedStatement) {
  try {
    parse("Select * From SP");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnterminatedStatement);
  }
}

TEST(Parser, DuplicateAttribute) {
  try {
    parse("Create Table T (A Int, A Char);");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DuplicateAttribute);
  }
}

TEST(Parser, EmptyScript) { EXPECT_TRUE(parse("  -- nothing\n").empty()); }

TEST(Parser, RoundTrip) {
  expect_round_trip(test::fixture("sp2_schema.sirsql"));
  expect_round_trip(test::fixture("sp2_data.sirsql"));
  expect_round_trip(test::fixture("sp3_alters.sirsql"));
  expect_round_trip("Alter Table SP Alter I_P As I_P_ALL (Select */P.P# From P Where SP.P# = P.P#);");
  expect_round_trip("Alter Table S Add RANK As (IIF(STATUS Is Not Null, (Select Count(*) + 1 From S X Where X.STATUS > S.STATUS), Null));");
  expect_round_trip("Select S#, Count(*) From SP Where QTY Between 100 And 300 And S# Not In ('S5') Group By S# Having Count(*) > 1 Order By 2 Desc;");
  expect_round_trip("Update SP Set QTY = QTY + 1 Where S# Like 'S%';");
  expect_round_trip("Delete From SP Where Not Exists (Select * From S Where S.S# = SP.S#);");
  expect_round_trip("Create View V As Select A.S# From S A Left Join SP B On A.S# = B.S#;");
  expect_round_trip("Drop Table SP Cascade;");
  expect_round_trip("Create Unique Index SX On SP (QTY);");
  expect_round_trip("Insert Into SP (S#, P#, QTY) Values ('S1', 'P1', 1), ('S2', 'P2', 2);");
}

TEST(Render, BracketQuoting) {
  EXPECT_EQ(render(Expr::column("", "S#"), {Dialect::Kernel, Quoting::Bracket}), "[S#]");
  EXPECT_EQ(render(Expr::column("", "S#"), {Dialect::Kernel, Quoting::Double}), "\"S#\"");
  EXPECT_EQ(render(Expr::column("SP", "QTY"), {}), "SP.QTY");
}

TEST(Render, EmptySelectListIsUnrenderable) {
  Select s;
  s.from.push_back(TableRef::named("SP"));
  try {
    render(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnrenderableNode);
  }
}

TEST(Render, StarMinusIsUnrenderableForKernel) {
  Select s = parse_select("Select */P.P# From P");
  try {
    render(s, {Dialect::Kernel, Quoting::Bracket});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnrenderableNode);
  }
}
