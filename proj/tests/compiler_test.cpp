#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "sirsql/compiler.hpp"
#include "sirsql/parser.hpp"
#include "sirsql/render.hpp"
#include "support.hpp"

using namespace sirsql;
using test::Db;

namespace {

using Names = std::vector<std::string>;

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::SyntaxError;
}

std::string plan_text(Engine& e, const Names& relations) {
  std::string out;
  for (const auto& r : relations)
    for (const auto& ddl : e.explain(r)) out += ddl + ";\n";
  return out;
}

/// Compares with tests/golden/<name>; SIRSQL_UPDATE_GOLDEN=1 rewrites it.
void expect_golden(const std::string& name, const std::string& actual) {
  std::string path = std::string(SIRSQL_GOLDEN) + "/" + name;
  if (std::getenv("SIRSQL_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  EXPECT_EQ(actual, test::read_file(path)) << "golden " << name;
}

ast::CreateTable table_of(const std::string& sql) { return std::get<ast::CreateTable>(parse_statement(sql).node); }

const ast::IeDecl& ie_of(const ast::CreateTable& t, const std::string& name) {
  for (const auto& el : t.elements)
    if (const auto* ie = std::get_if<ast::IeDecl>(&el); ie && ie->name == name) return *ie;
  throw std::runtime_error("no ie " + name);
}

std::vector<SourceColumns> p_source() { return {{"P", {"P#", "PNAME", "COLOR", "WEIGHT", "CITY"}}}; }

Names names(const std::vector<ast::QualifiedName>& q) {
  Names out;
  for (const auto& n : q) out.push_back(n.name);
  return out;
}

const char* kP = "Create Table P (P# Char Primary Key, PNAME Char, COLOR Char, WEIGHT Char, CITY Char);";

}  // namespace

TEST(Golden, Sp2Plan) {
  Db db;
  db.sp2(false);
  std::string text = plan_text(db.engine, {"S", "P", "SP"});
  expect_golden("sp2_plan.sql", text);
  EXPECT_EQ(std::count(text.begin(), text.end(), ';'), 5);
}

TEST(Golden, Sp3Plans) {
  Db db;
  db.sp2(false);
  db.run(test::fixture("sp3_alters.sirsql"));
  expect_golden("sp3_s_plan.sql", plan_text(db.engine, {"S"}));
  expect_golden("sp3_p_plan.sql", plan_text(db.engine, {"P"}));
}

TEST(Compiler, SpPlanShape) {
  Db db;
  db.sp2(false);
  const auto& sp = db.engine.catalog().get("SP");
  EXPECT_EQ(sp.kernel_objects, (Names{"SP_B", "SP_1", "SP"}));
  auto ddl = db.engine.explain("SP");
  EXPECT_NE(ddl[1].find("FROM SP_B LEFT JOIN S ON"), std::string::npos);
  EXPECT_NE(ddl[2].find("FROM SP_1 LEFT JOIN P ON"), std::string::npos);
  EXPECT_EQ(db.engine.explain("S"), Names{"CREATE TABLE S ([S#] Char PRIMARY KEY, SNAME Char, STATUS Char, CITY Char)"});
}

TEST(Compiler, Sp3PlanShapes) {
  Db db;
  db.sp2(false);
  db.run(test::fixture("sp3_alters.sirsql"));
  EXPECT_EQ(db.engine.catalog().get("S").kernel_objects, (Names{"S_B", "S_1", "S"}));
  EXPECT_EQ(db.engine.catalog().get("P").kernel_objects, (Names{"P_B", "P_1", "P_2", "P"}));
  auto p = db.engine.explain("P");
  EXPECT_NE(p[1].find("AS WEIGHT_KG"), std::string::npos);
  EXPECT_NE(p[2].find("AS WEIGHT_T"), std::string::npos);
  EXPECT_NE(p[3].find("FROM P_2"), std::string::npos);
  EXPECT_EQ(db.kernel.introspect("P"), (Names{"P#", "PNAME", "COLOR", "WEIGHT", "WEIGHT_T", "WEIGHT_KG", "CITY"}));
  auto s = db.engine.explain("S");
  EXPECT_NE(s[1].find("(SELECT Int(SUM(SP_B.QTY) / 100) FROM SP_B WHERE S_B.[S#] = SP_B.[S#]) AS STATUS"),
            std::string::npos);
}

TEST(Compiler, CanonicalForms) {
  Catalog cat;
  Db db;
  db.sp2(false);
  db.run(test::fixture("sp3_alters.sirsql"));
  const Catalog& c = db.engine.catalog();
  auto sp = c.get("SP").table();
  CanonicalIE is = canonicalize(ie_of(sp, "I_S"), sp, c);
  EXPECT_EQ(is.kind, IeKind::JoinForm);
  EXPECT_EQ(is.produced, (Names{"SNAME", "STATUS", "SCITY"}));
  ASSERT_EQ(is.joins.size(), 1u);
  EXPECT_EQ(is.joins[0].source.name, "S");
  EXPECT_EQ(c.get("SP").ies[0].canonical_text,
            "I_S (SELECT S.SNAME, S.STATUS, S.CITY AS SCITY FROM SP LEFT JOIN S ON SP.S# = S.S#)");

  auto s = c.get("S").table();
  CanonicalIE status = canonicalize(ie_of(s, "STATUS"), s, c);
  EXPECT_EQ(status.kind, IeKind::SubqueryForm);
  EXPECT_EQ(status.relations, Names{"SP_B"});

  auto p = c.get("P").table();
  CanonicalIE wt = canonicalize(ie_of(p, "WEIGHT_T"), p, c);
  EXPECT_EQ(wt.kind, IeKind::ValueForm);
  EXPECT_EQ(c.get("P").ies[0].canonical_text, "WEIGHT_T (P.WEIGHT_KG / 1000 AS WEIGHT_T)");
  EXPECT_EQ(wt.reads, Names{"WEIGHT_KG"});
}

TEST(Compiler, OrderIes) {
  Db db;
  db.sp2(false);
  db.run(test::fixture("sp3_alters.sirsql"));
  const Catalog& c = db.engine.catalog();
  auto order = [&](const std::string& rel) {
    auto t = c.get(rel).table();
    std::vector<CanonicalIE> ies;
    for (const auto& el : t.elements)
      if (const auto* ie = std::get_if<ast::IeDecl>(&el)) ies.push_back(canonicalize(*ie, t, c));
    Names out;
    for (const auto& ie : order_ies(ies)) out.push_back(ie.name);
    return out;
  };
  EXPECT_EQ(order("SP"), (Names{"I_S", "I_P"}));
  EXPECT_EQ(order("P"), (Names{"WEIGHT_KG", "WEIGHT_T"}));
}

TEST(Compiler, IeCycle) {
  Db db;
  EXPECT_EQ(code_of([&] { db.run("Create Table T (A Int, X As (Y + 1), Y As (X + 1));"); }), Errc::IeCycle);
}

TEST(Compiler, StarMinus) {
  ast::SelectItem one = parse_select("Select */P.P# From P").items[0];
  EXPECT_EQ(names(expand_star_minus(one, p_source())), (Names{"PNAME", "COLOR", "WEIGHT", "CITY"}));
  ast::SelectItem all = parse_select("Select * From P").items[0];
  EXPECT_EQ(names(expand_star_minus(all, p_source())), (Names{"P#", "PNAME", "COLOR", "WEIGHT", "CITY"}));
  ast::SelectItem two = parse_select("Select */(P#, CITY) From P").items[0];
  EXPECT_EQ(names(expand_star_minus(two, p_source())), (Names{"PNAME", "COLOR", "WEIGHT"}));
  ast::SelectItem bad = parse_select("Select */NOPE From P").items[0];
  EXPECT_EQ(code_of([&] { expand_star_minus(bad, p_source()); }), Errc::UnknownExcludedColumn);
}

TEST(Compiler, StarMinusOracle) {
  Names cols = p_source()[0].columns;
  for (unsigned mask = 1; mask + 1 < (1u << cols.size()); ++mask) {
    std::string list;
    Names expected;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (mask & (1u << i)) list += (list.empty() ? "" : ", ") + std::string("P.") + cols[i];
      else expected.push_back(cols[i]);
    }
    auto item = parse_select("Select */(" + list + ") From P").items[0];
    EXPECT_EQ(names(expand_star_minus(item, p_source())), expected) << list;
  }
}

TEST(Compiler, StarMinusFollowsSourceAlterations) {
  Db db;
  db.sp2();
  db.run("Alter Table SP Alter I_P As I_P_ALL (Select */P.P# From P Where SP.P# = P.P#);");
  db.run("Alter Table P Add After WEIGHT WEIGHT_T As (WEIGHT_KG / 1000), WEIGHT_KG As (Round (WEIGHT / 2.1, 1));");
  EXPECT_EQ(db.kernel.introspect("SP"), (Names{"S#", "P#", "QTY", "SNAME", "STATUS", "SCITY", "PNAME", "COLOR", "WEIGHT",
                                               "WEIGHT_T", "WEIGHT_KG", "CITY"}));
  EXPECT_EQ(db.rows("Select WEIGHT_KG From SP Where S# = 'S1' And P# = 'P1'"), (test::Table{{"5.7"}}));
}

TEST(Compiler, DroppingLastIeMakesStoredTable) {
  Db db;
  db.sp2();
  db.run(test::fixture("sp3_alters.sirsql"));
  db.run("Alter Table P Drop WEIGHT_T, Drop WEIGHT_KG;");
  const auto& p = db.engine.catalog().get("P");
  EXPECT_EQ(p.kind, RelationKind::Stored);
  EXPECT_EQ(p.kernel_objects, Names{"P"});
  EXPECT_FALSE(db.kernel.exists("P_B"));
  EXPECT_FALSE(db.kernel.exists("P_1"));
  EXPECT_EQ(db.count("P"), 6);
  EXPECT_EQ(db.rows("Select PNAME From SP Where S# = 'S1' And P# = 'P1'"), (test::Table{{"Nut"}}));
}

TEST(Compiler, DropRestrictAndCascade) {
  Db db;
  db.sp2();
  try {
    db.run("Drop Table S;");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DependentsExist);
    EXPECT_EQ(e.items(), Names{"SP"});
  }
  Db leaf;
  leaf.sp2();
  leaf.run("Drop Table SP;");
  for (const auto& o : Names{"SP", "SP_1", "SP_B"}) EXPECT_FALSE(leaf.kernel.exists(o));
  EXPECT_EQ(leaf.engine.catalog().find("SP"), nullptr);

  db.run("Drop Table S Cascade;");
  for (const auto& o : Names{"S", "SP", "SP_1", "SP_B"}) EXPECT_FALSE(db.kernel.exists(o)) << o;
  EXPECT_TRUE(db.kernel.exists("P"));
  EXPECT_EQ(db.count("sir_relations"), 1);
}

TEST(Compiler, IndexRouting) {
  Db db;
  db.sp2(false);
  db.run("Create Index SPQ On SP (QTY);");
  EXPECT_NE(db.kernel.object_definition("SPQ")->find("SP_B"), std::string::npos);
  EXPECT_EQ(code_of([&] { db.run("Create Index SPN On SP (SNAME);"); }), Errc::IndexOnInheritedAttribute);
  db.run("Create Index SN On S (SNAME);");
  EXPECT_NE(db.kernel.object_definition("SN")->find("ON S"), std::string::npos);
}

TEST(Compiler, RewriteToBase) {
  Db db;
  db.sp2(false);
  const Catalog& c = db.engine.catalog();
  auto s = table_of(
      "Create Table S (S# Char Primary Key, SNAME Char, CITY Char, "
      "STATUS (Select Int (SUM(QTY) / 100) From SP Where S.S# = S#));");
  ast::IeDecl r = rewrite_to_base(ie_of(s, "STATUS"), s, c);
  EXPECT_EQ(r.select.from.at(0).name, "SP_B");

  auto p = table_of(
      "Create Table P (P# Char Primary Key, PNAME Char, "
      "SUPPLIERS (Select LIST (SP.S#, QTY) From SP Where P.P# = SP.P# Order By QTY Desc));");
  ast::IeDecl sup = rewrite_to_base(ie_of(p, "SUPPLIERS"), p, c);
  EXPECT_EQ(sup.select.from.at(0).name, "SP_B");
  EXPECT_EQ(render_sir(ast::StatementNode{ast::CreateTable{"P", {sup}}}).find("SP."), std::string::npos);

  auto bad = table_of(
      "Create Table S (S# Char Primary Key, CITY Char, N (Select Max(SNAME) From SP Where S.S# = SP.S#));");
  EXPECT_EQ(code_of([&] { rewrite_to_base(ie_of(bad, "N"), bad, c); }), Errc::NotRewritable);
}

TEST(Compiler, SuppliersOverBase) {
  Db db;
  db.sp2();
  db.run(
      "Alter Table P Add SUPPLIERS (Select LIST (SP_B.S#, SNAME, QTY) From SP_B, S "
      "Where P.P# = SP_B.P# And S.S# = SP_B.S# Order By QTY Desc, SNAME);");
  EXPECT_EQ(db.rows("Select SUPPLIERS From P Where P# = 'P6'"), (test::Table{{"S1, Smith, 100"}}));
  EXPECT_EQ(db.rows("Select SUPPLIERS From P Where P# = 'P2'"),
            (test::Table{{"S2, Jones, 400 ; S3, Blake, 200 ; S4, Clark, 200 ; S1, Smith, 200"}}));
  EXPECT_EQ(db.rows("Select SUPPLIERS From P Where P# = 'P9'"), test::Table{});
}

TEST(Compiler, SkipRedundantFullView) {
  EngineOptions o;
  o.compile.skip_redundant_full_view = true;
  Db db(o);
  db.sp2(false);
  db.run(test::fixture("sp3_alters.sirsql"));
  EXPECT_EQ(db.engine.catalog().get("P").kernel_objects, (Names{"P_B", "P_1", "P"}));
  EXPECT_EQ(db.kernel.introspect("P"), (Names{"P#", "PNAME", "COLOR", "WEIGHT", "WEIGHT_T", "WEIGHT_KG", "CITY"}));
}

TEST(Compiler, CollapseValueIes) {
  EngineOptions o;
  o.compile.collapse_value_ies = true;
  Db db(o);
  db.sp2(false);
  db.run(test::fixture("sp3_alters.sirsql"));
  EXPECT_EQ(db.engine.catalog().get("P").kernel_objects, (Names{"P_B", "P_1", "P"}));
}

TEST(Compiler, DeterministicPlans) {
  auto plans = [] {
    Db db;
    db.sp2(false);
    db.run(test::fixture("sp3_alters.sirsql"));
    return plan_text(db.engine, {"S", "P", "SP"});
  };
  EXPECT_EQ(plans(), plans());
}

TEST(Compiler, RecursiveJoinAttributeDrop) {
  Db db;
  db.sp2(false);
  EXPECT_EQ(code_of([&] { db.run("Alter Table SP Drop S#;"); }), Errc::RecursiveJoinAttributeDrop);
}

TEST(Compiler, UnknownReferences) {
  Db db;
  db.sp2(false);
  EXPECT_EQ(code_of([&] { db.run("Create Table T (A Int, I (Select X From NOPE Where T.A = NOPE.A));"); }),
            Errc::UnknownRelation);
  EXPECT_EQ(code_of([&] { db.run("Create Table T (A Int, I (Select NOPE As Q From S Where T.A = S.S#));"); }),
            Errc::UnknownColumn);
  EXPECT_EQ(code_of([&] { db.run("Alter Table SP Drop I_NOPE;"); }), Errc::UnknownColumn);
  EXPECT_EQ(code_of([&] { db.run("Alter Table SP Alter I_NOPE As I_X (Select PNAME From P Where SP.P# = P#);"); }),
            Errc::UnknownIE);
}

TEST(Compiler, DistinctIeReadsOneSubTuple) {
  Db db;
  db.sp2();
  db.run("Create Table SC (S# Char Primary Key, NOTE Char, I_SP (Select Distinct SNAME, SCITY From SP Where SP.S# = SC.S#));");
  db.run("Insert Into SC Values ('S1', 'a'); Insert Into SC Values ('S5', 'b');");
  EXPECT_EQ(db.count("SC"), db.count("SC_B"));
  EXPECT_EQ(db.rows("Select * From SC Order By S#"),
            (test::Table{{"S1", "a", "Smith", "London"}, {"S5", "b", "NULL", "NULL"}}));
  EXPECT_TRUE(db.engine.check("SC").empty());
  EXPECT_NE(db.engine.explain("SC")[1].find("(SELECT DISTINCT SNAME, SCITY, [S#] FROM SP) AS SP"), std::string::npos);
}

TEST(Compiler, IndexesSurviveBaseRebuild) {
  Db db;
  db.run("Create Table T (K Char Primary Key, A Char, B Char);");
  db.run("Create Index IX_A On T (A); Create Index IX_B On T (B);");
  db.run("Insert Into T Values ('k', 'x', 'y');");
  db.run("Alter Table T Add After A UA As (Upper (A));");
  EXPECT_EQ(db.kernel.index_definitions("T_B"),
            (Names{"CREATE INDEX IX_A ON T_B (A)", "CREATE INDEX IX_B ON T_B (B)"}));
  db.run("Alter Table T Drop B;");
  EXPECT_EQ(db.kernel.index_definitions("T_B"), Names{"CREATE INDEX IX_A ON T_B (A)"});
  EXPECT_EQ(db.rows("Select * From T"), (test::Table{{"k", "x", "X"}}));
}
