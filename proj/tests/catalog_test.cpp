#include <gtest/gtest.h>

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

}  // namespace

TEST(Catalog, SpEdges) {
  Db db;
  db.sp2(false);
  const Catalog& c = db.engine.catalog();
  EXPECT_EQ(c.get("SP").deps, (Names{"S", "P"}));
  EXPECT_EQ(c.dependents_of("P"), Names{"SP"});
  EXPECT_EQ(c.dependents_of("S"), Names{"SP"});
  EXPECT_TRUE(c.dependents_of("SP").empty());
  EXPECT_FALSE(c.find_cycle().has_value());
}

TEST(Catalog, StoredTableHasNoEdges) {
  Db db;
  db.run("Create Table T (A Int Primary Key, B Char);");
  const auto& e = db.engine.catalog().get("T");
  EXPECT_EQ(e.kind, RelationKind::Stored);
  EXPECT_TRUE(e.deps.empty());
  EXPECT_EQ(e.kernel_objects, Names{"T"});
}

TEST(Catalog, CircularStatusIsRejected) {
  Db db;
  db.sp2();
  try {
    db.run("Alter Table S Alter STATUS As STATUS (Select Int (SUM(QTY) / 100) From SP Where S.S# = S#);");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CircularReference);
    Names items = e.items();
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    EXPECT_EQ(items, (Names{"S", "SP"}));
  }
  EXPECT_EQ(db.engine.catalog().get("S").kind, RelationKind::Stored);
  EXPECT_EQ(db.rows("Select STATUS From S Where S# = 'S1'"), (test::Table{{"20"}}));
}

TEST(Catalog, BaseReferenceCreatesBaseEdge) {
  Db db;
  db.sp2();
  db.run(test::fixture("sp3_alters.sirsql"));
  const Catalog& c = db.engine.catalog();
  EXPECT_EQ(c.dependents_of("SP_B"), Names{"S"});
  EXPECT_EQ(c.base_owner("SP_B")->name, "SP");
  EXPECT_FALSE(c.find_cycle().has_value());
}

TEST(Catalog, TransitiveDependentsFollowReaders) {
  Db db;
  db.sp2(false);
  db.run("Create View V As Select S#, SNAME From SP;");
  EXPECT_EQ(db.engine.catalog().transitive_dependents("S"), (Names{"SP", "V"}));
}

TEST(Catalog, FreshKernelLoadsEmpty) {
  SqliteKernel k;
  EXPECT_TRUE(Catalog::load(k).empty());
}

TEST(Catalog, PersistAndReload) {
  Db db;
  db.sp2();
  db.run(test::fixture("sp3_alters.sirsql"));
  Catalog again = Catalog::load(db.kernel);
  ASSERT_EQ(again.entries().size(), db.engine.catalog().entries().size());
  for (const auto& e : db.engine.catalog().entries()) EXPECT_EQ(*again.find(e.name), e) << e.name;
}

TEST(Catalog, ReloadFromFile) {
  std::string path = ::testing::TempDir() + "catalog_reload.db";
  std::remove(path.c_str());
  Catalog before;
  {
    SqliteKernel k(path);
    Engine e(k);
    e.execute_script(test::fixture("sp2_schema.sirsql"));
    before = e.catalog();
  }
  SqliteKernel k(path);
  Engine e(k);
  for (const auto& x : before.entries()) EXPECT_EQ(*e.catalog().find(x.name), x);
  std::remove(path.c_str());
}

TEST(Catalog, MissingViewIsCorrupt) {
  Db db;
  db.sp2(false);
  db.kernel.execute("DROP VIEW SP");
  EXPECT_EQ(code_of([&] { Catalog::load(db.kernel); }), Errc::CorruptCatalog);
}

TEST(Catalog, IncompleteMetaTablesAreCorrupt) {
  Db db;
  db.sp2(false);
  db.kernel.execute("DROP TABLE sir_deps");
  EXPECT_EQ(code_of([&] { Catalog::load(db.kernel); }), Errc::CorruptCatalog);
}

TEST(Catalog, DuplicateNameRejected) {
  Db db;
  db.sp2(false);
  EXPECT_EQ(code_of([&] { db.run("Create Table S (A Int);"); }), Errc::DuplicateName);
  EXPECT_EQ(code_of([&] { db.run("Create View SP As Select 1;"); }), Errc::DuplicateName);
}

TEST(Catalog, StageNamesAreReserved) {
  Db db;
  db.sp2(false);
  EXPECT_EQ(code_of([&] { db.run("Create Table SP_1 (A Int);"); }), Errc::DuplicateName);
  EXPECT_EQ(code_of([&] { db.run("Create Table SP_7 (A Int);"); }), Errc::NameCollision);
  EXPECT_EQ(code_of([&] { db.run("Create Table X_B (A Int);"); }), Errc::NameCollision);
}
