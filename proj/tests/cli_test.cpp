#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "sirsql/cli.hpp"
#include "support.hpp"

using namespace sirsql;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result cli(std::vector<std::string> args, const std::string& input = {}) {
  args.insert(args.begin(), "sirsql");
  std::istringstream in(input);
  std::ostringstream out, err;
  Result r;
  r.code = run_cli(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    db_ = ::testing::TempDir() + "cli_" + ::testing::UnitTest::GetInstance()->current_test_info()->name() + ".db";
    std::remove(db_.c_str());
    unsetenv("SIRSQL_KERNEL");
  }
  void TearDown() override { std::remove(db_.c_str()); }

  Result on_db(std::vector<std::string> args, const std::string& input = {}) {
    args.insert(args.begin(), {"--kernel", db_});
    return cli(std::move(args), input);
  }
  void load_sp2() {
    ASSERT_EQ(on_db({"apply", test::fixture_path("sp2_schema.sirsql")}).code, 0);
    ASSERT_EQ(on_db({"apply", test::fixture_path("sp2_data.sirsql")}).code, 0);
  }
  std::string tmp(const std::string& name, const std::string& text) {
    std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << text;
    return path;
  }

  std::string db_;
};

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(Cli, ApplyReportsNineObjects) {
  Result r = on_db({"apply", test::fixture_path("sp2_schema.sirsql")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Create Table SP: SP_B, SP_1, SP"), std::string::npos);
  EXPECT_NE(r.out.find("9 kernel objects:"), std::string::npos);
}

TEST_F(Cli, ApplyEmptyFile) {
  Result r = on_db({"apply", tmp("empty.sirsql", "")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0 kernel objects: \n");
}

TEST_F(Cli, ApplyCircularStatus) {
  load_sp2();
  Result r = on_db({"apply", tmp("circ.sirsql",
                              "Alter Table S Alter STATUS As STATUS (Select Int (SUM(QTY) / 100) From SP Where S.S# = S#);")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("circular reference"), std::string::npos);
  EXPECT_NE(r.err.find("S -> SP -> S"), std::string::npos);
}

TEST_F(Cli, ApplyStopsAtFirstFailure) {
  Result r = on_db({"apply", tmp("stop.sirsql", "Create Table A (X Int);\nCreate Table A (X Int);\nCreate Table B (X Int);")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(on_db({"explain", "B"}).code, 2);
  EXPECT_EQ(on_db({"explain", "A"}).code, 0);
}

TEST_F(Cli, ApplyParseFailure) {
  Result r = on_db({"apply", tmp("bad.sirsql", "Create Table A (X Int);\nCreate Tabel B (X Int);")});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(on_db({"explain", "A"}).code, 2);
}

TEST_F(Cli, QuerySmith) {
  load_sp2();
  Result r = on_db({"--format", "csv", "query", "Select P#, PNAME, QTY From SP Where SNAME ='Smith'"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "P#,PNAME,QTY\nP1,Nut,300\nP2,Bolt,200\nP3,Screw,400\nP4,Screw,200\nP5,Cam,100\nP6,Cog,100\n");
}

TEST_F(Cli, QueryWholeSp) {
  load_sp2();
  Result r = on_db({"--format", "csv", "query", "Select * From SP Order By S#, P#"});
  EXPECT_EQ(r.code, 0);
  std::string expected = test::fixture("sp2_rows.txt");
  std::replace(expected.begin(), expected.end(), '|', ',');
  EXPECT_EQ(r.out, expected);
}

TEST_F(Cli, QueryFormats) {
  load_sp2();
  Result t = on_db({"query", "Select S#, CITY From S Where S# = 'S1'"});
  EXPECT_EQ(t.out, "S# | CITY\n---+-------\nS1 | London\n(1 row)\n");
  Result j = on_db({"--format", "json-lines", "query", "Select S#, QTY From SP Where P# = 'P6'"});
  EXPECT_EQ(j.out, "{\"S#\":\"S1\",\"QTY\":100}\n");
  Result n = on_db({"query", "Select Null As N"});
  EXPECT_NE(n.out.find("NULL"), std::string::npos);
  EXPECT_EQ(on_db({"--format", "xml", "query", "Select 1"}).code, 2);
}

TEST_F(Cli, QueryFailures) {
  load_sp2();
  EXPECT_EQ(on_db({"query", "Select * From NOPE"}).code, 1);
  EXPECT_EQ(on_db({"query", "Selec * From SP"}).code, 3);
  EXPECT_EQ(on_db({"query", "Update SP Set SNAME = 'x'"}).code, 1);
}

TEST_F(Cli, ExplainSp) {
  load_sp2();
  Result r = on_db({"explain", "SP"});
  EXPECT_EQ(r.code, 0);
  std::string golden = test::read_file(std::string(SIRSQL_GOLDEN) + "/sp2_plan.sql");
  EXPECT_NE(golden.find(r.out), std::string::npos);
  EXPECT_EQ(lines(r.out), 3u);
  EXPECT_EQ(lines(on_db({"explain", "S"}).out), 1u);
  EXPECT_EQ(on_db({"explain", "NOPE"}).code, 2);
}

TEST_F(Cli, ExplainAlteredP) {
  load_sp2();
  ASSERT_EQ(on_db({"apply", test::fixture_path("sp3_alters.sirsql")}).code, 0);
  Result r = on_db({"explain", "P"});
  EXPECT_EQ(r.out, test::read_file(std::string(SIRSQL_GOLDEN) + "/sp3_p_plan.sql"));
}

TEST_F(Cli, Decompose) {
  Result r = cli({"decompose", test::fixture_path("supplier_emails.deps")});
  EXPECT_EQ(r.code, 0);
  for (const auto& name : {"Create Table S (", "Create Table P (", "Create Table SP (", "Create Table SE ("})
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
  Result h = cli({"decompose", "--heath-first", test::fixture_path("supplier_emails.deps")});
  EXPECT_NE(h.out.find("Create Table S_PRIME ("), std::string::npos);
  EXPECT_NE(h.out.find("Create Table SP_PRIME ("), std::string::npos);
  Result flat = cli({"decompose", "-"}, "RELATION R(A, B Int)\nA -> B\n");
  EXPECT_EQ(flat.out, "Create Table R (\n  A Char,\n  B Int,\n  Primary Key (A)\n);\n");
  EXPECT_EQ(cli({"decompose", "-"}, "A -> B").code, 3);
}

TEST_F(Cli, DecomposeOutputApplies) {
  Result r = cli({"decompose", test::fixture_path("supplier_emails.deps")});
  Result a = on_db({"apply", "-"}, r.out);
  EXPECT_EQ(a.code, 0) << a.err;
}

TEST_F(Cli, Check) {
  load_sp2();
  Result ok = on_db({"check", "SP"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.out, "ok\n");
  ASSERT_EQ(on_db({"apply", test::fixture_path("sp3_alters.sirsql")}).code, 0);
  EXPECT_EQ(on_db({"check", "P"}).out, "ok\n");
  {
    SqliteKernel k(db_);
    k.set_foreign_keys(false);
    k.execute("CREATE TABLE SX AS SELECT * FROM S_B; DROP TABLE S_B;");
    k.execute("CREATE TABLE S_B ([S#] Char, SNAME Char, CITY Char); INSERT INTO S_B SELECT * FROM SX;");
    k.execute("INSERT INTO S_B VALUES ('S2', 'Jones', 'Paris'); DROP TABLE SX;");
  }
  Result bad = on_db({"check", "SP"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(lines(bad.out), 2u);
  EXPECT_NE(bad.out.find("I_S: (S2, P1) matches 2 tuples"), std::string::npos);
}

TEST_F(Cli, KernelFromEnvironment) {
  setenv("SIRSQL_KERNEL", db_.c_str(), 1);
  EXPECT_EQ(cli({"apply", test::fixture_path("sp2_schema.sirsql")}).code, 0);
  unsetenv("SIRSQL_KERNEL");
  EXPECT_EQ(on_db({"explain", "SP"}).code, 0);
  setenv("SIRSQL_KERNEL", "/nonexistent/dir/x.db", 1);
  EXPECT_EQ(on_db({"explain", "SP"}).code, 0);
  unsetenv("SIRSQL_KERNEL");
  Result none = cli({"explain", "SP"});
  EXPECT_EQ(none.code, 2);
  EXPECT_NE(none.err.find("no kernel location"), std::string::npos);
}

TEST_F(Cli, RewriteToBaseFlag) {
  load_sp2();
  std::string circ = tmp("circ2.sirsql", "Alter Table S Alter STATUS As STATUS (Select Int (SUM(QTY) / 100) From SP Where S.S# = S#);");
  EXPECT_EQ(on_db({"apply", circ}).code, 2);
  EXPECT_EQ(on_db({"--rewrite-to-base", "apply", circ}).code, 0);
  EXPECT_EQ(on_db({"--format", "csv", "query", "Select S#, STATUS From S Order By S#"}).out,
            "S#,STATUS\nS1,13\nS2,7\nS3,2\nS4,9\nS5,\n");
}

TEST_F(Cli, ReplMatchesOneShot) {
  std::string script = test::fixture("sp2_schema.sirsql") + test::fixture("sp2_data.sirsql");
  std::string q = "Select P#, PNAME, QTY From SP Where SNAME ='Smith';\n";
  Result repl = on_db({"repl"}, script + q + ".explain SP\n.check SP\n.quit\n");
  EXPECT_EQ(repl.code, 0) << repl.err;

  std::string other = ::testing::TempDir() + "cli_oneshot.db";
  std::remove(other.c_str());
  Result a = cli({"--kernel", other, "apply", "-"}, script);
  Result b = cli({"--kernel", other, "query", q});
  Result c = cli({"--kernel", other, "explain", "SP"});
  Result d = cli({"--kernel", other, "check", "SP"});
  std::string applied = a.out.substr(0, a.out.rfind("9 kernel objects"));
  EXPECT_EQ(repl.out, applied + b.out + c.out + d.out);
  std::remove(other.c_str());
}

TEST_F(Cli, ReplDotCommandsAndErrors) {
  load_sp2();
  Result r = on_db({"repl"}, ".schema S\nSelect * From NOPE;\n.bogus\nSelect COUNT(*)\n  From SP;\n");
  EXPECT_NE(r.out.find("CREATE TABLE S ("), std::string::npos);
  EXPECT_NE(r.err.find("UnknownRelation"), std::string::npos);
  EXPECT_NE(r.err.find("unknown command .bogus"), std::string::npos);
  EXPECT_NE(r.out.find("12"), std::string::npos);
}

TEST_F(Cli, StrictIntegrityFlag) {
  load_sp2();
  Result r = on_db({"--strict-integrity", "query", "Insert Into SP Values ('S1', 'P1', 5)"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("KernelError"), std::string::npos);
  Result ok = on_db({"--strict-integrity", "query", "Insert Into SP Values ('S3', 'P1', 50)"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(ok.out, "Insert SP: 1 row\n");
}

TEST_F(Cli, Usage) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}
