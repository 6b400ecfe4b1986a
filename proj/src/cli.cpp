#include "sirsql/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "sirsql/engine.hpp"
#include "sirsql/format.hpp"
#include "sirsql/ident.hpp"
#include "sirsql/normalizer.hpp"
#include "sirsql/render.hpp"
#include "sirsql/sqlite_kernel.hpp"

namespace sirsql {

namespace {

struct Config {
  std::string kernel;
  std::string format = "table";
  bool rewrite_to_base = false;
  bool skip_redundant_full_view = false;
  bool collapse_value_ies = false;
  bool strict_integrity = false;
  bool heath_first = false;
};

bool is_parse_error(const Error& e) {
  return e.code() == Errc::SyntaxError || e.code() == Errc::UnterminatedStatement;
}

std::string read_input(const std::string& path, std::istream& in) {
  if (path == "-") return {std::istreambuf_iterator<char>(in), {}};
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::UnknownObject, "cannot read " + path, {path});
  return {std::istreambuf_iterator<char>(f), {}};
}

std::string join(const std::vector<std::string>& v, std::string_view sep = ", ") {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : std::string(sep)) + s;
  return out;
}

std::string verb(const ast::StatementNode& n) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ast::CreateTable>) return "Create Table " + s.name;
        else if constexpr (std::is_same_v<T, ast::CreateView>) return "Create View " + s.name;
        else if constexpr (std::is_same_v<T, ast::AlterTable>) return "Alter Table " + s.name;
        else if constexpr (std::is_same_v<T, ast::DropTable>) return "Drop Table " + s.name;
        else if constexpr (std::is_same_v<T, ast::DropView>) return "Drop View " + s.name;
        else if constexpr (std::is_same_v<T, ast::CreateIndex>) return "Create Index " + s.name;
        else if constexpr (std::is_same_v<T, ast::Select>) return "Select";
        else if constexpr (std::is_same_v<T, ast::Insert>) return "Insert " + s.table;
        else if constexpr (std::is_same_v<T, ast::Update>) return "Update " + s.table;
        else return "Delete " + s.table;
      },
      n);
}

class Session {
 public:
  Session(const Config& cfg, OutputFormat fmt, std::ostream& out, std::ostream& err)
      : cfg_(cfg), fmt_(fmt), out_(out), err_(err) {}

  void open(const std::string& location) {
    kernel_ = std::make_unique<SqliteKernel>(location);
    EngineOptions opts;
    opts.compile.rewrite_to_base = cfg_.rewrite_to_base;
    opts.compile.skip_redundant_full_view = cfg_.skip_redundant_full_view;
    opts.compile.collapse_value_ies = cfg_.collapse_value_ies;
    opts.strict_integrity = cfg_.strict_integrity;
    engine_ = std::make_unique<Engine>(*kernel_, opts);
  }

  Engine& engine() { return *engine_; }

  void report(const ast::Statement& stmt, const Outcome& o) {
    switch (o.kind) {
      case Outcome::Kind::Query: out_ << format_rows(o.rows, fmt_); break;
      case Outcome::Kind::Write:
        out_ << verb(stmt.node) << ": " << o.changed << (o.changed == 1 ? " row\n" : " rows\n");
        break;
      case Outcome::Kind::Definition:
        out_ << verb(stmt.node);
        if (!o.objects.empty()) out_ << ": " << join(o.objects);
        if (!o.removed.empty()) out_ << " (removed " << join(o.removed) << ")";
        out_ << "\n";
        break;
    }
  }

  /// Runs one parsed statement, reporting failures; returns the exit code.
  int run(const ast::Statement& stmt, int failure_code) {
    try {
      report(stmt, engine_->execute(stmt));
      return Ok;
    } catch (const Error& e) {
      err_ << "error: " << e.what() << "\n";
      return is_parse_error(e) ? ParseFailure : failure_code;
    }
  }

  int explain(const std::string& relation) {
    for (const auto& ddl : engine_->explain(relation)) out_ << ddl << ";\n";
    return Ok;
  }

  int check(const std::string& relation) {
    auto v = engine_->check(relation);
    if (v.empty()) {
      out_ << "ok\n";
      return Ok;
    }
    for (const auto& x : v) {
      std::vector<std::string> key;
      for (const auto& k : x.key) key.push_back(k.is_null() ? "NULL" : k.to_string());
      out_ << x.ie << ": (" << join(key) << ") matches " << x.matches << " tuples\n";
    }
    return RuntimeFailure;
  }

  int schema(const std::string& relation) {
    for (const auto& e : engine_->catalog().entries())
      if (relation.empty() || iequals(e.name, relation)) out_ << render_sir(e.definition) << ";\n";
    if (!relation.empty()) engine_->catalog().get(relation);
    return Ok;
  }

 private:
  const Config& cfg_;
  OutputFormat fmt_;
  std::ostream& out_;
  std::ostream& err_;
  std::unique_ptr<SqliteKernel> kernel_;
  std::unique_ptr<Engine> engine_;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

int repl(Session& s, std::istream& in, std::ostream& out, std::ostream& err) {
  std::string buffer, line;
  int last = Ok;
  auto prompt = [&] { err << (buffer.empty() ? "sirsql> " : "   ...> ") << std::flush; };
  prompt();
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (buffer.empty() && !t.empty() && t[0] == '.') {
      std::istringstream words(t);
      std::string cmd, arg;
      words >> cmd >> arg;
      try {
        if (cmd == ".quit" || cmd == ".exit") return last;
        if (cmd == ".explain") last = s.explain(arg);
        else if (cmd == ".check") last = s.check(arg);
        else if (cmd == ".schema") last = s.schema(arg);
        else if (cmd == ".help") out << ".explain R  .check R  .schema [R]  .quit\n";
        else {
          err << "error: unknown command " << cmd << "\n";
          last = SemanticFailure;
        }
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        last = SemanticFailure;
      }
      prompt();
      continue;
    }
    buffer += line + "\n";
    if (t.empty() || t.back() != ';') {
      if (trim(buffer).empty()) buffer.clear();
      prompt();
      continue;
    }
    try {
      auto parsed = parse_script(buffer);
      for (const auto& w : parsed.warnings) err << "warning: " << w.message << "\n";
      last = Ok;
      for (const auto& stmt : parsed.statements) {
        last = s.run(stmt, stmt.is<ast::Select>() ? RuntimeFailure : SemanticFailure);
        if (last != Ok) break;
      }
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      last = ParseFailure;
    }
    buffer.clear();
    prompt();
  }
  return last;
}

int decompose(const Config& cfg, const std::string& path, std::istream& in, std::ostream& out) {
  Normalization n = normalize(parse_dependencies(read_input(path, in)), cfg.heath_first);
  out << n.sirsql();
  std::string trace = n.trace_text();
  if (!trace.empty()) {
    out << "\n";
    std::istringstream lines(trace);
    for (std::string l; std::getline(lines, l);) out << "-- " << l << "\n";
  }
  return Ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"SIR layer over an embedded SQLite kernel", args.empty() ? "sirsql" : args.front()};
  app.require_subcommand(1);
  app.add_option("--kernel", cfg.kernel, "Kernel database file (or :memory:)");
  app.add_option("--format", cfg.format, "Row output format")->check(CLI::IsMember({"table", "csv", "json-lines"}));
  app.add_flag("--rewrite-to-base", cfg.rewrite_to_base, "Rewrite circular IE reads to the base table");
  app.add_flag("--skip-redundant-full-view", cfg.skip_redundant_full_view, "Merge the reordering view into the last stage");
  app.add_flag("--collapse-value-ies", cfg.collapse_value_ies, "Compile consecutive value IEs into one stage");
  app.add_flag("--strict-integrity", cfg.strict_integrity, "Reject inserts whose IEs find no tuple");

  std::string file, sql, relation;
  auto* apply = app.add_subcommand("apply", "Execute a script of statements");
  apply->add_option("file", file, "Script path, - for stdin")->required();
  auto* query = app.add_subcommand("query", "Execute one statement and print its rows");
  query->add_option("sql", sql, "Statement text")->required();
  auto* explain = app.add_subcommand("explain", "Print the kernel DDL of a relation");
  explain->add_option("relation", relation)->required();
  auto* check = app.add_subcommand("check", "Report tuples for which an IE matches more than once");
  check->add_option("relation", relation)->required();
  auto* decomp = app.add_subcommand("decompose", "Normalize a universal relation into SIR schemes");
  decomp->add_option("file", file, "Dependency file, - for stdin")->required();
  decomp->add_flag("--heath-first", cfg.heath_first, "Apply Heath steps before Fagin steps");
  auto* shell = app.add_subcommand("repl", "Interactive shell");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? Ok : SemanticFailure;
  }

  OutputFormat fmt = *parse_format(cfg.format);
  try {
    if (decomp->parsed()) return decompose(cfg, file, in, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_parse_error(e) ? ParseFailure : SemanticFailure;
  }

  if (cfg.kernel.empty())
    if (const char* env = std::getenv("SIRSQL_KERNEL")) cfg.kernel = env;
  if (cfg.kernel.empty()) {
    if (!shell->parsed()) {
      err << "error: no kernel location; pass --kernel or set SIRSQL_KERNEL\n";
      return SemanticFailure;
    }
    cfg.kernel = ":memory:";
  }

  Session s(cfg, fmt, out, err);
  try {
    s.open(cfg.kernel);
    if (apply->parsed()) {
      ParseResult parsed = parse_script(read_input(file, in));
      for (const auto& w : parsed.warnings)
        err << "warning: line " << w.line << ": " << w.message << "\n";
      for (const auto& stmt : parsed.statements)
        if (int code = s.run(stmt, SemanticFailure); code != Ok) return code;
      auto objects = s.engine().kernel().list_objects();
      std::vector<std::string> names;
      for (const auto& o : objects) names.push_back(o.name);
      out << objects.size() << " kernel objects: " << join(names) << "\n";
      return Ok;
    }
    if (query->parsed()) return s.run(parse_statement(sql), RuntimeFailure);
    if (explain->parsed()) return s.explain(relation);
    if (check->parsed()) return s.check(relation);
    return repl(s, in, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (is_parse_error(e)) return ParseFailure;
    return query->parsed() ? RuntimeFailure : SemanticFailure;
  }
}

}  // namespace sirsql
