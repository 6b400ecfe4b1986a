#include "sirsql/parser.hpp"

#include <set>

#include "sirsql/error.hpp"
#include "sirsql/ident.hpp"
#include "sirsql/lexer.hpp"

namespace sirsql {

using namespace ast;

namespace {

class Parser {
 public:
  Parser(std::string_view source, std::vector<Diagnostic>* warnings)
      : src_(source), toks_(tokenize(source)), warnings_(warnings) {}

  std::vector<Statement> script() {
    std::vector<Statement> out;
    for (;;) {
      while (accept_symbol(";")) {
      }
      if (at_end()) return out;
      const Token& first = peek();
      Statement st;
      st.pos = {first.line, first.column, first.offset};
      st.node = statement();
      if (at_end()) {
        throw SyntaxError(Errc::UnterminatedStatement, "statement is not terminated by ';'",
                          peek().line, peek().column, {";"});
      }
      const Token& semi = peek();
      expect_symbol(";");
      st.text = std::string(src_.substr(first.offset, semi.end - first.offset));
      out.push_back(std::move(st));
    }
  }

  Statement single() {
    const Token& first = peek();
    Statement st;
    st.pos = {first.line, first.column, first.offset};
    st.node = statement();
    std::size_t end = toks_[idx_ > 0 ? idx_ - 1 : 0].end;
    accept_symbol(";");
    if (!at_end()) fail({"end of input"});
    st.text = std::string(src_.substr(first.offset, end - first.offset));
    return st;
  }

  Select select_only() {
    Select s = select();
    accept_symbol(";");
    if (!at_end()) fail({"end of input"});
    return s;
  }

  Expr expr_only() {
    Expr e = expr();
    if (!at_end()) fail({"end of input"});
    return e;
  }

 private:
  // ---- token helpers -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(idx_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_end() const { return peek().kind == TokenKind::End; }
  const Token& next() {
    const Token& t = toks_[idx_];
    if (idx_ + 1 < toks_.size()) ++idx_;
    return t;
  }

  bool is_word(const Token& t, std::string_view w) const {
    return t.kind == TokenKind::Word && iequals(t.text, w);
  }
  bool peek_word(std::string_view w, std::size_t ahead = 0) const {
    return is_word(peek(ahead), w);
  }
  bool accept_word(std::string_view w) {
    if (!peek_word(w)) return false;
    next();
    return true;
  }
  void expect_word(std::string_view w) {
    if (!accept_word(w)) fail({to_upper(w)});
  }
  bool peek_symbol(std::string_view s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Symbol && t.text == s;
  }
  bool accept_symbol(std::string_view s) {
    if (!peek_symbol(s)) return false;
    next();
    return true;
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail({std::string(s)});
  }

  bool peek_identifier(std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::QuotedIdent ||
           (t.kind == TokenKind::Word && !is_reserved_word(t.text));
  }
  std::string identifier() {
    if (!peek_identifier()) fail({"identifier"});
    return next().text;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(Errc::SyntaxError, "unexpected " + found, t.line, t.column,
                      std::move(expected));
  }

  void warn(const Token& at, std::string message) {
    if (warnings_) warnings_->push_back({at.line, at.column, std::move(message)});
  }

  // ---- statements ----------------------------------------------------------

  StatementNode statement() {
    if (peek_word("SELECT")) return select();
    if (accept_word("CREATE")) {
      if (accept_word("TABLE")) return create_table();
      if (accept_word("VIEW")) return create_view();
      bool unique = accept_word("UNIQUE");
      if (accept_word("INDEX")) return create_index(unique);
      fail({"TABLE", "VIEW", "INDEX"});
    }
    if (accept_word("ALTER")) {
      expect_word("TABLE");
      return alter_table();
    }
    if (accept_word("DROP")) {
      if (accept_word("TABLE")) {
        DropTable d;
        d.name = identifier();
        drop_mode(d.mode, d.mode_explicit);
        return d;
      }
      if (accept_word("VIEW")) {
        DropView d;
        d.name = identifier();
        drop_mode(d.mode, d.mode_explicit);
        return d;
      }
      fail({"TABLE", "VIEW"});
    }
    if (accept_word("INSERT")) return insert();
    if (accept_word("UPDATE")) return update();
    if (accept_word("DELETE")) return remove();
    fail({"SELECT", "CREATE", "ALTER", "DROP", "INSERT", "UPDATE", "DELETE"});
  }

  void drop_mode(DropMode& mode, bool& explicit_mode) {
    if (accept_word("CASCADE")) {
      mode = DropMode::Cascade;
      explicit_mode = true;
    } else if (accept_word("RESTRICT")) {
      mode = DropMode::Restrict;
      explicit_mode = true;
    }
  }

  CreateTable create_table() {
    CreateTable ct;
    const Token& at = peek();
    ct.name = identifier();
    expect_symbol("(");
    do {
      ct.elements.push_back(table_element());
    } while (accept_symbol(","));
    expect_symbol(")");
    check_duplicates(ct, at);
    return ct;
  }

  static void collect_names(const TableElement& el, std::vector<std::string>& attrs,
                            std::vector<std::pair<std::string, std::vector<std::string>>>& ies) {
    if (const auto* a = std::get_if<AttributeDecl>(&el)) {
      attrs.push_back(a->name);
    } else if (const auto* ie = std::get_if<IeDecl>(&el)) {
      std::vector<std::string> produced;
      if (ie->form == IeDecl::Form::Value) {
        for (const auto& v : ie->values) produced.push_back(v.name);
      } else {
        for (const auto& item : ie->select.items) {
          if (item.kind != SelectItem::Kind::Expr) continue;
          if (!item.alias.empty())
            produced.push_back(item.alias);
          else if (item.expr.kind == ExprKind::Column)
            produced.push_back(item.expr.text);
        }
      }
      attrs.insert(attrs.end(), produced.begin(), produced.end());
      ies.emplace_back(ie->name, std::move(produced));
    }
  }

  // One namespace per relation: attribute names are unique, and an IE name
  // may coincide only with the single attribute it produces.
  void check_duplicates(const CreateTable& ct, const Token& at) const {
    std::vector<std::string> attrs;
    std::vector<std::pair<std::string, std::vector<std::string>>> ies;
    for (const auto& el : ct.elements) collect_names(el, attrs, ies);
    std::set<std::string, ILess> seen;
    for (const auto& a : attrs) {
      if (!seen.insert(a).second) {
        throw SyntaxError(Errc::DuplicateAttribute,
                          "attribute '" + a + "' declared twice in " + ct.name, at.line,
                          at.column);
      }
    }
    std::set<std::string, ILess> ie_names;
    for (const auto& [name, produced] : ies) {
      if (!ie_names.insert(name).second) {
        throw SyntaxError(Errc::DuplicateAttribute, "IE '" + name + "' declared twice",
                          at.line, at.column);
      }
      bool own = produced.size() == 1 && iequals(produced[0], name);
      if (!own && seen.count(name)) {
        throw SyntaxError(Errc::DuplicateAttribute,
                          "IE name '" + name + "' collides with an attribute", at.line,
                          at.column);
      }
    }
  }

  std::vector<std::string> name_list() {
    std::vector<std::string> out;
    expect_symbol("(");
    do {
      out.push_back(identifier());
    } while (accept_symbol(","));
    expect_symbol(")");
    return out;
  }

  ForeignRef references() {
    ForeignRef ref;
    ref.table = identifier();
    if (peek_symbol("(")) ref.columns = name_list();
    return ref;
  }

  TableElement table_element() {
    if (accept_word("CONSTRAINT")) identifier();
    if (peek_word("PRIMARY") && peek_word("KEY", 1)) {
      next();
      next();
      TableConstraint c;
      c.kind = TableConstraint::Kind::PrimaryKey;
      c.columns = name_list();
      return c;
    }
    if (peek_word("UNIQUE") && peek_symbol("(", 1)) {
      next();
      TableConstraint c;
      c.kind = TableConstraint::Kind::Unique;
      c.columns = name_list();
      return c;
    }
    if (peek_word("FOREIGN") && peek_word("KEY", 1)) {
      next();
      next();
      TableConstraint c;
      c.kind = TableConstraint::Kind::ForeignKey;
      c.columns = name_list();
      expect_word("REFERENCES");
      c.references = references();
      return c;
    }

    std::string name = identifier();
    if (peek_symbol("(")) return ie_body(std::move(name));
    if (accept_word("AS")) return value_shorthand(std::move(name));

    AttributeDecl a;
    a.name = std::move(name);
    if (peek().kind != TokenKind::Word) fail({"type name", "(", "AS"});
    a.sql_type = next().text;
    if (accept_symbol("(")) {
      a.sql_type += "(";
      do {
        if (peek().kind != TokenKind::Number) fail({"number"});
        a.sql_type += next().text;
        if (peek_symbol(",")) a.sql_type += ",";
      } while (accept_symbol(","));
      expect_symbol(")");
      a.sql_type += ")";
    }
    for (;;) {
      if (peek_word("PRIMARY") && peek_word("KEY", 1)) {
        next();
        next();
        a.is_primary_key = true;
      } else if (peek_word("NOT") && peek_word("NULL", 1)) {
        next();
        next();
        a.not_null = true;
      } else if (accept_word("UNIQUE")) {
        a.unique = true;
      } else if (accept_word("REFERENCES")) {
        a.references = references();
      } else {
        break;
      }
    }
    return a;
  }

  IeDecl ie_body(std::string name) {
    IeDecl ie;
    ie.name = std::move(name);
    expect_symbol("(");
    if (peek_word("SELECT")) {
      ie.form = IeDecl::Form::Select;
      ie.select = select();
    } else {
      ie.form = IeDecl::Form::Value;
      do {
        ValueItem v;
        v.expr = expr();
        accept_word("AS");
        v.name = identifier();
        ie.values.push_back(std::move(v));
      } while (accept_symbol(","));
    }
    expect_symbol(")");
    trailing_from(ie);
    return ie;
  }

  IeDecl value_shorthand(std::string name) {
    IeDecl ie;
    ie.name = name;
    ie.form = IeDecl::Form::Value;
    ie.shorthand = true;
    expect_symbol("(");
    ValueItem v;
    v.expr = expr();
    v.name = std::move(name);
    ie.values.push_back(std::move(v));
    expect_symbol(")");
    trailing_from(ie);
    return ie;
  }

  void trailing_from(IeDecl& ie) {
    if (!peek_word("FROM")) return;
    const Token& at = next();
    ie.trailing_from = identifier();
    warn(at, "ignoring 'FROM " + ie.trailing_from + "' after inheritance expression " + ie.name);
  }

  CreateView create_view() {
    CreateView v;
    v.name = identifier();
    if (peek_symbol("(")) v.columns = name_list();
    expect_word("AS");
    v.select = select();
    return v;
  }

  CreateIndex create_index(bool unique) {
    CreateIndex ci;
    ci.unique = unique;
    ci.name = identifier();
    expect_word("ON");
    ci.table = identifier();
    ci.columns = name_list();
    return ci;
  }

  bool at_action_start() const {
    return peek_word("ADD") || peek_word("ALTER") || peek_word("DROP");
  }

  AlterTable alter_table() {
    AlterTable at;
    at.name = identifier();
    do {
      if (!at_action_start()) {
        if (at.actions.empty() || at.actions.back().kind != AlterAction::Kind::Add)
          fail({"ADD", "ALTER", "DROP"});
        at.actions.back().elements.push_back(table_element());
        continue;
      }
      at.actions.push_back(alter_action());
    } while (accept_symbol(","));
    return at;
  }

  AlterAction alter_action() {
    AlterAction act;
    if (accept_word("ADD")) {
      act.kind = AlterAction::Kind::Add;
      accept_word("COLUMN");
      if ((peek_word("BEFORE") || peek_word("AFTER")) && peek_identifier(1) &&
          !peek_symbol("(", 2) && !peek_word("AS", 2) && peek_identifier(2)) {
        act.position = next().text.size() == 6 ? Position::Before : Position::After;
        act.anchor = identifier();
      }
      act.elements.push_back(table_element());
      return act;
    }
    if (accept_word("ALTER")) {
      act.kind = AlterAction::Kind::Alter;
      accept_word("COLUMN");
      act.target = identifier();
      expect_word("AS");
      if (peek_symbol("(")) {
        act.replacement = value_shorthand(act.target);
      } else {
        TableElement el = table_element();
        auto* ie = std::get_if<IeDecl>(&el);
        if (!ie) fail({"inheritance expression"});
        act.replacement = std::move(*ie);
      }
      return act;
    }
    expect_word("DROP");
    act.kind = AlterAction::Kind::Drop;
    accept_word("COLUMN");
    act.target = identifier();
    return act;
  }

  Insert insert() {
    Insert ins;
    accept_word("INTO");
    ins.table = identifier();
    if (peek_symbol("(") && peek_word("SELECT", 1)) {
      next();
      ins.select = select();
      ins.parenthesized_select = true;
      expect_symbol(")");
      return ins;
    }
    if (peek_symbol("(")) ins.columns = name_list();
    if (accept_word("VALUES")) {
      do {
        expect_symbol("(");
        std::vector<Expr> row;
        do {
          row.push_back(expr());
        } while (accept_symbol(","));
        expect_symbol(")");
        ins.rows.push_back(std::move(row));
      } while (accept_symbol(","));
    } else if (peek_word("SELECT")) {
      ins.select = select();
    } else if (peek_symbol("(") && peek_word("SELECT", 1)) {
      next();
      ins.select = select();
      ins.parenthesized_select = true;
      expect_symbol(")");
    } else {
      fail({"VALUES", "SELECT"});
    }
    return ins;
  }

  Update update() {
    Update up;
    up.table = identifier();
    expect_word("SET");
    do {
      Assignment a;
      a.column = identifier();
      expect_symbol("=");
      a.value = expr();
      up.assignments.push_back(std::move(a));
    } while (accept_symbol(","));
    if (accept_word("WHERE")) up.where = expr();
    return up;
  }

  Delete remove() {
    Delete d;
    accept_word("FROM");
    d.table = identifier();
    if (accept_word("WHERE")) d.where = expr();
    return d;
  }

  // ---- SELECT --------------------------------------------------------------

  Select select() {
    expect_word("SELECT");
    Select s;
    if (accept_word("DISTINCT"))
      s.distinct = true;
    else
      accept_word("ALL");
    if (accept_word("TOP")) {
      if (peek().kind != TokenKind::Number) fail({"number"});
      s.limit = std::stoll(next().text);
      s.top_style = true;
    }
    do {
      s.items.push_back(select_item());
    } while (accept_symbol(","));
    if (accept_word("FROM")) {
      do {
        s.from.push_back(table_ref());
      } while (accept_symbol(","));
    }
    if (accept_word("WHERE")) s.where = expr();
    if (peek_word("GROUP")) {
      next();
      expect_word("BY");
      do {
        s.group_by.push_back(expr());
      } while (accept_symbol(","));
    }
    if (accept_word("HAVING")) s.having = expr();
    if (peek_word("ORDER")) {
      next();
      expect_word("BY");
      do {
        OrderItem o;
        o.expr = expr();
        if (accept_word("DESC"))
          o.descending = true;
        else
          accept_word("ASC");
        s.order_by.push_back(std::move(o));
      } while (accept_symbol(","));
    }
    if (!s.limit && accept_word("LIMIT")) {
      if (peek().kind != TokenKind::Number) fail({"number"});
      s.limit = std::stoll(next().text);
    }
    return s;
  }

  QualifiedName qualified_name() {
    QualifiedName q;
    q.name = identifier();
    if (accept_symbol(".")) {
      q.qualifier = std::move(q.name);
      q.name = identifier();
    }
    return q;
  }

  SelectItem select_item() {
    SelectItem item;
    if (accept_symbol("*")) {
      if (accept_symbol("/")) {
        item.kind = SelectItem::Kind::StarMinus;
        if (accept_symbol("(")) {
          do {
            item.excluded.push_back(qualified_name());
          } while (accept_symbol(","));
          expect_symbol(")");
        } else {
          item.excluded.push_back(qualified_name());
        }
      } else {
        item.kind = SelectItem::Kind::Star;
      }
      return item;
    }
    if (peek_identifier() && peek_symbol(".", 1) && peek_symbol("*", 2)) {
      item.kind = SelectItem::Kind::Star;
      item.qualifier = identifier();
      next();
      next();
      return item;
    }
    item.expr = expr();
    if (accept_word("AS"))
      item.alias = identifier();
    else if (peek_identifier())
      item.alias = identifier();
    return item;
  }

  TableRef table_primary() {
    if (accept_symbol("(")) {
      if (peek_word("SELECT")) {
        TableRef t;
        t.kind = TableRef::Kind::Derived;
        t.derived = select();
        expect_symbol(")");
        accept_word("AS");
        t.alias = identifier();
        return t;
      }
      TableRef inner = table_ref();
      expect_symbol(")");
      return inner;
    }
    TableRef t = TableRef::named(identifier());
    if (accept_word("AS"))
      t.alias = identifier();
    else if (peek_identifier())
      t.alias = identifier();
    return t;
  }

  TableRef table_ref() {
    TableRef left = table_primary();
    for (;;) {
      JoinKind kind;
      if (accept_word("JOIN")) {
        kind = JoinKind::Inner;
      } else if (peek_word("INNER")) {
        next();
        expect_word("JOIN");
        kind = JoinKind::Inner;
      } else if (peek_word("LEFT") || peek_word("RIGHT")) {
        kind = next().text.size() == 4 ? JoinKind::Left : JoinKind::Right;
        accept_word("OUTER");
        expect_word("JOIN");
      } else if (peek_word("CROSS")) {
        next();
        expect_word("JOIN");
        kind = JoinKind::Cross;
      } else {
        return left;
      }
      TableRef j;
      j.kind = TableRef::Kind::Join;
      j.join = kind;
      j.left = std::move(left);
      j.right = table_primary();
      if (kind != JoinKind::Cross) {
        expect_word("ON");
        j.on = expr();
      }
      left = std::move(j);
    }
  }

  // ---- expressions ---------------------------------------------------------

  Expr expr() { return or_expr(); }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (accept_word("OR")) lhs = Expr::binary("OR", std::move(lhs), and_expr());
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = not_expr();
    while (accept_word("AND")) lhs = Expr::binary("AND", std::move(lhs), not_expr());
    return lhs;
  }

  Expr not_expr() {
    if (peek_word("NOT") && !peek_word("EXISTS", 1)) {
      next();
      Expr e;
      e.kind = ExprKind::Unary;
      e.text = "NOT";
      e.args.push_back(not_expr());
      return e;
    }
    return comparison();
  }

  Expr comparison() {
    Expr lhs = additive();
    static constexpr std::string_view ops[] = {"=", "<>", "<", ">", "<=", ">="};
    for (auto op : ops) {
      if (accept_symbol(op)) return Expr::binary(std::string(op), std::move(lhs), additive());
    }
    if (accept_word("IS")) {
      Expr e;
      e.kind = ExprKind::IsNull;
      e.negated = accept_word("NOT");
      expect_word("NULL");
      e.args.push_back(std::move(lhs));
      return e;
    }
    bool negated = false;
    if (peek_word("NOT") && (peek_word("IN", 1) || peek_word("BETWEEN", 1) || peek_word("LIKE", 1))) {
      next();
      negated = true;
    }
    if (accept_word("IN")) {
      expect_symbol("(");
      Expr e;
      e.negated = negated;
      e.args.push_back(std::move(lhs));
      if (peek_word("SELECT")) {
        e.kind = ExprKind::InSelect;
        e.subquery = select();
      } else {
        e.kind = ExprKind::InList;
        do {
          e.args.push_back(expr());
        } while (accept_symbol(","));
      }
      expect_symbol(")");
      return e;
    }
    if (accept_word("BETWEEN")) {
      Expr e;
      e.kind = ExprKind::Between;
      e.negated = negated;
      e.args.push_back(std::move(lhs));
      e.args.push_back(additive());
      expect_word("AND");
      e.args.push_back(additive());
      return e;
    }
    if (accept_word("LIKE")) {
      Expr e;
      e.kind = ExprKind::Like;
      e.negated = negated;
      e.args.push_back(std::move(lhs));
      e.args.push_back(additive());
      return e;
    }
    if (negated) fail({"IN", "BETWEEN", "LIKE"});
    return lhs;
  }

  Expr additive() {
    Expr lhs = multiplicative();
    for (;;) {
      if (peek_symbol("+") || peek_symbol("-") || peek_symbol("||")) {
        std::string op = next().text;
        lhs = Expr::binary(op, std::move(lhs), multiplicative());
      } else {
        return lhs;
      }
    }
  }

  Expr multiplicative() {
    Expr lhs = unary();
    for (;;) {
      if (peek_symbol("*") || peek_symbol("/") || peek_symbol("%")) {
        std::string op = next().text;
        lhs = Expr::binary(op, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (peek_symbol("-") || peek_symbol("+")) {
      Expr e;
      e.kind = ExprKind::Unary;
      e.text = next().text;
      e.args.push_back(unary());
      return e;
    }
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == TokenKind::Number) return Expr::number(next().text);
    if (t.kind == TokenKind::String) return Expr::string(next().text);
    if (accept_word("NULL")) return Expr::null();
    if (peek_word("NOT") && peek_word("EXISTS", 1)) {
      next();
      next();
      Expr e = exists_body();
      e.negated = true;
      return e;
    }
    if (accept_word("EXISTS")) return exists_body();
    if (accept_symbol("(")) {
      if (peek_word("SELECT")) {
        Expr e;
        e.kind = ExprKind::Subquery;
        e.subquery = select();
        expect_symbol(")");
        return e;
      }
      Expr inner = expr();
      expect_symbol(")");
      return inner;
    }
    if (t.kind == TokenKind::Word && !is_reserved_word(t.text) && peek_symbol("(", 1)) {
      Expr call;
      call.kind = ExprKind::Call;
      call.text = next().text;
      next();  // (
      if (accept_symbol("*")) {
        Expr star;
        star.kind = ExprKind::Star;
        call.args.push_back(std::move(star));
      } else if (!peek_symbol(")")) {
        call.distinct = accept_word("DISTINCT");
        do {
          call.args.push_back(expr());
        } while (accept_symbol(","));
      }
      expect_symbol(")");
      return call;
    }
    if (peek_identifier()) {
      std::string first = identifier();
      if (accept_symbol(".")) return Expr::column(std::move(first), identifier());
      return Expr::column({}, std::move(first));
    }
    fail({"expression"});
  }

  Expr exists_body() {
    expect_symbol("(");
    Expr e;
    e.kind = ExprKind::Exists;
    e.subquery = select();
    expect_symbol(")");
    return e;
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t idx_ = 0;
  std::vector<Diagnostic>* warnings_;
};

}  // namespace

ParseResult parse_script(std::string_view source) {
  ParseResult r;
  Parser p(source, &r.warnings);
  r.statements = p.script();
  return r;
}

Statement parse_statement(std::string_view source) {
  Parser p(source, nullptr);
  return p.single();
}

Select parse_select(std::string_view source) {
  Parser p(source, nullptr);
  return p.select_only();
}

Expr parse_expr(std::string_view source) {
  Parser p(source, nullptr);
  return p.expr_only();
}

}  // namespace sirsql
