#include "slcc/problem_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace slcc {

std::string ParseError::to_string() const {
  std::ostringstream os;
  os << "parse error at line " << line;
  if (!field.empty()) os << " (" << field << ")";
  os << ": " << message;
  return os.str();
}

namespace {

struct Token {
  enum class Kind { ident, number, punct, end } kind = Kind::end;
  std::string text;
  double num = 0.0;
  int line = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    if (pos_ >= s_.size()) return t;
    const char c = s_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Token::Kind::ident;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        t.text += s_[pos_++];
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      std::size_t end = pos_;
      if (s_[end] == '-' || s_[end] == '+') ++end;
      while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) ||
                                 s_[end] == '.' || s_[end] == 'e' || s_[end] == 'E' ||
                                 ((s_[end] == '-' || s_[end] == '+') &&
                                  (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
        ++end;
      t.text = s_.substr(pos_, end - pos_);
      try {
        std::size_t used = 0;
        t.num = std::stod(t.text, &used);
        if (used != t.text.size()) throw std::invalid_argument("");
      } catch (...) {
        t.kind = Token::Kind::punct;  // force a parse failure upstream
        pos_ = end;
        return t;
      }
      t.kind = Token::Kind::number;
      pos_ = end;
      return t;
    }
    t.kind = Token::Kind::punct;
    t.text = std::string(1, c);
    ++pos_;
    return t;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

struct ParseFail {
  ParseError err;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) { advance(); }

  Problem parse() {
    std::map<std::string, bool> seen;
    Problem p;
    bool have_sys = false, have_sd = false, have_k = false;
    while (cur_.kind != Token::Kind::end) {
      const std::string section = expect_ident("section name");
      expect_punct("{", section);
      if (section == "system") {
        p.sys = parse_system();
        have_sys = true;
      } else if (section == "stochastic") {
        p.sd = parse_stochastic();
        have_sd = true;
      } else if (section == "terminal_set") {
        p.k = parse_terminal();
        have_k = true;
      } else {
        fail(section, "unknown section (expected system, stochastic, terminal_set)");
      }
      expect_punct("}", section);
    }
    if (!have_sys) fail("system", "missing section");
    if (!have_sd) fail("stochastic", "missing section");
    if (!have_k) fail("terminal_set", "missing section");
    try {
      p.sys.validate();
      p.sd.validate();
      if (p.sd.n() != p.sys.n()) throw std::invalid_argument("stochastic n != system n");
      if (p.sd.g_mat0.rows != p.k.dim())
        throw std::invalid_argument("terminal set dimension != g image dimension");
    } catch (const std::invalid_argument& e) {
      fail("", e.what());
    }
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& field, const std::string& msg) {
    throw ParseFail{ParseError{cur_.line, field, msg}};
  }

  void advance() { cur_ = lex_.next(); }

  std::string expect_ident(const std::string& what) {
    if (cur_.kind != Token::Kind::ident) fail(what, "expected identifier");
    std::string t = cur_.text;
    advance();
    return t;
  }

  void expect_punct(const std::string& p, const std::string& field) {
    if (cur_.kind != Token::Kind::punct || cur_.text != p)
      fail(field, "expected '" + p + "'");
    advance();
  }

  bool peek_punct(const std::string& p) const {
    return cur_.kind == Token::Kind::punct && cur_.text == p;
  }

  double expect_number(const std::string& field) {
    if (cur_.kind != Token::Kind::number) fail(field, "expected a number");
    const double v = cur_.num;
    advance();
    return v;
  }

  Vec parse_vector(const std::string& field) {
    expect_punct("[", field);
    Vec v;
    if (!peek_punct("]")) {
      for (;;) {
        v.push_back(expect_number(field));
        if (peek_punct(",")) {
          advance();
          continue;
        }
        break;
      }
    }
    expect_punct("]", field);
    return v;
  }

  Matrix parse_matrix(const std::string& field) {
    expect_punct("[", field);
    std::vector<Vec> rows;
    if (!peek_punct("]")) {
      for (;;) {
        rows.push_back(parse_vector(field));
        if (peek_punct(",")) {
          advance();
          continue;
        }
        break;
      }
    }
    expect_punct("]", field);
    if (!rows.empty())
      for (const Vec& r : rows)
        if (r.size() != rows.front().size()) fail(field, "ragged matrix rows");
    return Matrix::from_rows(rows);
  }

  TimeSignal parse_signal(const std::string& field) {
    const std::string kind = expect_ident(field);
    if (kind == "constant") return TimeSignal::constant(parse_vector(field));
    if (kind == "tabulated") {
      expect_punct("{", field);
      std::vector<double> times;
      std::vector<Vec> values;
      while (!peek_punct("}")) {
        const std::string key = expect_ident(field);
        expect_punct("=", key);
        if (key == "times") {
          const Vec t = parse_vector(key);
          times.assign(t.begin(), t.end());
        } else if (key == "values") {
          const Matrix m = parse_matrix(key);
          for (std::size_t i = 0; i < m.rows; ++i) {
            Vec row(m.cols);
            for (std::size_t j = 0; j < m.cols; ++j) row[j] = m(i, j);
            values.push_back(std::move(row));
          }
        } else {
          fail(key, "unknown tabulated-signal key (expected times, values)");
        }
      }
      expect_punct("}", field);
      try {
        return TimeSignal::tabulated(std::move(times), std::move(values));
      } catch (const std::invalid_argument& e) {
        fail(field, e.what());
      }
    }
    fail(field, "expected 'constant' or 'tabulated'");
  }

  std::vector<DistSpec> parse_dists(const std::string& field) {
    expect_punct("[", field);
    std::vector<DistSpec> out;
    for (;;) {
      const std::string kind = expect_ident(field);
      expect_punct("(", field);
      const double a = expect_number(field);
      expect_punct(",", field);
      const double b = expect_number(field);
      expect_punct(")", field);
      try {
        if (kind == "normal")
          out.push_back(DistSpec::normal(a, b));
        else if (kind == "uniform")
          out.push_back(DistSpec::uniform(a, b));
        else
          fail(field, "unknown distribution (expected normal, uniform)");
      } catch (const std::invalid_argument& e) {
        fail(field, e.what());
      }
      if (peek_punct(",")) {
        advance();
        continue;
      }
      break;
    }
    expect_punct("]", field);
    return out;
  }

  ControlSystem parse_system() {
    ControlSystem sys;
    sys.f = TimeSignal::constant({});
    sys.x_d = TimeSignal::constant({});
    sys.u_d = TimeSignal::constant({});
    bool have_f = false, have_xd = false, have_ud = false;
    while (!peek_punct("}")) {
      const std::string key = expect_ident("system");
      expect_punct("=", key);
      if (key == "A") sys.a = parse_matrix(key);
      else if (key == "B") sys.b = parse_matrix(key);
      else if (key == "C") sys.c = parse_matrix(key);
      else if (key == "D") sys.d = parse_matrix(key);
      else if (key == "f") { sys.f = parse_signal(key); have_f = true; }
      else if (key == "x0") sys.x0 = parse_vector(key);
      else if (key == "T") sys.horizon_t = expect_number(key);
      else if (key == "delta") sys.delta = expect_number(key);
      else if (key == "x_d") { sys.x_d = parse_signal(key); have_xd = true; }
      else if (key == "u_d") { sys.u_d = parse_signal(key); have_ud = true; }
      else fail(key, "unknown system key");
    }
    if (!have_f) sys.f = TimeSignal::constant(Vec(sys.c.rows, 0.0));
    if (!have_xd) sys.x_d = TimeSignal::constant(Vec(sys.a.rows, 0.0));
    if (!have_ud) sys.u_d = TimeSignal::constant(Vec(sys.b.cols, 0.0));
    return sys;
  }

  StochasticData parse_stochastic() {
    StochasticData sd;
    std::map<std::string, Matrix> mats;
    std::map<std::string, Vec> vecs;
    while (!peek_punct("}")) {
      const std::string key = expect_ident("stochastic");
      expect_punct("=", key);
      if (key == "dists") {
        sd.dists = parse_dists(key);
      } else if (key == "F0") {
        sd.f_c0 = expect_number(key);
      } else if (!key.empty() && (key[0] == 'M' || key[0] == 'G')) {
        mats[key] = parse_matrix(key);
      } else if (!key.empty() && (key[0] == 'q' || key[0] == 'g' || key == "F_lin" ||
                                  key == "F_quad" || key == "z_ref")) {
        vecs[key] = parse_vector(key);
      } else {
        fail(key, "unknown stochastic key");
      }
    }
    const std::size_t d = sd.dists.size();
    auto mat_at = [&](const std::string& name, std::size_t rows, std::size_t cols) {
      auto it = mats.find(name);
      return it != mats.end() ? it->second : Matrix(rows, cols);
    };
    auto vec_at = [&](const std::string& name, std::size_t len) {
      auto it = vecs.find(name);
      return it != vecs.end() ? it->second : Vec(len, 0.0);
    };
    if (mats.find("M0") == mats.end()) fail("M0", "missing key");
    sd.m0 = mats["M0"];
    const std::size_t n = sd.m0.rows;
    sd.q0 = vec_at("q0", n);
    if (mats.find("G0") == mats.end()) fail("G0", "missing key");
    sd.g_mat0 = mats["G0"];
    const std::size_t ell = sd.g_mat0.rows;
    sd.g_vec0 = vec_at("g0", ell);
    for (std::size_t k = 1; k <= d; ++k) {
      const std::string suffix = std::to_string(k);
      sd.m_k.push_back(mat_at("M" + suffix, n, n));
      sd.q_k.push_back(vec_at("q" + suffix, n));
      sd.g_mat_k.push_back(mat_at("G" + suffix, ell, n));
      sd.g_vec_k.push_back(vec_at("g" + suffix, ell));
    }
    sd.f_lin = vec_at("F_lin", d);
    sd.f_quad = vec_at("F_quad", d);
    sd.z_ref = vec_at("z_ref", n);
    return sd;
  }

  TerminalSet parse_terminal() {
    std::string kind;
    Vec center, lo, hi, rhs;
    double radius = 0.0;
    Matrix h;
    while (!peek_punct("}")) {
      const std::string key = expect_ident("terminal_set");
      expect_punct("=", key);
      if (key == "kind") kind = expect_ident(key);
      else if (key == "center") center = parse_vector(key);
      else if (key == "radius") radius = expect_number(key);
      else if (key == "lo") lo = parse_vector(key);
      else if (key == "hi") hi = parse_vector(key);
      else if (key == "H") h = parse_matrix(key);
      else if (key == "rhs") rhs = parse_vector(key);
      else fail(key, "unknown terminal_set key");
    }
    try {
      if (kind == "ball") return TerminalSet::ball(center, radius);
      if (kind == "box") return TerminalSet::box(lo, hi);
      if (kind == "polyhedron") return TerminalSet::polyhedron(h, rhs);
    } catch (const std::invalid_argument& e) {
      fail("terminal_set", e.what());
    }
    fail("kind", "expected ball, box or polyhedron");
  }

  Lexer lex_;
  Token cur_;
};

}  // namespace

std::variant<Problem, ParseError> parse_problem(const std::string& text) {
  try {
    Parser p(text);
    return p.parse();
  } catch (const ParseFail& f) {
    return f.err;
  }
}

std::variant<Problem, ParseError> load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) return ParseError{0, path, "cannot open file"};
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

Problem builtin_example5() {
  Problem p;
  p.sys.a = Matrix::from_rows({{0, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 1}});
  p.sys.b = Matrix::from_rows({{1, 0, 0, 0}, {0, -1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, -1}});
  p.sys.c = Matrix::from_rows({{1, 0, 0, 0}, {0, 0, 0, 1}});
  p.sys.d = Matrix::from_rows({{0, 1, 0, 0}, {0, 0, 1, 0}});
  p.sys.f = TimeSignal::constant({0, 0});
  p.sys.x0 = {1, 1, 1, 1};
  p.sys.horizon_t = 1.0;
  p.sys.x_d = TimeSignal::constant({0, 0, 0, 0});
  p.sys.u_d = TimeSignal::constant({0, 0, 0, 0});
  p.sys.delta = 1.0;

  p.sd.dists = {DistSpec::normal(1.0, 0.01), DistSpec::uniform(-1.0, 1.0)};
  p.sd.m0 = Matrix::from_rows({{-2, 0, 0, 0}, {0, 0, -1, 0}, {0, 0, 0, 0}, {-1, 0, 0, 0}});
  p.sd.m_k = {
      Matrix::from_rows({{-1, 0, 0, -1}, {0, 0, 0, 0}, {0, -1, 0, 0}, {0, 0, 0, 1}}),
      Matrix::from_rows({{0, 0, -1, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {1, 0, 0, 0}}),
  };
  p.sd.q0 = {3, 0, 1, 1};
  p.sd.q_k = {{0, 1, 0, 1}, {1, 0, -1, 0}};
  p.sd.g_mat0 = Matrix::from_rows({{1, 0, 1, 0}, {0, 1, 0, 1}});
  p.sd.g_mat_k = {Matrix::from_rows({{0, 0, 0, 0}, {0, 1, 0, 1}}), Matrix(2, 4)};
  p.sd.g_vec0 = {0, 0};
  p.sd.g_vec_k = {{0, 0}, {0, 0}};
  p.sd.f_c0 = 1.0;
  p.sd.f_lin = {0.0, 1.0};   // + xi_2
  p.sd.f_quad = {1.0, 0.0};  // + xi_1^2
  p.sd.z_ref = {0, 0, 0, 0};

  p.k = TerminalSet::ball({0, 0}, std::sqrt(6.0));
  return p;
}

std::string builtin_example5_text() {
  return R"(# four decoupled states, two mixed constraints, ball terminal set
system {
  A = [[0,0,0,0],[0,1,0,0],[0,0,0,0],[0,0,0,1]]
  B = [[1,0,0,0],[0,-1,0,0],[0,0,1,0],[0,0,0,-1]]
  C = [[1,0,0,0],[0,0,0,1]]
  D = [[0,1,0,0],[0,0,1,0]]
  f = constant [0,0]
  x0 = [1,1,1,1]
  T = 1
  delta = 1
  x_d = constant [0,0,0,0]
  u_d = constant [0,0,0,0]
}
stochastic {
  dists = [normal(1,0.01), uniform(-1,1)]
  M0 = [[-2,0,0,0],[0,0,-1,0],[0,0,0,0],[-1,0,0,0]]
  M1 = [[-1,0,0,-1],[0,0,0,0],[0,-1,0,0],[0,0,0,1]]
  M2 = [[0,0,-1,0],[0,1,0,0],[0,0,1,0],[1,0,0,0]]
  q0 = [3,0,1,1]
  q1 = [0,1,0,1]
  q2 = [1,0,-1,0]
  G0 = [[1,0,1,0],[0,1,0,1]]
  G1 = [[0,0,0,0],[0,1,0,1]]
  F0 = 1
  F_lin = [0,1]
  F_quad = [1,0]
  z_ref = [0,0,0,0]
}
terminal_set {
  kind = ball
  center = [0,0]
  radius = 2.4494897427831781
}
)";
}

}  // namespace slcc
