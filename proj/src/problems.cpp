#include "fracdiff/problems.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "fracdiff/errors.hpp"
#include "fracdiff/specfun.hpp"

namespace fracdiff {

ExampleId parse_example_id(std::string_view text) {
  if (text == "1" || text == "example1") return ExampleId::Example1;
  if (text == "2" || text == "example2") return ExampleId::Example2;
  if (text == "3" || text == "example3") return ExampleId::Example3;
  if (text == "exactness" || text == "fitted-exactness") return ExampleId::FittedExactness;
  throw ConfigError("unknown example id '" + std::string(text) + "' (expected 1, 2, 3 or exactness)");
}

const char* to_string(ExampleId id) {
  switch (id) {
    case ExampleId::Example1: return "example1";
    case ExampleId::Example2: return "example2";
    case ExampleId::Example3: return "example3";
    case ExampleId::FittedExactness: return "exactness";
  }
  return "unknown";
}

double caputo_of_cosine(double alpha, double omega, double t) {
  if (t == 0.0) return 0.0;
  const long double wt2 = static_cast<long double>(omega * t) * (omega * t);
  long double term = -wt2 * reciprocal_gamma(3.0 - alpha);
  long double sum = term;
  for (int k = 2; k <= 200; ++k) {
    term *= -wt2 / ((2.0L * k - alpha) * (2.0L * k - 1.0L - alpha));
    sum += term;
    if (2.0L * k > omega * t && std::abs(term) <= 1e-18L * std::abs(sum)) {
      return static_cast<double>(sum) * std::pow(t, -alpha);
    }
  }
  throw AccuracyLossError("caputo_of_cosine: series did not converge in 200 terms");
}

ProblemSpec example1(double alpha, double final_time) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("example1: alpha must lie in (0, 1)");
  constexpr double omega = std::numbers::pi / 3.0;
  ProblemSpec spec;
  spec.name = "example1";
  spec.p = 1.0;
  spec.c = [](double) { return 0.0; };
  spec.phi = [](double x) { return std::sin(x); };
  spec.length = std::numbers::pi;
  spec.final_time = final_time;
  spec.f = [alpha](double x, double t) {
    return 0.5 * (caputo_of_cosine(alpha, omega, t) + std::cos(omega * t)) * std::sin(x);
  };
  spec.exact = [alpha](double x, double t) {
    // Error sweeps visit a level's nodes consecutively; keep the last time profile.
    thread_local double memo_alpha = -1.0;
    thread_local double memo_t = -1.0;
    thread_local double memo_profile = 0.0;
    if (memo_alpha != alpha || memo_t != t) {
      memo_profile =
          0.5 * (mittag_leffler(alpha, 1.0, -std::pow(t, alpha)) + std::cos(omega * t));
      memo_alpha = alpha;
      memo_t = t;
    }
    return memo_profile * std::sin(x);
  };
  return spec;
}

ProblemSpec example2(double final_time) {
  constexpr double pi = std::numbers::pi;
  ProblemSpec spec;
  spec.name = "example2";
  spec.p = 1.0;
  spec.c = [](double x) { return 1.0 + x; };
  spec.phi = [](double x) { return std::sin(x); };
  spec.length = pi;
  spec.final_time = final_time;
  spec.f = [](double x, double t) {
    const double t2 = t * t;
    return x * (pi - x) * (1.0 + t2 * t2) + t2;
  };
  return spec;
}

ProblemSpec example3(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("example3: alpha must lie in (0, 1)");
  const double g_cubic = 6.0 * reciprocal_gamma(4.0 - alpha);           // D^a t^3 = 6 t^{3-a} / G(4-a)
  const double g_shifted = gamma_fn(4.0 + alpha) / 6.0;                 // D^a t^{3+a} = G(4+a)/G(4) t^3
  ProblemSpec spec;
  spec.name = "example3";
  spec.p = 1.0;
  spec.c = [](double x) { return x * x; };
  spec.length = 1.0;
  spec.final_time = 1.0;
  auto bump = [](double x) {
    const double b = 4.0 * x * (1.0 - x);
    return b * b;
  };
  spec.exact = [alpha, bump](double x, double t) {
    return (1.0 + t * t * t) * bump(x) + 5.0 * std::pow(t, 3.0 + alpha);
  };
  spec.phi = [bump](double x) { return bump(x); };
  spec.f = [alpha, bump, g_cubic, g_shifted](double x, double t) {
    const double t3 = t * t * t;
    const double u = (1.0 + t3) * bump(x) + 5.0 * std::pow(t, 3.0 + alpha);
    const double caputo = g_cubic * std::pow(t, 3.0 - alpha) * bump(x) + 5.0 * g_shifted * t3;
    const double bump_xx = 16.0 * (2.0 - 12.0 * x + 12.0 * x * x);
    return caputo - (1.0 + t3) * bump_xx + x * x * u;
  };
  spec.left_boundary = [alpha](double t) { return 5.0 * std::pow(t, 3.0 + alpha); };
  spec.right_boundary = spec.left_boundary;
  return spec;
}

ProblemSpec fitted_exactness_problem(double alpha, double length, double final_time) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("fitted_exactness_problem: alpha must lie in (0, 1)");
  const double g = gamma_fn(1.0 + alpha);
  ProblemSpec spec;
  spec.name = "exactness";
  spec.p = 1.0;
  spec.c = [](double) { return 0.0; };
  spec.length = length;
  spec.final_time = final_time;
  spec.phi = [length](double x) { return x * (length - x); };
  spec.exact = [alpha, length](double x, double t) {
    return x * (length - x) * (1.0 + std::pow(t, alpha));
  };
  spec.f = [alpha, length, g](double x, double t) {
    return g * x * (length - x) + 2.0 * (1.0 + std::pow(t, alpha));
  };
  return spec;
}

ProblemSpec make_example(ExampleId id, double alpha, double final_time) {
  switch (id) {
    case ExampleId::Example1: return example1(alpha, final_time);
    case ExampleId::Example2: return example2(final_time);
    case ExampleId::Example3: return example3(alpha);
    case ExampleId::FittedExactness: return fitted_exactness_problem(alpha, 1.0, final_time);
  }
  throw ConfigError("unknown example");
}

bool has_smooth_solution(ExampleId id) { return id == ExampleId::Example3; }

// ---------------------------------------------------------------------------
// Problem-config files

namespace {

double eval_terms(const std::vector<SourceTerm>& terms, double length, double x, double t,
                  bool with_time) {
  double acc = 0.0;
  for (const auto& term : terms) {
    double v = term.a * std::pow(x, term.i) * std::pow(length - x, term.j);
    if (with_time && term.q != 0.0) v *= std::pow(t, term.q);
    acc += v;
  }
  return acc;
}

// A value is either a number or a (possibly nested) bracketed list of numbers.
struct Value {
  std::optional<double> number;
  std::vector<Value> items;
};

class ValueParser {
 public:
  ValueParser(std::string_view text, int line) : text_(text), line_(line) {}

  Value parse() {
    Value v = parse_value();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("problem config line " + std::to_string(line_) + ": " + what);
  }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  Value parse_value() {
    skip_space();
    if (pos_ >= text_.size()) fail("missing value");
    Value v;
    if (text_[pos_] == '[') {
      ++pos_;
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        v.items.push_back(parse_value());
        skip_space();
        if (pos_ >= text_.size()) fail("unterminated list");
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ']') {
          ++pos_;
          return v;
        }
        fail("expected ',' or ']'");
      }
    }
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, x);
    if (ec != std::errc{} || ptr == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    v.number = x;
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double as_number(const Value& v, const std::string& key) {
  if (!v.number) throw ConfigError("problem config: '" + key + "' must be a number");
  return *v.number;
}

std::vector<double> as_list(const Value& v, const std::string& key) {
  if (v.number) throw ConfigError("problem config: '" + key + "' must be a list");
  std::vector<double> out;
  for (const auto& item : v.items) out.push_back(as_number(item, key));
  return out;
}

int as_exponent(double v, const std::string& key) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 64.0)
    throw ConfigError("problem config: '" + key + "' exponents i, j must be integers in [0, 64]");
  return static_cast<int>(v);
}

std::vector<SourceTerm> as_terms(const Value& v, const std::string& key, std::size_t arity) {
  if (v.number) throw ConfigError("problem config: '" + key + "' must be a list of terms");
  std::vector<SourceTerm> out;
  for (const auto& item : v.items) {
    const std::vector<double> t = as_list(item, key);
    if (t.size() != arity) {
      throw ConfigError("problem config: each '" + key + "' term needs " + std::to_string(arity) +
                        " entries");
    }
    SourceTerm term;
    term.a = t[0];
    term.i = as_exponent(t[1], key);
    term.j = as_exponent(t[2], key);
    if (arity == 4) {
      if (!(t[3] >= 0.0)) throw ConfigError("problem config: time exponents must be >= 0");
      term.q = t[3];
    }
    out.push_back(term);
  }
  return out;
}

}  // namespace

ProblemSpec ProblemConfig::to_problem(std::string name) const {
  ProblemSpec spec;
  spec.name = std::move(name);
  spec.p = p;
  spec.length = length;
  spec.final_time = final_time;
  spec.c = [coeffs = c_coeffs](double x) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
    return acc;
  };
  spec.phi = [terms = phi_terms, l = length](double x) { return eval_terms(terms, l, x, 0.0, false); };
  spec.f = [terms = f_terms, l = length](double x, double t) { return eval_terms(terms, l, x, t, true); };
  return spec;
}

ProblemConfig parse_problem_config(std::istream& in) {
  static const std::map<std::string, std::vector<std::string>> allowed{
      {"domain", {"l", "T"}},
      {"coefficients", {"p", "c"}},
      {"initial", {"phi"}},
      {"source", {"f"}}};
  std::map<std::string, Value> entries;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']') throw ConfigError("problem config line " + std::to_string(line_no) + ": bad section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!allowed.contains(section))
        throw ConfigError("problem config line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("problem config line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty())
      throw ConfigError("problem config line " + std::to_string(line_no) + ": key outside a section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const auto& keys = allowed.at(section);
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("problem config line " + std::to_string(line_no) + ": unknown key '" + key +
                        "' in [" + section + "]");
    const std::string full = section + "." + key;
    if (entries.contains(full))
      throw ConfigError("problem config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    entries.emplace(full, ValueParser(std::string_view(line).substr(eq + 1), line_no).parse());
  }

  auto require = [&](const std::string& key) -> const Value& {
    auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError("problem config: missing '" + key + "'");
    return it->second;
  };

  ProblemConfig cfg;
  cfg.length = as_number(require("domain.l"), "l");
  cfg.final_time = as_number(require("domain.T"), "T");
  cfg.p = as_number(require("coefficients.p"), "p");
  if (auto it = entries.find("coefficients.c"); it != entries.end()) cfg.c_coeffs = as_list(it->second, "c");
  cfg.phi_terms = as_terms(require("initial.phi"), "phi", 3);
  cfg.f_terms = as_terms(require("source.f"), "f", 4);
  if (!(cfg.length > 0.0)) throw ConfigError("problem config: l must be positive");
  if (!(cfg.final_time > 0.0)) throw ConfigError("problem config: T must be positive");
  if (!(cfg.p > 0.0)) throw ConfigError("problem config: p must be positive");
  return cfg;
}

ProblemConfig load_problem_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem config '" + path.string() + "'");
  return parse_problem_config(in);
}

}  // namespace fracdiff
