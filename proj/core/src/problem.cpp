#include "mconn/problem.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "mconn/errors.hpp"

namespace mconn {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<double> parse_numbers(const std::string& value, const std::string& key) {
  std::vector<double> out;
  std::string cleaned = value;
  for (char& c : cleaned)
    if (c == ',') c = ' ';
  std::istringstream in(cleaned);
  std::string tok;
  while (in >> tok) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw ValidationError("key '" + key + "': malformed number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

long long parse_integer(const std::string& value, const std::string& key) {
  long long v = 0;
  const std::string t = trim(value);
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ValidationError("key '" + key + "': expected an integer, got '" + value + "'");
  return v;
}

double parse_real(const std::string& value, const std::string& key) {
  const auto nums = parse_numbers(value, key);
  if (nums.size() != 1)
    throw ValidationError("key '" + key + "': expected one number");
  return nums[0];
}

std::array<double, 2> parse_range(const std::string& value, const std::string& key) {
  const auto nums = parse_numbers(value, key);
  if (nums.size() != 2)
    throw ValidationError("key '" + key + "': expected 'lo hi'");
  if (!(nums[0] < nums[1]))
    throw ValidationError("key '" + key + "': degenerate range [" + std::to_string(nums[0]) +
                          ", " + std::to_string(nums[1]) + "]");
  return {nums[0], nums[1]};
}

struct RawEntries {
  std::map<std::string, std::string> kv;
  std::vector<std::string> order;
};

RawEntries split_entries(std::string_view text) {
  RawEntries out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;

    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ValidationError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty()) throw ValidationError("line " + std::to_string(line_no) + ": empty key");
    if (out.kv.count(key))
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    out.kv[key] = value;
    out.order.push_back(key);
  }
  return out;
}

int parse_coordinate_suffix(const std::string& key, const std::string& tail, int dim) {
  if (tail.size() < 2 || (tail[0] != 'x' && tail[0] != 'y'))
    throw ValidationError("unknown domain key '" + key + "'");
  const long long idx = parse_integer(tail.substr(1), key);
  if (idx < 1 || idx > dim)
    throw ValidationError("key '" + key + "': coordinate index out of range");
  return (tail[0] == 'x' ? 0 : dim) + static_cast<int>(idx) - 1;
}

void check_expression(const std::string& text, int dim, const std::string& key) {
  try {
    parse_expression(text, dim);
  } catch (const ParseError& err) {
    throw ValidationError("key '" + key + "': " + err.what());
  }
}

}  // namespace

ProblemDefinition parse_problem(std::string_view text) {
  RawEntries raw = split_entries(text);
  auto take = [&raw](const std::string& key) -> std::optional<std::string> {
    auto it = raw.kv.find(key);
    if (it == raw.kv.end()) return std::nullopt;
    std::string v = it->second;
    raw.kv.erase(it);
    return v;
  };

  ProblemDefinition def;

  const auto dim_text = take("dim");
  if (!dim_text) throw ValidationError("missing required key 'dim'");
  const long long dim = parse_integer(*dim_text, "dim");
  if (dim < 1 || dim > 16) throw ValidationError("dim must lie in 1..16");
  def.dim = static_cast<int>(dim);
  const int n = def.dim;

  const auto mode_text = take("mode");
  if (!mode_text) throw ValidationError("missing required key 'mode'");
  if (*mode_text == "lagrangian")
    def.mode = ProblemMode::Lagrangian;
  else if (*mode_text == "generalized")
    def.mode = ProblemMode::Generalized;
  else
    throw ValidationError("mode must be 'lagrangian' or 'generalized', got '" + *mode_text + "'");

  // Domain box: default [-1, 1], overridable globally and per coordinate.
  std::array<double, 2> default_range{-1.0, 1.0};
  if (const auto v = take("domain.default")) default_range = parse_range(*v, "domain.default");
  def.domain.ranges.assign(static_cast<std::size_t>(2 * n), default_range);
  for (auto it = raw.kv.begin(); it != raw.kv.end();) {
    if (it->first.rfind("domain.", 0) == 0) {
      const int c = parse_coordinate_suffix(it->first, it->first.substr(7), n);
      def.domain.ranges[static_cast<std::size_t>(c)] = parse_range(it->second, it->first);
      it = raw.kv.erase(it);
    } else {
      ++it;
    }
  }

  if (const auto v = take("samples")) {
    const long long s = parse_integer(*v, "samples");
    if (s < 1 || s > 1000000) throw ValidationError("samples must lie in 1..1000000");
    def.samples = static_cast<int>(s);
  }
  if (const auto v = take("seed")) {
    const long long s = parse_integer(*v, "seed");
    if (s < 0) throw ValidationError("seed must be non-negative");
    def.seed = static_cast<std::uint64_t>(s);
  }
  if (const auto v = take("tol.algebraic")) {
    def.tol.algebraic = parse_real(*v, "tol.algebraic");
    if (def.tol.algebraic <= 0.0) throw ValidationError("tol.algebraic must be positive");
  }
  if (const auto v = take("tol.derived")) {
    def.tol.derived = parse_real(*v, "tol.derived");
    if (def.tol.derived <= 0.0) throw ValidationError("tol.derived must be positive");
  }

  if (const auto v = take("points")) {
    std::string chunk;
    std::istringstream in(*v);
    while (std::getline(in, chunk, ';')) {
      const std::string t = trim(chunk);
      if (t.empty()) continue;
      const auto nums = parse_numbers(t, "points");
      if (static_cast<int>(nums.size()) != 2 * n)
        throw ValidationError("key 'points': each point needs " + std::to_string(2 * n) +
                              " coordinates");
      Point u;
      u.x.assign(nums.begin(), nums.begin() + n);
      u.y.assign(nums.begin() + n, nums.end());
      def.explicit_points.push_back(std::move(u));
    }
    if (def.explicit_points.empty())
      throw ValidationError("key 'points': no points given");
  }

  if (def.mode == ProblemMode::Lagrangian) {
    const auto L = take("L");
    if (!L) throw ValidationError("lagrangian mode requires key 'L'");
    check_expression(*L, n, "L");
    def.lagrangian_text = *L;
  } else {
    def.metric_texts.resize(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (int i = 1; i <= n; ++i)
      for (int j = i; j <= n; ++j) {
        const std::string key = "g." + std::to_string(i) + "." + std::to_string(j);
        const auto v = take(key);
        if (!v) throw ValidationError("generalized mode requires key '" + key + "'");
        check_expression(*v, n, key);
        const int flat = (i - 1) * n - (i - 1) * (i - 2) / 2 + (j - i);
        def.metric_texts[static_cast<std::size_t>(flat)] = *v;
      }
    def.spray_texts.resize(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
      const std::string key = "G." + std::to_string(i);
      const auto v = take(key);
      if (!v) throw ValidationError("generalized mode requires key '" + key + "'");
      check_expression(*v, n, key);
      def.spray_texts[static_cast<std::size_t>(i - 1)] = *v;
    }
  }

  if (!raw.kv.empty())
    throw ValidationError("unknown key '" + raw.kv.begin()->first + "'");
  return def;
}

ProblemDefinition load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open problem definition '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

// ---- ProblemInstance ----------------------------------------------------------

ProblemInstance::ProblemInstance(ProblemDefinition def) : def_(std::move(def)) {
  const int n = def_.dim;
  if (def_.mode == ProblemMode::Lagrangian) {
    lagrange_.emplace(n, parse_expression(def_.lagrangian_text, n));
    metric_ = &lagrange_->metric_field();
    spray_ = &lagrange_->canonic_spray_field();
  } else {
    std::vector<Expr> upper;
    upper.reserve(def_.metric_texts.size());
    for (const auto& t : def_.metric_texts) upper.push_back(parse_expression(t, n));
    metric_storage_.emplace(n, std::move(upper));

    std::vector<Expr> coeffs;
    coeffs.reserve(def_.spray_texts.size());
    for (const auto& t : def_.spray_texts) coeffs.push_back(parse_expression(t, n));
    spray_storage_.emplace(n, std::move(coeffs));

    metric_ = &*metric_storage_;
    spray_ = &*spray_storage_;
  }
}

const LagrangeSpace& ProblemInstance::lagrange() const {
  if (!lagrange_) throw ValidationError("operation requires a lagrangian-mode definition");
  return *lagrange_;
}

std::vector<Point> ProblemInstance::sample(int count_override,
                                           std::optional<std::uint64_t> seed_override) const {
  if (!def_.explicit_points.empty()) return def_.explicit_points;
  const int count = count_override > 0 ? count_override : def_.samples;
  SampleRng rng(seed_override.value_or(def_.seed));
  return sample_points(def_.domain, count, rng);
}

}  // namespace mconn
