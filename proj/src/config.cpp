#include "ccres/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ccres/errors.hpp"

namespace ccres {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& message) {
  throw Error(ErrorKind::config, key + ": " + message);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_items(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t,", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t,", start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

double to_double(const std::string& key, std::string_view token) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value)) {
    fail(key, "'" + std::string(token) + "' is not a finite number");
  }
  return value;
}

long long to_integer(const std::string& key, std::string_view token) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    fail(key, "'" + std::string(token) + "' is not an integer");
  }
  return value;
}

// Accepts "a", "bi", "a+bi", "a-bi" (and "i" as 1i).
cplx to_complex(const std::string& key, std::string_view token) {
  if (token.empty() || token.back() != 'i') return {to_double(key, token), 0.0};
  const std::string_view body = token.substr(0, token.size() - 1);
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto imag_of = [&](std::string_view s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return to_double(key, s.front() == '+' ? s.substr(1) : s);
  };
  if (split == std::string_view::npos) return {0.0, imag_of(body)};
  return {to_double(key, body.substr(0, split)), imag_of(body.substr(split))};
}

class Entries {
public:
  explicit Entries(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorKind::config, "line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      const std::string key(trim(line.substr(0, eq)));
      if (key.empty()) throw Error(ErrorKind::config, "line " + std::to_string(line_no) + ": empty key");
      if (!values_.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
        fail(key, "given more than once");
      }
    }
  }

  const std::string* find(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    used_.push_back(key);
    return &it->second;
  }

  void reject_unused() const {
    for (const auto& [key, value] : values_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) fail(key, "unknown key");
    }
  }

  void read(const std::string& key, double& out) {
    if (const auto* v = find(key)) out = to_double(key, *v);
  }
  void read(const std::string& key, int& out) {
    if (const auto* v = find(key)) {
      const long long value = to_integer(key, *v);
      if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
        fail(key, "out of range");
      }
      out = static_cast<int>(value);
    }
  }

private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> used_;
};

Eigen::MatrixXd parse_matrix(const std::string& key, const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream stream(text);
  std::string row;
  while (std::getline(stream, row, ';')) {
    std::vector<double> values;
    for (auto token : split_items(row)) values.push_back(to_double(key, token));
    if (values.empty()) fail(key, "empty matrix row");
    rows.push_back(std::move(values));
  }
  if (rows.empty()) fail(key, "empty matrix");
  const auto cols = rows.front().size();
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) fail(key, "rows have different lengths");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace

PotentialModel RunConfig::model() const {
  return PotentialModel(channels, strengths, family, parameter, well_radius);
}

RunConfig parse_config(std::string_view text) {
  Entries e(text);
  RunConfig c;

  const auto* l_values = e.find("channels.l");
  if (!l_values) fail("channels.l", "required");
  for (auto token : split_items(*l_values)) {
    const long long l = to_integer("channels.l", token);
    if (l < 0 || l > 64) fail("channels.l", "angular momenta must lie in [0, 64]");
    c.channels.l_values.push_back(static_cast<int>(l));
  }
  e.read("channels.mu", c.channels.mu);

  if (const auto* family = e.find("potential.family")) {
    if (*family == "gaussian") {
      c.family = PotentialFamily::gaussian;
    } else if (*family == "square_well") {
      c.family = PotentialFamily::square_well;
    } else {
      fail("potential.family", "expected gaussian or square_well, got '" + *family + "'");
    }
  }
  const auto* strengths = e.find("potential.strengths");
  if (!strengths) fail("potential.strengths", "required");
  c.strengths = parse_matrix("potential.strengths", *strengths);
  if (const auto* index = e.find("potential.parameter")) {
    const auto items = split_items(*index);
    if (items.size() != 2) fail("potential.parameter", "expected 'row col'");
    c.parameter.row = static_cast<int>(to_integer("potential.parameter", items[0])) - 1;
    c.parameter.col = static_cast<int>(to_integer("potential.parameter", items[1])) - 1;
  }
  e.read("potential.radius", c.well_radius);

  e.read("grid.r_max", c.grid.r_max);
  e.read("grid.n_points", c.grid.n_points);

  e.read("newton.tol", c.newton.tol);
  e.read("newton.max_iter", c.newton.max_iter);

  auto& k = c.continuation;
  e.read("continuation.h_min", k.h_min);
  e.read("continuation.h_max", k.h_max);
  e.read("continuation.h_initial", k.h_initial);
  e.read("continuation.lambda_min", k.lambda_min);
  e.read("continuation.lambda_max", k.lambda_max);
  e.read("continuation.max_points", k.max_points);

  if (const auto* mode = e.find("starts.mode")) {
    if (*mode == "scan") {
      c.scan_starts = true;
    } else if (*mode == "list") {
      c.scan_starts = false;
    } else {
      fail("starts.mode", "expected scan or list, got '" + *mode + "'");
    }
  }
  if (const auto* list = e.find("starts.k")) {
    for (auto token : split_items(*list)) c.start_k.push_back(to_complex("starts.k", token));
  }
  e.read("starts.k_max", c.scan_k_max);
  if (const auto* seed = e.find("check.seed")) {
    const long long value = to_integer("check.seed", *seed);
    if (value < 0) fail("check.seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(value);
  }

  // Continuation rows obey the same residual bound as Newton roots.
  k.tol = c.newton.tol;

  e.reject_unused();
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot read config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void validate(const RunConfig& c) {
  const PotentialModel model = c.model();  // checks channels and potential.*
  c.grid.validate();
  if (!(c.newton.tol > 0.0)) fail("newton.tol", "must be positive");
  if (c.newton.max_iter < 1) fail("newton.max_iter", "must be at least 1");

  const auto& k = c.continuation;
  if (!(k.h_min > 0.0)) fail("continuation.h_min", "must be positive");
  if (!(k.h_max >= k.h_min)) fail("continuation.h_max", "must be >= continuation.h_min");
  if (!(k.h_initial >= k.h_min && k.h_initial <= k.h_max)) {
    fail("continuation.h_initial", "must lie in [h_min, h_max]");
  }
  if (!(k.lambda_min <= k.lambda_max)) {
    fail("continuation.lambda_min", "must not exceed continuation.lambda_max");
  }
  if (k.max_points < 1) fail("continuation.max_points", "must be at least 1");

  if (!c.scan_starts && c.start_k.empty()) fail("starts.k", "required when starts.mode = list");
  for (const cplx& start : c.start_k) {
    if (start == cplx{0.0, 0.0}) fail("starts.k", "k = 0 is not a valid start");
    if (std::abs(start.imag()) * c.grid.r_max > 700.0) fail("starts.k", "|Im k|·r_max exceeds 700");
  }
  if (!(c.scan_k_max > 0.05)) fail("starts.k_max", "must exceed 0.05");
  if (c.scan_k_max * c.grid.r_max > 700.0) fail("starts.k_max", "k_max·r_max exceeds 700");

  // The grid must cover the potential everywhere the run may take λ.
  double reach = std::abs(c.lambda());
  if (std::isfinite(k.lambda_max) && k.lambda_max < 1e12) reach = std::max(reach, std::abs(k.lambda_max));
  if (std::isfinite(k.lambda_min) && k.lambda_min > -1e12) reach = std::max(reach, std::abs(k.lambda_min));
  const double needed = effective_range(model, kGridCoverageTolerance, reach);
  if (c.grid.r_max < needed) {
    fail("grid.r_max", std::to_string(c.grid.r_max) + " does not cover the potential up to |λ| = " +
                           std::to_string(reach) + " (needs " + std::to_string(needed) + ")");
  }
}

}  // namespace ccres
