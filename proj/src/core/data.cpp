#include "core/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "core/rng.hpp"

namespace dro {

double Example::dot(const std::vector<double>& theta) const {
  KahanSum s;
  if (sparse()) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < theta.size()) s.add(val[k] * theta[idx[k]]);
    }
  } else {
    for (std::size_t k = 0; k < val.size() && k < theta.size(); ++k) {
      s.add(val[k] * theta[k]);
    }
  }
  return s.value();
}

void Example::axpy(double a, std::vector<double>& out) const {
  if (sparse()) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < out.size()) out[idx[k]] += a * val[k];
    }
  } else {
    for (std::size_t k = 0; k < val.size() && k < out.size(); ++k) {
      out[k] += a * val[k];
    }
  }
}

namespace {

double parse_double(std::string_view tok, std::size_t line_no, const char* what) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(out)) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" +
                     std::string(tok) + "'");
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) toks.push_back(line.substr(start, i - start));
  }
  return toks;
}

}  // namespace

Dataset parse_sparse(std::string_view text, std::int64_t d_override) {
  Dataset data;
  data.source = "sparse";
  std::int64_t max_index = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos
                                                 ? text.size() - pos
                                                 : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;

    Example ex;
    ex.label = parse_double(toks[0], line_no, "label");
    std::int64_t prev = 0;
    for (std::size_t t = 1; t < toks.size(); ++t) {
      auto colon = toks[t].find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected index:value, got '" + std::string(toks[t]) + "'");
      }
      std::string_view idx_tok = toks[t].substr(0, colon);
      std::int64_t index = 0;
      auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), index);
      if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || index < 1) {
        throw ParseError("line " + std::to_string(line_no) + ": bad index '" +
                         std::string(idx_tok) + "'");
      }
      if (index <= prev) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": feature indices must be strictly increasing");
      }
      prev = index;
      double value = parse_double(toks[t].substr(colon + 1), line_no, "value");
      ex.idx.push_back(static_cast<std::uint32_t>(index - 1));
      ex.val.push_back(value);
      max_index = std::max(max_index, index);
    }
    data.examples.push_back(std::move(ex));
  }
  if (data.examples.empty()) throw ParseError("dataset is empty");
  data.d = d_override > 0 ? d_override : max_index;
  if (data.d < max_index) throw ParseError("dimension override smaller than max index");
  return data;
}

std::string serialize_sparse(const Dataset& data) {
  std::string out;
  for (const Example& ex : data.examples) {
    out += format_double(ex.label);
    for (std::size_t k = 0; k < ex.idx.size(); ++k) {
      out += ' ';
      out += std::to_string(ex.idx[k] + 1);
      out += ':';
      out += format_double(ex.val[k]);
    }
    out += '\n';
  }
  return out;
}

Dataset parse_csv(std::string_view text) {
  Dataset data;
  data.source = "csv";
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool labeled = false;
  bool have_header = false;
  std::size_t columns = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos
                                                 ? text.size() - pos
                                                 : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line[0] == '#') continue;

    std::vector<std::string_view> cells;
    std::size_t i = 0;
    while (true) {
      std::size_t comma = line.find(',', i);
      cells.push_back(line.substr(i, comma == std::string_view::npos ? line.size() - i
                                                                     : comma - i));
      if (comma == std::string_view::npos) break;
      i = comma + 1;
    }
    if (!have_header) {
      have_header = true;
      columns = cells.size();
      labeled = !cells.empty() && (cells[0] == "label" || cells[0] == "y");
      continue;
    }
    if (cells.size() != columns) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(columns) + " cells");
    }
    Example ex;
    std::size_t first = labeled ? 1 : 0;
    if (labeled) ex.label = parse_double(cells[0], line_no, "label");
    for (std::size_t c = first; c < cells.size(); ++c) {
      ex.val.push_back(parse_double(cells[c], line_no, "value"));
    }
    data.examples.push_back(std::move(ex));
  }
  if (!have_header) throw ParseError("csv needs a header row");
  if (data.examples.empty()) throw ParseError("dataset is empty");
  data.d = static_cast<std::int64_t>(columns - (labeled ? 1 : 0));
  return data;
}

std::string serialize_csv(const Dataset& data) {
  bool labeled = !data.examples.empty() && data.examples[0].has_label();
  std::string out;
  if (labeled) out += "label";
  for (std::int64_t j = 0; j < data.d; ++j) {
    if (labeled || j > 0) out += ',';
    out += 'x';
    out += std::to_string(j + 1);
  }
  out += '\n';
  for (const Example& ex : data.examples) {
    std::string row;
    if (labeled) row += format_double(ex.label);
    for (std::int64_t j = 0; j < data.d; ++j) {
      if (labeled || j > 0) row += ',';
      double v = 0.0;
      if (ex.sparse()) {
        auto it = std::lower_bound(ex.idx.begin(), ex.idx.end(),
                                   static_cast<std::uint32_t>(j));
        if (it != ex.idx.end() && *it == static_cast<std::uint32_t>(j)) {
          v = ex.val[static_cast<std::size_t>(it - ex.idx.begin())];
        }
      } else if (static_cast<std::size_t>(j) < ex.val.size()) {
        v = ex.val[static_cast<std::size_t>(j)];
      }
      row += format_double(v);
    }
    out += row;
    out += '\n';
  }
  return out;
}

Dataset load_dataset(const std::string& path, const std::string& format,
                     bool add_bias) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Dataset data;
  if (format == "svmlight" || format == "sparse") {
    data = parse_sparse(buf.str());
  } else if (format == "csv") {
    data = parse_csv(buf.str());
  } else {
    throw ConfigError("unknown dataset format: " + format);
  }
  data.source = path;
  return add_bias ? with_bias(data) : data;
}

Dataset with_bias(const Dataset& data) {
  Dataset out = data;
  out.d = data.d + 1;
  for (Example& ex : out.examples) {
    if (ex.sparse()) {
      ex.idx.push_back(static_cast<std::uint32_t>(data.d));
      ex.val.push_back(1.0);
    } else {
      ex.val.resize(static_cast<std::size_t>(data.d), 0.0);
      ex.val.push_back(1.0);
    }
  }
  out.source = data.source + "+bias";
  return out;
}

Dataset gen_median_data(std::int64_t n, double delta, std::uint64_t seed) {
  if (n < 1) throw ConfigError("need n >= 1");
  if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("delta must be in [0, 1]");
  Dataset data;
  data.d = 1;
  data.source = "gen:median";
  data.examples.reserve(static_cast<std::size_t>(n));
  RngStream rng(seed, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    double u = rng.next_double();
    Example ex;
    double x = 0.0;
    if (u < (1.0 - delta) / 2.0) {
      x = 1.0;
    } else if (u < 1.0 - delta) {
      x = -1.0;
    }
    ex.val.push_back(x);
    data.examples.push_back(std::move(ex));
  }
  return data;
}

Dataset gen_uniform_cube(std::int64_t n, std::int64_t d, double B,
                         std::uint64_t seed) {
  if (n < 1 || d < 1) throw ConfigError("need n >= 1 and d >= 1");
  if (!(B >= 0.0)) throw ConfigError("B must be nonnegative");
  Dataset data;
  data.d = d;
  data.source = "gen:cube";
  data.examples.reserve(static_cast<std::size_t>(n));
  RngStream rng(seed, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    Example ex;
    ex.val.reserve(static_cast<std::size_t>(d));
    for (std::int64_t j = 0; j < d; ++j) ex.val.push_back(rng.rademacher(B));
    data.examples.push_back(std::move(ex));
  }
  return data;
}

namespace {

std::vector<std::int64_t> shuffled_indices(std::int64_t n, std::uint64_t seed) {
  std::vector<std::int64_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  RngStream rng(seed, 1);
  for (std::int64_t i = n - 1; i > 0; --i) {
    auto j = static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  return order;
}

}  // namespace

std::vector<std::vector<std::int64_t>> split_fractions(
    std::int64_t n, const std::vector<double>& fractions, std::uint64_t seed) {
  if (fractions.empty()) throw ConfigError("need at least one fraction");
  KahanSum total;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw ConfigError("fractions must be nonnegative");
    total.add(f);
  }
  if (std::abs(total.value() - 1.0) > 1e-9) throw ConfigError("fractions must sum to 1");

  auto order = shuffled_indices(n, seed);
  std::vector<std::vector<std::int64_t>> parts(fractions.size());
  std::size_t start = 0;
  KahanSum cum;
  for (std::size_t p = 0; p < fractions.size(); ++p) {
    cum.add(fractions[p]);
    std::size_t end = p + 1 == fractions.size()
                          ? static_cast<std::size_t>(n)
                          : static_cast<std::size_t>(
                                std::llround(cum.value() * static_cast<double>(n)));
    end = std::min(end, static_cast<std::size_t>(n));
    parts[p].assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                    order.begin() + static_cast<std::ptrdiff_t>(end));
    std::sort(parts[p].begin(), parts[p].end());
    start = end;
  }
  return parts;
}

std::vector<std::vector<std::int64_t>> split_kfold(std::int64_t n, std::int64_t k,
                                                   std::uint64_t seed) {
  if (k < 2 || k > n) throw ConfigError("need 2 <= k <= n");
  auto order = shuffled_indices(n, seed);
  std::vector<std::vector<std::int64_t>> folds(static_cast<std::size_t>(k));
  for (std::int64_t i = 0; i < n; ++i) {
    folds[static_cast<std::size_t>(i % k)].push_back(order[static_cast<std::size_t>(i)]);
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

Dataset subset(const Dataset& data, const std::vector<std::int64_t>& rows) {
  Dataset out;
  out.d = data.d;
  out.source = data.source + ":subset";
  out.examples.reserve(rows.size());
  for (std::int64_t r : rows) {
    if (r < 0 || r >= data.n()) throw InputError("subset index out of range");
    out.examples.push_back(data.examples[static_cast<std::size_t>(r)]);
  }
  if (out.examples.empty()) throw InputError("subset is empty");
  return out;
}

}  // namespace dro
