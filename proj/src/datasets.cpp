#include "plap/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "plap/rng.hpp"

namespace plap {

namespace fs = std::filesystem;

void Dataset::validate() const {
  const std::size_t n = this->n();
  if (labels.size() != n) throw std::invalid_argument("Dataset: label count does not match node count");
  if (graph.n() != n) throw std::invalid_argument("Dataset: graph node count does not match features");
  for (int c : labels)
    if (c < 0 || c >= num_classes) throw std::invalid_argument("Dataset: label out of range");
  if (split) {
    std::vector<char> seen(n, 0);
    for (const auto* part : {&split->train, &split->val, &split->test})
      for (std::size_t v : *part) {
        if (v >= n) throw std::invalid_argument("Dataset: split node out of range");
        if (seen[v]++) throw std::invalid_argument("Dataset: split sets overlap");
      }
  }
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(const fs::path& file, std::size_t row, const std::string& msg) {
  std::ostringstream os;
  os << file.filename().string() << ':' << row << ": " << msg;
  throw BundleError(os.str());
}

template <typename T>
T parse_number(std::string_view field, const fs::path& file, std::size_t row) {
  field = trim(field);
  T value{};
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last)
    fail(file, row, "malformed number '" + std::string(field) + "'");
  return value;
}

std::ifstream open_required(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw BundleError("missing file " + file.string());
  return in;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset load_bundle(const fs::path& dir) {
  Dataset ds;

  // features.csv defines n and d.
  {
    const fs::path file = dir / "features.csv";
    auto in = open_required(file);
    std::vector<double> flat;
    std::size_t d = 0, rows = 0;
    std::string line;
    while (std::getline(in, line)) {
      ++rows;
      if (trim(line).empty()) fail(file, rows, "empty feature row");
      const auto fields = split_fields(line);
      if (rows == 1) d = fields.size();
      if (fields.size() != d)
        fail(file, rows, "expected " + std::to_string(d) + " values, found " + std::to_string(fields.size()));
      for (auto f : fields) flat.push_back(parse_number<double>(f, file, rows));
    }
    if (rows == 0) fail(file, 0, "no feature rows");
    ds.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t m = 0; m < d; ++m)
        ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = flat[i * d + m];
  }
  const std::size_t n = ds.n();

  {
    const fs::path file = dir / "labels.csv";
    auto in = open_required(file);
    std::string line;
    std::size_t row = 0;
    std::vector<int> labels(n, -1);
    while (std::getline(in, line)) {
      ++row;
      if (row == 1) {
        if (trim(line) != "node,label") fail(file, row, "expected header 'node,label'");
        continue;
      }
      if (trim(line).empty()) continue;
      const auto fields = split_fields(line);
      if (fields.size() != 2) fail(file, row, "expected 2 fields");
      const auto node = parse_number<long long>(fields[0], file, row);
      const auto label = parse_number<int>(fields[1], file, row);
      if (node < 0 || static_cast<std::size_t>(node) >= n) fail(file, row, "node id out of range");
      if (label < 0) fail(file, row, "negative label");
      if (labels[static_cast<std::size_t>(node)] != -1) fail(file, row, "duplicate node");
      labels[static_cast<std::size_t>(node)] = label;
    }
    for (std::size_t v = 0; v < n; ++v)
      if (labels[v] < 0) fail(file, row, "node " + std::to_string(v) + " has no label");
    ds.num_classes = *std::max_element(labels.begin(), labels.end()) + 1;
    ds.labels = std::move(labels);
  }

  {
    const fs::path file = dir / "edges.csv";
    auto in = open_required(file);
    std::string line;
    std::size_t row = 0;
    Vector w = Vector::Zero(static_cast<Eigen::Index>(num_pairs(n)));
    while (std::getline(in, line)) {
      ++row;
      if (row == 1) {
        if (trim(line) != "src,dst,weight") fail(file, row, "expected header 'src,dst,weight'");
        continue;
      }
      if (trim(line).empty()) continue;
      const auto fields = split_fields(line);
      if (fields.size() != 3) fail(file, row, "expected 3 fields");
      const auto u = parse_number<long long>(fields[0], file, row);
      const auto v = parse_number<long long>(fields[1], file, row);
      const auto weight = parse_number<double>(fields[2], file, row);
      if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
        fail(file, row, "edge endpoint out of range");
      if (u == v) fail(file, row, "self-loop on node " + std::to_string(u));
      if (!(weight > 0.0) || !std::isfinite(weight)) fail(file, row, "edge weight must be positive");
      const auto hi = static_cast<std::size_t>(std::max(u, v));
      const auto lo = static_cast<std::size_t>(std::min(u, v));
      const auto k = static_cast<Eigen::Index>(pair_index(hi + 1, lo + 1, n) - 1);
      if (w[k] != 0.0) fail(file, row, "duplicate edge " + std::to_string(lo) + "-" + std::to_string(hi));
      w[k] = weight;
    }
    ds.graph = WeightVector(n, std::move(w));
  }

  const fs::path split_file = dir / "splits.json";
  if (fs::exists(split_file)) {
    std::ifstream in(split_file);
    nlohmann::json j;
    try {
      in >> j;
      Split s;
      s.train = j.at("train").get<std::vector<std::size_t>>();
      s.val = j.at("val").get<std::vector<std::size_t>>();
      s.test = j.at("test").get<std::vector<std::size_t>>();
      ds.split = std::move(s);
    } catch (const nlohmann::json::exception& e) {
      throw BundleError("splits.json: " + std::string(e.what()));
    }
  }

  try {
    ds.validate();
  } catch (const std::invalid_argument& e) {
    throw BundleError(e.what());
  }
  return ds;
}

void save_edges(const WeightVector& graph, const fs::path& file, double threshold) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "src,dst,weight\n";
  // Emit in (src, dst) lexicographic order with src < dst.
  const std::size_t n = graph.n();
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      const double w = graph.at(v, u);
      if (w > threshold) out << u << ',' << v << ',' << format_double(w) << '\n';
    }
}

void save_bundle(const Dataset& ds, const fs::path& dir) {
  ds.validate();
  fs::create_directories(dir);
  save_edges(ds.graph, dir / "edges.csv");
  {
    std::ofstream out(dir / "features.csv", std::ios::binary);
    for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
      for (Eigen::Index m = 0; m < ds.features.cols(); ++m) {
        if (m) out << ',';
        out << format_double(ds.features(i, m));
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "labels.csv", std::ios::binary);
    out << "node,label\n";
    for (std::size_t v = 0; v < ds.labels.size(); ++v) out << v << ',' << ds.labels[v] << '\n';
  }
  if (ds.split) {
    nlohmann::json j = {{"train", ds.split->train}, {"val", ds.split->val}, {"test", ds.split->test}};
    std::ofstream out(dir / "splits.json", std::ios::binary);
    out << j.dump() << '\n';
  }
}

Dataset generate_sbm(const SbmParams& p, std::uint64_t seed) {
  if (p.nodes_per_block == 0 || p.blocks == 0)
    throw std::invalid_argument("generate_sbm: need at least one block and one node per block");
  if (!(0.0 <= p.p_out && p.p_out <= p.p_in && p.p_in <= 1.0))
    throw std::invalid_argument("generate_sbm: need 0 <= p_out <= p_in <= 1");
  if (p.feature_dim < p.blocks)
    throw std::invalid_argument("generate_sbm: feature_dim must be at least the number of blocks");
  if (p.feature_noise < 0.0) throw std::invalid_argument("generate_sbm: negative feature_noise");

  const std::size_t n = p.nodes_per_block * p.blocks;
  Rng rng(seed);
  Dataset ds;
  ds.num_classes = static_cast<int>(p.blocks);
  ds.labels.resize(n);
  for (std::size_t v = 0; v < n; ++v) ds.labels[v] = static_cast<int>(v / p.nodes_per_block);

  Vector w = Vector::Zero(static_cast<Eigen::Index>(num_pairs(n)));
  for_each_pair(n, [&](std::size_t k, std::size_t i, std::size_t j) {
    const double prob = ds.labels[i] == ds.labels[j] ? p.p_in : p.p_out;
    if (rng.uniform() < prob) w[static_cast<Eigen::Index>(k)] = 1.0;
  });
  ds.graph = WeightVector(n, std::move(w));

  const auto d = static_cast<Eigen::Index>(p.feature_dim);
  ds.features.resize(static_cast<Eigen::Index>(n), d);
  for (std::size_t v = 0; v < n; ++v)
    for (Eigen::Index m = 0; m < d; ++m) {
      const double centroid = m == ds.labels[v] ? p.feature_signal : 0.0;
      ds.features(static_cast<Eigen::Index>(v), m) = centroid + rng.uniform(-p.feature_noise, p.feature_noise);
    }
  return ds;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, std::array<double, 3> fractions) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw std::invalid_argument("split_nodes: fractions must be non-negative");
    total += f;
  }
  if (total > 1.0 + 1e-9) throw std::invalid_argument("split_nodes: fractions sum above 1");

  constexpr double eps = 1e-9;
  const auto target = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor(total * n + eps)));
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double q = fractions[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(q + eps));
    rem[i] = std::max(0.0, q - static_cast<double>(sizes[i]));
    assigned += sizes[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
  for (int idx = 0; assigned < target; idx = (idx + 1) % 3) {
    ++sizes[order[idx]];
    ++assigned;
  }
  return sizes;
}

Split split_nodes(std::size_t n, std::array<double, 3> fractions, std::uint64_t seed) {
  const auto sizes = split_sizes(n, fractions);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(perm);
  Split s;
  auto it = perm.begin();
  std::array<std::vector<std::size_t>*, 3> parts{&s.train, &s.val, &s.test};
  for (int i = 0; i < 3; ++i) {
    const auto size = static_cast<std::ptrdiff_t>(sizes[i]);
    parts[i]->assign(it, it + size);
    std::sort(parts[i]->begin(), parts[i]->end());
    it += size;
  }
  return s;
}

}  // namespace plap
