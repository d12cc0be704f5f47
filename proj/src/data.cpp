#include "polyfs/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "polyfs/error.h"
#include "polyfs/random.h"

namespace polyfs {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

// Splits one CSV record. Fields may be double-quoted with "" escapes.
std::vector<std::string> split_record(const std::string &line, char delim,
                                      std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw IoError("line " + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

std::string Dataset::feature_name(Eigen::Index i) const {
  if (static_cast<std::size_t>(i) < feature_names.size()) {
    return feature_names[static_cast<std::size_t>(i)];
  }
  return "f" + std::to_string(i);
}

void validate(const Dataset &ds) {
  const Eigen::Index d = ds.n_features();
  const Eigen::Index n = ds.n_samples();
  if (d < 1) throw DataError("dataset needs at least one feature");
  if (n < 2) throw DataError("dataset needs at least two samples");
  if (ds.n_classes < 2) throw DataError("dataset needs at least two classes");
  if (static_cast<Eigen::Index>(ds.labels.size()) != n) {
    throw DataError("label count " + std::to_string(ds.labels.size()) +
                    " does not match sample count " + std::to_string(n));
  }
  if (!ds.feature_names.empty() &&
      static_cast<Eigen::Index>(ds.feature_names.size()) != d) {
    throw DataError("feature name count does not match feature count");
  }
  std::vector<int> counts(static_cast<std::size_t>(ds.n_classes), 0);
  for (std::size_t j = 0; j < ds.labels.size(); ++j) {
    const int label = ds.labels[j];
    if (label < 0 || label >= ds.n_classes) {
      throw DataError("sample " + std::to_string(j) + ": label " +
                      std::to_string(label) + " outside [0, " +
                      std::to_string(ds.n_classes) + ")");
    }
    ++counts[static_cast<std::size_t>(label)];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw DataError("class " + std::to_string(c) + " has no samples");
    }
  }
  if (!ds.features.allFinite()) {
    throw DataError("feature matrix contains non-finite values");
  }
}

Dataset make_dataset(Eigen::MatrixXd features, std::vector<int> labels,
                     std::vector<std::string> feature_names) {
  Dataset ds;
  ds.features = std::move(features);
  ds.n_classes =
      labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  ds.labels = std::move(labels);
  ds.feature_names = std::move(feature_names);
  for (int c = 0; c < ds.n_classes; ++c) {
    ds.class_names.push_back(std::to_string(c));
  }
  validate(ds);
  return ds;
}

Dataset load_csv(const std::filesystem::path &path, const LabelColumn &label,
                 const CsvOptions &options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.push_back(split_record(line, options.delimiter, line_no));
    line_numbers.push_back(line_no);
  }
  if (in.bad()) throw IoError("read failure on " + path.string());
  if (rows.empty()) throw IoError(path.string() + ": no rows");

  const std::size_t width = rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw IoError(path.string() + ": line " +
                    std::to_string(line_numbers[r]) + " has " +
                    std::to_string(rows[r].size()) + " columns, expected " +
                    std::to_string(width));
    }
  }
  if (width < 2) {
    throw IoError(path.string() + ": need a label column and a feature column");
  }

  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (options.has_header) {
    header = rows.front();
    for (auto &h : header) h = std::string(trim(h));
    first_data = 1;
  }

  std::size_t label_col = 0;
  if (const auto *name = std::get_if<std::string>(&label)) {
    if (!options.has_header) {
      throw IoError("label column selected by name but the file has no header");
    }
    const auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) {
      throw IoError(path.string() + ": no column named '" + *name + "'");
    }
    label_col = static_cast<std::size_t>(it - header.begin());
  } else {
    const int index = std::get<int>(label);
    const int w = static_cast<int>(width);
    const int resolved = index < 0 ? w + index : index;
    if (resolved < 0 || resolved >= w) {
      throw IoError(path.string() + ": label column index " +
                    std::to_string(index) + " out of range");
    }
    label_col = static_cast<std::size_t>(resolved);
  }

  const std::size_t n = rows.size() - first_data;
  const std::size_t d = width - 1;
  Eigen::MatrixXd features(static_cast<Eigen::Index>(d),
                           static_cast<Eigen::Index>(n));
  std::vector<std::string> raw_labels;
  raw_labels.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto &row = rows[first_data + s];
    std::size_t f = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_col) {
        raw_labels.emplace_back(trim(row[c]));
        continue;
      }
      const auto value = parse_double(row[c]);
      const std::string where = path.string() + ": line " +
                                std::to_string(line_numbers[first_data + s]) +
                                ", column " + std::to_string(c + 1);
      if (!value) {
        throw DataError(where + ": non-numeric feature value '" + row[c] + "'");
      }
      if (!std::isfinite(*value)) {
        throw DataError(where + ": non-finite feature value '" +
                        std::string(trim(row[c])) + "'");
      }
      features(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(s)) =
          *value;
      ++f;
    }
  }

  // Dense label encoding.
  std::vector<std::string> distinct(raw_labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const bool numeric = std::all_of(distinct.begin(), distinct.end(),
                                   [](const std::string &v) {
                                     return parse_double(v).has_value();
                                   });
  if (numeric) {
    std::stable_sort(distinct.begin(), distinct.end(),
                     [](const std::string &a, const std::string &b) {
                       return *parse_double(a) < *parse_double(b);
                     });
  }
  if (distinct.size() < 2) {
    throw DataError(path.string() + ": need at least two distinct labels, found " +
                    std::to_string(distinct.size()));
  }
  std::map<std::string, int> code;
  for (std::size_t c = 0; c < distinct.size(); ++c) {
    code[distinct[c]] = static_cast<int>(c);
  }

  Dataset ds;
  ds.features = std::move(features);
  ds.labels.reserve(n);
  for (const auto &l : raw_labels) ds.labels.push_back(code.at(l));
  ds.n_classes = static_cast<int>(distinct.size());
  ds.class_names = std::move(distinct);
  if (options.has_header) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c != label_col) ds.feature_names.push_back(header[c]);
    }
  }
  validate(ds);
  return ds;
}

Dataset standardize(const Dataset &ds) {
  Dataset out = ds;
  const Eigen::Index d = ds.n_features();
  const double n = static_cast<double>(ds.n_samples());
  Standardization constants;
  constants.means.resize(static_cast<std::size_t>(d));
  constants.stds.resize(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    const double mean = ds.features.row(i).sum() / n;
    const double var =
        (ds.features.row(i).array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    // Constant rows leave only rounding noise behind.
    if (sd <= 1e-12 * (1.0 + std::abs(mean))) {
      out.features.row(i).setZero();
      constants.stds[static_cast<std::size_t>(i)] = 0.0;
    } else {
      out.features.row(i) = (ds.features.row(i).array() - mean) / sd;
      constants.stds[static_cast<std::size_t>(i)] = sd;
    }
    constants.means[static_cast<std::size_t>(i)] = mean;
  }
  // Keep the constants of the first pass so they still map back to raw units.
  if (!ds.standardization) out.standardization = std::move(constants);
  return out;
}

OneHotLabels one_hot(const std::vector<int> &labels, int n_classes) {
  OneHotLabels y;
  y.matrix = Eigen::MatrixXd::Zero(n_classes,
                                   static_cast<Eigen::Index>(labels.size()));
  for (std::size_t j = 0; j < labels.size(); ++j) {
    y.matrix(labels[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  return y;
}

OneHotLabels one_hot(const Dataset &ds) {
  return one_hot(ds.labels, ds.n_classes);
}

SplitIndices split(const Dataset &ds, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(ds.n_samples());
  if (n < 10) {
    throw DataError("split needs at least 10 samples, got " + std::to_string(n));
  }
  const auto k = static_cast<std::size_t>(ds.n_classes);
  std::vector<std::vector<Eigen::Index>> members(k);
  for (std::size_t j = 0; j < n; ++j) {
    members[static_cast<std::size_t>(ds.labels[j])].push_back(
        static_cast<Eigen::Index>(j));
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (members[c].size() < 2) {
      throw DataError("class " + std::to_string(c) + " has " +
                      std::to_string(members[c].size()) +
                      " sample(s); stratified split needs at least 2");
    }
  }

  // Largest-remainder apportionment of round(0.7 n) training slots, keeping
  // at least one sample of every class on each side.
  const auto target = static_cast<std::size_t>(std::llround(0.7 * n));
  std::vector<std::size_t> quota(k);
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double exact = 0.7 * static_cast<double>(members[c].size());
    const auto floor = static_cast<std::size_t>(exact);
    quota[c] = std::clamp<std::size_t>(floor, 1, members[c].size() - 1);
    remainder[c] = exact - static_cast<double>(floor);
    assigned += quota[c];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  while (assigned < target) {
    bool moved = false;
    for (std::size_t c : order) {
      if (assigned == target) break;
      if (quota[c] + 1 < members[c].size()) {
        ++quota[c];
        ++assigned;
        moved = true;
      }
    }
    if (!moved) break;
  }
  while (assigned > target) {
    bool moved = false;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (assigned == target) break;
      if (quota[*it] > 1) {
        --quota[*it];
        --assigned;
        moved = true;
      }
    }
    if (!moved) break;
  }

  SplitIndices out;
  out.seed = seed;
  Rng rng(seed);
  for (std::size_t c = 0; c < k; ++c) {
    auto &m = members[c];
    rng.shuffle(std::span<Eigen::Index>(m));
    out.train.insert(out.train.end(), m.begin(),
                     m.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    out.test.insert(out.test.end(),
                    m.begin() + static_cast<std::ptrdiff_t>(quota[c]), m.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

Dataset subset(const Dataset &ds, const std::vector<Eigen::Index> &samples,
               const std::vector<Eigen::Index> &features) {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(features.size()),
                      static_cast<Eigen::Index>(samples.size()));
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (std::size_t f = 0; f < features.size(); ++f) {
      out.features(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(s)) =
          ds.features(features[f], samples[s]);
    }
    out.labels.push_back(ds.labels[static_cast<std::size_t>(samples[s])]);
  }
  for (auto f : features) out.feature_names.push_back(ds.feature_name(f));
  out.class_names = ds.class_names;
  out.n_classes = ds.n_classes;
  return out;
}

std::string metadata_json(const Dataset &ds) {
  nlohmann::json j;
  j["n_features"] = ds.n_features();
  j["n_samples"] = ds.n_samples();
  j["n_classes"] = ds.n_classes;
  nlohmann::json mapping = nlohmann::json::array();
  for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
    mapping.push_back({{"code", c}, {"label", ds.class_names[c]}});
  }
  j["label_mapping"] = mapping;
  nlohmann::json names = nlohmann::json::array();
  for (Eigen::Index i = 0; i < ds.n_features(); ++i) {
    names.push_back(ds.feature_name(i));
  }
  j["feature_names"] = names;
  if (ds.standardization) {
    j["standardization"] = {{"means", ds.standardization->means},
                            {"stds", ds.standardization->stds}};
  } else {
    j["standardization"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace polyfs
