#include "polyfs/report.h"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "json.hpp"

#include "polyfs/error.h"

namespace polyfs {

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw IoError("cannot format real value");
  return std::string(buf, ptr);
}

void write_file_atomic(const std::filesystem::path &path,
                       const std::string &contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() +
                  ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string ranking_csv(const FeatureRanking &ranking, const Dataset &ds) {
  std::string out = "feature_index,feature_name,polygon_area,rank\n";
  for (std::size_t r = 0; r < ranking.entries.size(); ++r) {
    const auto &e = ranking.entries[r];
    out += std::to_string(e.feature_index) + "," +
           csv_field(ds.feature_name(e.feature_index)) + "," +
           format_real(e.area) + "," + std::to_string(r + 1) + "\n";
  }
  return out;
}

std::string ranking_json(const FeatureRanking &ranking, const Dataset &ds) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < ranking.entries.size(); ++r) {
    const auto &e = ranking.entries[r];
    rows.push_back({{"feature_index", e.feature_index},
                    {"feature_name", ds.feature_name(e.feature_index)},
                    {"polygon_area", e.area},
                    {"rank", r + 1}});
  }
  return nlohmann::json{{"ranking", rows}}.dump(2) + "\n";
}

FeatureRanking parse_ranking_csv(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("feature_index,", 0) != 0) {
    throw DataError("ranking file lacks the feature_index header");
  }
  // Rows are keyed by rank so the file order does not matter.
  std::map<long, RankedFeature> by_rank;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto first = line.find(',');
    const auto last = line.rfind(',');
    const auto area_start = line.rfind(',', last - 1);
    if (first == std::string::npos || area_start == std::string::npos ||
        area_start < first) {
      throw DataError("ranking line " + std::to_string(line_no) +
                      " is malformed");
    }
    try {
      RankedFeature e;
      e.feature_index = std::stol(line.substr(0, first));
      e.area = std::stod(line.substr(area_start + 1, last - area_start - 1));
      const long rank = std::stol(line.substr(last + 1));
      if (!by_rank.emplace(rank, e).second) {
        throw DataError("duplicate rank " + std::to_string(rank));
      }
    } catch (const std::logic_error &) {
      throw DataError("ranking line " + std::to_string(line_no) +
                      " has non-numeric fields");
    }
  }
  FeatureRanking ranking;
  for (auto &[rank, e] : by_rank) ranking.entries.push_back(e);
  return ranking;
}

std::string polygons_json(const QuadrantWeights &wq, const Dataset &ds) {
  nlohmann::json polys = nlohmann::json::array();
  for (Eigen::Index j = 0; j < wq.W_delta.rows(); ++j) {
    const FeaturePolygon poly = build_polygon(wq, j);
    nlohmann::json verts = nlohmann::json::array();
    for (const auto &v : poly.vertices) verts.push_back({v.x, v.y});
    polys.push_back({{"feature_index", j},
                     {"feature_name", ds.feature_name(j)},
                     {"area", polygon_area(poly)},
                     {"vertices", verts}});
  }
  return nlohmann::json{{"n_classes", wq.W_delta.cols()}, {"polygons", polys}}
             .dump(2) +
         "\n";
}

std::string sweep_csv(const SweepResult &result) {
  std::string out = "alpha,beta,gamma,S,iterations,converged\n";
  for (const auto &pt : result.per_point) {
    out += format_real(pt.weights.alpha()) + "," +
           format_real(pt.weights.beta()) + "," +
           format_real(pt.weights.gamma()) + "," +
           (pt.diverged ? std::string("nan") : format_real(pt.area)) + "," +
           std::to_string(pt.iterations) + "," +
           (pt.converged ? "true" : "false") + "\n";
  }
  return out;
}

std::string trace_csv(const DescentTrace &trace) {
  std::string out = "iteration,f,grad_norm,dt\n";
  for (std::size_t i = 0; i < trace.f_values.size(); ++i) {
    out += std::to_string(i) + "," + format_real(trace.f_values[i]) + "," +
           format_real(trace.grad_norms[i]) + "," +
           (i == 0 ? std::string() : format_real(trace.accepted_steps[i - 1])) +
           "\n";
  }
  return out;
}

std::string curve_csv(const EvalCurve &curve) {
  std::string out = "subset_size,mean_acc,std_acc\n";
  for (const auto &pt : curve.points) {
    out += std::to_string(pt.subset_size) + "," +
           format_real(pt.mean_accuracy) + "," + format_real(pt.std_accuracy) +
           "\n";
  }
  return out;
}

}  // namespace polyfs
