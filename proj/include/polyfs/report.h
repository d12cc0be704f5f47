#pragma once

#include <filesystem>
#include <string>

#include "polyfs/data.h"
#include "polyfs/evaluation.h"
#include "polyfs/polygon.h"
#include "polyfs/sweep.h"

namespace polyfs {

/// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path &path,
                       const std::string &contents);

std::string read_file(const std::filesystem::path &path);

/// feature_index,feature_name,polygon_area,rank (rank is 1-based).
std::string ranking_csv(const FeatureRanking &ranking, const Dataset &ds);
std::string ranking_json(const FeatureRanking &ranking, const Dataset &ds);

/// Parses the output of ranking_csv back into a ranking.
FeatureRanking parse_ranking_csv(const std::string &text);

/// Vertex lists of every feature polygon, in feature order.
std::string polygons_json(const QuadrantWeights &wq, const Dataset &ds);

/// alpha,beta,gamma,S,iterations,converged
std::string sweep_csv(const SweepResult &result);

/// iteration,f,grad_norm,dt. dt is the accepted step that produced the
/// iterate; blank for iteration 0.
std::string trace_csv(const DescentTrace &trace);

/// subset_size,mean_acc,std_acc
std::string curve_csv(const EvalCurve &curve);

}  // namespace polyfs
