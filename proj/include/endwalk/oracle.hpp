#pragma once

#include <map>
#include <optional>
#include <vector>

#include "endwalk/patch.hpp"

namespace endwalk {

struct HorizonExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleReport {
  std::vector<BigInt> saw;  // saw[n], n = 0..N
  std::vector<BigInt> sar;
  std::vector<BigInt> sap;
  std::optional<int> horizon;  // nullopt: finite graph, all counts exact
  // displacement[n][d] = number of length-n SAWs ending at distance d
  std::vector<std::vector<BigInt>> displacement;
  std::vector<double> growth_saw;  // c_n^{1/n}
  std::vector<double> growth_sar;  // SAR_n^{1/n}
};

// Exhaustive DFS ground truth on the patch, exact for n <= exact_horizon.
// Throws HorizonExceeded when N lies past the patch's horizon. jobs > 1
// splits the search over first arcs with a deterministic merge.
OracleReport brute_counts(const Patch& patch, int origin, int N, int jobs = 1);

struct DisplacementStats {
  int n = 0;
  std::vector<BigInt> histogram;  // by distance 0..n
  double mean_over_n = 0;
  double below_fraction = 0;  // fraction with d < c*n
  double c = 0;
};

DisplacementStats displacement_stats(const OracleReport& rep, int n, double c);

struct GrowthReport {
  std::vector<double> growth_saw;
  std::vector<double> growth_sar;
  std::vector<double> growth_sap;
  double max_sar_growth = 0;
  // max_n SAR_n^{1/n} < mu_w witness; meaningful when mu_w is supplied
  std::optional<bool> sar_gap;
};

GrowthReport growth_report(const OracleReport& rep,
                           std::optional<double> mu_w = std::nullopt);

}  // namespace endwalk
